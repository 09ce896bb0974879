//! The `validate` subcommand: a self-contained invariant suite that checks
//! the installed binary against analytic anchors, the independent
//! eigensolver propagator, and the physical bounds. Needs no network and no
//! external files; prints one `ok`/`FAIL` line per check and returns the
//! failure count.

use std::f64::consts::PI;

use bsjc::info_measures::{
    audit_record, fisher_information, marginal_cr_check, measure_record, wehrl_entropy,
    MarginalAxis,
};
use bsjc::model_core::{evolve_brute_force, evolve_closed_form, state_fidelity, ModelConfig};
use bsjc::phase_space::{build_grid_sized, husimi_gradient, husimi_q, sample_qfield};
use num_complex::Complex64;

pub struct Checker {
    pub total: usize,
    pub failures: usize,
}

impl Checker {
    fn check(&mut self, name: &str, ok: bool, detail: String) {
        self.total += 1;
        if ok {
            println!("ok   — {name}: {detail}");
        } else {
            self.failures += 1;
            println!("FAIL — {name}: {detail}");
        }
    }
}

/// Run every check for every α; returns the checker tally.
/// Numerical errors (truncation, grid coverage) abort with `Err`.
pub fn run(
    alphas: &[f64],
    base: &ModelConfig,
    n_r: usize,
    n_theta: usize,
) -> Result<Checker, bsjc::Error> {
    let mut c = Checker { total: 0, failures: 0 };
    let ln_pi = PI.ln();

    for &alpha in alphas {
        let cfg = ModelConfig { alpha_mag: alpha, ..base.clone() };
        let grid = build_grid_sized(&cfg, n_r, n_theta)?;
        let tag = format!("α={alpha}");

        // Analytic t = 0 anchors: coherent-state values and the
        // entropy–information relation.
        let s0 = evolve_closed_form(&cfg, 0.0)?;
        let q0 = sample_qfield(&s0, &grid)?;
        let i_f0 = fisher_information(&q0, &grid)?;
        let s_w0 = wehrl_entropy(&q0, &grid)?;
        c.check(
            &format!("{tag} initial Fisher information"),
            (i_f0 - 2.0).abs() < 1e-6,
            format!("I_F(0) = {i_f0:.9} (expect 2 ± 1e-6)"),
        );
        c.check(
            &format!("{tag} initial Wehrl entropy"),
            (s_w0 - (1.0 + ln_pi)).abs() < 1e-6,
            format!("S_W(0) = {s_w0:.9} (expect 1 + ln π ± 1e-6)"),
        );
        c.check(
            &format!("{tag} entropy–information relation"),
            (i_f0 - (s_w0 + 1.0 - ln_pi)).abs() < 1e-6,
            format!("|I_F(0) − (S_W(0) + 1 − ln π)| = {:.3e}", (i_f0 - (s_w0 + 1.0 - ln_pi)).abs()),
        );

        // Normalization of the sampled field across the period.
        let mut worst_norm = 0.0_f64;
        for &t in &[0.0, 0.7, PI / 2.0, PI, 5.8] {
            let qf = sample_qfield(&evolve_closed_form(&cfg, t)?, &grid)?;
            worst_norm = worst_norm.max((qf.norm - 1.0).abs());
        }
        c.check(
            &format!("{tag} Husimi normalization"),
            worst_norm < 1e-8,
            format!("max |∫Q − 1| = {worst_norm:.3e} over 5 times (tol 1e-8)"),
        );

        // Exact revival at T = 2π.
        let s_revival = evolve_closed_form(&cfg, 2.0 * PI)?;
        let f_rev = state_fidelity(&s0, &s_revival)?;
        let sw_a = wehrl_entropy(&sample_qfield(&evolve_closed_form(&cfg, 1.1)?, &grid)?, &grid)?;
        let sw_b = wehrl_entropy(
            &sample_qfield(&evolve_closed_form(&cfg, 1.1 + 2.0 * PI)?, &grid)?,
            &grid,
        )?;
        c.check(
            &format!("{tag} exact 2π revival"),
            (1.0 - f_rev).abs() < 1e-12 && (sw_a - sw_b).abs() < 1e-8,
            format!(
                "revival infidelity = {:.3e} (tol 1e-12), |S_W(T) − S_W(T+2π)| = {:.3e} (tol 1e-8)",
                1.0 - f_rev,
                (sw_a - sw_b).abs()
            ),
        );

        // Closed form against the eigensolver propagator.
        let mut worst_inf = 0.0_f64;
        for &t in &[0.6, PI / 2.0] {
            let f = state_fidelity(&evolve_closed_form(&cfg, t)?, &evolve_brute_force(&cfg, t)?)?;
            worst_inf = worst_inf.max(1.0 - f);
        }
        c.check(
            &format!("{tag} propagator cross-check"),
            worst_inf < 1e-10,
            format!("max closed-vs-eigensolver infidelity = {worst_inf:.3e} (tol 1e-10)"),
        );

        // Rigorous marginal Cramér–Rao bound, with equality at T = 0.
        let mut worst_deficit = f64::NEG_INFINITY;
        let mut eq_defect = 0.0_f64;
        for &t in &[0.0, 1.3] {
            let s = evolve_closed_form(&cfg, t)?;
            for axis in [MarginalAxis::X1, MarginalAxis::X2] {
                let m = marginal_cr_check(&s, &grid, axis)?;
                worst_deficit = worst_deficit.max(1.0 - m.product);
                if t == 0.0 {
                    eq_defect = eq_defect.max((m.product - 1.0).abs());
                }
            }
        }
        c.check(
            &format!("{tag} marginal Cramér–Rao bound"),
            worst_deficit < 1e-3 && eq_defect < 1e-3,
            format!(
                "worst Var·I deficit = {worst_deficit:.3e}, coherent equality defect = \
                 {eq_defect:.3e} (tol 1e-3)"
            ),
        );

        // Analytic gradients against central finite differences at fixed
        // probes of a mid-evolution state.
        let s_mid = evolve_closed_form(&cfg, 0.9)?;
        let probes = [
            Complex64::new(0.5 * alpha + 0.2, 0.3),
            Complex64::new(-0.4, 0.6 * alpha + 0.1),
            Complex64::new(0.8 * alpha, -0.5),
            Complex64::new(0.1, -0.7 * alpha - 0.2),
        ];
        let h = 1e-5;
        let mut worst_rel = 0.0_f64;
        for &beta in &probes {
            let (g1, g2) = husimi_gradient(beta, &s_mid);
            let f1 = (husimi_q(beta + h, &s_mid) - husimi_q(beta - h, &s_mid)) / (2.0 * h);
            let f2 = (husimi_q(beta + Complex64::new(0.0, h), &s_mid)
                - husimi_q(beta - Complex64::new(0.0, h), &s_mid))
                / (2.0 * h);
            let scale = g1.abs().max(g2.abs()).max(1e-3);
            worst_rel = worst_rel.max(((g1 - f1).abs() / scale).max((g2 - f2).abs() / scale));
        }
        c.check(
            &format!("{tag} gradient finite-difference spot check"),
            worst_rel < 1e-6,
            format!("max relative deviation = {worst_rel:.3e} over 4 probes (tol 1e-6)"),
        );

        // Full measure record passes the library's own invariant audit
        // (finiteness, Wehrl–Lieb bound, positivity, angular consistency).
        let rec = measure_record(&sample_qfield(&evolve_closed_form(&cfg, 1.3)?, &grid)?, &grid)?;
        let audit = audit_record(&rec, &grid);
        c.check(
            &format!("{tag} measure-record audit"),
            audit.is_ok(),
            match &audit {
                Ok(()) => format!("S_W = {:.6}, I_F = {:.6}, I_F·Δ² = {:.6}", rec.s_w, rec.i_f, rec.cr_product),
                Err(e) => format!("{e}"),
            },
        );
    }

    Ok(c)
}
