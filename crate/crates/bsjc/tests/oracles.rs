//! Oracle-backed integration tests.
//!
//! Every quantitative assertion here is checked against a value that was
//! produced *outside* the code paths under test: analytic closed forms
//! (Gaussian/Rician/Fock-state integrals), independent series
//! implementations of the special functions, a brute-force eigensolver
//! propagator, and high-precision reference values frozen as decimal
//! literals. Tolerances reflect quadrature resolution, not slack.

use std::f64::consts::PI;

use bsjc::info_measures::{
    beta_moments, cr_product, fisher_information, initial_fisher_pd_closed_form,
    initial_identities, measure_record, wehrl_entropy,
};
use bsjc::model_core::{
    choose_truncation, evolve_brute_force, evolve_closed_form, state_fidelity, ModelConfig,
};
use bsjc::phase_space::{build_grid, build_grid_sized, sample_qfield};

/// Euler–Mascheroni constant (not in `std::f64::consts` on stable).
const EULER_GAMMA: f64 = 0.577215664901532861;

/// Self-contained reference implementations, independent of the crate.
mod oracle {
    /// Modified Bessel function `I_ν(z)` for ν ∈ {0, 1} by its ascending
    /// series. All terms are positive (no cancellation); converges fast for
    /// the moderate arguments used here (z ≤ 13).
    fn bessel_i(nu: u32, z: f64) -> f64 {
        let half = z / 2.0;
        let mut term = if nu == 0 { 1.0 } else { half };
        let mut sum = term;
        for k in 1..200 {
            let kf = k as f64;
            term *= half * half / (kf * (kf + nu as f64));
            sum += term;
            if term < sum * 1e-18 {
                break;
            }
        }
        sum
    }

    /// Mean of the Rician distribution with location ν and scale σ:
    /// `E|β| = σ √(π/2) e^{−x/2} [(1+x) I₀(x/2) + x I₁(x/2)]`, `x = ν²/(2σ²)`.
    ///
    /// The Husimi function of a coherent state |α⟩ in the `β = X₁ + iX₂`
    /// convention is an isotropic Gaussian of per-axis variance 1/2 centred
    /// at α, so |β| is Rician with ν = α, σ = 1/√2.
    pub fn rician_mean(nu: f64, sigma: f64) -> f64 {
        let x = nu * nu / (2.0 * sigma * sigma);
        sigma
            * (std::f64::consts::PI / 2.0).sqrt()
            * (-x / 2.0).exp()
            * ((1.0 + x) * bessel_i(0, x / 2.0) + x * bessel_i(1, x / 2.0))
    }

    /// Error function by its alternating Maclaurin series,
    /// `erf(x) = (2/√π) Σ (−1)ⁿ x^{2n+1} / (n! (2n+1))`.
    ///
    /// Adequate to ~1e-12 absolute for |x| ≤ 3.5 (cancellation grows with
    /// |x|); used only to cross-check the production `erf`.
    pub fn erf_series(x: f64) -> f64 {
        let mut term = x;
        let mut sum = x;
        for n in 1..200 {
            let nf = n as f64;
            term *= -x * x / nf;
            let contrib = term / (2.0 * nf + 1.0);
            sum += contrib;
            if contrib.abs() < 1e-20 {
                break;
            }
        }
        2.0 / std::f64::consts::PI.sqrt() * sum
    }

    /// Poisson upper tail `P(X > m)` for `X ~ Poisson(λ)`, summing the pmf
    /// from the far tail downward so the smallest terms accumulate first.
    pub fn poisson_tail(m: usize, lambda: f64) -> f64 {
        if lambda == 0.0 {
            return 0.0;
        }
        let n_hi = (lambda + 20.0 * lambda.sqrt() + 60.0).ceil() as usize;
        let pmf = |n: usize| -> f64 {
            let nf = n as f64;
            (nf * lambda.ln() - lambda - libm::lgamma(nf + 1.0)).exp()
        };
        let mut tail = 0.0;
        for n in ((m + 1)..=n_hi).rev() {
            tail += pmf(n);
        }
        tail
    }

    /// Smallest truncation with Poisson(α²) tail below `tol`, plus one level
    /// of headroom for the de-excitation branch, floored at 16.
    pub fn truncation(alpha: f64, tol: f64) -> usize {
        let lambda = alpha * alpha;
        let mut m = 0;
        while poisson_tail(m, lambda) >= tol {
            m += 1;
        }
        (m + 1).max(16)
    }
}

fn assert_close(a: f64, b: f64, tol: f64, what: &str) {
    assert!(
        (a - b).abs() <= tol,
        "{what}: {a} vs {b} (|Δ| = {:.3e}, tol {tol:.1e})",
        (a - b).abs()
    );
}

#[test]
fn production_erf_matches_series_oracle() {
    let mut x = -3.5;
    while x <= 3.5 {
        assert_close(libm::erf(x), oracle::erf_series(x), 5e-12, &format!("erf({x})"));
        x += 0.05;
    }
}

#[test]
fn truncation_choice_matches_poisson_tail_oracle() {
    // Frozen expectations double-check the oracle itself.
    let frozen = [(0.0, 16), (1.0, 16), (2.0, 26), (3.0, 38), (3.5, 45), (5.0, 69)];
    for &(alpha, expect) in &frozen {
        let oracle_n = oracle::truncation(alpha, 1e-12);
        assert_eq!(oracle_n, expect, "oracle truncation at α = {alpha}");
        let chosen = choose_truncation(alpha, 1e-12).unwrap();
        assert_eq!(chosen, oracle_n, "choose_truncation at α = {alpha}");
    }
    // Tighter tolerance must never shrink the truncation.
    for &(alpha, _) in &frozen {
        assert!(
            choose_truncation(alpha, 1e-15).unwrap() >= choose_truncation(alpha, 1e-12).unwrap(),
            "monotone in tolerance at α = {alpha}"
        );
    }
}

#[test]
fn modulus_mean_matches_rician_oracle() {
    // High-precision reference values of the Rician mean with ν = α,
    // σ = 1/√2 (external arbitrary-precision evaluation, 18 digits).
    let frozen = [
        (0.0, 0.886226925452758014), // = √π/2, the Rayleigh limit
        (1.0, 1.28191957656085687),
        (2.0, 2.13015167228858415),
        (3.0, 3.08461222828180115),
    ];
    let sigma = 0.5_f64.sqrt();
    for &(alpha, reference) in &frozen {
        assert_close(
            oracle::rician_mean(alpha, sigma),
            reference,
            1e-15,
            &format!("Bessel-series Rician mean at α = {alpha}"),
        );
        let cfg = ModelConfig::with_alpha(alpha);
        let g = build_grid(&cfg).unwrap();
        let s = evolve_closed_form(&cfg, 0.0).unwrap();
        let qf = sample_qfield(&s, &g).unwrap();
        assert_close(
            beta_moments(&qf, &g, 1).unwrap(),
            reference,
            5e-9,
            &format!("⟨|β|⟩ at T = 0, α = {alpha}"),
        );
        // Second moment of the same Gaussian: ⟨|β|²⟩ = α² + 1.
        assert_close(
            beta_moments(&qf, &g, 2).unwrap(),
            alpha * alpha + 1.0,
            5e-9,
            &format!("⟨|β|²⟩ at T = 0, α = {alpha}"),
        );
    }
}

#[test]
fn initial_cr_product_matches_rician_oracle() {
    // At T = 0: I_F = 2 exactly, so I_F·Δ² = 2(α² + 1 − E|β|²_oracle).
    let sigma = 0.5_f64.sqrt();
    for alpha in [1.0, 2.0, 3.0] {
        let mean = oracle::rician_mean(alpha, sigma);
        let expect = 2.0 * (alpha * alpha + 1.0 - mean * mean);
        let cfg = ModelConfig::with_alpha(alpha);
        let g = build_grid(&cfg).unwrap();
        let s = evolve_closed_form(&cfg, 0.0).unwrap();
        let qf = sample_qfield(&s, &g).unwrap();
        assert_close(
            cr_product(&qf, &g).unwrap(),
            expect,
            1e-8,
            &format!("I_F·Δ² at T = 0, α = {alpha}"),
        );
    }
}

#[test]
fn fock_one_state_matches_analytic_integrals() {
    // At α = 0, T = π/2 the closed-form state is exactly |1⟩ ⊗ |ground⟩
    // (vacuum Rabi oscillation). For the Fock state |1⟩ every quantifier
    // has an elementary closed form:
    //   S_W = 1 + γ + ln π,
    //   I_F = 4            (per-axis Husimi variance is (n+1)/2 = 1),
    //   ⟨|β|⟩ = 3√π/4, ⟨|β|²⟩ = 2 ⇒ I_F·Δ² = 4(2 − 9π/16).
    let cfg = ModelConfig::with_alpha(0.0);
    let g = build_grid(&cfg).unwrap();
    let s = evolve_closed_form(&cfg, PI / 2.0).unwrap();
    let qf = sample_qfield(&s, &g).unwrap();
    let rec = measure_record(&qf, &g).unwrap();
    assert_close(rec.s_w, 1.0 + EULER_GAMMA + PI.ln(), 1e-8, "S_W(|1⟩)");
    assert_close(rec.i_f, 4.0, 1e-8, "I_F(|1⟩)");
    assert_close(rec.variances.var_x1, 1.0, 1e-9, "var_x1(|1⟩)");
    assert_close(rec.variances.var_x2, 1.0, 1e-9, "var_x2(|1⟩)");
    assert_close(
        rec.cr_product,
        4.0 * (2.0 - 9.0 * PI / 16.0),
        1e-8,
        "I_F·Δ² for |1⟩",
    );
}

#[test]
fn brute_force_pipeline_agrees_with_closed_form() {
    // Same physics through two propagators and two grids: closed form on
    // the default 200×256 grid vs eigensolver evolution on 400×512.
    let cfg = ModelConfig::with_alpha(1.0);
    let t = PI / 2.0;

    let g1 = build_grid(&cfg).unwrap();
    let s1 = evolve_closed_form(&cfg, t).unwrap();
    let q1 = sample_qfield(&s1, &g1).unwrap();

    let g2 = build_grid_sized(&cfg, 400, 512).unwrap();
    let s2 = evolve_brute_force(&cfg, t).unwrap();
    let q2 = sample_qfield(&s2, &g2).unwrap();

    assert_close(
        wehrl_entropy(&q1, &g1).unwrap(),
        wehrl_entropy(&q2, &g2).unwrap(),
        1e-6,
        "S_W across propagator and grid refinement",
    );
    assert_close(
        fisher_information(&q1, &g1).unwrap(),
        fisher_information(&q2, &g2).unwrap(),
        1e-6,
        "I_F across propagator and grid refinement",
    );

    // And the states themselves are indistinguishable.
    let f = state_fidelity(&s1, &s2).unwrap();
    assert!(f > 1.0 - 1e-12, "closed-vs-brute fidelity: {f}");
}

#[test]
fn initial_entropy_information_relation_holds() {
    for alpha in [0.0, 0.5, 1.0, 2.0, 3.0] {
        let rep = initial_identities(alpha).unwrap();
        assert_close(rep.i_f0, 2.0, 1e-6, &format!("I_F(0) at α = {alpha}"));
        assert_close(rep.s_w0, 1.0 + PI.ln(), 1e-6, &format!("S_W(0) at α = {alpha}"));
        assert!(
            rep.entropy_relation_residual < 1e-6,
            "entropy relation residual at α = {alpha}: {}",
            rep.entropy_relation_residual
        );
    }
}

#[test]
fn initial_phase_density_closed_form_is_unit_normalized() {
    // The closed form integrates to exactly 1 over Θ; the numerical phase
    // density integrates to I_F(0) = 2 — hence the factor-2 mean ratio.
    for alpha in [1.0, 3.0] {
        let cfg = ModelConfig::with_alpha(alpha);
        let g = build_grid(&cfg).unwrap();
        let total: f64 = g
            .theta_nodes
            .iter()
            .map(|&th| initial_fisher_pd_closed_form(alpha, th) * g.theta_weight)
            .sum();
        assert_close(total, 1.0, 1e-10, &format!("∫ closed form dΘ at α = {alpha}"));
        let rep = initial_identities(alpha).unwrap();
        assert_close(
            rep.phase_density_mean_ratio,
            2.0,
            1e-6,
            &format!("numeric/closed-form ratio at α = {alpha}"),
        );
    }
}

#[test]
fn mid_evolution_values_match_independent_reference() {
    // Frozen from an independent high-precision implementation of the same
    // definitions (different language, different quadrature code paths).
    let cfg = ModelConfig::with_alpha(3.0);
    let g = build_grid(&cfg).unwrap();
    let s = evolve_closed_form(&cfg, 1.3).unwrap();
    let qf = sample_qfield(&s, &g).unwrap();
    let rec = measure_record(&qf, &g).unwrap();
    assert_close(rec.s_w, 2.8459100594, 2e-6, "S_W(α=3, T=1.3)");
    assert_close(rec.i_f, 19.7675277508, 2e-5, "I_F(α=3, T=1.3)");
}
