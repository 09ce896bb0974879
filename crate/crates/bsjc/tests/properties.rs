//! Property-based tests: structural invariants that must hold for *every*
//! parameter combination, exercised on randomized inputs via proptest.

use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;

use bsjc::info_measures::{audit_record, marginal_cr_check, measure_record, MarginalAxis};
use bsjc::model_core::{evolve_closed_form, ModelConfig};
use bsjc::phase_space::{build_grid_sized, husimi_gradient, husimi_q, integrate, sample_qfield};
use ndarray::Array2;

fn cfg_with(alpha: f64, phase: f64) -> ModelConfig {
    ModelConfig { alpha_phase: phase, ..ModelConfig::with_alpha(alpha) }
}

proptest! {
    // State-level properties are nearly free; give them plenty of cases.
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn evolution_conserves_norm(alpha in 0.0..3.5f64, t in 0.0..(2.0 * PI)) {
        let s = evolve_closed_form(&ModelConfig::with_alpha(alpha), t).unwrap();
        prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-12, "norm² = {}", s.norm_sqr());
    }

    #[test]
    fn evolution_is_exactly_periodic(alpha in 0.0..3.5f64, t in 0.0..(2.0 * PI)) {
        // Integer Rabi frequencies ⇒ period exactly 2π in T = λt.
        let a = evolve_closed_form(&ModelConfig::with_alpha(alpha), t).unwrap();
        let b = evolve_closed_form(&ModelConfig::with_alpha(alpha), t + 2.0 * PI).unwrap();
        for (x, y) in a.upper.amps.iter().zip(&b.upper.amps) {
            prop_assert!((x - y).norm() < 1e-12);
        }
        for (x, y) in a.lower.amps.iter().zip(&b.lower.amps) {
            prop_assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn time_reversal_conjugates_the_lower_branch(alpha in 0.0..3.5f64, t in 0.0..(2.0 * PI)) {
        // cos is even and sin is odd in T: upper(−T) = upper(T),
        // lower(−T) = −lower(T).
        let fwd = evolve_closed_form(&ModelConfig::with_alpha(alpha), t).unwrap();
        let bwd = evolve_closed_form(&ModelConfig::with_alpha(alpha), -t).unwrap();
        for (x, y) in fwd.upper.amps.iter().zip(&bwd.upper.amps) {
            prop_assert!((x - y).norm() < 1e-14);
        }
        for (x, y) in fwd.lower.amps.iter().zip(&bwd.lower.amps) {
            prop_assert!((x + y).norm() < 1e-14);
        }
    }

    #[test]
    fn atom_disentangles_at_multiples_of_pi(alpha in 0.0..3.5f64, k in 1usize..4) {
        // At T = kπ every sin(mT) vanishes: the joint state is again a
        // product with the atom excited and the field in |±α⟩.
        let s = evolve_closed_form(&ModelConfig::with_alpha(alpha), k as f64 * PI).unwrap();
        let leaked: f64 = s.lower.amps.iter().map(|a| a.norm_sqr()).sum();
        prop_assert!(leaked < 1e-24, "lower-branch population {leaked}");
    }

    #[test]
    fn husimi_is_bounded_pointwise(
        alpha in 0.0..3.0f64,
        t in 0.0..(2.0 * PI),
        re in -6.0..6.0f64,
        im in -6.0..6.0f64,
    ) {
        let s = evolve_closed_form(&ModelConfig::with_alpha(alpha), t).unwrap();
        let q = husimi_q(Complex64::new(re, im), &s);
        prop_assert!(q >= 0.0, "Q = {q} < 0");
        prop_assert!(q <= 1.0 / PI + 1e-12, "Q = {q} > 1/π");
    }
}

proptest! {
    // Each case samples a full grid or runs finite differences; keep counts
    // moderate.
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn gradient_matches_finite_differences(
        alpha in 0.2..3.0f64,
        t in 0.0..(2.0 * PI),
        radius in 0.0..1.0f64,
        angle in 0.0..(2.0 * PI),
    ) {
        let s = evolve_closed_form(&ModelConfig::with_alpha(alpha), t).unwrap();
        // Probe within the populated disc, where Q is non-negligible.
        let r = radius * (alpha + 2.0);
        let beta = Complex64::from_polar(r, angle);
        let (g1, g2) = husimi_gradient(beta, &s);
        let h = 1e-5;
        let dx = Complex64::new(h, 0.0);
        let dy = Complex64::new(0.0, h);
        let f1 = (husimi_q(beta + dx, &s) - husimi_q(beta - dx, &s)) / (2.0 * h);
        let f2 = (husimi_q(beta + dy, &s) - husimi_q(beta - dy, &s)) / (2.0 * h);
        prop_assert!((g1 - f1).abs() < 1e-8, "∂₁Q: {g1} vs FD {f1}");
        prop_assert!((g2 - f2).abs() < 1e-8, "∂₂Q: {g2} vs FD {f2}");
    }

    #[test]
    fn records_from_random_points_pass_the_audit(
        alpha in 0.0..3.5f64,
        t in 0.0..(2.0 * PI),
    ) {
        let cfg = ModelConfig::with_alpha(alpha);
        let g = build_grid_sized(&cfg, 64, 64).unwrap();
        let qf = sample_qfield(&evolve_closed_form(&cfg, t).unwrap(), &g).unwrap();
        let rec = measure_record(&qf, &g).unwrap();
        audit_record(&rec, &g).unwrap();
        // Wehrl–Lieb and positivity, stated directly as well.
        prop_assert!(rec.s_w >= 1.0 + PI.ln() - 1e-6, "S_W = {}", rec.s_w);
        prop_assert!(rec.i_f >= 0.0 && rec.i_f.is_finite(), "I_F = {}", rec.i_f);
        prop_assert!(rec.delta_sq >= 0.0, "Δ² = {}", rec.delta_sq);
    }

    #[test]
    fn integrate_is_linear(
        a in -3.0..3.0f64,
        b in -3.0..3.0f64,
        seed in any::<u64>(),
    ) {
        use rand::{Rng, SeedableRng};
        let g = build_grid_sized(&ModelConfig::with_alpha(1.0), 24, 32).unwrap();
        let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
        let f = Array2::from_shape_fn((24, 32), |_| rng.gen_range(-1.0..1.0));
        let h = Array2::from_shape_fn((24, 32), |_| rng.gen_range(-1.0..1.0));
        let combo = integrate(&g, &(a * &f + b * &h)).unwrap();
        let parts = a * integrate(&g, &f).unwrap() + b * integrate(&g, &h).unwrap();
        prop_assert!((combo - parts).abs() < 1e-12, "{combo} vs {parts}");
    }
}

proptest! {
    // Marginal CR checks scan exact marginals: ~50 ms per case.
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn marginal_cramer_rao_bound_holds(
        alpha in 0.5..2.5f64,
        t in 0.0..(2.0 * PI),
        which in 0usize..2,
    ) {
        let cfg = ModelConfig::with_alpha(alpha);
        let g = build_grid_sized(&cfg, 96, 96).unwrap();
        let s = evolve_closed_form(&cfg, t).unwrap();
        let axis = if which == 0 { MarginalAxis::X1 } else { MarginalAxis::X2 };
        let m = marginal_cr_check(&s, &g, axis).unwrap();
        prop_assert!(m.product >= 1.0 - 1e-3, "Var·I = {} at α={alpha}, T={t}", m.product);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn rotating_alpha_shifts_the_husimi_columns(
        alpha in 0.5..3.0f64,
        t in 0.0..(2.0 * PI),
        k in 1usize..64,
    ) {
        // A phase on α rotates phase space rigidly: with φ an exact multiple
        // of the angular spacing, the sampled Q field is a column rotation.
        let n_theta = 64;
        let base = cfg_with(alpha, 0.0);
        let grid = build_grid_sized(&base, 48, n_theta).unwrap();
        let phi = k as f64 * grid.theta_weight; // θ_w = 2π/n_theta
        let q0 = sample_qfield(&evolve_closed_form(&base, t).unwrap(), &grid).unwrap();
        let q1 = sample_qfield(
            &evolve_closed_form(&cfg_with(alpha, phi), t).unwrap(),
            &grid,
        )
        .unwrap();
        for i in 0..48 {
            for j in 0..n_theta {
                let expect = q0.q[[i, (j + n_theta - k) % n_theta]];
                let got = q1.q[[i, j]];
                prop_assert!(
                    (got - expect).abs() < 1e-12,
                    "Q rotation mismatch at ({i},{j}): {got} vs {expect}"
                );
            }
        }
    }
}
