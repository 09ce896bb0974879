//! Information quantifiers of the sampled Husimi function.
//!
//! All measures live on the polar quadrature of [`crate::phase_space`]:
//!
//! * **Wehrl entropy** `S_W = −∫ Q ln Q d²β`, bounded below by `1 + ln π`
//!   with equality exactly for coherent states (Wehrl–Lieb).
//! * **Wehrl phase distribution** `S_Θ(Θ)`: the radial integral of `−Q ln Q`
//!   at fixed angle; its angular integral recovers `S_W`.
//! * **Husimi-based Fisher information**
//!   `I_F = ∫ Q Γ d²β`, `Γ = Σ_j (σ_{X_j}(t) · ∂ ln Q/∂X_j)²`,
//!   where `σ²_{X_j}(t)` are the current marginal variances of `Q`. For any
//!   coherent state (`t = 0`, and again at every disentanglement time)
//!   `σ² = 1/2` and the Gaussian gradient integral gives exactly `I_F = 2`.
//! * **Fisher phase distribution** `I_Θ(Θ)`: the radial integral of `Q·Γ`;
//!   integrates back to `I_F`. (Defined here with an overall `+` sign so it
//!   is pointwise nonnegative; see [`fisher_pd`].)
//! * **Cramér–Rao products**: the scalar product `I_F(t) · Δ_t²` built from
//!   modulus moments `⟨|β|^s⟩`, plus the rigorous one-dimensional marginal
//!   check `Var(x) · I_x ≥ 1` via [`marginal_cr_check`].
//!
//! The `t = 0` closed forms (error-function expressions and the
//! Fisher–Wehrl identities) are provided as analytic cross-checks in
//! [`initial_fisher_pd_closed_form`] and [`initial_identities`].

use ndarray::{Array2, Zip};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model_core::{evolve_closed_form, JointStateBranches, ModelConfig};
use crate::phase_space::{
    build_grid, gauss_legendre, husimi_q, integrate, sample_qfield, PhaseSpaceGrid, QField,
};
use crate::util::Kahan;

/// Floor applied to `Q` inside logarithms (`0 · ln 0 := 0` regularization).
const LOG_FLOOR: f64 = 1e-300;
/// Relative threshold below which gradient terms are dropped: where
/// `Q < GUARD_REL · max Q` the guarded form `(∂Q)²/Q` is set to zero.
const GUARD_REL: f64 = 1e-12;

/// Marginal means and variances of the sampled `Q` along `X₁` and `X₂`.
#[derive(Debug, Clone, Copy)]
pub struct VariancePair {
    pub mean_x1: f64,
    pub mean_x2: f64,
    pub var_x1: f64,
    pub var_x2: f64,
}

/// Every scalar and angular quantifier at one time sample.
#[derive(Debug, Clone)]
pub struct MeasureRecord {
    /// Scaled time `T = λt`.
    pub t_scaled: f64,
    /// Wehrl entropy (nats).
    pub s_w: f64,
    /// Husimi-based Fisher information.
    pub i_f: f64,
    /// Wehrl phase density over the grid's theta nodes.
    pub s_theta: Vec<f64>,
    /// Fisher phase density over the grid's theta nodes.
    pub i_theta: Vec<f64>,
    /// Marginal moments entering `Γ`.
    pub variances: VariancePair,
    /// `Δ_t² = ⟨|β|²⟩ − ⟨|β|⟩²`.
    pub delta_sq: f64,
    /// `I_F(t) · Δ_t²`.
    pub cr_product: f64,
}

/// Wehrl entropy `S_W = −∫ Q ln Q d²β` (logarithm floored at 1e-300).
pub fn wehrl_entropy(qf: &QField, g: &PhaseSpaceGrid) -> Result<f64> {
    let integrand = qf.q.mapv(|q| -q * q.max(LOG_FLOOR).ln());
    integrate(g, &integrand)
}

/// Wehrl phase distribution: `S_Θ(Θ_j) = ∫ (−Q ln Q) |β| d|β|` at fixed `Θ_j`.
///
/// The angular integral `Σ_j S_Θ(Θ_j) · ΔΘ` recovers [`wehrl_entropy`].
pub fn wehrl_pd(qf: &QField, g: &PhaseSpaceGrid) -> Result<Vec<f64>> {
    radial_profile(qf, g, |q, _, _| -q * q.max(LOG_FLOOR).ln())
}

/// Radial integral of a per-node integrand at each fixed angle.
fn radial_profile(
    qf: &QField,
    g: &PhaseSpaceGrid,
    f: impl Fn(f64, f64, f64) -> f64,
) -> Result<Vec<f64>> {
    if qf.q.dim() != (g.n_r, g.n_theta) {
        return Err(Error::InvalidArgument(format!(
            "field shape {:?} does not match grid ({}, {})",
            qf.q.dim(),
            g.n_r,
            g.n_theta
        )));
    }
    let mut acc = vec![Kahan::new(); g.n_theta];
    for i in 0..g.n_r {
        let rw = g.r_nodes[i] * g.r_weights[i];
        for (j, a) in acc.iter_mut().enumerate() {
            let node = (i, j);
            a.add(f(qf.q[node], qf.grad_x1[node], qf.grad_x2[node]) * rw);
        }
    }
    Ok(acc.iter().map(|a| a.sum()).collect())
}

/// Means and variances of `X₁ = |β| cos Θ` and `X₂ = |β| sin Θ` under `Q`.
pub fn marginal_stats(qf: &QField, g: &PhaseSpaceGrid) -> Result<VariancePair> {
    if qf.q.dim() != (g.n_r, g.n_theta) {
        return Err(Error::InvalidArgument(format!(
            "field shape {:?} does not match grid ({}, {})",
            qf.q.dim(),
            g.n_r,
            g.n_theta
        )));
    }
    let mut m1 = Kahan::new();
    let mut m2 = Kahan::new();
    let mut q1 = Kahan::new();
    let mut q2 = Kahan::new();
    for i in 0..g.n_r {
        let r = g.r_nodes[i];
        let rw = r * g.r_weights[i] * g.theta_weight;
        for j in 0..g.n_theta {
            let (st, ct) = g.theta_nodes[j].sin_cos();
            let x1 = r * ct;
            let x2 = r * st;
            let qw = qf.q[(i, j)] * rw;
            m1.add(x1 * qw);
            m2.add(x2 * qw);
            q1.add(x1 * x1 * qw);
            q2.add(x2 * x2 * qw);
        }
    }
    let mean_x1 = m1.sum();
    let mean_x2 = m2.sum();
    Ok(VariancePair {
        mean_x1,
        mean_x2,
        var_x1: q1.sum() - mean_x1 * mean_x1,
        var_x2: q2.sum() - mean_x2 * mean_x2,
    })
}

/// Per-node `Γ = Σ_j σ²_{X_j} (∂ ln Q/∂X_j)²`, in the guarded form
/// `σ²_j (∂_j Q)²/Q²` set to zero wherever `Q < 1e-12 · max Q`.
///
/// The guard realizes the convention `Q (∂ ln Q)² = (∂Q)²/Q → 0` when both
/// numerator and denominator underflow: the integrands are finite in exact
/// arithmetic and this keeps them finite in floating point.
pub fn fisher_gamma(qf: &QField, vp: &VariancePair) -> Array2<f64> {
    let q_max = qf.q.iter().cloned().fold(0.0_f64, f64::max);
    let guard = GUARD_REL * q_max;
    let mut gamma = Array2::zeros(qf.q.dim());
    Zip::from(&mut gamma)
        .and(&qf.q)
        .and(&qf.grad_x1)
        .and(&qf.grad_x2)
        .for_each(|g_out, &q, &g1, &g2| {
            *g_out = if q < guard {
                0.0
            } else {
                let l1 = g1 / q;
                let l2 = g2 / q;
                vp.var_x1 * l1 * l1 + vp.var_x2 * l2 * l2
            };
        });
    gamma
}

/// Fisher information `I_F = ∫ Q Γ d²β` with `Γ` from [`fisher_gamma`]
/// evaluated at the field's own current marginal variances.
pub fn fisher_information(qf: &QField, g: &PhaseSpaceGrid) -> Result<f64> {
    let vp = marginal_stats(qf, g)?;
    let gamma = fisher_gamma(qf, &vp);
    integrate(g, &(&gamma * &qf.q))
}

/// Fisher phase distribution: `I_Θ(Θ_j) = ∫ Q Γ |β| d|β|` at fixed `Θ_j`.
///
/// Defined with an overall `+` sign (the integrand `QΓ` is a nonnegative
/// density), so that `Σ_j I_Θ(Θ_j) ΔΘ = I_F`.
pub fn fisher_pd(qf: &QField, g: &PhaseSpaceGrid) -> Result<Vec<f64>> {
    let vp = marginal_stats(qf, g)?;
    let q_max = qf.q.iter().cloned().fold(0.0_f64, f64::max);
    let guard = GUARD_REL * q_max;
    radial_profile(qf, g, |q, g1, g2| {
        if q < guard {
            0.0
        } else {
            // Q·Γ in the guarded form (∂Q)²/Q.
            (vp.var_x1 * g1 * g1 + vp.var_x2 * g2 * g2) / q
        }
    })
}

/// Closed-form `t = 0` Fisher phase distribution
///
/// ```text
/// I_Θ(0) = (1/2π) e^{x²−α²} { x√π [1+erf(x)] f₁ + e^{−x²} f₂ },
/// x = α cos Θ,   f_j = α² − x² + j/2,
/// ```
///
/// Note that the *numerically* integrated phase density is exactly twice
/// this expression at every angle: the closed form is normalized to
/// integrate to 1 over Θ rather than to `I_F(0) = 2`. The factor is
/// reported by [`initial_identities`], not silently corrected.
pub fn initial_fisher_pd_closed_form(alpha_mag: f64, theta: f64) -> f64 {
    let a2 = alpha_mag * alpha_mag;
    let x = alpha_mag * theta.cos();
    let x2 = x * x;
    let f1 = a2 - x2 + 0.5;
    let f2 = a2 - x2 + 1.0;
    let pi = std::f64::consts::PI;
    // e^{x²−α²} = e^{−α² sin²Θ} ≤ 1, so the exponentials below cannot overflow.
    (1.0 / (2.0 * pi))
        * ((x2 - a2).exp() * x * pi.sqrt() * (1.0 + libm::erf(x)) * f1 + (-a2).exp() * f2)
}

/// Numerical-vs-analytic report of the `t = 0` identities.
#[derive(Debug, Clone)]
pub struct InitialIdentities {
    pub alpha_mag: f64,
    /// Numerical `I_F(0)`.
    pub i_f0: f64,
    /// Numerical `S_W(0)`.
    pub s_w0: f64,
    /// Residual of the entropy–information relation
    /// `I_F(0) = S_W(0) + 1 − ln π` (must vanish to 1e-6).
    pub entropy_relation_residual: f64,
    /// Max-over-Θ residual of the phase-resolved counterpart
    /// `I_Θ(0) = S_Θ(0) − (ln π)/(2π) e^{−α²}{1 + x√π(1+erf x) e^{x²}}`
    /// (diagnostic only — the intended normalization is unclear).
    pub phase_relation_max_residual: f64,
    /// Max-over-Θ deviation of numerical `I_Θ(0)` from
    /// [`initial_fisher_pd_closed_form`] (diagnostic only).
    pub phase_density_max_deviation: f64,
    /// Mean ratio numerical `I_Θ(0)` / closed form (≈ 2: the closed form
    /// integrates to 1 while the density integrates to `I_F(0) = 2`).
    pub phase_density_mean_ratio: f64,
    /// `I_F(0) − I_Θ(0, Θ=0)`: the claimed constant `1 − ln π`, evaluated at
    /// `Θ = 0` since the intended reading mixes a scalar with a density
    /// (diagnostic only).
    pub fisher_minus_itheta_at_zero: f64,
}

/// Evaluate both `t = 0` Fisher–Wehrl identities numerically for `α`.
pub fn initial_identities(alpha_mag: f64) -> Result<InitialIdentities> {
    let cfg = ModelConfig::with_alpha(alpha_mag);
    let g = build_grid(&cfg)?;
    let s = evolve_closed_form(&cfg, 0.0)?;
    let qf = sample_qfield(&s, &g)?;

    let pi = std::f64::consts::PI;
    let ln_pi = pi.ln();
    let s_w0 = wehrl_entropy(&qf, &g)?;
    let i_f0 = fisher_information(&qf, &g)?;
    let s_theta = wehrl_pd(&qf, &g)?;
    let i_theta = fisher_pd(&qf, &g)?;

    let a2 = alpha_mag * alpha_mag;
    let mut rel_max = 0.0_f64;
    let mut dev_max = 0.0_f64;
    let mut ratio = Kahan::new();
    for (j, &theta) in g.theta_nodes.iter().enumerate() {
        let x = alpha_mag * theta.cos();
        // (ln π)/(2π) e^{−α²} {1 + x√π (1+erf x) e^{x²}}, grouped so the
        // exponent never exceeds x²−α² ≤ 0.
        let brace = (-a2).exp() + x * pi.sqrt() * (1.0 + libm::erf(x)) * (x * x - a2).exp();
        let rhs = s_theta[j] - ln_pi / (2.0 * pi) * brace;
        rel_max = rel_max.max((i_theta[j] - rhs).abs());

        let cf = initial_fisher_pd_closed_form(alpha_mag, theta);
        dev_max = dev_max.max((i_theta[j] - cf).abs());
        ratio.add(i_theta[j] / cf);
    }

    Ok(InitialIdentities {
        alpha_mag,
        i_f0,
        s_w0,
        entropy_relation_residual: (i_f0 - (s_w0 + 1.0 - ln_pi)).abs(),
        phase_relation_max_residual: rel_max,
        phase_density_max_deviation: dev_max,
        phase_density_mean_ratio: ratio.sum() / g.n_theta as f64,
        fisher_minus_itheta_at_zero: i_f0 - i_theta[0],
    })
}

/// Modulus moment `⟨|β|^s⟩ = ∫ |β|^s Q |β| d|β| dΘ`, `s ∈ {1, 2}`.
pub fn beta_moments(qf: &QField, g: &PhaseSpaceGrid, s: u32) -> Result<f64> {
    if !(s == 1 || s == 2) {
        return Err(Error::InvalidArgument(format!("moment order must be 1 or 2, got {s}")));
    }
    if qf.q.dim() != (g.n_r, g.n_theta) {
        return Err(Error::InvalidArgument("field shape does not match grid".into()));
    }
    let mut acc = Kahan::new();
    for i in 0..g.n_r {
        let w = g.r_nodes[i].powi(s as i32) * g.r_nodes[i] * g.r_weights[i] * g.theta_weight;
        for j in 0..g.n_theta {
            acc.add(qf.q[(i, j)] * w);
        }
    }
    Ok(acc.sum())
}

/// Scalar Cramér–Rao product `I_F(t) · Δ_t²` with
/// `Δ_t² = ⟨|β|²⟩ − ⟨|β|⟩²` (moments of the modulus).
pub fn cr_product(qf: &QField, g: &PhaseSpaceGrid) -> Result<f64> {
    let i_f = fisher_information(qf, g)?;
    let m1 = beta_moments(qf, g, 1)?;
    let m2 = beta_moments(qf, g, 2)?;
    Ok(i_f * (m2 - m1 * m1))
}

/// Which marginal the rigorous Cramér–Rao check targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MarginalAxis {
    X1,
    X2,
}

/// Result of [`marginal_cr_check`].
#[derive(Debug, Clone, Copy)]
pub struct MarginalCr {
    /// Variance of the marginal density.
    pub variance: f64,
    /// Translation Fisher information `I_x = ∫ f (∂ ln f/∂x)² dx` of the
    /// marginal, by central finite differences.
    pub fisher: f64,
    /// `variance · fisher` — the Cramér–Rao inequality demands ≥ 1, with
    /// equality exactly for Gaussian marginals.
    pub product: f64,
}

/// Rigorous one-dimensional Cramér–Rao check on a marginal of `Q`.
///
/// The marginal `f(x) = ∫ Q dx_other` is evaluated *exactly from the state*
/// (fresh Husimi evaluations on a uniform window of 512 points, with the
/// transverse integral done by 200-node Gauss–Legendre quadrature) rather
/// than by interpolating the polar samples; a coarse first pass locates the
/// window `mean ± 8σ`. The Fisher integral uses central differences on the
/// uniform window, so the check carries a 1e-3 tolerance.
pub fn marginal_cr_check(
    s: &JointStateBranches,
    g: &PhaseSpaceGrid,
    axis: MarginalAxis,
) -> Result<MarginalCr> {
    const N_COARSE: usize = 129;
    const N_FINE: usize = 512;
    const N_TRANSVERSE: usize = 200;

    let (ty, tw) = gauss_legendre(N_TRANSVERSE);
    let half = g.r_max;
    let y_nodes: Vec<f64> = ty.iter().map(|t| half * t).collect();
    let y_weights: Vec<f64> = tw.iter().map(|w| half * w).collect();

    let eval = |x: f64| -> f64 {
        let mut acc = Kahan::new();
        for (yk, wk) in y_nodes.iter().zip(&y_weights) {
            let beta = match axis {
                MarginalAxis::X1 => Complex64::new(x, *yk),
                MarginalAxis::X2 => Complex64::new(*yk, x),
            };
            acc.add(wk * husimi_q(beta, s));
        }
        acc.sum()
    };

    // Pass 1: coarse scan over the full diameter to locate the mass.
    let coarse_h = 2.0 * g.r_max / (N_COARSE - 1) as f64;
    let mut c_mass = Kahan::new();
    let mut c_m1 = Kahan::new();
    let mut c_m2 = Kahan::new();
    for i in 0..N_COARSE {
        let x = -g.r_max + coarse_h * i as f64;
        let w = if i == 0 || i == N_COARSE - 1 { 0.5 } else { 1.0 } * coarse_h;
        let fx = eval(x) * w;
        c_mass.add(fx);
        c_m1.add(x * fx);
        c_m2.add(x * x * fx);
    }
    let mass = c_mass.sum();
    if !(mass > 0.0) || !mass.is_finite() {
        return Err(Error::NonFinite(format!("marginal mass along {axis:?} is {mass}")));
    }
    let mu = c_m1.sum() / mass;
    let sigma = (c_m2.sum() / mass - mu * mu).max(1e-12).sqrt();
    let lo = (mu - 8.0 * sigma).max(-g.r_max);
    let hi = (mu + 8.0 * sigma).min(g.r_max);

    // Pass 2: uniform fine window for moments and finite-difference Fisher.
    let h = (hi - lo) / (N_FINE - 1) as f64;
    let f: Vec<f64> = (0..N_FINE).map(|i| eval(lo + h * i as f64)).collect();
    let trap_w = |i: usize| if i == 0 || i == N_FINE - 1 { 0.5 * h } else { h };

    let mut n_acc = Kahan::new();
    let mut m1_acc = Kahan::new();
    let mut m2_acc = Kahan::new();
    for (i, &fi) in f.iter().enumerate() {
        let x = lo + h * i as f64;
        let w = trap_w(i);
        n_acc.add(fi * w);
        m1_acc.add(x * fi * w);
        m2_acc.add(x * x * fi * w);
    }
    let norm = n_acc.sum();
    let mean = m1_acc.sum() / norm;
    let variance = m2_acc.sum() / norm - mean * mean;

    let f_max = f.iter().cloned().fold(0.0_f64, f64::max);
    let guard = GUARD_REL * f_max;
    let mut fi_acc = Kahan::new();
    for i in 1..N_FINE - 1 {
        if f[i] >= guard {
            let d = (f[i + 1] - f[i - 1]) / (2.0 * h);
            fi_acc.add(d * d / f[i] * h);
        }
    }
    // Normalize the density to unit mass: I_x is defined for a probability
    // density, and `norm` differs from 1 only by quadrature/window truncation.
    let fisher = fi_acc.sum() / norm;

    let product = variance * fisher;
    if !product.is_finite() {
        return Err(Error::NonFinite(format!("marginal CR product along {axis:?}")));
    }
    Ok(MarginalCr { variance, fisher, product })
}

/// Assemble the full [`MeasureRecord`] for one sampled field.
pub fn measure_record(qf: &QField, g: &PhaseSpaceGrid) -> Result<MeasureRecord> {
    let variances = marginal_stats(qf, g)?;
    let gamma = fisher_gamma(qf, &variances);
    let i_f = integrate(g, &(&gamma * &qf.q))?;
    let s_w = wehrl_entropy(qf, g)?;
    let s_theta = wehrl_pd(qf, g)?;
    let i_theta = fisher_pd(qf, g)?;
    let m1 = beta_moments(qf, g, 1)?;
    let m2 = beta_moments(qf, g, 2)?;
    let delta_sq = m2 - m1 * m1;
    let rec = MeasureRecord {
        t_scaled: qf.t_scaled,
        s_w,
        i_f,
        s_theta,
        i_theta,
        variances,
        delta_sq,
        cr_product: i_f * delta_sq,
    };
    Ok(rec)
}

/// Re-check the physical invariants of a computed record.
///
/// Used by the sweep drivers' sampling audit and the CLI validation suite:
/// Wehrl–Lieb bound, nonnegative Fisher information, positive variances,
/// angular-integral consistency of both phase densities (1e-8), and
/// finiteness of every field.
pub fn audit_record(rec: &MeasureRecord, g: &PhaseSpaceGrid) -> Result<()> {
    let ln_pi = std::f64::consts::PI.ln();
    let scalars = [
        ("s_w", rec.s_w),
        ("i_f", rec.i_f),
        ("delta_sq", rec.delta_sq),
        ("cr_product", rec.cr_product),
        ("var_x1", rec.variances.var_x1),
        ("var_x2", rec.variances.var_x2),
        ("mean_x1", rec.variances.mean_x1),
        ("mean_x2", rec.variances.mean_x2),
    ];
    for (name, v) in scalars {
        if !v.is_finite() {
            return Err(Error::NonFinite(format!("{name} at T = {}", rec.t_scaled)));
        }
    }
    if rec.s_theta.iter().chain(rec.i_theta.iter()).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite(format!("phase density at T = {}", rec.t_scaled)));
    }
    if rec.s_w < 1.0 + ln_pi - 1e-6 {
        return Err(Error::Invariant(format!(
            "S_W = {} below the Wehrl–Lieb bound 1 + ln π at T = {}",
            rec.s_w, rec.t_scaled
        )));
    }
    if rec.i_f < 0.0 {
        return Err(Error::Invariant(format!("I_F = {} < 0 at T = {}", rec.i_f, rec.t_scaled)));
    }
    if rec.variances.var_x1 <= 0.0 || rec.variances.var_x2 <= 0.0 {
        return Err(Error::Invariant(format!("non-positive variance at T = {}", rec.t_scaled)));
    }
    let s_int: f64 = {
        let mut a = Kahan::new();
        rec.s_theta.iter().for_each(|&v| a.add(v * g.theta_weight));
        a.sum()
    };
    if (s_int - rec.s_w).abs() > 1e-8 {
        return Err(Error::Invariant(format!(
            "∫S_Θ dΘ = {s_int} differs from S_W = {} at T = {}",
            rec.s_w, rec.t_scaled
        )));
    }
    let i_int: f64 = {
        let mut a = Kahan::new();
        rec.i_theta.iter().for_each(|&v| a.add(v * g.theta_weight));
        a.sum()
    };
    if (i_int - rec.i_f).abs() > 1e-8 {
        return Err(Error::Invariant(format!(
            "∫I_Θ dΘ = {i_int} differs from I_F = {} at T = {}",
            rec.i_f, rec.t_scaled
        )));
    }
    Ok(())
}
