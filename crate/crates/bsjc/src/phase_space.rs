//! Husimi Q-function evaluation and the shared 2-D quadrature machinery.
//!
//! # Conventions
//!
//! Phase-space points are `β = X₁ + i·X₂` (so `d²β = dX₁ dX₂`) and the
//! coherent-state overlap is `⟨β|n⟩ = e^{−|β|²/2} (β*)ⁿ/√(n!)`. Under this
//! convention the `t = 0` Husimi function of a coherent state `|α⟩` is the
//! Gaussian `Q(β) = e^{−|β−α|²}/π` with marginal variances exactly `1/2` —
//! which is precisely what makes the initial Fisher information equal 2.
//!
//! For the pure joint state `|Ψ⟩ = |upper⟩|u⟩ + |lower⟩|l⟩` the field Husimi
//! function is the atom-traced diagonal element
//!
//! ```text
//! Q(β) = (|⟨β|u⟩|² + |⟨β|l⟩|²) / π ,
//! ```
//!
//! nonnegative and bounded by `1/π`.
//!
//! # Quadrature
//!
//! All integrals use the polar measure `d²β = |β| d|β| dΘ` on a product grid:
//! Gauss–Legendre nodes in the radius (mapped to `[0, R_max]`) × uniform
//! angles with the trapezoid weight `2π/N_Θ`, which is spectrally accurate for
//! periodic integrands. `R_max = √(N_max+1) + 4` covers the highest populated
//! Fock ring (the Husimi mass of `|n⟩` peaks at `|β| = √n` and decays like a
//! Gaussian beyond it).

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model_core::{FockVector, JointStateBranches, ModelConfig};
use crate::util::Kahan;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Smallest radial resolution [`build_grid_sized`] accepts.
pub const MIN_N_R: usize = 16;
/// Smallest angular resolution [`build_grid_sized`] accepts.
pub const MIN_N_THETA: usize = 32;
/// Default radial resolution.
pub const DEFAULT_N_R: usize = 200;
/// Default angular resolution.
pub const DEFAULT_N_THETA: usize = 256;

/// Polar quadrature grid for the measure `|β| d|β| dΘ`.
#[derive(Debug, Clone)]
pub struct PhaseSpaceGrid {
    /// Radial nodes (Gauss–Legendre mapped to `(0, r_max)`), ascending.
    pub r_nodes: Vec<f64>,
    /// Matching radial weights (include the interval mapping, not the `|β|`
    /// Jacobian — that is applied by [`integrate`]).
    pub r_weights: Vec<f64>,
    /// Uniform angles `Θ_j = 2πj/n_theta` on `[0, 2π)`.
    pub theta_nodes: Vec<f64>,
    /// Uniform angular weight `2π/n_theta`.
    pub theta_weight: f64,
    /// Radial cutoff.
    pub r_max: f64,
    pub n_r: usize,
    pub n_theta: usize,
}

/// Gauss–Legendre nodes and weights on `[−1, 1]`, ascending.
///
/// Newton iteration on the Legendre recurrence; accurate to ~1e-15 for the
/// orders used here (well below the quadrature truncation error).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 2, "Gauss-Legendre order must be at least 2");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi's initial guess for the i-th root of P_n.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // P_n(x) and P_n'(x) via the three-term recurrence.
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = (n as f64) * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Build the default grid for `cfg`: `R_max = √(N_max+1) + 4`,
/// 200 radial × 256 angular nodes.
pub fn build_grid(cfg: &ModelConfig) -> Result<PhaseSpaceGrid> {
    build_grid_sized(cfg, DEFAULT_N_R, DEFAULT_N_THETA)
}

/// Build a grid with explicit resolutions (both floored: `n_r ≥ 16`,
/// `n_theta ≥ 32`).
pub fn build_grid_sized(cfg: &ModelConfig, n_r: usize, n_theta: usize) -> Result<PhaseSpaceGrid> {
    cfg.validate()?;
    if n_r < MIN_N_R {
        return Err(Error::InvalidParameter(format!(
            "n_r = {n_r} is below the quadrature floor {MIN_N_R}"
        )));
    }
    if n_theta < MIN_N_THETA {
        return Err(Error::InvalidParameter(format!(
            "n_theta = {n_theta} is below the quadrature floor {MIN_N_THETA}"
        )));
    }
    let n_max = cfg.effective_n_max()?;
    let r_max = ((n_max + 1) as f64).sqrt() + 4.0;
    let (x, w) = gauss_legendre(n_r);
    let half = 0.5 * r_max;
    let r_nodes: Vec<f64> = x.iter().map(|xi| half * (xi + 1.0)).collect();
    let r_weights: Vec<f64> = w.iter().map(|wi| half * wi).collect();
    let theta_weight = 2.0 * std::f64::consts::PI / n_theta as f64;
    let theta_nodes: Vec<f64> = (0..n_theta).map(|j| j as f64 * theta_weight).collect();
    Ok(PhaseSpaceGrid { r_nodes, r_weights, theta_nodes, theta_weight, r_max, n_r, n_theta })
}

/// Sampled Husimi function on a [`PhaseSpaceGrid`], with Cartesian gradients.
#[derive(Debug, Clone)]
pub struct QField {
    /// `q[(i, j)] = Q(r_i, Θ_j) ≥ 0`.
    pub q: Array2<f64>,
    /// `∂Q/∂X₁` at the same nodes.
    pub grad_x1: Array2<f64>,
    /// `∂Q/∂X₂` at the same nodes.
    pub grad_x2: Array2<f64>,
    /// Quadrature of `q` over the grid (should be 1).
    pub norm: f64,
    /// Scaled time of the underlying state.
    pub t_scaled: f64,
}

impl QField {
    /// Whether the normalization meets the nominal 1e-8 tolerance.
    ///
    /// [`sample_qfield`] hard-fails beyond 1e-6; fields in between are valid
    /// but flagged through this accessor.
    pub fn norm_within_tol(&self) -> bool {
        (self.norm - 1.0).abs() <= 1e-8
    }
}

/// Overlap `⟨β|v⟩ = e^{−|β|²/2} Σ_n v[n] (β*)ⁿ/√(n!)`.
///
/// The partial terms are generated by the recurrence
/// `u₀ = e^{−|β|²/2}`, `u_{k+1} = u_k · β*/√(k+1)`, whose magnitudes are the
/// square roots of Poisson weights and therefore never exceed 1: the Gaussian
/// prefactor is folded in from the start, which is the multiplicative
/// equivalent of log-space accumulation and avoids overflow of `|β|ⁿ` at any
/// order.
pub fn coherent_overlap(beta: Complex64, v: &FockVector) -> Complex64 {
    let bc = beta.conj();
    let mut u = Complex64::new((-0.5 * beta.norm_sqr()).exp(), 0.0);
    let mut acc = Complex64::new(0.0, 0.0);
    for (k, amp) in v.amps.iter().enumerate() {
        acc += amp * u;
        u *= bc / ((k + 1) as f64).sqrt();
    }
    acc
}

/// Branch amplitude `A = ⟨β|v⟩` together with the derivative sum
/// `D = e^{−|β|²/2} S'(β*) = Σ_{n≥1} v[n] √n · u_{n−1}` used by the analytic
/// gradient (`S` is the polynomial part of the overlap).
fn amp_and_deriv(beta: Complex64, v: &FockVector) -> (Complex64, Complex64) {
    let bc = beta.conj();
    let mut u = Complex64::new((-0.5 * beta.norm_sqr()).exp(), 0.0);
    let mut a = Complex64::new(0.0, 0.0);
    let mut d = Complex64::new(0.0, 0.0);
    for (k, amp) in v.amps.iter().enumerate() {
        a += amp * u;
        if k + 1 < v.amps.len() {
            // √(k+1)·u_k is exactly the derivative term of order k+1.
            d += v.amps[k + 1] * ((k + 1) as f64).sqrt() * u;
        }
        u *= bc / ((k + 1) as f64).sqrt();
    }
    (a, d)
}

/// Husimi function `Q(β) = (|⟨β|u⟩|² + |⟨β|l⟩|²)/π` of the joint state.
pub fn husimi_q(beta: Complex64, s: &JointStateBranches) -> f64 {
    let au = coherent_overlap(beta, &s.upper);
    let al = coherent_overlap(beta, &s.lower);
    (au.norm_sqr() + al.norm_sqr()) / std::f64::consts::PI
}

/// Analytic Cartesian gradient `(∂Q/∂X₁, ∂Q/∂X₂)` at `β`.
///
/// Each branch amplitude factors as `A(β) = e^{−|β|²/2} S(β*)`; term-wise
/// differentiation gives `∂A/∂X₁ = −X₁A + D` and `∂A/∂X₂ = −X₂A − iD` with
/// `D = e^{−|β|²/2} S'(β*)`, and then
/// `∂Q/∂X_j = (2/π) Σ_branches Re(Ā · ∂A/∂X_j)`.
pub fn husimi_gradient(beta: Complex64, s: &JointStateBranches) -> (f64, f64) {
    let x1 = beta.re;
    let x2 = beta.im;
    let mut g1 = 0.0;
    let mut g2 = 0.0;
    for branch in [&s.upper, &s.lower] {
        let (a, d) = amp_and_deriv(beta, branch);
        let da1 = -x1 * a + d;
        let da2 = -x2 * a - Complex64::new(0.0, 1.0) * d;
        g1 += (a.conj() * da1).re;
        g2 += (a.conj() * da2).re;
    }
    (2.0 / std::f64::consts::PI * g1, 2.0 / std::f64::consts::PI * g2)
}

/// Per-(state, radius) precomputation for one grid row.
///
/// At fixed `r` the overlap terms factor as `u_n = m_n(r) e^{−inΘ}` with the
/// radial magnitudes `m_n = e^{−r²/2} rⁿ/√(n!)` (square roots of Poisson
/// weights, ≤ 1). Folding the branch amplitudes into `w[n] = v[n]·m_n` and
/// `wd[n] = v[n]·√n·m_{n−1}` leaves, per angle, a single phase-rotation chain
/// `z_{n+1} = z_n e^{−iΘ}` shared by all four accumulated sums.
struct RowKernel {
    wu: Vec<Complex64>,
    wl: Vec<Complex64>,
    wdu: Vec<Complex64>,
    wdl: Vec<Complex64>,
}

impl RowKernel {
    fn new(s: &JointStateBranches, r: f64) -> Self {
        let n = s.upper.amps.len();
        let mut m = vec![0.0; n];
        m[0] = (-0.5 * r * r).exp();
        for k in 1..n {
            m[k] = m[k - 1] * r / (k as f64).sqrt();
        }
        let mut wu = vec![Complex64::new(0.0, 0.0); n];
        let mut wl = vec![Complex64::new(0.0, 0.0); n];
        let mut wdu = vec![Complex64::new(0.0, 0.0); n];
        let mut wdl = vec![Complex64::new(0.0, 0.0); n];
        for k in 0..n {
            wu[k] = s.upper.amps[k] * m[k];
            wl[k] = s.lower.amps[k] * m[k];
            if k > 0 {
                let f = (k as f64).sqrt() * m[k - 1];
                wdu[k] = s.upper.amps[k] * f;
                wdl[k] = s.lower.amps[k] * f;
            }
        }
        RowKernel { wu, wl, wdu, wdl }
    }

    /// Evaluate `(Q, ∂Q/∂X₁, ∂Q/∂X₂)` at `(r, Θ)`.
    #[inline]
    fn eval(&self, r: f64, theta: f64) -> (f64, f64, f64) {
        let rot = Complex64::from_polar(1.0, -theta);
        let mut z = Complex64::new(1.0, 0.0);
        let mut au = Complex64::new(0.0, 0.0);
        let mut al = Complex64::new(0.0, 0.0);
        let mut du = Complex64::new(0.0, 0.0);
        let mut dl = Complex64::new(0.0, 0.0);
        for k in 0..self.wu.len() {
            au += self.wu[k] * z;
            al += self.wl[k] * z;
            // wd[k] carries u_{k−1}'s magnitude but pairs with phase z_{k−1};
            // multiply the phase back out by conjugating one rotation step.
            du += self.wdu[k] * z;
            dl += self.wdl[k] * z;
            z *= rot;
        }
        // du/dl above accumulated wd[k]·z_k = v[k]√k·m_{k−1}·e^{−ikΘ}; the
        // derivative sum needs e^{−i(k−1)Θ}, i.e. one factor e^{+iΘ}.
        let unrot = Complex64::from_polar(1.0, theta);
        let du = du * unrot;
        let dl = dl * unrot;

        let x1 = r * theta.cos();
        let x2 = r * theta.sin();
        let q = (au.norm_sqr() + al.norm_sqr()) / std::f64::consts::PI;
        let mut g1 = 0.0;
        let mut g2 = 0.0;
        for (a, d) in [(au, du), (al, dl)] {
            let da1 = -x1 * a + d;
            let da2 = -x2 * a - Complex64::new(0.0, 1.0) * d;
            g1 += (a.conj() * da1).re;
            g2 += (a.conj() * da2).re;
        }
        (q, 2.0 / std::f64::consts::PI * g1, 2.0 / std::f64::consts::PI * g2)
    }
}

fn fill_row(
    s: &JointStateBranches,
    g: &PhaseSpaceGrid,
    i: usize,
    q_row: &mut [f64],
    g1_row: &mut [f64],
    g2_row: &mut [f64],
) {
    let kernel = RowKernel::new(s, g.r_nodes[i]);
    for j in 0..g.n_theta {
        let (q, g1, g2) = kernel.eval(g.r_nodes[i], g.theta_nodes[j]);
        q_row[j] = q;
        g1_row[j] = g1;
        g2_row[j] = g2;
    }
}

fn assemble_qfield(
    s: &JointStateBranches,
    g: &PhaseSpaceGrid,
    qv: Vec<f64>,
    g1v: Vec<f64>,
    g2v: Vec<f64>,
) -> Result<QField> {
    let shape = (g.n_r, g.n_theta);
    let q = Array2::from_shape_vec(shape, qv).expect("row-major buffer matches grid shape");
    let grad_x1 = Array2::from_shape_vec(shape, g1v).expect("row-major buffer matches grid shape");
    let grad_x2 = Array2::from_shape_vec(shape, g2v).expect("row-major buffer matches grid shape");
    let norm = integrate(g, &q)?;
    if (norm - 1.0).abs() > 1e-6 {
        return Err(Error::GridCoverage {
            deviation: (norm - 1.0).abs(),
            hint: format!(
                "state at T = {} is not covered by r_max = {:.3}, n_r = {}; \
                 enlarge the truncation (raising r_max) or increase n_r",
                s.t_scaled, g.r_max, g.n_r
            ),
        });
    }
    Ok(QField { q, grad_x1, grad_x2, norm, t_scaled: s.t_scaled })
}

/// Sample `Q` and its Cartesian gradients on the grid (sequential loop).
pub fn sample_qfield_seq(s: &JointStateBranches, g: &PhaseSpaceGrid) -> Result<QField> {
    let n = g.n_r * g.n_theta;
    let mut qv = vec![0.0; n];
    let mut g1v = vec![0.0; n];
    let mut g2v = vec![0.0; n];
    for i in 0..g.n_r {
        let lo = i * g.n_theta;
        let hi = lo + g.n_theta;
        fill_row(s, g, i, &mut qv[lo..hi], &mut g1v[lo..hi], &mut g2v[lo..hi]);
    }
    assemble_qfield(s, g, qv, g1v, g2v)
}

/// Sample `Q` and its gradients in parallel over radial rows.
///
/// Each row is computed independently into its own slice and the final
/// normalization reduction is sequential, so the result is bit-identical to
/// [`sample_qfield_seq`] for any thread count.
#[cfg(feature = "parallel")]
pub fn sample_qfield_par(s: &JointStateBranches, g: &PhaseSpaceGrid) -> Result<QField> {
    let n = g.n_r * g.n_theta;
    let mut qv = vec![0.0; n];
    let mut g1v = vec![0.0; n];
    let mut g2v = vec![0.0; n];
    qv.par_chunks_mut(g.n_theta)
        .zip(g1v.par_chunks_mut(g.n_theta))
        .zip(g2v.par_chunks_mut(g.n_theta))
        .enumerate()
        .for_each(|(i, ((q_row, g1_row), g2_row))| fill_row(s, g, i, q_row, g1_row, g2_row));
    assemble_qfield(s, g, qv, g1v, g2v)
}

/// Sample `Q` and its gradients on the grid.
///
/// Dispatches to the parallel implementation when the `parallel` feature is
/// enabled (the default) and to the sequential one otherwise; both produce
/// bit-identical fields.
pub fn sample_qfield(s: &JointStateBranches, g: &PhaseSpaceGrid) -> Result<QField> {
    #[cfg(feature = "parallel")]
    {
        sample_qfield_par(s, g)
    }
    #[cfg(not(feature = "parallel"))]
    {
        sample_qfield_seq(s, g)
    }
}

/// Quadrature `∫ f d²β = Σ_{i,j} f(r_i, Θ_j) · r_i · w_i · ΔΘ`.
///
/// Fixed ascending `(i, j)` order with compensated summation: the value is
/// independent of thread count and reproducible across runs.
pub fn integrate(g: &PhaseSpaceGrid, f: &Array2<f64>) -> Result<f64> {
    if f.dim() != (g.n_r, g.n_theta) {
        return Err(Error::InvalidArgument(format!(
            "field shape {:?} does not match grid ({}, {})",
            f.dim(),
            g.n_r,
            g.n_theta
        )));
    }
    let mut acc = Kahan::new();
    for i in 0..g.n_r {
        let rw = g.r_nodes[i] * g.r_weights[i] * g.theta_weight;
        for j in 0..g.n_theta {
            acc.add(f[(i, j)] * rw);
        }
    }
    Ok(acc.sum())
}
