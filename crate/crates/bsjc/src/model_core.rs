//! Initial-state preparation and exact time evolution for the
//! intensity-dependent (Buck–Sukumar) Jaynes–Cummings model.
//!
//! A two-level atom couples resonantly to a single cavity mode with the
//! intensity-dependent interaction
//!
//! ```text
//! H_I = λ (ψ† |lower⟩⟨upper| + |upper⟩⟨lower| ψ),   ψ = â √(â†â),
//! ```
//!
//! so that `ψ|n⟩ = n|n−1⟩` and `ψ†|n⟩ = (n+1)|n+1⟩`. Because `ψψ†` and `ψ†ψ`
//! act diagonally with *integer* eigenvalues `(n+1)²` and `n²`, every Rabi
//! frequency is an integer multiple of the coupling λ and the dynamics are
//! exactly 2π-periodic in the scaled time `T = λt` — the collapse–revival
//! structure of the ordinary Jaynes–Cummings model is replaced by perfect
//! periodic revivals.
//!
//! Starting from the atom in its upper state and the field in a coherent
//! state `|α⟩` (amplitudes `C_n = αⁿ √(e^{−|α|²}/n!)`), the propagator acts
//! branch-diagonally in the number basis:
//!
//! ```text
//! upper_n(T) = C_n cos((n+1) T)
//! lower_m(T) = i C_{m−1} sin(m T)      (m ≥ 1, lower_0 = 0)
//! ```
//!
//! The phase convention (`+i` on the lower branch) is fixed once here; all
//! phase-space quantifiers depend only on the moduli, so only the
//! closed-form/brute-force cross-check is sensitive to it and
//! [`evolve_brute_force`] adopts the matching exponent sign.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::util::Kahan;

/// Hard floor for the Fock-space truncation chosen by [`choose_truncation`].
pub const N_MAX_FLOOR: usize = 16;

/// Fock-space truncation policy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TruncationRule {
    /// Choose the truncation from the Poisson tail of `|α|²` via
    /// [`choose_truncation`].
    Auto,
    /// Use exactly this many excitations (highest retained number state).
    Explicit(usize),
}

/// Physical parameters and numerical controls of one simulation.
///
/// The dynamics are simulated in the interaction picture at resonance, so the
/// bare frequencies `omega_f` and `omega_a` are carried as metadata but do not
/// enter the evolution; every result depends on time only through `T = λt`.
#[derive(Debug, Clone)]
pub struct ModelConfig {
    /// Coherent amplitude modulus `|α|` (square root of the mean photon number).
    pub alpha_mag: f64,
    /// Coherent amplitude phase `arg(α)` in radians.
    pub alpha_phase: f64,
    /// Atom–field coupling λ > 0; sets the time unit via `T = λt`.
    pub lambda: f64,
    /// Field frequency (metadata; unused at resonance).
    pub omega_f: f64,
    /// Atomic transition frequency (metadata; unused at resonance).
    pub omega_a: f64,
    /// Fock-space truncation.
    pub n_max: TruncationRule,
    /// Poisson tail mass the truncation must leave uncovered at most.
    pub tail_tol: f64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            alpha_mag: 1.0,
            alpha_phase: 0.0,
            lambda: 1.0,
            omega_f: 1.0,
            omega_a: 1.0,
            n_max: TruncationRule::Auto,
            tail_tol: 1e-12,
        }
    }
}

impl ModelConfig {
    /// Convenience constructor: real coherent amplitude, defaults elsewhere.
    pub fn with_alpha(alpha_mag: f64) -> Self {
        ModelConfig { alpha_mag, ..Self::default() }
    }

    /// Check the static parameter invariants.
    pub fn validate(&self) -> Result<()> {
        if !self.alpha_mag.is_finite() || self.alpha_mag < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "alpha_mag must be finite and ≥ 0, got {}",
                self.alpha_mag
            )));
        }
        if !self.alpha_phase.is_finite() {
            return Err(Error::InvalidParameter("alpha_phase must be finite".into()));
        }
        if !(self.lambda > 0.0) || !self.lambda.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "lambda must be finite and > 0, got {}",
                self.lambda
            )));
        }
        if !(self.tail_tol > 0.0 && self.tail_tol < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "tail_tol must lie in (0, 1), got {}",
                self.tail_tol
            )));
        }
        if let TruncationRule::Explicit(n) = self.n_max {
            if n < 1 {
                return Err(Error::InvalidParameter("explicit n_max must be ≥ 1".into()));
            }
        }
        Ok(())
    }

    /// The truncation actually used: explicit value, or the automatic choice.
    pub fn effective_n_max(&self) -> Result<usize> {
        match self.n_max {
            TruncationRule::Explicit(n) => Ok(n),
            TruncationRule::Auto => choose_truncation(self.alpha_mag, self.tail_tol),
        }
    }
}

/// Complex amplitudes over the truncated number basis `{|0⟩, …, |N_max⟩}`.
///
/// Branches of a normalized joint state need not individually be normalized;
/// the only invariant is `‖·‖² ≤ 1 + 1e-12`.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    /// `amps[n]` multiplies `|n⟩`.
    pub amps: Vec<Complex64>,
}

impl FockVector {
    /// Zero vector over `n ∈ [0, n_max]`.
    pub fn zeros(n_max: usize) -> Self {
        FockVector { amps: vec![Complex64::new(0.0, 0.0); n_max + 1] }
    }

    /// Highest retained photon number.
    pub fn n_max(&self) -> usize {
        self.amps.len() - 1
    }

    /// Squared norm `Σ_n |amps[n]|²`, summed in ascending `n` with
    /// compensation for reproducibility.
    pub fn norm_sqr(&self) -> f64 {
        let mut acc = Kahan::new();
        for a in &self.amps {
            acc.add(a.norm_sqr());
        }
        acc.sum()
    }
}

/// The evolved pure atom–field state, stored as two field branches.
///
/// `upper` holds the field amplitudes with the atom in its upper state,
/// `lower` those with the atom in its lower state. Purity and normalization
/// demand `‖upper‖² + ‖lower‖² = 1` (within 1e-10); at `T = 0` the lower
/// branch vanishes identically.
#[derive(Debug, Clone)]
pub struct JointStateBranches {
    pub upper: FockVector,
    pub lower: FockVector,
    /// Scaled time `T = λt` this state corresponds to.
    pub t_scaled: f64,
}

impl JointStateBranches {
    /// Total squared norm `‖upper‖² + ‖lower‖²`.
    pub fn norm_sqr(&self) -> f64 {
        self.upper.norm_sqr() + self.lower.norm_sqr()
    }
}

/// Coherent-state amplitudes `C_n = αⁿ √(e^{−|α|²}/n!)` for
/// `α = alpha_mag · e^{i·alpha_phase}`, truncated at `n_max`.
///
/// Magnitudes are accumulated in log space (`n ln|α| − |α|²/2 − ½ ln n!`,
/// with `ln n!` as a running sum of `ln k`) so that no intermediate factorial
/// or power overflows even for `n ≳ 170`.
pub fn coherent_amplitudes(alpha_mag: f64, alpha_phase: f64, n_max: usize) -> Result<FockVector> {
    if !alpha_mag.is_finite() || alpha_mag < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "alpha_mag must be finite and ≥ 0, got {alpha_mag}"
        )));
    }
    let mut amps = vec![Complex64::new(0.0, 0.0); n_max + 1];
    if alpha_mag == 0.0 {
        amps[0] = Complex64::new(1.0, 0.0);
        return Ok(FockVector { amps });
    }
    let ln_alpha = alpha_mag.ln();
    let half_sq = 0.5 * alpha_mag * alpha_mag;
    let mut ln_fact = 0.0; // ln n!
    for (n, amp) in amps.iter_mut().enumerate() {
        if n > 0 {
            ln_fact += (n as f64).ln();
        }
        let ln_mag = (n as f64) * ln_alpha - half_sq - 0.5 * ln_fact;
        let phase = (n as f64) * alpha_phase;
        *amp = Complex64::from_polar(ln_mag.exp(), phase);
    }
    Ok(FockVector { amps })
}

/// Smallest truncation `N` whose Poisson(`|α|²`) tail mass beyond `N` is
/// below `tail_tol`, plus one extra level to absorb the one-photon shift of
/// the lower branch (`|n⟩ → |n+1⟩`), and never below [`N_MAX_FLOOR`].
pub fn choose_truncation(alpha_mag: f64, tail_tol: f64) -> Result<usize> {
    if !(tail_tol > 0.0 && tail_tol < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "tail_tol must lie in (0, 1), got {tail_tol}"
        )));
    }
    if !alpha_mag.is_finite() || alpha_mag < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "alpha_mag must be finite and ≥ 0, got {alpha_mag}"
        )));
    }
    let lambda = alpha_mag * alpha_mag; // Poisson mean
    let mut n = 0usize;
    let mut pmf = (-lambda).exp(); // P(0)
    let mut mass = Kahan::new();
    mass.add(pmf);
    // Tail mass beyond n is 1 − Σ_{k≤n} P(k); the compensated sum keeps the
    // subtraction accurate to ~1 ulp, far below any practical tail_tol.
    while 1.0 - mass.sum() >= tail_tol {
        n += 1;
        pmf *= lambda / (n as f64);
        mass.add(pmf);
        if n > 100_000 {
            return Err(Error::Truncation(format!(
                "Poisson tail for |α|² = {lambda} did not drop below {tail_tol} by n = {n}"
            )));
        }
    }
    Ok((n + 1).max(N_MAX_FLOOR))
}

/// The initial upper branch (coherent amplitudes) for `cfg`, with the tail
/// coverage of an explicit truncation verified against `cfg.tail_tol`.
fn initial_upper_branch(cfg: &ModelConfig) -> Result<FockVector> {
    cfg.validate()?;
    let n_max = cfg.effective_n_max()?;
    let c = coherent_amplitudes(cfg.alpha_mag, cfg.alpha_phase, n_max)?;
    let tail = 1.0 - c.norm_sqr();
    if tail > cfg.tail_tol {
        return Err(Error::Truncation(format!(
            "n_max = {n_max} leaves tail mass {tail:.3e} > tail_tol = {:.3e} for |α| = {}",
            cfg.tail_tol, cfg.alpha_mag
        )));
    }
    Ok(c)
}

/// Exact closed-form evolution at scaled time `T = λ t_scaled`-equivalent
/// (the argument *is* the scaled time).
///
/// `upper_n(T) = C_n cos((n+1)T)`, `lower_m(T) = i C_{m−1} sin(mT)`. The
/// integer frequencies make the state exactly 2π-periodic in `T`, and at
/// `T = kπ` the atom and field disentangle (`lower ≡ 0`).
pub fn evolve_closed_form(cfg: &ModelConfig, t_scaled: f64) -> Result<JointStateBranches> {
    if !t_scaled.is_finite() {
        return Err(Error::InvalidParameter("t_scaled must be finite".into()));
    }
    let c = initial_upper_branch(cfg)?;
    let n_levels = c.amps.len();
    let mut upper = FockVector::zeros(n_levels - 1);
    let mut lower = FockVector::zeros(n_levels - 1);
    for n in 0..n_levels {
        let omega = (n + 1) as f64;
        upper.amps[n] = c.amps[n] * (omega * t_scaled).cos();
        if n + 1 < n_levels {
            lower.amps[n + 1] = Complex64::new(0.0, 1.0) * c.amps[n] * (omega * t_scaled).sin();
        }
        // The cos/sin pair for the topmost level n = n_levels−1 would feed
        // |n_levels⟩, which lies outside the truncation; choose_truncation's
        // +1 padding makes its weight ≤ tail_tol.
    }
    Ok(JointStateBranches { upper, lower, t_scaled })
}

/// Brute-force oracle: dense matrix exponential of the interaction
/// Hamiltonian on the truncated `2(N_max+1)`-dimensional joint space.
///
/// `H_I/λ` is real symmetric in the product basis
/// `{|upper, n⟩} ∪ {|lower, n⟩}` with `⟨lower, n+1| H_I/λ |upper, n⟩ = n+1`,
/// so `U(T) = V e^{iΛT} Vᵀ` from one symmetric eigendecomposition. The
/// exponent sign matches the `+i sin` phase convention of
/// [`evolve_closed_form`]. Intended only for validation; cost is `O(N³)`.
pub fn evolve_brute_force(cfg: &ModelConfig, t_scaled: f64) -> Result<JointStateBranches> {
    if !t_scaled.is_finite() {
        return Err(Error::InvalidParameter("t_scaled must be finite".into()));
    }
    let c = initial_upper_branch(cfg)?;
    let n_levels = c.amps.len();
    let dim = 2 * n_levels;

    // Basis layout: indices [0, n_levels) are |upper, n⟩, the rest |lower, n⟩.
    let mut h = DMatrix::<f64>::zeros(dim, dim);
    for n in 0..n_levels - 1 {
        let g = (n + 1) as f64; // ψ†|n⟩ = (n+1)|n+1⟩
        h[(n_levels + n + 1, n)] = g;
        h[(n, n_levels + n + 1)] = g;
    }

    let eig = SymmetricEigen::new(h);
    // x = Vᵀ x₀ with x₀ = (C_0, …, C_N, 0, …, 0).
    let mut x = vec![Complex64::new(0.0, 0.0); dim];
    for (k, xk) in x.iter_mut().enumerate() {
        let mut acc = Complex64::new(0.0, 0.0);
        for n in 0..n_levels {
            acc += eig.eigenvectors[(n, k)] * c.amps[n];
        }
        *xk = acc;
    }
    // y = V e^{iΛT} x.
    for (k, xk) in x.iter_mut().enumerate() {
        let phase = eig.eigenvalues[k] * t_scaled;
        *xk *= Complex64::from_polar(1.0, phase);
    }
    let mut upper = FockVector::zeros(n_levels - 1);
    let mut lower = FockVector::zeros(n_levels - 1);
    for row in 0..dim {
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, xk) in x.iter().enumerate() {
            acc += eig.eigenvectors[(row, k)] * xk;
        }
        if row < n_levels {
            upper.amps[row] = acc;
        } else {
            lower.amps[row - n_levels] = acc;
        }
    }
    Ok(JointStateBranches { upper, lower, t_scaled })
}

/// Fidelity `|⟨a|b⟩|²` between two joint states on the same truncation.
pub fn state_fidelity(a: &JointStateBranches, b: &JointStateBranches) -> Result<f64> {
    if a.upper.amps.len() != b.upper.amps.len() || a.lower.amps.len() != b.lower.amps.len() {
        return Err(Error::InvalidArgument(format!(
            "state truncations differ: {} vs {}",
            a.upper.amps.len() - 1,
            b.upper.amps.len() - 1
        )));
    }
    let mut re = Kahan::new();
    let mut im = Kahan::new();
    for (x, y) in a.upper.amps.iter().zip(&b.upper.amps) {
        let p = x.conj() * y;
        re.add(p.re);
        im.add(p.im);
    }
    for (x, y) in a.lower.amps.iter().zip(&b.lower.amps) {
        let p = x.conj() * y;
        re.add(p.re);
        im.add(p.im);
    }
    Ok(Complex64::new(re.sum(), im.sum()).norm_sqr())
}
