//! # bsjc — phase-space information dynamics of the intensity-dependent Jaynes–Cummings model
//!
//! Numerical core for the Buck–Sukumar model [Phys. Lett. A **81**, 132
//! (1981)]: a two-level atom coupled to a single cavity mode with an
//! intensity-dependent interaction `ψ = â √(â†â)`. Its Rabi frequencies are
//! integers, so every observable is exactly periodic in the scaled time
//! `T = λt` with period `2π`, which makes the model an ideal stress bench for
//! phase-space information measures.
//!
//! The crate propagates an initial `|coherent⟩ ⊗ |excited⟩` product state in
//! closed form, samples the Husimi quasiprobability `Q(β) = ⟨β|ρ_f|β⟩/π` of
//! the reduced field state on a Gauss–Legendre polar grid (convention
//! `β = X₁ + iX₂`), and evaluates:
//!
//! * Wehrl entropy `S_W = −∫ Q ln Q d²β` and its phase density `S_Θ`,
//! * a Husimi-based Fisher information `I_F = ∫ Q Γ d²β` with
//!   `Γ = Σ_j σ²_{X_j} (∂ ln Q/∂X_j)²`, its phase density `I_Θ`, and the
//!   associated Cramér–Rao product `I_F · Δ²` built from the moments of
//!   `|β|`,
//! * rigorous per-quadrature Cramér–Rao products from the exact marginal
//!   distributions, as an internal cross-check.
//!
//! Analytic `t = 0` identities (coherent-state values `I_F = 2`,
//! `S_W = 1 + ln π`, the closed-form initial Fisher phase density, and the
//! entropy–information relation `I_F(0) = S_W(0) + 1 − ln π`) are exposed in
//! [`info_measures::initial_identities`] and serve as self-tests.
//!
//! ## Layout
//!
//! * [`model_core`] — configuration, truncation control, closed-form and
//!   brute-force (eigendecomposition) propagators, fidelity.
//! * [`phase_space`] — polar quadrature grid, Husimi field `Q` with its
//!   analytic gradient, normalization audit.
//! * [`info_measures`] — entropy/Fisher functionals, phase densities,
//!   moments, Cramér–Rao products, per-record invariant audit.
//! * [`experiments`] — deterministic `(α, T)` sweep drivers producing
//!   rectangular [`experiments::SeriesTable`]s for surfaces, traces,
//!   parametric curves, period means, and CR traces.
//! * [`error`] — the crate-wide error type with CLI exit-code mapping.
//!
//! ## Parallelism
//!
//! The `parallel` feature (default) parallelizes Husimi sampling over radial
//! rows and sweeps over `(α, T)` points with rayon. No floating-point
//! reduction ever crosses a thread boundary, so sequential and parallel
//! builds produce bit-identical tables.
//!
//! ```
//! use bsjc::model_core::{evolve_closed_form, ModelConfig};
//! use bsjc::phase_space::{build_grid, sample_qfield};
//! use bsjc::info_measures::measure_record;
//!
//! let cfg = ModelConfig::with_alpha(2.0);
//! let grid = build_grid(&cfg).unwrap();
//! let state = evolve_closed_form(&cfg, 1.3).unwrap();
//! let qf = sample_qfield(&state, &grid).unwrap();
//! let rec = measure_record(&qf, &grid).unwrap();
//! assert!(rec.s_w > 1.0 + std::f64::consts::PI.ln() - 1e-9); // Wehrl–Lieb bound
//! assert!(rec.i_f > 0.0 && rec.cr_product.is_finite());
//! ```

pub mod error;
pub mod experiments;
pub mod info_measures;
pub mod model_core;
pub mod phase_space;
mod util;

pub use error::{Error, Result};
pub use experiments::{Aggregate, SeriesTable, SweepSpec};
pub use info_measures::{MeasureRecord, VariancePair};
pub use model_core::{JointStateBranches, ModelConfig, TruncationRule};
pub use phase_space::{PhaseSpaceGrid, QField};
