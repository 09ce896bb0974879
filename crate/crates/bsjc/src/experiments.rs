//! Sweep drivers: assemble [`MeasureRecord`]s over `(α, T)` grids and emit
//! the data series behind the standard figures (Fisher/Wehrl surfaces, time
//! traces with the `X₂` variance, the parametric Fisher-vs-Wehrl curve,
//! period-averaged α sweeps, and Cramér–Rao traces).
//!
//! Rows are computed point-parallel when the `parallel` feature is enabled;
//! table assembly is always ordered `(α index, T index)` and every
//! floating-point reduction happens inside a single point, so emitted tables
//! are bit-identical across runs and thread counts. At least 5% of the rows
//! of every sweep are re-audited against the physical invariants of
//! [`crate::info_measures::audit_record`].

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::info_measures::{
    audit_record, marginal_cr_check, measure_record, MarginalAxis, MeasureRecord,
};
use crate::model_core::{evolve_closed_form, ModelConfig};
use crate::phase_space::{build_grid_sized, sample_qfield, PhaseSpaceGrid, DEFAULT_N_R, DEFAULT_N_THETA};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Whether a sweep reports raw rows or per-α aggregates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Aggregate {
    None,
    /// Mean over the sampled `T` interval (trapezoid rule): the canonical
    /// invariant of the exactly 2π-periodic dynamics.
    PeriodMean,
}

/// Parameter grid of one sweep.
#[derive(Debug, Clone)]
pub struct SweepSpec {
    /// Coherent amplitudes to sweep (each spawns its own truncation/grid).
    pub alpha_values: Vec<f64>,
    pub t_min: f64,
    pub t_max: f64,
    /// Number of `T` samples, endpoints included.
    pub t_steps: usize,
    /// Grid resolution override `(n_r, n_theta)`; defaults 200 × 256.
    pub grid_override: Option<(usize, usize)>,
    pub aggregate: Aggregate,
    /// Template for everything but `alpha_mag` (phase, coupling, truncation
    /// policy, tail tolerance); `alpha_mag` is replaced per sweep value.
    pub model: ModelConfig,
}

impl SweepSpec {
    /// One period `T ∈ [0, 2π]` with the given α values and `t_steps`
    /// samples, default grid and model parameters.
    pub fn over_period(alpha_values: Vec<f64>, t_steps: usize) -> Self {
        SweepSpec {
            alpha_values,
            t_min: 0.0,
            t_max: 2.0 * std::f64::consts::PI,
            t_steps,
            grid_override: None,
            aggregate: Aggregate::None,
            model: ModelConfig::default(),
        }
    }

    /// Check the sweep-parameter invariants.
    pub fn validate(&self) -> Result<()> {
        if self.alpha_values.is_empty() {
            return Err(Error::InvalidParameter("alpha_values must not be empty".into()));
        }
        for &a in &self.alpha_values {
            if !a.is_finite() || a < 0.0 {
                return Err(Error::InvalidParameter(format!("alpha values must be ≥ 0, got {a}")));
            }
        }
        if self.t_steps < 2 {
            return Err(Error::InvalidParameter(format!(
                "t_steps must be ≥ 2 (got {}): sweeps and parametric plots need at least two samples",
                self.t_steps
            )));
        }
        if !(self.t_max > self.t_min) || !self.t_min.is_finite() || !self.t_max.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "need finite t_max > t_min, got [{}, {}]",
                self.t_min, self.t_max
            )));
        }
        self.model.validate()
    }

    /// The uniform `T` samples, endpoints included.
    pub fn t_nodes(&self) -> Vec<f64> {
        let h = (self.t_max - self.t_min) / (self.t_steps - 1) as f64;
        (0..self.t_steps).map(|k| self.t_min + h * k as f64).collect()
    }

    fn grid_size(&self) -> (usize, usize) {
        self.grid_override.unwrap_or((DEFAULT_N_R, DEFAULT_N_THETA))
    }
}

/// A rectangular, finite, deterministic result table.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesTable {
    pub columns: Vec<&'static str>,
    /// Row-major records in header order.
    pub rows: Vec<Vec<f64>>,
    /// Configuration echo (sorted keys → deterministic serialization).
    pub meta: BTreeMap<String, String>,
}

impl SeriesTable {
    fn new(columns: Vec<&'static str>, spec: &SweepSpec) -> Self {
        let mut meta = BTreeMap::new();
        let (n_r, n_theta) = spec.grid_size();
        meta.insert(
            "alpha_values".into(),
            spec.alpha_values.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(","),
        );
        meta.insert("t_min".into(), spec.t_min.to_string());
        meta.insert("t_max".into(), spec.t_max.to_string());
        meta.insert("t_steps".into(), spec.t_steps.to_string());
        meta.insert("n_r".into(), n_r.to_string());
        meta.insert("n_theta".into(), n_theta.to_string());
        meta.insert("alpha_phase".into(), spec.model.alpha_phase.to_string());
        meta.insert("lambda".into(), spec.model.lambda.to_string());
        meta.insert("tail_tol".into(), spec.model.tail_tol.to_string());
        meta.insert(
            "n_max".into(),
            match spec.model.n_max {
                crate::model_core::TruncationRule::Auto => "auto".into(),
                crate::model_core::TruncationRule::Explicit(n) => n.to_string(),
            },
        );
        meta.insert(
            "aggregate".into(),
            match spec.aggregate {
                Aggregate::None => "none".into(),
                Aggregate::PeriodMean => "period_mean".into(),
            },
        );
        meta.insert("code_version".into(), env!("CARGO_PKG_VERSION").into());
        SeriesTable { columns, rows: Vec::new(), meta }
    }

    fn push_row(&mut self, row: Vec<f64>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::InvalidArgument(format!(
                "row width {} does not match {} columns",
                row.len(),
                self.columns.len()
            )));
        }
        if let Some(k) = row.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!(
                "column '{}' in row {}",
                self.columns[k],
                self.rows.len()
            )));
        }
        self.rows.push(row);
        Ok(())
    }
}

/// Per-α immutable context shared by all its time samples.
struct AlphaContext {
    alpha: f64,
    cfg: ModelConfig,
    grid: PhaseSpaceGrid,
}

fn contexts(spec: &SweepSpec) -> Result<Vec<AlphaContext>> {
    let (n_r, n_theta) = spec.grid_size();
    spec.alpha_values
        .iter()
        .map(|&alpha| {
            let cfg = ModelConfig { alpha_mag: alpha, ..spec.model.clone() };
            let grid = build_grid_sized(&cfg, n_r, n_theta)
                .map_err(|e| err_with_point(e, alpha, f64::NAN))?;
            Ok(AlphaContext { alpha, cfg, grid })
        })
        .collect()
}

/// Attach `(α, T)` context to a point failure.
fn err_with_point(e: Error, alpha: f64, t: f64) -> Error {
    let at = if t.is_nan() { format!("α = {alpha}") } else { format!("α = {alpha}, T = {t}") };
    match e {
        Error::InvalidParameter(m) => Error::InvalidParameter(format!("[{at}] {m}")),
        Error::InvalidArgument(m) => Error::InvalidArgument(format!("[{at}] {m}")),
        Error::GridCoverage { deviation, hint } => {
            Error::GridCoverage { deviation, hint: format!("[{at}] {hint}") }
        }
        Error::Truncation(m) => Error::Truncation(format!("[{at}] {m}")),
        Error::NonFinite(m) => Error::NonFinite(format!("[{at}] {m}")),
        Error::Invariant(m) => Error::Invariant(format!("[{at}] {m}")),
    }
}

/// One computed sweep point.
struct Point {
    alpha: f64,
    rec: MeasureRecord,
    /// Marginal CR products `(X₁, X₂)` when requested.
    marginal: Option<(f64, f64)>,
}

/// Fraction of rows re-audited against the measure invariants (every 20th
/// flat index ⇒ 5%, and always at least the first point).
const AUDIT_STRIDE: usize = 20;

fn compute_sweep(spec: &SweepSpec, with_marginals: bool) -> Result<Vec<Point>> {
    spec.validate()?;
    let ctxs = contexts(spec)?;
    let t_nodes = spec.t_nodes();
    let total = ctxs.len() * t_nodes.len();

    let eval = |k: usize| -> Result<Point> {
        let ctx = &ctxs[k / t_nodes.len()];
        let t = t_nodes[k % t_nodes.len()];
        let wrap = |e: Error| err_with_point(e, ctx.alpha, t);
        let s = evolve_closed_form(&ctx.cfg, t).map_err(wrap)?;
        let qf = sample_qfield(&s, &ctx.grid).map_err(wrap)?;
        let rec = measure_record(&qf, &ctx.grid).map_err(wrap)?;
        if k % AUDIT_STRIDE == 0 {
            audit_record(&rec, &ctx.grid).map_err(wrap)?;
        }
        let marginal = if with_marginals {
            let cx1 = marginal_cr_check(&s, &ctx.grid, MarginalAxis::X1).map_err(wrap)?;
            let cx2 = marginal_cr_check(&s, &ctx.grid, MarginalAxis::X2).map_err(wrap)?;
            Some((cx1.product, cx2.product))
        } else {
            None
        };
        Ok(Point { alpha: ctx.alpha, rec, marginal })
    };

    #[cfg(feature = "parallel")]
    return (0..total).into_par_iter().map(eval).collect();
    #[cfg(not(feature = "parallel"))]
    return (0..total).map(eval).collect();
}

/// Fisher/Wehrl surface over the full `(α, T)` product grid.
///
/// Columns `alpha, T, I_F, S_W`; rows ordered α-outer, T-inner.
pub fn surface_sweep(spec: &SweepSpec) -> Result<SeriesTable> {
    let points = compute_sweep(spec, false)?;
    let mut table = SeriesTable::new(vec!["alpha", "T", "I_F", "S_W"], spec);
    for p in points {
        table.push_row(vec![p.alpha, p.rec.t_scaled, p.rec.i_f, p.rec.s_w])?;
    }
    Ok(table)
}

/// Per-α time traces with the `X₂` marginal variance.
///
/// Columns `alpha, T, I_F, S_W, var_x2`.
pub fn time_traces(spec: &SweepSpec) -> Result<SeriesTable> {
    let points = compute_sweep(spec, false)?;
    let mut table = SeriesTable::new(vec!["alpha", "T", "I_F", "S_W", "var_x2"], spec);
    for p in points {
        table.push_row(vec![
            p.alpha,
            p.rec.t_scaled,
            p.rec.i_f,
            p.rec.s_w,
            p.rec.variances.var_x2,
        ])?;
    }
    Ok(table)
}

/// The same trace data ordered for parametric `I_F` vs `S_W` plotting.
///
/// Columns `alpha, T, S_W, I_F`.
pub fn parametric_fisher_vs_wehrl(spec: &SweepSpec) -> Result<SeriesTable> {
    let points = compute_sweep(spec, false)?;
    let mut table = SeriesTable::new(vec!["alpha", "T", "S_W", "I_F"], spec);
    for p in points {
        table.push_row(vec![p.alpha, p.rec.t_scaled, p.rec.s_w, p.rec.i_f])?;
    }
    Ok(table)
}

/// Trapezoid mean of uniformly sampled values over their interval.
fn trapezoid_mean(values: &[f64]) -> f64 {
    let n = values.len();
    let mut acc = crate::util::Kahan::new();
    for (i, &v) in values.iter().enumerate() {
        let w = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
        acc.add(w * v);
    }
    acc.sum() / (n - 1) as f64
}

/// Period-averaged quantifiers versus α.
///
/// Columns `alpha, I_F_mean, S_W_mean`; requires `aggregate = PeriodMean`
/// and averages over the sweep's `T` interval (default one exact period).
pub fn alpha_sweep(spec: &SweepSpec) -> Result<SeriesTable> {
    if spec.aggregate != Aggregate::PeriodMean {
        return Err(Error::InvalidArgument(
            "alpha_sweep requires aggregate = period_mean".into(),
        ));
    }
    let points = compute_sweep(spec, false)?;
    let n_t = spec.t_steps;
    let mut table = SeriesTable::new(vec!["alpha", "I_F_mean", "S_W_mean"], spec);
    for (ai, &alpha) in spec.alpha_values.iter().enumerate() {
        let block = &points[ai * n_t..(ai + 1) * n_t];
        let i_f: Vec<f64> = block.iter().map(|p| p.rec.i_f).collect();
        let s_w: Vec<f64> = block.iter().map(|p| p.rec.s_w).collect();
        table.push_row(vec![alpha, trapezoid_mean(&i_f), trapezoid_mean(&s_w)])?;
    }
    Ok(table)
}

/// Cramér–Rao traces with the rigorous marginal products as companions.
///
/// Columns `alpha, T, cr_product, marginal_cr_x1, marginal_cr_x2`.
pub fn cr_traces(spec: &SweepSpec) -> Result<SeriesTable> {
    let points = compute_sweep(spec, true)?;
    let mut table = SeriesTable::new(
        vec!["alpha", "T", "cr_product", "marginal_cr_x1", "marginal_cr_x2"],
        spec,
    );
    for p in points {
        let (m1, m2) = p.marginal.expect("cr_traces always computes marginals");
        table.push_row(vec![p.alpha, p.rec.t_scaled, p.rec.cr_product, m1, m2])?;
    }
    Ok(table)
}

/// Spearman rank correlation between two equally long samples
/// (average ranks on ties).
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::InvalidArgument(format!(
            "sample lengths differ: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 2 {
        return Err(Error::InvalidArgument("need at least two samples".into()));
    }
    if x.iter().chain(y.iter()).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("spearman input".into()));
    }
    let rx = ranks(x);
    let ry = ranks(y);
    let n = x.len() as f64;
    let mx = rx.iter().sum::<f64>() / n;
    let my = ry.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::InvalidArgument("constant sample has no rank correlation".into()));
    }
    Ok(sxy / (sxx * syy).sqrt())
}

/// 1-based ranks with ties replaced by their group average.
fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut out = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            out[k] = avg;
        }
        i = j + 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn small_spec(alphas: Vec<f64>, t_steps: usize) -> SweepSpec {
        SweepSpec {
            grid_override: Some((48, 64)),
            ..SweepSpec::over_period(alphas, t_steps)
        }
    }

    #[test]
    fn surface_rows_are_alpha_outer_t_inner() {
        let spec = small_spec(vec![0.5, 1.0], 5);
        let table = surface_sweep(&spec).unwrap();
        assert_eq!(table.columns, vec!["alpha", "T", "I_F", "S_W"]);
        assert_eq!(table.rows.len(), 10);
        assert!(table.rows[..5].iter().all(|r| r[0] == 0.5));
        assert!(table.rows[5..].iter().all(|r| r[0] == 1.0));
        for w in table.rows[..5].windows(2) {
            assert!(w[1][1] > w[0][1], "T must ascend within an α block");
        }
        // I_F = 2 and S_W = 1 + ln π wherever T = 0.
        for r in table.rows.iter().filter(|r| r[1] == 0.0) {
            assert!((r[2] - 2.0).abs() < 1e-6, "I_F(0) = {}", r[2]);
            assert!((r[3] - (1.0 + PI.ln())).abs() < 1e-6, "S_W(0) = {}", r[3]);
        }
    }

    #[test]
    fn specs_are_validated() {
        assert!(surface_sweep(&small_spec(vec![], 5)).is_err());
        assert!(surface_sweep(&small_spec(vec![-1.0], 5)).is_err());
        assert!(parametric_fisher_vs_wehrl(&small_spec(vec![1.0], 1)).is_err());
        let mut bad = small_spec(vec![1.0], 5);
        bad.t_max = bad.t_min;
        assert!(time_traces(&bad).is_err());
        // alpha_sweep demands the period-mean aggregate.
        assert!(alpha_sweep(&small_spec(vec![1.0], 5)).is_err());
    }

    #[test]
    fn traces_carry_coherent_variance_at_revival_times() {
        let mut spec = small_spec(vec![1.0], 9);
        spec.t_max = 2.0 * PI;
        let table = time_traces(&spec).unwrap();
        assert_eq!(table.columns, vec!["alpha", "T", "I_F", "S_W", "var_x2"]);
        // T = 0, π, 2π are rows 0, 4, 8 of the 9-point grid.
        for &k in &[0usize, 4, 8] {
            assert!(
                (table.rows[k][4] - 0.5).abs() < 1e-6,
                "var_x2 at T = {} is {}",
                table.rows[k][1],
                table.rows[k][4]
            );
        }
    }

    #[test]
    fn quantifiers_are_periodic_over_two_periods() {
        let mut spec = small_spec(vec![1.0], 17);
        spec.t_max = 4.0 * PI; // nodes k·π/4: node j and j+8 differ by 2π
        let table = time_traces(&spec).unwrap();
        for j in 0..8 {
            let (a, b) = (&table.rows[j], &table.rows[j + 8]);
            assert!((a[2] - b[2]).abs() < 1e-8, "I_F period: {} vs {}", a[2], b[2]);
            assert!((a[3] - b[3]).abs() < 1e-8, "S_W period: {} vs {}", a[3], b[3]);
        }
    }

    #[test]
    fn parametric_table_shares_trace_data() {
        let spec = small_spec(vec![1.0], 5);
        let par = parametric_fisher_vs_wehrl(&spec).unwrap();
        let tra = time_traces(&spec).unwrap();
        assert_eq!(par.columns, vec!["alpha", "T", "S_W", "I_F"]);
        for (p, t) in par.rows.iter().zip(&tra.rows) {
            assert_eq!(p[2], t[3], "S_W");
            assert_eq!(p[3], t[2], "I_F");
        }
    }

    #[test]
    fn alpha_sweep_aggregates_one_row_per_alpha() {
        let mut spec = small_spec(vec![0.0, 1.0], 9);
        spec.aggregate = Aggregate::PeriodMean;
        let table = alpha_sweep(&spec).unwrap();
        assert_eq!(table.columns, vec!["alpha", "I_F_mean", "S_W_mean"]);
        assert_eq!(table.rows.len(), 2);
        // Even α = 0 evolves (vacuum Rabi oscillation |0,e⟩ ↔ |1,g⟩), and any
        // departure from a coherent state raises both means above their
        // coherent-state floors I_F = 2 and S_W = 1 + ln π.
        for r in &table.rows {
            assert!(r[1] > 2.0 - 1e-9, "I_F mean = {} at α = {}", r[1], r[0]);
            assert!(r[2] >= 1.0 + PI.ln() - 1e-9, "S_W mean = {} at α = {}", r[2], r[0]);
        }
    }

    #[test]
    fn cr_traces_satisfy_marginal_inequality() {
        let spec = small_spec(vec![1.0], 3);
        let table = cr_traces(&spec).unwrap();
        assert_eq!(
            table.columns,
            vec!["alpha", "T", "cr_product", "marginal_cr_x1", "marginal_cr_x2"]
        );
        for r in &table.rows {
            assert!(r[3] >= 1.0 - 1e-3, "marginal CR x1 = {}", r[3]);
            assert!(r[4] >= 1.0 - 1e-3, "marginal CR x2 = {}", r[4]);
        }
    }

    #[test]
    fn tables_are_bit_identical_across_runs() {
        let spec = small_spec(vec![1.3], 5);
        let a = time_traces(&spec).unwrap();
        let b = time_traces(&spec).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn spearman_agrees_with_definition() {
        let x = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(spearman(&x, &[2.0, 4.0, 6.0, 8.0]).unwrap(), 1.0);
        assert_eq!(spearman(&x, &[8.0, 6.0, 4.0, 2.0]).unwrap(), -1.0);
        // Ties: ranks of y = (1.5, 1.5, 3.5, 3.5) still correlate positively.
        let rho = spearman(&x, &[1.0, 1.0, 2.0, 2.0]).unwrap();
        assert!(rho > 0.8 && rho < 1.0, "rho = {rho}");
        assert!(spearman(&x, &[1.0, 1.0, 1.0, 1.0]).is_err());
        assert!(spearman(&x, &[1.0]).is_err());
    }

    #[test]
    fn trapezoid_mean_of_cosine_vanishes() {
        let vals: Vec<f64> =
            (0..=16).map(|k| (2.0 * PI * k as f64 / 16.0).cos()).collect();
        assert!(trapezoid_mean(&vals).abs() < 1e-15);
        assert_eq!(trapezoid_mean(&[3.0, 3.0, 3.0]), 3.0);
    }
}
