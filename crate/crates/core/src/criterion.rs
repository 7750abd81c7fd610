//! Numerical check of the conformal-Killing reflectivity criterion: a spacetime
//! with a past-complete conformal timelike Killing field is past reflecting, and
//! so is every Lorentzian covering of it (the field lifts, and so does its flow).
//!
//! The Killing equation `L_X g = sigma g` is tested pointwise with second-order
//! central differences; completeness is probed by integrating the flow of `X`
//! backwards with an adaptive Dormand-Prince 5(4) pair, stopping when a
//! trajectory enters the guard neighbourhood of the removed set.

pub mod fixtures;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type MetricFn = Box<dyn Fn(&[f64]) -> DMatrix<f64> + Send + Sync>;
pub type VectorFn = Box<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;
pub type GuardFn = Box<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// Default finite-difference step.
pub const DEFAULT_H: f64 = 1e-4;
/// Default residual tolerance at `DEFAULT_H`.
pub const DEFAULT_TOL: f64 = 1e-6;
/// Default radius of the excluded neighbourhood of removed points.
pub const DEFAULT_GUARD: f64 = 1e-6;
/// Absolute and relative tolerance of the flow integrator.
pub const INTEGRATOR_TOL: f64 = 1e-9;

/// A Lorentz metric in a chart, with an optional distance to the removed set.
pub struct MetricField {
    pub name: String,
    pub chart: String,
    dim: usize,
    eval: MetricFn,
    removed_distance: Option<GuardFn>,
}

impl std::fmt::Debug for MetricField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MetricField").field("name", &self.name).field("chart", &self.chart).field("dim", &self.dim).finish()
    }
}

impl MetricField {
    pub fn new(name: impl Into<String>, chart: impl Into<String>, dim: usize, eval: MetricFn) -> Self {
        MetricField { name: name.into(), chart: chart.into(), dim, eval, removed_distance: None }
    }

    /// Attach the distance (in chart coordinates) to the points removed from the chart.
    pub fn with_removed_set(mut self, distance: GuardFn) -> Self {
        self.removed_distance = Some(distance);
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Distance to the removed set; infinite when nothing is removed.
    pub fn removed_distance(&self, x: &[f64]) -> f64 {
        self.removed_distance.as_ref().map_or(f64::INFINITY, |d| d(x))
    }

    pub fn components(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        if x.len() != self.dim {
            return Err(Error::Metric(format!("point has {} coordinates, chart has {}", x.len(), self.dim)));
        }
        let g = (self.eval)(x);
        if g.nrows() != self.dim || g.ncols() != self.dim || g.iter().any(|v| !v.is_finite()) {
            return Err(Error::Metric(format!("metric at {x:?} is not a finite {0}x{0} matrix", self.dim)));
        }
        Ok(g)
    }

    /// Components at `x`, after checking signature `(-, +, ..., +)`.
    pub fn lorentz_components(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        let g = self.components(x)?;
        let eig = SymmetricEigen::new(g.clone()).eigenvalues;
        let scale = eig.iter().fold(0.0_f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
        let neg = eig.iter().filter(|v| **v < -1e-12 * scale).count();
        let pos = eig.iter().filter(|v| **v > 1e-12 * scale).count();
        if neg != 1 || pos != self.dim - 1 {
            return Err(Error::Metric(format!("metric at {x:?} has eigenvalues {:?}, not Lorentz signature", eig.as_slice())));
        }
        Ok(g)
    }
}

/// A candidate vector field in the same chart as the metric.
pub struct VectorFieldCandidate {
    pub name: String,
    eval: VectorFn,
}

impl std::fmt::Debug for VectorFieldCandidate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("VectorFieldCandidate").field("name", &self.name).finish()
    }
}

impl VectorFieldCandidate {
    pub fn new(name: impl Into<String>, eval: VectorFn) -> Self {
        VectorFieldCandidate { name: name.into(), eval }
    }

    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        (self.eval)(x)
    }
}

/// `L_X g` and its best conformal fit at one point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LieResidual {
    /// `|| L_X g - sigma g ||_F`.
    pub residual: f64,
    /// Least-squares `sigma = <L_X g, g>_F / <g, g>_F`.
    pub sigma: f64,
    /// `g(X, X)`.
    pub norm: f64,
}

fn shifted(x: &[f64], k: usize, d: f64) -> Vec<f64> {
    let mut y = x.to_vec();
    y[k] += d;
    y
}

/// Central-difference Lie derivative of `g` along `X` at `pt`, with the conformal
/// part removed:
/// `(L_X g)_ij = X^k d_k g_ij + g_kj d_i X^k + g_ik d_j X^k`.
pub fn lie_derivative_residual(x: &VectorFieldCandidate, g: &MetricField, pt: &[f64], h: f64) -> Result<LieResidual> {
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::Domain(format!("finite-difference step must be positive, got {h}")));
    }
    let n = g.dim();
    if g.removed_distance(pt) <= h * (n as f64).sqrt() {
        return Err(Error::Metric(format!("difference stencil at {pt:?} meets the removed set")));
    }
    let g0 = g.lorentz_components(pt)?;
    let xv = x.eval(pt);
    if xv.len() != n {
        return Err(Error::Metric(format!("vector field has {} components, chart has {n}", xv.len())));
    }
    let mut dg = Vec::with_capacity(n);
    let mut dx = Vec::with_capacity(n);
    for k in 0..n {
        let (plus, minus) = (shifted(pt, k, h), shifted(pt, k, -h));
        dg.push((g.components(&plus)? - g.components(&minus)?) / (2.0 * h));
        let (xp, xm) = (x.eval(&plus), x.eval(&minus));
        dx.push(xp.iter().zip(&xm).map(|(a, b)| (a - b) / (2.0 * h)).collect::<Vec<_>>());
    }
    // dx[i][k] = d_i X^k.
    let lie = DMatrix::from_fn(n, n, |i, j| {
        let mut v = 0.0;
        for k in 0..n {
            v += xv[k] * dg[k][(i, j)] + g0[(k, j)] * dx[i][k] + g0[(i, k)] * dx[j][k];
        }
        v
    });
    let sigma = lie.dot(&g0) / g0.dot(&g0);
    let residual = (&lie - &g0 * sigma).norm();
    let norm = (0..n).map(|i| (0..n).map(|j| g0[(i, j)] * xv[i] * xv[j]).sum::<f64>()).sum();
    Ok(LieResidual { residual, sigma, norm })
}

/// Residuals over a ladder of steps and their log-log slope.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceStudy {
    pub steps: Vec<f64>,
    pub residuals: Vec<f64>,
    /// Least-squares slope of `log residual` against `log h`; `None` when every
    /// residual is at the rounding floor, so there is nothing to fit.
    pub slope: Option<f64>,
}

impl ConvergenceStudy {
    /// Residual exactly zero up to rounding at every step.
    pub fn exact(&self) -> bool {
        self.slope.is_none()
    }
}

/// Residual below which a difference quotient is treated as exact.
pub const ROUNDING_FLOOR: f64 = 1e-13;

/// Least-squares slope of `log y` against `log x`.
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = xs.iter().zip(ys).map(|(x, y)| (x.ln(), y.ln())).collect();
    let m = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / m, sy / m);
    let cov: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = pts.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    cov / var
}

pub fn residual_convergence(x: &VectorFieldCandidate, g: &MetricField, pt: &[f64], steps: &[f64]) -> Result<ConvergenceStudy> {
    let residuals = steps
        .iter()
        .map(|&h| lie_derivative_residual(x, g, pt, h).map(|r| r.residual))
        .collect::<Result<Vec<_>>>()?;
    let slope = if residuals.iter().all(|r| *r <= ROUNDING_FLOOR) {
        None
    } else {
        Some(log_log_slope(steps, &residuals))
    };
    Ok(ConvergenceStudy { steps: steps.to_vec(), residuals, slope })
}

/// A sample that refutes the conformal-Killing or timelike condition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FailureWitness {
    Residual { point: Vec<f64>, residual: f64, tol: f64 },
    NotTimelike { point: Vec<f64>, norm: f64 },
    Escaped { start: Vec<f64>, parameter: f64, point: Vec<f64> },
    Metric { point: Vec<f64>, message: String },
}

/// Summary of a conformal-Killing check over a sample set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KillingCheck {
    pub passed: bool,
    pub samples: usize,
    pub max_residual: f64,
    pub sigma_min: f64,
    pub sigma_max: f64,
    /// Largest `g(X, X)` over the samples; negative when `X` is timelike everywhere.
    pub max_norm: f64,
    pub witness: Option<FailureWitness>,
}

pub fn is_conformal_timelike_killing(
    x: &VectorFieldCandidate,
    g: &MetricField,
    samples: &[Vec<f64>],
    h: f64,
    tol: f64,
) -> Result<KillingCheck> {
    if samples.is_empty() {
        return Err(Error::Domain("conformal Killing check needs at least one sample".into()));
    }
    let mut out = KillingCheck {
        passed: true,
        samples: samples.len(),
        max_residual: 0.0,
        sigma_min: f64::INFINITY,
        sigma_max: f64::NEG_INFINITY,
        max_norm: f64::NEG_INFINITY,
        witness: None,
    };
    for pt in samples {
        let r = match lie_derivative_residual(x, g, pt, h) {
            Ok(r) => r,
            Err(Error::Metric(message)) => {
                out.passed = false;
                out.witness.get_or_insert(FailureWitness::Metric { point: pt.clone(), message });
                continue;
            }
            Err(e) => return Err(e),
        };
        out.max_residual = out.max_residual.max(r.residual);
        out.sigma_min = out.sigma_min.min(r.sigma);
        out.sigma_max = out.sigma_max.max(r.sigma);
        out.max_norm = out.max_norm.max(r.norm);
        if !(r.residual < tol) {
            out.passed = false;
            out.witness.get_or_insert(FailureWitness::Residual { point: pt.clone(), residual: r.residual, tol });
        }
        if !(r.norm < 0.0) {
            out.passed = false;
            out.witness.get_or_insert(FailureWitness::NotTimelike { point: pt.clone(), norm: r.norm });
        }
    }
    Ok(out)
}

/// Outcome of a backward flow probe.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProbeVerdict {
    /// Every trajectory stayed in the guarded domain up to parameter `-budget`.
    Survived,
    /// A trajectory came within the guard radius of the removed set.
    EscapedDomain { start: Vec<f64>, parameter: f64, point: Vec<f64> },
    Inconclusive { reason: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub verdict: ProbeVerdict,
    pub budget: f64,
    pub guard: f64,
    pub trajectories: usize,
    pub steps: u64,
}

/// Dormand-Prince 5(4) tableau (the field is autonomous, so the nodes are not needed).
const DP_A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const DP_B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const DP_B4: [f64; 7] =
    [5179.0 / 57600.0, 0.0, 7571.0 / 16695.0, 393.0 / 640.0, -92097.0 / 339200.0, 187.0 / 2100.0, 1.0 / 40.0];

/// Step budget per trajectory before a probe gives up.
const MAX_STEPS: u64 = 2_000_000;
const MAX_STEP_SIZE: f64 = 10.0;

enum Trajectory {
    Survived(u64),
    Escaped { parameter: f64, point: Vec<f64>, steps: u64 },
    Failed(String),
}

/// Integrate `dy/ds = -X(y)` from `s = 0` to `budget`. Steps never exceed half
/// the distance to the removed set divided by `|X|`, so no step can jump across it.
fn backward_trajectory(x: &VectorFieldCandidate, g: &MetricField, start: &[f64], budget: f64, guard: f64) -> Trajectory {
    let n = start.len();
    let rhs = |y: &[f64]| -> Vec<f64> { x.eval(y).into_iter().map(|v| -v).collect() };
    let mut y = start.to_vec();
    let mut s = 0.0;
    let mut step = (budget / 100.0).clamp(1e-6, 1.0);
    let mut steps = 0u64;
    while s < budget {
        let d = g.removed_distance(&y);
        if d <= guard {
            return Trajectory::Escaped { parameter: -s, point: y, steps };
        }
        if steps >= MAX_STEPS {
            return Trajectory::Failed(format!("step budget exhausted at parameter {}", -s));
        }
        let speed = rhs(&y).iter().map(|v| v * v).sum::<f64>().sqrt();
        let cap = if speed > 0.0 { 0.5 * (d - 0.5 * guard) / speed } else { f64::INFINITY };
        let h = step.min(cap).min(MAX_STEP_SIZE).min(budget - s);
        if !(h > 0.0) || h < 1e-300 {
            return Trajectory::Failed(format!("step size underflow at parameter {}", -s));
        }
        let mut k: Vec<Vec<f64>> = Vec::with_capacity(7);
        for stage in 0..7 {
            let mut yi = y.clone();
            for (j, kj) in k.iter().enumerate() {
                for c in 0..n {
                    yi[c] += h * DP_A[stage][j] * kj[c];
                }
            }
            k.push(rhs(&yi));
        }
        let mut y5 = y.clone();
        let mut err = 0.0_f64;
        for c in 0..n {
            let (mut a5, mut a4) = (0.0, 0.0);
            for stage in 0..7 {
                a5 += DP_B5[stage] * k[stage][c];
                a4 += DP_B4[stage] * k[stage][c];
            }
            y5[c] += h * a5;
            let scale = INTEGRATOR_TOL * (1.0 + y[c].abs().max(y5[c].abs()));
            err = err.max((h * (a5 - a4)).abs() / scale);
        }
        if !y5.iter().all(|v| v.is_finite()) {
            return Trajectory::Failed(format!("non-finite state at parameter {}", -s));
        }
        steps += 1;
        if err <= 1.0 {
            y = y5;
            s += h;
            step = h * (0.9 * err.max(1e-10).powf(-0.2)).min(5.0);
        } else {
            step = h * (0.9 * err.powf(-0.2)).max(0.1);
        }
    }
    if g.removed_distance(&y) <= guard {
        return Trajectory::Escaped { parameter: -s, point: y, steps };
    }
    Trajectory::Survived(steps)
}

/// Integrate the flow of `X` backwards to parameter `-budget` from each start.
pub fn probe_past_completeness(
    x: &VectorFieldCandidate,
    g: &MetricField,
    starts: &[Vec<f64>],
    budget: f64,
    guard: f64,
) -> ProbeReport {
    let mut report = ProbeReport { verdict: ProbeVerdict::Survived, budget, guard, trajectories: starts.len(), steps: 0 };
    if !(budget.is_finite() && budget >= 0.0 && guard >= 0.0) {
        report.verdict = ProbeVerdict::Inconclusive { reason: format!("invalid budget {budget} or guard {guard}") };
        return report;
    }
    for start in starts {
        match backward_trajectory(x, g, start, budget, guard) {
            Trajectory::Survived(steps) => report.steps += steps,
            Trajectory::Escaped { parameter, point, steps } => {
                report.steps += steps;
                report.verdict = ProbeVerdict::EscapedDomain { start: start.clone(), parameter, point };
                return report;
            }
            Trajectory::Failed(reason) => {
                report.verdict = ProbeVerdict::Inconclusive { reason };
                return report;
            }
        }
    }
    report
}

/// Inputs of a certification run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertifyConfig {
    pub samples: Vec<Vec<f64>>,
    pub h: f64,
    pub tol: f64,
    pub starts: Vec<Vec<f64>>,
    pub budget: f64,
    pub guard: f64,
}

impl CertifyConfig {
    pub fn new(samples: Vec<Vec<f64>>, starts: Vec<Vec<f64>>, budget: f64) -> Self {
        CertifyConfig { samples, h: DEFAULT_H, tol: DEFAULT_TOL, starts, budget, guard: DEFAULT_GUARD }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CertificateVerdict {
    /// Past reflecting, relative to the probe budget; extends to every covering.
    CertifiedPastReflecting,
    Failed { reason: String, witness: FailureWitness },
    Inconclusive { reason: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub verdict: CertificateVerdict,
    pub killing: KillingCheck,
    pub probe: Option<ProbeReport>,
    /// The conclusion also holds on every Lorentzian covering.
    pub covering_clause: bool,
}

impl Certificate {
    pub fn certified(&self) -> bool {
        matches!(self.verdict, CertificateVerdict::CertifiedPastReflecting)
    }
}

pub fn certify_past_reflectivity(x: &VectorFieldCandidate, g: &MetricField, config: &CertifyConfig) -> Result<Certificate> {
    let killing = is_conformal_timelike_killing(x, g, &config.samples, config.h, config.tol)?;
    if let Some(w) = killing.witness.clone() {
        let reason = match &w {
            FailureWitness::Residual { .. } => "not conformal Killing",
            FailureWitness::NotTimelike { .. } => "not timelike",
            FailureWitness::Metric { .. } => "metric error at a sample",
            FailureWitness::Escaped { .. } => unreachable!("escape witnesses come from the probe"),
        };
        return Ok(Certificate {
            verdict: CertificateVerdict::Failed { reason: reason.into(), witness: w },
            killing,
            probe: None,
            covering_clause: false,
        });
    }
    let probe = probe_past_completeness(x, g, &config.starts, config.budget, config.guard);
    let verdict = match &probe.verdict {
        ProbeVerdict::Survived => CertificateVerdict::CertifiedPastReflecting,
        ProbeVerdict::EscapedDomain { start, parameter, point } => CertificateVerdict::Failed {
            reason: "incomplete flow".into(),
            witness: FailureWitness::Escaped { start: start.clone(), parameter: *parameter, point: point.clone() },
        },
        ProbeVerdict::Inconclusive { reason } => CertificateVerdict::Inconclusive { reason: reason.clone() },
    };
    let covering_clause = matches!(verdict, CertificateVerdict::CertifiedPastReflecting);
    Ok(Certificate { verdict, killing, probe: Some(probe), covering_clause })
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    #[test]
    fn killing_examples() {
        let g = minkowski(2);
        let r = lie_derivative_residual(&coordinate_field(2, 0), &g, &[0.3, -0.7], 1e-4).unwrap();
        assert!(r.residual <= 1e-8 && r.sigma.abs() < 1e-12 && r.norm == -1.0);

        let r = lie_derivative_residual(&coordinate_field(3, 0), &cone_spacetime(), &[0.0, 1.0, 1.0], 1e-4).unwrap();
        assert!(r.residual <= 1e-8 && r.sigma.abs() < 1e-12);

        // L_{t d_t} eta = diag(-2, 0): best fit sigma = 1, residual sqrt(2).
        for h in [1e-2, 1e-3, 1e-4] {
            let r = lie_derivative_residual(&scaled_time_field(2), &g, &[0.5, 0.2], h).unwrap();
            assert!((r.residual - 2f64.sqrt()).abs() < 1e-9, "{}", r.residual);
            assert!((r.sigma - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn signature_violation_is_a_metric_error() {
        let riemannian = MetricField::new("euclidean", "cartesian", 2, Box::new(|_| DMatrix::identity(2, 2)));
        let err = lie_derivative_residual(&coordinate_field(2, 0), &riemannian, &[0.0, 0.0], 1e-4);
        assert!(matches!(err, Err(Error::Metric(_))));
        let wrong_dim = lie_derivative_residual(&coordinate_field(2, 0), &minkowski(3), &[0.0, 0.0], 1e-4);
        assert!(matches!(wrong_dim, Err(Error::Metric(_))));
    }

    #[test]
    fn conformal_factor_is_recovered() {
        // Lambda = exp(0.3 t + 0.1 x): d_t ln(Lambda^2) = 0.6.
        let g = conformastationary_example();
        for pt in [[0.0, 0.0, 0.0], [0.4, -1.2, 0.7], [-2.0, 0.5, 1.5]] {
            let r = lie_derivative_residual(&coordinate_field(3, 0), &g, &pt, 1e-4).unwrap();
            assert!((r.sigma - 0.6).abs() < 1e-6, "{}", r.sigma);
            assert!(r.residual < 1e-6);
        }
        let check = is_conformal_timelike_killing(&coordinate_field(3, 0), &g, &grid_samples(3, 2.0, 4), 1e-4, 1e-6).unwrap();
        assert!(check.passed);
        assert!(check.sigma_min > 0.5);
    }

    #[test]
    fn spacelike_candidate_fails_timelikeness_only() {
        let check = is_conformal_timelike_killing(&coordinate_field(2, 1), &minkowski(2), &grid_samples(2, 1.0, 3), 1e-4, 1e-6).unwrap();
        assert!(!check.passed);
        assert!(check.max_residual < 1e-12);
        assert!(matches!(check.witness, Some(FailureWitness::NotTimelike { .. })));
    }

    #[test]
    fn warped_chart_converges_at_second_order() {
        for (g, pt) in [
            (warped_time(minkowski(2)), vec![0.3, 0.1]),
            (warped_time(cone_spacetime()), vec![0.3, 1.0, 1.0]),
            (warped_time(lines_removed(3, vec![vec![0.0, 0.0], vec![0.5, 0.5]])), vec![0.3, 1.0, -0.5]),
        ] {
            let x = warped_time_field(g.dim());
            let study = residual_convergence(&x, &g, &pt, &[1e-2, 1e-3, 1e-4]).unwrap();
            let slope = study.slope.expect("nonzero residuals");
            assert!(slope >= 1.9, "{} slope {slope}: {:?}", g.name, study.residuals);
            assert!(study.residuals[2] < DEFAULT_TOL);
        }
        let study = residual_convergence(&coordinate_field(2, 0), &minkowski(2), &[0.0, 0.0], &[1e-2, 1e-3, 1e-4]).unwrap();
        assert!(study.exact());
    }

    #[test]
    fn probes() {
        let up = coordinate_field(2, 0);
        let plane = punctured_plane();
        let r = probe_past_completeness(&up, &plane, &[vec![1.0, 0.0]], 2.0, DEFAULT_GUARD);
        match r.verdict {
            ProbeVerdict::EscapedDomain { parameter, .. } => assert!((parameter + 1.0).abs() < 1e-5, "{parameter}"),
            other => panic!("expected escape, got {other:?}"),
        }
        // Above r_3 = (0, -1/3).
        let r = probe_past_completeness(&up, &plane, &[vec![0.5, -1.0 / 3.0]], 2.0, DEFAULT_GUARD);
        assert!(matches!(r.verdict, ProbeVerdict::EscapedDomain { .. }));
        // Between punctures the vertical line survives.
        let r = probe_past_completeness(&up, &plane, &[vec![0.5, 0.37]], 2.0, DEFAULT_GUARD);
        assert_eq!(r.verdict, ProbeVerdict::Survived);

        let lines = lines_removed(3, vec![vec![0.0, 0.0], vec![1.0, 0.0]]);
        let up3 = coordinate_field(3, 0);
        let r = probe_past_completeness(&up3, &lines, &grid_samples(3, 2.0, 3), 1e3, DEFAULT_GUARD);
        assert_eq!(r.verdict, ProbeVerdict::Survived);
        let r = probe_past_completeness(&up3, &lines, &[vec![1.0, 0.5, 0.5]], 0.0, DEFAULT_GUARD);
        assert_eq!(r.verdict, ProbeVerdict::Survived);
    }

    #[test]
    fn certificates() {
        let lines = lines_removed(3, vec![vec![0.0, 0.0], vec![1.0, 0.0]]);
        let cfg = CertifyConfig::new(grid_samples(3, 2.0, 3), grid_samples(3, 2.0, 3), 1e3);
        let c = certify_past_reflectivity(&coordinate_field(3, 0), &lines, &cfg).unwrap();
        assert!(c.certified() && c.covering_clause);

        let plane = punctured_plane();
        let cfg = CertifyConfig::new(grid_samples(2, 0.9, 3), vec![vec![1.0, 0.0]], 2.0);
        let c = certify_past_reflectivity(&coordinate_field(2, 0), &plane, &cfg).unwrap();
        match &c.verdict {
            CertificateVerdict::Failed { reason, witness: FailureWitness::Escaped { .. } } => assert_eq!(reason, "incomplete flow"),
            other => panic!("{other:?}"),
        }
        assert!(!c.covering_clause);

        let cfg = CertifyConfig::new(grid_samples(2, 1.0, 2), vec![], 1.0);
        let c = certify_past_reflectivity(&coordinate_field(2, 1), &minkowski(2), &cfg).unwrap();
        assert!(matches!(c.verdict, CertificateVerdict::Failed { ref reason, .. } if reason == "not timelike"));
    }
}
