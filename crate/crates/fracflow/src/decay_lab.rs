//! Strong and weak L^p norms, Gagliardo seminorms, power-law fitting and
//! the decay experiments built on the solvers.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::PI;

use crate::error::{invalid, Error, Result};
use crate::grid_solver::{assemble_operator, energy_series, evolve, solve_comparison_ode, KernelSpec};
use crate::kernels::{kappa_thresholds, FracParams};
use crate::quadrature::GaussRule;
use crate::special_functions::{gamma, mittag_leffler, ToleranceConfig};
use crate::transform_solver::{solve_forced, Field, ForcingSchedule, SpectralGrid};
use num_complex::Complex64;

/// A norm sampled over time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormSeries {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub p: f64,
    pub weak: bool,
}

impl NormSeries {
    pub fn new(times: Vec<f64>, values: Vec<f64>, p: f64, weak: bool) -> Result<Self> {
        if times.len() != values.len() {
            return Err(invalid("times and values differ in length"));
        }
        if values.iter().any(|v| !(*v >= 0.0)) {
            return Err(invalid("norm values must be nonnegative"));
        }
        if !(p >= 1.0) {
            return Err(invalid("p must be at least 1"));
        }
        Ok(Self { times, values, p, weak })
    }

    /// CSV with columns t, value, p, weak.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,value,p,weak\n");
        for (t, v) in self.times.iter().zip(&self.values) {
            out.push_str(&format!("{t:.16e},{v:.16e},{},{}\n", self.p, self.weak));
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub window: (f64, f64),
}

/// How the fitted exponent is compared with the prediction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    /// |fitted - predicted| ≤ tolerance
    Within,
    /// fitted ≤ predicted + tolerance (the prediction is only an upper bound)
    AtMost,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub alpha: f64,
    pub beta: f64,
    pub d: usize,
    pub predicted: f64,
    pub fitted: f64,
    pub tolerance: f64,
    pub check: Check,
    pub pass: bool,
    pub seed: u64,
    /// secondary diagnostics, keyed by name
    pub details: BTreeMap<String, f64>,
    pub series: Vec<NormSeries>,
}

impl ExperimentReport {
    fn new(experiment: &str, p: &FracParams, predicted: f64, fitted: f64, tolerance: f64, check: Check) -> Self {
        let pass = match check {
            Check::Within => (fitted - predicted).abs() <= tolerance,
            Check::AtMost => fitted <= predicted + tolerance,
        };
        Self {
            experiment: experiment.to_string(),
            alpha: p.alpha,
            beta: p.beta,
            d: p.d,
            predicted,
            fitted,
            tolerance,
            check,
            pass,
            seed: 0,
            details: BTreeMap::new(),
            series: Vec::new(),
        }
    }
}

/// Grid L^p norm; p = ∞ is the largest magnitude.
pub fn lp_norm(field: &Field, p: f64) -> f64 {
    if p.is_infinite() {
        return field.values.iter().fold(0.0, |m, v| m.max(v.abs()));
    }
    let vol = field.grid.cell_volume();
    (vol * field.values.iter().map(|v| v.abs().powf(p)).sum::<f64>()).powf(1.0 / p)
}

/// sup_λ λ |{|f| > λ}|^{1/p} over 64 geometric levels between the
/// smallest and largest nonzero magnitude.
pub fn weak_lp_quasinorm(field: &Field, p: f64) -> Result<f64> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(invalid("weak norms need 1 < p < ∞"));
    }
    let vol = field.grid.cell_volume();
    let mut mags: Vec<f64> = field.values.iter().map(|v| v.abs()).filter(|&v| v > 0.0).collect();
    if mags.is_empty() {
        return Ok(0.0);
    }
    mags.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let (hi, lo) = (mags[0], mags[mags.len() - 1]);
    let levels = 64;
    let mut best: f64 = 0.0;
    for k in 0..levels {
        // the top level sits just below the maximum so the set is nonempty
        let frac = k as f64 / (levels - 1) as f64;
        let lambda = if hi > lo { lo * (hi / lo).powf(frac) } else { hi } * (1.0 - 1e-12);
        let count = mags.partition_point(|&m| m > lambda);
        best = best.max(lambda * (count as f64 * vol).powf(1.0 / p));
    }
    Ok(best)
}

/// (∬ |v(x) - v(y)|^p / |x - y|^{d+sp} dx dy)^{1/p} by a double sum over
/// grid points, with the near-diagonal part replaced by its first-order
/// Taylor value |∇v|^p ∫_{|y|<ρ} |ω·y|^p |y|^{-d-sp} dy (ρ = h/2 in one
/// dimension, the equal-area radius h/√π in two).
pub fn gagliardo_seminorm(field: &Field, s: f64, p: f64) -> Result<f64> {
    if !(s > 0.0 && s < 1.0) {
        return Err(invalid("smoothness must lie in (0, 1)"));
    }
    if !(p == 1.0 || p == 2.0) {
        return Err(invalid("Gagliardo seminorm supports p = 1 or 2"));
    }
    let g = &field.grid;
    let h = g.dx();
    let vol = g.cell_volume();
    let d = g.d as f64;
    let n = g.n;
    let v = &field.values;
    let expo = -(d + s * p) / 2.0;
    let len = g.len();
    let mut total = 0.0;
    for i in 0..len {
        let (ix, iy) = (i / n, i % n);
        for j in (i + 1)..len {
            let diff = (v[i] - v[j]).abs();
            if diff == 0.0 {
                continue;
            }
            let r2 = match g.d {
                1 => ((j - i) as f64 * h).powi(2),
                _ => {
                    let (jx, jy) = (j / n, j % n);
                    (((jx as f64 - ix as f64) * h).powi(2)) + ((jy as f64 - iy as f64) * h).powi(2)
                }
            };
            total += 2.0 * diff.powf(p) * r2.powf(expo);
        }
    }
    total *= vol * vol;
    let (rho, angular) = match (g.d, p as i32) {
        (1, _) => (0.5 * h, 2.0),
        (_, 1) => (h / PI.sqrt(), 4.0),
        _ => (h / PI.sqrt(), PI),
    };
    let local = angular * rho.powf(p - s * p) / (p - s * p);
    // centred differences, one-sided at the edges of the grid
    let slope = |lo: usize, hi: usize, a: f64, b: f64| (b - a) / ((hi - lo) as f64 * h);
    for i in 0..len {
        let grad2 = match g.d {
            1 => {
                let (lo, hi) = (i.saturating_sub(1), (i + 1).min(n - 1));
                slope(lo, hi, v[lo], v[hi]).powi(2)
            }
            _ => {
                let (x, y) = (i / n, i % n);
                let (xl, xh) = (x.saturating_sub(1), (x + 1).min(n - 1));
                let (yl, yh) = (y.saturating_sub(1), (y + 1).min(n - 1));
                let gx = slope(xl, xh, v[xl * n + y], v[xh * n + y]);
                let gy = slope(yl, yh, v[x * n + yl], v[x * n + yh]);
                gx * gx + gy * gy
            }
        };
        total += vol * local * grad2.powf(0.5 * p);
    }
    // pairs with one point off the grid, where the field is zero. In 2D each
    // side is treated as a half-plane, so the corners are counted twice.
    let sp = s * p;
    let side = match g.d {
        1 => 1.0 / sp,
        _ => PI.sqrt() * gamma(0.5 * (1.0 + sp))? / gamma(0.5 * (2.0 + sp))? / sp,
    };
    let (lo, hi) = (-g.half_extent - 0.5 * h, g.coord(n - 1) + 0.5 * h);
    let reach = |x: f64| (x - lo).powf(-sp) + (hi - x).powf(-sp);
    for (i, vi) in v.iter().enumerate() {
        let a = vi.abs().powf(p);
        if a == 0.0 {
            continue;
        }
        let dist = match g.d {
            1 => reach(g.coord(i)),
            _ => reach(g.coord(i / n)) + reach(g.coord(i % n)),
        };
        total += 2.0 * vol * a * side * dist;
    }
    Ok(total.powf(1.0 / p))
}

/// Least-squares slope of ln(value) against ln(t) over the samples with t
/// in the window.
pub fn fit_rate(series: &NormSeries, window: (f64, f64)) -> Result<RateFit> {
    let pts: Vec<(f64, f64)> = series
        .times
        .iter()
        .zip(&series.values)
        .filter(|(t, _)| **t >= window.0 * (1.0 - 1e-12) && **t <= window.1 * (1.0 + 1e-12))
        .map(|(&t, &v)| (t, v))
        .collect();
    if pts.len() < 6 {
        return Err(Error::DegenerateWindow(format!(
            "{} samples in [{}, {}], need at least 6",
            pts.len(),
            window.0,
            window.1
        )));
    }
    if pts.iter().any(|(t, v)| !(*v > 0.0) || !(*t > 0.0)) {
        return Err(Error::DegenerateWindow("nonpositive time or value in window".into()));
    }
    let xs: Vec<f64> = pts.iter().map(|(t, _)| t.ln()).collect();
    let ys: Vec<f64> = pts.iter().map(|(_, v)| v.ln()).collect();
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if !(sxx > 0.0) {
        return Err(Error::DegenerateWindow("all samples share one time".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_tot: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let ss_res: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let r_squared = if ss_tot > 0.0 { (1.0 - ss_res / ss_tot).clamp(0.0, 1.0) } else { 1.0 };
    let lo = pts.first().unwrap().0;
    let hi = pts.last().unwrap().0;
    Ok(RateFit { slope, intercept, r_squared, window: (lo, hi) })
}

/// Sum of Gaussian bumps w·exp(-|x - c|²/σ²).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitialData {
    pub bumps: Vec<Bump>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bump {
    pub weight: f64,
    pub centre: Vec<f64>,
    pub width: f64,
}

impl InitialData {
    pub fn gaussian(d: usize, width: f64) -> Self {
        Self { bumps: vec![Bump { weight: 1.0, centre: vec![0.0; d], width }] }
    }

    pub fn shifted_gaussian(d: usize, width: f64, shift: f64) -> Self {
        let mut centre = vec![0.0; d];
        centre[0] = shift;
        Self { bumps: vec![Bump { weight: 1.0, centre, width }] }
    }

    /// Two equal bumps at ±separation/2 along the first axis.
    pub fn two_bump(d: usize, width: f64, separation: f64) -> Self {
        let bump = |sign: f64| {
            let mut centre = vec![0.0; d];
            centre[0] = sign * 0.5 * separation;
            Bump { weight: 1.0, centre, width }
        };
        Self { bumps: vec![bump(1.0), bump(-1.0)] }
    }

    fn validate(&self, d: usize) -> Result<()> {
        if self.bumps.is_empty() || self.bumps.iter().any(|b| b.centre.len() != d || !(b.width > 0.0)) {
            return Err(invalid("initial data needs bumps with positive width and a centre in R^d"));
        }
        Ok(())
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.bumps
            .iter()
            .map(|b| {
                let r2: f64 = x.iter().zip(&b.centre).map(|(a, c)| (a - c).powi(2)).sum();
                b.weight * (-r2 / (b.width * b.width)).exp()
            })
            .sum()
    }

    pub fn mass(&self) -> f64 {
        self.bumps.iter().map(|b| b.weight * (PI.sqrt() * b.width).powi(b.centre.len() as i32)).sum()
    }

    /// ∫ x u₀ dx
    pub fn first_moment(&self) -> Vec<f64> {
        let d = self.bumps[0].centre.len();
        let mut m = vec![0.0; d];
        for b in &self.bumps {
            let mass = b.weight * (PI.sqrt() * b.width).powi(d as i32);
            for (mi, ci) in m.iter_mut().zip(&b.centre) {
                *mi += mass * ci;
            }
        }
        m
    }

    /// ∫ e^{-i x·ξ} u₀(x) dx
    pub fn hat(&self, xi: &[f64]) -> Complex64 {
        self.bumps
            .iter()
            .map(|b| {
                let d = b.centre.len() as i32;
                let k2: f64 = xi.iter().map(|v| v * v).sum();
                let phase: f64 = xi.iter().zip(&b.centre).map(|(a, c)| a * c).sum();
                let amp = b.weight * (PI.sqrt() * b.width).powi(d) * (-0.25 * b.width * b.width * k2).exp();
                Complex64::from_polar(amp, -phase)
            })
            .sum()
    }

    pub fn sample(&self, grid: SpectralGrid) -> Field {
        Field::from_fn(grid, 0.0, |x| self.eval(x))
    }
}

fn ml_tol() -> ToleranceConfig {
    ToleranceConfig { abs_tol: 1e-16, rel_tol: 1e-12, max_terms: 4000 }
}

/// n log-spaced times covering [lo, hi].
pub fn log_times(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| lo * (hi / lo).powf(k as f64 / (n - 1) as f64)).collect()
}

/// ‖u(t)‖₂ for the free evolution of u₀ on the whole space, by Plancherel:
/// (2π)^{-d} ∫ |û₀(ξ)|² E_{α,1}(-|ξ|^β t^α)² dξ, with the radial integral in
/// ln ρ and the angular one (d = 2) by Gauss-Legendre.
pub fn l2_norm_continuum(p: &FracParams, u0: &InitialData, t: f64) -> Result<f64> {
    u0.validate(p.d)?;
    if p.d > 2 {
        return Err(Error::Unsupported("continuum L2 norm is implemented for d = 1, 2".into()));
    }
    let widest = u0.bumps.iter().map(|b| b.width).fold(0.0, f64::max);
    let narrowest = u0.bumps.iter().map(|b| b.width).fold(f64::INFINITY, f64::min);
    let rho_s = t.powf(-p.alpha / p.beta);
    let lo = (1e-14 * rho_s).min(1e-14 / widest).ln();
    let hi = (12.0 / narrowest).ln();
    let panels = ((hi - lo) * 3.0).ceil() as usize;
    let rule = GaussRule::new(16);
    let angles = GaussRule::new(32);
    let tol = ml_tol();
    let angular = |rho: f64| -> f64 {
        match p.d {
            1 => u0.hat(&[rho]).norm_sqr() + u0.hat(&[-rho]).norm_sqr(),
            _ => angles.integrate(0.0, 2.0 * PI, |th| u0.hat(&[rho * th.cos(), rho * th.sin()]).norm_sqr()),
        }
    };
    let mut total = 0.0;
    let mut failure = None;
    for k in 0..panels {
        let a = lo + (hi - lo) * k as f64 / panels as f64;
        let b = lo + (hi - lo) * (k + 1) as f64 / panels as f64;
        total += rule.integrate(a, b, |s| {
            let rho = s.exp();
            match mittag_leffler(p.alpha, 1.0, -rho.powf(p.beta) * t.powf(p.alpha), &tol) {
                Ok(e) => rho.powi(p.d as i32) * e * e * angular(rho),
                Err(err) => {
                    failure.get_or_insert(err);
                    0.0
                }
            }
        });
    }
    if let Some(err) = failure {
        return Err(err);
    }
    Ok((total / (2.0 * PI).powi(p.d as i32)).sqrt())
}

/// Settings for the optimal L² decay experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OptimalL2Config {
    pub window: (f64, f64),
    pub samples: usize,
    pub tolerance: f64,
    /// points per axis and spacing of the grid used on the d = 2β branch
    pub grid_points: usize,
    pub grid_spacing: f64,
}

impl Default for OptimalL2Config {
    fn default() -> Self {
        Self { window: (10.0, 1e3), samples: 21, tolerance: 0.05, grid_points: 1 << 15, grid_spacing: 1.0 }
    }
}

/// Predicted exponent -α min{1, d/(2β)} of ‖u(t)‖₂ (of the weak L² norm
/// when d = 2β).
pub fn optimal_l2_exponent(p: &FracParams) -> f64 {
    -p.alpha * (p.dim() / (2.0 * p.beta)).min(1.0)
}

/// Fits the L² decay of the free evolution against -α min{1, d/(2β)} and
/// checks that the norm rescaled by the predicted rate stays above a
/// positive floor. At d = 2β the strong norm carries a logarithm, so the
/// weak L² quasinorm of a grid solution is fitted instead (d = 1 only).
pub fn experiment_optimal_l2(p: &FracParams, u0: &InitialData, cfg: &OptimalL2Config) -> Result<ExperimentReport> {
    u0.validate(p.d)?;
    if u0.mass() == 0.0 {
        return Err(invalid("the lower bound needs initial data with nonzero mass"));
    }
    let predicted = optimal_l2_exponent(p);
    let times = log_times(cfg.window.0, cfg.window.1, cfg.samples);
    let series = if p.d_equals_two_beta() {
        if p.d != 1 {
            return Err(Error::Unsupported("the d = 2β branch runs on a one-dimensional grid".into()));
        }
        let half = 0.5 * cfg.grid_points as f64 * cfg.grid_spacing;
        let grid = SpectralGrid::new(1, cfg.grid_points, half)?;
        let start = u0.sample(grid);
        let fields = crate::transform_solver::solve_homogeneous(p, &start, &times)?;
        let values = fields.iter().map(|f| weak_lp_quasinorm(f, 2.0)).collect::<Result<_>>()?;
        NormSeries::new(times.clone(), values, 2.0, true)?
    } else {
        let values = times.iter().map(|&t| l2_norm_continuum(p, u0, t)).collect::<Result<_>>()?;
        NormSeries::new(times.clone(), values, 2.0, false)?
    };
    let fit = fit_rate(&series, cfg.window)?;
    let scaled: Vec<f64> = times.iter().zip(&series.values).map(|(t, v)| v * t.powf(-predicted)).collect();
    let floor = scaled.iter().cloned().fold(f64::INFINITY, f64::min);
    let ceiling = scaled.iter().cloned().fold(0.0, f64::max);
    let mut report = ExperimentReport::new("optimal-l2", p, predicted, fit.slope, cfg.tolerance, Check::Within);
    report.pass &= floor > 0.0;
    report.details.insert("lower_floor".into(), floor);
    report.details.insert("floor_over_ceiling".into(), floor / ceiling);
    report.details.insert("r_squared".into(), fit.r_squared);
    report.details.insert("mass".into(), u0.mass());
    report.series.push(series);
    Ok(report)
}

/// Settings for the convergence-to-MZ experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ConvergenceConfig {
    pub window: (f64, f64),
    pub samples: usize,
    pub tolerance: f64,
    pub grid_points: usize,
    pub half_extent: f64,
    /// largest max/min of the rescaled gap accepted as "bounded"
    pub max_spread: f64,
}

impl Default for ConvergenceConfig {
    fn default() -> Self {
        Self {
            window: (10.0, 300.0),
            samples: 12,
            tolerance: 0.1,
            grid_points: 16384,
            half_extent: 2048.0,
            max_spread: 5.0,
        }
    }
}

/// Tracks g(t) = t^{(αd/β)(1-1/p)} ‖u(t) - M Z(t)‖_p on a one-dimensional
/// periodic grid, where M is the mass of u₀. With a finite first moment
/// g(t)·t^{α/β} should stay bounded; the fitted exponent of g is compared
/// with -α/β and the spread of g·t^{α/β} is reported.
pub fn experiment_convergence_to_z(
    p: &FracParams,
    u0: &InitialData,
    lp: f64,
    cfg: &ConvergenceConfig,
) -> Result<ExperimentReport> {
    u0.validate(p.d)?;
    if p.d != 1 {
        return Err(Error::Unsupported("the convergence experiment runs in one dimension".into()));
    }
    let kappa = kappa_thresholds(p);
    if !(lp >= 1.0 && lp < kappa.kappa1) {
        return Err(invalid(format!("p = {lp} must lie in [1, κ₁) = [1, {})", kappa.kappa1)));
    }
    let grid = SpectralGrid::new(1, cfg.grid_points, cfg.half_extent)?;
    let times = log_times(cfg.window.0, cfg.window.1, cfg.samples);
    let start = u0.sample(grid);
    let mass = start.values.iter().sum::<f64>() * grid.dx();
    // û₀ - M δ̂ with the point mass at the origin, x_{N/2} = 0
    let mut delta = vec![0.0; grid.n];
    delta[grid.n / 2] = mass / grid.dx();
    let diff: Vec<f64> = start.values.iter().zip(&delta).map(|(a, b)| a - b).collect();
    let gap_fields = crate::transform_solver::solve_homogeneous(p, &Field::new(grid, diff, 0.0)?, &times)?;
    let scale = p.alpha * p.dim() / p.beta * (1.0 - 1.0 / lp);
    let values: Vec<f64> = gap_fields.iter().map(|f| f.time.powf(scale) * lp_norm(f, lp)).collect();
    let series = NormSeries::new(times.clone(), values, lp, false)?;
    let fit = fit_rate(&series, cfg.window)?;
    let rescaled: Vec<f64> = times.iter().zip(&series.values).map(|(t, v)| v * t.powf(p.alpha / p.beta)).collect();
    let hi = rescaled.iter().cloned().fold(0.0, f64::max);
    let lo = rescaled.iter().cloned().fold(f64::INFINITY, f64::min);
    let predicted = -p.alpha / p.beta;
    let mut report = ExperimentReport::new("convergence-to-z", p, predicted, fit.slope, cfg.tolerance, Check::Within);
    report.details.insert("mass".into(), mass);
    report.details.insert("first_moment".into(), u0.first_moment()[0]);
    report.details.insert("rescaled_max_over_min".into(), hi / lo);
    report
        .details
        .insert("gap_decreasing".into(), if series.values.last() < series.values.first() { 1.0 } else { 0.0 });
    report.details.insert("max_spread".into(), cfg.max_spread);
    report.series.push(series);
    Ok(report)
}

/// Settings for the forced decay experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ForcedConfig {
    pub window: (f64, f64),
    pub samples: usize,
    pub tolerance: f64,
    pub log_tolerance: f64,
    pub grid_points: usize,
    pub half_extent: f64,
    pub dt: f64,
    pub source_width: f64,
}

impl Default for ForcedConfig {
    fn default() -> Self {
        Self {
            window: (10.0, 1e3),
            samples: 13,
            tolerance: 0.05,
            log_tolerance: 0.07,
            grid_points: 256,
            half_extent: 100.0,
            dt: 0.1,
            source_width: 2.0,
        }
    }
}

/// Predicted exponent α - min{1, γ} - (αd/β)(1/q - 1/r) for the forced
/// problem with zero initial data.
pub fn forced_exponent(p: &FracParams, q: f64, r: f64, gamma: f64) -> f64 {
    p.alpha - gamma.min(1.0) - p.alpha * p.dim() / p.beta * (1.0 / q - 1.0 / r)
}

/// u₀ = 0 and f(t, x) = (1 + t)^{-γ} g(x) with a Gaussian g; fits ‖u(t)‖_r
/// and divides out log(1 + t) when γ = 1.
pub fn experiment_forced(p: &FracParams, q: f64, gamma: f64, lr: f64, cfg: &ForcedConfig) -> Result<ExperimentReport> {
    if p.d != 1 {
        return Err(Error::Unsupported("the forced experiment runs in one dimension".into()));
    }
    if !(gamma > 0.0) || !(q >= 1.0) || !(lr >= q) {
        return Err(invalid("need γ > 0 and 1 ≤ q ≤ r"));
    }
    let grid = SpectralGrid::new(1, cfg.grid_points, cfg.half_extent)?;
    let steps = (cfg.window.1 / cfg.dt).round() as usize;
    let width = cfg.source_width;
    let forcing = ForcingSchedule::separable(
        grid,
        cfg.dt,
        steps,
        |t| (1.0 + t).powf(-gamma),
        |x| (-(x[0] * x[0]) / (width * width)).exp(),
        Some(gamma),
    )?;
    let times: Vec<f64> =
        log_times(cfg.window.0, cfg.window.1, cfg.samples).into_iter().map(|t| (t / cfg.dt).round() * cfg.dt).collect();
    let fields = solve_forced(p, &Field::zeros(grid, 0.0), &forcing, &times, 1e-2)?;
    let log_branch = (gamma - 1.0).abs() < 1e-12;
    let raw: Vec<f64> = fields.iter().map(|f| lp_norm(f, lr)).collect();
    let values =
        if log_branch { raw.iter().zip(&times).map(|(v, t)| v / (1.0 + t).ln()).collect() } else { raw.clone() };
    let series = NormSeries::new(times.clone(), values, lr, false)?;
    let fit = fit_rate(&series, cfg.window)?;
    let tol = if log_branch { cfg.log_tolerance } else { cfg.tolerance };
    let predicted = forced_exponent(p, q, lr, gamma);
    let mut report = ExperimentReport::new("forced", p, predicted, fit.slope, tol, Check::Within);
    report.details.insert("gamma".into(), gamma);
    report.details.insert("q".into(), q);
    report.details.insert("r".into(), lr);
    report.details.insert("log_corrected".into(), if log_branch { 1.0 } else { 0.0 });
    report.details.insert("r_squared".into(), fit.r_squared);
    report.series.push(NormSeries::new(times, raw, lr, false)?);
    report.series.push(series);
    Ok(report)
}

/// Settings for the weak-solution decay experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct WeakDecayConfig {
    pub grid_points: usize,
    pub spacing: f64,
    pub dt: f64,
    pub steps: usize,
    pub window: (f64, f64),
    pub tolerance: f64,
    /// λ/Λ of the randomly modulated kernel; 1 is the exact fractional Laplacian
    pub ratio: f64,
    pub seed: u64,
    pub initial_width: f64,
    /// share of steps on which ‖u‖₂ must stay below the comparison solution
    pub domination_share: f64,
    pub ode_tolerance: f64,
}

impl Default for WeakDecayConfig {
    fn default() -> Self {
        Self {
            grid_points: 512,
            spacing: 0.5,
            dt: 0.5,
            steps: 2000,
            window: (10.0, 1e3),
            tolerance: 0.1,
            ratio: 1.0,
            seed: 7,
            initial_width: 2.0,
            domination_share: 0.95,
            ode_tolerance: 0.05,
        }
    }
}

/// Upper bound -αd/(d + 2β) on the L² decay exponent of weak solutions.
pub fn weak_decay_exponent(p: &FracParams) -> f64 {
    -p.alpha * p.dim() / (p.dim() + 2.0 * p.beta)
}

/// Runs the grid solver with the exact or a randomly modulated kernel,
/// fits the L² decay against the upper bound, and compares the norms with
/// the comparison equation ∂_t^α(w - w₀) + μ w^γ = 0 whose μ comes from the
/// measured Nash constant.
pub fn experiment_weak_decay(p: &FracParams, cfg: &WeakDecayConfig) -> Result<ExperimentReport> {
    if p.d != 1 {
        return Err(Error::Unsupported("the grid solver is one dimensional".into()));
    }
    let half = 0.5 * cfg.grid_points as f64 * cfg.spacing;
    let grid = SpectralGrid::new(1, cfg.grid_points, half)?;
    let kernel = if cfg.ratio == 1.0 {
        KernelSpec::fractional_laplacian(p.beta)?
    } else {
        KernelSpec::perturbed(p.beta, cfg.ratio, half + cfg.spacing, cfg.seed)?
    };
    let op = assemble_operator(&kernel, grid)?;
    let width = cfg.initial_width;
    let u0 = Field::from_fn(grid, 0.0, |x| (-(x[0] * x[0]) / (width * width)).exp());
    let states = evolve(p, &op, &u0, cfg.dt, cfg.steps)?;
    let energy = energy_series(p, &op, &states, 1e-12)?;
    let norms = &energy.norms;
    let fit = fit_rate(norms, cfg.window)?;
    let predicted = weak_decay_exponent(p);
    let w = solve_comparison_ode(p.alpha, energy.mu, energy.gamma, norms.values[0], &norms.times)?;
    let dominated = norms.values.iter().zip(&w).skip(1).filter(|(u, w)| **u <= **w * (1.0 + 1e-9)).count();
    let share = dominated as f64 / (w.len() - 1) as f64;
    let ode_series = NormSeries::new(norms.times.clone(), w, 2.0, false)?;
    let ode_fit = fit_rate(&ode_series, cfg.window)?;
    let ode_predicted = -p.alpha / energy.gamma;
    // time integral of the W^{β/2,1} seminorm on 21 sampled states
    let stride = (cfg.steps / 20).max(1);
    let sampled: Vec<(f64, f64)> = states
        .iter()
        .step_by(stride)
        .map(|s| Ok((s.time, gagliardo_seminorm(s, 0.5 * p.beta, 1.0)?)))
        .collect::<Result<_>>()?;
    let seminorm_integral: f64 = sampled.windows(2).map(|w| 0.5 * (w[1].0 - w[0].0) * (w[0].1 + w[1].1)).sum();

    let mut report = ExperimentReport::new("weak-decay", p, predicted, fit.slope, cfg.tolerance, Check::AtMost);
    report.seed = cfg.seed;
    report.pass &= share >= cfg.domination_share && (ode_fit.slope - ode_predicted).abs() <= cfg.ode_tolerance;
    report.details.insert("kernel_ratio".into(), cfg.ratio);
    report.details.insert("nash_constant".into(), energy.nash_constant);
    report.details.insert("mu".into(), energy.mu);
    report.details.insert("energy_inequality_share".into(), energy.fraction_satisfied);
    report.details.insert("domination_share".into(), share);
    report.details.insert("ode_slope".into(), ode_fit.slope);
    report.details.insert("ode_predicted".into(), ode_predicted);
    report.details.insert("seminorm_time_integral".into(), seminorm_integral);
    report.details.insert("final_mass".into(), states.last().unwrap().values.iter().sum::<f64>() * grid.dx());
    report.series.push(energy.norms.clone());
    report.series.push(ode_series);
    Ok(report)
}

/// Runs free evolution of u₀ on a grid and returns the field at each time;
/// a convenience wrapper shared by the command line.
pub fn free_evolution(p: &FracParams, u0: &InitialData, grid: SpectralGrid, times: &[f64]) -> Result<Vec<Field>> {
    u0.validate(p.d)?;
    crate::transform_solver::solve_homogeneous(p, &u0.sample(grid), times)
}
