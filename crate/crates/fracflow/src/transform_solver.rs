//! Mild solutions u = Z⋆u₀ + ∫Y(t-s)⋆f(s) ds computed mode by mode on a
//! periodic grid, plus radial inversion of the Fourier multiplier used to
//! cross-check the kernels.

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::f64::consts::PI;

use crate::error::{invalid, Error, Result};
use crate::kernels::FracParams;
use crate::quadrature::{tanh_sinh, wynn_epsilon};
use crate::special_functions::{gl_weights, mittag_leffler, ToleranceConfig};

/// Uniform periodic grid on [-L, L)^d with N points per axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralGrid {
    pub d: usize,
    pub n: usize,
    pub half_extent: f64,
}

impl SpectralGrid {
    pub fn new(d: usize, n: usize, half_extent: f64) -> Result<Self> {
        if !(d == 1 || d == 2) {
            return Err(invalid("spectral grids support d = 1 or 2"));
        }
        if n < 32 || !n.is_power_of_two() {
            return Err(invalid("points per axis must be a power of two, at least 32"));
        }
        if !(half_extent > 0.0) {
            return Err(invalid("half extent must be positive"));
        }
        Ok(Self { d, n, half_extent })
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.half_extent / self.n as f64
    }

    pub fn cell_volume(&self) -> f64 {
        self.dx().powi(self.d as i32)
    }

    pub fn len(&self) -> usize {
        self.n.pow(self.d as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn coord(&self, j: usize) -> f64 {
        -self.half_extent + j as f64 * self.dx()
    }

    /// Coordinates of flat index `idx` (row-major, last axis fastest).
    pub fn point(&self, idx: usize) -> Vec<f64> {
        match self.d {
            1 => vec![self.coord(idx)],
            _ => vec![self.coord(idx / self.n), self.coord(idx % self.n)],
        }
    }

    /// Signed integer frequency index of position k along an axis.
    pub fn signed_index(&self, k: usize) -> i64 {
        if k < self.n / 2 {
            k as i64
        } else {
            k as i64 - self.n as i64
        }
    }

    /// Wavenumber π k / L.
    pub fn wavenumber(&self, k: usize) -> f64 {
        PI * self.signed_index(k) as f64 / self.half_extent
    }

    /// Σ k_i² over axes for flat mode index `idx`.
    fn index_norm2(&self, idx: usize) -> i64 {
        match self.d {
            1 => self.signed_index(idx).pow(2),
            _ => self.signed_index(idx / self.n).pow(2) + self.signed_index(idx % self.n).pow(2),
        }
    }

    /// |ξ| for flat mode index `idx`.
    pub fn mode_norm(&self, idx: usize) -> f64 {
        (self.index_norm2(idx) as f64).sqrt() * PI / self.half_extent
    }

    /// Largest |k| along any axis for flat mode index `idx`.
    fn max_axis_index(&self, idx: usize) -> i64 {
        match self.d {
            1 => self.signed_index(idx).abs(),
            _ => self.signed_index(idx / self.n).abs().max(self.signed_index(idx % self.n).abs()),
        }
    }
}

/// Samples of a function on a spectral grid at a given time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Field {
    pub grid: SpectralGrid,
    pub values: Vec<f64>,
    pub time: f64,
}

impl Field {
    pub fn new(grid: SpectralGrid, values: Vec<f64>, time: f64) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(invalid("field length does not match grid"));
        }
        if !(time >= 0.0) {
            return Err(invalid("field time must be nonnegative"));
        }
        Ok(Self { grid, values, time })
    }

    pub fn from_fn(grid: SpectralGrid, time: f64, f: impl Fn(&[f64]) -> f64) -> Self {
        let values = (0..grid.len()).map(|i| f(&grid.point(i))).collect();
        Self { grid, values, time }
    }

    pub fn zeros(grid: SpectralGrid, time: f64) -> Self {
        Self { grid, values: vec![0.0; grid.len()], time }
    }
}

/// Source term sampled at increasing times starting at 0; linear in time
/// between samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForcingSchedule {
    pub times: Vec<f64>,
    pub fields: Vec<Field>,
    /// decay exponent γ in ‖f(t)‖₁ ≲ (1+t)^{-γ}, when known
    pub decay: Option<f64>,
}

impl ForcingSchedule {
    pub fn new(times: Vec<f64>, fields: Vec<Field>, decay: Option<f64>) -> Result<Self> {
        if times.len() < 2 || times.len() != fields.len() {
            return Err(invalid("forcing needs at least two samples, one field per time"));
        }
        if times[0] != 0.0 || times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(invalid("forcing times must start at 0 and increase strictly"));
        }
        let grid = fields[0].grid;
        if fields.iter().any(|f| f.grid != grid) {
            return Err(invalid("forcing fields must share one grid"));
        }
        let h = times[1];
        if times.iter().enumerate().any(|(k, &t)| (t - k as f64 * h).abs() > 1e-9 * (1.0 + t)) {
            return Err(invalid("forcing times must be uniformly spaced"));
        }
        Ok(Self { times, fields, decay })
    }

    /// Samples g(t) h(x) on a uniform time grid with `steps` intervals of width dt.
    pub fn separable(
        grid: SpectralGrid,
        dt: f64,
        steps: usize,
        temporal: impl Fn(f64) -> f64,
        spatial: impl Fn(&[f64]) -> f64,
        decay: Option<f64>,
    ) -> Result<Self> {
        let shape = Field::from_fn(grid, 0.0, spatial);
        let times: Vec<f64> = (0..=steps).map(|k| k as f64 * dt).collect();
        let fields = times
            .iter()
            .map(|&t| {
                let g = temporal(t);
                Field { grid, values: shape.values.iter().map(|v| g * v).collect(), time: t }
            })
            .collect();
        Self::new(times, fields, decay)
    }

    pub fn step(&self) -> f64 {
        self.times[1]
    }
}

/// Radial samples r ↦ value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    pub r: Vec<f64>,
    pub values: Vec<f64>,
    pub time: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub mass: f64,
    /// ∫ x u dx (its Euclidean length in d = 2)
    pub first_moment: f64,
    /// ∫ |x| |u| dx
    pub abs_first_moment: f64,
}

fn ml_tol() -> ToleranceConfig {
    ToleranceConfig { abs_tol: 1e-15, rel_tol: 1e-12, max_terms: 4000 }
}

/// Unnormalised forward DFT of a real field (row-major for d = 2).
pub fn forward(grid: &SpectralGrid, values: &[f64]) -> Vec<Complex64> {
    let mut data: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    transform(grid, &mut data, false);
    data
}

/// Inverse DFT including the 1/N^d factor; returns the real part.
pub fn inverse(grid: &SpectralGrid, mut data: Vec<Complex64>) -> Vec<f64> {
    transform(grid, &mut data, true);
    let scale = 1.0 / grid.len() as f64;
    data.iter().map(|c| c.re * scale).collect()
}

fn transform(grid: &SpectralGrid, data: &mut [Complex64], inverse: bool) {
    let n = grid.n;
    let mut planner = FftPlanner::new();
    let fft = if inverse { planner.plan_fft_inverse(n) } else { planner.plan_fft_forward(n) };
    match grid.d {
        1 => fft.process(data),
        _ => {
            for row in data.chunks_mut(n) {
                fft.process(row);
            }
            let mut col = vec![Complex64::new(0.0, 0.0); n];
            for c in 0..n {
                for r in 0..n {
                    col[r] = data[r * n + c];
                }
                fft.process(&mut col);
                for r in 0..n {
                    data[r * n + c] = col[r];
                }
            }
        }
    }
}

/// Distinct Σk² values over the grid's modes, with a lookup from each mode.
fn mode_classes(grid: &SpectralGrid) -> (Vec<i64>, Vec<usize>) {
    let mut index: HashMap<i64, usize> = HashMap::new();
    let mut classes = Vec::new();
    let lookup = (0..grid.len())
        .map(|i| {
            let k2 = grid.index_norm2(i);
            *index.entry(k2).or_insert_with(|| {
                classes.push(k2);
                classes.len() - 1
            })
        })
        .collect();
    (classes, lookup)
}

fn lambda_of(grid: &SpectralGrid, k2: i64, beta: f64) -> f64 {
    ((k2 as f64).sqrt() * PI / grid.half_extent).powf(beta)
}

fn check_times(times: &[f64]) -> Result<()> {
    if times.is_empty() || times.iter().any(|&t| !(t > 0.0)) || times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(invalid("times must be positive and strictly increasing"));
    }
    Ok(())
}

/// The first nonzero frequency π/L must resolve the kernel width t^{α/β}
/// in ξ at the latest requested time.
fn check_resolution(p: &FracParams, grid: &SpectralGrid, t_max: f64) -> Result<()> {
    let dxi = PI / grid.half_extent;
    let width = t_max.powf(-p.alpha / p.beta);
    if dxi > width {
        return Err(Error::GridTooCoarse(format!(
            "frequency spacing {dxi:.3e} exceeds kernel width {width:.3e} at t = {t_max}"
        )));
    }
    Ok(())
}

/// u(t) = Z(t)⋆u₀ at each requested time: û(t, ξ) = E_{α,1}(-|ξ|^β t^α) û₀(ξ).
pub fn solve_homogeneous(p: &FracParams, u0: &Field, times: &[f64]) -> Result<Vec<Field>> {
    check_times(times)?;
    let grid = u0.grid;
    if grid.d != p.d {
        return Err(invalid("grid dimension differs from d"));
    }
    check_resolution(p, &grid, *times.last().unwrap())?;
    let u0_hat = forward(&grid, &u0.values);
    let (classes, lookup) = mode_classes(&grid);
    times
        .iter()
        .map(|&t| {
            let mult: Vec<f64> = classes
                .par_iter()
                .map(|&k2| {
                    let x = lambda_of(&grid, k2, p.beta) * t.powf(p.alpha);
                    mittag_leffler(p.alpha, 1.0, -x, &ml_tol())
                })
                .collect::<Result<_>>()?;
            let data = u0_hat.iter().zip(&lookup).map(|(c, &l)| c * mult[l]).collect();
            Ok(Field { grid, values: inverse(&grid, data), time: t })
        })
        .collect()
}

/// Per-mode weights for product integration of ∫₀^{t_n} k(t_n - s) f(s) ds
/// with k(τ) = τ^{α-1} E_{α,α}(-λτ^α) and f linear between samples:
/// A(τ) = τ^α E_{α,α+1}(-λτ^α) and C(τ) = τ^{α+1} E_{α,α+2}(-λτ^α) are the
/// first and second primitives of k.
fn primitives(alpha: f64, lambda: f64, h: f64, m: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut a = vec![0.0; m + 1];
    let mut c = vec![0.0; m + 1];
    let tol = ml_tol();
    for k in 1..=m {
        let tau = k as f64 * h;
        let x = lambda * tau.powf(alpha);
        a[k] = tau.powf(alpha) * mittag_leffler(alpha, alpha + 1.0, -x, &tol)?;
        c[k] = tau.powf(alpha + 1.0) * mittag_leffler(alpha, alpha + 2.0, -x, &tol)?;
    }
    Ok((a, c))
}

/// ∫₀^{t_n} k(t_n - s) f(s) ds for samples f_0..f_n at spacing h, using the
/// primitives for step multiples `stride`·h.
fn duhamel(f: &[Complex64], n: usize, stride: usize, h: f64, a: &[f64], c: &[f64]) -> Complex64 {
    let hs = h * stride as f64;
    let steps = n / stride;
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..steps {
        // interval [s_j, s_{j+1}], τ_j = t_n - s_j
        let kj = (steps - j) * stride;
        let kj1 = kj - stride;
        let da = a[kj] - a[kj1];
        let db = (kj as f64 * h * a[kj] - c[kj]) - (kj1 as f64 * h * a[kj1] - c[kj1]);
        let fj = f[j * stride];
        let fj1 = f[(j + 1) * stride];
        acc += fj1 * da + (fj - fj1) / hs * (db - kj1 as f64 * h * da);
    }
    acc
}

/// Mild solution with a source term. Output times must lie on the forcing
/// grid. The Duhamel integral is recomputed with every other forcing
/// sample and the solve fails with QuadratureUnderResolved when the two
/// differ by more than `refinement_tol` relative to the field's ℓ² size.
pub fn solve_forced(
    p: &FracParams,
    u0: &Field,
    forcing: &ForcingSchedule,
    times: &[f64],
    refinement_tol: f64,
) -> Result<Vec<Field>> {
    check_times(times)?;
    let grid = u0.grid;
    if forcing.fields[0].grid != grid || grid.d != p.d {
        return Err(invalid("forcing, initial data and d must share one grid"));
    }
    let h = forcing.step();
    let steps: Vec<usize> = times
        .iter()
        .map(|&t| {
            let k = (t / h).round();
            if (k * h - t).abs() > 1e-9 * (1.0 + t) || k as usize >= forcing.times.len() {
                Err(invalid(format!("output time {t} is not on the forcing grid")))
            } else {
                Ok(k as usize)
            }
        })
        .collect::<Result<_>>()?;
    let homogeneous = solve_homogeneous(p, u0, times)?;
    let m = *steps.last().unwrap();
    let f_hat: Vec<Vec<Complex64>> = forcing.fields[..=m].iter().map(|f| forward(&grid, &f.values)).collect();
    let (classes, lookup) = mode_classes(&grid);
    let len = grid.len();
    // per output time and mode, the Duhamel term at steps h and 2h
    let per_class: Vec<(Vec<f64>, Vec<f64>)> =
        classes.par_iter().map(|&k2| primitives(p.alpha, lambda_of(&grid, k2, p.beta), h, m)).collect::<Result<_>>()?;
    let mut out = Vec::with_capacity(times.len());
    for (field, &n) in homogeneous.into_iter().zip(&steps) {
        let mut fine = vec![Complex64::new(0.0, 0.0); len];
        let mut coarse = vec![Complex64::new(0.0, 0.0); len];
        let check = n % 2 == 0 && n >= 4;
        let mut series = vec![Complex64::new(0.0, 0.0); n + 1];
        for i in 0..len {
            for (j, s) in series.iter_mut().enumerate() {
                *s = f_hat[j][i];
            }
            let (a, c) = &per_class[lookup[i]];
            fine[i] = duhamel(&series, n, 1, h, a, c);
            if check {
                coarse[i] = duhamel(&series, n, 2, h, a, c);
            }
        }
        let fine_x = inverse(&grid, fine);
        if check {
            let coarse_x = inverse(&grid, coarse);
            let diff: f64 = fine_x.iter().zip(&coarse_x).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            let size: f64 = fine_x.iter().map(|a| a * a).sum::<f64>().sqrt();
            if diff > refinement_tol * size.max(f64::MIN_POSITIVE) {
                return Err(Error::QuadratureUnderResolved(format!(
                    "forcing step {h} changes the solution at t = {} by {:.2e} (relative)",
                    field.time,
                    diff / size
                )));
            }
        }
        let values = field.values.iter().zip(&fine_x).map(|(u, v)| u + v).collect();
        out.push(Field { grid, values, time: field.time });
    }
    Ok(out)
}

/// Sup over modes with |k| < N/4 and over snapshots with t ≥ T/2 of
/// |∂_t^α(û - û₀) + |ξ|^β û - f̂|, with Fourier coefficients scaled by the
/// cell volume and the fractional derivative discretised by Grünwald-
/// Letnikov differences. `solution` holds u at t_k = k·dt, k = 1..n; the
/// forcing, when present, is sampled at the same times (index 0 is t = 0).
pub fn residual(p: &FracParams, u0: &Field, solution: &[Field], forcing: Option<&ForcingSchedule>) -> Result<f64> {
    if solution.len() < 8 {
        return Err(invalid("residual needs at least 8 snapshots"));
    }
    let grid = u0.grid;
    let dt = solution[0].time;
    if !(dt > 0.0)
        || solution.iter().enumerate().any(|(k, s)| (s.time - (k + 1) as f64 * dt).abs() > 1e-9 * (1.0 + s.time))
    {
        return Err(invalid("snapshots must sit at t_k = k dt"));
    }
    if let Some(f) = forcing {
        if f.fields.len() < solution.len() + 1 || (f.step() - dt).abs() > 1e-9 * dt {
            return Err(invalid("forcing must be sampled at the snapshot times"));
        }
    }
    let vol = grid.cell_volume();
    let u0_hat = forward(&grid, &u0.values);
    let hats: Vec<Vec<Complex64>> = solution.iter().map(|s| forward(&grid, &s.values)).collect();
    let f_hats: Option<Vec<Vec<Complex64>>> =
        forcing.map(|f| f.fields[..=solution.len()].iter().map(|x| forward(&grid, &x.values)).collect());
    let n = solution.len();
    let w = gl_weights(p.alpha, n);
    let scale = dt.powf(-p.alpha);
    let t_end = solution[n - 1].time;
    let mut worst: f64 = 0.0;
    for i in 0..grid.len() {
        if grid.max_axis_index(i) >= (grid.n / 4) as i64 {
            continue;
        }
        let lambda = grid.mode_norm(i).powf(p.beta);
        for m in 1..=n {
            if (m as f64) * dt < 0.5 * t_end {
                continue;
            }
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..m {
                acc += w[k] * (hats[m - 1 - k][i] - u0_hat[i]);
            }
            let mut r = acc * scale + lambda * hats[m - 1][i];
            if let Some(fh) = &f_hats {
                r -= fh[m][i];
            }
            worst = worst.max(r.norm() * vol);
        }
    }
    Ok(worst)
}

/// Bessel J₀: power series below 12, Hankel expansion above.
pub fn bessel_j0(x: f64) -> f64 {
    let x = x.abs();
    if x < 12.0 {
        let q = -0.25 * x * x;
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..80 {
            term *= q / (k * k) as f64;
            sum += term;
            if term.abs() < 1e-17 * sum.abs().max(1e-300) {
                break;
            }
        }
        return sum;
    }
    // P ~ Σ (-1)^k a_{2k} / x^{2k}, Q ~ -Σ (-1)^k a_{2k+1} / x^{2k+1}, a_k = Π(2j-1)²/(k! 8^k)
    let mut p = 1.0;
    let mut q = 0.0;
    let mut a = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..60 {
        let c = (2 * k - 1) as f64;
        a *= c * c / (k as f64 * 8.0 * x);
        if a > last {
            break;
        }
        last = a;
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 1 {
            q -= sign * a;
        } else {
            p += sign * a;
        }
        if a < 1e-17 {
            break;
        }
    }
    let chi = x - 0.25 * PI;
    (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

/// Inverse Fourier transform of Ẑ(t, ·) at radius r > 0, by panel
/// integration between sign changes and Wynn acceleration of the
/// alternating tail.
fn radial_inverse(p: &FracParams, t: f64, r: f64) -> Result<f64> {
    let (a, b) = (p.alpha, p.beta);
    let tol = ml_tol();
    let ta = t.powf(a);
    let e1 = |xi: f64| mittag_leffler(a, 1.0, -xi.powf(b) * ta, &tol);
    // integrand and the phase offset of its sign changes
    let (f, offset): (Box<dyn Fn(f64) -> Result<f64>>, f64) = match p.d {
        1 => (Box::new(move |xi: f64| Ok((xi * r).cos() * e1(xi)?)), 0.5),
        2 => (Box::new(move |xi: f64| Ok(bessel_j0(xi * r) * e1(xi)? * xi)), 0.75),
        3 => (
            Box::new(move |xi: f64| {
                let x = xi.powf(b) * ta;
                let ea = mittag_leffler(a, a, -x, &tol)?;
                Ok((xi * r).cos() * (e1(xi)? - b / a * x * ea))
            }),
            0.5,
        ),
        _ => return Err(invalid("radial inversion supports d = 1, 2, 3")),
    };
    let prefactor = match p.d {
        1 => 1.0 / PI,
        2 => 1.0 / (2.0 * PI),
        _ => 1.0 / (2.0 * PI * PI * r * r),
    };
    let period = PI / r;
    // bulk: up to where the multiplier has decayed to its algebraic tail
    let scale = t.powf(-a / b);
    let bulk_end = (offset + (8.0 * scale / period).ceil()) * period;
    let sub = ((bulk_end / (0.25 * scale.min(period))).ceil() as usize).clamp(1, 4000);
    let mut err_flag: Option<Error> = None;
    let mut integrate = |lo: f64, hi: f64| -> f64 {
        let q = tanh_sinh(
            |x, _| match f(x) {
                Ok(v) => v,
                Err(e) => {
                    err_flag.get_or_insert(e);
                    0.0
                }
            },
            lo,
            hi,
            1e-12,
        );
        q.value
    };
    let mut total = 0.0;
    let w = bulk_end / sub as f64;
    for k in 0..sub {
        total += integrate(k as f64 * w, (k + 1) as f64 * w);
    }
    let mut partial = Vec::new();
    let mut lo = bulk_end;
    let mut tail = 0.0;
    for _ in 0..40 {
        let hi = lo + period;
        tail += integrate(lo, hi);
        partial.push(total + tail);
        lo = hi;
    }
    if let Some(e) = err_flag {
        return Err(e);
    }
    let (value, err) = wynn_epsilon(&partial);
    if !(err <= 1e-9 * value.abs().max(1e-300) + 1e-14) {
        return Err(Error::QuadratureUnderResolved(format!(
            "oscillatory tail at r = {r} not converged (estimate {err:.2e})"
        )));
    }
    Ok(prefactor * value)
}

/// Z(t, r) obtained from its Fourier transform by radial quadrature.
pub fn radial_profile_from_hat(p: &FracParams, t: f64, r_grid: &[f64]) -> Result<RadialProfile> {
    if !(t > 0.0) {
        return Err(invalid("time must be positive"));
    }
    if r_grid.iter().any(|&r| !(r > 0.0)) {
        return Err(invalid("radial inversion needs r > 0"));
    }
    let values = r_grid.iter().map(|&r| radial_inverse(p, t, r)).collect::<Result<_>>()?;
    Ok(RadialProfile { r: r_grid.to_vec(), values, time: t })
}

/// Mass and first moments by the trapezoid (cell-sum) rule.
pub fn moments(field: &Field) -> Moments {
    let g = &field.grid;
    let vol = g.cell_volume();
    let mut mass = 0.0;
    let mut first = vec![0.0; g.d];
    let mut abs_first = 0.0;
    for (i, &u) in field.values.iter().enumerate() {
        let x = g.point(i);
        mass += u;
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        for (acc, xi) in first.iter_mut().zip(&x) {
            *acc += xi * u;
        }
        abs_first += norm * u.abs();
    }
    let first_len = if g.d == 1 { first[0] } else { first.iter().map(|v| v * v).sum::<f64>().sqrt() };
    Moments { mass: mass * vol, first_moment: first_len * vol, abs_first_moment: abs_first * vol }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bessel_j0_reference_values() {
        // J0(1), J0(10), J0(30)
        assert!((bessel_j0(1.0) - 0.765_197_686_557_966_6).abs() < 1e-14);
        assert!((bessel_j0(10.0) - (-0.245_935_764_451_348_3)).abs() < 1e-12);
        assert!((bessel_j0(30.0) - (-0.086_367_983_581_040_23)).abs() < 1e-13);
        assert!((bessel_j0(12.0) - 0.047_689_310_796_833_54).abs() < 1e-12);
    }

    #[test]
    fn plancherel_with_unnormalised_transform() {
        let g = SpectralGrid::new(2, 32, 3.0).unwrap();
        let f = Field::from_fn(g, 0.0, |x| (-(x[0] * x[0]) - 0.5 * x[1]).exp() * (x[1] + 0.3));
        let hat = forward(&g, &f.values);
        let lhs: f64 = f.values.iter().map(|v| v * v).sum();
        let rhs: f64 = hat.iter().map(|c| c.norm_sqr()).sum::<f64>() / g.len() as f64;
        assert!((lhs - rhs).abs() < 1e-10 * lhs);
        let back = inverse(&g, hat);
        assert!(back.iter().zip(&f.values).all(|(a, b)| (a - b).abs() < 1e-12));
    }
}
