//! Direct time stepping for ∂_t^α(u - u₀) + L u = 0 with a nonlocal
//! operator L built from a general measurable kernel, plus the scalar
//! comparison equation used by the energy argument.
//!
//! The spatial grid is one dimensional; the domain is the union of the
//! grid cells and u vanishes outside it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::fmt;
use std::sync::Arc;

use crate::decay_lab::NormSeries;
use crate::error::{invalid, Error, Result};
use crate::kernels::FracParams;
use crate::quadrature::GaussRule;
use crate::special_functions::{gamma, gl_weights, rgamma};
use crate::transform_solver::{Field, SpectralGrid};

type KernelFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Normalising constant of the fractional Laplacian kernel in d dimensions.
pub fn fractional_laplacian_constant(d: usize, beta: f64) -> Result<f64> {
    let df = d as f64;
    Ok(beta * 2f64.powf(beta - 1.0) * gamma(0.5 * (df + beta))?
        / (std::f64::consts::PI.powf(0.5 * df) * gamma(1.0 - 0.5 * beta)?))
}

/// Symmetric jump kernel K(x, y) with λ|x-y|^{-1-β} ≤ K ≤ Λ|x-y|^{-1-β}.
#[derive(Clone)]
pub struct KernelSpec {
    pub beta: f64,
    pub lambda: f64,
    pub upper: f64,
    kernel: KernelFn,
    pub symmetric: bool,
}

impl fmt::Debug for KernelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("KernelSpec")
            .field("beta", &self.beta)
            .field("lambda", &self.lambda)
            .field("upper", &self.upper)
            .field("symmetric", &self.symmetric)
            .finish()
    }
}

impl KernelSpec {
    /// Wraps an arbitrary kernel and spot-checks the two-sided bound on
    /// 1000 random pairs from [-extent, extent].
    pub fn new(
        beta: f64,
        lambda: f64,
        upper: f64,
        kernel: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        symmetric: bool,
        extent: f64,
        seed: u64,
    ) -> Result<Self> {
        if !(beta > 0.0 && beta < 2.0) {
            return Err(invalid("kernel order must lie in (0, 2)"));
        }
        if !(lambda > 0.0 && lambda <= upper && upper.is_finite()) {
            return Err(invalid("kernel bounds need 0 < λ ≤ Λ < ∞"));
        }
        let spec = Self { beta, lambda, upper, kernel: Arc::new(kernel), symmetric };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..1000 {
            let x = rng.gen_range(-extent..extent);
            let y = rng.gen_range(-extent..extent);
            if x == y {
                continue;
            }
            let m = spec.modulation(x, y);
            if !(m >= lambda * (1.0 - 1e-12) && m <= upper * (1.0 + 1e-12)) {
                return Err(Error::KernelBoundViolation(format!(
                    "K(x,y)|x-y|^(1+β) = {m:.6e} outside [{lambda:.6e}, {upper:.6e}] at ({x:.4}, {y:.4})"
                )));
            }
        }
        Ok(spec)
    }

    /// The exact fractional Laplacian kernel, λ = Λ = C(1, β).
    pub fn fractional_laplacian(beta: f64) -> Result<Self> {
        let c = fractional_laplacian_constant(1, beta)?;
        Self::new(beta, c, c, move |x, y| c * (x - y).abs().powf(-1.0 - beta), true, 1.0, 0)
    }

    /// C(1, β)|x-y|^{-1-β} times a random factor in [ratio, 1] that is
    /// constant on unit squares of the (x, y) plane and symmetric.
    pub fn perturbed(beta: f64, ratio: f64, extent: f64, seed: u64) -> Result<Self> {
        if !(ratio > 0.0 && ratio <= 1.0) {
            return Err(invalid("perturbation ratio must lie in (0, 1]"));
        }
        let c = fractional_laplacian_constant(1, beta)?;
        let cells = (2.0 * extent).ceil() as usize + 2;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut table = vec![0.0; cells * cells];
        for i in 0..cells {
            for j in 0..=i {
                let v = rng.gen_range(ratio..=1.0);
                table[i * cells + j] = v;
                table[j * cells + i] = v;
            }
        }
        let cell = move |x: f64| ((x + extent).floor().max(0.0) as usize).min(cells - 1);
        let kernel = move |x: f64, y: f64| c * table[cell(x) * cells + cell(y)] * (x - y).abs().powf(-1.0 - beta);
        Self::new(beta, ratio * c, c, kernel, true, extent, seed ^ 0x5eed)
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        (self.kernel)(x, y)
    }

    /// K(x, y)|x - y|^{1+β}
    fn modulation(&self, x: f64, y: f64) -> f64 {
        self.eval(x, y) * (x - y).abs().powf(1.0 + self.beta)
    }
}

/// Dense discretisation of the principal-value operator
/// (L u)(x) = ∫ (u(x) - u(y)) K(x, y) dy on the grid cells, plus the
/// exterior contribution u(x)∫_{outside} K(x, y) dy kept on the diagonal.
#[derive(Debug, Clone)]
pub struct NonlocalOperator {
    pub grid: SpectralGrid,
    /// symmetric off-diagonal weights, row-major
    pub weights: Vec<f64>,
    /// Σ_j weights[i][j]
    pub row_sums: Vec<f64>,
    /// exterior absorption per point
    pub far_field: Vec<f64>,
}

impl NonlocalOperator {
    pub fn n(&self) -> usize {
        self.grid.n
    }

    /// Principal-value part only; annihilates constants.
    pub fn apply_interior(&self, u: &[f64]) -> Vec<f64> {
        let n = self.n();
        (0..n)
            .into_par_iter()
            .map(|i| {
                let row = &self.weights[i * n..(i + 1) * n];
                self.row_sums[i] * u[i] - row.iter().zip(u).map(|(w, v)| w * v).sum::<f64>()
            })
            .collect()
    }

    pub fn apply(&self, u: &[f64]) -> Vec<f64> {
        let mut out = self.apply_interior(u);
        for ((o, f), v) in out.iter_mut().zip(&self.far_field).zip(u) {
            *o += f * v;
        }
        out
    }

    /// ⟨u, L u⟩ with the cell-volume factor; nonnegative.
    pub fn quadratic_form(&self, u: &[f64]) -> f64 {
        self.grid.dx() * u.iter().zip(self.apply(u)).map(|(a, b)| a * b).sum::<f64>()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        let n = self.n();
        (0..n).map(|i| self.row_sums[i] - self.weights[i * n + i] + self.far_field[i]).collect()
    }

    /// Second-difference Laplacian with zero exterior values; the β → 2
    /// surrogate.
    pub fn discrete_laplacian(grid: SpectralGrid) -> Result<Self> {
        check_grid(&grid)?;
        let n = grid.n;
        let h2 = grid.dx().powi(2);
        let mut weights = vec![0.0; n * n];
        for i in 0..n - 1 {
            weights[i * n + i + 1] = 1.0 / h2;
            weights[(i + 1) * n + i] = 1.0 / h2;
        }
        let row_sums = (0..n).map(|i| weights[i * n..(i + 1) * n].iter().sum()).collect();
        let mut far_field = vec![0.0; n];
        far_field[0] = 1.0 / h2;
        far_field[n - 1] = 1.0 / h2;
        Ok(Self { grid, weights, row_sums, far_field })
    }
}

fn check_grid(grid: &SpectralGrid) -> Result<()> {
    if grid.d != 1 {
        return Err(Error::Unsupported("the grid solver is one dimensional".into()));
    }
    Ok(())
}

/// Builds the weight table. Off-diagonal entries integrate |x_i - y|^{-1-β}
/// exactly over cell j and multiply by the kernel's modulation at the cell
/// centres. Treating u as constant on each cell misses -u''(x_i) S_i with
/// S_i = m_i h^{2-β} [(1/2)^{2-β}/(2-β) + ½ Σ_k τ_k] (self cell plus the
/// second moments of the other cells, τ_k = ∫_{k-1/2}^{k+1/2} s^{-1-β}(s² - k²) ds,
/// summed over the cells present on each side). S_i enters as
/// nearest-neighbour weights so the table stays symmetric.
pub fn assemble_operator(spec: &KernelSpec, grid: SpectralGrid) -> Result<NonlocalOperator> {
    check_grid(&grid)?;
    let n = grid.n;
    let h = grid.dx();
    let b = spec.beta;
    let cell_integral = |k: usize| {
        let r = k as f64 * h;
        ((r - 0.5 * h).powf(-b) - (r + 0.5 * h).powf(-b)) / b
    };
    let integrals: Vec<f64> = (0..n).map(|k| if k == 0 { 0.0 } else { cell_integral(k) }).collect();
    let x: Vec<f64> = (0..n).map(|j| grid.coord(j)).collect();
    let mut weights: Vec<f64> = (0..n * n)
        .into_par_iter()
        .map(|idx| {
            let (i, j) = (idx / n, idx % n);
            if i == j {
                return 0.0;
            }
            let m = if spec.symmetric {
                spec.modulation(x[i], x[j])
            } else {
                0.5 * (spec.modulation(x[i], x[j]) + spec.modulation(x[j], x[i]))
            };
            m * integrals[i.abs_diff(j)]
        })
        .collect();
    let rule = GaussRule::new(12);
    let mut moments = vec![0.0; n];
    for k in 1..n {
        let kf = k as f64;
        let tau = rule.integrate(kf - 0.5, kf + 0.5, |s| s.powf(-1.0 - b) * (s - kf) * (s + kf));
        moments[k] = moments[k - 1] + tau;
    }
    let own = 0.5f64.powf(2.0 - b) / (2.0 - b);
    let self_term: Vec<f64> = x
        .iter()
        .enumerate()
        .map(|(i, &xi)| {
            let m = spec.modulation(xi, xi + 0.5 * h);
            m * h.powf(2.0 - b) * (own + 0.5 * (moments[i] + moments[n - 1 - i]))
        })
        .collect();
    for i in 0..n - 1 {
        let w = 0.5 * (self_term[i] + self_term[i + 1]) / (h * h);
        weights[i * n + i + 1] += w;
        weights[(i + 1) * n + i] += w;
    }
    let row_sums = (0..n).map(|i| weights[i * n..(i + 1) * n].iter().sum()).collect();
    // exterior: Λ∫_{y<a} + Λ∫_{y>c} |x-y|^{-1-β} dy with [a, c] the cell union
    let a = x[0] - 0.5 * h;
    let c = x[n - 1] + 0.5 * h;
    let far_field = x
        .iter()
        .enumerate()
        .map(|(i, &xi)| {
            let inner = spec.upper / b * ((xi - a).powf(-b) + (c - xi).powf(-b));
            // boundary cells also lose the half of the self-term stencil that points outside
            let edge = if i == 0 || i == n - 1 { self_term[i] / (h * h) } else { 0.0 };
            inner + edge
        })
        .collect();
    Ok(NonlocalOperator { grid, weights, row_sums, far_field })
}

/// Full-memory history of an implicit Grünwald-Letnikov run.
#[derive(Debug, Clone)]
pub struct MemoryState {
    pub alpha: f64,
    pub dt: f64,
    /// u(t_0), ..., u(t_step)
    pub history: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
    pub step: usize,
}

impl MemoryState {
    pub fn new(alpha: f64, dt: f64, u0: Vec<f64>, capacity: usize) -> Self {
        Self { alpha, dt, history: vec![u0], weights: gl_weights(alpha, capacity), step: 0 }
    }

    /// Right-hand side u₀ - Σ_{k=1}^{n-1} w_k (u_{n-k} - u₀) for step n.
    fn memory_term(&self) -> Vec<f64> {
        let n = self.step + 1;
        let u0 = &self.history[0];
        let mut rhs = u0.clone();
        for k in 1..n {
            let w = self.weights[k];
            if w == 0.0 {
                continue;
            }
            for ((r, a), b) in rhs.iter_mut().zip(&self.history[n - k]).zip(u0) {
                *r -= w * (a - b);
            }
        }
        rhs
    }
}

const PCG_TOL: f64 = 1e-12;
const PCG_MAX_ITER: usize = 1000;

/// Solves (s I + L) x = b by Jacobi-preconditioned conjugate gradients.
fn pcg(op: &NonlocalOperator, shift: f64, b: &[f64], x0: &[f64]) -> Result<Vec<f64>> {
    let diag: Vec<f64> = op.diagonal().iter().map(|d| d + shift).collect();
    let apply = |v: &[f64]| -> Vec<f64> { op.apply(v).iter().zip(v).map(|(a, x)| a + shift * x).collect() };
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let bnorm = dot(b, b).sqrt();
    if bnorm == 0.0 {
        return Ok(vec![0.0; b.len()]);
    }
    let mut x = x0.to_vec();
    let ax = apply(&x);
    let mut r: Vec<f64> = b.iter().zip(&ax).map(|(p, q)| p - q).collect();
    let mut z: Vec<f64> = r.iter().zip(&diag).map(|(a, d)| a / d).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    for _ in 0..PCG_MAX_ITER {
        if dot(&r, &r).sqrt() <= PCG_TOL * bnorm {
            return Ok(x);
        }
        let ap = apply(&p);
        let step = rz / dot(&p, &ap);
        for i in 0..x.len() {
            x[i] += step * p[i];
            r[i] -= step * ap[i];
        }
        z = r.iter().zip(&diag).map(|(a, d)| a / d).collect();
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..p.len() {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(Error::LinearSolveFailure(format!(
        "conjugate gradients stalled at residual {:.3e} after {PCG_MAX_ITER} iterations",
        dot(&r, &r).sqrt() / bnorm
    )))
}

/// Implicit scheme dt^{-α} Σ_k w_k (u_{n-k} - u₀) + L u_n = 0. Returns the
/// states at t_0 = 0, dt, ..., n_steps·dt.
pub fn evolve(p: &FracParams, op: &NonlocalOperator, u0: &Field, dt: f64, n_steps: usize) -> Result<Vec<Field>> {
    if !(dt > 0.0) {
        return Err(invalid("time step must be positive"));
    }
    if u0.grid != op.grid {
        return Err(invalid("initial data and operator use different grids"));
    }
    let shift = dt.powf(-p.alpha);
    let mut state = MemoryState::new(p.alpha, dt, u0.values.clone(), n_steps);
    let mut out = Vec::with_capacity(n_steps + 1);
    out.push(Field { grid: u0.grid, values: u0.values.clone(), time: 0.0 });
    for n in 1..=n_steps {
        let rhs: Vec<f64> = state.memory_term().iter().map(|v| v * shift).collect();
        let next = pcg(op, shift, &rhs, &state.history[n - 1])?;
        out.push(Field { grid: u0.grid, values: next.clone(), time: n as f64 * dt });
        state.history.push(next);
        state.step = n;
    }
    Ok(out)
}

fn grid_norm(field: &Field, p: f64) -> f64 {
    let h = field.grid.cell_volume();
    if p.is_infinite() {
        return field.values.iter().fold(0.0, |m, v| m.max(v.abs()));
    }
    (h * field.values.iter().map(|v| v.abs().powf(p)).sum::<f64>()).powf(1.0 / p)
}

/// Grid L¹ norms of each state.
pub fn l1_series(states: &[Field]) -> NormSeries {
    NormSeries {
        times: states.iter().map(|s| s.time).collect(),
        values: states.iter().map(|s| grid_norm(s, 1.0)).collect(),
        p: 1.0,
        weak: false,
    }
}

#[derive(Debug, Clone)]
pub struct EnergyReport {
    pub norms: NormSeries,
    /// min over states of E(u)‖u‖₁^{2β/d} / ‖u‖₂^{2+2β/d}
    pub nash_constant: f64,
    /// Nash constant divided by ‖u₀‖₁^{2β/d}
    pub mu: f64,
    /// 1 + 2β/d
    pub gamma: f64,
    /// -(∂_t^α(‖u‖₂ - ‖u₀‖₂) + μ‖u‖₂^γ) at each step n ≥ 1
    pub slack: Vec<f64>,
    /// share of steps with slack ≥ -tolerance
    pub fraction_satisfied: f64,
}

/// L² norms of a run of `evolve` and the discrete Nash-type inequality
/// ∂_t^α(‖u‖₂ - ‖u₀‖₂) + μ‖u‖₂^{1+2β/d} ≤ 0. The Nash constant is measured
/// on the states themselves rather than assumed.
pub fn energy_series(p: &FracParams, op: &NonlocalOperator, states: &[Field], tolerance: f64) -> Result<EnergyReport> {
    if states.len() < 8 {
        return Err(invalid("energy series needs at least 8 states"));
    }
    let dt = states[1].time - states[0].time;
    let norms: Vec<f64> = states.iter().map(|s| grid_norm(s, 2.0)).collect();
    let l1: Vec<f64> = states.iter().map(|s| grid_norm(s, 1.0)).collect();
    let expo = 2.0 * p.beta / p.d as f64;
    let gamma = 1.0 + expo;
    let series =
        NormSeries { times: states.iter().map(|s| s.time).collect(), values: norms.clone(), p: 2.0, weak: false };
    if norms[0] == 0.0 {
        let slack = vec![0.0; states.len() - 1];
        return Ok(EnergyReport { norms: series, nash_constant: 0.0, mu: 0.0, gamma, slack, fraction_satisfied: 1.0 });
    }
    let nash_constant = states
        .iter()
        .zip(&norms)
        .zip(&l1)
        .filter(|((_, &n2), _)| n2 > 0.0)
        .map(|((s, n2), n1)| op.quadratic_form(&s.values) * n1.powf(expo) / n2.powf(2.0 + expo))
        .fold(f64::INFINITY, f64::min);
    let mu = nash_constant / l1[0].powf(expo);
    let w = gl_weights(p.alpha, states.len());
    let scale = dt.powf(-p.alpha);
    let slack: Vec<f64> = (1..states.len())
        .map(|n| {
            let deriv = scale * (0..n).map(|k| w[k] * (norms[n - k] - norms[0])).sum::<f64>();
            -(deriv + mu * norms[n].powf(gamma))
        })
        .collect();
    let ok = slack.iter().filter(|&&s| s >= -tolerance).count();
    let fraction_satisfied = ok as f64 / slack.len() as f64;
    Ok(EnergyReport { norms: series, nash_constant, mu, gamma, slack, fraction_satisfied })
}

/// Solves ∂_t^α(w - w₀) + μ w^γ = 0 on t_k = k·dt through the Volterra form
/// w = w₀ - μ J^α(w^γ). The integral uses implicit product rectangles
/// (w^γ frozen at the right end of each step), whose positive decreasing
/// weights keep w positive and nonincreasing; a scalar root find resolves
/// the implicit end point.
pub fn solve_comparison_ode(alpha: f64, mu: f64, gamma: f64, w0: f64, t_grid: &[f64]) -> Result<Vec<f64>> {
    if !(alpha > 0.0 && alpha <= 1.0) || !(mu >= 0.0) || !(gamma > 1.0) || !(w0 > 0.0) {
        return Err(invalid("comparison equation needs α ∈ (0,1], μ ≥ 0, γ > 1, w₀ > 0"));
    }
    if t_grid.len() < 2 || t_grid[0] != 0.0 {
        return Err(invalid("time grid must start at 0 with at least two points"));
    }
    let dt = t_grid[1];
    if t_grid.iter().enumerate().any(|(k, &t)| (t - k as f64 * dt).abs() > 1e-9 * (1.0 + t)) {
        return Err(invalid("time grid must be uniform"));
    }
    let n_total = t_grid.len();
    let c = dt.powf(alpha) * rgamma(alpha + 1.0);
    // b_k = (k+1)^α - k^α
    let bw: Vec<f64> = (0..n_total).map(|k| ((k + 1) as f64).powf(alpha) - (k as f64).powf(alpha)).collect();
    let mut w = vec![w0; n_total];
    let mut g = vec![w0.powf(gamma); n_total];
    for n in 1..n_total {
        let known: f64 = (1..n).map(|j| bw[n - j] * g[j]).sum();
        let rhs = w0 - mu * c * known;
        // v + μ c v^γ = rhs, increasing in v ≥ 0
        let k = mu * c;
        let f = |v: f64| v + k * v.powf(gamma) - rhs;
        if rhs <= 0.0 {
            return Err(Error::RootFindFailure(format!("no positive root at step {n}")));
        }
        let (mut lo, mut hi) = (0.0, rhs);
        let mut v = w[n - 1].min(rhs);
        let mut converged = false;
        for _ in 0..200 {
            let fv = f(v);
            if fv.abs() <= 1e-15 * rhs {
                converged = true;
                break;
            }
            if fv > 0.0 {
                hi = v;
            } else {
                lo = v;
            }
            let next = v - fv / (1.0 + k * gamma * v.powf(gamma - 1.0));
            v = if next > lo && next < hi { next } else { 0.5 * (lo + hi) };
            if hi - lo <= 1e-16 * rhs {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::RootFindFailure(format!("implicit step {n} did not converge")));
        }
        w[n] = v;
        g[n] = v.powf(gamma);
    }
    Ok(w)
}
