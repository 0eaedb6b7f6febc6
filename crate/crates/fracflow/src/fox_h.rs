//! Fox H-functions H^{m,n}_{p,q} on the positive real axis.
//!
//! The Mellin kernel is a ratio of Gamma products. Values are obtained from
//! residue sums over the left poles (small argument), from the expansion over
//! the right poles (large argument), or from the Mellin-Barnes line integral
//! on a vertical line, shifted across poles so that no large cancellation
//! occurs. Identical Gamma factors in the numerator and denominator are
//! cancelled before poles are enumerated, so cancelled families (for
//! example α = 1 or β = 2 in the diffusion kernels) produce no residues.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{invalid, Error, Result};
use crate::special_functions::{digamma, ln_gamma_sign, log_gamma, Estimate, ToleranceConfig};

/// Parameter table of H^{m,n}_{p,q}[z | (a_i, α_i); (b_j, β_j)].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoxHSpec {
    pub m: usize,
    pub n: usize,
    pub upper: Vec<(f64, f64)>,
    pub lower: Vec<(f64, f64)>,
}

/// Which side of the integration contour a pole family lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    Left,
    Right,
}

/// A (possibly merged) pole of the Mellin kernel. `members` lists the
/// (parameter index, family index) pairs that land on this location.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pole {
    pub location: f64,
    pub order: i32,
    pub members: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoleSet {
    pub left: Vec<Pole>,
    pub right: Vec<Pole>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalPolicy {
    pub tol: ToleranceConfig,
    pub crossover_z: f64,
    pub collision_eps: f64,
}

impl EvalPolicy {
    pub fn new(tol: ToleranceConfig, crossover_z: f64, collision_eps: f64) -> Result<Self> {
        if !(crossover_z > 0.0) {
            return Err(invalid("crossover_z must be positive"));
        }
        if !(collision_eps > 0.0 && collision_eps <= 1e-6) {
            return Err(invalid("collision_eps must lie in (0, 1e-6]"));
        }
        Ok(Self { tol, crossover_z, collision_eps })
    }
}

impl Default for EvalPolicy {
    fn default() -> Self {
        Self {
            tol: ToleranceConfig { abs_tol: 1e-300, rel_tol: 1e-11, max_terms: 4000 },
            crossover_z: 1.0,
            collision_eps: 1e-9,
        }
    }
}

/// Evaluation route that produced a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    LeftSeries,
    InvertedSeries,
    RightExpansion,
    Contour,
}

/// Γ(c + g s), in the numerator or the denominator.
#[derive(Debug, Clone, Copy, PartialEq)]
struct GammaFactor {
    c: f64,
    g: f64,
    numerator: bool,
    // index into `upper` (a-type) or `lower` (b-type) for bookkeeping
    origin: usize,
}

impl FoxHSpec {
    pub fn new(m: usize, n: usize, upper: Vec<(f64, f64)>, lower: Vec<(f64, f64)>) -> Result<Self> {
        if m > lower.len() || n > upper.len() {
            return Err(invalid("need 0 <= m <= q and 0 <= n <= p"));
        }
        if upper.iter().chain(&lower).any(|&(c, w)| !(w > 0.0) || !c.is_finite()) {
            return Err(invalid("all Fox H scale parameters must be positive"));
        }
        Ok(Self { m, n, upper, lower })
    }

    pub fn p(&self) -> usize {
        self.upper.len()
    }

    pub fn q(&self) -> usize {
        self.lower.len()
    }

    /// The H^{2,1}_{2,3} family of the diffusion kernels:
    /// upper (1,1), (a2, α); lower (b1, β/2), (1,1), (1, β/2).
    pub fn diffusion_family(alpha: f64, beta: f64, b1: f64, a2: f64) -> Result<Self> {
        Self::new(2, 1, vec![(1.0, 1.0), (a2, alpha)], vec![(b1, beta / 2.0), (1.0, 1.0), (1.0, beta / 2.0)])
    }

    /// Parameter table of the propagator of initial data in dimension `d`.
    pub fn z_kernel(alpha: f64, beta: f64, d: f64) -> Result<Self> {
        Self::diffusion_family(alpha, beta, d / 2.0, 1.0)
    }

    /// Parameter table of the propagator of the source term.
    pub fn y_kernel(alpha: f64, beta: f64, d: f64) -> Result<Self> {
        Self::diffusion_family(alpha, beta, d / 2.0, alpha)
    }

    /// E_{α,β}(-z) = H^{1,1}_{1,2}[z | (0,1); (0,1), (1-β, α)].
    pub fn mittag_leffler(alpha: f64, beta: f64) -> Result<Self> {
        Self::new(1, 1, vec![(0.0, 1.0)], vec![(0.0, 1.0), (1.0 - beta, alpha)])
    }

    /// Table of H^{n,m}_{q,p} with (1-b_j, β_j) on top and (1-a_i, α_i) below;
    /// evaluating it at 1/z gives the same value as `self` at z.
    pub fn swapped(&self) -> Self {
        Self {
            m: self.n,
            n: self.m,
            upper: self.lower.iter().map(|&(b, w)| (1.0 - b, w)).collect(),
            lower: self.upper.iter().map(|&(a, w)| (1.0 - a, w)).collect(),
        }
    }

    /// Table with every (a_i, α_i) -> (a_i + α_i, α_i) and (b_j, β_j) ->
    /// (b_j + β_j, β_j); its value at z equals z times the value of `self`.
    pub fn shifted(&self) -> Self {
        Self {
            m: self.m,
            n: self.n,
            upper: self.upper.iter().map(|&(a, w)| (a + w, w)).collect(),
            lower: self.lower.iter().map(|&(b, w)| (b + w, w)).collect(),
        }
    }

    /// μ = Σβ_j - Σα_i.
    pub fn mu(&self) -> f64 {
        self.lower.iter().map(|x| x.1).sum::<f64>() - self.upper.iter().map(|x| x.1).sum::<f64>()
    }

    /// Π α_i^{-α_i} Π β_j^{β_j}: radius of the left-pole series when μ = 0.
    pub fn delta(&self) -> f64 {
        let l: f64 = self.upper.iter().map(|&(_, a)| -a * a.ln()).sum::<f64>()
            + self.lower.iter().map(|&(_, b)| b * b.ln()).sum::<f64>();
        l.exp()
    }

    /// Aperture a* of the vertical Mellin-Barnes contour.
    pub fn a_star(&self) -> f64 {
        let lower: f64 = self.lower.iter().enumerate().map(|(j, &(_, b))| if j < self.m { b } else { -b }).sum();
        let upper: f64 = self.upper.iter().enumerate().map(|(i, &(_, a))| if i < self.n { a } else { -a }).sum();
        lower + upper
    }

    fn factors(&self) -> Vec<GammaFactor> {
        let mut num = Vec::new();
        let mut den = Vec::new();
        for (j, &(b, w)) in self.lower.iter().enumerate() {
            if j < self.m {
                num.push(GammaFactor { c: b, g: w, numerator: true, origin: j });
            } else {
                den.push(GammaFactor { c: 1.0 - b, g: -w, numerator: false, origin: j });
            }
        }
        for (i, &(a, w)) in self.upper.iter().enumerate() {
            if i < self.n {
                num.push(GammaFactor { c: 1.0 - a, g: -w, numerator: true, origin: i });
            } else {
                den.push(GammaFactor { c: a, g: w, numerator: false, origin: i });
            }
        }
        // cancel identical factors
        let mut keep_den = vec![true; den.len()];
        let mut out = Vec::new();
        for f in num {
            let hit = den.iter().enumerate().position(|(k, d)| keep_den[k] && d.c == f.c && d.g == f.g);
            match hit {
                Some(k) => keep_den[k] = false,
                None => out.push(f),
            }
        }
        out.extend(den.into_iter().zip(keep_den).filter(|(_, k)| *k).map(|(d, _)| d));
        out
    }
}

fn nonpositive_integer_near(w: f64, eps: f64) -> Option<u64> {
    let r = w.round();
    if r <= 0.0 && (w - r).abs() <= eps {
        Some((-r) as u64)
    } else {
        None
    }
}

fn arg_eps(f: &GammaFactor, s: f64, eps: f64) -> f64 {
    eps * f.g.abs().max(1.0) * (1.0 + s.abs())
}

/// Mellin kernel Π Γ(b_j+β_j s) Π Γ(1-a_i-α_i s) / (Π Γ(a_i+α_i s) Π Γ(1-b_j-β_j s)).
pub fn mellin_kernel(spec: &FoxHSpec, s: Complex64) -> Result<Complex64> {
    match log_mellin_kernel(&spec.factors(), s, 1e-9)? {
        Some(l) => Ok(l.exp()),
        None => Ok(Complex64::new(0.0, 0.0)),
    }
}

/// Log of the kernel, or None where a reciprocal Gamma vanishes.
fn log_mellin_kernel(factors: &[GammaFactor], s: Complex64, eps: f64) -> Result<Option<Complex64>> {
    let mut acc = Complex64::new(0.0, 0.0);
    for f in factors {
        let w = f.c + f.g * s;
        let near_axis = w.im.abs() <= arg_eps(f, s.re, eps);
        if near_axis && nonpositive_integer_near(w.re, arg_eps(f, s.re, eps)).is_some() {
            if f.numerator {
                return Err(Error::PoleHit(s.re));
            }
            return Ok(None);
        }
        let lg = log_gamma(w)?;
        if f.numerator {
            acc += lg;
        } else {
            acc -= lg;
        }
    }
    Ok(Some(acc))
}

/// ln|kernel| at real s, None at zeros of the kernel.
fn log_abs_kernel_real(factors: &[GammaFactor], s: f64) -> Option<f64> {
    let mut acc = 0.0;
    for f in factors {
        let w = f.c + f.g * s;
        match ln_gamma_sign(w) {
            Ok((lg, _)) => {
                if f.numerator {
                    acc += lg
                } else {
                    acc -= lg
                }
            }
            Err(_) => {
                if f.numerator {
                    return Some(f64::INFINITY);
                }
                return None;
            }
        }
    }
    Some(acc)
}

/// Counts numerator and denominator singularities at `s`: the pole order.
fn order_at(factors: &[GammaFactor], s: f64, eps: f64) -> (i32, Vec<(usize, usize)>) {
    let mut order = 0;
    let mut members = Vec::new();
    for f in factors {
        let w = f.c + f.g * s;
        if let Some(l) = nonpositive_integer_near(w, arg_eps(f, s, eps)) {
            if f.numerator {
                order += 1;
                members.push((f.origin, l as usize));
            } else {
                order -= 1;
            }
        }
    }
    (order, members)
}

fn collect_poles(factors: &[GammaFactor], side: Side, count: usize, eps: f64) -> Vec<Pole> {
    let per_family = 2 * count + 8;
    let mut locs: Vec<f64> = Vec::new();
    for f in factors.iter().filter(|f| f.numerator) {
        let left_type = f.g > 0.0;
        if left_type != (side == Side::Left) {
            continue;
        }
        for l in 0..per_family {
            locs.push((-(l as f64) - f.c) / f.g);
        }
    }
    match side {
        Side::Left => locs.sort_by(|a, b| b.partial_cmp(a).unwrap()),
        Side::Right => locs.sort_by(|a, b| a.partial_cmp(b).unwrap()),
    }
    let mut poles: Vec<Pole> = Vec::new();
    let mut i = 0;
    while i < locs.len() && poles.len() < count {
        let mut j = i + 1;
        while j < locs.len() && (locs[j] - locs[i]).abs() <= eps * (1.0 + locs[i].abs()) {
            j += 1;
        }
        let loc = locs[i..j].iter().sum::<f64>() / (j - i) as f64;
        let (order, members) = order_at(factors, loc, eps);
        if order >= 1 {
            poles.push(Pole { location: loc, order, members });
        }
        i = j;
    }
    poles
}

/// First `count` pole groups on each side of the contour, after merging
/// coincident locations and removing poles cancelled by denominator zeros.
pub fn enumerate_poles(spec: &FoxHSpec, count: usize) -> PoleSet {
    enumerate_poles_with(spec, count, EvalPolicy::default().collision_eps)
}

pub fn enumerate_poles_with(spec: &FoxHSpec, count: usize, eps: f64) -> PoleSet {
    let count = count.max(1);
    let f = spec.factors();
    PoleSet { left: collect_poles(&f, Side::Left, count, eps), right: collect_poles(&f, Side::Right, count, eps) }
}

/// Res_{s=pole} [kernel(s) z^{-s}] for real z > 0. Poles up to second order
/// are supported; the second-order case uses the logarithmic derivative of
/// the regularised Gamma product.
fn residue_at(factors: &[GammaFactor], s0: f64, ln_z: f64, eps: f64) -> Result<f64> {
    let mut log_abs = 0.0;
    let mut sign = 1.0;
    let mut dlog = 0.0;
    let mut order = 0;
    for f in factors {
        let w = f.c + f.g * s0;
        let sgn_g = f.g.signum();
        match nonpositive_integer_near(w, arg_eps(f, s0, eps)) {
            Some(l) => {
                let (lf, _) = ln_gamma_sign(l as f64 + 1.0)?;
                let parity = if l % 2 == 1 { -1.0 } else { 1.0 };
                let dpsi = f.g * digamma(l as f64 + 1.0)?;
                if f.numerator {
                    // (s - s0) Γ(w) -> (-1)^l / (l! g)
                    order += 1;
                    log_abs += -lf - f.g.abs().ln();
                    dlog += dpsi;
                } else {
                    // 1/Γ(w) / (s - s0) -> g (-1)^l l!
                    order -= 1;
                    log_abs += lf + f.g.abs().ln();
                    dlog -= dpsi;
                }
                sign *= parity * sgn_g;
            }
            None => {
                let (lg, sg) = ln_gamma_sign(w)?;
                let dpsi = f.g * digamma(w)?;
                if f.numerator {
                    log_abs += lg;
                    dlog += dpsi;
                } else {
                    log_abs -= lg;
                    dlog -= dpsi;
                }
                sign *= sg;
            }
        }
    }
    let base = sign * (log_abs - s0 * ln_z).exp();
    match order {
        o if o <= 0 => Ok(0.0),
        1 => Ok(base),
        2 => Ok(base * (dlog - ln_z)),
        o => Err(Error::Unsupported(format!("pole of order {o} at s = {s0}"))),
    }
}

/// Residue of kernel(s) z^{-s} at a pole of `spec`.
pub fn residue(spec: &FoxHSpec, pole: &Pole, z: f64) -> Result<f64> {
    if !(z > 0.0) {
        return Err(invalid("Fox H argument must be positive"));
    }
    residue_at(&spec.factors(), pole.location, z.ln(), EvalPolicy::default().collision_eps)
}

/// Coefficients h_k = -Res_{s=(1-a_1+k)/α_1} kernel(s), k = 0..=kmax, of the
/// expansion Σ h_k z^{-(1-a_1+k)/α_1} at infinity.
pub fn h_coefficients(spec: &FoxHSpec, kmax: usize) -> Result<Vec<f64>> {
    if spec.n < 1 {
        return Err(invalid("h_k need at least one upper parameter in the numerator"));
    }
    let (a1, al1) = spec.upper[0];
    let f = spec.factors();
    let eps = EvalPolicy::default().collision_eps;
    (0..=kmax)
        .map(|k| {
            let s = (1.0 - a1 + k as f64) / al1;
            residue_at(&f, s, 0.0, eps).map(|r| if r == 0.0 { 0.0 } else { -r })
        })
        .collect()
}

/// Left-pole residue series at small z. Converges for μ > 0 and, when
/// μ = 0, inside 0.9 δ.
pub fn eval_small(spec: &FoxHSpec, z: f64, policy: &EvalPolicy) -> Result<Estimate> {
    check_z(z)?;
    let mu = spec.mu();
    if mu < -1e-12 {
        return Err(Error::OutOfConvergenceRegion { z, radius: 0.0 });
    }
    if mu.abs() <= 1e-12 {
        let radius = 0.9 * spec.delta();
        if z >= radius {
            return Err(Error::OutOfConvergenceRegion { z, radius });
        }
    }
    convergent_sum(spec, z, Side::Left, policy)
}

/// Expansion over the left poles read as an asymptotic series (μ < 0),
/// computed as the right-pole expansion of the swapped table at 1/z.
pub fn eval_small_inverted(spec: &FoxHSpec, z: f64, policy: &EvalPolicy) -> Result<Estimate> {
    check_z(z)?;
    if spec.mu() >= 0.0 {
        return Err(invalid("inverted expansion applies only when μ < 0"));
    }
    truncated_sum(&spec.swapped(), 1.0 / z, Side::Right, policy)
}

/// Expansion -Σ Res over right poles with optimal truncation.
pub fn eval_large(spec: &FoxHSpec, z: f64, policy: &EvalPolicy) -> Result<Estimate> {
    check_z(z)?;
    let est = truncated_sum(spec, z, Side::Right, policy)?;
    if est.value != 0.0 && est.err > policy.tol.rel_tol * est.value.abs() {
        return Err(Error::AsymptoticUnreliable { value: est.value, omitted: est.err });
    }
    Ok(est)
}

fn check_z(z: f64) -> Result<()> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(invalid(format!("Fox H argument must be positive and finite, got {z}")));
    }
    Ok(())
}

fn sign_for(side: Side) -> f64 {
    match side {
        Side::Left => 1.0,
        Side::Right => -1.0,
    }
}

fn convergent_sum(spec: &FoxHSpec, z: f64, side: Side, policy: &EvalPolicy) -> Result<Estimate> {
    let factors = spec.factors();
    let ln_z = z.ln();
    let eps = policy.collision_eps;
    let mut count = 64;
    let mut done = 0;
    let mut sum = 0.0;
    let mut abs_sum = 0.0;
    let mut small_run = 0;
    let mut prev_mag = f64::INFINITY;
    loop {
        let poles = collect_poles(&factors, side, count, eps);
        if poles.len() <= done {
            // no further poles: the sum is finite and exact
            return Ok(Estimate { value: sum, err: 4.0 * f64::EPSILON * abs_sum });
        }
        for p in &poles[done..] {
            let t = sign_for(side) * residue_at(&factors, p.location, ln_z, eps)?;
            if !t.is_finite() {
                return Err(Error::NoConvergence("residue overflow".into()));
            }
            sum += t;
            abs_sum += t.abs();
            let mag = t.abs();
            if mag <= 1e-17 * sum.abs() && mag <= prev_mag {
                small_run += 1;
                if small_run >= 3 {
                    let err = 4.0 * f64::EPSILON * abs_sum + mag;
                    return Ok(Estimate { value: sum, err });
                }
            } else if mag > 0.0 {
                small_run = 0;
            }
            if mag > 0.0 {
                prev_mag = mag;
            }
        }
        done = poles.len();
        if done >= policy.tol.max_terms {
            return Err(Error::NoConvergence(format!("residue series not converged after {done} poles")));
        }
        count *= 2;
    }
}

fn truncated_sum(spec: &FoxHSpec, z: f64, side: Side, policy: &EvalPolicy) -> Result<Estimate> {
    let factors = spec.factors();
    let ln_z = z.ln();
    let eps = policy.collision_eps;
    let count = 160.min(policy.tol.max_terms);
    let poles = collect_poles(&factors, side, count, eps);
    let terms: Vec<f64> = poles
        .iter()
        .map(|p| residue_at(&factors, p.location, ln_z, eps).map(|r| sign_for(side) * r))
        .collect::<Result<_>>()?;
    let nonzero: Vec<usize> = (0..terms.len()).filter(|&k| terms[k] != 0.0).collect();
    if nonzero.is_empty() {
        // nothing but the exponentially small remainder; bound it by the line integral
        let last = poles.last().map(|p| p.location);
        let bound = remainder_bound(&factors, z, side, last)?;
        return Ok(Estimate { value: 0.0, err: bound });
    }
    let mut sum = 0.0_f64;
    let mut best_mag = f64::INFINITY;
    let mut best_pos = 0;
    let mut sum_before_best = 0.0;
    for (pos, &k) in nonzero.iter().enumerate() {
        let mag = terms[k].abs();
        if mag < best_mag {
            best_mag = mag;
            best_pos = pos;
            sum_before_best = sum;
        }
        if mag <= 1e-17 * sum.abs() {
            // converged outright
            return Ok(Estimate { value: sum + terms[k], err: mag + 4.0 * f64::EPSILON * sum.abs() });
        }
        if pos > best_pos + 6 || mag > 1e6 * best_mag {
            break;
        }
        sum += terms[k];
    }
    // optimal truncation: stop just before the smallest term
    let _ = best_pos;
    Ok(Estimate { value: sum_before_best, err: best_mag })
}

/// |(1/2π) ∫_{Re s = c} kernel(s) z^{-s} ds| for c just beyond the last
/// enumerated pole: bounds what a truncated pole sum leaves out.
fn remainder_bound(factors: &[GammaFactor], z: f64, side: Side, last: Option<f64>) -> Result<f64> {
    let c = match (side, last) {
        (Side::Right, Some(p)) => p + 0.5,
        (Side::Left, Some(p)) => p - 0.5,
        (Side::Right, None) => 40.0,
        (Side::Left, None) => -40.0,
    };
    let ln_z = z.ln();
    let mut total = 0.0;
    let h = 0.05;
    let mut peak = f64::NEG_INFINITY;
    for k in 0..200_000 {
        let y = k as f64 * h;
        let l = match log_mellin_kernel(factors, Complex64::new(c, y), 1e-9) {
            Ok(Some(l)) => l.re - c * ln_z,
            Ok(None) => f64::NEG_INFINITY,
            Err(_) => return Err(Error::PoleHit(c)),
        };
        peak = peak.max(l);
        let w = if k == 0 { 0.5 } else { 1.0 };
        total += w * l.exp() * h;
        if l < peak - 40.0 && y > 5.0 {
            break;
        }
    }
    Ok(total / PI)
}

/// Gap between consecutive poles in which the integration line can sit,
/// and the residues that moving the line there picks up.
struct LineChoice {
    c: f64,
    half_width: f64,
    residue_sum: f64,
    residue_abs: f64,
}

fn phi(factors: &[GammaFactor], c: f64, ln_z: f64) -> f64 {
    match log_abs_kernel_real(factors, c) {
        Some(l) => l - c * ln_z,
        None => f64::NEG_INFINITY,
    }
}

fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let r = 0.618_033_988_749_894_9;
    let mut x1 = b - r * (b - a);
    let mut x2 = a + r * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..60 {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = f(x2);
        }
        if (b - a).abs() < 1e-6 * (1.0 + a.abs()) {
            break;
        }
    }
    if f1 < f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

fn choose_line(factors: &[GammaFactor], z: f64, eps: f64) -> Result<LineChoice> {
    let ln_z = z.ln();
    let n_gaps = 24;
    let left = collect_poles(factors, Side::Left, n_gaps + 1, eps);
    let right = collect_poles(factors, Side::Right, n_gaps + 1, eps);
    let reach = 20.0 + 2.0 * z.max(1.0 / z).min(1e4);
    let span = |lo: f64, hi: f64| -> (f64, f64) {
        match (lo.is_finite(), hi.is_finite()) {
            (true, true) => {
                let g = hi - lo;
                (lo + 0.2 * g, hi - 0.2 * g)
            }
            (true, false) => (lo + 0.3, lo + reach),
            (false, true) => (hi - reach, hi - 0.3),
            (false, false) => (-reach, reach),
        }
    };
    let half_width = |c: f64, lo: f64, hi: f64| -> f64 { (c - lo).min(hi - c).min(2.0) };
    let mut best: Option<(f64, LineChoice)> = None;
    let mut consider = |lo: f64, hi: f64, res_sum: f64, res_abs: f64, res_log_max: f64| -> f64 {
        let (a, b) = span(lo, hi);
        let (c, fc) = golden_min(|c| phi(factors, c, ln_z), a, b);
        let cost = fc.max(res_log_max);
        let choice = LineChoice { c, half_width: half_width(c, lo, hi), residue_sum: res_sum, residue_abs: res_abs };
        if best.as_ref().is_none_or(|(bc, _)| cost < *bc) {
            best = Some((cost, choice));
        }
        cost
    };
    let lo0 = left.first().map_or(f64::NEG_INFINITY, |p| p.location);
    let hi0 = right.first().map_or(f64::INFINITY, |p| p.location);
    let base = consider(lo0, hi0, 0.0, 0.0, f64::NEG_INFINITY);
    // shift left across left poles: H = Σ crossed residues + line integral
    let mut acc = (0.0, 0.0, f64::NEG_INFINITY);
    let mut worse = 0;
    for i in 0..left.len().saturating_sub(1).min(n_gaps) {
        let r = residue_at(factors, left[i].location, ln_z, eps)?;
        acc = (acc.0 + r, acc.1 + r.abs(), acc.2.max(r.abs().ln()));
        let cost = consider(left[i + 1].location, left[i].location, acc.0, acc.1, acc.2);
        if cost > base + 2.0 {
            worse += 1;
            if worse >= 3 {
                break;
            }
        }
    }
    if left.len() == n_gaps + 1 || left.len() <= 1 {
        // also allow an unbounded gap beyond the last pole when the family is short
        if !left.is_empty() && left.len() <= 1 {
            let r = residue_at(factors, left[0].location, ln_z, eps)?;
            consider(f64::NEG_INFINITY, left[0].location, r, r.abs(), r.abs().ln());
        }
    }
    // shift right across right poles: H = -Σ crossed residues + line integral
    let mut acc = (0.0, 0.0, f64::NEG_INFINITY);
    let mut worse = 0;
    for i in 0..right.len().min(n_gaps) {
        let r = -residue_at(factors, right[i].location, ln_z, eps)?;
        acc = (acc.0 + r, acc.1 + r.abs(), acc.2.max(r.abs().ln()));
        let hi = right.get(i + 1).map_or(f64::INFINITY, |p| p.location);
        let cost = consider(right[i].location, hi, acc.0, acc.1, acc.2);
        if cost > base + 2.0 {
            worse += 1;
            if worse >= 3 {
                break;
            }
        }
    }
    best.map(|(_, c)| c).ok_or_else(|| Error::NoConvergence("no admissible contour".into()))
}

/// Mellin-Barnes line integral (1/2πi)∫ kernel(s) z^{-s} ds on a vertical
/// line placed at the saddle of |kernel(c) z^{-c}| within the best pole gap,
/// plus the residues crossed to get there. Trapezoidal rule with step
/// halving until two levels agree.
pub fn eval_contour(spec: &FoxHSpec, z: f64, policy: &EvalPolicy) -> Result<Estimate> {
    check_z(z)?;
    if !(spec.a_star() > 0.0) {
        return Err(Error::Unsupported("vertical contour needs a* > 0".into()));
    }
    let factors = spec.factors();
    let ln_z = z.ln();
    let line = choose_line(&factors, z, policy.collision_eps)?;
    let c = line.c;
    let eval_f = |y: f64| -> Result<(f64, f64)> {
        match log_mellin_kernel(&factors, Complex64::new(c, y), policy.collision_eps)? {
            Some(l) => {
                let e = l - Complex64::new(c, y) * ln_z;
                Ok((e.exp().re, e.re))
            }
            None => Ok((0.0, f64::NEG_INFINITY)),
        }
    };
    let (f0, l0) = eval_f(0.0)?;
    let mut h = 2.0 * PI * line.half_width / 48.0;
    if ln_z.abs() > 1.0 {
        h = h.min(PI / ln_z.abs() / 4.0);
    }
    // march out to where the integrand is negligible
    let mut samples = vec![f0];
    let mut peak = l0;
    let mut tail_run = 0;
    let max_points = 400_000;
    loop {
        let y = samples.len() as f64 * h;
        let (f, l) = eval_f(y)?;
        samples.push(f);
        peak = peak.max(l);
        if l < peak - 42.0 {
            tail_run += 1;
            if tail_run > 8 {
                break;
            }
        } else {
            tail_run = 0;
        }
        if samples.len() > max_points {
            return Err(Error::NoConvergence("contour integrand decays too slowly".into()));
        }
    }
    let y_max = samples.len() as f64 * h;
    let trap = |s: &[f64], h: f64| -> f64 { h * (0.5 * s[0] + s[1..].iter().sum::<f64>()) };
    let mut integral = trap(&samples, h);
    let mut abs_scale = h * samples.iter().map(|v| v.abs()).sum::<f64>();
    let mut err = f64::INFINITY;
    for _ in 0..7 {
        let h2 = 0.5 * h;
        let mut add = 0.0;
        let mut add_abs = 0.0;
        let mut k = 1;
        while (k as f64) * h2 < y_max {
            let (f, _) = eval_f(k as f64 * h2)?;
            add += f;
            add_abs += f.abs();
            k += 2;
        }
        let refined = 0.5 * integral + h2 * add;
        abs_scale = 0.5 * abs_scale + h2 * add_abs;
        err = (refined - integral).abs();
        integral = refined;
        h = h2;
        let value = line.residue_sum + integral / PI;
        let target = policy.tol.abs_tol.max(0.1 * policy.tol.rel_tol * value.abs());
        if err / PI <= target {
            break;
        }
    }
    let value = line.residue_sum + integral / PI;
    let rounding = 8.0 * f64::EPSILON * (abs_scale / PI + line.residue_abs);
    Ok(Estimate { value, err: err / PI + rounding })
}

/// Value with its error estimate and the branch that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub value: f64,
    pub err: f64,
    pub branch: Branch,
}

/// Dispatching evaluator: series below `crossover_z`, expansion at infinity
/// above, and the line integral whenever the preferred branch cannot meet
/// the tolerance. Among failing branches the one with the smallest error
/// estimate is reported in the error.
pub fn eval_detailed(spec: &FoxHSpec, z: f64, policy: &EvalPolicy) -> Result<Evaluation> {
    check_z(z)?;
    let small_branch = if spec.mu() >= -1e-12 { Branch::LeftSeries } else { Branch::InvertedSeries };
    let order = if z < policy.crossover_z {
        [small_branch, Branch::Contour, Branch::RightExpansion]
    } else {
        [Branch::RightExpansion, Branch::Contour, small_branch]
    };
    let mut best: Option<Evaluation> = None;
    let mut last_err = None;
    for branch in order {
        let r = match branch {
            Branch::LeftSeries => eval_small(spec, z, policy),
            Branch::InvertedSeries => eval_small_inverted(spec, z, policy),
            Branch::RightExpansion => truncated_sum(spec, z, Side::Right, policy),
            Branch::Contour => eval_contour(spec, z, policy),
        };
        match r {
            Ok(e) => {
                let ev = Evaluation { value: e.value, err: e.err, branch };
                if policy.tol.accepts(e.value, e.err) {
                    return Ok(ev);
                }
                if best.is_none_or(|b| ev.err < b.err) {
                    best = Some(ev);
                }
            }
            Err(e) => last_err = Some(e),
        }
    }
    match best {
        Some(b) => Err(Error::NoConvergence(format!(
            "Fox H at z = {z}: best branch {:?} has error {:e} for value {:e}",
            b.branch, b.err, b.value
        ))),
        None => Err(last_err.unwrap_or_else(|| Error::NoConvergence("no branch".into()))),
    }
}

/// Real value of the Fox H-function at z > 0.
pub fn eval(spec: &FoxHSpec, z: f64, policy: &EvalPolicy) -> Result<f64> {
    eval_detailed(spec, z, policy).map(|e| e.value)
}

/// Leading left pole and its residue coefficient (value of the residue at z = 1).
pub fn leading_left_term(spec: &FoxHSpec) -> Result<Option<(Pole, f64)>> {
    let poles = enumerate_poles(spec, 1);
    match poles.left.into_iter().next() {
        Some(p) => {
            let r = residue(spec, &p, 1.0)?;
            Ok(Some((p, r)))
        }
        None => Ok(None),
    }
}
