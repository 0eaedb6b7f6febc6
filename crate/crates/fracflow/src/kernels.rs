//! Fundamental solutions Z (initial data) and Y (source term) of
//! ∂_t^α(u - u₀) + (-Δ)^{β/2} u = f, their gradients and ∂_t Y, the
//! regime envelopes describing them, and integrability thresholds.
//!
//! Both kernels are radial and self-similar:
//! Z(t, r) = π^{-d/2} r^{-d} H(z), Y(t, r) = π^{-d/2} t^{α-1} r^{-d} H_Y(z)
//! with z = 2^{-β} t^{-α} r^β.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{invalid, Error, Result};
use crate::fox_h::{self, EvalPolicy, FoxHSpec};
use crate::quadrature::GaussRule;
use crate::special_functions::{gamma, gl_weights, mittag_leffler, ToleranceConfig};

const SNAP: f64 = 1e-9;

/// Orders (α, β) and dimension d of the equation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FracParams {
    pub alpha: f64,
    pub beta: f64,
    pub d: usize,
}

impl FracParams {
    /// Validates ranges and snaps near-borderline values (β = d, d = 2β,
    /// β = α, α = 1, β = 2) onto the borderline.
    pub fn new(alpha: f64, beta: f64, d: usize) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0 + SNAP) {
            return Err(invalid(format!("alpha must lie in (0, 1], got {alpha}")));
        }
        if !(beta > 0.0 && beta <= 2.0 + SNAP) {
            return Err(invalid(format!("beta must lie in (0, 2], got {beta}")));
        }
        if d == 0 {
            return Err(invalid("dimension must be at least 1"));
        }
        let df = d as f64;
        let mut alpha = alpha;
        let mut beta = beta;
        if (alpha - 1.0).abs() < SNAP {
            alpha = 1.0;
        }
        for target in [2.0, df, df / 2.0] {
            if (beta - target).abs() < SNAP {
                beta = target;
            }
        }
        if (beta - alpha).abs() < SNAP {
            beta = alpha;
        }
        Ok(Self { alpha, beta, d })
    }

    pub fn dim(&self) -> f64 {
        self.d as f64
    }

    pub fn beta_equals_d(&self) -> bool {
        self.beta == self.dim()
    }

    pub fn d_equals_two_beta(&self) -> bool {
        self.dim() == 2.0 * self.beta
    }

    pub fn beta_equals_alpha(&self) -> bool {
        self.beta == self.alpha
    }

    /// Similarity variable R = r^β t^{-α}.
    pub fn similarity(&self, t: f64, r: f64) -> f64 {
        r.powf(self.beta) * t.powf(-self.alpha)
    }

    /// Fox argument z = 2^{-β} t^{-α} r^β.
    pub fn fox_argument(&self, t: f64, r: f64) -> f64 {
        (-self.beta * 2f64.ln() - self.alpha * t.ln() + self.beta * r.ln()).exp()
    }
}

/// Which kernel quantity an envelope or bound refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum KernelKind {
    Z,
    Y,
    GradZ,
    GradY,
    DtY,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    Small,
    Large,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeEstimate {
    /// similarity variable r^β t^{-α}
    pub r_sim: f64,
    pub regime: Regime,
    pub envelope: f64,
    /// false where the envelope is only an upper bound
    pub two_sided: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KappaThresholds {
    pub kappa1: f64,
    pub kappa2: f64,
    pub kappa3: f64,
}

/// Decay envelope of ‖kernel(t, ·)‖_p in t.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum LpBound {
    /// ‖·‖_p ≲ t^exponent
    Power { exponent: f64 },
    /// not in L^p; at the borderline p the weak norm decays like t^weak_exponent
    Unbounded { weak_exponent: Option<f64> },
}

fn kernel_policy() -> EvalPolicy {
    EvalPolicy { tol: ToleranceConfig { abs_tol: 1e-300, rel_tol: 1e-10, max_terms: 4000 }, ..EvalPolicy::default() }
}

fn check_tr(t: f64, r: f64) -> Result<()> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(invalid(format!("time must be positive, got {t}")));
    }
    if !(r >= 0.0) || !r.is_finite() {
        return Err(invalid(format!("radius must be nonnegative, got {r}")));
    }
    Ok(())
}

pub fn z_spec(p: &FracParams) -> Result<FoxHSpec> {
    FoxHSpec::z_kernel(p.alpha, p.beta, p.dim())
}

pub fn y_spec(p: &FracParams) -> Result<FoxHSpec> {
    FoxHSpec::y_kernel(p.alpha, p.beta, p.dim())
}

fn grad_z_spec(p: &FracParams) -> Result<FoxHSpec> {
    FoxHSpec::diffusion_family(p.alpha, p.beta, (p.dim() + 2.0) / 2.0, 1.0)
}

fn grad_y_spec(p: &FracParams) -> Result<FoxHSpec> {
    FoxHSpec::diffusion_family(p.alpha, p.beta, (p.dim() + 2.0) / 2.0, p.alpha)
}

fn dt_y_spec(p: &FracParams) -> Result<FoxHSpec> {
    FoxHSpec::diffusion_family(p.alpha, p.beta, p.dim() / 2.0, p.alpha - 1.0)
}

/// Limit of r^{-d} H(2^{-β} t^{-α} r^β) as r -> 0 when the leading left
/// pole sits at -d/β and is simple; None when the limit is infinite.
fn origin_limit(spec: &FoxHSpec, p: &FracParams, t: f64) -> Result<Option<f64>> {
    let Some((pole, coeff)) = fox_h::leading_left_term(spec)? else {
        return Ok(None);
    };
    let target = -p.dim() / p.beta;
    if pole.order != 1 || (pole.location - target).abs() > 1e-9 * (1.0 + target.abs()) {
        return Ok(None);
    }
    // H ≈ coeff z^{d/β} and z^{d/β} = 2^{-d} t^{-αd/β} r^d
    Ok(Some(coeff * 2f64.powi(-(p.d as i32)) * t.powf(-p.alpha * p.dim() / p.beta)))
}

/// Z(t, r). At r = 0 the value is finite only for α = 1 or β > d.
pub fn z_kernel(p: &FracParams, t: f64, r: f64) -> Result<f64> {
    check_tr(t, r)?;
    let spec = z_spec(p)?;
    let norm = PI.powf(-p.dim() / 2.0);
    if r == 0.0 {
        return origin_limit(&spec, p, t)?.map(|v| norm * v).ok_or(Error::SingularAtOrigin);
    }
    let h = fox_h::eval(&spec, p.fox_argument(t, r), &kernel_policy())?;
    Ok(norm * r.powf(-p.dim()) * h)
}

/// Y(t, r). At r = 0 the value is finite only for α = 1 or d < 2β.
pub fn y_kernel(p: &FracParams, t: f64, r: f64) -> Result<f64> {
    check_tr(t, r)?;
    let spec = y_spec(p)?;
    let norm = PI.powf(-p.dim() / 2.0) * t.powf(p.alpha - 1.0);
    if r == 0.0 {
        return origin_limit(&spec, p, t)?.map(|v| norm * v).ok_or(Error::SingularAtOrigin);
    }
    let h = fox_h::eval(&spec, p.fox_argument(t, r), &kernel_policy())?;
    Ok(norm * r.powf(-p.dim()) * h)
}

/// ∂_r Z(t, r); the gradient is this times x/|x|.
pub fn z_radial_derivative(p: &FracParams, t: f64, r: f64) -> Result<f64> {
    check_tr(t, r)?;
    if r == 0.0 {
        return Err(Error::SingularAtOrigin);
    }
    let h = fox_h::eval(&grad_z_spec(p)?, p.fox_argument(t, r), &kernel_policy())?;
    Ok(-2.0 * PI.powf(-p.dim() / 2.0) * r.powf(-p.dim() - 1.0) * h)
}

/// |∇Z(t, x)| for |x| = r.
pub fn z_gradient_norm(p: &FracParams, t: f64, r: f64) -> Result<f64> {
    z_radial_derivative(p, t, r).map(f64::abs)
}

/// ∇Z(t, x) as a vector.
pub fn z_gradient(p: &FracParams, t: f64, x: &[f64]) -> Result<Vec<f64>> {
    if x.len() != p.d {
        return Err(invalid("point dimension does not match d"));
    }
    let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let dr = z_radial_derivative(p, t, r)?;
    Ok(x.iter().map(|v| dr * v / r).collect())
}

/// |∇Y(t, x)| for |x| = r.
pub fn y_gradient_norm(p: &FracParams, t: f64, r: f64) -> Result<f64> {
    check_tr(t, r)?;
    if r == 0.0 {
        return Err(Error::SingularAtOrigin);
    }
    let h = fox_h::eval(&grad_y_spec(p)?, p.fox_argument(t, r), &kernel_policy())?;
    Ok((2.0 * PI.powf(-p.dim() / 2.0) * t.powf(p.alpha - 1.0) * r.powf(-p.dim() - 1.0) * h).abs())
}

/// ∂_t Y(t, r), signed.
pub fn y_time_derivative(p: &FracParams, t: f64, r: f64) -> Result<f64> {
    check_tr(t, r)?;
    let spec = dt_y_spec(p)?;
    let norm = PI.powf(-p.dim() / 2.0) * t.powf(p.alpha - 2.0);
    if r == 0.0 {
        return origin_limit(&spec, p, t)?.map(|v| norm * v).ok_or(Error::SingularAtOrigin);
    }
    let h = fox_h::eval(&spec, p.fox_argument(t, r), &kernel_policy())?;
    Ok(norm * r.powf(-p.dim()) * h)
}

/// Fourier transform of Z: (2π)^{-d/2} E_{α,1}(-|ξ|^β t^α).
pub fn z_hat(p: &FracParams, t: f64, xi: f64) -> Result<f64> {
    check_tr(t, xi)?;
    let e = mittag_leffler(p.alpha, 1.0, -xi.powf(p.beta) * t.powf(p.alpha), &ToleranceConfig::default())?;
    Ok((2.0 * PI).powf(-p.dim() / 2.0) * e)
}

/// Fourier transform of Y: (2π)^{-d/2} t^{α-1} E_{α,α}(-|ξ|^β t^α).
pub fn y_hat(p: &FracParams, t: f64, xi: f64) -> Result<f64> {
    check_tr(t, xi)?;
    let e = mittag_leffler(p.alpha, p.alpha, -xi.powf(p.beta) * t.powf(p.alpha), &ToleranceConfig::default())?;
    Ok((2.0 * PI).powf(-p.dim() / 2.0) * t.powf(p.alpha - 1.0) * e)
}

/// Kernel value for `kind`, as a magnitude for the derivative kinds.
pub fn kernel_value(kind: KernelKind, p: &FracParams, t: f64, r: f64) -> Result<f64> {
    match kind {
        KernelKind::Z => z_kernel(p, t, r),
        KernelKind::Y => y_kernel(p, t, r),
        KernelKind::GradZ => z_gradient_norm(p, t, r),
        KernelKind::GradY => y_gradient_norm(p, t, r),
        KernelKind::DtY => y_time_derivative(p, t, r).map(f64::abs),
    }
}

fn y_small_envelope(p: &FracParams, t: f64, r: f64, big_r: f64) -> f64 {
    let (a, b, d) = (p.alpha, p.beta, p.dim());
    if a < 1.0 && d > 2.0 * b {
        t.powf(-a - 1.0) * r.powf(2.0 * b - d)
    } else if a < 1.0 && p.d_equals_two_beta() {
        t.powf(-a - 1.0) * (big_r.ln() - b * 2f64.ln()).abs()
    } else {
        t.powf(a - 1.0 - a * d / b)
    }
}

/// Two-regime envelope of a kernel quantity at (t, r).
///
/// For the gradient of Z at α = 1 the small-R behaviour is t^{-(d+2)/β} r
/// (the singular pole family cancels), and for ∂_t Y at α = 1/2 or β = 2
/// the large-R envelope is only an upper bound, as it is for Z, Y and their
/// gradients at β = 2.
pub fn asymptotic_envelope(kind: KernelKind, p: &FracParams, t: f64, r: f64) -> Result<RegimeEstimate> {
    check_tr(t, r)?;
    let (a, b, d) = (p.alpha, p.beta, p.dim());
    let big_r = p.similarity(t, r);
    let regime = if big_r <= 1.0 { Regime::Small } else { Regime::Large };
    let regular_at_origin = match kind {
        KernelKind::Z => a == 1.0 || b > d,
        KernelKind::Y | KernelKind::DtY => a == 1.0 || d < 2.0 * b,
        KernelKind::GradZ | KernelKind::GradY => false,
    };
    if r == 0.0 && !regular_at_origin {
        return Err(Error::SingularAtOrigin);
    }
    let beta2 = b == 2.0;
    let (envelope, two_sided) = match (kind, regime) {
        (KernelKind::Z, Regime::Small) => {
            let e = if a == 1.0 || b > d {
                t.powf(-a * d / b)
            } else if p.beta_equals_d() {
                t.powf(-a) * (big_r.ln().abs() + 1.0)
            } else {
                t.powf(-a) * r.powf(b - d)
            };
            (e, true)
        }
        (KernelKind::Z, Regime::Large) => (t.powf(a) * r.powf(-d - b), !beta2),
        (KernelKind::Y, Regime::Small) => (y_small_envelope(p, t, r, big_r), true),
        (KernelKind::Y, Regime::Large) => (t.powf(2.0 * a - 1.0) * r.powf(-d - b), !beta2),
        (KernelKind::GradZ, Regime::Small) => {
            let e = if a == 1.0 { t.powf(-(d + 2.0) / b) * r } else { t.powf(-a) * r.powf(-d - 1.0 + b) };
            (e, true)
        }
        (KernelKind::GradZ, Regime::Large) => (t.powf(a) * r.powf(-d - 1.0 - b), !beta2),
        (KernelKind::GradY, Regime::Small) => {
            let e = if a < 1.0 && d + 2.0 > 2.0 * b {
                t.powf(-a - 1.0) * r.powf(-d - 1.0 + 2.0 * b)
            } else if a < 1.0 && d + 2.0 == 2.0 * b {
                t.powf(-a - 1.0) * r * (big_r.ln() - b * 2f64.ln()).abs()
            } else {
                t.powf(a - 1.0 - a * (d + 2.0) / b) * r
            };
            (e, true)
        }
        (KernelKind::GradY, Regime::Large) => (t.powf(2.0 * a - 1.0) * r.powf(-d - 1.0 - b), !beta2),
        (KernelKind::DtY, Regime::Small) => (y_small_envelope(p, t, r, big_r) / t, true),
        (KernelKind::DtY, Regime::Large) => (t.powf(2.0 * a - 2.0) * r.powf(-d - b), !beta2 && a != 0.5),
    };
    Ok(RegimeEstimate { r_sim: big_r, regime, envelope, two_sided })
}

/// One branch of the regime asymptotics with a representative parameter
/// triple: α = 1/2 unless the branch needs α = 1, and α = 0.7 for the
/// large-R side of ∂_t Y, whose leading coefficient vanishes at α = 1/2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeBranch {
    pub kind: KernelKind,
    pub params: FracParams,
    pub regime: Regime,
    pub label: &'static str,
}

/// Every two-sided branch of the Z, Y, ∇Z, ∇Y and ∂_t Y asymptotics.
pub fn envelope_branches() -> Vec<EnvelopeBranch> {
    use KernelKind::*;
    use Regime::*;
    let table: [(KernelKind, f64, f64, usize, Regime, &'static str); 21] = [
        (Z, 0.5, 1.5, 1, Small, "Z small, beta > d"),
        (Z, 0.5, 1.0, 1, Small, "Z small, beta = d (log)"),
        (Z, 0.5, 1.0, 2, Small, "Z small, beta < d"),
        (Z, 1.0, 1.0, 2, Small, "Z small, alpha = 1"),
        (Z, 0.5, 1.0, 2, Large, "Z large"),
        (Y, 0.5, 0.8, 2, Small, "Y small, d > 2 beta"),
        (Y, 0.5, 1.0, 2, Small, "Y small, d = 2 beta (log)"),
        (Y, 0.5, 1.5, 1, Small, "Y small, d < 2 beta"),
        (Y, 1.0, 0.8, 2, Small, "Y small, alpha = 1"),
        (Y, 0.5, 1.0, 2, Large, "Y large"),
        (GradZ, 0.5, 1.2, 1, Small, "gradZ small"),
        (GradZ, 1.0, 1.2, 2, Small, "gradZ small, alpha = 1"),
        (GradZ, 0.5, 1.2, 1, Large, "gradZ large"),
        (GradY, 0.5, 1.2, 1, Small, "gradY small, d + 2 > 2 beta"),
        (GradY, 0.5, 2.0, 2, Small, "gradY small, d + 2 = 2 beta (log)"),
        (GradY, 1.0, 1.5, 1, Small, "gradY small, alpha = 1"),
        (GradY, 0.5, 1.2, 1, Large, "gradY large"),
        (DtY, 0.5, 0.8, 2, Small, "dtY small, d > 2 beta"),
        (DtY, 0.5, 1.5, 1, Small, "dtY small, d < 2 beta"),
        (DtY, 0.5, 1.0, 2, Small, "dtY small, d = 2 beta (log)"),
        (DtY, 0.7, 1.5, 1, Large, "dtY large"),
    ];
    table
        .iter()
        .map(|&(kind, a, b, d, regime, label)| EnvelopeBranch {
            kind,
            params: FracParams::new(a, b, d).expect("table parameters are admissible"),
            regime,
            label,
        })
        .collect()
}

/// Ratios value/envelope at `n_t` × `n_r` samples: t log-spaced on
/// [0.1, 10^{1.25}] and R log-spaced on [1e-4, 1] (small) or [1, 1e4] (large).
pub fn envelope_ratios(branch: &EnvelopeBranch, n_t: usize, n_r: usize) -> Result<Vec<(f64, f64)>> {
    let p = &branch.params;
    let (lo, hi): (f64, f64) = match branch.regime {
        Regime::Small => (1e-4, 1.0),
        Regime::Large => (1.0, 1e4),
    };
    let mut out = Vec::with_capacity(n_t * n_r);
    for i in 0..n_t {
        let t = 10f64.powf(-1.0 + 2.25 * i as f64 / (n_t.max(2) - 1) as f64);
        for j in 0..n_r {
            let big_r = lo * (hi / lo).powf(j as f64 / (n_r.max(2) - 1) as f64);
            let r = (big_r * t.powf(p.alpha)).powf(1.0 / p.beta);
            let env = asymptotic_envelope(branch.kind, p, t, r)?;
            let v = kernel_value(branch.kind, p, t, r)?;
            out.push((big_r, v / env.envelope));
        }
    }
    Ok(out)
}

/// κ₁ = d/(d-β+1), κ₂ = d/(d-2β), κ₃ = d/(d-β), each +∞ where the
/// denominator is not positive.
pub fn kappa_thresholds(p: &FracParams) -> KappaThresholds {
    let d = p.dim();
    let b = p.beta;
    let k = |den: f64| if den > 0.0 { d / den } else { f64::INFINITY };
    KappaThresholds { kappa1: k(d - b + 1.0), kappa2: k(d - 2.0 * b), kappa3: k(d - b) }
}

/// Decay envelope of the L^p norm of Z, Y or ∇Z in time.
pub fn kernel_lp_bound(kind: KernelKind, p: &FracParams, lp: f64, _t: f64) -> Result<LpBound> {
    if !(lp >= 1.0) {
        return Err(invalid("p must be at least 1"));
    }
    let (a, b, d) = (p.alpha, p.beta, p.dim());
    let k = kappa_thresholds(p);
    let inv = if lp.is_infinite() { 0.0 } else { 1.0 / lp };
    let spread = a * d / b * (1.0 - inv);
    let (ok, threshold, base, weak) = match kind {
        KernelKind::Z => {
            let all = a == 1.0 || (p.d == 1 && b >= 1.0);
            (all || lp < k.kappa3, k.kappa3, 0.0, -a)
        }
        KernelKind::Y => {
            let all = a == 1.0 || d < 2.0 * b;
            (all || lp < k.kappa2, k.kappa2, a - 1.0, -1.0 - a)
        }
        KernelKind::GradZ => {
            let heat_like = p.d == 1 && b == 2.0 && lp.is_infinite();
            (heat_like || lp < k.kappa1, k.kappa1, -a / b, -a)
        }
        KernelKind::GradY | KernelKind::DtY => {
            return Err(Error::Unsupported("L^p bounds are stated for Z, Y and ∇Z only".into()))
        }
    };
    if ok {
        return Ok(LpBound::Power { exponent: base - spread });
    }
    let weak_exponent = (lp == threshold && threshold.is_finite()).then_some(weak);
    Ok(LpBound::Unbounded { weak_exponent })
}

/// Surface area of the unit sphere in R^d.
pub fn sphere_area(d: usize) -> f64 {
    let h = d as f64 / 2.0;
    2.0 * PI.powf(h) / gamma(h).unwrap_or(f64::NAN)
}

/// ∫_{R^d} Z(t, x) dx by Gauss-Legendre quadrature in ln r between
/// z = 1e-12 and z = 1e4, plus the closed-form tail of the h₁, h₂ terms of
/// the expansion at infinity.
pub fn z_mass(p: &FracParams, t: f64) -> Result<f64> {
    check_tr(t, 1.0)?;
    let (z_min, z_max) = (1e-12, 1e4);
    let ln_r = |z: f64| (z.ln() + p.beta * 2f64.ln() + p.alpha * t.ln()) / p.beta;
    let (u0, u1) = (ln_r(z_min), ln_r(z_max));
    let rule = GaussRule::new(16);
    let panels = ((u1 - u0) * 2.0).ceil() as usize;
    let w = (u1 - u0) / panels as f64;
    let d = p.dim();
    let mut body = 0.0;
    for k in 0..panels {
        let a = u0 + k as f64 * w;
        for (u, wt) in rule.points(a, a + w) {
            let r = u.exp();
            body += wt * z_kernel(p, t, r)? * r.powf(d);
        }
    }
    let area = sphere_area(p.d);
    let r0 = u1.exp();
    let h = fox_h::h_coefficients(&z_spec(p)?, 2)?;
    let mut tail = 0.0;
    for (k, &hk) in h.iter().enumerate().skip(1) {
        let kb = k as f64 * p.beta;
        // ∫_{r0}^∞ π^{-d/2} r^{-d} h_k z^{-k} r^{d-1} dr
        tail += PI.powf(-d / 2.0) * hk * 2f64.powf(kb) * t.powf(k as f64 * p.alpha) * r0.powf(-kb) / kb;
    }
    Ok(area * (body + tail))
}

/// ∂_t^{1-α} of t ↦ Z(t, r) at time t by Grünwald-Letnikov differences on
/// n and 2n uniform steps, combined by Richardson extrapolation. By the
/// Z-Y link this approximates Y(t, r).
pub fn fractional_derivative_of_z(p: &FracParams, t: f64, r: f64, n: usize) -> Result<f64> {
    check_tr(t, r)?;
    if r == 0.0 {
        return Err(Error::SingularAtOrigin);
    }
    if n < 8 {
        return Err(invalid("need at least 8 time steps"));
    }
    let order = 1.0 - p.alpha;
    let gl = |m: usize| -> Result<f64> {
        let dt = t / m as f64;
        let w = gl_weights(order, m);
        let mut acc = 0.0;
        // Z(0, r) = 0 for r > 0
        for (k, wk) in w.iter().enumerate().take(m) {
            let s = t - k as f64 * dt;
            acc += wk * z_kernel(p, s, r)?;
        }
        Ok(acc * dt.powf(-order))
    };
    let coarse = gl(n)?;
    let fine = gl(2 * n)?;
    Ok(2.0 * fine - coarse)
}
