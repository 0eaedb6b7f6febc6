//! Small quadrature toolbox: Gauss-Legendre rules, double-exponential
//! rules for endpoint singularities and half-infinite ranges, and Wynn's
//! epsilon algorithm for oscillatory tails.

use std::f64::consts::FRAC_PI_2;

/// Gauss-Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Fixed Gauss-Legendre rule mapped onto [a, b].
#[derive(Debug, Clone)]
pub struct GaussRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussRule {
    pub fn new(n: usize) -> Self {
        let (nodes, weights) = gauss_legendre(n);
        Self { nodes, weights }
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        let mut s = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            s += w * f(c + h * x);
        }
        s * h
    }

    /// Mapped nodes and weights on [a, b].
    pub fn points(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        self.nodes.iter().zip(&self.weights).map(move |(x, w)| (c + h * x, w * h))
    }
}

/// Result of an adaptive rule: value plus an error estimate.
#[derive(Debug, Clone, Copy)]
pub struct Quad {
    pub value: f64,
    pub error: f64,
}

/// Tanh-sinh rule on [a, b]. The integrand receives the abscissa and its
/// distance to the nearest endpoint, so endpoint singularities can be
/// evaluated without cancellation.
pub fn tanh_sinh<F: FnMut(f64, f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64) -> Quad {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let eval = |f: &mut F, t: f64| -> f64 {
        let u = FRAC_PI_2 * t.sinh();
        let cu = u.cosh();
        let w = half * FRAC_PI_2 * t.cosh() / (cu * cu);
        // distance of the node from the endpoint it approaches
        let delta = half * (-u.abs()).exp() / cu;
        if !(delta > 0.0) || w == 0.0 {
            return 0.0;
        }
        let (x, dist) = if t >= 0.0 { (b - delta, delta) } else { (a + delta, delta) };
        if t == 0.0 {
            return w * f(mid, half);
        }
        w * f(x, dist)
    };
    let tmax = 6.5;
    let mut h = 1.0;
    let mut sum = eval(&mut f, 0.0);
    let mut k = 1;
    loop {
        let t = k as f64 * h;
        if t > tmax {
            break;
        }
        sum += eval(&mut f, t) + eval(&mut f, -t);
        k += 1;
    }
    let mut prev = sum * h;
    let mut err = f64::INFINITY;
    for _level in 0..9 {
        h *= 0.5;
        let mut add = 0.0;
        let mut k = 1;
        loop {
            let t = k as f64 * h;
            if t > tmax {
                break;
            }
            add += eval(&mut f, t) + eval(&mut f, -t);
            k += 2;
        }
        sum += add;
        let cur = sum * h;
        err = (cur - prev).abs();
        prev = cur;
        if err <= tol * cur.abs().max(1e-300) {
            break;
        }
    }
    Quad { value: prev, error: err }
}

/// Exp-sinh rule on [a, inf).
pub fn exp_sinh<F: FnMut(f64) -> f64>(mut f: F, a: f64, tol: f64) -> Quad {
    let eval = |f: &mut F, t: f64| -> f64 {
        let e = (FRAC_PI_2 * t.sinh()).exp();
        if !e.is_finite() || e == 0.0 {
            return 0.0;
        }
        let w = FRAC_PI_2 * t.cosh() * e;
        let v = f(a + e);
        if v == 0.0 {
            0.0
        } else {
            w * v
        }
    };
    let tmin: f64 = -4.5;
    let tmax: f64 = 4.5;
    let mut h = 0.5;
    let mut sum = 0.0;
    let n = ((tmax - tmin) / h).round() as i64;
    for k in 0..=n {
        sum += eval(&mut f, tmin + k as f64 * h);
    }
    let mut prev = sum * h;
    let mut err = f64::INFINITY;
    for _ in 0..9 {
        h *= 0.5;
        let n = ((tmax - tmin) / h).round() as i64;
        let mut add = 0.0;
        let mut k = 1;
        while k <= n {
            add += eval(&mut f, tmin + k as f64 * h);
            k += 2;
        }
        sum += add;
        let cur = sum * h;
        err = (cur - prev).abs();
        prev = cur;
        if err <= tol * cur.abs().max(1e-300) {
            break;
        }
    }
    Quad { value: prev, error: err }
}

/// Wynn epsilon extrapolation of a sequence of partial sums. Returns the
/// best estimate and the difference between the last two diagonal entries.
pub fn wynn_epsilon(partial: &[f64]) -> (f64, f64) {
    let n = partial.len();
    if n < 3 {
        let last = *partial.last().unwrap_or(&0.0);
        return (last, f64::INFINITY);
    }
    // e[k] holds column k of the epsilon table for the current anti-diagonal
    let mut prev_col: Vec<f64> = partial.to_vec();
    let mut prev_prev: Vec<f64> = vec![0.0; n + 1];
    let mut best = partial[n - 1];
    let mut best_err = (partial[n - 1] - partial[n - 2]).abs();
    let mut col = 1;
    while prev_col.len() > 1 {
        let mut next = Vec::with_capacity(prev_col.len() - 1);
        for i in 0..prev_col.len() - 1 {
            let diff = prev_col[i + 1] - prev_col[i];
            let base = if col == 1 { 0.0 } else { prev_prev[i + 1] };
            if diff == 0.0 {
                next.push(f64::INFINITY);
            } else {
                next.push(base + 1.0 / diff);
            }
        }
        if col % 2 == 0 && next.len() >= 2 {
            let a = next[next.len() - 1];
            let b = next[next.len() - 2];
            if a.is_finite() && b.is_finite() {
                let e = (a - b).abs();
                if e < best_err {
                    best_err = e;
                    best = a;
                }
            }
        }
        prev_prev = prev_col;
        prev_col = next;
        col += 1;
    }
    (best, best_err)
}
