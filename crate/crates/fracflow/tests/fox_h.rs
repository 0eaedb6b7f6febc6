use fracflow::fox_h::{
    enumerate_poles, eval, eval_contour, eval_detailed, eval_large, eval_small, eval_small_inverted, h_coefficients,
    mellin_kernel, residue, Branch, EvalPolicy, FoxHSpec,
};
use fracflow::quadrature::{exp_sinh, tanh_sinh};
use fracflow::special_functions::{gamma, mittag_leffler, ToleranceConfig};
use fracflow::Error;
use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::PI;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// (1/2πi)∮ kernel(s) z^{-s} ds on a small circle, 4096-point trapezoid.
fn circle_residue(spec: &FoxHSpec, s0: f64, radius: f64, z: f64) -> f64 {
    let n = 4096;
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..n {
        let th = 2.0 * PI * (k as f64 + 0.5) / n as f64;
        let e = Complex64::new(th.cos(), th.sin());
        let s = s0 + radius * e;
        let v = mellin_kernel(spec, s).unwrap() * (-s * z.ln()).exp();
        // ds = i r e dθ, divided by 2πi
        acc += v * radius * e / n as f64;
    }
    acc.re
}

#[test]
fn gaussian_family_in_every_regime() {
    let pol = EvalPolicy::default();
    for d in [1.0, 2.0, 3.0] {
        let spec = FoxHSpec::z_kernel(1.0, 2.0, d).unwrap();
        for &z in &[1e-6, 0.01, 0.3, 1.0, 4.0, 30.0, 300.0] {
            let exact = (d / 2.0 * f64::ln(z) - z).exp();
            let v = eval(&spec, z, &pol).unwrap();
            assert!(rel(v, exact) < 1e-10, "d={d} z={z}: {v} vs {exact}");
        }
    }
}

#[test]
fn cauchy_kernel_crosses_the_convergence_radius() {
    // α = β = 1, d = 1: μ = 0 and δ = 1/2; H(z) = 2z/(√π(1+4z²))
    let pol = EvalPolicy::default();
    let spec = FoxHSpec::z_kernel(1.0, 1.0, 1.0).unwrap();
    assert!(spec.mu().abs() < 1e-15);
    assert!((spec.delta() - 0.5).abs() < 1e-15);
    for &z in &[1e-3, 0.1, 0.4, 0.47, 0.5, 0.55, 1.0, 10.0, 1e4] {
        let exact = 2.0 * z / (PI.sqrt() * (1.0 + 4.0 * z * z));
        let ev = eval_detailed(&spec, z, &pol).unwrap();
        assert!(rel(ev.value, exact) < 1e-10, "z={z}: {ev:?} vs {exact}");
    }
    assert!(matches!(eval_small(&spec, 0.46, &pol), Err(Error::OutOfConvergenceRegion { .. })));
}

#[test]
fn mittag_leffler_table_matches_direct_evaluation() {
    let pol = EvalPolicy::default();
    let tol = ToleranceConfig::default();
    for &(a, b) in &[(0.5, 1.0), (0.7, 0.7), (0.9, 1.9), (0.3, 1.0), (1.0, 1.0)] {
        let spec = FoxHSpec::mittag_leffler(a, b).unwrap();
        for &x in &[0.05, 0.8, 2.5, 7.0, 40.0] {
            let want = mittag_leffler(a, b, -x, &tol).unwrap();
            let got = eval(&spec, x, &pol).unwrap();
            assert!((got - want).abs() < 1e-10 * want.abs().max(1e-3), "({a},{b}) x={x}: {got} vs {want}");
        }
    }
}

#[test]
fn residues_match_circle_integrals() {
    // α = 1/2, β = 1, d = 1: s = -1 is a double pole, s = -2 is cancelled,
    // right poles sit at odd integers only.
    let spec = FoxHSpec::z_kernel(0.5, 1.0, 1.0).unwrap();
    let poles = enumerate_poles(&spec, 6);
    assert_eq!(poles.left[0].location, -1.0);
    assert_eq!(poles.left[0].order, 2);
    assert!(poles.left.iter().all(|p| (p.location + 2.0).abs() > 1e-6));
    assert!(poles.right.iter().all(|p| (p.location.round() as i64) % 2 != 0));
    for &z in &[0.3, 1.7] {
        for p in poles.left.iter().take(4).chain(poles.right.iter().take(3)) {
            let r = residue(&spec, p, z).unwrap();
            let c = circle_residue(&spec, p.location, 0.2, z);
            assert!((r - c).abs() < 1e-11 * (1.0 + c.abs()), "pole {p:?} z={z}: {r} vs {c}");
        }
        let c = circle_residue(&spec, -2.0, 0.2, z);
        assert!(c.abs() < 1e-11, "cancelled pole left residue {c}");
    }
}

#[test]
fn pole_hit_and_denominator_zero() {
    let spec = FoxHSpec::z_kernel(0.5, 1.0, 1.0).unwrap();
    assert!(matches!(mellin_kernel(&spec, Complex64::new(-1.0, 0.0)), Err(Error::PoleHit(_))));
    assert!(matches!(mellin_kernel(&spec, Complex64::new(1.0, 0.0)), Err(Error::PoleHit(_))));
    // Γ(1 + s) Γ(-s) / (Γ(1 + s) Γ(-s)) cancels to 1 for α = 1, β = 2, d = 2
    let unit = FoxHSpec::z_kernel(1.0, 2.0, 2.0).unwrap();
    let v = mellin_kernel(&unit, Complex64::new(0.3, 0.4)).unwrap();
    let g = fracflow::special_functions::log_gamma(Complex64::new(1.3, 0.4)).unwrap().exp();
    assert!((v - g).norm() < 1e-13 * g.norm());
}

#[test]
fn leading_coefficient_at_infinity() {
    // h₁ = (β/2) Γ((d+β)/2) / (Γ(1+α) Γ(1-β/2)); h₀ vanishes by cancellation
    for &(a, b, d) in &[(0.5, 1.0, 1.0), (0.8, 1.5, 2.0), (0.3, 0.7, 3.0), (1.0, 1.0, 1.0)] {
        let spec = FoxHSpec::z_kernel(a, b, d).unwrap();
        let h = h_coefficients(&spec, 2).unwrap();
        assert_eq!(h[0], 0.0);
        let want = 0.5 * b * gamma((d + b) / 2.0).unwrap() / (gamma(1.0 + a).unwrap() * gamma(1.0 - b / 2.0).unwrap());
        assert!(rel(h[1], want) < 1e-13, "{h:?} vs {want}");
    }
    let h = h_coefficients(&FoxHSpec::z_kernel(0.5, 1.0, 1.0).unwrap(), 1).unwrap();
    assert!((h[1] - 1.0 / PI).abs() < 1e-15);
    // Cauchy: h₁ = 1/(2√π)
    let h = h_coefficients(&FoxHSpec::z_kernel(1.0, 1.0, 1.0).unwrap(), 1).unwrap();
    assert!((h[1] - 0.5 / PI.sqrt()).abs() < 1e-15);
    // Gaussian: all coefficients vanish
    let h = h_coefficients(&FoxHSpec::z_kernel(1.0, 2.0, 1.0).unwrap(), 5).unwrap();
    assert!(h.iter().all(|&x| x == 0.0));
}

#[test]
fn exponentially_small_expansion_reports_a_bound() {
    let pol = EvalPolicy::default();
    let spec = FoxHSpec::z_kernel(1.0, 2.0, 1.0).unwrap();
    let e = eval_large(&spec, 40.0, &pol).unwrap();
    assert_eq!(e.value, 0.0);
    let exact = 40f64.sqrt() * (-40f64).exp();
    assert!(e.err >= exact, "bound {} below {exact}", e.err);
}

#[test]
fn inversion_and_shift_identities() {
    let pol = EvalPolicy::default();
    for spec in [
        FoxHSpec::z_kernel(0.6, 1.3, 2.0).unwrap(),
        FoxHSpec::y_kernel(0.8, 0.9, 1.0).unwrap(),
        FoxHSpec::z_kernel(0.4, 1.8, 3.0).unwrap(),
    ] {
        for &z in &[0.02, 0.7, 3.0, 60.0] {
            let v = eval(&spec, z, &pol).unwrap();
            let inv = eval(&spec.swapped(), 1.0 / z, &pol).unwrap();
            let sh = eval(&spec.shifted(), z, &pol).unwrap();
            assert!(rel(inv, v) < 1e-8, "{spec:?} z={z}: {inv} vs {v}");
            assert!(rel(sh, z * v) < 1e-8, "{spec:?} z={z}: {sh} vs {}", z * v);
        }
    }
}

#[test]
fn mellin_transform_of_mittag_leffler() {
    let tol = ToleranceConfig::default();
    let (a, b) = (0.6, 1.2);
    let spec = FoxHSpec::mittag_leffler(a, b).unwrap();
    let e = |x: f64| mittag_leffler(a, b, -x, &tol).unwrap();
    for &s in &[0.3, 0.7] {
        let near = tanh_sinh(|x, _| e(x) * x.powf(s - 1.0), 0.0, 1.0, 1e-12).value;
        let far = exp_sinh(|x| e(x) * x.powf(s - 1.0), 1.0, 1e-12).value;
        let want = mellin_kernel(&spec, Complex64::new(s, 0.0)).unwrap().re;
        assert!(rel(near + far, want) < 1e-8, "s={s}: {} vs {want}", near + far);
    }
    // left of the strip, subtract the value at the origin
    let e0 = 1.0 / gamma(b).unwrap();
    let s = -0.4;
    // near the origin the difference vanishes like x^α; avoid 0 * inf
    let g = |x: f64| {
        let diff = e(x) - e0;
        if diff == 0.0 {
            0.0
        } else {
            diff * x.powf(s - 1.0)
        }
    };
    let near = tanh_sinh(|x, _| g(x), 0.0, 1.0, 1e-12).value;
    let far = exp_sinh(|x| (e(x) - e0) * x.powf(s - 1.0), 1.0, 1e-12).value;
    let want = mellin_kernel(&spec, Complex64::new(s, 0.0)).unwrap().re;
    assert!(rel(near + far, want) < 1e-8, "s={s}: {} vs {want}", near + far);
}

#[test]
fn series_rejects_divergent_tables() {
    let pol = EvalPolicy::default();
    // μ < 0 when β < α: left series is asymptotic
    let spec = FoxHSpec::z_kernel(0.9, 0.5, 1.0).unwrap();
    assert!(spec.mu() < 0.0);
    assert!(matches!(eval_small(&spec, 0.1, &pol), Err(Error::OutOfConvergenceRegion { .. })));
    let inv = eval_small_inverted(&spec, 1e-4, &pol).unwrap();
    let c = eval_contour(&spec, 1e-4, &pol).unwrap();
    assert!(rel(inv.value, c.value) < 1e-9, "{inv:?} {c:?}");
}

#[test]
fn crossover_band_reports_a_consistent_value() {
    let spec = FoxHSpec::z_kernel(0.7, 1.4, 2.0).unwrap();
    let pol = EvalPolicy::default();
    let below = EvalPolicy { crossover_z: 0.5, ..pol };
    let above = EvalPolicy { crossover_z: 2.0, ..pol };
    for &z in &[0.6, 1.0, 1.8] {
        let a = eval_detailed(&spec, z, &below).unwrap();
        let b = eval_detailed(&spec, z, &above).unwrap();
        assert!(rel(a.value, b.value) < 1e-9, "z={z} {a:?} {b:?}");
        assert!(a.branch != Branch::LeftSeries || z < 0.5);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn dispatch_agrees_with_line_integral(
        alpha in 0.2f64..1.0,
        beta in 0.3f64..1.95,
        d in 1usize..=3,
        lz in -6.0f64..6.0,
    ) {
        let spec = FoxHSpec::z_kernel(alpha, beta, d as f64).unwrap();
        let pol = EvalPolicy::default();
        let z = lz.exp();
        let ev = eval_detailed(&spec, z, &pol).unwrap();
        prop_assert!(ev.value > 0.0, "{:?}", ev);
        let c = eval_contour(&spec, z, &pol).unwrap();
        prop_assert!(rel(ev.value, c.value) < 1e-8, "{:?} vs {:?}", ev, c);
    }
}
