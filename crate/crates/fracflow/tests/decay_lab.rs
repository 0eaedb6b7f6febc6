use fracflow::decay_lab::*;
use fracflow::kernels::FracParams;
use fracflow::special_functions::gamma;
use fracflow::transform_solver::{Field, SpectralGrid};
use fracflow::Error;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

fn line(n: usize, half: f64) -> SpectralGrid {
    SpectralGrid::new(1, n, half).unwrap()
}

#[test]
fn strong_norms() {
    let g = line(256, 16.0);
    let mut ind = Field::zeros(g, 0.0);
    for v in &mut ind.values[100..140] {
        *v = 1.0;
    }
    let vol = 40.0 * g.dx();
    for &p in &[1.0, 2.0, 3.5] {
        assert!((lp_norm(&ind, p) - vol.powf(1.0 / p)).abs() < 1e-12);
    }
    assert_eq!(lp_norm(&ind, f64::INFINITY), 1.0);

    let gauss = Field::from_fn(line(512, 12.0), 0.0, |x| (-x[0] * x[0]).exp());
    assert!((lp_norm(&gauss, 2.0) - (PI / 2.0).powf(0.25)).abs() < 1e-6);
    let scaled = Field { values: gauss.values.iter().map(|v| -3.0 * v).collect(), ..gauss.clone() };
    assert!((lp_norm(&scaled, 1.5) - 3.0 * lp_norm(&gauss, 1.5)).abs() < 1e-12);
}

#[test]
fn weak_norm_stays_finite_where_the_strong_norm_diverges() {
    // |x|^{-1/2} sampled at cell centres. The two cells at distance h/2 tie for
    // the top level, which puts the discrete weak L² quasinorm at exactly 2 on
    // every grid while the L² norm grows like log(1/h)
    let sample = |n: usize| {
        let g = line(n, 8.0);
        let h = g.dx();
        Field::from_fn(g, 0.0, move |x| (x[0] + 0.5 * h).abs().powf(-0.5))
    };
    let (coarse, fine) = (sample(256), sample(4096));
    let (w1, w2) = (weak_lp_quasinorm(&coarse, 2.0).unwrap(), weak_lp_quasinorm(&fine, 2.0).unwrap());
    assert!((w1 - 2.0).abs() < 1e-9 && (w2 - 2.0).abs() < 1e-9, "{w1} {w2}");
    assert!(lp_norm(&fine, 2.0) > lp_norm(&coarse, 2.0) + 0.5);

    let scaled = Field { values: fine.values.iter().map(|v| 2.5 * v).collect(), ..fine.clone() };
    let ws = weak_lp_quasinorm(&scaled, 2.0).unwrap();
    assert!((ws - 2.5 * w2).abs() < 1e-9 * ws);
    assert!(weak_lp_quasinorm(&fine, 1.0).is_err());
    assert_eq!(weak_lp_quasinorm(&Field::zeros(line(64, 1.0), 0.0), 2.0).unwrap(), 0.0);
}

#[test]
fn weak_norm_never_exceeds_the_strong_norm() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let g = line(128, 5.0);
    for _ in 0..100 {
        let p = rng.gen_range(1.1..4.0);
        let values = (0..g.n)
            .map(|_| {
                let v: f64 = rng.gen_range(-1.0..1.0);
                v.powi(3) * 10f64.powf(rng.gen_range(-3.0..2.0))
            })
            .collect();
        let f = Field::new(g, values, 0.0).unwrap();
        assert!(weak_lp_quasinorm(&f, p).unwrap() <= lp_norm(&f, p) * (1.0 + 1e-12));
    }
}

#[test]
fn gagliardo_seminorm_cases() {
    let g = line(128, 8.0);
    let constant = Field::from_fn(g, 0.0, |_| 3.0);
    assert_eq!(gagliardo_seminorm(&Field::zeros(g, 0.0), 0.3, 2.0).unwrap(), 0.0);
    // off the grid the field is zero, so a constant only jumps at the boundary
    let unit = Field::from_fn(g, 0.0, |_| 1.0);
    for p in [1.0, 2.0] {
        let (big, one) = (gagliardo_seminorm(&constant, 0.3, p).unwrap(), gagliardo_seminorm(&unit, 0.3, p).unwrap());
        assert!(one > 0.0 && (big / one - 3.0).abs() < 1e-12);
    }

    // [e^{-x²}]_{1/2,2}² = (1/π) c ∫|ξ||v̂|² dξ with c = π/(Γ(2) sin(π/2)), which is 2π
    let s = 0.5;
    let c = PI / (gamma(1.0 + 2.0 * s).unwrap() * (PI * s).sin());
    let exact = (c / PI * PI * 2f64.powf(s + 0.5) * gamma(s + 0.5).unwrap()).sqrt();
    assert!((exact - (2.0 * PI).sqrt()).abs() < 1e-12);
    let gauss = |n| Field::from_fn(line(n, 8.0), 0.0, |x| (-x[0] * x[0]).exp());
    let (a, b) = (gagliardo_seminorm(&gauss(256), s, 2.0).unwrap(), gagliardo_seminorm(&gauss(512), s, 2.0).unwrap());
    assert!((a / b - 1.0).abs() < 0.01, "{a} {b}");
    assert!((b / exact - 1.0).abs() < 0.01, "{b} vs {exact}");

    // indicator of one cell: [1_cell]_{s,p}^p ∝ h^{1-sp}
    let cell = |n: usize| {
        let mut f = Field::zeros(line(n, 8.0), 0.0);
        f.values[n / 2] = 1.0;
        f
    };
    let (s, p) = (0.4, 2.0);
    let ratio = (gagliardo_seminorm(&cell(256), s, p).unwrap() / gagliardo_seminorm(&cell(512), s, p).unwrap()).powf(p);
    let predicted = 2f64.powf(1.0 - s * p);
    assert!((ratio / predicted - 1.0).abs() < 0.03, "{ratio} vs {predicted}");
    assert!(gagliardo_seminorm(&constant, 1.0, 1.0).is_err());
    assert!(gagliardo_seminorm(&constant, 0.5, 3.0).is_err());

    let plane = SpectralGrid::new(2, 32, 4.0).unwrap();
    let bump = Field::from_fn(plane, 0.0, |x| (-(x[0] * x[0] + x[1] * x[1])).exp());
    assert!(gagliardo_seminorm(&bump, 0.5, 1.0).unwrap() > 0.0);
}

fn series(f: impl Fn(f64) -> f64) -> NormSeries {
    let times = log_times(1.0, 1e4, 40);
    let values = times.iter().map(|&t| f(t)).collect();
    NormSeries::new(times, values, 2.0, false).unwrap()
}

#[test]
fn rate_fitting() {
    let fit = fit_rate(&series(|t| 3.0 * t.powf(-0.75)), (10.0, 1e3)).unwrap();
    assert!((fit.slope + 0.75).abs() < 1e-8);
    assert!((fit.intercept - 3f64.ln()).abs() < 1e-8);
    assert!(fit.r_squared > 1.0 - 1e-12);
    assert!(fit.window.0 >= 10.0 && fit.window.1 <= 1e3);

    let wobbly = fit_rate(&series(|t| t.powf(-0.6) * (1.0 + 0.1 * t.ln().sin())), (10.0, 1e3)).unwrap();
    assert!((wobbly.slope + 0.6).abs() < 0.05);

    let flat = fit_rate(&series(|_| 2.0), (10.0, 1e3)).unwrap();
    assert!(flat.slope.abs() < 1e-12 && flat.r_squared == 1.0);

    assert!(matches!(fit_rate(&series(|_| 2.0), (10.0, 20.0)), Err(Error::DegenerateWindow(_))));
    assert!(matches!(
        fit_rate(&series(|t| if t > 100.0 { 0.0 } else { 1.0 }), (10.0, 1e3)),
        Err(Error::DegenerateWindow(_))
    ));
    assert!(NormSeries::new(vec![1.0], vec![-1.0], 2.0, false).is_err());
    assert!(series(|t| t).to_csv().starts_with("t,value,p,weak\n1.0000000000000000e0,"));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn planted_exponents_are_recovered(slope in -3.0f64..1.0, amp in 1e-3f64..1e3) {
        let fit = fit_rate(&series(|t| amp * t.powf(slope)), (10.0, 1e3)).unwrap();
        prop_assert!((fit.slope - slope).abs() < 1e-6);
    }
}

#[test]
fn optimal_l2_examples() {
    let cfg = OptimalL2Config::default();
    for &(d, beta, alpha, expected) in
        &[(1, 2.0, 0.8, -0.2), (1, 0.4, 0.5, -0.5), (1, 2.0, 1.0, -0.25), (2, 2.0, 0.5, -0.25)]
    {
        let p = FracParams::new(alpha, beta, d).unwrap();
        assert!((optimal_l2_exponent(&p) - expected).abs() < 1e-12);
        let r = experiment_optimal_l2(&p, &InitialData::gaussian(d, 0.1), &cfg).unwrap();
        assert!(r.pass, "({d},{beta},{alpha}): fitted {}", r.fitted);
        assert!(r.details["lower_floor"] > 0.0);
    }
    let mut zero_mass = InitialData::two_bump(1, 0.5, 2.0);
    zero_mass.bumps[1].weight = -1.0;
    let p = FracParams::new(0.5, 1.0, 1).unwrap();
    assert!(experiment_optimal_l2(&p, &zero_mass, &cfg).is_err());
}

#[test]
fn critical_dimension_kink() {
    // α = 1/2, d = 1: the exponent follows -α min{1, d/(2β)}
    let cfg = OptimalL2Config::default();
    let fitted: Vec<(f64, f64)> = [1.0, 0.625, 0.4, 0.2]
        .iter()
        .map(|&beta| {
            let p = FracParams::new(0.5, beta, 1).unwrap();
            let r = experiment_optimal_l2(&p, &InitialData::gaussian(1, 0.1), &cfg).unwrap();
            (1.0 / (2.0 * beta), r.fitted)
        })
        .collect();
    for &(ratio, slope) in &fitted {
        assert!((slope + 0.5 * ratio.min(1.0)).abs() < 0.05, "{ratio}: {slope}");
    }
    // steep below the kink, flat above it
    let below = (fitted[1].1 - fitted[0].1) / (fitted[1].0 - fitted[0].0);
    let above = (fitted[3].1 - fitted[2].1) / (fitted[3].0 - fitted[2].0);
    assert!(below < -0.3 && above.abs() < 0.1, "{below} {above}");
}

#[test]
fn weak_norm_branch_at_d_equal_two_beta() {
    let p = FracParams::new(0.5, 0.5, 1).unwrap();
    let r = experiment_optimal_l2(&p, &InitialData::gaussian(1, 1.0), &OptimalL2Config::default()).unwrap();
    assert!(r.series[0].weak);
    assert!((r.fitted + 0.5).abs() < 0.05, "{}", r.fitted);
}

#[test]
fn convergence_to_the_kernel() {
    let p = FracParams::new(0.5, 1.5, 1).unwrap();
    let cfg = ConvergenceConfig::default();
    let r = experiment_convergence_to_z(&p, &InitialData::shifted_gaussian(1, 1.0, 2.0), 1.0, &cfg).unwrap();
    assert!(r.details["rescaled_max_over_min"] <= 5.0);
    assert_eq!(r.details["gap_decreasing"], 1.0);

    let sym = experiment_convergence_to_z(&p, &InitialData::two_bump(1, 1.0, 4.0), 1.0, &cfg).unwrap();
    assert_eq!(sym.details["gap_decreasing"], 1.0);
    // zero first moment: the gap falls faster than t^{-α/β}
    assert!(sym.fitted < r.fitted - 0.1, "{} vs {}", sym.fitted, r.fitted);

    let mut dipole = InitialData::two_bump(1, 1.0, 4.0);
    dipole.bumps[1].weight = -1.0;
    let z = experiment_convergence_to_z(&p, &dipole, 1.0, &cfg).unwrap();
    assert!(z.details["mass"].abs() < 1e-12);
    assert!(z.fitted < -0.2);

    assert!(experiment_convergence_to_z(&p, &dipole, 50.0, &cfg).is_err());
}

#[test]
fn forced_decay_branches() {
    let p = FracParams::new(0.5, 1.5, 1).unwrap();
    let cfg = ForcedConfig::default();
    assert!((forced_exponent(&p, 1.0, 1.0, 2.0) + 0.5).abs() < 1e-12);
    let fast = experiment_forced(&p, 1.0, 2.0, 1.0, &cfg).unwrap();
    assert!(fast.pass, "{}", fast.fitted);
    let slow = experiment_forced(&p, 1.0, 0.5, 1.0, &cfg).unwrap();
    assert!((slow.predicted).abs() < 1e-12);
    assert!(slow.pass, "{}", slow.fitted);
}

#[test]
fn weak_solution_decay_is_robust_to_the_kernel() {
    let p = FracParams::new(0.5, 1.0, 1).unwrap();
    assert!((weak_decay_exponent(&p) + 1.0 / 6.0).abs() < 1e-12);
    let cfg = WeakDecayConfig { steps: 1000, window: (10.0, 500.0), ..Default::default() };
    let exact = experiment_weak_decay(&p, &cfg).unwrap();
    let rough = experiment_weak_decay(&p, &WeakDecayConfig { ratio: 0.5, ..cfg.clone() }).unwrap();
    assert!(exact.pass && rough.pass);
    assert!((exact.fitted - rough.fitted).abs() < 0.05);
    assert!(exact.details["seminorm_time_integral"].is_finite());
    assert_eq!(rough.seed, cfg.seed);

    let json = serde_json::to_string(&exact).unwrap();
    let back: ExperimentReport = serde_json::from_str(&json).unwrap();
    assert_eq!(back, exact);
}
