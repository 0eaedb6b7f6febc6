use fracflow::kernels::{z_kernel, FracParams};
use fracflow::special_functions::gamma;
use fracflow::transform_solver::*;
use fracflow::Error;
use std::f64::consts::PI;

fn hot_cell(grid: SpectralGrid) -> Field {
    let mut u0 = Field::zeros(grid, 0.0);
    let centre = match grid.d {
        1 => grid.n / 2,
        _ => (grid.n / 2) * grid.n + grid.n / 2,
    };
    u0.values[centre] = 1.0 / grid.cell_volume();
    u0
}

fn l2(values: &[f64]) -> f64 {
    values.iter().map(|v| v * v).sum::<f64>().sqrt()
}

#[test]
fn hot_cell_spreads_as_the_heat_kernel() {
    let p = FracParams::new(1.0, 2.0, 1).unwrap();
    let grid = SpectralGrid::new(1, 256, 20.0).unwrap();
    let out = solve_homogeneous(&p, &hot_cell(grid), &[0.5, 1.0, 2.0]).unwrap();
    for u in &out {
        let t = u.time;
        for (j, v) in u.values.iter().enumerate() {
            let x = grid.coord(j);
            let exact = (-x * x / (4.0 * t)).exp() / (4.0 * PI * t).sqrt();
            assert!((v - exact).abs() < 1e-10, "t={t} x={x}: {v} vs {exact}");
        }
    }

    let p2 = FracParams::new(1.0, 2.0, 2).unwrap();
    let grid2 = SpectralGrid::new(2, 64, 12.0).unwrap();
    let out2 = solve_homogeneous(&p2, &hot_cell(grid2), &[1.0]).unwrap();
    for (i, v) in out2[0].values.iter().enumerate() {
        let x = grid2.point(i);
        let exact = (-(x[0] * x[0] + x[1] * x[1]) / 4.0).exp() / (4.0 * PI);
        assert!((v - exact).abs() < 1e-10);
    }
}

#[test]
fn mass_is_conserved() {
    let grid = SpectralGrid::new(1, 512, 60.0).unwrap();
    let u0 = Field::from_fn(grid, 0.0, |x| (-(x[0] - 1.0).powi(2)).exp() * (1.0 + 0.5 * x[0].sin()));
    let m0 = moments(&u0).mass;
    for &(a, b) in &[(0.5, 1.0), (0.3, 1.7), (0.9, 1.6)] {
        let p = FracParams::new(a, b, 1).unwrap();
        for u in solve_homogeneous(&p, &u0, &[0.1, 1.0, 10.0, 50.0]).unwrap() {
            assert!((moments(&u).mass - m0).abs() < 1e-8 * m0.abs());
        }
    }
    let grid2 = SpectralGrid::new(2, 64, 16.0).unwrap();
    let p2 = FracParams::new(0.7, 1.2, 2).unwrap();
    let u0 = Field::from_fn(grid2, 0.0, |x| (-(x[0] * x[0] + 2.0 * x[1] * x[1])).exp());
    let m0 = moments(&u0).mass;
    for u in solve_homogeneous(&p2, &u0, &[0.5, 5.0]).unwrap() {
        assert!((moments(&u).mass - m0).abs() < 1e-8 * m0);
    }
}

#[test]
fn plancherel_holds_for_solutions() {
    let grid = SpectralGrid::new(2, 64, 10.0).unwrap();
    let p = FracParams::new(0.5, 1.5, 2).unwrap();
    let u0 = Field::from_fn(grid, 0.0, |x| (-(x[0] * x[0]) - (x[1] - 1.0).powi(2)).exp() * x[0]);
    let u = &solve_homogeneous(&p, &u0, &[2.0]).unwrap()[0];
    let hat = forward(&grid, &u.values);
    let spectral = (hat.iter().map(|c| c.norm_sqr()).sum::<f64>() / grid.len() as f64).sqrt();
    let physical = l2(&u.values);
    assert!((spectral - physical).abs() <= 1e-10 * physical);
}

#[test]
fn l2_norm_of_a_point_source_decays_at_the_predicted_rate() {
    // d = 1 < 2β, so ‖Z(t)‖₂ ∝ t^{-αd/(2β)} = t^{-1/4}
    let p = FracParams::new(0.5, 1.0, 1).unwrap();
    let grid = SpectralGrid::new(1, 32768, 2000.0).unwrap();
    let times = [10.0, 100.0, 1000.0];
    let out = solve_homogeneous(&p, &hot_cell(grid), &times).unwrap();
    let norms: Vec<f64> = out.iter().map(|u| l2(&u.values)).collect();
    let slope = (norms[2] / norms[0]).ln() / (times[2] / times[0]).ln();
    assert!((slope + 0.25).abs() < 0.02, "slope {slope}");
}

#[test]
fn memory_breaks_the_semigroup_property() {
    let grid = SpectralGrid::new(1, 256, 30.0).unwrap();
    let u0 = Field::from_fn(grid, 0.0, |x| (-x[0] * x[0]).exp());
    let discrepancy = |alpha: f64| {
        let p = FracParams::new(alpha, 1.5, 1).unwrap();
        let direct = &solve_homogeneous(&p, &u0, &[2.0]).unwrap()[0];
        let half = solve_homogeneous(&p, &u0, &[1.0]).unwrap().remove(0);
        let restarted = &solve_homogeneous(&p, &Field { time: 0.0, ..half }, &[1.0]).unwrap()[0];
        let diff: Vec<f64> = direct.values.iter().zip(&restarted.values).map(|(a, b)| a - b).collect();
        l2(&diff) / l2(&direct.values)
    };
    assert!(discrepancy(0.5) > 1e-2);
    assert!(discrepancy(1.0) < 1e-12);
}

#[test]
fn coarse_frequency_grid_is_rejected() {
    let p = FracParams::new(0.5, 1.0, 1).unwrap();
    let grid = SpectralGrid::new(1, 64, 5.0).unwrap();
    let err = solve_homogeneous(&p, &hot_cell(grid), &[1e4]).unwrap_err();
    assert!(matches!(err, Error::GridTooCoarse(_)));
    assert!(SpectralGrid::new(1, 48, 5.0).is_err());
    assert!(SpectralGrid::new(3, 64, 5.0).is_err());
}

#[test]
fn zero_forcing_reproduces_the_homogeneous_solution() {
    let p = FracParams::new(0.6, 1.3, 1).unwrap();
    let grid = SpectralGrid::new(1, 128, 15.0).unwrap();
    let u0 = Field::from_fn(grid, 0.0, |x| 1.0 / (1.0 + x[0] * x[0]));
    let f = ForcingSchedule::separable(grid, 0.1, 20, |_| 0.0, |_| 0.0, None).unwrap();
    let times = [1.0, 2.0];
    let a = solve_forced(&p, &u0, &f, &times, 1e-3).unwrap();
    let b = solve_homogeneous(&p, &u0, &times).unwrap();
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(x.values, y.values);
    }
}

/// û(t) = ĝ Σ_k (-λ)^k t^{α(k+1)} / Γ(α(k+1)+1) for a constant source.
fn volterra_series(alpha: f64, lambda: f64, t: f64) -> f64 {
    let mut sum = 0.0;
    for k in 0..200 {
        let e = alpha * (k + 1) as f64;
        let term = (-lambda).powi(k) * t.powf(e) / gamma(e + 1.0).unwrap();
        sum += term;
        if term.abs() < 1e-17 * sum.abs() && k > 5 {
            break;
        }
    }
    sum
}

#[test]
fn constant_source_matches_the_volterra_series_per_mode() {
    let alpha = 0.4;
    let p = FracParams::new(alpha, 1.5, 1).unwrap();
    let grid = SpectralGrid::new(1, 64, 8.0).unwrap();
    let f = ForcingSchedule::separable(grid, 0.25, 8, |_| 1.0, |x| (-x[0] * x[0]).exp(), None).unwrap();
    let u = &solve_forced(&p, &Field::zeros(grid, 0.0), &f, &[2.0], 1e-8).unwrap()[0];
    let g_hat = forward(&grid, &f.fields[0].values);
    let u_hat = forward(&grid, &u.values);
    for k in 0..grid.n {
        let xi = grid.wavenumber(k);
        let lambda = xi.abs().powf(1.5);
        if lambda * 2f64.powf(alpha) > 2.0 {
            continue; // the alternating series loses digits beyond this
        }
        let expected = g_hat[k] * volterra_series(alpha, lambda, 2.0);
        assert!((u_hat[k] - expected).norm() < 1e-10 * g_hat[0].norm(), "mode {k}: {} vs {}", u_hat[k], expected);
    }
}

#[test]
fn heat_equation_duhamel_oracle() {
    // f = e^{-t} e^{-x²}; the heat flow of e^{-x²} over time τ is
    // (1+4τ)^{-1/2} exp(-x²/(1+4τ)), integrated against e^{-s} by Gauss-Legendre
    let p = FracParams::new(1.0, 2.0, 1).unwrap();
    let grid = SpectralGrid::new(1, 128, 16.0).unwrap();
    let dt = 1e-3;
    let f = ForcingSchedule::separable(grid, dt, 1000, |t| (-t).exp(), |x| (-x[0] * x[0]).exp(), None).unwrap();
    let u = &solve_forced(&p, &Field::zeros(grid, 0.0), &f, &[1.0], 1e-3).unwrap()[0];
    let rule = fracflow::quadrature::GaussRule::new(40);
    for (j, v) in u.values.iter().enumerate().step_by(4) {
        let x = grid.coord(j);
        let exact = rule.integrate(0.0, 1.0, |s| {
            let w = 1.0 + 4.0 * (1.0 - s);
            (-s).exp() * (-x * x / w).exp() / w.sqrt()
        });
        assert!((v - exact).abs() < 1e-6, "x={x}: {v} vs {exact}");
    }
}

#[test]
fn forced_solution_converges_under_step_halving() {
    let p = FracParams::new(0.5, 1.0, 1).unwrap();
    let grid = SpectralGrid::new(1, 64, 10.0).unwrap();
    let u0 = Field::zeros(grid, 0.0);
    let run = |steps: usize| {
        let f = ForcingSchedule::separable(
            grid,
            1.0 / steps as f64,
            steps,
            |t| (3.0 * t).sin(),
            |x| (-x[0] * x[0]).exp(),
            None,
        )
        .unwrap();
        solve_forced(&p, &u0, &f, &[1.0], 1.0).unwrap().remove(0).values
    };
    let (a, b, c) = (run(20), run(40), run(80));
    let d1 = l2(&a.iter().zip(&b).map(|(x, y)| x - y).collect::<Vec<_>>());
    let d2 = l2(&b.iter().zip(&c).map(|(x, y)| x - y).collect::<Vec<_>>());
    // at most first order in the step
    assert!(d2 < 0.6 * d1, "{d1:e} {d2:e}");
}

#[test]
fn unresolved_forcing_is_reported() {
    let p = FracParams::new(0.5, 1.0, 1).unwrap();
    let grid = SpectralGrid::new(1, 64, 10.0).unwrap();
    let f = ForcingSchedule::separable(grid, 0.25, 16, |t| (9.0 * t).sin(), |x| (-x[0] * x[0]).exp(), None).unwrap();
    let err = solve_forced(&p, &Field::zeros(grid, 0.0), &f, &[4.0], 1e-3).unwrap_err();
    assert!(matches!(err, Error::QuadratureUnderResolved(_)));
    assert!(solve_forced(&p, &Field::zeros(grid, 0.0), &f, &[1.1], 1e-3).is_err());
}

fn snapshots(p: &FracParams, u0: &Field, dt: f64, n: usize) -> Vec<Field> {
    let times: Vec<f64> = (1..=n).map(|k| k as f64 * dt).collect();
    solve_homogeneous(p, u0, &times).unwrap()
}

#[test]
fn residual_of_exact_solution_is_first_order() {
    let p = FracParams::new(0.6, 1.2, 1).unwrap();
    let grid = SpectralGrid::new(1, 64, 10.0).unwrap();
    let u0 = Field::from_fn(grid, 0.0, |x| (-x[0] * x[0]).exp());
    let r: Vec<f64> = [16, 32, 64]
        .iter()
        .map(|&n| residual(&p, &u0, &snapshots(&p, &u0, 1.0 / n as f64, n), None).unwrap())
        .collect();
    for w in r.windows(2) {
        assert!((w[0] / w[1]).log2() >= 0.8, "{r:?}");
    }
}

#[test]
fn residual_sees_zero_and_noise() {
    let p = FracParams::new(0.6, 1.2, 1).unwrap();
    let grid = SpectralGrid::new(1, 64, 10.0).unwrap();
    let zero = Field::zeros(grid, 0.0);
    let zeros: Vec<Field> = (1..=10).map(|k| Field::zeros(grid, k as f64 * 0.1)).collect();
    assert_eq!(residual(&p, &zero, &zeros, None).unwrap(), 0.0);

    let u0 = Field::from_fn(grid, 0.0, |x| (-x[0] * x[0]).exp());
    let clean = snapshots(&p, &u0, 1.0 / 32.0, 32);
    let base = residual(&p, &u0, &clean, None).unwrap();
    let noisy: Vec<Field> = clean
        .iter()
        .map(|f| {
            let values =
                f.values.iter().enumerate().map(|(j, v)| v + 1e-3 * ((j * 7919 % 13) as f64 / 6.0 - 1.0)).collect();
            Field { values, ..f.clone() }
        })
        .collect();
    assert!(residual(&p, &u0, &noisy, None).unwrap() > 2.0 * base);
    assert!(residual(&p, &u0, &clean[..5], None).is_err());
}

#[test]
fn residual_with_forcing_is_small_for_the_forced_solution() {
    let p = FracParams::new(0.5, 1.0, 1).unwrap();
    let grid = SpectralGrid::new(1, 64, 10.0).unwrap();
    let n = 64;
    let dt = 1.0 / n as f64;
    let f = ForcingSchedule::separable(grid, dt, n, |t| 1.0 + t, |x| (-x[0] * x[0]).exp(), None).unwrap();
    let times: Vec<f64> = (1..=n).map(|k| k as f64 * dt).collect();
    let u0 = Field::zeros(grid, 0.0);
    let sol = solve_forced(&p, &u0, &f, &times, 1.0).unwrap();
    let r = residual(&p, &u0, &sol, Some(&f)).unwrap();
    let size = forward(&grid, &f.fields[n].values)[0].norm() * grid.cell_volume();
    assert!(r < 0.05 * size, "{r} vs {size}");
}

#[test]
fn radial_inversion_recovers_the_gaussian() {
    let p1 = FracParams::new(1.0, 2.0, 1).unwrap();
    let p2 = FracParams::new(1.0, 2.0, 2).unwrap();
    let p3 = FracParams::new(1.0, 2.0, 3).unwrap();
    let r = [0.3, 1.0, 2.5];
    for (p, d) in [(p1, 1), (p2, 2), (p3, 3)] {
        let prof = radial_profile_from_hat(&p, 0.7, &r).unwrap();
        for (&ri, v) in r.iter().zip(&prof.values) {
            let exact = (-ri * ri / 2.8).exp() / (2.8 * PI).powf(d as f64 / 2.0);
            assert!((v - exact).abs() < 1e-9 * exact, "d={d} r={ri}: {v} vs {exact}");
        }
    }
}

#[test]
fn radial_inversion_agrees_with_the_fox_kernel() {
    let cases = [(0.6, 1.4, 1), (0.5, 1.0, 2), (0.8, 1.5, 3), (0.4, 0.7, 1)];
    for &(a, b, d) in &cases {
        let p = FracParams::new(a, b, d).unwrap();
        let r = [0.5, 1.0, 3.0];
        let prof = radial_profile_from_hat(&p, 1.0, &r).unwrap();
        for (&ri, v) in r.iter().zip(&prof.values) {
            let z = z_kernel(&p, 1.0, ri).unwrap();
            assert!((v - z).abs() < 1e-6 * z, "({a},{b},{d}) r={ri}: {v} vs {z}");
        }
    }
}

#[test]
fn radial_profile_has_a_power_tail() {
    let p = FracParams::new(0.6, 1.4, 1).unwrap();
    let r = [40.0, 80.0];
    let prof = radial_profile_from_hat(&p, 1.0, &r).unwrap();
    let scaled: Vec<f64> = r.iter().zip(&prof.values).map(|(ri, v)| v * ri.powf(2.4)).collect();
    assert!((scaled[0] / scaled[1] - 1.0).abs() < 0.02, "{scaled:?}");
    assert!(radial_profile_from_hat(&p, 1.0, &[0.0]).is_err());
}

#[test]
fn moments_of_simple_fields() {
    let grid = SpectralGrid::new(1, 256, 20.0).unwrap();
    assert!((moments(&hot_cell(grid)).mass - 1.0).abs() < 1e-14);
    let sym = Field::from_fn(grid, 0.0, |x| (-x[0] * x[0]).exp());
    let m = moments(&sym);
    assert!(m.first_moment.abs() < 1e-12);
    assert!((m.mass - PI.sqrt()).abs() < 1e-12);
    // |x| has a kink at a grid point, so the trapezoid rule is only second order here
    assert!((m.abs_first_moment - 1.0).abs() < 1e-2);
    let shifted = Field::from_fn(grid, 0.0, |x| (-(x[0] - 1.5).powi(2)).exp());
    let m = moments(&shifted);
    assert!((m.first_moment - 1.5 * m.mass).abs() < 1e-10);

    let grid2 = SpectralGrid::new(2, 64, 10.0).unwrap();
    let g2 = Field::from_fn(grid2, 0.0, |x| (-(x[0] - 0.6).powi(2) - (x[1] + 0.8).powi(2)).exp());
    let m = moments(&g2);
    assert!((m.mass - PI).abs() < 1e-10);
    assert!((m.first_moment - PI).abs() < 1e-10);
}
