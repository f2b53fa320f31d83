mod common;

use common::*;
use finitegap::charge::density;
use finitegap::homology::period_data;
use finitegap::quadrature::QuadratureOptions;
use finitegap::solution::linspace;
use finitegap::{compute_periods, SolutionParams, TorusPoint};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

fn params(curve: &finitegap::SpectralCurve, s: Vec<i8>, x0: Vec<f64>) -> SolutionParams {
    let p = period_data(curve).unwrap();
    SolutionParams::new(&p, TorusPoint::new(s, x0).unwrap()).unwrap()
}

#[test]
fn z_is_linear_and_stays_on_the_torus() {
    let p = params(&g2_mixed(), vec![1], vec![0.2, 0.9]);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..20 {
        let (x1, x2, t) = (
            rng.random_range(-5.0..5.0),
            rng.random_range(-5.0..5.0),
            rng.random_range(-5.0..5.0),
        );
        let a = p.z_of_xt(x1 + x2, t);
        let b = p.z_of_xt(x2, t);
        let inc = p.z_of_xt(x1, 0.0);
        for j in 0..2 {
            assert!(((a[j] - b[j]) - (inc[j] - p.base[j])).norm() < 1e-12);
            assert!((a[j].im - p.base[j].im).abs() < 1e-12);
        }
    }
}

#[test]
fn divisor_image_follows_pattern() {
    let p = params(&g2_mixed(), vec![-1], vec![0.4, 0.1]);
    let b = &p.periods.b;
    for i in 0..2 {
        let expect = b[(i, 0)] * 0.75 + b[(i, 1)] * 0.5;
        assert!((p.divisor_image[i].im - expect.im).abs() < 1e-8);
    }
}

#[test]
fn unit_modulus_on_samples() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for (curve, s) in [(g1_real(), vec![1]), (g1_complex(), vec![])] {
        let p = params(&curve, s, vec![0.31]);
        for _ in 0..100 {
            let e = p
                .exp_iu(rng.random_range(-10.0..10.0), rng.random_range(-10.0..10.0))
                .unwrap();
            assert!((e.norm() - 1.0).abs() < 1e-8);
        }
    }
}

#[test]
fn value_self_converges() {
    let curve = g1_real();
    let coarse = params(&curve, vec![1], vec![0.0]);
    let fine_opts = QuadratureOptions {
        tol: 1e-13,
        ..QuadratureOptions::default()
    };
    let (pd, _) = compute_periods(&curve, &fine_opts).unwrap();
    let fine =
        SolutionParams::with_theta_tol(&pd, TorusPoint::new(vec![1], vec![0.0]).unwrap(), 1e-15)
            .unwrap();
    let a = coarse.exp_iu(0.3, 0.2).unwrap();
    let b = fine.exp_iu(0.3, 0.2).unwrap();
    assert!((a - b).norm() < 1e-9, "{a} vs {b}");
}

#[test]
fn u_along_basics() {
    let p = params(&g1_real(), vec![1], vec![0.6]);
    let u = p.u_along(&[(0.4, 0.1), (0.4, 0.1), (0.4, 0.1)]).unwrap();
    assert!(u.iter().all(|&v| v == u[0]));
    assert!(u[0] > -PI && u[0] <= PI);
    let square = [(0.0, 0.0), (4.0, 0.0), (4.0, 3.0), (0.0, 3.0), (0.0, 0.0)];
    let u = p.u_along(&square).unwrap();
    let turns = (u[4] - u[0]) / (2.0 * PI);
    assert!((turns - turns.round()).abs() < 1e-8);
    let pts: Vec<(f64, f64)> = linspace(0.0, 7.0, 15)
        .into_iter()
        .map(|x| (x, 0.5))
        .collect();
    let u = p.u_along(&pts).unwrap();
    for (&(x, t), &uk) in pts.iter().zip(&u) {
        let e = p.exp_iu(x, t).unwrap();
        assert!((finitegap::C64::from_polar(1.0, uk) - e).norm() < 1e-8);
    }
}

#[test]
fn density_from_x_sweep() {
    let p = params(&g1_real(), vec![1], vec![0.0]);
    let t = 200.0;
    let u = p.u_along(&[(0.0, 0.0), (t, 0.0)]).unwrap();
    let est = (u[1] - u[0]) / (2.0 * PI * t);
    assert!((est - density(&p.periods, &[1])).abs() < 0.05);
}

#[test]
fn pde_residual_genus_one() {
    let p = params(&g1_real(), vec![1], vec![0.45]);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..20 {
        let (x, t) = (rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0));
        assert!(p.pde_residual(x, t, 1e-3).unwrap() < 1e-4);
    }
}

#[test]
fn pde_residual_is_second_order() {
    let p = params(&g1_real(), vec![-1], vec![0.2]);
    let (x, t) = (0.7, -0.3);
    let r: Vec<f64> = [4e-2, 2e-2, 1e-2]
        .iter()
        .map(|&h| p.pde_residual(x, t, h).unwrap())
        .collect();
    for w in r.windows(2) {
        let ratio = w[0] / w[1];
        assert!((3.0..=5.0).contains(&ratio), "{r:?}");
    }
}

#[test]
fn pde_residual_genus_two() {
    let p = params(&g2_real(), vec![1, -1], vec![0.15, 0.8]);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..5 {
        let (x, t) = (rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0));
        assert!(p.pde_residual(x, t, 1e-3).unwrap() < 1e-3);
    }
}

#[test]
fn theta_stays_away_from_zero() {
    let p = params(&g1_real(), vec![1], vec![0.5]);
    let xs = linspace(-10.0, 10.0, 100);
    assert!(p.min_theta_modulus(&xs, &xs).unwrap() > 1e-6);
    let p = params(&g2_mixed(), vec![-1], vec![0.5, 0.25]);
    let xs = linspace(-10.0, 10.0, 40);
    assert!(p.min_theta_modulus(&xs, &xs).unwrap() > 1e-6);
}

#[test]
fn quasiperiodic_drift_is_bounded() {
    let p = params(&g2_real(), vec![1, 1], vec![0.3, 0.6]);
    let nbar = density(&p.periods, &[1, -1]);
    let xs = linspace(0.0, 200.0, 801);
    let pts: Vec<(f64, f64)> = xs.iter().map(|&x| (x, 0.0)).collect();
    let u = p.u_along(&pts).unwrap();
    let dev: Vec<f64> = xs
        .iter()
        .zip(&u)
        .map(|(&x, &uk)| (uk - u[0] - 2.0 * PI * nbar * x).abs())
        .collect();
    let early = dev[..80].iter().cloned().fold(0.0, f64::max);
    let all = dev.iter().cloned().fold(0.0, f64::max);
    assert!(all < 3.0 * early + 2.0 * PI, "early {early}, all {all}");
}

#[test]
fn grid_sampler_rows() {
    let p = params(&g1_real(), vec![1], vec![0.1]);
    let rows = p
        .sample_grid(&linspace(0.0, 1.0, 10), &linspace(0.0, 1.0, 10))
        .unwrap();
    assert_eq!(rows.len(), 100);
    assert!(rows.iter().all(|r| r.modulus_err < 1e-8));
    for r in &rows {
        assert!(
            (finitegap::C64::from_polar(1.0, r.u) - finitegap::C64::new(r.re, r.im)).norm() < 1e-8
        );
    }
}
