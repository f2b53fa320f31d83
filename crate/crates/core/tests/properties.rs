mod common;

use finitegap::charge::{closed_form_charges, epsilon_tilde, winding_charges};
use finitegap::homology::{lattice_reduce, period_data};
use finitegap::solution::all_symbols;
use finitegap::{SheetPoint, SolutionParams, SpectralCurve, ThetaContext, TorusPoint, C64};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{PI, TAU};

fn curve_from(seed: u64, g: usize, m: usize) -> SpectralCurve {
    SpectralCurve::random(&mut ChaCha8Rng::seed_from_u64(seed), g, m.min(g))
}

fn complex_vec(g: usize) -> impl Strategy<Value = Vec<C64>> {
    prop::collection::vec(
        (-1.0..1.0f64, -0.5..0.5f64).prop_map(|(a, b)| C64::new(a, b)),
        g,
    )
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn period_matrix_invariants(seed in any::<u64>(), g in 1usize..=3, m in 0usize..=3) {
        let pd = period_data(&curve_from(seed, g, m)).unwrap();
        let b = &pd.b;
        let m = pd.m();
        for i in 0..g {
            for j in 0..g {
                prop_assert!((b[(i, j)] - b[(j, i)]).norm() < 1e-8);
                let expect_re = if i < m && j < m { Some(0.0) } else if i >= m && j >= m { Some(-0.5 * (i == j) as u8 as f64) } else { None };
                if let Some(e) = expect_re {
                    if i < m || i == j {
                        prop_assert!((b[(i, j)].re - e).abs() < 1e-8, "entry ({i},{j}) = {}", b[(i, j)]);
                    }
                }
            }
        }
        let y = pd.im_b();
        prop_assert!(y.symmetric_eigen().eigenvalues.min() > 0.0);
        for u in &pd.u {
            prop_assert!(u.re.abs() < 1e-8);
        }
    }

    #[test]
    fn theta_quasi_periodicity(seed in any::<u64>(), g in 1usize..=3, z in complex_vec(3)) {
        let pd = period_data(&curve_from(seed, g, seed as usize % (g + 1))).unwrap();
        let ctx = ThetaContext::new(&pd.b, 1e-13).unwrap();
        let z = &z[..g];
        let t0 = ctx.theta_any(z).unwrap();
        for j in 0..g {
            let mut zs = z.to_vec();
            zs[j] += 1.0;
            prop_assert!((ctx.theta_any(&zs).unwrap() - t0).norm() < 1e-9 * (1.0 + t0.norm()));
            let zb: Vec<C64> = (0..g).map(|i| z[i] + pd.b[(i, j)]).collect();
            let factor = (C64::new(0.0, -PI) * pd.b[(j, j)] - C64::new(0.0, TAU) * z[j]).exp();
            let lhs = ctx.theta_any(&zb).unwrap();
            prop_assert!((lhs - factor * t0).norm() < 1e-8 * (1.0 + lhs.norm()));
        }
        let neg: Vec<C64> = z.iter().map(|w| -w).collect();
        prop_assert!((ctx.theta_any(&neg).unwrap() - t0).norm() < 1e-10 * (1.0 + t0.norm()));
    }

    #[test]
    fn scaling_composes(seed in any::<u64>(), g in 1usize..=3, a in 1.0..20.0f64, b in 1.0..20.0f64) {
        let curve = curve_from(seed, g, g);
        let two = curve.scaled(a).unwrap().scaled(b).unwrap();
        let one = curve.scaled(a * b).unwrap();
        prop_assert_eq!(two.genus(), one.genus());
        for (p, q) in two.branch_points().iter().zip(one.branch_points()) {
            prop_assert!((p - q).norm() < 1e-12 * (1.0 + q.norm()));
        }
    }

    #[test]
    fn monodromy_parity(seed in any::<u64>(), g in 1usize..=3, cx in -7.0..1.0f64, cy in -3.0..3.0f64, r in 0.2..5.0f64) {
        let curve = curve_from(seed, g, seed as usize % (g + 1));
        let center = C64::new(cx, cy);
        let all: Vec<C64> = curve.branch_points().iter().copied().chain([C64::new(0.0, 0.0)]).collect();
        prop_assume!(all.iter().all(|e| ((e - center).norm() - r).abs() > 0.05));
        let inside = all.iter().filter(|e| (*e - center).norm() < r).count();
        let path: Vec<C64> = (0..=256).map(|k| center + C64::from_polar(r, k as f64 * TAU / 256.0)).collect();
        let start = SheetPoint::on_sheet(&curve, path[0], 0);
        let end = curve.continue_mu(&path, &start, Some(0.01)).unwrap();
        let flipped = (end.mu + start.mu).norm() < (end.mu - start.mu).norm();
        prop_assert_eq!(flipped, inside % 2 == 1);
    }

    #[test]
    fn lattice_reduction_round_trip(seed in any::<u64>(), g in 1usize..=3, r in complex_vec(3), nm in prop::collection::vec(-4i64..=4, 6)) {
        let pd = period_data(&curve_from(seed, g, seed as usize % (g + 1))).unwrap();
        let b: &DMatrix<C64> = &pd.b;
        let v: Vec<C64> = (0..g)
            .map(|i| r[i] + nm[i] as f64 + (0..g).map(|k| b[(i, k)] * nm[3 + k] as f64).sum::<C64>())
            .collect();
        let red = lattice_reduce(b, &v);
        for i in 0..g {
            let back = red.residual[i] + red.n[i] as f64 + (0..g).map(|k| b[(i, k)] * red.m[k] as f64).sum::<C64>();
            prop_assert!((back - v[i]).norm() < 1e-10);
            prop_assert!(red.residual[i].re.abs() <= 0.5 + 1e-12);
        }
    }

    #[test]
    fn closed_form_pattern(g in 1usize..=6, bits in any::<u8>()) {
        let m = (bits as usize) % (g + 1);
        let s: Vec<i8> = (0..m).map(|i| if bits >> i & 1 == 1 { 1 } else { -1 }).collect();
        let n = closed_form_charges(g, m, &s).unwrap();
        let et = epsilon_tilde(g, &s);
        prop_assert_eq!(n.len(), g);
        for j in 0..g {
            prop_assert_eq!(n[j], -et[j]);
            prop_assert_eq!(n[j] == 0, j >= m);
        }
        prop_assert_eq!(n.iter().map(|x| x.abs()).sum::<i64>(), m as i64);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 8, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn winding_matches_closed_form(seed in any::<u64>(), g in 1usize..=2, pick in any::<u8>()) {
        let m = pick as usize % (g + 1);
        let pd = period_data(&curve_from(seed, g, m)).unwrap();
        let symbols = all_symbols(m);
        let s = symbols[pick as usize % symbols.len()].clone();
        let torus = TorusPoint::random(&mut ChaCha8Rng::seed_from_u64(seed ^ 0x5eed), s.clone(), g);
        let p = SolutionParams::new(&pd, torus).unwrap();
        prop_assert_eq!(winding_charges(&p).unwrap(), closed_form_charges(g, m, &s).unwrap());
    }
}
