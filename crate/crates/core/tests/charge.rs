mod common;

use common::*;
use finitegap::charge::*;
use finitegap::homology::period_data;
use finitegap::solution::all_symbols;
use finitegap::{SheetPoint, SolutionParams, TorusPoint};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn params(curve: &finitegap::SpectralCurve, s: Vec<i8>, x0: Vec<f64>) -> SolutionParams {
    let p = period_data(curve).unwrap();
    SolutionParams::new(&p, TorusPoint::new(s, x0).unwrap()).unwrap()
}

#[test]
fn closed_form_examples() {
    assert_eq!(epsilon_tilde(1, &[1]), vec![-1]);
    assert_eq!(epsilon_tilde(3, &[1, 1]), vec![-1, 1, 0]);
    assert_eq!(closed_form_charges(1, 1, &[1]).unwrap(), vec![1]);
    assert_eq!(closed_form_charges(1, 1, &[-1]).unwrap(), vec![-1]);
    assert_eq!(closed_form_charges(2, 2, &[1, 1]).unwrap(), vec![1, -1]);
    assert_eq!(closed_form_charges(3, 1, &[-1]).unwrap(), vec![-1, 0, 0]);
    assert_eq!(closed_form_charges(2, 0, &[]).unwrap(), vec![0, 0]);
    assert!(closed_form_charges(2, 1, &[1, 1]).is_err());
}

#[test]
fn genus_one_charge_and_density() {
    for s in [1i8, -1] {
        let p = params(&g1_real(), vec![s], vec![0.25]);
        let r = charge_report(&p, DEFAULT_HORIZON).unwrap();
        assert_eq!(r.n, vec![s as i64]);
        assert!(r.matches);
        assert!(
            (r.density - r.density_direct).abs() < 0.02,
            "{} vs {}",
            r.density,
            r.density_direct
        );
        assert!(r
            .winding_totals
            .iter()
            .all(|w| (w - w.round()).abs() < 1e-6));
    }
    let p = params(&g1_complex(), vec![], vec![0.8]);
    let r = charge_report(&p, DEFAULT_HORIZON).unwrap();
    assert_eq!(r.n, vec![0]);
    assert!(r.density.abs() < 1e-12);
    assert!(r.density_direct.abs() < 0.02);
}

#[test]
fn charges_do_not_depend_on_x0() {
    let pd = period_data(&g2_mixed()).unwrap();
    for s in all_symbols(1) {
        let mut seen = Vec::new();
        for x0 in [[0.0, 0.0], [0.3, 0.7], [0.91, 0.12]] {
            let p =
                SolutionParams::new(&pd, TorusPoint::new(s.clone(), x0.to_vec()).unwrap()).unwrap();
            seen.push(winding_charges(&p).unwrap());
        }
        assert!(seen.windows(2).all(|w| w[0] == w[1]));
        assert_eq!(seen[0], closed_form_charges(2, 1, &s).unwrap());
    }
}

#[test]
fn direct_winding_agrees_with_ratio() {
    let pd = period_data(&g2_real()).unwrap();
    for s in all_symbols(2) {
        let p = SolutionParams::new(&pd, TorusPoint::new(s, vec![0.2, 0.55]).unwrap()).unwrap();
        assert_eq!(
            winding_charges(&p).unwrap(),
            winding_charges_direct(&p).unwrap()
        );
    }
}

#[test]
fn full_matrix_small_genus() {
    for g in 1..=2 {
        for m in 0..=g {
            let pd = period_data(&matrix_curve(g, m)).unwrap();
            let x0 = vec![0.37; g];
            for r in charge_matrix(&pd, &x0, 100.0).unwrap() {
                assert!(
                    r.matches,
                    "g={g} m={m} s={:?}: {:?} vs {:?}",
                    r.s, r.n, r.n_closed
                );
            }
        }
    }
}

#[test]
fn alternate_constant_flips_sign() {
    let pd = period_data(&g2_real()).unwrap();
    for s in all_symbols(2) {
        let (ratio, direct) = alternate_k_charges(&pd, &s, &[0.1, 0.4]).unwrap();
        let expect: Vec<i64> = s.iter().map(|&v| -(v as i64)).collect();
        assert_eq!(ratio, expect);
        assert_eq!(direct, expect);
    }
}

#[test]
fn density_stays_within_deviation_band() {
    let p = params(&g2_real(), vec![-1, 1], vec![0.6, 0.05]);
    let n = winding_charges(&p).unwrap();
    let nbar = density(&p.periods, &n);
    let b100 = density_deviation_bound(&p, nbar, 100.0, 0.1).unwrap();
    let b400 = density_deviation_bound(&p, nbar, 400.0, 0.1).unwrap();
    assert!(b400 < 6.0 * b100.max(1.0), "{b100} {b400}");
}

#[test]
fn csv_has_one_row_per_report() {
    let pd = period_data(&g1_real()).unwrap();
    let reports = charge_matrix(&pd, &[0.0], 50.0).unwrap();
    let csv = reports_to_csv(&reports);
    assert_eq!(csv.lines().count(), 1 + reports.len());
}

#[test]
fn admissibility_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let pd = period_data(&g2_mixed()).unwrap();
    for s in all_symbols(1) {
        let torus = TorusPoint::random(&mut rng, s.clone(), 2);
        let p = SolutionParams::new(&pd, torus.clone()).unwrap();
        let adm = classify_image(&pd, &p.divisor_image).unwrap();
        assert_eq!(adm.s, s);
        for (a, b) in adm.x0.iter().zip(&torus.x0) {
            let d = (a - b).rem_euclid(1.0);
            assert!(d.min(1.0 - d) < 1e-8);
        }
        let mut shifted = p.divisor_image.clone();
        shifted[0].im += 1e-3;
        assert!(matches!(
            classify_image(&pd, &shifted),
            Err(finitegap::Error::Inadmissible(_))
        ));
    }
}

#[test]
fn genus_one_scan_symbols_coincide() {
    let pd = period_data(&g1_real()).unwrap();
    let hits = scan_g1(&pd, 400).unwrap();
    assert!(!hits.is_empty());
    for h in &hits {
        assert!(h.coincide, "{h:?}");
        let divisor: Vec<DivisorPoint> = h
            .points
            .iter()
            .map(|p| DivisorPoint::with_canonical_route(&pd, p.clone()))
            .collect();
        let cmp = symbols_coincide_check(&pd, &divisor).unwrap();
        assert!(cmp.coincide);
        let off_oval = SheetPoint::on_sheet(&pd.curve, h.points[0].lambda + c(0.0, 0.2), 0);
        let bad = vec![DivisorPoint::with_canonical_route(&pd, off_oval)];
        assert!(check_admissible(&pd, &bad).is_err());
    }
}

#[test]
fn genus_two_scan_symbols_coincide() {
    let pd = period_data(&g2_real()).unwrap();
    let hits = scan_g2(&pd, 24).unwrap();
    assert!(!hits.is_empty());
    assert!(hits.iter().all(|h| h.coincide));
}

#[test]
fn conjugate_pairs_give_real_polynomial() {
    let curve = g2_complex();
    let p = SheetPoint::on_sheet(&curve, c(-0.7, 0.9), 0);
    let q = p.conjugate(&curve);
    let (coeffs, imag) = interpolating_polynomial(&[p, q]).unwrap();
    assert_eq!(coeffs.len(), 2);
    assert!(imag < 1e-10);
}

#[test]
fn charges_stable_under_stretching() {
    let curve = g2_real();
    let records =
        finitegap::deformation::sweep(&curve, &[1, -1], &[0.2, 0.3], &[1.0, 2.0, 5.0, 10.0])
            .unwrap();
    let first = records[0].charges.clone().unwrap();
    assert!(records.iter().all(|r| r.charges.as_ref() == Some(&first)));
    assert_eq!(first, closed_form_charges(2, 2, &[1, -1]).unwrap());
}
