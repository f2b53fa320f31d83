mod common;

use common::*;
use finitegap::deformation::*;
use finitegap::homology::period_data;

#[test]
fn unit_stretch_reproduces_base_curve() {
    let curve = g2_real();
    let rec = &sweep(&curve, &[1, 1], &[0.0, 0.0], &[1.0]).unwrap()[0];
    let b = period_data(&curve).unwrap().b;
    assert!((rec.b_matrix() - b).iter().all(|z| z.norm() < 1e-12));
}

#[test]
fn two_real_pairs_separate() {
    let recs = sweep(&g2_real(), &[1, -1], &[0.3, 0.1], &DEFAULT_K_LIST).unwrap();
    assert!(recs.iter().all(|r| r.ok()));
    let report = limit_check(&recs, 2);
    assert!(report.passed(), "{:?}", report.failures);
    assert!(report.offdiag_norm < LIMIT_TOL);
    let comps = g2_real().elliptic_components();
    for (j, comp) in comps.iter().enumerate() {
        let tau = elliptic_tau(comp).unwrap();
        let ext = report.tau_extrapolated[j];
        assert!(
            (ext[0] - tau.re).abs() < 0.05 && (ext[1] - tau.im).abs() < 0.05,
            "{ext:?} vs {tau}"
        );
    }
}

#[test]
fn mixed_curve_separates() {
    let recs = sweep(&g2_mixed(), &[-1], &[0.5, 0.5], &DEFAULT_K_LIST).unwrap();
    let report = limit_check(&recs, 1);
    assert!(report.passed(), "{:?}", report.failures);
    assert!(report.charges_constant);
}

#[test]
fn genus_one_sweep_is_trivial() {
    let recs = sweep(&g1_real(), &[1], &[0.0], &DEFAULT_K_LIST).unwrap();
    let b0 = recs[0].b_matrix();
    for r in &recs {
        assert!((r.b_matrix()[(0, 0)] - b0[(0, 0)]).norm() < 1e-9);
        assert_eq!(r.offdiag_norm, 0.0);
    }
    assert!(limit_check(&recs, 1).passed());
}

#[test]
fn sweep_rejects_bad_lists() {
    assert!(sweep(&g1_real(), &[1], &[0.0], &[0.5]).is_err());
    assert!(sweep(&g1_real(), &[1], &[0.0], &[2.0, 1.0]).is_err());
}

#[test]
fn elliptic_tau_matches_agm() {
    for (lo, hi) in [(-2.0, -0.5), (-3.0, -2.0), (-10.0, -0.1)] {
        let comp = finitegap::SpectralCurve::new(vec![(lo, hi)], vec![]).unwrap();
        let tau = elliptic_tau(&comp).unwrap();
        let oracle = agm_tau(lo, hi);
        assert!((tau - oracle).norm() < 1e-10, "{tau} vs {oracle}");
    }
}

#[test]
fn elliptic_tau_matches_period_engine() {
    for comp in [
        g1_real(),
        g1_complex(),
        finitegap::SpectralCurve::new(vec![], vec![c(0.5, 2.5)]).unwrap(),
    ] {
        let tau = elliptic_tau(&comp).unwrap();
        let b = period_data(&comp).unwrap().b[(0, 0)];
        let d = tau - b;
        assert!(
            (d.re - d.re.round()).abs() < 1e-8 && d.im.abs() < 1e-8,
            "{tau} vs {b}"
        );
    }
}

#[test]
fn csv_lists_every_k() {
    let recs = sweep(&g2_real(), &[1, 1], &[0.0, 0.0], &[1.0, 10.0]).unwrap();
    assert_eq!(sweep_to_csv(&recs).lines().count(), 3);
}
