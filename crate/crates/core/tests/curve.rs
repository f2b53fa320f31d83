mod common;

use common::*;
use finitegap::curve::{SheetPoint, SpectralCurve};
use finitegap::Error;

#[test]
fn validation_examples() {
    assert!(g1_real().validate().valid);
    assert!(g2_mixed().validate().valid);
    let bad = SpectralCurve::from_parts(vec![(-2.0, 0.5)], vec![]);
    let r = bad.validate();
    assert!(!r.valid);
    assert!(r
        .violations
        .iter()
        .any(|v| v.contains("positive") || v.contains("negative")));
}

#[test]
fn scaling_examples() {
    let curve = SpectralCurve::new(vec![(-3.0, -2.5), (-1.0, -0.5)], vec![]).unwrap();
    let k10 = curve.scaled(10.0).unwrap();
    assert_eq!(k10.real_pairs(), &[(-3.0, -2.5), (-10.0, -5.0)]);
    let mixed = g2_mixed().scaled(4.0).unwrap();
    assert_eq!(mixed.real_pairs(), &[(-3.0, -1.0)]);
    assert_eq!(mixed.complex_pairs(), &[c(-4.0, 8.0)]);
    assert_eq!(g2_mixed().scaled(1.0).unwrap(), g2_mixed());
    assert!(g2_mixed().scaled(0.5).is_err());
}

#[test]
fn components() {
    let comps = g1_real().elliptic_components();
    assert_eq!(comps.len(), 1);
    assert_eq!(comps[0].real_pairs(), &[(-2.0, -0.5)]);
    assert_eq!(g2_real().elliptic_components().len(), 2);
    let c0 = g2_complex().elliptic_components();
    assert_eq!(c0.len(), 1);
    assert_eq!(c0[0].complex_pairs(), g2_complex().complex_pairs());
}

fn circle(center: finitegap::C64, r: f64, n: usize) -> Vec<finitegap::C64> {
    (0..=n)
        .map(|k| {
            center + finitegap::C64::from_polar(r, k as f64 * std::f64::consts::TAU / n as f64)
        })
        .collect()
}

#[test]
fn monodromy() {
    let curve = g1_real();
    let path = circle(c(-0.5, 0.0), 0.3, 64);
    let start = SheetPoint::on_sheet(&curve, path[0], 0);
    let end = curve.continue_mu(&path, &start, None).unwrap();
    assert!((end.mu + start.mu).norm() < 1e-10 * start.mu.norm());
    assert_ne!(end.sheet, start.sheet);
    let path = circle(c(-1.25, 0.0), 1.0, 64);
    let start = SheetPoint::on_sheet(&curve, path[0], 1);
    let end = curve.continue_mu(&path, &start, None).unwrap();
    assert!((end.mu - start.mu).norm() < 1e-10 * start.mu.norm());
    let same = curve
        .continue_mu(&[path[0], path[0]], &start, None)
        .unwrap();
    assert_eq!(same.mu, start.mu);
}

#[test]
fn continuation_near_branch_point_rejected() {
    let curve = g1_real();
    let start = SheetPoint::on_sheet(&curve, c(-1.0, 1.0), 0);
    let r = curve.continue_mu(&[c(-1.0, 1.0), c(-0.5, 0.0)], &start, None);
    assert!(matches!(r, Err(Error::TooCloseToBranchPoint { .. })));
}

#[test]
fn json_format() {
    let text = r#"{"real_pairs": [[-3.0,-2.5],[-1.0,-0.5]], "complex_pairs": [[-1.0,2.0]]}"#;
    let curve = SpectralCurve::from_json(text).unwrap();
    assert_eq!(curve.genus(), 3);
    assert_eq!(curve.m(), 2);
    let back = SpectralCurve::from_json(&curve.to_json()).unwrap();
    assert_eq!(back, curve);
    assert!(SpectralCurve::from_json("{nope").is_err());
}
