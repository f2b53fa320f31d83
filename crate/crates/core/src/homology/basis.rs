//! Canonical cycles built from "star" polygons.
//!
//! A star is a hub point with straight branches to a set of tips. Its loop is
//! the closed polygon that runs at distance `d` around every branch and along
//! an arc of radius about `r` around the hub, counterclockwise, starting at
//! the arc vertex in direction angle 0 from the hub.
//!
//! For the `j`-th real pair (positional order, `E_{2j} < E_{2j-1}`):
//! * `a_j` is the star with hub 0 and tip `E_{2j-1}`;
//! * `b_j` is the star with hub `E_{2j-1}` and tip `E_{2j}`.
//!
//! For the `j`-th complex pair `c_j`:
//! * `b_j` is the star with hub 0 and tips `E_{2m}` (when `m > 0`), the
//!   earlier complex pairs `c_i, conj c_i`, and finally `c_j`;
//! * `a_j = tau(b_j) - b_j`, where `tau` conjugates both `lambda` and `mu`.
//!
//! Orientation of the real `b_j` is fixed later from the sign of `Im B_jj`.

use crate::curve::SpectralCurve;
use crate::error::{Error, Result};
use crate::geometry::seg_dist;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

/// One closed polygon with its starting value of `mu`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LoopComponent {
    /// Closed polyline: the last vertex equals the first.
    pub vertices: Vec<C64>,
    pub start_mu: C64,
    /// Sheet index of the starting point.
    pub sheet: u8,
    pub weight: i32,
}

/// An integer combination of closed loops on the curve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CyclePath {
    pub components: Vec<LoopComponent>,
    pub orientation: i32,
}

impl CyclePath {
    fn single(curve: &SpectralCurve, vertices: Vec<C64>) -> CyclePath {
        let start = vertices[0];
        let start_mu = curve.mu_sheet0(start);
        CyclePath {
            components: vec![LoopComponent {
                vertices,
                start_mu,
                sheet: 0,
                weight: 1,
            }],
            orientation: 1,
        }
    }

    /// The cycle traversed in the opposite direction.
    pub fn reversed(&self) -> CyclePath {
        CyclePath {
            components: self.components.clone(),
            orientation: -self.orientation,
        }
    }

    /// Image under the antiholomorphic involution.
    pub fn conjugated(&self, curve: &SpectralCurve) -> CyclePath {
        CyclePath {
            components: self
                .components
                .iter()
                .map(|c| {
                    let start_mu = c.start_mu.conj();
                    let vertices: Vec<C64> = c.vertices.iter().map(|v| v.conj()).collect();
                    LoopComponent {
                        sheet: curve.sheet_of(vertices[0], start_mu),
                        vertices,
                        start_mu,
                        weight: c.weight,
                    }
                })
                .collect(),
            orientation: self.orientation,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CycleBasis {
    pub a: Vec<CyclePath>,
    pub b: Vec<CyclePath>,
}

const CAP_STEPS: usize = 16;
const ARC_STEP: f64 = PI / 8.0;

/// Closed polygon around the star `hub -> tips`.
pub fn star_loop(curve: &SpectralCurve, hub: C64, tips: &[C64]) -> Result<Vec<C64>> {
    let scale = curve.scale().max(hub.norm()).max(1e-300);
    let on_tol = 1e-12 * scale;
    let bps = curve.finite_branch_points();
    let on_tree: Vec<C64> = bps
        .iter()
        .copied()
        .filter(|&p| tips.iter().any(|&t| seg_dist(hub, t, p) <= on_tol))
        .collect();
    let off_tree: Vec<C64> = bps
        .iter()
        .copied()
        .filter(|&p| tips.iter().all(|&t| seg_dist(hub, t, p) > on_tol))
        .collect();

    let mut dmin = f64::INFINITY;
    for &t in tips {
        for &p in &off_tree {
            dmin = dmin.min(seg_dist(hub, t, p));
        }
    }
    for i in 0..on_tree.len() {
        for k in (i + 1)..on_tree.len() {
            dmin = dmin.min((on_tree[i] - on_tree[k]).norm());
        }
    }
    let mut lmin = f64::INFINITY;
    for &p in off_tree.iter().chain(on_tree.iter()) {
        let r = (p - hub).norm();
        if r > on_tol {
            lmin = lmin.min(r);
        }
    }

    let mut ang: Vec<(f64, C64)> = tips.iter().map(|&t| ((t - hub).arg(), t)).collect();
    ang.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let n = ang.len();
    let mut min_sector = TAU;
    if n > 1 {
        for k in 0..n {
            let prev = if k == 0 {
                ang[n - 1].0 - TAU
            } else {
                ang[k - 1].0
            };
            min_sector = min_sector.min(ang[k].0 - prev);
        }
    }
    let d0 = 0.2 * dmin;
    if !(d0 > 1e-12 * scale) || !(min_sector > 1e-9) {
        return Err(Error::DegenerateGeometry(format!(
            "star around {hub} has clearance {dmin:.3e} and minimal sector {min_sector:.3e}"
        )));
    }
    // The start direction 0 must stay outside every tip corridor.
    let zero_gap = ang
        .iter()
        .map(|&(a, _)| a.abs().min(TAU - a.abs()))
        .fold(f64::INFINITY, f64::min);
    if !(zero_gap > 1e-9) {
        return Err(Error::DegenerateGeometry(format!(
            "a tip lies in direction 0 from {hub}"
        )));
    }
    let alpha = (0.5f64).atan().min(min_sector / 4.0).min(zero_gap / 2.0);
    let mut r = d0 / alpha.tan();
    let mut d = d0;
    if r > 0.25 * lmin {
        r = 0.25 * lmin;
        d = r * alpha.tan();
    }
    let rho = (r * r + d * d).sqrt();

    // Arc vertices in the sector [from, to] (angles from the hub), with the
    // direction 0 (mod 2 pi) inserted when it falls inside.
    let arc = |from: f64, to: f64| -> (Vec<C64>, Option<usize>) {
        let steps = ((to - from) / ARC_STEP).ceil().max(1.0) as usize;
        let mut angles: Vec<f64> = (0..=steps)
            .map(|i| from + (to - from) * i as f64 / steps as f64)
            .collect();
        let mut zero_at = None;
        let k0 = (from / TAU).ceil() * TAU;
        if k0 > from && k0 < to {
            let pos = angles.iter().position(|&a| a > k0).unwrap_or(angles.len());
            if (angles[pos - 1] - k0).abs() < 1e-12 {
                zero_at = Some(pos - 1);
                angles[pos - 1] = k0;
            } else {
                angles.insert(pos, k0);
                zero_at = Some(pos);
            }
        }
        (
            angles
                .iter()
                .map(|&a| hub + C64::from_polar(rho, a))
                .collect(),
            zero_at,
        )
    };

    let mut poly: Vec<C64> = Vec::new();
    let mut start: Option<usize> = None;
    for k in 0..n {
        let (phi, tip) = ang[k];
        let prev = if k == 0 {
            ang[n - 1].0 - TAU
        } else {
            ang[k - 1].0
        };
        let (verts, zero_at) = arc(prev + alpha, phi - alpha);
        if let Some(z) = zero_at {
            start = Some(poly.len() + z);
        }
        poly.extend(verts);
        let u = C64::from_polar(1.0, phi);
        let nrm = C64::new(0.0, 1.0) * u;
        poly.push(tip - nrm * d);
        for j in 1..CAP_STEPS {
            let a = phi - PI / 2.0 + j as f64 * PI / CAP_STEPS as f64;
            poly.push(tip + C64::from_polar(d, a));
        }
        poly.push(tip + nrm * d);
    }
    let s = start.ok_or_else(|| {
        Error::DegenerateGeometry(format!("no start vertex in direction 0 around {hub}"))
    })?;
    poly.rotate_left(s);
    poly.push(poly[0]);
    Ok(poly)
}

/// Builds the canonical basis. Real `b`-cycles carry orientation +1 here; the
/// period computation flips them so that `Im B_jj > 0`.
pub fn build_basis(curve: &SpectralCurve) -> Result<CycleBasis> {
    let report = curve.validate();
    if !report.valid {
        return Err(Error::InvalidCurve(report.violations.join("; ")));
    }
    let pairs = curve.positional_pairs();
    for w in pairs.windows(2) {
        if w[1].1 >= w[0].0 {
            return Err(Error::OverlappingCuts(format!(
                "real pairs ({}, {}) and ({}, {})",
                w[0].0, w[0].1, w[1].0, w[1].1
            )));
        }
    }
    let zero = C64::new(0.0, 0.0);
    let m = curve.m();
    let mut a = Vec::new();
    let mut b = Vec::new();
    for &(lo, hi) in &pairs {
        let (lo, hi) = (C64::new(lo, 0.0), C64::new(hi, 0.0));
        a.push(CyclePath::single(curve, star_loop(curve, zero, &[hi])?));
        b.push(CyclePath::single(curve, star_loop(curve, hi, &[lo])?));
    }
    let cplx = curve.complex_pairs();
    for (jj, &c) in cplx.iter().enumerate() {
        let mut tips = Vec::new();
        if m > 0 {
            tips.push(C64::new(pairs[m - 1].0, 0.0));
        }
        for &e in &cplx[..jj] {
            tips.push(e);
            tips.push(e.conj());
        }
        tips.push(c);
        let bj = CyclePath::single(curve, star_loop(curve, zero, &tips)?);
        let tb = bj.conjugated(curve);
        let mut comps = tb.components.clone();
        comps.extend(bj.components.iter().cloned().map(|mut l| {
            l.weight = -l.weight;
            l
        }));
        a.push(CyclePath {
            components: comps,
            orientation: 1,
        });
        b.push(bj);
    }
    Ok(CycleBasis { a, b })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn winding_number(poly: &[C64], p: C64) -> i32 {
        let mut total = 0.0;
        for w in poly.windows(2) {
            total += ((w[1] - p) / (w[0] - p)).arg();
        }
        (total / TAU).round() as i32
    }

    #[test]
    fn real_loops_enclose_expected_points() {
        let cv = SpectralCurve::new(vec![(-1.0, -0.5), (-3.0, -2.0)], vec![]).unwrap();
        let basis = build_basis(&cv).unwrap();
        let a2 = &basis.a[1].components[0].vertices;
        // a_2 surrounds the segment from 0 to E_3 = -2.
        for (p, w) in [(0.0, 1), (-0.5, 1), (-1.0, 1), (-2.0, 1), (-3.0, 0)] {
            assert_eq!(winding_number(a2, C64::new(p, 0.0)), w, "point {p}");
        }
        let b1 = &basis.b[0].components[0].vertices;
        for (p, w) in [(0.0, 0), (-0.5, 1), (-1.0, 1), (-2.0, 0)] {
            assert_eq!(winding_number(b1, C64::new(p, 0.0)), w, "point {p}");
        }
        assert_eq!(a2.first(), a2.last());
        let s = a2[0];
        assert!(s.re > 0.0 && s.im == 0.0);
    }

    #[test]
    fn complex_star_encloses_tree() {
        let cv = SpectralCurve::new(
            vec![(-3.0, -1.0)],
            vec![C64::new(-1.0, 2.0), C64::new(-2.0, 0.7)],
        )
        .unwrap();
        let basis = build_basis(&cv).unwrap();
        let b3 = &basis.b[2].components[0].vertices;
        for (p, w) in [
            (C64::new(0.0, 0.0), 1),
            (C64::new(-1.0, 0.0), 1),
            (C64::new(-3.0, 0.0), 1),
            (C64::new(-1.0, 2.0), 1),
            (C64::new(-1.0, -2.0), 1),
            (C64::new(-2.0, 0.7), 1),
            (C64::new(-2.0, -0.7), 0),
        ] {
            assert_eq!(winding_number(b3, p), w, "point {p}");
        }
        let a3 = &basis.a[2];
        assert_eq!(a3.components.len(), 2);
        assert_eq!(a3.components[0].weight, 1);
        assert_eq!(a3.components[1].weight, -1);
    }

    #[test]
    fn overlapping_cuts_rejected() {
        let cv = SpectralCurve::from_parts(vec![(-3.0, -1.0), (-2.0, -0.5)], vec![]);
        assert!(matches!(build_basis(&cv), Err(Error::OverlappingCuts(_))));
    }
}
