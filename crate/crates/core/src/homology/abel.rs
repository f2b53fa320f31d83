use super::lattice::half_period;
use super::periods::PeriodData;
use crate::curve::SheetPoint;
use crate::error::{Error, Result};
use crate::geometry::seg_dist;
use crate::quadrature::integrate_path;
use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

/// Abel map `A(P) = int_inf^P omega` along a route.
///
/// The route is a polyline whose first vertex lies on `[0, +inf)`; the leg from
/// infinity to that vertex runs along the positive axis on sheet 0. When the
/// route starts at the origin (a branch point) the sheet is taken from `P`.
/// The last vertex must be `P.lambda`.
pub fn abel_map(periods: &PeriodData, p: &SheetPoint, route: &[C64]) -> Result<Vec<C64>> {
    let curve = &periods.curve;
    let g = curve.genus();
    let scale = curve.scale();
    let first = *route
        .first()
        .ok_or_else(|| Error::InvalidRoute("empty route".into()))?;
    let last = *route.last().unwrap();
    if first.im.abs() > 1e-14 * scale || first.re < 0.0 {
        return Err(Error::InvalidRoute(format!(
            "route must start on the non-negative real axis, got {first}"
        )));
    }
    if (last - p.lambda).norm() > 1e-12 * (scale + p.lambda.norm()) {
        return Err(Error::InvalidRoute(format!(
            "route ends at {last}, expected {}",
            p.lambda
        )));
    }
    let opts = &periods.options;
    let at_branch = curve.nearest_branch_distance(p.lambda) <= 1e-14 * scale;
    let start_at_origin = first.re <= 1e-14 * scale;

    if start_at_origin {
        if route.len() == 1 {
            return Ok(periods.a0.clone());
        }
        let mut pts = route.to_vec();
        pts[0] = C64::new(0.0, 0.0);
        let r = integrate_path(curve, &pts, None, true, at_branch, g, opts)?;
        let mut vals = r.values;
        if !at_branch && (r.mu_end + p.mu).norm() < (r.mu_end - p.mu).norm() {
            for v in vals.iter_mut() {
                *v = -*v;
            }
        }
        let w = periods.normalize(&vals);
        return Ok(periods.a0.iter().zip(&w).map(|(a, b)| a + b).collect());
    }

    // inf -> x0 equals (inf -> 0) minus (x0 -> 0) on the positive axis.
    let x0 = C64::new(first.re, 0.0);
    let mu_x0 = curve.mu_sheet0(x0);
    let back = integrate_path(
        curve,
        &[x0, C64::new(0.0, 0.0)],
        Some(mu_x0),
        false,
        true,
        g,
        opts,
    )?;
    let r = integrate_path(curve, route, Some(mu_x0), false, at_branch, g, opts)?;
    if !at_branch {
        let same = (r.mu_end - p.mu).norm();
        if same > 1e-6 * p.mu.norm() {
            return Err(Error::InvalidRoute(format!(
                "route reaches mu = {} instead of {}",
                r.mu_end, p.mu
            )));
        }
    }
    let mono: Vec<C64> = r
        .values
        .iter()
        .zip(&back.values)
        .map(|(a, b)| a - b)
        .collect();
    let w = periods.normalize(&mono);
    Ok(periods.a0.iter().zip(&w).map(|(a, b)| a + b).collect())
}

/// A polyline from the origin to `target` keeping clear of the other branch points.
pub fn canonical_route(periods: &PeriodData, target: C64) -> Vec<C64> {
    let curve = &periods.curve;
    let zero = C64::new(0.0, 0.0);
    let others: Vec<C64> = curve
        .finite_branch_points()
        .into_iter()
        .filter(|&e| e != zero && (e - target).norm() > 1e-14 * curve.scale())
        .collect();
    let len = target.norm();
    let perp = C64::new(0.0, 1.0) * target / len;
    let mut best = (f64::NEG_INFINITY, vec![zero, target]);
    for h in [0.0, 0.25, -0.25, 0.5, -0.5, 0.75, -0.75, 1.0, -1.0] {
        let mid = 0.5 * target + perp * (h * len);
        let path = if h == 0.0 {
            vec![zero, target]
        } else {
            vec![zero, mid, target]
        };
        let clearance = others
            .iter()
            .map(|&e| {
                path.windows(2)
                    .map(|w| seg_dist(w[0], w[1], e))
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(f64::INFINITY, f64::min);
        if clearance > best.0 * 1.5 {
            best = (clearance, path);
        }
    }
    best.1
}

/// Abel image of a finite branch point along [`canonical_route`].
pub fn abel_branch_point(periods: &PeriodData, e: C64) -> Result<Vec<C64>> {
    let p = SheetPoint {
        lambda: e,
        sheet: 0,
        mu: C64::new(0.0, 0.0),
    };
    abel_map(periods, &p, &canonical_route(periods, e))
}

/// `K = sum_i A(E_{2i-1})`, not reduced.
pub fn riemann_constants(periods: &PeriodData) -> Result<Vec<C64>> {
    let g = periods.genus();
    let e = periods.curve.branch_points().to_vec();
    let mut k = vec![C64::new(0.0, 0.0); g];
    for i in 0..g {
        let a = abel_branch_point(periods, e[2 * i])?;
        for (kk, v) in k.iter_mut().zip(&a) {
            *kk += v;
        }
    }
    Ok(k)
}

/// `K = (1_m, nu_2)/2 + B (nu_1, 1)/2` with `nu = (1, ..., g)`.
pub fn riemann_constants_formula(b: &DMatrix<C64>, m: usize) -> Vec<C64> {
    let g = b.nrows();
    let eps_prime: Vec<f64> = (0..g)
        .map(|i| if i < m { 1.0 } else { (i + 1) as f64 })
        .collect();
    let eps: Vec<f64> = (0..g)
        .map(|i| if i < m { (i + 1) as f64 } else { 1.0 })
        .collect();
    half_period(b, &eps_prime, &eps)
}
