//! Admissibility of divisors and their interpolation symbols.
//!
//! A divisor `D` is admissible when `A(D) - B (1/2 - s/4, 1/2)` is real modulo
//! the period lattice for exactly one symbol `s`. The interpolation symbol
//! `s'` is read off the real polynomial `P` of degree `g - 1` through the
//! points `(lambda_i, mu_i / lambda_i)`.

use crate::curve::{SheetPoint, SpectralCurve};
use crate::error::{Error, Result};
use crate::homology::lattice::mat_vec;
use crate::homology::{abel_branch_point, abel_map, canonical_route, PeriodData};
use crate::quadrature::gl40;
use crate::solution::all_symbols;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

/// Tolerance on the imaginary residual of the admissibility pattern.
pub const ADMISSIBLE_TOL: f64 = 1e-6;
/// Tolerance on the imaginary part of the interpolating polynomial.
pub const REALNESS_TOL: f64 = 1e-8;

/// A point of a divisor together with the route used for its Abel image.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DivisorPoint {
    pub point: SheetPoint,
    pub route: Vec<C64>,
}

impl DivisorPoint {
    pub fn with_canonical_route(periods: &PeriodData, point: SheetPoint) -> DivisorPoint {
        DivisorPoint {
            route: canonical_route(periods, point.lambda),
            point,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Admissible {
    pub s: Vec<i8>,
    pub x0: Vec<f64>,
    /// Largest imaginary part left after removing the pattern and the lattice.
    pub residual: f64,
}

/// `B (1/2 - s/4, 1/2)`.
pub fn pattern_offset(b: &DMatrix<C64>, s: &[i8]) -> Vec<C64> {
    let g = b.nrows();
    let c: Vec<f64> = (0..g)
        .map(|j| s.get(j).map_or(0.5, |&sj| 0.5 - sj as f64 / 4.0))
        .collect();
    mat_vec(b, &c)
}

/// Imaginary residual and real part of `v - B c_s - B M` with `M` chosen to
/// cancel the imaginary part as well as possible.
fn pattern_residual(periods: &PeriodData, v: &[C64], s: &[i8]) -> (f64, Vec<f64>) {
    let b = &periods.b;
    let off = pattern_offset(b, s);
    let w: Vec<C64> = v.iter().zip(&off).map(|(a, c)| a - c).collect();
    let m = solve_im(periods, &w)
        .iter()
        .map(|x| x.round())
        .collect::<Vec<_>>();
    let bm = mat_vec(b, &m);
    let r: Vec<C64> = w.iter().zip(&bm).map(|(a, c)| a - c).collect();
    let res = r.iter().map(|c| c.im.abs()).fold(0.0, f64::max);
    (res, r.iter().map(|c| c.re.rem_euclid(1.0)).collect())
}

/// `Im(B)^{-1} Im(w)`.
fn solve_im(periods: &PeriodData, w: &[C64]) -> Vec<f64> {
    let y = periods.im_b();
    let rhs = DVector::from_iterator(w.len(), w.iter().map(|c| c.im));
    let sol = y.lu().solve(&rhs).expect("Im B is positive definite");
    sol.iter().copied().collect()
}

/// Classifies a Jacobian point `A(D)` against every symbol.
pub fn classify_image(periods: &PeriodData, v: &[C64]) -> Result<Admissible> {
    let mut hits = Vec::new();
    let mut best = f64::INFINITY;
    for s in all_symbols(periods.m()) {
        let (res, x0) = pattern_residual(periods, v, &s);
        best = best.min(res);
        if res <= ADMISSIBLE_TOL {
            hits.push(Admissible {
                s,
                x0,
                residual: res,
            });
        }
    }
    match hits.len() {
        0 => Err(Error::Inadmissible(format!(
            "smallest pattern residual {best:.3e}"
        ))),
        1 => Ok(hits.pop().unwrap()),
        _ => Err(Error::AmbiguousAdmissibility),
    }
}

/// Sum of Abel images of the divisor points.
pub fn divisor_image(periods: &PeriodData, divisor: &[DivisorPoint]) -> Result<Vec<C64>> {
    let g = periods.genus();
    if divisor.len() != g {
        return Err(Error::InvalidArgument(format!(
            "divisor needs {g} points, got {}",
            divisor.len()
        )));
    }
    let mut v = vec![C64::new(0.0, 0.0); g];
    for d in divisor {
        let a = abel_map(periods, &d.point, &d.route)?;
        for (vi, ai) in v.iter_mut().zip(&a) {
            *vi += ai;
        }
    }
    Ok(v)
}

pub fn check_admissible(periods: &PeriodData, divisor: &[DivisorPoint]) -> Result<Admissible> {
    classify_image(periods, &divisor_image(periods, divisor)?)
}

/// Coefficients (ascending) of the polynomial through `(lambda_i, mu_i/lambda_i)`
/// and the relative size of their imaginary parts.
pub fn interpolating_polynomial(points: &[SheetPoint]) -> Result<(Vec<C64>, f64)> {
    let g = points.len();
    for (i, p) in points.iter().enumerate() {
        if p.lambda.norm() == 0.0 {
            return Err(Error::InvalidArgument("divisor point at the origin".into()));
        }
        if points[..i]
            .iter()
            .any(|q| (q.lambda - p.lambda).norm() <= 1e-12 * (1.0 + p.lambda.norm()))
        {
            return Err(Error::InvalidArgument(
                "divisor points must have distinct lambda".into(),
            ));
        }
    }
    let vander = DMatrix::from_fn(g, g, |i, k| points[i].lambda.powi(k as i32));
    let rhs = DVector::from_iterator(g, points.iter().map(|p| p.mu / p.lambda));
    let coeffs = vander
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::InvalidArgument("singular interpolation data".into()))?;
    let scale = coeffs.iter().map(|c| c.norm()).fold(1e-300, f64::max);
    let imag = coeffs.iter().map(|c| c.im.abs()).fold(0.0, f64::max) / scale;
    Ok((coeffs.iter().copied().collect(), imag))
}

/// `s'_j`: sign of `P` on the `j`-th real interval.
pub fn divisor_symbols(curve: &SpectralCurve, points: &[SheetPoint]) -> Result<Vec<i8>> {
    if points.len() != curve.genus() {
        return Err(Error::InvalidArgument(format!(
            "divisor needs {} points, got {}",
            curve.genus(),
            points.len()
        )));
    }
    let (coeffs, imag) = interpolating_polynomial(points)?;
    if imag > REALNESS_TOL {
        return Err(Error::NonRealPolynomial(imag));
    }
    let p = |x: f64| coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c.re);
    curve
        .positional_pairs()
        .into_iter()
        .enumerate()
        .map(|(j, (lo, hi))| {
            let mid = p(0.5 * (lo + hi));
            const SAMPLES: usize = 64;
            let changes = (0..=SAMPLES)
                .map(|k| p(lo + (hi - lo) * k as f64 / SAMPLES as f64))
                .any(|v| v * mid <= 0.0);
            if mid == 0.0 || changes {
                Err(Error::SignNotConstant(j))
            } else {
                Ok(if mid > 0.0 { 1 } else { -1 })
            }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymbolComparison {
    pub s: Vec<i8>,
    pub s_prime: Vec<i8>,
    pub x0: Vec<f64>,
    pub coincide: bool,
}

/// Compares the symbol from admissibility with the interpolation symbol.
pub fn symbols_coincide_check(
    periods: &PeriodData,
    divisor: &[DivisorPoint],
) -> Result<SymbolComparison> {
    let adm = check_admissible(periods, divisor)?;
    let pts: Vec<SheetPoint> = divisor.iter().map(|d| d.point.clone()).collect();
    let s_prime = divisor_symbols(&periods.curve, &pts)?;
    Ok(SymbolComparison {
        coincide: s_prime == adm.s,
        s: adm.s,
        s_prime,
        x0: adm.x0,
    })
}

/// The real oval over the `j`-th real interval, `phi = 0` at its right end.
#[derive(Clone, Debug)]
pub struct Oval {
    pub lo: f64,
    pub hi: f64,
    others: Vec<C64>,
}

impl Oval {
    pub fn new(curve: &SpectralCurve, j: usize) -> Result<Oval> {
        let pairs = curve.positional_pairs();
        let &(lo, hi) = pairs
            .get(j)
            .ok_or_else(|| Error::InvalidArgument(format!("no real interval {j}")))?;
        let others = curve
            .finite_branch_points()
            .into_iter()
            .filter(|e| !(e.im == 0.0 && (e.re == lo || e.re == hi)))
            .collect();
        Ok(Oval { lo, hi, others })
    }

    fn lambda(&self, phi: f64) -> f64 {
        0.5 * (self.lo + self.hi) + 0.5 * (self.hi - self.lo) * phi.cos()
    }

    /// `sqrt(-r)` where `mu^2 = r (lambda - lo)(lambda - hi)`.
    fn root(&self, lambda: f64) -> f64 {
        let r: C64 = self
            .others
            .iter()
            .map(|e| C64::new(lambda, 0.0) - e)
            .product();
        (-r.re).sqrt()
    }

    pub fn point(&self, phi: f64) -> SheetPoint {
        let lambda = self.lambda(phi);
        let mu = 0.5 * (self.hi - self.lo) * phi.sin() * self.root(lambda);
        let sheet = if mu >= 0.0 { 0 } else { 1 };
        SheetPoint {
            lambda: C64::new(lambda, 0.0),
            sheet,
            mu: C64::new(mu, 0.0),
        }
    }

    /// `int lambda^k d lambda / mu` from the right end to `phi` along the oval.
    pub fn monomials(&self, phi: f64, g: usize) -> Vec<C64> {
        let gl = gl40();
        let panels = (phi.abs() / (PI / 4.0)).ceil().max(1.0) as usize;
        let h = phi / panels as f64;
        let mut out = vec![C64::new(0.0, 0.0); g];
        for p in 0..panels {
            let a = p as f64 * h;
            for (x, w) in gl.nodes.iter().zip(&gl.weights) {
                let ph = a + 0.5 * h * (x + 1.0);
                let lam = self.lambda(ph);
                let f = -0.5 * h * w / self.root(lam);
                let mut pow = 1.0;
                for o in out.iter_mut() {
                    *o += f * pow;
                    pow *= lam;
                }
            }
        }
        out
    }
}

/// Abel images along the real ovals, anchored at the right ends.
pub struct OvalAbel<'a> {
    periods: &'a PeriodData,
    ovals: Vec<(Oval, Vec<C64>)>,
}

impl<'a> OvalAbel<'a> {
    pub fn new(periods: &'a PeriodData) -> Result<OvalAbel<'a>> {
        let curve = &periods.curve;
        let ovals = (0..curve.m())
            .map(|j| {
                let o = Oval::new(curve, j)?;
                let anchor = abel_branch_point(periods, C64::new(o.hi, 0.0))?;
                Ok((o, anchor))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(OvalAbel { periods, ovals })
    }

    pub fn abel(&self, j: usize, phi: f64) -> Vec<C64> {
        let (o, anchor) = &self.ovals[j];
        let w = self
            .periods
            .normalize(&o.monomials(phi, self.periods.genus()));
        anchor.iter().zip(&w).map(|(a, b)| a + b).collect()
    }

    pub fn point(&self, j: usize, phi: f64) -> SheetPoint {
        self.ovals[j].0.point(phi)
    }

    /// `Im(B)^{-1} Im(A(D) - B c_s)` for one point on each of the first `phis.len()` ovals.
    fn pattern_coords(&self, phis: &[f64], s: &[i8]) -> Vec<f64> {
        let g = self.periods.genus();
        let mut v = vec![C64::new(0.0, 0.0); g];
        for (j, &phi) in phis.iter().enumerate() {
            for (vi, ai) in v.iter_mut().zip(self.abel(j, phi)) {
                *vi += ai;
            }
        }
        let off = pattern_offset(&self.periods.b, s);
        let w: Vec<C64> = v.iter().zip(&off).map(|(a, c)| a - c).collect();
        solve_im(self.periods, &w)
    }
}

/// An admissible divisor found on the real ovals, with both symbols.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanHit {
    pub phis: Vec<f64>,
    pub points: Vec<SheetPoint>,
    pub s: Vec<i8>,
    pub x0: Vec<f64>,
    pub s_prime: Option<Vec<i8>>,
    pub symbol_error: Option<String>,
    pub coincide: bool,
}

fn finish_hit(periods: &PeriodData, oa: &OvalAbel, phis: Vec<f64>) -> Result<ScanHit> {
    let points: Vec<SheetPoint> = phis
        .iter()
        .enumerate()
        .map(|(j, &p)| oa.point(j, p))
        .collect();
    let divisor: Vec<DivisorPoint> = points
        .iter()
        .map(|p| DivisorPoint::with_canonical_route(periods, p.clone()))
        .collect();
    let adm = check_admissible(periods, &divisor)?;
    let (s_prime, symbol_error) = match divisor_symbols(&periods.curve, &points) {
        Ok(sp) => (Some(sp), None),
        Err(e) => (None, Some(e.to_string())),
    };
    Ok(ScanHit {
        coincide: s_prime.as_ref() == Some(&adm.s),
        phis,
        points,
        s: adm.s,
        x0: adm.x0,
        s_prime,
        symbol_error,
    })
}

fn near_branch(phi: f64) -> bool {
    let r = phi.rem_euclid(PI);
    r < 1e-6 || PI - r < 1e-6
}

/// Admissible single-point divisors on the real oval of a curve with `g = m = 1`.
pub fn scan_g1(periods: &PeriodData, grid: usize) -> Result<Vec<ScanHit>> {
    if periods.genus() != 1 || periods.m() != 1 {
        return Err(Error::InvalidArgument(
            "the one-parameter scan needs g = m = 1".into(),
        ));
    }
    let oa = OvalAbel::new(periods)?;
    let grid = grid.max(8);
    let phis: Vec<f64> = (0..=grid).map(|k| TAU * k as f64 / grid as f64).collect();
    let mut hits = Vec::new();
    for s in all_symbols(1) {
        let f = |phi: f64| oa.pattern_coords(&[phi], &s)[0];
        let vals: Vec<f64> = phis.iter().map(|&p| f(p)).collect();
        for k in 0..grid {
            let target = vals[k].round();
            let (mut a, mut b) = (phis[k], phis[k + 1]);
            let (fa, fb) = (vals[k] - target, vals[k + 1] - target);
            if fa == 0.0 {
                if !near_branch(a) {
                    hits.push(a);
                }
                continue;
            }
            if fa * fb >= 0.0 || (fa - fb).abs() > 0.5 {
                continue;
            }
            let mut fa = fa;
            for _ in 0..80 {
                let mid = 0.5 * (a + b);
                let fm = f(mid) - target;
                if fm * fa <= 0.0 {
                    b = mid;
                } else {
                    a = mid;
                    fa = fm;
                }
            }
            let root = 0.5 * (a + b);
            if !near_branch(root) {
                hits.push(root);
            }
        }
    }
    hits.sort_by(f64::total_cmp);
    hits.dedup_by(|a, b| (*a - *b).abs() < 1e-8);
    hits.into_iter()
        .map(|p| finish_hit(periods, &oa, vec![p]))
        .collect()
}

/// Admissible two-point divisors with one point on each real oval of a curve
/// with `g = m = 2`: grid search followed by Newton refinement.
pub fn scan_g2(periods: &PeriodData, grid: usize) -> Result<Vec<ScanHit>> {
    if periods.genus() != 2 || periods.m() != 2 {
        return Err(Error::InvalidArgument(
            "the two-parameter scan needs g = m = 2".into(),
        ));
    }
    let oa = OvalAbel::new(periods)?;
    let grid = grid.max(8);
    let mut found: Vec<[f64; 2]> = Vec::new();
    for s in all_symbols(2) {
        let f = |p: [f64; 2]| {
            let v = oa.pattern_coords(&p, &s);
            [v[0], v[1]]
        };
        for i in 0..grid {
            for k in 0..grid {
                let start = [
                    TAU * (i as f64 + 0.5) / grid as f64,
                    TAU * (k as f64 + 0.5) / grid as f64,
                ];
                let f0 = f(start);
                let target = [f0[0].round(), f0[1].round()];
                if (f0[0] - target[0]).abs() > 0.2 || (f0[1] - target[1]).abs() > 0.2 {
                    continue;
                }
                if let Some(root) = newton2(&f, start, target) {
                    let root = [root[0].rem_euclid(TAU), root[1].rem_euclid(TAU)];
                    if near_branch(root[0]) || near_branch(root[1]) {
                        continue;
                    }
                    let dup = found
                        .iter()
                        .any(|q| circ(q[0], root[0]) < 1e-6 && circ(q[1], root[1]) < 1e-6);
                    if !dup {
                        found.push(root);
                    }
                }
            }
        }
    }
    found
        .into_iter()
        .map(|p| finish_hit(periods, &oa, p.to_vec()))
        .collect()
}

fn circ(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

fn newton2<F: Fn([f64; 2]) -> [f64; 2]>(
    f: &F,
    mut p: [f64; 2],
    target: [f64; 2],
) -> Option<[f64; 2]> {
    let h = 1e-6;
    for _ in 0..40 {
        let v = f(p);
        let r = [v[0] - target[0], v[1] - target[1]];
        if r[0].abs().max(r[1].abs()) < 1e-11 {
            return Some(p);
        }
        let f1 = f([p[0] + h, p[1]]);
        let f2 = f([p[0], p[1] + h]);
        let j = [
            [(f1[0] - v[0]) / h, (f2[0] - v[0]) / h],
            [(f1[1] - v[1]) / h, (f2[1] - v[1]) / h],
        ];
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det.abs() < 1e-14 {
            return None;
        }
        let dx = (j[1][1] * r[0] - j[0][1] * r[1]) / det;
        let dy = (j[0][0] * r[1] - j[1][0] * r[0]) / det;
        let step = (dx * dx + dy * dy).sqrt();
        let damp = if step > 0.5 { 0.5 / step } else { 1.0 };
        p = [p[0] - damp * dx, p[1] - damp * dy];
    }
    None
}
