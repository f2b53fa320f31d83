//! Hyperelliptic spectral curves `mu^2 = lambda * prod(lambda - E_i)` with the
//! reality structure of real finite-gap sine-Gordon data: `m` pairs of negative
//! real branch points and `g - m` complex-conjugate pairs.
//!
//! Real pairs are indexed by position along the negative axis (closest to the
//! origin first) whenever cycles or period matrices are involved. The input
//! order is preserved for [`SpectralCurve::scaled`].

use crate::error::{Error, Result};
use crate::geometry::seg_dist;
use num_complex::Complex64 as C64;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Curve file representation: real pairs `[lo, hi]`, complex pairs `[re, im]`.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct CurveFile {
    #[serde(default)]
    pub real_pairs: Vec<[f64; 2]>,
    #[serde(default)]
    pub complex_pairs: Vec<[f64; 2]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "CurveFile", into = "CurveFile")]
pub struct SpectralCurve {
    real_pairs: Vec<(f64, f64)>,
    complex_pairs: Vec<C64>,
    // E_1..E_{2g} in cycle order: (hi, lo) for real pairs by position, then (c, conj c).
    branch: Vec<C64>,
}

impl From<CurveFile> for SpectralCurve {
    fn from(f: CurveFile) -> Self {
        SpectralCurve::from_parts(
            f.real_pairs.iter().map(|p| (p[0], p[1])).collect(),
            f.complex_pairs
                .iter()
                .map(|c| C64::new(c[0], c[1]))
                .collect(),
        )
    }
}

impl From<SpectralCurve> for CurveFile {
    fn from(c: SpectralCurve) -> Self {
        CurveFile {
            real_pairs: c.real_pairs.iter().map(|&(a, b)| [a, b]).collect(),
            complex_pairs: c.complex_pairs.iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

/// Outcome of [`SpectralCurve::validate`].
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub valid: bool,
    pub genus: usize,
    pub m: usize,
    pub violations: Vec<String>,
    pub warnings: Vec<String>,
}

impl SpectralCurve {
    /// Builds a curve without checking the reality conditions. Use
    /// [`SpectralCurve::validate`] or [`SpectralCurve::new`] for checked input.
    pub fn from_parts(real_pairs: Vec<(f64, f64)>, complex_pairs: Vec<C64>) -> Self {
        let mut sorted = real_pairs.clone();
        sorted.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(std::cmp::Ordering::Equal));
        let mut branch = Vec::with_capacity(2 * (real_pairs.len() + complex_pairs.len()));
        for &(lo, hi) in &sorted {
            branch.push(C64::new(hi, 0.0));
            branch.push(C64::new(lo, 0.0));
        }
        for &c in &complex_pairs {
            branch.push(c);
            branch.push(c.conj());
        }
        SpectralCurve {
            real_pairs,
            complex_pairs,
            branch,
        }
    }

    /// Builds a curve and rejects it unless every reality condition holds.
    pub fn new(real_pairs: Vec<(f64, f64)>, complex_pairs: Vec<C64>) -> Result<Self> {
        let c = Self::from_parts(real_pairs, complex_pairs);
        let report = c.validate();
        if report.valid {
            Ok(c)
        } else {
            Err(Error::InvalidCurve(report.violations.join("; ")))
        }
    }

    pub fn from_json(text: &str) -> std::result::Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("curve serialization cannot fail")
    }

    pub fn genus(&self) -> usize {
        self.real_pairs.len() + self.complex_pairs.len()
    }

    /// Number of real pairs.
    pub fn m(&self) -> usize {
        self.real_pairs.len()
    }

    /// Real pairs `(E_{2j}, E_{2j-1})` in input order.
    pub fn real_pairs(&self) -> &[(f64, f64)] {
        &self.real_pairs
    }

    /// Real pairs sorted by position, closest to the origin first. This is the
    /// indexing used by cycles, period matrices and symbol vectors.
    pub fn positional_pairs(&self) -> Vec<(f64, f64)> {
        (0..self.m())
            .map(|j| (self.branch[2 * j + 1].re, self.branch[2 * j].re))
            .collect()
    }

    pub fn complex_pairs(&self) -> &[C64] {
        &self.complex_pairs
    }

    /// Branch points `E_1..E_{2g}` in cycle order (the origin excluded).
    pub fn branch_points(&self) -> &[C64] {
        &self.branch
    }

    /// All finite branch points: the origin followed by `E_1..E_{2g}`.
    pub fn finite_branch_points(&self) -> Vec<C64> {
        let mut v = Vec::with_capacity(self.branch.len() + 1);
        v.push(C64::new(0.0, 0.0));
        v.extend_from_slice(&self.branch);
        v
    }

    /// Largest branch-point modulus.
    pub fn scale(&self) -> f64 {
        self.branch.iter().map(|e| e.norm()).fold(0.0, f64::max)
    }

    /// Default exclusion radius around branch points.
    pub fn default_delta(&self) -> f64 {
        1e-6 * self.scale().max(f64::MIN_POSITIVE)
    }

    /// `lambda * prod(lambda - E_i)`.
    pub fn mu2(&self, lambda: C64) -> C64 {
        self.branch
            .iter()
            .fold(lambda, |acc, &e| acc * (lambda - e))
    }

    /// `prod(-E_i)`, a positive real number for valid curves.
    pub fn prod_neg_branch(&self) -> f64 {
        self.branch
            .iter()
            .fold(C64::new(1.0, 0.0), |acc, &e| acc * (-e))
            .re
    }

    /// Distance from `lambda` to the nearest finite branch point.
    pub fn nearest_branch_distance(&self, lambda: C64) -> f64 {
        self.branch
            .iter()
            .map(|&e| (lambda - e).norm())
            .fold(lambda.norm(), f64::min)
    }

    /// The sheet-0 branch of `mu`, analytic off the cut system. Cuts run along
    /// each real interval and the vertical segment of each conjugate pair; the
    /// origin is joined to infinity along `[0, +inf)`. On the real axis the
    /// value from the upper side is returned.
    pub fn mu_sheet0(&self, lambda: C64) -> C64 {
        if lambda.im == 0.0 {
            let eta = 1e-9 * (self.scale() + lambda.norm()).max(1e-300);
            let up = self.mu_sheet0_formula(lambda + C64::new(0.0, eta));
            let r = self.mu2(lambda).sqrt();
            return if (r - up).norm() <= (r + up).norm() {
                r
            } else {
                -r
            };
        }
        self.mu_sheet0_formula(lambda)
    }

    fn mu_sheet0_formula(&self, lambda: C64) -> C64 {
        let i = C64::new(0.0, 1.0);
        let mut acc = i * (-lambda).sqrt();
        for pair in self.branch.chunks(2) {
            let (a, b) = (pair[1], pair[0]);
            acc *= (lambda - a) * ((lambda - b) / (lambda - a)).sqrt();
        }
        acc
    }

    /// Sheet index (0 or 1) of a point `(lambda, mu)` relative to [`Self::mu_sheet0`].
    pub fn sheet_of(&self, lambda: C64, mu: C64) -> u8 {
        let m0 = self.mu_sheet0(lambda);
        if (mu - m0).norm() <= (mu + m0).norm() {
            0
        } else {
            1
        }
    }

    /// Collects every violated reality condition plus conditioning warnings.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        let mut warnings = Vec::new();
        let g = self.genus();
        if g == 0 {
            violations.push("genus must be positive: no branch-point pairs given".to_string());
        }
        for (j, &(lo, hi)) in self.real_pairs.iter().enumerate() {
            if !lo.is_finite() || !hi.is_finite() {
                violations.push(format!("real pair {}: non-finite branch point", j + 1));
                continue;
            }
            for v in [lo, hi] {
                if v > 0.0 {
                    violations.push(format!(
                        "real pair {}: positive real branch point {v}",
                        j + 1
                    ));
                } else if v == 0.0 {
                    violations.push(format!("real pair {}: branch point at zero", j + 1));
                }
            }
            if lo >= hi {
                violations.push(format!(
                    "real pair {}: expected E_2j < E_2j-1, got ({lo}, {hi})",
                    j + 1
                ));
            }
        }
        for (j, c) in self.complex_pairs.iter().enumerate() {
            if !c.re.is_finite() || !c.im.is_finite() {
                violations.push(format!("complex pair {}: non-finite value", j + 1));
            } else if c.im == 0.0 {
                violations.push(format!(
                    "complex pair {}: representative {c} is real; real branch points belong in real_pairs",
                    j + 1
                ));
            } else if c.im < 0.0 {
                violations.push(format!(
                    "complex pair {}: representative {c} must lie in the upper half-plane",
                    j + 1
                ));
            }
        }
        let pts = self.finite_branch_points();
        let scale = self.scale().max(f64::MIN_POSITIVE);
        for i in 0..pts.len() {
            for k in (i + 1)..pts.len() {
                if (pts[i] - pts[k]).norm() <= 1e-14 * scale {
                    violations.push(format!(
                        "coinciding branch points {} and {}",
                        pts[i], pts[k]
                    ));
                }
            }
        }
        if violations.is_empty() {
            let pos = self.positional_pairs();
            for w in pos.windows(2) {
                if w[1].1 >= w[0].0 {
                    warnings.push(format!(
                        "real pairs ({}, {}) and ({}, {}) overlap; no cycle basis exists",
                        w[0].0, w[0].1, w[1].0, w[1].1
                    ));
                }
            }
            if pos != self.real_pairs {
                warnings.push(
                    "real pairs are not listed closest-to-origin first; cycle indices and symbol vectors follow positional order"
                        .to_string(),
                );
            }
            let min = self
                .branch
                .iter()
                .map(|e| e.norm())
                .fold(f64::INFINITY, f64::min);
            if min > 0.0 && scale / min > 1e8 {
                warnings.push(format!(
                    "ill-conditioned input: ratio of extreme |E_i| is {:.3e}",
                    scale / min
                ));
            }
        }
        ValidationReport {
            valid: violations.is_empty(),
            genus: g,
            m: self.m(),
            violations,
            warnings,
        }
    }

    /// The deformation family: real pair `j` (input order, 1-based) scaled by
    /// `k^(j-1)`, every complex pair scaled by `k^m`.
    pub fn scaled(&self, k: f64) -> Result<SpectralCurve> {
        if !(k >= 1.0) || !k.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "scale factor k = {k} must be >= 1"
            )));
        }
        let real: Vec<(f64, f64)> = self
            .real_pairs
            .iter()
            .enumerate()
            .map(|(j, &(lo, hi))| {
                let f = k.powi(j as i32);
                (lo * f, hi * f)
            })
            .collect();
        let km = k.powi(self.m() as i32);
        let cplx = self.complex_pairs.iter().map(|&c| c * km).collect();
        SpectralCurve::new(real, cplx)
    }

    /// The components `C_1..C_m` (one elliptic curve per real pair, positional
    /// order) followed by the complex block when `m < g`.
    pub fn elliptic_components(&self) -> Vec<SpectralCurve> {
        let mut out: Vec<SpectralCurve> = self
            .positional_pairs()
            .into_iter()
            .map(|p| SpectralCurve::from_parts(vec![p], vec![]))
            .collect();
        if !self.complex_pairs.is_empty() {
            out.push(SpectralCurve::from_parts(
                vec![],
                self.complex_pairs.clone(),
            ));
        }
        out
    }

    /// Minimum distance from the polyline to the finite branch points.
    pub fn polyline_clearance(&self, path: &[C64]) -> (f64, C64) {
        let mut best = (f64::INFINITY, C64::new(0.0, 0.0));
        for p in self.finite_branch_points() {
            for w in path.windows(2) {
                let d = seg_dist(w[0], w[1], p);
                if d < best.0 {
                    best = (d, p);
                }
            }
            if path.len() == 1 {
                let d = (path[0] - p).norm();
                if d < best.0 {
                    best = (d, p);
                }
            }
        }
        best
    }

    /// Continues `mu` analytically along a polyline. `delta` defaults to
    /// [`Self::default_delta`].
    pub fn continue_mu(
        &self,
        path: &[C64],
        start: &SheetPoint,
        delta: Option<f64>,
    ) -> Result<SheetPoint> {
        let delta = delta.unwrap_or_else(|| self.default_delta());
        if path.is_empty() {
            return Ok(start.clone());
        }
        if (path[0] - start.lambda).norm() > 1e-12 * (1.0 + start.lambda.norm()) {
            return Err(Error::InvalidArgument(
                "path must begin at the start point".to_string(),
            ));
        }
        let (clear, p) = self.polyline_clearance(path);
        if clear < delta {
            return Err(Error::TooCloseToBranchPoint {
                point: format!("{p}"),
                distance: clear,
            });
        }
        let mut mu = start.mu;
        for w in path.windows(2) {
            let (a, b) = (w[0], w[1]);
            let len = (b - a).norm();
            if len == 0.0 {
                continue;
            }
            let mut t = 0.0;
            while t < 1.0 {
                let z = a + (b - a) * t;
                let step = 0.1 * self.nearest_branch_distance(z) / len;
                t = (t + step.max(1e-12)).min(1.0);
                let z1 = a + (b - a) * t;
                mu = closest_root(self.mu2(z1), mu);
            }
        }
        let end = *path.last().unwrap();
        Ok(SheetPoint {
            lambda: end,
            sheet: self.sheet_of(end, mu),
            mu,
        })
    }

    /// Draws a valid curve with `m` real pairs and `g - m` conjugate pairs whose
    /// branch points are well separated. Used for randomized checks.
    pub fn random<R: Rng>(rng: &mut R, g: usize, m: usize) -> SpectralCurve {
        assert!(g >= 1 && m <= g);
        loop {
            let mut real = Vec::with_capacity(m);
            let mut x = -rng.random_range(0.2..1.0);
            for _ in 0..m {
                let hi = x;
                let lo = hi - rng.random_range(0.3..1.5);
                real.push((lo, hi));
                x = lo - rng.random_range(0.3..1.5);
            }
            let mut cplx: Vec<C64> = Vec::new();
            let mut ok = true;
            for _ in 0..(g - m) {
                let mut placed = false;
                for _attempt in 0..200 {
                    let phi = rng.random_range(0.3..(std::f64::consts::PI - 0.3));
                    let r = rng.random_range(0.6..4.0);
                    let c = C64::from_polar(r, phi);
                    if c.im < 0.3 {
                        continue;
                    }
                    let far_from_real = real
                        .iter()
                        .all(|&(lo, hi)| (c - lo).norm() > 0.3 && (c - hi).norm() > 0.3);
                    let far_from_cplx = cplx
                        .iter()
                        .all(|&d: &C64| (c - d).norm() > 0.4 && (c.arg() - d.arg()).abs() > 0.25);
                    if far_from_real && far_from_cplx {
                        cplx.push(c);
                        placed = true;
                        break;
                    }
                }
                if !placed {
                    ok = false;
                    break;
                }
            }
            if !ok {
                continue;
            }
            if let Ok(c) = SpectralCurve::new(real, cplx) {
                return c;
            }
        }
    }
}

/// The square root of `w` closest to `reference`.
pub(crate) fn closest_root(w: C64, reference: C64) -> C64 {
    let s = w.sqrt();
    if (s - reference).norm() <= (s + reference).norm() {
        s
    } else {
        -s
    }
}

/// A point of the curve: `lambda` together with a concrete value of `mu`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SheetPoint {
    pub lambda: C64,
    pub sheet: u8,
    pub mu: C64,
}

impl SheetPoint {
    /// The point above `lambda` on the given sheet.
    pub fn on_sheet(curve: &SpectralCurve, lambda: C64, sheet: u8) -> SheetPoint {
        let m0 = curve.mu_sheet0(lambda);
        let mu = if sheet == 0 { m0 } else { -m0 };
        SheetPoint {
            lambda,
            sheet: sheet & 1,
            mu,
        }
    }

    /// Wraps an explicit `(lambda, mu)`, checking that it lies on the curve.
    pub fn from_mu(curve: &SpectralCurve, lambda: C64, mu: C64) -> Result<SheetPoint> {
        let rhs = curve.mu2(lambda);
        let err = (mu * mu - rhs).norm();
        if err > 1e-12 * rhs.norm().max((mu * mu).norm()).max(1e-300) && err > 1e-300 {
            return Err(Error::InvalidArgument(format!(
                "({lambda}, {mu}) is not on the curve (residual {err:.3e})"
            )));
        }
        Ok(SheetPoint {
            lambda,
            sheet: curve.sheet_of(lambda, mu),
            mu,
        })
    }

    /// Image under the antiholomorphic involution `(lambda, mu) -> (conj lambda, conj mu)`.
    pub fn conjugate(&self, curve: &SpectralCurve) -> SheetPoint {
        let lambda = self.lambda.conj();
        let mu = self.mu.conj();
        SheetPoint {
            lambda,
            sheet: curve.sheet_of(lambda, mu),
            mu,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn validate_examples() {
        let ok = SpectralCurve::from_parts(vec![(-2.0, -0.5)], vec![]);
        assert!(ok.validate().valid);
        let bad = SpectralCurve::from_parts(vec![(-2.0, 0.5)], vec![]);
        let r = bad.validate();
        assert!(!r.valid);
        assert!(r
            .violations
            .iter()
            .any(|v| v.contains("positive real branch point")));
        let mixed = SpectralCurve::from_parts(vec![(-3.0, -1.0)], vec![c(-1.0, 2.0)]);
        assert!(mixed.validate().valid);
    }

    #[test]
    fn validate_reports_each_violation() {
        let bad = SpectralCurve::from_parts(vec![(-0.5, -2.0), (-1.0, 0.0)], vec![c(-1.0, 0.0)]);
        let r = bad.validate();
        assert!(r.violations.len() >= 3, "{:?}", r.violations);
    }

    #[test]
    fn ill_conditioned_warning() {
        let cv = SpectralCurve::from_parts(vec![(-2e-5, -1e-5), (-3e4, -2e4)], vec![]);
        let r = cv.validate();
        assert!(r.valid);
        assert!(r.warnings.iter().any(|w| w.contains("ill-conditioned")));
    }

    #[test]
    fn scaled_examples() {
        let cv = SpectralCurve::new(vec![(-3.0, -2.5), (-1.0, -0.5)], vec![]).unwrap();
        let s = cv.scaled(10.0).unwrap();
        assert_eq!(s.real_pairs(), &[(-3.0, -2.5), (-10.0, -5.0)]);
        assert_eq!(cv.scaled(1.0).unwrap(), cv);
        let cv = SpectralCurve::new(vec![(-3.0, -1.0)], vec![c(-1.0, 2.0)]).unwrap();
        let s = cv.scaled(4.0).unwrap();
        assert_eq!(s.real_pairs(), &[(-3.0, -1.0)]);
        assert_eq!(s.complex_pairs(), &[c(-4.0, 8.0)]);
        assert!(cv.scaled(0.5).is_err());
    }

    #[test]
    fn elliptic_component_examples() {
        let cv = SpectralCurve::new(vec![(-2.0, -0.5)], vec![]).unwrap();
        let comps = cv.elliptic_components();
        assert_eq!(comps.len(), 1);
        assert_eq!(comps[0].branch_points(), &[c(-0.5, 0.0), c(-2.0, 0.0)]);
        let cv = SpectralCurve::new(vec![(-1.0, -0.5), (-3.0, -2.0)], vec![]).unwrap();
        assert_eq!(cv.elliptic_components().len(), 2);
        let cv = SpectralCurve::new(vec![], vec![c(-1.0, 1.0), c(-2.0, 0.5)]).unwrap();
        let comps = cv.elliptic_components();
        assert_eq!(comps.len(), 1);
        assert_eq!(comps[0], cv);
    }

    #[test]
    fn sheet0_normalization_at_infinity() {
        let cv = SpectralCurve::new(vec![(-3.0, -1.0)], vec![c(-1.0, 2.0)]).unwrap();
        let g = cv.genus() as f64;
        let x = C64::new(1e6, 1e-3);
        let r = cv.mu_sheet0(x) / x.powf(g + 0.5);
        assert!((r - 1.0).norm() < 1e-4, "{r}");
        let m = cv.mu_sheet0(C64::new(2.0, 0.0));
        assert!(m.re > 0.0 && m.im.abs() < 1e-12);
    }

    #[test]
    fn sheet0_is_a_root_and_analytic_off_cuts() {
        let cv = SpectralCurve::new(vec![(-3.0, -1.0)], vec![c(-1.0, 2.0)]).unwrap();
        for z in [
            c(0.3, 0.7),
            c(-2.0, 0.1),
            c(-5.0, -3.0),
            c(-0.5, 0.0),
            c(2.0, -1.0),
        ] {
            let m = cv.mu_sheet0(z);
            assert!((m * m - cv.mu2(z)).norm() < 1e-12 * cv.mu2(z).norm());
        }
        // A path that avoids every cut keeps the sheet-0 label.
        let path = [c(1.0, 1.0), c(-0.5, 1.0), c(-0.5, -1.0), c(1.0, -1.0)];
        let start = SheetPoint::on_sheet(&cv, path[0], 0);
        let mut p = start.clone();
        for w in path.windows(2) {
            p = cv.continue_mu(w, &p, None).unwrap();
            assert_eq!(p.sheet, 0);
        }
    }

    #[test]
    fn continuation_monodromy() {
        let cv = SpectralCurve::new(vec![(-2.0, -0.5)], vec![]).unwrap();
        let start = SheetPoint::on_sheet(&cv, c(-0.5, 0.3), 0);
        let one: Vec<C64> = (0..=64)
            .map(|k| {
                c(-0.5, 0.0)
                    + C64::from_polar(
                        0.3,
                        std::f64::consts::FRAC_PI_2 + k as f64 * std::f64::consts::TAU / 64.0,
                    )
            })
            .collect();
        let end = cv.continue_mu(&one, &start, None).unwrap();
        assert!((end.mu + start.mu).norm() < 1e-12 * start.mu.norm());
        assert_eq!(end.sheet, 1 - start.sheet);

        let start = SheetPoint::on_sheet(&cv, c(-1.25, 1.0), 0);
        let two: Vec<C64> = (0..=128)
            .map(|k| {
                c(-1.25, 0.0)
                    + C64::from_polar(
                        1.0,
                        std::f64::consts::FRAC_PI_2 + k as f64 * std::f64::consts::TAU / 128.0,
                    )
            })
            .collect();
        let end = cv.continue_mu(&two, &start, None).unwrap();
        assert!((end.mu - start.mu).norm() < 1e-10 * start.mu.norm());

        let constant = [start.lambda];
        assert_eq!(cv.continue_mu(&constant, &start, None).unwrap(), start);
    }

    #[test]
    fn continuation_rejects_branch_point_hits() {
        let cv = SpectralCurve::new(vec![(-2.0, -0.5)], vec![]).unwrap();
        let start = SheetPoint::on_sheet(&cv, c(-0.5, 1.0), 0);
        let r = cv.continue_mu(&[c(-0.5, 1.0), c(-0.5, -1.0)], &start, None);
        assert!(matches!(r, Err(Error::TooCloseToBranchPoint { .. })));
    }

    #[test]
    fn json_round_trip() {
        let text = r#"{"real_pairs": [[-3.0,-2.5],[-1.0,-0.5]], "complex_pairs": [[-1.0,2.0]]}"#;
        let cv = SpectralCurve::from_json(text).unwrap();
        assert_eq!(cv.genus(), 3);
        assert_eq!(cv.m(), 2);
        assert_eq!(SpectralCurve::from_json(&cv.to_json()).unwrap(), cv);
    }

    #[test]
    fn random_curves_are_valid() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for g in 1..=3 {
            for m in 0..=g {
                let cv = SpectralCurve::random(&mut rng, g, m);
                assert!(cv.validate().valid);
                assert_eq!((cv.genus(), cv.m()), (g, m));
            }
        }
    }
}
