use super::abel;
use super::basis::{build_basis, CycleBasis, CyclePath};
use super::lattice::{characteristic, im_part, lattice_distance, Characteristic};
use crate::curve::SpectralCurve;
use crate::error::{Error, Result};
use crate::quadrature::{integrate_path, integrate_tail, QuadratureOptions};
use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Residuals of the structural checks performed while computing periods.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PeriodDiagnostics {
    pub symmetry: f64,
    pub min_eig_im_b: f64,
    pub re_block: f64,
    pub iu_imag: f64,
    pub iv_imag: f64,
    pub uv_contour: f64,
    pub a0_half_period: f64,
    pub k_consistency: f64,
    pub quadrature_error: f64,
}

/// Normalized period data of a curve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "PeriodDataRepr", try_from = "PeriodDataRepr")]
pub struct PeriodData {
    pub curve: SpectralCurve,
    /// Riemann matrix `B_ij = int_{b_j} omega_i`.
    pub b: DMatrix<C64>,
    /// `omega_i = sum_k c_ik lambda^k d lambda / mu`, `k = 0..g-1`.
    pub norm_coeffs: DMatrix<C64>,
    pub u: Vec<C64>,
    pub v: Vec<C64>,
    /// Abel image of the origin.
    pub a0: Vec<C64>,
    pub a0_characteristic: Characteristic,
    /// Riemann constants as the half-period representative of the block formula.
    pub k: Vec<C64>,
    /// Riemann constants from summed Abel images of `E_1, E_3, ..., E_{2g-1}`.
    pub k_abel: Vec<C64>,
    pub diagnostics: PeriodDiagnostics,
    pub options: QuadratureOptions,
    pub fingerprint: String,
}

impl PeriodData {
    pub fn genus(&self) -> usize {
        self.curve.genus()
    }

    pub fn m(&self) -> usize {
        self.curve.m()
    }

    /// `Im B` as a real matrix.
    pub fn im_b(&self) -> DMatrix<f64> {
        im_part(&self.b)
    }

    /// Applies the normalization to a vector of monomial integrals.
    pub fn normalize(&self, mono: &[C64]) -> Vec<C64> {
        let g = self.genus();
        (0..g)
            .map(|i| (0..g).map(|k| self.norm_coeffs[(i, k)] * mono[k]).sum())
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("period data serializes")
    }
}

/// Stable hash of the curve data, hex encoded.
pub fn curve_fingerprint(curve: &SpectralCurve) -> String {
    let mut h = Sha256::new();
    for &(lo, hi) in curve.real_pairs() {
        h.update(b"r");
        h.update(lo.to_le_bytes());
        h.update(hi.to_le_bytes());
    }
    for c in curve.complex_pairs() {
        h.update(b"c");
        h.update(c.re.to_le_bytes());
        h.update(c.im.to_le_bytes());
    }
    h.finalize()
        .iter()
        .take(16)
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Integrals of `lambda^k d lambda / mu`, `k = 0..g-1`, over a cycle.
pub fn cycle_periods(
    curve: &SpectralCurve,
    cycle: &CyclePath,
    opts: &QuadratureOptions,
) -> Result<(Vec<C64>, f64)> {
    let g = curve.genus();
    let mut total = vec![C64::new(0.0, 0.0); g];
    let mut err = 0.0;
    for comp in &cycle.components {
        let r = integrate_path(
            curve,
            &comp.vertices,
            Some(comp.start_mu),
            false,
            false,
            g,
            opts,
        )?;
        let closure = (r.mu_end - comp.start_mu).norm();
        if closure > 1e-6 * comp.start_mu.norm() {
            return Err(Error::InvariantViolation(format!(
                "loop starting at {} does not close on its sheet",
                comp.vertices[0]
            )));
        }
        let w = (comp.weight * cycle.orientation) as f64;
        for (t, v) in total.iter_mut().zip(&r.values) {
            *t += w * v;
        }
        err += r.error;
    }
    Ok((total, err))
}

/// Period of `lambda^(k-1) d lambda / mu` over a cycle, `k` in `1..=g`.
pub fn integrate_monomial(
    curve: &SpectralCurve,
    cycle: &CyclePath,
    k: usize,
    opts: &QuadratureOptions,
) -> Result<C64> {
    if k == 0 || k > curve.genus() {
        return Err(Error::InvalidArgument(format!(
            "monomial index {k} outside 1..=g"
        )));
    }
    Ok(cycle_periods(curve, cycle, opts)?.0[k - 1])
}

/// Period data with default quadrature options.
pub fn period_data(curve: &SpectralCurve) -> Result<PeriodData> {
    compute_periods(curve, &QuadratureOptions::default()).map(|(p, _)| p)
}

/// Computes the basis, normalized periods, `U`, `V`, `A(0)` and `K`, and
/// checks every structural invariant.
pub fn compute_periods(
    curve: &SpectralCurve,
    opts: &QuadratureOptions,
) -> Result<(PeriodData, CycleBasis)> {
    let mut basis = build_basis(curve)?;
    let g = curve.genus();
    let m = curve.m();

    let a_res: Vec<(Vec<C64>, f64)> = basis
        .a
        .par_iter()
        .map(|c| cycle_periods(curve, c, opts))
        .collect::<Result<_>>()?;
    let b_res: Vec<(Vec<C64>, f64)> = basis
        .b
        .par_iter()
        .map(|c| cycle_periods(curve, c, opts))
        .collect::<Result<_>>()?;
    let quad_err: f64 = a_res.iter().chain(&b_res).map(|r| r.1).sum();
    let amat = DMatrix::from_fn(g, g, |j, k| a_res[j].0[k]);
    let mut bp = DMatrix::from_fn(g, g, |j, k| b_res[j].0[k]);

    let c = amat
        .transpose()
        .try_inverse()
        .filter(|c| c.iter().all(|z| z.re.is_finite() && z.im.is_finite()))
        .ok_or(Error::SingularPeriodMatrix)?;
    let mut b = &c * bp.transpose();
    for j in 0..m {
        if b[(j, j)].im < 0.0 {
            for k in 0..g {
                bp[(j, k)] = -bp[(j, k)];
            }
            basis.b[j] = basis.b[j].reversed();
        }
    }
    b = &c * bp.transpose();

    let u: Vec<C64> = (0..g).map(|i| -2.0 * c[(i, g - 1)]).collect();
    let sq = curve.prod_neg_branch().sqrt();
    let v: Vec<C64> = (0..g).map(|i| 2.0 * c[(i, 0)] / sq).collect();

    let mut diag = PeriodDiagnostics {
        quadrature_error: quad_err,
        ..Default::default()
    };
    diag.symmetry = (0..g)
        .flat_map(|i| (0..g).map(move |k| (i, k)))
        .map(|(i, k)| (b[(i, k)] - b[(k, i)]).norm())
        .fold(0.0, f64::max);
    let y = im_part(&b);
    let ysym = (&y + y.transpose()) * 0.5;
    diag.min_eig_im_b = ysym
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    diag.re_block = (0..g)
        .flat_map(|i| (0..g).map(move |k| (i, k)))
        .map(|(i, k)| {
            let target = if i == k && i >= m { -0.5 } else { 0.0 };
            (b[(i, k)].re - target).abs()
        })
        .fold(0.0, f64::max);
    let i = C64::new(0.0, 1.0);
    diag.iu_imag = u.iter().map(|z| (i * z).im.abs()).fold(0.0, f64::max);
    diag.iv_imag = v.iter().map(|z| (i * z).im.abs()).fold(0.0, f64::max);
    let (uc, vc) = local_coefficients_by_contour(curve, &c);
    diag.uv_contour = u
        .iter()
        .zip(&uc)
        .chain(v.iter().zip(&vc))
        .map(|(a, b)| (a - b).norm() / a.norm().max(1e-300))
        .fold(0.0, f64::max);

    let r = 4.0 * curve.scale() + 1.0;
    let tail = integrate_tail(curve, r, g);
    let leg = integrate_path(
        curve,
        &[C64::new(r, 0.0), C64::new(0.0, 0.0)],
        Some(curve.mu_sheet0(C64::new(r, 0.0))),
        false,
        true,
        g,
        opts,
    )?;
    let mono: Vec<C64> = tail.iter().zip(&leg.values).map(|(a, b)| a + b).collect();
    let a0: Vec<C64> = (0..g)
        .map(|i| (0..g).map(|k| c[(i, k)] * mono[k]).sum())
        .collect();
    let (a0_char, a0_res) = characteristic(&b, &a0);
    diag.a0_half_period = a0_res;

    let mut pd = PeriodData {
        curve: curve.clone(),
        b,
        norm_coeffs: c,
        u,
        v,
        a0,
        a0_characteristic: a0_char,
        k: vec![],
        k_abel: vec![],
        diagnostics: diag,
        options: opts.clone(),
        fingerprint: curve_fingerprint(curve),
    };
    let k_formula = abel::riemann_constants_formula(&pd.b, m);
    let k_abel = abel::riemann_constants(&pd)?;
    let kdiff: Vec<C64> = k_abel.iter().zip(&k_formula).map(|(a, b)| a - b).collect();
    pd.diagnostics.k_consistency = lattice_distance(&pd.b, &kdiff);
    pd.k = k_formula;
    pd.k_abel = k_abel;

    check_invariants(&pd)?;
    Ok((pd, basis))
}

fn check_invariants(pd: &PeriodData) -> Result<()> {
    let d = &pd.diagnostics;
    let g = pd.genus();
    let m = pd.m();
    let mut problems = Vec::new();
    if d.symmetry > 1e-8 {
        problems.push(format!("B not symmetric ({:.3e})", d.symmetry));
    }
    if !(d.min_eig_im_b > 0.0) {
        problems.push(format!(
            "Im B not positive definite ({:.3e})",
            d.min_eig_im_b
        ));
    }
    if d.re_block > 1e-6 {
        problems.push(format!("Re B block structure off by {:.3e}", d.re_block));
    }
    if d.iu_imag > 1e-8 || d.iv_imag > 1e-8 {
        problems.push(format!(
            "iU / iV not real ({:.3e}, {:.3e})",
            d.iu_imag, d.iv_imag
        ));
    }
    if d.uv_contour > 1e-6 {
        problems.push(format!(
            "U, V disagree with the contour limit ({:.3e})",
            d.uv_contour
        ));
    }
    let expected = Characteristic {
        eps_prime: (0..g).map(|i| if i < m { 0 } else { 1 }).collect(),
        eps: (0..g).map(|i| if i < m { 1 } else { 0 }).collect(),
    };
    if d.a0_half_period > 1e-8 || pd.a0_characteristic != expected {
        problems.push(format!(
            "A(0) has characteristic {:?} (residual {:.3e})",
            pd.a0_characteristic, d.a0_half_period
        ));
    }
    if d.k_consistency > 1e-6 {
        return Err(Error::RiemannConstantMismatch(d.k_consistency));
    }
    if problems.is_empty() {
        Ok(())
    } else {
        Err(Error::InvariantViolation(problems.join("; ")))
    }
}

/// `U` and `V` as mean values of `omega / d(local parameter)` over small
/// circles around infinity (`kappa = lambda^(-1/2)`) and the origin
/// (`xi = lambda^(1/2)`), on the sheet that is positive on the positive axis.
pub fn local_coefficients_by_contour(
    curve: &SpectralCurve,
    c: &DMatrix<C64>,
) -> (Vec<C64>, Vec<C64>) {
    let g = curve.genus();
    let e = curve.branch_points();
    let emax = curve.scale();
    let emin = e.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
    let n = 64;
    let one = C64::new(1.0, 0.0);
    let rk = (0.25 / emax).sqrt();
    let rx = (0.25 * emin).sqrt();
    let mut u = vec![C64::new(0.0, 0.0); g];
    let mut v = vec![C64::new(0.0, 0.0); g];
    for s in 0..n {
        let th = std::f64::consts::TAU * s as f64 / n as f64;
        let kappa = C64::from_polar(rk, th);
        let k2 = kappa * kappa;
        let sk = e.iter().fold(one, |acc, &ei| acc * (one - ei * k2).sqrt());
        let xi = C64::from_polar(rx, th);
        let x2 = xi * xi;
        // Pairwise products are close to a positive real near xi = 0.
        let sx = e
            .chunks(2)
            .fold(one, |acc, p| acc * ((x2 - p[0]) * (x2 - p[1])).sqrt());
        for i in 0..g {
            let mut fu = C64::new(0.0, 0.0);
            let mut fv = C64::new(0.0, 0.0);
            for k in 0..g {
                fu += c[(i, k)] * kappa.powi(2 * (g as i32 - 1 - k as i32));
                fv += c[(i, k)] * x2.powi(k as i32);
            }
            u[i] += -2.0 * fu / sk / n as f64;
            v[i] += 2.0 * fv / sx / n as f64;
        }
    }
    (u, v)
}

#[derive(Serialize, Deserialize)]
struct PeriodDataRepr {
    curve: SpectralCurve,
    fingerprint: String,
    genus: usize,
    m: usize,
    b: Vec<Vec<[f64; 2]>>,
    norm_coeffs: Vec<Vec<[f64; 2]>>,
    u: Vec<[f64; 2]>,
    v: Vec<[f64; 2]>,
    a0: Vec<[f64; 2]>,
    a0_characteristic: Characteristic,
    k: Vec<[f64; 2]>,
    k_abel: Vec<[f64; 2]>,
    diagnostics: PeriodDiagnostics,
    options: QuadratureOptions,
}

fn pair(z: &C64) -> [f64; 2] {
    [z.re, z.im]
}

fn mat_rows(m: &DMatrix<C64>) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|k| pair(&m[(i, k)])).collect())
        .collect()
}

fn rows_mat(rows: &[Vec<[f64; 2]>]) -> std::result::Result<DMatrix<C64>, String> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err("matrix must be square".into());
    }
    Ok(DMatrix::from_fn(n, n, |i, k| {
        C64::new(rows[i][k][0], rows[i][k][1])
    }))
}

fn vecc(v: &[[f64; 2]]) -> Vec<C64> {
    v.iter().map(|p| C64::new(p[0], p[1])).collect()
}

impl From<PeriodData> for PeriodDataRepr {
    fn from(p: PeriodData) -> Self {
        PeriodDataRepr {
            genus: p.genus(),
            m: p.m(),
            b: mat_rows(&p.b),
            norm_coeffs: mat_rows(&p.norm_coeffs),
            u: p.u.iter().map(pair).collect(),
            v: p.v.iter().map(pair).collect(),
            a0: p.a0.iter().map(pair).collect(),
            a0_characteristic: p.a0_characteristic,
            k: p.k.iter().map(pair).collect(),
            k_abel: p.k_abel.iter().map(pair).collect(),
            diagnostics: p.diagnostics,
            options: p.options,
            fingerprint: p.fingerprint,
            curve: p.curve,
        }
    }
}

impl TryFrom<PeriodDataRepr> for PeriodData {
    type Error = String;
    fn try_from(r: PeriodDataRepr) -> std::result::Result<Self, String> {
        if curve_fingerprint(&r.curve) != r.fingerprint {
            return Err("curve fingerprint does not match the stored curve".into());
        }
        Ok(PeriodData {
            b: rows_mat(&r.b)?,
            norm_coeffs: rows_mat(&r.norm_coeffs)?,
            u: vecc(&r.u),
            v: vecc(&r.v),
            a0: vecc(&r.a0),
            a0_characteristic: r.a0_characteristic,
            k: vecc(&r.k),
            k_abel: vecc(&r.k_abel),
            diagnostics: r.diagnostics,
            options: r.options,
            fingerprint: r.fingerprint,
            curve: r.curve,
        })
    }
}
