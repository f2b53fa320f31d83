//! Scaling family `Gamma(k)`: real pair `j` multiplied by `k^(j-1)`, complex
//! pairs by `k^m`. As `k` grows the period matrix splits into an `m x m`
//! diagonal block of purely imaginary entries and a block with real part `-I/2`.

use crate::charge::winding_charges;
use crate::curve::SpectralCurve;
use crate::error::Result;
use crate::homology::{period_data, PeriodData};
use crate::quadrature::GaussLegendre;
use crate::solution::{SolutionParams, TorusPoint};
use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Geometric grid used by default.
pub const DEFAULT_K_LIST: [f64; 6] = [1.0, 2.0, 5.0, 10.0, 100.0, 1000.0];
/// Tolerance of the limit-shape assertions at the largest `k`.
pub const LIMIT_TOL: f64 = 0.02;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub k: f64,
    /// Rows of `B(k)` as `[re, im]` pairs; empty when the computation failed.
    pub b: Vec<Vec<[f64; 2]>>,
    pub offdiag_norm: f64,
    pub diag_re_residual: f64,
    pub min_eig_im_b: f64,
    pub charges: Option<Vec<i64>>,
    pub error: Option<String>,
}

impl SweepRecord {
    pub fn b_matrix(&self) -> DMatrix<C64> {
        let g = self.b.len();
        DMatrix::from_fn(g, g, |i, j| C64::new(self.b[i][j][0], self.b[i][j][1]))
    }

    pub fn ok(&self) -> bool {
        self.error.is_none()
    }
}

/// Largest coupling between the two blocks and among distinct entries of the first block.
pub fn offdiag_norm(b: &DMatrix<C64>, m: usize) -> f64 {
    let g = b.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..g {
        for j in 0..g {
            let coupling = (i < m) != (j < m);
            let first_block = i < m && j < m && i != j;
            if coupling || first_block {
                worst = worst.max(b[(i, j)].norm());
            }
        }
    }
    worst
}

/// Largest of `|Re B_jj|` over the first block and `|Re B_2 + I/2|` over the second.
pub fn diag_re_residual(b: &DMatrix<C64>, m: usize) -> f64 {
    let g = b.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..m {
        worst = worst.max(b[(i, i)].re.abs());
    }
    for i in m..g {
        for j in m..g {
            let target = if i == j { -0.5 } else { 0.0 };
            worst = worst.max((b[(i, j)].re - target).abs());
        }
    }
    worst
}

fn record(curve: &SpectralCurve, s: &[i8], x0: &[f64], k: f64) -> SweepRecord {
    let run = || -> Result<(PeriodData, Vec<i64>)> {
        let p = period_data(&curve.scaled(k)?)?;
        let params = SolutionParams::new(&p, TorusPoint::new(s.to_vec(), x0.to_vec())?)?;
        let n = winding_charges(&params)?;
        Ok((p, n))
    };
    match run() {
        Ok((p, n)) => {
            let m = p.m();
            SweepRecord {
                k,
                b: (0..p.genus())
                    .map(|i| {
                        (0..p.genus())
                            .map(|j| [p.b[(i, j)].re, p.b[(i, j)].im])
                            .collect()
                    })
                    .collect(),
                offdiag_norm: offdiag_norm(&p.b, m),
                diag_re_residual: diag_re_residual(&p.b, m),
                min_eig_im_b: p.diagnostics.min_eig_im_b,
                charges: Some(n),
                error: None,
            }
        }
        Err(e) => SweepRecord {
            k,
            b: vec![],
            offdiag_norm: f64::NAN,
            diag_re_residual: f64::NAN,
            min_eig_im_b: f64::NAN,
            charges: None,
            error: Some(e.to_string()),
        },
    }
}

/// One record per `k`; failures are recorded and the sweep continues.
pub fn sweep(
    curve: &SpectralCurve,
    s: &[i8],
    x0: &[f64],
    k_list: &[f64],
) -> Result<Vec<SweepRecord>> {
    if k_list.iter().any(|&k| !(k >= 1.0)) || k_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(crate::Error::InvalidArgument(
            "k list must be increasing and start at 1 or above".into(),
        ));
    }
    Ok(k_list
        .par_iter()
        .map(|&k| record(curve, s, x0, k))
        .collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitReport {
    pub k_max: f64,
    pub offdiag_norm: f64,
    pub re_first_block: f64,
    pub re_second_block: f64,
    /// `B_jj` for `j <= m` extrapolated linearly in `1/k` from the two largest `k`.
    pub tau_extrapolated: Vec<[f64; 2]>,
    pub offdiag_tail_monotone: bool,
    pub charges_constant: bool,
    pub failures: Vec<String>,
}

impl LimitReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

pub fn limit_check(records: &[SweepRecord], m: usize) -> LimitReport {
    let mut failures = Vec::new();
    for r in records.iter().filter(|r| !r.ok()) {
        failures.push(format!("k = {}: {}", r.k, r.error.as_deref().unwrap_or("")));
    }
    let good: Vec<&SweepRecord> = records.iter().filter(|r| r.ok()).collect();
    let Some(last) = good.last() else {
        failures.push("no successful records".into());
        return LimitReport {
            k_max: f64::NAN,
            offdiag_norm: f64::NAN,
            re_first_block: f64::NAN,
            re_second_block: f64::NAN,
            tau_extrapolated: vec![],
            offdiag_tail_monotone: false,
            charges_constant: false,
            failures,
        };
    };
    if last.k < 1000.0 {
        failures.push(format!("largest k is {} (< 1000)", last.k));
    }
    let b = last.b_matrix();
    let g = b.nrows();
    let re_first = (0..m).map(|j| b[(j, j)].re.abs()).fold(0.0, f64::max);
    let mut re_second: f64 = 0.0;
    for i in m..g {
        for j in m..g {
            let target = if i == j { -0.5 } else { 0.0 };
            re_second = re_second.max((b[(i, j)].re - target).abs());
        }
    }
    if last.offdiag_norm >= LIMIT_TOL {
        failures.push(format!(
            "off-block entries {:.3e} at k = {}",
            last.offdiag_norm, last.k
        ));
    }
    if re_first >= LIMIT_TOL {
        failures.push(format!("Re of first block {re_first:.3e}"));
    }
    if re_second >= LIMIT_TOL {
        failures.push(format!("Re of second block deviates by {re_second:.3e}"));
    }
    let tail = &good[good.len() / 2..];
    let monotone = tail
        .windows(2)
        .all(|w| w[1].offdiag_norm <= w[0].offdiag_norm * (1.0 + 1e-9));
    if !monotone {
        failures.push("off-block norm not decreasing on the tail of the sweep".into());
    }
    let charges_constant = good.windows(2).all(|w| w[0].charges == w[1].charges);
    if !charges_constant {
        failures.push("charges change along the sweep".into());
    }
    if good.iter().any(|r| !(r.min_eig_im_b > 0.0)) {
        failures.push("Im B not positive definite at some k".into());
    }
    let tau_extrapolated = if good.len() >= 2 {
        let (r1, r2) = (good[good.len() - 2], last);
        let (b1, b2) = (r1.b_matrix(), b.clone());
        (0..m)
            .map(|j| {
                let t = (b2[(j, j)] * r2.k - b1[(j, j)] * r1.k) / (r2.k - r1.k);
                [t.re, t.im]
            })
            .collect()
    } else {
        (0..m).map(|j| [b[(j, j)].re, b[(j, j)].im]).collect()
    };
    LimitReport {
        k_max: last.k,
        offdiag_norm: last.offdiag_norm,
        re_first_block: re_first,
        re_second_block: re_second,
        tau_extrapolated,
        offdiag_tail_monotone: monotone,
        charges_constant,
        failures,
    }
}

/// CSV rows: `k`, the entries of `B` row by row as re/im, off-block norm,
/// real-part residual and charges.
pub fn sweep_to_csv(records: &[SweepRecord]) -> String {
    let g = records.iter().find(|r| r.ok()).map_or(0, |r| r.b.len());
    let mut out = String::from("k");
    for i in 0..g {
        for j in 0..g {
            out.push_str(&format!(",re_b{}{},im_b{}{}", i + 1, j + 1, i + 1, j + 1));
        }
    }
    out.push_str(",offdiag_norm,diag_re_residual,charges,error\n");
    for r in records {
        out.push_str(&format!("{:.16e}", r.k));
        for i in 0..g {
            for j in 0..g {
                let e =
                    r.b.get(i)
                        .and_then(|row| row.get(j))
                        .copied()
                        .unwrap_or([f64::NAN; 2]);
                out.push_str(&format!(",{:.16e},{:.16e}", e[0], e[1]));
            }
        }
        let charges = r
            .charges
            .as_ref()
            .map(|c| {
                c.iter()
                    .map(|v| v.to_string())
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .unwrap_or_default();
        out.push_str(&format!(
            ",{:.16e},{:.16e},{},{}\n",
            r.offdiag_norm,
            r.diag_re_residual,
            charges,
            r.error.as_deref().unwrap_or("").replace(',', ";")
        ));
    }
    out
}

/// Composite Gauss-Legendre rule on `[a, b]` with `panels` equal pieces.
fn composite(gl: &GaussLegendre, a: f64, b: f64, panels: usize, f: impl Fn(f64) -> f64) -> f64 {
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|p| gl.integrate(a + p as f64 * h, a + (p + 1) as f64 * h, &f))
        .sum()
}

/// Normalized period ratio of a genus-one curve by real-interval quadrature.
///
/// For a real pair `lo < hi < 0`: `tau = i int_lo^hi dx/|y| / int_hi^0 dx/|y|`.
/// For a conjugate pair `c`: `tau = -1/2 + i I+ / (2 I-)` with
/// `I+ = int_0^inf dx/|y|` and `I- = int_-inf^0 dx/|y|`.
pub fn elliptic_tau(component: &SpectralCurve) -> Result<C64> {
    if component.genus() != 1 {
        return Err(crate::Error::InvalidArgument(
            "elliptic_tau needs a genus-one curve".into(),
        ));
    }
    let gl = GaussLegendre::new(40);
    let pi = std::f64::consts::PI;
    if let Some(&(lo, hi)) = component.positional_pairs().first() {
        // x = mid + half cos(theta) removes both endpoint singularities.
        let inner = composite(&gl, 0.0, pi, 8, |th| {
            let x = 0.5 * (lo + hi) + 0.5 * (hi - lo) * th.cos();
            1.0 / (-x).sqrt()
        });
        let outer = composite(&gl, 0.0, pi, 8, |th| {
            let x = 0.5 * hi + 0.5 * (-hi) * th.cos();
            1.0 / (x - lo).sqrt()
        });
        return Ok(C64::new(0.0, inner / outer));
    }
    let c = component.complex_pairs()[0];
    // x = +-t^2 on [0, 1] and x = +-1/u^2 beyond.
    let half = |sgn: f64| {
        let near = composite(&gl, 0.0, 1.0, 64, |t| {
            2.0 / (C64::new(sgn * t * t, 0.0) - c).norm()
        });
        let far = composite(&gl, 0.0, 1.0, 64, |u| {
            2.0 / (C64::new(sgn, 0.0) - c * u * u).norm()
        });
        near + far
    };
    let (i_plus, i_minus) = (half(1.0), half(-1.0));
    Ok(C64::new(-0.5, i_plus / (2.0 * i_minus)))
}
