//! Real finite-gap sine-Gordon solutions
//! `e^{iu} = C1 theta(A0 + z) theta(-A0 + z) / theta(z)^2` with
//! `z(x, t) = -A(D) - K + i x (V - U)/4 - i t (U + V)/4`.
//!
//! The divisor enters only through `A(D) = x0 + B (1/2 - s/4, 1/2)`, a point of
//! the real torus with symbol `s`. `A0` is the half-period representative
//! `eps'/2 + B eps/2` with `eps = (1_m, 0)`, `eps' = (0_m, 1)`, and
//! `C1 = (-1)^(g-m) exp(pi i eps.B.eps / 2)`.

use crate::error::{Error, Result};
use crate::homology::lattice::{half_period, mat_vec};
use crate::homology::PeriodData;
use crate::theta::ThetaContext;
use crate::tracking::track_arg;
use num_complex::Complex64 as C64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Default absolute accuracy of theta evaluations.
pub const DEFAULT_THETA_TOL: f64 = 1e-13;

/// Component symbol and real coordinate of a point on a real torus.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TorusPoint {
    pub s: Vec<i8>,
    pub x0: Vec<f64>,
}

impl TorusPoint {
    pub fn new(s: Vec<i8>, x0: Vec<f64>) -> Result<TorusPoint> {
        if let Some(bad) = s.iter().find(|&&v| v != 1 && v != -1) {
            return Err(Error::InvalidArgument(format!(
                "symbol entries must be +1 or -1, got {bad}"
            )));
        }
        if x0.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("x0 must be finite".into()));
        }
        Ok(TorusPoint { s, x0 })
    }

    /// Uniform `x0` in `[0, 1)^g`.
    pub fn random<R: Rng>(rng: &mut R, s: Vec<i8>, g: usize) -> TorusPoint {
        TorusPoint {
            s,
            x0: (0..g).map(|_| rng.random::<f64>()).collect(),
        }
    }
}

/// Every symbol vector in `{+1, -1}^m`, starting with all `+1`.
pub fn all_symbols(m: usize) -> Vec<Vec<i8>> {
    (0..(1usize << m))
        .map(|code| {
            (0..m)
                .map(|j| if code >> j & 1 == 0 { 1 } else { -1 })
                .collect()
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct SolutionParams {
    pub periods: PeriodData,
    pub torus: TorusPoint,
    /// `-A(D) - K`.
    pub base: Vec<C64>,
    /// `A(D)` from the torus point.
    pub divisor_image: Vec<C64>,
    pub k_used: Vec<C64>,
    pub a0: Vec<C64>,
    pub c1: C64,
    pub theta: ThetaContext,
    dzdx: Vec<C64>,
    dzdt: Vec<C64>,
}

/// One row of a field sample.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleRow {
    pub x: f64,
    pub t: f64,
    pub re: f64,
    pub im: f64,
    pub u: f64,
    pub modulus_err: f64,
}

impl SolutionParams {
    pub fn new(periods: &PeriodData, torus: TorusPoint) -> Result<SolutionParams> {
        Self::build(periods, torus, None, DEFAULT_THETA_TOL)
    }

    pub fn with_theta_tol(
        periods: &PeriodData,
        torus: TorusPoint,
        tol: f64,
    ) -> Result<SolutionParams> {
        Self::build(periods, torus, None, tol)
    }

    /// Same solution data with an explicit vector in place of `K`.
    pub fn with_k(periods: &PeriodData, torus: TorusPoint, k: Vec<C64>) -> Result<SolutionParams> {
        Self::build(periods, torus, Some(k), DEFAULT_THETA_TOL)
    }

    fn build(
        periods: &PeriodData,
        torus: TorusPoint,
        k: Option<Vec<C64>>,
        tol: f64,
    ) -> Result<SolutionParams> {
        let g = periods.genus();
        let m = periods.m();
        if torus.s.len() != m || torus.x0.len() != g {
            return Err(Error::InvalidArgument(format!(
                "torus point needs {m} symbols and {g} coordinates, got {} and {}",
                torus.s.len(),
                torus.x0.len()
            )));
        }
        let torus = TorusPoint::new(torus.s, torus.x0)?;
        let b = &periods.b;
        let cs: Vec<f64> = (0..g)
            .map(|j| {
                if j < m {
                    0.5 - torus.s[j] as f64 / 4.0
                } else {
                    0.5
                }
            })
            .collect();
        let bc = mat_vec(b, &cs);
        let divisor_image: Vec<C64> = bc.iter().zip(&torus.x0).map(|(v, &x)| v + x).collect();
        let k_used = k.unwrap_or_else(|| periods.k.clone());
        if k_used.len() != g {
            return Err(Error::InvalidArgument("K must have length g".into()));
        }
        let base = divisor_image
            .iter()
            .zip(&k_used)
            .map(|(a, k)| -a - k)
            .collect();
        let eps: Vec<f64> = (0..g).map(|j| if j < m { 1.0 } else { 0.0 }).collect();
        let eps_prime: Vec<f64> = eps.iter().map(|e| 1.0 - e).collect();
        let a0 = half_period(b, &eps_prime, &eps);
        let be = mat_vec(b, &eps);
        let ebe: C64 = eps.iter().zip(&be).map(|(a, c)| *a * c).sum();
        let sign = if (g - m).is_multiple_of(2) { 1.0 } else { -1.0 };
        let c1 = sign * (C64::new(0.0, PI) * ebe / 2.0).exp();
        let i = C64::new(0.0, 1.0);
        let dzdx = periods
            .v
            .iter()
            .zip(&periods.u)
            .map(|(v, u)| i * (v - u) / 4.0)
            .collect();
        let dzdt = periods
            .u
            .iter()
            .zip(&periods.v)
            .map(|(u, v)| -i * (u + v) / 4.0)
            .collect();
        Ok(SolutionParams {
            theta: ThetaContext::new(b, tol)?,
            periods: periods.clone(),
            torus,
            base,
            divisor_image,
            k_used,
            a0,
            c1,
            dzdx,
            dzdt,
        })
    }

    pub fn genus(&self) -> usize {
        self.periods.genus()
    }

    /// `z(x, t)`; the increments are real because `iU`, `iV` are real.
    pub fn z_of_xt(&self, x: f64, t: f64) -> Vec<C64> {
        (0..self.genus())
            .map(|j| self.base[j] + self.dzdx[j] * x + self.dzdt[j] * t)
            .collect()
    }

    /// Theta at `z`, failing when the reduced value nearly vanishes.
    pub fn theta_checked(&self, z: &[C64]) -> Result<C64> {
        let r = self.theta.reduce(z);
        let t0 = self.theta.theta(&r.z0)?;
        if t0.norm() < 1e-12 {
            return Err(Error::ThetaUnderflow(t0.norm()));
        }
        Ok(t0 * self.theta.transformation_factor(&r.z0, &r.m))
    }

    /// `e^{iu}` at an arbitrary argument `z` of the Jacobian.
    pub fn exp_iu_at(&self, z: &[C64]) -> Result<C64> {
        let zp: Vec<C64> = z.iter().zip(&self.a0).map(|(a, b)| a + b).collect();
        let zm: Vec<C64> = z.iter().zip(&self.a0).map(|(a, b)| a - b).collect();
        let den = self.theta_checked(z)?;
        let tp = self.theta.theta_any(&zp)?;
        let tm = self.theta.theta_any(&zm)?;
        Ok(self.c1 * tp * tm / (den * den))
    }

    pub fn exp_iu(&self, x: f64, t: f64) -> Result<C64> {
        self.exp_iu_at(&self.z_of_xt(x, t))
    }

    /// Continuous branch of `u` along straight segments between waypoints.
    pub fn u_along(&self, waypoints: &[(f64, f64)]) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(waypoints.len());
        let Some(&(x0, t0)) = waypoints.first() else {
            return Ok(out);
        };
        let mut u = self.exp_iu(x0, t0)?.arg();
        out.push(u);
        for w in waypoints.windows(2) {
            let ((xa, ta), (xb, tb)) = (w[0], w[1]);
            let len = ((xb - xa).powi(2) + (tb - ta).powi(2)).sqrt();
            if len > 0.0 {
                let steps = (len / 0.05).ceil() as usize;
                u += track_arg(
                    |s| self.exp_iu(xa + s * (xb - xa), ta + s * (tb - ta)),
                    0.0,
                    1.0,
                    steps,
                )?;
            }
            out.push(u);
        }
        Ok(out)
    }

    /// `|u_tt - u_xx + sin u|` from centered second differences of the phase
    /// relative to the stencil center.
    pub fn pde_residual(&self, x: f64, t: f64, h: f64) -> Result<f64> {
        let c = self.exp_iu(x, t)?;
        let rel = |xx: f64, tt: f64| -> Result<f64> { Ok((self.exp_iu(xx, tt)? / c).arg()) };
        let utt = rel(x, t + h)? + rel(x, t - h)?;
        let uxx = rel(x + h, t)? + rel(x - h, t)?;
        let sin_u = c.im / c.norm();
        Ok(((utt - uxx) / (h * h) + sin_u).abs())
    }

    /// Samples `e^{iu}` and a continuous `u` on the grid `xs x ts` (rows by `t`).
    pub fn sample_grid(&self, xs: &[f64], ts: &[f64]) -> Result<Vec<SampleRow>> {
        let mut rows = Vec::with_capacity(xs.len() * ts.len());
        if xs.is_empty() || ts.is_empty() {
            return Ok(rows);
        }
        let column: Vec<(f64, f64)> = ts.iter().map(|&t| (xs[0], t)).collect();
        let u_col = self.u_along(&column)?;
        for (j, &t) in ts.iter().enumerate() {
            let row: Vec<(f64, f64)> = xs.iter().map(|&x| (x, t)).collect();
            let u_row = self.u_along(&row)?;
            let shift = u_col[j] - u_row[0];
            for (i, &x) in xs.iter().enumerate() {
                let e = self.exp_iu(x, t)?;
                rows.push(SampleRow {
                    x,
                    t,
                    re: e.re,
                    im: e.im,
                    u: u_row[i] + shift,
                    modulus_err: (e.norm() - 1.0).abs(),
                });
            }
        }
        Ok(rows)
    }

    /// Smallest of `|theta(z)|`, `|theta(z + A0)|`, `|theta(z - A0)|` over a
    /// grid, each evaluated at the reduced argument.
    pub fn min_theta_modulus(&self, xs: &[f64], ts: &[f64]) -> Result<f64> {
        let mut best = f64::INFINITY;
        for &t in ts {
            for &x in xs {
                let z = self.z_of_xt(x, t);
                for sgn in [0.0, 1.0, -1.0] {
                    let zz: Vec<C64> = z.iter().zip(&self.a0).map(|(a, b)| a + sgn * b).collect();
                    let r = self.theta.reduce(&zz);
                    best = best.min(self.theta.theta(&r.z0)?.norm());
                }
            }
        }
        Ok(best)
    }
}

/// Evenly spaced points from `a` to `b` inclusive.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![a],
        _ => (0..n)
            .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}
