//! Riemann theta function `theta(z|B) = sum_n exp(pi i n.B.n + 2 pi i n.z)`.
//!
//! Summation runs over the lattice points inside the ellipsoid
//! `(n + w)^T Y (n + w) <= R^2`, where `Y = Im B` and `w = Y^{-1} Im z`. The
//! radius comes from a Gaussian tail bound: the translated lattice `T(n + w)`
//! (with `Y = T^T T`) has minimal distance at least `rho = sqrt(lambda_min(Y))`,
//! so at most `(1 + 2r/rho)^g` points lie within distance `r`, and the
//! neglected terms are bounded by
//! `exp(pi P) * int_R^inf (1 + 2r/rho)^g 2 pi r exp(-pi r^2) dr`
//! with `P` the largest value of `w^T Y w` allowed by the context.

use crate::error::{Error, Result};
use crate::homology::lattice::mat_vec;
use crate::quadrature::GaussLegendre;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Clone, Debug)]
pub struct ThetaContext {
    b: DMatrix<C64>,
    y_inv: DMatrix<f64>,
    t: DMatrix<f64>,
    pub target_abs_error: f64,
    /// Largest admissible `|Y^{-1} Im z|_inf`.
    pub w_bound: f64,
    /// Enumeration radius in the `Y`-norm.
    pub radius: f64,
    /// Certified bound on the neglected tail for admissible arguments.
    pub tail_bound: f64,
    pub min_eig: f64,
}

/// `z = z0 + N + B M`.
#[derive(Clone, Debug, PartialEq)]
pub struct Reduced {
    pub z0: Vec<C64>,
    pub n: Vec<i64>,
    pub m: Vec<i64>,
}

/// Enumeration statistics of one evaluation.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ThetaStats {
    pub lattice_points: usize,
    pub radius: f64,
    pub tail_bound: f64,
}

fn tail_integral(radius: f64, rho: f64, g: usize) -> f64 {
    let rule = GaussLegendre::new(60);
    rule.integrate(radius, radius + 8.0, |r| {
        (1.0 + 2.0 * r / rho).powi(g as i32) * 2.0 * PI * r * (-PI * r * r).exp()
    })
}

impl ThetaContext {
    /// Context for arguments reduced into the fundamental box
    /// (`|Y^{-1} Im z|_inf <= 1/2`).
    pub fn new(b: &DMatrix<C64>, target_abs_error: f64) -> Result<ThetaContext> {
        Self::with_bound(b, target_abs_error, 0.5)
    }

    pub fn with_bound(
        b: &DMatrix<C64>,
        target_abs_error: f64,
        w_bound: f64,
    ) -> Result<ThetaContext> {
        let g = b.nrows();
        if g == 0 || b.ncols() != g {
            return Err(Error::InvalidArgument(
                "Riemann matrix must be square and nonempty".into(),
            ));
        }
        if !(target_abs_error > 0.0) {
            return Err(Error::InvalidArgument(
                "target error must be positive".into(),
            ));
        }
        let y = b.map(|z| z.im);
        let ysym = (&y + y.transpose()) * 0.5;
        let min_eig = ysym
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        if !(min_eig > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "Im B is not positive definite (smallest eigenvalue {min_eig:.3e})"
            )));
        }
        let chol = ysym.clone().cholesky().ok_or_else(|| {
            Error::InvalidArgument("Cholesky factorization of Im B failed".into())
        })?;
        let t = chol.l().transpose();
        let y_inv = chol.inverse();
        let rho = min_eig.sqrt();
        let p: f64 = ysym.iter().map(|x| x.abs()).sum::<f64>() * w_bound * w_bound;
        let pref = (PI * p).exp();
        let mut lo = 0.0;
        let mut hi = 1.0;
        while pref * tail_integral(hi, rho, g) > target_abs_error {
            hi *= 2.0;
            if hi > 1e4 {
                return Err(Error::InvalidArgument(
                    "theta cutoff does not converge".into(),
                ));
            }
        }
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if pref * tail_integral(mid, rho, g) > target_abs_error {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(ThetaContext {
            b: b.clone(),
            y_inv,
            t,
            target_abs_error,
            w_bound,
            radius: hi,
            tail_bound: pref * tail_integral(hi, rho, g),
            min_eig,
        })
    }

    pub fn genus(&self) -> usize {
        self.b.nrows()
    }

    pub fn b(&self) -> &DMatrix<C64> {
        &self.b
    }

    fn w_of(&self, z: &[C64]) -> Vec<f64> {
        let im = DVector::from_iterator(z.len(), z.iter().map(|c| c.im));
        (&self.y_inv * im).iter().cloned().collect()
    }

    /// Theta at an argument inside the declared bound.
    pub fn theta(&self, z: &[C64]) -> Result<C64> {
        self.check_len(z)?;
        let w = self.w_of(z);
        let wmax = w.iter().map(|x| x.abs()).fold(0.0, f64::max);
        if wmax > self.w_bound + 1e-9 {
            return Err(Error::ThetaArgumentOutOfBounds(wmax));
        }
        Ok(self.sum(z, &w, self.radius).0)
    }

    /// Theta with an explicit enumeration radius and statistics. No bound check.
    pub fn theta_with_radius(&self, z: &[C64], radius: f64) -> Result<(C64, ThetaStats)> {
        self.check_len(z)?;
        let w = self.w_of(z);
        let (v, count) = self.sum(z, &w, radius);
        Ok((
            v,
            ThetaStats {
                lattice_points: count,
                radius,
                tail_bound: self.tail_bound,
            },
        ))
    }

    /// Theta at any argument: reduce into the fundamental box, then apply the
    /// transformation factor.
    pub fn theta_any(&self, z: &[C64]) -> Result<C64> {
        self.check_len(z)?;
        let r = self.reduce(z);
        let w = self.w_of(&r.z0);
        let (v, _) = self.sum(&r.z0, &w, self.radius);
        Ok(v * self.transformation_factor(&r.z0, &r.m))
    }

    /// Splits `z = z0 + N + B M` so that `|Y^{-1} Im z0|_inf <= 1/2` and
    /// `|Re z0|_inf <= 1/2`.
    pub fn reduce(&self, z: &[C64]) -> Reduced {
        let w = self.w_of(z);
        let m: Vec<i64> = w.iter().map(|x| x.round() as i64).collect();
        let mf: Vec<f64> = m.iter().map(|&k| k as f64).collect();
        let bm = mat_vec(&self.b, &mf);
        let z1: Vec<C64> = z.iter().zip(&bm).map(|(a, b)| a - b).collect();
        let n: Vec<i64> = z1.iter().map(|c| c.re.round() as i64).collect();
        let z0 = z1.iter().zip(&n).map(|(c, &k)| c - k as f64).collect();
        Reduced { z0, n, m }
    }

    /// `exp(-2 pi i M.z0 - pi i M.B.M)`, the ratio `theta(z0 + N + BM) / theta(z0)`.
    pub fn transformation_factor(&self, z0: &[C64], m: &[i64]) -> C64 {
        let mf: Vec<f64> = m.iter().map(|&k| k as f64).collect();
        let bm = mat_vec(&self.b, &mf);
        let mz: C64 = mf.iter().zip(z0).map(|(a, b)| *a * b).sum();
        let mbm: C64 = mf.iter().zip(&bm).map(|(a, b)| *a * b).sum();
        let i = C64::new(0.0, 1.0);
        (-2.0 * PI * i * mz - PI * i * mbm).exp()
    }

    fn check_len(&self, z: &[C64]) -> Result<()> {
        if z.len() != self.genus() {
            return Err(Error::InvalidArgument(format!(
                "theta argument has length {}, expected {}",
                z.len(),
                self.genus()
            )));
        }
        Ok(())
    }

    fn sum(&self, z: &[C64], w: &[f64], radius: f64) -> (C64, usize) {
        let g = self.genus();
        let mut n = vec![0i64; g];
        let mut acc = C64::new(0.0, 0.0);
        let mut count = 0usize;
        self.enumerate(g, radius * radius, w, &mut n, z, &mut acc, &mut count);
        (acc, count)
    }

    #[allow(clippy::too_many_arguments)]
    fn enumerate(
        &self,
        level: usize,
        budget: f64,
        w: &[f64],
        n: &mut [i64],
        z: &[C64],
        acc: &mut C64,
        count: &mut usize,
    ) {
        let g = self.genus();
        if level == 0 {
            *acc += self.term(n, z);
            *count += 1;
            return;
        }
        let i = level - 1;
        let tii = self.t[(i, i)];
        let mut s = 0.0;
        for j in (i + 1)..g {
            s += self.t[(i, j)] * (n[j] as f64 + w[j]);
        }
        let half = budget.max(0.0).sqrt();
        let lo = ((-s - half) / tii - w[i]).ceil() as i64;
        let hi = ((-s + half) / tii - w[i]).floor() as i64;
        for k in lo..=hi {
            n[i] = k;
            let comp = tii * (k as f64 + w[i]) + s;
            let rem = budget - comp * comp;
            if rem >= 0.0 {
                self.enumerate(i, rem, w, n, z, acc, count);
            }
        }
        n[i] = 0;
    }

    #[allow(clippy::needless_range_loop)]
    fn term(&self, n: &[i64], z: &[C64]) -> C64 {
        let g = n.len();
        let mut q = C64::new(0.0, 0.0);
        let mut lin = C64::new(0.0, 0.0);
        for i in 0..g {
            if n[i] == 0 {
                continue;
            }
            let ni = n[i] as f64;
            lin += ni * z[i];
            q += ni * ni * self.b[(i, i)];
            for j in (i + 1)..g {
                if n[j] != 0 {
                    q += 2.0 * ni * n[j] as f64 * self.b[(i, j)];
                }
            }
        }
        let i = C64::new(0.0, 1.0);
        (PI * i * q + 2.0 * PI * i * lin).exp()
    }
}

/// `|theta((z1, z2) | diag(B1, B2)) - theta(z1|B1) theta(z2|B2)|`.
pub fn block_factorization_check(
    b1: &DMatrix<C64>,
    b2: &DMatrix<C64>,
    z1: &[C64],
    z2: &[C64],
    target_abs_error: f64,
) -> Result<f64> {
    let (g1, g2) = (b1.nrows(), b2.nrows());
    let mut joint = DMatrix::from_element(g1 + g2, g1 + g2, C64::new(0.0, 0.0));
    joint.view_mut((0, 0), (g1, g1)).copy_from(b1);
    joint.view_mut((g1, g1), (g2, g2)).copy_from(b2);
    let mut z = z1.to_vec();
    z.extend_from_slice(z2);
    let tj = ThetaContext::new(&joint, target_abs_error)?.theta_any(&z)?;
    let t1 = ThetaContext::new(b1, target_abs_error)?.theta_any(z1)?;
    let t2 = ThetaContext::new(b2, target_abs_error)?.theta_any(z2)?;
    Ok((tj - t1 * t2).norm())
}
