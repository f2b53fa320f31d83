use crate::error::{Error, Result};
use crate::homology::lattice::mat_vec;
use crate::homology::PeriodData;
use crate::solution::SolutionParams;
use crate::tracking::track_arg;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use std::f64::consts::{PI, TAU};

/// Base grid for tracking along `T in [0, 1]`; adaptive bisection refines it.
const WINDING_STEPS: usize = 64;
/// Largest admissible distance of a winding total from an integer.
pub const INTEGER_TOLERANCE: f64 = 0.01;

/// `eps~_j = (-1)^j s_j` (1-based) for `j <= m`, zero above.
pub fn epsilon_tilde(g: usize, s: &[i8]) -> Vec<i64> {
    (0..g)
        .map(|i| match s.get(i) {
            Some(&sj) => {
                if i % 2 == 0 {
                    -(sj as i64)
                } else {
                    sj as i64
                }
            }
            None => 0,
        })
        .collect()
}

/// `n_j = (-1)^(j-1) s_j` for `j <= m`, zero above.
pub fn closed_form_charges(g: usize, m: usize, s: &[i8]) -> Result<Vec<i64>> {
    if s.len() != m || m > g {
        return Err(Error::InvalidArgument(format!(
            "need {m} <= {g} symbols, got {}",
            s.len()
        )));
    }
    if s.iter().any(|&v| v != 1 && v != -1) {
        return Err(Error::InvalidArgument("symbols must be +1 or -1".into()));
    }
    Ok(epsilon_tilde(g, s).into_iter().map(|e| -e).collect())
}

pub(crate) fn to_integer(total: f64) -> Result<i64> {
    let r = total.round();
    if (total - r).abs() > INTEGER_TOLERANCE {
        return Err(Error::NonIntegerWinding(total));
    }
    Ok(r as i64)
}

fn shifted(params: &SolutionParams, j: usize, t: f64) -> Vec<C64> {
    let mut z = params.base.clone();
    z[j] -= t;
    z
}

/// Real winding totals of the theta-ratio formula, one per cycle.
pub fn winding_totals(params: &SolutionParams) -> Result<Vec<f64>> {
    winding_totals_with(params, &epsilon_tilde(params.genus(), &params.torus.s))
}

/// Same as [`winding_totals`] with an explicit `eps~`.
pub fn winding_totals_with(params: &SolutionParams, et: &[i64]) -> Result<Vec<f64>> {
    let g = params.genus();
    let et_f: Vec<f64> = et.iter().map(|&e| e as f64).collect();
    let half: Vec<C64> = mat_vec(&params.periods.b, &et_f)
        .into_iter()
        .map(|v| v / 2.0)
        .collect();
    (0..g)
        .into_par_iter()
        .map(|j| {
            let ratio = |t: f64| -> Result<C64> {
                let z = shifted(params, j, t);
                let zs: Vec<C64> = z.iter().zip(&half).map(|(a, b)| a + b).collect();
                let den = params.theta_checked(&z)?;
                Ok(params.theta.theta_any(&zs)? / den)
            };
            let d = track_arg(ratio, 0.0, 1.0, WINDING_STEPS)?;
            Ok(-et_f[j] + 2.0 * d / TAU)
        })
        .collect()
}

/// Topological charges from the theta-ratio formula.
pub fn winding_charges(params: &SolutionParams) -> Result<Vec<i64>> {
    winding_totals(params)?
        .into_iter()
        .map(to_integer)
        .collect()
}

/// Charges as the winding of `e^{iu}` itself along `z_j(T) = base - T e_j`.
pub fn winding_charges_direct(params: &SolutionParams) -> Result<Vec<i64>> {
    (0..params.genus())
        .into_par_iter()
        .map(|j| {
            let d = track_arg(
                |t| params.exp_iu_at(&shifted(params, j, t)),
                0.0,
                1.0,
                WINDING_STEPS,
            )?;
            to_integer(d / TAU)
        })
        .collect()
}

/// `sum_j (iU_j - iV_j) n_j / 4`.
pub fn density(periods: &PeriodData, n: &[i64]) -> f64 {
    let i = C64::new(0.0, 1.0);
    periods
        .u
        .iter()
        .zip(&periods.v)
        .zip(n)
        .map(|((u, v), &nj)| (i * u - i * v).re * nj as f64 / 4.0)
        .sum()
}

fn check_horizon(t_horizon: f64) -> Result<()> {
    if !(t_horizon.is_finite() && t_horizon > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "horizon must be positive, got {t_horizon}"
        )));
    }
    Ok(())
}

/// `(u(T, 0) - u(0, 0)) / (2 pi T)`.
pub fn density_direct(params: &SolutionParams, t_horizon: f64) -> Result<f64> {
    check_horizon(t_horizon)?;
    let u = params.u_along(&[(0.0, 0.0), (t_horizon, 0.0)])?;
    Ok((u[1] - u[0]) / (2.0 * PI * t_horizon))
}

/// `sup_{x in [0, T]} |u(x) - u(0) - 2 pi nbar x| / (2 pi T)`, sampled every `dx`.
pub fn density_deviation_bound(
    params: &SolutionParams,
    nbar: f64,
    t_horizon: f64,
    dx: f64,
) -> Result<f64> {
    check_horizon(t_horizon)?;
    let n = (t_horizon / dx).ceil().max(1.0) as usize;
    let pts: Vec<(f64, f64)> = (0..=n)
        .map(|k| (t_horizon * k as f64 / n as f64, 0.0))
        .collect();
    let u = params.u_along(&pts)?;
    let worst = pts
        .iter()
        .zip(&u)
        .map(|(&(x, _), &uk)| (uk - u[0] - 2.0 * PI * nbar * x).abs())
        .fold(0.0, f64::max);
    Ok(worst / (2.0 * PI * t_horizon))
}
