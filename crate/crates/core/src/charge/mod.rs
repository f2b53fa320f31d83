//! Topological charges of finite-gap solutions.

pub mod divisor;
pub mod winding;

pub use divisor::{
    check_admissible, classify_image, divisor_symbols, interpolating_polynomial, scan_g1, scan_g2,
    symbols_coincide_check, Admissible, DivisorPoint, ScanHit, SymbolComparison,
};
pub use winding::{
    closed_form_charges, density, density_deviation_bound, density_direct, epsilon_tilde,
    winding_charges, winding_charges_direct, winding_totals, winding_totals_with,
};

use crate::error::Result;
use crate::homology::PeriodData;
use crate::solution::{all_symbols, SolutionParams, TorusPoint};
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Horizon used by reports when none is given.
pub const DEFAULT_HORIZON: f64 = 200.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChargeReport {
    pub s: Vec<i8>,
    pub x0: Vec<f64>,
    pub n: Vec<i64>,
    pub n_closed: Vec<i64>,
    pub winding_totals: Vec<f64>,
    pub density: f64,
    pub density_direct: f64,
    pub t_horizon: f64,
    pub epsilon_tilde: Vec<i64>,
    #[serde(rename = "match")]
    pub matches: bool,
}

pub fn charge_report(params: &SolutionParams, t_horizon: f64) -> Result<ChargeReport> {
    let p = &params.periods;
    let totals = winding_totals(params)?;
    let n = winding_charges(params)?;
    let n_closed = closed_form_charges(p.genus(), p.m(), &params.torus.s)?;
    Ok(ChargeReport {
        s: params.torus.s.clone(),
        x0: params.torus.x0.clone(),
        density: density(p, &n),
        density_direct: density_direct(params, t_horizon)?,
        t_horizon,
        epsilon_tilde: epsilon_tilde(p.genus(), &params.torus.s),
        matches: n == n_closed,
        n,
        n_closed,
        winding_totals: totals,
    })
}

/// Reports for every symbol vector at the same `x0`.
pub fn charge_matrix(
    periods: &PeriodData,
    x0: &[f64],
    t_horizon: f64,
) -> Result<Vec<ChargeReport>> {
    all_symbols(periods.m())
        .into_par_iter()
        .map(|s| {
            let params = SolutionParams::new(periods, TorusPoint::new(s, x0.to_vec())?)?;
            charge_report(&params, t_horizon)
        })
        .collect()
}

/// CSV table of reports: symbols, charges, closed form, densities and match flag.
pub fn reports_to_csv(reports: &[ChargeReport]) -> String {
    let mut out = String::from("s,x0,n,n_closed,density,density_direct,t_horizon,match\n");
    let join = |v: Vec<String>| v.join(" ");
    for r in reports {
        out.push_str(&format!(
            "{},{},{},{},{:.16e},{:.16e},{:.16e},{}\n",
            join(r.s.iter().map(|v| v.to_string()).collect()),
            join(r.x0.iter().map(|v| format!("{v:.16e}")).collect()),
            join(r.n.iter().map(|v| v.to_string()).collect()),
            join(r.n_closed.iter().map(|v| v.to_string()).collect()),
            r.density,
            r.density_direct,
            r.t_horizon,
            r.matches
        ));
    }
    out
}

/// Charges when `K` is replaced by the constant vector `1/2`.
///
/// The divisor is placed with symbol `s` on this shifted convention. The ratio
/// formula then needs `eps~` of `-s`; the direct winding of `e^{iu}` is
/// returned alongside as an independent check.
pub fn alternate_k_charges(
    periods: &PeriodData,
    s: &[i8],
    x0: &[f64],
) -> Result<(Vec<i64>, Vec<i64>)> {
    let k = vec![C64::new(0.5, 0.0); periods.genus()];
    let params = SolutionParams::with_k(periods, TorusPoint::new(s.to_vec(), x0.to_vec())?, k)?;
    let flipped: Vec<i8> = s.iter().map(|v| -v).collect();
    let totals = winding_totals_with(&params, &epsilon_tilde(periods.genus(), &flipped))?;
    let n = totals
        .into_iter()
        .map(winding::to_integer)
        .collect::<Result<Vec<_>>>()?;
    Ok((n, winding_charges_direct(&params)?))
}
