use crate::output::{emit, format_or, json, matrix_csv, samples_csv, scan_csv};
use crate::{ChargesArgs, Common, Failure, Format, SampleArgs, ScanArgs, SweepArgs, TorusArgs};
use finitegap::charge::{charge_report, reports_to_csv, scan_g1, scan_g2, ChargeReport};
use finitegap::deformation::{limit_check, sweep_to_csv, SweepRecord};
use finitegap::homology::PeriodData;
use finitegap::solution::{all_symbols, linspace, DEFAULT_THETA_TOL};
use finitegap::{compute_periods, QuadratureOptions, SolutionParams, SpectralCurve, TorusPoint};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

type Outcome = Result<u8, Failure>;

fn load_curve(c: &Common) -> Result<SpectralCurve, Failure> {
    let text = std::fs::read_to_string(&c.curve)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", c.curve.display())))?;
    SpectralCurve::from_json(&text)
        .map_err(|e| Failure::Usage(format!("cannot parse {}: {e}", c.curve.display())))
}

fn valid_curve(c: &Common) -> Result<SpectralCurve, Failure> {
    let curve = load_curve(c)?;
    let report = curve.validate();
    if !report.valid {
        return Err(Failure::Domain(format!(
            "invalid curve: {}",
            report.violations.join("; ")
        )));
    }
    Ok(curve)
}

fn quadrature(c: &Common) -> Result<QuadratureOptions, Failure> {
    let mut opts = QuadratureOptions::default();
    if let Some(tol) = c.tol_quadrature {
        if !(tol.is_finite() && tol > 0.0) {
            return Err(Failure::Usage(format!(
                "--tol-quadrature must be positive, got {tol}"
            )));
        }
        opts.tol = tol;
    }
    Ok(opts)
}

fn theta_tol(c: &Common) -> Result<f64, Failure> {
    match c.tol_theta {
        Some(t) if !(t.is_finite() && t > 0.0) => Err(Failure::Usage(format!(
            "--tol-theta must be positive, got {t}"
        ))),
        Some(t) => Ok(t),
        None => Ok(DEFAULT_THETA_TOL),
    }
}

fn periods_of(c: &Common, curve: &SpectralCurve) -> Result<PeriodData, Failure> {
    Ok(compute_periods(curve, &quadrature(c)?)?.0)
}

fn symbol(t: &TorusArgs, m: usize) -> Result<Vec<i8>, Failure> {
    match &t.s {
        Some(s) if s.len() != m => Err(Failure::Usage(format!(
            "--s needs {m} entries, got {}",
            s.len()
        ))),
        Some(s) => Ok(s.clone()),
        None if m == 0 => Ok(Vec::new()),
        None => Err(Failure::Usage(format!(
            "--s is required for a curve with {m} real pairs"
        ))),
    }
}

fn torus_x0(t: &TorusArgs, g: usize) -> Result<Vec<f64>, Failure> {
    match &t.x0 {
        Some(x) if x.len() != g => Err(Failure::Usage(format!(
            "--x0 needs {g} entries, got {}",
            x.len()
        ))),
        Some(x) => Ok(x.clone()),
        None => Ok(TorusPoint::random(&mut ChaCha8Rng::seed_from_u64(t.seed), Vec::new(), g).x0),
    }
}

fn solution(
    c: &Common,
    periods: &PeriodData,
    s: Vec<i8>,
    x0: Vec<f64>,
) -> Result<SolutionParams, Failure> {
    let torus = TorusPoint::new(s, x0).map_err(|e| Failure::Usage(e.to_string()))?;
    Ok(SolutionParams::with_theta_tol(
        periods,
        torus,
        theta_tol(c)?,
    )?)
}

pub fn validate(c: &Common) -> Outcome {
    let report = load_curve(c)?.validate();
    emit(c, &json(&report)?)?;
    Ok(if report.valid { 0 } else { 1 })
}

pub fn periods(c: &Common) -> Outcome {
    let curve = valid_curve(c)?;
    let pd = periods_of(c, &curve)?;
    let text = match format_or(c, Format::Json) {
        Format::Json => pd.to_json() + "\n",
        Format::Csv => matrix_csv(&pd),
    };
    emit(c, &text)?;
    Ok(0)
}

pub fn charges(a: &ChargesArgs) -> Outcome {
    let c = &a.common;
    let curve = valid_curve(c)?;
    let (g, m) = (curve.genus(), curve.m());
    let symbols = if a.all_s {
        all_symbols(m)
    } else {
        vec![symbol(&a.torus, m)?]
    };
    let x0 = torus_x0(&a.torus, g)?;
    let pd = periods_of(c, &curve)?;
    let reports = symbols
        .into_iter()
        .map(|s| {
            let p = solution(c, &pd, s, x0.clone())?;
            Ok(charge_report(&p, a.horizon)?)
        })
        .collect::<Result<Vec<ChargeReport>, Failure>>()?;
    let text = match format_or(c, Format::Json) {
        Format::Json if a.all_s => json(&reports)?,
        Format::Json => json(&reports[0])?,
        Format::Csv => reports_to_csv(&reports),
    };
    emit(c, &text)?;
    Ok(if reports.iter().all(|r| r.matches) {
        0
    } else {
        1
    })
}

pub fn sample(a: &SampleArgs) -> Outcome {
    let c = &a.common;
    if a.nx == 0 || a.nt == 0 {
        return Err(Failure::Usage("--nx and --nt must be positive".into()));
    }
    let curve = valid_curve(c)?;
    let pd = periods_of(c, &curve)?;
    let p = solution(
        c,
        &pd,
        symbol(&a.torus, curve.m())?,
        torus_x0(&a.torus, curve.genus())?,
    )?;
    let rows = p.sample_grid(
        &linspace(a.xmin, a.xmax, a.nx),
        &linspace(a.tmin, a.tmax, a.nt),
    )?;
    let text = match format_or(c, Format::Csv) {
        Format::Csv => samples_csv(&rows),
        Format::Json => json(&rows)?,
    };
    emit(c, &text)?;
    Ok(0)
}

#[derive(Serialize)]
struct SweepOutput<'a> {
    records: &'a [SweepRecord],
    limit: finitegap::deformation::LimitReport,
}

pub fn sweep(a: &SweepArgs) -> Outcome {
    let c = &a.common;
    let curve = valid_curve(c)?;
    let s = symbol(&a.torus, curve.m())?;
    let x0 = torus_x0(&a.torus, curve.genus())?;
    let records = finitegap::deformation::sweep(&curve, &s, &x0, &a.k)?;
    let text = match format_or(c, Format::Csv) {
        Format::Csv => sweep_to_csv(&records),
        Format::Json => json(&SweepOutput {
            limit: limit_check(&records, curve.m()),
            records: &records,
        })?,
    };
    emit(c, &text)?;
    Ok(if records.iter().all(|r| r.ok()) { 0 } else { 1 })
}

pub fn admissible_scan(a: &ScanArgs) -> Outcome {
    let c = &a.common;
    let curve = valid_curve(c)?;
    let pd = periods_of(c, &curve)?;
    let hits = match (curve.genus(), curve.m()) {
        (1, 1) => scan_g1(&pd, a.grid.unwrap_or(720))?,
        (2, 2) => scan_g2(&pd, a.grid.unwrap_or(24))?,
        (g, m) => {
            return Err(Failure::Usage(format!(
                "scan supports g = m = 1 and g = m = 2, got g = {g}, m = {m}"
            )))
        }
    };
    let text = match format_or(c, Format::Json) {
        Format::Json => json(&hits)?,
        Format::Csv => scan_csv(&hits),
    };
    emit(c, &text)?;
    Ok(if !hits.is_empty() && hits.iter().all(|h| h.coincide) {
        0
    } else {
        1
    })
}
