use crate::error::{Error, Result};
use num_complex::Complex64 as C64;
use std::f64::consts::FRAC_PI_4;

/// Maximal number of bisection levels below the base grid.
pub const MAX_REFINEMENT: u32 = 20;

/// Total change of `arg f(t)` for `t` from `a` to `b`.
///
/// The interval is cut into `base_steps` pieces; every piece is bisected until
/// both halves move the argument by less than `pi/4`, so each accepted step
/// changes it by less than `pi/2`.
pub fn track_arg<F>(mut f: F, a: f64, b: f64, base_steps: usize) -> Result<f64>
where
    F: FnMut(f64) -> Result<C64>,
{
    let n = base_steps.max(1);
    let mut total = 0.0;
    let mut t0 = a;
    let mut f0 = f(a)?;
    for k in 1..=n {
        let t1 = a + (b - a) * k as f64 / n as f64;
        let f1 = f(t1)?;
        total += refine(&mut f, t0, f0, t1, f1, 0)?;
        t0 = t1;
        f0 = f1;
    }
    Ok(total)
}

fn refine<F>(f: &mut F, t0: f64, f0: C64, t1: f64, f1: C64, level: u32) -> Result<f64>
where
    F: FnMut(f64) -> Result<C64>,
{
    let tm = 0.5 * (t0 + t1);
    let fm = f(tm)?;
    let d1 = (fm / f0).arg();
    let d2 = (f1 / fm).arg();
    if d1.abs() < FRAC_PI_4 && d2.abs() < FRAC_PI_4 {
        return Ok(d1 + d2);
    }
    if level >= MAX_REFINEMENT {
        return Err(Error::RefinementLimit(tm));
    }
    Ok(refine(f, t0, f0, tm, fm, level + 1)? + refine(f, tm, fm, t1, f1, level + 1)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    #[test]
    fn counts_fast_rotation() {
        let w = track_arg(|t| Ok(C64::from_polar(1.0, 37.0 * TAU * t)), 0.0, 1.0, 4).unwrap();
        assert!((w - 37.0 * TAU).abs() < 1e-9);
        let w = track_arg(|t| Ok(C64::from_polar(2.0, -3.0 * TAU * t)), 0.0, 1.0, 1).unwrap();
        assert!((w + 3.0 * TAU).abs() < 1e-9);
    }

    #[test]
    fn refinement_limit_reported() {
        // A jump of the argument by pi cannot be resolved by bisection.
        let r = track_arg(
            |t| {
                Ok(if t < 0.3 {
                    C64::new(1.0, 0.0)
                } else {
                    C64::new(-1.0, 0.0)
                })
            },
            0.0,
            1.0,
            3,
        );
        assert!(matches!(r, Err(Error::RefinementLimit(_))));
    }
}
