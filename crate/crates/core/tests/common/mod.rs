#![allow(dead_code)]

use finitegap::curve::SpectralCurve;
use finitegap::C64;
use nalgebra::DMatrix;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn g1_real() -> SpectralCurve {
    SpectralCurve::new(vec![(-2.0, -0.5)], vec![]).unwrap()
}

pub fn g1_complex() -> SpectralCurve {
    SpectralCurve::new(vec![], vec![c(-1.0, 1.0)]).unwrap()
}

pub fn g2_real() -> SpectralCurve {
    SpectralCurve::new(vec![(-1.0, -0.5), (-3.0, -2.0)], vec![]).unwrap()
}

pub fn g2_mixed() -> SpectralCurve {
    SpectralCurve::new(vec![(-3.0, -1.0)], vec![c(-1.0, 2.0)]).unwrap()
}

pub fn g2_complex() -> SpectralCurve {
    SpectralCurve::new(vec![], vec![c(-1.0, 1.0), c(-2.0, 0.5)]).unwrap()
}

/// One representative curve for each `(g, m)` with `g <= 3`.
pub fn matrix_curve(g: usize, m: usize) -> SpectralCurve {
    let real = [(-1.0, -0.5), (-3.0, -2.0), (-6.0, -4.5)];
    let cplx = [c(-1.0, 1.5), c(-2.5, 0.7), c(0.5, 2.5)];
    SpectralCurve::new(real[..m].to_vec(), cplx[..g - m].to_vec()).unwrap()
}

/// Theta by plain summation over the box `|n_i| <= n_max`.
pub fn theta_box(b: &DMatrix<C64>, z: &[C64], n_max: i64) -> C64 {
    let g = z.len();
    let mut n = vec![-n_max; g];
    let mut total = C64::new(0.0, 0.0);
    loop {
        let mut q = C64::new(0.0, 0.0);
        for i in 0..g {
            for j in 0..g {
                q += b[(i, j)] * (n[i] * n[j]) as f64;
            }
        }
        let lin: C64 = (0..g).map(|i| z[i] * n[i] as f64).sum();
        total += (C64::new(0.0, std::f64::consts::PI) * q
            + C64::new(0.0, 2.0 * std::f64::consts::PI) * lin)
            .exp();
        let mut k = 0;
        loop {
            if k == g {
                return total;
            }
            n[k] += 1;
            if n[k] <= n_max {
                break;
            }
            n[k] = -n_max;
            k += 1;
        }
    }
}

pub fn agm(mut a: f64, mut b: f64) -> f64 {
    for _ in 0..60 {
        let (an, bn) = (0.5 * (a + b), (a * b).sqrt());
        a = an;
        b = bn;
        if (a - b).abs() < 1e-16 * a {
            break;
        }
    }
    a
}

/// `tau` of `y^2 = x (x - lo)(x - hi)` from complete elliptic integrals via the AGM.
pub fn agm_tau(lo: f64, hi: f64) -> C64 {
    let (e1, e2, e3) = (0.0, hi, lo);
    let inner = agm((e1 - e3).sqrt(), (e1 - e2).sqrt());
    let outer = agm((e1 - e3).sqrt(), (e2 - e3).sqrt());
    C64::new(0.0, outer / inner)
}

/// `(x, closest root)` continuation helper used by brute-force contour oracles.
pub fn closest(w: C64, prev: C64) -> C64 {
    let r = w.sqrt();
    if (r - prev).norm() <= (r + prev).norm() {
        r
    } else {
        -r
    }
}

/// Dense trapezoid rule for `lambda^k d lambda / mu` on a circle, `mu` continued
/// from its sheet-0 value at the rightmost point.
pub fn trapezoid_circle(curve: &SpectralCurve, center: C64, radius: f64, k: i32, n: usize) -> C64 {
    let start = center + radius;
    let mut mu = curve.mu_sheet0(start);
    let mut sum = C64::new(0.0, 0.0);
    let h = std::f64::consts::TAU / n as f64;
    for j in 0..n {
        let e = C64::from_polar(1.0, j as f64 * h);
        let lam = center + e * radius;
        mu = closest(curve.mu2(lam), mu);
        let dlam = C64::new(0.0, 1.0) * e * radius * h;
        sum += lam.powi(k) * dlam / mu;
    }
    sum
}
