use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

/// `v = residual + N + B M` with integer `N`, `M`.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeReduction {
    pub residual: Vec<C64>,
    pub n: Vec<i64>,
    pub m: Vec<i64>,
}

/// Half-period characteristic `(eps', eps)`: `v = eps'/2 + B eps/2` mod lattice,
/// entries in `{0, 1}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Characteristic {
    pub eps_prime: Vec<i64>,
    pub eps: Vec<i64>,
}

pub fn im_part(b: &DMatrix<C64>) -> DMatrix<f64> {
    b.map(|z| z.im)
}

pub fn re_part(b: &DMatrix<C64>) -> DMatrix<f64> {
    b.map(|z| z.re)
}

pub fn mat_vec(b: &DMatrix<C64>, x: &[f64]) -> Vec<C64> {
    (0..b.nrows())
        .map(|i| (0..b.ncols()).map(|k| b[(i, k)] * x[k]).sum())
        .collect()
}

/// Rounds the real coordinates of `v` in the basis `(I, B)` of the lattice.
pub fn lattice_reduce(b: &DMatrix<C64>, v: &[C64]) -> LatticeReduction {
    let g = v.len();
    let y = im_part(b);
    let imv = DVector::from_iterator(g, v.iter().map(|z| z.im));
    let mreal = y
        .clone()
        .lu()
        .solve(&imv)
        .unwrap_or_else(|| DVector::zeros(g));
    let m: Vec<i64> = mreal.iter().map(|x| x.round() as i64).collect();
    let mf: Vec<f64> = m.iter().map(|&x| x as f64).collect();
    let bm = mat_vec(b, &mf);
    let w: Vec<C64> = v.iter().zip(&bm).map(|(a, c)| a - c).collect();
    let n: Vec<i64> = w.iter().map(|z| z.re.round() as i64).collect();
    let residual = w
        .iter()
        .zip(&n)
        .map(|(z, &k)| z - C64::new(k as f64, 0.0))
        .collect();
    LatticeReduction { residual, n, m }
}

/// Sup-norm distance from `v` to the nearest lattice vector `N + B M`.
pub fn lattice_distance(b: &DMatrix<C64>, v: &[C64]) -> f64 {
    let g = v.len();
    let r = lattice_reduce(b, v).residual;
    let mut best = f64::INFINITY;
    let total = 3usize.pow(2 * g as u32);
    for code in 0..total {
        let mut c = code;
        let mut digit = || {
            let d = (c % 3) as f64 - 1.0;
            c /= 3;
            d
        };
        let dn: Vec<f64> = (0..g).map(|_| digit()).collect();
        let dm: Vec<f64> = (0..g).map(|_| digit()).collect();
        let bm = mat_vec(b, &dm);
        let d = (0..g)
            .map(|i| (r[i] - dn[i] - bm[i]).norm())
            .fold(0.0, f64::max);
        best = best.min(d);
    }
    best
}

/// Half-period vector `eps'/2 + B eps/2`.
pub fn half_period(b: &DMatrix<C64>, eps_prime: &[f64], eps: &[f64]) -> Vec<C64> {
    mat_vec(b, eps)
        .iter()
        .zip(eps_prime)
        .map(|(be, &e)| 0.5 * (be + e))
        .collect()
}

/// Characteristic of a half-period together with the lattice residual of `2v`.
pub fn characteristic(b: &DMatrix<C64>, v: &[C64]) -> (Characteristic, f64) {
    let two: Vec<C64> = v.iter().map(|z| 2.0 * z).collect();
    let red = lattice_reduce(b, &two);
    let res = red.residual.iter().map(|z| z.norm()).fold(0.0, f64::max);
    (
        Characteristic {
            eps_prime: red.n.iter().map(|k| k.rem_euclid(2)).collect(),
            eps: red.m.iter().map(|k| k.rem_euclid(2)).collect(),
        },
        res,
    )
}
