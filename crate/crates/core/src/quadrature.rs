//! Composite Gauss-Legendre integration of `lambda^k d lambda / mu` along
//! polylines, with analytic continuation of `mu` node by node.
//!
//! Each segment is split until every piece is short compared with its
//! distance to the nearest branch point, so the integrand is analytic on a
//! Bernstein ellipse around the piece. A 20-node and a 40-node rule are compared
//! per piece and pieces are halved until they agree. Endpoints that are branch
//! points are handled with the substitution `t = u^2`, which removes the
//! inverse square-root singularity.

use crate::curve::{closest_root, SpectralCurve};
use crate::error::{Error, Result};
use crate::geometry::{polyline_length, seg_dist};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::sync::OnceLock;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureOptions {
    /// Absolute tolerance for one path integral.
    pub tol: f64,
    /// Maximal number of halvings of a single piece.
    pub max_depth: u32,
    /// A piece is accepted once its length is at most `rho` times its
    /// distance to the nearest branch point.
    pub rho: f64,
    /// Exclusion radius relative to the branch-point scale.
    pub delta_rel: f64,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        QuadratureOptions {
            tol: 1e-10,
            max_depth: 40,
            rho: 0.5,
            delta_rel: 1e-6,
        }
    }
}

/// Gauss-Legendre rule on `[-1, 1]`.
#[derive(Clone, Debug)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes by Newton iteration on `P_n`, ascending.
    pub fn new(n: usize) -> GaussLegendre {
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Integral of a real function over `[a, b]`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let h = 0.5 * (b - a);
        let c = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(c + h * x))
            .sum::<f64>()
            * h
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

pub fn gl20() -> &'static GaussLegendre {
    static R: OnceLock<GaussLegendre> = OnceLock::new();
    R.get_or_init(|| GaussLegendre::new(20))
}

pub fn gl40() -> &'static GaussLegendre {
    static R: OnceLock<GaussLegendre> = OnceLock::new();
    R.get_or_init(|| GaussLegendre::new(40))
}

/// Result of a path integral: one value per monomial power.
#[derive(Clone, Debug)]
pub struct PathIntegral {
    pub values: Vec<C64>,
    /// `mu` continued to the final point (zero at a branch-point end).
    pub mu_end: C64,
    /// Sum of per-piece differences between the two rules.
    pub error: f64,
}

#[derive(Clone, Copy)]
struct Piece {
    a: C64,
    b: C64,
    sing_a: bool,
    sing_b: bool,
}

struct Integrator<'a> {
    curve: &'a SpectralCurve,
    bps: Vec<C64>,
    npow: usize,
    opts: &'a QuadratureOptions,
    total_len: f64,
    /// Branch points at the ends of the path; their factors of `mu^2` are
    /// formed from offsets to avoid cancellation close to them.
    anchors: Vec<C64>,
}

impl<'a> Integrator<'a> {
    fn branch_clearance(&self, p: &Piece) -> f64 {
        let tol = 1e-14 * (p.b - p.a).norm();
        let mut d = f64::INFINITY;
        for &e in &self.bps {
            if p.sing_a && (e - p.a).norm() <= tol {
                continue;
            }
            if p.sing_b && (e - p.b).norm() <= tol {
                continue;
            }
            d = d.min(seg_dist(p.a, p.b, e));
        }
        d
    }

    fn split(p: &Piece) -> (Piece, Piece) {
        let mid = 0.5 * (p.a + p.b);
        (
            Piece {
                a: p.a,
                b: mid,
                sing_a: p.sing_a,
                sing_b: false,
            },
            Piece {
                a: mid,
                b: p.b,
                sing_a: false,
                sing_b: p.sing_b,
            },
        )
    }

    fn geometric_pieces(&self, p: Piece, depth: u32, out: &mut Vec<Piece>) {
        let needs_split = if p.sing_a && p.sing_b {
            true
        } else {
            (p.b - p.a).norm() > self.opts.rho * self.branch_clearance(&p)
        };
        if needs_split && depth < 200 {
            let (l, r) = Self::split(&p);
            self.geometric_pieces(l, depth + 1, out);
            self.geometric_pieces(r, depth + 1, out);
        } else {
            out.push(p);
        }
    }

    fn mu2_at(&self, a: C64, d: C64, t: f64, lam: C64) -> C64 {
        self.bps.iter().fold(C64::new(1.0, 0.0), |acc, &e| {
            let f = if self.anchors.contains(&e) {
                (a - e) + d * t
            } else {
                lam - e
            };
            acc * f
        })
    }

    /// Applies one rule to a piece, continuing `mu` from `mu_prev`.
    /// `mu_prev = None` is allowed only for a singular start.
    fn apply_rule(&self, p: &Piece, rule: &GaussLegendre, mu_prev: Option<C64>) -> (Vec<C64>, C64) {
        let mut vals = vec![C64::new(0.0, 0.0); self.npow];
        let mut mu = mu_prev;
        let d = p.b - p.a;
        for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
            let u = 0.5 * (x + 1.0);
            let wu = 0.5 * w;
            let (t, dt) = if p.sing_a {
                (u * u, 2.0 * u * wu)
            } else if p.sing_b {
                (1.0 - (1.0 - u) * (1.0 - u), 2.0 * (1.0 - u) * wu)
            } else {
                (u, wu)
            };
            let lam = p.a + d * t;
            let m2 = self.mu2_at(p.a, d, t, lam);
            let s = match mu {
                Some(prev) => closest_root(m2, prev),
                None => m2.sqrt(),
            };
            mu = Some(s);
            let f = d * dt / s;
            let mut pw = C64::new(1.0, 0.0);
            for v in vals.iter_mut() {
                *v += f * pw;
                pw *= lam;
            }
        }
        (vals, mu.expect("rule has nodes"))
    }

    /// Integrates one piece, halving until both rules agree. Returns the
    /// values, `mu` at the end of the piece, and the error estimate.
    fn piece(&self, p: Piece, mu_prev: Option<C64>, depth: u32) -> Result<(Vec<C64>, C64, f64)> {
        let (v20, _) = self.apply_rule(&p, gl20(), mu_prev);
        let (v40, mu_last) = self.apply_rule(&p, gl40(), mu_prev);
        let diff = v20
            .iter()
            .zip(&v40)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        let size = v40.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let frac = (p.b - p.a).norm() / self.total_len.max(f64::MIN_POSITIVE);
        let allowed = self.opts.tol * frac + 1e-13 * size;
        // Pieces shorter than a few ulps of the path are limited by roundoff.
        let resolvable = frac > 1e-11;
        if diff > allowed && resolvable {
            if depth >= self.opts.max_depth {
                return Err(Error::QuadratureNonConvergence(format!(
                    "piece [{}, {}] still differs by {diff:.3e} after {depth} halvings",
                    p.a, p.b
                )));
            }
            let (l, r) = Self::split(&p);
            let (vl, mu_mid, el) = self.piece(l, mu_prev, depth + 1)?;
            let (vr, mu_end, er) = self.piece(r, Some(mu_mid), depth + 1)?;
            let vals = vl.iter().zip(&vr).map(|(a, b)| a + b).collect();
            return Ok((vals, mu_end, el + er));
        }
        let mu_end = if p.sing_b {
            C64::new(0.0, 0.0)
        } else {
            closest_root(self.curve.mu2(p.b), mu_last)
        };
        Ok((v40, mu_end, diff))
    }
}

/// Integrates `lambda^k d lambda / mu` for `k = 0..npow` along the polyline.
///
/// `mu_start` is the value of `mu` at `pts[0]`; it must be `None` exactly when
/// the start is a branch point (`singular_start`), in which case the sign is
/// the principal root at the first node and callers fix it afterwards.
pub fn integrate_path(
    curve: &SpectralCurve,
    pts: &[C64],
    mu_start: Option<C64>,
    singular_start: bool,
    singular_end: bool,
    npow: usize,
    opts: &QuadratureOptions,
) -> Result<PathIntegral> {
    if pts.len() < 2 {
        return Ok(PathIntegral {
            values: vec![C64::new(0.0, 0.0); npow],
            mu_end: mu_start.unwrap_or_default(),
            error: 0.0,
        });
    }
    if singular_start == mu_start.is_some() {
        return Err(Error::InvalidArgument(
            "a start value of mu is required unless the path starts at a branch point".into(),
        ));
    }
    let bps = curve.finite_branch_points();
    let delta = opts.delta_rel * curve.scale();
    let last = pts.len() - 2;
    for (i, w) in pts.windows(2).enumerate() {
        for &e in &bps {
            let allowed_a =
                i == 0 && singular_start && (e - w[0]).norm() <= 1e-14 * (1.0 + e.norm());
            let allowed_b =
                i == last && singular_end && (e - w[1]).norm() <= 1e-14 * (1.0 + e.norm());
            if allowed_a || allowed_b {
                continue;
            }
            let d = seg_dist(w[0], w[1], e);
            if d < delta {
                return Err(Error::TooCloseToBranchPoint {
                    point: format!("{e}"),
                    distance: d,
                });
            }
        }
    }
    let it = Integrator {
        curve,
        bps,
        npow,
        opts,
        total_len: polyline_length(pts),
        anchors: [(singular_start, pts[0]), (singular_end, pts[pts.len() - 1])]
            .into_iter()
            .filter_map(|(sing, p)| sing.then_some(p))
            .collect(),
    };
    let mut pieces = Vec::new();
    for (i, w) in pts.windows(2).enumerate() {
        if w[0] == w[1] {
            continue;
        }
        let p = Piece {
            a: w[0],
            b: w[1],
            sing_a: singular_start && i == 0,
            sing_b: singular_end && i == last,
        };
        it.geometric_pieces(p, 0, &mut pieces);
    }
    let mut total = vec![C64::new(0.0, 0.0); npow];
    let mut err = 0.0;
    let mut mu = mu_start;
    for p in pieces {
        let (v, mu_end, e) = it.piece(p, mu, 0)?;
        for (t, x) in total.iter_mut().zip(&v) {
            *t += x;
        }
        err += e;
        mu = Some(mu_end);
    }
    Ok(PathIntegral {
        values: total,
        mu_end: mu.unwrap_or_default(),
        error: err,
    })
}

/// Integral from infinity to the real point `r > 4 max|E|` along the positive
/// axis on sheet 0, via `lambda = r / v^2`.
pub fn integrate_tail(curve: &SpectralCurve, r: f64, npow: usize) -> Vec<C64> {
    let g = curve.genus() as i32;
    let e = curve.branch_points();
    let rule = gl40();
    let mut out = vec![C64::new(0.0, 0.0); npow];
    for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
        let v = 0.5 * (x + 1.0);
        let wv = 0.5 * w;
        let v2 = v * v;
        let s = e.iter().fold(C64::new(1.0, 0.0), |acc, &ei| {
            acc * (C64::new(1.0, 0.0) - ei * (v2 / r)).sqrt()
        });
        for (k, o) in out.iter_mut().enumerate() {
            let p = 2 * (g - 1 - k as i32);
            let coef = -2.0 * r.powf(k as f64 + 0.5 - g as f64) * v.powi(p);
            *o += wv * coef / s;
        }
    }
    out
}
