use num_complex::Complex64 as C64;

/// Distance from `p` to the segment `[a, b]`.
pub fn seg_dist(a: C64, b: C64, p: C64) -> f64 {
    let d = b - a;
    let l2 = d.norm_sqr();
    if l2 == 0.0 {
        return (p - a).norm();
    }
    let t = ((p - a) * d.conj()).re / l2;
    let t = t.clamp(0.0, 1.0);
    (a + d * t - p).norm()
}

/// Total length of a polyline.
pub fn polyline_length(pts: &[C64]) -> f64 {
    pts.windows(2).map(|w| (w[1] - w[0]).norm()).sum()
}
