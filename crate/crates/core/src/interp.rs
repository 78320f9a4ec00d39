//! Local Lagrange interpolation on uniform grids.

/// Interpolates samples `values[k]` taken at `x0 + k h` at the point `x`,
/// using the `points` nodes closest to `x`. Exact at the nodes.
pub fn lagrange_uniform(values: &[f64], x0: f64, h: f64, x: f64, points: usize) -> f64 {
    let n = values.len();
    let s = (x - x0) / h;
    let nearest = s.round();
    if (s - nearest).abs() < 1e-12 && nearest >= 0.0 && (nearest as usize) < n {
        return values[nearest as usize];
    }
    let points = points.min(n).max(1);
    let start = (s.floor() as isize - (points as isize - 1) / 2)
        .clamp(0, n as isize - points as isize) as usize;
    let mut total = 0.0;
    for j in 0..points {
        let sj = (start + j) as f64;
        let mut basis = 1.0;
        for k in 0..points {
            if k != j {
                let sk = (start + k) as f64;
                basis *= (s - sk) / (sj - sk);
            }
        }
        total += basis * values[start + j];
    }
    total
}
