//! Adaptive Gauss–Legendre panels and the endpoint substitutions used for
//! classical periods.

use std::num::NonZeroUsize;
use std::sync::OnceLock;

use gauss_quad::{GaussLaguerre, GaussLegendre};

use crate::error::{Error, Result};

const PANEL_ORDER: usize = 16;
const MAX_DEPTH: u32 = 48;

fn legendre() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = NonZeroUsize::new(PANEL_ORDER).expect("nonzero order");
        GaussLegendre::new(n).as_node_weight_pairs().to_vec()
    })
}

/// Nodes and weights of the `n`-point Gauss–Laguerre rule (weight `e^{-t}`).
pub fn laguerre(n: usize) -> Vec<(f64, f64)> {
    let degree = NonZeroUsize::new(n.max(1)).expect("nonzero order");
    let alpha = 0.0_f64.try_into().expect("alpha = 0 is admissible");
    GaussLaguerre::new(degree, alpha)
        .as_node_weight_pairs()
        .to_vec()
}

fn panel<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    legendre()
        .iter()
        .map(|&(x, w)| w * f(mid + half * x))
        .sum::<f64>()
        * half
}

/// Integral of `f` over `[a, b]` by recursive bisection of Gauss–Legendre
/// panels. Returns the value and the accumulated error estimate.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<(f64, f64)> {
    if a == b {
        return Ok((0.0, 0.0));
    }
    let width = (b - a).abs();
    let mut total = 0.0;
    let mut error = 0.0;
    let mut stack = vec![(a, b, panel(&f, a, b), 0u32)];
    while let Some((lo, hi, whole, depth)) = stack.pop() {
        let mid = 0.5 * (lo + hi);
        let left = panel(&f, lo, mid);
        let right = panel(&f, mid, hi);
        let diff = (left + right - whole).abs();
        let budget = tol * (hi - lo).abs() / width;
        if diff <= budget || depth >= MAX_DEPTH {
            if diff > budget && diff > tol {
                return Err(Error::QuadratureFailure {
                    tolerance: tol,
                    estimate: diff,
                });
            }
            total += left + right;
            error += diff;
        } else {
            stack.push((mid, hi, right, depth + 1));
            stack.push((lo, mid, left, depth + 1));
        }
    }
    if !total.is_finite() {
        return Err(Error::QuadratureFailure {
            tolerance: tol,
            estimate: f64::INFINITY,
        });
    }
    Ok((total, error))
}

/// Integral over `[a, b]` of an integrand with square-root zeros or
/// inverse-square-root blow-ups at both endpoints, via `x = c - r cos(phi)`.
pub fn integrate_between_turning_points<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<(f64, f64)> {
    let c = 0.5 * (a + b);
    let r = 0.5 * (b - a);
    integrate(
        |phi| {
            let (s, co) = phi.sin_cos();
            f(c - r * co) * r * s
        },
        0.0,
        std::f64::consts::PI,
        tol,
    )
}

/// Integral over `[0, b]` of an integrand behaving like `x^{-1/2}` at the
/// origin and like a square root at `b`, via `x = b sin^2(psi)`.
pub fn integrate_from_pole<F: Fn(f64) -> f64>(f: F, b: f64, tol: f64) -> Result<(f64, f64)> {
    integrate(
        |psi| {
            let (s, c) = psi.sin_cos();
            f(b * s * s) * 2.0 * b * s * c
        },
        0.0,
        std::f64::consts::FRAC_PI_2,
        tol,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn polynomial_is_exact() {
        let (v, _) = integrate(|x| x * x * x - 2.0 * x, 0.0, 2.0, 1e-14).unwrap();
        assert!((v - 0.0).abs() < 1e-13);
    }

    #[test]
    fn semicircle_area() {
        let (v, _) =
            integrate_between_turning_points(|x| (1.0 - x * x).max(0.0).sqrt(), -1.0, 1.0, 1e-13)
                .unwrap();
        assert!((v - PI / 2.0).abs() < 1e-12);
    }

    #[test]
    fn inverse_sqrt_endpoints() {
        let (v, _) = integrate_between_turning_points(
            |x| 1.0 / (1.0 - x * x).max(1e-300).sqrt(),
            -1.0,
            1.0,
            1e-13,
        )
        .unwrap();
        assert!((v - PI).abs() < 1e-12);
    }

    #[test]
    fn pole_substitution() {
        // int_0^1 sqrt((1-x)/x) dx = pi/2
        let (v, _) = integrate_from_pole(|x| ((1.0 - x) / x).max(0.0).sqrt(), 1.0, 1e-13).unwrap();
        assert!((v - PI / 2.0).abs() < 1e-12);
    }

    #[test]
    fn laguerre_moments() {
        let rule = laguerre(32);
        let m2: f64 = rule.iter().map(|&(t, w)| w * t * t).sum();
        assert!((m2 - 2.0).abs() < 1e-12);
    }
}
