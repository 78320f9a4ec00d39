//! Convolutions with `1/cosh` and principal-value convolutions with `1/sinh`
//! on a [`ThetaGrid`], including the contributions from beyond both edges.
//!
//! Left of the grid a function is extended by its edge value; right of the
//! grid it is supplied by the caller at the Gauss–Laguerre abscissae
//! `L + t_q` (see [`Convolver::tail_points`]).

use rayon::prelude::*;
use std::f64::consts::PI;

use super::ThetaGrid;
use crate::quadrature;

pub(crate) const TAIL_ORDER: usize = 32;

/// Trapezoid weights with fourth-order end corrections on `len >= 6` uniform nodes.
pub(crate) fn gregory_weights(len: usize, h: f64) -> Vec<f64> {
    const END: [f64; 3] = [3.0 / 8.0, 7.0 / 6.0, 23.0 / 24.0];
    let mut w = vec![h; len];
    for (k, c) in END.iter().enumerate() {
        w[k] = c * h;
        w[len - 1 - k] = c * h;
    }
    w
}

/// `(1/2 pi) int f(theta') / cosh(theta_i - theta') dtheta'` at every node.
#[derive(Debug, Clone)]
pub(crate) struct Convolver {
    grid: ThetaGrid,
    weights: Vec<f64>,
    kernel: Vec<f64>,
    left: Vec<f64>,
    tail: Vec<(f64, f64)>,
    right: Vec<f64>,
}

impl Convolver {
    pub(crate) fn new(grid: ThetaGrid) -> Self {
        let n = grid.len;
        let h = grid.spacing();
        let l = grid.half_width;
        let kernel = (0..n).map(|k| 1.0 / (k as f64 * h).cosh()).collect();
        let left = (0..n)
            .map(|i| 2.0 * (-(grid.node(i) + l)).exp().atan())
            .collect();
        let tail = quadrature::laguerre(TAIL_ORDER);
        let mut right = Vec::with_capacity(n * TAIL_ORDER);
        for i in 0..n {
            let d = grid.node(i) - l;
            for &(t, w) in &tail {
                // 1/cosh(d - t) = 2 e^{d-t} / (1 + e^{2(d-t)}); e^{-t} is in w.
                right.push(w * 2.0 * d.exp() / (1.0 + (2.0 * (d - t)).exp()));
            }
        }
        Self {
            grid,
            weights: gregory_weights(grid.len, grid.spacing()),
            kernel,
            left,
            tail,
            right,
        }
    }

    /// Abscissae `L + t_q` at which the right tail must be supplied.
    pub(crate) fn tail_points(&self) -> Vec<f64> {
        self.tail
            .iter()
            .map(|&(t, _)| self.grid.half_width + t)
            .collect()
    }

    pub(crate) fn apply(&self, f: &[f64], tail_values: &[f64]) -> Vec<f64> {
        let n = self.grid.len;
        let g: Vec<f64> = f.iter().zip(&self.weights).map(|(a, w)| a * w).collect();
        let edge = f[0];
        (0..n)
            .into_par_iter()
            .map(|i| {
                let mut acc = 0.0;
                for j in 0..i {
                    acc += g[j] * self.kernel[i - j];
                }
                for j in i..n {
                    acc += g[j] * self.kernel[j - i];
                }
                acc += edge * self.left[i];
                let row = &self.right[i * TAIL_ORDER..(i + 1) * TAIL_ORDER];
                for (c, v) in row.iter().zip(tail_values) {
                    acc += c * v;
                }
                acc / (2.0 * PI)
            })
            .collect()
    }
}

/// Eighth-order central first derivative at node `i` (one-sided stencils are
/// not needed: principal values are only taken away from the edges).
pub(crate) fn derivative(f: &[f64], i: usize, h: f64) -> f64 {
    const C: [f64; 4] = [4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0];
    let mut acc = 0.0;
    for (k, c) in C.iter().enumerate() {
        acc += c * (f[i + k + 1] - f[i - k - 1]);
    }
    acc / h
}

/// `PV int f(theta') / sinh(theta_i - theta') dtheta'` by subtracting
/// `f(theta_i)`, whose own principal value vanishes.
#[derive(Debug, Clone)]
pub(crate) struct SinhPv {
    grid: ThetaGrid,
    weights: Vec<f64>,
    inv_sinh: Vec<f64>,
    tail: Vec<(f64, f64)>,
}

impl SinhPv {
    pub(crate) fn new(grid: ThetaGrid) -> Self {
        let h = grid.spacing();
        let inv_sinh = (0..grid.len)
            .map(|k| {
                if k == 0 {
                    0.0
                } else {
                    1.0 / (k as f64 * h).sinh()
                }
            })
            .collect();
        Self {
            grid,
            weights: gregory_weights(grid.len, grid.spacing()),
            inv_sinh,
            tail: quadrature::laguerre(TAIL_ORDER),
        }
    }

    pub(crate) fn at_node(&self, f: &[f64], tail_values: &[f64], i: usize) -> f64 {
        let n = self.grid.len;
        let l = self.grid.half_width;
        let theta = self.grid.node(i);
        let fi = f[i];
        let mut acc = 0.0;
        for j in 0..i {
            acc += self.weights[j] * (f[j] - fi) * self.inv_sinh[i - j];
        }
        for j in i + 1..n {
            acc -= self.weights[j] * (f[j] - fi) * self.inv_sinh[j - i];
        }
        acc -= self.weights[i] * derivative(f, i, self.grid.spacing());
        // Left: f = f_0 below -L, and int_a^inf du/sinh u = -log tanh(a/2).
        acc += (f[0] - fi) * -((0.5 * (theta + l)).tanh().ln());
        // Right: the tail of f, minus f_i times int_L^inf 1/sinh(theta - theta').
        let d = theta - l;
        for (&(t, w), v) in self.tail.iter().zip(tail_values) {
            acc += w * v * (-2.0 * d.exp()) / (1.0 - (2.0 * (d - t)).exp());
        }
        acc -= fi * (0.5 * (l - theta)).tanh().ln();
        acc
    }
}
