//! Median resummation of the allowed-cycle period,
//! `B_med(theta) = m_1 e^theta + (1/2 pi) PV int S(theta') / sinh(theta - theta') dtheta'`,
//! where `S` is the source of the `eps_1` equation.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::kernel::{gregory_weights, SinhPv, TAIL_ORDER};
use super::spdp::source_samples;
use super::{PseudoEnergy, TbaSystem, ThetaGrid};
use crate::error::{Error, Result};
use crate::interp::lagrange_uniform;
use crate::quadrature;
use crate::wkb::delabaere_pham_disc_check;

/// Distance from either grid edge inside which principal values are refused.
pub const EDGE_MARGIN: f64 = 2.0;

const INTERP_POINTS: usize = 8;

fn check_edge(grid: &ThetaGrid, theta: f64) -> Result<()> {
    if !(theta.abs() <= grid.half_width - EDGE_MARGIN) {
        return Err(Error::EdgeProximity {
            theta,
            margin: EDGE_MARGIN,
            half_width: grid.half_width,
        });
    }
    Ok(())
}

fn tail_points(grid: &ThetaGrid) -> Vec<f64> {
    quadrature::laguerre(TAIL_ORDER)
        .into_iter()
        .map(|(t, _)| grid.half_width + t)
        .collect()
}

/// Node indices whose interpolation stencils cover `[lo, hi]`.
fn stencil_span(grid: &ThetaGrid, lo: f64, hi: f64) -> (usize, usize) {
    let first = grid.nearest(lo).saturating_sub(INTERP_POINTS);
    let last = (grid.nearest(hi) + INTERP_POINTS).min(grid.len - 1);
    (first, last)
}

/// `B_med - m e^theta` on a contiguous block of nodes, interpolated between them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MedianCurve {
    pub grid: ThetaGrid,
    pub mass: f64,
    pub first: usize,
    pub corrections: Vec<f64>,
}

impl MedianCurve {
    /// Evaluates the principal value at every node needed for `[-L + 2, L - 2]`.
    pub fn new(pe: &PseudoEnergy) -> Result<Self> {
        let grid = pe.grid;
        let lim = grid.half_width - EDGE_MARGIN;
        let (first, last) = stencil_span(&grid, -lim, lim);
        Self::over_nodes(pe, first, last)
    }

    fn over_nodes(pe: &PseudoEnergy, first: usize, last: usize) -> Result<Self> {
        let grid = pe.grid;
        let (src, tail) = source_samples(pe, &tail_points(&grid))?;
        Ok(Self {
            grid,
            mass: pe.masses[0],
            first,
            corrections: pv_correction_block(&grid, &src, &tail, first, last),
        })
    }

    pub fn value_at(&self, theta: f64) -> Result<f64> {
        check_edge(&self.grid, theta)?;
        let x0 = self.grid.node(self.first);
        let h = self.grid.spacing();
        let span = h * (self.corrections.len() - 1) as f64;
        if theta < x0 || theta > x0 + span {
            return Err(Error::InvalidInput(format!(
                "theta = {theta} lies outside the tabulated block"
            )));
        }
        let c = lagrange_uniform(&self.corrections, x0, h, theta, INTERP_POINTS);
        Ok(self.mass * theta.exp() + c)
    }

    /// `(theta_i, B_med(theta_i))` for the nodes inside `[-L + 2, L - 2]`.
    pub fn samples(&self) -> Vec<(f64, f64)> {
        let lim = self.grid.half_width - EDGE_MARGIN;
        self.corrections
            .iter()
            .enumerate()
            .map(|(k, c)| {
                let t = self.grid.node(self.first + k);
                (t, self.mass * t.exp() + c)
            })
            .filter(|(t, _)| t.abs() <= lim)
            .collect()
    }
}

/// `(1/2 pi) PV int f / sinh` at nodes `first..=last`.
pub(crate) fn pv_correction_block(
    grid: &ThetaGrid,
    values: &[f64],
    tail: &[f64],
    first: usize,
    last: usize,
) -> Vec<f64> {
    let pv = SinhPv::new(*grid);
    (first..=last)
        .into_par_iter()
        .map(|i| pv.at_node(values, tail, i) / (2.0 * PI))
        .collect()
}

/// `B_med(theta)` (the median-resummed allowed period divided by `hbar`).
pub fn median_resummed_period(pe: &PseudoEnergy, theta: f64) -> Result<f64> {
    check_edge(&pe.grid, theta)?;
    let (first, last) = stencil_span(&pe.grid, theta, theta);
    MedianCurve::over_nodes(pe, first, last)?.value_at(theta)
}

/// `PV int S(theta') / sinh(theta_i - theta') dtheta'` at node `i` by subtraction.
pub fn pv_sinh_at_node(pe: &PseudoEnergy, i: usize) -> Result<f64> {
    let grid = pe.grid;
    check_edge(&grid, grid.node(i))?;
    let (src, tail) = source_samples(pe, &tail_points(&grid))?;
    Ok(SinhPv::new(grid).at_node(&src, &tail, i))
}

/// The principal value as the `delta -> 0` limit of `int S / sinh(theta - theta' + i delta)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeltaLimit {
    /// Limit of the real part: the principal value.
    pub principal_value: f64,
    /// Limit of the imaginary part, `-pi S(theta)`.
    pub imaginary: f64,
    pub source: f64,
}

/// Independent route to [`pv_sinh_at_node`]: the integral with the pole
/// displaced by `delta`, for several `delta`, extrapolated to zero.
///
/// Within a window around `theta_i` the source is interpolated onto a grid
/// 16 times finer; elsewhere the coarse nodes are used.
pub fn delta_limit_pv(pe: &PseudoEnergy, i: usize) -> Result<DeltaLimit> {
    const REFINE: usize = 16;
    const WINDOW: f64 = 1.0;
    const LEVELS: usize = 6;
    let grid = pe.grid;
    let theta = grid.node(i);
    check_edge(&grid, theta)?;
    let (src, tail) = source_samples(pe, &tail_points(&grid))?;
    let n = grid.len;
    let h = grid.spacing();
    let window_nodes = (WINDOW / h).ceil() as usize;
    let mut lo = i.saturating_sub(window_nodes);
    let mut hi = (i + window_nodes).min(n - 1);
    if lo < 6 {
        lo = 0;
    }
    if hi + 6 > n - 1 {
        hi = n - 1;
    }
    let hf = h / REFINE as f64;
    let fine_len = (hi - lo) * REFINE + 1;
    let fine: Vec<(f64, f64)> = gregory_weights(fine_len, hf)
        .into_iter()
        .enumerate()
        .map(|(k, w)| {
            let t = grid.node(lo) + k as f64 * hf;
            (
                t,
                w * lagrange_uniform(&src, -grid.half_width, h, t, INTERP_POINTS),
            )
        })
        .collect();
    let mut outside: Vec<(f64, f64)> = Vec::new();
    let mut segment = |a: usize, b: usize| {
        for (j, w) in (a..=b).zip(gregory_weights(b - a + 1, h)) {
            outside.push((grid.node(j), w * src[j]));
        }
    };
    // Stray segments shorter than the end stencil are absorbed into the window.
    if lo >= 6 {
        segment(0, lo);
    }
    if hi + 6 < n {
        segment(hi, n - 1);
    }
    let integral = |delta: f64| -> Complex64 {
        let kernel = |u: f64| Complex64::new(u, delta).sinh().inv();
        let mut acc = Complex64::new(0.0, 0.0);
        for &(t, ws) in &fine {
            acc += ws * kernel(theta - t);
        }
        for &(t, ws) in &outside {
            acc += ws * kernel(theta - t);
        }
        acc
    };
    // Beyond both edges the pole is far away and the undisplaced kernel is used.
    let l = grid.half_width;
    let mut edges = src[0] * -((0.5 * (theta + l)).tanh().ln());
    let d = theta - l;
    for ((t, w), v) in quadrature::laguerre(TAIL_ORDER).into_iter().zip(&tail) {
        edges += w * v * (-2.0 * d.exp()) / (1.0 - (2.0 * (d - t)).exp());
    }
    let deltas: Vec<f64> = (0..LEVELS)
        .map(|k| 8.0 * hf * (1u64 << (LEVELS - 1 - k)) as f64)
        .collect();
    let samples: Vec<Complex64> = deltas.iter().map(|&dl| integral(dl)).collect();
    let limit = neville_at_zero(&deltas, &samples);
    Ok(DeltaLimit {
        principal_value: limit.re + edges,
        imaginary: limit.im,
        source: src[i],
    })
}

/// Value at zero of the interpolating polynomial through `(x_k, y_k)`.
fn neville_at_zero(x: &[f64], y: &[Complex64]) -> Complex64 {
    let mut p = y.to_vec();
    let n = x.len();
    for m in 1..n {
        for k in 0..n - m {
            p[k] = (x[k + m] * p[k] - x[k] * p[k + 1]) / (x[k + m] - x[k]);
        }
    }
    p[0]
}

/// Lateral Voros symbols `exp(i B_med +/- S/2)` at `theta`: the two lateral
/// resummations of `eps_1` on the Stokes ray, whose ratio is `e^{-S}`.
pub fn lateral_voros_pair(pe: &PseudoEnergy, theta: f64) -> Result<(Complex64, Complex64)> {
    let b = median_resummed_period(pe, theta)?;
    let s = source_at(pe, theta)?;
    let phase = Complex64::from_polar(1.0, b);
    Ok((phase * (0.5 * s).exp(), phase * (-0.5 * s).exp()))
}

fn source_at(pe: &PseudoEnergy, theta: f64) -> Result<f64> {
    let l = match pe.system {
        TbaSystem::SinglePlusDoublePole { l, .. } => l,
        TbaSystem::Minimal => {
            return Err(Error::InvalidInput(
                "lateral symbols need a single-plus-double-pole solution".into(),
            ))
        }
    };
    super::spdp::source_combined(pe.value_at(1, theta), l, theta)
}

/// Both sides of the Delabaere–Pham jump of `V_{gamma_1}` across the Stokes
/// ray, with the forbidden cycle entering twice (`e^{+2 pi i l}` and
/// `e^{-2 pi i l}` sheets), each with intersection number one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TbaDiscontinuityCheck {
    pub theta: f64,
    pub voros_plus: Complex64,
    pub voros_minus: Complex64,
    pub neighbours: Vec<(Complex64, i32)>,
    pub residual: f64,
}

impl TbaDiscontinuityCheck {
    pub fn at(pe: &PseudoEnergy, theta: f64) -> Result<Self> {
        let l = match pe.system {
            TbaSystem::SinglePlusDoublePole { l, .. } => l,
            TbaSystem::Minimal => {
                return Err(Error::InvalidInput(
                    "the check needs a single-plus-double-pole solution".into(),
                ))
            }
        };
        let (voros_plus, voros_minus) = lateral_voros_pair(pe, theta)?;
        let y = (-pe.value_at(1, theta)).exp();
        let neighbours: Vec<(Complex64, i32)> = [1.0, -1.0]
            .iter()
            .map(|sign| (-Complex64::from_polar(y, sign * 2.0 * PI * l), 1))
            .collect();
        let residual = delabaere_pham_disc_check(voros_minus, voros_plus, &neighbours);
        Ok(Self {
            theta,
            voros_plus,
            voros_minus,
            neighbours,
            residual,
        })
    }
}
