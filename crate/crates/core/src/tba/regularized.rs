//! The regularized system obtained after removing the `log(2 pi l)` divergence,
//!
//! ```text
//! A = (4/3) e^theta - K * log(1 + B^2)
//! B = K * e^{-A}
//! ```
//!
//! whose solution is known in closed form through Airy functions.

use serde::{Deserialize, Serialize};

use super::median::pv_correction_block;
use super::{continued, max_change, picard, ConvergenceReport, Convolver, TbaOptions, ThetaGrid};
use crate::airy::airy_closed_form_ab;
use crate::error::{Error, Result};

pub const REGULARIZED_MASS: f64 = 4.0 / 3.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularizedSolution {
    pub grid: ThetaGrid,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub report: ConvergenceReport,
}

impl RegularizedSolution {
    pub fn exp_minus_a(&self) -> Vec<f64> {
        self.a.iter().map(|a| (-a).exp()).collect()
    }

    /// Largest change of any node under one more application of the map.
    pub fn fixed_point_residual(&self) -> f64 {
        let state = vec![self.a.clone(), self.b.clone()];
        max_change(&state, &Sweep::new(self.grid).apply(&state))
    }

    /// `log(1 + B^2)` on the grid and at `L + t`, using `B(L + t) ~ B(L) e^{-t}`.
    fn log_source(&self, tail_points: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let l = self.grid.half_width;
        let edge = self.b[self.grid.len - 1];
        let on_grid = self.b.iter().map(|b| (b * b).ln_1p()).collect();
        let tail = tail_points
            .iter()
            .map(|&t| {
                let b = edge * (l - t).exp();
                (b * b).ln_1p()
            })
            .collect();
        (on_grid, tail)
    }
}

struct Sweep {
    conv: Convolver,
    tail_points: Vec<f64>,
    drive: Vec<f64>,
    half_width: f64,
}

impl Sweep {
    fn new(grid: ThetaGrid) -> Self {
        let conv = Convolver::new(grid);
        let tail_points = conv.tail_points();
        let drive = grid
            .nodes()
            .iter()
            .map(|t| REGULARIZED_MASS * t.exp())
            .collect();
        Self {
            conv,
            tail_points,
            drive,
            half_width: grid.half_width,
        }
    }

    /// One Gauss–Seidel sweep: `B` sees the freshly updated `A`.
    fn apply(&self, state: &[Vec<f64>]) -> Vec<Vec<f64>> {
        let l = self.half_width;
        let b = &state[1];
        let n = b.len();
        let lb: Vec<f64> = b.iter().map(|x| (x * x).ln_1p()).collect();
        let lb_tail: Vec<f64> = self
            .tail_points
            .iter()
            .map(|&t| {
                let v = b[n - 1] * (l - t).exp();
                (v * v).ln_1p()
            })
            .collect();
        let ca = self.conv.apply(&lb, &lb_tail);
        let a: Vec<f64> = self.drive.iter().zip(&ca).map(|(d, c)| d - c).collect();
        let ea: Vec<f64> = a.iter().map(|x| (-x).exp()).collect();
        let ea_tail: Vec<f64> = self
            .tail_points
            .iter()
            .map(|&t| (-continued(REGULARIZED_MASS, l, a[n - 1], t)).exp())
            .collect();
        let cb = self.conv.apply(&ea, &ea_tail);
        vec![a, cb]
    }
}

pub fn solve_tba_regularized(grid: ThetaGrid, opts: &TbaOptions) -> Result<RegularizedSolution> {
    let sweep = Sweep::new(grid);
    let start = vec![sweep.drive.clone(), vec![0.0; grid.len]];
    let (mut values, report) = picard(start, opts, |s| Ok(sweep.apply(s)))?;
    let b = values.pop().unwrap_or_default();
    let a = values.pop().unwrap_or_default();
    Ok(RegularizedSolution { grid, a, b, report })
}

/// `A_med(theta_i) = (4/3) e^theta + (1/2 pi) PV int log(1 + B^2) / sinh` at the
/// nodes inside `[-L + 2, L - 2]`, as `(theta_i, A_med)` pairs.
pub fn regularized_median_period(sol: &RegularizedSolution) -> Vec<(f64, f64)> {
    let grid = sol.grid;
    let conv_tail = Convolver::new(grid).tail_points();
    let (src, tail) = sol.log_source(&conv_tail);
    let lim = grid.half_width - super::median::EDGE_MARGIN;
    let first = grid.nearest(-lim);
    let last = grid.nearest(lim);
    let corrections = pv_correction_block(&grid, &src, &tail, first, last);
    (first..=last)
        .zip(corrections)
        .map(|(i, c)| {
            let t = grid.node(i);
            (t, REGULARIZED_MASS * t.exp() + c)
        })
        .collect()
}

/// Sign changes of `cos(A_med) - B / sqrt(1 + B^2)` at the nodes inside
/// `[theta_min, L - 2]`, located by linear interpolation between nodes.
pub fn regularized_spectral_zeros(sol: &RegularizedSolution, theta_min: f64) -> Vec<f64> {
    let median = regularized_median_period(sol);
    let Some(&(t0, _)) = median.first() else {
        return Vec::new();
    };
    let first = sol.grid.nearest(t0);
    let residual: Vec<(f64, f64)> = median
        .iter()
        .enumerate()
        .map(|(k, &(t, a))| {
            let b = sol.b[first + k];
            (t, a.cos() - b / (1.0 + b * b).sqrt())
        })
        .collect();
    residual
        .windows(2)
        .filter(|w| w[0].0 >= theta_min && w[0].1 * w[1].1 < 0.0)
        .map(|w| w[0].0 - w[0].1 * (w[1].0 - w[0].0) / (w[1].1 - w[0].1))
        .collect()
}

/// Best single `theta` shift aligning `e^{-A}` with the Airy closed form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShiftFit {
    /// `e^{-A(theta)}` is compared with the closed form at `theta + shift`.
    pub shift: f64,
    /// Sup-norm mismatch over the central half of the grid.
    pub sup_error: f64,
}

/// Golden-section search for the shift in `[-1/2, 1/2]`.
pub fn fit_closed_form_shift(sol: &RegularizedSolution) -> Result<ShiftFit> {
    let grid = sol.grid;
    let half = 0.5 * grid.half_width;
    let samples: Vec<(f64, f64)> = grid
        .nodes()
        .into_iter()
        .zip(sol.exp_minus_a())
        .filter(|(t, _)| t.abs() <= half)
        .collect();
    if samples.is_empty() {
        return Err(Error::InvalidInput("grid too coarse for the fit".into()));
    }
    let mismatch = |s: f64| -> Result<f64> {
        let mut worst = 0.0f64;
        for &(t, v) in &samples {
            let (exact, _) = airy_closed_form_ab(t + s)?;
            worst = worst.max((v - exact).abs());
        }
        Ok(worst)
    };
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut lo, mut hi) = (-0.5, 0.5);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let mut f1 = mismatch(x1)?;
    let mut f2 = mismatch(x2)?;
    while hi - lo > 1e-9 {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = mismatch(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = mismatch(x2)?;
        }
    }
    let shift = 0.5 * (lo + hi);
    Ok(ShiftFit {
        shift,
        sup_error: mismatch(shift)?,
    })
}
