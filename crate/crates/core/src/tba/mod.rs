//! Thermodynamic Bethe ansatz equations on a uniform rapidity grid.
//!
//! Every system here has the shape `eps_a = m_a e^theta - K * f_a(eps)` with
//! `K(theta) = 1/(2 pi cosh theta)`. Solutions are found by damped Picard
//! iteration; convolutions are direct sums in a fixed order, so results do not
//! depend on the number of threads.

mod kernel;
mod median;
mod minimal;
mod regularized;
mod spdp;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use median::{
    delta_limit_pv, lateral_voros_pair, median_resummed_period, pv_sinh_at_node, DeltaLimit,
    MedianCurve, TbaDiscontinuityCheck, EDGE_MARGIN,
};
pub use minimal::solve_tba_minimal;
pub use regularized::{
    fit_closed_form_shift, regularized_median_period, regularized_spectral_zeros,
    solve_tba_regularized, RegularizedSolution, ShiftFit, REGULARIZED_MASS,
};
pub use spdp::{solve_tba_spdp, source_combined, source_product, SpdpParams, LOG_FLOOR};

pub(crate) use kernel::Convolver;

/// Uniform grid `theta_i = -L + i 2L/(N-1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThetaGrid {
    pub half_width: f64,
    pub len: usize,
}

impl ThetaGrid {
    /// `N` must be a power of two, at least 16.
    pub fn new(half_width: f64, len: usize) -> Result<Self> {
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "grid half-width must be positive, got {half_width}"
            )));
        }
        if len < 16 || !len.is_power_of_two() {
            return Err(Error::InvalidInput(format!(
                "grid size must be a power of two >= 16, got {len}"
            )));
        }
        Ok(Self { half_width, len })
    }

    /// `L = 12`, `N = 2^12`.
    pub fn production() -> Self {
        Self {
            half_width: 12.0,
            len: 1 << 12,
        }
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / (self.len - 1) as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        if i == self.len - 1 {
            self.half_width
        } else {
            -self.half_width + i as f64 * self.spacing()
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.len).map(|i| self.node(i)).collect()
    }

    /// Index of the node nearest to `theta`.
    pub fn nearest(&self, theta: f64) -> usize {
        let s = (theta + self.half_width) / self.spacing();
        (s.round().max(0.0) as usize).min(self.len - 1)
    }
}

/// Iteration controls shared by all TBA solvers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TbaOptions {
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default = "default_warmup")]
    pub warmup_iterations: usize,
    #[serde(default = "default_warmup_relaxation")]
    pub warmup_relaxation: f64,
}

fn default_tol() -> f64 {
    1e-10
}
fn default_max_iter() -> usize {
    500
}
fn default_warmup() -> usize {
    5
}
fn default_warmup_relaxation() -> f64 {
    0.5
}

impl Default for TbaOptions {
    fn default() -> Self {
        Self {
            tol: default_tol(),
            max_iter: default_max_iter(),
            warmup_iterations: default_warmup(),
            warmup_relaxation: default_warmup_relaxation(),
        }
    }
}

impl TbaOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }

    fn relaxation(&self, iteration: usize) -> f64 {
        if iteration <= self.warmup_iterations {
            self.warmup_relaxation
        } else {
            1.0
        }
    }
}

/// Sup-norm size of every Picard update.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub iterations: usize,
    pub final_update: f64,
    pub history: Vec<f64>,
}

/// Which equations a [`PseudoEnergy`] solves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TbaSystem {
    Minimal,
    SinglePlusDoublePole { energy: f64, u2: f64, l: f64 },
}

/// Sampled pseudo-energies `eps_a(theta_i)` with their masses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PseudoEnergy {
    pub grid: ThetaGrid,
    pub system: TbaSystem,
    pub labels: Vec<String>,
    pub masses: Vec<f64>,
    pub values: Vec<Vec<f64>>,
    pub report: ConvergenceReport,
}

impl PseudoEnergy {
    pub fn component(&self, label: &str) -> Option<&[f64]> {
        self.labels
            .iter()
            .position(|l| l == label)
            .map(|k| self.values[k].as_slice())
    }

    /// `L_a = log(1 + e^{-eps_a})` at every node.
    pub fn log_terms(&self, a: usize) -> Vec<f64> {
        self.values[a].iter().map(|&e| log1p_exp_neg(e)).collect()
    }

    /// Largest change of any node under one more application of the map.
    pub fn fixed_point_residual(&self) -> Result<f64> {
        match self.system {
            TbaSystem::Minimal => Ok(minimal::minimal_fixed_point_residual(self)),
            TbaSystem::SinglePlusDoublePole { l, .. } => spdp::spdp_fixed_point_residual(self, l),
        }
    }

    /// `eps_a` at `theta`, continued beyond the right edge by its asymptote.
    pub fn value_at(&self, a: usize, theta: f64) -> f64 {
        let grid = &self.grid;
        let mass = self.masses[a];
        if theta >= grid.half_width {
            return continued(mass, grid.half_width, self.values[a][grid.len - 1], theta);
        }
        if theta <= -grid.half_width {
            return self.values[a][0];
        }
        interp_with_asymptote(grid, &self.values[a], mass, theta)
    }
}

/// Eight-point interpolation of `values - mass e^theta`, with the exponential
/// added back exactly.
pub(crate) fn interp_with_asymptote(
    grid: &ThetaGrid,
    values: &[f64],
    mass: f64,
    theta: f64,
) -> f64 {
    const POINTS: usize = 8;
    let h = grid.spacing();
    let s = (theta + grid.half_width) / h;
    let start = (s.floor() as isize - 3).clamp(0, (grid.len - POINTS) as isize) as usize;
    let window: Vec<f64> = (start..start + POINTS)
        .map(|k| values[k] - mass * grid.node(k).exp())
        .collect();
    mass * theta.exp()
        + crate::interp::lagrange_uniform(&window, grid.node(start), h, theta, POINTS)
}

/// `log(1 + e^{-x})` without overflow.
pub fn log1p_exp_neg(x: f64) -> f64 {
    if x >= 0.0 {
        (-x).exp().ln_1p()
    } else {
        -x + x.exp().ln_1p()
    }
}

/// Continuation `m e^theta + (eps(L) - m e^L)` beyond the right edge.
pub(crate) fn continued(mass: f64, edge: f64, edge_value: f64, theta: f64) -> f64 {
    mass * theta.exp() + (edge_value - mass * edge.exp())
}

pub(crate) fn sup_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

pub(crate) fn max_change(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    a.iter()
        .zip(b)
        .fold(0.0f64, |m, (x, y)| m.max(sup_diff(x, y)))
}

/// Damped Picard iteration `x <- x + r (F(x) - x)` until `sup |F(x) - x| <= tol`;
/// the accepted iterate is `F(x)` itself.
pub(crate) fn picard<F>(
    mut state: Vec<Vec<f64>>,
    opts: &TbaOptions,
    map: F,
) -> Result<(Vec<Vec<f64>>, ConvergenceReport)>
where
    F: Fn(&[Vec<f64>]) -> Result<Vec<Vec<f64>>>,
{
    let mut history = Vec::new();
    for iteration in 1..=opts.max_iter {
        let next = map(&state)?;
        let update = max_change(&state, &next);
        if !update.is_finite() {
            return Err(Error::NonConvergence {
                iterations: iteration,
                residual: update,
            });
        }
        history.push(update);
        if update <= opts.tol {
            let report = ConvergenceReport {
                iterations: iteration,
                final_update: update,
                history,
            };
            return Ok((next, report));
        }
        let r = opts.relaxation(iteration);
        for (a, b) in state.iter_mut().zip(&next) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += r * (y - *x);
            }
        }
    }
    Err(Error::NonConvergence {
        iterations: opts.max_iter,
        residual: history.last().copied().unwrap_or(f64::NAN),
    })
}
