//! The single-plus-double-pole system (`s = 0`):
//!
//! ```text
//! eps_1   = m_1 e^theta - K * log[(1 - e^{2 pi i l} e^{-eps_hat})(1 - e^{-2 pi i l} e^{-eps_hat})]
//! eps_hat = m_hat e^theta - K * log(1 + e^{-eps_1})
//! ```

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::{
    continued, log1p_exp_neg, max_change, picard, Convolver, PseudoEnergy, TbaOptions, TbaSystem,
    ThetaGrid,
};
use crate::error::{Error, Result};
use crate::potentials::{classical_mass, minimal_chamber_cycles, PotentialSpec};

/// Arguments of the source logarithm below this are reported as singular.
pub const LOG_FLOOR: f64 = 1e-250;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpdpParams {
    #[serde(rename = "E")]
    pub energy: f64,
    pub u2: f64,
    pub l: f64,
}

impl Default for SpdpParams {
    /// `E = 1`, `u2 = 1e-8`, `l = 1e-5`.
    fn default() -> Self {
        Self {
            energy: 1.0,
            u2: 1e-8,
            l: 1e-5,
        }
    }
}

impl SpdpParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.u2 > 0.0 && self.u2.is_finite()) {
            return Err(Error::Domain(format!(
                "u2 must be positive, got {}",
                self.u2
            )));
        }
        if !(self.l.abs() < 0.5) {
            return Err(Error::Domain(format!(
                "|l| must be below 1/2, got {}",
                self.l
            )));
        }
        if !(self.energy > 0.0 && self.energy * self.energy > 4.0 * self.u2) {
            return Err(Error::NoRealTurningPoints(format!(
                "E = {} needs E^2 > 4 u2 = {}",
                self.energy,
                4.0 * self.u2
            )));
        }
        Ok(())
    }

    /// `(m_1, m_hat)`: classical periods of the allowed and forbidden cycles.
    pub fn masses(&self) -> Result<(f64, f64)> {
        self.validate()?;
        let spec = PotentialSpec::single_plus_double_pole(self.energy, self.u2, self.l)?;
        let cycles = minimal_chamber_cycles(&spec, self.energy)?;
        let hat = classical_mass(&spec, &cycles[0], self.energy)?;
        let one = classical_mass(&spec, &cycles[1], self.energy)?;
        Ok((one, hat))
    }
}

/// `log(1 + e^{-2x} - 2 cos(2 pi l) e^{-x})`, written as
/// `log((e^{-x} - 1)^2 + 4 sin^2(pi l) e^{-x})` to keep precision near `x = 0`.
pub fn source_combined(eps_hat: f64, l: f64, theta: f64) -> Result<f64> {
    let y = (-eps_hat).exp();
    let a = (-eps_hat).exp_m1();
    let s = (PI * l).sin();
    checked_log(a * a + 4.0 * s * s * y, theta)
}

/// The same source as the sum of the two complex logarithms
/// `log(1 - e^{+2 pi i l} y) + log(1 - e^{-2 pi i l} y)`.
pub fn source_product(eps_hat: f64, l: f64, theta: f64) -> Result<f64> {
    let y = (-eps_hat).exp();
    let a = (-eps_hat).exp_m1();
    let s = (PI * l).sin();
    let re = -a + 2.0 * s * s * y;
    let im = (2.0 * PI * l).sin() * y;
    checked_log(re * re + im * im, theta)
}

fn checked_log(value: f64, theta: f64) -> Result<f64> {
    if !(value >= LOG_FLOOR) {
        return Err(Error::SingularLog { value, theta });
    }
    Ok(value.ln())
}

/// Source of the `eps_1` equation on the grid and at the right-tail abscissae.
pub(crate) fn source_samples(
    pe: &PseudoEnergy,
    tail_points: &[f64],
) -> Result<(Vec<f64>, Vec<f64>)> {
    let l = match pe.system {
        TbaSystem::SinglePlusDoublePole { l, .. } => l,
        TbaSystem::Minimal => {
            return Err(Error::InvalidInput(
                "the median period needs a single-plus-double-pole solution".into(),
            ))
        }
    };
    let grid = &pe.grid;
    let hat = &pe.values[1];
    let nodes = grid.nodes();
    let on_grid = hat
        .iter()
        .zip(&nodes)
        .map(|(&e, &t)| source_combined(e, l, t))
        .collect::<Result<Vec<_>>>()?;
    let edge = hat[grid.len - 1];
    let tail = tail_points
        .iter()
        .map(|&t| source_combined(continued(pe.masses[1], grid.half_width, edge, t), l, t))
        .collect::<Result<Vec<_>>>()?;
    Ok((on_grid, tail))
}

struct Sweep {
    conv: Convolver,
    nodes: Vec<f64>,
    tail_points: Vec<f64>,
    masses: (f64, f64),
    drive: (Vec<f64>, Vec<f64>),
    l: f64,
}

impl Sweep {
    fn new(masses: (f64, f64), l: f64, grid: ThetaGrid) -> Self {
        let conv = Convolver::new(grid);
        let nodes = grid.nodes();
        let tail_points = conv.tail_points();
        let drive = |m: f64| -> Vec<f64> { nodes.iter().map(|t| m * t.exp()).collect() };
        let drive = (drive(masses.0), drive(masses.1));
        Self {
            conv,
            nodes,
            tail_points,
            masses,
            drive,
            l,
        }
    }

    /// One Gauss–Seidel sweep: `eps_hat` sees the freshly updated `eps_1`.
    fn apply(&self, eps: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        let (m1, mhat) = self.masses;
        let n = self.nodes.len();
        let edge = self.nodes[n - 1];
        let ehat = &eps[1];
        let src = ehat
            .iter()
            .zip(&self.nodes)
            .map(|(&e, &t)| source_combined(e, self.l, t))
            .collect::<Result<Vec<_>>>()?;
        let src_tail = self
            .tail_points
            .iter()
            .map(|&t| source_combined(continued(mhat, edge, ehat[n - 1], t), self.l, t))
            .collect::<Result<Vec<_>>>()?;
        let c1 = self.conv.apply(&src, &src_tail);
        let e1: Vec<f64> = self.drive.0.iter().zip(&c1).map(|(d, c)| d - c).collect();
        let log1: Vec<f64> = e1.iter().map(|&x| log1p_exp_neg(x)).collect();
        let log1_tail: Vec<f64> = self
            .tail_points
            .iter()
            .map(|&t| log1p_exp_neg(continued(m1, edge, e1[n - 1], t)))
            .collect();
        let chat = self.conv.apply(&log1, &log1_tail);
        let ehat = self.drive.1.iter().zip(&chat).map(|(d, c)| d - c).collect();
        Ok(vec![e1, ehat])
    }
}

/// Solves for `(eps_1, eps_hat)`, labelled `gamma_1` and `gamma_hat`.
pub fn solve_tba_spdp(
    params: SpdpParams,
    grid: ThetaGrid,
    opts: &TbaOptions,
) -> Result<PseudoEnergy> {
    let masses = params.masses()?;
    let sweep = Sweep::new(masses, params.l, grid);
    let start = vec![sweep.drive.0.clone(), sweep.drive.1.clone()];
    let (values, report) = picard(start, opts, |s| sweep.apply(s))?;
    Ok(PseudoEnergy {
        grid,
        system: TbaSystem::SinglePlusDoublePole {
            energy: params.energy,
            u2: params.u2,
            l: params.l,
        },
        labels: vec!["gamma_1".into(), "gamma_hat".into()],
        masses: vec![masses.0, masses.1],
        values,
        report,
    })
}

/// Largest change of any node under one more sweep of the map.
pub(crate) fn spdp_fixed_point_residual(pe: &PseudoEnergy, l: f64) -> Result<f64> {
    let sweep = Sweep::new((pe.masses[0], pe.masses[1]), l, pe.grid);
    let next = sweep.apply(&pe.values)?;
    Ok(max_change(&pe.values, &next))
}
