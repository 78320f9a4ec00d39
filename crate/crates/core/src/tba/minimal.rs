//! Minimal-chamber system: a chain of cycles, each coupled to its neighbours,
//! `eps_a = m_a e^theta - sum_{b = a +/- 1} K * log(1 + e^{-eps_b})`.

use super::{
    continued, log1p_exp_neg, max_change, picard, Convolver, PseudoEnergy, TbaOptions, TbaSystem,
    ThetaGrid,
};
use crate::error::{Error, Result};

struct Sweep<'a> {
    conv: Convolver,
    grid: ThetaGrid,
    tail_points: Vec<f64>,
    masses: &'a [f64],
    drive: Vec<Vec<f64>>,
}

impl<'a> Sweep<'a> {
    fn new(masses: &'a [f64], grid: ThetaGrid) -> Self {
        let conv = Convolver::new(grid);
        let nodes = grid.nodes();
        let tail_points = conv.tail_points();
        let drive = masses
            .iter()
            .map(|m| nodes.iter().map(|t| m * t.exp()).collect())
            .collect();
        Self {
            conv,
            grid,
            tail_points,
            masses,
            drive,
        }
    }

    fn log_conv(&self, m: f64, e: &[f64]) -> Vec<f64> {
        let f: Vec<f64> = e.iter().map(|&x| log1p_exp_neg(x)).collect();
        let edge = e[self.grid.len - 1];
        let l = self.grid.half_width;
        let tail: Vec<f64> = self
            .tail_points
            .iter()
            .map(|&t| log1p_exp_neg(continued(m, l, edge, t)))
            .collect();
        self.conv.apply(&f, &tail)
    }

    /// Gauss–Seidel sweep along the chain: cycle `a` sees the updated `a - 1`.
    fn apply(&self, eps: &[Vec<f64>]) -> Vec<Vec<f64>> {
        let k = self.masses.len();
        let mut next: Vec<Vec<f64>> = Vec::with_capacity(k);
        let mut from_left: Option<Vec<f64>> = None;
        for a in 0..k {
            let mut out = self.drive[a].clone();
            if let Some(c) = &from_left {
                for (o, v) in out.iter_mut().zip(c) {
                    *o -= v;
                }
            }
            if a + 1 < k {
                for (o, v) in out
                    .iter_mut()
                    .zip(self.log_conv(self.masses[a + 1], &eps[a + 1]))
                {
                    *o -= v;
                }
                from_left = Some(self.log_conv(self.masses[a], &out));
            }
            next.push(out);
        }
        next
    }
}

pub fn solve_tba_minimal(
    masses: &[f64],
    grid: ThetaGrid,
    opts: &TbaOptions,
) -> Result<PseudoEnergy> {
    if masses.is_empty() {
        return Err(Error::InvalidInput("at least one mass is required".into()));
    }
    if let Some(m) = masses.iter().find(|m| !(**m > 0.0 && m.is_finite())) {
        return Err(Error::InvalidInput(format!(
            "masses must be positive, got {m}"
        )));
    }
    let sweep = Sweep::new(masses, grid);
    let (values, report) = picard(sweep.drive.clone(), opts, |s| Ok(sweep.apply(s)))?;
    Ok(PseudoEnergy {
        grid,
        system: TbaSystem::Minimal,
        labels: (1..=masses.len()).map(|k| format!("gamma_{k}")).collect(),
        masses: masses.to_vec(),
        values,
        report,
    })
}

pub(crate) fn minimal_fixed_point_residual(pe: &PseudoEnergy) -> f64 {
    let sweep = Sweep::new(&pe.masses, pe.grid);
    max_change(&pe.values, &sweep.apply(&pe.values))
}
