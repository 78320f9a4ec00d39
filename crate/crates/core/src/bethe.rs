//! Bethe-like root systems for the harmonic oscillator and the hydrogen atom.
//!
//! Writing the pseudo-momentum as its leading term plus simple poles at the
//! nodes of the wavefunction turns the Riccati equation into algebraic
//! conditions on the node positions. Those conditions are solved here by
//! damped Newton iteration.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const RESIDUAL_TOL: f64 = 1e-12;
const MAX_ITER: usize = 200;
const COLLISION: f64 = 1e-12;
const RESTARTS: [f64; 6] = [1.0, 0.9, 1.1, 0.75, 1.3, 0.6];

/// Which root system a solution belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BetheProblem {
    Qho { n: usize },
    Hydrogen { n: usize, l: usize },
}

/// Roots of a Bethe-like system together with the implied energy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BetheSolution {
    pub problem: BetheProblem,
    pub roots: Vec<f64>,
    pub energy: f64,
    /// `hbar/(m omega)` for the oscillator, the Bohr radius for hydrogen.
    pub scale: f64,
    /// Largest residual of the defining equations at the returned roots.
    pub residual: f64,
}

/// `(N + 1/2) hbar omega`.
pub fn qho_energy(n: usize, hbar: f64, omega: f64) -> f64 {
    (n as f64 + 0.5) * hbar * omega
}

/// `-1/(2 n^2)` in atomic units.
pub fn hydrogen_energy(n: usize) -> f64 {
    let n = n as f64;
    -0.5 / (n * n)
}

/// Residuals `z_j - scale * sum_{i != j} 1/(z_j - z_i)`.
pub fn qho_residuals(roots: &[f64], scale: f64) -> Vec<f64> {
    roots
        .iter()
        .enumerate()
        .map(|(j, &zj)| {
            let sum: f64 = roots
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != j)
                .map(|(_, &zi)| 1.0 / (zj - zi))
                .sum();
            zj - scale * sum
        })
        .collect()
}

/// Residuals `(l+1)/r_i + sum_{k != i} 1/(r_i - r_k) - 1/(n a0)`.
pub fn hydrogen_residuals(roots: &[f64], l: usize, a0: f64) -> Vec<f64> {
    let n = roots.len() + l + 1;
    let kappa = 1.0 / (n as f64 * a0);
    roots
        .iter()
        .enumerate()
        .map(|(i, &ri)| {
            let sum: f64 = roots
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != i)
                .map(|(_, &rk)| 1.0 / (ri - rk))
                .sum();
            (l as f64 + 1.0) / ri + sum - kappa
        })
        .collect()
}

fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn min_separation(roots: &[f64]) -> f64 {
    let mut sorted = roots.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::INFINITY, f64::min)
}

fn chebyshev_spread(count: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..count)
        .map(|k| {
            let t = -((2 * k + 1) as f64 * std::f64::consts::PI / (2 * count) as f64).cos();
            0.5 * (lo + hi) + 0.5 * (hi - lo) * t
        })
        .collect()
}

/// Damped Newton on `residual(x) = 0` with Jacobian `jacobian(x)`.
fn newton<R, J, A>(mut x: Vec<f64>, residual: R, jacobian: J, admissible: A) -> Result<Vec<f64>>
where
    R: Fn(&[f64]) -> Vec<f64>,
    J: Fn(&[f64]) -> DMatrix<f64>,
    A: Fn(&[f64]) -> bool,
{
    let mut f = residual(&x);
    let mut norm = sup(&f);
    for _ in 0..MAX_ITER {
        if norm <= RESIDUAL_TOL {
            return Ok(x);
        }
        let jac = jacobian(&x);
        let rhs = DVector::from_vec(f.iter().map(|v| -v).collect());
        let step = jac.lu().solve(&rhs).ok_or(Error::NonConvergence {
            iterations: 0,
            residual: norm,
        })?;
        let mut lambda = 1.0;
        loop {
            let trial: Vec<f64> = x
                .iter()
                .zip(step.iter())
                .map(|(a, d)| a + lambda * d)
                .collect();
            if min_separation(&trial) < COLLISION {
                return Err(Error::DegenerateRoots {
                    separation: min_separation(&trial),
                });
            }
            if admissible(&trial) {
                let ft = residual(&trial);
                let nt = sup(&ft);
                if nt < norm || lambda < 1e-4 {
                    x = trial;
                    f = ft;
                    norm = nt;
                    break;
                }
            }
            lambda *= 0.5;
            if lambda < 1e-10 {
                return Err(Error::NonConvergence {
                    iterations: 0,
                    residual: norm,
                });
            }
        }
    }
    if norm <= RESIDUAL_TOL {
        Ok(x)
    } else {
        Err(Error::NonConvergence {
            iterations: MAX_ITER,
            residual: norm,
        })
    }
}

fn with_restarts<F>(mut attempt: F) -> Result<Vec<f64>>
where
    F: FnMut(f64) -> Result<Vec<f64>>,
{
    let mut last = Error::NonConvergence {
        iterations: 0,
        residual: f64::INFINITY,
    };
    for &factor in RESTARTS.iter() {
        match attempt(factor) {
            Ok(roots) => return Ok(roots),
            Err(e) => last = e,
        }
    }
    Err(last)
}

/// Roots of `z_j = scale * sum_{i != j} 1/(z_j - z_i)`: the zeros of the
/// Hermite polynomial `H_N(z/sqrt(scale))` scaled back.
pub fn solve_qho_bethe(n: usize, scale: f64) -> Result<BetheSolution> {
    if !(scale > 0.0) {
        return Err(Error::InvalidInput(format!(
            "scale must be positive, got {scale}"
        )));
    }
    let residual = |x: &[f64]| qho_residuals(x, scale);
    let jacobian = |x: &[f64]| {
        let k = x.len();
        let mut j = DMatrix::<f64>::zeros(k, k);
        for a in 0..k {
            let mut diag = 1.0;
            for b in 0..k {
                if a != b {
                    let d = x[a] - x[b];
                    let t = scale / (d * d);
                    diag += t;
                    j[(a, b)] = -t;
                }
            }
            j[(a, a)] = diag;
        }
        j
    };
    let roots = if n == 0 {
        Vec::new()
    } else {
        let bound = (scale * (2.0 * n as f64 + 1.0)).sqrt();
        with_restarts(|factor| {
            let init = chebyshev_spread(n, -0.8 * factor * bound, 0.8 * factor * bound);
            newton(init, residual, jacobian, |_| true)
        })?
    };
    let mut roots = roots;
    roots.sort_by(f64::total_cmp);
    let res = sup(&qho_residuals(&roots, scale));
    Ok(BetheSolution {
        problem: BetheProblem::Qho { n },
        roots,
        energy: qho_energy(n, 1.0, 1.0),
        scale,
        residual: res,
    })
}

/// Nodes of the radial hydrogen function with `N` nodes and angular momentum
/// `l`, i.e. the zeros of `L_N^{2l+1}(2r/(n a0))` with `n = N + l + 1`.
pub fn solve_hydrogen_bethe(n_nodes: usize, l: usize, a0: f64) -> Result<BetheSolution> {
    if !(a0 > 0.0) {
        return Err(Error::InvalidInput(format!(
            "a0 must be positive, got {a0}"
        )));
    }
    let n = n_nodes + l + 1;
    let residual = |x: &[f64]| hydrogen_residuals(x, l, a0);
    let jacobian = |x: &[f64]| {
        let k = x.len();
        let mut j = DMatrix::<f64>::zeros(k, k);
        for a in 0..k {
            let mut diag = -(l as f64 + 1.0) / (x[a] * x[a]);
            for b in 0..k {
                if a != b {
                    let d = x[a] - x[b];
                    let t = 1.0 / (d * d);
                    diag -= t;
                    j[(a, b)] = t;
                }
            }
            j[(a, a)] = diag;
        }
        j
    };
    let roots = if n_nodes == 0 {
        Vec::new()
    } else {
        let to_r = 0.5 * n as f64 * a0;
        let upper = 4.0 * n_nodes as f64 + 2.0 * l as f64 + 2.0;
        with_restarts(|factor| {
            let init: Vec<f64> = chebyshev_spread(n_nodes, 0.0, 0.8 * factor * upper)
                .into_iter()
                .map(|x| x * to_r)
                .collect();
            newton(init, residual, jacobian, |x| x.iter().all(|&r| r > 0.0))
        })?
    };
    let mut roots = roots;
    roots.sort_by(f64::total_cmp);
    let res = sup(&hydrogen_residuals(&roots, l, a0));
    Ok(BetheSolution {
        problem: BetheProblem::Hydrogen { n: n_nodes, l },
        roots,
        energy: hydrogen_energy(n) / a0,
        scale: a0,
        residual: res,
    })
}

/// `sum_j 1/r_j`, which the hydrogen system fixes to `(1/a0)(1/(l+1) - 1/n)`.
pub fn hydrogen_sum_rule(solution: &BetheSolution) -> Option<(f64, f64)> {
    match solution.problem {
        BetheProblem::Hydrogen { n, l } => {
            let principal = (n + l + 1) as f64;
            let lhs: f64 = solution.roots.iter().map(|r| 1.0 / r).sum();
            let rhs = (1.0 / ((l + 1) as f64) - 1.0 / principal) / solution.scale;
            Some((lhs, rhs))
        }
        BetheProblem::Qho { .. } => None,
    }
}

/// Unnormalised wavefunction built from the roots.
pub fn wavefunction_eval(solution: &BetheSolution, x: f64) -> f64 {
    let product: f64 = solution.roots.iter().map(|r| x - r).product();
    match solution.problem {
        BetheProblem::Qho { .. } => (-0.5 * x * x / solution.scale).exp() * product,
        BetheProblem::Hydrogen { n, l } => {
            let kappa = 1.0 / ((n + l + 1) as f64 * solution.scale);
            (-kappa * x).exp() * x.powi(l as i32) * product
        }
    }
}

/// Physicists' Hermite polynomial by three-term recurrence.
pub fn hermite(n: usize, x: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, 2.0 * x);
    if n == 0 {
        return prev;
    }
    for k in 1..n {
        let next = 2.0 * x * cur - 2.0 * k as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Associated Laguerre polynomial `L_n^alpha(x)` by recurrence.
pub fn laguerre(n: usize, alpha: f64, x: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, 1.0 + alpha - x);
    if n == 0 {
        return prev;
    }
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + alpha - x) * cur - (kf + alpha) * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}
