//! Independent eigenvalues of `psi'' = [2m(V - E)/hbar^2 + lambda/x^2] psi` by
//! shooting: an adaptive Dormand–Prince 5(4) integrator, Sturm node counting
//! and bisection on `E`.
//!
//! The solution started at the inner boundary has exactly as many zeros
//! inside the domain as there are eigenvalues below `E`, so the `n`-th level
//! is where the count jumps from `n` to `n + 1`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potentials::{Potential, PotentialSpec};
use crate::spectrum::{Estimator, SpectrumRow, SpectrumTable, Units};

/// Local error tolerance of the integrator.
pub const LOCAL_TOL: f64 = 1e-10;

/// Default bisection width on `E`.
pub const BRACKET_TOL: f64 = 1e-10;

/// `int kappa dx` beyond the outer turning point used to place `R`.
pub const DECAY_ACTION: f64 = 30.0;

/// Radial problems start at this radius with the regular series.
pub const RADIAL_START: f64 = 1e-6;

/// A user-supplied `R` must satisfy `2m(V(R) - E)/hbar^2 >= MARGIN`.
pub const MARGIN: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Origin {
    /// `psi(0) = 0` (for radial problems: the regular solution at `r = 0`).
    Dirichlet,
    /// `psi'(0) = 0`.
    Neumann,
    /// The whole real line.
    FullLine,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundaryCondition {
    pub origin: Origin,
    /// Outer radius; chosen from the decay action when absent.
    #[serde(default)]
    pub outer_radius: Option<f64>,
}

impl BoundaryCondition {
    pub fn new(origin: Origin) -> Self {
        Self {
            origin,
            outer_radius: None,
        }
    }

    pub fn with_radius(origin: Origin, radius: f64) -> Self {
        Self {
            origin,
            outer_radius: Some(radius),
        }
    }
}

/// A converged level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Eigenvalue {
    pub energy: f64,
    pub bracket_width: f64,
    pub nodes: usize,
    /// Integration interval.
    pub domain: (f64, f64),
}

struct Problem<'a> {
    spec: &'a PotentialSpec,
    scale: f64,
    lambda: f64,
}

impl Problem<'_> {
    fn q(&self, x: f64, energy: f64) -> f64 {
        let mut q = self.scale * (self.spec.value(x) - energy);
        if self.lambda != 0.0 {
            q += self.lambda / (x * x);
        }
        q
    }
}

// Dormand–Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Integrates `(psi, psi')` from `a` to `b`, counting sign changes of `psi`.
fn integrate_segment(
    problem: &Problem,
    energy: f64,
    a: f64,
    b: f64,
    mut y: [f64; 2],
    zeros: &mut usize,
) -> Result<[f64; 2]> {
    let rhs = |x: f64, y: [f64; 2]| -> [f64; 2] { [y[1], problem.q(x, energy) * y[0]] };
    let mut x = a;
    let mut h = ((b - a) * 1e-3).min(1e-3 * (1.0 + a.abs()));
    while x < b {
        let local = problem.q(x, energy).abs();
        let h_cap = 0.5 / (local + 1.0).sqrt();
        h = h.min(h_cap).min(b - x);
        if h <= 1e-14 * (1.0 + x.abs()) {
            return Err(Error::Stiffness { step: h, x });
        }
        let mut k = [[0.0f64; 2]; 7];
        k[0] = rhs(x, y);
        for s in 1..7 {
            let mut ys = y;
            for (j, kj) in k.iter().enumerate().take(s) {
                ys[0] += h * A[s][j] * kj[0];
                ys[1] += h * A[s][j] * kj[1];
            }
            k[s] = rhs(x + C[s] * h, ys);
        }
        let mut y5 = y;
        let mut err = 0.0f64;
        for c in 0..2 {
            let mut d5 = 0.0;
            let mut d4 = 0.0;
            for s in 0..7 {
                d5 += B5[s] * k[s][c];
                d4 += B4[s] * k[s][c];
            }
            y5[c] += h * d5;
            let sc = LOCAL_TOL * (1.0 + y[c].abs().max(y5[c].abs()));
            err = err.max((h * (d5 - d4)).abs() / sc);
        }
        if err <= 1.0 {
            if (y[0] > 0.0 && y5[0] <= 0.0) || (y[0] < 0.0 && y5[0] >= 0.0) {
                *zeros += 1;
            }
            x = if b - x <= h { b } else { x + h };
            y = y5;
            let size = y[0].abs() + y[1].abs();
            if size > 1e100 {
                y[0] /= size;
                y[1] /= size;
            }
            let grow = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            h *= grow;
        } else {
            h *= (0.9 * err.powf(-0.25)).clamp(0.1, 0.9);
        }
    }
    Ok(y)
}

fn validate(spec: &PotentialSpec, origin: Origin) -> Result<()> {
    match (&spec.potential, origin) {
        (Potential::SinglePlusDoublePole { .. } | Potential::Coulomb { .. }, Origin::Dirichlet) => {
            Ok(())
        }
        (Potential::SinglePlusDoublePole { .. } | Potential::Coulomb { .. }, _) => Err(
            Error::InvalidInput("radial problems take the regular (Dirichlet) origin".into()),
        ),
        (_, Origin::FullLine) => Ok(()),
        (_, _) if spec.is_even() => Ok(()),
        _ => Err(Error::InvalidInput(
            "a boundary condition at the origin needs an even potential".into(),
        )),
    }
}

/// Coefficient of `1/x` in `2m V/hbar^2` near the origin of radial problems.
fn pole_residue(spec: &PotentialSpec) -> f64 {
    let scale = spec.two_m / (spec.hbar * spec.hbar);
    match spec.potential {
        Potential::Coulomb { charge, .. } => -scale * charge,
        Potential::SinglePlusDoublePole { u2, .. } => scale * u2,
        _ => 0.0,
    }
}

/// Regular exponent `s` with `s(s - 1) = lambda`.
fn regular_exponent(lambda: f64) -> f64 {
    0.5 + (0.25 + lambda).sqrt()
}

/// Point beyond the last allowed region at which `int kappa >= DECAY_ACTION`,
/// walking from `start` in direction `dir`.
fn decay_radius(problem: &Problem, energy: f64, start: f64, dir: f64) -> Result<f64> {
    let mut x = start;
    let mut step = 1e-2;
    let mut action = 0.0;
    let mut q_prev = problem.q(x, energy);
    for _ in 0..2_000_000 {
        let next = x + dir * step;
        let q = problem.q(next, energy);
        // Only the forbidden stretch beyond the last allowed point counts.
        action = if q < 0.0 {
            0.0
        } else {
            action + 0.5 * (q.sqrt() + q_prev.max(0.0).sqrt()) * step
        };
        // A centrifugal barrier (q falling outward) is not the outer tail.
        if action >= DECAY_ACTION && q >= q_prev {
            return Ok(next);
        }
        x = next;
        q_prev = q;
        if x.abs() > 1e6 {
            break;
        }
        step = (1e-2 * (1.0 + x.abs()))
            .min(0.05 / (q.max(0.0).sqrt() + 1e-3))
            .max(1e-3);
    }
    Err(Error::BracketFailure {
        index: 0,
        reason: format!("no classically forbidden region found beyond x = {start} at E = {energy}"),
    })
}

struct Setup {
    inner: f64,
    outer: f64,
    cuts: Vec<f64>,
}

fn setup(problem: &Problem, bc: &BoundaryCondition, energy: f64) -> Result<Setup> {
    let spec = problem.spec;
    let inner_default = if spec.is_radial() { RADIAL_START } else { 0.0 };
    let outer = match bc.outer_radius {
        Some(r) => {
            if !(problem.q(r, energy) >= MARGIN) {
                return Err(Error::InvalidInput(format!(
                    "outer radius {r} is not deep enough in the forbidden region at E = {energy}"
                )));
            }
            r
        }
        None => decay_radius(problem, energy, inner_default.max(0.0), 1.0)?,
    };
    let inner = match bc.origin {
        Origin::FullLine => match bc.outer_radius {
            Some(r) => {
                if !(problem.q(-r, energy) >= MARGIN) {
                    return Err(Error::InvalidInput(format!(
                        "outer radius {r} is not deep enough on the left at E = {energy}"
                    )));
                }
                -r
            }
            None => decay_radius(problem, energy, 0.0, -1.0)?,
        },
        _ => inner_default,
    };
    let cuts = spec
        .breakpoints()
        .into_iter()
        .filter(|c| *c > inner && *c < outer)
        .collect();
    Ok(Setup { inner, outer, cuts })
}

fn count_zeros(problem: &Problem, bc: &BoundaryCondition, s: &Setup, energy: f64) -> Result<usize> {
    let y0 = match bc.origin {
        Origin::Neumann => [1.0, 0.0],
        Origin::FullLine => [0.0, 1.0],
        Origin::Dirichlet if problem.spec.is_radial() => {
            let sexp = regular_exponent(problem.lambda);
            let a1 = pole_residue(problem.spec) / (2.0 * sexp);
            let r = s.inner;
            let psi = r.powf(sexp) * (1.0 + a1 * r);
            let dpsi = r.powf(sexp - 1.0) * (sexp + (sexp + 1.0) * a1 * r);
            let norm = psi.abs() + dpsi.abs();
            [psi / norm, dpsi / norm]
        }
        Origin::Dirichlet => [0.0, 1.0],
    };
    let mut zeros = 0;
    let mut y = y0;
    let mut a = s.inner;
    for &b in s.cuts.iter().chain(std::iter::once(&s.outer)) {
        y = integrate_segment(problem, energy, a, b, y, &mut zeros)?;
        a = b;
    }
    // A zero landing exactly on the outer boundary belongs to the eigenvalue itself.
    if y[0] == 0.0 && zeros > 0 {
        zeros -= 1;
    }
    Ok(zeros)
}

fn lower_energy_bound(problem: &Problem) -> f64 {
    let spec = problem.spec;
    match spec.potential {
        Potential::Coulomb { charge, .. } => {
            // Below the ground level -Z^2 (2m)/(4 hbar^2) by a factor of two.
            -charge.abs() * charge.abs() * spec.two_m / (2.0 * spec.hbar * spec.hbar) - 1e-3
        }
        _ => {
            let (lo, hi) = if spec.is_radial() {
                (RADIAL_START, 10.0)
            } else {
                (-10.0, 10.0)
            };
            let vmin = (0..=4000)
                .map(|k| spec.value(lo + (hi - lo) * k as f64 / 4000.0))
                .fold(f64::INFINITY, f64::min);
            vmin - 1.0
        }
    }
}

/// The `n`-th level (`n = 0` is the ground state) for the given boundary condition.
pub fn shoot(
    spec: &PotentialSpec,
    bc: &BoundaryCondition,
    n: usize,
    width: f64,
) -> Result<Eigenvalue> {
    validate(spec, bc.origin)?;
    let problem = Problem {
        spec,
        scale: spec.two_m / (spec.hbar * spec.hbar),
        lambda: spec.centrifugal(),
    };
    let coulomb = matches!(spec.potential, Potential::Coulomb { .. });
    let e_lo = lower_energy_bound(&problem);
    let mut e_hi = if coulomb { 0.5 * e_lo } else { e_lo + 2.0 };
    let mut found = None;
    for _ in 0..200 {
        let s = setup(&problem, bc, e_hi)?;
        if count_zeros(&problem, bc, &s, e_hi)? > n {
            found = Some(s);
            break;
        }
        e_hi = if coulomb {
            0.5 * e_hi
        } else {
            e_hi + 2.0 * (e_hi - e_lo)
        };
    }
    let s = found.ok_or_else(|| Error::BracketFailure {
        index: n,
        reason: "no energy with enough nodes found".into(),
    })?;
    let mut lo = e_lo;
    let mut hi = e_hi;
    if count_zeros(&problem, bc, &s, lo)? > n {
        return Err(Error::BracketFailure {
            index: n,
            reason: format!("lower bound {lo} already has more than {n} nodes"),
        });
    }
    while hi - lo > width {
        let mid = 0.5 * (lo + hi);
        if count_zeros(&problem, bc, &s, mid)? > n {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Eigenvalue {
        energy: 0.5 * (lo + hi),
        bracket_width: hi - lo,
        nodes: count_zeros(&problem, bc, &s, lo)?,
        domain: (s.inner, s.outer),
    })
}

/// `E_n` with the default bracket width.
pub fn shooting_eigenvalue(spec: &PotentialSpec, bc: &BoundaryCondition, n: usize) -> Result<f64> {
    Ok(shoot(spec, bc, n, BRACKET_TOL)?.energy)
}

/// Full-line spectrum of an even potential from the two half-line problems:
/// Neumann levels are the even states, Dirichlet levels the odd ones.
pub fn parity_split_spectrum(spec: &PotentialSpec, n_max: usize) -> Result<SpectrumTable> {
    if !spec.is_even() {
        return Err(Error::InvalidInput(
            "parity splitting needs an even potential".into(),
        ));
    }
    let rows = (0..=n_max)
        .map(|n| {
            let origin = if n % 2 == 0 {
                Origin::Neumann
            } else {
                Origin::Dirichlet
            };
            let level = shoot(spec, &BoundaryCondition::new(origin), n / 2, BRACKET_TOL)?;
            Ok(SpectrumRow {
                n,
                value: level.energy,
                estimator: Estimator::Shooting,
                bracket_width: Some(level.bracket_width),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    SpectrumTable::new(Units::Energy, rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::airy::true_abs_spectrum;

    fn full() -> BoundaryCondition {
        BoundaryCondition::new(Origin::FullLine)
    }

    #[test]
    fn harmonic_levels() {
        let spec = PotentialSpec::harmonic();
        for n in 0..4 {
            let e = shooting_eigenvalue(&spec, &full(), n).unwrap();
            assert!((e - (2 * n + 1) as f64).abs() < 1e-6, "{n} {e}");
        }
    }

    #[test]
    fn abs_ground_state() {
        let spec = PotentialSpec::unit(Potential::AbsLinear).unwrap();
        let e = shooting_eigenvalue(&spec, &full(), 0).unwrap();
        assert!((e - 1.01879).abs() < 1e-3);
        let exact = true_abs_spectrum(0).unwrap().rows[0].value;
        assert!((e - exact).abs() < 1e-7);
    }

    #[test]
    fn hydrogen_ground_state() {
        let spec = PotentialSpec::new(Potential::Coulomb { charge: 1.0, l: 0 }, 1.0, 2.0).unwrap();
        let e = shooting_eigenvalue(&spec, &BoundaryCondition::new(Origin::Dirichlet), 0).unwrap();
        assert!((e + 0.5).abs() < 1e-4, "{e}");
    }

    #[test]
    fn harmonic_parity_split() {
        let t = parity_split_spectrum(&PotentialSpec::harmonic(), 5).unwrap();
        for row in &t.rows {
            assert!((row.value - (2 * row.n + 1) as f64).abs() < 1e-6);
        }
    }

    #[test]
    fn nodes_match_index() {
        let spec = PotentialSpec::unit(Potential::AbsLinear).unwrap();
        for n in 0..4 {
            let level = shoot(&spec, &full(), n, BRACKET_TOL).unwrap();
            assert_eq!(level.nodes, n);
            assert!(level.bracket_width <= 1e-8);
        }
    }

    #[test]
    fn shallow_radius_rejected() {
        let spec = PotentialSpec::harmonic();
        let bc = BoundaryCondition::with_radius(Origin::FullLine, 0.5);
        assert!(matches!(
            shooting_eigenvalue(&spec, &bc, 0),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn origin_conditions_need_even_potentials() {
        let spec = PotentialSpec::unit(Potential::Polynomial {
            coeffs: vec![1.0, 1.0],
        })
        .unwrap();
        let bc = BoundaryCondition::new(Origin::Neumann);
        assert!(shooting_eigenvalue(&spec, &bc, 0).is_err());
    }
}
