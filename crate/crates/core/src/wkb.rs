//! WKB corrections from the Riccati recursion, quantum periods by contour
//! quadrature, and the Gamma-function structure of monic-potential periods.
//!
//! With `psi = exp((i/hbar) int p)` the Riccati equation reads
//! `p^2 - i hbar p' = 2m(E - V) - hbar^2 lambda/x^2`, and the expansion
//! `p = sum hbar^n p_n` gives
//! `p_n = (i p'_{n-1} - sum_{j=1}^{n-1} p_j p_{n-j} - [n = 2] lambda/x^2) / (2 p_0)`.
//! Every `p_n` is carried as a truncated Taylor series around the evaluation
//! point, so the derivatives the recursion needs are exact.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::potentials::{CycleSpec, PotentialSpec};

const TURNING_POINT_FLOOR: f64 = 1e-8;
const RADIUS_FACTOR: f64 = 1.35;
const MIN_NODES: usize = 64;
const MAX_NODES: usize = 1 << 15;
const CONTOUR_MARGIN: f64 = 0.1;
const PERIOD_TOL: f64 = 1e-8;

type Jet = Vec<Complex64>;

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

fn jet_mul(a: &[Complex64], b: &[Complex64], len: usize) -> Jet {
    (0..len)
        .map(|k| (0..=k).map(|j| a[j] * b[k - j]).sum())
        .collect()
}

fn jet_div(a: &[Complex64], b: &[Complex64], len: usize) -> Jet {
    let mut c = vec![zero(); len];
    for k in 0..len {
        let mut acc = a[k];
        for j in 1..=k {
            acc -= b[j] * c[k - j];
        }
        c[k] = acc / b[0];
    }
    c
}

fn jet_derivative(a: &[Complex64]) -> Jet {
    (1..a.len()).map(|k| a[k] * k as f64).collect()
}

/// Evaluator for `p_0 .. p_K` of a potential at fixed energy.
#[derive(Debug, Clone)]
pub struct WkbTermStack {
    pub spec: PotentialSpec,
    pub energy: f64,
    pub max_order: usize,
}

impl WkbTermStack {
    pub fn new(spec: PotentialSpec, energy: f64, max_order: usize) -> Self {
        Self {
            spec,
            energy,
            max_order,
        }
    }

    /// `2m (E - V(z + t))` as a Taylor series in `t`.
    fn momentum_squared(&self, z: Complex64) -> Result<Jet> {
        let v = self.spec.taylor(z, self.max_order)?;
        Ok(v.iter()
            .enumerate()
            .map(|(k, c)| {
                let e = if k == 0 { self.energy } else { 0.0 };
                (e - c) * self.spec.two_m
            })
            .collect())
    }

    /// `p_0(z)` on the principal branch of the square root.
    pub fn p0(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.momentum_squared(z)?[0].sqrt())
    }

    /// `p_0 .. p_K` at `z`, with `p_0(z) = root` (which must square to
    /// `2m(E - V(z))`).
    pub fn terms_with_root(&self, z: Complex64, root: Complex64) -> Result<Vec<Complex64>> {
        let k = self.max_order;
        let q = self.momentum_squared(z)?;
        let scale = q[0].norm().max(1.0).sqrt();
        if root.norm() < TURNING_POINT_FLOOR * scale {
            return Err(Error::TurningPointSingularity {
                modulus: root.norm(),
            });
        }
        let len = k + 1;
        let mut p0 = vec![zero(); len];
        p0[0] = root;
        for m in 1..len {
            let mut acc = q[m];
            for j in 1..m {
                acc -= p0[j] * p0[m - j];
            }
            p0[m] = acc / (2.0 * root);
        }
        let lambda = self.spec.centrifugal();
        let mut quantum = vec![zero(); len];
        if lambda != 0.0 {
            // -lambda/(z+t)^2 = -lambda sum (-1)^m (m+1) t^m / z^{m+2}
            let inv = 1.0 / z;
            let mut pow = inv * inv;
            for (m, slot) in quantum.iter_mut().enumerate() {
                let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                *slot = -lambda * sign * (m as f64 + 1.0) * pow;
                pow *= inv;
            }
        }
        let two_p0: Jet = p0.iter().map(|c| c * 2.0).collect();
        let mut jets: Vec<Jet> = vec![p0];
        for n in 1..=k {
            let width = len - n;
            let deriv = jet_derivative(&jets[n - 1]);
            let mut bracket: Jet = (0..width).map(|m| Complex64::i() * deriv[m]).collect();
            for j in 1..n {
                let prod = jet_mul(&jets[j], &jets[n - j], width);
                for m in 0..width {
                    bracket[m] -= prod[m];
                }
            }
            if n == 2 {
                for m in 0..width {
                    bracket[m] += quantum[m];
                }
            }
            jets.push(jet_div(&bracket, &two_p0, width));
        }
        Ok(jets.iter().map(|j| j[0]).collect())
    }

    /// `p_0 .. p_K` at `z` on the principal branch of `p_0`.
    pub fn terms(&self, z: Complex64) -> Result<Vec<Complex64>> {
        let root = self.p0(z)?;
        self.terms_with_root(z, root)
    }
}

/// `p_n(z)` from the recursion, principal branch of `p_0`.
pub fn wkb_term(spec: &PotentialSpec, energy: f64, n: usize, z: Complex64) -> Result<Complex64> {
    let stack = WkbTermStack::new(spec.clone(), energy, n);
    Ok(stack.terms(z)?[n])
}

/// A contour period with its doubling error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeriodValue {
    pub order: usize,
    pub re: f64,
    pub im: f64,
    pub error: f64,
    pub nodes: usize,
}

impl PeriodValue {
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

fn check_contour(
    spec: &PotentialSpec,
    energy: f64,
    cycle: &CycleSpec,
    center: f64,
    radius: f64,
) -> Result<()> {
    let c = Complex64::new(center, 0.0);
    let mut singular = spec.poles();
    for tp in spec.complex_turning_points(energy)? {
        let own = (tp - cycle.start).norm() <= 1e-9 * radius.max(1.0)
            || (tp - cycle.end).norm() <= 1e-9 * radius.max(1.0);
        if !own {
            singular.push(tp);
        }
    }
    for s in singular {
        let d = (s - c).norm();
        if (d - radius).abs() < CONTOUR_MARGIN * radius {
            return Err(Error::ContourTooClose {
                distance: (d - radius).abs(),
                location: format!("{s}"),
            });
        }
        if d < radius {
            return Err(Error::Domain(format!(
                "contour around {} encloses the extra singularity {s}",
                cycle.label
            )));
        }
    }
    Ok(())
}

fn trapezoid(
    stack: &WkbTermStack,
    energy: f64,
    center: f64,
    radius: f64,
    nodes: usize,
) -> Result<Vec<Complex64>> {
    let c = Complex64::new(center, 0.0);
    let q0 = stack.spec.two_m * (energy - stack.spec.value(center + radius));
    let mut previous = if q0 < 0.0 {
        Complex64::new(0.0, (-q0).sqrt())
    } else {
        Complex64::new(q0.sqrt(), 0.0)
    };
    let mut sums = vec![zero(); stack.max_order + 1];
    let dphi = 2.0 * PI / nodes as f64;
    for k in 0..nodes {
        let e = Complex64::from_polar(1.0, k as f64 * dphi);
        let z = c + radius * e;
        let principal = stack.p0(z)?;
        let root = if (principal - previous).norm() <= (principal + previous).norm() {
            principal
        } else {
            -principal
        };
        previous = root;
        let terms = stack.terms_with_root(z, root)?;
        let dz = Complex64::i() * radius * e;
        for (s, t) in sums.iter_mut().zip(terms) {
            *s += t * dz;
        }
    }
    Ok(sums.into_iter().map(|s| s * dphi).collect())
}

/// Order-`n` periods `oint p_j dz` (`j = 0..=n`) around the circle centred
/// on the cycle with radius `radius_factor` times its half-width.
pub fn quantum_periods_with_radius(
    spec: &PotentialSpec,
    energy: f64,
    cycle: &CycleSpec,
    n: usize,
    radius_factor: f64,
) -> Result<Vec<PeriodValue>> {
    let center = cycle.midpoint();
    let radius = radius_factor * cycle.half_width();
    check_contour(spec, energy, cycle, center, radius)?;
    let stack = WkbTermStack::new(spec.clone(), energy, n);
    let mut nodes = MIN_NODES;
    let mut coarse = trapezoid(&stack, energy, center, radius, nodes)?;
    loop {
        let fine = trapezoid(&stack, energy, center, radius, 2 * nodes)?;
        nodes *= 2;
        let errors: Vec<f64> = fine
            .iter()
            .zip(&coarse)
            .map(|(a, b)| (a - b).norm())
            .collect();
        let done = fine
            .iter()
            .zip(&errors)
            .all(|(v, e)| *e <= 1e-13 * v.norm().max(1.0));
        if done || nodes >= MAX_NODES {
            let worst = errors.iter().cloned().fold(0.0, f64::max);
            if worst > PERIOD_TOL {
                return Err(Error::QuadratureFailure {
                    tolerance: PERIOD_TOL,
                    estimate: worst,
                });
            }
            return Ok(fine
                .iter()
                .zip(errors)
                .enumerate()
                .map(|(order, (v, error))| PeriodValue {
                    order,
                    re: v.re,
                    im: v.im,
                    error,
                    nodes,
                })
                .collect());
        }
        coarse = fine;
    }
}

/// Order-`n` quantum period of `cycle` on the default contour.
pub fn quantum_period_order(
    spec: &PotentialSpec,
    energy: f64,
    cycle: &CycleSpec,
    n: usize,
) -> Result<PeriodValue> {
    let all = quantum_periods_with_radius(spec, energy, cycle, n, RADIUS_FACTOR)?;
    Ok(all[n])
}

/// Orders `0..=n` of the quantum period of `cycle` on the default contour.
pub fn quantum_periods(
    spec: &PotentialSpec,
    energy: f64,
    cycle: &CycleSpec,
    n: usize,
) -> Result<Vec<PeriodValue>> {
    quantum_periods_with_radius(spec, energy, cycle, n, RADIUS_FACTOR)
}

fn gamma(x: f64) -> f64 {
    statrs::function::gamma::gamma(x)
}

fn is_pole(x: f64) -> bool {
    x <= 0.0 && (x - x.round()).abs() < 1e-12
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Prefactor of the order-`hbar^{2n}` period of `V = x^{2M}`:
/// `E^{1/(2M)+1/2-n(1+2/(2M))} 2 sqrt(pi) Gamma(1+(1-2n)/(2M)) (-1)^n /
/// (Gamma((3-2n)/2+(1-2n)/(2M)) (2n+2)! 2^n)` times `p_n`. This is the
/// half-cycle normalisation: at `n = 0` it equals half the classical mass.
pub fn monic_gamma_factor(m: u32, n: usize, energy: f64, p_n: f64) -> Result<f64> {
    if m == 0 {
        return Err(Error::InvalidInput("M must be >= 1".into()));
    }
    let two_m = 2.0 * m as f64;
    let nf = n as f64;
    let upper = 1.0 + (1.0 - 2.0 * nf) / two_m;
    let lower = (3.0 - 2.0 * nf) / 2.0 + (1.0 - 2.0 * nf) / two_m;
    if is_pole(lower) {
        return Ok(0.0);
    }
    if is_pole(upper) {
        return Err(Error::Domain(format!(
            "Gamma({upper}) diverges for M = {m}, n = {n}"
        )));
    }
    let exponent = 1.0 / two_m + 0.5 - nf * (1.0 + 2.0 / two_m);
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    let value = energy.powf(exponent) * 2.0 * PI.sqrt() * gamma(upper) * sign
        / (gamma(lower) * factorial(2 * n + 2) * 2f64.powi(n as i32));
    Ok(value * p_n)
}

/// Bernoulli numbers `B_0 .. B_k` by the standard recurrence.
pub fn bernoulli_numbers(k: usize) -> Vec<f64> {
    let mut b = vec![0.0; k + 1];
    b[0] = 1.0;
    for m in 1..=k {
        let mut binom = 1.0;
        let mut acc = 0.0;
        for (j, bj) in b.iter().enumerate().take(m) {
            acc += binom * bj;
            binom *= (m + 1 - j) as f64 / (j + 1) as f64;
        }
        b[m] = -acc / (m as f64 + 1.0);
    }
    b
}

/// Leading large-`n` growth `(2n+1)(n+1)(n-1)! B_{2n} (2M)^{2n-1}` of `P_n`.
pub fn leading_pn_estimate(n: usize, m: u32) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidInput(
            "the growth estimate starts at n = 1".into(),
        ));
    }
    let b = bernoulli_numbers(2 * n)[2 * n];
    let nf = n as f64;
    Ok((2.0 * nf + 1.0)
        * (nf + 1.0)
        * factorial(n - 1)
        * b
        * (2.0 * m as f64).powi(2 * n as i32 - 1))
}

/// Residual `|log(V^- / V^+) + sum_j n_j log(1 + V_j^{-1})|` of the
/// discontinuity relation, for neighbours given as `(V_j^{-1}, n_j)`.
pub fn delabaere_pham_disc_check(
    voros_minus: Complex64,
    voros_plus: Complex64,
    neighbours: &[(Complex64, i32)],
) -> f64 {
    let mut ratio = voros_minus / voros_plus;
    for &(inverse, n) in neighbours {
        ratio *= (Complex64::new(1.0, 0.0) + inverse).powi(n);
    }
    ratio.ln().norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::{classical_mass, minimal_chamber_cycles, Potential};
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn harmonic_with_hbar(hbar: f64) -> PotentialSpec {
        PotentialSpec::new(
            Potential::Polynomial {
                coeffs: vec![0.0, 1.0],
            },
            hbar,
            1.0,
        )
        .unwrap()
    }

    #[test]
    fn terms_at_points() {
        let spec = PotentialSpec::harmonic();
        assert!((wkb_term(&spec, 1.0, 0, c(0.0, 0.0)).unwrap() - 1.0).norm() < 1e-15);
        assert!(wkb_term(&spec, 1.0, 1, c(0.0, 0.0)).unwrap().norm() < 1e-15);
        // p_1 = -i z/(2(1 - z^2)), so i p_1(1/2) = 1/3.
        let p1 = wkb_term(&spec, 1.0, 1, c(0.5, 0.0)).unwrap();
        assert!((p1 - c(0.0, -1.0 / 3.0)).norm() < 1e-15);
    }

    #[test]
    fn p0_squares_to_momentum() {
        let spec = PotentialSpec::unit(Potential::Polynomial {
            coeffs: vec![0.3, -1.0, 0.2, 1.0],
        })
        .unwrap();
        let stack = WkbTermStack::new(spec.clone(), 0.7, 4);
        for z in [c(0.3, 0.2), c(-1.2, 0.5), c(2.0, -1.0)] {
            let p0 = stack.terms(z).unwrap()[0];
            let v = spec.taylor(z, 0).unwrap()[0];
            assert!((p0 * p0 - (0.7 - v)).norm() <= 1e-12 * (0.7 - v).norm());
        }
    }

    #[test]
    fn p2_matches_closed_form() {
        // For Q = 1 - z^2: p_2 = (i p_1' - p_1^2)/(2 p_0) by hand.
        let spec = PotentialSpec::harmonic();
        let z = c(0.3, 0.4);
        let p0 = (1.0 - z * z).sqrt();
        let p1 = -Complex64::i() * z / (2.0 * (1.0 - z * z));
        let dp1 = -Complex64::i() * (1.0 + z * z) / (2.0 * (1.0 - z * z) * (1.0 - z * z));
        let p2 = (Complex64::i() * dp1 - p1 * p1) / (2.0 * p0);
        let got = wkb_term(&spec, 1.0, 2, z).unwrap();
        assert!((got - p2).norm() < 1e-14);
    }

    #[test]
    fn turning_point_singularity() {
        let spec = PotentialSpec::harmonic();
        assert!(matches!(
            wkb_term(&spec, 1.0, 1, c(1.0, 0.0)),
            Err(Error::TurningPointSingularity { .. })
        ));
    }

    #[test]
    fn harmonic_periods() {
        let spec = PotentialSpec::harmonic();
        let cycle = &minimal_chamber_cycles(&spec, 1.0).unwrap()[0];
        let p = quantum_periods(&spec, 1.0, cycle, 4).unwrap();
        assert!((p[0].value() - PI).norm() < 1e-10);
        assert!((p[1].value() + PI).norm() < 1e-10);
        for k in 2..=4 {
            assert!(p[k].value().norm() <= 1e-8, "order {k}: {}", p[k].value());
        }
    }

    #[test]
    fn bohr_sommerfeld_with_shift() {
        for hbar in [1.0, 0.1] {
            let spec = harmonic_with_hbar(hbar);
            for energy in [1.0, 2.5, 7.0] {
                let cycle = &minimal_chamber_cycles(&spec, energy).unwrap()[0];
                let p = quantum_periods(&spec, energy, cycle, 1).unwrap();
                let total = p[0].value() + hbar * p[1].value();
                assert!((total - PI * (energy - hbar)).norm() <= 1e-8);
            }
        }
    }

    #[test]
    fn first_order_independent_of_energy() {
        let spec = PotentialSpec::harmonic();
        let values: Vec<Complex64> = [0.5, 1.0, 3.0, 10.0]
            .iter()
            .map(|&e| {
                let cycle = &minimal_chamber_cycles(&spec, e).unwrap()[0];
                quantum_period_order(&spec, e, cycle, 1).unwrap().value()
            })
            .collect();
        for v in &values {
            assert!((v - values[0]).norm() <= 1e-8);
        }
    }

    #[test]
    fn radius_independence() {
        let spec = PotentialSpec::harmonic();
        let cycle = &minimal_chamber_cycles(&spec, 2.0).unwrap()[0];
        let base = quantum_periods_with_radius(&spec, 2.0, cycle, 4, RADIUS_FACTOR).unwrap();
        for factor in [RADIUS_FACTOR * 0.8, RADIUS_FACTOR * 1.2] {
            let other = quantum_periods_with_radius(&spec, 2.0, cycle, 4, factor).unwrap();
            for (a, b) in base.iter().zip(&other) {
                assert!((a.value() - b.value()).norm() <= 1e-9);
            }
        }
    }

    #[test]
    fn contour_guards() {
        // V = x^3 - x at E = 0 has turning points -1, 0, 1.
        let spec = PotentialSpec::unit(Potential::Polynomial {
            coeffs: vec![-1.0, 0.0, 1.0],
        })
        .unwrap();
        let cycle = &minimal_chamber_cycles(&spec, 0.0).unwrap()[1];
        assert!(quantum_periods_with_radius(&spec, 0.0, cycle, 2, RADIUS_FACTOR).is_ok());
        assert!(matches!(
            quantum_periods_with_radius(&spec, 0.0, cycle, 0, 2.9),
            Err(Error::ContourTooClose { .. })
        ));
        assert!(matches!(
            quantum_periods_with_radius(&spec, 0.0, cycle, 0, 3.5),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn cubic_period_matches_mass() {
        let spec = PotentialSpec::unit(Potential::Polynomial {
            coeffs: vec![-1.0, 0.0, 1.0],
        })
        .unwrap();
        for cycle in minimal_chamber_cycles(&spec, 0.0).unwrap() {
            let p = quantum_period_order(&spec, 0.0, &cycle, 0).unwrap().value();
            let mass = classical_mass(&spec, &cycle, 0.0).unwrap();
            // Allowed cycles give the mass directly, forbidden ones -i times it.
            let expected = match cycle.region {
                crate::potentials::Region::Allowed => Complex64::new(mass, 0.0),
                crate::potentials::Region::Forbidden => Complex64::new(0.0, -mass),
            };
            assert!(
                (p - expected).norm() < 1e-10,
                "{}: {p} vs {expected}",
                cycle.label
            );
        }
    }

    #[test]
    fn gamma_factor() {
        assert_eq!(monic_gamma_factor(1, 2, 1.7, 1.0).unwrap(), 0.0);
        assert_eq!(monic_gamma_factor(1, 3, 0.3, 1.0).unwrap(), 0.0);
        let f = monic_gamma_factor(2, 0, 1.0, 1.0).unwrap();
        assert!((f - 1.748_038_369_528_079_87).abs() < 1e-13);
        let f = monic_gamma_factor(1, 0, 2.0, 1.0).unwrap();
        assert!((f - PI).abs() < 1e-13);
        assert!((gamma(-0.5) + 2.0 * PI.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn bernoulli() {
        let b = bernoulli_numbers(10);
        assert!((b[1] + 0.5).abs() < 1e-15);
        assert!((b[2] - 1.0 / 6.0).abs() < 1e-15);
        assert!((b[4] + 1.0 / 30.0).abs() < 1e-15);
        assert!((b[10] - 5.0 / 66.0).abs() < 1e-13);
        assert!((leading_pn_estimate(1, 1).unwrap() - 3.0 * 2.0 * (1.0 / 6.0) * 2.0).abs() < 1e-14);
    }

    #[test]
    fn discontinuity_check_trivial_cases() {
        let v = c(0.3, 1.2);
        assert_eq!(delabaere_pham_disc_check(v, v, &[(c(0.0, 0.0), 1)]), 0.0);
        assert_eq!(delabaere_pham_disc_check(v, v, &[(c(5.0, -2.0), 0)]), 0.0);
        let inv = c(0.2, 0.1);
        let minus = v / (1.0 + inv);
        assert!(delabaere_pham_disc_check(minus, v, &[(inv, 1)]) < 1e-15);
    }

    proptest! {
        #[test]
        fn harmonic_p0_identity(x in -3.0f64..3.0, y in 0.1f64..3.0, e in 0.5f64..5.0) {
            let spec = PotentialSpec::harmonic();
            let z = c(x, y);
            let p0 = wkb_term(&spec, e, 0, z).unwrap();
            let q = e - z * z;
            prop_assert!((p0 * p0 - q).norm() <= 1e-12 * q.norm());
        }
    }
}
