//! Potential families, turning points, cycles and classical periods.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::quadrature;

const MASS_TOL: f64 = 1e-12;

/// The potential `V(x)` entering `-hbar^2/(2m) psi'' + V psi = E psi`.
#[derive(Debug, Clone, PartialEq)]
pub enum Potential {
    /// `V = x^{2M}`.
    Monic { m: u32 },
    /// `V = sum_k a_k x^k` for `k = 1..=d`.
    Polynomial { coeffs: Vec<f64> },
    /// `V = |x|`.
    AbsLinear,
    /// `V = x + u2/x` on `x > 0`, with the centrifugal term
    /// `hbar^2 l(l+1)/x^2` and the energy parameter `E` (so `u1 = -E`).
    SinglePlusDoublePole {
        energy: f64,
        u2: f64,
        l: f64,
        s: u32,
    },
    /// Radial Coulomb problem `V = -charge/r` with angular momentum `l`.
    Coulomb { charge: f64, l: u32 },
}

/// A potential together with `hbar` and the mass parameter `2m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpec", into = "RawSpec")]
pub struct PotentialSpec {
    pub potential: Potential,
    pub hbar: f64,
    pub two_m: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    variant: String,
    #[serde(default)]
    params: Option<Value>,
    #[serde(default = "one")]
    hbar: f64,
    #[serde(default = "one")]
    two_m: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MonicParams {
    #[serde(rename = "M")]
    m: u32,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PolynomialParams {
    coeffs: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EmptyParams {}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpdpParams {
    #[serde(rename = "E")]
    energy: f64,
    u2: f64,
    l: f64,
    #[serde(default)]
    s: u32,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CoulombParams {
    #[serde(default = "one")]
    charge: f64,
    #[serde(default)]
    l: u32,
}

fn params<T: for<'de> Deserialize<'de>>(value: Option<Value>) -> std::result::Result<T, String> {
    let value = value.unwrap_or_else(|| Value::Object(Default::default()));
    serde_json::from_value(value).map_err(|e| e.to_string())
}

impl TryFrom<RawSpec> for PotentialSpec {
    type Error = String;

    fn try_from(raw: RawSpec) -> std::result::Result<Self, String> {
        let potential = match raw.variant.as_str() {
            "Monic" => {
                let p: MonicParams = params(raw.params)?;
                Potential::Monic { m: p.m }
            }
            "Polynomial" => {
                let p: PolynomialParams = params(raw.params)?;
                Potential::Polynomial { coeffs: p.coeffs }
            }
            "AbsLinear" => {
                let _: EmptyParams = params(raw.params)?;
                Potential::AbsLinear
            }
            "SinglePlusDoublePole" => {
                let p: SpdpParams = params(raw.params)?;
                Potential::SinglePlusDoublePole {
                    energy: p.energy,
                    u2: p.u2,
                    l: p.l,
                    s: p.s,
                }
            }
            "Coulomb" => {
                let p: CoulombParams = params(raw.params)?;
                Potential::Coulomb {
                    charge: p.charge,
                    l: p.l,
                }
            }
            other => return Err(format!("unknown potential variant `{other}`")),
        };
        PotentialSpec::new(potential, raw.hbar, raw.two_m).map_err(|e| e.to_string())
    }
}

impl From<PotentialSpec> for RawSpec {
    fn from(spec: PotentialSpec) -> Self {
        let (variant, params) = match spec.potential {
            Potential::Monic { m } => ("Monic", serde_json::to_value(MonicParams { m })),
            Potential::Polynomial { coeffs } => (
                "Polynomial",
                serde_json::to_value(PolynomialParams { coeffs }),
            ),
            Potential::AbsLinear => ("AbsLinear", serde_json::to_value(EmptyParams {})),
            Potential::SinglePlusDoublePole { energy, u2, l, s } => (
                "SinglePlusDoublePole",
                serde_json::to_value(SpdpParams { energy, u2, l, s }),
            ),
            Potential::Coulomb { charge, l } => {
                ("Coulomb", serde_json::to_value(CoulombParams { charge, l }))
            }
        };
        RawSpec {
            variant: variant.to_string(),
            params: params.ok(),
            hbar: spec.hbar,
            two_m: spec.two_m,
        }
    }
}

/// Whether a cycle runs through a classically allowed or forbidden region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    Allowed,
    Forbidden,
}

/// A real cycle between two turning points (or the origin and a turning
/// point for the pole potential).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleSpec {
    pub label: String,
    pub start: f64,
    pub end: f64,
    pub region: Region,
}

impl CycleSpec {
    pub fn new(label: impl Into<String>, start: f64, end: f64, region: Region) -> Result<Self> {
        if !(start < end) {
            return Err(Error::InvalidInput(format!(
                "cycle endpoints must be ordered, got ({start}, {end})"
            )));
        }
        Ok(Self {
            label: label.into(),
            start,
            end,
            region,
        })
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.start + self.end)
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.end - self.start)
    }
}

impl PotentialSpec {
    pub fn new(potential: Potential, hbar: f64, two_m: f64) -> Result<Self> {
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "hbar must be positive, got {hbar}"
            )));
        }
        if !(two_m > 0.0 && two_m.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "two_m must be positive, got {two_m}"
            )));
        }
        match &potential {
            Potential::Monic { m } if *m == 0 => {
                return Err(Error::InvalidInput("Monic requires M >= 1".into()))
            }
            Potential::Polynomial { coeffs } => {
                if coeffs.is_empty() || coeffs.iter().any(|c| !c.is_finite()) {
                    return Err(Error::InvalidInput(
                        "Polynomial requires finite coefficients a1..ad".into(),
                    ));
                }
                if *coeffs.last().unwrap() == 0.0 {
                    return Err(Error::InvalidInput(
                        "Polynomial leading coefficient must be nonzero".into(),
                    ));
                }
            }
            Potential::SinglePlusDoublePole { energy, u2, l, .. } => {
                if !(energy.is_finite() && l.is_finite() && u2.is_finite() && *u2 >= 0.0) {
                    return Err(Error::InvalidInput(
                        "SinglePlusDoublePole requires finite E, l and u2 >= 0".into(),
                    ));
                }
            }
            Potential::Coulomb { charge, .. } if !(charge.is_finite() && *charge > 0.0) => {
                return Err(Error::InvalidInput(
                    "Coulomb charge must be positive".into(),
                ))
            }
            _ => {}
        }
        Ok(Self {
            potential,
            hbar,
            two_m,
        })
    }

    /// Shorthand with `hbar = 1`, `2m = 1`.
    pub fn unit(potential: Potential) -> Result<Self> {
        Self::new(potential, 1.0, 1.0)
    }

    /// `V(x) = x^2`.
    pub fn harmonic() -> Self {
        Self::unit(Potential::Polynomial {
            coeffs: vec![0.0, 1.0],
        })
        .expect("valid potential")
    }

    /// `V = x + u2/x` with energy parameter `E` and centrifugal parameter `l`.
    pub fn single_plus_double_pole(energy: f64, u2: f64, l: f64) -> Result<Self> {
        Self::unit(Potential::SinglePlusDoublePole {
            energy,
            u2,
            l,
            s: 0,
        })
    }

    /// Classical potential at a real point (no centrifugal term).
    pub fn value(&self, x: f64) -> f64 {
        match &self.potential {
            Potential::Monic { m } => x.powi(2 * *m as i32),
            Potential::Polynomial { coeffs } => poly_eval(coeffs, x),
            Potential::AbsLinear => x.abs(),
            Potential::SinglePlusDoublePole { u2, .. } => x + u2 / x,
            Potential::Coulomb { charge, .. } => -charge / x,
        }
    }

    /// Coefficient `lambda` of the quantum term `lambda/x^2` in
    /// `psi'' = [2m(V - E)/hbar^2 + lambda/x^2] psi`.
    pub fn centrifugal(&self) -> f64 {
        match &self.potential {
            Potential::SinglePlusDoublePole { l, .. } => l * (l + 1.0),
            Potential::Coulomb { l, .. } => (*l as f64) * (*l as f64 + 1.0),
            _ => 0.0,
        }
    }

    /// Energy parameter carried by the potential itself, if any.
    pub fn energy_parameter(&self) -> Option<f64> {
        match &self.potential {
            Potential::SinglePlusDoublePole { energy, .. } => Some(*energy),
            _ => None,
        }
    }

    /// Whether the problem lives on the half line `x > 0`.
    pub fn is_radial(&self) -> bool {
        matches!(
            self.potential,
            Potential::SinglePlusDoublePole { .. } | Potential::Coulomb { .. }
        )
    }

    /// Whether `V(-x) = V(x)`.
    pub fn is_even(&self) -> bool {
        match &self.potential {
            Potential::Monic { .. } | Potential::AbsLinear => true,
            Potential::Polynomial { coeffs } => coeffs
                .iter()
                .enumerate()
                .all(|(i, c)| (i + 1) % 2 == 0 || *c == 0.0),
            _ => false,
        }
    }

    /// Points where `V` is not smooth.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self.potential {
            Potential::AbsLinear => vec![0.0],
            _ => Vec::new(),
        }
    }

    /// Taylor coefficients `c_k = V^{(k)}(z)/k!`, `k = 0..=order`, of the
    /// analytic continuation of `V` around `z`.
    pub fn taylor(&self, z: Complex64, order: usize) -> Result<Vec<Complex64>> {
        let mut out = vec![Complex64::new(0.0, 0.0); order + 1];
        match &self.potential {
            Potential::Monic { m } => {
                let mut coeffs = vec![0.0; 2 * *m as usize];
                coeffs[2 * *m as usize - 1] = 1.0;
                shifted_poly(&coeffs, z, &mut out);
            }
            Potential::Polynomial { coeffs } => shifted_poly(coeffs, z, &mut out),
            Potential::AbsLinear => {
                return Err(Error::Domain(
                    "|x| has no analytic continuation off the real axis".into(),
                ))
            }
            Potential::SinglePlusDoublePole { u2, s, .. } => {
                if *s != 0 {
                    return Err(Error::Domain("only s = 0 is supported".into()));
                }
                out[0] += z;
                if order >= 1 {
                    out[1] += 1.0;
                }
                add_inverse_power(*u2, z, &mut out);
            }
            Potential::Coulomb { charge, .. } => add_inverse_power(-charge, z, &mut out),
        }
        Ok(out)
    }

    /// Locations of poles of `V` or of the centrifugal term.
    pub fn poles(&self) -> Vec<Complex64> {
        match self.potential {
            Potential::SinglePlusDoublePole { .. } | Potential::Coulomb { .. } => {
                vec![Complex64::new(0.0, 0.0)]
            }
            _ => Vec::new(),
        }
    }

    /// All complex solutions of `V(z) = E` (polynomial potentials) or of the
    /// equivalent cleared-denominator equation (pole potential).
    pub fn complex_turning_points(&self, energy: f64) -> Result<Vec<Complex64>> {
        match &self.potential {
            Potential::Monic { m } => {
                let mut coeffs = vec![0.0; 2 * *m as usize];
                coeffs[2 * *m as usize - 1] = 1.0;
                poly_roots(&with_constant(&coeffs, -energy))
            }
            Potential::Polynomial { coeffs } => poly_roots(&with_constant(coeffs, -energy)),
            Potential::SinglePlusDoublePole { u2, .. } => poly_roots(&[*u2, -energy, 1.0]),
            Potential::Coulomb { charge, .. } => Ok(vec![Complex64::new(-charge / energy, 0.0)]),
            Potential::AbsLinear => Ok(vec![
                Complex64::new(-energy, 0.0),
                Complex64::new(energy, 0.0),
            ]),
        }
    }
}

fn poly_eval(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c) * x
}

fn with_constant(coeffs: &[f64], constant: f64) -> Vec<f64> {
    std::iter::once(constant)
        .chain(coeffs.iter().copied())
        .collect()
}

/// Taylor coefficients of `sum_k a_k (z+t)^k` (`k = 1..=d`) in `t`.
fn shifted_poly(coeffs: &[f64], z: Complex64, out: &mut [Complex64]) {
    let full = with_constant(coeffs, 0.0);
    let mut work: Vec<Complex64> = full.iter().map(|&c| Complex64::new(c, 0.0)).collect();
    for slot in out.iter_mut() {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in work.iter().rev() {
            acc = acc * z + c;
        }
        *slot += acc;
        // Synthetic division by (x - z) shifts to the next derivative.
        if work.len() <= 1 {
            break;
        }
        let d = work.len() - 1;
        let mut q = vec![Complex64::new(0.0, 0.0); d];
        q[d - 1] = work[d];
        for k in (1..d).rev() {
            q[k - 1] = work[k] + q[k] * z;
        }
        work = q;
    }
}

/// Adds the Taylor coefficients of `a/(z+t)`.
fn add_inverse_power(a: f64, z: Complex64, out: &mut [Complex64]) {
    let inv = 1.0 / z;
    let mut term = a * inv;
    for slot in out.iter_mut() {
        *slot += term;
        term *= -inv;
    }
}

/// Complex roots of `sum_k c_k x^k` from the companion matrix, polished by
/// Newton steps.
pub fn poly_roots(coeffs: &[f64]) -> Result<Vec<Complex64>> {
    let mut c = coeffs.to_vec();
    while c.len() > 1 && *c.last().unwrap() == 0.0 {
        c.pop();
    }
    let d = c.len() - 1;
    if d == 0 {
        return Ok(Vec::new());
    }
    let lead = c[d];
    let mut companion = DMatrix::<f64>::zeros(d, d);
    for i in 1..d {
        companion[(i, i - 1)] = 1.0;
    }
    for i in 0..d {
        companion[(i, d - 1)] = -c[i] / lead;
    }
    let eig = companion.complex_eigenvalues();
    let mut roots: Vec<Complex64> = eig
        .iter()
        .map(|&r| {
            let mut z = Complex64::new(r.re, r.im);
            for _ in 0..8 {
                let (p, dp) = c.iter().rev().fold(
                    (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)),
                    |(p, dp), &a| (p * z + a, dp * z + p),
                );
                if dp.norm() == 0.0 {
                    break;
                }
                let step = p / dp;
                z -= step;
                if step.norm() <= 1e-16 * z.norm().max(1.0) {
                    break;
                }
            }
            z
        })
        .collect();
    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(roots)
}

/// Ordered real turning points `V(x) = E`.
pub fn turning_points(spec: &PotentialSpec, energy: f64) -> Result<Vec<f64>> {
    let points = match &spec.potential {
        Potential::Monic { m } => {
            if energy <= 0.0 {
                return Err(Error::NoRealTurningPoints(format!(
                    "x^{} = {energy} has no real solutions",
                    2 * m
                )));
            }
            let a = energy.powf(1.0 / (2.0 * *m as f64));
            vec![-a, a]
        }
        Potential::AbsLinear => {
            if energy <= 0.0 {
                return Err(Error::NoRealTurningPoints(format!(
                    "|x| = {energy} has no real solutions"
                )));
            }
            vec![-energy, energy]
        }
        Potential::Polynomial { coeffs } => {
            let roots = poly_roots(&with_constant(coeffs, -energy))?;
            let scale = roots.iter().map(|r| r.norm()).fold(1.0, f64::max);
            let mut real: Vec<f64> = roots
                .iter()
                .filter(|r| r.im.abs() <= 1e-9 * scale)
                .map(|r| polish_real(coeffs, energy, r.re))
                .collect();
            real.sort_by(f64::total_cmp);
            real.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * scale);
            if real.is_empty() {
                return Err(Error::NoRealTurningPoints(format!(
                    "V(x) = {energy} has no real solutions"
                )));
            }
            real
        }
        Potential::SinglePlusDoublePole { u2, s, .. } => {
            if *s != 0 {
                return Err(Error::Domain(format!(
                    "SinglePlusDoublePole with s = {s} is not supported"
                )));
            }
            let disc = energy * energy - 4.0 * u2;
            if disc < 0.0 {
                return Err(Error::NoRealTurningPoints(format!(
                    "discriminant E^2 - 4 u2 = {disc} is negative"
                )));
            }
            let big = 0.5 * (energy + energy.signum() * disc.sqrt());
            if big == 0.0 {
                vec![0.0, 0.0]
            } else {
                let small = u2 / big;
                if small <= big {
                    vec![small, big]
                } else {
                    vec![big, small]
                }
            }
        }
        Potential::Coulomb { charge, .. } => {
            if energy >= 0.0 {
                return Err(Error::NoRealTurningPoints(
                    "Coulomb orbits are unbounded for E >= 0".into(),
                ));
            }
            vec![-charge / energy]
        }
    };
    Ok(points)
}

fn polish_real(coeffs: &[f64], energy: f64, mut x: f64) -> f64 {
    let full = with_constant(coeffs, -energy);
    for _ in 0..8 {
        let (p, dp) = full
            .iter()
            .rev()
            .fold((0.0, 0.0), |(p, dp), &a| (p * x + a, dp * x + p));
        if dp == 0.0 {
            break;
        }
        let step = p / dp;
        x -= step;
        if step.abs() <= 1e-16 * x.abs().max(1.0) {
            break;
        }
    }
    x
}

/// Cycles of the minimal chamber: consecutive real turning points, plus the
/// origin-to-`e1` forbidden cycle for the pole potential.
pub fn minimal_chamber_cycles(spec: &PotentialSpec, energy: f64) -> Result<Vec<CycleSpec>> {
    let points = turning_points(spec, energy)?;
    if let Potential::SinglePlusDoublePole { .. } = spec.potential {
        return Ok(vec![
            CycleSpec::new("gamma_hat", 0.0, points[0], Region::Forbidden)?,
            CycleSpec::new("gamma_1", points[0], points[1], Region::Allowed)?,
        ]);
    }
    let mut cycles = Vec::new();
    for (k, pair) in points.windows(2).enumerate() {
        let mid = 0.5 * (pair[0] + pair[1]);
        let region = if spec.value(mid) < energy {
            Region::Allowed
        } else {
            Region::Forbidden
        };
        cycles.push(CycleSpec::new(
            format!("gamma_{}", k + 1),
            pair[0],
            pair[1],
            region,
        )?);
    }
    Ok(cycles)
}

/// Classical period `2 int sqrt(2m |E - V|) dx` over the cycle, real and
/// positive by choice of branch.
pub fn classical_mass(spec: &PotentialSpec, cycle: &CycleSpec, energy: f64) -> Result<f64> {
    if !(cycle.start < cycle.end) {
        return Err(Error::InvalidInput(
            "cycle endpoints must be ordered".into(),
        ));
    }
    let sign = match cycle.region {
        Region::Allowed => 1.0,
        Region::Forbidden => -1.0,
    };
    let two_m = spec.two_m;
    let integrand = |x: f64| (two_m * sign * (energy - spec.value(x))).max(0.0).sqrt();
    let half = match &spec.potential {
        Potential::SinglePlusDoublePole { u2, s, .. } => {
            if *s != 0 {
                return Err(Error::Domain("only s = 0 is supported".into()));
            }
            if *u2 <= 0.0 {
                return Err(Error::Domain(
                    "u2 = 0 places e1 on the pole; use a small positive u2".into(),
                ));
            }
            if cycle.start == 0.0 {
                quadrature::integrate_from_pole(integrand, cycle.end, MASS_TOL)?.0
            } else {
                quadrature::integrate_between_turning_points(
                    integrand,
                    cycle.start,
                    cycle.end,
                    MASS_TOL,
                )?
                .0
            }
        }
        Potential::Coulomb { .. } => {
            return Err(Error::Domain(
                "the Coulomb potential has no closed classical cycle between real turning points"
                    .into(),
            ))
        }
        _ => {
            let mut total = 0.0;
            let mut lo = cycle.start;
            let cuts: Vec<f64> = spec
                .breakpoints()
                .into_iter()
                .filter(|&b| b > cycle.start && b < cycle.end)
                .chain(std::iter::once(cycle.end))
                .collect();
            for hi in cuts {
                total +=
                    quadrature::integrate_between_turning_points(integrand, lo, hi, MASS_TOL)?.0;
                lo = hi;
            }
            total
        }
    };
    Ok(2.0 * half)
}
