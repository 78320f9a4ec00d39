//! Quantization conditions and the Voros spectrum of `|x|`.
//!
//! In the `theta = log(1/hbar)` picture the `E = 1` problem with `hbar = e^{-theta}`
//! is equivalent to the `hbar = 1` problem at `E = e^{2 theta/3}`, so roots
//! `theta_n` of a residual map to levels `E_n = e^{2 theta_n/3}`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::spectrum::{Estimator, SpectrumRow, SpectrumTable, Units};
use crate::tba::{solve_tba_spdp, MedianCurve, PseudoEnergy, SpdpParams, TbaOptions, ThetaGrid};

/// Bisection stops once a bracket is narrower than this.
pub const ROOT_WIDTH: f64 = 1e-8;

/// Largest imaginary part tolerated in a residual that should be real.
pub const REALITY_TOL: f64 = 1e-10;

/// `(3 pi/4 (n + 1/2))^{2/3}` for `n = 0..=n_max`.
pub fn naive_abs_spectrum(n_max: usize) -> Result<SpectrumTable> {
    let values = (0..=n_max).map(|n| (0.75 * PI * (n as f64 + 0.5)).powf(2.0 / 3.0));
    SpectrumTable::from_values(Units::Energy, Estimator::NaiveBohrSommerfeld, values)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EqcOptions {
    /// Drop the forbidden-cycle period, leaving only the constant `2 pi (l + 1)`.
    #[serde(default)]
    pub neglect_gamma_hat: bool,
    /// Allows the conjectured correction for integer `l > 0`.
    #[serde(default)]
    pub experimental: bool,
}

/// `cos(B_med) - (1 + exp(2 pi (l + 1) - 2 eps_hat))^{-1/2}` on a solved
/// single-plus-double-pole system.
#[derive(Debug, Clone)]
pub struct ModifiedEqc<'a> {
    pe: &'a PseudoEnergy,
    curve: MedianCurve,
    constant: f64,
    opts: EqcOptions,
}

impl<'a> ModifiedEqc<'a> {
    pub fn new(pe: &'a PseudoEnergy, l: u32, opts: EqcOptions) -> Result<Self> {
        if l > 0 && !opts.experimental {
            return Err(Error::InvalidInput(
                "the correction for l > 0 requires the experimental flag".into(),
            ));
        }
        Ok(Self {
            pe,
            curve: MedianCurve::new(pe)?,
            constant: 2.0 * PI * (l as f64 + 1.0),
            opts,
        })
    }

    pub fn curve(&self) -> &MedianCurve {
        &self.curve
    }

    fn second_term(&self, theta: f64) -> f64 {
        let eps_hat = if self.opts.neglect_gamma_hat {
            0.0
        } else {
            self.pe.value_at(1, theta)
        };
        1.0 / (1.0 + (self.constant - 2.0 * eps_hat).exp()).sqrt()
    }

    pub fn residual(&self, theta: f64) -> Result<f64> {
        Ok(self.curve.value_at(theta)?.cos() - self.second_term(theta))
    }

    /// Sign of `d cos(B_med)/d theta`: which cosine branch a root sits on.
    pub fn branch(&self, theta: f64) -> Result<f64> {
        Ok(-self.curve.value_at(theta)?.sin().signum())
    }

    /// All roots in `[lo, hi]`, bracketed on the grid nodes and bisected.
    pub fn roots(&self, lo: f64, hi: f64) -> Result<Vec<(f64, f64)>> {
        let samples: Vec<(f64, f64)> = self
            .curve
            .samples()
            .into_iter()
            .filter(|(t, _)| *t >= lo && *t <= hi)
            .map(|(t, b)| (t, b.cos() - self.second_term(t)))
            .collect();
        let mut roots = Vec::new();
        for pair in samples.windows(2) {
            let ((a, fa), (b, fb)) = (pair[0], pair[1]);
            if fa == 0.0 {
                roots.push((a, 0.0));
            } else if fa * fb < 0.0 {
                roots.push(bisect(|t| self.residual(t), a, b, fa)?);
            }
        }
        if let Some(&(t, f)) = samples.last() {
            if f == 0.0 {
                roots.push((t, 0.0));
            }
        }
        Ok(roots)
    }
}

/// Root and final bracket width.
fn bisect<F: Fn(f64) -> Result<f64>>(
    f: F,
    mut a: f64,
    mut b: f64,
    mut fa: f64,
) -> Result<(f64, f64)> {
    while b - a > ROOT_WIDTH {
        let m = 0.5 * (a + b);
        let fm = f(m)?;
        if fm == 0.0 {
            return Ok((m, 0.0));
        }
        if fa * fm < 0.0 {
            b = m;
        } else {
            a = m;
            fa = fm;
        }
    }
    Ok((0.5 * (a + b), b - a))
}

/// One-shot evaluation of the modified residual.
pub fn modified_eqc_residual(
    theta: f64,
    pe: &PseudoEnergy,
    l: u32,
    opts: EqcOptions,
) -> Result<f64> {
    let eqc = ModifiedEqc::new(pe, l, opts)?;
    eqc.residual(theta)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[derive(Default)]
pub struct VorosOptions {
    #[serde(default)]
    pub tba: TbaOptions,
    #[serde(default)]
    pub eqc: EqcOptions,
    /// The integer angular momentum entering `2 pi (l + 1)`.
    #[serde(default)]
    pub l: u32,
    /// Scan range; defaults to the whole usable grid.
    #[serde(default)]
    pub theta_min: Option<f64>,
    #[serde(default)]
    pub theta_max: Option<f64>,
}

/// Lowest `n_max + 1` roots of an already solved system.
pub fn voros_spectrum_from(
    pe: &PseudoEnergy,
    n_max: usize,
    opts: &VorosOptions,
) -> Result<SpectrumTable> {
    let eqc = ModifiedEqc::new(pe, opts.l, opts.eqc)?;
    let lim = pe.grid.half_width - crate::tba::EDGE_MARGIN;
    let lo = opts.theta_min.unwrap_or(-lim);
    let hi = opts.theta_max.unwrap_or(lim);
    let roots = eqc.roots(lo, hi)?;
    if roots.len() < n_max + 1 {
        return Err(Error::InsufficientRange {
            found: roots.len(),
            wanted: n_max + 1,
        });
    }
    let rows = roots
        .into_iter()
        .take(n_max + 1)
        .enumerate()
        .map(|(n, (value, width))| SpectrumRow {
            n,
            value,
            estimator: Estimator::VorosEqc,
            bracket_width: Some(width),
        })
        .collect();
    SpectrumTable::new(Units::Theta, rows)
}

/// Solves the TBA once and returns the lowest `n_max + 1` roots `theta_n`.
pub fn solve_voros_spectrum(
    params: SpdpParams,
    n_max: usize,
    grid: ThetaGrid,
    opts: &VorosOptions,
) -> Result<SpectrumTable> {
    let pe = solve_tba_spdp(params, grid, &opts.tba)?;
    voros_spectrum_from(&pe, n_max, opts)
}

fn real_part(z: Complex64, what: &str) -> Result<f64> {
    if z.im.abs() > REALITY_TOL * z.re.abs().max(1.0) {
        return Err(Error::Domain(format!(
            "{what} has imaginary part {:e}",
            z.im
        )));
    }
    Ok(z.re)
}

/// `2 cos(B/(2 hbar)) + exp(-(i/hbar) Pi_gamma2)` for the cubic well, with
/// `Pi_gamma2` purely imaginary so that the exponential is real.
pub fn cubic_eqc_residual(b_med: f64, pi_gamma2: Complex64, hbar: f64) -> Result<f64> {
    let tunnel = real_part(
        (-Complex64::i() * pi_gamma2 / hbar).exp(),
        "exp(-i Pi/hbar)",
    )?;
    Ok(2.0 * (b_med / (2.0 * hbar)).cos() + tunnel)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EqcSign {
    Plus,
    Minus,
}

/// `cos(B/hbar) +/- (1 + exp(-(i/hbar) Pi_Gamma_hat))^{-1/2}`. The plus sign
/// belongs to regular double wells, the minus sign to the singular origin.
pub fn zinn_justin_residual(
    b_med: f64,
    pi_gamma_hat: Complex64,
    sign: EqcSign,
    hbar: f64,
) -> Result<f64> {
    let e = real_part(
        (-Complex64::i() * pi_gamma_hat / hbar).exp(),
        "exp(-i Pi/hbar)",
    )?;
    let term = if e.is_infinite() {
        0.0
    } else {
        1.0 / (1.0 + e).sqrt()
    };
    let s = match sign {
        EqcSign::Plus => 1.0,
        EqcSign::Minus => -1.0,
    };
    Ok((b_med / hbar).cos() + s * term)
}
