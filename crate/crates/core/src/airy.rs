//! Airy functions, their zeros, the exact `|x|` spectrum and the Airy closed
//! forms solving the regularized TBA system.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::spectrum::{Estimator, SpectrumTable, Units};

/// `Ai(0) = 3^{-2/3}/Gamma(2/3)`.
pub const AI0: f64 = 0.355_028_053_887_817_239;
/// `-Ai'(0) = 3^{-1/3}/Gamma(1/3)`.
pub const AIP0: f64 = 0.258_819_403_792_806_798;

/// Largest `|x|` accepted by [`airy_ai`] and [`airy_ai_complex`].
pub const MAX_ARGUMENT: f64 = 100.0;

const SERIES_RADIUS: f64 = 2.0;
const ASYMPTOTIC_RADIUS: f64 = 9.0;
const MAX_STEP: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AiryMethod {
    Series,
    Asymptotic,
    TaylorStep,
}

/// `Ai` and `Ai'` at a real point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AiryValue {
    pub x: f64,
    pub ai: f64,
    pub ai_prime: f64,
    pub method: AiryMethod,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AiryKind {
    Ai,
    AiPrime,
}

fn maclaurin(z: Complex64) -> (Complex64, Complex64) {
    let z3 = z * z * z;
    let scale = z.norm().max(1.0);
    let mut f = Complex64::new(1.0, 0.0);
    let mut g = z;
    let mut fp = Complex64::new(0.0, 0.0);
    let mut gp = Complex64::new(1.0, 0.0);
    let mut tf = f;
    let mut tg = g;
    let mut tfp = z * z * 0.5;
    let mut tgp = gp;
    for k in 1..200 {
        let k3 = 3.0 * k as f64;
        tf *= z3 / ((k3 - 1.0) * k3);
        tg *= z3 / (k3 * (k3 + 1.0));
        if k > 1 {
            tfp *= z3 / ((k3 - 3.0) * (k3 - 1.0));
        }
        tgp *= z3 / ((k3 - 2.0) * k3);
        f += tf;
        g += tg;
        fp += tfp;
        gp += tgp;
        let size = tf.norm() + tg.norm() + tfp.norm() + tgp.norm();
        if size <= 1e-18 * scale && k > 3 {
            break;
        }
    }
    (AI0 * f - AIP0 * g, AI0 * fp - AIP0 * gp)
}

/// Asymptotic expansion, valid for `|arg z| < pi`, truncated at its
/// smallest term.
fn asymptotic(z: Complex64) -> (Complex64, Complex64) {
    let zeta = z.powf(1.5) * (2.0 / 3.0);
    let quarter = z.powf(0.25);
    let pref = (-zeta).exp() / (2.0 * PI.sqrt());
    let mut u = 1.0f64;
    let mut su = Complex64::new(1.0, 0.0);
    let mut sv = Complex64::new(1.0, 0.0);
    let mut power = Complex64::new(1.0, 0.0);
    let mut last = f64::INFINITY;
    for k in 1..60 {
        let kf = k as f64;
        u *= (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0)
            / ((2.0 * kf - 1.0) * 216.0 * kf);
        let v = -u * (6.0 * kf + 1.0) / (6.0 * kf - 1.0);
        power *= -1.0 / zeta;
        let term = power * u;
        let size = term.norm();
        if size >= last {
            break;
        }
        last = size;
        su += term;
        sv += power * v;
        if size < 1e-17 {
            break;
        }
    }
    (pref / quarter * su, -pref * quarter * sv)
}

/// Integrates `y'' = c t y` in the real variable `t` from `t0` to `t1` by
/// Taylor series steps, where `y(t) = Ai(e^{i alpha} t)` and `c = e^{3 i alpha}`.
fn ray_steps(
    c: Complex64,
    t0: f64,
    mut y: Complex64,
    mut dy: Complex64,
    t1: f64,
) -> (Complex64, Complex64) {
    let span = t1 - t0;
    let reach = t0.abs().max(t1.abs()).max(1.0);
    let step = MAX_STEP.min(1.0 / reach.sqrt());
    let steps = (span.abs() / step).ceil().max(1.0) as usize;
    let h = span / steps as f64;
    let mut t = t0;
    let mut a = [Complex64::new(0.0, 0.0); 96];
    for _ in 0..steps {
        a[0] = y;
        a[1] = dy;
        a[2] = c * t * y * 0.5;
        let mut value = y + dy * h + a[2] * h * h;
        let mut deriv = dy + a[2] * (2.0 * h);
        let mut hk = h * h;
        let size = y.norm() + dy.norm();
        for k in 1..93 {
            let next = c * (a[k] * t + a[k - 1]) / ((k + 2) as f64 * (k + 1) as f64);
            a[k + 2] = next;
            deriv += next * ((k + 2) as f64 * hk);
            hk *= h;
            value += next * hk;
            if k > 6 && next.norm() * hk.abs() < 1e-19 * size {
                break;
            }
        }
        y = value;
        dy = deriv;
        t += h;
    }
    (y, dy)
}

/// `Ai` and `Ai'` at complex `z`, with the method used.
fn evaluate(z: Complex64) -> (Complex64, Complex64, AiryMethod) {
    let r = z.norm();
    if r <= SERIES_RADIUS {
        let (a, b) = maclaurin(z);
        return (a, b, AiryMethod::Series);
    }
    let alpha = z.arg();
    let dir = Complex64::from_polar(1.0, alpha);
    let c = Complex64::from_polar(1.0, 3.0 * alpha);
    if alpha.abs() >= PI / 3.0 - 1e-12 {
        // Ai does not decay along this ray: step outward from the series disc.
        let (a, b) = maclaurin(dir * SERIES_RADIUS);
        let (y, dy) = ray_steps(c, SERIES_RADIUS, a, dir * b, r);
        (y, dy / dir, AiryMethod::TaylorStep)
    } else if r >= ASYMPTOTIC_RADIUS {
        let (a, b) = asymptotic(z);
        (a, b, AiryMethod::Asymptotic)
    } else {
        // Ai decays outward here, so step inward from the asymptotic region.
        let (a, b) = asymptotic(dir * ASYMPTOTIC_RADIUS);
        let (y, dy) = ray_steps(c, ASYMPTOTIC_RADIUS, a, dir * b, r);
        (y, dy / dir, AiryMethod::TaylorStep)
    }
}

/// `Ai(x)` and `Ai'(x)` for real `|x| <= 100`.
pub fn airy_ai(x: f64) -> Result<AiryValue> {
    if !x.is_finite() || x.abs() > MAX_ARGUMENT {
        return Err(Error::Domain(format!(
            "Airy argument {x} outside [-{MAX_ARGUMENT}, {MAX_ARGUMENT}]"
        )));
    }
    let (a, b, method) = evaluate(Complex64::new(x, 0.0));
    Ok(AiryValue {
        x,
        ai: a.re,
        ai_prime: b.re,
        method,
    })
}

/// `Ai(z)` and `Ai'(z)` for complex `|z| <= 100`.
pub fn airy_ai_complex(z: Complex64) -> Result<(Complex64, Complex64)> {
    let r = z.norm();
    if !r.is_finite() || r > MAX_ARGUMENT {
        return Err(Error::Domain(format!(
            "Airy argument {z} outside |z| <= {MAX_ARGUMENT}"
        )));
    }
    let (a, b, _) = evaluate(z);
    Ok((a, b))
}

/// The first `count` zeros of `Ai` or `Ai'`, in decreasing order.
pub fn airy_zeros(kind: AiryKind, count: usize) -> Result<Vec<f64>> {
    let mut zeros = Vec::with_capacity(count);
    for k in 1..=count {
        let offset = match kind {
            AiryKind::Ai => 4.0 * k as f64 - 1.0,
            AiryKind::AiPrime => 4.0 * k as f64 - 3.0,
        };
        let mut x = -(3.0 * PI * offset / 8.0).powf(2.0 / 3.0);
        let mut converged = false;
        for _ in 0..60 {
            let v = airy_ai(x)?;
            let step = match kind {
                AiryKind::Ai => v.ai / v.ai_prime,
                AiryKind::AiPrime => v.ai_prime / (x * v.ai),
            };
            x -= step;
            if step.abs() <= 1e-15 * x.abs() {
                converged = true;
                break;
            }
        }
        let v = airy_ai(x)?;
        let residual = match kind {
            AiryKind::Ai => v.ai,
            AiryKind::AiPrime => v.ai_prime,
        };
        if !converged && residual.abs() > 1e-12 {
            return Err(Error::NonConvergence {
                iterations: 60,
                residual: residual.abs(),
            });
        }
        zeros.push(x);
    }
    Ok(zeros)
}

/// Exact levels of `-psi'' + |x| psi = E psi`: `-a'_k` for even states and
/// `-a_k` for odd ones.
pub fn true_abs_spectrum(n_max: usize) -> Result<SpectrumTable> {
    let pairs = n_max / 2 + 1;
    let even = airy_zeros(AiryKind::AiPrime, pairs)?;
    let odd = airy_zeros(AiryKind::Ai, pairs)?;
    let values = (0..=n_max).map(|n| {
        if n % 2 == 0 {
            -even[n / 2]
        } else {
            -odd[n / 2]
        }
    });
    SpectrumTable::from_values(Units::Energy, Estimator::AiryZero, values)
}

/// `(3/2) ln E_n`: the level `E_n` at `hbar = 1` mapped to the `theta` at
/// which the `E = 1` problem has a bound state.
pub fn true_theta(n: usize) -> Result<f64> {
    let spectrum = true_abs_spectrum(n)?;
    Ok(1.5 * spectrum.rows[n].value.ln())
}

/// `e^{-A}` and `B` from the Airy closed forms at `z = e^{2 theta/3}`:
/// `e^{-A} = -2 pi d/dz Ai(z)^2`, `B = -2 pi d/dz [Ai(w z) Ai(z/w)]` with
/// `w = e^{i pi/3}`.
pub fn airy_closed_form_ab(theta: f64) -> Result<(f64, f64)> {
    let z = (2.0 * theta / 3.0).exp();
    if z > MAX_ARGUMENT {
        return Err(Error::Domain(format!(
            "z = {z} exceeds the Airy range at theta = {theta}"
        )));
    }
    let v = airy_ai(z)?;
    let exp_minus_a = -4.0 * PI * v.ai * v.ai_prime;
    let w = Complex64::from_polar(1.0, PI / 3.0);
    let (a, ap) = airy_ai_complex(w * z)?;
    // Ai(z/w) is the conjugate of Ai(w z) for real z.
    let b = -4.0 * PI * (w * ap * a.conj()).re;
    Ok((exp_minus_a, b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn values_at_origin_and_one() {
        let v = airy_ai(0.0).unwrap();
        assert!(close(v.ai, 0.355_028_053_887_817_239, 1e-15));
        assert!(close(v.ai_prime, -0.258_819_403_792_806_798, 1e-15));
        let v = airy_ai(1.0).unwrap();
        assert!(close(v.ai, 0.135_292_416_312_881_416, 1e-15));
        assert!(close(v.ai_prime, -0.159_147_441_296_793_213, 1e-15));
        assert_eq!(v.method, AiryMethod::Series);
    }

    #[test]
    fn values_across_regimes() {
        let cases = [
            (-5.0, 0.350_761_009_024_114_320, 0.327_192_818_554_443_137),
            (-9.5, 0.319_103_247_719_128_201, -0.108_095_318_811_871_239),
            (
                3.0,
                0.006_591_139_357_460_719_14,
                -0.011_912_976_705_951_318_5,
            ),
            (
                8.0,
                4.692_207_616_099_231_63e-8,
                -1.341_439_297_906_786_57e-7,
            ),
        ];
        for (x, ai, aip) in cases {
            let v = airy_ai(x).unwrap();
            assert!(close(v.ai, ai, 1e-12), "Ai({x}) = {}", v.ai);
            assert!(close(v.ai_prime, aip, 1e-12), "Ai'({x}) = {}", v.ai_prime);
        }
        let far = [
            (-15.0, 0.278_217_490_870_828_930, 0.272_374_204_308_642_021),
            (-29.0, -0.228_760_193_539_378_409, 0.441_353_141_146_263_337),
        ];
        for (x, ai, aip) in far {
            let v = airy_ai(x).unwrap();
            assert_eq!(v.method, AiryMethod::TaylorStep);
            assert!(close(v.ai, ai, 1e-10) && close(v.ai_prime, aip, 1e-10));
        }
    }

    #[test]
    fn domain_limits() {
        assert!(matches!(airy_ai(101.0), Err(Error::Domain(_))));
        assert!(matches!(airy_ai(f64::NAN), Err(Error::Domain(_))));
    }

    #[test]
    fn complex_values() {
        let w = Complex64::from_polar(1.0, PI / 3.0);
        let (a, ap) = airy_ai_complex(w).unwrap();
        assert!(
            (a - Complex64::new(0.178_922_411_438_897_528, -0.205_905_317_727_968_780)).norm()
                < 1e-14
        );
        assert!(
            (ap - Complex64::new(-0.259_046_312_311_590_567, 0.143_694_251_985_762_309)).norm()
                < 1e-14
        );
        // Stepping along the ray agrees with the asymptotic expansion far out.
        let z = w * 40.0;
        let stepped = airy_ai_complex(z).unwrap();
        let direct = asymptotic(z);
        assert!((stepped.0 - direct.0).norm() < 1e-11);
        assert!((stepped.1 - direct.1).norm() < 1e-10);
        // Continuity across each method switch on the real axis.
        for x in [-SERIES_RADIUS, SERIES_RADIUS, ASYMPTOTIC_RADIUS] {
            let a = airy_ai(x - 1e-12).unwrap();
            let b = airy_ai(x + 1e-12).unwrap();
            assert!(
                (a.ai - b.ai).abs() < 1e-11 && (a.ai_prime - b.ai_prime).abs() < 1e-11,
                "{x}: {a:?} {b:?}"
            );
        }
    }

    #[test]
    fn first_zeros() {
        let ai = airy_zeros(AiryKind::Ai, 10).unwrap();
        let expected = [
            2.338_107_410_459_767_04,
            4.087_949_444_130_970_62,
            5.520_559_828_095_551_06,
            6.786_708_090_071_759_00,
            7.944_133_587_120_853_12,
            9.022_650_853_340_980_38,
            10.040_174_341_558_085_9,
            11.008_524_303_733_262_9,
            11.936_015_563_236_262_5,
            12.828_776_752_865_757_2,
        ];
        for (z, e) in ai.iter().zip(expected) {
            assert!(close(*z, -e, 1e-11), "{z} vs {e}");
            assert!(airy_ai(*z).unwrap().ai.abs() <= 1e-12);
        }
        let aip = airy_zeros(AiryKind::AiPrime, 10).unwrap();
        let expected = [
            1.018_792_971_647_471_09,
            3.248_197_582_179_836_54,
            4.820_099_211_178_735_64,
            6.163_307_355_639_486_55,
            7.372_177_255_047_770_18,
            8.488_486_734_019_722_13,
            9.535_449_052_433_547_47,
            10.527_660_396_957_407_3,
            11.475_056_633_480_245_3,
            12.384_788_371_845_747_3,
        ];
        for (z, e) in aip.iter().zip(expected) {
            assert!(close(*z, -e, 1e-11), "{z} vs {e}");
            assert!(airy_ai(*z).unwrap().ai_prime.abs() <= 1e-12);
        }
        // Interlacing |a'_1| < |a_1| < |a'_2| < ...
        for k in 0..10 {
            assert!(-aip[k] < -ai[k]);
            if k + 1 < 10 {
                assert!(-ai[k] < -aip[k + 1]);
            }
        }
    }

    #[test]
    fn spectrum_examples() {
        let t = true_abs_spectrum(9).unwrap();
        assert!(close(t.get(0).unwrap(), 1.01879, 1e-5));
        assert!(close(t.get(4).unwrap(), 4.8201, 1e-4));
        assert!(close(t.get(9).unwrap(), 7.94413, 1e-5));
        assert!(close(true_theta(0).unwrap(), 0.02792, 1e-4));
        assert!(close(true_theta(3).unwrap(), 2.11207, 1e-4));
        assert!(close(true_theta(7).unwrap(), 2.872_449_0, 1e-6));
    }

    #[test]
    fn true_theta_increasing_concave() {
        let th: Vec<f64> = (0..=9).map(|n| true_theta(n).unwrap()).collect();
        for w in th.windows(2) {
            assert!(w[1] > w[0]);
        }
        for w in th.windows(3) {
            assert!(w[2] - 2.0 * w[1] + w[0] < 0.0);
        }
    }

    #[test]
    fn closed_forms() {
        let (ea, b) = airy_closed_form_ab(0.0).unwrap();
        assert!(close(ea, 0.270_572_078_564_012_272, 1e-13));
        assert!(close(b, 0.176_444_147_315_666_992, 1e-13));
        let (_, b) = airy_closed_form_ab(-3.0).unwrap();
        assert!(close(b, 0.476_610_428_715_061_006, 1e-12));
        let (_, b) = airy_closed_form_ab(2.0).unwrap();
        assert!(close(b, 0.033_221_952_885_094_744_9, 1e-12));
        let (ea, b) = airy_closed_form_ab(-60.0).unwrap();
        assert!(close(ea, 2.0 / 3f64.sqrt(), 1e-12) && close(b, 1.0 / 3f64.sqrt(), 1e-12));
        let (ea, _) = airy_closed_form_ab(6.5).unwrap();
        assert!((0.0..1e-100).contains(&ea));
        assert!(airy_closed_form_ab(7.5).is_err());
    }

    proptest! {
        #[test]
        fn ode_residual(x in -10.0f64..10.0) {
            // Five-point derivative of Ai' against x Ai.
            let h = 3e-3;
            let d = |t: f64| airy_ai(t).unwrap().ai_prime;
            let second = (-d(x + 2.0 * h) + 8.0 * d(x + h) - 8.0 * d(x - h) + d(x - 2.0 * h)) / (12.0 * h);
            let xa = x * airy_ai(x).unwrap().ai;
            prop_assert!((second - xa).abs() <= 1e-9 * (1.0 + xa.abs()));
        }

        #[test]
        fn ode_residual_wide(x in -30.0f64..30.0) {
            let h = 1e-3;
            let a = airy_ai(x - h).unwrap().ai;
            let b = airy_ai(x).unwrap().ai;
            let c = airy_ai(x + h).unwrap().ai;
            let second = (a - 2.0 * b + c) / (h * h);
            prop_assert!((second - x * b).abs() <= 1e-5 * (1.0 + (x * b).abs()));
        }

        #[test]
        fn derivative_consistent(x in -20.0f64..20.0) {
            let h = 1e-5;
            let d = (airy_ai(x + h).unwrap().ai - airy_ai(x - h).unwrap().ai) / (2.0 * h);
            let v = airy_ai(x).unwrap();
            prop_assert!((d - v.ai_prime).abs() <= 1e-8 * (1.0 + v.ai_prime.abs()));
        }

        #[test]
        fn closed_form_positive(theta in -10.0f64..5.5) {
            let (ea, b) = airy_closed_form_ab(theta).unwrap();
            prop_assert!(ea > 0.0);
            prop_assert!(b > 0.0);
        }
    }
}
