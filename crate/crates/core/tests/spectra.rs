//! Spectra of `|x|` from the naive condition, the Voros EQC, the Airy zeros
//! and shooting.

use proptest::prelude::*;
use voros_core::airy::{true_abs_spectrum, true_theta};
use voros_core::eqc::{naive_abs_spectrum, solve_voros_spectrum, VorosOptions};
use voros_core::oracle::{parity_split_spectrum, shoot, BoundaryCondition, Origin, BRACKET_TOL};
use voros_core::potentials::{Potential, PotentialSpec};
use voros_core::tba::{SpdpParams, ThetaGrid};

fn abs_spec() -> PotentialSpec {
    PotentialSpec::unit(Potential::AbsLinear).unwrap()
}

#[test]
fn naive_fails_low_and_matches_high() {
    let naive = naive_abs_spectrum(9).unwrap().values();
    let exact = true_abs_spectrum(9).unwrap().values();
    assert!((naive[0] - exact[0]).abs() > 5e-2);
    assert!((naive[9] - exact[9]).abs() < 5e-3);
    for n in 5..=9 {
        assert!((naive[n] - exact[n]).abs() < 1e-2, "n = {n}");
    }
}

#[test]
fn shooting_matches_airy() {
    let exact = true_abs_spectrum(9).unwrap();
    let split = parity_split_spectrum(&abs_spec(), 9).unwrap();
    let full = BoundaryCondition::new(Origin::FullLine);
    for n in 0..=9 {
        let e = exact.rows[n].value;
        assert!((split.rows[n].value - e).abs() <= 1e-8, "n = {n}");
        let level = shoot(&abs_spec(), &full, n, BRACKET_TOL).unwrap();
        assert!((level.energy - e).abs() <= 1e-3, "n = {n}");
        assert_eq!(level.nodes, n);
    }
}

#[test]
fn shooting_is_stable_under_domain_growth() {
    let spec = abs_spec();
    for n in [0, 4, 9] {
        let auto = shoot(
            &spec,
            &BoundaryCondition::new(Origin::FullLine),
            n,
            BRACKET_TOL,
        )
        .unwrap();
        let grown = BoundaryCondition::with_radius(Origin::FullLine, 1.5 * auto.domain.1);
        let wide = shoot(&spec, &grown, n, BRACKET_TOL).unwrap();
        assert!((wide.energy - auto.energy).abs() <= 1e-8, "n = {n}");
    }
}

#[test]
fn voros_spectrum_large_n_and_grid_stability() {
    let opts = VorosOptions::default();
    let coarse = solve_voros_spectrum(SpdpParams::default(), 7, ThetaGrid::production(), &opts)
        .unwrap()
        .values();
    let fine_grid = ThetaGrid::new(14.0, 8192).unwrap();
    let fine = solve_voros_spectrum(SpdpParams::default(), 7, fine_grid, &opts)
        .unwrap()
        .values();
    for n in 0..=7 {
        assert!((coarse[n] - fine[n]).abs() < 1e-6, "n = {n}");
    }
    for (n, theta) in coarse.iter().enumerate().skip(3) {
        assert!((theta - true_theta(n).unwrap()).abs() <= 5e-3, "n = {n}");
    }
    for (n, theta) in coarse.iter().enumerate().skip(1) {
        assert!((theta - true_theta(n).unwrap()).abs() <= 2e-2, "n = {n}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn naive_levels_follow_closed_form(n in 0usize..40) {
        let naive = naive_abs_spectrum(n).unwrap();
        let expected = (0.75 * std::f64::consts::PI * (n as f64 + 0.5)).powf(2.0 / 3.0);
        prop_assert!((naive.rows[n].value - expected).abs() <= 1e-12 * expected);
    }

    #[test]
    fn true_theta_scales_levels(n in 0usize..20) {
        let e = true_abs_spectrum(n).unwrap().rows[n].value;
        prop_assert!((true_theta(n).unwrap() - 1.5 * e.ln()).abs() < 1e-14);
    }
}
