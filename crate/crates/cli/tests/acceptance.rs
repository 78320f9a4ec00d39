//! Acceptance criteria 1-10. Each prints one line; the binary exits non-zero
//! if any criterion fails.

use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use serde_json::json;
use voros_cli::reference;
use voros_cli::{run, CliError, RunConfig, TaskKind};
use voros_core::airy::{true_abs_spectrum, true_theta};
use voros_core::bethe::{
    hydrogen_energy, hydrogen_sum_rule, qho_energy, solve_hydrogen_bethe, solve_qho_bethe,
};
use voros_core::eqc::{
    naive_abs_spectrum, solve_voros_spectrum, EqcOptions, ModifiedEqc, VorosOptions,
};
use voros_core::oracle::{shooting_eigenvalue, BoundaryCondition, Origin};
use voros_core::potentials::{classical_mass, minimal_chamber_cycles, Potential, PotentialSpec};
use voros_core::tba::{
    fit_closed_form_shift, regularized_spectral_zeros, solve_tba_regularized, solve_tba_spdp,
    SpdpParams, TbaOptions, ThetaGrid,
};
use voros_core::wkb::{monic_gamma_factor, quantum_periods};

type Outcome = Result<Vec<Sub>, String>;

struct Sub {
    label: String,
    passed: bool,
    detail: String,
}

fn at_most(label: &str, value: f64, tol: f64) -> Sub {
    Sub {
        label: label.into(),
        passed: value <= tol,
        detail: format!("{value:.3e} (<= {tol:e})"),
    }
}

fn at_least(label: &str, value: f64, min: f64) -> Sub {
    Sub {
        label: label.into(),
        passed: value >= min,
        detail: format!("{value:.3e} (>= {min:e})"),
    }
}

fn holds(label: &str, passed: bool, detail: String) -> Sub {
    Sub {
        label: label.into(),
        passed,
        detail,
    }
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn criterion(number: usize, name: &str, budget: Duration, body: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let outcome = body();
    let elapsed = start.elapsed();
    let mut subs = match outcome {
        Ok(subs) => subs,
        Err(e) => vec![holds("computation", false, e)],
    };
    subs.push(holds(
        "runtime",
        elapsed < budget,
        format!("{:.2} s (< {} s)", elapsed.as_secs_f64(), budget.as_secs()),
    ));
    let passed = subs.iter().all(|s| s.passed);
    let parts: Vec<String> = subs
        .iter()
        .map(|s| {
            let mark = if s.passed { "ok" } else { "FAIL" };
            format!("{} {mark} {}", s.label, s.detail)
        })
        .collect();
    println!(
        "criterion {number:>2} {} {name}: {}",
        if passed { "PASS" } else { "FAIL" },
        parts.join("; ")
    );
    passed
}

fn qho_bethe() -> Outcome {
    let mut worst_root = 0.0f64;
    let mut worst_residual = 0.0f64;
    for n in 1..=3 {
        let sol = solve_qho_bethe(n, 1.0).map_err(err)?;
        let expected = reference::qho_roots(n).ok_or("missing row")?;
        worst_root = worst_root.max(max_abs_diff(&sol.roots, &expected));
        worst_residual = worst_residual.max(sol.residual);
    }
    Ok(vec![
        at_most("roots N=1..3", worst_root, 1e-12),
        at_most("residual", worst_residual, 1e-10),
    ])
}

fn hydrogen_bethe() -> Outcome {
    let mut subs = Vec::new();
    let mut worst_sum = 0.0f64;
    for n in 2..=4 {
        let sol = solve_hydrogen_bethe(n - 1, 0, 1.0).map_err(err)?;
        let expected = reference::hydrogen_roots(n).ok_or("missing row")?;
        subs.push(at_most(
            &format!("roots n={n}"),
            max_abs_diff(&sol.roots, &expected),
            1e-3,
        ));
        let (lhs, rhs) = hydrogen_sum_rule(&sol).ok_or("no sum rule")?;
        worst_sum = worst_sum.max((lhs - rhs).abs());
    }
    subs.push(at_most("sum rules", worst_sum, 1e-10));
    Ok(subs)
}

fn energies() -> Outcome {
    let mut exact = true;
    for n in 0..=5 {
        exact &= solve_qho_bethe(n, 1.0).map_err(err)?.energy == qho_energy(n, 1.0, 1.0);
        exact &= qho_energy(n, 1.0, 1.0) == n as f64 + 0.5;
    }
    for n in 1..=5 {
        exact &= solve_hydrogen_bethe(n - 1, 0, 1.0).map_err(err)?.energy == hydrogen_energy(n);
    }
    // -(1/2) psi'' + (x^2/2) psi and -(1/2) psi'' - psi/r: both in atomic units.
    let oscillator = PotentialSpec::new(
        Potential::Polynomial {
            coeffs: vec![0.0, 0.5],
        },
        1.0,
        2.0,
    )
    .map_err(err)?;
    let full = BoundaryCondition::new(Origin::FullLine);
    let mut worst_qho = 0.0f64;
    for n in 0..=5 {
        let e = shooting_eigenvalue(&oscillator, &full, n).map_err(err)?;
        worst_qho = worst_qho.max((e - qho_energy(n, 1.0, 1.0)).abs());
    }
    let mut worst_h = 0.0f64;
    for l in 0..=2u32 {
        let coulomb =
            PotentialSpec::new(Potential::Coulomb { charge: 1.0, l }, 1.0, 2.0).map_err(err)?;
        let radial = BoundaryCondition::new(Origin::Dirichlet);
        for nr in 0..=2 {
            let e = shooting_eigenvalue(&coulomb, &radial, nr).map_err(err)?;
            worst_h = worst_h.max((e - hydrogen_energy(nr + l as usize + 1)).abs());
        }
    }
    Ok(vec![
        holds("closed forms", exact, "bitwise".into()),
        at_most("oracle QHO n<=5", worst_qho, 1e-4),
        at_most("oracle hydrogen n<=5", worst_h, 1e-4),
    ])
}

fn naive_table() -> Outcome {
    let naive = naive_abs_spectrum(9).map_err(err)?.values();
    let exact = true_abs_spectrum(9).map_err(err)?.values();
    Ok(vec![
        at_most(
            "naive column",
            max_abs_diff(&naive, &reference::ABS_NAIVE),
            1e-12,
        ),
        at_most(
            "true column",
            max_abs_diff(&exact, &reference::ABS_TRUE),
            1e-4,
        ),
        at_least("gap n=0", (naive[0] - exact[0]).abs(), 5e-2),
        at_most("gap n=9", (naive[9] - exact[9]).abs(), 5e-3),
    ])
}

fn qho_periods() -> Outcome {
    let spec = PotentialSpec::harmonic();
    let periods_at = |e: f64| -> Result<Vec<f64>, String> {
        let cycle = minimal_chamber_cycles(&spec, e).map_err(err)?.remove(0);
        let p = quantum_periods(&spec, e, &cycle, 4).map_err(err)?;
        Ok(p.iter().map(|v| v.re).collect())
    };
    let cycle = minimal_chamber_cycles(&spec, 1.0).map_err(err)?.remove(0);
    let p = quantum_periods(&spec, 1.0, &cycle, 4).map_err(err)?;
    let higher = p[2..].iter().fold(0.0f64, |m, v| m.max(v.value().norm()));
    let mut worst_level = 0.0f64;
    for n in 0..=5 {
        let target = 2.0 * PI * n as f64;
        let f = |e: f64| -> Result<f64, String> {
            let v = periods_at(e)?;
            Ok(v[0] + v[1] - target)
        };
        let (mut lo, mut hi) = (2.0 * n as f64 + 0.5, 2.0 * n as f64 + 1.5);
        let mut flo = f(lo)?;
        while hi - lo > 1e-12 {
            let mid = 0.5 * (lo + hi);
            let fm = f(mid)?;
            if (fm < 0.0) == (flo < 0.0) {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
        }
        worst_level = worst_level.max((0.5 * (lo + hi) - (2 * n + 1) as f64).abs());
    }
    Ok(vec![
        at_most(
            "Pi_0 - pi",
            (p[0].value().re - PI).abs().max(p[0].value().im.abs()),
            1e-8,
        ),
        at_most("Pi_2..4", higher, 1e-8),
        at_most("levels n<=5", worst_level, 1e-8),
    ])
}

fn gamma_structure() -> Outcome {
    let mut zero = true;
    for n in 2..=8 {
        zero &= monic_gamma_factor(1, n, 1.0, 1.0).map_err(err)? == 0.0;
    }
    let quartic = PotentialSpec::unit(Potential::Monic { m: 2 }).map_err(err)?;
    let cycle = minimal_chamber_cycles(&quartic, 1.0)
        .map_err(err)?
        .remove(0);
    let mass = classical_mass(&quartic, &cycle, 1.0).map_err(err)?;
    let factor = monic_gamma_factor(2, 0, 1.0, 1.0).map_err(err)?;
    Ok(vec![
        holds("M=1 n>=2 vanishes", zero, "exact zero".into()),
        at_most("M=2 n=0 vs mass", (2.0 * factor - mass).abs(), 1e-8),
    ])
}

fn tba_pole() -> Outcome {
    let opts = TbaOptions::default();
    let start = Instant::now();
    let pe = solve_tba_spdp(SpdpParams::default(), ThetaGrid::production(), &opts).map_err(err)?;
    let production = start.elapsed();
    let eps_hat = pe
        .grid
        .nodes()
        .iter()
        .zip(&pe.values[1])
        .filter(|(t, _)| t.abs() <= 5.0)
        .fold(0.0f64, |m, (_, e)| m.max(e.abs()));
    let last = pe.grid.len - 1;
    let ratio = pe.values[0][last] / pe.grid.half_width.exp();
    let fine_grid = ThetaGrid::new(14.0, 8192).map_err(err)?;
    let fine = solve_tba_spdp(SpdpParams::default(), fine_grid, &opts).map_err(err)?;
    Ok(vec![
        at_most("final update", pe.report.final_update, 1e-10),
        at_most(
            "fixed-point residual",
            pe.fixed_point_residual().map_err(err)?,
            1e-10,
        ),
        holds(
            "max|eps_hat| O(1e-4)",
            (1e-5..=1e-3).contains(&eps_hat),
            format!("{eps_hat:.3e} (in [1e-5, 1e-3])"),
        ),
        at_most("ratio - 4/3", (ratio - 4.0 / 3.0).abs(), 1e-3),
        at_most(
            "grid doubling eps_1(0)",
            (fine.value_at(0, 0.0) - pe.value_at(0, 0.0)).abs(),
            1e-6,
        ),
        holds(
            "production solve",
            production < Duration::from_secs(180),
            format!("{:.2} s (< 180 s)", production.as_secs_f64()),
        ),
    ])
}

fn voros() -> Outcome {
    let opts = VorosOptions::default();
    let grid = ThetaGrid::production();
    let table = solve_voros_spectrum(SpdpParams::default(), 7, grid, &opts).map_err(err)?;
    let computed = table.values();
    let pe = solve_tba_spdp(SpdpParams::default(), grid, &opts.tba).map_err(err)?;
    let count = ModifiedEqc::new(&pe, 0, EqcOptions::default())
        .map_err(err)?
        .roots(0.0, 3.0)
        .map_err(err)?
        .len();
    let mut subs = vec![
        at_most(
            "computed column",
            max_abs_diff(&computed, &reference::VOROS_COMPUTED),
            5e-3,
        ),
        at_most(
            "true column",
            max_abs_diff(&computed, &reference::VOROS_TRUE),
            2e-2,
        ),
    ];
    let worst: Vec<String> = computed
        .iter()
        .zip(&reference::VOROS_COMPUTED)
        .enumerate()
        .filter(|(_, (c, r))| (*c - *r).abs() > 5e-3)
        .map(|(n, (c, r))| format!("n={n} {c:.5} vs {r}"))
        .collect();
    subs.push(holds(
        "rows outside 5e-3",
        worst.is_empty(),
        format!("[{}]", worst.join(", ")),
    ));
    subs.push(holds(
        "roots on [0,3]",
        count == 8,
        format!("{count} (== 8)"),
    ));
    Ok(subs)
}

fn regularized() -> Outcome {
    let sol =
        solve_tba_regularized(ThetaGrid::production(), &TbaOptions::default()).map_err(err)?;
    let fit = fit_closed_form_shift(&sol).map_err(err)?;
    let zeros = regularized_spectral_zeros(&sol, -1.0);
    let mut worst = 0.0f64;
    let mut compared = 0;
    for (n, z) in zeros.iter().enumerate().filter(|(_, z)| **z <= 4.0) {
        worst = worst.max((z - true_theta(n).map_err(err)?).abs());
        compared += 1;
    }
    Ok(vec![
        at_most("shift-fit sup", fit.sup_error, 1e-3),
        holds(
            "zeros compared",
            compared >= 8,
            format!("{compared} (>= 8)"),
        ),
        at_most("zeros vs Airy", worst, 1e-3),
    ])
}

fn read_all(dir: &Path) -> Result<Vec<(String, Vec<u8>)>, String> {
    let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .map_err(err)?
        .map(|e| {
            let e = e.map_err(err)?;
            let name = e.file_name().to_string_lossy().into_owned();
            Ok((name, fs::read(e.path()).map_err(err)?))
        })
        .collect::<Result<_, String>>()?;
    files.sort();
    Ok(files)
}

fn determinism() -> Outcome {
    let root = tempfile::tempdir().map_err(err)?;
    let config = RunConfig::new(TaskKind::ReproduceAll, json!({}));
    let mut listings = Vec::new();
    for name in ["first", "second"] {
        let dir = root.path().join(name);
        match run(&config, Some(&dir)) {
            Ok(_) | Err(CliError::ChecksFailed { .. }) => {}
            Err(e) => return Err(e.to_string()),
        }
        listings.push(read_all(&dir)?);
    }
    let names: Vec<&str> = listings[0].iter().map(|(n, _)| n.as_str()).collect();
    let identical = listings[0] == listings[1];
    Ok(vec![
        holds(
            "artifacts",
            names.len() == 8,
            format!("{} files ({})", names.len(), names.join(" ")),
        ),
        holds("byte-identical", identical, format!("{identical}")),
    ])
}

fn main() -> ExitCode {
    let secs = Duration::from_secs;
    let results = [
        criterion(1, "QHO Bethe roots", secs(1), qho_bethe),
        criterion(2, "hydrogen Bethe roots", secs(1), hydrogen_bethe),
        criterion(3, "hydrogen/QHO energies", secs(30), energies),
        criterion(4, "naive |x| table", secs(5), naive_table),
        criterion(5, "QHO quantum periods", secs(10), qho_periods),
        criterion(6, "monic Gamma structure", secs(5), gamma_structure),
        criterion(7, "single+double pole TBA", secs(180), tba_pole),
        criterion(8, "Voros spectrum", secs(300), voros),
        criterion(9, "regularized TBA", secs(120), regularized),
        criterion(10, "determinism", secs(600), determinism),
    ];
    let failed = results.iter().filter(|p| !**p).count();
    println!(
        "acceptance: {} passed, {failed} failed",
        results.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
