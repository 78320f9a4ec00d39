//! Task runners. Each writes its artifacts through an [`ArtifactWriter`].

use serde::Serialize;
use voros_core::airy::{airy_zeros, true_abs_spectrum, true_theta};
use voros_core::bethe::{solve_hydrogen_bethe, solve_qho_bethe, BetheSolution};
use voros_core::eqc::{
    naive_abs_spectrum, voros_spectrum_from, EqcOptions, ModifiedEqc, VorosOptions,
};
use voros_core::oracle::shoot;
use voros_core::oracle::BRACKET_TOL;
use voros_core::potentials::minimal_chamber_cycles;
use voros_core::tba::{
    solve_tba_spdp, MedianCurve, PseudoEnergy, SpdpParams, TbaOptions, ThetaGrid,
};
use voros_core::wkb::quantum_periods;

use crate::config::{
    AiryParams, BetheKind, BetheParams, NaiveParams, ReproduceParams, SchrodingerParams, Task,
    TbaParams, VorosParams, WkbParams,
};
use crate::output::{emit_curve, ArtifactWriter, Cell};
use crate::reference;
use crate::CliError;

/// One named pass/fail comparison.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub tolerance: f64,
}

impl Check {
    fn at_most(name: &str, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.to_string(),
            passed: value <= tolerance,
            value,
            tolerance,
        }
    }

    fn equal(name: &str, value: usize, wanted: usize) -> Self {
        Self {
            name: name.to_string(),
            passed: value == wanted,
            value: value as f64,
            tolerance: wanted as f64,
        }
    }
}

/// Checks produced by the task, if it runs any.
pub type Checks = Option<Vec<Check>>;

pub fn run_task(task: &Task, out: &mut ArtifactWriter) -> Result<Checks, CliError> {
    match task {
        Task::Bethe(p) => bethe(p, out).map(|_| None),
        Task::WkbPeriod(p) => wkb_period(p, out).map(|_| None),
        Task::AiryZeros(p) => airy(p, out).map(|_| None),
        Task::TbaSolve(p) => tba_solve(p, out).map(|_| None),
        Task::Voros(p) => voros(p, out).map(|_| None),
        Task::NaiveSpectrum(p) => naive(p, out).map(|_| None),
        Task::Schrodinger(p) => schrodinger(p, out).map(|_| None),
        Task::ReproduceAll(p) => reproduce_all(p, out).map(Some),
    }
}

fn solve_bethe(p: &BetheParams) -> Result<BetheSolution, CliError> {
    Ok(match p.problem {
        BetheKind::Qho => solve_qho_bethe(p.n, p.scale)?,
        BetheKind::Hydrogen => solve_hydrogen_bethe(p.n, p.l, p.scale)?,
    })
}

fn bethe(p: &BetheParams, out: &mut ArtifactWriter) -> Result<(), CliError> {
    let sol = solve_bethe(p)?;
    out.json("bethe.json", &sol)?;
    Ok(())
}

fn wkb_period(p: &WkbParams, out: &mut ArtifactWriter) -> Result<(), CliError> {
    let cycles = minimal_chamber_cycles(&p.potential, p.energy)?;
    let mut rows = Vec::new();
    for cycle in &cycles {
        for v in quantum_periods(&p.potential, p.energy, cycle, p.order)? {
            rows.push(vec![
                Cell::from(cycle.label.as_str()),
                Cell::from(v.order),
                Cell::from(v.re),
                Cell::from(v.im),
                Cell::from(v.error),
            ]);
        }
    }
    out.csv(
        "wkb_periods.csv",
        &["cycle", "order", "re", "im", "error"],
        &rows,
    )?;
    Ok(())
}

fn airy(p: &AiryParams, out: &mut ArtifactWriter) -> Result<(), CliError> {
    let zeros = airy_zeros(p.kind, p.count)?;
    let rows: Vec<Vec<Cell>> = zeros
        .iter()
        .enumerate()
        .map(|(k, z)| vec![Cell::from(k + 1), Cell::from(*z)])
        .collect();
    out.csv("airy_zeros.csv", &["k", "zero"], &rows)?;
    Ok(())
}

#[derive(Serialize)]
struct TbaReport<'a> {
    labels: &'a [String],
    masses: &'a [f64],
    iterations: usize,
    final_update: f64,
    fixed_point_residual: f64,
    history: &'a [f64],
}

fn solve_tba(
    potential: SpdpParams,
    grid: ThetaGrid,
    options: &TbaOptions,
) -> Result<PseudoEnergy, CliError> {
    Ok(solve_tba_spdp(potential, grid, options)?)
}

fn write_tba(pe: &PseudoEnergy, out: &mut ArtifactWriter) -> Result<MedianCurve, CliError> {
    let nodes = pe.grid.nodes();
    let rows: Vec<Vec<f64>> = nodes
        .iter()
        .enumerate()
        .map(|(i, &t)| vec![t, pe.values[0][i], pe.values[1][i]])
        .collect();
    emit_curve(
        out,
        "pseudo_energies",
        &["theta", "eps_1", "eps_hat"],
        &rows,
    )?;
    let curve = MedianCurve::new(pe)?;
    let rows: Vec<Vec<f64>> = curve
        .samples()
        .into_iter()
        .map(|(t, b)| vec![t, b])
        .collect();
    emit_curve(out, "median_period", &["theta", "b_med"], &rows)?;
    Ok(curve)
}

fn tba_solve(p: &TbaParams, out: &mut ArtifactWriter) -> Result<(), CliError> {
    let pe = solve_tba(p.potential, p.grid.theta_grid()?, &p.options)?;
    write_tba(&pe, out)?;
    let report = TbaReport {
        labels: &pe.labels,
        masses: &pe.masses,
        iterations: pe.report.iterations,
        final_update: pe.report.final_update,
        fixed_point_residual: pe.fixed_point_residual()?,
        history: &pe.report.history,
    };
    out.json("tba_report.json", &report)?;
    Ok(())
}

fn voros_rows(
    pe: &PseudoEnergy,
    n_max: usize,
    opts: &VorosOptions,
) -> Result<Vec<(f64, f64)>, CliError> {
    let table = voros_spectrum_from(pe, n_max, opts)?;
    table
        .rows
        .iter()
        .map(|r| Ok((r.value, true_theta(r.n)?)))
        .collect()
}

fn write_voros(rows: &[(f64, f64)], out: &mut ArtifactWriter) -> Result<(), CliError> {
    let cells: Vec<Vec<Cell>> = rows
        .iter()
        .enumerate()
        .map(|(n, &(c, t))| {
            vec![
                Cell::from(n),
                Cell::from(c),
                Cell::from(t),
                Cell::from((c - t).abs()),
            ]
        })
        .collect();
    out.csv(
        "voros_spectrum.csv",
        &["n", "theta_computed", "theta_true", "abs_error"],
        &cells,
    )?;
    Ok(())
}

fn voros(p: &VorosParams, out: &mut ArtifactWriter) -> Result<(), CliError> {
    let pe = solve_tba(p.potential, p.grid.theta_grid()?, &p.options)?;
    let rows = voros_rows(&pe, p.n_max, &p.voros_options())?;
    write_voros(&rows, out)
}

fn naive_rows(n_max: usize) -> Result<Vec<(f64, f64)>, CliError> {
    let naive = naive_abs_spectrum(n_max)?;
    let exact = true_abs_spectrum(n_max)?;
    Ok(naive.values().into_iter().zip(exact.values()).collect())
}

fn naive(p: &NaiveParams, out: &mut ArtifactWriter) -> Result<(), CliError> {
    write_naive(&naive_rows(p.n_max)?, out)
}

fn write_naive(rows: &[(f64, f64)], out: &mut ArtifactWriter) -> Result<(), CliError> {
    let cells: Vec<Vec<Cell>> = rows
        .iter()
        .enumerate()
        .map(|(n, &(a, b))| vec![Cell::from(n), Cell::from(a), Cell::from(b)])
        .collect();
    out.csv("naive_spectrum.csv", &["n", "naive", "true"], &cells)?;
    Ok(())
}

fn schrodinger(p: &SchrodingerParams, out: &mut ArtifactWriter) -> Result<(), CliError> {
    let mut rows = Vec::with_capacity(p.levels);
    for n in 0..p.levels {
        let level = shoot(&p.potential, &p.bc, n, BRACKET_TOL)?;
        rows.push(vec![
            Cell::from(n),
            Cell::from(level.energy),
            Cell::from(level.bracket_width),
            Cell::from(level.nodes),
        ]);
    }
    out.csv(
        "schrodinger.csv",
        &["n", "energy", "bracket_width", "nodes"],
        &rows,
    )?;
    Ok(())
}

fn bethe_table(
    file: &str,
    index: &str,
    solutions: &[(usize, BetheSolution)],
    out: &mut ArtifactWriter,
) -> Result<(), CliError> {
    let mut rows = Vec::new();
    for (n, sol) in solutions {
        for (k, r) in sol.roots.iter().enumerate() {
            rows.push(vec![
                Cell::from(*n),
                Cell::from(k + 1),
                Cell::from(*r),
                Cell::from(sol.energy),
                Cell::from(sol.residual),
            ]);
        }
    }
    out.csv(file, &[index, "k", "root", "energy", "residual"], &rows)?;
    Ok(())
}

fn worst_root_error(
    solutions: &[(usize, BetheSolution)],
    reference: impl Fn(usize) -> Option<Vec<f64>>,
) -> f64 {
    solutions
        .iter()
        .map(|(n, sol)| match reference(*n) {
            Some(r) if r.len() == sol.roots.len() => sol
                .roots
                .iter()
                .zip(&r)
                .fold(0.0f64, |m, (a, b)| m.max((a - b).abs())),
            _ => f64::INFINITY,
        })
        .fold(0.0, f64::max)
}

fn worst_gap(computed: &[f64], table: &[f64]) -> f64 {
    if computed.len() < table.len() {
        return f64::INFINITY;
    }
    computed
        .iter()
        .zip(table)
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
}

/// Bethe tables, the `|x|` table, the Voros table and the two TBA curves.
fn reproduce_all(p: &ReproduceParams, out: &mut ArtifactWriter) -> Result<Vec<Check>, CliError> {
    let mut checks = Vec::new();

    let qho = (1..=3)
        .map(|n| Ok((n, solve_qho_bethe(n, 1.0)?)))
        .collect::<Result<Vec<_>, CliError>>()?;
    bethe_table("bethe_qho.csv", "N", &qho, out)?;
    checks.push(Check::at_most(
        "qho_bethe_roots",
        worst_root_error(&qho, reference::qho_roots),
        1e-10,
    ));

    let hydrogen = (2..=4)
        .map(|n| Ok((n, solve_hydrogen_bethe(n - 1, 0, 1.0)?)))
        .collect::<Result<Vec<_>, CliError>>()?;
    bethe_table("bethe_hydrogen.csv", "n", &hydrogen, out)?;
    checks.push(Check::at_most(
        "hydrogen_bethe_roots",
        worst_root_error(&hydrogen, reference::hydrogen_roots),
        1e-3,
    ));

    let abs_rows = naive_rows(9)?;
    write_naive(&abs_rows, out)?;
    let naive: Vec<f64> = abs_rows.iter().map(|r| r.0).collect();
    let exact: Vec<f64> = abs_rows.iter().map(|r| r.1).collect();
    checks.push(Check::at_most(
        "abs_naive_column",
        worst_gap(&naive, &reference::ABS_NAIVE),
        1e-12,
    ));
    checks.push(Check::at_most(
        "abs_true_column",
        worst_gap(&exact, &reference::ABS_TRUE),
        1e-4,
    ));

    let pe = solve_tba(SpdpParams::default(), p.grid.theta_grid()?, &p.options)?;
    write_tba(&pe, out)?;
    checks.push(Check::at_most(
        "tba_final_update",
        pe.report.final_update,
        1e-10,
    ));
    let eps_hat_max = pe
        .grid
        .nodes()
        .iter()
        .zip(&pe.values[1])
        .filter(|(t, _)| t.abs() <= 5.0)
        .fold(0.0f64, |m, (_, e)| m.max(e.abs()));
    checks.push(Check {
        name: "eps_hat_magnitude".into(),
        passed: (1e-5..=1e-3).contains(&eps_hat_max),
        value: eps_hat_max,
        tolerance: 1e-3,
    });

    let opts = VorosOptions {
        tba: p.options,
        ..VorosOptions::default()
    };
    let voros = voros_rows(&pe, reference::VOROS_COMPUTED.len() - 1, &opts)?;
    write_voros(&voros, out)?;
    let computed: Vec<f64> = voros.iter().map(|r| r.0).collect();
    checks.push(Check::at_most(
        "voros_computed_column",
        worst_gap(&computed, &reference::VOROS_COMPUTED),
        5e-3,
    ));
    checks.push(Check::at_most(
        "voros_true_column",
        worst_gap(&computed, &reference::VOROS_TRUE),
        2e-2,
    ));
    let count = ModifiedEqc::new(&pe, 0, EqcOptions::default())?
        .roots(0.0, 3.0)?
        .len();
    checks.push(Check::equal("voros_roots_on_0_3", count, 8));
    Ok(checks)
}
