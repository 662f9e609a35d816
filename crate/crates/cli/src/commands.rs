//! Subcommand implementations. Each returns the process exit code.

use anyhow::{bail, Result};
use log::info;
use pohozaev::studies::{self, reference, GridCell, ReproRow};
use pohozaev::{solve_default, LinearSolver, NonlinearityModel, SolveResult, SolveStatus, SolverConfig};
use serde::Serialize;

use crate::args::{DemoKind, ModelArgs, SolverArgs, StudyKind, TableKind};
use crate::output::{fixed5, full, Manifest, OutputDir};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INFEASIBLE: i32 = 2;
pub const EXIT_NONCONVERGENCE: i32 = 3;
pub const EXIT_REPRODUCTION: i32 = 4;

/// Shared state of one invocation.
pub struct Context<'a> {
    pub out: &'a mut OutputDir,
    pub manifest: &'a mut Manifest,
    pub parallel: bool,
}

fn status_code(status: SolveStatus) -> i32 {
    if status == SolveStatus::Converged {
        EXIT_OK
    } else {
        EXIT_NONCONVERGENCE
    }
}

fn print_summary(result: &SolveResult) {
    let s = result.summary();
    println!(
        "u0 = {:.5}  I = {:.5}  |v| = {:.3e}  iterations = {}  restarts = {}  R*_final = {:.4}  status = {}",
        s.u0,
        s.action,
        s.v_norm,
        s.iterations,
        s.restarts,
        s.r_star_final,
        s.status.as_str()
    );
}

fn record(ctx: &mut Context<'_>, model: Option<&NonlinearityModel>, config: &SolverConfig) {
    ctx.manifest.model = model.map(NonlinearityModel::spec);
    ctx.manifest.config = Some(*config);
}

pub fn solve(ctx: &mut Context<'_>, model_args: &ModelArgs, solver: &SolverArgs) -> Result<i32> {
    let model = model_args.build()?;
    let config = solver.config();
    record(ctx, Some(&model), &config);
    info!("solving {model} with M = {}, R* = {}", config.panels, config.r_star);
    let result = solve_default(&model, &config)?;
    ctx.out.solve_outputs(&result)?;
    print_summary(&result);
    Ok(status_code(result.status))
}

fn cell_status(cell: &GridCell) -> String {
    match (&cell.summary, cell.lambda * cell.s >= 1.0) {
        (Some(s), _) => s.status.as_str().to_string(),
        (None, true) => "infeasible".to_string(),
        (None, false) => "failed".to_string(),
    }
}

/// grid.csv in long form plus grid_table.csv laid out like the published
/// table (rows s, columns λ).
fn write_grid(out: &mut OutputDir, cells: &[GridCell], lambdas: &[f64], s_values: &[f64]) -> Result<()> {
    let dash = || "--".to_string();
    let rows = cells.iter().map(|c| {
        let (u0, action, v) = match &c.summary {
            Some(s) => (fixed5(s.u0), fixed5(s.action), full(s.v_norm)),
            None => (dash(), dash(), dash()),
        };
        vec![c.s.to_string(), c.lambda.to_string(), u0, action, v, cell_status(c)]
    });
    out.csv("grid.csv", &["s", "lambda", "u0", "I", "v_norm", "status"], rows)?;

    let mut header: Vec<String> = vec!["s".into()];
    header.extend(lambdas.iter().map(|l| format!("lambda={l}")));
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let table = s_values.iter().map(|&s| {
        let mut row = vec![s.to_string()];
        for &l in lambdas {
            let cell = cells.iter().find(|c| c.s == s && c.lambda == l);
            row.push(match cell.and_then(|c| c.summary) {
                Some(x) => fixed5(x.u0),
                None => dash(),
            });
        }
        row
    });
    out.csv("grid_table.csv", &header_refs, table)
}

pub fn sweep(ctx: &mut Context<'_>, lambdas: &[f64], s_values: &[f64], solver: &SolverArgs) -> Result<i32> {
    if lambdas.is_empty() || s_values.is_empty() {
        bail!(pohozaev::Error::Config("sweep needs at least one λ and one s".into()));
    }
    let config = solver.config();
    record(ctx, None, &config);
    let cells = studies::asym_grid(lambdas, s_values, &config, ctx.parallel);
    write_grid(ctx.out, &cells, lambdas, s_values)?;
    let mut code = EXIT_OK;
    for c in &cells {
        let status = cell_status(c);
        let u0 = c.summary.map_or("--".to_string(), |x| fixed5(x.u0));
        println!("s = {:<5} lambda = {:<5} u0 = {u0:>10}  {status}", c.s, c.lambda);
        if status != "converged" && status != "infeasible" {
            code = EXIT_NONCONVERGENCE;
        }
    }
    Ok(code)
}

#[derive(Serialize)]
struct DomainReport<'a> {
    summaries: &'a [studies::DomainSummary],
}

pub fn study(
    ctx: &mut Context<'_>,
    kind: StudyKind,
    model_args: &ModelArgs,
    solver: &SolverArgs,
    panels_list: &[usize],
    spacings: &[f64],
    radii: &[f64],
) -> Result<i32> {
    let model = model_args.build()?;
    match kind {
        StudyKind::Convergence => {
            let config = solver.config();
            record(ctx, Some(&model), &config);
            let rows = studies::convergence_study(&model, panels_list, &config, ctx.parallel)?;
            ctx.out.csv(
                "study.csv",
                &["M", "u0", "I", "v_norm", "status"],
                rows.iter().map(|r| {
                    vec![
                        r.panels.to_string(),
                        fixed5(r.u0),
                        fixed5(r.action),
                        full(r.v_norm),
                        r.status.as_str().to_string(),
                    ]
                }),
            )?;
            for w in rows.windows(2) {
                println!(
                    "M {:>6} -> {:>6}: relative change of I = {:.3e}",
                    w[0].panels,
                    w[1].panels,
                    ((w[1].action - w[0].action) / w[1].action).abs()
                );
            }
        }
        StudyKind::Domain => {
            // Runs to stagnation on meshes of up to R*/Δr panels; relaxation
            // sweeps would take hours there, so the exact tridiagonal solve
            // is the default unless a solver is requested explicitly.
            let mut config = solver.config();
            if solver.linear_solver.is_none() {
                config.linear_solver = LinearSolver::Thomas;
            }
            record(ctx, Some(&model), &config);
            let rows = studies::domain_study(&model, spacings, radii, &config, ctx.parallel)?;
            ctx.out.csv(
                "study.csv",
                &["dr", "R_star", "M", "v_norm", "iterations", "status", "R_star_final"],
                rows.iter().map(|r| {
                    vec![
                        r.spacing.to_string(),
                        r.r_star.to_string(),
                        r.panels.to_string(),
                        full(r.v_norm),
                        r.iterations.to_string(),
                        r.status.as_str().to_string(),
                        fixed5(r.r_star_final),
                    ]
                }),
            )?;
            let summaries = studies::summarize_domain(&rows);
            ctx.out
                .json("study_summary.json", &DomainReport { summaries: &summaries })?;
            for s in &summaries {
                let plateau = s.plateau_ratio.map_or("n/a".to_string(), |p| format!("{p:.3}"));
                println!(
                    "dr = {}: slope of log|v| vs log R* on [1, 8] = {:.3}; |v|(10)/|v|(20) spread = {plateau}",
                    s.spacing, s.slope
                );
            }
        }
        StudyKind::Robustness => {
            let config = solver.config();
            record(ctx, Some(&model), &config);
            let report = studies::robustness_study(&model, &config, ctx.parallel)?;
            let coarse_cfg = studies::coarse_config(&config);
            let row = |name: &str, cfg: &SolverConfig, s: &pohozaev::SolveSummary| {
                vec![
                    name.to_string(),
                    cfg.panels.to_string(),
                    cfg.alpha_min.to_string(),
                    cfg.sor_tol.to_string(),
                    fixed5(s.u0),
                    fixed5(s.action),
                    full(s.v_norm),
                    s.status.as_str().to_string(),
                ]
            };
            ctx.out.csv(
                "study.csv",
                &["run", "M", "alpha_min", "sor_tol", "u0", "I", "v_norm", "status"],
                [
                    row("standard", &config, &report.standard),
                    row("coarse", &coarse_cfg, &report.coarse),
                ],
            )?;
            ctx.out.json("study_summary.json", &report)?;
            println!(
                "standard I = {:.5}, coarse I = {:.5}, relative difference = {:+.3}%",
                report.standard.action,
                report.coarse.action,
                100.0 * report.relative_difference
            );
        }
    }
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct TwoMaximaSummary {
    maxima: Vec<[f64; 2]>,
    count: usize,
    expected_height: f64,
    worst_relative_error: f64,
    kappa: f64,
    b: f64,
    c: f64,
    d: f64,
}

#[derive(Serialize)]
struct NonmonotoneSummary {
    lambda: f64,
    s: f64,
    probe_range: [f64; 2],
    monotone: bool,
}

pub fn demo(ctx: &mut Context<'_>, kind: DemoKind, solver: &SolverArgs) -> Result<i32> {
    let config = solver.config();
    let model = match kind {
        DemoKind::TwoMaxima => {
            let report = studies::two_maxima_demo(20_000, 4000)?;
            ctx.out.csv(
                "fiber.csv",
                &["t", "I"],
                report.scan.iter().map(|(t, i)| [full(*t), full(*i)]),
            )?;
            let cal = report.calibration;
            ctx.out.json(
                "demo.json",
                &TwoMaximaSummary {
                    maxima: report.maxima.iter().map(|&(t, v)| [t, v]).collect(),
                    count: report.maxima.len(),
                    expected_height: report.expected_height,
                    worst_relative_error: report.worst_relative_error(),
                    kappa: cal.kappa,
                    b: cal.b,
                    c: cal.c,
                    d: cal.d,
                },
            )?;
            println!("I(t·u) has {} interior maxima:", report.maxima.len());
            for (t, v) in &report.maxima {
                println!("  t = {t:.5}  I = {v:.7}");
            }
            println!("expected height 128/(25√5) = {:.7}", report.expected_height);
            cal.model()?
        }
        DemoKind::Nonmonotone => {
            let model = NonlinearityModel::nonmonotone(studies::NONMONO_DEMO_LAMBDA, studies::NONMONO_DEMO_S)?;
            let samples = studies::fratio_samples(&model, 3.0, 300);
            ctx.out.csv(
                "fratio.csv",
                &["u", "f", "f_over_u"],
                samples.iter().map(|(u, f, q)| [full(*u), full(*f), full(*q)]),
            )?;
            let grid: Vec<f64> = samples.iter().map(|s| s.0).collect();
            let monotone = model.monotonicity_probe(&grid);
            ctx.out.json(
                "demo.json",
                &NonmonotoneSummary {
                    lambda: studies::NONMONO_DEMO_LAMBDA,
                    s: studies::NONMONO_DEMO_S,
                    probe_range: [grid[0], grid[grid.len() - 1]],
                    monotone,
                },
            )?;
            println!("f(u)/u nondecreasing on (0, 3]: {monotone}");
            model
        }
    };
    record(ctx, Some(&model), &config);
    let result = solve_default(&model, &config)?;
    ctx.out.solve_outputs(&result)?;
    print_summary(&result);
    if result.solution.min_value() < -config.positivity_tol {
        println!("warning: the computed profile changes sign");
    }
    Ok(status_code(result.status))
}

fn report(ctx: &mut Context<'_>, rows: &[ReproRow]) -> Result<i32> {
    ctx.out.csv(
        "report.csv",
        &["quantity", "reference", "computed", "rel_error", "tolerance", "pass"],
        rows.iter().map(|r| {
            vec![
                r.label.clone(),
                full(r.paper),
                full(r.computed),
                full(r.rel_error),
                r.tolerance.to_string(),
                r.pass.to_string(),
            ]
        }),
    )?;
    println!(
        "{:<32} {:>13} {:>13} {:>10} {:>8}",
        "quantity", "reference", "computed", "rel.err", ""
    );
    for r in rows {
        println!(
            "{:<32} {:>13.6e} {:>13.6e} {:>10.2e} {:>8}",
            r.label,
            r.paper,
            r.computed,
            r.rel_error,
            if r.pass { "PASS" } else { "FAIL" }
        );
    }
    let failing: Vec<&str> = rows.iter().filter(|r| !r.pass).map(|r| r.label.as_str()).collect();
    if failing.is_empty() {
        println!("all {} values within tolerance", rows.len());
        Ok(EXIT_OK)
    } else {
        println!("{} of {} values out of tolerance:", failing.len(), rows.len());
        for f in failing {
            println!("  {f}");
        }
        Ok(EXIT_REPRODUCTION)
    }
}

pub fn reproduce(ctx: &mut Context<'_>, table: TableKind, solver: &SolverArgs) -> Result<i32> {
    let config = solver.config();
    println!("mesh: M = {}, initial R* = {}", config.panels, config.r_star);
    match table {
        TableKind::PowerHeights => {
            record(ctx, None, &config);
            let results = studies::power_heights(&config, ctx.parallel);
            let rows = studies::power_heights_rows(&results);
            report(ctx, &rows)
        }
        TableKind::AsymGrid => {
            record(ctx, None, &config);
            let cells = studies::asym_grid(&reference::ASYM_LAMBDAS, &reference::ASYM_S, &config, ctx.parallel);
            write_grid(ctx.out, &cells, &reference::ASYM_LAMBDAS, &reference::ASYM_S)?;
            let rows = studies::asym_grid_rows(&cells);
            report(ctx, &rows)
        }
        TableKind::AsymProfile => {
            let model = NonlinearityModel::asym_linear(1.0, 0.5)?;
            record(ctx, Some(&model), &config);
            let result = solve_default(&model, &config)?;
            ctx.out.solve_outputs(&result)?;
            let mut rows = vec![ReproRow::new("I", reference::ASYM_ACTION, result.action, 1e-2)];
            rows.extend(studies::asym_profile_rows(&result.solution));
            report(ctx, &rows)
        }
    }
}
