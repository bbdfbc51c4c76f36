//! Subcommands `run`, `study`, `check` and `grid`.
//!
//! Exit codes: 0 ok, 2 solver failure, 3 configuration or admissibility,
//! 4 audit or study failure.

use std::path::{Path, PathBuf};

use crate::config::{GridFile, RunConfig};
use crate::error::Error;
use crate::operators::{audit_hypotheses, compute_example_constants};
use crate::output::{resolve_output_dir, write_atomic};
use crate::rothe::{apriori_report, half_step_identity, make_interpolants, RotheSolver, Trajectory};
use crate::study::{run_study, StudyKind};
use crate::timegrid::{check_step_constraint, StepConstraintReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_SOLVER: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;
pub const EXIT_AUDIT: i32 = 4;

pub const USAGE: &str = "usage: rothe <run|study|check|grid> <config.toml>";

/// Maps a library error onto the exit-code contract.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Nonconvergence { .. } | Error::Singular(_) | Error::Certificate { .. } => EXIT_SOLVER,
        Error::Study(_) => EXIT_AUDIT,
        Error::InvalidGrid(_)
        | Error::Config(_)
        | Error::HypothesisViolated(_)
        | Error::InadmissibleStep { .. }
        | Error::Io(_) => EXIT_CONFIG,
    }
}

/// Outcome of a command: exit code plus the text for stdout and stderr.
#[derive(Debug, Default, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Self { code: EXIT_OK, stdout, stderr: String::new() }
    }

    fn fail(code: i32, stderr: impl Into<String>) -> Self {
        Self { code, stdout: String::new(), stderr: stderr.into() }
    }

    fn from_error(err: &Error) -> Self {
        Self::fail(exit_code(err), format!("error: {err}\n"))
    }
}

/// Dispatches on `args` (without the program name).
pub fn dispatch(args: &[String]) -> Outcome {
    match args {
        [cmd, path] => {
            let path = Path::new(path);
            match cmd.as_str() {
                "run" => cmd_run(path),
                "study" => cmd_study(path),
                "check" => cmd_check(path),
                "grid" => cmd_grid(path),
                _ => Outcome::fail(EXIT_CONFIG, format!("unknown subcommand `{cmd}`\n{USAGE}\n")),
            }
        }
        _ => Outcome::fail(EXIT_CONFIG, format!("{USAGE}\n")),
    }
}

fn output_dir(cfg: &RunConfig) -> PathBuf {
    resolve_output_dir(&cfg.output_dir())
}

fn constraint_kv(r: &StepConstraintReport) -> String {
    format!(
        "coercivity_bound = {}\ngrowth_bound = {}\nbound = {}\ntau_max = {}\nadmissible = {}\nslack = {}\nexistence_ok = {}\n",
        r.coercivity_bound, r.growth_bound, r.bound, r.tau_max, r.admissible, r.slack, r.existence_ok
    )
}

fn run_log(tr: &Trajectory) -> String {
    let mut s = String::from("step,iterations,fallback_iterations,solver_residual,certified_residual,eps,graph_distance\n");
    for r in &tr.steps {
        s.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.n, r.iterations, r.fallback_iterations, r.solver_residual, r.certified_residual, r.eps, r.graph_distance
        ));
    }
    s
}

/// Solves one trajectory and writes its CSVs and reports.
pub fn cmd_run(path: &Path) -> Outcome {
    let cfg = match RunConfig::load(path) {
        Ok(c) => c,
        Err(e) => return Outcome::from_error(&e),
    };
    if cfg.study.is_some() {
        return Outcome::fail(EXIT_CONFIG, "error: config has a [study] block; use `rothe study`\n");
    }
    let prepared = (|| {
        let setup = cfg.setup()?;
        let grid = cfg.time_grid()?;
        let ledger = setup.ledger()?;
        let report = check_step_constraint(&grid, &ledger)?;
        Ok::<_, Error>((setup, grid, report))
    })();
    let (setup, grid, report) = match prepared {
        Ok(x) => x,
        Err(e) => return Outcome::from_error(&e),
    };
    if !report.admissible {
        return Outcome::fail(
            EXIT_CONFIG,
            format!(
                "error: inadmissible grid: tau_max = {} is not below the step bound {}\n",
                report.tau_max, report.bound
            ),
        );
    }
    let dir = output_dir(&cfg);
    let space = &setup.suite.space;
    let (u0, v0) = match (setup.u0.interpolate(space), setup.v0.interpolate(space)) {
        (Ok(u), Ok(v)) => (u, v),
        (Err(e), _) | (_, Err(e)) => return Outcome::from_error(&e),
    };
    let load = setup.load.pairing_fn(space);
    let run = RotheSolver::new(&setup.suite, &grid, setup.solver.clone()).with_constraint(report).run(&u0, &v0, &load);
    let tr = match run {
        Ok(tr) => tr,
        Err(failure) => {
            let partial = write_atomic(&dir, "trajectory.csv", &failure.partial.to_csv(space))
                .and_then(|_| write_atomic(&dir, "run.log", &run_log(&failure.partial)));
            let mut out = Outcome::from_error(&failure.error);
            if let Err(e) = partial {
                out.stderr.push_str(&format!("error: could not write partial output: {e}\n"));
            }
            return out;
        }
    };
    let written = (|| {
        let it = make_interpolants(&tr)?;
        let half_step = half_step_identity(&tr, &it, space)?;
        let ap = apriori_report(&tr, &setup.suite)?;
        write_atomic(&dir, "trajectory.csv", &tr.to_csv(space))?;
        write_atomic(&dir, "interpolants.csv", &it.to_csv(space))?;
        write_atomic(&dir, "apriori.txt", &ap.to_kv())?;
        write_atomic(&dir, "half_step.txt", &half_step.to_kv())?;
        write_atomic(&dir, "run.log", &run_log(&tr))?;
        Ok::<_, Error>(format!(
            "steps = {}\nhalf_step_rel_diff = {}\napriori_ratio = {}\n",
            tr.n_steps(),
            half_step.rel_diff,
            ap.ratio,
        ))
    })();
    match written {
        Ok(s) => Outcome::ok(s),
        Err(e) => Outcome::from_error(&e),
    }
}

/// Runs the `[study]` block and writes `study.csv` and `study_summary.txt`.
pub fn cmd_study(path: &Path) -> Outcome {
    let plan = match RunConfig::load(path).and_then(|c| Ok((c.study_plan()?, c))) {
        Ok(p) => p,
        Err(e) => return Outcome::from_error(&e),
    };
    let (plan, cfg) = plan;
    let report = match run_study(&plan) {
        Ok(r) => r,
        Err(e) => return Outcome::from_error(&e),
    };
    let dir = output_dir(&cfg);
    let summary = report.summary_kv();
    if let Err(e) =
        write_atomic(&dir, "study.csv", &report.to_csv()).and_then(|_| write_atomic(&dir, "study_summary.txt", &summary))
    {
        return Outcome::from_error(&e);
    }
    let inadmissible = plan.kind != StudyKind::Audit
        && report.rows.iter().any(|r| r.get(2).is_some_and(|v| v != "admissible"));
    let code = if inadmissible {
        EXIT_CONFIG
    } else if report.passed {
        EXIT_OK
    } else {
        EXIT_AUDIT
    };
    let stderr = if code == EXIT_OK { String::new() } else { "error: study did not pass\n".into() };
    Outcome { code, stdout: summary, stderr }
}

/// Constants ledger, smallness condition, step constraint and the sampled
/// hypothesis audit; writes `check.txt`.
pub fn cmd_check(path: &Path) -> Outcome {
    let cfg = match RunConfig::load(path) {
        Ok(c) => c,
        Err(e) => return Outcome::from_error(&e),
    };
    let result = (|| {
        let setup = cfg.setup()?;
        let ledger = compute_example_constants(&setup.suite, setup.d)?;
        let audit = audit_hypotheses(&setup.suite, &ledger, cfg.check.samples, cfg.check.seed)?;
        Ok::<_, Error>((ledger, audit))
    })();
    let (ledger, audit) = match result {
        Ok(x) => x,
        Err(e) => return Outcome::from_error(&e),
    };
    let h0 = ledger.smallness();
    let mut text = String::from("[constants]\n");
    text.push_str(&ledger.to_kv());
    text.push_str(&format!(
        "\n[smallness]\nmu_A = {}\nrhs = {}\nholds = {}\nslack = {}\n",
        h0.mu_a, h0.rhs, h0.holds, h0.slack
    ));
    let mut inadmissible = None;
    // a study config has no single grid to check
    if cfg.study.is_none() {
        text.push_str("\n[step_constraint]\n");
        match cfg.time_grid().and_then(|g| check_step_constraint(&g, &ledger)) {
            Ok(r) => {
                if !r.admissible {
                    inadmissible = Some(format!("tau_max = {} is not below the step bound {}", r.tau_max, r.bound));
                }
                text.push_str(&constraint_kv(&r));
            }
            Err(e) => text.push_str(&format!("error = {e}\n")),
        }
    }
    text.push_str("\n[audit]\n");
    text.push_str(&audit.to_kv());
    if let Err(e) = write_atomic(&output_dir(&cfg), "check.txt", &text) {
        return Outcome::from_error(&e);
    }
    let mut problems = Vec::new();
    if !h0.holds {
        problems.push(format!("smallness condition violated: mu_A = {} <= {}", h0.mu_a, h0.rhs));
    }
    for f in audit.failures() {
        problems.push(format!("audit {} failed: min slack {} at {}", f.name, f.min_slack, f.witness));
    }
    let code = if !problems.is_empty() {
        EXIT_AUDIT
    } else if inadmissible.is_some() {
        problems.extend(inadmissible);
        EXIT_CONFIG
    } else {
        EXIT_OK
    };
    let stderr = problems.iter().map(|p| format!("error: {p}\n")).collect();
    Outcome { code, stdout: text, stderr }
}

/// Prints the grid parameter table and writes `grid.csv` and `nodes.csv`.
/// Reads the `[grid]` table only, so any run configuration works.
pub fn cmd_grid(path: &Path) -> Outcome {
    let grid = match GridFile::load(path) {
        Ok(g) => g,
        Err(e) => return Outcome::from_error(&e),
    };
    let table = grid.to_parameter_csv();
    let dir = match std::fs::read_to_string(path).ok().and_then(|t| toml::from_str::<OutputOnly>(&t).ok()) {
        Some(OutputOnly { output_dir: Some(d) }) => resolve_output_dir(&d),
        _ => resolve_output_dir(Path::new("out")),
    };
    if let Err(e) =
        write_atomic(&dir, "grid.csv", &table).and_then(|_| write_atomic(&dir, "nodes.csv", &grid.to_nodes_csv()))
    {
        return Outcome::from_error(&e);
    }
    Outcome::ok(table)
}

#[derive(serde::Deserialize)]
struct OutputOnly {
    output_dir: Option<PathBuf>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn error_classes_map_to_contract() {
        assert_eq!(exit_code(&Error::Config("x".into())), EXIT_CONFIG);
        assert_eq!(exit_code(&Error::InadmissibleStep { tau: 1.0, bound: 0.5 }), EXIT_CONFIG);
        assert_eq!(exit_code(&Error::Study("x".into())), EXIT_AUDIT);
        let nc = Error::Nonconvergence { step: 1, iterations: 3, residual: 1.0, best: vec![], history: vec![] };
        assert_eq!(exit_code(&nc), EXIT_SOLVER);
    }

    #[test]
    fn bad_invocations() {
        assert_eq!(dispatch(&[]).code, EXIT_CONFIG);
        assert_eq!(dispatch(&["fly".into(), "x.toml".into()]).code, EXIT_CONFIG);
        assert_eq!(dispatch(&["run".into(), "/nonexistent/x.toml".into()]).code, EXIT_CONFIG);
    }
}
