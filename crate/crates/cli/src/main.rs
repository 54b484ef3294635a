//! `nme`: batch front end for solves, graph checks, property suites and nets.
//!
//! Exit status: 0 when every selected check passes, 1 when a run completes
//! with failures, 2 for usage errors and malformed configs.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;
mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use nme_core::graded::{epsilon_net, SeminormProfile};
use nme_core::problems::{LatticeMultimap, ProblemDescriptor, SmoothingQuadraticProblem};
use nme_core::solver::{
    check_openness, check_weak_pi_surjectivity, solve_continuation, DirectionMode, SolverError,
    TameProblem, Verdict,
};
use nme_core::suites::{net_coverage, run_suite, SuiteName, SuiteOptions};

use config::RunConfig;
use report::{base_deviations, finish, now, write_report, write_table_csv, Deviation};

#[derive(Debug, Parser)]
#[command(
    name = "nme",
    version,
    about = "Tame continuation solver and graded-space checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve f(x) = y by continuation and emit a tame certificate.
    Solve(RunArgs),
    /// Probe a lattice sample of a problem's graph for weak Pi-surjectivity and openness.
    Check(RunArgs),
    /// Run the seeded property suites.
    Suites(SuiteArgs),
    /// Build an epsilon-net of a box and measure its coverage.
    Net(RunArgs),
}

#[derive(Debug, Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Report path; the certificate table goes next to it as CSV. Defaults to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Args)]
struct SuiteArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Suites to run; defaults to the config's list, or all of them.
    #[arg(long, num_args = 1..)]
    suite: Vec<SuiteName>,
}

/// Problems that stop a run before it produces a report.
struct UsageError(anyhow::Error);

impl<E: Into<anyhow::Error>> From<E> for UsageError {
    fn from(e: E) -> Self {
        UsageError(e.into())
    }
}

type Outcome = Result<bool, UsageError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Solve(args) => solve(args),
        Command::Check(args) => check(args),
        Command::Suites(args) => suites(args),
        Command::Net(args) => net(args),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(UsageError(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn load(path: &Path, seed: Option<u64>) -> Result<RunConfig, UsageError> {
    let mut config = RunConfig::load(path)?;
    if let Some(seed) = seed {
        config.suites.seed = seed;
    }
    Ok(config)
}

fn problem_of(config: &RunConfig) -> Result<(ProblemDescriptor, Box<dyn TameProblem>), UsageError> {
    let descriptor = config
        .problem
        .clone()
        .ok_or_else(|| anyhow!("config has no `problem`"))?;
    let problem = descriptor.build(config.space)?;
    Ok((descriptor, problem))
}

fn report_failures(failures: &[String]) {
    for f in failures {
        eprintln!("FAIL {f}");
    }
}

fn solve(args: RunArgs) -> Outcome {
    let started = now();
    let config = load(&args.config, args.seed)?;
    let (descriptor, problem) = problem_of(&config)?;
    let y = config.target_vector()?;

    let mut deviations = base_deviations(&config.space);
    deviations.push(Deviation {
        name: "direction_mode",
        value: json!(config.solver.mode),
        note: match config.solver.mode {
            DirectionMode::Fixed => "constant direction y, as in the orbit construction",
            DirectionMode::Corrected => {
                "re-aimed direction (y - f(x_i)) / (1 - p_i); not part of the original construction"
            }
        },
    });
    deviations.push(Deviation {
        name: "box_confinement",
        value: json!("recorded"),
        note: "x_i in p_i Pi_s is recorded per step as box_norm <= p_i, not enforced",
    });

    let mut failures = Vec::new();
    let (result, table) = match solve_continuation(problem.as_ref(), &y, config.solver) {
        Ok(cert) => {
            if !cert.table.pass {
                failures.push(format!(
                    "tame bound fails at levels {:?}",
                    cert.table.failing_levels()
                ));
            }
            if !(cert.residual <= config.solver.tol_residual) {
                failures.push(format!(
                    "residual {:e} exceeds {:e}",
                    cert.residual, config.solver.tol_residual
                ));
            }
            eprintln!(
                "{}: {} steps, residual {:.3e}, worst ratio {:.12}",
                cert.problem,
                cert.steps,
                cert.residual,
                cert.table.worst_ratio()
            );
            (
                json!({ "certificate": cert }),
                Some((cert.table.clone(), cert.x.clone())),
            )
        }
        Err(e) => {
            if let SolverError::TameViolation { step, levels, .. } = &e {
                failures.push(format!(
                    "tame bound fails at levels {levels:?} (step {step})"
                ));
            } else {
                failures.push(e.to_string());
            }
            let partial = e.partial().map(|p| json!(p));
            let table = e.partial().map(|p| (p.table.clone(), p.x.clone()));
            (json!({ "error": e.to_string(), "partial": partial }), table)
        }
    };

    if let (ProblemDescriptor::Smoothing { lambda, radius }, Some((_, x))) = (&descriptor, &table) {
        let q = match radius {
            Some(r) => SmoothingQuadraticProblem::with_radius(config.space, *lambda, *r)?,
            None => nme_core::problems::make_smoothing_quadratic(config.space, *lambda)?,
        };
        deviations.push(Deviation {
            name: "convolution_spillover",
            value: json!(q.spillover(x)?),
            note: "largest coefficient of Q(x) discarded beyond the coefficient window",
        });
    }

    report_failures(&failures);
    let report = finish(
        "solve", &config, None, started, deviations, failures, result,
    );
    write_report(&report, args.out.as_deref())?;
    if let (Some(out), Some((table, _))) = (&args.out, &table) {
        write_table_csv(table, &out.with_extension("csv"))?;
    }
    Ok(report.pass)
}

fn check(args: RunArgs) -> Outcome {
    let started = now();
    let config = load(&args.config, args.seed)?;
    let (_, problem) = problem_of(&config)?;
    let settings = config
        .check
        .clone()
        .ok_or_else(|| anyhow!("config has no `check` section"))?;
    let lattice = LatticeMultimap::build(
        problem.as_ref(),
        settings.lattice(),
        settings.deletions.clone(),
        SeminormProfile::new(settings.u_radii.clone())?,
        SeminormProfile::new(settings.v_radii.clone())?,
    )?;
    let sample = &lattice.sample;
    let s = SeminormProfile::new(settings.s.clone())?;
    let weak = check_weak_pi_surjectivity(sample, settings.kappa, &s, settings.probe_budget)?;
    let open = check_openness(sample, settings.theta(), settings.probe_budget)?;

    let mut failures = Vec::new();
    if weak.verdict != Verdict::Consistent {
        failures.push(format!(
            "weak Pi-surjectivity at kappa {}: {:?}, {} unmatched probes",
            weak.kappa, weak.verdict, weak.unmatched
        ));
    }
    if open.verdict != Verdict::Consistent {
        let unmatched: usize = open.radii.iter().map(|r| r.unmatched).sum();
        failures.push(format!(
            "openness at theta {}: {:?}, {unmatched} unmatched probes",
            open.theta, open.verdict
        ));
    }
    eprintln!(
        "{}: {} pairs, resolution {:.4e}, weak {:?}, openness {:?}",
        problem.name(),
        sample.pairs.len(),
        sample.resolution,
        weak.verdict,
        open.verdict
    );
    report_failures(&failures);

    let mut deviations = base_deviations(&config.space);
    deviations.push(Deviation {
        name: "checker_resolution",
        value: json!(sample.resolution),
        note: "verdicts mean consistent at this resolution; set inclusions are not decided",
    });
    deviations.push(Deviation {
        name: "checker_regrading",
        value: json!({ "levels": weak.levels, "target_shift": weak.shift }),
        note: "both spaces keep N - d levels and the target is shifted by the loss d",
    });

    let resolution = weak.resolution;
    let mut weak_json = serde_json::to_value(&weak).context("serializing weak report")?;
    if let Value::Object(map) = &mut weak_json {
        map.remove("probes");
        let unmatched: Vec<_> = weak
            .probes
            .iter()
            .filter(|p| !(p.distance <= resolution))
            .collect();
        map.insert("unmatched_probes".into(), json!(unmatched));
    }
    let result = json!({
        "problem": problem.name(),
        "lattice": lattice.spec,
        "deletions": lattice.deletions,
        "pairs": sample.pairs.len(),
        "weak_pi_surjectivity": weak_json,
        "openness": open,
    });
    let report = finish(
        "check", &config, None, started, deviations, failures, result,
    );
    write_report(&report, args.out.as_deref())?;
    Ok(report.pass)
}

fn suites(args: SuiteArgs) -> Outcome {
    let started = now();
    let mut config = match &args.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = args.seed {
        config.suites.seed = seed;
    }
    if !args.suite.is_empty() {
        config.suites.names = args.suite.clone();
    }
    let names = if config.suites.names.is_empty() {
        SuiteName::ALL.to_vec()
    } else {
        config.suites.names.clone()
    };
    let opts = SuiteOptions {
        seed: config.suites.seed,
        slack: config.suites.slack,
        config: config.space,
    };

    let reports: Vec<_> = std::thread::scope(|scope| {
        let handles: Vec<_> = names
            .iter()
            .map(|&name| scope.spawn(move || run_suite(name, &opts)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("suite thread panicked"))
            .collect()
    });

    let mut failures = Vec::new();
    for r in &reports {
        eprintln!(
            "{} {}: {} checks, {} failures, worst violation {:.3e}",
            if r.pass { "PASS" } else { "FAIL" },
            r.name,
            r.trials,
            r.failures,
            r.worst_violation
        );
        if !r.pass {
            failures.push(format!("suite {} ({} failures)", r.name, r.failures));
        }
    }
    let matrix: Vec<_> = reports
        .iter()
        .map(|r| json!({ "suite": r.name, "pass": r.pass }))
        .collect();
    let result = json!({ "matrix": matrix, "suites": reports });
    let deviations = base_deviations(&config.space);
    let seed = Some(config.suites.seed);
    let report = finish(
        "suites", &config, seed, started, deviations, failures, result,
    );
    write_report(&report, args.out.as_deref())?;
    Ok(report.pass)
}

fn net(args: RunArgs) -> Outcome {
    let started = now();
    let config = load(&args.config, args.seed)?;
    let settings = config
        .net
        .clone()
        .ok_or_else(|| anyhow!("config has no `net` section"))?;
    let s = SeminormProfile::new(settings.profile.clone())?;
    let mut failures = Vec::new();
    let result = match epsilon_net(&config.space, &s, settings.epsilon, settings.cap) {
        Ok(net) => {
            let coverage = net_coverage(
                config.space,
                &net,
                settings.samples,
                config.suites.seed,
                config.space.membership_slack,
            );
            if coverage.uncovered > 0 {
                failures.push(format!(
                    "{} of {} samples farther than {}",
                    coverage.uncovered, coverage.samples, net.radius
                ));
            }
            eprintln!(
                "{} net points, radius {}, worst sampled distance {:.6}",
                net.len(),
                net.radius,
                coverage.worst
            );
            json!({
                "epsilon": net.epsilon,
                "radius": net.radius,
                "resolved_levels": net.resolved_levels,
                "size": net.len(),
                "per_coordinate": net.per_coordinate,
                "coverage": coverage,
            })
        }
        Err(e) => {
            failures.push(e.to_string());
            json!({ "error": e.to_string() })
        }
    };
    report_failures(&failures);
    let deviations = base_deviations(&config.space);
    let seed = Some(config.suites.seed);
    let report = finish("net", &config, seed, started, deviations, failures, result);
    write_report(&report, args.out.as_deref())?;
    Ok(report.pass)
}
