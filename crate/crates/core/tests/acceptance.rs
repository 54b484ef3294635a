//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails. Runtimes are part of each criterion.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use nme_core::graded::{epsilon_net, GradedVector, SeminormProfile, SpaceConfig, DEFAULT_NET_CAP};
use nme_core::problems::{
    make_diagonal, make_smoothing_quadratic, Deletion, LatticeMultimap, LatticeSpec,
};
use nme_core::solver::{
    check_openness, check_weak_pi_surjectivity, solve_continuation, validate_right_inverse,
    SolverParams, TameProblem, Verdict,
};
use nme_core::suites::{run_suite, SuiteName, SuiteOptions, SuiteReport};

type Outcome = Result<String, String>;
type Criterion = (u32, &'static str, Duration, fn() -> Outcome);

// Independent oracles. These deliberately avoid the library's metric code.

fn g(t: f64) -> f64 {
    if t.is_infinite() {
        1.0
    } else {
        t / (1.0 + t)
    }
}

fn seminorm(c: &[f64], n: usize) -> f64 {
    c.iter()
        .enumerate()
        .map(|(k, v)| ((1 + k) as f64).powi(n as i32) * v.abs())
        .fold(0.0, f64::max)
}

fn rho_norm(c: &[f64], levels: usize) -> f64 {
    (0..levels)
        .map(|n| 0.5f64.powi(n as i32) * g(seminorm(c, n)))
        .fold(0.0, f64::max)
}

/// `|p(z)| + rho(z - p(z) ybar)` with `p(z) = z_j / ybar_j`.
fn remetrized_norm(z: &[f64], ybar: &[f64], j: usize, levels: usize) -> f64 {
    let p = z[j] / ybar[j];
    let rest: Vec<f64> = z.iter().zip(ybar).map(|(a, b)| a - p * b).collect();
    p.abs() + rho_norm(&rest, levels)
}

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn smoothing_q(x: &[f64]) -> Vec<f64> {
    let k = x.len();
    (0..k)
        .map(|m| {
            let s: f64 = (0..=m).map(|i| x[i] * x[m - i]).sum();
            s / ((1 + m) as f64).powi(2)
        })
        .collect()
}

fn suite(name: SuiteName) -> SuiteReport {
    run_suite(name, &SuiteOptions::default())
}

fn suite_outcome(r: SuiteReport, extra: Result<String, String>) -> Outcome {
    let summary = format!(
        "{} checks, {} failures, worst violation {:.2e}",
        r.trials, r.failures, r.worst_violation
    );
    match (r.pass, extra) {
        (true, Ok(e)) if e.is_empty() => Ok(summary),
        (true, Ok(e)) => Ok(format!("{summary}; {e}")),
        (true, Err(e)) => Err(format!("{summary}; {e}")),
        (false, _) => Err(format!("{summary}; {:?}", r.notes)),
    }
}

fn criterion_1() -> Outcome {
    let r = suite(SuiteName::MetricAxioms);
    let expected = 10_000 * 3 * 4;
    let extra = if r.trials == expected {
        Ok(String::new())
    } else {
        Err(format!("expected {expected} checks"))
    };
    suite_outcome(r, extra)
}

fn criterion_2() -> Outcome {
    let r = suite(SuiteName::KeyInclusion);
    let extra = if r.trials == 3_000 {
        Ok(String::new())
    } else {
        Err("expected 1000 samples x 3 checks".into())
    };
    suite_outcome(r, extra)
}

fn criterion_3() -> Outcome {
    let r = suite(SuiteName::BanachIdentity);
    let extra = if r.trials == 1_000 {
        Ok(String::new())
    } else {
        Err("expected 1000 pairs".into())
    };
    suite_outcome(r, extra)
}

fn criterion_4() -> Outcome {
    let r = suite(SuiteName::NetCovering);
    let cfg = SpaceConfig::default();
    let s = SeminormProfile::constant(cfg.levels, 1.0).unwrap();
    let mut sizes = Vec::new();
    for eps in [0.1, 0.05] {
        let net = epsilon_net(&cfg, &s, eps, DEFAULT_NET_CAP).map_err(|e| e.to_string())?;
        if net.len() >= DEFAULT_NET_CAP {
            return Err(format!("net size {} reaches the cap", net.len()));
        }
        if (net.radius - 3.0 * eps).abs() > 1e-15 {
            return Err(format!("published radius {} is not 3 eps", net.radius));
        }
        sizes.push(net.len());
    }
    suite_outcome(r, Ok(format!("net sizes {sizes:?}, cap {DEFAULT_NET_CAP}")))
}

fn criterion_5() -> Outcome {
    let r = suite(SuiteName::EkelandExhaustive);
    let extra = if r.trials == 200 && r.notes.is_empty() {
        Ok("100 spaces".into())
    } else {
        Err(format!(
            "expected 100 spaces with 2 checks each, notes {:?}",
            r.notes
        ))
    };
    suite_outcome(r, extra)
}

fn criterion_6() -> Outcome {
    let r = suite(SuiteName::OrbitTrichotomy);
    let note = r.notes.last().cloned().unwrap_or_default();
    let extra = if note == "50 scripted maps, 10 tampered controls" {
        Ok(note)
    } else {
        Err(format!("unexpected coverage: {note}"))
    };
    suite_outcome(r, extra)
}

fn criterion_7() -> Outcome {
    let cfg = SpaceConfig::new(12, 64).unwrap();
    let problem = make_diagonal(cfg, 1, 1.0).unwrap();
    let mut yc = vec![0.0; 64];
    yc[1] = 1.0;
    yc[3] = 0.1;
    let y = GradedVector::from_coeffs(cfg, yc.clone()).unwrap();
    let cert =
        solve_continuation(&problem, &y, SolverParams::default()).map_err(|e| e.to_string())?;
    let x = cert.x.coeffs();

    // f(x)_k = x_k / (1+k), so the exact solution is x_k = (1+k) y_k
    let fx: Vec<f64> = x
        .iter()
        .enumerate()
        .map(|(k, v)| v / (1 + k) as f64)
        .collect();
    let residual = sub(&fx, &yc);
    let worst_residual = (0..12).map(|n| seminorm(&residual, n)).fold(0.0, f64::max);
    if worst_residual > 1e-8 {
        return Err(format!("residual seminorm {worst_residual:e}"));
    }
    let worst_ratio = (0..11)
        .map(|n| seminorm(x, n) / seminorm(&yc, n + 1))
        .fold(0.0, f64::max);
    if worst_ratio > 1.0 + 1e-9 {
        return Err(format!("ratio {worst_ratio}"));
    }
    if !cert.pass || cert.table.worst_ratio() > 1.0 + 1e-9 {
        return Err("certificate does not pass".into());
    }
    let exact: Vec<f64> = yc
        .iter()
        .enumerate()
        .map(|(k, v)| (1 + k) as f64 * v)
        .collect();
    let err = rho_norm(&sub(x, &exact), 12);
    Ok(format!(
        "{} steps, max residual seminorm {worst_residual:.1e}, max ratio {worst_ratio:.12}, rho to exact {err:.1e}",
        cert.steps
    ))
}

fn criterion_8() -> Outcome {
    let cfg = SpaceConfig::new(12, 64).unwrap();
    let lambda = 0.1;
    let problem = make_smoothing_quadratic(cfg, lambda).unwrap();
    let yc: Vec<f64> = (0..64)
        .map(|k| 0.05 * if k % 2 == 0 { 1.0 } else { -1.0 } * ((1 + k) as f64).powi(-12))
        .collect();
    if seminorm(&yc, 0) > 0.05 {
        return Err("target too large".into());
    }
    let y = GradedVector::from_coeffs(cfg, yc.clone()).unwrap();
    let params = SolverParams {
        eps: 1e-3,
        tol_residual: 1e-6,
        ..SolverParams::default()
    };
    let cert = solve_continuation(&problem, &y, params).map_err(|e| e.to_string())?;
    let x = cert.x.coeffs().to_vec();

    let f = |x: &[f64]| -> Vec<f64> {
        let q = smoothing_q(x);
        x.iter().zip(&q).map(|(a, b)| a + lambda * b).collect()
    };
    let residual = rho_norm(&sub(&f(&x), &yc), 12);
    if residual > 1e-6 {
        return Err(format!("residual {residual:e}"));
    }

    // fixed-point oracle: x = y - lambda Q(x), a contraction near 0
    let mut z = yc.clone();
    for _ in 0..200 {
        let q = smoothing_q(&z);
        z = yc.iter().zip(&q).map(|(a, b)| a - lambda * b).collect();
    }
    let oracle_residual = rho_norm(&sub(&f(&z), &yc), 12);
    // compared both through the images and directly
    let agreement = rho_norm(&sub(&f(&x), &f(&z)), 12).max(rho_norm(&sub(&x, &z), 12));
    if agreement > 1e-6 {
        return Err(format!(
            "disagrees with fixed-point oracle by {agreement:e}"
        ));
    }

    // replay every accepted step with the same step sizes and recheck
    // rho(f(x_{i+1}) - f(x_i) - t_i y) <= eps t_i in the metric normalized along y
    let j = (0..64)
        .max_by(|&a, &b| yc[a].abs().partial_cmp(&yc[b].abs()).unwrap())
        .unwrap();
    let mut xi = GradedVector::zeros(cfg);
    let mut worst = 0.0f64;
    for (i, step) in cert.trace.iter().enumerate() {
        let u = problem.right_inverse(&xi, &y).map_err(|e| e.to_string())?;
        let next = xi.axpy(step.t, &u).unwrap();
        let df = sub(&f(next.coeffs()), &f(xi.coeffs()));
        let gap: Vec<f64> = df.iter().zip(&yc).map(|(a, b)| a - step.t * b).collect();
        let defect = remetrized_norm(&gap, &yc, j, 12);
        worst = worst.max(defect / step.t);
        if defect > params.eps * step.t * (1.0 + 1e-9) {
            return Err(format!(
                "step {i}: defect {defect:e} exceeds eps t = {:e}",
                params.eps * step.t
            ));
        }
        xi = next;
    }
    if xi != cert.x {
        return Err("replayed orbit diverges from the solver's".into());
    }
    Ok(format!(
        "{} steps, residual {residual:.1e}, oracle residual {oracle_residual:.1e}, agreement {agreement:.1e}, worst defect/t {worst:.2e}",
        cert.steps
    ))
}

fn criterion_9() -> Outcome {
    let cfg = SpaceConfig::default();
    let problem = make_diagonal(cfg, 1, 1.0).unwrap();
    let spec = LatticeSpec {
        active: vec![0, 1],
        pitch: 0.05,
        bound: 1.0,
        cap: 10_000,
    };
    let u = SeminormProfile::new(vec![0.8, 1.6]).unwrap();
    let v = SeminormProfile::new(vec![10.0, 20.0]).unwrap();
    let lattice = LatticeMultimap::build(&problem, spec.clone(), vec![], u.clone(), v.clone())
        .map_err(|e| e.to_string())?;
    let sample = &lattice.sample;
    let kappa = 1.0;
    let s = SeminormProfile::new((0..11).map(|n| 0.1 * 2f64.powi(n)).collect()).unwrap();
    let weak = check_weak_pi_surjectivity(sample, kappa, &s, 4_000).map_err(|e| e.to_string())?;
    if weak.verdict != Verdict::Consistent {
        return Err(format!(
            "weak Pi-surjectivity not confirmed: {:?}",
            weak.verdict
        ));
    }
    let open = check_openness(sample, kappa / 2.0, 4_000).map_err(|e| e.to_string())?;
    if open.verdict != Verdict::Consistent {
        return Err(format!(
            "openness at theta = kappa/2 failed: worst {:e} vs resolution {:e}",
            open.worst, open.resolution
        ));
    }
    let control = check_openness(sample, 10.0, 4_000).map_err(|e| e.to_string())?;
    if control.verdict != Verdict::Inconsistent {
        return Err(format!(
            "theta = 10 control did not fail: {:?}",
            control.verdict
        ));
    }
    let holed = LatticeMultimap::build(
        &problem,
        spec,
        vec![Deletion::TargetQuadrant(vec![(0, 1.0), (1, 1.0)])],
        u,
        v,
    )
    .map_err(|e| e.to_string())?;
    let holed_weak =
        check_weak_pi_surjectivity(&holed.sample, kappa, &s, 4_000).map_err(|e| e.to_string())?;
    if holed_weak.verdict != Verdict::Inconsistent {
        return Err("deleted-quadrant control was not detected".into());
    }
    let control_unmatched: usize = control.radii.iter().map(|r| r.unmatched).sum();
    Ok(format!(
        "{} pairs, resolution {:.4}; weak Pi {} probes worst {:.4}; openness theta=0.5 worst {:.4}; theta=10 {} unmatched; deleted quadrant {} unmatched",
        sample.pairs.len(),
        sample.resolution,
        weak.probes.len(),
        weak.worst,
        open.worst,
        control_unmatched,
        holed_weak.unmatched
    ))
}

fn criterion_10() -> Outcome {
    let cfg = SpaceConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut random = |amp: f64| -> GradedVector {
        let p = rng.gen_range(12.0..14.0);
        let a = amp * rng.gen_range(0.1..1.0);
        let c = (0..cfg.coeffs)
            .map(|k| a * rng.gen_range(-1.0..1.0) * ((1 + k) as f64).powf(-p))
            .collect();
        GradedVector::from_coeffs(cfg, c).unwrap()
    };
    let samples: Vec<(GradedVector, GradedVector)> =
        (0..100).map(|_| (random(1.0), random(1.0))).collect();
    let mut problems: Vec<Box<dyn TameProblem>> = (0..3)
        .map(|d| Box::new(make_diagonal(cfg, d, 1.0).unwrap()) as Box<dyn TameProblem>)
        .collect();
    problems.push(Box::new(make_smoothing_quadratic(cfg, 0.1).unwrap()));
    let mut parts = Vec::new();
    for p in &problems {
        let report =
            validate_right_inverse(p.as_ref(), &samples, 1e-6, 1e-4).map_err(|e| e.to_string())?;
        if !report.pass || report.errors.len() != 100 {
            return Err(format!("{}: worst {:e}", p.name(), report.worst));
        }
        parts.push(format!("{} {:.1e}", p.name(), report.worst));
    }
    Ok(parts.join(", "))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        (1, "metric axioms", Duration::from_secs(5), criterion_1),
        (2, "key inclusion", Duration::from_secs(2), criterion_2),
        (
            3,
            "Banach-norm identity",
            Duration::from_secs(2),
            criterion_3,
        ),
        (
            4,
            "epsilon-net covering",
            Duration::from_secs(60),
            criterion_4,
        ),
        (
            5,
            "Ekeland exhaustive",
            Duration::from_secs(10),
            criterion_5,
        ),
        (6, "orbit trichotomy", Duration::from_secs(10), criterion_6),
        (7, "diagonal solve", Duration::from_secs(5), criterion_7),
        (
            8,
            "smoothing quadratic solve",
            Duration::from_secs(30),
            criterion_8,
        ),
        (
            9,
            "weak Pi-surjectivity vs openness",
            Duration::from_secs(60),
            criterion_9,
        ),
        (
            10,
            "right-inverse finite differences",
            Duration::from_secs(10),
            criterion_10,
        ),
    ];
    let mut failed = 0;
    for (id, name, limit, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(m) if elapsed > limit => Err(format!("{m}; exceeded {limit:?}")),
            other => other,
        };
        match outcome {
            Ok(m) => println!("PASS criterion {id} ({name}, {elapsed:.2?}): {m}"),
            Err(m) => {
                failed += 1;
                println!("FAIL criterion {id} ({name}, {elapsed:.2?}): {m}");
            }
        }
    }
    println!("{} of 10 criteria passed", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
