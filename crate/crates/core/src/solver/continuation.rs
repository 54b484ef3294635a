use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{tame_certificate, CertificateTable, OracleError, TameProblem};
use crate::graded::{remetrize, s_norm, GradedError, GradedVector, MetricHandle, SeminormProfile};

/// How the target direction is chosen at each step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum DirectionMode {
    /// Constant direction `y`, as in the orbit construction.
    #[default]
    Fixed,
    /// Re-aimed direction `(y - f(x_i)) / (1 - p_i)`. Not part of the original
    /// construction; offered as a practical variant.
    Corrected,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverParams {
    /// Step cap `eps` in `(0, 1)`.
    pub eps: f64,
    /// Backtracking factor in `(0, 1)`.
    pub backtrack: f64,
    pub tol_residual: f64,
    pub tol_certificate: f64,
    pub max_steps: usize,
    /// Backtracking gives up below this step size.
    pub min_step: f64,
    pub mode: DirectionMode,
}

impl Default for SolverParams {
    fn default() -> Self {
        Self {
            eps: 0.1,
            backtrack: 0.5,
            tol_residual: 1e-8,
            tol_certificate: 1e-9,
            max_steps: 100_000,
            min_step: 1e-14,
            mode: DirectionMode::Fixed,
        }
    }
}

impl SolverParams {
    pub fn validate(&self) -> Result<(), SolverError> {
        let bad = |what: &str| Err(SolverError::InvalidParams(what.to_string()));
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return bad("eps must lie in (0, 1)");
        }
        if !(self.backtrack > 0.0 && self.backtrack < 1.0) {
            return bad("backtrack factor must lie in (0, 1)");
        }
        if !(self.tol_residual > 0.0) || !(self.tol_certificate > 0.0) {
            return bad("tolerances must be positive");
        }
        if self.max_steps == 0 {
            return bad("max_steps must be positive");
        }
        if !(self.min_step > 0.0) {
            return bad("min_step must be positive");
        }
        Ok(())
    }
}

/// One accepted step `x_{i+1} = x_i + t_i u_i`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepRecord {
    pub t: f64,
    /// `p_{i+1}`.
    pub p: f64,
    /// `rho(f(x_{i+1}) - f(x_i), t ybar)` in the metric normalized along the direction.
    pub step_defect: f64,
    pub backtracks: u32,
    /// `||x_{i+1}||_s` with `s_n = c |y|_{n+d}`.
    pub box_norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveCertificate {
    pub problem: String,
    pub mode: DirectionMode,
    pub x: GradedVector,
    pub p_final: f64,
    pub steps: usize,
    /// `rho_Y(f(x), y)` in the canonical metric.
    pub residual: f64,
    /// `|f(x) - y|_n` per level.
    pub residual_levels: Vec<f64>,
    pub table: CertificateTable,
    /// `||x_i||_s <= p_i (1 + tol)` held along the whole orbit.
    pub box_confined: bool,
    pub metric_tail_bound: f64,
    pub pass: bool,
    pub trace: Vec<StepRecord>,
}

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("invalid solver parameters: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Graded(#[from] GradedError),
    #[error("oracle failed at step {step}: {source}")]
    Oracle {
        step: usize,
        #[source]
        source: OracleError,
    },
    #[error("right inverse violates the tame bound at step {step} on levels {levels:?}")]
    TameViolation {
        step: usize,
        levels: Vec<usize>,
        partial: Box<SolveCertificate>,
    },
    #[error("no progress at step {step}: step size fell below {min_step}")]
    NoProgress {
        step: usize,
        min_step: f64,
        partial: Box<SolveCertificate>,
    },
    #[error("step budget of {max_steps} exhausted at p = {p}")]
    Budget {
        max_steps: usize,
        p: f64,
        partial: Box<SolveCertificate>,
    },
}

impl SolverError {
    pub fn partial(&self) -> Option<&SolveCertificate> {
        match self {
            SolverError::TameViolation { partial, .. }
            | SolverError::NoProgress { partial, .. }
            | SolverError::Budget { partial, .. } => Some(partial),
            _ => None,
        }
    }
}

/// Direction normalization: coordinate functional on the largest entry.
fn direction_metric(v: &GradedVector) -> Result<MetricHandle, GradedError> {
    let j = v
        .coeffs()
        .iter()
        .enumerate()
        .fold((0, 0.0f64), |best, (k, c)| {
            if c.abs() > best.1 {
                (k, c.abs())
            } else {
                best
            }
        })
        .0;
    remetrize(v, j)
}

/// Levels `n <= N-1-d` where `||u||_n > c |v|_{n+d} (1 + tol)`.
fn tame_violations(u: &GradedVector, v: &GradedVector, c: f64, d: usize, tol: f64) -> Vec<usize> {
    let us = u.seminorms();
    let vs = v.seminorms();
    (0..us.len().saturating_sub(d))
        .filter(|&n| us[n] > c * vs[n + d] * (1.0 + tol))
        .collect()
}

struct Run<'a, P: TameProblem + ?Sized> {
    problem: &'a P,
    y: &'a GradedVector,
    params: SolverParams,
    profile: SeminormProfile,
    x: GradedVector,
    fx: GradedVector,
    p: f64,
    box_confined: bool,
    trace: Vec<StepRecord>,
}

impl<P: TameProblem + ?Sized> Run<'_, P> {
    fn certificate(&self) -> Result<SolveCertificate, SolverError> {
        let diff = self.fx.checked_sub(self.y)?;
        let residual_levels = diff.seminorms();
        let residual = MetricHandle::Canonical.norm(&diff)?;
        let table = tame_certificate(
            &self.x,
            self.y,
            self.problem.constant(),
            self.problem.loss(),
            self.params.tol_certificate,
        )?;
        let pass = table.pass && residual <= self.params.tol_residual;
        Ok(SolveCertificate {
            problem: self.problem.name(),
            mode: self.params.mode,
            x: self.x.clone(),
            p_final: self.p,
            steps: self.trace.len(),
            residual,
            residual_levels,
            table,
            box_confined: self.box_confined,
            metric_tail_bound: self.x.config().metric_tail_bound(),
            pass,
            trace: self.trace.clone(),
        })
    }
}

/// Solves `f(x) = y` by the continuation orbit from `x_0 = 0`.
///
/// Each step takes `u_i = R(x_i, ybar)` and backtracks `t` from
/// `eps (1 - p_i)` (or from the full remainder `1 - p_i` once that is at most
/// `eps`) until `rho(f(x_i + t u_i) - f(x_i), t ybar) <= eps t` in the metric
/// normalized so that `rho(0, t ybar) = |t|`.
pub fn solve_continuation<P: TameProblem + ?Sized>(
    problem: &P,
    y: &GradedVector,
    params: SolverParams,
) -> Result<SolveCertificate, SolverError> {
    params.validate()?;
    let config = *problem.config();
    if !config.same_shape(y.config()) {
        return Err(GradedError::ConfigMismatch.into());
    }
    let c = problem.constant();
    let d = problem.loss();
    if d >= config.levels {
        return Err(SolverError::InvalidParams(format!(
            "loss d = {d} leaves no evaluable level out of {}",
            config.levels
        )));
    }
    let ys = y.seminorms();
    let profile = SeminormProfile::new((0..config.levels - d).map(|n| c * ys[n + d]).collect())?;

    let zero = GradedVector::zeros(config);
    let mut run = Run {
        problem,
        y,
        params,
        profile,
        fx: zero.clone(),
        x: zero,
        p: 0.0,
        box_confined: true,
        trace: Vec::new(),
    };
    if y.is_zero() {
        run.p = 1.0;
        return run.certificate();
    }
    let oracle = |step, source| SolverError::Oracle { step, source };
    let fixed_metric = direction_metric(y)?;

    for step in 0..params.max_steps {
        let remaining = 1.0 - run.p;
        let (ybar, metric) = match params.mode {
            DirectionMode::Fixed => (y.clone(), fixed_metric.clone()),
            DirectionMode::Corrected => {
                let r = y.checked_sub(&run.fx)?;
                if r.is_zero() {
                    run.p = 1.0;
                    return run.certificate();
                }
                let ybar = r.scaled(1.0 / remaining);
                let m = direction_metric(&ybar)?;
                (ybar, m)
            }
        };
        let u = problem
            .right_inverse(&run.x, &ybar)
            .map_err(|e| oracle(step, e))?;
        let bad = tame_violations(&u, &ybar, c, d, params.tol_certificate);
        if !bad.is_empty() {
            return Err(SolverError::TameViolation {
                step,
                levels: bad,
                partial: Box::new(run.certificate()?),
            });
        }

        let closing = remaining <= params.eps;
        let mut t = if closing {
            remaining
        } else {
            params.eps * remaining
        };
        let mut backtracks = 0u32;
        let (x_new, fx_new, defect) = loop {
            let x_new = run.x.axpy(t, &u)?;
            let fx_new = problem.apply(&x_new).map_err(|e| oracle(step, e))?;
            let gap = fx_new.checked_sub(&run.fx)?.axpy(-t, &ybar)?;
            let defect = metric.norm(&gap)?;
            if defect <= params.eps * t {
                break (x_new, fx_new, defect);
            }
            t *= params.backtrack;
            backtracks += 1;
            if t < params.min_step {
                return Err(SolverError::NoProgress {
                    step,
                    min_step: params.min_step,
                    partial: Box::new(run.certificate()?),
                });
            }
        };

        let full_close = closing && backtracks == 0;
        run.p = if full_close { 1.0 } else { run.p + t };
        run.x = x_new;
        run.fx = fx_new;
        let box_norm = s_norm(&run.x, &run.profile)?;
        if box_norm > run.p * (1.0 + params.tol_certificate) {
            run.box_confined = false;
        }
        run.trace.push(StepRecord {
            t,
            p: run.p,
            step_defect: defect,
            backtracks,
            box_norm,
        });
        if full_close {
            return run.certificate();
        }
    }
    Err(SolverError::Budget {
        max_steps: params.max_steps,
        p: run.p,
        partial: Box::new(run.certificate()?),
    })
}
