use std::fmt::Debug;
use std::marker::PhantomData;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A sampled step map: a finite candidate oracle plus the target set `M'`.
pub trait StepMap {
    type Point: Clone + PartialEq + Debug;

    /// Finite sample of `S(x)`, possibly empty. Must not contain `x`.
    fn candidates(&self, x: &Self::Point) -> Vec<Self::Point>;

    /// Membership in the target set `M'`.
    fn in_target(&self, x: &Self::Point) -> bool;
}

/// Step map built from two closures.
pub struct FnStepMap<P, S, T> {
    step: S,
    target: T,
    _point: PhantomData<fn() -> P>,
}

impl<P, S, T> FnStepMap<P, S, T>
where
    S: Fn(&P) -> Vec<P>,
    T: Fn(&P) -> bool,
{
    pub fn new(step: S, target: T) -> Self {
        Self {
            step,
            target,
            _point: PhantomData,
        }
    }
}

impl<P, S, T> StepMap for FnStepMap<P, S, T>
where
    P: Clone + PartialEq + Debug,
    S: Fn(&P) -> Vec<P>,
    T: Fn(&P) -> bool,
{
    type Point = P;

    fn candidates(&self, x: &P) -> Vec<P> {
        (self.step)(x)
    }

    fn in_target(&self, x: &P) -> bool {
        (self.target)(x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OrbitCase {
    /// Cumulative length reached the divergence threshold.
    A,
    /// Empty candidate set at a point outside `M'`.
    B1,
    /// Step lengths became negligible over a full window at a point outside `M'`.
    B2,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrbitOptions {
    pub budget: usize,
    pub divergence_threshold: f64,
    pub window: usize,
    pub tail_tolerance: f64,
}

impl Default for OrbitOptions {
    fn default() -> Self {
        Self {
            budget: 100_000,
            divergence_threshold: 1e3,
            window: 32,
            tail_tolerance: 1e-9,
        }
    }
}

/// One orbit point. For every entry after the first, `step_length` is the
/// distance from the previous point and `sampled_sup` is the `s_i` that was in
/// force when this point was chosen.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceEntry<P> {
    pub point: P,
    pub step_length: f64,
    pub sampled_sup: f64,
    pub candidate_count: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrbitOutcome<P> {
    pub case: OrbitCase,
    pub trace: Vec<TraceEntry<P>>,
    pub cumulative_length: f64,
    pub options: OrbitOptions,
}

#[derive(Debug, Error)]
pub enum OrbitError<P: Debug> {
    #[error("step map contract violated at step {step}: {reason}")]
    ContractViolation { step: usize, reason: String },
    #[error("empty candidate set at step {step} for a point inside the target set")]
    EmptyValueInTarget { step: usize },
    #[error("budget of {budget} steps exhausted without classification")]
    Indeterminate {
        budget: usize,
        trace: Vec<TraceEntry<P>>,
        cumulative_length: f64,
    },
    #[error("invalid orbit options: {0}")]
    InvalidOptions(String),
}

fn sampled_sup<P>(x: &P, cands: &[P], metric: &dyn Fn(&P, &P) -> f64) -> (Vec<f64>, f64) {
    let dists: Vec<f64> = cands.iter().map(|c| metric(x, c)).collect();
    let max = dists.iter().copied().fold(0.0f64, f64::max);
    (dists, max.min(1.0))
}

fn window_sum<P>(trace: &[TraceEntry<P>], window: usize) -> Option<f64> {
    // the first entry carries no step
    if trace.len() <= window {
        return None;
    }
    Some(
        trace[trace.len() - window..]
            .iter()
            .map(|e| e.step_length)
            .sum(),
    )
}

/// Runs the half-sup orbit from `x0`.
///
/// At each point the candidate list is sampled once; `s_i = min(1, max dist)`
/// over that list and the first candidate strictly farther than `s_i / 2` is
/// taken.
pub fn run_orbit<M: StepMap>(
    map: &M,
    x0: M::Point,
    metric: &dyn Fn(&M::Point, &M::Point) -> f64,
    options: OrbitOptions,
) -> Result<OrbitOutcome<M::Point>, OrbitError<M::Point>> {
    if options.window == 0
        || !(options.divergence_threshold > 0.0)
        || !(options.tail_tolerance > 0.0)
    {
        return Err(OrbitError::InvalidOptions(format!("{options:?}")));
    }
    let mut trace = vec![TraceEntry {
        point: x0,
        step_length: 0.0,
        sampled_sup: 0.0,
        candidate_count: 0,
    }];
    let mut cumulative = 0.0;
    let finish = |case, trace, cumulative| {
        Ok(OrbitOutcome {
            case,
            trace,
            cumulative_length: cumulative,
            options,
        })
    };

    for step in 0..options.budget {
        let x = &trace.last().expect("trace is never empty").point;
        let cands = map.candidates(x);
        if cands.iter().any(|c| c == x) {
            return Err(OrbitError::ContractViolation {
                step,
                reason: "x belongs to S(x)".into(),
            });
        }
        if cands.is_empty() {
            if map.in_target(x) {
                return Err(OrbitError::EmptyValueInTarget { step });
            }
            return finish(OrbitCase::B1, trace, cumulative);
        }
        let (dists, s) = sampled_sup(x, &cands, metric);
        if let Some(d) = dists.iter().find(|d| !d.is_finite() || **d < 0.0) {
            return Err(OrbitError::ContractViolation {
                step,
                reason: format!("metric returned {d}"),
            });
        }
        let Some(pick) = dists.iter().position(|&d| d > s / 2.0) else {
            return Err(OrbitError::ContractViolation {
                step,
                reason: "distinct candidates at distance zero".into(),
            });
        };
        let len = dists[pick];
        cumulative += len;
        let count = cands.len();
        trace.push(TraceEntry {
            point: cands.into_iter().nth(pick).expect("pick is in range"),
            step_length: len,
            sampled_sup: s,
            candidate_count: count,
        });

        if cumulative >= options.divergence_threshold {
            return finish(OrbitCase::A, trace, cumulative);
        }
        if let Some(sum) = window_sum(&trace, options.window) {
            let current = &trace.last().expect("just pushed").point;
            if sum < options.tail_tolerance && !map.in_target(current) {
                return finish(OrbitCase::B2, trace, cumulative);
            }
        }
    }
    Err(OrbitError::Indeterminate {
        budget: options.budget,
        trace,
        cumulative_length: cumulative,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrbitVerification {
    pub ok: bool,
    pub reasons: Vec<String>,
}

/// Rechecks every disclosed step and the terminal classification.
pub fn verify_orbit<M: StepMap>(
    outcome: &OrbitOutcome<M::Point>,
    map: &M,
    metric: &dyn Fn(&M::Point, &M::Point) -> f64,
) -> OrbitVerification {
    let mut reasons = Vec::new();
    let trace = &outcome.trace;
    let opts = &outcome.options;
    if trace.is_empty() {
        return OrbitVerification {
            ok: false,
            reasons: vec!["empty trace".into()],
        };
    }
    if trace[0].step_length != 0.0 {
        reasons.push("initial entry carries a step length".into());
    }

    let mut cumulative = 0.0;
    let mut before_last = 0.0;
    for (i, pair) in trace.windows(2).enumerate() {
        let (prev, next) = (&pair[0], &pair[1]);
        let cands = map.candidates(&prev.point);
        let Some(pos) = cands.iter().position(|c| *c == next.point) else {
            reasons.push(format!("step {i}: point is not a candidate"));
            continue;
        };
        let (dists, s) = sampled_sup(&prev.point, &cands, metric);
        if s != next.sampled_sup {
            reasons.push(format!(
                "step {i}: disclosed s_i {} differs from recomputed {s}",
                next.sampled_sup
            ));
        }
        if cands.len() != next.candidate_count {
            reasons.push(format!("step {i}: candidate count mismatch"));
        }
        if dists[pos] != next.step_length {
            reasons.push(format!("step {i}: step length mismatch"));
        }
        if !(dists[pos] > s / 2.0) {
            reasons.push(format!("step {i}: half-sup inequality fails"));
        }
        if dists.iter().position(|&d| d > s / 2.0) != Some(pos) {
            reasons.push(format!("step {i}: not the first admissible candidate"));
        }
        before_last = cumulative;
        cumulative += next.step_length;
    }
    if cumulative != outcome.cumulative_length {
        reasons.push("cumulative length mismatch".into());
    }

    let terminal = &trace[trace.len() - 1].point;
    match outcome.case {
        OrbitCase::A => {
            if !(cumulative >= opts.divergence_threshold) {
                reasons.push("case A: threshold not reached".into());
            }
            if trace.len() > 1 && before_last >= opts.divergence_threshold {
                reasons.push("case A: threshold was already reached earlier".into());
            }
        }
        OrbitCase::B1 => {
            if !map.candidates(terminal).is_empty() {
                reasons.push("case B1: terminal candidate set is not empty".into());
            }
            if map.in_target(terminal) {
                reasons.push("case B1: terminal point lies in the target set".into());
            }
        }
        OrbitCase::B2 => {
            match window_sum(trace, opts.window) {
                Some(sum) if sum < opts.tail_tolerance => {}
                _ => reasons.push("case B2: window criterion fails".into()),
            }
            if map.in_target(terminal) {
                reasons.push("case B2: terminal point lies in the target set".into());
            }
        }
    }
    OrbitVerification {
        ok: reasons.is_empty(),
        reasons,
    }
}

/// JSON-friendly trace with point ids rendered through `Debug`.
#[derive(Debug, Clone, Serialize)]
pub struct OrbitExport {
    pub case: OrbitCase,
    pub cumulative_length: f64,
    pub options: OrbitOptions,
    pub steps: Vec<ExportStep>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExportStep {
    pub point: String,
    pub step_length: f64,
    pub s_i: f64,
    pub terminal: bool,
}

impl<P: Debug> OrbitOutcome<P> {
    pub fn export(&self) -> OrbitExport {
        let last = self.trace.len().saturating_sub(1);
        OrbitExport {
            case: self.case,
            cumulative_length: self.cumulative_length,
            options: self.options,
            steps: self
                .trace
                .iter()
                .enumerate()
                .map(|(i, e)| ExportStep {
                    point: format!("{:?}", e.point),
                    step_length: e.step_length,
                    s_i: e.sampled_sup,
                    terminal: i == last,
                })
                .collect(),
        }
    }
}
