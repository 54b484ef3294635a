use serde::{Deserialize, Serialize};

use super::ProblemError;
use crate::graded::{GradedVector, SeminormProfile};
use crate::solver::{BoxRegion, GraphPair, MultimapSample, TameProblem};

/// A uniform lattice `pitch * Z` on `[-bound, bound]` in each active coordinate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeSpec {
    pub active: Vec<usize>,
    pub pitch: f64,
    pub bound: f64,
    pub cap: usize,
}

/// Removes pairs from a sample, for negative controls.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Deletion {
    /// Drop pairs whose image satisfies `sign * y_k > 0` for every listed `(k, sign)`.
    TargetQuadrant(Vec<(usize, f64)>),
    /// Drop pairs by index in the undeleted sample.
    Indices(Vec<usize>),
}

impl Deletion {
    fn removes(&self, index: usize, pair: &GraphPair) -> bool {
        match self {
            Deletion::TargetQuadrant(signs) => {
                signs.iter().all(|&(k, sign)| sign * pair.y.coeff(k) > 0.0)
            }
            Deletion::Indices(list) => list.contains(&index),
        }
    }
}

/// Evaluates the problem on every lattice point, then applies the deletions.
pub fn sample_graph(
    problem: &dyn TameProblem,
    spec: &LatticeSpec,
    deletions: &[Deletion],
) -> Result<Vec<GraphPair>, ProblemError> {
    let config = *problem.config();
    if !(spec.pitch > 0.0) || !(spec.bound >= 0.0) {
        return Err(ProblemError::InvalidParameter(
            "lattice needs pitch > 0 and bound >= 0".into(),
        ));
    }
    if let Some(&k) = spec.active.iter().find(|&&k| k >= config.coeffs) {
        return Err(crate::graded::GradedError::IndexOutOfRange {
            index: k,
            coeffs: config.coeffs,
        }
        .into());
    }
    let steps = (spec.bound / spec.pitch + 1e-9).floor() as i64;
    let per_axis = (2 * steps + 1) as f64;
    let required = per_axis.powi(spec.active.len() as i32);
    if required > spec.cap as f64 {
        return Err(ProblemError::SampleTooLarge {
            required,
            cap: spec.cap,
        });
    }

    let total = required as usize;
    let mut pairs = Vec::with_capacity(total);
    let mut index = vec![-steps; spec.active.len()];
    for n in 0..total {
        let mut coeffs = vec![0.0; config.coeffs];
        for (&k, &i) in spec.active.iter().zip(&index) {
            coeffs[k] = i as f64 * spec.pitch;
        }
        let x = GradedVector::from_coeffs(config, coeffs)?;
        let y = problem.apply(&x).map_err(|e| {
            ProblemError::InvalidParameter(format!("map failed on the lattice: {e}"))
        })?;
        let pair = GraphPair { x, y };
        if !deletions.iter().any(|d| d.removes(n, &pair)) {
            pairs.push(pair);
        }
        for slot in index.iter_mut() {
            *slot += 1;
            if *slot <= steps {
                break;
            }
            *slot = -steps;
        }
    }
    Ok(pairs)
}

/// A lattice graph sample packaged for the checkers.
#[derive(Debug, Clone)]
pub struct LatticeMultimap {
    pub spec: LatticeSpec,
    pub deletions: Vec<Deletion>,
    pub sample: MultimapSample,
}

impl LatticeMultimap {
    /// Declared resolution: the regraded target size of the image of one
    /// pitch step taken in every active coordinate.
    pub fn build(
        problem: &dyn TameProblem,
        spec: LatticeSpec,
        deletions: Vec<Deletion>,
        u_radii: SeminormProfile,
        v_radii: SeminormProfile,
    ) -> Result<Self, ProblemError> {
        let config = *problem.config();
        let pairs = sample_graph(problem, &spec, &deletions)?;
        let zero = GradedVector::zeros(config);
        let u = BoxRegion::new(zero.clone(), u_radii)?;
        let v = BoxRegion::new(zero.clone(), v_radii)?;
        let mut step = vec![0.0; config.coeffs];
        for &k in &spec.active {
            step[k] = spec.pitch;
        }
        let image = problem
            .apply(&GradedVector::from_coeffs(config, step)?)
            .map_err(|e| ProblemError::InvalidParameter(e.to_string()))?;
        let mut sample = MultimapSample {
            config,
            loss: problem.loss(),
            pairs,
            u,
            v,
            active: spec.active.clone(),
            resolution: 0.0,
        };
        let (_, gy) = sample.gradings()?;
        sample.resolution = gy.magnitude(&image);
        Ok(Self {
            spec,
            deletions,
            sample,
        })
    }
}
