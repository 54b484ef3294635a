//! Weighted sup-norm sequence spaces.
//!
//! A point is a finite coefficient sequence `x_0, .., x_{K-1}`; level `n`
//! carries the seminorm `||x||_n = max_k (1+k)^n |x_k|`. Every operation here
//! works on the truncation `n < N`, `k < K` fixed by a [`SpaceConfig`], and all
//! metric values are exact for that truncation. The distance to the untruncated
//! metric is bounded by [`SpaceConfig::metric_tail_bound`].

mod artifact;
mod metric;
mod net;
mod profile;
mod space;

pub use artifact::{ProfileArtifact, VectorArtifact};
pub use metric::{remetrize, rho_metric, MetricHandle};
pub use net::{epsilon_net, EpsilonNet, DEFAULT_NET_CAP};
pub use profile::{
    diam_upper_bound, key_inclusion_check, pi_membership, s_magnitude, s_norm, SeminormProfile,
};
pub use space::{seminorm, GradedVector, SpaceConfig, DEFAULT_MEMBERSHIP_SLACK};

use thiserror::Error;

/// Errors raised by graded-space operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GradedError {
    #[error("invalid space configuration: {0}")]
    InvalidConfig(String),
    #[error("level {level} out of range (space tracks {levels} levels)")]
    LevelOutOfRange { level: usize, levels: usize },
    #[error("coefficient index {index} out of range (space tracks {coeffs} coefficients)")]
    IndexOutOfRange { index: usize, coeffs: usize },
    #[error("operands belong to different space configurations")]
    ConfigMismatch,
    #[error("expected {expected} entries, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("non-finite entry at position {0}")]
    NonFinite(usize),
    #[error("invalid seminorm profile: {0}")]
    InvalidProfile(String),
    #[error("profile has empty support; the box is {{0}}")]
    EmptySupport,
    #[error("scaling factor c = {0} is below 1")]
    FactorBelowOne(f64),
    #[error("{name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("invalid remetrization direction: {0}")]
    InvalidDirection(String),
    #[error("epsilon-net needs {required} points, cap is {cap}")]
    NetTooLarge { required: f64, cap: usize },
}

/// `g(t) = t / (1 + t)`, extended by `g(inf) = 1`.
#[inline]
pub fn saturate(t: f64) -> f64 {
    if t.is_infinite() {
        1.0
    } else {
        t / (1.0 + t)
    }
}

/// Inverse of [`saturate`] on `[0, 1]`; returns `inf` for `u >= 1`.
#[inline]
pub fn saturate_inverse(u: f64) -> f64 {
    if u >= 1.0 {
        f64::INFINITY
    } else {
        u / (1.0 - u)
    }
}

/// `max_n 2^{-n} g(levels[n])`, the shared kernel of `rho_X(0, .)` and `|s|`.
pub(crate) fn dyadic_magnitude(levels: &[f64]) -> f64 {
    let mut scale = 1.0;
    let mut best = 0.0f64;
    for &v in levels {
        best = best.max(scale * saturate(v));
        scale *= 0.5;
    }
    best
}
