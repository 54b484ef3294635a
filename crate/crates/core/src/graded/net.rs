use serde::Serialize;

use super::{saturate_inverse, GradedError, GradedVector, SeminormProfile, SpaceConfig};

/// Default cap on the number of net points.
pub const DEFAULT_NET_CAP: usize = 100_000;

/// A finite subset of `Pi_s` covering it within `3 * epsilon` in the canonical metric.
#[derive(Debug, Clone, Serialize)]
pub struct EpsilonNet {
    pub epsilon: f64,
    /// Smallest `k` with `2^{-k} < epsilon`; levels below it are resolved by the lattice.
    pub resolved_levels: usize,
    /// Published covering radius, `3 * epsilon`.
    pub radius: f64,
    /// Lattice points per coordinate.
    pub per_coordinate: Vec<usize>,
    #[serde(skip)]
    pub profile: SeminormProfile,
    pub points: Vec<GradedVector>,
}

impl EpsilonNet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Builds a finite net of `Pi_s`.
///
/// Levels `n >= k` contribute at most `2^{-k} < eps` to the metric, so only the
/// first `k` levels need resolving. Coordinate `j` is covered by a uniform
/// lattice whose half-pitch keeps every resolved level within `eps`, and the
/// lattice is clipped into the box `[-b_j, b_j]`.
pub fn epsilon_net(
    config: &SpaceConfig,
    s: &SeminormProfile,
    eps: f64,
    cap: usize,
) -> Result<EpsilonNet, GradedError> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(GradedError::NonPositive {
            name: "eps",
            value: eps,
        });
    }
    let half_widths = s.box_half_widths(config)?;

    let mut k = 0usize;
    while 0.5f64.powi(k as i32) >= eps {
        k += 1;
    }
    let resolved = k.min(config.levels);
    // Largest seminorm gap allowed on level n: 2^{-n} g(delta_n) <= eps.
    let deltas: Vec<f64> = (0..resolved)
        .map(|n| saturate_inverse(eps * 2f64.powi(n as i32)))
        .collect();

    let mut axes: Vec<Vec<f64>> = Vec::with_capacity(config.coeffs);
    let mut required = 1.0f64;
    for (j, &b) in half_widths.iter().enumerate() {
        let base = (1 + j) as f64;
        let half_pitch = deltas
            .iter()
            .enumerate()
            .map(|(n, d)| d / base.powi(n as i32))
            .fold(f64::INFINITY, f64::min);
        let count = if b == 0.0 || half_pitch >= b {
            1
        } else {
            (b / half_pitch).ceil() as usize
        };
        required *= count as f64;
        if required > cap as f64 {
            // keep multiplying only for the error report
            continue;
        }
        let step = 2.0 * b / count as f64;
        let axis = (0..count)
            .map(|i| {
                if count == 1 {
                    0.0
                } else {
                    (-b + (i as f64 + 0.5) * step).clamp(-b, b)
                }
            })
            .collect();
        axes.push(axis);
    }
    if required > cap as f64 {
        return Err(GradedError::NetTooLarge { required, cap });
    }

    let per_coordinate: Vec<usize> = axes.iter().map(Vec::len).collect();
    let total = required as usize;
    let mut points = Vec::with_capacity(total);
    let mut index = vec![0usize; axes.len()];
    for _ in 0..total {
        let coeffs: Vec<f64> = index.iter().zip(&axes).map(|(&i, a)| a[i]).collect();
        points.push(GradedVector::from_coeffs(*config, coeffs)?);
        for (slot, axis) in index.iter_mut().zip(&axes) {
            *slot += 1;
            if *slot < axis.len() {
                break;
            }
            *slot = 0;
        }
    }

    Ok(EpsilonNet {
        epsilon: eps,
        resolved_levels: k,
        radius: 3.0 * eps,
        per_coordinate,
        profile: s.clone(),
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graded::{pi_membership, MetricHandle};

    #[test]
    fn zero_profile_gives_origin() {
        let cfg = SpaceConfig::default();
        let s = SeminormProfile::constant(12, 0.0).unwrap();
        let net = epsilon_net(&cfg, &s, 0.1, DEFAULT_NET_CAP).unwrap();
        assert_eq!(net.len(), 1);
        assert!(net.points[0].is_zero());
    }

    #[test]
    fn single_leading_level_collapses_box() {
        // ||x||_1 >= |x_0|, so s_1 = 0 forces the whole box down to {0}.
        let cfg = SpaceConfig::default();
        let mut v = vec![0.0; 12];
        v[0] = 1.0;
        let s = SeminormProfile::new(v).unwrap();
        let net = epsilon_net(&cfg, &s, 0.1, DEFAULT_NET_CAP).unwrap();
        assert_eq!(net.len(), 1);
        assert!(net.points[0].is_zero());
    }

    #[test]
    fn one_coordinate_exact_cover() {
        // With a single coefficient every seminorm is |x_0| and the box is [-1, 1].
        let cfg = SpaceConfig::new(12, 1).unwrap();
        let s = SeminormProfile::constant(12, 1.0).unwrap();
        let eps = 0.1;
        let net = epsilon_net(&cfg, &s, eps, DEFAULT_NET_CAP).unwrap();
        // half pitch g^{-1}(0.1) = 1/9, so ceil(1 / (1/9)) = 9 cells
        assert_eq!(net.len(), 9);
        let m = MetricHandle::Canonical;
        for p in &net.points {
            assert!(pi_membership(p, &s).unwrap());
        }
        // the worst point of [-1, 1] sits halfway between lattice points
        let mut worst = 0.0f64;
        for i in 0..=2000 {
            let x = GradedVector::from_coeffs(cfg, vec![-1.0 + i as f64 * 1e-3]).unwrap();
            let best = net
                .points
                .iter()
                .map(|p| m.distance(&x, p).unwrap())
                .fold(f64::INFINITY, f64::min);
            worst = worst.max(best);
        }
        assert!(worst <= eps + 1e-12, "worst {worst}");
    }

    #[test]
    fn cap_is_enforced() {
        let cfg = SpaceConfig::default();
        let s = SeminormProfile::constant(12, 1.0).unwrap();
        match epsilon_net(&cfg, &s, 1e-6, 1000) {
            Err(GradedError::NetTooLarge { required, cap }) => {
                assert_eq!(cap, 1000);
                assert!(required > 1000.0);
            }
            other => panic!("expected NetTooLarge, got {other:?}"),
        }
    }

    #[test]
    fn rejects_non_positive_eps() {
        let cfg = SpaceConfig::default();
        let s = SeminormProfile::constant(12, 1.0).unwrap();
        assert!(epsilon_net(&cfg, &s, 0.0, 10).is_err());
    }
}
