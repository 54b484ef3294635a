use serde::Serialize;

use crate::graded::{saturate, GradedError, GradedVector, SeminormProfile, SpaceConfig};

/// A regraded view of the space: level `n < levels` reads seminorm `n + shift`.
///
/// With `shift = d` this is the reindexing that turns a tame bound with loss
/// `d` into a box inclusion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Grading {
    pub levels: usize,
    pub shift: usize,
}

impl Grading {
    pub fn new(config: &SpaceConfig, levels: usize, shift: usize) -> Result<Self, GradedError> {
        if levels == 0 || levels + shift > config.levels {
            return Err(GradedError::InvalidConfig(format!(
                "grading of {levels} levels shifted by {shift} does not fit {} levels",
                config.levels
            )));
        }
        Ok(Self { levels, shift })
    }

    /// `max_{n < levels} 2^{-n} g(||v||_{n+shift})`.
    pub fn magnitude(&self, v: &GradedVector) -> f64 {
        let s = v.seminorms();
        let mut scale = 1.0;
        let mut best = 0.0f64;
        for n in 0..self.levels {
            best = best.max(scale * saturate(s[n + self.shift]));
            scale *= 0.5;
        }
        best
    }

    pub fn distance(&self, a: &GradedVector, b: &GradedVector) -> Result<f64, GradedError> {
        Ok(self.magnitude(&a.checked_sub(b)?))
    }
}

/// The open box `{z : ||z - center||_n < radii_n}` over the levels of `radii`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoxRegion {
    pub center: GradedVector,
    pub radii: SeminormProfile,
}

impl BoxRegion {
    pub fn new(center: GradedVector, radii: SeminormProfile) -> Result<Self, GradedError> {
        if radii.len() > center.config().levels {
            return Err(GradedError::InvalidProfile(
                "region profile is longer than the tracked levels".into(),
            ));
        }
        if radii.levels().iter().any(|&r| r <= 0.0) {
            return Err(GradedError::InvalidProfile(
                "open region needs positive radii".into(),
            ));
        }
        Ok(Self { center, radii })
    }

    pub fn contains(&self, z: &GradedVector) -> Result<bool, GradedError> {
        let s = z.checked_sub(&self.center)?.seminorms();
        Ok(self.radii.levels().iter().zip(&s).all(|(r, v)| v < r))
    }

    /// Whether `x + prod_k [-b_k, b_k]` lies in the region. Exact: the worst
    /// point of the box pushes every coordinate away from the center.
    pub fn contains_box(&self, x: &GradedVector, half_widths: &[f64]) -> Result<bool, GradedError> {
        let diff = x.checked_sub(&self.center)?;
        let cfg = x.config();
        Ok(self.radii.levels().iter().enumerate().all(|(n, &r)| {
            let sup = diff
                .coeffs()
                .iter()
                .zip(half_widths)
                .enumerate()
                .map(|(k, (c, b))| cfg.weight(k, n) * (c.abs() + b))
                .fold(0.0, f64::max);
            sup < r
        }))
    }

    /// Lower bound for the distance from `x` to the complement in `grading`:
    /// `min_n 2^{-n} g(r_n - ||x - center||_n)`. Zero when `x` is outside.
    pub fn distance_to_complement(
        &self,
        x: &GradedVector,
        grading: &Grading,
    ) -> Result<f64, GradedError> {
        if grading.shift != 0 || self.radii.len() > grading.levels {
            return Err(GradedError::InvalidProfile(
                "region levels exceed the unshifted grading".into(),
            ));
        }
        let s = x.checked_sub(&self.center)?.seminorms();
        let mut scale = 1.0;
        let mut m = f64::INFINITY;
        for (n, &r) in self.radii.levels().iter().enumerate() {
            let gap = r - s[n];
            if gap <= 0.0 {
                return Ok(0.0);
            }
            m = m.min(scale * saturate(gap));
            scale *= 0.5;
        }
        // an empty profile constrains nothing; the metric is bounded by 1
        Ok(m.min(1.0))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GraphPair {
    pub x: GradedVector,
    pub y: GradedVector,
}

/// Finite sample of a graph together with the open boxes `U`, `V`.
#[derive(Debug, Clone, Serialize)]
pub struct MultimapSample {
    pub config: SpaceConfig,
    /// Loss of derivatives; the target space is regraded by this shift.
    pub loss: usize,
    pub pairs: Vec<GraphPair>,
    pub u: BoxRegion,
    pub v: BoxRegion,
    /// Coordinates varied by the sample; probes only move these.
    pub active: Vec<usize>,
    /// Declared matching resolution in the regraded target metric.
    pub resolution: f64,
}

impl MultimapSample {
    /// Source and target gradings truncated to `N - d` levels.
    pub fn gradings(&self) -> Result<(Grading, Grading), GradedError> {
        let levels = self
            .config
            .levels
            .checked_sub(self.loss)
            .filter(|&l| l > 0)
            .ok_or_else(|| GradedError::InvalidConfig("loss exceeds tracked levels".into()))?;
        Ok((
            Grading::new(&self.config, levels, 0)?,
            Grading::new(&self.config, levels, self.loss)?,
        ))
    }

    fn qualifying(&self) -> Result<Vec<usize>, GradedError> {
        let mut out = Vec::new();
        for (i, p) in self.pairs.iter().enumerate() {
            if self.u.contains(&p.x)? && self.v.contains(&p.y)? {
                out.push(i);
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// Every probe was matched within the resolution. This is evidence, not a
    /// proof of the set inclusion.
    Consistent,
    Inconsistent,
    /// Nothing could be probed.
    Vacuous,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeOutcome {
    pub pair: usize,
    /// Target offset on the active coordinates.
    pub offset: Vec<f64>,
    pub matched: Option<usize>,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeakPiReport {
    pub kappa: f64,
    pub resolution: f64,
    pub levels: usize,
    pub shift: usize,
    pub qualifying_pairs: usize,
    pub probed_pairs: usize,
    pub outside_v: usize,
    pub unmatched: usize,
    pub worst: f64,
    pub verdict: Verdict,
    pub probes: Vec<ProbeOutcome>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadiusReport {
    /// `r / m_U(x)`.
    pub fraction: f64,
    pub probes: usize,
    /// Targets at metric distance `>= 1`, which the bounded metric cannot
    /// express; skipped, not counted against the verdict.
    pub unreachable: usize,
    pub unmatched: usize,
    pub worst: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OpennessReport {
    pub theta: f64,
    pub resolution: f64,
    pub levels: usize,
    pub shift: usize,
    pub qualifying_pairs: usize,
    pub probed_pairs: usize,
    pub outside_v: usize,
    pub radii: Vec<RadiusReport>,
    pub worst: f64,
    pub verdict: Verdict,
}

/// Offsets along the active coordinates: every `±w_k e_k` and every sign corner.
fn sign_patterns(active: &[usize]) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    for i in 0..active.len() {
        for sign in [1.0, -1.0] {
            let mut v = vec![0.0; active.len()];
            v[i] = sign;
            out.push(v);
        }
    }
    if active.len() > 1 && active.len() <= 6 {
        for mask in 0..(1u32 << active.len()) {
            out.push(
                (0..active.len())
                    .map(|i| if mask >> i & 1 == 1 { -1.0 } else { 1.0 })
                    .collect(),
            );
        }
    }
    out
}

fn embed(config: SpaceConfig, active: &[usize], weights: &[f64]) -> GradedVector {
    let mut c = vec![0.0; config.coeffs];
    for (&k, &w) in active.iter().zip(weights) {
        c[k] = w;
    }
    GradedVector::from_coeffs(config, c).expect("finite offsets")
}

/// Evenly spaced subset of `items` with at most `count` elements.
fn spread(items: &[usize], count: usize) -> Vec<usize> {
    if items.len() <= count {
        return items.to_vec();
    }
    (0..count).map(|i| items[i * items.len() / count]).collect()
}

fn nearest(
    sample: &MultimapSample,
    admissible: impl Fn(&GraphPair) -> Result<bool, GradedError>,
    target: &GradedVector,
    grading: &Grading,
) -> Result<(Option<usize>, f64), GradedError> {
    let mut best = (None, f64::INFINITY);
    for (i, p) in sample.pairs.iter().enumerate() {
        if !admissible(p)? {
            continue;
        }
        let d = grading.distance(&p.y, target)?;
        if d < best.1 {
            best = (Some(i), d);
        }
    }
    Ok(best)
}

fn verdict(probed: usize, unmatched: usize) -> Verdict {
    if probed == 0 {
        Verdict::Vacuous
    } else if unmatched == 0 {
        Verdict::Consistent
    } else {
        Verdict::Inconsistent
    }
}

/// Probes `{y + kappa Pi_s(Y)} ∩ V` around every qualifying pair and reports
/// the nearest sampled image of `x + Pi_s(X)`. `Y` is regraded by the loss.
pub fn check_weak_pi_surjectivity(
    sample: &MultimapSample,
    kappa: f64,
    s: &SeminormProfile,
    probe_budget: usize,
) -> Result<WeakPiReport, GradedError> {
    if !(kappa > 0.0) {
        return Err(GradedError::NonPositive {
            name: "kappa",
            value: kappa,
        });
    }
    let (gx, gy) = sample.gradings()?;
    if s.len() > gx.levels {
        return Err(GradedError::InvalidProfile(format!(
            "profile has {} levels, the regraded space tracks {}",
            s.len(),
            gx.levels
        )));
    }
    let cfg = sample.config;
    let bx = s.box_half_widths(&cfg)?;
    let by = s.scaled(kappa).box_half_widths_shifted(&cfg, sample.loss)?;
    let slack = cfg.membership_slack;

    let mut qualifying = Vec::new();
    for i in sample.qualifying()? {
        if sample.u.contains_box(&sample.pairs[i].x, &bx)? {
            qualifying.push(i);
        }
    }
    let patterns = sign_patterns(&sample.active);
    let per_pair = patterns.len().max(1);
    let chosen = spread(&qualifying, (probe_budget / per_pair).max(1));

    let mut probes = Vec::new();
    let mut outside_v = 0;
    for &i in &chosen {
        let GraphPair { x, y } = &sample.pairs[i];
        for pattern in &patterns {
            let offset: Vec<f64> = pattern
                .iter()
                .zip(&sample.active)
                .map(|(sg, &k)| sg * by[k])
                .collect();
            let z = y.checked_add(&embed(cfg, &sample.active, &offset))?;
            if !sample.v.contains(&z)? {
                outside_v += 1;
                continue;
            }
            let in_box = |p: &GraphPair| -> Result<bool, GradedError> {
                Ok(p.x
                    .coeffs()
                    .iter()
                    .zip(x.coeffs())
                    .zip(&bx)
                    .all(|((a, b), w)| (a - b).abs() <= w + slack))
            };
            let (matched, distance) = nearest(sample, in_box, &z, &gy)?;
            probes.push(ProbeOutcome {
                pair: i,
                offset,
                matched,
                distance,
            });
        }
    }
    let unmatched = probes
        .iter()
        .filter(|p| !(p.distance <= sample.resolution))
        .count();
    let worst = probes.iter().map(|p| p.distance).fold(0.0, f64::max);
    Ok(WeakPiReport {
        kappa,
        resolution: sample.resolution,
        levels: gx.levels,
        shift: gy.shift,
        qualifying_pairs: qualifying.len(),
        probed_pairs: chosen.len(),
        outside_v,
        unmatched,
        worst,
        verdict: verdict(probes.len(), unmatched),
        probes,
    })
}

/// Solves `grading.magnitude(tau * direction) = level` for `tau > 0`.
fn scale_to(grading: &Grading, direction: &GradedVector, level: f64) -> Option<f64> {
    let f = |tau: f64| grading.magnitude(&direction.scaled(tau));
    let mut hi = 1.0;
    while f(hi) < level {
        hi *= 2.0;
        if hi > 1e300 {
            return None;
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < level {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(lo)
}

const RADIUS_FRACTIONS: [f64; 3] = [0.25, 0.5, 0.75];

/// Probes `B(y; theta r) ∩ V` for `r < m_U(x)` and reports the nearest image
/// of `B(x; r)` per sampled radius.
pub fn check_openness(
    sample: &MultimapSample,
    theta: f64,
    probe_budget: usize,
) -> Result<OpennessReport, GradedError> {
    if !(theta > 0.0) {
        return Err(GradedError::NonPositive {
            name: "theta",
            value: theta,
        });
    }
    let (gx, gy) = sample.gradings()?;
    let cfg = sample.config;
    let patterns = sign_patterns(&sample.active);
    let directions: Vec<GradedVector> = patterns
        .iter()
        .map(|p| embed(cfg, &sample.active, p))
        .collect();

    let mut qualifying = Vec::new();
    let mut margins = Vec::new();
    for i in sample.qualifying()? {
        let m = sample.u.distance_to_complement(&sample.pairs[i].x, &gx)?;
        if m > 0.0 {
            qualifying.push(i);
            margins.push(m);
        }
    }
    let per_pair = (directions.len() * RADIUS_FRACTIONS.len()).max(1);
    let chosen = spread(
        &(0..qualifying.len()).collect::<Vec<_>>(),
        (probe_budget / per_pair).max(1),
    );

    let mut radii: Vec<RadiusReport> = RADIUS_FRACTIONS
        .iter()
        .map(|&fraction| RadiusReport {
            fraction,
            probes: 0,
            unreachable: 0,
            unmatched: 0,
            worst: 0.0,
        })
        .collect();
    let mut outside_v = 0;
    for &q in &chosen {
        let i = qualifying[q];
        let m = margins[q];
        let GraphPair { x, y } = &sample.pairs[i];
        for report in radii.iter_mut() {
            let r = report.fraction * m;
            for dir in &directions {
                let Some(tau) = scale_to(&gy, dir, theta * r).filter(|_| theta * r < 1.0) else {
                    report.unreachable += 1;
                    continue;
                };
                let z = y.axpy(tau, dir)?;
                if !sample.v.contains(&z)? {
                    outside_v += 1;
                    continue;
                }
                let in_ball = |p: &GraphPair| Ok(gx.distance(&p.x, x)? <= r);
                let (_, distance) = nearest(sample, in_ball, &z, &gy)?;
                report.probes += 1;
                report.worst = report.worst.max(distance);
                if !(distance <= sample.resolution) {
                    report.unmatched += 1;
                }
            }
        }
    }
    let probed: usize = radii.iter().map(|r| r.probes).sum();
    let unmatched: usize = radii.iter().map(|r| r.unmatched).sum();
    let worst = radii.iter().map(|r| r.worst).fold(0.0, f64::max);
    Ok(OpennessReport {
        theta,
        resolution: sample.resolution,
        levels: gx.levels,
        shift: gy.shift,
        qualifying_pairs: qualifying.len(),
        probed_pairs: chosen.len(),
        outside_v,
        radii,
        worst,
        verdict: verdict(probed, unmatched),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> SpaceConfig {
        SpaceConfig::new(6, 4).unwrap()
    }

    fn identity_sample(pitch: f64, bound: f64) -> MultimapSample {
        let c = cfg();
        let steps = (bound / pitch).round() as i64;
        let pairs = (-steps..=steps)
            .map(|i| {
                let x = GradedVector::from_prefix(c, &[i as f64 * pitch]).unwrap();
                GraphPair { x: x.clone(), y: x }
            })
            .collect();
        let big = SeminormProfile::constant(6, 10.0).unwrap();
        MultimapSample {
            config: c,
            loss: 0,
            pairs,
            u: BoxRegion::new(
                GradedVector::zeros(c),
                SeminormProfile::constant(6, bound * 0.8).unwrap(),
            )
            .unwrap(),
            v: BoxRegion::new(GradedVector::zeros(c), big).unwrap(),
            active: vec![0],
            resolution: 1e-12,
        }
    }

    #[test]
    fn grading_shift_reads_higher_levels() {
        let c = cfg();
        let e1 = GradedVector::basis(c, 1).unwrap();
        let g = Grading::new(&c, 5, 1).unwrap();
        // level 0 reads ||e_1||_1 = 2
        assert_eq!(g.magnitude(&e1), saturate(2.0));
        assert!(Grading::new(&c, 6, 1).is_err());
    }

    #[test]
    fn box_containment_is_exact() {
        let c = cfg();
        let u = BoxRegion::new(
            GradedVector::zeros(c),
            SeminormProfile::new(vec![1.0]).unwrap(),
        )
        .unwrap();
        let x = GradedVector::from_prefix(c, &[0.5]).unwrap();
        assert!(u.contains_box(&x, &[0.49, 0.0, 0.0, 0.0]).unwrap());
        assert!(!u.contains_box(&x, &[0.5, 0.0, 0.0, 0.0]).unwrap());
    }

    #[test]
    fn complement_distance_is_a_lower_bound() {
        let c = cfg();
        let u = BoxRegion::new(
            GradedVector::zeros(c),
            SeminormProfile::new(vec![1.0]).unwrap(),
        )
        .unwrap();
        let g = Grading::new(&c, 6, 0).unwrap();
        let x = GradedVector::from_prefix(c, &[0.5]).unwrap();
        let m = u.distance_to_complement(&x, &g).unwrap();
        assert_eq!(m, saturate(0.5));
        // the nearest outside point along e_0
        let out = GradedVector::from_prefix(c, &[1.0]).unwrap();
        assert!(g.distance(&x, &out).unwrap() >= m);
        let far = GradedVector::from_prefix(c, &[2.0]).unwrap();
        assert_eq!(u.distance_to_complement(&far, &g).unwrap(), 0.0);
    }

    #[test]
    fn identity_is_weakly_surjective_exactly() {
        let sample = identity_sample(0.125, 1.0);
        let s = SeminormProfile::constant(6, 0.125).unwrap();
        let rep = check_weak_pi_surjectivity(&sample, 1.0, &s, 1000).unwrap();
        assert_eq!(rep.verdict, Verdict::Consistent);
        assert_eq!(rep.worst, 0.0);
    }

    #[test]
    fn identity_is_open() {
        let sample = identity_sample(0.125, 1.0);
        let rep = check_openness(&sample, 1.0, 1000).unwrap();
        assert_ne!(rep.verdict, Verdict::Vacuous);
        assert!(rep.worst < 0.2, "{rep:?}");
    }

    #[test]
    fn no_qualifying_pair_is_vacuous() {
        let mut sample = identity_sample(0.5, 1.0);
        sample.pairs.clear();
        let s = SeminormProfile::new(vec![0.1]).unwrap();
        let rep = check_weak_pi_surjectivity(&sample, 1.0, &s, 10).unwrap();
        assert_eq!(rep.verdict, Verdict::Vacuous);
    }
}
