//! Seeded randomized property suites, shared by the test targets and the CLI.
//!
//! Every suite is deterministic given its seed. The float slack is
//! configurable; setting it to zero turns the suites into a negative control
//! that exposes rounding.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::graded::{
    epsilon_net, key_inclusion_check, pi_membership, remetrize, s_norm, EpsilonNet, GradedVector,
    MetricHandle, SeminormProfile, SpaceConfig, DEFAULT_MEMBERSHIP_SLACK, DEFAULT_NET_CAP,
};
use crate::variational::{
    ekeland_point, run_orbit, verify_orbit, FiniteMetricSpace, FnStepMap, OrbitCase, OrbitOptions,
    OrbitOutcome, StepMap,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SuiteName {
    MetricAxioms,
    KeyInclusion,
    BanachIdentity,
    NetCovering,
    EkelandExhaustive,
    OrbitTrichotomy,
}

impl SuiteName {
    pub const ALL: [SuiteName; 6] = [
        SuiteName::MetricAxioms,
        SuiteName::KeyInclusion,
        SuiteName::BanachIdentity,
        SuiteName::NetCovering,
        SuiteName::EkelandExhaustive,
        SuiteName::OrbitTrichotomy,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            SuiteName::MetricAxioms => "metric_axioms",
            SuiteName::KeyInclusion => "key_inclusion",
            SuiteName::BanachIdentity => "banach_identity",
            SuiteName::NetCovering => "net_covering",
            SuiteName::EkelandExhaustive => "ekeland_exhaustive",
            SuiteName::OrbitTrichotomy => "orbit_trichotomy",
        }
    }

    /// Per-suite stream offset so a suite gives the same result alone or in a batch.
    fn stream(&self) -> u64 {
        Self::ALL.iter().position(|s| s == self).expect("listed") as u64 + 1
    }
}

impl fmt::Display for SuiteName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SuiteName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|n| n.as_str() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Self::ALL.iter().map(|n| n.as_str()).collect();
                format!("unknown suite `{s}`; expected one of {}", names.join(", "))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuiteOptions {
    pub seed: u64,
    /// Float slack for inequalities and box membership.
    pub slack: f64,
    pub config: SpaceConfig,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            slack: DEFAULT_MEMBERSHIP_SLACK,
            config: SpaceConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub name: SuiteName,
    pub seed: u64,
    pub slack: f64,
    pub trials: usize,
    pub failures: usize,
    /// Largest observed violation (0 when every check held with room to spare).
    pub worst_violation: f64,
    pub pass: bool,
    pub notes: Vec<String>,
}

struct Tally {
    trials: usize,
    failures: usize,
    worst: f64,
    notes: Vec<String>,
}

impl Tally {
    fn new() -> Self {
        Self {
            trials: 0,
            failures: 0,
            worst: 0.0,
            notes: Vec::new(),
        }
    }

    /// Records `lhs <= rhs + slack`.
    fn le(&mut self, lhs: f64, rhs: f64, slack: f64) {
        self.trials += 1;
        let excess = lhs - rhs;
        if excess > 0.0 {
            self.worst = self.worst.max(excess);
        }
        if !(excess <= slack) {
            self.failures += 1;
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.trials += 1;
        if !ok {
            self.failures += 1;
            if self.notes.len() < 10 {
                self.notes.push(what());
            }
        }
    }

    fn finish(self, name: SuiteName, opts: &SuiteOptions) -> SuiteReport {
        SuiteReport {
            name,
            seed: opts.seed,
            slack: opts.slack,
            trials: self.trials,
            pass: self.failures == 0,
            failures: self.failures,
            worst_violation: self.worst,
            notes: self.notes,
        }
    }
}

pub fn run_suite(name: SuiteName, opts: &SuiteOptions) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    rng.set_stream(name.stream());
    match name {
        SuiteName::MetricAxioms => metric_axioms(&mut rng, opts, 10_000),
        SuiteName::KeyInclusion => key_inclusion(&mut rng, opts, 1_000),
        SuiteName::BanachIdentity => banach_identity(&mut rng, opts, 1_000),
        SuiteName::NetCovering => net_covering(&mut rng, opts, &[0.1, 0.05], 10_000),
        SuiteName::EkelandExhaustive => ekeland_exhaustive(&mut rng, opts, 100, 200),
        SuiteName::OrbitTrichotomy => orbit_trichotomy(opts),
    }
}

/// Random vector with decaying coefficients `x_k ~ A u_k (1+k)^{-p}`.
///
/// Without decay the top seminorms reach `64^11` and float comparisons at a
/// fixed absolute slack are meaningless.
pub fn random_vector(rng: &mut impl Rng, config: SpaceConfig) -> GradedVector {
    let amp = 10f64.powf(rng.gen_range(-3.0..1.0));
    let lv = config.levels as f64;
    let p = rng.gen_range(lv - 3.0..lv + 2.0).max(0.0);
    let coeffs = (0..config.coeffs)
        .map(|k| amp * rng.gen_range(-1.0..1.0) * ((1 + k) as f64).powf(-p))
        .collect();
    GradedVector::from_coeffs(config, coeffs).expect("finite")
}

/// Random profile with log-uniform entries and occasional zeros.
pub fn random_profile(rng: &mut impl Rng, levels: usize, zero_prob: f64) -> SeminormProfile {
    let mut v: Vec<f64> = (0..levels)
        .map(|_| {
            if rng.gen_bool(zero_prob) {
                0.0
            } else {
                10f64.powf(rng.gen_range(-2.0..2.0))
            }
        })
        .collect();
    if v.iter().all(|&s| s == 0.0) {
        v[0] = 1.0;
    }
    SeminormProfile::new(v).expect("valid profile")
}

/// Uniform point of the coordinate box `t Pi_s`.
pub fn random_box_point(
    rng: &mut impl Rng,
    config: SpaceConfig,
    s: &SeminormProfile,
    t: f64,
) -> GradedVector {
    let b = s.box_half_widths(&config).expect("profile fits");
    let coeffs = b
        .iter()
        .map(|w| {
            if *w == 0.0 {
                0.0
            } else {
                t * w * rng.gen_range(-1.0..1.0)
            }
        })
        .collect();
    GradedVector::from_coeffs(config, coeffs).expect("finite")
}

fn metric_axioms(rng: &mut ChaCha8Rng, opts: &SuiteOptions, trials: usize) -> SuiteReport {
    let cfg = opts.config;
    let mut tally = Tally::new();
    let mut handles = vec![MetricHandle::Canonical];
    for j in [0usize, 3.min(cfg.coeffs - 1)] {
        let mut xbar = random_vector(rng, cfg);
        let mut c = xbar.clone().into_coeffs();
        // keep the normalizing coordinate away from zero
        c[j] = if c[j] >= 0.0 { 0.5 } else { -0.5 };
        xbar = GradedVector::from_coeffs(cfg, c).expect("finite");
        handles.push(remetrize(&xbar, j).expect("nonzero coordinate"));
    }
    let per = trials;
    for _ in 0..per {
        let x = random_vector(rng, cfg);
        let y = random_vector(rng, cfg);
        let z = random_vector(rng, cfg);
        for m in &handles {
            let dxy = m.distance(&x, &y).expect("same config");
            let dyx = m.distance(&y, &x).expect("same config");
            let dyz = m.distance(&y, &z).expect("same config");
            let dxz = m.distance(&x, &z).expect("same config");
            tally.check(dxy == dyx, || format!("symmetry: {dxy} vs {dyx}"));
            tally.check(m.distance(&x, &x).expect("same config") == 0.0, || {
                "rho(x, x) != 0".into()
            });
            tally.le(dxz, dxy + dyz, opts.slack);
            let shifted = m.distance(&(&x + &z), &(&y + &z)).expect("same config");
            tally.le((shifted - dxy).abs(), 0.0, opts.slack);
        }
    }
    tally.notes.push(format!(
        "{} triples x {} metrics (canonical + 2 remetrized)",
        per,
        handles.len()
    ));
    tally.finish(SuiteName::MetricAxioms, opts)
}

fn key_inclusion(rng: &mut ChaCha8Rng, opts: &SuiteOptions, trials: usize) -> SuiteReport {
    let cfg = SpaceConfig {
        membership_slack: opts.slack,
        ..opts.config
    };
    let zero = GradedVector::zeros(cfg);
    let mut tally = Tally::new();
    for _ in 0..trials {
        let s = random_profile(rng, cfg.levels, 0.1);
        let c = rng.gen_range(1.0..10.0);
        let x = random_box_point(rng, cfg, &s, c);
        let inside = pi_membership(&x, &s.scaled(c)).expect("fits");
        tally.check(inside, || "sampled point left c Pi_s".into());
        let rho = MetricHandle::Canonical
            .distance(&zero, &x)
            .expect("same config");
        tally.le(rho, c * s.magnitude(), opts.slack);
        let probe = key_inclusion_check(&x, &s, c).expect("valid probe");
        tally.check(probe, || {
            format!("probe failed: rho {rho} vs c|s| {}", c * s.magnitude())
        });
    }
    tally.finish(SuiteName::KeyInclusion, opts)
}

fn banach_identity(rng: &mut ChaCha8Rng, opts: &SuiteOptions, trials: usize) -> SuiteReport {
    let cfg = SpaceConfig {
        membership_slack: opts.slack,
        ..opts.config
    };
    let mut tally = Tally::new();
    let mut inside = 0usize;
    for i in 0..trials {
        let s = random_profile(rng, cfg.levels, 0.1);
        let x = if i % 10 == 0 {
            // exact tie: with a nondecreasing profile, s_0 e_0 has ||x||_s = 1
            let mut v = s.levels().to_vec();
            if v[0] == 0.0 {
                v[0] = 1.0;
            }
            for n in 1..v.len() {
                v[n] = v[n].max(v[n - 1]);
            }
            let s = SeminormProfile::new(v).expect("valid");
            let x = GradedVector::basis(cfg, 0)
                .expect("k = 0")
                .scaled(s.levels()[0]);
            let norm = s_norm(&x, &s).expect("nonempty support");
            let member = pi_membership(&x, &s).expect("fits");
            tally.check(norm == 1.0 && member, || format!("tie: norm {norm}"));
            continue;
        } else {
            let t = rng.gen_range(0.0..2.0);
            random_box_point(rng, cfg, &s, t)
        };
        let norm = s_norm(&x, &s).expect("nonempty support");
        let member = pi_membership(&x, &s).expect("fits");
        if member {
            inside += 1;
        }
        tally.check((norm <= 1.0) == member, || {
            format!("||x||_s = {norm} but membership = {member}")
        });
    }
    tally.notes.push(format!(
        "{inside} random pairs inside the box, plus exact ties"
    ));
    tally.finish(SuiteName::BanachIdentity, opts)
}

fn net_covering(
    rng: &mut ChaCha8Rng,
    opts: &SuiteOptions,
    epsilons: &[f64],
    samples: usize,
) -> SuiteReport {
    let cfg = opts.config;
    let zero = GradedVector::zeros(cfg);
    let s = SeminormProfile::constant(cfg.levels, 1.0).expect("valid");
    let mut tally = Tally::new();
    for &eps in epsilons {
        let net = match epsilon_net(&cfg, &s, eps, DEFAULT_NET_CAP) {
            Ok(net) => net,
            Err(e) => {
                tally.check(false, || format!("eps {eps}: {e}"));
                continue;
            }
        };
        for p in &net.points {
            tally.check(pi_membership(p, &s).expect("fits"), || {
                "net point outside box".into()
            });
        }
        let mut worst = 0.0f64;
        for _ in 0..samples {
            let x = random_box_point(rng, cfg, &s, 1.0);
            let d = net
                .points
                .iter()
                .map(|p| {
                    MetricHandle::Canonical
                        .distance(&x, p)
                        .expect("same config")
                })
                .fold(f64::INFINITY, f64::min);
            worst = worst.max(d);
            tally.le(d, net.radius, opts.slack);
        }
        debug_assert!(zero.is_zero());
        tally.notes.push(format!(
            "eps {eps}: {} net points, empirical radius {worst:.6}, published {}",
            net.len(),
            net.radius
        ));
    }
    tally.finish(SuiteName::NetCovering, opts)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NetCoverage {
    pub samples: usize,
    /// Largest distance from a sampled box point to its nearest net point.
    pub worst: f64,
    /// Samples farther than the published radius plus slack.
    pub uncovered: usize,
}

/// Measures how well `net` covers its box on `samples` uniform box points.
pub fn net_coverage(
    config: SpaceConfig,
    net: &EpsilonNet,
    samples: usize,
    seed: u64,
    slack: f64,
) -> NetCoverage {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    let mut uncovered = 0;
    for _ in 0..samples {
        let x = random_box_point(&mut rng, config, &net.profile, 1.0);
        let d = net
            .points
            .iter()
            .map(|p| {
                MetricHandle::Canonical
                    .distance(&x, p)
                    .expect("same config")
            })
            .fold(f64::INFINITY, f64::min);
        worst = worst.max(d);
        if !(d <= net.radius + slack) {
            uncovered += 1;
        }
    }
    NetCoverage {
        samples,
        worst,
        uncovered,
    }
}

/// Independent brute-force check of the three Ekeland conditions.
fn ekeland_conditions_hold(
    space: &FiniteMetricSpace,
    f: &[f64],
    y: usize,
    x: usize,
    eps: f64,
    lam: f64,
    slack: f64,
) -> bool {
    let r = space.dist(x, y);
    let descent = lam * r <= f[y] - f[x] + slack;
    let proximity = r <= eps + slack;
    let minimal = (0..space.len()).all(|z| lam * space.dist(z, x) + f[z] >= f[x] - slack);
    descent && proximity && minimal
}

fn ekeland_exhaustive(
    rng: &mut ChaCha8Rng,
    opts: &SuiteOptions,
    spaces: usize,
    max_points: usize,
) -> SuiteReport {
    let mut tally = Tally::new();
    for _ in 0..spaces {
        let n = rng.gen_range(1..=max_points);
        let dim = rng.gen_range(1..=3);
        let pts: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect();
        let space = match FiniteMetricSpace::euclidean(&pts) {
            Ok(s) => s,
            Err(e) => {
                // coincident random points; nothing to test
                tally.notes.push(format!("skipped space: {e}"));
                continue;
            }
        };
        let mut f: Vec<f64> = (0..n)
            .map(|_| {
                if rng.gen_bool(0.1) {
                    f64::INFINITY
                } else {
                    rng.gen_range(0.0..5.0)
                }
            })
            .collect();
        let y = rng.gen_range(0..n);
        if !f[y].is_finite() {
            f[y] = rng.gen_range(0.0..5.0);
        }
        let lam = rng.gen_range(0.1..3.0);
        let inf = f.iter().copied().fold(f64::INFINITY, f64::min);
        let eps = (f[y] - inf) / lam + rng.gen_range(0.01..1.0);
        match ekeland_point(&space, &f, y, eps, lam) {
            Ok(res) => {
                let ok = ekeland_conditions_hold(&space, &f, y, res.x_hat, eps, lam, opts.slack);
                tally.check(ok, || format!("conditions fail at x_hat = {}", res.x_hat));
                let descending = res.path.windows(2).all(|w| f[w[1]] < f[w[0]]);
                tally.check(descending, || "objective not strictly decreasing".into());
            }
            Err(e) => tally.check(false, || format!("engine error: {e}")),
        }
    }
    tally.finish(SuiteName::EkelandExhaustive, opts)
}

fn line(a: &f64, b: &f64) -> f64 {
    (a - b).abs()
}

/// Runs a scripted map, compares the case with the ground truth and returns
/// the outcome for tampering.
#[allow(clippy::too_many_arguments)]
fn scripted<M: StepMap>(
    tally: &mut Tally,
    label: &str,
    map: &M,
    x0: M::Point,
    metric: &dyn Fn(&M::Point, &M::Point) -> f64,
    options: OrbitOptions,
    truth: OrbitCase,
    truth_len: Option<usize>,
) -> Option<OrbitOutcome<M::Point>> {
    match run_orbit(map, x0, metric, options) {
        Ok(out) => {
            tally.check(out.case == truth, || {
                format!("{label}: classified {:?}, expected {truth:?}", out.case)
            });
            if let Some(len) = truth_len {
                let steps = out.trace.len() - 1;
                tally.check(steps == len, || {
                    format!("{label}: {steps} steps, expected {len}")
                });
            }
            let v = verify_orbit(&out, map, metric);
            tally.check(v.ok, || {
                format!("{label}: verification failed {:?}", v.reasons)
            });
            Some(out)
        }
        Err(e) => {
            tally.check(false, || format!("{label}: {e}"));
            None
        }
    }
}

fn orbit_trichotomy(opts: &SuiteOptions) -> SuiteReport {
    let mut tally = Tally::new();
    let default = OrbitOptions::default();
    let mut maps = 0usize;

    // Grids {0, 1/m, ..., 1} with S(x) = {points > x}: the half-sup rule jumps
    // to the first grid point beyond the midpoint of what is left, and the
    // orbit dies at 1, which is outside M'.
    let mut grid_out = None;
    for m in 1..=10u32 {
        let grid: Vec<f64> = (0..=m).map(|i| i as f64 / m as f64).collect();
        let g = grid.clone();
        let map = FnStepMap::new(
            move |x: &f64| g.iter().copied().filter(|p| p > x).collect(),
            |x: &f64| *x != 1.0,
        );
        // ground truth by hand: from x the candidates are the grid points > x,
        // s = 1 - x, and the first point with p - x > s/2 is taken
        let mut steps = 0;
        let mut x = 0.0f64;
        while x < 1.0 {
            let s = (1.0 - x).min(1.0);
            x = *grid
                .iter()
                .find(|&&p| p > x && p - x > s / 2.0)
                .expect("1 qualifies");
            steps += 1;
        }
        let out = scripted(
            &mut tally,
            &format!("grid m={m}"),
            &map,
            0.0,
            &line,
            default,
            OrbitCase::B1,
            Some(steps),
        );
        maps += 1;
        if m == 4 {
            grid_out = out.map(|o| (o, map));
        }
    }

    // Unit-free rays S(x) = {x + h}: case A after ceil(T / h) steps.
    let mut ray_out = None;
    for (i, h) in [1.0, 0.5, 2.0, 0.25, 4.0, 1.5, 0.75, 3.0, 0.125, 5.0]
        .into_iter()
        .enumerate()
    {
        let threshold = 100.0;
        let map = FnStepMap::new(move |x: &f64| vec![x + h], |_: &f64| true);
        let opts_a = OrbitOptions {
            divergence_threshold: threshold,
            ..default
        };
        let steps = (threshold / h).ceil() as usize;
        let metric = |a: &f64, b: &f64| (a - b).abs();
        let out = scripted(
            &mut tally,
            &format!("ray h={h}"),
            &map,
            0.0,
            &metric,
            opts_a,
            OrbitCase::A,
            Some(steps),
        );
        maps += 1;
        if i == 0 {
            ray_out = out.map(|o| (o, map));
        }
    }

    // Geometric orbits: point i sits at q^i, the limit 0 is outside M'.
    let mut geo_out = None;
    for (i, q) in [0.5f64, 0.3, 0.1, 0.6, 0.45, 0.2, 0.35, 0.55, 0.25, 0.4]
        .into_iter()
        .enumerate()
    {
        let cutoff = 3 + i as i32;
        let map = FnStepMap::new(|i: &i32| vec![i + 1], move |i: &i32| *i < cutoff);
        let metric = move |a: &i32, b: &i32| (q.powi(*a) - q.powi(*b)).abs();
        let out = scripted(
            &mut tally,
            &format!("geometric q={q}"),
            &map,
            0,
            &metric,
            default,
            OrbitCase::B2,
            None,
        );
        maps += 1;
        if i == 0 {
            geo_out = out.map(|o| (o, map, metric));
        }
    }

    // Empty values everywhere outside M': immediate B1.
    for x0 in 0..10i64 {
        let map = FnStepMap::new(|_: &i64| Vec::new(), |_: &i64| false);
        let metric = |a: &i64, b: &i64| (a - b).abs() as f64;
        scripted(
            &mut tally,
            &format!("empty x0={x0}"),
            &map,
            x0 * 7 - 20,
            &metric,
            default,
            OrbitCase::B1,
            Some(0),
        );
        maps += 1;
    }

    // Several candidates per point with unit-or-larger jumps: s = 1 and the
    // first candidate beyond 1/2 is taken, so each step has length >= 1/2.
    for (i, offsets) in [
        vec![0.1, 0.4, 0.9],
        vec![0.3, 2.0],
        vec![0.6, 0.2],
        vec![0.05, 0.5, 0.51],
        vec![1.0],
        vec![0.2, 0.3, 0.7, 1.2],
        vec![0.55],
        vec![0.45, 3.0],
        vec![0.01, 0.02, 0.8],
        vec![0.9, 0.1],
    ]
    .into_iter()
    .enumerate()
    {
        let offs = offsets.clone();
        let map = FnStepMap::new(
            move |x: &f64| offs.iter().map(|o| x + o).collect(),
            |_: &f64| true,
        );
        let threshold = 50.0;
        let first = offsets
            .iter()
            .copied()
            .find(|&o| o > offsets.iter().copied().fold(0.0, f64::max).min(1.0) / 2.0)
            .expect("max qualifies");
        let steps = (threshold / first).ceil() as usize;
        let opts_a = OrbitOptions {
            divergence_threshold: threshold,
            ..default
        };
        // float accumulation may shift the crossing by one step
        let out = scripted(
            &mut tally,
            &format!("multi #{i}"),
            &map,
            0.0,
            &line,
            opts_a,
            OrbitCase::A,
            None,
        );
        if let Some(o) = out {
            let got = o.trace.len() - 1;
            tally.check(got.abs_diff(steps) <= 1, || {
                format!("multi #{i}: {got} steps vs {steps}")
            });
        }
        maps += 1;
    }

    // Tampered negative controls: every one must fail verification.
    let mut controls = 0usize;
    let mut expect_reject = |tally: &mut Tally, label: &str, ok: bool| {
        controls += 1;
        tally.check(!ok, || format!("tampered {label} was accepted"));
    };
    if let Some((out, map)) = &grid_out {
        let mut t = out.clone();
        t.trace[1].point = 0.6;
        expect_reject(
            &mut tally,
            "non-candidate step",
            verify_orbit(&t, map, &line).ok,
        );
        let mut t = out.clone();
        t.case = OrbitCase::B2;
        expect_reject(
            &mut tally,
            "B1 relabeled B2",
            verify_orbit(&t, map, &line).ok,
        );
        let mut t = out.clone();
        t.case = OrbitCase::A;
        expect_reject(
            &mut tally,
            "B1 relabeled A",
            verify_orbit(&t, map, &line).ok,
        );
        let mut t = out.clone();
        t.trace[1].sampled_sup = 0.9;
        expect_reject(&mut tally, "altered s_i", verify_orbit(&t, map, &line).ok);
        let mut t = out.clone();
        t.trace.pop();
        expect_reject(
            &mut tally,
            "truncated trace",
            verify_orbit(&t, map, &line).ok,
        );
        let mut t = out.clone();
        t.trace[1].point = 0.25;
        t.trace[1].step_length = 0.25;
        expect_reject(
            &mut tally,
            "half-sup violation",
            verify_orbit(&t, map, &line).ok,
        );
    }
    if let Some((out, map)) = &ray_out {
        let metric = |a: &f64, b: &f64| (a - b).abs();
        let mut t = out.clone();
        t.case = OrbitCase::B1;
        expect_reject(
            &mut tally,
            "A relabeled B1",
            verify_orbit(&t, map, &metric).ok,
        );
        let mut t = out.clone();
        t.cumulative_length += 1.0;
        expect_reject(
            &mut tally,
            "inflated length",
            verify_orbit(&t, map, &metric).ok,
        );
        let mut t = out.clone();
        t.trace[5].step_length = 2.0;
        expect_reject(
            &mut tally,
            "altered step length",
            verify_orbit(&t, map, &metric).ok,
        );
    }
    if let Some((out, map, metric)) = &geo_out {
        let mut t = out.clone();
        t.case = OrbitCase::B1;
        expect_reject(
            &mut tally,
            "B2 relabeled B1",
            verify_orbit(&t, map, metric).ok,
        );
    }
    tally.check(controls == 10, || {
        format!("{controls} negative controls ran, expected 10")
    });
    tally.notes.push(format!(
        "{maps} scripted maps, {controls} tampered controls"
    ));
    tally.finish(SuiteName::OrbitTrichotomy, opts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for n in SuiteName::ALL {
            assert_eq!(n.as_str().parse::<SuiteName>().unwrap(), n);
        }
        assert!("nope".parse::<SuiteName>().is_err());
    }

    #[test]
    fn suites_are_deterministic() {
        let opts = SuiteOptions::default();
        let a = run_suite(SuiteName::KeyInclusion, &opts);
        let b = run_suite(SuiteName::KeyInclusion, &opts);
        assert_eq!(a, b);
    }

    #[test]
    fn orbit_suite_passes() {
        let r = run_suite(SuiteName::OrbitTrichotomy, &SuiteOptions::default());
        assert!(r.pass, "{r:?}");
    }
}
