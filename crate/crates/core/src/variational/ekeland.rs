use serde::Serialize;
use thiserror::Error;

/// Tolerance used when checking metric axioms and the Ekeland conditions in
/// floating point.
pub const DEFAULT_FLOAT_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EkelandError {
    #[error("distance matrix is not square ({rows} rows, row {row} has {len} entries)")]
    NotSquare { rows: usize, row: usize, len: usize },
    #[error("metric space has no points")]
    Empty,
    #[error("metric axiom violated: {0}")]
    NotAMetric(String),
    #[error("objective has {found} values for {expected} points")]
    ObjectiveLength { expected: usize, found: usize },
    #[error("objective is not proper: no finite value")]
    Improper,
    #[error("objective value at point {0} is NaN or -inf")]
    InvalidValue(usize),
    #[error("starting point {0} is out of range")]
    BadStart(usize),
    #[error("f(y_hat) = {value} is not finite")]
    InfiniteStart { value: f64 },
    #[error("premise violated: f(y_hat) = {value} exceeds inf f + eps*lam = {bound}")]
    Premise { value: f64, bound: f64 },
    #[error("{name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("returned point fails verification: {0:?}")]
    Verification(EkelandChecks),
}

/// A finite metric space given by its distance matrix. Finite spaces are complete.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteMetricSpace {
    size: usize,
    dist: Vec<f64>,
}

impl FiniteMetricSpace {
    /// Validates symmetry, zero diagonal, positivity off the diagonal and the
    /// triangle inequality (up to [`DEFAULT_FLOAT_SLACK`], relative to scale).
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self, EkelandError> {
        let size = rows.len();
        if size == 0 {
            return Err(EkelandError::Empty);
        }
        let mut dist = Vec::with_capacity(size * size);
        for (row, r) in rows.iter().enumerate() {
            if r.len() != size {
                return Err(EkelandError::NotSquare {
                    rows: size,
                    row,
                    len: r.len(),
                });
            }
            dist.extend_from_slice(r);
        }
        let space = Self { size, dist };
        space.validate()?;
        Ok(space)
    }

    /// Points on the real line with `|a - b|`.
    pub fn on_line(coords: &[f64]) -> Result<Self, EkelandError> {
        Self::new(
            coords
                .iter()
                .map(|a| coords.iter().map(|b| (a - b).abs()).collect())
                .collect(),
        )
    }

    /// Points of `R^d` with the Euclidean distance.
    pub fn euclidean(points: &[Vec<f64>]) -> Result<Self, EkelandError> {
        Self::new(
            points
                .iter()
                .map(|a| {
                    points
                        .iter()
                        .map(|b| {
                            a.iter()
                                .zip(b)
                                .map(|(u, v)| (u - v) * (u - v))
                                .sum::<f64>()
                                .sqrt()
                        })
                        .collect()
                })
                .collect(),
        )
    }

    fn validate(&self) -> Result<(), EkelandError> {
        let n = self.size;
        for i in 0..n {
            if self.dist(i, i) != 0.0 {
                return Err(EkelandError::NotAMetric(format!("d({i},{i}) != 0")));
            }
            for j in 0..n {
                let d = self.dist(i, j);
                if !d.is_finite() || d < 0.0 {
                    return Err(EkelandError::NotAMetric(format!("d({i},{j}) = {d}")));
                }
                if d != self.dist(j, i) {
                    return Err(EkelandError::NotAMetric(format!(
                        "d({i},{j}) != d({j},{i})"
                    )));
                }
                if i != j && d == 0.0 {
                    return Err(EkelandError::NotAMetric(format!(
                        "distinct points {i} and {j} at distance 0"
                    )));
                }
            }
        }
        for i in 0..n {
            for k in 0..n {
                let dik = self.dist(i, k);
                for j in 0..n {
                    let through = dik + self.dist(k, j);
                    if self.dist(i, j) > through + DEFAULT_FLOAT_SLACK * through.max(1.0) {
                        return Err(EkelandError::NotAMetric(format!(
                            "triangle inequality fails for ({i},{k},{j})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.size + j]
    }
}

/// Outcome of the three Ekeland conditions with their slacks (non-negative when satisfied).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EkelandChecks {
    /// `lam rho(x_hat, y_hat) <= f(y_hat) - f(x_hat)`
    pub descent: bool,
    /// `rho(x_hat, y_hat) <= eps`
    pub proximity: bool,
    /// `lam rho(x, x_hat) + f(x) >= f(x_hat)` for every `x`
    pub minimality: bool,
    pub descent_slack: f64,
    pub proximity_slack: f64,
    pub minimality_slack: f64,
}

impl EkelandChecks {
    pub fn all(&self) -> bool {
        self.descent && self.proximity && self.minimality
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EkelandResult {
    pub x_hat: usize,
    pub checks: EkelandChecks,
    /// Iterates visited from `y_hat` to `x_hat`; `f` strictly decreases along it.
    pub path: Vec<usize>,
}

fn check_objective(space: &FiniteMetricSpace, f: &[f64]) -> Result<f64, EkelandError> {
    if f.len() != space.len() {
        return Err(EkelandError::ObjectiveLength {
            expected: space.len(),
            found: f.len(),
        });
    }
    if let Some(i) = f.iter().position(|v| v.is_nan() || *v == f64::NEG_INFINITY) {
        return Err(EkelandError::InvalidValue(i));
    }
    let inf = f.iter().copied().fold(f64::INFINITY, f64::min);
    if inf == f64::INFINITY {
        return Err(EkelandError::Improper);
    }
    Ok(inf)
}

/// Exhaustively checks the three Ekeland conditions at `x_hat`.
pub fn verify_ekeland(
    space: &FiniteMetricSpace,
    f: &[f64],
    y_hat: usize,
    x_hat: usize,
    eps: f64,
    lam: f64,
    slack: f64,
) -> EkelandChecks {
    let r = space.dist(x_hat, y_hat);
    let descent_slack = f[y_hat] - f[x_hat] - lam * r;
    let proximity_slack = eps - r;
    let minimality_slack = (0..space.len())
        .filter(|&x| f[x].is_finite())
        .map(|x| lam * space.dist(x, x_hat) + f[x] - f[x_hat])
        .fold(f64::INFINITY, f64::min);
    EkelandChecks {
        descent: descent_slack >= -slack,
        proximity: proximity_slack >= -slack,
        minimality: minimality_slack >= -slack,
        descent_slack,
        proximity_slack,
        minimality_slack,
    }
}

/// Finds `x_hat` satisfying the Ekeland conditions for `f` started at `y_hat`.
///
/// From the current point, moves to the strict improver of the perturbed
/// objective `f(x) + lam rho(x, current)` with the smallest `f` value (lowest
/// index on ties). The improver sets are nested by the triangle inequality, so
/// the descent condition is preserved along the chain; the walk stops when no
/// strict improver exists, which gives minimality.
pub fn ekeland_point(
    space: &FiniteMetricSpace,
    f: &[f64],
    y_hat: usize,
    eps: f64,
    lam: f64,
) -> Result<EkelandResult, EkelandError> {
    if !(eps > 0.0) {
        return Err(EkelandError::NonPositive {
            name: "eps",
            value: eps,
        });
    }
    if !(lam > 0.0) {
        return Err(EkelandError::NonPositive {
            name: "lam",
            value: lam,
        });
    }
    let inf = check_objective(space, f)?;
    if y_hat >= space.len() {
        return Err(EkelandError::BadStart(y_hat));
    }
    if !f[y_hat].is_finite() {
        return Err(EkelandError::InfiniteStart { value: f[y_hat] });
    }
    let bound = inf + eps * lam;
    if f[y_hat] > bound {
        return Err(EkelandError::Premise {
            value: f[y_hat],
            bound,
        });
    }

    let mut current = y_hat;
    let mut path = vec![current];
    loop {
        let next = (0..space.len())
            .filter(|&x| x != current && lam * space.dist(x, current) + f[x] < f[current])
            .min_by(|&a, &b| f[a].total_cmp(&f[b]));
        match next {
            Some(x) => {
                current = x;
                path.push(x);
            }
            None => break,
        }
    }

    let checks = verify_ekeland(space, f, y_hat, current, eps, lam, DEFAULT_FLOAT_SLACK);
    if !checks.all() {
        return Err(EkelandError::Verification(checks));
    }
    Ok(EkelandResult {
        x_hat: current,
        checks,
        path,
    })
}
