use serde::Serialize;

use crate::graded::{GradedError, GradedVector};

/// One row of the tame-bound table. Levels with `n + d >= N` carry no bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelRow {
    pub level: usize,
    pub x_seminorm: f64,
    pub bound: Option<f64>,
    pub ratio: Option<f64>,
    pub pass: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificateTable {
    pub c: f64,
    pub d: usize,
    pub tol: f64,
    pub rows: Vec<LevelRow>,
    pub pass: bool,
}

impl CertificateTable {
    /// Levels whose bound is evaluable and fails.
    pub fn failing_levels(&self) -> Vec<usize> {
        self.rows
            .iter()
            .filter(|r| r.pass == Some(false))
            .map(|r| r.level)
            .collect()
    }

    /// Largest ratio over evaluable levels.
    pub fn worst_ratio(&self) -> f64 {
        self.rows.iter().filter_map(|r| r.ratio).fold(0.0, f64::max)
    }
}

/// Per-level table `||x||_n` against `c |y|_{n+d}`; passes iff every evaluable
/// level satisfies `||x||_n <= c |y|_{n+d} (1 + tol)`.
pub fn tame_certificate(
    x: &GradedVector,
    y: &GradedVector,
    c: f64,
    d: usize,
    tol: f64,
) -> Result<CertificateTable, GradedError> {
    if !x.config().same_shape(y.config()) {
        return Err(GradedError::ConfigMismatch);
    }
    let xs = x.seminorms();
    let ys = y.seminorms();
    let levels = xs.len();
    let rows: Vec<LevelRow> = (0..levels)
        .map(|n| {
            if n + d >= levels {
                return LevelRow {
                    level: n,
                    x_seminorm: xs[n],
                    bound: None,
                    ratio: None,
                    pass: None,
                };
            }
            let bound = c * ys[n + d];
            let ratio = if bound > 0.0 {
                xs[n] / bound
            } else if xs[n] == 0.0 {
                0.0
            } else {
                f64::INFINITY
            };
            LevelRow {
                level: n,
                x_seminorm: xs[n],
                bound: Some(bound),
                ratio: Some(ratio),
                pass: Some(xs[n] <= bound * (1.0 + tol)),
            }
        })
        .collect();
    let pass = rows.iter().all(|r| r.pass != Some(false));
    Ok(CertificateTable {
        c,
        d,
        tol,
        rows,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graded::SpaceConfig;

    #[test]
    fn zero_solution_passes() {
        let cfg = SpaceConfig::default();
        let y = GradedVector::basis(cfg, 3).unwrap();
        let t = tame_certificate(&GradedVector::zeros(cfg), &y, 1.0, 1, 0.0).unwrap();
        assert!(t.pass);
        assert!(t.rows.iter().all(|r| r.x_seminorm == 0.0));
    }

    #[test]
    fn diagonal_equality() {
        let cfg = SpaceConfig::default();
        let y = GradedVector::basis(cfg, 1).unwrap();
        let x = y.scaled(2.0);
        let t = tame_certificate(&x, &y, 1.0, 1, 0.0).unwrap();
        assert!(t.pass);
        for r in &t.rows[..11] {
            assert_eq!(r.x_seminorm, 2f64.powi(r.level as i32 + 1));
            assert_eq!(r.ratio, Some(1.0));
        }
        assert_eq!(t.rows[11].bound, None);
        assert_eq!(t.rows[11].pass, None);
    }

    #[test]
    fn constant_below_one_fails_every_level() {
        let cfg = SpaceConfig::default();
        let e1 = GradedVector::basis(cfg, 1).unwrap();
        assert!(tame_certificate(&e1, &e1, 1.0, 0, 0.0).unwrap().pass);
        let t = tame_certificate(&e1, &e1, 0.4, 0, 0.0).unwrap();
        assert!(!t.pass);
        assert_eq!(t.failing_levels(), (0..12).collect::<Vec<_>>());
    }
}
