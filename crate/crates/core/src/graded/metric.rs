use super::{dyadic_magnitude, GradedError, GradedVector};

/// A shift-invariant metric on the truncated space.
#[derive(Debug, Clone, PartialEq)]
pub enum MetricHandle {
    /// `rho(x, y) = max_n 2^{-n} ||x-y||_n / (1 + ||x-y||_n)`.
    Canonical,
    /// `|p(z)| + rho(0, z - p(z) xbar)` with `z = x - y` and the coordinate
    /// functional `p(z) = z_j / xbar_j`. Satisfies `rho(0, t xbar) = |t|`.
    Remetrized {
        direction: GradedVector,
        index: usize,
    },
}

impl MetricHandle {
    pub fn distance(&self, x: &GradedVector, y: &GradedVector) -> Result<f64, GradedError> {
        let z = x.checked_sub(y)?;
        self.norm(&z)
    }

    /// Distance from the origin.
    pub fn norm(&self, z: &GradedVector) -> Result<f64, GradedError> {
        match self {
            MetricHandle::Canonical => Ok(dyadic_magnitude(&z.seminorms())),
            MetricHandle::Remetrized { direction, index } => {
                if !direction.config().same_shape(z.config()) {
                    return Err(GradedError::ConfigMismatch);
                }
                let p = z.coeff(*index) / direction.coeff(*index);
                let rest = z.axpy(-p, direction)?;
                Ok(p.abs() + dyadic_magnitude(&rest.seminorms()))
            }
        }
    }

    /// The functional `p` of a remetrized handle, `None` for the canonical one.
    pub fn functional(&self, z: &GradedVector) -> Option<f64> {
        match self {
            MetricHandle::Canonical => None,
            MetricHandle::Remetrized { direction, index } => {
                Some(z.coeff(*index) / direction.coeff(*index))
            }
        }
    }
}

/// Canonical or remetrized distance between two points of the same space.
pub fn rho_metric(
    m: &MetricHandle,
    x: &GradedVector,
    y: &GradedVector,
) -> Result<f64, GradedError> {
    m.distance(x, y)
}

/// Metric normalized along `xbar`: `rho(0, t xbar) = |t|`.
pub fn remetrize(xbar: &GradedVector, j: usize) -> Result<MetricHandle, GradedError> {
    let coeffs = xbar.config().coeffs;
    if j >= coeffs {
        return Err(GradedError::IndexOutOfRange { index: j, coeffs });
    }
    if xbar.is_zero() {
        return Err(GradedError::InvalidDirection(
            "direction is the zero vector".into(),
        ));
    }
    if xbar.coeff(j) == 0.0 {
        return Err(GradedError::InvalidDirection(format!(
            "coordinate {j} of the direction vanishes, p(xbar) = 1 is unachievable"
        )));
    }
    Ok(MetricHandle::Remetrized {
        direction: xbar.clone(),
        index: j,
    })
}
