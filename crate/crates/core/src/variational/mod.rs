//! Ekeland point finding on finite metric spaces and the long-orbit-or-empty-value
//! orbit engine.

mod ekeland;
mod orbit;

pub use ekeland::{
    ekeland_point, verify_ekeland, EkelandChecks, EkelandError, EkelandResult, FiniteMetricSpace,
    DEFAULT_FLOAT_SLACK,
};
pub use orbit::{
    run_orbit, verify_orbit, ExportStep, FnStepMap, OrbitCase, OrbitError, OrbitExport,
    OrbitOptions, OrbitOutcome, OrbitVerification, StepMap, TraceEntry,
};
