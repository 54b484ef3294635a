//! Numerical toolkit for graded Fréchet sequence spaces.
//!
//! * [`graded`]: the weighted sup-norm model space, its metric, boxes `Pi_s`,
//!   Banach norms `||.||_s`, remetrization and epsilon-nets.
//! * [`variational`]: Ekeland point finding on finite metric spaces and the
//!   long-orbit-or-empty-value orbit engine.
//! * [`solver`]: the tame continuation solver, certificates and sampled
//!   surjectivity/openness checkers.
//! * [`problems`]: concrete tame problems and lattice graph samples.
//! * [`suites`]: randomized property suites shared by tests and the CLI.

// `!(a > b)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod graded;
pub mod problems;
pub mod solver;
pub mod suites;
pub mod variational;
