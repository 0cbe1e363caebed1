//! Computation with real entire functions of finite order with real zeros:
//! Hadamard products in log space, minimum and maximum modulus, iterated
//! minimum modulus, growth and deficiency estimates, and escape grids.

pub mod classify;
pub mod closed_form;
pub mod error;
pub mod escape;
pub mod eval;
pub mod families;
pub mod format;
pub mod lemmas;
pub mod logvalue;
pub mod modulus;
pub mod numeric;
pub mod orbit;
pub mod recursive;
pub mod schedule;
pub mod spec;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use eval::{eval_log, eval_log_truncated, primary_factor_log, tail_bound, Evaluator, DEFAULT_TOLERANCE};
pub use logvalue::LogComplexValue;
pub use spec::{ClosedForm, EntireFunctionSpec, PowerLaw, RealPolynomial, RecursiveRule, ZeroEntry, ZeroSequence};
