// Negated comparisons reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod exponents;
pub mod harness;
pub mod iteration;
pub mod ode;
pub mod quadrature;
pub mod testfuncs;
pub mod wave;

pub use error::{Error, Result};
