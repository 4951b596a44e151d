//! One-level density of low-lying zeros of quadratic Dirichlet L-functions,
//! computed by the ratios recipe and by the explicit formula.

pub mod arith;
pub mod error;
pub mod gausslab;
pub mod harness;
pub mod ntside;
pub mod quadrature;
pub mod ratios;
pub mod specfun;
pub mod testfn;

pub use error::{Error, Result};
