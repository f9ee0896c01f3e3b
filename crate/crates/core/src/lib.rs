//! Extropy-type information measures of continuous distributions and of
//! their n-th upper and lower k-record values.
//!
//! The crate is organized bottom-up:
//!
//! - [`dist`]: analytic catalog laws and the density-quantile function
//!   `u -> f(F^-1(u))` every quantile-form integral is built on.
//! - [`quad`]: adaptive Gauss-Kronrod integration on `(0, 1)` with an
//!   endpoint ladder that certifies convergence or signed divergence.
//! - [`records`]: k-record laws, the `phi_n` kernel and a record simulator.
//! - [`measures`]: extropy, cumulative residual/past extropy, their
//!   generalized and record versions, and the inaccuracy measures.
//! - [`symmetry`]: the discrepancy integrals that vanish exactly for
//!   symmetric laws, the class-C check, and an empirical bootstrap test.
//! - [`cli`]: the command-line front end used by the `extropy` binary.
//!
//! ```
//! use extropy::dist::Distribution;
//! use extropy::measures::Measures;
//!
//! let d: Distribution = "power:theta=2".parse().unwrap();
//! let crj = Measures::new(&d).crj();
//! assert!((crj.value() + 4.0 / 15.0).abs() < 1e-9);
//! ```

pub mod cli;
pub mod dist;
mod error;
pub mod measures;
pub mod quad;
pub mod records;
pub mod symmetry;

pub use error::{Error, Result};
