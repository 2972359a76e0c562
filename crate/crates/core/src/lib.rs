//! The classical polylogarithm as a multivalued function on `C \ {0, 1}` and
//! as an explicit extension of mixed Tate local systems.
//!
//! The crate is organised bottom-up:
//!
//! - [`qlinalg`]: exact linear algebra over Q.
//! - [`mhs`]: mixed Tate Hodge structures as split-frame period matrices.
//! - [`localsys`]: the logarithmic and polylogarithmic representations of the
//!   free group `π₁(C \ {0,1}, 1/2)` and their cohomology.
//! - [`polynum`]: `log` and `Li_k` continued along paths by Taylor stepping.
//! - [`periods`]: the period matrix `P` and its monodromy.
//! - [`cyclotomic`]: values at roots of unity and regulator tables.
//! - [`cli`]: the `polylog` command line front end.

pub mod cli;
pub mod cyclotomic;
pub mod dd;
pub mod error;
pub mod localsys;
pub mod mhs;
pub mod periods;
pub mod polynum;
pub mod qlinalg;

pub use error::{Error, Result};
