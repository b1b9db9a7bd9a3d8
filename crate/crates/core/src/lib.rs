//! Exact construction, numeric evaluation and identity verification for the
//! three-parameter complex Hermite polynomials `H_{m,n}(x, y, z)`.

pub mod cli;
pub mod error;
pub mod expansion;
pub mod hermite;
pub mod identities;
pub mod kernels;
pub mod poly;

pub use error::{Error, Result};
pub use hermite::{HermiteCache, HermiteIndex};
pub use poly::{ComplexValue, SparsePoly};
