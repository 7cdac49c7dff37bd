//! Numerical kernels: special functions, quadrature, truncated power series
//! and Laplace inversion.

pub mod jet;
pub mod laplace;
pub mod quad;
pub mod special;

pub use jet::{jet_eval, Jet};
pub use laplace::{inverse_laplace_cdf, invert, InversionMethod, InversionParams};
pub use quad::{integrate, GaussLaguerre, QuadratureSpec};
pub use special::{erf_fn, erfc_fn, gamma_fn, ln_gamma};
