//! Complex error functions and the momentum-space quadrature.

mod erf;
mod faddeeva;
mod quad;

pub use erf::{erf_complex, erfc_complex, erfc_real, erfi_complex};
pub use faddeeva::faddeeva;
pub use quad::{integrate_semi_infinite, integrate_with, Envelope, QuadConfig, QuadratureResult};

/// Default relative tolerance for the momentum integrals.
pub const DEFAULT_REL_TOL: f64 = 1e-9;

/// Cut beyond the Gaussian peak; exp(-12^2) is far below any tolerance we use.
pub const GAUSSIAN_CUT: f64 = 12.0;
