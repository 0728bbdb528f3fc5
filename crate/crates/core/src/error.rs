//! Error type shared by every module.

use alloc::string::String;

/// Failures reported by the numerical operations.
///
/// Diagnostics that carry a measurement (for example [`Error::NotInClass`])
/// keep the measured value so callers can report it.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Configuration(String),
    #[error("resolution error: {0}")]
    Resolution(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("argument error: {0}")]
    Argument(String),
    #[error("singularity error: {0}")]
    Singularity(String),
    #[error("precondition error: {0}")]
    Precondition(String),
    #[error("hypothesis violation: {0}")]
    Hypothesis(String),
    /// The field does not satisfy the zero-production constraint: the curl of
    /// `DF_u` carries mass `curl_mass` above `tolerance`.
    #[error("field is not curl-free (curl mass {curl_mass:.6e} > tolerance {tolerance:.3e})")]
    NotInClass { curl_mass: f64, tolerance: f64 },
    /// A matrix lies farther than `tolerance` from the set `K`.
    #[error("matrix is {distance:.3e} away from K (tolerance {tolerance:.3e})")]
    FarFromK { distance: f64, tolerance: f64 },
    #[error("structure violation: {0}")]
    Structure(String),
}

pub type Result<T> = core::result::Result<T, Error>;

#[macro_export]
#[doc(hidden)]
macro_rules! err {
    ($kind:ident, $($arg:tt)*) => {
        $crate::error::Error::$kind(alloc::format!($($arg)*))
    };
}
