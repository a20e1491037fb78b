use thiserror::Error;

/// Errors produced by constructors and scan configuration.
///
/// Analysis routines themselves are total on validated inputs; everything that
/// can go wrong is rejected at the type boundary.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid regularity constants mu={mu}, lambda={lambda}: {reason}")]
    InvalidRc {
        mu: f64,
        lambda: f64,
        reason: &'static str,
    },

    #[error("invalid method parameters alpha={alpha}, beta1={beta1}, beta2={beta2}: {reason}")]
    InvalidAgd {
        alpha: f64,
        beta1: f64,
        beta2: f64,
        reason: &'static str,
    },

    #[error("invalid sector bound m={m_lo}, L={l_hi}: {reason}")]
    InvalidSector {
        m_lo: f64,
        l_hi: f64,
        reason: &'static str,
    },

    #[error("invalid quadratic form: {0}")]
    InvalidQuadForm(&'static str),

    #[error("invalid rate rho={rho}: must lie in (0, 1]")]
    InvalidRate { rho: f64 },

    #[error("invalid scan grid: {0}")]
    InvalidGrid(String),

    #[error("route {route} is not available for family {family}")]
    UnsupportedRoute {
        route: &'static str,
        family: &'static str,
    },
}
