use thiserror::Error;

/// Errors shared across the solver and simulation modules.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// The requested frequency does not propagate on the chain (|omega| >= 2C).
    #[error("frequency {omega} is outside the propagation band |omega| < {band_edge}")]
    OutsideBand { omega: f64, band_edge: f64 },

    /// A pinned-mode operation was asked for an in-band frequency.
    #[error("frequency {omega} lies inside the propagation band (edge {band_edge}); no localized mode")]
    InsideBand { omega: f64, band_edge: f64 },

    /// `linear_spectrum` called with a nonlinear parameter set.
    #[error("linear spectrum requires gamma2 = 0 and chi = 0 (got gamma2 = {gamma2}, chi = {chi})")]
    NotLinear { gamma2: f64, chi: f64 },

    /// Linear dimer (gamma2 = chi = 0) off its eigenfrequency: no intensity
    /// constraint exists, so there is no mode to return.
    #[error("degenerate linear dimer: omega = {omega} does not match an eigenfrequency")]
    DegenerateEquation { omega: f64 },

    /// Not a single Newton start converged.
    #[error("no Newton start converged ({attempts} attempts, best residual {best_residual:.3e})")]
    NoConvergence { attempts: usize, best_residual: f64 },

    /// Field amplitude exceeded the divergence cap during time integration.
    #[error("field blew up at t = {t:.3} (max |psi| > {cap:.1e})")]
    Blowup { t: f64, cap: f64 },

    /// Invalid parameter or configuration value.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
