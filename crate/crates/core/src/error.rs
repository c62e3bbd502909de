use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("rate `{name}` must be finite and non-negative, got {value}")]
    NegativeRate { name: &'static str, value: f64 },

    #[error("parameter `{name}` must be finite, got {value}")]
    NonFinite { name: &'static str, value: f64 },

    #[error("a temperature was given without a positive cavity frequency")]
    MissingCavityFrequency,

    #[error("beta must be positive, got {0}")]
    NonpositiveBeta(f64),

    #[error("probe strength epsilon must be positive, got {0}")]
    NonpositiveEpsilon(f64),

    #[error("temperature must be positive, got {0} K")]
    NonpositiveTemperature(f64),

    /// `gamma_f + kappa == 0`, so the normalized ratios are undefined.
    /// The half-width rates are still reported.
    #[error("gamma_f + kappa vanishes (gamma_e = {gamma_e}, gamma_f = {gamma_f}); ratios undefined")]
    DivisionDegenerate { gamma_e: f64, gamma_f: f64 },

    #[error("mixing angle undefined: eta = 0 and delta = 0")]
    FullyDegenerate,

    #[error("total damping gamma_e + gamma_f + kappa vanishes")]
    DegenerateDamping,

    #[error("operation defined only at zero cavity detuning, got delta = {0}")]
    NonzeroDetuning(f64),

    #[error("double pole at eta = eta_T / 2; resonances are not separable")]
    DegeneratePoles,

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("Fock truncation n_max must be at least 1, got {0}")]
    InvalidTruncation(usize),

    #[error("steady state is not unique (independent solves disagree by {discrepancy:e})")]
    NonUniqueSteadyState { discrepancy: f64 },

    #[error("linear solver failed: {0}")]
    SolverFailure(String),

    #[error("analytic method is valid only without cavity pumping")]
    AnalyticInvalidHere,

    #[error("Fock truncation n_max = {n_max} not converged (tail mass {tail_mass:e})")]
    TruncationNotConverged { n_max: usize, tail_mass: f64 },

    #[error("time-domain integration failed: {0}")]
    IntegrationFailure(String),

    #[error("invalid detuning grid: {0}")]
    InvalidGrid(String),
}
