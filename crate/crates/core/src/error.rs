//! Error type shared by every module of the crate.

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong while assembling or evaluating a state.
///
/// Variants are deliberately coarse: each names a *kind* of failure the
/// caller might branch on, while the payload string carries the specific
/// quantities for diagnostics.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// Covariance data violates symmetry, positivity, or the uncertainty
    /// principle beyond tolerance.
    #[error("non-physical state: {0}")]
    NonPhysicalState(String),

    /// A scalar argument lies outside the domain of the requested formula.
    #[error("domain error: {0}")]
    Domain(String),

    /// An iterative evaluation hit its cap before meeting its tolerance.
    #[error("convergence failure: {0}")]
    Convergence(String),

    /// The channel transmits nothing, so channel-conditioned quantities
    /// (for example the effective thermal occupation) are undefined.
    #[error("degenerate channel: {0}")]
    DegenerateChannel(String),

    /// The requested threshold can never be crossed with these parameters.
    #[error("unreachable target: {0}")]
    Unreachable(String),

    /// A workspace matrix of the photon-subtraction machinery is singular,
    /// so the conditional-state formulas cannot be evaluated.
    #[error("singular workspace: {0}")]
    SingularWorkspace(String),

    /// A non-Gaussian resource fails the submatrix validity condition and
    /// cannot stand in for a covariance matrix.
    #[error("invalid resource: {0}")]
    InvalidResource(String),

    /// The Bell-measurement kernel of the swap is singular.
    #[error("singular measurement: {0}")]
    SingularMeasurement(String),

    /// The fidelity never exceeds the classical bound of 1/2, so there is no
    /// classical-limit distance to solve for.
    #[error("never quantum: {0}")]
    NeverQuantum(String),
}
