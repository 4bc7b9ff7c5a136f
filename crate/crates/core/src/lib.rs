//! Simulation toolkit for microwave entanglement distribution through lossy,
//! thermally noisy open-air channels.
//!
//! The library models two-mode squeezed microwave states (vacuum or thermal)
//! propagating from a cryostat into an open-air channel, and everything one
//! needs to judge whether the surviving state is still a useful quantum
//! resource:
//!
//! - [`gaussian`] — covariance-matrix bookkeeping in the real quadrature
//!   basis (x1, p1, x2, p2), partial-transpose symplectic eigenvalues,
//!   negativity and logarithmic negativity, characteristic functions, and the
//!   special-function kernels (diagonal Gauss hypergeometric series,
//!   Bose-Einstein occupation) the rest of the crate leans on.
//! - [`channel`] — beamsplitter loss model for the open-air link: effective
//!   reflectivities, asymmetric (one travelling mode) and symmetric (two
//!   travelling modes) output states, maximum reflectivity and reach,
//!   inhomogeneous absorption profiles, and HEMT amplification.
//! - [`distillation`] — two- and four-photon subtraction, both probabilistic
//!   (high-transmissivity tap beamsplitters plus photocounters) and heuristic
//!   (direct annihilation operators), with the non-Gaussian correction
//!   machinery and the re-Gaussification map.
//! - [`swapping`] — continuous-variable entanglement swapping via a Bell
//!   (EPR-quadrature) measurement at a middle node.
//! - [`teleportation`] — average fidelities of Braunstein-Kimble coherent
//!   state teleportation for every supported resource family, plus the
//!   classical-limit distance solver.
//! - [`satellite`] — free-space link budgets: Friis/parabolic path
//!   transmissivity, diffraction spot size, near/Fresnel/far-field
//!   classification, and entanglement-preservation thresholds.
//! - [`acceptance`] — the self-check catalogue binding all modules together;
//!   both the test suite and the CLI `report` command run it.
//!
//! Conventions: vacuum variance is normalized to the identity (so a pure
//! two-mode squeezed vacuum has `alpha = cosh 2r`), the symplectic form is
//! `Omega = Omega1 ⊕ Omega1` with `Omega1 = [[0, 1], [-1, 0]]`, and
//! "standard form" means block-diagonal `Sigma_A = alpha I`,
//! `Sigma_B = beta I`, `eps_AB = gamma sigma_Z`.

pub mod acceptance;
pub mod channel;
pub mod distillation;
pub mod gaussian;
pub mod satellite;
pub mod swapping;
pub mod teleportation;

mod error;

pub use error::{Error, Result};

/// Physical constants (2019 SI exact values where applicable).
pub mod constants {
    /// Planck constant in J s.
    pub const PLANCK: f64 = 6.626_070_15e-34;
    /// Boltzmann constant in J/K.
    pub const BOLTZMANN: f64 = 1.380_649e-23;
    /// Speed of light in vacuum in m/s.
    pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
}
