//! Continuous-variable entanglement swapping.
//!
//! Two bipartite Gaussian states rho_AB and rho_CD meet at a middle station
//! where modes B and C are subjected to a CV Bell measurement (homodyne
//! detection of x_B - x_C and p_B + p_C). For Gaussian states the
//! conditional covariance of the surviving pair (A, D) is independent of the
//! measurement record:
//!
//! ```text
//! M        = Sigma_B + sigma_Z Sigma_C sigma_Z
//! Sigma~_A = Sigma_A - eps_AB M^-1 eps_AB^T
//! Sigma~_D = Sigma_D - eps_CD^T sigma_Z M^-1 sigma_Z eps_CD
//! eps~_AD  = eps_AB M^-1 sigma_Z eps_CD
//! ```
//!
//! where M is the covariance of the measured quadrature pair. On symmetric
//! standard-form inputs this collapses to the scalar update
//! alpha~ = alpha - gamma^2/(2 beta), gamma~ = gamma^2/(2 beta).

use crate::channel::{asymmetric_state, ChannelParams, SqueezedSource};
use crate::gaussian::{
    from_blocks, GeneralTwoModeCovariance, StandardTwoModeState, SymplecticForm,
};
use crate::{Error, Result};
use nalgebra::Vector4;

/// Determinant floor for the measured-pair covariance M.
const SINGULAR_MEASUREMENT_TOL: f64 = 1e-14;

/// The two links feeding a swap: state 1 holds modes (A, B), state 2 holds
/// modes (C, D); B and C are consumed by the Bell measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct SwapInput {
    state_1: GeneralTwoModeCovariance,
    state_2: GeneralTwoModeCovariance,
}

impl SwapInput {
    /// Validate and build; both states must carry zero displacement (the
    /// conditional-covariance update assumes centered Gaussians).
    pub fn new(
        state_1: GeneralTwoModeCovariance,
        state_2: GeneralTwoModeCovariance,
    ) -> Result<Self> {
        if !state_1.is_centered() || !state_2.is_centered() {
            return Err(Error::Domain(
                "swap inputs must have zero displacement".into(),
            ));
        }
        Ok(Self { state_1, state_2 })
    }

    /// Link holding modes (A, B).
    pub fn state_1(&self) -> &GeneralTwoModeCovariance {
        &self.state_1
    }

    /// Link holding modes (C, D).
    pub fn state_2(&self) -> &GeneralTwoModeCovariance {
        &self.state_2
    }
}

/// Covariance of the (A, D) pair after the Bell measurement on (B, C).
pub fn swap(input: &SwapInput) -> Result<GeneralTwoModeCovariance> {
    let sz = SymplecticForm::sigma_z();
    let sigma_a = input.state_1.block_a();
    let sigma_b = input.state_1.block_b();
    let eps_ab = input.state_1.block_c();
    let sigma_c = input.state_2.block_a();
    let sigma_d = input.state_2.block_b();
    let eps_cd = input.state_2.block_c();

    let m = sigma_b + sz * sigma_c * sz;
    let det_m = m.determinant();
    if det_m <= SINGULAR_MEASUREMENT_TOL {
        return Err(Error::SingularMeasurement(format!(
            "measured-pair covariance has det = {det_m:.3e}"
        )));
    }
    let m_inv = m.try_inverse().ok_or_else(|| {
        Error::SingularMeasurement("measured-pair covariance is not invertible".into())
    })?;

    let sigma_a_t = sigma_a - eps_ab * m_inv * eps_ab.transpose();
    let sigma_d_t = sigma_d - eps_cd.transpose() * sz * m_inv * sz * eps_cd;
    let eps_ad = eps_ab * m_inv * sz * eps_cd;

    GeneralTwoModeCovariance::new(
        from_blocks(&sigma_a_t, &eps_ad, &eps_ad.transpose(), &sigma_d_t),
        Vector4::zeros(),
    )
}

/// Scalar-route swap of two standard-form links (modes B of each are
/// measured):
///
/// ```text
/// alpha~_1 = alpha_1 - gamma_1^2 / (beta_1 + beta_2)
/// alpha~_2 = alpha_2 - gamma_2^2 / (beta_1 + beta_2)
/// gamma~   = gamma_1 gamma_2 / (beta_1 + beta_2)
/// ```
pub fn swap_standard(
    s1: &StandardTwoModeState,
    s2: &StandardTwoModeState,
) -> Result<StandardTwoModeState> {
    let denom = s1.beta() + s2.beta();
    if denom * denom <= SINGULAR_MEASUREMENT_TOL {
        return Err(Error::SingularMeasurement(format!(
            "measured-pair covariance has det = {:.3e}",
            denom * denom
        )));
    }
    StandardTwoModeState::new(
        s1.alpha() - s1.gamma() * s1.gamma() / denom,
        s2.alpha() - s2.gamma() * s2.gamma() / denom,
        s1.gamma() * s2.gamma() / denom,
    )
}

/// Reporting scalar |sqrt(det Sigma) - beta/alpha| gauging how far a link
/// state sits from the regime where the scalar swap characterization is
/// tight; zero for pure symmetric states.
pub fn swap_condition(state: &StandardTwoModeState) -> f64 {
    (state.det_sigma().sqrt() - state.beta() / state.alpha()).abs()
}

/// Swapped resource for a source-in-the-middle relay spanning total
/// distance `channel.length()`: both end parties keep one source mode and
/// send the other to the midpoint, each through `channel` shortened to its
/// leg. `split` is the fraction of the path covered by the first leg
/// (default 1/2, the equidistant relay).
pub fn optimal_swap_resource(
    source: &SqueezedSource,
    channel: &ChannelParams,
    split: Option<f64>,
) -> Result<StandardTwoModeState> {
    let f = split.unwrap_or(0.5);
    if !(f > 0.0 && f < 1.0) {
        return Err(Error::Domain(format!(
            "path split fraction must lie in (0, 1), got {f}"
        )));
    }
    let total = channel.length();
    // asymmetric_state puts the travelled mode first; the swap measures the
    // second mode of each link, so flip each link to (kept, travelled)
    let leg_1 = asymmetric_state(source, &channel.with_length(f * total)?)?.swapped_modes();
    let leg_2 = asymmetric_state(source, &channel.with_length((1.0 - f) * total)?)?.swapped_modes();
    swap_standard(&leg_1, &leg_2)
}

// ------------------------------------------------------------------- tests
