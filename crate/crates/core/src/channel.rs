//! Propagation of two-mode squeezed resources through lossy thermal channels.
//!
//! The channel model is a beam splitter of reflectivity eta coupling the
//! travelling mode to a thermal environment with occupation N_th: each mode
//! variance maps as v -> (1 - eta) v + (1 + 2 N_th) eta and correlations pick
//! up sqrt(1 - eta). The reflectivity splits into an environmental part
//! eta_env = 1 - exp(-mu L) accumulated over a path of length L with
//! extinction coefficient mu, and a fixed antenna/coupling loss eta_ant, so
//!
//! ```text
//! eta_eff = 1 - exp(-mu L) (1 - eta_ant).
//! ```
//!
//! Two link geometries appear throughout: *asymmetric* (one mode kept at the
//! source, one travelling) and *symmetric* (both modes travelling). The
//! module also covers spatially varying environments (mu(x), n(x) profiles
//! reduced to an equivalent uniform channel), the closed-form reflectivity
//! and distance bounds at which entanglement dies, and HEMT amplification of
//! the received mode.

use crate::gaussian::StandardTwoModeState;
use crate::{Error, Result};

/// Reflectivity below which an inhomogeneous channel is considered
/// transparent and the equivalent thermal occupation undefined.
const DEGENERATE_ETA: f64 = 1e-15;

/// Default sample count for profile integrals; halving error is O(h^2), so
/// 4096 points keep the trapezoid bias well under 1e-6 for smooth profiles.
pub const DEFAULT_PROFILE_SAMPLES: usize = 4096;

/// Validity ceiling for the first-order output-eigenvalue approximation:
/// the expansion assumes eta * N_th well below one.
const APPROX_VALIDITY_LIMIT: f64 = 0.1;

// ------------------------------------------------------------------- source

/// Two-mode squeezed thermal source with squeezing parameter `r` and
/// symmetric thermal occupation `n` in both modes.
///
/// Covariance in standard form: alpha = beta = (1 + 2n) cosh 2r,
/// gamma = (1 + 2n) sinh 2r.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezedSource {
    r: f64,
    n: f64,
}

impl SqueezedSource {
    /// Validate and build a source; requires r >= 0 and n >= 0.
    pub fn new(r: f64, n: f64) -> Result<Self> {
        if !(r >= 0.0) || !r.is_finite() {
            return Err(Error::Domain(format!(
                "squeezing parameter must be finite and nonnegative, got {r}"
            )));
        }
        if !(n >= 0.0) || !n.is_finite() {
            return Err(Error::Domain(format!(
                "thermal occupation must be finite and nonnegative, got {n}"
            )));
        }
        Ok(Self { r, n })
    }

    /// Squeezing parameter.
    pub fn r(&self) -> f64 {
        self.r
    }

    /// Thermal occupation of each mode before squeezing.
    pub fn n(&self) -> f64 {
        self.n
    }

    /// Squeezing amplitude lambda = tanh r of the pure-state (n = 0) Schmidt
    /// decomposition; photon-subtraction formulas are parameterized by it.
    pub fn lambda(&self) -> f64 {
        self.r.tanh()
    }

    /// Diagonal variance (1 + 2n) cosh 2r.
    pub fn cosh_term(&self) -> f64 {
        (1.0 + 2.0 * self.n) * (2.0 * self.r).cosh()
    }

    /// Correlation amplitude (1 + 2n) sinh 2r.
    pub fn sinh_term(&self) -> f64 {
        (1.0 + 2.0 * self.n) * (2.0 * self.r).sinh()
    }

    /// Smallest PT symplectic eigenvalue of the undisturbed source,
    /// nu_in = (1 + 2n) exp(-2r).
    pub fn nu_in(&self) -> f64 {
        (1.0 + 2.0 * self.n) * (-2.0 * self.r).exp()
    }

    /// True iff the source state is entangled (nu_in < 1).
    pub fn is_entangled(&self) -> bool {
        self.nu_in() < 1.0
    }

    /// The source covariance as a standard-form state.
    pub fn to_state(&self) -> Result<StandardTwoModeState> {
        StandardTwoModeState::new(self.cosh_term(), self.cosh_term(), self.sinh_term())
    }
}

// ------------------------------------------------------------------ channel

/// Which of the two modes an operation acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// First mode (variance alpha).
    A,
    /// Second mode (variance beta).
    B,
}

/// Link geometry: who travels through a lossy channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Geometry {
    /// One mode stays at the source; the other crosses the full path.
    Asymmetric,
    /// Both modes travel, each through its own (equal) channel.
    Symmetric,
}

/// Uniform thermal-loss channel: extinction coefficient `mu` (1/m),
/// environment occupation `n_env`, fixed antenna loss `eta_ant`, and path
/// length `length` (m).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    mu: f64,
    n_env: f64,
    eta_ant: f64,
    length: f64,
}

impl ChannelParams {
    /// Validate and build channel parameters; requires mu >= 0, n_env >= 0,
    /// 0 <= eta_ant < 1, length >= 0.
    pub fn new(mu: f64, n_env: f64, eta_ant: f64, length: f64) -> Result<Self> {
        if !(mu >= 0.0) || !mu.is_finite() {
            return Err(Error::Domain(format!(
                "extinction coefficient must be finite and nonnegative, got {mu}"
            )));
        }
        if !(n_env >= 0.0) || !n_env.is_finite() {
            return Err(Error::Domain(format!(
                "environment occupation must be finite and nonnegative, got {n_env}"
            )));
        }
        if !(0.0..1.0).contains(&eta_ant) {
            return Err(Error::Domain(format!(
                "antenna reflectivity must lie in [0, 1), got {eta_ant}"
            )));
        }
        if !(length >= 0.0) || !length.is_finite() {
            return Err(Error::Domain(format!(
                "path length must be finite and nonnegative, got {length}"
            )));
        }
        Ok(Self {
            mu,
            n_env,
            eta_ant,
            length,
        })
    }

    /// Same channel over a different path length.
    pub fn with_length(&self, length: f64) -> Result<Self> {
        Self::new(self.mu, self.n_env, self.eta_ant, length)
    }

    /// Extinction coefficient (1/m).
    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// Thermal occupation of the environment the mode couples to.
    pub fn n_env(&self) -> f64 {
        self.n_env
    }

    /// Antenna/coupling reflectivity.
    pub fn eta_ant(&self) -> f64 {
        self.eta_ant
    }

    /// Path length (m).
    pub fn length(&self) -> f64 {
        self.length
    }

    /// Environmental reflectivity 1 - exp(-mu L) accumulated along the path.
    pub fn env_reflectivity(&self) -> f64 {
        env_reflectivity(self.mu, self.length)
    }

    /// Total reflectivity 1 - exp(-mu L)(1 - eta_ant); composition of path
    /// and antenna losses.
    pub fn effective_reflectivity(&self) -> f64 {
        1.0 - (-self.mu * self.length).exp() * (1.0 - self.eta_ant)
    }
}

/// Environmental reflectivity 1 - exp(-mu * length) of a uniform absorber.
pub fn env_reflectivity(mu: f64, length: f64) -> f64 {
    -(-mu * length).exp_m1()
}

// ----------------------------------------------------- propagated states

/// State after the asymmetric link: the first mode crossed `channel`, the
/// second stayed at the source.
pub fn asymmetric_state(
    source: &SqueezedSource,
    channel: &ChannelParams,
) -> Result<StandardTwoModeState> {
    let eta = channel.effective_reflectivity();
    let alpha =
        (1.0 + 2.0 * channel.n_env()) * eta + (1.0 - eta) * source.cosh_term();
    let beta = source.cosh_term();
    let gamma = (1.0 - eta).sqrt() * source.sinh_term();
    StandardTwoModeState::new(alpha, beta, gamma)
}

/// State after the symmetric link: the first mode crossed `channel_a`, the
/// second `channel_b` (equal channels give the symmetric scenario proper).
pub fn symmetric_state(
    source: &SqueezedSource,
    channel_a: &ChannelParams,
    channel_b: &ChannelParams,
) -> Result<StandardTwoModeState> {
    let eta_a = channel_a.effective_reflectivity();
    let eta_b = channel_b.effective_reflectivity();
    let alpha =
        (1.0 + 2.0 * channel_a.n_env()) * eta_a + (1.0 - eta_a) * source.cosh_term();
    let beta =
        (1.0 + 2.0 * channel_b.n_env()) * eta_b + (1.0 - eta_b) * source.cosh_term();
    let gamma = ((1.0 - eta_a) * (1.0 - eta_b)).sqrt() * source.sinh_term();
    StandardTwoModeState::new(alpha, beta, gamma)
}

// --------------------------------------------------------- survival bounds

/// Largest channel reflectivity at which the asymmetric-link state stays
/// entangled:
///
/// ```text
/// eta_max = 1 / (1 + N_th / (1 + 2n(1 + n) / (1 - (1 + 2n) cosh 2r))).
/// ```
///
/// Fails with [`Error::Domain`] if the source itself is not entangled.
pub fn max_reflectivity(source: &SqueezedSource, n_env: f64) -> Result<f64> {
    if !(n_env >= 0.0) {
        return Err(Error::Domain(format!(
            "environment occupation must be nonnegative, got {n_env}"
        )));
    }
    if !source.is_entangled() {
        return Err(Error::Domain(format!(
            "source with r = {}, n = {} is not entangled; no loss threshold exists",
            source.r(),
            source.n()
        )));
    }
    // inner > 0 whenever the source is entangled: cosh 2r then exceeds
    // (1 + 2n + 2n^2) / (1 + 2n), which is exactly the zero of the bracket
    let inner = 1.0
        + 2.0 * source.n() * (1.0 + source.n()) / (1.0 - source.cosh_term());
    Ok(1.0 / (1.0 + n_env / inner))
}

/// Path length at which the effective reflectivity reaches `eta_max`:
/// L = ln((1 - eta_ant) / (1 - eta_max)) / mu.
///
/// Returns [`Error::Unreachable`] when the antenna loss alone already
/// exceeds the bound, and infinity when eta_max = 1 (noiseless environment).
pub fn max_distance(eta_max: f64, mu: f64, eta_ant: f64) -> Result<f64> {
    if !(mu > 0.0) {
        return Err(Error::Domain(format!(
            "extinction coefficient must be positive, got {mu}"
        )));
    }
    if !(0.0..1.0).contains(&eta_ant) {
        return Err(Error::Domain(format!(
            "antenna reflectivity must lie in [0, 1), got {eta_ant}"
        )));
    }
    if !(eta_max > 0.0 && eta_max <= 1.0) {
        return Err(Error::Domain(format!(
            "reflectivity bound must lie in (0, 1], got {eta_max}"
        )));
    }
    if eta_ant >= eta_max {
        return Err(Error::Unreachable(format!(
            "antenna loss {eta_ant} alone exceeds the tolerable reflectivity {eta_max}"
        )));
    }
    if eta_max == 1.0 {
        return Ok(f64::INFINITY);
    }
    Ok(((1.0 - eta_ant) / (1.0 - eta_max)).ln() / mu)
}

/// First-order estimate of the output PT eigenvalue together with a validity
/// flag for the expansion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApproxEigenvalue {
    /// nu_out ≈ nu_in + (1/2 + N_th) eta.
    pub nu_minus: f64,
    /// Set when eta * N_th >= 0.1 and the linearization is unreliable.
    pub outside_validity: bool,
}

/// Linearized PT eigenvalue of the asymmetric-link output for small total
/// reflectivity `eta`: nu_out = nu_in + (1/2 + N_th) eta.
pub fn approx_output_eigenvalue(
    source: &SqueezedSource,
    n_env: f64,
    eta: f64,
) -> ApproxEigenvalue {
    ApproxEigenvalue {
        nu_minus: source.nu_in() + (0.5 + n_env) * eta,
        outside_validity: eta * n_env >= APPROX_VALIDITY_LIMIT,
    }
}

// ------------------------------------------------- inhomogeneous channels

/// Sampled extinction and occupation profiles mu(x), n(x) along a path.
#[derive(Debug, Clone)]
pub struct InhomogeneousProfile {
    xs: Vec<f64>,
    mu: Vec<f64>,
    n: Vec<f64>,
}

impl InhomogeneousProfile {
    /// Build a profile from explicit samples. Positions must be strictly
    /// increasing; all three vectors must have equal length >= 2.
    pub fn from_samples(xs: Vec<f64>, mu: Vec<f64>, n: Vec<f64>) -> Result<Self> {
        if xs.len() < 2 || xs.len() != mu.len() || xs.len() != n.len() {
            return Err(Error::Domain(format!(
                "profile needs >= 2 samples of equal length, got {}/{}/{}",
                xs.len(),
                mu.len(),
                n.len()
            )));
        }
        if xs.windows(2).any(|w| !(w[1] > w[0])) || xs.iter().any(|x| !x.is_finite()) {
            return Err(Error::Domain(
                "profile positions must be finite and strictly increasing".into(),
            ));
        }
        if mu.iter().any(|&m| !(m >= 0.0)) || n.iter().any(|&v| !(v >= 0.0)) {
            return Err(Error::Domain(
                "profile extinction and occupation samples must be nonnegative".into(),
            ));
        }
        Ok(Self { xs, mu, n })
    }

    /// Sample closures mu(x), n(x) on a uniform grid over [0, length].
    pub fn from_functions(
        length: f64,
        samples: usize,
        mu: impl Fn(f64) -> f64,
        n: impl Fn(f64) -> f64,
    ) -> Result<Self> {
        if !(length > 0.0) || !length.is_finite() {
            return Err(Error::Domain(format!(
                "profile length must be finite and positive, got {length}"
            )));
        }
        if samples < 2 {
            return Err(Error::Domain(format!(
                "need at least 2 profile samples, got {samples}"
            )));
        }
        let h = length / (samples - 1) as f64;
        let xs: Vec<f64> = (0..samples).map(|i| i as f64 * h).collect();
        let mus = xs.iter().map(|&x| mu(x)).collect();
        let ns = xs.iter().map(|&x| n(x)).collect();
        Self::from_samples(xs, mus, ns)
    }
}

/// Equivalent uniform channel of an inhomogeneous path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveChannel {
    /// Environmental reflectivity 1 - exp(-integral of mu).
    pub eta_env: f64,
    /// Loss-weighted mean occupation seen by the travelling mode.
    pub n_th: f64,
}

/// Reduce a profile to the equivalent uniform channel:
///
/// ```text
/// eta_env = 1 - exp(-T(L)),           T(x) = int_0^x mu,
/// n_th    = int_0^L mu(x) n(x) e^{-(T(L) - T(x))} dx / eta_env,
/// ```
///
/// i.e. contributions injected early are re-attenuated by the remaining
/// path. Integrals use the trapezoid rule on the stored grid. Fails with
/// [`Error::DegenerateChannel`] when the path is essentially transparent
/// and n_th is undefined.
pub fn inhomogeneous_effective(profile: &InhomogeneousProfile) -> Result<EffectiveChannel> {
    let m = profile.xs.len();
    // cumulative optical depth T(x_i)
    let mut depth = vec![0.0_f64; m];
    for i in 1..m {
        let h = profile.xs[i] - profile.xs[i - 1];
        depth[i] = depth[i - 1] + 0.5 * h * (profile.mu[i] + profile.mu[i - 1]);
    }
    let total = depth[m - 1];
    let eta_env = -(-total).exp_m1();
    if eta_env < DEGENERATE_ETA {
        return Err(Error::DegenerateChannel(format!(
            "total optical depth {total:.3e} leaves no environment coupling"
        )));
    }
    let integrand: Vec<f64> = (0..m)
        .map(|i| profile.mu[i] * profile.n[i] * (depth[i] - total).exp())
        .collect();
    let mut acc = 0.0;
    for i in 1..m {
        let h = profile.xs[i] - profile.xs[i - 1];
        acc += 0.5 * h * (integrand[i] + integrand[i - 1]);
    }
    Ok(EffectiveChannel {
        eta_env,
        n_th: acc / eta_env,
    })
}

// ------------------------------------------------------------ amplification

/// Phase-insensitive (HEMT-style) amplification of one mode with gain `g_h`
/// and added-noise occupation `n_amp`: the chosen variance maps to
/// g_h v + (g_h - 1)(1 + 2 n_amp), correlations scale by sqrt(g_h).
pub fn hemt_amplify(
    state: &StandardTwoModeState,
    g_h: f64,
    n_amp: f64,
    mode: Mode,
) -> Result<StandardTwoModeState> {
    if !(g_h >= 1.0) || !g_h.is_finite() {
        return Err(Error::Domain(format!(
            "amplifier gain must be finite and at least 1, got {g_h}"
        )));
    }
    if !(n_amp >= 0.0) || !n_amp.is_finite() {
        return Err(Error::Domain(format!(
            "amplifier noise occupation must be finite and nonnegative, got {n_amp}"
        )));
    }
    let added = (g_h - 1.0) * (1.0 + 2.0 * n_amp);
    let gamma = g_h.sqrt() * state.gamma();
    match mode {
        Mode::A => StandardTwoModeState::new(g_h * state.alpha() + added, state.beta(), gamma),
        Mode::B => StandardTwoModeState::new(state.alpha(), g_h * state.beta() + added, gamma),
    }
}

// ------------------------------------------------------------------- tests
