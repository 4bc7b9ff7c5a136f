//! Entanglement distillation by symmetric photon subtraction.
//!
//! One photon is tapped off each mode of a two-mode Gaussian state with a
//! beam splitter of transmissivity tau and detected; success projects the
//! kept modes onto a non-Gaussian state with higher entanglement for
//! moderate squeezing. Three descriptions are implemented:
//!
//! * **Exact photon-subtracted TMSV** ([`PhotonSubtractedTmsv`]): subtracting
//!   k photons per mode from a pure two-mode squeezed vacuum leaves a Schmidt
//!   ladder with coefficients proportional to C(n+k, k) (tau lambda)^n, whose
//!   negativity and success probability are closed forms in the diagonal
//!   hypergeometric value 2F1(k+1, k+1; 1; (tau lambda)^2).
//! * **Probabilistic 2PS on arbitrary standard-form states**
//!   ([`probabilistic_2ps_standard`]): the conditional characteristic
//!   function is a Gaussian envelope with modified submatrices times a
//!   quartic polynomial. All polynomial kernels are obtained by Gaussian
//!   conditioning of the post-beam-splitter four-mode state on the two click
//!   modes, which reduces to 2x2 algebra in the precision blocks X_A, X_B, H
//!   and the Schur complement Y = X_B - H X_A^-1 H.
//! * **Heuristic 2PS** ([`heuristic_2ps_corrections`]): bare annihilation
//!   operators applied to both modes (the tau -> 1 idealization); corrections
//!   are quadratic kernels built directly from the input covariance.
//!
//! Both non-Gaussian descriptions compress into a single scalar correction
//! (g probabilistic, h heuristic) entering teleportation fidelities as
//! (1 + g)/sqrt(det(I + Gamma/2)); [`regaussify`] trades the non-Gaussian
//! state for the Gaussian one with the same fidelity.

use nalgebra::{Matrix2, Vector2, Vector4};
use num_complex::Complex64;

use crate::channel::Geometry;
use crate::gaussian::{hyp2f1_diag, validity_theta, StandardTwoModeState, SymplecticForm, THETA_TOL};
use crate::{Error, Result};

/// Workspace determinants below this are treated as singular.
const SINGULAR_DET_TOL: f64 = 1e-14;
/// Polynomial normalizations (m1 m2 + m3, or E0) below this are singular:
/// the conditioned state carries no probability mass. The bound sits far
/// below the (1 - tau)^2 scaling of legitimate normalizations near tau = 1
/// but above the O(eps^2) rounding floor of a true zero (e.g. vacuum input).
const SINGULAR_NORM_TOL: f64 = 1e-28;
/// Schmidt coefficient truncation: stop once a_n^2 / P < this bound (the
/// tail is geometric with ratio (tau lambda)^2, so the cut is safe).
const COEFF_TRUNC: f64 = 1e-16;
/// Hard cap on generated Schmidt coefficients.
const COEFF_CAP: usize = 100_000;

// ---------------------------------------------------- exact PS-TMSV states

/// k-per-mode photon-subtracted two-mode squeezed vacuum with squeezing
/// amplitude `lambda` = tanh r and tap transmissivity `tau`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhotonSubtractedTmsv {
    k: u32,
    lambda: f64,
    tau: f64,
}

impl PhotonSubtractedTmsv {
    /// Validate and build; requires lambda in [0, 1) and tau in (0, 1].
    pub fn new(k: u32, lambda: f64, tau: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&lambda) {
            return Err(Error::Domain(format!(
                "squeezing amplitude lambda must lie in [0, 1), got {lambda}"
            )));
        }
        if !(tau > 0.0 && tau <= 1.0) {
            return Err(Error::Domain(format!(
                "tap transmissivity tau must lie in (0, 1], got {tau}"
            )));
        }
        Ok(Self { k, lambda, tau })
    }

    /// Photons subtracted from each mode.
    pub fn k(&self) -> u32 {
        self.k
    }

    /// Schmidt amplitude lambda = tanh r of the input TMSV.
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Tap transmissivity.
    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// Effective amplitude lambda_tau = tau lambda governing the output
    /// Schmidt ladder.
    pub fn lambda_tau(&self) -> f64 {
        self.tau * self.lambda
    }

    /// Success probability P_2k of all 2k detectors clicking:
    /// (1 - lambda^2) lambda^{2k} (1 - tau)^{2k} 2F1(k+1, k+1; 1; lambda_tau^2).
    pub fn success_probability(&self) -> Result<f64> {
        let lt2 = self.lambda_tau() * self.lambda_tau();
        let envelope = (1.0 - self.lambda * self.lambda)
            * (self.lambda * (1.0 - self.tau)).powi(2 * self.k as i32);
        Ok(envelope * hyp2f1_diag(self.k, lt2)?)
    }

    /// Negativity of the subtracted state (closed form in lambda_tau).
    pub fn negativity(&self) -> Result<f64> {
        tmsv_ps_negativity(self.k, self.lambda_tau())
    }

    /// Unnormalized Schmidt coefficients a_n with sum of squares equal to
    /// the success probability:
    /// a_n = sqrt(1 - lambda^2) lambda^{n+k} C(n+k, k) (1-tau)^k tau^n.
    ///
    /// Truncated once a_n^2 falls below `1e-16` of the accumulated norm.
    pub fn coefficients(&self) -> Result<Vec<f64>> {
        let mut a = (1.0 - self.lambda * self.lambda).sqrt()
            * (self.lambda * (1.0 - self.tau)).powi(self.k as i32);
        let lt = self.lambda_tau();
        let mut out = Vec::new();
        let mut norm = 0.0_f64;
        for n in 0..COEFF_CAP {
            out.push(a);
            norm += a * a;
            if a * a < COEFF_TRUNC * norm && n > 0 {
                return Ok(out);
            }
            // a_{n+1}/a_n = lambda tau (n + k + 1)/(n + 1)
            a *= lt * (n as f64 + self.k as f64 + 1.0) / (n as f64 + 1.0);
        }
        Err(Error::Convergence(format!(
            "Schmidt ladder did not truncate below {COEFF_CAP} terms at lambda_tau = {lt}"
        )))
    }
}

/// Success probability of k-per-mode photon subtraction on a TMSV with
/// amplitude `lambda` through taps of transmissivity `tau`. Only the
/// published closed forms k = 1, 2 are exposed.
pub fn tmsv_ps_success_probability(k: u32, lambda: f64, tau: f64) -> Result<f64> {
    if !(k == 1 || k == 2) {
        return Err(Error::Domain(format!(
            "success probability is provided for k = 1, 2 only, got {k}"
        )));
    }
    PhotonSubtractedTmsv::new(k, lambda, tau)?.success_probability()
}

/// Negativity of the k-per-mode photon-subtracted TMSV:
///
/// ```text
/// N = 1/2 [ (1 - lambda_tau)^{-2(k+1)} / 2F1(k+1, k+1; 1; lambda_tau^2) - 1 ].
/// ```
///
/// At k = 0 this collapses to lambda_tau / (1 - lambda_tau), the TMSV value.
pub fn tmsv_ps_negativity(k: u32, lambda_tau: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&lambda_tau) {
        return Err(Error::Domain(format!(
            "effective amplitude lambda_tau must lie in [0, 1), got {lambda_tau}"
        )));
    }
    let hyp = hyp2f1_diag(k, lambda_tau * lambda_tau)?;
    Ok(0.5 * ((1.0 - lambda_tau).powi(-2 * (k as i32 + 1)) / hyp - 1.0))
}

// ------------------------------------------------------------- workspaces

/// Flavor of a two-photon-subtraction description.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorrectionFlavor {
    /// Physical beam-splitter-and-detector model at finite tau.
    Probabilistic,
    /// Bare annihilation operators (tau -> 1 idealization).
    Heuristic,
}

/// Intermediate matrices of the probabilistic 2PS conditional state.
///
/// `x_a`, `x_b`, `h` are the precision blocks of the two click modes after
/// the beam splitters, `y` the Schur complement eliminating the first click
/// mode. `j1/j2/k1/k2` couple kept quadratures to click means; the 2x2
/// kernels `p*/q*/r*` and scalars `m1/m2/m3` define the quartic polynomial
/// of the conditional characteristic function, and `sigma_a_t/sigma_b_t/
/// eps_t` its Gaussian envelope.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilisticWorkspace {
    pub x_a: Matrix2<f64>,
    pub x_b: Matrix2<f64>,
    pub h: Matrix2<f64>,
    pub y: Matrix2<f64>,
    pub j1: Matrix2<f64>,
    pub j2: Matrix2<f64>,
    pub k1: Matrix2<f64>,
    pub k2: Matrix2<f64>,
    pub m1: f64,
    pub m2: f64,
    pub m3: f64,
    pub p1: Matrix2<f64>,
    pub p2: Matrix2<f64>,
    pub p12: Matrix2<f64>,
    pub q1: Matrix2<f64>,
    pub q2: Matrix2<f64>,
    pub q12: Matrix2<f64>,
    pub r1: Matrix2<f64>,
    pub r2: Matrix2<f64>,
    pub r12: Matrix2<f64>,
    pub sigma_a_t: Matrix2<f64>,
    pub sigma_b_t: Matrix2<f64>,
    pub eps_t: Matrix2<f64>,
    pub success_probability: f64,
}

fn sym2(m: &Matrix2<f64>) -> Matrix2<f64> {
    (m + m.transpose()) * 0.5
}

impl ProbabilisticWorkspace {
    /// Build the workspace for a standard-form input at tap transmissivity
    /// `tau` in (0, 1).
    pub fn build(state: &StandardTwoModeState, tau: f64) -> Result<Self> {
        if !(tau > 0.0 && tau < 1.0) {
            return Err(Error::Domain(format!(
                "tap transmissivity tau must lie in (0, 1), got {tau}"
            )));
        }
        let o1 = SymplecticForm::omega1();
        let o1t = o1.transpose();
        let i2 = Matrix2::identity();
        let sa = i2 * state.alpha();
        let sb = i2 * state.beta();
        let eps = SymplecticForm::sigma_z() * state.gamma();

        let x_a = 0.5 * o1 * (sa * (1.0 - tau) + i2 * (1.0 + tau)) * o1t;
        let x_b = 0.5 * o1 * (sb * (1.0 - tau) + i2 * (1.0 + tau)) * o1t;
        let h = -0.5 * (1.0 - tau) * o1 * eps * o1t;
        let det_xa = x_a.determinant();
        let x_a_inv = x_a.try_inverse().filter(|_| det_xa > SINGULAR_DET_TOL).ok_or_else(|| {
            Error::SingularWorkspace(format!("det X_A = {det_xa:.3e} is not positive"))
        })?;
        let y = x_b - h * x_a_inv * h;
        let det_y = y.determinant();
        let y_inv = y.try_inverse().filter(|_| det_y > SINGULAR_DET_TOL).ok_or_else(|| {
            Error::SingularWorkspace(format!("det Y = {det_y:.3e} is not positive"))
        })?;

        // inverse covariance blocks of the two click modes
        let c_vv = y_inv;
        let c_uv = x_a_inv * h * y_inv;
        let c_uu = x_a_inv + x_a_inv * h * y_inv * h * x_a_inv;
        let m2 = 1.0 - 0.5 * c_uu.trace();
        let m1 = 1.0 - 0.5 * c_vv.trace();
        let m3 = 0.5 * (c_uv * c_uv.transpose()).trace();

        let c = 0.5 * (tau * (1.0 - tau)).sqrt();
        let j1 = (sa - i2) * o1t * c;
        let j2 = eps * o1t * c;
        let k1 = (eps * o1t + (sa - i2) * o1t * x_a_inv * h) * c;
        let k2 = ((sb - i2) * o1t + eps * o1t * x_a_inv * h) * c;

        // linear response of the click means to the kept quadratures
        let av = y_inv * k1.transpose() * o1t;
        let bv = y_inv * k2.transpose() * o1t;
        let au = x_a_inv * (j1.transpose() * o1t + h * av);
        let bu = x_a_inv * (j2.transpose() * o1t + h * bv);

        let p1 = -0.5 * av.transpose() * av;
        let p2 = -0.5 * bv.transpose() * bv;
        let p12 = -av.transpose() * bv;
        let q1 = -0.5 * au.transpose() * au;
        let q2 = -0.5 * bu.transpose() * bu;
        let q12 = -au.transpose() * bu;
        let r1 = 0.5 * (au.transpose() * c_uv * av + av.transpose() * c_uv.transpose() * au);
        let r2 = 0.5 * (bu.transpose() * c_uv * bv + bv.transpose() * c_uv.transpose() * bu);
        let r12 = au.transpose() * c_uv * bv + av.transpose() * c_uv.transpose() * bu;

        let sigma_a_t =
            sa * tau + i2 * (1.0 - tau) - 2.0 * (j1 * x_a_inv * j1.transpose() + k1 * y_inv * k1.transpose());
        let sigma_b_t =
            sb * tau + i2 * (1.0 - tau) - 2.0 * (j2 * x_a_inv * j2.transpose() + k2 * y_inv * k2.transpose());
        let eps_t =
            eps * tau - 2.0 * (j1 * x_a_inv * j2.transpose() + k1 * y_inv * k2.transpose());

        let success_probability = (m1 * m2 + m3) / (det_xa * det_y).sqrt();

        Ok(Self {
            x_a,
            x_b,
            h,
            y,
            j1,
            j2,
            k1,
            k2,
            m1,
            m2,
            m3,
            p1,
            p2,
            p12,
            q1,
            q2,
            q12,
            r1,
            r2,
            r12,
            sigma_a_t,
            sigma_b_t,
            eps_t,
            success_probability,
        })
    }

    /// Polynomial normalization m1 m2 + m3 (= P sqrt(det X_A det Y)).
    pub fn normalization(&self) -> f64 {
        self.m1 * self.m2 + self.m3
    }

    /// The correction scalar g: the polynomial kernels folded with
    /// T = Omega (I + Gamma_t/2)^-1 Omega^T, where Gamma_t is built from the
    /// envelope submatrices.
    pub fn correction_g(&self) -> Result<f64> {
        let norm = self.normalization();
        if norm.abs() < SINGULAR_NORM_TOL {
            return Err(Error::SingularWorkspace(format!(
                "polynomial normalization m1 m2 + m3 = {norm:.3e} vanishes \
                 (zero success probability)"
            )));
        }
        let sz = SymplecticForm::sigma_z();
        let o1 = SymplecticForm::omega1();
        let gamma_t = sz * self.sigma_a_t * sz + self.sigma_b_t
            - sz * self.eps_t
            - self.eps_t.transpose() * sz;
        let m = Matrix2::identity() + 0.5 * gamma_t;
        let m_inv = m.try_inverse().ok_or_else(|| {
            Error::SingularWorkspace("singular fidelity matrix I + Gamma_t/2".into())
        })?;
        let t = o1 * m_inv * o1.transpose();
        let pc = sym2(&(sz * self.p1 * sz + self.p2 + sz * self.p12));
        let qc = sym2(&(sz * self.q1 * sz + self.q2 + sz * self.q12));
        let rc = sym2(&(sz * self.r1 * sz + self.r2 + sz * self.r12));
        let tp = (t * pc).trace();
        let tq = (t * qc).trace();
        Ok((self.m1 * tq + self.m2 * tp + tp * tq + 2.0 * (t * pc * t * qc).trace()
            + (t * rc).trace())
            / norm)
    }
}

/// Intermediate scalars and kernels of the heuristic (bare-annihilation)
/// 2PS corrections, all built directly from the input covariance.
#[derive(Debug, Clone, PartialEq)]
pub struct HeuristicWorkspace {
    pub m_a: f64,
    pub m_b: f64,
    pub m_c: f64,
    pub mat_a: Matrix2<f64>,
    pub mat_b: Matrix2<f64>,
    pub mat_c: Matrix2<f64>,
    pub mat_ac: Matrix2<f64>,
    pub mat_bc: Matrix2<f64>,
    pub e0: f64,
    pub e1: Matrix2<f64>,
    pub e2_a: Matrix2<f64>,
    pub e2_b: Matrix2<f64>,
    /// Bare Sigma_A, Sigma_B, eps, kept for the fidelity matrix.
    pub sigma_a: Matrix2<f64>,
    pub sigma_b: Matrix2<f64>,
    pub eps: Matrix2<f64>,
}

impl HeuristicWorkspace {
    /// Build the workspace; fails with [`Error::SingularWorkspace`] when the
    /// normalization E0 = m_A m_B + m_C vanishes (e.g. on the vacuum, where
    /// annihilation has nothing to act on).
    pub fn build(state: &StandardTwoModeState) -> Result<Self> {
        let o1 = SymplecticForm::omega1();
        let o1t = o1.transpose();
        let sz = SymplecticForm::sigma_z();
        let i2 = Matrix2::identity();
        let sa = i2 * state.alpha();
        let sb = i2 * state.beta();
        let eps = sz * state.gamma();

        let m_a = 1.0 - 0.5 * sa.trace();
        let m_b = 1.0 - 0.5 * sb.trace();
        let m_c = 0.5 * (eps * eps).trace();
        let e0 = m_a * m_b + m_c;
        if e0.abs() < SINGULAR_NORM_TOL {
            return Err(Error::SingularWorkspace(format!(
                "normalization E0 = {e0:.3e} vanishes; the annihilated state \
                 carries no weight"
            )));
        }
        let mat_a = 0.25 * (i2 - 2.0 * o1 * sa * o1t + o1 * sa * sa * o1t);
        let mat_b = 0.25 * (i2 - 2.0 * o1 * sb * o1t + o1 * sb * sb * o1t);
        let mat_c = 0.25 * o1 * eps * eps * o1t;
        let mat_ac = 0.5 * (o1 * sa * eps * o1t - o1 * eps * o1t);
        let mat_bc = 0.5 * (o1 * eps * sb * o1t - o1 * eps * o1t);

        let e1 = (mat_b + sz * mat_c * sz + sz * mat_bc) * m_a
            + (sz * mat_a * sz + mat_c + sz * mat_ac) * m_b
            + (mat_c * 2.0 + sz * mat_ac) * o1 * (i2 + sz * eps - sb) * o1t;
        let e2_a = mat_c + sz * mat_ac + sz * mat_a * sz;
        let e2_b = mat_b + sz * mat_bc + sz * mat_c * sz;

        Ok(Self {
            m_a,
            m_b,
            m_c,
            mat_a,
            mat_b,
            mat_c,
            mat_ac,
            mat_bc,
            e0,
            e1,
            e2_a,
            e2_b,
            sigma_a: sa,
            sigma_b: sb,
            eps,
        })
    }

    /// The correction scalar h, folding E1 and the rank-two terms with
    /// T = Omega (I + Gamma/2)^-1 Omega^T built from the *bare* covariance.
    pub fn correction_h(&self) -> Result<f64> {
        let sz = SymplecticForm::sigma_z();
        let o1 = SymplecticForm::omega1();
        let gamma = sz * self.sigma_a * sz + self.sigma_b
            - sz * self.eps
            - self.eps.transpose() * sz;
        let m = Matrix2::identity() + 0.5 * gamma;
        let det_m = m.determinant();
        let m_inv = m.try_inverse().filter(|_| det_m > SINGULAR_DET_TOL).ok_or_else(|| {
            Error::SingularWorkspace("singular fidelity matrix I + Gamma/2".into())
        })?;
        let t = o1 * m_inv * o1.transpose();
        Ok(((t * self.e1).trace()
            - (2.0 / det_m) * (o1 * self.e2_a * o1.transpose() * self.e2_b).trace()
            + 3.0 * (t * self.e2_a).trace() * (t * self.e2_b).trace())
            / self.e0)
    }
}

/// Either flavor of correction workspace.
#[derive(Debug, Clone, PartialEq)]
pub enum CorrectionWorkspace {
    Probabilistic(ProbabilisticWorkspace),
    Heuristic(HeuristicWorkspace),
}

// --------------------------------------------------- non-Gaussian resources

/// Outcome of a two-photon-subtraction protocol on a standard-form state:
/// the Gaussian envelope scalars (alpha_t, beta_t, gamma_t), the scalar
/// correction (g or h) that carries all non-Gaussian content entering
/// fidelities, and the success probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonGaussianResource {
    alpha_t: f64,
    beta_t: f64,
    gamma_t: f64,
    correction: f64,
    success_probability: f64,
    flavor: CorrectionFlavor,
}

impl NonGaussianResource {
    /// Envelope diagonal of the first mode.
    pub fn alpha_t(&self) -> f64 {
        self.alpha_t
    }

    /// Envelope diagonal of the second mode.
    pub fn beta_t(&self) -> f64 {
        self.beta_t
    }

    /// Envelope correlation amplitude.
    pub fn gamma_t(&self) -> f64 {
        self.gamma_t
    }

    /// Scalar non-Gaussian correction: g (probabilistic) or h (heuristic).
    pub fn correction(&self) -> f64 {
        self.correction
    }

    /// Success probability of the protocol (1 for the heuristic flavor,
    /// which is not a physical measurement).
    pub fn success_probability(&self) -> f64 {
        self.success_probability
    }

    /// Which description produced this resource.
    pub fn flavor(&self) -> CorrectionFlavor {
        self.flavor
    }

    /// Modeling assumptions baked into the correction scalars, surfaced so
    /// downstream reports can disclose them.
    pub fn assumptions(&self) -> &'static str {
        "correction kernels contract cross terms through the diag(1,-1) \
         reflection fixed by the standard-form correlation block"
    }
}

/// Closed-form envelope scalars and success probability of probabilistic
/// 2PS on a standard-form state (alpha, beta, gamma) at transmissivity tau.
fn closed_2ps_envelope(alpha: f64, beta: f64, gamma: f64, tau: f64) -> (f64, f64, f64, f64) {
    let g2 = gamma * gamma;
    let cross = (1.0 - alpha) * (1.0 - beta) - g2;
    let d = (1.0 + alpha) * (1.0 + beta) - g2
        + 2.0 * (1.0 - alpha * beta + g2) * tau
        + cross * tau * tau;
    let alpha_t = 1.0 - 2.0 * tau * ((1.0 - alpha) * (1.0 + beta) + g2 + cross * tau) / d;
    let beta_t = 1.0 - 2.0 * tau * ((1.0 + alpha) * (1.0 - beta) + g2 + cross * tau) / d;
    let gamma_t = 4.0 * tau * gamma / d;
    let num = (1.0 - alpha * beta + g2 + cross * tau).powi(2) - (alpha - beta).powi(2) + 4.0 * g2;
    let p = 4.0 * (1.0 - tau).powi(2) * num / d.powi(3);
    (alpha_t, beta_t, gamma_t, p)
}

/// Probabilistic two-photon subtraction on an arbitrary standard-form state.
///
/// Returns the envelope scalars (closed forms in alpha, beta, gamma, tau),
/// the success probability, and the correction g from the conditional-state
/// workspace. When the success probability vanishes (e.g. vacuum input) the
/// conditional state does not exist and the correction is reported as 0.
pub fn probabilistic_2ps_standard(
    state: &StandardTwoModeState,
    tau: f64,
) -> Result<NonGaussianResource> {
    let ws = ProbabilisticWorkspace::build(state, tau)?;
    let (alpha_t, beta_t, gamma_t, p) = closed_2ps_envelope(
        state.alpha(),
        state.beta(),
        state.gamma(),
        tau,
    );
    let theta = validity_theta(alpha_t, beta_t, gamma_t);
    if theta < -THETA_TOL {
        return Err(Error::InvalidResource(format!(
            "envelope submatrices fail the validity condition: theta = {theta:.3e}"
        )));
    }
    let correction = if ws.normalization().abs() < SINGULAR_NORM_TOL {
        0.0
    } else {
        ws.correction_g()?
    };
    Ok(NonGaussianResource {
        alpha_t,
        beta_t,
        gamma_t,
        correction,
        success_probability: p.clamp(0.0, 1.0),
        flavor: CorrectionFlavor::Probabilistic,
    })
}

/// The correction scalar g of probabilistic 2PS at transmissivity tau.
pub fn probabilistic_correction_g(state: &StandardTwoModeState, tau: f64) -> Result<f64> {
    ProbabilisticWorkspace::build(state, tau)?.correction_g()
}

/// Heuristic two-photon subtraction (bare annihilation on both modes): the
/// envelope is the unmodified input covariance and the correction is h.
pub fn heuristic_2ps_corrections(state: &StandardTwoModeState) -> Result<NonGaussianResource> {
    let ws = HeuristicWorkspace::build(state)?;
    Ok(NonGaussianResource {
        alpha_t: state.alpha(),
        beta_t: state.beta(),
        gamma_t: state.gamma(),
        correction: ws.correction_h()?,
        success_probability: 1.0,
        flavor: CorrectionFlavor::Heuristic,
    })
}

// ---------------------------------------------------------- re-Gaussification

/// Replace a non-Gaussian resource by the Gaussian state with identical
/// teleportation fidelity.
///
/// With correction c and envelope (alpha_t, beta_t, gamma_t):
///
/// * symmetric geometry: ((alpha_t - c), (beta_t - c), gamma_t) / (1 + c);
/// * asymmetric geometry: both diagonals are replaced by the balanced value
///   ((alpha_t + beta_t)/2 - c) / (1 + c), which leaves the fidelity matrix
///   unchanged because it depends on the diagonals only through their sum.
pub fn regaussify(
    resource: &NonGaussianResource,
    geometry: Geometry,
) -> Result<StandardTwoModeState> {
    let c = resource.correction();
    if 1.0 + c <= 0.0 {
        return Err(Error::InvalidResource(format!(
            "correction {c} pushes the envelope out of the state space (1 + c <= 0)"
        )));
    }
    let (da, db) = match geometry {
        Geometry::Symmetric => (resource.alpha_t(), resource.beta_t()),
        Geometry::Asymmetric => {
            if c == 0.0 && resource.alpha_t() != resource.beta_t() {
                return Err(Error::InvalidResource(
                    "asymmetric re-Gaussification of a correction-free resource with \
                     unequal diagonals would alter the state"
                        .into(),
                ));
            }
            let mean = 0.5 * (resource.alpha_t() + resource.beta_t());
            (mean, mean)
        }
    };
    let alpha = (da - c) / (1.0 + c);
    let beta = (db - c) / (1.0 + c);
    let gamma = resource.gamma_t() / (1.0 + c);
    let theta = validity_theta(alpha, beta, gamma);
    if theta < -THETA_TOL {
        return Err(Error::InvalidResource(format!(
            "re-Gaussified scalars fail the validity condition: theta = {theta:.3e}"
        )));
    }
    // effective construction: the re-Gaussified scalars are a bookkeeping
    // state and may sit below the physical det Sigma floor at strong
    // squeezing while still passing the validity condition above
    StandardTwoModeState::new_effective(alpha, beta, gamma).map_err(|e| {
        Error::InvalidResource(format!("re-Gaussified scalars rejected: {e}"))
    })
}

// ------------------------------------------------- characteristic function

/// Characteristic function of the probabilistic-2PS state at a real
/// phase-space point (a1, a2, b1, b2): Gaussian envelope in the modified
/// submatrices times the normalized quartic polynomial. chi(0) = 1 exactly.
pub fn nongaussian_cf(
    state: &StandardTwoModeState,
    tau: f64,
    point: &Vector4<f64>,
) -> Result<Complex64> {
    let ws = ProbabilisticWorkspace::build(state, tau)?;
    let norm = ws.normalization();
    if norm.abs() < SINGULAR_NORM_TOL {
        return Err(Error::SingularWorkspace(format!(
            "polynomial normalization m1 m2 + m3 = {norm:.3e} vanishes"
        )));
    }
    let o1 = SymplecticForm::omega1();
    let o1t = o1.transpose();
    let av = Vector2::new(point[0], point[1]);
    let bv = Vector2::new(point[2], point[3]);
    let quad = |m: &Matrix2<f64>, u: &Vector2<f64>, v: &Vector2<f64>| u.dot(&(m * v));
    let qf = quad(&(o1 * ws.sigma_a_t * o1t), &av, &av)
        + quad(&(o1 * ws.sigma_b_t * o1t), &bv, &bv)
        + 2.0 * quad(&(o1 * ws.eps_t * o1t), &av, &bv);
    let poly = (ws.m1 + quad(&ws.p1, &av, &av) + quad(&ws.p2, &bv, &bv) + quad(&ws.p12, &av, &bv))
        * (ws.m2 + quad(&ws.q1, &av, &av) + quad(&ws.q2, &bv, &bv) + quad(&ws.q12, &av, &bv))
        + ws.m3
        + quad(&ws.r1, &av, &av)
        + quad(&ws.r2, &bv, &bv)
        + quad(&ws.r12, &av, &bv);
    Ok(Complex64::new((-qf / 4.0).exp() * poly / norm, 0.0))
}

// ------------------------------------------------------------------- tests

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn tmsv(r: f64) -> StandardTwoModeState {
        StandardTwoModeState::new((2.0 * r).cosh(), (2.0 * r).cosh(), (2.0 * r).sinh()).unwrap()
    }

    /// Seeded draw of random valid standard-form states.
    fn random_states(seed: u64, count: usize) -> Vec<StandardTwoModeState> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::with_capacity(count);
        while out.len() < count {
            let a = 1.0 + 3.0 * rng.random::<f64>();
            let b = 1.0 + 3.0 * rng.random::<f64>();
            let g = 0.99 * ((a - 1.0) * (b + 1.0)).sqrt() * rng.random::<f64>();
            if let Ok(s) = StandardTwoModeState::new(a, b, g) {
                out.push(s);
            }
        }
        out
    }

    /// Scalar-route fidelity (1 + c) / (1 + (at + bt - 2 gt)/2).
    fn fid(at: f64, bt: f64, gt: f64, c: f64) -> f64 {
        (1.0 + c) / (1.0 + 0.5 * (at + bt - 2.0 * gt))
    }

    /// Closed-form 2PS fidelity used as the oracle for the g machinery.
    fn f2ps_closed(a: f64, b: f64, g: f64, tau: f64) -> f64 {
        let cross = (1.0 - a) * (1.0 - b) - g * g;
        let big_a = -a * b + (1.0 + g).powi(2) + cross * tau;
        let big_b = (1.0 + a) * (1.0 + b) - g * g - (a * b - (1.0 - g).powi(2)) * tau;
        let big_c = (1.0 - a * b + g * g).powi(2) - (a - b).powi(2)
            + 4.0 * g * g
            + 4.0 * g * cross * tau;
        let d2 = (1.0 - a * b + g * g + cross * tau).powi(2) - (a - b).powi(2) + 4.0 * g * g;
        0.25 * (1.0 + tau * big_a / big_b).powi(3) * (1.0 + big_c / d2)
    }

    #[test]
    fn success_probability_matches_series_oracle() {
        // oracle: partial sums of a_n^2 with the ratio recurrence
        for &(k, lambda, tau) in
            &[(1u32, 0.3_f64, 0.9_f64), (1, 0.76, 0.95), (2, 0.5, 0.8), (2, 0.76, 0.95)]
        {
            let mut term = (1.0 - lambda * lambda)
                * (lambda * (1.0 - tau)).powi(2 * k as i32);
            let mut sum = 0.0;
            for n in 0..100_000u32 {
                sum += term;
                let ratio = lambda * tau * (n as f64 + k as f64 + 1.0) / (n as f64 + 1.0);
                term *= ratio * ratio;
            }
            let closed = tmsv_ps_success_probability(k, lambda, tau).unwrap();
            assert_relative_eq!(closed, sum, max_relative = 1e-10);
        }
    }

    #[test]
    fn success_probability_reference_points() {
        let p2 = tmsv_ps_success_probability(1, 1.0_f64.tanh(), 0.95).unwrap();
        assert!(
            (p2 - 8.6e-3).abs() < 1e-4,
            "expected P2 near 8.6e-3 at r = 1, tau = 0.95, got {p2:.4e}"
        );
        assert_eq!(tmsv_ps_success_probability(1, 0.0, 0.9).unwrap(), 0.0);
        assert_eq!(tmsv_ps_success_probability(1, 0.5, 1.0).unwrap(), 0.0);
        assert!(matches!(
            tmsv_ps_success_probability(3, 0.5, 0.9),
            Err(Error::Domain(_))
        ));
        // deeper subtraction clicks less often
        for lambda in [0.2, 0.5, 0.76] {
            for tau in [0.5, 0.9, 0.99] {
                let p2 = tmsv_ps_success_probability(1, lambda, tau).unwrap();
                let p4 = tmsv_ps_success_probability(2, lambda, tau).unwrap();
                assert!(p4 <= p2, "P4 = {p4} > P2 = {p2} at ({lambda}, {tau})");
                assert!((0.0..=1.0).contains(&p2));
            }
        }
    }

    #[test]
    fn negativity_matches_brute_force_ladder() {
        // oracle: N = ((sum c_n)^2 / sum c_n^2 - 1)/2 with c_n = C(n+k, k) z^n
        for &(k, z) in &[(0u32, 0.4), (1, 0.25), (1, 0.6), (2, 0.3)] {
            let (mut c, mut lin, mut sq) = (1.0_f64, 0.0_f64, 0.0_f64);
            for n in 0..10_000u32 {
                lin += c;
                sq += c * c;
                c *= z * (n as f64 + k as f64 + 1.0) / (n as f64 + 1.0);
            }
            let brute = 0.5 * (lin * lin / sq - 1.0);
            let closed = tmsv_ps_negativity(k, z).unwrap();
            assert_relative_eq!(closed, brute, max_relative = 1e-9);
        }
    }

    #[test]
    fn negativity_reference_points() {
        // k = 0 collapses to the TMSV value z/(1-z)
        for z in [0.1, 0.5, 0.9] {
            assert_relative_eq!(
                tmsv_ps_negativity(0, z).unwrap(),
                z / (1.0 - z),
                max_relative = 1e-12
            );
        }
        assert_relative_eq!(
            tmsv_ps_negativity(1, 0.25).unwrap(),
            0.725490196,
            max_relative = 1e-8
        );
        for k in 0..4 {
            assert_eq!(tmsv_ps_negativity(k, 0.0).unwrap(), 0.0);
        }
        assert!(matches!(tmsv_ps_negativity(1, 1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn schmidt_coefficients_normalize_to_success_probability() {
        for &(k, lambda, tau) in &[(1u32, 0.76, 0.95), (2, 0.5, 0.9)] {
            let ps = PhotonSubtractedTmsv::new(k, lambda, tau).unwrap();
            let p = ps.success_probability().unwrap();
            let norm: f64 = ps.coefficients().unwrap().iter().map(|a| a * a).sum();
            assert_relative_eq!(norm / p, 1.0, max_relative = 1e-10);
        }
    }

    #[test]
    fn workspace_invariants_and_closed_envelope_agreement() {
        for state in random_states(0xC0FFEE, 10) {
            let tau = 0.95;
            let ws = ProbabilisticWorkspace::build(&state, tau).unwrap();
            assert!(ws.x_a.determinant() > 0.0 && ws.x_a.trace() > 0.0);
            assert!(ws.y.determinant() > 0.0 && ws.y.trace() > 0.0);
            assert!(ws.normalization() > 0.0);
            // envelope blocks stay scalar-diagonal / sigma_Z shaped, and the
            // scalars match the closed forms
            let (at, bt, gt, p) =
                closed_2ps_envelope(state.alpha(), state.beta(), state.gamma(), tau);
            assert_relative_eq!(ws.sigma_a_t[(0, 0)], at, max_relative = 1e-10);
            assert_relative_eq!(ws.sigma_b_t[(1, 1)], bt, max_relative = 1e-10);
            assert_relative_eq!(ws.eps_t[(0, 0)], gt, max_relative = 1e-10);
            assert_relative_eq!(ws.eps_t[(1, 1)], -gt, max_relative = 1e-10);
            assert_relative_eq!(ws.success_probability, p, max_relative = 1e-9);
        }
    }

    #[test]
    fn success_probability_consistent_with_tmsv_route() {
        let state = tmsv(1.0);
        let res = probabilistic_2ps_standard(&state, 0.95).unwrap();
        let direct = tmsv_ps_success_probability(1, 1.0_f64.tanh(), 0.95).unwrap();
        assert_relative_eq!(res.success_probability(), direct, max_relative = 1e-10);
    }

    #[test]
    fn vacuum_subtraction_never_succeeds() {
        let vac = StandardTwoModeState::new(1.0, 1.0, 0.0).unwrap();
        let res = probabilistic_2ps_standard(&vac, 0.95).unwrap();
        assert_eq!(res.success_probability(), 0.0);
        assert_eq!(res.correction(), 0.0);
        // the strict correction route reports the singularity instead
        assert!(matches!(
            probabilistic_correction_g(&vac, 0.95),
            Err(Error::SingularWorkspace(_))
        ));
    }

    #[test]
    fn g_fidelity_matches_closed_form() {
        // oracle: the closed-form 2PS fidelity in (alpha, beta, gamma, tau)
        let mut rng = ChaCha8Rng::seed_from_u64(0xC0FFEE);
        for state in random_states(0xC0FFEE ^ 7, 12) {
            let tau = 0.7 + 0.29 * rng.random::<f64>();
            let res = probabilistic_2ps_standard(&state, tau).unwrap();
            let f_machinery = fid(
                res.alpha_t(),
                res.beta_t(),
                res.gamma_t(),
                res.correction(),
            );
            let f_closed = f2ps_closed(state.alpha(), state.beta(), state.gamma(), tau);
            assert_relative_eq!(f_machinery, f_closed, max_relative = 1e-8);
        }
    }

    #[test]
    fn heuristic_matches_tau_to_one_limit() {
        for state in random_states(0xC0FFEE ^ 21, 6) {
            let prob = probabilistic_2ps_standard(&state, 1.0 - 1e-7).unwrap();
            let heur = heuristic_2ps_corrections(&state).unwrap();
            let f_prob = fid(prob.alpha_t(), prob.beta_t(), prob.gamma_t(), prob.correction());
            let f_heur = fid(heur.alpha_t(), heur.beta_t(), heur.gamma_t(), heur.correction());
            assert!(
                (f_prob - f_heur).abs() < 1e-4,
                "expected tau->1 fidelity {f_heur}, got {f_prob}"
            );
        }
    }

    #[test]
    fn heuristic_tmsv_fidelity_matches_closed_form() {
        let r = 1.0_f64;
        let lambda = r.tanh();
        let res = heuristic_2ps_corrections(&tmsv(r)).unwrap();
        let f = fid(res.alpha_t(), res.beta_t(), res.gamma_t(), res.correction());
        // closed form in lambda_tau with tau = 1
        let lt = lambda;
        let closed = (1.0 - lt + lt * lt / 2.0) * (1.0 + lt).powi(3) / (2.0 * (1.0 + lt * lt));
        assert_relative_eq!(f, closed, max_relative = 1e-10);
        assert_eq!(res.success_probability(), 1.0);
        assert_eq!(res.flavor(), CorrectionFlavor::Heuristic);
    }

    #[test]
    fn heuristic_vacuum_is_singular() {
        let vac = StandardTwoModeState::new(1.0, 1.0, 0.0).unwrap();
        assert!(matches!(
            heuristic_2ps_corrections(&vac),
            Err(Error::SingularWorkspace(_))
        ));
    }

    #[test]
    fn regaussify_preserves_fidelity_exactly() {
        for state in random_states(0xC0FFEE ^ 99, 8) {
            let res = probabilistic_2ps_standard(&state, 0.95).unwrap();
            let f_res = fid(res.alpha_t(), res.beta_t(), res.gamma_t(), res.correction());
            for geometry in [Geometry::Symmetric, Geometry::Asymmetric] {
                let rg = match regaussify(&res, geometry) {
                    Ok(rg) => rg,
                    // strongly asymmetric envelopes may leave the state space
                    Err(Error::InvalidResource(_)) => continue,
                    Err(e) => panic!("unexpected error {e}"),
                };
                let f_rg = 1.0 / (1.0 + 0.5 * (rg.alpha() + rg.beta() - 2.0 * rg.gamma()));
                assert_relative_eq!(f_rg, f_res, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn regaussify_identity_and_geometry_edge_cases() {
        // correction 0 on a symmetric resource: state unchanged
        let plain = NonGaussianResource {
            alpha_t: 2.0,
            beta_t: 2.0,
            gamma_t: 1.2,
            correction: 0.0,
            success_probability: 1.0,
            flavor: CorrectionFlavor::Heuristic,
        };
        let rg = regaussify(&plain, Geometry::Symmetric).unwrap();
        assert_eq!((rg.alpha(), rg.beta(), rg.gamma()), (2.0, 2.0, 1.2));
        // symmetric envelope: both geometries coincide
        let rg_a = regaussify(&plain, Geometry::Asymmetric).unwrap();
        assert_eq!(rg, rg_a);
        // correction-free asymmetric envelope cannot be balanced
        let skew = NonGaussianResource {
            alpha_t: 2.5,
            beta_t: 2.0,
            gamma_t: 1.0,
            correction: 0.0,
            success_probability: 1.0,
            flavor: CorrectionFlavor::Probabilistic,
        };
        assert!(matches!(
            regaussify(&skew, Geometry::Asymmetric),
            Err(Error::InvalidResource(_))
        ));
    }

    #[test]
    fn cf_is_normalized_at_origin() {
        let state = tmsv(0.6);
        let chi = nongaussian_cf(&state, 0.95, &Vector4::zeros()).unwrap();
        assert_relative_eq!(chi.re, 1.0, max_relative = 1e-12);
        assert_eq!(chi.im, 0.0);
    }

    #[test]
    fn cf_overlap_quadrature_reproduces_fidelity() {
        // oracle: 2D midpoint quadrature of the coherent-state overlap
        // (1/2pi) int dx dp exp(-(x^2+p^2)/2) chi((x,-p),(x,p))
        let (r, tau) = (0.5, 0.95);
        let state = tmsv(r);
        let res = probabilistic_2ps_standard(&state, tau).unwrap();
        let f_machinery = fid(res.alpha_t(), res.beta_t(), res.gamma_t(), res.correction());
        assert_relative_eq!(f_machinery, 0.821144437, max_relative = 1e-6);

        let n = 160;
        let (lo, hi) = (-8.0, 8.0);
        let h = (hi - lo) / n as f64;
        let mut acc = 0.0;
        for i in 0..n {
            let x = lo + (i as f64 + 0.5) * h;
            for j in 0..n {
                let p = lo + (j as f64 + 0.5) * h;
                let chi = nongaussian_cf(&state, tau, &Vector4::new(x, -p, x, p)).unwrap();
                acc += (-(x * x + p * p) / 2.0).exp() * chi.re;
            }
        }
        let f_quad = acc * h * h / (2.0 * std::f64::consts::PI);
        assert!(
            (f_quad - f_machinery).abs() < 1e-3,
            "expected {f_machinery}, got quadrature {f_quad}"
        );
    }

    #[test]
    fn cf_matches_heuristic_polynomial_at_tau_to_one() {
        // oracle: the bare-annihilation CF polynomial, evaluated with the
        // heuristic kernels on the unmodified covariance
        let state = tmsv(0.8);
        let tau = 1.0 - 1e-8;
        let ws = HeuristicWorkspace::build(&state).unwrap();
        let o1 = SymplecticForm::omega1();
        let o1t = o1.transpose();
        let quad = |m: &Matrix2<f64>, u: &Vector2<f64>, v: &Vector2<f64>| u.dot(&(m * v));
        let oeps = o1 * ws.eps * o1t;
        let osb = o1 * ws.sigma_b * o1t;
        let i2 = Matrix2::identity();
        let heur_cf = |av: &Vector2<f64>, bv: &Vector2<f64>| -> f64 {
            let qf = quad(&(o1 * ws.sigma_a * o1t), av, av)
                + quad(&osb, bv, bv)
                + 2.0 * quad(&oeps, av, bv);
            let f1 = ws.m_b
                + quad(&ws.mat_b, bv, bv)
                + quad(&ws.mat_bc, av, bv)
                + quad(&ws.mat_c, av, av);
            let f2 = ws.m_a
                + quad(&ws.mat_a, av, av)
                + quad(&ws.mat_ac, av, bv)
                + quad(&ws.mat_c, bv, bv);
            let cross = ws.m_c - quad(&(ws.mat_ac * oeps), av, av)
                + 2.0 * quad(&(ws.mat_c * (i2 - osb)), bv, bv)
                + quad(&(ws.mat_ac * (i2 - osb) - 2.0 * oeps * ws.mat_c), av, bv);
            (-qf / 4.0).exp() * (f1 * f2 + cross) / ws.e0
        };
        for &(a1, a2, b1, b2) in &[
            (0.3, 0.1, -0.2, 0.4),
            (0.5, -0.5, 0.5, 0.5),
            (1.0, 0.2, 0.3, -0.7),
            (0.0, 0.9, -0.8, 0.1),
        ] {
            let got = nongaussian_cf(&state, tau, &Vector4::new(a1, a2, b1, b2))
                .unwrap()
                .re;
            let want = heur_cf(&Vector2::new(a1, a2), &Vector2::new(b1, b2));
            assert!(
                (got - want).abs() < 1e-6,
                "expected {want}, got {got} at ({a1}, {a2}, {b1}, {b2})"
            );
        }
    }
}
