//! Gaussian two-mode state bookkeeping in the real quadrature basis.
//!
//! Quadratures are ordered (x1, p1, x2, p2) and the vacuum variance is
//! normalized to 1, so a covariance matrix Sigma satisfies the uncertainty
//! principle iff Sigma + i Omega >= 0 with the symplectic form
//! Omega = Omega1 ⊕ Omega1, Omega1 = [[0, 1], [-1, 0]].
//!
//! Entanglement of 1x1-mode bipartitions is decided by the smallest
//! symplectic eigenvalue after partial transposition,
//!
//! ```text
//! nu_minus = sqrt((Delta - sqrt(Delta^2 - 4 det Sigma)) / 2),
//! Delta    = det Sigma_A + det Sigma_B - 2 det eps_AB,
//! ```
//!
//! with nu_minus < 1 iff the state is entangled. The negativity is
//! N = max(0, (1 - nu_minus) / (2 nu_minus)) and the logarithmic negativity
//! E_N = log2(2 N + 1).

use nalgebra::{Matrix2, Matrix4, Vector4};
use num_complex::Complex64;

use crate::{Error, Result};

// ---------------------------------------------------------------- tolerances

/// Relative tolerance for the symmetry check on covariance input.
pub const SYMMETRY_RTOL: f64 = 1e-12;
/// Slack on the physicality check: symplectic eigenvalues may undershoot 1 by
/// this much before the matrix is rejected (absorbs eigensolver noise).
pub const PHYSICALITY_TOL: f64 = 1e-9;
/// Slack on the standard-form validity scalar theta; re-Gaussified states sit
/// close to the boundary, so equality is accepted within this margin.
pub const THETA_TOL: f64 = 1e-9;
/// The diagonal hypergeometric series is restricted to z below this bound;
/// closer to 1 the series needs more than the capped number of terms.
pub const HYP_Z_MAX: f64 = 1.0 - 1e-12;
/// Relative term-size cutoff for the hypergeometric series.
const HYP_RTOL: f64 = 1e-14;
/// Hard cap on hypergeometric series terms before giving up.
const HYP_MAX_TERMS: usize = 1_000_000;

// ------------------------------------------------------------ symplectic form

/// Constant matrices fixing the symplectic convention of the whole crate.
pub struct SymplecticForm;

impl SymplecticForm {
    /// Single-mode symplectic form Omega1 = [[0, 1], [-1, 0]].
    pub fn omega1() -> Matrix2<f64> {
        Matrix2::new(0.0, 1.0, -1.0, 0.0)
    }

    /// Two-mode symplectic form Omega = Omega1 ⊕ Omega1.
    pub fn omega() -> Matrix4<f64> {
        block_diag(Self::omega1(), Self::omega1())
    }

    /// Pauli-Z kernel sigma_Z = diag(1, -1); appears in standard-form
    /// correlation blocks eps_AB = gamma sigma_Z and in partial transposition.
    pub fn sigma_z() -> Matrix2<f64> {
        Matrix2::new(1.0, 0.0, 0.0, -1.0)
    }
}

/// Assemble a 4x4 matrix from 2x2 blocks [[a, c], [c_t, b]].
pub(crate) fn from_blocks(
    a: &Matrix2<f64>,
    c: &Matrix2<f64>,
    c_t: &Matrix2<f64>,
    b: &Matrix2<f64>,
) -> Matrix4<f64> {
    let mut m = Matrix4::zeros();
    m.fixed_view_mut::<2, 2>(0, 0).copy_from(a);
    m.fixed_view_mut::<2, 2>(0, 2).copy_from(c);
    m.fixed_view_mut::<2, 2>(2, 0).copy_from(c_t);
    m.fixed_view_mut::<2, 2>(2, 2).copy_from(b);
    m
}

fn block_diag(a: Matrix2<f64>, b: Matrix2<f64>) -> Matrix4<f64> {
    from_blocks(&a, &Matrix2::zeros(), &Matrix2::zeros(), &b)
}

// ------------------------------------------------------------- standard form

/// Two-mode covariance matrix in standard form:
/// Sigma_A = alpha I, Sigma_B = beta I, eps_AB = gamma sigma_Z.
///
/// Every state produced by the channel, distillation, and swapping modules is
/// of this shape, which makes the entanglement monotones closed-form scalars.
/// Construction validates alpha, beta >= 1 and the validity scalar
/// theta = |sqrt(det Sigma) - 1| - |alpha - beta| >= 0 (within [`THETA_TOL`]).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StandardTwoModeState {
    alpha: f64,
    beta: f64,
    gamma: f64,
}

impl StandardTwoModeState {
    /// Validate and build a standard-form state.
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        if !(alpha.is_finite() && beta.is_finite() && gamma.is_finite()) {
            return Err(Error::NonPhysicalState(format!(
                "non-finite standard-form entries ({alpha}, {beta}, {gamma})"
            )));
        }
        if alpha < 1.0 - THETA_TOL || beta < 1.0 - THETA_TOL {
            return Err(Error::NonPhysicalState(format!(
                "mode variances must be at least the vacuum level: alpha = {alpha}, beta = {beta}"
            )));
        }
        // Any physical state has det Sigma >= 1 (nu_- nu_+ = sqrt(det Sigma),
        // both factors >= 1). The product alpha*beta - gamma^2 cancels badly
        // for strongly squeezed pure states, hence the scale-aware slack.
        let s = alpha * beta - gamma * gamma;
        if s < 1.0 - THETA_TOL * (alpha * beta).max(1.0) {
            return Err(Error::NonPhysicalState(format!(
                "sqrt(det Sigma) = {s:.6} < 1 for (alpha, beta, gamma) = \
                 ({alpha}, {beta}, {gamma})"
            )));
        }
        let theta = validity_theta(alpha, beta, gamma);
        if theta < -THETA_TOL {
            return Err(Error::NonPhysicalState(format!(
                "validity scalar theta = {theta:.3e} < 0 for (alpha, beta, gamma) = \
                 ({alpha}, {beta}, {gamma})"
            )));
        }
        Ok(Self { alpha, beta, gamma })
    }

    /// Build an *effective* standard-form state without the physicality
    /// floor on det Sigma. Re-Gaussified reductions of non-Gaussian
    /// resources are bookkeeping devices — they reproduce the fidelity and
    /// entanglement figures of the underlying state but need not be
    /// preparable covariances, and at strong squeezing their determinant
    /// legitimately drops below 1. Entries must still be finite, the mode
    /// variances positive, and the validity scalar theta nonnegative.
    /// Avoid promoting such a state with [`Self::to_general`]: the 4x4
    /// representation is only meaningful for physical covariances.
    pub fn new_effective(alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        if !(alpha.is_finite() && beta.is_finite() && gamma.is_finite()) {
            return Err(Error::NonPhysicalState(format!(
                "non-finite standard-form entries ({alpha}, {beta}, {gamma})"
            )));
        }
        if alpha <= 0.0 || beta <= 0.0 {
            return Err(Error::NonPhysicalState(format!(
                "effective mode variances must be positive: alpha = {alpha}, beta = {beta}"
            )));
        }
        let theta = validity_theta(alpha, beta, gamma);
        if theta < -THETA_TOL {
            return Err(Error::NonPhysicalState(format!(
                "validity scalar theta = {theta:.3e} < 0 for effective (alpha, beta, gamma) = \
                 ({alpha}, {beta}, {gamma})"
            )));
        }
        Ok(Self { alpha, beta, gamma })
    }

    /// Diagonal entry of the first mode block.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Diagonal entry of the second mode block.
    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Correlation amplitude (coefficient of sigma_Z in eps_AB).
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// det Sigma = (alpha beta - gamma^2)^2.
    pub fn det_sigma(&self) -> f64 {
        let d = self.alpha * self.beta - self.gamma * self.gamma;
        d * d
    }

    /// Partial-transpose seralian Delta = alpha^2 + beta^2 + 2 gamma^2.
    pub fn pt_delta(&self) -> f64 {
        self.alpha * self.alpha + self.beta * self.beta + 2.0 * self.gamma * self.gamma
    }

    /// Smallest symplectic eigenvalue of the partial transpose (closed form).
    pub fn nu_minus(&self) -> Result<f64> {
        pt_nu_minus_from_invariants(self.pt_delta(), self.det_sigma())
    }

    /// Negativity N = max(0, (1 - nu_minus) / (2 nu_minus)).
    pub fn negativity(&self) -> Result<f64> {
        negativity(self.nu_minus()?)
    }

    /// Logarithmic negativity E_N = log2(2 N + 1).
    pub fn log_negativity(&self) -> Result<f64> {
        log_negativity(self.negativity()?)
    }

    /// Validity scalar theta = |sqrt(det Sigma) - 1| - |alpha - beta|.
    pub fn validity_theta(&self) -> f64 {
        validity_theta(self.alpha, self.beta, self.gamma)
    }

    /// True iff nu_minus < 1, i.e. the state is distillable-entangled.
    pub fn is_entangled(&self) -> Result<bool> {
        Ok(self.nu_minus()? < 1.0)
    }

    /// Same state with the mode labels exchanged (alpha and beta swap;
    /// gamma is invariant because sigma_Z is symmetric).
    pub fn swapped_modes(&self) -> Self {
        Self {
            alpha: self.beta,
            beta: self.alpha,
            gamma: self.gamma,
        }
    }

    /// Promote to the full 4x4 representation (zero displacement).
    pub fn to_general(&self) -> GeneralTwoModeCovariance {
        let sz = SymplecticForm::sigma_z();
        let a = Matrix2::identity() * self.alpha;
        let b = Matrix2::identity() * self.beta;
        let c = sz * self.gamma;
        GeneralTwoModeCovariance {
            sigma: from_blocks(&a, &c, &c.transpose(), &b),
            displacement: Vector4::zeros(),
        }
    }
}

/// Validity scalar theta = |sqrt(det Sigma) - 1| - |alpha - beta| for raw
/// standard-form entries (callable before a state is constructed).
///
/// theta >= 0 iff (alpha, beta, gamma) with alpha, beta >= 1 describes a
/// positive matrix obeying the uncertainty principle.
pub fn validity_theta(alpha: f64, beta: f64, gamma: f64) -> f64 {
    let sqrt_det = (alpha * beta - gamma * gamma).abs();
    (sqrt_det - 1.0).abs() - (alpha - beta).abs()
}

// --------------------------------------------------------- general covariance

/// Full two-mode Gaussian state: 4x4 covariance matrix plus displacement.
///
/// Construction enforces symmetry (relative tolerance [`SYMMETRY_RTOL`]) and
/// the uncertainty principle Sigma + i Omega >= 0, checked through the
/// symplectic spectrum (moduli of the eigenvalues of Omega Sigma all at least
/// 1 within [`PHYSICALITY_TOL`]).
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralTwoModeCovariance {
    sigma: Matrix4<f64>,
    displacement: Vector4<f64>,
}

impl GeneralTwoModeCovariance {
    /// Validate and build a general two-mode Gaussian state.
    pub fn new(sigma: Matrix4<f64>, displacement: Vector4<f64>) -> Result<Self> {
        if sigma.iter().any(|x| !x.is_finite()) || displacement.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonPhysicalState(
                "non-finite covariance or displacement entry".into(),
            ));
        }
        for i in 0..4 {
            for j in (i + 1)..4 {
                let (a, b) = (sigma[(i, j)], sigma[(j, i)]);
                let scale = a.abs().max(b.abs()).max(1.0);
                if (a - b).abs() > SYMMETRY_RTOL * scale {
                    return Err(Error::NonPhysicalState(format!(
                        "covariance not symmetric at ({i}, {j}): {a} vs {b}"
                    )));
                }
            }
        }
        let sym = (sigma + sigma.transpose()) * 0.5;
        let nus = symplectic_moduli(&sym);
        if let Some(&nu) = nus
            .iter()
            .find(|&&nu| nu < 1.0 - PHYSICALITY_TOL)
        {
            return Err(Error::NonPhysicalState(format!(
                "uncertainty principle violated: symplectic eigenvalue {nu} < 1"
            )));
        }
        Ok(Self {
            sigma: sym,
            displacement,
        })
    }

    /// Lossless conversion from a validated standard-form state.
    pub fn from_standard(state: &StandardTwoModeState) -> Self {
        state.to_general()
    }

    /// Replace the displacement vector (covariance checks already done).
    pub fn with_displacement(mut self, displacement: Vector4<f64>) -> Self {
        self.displacement = displacement;
        self
    }

    /// The 4x4 covariance matrix.
    pub fn sigma(&self) -> &Matrix4<f64> {
        &self.sigma
    }

    /// The displacement (first-moment) vector.
    pub fn displacement(&self) -> &Vector4<f64> {
        &self.displacement
    }

    /// Mode-A 2x2 block.
    pub fn block_a(&self) -> Matrix2<f64> {
        self.sigma.fixed_view::<2, 2>(0, 0).into()
    }

    /// Mode-B 2x2 block.
    pub fn block_b(&self) -> Matrix2<f64> {
        self.sigma.fixed_view::<2, 2>(2, 2).into()
    }

    /// Cross-correlation 2x2 block eps_AB.
    pub fn block_c(&self) -> Matrix2<f64> {
        self.sigma.fixed_view::<2, 2>(0, 2).into()
    }

    /// True iff the displacement vector is exactly zero.
    pub fn is_centered(&self) -> bool {
        self.displacement.iter().all(|&x| x == 0.0)
    }
}

/// Moduli of the eigenvalues of Omega Sigma; for a symmetric positive Sigma
/// these come in equal pairs, the symplectic eigenvalues.
fn symplectic_moduli(sigma: &Matrix4<f64>) -> [f64; 4] {
    let m = SymplecticForm::omega() * sigma;
    let eig = m.complex_eigenvalues();
    let mut nus = [0.0; 4];
    for (slot, ev) in nus.iter_mut().zip(eig.iter()) {
        *slot = ev.norm();
    }
    nus
}

// ------------------------------------------------- PT symplectic eigenvalues

fn pt_nu_minus_from_invariants(delta: f64, det_sigma: f64) -> Result<f64> {
    let disc = delta * delta - 4.0 * det_sigma;
    if disc < -PHYSICALITY_TOL * delta * delta {
        return Err(Error::NonPhysicalState(format!(
            "partial-transpose discriminant negative: Delta^2 = {:.6e} < 4 det Sigma = {:.6e}",
            delta * delta,
            4.0 * det_sigma
        )));
    }
    // (Delta - sqrt(disc)) / 2 loses precision once Delta >> 1; multiply by
    // the conjugate instead: nu^2 = 2 det Sigma / (Delta + sqrt(disc)).
    let denom = delta + disc.max(0.0).sqrt();
    if denom <= 0.0 {
        return Err(Error::NonPhysicalState(format!(
            "degenerate partial-transpose invariants: Delta = {delta:.6e}"
        )));
    }
    let inner = 2.0 * det_sigma / denom;
    if inner < 0.0 {
        if inner < -PHYSICALITY_TOL {
            return Err(Error::NonPhysicalState(format!(
                "negative squared symplectic eigenvalue {inner:.6e}"
            )));
        }
        return Ok(0.0);
    }
    Ok(inner.sqrt())
}

/// Smallest symplectic eigenvalue of the partially transposed covariance,
/// from the closed form on block determinants:
/// Delta = det Sigma_A + det Sigma_B - 2 det eps_AB,
/// nu_minus = sqrt((Delta - sqrt(Delta^2 - 4 det Sigma)) / 2).
pub fn pt_symplectic_eigenvalue_minus(cov: &GeneralTwoModeCovariance) -> Result<f64> {
    let det_a = cov.block_a().determinant();
    let det_b = cov.block_b().determinant();
    let det_c = cov.block_c().determinant();
    let delta = det_a + det_b - 2.0 * det_c;
    pt_nu_minus_from_invariants(delta, cov.sigma.determinant())
}

/// Both partial-transpose symplectic eigenvalues (nu_minus, nu_plus) by the
/// independent numerical route: moduli of the eigenvalues of
/// Omega Lambda Sigma Lambda with Lambda = diag(1, 1, 1, -1).
///
/// Slower than [`pt_symplectic_eigenvalue_minus`] and redundant with it; kept
/// public as a diagnostic cross-check for tests and debugging.
pub fn pt_symplectic_eigenvalues_numeric(cov: &GeneralTwoModeCovariance) -> Result<[f64; 2]> {
    let lambda = Matrix4::from_diagonal(&Vector4::new(1.0, 1.0, 1.0, -1.0));
    let pt = lambda * cov.sigma * lambda;
    let mut nus = symplectic_moduli(&pt);
    nus.sort_by(|a, b| a.total_cmp(b));
    // eigenvalues come in +/- pairs of equal modulus; average each pair
    let nu_minus = 0.5 * (nus[0] + nus[1]);
    let nu_plus = 0.5 * (nus[2] + nus[3]);
    if !nu_minus.is_finite() || !nu_plus.is_finite() {
        return Err(Error::NonPhysicalState(
            "non-finite partial-transpose spectrum".into(),
        ));
    }
    Ok([nu_minus, nu_plus])
}

/// Negativity N = max(0, (1 - nu_minus) / (2 nu_minus)).
pub fn negativity(nu_minus: f64) -> Result<f64> {
    if !(nu_minus > 0.0) {
        return Err(Error::Domain(format!(
            "negativity needs nu_minus > 0, got {nu_minus}"
        )));
    }
    Ok(((1.0 - nu_minus) / (2.0 * nu_minus)).max(0.0))
}

/// Logarithmic negativity E_N = log2(2 N + 1).
pub fn log_negativity(negativity: f64) -> Result<f64> {
    if !(negativity >= 0.0) {
        return Err(Error::Domain(format!(
            "log-negativity needs N >= 0, got {negativity}"
        )));
    }
    Ok((2.0 * negativity + 1.0).log2())
}

// ---------------------------------------------------- characteristic function

/// Gaussian characteristic function at a real phase-space point r:
/// chi(r) = exp(-1/4 r Omega Sigma Omega^T r^T) * exp(-i r Omega d^T).
pub fn gaussian_cf(cov: &GeneralTwoModeCovariance, point: &Vector4<f64>) -> Complex64 {
    let omega = SymplecticForm::omega();
    let or = omega.transpose() * point; // (r Omega)^T = Omega^T r
    let quad = (or.transpose() * cov.sigma * or)[(0, 0)];
    let phase = -(or.dot(&cov.displacement));
    (Complex64::new(0.0, phase)).exp() * (-0.25 * quad).exp()
}

// -------------------------------------------------------- special functions

/// Diagonal Gauss hypergeometric value 2F1(k+1, k+1; 1; z) by direct series,
/// sum_n [C(n + k, k)]^2 z^n, with the term-ratio recurrence
/// t_{n+1} = t_n * z * ((n + k + 1) / (n + 1))^2.
///
/// Valid for 0 <= z < 1; terms are summed until the running term drops below
/// 1e-14 of the partial sum.
pub fn hyp2f1_diag(k: u32, z: f64) -> Result<f64> {
    if !z.is_finite() || !(0.0..HYP_Z_MAX).contains(&z) {
        return Err(Error::Domain(format!(
            "hypergeometric argument z = {z} outside [0, 1)"
        )));
    }
    let mut term = 1.0_f64;
    let mut sum = 1.0_f64;
    for n in 0..HYP_MAX_TERMS {
        let ratio = (n as f64 + k as f64 + 1.0) / (n as f64 + 1.0);
        term *= z * ratio * ratio;
        sum += term;
        if term < HYP_RTOL * sum {
            return Ok(sum);
        }
    }
    Err(Error::Convergence(format!(
        "hypergeometric series did not settle after {HYP_MAX_TERMS} terms at z = {z}"
    )))
}

/// Bose-Einstein occupation n = 1 / (exp(h f / k_B T) - 1); zero at T = 0.
pub fn bose_einstein_occupation(frequency_hz: f64, temperature_k: f64) -> Result<f64> {
    if !(frequency_hz > 0.0) {
        return Err(Error::Domain(format!(
            "frequency must be positive, got {frequency_hz}"
        )));
    }
    if !(temperature_k >= 0.0) {
        return Err(Error::Domain(format!(
            "temperature must be nonnegative, got {temperature_k}"
        )));
    }
    if temperature_k == 0.0 {
        return Ok(0.0);
    }
    let x = crate::constants::PLANCK * frequency_hz / (crate::constants::BOLTZMANN * temperature_k);
    Ok(1.0 / x.exp_m1())
}

// ------------------------------------------------------------------- tests

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn tmst(r: f64, n: f64) -> StandardTwoModeState {
        let scale = 1.0 + 2.0 * n;
        StandardTwoModeState::new(
            scale * (2.0 * r).cosh(),
            scale * (2.0 * r).cosh(),
            scale * (2.0 * r).sinh(),
        )
        .expect("TMST is physical")
    }

    #[test]
    fn vacuum_has_unit_pt_eigenvalue_and_no_negativity() {
        let vac = StandardTwoModeState::new(1.0, 1.0, 0.0).unwrap();
        assert_relative_eq!(vac.nu_minus().unwrap(), 1.0, epsilon = 1e-14);
        assert_eq!(vac.negativity().unwrap(), 0.0);
        assert_eq!(vac.log_negativity().unwrap(), 0.0);
    }

    #[test]
    fn pure_tmsv_pt_eigenvalue_is_exp_minus_2r() {
        let s = tmst(1.0, 0.0);
        let nu = s.nu_minus().unwrap();
        assert_relative_eq!(nu, (-2.0_f64).exp(), epsilon = 1e-12);
    }

    #[test]
    fn thermal_tmst_pt_eigenvalue() {
        // r = 1, n = 0.01: nu = 1.02 e^-2 = 0.1380420...
        let s = tmst(1.0, 0.01);
        assert_relative_eq!(s.nu_minus().unwrap(), 1.02 * (-2.0_f64).exp(), epsilon = 1e-12);
    }

    #[test]
    fn closed_form_matches_eigen_route() {
        // oracle: moduli of eig(Omega Lambda Sigma Lambda) with a plain solver
        let cases = [
            tmst(0.3, 0.0),
            tmst(1.0, 0.01),
            tmst(2.0, 0.3),
            StandardTwoModeState::new(3.0, 1.7, 1.2).unwrap(),
        ];
        for s in cases {
            let cov = s.to_general();
            let closed = pt_symplectic_eigenvalue_minus(&cov).unwrap();
            let [numeric, _] = pt_symplectic_eigenvalues_numeric(&cov).unwrap();
            assert!(
                (closed - numeric).abs() < 1e-9,
                "expected eigen route {numeric}, got closed form {closed}"
            );
            assert_relative_eq!(closed, s.nu_minus().unwrap(), epsilon = 1e-12);
        }
    }

    #[test]
    fn negativity_sign_tracks_entanglement() {
        assert!(negativity(0.5).unwrap() > 0.0);
        assert_eq!(negativity(1.0).unwrap(), 0.0);
        assert_eq!(negativity(1.7).unwrap(), 0.0);
        assert!(matches!(negativity(0.0), Err(Error::Domain(_))));
        assert!(matches!(negativity(-0.2), Err(Error::Domain(_))));
        assert!(matches!(log_negativity(-1e-3), Err(Error::Domain(_))));
    }

    #[test]
    fn theta_examples() {
        // TMST r = 1, n = 0.01: sqrt(det) = 1.02^2, alpha = beta
        let s = tmst(1.0, 0.01);
        assert_relative_eq!(s.validity_theta(), 1.02_f64 * 1.02 - 1.0, epsilon = 1e-12);
        // vacuum sits exactly on the boundary
        assert_eq!(validity_theta(1.0, 1.0, 0.0), 0.0);
    }

    #[test]
    fn rejects_sub_vacuum_and_overcorrelated_states() {
        assert!(matches!(
            StandardTwoModeState::new(0.8, 1.0, 0.0),
            Err(Error::NonPhysicalState(_))
        ));
        // gamma too large for these variances: det Sigma drops below 1
        assert!(matches!(
            StandardTwoModeState::new(1.2, 1.2, 1.1),
            Err(Error::NonPhysicalState(_))
        ));
    }

    #[test]
    fn effective_constructor_relaxes_only_the_determinant_floor() {
        // balanced scalars with alpha*beta - gamma^2 < 1: rejected as a
        // physical state, accepted as an effective one (theta = |s-1| >= 0)
        assert!(StandardTwoModeState::new(3.671, 3.671, 3.572).is_err());
        let eff = StandardTwoModeState::new_effective(3.671, 3.671, 3.572).unwrap();
        assert!(eff.validity_theta() >= 0.0);
        assert!(eff.nu_minus().unwrap() < 1.0);
        // a genuinely invalid set of scalars still fails both ways
        assert!(StandardTwoModeState::new_effective(1.5, 1.0, 0.9).is_err());
        assert!(StandardTwoModeState::new_effective(-1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn general_covariance_validation() {
        let s = tmst(1.0, 0.0).to_general();
        assert!(GeneralTwoModeCovariance::new(*s.sigma(), Vector4::zeros()).is_ok());

        let mut asym = *s.sigma();
        asym[(0, 1)] = 0.5; // break symmetry
        assert!(matches!(
            GeneralTwoModeCovariance::new(asym, Vector4::zeros()),
            Err(Error::NonPhysicalState(_))
        ));

        let squeezed_too_far = Matrix4::from_diagonal(&Vector4::new(0.5, 0.5, 1.0, 1.0));
        assert!(matches!(
            GeneralTwoModeCovariance::new(squeezed_too_far, Vector4::zeros()),
            Err(Error::NonPhysicalState(_))
        ));
    }

    #[test]
    fn displaced_vacuum_cf() {
        let vac = StandardTwoModeState::new(1.0, 1.0, 0.0).unwrap();
        let (x0, p0) = (0.7, -0.4);
        let cov = vac.to_general().with_displacement(Vector4::new(x0, p0, 0.0, 0.0));
        let (x, p) = (0.9, 0.3);
        let got = gaussian_cf(&cov, &Vector4::new(x, p, 0.0, 0.0));
        let want = Complex64::new(0.0, -(x * p0 - p * x0)).exp()
            * (-(x * x + p * p) / 4.0).exp();
        assert!(
            (got - want).norm() < 1e-14,
            "expected {want}, got {got}"
        );
    }

    #[test]
    fn cf_is_one_at_origin_and_bounded() {
        let s = tmst(1.3, 0.05).to_general();
        assert_relative_eq!(
            gaussian_cf(&s, &Vector4::zeros()).re,
            1.0,
            epsilon = 1e-15
        );
        for &(x1, p1, x2, p2) in &[(0.5, 0.1, -0.3, 0.2), (2.0, -1.0, 1.0, 1.5)] {
            let v = gaussian_cf(&s, &Vector4::new(x1, p1, x2, p2)).norm();
            assert!(v <= 1.0 + 1e-12, "|chi| = {v} exceeds 1");
        }
    }

    #[test]
    fn hypergeometric_series_matches_closed_forms() {
        // oracle first: k = 0, 1, 2 have elementary closed forms
        for i in 0..=9 {
            let z = 0.1 * i as f64;
            let f0 = hyp2f1_diag(0, z).unwrap();
            assert_relative_eq!(f0, 1.0 / (1.0 - z), max_relative = 1e-12);
            let f1 = hyp2f1_diag(1, z).unwrap();
            assert_relative_eq!(f1, (1.0 + z) / (1.0 - z).powi(3), max_relative = 1e-12);
            let f2 = hyp2f1_diag(2, z).unwrap();
            assert_relative_eq!(
                f2,
                (1.0 + 4.0 * z + z * z) / (1.0 - z).powi(5),
                max_relative = 1e-12
            );
        }
        assert_eq!(hyp2f1_diag(3, 0.0).unwrap(), 1.0);
        assert!(matches!(hyp2f1_diag(1, 1.0), Err(Error::Domain(_))));
        assert!(matches!(hyp2f1_diag(1, -0.1), Err(Error::Domain(_))));
    }

    #[test]
    fn bose_einstein_reference_points() {
        let n300 = bose_einstein_occupation(5e9, 300.0).unwrap();
        assert!(
            (n300 - 1249.697).abs() < 0.01,
            "expected ~1249.697 at 5 GHz / 300 K, got {n300}"
        );
        let n27 = bose_einstein_occupation(5e9, 2.7).unwrap();
        assert!(
            (n27 - 10.759).abs() < 0.01,
            "expected ~10.759 at 5 GHz / 2.7 K, got {n27}"
        );
        assert_eq!(bose_einstein_occupation(5e9, 0.0).unwrap(), 0.0);
        assert!(matches!(
            bose_einstein_occupation(0.0, 300.0),
            Err(Error::Domain(_))
        ));
    }
}
