//! Reference-scenario verification suite.
//!
//! Runs every headline number of the simulator against its published or
//! independently derived target: maximum entanglement reach for both link
//! layouts, thermal occupations, distillation gains, relay reach extension,
//! satellite thresholds, a battery of oracle equivalences between
//! independent computation routes, state validity across the full distance
//! sweep, and the teleportation-fidelity limits. Each criterion reports a
//! pass/fail flag plus a one-line numeric detail, so a report run shows at
//! a glance which physics moved when something regresses.
//!
//! The default [`AcceptanceParams`] is the baseline operating point all
//! target windows were derived for; the suite can run at other parameters,
//! but windows are then expected to miss.

use crate::channel::{
    asymmetric_state, max_distance, max_reflectivity, ChannelParams, Geometry, SqueezedSource,
};
use crate::distillation::{
    heuristic_2ps_corrections, probabilistic_2ps_standard, regaussify,
    tmsv_ps_success_probability,
};
use crate::gaussian::{bose_einstein_occupation, hyp2f1_diag, StandardTwoModeState};
use crate::satellite::{min_aperture_product, preservation_threshold};
use crate::teleportation::{
    classical_limit_distance, fidelity_2ps_general, fidelity_heuristic_2ps, fidelity_at_distance,
    fidelity_ps_tmsv, gaussian_fidelity, state_at_distance, SweepResource,
};
use crate::Result;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::fmt;

/// Seed for the deterministic random-state battery (criterion 7c).
pub const ORACLE_SEED: u64 = 0xC0FFEE;

/// Operating point the suite evaluates at. Defaults to the baseline
/// open-air scenario: 5 GHz signal at 300 K ambient (1250 thermal
/// photons), 1.44e-6 per-metre attenuation, cryogenic source with r = 1
/// and n = 0.01, subtraction beamsplitter transmissivity 0.95, ideal
/// antenna.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AcceptanceParams {
    /// Atmospheric attenuation coefficient, 1/m.
    pub mu: f64,
    /// Ambient temperature, K.
    pub temperature: f64,
    /// Environment thermal occupation N_th at `temperature`.
    pub n_env: f64,
    /// Source squeezing parameter.
    pub r: f64,
    /// Source thermal occupation.
    pub n: f64,
    /// Photon-subtraction beamsplitter transmissivity.
    pub tau: f64,
    /// Antenna reflectivity.
    pub eta_ant: f64,
    /// Carrier frequency, Hz.
    pub frequency: f64,
}

impl Default for AcceptanceParams {
    fn default() -> Self {
        Self {
            mu: 1.44e-6,
            temperature: 300.0,
            n_env: 1250.0,
            r: 1.0,
            n: 1e-2,
            tau: 0.95,
            eta_ant: 0.0,
            frequency: 5e9,
        }
    }
}

impl AcceptanceParams {
    /// True when every field equals the baseline the target windows were
    /// derived for.
    pub fn is_default_baseline(&self) -> bool {
        *self == Self::default()
    }

    fn source(&self) -> Result<SqueezedSource> {
        SqueezedSource::new(self.r, self.n)
    }

    fn channel(&self) -> Result<ChannelParams> {
        ChannelParams::new(self.mu, self.n_env, self.eta_ant, 0.0)
    }
}

/// One verified criterion: stable id, human label, verdict, and the numbers
/// that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct CriterionOutcome {
    pub id: &'static str,
    pub label: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for CriterionOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {:<3} {} — {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.label,
            self.detail
        )
    }
}

/// Deterministic battery of valid standard-form states: moderately mixed,
/// correlation drawn up to 99% of a loose separability bound, rejection
/// sampled through the validating constructor.
pub fn random_standard_states(seed: u64, count: usize) -> Vec<StandardTwoModeState> {
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

fn outcome(
    id: &'static str,
    label: &'static str,
    result: Result<(bool, String)>,
) -> CriterionOutcome {
    match result {
        Ok((passed, detail)) => CriterionOutcome {
            id,
            label,
            passed,
            detail,
        },
        Err(e) => CriterionOutcome {
            id,
            label,
            passed: false,
            detail: format!("errored: {e}"),
        },
    }
}

fn rel_dev(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

/// Distance at which `nu_of_l` crosses 1 from below, by doubling out a
/// bracket from `hi0` and bisecting.
fn bisect_nu_crossing(nu_of_l: impl Fn(f64) -> Result<f64>, hi0: f64) -> Result<f64> {
    let mut lo = 0.0;
    let mut hi = hi0;
    let mut expansions = 0;
    while nu_of_l(hi)? < 1.0 {
        hi *= 2.0;
        expansions += 1;
        if expansions > 60 {
            return Err(crate::Error::Convergence(
                "entanglement never dies along the scanned distances".into(),
            ));
        }
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if nu_of_l(mid)? < 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn asymmetric_reach(p: &AcceptanceParams) -> Result<(bool, String)> {
    let source = p.source()?;
    let channel = p.channel()?;
    let eta_max = max_reflectivity(&source, p.n_env)?;
    let closed = max_distance(eta_max, p.mu, p.eta_ant)?;
    let bisected = bisect_nu_crossing(
        |l| asymmetric_state(&source, &channel.with_length(l)?)?.nu_minus(),
        1000.0,
    )?;
    let ok = (545.0..=555.0).contains(&closed) && (closed - bisected).abs() < 0.01;
    Ok((
        ok,
        format!("closed {closed:.3} m, bisection {bisected:.3} m, window [545, 555]"),
    ))
}

fn symmetric_reach(p: &AcceptanceParams) -> Result<(bool, String)> {
    let source = p.source()?;
    let channel = p.channel()?;
    let reach = bisect_nu_crossing(
        |l| state_at_distance(SweepResource::TmstSym, &source, &channel, l)?.nu_minus(),
        1000.0,
    )?;
    Ok((
        (470.0..=490.0).contains(&reach),
        format!("bisection {reach:.3} m, window [470, 490]"),
    ))
}

fn thermal_occupations(p: &AcceptanceParams) -> Result<(bool, String)> {
    let ambient = bose_einstein_occupation(p.frequency, p.temperature)?;
    let cosmic = bose_einstein_occupation(p.frequency, 2.7)?;
    let ok = (1249.0..=1251.0).contains(&ambient) && (10.5..=11.5).contains(&cosmic);
    Ok((
        ok,
        format!("{:.1} K -> {ambient:.3}, 2.7 K -> {cosmic:.3}", p.temperature),
    ))
}

fn distillation_gains(p: &AcceptanceParams) -> Result<(bool, String)> {
    let state = asymmetric_state(&p.source()?, &p.channel()?)?;
    let bare = state.negativity()?;
    let heur = regaussify(&heuristic_2ps_corrections(&state)?, Geometry::Symmetric)?
        .negativity()?;
    let prob = regaussify(
        &probabilistic_2ps_standard(&state, p.tau)?,
        Geometry::Symmetric,
    )?
    .negativity()?;
    let heur_gain = 100.0 * (heur / bare - 1.0);
    let prob_gain = 100.0 * (prob / bare - 1.0);
    let ok = (44.0..=48.0).contains(&heur_gain) && (26.0..=30.0).contains(&prob_gain);
    Ok((
        ok,
        format!(
            "heuristic +{heur_gain:.2}% (window [44, 48]), probabilistic +{prob_gain:.2}% (window [26, 30])"
        ),
    ))
}

fn relay_extension(p: &AcceptanceParams) -> Result<(bool, String)> {
    let source = p.source()?;
    let channel = p.channel()?;
    let bare = classical_limit_distance(SweepResource::TmstAsym, &source, &channel, p.tau)?;
    let relay = classical_limit_distance(SweepResource::Es, &source, &channel, p.tau)?;
    let ratio = relay / bare;
    Ok((
        (1.11..=1.17).contains(&ratio),
        format!("bare {bare:.1} m, relay {relay:.1} m, ratio {ratio:.3} in [1.11, 1.17]"),
    ))
}

fn satellite_thresholds(_p: &AcceptanceParams) -> Result<(bool, String)> {
    // fixed inter-satellite scenario: 2.7 K background (~11 photons),
    // r = 1 source, 6 cm carrier, 1 km hop
    let asym = preservation_threshold(Geometry::Asymmetric, 11.0, 1.0)?;
    let sym = preservation_threshold(Geometry::Symmetric, 11.0, 1.0)?;
    let product = min_aperture_product(1000.0, 0.06, 0.038)?;
    let slope_ln = (0.06 / std::f64::consts::PI) * (-0.038_f64.ln()).sqrt();
    let slope_log10 = (0.06 / std::f64::consts::PI) * (-0.038_f64.log10()).sqrt();
    let ln_selected = (slope_ln - 0.035).abs() < (slope_log10 - 0.035).abs();
    let ok = (asym - 0.0833).abs() <= 5e-4
        && (sym - 0.0378).abs() <= 5e-4
        && (product - 34.6).abs() <= 1.0
        && ln_selected;
    Ok((
        ok,
        format!(
            "asym {asym:.4}, sym {sym:.4}, aperture product {product:.2} m^2, log base {}",
            if ln_selected { "ln" } else { "log10" }
        ),
    ))
}

fn oracle_hypergeometric(_p: &AcceptanceParams) -> Result<(bool, String)> {
    let mut worst = 0.0_f64;
    for i in 0..=24 {
        let z = 0.95 * f64::from(i) / 24.0;
        worst = worst.max(rel_dev(hyp2f1_diag(0, z)?, 1.0 / (1.0 - z)));
        worst = worst.max(rel_dev(
            hyp2f1_diag(1, z)?,
            (1.0 + z) / (1.0 - z).powi(3),
        ));
    }
    Ok((
        worst <= 1e-12,
        format!("max series-vs-closed deviation {worst:.2e} (tol 1e-12)"),
    ))
}

fn oracle_success_probability(_p: &AcceptanceParams) -> Result<(bool, String)> {
    let mut worst = 0.0_f64;
    for r in [0.3_f64, 0.7, 1.0, 1.5] {
        for tau in [0.9, 0.95, 0.99] {
            let lambda = f64::tanh(r);
            let state = StandardTwoModeState::new(
                (2.0 * r).cosh(),
                (2.0 * r).cosh(),
                (2.0 * r).sinh(),
            )?;
            let machinery = probabilistic_2ps_standard(&state, tau)?.success_probability();
            let closed = tmsv_ps_success_probability(1, lambda, tau)?;
            worst = worst.max(rel_dev(machinery, closed));
        }
    }
    Ok((
        worst <= 1e-10,
        format!("max machinery-vs-closed deviation {worst:.2e} (tol 1e-10)"),
    ))
}

fn oracle_fidelity_machinery(p: &AcceptanceParams) -> Result<(bool, String)> {
    let mut worst = 0.0_f64;
    for state in random_standard_states(ORACLE_SEED, 100) {
        let closed = fidelity_2ps_general(&state, p.tau)?.fidelity;
        let resource = probabilistic_2ps_standard(&state, p.tau)?;
        let noise =
            0.5 * (resource.alpha_t() + resource.beta_t() - 2.0 * resource.gamma_t());
        let machinery = (1.0 + resource.correction()) / (1.0 + noise);
        worst = worst.max(rel_dev(closed, machinery));
    }
    Ok((
        worst <= 1e-8,
        format!("100 states, max closed-vs-machinery deviation {worst:.2e} (tol 1e-8)"),
    ))
}

fn oracle_heuristic_tmsv(_p: &AcceptanceParams) -> Result<(bool, String)> {
    let mut worst = 0.0_f64;
    for r in [0.2_f64, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0] {
        let state = StandardTwoModeState::new(
            (2.0 * r).cosh(),
            (2.0 * r).cosh(),
            (2.0 * r).sinh(),
        )?;
        let heur = fidelity_heuristic_2ps(&state)?.fidelity;
        let closed = fidelity_ps_tmsv(1, f64::tanh(r))?.fidelity;
        worst = worst.max(rel_dev(heur, closed));
    }
    Ok((
        worst <= 1e-10,
        format!("max heuristic-vs-closed deviation {worst:.2e} (tol 1e-10)"),
    ))
}

fn oracle_tau_limit(p: &AcceptanceParams) -> Result<(bool, String)> {
    let state = asymmetric_state(&p.source()?, &p.channel()?)?;
    let tau = 1.0 - 1e-6;
    let prob = regaussify(&probabilistic_2ps_standard(&state, tau)?, Geometry::Symmetric)?
        .negativity()?;
    let heur = regaussify(&heuristic_2ps_corrections(&state)?, Geometry::Symmetric)?
        .negativity()?;
    let dev = (prob - heur).abs();
    Ok((
        dev <= 1e-4,
        format!("negativity {prob:.6} vs {heur:.6}, |diff| {dev:.2e} (tol 1e-4)"),
    ))
}

fn validity_sweep(p: &AcceptanceParams) -> Result<(bool, String)> {
    let source = p.source()?;
    let channel = p.channel()?;
    let mut min_theta = f64::INFINITY;
    for step in 0..=500 {
        let l = f64::from(step);
        for geometry in [Geometry::Asymmetric, Geometry::Symmetric] {
            let resource = match geometry {
                Geometry::Asymmetric => SweepResource::TmstAsym,
                Geometry::Symmetric => SweepResource::TmstSym,
            };
            let bare = state_at_distance(resource, &source, &channel, l)?;
            let prob = regaussify(&probabilistic_2ps_standard(&bare, p.tau)?, geometry)?;
            let heur = regaussify(&heuristic_2ps_corrections(&bare)?, geometry)?;
            min_theta = min_theta.min(prob.validity_theta());
            min_theta = min_theta.min(heur.validity_theta());
        }
        let swapped = state_at_distance(SweepResource::Es, &source, &channel, l)?;
        min_theta = min_theta.min(swapped.validity_theta());
    }
    Ok((
        min_theta >= -1e-9,
        format!("min validity scalar {min_theta:.3e} over 5 families x 501 distances"),
    ))
}

fn fidelity_limits(_p: &AcceptanceParams) -> Result<(bool, String)> {
    let vacuum = StandardTwoModeState::new(1.0, 1.0, 0.0)?;
    let at_threshold = gaussian_fidelity(&vacuum).fidelity == 0.5;

    let strong = StandardTwoModeState::new(40.0_f64.cosh(), 40.0_f64.cosh(), 40.0_f64.sinh())?;
    let approaches_one = gaussian_fidelity(&strong).fidelity > 1.0 - 1e-8;

    let mut worst = 0.0_f64;
    for i in 0..=30 {
        let r = 0.1 * f64::from(i);
        let state =
            StandardTwoModeState::new((2.0 * r).cosh(), (2.0 * r).cosh(), (2.0 * r).sinh())?;
        worst = worst.max(rel_dev(
            gaussian_fidelity(&state).fidelity,
            (1.0 + f64::tanh(r)) / 2.0,
        ));
    }
    Ok((
        at_threshold && approaches_one && worst <= 1e-12,
        format!(
            "vacuum exactly 1/2: {at_threshold}; strong squeezing -> 1: {approaches_one}; \
             TMSV law max deviation {worst:.2e}"
        ),
    ))
}

fn short_distance_coincidence(p: &AcceptanceParams) -> Result<(bool, String)> {
    let source = p.source()?;
    let channel = p.channel()?;
    let asym =
        fidelity_at_distance(SweepResource::TmstAsym, &source, &channel, p.tau, 1.0)?.fidelity;
    let sym =
        fidelity_at_distance(SweepResource::TmstSym, &source, &channel, p.tau, 1.0)?.fidelity;
    let dev = (asym - sym).abs();
    Ok((
        dev < 1e-6,
        format!("asym {asym:.9}, sym {sym:.9}, |diff| {dev:.2e} at 1 m"),
    ))
}

/// Evaluate every criterion at the given operating point; outcomes come
/// back in report order.
pub fn run_all(params: &AcceptanceParams) -> Vec<CriterionOutcome> {
    vec![
        outcome("1", "maximum asymmetric reach", asymmetric_reach(params)),
        outcome("2", "maximum symmetric reach", symmetric_reach(params)),
        outcome("3", "thermal occupations", thermal_occupations(params)),
        outcome("4", "distillation gains at zero distance", distillation_gains(params)),
        outcome("5", "relay reach extension", relay_extension(params)),
        outcome("6", "satellite preservation thresholds", satellite_thresholds(params)),
        outcome("7a", "hypergeometric series oracle", oracle_hypergeometric(params)),
        outcome("7b", "subtraction success-probability oracle", oracle_success_probability(params)),
        outcome("7c", "subtraction fidelity machinery oracle", oracle_fidelity_machinery(params)),
        outcome("7d", "heuristic fidelity oracle", oracle_heuristic_tmsv(params)),
        outcome("7e", "probabilistic-to-heuristic limit", oracle_tau_limit(params)),
        outcome("8", "resource validity over distance", validity_sweep(params)),
        outcome("9", "teleportation fidelity limits", fidelity_limits(params)),
        outcome("10", "short-distance layout coincidence", short_distance_coincidence(params)),
    ]
}

// ------------------------------------------------------------------- tests
