//! Builders for the summary-figure CSV exports.
//!
//! Each figure is a deterministic function of the scenario configuration
//! (and nothing else — no RNG, no wall clock), emitted as commented CSV
//! sections via [`crate::output`]. Multi-panel figures become one file with
//! a `#`-commented section per panel.

use crate::config::ScenarioConfig;
use crate::output::{fmt_float, parallel_rows, Section};
use cvml_core::channel::Geometry;
use cvml_core::constants::SPEED_OF_LIGHT;
use cvml_core::distillation::{
    heuristic_2ps_corrections, probabilistic_2ps_standard, regaussify, tmsv_ps_negativity,
    tmsv_ps_success_probability,
};
use cvml_core::gaussian::bose_einstein_occupation;
use cvml_core::satellite::{
    diffraction_transmissivity, preservation_threshold, region_classify, LinkBudget,
};
use cvml_core::teleportation::{
    fidelity_2ps_general, fidelity_at_distance, fidelity_heuristic_2ps, fidelity_ps_tmsv,
    fidelity_tmst, state_at_distance, SweepResource,
};
use cvml_core::Result;

/// Figure identifiers the `fig` command accepts.
pub const FIGURE_IDS: [u8; 7] = [6, 8, 9, 10, 11, 12, 13];

/// Cosmic microwave background temperature, K (sets the thermal occupation
/// of the inter-satellite environment in the region chart).
pub const CMB_TEMPERATURE_K: f64 = 2.7;

/// Build the header comments and data sections for figure `id`.
pub fn build_figure(id: u8, config: &ScenarioConfig) -> Result<(Vec<String>, Vec<Section>)> {
    match id {
        6 => fig6(config),
        8 => fig8(config),
        9 => fig9(config),
        10 => fig10(config),
        11 => fig11(config),
        12 => fig12(),
        13 => fig13(config),
        other => Err(cvml_core::Error::Domain(format!(
            "no figure {other}; available ids: 6, 8, 9, 10, 11, 12, 13"
        ))),
    }
}

/// Squeezing grid r = 0.00, 0.01, ..., 3.00 shared by figures 6 and 8.
const R_STEPS: usize = 301;

fn r_at(i: usize) -> f64 {
    i as f64 / 100.0
}

/// Distance grid in metres with 1 m spacing.
fn length_at(i: usize) -> f64 {
    i as f64
}

/// Negativity gained by k-per-mode photon subtraction on a TMSV, with the
/// per-click success probabilities. "heur" columns subtract ideally
/// (effective amplitude lambda), "prob" columns through beamsplitter taps
/// (effective amplitude tau * lambda).
fn fig6(config: &ScenarioConfig) -> Result<(Vec<String>, Vec<Section>)> {
    let tau = config.tau;
    let rows: Result<Vec<Vec<String>>> = parallel_rows(R_STEPS, |i| {
        let r = r_at(i);
        let lambda = r.tanh();
        let bare = tmsv_ps_negativity(0, lambda)?;
        let heur2 = tmsv_ps_negativity(1, lambda)? - bare;
        let heur4 = tmsv_ps_negativity(2, lambda)? - bare;
        let prob2 = tmsv_ps_negativity(1, tau * lambda)? - bare;
        let prob4 = tmsv_ps_negativity(2, tau * lambda)? - bare;
        let p2 = tmsv_ps_success_probability(1, lambda, tau)?;
        let p4 = tmsv_ps_success_probability(2, lambda, tau)?;
        Ok([r, heur2, heur4, prob2, prob4, p2, p4]
            .iter()
            .map(|&x| fmt_float(x))
            .collect())
    })
    .into_iter()
    .collect();
    let header = vec![
        "cvml fig 6: negativity gain from photon subtraction on a TMSV".into(),
        format!("grid: r in [0, 3] step 0.01; tau = {tau}"),
        "dN columns are N(subtracted) - N(TMSV); P columns are click probabilities".into(),
    ];
    let section = Section {
        comments: vec![],
        columns: vec![
            "r",
            "dN_2ps_heur",
            "dN_4ps_heur",
            "dN_2ps_prob",
            "dN_4ps_prob",
            "P2",
            "P4",
        ],
        rows: rows?,
    };
    Ok((header, vec![section]))
}

/// Average-fidelity gain of photon-subtracted TMSV resources over the bare
/// TMSV, against squeezing. Same amplitude conventions as figure 6; the
/// bare baseline (1 + lambda)/2 is included for reference.
fn fig8(config: &ScenarioConfig) -> Result<(Vec<String>, Vec<Section>)> {
    let tau = config.tau;
    let rows: Result<Vec<Vec<String>>> = parallel_rows(R_STEPS, |i| {
        let r = r_at(i);
        let lambda = r.tanh();
        let bare = 0.5 * (1.0 + lambda);
        let heur2 = fidelity_ps_tmsv(1, lambda)?.fidelity - bare;
        let heur4 = fidelity_ps_tmsv(2, lambda)?.fidelity - bare;
        let prob2 = fidelity_ps_tmsv(1, tau * lambda)?.fidelity - bare;
        let prob4 = fidelity_ps_tmsv(2, tau * lambda)?.fidelity - bare;
        Ok([r, heur2, heur4, prob2, prob4, bare]
            .iter()
            .map(|&x| fmt_float(x))
            .collect())
    })
    .into_iter()
    .collect();
    let header = vec![
        "cvml fig 8: fidelity gain from photon subtraction on a TMSV".into(),
        format!("grid: r in [0, 3] step 0.01; tau = {tau}"),
        "dF columns are F(subtracted) - F(TMSV); F_tmsv = (1 + lambda)/2".into(),
    ];
    let section = Section {
        comments: vec![],
        columns: vec![
            "r",
            "dF_2ps_heur",
            "dF_4ps_heur",
            "dF_2ps_prob",
            "dF_4ps_prob",
            "F_tmsv",
        ],
        rows: rows?,
    };
    Ok((header, vec![section]))
}

/// Fidelity advantage over the bare lossy link against party separation:
/// two-photon subtraction in both geometries (heuristic and probabilistic)
/// and the entanglement-swapping relay. Each dF column subtracts the bare
/// baseline of its own geometry; the relay, like the bare asymmetric link,
/// spans the full separation, so it is compared against the asymmetric
/// baseline. Both baselines are included as absolute columns.
fn fig9(config: &ScenarioConfig) -> Result<(Vec<String>, Vec<Section>)> {
    let source = config.source().map_err(to_core)?;
    let channel = config.channel().map_err(to_core)?;
    let tau = config.tau;
    let count = 601; // L = 0..=600 m
    let rows: Result<Vec<Vec<String>>> = parallel_rows(count, |i| {
        let length = length_at(i);
        let fid = |resource| {
            Ok::<f64, cvml_core::Error>(
                fidelity_at_distance(resource, &source, &channel, tau, length)?.fidelity,
            )
        };
        let bare_asym = fid(SweepResource::TmstAsym)?;
        let bare_sym = fid(SweepResource::TmstSym)?;
        let row = [
            length,
            fid(SweepResource::Ps2HeurAsym)? - bare_asym,
            fid(SweepResource::Ps2ProbAsym)? - bare_asym,
            fid(SweepResource::Ps2HeurSym)? - bare_sym,
            fid(SweepResource::Ps2ProbSym)? - bare_sym,
            fid(SweepResource::Es)? - bare_asym,
            bare_asym,
            bare_sym,
        ];
        Ok(row.iter().map(|&x| fmt_float(x)).collect())
    })
    .into_iter()
    .collect();
    let header = vec![
        "cvml fig 9: fidelity advantage over the bare link vs distance".into(),
        format!("grid: L in [0, 600] m step 1; scenario: {}", config.describe()),
        "dF columns subtract the bare baseline of the same geometry (relay: asymmetric)".into(),
    ];
    let section = Section {
        comments: vec![],
        columns: vec![
            "L_m",
            "dF_2ps_heur_asym",
            "dF_2ps_prob_asym",
            "dF_2ps_heur_sym",
            "dF_2ps_prob_sym",
            "dF_es",
            "F_tmst_asym",
            "F_tmst_sym",
        ],
        rows: rows?,
    };
    Ok((header, vec![section]))
}

/// Four-panel overview of the lossy link and probabilistic subtraction:
/// (a) bare fidelity vs distance, (b) bare log-negativity vs distance,
/// (c) subtraction success probability against the weighted fidelity gain,
/// (d) efficiency P * dF of the subtraction against tap transmissivity.
fn fig10(config: &ScenarioConfig) -> Result<(Vec<String>, Vec<Section>)> {
    let source = config.source().map_err(to_core)?;
    let channel = config.channel().map_err(to_core)?;
    let tau = config.tau;
    let count = 601;

    let rows_ab: Result<Vec<(Vec<String>, Vec<String>, Vec<String>)>> =
        parallel_rows(count, |i| {
            let length = length_at(i);
            let asym = state_at_distance(SweepResource::TmstAsym, &source, &channel, length)?;
            let sym = state_at_distance(SweepResource::TmstSym, &source, &channel, length)?;
            let f_asym = fidelity_at_distance(
                SweepResource::TmstAsym,
                &source,
                &channel,
                tau,
                length,
            )?
            .fidelity;
            let f_sym =
                fidelity_at_distance(SweepResource::TmstSym, &source, &channel, tau, length)?
                    .fidelity;
            let row_a = [length, f_asym, f_sym];
            let row_b = [length, asym.log_negativity()?, sym.log_negativity()?];
            // panel (c): success probability against the weighted gain
            // (F_2ps - F_bare) / (1 - F_bare), parametrized by distance
            let gain = |resource: SweepResource, bare: f64| {
                Ok::<f64, cvml_core::Error>(
                    (fidelity_at_distance(resource, &source, &channel, tau, length)?.fidelity
                        - bare)
                        / (1.0 - bare),
                )
            };
            let p_of = |state: &cvml_core::gaussian::StandardTwoModeState| {
                Ok::<f64, cvml_core::Error>(
                    probabilistic_2ps_standard(state, tau)?.success_probability(),
                )
            };
            let row_c = [
                length,
                gain(SweepResource::Ps2ProbAsym, f_asym)?,
                p_of(&asym)?,
                gain(SweepResource::Ps2ProbSym, f_sym)?,
                p_of(&sym)?,
            ];
            let fmt = |xs: &[f64]| xs.iter().map(|&x| fmt_float(x)).collect::<Vec<_>>();
            Ok((fmt(&row_a), fmt(&row_b), fmt(&row_c)))
        })
        .into_iter()
        .collect();
    let rows_ab = rows_ab?;
    let (rows_a, rest): (Vec<_>, Vec<_>) = rows_ab.into_iter().map(|(a, b, c)| (a, (b, c))).unzip();
    let (rows_b, rows_c): (Vec<_>, Vec<_>) = rest.into_iter().unzip();

    // panel (d): tau sweep at zero distance, where both geometries coincide
    let state0 = source.to_state()?;
    let bare0 = fidelity_tmst(&state0).fidelity;
    let tau_count = 201; // tau = 0.9000, 0.9005, ..., 1.0000
    let rows_d: Result<Vec<Vec<String>>> = parallel_rows(tau_count, |i| {
        let tau_i = (9000 + 5 * i) as f64 / 10000.0;
        let (p, df) = if tau_i >= 1.0 {
            // the tap click probability vanishes as tau -> 1; the fidelity
            // gain limits to the ideal (heuristic) subtraction
            (0.0, fidelity_heuristic_2ps(&state0)?.fidelity - bare0)
        } else {
            let resource = probabilistic_2ps_standard(&state0, tau_i)?;
            let df = fidelity_2ps_general(&state0, tau_i)?.fidelity - bare0;
            (resource.success_probability(), df)
        };
        let row = [tau_i, p, df, p * df];
        Ok(row.iter().map(|&x| fmt_float(x)).collect())
    })
    .into_iter()
    .collect();

    let header = vec![
        "cvml fig 10: lossy-link fidelity, entanglement, and subtraction trade-offs".into(),
        format!("scenario: {}", config.describe()),
    ];
    let sections = vec![
        Section {
            comments: vec!["panel a: bare average fidelity vs distance (L in [0, 600] m)".into()],
            columns: vec!["L_m", "F_tmst_asym", "F_tmst_sym"],
            rows: rows_a,
        },
        Section {
            comments: vec!["panel b: bare log-negativity vs distance".into()],
            columns: vec!["L_m", "EN_asym", "EN_sym"],
            rows: rows_b,
        },
        Section {
            comments: vec![
                "panel c: 2PS success probability against weighted gain".into(),
                format!("(F_2ps - F_bare)/(1 - F_bare), parametrized by L; tau = {tau}"),
            ],
            columns: vec!["L_m", "gain_w_asym", "P2_asym", "gain_w_sym", "P2_sym"],
            rows: rows_c,
        },
        Section {
            comments: vec![
                "panel d: subtraction efficiency P2 * dF at L = 0 vs tap transmissivity".into(),
            ],
            columns: vec!["tau", "P2", "dF_2ps", "efficiency"],
            rows: rows_d?,
        },
    ];
    Ok((header, sections))
}

/// Log-negativity change caused by re-Gaussifying the two-photon-subtracted
/// state, relative to the bare lossy link, in both geometries.
fn fig11(config: &ScenarioConfig) -> Result<(Vec<String>, Vec<Section>)> {
    let source = config.source().map_err(to_core)?;
    let channel = config.channel().map_err(to_core)?;
    let tau = config.tau;
    let count = 501; // L = 0..=500 m
    let panel = |geometry: Geometry| -> Result<Vec<Vec<String>>> {
        let resource = match geometry {
            Geometry::Symmetric => SweepResource::TmstSym,
            Geometry::Asymmetric => SweepResource::TmstAsym,
        };
        parallel_rows(count, |i| {
            let length = length_at(i);
            let bare = state_at_distance(resource, &source, &channel, length)?;
            let bare_en = bare.log_negativity()?;
            let heur = regaussify(&heuristic_2ps_corrections(&bare)?, geometry)?
                .log_negativity()?;
            let prob = regaussify(&probabilistic_2ps_standard(&bare, tau)?, geometry)?
                .log_negativity()?;
            let row = [length, heur - bare_en, prob - bare_en, bare_en];
            Ok(row.iter().map(|&x| fmt_float(x)).collect())
        })
        .into_iter()
        .collect()
    };
    let header = vec![
        "cvml fig 11: log-negativity change of the re-Gaussified 2PS state".into(),
        format!(
            "grid: L in [0, 500] m step 1; scenario: {}",
            config.describe()
        ),
        "dEN columns are EN(re-Gaussified) - EN(bare)".into(),
    ];
    let columns = vec!["L_m", "dEN_2ps_heur", "dEN_2ps_prob", "EN_bare"];
    let sections = vec![
        Section {
            comments: vec!["panel a: symmetric geometry".into()],
            columns: columns.clone(),
            rows: panel(Geometry::Symmetric)?,
        },
        Section {
            comments: vec!["panel b: asymmetric geometry".into()],
            columns,
            rows: panel(Geometry::Asymmetric)?,
        },
    ];
    Ok((header, sections))
}

/// Diffraction transmissivity and free-space region charts over initial
/// spot size and travelled distance. Chart conventions: a flat emitted beam
/// (R0 = d), a receiver matched to the emitter (a_R = 2 w0), and a 6 cm
/// carrier against the cosmic microwave background.
fn fig12() -> Result<(Vec<String>, Vec<Section>)> {
    let wavelength = 0.06;
    let sections = satellite_grid_sections(wavelength, CMB_TEMPERATURE_K)?;
    let header = vec![
        "cvml fig 12: diffraction losses and free-space regions".into(),
        format!(
            "grid: w0 in [0.1, 10] m (61 log steps) x d in [1e2, 1e6] m (81 log steps); \
             lambda = {wavelength} m, R0 = d, a_R = 2 w0"
        ),
        "independent of the scenario file".into(),
    ];
    Ok((header, sections))
}

/// The two chart sections shared by `fig 12` and `satellite --out`: the
/// diffraction transmissivity and the region map with its
/// entanglement-preservation flag over the (w0, d) grid.
pub fn satellite_grid_sections(
    wavelength: f64,
    background_temperature: f64,
) -> Result<Vec<Section>> {
    let n_env = bose_einstein_occupation(SPEED_OF_LIGHT / wavelength, background_temperature)?;
    let eta_max = preservation_threshold(Geometry::Asymmetric, n_env, 1.0)?;
    let w0_count = 61; // 0.1 -> 10 m, 30 points per decade
    let d_count = 81; // 1e2 -> 1e6 m, 20 points per decade
    let count = w0_count * d_count;
    let rows: Result<Vec<(Vec<String>, Vec<String>)>> = parallel_rows(count, |idx| {
        let i = idx / d_count;
        let j = idx % d_count;
        let w0 = 10.0_f64.powf(-1.0 + i as f64 / 30.0);
        let d = 10.0_f64.powf(2.0 + j as f64 / 20.0);
        // aperture diameter and efficiency are irrelevant to diffraction
        // and region classification; any valid values do
        let budget = LinkBudget::new(wavelength, d, 1.0, 1.0, w0, d, 2.0 * w0)?;
        let tau_diff = diffraction_transmissivity(&budget);
        let preserved = 1.0 - tau_diff < eta_max;
        let fmt3 = vec![fmt_float(w0), fmt_float(d), fmt_float(tau_diff)];
        let region_row = vec![
            fmt_float(w0),
            fmt_float(d),
            region_classify(&budget).to_string(),
            if preserved { "1" } else { "0" }.to_string(),
        ];
        Ok((fmt3, region_row))
    })
    .into_iter()
    .collect();
    let (rows_a, rows_b): (Vec<_>, Vec<_>) = rows?.into_iter().unzip();
    Ok(vec![
        Section {
            comments: vec!["panel a: diffraction transmissivity tau_diff".into()],
            columns: vec!["w0_m", "d_m", "tau_diff"],
            rows: rows_a,
        },
        Section {
            comments: vec![
                "panel b: free-space region and entanglement preservation".into(),
                format!(
                    "preserved = 1 where 1 - tau_diff < {} (thermal occupation {:.3})",
                    fmt_float(eta_max),
                    n_env
                ),
            ],
            columns: vec!["w0_m", "d_m", "region", "preserved"],
            rows: rows_b,
        },
    ])
}

/// Validity indicator theta of every derived resource family against
/// distance. All five families stay nonnegative across the sweep, which is
/// what qualifies their scalar reductions as bona fide two-mode states.
fn fig13(config: &ScenarioConfig) -> Result<(Vec<String>, Vec<Section>)> {
    let source = config.source().map_err(to_core)?;
    let channel = config.channel().map_err(to_core)?;
    let tau = config.tau;
    let count = 501;
    let rows: Result<Vec<Vec<String>>> = parallel_rows(count, |i| {
        let length = length_at(i);
        let es = state_at_distance(SweepResource::Es, &source, &channel, length)?;
        let mut row = vec![length, es.validity_theta()];
        for geometry in [Geometry::Symmetric, Geometry::Asymmetric] {
            let resource = match geometry {
                Geometry::Symmetric => SweepResource::TmstSym,
                Geometry::Asymmetric => SweepResource::TmstAsym,
            };
            let bare = state_at_distance(resource, &source, &channel, length)?;
            let heur = regaussify(&heuristic_2ps_corrections(&bare)?, geometry)?;
            let prob = regaussify(&probabilistic_2ps_standard(&bare, tau)?, geometry)?;
            row.push(heur.validity_theta());
            row.push(prob.validity_theta());
        }
        Ok(row.iter().map(|&x| fmt_float(x)).collect())
    })
    .into_iter()
    .collect();
    let header = vec![
        "cvml fig 13: validity indicator theta of derived resources vs distance".into(),
        format!(
            "grid: L in [0, 500] m step 1; scenario: {}",
            config.describe()
        ),
    ];
    let section = Section {
        comments: vec![],
        columns: vec![
            "L_m",
            "theta_es",
            "theta_2ps_heur_sym",
            "theta_2ps_prob_sym",
            "theta_2ps_heur_asym",
            "theta_2ps_prob_asym",
        ],
        rows: rows?,
    };
    Ok((header, vec![section]))
}

fn to_core(e: crate::config::ConfigError) -> cvml_core::Error {
    cvml_core::Error::Domain(e.0)
}
