//! `cvml` — calculator for microwave entanglement distribution through
//! open-air channels.
//!
//! Five subcommands cover the workflows the library supports: `maxdist`
//! (entanglement-preserving range of a lossy link), `fig` (deterministic CSV
//! exports of the summary figures), `sweep` (distance sweeps of one resource
//! family), `satellite` (line-of-sight link budgets), and `report` (the
//! acceptance suite for the configured scenario).
//!
//! Exit codes: 0 success, 1 acceptance failure, 2 configuration error,
//! 3 I/O error.

mod config;
mod figures;
mod output;

use clap::{Parser, Subcommand, ValueEnum};
use config::{ConfigError, ScenarioConfig};
use cvml_core::channel::{asymmetric_state, max_distance, max_reflectivity, Geometry};
use cvml_core::constants::SPEED_OF_LIGHT;
use cvml_core::distillation::{
    heuristic_2ps_corrections, probabilistic_2ps_standard, regaussify,
};
use cvml_core::gaussian::bose_einstein_occupation;
use cvml_core::satellite::{
    diffraction_transmissivity, friis_path_transmissivity, min_aperture_product,
    preservation_threshold, region_classify, spot_size, LinkBudget,
};
use cvml_core::teleportation::{
    fidelity_2ps_general, fidelity_at_distance, fidelity_heuristic_2ps, state_at_distance,
    SweepResource,
};
use output::{fmt_float, parallel_rows, write_csv, Section};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "cvml",
    version,
    about = "Microwave open-air entanglement distribution calculator",
    after_help = "Environment:\n  CVML_THREADS  cap the number of worker threads (default: all cores)"
)]
struct Cli {
    /// Scenario file with flat `key = value` lines; flags win over the file
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Photon-subtraction tap transmissivity, overriding the scenario value
    #[arg(long, global = true, value_name = "X")]
    tau: Option<f64>,

    /// Displacement of the teleported coherent state (accepted for
    /// experiment parity; the average fidelity does not depend on it)
    #[arg(long, global = true, value_name = "X")]
    alpha0: Option<f64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Maximum entanglement-preserving distance of the configured link
    Maxdist {
        /// Which mode(s) travel: one (`asym`) or both (`sym`)
        #[arg(long, value_enum, default_value = "asym")]
        geometry: GeometryArg,
    },
    /// Write the data grid behind one of the summary figures as CSV
    Fig {
        /// Figure identifier
        #[arg(long, value_parser = parse_fig_id)]
        id: u8,
        /// Output CSV path
        #[arg(long, value_name = "PATH")]
        out: PathBuf,
    },
    /// Sweep one resource family over distance and emit CSV records
    Sweep {
        /// Start of the distance grid, m (default from the scenario file)
        #[arg(long, value_name = "M")]
        from: Option<f64>,
        /// End of the distance grid, m
        #[arg(long, value_name = "M")]
        to: Option<f64>,
        /// Grid spacing, m
        #[arg(long, value_name = "M")]
        step: Option<f64>,
        /// Resource family to sweep
        #[arg(long, value_enum, default_value = "tmst-asym")]
        resource: ResourceArg,
        /// Output CSV path (stdout when omitted)
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Link budget of a line-of-sight free-space channel
    Satellite {
        /// Carrier wavelength, m
        #[arg(long, default_value_t = 0.06, value_name = "M")]
        wavelength: f64,
        /// Travelled distance, m
        #[arg(long, default_value_t = 1000.0, value_name = "M")]
        distance: f64,
        /// Emitting aperture diameter, m
        #[arg(long, default_value_t = 1.0, value_name = "M")]
        aperture: f64,
        /// Aperture efficiency in [0, 1]
        #[arg(long, default_value_t = 1.0, value_name = "X")]
        efficiency: f64,
        /// Initial beam spot size, m
        #[arg(long, default_value_t = 0.5, value_name = "M")]
        spot: f64,
        /// Beam curvature radius, m (default: the distance, i.e. flat arrival)
        #[arg(long, value_name = "M")]
        curvature: Option<f64>,
        /// Receiver aperture radius, m (default: twice the spot size)
        #[arg(long, value_name = "M")]
        receiver: Option<f64>,
        /// Reflectivity budget for the minimum-aperture product
        #[arg(long, default_value_t = 0.038, value_name = "X")]
        eta_lim: f64,
        /// Also write the transmissivity/region chart grid as CSV
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Run the acceptance suite against the configured scenario
    Report,
}

#[derive(Clone, Copy, ValueEnum)]
enum GeometryArg {
    Asym,
    Sym,
}

#[derive(Clone, Copy, ValueEnum)]
enum ResourceArg {
    #[value(name = "tmst-asym")]
    TmstAsym,
    #[value(name = "tmst-sym")]
    TmstSym,
    #[value(name = "2ps-prob-asym")]
    Ps2ProbAsym,
    #[value(name = "2ps-prob-sym")]
    Ps2ProbSym,
    #[value(name = "2ps-heur-asym")]
    Ps2HeurAsym,
    #[value(name = "2ps-heur-sym")]
    Ps2HeurSym,
    #[value(name = "es")]
    Es,
}

impl ResourceArg {
    fn to_sweep(self) -> SweepResource {
        match self {
            ResourceArg::TmstAsym => SweepResource::TmstAsym,
            ResourceArg::TmstSym => SweepResource::TmstSym,
            ResourceArg::Ps2ProbAsym => SweepResource::Ps2ProbAsym,
            ResourceArg::Ps2ProbSym => SweepResource::Ps2ProbSym,
            ResourceArg::Ps2HeurAsym => SweepResource::Ps2HeurAsym,
            ResourceArg::Ps2HeurSym => SweepResource::Ps2HeurSym,
            ResourceArg::Es => SweepResource::Es,
        }
    }

    /// Tag emitted in the `resource` CSV column; same spelling as the flag.
    fn tag(self) -> &'static str {
        match self {
            ResourceArg::TmstAsym => "tmst-asym",
            ResourceArg::TmstSym => "tmst-sym",
            ResourceArg::Ps2ProbAsym => "2ps-prob-asym",
            ResourceArg::Ps2ProbSym => "2ps-prob-sym",
            ResourceArg::Ps2HeurAsym => "2ps-heur-asym",
            ResourceArg::Ps2HeurSym => "2ps-heur-sym",
            ResourceArg::Es => "es",
        }
    }
}

fn parse_fig_id(s: &str) -> Result<u8, String> {
    let id: u8 = s
        .parse()
        .map_err(|_| format!("figure id must be a number, got `{s}`"))?;
    if figures::FIGURE_IDS.contains(&id) {
        Ok(id)
    } else {
        Err(format!(
            "unsupported figure {id}; available ids: 6, 8, 9, 10, 11, 12, 13"
        ))
    }
}

/// Terminal error carrying its process exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn config(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }

    fn io(path: &Path, err: std::io::Error) -> Self {
        Self {
            code: 3,
            message: format!("cannot write {}: {err}", path.display()),
        }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::config(e.to_string())
    }
}

/// Library errors reaching the top level are parameter problems: the inputs
/// put the computation outside its domain.
impl From<cvml_core::Error> for Failure {
    fn from(e: cvml_core::Error) -> Self {
        Failure::config(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(failure) => {
            eprintln!("cvml: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, Failure> {
    let mut scenario = match &cli.config {
        Some(path) => ScenarioConfig::from_file(path)?,
        None => ScenarioConfig::default(),
    };
    if let Some(tau) = cli.tau {
        if !(tau > 0.0 && tau <= 1.0) {
            return Err(Failure::config(format!(
                "tau must lie in (0, 1], got {tau}"
            )));
        }
        scenario.tau = tau;
    }
    if let Some(alpha0) = cli.alpha0 {
        eprintln!(
            "cvml: note: displacement alpha0 = {alpha0} is ignored; the average \
             teleportation fidelity is displacement-independent"
        );
    }
    match cli.command {
        Command::Maxdist { geometry } => cmd_maxdist(&scenario, geometry),
        Command::Fig { id, out } => cmd_fig(&scenario, id, &out),
        Command::Sweep {
            from,
            to,
            step,
            resource,
            out,
        } => cmd_sweep(&scenario, from, to, step, resource, out.as_deref()),
        Command::Satellite {
            wavelength,
            distance,
            aperture,
            efficiency,
            spot,
            curvature,
            receiver,
            eta_lim,
            out,
        } => cmd_satellite(
            &scenario,
            SatelliteArgs {
                wavelength,
                distance,
                aperture,
                efficiency,
                spot,
                curvature,
                receiver,
                eta_lim,
            },
            out.as_deref(),
        ),
        Command::Report => cmd_report(&scenario),
    }
}

// ------------------------------------------------------------------ maxdist

/// Distance at which `nu_of_l` crosses 1 from below: double out a bracket,
/// then bisect to fixed depth. Cross-checks the closed-form thresholds.
fn bisect_nu_crossing(
    nu_of_l: impl Fn(f64) -> cvml_core::Result<f64>,
    hi0: f64,
) -> cvml_core::Result<f64> {
    let mut lo = 0.0;
    let mut hi = hi0;
    let mut expansions = 0;
    while nu_of_l(hi)? < 1.0 {
        hi *= 2.0;
        expansions += 1;
        if expansions > 60 {
            return Err(cvml_core::Error::Convergence(
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

fn cmd_maxdist(scenario: &ScenarioConfig, geometry: GeometryArg) -> Result<ExitCode, Failure> {
    let source = scenario.source()?;
    let channel = scenario.channel()?;
    let (label, eta, closed, bisected) = match geometry {
        GeometryArg::Asym => {
            let eta_max = max_reflectivity(&source, scenario.n_env)?;
            let closed = max_distance(eta_max, scenario.mu, scenario.eta_ant)?;
            let bisected = bisect_nu_crossing(
                |l| asymmetric_state(&source, &channel.with_length(l)?)?.nu_minus(),
                1000.0,
            )?;
            ("asym", eta_max, closed, bisected)
        }
        GeometryArg::Sym => {
            // With equal legs the state keeps alpha = beta and its smaller
            // PT symplectic eigenvalue is alpha - gamma; solving
            // alpha - gamma = 1 for the per-leg reflectivity gives
            // eta* = (1 - nu_in) / (1 + 2 n_env - nu_in).
            if !source.is_entangled() {
                return Err(Failure::config(format!(
                    "source with r = {}, n = {} is not entangled; no loss threshold exists",
                    source.r(),
                    source.n()
                )));
            }
            let nu_in = source.nu_in();
            let eta_leg = (1.0 - nu_in) / (1.0 + 2.0 * scenario.n_env - nu_in);
            let closed = 2.0 * max_distance(eta_leg, scenario.mu, scenario.eta_ant)?;
            let bisected = bisect_nu_crossing(
                |l| {
                    state_at_distance(SweepResource::TmstSym, &source, &channel, l)?.nu_minus()
                },
                1000.0,
            )?;
            ("sym", eta_leg, closed, bisected)
        }
    };
    println!("geometry = {label}");
    println!("eta_max = {}", fmt_float(eta));
    println!("L_max_closed_m = {}", fmt_float(closed));
    println!("L_max_bisect_m = {}", fmt_float(bisected));
    println!("check_delta_m = {}", fmt_float((closed - bisected).abs()));
    Ok(ExitCode::SUCCESS)
}

// ---------------------------------------------------------------------- fig

fn cmd_fig(scenario: &ScenarioConfig, id: u8, out: &Path) -> Result<ExitCode, Failure> {
    let (header, sections) = figures::build_figure(id, scenario)?;
    write_csv(Some(out), &header, &sections).map_err(|e| Failure::io(out, e))?;
    Ok(ExitCode::SUCCESS)
}

// -------------------------------------------------------------------- sweep

fn cmd_sweep(
    scenario: &ScenarioConfig,
    from: Option<f64>,
    to: Option<f64>,
    step: Option<f64>,
    resource: ResourceArg,
    out: Option<&Path>,
) -> Result<ExitCode, Failure> {
    let from = from.unwrap_or(scenario.sweep_from);
    let to = to.unwrap_or(scenario.sweep_to);
    let step = step.unwrap_or(scenario.sweep_step);
    if !(from.is_finite() && to.is_finite() && step.is_finite()) {
        return Err(Failure::config("sweep bounds must be finite"));
    }
    if from < 0.0 {
        return Err(Failure::config(format!(
            "sweep start must be nonnegative, got {from}"
        )));
    }
    if !(step > 0.0) {
        return Err(Failure::config(format!(
            "sweep step must be positive, got {step}"
        )));
    }
    if to < from {
        return Err(Failure::config(format!(
            "sweep end {to} lies before start {from}"
        )));
    }
    let count_f = ((to - from) / step).floor() + 1.0;
    if count_f > 2e6 {
        return Err(Failure::config(format!(
            "sweep would produce {count_f:.0} rows; refusing more than 2e6"
        )));
    }
    let count = count_f as usize;

    let source = scenario.source()?;
    let channel = scenario.channel()?;
    let tau = scenario.tau;
    let family = resource.to_sweep();
    let tag = resource.tag();
    let maybe_rows: Vec<Option<Vec<String>>> = parallel_rows(count, |i| {
        let length = from + i as f64 * step;
        sweep_row(family, tag, &source, &channel, tau, length)
            .ok()
            .flatten()
    });
    let dropped = maybe_rows.iter().filter(|r| r.is_none()).count();
    if dropped > 0 {
        eprintln!("cvml: sweep dropped {dropped} row(s) with undefined values");
    }
    let rows: Vec<Vec<String>> = maybe_rows.into_iter().flatten().collect();

    let header = vec![
        format!("cvml sweep: {tag} over L in [{from}, {to}] m step {step}"),
        format!("scenario: {}", scenario.describe()),
        "entanglement columns describe the delivered (re-Gaussified where \
         applicable) state; P_success is blank for deterministic families"
            .into(),
    ];
    let section = Section {
        comments: vec![],
        columns: vec![
            "L_m",
            "resource",
            "nu_minus",
            "negativity",
            "log_negativity",
            "fidelity",
            "P_success",
            "theta",
        ],
        rows,
    };
    write_csv(out, &header, &[section]).map_err(|e| match out {
        Some(path) => Failure::io(path, e),
        None => Failure {
            code: 3,
            message: format!("cannot write to stdout: {e}"),
        },
    })?;
    Ok(ExitCode::SUCCESS)
}

/// One sweep record, or `None` when any emitted value fails to be finite.
/// The delivered state is the re-Gaussified one for subtraction families,
/// the swapped state for the relay, and the bare state otherwise.
fn sweep_row(
    family: SweepResource,
    tag: &str,
    source: &cvml_core::channel::SqueezedSource,
    channel: &cvml_core::channel::ChannelParams,
    tau: f64,
    length: f64,
) -> cvml_core::Result<Option<Vec<String>>> {
    let bare = state_at_distance(family, source, channel, length)?;
    let (state, fidelity, success) = match family {
        SweepResource::TmstAsym | SweepResource::TmstSym | SweepResource::Es => {
            let f = fidelity_at_distance(family, source, channel, tau, length)?.fidelity;
            (bare, f, None)
        }
        SweepResource::Ps2ProbAsym | SweepResource::Ps2ProbSym => {
            let geometry = family.geometry().unwrap_or(Geometry::Asymmetric);
            let resource = probabilistic_2ps_standard(&bare, tau)?;
            let delivered = regaussify(&resource, geometry)?;
            let f = fidelity_2ps_general(&bare, tau)?.fidelity;
            (delivered, f, Some(resource.success_probability()))
        }
        SweepResource::Ps2HeurAsym | SweepResource::Ps2HeurSym => {
            let geometry = family.geometry().unwrap_or(Geometry::Asymmetric);
            let resource = heuristic_2ps_corrections(&bare)?;
            let delivered = regaussify(&resource, geometry)?;
            let f = fidelity_heuristic_2ps(&bare)?.fidelity;
            (delivered, f, None)
        }
    };
    let nu = state.nu_minus()?;
    let negativity = state.negativity()?;
    let log_negativity = state.log_negativity()?;
    let theta = state.validity_theta();
    let numbers = [length, nu, negativity, log_negativity, fidelity, theta];
    let finite = numbers.iter().all(|x| x.is_finite())
        && success.is_none_or(f64::is_finite)
        && theta >= -1e-9;
    if !finite {
        return Ok(None);
    }
    Ok(Some(vec![
        fmt_float(length),
        tag.to_string(),
        fmt_float(nu),
        fmt_float(negativity),
        fmt_float(log_negativity),
        fmt_float(fidelity),
        success.map(fmt_float).unwrap_or_default(),
        fmt_float(theta),
    ]))
}

// ---------------------------------------------------------------- satellite

struct SatelliteArgs {
    wavelength: f64,
    distance: f64,
    aperture: f64,
    efficiency: f64,
    spot: f64,
    curvature: Option<f64>,
    receiver: Option<f64>,
    eta_lim: f64,
}

fn cmd_satellite(
    scenario: &ScenarioConfig,
    args: SatelliteArgs,
    out: Option<&Path>,
) -> Result<ExitCode, Failure> {
    let curvature = args
        .curvature
        .unwrap_or(if args.distance > 0.0 { args.distance } else { 1.0 });
    let receiver = args.receiver.unwrap_or(2.0 * args.spot);
    let budget = LinkBudget::new(
        args.wavelength,
        args.distance,
        args.aperture,
        args.efficiency,
        args.spot,
        curvature,
        receiver,
    )?;
    let friis = friis_path_transmissivity(&budget);
    let beam = spot_size(&budget);
    let tau_diff = diffraction_transmissivity(&budget);
    let region = region_classify(&budget);
    let carrier = SPEED_OF_LIGHT / args.wavelength;
    let background = bose_einstein_occupation(carrier, figures::CMB_TEMPERATURE_K)?;
    let eta_asym = preservation_threshold(Geometry::Asymmetric, background, scenario.r)?;
    let eta_sym = preservation_threshold(Geometry::Symmetric, background, scenario.r)?;
    // the minimum-aperture product shrinks linearly with distance; 0 at d = 0
    let product = if args.distance > 0.0 {
        min_aperture_product(args.distance, args.wavelength, args.eta_lim)?
    } else {
        0.0
    };

    println!("# cvml satellite link report");
    println!("wavelength_m = {}", fmt_float(args.wavelength));
    println!("distance_m = {}", fmt_float(args.distance));
    println!("aperture_m = {}", fmt_float(args.aperture));
    println!("aperture_efficiency = {}", fmt_float(args.efficiency));
    println!("initial_spot_m = {}", fmt_float(args.spot));
    println!("beam_curvature_m = {}", fmt_float(curvature));
    println!("receiver_aperture_m = {}", fmt_float(receiver));
    println!("directivity = {}", fmt_float(budget.directivity()));
    println!(
        "rayleigh_distance_m = {}",
        fmt_float(budget.rayleigh_distance())
    );
    println!("friis_transmissivity = {}", fmt_float(friis.value));
    println!("friis_saturated = {}", u8::from(friis.saturated));
    println!("spot_size_m = {}", fmt_float(beam));
    println!("diffraction_transmissivity = {}", fmt_float(tau_diff));
    println!("field_region = {region}");
    println!("background_occupation = {}", fmt_float(background));
    println!("eta_max_asym = {}", fmt_float(eta_asym));
    println!("eta_max_sym = {}", fmt_float(eta_sym));
    println!("min_aperture_product_m2 = {}", fmt_float(product));

    if let Some(path) = out {
        let sections =
            figures::satellite_grid_sections(args.wavelength, figures::CMB_TEMPERATURE_K)?;
        let header = vec![
            "cvml satellite chart grid".into(),
            format!(
                "grid: w0 in [0.1, 10] m (61 log steps) x d in [1e2, 1e6] m (81 log steps); \
                 lambda = {} m, R0 = d, a_R = 2 w0",
                args.wavelength
            ),
        ];
        write_csv(Some(path), &header, &sections).map_err(|e| Failure::io(path, e))?;
    }
    Ok(ExitCode::SUCCESS)
}

// ------------------------------------------------------------------- report

fn cmd_report(scenario: &ScenarioConfig) -> Result<ExitCode, Failure> {
    let params = scenario.acceptance_params();
    if !params.is_default_baseline() {
        eprintln!(
            "cvml: warning: scenario differs from the reference baseline; the pass/fail \
             windows below describe the reference scenario"
        );
    }
    let outcomes = cvml_core::acceptance::run_all(&params);
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    for outcome in &outcomes {
        println!("{outcome}");
    }
    println!(
        "acceptance: {}/{} criteria passed",
        outcomes.len() - failed,
        outcomes.len()
    );
    Ok(if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}
