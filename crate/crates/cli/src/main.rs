use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use noon_cli::config::SweepConfig;
use noon_cli::{presets, run_scenario, write_outputs, CliError, Result};
use noon_core::atmosphere::{
    calibrate_wavelength, derive_weibull, moment, Aperture, BeamParams, TransmissionMeasure,
};
use serde_json::json;

#[derive(Parser)]
#[command(name = "noon-sim", version, about = "Noisy N00N state sweeps")]
struct Cli {
    /// Worker threads for sweep points.
    #[arg(long, global = true, env = "NOON_SIM_JOBS")]
    jobs: Option<usize>,
    /// Output directory (default: the config's `output`, else `out`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for Monte-Carlo cross-checks.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct TurbulenceOverrides {
    /// Wavelength in meters.
    #[arg(long)]
    wavelength: Option<f64>,
    /// |τ| below which entanglement counts as practically lost.
    #[arg(long)]
    survival_threshold: Option<f64>,
    /// Monte-Carlo samples per distance for the coherence-scale cross-check.
    #[arg(long)]
    mc_samples: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Run a JSON sweep config or a named preset.
    Run {
        #[arg(long, required_unless_present = "scenario", conflicts_with = "scenario")]
        config: Option<PathBuf>,
        /// Preset name: fig1..fig5.
        #[arg(long)]
        scenario: Option<String>,
    },
    /// Δφ(φ) for N00N/vacuum mixtures, M = 2.
    Fig1,
    /// Minimal error over M under 5 % loss.
    Fig2,
    /// Minimal error over the phase-noise width, N = 3.
    Fig3,
    /// τ and minimal error of the N = 4 vacuum mixture.
    Fig4,
    /// τ over distance through beam-wandering turbulence, N = 2.
    Fig5(TurbulenceOverrides),
    /// Print derived distribution parameters, moments and a wavelength
    /// calibration for a link.
    AtmosphereInfo(LinkArgs),
}

#[derive(Args)]
struct LinkArgs {
    #[arg(long, default_value_t = 0.98e-3)]
    w0: f64,
    #[arg(long, default_value_t = noon_core::atmosphere::DEFAULT_WAVELENGTH)]
    wavelength: f64,
    #[arg(long, default_value_t = 1e-17)]
    cn2: f64,
    /// Aperture radius in meters, or `W` to match the beam radius.
    #[arg(long, default_value = "W")]
    aperture: String,
    #[arg(long, default_value_t = 200.0)]
    distance: f64,
    /// Mean transmission to calibrate the wavelength against.
    #[arg(long, default_value_t = 0.843)]
    target: f64,
    #[arg(long, default_value_t = 500e-9)]
    lambda_min: f64,
    #[arg(long, default_value_t = 1600e-9)]
    lambda_max: f64,
    #[arg(long, default_value_t = 8)]
    max_moment: u32,
}

/// Writes to stdout; a closed pipe (`| head`) is not an error.
fn emit(text: &str) -> Result<()> {
    let mut out = io::stdout().lock();
    match writeln!(out, "{text}").and_then(|()| out.flush()) {
        Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn default_jobs() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn run_config(cli: &Cli, mut cfg: SweepConfig) -> Result<()> {
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    let dir = cli
        .out
        .clone()
        .or_else(|| cfg.output.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    let result = run_scenario(&cfg, cli.jobs.unwrap_or_else(default_jobs))?;
    let paths = write_outputs(&result, &dir)?;
    let mut listing = vec![paths.csv, paths.metadata, paths.plot];
    listing.extend(paths.singular_log);
    let lines: Vec<String> = listing.iter().map(|p| p.display().to_string()).collect();
    emit(&lines.join("\n"))
}

fn atmosphere_info(args: &LinkArgs) -> Result<()> {
    let aperture = if args.aperture == "W" {
        Aperture::MatchBeam
    } else {
        Aperture::Radius(
            args.aperture
                .parse()
                .map_err(|_| CliError::config("aperture", "expected a radius in meters or `W`"))?,
        )
    };
    let beam = BeamParams {
        w0: args.w0,
        wavelength: args.wavelength,
        cn2: args.cn2,
        aperture,
        distance: args.distance,
    };
    let wp = derive_weibull(&beam)?;
    let moments = (0..=args.max_moment)
        .map(|n| Ok(json!({ "n": n, "value": moment(&wp, n)? })))
        .collect::<Result<Vec<_>>>()?;
    let mut calibration = Vec::new();
    for measure in [TransmissionMeasure::Amplitude, TransmissionMeasure::Intensity] {
        calibration.push(calibrate_wavelength(&beam, args.target, measure, args.lambda_min, args.lambda_max)?);
    }
    let report = json!({
        "beam": beam,
        "weibull": wp,
        "moments": moments,
        "mean_amplitude_transmission": moment(&wp, 1)?,
        "mean_intensity_transmission": moment(&wp, 2)?,
        "calibration": calibration,
    });
    emit(&serde_json::to_string_pretty(&report).expect("report serializes"))
}

fn dispatch(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Run { config, scenario } => {
            let cfg = match (config, scenario) {
                (Some(path), _) => SweepConfig::from_path(path)?,
                (None, Some(name)) => presets::preset(name).ok_or_else(|| {
                    CliError::config("scenario", format!("unknown preset `{name}`; expected one of {:?}", presets::PRESET_NAMES))
                })?,
                (None, None) => unreachable!("clap requires one of --config/--scenario"),
            };
            run_config(cli, cfg)
        }
        Command::Fig1 => run_config(cli, presets::fig1()),
        Command::Fig2 => run_config(cli, presets::fig2()),
        Command::Fig3 => run_config(cli, presets::fig3()),
        Command::Fig4 => run_config(cli, presets::fig4()),
        Command::Fig5(o) => {
            let mut cfg = presets::fig5();
            if let (Some(l), Some(beam)) = (o.wavelength, cfg.beam.as_mut()) {
                beam.wavelength = l;
            }
            if o.survival_threshold.is_some() {
                cfg.survival_threshold = o.survival_threshold;
            }
            cfg.mc_samples = o.mc_samples.or(cfg.mc_samples);
            run_config(cli, cfg)
        }
        Command::AtmosphereInfo(args) => atmosphere_info(args),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
