//! `nlring` command-line front end. The binary is a thin wrapper around [`run_from`].

mod output;
mod units;

use std::cell::RefCell;
use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use nlring::config::DeviceDoc;
use nlring::design::{energy_residual, optimize, select_process, DesignGoal, GapBudget, TuningMode};
use nlring::enhancement::{intensity_spectrum, SpectrumOptions};
use nlring::linear_cmt::{isolation_db, kerr_check, DEFAULT_KERR_THRESHOLD};
use nlring::nonlinear::{j_closed_form, j_quadrature, AssumptionMode, ProcessConfig};
use nlring::sfwm::{calibrate_kcal, noise_budget, sideband_detuning_on, suppression_factor, suppression_sweep, PumpDrive};
use nlring::table::Table;
use nlring::{Band, DeviceSpec, Error, ErrorKind, WaveguideParams};

use output::Sink;

const UNITS_HELP: &str = "\
Units: device files use metres and Hz (\"schema\": 1). Frequencies on the command line are Hz
unless suffixed (kHz, MHz, GHz, THz) or given as vacuum wavelengths (nm, um, m), e.g.
`--band 190e12:196e12`, `--band 1530nm:1570nm`. Powers are W unless suffixed mW or uW.
CSV columns named *_rad_s are angular frequencies.

Exit codes: 0 ok, 2 invalid input, 3 infeasible design, 4 numerical failure.
Errors are written to stderr as JSON {code, message, context}.";

#[derive(Parser)]
#[command(name = "nlring", version, about = "Linearly uncoupled racetrack resonator simulator", after_help = UNITS_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Device JSON (schema 1; lengths in m, frequencies in Hz).
    #[arg(long, short)]
    device: PathBuf,
    /// Output file; stdout when omitted. A `<file>.meta.json` sidecar is written next to it.
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Treat warnings as failures (exit 2).
    #[arg(long)]
    strict: bool,
}

#[derive(Args, Clone, Copy)]
struct ProcessArgs {
    /// Signal wavelength or frequency; pumps sit symmetrically around it.
    #[arg(long, default_value = "1550nm", value_parser = units::wavelength)]
    signal: f64,
    /// Ring-1 FSRs between the two pumps (even, ≥ 2).
    #[arg(long, default_value_t = 10)]
    pump_separation: u32,
}

#[derive(Args, Clone, Copy)]
struct DriveArgs {
    /// CW power per pump (W; mW/uW suffixes accepted).
    #[arg(long, default_value = "1mW", value_parser = units::power)]
    power: f64,
    /// Pulse duration used for pairs-per-pulse figures, s.
    #[arg(long, default_value_t = 1e-9)]
    pulse: f64,
    /// Ring–bus self coupling σ; derived from the finesse when omitted.
    #[arg(long)]
    sigma: Option<f64>,
    /// Lumped nonlinear strength 𝒦.
    #[arg(long, default_value_t = 1.0)]
    kcal: f64,
    /// Calibrate 𝒦 so the dual-pump rate is this many pairs/s at --power (overrides --kcal).
    #[arg(long)]
    target_rate: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum OverlapMethod {
    ClosedForm,
    Quadrature,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Trim,
    Fabrication,
}

#[derive(Subcommand)]
enum Command {
    /// Intensity enhancement |f₁|², |f₂|² of both rings over a band (CSV).
    Spectrum {
        #[command(flatten)]
        common: Common,
        /// Frequency window lo:hi (Hz, or with unit suffixes).
        #[arg(long, value_parser = units::band, allow_hyphen_values = true)]
        band: (f64, f64),
        /// Uniform grid points.
        #[arg(long, default_value_t = 20000)]
        points: usize,
        /// Also sample every resonance centre exactly.
        #[arg(long)]
        resonance_points: bool,
    },
    /// Nonlinear overlap J of the dual-pump process (JSON).
    Overlap {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        process: ProcessArgs,
        #[arg(long, value_enum, default_value = "closed-form")]
        method: OverlapMethod,
    },
    /// Signal and parasitic pair rates (JSON).
    Rates {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        process: ProcessArgs,
        #[command(flatten)]
        drive: DriveArgs,
    },
    /// Suppression and rates against δ/Δ for the pump-1 side band (CSV).
    Suppression {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        process: ProcessArgs,
        #[command(flatten)]
        drive: DriveArgs,
        /// Largest δ/Δ in the table.
        #[arg(long, default_value_t = 200.0)]
        max_ratio: f64,
        #[arg(long, default_value_t = 201)]
        points: usize,
    },
    /// Kerr validity metric γPλQ/(4n_g) against its threshold (JSON).
    KerrCheck {
        /// Device JSON; optional when --gamma, --n-g, --q and --wavelength are all given.
        #[arg(long, short)]
        device: Option<PathBuf>,
        #[arg(long, short)]
        output: Option<PathBuf>,
        #[arg(long)]
        strict: bool,
        /// Power in the bus (W; mW/uW suffixes accepted).
        #[arg(long, value_parser = units::power)]
        power: f64,
        /// Loaded Q; ring 1 of the device when omitted.
        #[arg(long)]
        q: Option<f64>,
        /// Wavelength (or frequency); device reference when omitted.
        #[arg(long, value_parser = units::wavelength)]
        wavelength: Option<f64>,
        /// Nonlinear parameter γ, 1/(W·m).
        #[arg(long)]
        gamma: Option<f64>,
        /// Group index.
        #[arg(long)]
        n_g: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_KERR_THRESHOLD)]
        threshold: f64,
    },
    /// Solve the coupler gap, place ring 2, check every design rule (JSON DesignReport).
    Optimize {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        process: ProcessArgs,
        /// Required single-pump suppression Δ²/(δ²+Δ²), e.g. 1e-4.
        #[arg(long)]
        suppression: f64,
        /// trim: ring-2 heater only; fabrication: ring-2 length and heater.
        #[arg(long, value_enum, default_value = "trim")]
        mode: Mode,
        #[arg(long, default_value = "1mW", value_parser = units::power)]
        power: f64,
        #[arg(long, default_value_t = DEFAULT_KERR_THRESHOLD)]
        max_kerr: f64,
        /// Smallest allowed coupler gap, m.
        #[arg(long, default_value_t = 100e-9)]
        min_gap: f64,
        /// Largest allowed coupler gap, m.
        #[arg(long, default_value_t = 1e-6)]
        max_gap: f64,
        #[arg(long, default_value_t = 30.0)]
        min_isolation_db: f64,
        #[arg(long, default_value_t = 1.0)]
        kcal: f64,
        /// Also write the optimized device as a schema-1 JSON file.
        #[arg(long)]
        device_out: Option<PathBuf>,
    },
    /// Evaluate design metrics while one device parameter varies (CSV).
    Sweep {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        process: ProcessArgs,
        /// Dotted parameter path in file units, e.g. ring2.heater_shift or dc.dc_length.
        #[arg(long)]
        param: String,
        /// lo:hi in the parameter's file units.
        #[arg(long, value_parser = units::range, allow_hyphen_values = true)]
        range: (f64, f64),
        #[arg(long, default_value_t = 101)]
        points: usize,
    },
}

struct CliError {
    code: u8,
    message: String,
    context: Value,
}

impl CliError {
    fn validation(message: impl Into<String>, context: Value) -> Self {
        CliError { code: 2, message: message.into(), context }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e.kind() {
            ErrorKind::Validation => 2,
            ErrorKind::Infeasible => 3,
            ErrorKind::Numerical => 4,
        };
        CliError { code, message: e.to_string(), context: json!({ "error": format!("{e:?}") }) }
    }
}

type CliResult<T> = Result<T, CliError>;

fn load_device(path: &Path) -> CliResult<(DeviceDoc, DeviceSpec)> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        CliError::validation(format!("cannot read device file: {e}"), json!({ "device": path.display().to_string() }))
    })?;
    let doc = DeviceDoc::from_json(&text).map_err(|e| with_context(e.into(), "device", path))?;
    let spec = doc.to_spec().map_err(|e| with_context(e.into(), "device", path))?;
    Ok((doc, spec))
}

fn with_context(mut e: CliError, key: &str, path: &Path) -> CliError {
    if let Value::Object(m) = &mut e.context {
        m.insert(key.into(), path.display().to_string().into());
    }
    e
}

fn check_strict(strict: bool, warnings: &[String]) -> CliResult<()> {
    if strict && !warnings.is_empty() {
        return Err(CliError::validation("warnings escalated by --strict", json!({ "warnings": warnings })));
    }
    Ok(())
}

fn goal_for(process: ProcessArgs) -> DesignGoal {
    // Suppression target is irrelevant to process selection.
    DesignGoal::new(process.signal, process.pump_separation, 0.5)
}

fn pretty<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serializes");
    s.push('\n');
    s
}

fn emit(common_output: &Option<PathBuf>, command: &str, device: Option<&Path>, data: &str, extra: Value) -> CliResult<()> {
    let sink = Sink { path: common_output.clone(), args: ARGS.with(|a| a.borrow().clone()) };
    let dev = device.map(|p| p.display().to_string());
    sink.emit(command, dev.as_deref(), data, extra)
        .map_err(|e| CliError::validation(format!("cannot write output: {e}"), json!({ "command": command })))
}

fn drive_for(spec: &DeviceSpec, cfg: &ProcessConfig, d: DriveArgs) -> CliResult<(PumpDrive, f64)> {
    let mean = 0.5 * (cfg.res_p1.omega0 + cfg.res_p2.omega0);
    let drive = PumpDrive { self_coupling: d.sigma, ..PumpDrive::from_power(d.power, mean, d.pulse) };
    let kcal = match d.target_rate {
        Some(rate) => calibrate_kcal(spec, cfg, rate, d.power)?,
        None => d.kcal,
    };
    Ok((drive, kcal))
}

fn sweep_table(doc: &DeviceDoc, process: ProcessArgs, param: &str, range: (f64, f64), n: usize) -> CliResult<Table> {
    if n == 0 {
        return Err(CliError::validation("--points must be at least 1", json!({})));
    }
    doc.get(param)?;
    let goal = goal_for(process);
    let xs: Vec<f64> = (0..n)
        .map(|i| if n == 1 { range.0 } else { range.0 + (range.1 - range.0) * i as f64 / (n - 1) as f64 })
        .collect();
    let row = |x: f64| -> Result<Vec<f64>, Error> {
        let spec = doc.with(param, x)?.to_spec()?;
        let cfg = select_process(&spec, &goal)?;
        let side = sideband_detuning_on(&spec, &cfg)?;
        let lw = cfg.res_s.linewidth;
        let s = [suppression_factor(side.delta[0], lw)?, suppression_factor(side.delta[1], lw)?];
        let j = j_closed_form(&spec, &cfg, AssumptionMode::Lenient)?.j_value.norm();
        Ok(vec![
            x,
            isolation_db(spec.kappa(), spec.dc_length),
            side.delta[0] / lw,
            side.delta[1] / lw,
            s[0],
            s[1],
            s[0].max(s[1]),
            energy_residual(&cfg) / lw,
            j,
        ])
    };
    // Parallel map, collected in index order.
    let rows: Result<Vec<Vec<f64>>, Error> = xs.par_iter().map(|&x| row(x)).collect();
    let mut table = Table::new([
        "value",
        "isolation_db",
        "delta_p1_over_linewidth",
        "delta_p2_over_linewidth",
        "suppression_p1",
        "suppression_p2",
        "worst_suppression",
        "energy_residual_over_linewidth",
        "j_abs",
    ]);
    for r in rows? {
        table.push(r);
    }
    Ok(table)
}

fn kerr_waveguide(device: Option<&DeviceSpec>, gamma: Option<f64>, n_g: Option<f64>) -> CliResult<WaveguideParams> {
    let missing = || CliError::validation("kerr-check needs --device or both --gamma and --n-g", json!({}));
    let mut wg = match device {
        Some(d) => d.waveguide,
        None => WaveguideParams {
            n_eff_ref: n_g.ok_or_else(missing)?,
            n_g: n_g.ok_or_else(missing)?,
            omega_ref: 1.0,
            gvd: None,
            gamma_nl: gamma.ok_or_else(missing)?,
            chi3_bar: 0.0,
            n_bar: 1.0,
            area_eff: 1.0,
        },
    };
    if let Some(g) = gamma {
        wg.gamma_nl = g;
    }
    if let Some(n) = n_g {
        wg.n_g = n;
    }
    Ok(wg)
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Spectrum { common, band, points, resonance_points } => {
            let (_, spec) = load_device(&common.device)?;
            let band = Band::new(band.0, band.1)?;
            let spectrum = intensity_spectrum(&spec, band, SpectrumOptions { n_points: points, include_centers: resonance_points })?;
            let extra = json!({ "band_rad_s": [band.lo, band.hi], "ring1_lines": spectrum.comb1.len(), "ring2_lines": spectrum.comb2.len() });
            emit(&common.output, "spectrum", Some(&common.device), &spectrum.to_csv(), extra)
        }
        Command::Overlap { common, process, method } => {
            let (_, spec) = load_device(&common.device)?;
            let cfg = select_process(&spec, &goal_for(process))?;
            let mode = if common.strict { AssumptionMode::Strict } else { AssumptionMode::Lenient };
            let result = match method {
                OverlapMethod::ClosedForm => j_closed_form(&spec, &cfg, mode)?,
                OverlapMethod::Quadrature => j_quadrature(&spec, &cfg)?,
            };
            check_strict(common.strict, &result.warnings)?;
            emit(&common.output, "overlap", Some(&common.device), &pretty(&result.report()), json!({}))
        }
        Command::Rates { common, process, drive } => {
            let (_, spec) = load_device(&common.device)?;
            let cfg = select_process(&spec, &goal_for(process))?;
            let (pump, kcal) = drive_for(&spec, &cfg, drive)?;
            let report = noise_budget(&spec, &pump, &cfg, kcal)?;
            check_strict(common.strict, &report.warnings)?;
            emit(&common.output, "rates", Some(&common.device), &pretty(&report), json!({ "kcal": kcal }))
        }
        Command::Suppression { common, process, drive, max_ratio, points } => {
            let (_, spec) = load_device(&common.device)?;
            let cfg = select_process(&spec, &goal_for(process))?;
            let (pump, kcal) = drive_for(&spec, &cfg, drive)?;
            let table = suppression_sweep(&spec, &pump, &cfg, kcal, max_ratio, points)?;
            emit(&common.output, "suppression", Some(&common.device), &table.to_csv(), json!({ "kcal": kcal }))
        }
        Command::KerrCheck { device, output, strict: _, power, q, wavelength, gamma, n_g, threshold } => {
            let spec = match &device {
                Some(p) => Some(load_device(p)?.1),
                None => None,
            };
            let wg = kerr_waveguide(spec.as_ref(), gamma, n_g)?;
            let q = match (q, &spec) {
                (Some(q), _) => q,
                (None, Some(s)) => s.ring1.loaded_q(),
                (None, None) => return Err(CliError::validation("kerr-check needs --q without a device", json!({}))),
            };
            let lambda = match (wavelength, &spec) {
                (Some(l), _) => l,
                (None, Some(s)) => 2.0 * std::f64::consts::PI * 299_792_458.0 / s.waveguide.omega_ref,
                (None, None) => {
                    return Err(CliError::validation("kerr-check needs --wavelength without a device", json!({})))
                }
            };
            let v = kerr_check(&wg, power, q, lambda, threshold)?;
            let out = json!({
                "metric": v.metric,
                "threshold": v.threshold,
                "verdict": if v.pass { "PASS" } else { "FAIL" },
                "inputs": { "power_w": power, "q_loaded": q, "wavelength_m": lambda, "gamma_nl": wg.gamma_nl, "n_g": wg.n_g },
            });
            emit(&output, "kerr-check", device.as_deref(), &pretty(&out), json!({}))
        }
        Command::Optimize {
            common,
            process,
            suppression,
            mode,
            power,
            max_kerr,
            min_gap,
            max_gap,
            min_isolation_db,
            kcal,
            device_out,
        } => {
            let (_, spec) = load_device(&common.device)?;
            let goal = DesignGoal {
                max_kerr_metric: max_kerr,
                gap_budget: GapBudget { min_gap, max_gap },
                pump_power: power,
                min_isolation_db,
                mode: match mode {
                    Mode::Trim => TuningMode::Trim,
                    Mode::Fabrication => TuningMode::Fabrication,
                },
                kcal,
                ..DesignGoal::new(process.signal, process.pump_separation, suppression)
            };
            let report = optimize(&spec, &goal)?;
            check_strict(common.strict, &report.warnings)?;
            if let Some(path) = &device_out {
                let doc = DeviceDoc::from_spec(&report.device);
                output::write_atomic(path, (doc.to_json() + "\n").as_bytes()).map_err(|e| {
                    CliError::validation(format!("cannot write device: {e}"), json!({ "device_out": path.display().to_string() }))
                })?;
            }
            let extra = json!({ "all_pass": report.all_pass });
            emit(&common.output, "optimize", Some(&common.device), &pretty(&report), extra)
        }
        Command::Sweep { common, process, param, range, points } => {
            let (doc, _) = load_device(&common.device)?;
            let table = sweep_table(&doc, process, &param, range, points)?;
            let extra = json!({ "param": param, "range": [range.0, range.1], "points": points });
            emit(&common.output, "sweep", Some(&common.device), &table.to_csv(), extra)
        }
    }
}

thread_local! {
    /// Arguments of the invocation in progress, recorded in output sidecars.
    static ARGS: RefCell<Vec<String>> = const { RefCell::new(Vec::new()) };
}

/// Parses `args` (program name first), runs the command and returns the process
/// exit code. Errors are written to stderr as `{code, message, context}` JSON.
pub fn run_from<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    ARGS.with(|a| *a.borrow_mut() = args.iter().skip(1).map(|s| s.to_string_lossy().into_owned()).collect());
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            let body = json!({ "code": e.code, "message": e.message, "context": e.context });
            eprintln!("{body}");
            e.code
        }
    }
}
