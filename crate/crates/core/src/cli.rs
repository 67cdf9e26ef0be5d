//! Command-line front end: `classify`, `simulate`, `floquet`, `sweep` and
//! `presets`.
//!
//! Every output starts with `#` lines echoing the effective parameters.
//! Exit codes: 0 success, 1 usage error, 2 validation error, 3 numerical
//! failure.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::Error;
use crate::floquet::{
    locate_savanna_orbit, rho_tg, ShootingOptions, DEFAULT_STEPS, FLOQUET_CSV_HEADER,
};
use crate::format::{csv_opt, human_num, human_opt};
use crate::integrator::{simulate, Scheme};
use crate::model::{region_preset, validate, ModelParams, ParamName, RegionPreset, VegState};
use crate::sweep::{level_curve, runtime_warning, scan, Axis, Quantity, ScanOptions};
use crate::thresholds::{
    compute_thresholds, critical_values, eta_g_boundary, tau_boundary, THRESHOLD_CSV_HEADER,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "savanna",
    version,
    about = "Impulsive tree-grass savanna model"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Threshold quantities, critical values and stability case.
    Classify {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Integrate the impulsive system and write the trajectory CSV.
    Simulate {
        #[command(flatten)]
        params: ParamArgs,
        /// Final time.
        #[arg(long, default_value_t = 100.0, allow_negative_numbers = true)]
        horizon: f64,
        /// Requested step size, snapped so that tau is a whole number of steps.
        #[arg(long = "h", default_value_t = 0.01, allow_negative_numbers = true)]
        h: f64,
        #[arg(long, default_value = "nsfd")]
        scheme: Scheme,
        /// Initial state `T_S,T_NS,G` [default: 0.1 K_T, 0.1 K_T, 0.5 K_G].
        #[arg(long, value_name = "T_S,T_NS,G")]
        s0: Option<String>,
    },
    /// Locate the periodic orbit by shooting and report its Floquet multipliers.
    Floquet {
        #[command(flatten)]
        params: ParamArgs,
        /// Initial guess `T_S,T_NS,G` for the post-fire orbit state
        /// [default: half the forest equilibrium and half the grassland peak].
        #[arg(long, value_name = "T_S,T_NS,G")]
        s0: Option<String>,
        /// RK4 steps per fire period.
        #[arg(long, default_value_t = DEFAULT_STEPS)]
        steps: usize,
    },
    /// Evaluate a quantity on a two-parameter grid and extract a level curve.
    Sweep {
        #[command(flatten)]
        params: ParamArgs,
        /// Two axes `p1:min:max:n,p2:min:max:n`.
        #[arg(long, allow_hyphen_values = true)]
        axes: String,
        #[arg(long)]
        quantity: String,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        level: f64,
        /// Destination of the level-curve CSV.
        #[arg(long)]
        curve_output: Option<PathBuf>,
        /// Evaluate cells on a single thread.
        #[arg(long)]
        sequential: bool,
        /// RK4 steps per fire period for `rho_tg` scans.
        #[arg(long, default_value_t = DEFAULT_STEPS)]
        steps: usize,
    },
    /// Print region presets in parameter-file form, with admissible ranges.
    Presets {
        #[arg(long)]
        region: Option<u8>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
#[group(id = "source", required = true, multiple = false)]
struct SourceArgs {
    /// Region preset 1, 2 or 3.
    #[arg(long)]
    region: Option<u8>,
    /// Parameter file with `key = value` lines.
    #[arg(long)]
    params: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ParamArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Override one parameter; repeatable, last wins.
    #[arg(long = "set", value_name = "KEY=VALUE", allow_hyphen_values = true)]
    set: Vec<String>,
    /// Write to this file instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
}

#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Domain(_)
            | Error::InvalidParams(_)
            | Error::UnknownParameter(_)
            | Error::UnknownRegion(_)
            | Error::Parse { .. } => EXIT_VALIDATION,
            Error::Undefined { .. } | Error::NonFinite { .. } | Error::Numerical(_) => {
                EXIT_NUMERICAL
            }
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

/// Effective parameters and the `#` header describing how they were built.
struct Loaded {
    params: ModelParams,
    header: String,
}

fn config_lines(p: &ModelParams) -> Vec<String> {
    ParamName::ALL
        .iter()
        .map(|&n| format!("{n} = {}", p.get(n)))
        .collect()
}

fn load(command: &str, args: &ParamArgs, warn: &mut dyn Write) -> Outcome<Loaded> {
    let mut header = format!("# savanna {command}\n");
    let (mut params, preset) = match (&args.source.region, &args.source.params) {
        (Some(id), None) => {
            let preset = region_preset(*id)?;
            let _ = writeln!(header, "# source: region {} ({})", preset.id, preset.name);
            (preset.defaults, Some(preset))
        }
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
            let p = ModelParams::from_config_str(&text).map_err(|e| Failure {
                code: EXIT_VALIDATION,
                message: format!("{}: {e}", path.display()),
            })?;
            let _ = writeln!(header, "# source: {}", path.display());
            (p, None)
        }
        _ => {
            return Err(Failure::usage(
                "exactly one of --region and --params is required",
            ))
        }
    };
    for kv in &args.set {
        let (key, value) = kv
            .split_once('=')
            .ok_or_else(|| Failure::usage(format!("--set expects KEY=VALUE, got `{kv}`")))?;
        let name: ParamName = key.trim().parse()?;
        let value: f64 = value.trim().parse().map_err(|_| {
            Failure::usage(format!("--set {key}: `{}` is not a number", value.trim()))
        })?;
        params.set(name, value)?;
        let _ = writeln!(header, "# override: {name}={value}");
    }
    let report = validate(&params, preset.as_ref());
    let warnings = report.warnings.clone();
    report.into_result()?;
    for w in &warnings {
        let _ = writeln!(warn, "warning: {}", w.message);
    }
    header.push_str("# effective parameters:\n");
    for line in config_lines(&params) {
        let _ = writeln!(header, "#   {line}");
    }
    Ok(Loaded { params, header })
}

fn parse_state(s: &str) -> Outcome<VegState> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let vals: Vec<f64> = parts
        .iter()
        .map(|x| x.parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Failure::usage(format!("expected three numbers `T_S,T_NS,G`, got `{s}`")))?;
    match vals[..] {
        [a, b, c] => Ok(VegState::new(a, b, c)),
        _ => Err(Failure::usage(format!(
            "expected three numbers `T_S,T_NS,G`, got `{s}`"
        ))),
    }
}

fn emit(text: &str, output: Option<&Path>, out: &mut dyn Write) -> Outcome<()> {
    match output {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display()))),
        None => out
            .write_all(text.as_bytes())
            .map_err(|e| Failure::usage(format!("cannot write to standard output: {e}"))),
    }
}

fn classify_cmd(
    args: &ParamArgs,
    format: Format,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Outcome<()> {
    let loaded = load("classify", args, err)?;
    let p = &loaded.params;
    let rep = compute_thresholds(p)?;
    let crit = critical_values(&rep);
    let eta_b = eta_g_boundary(p).ok();
    let tau_b = tau_boundary(p).ok();
    let mut text = loaded.header;
    match format {
        Format::Text => {
            text.push_str(&rep.to_text());
            for (k, v) in [
                ("sigma_G*", crit.sigma_g_star),
                ("sigma_NS*", crit.sigma_ns_star),
                ("tau*", crit.tau_star),
                ("eta_G boundary", eta_b),
                ("tau boundary", tau_b),
            ] {
                let _ = writeln!(text, "{k:<18} = {}", human_opt(v));
            }
            let verdict = rep.classification.verdict;
            let _ = writeln!(text, "{:<18} = {verdict} (code {})", "case", verdict.code());
        }
        Format::Csv => {
            let _ = writeln!(
                text,
                "{THRESHOLD_CSV_HEADER},sigma_g_star,sigma_ns_star,tau_star,eta_g_boundary,tau_boundary,case_code"
            );
            let _ = writeln!(
                text,
                "{},{},{},{},{},{},{}",
                rep.csv_row(),
                csv_opt(crit.sigma_g_star),
                csv_opt(crit.sigma_ns_star),
                csv_opt(crit.tau_star),
                csv_opt(eta_b),
                csv_opt(tau_b),
                rep.classification.verdict.code()
            );
        }
    }
    emit(&text, args.output.as_deref(), out)
}

fn simulate_cmd(
    args: &ParamArgs,
    horizon: f64,
    h: f64,
    scheme: Scheme,
    s0: Option<&str>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Outcome<()> {
    if !(horizon.is_finite() && horizon > 0.0) {
        return Err(Failure::usage(format!(
            "--horizon must be positive, got {horizon}"
        )));
    }
    if !(h.is_finite() && h > 0.0) {
        return Err(Failure::usage(format!("--h must be positive, got {h}")));
    }
    let loaded = load("simulate", args, err)?;
    let p = &loaded.params;
    let s0 = match s0 {
        Some(s) => parse_state(s)?,
        None => VegState::new(0.1 * p.k_t, 0.1 * p.k_t, 0.5 * p.k_g),
    };
    if !(s0.t_s >= 0.0 && s0.t_ns >= 0.0 && s0.g >= 0.0) {
        return Err(Failure {
            code: EXIT_VALIDATION,
            message: format!("initial state must be nonnegative, got {s0:?}"),
        });
    }
    let traj = simulate(p, s0, horizon, h, scheme)?;
    let mut text = loaded.header;
    let _ = writeln!(text, "# scheme: {scheme}");
    let _ = writeln!(text, "# horizon: {horizon}");
    let _ = writeln!(text, "# h requested: {h}, h effective: {}", traj.h);
    let _ = writeln!(text, "# s0: {},{},{}", s0.t_s, s0.t_ns, s0.g);
    let mut buf = Vec::new();
    traj.write_csv(&mut buf)
        .map_err(|e| Failure::usage(e.to_string()))?;
    text.push_str(&String::from_utf8_lossy(&buf));
    emit(&text, args.output.as_deref(), out)
}

fn default_guess(p: &ModelParams) -> VegState {
    let rep = compute_thresholds(p).ok();
    let forest = rep.as_ref().and_then(|r| r.forest_eq);
    let peak = rep.as_ref().and_then(|r| r.g_peak).unwrap_or(p.k_g);
    match forest {
        Some(e) => VegState::new(0.5 * e.t_s, 0.5 * e.t_ns, 0.5 * peak),
        None => VegState::new(0.25 * p.k_t, 0.25 * p.k_t, 0.5 * peak),
    }
}

fn floquet_cmd(
    args: &ParamArgs,
    s0: Option<&str>,
    steps: usize,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Outcome<()> {
    if steps == 0 {
        return Err(Failure::usage("--steps must be positive"));
    }
    let loaded = load("floquet", args, err)?;
    let p = &loaded.params;
    let guess = match s0 {
        Some(s) => parse_state(s)?,
        None => default_guess(p),
    };
    let opts = ShootingOptions {
        steps_per_period: steps,
        ..ShootingOptions::default()
    };
    let loc = locate_savanna_orbit(p, guess, &opts)?;
    let rep = rho_tg(p, &loc.anchor, steps)?;
    let mut text = loaded.header;
    let _ = writeln!(text, "# steps per period: {steps}");
    let _ = writeln!(text, "# guess: {},{},{}", guess.t_s, guess.t_ns, guess.g);
    let _ = writeln!(
        text,
        "# orbit: {} (fixed-point iterations {}, Newton steps {}, residual {})",
        loc.kind,
        loc.fixed_point_iterations,
        loc.newton_iterations,
        human_num(loc.residual)
    );
    let _ = writeln!(
        text,
        "# savanna existence condition: {}",
        loc.existence_condition
    );
    if let Some(xi) = rep.xi {
        let moduli: Vec<String> = xi.iter().map(|z| human_num(z.norm())).collect();
        let _ = writeln!(
            text,
            "# analytic grassland multiplier moduli: {}",
            moduli.join(", ")
        );
    }
    let _ = writeln!(text, "{FLOQUET_CSV_HEADER}");
    let _ = writeln!(text, "{}", rep.csv_row());
    emit(&text, args.output.as_deref(), out)
}

fn parse_axes(s: &str) -> Outcome<(Axis, Axis)> {
    let axes: Vec<Axis> = s
        .split(',')
        .map(|a| a.trim().parse::<Axis>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Failure::usage(format!("--axes: {e}")))?;
    match <[Axis; 2]>::try_from(axes) {
        Ok([a, b]) => Ok((a, b)),
        Err(v) => Err(Failure::usage(format!(
            "--axes expects two axes, got {}",
            v.len()
        ))),
    }
}

#[allow(clippy::too_many_arguments)]
fn sweep_cmd(
    args: &ParamArgs,
    axes: &str,
    quantity: &str,
    level: f64,
    curve_output: Option<&Path>,
    sequential: bool,
    steps: usize,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Outcome<()> {
    let (a1, a2) = parse_axes(axes)?;
    let quantity = Quantity::parse(quantity).map_err(|e| Failure::usage(e.to_string()))?;
    if !level.is_finite() {
        return Err(Failure::usage("--level must be finite"));
    }
    if steps == 0 {
        return Err(Failure::usage("--steps must be positive"));
    }
    let loaded = load("sweep", args, err)?;
    if let Some(w) = runtime_warning(quantity, &a1, &a2) {
        let _ = writeln!(err, "warning: {w}");
    }
    let opts = ScanOptions {
        parallel: !sequential,
        floquet_steps: steps,
    };
    let gs = scan(&loaded.params, a1, a2, quantity, &opts)?;
    let mut header = loaded.header;
    let _ = writeln!(header, "# axis1: {}", gs.axis1);
    let _ = writeln!(header, "# axis2: {}", gs.axis2);
    let _ = writeln!(header, "# quantity: {quantity}");
    let mut buf = Vec::new();
    gs.write_csv(&mut buf)
        .map_err(|e| Failure::usage(e.to_string()))?;
    let grid = format!("{header}{}", String::from_utf8_lossy(&buf));
    emit(&grid, args.output.as_deref(), out)?;
    if let Some(path) = curve_output {
        let curve = level_curve(&gs, level);
        let mut text = header;
        let _ = writeln!(text, "# level: {level}");
        let mut buf = Vec::new();
        curve
            .write_csv(&mut buf)
            .map_err(|e| Failure::usage(e.to_string()))?;
        text.push_str(&String::from_utf8_lossy(&buf));
        emit(&text, Some(path), out)?;
    }
    Ok(())
}

fn preset_text(preset: &RegionPreset) -> String {
    let mut text = format!("# region {} ({})\n", preset.id, preset.name);
    for note in &preset.notes {
        let _ = writeln!(text, "# note: {note}");
    }
    for name in ParamName::ALL {
        let _ = write!(text, "{name} = {}", preset.defaults.get(name));
        let spans: Vec<String> = preset
            .ranges_for(name)
            .map(|r| format!("[{}, {}]", r.min, r.max))
            .collect();
        if !spans.is_empty() {
            let _ = write!(text, "  # range {}", spans.join(" or "));
        }
        text.push('\n');
    }
    text
}

fn presets_cmd(region: Option<u8>, output: Option<&Path>, out: &mut dyn Write) -> Outcome<()> {
    let ids: Vec<u8> = match region {
        Some(id) => vec![id],
        None => vec![1, 2, 3],
    };
    let mut blocks = Vec::new();
    for id in ids {
        blocks.push(preset_text(&region_preset(id)?));
    }
    emit(&blocks.join("\n"), output, out)
}

fn dispatch(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Outcome<()> {
    match cli.command {
        Command::Classify { params, format } => classify_cmd(&params, format, out, err),
        Command::Simulate {
            params,
            horizon,
            h,
            scheme,
            s0,
        } => simulate_cmd(&params, horizon, h, scheme, s0.as_deref(), out, err),
        Command::Floquet { params, s0, steps } => {
            floquet_cmd(&params, s0.as_deref(), steps, out, err)
        }
        Command::Sweep {
            params,
            axes,
            quantity,
            level,
            curve_output,
            sequential,
            steps,
        } => sweep_cmd(
            &params,
            &axes,
            &quantity,
            level,
            curve_output.as_deref(),
            sequential,
            steps,
            out,
            err,
        ),
        Command::Presets { region, output } => presets_cmd(region, output.as_deref(), out),
    }
}

/// Runs the command line `args` (program name first) and returns the exit
/// code. Output goes to `out`, diagnostics to `err`.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{}", e.render());
                return EXIT_OK;
            }
            if e.kind() == ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand {
                let _ = write!(err, "{}", e.render());
                return EXIT_USAGE;
            }
            let rendered = e.render().to_string();
            let line = rendered
                .lines()
                .next()
                .unwrap_or("error: invalid arguments");
            let _ = writeln!(err, "{line}");
            return EXIT_USAGE;
        }
    };
    match dispatch(cli, out, err) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

/// [`run_with`] on the process's standard streams.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}
