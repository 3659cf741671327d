//! Command-line front end. [`run`] parses arguments and writes the report to
//! any `Write`, so the binary is a thin wrapper and tests can drive it directly.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

use crate::config::{ConfigError, RunConfig};
use crate::error::ModelError;
use crate::fitting::{self, ColumnMap, FitError, FitReport, SampleTable, UnitMap};
use crate::optimizer::{self, Execution, SweepResult};
use crate::trim::{Battery, ModelBundle, Regime, TrimPoint};

/// Exit status 2.
pub const EXIT_CONFIG: u8 = 2;
/// Exit status 3.
pub const EXIT_INFEASIBLE: u8 = 3;
/// Exit status 4.
pub const EXIT_IO: u8 = 4;

/// 1 A drawn for one second removes 1000/3600 mAh.
const MAH_PER_AS: f64 = 1000.0 / 3600.0;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Model(ModelError),
    #[error("{0}")]
    Fit(FitError),
    #[error("{context}: {source}")]
    Io { context: String, source: io::Error },
    #[error("{0}")]
    Infeasible(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_CONFIG,
            CliError::Config(ConfigError::Io { .. }) => EXIT_IO,
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Model(ModelError::InvalidParameter(_)) => EXIT_CONFIG,
            CliError::Model(_) | CliError::Infeasible(_) => EXIT_INFEASIBLE,
            CliError::Fit(FitError::Io(_)) | CliError::Io { .. } => EXIT_IO,
            CliError::Fit(FitError::Model(ModelError::InvalidParameter(_))) => EXIT_CONFIG,
            CliError::Fit(FitError::Model(_)) => EXIT_INFEASIBLE,
            CliError::Fit(_) => EXIT_CONFIG,
        }
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        CliError::Model(e)
    }
}

impl From<FitError> for CliError {
    fn from(e: FitError) -> Self {
        CliError::Fit(e)
    }
}

fn io_err(context: impl Into<String>) -> impl FnOnce(io::Error) -> CliError {
    let context = context.into();
    move |source| CliError::Io { context, source }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    #[default]
    Text,
}

impl Format {
    fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Text => "txt",
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "liftwing", version, about = "Trim, range and mounting-angle optimization for lifting-wing multirotors")]
pub struct Cli {
    /// JSON run configuration; the built-in defaults are used when absent.
    #[arg(long, global = true, env = "LIFTWING_CONFIG")]
    pub config: Option<PathBuf>,
    /// Directory for report files. Without it reports go to stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Worker threads for the sweep.
    #[arg(long, global = true, value_parser = clap::value_parser!(u32).range(1..))]
    pub jobs: Option<u32>,
    /// Battery capacity override in A·s.
    #[arg(long, global = true, conflicts_with = "capacity_mah")]
    pub capacity: Option<f64>,
    /// Battery capacity override in mAh (×3.6 A·s).
    #[arg(long, global = true)]
    pub capacity_mah: Option<f64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Trim at a mounting angle and either an attack angle or an airspeed.
    Trim(TrimArgs),
    /// Exhaustive (γ, α) sweep for maximum range.
    Sweep(SweepArgs),
    /// Fit a model from sample data and print the config fragment.
    #[command(subcommand)]
    Fit(FitCommand),
    /// Current draw with and without the wing at several airspeeds.
    Compare(CompareArgs),
    /// Hover point with the wing inactive.
    Hover,
}

#[derive(Debug, Args)]
pub struct TrimArgs {
    /// Wing mounting angle γ, deg.
    #[arg(long, allow_negative_numbers = true)]
    pub gamma: f64,
    /// Attack angle α, deg.
    #[arg(long, allow_negative_numbers = true, required_unless_present = "speed", conflicts_with = "speed")]
    pub alpha: Option<f64>,
    /// Airspeed, m/s.
    #[arg(long)]
    pub speed: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Attack-angle safety margin below stall, deg; overrides the config.
    #[arg(long)]
    pub safety_margin: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum FitCommand {
    /// Linear lift and drag from a CSV with columns `alpha:deg,cl:-,cd:-`.
    Aero { input: PathBuf },
    /// Thrust and torque surrogates from a propeller performance table.
    Prop(PropArgs),
    /// ESC current from a CSV with columns `torque:<unit>,current:A`.
    Esc { input: PathBuf },
}

#[derive(Debug, Args)]
pub struct PropArgs {
    pub input: PathBuf,
    #[arg(long, default_value = "V")]
    pub speed_column: String,
    #[arg(long, default_value = "Thrust")]
    pub thrust_column: String,
    #[arg(long, default_value = "Torque")]
    pub torque_column: String,
    #[arg(long, default_value = "mph")]
    pub speed_unit: String,
    #[arg(long, default_value = "lbf")]
    pub thrust_unit: String,
    #[arg(long, default_value = "in-lbf")]
    pub torque_unit: String,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Airspeeds, m/s.
    #[arg(long, value_delimiter = ',', default_values_t = [5.0, 10.0, 15.0])]
    pub speeds: Vec<f64>,
    /// Wing mounting angle, deg; defaults to the config value.
    #[arg(long)]
    pub gamma: Option<f64>,
}

/// Parses `args` (including the program name) and executes the command.
pub fn run<I, T, W>(args: I, stdout: &mut W) -> Result<(), CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
    W: Write,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            write!(stdout, "{e}").map_err(io_err("stdout"))?;
            return Ok(());
        }
        Err(e) => return Err(CliError::Usage(e.to_string())),
    };
    execute(&cli, stdout)
}

pub fn execute<W: Write>(cli: &Cli, stdout: &mut W) -> Result<(), CliError> {
    if let Command::Fit(f) = &cli.command {
        return cmd_fit(cli, f, stdout);
    }
    let cfg = load_config(cli)?;
    match &cli.command {
        Command::Trim(a) => cmd_trim(cli, &cfg, a, stdout),
        Command::Sweep(a) => cmd_sweep(cli, &cfg, a, stdout),
        Command::Compare(a) => cmd_compare(cli, &cfg, a, stdout),
        Command::Hover => cmd_hover(cli, &cfg, stdout),
        Command::Fit(_) => unreachable!(),
    }
}

fn load_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let battery = match (cli.capacity, cli.capacity_mah) {
        (Some(q), _) => Some(Battery::new(q)),
        (None, Some(mah)) => Some(Battery::from_mah(mah)),
        (None, None) => None,
    };
    if let Some(b) = battery {
        cfg.battery = b.map_err(ConfigError::Model)?;
    }
    Ok(cfg)
}

fn execution(cli: &Cli) -> Execution {
    match cli.jobs {
        None => Execution::Parallel,
        Some(1) => Execution::Sequential,
        Some(n) => Execution::Threads(n as usize),
    }
}

/// Sends a report to `<out>/<stem>.<ext>` when `--out` is set, else to stdout.
fn emit<W: Write>(cli: &Cli, stem: &str, body: &str, stdout: &mut W) -> Result<(), CliError> {
    match &cli.out {
        Some(dir) => {
            let path = dir.join(format!("{stem}.{}", cli.format.extension()));
            create_dir(dir)?;
            fs::write(&path, body).map_err(io_err(path.display().to_string()))
        }
        None => stdout.write_all(body.as_bytes()).map_err(io_err("stdout")),
    }
}

fn create_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(io_err(dir.display().to_string()))
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

fn to_csv<T: Serialize>(rows: &[T]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).expect("report serializes");
    }
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("csv is utf-8")
}

/// `name  value` lines with the names padded to a common width.
fn aligned(rows: &[(&str, String)]) -> String {
    let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    let mut s = String::new();
    for (k, v) in rows {
        let _ = writeln!(s, "{k:<width$}  {v}");
    }
    s
}

pub fn trim_text(tp: &TrimPoint) -> String {
    let regime = match tp.regime {
        Regime::Hover => "hover",
        Regime::Cruise => "cruise",
    };
    aligned(&[
        ("regime", regime.to_string()),
        ("gamma_deg", tp.gamma.to_string()),
        ("alpha_deg", tp.alpha.to_string()),
        ("theta_deg", tp.theta.to_string()),
        ("airspeed_m_s", format!("{:.4}", tp.airspeed)),
        ("thrust_per_rotor_N", format!("{:.4}", tp.thrust_per_rotor)),
        ("rpm", format!("{:.1}", tp.rpm)),
        ("torque_per_rotor_Nm", format!("{:.5}", tp.torque_per_rotor)),
        ("current_per_esc_A", format!("{:.4}", tp.current_per_esc)),
        ("total_current_A", format!("{:.4}", tp.total_current)),
        ("endurance_s", format!("{:.1}", tp.endurance)),
        ("range_m", format!("{:.1}", tp.range)),
    ])
}

fn render_trim(format: Format, tp: &TrimPoint) -> String {
    match format {
        Format::Json => to_json(tp),
        Format::Csv => to_csv(std::slice::from_ref(tp)),
        Format::Text => trim_text(tp),
    }
}

fn cmd_trim<W: Write>(cli: &Cli, cfg: &RunConfig, a: &TrimArgs, stdout: &mut W) -> Result<(), CliError> {
    let bundle = cfg.bundle();
    let tp = match (a.alpha, a.speed) {
        (Some(alpha), _) => bundle.solve_trim(a.gamma, alpha)?,
        (None, Some(v)) => bundle.trim_at_speed(a.gamma, v)?,
        (None, None) => return Err(CliError::Usage("one of --alpha or --speed is required".into())),
    };
    emit(cli, "trim", &render_trim(cli.format, &tp), stdout)?;
    if tp.regime == Regime::Hover {
        return Err(CliError::Model(ModelError::HoverDegenerate));
    }
    Ok(())
}

fn cmd_hover<W: Write>(cli: &Cli, cfg: &RunConfig, stdout: &mut W) -> Result<(), CliError> {
    let tp = cfg.bundle().hover()?;
    emit(cli, "hover", &render_trim(cli.format, &tp), stdout)
}

/// Runs the configured sweep with an optional safety-margin override.
pub fn run_sweep(cfg: &RunConfig, margin: Option<f64>, exec: Execution) -> Result<SweepResult, ModelError> {
    let result = optimizer::sweep(&cfg.bundle(), &cfg.effective_grid(), exec)?;
    match margin {
        Some(m) => optimizer::apply_alpha_cap(result, cfg.airframe.stall_alpha, m),
        None => Ok(result),
    }
}

fn curve_file_name(alpha: f64) -> String {
    format!("curve_alpha_{alpha}.csv")
}

/// Writes `cells.csv`, one `curve_alpha_<α>.csv` per grid α and `summary.json` into `dir`.
pub fn write_sweep_files(result: &SweepResult, dir: &Path) -> Result<(), CliError> {
    create_dir(dir)?;
    let create = |name: &str| -> Result<BufWriter<File>, CliError> {
        let path = dir.join(name);
        File::create(&path)
            .map(BufWriter::new)
            .map_err(io_err(path.display().to_string()))
    };
    let finish = |mut w: BufWriter<File>, name: &str| w.flush().map_err(io_err(name.to_string()));

    let mut w = create("cells.csv")?;
    optimizer::write_cells_csv(result, &mut w).map_err(io_err("cells.csv"))?;
    finish(w, "cells.csv")?;
    for j in 0..result.grid.alpha_len()? {
        let alpha = result.grid.alpha_at(j);
        let name = curve_file_name(alpha);
        let curve = optimizer::curve_extract(result, alpha)?;
        let mut w = create(&name)?;
        optimizer::write_curve_csv(&curve, &mut w).map_err(io_err(name.clone()))?;
        finish(w, &name)?;
    }
    let mut w = create("summary.json")?;
    w.write_all(to_json(&result.summary()).as_bytes())
        .map_err(io_err("summary.json"))?;
    finish(w, "summary.json")
}

fn cmd_sweep<W: Write>(cli: &Cli, cfg: &RunConfig, a: &SweepArgs, stdout: &mut W) -> Result<(), CliError> {
    let result = run_sweep(cfg, a.safety_margin, execution(cli))?;
    if let Some(dir) = &cli.out {
        write_sweep_files(&result, dir)?;
    }
    let s = result.summary();
    let body = match cli.format {
        Format::Json => to_json(&s),
        Format::Csv => {
            let mut buf = Vec::new();
            optimizer::write_cells_csv(&result, &mut buf).map_err(io_err("cells"))?;
            String::from_utf8(buf).expect("csv is utf-8")
        }
        Format::Text => aligned(&[
            ("gamma_deg", s.gamma_deg.to_string()),
            ("alpha_deg", s.alpha_deg.to_string()),
            ("theta_deg", s.theta_deg.to_string()),
            ("airspeed_m_s", format!("{:.4}", s.airspeed_m_s)),
            ("range_m", format!("{:.1}", s.range_m)),
            ("endurance_s", format!("{:.1}", s.endurance_s)),
            ("rpm", format!("{:.1}", s.rpm)),
            ("total_current_A", format!("{:.4}", s.total_current_a)),
            ("alpha_cap_deg", s.alpha_cap_deg.to_string()),
            ("feasible_cells", format!("{} / {}", s.feasible_cells, s.total_cells)),
        ]),
    };
    stdout.write_all(body.as_bytes()).map_err(io_err("stdout"))
}

/// One airspeed of the wing/wingless comparison. Currents are totals over all ESCs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareRow {
    pub speed_m_s: f64,
    #[serde(rename = "wing_current_A")]
    pub wing_current_a: Option<f64>,
    pub wing_mah_per_s: Option<f64>,
    #[serde(rename = "wingless_current_A")]
    pub wingless_current_a: Option<f64>,
    pub wingless_mah_per_s: Option<f64>,
    /// `100·(I_wingless − I_wing)/I_wingless`.
    pub saving_percent: Option<f64>,
    /// `ok`, or the reason a side failed.
    pub status: String,
}

impl CompareRow {
    pub fn is_ok(&self) -> bool {
        self.saving_percent.is_some()
    }
}

/// Wing trim at mounting angle `gamma` against the wingless body with drag area `f`.
pub fn compare_rows(bundle: &ModelBundle, gamma: f64, f: f64, speeds: &[f64]) -> Vec<CompareRow> {
    speeds
        .iter()
        .map(|&v| {
            let wing = bundle.trim_at_speed(gamma, v);
            let bare = bundle.wingless_trim_at_speed(f, v);
            let iw = wing.as_ref().ok().map(|t| t.total_current);
            let ib = bare.as_ref().ok().map(|t| t.total_current);
            let status = match (&wing, &bare) {
                (Ok(_), Ok(_)) => "ok".to_string(),
                (Err(e), Ok(_)) => format!("wing: {e}"),
                (Ok(_), Err(e)) => format!("wingless: {e}"),
                (Err(a), Err(b)) => format!("wing: {a}; wingless: {b}"),
            };
            CompareRow {
                speed_m_s: v,
                wing_current_a: iw,
                wing_mah_per_s: iw.map(|i| i * MAH_PER_AS),
                wingless_current_a: ib,
                wingless_mah_per_s: ib.map(|i| i * MAH_PER_AS),
                saving_percent: iw.zip(ib).map(|(w, b)| 100.0 * (b - w) / b),
                status,
            }
        })
        .collect()
}

fn opt(v: Option<f64>, prec: usize) -> String {
    v.map_or_else(|| "-".into(), |x| format!("{x:.prec$}"))
}

fn cmd_compare<W: Write>(cli: &Cli, cfg: &RunConfig, a: &CompareArgs, stdout: &mut W) -> Result<(), CliError> {
    let gamma = a.gamma.unwrap_or(cfg.flags.compare_mounting_angle_deg);
    let rows = compare_rows(&cfg.bundle(), gamma, cfg.flags.parasite_drag_area_m2, &a.speeds);
    let body = match cli.format {
        Format::Json => to_json(&rows),
        Format::Csv => to_csv(&rows),
        Format::Text => {
            let mut s = format!(
                "current draw (A and mAh/s, not watts), wing at gamma = {gamma} deg vs wingless, f = {} m^2\n",
                cfg.flags.parasite_drag_area_m2
            );
            let _ = writeln!(
                s,
                "{:>8}  {:>10}  {:>10}  {:>12}  {:>12}  {:>9}  status",
                "V_m_s", "wing_A", "wing_mAh/s", "wingless_A", "wingless_mAh/s", "saving_%"
            );
            for r in &rows {
                let _ = writeln!(
                    s,
                    "{:>8}  {:>10}  {:>10}  {:>12}  {:>12}  {:>9}  {}",
                    r.speed_m_s,
                    opt(r.wing_current_a, 3),
                    opt(r.wing_mah_per_s, 3),
                    opt(r.wingless_current_a, 3),
                    opt(r.wingless_mah_per_s, 3),
                    opt(r.saving_percent, 2),
                    r.status
                );
            }
            s
        }
    };
    emit(cli, "compare", &body, stdout)?;
    if rows.iter().any(CompareRow::is_ok) {
        Ok(())
    } else {
        Err(CliError::Infeasible("no airspeed trimmed in both configurations".into()))
    }
}

fn open(path: &Path) -> Result<BufReader<File>, CliError> {
    File::open(path)
        .map(BufReader::new)
        .map_err(io_err(path.display().to_string()))
}

fn report_text(name: &str, r: &FitReport) -> String {
    let mut s = format!("{name}: n = {}, R^2 = {:.8}", r.sample_count, r.r_squared);
    if let Some(p) = r.pearson_r {
        let _ = write!(s, ", r = {p:.8}");
    }
    let _ = writeln!(s, ", max |residual| = {:.3e}", r.max_abs_residual);
    for (b, c) in r.basis.iter().zip(&r.coefficients) {
        let _ = writeln!(s, "  {b:<12} {c:.10e}");
    }
    s
}

fn fit_body(format: Format, fragment: serde_json::Value, reports: &[(&str, &FitReport)]) -> String {
    match format {
        Format::Text => reports.iter().map(|(n, r)| report_text(n, r)).collect(),
        Format::Json => {
            let mut doc = serde_json::Map::new();
            doc.insert("config".into(), fragment);
            let reps = reports
                .iter()
                .map(|(n, r)| ((*n).to_string(), serde_json::to_value(r).expect("report serializes")))
                .collect();
            doc.insert("reports".into(), serde_json::Value::Object(reps));
            to_json(&doc)
        }
        Format::Csv => {
            let mut s = String::from("model,basis,coefficient,r_squared\n");
            for (n, r) in reports {
                for (b, c) in r.basis.iter().zip(&r.coefficients) {
                    let _ = writeln!(s, "{n},{b},{c:e},{}", r.r_squared);
                }
            }
            s
        }
    }
}

fn json<T: Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("model serializes")
}

fn cmd_fit<W: Write>(cli: &Cli, cmd: &FitCommand, stdout: &mut W) -> Result<(), CliError> {
    let (stem, body) = match cmd {
        FitCommand::Aero { input } => {
            let fit = fitting::fit_linear_aero(&SampleTable::from_csv(open(input)?)?)?;
            let frag = serde_json::json!({ "aero": json(&fit.model) });
            ("fit_aero", fit_body(cli.format, frag, &[("lift", &fit.lift), ("drag", &fit.drag)]))
        }
        FitCommand::Esc { input } => {
            let (esc, rep) = fitting::fit_esc_quadratic(&SampleTable::from_csv(open(input)?)?)?;
            let frag = serde_json::json!({ "esc": json(&esc) });
            ("fit_esc", fit_body(cli.format, frag, &[("esc", &rep)]))
        }
        FitCommand::Prop(p) => {
            let columns = ColumnMap {
                speed: p.speed_column.clone(),
                thrust: p.thrust_column.clone(),
                torque: p.torque_column.clone(),
            };
            let units = UnitMap::parse(&p.speed_unit, &p.thrust_unit, &p.torque_unit)?;
            let table = fitting::parse_propeller_table(open(&p.input)?, &columns, &units)?;
            let (thrust, tr) = fitting::fit_poly_surrogate(&table, &fitting::THRUST_BASIS, "thrust")?;
            let (torque, qr) = fitting::fit_poly_surrogate(&table, &fitting::TORQUE_BASIS, "torque")?;
            let source = p.input.file_name().map(|n| n.to_string_lossy().into_owned());
            let thrust = thrust.with_provenance(source.as_ref().map(|s| format!("least-squares fit of {s}")));
            let torque = torque.with_provenance(source.map(|s| format!("least-squares fit of {s}")));
            let frag = serde_json::json!({
                "thrust_surrogate": json(&thrust),
                "torque_surrogate": json(&torque),
            });
            ("fit_prop", fit_body(cli.format, frag, &[("thrust", &tr), ("torque", &qr)]))
        }
    };
    emit(cli, stem, &body, stdout)
}
