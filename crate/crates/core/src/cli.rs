//! Command-line front end: JSON run configuration, subcommand dispatch and
//! deterministic CSV/JSON emission.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::analysis::{
    find_fixed_points, reproduce_figure, solve, sweep, Cell, Diagnostics, FigureId, FigureOptions, FixedPointOptions,
    FixedPointRecord, Headline, Resource, Scenario, SweepAxis, Table, DEFAULT_ROOT_TOL, DEFAULT_SPREAD_SAMPLES,
};
use crate::dynamics::{GMapping, ReservoirSpec, Statistics};
use crate::error::{Error, Result};
use crate::model::SystemParams;
use crate::state::DEFAULT_POSITIVITY_TOL;
use crate::teleport::{fidelity_report, teleport_oracle, FidelityReport, InputState, Protocol, DEFAULT_QUADRATURE_ORDER};

pub const UNITS: &str = "hbar = k_B = 1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    #[default]
    Steady,
    Evolve,
    Sweep,
    FixedPoint,
    Reproduce,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    pub epsilon_a: f64,
    pub epsilon_b: f64,
    pub lambda: f64,
}

/// One reservoir; give either the rate `gamma` or the raw coupling `g`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReservoirConfig {
    pub statistics: Statistics,
    pub temperature: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReservoirsConfig {
    pub a: ReservoirConfig,
    pub b: ReservoirConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputConfig {
    pub theta: f64,
    pub phi: f64,
}

impl Default for InputConfig {
    fn default() -> Self {
        InputConfig {
            theta: std::f64::consts::FRAC_PI_2,
            phi: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolveConfig {
    pub time: f64,
    /// Bell label of the initial state.
    #[serde(default = "default_initial")]
    pub initial: String,
}

fn default_initial() -> String {
    "00".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub axes: Vec<SweepAxis>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixedPointConfig {
    pub axis: SweepAxis,
    pub protocol: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub positivity_tol: f64,
    pub root_tol: f64,
    pub axis_tol: f64,
    pub coherence_tol: f64,
    pub quadrature_order: usize,
    pub spread_samples: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        let fp = FixedPointOptions::default();
        Tolerances {
            positivity_tol: DEFAULT_POSITIVITY_TOL,
            root_tol: DEFAULT_ROOT_TOL,
            axis_tol: fp.axis_tol,
            coherence_tol: fp.coherence_tol,
            quadrature_order: DEFAULT_QUADRATURE_ORDER,
            spread_samples: DEFAULT_SPREAD_SAMPLES,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Resolution {
    pub count_1d: usize,
    pub count_2d: usize,
    pub time_count: usize,
}

impl Default for Resolution {
    fn default() -> Self {
        let f = FigureOptions::default();
        Resolution {
            count_1d: f.count_1d,
            count_2d: f.count_2d,
            time_count: f.time_count,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub mode: Mode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub system: Option<SystemConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reservoirs: Option<ReservoirsConfig>,
    #[serde(default)]
    pub g_mapping: GMapping,
    /// "auto" or a Bell label such as "11".
    #[serde(default = "default_protocol")]
    pub protocol: String,
    #[serde(default)]
    pub input: InputConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub evolve: Option<EvolveConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixed_point: Option<FixedPointConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub figure: Option<FigureId>,
    #[serde(default)]
    pub resolution: Resolution,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

fn default_protocol() -> String {
    "auto".into()
}

impl Default for RunConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("empty config uses defaults")
    }
}

fn semantic(e: Error) -> Error {
    match e {
        Error::InvalidParameter { name, reason } => Error::Semantic(format!("{name}: {reason}")),
        other => other,
    }
}

/// Parses a JSON run configuration, filling defaults and validating it.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let cfg: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| Error::Schema {
        path: e.path().to_string(),
        message: e.inner().to_string(),
    })?;
    cfg.validate()?;
    Ok(cfg)
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        self.protocol_choice()?;
        if let Some(r) = &self.reservoirs {
            for (side, res) in [("a", &r.a), ("b", &r.b)] {
                if res.gamma.is_some() == res.g.is_some() {
                    return Err(Error::Semantic(format!("reservoir {side}: give exactly one of gamma or g")));
                }
                if res.statistics == Statistics::Bosonic && res.mu.unwrap_or(0.0) != 0.0 {
                    return Err(Error::Semantic(format!("reservoir {side}: bosonic reservoirs need mu = 0")));
                }
                self.reservoir(res).map_err(semantic)?;
            }
            if r.a.statistics != r.b.statistics {
                return Err(Error::Semantic("both reservoirs must share the same statistics".into()));
            }
        }
        if let Some(s) = &self.system {
            SystemParams::new(s.epsilon_a, s.epsilon_b, s.lambda).map_err(semantic)?;
        }
        if let Some(e) = &self.evolve {
            e.initial.parse::<Protocol>().map_err(semantic)?;
            if !(e.time >= 0.0 && e.time.is_finite()) {
                return Err(Error::Semantic(format!("evolve.time must be finite and >= 0, got {}", e.time)));
            }
        }
        if let Some(fp) = &self.fixed_point {
            fp.protocol.parse::<Protocol>().map_err(semantic)?;
            fp.axis.validate().map_err(semantic)?;
        }
        if let Some(sw) = &self.sweep {
            if sw.axes.is_empty() || sw.axes.len() > 2 {
                return Err(Error::Semantic(format!("sweep needs 1 or 2 axes, got {}", sw.axes.len())));
            }
            for a in &sw.axes {
                a.validate().map_err(semantic)?;
            }
        }
        let t = &self.tolerances;
        if !(t.positivity_tol >= 0.0 && t.root_tol > 0.0 && t.axis_tol > 0.0 && t.coherence_tol >= 0.0) {
            return Err(Error::Semantic("tolerances must be non-negative (root and axis tolerances positive)".into()));
        }
        if t.quadrature_order == 0 {
            return Err(Error::Semantic("quadrature_order must be positive".into()));
        }
        InputState::new(self.input.theta, self.input.phi).map_err(semantic)?;
        let needs_model = matches!(self.mode, Mode::Steady | Mode::Evolve | Mode::Sweep | Mode::FixedPoint);
        if needs_model && (self.system.is_none() || self.reservoirs.is_none()) {
            return Err(Error::Semantic("this mode needs `system` and `reservoirs`".into()));
        }
        match self.mode {
            Mode::Evolve if self.evolve.is_none() => Err(Error::Semantic("evolve mode needs an `evolve` section".into())),
            Mode::Sweep if self.sweep.is_none() => Err(Error::Semantic("sweep mode needs a `sweep` section".into())),
            Mode::FixedPoint if self.fixed_point.is_none() => {
                Err(Error::Semantic("fixed-point mode needs a `fixed_point` section".into()))
            }
            Mode::Reproduce if self.figure.is_none() => Err(Error::Semantic("reproduce mode needs `figure`".into())),
            _ => Ok(()),
        }
    }

    /// None means automatic selection.
    pub fn protocol_choice(&self) -> Result<Option<Protocol>> {
        if self.protocol == "auto" {
            Ok(None)
        } else {
            self.protocol.parse().map(Some).map_err(semantic)
        }
    }

    fn reservoir(&self, r: &ReservoirConfig) -> Result<ReservoirSpec> {
        let gamma = match (r.gamma, r.g) {
            (Some(gamma), _) => gamma,
            (None, Some(g)) => self.g_mapping.gamma(g),
            (None, None) => return Err(Error::Semantic("give exactly one of gamma or g".into())),
        };
        ReservoirSpec::new(r.statistics, r.temperature, r.mu.unwrap_or(0.0), gamma)
    }

    pub fn scenario(&self) -> Result<Scenario> {
        let (Some(s), Some(r)) = (&self.system, &self.reservoirs) else {
            return Err(Error::Semantic("`system` and `reservoirs` are required".into()));
        };
        let system = SystemParams::new(s.epsilon_a, s.epsilon_b, s.lambda)?;
        let mut sc = Scenario::from_absolute(&system, &self.reservoir(&r.a)?, &self.reservoir(&r.b)?)?;
        sc.phi = self.input.phi;
        sc.positivity_tol = self.tolerances.positivity_tol;
        sc.quadrature_order = self.tolerances.quadrature_order;
        if let Some(e) = &self.evolve {
            sc.resource = Resource::Transient {
                time: e.time,
                initial: e.initial.parse()?,
            };
        }
        Ok(sc)
    }

    pub fn fixed_point_options(&self) -> FixedPointOptions {
        FixedPointOptions {
            root_tol: self.tolerances.root_tol,
            axis_tol: self.tolerances.axis_tol,
            coherence_tol: self.tolerances.coherence_tol,
            spread_samples: self.tolerances.spread_samples,
            seed: self.seed,
        }
    }

    pub fn figure_options(&self) -> FigureOptions {
        FigureOptions {
            mapping: self.g_mapping,
            seed: self.seed,
            count_1d: self.resolution.count_1d,
            count_2d: self.resolution.count_2d,
            time_count: self.resolution.time_count,
            quadrature_order: self.tolerances.quadrature_order,
            positivity_tol: self.tolerances.positivity_tol,
            fixed: self.fixed_point_options(),
        }
    }

    /// SHA-256 of the canonical JSON form, printed in every output header.
    /// Hash of the physics-relevant configuration; the output path is left out.
    pub fn digest(&self) -> String {
        let canonical = serde_json::to_string(&RunConfig {
            output: None,
            ..self.clone()
        })
        .expect("config serializes");
        hex::encode(Sha256::digest(canonical.as_bytes()))
    }
}

/// JSON summary of a single solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateSummary {
    pub mode: Mode,
    pub config_sha256: String,
    pub units: String,
    pub time: Option<f64>,
    /// Local-basis density matrix, real and imaginary parts, row major.
    pub rho_re: [[f64; 4]; 4],
    pub rho_im: [[f64; 4]; 4],
    pub protocol: Protocol,
    pub protocol_label: String,
    pub protocol_automatic: bool,
    pub fidelity: f64,
    pub average_fidelity: f64,
    pub report: FidelityReport,
    pub diagnostics: Diagnostics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixedPointSummary {
    pub config_sha256: String,
    pub units: String,
    pub records: Vec<FixedPointRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FigureSummary {
    pub figure: FigureId,
    pub config_sha256: String,
    pub units: String,
    pub g_mapping: GMapping,
    pub seed: u64,
    pub failures: usize,
    pub files: Vec<String>,
    pub headlines: Vec<Headline>,
}

pub fn state_summary(cfg: &RunConfig) -> Result<StateSummary> {
    let sc = cfg.scenario()?;
    let solved = solve(&sc)?;
    let input = InputState::new(cfg.input.theta, cfg.input.phi)?;
    let report = fidelity_report(&solved.local, &input, sc.quadrature_order)?;
    let automatic = cfg.protocol_choice()?.is_none();
    let protocol = cfg.protocol_choice()?.unwrap_or(report.selected);
    let m = solved.local.matrix;
    Ok(StateSummary {
        mode: cfg.mode,
        config_sha256: cfg.digest(),
        units: UNITS.into(),
        time: match sc.resource {
            Resource::Transient { time, .. } => Some(time),
            Resource::Steady => None,
        },
        rho_re: std::array::from_fn(|i| std::array::from_fn(|j| m[(i, j)].re)),
        rho_im: std::array::from_fn(|i| std::array::from_fn(|j| m[(i, j)].im)),
        protocol,
        protocol_label: protocol.to_string(),
        protocol_automatic: automatic,
        fidelity: teleport_oracle(&solved.local, &input, protocol)?,
        average_fidelity: report.protocols[protocol.index()].average,
        report,
        diagnostics: solved.diagnostics,
    })
}

pub fn format_float(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{v:.16e}")
    }
}

pub fn write_csv<W: Write>(out: &mut W, table: &Table, header: &[(String, String)]) -> io::Result<()> {
    for (k, v) in header {
        writeln!(out, "# {k}: {v}")?;
    }
    writeln!(out, "{}", table.columns.join(","))?;
    for row in &table.rows {
        let cells: Vec<String> = row
            .iter()
            .map(|c| match c {
                Cell::Num(v) => format_float(*v),
                Cell::Text(s) => s.clone(),
            })
            .collect();
        writeln!(out, "{}", cells.join(","))?;
    }
    Ok(())
}

fn csv_header(cfg: &RunConfig, extra: &[(&str, String)]) -> Vec<(String, String)> {
    let mut h = vec![
        ("generator".to_string(), format!("redfield-teleport {}", env!("CARGO_PKG_VERSION"))),
        ("units".into(), UNITS.into()),
        ("config_sha256".into(), cfg.digest()),
        ("seed".into(), cfg.seed.to_string()),
        ("g_mapping".into(), cfg.g_mapping.name().into()),
    ];
    h.extend(extra.iter().map(|(k, v)| (k.to_string(), v.clone())));
    h
}

fn progress(event: &str, fields: serde_json::Value) {
    let mut obj = serde_json::json!({ "event": event });
    if let (Some(o), serde_json::Value::Object(extra)) = (obj.as_object_mut(), fields) {
        o.extend(extra);
    }
    eprintln!("{obj}");
}

fn write_output(path: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir)?;
            }
            fs::write(p, bytes)?;
        }
        None => io::stdout().write_all(bytes)?,
    }
    Ok(())
}

fn json_bytes<T: Serialize>(v: &T) -> Vec<u8> {
    let mut s = serde_json::to_vec_pretty(v).expect("summary serializes");
    s.push(b'\n');
    s
}

/// Outcome of a run: 0 clean, 2 when some grid points failed.
pub fn run(cfg: &RunConfig) -> Result<i32> {
    cfg.validate()?;
    let out = cfg.output.as_deref();
    match cfg.mode {
        Mode::Steady | Mode::Evolve => {
            let summary = state_summary(cfg)?;
            write_output(out, &json_bytes(&summary))?;
            Ok(0)
        }
        Mode::Sweep => {
            let axes = &cfg.sweep.as_ref().expect("validated").axes;
            let points: usize = axes.iter().map(|a| a.count).product();
            progress("start", serde_json::json!({ "mode": "sweep", "points": points }));
            let res = sweep(&cfg.scenario()?, axes)?;
            let mut buf = Vec::new();
            write_csv(&mut buf, &res.to_table(), &csv_header(cfg, &[]))?;
            write_output(out, &buf)?;
            let failures = res.failures();
            progress("done", serde_json::json!({ "mode": "sweep", "points": points, "failures": failures }));
            Ok(if failures > 0 { 2 } else { 0 })
        }
        Mode::FixedPoint => {
            let fp = cfg.fixed_point.as_ref().expect("validated");
            let records = find_fixed_points(&cfg.scenario()?, &fp.axis, fp.protocol.parse()?, &cfg.fixed_point_options())?;
            progress("done", serde_json::json!({ "mode": "fixed-point", "roots": records.len() }));
            let summary = FixedPointSummary {
                config_sha256: cfg.digest(),
                units: UNITS.into(),
                records,
            };
            write_output(out, &json_bytes(&summary))?;
            Ok(0)
        }
        Mode::Reproduce => {
            let id = cfg.figure.expect("validated");
            progress("start", serde_json::json!({ "mode": "reproduce", "figure": id.name() }));
            let fig = reproduce_figure(id, &cfg.figure_options())?;
            let dir = out.map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from("."));
            fs::create_dir_all(&dir)?;
            let mut files = Vec::new();
            for t in &fig.tables {
                let name = if t.name == "main" {
                    format!("{id}.csv")
                } else {
                    format!("{id}_{}.csv", t.name)
                };
                let mut buf = Vec::new();
                write_csv(&mut buf, &t.table, &csv_header(cfg, &[("figure", id.name().into()), ("table", t.name.clone())]))?;
                fs::write(dir.join(&name), buf)?;
                files.push(name);
            }
            let summary = FigureSummary {
                figure: id,
                config_sha256: cfg.digest(),
                units: UNITS.into(),
                g_mapping: cfg.g_mapping,
                seed: cfg.seed,
                failures: fig.failures,
                files,
                headlines: fig.headlines,
            };
            fs::write(dir.join(format!("{id}_summary.json")), json_bytes(&summary))?;
            for h in &summary.headlines {
                progress(
                    "headline",
                    serde_json::json!({ "figure": id.name(), "name": h.name, "value": h.value, "reference": h.reference, "pass": h.pass }),
                );
            }
            Ok(if fig.failures > 0 { 2 } else { 0 })
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "redfield-teleport", version, about = "Teleportation through two qubits coupled to non-equilibrium reservoirs")]
pub struct Cli {
    /// JSON run configuration
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output file (directory for `reproduce`)
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for sweeps; results do not depend on it
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true, value_parser = ["identity", "square", "pi-square"])]
    pub g_mapping: Option<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Steady state and fidelity report
    Steady,
    /// Propagate a Bell state for time t
    Evolve {
        #[arg(long = "t")]
        t: f64,
        /// Bell label of the initial state
        #[arg(long)]
        initial: Option<String>,
    },
    /// Grid sweep from the config's `sweep` section
    Sweep,
    /// Fixed points along the config's `fixed_point` axis
    FixedPoint,
    /// Regenerate a figure dataset
    Reproduce { figure: String },
}

/// Merges the command line into the configuration file.
pub fn resolve(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(p) => parse_config(&fs::read_to_string(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?)?,
        None => RunConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(m) = &cli.g_mapping {
        cfg.g_mapping = m.parse()?;
    }
    if let Some(o) = &cli.out {
        cfg.output = Some(o.clone());
    }
    match &cli.command {
        Command::Steady => {
            cfg.mode = Mode::Steady;
            cfg.evolve = None;
        }
        Command::Evolve { t, initial } => {
            cfg.mode = Mode::Evolve;
            let initial = initial
                .clone()
                .or_else(|| cfg.evolve.as_ref().map(|e| e.initial.clone()))
                .unwrap_or_else(default_initial);
            cfg.evolve = Some(EvolveConfig { time: *t, initial });
        }
        Command::Sweep => cfg.mode = Mode::Sweep,
        Command::FixedPoint => cfg.mode = Mode::FixedPoint,
        Command::Reproduce { figure } => {
            cfg.mode = Mode::Reproduce;
            cfg.figure = Some(figure.parse()?);
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Entry point used by the binary; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            progress("error", serde_json::json!({ "kind": "Threads", "message": e.to_string() }));
            return 1;
        }
    }
    match resolve(&cli).and_then(|cfg| run(&cfg)) {
        Ok(code) => code,
        Err(e) => {
            progress("error", serde_json::json!({ "kind": e.tag(), "message": e.to_string() }));
            1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIG2: &str = r#"{
        "system": {"epsilon_a": 10, "epsilon_b": 10, "lambda": 30},
        "reservoirs": {
            "a": {"statistics": "bosonic", "temperature": 2, "g": 0.05},
            "b": {"statistics": "bosonic", "temperature": 2, "g": 0.05}
        }
    }"#;

    #[test]
    fn minimal_config_defaults() {
        let cfg = parse_config(FIG2).unwrap();
        assert_eq!(cfg.mode, Mode::Steady);
        assert_eq!(cfg.seed, 0);
        assert_eq!(cfg.g_mapping, GMapping::PiSquare);
        assert_eq!(cfg.tolerances.positivity_tol, 1e-8);
        assert_eq!(cfg.tolerances.root_tol, 1e-9);
        assert_eq!(cfg.tolerances.quadrature_order, 64);
        assert_eq!(cfg.protocol_choice().unwrap(), None);
    }

    #[test]
    fn schema_errors_carry_paths() {
        let bad = FIG2.replace("\"lambda\": 30", "\"lambda\": 30, \"extra\": 1");
        match parse_config(&bad) {
            Err(Error::Schema { path, .. }) => assert_eq!(path, "system.extra"),
            other => panic!("{other:?}"),
        }
        let bad = FIG2.replacen("\"temperature\": 2", "\"temperature\": \"hot\"", 1);
        match parse_config(&bad) {
            Err(Error::Schema { path, .. }) => assert_eq!(path, "reservoirs.a.temperature"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn semantic_errors() {
        let neg = FIG2.replacen("\"temperature\": 2", "\"temperature\": -1", 1);
        assert!(matches!(parse_config(&neg), Err(Error::Semantic(_))));
        let mu = FIG2.replacen("\"g\": 0.05", "\"g\": 0.05, \"mu\": 1", 1);
        assert!(matches!(parse_config(&mu), Err(Error::Semantic(_))));
        let both = FIG2.replacen("\"g\": 0.05", "\"g\": 0.05, \"gamma\": 0.1", 1);
        assert!(matches!(parse_config(&both), Err(Error::Semantic(_))));
        let sweep = FIG2.replacen("{", "{\"mode\": \"sweep\",", 1);
        assert!(matches!(parse_config(&sweep), Err(Error::Semantic(_))));
    }

    #[test]
    fn steady_summary_selects_11_and_round_trips() {
        let cfg = parse_config(FIG2).unwrap();
        let s = state_summary(&cfg).unwrap();
        assert_eq!(s.protocol, Protocol::ALL[3]);
        assert!(s.protocol_automatic);
        let text = String::from_utf8(json_bytes(&s)).unwrap();
        let back: StateSummary = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s);
        assert_eq!(s, state_summary(&cfg).unwrap());
    }

    #[test]
    fn digest_ignores_nothing_but_formatting() {
        let a = parse_config(FIG2).unwrap();
        let b = parse_config(&FIG2.replace('\n', " ")).unwrap();
        assert_eq!(a.digest(), b.digest());
        let mut c = a.clone();
        c.seed = 1;
        assert_ne!(a.digest(), c.digest());
    }

    #[test]
    fn float_format_has_17_digits() {
        assert_eq!(format_float(0.1), "1.0000000000000001e-1");
        assert_eq!(format_float(f64::NAN), "NaN");
        let v: f64 = format_float(std::f64::consts::PI).parse().unwrap();
        assert_eq!(v, std::f64::consts::PI);
    }
}
