//! Subcommands of the `causal-pathways` binary.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use causal_pathways_core::discovery::{build_graph, DiscoveryConfig};
use causal_pathways_core::linear_effects::{
    causal_effect, mediated_causal_effect, path_coefficient, path_sum_effect, LinearEffectResult, StationaryCovariance,
};
use causal_pathways_core::measures::{MeasureKind, MeasurePlan};
use causal_pathways_core::netmetrics::{betweenness_from_triples, interaction_triples, CibOptions};
use causal_pathways_core::simulate::{
    ensemble_stats, implied_graph, model_four_region, model_xwy, model_xwy_nonlinear, simulate, StructuralModel,
};
use causal_pathways_core::{ConditionKind, Error as CoreError, EstimatorConfig, Link, NodeRef, TimeSeriesDataset, TimeSeriesGraph};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::config::{load_config, Options};
use crate::csv_io::{load_csv, write_csv};
use crate::error::{AppError, Context, Result};
use crate::graph_file::{format_graph, parse_graph};
use crate::model_file::{format_model, parse_model};
use crate::report::{write_cib, write_discovery, write_measures, CibRow, MeasureRow};
use crate::validation::{self, ValidationConfig};

#[derive(Debug, Parser)]
#[command(name = "causal-pathways", version, about = "Causal pathway analysis of multivariate time series")]
pub struct Cli {
    /// TOML file with default options; command-line flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub options: Options,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate a builtin or file-defined model; writes data, graph and model.
    Simulate(SimulateArgs),
    /// Reconstruct the time series graph from data.
    Discover,
    /// Estimate information-theoretic or linear measures.
    Measure,
    /// List causal paths, path nodes, sidepath neighbors and condition sets.
    Paths,
    /// Check estimators and identities against analytic oracles.
    Validate(ValidateArgs),
    /// Causal interaction betweenness of each variable.
    Cib(CibArgs),
    /// Ensemble measure surfaces over model parameter grids.
    Surface(SurfaceArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Simulate(_) => "simulate",
            Command::Discover => "discover",
            Command::Measure => "measure",
            Command::Paths => "paths",
            Command::Validate(_) => "validate",
            Command::Cib(_) => "cib",
            Command::Surface(_) => "surface",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Builtin {
    /// Linear X -> W -> Y triple with direct X -> Y link.
    Xwy,
    /// Triple with a multiplicative X * W driver of Y.
    XwyNonlinear,
    /// Four coupled regions A, B, C, D with correlated innovations.
    FourRegion,
}

#[derive(Debug, Clone, clap::Args, Serialize)]
pub struct SimulateArgs {
    /// Builtin model; use --model for a spec file instead.
    #[arg(value_enum)]
    pub builtin: Option<Builtin>,
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    pub a: f64,
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    pub b: f64,
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    pub c: f64,
    /// Series length.
    #[arg(short = 'T', long = "length", default_value_t = 10_000)]
    pub length: usize,
    #[arg(long, default_value_t = causal_pathways_core::simulate::DEFAULT_BURN_IN)]
    pub burn_in: usize,
}

#[derive(Debug, Clone, clap::Args, Serialize)]
pub struct ValidateArgs {
    /// Added to the direct coupling of the simulated triple models while the
    /// expected values stay nominal.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub perturb: f64,
}

#[derive(Debug, Clone, clap::Args, Serialize)]
pub struct CibArgs {
    /// Use MII over MITP instead of IIX over ITX.
    #[arg(long)]
    pub mii: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Panel {
    /// a = b against c at fixed alpha.
    AbC,
    /// alpha against c at fixed a = b.
    AlphaC,
}

#[derive(Debug, Clone, clap::Args, Serialize)]
pub struct SurfaceArgs {
    #[arg(long, value_enum, default_value_t = Panel::AbC)]
    pub panel: Panel,
    /// Use the multiplicative triple model.
    #[arg(long)]
    pub nonlinear: bool,
    /// Series length of each replica.
    #[arg(short = 'T', long = "length")]
    pub length: Option<usize>,
}

#[derive(Serialize)]
struct Manifest<'a, A: Serialize> {
    version: &'static str,
    subcommand: &'static str,
    seed: u64,
    options: &'a Options,
    #[serde(skip_serializing_if = "Option::is_none")]
    arguments: Option<&'a A>,
    outputs: Vec<String>,
}

/// Parses the command line, merges the config file and runs the subcommand.
pub fn run_from_args<I, T>(args: I) -> Result<()>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| match e.kind() {
        clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
            let _ = e.print();
            AppError::Usage(String::new())
        }
        _ => AppError::Usage(e.to_string()),
    })?;
    run(cli)
}

pub fn run(cli: Cli) -> Result<()> {
    let opts = match &cli.config {
        Some(path) => cli.options.clone().merged(load_config(path)?),
        None => cli.options.clone(),
    };
    match &cli.command {
        Command::Simulate(args) => cmd_simulate(&opts, args),
        Command::Discover => cmd_discover(&opts),
        Command::Measure => cmd_measure(&opts),
        Command::Paths => cmd_paths(&opts),
        Command::Validate(args) => cmd_validate(&opts, args),
        Command::Cib(args) => cmd_cib(&opts, args),
        Command::Surface(args) => cmd_surface(&opts, args),
    }
}

/// Writes `name` inside `dir` via a temporary file and a rename.
fn write_atomic(dir: &Path, name: &str, fill: impl FnOnce(&mut dyn Write) -> std::io::Result<()>) -> Result<String> {
    std::fs::create_dir_all(dir).map_err(|e| AppError::io(dir, e))?;
    let path = dir.join(name);
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| AppError::io(dir, e))?;
    fill(tmp.as_file_mut())
        .and_then(|_| tmp.as_file_mut().sync_all())
        .map_err(|e| AppError::io(&path, e))?;
    tmp.persist(&path).map_err(|e| AppError::io(&path, e.error))?;
    Ok(name.to_string())
}

fn csv_io(e: csv::Error) -> std::io::Error {
    std::io::Error::other(e)
}

fn write_manifest<A: Serialize>(
    opts: &Options,
    subcommand: &'static str,
    arguments: Option<&A>,
    mut outputs: Vec<String>,
) -> Result<()> {
    let name = format!("{subcommand}.manifest.toml");
    outputs.push(name.clone());
    let manifest = Manifest {
        version: env!("CARGO_PKG_VERSION"),
        subcommand,
        seed: opts.seed(),
        options: opts,
        arguments,
        outputs,
    };
    let text = toml::to_string(&manifest).map_err(|e| AppError::Usage(format!("manifest: {e}")))?;
    write_atomic(&opts.out_dir(), &name, |w| w.write_all(text.as_bytes()))?;
    Ok(())
}

fn require<'a, T>(v: &'a Option<T>, flag: &str) -> Result<&'a T> {
    v.as_ref().ok_or_else(|| AppError::Usage(format!("missing --{flag}")))
}

fn load_dataset(opts: &Options) -> Result<TimeSeriesDataset> {
    load_csv(require(&opts.data, "data")?)
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| AppError::io(path, e))
}

fn load_model(path: &Path) -> Result<StructuralModel> {
    parse_model(&read_text(path)?, &path.display().to_string())
}

/// Graph from `--graph`, or the graph implied by `--model`. With `names`
/// given, the graph's variables must match them.
fn load_graph(opts: &Options, names: Option<&[String]>) -> Result<(Vec<String>, TimeSeriesGraph)> {
    match (&opts.graph, &opts.model) {
        (Some(_), Some(_)) => Err(AppError::Usage("give either --graph or --model, not both".into())),
        (Some(path), None) => {
            let gf = parse_graph(&read_text(path)?, &path.display().to_string(), names)?;
            Ok((gf.names, gf.graph))
        }
        (None, Some(path)) => {
            let m = load_model(path)?;
            if let Some(names) = names {
                if m.names() != names {
                    return Err(AppError::parse(
                        path.display().to_string(),
                        1,
                        format!("model variables {:?} do not match data columns {:?}", m.names(), names),
                    ));
                }
            }
            let g = implied_graph(&m).context(|| format!("graph of {}", path.display()))?;
            Ok((m.names().to_vec(), g))
        }
        (None, None) => Err(AppError::Usage("missing --graph or --model".into())),
    }
}

fn estimator(opts: &Options, default_k: usize) -> Result<EstimatorConfig> {
    let mut cfg = if opts.gaussian.unwrap_or(false) {
        EstimatorConfig::gaussian()
    } else {
        EstimatorConfig::value_estimation()
    };
    cfg.k = opts.k.unwrap_or(default_k);
    cfg.seed = opts.seed();
    cfg.bootstrap_count = opts.bootstrap.unwrap_or(0);
    cfg.validate().map_err(|e| AppError::Usage(e.to_string()))?;
    Ok(cfg)
}

fn index_of(names: &[String], name: &str) -> Result<usize> {
    names
        .iter()
        .position(|n| n == name)
        .ok_or_else(|| AppError::Usage(format!("unknown variable `{name}` (known: {})", names.join(", "))))
}

fn print_warnings(warnings: &[String]) {
    for w in warnings {
        eprintln!("warning: {w}");
    }
}

fn cmd_simulate(opts: &Options, args: &SimulateArgs) -> Result<()> {
    if args.length == 0 {
        return Err(AppError::Usage("series length -T must be at least 1".into()));
    }
    let model = match (args.builtin, &opts.model) {
        (Some(_), Some(_)) => return Err(AppError::Usage("give either a builtin model or --model".into())),
        (None, None) => return Err(AppError::Usage("missing model: xwy, xwy-nonlinear, four-region or --model".into())),
        (None, Some(path)) => load_model(path)?,
        (Some(b), None) => {
            let m = match b {
                Builtin::Xwy => model_xwy(args.alpha, args.a, args.b, args.c, [1.0; 3]),
                Builtin::XwyNonlinear => model_xwy_nonlinear(args.alpha, args.a, args.b, args.c, [1.0; 3]),
                Builtin::FourRegion => model_four_region(),
            };
            m.context(|| "builtin model".into())?
        }
    };
    let ds = simulate(&model, args.length, opts.seed(), args.burn_in).context(|| "simulation".into())?;
    let g = implied_graph(&model).context(|| "implied graph".into())?;
    let dir = opts.out_dir();
    let outputs = vec![
        write_atomic(&dir, "data.csv", |w| write_csv(&ds, w))?,
        write_atomic(&dir, "graph.txt", |w| w.write_all(format_graph(&g, model.names()).as_bytes()))?,
        write_atomic(&dir, "model.txt", |w| w.write_all(format_model(&model).as_bytes()))?,
    ];
    write_manifest(opts, "simulate", Some(args), outputs)?;
    println!("simulated {} x {} samples into {}", ds.n_rows(), ds.n_vars(), dir.display());
    Ok(())
}

fn cmd_discover(opts: &Options) -> Result<()> {
    let ds = load_dataset(opts)?;
    let mut cfg = DiscoveryConfig::new(opts.tau_max.unwrap_or(4), opts.threshold.unwrap_or(0.015));
    let default_k = cfg.estimator.k;
    cfg.estimator = estimator(opts, default_k)?;
    cfg.estimator.bootstrap_count = 0;
    cfg.validate().map_err(|e| AppError::Usage(e.to_string()))?;
    let d = build_graph(&ds, &cfg).context(|| "discovery".into())?;
    print_warnings(&d.warnings);
    let names = ds.names();
    let dir = opts.out_dir();
    let outputs = vec![
        write_atomic(&dir, "graph.txt", |w| w.write_all(format_graph(&d.graph, names).as_bytes()))?,
        write_atomic(&dir, "discovery_report.csv", |w| {
            let all: Vec<_> = d.preliminary.records.iter().chain(&d.records).cloned().collect();
            write_discovery(&all, names, w).map_err(csv_io)
        })?,
    ];
    write_manifest::<()>(opts, "discover", None, outputs)?;
    let n_dir = d.graph.directed_links().count();
    let n_cont = d.graph.contemporaneous_solid().count();
    println!("{n_dir} lagged links, {n_cont} contemporaneous links");
    print!("{}", format_graph(&d.graph, names));
    Ok(())
}

/// Measure kinds accepted by `measure --kind`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Requested {
    Info(MeasureKind),
    LinearCe,
    LinearMce,
    LinearPathCoefficient,
    LinearPathSum,
}

fn requested_kinds(kind: Option<&str>, have_mediators: bool) -> Result<Vec<Requested>> {
    let kind = kind.unwrap_or("all");
    if kind.eq_ignore_ascii_case("all") {
        return Ok(MeasureKind::ALL
            .into_iter()
            .filter(|k| have_mediators || !k.is_interaction())
            .map(Requested::Info)
            .collect());
    }
    let mut out = Vec::new();
    for name in kind.split(',').map(str::trim) {
        let r = match name.to_ascii_lowercase().as_str() {
            "linear_ce" => Requested::LinearCe,
            "linear_mce" => Requested::LinearMce,
            "linear_path_coefficient" => Requested::LinearPathCoefficient,
            "linear_path_sum" => Requested::LinearPathSum,
            _ => Requested::Info(name.parse().map_err(|e: CoreError| AppError::Usage(e.to_string()))?),
        };
        out.push(r);
    }
    Ok(out)
}

impl Requested {
    fn name(self) -> &'static str {
        match self {
            Requested::Info(k) => k.name(),
            Requested::LinearCe => "linear_CE",
            Requested::LinearMce => "linear_MCE",
            Requested::LinearPathCoefficient => "linear_path_coefficient",
            Requested::LinearPathSum => "linear_path_sum",
        }
    }
}

/// Errors that make a measure undefined for the query rather than failing
/// the run.
fn is_undefined(e: &CoreError) -> bool {
    matches!(
        e,
        CoreError::NoCausalPath { .. }
            | CoreError::MediatorNotOnPath { .. }
            | CoreError::WindowTooSmall { .. }
            | CoreError::NodeInConditioningSet(_)
            | CoreError::SidepathsPresent
            | CoreError::InvalidGraph(_)
    )
}

fn undefined_note(e: &CoreError, names: &[String]) -> String {
    match e {
        CoreError::NoCausalPath { from, to } => {
            format!("no causal path from {} to {}", from.label(names), to.label(names))
        }
        CoreError::MediatorNotOnPath { variable } => format!("{} is not on a causal path", names[*variable]),
        CoreError::NodeInConditioningSet(n) => format!("{} is part of the conditioning set", n.label(names)),
        other => other.to_string(),
    }
}

struct MeasureQuery<'a> {
    ds: &'a TimeSeriesDataset,
    g: &'a TimeSeriesGraph,
    cfg: EstimatorConfig,
    mediators: Vec<usize>,
    coefficients: Option<BTreeMap<Link, f64>>,
}

impl MeasureQuery<'_> {
    fn path_coefficients(&mut self) -> Result<&BTreeMap<Link, f64>, CoreError> {
        if self.coefficients.is_none() {
            let mut map = BTreeMap::new();
            for l in self.g.directed_links() {
                map.insert(*l, path_coefficient(self.ds, self.g, *l)?.value);
            }
            self.coefficients = Some(map);
        }
        Ok(self.coefficients.as_ref().expect("filled above"))
    }

    fn row(&mut self, kind: Requested, s: NodeRef, t: NodeRef) -> Result<MeasureRow, CoreError> {
        let names = self.ds.names();
        let linear = |r: LinearEffectResult| MeasureRow::from_linear(&r, names);
        match kind {
            Requested::Info(k) => {
                let med: &[usize] = if k.is_interaction() { &self.mediators } else { &[] };
                if k.conditions() == ConditionKind::Itx || k.conditions() == ConditionKind::Mitp {
                    if self.g.causal_paths(s, t).is_empty() {
                        return Err(CoreError::NoCausalPath { from: s, to: t });
                    }
                }
                let plan = MeasurePlan::new(self.g, k, s, t, med)?;
                Ok(MeasureRow::from_result(&plan.estimate(self.ds, &self.cfg, 0)?, names))
            }
            Requested::LinearCe => Ok(linear(causal_effect(self.ds, self.g, s, t)?)),
            Requested::LinearMce => Ok(linear(mediated_causal_effect(self.ds, self.g, s, t, &self.mediators)?)),
            Requested::LinearPathCoefficient => {
                let link = Link::new(s.variable, s.lag - t.lag, t.variable);
                if !self.g.has_link(&link) {
                    return Err(CoreError::InvalidGraph("no such link in the graph".into()));
                }
                Ok(linear(path_coefficient(self.ds, self.g, link)?))
            }
            Requested::LinearPathSum => {
                let (g, coefficients) = (self.g, self.path_coefficients()?.clone());
                Ok(linear(path_sum_effect(g, &coefficients, s, t)?))
            }
        }
    }
}

fn cmd_measure(opts: &Options) -> Result<()> {
    let ds = load_dataset(opts)?;
    let (_, g) = load_graph(opts, Some(ds.names()))?;
    let names = ds.names().to_vec();
    let source = index_of(&names, require(&opts.source, "source")?)?;
    let target = index_of(&names, require(&opts.target, "target")?)?;
    let mediators = opts
        .mediator
        .iter()
        .map(|m| index_of(&names, m))
        .collect::<Result<Vec<_>>>()?;
    let kinds = requested_kinds(opts.kind.as_deref(), !mediators.is_empty())?;
    let tau_max = opts.tau_max.unwrap_or(g.tau_max());
    let lags: Vec<usize> = if opts.lag.is_empty() {
        (1..=tau_max).collect()
    } else {
        opts.lag.clone()
    };
    if lags.contains(&0) {
        return Err(AppError::Usage("lags must be at least 1".into()));
    }
    let mut q = MeasureQuery {
        ds: &ds,
        g: &g,
        cfg: estimator(opts, 10)?,
        mediators,
        coefficients: None,
    };
    let mut rows = Vec::new();
    for &kind in &kinds {
        for &lag in &lags {
            let (s, t) = (NodeRef::new(source, lag), NodeRef::new(target, 0));
            match q.row(kind, s, t) {
                Ok(r) => rows.push(r),
                Err(e) if is_undefined(&e) => rows.push(MeasureRow::undefined(
                    kind.name(),
                    names[source].clone(),
                    lag,
                    names[target].clone(),
                    format!("undefined: {}", undefined_note(&e, &names)),
                )),
                Err(e) => {
                    return Err(AppError::Core {
                        context: format!("{} {} -> {} at lag {lag}", kind.name(), names[source], names[target]),
                        source: e,
                    })
                }
            }
        }
    }
    for r in &rows {
        let value = r.value.map_or_else(|| "-".to_string(), |v| format!("{v:.4}"));
        println!("{:<24} {}(t-{}) -> {}(t)  {value}  {}", r.kind, r.source, r.lag, r.target, r.note);
    }
    let out = write_atomic(&opts.out_dir(), "measures.csv", |w| write_measures(&rows, w).map_err(csv_io))?;
    write_manifest::<()>(opts, "measure", None, vec![out])
}

fn cmd_paths(opts: &Options) -> Result<()> {
    let known = match &opts.data {
        Some(p) => Some(load_csv(p)?.names().to_vec()),
        None => None,
    };
    let (names, g) = load_graph(opts, known.as_deref())?;
    let source = index_of(&names, require(&opts.source, "source")?)?;
    let target = index_of(&names, require(&opts.target, "target")?)?;
    let lags: Vec<usize> = if opts.lag.is_empty() {
        (1..=g.tau_max()).collect()
    } else {
        opts.lag.clone()
    };
    let mut rows: Vec<[String; 5]> = Vec::new();
    let mut out = String::new();
    for &lag in &lags {
        if lag == 0 {
            return Err(AppError::Usage("lags must be at least 1".into()));
        }
        let (s, t) = (NodeRef::new(source, lag), NodeRef::new(target, 0));
        let head = [names[source].clone(), lag.to_string(), names[target].clone()];
        let mut push = |section: &str, value: String| {
            rows.push([head[0].clone(), head[1].clone(), head[2].clone(), section.to_string(), value]);
        };
        let cp = g.causal_paths(s, t);
        out.push_str(&format!(
            "{} -> {}: {} causal path(s)\n",
            s.label(&names),
            t.label(&names),
            cp.paths.len()
        ));
        for p in &cp.paths {
            let text = p.iter().map(|n| n.label(&names)).collect::<Vec<_>>().join(" -> ");
            out.push_str(&format!("  {text}\n"));
            push("path", text);
        }
        if cp.is_empty() {
            continue;
        }
        let list = |nodes: &mut dyn Iterator<Item = &NodeRef>| nodes.map(|n| n.label(&names)).collect::<Vec<_>>();
        let on_path = list(&mut cp.path_nodes.iter());
        let side = g.sidepath_neighbors(s, t);
        let side = list(&mut side.iter());
        out.push_str(&format!("  path nodes: {}\n", on_path.join(", ")));
        out.push_str(&format!("  sidepath neighbors: {}\n", side.join(", ")));
        on_path.into_iter().for_each(|v| push("path_node", v));
        side.into_iter().for_each(|v| push("sidepath_neighbor", v));
        for (kind, section) in [(ConditionKind::Itx, "itx_condition"), (ConditionKind::Mitp, "mitp_condition")] {
            match g.condition_set(kind, s, t) {
                Ok(set) => {
                    let l = list(&mut set.iter());
                    out.push_str(&format!("  {section}s: {}\n", l.join(", ")));
                    l.into_iter().for_each(|v| push(section, v));
                }
                Err(e) => out.push_str(&format!("  {section}s: undefined ({e})\n")),
            }
        }
    }
    print!("{out}");
    let file = write_atomic(&opts.out_dir(), "paths.csv", |w| {
        let mut csv = csv::Writer::from_writer(w);
        csv.write_record(["source", "lag", "target", "section", "value"]).map_err(csv_io)?;
        for r in &rows {
            csv.write_record(r).map_err(csv_io)?;
        }
        csv.flush()
    })?;
    write_manifest::<()>(opts, "paths", None, vec![file])
}

fn cmd_validate(opts: &Options, args: &ValidateArgs) -> Result<()> {
    let cfg = ValidationConfig {
        quick: opts.quick(),
        seed: opts.seed(),
        perturb: args.perturb,
        ensemble: opts.ensemble,
    };
    let checks = validation::run(&cfg)?;
    let file = write_atomic(&opts.out_dir(), "validation.csv", |w| {
        let mut csv = csv::Writer::from_writer(w);
        csv.write_record(["check", "measured", "expected", "tolerance", "status"])
            .map_err(csv_io)?;
        for c in &checks {
            csv.write_record([
                c.name.clone(),
                c.measured.to_string(),
                c.expected.to_string(),
                c.tolerance.to_string(),
                if c.passed { "pass" } else { "fail" }.to_string(),
            ])
            .map_err(csv_io)?;
        }
        csv.flush()
    })?;
    for c in &checks {
        println!(
            "[{}] {:<48} measured {:>10.5}  expected {:>10.5}  tol {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.measured,
            c.expected,
            c.tolerance
        );
    }
    write_manifest(opts, "validate", Some(args), vec![file])?;
    let failed = checks.iter().filter(|c| !c.passed).count();
    if failed > 0 {
        return Err(AppError::Validation(format!("{failed} of {} checks failed", checks.len())));
    }
    Ok(())
}

fn cmd_cib(opts: &Options, args: &CibArgs) -> Result<()> {
    let ds = load_dataset(opts)?;
    let (names, g) = load_graph(opts, Some(ds.names()))?;
    let tau_max = opts.tau_max.unwrap_or(g.tau_max());
    let cfg = estimator(opts, 10)?;
    let variables: Vec<usize> = if opts.mediator.is_empty() {
        (0..names.len()).collect()
    } else {
        opts.mediator.iter().map(|m| index_of(&names, m)).collect::<Result<_>>()?
    };
    let mut rows = Vec::new();
    for k in variables {
        let triples = match interaction_triples(&ds, &g, k, tau_max, &cfg, args.mii) {
            Ok(t) => t,
            Err(CoreError::NoMediatedInteraction { .. }) => {
                rows.push(CibRow {
                    variable: names[k].clone(),
                    absolute: None,
                    normalized: None,
                });
                continue;
            }
            Err(e) => return Err(e).context(|| format!("betweenness of {}", names[k])),
        };
        let absolute = betweenness_from_triples(
            k,
            &triples,
            &CibOptions {
                normalized: false,
                use_mii: args.mii,
                ..CibOptions::default()
            },
        )
        .ok();
        let normalized = betweenness_from_triples(
            k,
            &triples,
            &CibOptions {
                normalized: true,
                use_mii: args.mii,
                ..CibOptions::default()
            },
        )
        .ok();
        rows.push(CibRow {
            variable: names[k].clone(),
            absolute,
            normalized,
        });
    }
    for r in &rows {
        let pick = if opts.normalized() { &r.normalized } else { &r.absolute };
        match pick {
            Some(b) => println!("{:<12} {:.4}  ({} triples)", r.variable, b.value, b.cardinality()),
            None => println!("{:<12} -  (mediates no interaction)", r.variable),
        }
    }
    let file = write_atomic(&opts.out_dir(), "cib.csv", |w| write_cib(&rows, w).map_err(csv_io))?;
    write_manifest(opts, "cib", Some(args), vec![file])
}

const SURFACE_KINDS: [MeasureKind; 4] = [MeasureKind::Itx, MeasureKind::Mitp, MeasureKind::Iix, MeasureKind::Mii];

fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

fn cmd_surface(opts: &Options, args: &SurfaceArgs) -> Result<()> {
    let quick = opts.quick();
    let n_grid = if quick { 3 } else { 7 };
    let n_ens = opts.ensemble.unwrap_or(if quick { 2 } else { 30 });
    let t_len = args.length.unwrap_or(if quick { 1000 } else { 10_000 });
    if t_len == 0 {
        return Err(AppError::Usage("series length -T must be at least 1".into()));
    }
    let cfg = estimator(opts, 1)?;
    let cs = grid(-0.75, 0.75, n_grid);
    let points: Vec<(f64, f64, f64)> = match args.panel {
        Panel::AbC => grid(-0.75, 0.75, n_grid)
            .into_iter()
            .flat_map(|ab| cs.iter().map(move |&c| (0.5, ab, c)))
            .collect(),
        Panel::AlphaC => grid(0.0, 0.75, n_grid)
            .into_iter()
            .flat_map(|alpha| cs.iter().map(move |&c| (alpha, 0.5, c)))
            .collect(),
    };
    let panel = match args.panel {
        Panel::AbC => "ab-c",
        Panel::AlphaC => "alpha-c",
    };
    let (s, t) = (NodeRef::new(0, 2), NodeRef::new(2, 0));
    let mut rows: Vec<[String; 9]> = Vec::new();
    for (alpha, ab, c) in points {
        let m = if args.nonlinear {
            model_xwy_nonlinear(alpha, ab, ab, c, [1.0; 3])
        } else {
            model_xwy(alpha, ab, ab, c, [1.0; 3])
        }
        .context(|| "surface model".into())?;
        if m.spectral_radius() >= 1.0 {
            eprintln!("skipping unstable alpha={alpha} a=b={ab} c={c}");
            continue;
        }
        // The graph keeps every link so that zero couplings stay on the grid.
        let full = if args.nonlinear {
            model_xwy_nonlinear(alpha, 0.5, 0.5, 0.5, [1.0; 3])
        } else {
            model_xwy(alpha, 0.5, 0.5, 0.5, [1.0; 3])
        }
        .context(|| "surface model".into())?;
        let g = implied_graph(&full).context(|| "implied graph".into())?;
        let plans = SURFACE_KINDS
            .iter()
            .map(|&k| MeasurePlan::new(&g, k, s, t, if k.is_interaction() { &[1] } else { &[] }))
            .collect::<std::result::Result<Vec<_>, _>>()
            .context(|| "surface measures".into())?;
        let stats = ensemble_stats(&m, n_ens, t_len, opts.seed(), causal_pathways_core::simulate::DEFAULT_BURN_IN, |ds, _| {
            plans.iter().map(|p| p.estimate(ds, &cfg, 0).map(|r| r.value)).collect()
        })
        .context(|| format!("ensemble at alpha={alpha} a=b={ab} c={c}"))?;
        let exact: Vec<Option<f64>> = if m.is_linear() {
            let cov = StationaryCovariance::new(&m, g.tau_max() + 2).context(|| "stationary covariance".into())?;
            plans.iter().map(|p| cov.evaluate(p).ok()).collect()
        } else {
            vec![None; plans.len()]
        };
        for ((kind, (mean, std)), exact) in SURFACE_KINDS.iter().zip(stats).zip(exact) {
            rows.push([
                panel.to_string(),
                alpha.to_string(),
                ab.to_string(),
                ab.to_string(),
                c.to_string(),
                kind.name().to_string(),
                mean.to_string(),
                std.to_string(),
                exact.map(|e| e.to_string()).unwrap_or_default(),
            ]);
        }
    }
    let file = write_atomic(&opts.out_dir(), "surface.csv", |w| {
        let mut csv = csv::Writer::from_writer(w);
        csv.write_record(["panel", "alpha", "a", "b", "c", "measure", "mean", "std", "exact"])
            .map_err(csv_io)?;
        for r in &rows {
            csv.write_record(r).map_err(csv_io)?;
        }
        csv.flush()
    })?;
    println!("{} surface rows written", rows.len());
    write_manifest(opts, "surface", Some(args), vec![file])
}
