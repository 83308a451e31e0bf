//! Configuration parsing, presets and report emission for the `levi` tool.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use levi_core::bench::{
    points_csv, preset, problem_dimension, run_experiment_with_points, EvaluationSet, ExperimentConfig,
    ExperimentOutput, Method, NodeSource, PRESET_NAMES,
};
use levi_core::drm3d::FIELD_REFINEMENT;
use levi_core::LeviError;
use rayon::prelude::*;
use serde_json::{Map, Value};
use thiserror::Error;

pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_SOLVER: i32 = 2;

/// Internal node count used when a dual reciprocity config names none.
pub fn default_node_count(problem: &str) -> usize {
    match problem {
        "ellipse" | "harmonic_ellipse" => 208,
        "pinched_ball" | "harmonic_ball" => 136,
        _ => 196,
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Solver(LeviError),
    #[error("cannot write {path}: {source}")]
    Output { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Solver(_) | CliError::Output { .. } => EXIT_SOLVER,
        }
    }
}

impl From<LeviError> for CliError {
    fn from(e: LeviError) -> Self {
        match e {
            LeviError::Config(m) | LeviError::Nodes(m) => CliError::Config(m),
            other => CliError::Solver(other),
        }
    }
}

/// One experiment plus where its outputs go.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub experiment: ExperimentConfig,
    pub output_dir: PathBuf,
}

const KEYS: [&str; 12] = [
    "name",
    "problem",
    "method",
    "N",
    "k1",
    "n",
    "internal_nodes",
    "field_refinement",
    "evaluation",
    "slice_spacing",
    "slice_max_fraction",
    "output_dir",
];

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn get_usize(obj: &Map<String, Value>, key: &str, default: usize) -> Result<usize, CliError> {
    match obj.get(key) {
        None => Ok(default),
        Some(v) => v
            .as_u64()
            .filter(|&x| x > 0)
            .map(|x| x as usize)
            .ok_or_else(|| config_err(format!("'{key}' must be a positive integer, got {v}"))),
    }
}

fn get_f64(obj: &Map<String, Value>, key: &str, default: f64) -> Result<f64, CliError> {
    match obj.get(key) {
        None => Ok(default),
        Some(v) => v
            .as_f64()
            .ok_or_else(|| config_err(format!("'{key}' must be a number, got {v}"))),
    }
}

fn get_str<'a>(obj: &'a Map<String, Value>, key: &str) -> Result<Option<&'a str>, CliError> {
    match obj.get(key) {
        None => Ok(None),
        Some(Value::String(s)) => Ok(Some(s)),
        Some(v) => Err(config_err(format!("'{key}' must be a string, got {v}"))),
    }
}

fn node_source(obj: &Map<String, Value>, problem: &str) -> Result<NodeSource, CliError> {
    let bad = |v: &Value| config_err(format!("'internal_nodes' must be a count, \"lattice:<count>\" or \"file:<path>\", got {v}"));
    match obj.get("internal_nodes") {
        None => Ok(NodeSource::Lattice {
            count: default_node_count(problem),
        }),
        Some(v @ Value::Number(_)) => Ok(NodeSource::Lattice {
            count: v.as_u64().filter(|&c| c > 0).ok_or_else(|| bad(v))? as usize,
        }),
        Some(v @ Value::String(s)) => {
            if let Some(path) = s.strip_prefix("file:") {
                Ok(NodeSource::File { path: path.into() })
            } else if let Some(count) = s.strip_prefix("lattice:") {
                let count = count.parse().ok().filter(|&c: &usize| c > 0).ok_or_else(|| bad(v))?;
                Ok(NodeSource::Lattice { count })
            } else {
                Err(bad(v))
            }
        }
        Some(v) => Err(bad(v)),
    }
}

/// Parses and validates a JSON run configuration, filling defaults.
pub fn parse_config(text: &str) -> Result<RunConfig, CliError> {
    let value: Value = serde_json::from_str(text).map_err(|e| config_err(format!("invalid JSON: {e}")))?;
    let obj = value
        .as_object()
        .ok_or_else(|| config_err("configuration must be a JSON object"))?;
    let unknown: BTreeSet<&str> = obj
        .keys()
        .map(String::as_str)
        .filter(|k| !KEYS.contains(k))
        .collect();
    if !unknown.is_empty() {
        return Err(config_err(format!(
            "unknown keys: {}",
            unknown.into_iter().collect::<Vec<_>>().join(", ")
        )));
    }
    let problem = get_str(obj, "problem")?.ok_or_else(|| config_err("missing 'problem'"))?;
    let method_name = get_str(obj, "method")?.ok_or_else(|| config_err("missing 'method'"))?;
    let dim = problem_dimension(problem)?;

    let allowed: &[&str] = match method_name {
        "ads" => &["N", "k1"],
        "drm" => &["n", "internal_nodes"],
        "drm3d" => &["N", "internal_nodes", "field_refinement", "slice_spacing", "slice_max_fraction"],
        other => return Err(config_err(format!("unknown method '{other}', expected ads, drm or drm3d"))),
    };
    let misplaced: Vec<&str> = ["N", "k1", "n", "internal_nodes", "field_refinement", "slice_spacing", "slice_max_fraction"]
        .into_iter()
        .filter(|k| obj.contains_key(*k) && !allowed.contains(k))
        .collect();
    if !misplaced.is_empty() {
        return Err(config_err(format!(
            "keys not used by method '{method_name}': {}",
            misplaced.join(", ")
        )));
    }

    let method = match method_name {
        "ads" => {
            let k1 = match obj.get("k1") {
                None => 3,
                Some(v) => v
                    .as_u64()
                    .filter(|&k| k <= 20)
                    .ok_or_else(|| config_err(format!("'k1' must be an integer in 0..=20, got {v}")))?
                    as u32,
            };
            Method::Ads {
                layers: get_usize(obj, "N", 10)?,
                k1,
            }
        }
        "drm" => Method::Drm {
            boundary_half: get_usize(obj, "n", 256)?,
            nodes: node_source(obj, problem)?,
        },
        _ => Method::Drm3d {
            polar: get_usize(obj, "N", 16)?,
            nodes: node_source(obj, problem)?,
            field_refinement: get_usize(obj, "field_refinement", FIELD_REFINEMENT)?,
        },
    };
    if dim != method.dimension() {
        return Err(config_err(format!(
            "dimension mismatch: problem '{problem}' is {dim}D, method '{method_name}' is {}D",
            method.dimension()
        )));
    }

    let mut evaluation = EvaluationSet::default_for(&method);
    match get_str(obj, "evaluation")? {
        None => {}
        Some("layer_curves") => evaluation = EvaluationSet::LayerCurves,
        Some("internal_nodes") => evaluation = EvaluationSet::InternalNodes,
        Some("slices") => {
            evaluation = EvaluationSet::Slices {
                spacing: 0.1,
                max_fraction: 0.9,
            }
        }
        Some(other) => {
            return Err(config_err(format!(
                "unknown evaluation '{other}', expected layer_curves, internal_nodes or slices"
            )))
        }
    }
    if let EvaluationSet::Slices { spacing, max_fraction } = &mut evaluation {
        *spacing = get_f64(obj, "slice_spacing", *spacing)?;
        *max_fraction = get_f64(obj, "slice_max_fraction", *max_fraction)?;
    }

    let name = get_str(obj, "name")?
        .map(str::to_string)
        .unwrap_or_else(|| format!("{problem}_{method_name}"));
    if name.is_empty() || name.contains(['/', '\\']) {
        return Err(config_err(format!("'name' must be a plain file stem, got '{name}'")));
    }
    let experiment = ExperimentConfig {
        name,
        problem: problem.to_string(),
        method,
        evaluation,
    };
    experiment.validate()?;
    Ok(RunConfig {
        experiment,
        output_dir: get_str(obj, "output_dir")?.unwrap_or(".").into(),
    })
}

/// Resolves relative node-file and output paths against `base`.
pub fn resolve_paths(config: &mut RunConfig, base: &Path) {
    let fix = |p: &mut PathBuf| {
        if p.is_relative() {
            *p = base.join(&*p);
        }
    };
    fix(&mut config.output_dir);
    match &mut config.experiment.method {
        Method::Drm {
            nodes: NodeSource::File { path },
            ..
        }
        | Method::Drm3d {
            nodes: NodeSource::File { path },
            ..
        } => fix(path),
        _ => {}
    }
}

/// Writes `<name>.report.json` and `<name>.points.csv` into `dir`.
pub fn write_outputs(out: &ExperimentOutput, dir: &Path) -> Result<(PathBuf, PathBuf), CliError> {
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| CliError::Output { path, source }
    };
    std::fs::create_dir_all(dir).map_err(io(dir))?;
    let name = &out.report.config.name;
    let json = dir.join(format!("{name}.report.json"));
    let csv = dir.join(format!("{name}.points.csv"));
    std::fs::write(&json, out.report.to_json()? + "\n").map_err(io(&json))?;
    std::fs::write(&csv, points_csv(&out.points)).map_err(io(&csv))?;
    Ok((json, csv))
}

/// Console table with one column per report.
pub fn format_table(outputs: &[ExperimentOutput]) -> String {
    let reports: Vec<_> = outputs.iter().map(|o| &o.report).collect();
    let mut rows: Vec<(String, Vec<String>)> = Vec::new();
    let sci = |v: f64| format!("{v:.3e}");
    rows.push(("run".into(), reports.iter().map(|r| r.config.name.clone()).collect()));
    let layers: BTreeSet<usize> = reports.iter().flat_map(|r| r.err_local.iter().map(|l| l.layer)).collect();
    if layers.is_empty() {
        rows.push(("Num_I".into(), reports.iter().map(|r| r.node_counts.internal.to_string()).collect()));
    } else {
        rows.push(("Num_C".into(), reports.iter().map(|r| r.node_counts.unknowns.to_string()).collect()));
    }
    for layer in layers {
        rows.push((
            format!("Err_L^{layer}"),
            reports.iter().map(|r| r.local(layer).map_or("-".into(), sci)).collect(),
        ));
    }
    if reports.iter().any(|r| r.err_avg.is_some()) {
        rows.push(("Err_A".into(), reports.iter().map(|r| r.err_avg.map_or("-".into(), sci)).collect()));
    }
    rows.push(("Err_m".into(), reports.iter().map(|r| sci(r.err_mean_abs)).collect()));
    rows.push(("Err_s".into(), reports.iter().map(|r| sci(r.err_rms_rel)).collect()));
    rows.push(("cond".into(), reports.iter().map(|r| sci(r.condition)).collect()));
    rows.push(("time [s]".into(), reports.iter().map(|r| format!("{:.3}", r.wall_time)).collect()));

    let label_w = rows.iter().map(|r| r.0.len()).max().unwrap_or(0);
    let col_w: Vec<usize> = (0..reports.len())
        .map(|c| rows.iter().map(|r| r.1[c].len()).max().unwrap_or(0))
        .collect();
    let mut s = String::new();
    for (label, cells) in &rows {
        let _ = write!(s, "{label:<label_w$}");
        for (cell, w) in cells.iter().zip(&col_w) {
            let _ = write!(s, "  {cell:>w$}");
        }
        s.push('\n');
    }
    s
}

#[derive(Debug, Parser)]
#[command(name = "levi", version, about = "Levi-function solvers for variable-coefficient Dirichlet problems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one experiment from a JSON configuration.
    Solve {
        #[arg(long)]
        config: PathBuf,
        /// Output directory, overriding the configuration.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Regenerate a table of reference experiments.
    Bench {
        #[arg(long)]
        preset: String,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Run the preset's experiments concurrently.
        #[arg(long)]
        concurrent: bool,
    },
    /// List the available presets.
    Presets,
}

/// Caps the global thread pool from `LEVI_THREADS` when set.
pub fn configure_threads(value: Option<&str>) -> Result<(), CliError> {
    let Some(v) = value else { return Ok(()) };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| config_err(format!("LEVI_THREADS must be a positive integer, got '{v}'")))?;
    // a pool already built (e.g. by an earlier call in the same process) is kept
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn solve(config: &Path, out: Option<PathBuf>) -> Result<String, CliError> {
    let text = std::fs::read_to_string(config)
        .map_err(|e| config_err(format!("cannot read {}: {e}", config.display())))?;
    let mut run = parse_config(&text)?;
    let base = config.parent().unwrap_or(Path::new("."));
    resolve_paths(&mut run, base);
    if let Some(dir) = out {
        run.output_dir = dir;
    }
    let output = run_experiment_with_points(&run.experiment)?;
    let (json, csv) = write_outputs(&output, &run.output_dir)?;
    let mut s = format_table(std::slice::from_ref(&output));
    let _ = writeln!(s, "wrote {} and {}", json.display(), csv.display());
    Ok(s)
}

fn bench(name: &str, out: &Path, concurrent: bool) -> Result<String, CliError> {
    let configs = preset(name)?;
    let outputs: Vec<ExperimentOutput> = if concurrent {
        configs.par_iter().map(run_experiment_with_points).collect::<Result<_, _>>()?
    } else {
        configs.iter().map(run_experiment_with_points).collect::<Result<_, _>>()?
    };
    for o in &outputs {
        write_outputs(o, out)?;
    }
    let mut s = format_table(&outputs);
    let _ = writeln!(s, "wrote {} reports to {}", outputs.len(), out.display());
    Ok(s)
}

/// Runs the tool and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = configure_threads(std::env::var("LEVI_THREADS").ok().as_deref()).and_then(|()| match cli.command {
        Command::Solve { config, out } => solve(&config, out),
        Command::Bench {
            preset,
            out,
            concurrent,
        } => bench(&preset, &out, concurrent),
        Command::Presets => Ok(PRESET_NAMES.join("\n") + "\n"),
    });
    match result {
        Ok(text) => {
            print!("{text}");
            0
        }
        Err(e) => {
            eprintln!("levi: {e}");
            e.exit_code()
        }
    }
}
