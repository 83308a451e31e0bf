//! Experiment configurations, the runner and its reports.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::examples::*;
use super::metrics::{err_avg_from, err_mean_abs, err_rms_rel, ring_sample, weighted_relative};
use crate::ads::solve_ads;
use crate::drm::{eval_drm_many, solve_drm, RbfBasis};
use crate::drm3d::{eval_drm3d_many, solve_drm3d_on, sphere_grid_with, FIELD_REFINEMENT};
use crate::error::{LeviError, Result};
use crate::geometry::{Point2, Point3, StarDomain2D, SurfacePatch3D};
use crate::nodes::{planar_lattice, read_nodes, spatial_lattice};
use crate::problem::{Problem2D, Problem3D};
use crate::quadrature::RadialScheme;

/// Layer curves reported by default, 1-based.
pub const DEFAULT_LAYERS: [usize; 4] = [2, 7, 12, 17];

/// A registered problem of either dimension.
#[derive(Debug, Clone)]
pub enum RegisteredProblem {
    Planar(Problem2D),
    Spatial(Problem3D),
}

impl RegisteredProblem {
    pub fn dimension(&self) -> usize {
        match self {
            RegisteredProblem::Planar(_) => 2,
            RegisteredProblem::Spatial(_) => 3,
        }
    }
}

pub fn problem_dimension(name: &str) -> Result<usize> {
    Ok(lookup_problem(name)?.dimension())
}

pub fn lookup_problem(name: &str) -> Result<RegisteredProblem> {
    let center = Point2::from(EXAMPLE1_CENTER);
    Ok(match name {
        "heart" => RegisteredProblem::Planar(example1_heart()),
        "ellipse" => RegisteredProblem::Planar(example1_ellipse()),
        "pinched_ball" => RegisteredProblem::Spatial(example2_pinched_ball()),
        "harmonic_heart" => RegisteredProblem::Planar(harmonic_2d(name, StarDomain2D::heart(center), 1.0)),
        "harmonic_ellipse" => {
            RegisteredProblem::Planar(harmonic_2d(name, StarDomain2D::ellipse(1.0, 0.5, center), 1.0))
        }
        "harmonic_ball" => RegisteredProblem::Spatial(harmonic_3d(name, SurfacePatch3D::pinched_ball(), 1.0)),
        _ => {
            return Err(LeviError::Config(format!(
                "unknown problem '{name}', expected one of {}",
                PROBLEM_NAMES.join(", ")
            )))
        }
    })
}

/// Where the internal nodes of a dual reciprocity run come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NodeSource {
    Lattice { count: usize },
    File { path: PathBuf },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum Method {
    /// Layered volume quadrature with `layers` = N and base exponent `k1`.
    Ads { layers: usize, k1: u32 },
    /// Planar dual reciprocity with `2 boundary_half` boundary nodes.
    Drm { boundary_half: usize, nodes: NodeSource },
    /// Spatial dual reciprocity on a `polar × 2 polar` sphere grid.
    Drm3d {
        polar: usize,
        nodes: NodeSource,
        #[serde(default = "default_refinement")]
        field_refinement: usize,
    },
}

fn default_refinement() -> usize {
    FIELD_REFINEMENT
}

impl Method {
    pub fn dimension(&self) -> usize {
        match self {
            Method::Ads { .. } | Method::Drm { .. } => 2,
            Method::Drm3d { .. } => 3,
        }
    }
}

/// Points at which errors are measured.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EvaluationSet {
    /// Nodes on the interior layer curves (layered quadrature only).
    LayerCurves,
    /// The internal nodes of the basis (dual reciprocity only).
    InternalNodes,
    /// Lattices on the three coordinate planes, clipped to `max_fraction` of the radius.
    Slices { spacing: f64, max_fraction: f64 },
}

impl EvaluationSet {
    pub fn default_for(method: &Method) -> Self {
        match method {
            Method::Ads { .. } => EvaluationSet::LayerCurves,
            Method::Drm { .. } => EvaluationSet::InternalNodes,
            Method::Drm3d { .. } => EvaluationSet::Slices {
                spacing: 0.1,
                max_fraction: 0.9,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub name: String,
    pub problem: String,
    #[serde(flatten)]
    pub method: Method,
    pub evaluation: EvaluationSet,
}

impl ExperimentConfig {
    pub fn new(name: impl Into<String>, problem: impl Into<String>, method: Method) -> Self {
        let evaluation = EvaluationSet::default_for(&method);
        ExperimentConfig {
            name: name.into(),
            problem: problem.into(),
            method,
            evaluation,
        }
    }

    /// Checks names, dimensions and resolutions without running anything.
    pub fn validate(&self) -> Result<()> {
        let dim = problem_dimension(&self.problem)?;
        if dim != self.method.dimension() {
            return Err(LeviError::Config(format!(
                "problem '{}' is {dim}D but the method is {}D",
                self.problem,
                self.method.dimension()
            )));
        }
        let positive = |what: &str, v: usize| {
            if v == 0 {
                Err(LeviError::Config(format!("{what} must be positive")))
            } else {
                Ok(())
            }
        };
        let nodes = match &self.method {
            Method::Ads { layers, .. } => {
                positive("layers", *layers)?;
                None
            }
            Method::Drm { boundary_half, nodes } => {
                positive("boundary_half", *boundary_half)?;
                Some(nodes)
            }
            Method::Drm3d {
                polar,
                nodes,
                field_refinement,
            } => {
                positive("polar", *polar)?;
                positive("field_refinement", *field_refinement)?;
                Some(nodes)
            }
        };
        if let Some(NodeSource::Lattice { count }) = nodes {
            positive("internal node count", *count)?;
        }
        let ok = matches!(
            (&self.method, &self.evaluation),
            (Method::Ads { .. }, EvaluationSet::LayerCurves)
                | (Method::Drm { .. } | Method::Drm3d { .. }, EvaluationSet::InternalNodes)
                | (Method::Drm3d { .. }, EvaluationSet::Slices { .. })
        );
        if !ok {
            return Err(LeviError::Config(format!(
                "evaluation set {:?} does not apply to this method",
                self.evaluation
            )));
        }
        if let EvaluationSet::Slices { spacing, max_fraction } = self.evaluation {
            if !(spacing > 0.0) || !(max_fraction > 0.0 && max_fraction < 1.0) {
                return Err(LeviError::Config(
                    "slices need spacing > 0 and 0 < max_fraction < 1".into(),
                ));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LayerError {
    pub layer: usize,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NodeCounts {
    /// Size of the linear system.
    pub unknowns: usize,
    pub boundary: usize,
    pub internal: usize,
    pub evaluation: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub config: ExperimentConfig,
    pub err_local: Vec<LayerError>,
    pub err_avg: Option<f64>,
    pub err_mean_abs: f64,
    pub err_rms_rel: f64,
    pub node_counts: NodeCounts,
    /// Seconds spent in assembly and solve.
    pub wall_time: f64,
    pub condition: f64,
}

impl ErrorReport {
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| LeviError::Io(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| LeviError::Config(e.to_string()))
    }

    pub fn local(&self, layer: usize) -> Option<f64> {
        self.err_local.iter().find(|l| l.layer == layer).map(|l| l.value)
    }
}

/// One evaluation point with numerical and exact values.
#[derive(Debug, Clone, PartialEq)]
pub struct PointRecord {
    pub coords: Vec<f64>,
    pub value: f64,
    pub exact: f64,
}

/// One row per point: coordinates, `u_num`, `u_ex`, `abs_err`, 9 significant digits.
pub fn points_csv(points: &[PointRecord]) -> String {
    let dim = points.first().map_or(2, |p| p.coords.len());
    let names = ["x", "y", "z"];
    let mut s = names[..dim].join(",");
    s.push_str(",u_num,u_ex,abs_err\n");
    for p in points {
        for c in &p.coords {
            let _ = write!(s, "{c:.8e},");
        }
        let _ = writeln!(s, "{:.8e},{:.8e},{:.8e}", p.value, p.exact, (p.value - p.exact).abs());
    }
    s
}

/// Report plus the per-point values behind it.
#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub report: ErrorReport,
    pub points: Vec<PointRecord>,
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<ErrorReport> {
    Ok(run_experiment_with_points(config)?.report)
}

pub fn run_experiment_with_points(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    config.validate()?;
    match (lookup_problem(&config.problem)?, &config.method) {
        (RegisteredProblem::Planar(p), Method::Ads { layers, k1 }) => run_ads(config, &p, *layers, *k1),
        (RegisteredProblem::Planar(p), Method::Drm { boundary_half, nodes }) => {
            run_drm(config, &p, *boundary_half, nodes)
        }
        (
            RegisteredProblem::Spatial(p),
            Method::Drm3d {
                polar,
                nodes,
                field_refinement,
            },
        ) => run_drm3d(config, &p, *polar, *field_refinement, nodes),
        _ => unreachable!("validated above"),
    }
}

fn finish(
    config: &ExperimentConfig,
    points: Vec<PointRecord>,
    err_local: Vec<LayerError>,
    err_avg: Option<f64>,
    mut node_counts: NodeCounts,
    wall_time: f64,
    condition: f64,
) -> Result<ExperimentOutput> {
    let values: Vec<f64> = points.iter().map(|p| p.value).collect();
    let exact: Vec<f64> = points.iter().map(|p| p.exact).collect();
    node_counts.evaluation = points.len();
    let report = ErrorReport {
        config: config.clone(),
        err_local,
        err_avg,
        err_mean_abs: err_mean_abs(&values, &exact)?,
        err_rms_rel: err_rms_rel(&values, &exact)?,
        node_counts,
        wall_time,
        condition,
    };
    let all = report.err_local.iter().map(|l| l.value).chain(report.err_avg).chain([
        report.err_mean_abs,
        report.err_rms_rel,
    ]);
    for e in all {
        if !(e.is_finite() && e >= 0.0) {
            return Err(LeviError::Metric(format!("non-finite or negative error {e}")));
        }
    }
    Ok(ExperimentOutput { report, points })
}

fn run_ads(config: &ExperimentConfig, problem: &Problem2D, layers: usize, k1: u32) -> Result<ExperimentOutput> {
    let scheme = RadialScheme::adaptive_layers(layers, k1)?;
    let start = Instant::now();
    let sol = solve_ads(problem, &scheme)?;
    let wall_time = start.elapsed().as_secs_f64();

    let rings = sol.grid().interior().len();
    let samples = (0..rings)
        .map(|k| ring_sample(&sol, problem, k))
        .collect::<Result<Vec<_>>>()?;
    let err_local = DEFAULT_LAYERS
        .iter()
        .filter(|&&i| i <= rings)
        .map(|&layer| {
            let s = &samples[layer - 1];
            Ok(LayerError {
                layer,
                value: weighted_relative(&s.values, &s.exact, Some(&s.arc_weights))?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let err_avg = err_avg_from(&samples)?;

    let mut points = Vec::new();
    for (ring, s) in sol.grid().interior().iter().zip(&samples) {
        for ((p, v), e) in ring.points.iter().zip(&s.values).zip(&s.exact) {
            points.push(PointRecord {
                coords: vec![p.x, p.y],
                value: *v,
                exact: *e,
            });
        }
    }
    let counts = NodeCounts {
        unknowns: sol.grid().unknowns(),
        boundary: sol.grid().boundary().points.len(),
        internal: sol.grid().interior().iter().map(|r| r.points.len()).sum(),
        evaluation: 0,
    };
    finish(config, points, err_local, Some(err_avg), counts, wall_time, sol.condition)
}

fn planar_nodes(problem: &Problem2D, source: &NodeSource) -> Result<Vec<Point2>> {
    match source {
        NodeSource::Lattice { count } => planar_lattice(&problem.domain, *count),
        NodeSource::File { path } => read_nodes(path),
    }
}

fn spatial_nodes(problem: &Problem3D, source: &NodeSource) -> Result<Vec<Point3>> {
    match source {
        NodeSource::Lattice { count } => spatial_lattice(&problem.domain, *count),
        NodeSource::File { path } => read_nodes(path),
    }
}

fn run_drm(
    config: &ExperimentConfig,
    problem: &Problem2D,
    boundary_half: usize,
    source: &NodeSource,
) -> Result<ExperimentOutput> {
    let basis = RbfBasis::new(planar_nodes(problem, source)?)?;
    let start = Instant::now();
    let sol = solve_drm(problem, &basis, boundary_half)?;
    let wall_time = start.elapsed().as_secs_f64();

    let pts = basis.nodes().to_vec();
    let values = eval_drm_many(&sol, problem, &pts)?;
    let points = pts
        .iter()
        .zip(values)
        .map(|(p, value)| {
            Ok(PointRecord {
                coords: vec![p.x, p.y],
                value,
                exact: problem.exact_at(p)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let counts = NodeCounts {
        unknowns: basis.len() + 2 * boundary_half,
        boundary: 2 * boundary_half,
        internal: basis.len(),
        evaluation: 0,
    };
    finish(config, points, Vec::new(), None, counts, wall_time, sol.condition)
}

/// Lattice points of the three coordinate planes within `max_fraction` of the radius.
pub fn slice_points(surface: &SurfacePatch3D, spacing: f64, max_fraction: f64) -> Vec<Point3> {
    let reach = (max_fraction * 2.0 / spacing).ceil() as i64;
    let mut out = Vec::new();
    for axis in 0..3 {
        for a in -reach..=reach {
            for b in -reach..=reach {
                let (u, v) = (a as f64 * spacing, b as f64 * spacing);
                let p = match axis {
                    0 => Point3::new(0.0, u, v),
                    1 => Point3::new(u, 0.0, v),
                    _ => Point3::new(u, v, 0.0),
                };
                // points on two planes at once are kept once
                let shared = (0..axis).any(|k| p[k] == 0.0);
                if !shared && surface.radial_fraction(&p) <= max_fraction {
                    out.push(p);
                }
            }
        }
    }
    out
}

fn run_drm3d(
    config: &ExperimentConfig,
    problem: &Problem3D,
    polar: usize,
    refinement: usize,
    source: &NodeSource,
) -> Result<ExperimentOutput> {
    let basis = RbfBasis::new(spatial_nodes(problem, source)?)?;
    let start = Instant::now();
    let grid = sphere_grid_with(&problem.domain, polar, refinement)?;
    let sol = solve_drm3d_on(problem, &basis, grid)?;
    let wall_time = start.elapsed().as_secs_f64();

    let pts = match config.evaluation {
        EvaluationSet::Slices { spacing, max_fraction } => slice_points(&problem.domain, spacing, max_fraction),
        _ => basis.nodes().to_vec(),
    };
    let values = eval_drm3d_many(&sol, problem, &pts)?;
    let points = pts
        .iter()
        .zip(values)
        .map(|(p, value)| {
            Ok(PointRecord {
                coords: vec![p.x, p.y, p.z],
                value,
                exact: problem.exact_at(p)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let counts = NodeCounts {
        unknowns: basis.len() + sol.grid().len(),
        boundary: sol.grid().len(),
        internal: basis.len(),
        evaluation: 0,
    };
    finish(config, points, Vec::new(), None, counts, wall_time, sol.condition)
}

/// Named experiment batches regenerating the reference tables.
pub const PRESET_NAMES: [&str; 7] = ["table2", "table3", "table4drm", "table5drm", "table6", "table7", "table8"];

fn drm(name: String, problem: &str, count: usize) -> ExperimentConfig {
    ExperimentConfig::new(
        name,
        problem,
        Method::Drm {
            boundary_half: 256,
            nodes: NodeSource::Lattice { count },
        },
    )
}

pub fn preset(name: &str) -> Result<Vec<ExperimentConfig>> {
    let ads = |problem: &str| {
        (1..=3)
            .map(|k1| ExperimentConfig::new(format!("{name}_k1_{k1}"), problem, Method::Ads { layers: 10, k1 }))
            .collect()
    };
    let series = |problem: &str, counts: &[usize]| {
        counts
            .iter()
            .map(|&m| drm(format!("{name}_m{m}"), problem, m))
            .collect()
    };
    Ok(match name {
        "table2" => ads("heart"),
        "table3" => ads("ellipse"),
        "table4drm" => vec![drm(format!("{name}_m196"), "heart", 196)],
        "table5drm" => vec![drm(format!("{name}_m208"), "ellipse", 208)],
        "table6" => series("heart", &[9, 14, 21, 30, 41]),
        "table7" => series("ellipse", &[9, 16, 21, 32, 45]),
        "table8" => [15, 27, 79, 136]
            .iter()
            .map(|&m| {
                ExperimentConfig::new(
                    format!("{name}_n16_m{m}"),
                    "pinched_ball",
                    Method::Drm3d {
                        polar: 16,
                        nodes: NodeSource::Lattice { count: m },
                        field_refinement: FIELD_REFINEMENT,
                    },
                )
            })
            .collect(),
        _ => {
            return Err(LeviError::Config(format!(
                "unknown preset '{name}', expected one of {}",
                PRESET_NAMES.join(", ")
            )))
        }
    })
}
