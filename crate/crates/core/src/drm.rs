//! Dual reciprocity discretization in 2D.
//!
//! The volume density is expanded as `μ̃ = Σ_k α_k f_k` with `f_k = 1 + |x − x_k|`.
//! Each `f_k` is the Laplacian of a radial `f̂_k`, so Green's identity turns the
//! volume potential of `f_k` into boundary integrals:
//!
//! `D_k(x) = ∫_Ω Φ f_k dy = ∫_{∂Ω} (Φ ∂_ν f̂_k − f̂_k ∂_ν Φ) ds − f̂_k(x)`.

use nalgebra::{SVector, Vector2};
use rayon::prelude::*;

use crate::error::{LeviError, Result};
use crate::geometry::{CurvePoint, Point2, StarDomain2D};
use crate::kernels::{k12_value, k22_value};
use crate::linalg::{solve_system, DenseMatrix};
use crate::problem::Problem2D;
use crate::quadrature::{log_weight_profile, trig_log_weights};

/// `(a, b)` with `f̂(r) = a r² + b r³` and `Δf̂ = 1 + r` in dimension `D`.
const fn fhat_coefficients<const D: usize>() -> (f64, f64) {
    const { assert!(D == 2 || D == 3, "radial basis defined for D = 2, 3") };
    if D == 2 {
        (1.0 / 4.0, 1.0 / 9.0)
    } else {
        (1.0 / 6.0, 1.0 / 12.0)
    }
}

/// `f_k(x) = 1 + |x − x_k|`
pub fn rbf_f<const D: usize>(center: &SVector<f64, D>, x: &SVector<f64, D>) -> f64 {
    1.0 + (x - center).norm()
}

/// `f̂_k(x)`, the radial solution of `Δf̂ = f_k`.
pub fn rbf_fhat<const D: usize>(center: &SVector<f64, D>, x: &SVector<f64, D>) -> f64 {
    let (a, b) = fhat_coefficients::<D>();
    let r = (x - center).norm();
    r * r * (a + b * r)
}

/// `f̂′(r)`
pub fn rbf_fhat_radial_derivative<const D: usize>(r: f64) -> f64 {
    let (a, b) = fhat_coefficients::<D>();
    r * (2.0 * a + 3.0 * b * r)
}

/// `∇f̂_k(x) = f̂′(r)(x − x_k)/r`, smooth through `x = x_k`.
pub fn rbf_grad_fhat<const D: usize>(center: &SVector<f64, D>, x: &SVector<f64, D>) -> SVector<f64, D> {
    let (a, b) = fhat_coefficients::<D>();
    let d = x - center;
    d * (2.0 * a + 3.0 * b * d.norm())
}

/// `∂_ν f̂_k(y) = f̂′(r)(y − x_k)·ν/r`.
pub fn rbf_normal_deriv<const D: usize>(
    center: &SVector<f64, D>,
    y: &SVector<f64, D>,
    normal: &SVector<f64, D>,
) -> Result<f64> {
    let d = y - center;
    let r = d.norm();
    if r == 0.0 {
        return Err(LeviError::Singularity(
            "normal derivative requested at the basis center".into(),
        ));
    }
    Ok(rbf_fhat_radial_derivative::<D>(r) * d.dot(normal) / r)
}

/// Internal nodes `x_k` carrying the radial basis.
#[derive(Debug, Clone, PartialEq)]
pub struct RbfBasis<const D: usize> {
    nodes: Vec<SVector<f64, D>>,
}

impl<const D: usize> RbfBasis<D> {
    /// Rejects empty sets, non-finite coordinates and coincident nodes.
    pub fn new(nodes: Vec<SVector<f64, D>>) -> Result<Self> {
        if nodes.is_empty() {
            return Err(LeviError::Nodes("basis needs at least one node".into()));
        }
        if nodes.iter().any(|p| p.iter().any(|c| !c.is_finite())) {
            return Err(LeviError::Nodes("non-finite node coordinate".into()));
        }
        for i in 0..nodes.len() {
            for j in 0..i {
                if (nodes[i] - nodes[j]).norm() < 1e-12 {
                    return Err(LeviError::Nodes(format!("nodes {j} and {i} coincide")));
                }
            }
        }
        Ok(Self { nodes })
    }

    pub fn nodes(&self) -> &[SVector<f64, D>] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `μ̃(x) = Σ α_k f_k(x)`
    pub fn expand(&self, alpha: &[f64], x: &SVector<f64, D>) -> f64 {
        self.nodes.iter().zip(alpha).map(|(c, a)| a * rbf_f(c, x)).sum()
    }
}

impl RbfBasis<2> {
    /// Checks that every node lies inside the domain.
    pub fn check_inside(&self, domain: &StarDomain2D) -> Result<()> {
        match self.nodes.iter().position(|p| !domain.contains(p)) {
            Some(i) => Err(LeviError::Nodes(format!(
                "node {i} at ({}, {}) is not inside the domain",
                self.nodes[i].x, self.nodes[i].y
            ))),
            None => Ok(()),
        }
    }
}

/// Equispaced boundary nodes `t_j = jπ/n`, `j < 2n`.
#[derive(Debug, Clone)]
pub struct BoundaryRule {
    domain: StarDomain2D,
    half_count: usize,
    samples: Vec<CurvePoint>,
}

impl BoundaryRule {
    pub fn new(domain: &StarDomain2D, half_count: usize) -> Result<Self> {
        if half_count < 2 {
            return Err(LeviError::Quadrature(format!(
                "boundary half-count must be at least 2 (got {half_count})"
            )));
        }
        let samples = (0..2 * half_count)
            .map(|j| domain.sample(j as f64 * std::f64::consts::PI / half_count as f64))
            .collect();
        Ok(Self {
            domain: domain.clone(),
            half_count,
            samples,
        })
    }

    pub fn half_count(&self) -> usize {
        self.half_count
    }

    pub fn node_count(&self) -> usize {
        self.samples.len()
    }

    pub fn samples(&self) -> &[CurvePoint] {
        &self.samples
    }

    pub fn domain(&self) -> &StarDomain2D {
        &self.domain
    }

    fn check_clear(&self, x: &Point2) -> Result<()> {
        if self.samples.iter().any(|s| (x - s.point).norm() < 1e-12) {
            return Err(LeviError::NearSingular(format!(
                "({}, {}) coincides with a boundary node",
                x.x, x.y
            )));
        }
        Ok(())
    }

    /// `∫_{∂Ω} ∂_{ν(y)}Φ(x, y) ψ(y) ds(y)` by the trapezoidal rule.
    pub fn double_layer(&self, density: &[f64], x: &Point2) -> f64 {
        let mut sum = 0.0;
        for (s, v) in self.samples.iter().zip(density) {
            let d = x - s.point;
            sum += d.dot(&s.normal) / d.norm_squared() * s.speed * v;
        }
        sum / self.node_count() as f64
    }
}

/// `D_k(x)` for an interior point by the trapezoidal rule on both boundary integrals.
pub fn dk_interior(center: &Point2, rule: &BoundaryRule, x: &Point2) -> Result<f64> {
    rule.check_clear(x)?;
    let mut sum = 0.0;
    for s in rule.samples() {
        let d = x - s.point;
        let r2 = d.norm_squared();
        let q = rbf_normal_deriv(center, &s.point, &s.normal)?;
        let fh = rbf_fhat(center, &s.point);
        sum += (-0.5 * r2.ln() * q - d.dot(&s.normal) / r2 * fh) * s.speed;
    }
    Ok(sum / rule.node_count() as f64 - rbf_fhat(center, x))
}

/// `g·∇D_k(x)` for an interior point.
pub fn dk_interior_gradient(center: &Point2, rule: &BoundaryRule, x: &Point2, g: &Vector2<f64>) -> Result<f64> {
    rule.check_clear(x)?;
    let mut sum = 0.0;
    for s in rule.samples() {
        let d = x - s.point;
        let q = rbf_normal_deriv(center, &s.point, &s.normal)?;
        let fh = rbf_fhat(center, &s.point);
        sum += -d.dot(g) / d.norm_squared() * q * s.speed + k12_value(x, g, s) * fh;
    }
    Ok(sum / rule.node_count() as f64 - rbf_grad_fhat(center, x).dot(g))
}

/// `ln(|x(t) − x(τ)|² / (4 sin²((t−τ)/2)))`, diagonal `ln|x′(t)|²`.
fn log_ratio(at: &CurvePoint, from: &CurvePoint) -> f64 {
    let half = 0.5 * (at.t - from.t);
    if half.sin().abs() < 1e-12 {
        return (at.speed * at.speed).ln();
    }
    ((at.local - from.local).norm_squared() / (4.0 * half.sin().powi(2))).ln()
}

/// `D_k(x(t))` on the boundary.
///
/// Evaluates `−2D_k = Σ_j G_j q̂_j + (1/2n) Σ_j K22(t, t_j) f̂_j + f̂_k(x(t))`, where
/// `G_j` carries the logarithmic weights and `q̂_j = ∂_ν f̂_k(y_j)|x′(t_j)|`.
pub fn dk_boundary(center: &Point2, rule: &BoundaryRule, t: f64) -> Result<f64> {
    let at = rule.domain().sample(t);
    let n = rule.half_count();
    let weights = trig_log_weights(t, n);
    let mut sum = 0.0;
    for (j, s) in rule.samples().iter().enumerate() {
        let q = rbf_normal_deriv(center, &s.point, &s.normal)? * s.speed;
        let g = weights[j] + log_ratio(&at, s) / (2 * n) as f64;
        let fh = rbf_fhat(center, &s.point);
        sum += g * q + k22_value(&at, s) * fh / (2 * n) as f64;
    }
    Ok(-0.5 * (sum + rbf_fhat(center, &at.point)))
}

/// Collocation system in the order `(α_1..α_M, ψ̃_0..ψ̃_{2n−1})`.
#[derive(Debug, Clone)]
pub struct DrmSystem {
    pub matrix: DenseMatrix,
    pub rhs: Vec<f64>,
}

pub fn assemble_drm(problem: &Problem2D, basis: &RbfBasis<2>, half_count: usize) -> Result<DrmSystem> {
    let rule = BoundaryRule::new(&problem.domain, half_count)?;
    assemble_on_rule(problem, basis, &rule)
}

fn assemble_on_rule(problem: &Problem2D, basis: &RbfBasis<2>, rule: &BoundaryRule) -> Result<DrmSystem> {
    basis.check_inside(&problem.domain)?;
    let m = basis.len();
    let nb = rule.node_count();
    let n = rule.half_count();
    let size = m + nb;
    let inv = 1.0 / (2 * n) as f64;
    let samples = rule.samples();
    let mut matrix = DenseMatrix::zeros(size, size);
    let mut rhs = vec![0.0; size];

    // q̂_{jm} and f̂_{jm}, boundary-major
    let mut qhat = vec![0.0; nb * m];
    let mut fhat = vec![0.0; nb * m];
    for (j, s) in samples.iter().enumerate() {
        for (k, c) in basis.nodes().iter().enumerate() {
            qhat[j * m + k] = rbf_normal_deriv(c, &s.point, &s.normal)? * s.speed;
            fhat[j * m + k] = rbf_fhat(c, &s.point);
        }
    }

    let (interior, boundary) = matrix.as_mut_slice().split_at_mut(m * size);
    interior
        .par_chunks_mut(size)
        .zip(rhs[..m].par_iter_mut())
        .enumerate()
        .try_for_each(|(k, (row, b))| -> Result<()> {
            let x = basis.nodes()[k];
            let g = problem.sigma.grad_log_sigma(&x);
            for (mm, c) in basis.nodes().iter().enumerate() {
                let dk11 = if g == Vector2::zeros() {
                    0.0
                } else {
                    dk_interior_gradient(c, rule, &x, &g)?
                };
                row[mm] = rbf_f(c, &x) - dk11;
            }
            for (j, s) in samples.iter().enumerate() {
                row[m + j] = inv * k12_value(&x, &g, s);
            }
            *b = problem.source_at(&x) / problem.sigma.sigma(&x);
            Ok(())
        })?;

    let profile = log_weight_profile(n);
    boundary
        .par_chunks_mut(size)
        .zip(rhs[m..].par_iter_mut())
        .enumerate()
        .for_each(|(i, (row, b))| {
            let at = &samples[i];
            for (j, s) in samples.iter().enumerate() {
                let g = profile[(i + nb - j) % nb] + inv * log_ratio(at, s);
                let k22 = inv * k22_value(at, s);
                for mm in 0..m {
                    row[mm] += g * qhat[j * m + mm] + k22 * fhat[j * m + mm];
                }
                row[m + j] = if i == j { 1.0 } else { 0.0 } - k22;
            }
            for (mm, c) in basis.nodes().iter().enumerate() {
                row[mm] += rbf_fhat(c, &at.point);
            }
            *b = -2.0 * problem.boundary_at(&at.point);
        });

    if let Some((row, col)) = matrix.find_non_finite() {
        let block = match (row < m, col < m) {
            (true, true) => "DK11",
            (true, false) => "K12",
            (false, true) => "DK21",
            (false, false) => "K22",
        };
        return Err(LeviError::Assembly { block, row, col });
    }
    Ok(DrmSystem { matrix, rhs })
}

/// Basis coefficients and boundary density.
#[derive(Debug, Clone)]
pub struct DrmSolution {
    pub basis: RbfBasis<2>,
    pub alpha: Vec<f64>,
    pub psi_tilde: Vec<f64>,
    rule: BoundaryRule,
    pub condition: f64,
    pub relative_residual: f64,
}

impl DrmSolution {
    /// Boundary half-count `n`.
    pub fn half_count(&self) -> usize {
        self.rule.half_count()
    }

    pub fn rule(&self) -> &BoundaryRule {
        &self.rule
    }

    /// `μ̃(x) = Σ α_k f_k(x)`
    pub fn mu_tilde(&self, x: &Point2) -> f64 {
        self.basis.expand(&self.alpha, x)
    }
}

pub fn solve_drm(problem: &Problem2D, basis: &RbfBasis<2>, half_count: usize) -> Result<DrmSolution> {
    let rule = BoundaryRule::new(&problem.domain, half_count)?;
    let system = assemble_on_rule(problem, basis, &rule)?;
    let solved = solve_system(&system.matrix, &system.rhs)?;
    let m = basis.len();
    Ok(DrmSolution {
        basis: basis.clone(),
        alpha: solved.solution[..m].to_vec(),
        psi_tilde: solved.solution[m..].to_vec(),
        rule,
        condition: solved.condition,
        relative_residual: solved.relative_residual,
    })
}

/// Value of the representation and whether `x` lies within one boundary mesh width of `∂Ω`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DrmValue {
    pub value: f64,
    pub degraded: bool,
}

/// `u(x) = Σ_k α_k D_k(x) + ∫_{∂Ω} ψ̃ ∂_νΦ ds`.
pub fn eval_drm_solution(sol: &DrmSolution, problem: &Problem2D, x: &Point2) -> Result<DrmValue> {
    let domain = &problem.domain;
    if !domain.contains(x) {
        return Err(LeviError::Domain(format!("({}, {}) is not inside the domain", x.x, x.y)));
    }
    let mut value = sol.rule.double_layer(&sol.psi_tilde, x);
    for (c, a) in sol.basis.nodes().iter().zip(&sol.alpha) {
        value += a * dk_interior(c, &sol.rule, x)?;
    }
    let perimeter: f64 =
        sol.rule.samples().iter().map(|s| s.speed).sum::<f64>() * std::f64::consts::TAU / sol.rule.node_count() as f64;
    let degraded = domain.distance_to_boundary(x) < perimeter / sol.rule.node_count() as f64;
    Ok(DrmValue { value, degraded })
}

/// Evaluates at many points in parallel.
pub fn eval_drm_many(sol: &DrmSolution, problem: &Problem2D, points: &[Point2]) -> Result<Vec<f64>> {
    points
        .par_iter()
        .map(|x| eval_drm_solution(sol, problem, x).map(|v| v.value))
        .collect()
}
