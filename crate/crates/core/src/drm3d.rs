//! Dual reciprocity discretization on star-shaped surfaces in 3D.
//!
//! Surface integrals use a Gauss–Legendre rule in `cos θ` times the trapezoidal
//! rule in `φ`. Weakly singular integrals at a surface node are computed in a
//! rotated frame that moves the node to the north pole, where the `sin θ′`
//! factor of the surface measure cancels the `1/|x − y|` singularity; the
//! unknown density is carried to the rotated points by local biquadratic
//! interpolation on the original grid.

use std::f64::consts::PI;

use nalgebra::Vector3;
use rayon::prelude::*;

use crate::drm::{rbf_f, rbf_fhat, rbf_grad_fhat, rbf_normal_deriv, RbfBasis};
use crate::error::{LeviError, Result};
use crate::geometry::{direction_angles, unit_direction, Point3, SurfaceNode, SurfacePatch3D};
use crate::kernels::{double_layer, fundamental_solution, grad_fundamental, gradient_double_layer};
use crate::linalg::{solve_system, DenseMatrix};
use crate::problem::Problem3D;
use crate::quadrature::gauss_legendre;

/// Product grid `θ_j = arccos t_j`, `φ_k = πk/N` mapped onto the surface.
#[derive(Debug, Clone)]
pub struct SphereGrid {
    surface: SurfacePatch3D,
    polar: usize,
    /// Polar angles in increasing order.
    theta: Vec<f64>,
    nodes: Vec<SurfaceNode>,
    weights: Vec<f64>,
    rotated: Vec<RotatedPoint>,
    field: FieldRule,
}

/// Refined product rule for integrals evaluated away from the surface.
///
/// Each refined node carries the interpolation stencil that maps grid values
/// of the unknown density onto it.
#[derive(Debug, Clone)]
pub struct FieldRule {
    pub nodes: Vec<SurfaceNode>,
    pub weights: Vec<f64>,
    pub stencils: Vec<Vec<(usize, f64)>>,
}

#[derive(Debug, Clone, Copy)]
struct RotatedPoint {
    /// Unit direction in the frame whose pole is the collocation direction.
    local: Vector3<f64>,
    /// Quadrature weight including `sin θ′`.
    weight: f64,
}

/// Which weakly singular kernel to integrate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SurfaceKernel {
    /// `Φ(x, y) = 1/(4π|x − y|)`
    SingleLayer,
    /// `∂_{ν(y)}Φ(x, y)`
    DoubleLayer,
}

impl SurfaceKernel {
    fn eval(self, x: &Point3, y: &SurfaceNode) -> Result<f64> {
        match self {
            SurfaceKernel::SingleLayer => fundamental_solution(x, &y.point),
            SurfaceKernel::DoubleLayer => double_layer(x, &y.point, &y.normal),
        }
    }
}

/// Default refinement of the field rule relative to the collocation grid.
pub const FIELD_REFINEMENT: usize = 3;

fn product_nodes(surface: &SurfacePatch3D, polar: usize) -> Result<(Vec<f64>, Vec<SurfaceNode>, Vec<f64>)> {
    let rule = gauss_legendre(polar)?;
    // ascending θ means descending cos θ
    let pairs: Vec<(f64, f64)> = rule
        .nodes
        .iter()
        .zip(&rule.weights)
        .rev()
        .map(|(&t, &w)| (t.acos(), w))
        .collect();
    let dphi = PI / polar as f64;
    let mut nodes = Vec::with_capacity(2 * polar * polar);
    let mut weights = Vec::with_capacity(2 * polar * polar);
    for &(th, w) in &pairs {
        for k in 0..2 * polar {
            let node = surface.node(&unit_direction(th, k as f64 * dphi));
            weights.push(w * dphi * node.density);
            nodes.push(node);
        }
    }
    Ok((pairs.iter().map(|p| p.0).collect(), nodes, weights))
}

pub fn sphere_grid(surface: &SurfacePatch3D, polar: usize) -> Result<SphereGrid> {
    sphere_grid_with(surface, polar, FIELD_REFINEMENT)
}

/// Grid with `2N²` collocation nodes and a field rule refined by `refinement` per direction.
pub fn sphere_grid_with(surface: &SurfacePatch3D, polar: usize, refinement: usize) -> Result<SphereGrid> {
    if refinement == 0 {
        return Err(LeviError::Quadrature("field refinement must be positive".into()));
    }
    if polar < 2 {
        return Err(LeviError::Quadrature(format!("polar count must be at least 2 (got {polar})")));
    }
    let rule = gauss_legendre(polar)?;
    let dphi = PI / polar as f64;
    let (theta, nodes, weights) = product_nodes(surface, polar)?;

    let mut rotated = Vec::with_capacity(2 * polar * polar);
    for (t, w) in rule.on_interval(0.0, PI) {
        for k in 0..2 * polar {
            rotated.push(RotatedPoint {
                local: unit_direction(t, k as f64 * dphi),
                weight: w * dphi * t.sin(),
            });
        }
    }
    let mut grid = SphereGrid {
        surface: surface.clone(),
        polar,
        theta,
        nodes,
        weights,
        rotated,
        field: FieldRule {
            nodes: Vec::new(),
            weights: Vec::new(),
            stencils: Vec::new(),
        },
    };
    grid.field = if refinement == 1 {
        FieldRule {
            nodes: grid.nodes.clone(),
            weights: grid.weights.clone(),
            stencils: (0..grid.len()).map(|i| vec![(i, 1.0)]).collect(),
        }
    } else {
        let (_, nodes, weights) = product_nodes(surface, refinement * polar)?;
        let stencils = nodes
            .iter()
            .map(|y| grid.interpolation_stencil(&y.direction).to_vec())
            .collect();
        FieldRule {
            nodes,
            weights,
            stencils,
        }
    };
    Ok(grid)
}

impl SphereGrid {
    pub fn polar(&self) -> usize {
        self.polar
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[SurfaceNode] {
        &self.nodes
    }

    /// Surface quadrature weights, one per node.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn surface(&self) -> &SurfacePatch3D {
        &self.surface
    }

    /// Flat index of node `(j, k)`.
    pub fn index(&self, j: usize, k: usize) -> usize {
        j * 2 * self.polar + k
    }

    /// Refined rule used for points off the surface.
    pub fn field(&self) -> &FieldRule {
        &self.field
    }

    /// `∫ h ds` by the product rule.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        self.weights.iter().zip(values).map(|(w, v)| w * v).sum()
    }

    /// Nine `(node, weight)` pairs interpolating grid values at direction `dir`.
    pub fn interpolation_stencil(&self, dir: &Vector3<f64>) -> [(usize, f64); 9] {
        let n = self.polar;
        let m = 2 * n;
        let (th, ph) = direction_angles(dir);
        let dphi = PI / n as f64;

        // extended polar index: −1 and n are reflections through the poles
        let ext_theta = |j: isize| -> f64 {
            if j < 0 {
                -self.theta[0]
            } else if j as usize >= n {
                2.0 * PI - self.theta[n - 1]
            } else {
                self.theta[j as usize]
            }
        };
        let nearest = self
            .theta
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - th).abs().total_cmp(&(b.1 - th).abs()))
            .map(|(j, _)| j as isize)
            .unwrap_or(0);
        let tj = [nearest - 1, nearest, nearest + 1];
        let tv = tj.map(ext_theta);

        let kc = (ph / dphi).round() as isize;
        let kv = [kc - 1, kc, kc + 1];
        let pv = kv.map(|k| k as f64 * dphi);

        let lagrange = |x: f64, pts: &[f64; 3], i: usize| -> f64 {
            let mut l = 1.0;
            for (q, p) in pts.iter().enumerate() {
                if q != i {
                    l *= (x - p) / (pts[i] - p);
                }
            }
            l
        };

        let mut out = [(0usize, 0.0f64); 9];
        for a in 0..3 {
            let (row, shift) = if tj[a] < 0 {
                (0, n as isize)
            } else if tj[a] as usize >= n {
                (n - 1, n as isize)
            } else {
                (tj[a] as usize, 0)
            };
            let la = lagrange(th, &tv, a);
            for b in 0..3 {
                let col = (kv[b] + shift).rem_euclid(m as isize) as usize;
                out[3 * a + b] = (self.index(row, col), la * lagrange(ph, &pv, b));
            }
        }
        out
    }

    fn frame(&self, pole: &Vector3<f64>) -> [Vector3<f64>; 3] {
        let helper = if pole.x.abs() < 0.9 { Vector3::x() } else { Vector3::y() };
        let e1 = (helper - pole * pole.dot(&helper)).normalize();
        let e2 = pole.cross(&e1);
        [e1, e2, *pole]
    }

    /// Surface nodes and weights of the rotated rule centered on node `i`.
    fn rotated_nodes(&self, i: usize) -> Vec<(SurfaceNode, f64)> {
        let [e1, e2, e3] = self.frame(&self.nodes[i].direction);
        self.rotated
            .iter()
            .map(|rp| {
                let dir = e1 * rp.local.x + e2 * rp.local.y + e3 * rp.local.z;
                let y = self.surface.node(&dir);
                (y, rp.weight * y.density)
            })
            .collect()
    }

    /// Row `w` with `∫ K(x_i, y) ψ(y) ds(y) ≈ Σ_n w_n ψ_n` for grid values `ψ`.
    pub fn singular_row(&self, kernel: SurfaceKernel, i: usize) -> Result<Vec<f64>> {
        let x = self.nodes[i].point;
        let mut row = vec![0.0; self.len()];
        for (y, w) in self.rotated_nodes(i) {
            let k = kernel.eval(&x, &y)? * w;
            for (idx, l) in self.interpolation_stencil(&y.direction) {
                row[idx] += k * l;
            }
        }
        Ok(row)
    }
}

/// `∫_{∂Ω} K(x_i, y) ψ(y) ds(y)` at grid node `i` for grid values of `ψ`.
pub fn singular_surface_integral(grid: &SphereGrid, kernel: SurfaceKernel, density: &[f64], i: usize) -> Result<f64> {
    if density.len() != grid.len() {
        return Err(LeviError::Dimension(format!(
            "density has {} values for {} nodes",
            density.len(),
            grid.len()
        )));
    }
    let row = grid.singular_row(kernel, i)?;
    Ok(row.iter().zip(density).map(|(a, b)| a * b).sum())
}

/// `∫_{∂Ω} K(x_i, y) h(y) ds(y)` for a density known at every surface point.
pub fn singular_surface_integral_fn(
    grid: &SphereGrid,
    kernel: SurfaceKernel,
    density: impl Fn(&SurfaceNode) -> f64,
    i: usize,
) -> Result<f64> {
    let x = grid.nodes[i].point;
    let mut sum = 0.0;
    for (y, w) in grid.rotated_nodes(i) {
        sum += kernel.eval(&x, &y)? * density(&y) * w;
    }
    Ok(sum)
}

/// `D_k(x)` for an interior point by the product rule.
pub fn dk_interior_3d(center: &Point3, grid: &SphereGrid, x: &Point3) -> Result<f64> {
    let mut sum = 0.0;
    for (y, w) in grid.field.nodes.iter().zip(&grid.field.weights) {
        let q = rbf_normal_deriv(center, &y.point, &y.normal)?;
        sum += w * (fundamental_solution(x, &y.point)? * q - double_layer(x, &y.point, &y.normal)? * rbf_fhat(center, &y.point));
    }
    Ok(sum - rbf_fhat(center, x))
}

/// Collocation system in the order `(α_1..α_M, ψ̃_1..ψ̃_{2N²})`.
#[derive(Debug, Clone)]
pub struct Drm3dSystem {
    pub matrix: DenseMatrix,
    pub rhs: Vec<f64>,
}

pub fn assemble_drm3d(problem: &Problem3D, basis: &RbfBasis<3>, grid: &SphereGrid) -> Result<Drm3dSystem> {
    if let Some(i) = basis.nodes().iter().position(|p| !problem.domain.contains(p)) {
        return Err(LeviError::Nodes(format!("node {i} is not inside the surface")));
    }
    let m = basis.len();
    let nb = grid.len();
    let size = m + nb;
    let mut matrix = DenseMatrix::zeros(size, size);
    let mut rhs = vec![0.0; size];
    let centers = basis.nodes();

    let (interior, boundary) = matrix.as_mut_slice().split_at_mut(m * size);
    interior
        .par_chunks_mut(size)
        .zip(rhs[..m].par_iter_mut())
        .enumerate()
        .try_for_each(|(k, (row, b))| -> Result<()> {
            let x = centers[k];
            let g = problem.sigma.grad_log_sigma(&x);
            for (mm, c) in centers.iter().enumerate() {
                row[mm] = rbf_f(c, &x) + rbf_grad_fhat(c, &x).dot(&g);
            }
            let field = &grid.field;
            for ((y, w), stencil) in field.nodes.iter().zip(&field.weights).zip(&field.stencils) {
                let gphi = grad_fundamental(&x, &y.point)?.dot(&g);
                let gdl = gradient_double_layer(&x, &g, &y.point, &y.normal)?;
                for (mm, c) in centers.iter().enumerate() {
                    let q = rbf_normal_deriv(c, &y.point, &y.normal)?;
                    row[mm] -= w * (gphi * q + gdl * rbf_fhat(c, &y.point));
                }
                for &(idx, l) in stencil {
                    row[m + idx] += w * gdl * l;
                }
            }
            *b = problem.source_at(&x) / problem.sigma.sigma(&x);
            Ok(())
        })?;

    boundary
        .par_chunks_mut(size)
        .zip(rhs[m..].par_iter_mut())
        .enumerate()
        .try_for_each(|(i, (row, b))| -> Result<()> {
            let x = grid.nodes[i].point;
            for (y, w) in grid.rotated_nodes(i) {
                let sl = fundamental_solution(&x, &y.point)? * w;
                let dl = double_layer(&x, &y.point, &y.normal)? * w;
                for (mm, c) in centers.iter().enumerate() {
                    row[mm] += sl * rbf_normal_deriv(c, &y.point, &y.normal)? - dl * rbf_fhat(c, &y.point);
                }
                for (idx, l) in grid.interpolation_stencil(&y.direction) {
                    row[m + idx] += dl * l;
                }
            }
            for (mm, c) in centers.iter().enumerate() {
                row[mm] -= 0.5 * rbf_fhat(c, &x);
            }
            row[m + i] -= 0.5;
            *b = problem.boundary_at(&x);
            Ok(())
        })?;

    if let Some((row, col)) = matrix.find_non_finite() {
        let block = match (row < m, col < m) {
            (true, true) => "DK11",
            (true, false) => "K12",
            (false, true) => "DK21",
            (false, false) => "K22",
        };
        return Err(LeviError::Assembly { block, row, col });
    }
    Ok(Drm3dSystem { matrix, rhs })
}

#[derive(Debug, Clone)]
pub struct Drm3dSolution {
    pub basis: RbfBasis<3>,
    pub alpha: Vec<f64>,
    pub psi_tilde: Vec<f64>,
    grid: SphereGrid,
    pub condition: f64,
    pub relative_residual: f64,
}

impl Drm3dSolution {
    pub fn grid(&self) -> &SphereGrid {
        &self.grid
    }
}

pub fn solve_drm3d(problem: &Problem3D, basis: &RbfBasis<3>, polar: usize) -> Result<Drm3dSolution> {
    solve_drm3d_on(problem, basis, sphere_grid(&problem.domain, polar)?)
}

pub fn solve_drm3d_on(problem: &Problem3D, basis: &RbfBasis<3>, grid: SphereGrid) -> Result<Drm3dSolution> {
    let system = assemble_drm3d(problem, basis, &grid)?;
    let solved = solve_system(&system.matrix, &system.rhs)?;
    let m = basis.len();
    Ok(Drm3dSolution {
        basis: basis.clone(),
        alpha: solved.solution[..m].to_vec(),
        psi_tilde: solved.solution[m..].to_vec(),
        grid,
        condition: solved.condition,
        relative_residual: solved.relative_residual,
    })
}

/// `u(x) = Σ_k α_k D_k(x) + ∫_{∂Ω} ψ̃ ∂_νΦ ds`.
pub fn eval_drm3d_solution(sol: &Drm3dSolution, problem: &Problem3D, x: &Point3) -> Result<f64> {
    if !problem.domain.contains(x) {
        return Err(LeviError::Domain(format!(
            "({}, {}, {}) is not inside the surface",
            x.x, x.y, x.z
        )));
    }
    let grid = &sol.grid;
    let mut value = 0.0;
    let field = &grid.field;
    for ((y, w), stencil) in field.nodes.iter().zip(&field.weights).zip(&field.stencils) {
        let psi: f64 = stencil.iter().map(|&(i, l)| l * sol.psi_tilde[i]).sum();
        value += w * double_layer(x, &y.point, &y.normal)? * psi;
    }
    for (c, a) in sol.basis.nodes().iter().zip(&sol.alpha) {
        value += a * dk_interior_3d(c, grid, x)?;
    }
    Ok(value)
}

pub fn eval_drm3d_many(sol: &Drm3dSolution, problem: &Problem3D, points: &[Point3]) -> Result<Vec<f64>> {
    points.par_iter().map(|x| eval_drm3d_solution(sol, problem, x)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::harmonic_3d;
    use crate::nodes::spatial_lattice;
    use approx::assert_abs_diff_eq;

    #[test]
    fn small_grid_nodes() {
        let g = sphere_grid(&SurfacePatch3D::unit_sphere(), 2).unwrap();
        assert_eq!(g.len(), 8);
        let t = (1.0f64 / 3.0).sqrt();
        assert_abs_diff_eq!(g.theta()[0], t.acos(), epsilon = 1e-14);
        assert_abs_diff_eq!(g.theta()[1], (-t).acos(), epsilon = 1e-14);
    }

    #[test]
    fn unit_sphere_area() {
        let g = sphere_grid(&SurfacePatch3D::unit_sphere(), 16).unwrap();
        assert_abs_diff_eq!(g.weights().iter().sum::<f64>(), 4.0 * PI, epsilon = 1e-10);
        assert!(g.weights().iter().all(|w| *w > 0.0));
    }

    #[test]
    fn pinched_ball_area_converges() {
        let ball = SurfacePatch3D::pinched_ball();
        let area = |n| -> f64 { sphere_grid(&ball, n).unwrap().weights().iter().sum() };
        let reference = area(128);
        assert!((area(16) - reference).abs() <= 1e-4);
        assert!((area(32) - reference).abs() <= 1e-6);
        assert!((area(64) - reference).abs() <= 1e-11);
    }

    #[test]
    fn interpolation_reproduces_quadratics() {
        let g = sphere_grid(&SurfacePatch3D::pinched_ball(), 16).unwrap();
        let f = |d: &Vector3<f64>| 1.0 + 0.3 * d.x - 0.2 * d.z + 0.5 * d.x * d.y;
        let values: Vec<f64> = g.nodes().iter().map(|n| f(&n.direction)).collect();
        for dir in [Vector3::new(0.3, -0.2, 0.93), Vector3::new(0.0, 0.0, 1.0), Vector3::new(-0.5, 0.6, -0.62)] {
            let dir = dir.normalize();
            let v: f64 = g.interpolation_stencil(&dir).iter().map(|(i, w)| values[*i] * w).sum();
            assert!((v - f(&dir)).abs() < 2e-3, "{v} vs {}", f(&dir));
        }
        let ones: f64 = g.interpolation_stencil(&Vector3::new(0.1, 0.2, 0.97).normalize()).iter().map(|p| p.1).sum();
        assert_abs_diff_eq!(ones, 1.0, epsilon = 1e-13);
    }

    #[test]
    fn single_layer_on_unit_sphere() {
        let g = sphere_grid(&SurfacePatch3D::unit_sphere(), 16).unwrap();
        let ones = vec![1.0; g.len()];
        for i in [0, 17, 300] {
            let v = singular_surface_integral(&g, SurfaceKernel::SingleLayer, &ones, i).unwrap();
            assert!((v - 1.0).abs() <= 1e-3, "{v}");
        }
    }

    #[test]
    fn double_layer_gauss_identity() {
        for (surface, tol) in [(SurfacePatch3D::unit_sphere(), 1e-10), (SurfacePatch3D::pinched_ball(), 5e-3)] {
            let g = sphere_grid(&surface, 16).unwrap();
            let ones = vec![1.0; g.len()];
            for i in 0..g.len() {
                let v = singular_surface_integral(&g, SurfaceKernel::DoubleLayer, &ones, i).unwrap();
                assert!((v + 0.5).abs() <= tol, "node {i}: {v}");
            }
        }
    }

    #[test]
    fn density_length_checked() {
        let g = sphere_grid(&SurfacePatch3D::unit_sphere(), 4).unwrap();
        assert!(matches!(
            singular_surface_integral(&g, SurfaceKernel::SingleLayer, &[1.0], 0),
            Err(LeviError::Dimension(_))
        ));
    }

    #[test]
    fn system_size() {
        let p = harmonic_3d("b", SurfacePatch3D::pinched_ball(), 1.0);
        let basis = RbfBasis::new(spatial_lattice(&p.domain, 15).unwrap()).unwrap();
        let grid = sphere_grid(&p.domain, 16).unwrap();
        assert_eq!(assemble_drm3d(&p, &basis, &grid).unwrap().matrix.rows(), 527);
    }

    #[test]
    fn constant_sigma_reproduces_harmonic_function() {
        let p = harmonic_3d("b", SurfacePatch3D::pinched_ball(), 1.0);
        let basis = RbfBasis::new(spatial_lattice(&p.domain, 15).unwrap()).unwrap();
        let sol = solve_drm3d(&p, &basis, 16).unwrap();
        assert!(sol.alpha.iter().all(|a| a.abs() <= 1e-10));
        for x in [Point3::new(0.1, 0.2, -0.3), Point3::new(-0.4, 0.5, 0.2), Point3::new(0.0, -0.8, 0.1)] {
            let v = eval_drm3d_solution(&sol, &p, &x).unwrap();
            assert!((v - p.exact_at(&x).unwrap()).abs() <= 5e-3, "{v}");
        }
    }

    #[test]
    fn field_rule_interpolates_grid_values() {
        let ball = SurfacePatch3D::pinched_ball();
        let coarse = sphere_grid_with(&ball, 8, 1).unwrap();
        assert_eq!(coarse.field().nodes.len(), coarse.len());
        assert!(coarse.field().stencils.iter().enumerate().all(|(i, s)| s == &vec![(i, 1.0)]));

        let g = sphere_grid_with(&ball, 16, 3).unwrap();
        let field = g.field();
        assert_eq!(field.nodes.len(), 2 * 48 * 48);
        let area: f64 = field.weights.iter().sum();
        assert_abs_diff_eq!(area, g.weights().iter().sum::<f64>(), epsilon = 1e-4);
        // density x_3 on the grid carried to the refined nodes
        let density: Vec<f64> = g.nodes().iter().map(|y| y.point.z).collect();
        let mut worst: f64 = 0.0;
        for (y, s) in field.nodes.iter().zip(&field.stencils) {
            let v: f64 = s.iter().map(|&(i, l)| l * density[i]).sum();
            worst = worst.max((v - y.point.z).abs());
        }
        assert!(worst < 5e-3, "{worst}");
        assert!(sphere_grid_with(&ball, 8, 0).is_err());
    }
}
