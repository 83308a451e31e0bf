//! Adaptive layered discretization of the coupled density system in 2D.
//!
//! Unknowns are the scaled volume density `μ̃ = μ/σ` on the interior rings of
//! a [`RadialScheme`] and the scaled boundary density `ψ̃ = ψ/σ` on the
//! boundary ring. The volume equation is collocated at every interior ring
//! node and the boundary equation at every boundary node.

use std::f64::consts::TAU;

use nalgebra::Vector2;
use rayon::prelude::*;

use crate::error::{LeviError, Result};
use crate::geometry::{CurvePoint, Point2, StarDomain2D};
use crate::kernels::{jacobian_at, k11_raw_value, k11_split_value, k12_value, k21_value, k22_value};
use crate::linalg::{solve_system, DenseMatrix};
use crate::problem::Problem2D;
use crate::quadrature::{cot_weight_profile, log_weight_profile, RadialScheme, Ring};

/// Geometry of one ring sampled at its angular nodes.
#[derive(Debug, Clone)]
pub struct RingNodes {
    pub ring: Ring,
    pub samples: Vec<CurvePoint>,
    /// Mapped nodes `p̃(ξ̃_k, t_j)`.
    pub points: Vec<Point2>,
    /// `J(ξ̃_k, t_j)`
    pub jacobians: Vec<f64>,
}

/// Node geometry of a scheme on a domain, shared by assembly and evaluation.
#[derive(Debug, Clone)]
pub struct AdsGrid {
    scheme: RadialScheme,
    rings: Vec<RingNodes>,
    offsets: Vec<usize>,
}

impl AdsGrid {
    pub fn new(domain: &StarDomain2D, scheme: &RadialScheme) -> Self {
        let rings = scheme
            .rings()
            .iter()
            .map(|ring| {
                let samples: Vec<CurvePoint> =
                    (0..ring.node_count()).map(|j| domain.sample(ring.angle(j))).collect();
                let points = samples
                    .iter()
                    .map(|s| domain.center() + s.local * ring.radius)
                    .collect();
                let jacobians = samples.iter().map(|s| jacobian_at(ring.radius, s)).collect();
                RingNodes {
                    ring: *ring,
                    samples,
                    points,
                    jacobians,
                }
            })
            .collect();
        Self {
            scheme: scheme.clone(),
            rings,
            offsets: scheme.offsets(),
        }
    }

    pub fn scheme(&self) -> &RadialScheme {
        &self.scheme
    }

    pub fn rings(&self) -> &[RingNodes] {
        &self.rings
    }

    pub fn interior(&self) -> &[RingNodes] {
        &self.rings[..self.rings.len() - 1]
    }

    pub fn boundary(&self) -> &RingNodes {
        self.rings.last().expect("scheme has a boundary ring")
    }

    /// Column of node `j` on ring `k` in the layer-major unknown vector.
    pub fn index(&self, k: usize, j: usize) -> usize {
        self.offsets[k] + j
    }

    pub fn unknowns(&self) -> usize {
        self.scheme.total_unknowns()
    }

    /// Locates `x` on a ring node to within `tol`.
    pub fn find_node(&self, x: &Point2, tol: f64) -> Option<(usize, usize)> {
        self.rings.iter().enumerate().find_map(|(k, r)| {
            r.points
                .iter()
                .position(|p| (p - x).norm() <= tol)
                .map(|j| (k, j))
        })
    }

    /// `∫_Ω Φ(x, y) ρ(y) dy` from values of `ρ` on the interior rings.
    ///
    /// When `x` is an interior ring node the ring through it is integrated with
    /// the logarithmic split in `τ`; otherwise all rings use the plain rule.
    pub fn volume_potential(&self, density: &[Vec<f64>], x: &Point2) -> f64 {
        let at_node = self
            .find_node(x, 1e-10)
            .filter(|&(k, _)| k + 1 < self.rings.len());
        self.volume_potential_impl(density, x, at_node)
    }

    fn volume_potential_impl(
        &self,
        density: &[Vec<f64>],
        x: &Point2,
        at_node: Option<(usize, usize)>,
    ) -> f64 {
        let mut total = 0.0;
        for (k, rn) in self.interior().iter().enumerate() {
            let n = rn.ring.half_count;
            let vals = &density[k];
            let ring_integral = match at_node {
                Some((i, l)) if i == k => {
                    // (1/2π)∫ Φ g dτ on the ring through x, g = ρJ
                    let profile = log_weight_profile(n);
                    let eta = rn.ring.radius;
                    let at = &rn.samples[l];
                    let mut sum_f = 0.0;
                    let mut sum_l = 0.0;
                    for j in 0..2 * n {
                        let g = vals[j] * rn.jacobians[j];
                        sum_f += profile[(l + 2 * n - j) % (2 * n)] * g;
                        let smooth = if j == l {
                            (eta * eta * at.speed * at.speed).ln()
                        } else {
                            let d2 = (at.local - rn.samples[j].local).norm_squared() * eta * eta;
                            let half = 0.5 * (rn.ring.angle(j) - at.t);
                            (d2 / (4.0 * half.sin().powi(2))).ln()
                        };
                        sum_l += smooth * g;
                    }
                    -0.5 * (sum_f + sum_l / (2 * n) as f64)
                }
                _ => {
                    let mut sum = 0.0;
                    for ((p, v), jac) in rn.points.iter().zip(vals).zip(&rn.jacobians) {
                        let r2 = (x - p).norm_squared();
                        sum += -r2.ln() / (2.0 * TAU) * v * jac;
                    }
                    sum * TAU / (2 * n) as f64
                }
            };
            total += rn.ring.weight * ring_integral;
        }
        total
    }

    /// Double-layer potential `∫_{∂Ω} ∂_{ν(y)}Φ(x, y) ψ(y) ds(y)` by the trapezoidal rule.
    pub fn double_layer_potential(&self, density: &[f64], x: &Point2) -> f64 {
        let b = self.boundary();
        let mut sum = 0.0;
        for (j, s) in b.samples.iter().enumerate() {
            let d = x - s.point;
            sum += d.dot(&s.normal) / d.norm_squared() * s.speed * density[j];
        }
        sum / b.ring.node_count() as f64
    }
}

/// Collocation matrix and right-hand side in layer-major ordering.
#[derive(Debug, Clone)]
pub struct AdsSystem {
    pub matrix: DenseMatrix,
    pub rhs: Vec<f64>,
}

fn row_block_check(row: &[f64], row_index: usize, interior_cols: usize, blocks: (&'static str, &'static str)) -> Result<()> {
    if let Some(col) = row.iter().position(|v| !v.is_finite()) {
        return Err(LeviError::Assembly {
            block: if col < interior_cols { blocks.0 } else { blocks.1 },
            row: row_index,
            col,
        });
    }
    Ok(())
}

pub fn assemble_ads(problem: &Problem2D, scheme: &RadialScheme) -> Result<AdsSystem> {
    let grid = AdsGrid::new(&problem.domain, scheme);
    assemble_on_grid(problem, &grid)
}

fn assemble_on_grid(problem: &Problem2D, grid: &AdsGrid) -> Result<AdsSystem> {
    let size = grid.unknowns();
    let interior_cols = grid.scheme().interior_unknowns();
    let sigma = &problem.sigma;
    let cot_profiles: Vec<Vec<f64>> = grid
        .interior()
        .iter()
        .map(|r| cot_weight_profile(r.ring.half_count))
        .collect();
    let boundary = grid.boundary();
    let boundary_weight = 1.0 / boundary.ring.node_count() as f64;

    // (ring, node) of every row
    let row_nodes: Vec<(usize, usize)> = grid
        .rings()
        .iter()
        .enumerate()
        .flat_map(|(k, r)| (0..r.ring.node_count()).map(move |j| (k, j)))
        .collect();

    let mut matrix = DenseMatrix::zeros(size, size);
    let mut rhs = vec![0.0; size];
    let last_ring = grid.rings().len() - 1;

    matrix
        .as_mut_slice()
        .par_chunks_mut(size)
        .zip(rhs.par_iter_mut())
        .enumerate()
        .try_for_each(|(row_index, (row, b))| -> Result<()> {
            let (i, l) = row_nodes[row_index];
            if i < last_ring {
                let rn = &grid.rings()[i];
                let x = rn.points[l];
                let at = &rn.samples[l];
                let eta = rn.ring.radius;
                let g: Vector2<f64> = sigma.grad_log_sigma(&x);
                for (m, src) in grid.interior().iter().enumerate() {
                    let n = src.ring.half_count;
                    let base = grid.index(m, 0);
                    let c = src.ring.weight;
                    let w = 1.0 / (2 * n) as f64;
                    if m == i {
                        let profile = &cot_profiles[m];
                        for j in 0..2 * n {
                            let split = k11_split_value(eta, at, &g, src.ring.radius, &src.samples[j])?;
                            let cot = profile[(l + 2 * n - j) % (2 * n)];
                            row[base + j] -= c * (w * split.smooth + split.cot_coefficient * cot);
                        }
                    } else {
                        for j in 0..2 * n {
                            row[base + j] -= c * w * k11_raw_value(&x, &g, &src.points[j], src.jacobians[j]);
                        }
                    }
                }
                row[grid.index(i, l)] += 1.0;
                let base = grid.index(last_ring, 0);
                for (j, s) in boundary.samples.iter().enumerate() {
                    row[base + j] += boundary_weight * k12_value(&x, &g, s);
                }
                *b = problem.source_at(&x) / sigma.sigma(&x);
                row_block_check(row, row_index, interior_cols, ("K11", "K12"))?;
            } else {
                let at = &boundary.samples[l];
                let x = at.point;
                for (m, src) in grid.interior().iter().enumerate() {
                    let n = src.ring.half_count;
                    let base = grid.index(m, 0);
                    let cw = src.ring.weight / (2 * n) as f64;
                    for j in 0..2 * n {
                        row[base + j] += cw * k21_value(&x, &src.points[j], src.jacobians[j]);
                    }
                }
                let base = grid.index(last_ring, 0);
                for (j, s) in boundary.samples.iter().enumerate() {
                    row[base + j] -= boundary_weight * k22_value(at, s);
                }
                row[base + l] += 1.0;
                *b = -2.0 * problem.boundary_at(&x);
                row_block_check(row, row_index, interior_cols, ("K21", "K22"))?;
            }
            if !b.is_finite() {
                return Err(LeviError::Evaluation(format!("right-hand side at row {row_index}")));
            }
            Ok(())
        })?;
    Ok(AdsSystem { matrix, rhs })
}

/// Solved densities on the scheme's nodes.
#[derive(Debug, Clone)]
pub struct AdsSolution {
    grid: AdsGrid,
    /// `μ̃` per interior ring, indexed by angular node.
    pub mu_tilde: Vec<Vec<f64>>,
    /// `ψ̃` at the boundary nodes.
    pub psi_tilde: Vec<f64>,
    pub condition: f64,
    pub relative_residual: f64,
}

/// Value of the representation at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointValue {
    pub value: f64,
    /// Set when the point is closer to the boundary than one boundary mesh width.
    pub degraded: bool,
}

pub fn solve_ads(problem: &Problem2D, scheme: &RadialScheme) -> Result<AdsSolution> {
    let grid = AdsGrid::new(&problem.domain, scheme);
    let system = assemble_on_grid(problem, &grid)?;
    let solved = solve_system(&system.matrix, &system.rhs)?;
    let mut mu_tilde = Vec::with_capacity(grid.interior().len());
    for (k, r) in grid.interior().iter().enumerate() {
        let base = grid.index(k, 0);
        mu_tilde.push(solved.solution[base..base + r.ring.node_count()].to_vec());
    }
    let base = grid.index(grid.rings().len() - 1, 0);
    let psi_tilde = solved.solution[base..].to_vec();
    Ok(AdsSolution {
        grid,
        mu_tilde,
        psi_tilde,
        condition: solved.condition,
        relative_residual: solved.relative_residual,
    })
}

impl AdsSolution {
    pub fn scheme(&self) -> &RadialScheme {
        self.grid.scheme()
    }

    pub fn grid(&self) -> &AdsGrid {
        &self.grid
    }

    /// `u` at node `j` of interior ring `k`.
    pub fn value_at_node(&self, k: usize, j: usize) -> f64 {
        let x = self.grid.rings()[k].points[j];
        self.grid.volume_potential_impl(&self.mu_tilde, &x, Some((k, j)))
            + self.grid.double_layer_potential(&self.psi_tilde, &x)
    }

    /// `u` at every node of interior ring `k`.
    pub fn ring_values(&self, k: usize) -> Vec<f64> {
        (0..self.grid.rings()[k].ring.node_count())
            .into_par_iter()
            .map(|j| self.value_at_node(k, j))
            .collect()
    }
}

/// `u(x) = ∫_Ω μ̃Φ dy + ∫_{∂Ω} ψ̃ ∂_νΦ ds`.
pub fn eval_ads_solution(sol: &AdsSolution, problem: &Problem2D, x: &Point2) -> Result<PointValue> {
    let domain = &problem.domain;
    let (eta, _) = domain.inverse_map(x);
    if eta >= 1.0 {
        return Err(LeviError::Domain(format!(
            "({}, {}) is not inside the domain",
            x.x, x.y
        )));
    }
    let boundary = sol.grid.boundary();
    let perimeter: f64 = boundary.samples.iter().map(|s| s.speed).sum::<f64>() * TAU
        / boundary.ring.node_count() as f64;
    let mesh_width = perimeter / boundary.ring.node_count() as f64;
    let degraded = domain.distance_to_boundary(x) < mesh_width;
    let value = sol.grid.volume_potential(&sol.mu_tilde, x) + sol.grid.double_layer_potential(&sol.psi_tilde, x);
    Ok(PointValue { value, degraded })
}
