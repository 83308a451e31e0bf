//! Quadrature rules: trigonometric weights for logarithmic and cotangent
//! kernels, the layered radial scheme for volume integrals over star domains,
//! Gauss–Legendre rules and a high-accuracy volume-potential reference.

use std::f64::consts::{PI, TAU};
use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;

use crate::error::{LeviError, Result};
use crate::geometry::{Point2, StarDomain2D};

/// Weights `F_j(t; n)`, `j = 0..2n−1`, with
/// `(1/2π)∫₀^{2π} g(τ) ln(4 sin²((τ−t)/2)) dτ ≈ Σ_j F_j g(jπ/n)`.
pub fn trig_log_weights(t: f64, n: usize) -> Vec<f64> {
    (0..2 * n)
        .map(|j| log_weight_at(t - j as f64 * PI / n as f64, n))
        .collect()
}

/// Weights `T_j(t; n)` for the principal value
/// `(1/2π) p.v.∫₀^{2π} g(τ) cot((τ−t)/2) dτ ≈ Σ_j T_j g(jπ/n)`.
pub fn trig_cot_weights(t: f64, n: usize) -> Vec<f64> {
    (0..2 * n)
        .map(|j| cot_weight_at(t - j as f64 * PI / n as f64, n))
        .collect()
}

fn log_weight_at(s: f64, n: usize) -> f64 {
    let nf = n as f64;
    let sum: f64 = (1..n).map(|m| (m as f64 * s).cos() / m as f64).sum();
    -(sum + (nf * s).cos() / (2.0 * nf)) / nf
}

fn cot_weight_at(s: f64, n: usize) -> f64 {
    let nf = n as f64;
    let sum: f64 = (1..n).map(|m| (m as f64 * s).sin()).sum();
    -sum / nf - (nf * s).sin() / (2.0 * nf)
}

/// `F` weights for collocation at a node: entry `k` is the weight for
/// `t − t_j = kπ/n`, so `F_j(t_l) = profile[(l − j) mod 2n]`.
pub fn log_weight_profile(n: usize) -> Vec<f64> {
    (0..2 * n)
        .map(|k| log_weight_at(k as f64 * PI / n as f64, n))
        .collect()
}

/// Cotangent counterpart of [`log_weight_profile`].
pub fn cot_weight_profile(n: usize) -> Vec<f64> {
    (0..2 * n)
        .map(|k| cot_weight_at(k as f64 * PI / n as f64, n))
        .collect()
}

/// Composite radial weights `c_1..c_{2N−1}` (returned 0-based).
///
/// Midpoint rule on the first and last layers, Simpson's rule on the others;
/// Simpson endpoints shared by two layers accumulate both contributions.
pub fn radial_weights(layers: usize) -> Result<Vec<f64>> {
    if layers < 2 {
        return Err(LeviError::Quadrature(format!(
            "at least two layers are required (got {layers})"
        )));
    }
    let nf = layers as f64;
    let mut c = vec![0.0; 2 * layers - 1];
    c[0] = 1.0 / nf;
    c[2 * layers - 2] = 1.0 / nf;
    for i in 2..layers {
        // layer [ξ_{i−1}, ξ_i] uses ξ̃_{2i−2}, ξ̃_{2i−1}, ξ̃_{2i} (1-based)
        c[2 * i - 3] += 1.0 / (6.0 * nf);
        c[2 * i - 2] += 4.0 / (6.0 * nf);
        c[2 * i - 1] += 1.0 / (6.0 * nf);
    }
    Ok(c)
}

/// One ring `{ξ̃_k x(τ)}` of the layered scheme.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ring {
    pub radius: f64,
    /// `n_k`; the ring carries `2 n_k` angular nodes `t_j = jπ/n_k`.
    pub half_count: usize,
    /// Radial weight `c_k`; zero for the boundary ring.
    pub weight: f64,
}

impl Ring {
    pub fn node_count(&self) -> usize {
        2 * self.half_count
    }

    pub fn angle(&self, j: usize) -> f64 {
        j as f64 * PI / self.half_count as f64
    }
}

/// Refined radii `ξ̃_k = k/(2N)`, per-ring angular counts and radial weights.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialScheme {
    layers: usize,
    base_exponent: u32,
    rings: Vec<Ring>,
}

impl RadialScheme {
    /// Builds the scheme with `n_k = 2^{k₁} 2^{⌊log₂(2k−1)⌋}` on the `k`-th ring.
    pub fn adaptive_layers(layers: usize, base_exponent: u32) -> Result<Self> {
        let weights = radial_weights(layers)?;
        if base_exponent > 20 {
            return Err(LeviError::Quadrature(format!(
                "base exponent {base_exponent} is unreasonably large"
            )));
        }
        let n1 = 1usize << base_exponent;
        let rings = (1..=2 * layers)
            .map(|k| {
                let half_count = n1 << refinement_exponent(k);
                Ring {
                    radius: k as f64 / (2 * layers) as f64,
                    half_count,
                    weight: weights.get(k - 1).copied().unwrap_or(0.0),
                }
            })
            .collect::<Vec<_>>();
        for (i, ring) in rings.iter().enumerate().skip(1) {
            let ratio = cell_area_ratio(i + 1, n1, ring.half_count);
            if !(1.0 / 3.0..=3.0).contains(&ratio) {
                return Err(LeviError::Quadrature(format!(
                    "cell-area ratio {ratio} on ring {} violates [1/3, 3]",
                    i + 1
                )));
            }
        }
        Ok(Self {
            layers,
            base_exponent,
            rings,
        })
    }

    pub fn layers(&self) -> usize {
        self.layers
    }

    pub fn base_exponent(&self) -> u32 {
        self.base_exponent
    }

    /// All `2N` rings; index `k` holds `ξ̃_{k+1}`, the last one is the boundary.
    pub fn rings(&self) -> &[Ring] {
        &self.rings
    }

    /// The `2N − 1` interior rings carrying volume unknowns.
    pub fn interior_rings(&self) -> &[Ring] {
        &self.rings[..self.rings.len() - 1]
    }

    pub fn boundary_ring(&self) -> &Ring {
        self.rings.last().expect("scheme has at least four rings")
    }

    pub fn interior_unknowns(&self) -> usize {
        self.interior_rings().iter().map(Ring::node_count).sum()
    }

    pub fn total_unknowns(&self) -> usize {
        self.interior_unknowns() + self.boundary_ring().node_count()
    }

    /// Offset of ring `k`'s first node in the layer-major unknown vector.
    pub fn offsets(&self) -> Vec<usize> {
        let mut acc = 0;
        self.rings
            .iter()
            .map(|r| {
                let o = acc;
                acc += r.node_count();
                o
            })
            .collect()
    }
}

/// `⌊log₂(2k − 1)⌋` for the 1-based ring index `k`.
pub fn refinement_exponent(k: usize) -> u32 {
    (2 * k - 1).ilog2()
}

/// `|s_k|/|s_1|` under the disk model `|Ω̃_k| ∝ 2k − 1`.
pub fn cell_area_ratio(k: usize, n1: usize, nk: usize) -> f64 {
    (2 * k - 1) as f64 * n1 as f64 / nk as f64
}

/// `∫_Ω s dx ≈ Σ_k c_k (2π/2n_k) Σ_j s(p̃(ξ̃_k, t_j)) J(ξ̃_k, t_j)`.
pub fn volume_quadrature<S>(domain: &StarDomain2D, integrand: S, scheme: &RadialScheme) -> Result<f64>
where
    S: Fn(&Point2) -> f64,
{
    let mut total = 0.0;
    for (k, ring) in scheme.interior_rings().iter().enumerate() {
        let mut sum = 0.0;
        for j in 0..ring.node_count() {
            let tau = ring.angle(j);
            let p = domain.domain_map(ring.radius, tau)?;
            let v = integrand(&p);
            if !v.is_finite() {
                return Err(LeviError::Evaluation(format!(
                    "ring {}, node {j} ({:.6}, {:.6})",
                    k + 1,
                    p.x,
                    p.y
                )));
            }
            sum += v * domain.jacobian(ring.radius, tau);
        }
        total += ring.weight * TAU / ring.node_count() as f64 * sum;
    }
    Ok(total)
}

/// Gauss–Legendre nodes on `[−1, 1]` in ascending order with their weights.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    /// Nodes and weights mapped to `[a, b]`.
    pub fn on_interval(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(x, w)| (mid + half * x, half * w))
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

pub fn gauss_legendre(n: usize) -> Result<GaussRule> {
    let degree = NonZeroUsize::new(n)
        .ok_or_else(|| LeviError::Quadrature("Gauss–Legendre rule needs n ≥ 1".into()))?;
    let rule = GaussLegendre::new(degree);
    let mut pairs: Vec<(f64, f64)> = rule.as_node_weight_pairs().to_vec();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(GaussRule {
        nodes: pairs.iter().map(|p| p.0).collect(),
        weights: pairs.iter().map(|p| p.1).collect(),
    })
}

/// Resolution of [`brute_volume_potential`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleResolution {
    pub gauss_points: usize,
    pub near_angles: usize,
    pub far_radial_panels: usize,
    pub far_angles: usize,
}

impl Default for OracleResolution {
    fn default() -> Self {
        Self {
            gauss_points: 16,
            near_angles: 256,
            far_radial_panels: 64,
            far_angles: 2048,
        }
    }
}

/// Smooth step: 0 for `s ≤ 0`, 1 for `s ≥ 1`, C^∞ in between.
fn smooth_step(s: f64) -> f64 {
    if s <= 0.0 {
        return 0.0;
    }
    if s >= 1.0 {
        return 1.0;
    }
    let a = (-1.0 / s).exp();
    let b = (-1.0 / (1.0 - s)).exp();
    a / (a + b)
}

/// Reference value of `∫_Ω Φ(x, y) ρ(y) dy` for smooth `ρ`.
///
/// A smooth cutoff `w` around `x` splits the integral: `Φρw` is integrated in
/// polar coordinates centered at `x` (the `r dr` measure removes the log
/// singularity) on geometrically graded panels, and the smooth remainder
/// `Φρ(1−w)` over the star map with composite Gauss–Legendre in `ξ` and the
/// trapezoidal rule in `τ`. The cutoff radius also stays clear of the domain
/// center so densities with a cone point there remain smooth in both pieces.
pub fn brute_volume_potential<R>(domain: &StarDomain2D, density: R, x: &Point2) -> Result<f64>
where
    R: Fn(&Point2) -> f64,
{
    brute_volume_potential_with(domain, density, x, OracleResolution::default())
}

pub fn brute_volume_potential_with<R>(
    domain: &StarDomain2D,
    density: R,
    x: &Point2,
    res: OracleResolution,
) -> Result<f64>
where
    R: Fn(&Point2) -> f64,
{
    let gl = gauss_legendre(res.gauss_points)?;
    let phi = |r: f64| -r.ln() / TAU;
    let mut reach = domain.distance_to_boundary(x);
    let from_center = (x - domain.center()).norm();
    if from_center > 1e-12 {
        reach = reach.min(from_center);
    }
    let outer = 0.9 * reach;
    let inner = 0.5 * outer;
    let cutoff = |r: f64| 1.0 - smooth_step((r - inner) / (outer - inner));

    let near = if outer > 0.0 {
        // graded panels toward r = 0, uniform panels across the cutoff transition
        let mut edges = vec![0.0];
        for k in (1..=40).rev() {
            edges.push(inner * 0.5f64.powi(k));
        }
        edges.push(inner);
        for k in 1..=16 {
            edges.push(inner + (outer - inner) * k as f64 / 16.0);
        }
        let mut sum = 0.0;
        for a in 0..res.near_angles {
            let alpha = TAU * a as f64 / res.near_angles as f64;
            let dir = Point2::new(alpha.cos(), alpha.sin());
            for win in edges.windows(2) {
                for (r, w) in gl.on_interval(win[0], win[1]) {
                    sum += w * r * phi(r) * cutoff(r) * density(&(x + dir * r));
                }
            }
        }
        sum * TAU / res.near_angles as f64
    } else {
        0.0
    };

    let mut far = 0.0;
    for a in 0..res.far_angles {
        let tau = TAU * a as f64 / res.far_angles as f64;
        let jac1 = domain.jacobian(1.0, tau);
        for p in 0..res.far_radial_panels {
            let lo = p as f64 / res.far_radial_panels as f64;
            let hi = (p + 1) as f64 / res.far_radial_panels as f64;
            for (xi, w) in gl.on_interval(lo, hi) {
                let y = domain.domain_map(xi, tau)?;
                let r = (y - x).norm();
                let keep = if r >= outer { 1.0 } else { 1.0 - cutoff(r) };
                if keep == 0.0 {
                    continue;
                }
                far += w * phi(r) * keep * density(&y) * xi * jac1;
            }
        }
    }
    far *= TAU / res.far_angles as f64;
    Ok(near + far)
}
