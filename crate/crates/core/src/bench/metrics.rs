//! Discrete error measures.

use crate::ads::AdsSolution;
use crate::error::{LeviError, Result};
use crate::problem::Problem2D;

fn check_lengths(values: &[f64], exact: &[f64]) -> Result<()> {
    if values.len() != exact.len() || values.is_empty() {
        return Err(LeviError::Metric(format!(
            "value/exact lengths {} and {} must agree and be nonzero",
            values.len(),
            exact.len()
        )));
    }
    Ok(())
}

/// `(1/J) Σ |u − u_ex|`
pub fn err_mean_abs(values: &[f64], exact: &[f64]) -> Result<f64> {
    check_lengths(values, exact)?;
    let sum: f64 = values.iter().zip(exact).map(|(u, e)| (u - e).abs()).sum();
    Ok(sum / values.len() as f64)
}

/// `(Σ |u − u_ex|² / Σ |u_ex|²)^{1/2}`
pub fn err_rms_rel(values: &[f64], exact: &[f64]) -> Result<f64> {
    weighted_relative(values, exact, None)
}

/// Weighted relative L² error; `weights` defaults to all ones.
pub fn weighted_relative(values: &[f64], exact: &[f64], weights: Option<&[f64]>) -> Result<f64> {
    check_lengths(values, exact)?;
    let mut num = 0.0;
    let mut den = 0.0;
    for (i, (u, e)) in values.iter().zip(exact).enumerate() {
        let w = weights.map_or(1.0, |w| w[i]);
        num += w * (u - e) * (u - e);
        den += w * e * e;
    }
    if den == 0.0 {
        return Err(LeviError::Metric("exact solution has zero norm".into()));
    }
    Ok((num / den).sqrt())
}

/// Numerical and exact values on interior ring `k` (0-based) with arc-length weights.
pub struct RingSample {
    pub values: Vec<f64>,
    pub exact: Vec<f64>,
    pub arc_weights: Vec<f64>,
    pub area_weights: Vec<f64>,
}

/// Evaluates the solution on interior ring `k` and collects both weight families.
pub fn ring_sample(sol: &AdsSolution, problem: &Problem2D, k: usize) -> Result<RingSample> {
    let ring = sol.grid().interior().get(k).ok_or_else(|| {
        LeviError::Metric(format!("ring {} is not an interior ring", k + 1))
    })?;
    let u = problem
        .exact_solution
        .as_ref()
        .ok_or_else(|| LeviError::Metric(format!("problem '{}' has no exact solution", problem.name)))?;
    let values = sol.ring_values(k);
    let exact = ring.points.iter().map(|p| u(p)).collect();
    let xi = ring.ring.radius;
    let arc_weights = ring.samples.iter().map(|s| xi * s.speed).collect();
    let scale = ring.ring.weight / ring.ring.half_count as f64;
    let area_weights = ring.jacobians.iter().map(|j| scale * j).collect();
    Ok(RingSample {
        values,
        exact,
        arc_weights,
        area_weights,
    })
}

/// `Err_L^i`: relative L² error on the layer curve `Γ_i = ξ̃_i ∂Ω` (1-based `i`).
pub fn err_local(sol: &AdsSolution, problem: &Problem2D, layer: usize) -> Result<f64> {
    if layer == 0 {
        return Err(LeviError::Metric("layer indices start at 1".into()));
    }
    let s = ring_sample(sol, problem, layer - 1)?;
    weighted_relative(&s.values, &s.exact, Some(&s.arc_weights))
}

/// `Err_A`: relative L² error over all interior nodes with weights `c_k J / n_k`.
pub fn err_avg(sol: &AdsSolution, problem: &Problem2D) -> Result<f64> {
    let samples = (0..sol.grid().interior().len())
        .map(|k| ring_sample(sol, problem, k))
        .collect::<Result<Vec<_>>>()?;
    err_avg_from(&samples)
}

pub fn err_avg_from(samples: &[RingSample]) -> Result<f64> {
    let mut values = Vec::new();
    let mut exact = Vec::new();
    let mut weights = Vec::new();
    for s in samples {
        values.extend_from_slice(&s.values);
        exact.extend_from_slice(&s.exact);
        weights.extend_from_slice(&s.area_weights);
    }
    weighted_relative(&values, &exact, Some(&weights))
}
