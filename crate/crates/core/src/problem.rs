//! Coefficient fields and boundary value problem descriptions.

use std::fmt;
use std::sync::Arc;

use nalgebra::SVector;

use crate::error::{LeviError, Result};
use crate::geometry::{StarDomain2D, SurfacePatch3D};

pub type Vector<const D: usize> = SVector<f64, D>;

type Scalar<const D: usize> = Arc<dyn Fn(&Vector<D>) -> f64 + Send + Sync>;
type Gradient<const D: usize> = Arc<dyn Fn(&Vector<D>) -> Vector<D> + Send + Sync>;

/// Scalar coefficient field with its analytic gradient.
#[derive(Clone)]
pub struct ConductivityField<const D: usize> {
    sigma: Scalar<D>,
    grad: Gradient<D>,
    is_constant: bool,
}

impl<const D: usize> fmt::Debug for ConductivityField<D> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ConductivityField")
            .field("is_constant", &self.is_constant)
            .finish_non_exhaustive()
    }
}

impl<const D: usize> ConductivityField<D> {
    pub fn new<S, G>(sigma: S, grad: G) -> Self
    where
        S: Fn(&Vector<D>) -> f64 + Send + Sync + 'static,
        G: Fn(&Vector<D>) -> Vector<D> + Send + Sync + 'static,
    {
        Self {
            sigma: Arc::new(sigma),
            grad: Arc::new(grad),
            is_constant: false,
        }
    }

    pub fn constant(value: f64) -> Self {
        Self {
            sigma: Arc::new(move |_| value),
            grad: Arc::new(|_| Vector::<D>::zeros()),
            is_constant: true,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.is_constant
    }

    pub fn sigma(&self, x: &Vector<D>) -> f64 {
        (self.sigma)(x)
    }

    pub fn grad_sigma(&self, x: &Vector<D>) -> Vector<D> {
        (self.grad)(x)
    }

    /// `∇σ / σ`
    pub fn grad_log_sigma(&self, x: &Vector<D>) -> Vector<D> {
        (self.grad)(x) / (self.sigma)(x)
    }

    /// Checks `σ > 0` at the given points and returns the smallest value seen.
    pub fn check_positive<'a>(&self, points: impl IntoIterator<Item = &'a Vector<D>>) -> Result<f64> {
        let mut min = f64::INFINITY;
        for p in points {
            let s = self.sigma(p);
            if !(s > 0.0) || !s.is_finite() {
                return Err(LeviError::Domain(format!(
                    "conductivity {s} is not positive at {:?}",
                    p.as_slice()
                )));
            }
            min = min.min(s);
        }
        Ok(min)
    }
}

pub type ScalarField<const D: usize> = Arc<dyn Fn(&Vector<D>) -> f64 + Send + Sync>;

/// `−∇·(σ∇u) = F` in the domain, `u = f` on its boundary.
#[derive(Clone)]
pub struct ProblemSpec<G, const D: usize> {
    pub name: String,
    pub domain: G,
    pub sigma: ConductivityField<D>,
    pub source: ScalarField<D>,
    pub boundary_data: ScalarField<D>,
    pub exact_solution: Option<ScalarField<D>>,
}

pub type Problem2D = ProblemSpec<StarDomain2D, 2>;
pub type Problem3D = ProblemSpec<SurfacePatch3D, 3>;

impl<G: fmt::Debug, const D: usize> fmt::Debug for ProblemSpec<G, D> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("name", &self.name)
            .field("domain", &self.domain)
            .field("sigma", &self.sigma)
            .field("has_exact_solution", &self.exact_solution.is_some())
            .finish()
    }
}

impl<G, const D: usize> ProblemSpec<G, D> {
    pub fn source_at(&self, x: &Vector<D>) -> f64 {
        (self.source)(x)
    }

    pub fn boundary_at(&self, x: &Vector<D>) -> f64 {
        (self.boundary_data)(x)
    }

    pub fn exact_at(&self, x: &Vector<D>) -> Result<f64> {
        self.exact_solution
            .as_ref()
            .map(|u| u(x))
            .ok_or_else(|| LeviError::Metric(format!("problem '{}' has no exact solution", self.name)))
    }

    /// Largest mismatch between boundary data and exact solution on the given boundary points.
    pub fn boundary_mismatch<'a>(&self, boundary: impl IntoIterator<Item = &'a Vector<D>>) -> f64 {
        match &self.exact_solution {
            None => 0.0,
            Some(u) => boundary
                .into_iter()
                .map(|p| (u(p) - (self.boundary_data)(p)).abs())
                .fold(0.0, f64::max),
        }
    }
}

/// Boundary data must match the exact solution and `σ` must be finite and nonzero.
///
/// Positivity is not enforced: collocation divides each row by `σ` at its own
/// point only, so the discrete systems stay well defined where `σ` changes sign.
fn check_sampled<G, const D: usize>(problem: &ProblemSpec<G, D>, pts: &[Vector<D>]) -> Result<()> {
    let gap = problem.boundary_mismatch(pts);
    if gap > 1e-10 {
        return Err(LeviError::Config(format!(
            "boundary data differs from the exact solution by {gap:e} on the boundary"
        )));
    }
    for p in pts {
        let s = problem.sigma.sigma(p);
        if s == 0.0 || !s.is_finite() {
            return Err(LeviError::Domain(format!(
                "conductivity {s} at {:?}",
                p.as_slice()
            )));
        }
    }
    Ok(())
}

impl Problem2D {
    /// Sampled consistency check on 64 boundary points.
    pub fn validate(&self) -> Result<()> {
        let pts: Vec<_> = (0..64)
            .map(|j| self.domain.curve_eval(std::f64::consts::TAU * j as f64 / 64.0).0)
            .collect();
        check_sampled(self, &pts)
    }
}

impl Problem3D {
    /// Sampled consistency check on a 9 × 16 surface grid.
    pub fn validate(&self) -> Result<()> {
        let mut pts = Vec::new();
        for i in 0..=8 {
            for k in 0..16 {
                let theta = std::f64::consts::PI * i as f64 / 8.0;
                let phi = std::f64::consts::TAU * k as f64 / 16.0;
                pts.push(self.domain.surface_eval(theta, phi)?.point);
            }
        }
        check_sampled(self, &pts)
    }
}
