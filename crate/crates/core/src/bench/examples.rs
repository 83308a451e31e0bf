//! Manufactured test problems.

use std::sync::Arc;

use nalgebra::{Vector2, Vector3};

use crate::geometry::{Point2, StarDomain2D, SurfacePatch3D};
use crate::problem::{ConductivityField, Problem2D, Problem3D};

/// Center of both planar example domains.
pub const EXAMPLE1_CENTER: [f64; 2] = [0.5, 1.0];

fn example1(name: &str, domain: StarDomain2D) -> Problem2D {
    let sigma = ConductivityField::new(
        |x: &Vector2<f64>| 2.0 + 0.2 * (25.0 * x.x).sin() + 0.2 * (25.0 * x.y).cos(),
        |x: &Vector2<f64>| Vector2::new(5.0 * (25.0 * x.x).cos(), -5.0 * (25.0 * x.y).sin()),
    );
    let exact = |x: &Vector2<f64>| x.x * x.x - 2.0 * x.y + 3.0;
    Problem2D {
        name: name.to_string(),
        domain,
        sigma,
        source: Arc::new(|x: &Vector2<f64>| {
            -10.0 * (x.x * (25.0 * x.x).cos() + (25.0 * x.y).sin())
                - (4.0 + 0.4 * (25.0 * x.x).sin() + 0.4 * (25.0 * x.y).cos())
        }),
        boundary_data: Arc::new(exact),
        exact_solution: Some(Arc::new(exact)),
    }
}

/// `σ = 2 + sin(25x)/5 + cos(25y)/5`, `u = x² − 2y + 3` on the heart-shaped domain.
pub fn example1_heart() -> Problem2D {
    example1("heart", StarDomain2D::heart(Point2::from(EXAMPLE1_CENTER)))
}

/// Same data on the ellipse `(cos t, sin t / 2)`.
pub fn example1_ellipse() -> Problem2D {
    example1(
        "ellipse",
        StarDomain2D::ellipse(1.0, 0.5, Point2::from(EXAMPLE1_CENTER)),
    )
}

/// `σ = x²y + 2(y + z²) + 2`, `u = x² + 2(y + 2)z + 1` on the pinched ball.
///
/// `σ` is negative on the part of the ball with `y ≲ −1`.
pub fn example2_pinched_ball() -> Problem3D {
    let sigma = ConductivityField::new(
        |p: &Vector3<f64>| p.x * p.x * p.y + 2.0 * (p.y + p.z * p.z) + 2.0,
        |p: &Vector3<f64>| Vector3::new(2.0 * p.x * p.y, p.x * p.x + 2.0, 4.0 * p.z),
    );
    let exact = |p: &Vector3<f64>| p.x * p.x + 2.0 * (p.y + 2.0) * p.z + 1.0;
    Problem3D {
        name: "pinched_ball".into(),
        domain: SurfacePatch3D::pinched_ball(),
        sigma,
        source: Arc::new(|p: &Vector3<f64>| {
            -(6.0 * p.y + 2.0 * p.z) * p.x * p.x
                - 8.0 * p.y * p.z
                - 4.0 * p.y
                - 20.0 * p.z
                - 4.0 * p.z * p.z
                - 4.0
        }),
        boundary_data: Arc::new(exact),
        exact_solution: Some(Arc::new(exact)),
    }
}

/// Constant conductivity with harmonic data `x² − y² + x/2 + 1` (shifted to the domain center).
pub fn harmonic_2d(name: &str, domain: StarDomain2D, sigma: f64) -> Problem2D {
    let c = domain.center();
    let u = move |x: &Vector2<f64>| {
        let d = x - c;
        d.x * d.x - d.y * d.y + 0.5 * d.x + 1.0
    };
    Problem2D {
        name: name.to_string(),
        domain,
        sigma: ConductivityField::constant(sigma),
        source: Arc::new(|_| 0.0),
        boundary_data: Arc::new(u),
        exact_solution: Some(Arc::new(u)),
    }
}

/// Constant conductivity with the harmonic data `xy + z + 1` on a 3D surface.
pub fn harmonic_3d(name: &str, surface: SurfacePatch3D, sigma: f64) -> Problem3D {
    let u = |p: &Vector3<f64>| p.x * p.y + p.z + 1.0;
    Problem3D {
        name: name.to_string(),
        domain: surface,
        sigma: ConductivityField::constant(sigma),
        source: Arc::new(|_| 0.0),
        boundary_data: Arc::new(u),
        exact_solution: Some(Arc::new(u)),
    }
}

/// `−σΔu − ∇σ·∇u − F` for the given analytic `∇u` and `Δu`.
pub fn operator_residual<const D: usize>(
    problem: &crate::problem::ProblemSpec<impl Sized, D>,
    x: &crate::problem::Vector<D>,
    grad_u: crate::problem::Vector<D>,
    lap_u: f64,
) -> f64 {
    -problem.sigma.sigma(x) * lap_u - problem.sigma.grad_sigma(x).dot(&grad_u) - problem.source_at(x)
}

/// Residual of the first example's data at `x`.
pub fn example1_residual(problem: &Problem2D, x: &Vector2<f64>) -> f64 {
    operator_residual(problem, x, Vector2::new(2.0 * x.x, -2.0), 2.0)
}

/// Residual of the second example's data at `x`.
pub fn example2_residual(problem: &Problem3D, p: &Vector3<f64>) -> f64 {
    let grad = Vector3::new(2.0 * p.x, 2.0 * p.z, 2.0 * (p.y + 2.0));
    operator_residual(problem, p, grad, 2.0)
}

/// Registered problem names.
pub const PROBLEM_NAMES: [&str; 6] = [
    "heart",
    "ellipse",
    "pinched_ball",
    "harmonic_heart",
    "harmonic_ellipse",
    "harmonic_ball",
];
