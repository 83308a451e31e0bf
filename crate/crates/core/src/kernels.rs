//! Laplace fundamental solutions, the Levi pair and the parameterized
//! Nyström kernels of the coupled density system.
//!
//! The planar kernels below omit the common factor `1/2π`; an operator
//! `(1/2π)∫₀^{2π} K(t, τ) ψ(τ) dτ` on `2n` equispaced nodes becomes
//! `Σ_j K(t, t_j) ψ_j / (2n)`.

use std::f64::consts::{PI, TAU};

use nalgebra::{SVector, Vector2};

use crate::error::{LeviError, Result};
use crate::geometry::{CurvePoint, Point2, StarDomain2D};
use crate::problem::ConductivityField;

/// Surface-measure constant `1/|S^{d−1}|` of the Laplace kernel.
fn kernel_constant<const D: usize>() -> Result<f64> {
    match D {
        2 => Ok(1.0 / TAU),
        3 => Ok(1.0 / (4.0 * PI)),
        _ => Err(LeviError::Dimension(format!(
            "Laplace kernels are implemented for d = 2, 3 (got {D})"
        ))),
    }
}

fn separation<const D: usize>(x: &SVector<f64, D>, y: &SVector<f64, D>) -> Result<(SVector<f64, D>, f64)> {
    let d = x - y;
    let r = d.norm();
    if r == 0.0 {
        return Err(LeviError::Singularity(format!(
            "coincident points {:?}",
            x.as_slice()
        )));
    }
    Ok((d, r))
}

/// `Φ(x, y)`: `(1/2π) ln(1/|x−y|)` in 2D, `1/(4π|x−y|)` in 3D.
pub fn fundamental_solution<const D: usize>(x: &SVector<f64, D>, y: &SVector<f64, D>) -> Result<f64> {
    let c = kernel_constant::<D>()?;
    let (_, r) = separation(x, y)?;
    Ok(if D == 2 { -c * r.ln() } else { c / r })
}

/// `∇ₓΦ(x, y) = −c_d (x−y)/|x−y|^d`.
pub fn grad_fundamental<const D: usize>(
    x: &SVector<f64, D>,
    y: &SVector<f64, D>,
) -> Result<SVector<f64, D>> {
    let c = kernel_constant::<D>()?;
    let (d, r) = separation(x, y)?;
    Ok(d * (-c / r.powi(D as i32)))
}

/// Double-layer kernel `∂_{ν(y)}Φ(x, y) = c_d (x−y)·ν(y)/|x−y|^d`.
pub fn double_layer<const D: usize>(
    x: &SVector<f64, D>,
    y: &SVector<f64, D>,
    normal_y: &SVector<f64, D>,
) -> Result<f64> {
    let c = kernel_constant::<D>()?;
    let (d, r) = separation(x, y)?;
    Ok(c * d.dot(normal_y) / r.powi(D as i32))
}

/// `−∂_{ν(y)}[∇ₓΦ(x, y)·g]` for a fixed vector `g`:
/// `c_d [−ν·g/|d|^D + D (d·g)(d·ν)/|d|^{D+2}]` with `d = x − y`.
pub fn gradient_double_layer<const D: usize>(
    x: &SVector<f64, D>,
    g: &SVector<f64, D>,
    y: &SVector<f64, D>,
    normal_y: &SVector<f64, D>,
) -> Result<f64> {
    let c = kernel_constant::<D>()?;
    let (d, r) = separation(x, y)?;
    let r2 = r * r;
    let rd = r.powi(D as i32);
    Ok(c * (-normal_y.dot(g) / rd + D as f64 * d.dot(g) * d.dot(normal_y) / (rd * r2)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeviPairValue {
    pub p: f64,
    pub r: f64,
}

/// `P = Φ/σ(y)`, `R = −∇ₓΦ·∇σ(x)/σ(y)`.
pub fn levi_pair<const D: usize>(
    sigma: &ConductivityField<D>,
    x: &SVector<f64, D>,
    y: &SVector<f64, D>,
) -> Result<LeviPairValue> {
    let phi = fundamental_solution(x, y)?;
    let grad = grad_fundamental(x, y)?;
    let sy = sigma.sigma(y);
    Ok(LeviPairValue {
        p: phi / sy,
        r: -grad.dot(&sigma.grad_sigma(x)) / sy,
    })
}

/// Signed angular difference `τ − t` reduced to `(−π, π]`.
#[inline]
pub fn angle_gap(t: f64, tau: f64) -> f64 {
    let d = (tau - t).rem_euclid(TAU);
    if d > PI {
        d - TAU
    } else {
        d
    }
}

const DIAGONAL_GAP: f64 = 1e-8;

/// `J(ξ, τ)` from a precomputed boundary sample.
#[inline]
pub fn jacobian_at(xi: f64, s: &CurvePoint) -> f64 {
    xi * (s.local.x * s.d1.y - s.local.y * s.d1.x)
}

/// Raw volume kernel `K11 = (y−x)·g/|y−x|² · J` for mapped points.
#[inline]
pub fn k11_raw_value(x: &Point2, g: &Vector2<f64>, y: &Point2, jac: f64) -> f64 {
    let d = y - x;
    d.dot(g) / d.norm_squared() * jac
}

/// `K12 = [−ν·g/|d|² + 2(d·g)(d·ν)/|d|⁴]·|x'(τ)|` with `d = x − y`.
#[inline]
pub fn k12_value(x: &Point2, g: &Vector2<f64>, y: &CurvePoint) -> f64 {
    let d = x - y.point;
    let r2 = d.norm_squared();
    (-y.normal.dot(g) / r2 + 2.0 * d.dot(g) * d.dot(&y.normal) / (r2 * r2)) * y.speed
}

/// `K21 = ln|x − y|² · J`.
#[inline]
pub fn k21_value(x: &Point2, y: &Point2, jac: f64) -> f64 {
    (x - y).norm_squared().ln() * jac
}

/// `K22(t, τ) = 2(x(t)−x(τ))·ν(τ)|x'(τ)|/|x(t)−x(τ)|²`, diagonal `x''·ν/|x'|`.
#[inline]
pub fn k22_value(at: &CurvePoint, from: &CurvePoint) -> f64 {
    if angle_gap(at.t, from.t).abs() < 1e-12 {
        return at.d2.dot(&at.normal) / at.speed;
    }
    let d = at.local - from.local;
    2.0 * d.dot(&from.normal) * from.speed / d.norm_squared()
}

/// Split `K11 = smooth + cot_coefficient · cot((τ−t)/2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct K11Split {
    pub smooth: f64,
    pub cot_coefficient: f64,
}

/// Split kernel from precomputed samples; `g = ∇ln σ` at the collocation point.
pub fn k11_split_value(eta: f64, at: &CurvePoint, g: &Vector2<f64>, xi: f64, from: &CurvePoint) -> Result<K11Split> {
    if eta <= 0.0 {
        return Err(LeviError::Domain(format!("collocation radius {eta} must be positive")));
    }
    let g_normal = at.normal.dot(g);
    let g_tangent = at.tangent.dot(g);
    let jac = jacobian_at(xi, from);
    let cot_coefficient = jac / eta * g_tangent / (2.0 * at.speed);
    let gap = angle_gap(at.t, from.t);
    let same_layer = (xi - eta).abs() <= 1e-14 * eta.max(1.0);
    if gap.abs() < DIAGONAL_GAP {
        if !same_layer {
            return Err(LeviError::Singularity(
                "cotangent split is undefined at τ = t off the collocation layer".into(),
            ));
        }
        let scale = 2.0 * eta * at.speed * at.speed;
        let kappa1 = at.d2.dot(&at.normal) / scale;
        let kappa2 = -at.d2.dot(&at.tangent) / scale;
        return Ok(K11Split {
            smooth: jac * (g_normal * kappa1 + g_tangent * kappa2),
            cot_coefficient,
        });
    }
    let d = from.local * xi - at.local * eta;
    let r2 = d.norm_squared();
    let kappa1 = d.dot(&at.normal) / r2;
    let kappa2 = d.dot(&at.tangent) / r2 - 1.0 / (0.5 * gap).tan() / (2.0 * eta * at.speed);
    Ok(K11Split {
        smooth: jac * (g_normal * kappa1 + g_tangent * kappa2),
        cot_coefficient,
    })
}

/// Raw `K11(η, t; ξ, τ)` between `p̃(η, t)` and `p̃(ξ, τ)`.
pub fn kernel_k11(
    domain: &StarDomain2D,
    sigma: &ConductivityField<2>,
    eta: f64,
    t: f64,
    xi: f64,
    tau: f64,
) -> Result<f64> {
    let x = domain.domain_map(eta, t)?;
    let y = domain.domain_map(xi, tau)?;
    if (x - y).norm() == 0.0 {
        return Err(LeviError::Singularity("K11 at coincident points".into()));
    }
    Ok(k11_raw_value(&x, &sigma.grad_log_sigma(&x), &y, domain.jacobian(xi, tau)))
}

pub fn kernel_k11_split(
    domain: &StarDomain2D,
    sigma: &ConductivityField<2>,
    eta: f64,
    t: f64,
    xi: f64,
    tau: f64,
) -> Result<K11Split> {
    if eta <= 0.0 {
        return Err(LeviError::Domain(format!("collocation radius {eta} must be positive")));
    }
    let x = domain.domain_map(eta, t)?;
    domain.domain_map(xi, tau)?;
    let g = sigma.grad_log_sigma(&x);
    k11_split_value(eta, &domain.sample(t), &g, xi, &domain.sample(tau))
}

pub fn kernel_k12(
    domain: &StarDomain2D,
    sigma: &ConductivityField<2>,
    eta: f64,
    t: f64,
    tau: f64,
) -> Result<f64> {
    let x = domain.domain_map(eta, t)?;
    let y = domain.sample(tau);
    if (x - y.point).norm() < 1e-12 {
        return Err(LeviError::NearSingular(format!(
            "collocation point within 1e-12 of the boundary node τ = {tau}"
        )));
    }
    Ok(k12_value(&x, &sigma.grad_log_sigma(&x), &y))
}

pub fn kernel_k21(domain: &StarDomain2D, t: f64, xi: f64, tau: f64) -> Result<f64> {
    let x = domain.domain_map(1.0, t)?;
    let y = domain.domain_map(xi, tau)?;
    if (x - y).norm() == 0.0 {
        return Err(LeviError::Singularity("K21 at coincident points".into()));
    }
    Ok(k21_value(&x, &y, domain.jacobian(xi, tau)))
}

pub fn kernel_k22(domain: &StarDomain2D, t: f64, tau: f64) -> f64 {
    k22_value(&domain.sample(t), &domain.sample(tau))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use nalgebra::Vector3;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn exp_x1_field() -> ConductivityField<2> {
        ConductivityField::new(|x| x[0].exp(), |x| Vector2::new(x[0].exp(), 0.0))
    }

    fn wavy_field() -> ConductivityField<2> {
        ConductivityField::new(
            |x| 2.0 + 0.2 * (25.0 * x[0]).sin() + 0.2 * (25.0 * x[1]).cos(),
            |x| Vector2::new(5.0 * (25.0 * x[0]).cos(), -5.0 * (25.0 * x[1]).sin()),
        )
    }

    #[test]
    fn fundamental_values() {
        let o2 = Vector2::zeros();
        assert_abs_diff_eq!(fundamental_solution(&Vector2::new(1.0, 0.0), &o2).unwrap(), 0.0);
        let e = Vector2::new((-1.0f64).exp(), 0.0);
        assert_abs_diff_eq!(fundamental_solution(&e, &o2).unwrap(), 1.0 / TAU, epsilon = 1e-15);
        let v = fundamental_solution(&Vector3::new(0.0, 1.0, 0.0), &Vector3::zeros()).unwrap();
        assert_abs_diff_eq!(v, 0.0795775, epsilon = 1e-7);
        assert!(matches!(
            fundamental_solution(&o2, &o2),
            Err(LeviError::Singularity(_))
        ));
        assert!(grad_fundamental(&o2, &o2).is_err());
    }

    #[test]
    fn grad_fundamental_values_and_differences() {
        let g = grad_fundamental(&Vector2::new(1.0, 0.0), &Vector2::zeros()).unwrap();
        assert_abs_diff_eq!(g, Vector2::new(-1.0 / TAU, 0.0), epsilon = 1e-15);

        let x = Vector2::new(0.3, 0.4);
        let y = Vector2::zeros();
        let h = 1e-5;
        let g = grad_fundamental(&x, &y).unwrap();
        for k in 0..2 {
            let mut e = Vector2::zeros();
            e[k] = h;
            let fd = (fundamental_solution(&(x + e), &y).unwrap()
                - fundamental_solution(&(x - e), &y).unwrap())
                / (2.0 * h);
            assert_abs_diff_eq!(g[k], fd, epsilon = 1e-6);
        }
        // the kernel depends on x − y only
        assert_abs_diff_eq!(g, -grad_fundamental(&y, &x).unwrap(), epsilon = 1e-15);

        let x3 = Vector3::new(0.3, -0.2, 0.5);
        let g3 = grad_fundamental(&x3, &Vector3::zeros()).unwrap();
        for k in 0..3 {
            let mut e = Vector3::zeros();
            e[k] = h;
            let fd = (fundamental_solution(&(x3 + e), &Vector3::zeros()).unwrap()
                - fundamental_solution(&(x3 - e), &Vector3::zeros()).unwrap())
                / (2.0 * h);
            assert_abs_diff_eq!(g3[k], fd, epsilon = 1e-6);
        }
    }

    #[test]
    fn unsupported_dimension() {
        let x = SVector::<f64, 4>::repeat(1.0);
        assert!(matches!(
            fundamental_solution(&x, &SVector::<f64, 4>::zeros()),
            Err(LeviError::Dimension(_))
        ));
    }

    #[test]
    fn levi_pair_constant_sigma() {
        let sigma = ConductivityField::<2>::constant(4.0);
        let x = Vector2::new(0.2, 0.1);
        let y = Vector2::new(-0.4, 0.3);
        let v = levi_pair(&sigma, &x, &y).unwrap();
        assert_eq!(v.r, 0.0);
        assert_abs_diff_eq!(v.p, fundamental_solution(&x, &y).unwrap() / 4.0, epsilon = 1e-16);
    }

    #[test]
    fn levi_pair_r_closed_form() {
        let sigma = wavy_field();
        let x = Vector2::new(0.31, 0.72);
        let y = Vector2::new(0.55, 0.9);
        let v = levi_pair(&sigma, &x, &y).unwrap();
        let d = x - y;
        let expected = d.dot(&sigma.grad_sigma(&x)) / (sigma.sigma(&y) * TAU * d.norm_squared());
        assert_abs_diff_eq!(v.r, expected, epsilon = 1e-13);
    }

    fn singularity_exponent<const D: usize>(sigma: &ConductivityField<D>, x: SVector<f64, D>, dir: SVector<f64, D>) -> f64 {
        let r1 = 1e-4;
        let r2 = 1e-6;
        let a = levi_pair(sigma, &x, &(x + dir * r1)).unwrap().r.abs();
        let b = levi_pair(sigma, &x, &(x + dir * r2)).unwrap().r.abs();
        (b / a).ln() / (r1 / r2).ln()
    }

    #[test]
    fn weak_singularity_exponents() {
        let sigma2 = exp_x1_field();
        let p2 = singularity_exponent(&sigma2, Vector2::new(0.1, 0.2), Vector2::new(0.6, 0.8));
        assert!((p2 - 1.0).abs() < 0.05, "2D exponent {p2}");
        let sigma3 = ConductivityField::<3>::new(
            |x| 2.0 + x[0],
            |_| Vector3::new(1.0, 0.0, 0.0),
        );
        let p3 = singularity_exponent(
            &sigma3,
            Vector3::new(0.1, 0.2, 0.3),
            Vector3::new(0.6, 0.0, 0.8),
        );
        assert!((p3 - 2.0).abs() < 0.05, "3D exponent {p3}");
        // |R|·|x−y| bounded along a ray in 2D
        let x = Vector2::new(0.1, 0.2);
        let dir = Vector2::new(0.6, 0.8);
        let scaled: Vec<f64> = [1e-2, 1e-4, 1e-6]
            .iter()
            .map(|&r| levi_pair(&sigma2, &x, &(x + dir * r)).unwrap().r.abs() * r)
            .collect();
        assert!((scaled[1] - scaled[2]).abs() < 1e-3 * scaled[2]);
    }

    #[test]
    fn double_layer_matches_normal_derivative() {
        let x = Vector3::new(0.1, 0.2, -0.1);
        let y = Vector3::new(0.7, -0.3, 0.4);
        let nu = Vector3::new(1.0, 2.0, -0.5).normalize();
        let h = 1e-5;
        let fd = (fundamental_solution(&x, &(y + nu * h)).unwrap()
            - fundamental_solution(&x, &(y - nu * h)).unwrap())
            / (2.0 * h);
        assert_abs_diff_eq!(double_layer(&x, &y, &nu).unwrap(), fd, epsilon = 1e-8);
    }

    #[test]
    fn gradient_double_layer_matches_differences() {
        let g = Vector3::new(0.3, -1.1, 0.4);
        let x = Vector3::new(0.1, 0.2, -0.1);
        let y = Vector3::new(0.7, -0.3, 0.4);
        let nu = Vector3::new(1.0, 2.0, -0.5).normalize();
        let h = 1e-5;
        let f = |y: Vector3<f64>| grad_fundamental(&x, &y).unwrap().dot(&g);
        let fd = -(f(y + nu * h) - f(y - nu * h)) / (2.0 * h);
        let v = gradient_double_layer(&x, &g, &y, &nu).unwrap();
        assert!((v - fd).abs() <= 1e-6 * v.abs());
    }

    #[test]
    fn k22_unit_circle_is_minus_one() {
        let circle = StarDomain2D::circle(1.0, Point2::new(0.3, -0.7));
        for i in 0..32 {
            for j in 0..32 {
                let t = TAU * i as f64 / 32.0;
                let tau = TAU * j as f64 / 32.0;
                assert_abs_diff_eq!(kernel_k22(&circle, t, tau), -1.0, epsilon = 1e-10);
            }
        }
        assert_abs_diff_eq!(kernel_k22(&circle, 0.0, PI), -1.0, epsilon = 1e-14);
    }

    #[test]
    fn k22_continuous_on_heart() {
        let heart = StarDomain2D::heart(Point2::new(0.5, 1.0));
        for t in [0.0, 1.0, 2.0, 4.5] {
            let diag = kernel_k22(&heart, t, t);
            let near = kernel_k22(&heart, t, t + 1e-4);
            assert!((diag - near).abs() <= 1e-3, "t = {t}: {diag} vs {near}");
        }
    }

    #[test]
    fn k11_split_constant_sigma_vanishes() {
        let heart = StarDomain2D::heart(Point2::new(0.5, 1.0));
        let sigma = ConductivityField::<2>::constant(2.0);
        for &(eta, t, xi, tau) in &[(0.5, 0.1, 0.5, 0.1), (0.3, 1.0, 0.7, 2.0)] {
            let s = kernel_k11_split(&heart, &sigma, eta, t, xi, tau).unwrap();
            assert_eq!(s.smooth, 0.0);
            assert_eq!(s.cot_coefficient, 0.0);
        }
        assert_eq!(kernel_k11(&heart, &sigma, 0.3, 1.0, 0.7, 2.0).unwrap(), 0.0);
    }

    #[test]
    fn k11_split_diagonal_on_circle() {
        let circle = StarDomain2D::circle(1.0, Point2::zeros());
        let s = kernel_k11_split(&circle, &exp_x1_field(), 0.5, 0.0, 0.5, 0.0).unwrap();
        assert_abs_diff_eq!(s.smooth, -0.5, epsilon = 1e-14);
    }

    #[test]
    fn k11_split_diagonal_is_off_diagonal_limit() {
        let heart = StarDomain2D::heart(Point2::new(0.5, 1.0));
        let sigma = wavy_field();
        for &(eta, t) in &[(0.35, 0.4), (0.8, 2.2), (0.6, 5.0)] {
            let diag = kernel_k11_split(&heart, &sigma, eta, t, eta, t).unwrap().smooth;
            let left = kernel_k11_split(&heart, &sigma, eta, t, eta, t - 1e-4).unwrap().smooth;
            let right = kernel_k11_split(&heart, &sigma, eta, t, eta, t + 1e-4).unwrap().smooth;
            let scale = diag.abs().max(1.0);
            assert!((0.5 * (left + right) - diag).abs() < 1e-5 * scale, "{diag} vs {left}, {right}");
        }
    }

    #[test]
    fn k11_split_reconstructs_raw_kernel() {
        let heart = StarDomain2D::heart(Point2::new(0.5, 1.0));
        let sigma = wavy_field();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let eta = rng.gen_range(0.05..0.95);
            let xi = if rng.gen_bool(0.5) { eta } else { rng.gen_range(0.05..0.95) };
            let t = rng.gen_range(0.0..TAU);
            let tau = rng.gen_range(0.0..TAU);
            let split = kernel_k11_split(&heart, &sigma, eta, t, xi, tau).unwrap();
            let raw = kernel_k11(&heart, &sigma, eta, t, xi, tau).unwrap();
            let rebuilt = split.smooth + split.cot_coefficient / (0.5 * (tau - t)).tan();
            assert!((rebuilt - raw).abs() <= 1e-9 * raw.abs().max(1.0), "{rebuilt} vs {raw}");
        }
    }

    #[test]
    fn k11_split_rejects_center() {
        let circle = StarDomain2D::circle(1.0, Point2::zeros());
        assert!(matches!(
            kernel_k11_split(&circle, &exp_x1_field(), 0.0, 0.0, 0.5, 1.0),
            Err(LeviError::Domain(_))
        ));
    }

    #[test]
    fn k12_constant_sigma_and_symmetry() {
        let circle = StarDomain2D::circle(1.0, Point2::zeros());
        let constant = ConductivityField::<2>::constant(1.5);
        assert_eq!(kernel_k12(&circle, &constant, 0.5, 0.3, 1.2).unwrap(), 0.0);
        let radial = ConductivityField::<2>::new(
            |x| 1.0 + x.norm_squared(),
            |x| x * 2.0,
        );
        for tau in [0.3, 1.1, 2.9] {
            let a = kernel_k12(&circle, &radial, 0.6, 0.0, tau).unwrap();
            let b = kernel_k12(&circle, &radial, 0.6, 0.0, -tau).unwrap();
            assert_abs_diff_eq!(a, b, epsilon = 1e-13);
        }
    }

    #[test]
    fn k12_matches_finite_difference() {
        let heart = StarDomain2D::heart(Point2::new(0.5, 1.0));
        let sigma = wavy_field();
        for &(eta, t, tau) in &[(0.4, 0.3, 2.0), (0.9, 1.0, 1.3), (0.7, 4.0, 3.0)] {
            let x = heart.domain_map(eta, t).unwrap();
            let g = sigma.grad_log_sigma(&x);
            let s = heart.sample(tau);
            let h = 1e-5;
            let f = |y: Point2| (x - y).dot(&g) / (x - y).norm_squared();
            // K12 = −∂_ν[(y−x)·g/|x−y|²]·|x'| = ∂_ν[(x−y)·g/|x−y|²]·|x'|
            let fd = (f(s.point + s.normal * h) - f(s.point - s.normal * h)) / (2.0 * h) * s.speed;
            let v = kernel_k12(&heart, &sigma, eta, t, tau).unwrap();
            assert!((v - fd).abs() <= 1e-4 * v.abs(), "{v} vs {fd}");
        }
    }

    #[test]
    fn k12_near_boundary_is_flagged() {
        let circle = StarDomain2D::circle(1.0, Point2::zeros());
        assert!(matches!(
            kernel_k12(&circle, &exp_x1_field(), 1.0, 0.7, 0.7),
            Err(LeviError::NearSingular(_))
        ));
    }

    #[test]
    fn k21_values() {
        let circle = StarDomain2D::circle(1.0, Point2::zeros());
        assert_eq!(kernel_k21(&circle, 0.0, 0.0, 1.0).unwrap(), 0.0);
        assert_abs_diff_eq!(
            kernel_k21(&circle, 0.0, 0.5, 0.0).unwrap(),
            0.25f64.ln() * 0.5,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(kernel_k21(&circle, 0.0, 0.5, 0.0).unwrap(), -std::f64::consts::LN_2, epsilon = 1e-12);
        let a = kernel_k21(&circle, 0.0, 1.0 - 1e-3, 0.0).unwrap();
        let b = kernel_k21(&circle, 0.0, 1.0 - 1e-6, 0.0).unwrap();
        assert!(b < a && b < -20.0);
        assert!(matches!(
            kernel_k21(&circle, 0.0, 1.0, 0.0),
            Err(LeviError::Singularity(_))
        ));
    }
}
