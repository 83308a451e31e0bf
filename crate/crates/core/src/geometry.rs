//! Parametric star-shaped domains.
//!
//! A planar domain is described by a 2π-periodic boundary curve `x(t)` given
//! relative to a center point `P₀`; the domain itself is swept by
//! `p̃(η, t) = P₀ + η·x(t)` for `(η, t) ∈ [0, 1] × [0, 2π)`. Surfaces in 3D are
//! radial graphs `r(θ, φ)·x̂(θ, φ)` over the unit sphere.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::sync::Arc;

use nalgebra::{Vector2, Vector3};

use crate::error::{LeviError, Result};

pub type Point2 = Vector2<f64>;
pub type Point3 = Vector3<f64>;

type CurveFn = Arc<dyn Fn(f64) -> Vector2<f64> + Send + Sync>;

/// Reduce an angle to `[0, 2π)`.
#[inline]
pub fn normalize_angle(t: f64) -> f64 {
    let r = t.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// A closed 2π-periodic curve with analytic first and second derivatives.
#[derive(Clone)]
pub struct ParametricCurve2D {
    point: CurveFn,
    d1: CurveFn,
    d2: CurveFn,
}

impl ParametricCurve2D {
    pub fn new<P, D1, D2>(point: P, d1: D1, d2: D2) -> Self
    where
        P: Fn(f64) -> Vector2<f64> + Send + Sync + 'static,
        D1: Fn(f64) -> Vector2<f64> + Send + Sync + 'static,
        D2: Fn(f64) -> Vector2<f64> + Send + Sync + 'static,
    {
        Self {
            point: Arc::new(point),
            d1: Arc::new(d1),
            d2: Arc::new(d2),
        }
    }

    pub fn point(&self, t: f64) -> Vector2<f64> {
        (self.point)(normalize_angle(t))
    }

    pub fn d1(&self, t: f64) -> Vector2<f64> {
        (self.d1)(normalize_angle(t))
    }

    pub fn d2(&self, t: f64) -> Vector2<f64> {
        (self.d2)(normalize_angle(t))
    }
}

impl fmt::Debug for ParametricCurve2D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ParametricCurve2D").finish_non_exhaustive()
    }
}

/// Everything the Nyström kernels need to know about one boundary parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub t: f64,
    /// `x(t)` relative to the center.
    pub local: Vector2<f64>,
    /// `x(t) + P₀`.
    pub point: Point2,
    pub d1: Vector2<f64>,
    pub d2: Vector2<f64>,
    /// `|x'(t)|`
    pub speed: f64,
    pub normal: Vector2<f64>,
    pub tangent: Vector2<f64>,
}

/// Star-shaped planar domain `{P₀ + η x(t)}`.
#[derive(Debug, Clone)]
pub struct StarDomain2D {
    curve: ParametricCurve2D,
    center: Point2,
}

const STAR_CHECK_SAMPLES: usize = 100;

impl StarDomain2D {
    /// Builds a domain and checks regularity and star-shapedness on a 100-point grid.
    pub fn new(curve: ParametricCurve2D, center: Point2) -> Result<Self> {
        let domain = Self { curve, center };
        for i in 0..STAR_CHECK_SAMPLES {
            let t = TAU * i as f64 / STAR_CHECK_SAMPLES as f64;
            let nu = domain.outward_normal(t)?;
            let x = domain.curve.point(t);
            if x.dot(&nu) <= 0.0 {
                return Err(LeviError::InvalidGeometry(format!(
                    "curve is not star-shaped about the center at t = {t:.6}"
                )));
            }
        }
        Ok(domain)
    }

    pub fn circle(radius: f64, center: Point2) -> Self {
        Self::ellipse(radius, radius, center)
    }

    pub fn ellipse(a: f64, b: f64, center: Point2) -> Self {
        let curve = ParametricCurve2D::new(
            move |t| Vector2::new(a * t.cos(), b * t.sin()),
            move |t| Vector2::new(-a * t.sin(), b * t.cos()),
            move |t| Vector2::new(-a * t.cos(), -b * t.sin()),
        );
        Self { curve, center }
    }

    /// `x(t) = (0.2 cos t, 0.4 sin t − 0.3 sin² t)`.
    pub fn heart(center: Point2) -> Self {
        let curve = ParametricCurve2D::new(
            |t| {
                let s = t.sin();
                Vector2::new(0.2 * t.cos(), 0.4 * s - 0.3 * s * s)
            },
            |t| Vector2::new(-0.2 * t.sin(), 0.4 * t.cos() - 0.3 * (2.0 * t).sin()),
            |t| Vector2::new(-0.2 * t.cos(), -0.4 * t.sin() - 0.6 * (2.0 * t).cos()),
        );
        Self { curve, center }
    }

    pub fn center(&self) -> Point2 {
        self.center
    }

    pub fn curve(&self) -> &ParametricCurve2D {
        &self.curve
    }

    /// Boundary point with derivatives; `point` includes the center offset.
    pub fn curve_eval(&self, t: f64) -> (Point2, Vector2<f64>, Vector2<f64>) {
        (
            self.curve.point(t) + self.center,
            self.curve.d1(t),
            self.curve.d2(t),
        )
    }

    pub fn outward_normal(&self, t: f64) -> Result<Vector2<f64>> {
        let d1 = self.curve.d1(t);
        let speed = d1.norm();
        if !(speed > 0.0) || !speed.is_finite() {
            return Err(LeviError::InvalidGeometry(format!(
                "degenerate curve derivative at t = {t}"
            )));
        }
        Ok(Vector2::new(d1.y, -d1.x) / speed)
    }

    /// Full local frame at `t`. Assumes the curve is regular (checked by [`StarDomain2D::new`]).
    pub fn sample(&self, t: f64) -> CurvePoint {
        let t = normalize_angle(t);
        let local = self.curve.point(t);
        let d1 = self.curve.d1(t);
        let d2 = self.curve.d2(t);
        let speed = d1.norm();
        let tangent = d1 / speed;
        CurvePoint {
            t,
            local,
            point: local + self.center,
            d1,
            d2,
            speed,
            normal: Vector2::new(tangent.y, -tangent.x),
            tangent,
        }
    }

    /// `p̃(η, t) = P₀ + η x(t)`.
    pub fn domain_map(&self, eta: f64, t: f64) -> Result<Point2> {
        if !(0.0..=1.0).contains(&eta) {
            return Err(LeviError::Domain(format!("eta = {eta} outside [0, 1]")));
        }
        Ok(self.center + self.curve.point(t) * eta)
    }

    /// `J(ξ, τ) = ξ x(τ)·ν(τ) |x'(τ)|`, i.e. `ξ (x₁x₂' − x₂x₁')`.
    pub fn jacobian(&self, xi: f64, tau: f64) -> f64 {
        let x = self.curve.point(tau);
        let d1 = self.curve.d1(tau);
        xi * (x.x * d1.y - x.y * d1.x)
    }

    /// Inverse of the polar-type map: `(η, t)` with `p = P₀ + η x(t)`.
    pub fn inverse_map(&self, p: &Point2) -> (f64, f64) {
        let rel = p - self.center;
        let rho = rel.norm();
        if rho == 0.0 {
            return (0.0, 0.0);
        }
        let target = rel.y.atan2(rel.x);
        let t = self.parameter_for_direction(target);
        let r = self.curve.point(t).norm();
        (rho / r, t)
    }

    /// Parameter `t` with `x(t)` pointing along the polar angle `alpha`.
    /// The polar angle of `x(t)` is strictly increasing for star-shaped curves.
    fn parameter_for_direction(&self, alpha: f64) -> f64 {
        const SAMPLES: usize = 256;
        let wrap = |a: f64| (a + PI).rem_euclid(TAU) - PI;
        let angle_at = |t: f64| {
            let x = self.curve.point(t);
            wrap(x.y.atan2(x.x) - alpha)
        };
        let mut lo = 0.0;
        let mut f_lo = angle_at(lo);
        for i in 1..=SAMPLES {
            let hi = TAU * i as f64 / SAMPLES as f64;
            let f_hi = angle_at(hi);
            // the wrapped difference crosses zero going upward (no jump of size 2π)
            if f_lo <= 0.0 && f_hi >= 0.0 && f_hi - f_lo < PI {
                let (mut a, mut b) = (lo, hi);
                for _ in 0..80 {
                    let m = 0.5 * (a + b);
                    if angle_at(m) < 0.0 {
                        a = m;
                    } else {
                        b = m;
                    }
                }
                return normalize_angle(0.5 * (a + b));
            }
            lo = hi;
            f_lo = f_hi;
        }
        normalize_angle(alpha)
    }

    pub fn contains(&self, p: &Point2) -> bool {
        self.inverse_map(p).0 < 1.0
    }

    /// Euclidean distance from `p` to the boundary curve (dense sampling plus local refinement).
    pub fn distance_to_boundary(&self, p: &Point2) -> f64 {
        const SAMPLES: usize = 1024;
        let dist2 = |t: f64| (self.curve.point(t) + self.center - p).norm_squared();
        let mut best_t = 0.0;
        let mut best = f64::INFINITY;
        for i in 0..SAMPLES {
            let t = TAU * i as f64 / SAMPLES as f64;
            let d = dist2(t);
            if d < best {
                best = d;
                best_t = t;
            }
        }
        // golden-section refinement on the bracketing cell
        let h = TAU / SAMPLES as f64;
        let (mut a, mut b) = (best_t - h, best_t + h);
        let g = 0.5 * (5f64.sqrt() - 1.0);
        let mut c = b - g * (b - a);
        let mut d = a + g * (b - a);
        for _ in 0..60 {
            if dist2(c) < dist2(d) {
                b = d;
            } else {
                a = c;
            }
            c = b - g * (b - a);
            d = a + g * (b - a);
        }
        best.min(dist2(0.5 * (a + b))).sqrt()
    }

    pub fn diameter(&self) -> f64 {
        const SAMPLES: usize = 256;
        let pts: Vec<_> = (0..SAMPLES)
            .map(|i| self.curve.point(TAU * i as f64 / SAMPLES as f64))
            .collect();
        let mut diam: f64 = 0.0;
        for (i, a) in pts.iter().enumerate() {
            for b in &pts[i + 1..] {
                diam = diam.max((a - b).norm());
            }
        }
        diam
    }

    /// Axis-aligned bounding box `(min, max)` of the boundary.
    pub fn bounding_box(&self) -> (Point2, Point2) {
        const SAMPLES: usize = 512;
        let mut lo = Point2::repeat(f64::INFINITY);
        let mut hi = Point2::repeat(f64::NEG_INFINITY);
        for i in 0..SAMPLES {
            let p = self.curve.point(TAU * i as f64 / SAMPLES as f64) + self.center;
            lo = lo.inf(&p);
            hi = hi.sup(&p);
        }
        (lo, hi)
    }

    /// Returns a translated copy.
    pub fn translated(&self, shift: Vector2<f64>) -> Self {
        Self {
            curve: self.curve.clone(),
            center: self.center + shift,
        }
    }
}

/// `r`, `∂r/∂θ`, `∂r/∂φ` at one parameter pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadiusSample {
    pub r: f64,
    pub r_theta: f64,
    pub r_phi: f64,
}

type RadiusFn = Arc<dyn Fn(f64, f64) -> RadiusSample + Send + Sync>;

/// Closed surface `{r(θ, φ) x̂(θ, φ)}` star-shaped about the origin.
#[derive(Clone)]
pub struct SurfacePatch3D {
    radius: RadiusFn,
}

impl fmt::Debug for SurfacePatch3D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SurfacePatch3D").finish_non_exhaustive()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfacePoint {
    pub point: Point3,
    pub normal: Vector3<f64>,
    /// `|∂_θ q × ∂_φ q|`
    pub area_element: f64,
}

/// Surface data at the image of a unit direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceNode {
    pub direction: Vector3<f64>,
    pub point: Point3,
    pub normal: Vector3<f64>,
    /// Surface measure relative to the unit-sphere measure, `ds = density · dS`.
    pub density: f64,
}

pub fn unit_direction(theta: f64, phi: f64) -> Vector3<f64> {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    Vector3::new(st * cp, st * sp, ct)
}

/// Polar angles of a nonzero vector, `θ ∈ [0, π]`, `φ ∈ [0, 2π)`.
pub fn direction_angles(v: &Vector3<f64>) -> (f64, f64) {
    let r = v.norm();
    let theta = (v.z / r).clamp(-1.0, 1.0).acos();
    let phi = normalize_angle(v.y.atan2(v.x));
    (theta, phi)
}

impl SurfacePatch3D {
    pub fn new<F>(radius: F) -> Self
    where
        F: Fn(f64, f64) -> RadiusSample + Send + Sync + 'static,
    {
        Self {
            radius: Arc::new(radius),
        }
    }

    pub fn sphere(radius: f64) -> Self {
        Self::new(move |_, _| RadiusSample {
            r: radius,
            r_theta: 0.0,
            r_phi: 0.0,
        })
    }

    pub fn unit_sphere() -> Self {
        Self::sphere(1.0)
    }

    /// `r(θ, φ) = √(1.44 + 0.5 cos 2φ (cos 2θ − 1))`.
    pub fn pinched_ball() -> Self {
        Self::new(|theta, phi| {
            let (st, ct) = theta.sin_cos();
            let (s2p, c2p) = (2.0 * phi).sin_cos();
            let r = (1.44 + 0.5 * c2p * ((2.0 * theta).cos() - 1.0)).sqrt();
            RadiusSample {
                r,
                r_theta: -st * ct * c2p / r,
                r_phi: st * st * s2p / r,
            }
        })
    }

    pub fn radius(&self, theta: f64, phi: f64) -> RadiusSample {
        (self.radius)(theta, normalize_angle(phi))
    }

    pub fn surface_eval(&self, theta: f64, phi: f64) -> Result<SurfacePoint> {
        if !(0.0..=PI).contains(&theta) {
            return Err(LeviError::Domain(format!("theta = {theta} outside [0, π]")));
        }
        let phi = normalize_angle(phi);
        let node = self.node_from_angles(theta, phi);
        Ok(SurfacePoint {
            point: node.point,
            normal: node.normal,
            area_element: node.density * theta.sin(),
        })
    }

    /// Surface data at the point over the unit direction `dir`.
    pub fn node(&self, dir: &Vector3<f64>) -> SurfaceNode {
        let (theta, phi) = direction_angles(dir);
        let mut node = self.node_from_angles(theta, phi);
        node.direction = *dir / dir.norm();
        node.point = node.direction * self.radius(theta, phi).r;
        node
    }

    fn node_from_angles(&self, theta: f64, phi: f64) -> SurfaceNode {
        const POLE_GUARD: f64 = 1e-9;
        let dir = unit_direction(theta, phi);
        let sample = self.radius(theta, phi);
        let st = theta.sin();
        // r_φ / sin θ stays bounded at the poles for smooth surfaces
        let r_phi_over_sin = if st.abs() > POLE_GUARD {
            sample.r_phi / st
        } else {
            let nudged = if theta < 0.5 * PI {
                POLE_GUARD
            } else {
                PI - POLE_GUARD
            };
            self.radius(nudged, phi).r_phi / nudged.sin()
        };
        let (sp, cp) = phi.sin_cos();
        let ct = theta.cos();
        let e_theta = Vector3::new(ct * cp, ct * sp, -st);
        let e_phi = Vector3::new(-sp, cp, 0.0);
        let n = dir * sample.r - e_theta * sample.r_theta - e_phi * r_phi_over_sin;
        let len = n.norm();
        SurfaceNode {
            direction: dir,
            point: dir * sample.r,
            normal: n / len,
            density: sample.r * len,
        }
    }

    pub fn radius_toward(&self, dir: &Vector3<f64>) -> f64 {
        let (theta, phi) = direction_angles(dir);
        self.radius(theta, phi).r
    }

    /// `|p| / r(p̂)`; values below one are inside.
    pub fn radial_fraction(&self, p: &Point3) -> f64 {
        let rho = p.norm();
        if rho == 0.0 {
            return 0.0;
        }
        rho / self.radius_toward(p)
    }

    pub fn contains(&self, p: &Point3) -> bool {
        self.radial_fraction(p) < 1.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn origin() -> Point2 {
        Point2::zeros()
    }

    #[test]
    fn circle_eval_at_zero() {
        let d = StarDomain2D::circle(1.0, origin());
        let (p, d1, d2) = d.curve_eval(0.0);
        assert_abs_diff_eq!(p, Vector2::new(1.0, 0.0), epsilon = 1e-15);
        assert_abs_diff_eq!(d1, Vector2::new(0.0, 1.0), epsilon = 1e-15);
        assert_abs_diff_eq!(d2, Vector2::new(-1.0, 0.0), epsilon = 1e-15);
    }

    #[test]
    fn heart_and_ellipse_points() {
        let c = Point2::new(0.5, 1.0);
        let heart = StarDomain2D::heart(c);
        assert_abs_diff_eq!(heart.curve_eval(0.0).0, Vector2::new(0.7, 1.0), epsilon = 1e-15);
        let ellipse = StarDomain2D::ellipse(1.0, 0.5, c);
        assert_abs_diff_eq!(
            ellipse.curve_eval(0.5 * PI).0,
            Vector2::new(0.5, 1.5),
            epsilon = 1e-15
        );
    }

    #[test]
    fn normals() {
        let circle = StarDomain2D::circle(1.0, origin());
        assert_abs_diff_eq!(
            circle.outward_normal(0.5 * PI).unwrap(),
            Vector2::new(0.0, 1.0),
            epsilon = 1e-15
        );
        let ellipse = StarDomain2D::ellipse(1.0, 0.5, origin());
        assert_abs_diff_eq!(
            ellipse.outward_normal(0.0).unwrap(),
            Vector2::new(1.0, 0.0),
            epsilon = 1e-15
        );
        let heart = StarDomain2D::heart(Point2::new(0.5, 1.0));
        // x'(0) = (0, 0.4)
        assert_abs_diff_eq!(heart.curve().d1(0.0), Vector2::new(0.0, 0.4), epsilon = 1e-15);
        assert_abs_diff_eq!(
            heart.outward_normal(0.0).unwrap(),
            Vector2::new(1.0, 0.0),
            epsilon = 1e-15
        );
    }

    #[test]
    fn degenerate_curve_is_rejected() {
        let curve = ParametricCurve2D::new(
            |t| Vector2::new(t.cos(), t.sin()),
            |_| Vector2::zeros(),
            |_| Vector2::zeros(),
        );
        assert!(matches!(
            StarDomain2D::new(curve, origin()),
            Err(LeviError::InvalidGeometry(_))
        ));
    }

    #[test]
    fn non_star_curve_is_rejected() {
        // circle not containing the origin
        let curve = ParametricCurve2D::new(
            |t| Vector2::new(3.0 + t.cos(), t.sin()),
            |t| Vector2::new(-t.sin(), t.cos()),
            |t| Vector2::new(-t.cos(), -t.sin()),
        );
        assert!(StarDomain2D::new(curve, origin()).is_err());
    }

    #[test]
    fn domain_map_endpoints() {
        let heart = StarDomain2D::heart(Point2::new(0.5, 1.0));
        for t in [0.0, 1.0, 4.0] {
            assert_eq!(heart.domain_map(0.0, t).unwrap(), Point2::new(0.5, 1.0));
        }
        assert_abs_diff_eq!(
            heart.domain_map(1.0, 0.0).unwrap(),
            Point2::new(0.7, 1.0),
            epsilon = 1e-15
        );
        let circle = StarDomain2D::circle(1.0, origin());
        assert_abs_diff_eq!(
            circle.domain_map(0.5, 0.0).unwrap(),
            Point2::new(0.5, 0.0),
            epsilon = 1e-15
        );
        assert!(matches!(circle.domain_map(1.5, 0.0), Err(LeviError::Domain(_))));
        assert!(circle.domain_map(-0.1, 0.0).is_err());
    }

    #[test]
    fn jacobian_values() {
        let circle = StarDomain2D::circle(1.0, origin());
        for tau in [0.0, 1.0, 2.5] {
            assert_abs_diff_eq!(circle.jacobian(0.3, tau), 0.3, epsilon = 1e-15);
            assert_eq!(circle.jacobian(0.0, tau), 0.0);
        }
        let ellipse = StarDomain2D::ellipse(1.0, 0.5, origin());
        assert_abs_diff_eq!(ellipse.jacobian(1.0, 0.0), 0.5, epsilon = 1e-15);
        // half the trapezoidal integral of J(1, ·) is the enclosed area π/2
        let n = 64;
        let area: f64 = (0..n)
            .map(|j| ellipse.jacobian(1.0, TAU * j as f64 / n as f64))
            .sum::<f64>()
            * TAU
            / n as f64
            / 2.0;
        assert_abs_diff_eq!(area, 0.5 * PI, epsilon = 1e-12);
    }

    #[test]
    fn area_identity_unit_circle() {
        let circle = StarDomain2D::circle(1.0, origin());
        for n in [16, 32] {
            let sum: f64 = (0..n)
                .map(|j| {
                    let s = circle.sample(TAU * j as f64 / n as f64);
                    s.local.dot(&s.normal) * s.speed
                })
                .sum();
            assert_abs_diff_eq!(0.5 * sum * TAU / n as f64, PI, epsilon = 1e-12);
        }
    }

    #[test]
    fn star_shapedness_of_builtins() {
        let c = Point2::new(0.5, 1.0);
        for d in [
            StarDomain2D::heart(c),
            StarDomain2D::ellipse(1.0, 0.5, c),
            StarDomain2D::circle(2.0, c),
        ] {
            for i in 0..100 {
                let s = d.sample(TAU * i as f64 / 100.0);
                assert!(s.local.dot(&s.normal) > 0.0);
            }
            assert!(StarDomain2D::new(d.curve().clone(), c).is_ok());
        }
    }

    #[test]
    fn periodicity() {
        let heart = StarDomain2D::heart(Point2::new(0.5, 1.0));
        for t in [0.1, 1.3, 5.9] {
            assert_abs_diff_eq!(heart.curve_eval(t + TAU).0, heart.curve_eval(t).0, epsilon = 1e-14);
            assert_abs_diff_eq!(heart.curve_eval(t - TAU).1, heart.curve_eval(t).1, epsilon = 1e-14);
        }
    }

    #[test]
    fn inverse_map_round_trip() {
        let heart = StarDomain2D::heart(Point2::new(0.5, 1.0));
        for &(eta, t) in &[(0.3, 0.2), (0.9, 2.0), (0.5, 4.4), (0.99, 6.0)] {
            let p = heart.domain_map(eta, t).unwrap();
            let (e2, t2) = heart.inverse_map(&p);
            assert_abs_diff_eq!(e2, eta, epsilon = 1e-10);
            assert_abs_diff_eq!(t2, t, epsilon = 1e-10);
        }
        assert!(heart.contains(&Point2::new(0.5, 1.0)));
        assert!(!heart.contains(&Point2::new(0.75, 1.0)));
    }

    #[test]
    fn distance_and_diameter() {
        let circle = StarDomain2D::circle(1.0, Point2::new(2.0, -1.0));
        assert_abs_diff_eq!(
            circle.distance_to_boundary(&Point2::new(2.3, -1.0)),
            0.7,
            epsilon = 1e-10
        );
        assert_abs_diff_eq!(circle.diameter(), 2.0, epsilon = 1e-12);
    }

    #[test]
    fn jacobian_is_linear_in_xi() {
        let heart = StarDomain2D::heart(Point2::new(0.5, 1.0));
        for &(xi, tau) in &[(0.25, 0.1), (0.7, 3.3), (1.0, 5.0)] {
            assert_eq!(heart.jacobian(xi, tau), xi * heart.jacobian(1.0, tau));
        }
    }

    #[test]
    fn unit_sphere_equator() {
        let s = SurfacePatch3D::unit_sphere();
        let p = s.surface_eval(0.5 * PI, 0.0).unwrap();
        assert_abs_diff_eq!(p.point, Vector3::new(1.0, 0.0, 0.0), epsilon = 1e-15);
        assert_abs_diff_eq!(p.normal, Vector3::new(1.0, 0.0, 0.0), epsilon = 1e-15);
        assert_abs_diff_eq!(p.area_element, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn pinched_ball_radius() {
        let s = SurfacePatch3D::pinched_ball();
        assert_abs_diff_eq!(s.radius(0.5 * PI, 0.25 * PI).r, 1.2, epsilon = 1e-14);
        assert_abs_diff_eq!(s.radius(0.0, 1.234).r, 1.2, epsilon = 1e-14);
        let pole = s.surface_eval(0.0, 0.3).unwrap();
        assert_abs_diff_eq!(pole.point, Vector3::new(0.0, 0.0, 1.2), epsilon = 1e-14);
        assert_eq!(pole.area_element, 0.0);
    }

    #[test]
    fn pinched_ball_partials_match_differences() {
        let s = SurfacePatch3D::pinched_ball();
        let h = 1e-6;
        for &(th, ph) in &[(0.4, 0.3), (1.2, 2.2), (2.7, 5.1)] {
            let a = s.radius(th, ph);
            let dth = (s.radius(th + h, ph).r - s.radius(th - h, ph).r) / (2.0 * h);
            let dph = (s.radius(th, ph + h).r - s.radius(th, ph - h).r) / (2.0 * h);
            assert_abs_diff_eq!(a.r_theta, dth, epsilon = 1e-8);
            assert_abs_diff_eq!(a.r_phi, dph, epsilon = 1e-8);
        }
    }

    #[test]
    fn surface_normal_is_outward_unit_and_orthogonal() {
        let s = SurfacePatch3D::pinched_ball();
        let h = 1e-6;
        for &(th, ph) in &[(0.4, 0.3), (1.2, 2.2), (2.7, 5.1)] {
            let p = s.surface_eval(th, ph).unwrap();
            assert_abs_diff_eq!(p.normal.norm(), 1.0, epsilon = 1e-14);
            assert!(p.normal.dot(&p.point) > 0.0);
            let dth = (s.surface_eval(th + h, ph).unwrap().point
                - s.surface_eval(th - h, ph).unwrap().point)
                / (2.0 * h);
            let dph = (s.surface_eval(th, ph + h).unwrap().point
                - s.surface_eval(th, ph - h).unwrap().point)
                / (2.0 * h);
            assert_abs_diff_eq!(p.normal.dot(&dth), 0.0, epsilon = 1e-8);
            assert_abs_diff_eq!(p.normal.dot(&dph), 0.0, epsilon = 1e-8);
            assert_abs_diff_eq!(dth.cross(&dph).norm(), p.area_element, epsilon = 1e-7);
        }
    }
}
