//! Internal node sets for the dual reciprocity solvers.
//!
//! Default nodes come from a square (cubic) lattice anchored at the domain
//! center and clipped away from the boundary. The spacing is scanned until the
//! clipped lattice holds at least the requested count; surplus points closest
//! to the boundary are dropped so the count is exact.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::SVector;

use crate::error::{LeviError, Result};
use crate::geometry::{Point2, Point3, StarDomain2D, SurfacePatch3D};

/// Fraction of the diameter kept clear of the boundary in 2D.
pub const PLANAR_MARGIN: f64 = 0.05;
/// Radial fraction kept clear of the surface in 3D.
pub const RADIAL_MARGIN: f64 = 0.10;

/// Lattice points of spacing `h` with positive clearance, paired with that clearance.
fn clipped<const D: usize>(
    center: &SVector<f64, D>,
    half_extent: f64,
    h: f64,
    clearance: &impl Fn(&SVector<f64, D>) -> f64,
) -> Vec<(SVector<f64, D>, f64)> {
    let steps = (half_extent / h).ceil() as i64;
    let side = (2 * steps + 1) as usize;
    let total = side.pow(D as u32);
    let mut out = Vec::new();
    for flat in 0..total {
        let mut rest = flat;
        let mut p = *center;
        for axis in 0..D {
            let i = (rest % side) as i64 - steps;
            rest /= side;
            p[axis] += i as f64 * h;
        }
        let c = clearance(&p);
        if c > 0.0 {
            out.push((p, c));
        }
    }
    out
}

fn exact_lattice<const D: usize>(
    center: SVector<f64, D>,
    half_extent: f64,
    count: usize,
    clearance: impl Fn(&SVector<f64, D>) -> f64,
) -> Result<Vec<SVector<f64, D>>> {
    if count == 0 {
        return Err(LeviError::Nodes("at least one internal node is required".into()));
    }
    if clearance(&center) <= 0.0 {
        return Err(LeviError::Nodes("domain center violates the boundary margin".into()));
    }
    // coarse scan brackets the spacing, fine scan finds the largest admissible one
    let mut h = 2.0 * half_extent;
    while clipped(&center, half_extent, h, &clearance).len() < count {
        h *= 0.8;
        if h < 1e-6 * half_extent {
            return Err(LeviError::Nodes(format!("lattice scan could not reach {count} nodes")));
        }
    }
    h /= 0.8;
    for _ in 0..100 {
        let mut pts = clipped(&center, half_extent, h, &clearance);
        if pts.len() >= count {
            // stable sort keeps lattice order among equal clearances
            pts.sort_by(|a, b| b.1.total_cmp(&a.1));
            pts.truncate(count);
            let mut kept: Vec<_> = pts.into_iter().map(|p| p.0).collect();
            kept.sort_by(|a, b| {
                a.iter()
                    .rev()
                    .zip(b.iter().rev())
                    .map(|(x, y)| x.total_cmp(y))
                    .find(|o| o.is_ne())
                    .unwrap_or(std::cmp::Ordering::Equal)
            });
            return Ok(kept);
        }
        h *= 0.995;
    }
    Err(LeviError::Nodes(format!("lattice scan could not reach {count} nodes")))
}

/// `count` lattice nodes inside a planar domain, at least 5% of its diameter from the boundary.
pub fn planar_lattice(domain: &StarDomain2D, count: usize) -> Result<Vec<Point2>> {
    let diameter = domain.diameter();
    let margin = PLANAR_MARGIN * diameter;
    let (lo, hi) = domain.bounding_box();
    let center = domain.center();
    let half_extent = (hi - center).amax().max((center - lo).amax());
    exact_lattice(center, half_extent, count, |p| {
        if domain.contains(p) {
            domain.distance_to_boundary(p) - margin
        } else {
            -1.0
        }
    })
}

/// `count` cubic-lattice nodes inside a star-shaped surface, within 90% of the radius.
pub fn spatial_lattice(surface: &SurfacePatch3D, count: usize) -> Result<Vec<Point3>> {
    let mut reach: f64 = 0.0;
    for i in 0..=32 {
        for k in 0..64 {
            let theta = std::f64::consts::PI * i as f64 / 32.0;
            let phi = std::f64::consts::TAU * k as f64 / 64.0;
            reach = reach.max(surface.radius(theta, phi).r);
        }
    }
    exact_lattice(Point3::zeros(), reach, count, |p| {
        1.0 - RADIAL_MARGIN - surface.radial_fraction(p)
    })
}

/// Parses one point per line; blank lines and lines starting with `#` are skipped.
pub fn parse_nodes<const D: usize>(text: &str) -> Result<Vec<SVector<f64, D>>> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let coords = line
            .split_whitespace()
            .map(|s| s.parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| LeviError::Nodes(format!("line {}: {e}", lineno + 1)))?;
        if coords.len() != D {
            return Err(LeviError::Nodes(format!(
                "line {}: expected {D} coordinates, found {}",
                lineno + 1,
                coords.len()
            )));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(LeviError::Nodes(format!("line {}: non-finite coordinate", lineno + 1)));
        }
        out.push(SVector::from_column_slice(&coords));
    }
    Ok(out)
}

pub fn format_nodes<const D: usize>(nodes: &[SVector<f64, D>]) -> String {
    let mut s = String::new();
    for p in nodes {
        let cols: Vec<String> = p.iter().map(|c| format!("{c:.17e}")).collect();
        let _ = writeln!(s, "{}", cols.join(" "));
    }
    s
}

pub fn read_nodes<const D: usize>(path: &Path) -> Result<Vec<SVector<f64, D>>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| LeviError::Nodes(format!("{}: {e}", path.display())))?;
    parse_nodes(&text).map_err(|e| match e {
        LeviError::Nodes(m) => LeviError::Nodes(format!("{}: {m}", path.display())),
        other => other,
    })
}

pub fn write_nodes<const D: usize>(path: &Path, nodes: &[SVector<f64, D>]) -> Result<()> {
    Ok(std::fs::write(path, format_nodes(nodes))?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn planar_counts_are_exact_and_inside() {
        let heart = StarDomain2D::heart(Point2::new(0.5, 1.0));
        let margin = PLANAR_MARGIN * heart.diameter();
        for m in [9, 14, 21, 30, 41, 196] {
            let nodes = planar_lattice(&heart, m).unwrap();
            assert_eq!(nodes.len(), m);
            for p in &nodes {
                assert!(heart.contains(p));
                assert!(heart.distance_to_boundary(p) >= margin - 1e-12);
            }
            for i in 0..nodes.len() {
                for j in 0..i {
                    assert!((nodes[i] - nodes[j]).norm() > 1e-6);
                }
            }
        }
        let ellipse = StarDomain2D::ellipse(1.0, 0.5, Point2::new(0.5, 1.0));
        assert_eq!(planar_lattice(&ellipse, 208).unwrap().len(), 208);
    }

    #[test]
    fn spatial_counts_are_exact_and_inside() {
        let ball = SurfacePatch3D::pinched_ball();
        for m in [15, 27, 79, 136] {
            let nodes = spatial_lattice(&ball, m).unwrap();
            assert_eq!(nodes.len(), m);
            assert!(nodes.iter().all(|p| ball.radial_fraction(p) <= 1.0 - RADIAL_MARGIN + 1e-12));
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let heart = StarDomain2D::heart(Point2::new(0.5, 1.0));
        assert_eq!(planar_lattice(&heart, 30).unwrap(), planar_lattice(&heart, 30).unwrap());
    }

    #[test]
    fn text_round_trip() {
        let pts = vec![Point3::new(0.1, -2.0, 1.0 / 3.0), Point3::new(1e-9, 0.0, 5.5)];
        let back: Vec<Point3> = parse_nodes(&format_nodes(&pts)).unwrap();
        assert_eq!(back, pts);
    }

    #[test]
    fn malformed_lines_rejected() {
        assert!(matches!(parse_nodes::<2>("0.1 0.2 0.3\n"), Err(LeviError::Nodes(_))));
        assert!(matches!(parse_nodes::<2>("0.1 x\n"), Err(LeviError::Nodes(_))));
        assert_eq!(parse_nodes::<2>("# header\n\n1 2\n").unwrap().len(), 1);
    }
}
