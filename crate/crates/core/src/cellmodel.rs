//! Cells, their polygonal boundary approximations, and the per-segment
//! inward pulling forces they exert.

use crate::error::{Error, Result};
use crate::mesh::Point2;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use std::f64::consts::PI;

/// A circular cell: center and radius R (µm).
#[derive(Debug, Clone, Copy)]
pub struct CellSpec {
    pub center: Point2,
    pub radius: f64,
}

/// Regular n-gon approximation of a cell boundary.
///
/// Vertices are equally spaced in angle on the circle of radius
/// `circumradius` about the cell center, in counterclockwise order. With
/// `equal_area` set, the circumradius is inflated so the polygon area
/// equals the cell area πR² for every degree.
#[derive(Debug, Clone)]
pub struct PolygonApprox {
    pub degree: usize,
    pub vertices: Vec<Point2>,
    pub circumradius: f64,
    pub equal_area: bool,
    pub center: Point2,
    pub cell_radius: f64,
}

impl PolygonApprox {
    pub fn area(&self) -> f64 {
        let n = self.degree as f64;
        0.5 * n * self.circumradius * self.circumradius * (2.0 * PI / n).sin()
    }

    pub fn perimeter(&self) -> f64 {
        let n = self.vertices.len();
        (0..n)
            .map(|i| self.vertices[i].dist(self.vertices[(i + 1) % n]))
            .sum()
    }
}

/// One boundary line segment and the inward point force it carries.
#[derive(Debug, Clone, Copy)]
pub struct ForceSegment {
    pub midpoint: Point2,
    /// Unit normal pointing toward the cell center.
    pub normal: [f64; 2],
    /// Segment length ΔΓ (µm).
    pub length: f64,
    /// Force magnitude per unit length along this segment.
    pub magnitude: f64,
}

impl ForceSegment {
    /// The concentrated force carried by this segment: magnitude · ΔΓ · n.
    pub fn force(&self) -> [f64; 2] {
        [
            self.magnitude * self.length * self.normal[0],
            self.magnitude * self.length * self.normal[1],
        ]
    }
}

/// Approximates a cell by a regular polygon with `n` vertices at angles
/// `phase + 2πk/n`.
///
/// With `equal_area`, the circumradius is `R·sqrt(2π / (n·sin(2π/n)))` so
/// the polygon area equals πR²; otherwise the vertices sit on the cell
/// circle itself.
pub fn polygonize(cell: CellSpec, n: usize, equal_area: bool, phase: f64) -> PolygonApprox {
    assert!(n >= 3, "polygon degree must be at least 3");
    let nf = n as f64;
    let circumradius = if equal_area {
        cell.radius * (2.0 * PI / (nf * (2.0 * PI / nf).sin())).sqrt()
    } else {
        cell.radius
    };
    let vertices = (0..n)
        .map(|k| {
            let theta = phase + 2.0 * PI * k as f64 / nf;
            Point2::new(
                cell.center.x + circumradius * theta.cos(),
                cell.center.y + circumradius * theta.sin(),
            )
        })
        .collect();
    PolygonApprox {
        degree: n,
        vertices,
        circumradius,
        equal_area,
        center: cell.center,
        cell_radius: cell.radius,
    }
}

/// Builds one force segment per polygon edge.
///
/// With `conserve_total`, the magnitude is rescaled to
/// `p * 2πR / perimeter` so the total scalar force Σ P·ΔΓ equals `p·2πR`
/// for every polygon degree; otherwise the magnitude is `p` as given.
pub fn force_segments(poly: &PolygonApprox, p: f64, conserve_total: bool) -> Vec<ForceSegment> {
    let magnitude = if conserve_total {
        p * 2.0 * PI * poly.cell_radius / poly.perimeter()
    } else {
        p
    };
    let n = poly.vertices.len();
    (0..n)
        .map(|i| {
            let a = poly.vertices[i];
            let b = poly.vertices[(i + 1) % n];
            segment_from_edge(a, b, poly.center, magnitude)
        })
        .collect()
}

/// Force segment on the edge (a, b) with the inward normal chosen to point
/// toward `center`.
pub fn segment_from_edge(a: Point2, b: Point2, center: Point2, magnitude: f64) -> ForceSegment {
    let length = a.dist(b);
    let midpoint = Point2::new(0.5 * (a.x + b.x), 0.5 * (a.y + b.y));
    let mut normal = [(b.y - a.y) / length, -(b.x - a.x) / length];
    let toward = [center.x - midpoint.x, center.y - midpoint.y];
    if normal[0] * toward[0] + normal[1] * toward[1] < 0.0 {
        normal = [-normal[0], -normal[1]];
    }
    ForceSegment { midpoint, normal, length, magnitude }
}

/// Region over which cell centers are placed.
#[derive(Debug, Clone, Copy)]
pub struct PlacementRegion {
    pub half_width: f64,
}

/// Samples a cell population from a Poisson point process.
///
/// The cell count is Poisson(λ); centers are uniform over the placement
/// region, re-drawn until every center keeps a distance of at least `2R`
/// from the others and `R` from the region boundary. Deterministic for a
/// fixed seed.
pub fn sample_cells(
    lambda: f64,
    radius: f64,
    seed: u64,
    region: PlacementRegion,
) -> Result<Vec<CellSpec>> {
    assert!(lambda > 0.0, "Poisson rate must be positive");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let count = Poisson::new(lambda).expect("valid rate").sample(&mut rng) as usize;
    let w = region.half_width - radius;
    if w <= 0.0 {
        return Err(Error::SamplingFailed { attempts: 0 });
    }
    let max_attempts = 10_000;
    let mut cells: Vec<CellSpec> = Vec::with_capacity(count);
    let mut attempts = 0;
    while cells.len() < count {
        if attempts >= max_attempts {
            return Err(Error::SamplingFailed { attempts });
        }
        attempts += 1;
        let candidate = Point2::new(rng.random_range(-w..=w), rng.random_range(-w..=w));
        if cells
            .iter()
            .all(|c| c.center.dist(candidate) >= 2.0 * radius)
        {
            cells.push(CellSpec { center: candidate, radius });
        }
    }
    Ok(cells)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn unit_cell() -> CellSpec {
        CellSpec { center: Point2::new(0.0, 0.0), radius: 0.1 }
    }

    #[test]
    fn equal_area_square_matches_closed_form() {
        let poly = polygonize(unit_cell(), 4, true, 0.0);
        // rho = R * sqrt(pi / 2) for the square
        assert_relative_eq!(poly.circumradius, 0.1 * (PI / 2.0).sqrt(), max_relative = 1e-14);
        assert_relative_eq!(poly.area(), PI * 0.01, max_relative = 1e-12);
        let shoelace = crate::mesh::polygon_area(&poly.vertices);
        assert_relative_eq!(shoelace, PI * 0.01, max_relative = 1e-12);
    }

    #[test]
    fn high_degree_circumradius_approaches_cell_radius() {
        let poly = polygonize(unit_cell(), 720, true, 0.0);
        assert!((poly.circumradius / 0.1 - 1.0).abs() <= 1e-5);
    }

    #[test]
    fn triangle_keeps_equal_area() {
        let poly = polygonize(unit_cell(), 3, true, 0.3);
        assert_relative_eq!(
            crate::mesh::polygon_area(&poly.vertices),
            PI * 0.01,
            max_relative = 1e-12
        );
    }

    #[test]
    fn equal_area_holds_for_degrees_three_to_eight() {
        for n in 3..=8 {
            let poly = polygonize(unit_cell(), n, true, 0.1 * n as f64);
            assert_relative_eq!(
                crate::mesh::polygon_area(&poly.vertices),
                PI * 0.01,
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn segments_tile_the_boundary() {
        for n in 3..=8 {
            let poly = polygonize(unit_cell(), n, false, 0.7);
            let segs = force_segments(&poly, 1.0, false);
            let total: f64 = segs.iter().map(|s| s.length).sum();
            assert_relative_eq!(total, poly.perimeter(), max_relative = 1e-12);
        }
    }

    #[test]
    fn closed_polygon_forces_cancel() {
        for n in [3, 5, 8] {
            let poly = polygonize(unit_cell(), n, true, 0.2);
            let segs = force_segments(&poly, 2.5, false);
            let (mut fx, mut fy) = (0.0, 0.0);
            for s in &segs {
                let f = s.force();
                fx += f[0];
                fy += f[1];
            }
            let bound = 1e-12 * 2.5 * poly.perimeter();
            assert!(fx.abs() <= bound && fy.abs() <= bound, "net force ({fx}, {fy})");
        }
    }

    #[test]
    fn conserve_total_rescales_to_cell_circumference() {
        let p = 10.0;
        for n in 3..=8 {
            let poly = polygonize(unit_cell(), n, true, 0.0);
            let segs = force_segments(&poly, p, true);
            let total: f64 = segs.iter().map(|s| s.magnitude * s.length).sum();
            assert_relative_eq!(total, p * 2.0 * PI * 0.1, max_relative = 1e-12);
        }
    }

    #[test]
    fn axis_square_normals_point_at_center() {
        // phase 0 puts the square's vertices on the axes; every edge midpoint
        // then sees the center along ±(√2/2, √2/2)-type directions.
        let poly = polygonize(unit_cell(), 4, false, 0.0);
        let segs = force_segments(&poly, 1.0, false);
        let s = 0.5f64.sqrt();
        let expected = [[-s, -s], [s, -s], [s, s], [-s, s]];
        for (seg, exp) in segs.iter().zip(expected) {
            assert_abs_diff_eq!(seg.normal[0], exp[0], epsilon = 1e-14);
            assert_abs_diff_eq!(seg.normal[1], exp[1], epsilon = 1e-14);
        }
    }

    #[test]
    fn inward_normals_hold_for_random_convex_polygons() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let n = rng.random_range(3..30);
            let phase = rng.random_range(0.0..PI);
            let r = rng.random_range(0.05..5.0);
            let cx = rng.random_range(-3.0..3.0);
            let cell = CellSpec { center: Point2::new(cx, -cx), radius: r };
            let poly = polygonize(cell, n, rng.random_bool(0.5), phase);
            for seg in force_segments(&poly, 1.0, false) {
                let toward = [cell.center.x - seg.midpoint.x, cell.center.y - seg.midpoint.y];
                let dot = seg.normal[0] * toward[0] + seg.normal[1] * toward[1];
                assert!(dot > 0.0, "normal not inward for n={n}");
                let norm = (seg.normal[0].powi(2) + seg.normal[1].powi(2)).sqrt();
                assert_abs_diff_eq!(norm, 1.0, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn sampling_is_deterministic_and_respects_separation() {
        let region = PlacementRegion { half_width: 5.0 };
        let a = sample_cells(15.0, 0.1, 42, region).unwrap();
        let b = sample_cells(15.0, 0.1, 42, region).unwrap();
        assert_eq!(a.len(), b.len());
        for (ca, cb) in a.iter().zip(&b) {
            assert_eq!(ca.center, cb.center);
        }
        for (i, ci) in a.iter().enumerate() {
            assert!(ci.center.x.abs() <= 5.0 - 0.1 && ci.center.y.abs() <= 5.0 - 0.1);
            for cj in &a[..i] {
                assert!(ci.center.dist(cj.center) >= 0.2);
            }
        }
    }

    #[test]
    fn sample_count_matches_poisson_mean() {
        let region = PlacementRegion { half_width: 5.0 };
        let mut total = 0usize;
        let n_seeds = 10_000;
        for seed in 0..n_seeds {
            total += sample_cells(15.0, 0.1, seed, region).unwrap().len();
        }
        let mean = total as f64 / n_seeds as f64;
        assert!((14.7..=15.3).contains(&mean), "sample mean {mean}");
    }

    #[test]
    fn crowded_region_fails() {
        let region = PlacementRegion { half_width: 1.0 };
        // radius too large to ever fit the Poisson(15)-sized population
        let result = sample_cells(15.0, 0.9, 3, region);
        assert!(result.is_err());
    }
}
