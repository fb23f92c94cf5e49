use super::*;
use crate::cellmodel::{polygonize, CellSpec};
use approx::{assert_abs_diff_eq, assert_relative_eq};
use rand::Rng;
use rand::SeedableRng;

fn omega_w() -> SubdomainSpec {
    SubdomainSpec::AxisAlignedSquare { half_width: 5.0 }
}

fn octagon(radius: f64) -> crate::cellmodel::PolygonApprox {
    polygonize(CellSpec { center: Point2::new(0.0, 0.0), radius }, 8, false, 0.0)
}

#[test]
fn coarsest_square_mesh() {
    let mesh =
        generate_square_mesh(10.0, 20.0, &SubdomainSpec::AxisAlignedSquare { half_width: 5.0 });
    // half-width 5 does not align with h = 20; drop the subdomain instead.
    assert!(mesh.is_err());
    let mesh = generate_square_mesh(
        10.0,
        20.0,
        &SubdomainSpec::Polygon(vec![]),
    )
    .unwrap();
    assert_eq!(mesh.n_nodes(), 4);
    assert_eq!(mesh.n_elements(), 2);
    assert_relative_eq!(mesh.total_area(), 400.0, max_relative = 1e-14);
}

#[test]
fn unit_grid_counts_match_structured_formulas() {
    let mesh = generate_square_mesh(10.0, 1.0, &omega_w()).unwrap();
    // (n+1)² nodes and 2n² elements for n = 20
    assert_eq!(mesh.n_nodes(), 441);
    assert_eq!(mesh.n_elements(), 800);
    assert_relative_eq!(mesh.total_area(), 400.0, max_relative = 1e-12);
    mesh.validate().unwrap();
}

#[test]
fn misaligned_h_is_rejected() {
    // 3 does not divide the domain extent 20
    assert!(matches!(
        generate_square_mesh(10.0, 3.0, &omega_w()),
        Err(Error::MeshAlignment(_))
    ));
    // h = 4 divides 20 but not the subdomain half-width 5
    assert!(matches!(
        generate_square_mesh(10.0, 4.0, &omega_w()),
        Err(Error::MeshAlignment(_))
    ));
}

#[test]
fn square_mesh_euler_characteristic_is_one() {
    let mesh = generate_square_mesh(10.0, 2.5, &omega_w()).unwrap();
    assert_eq!(mesh.euler_characteristic(), 1);
}

#[test]
fn hole_mesh_area_excludes_regular_octagon() {
    let poly = octagon(3.0);
    let mesh = generate_hole_mesh(10.0, &poly, 0.5, &omega_w()).unwrap();
    mesh.validate().unwrap();
    let octagon_area = 4.0 * 9.0 * (std::f64::consts::PI / 4.0).sin();
    assert_relative_eq!(mesh.total_area(), 400.0 - octagon_area, max_relative = 1e-10);
    assert_eq!(mesh.euler_characteristic(), 0);
}

#[test]
fn hole_edges_lie_on_the_polygon() {
    let poly = octagon(3.0);
    let mesh = generate_hole_mesh(10.0, &poly, 0.5, &omega_w()).unwrap();
    for be in mesh.boundary_edges.iter().filter(|be| be.tag == BoundaryTag::Hole) {
        for node in [be.a, be.b] {
            let d = geo::dist_to_polygon(mesh.nodes[node], &poly.vertices);
            assert!(d <= 1e-9, "hole node {node} off the polygon by {d:.3e}");
        }
    }
}

#[test]
fn refining_a_hole_mesh_preserves_the_loop_and_quadruples_elements() {
    let poly = octagon(3.0);
    let coarse = generate_hole_mesh(10.0, &poly, 1.0, &omega_w()).unwrap();
    let fine = refine(&coarse);
    fine.validate().unwrap();
    assert_eq!(fine.n_elements(), 4 * coarse.n_elements());
    assert_relative_eq!(fine.total_area(), coarse.total_area(), max_relative = 1e-12);

    // Refined loop = original loop nodes plus the edge midpoints.
    let coarse_loop = coarse.hole_boundary_loop().unwrap();
    let fine_loop = fine.hole_boundary_loop().unwrap();
    assert_eq!(fine_loop.len(), 2 * coarse_loop.len());
    let mut expected: Vec<Point2> = Vec::new();
    for i in 0..coarse_loop.len() {
        let a = coarse.nodes[coarse_loop[i]];
        let b = coarse.nodes[coarse_loop[(i + 1) % coarse_loop.len()]];
        expected.push(a);
        expected.push(Point2::new(0.5 * (a.x + b.x), 0.5 * (a.y + b.y)));
    }
    for p in &expected {
        assert!(
            fine_loop.iter().any(|&i| fine.nodes[i].dist(*p) <= 1e-12),
            "expected loop point ({}, {}) missing after refinement",
            p.x,
            p.y
        );
    }
}

#[test]
fn conforming_mesh_interior_matches_polygon_area() {
    let poly = octagon(3.0);
    let mesh = generate_cell_conforming_mesh(10.0, &poly, 0.5, &omega_w()).unwrap();
    mesh.validate().unwrap();
    let interior: f64 = (0..mesh.n_elements())
        .filter(|&e| mesh.element_region[e] == Region::CellInterior)
        .map(|e| mesh.element_area(e))
        .sum();
    let octagon_area = 4.0 * 9.0 * (std::f64::consts::PI / 4.0).sin();
    assert_relative_eq!(interior, octagon_area, max_relative = 1e-10);
    assert_relative_eq!(mesh.total_area(), 400.0, max_relative = 1e-10);
}

#[test]
fn conforming_mesh_extends_the_hole_mesh_in_place() {
    let poly = octagon(3.0);
    let hole = generate_hole_mesh(10.0, &poly, 0.5, &omega_w()).unwrap();
    let cell = generate_cell_conforming_mesh(10.0, &poly, 0.5, &omega_w()).unwrap();
    // Exterior elements keep identity indices and areas.
    let exterior: Vec<usize> = (0..cell.n_elements())
        .filter(|&e| cell.element_region[e] == Region::Exterior)
        .collect();
    assert_eq!(exterior.len(), hole.n_elements());
    for (e_cell, e_hole) in exterior.iter().zip(0..hole.n_elements()) {
        assert_eq!(cell.elements[*e_cell], hole.elements[e_hole]);
        assert_relative_eq!(
            cell.element_area(*e_cell),
            hole.element_area(e_hole),
            max_relative = 1e-15
        );
    }
    for i in 0..hole.n_nodes() {
        assert_eq!(cell.nodes[i], hole.nodes[i]);
    }
    // The partition covers every element exactly once.
    let interior = cell
        .element_region
        .iter()
        .filter(|&&r| r == Region::CellInterior)
        .count();
    assert_eq!(interior + exterior.len(), cell.n_elements());
    // Restriction recovers the hole mesh.
    let restricted = cell.exterior_restriction().unwrap();
    assert_eq!(restricted.n_nodes(), hole.n_nodes());
    assert_eq!(restricted.elements, hole.elements);
}

#[test]
fn refine_splits_two_elements_into_eight_and_keeps_quality() {
    let mesh = generate_square_mesh(10.0, 20.0, &SubdomainSpec::Polygon(vec![])).unwrap();
    let fine = refine(&mesh);
    assert_eq!(fine.n_elements(), 8);
    assert_relative_eq!(fine.total_area(), 400.0, max_relative = 1e-12);
    let fine2 = refine(&fine);
    assert_eq!(fine2.n_elements(), 16 * mesh.n_elements());

    // Children are similar to their parent: identical minimum angle.
    let poly = octagon(3.0);
    let holey = generate_hole_mesh(10.0, &poly, 1.0, &omega_w()).unwrap();
    let refined = refine(&holey);
    for e in 0..holey.n_elements() {
        let [a, b, c] = holey.elements[e].map(|i| holey.nodes[i]);
        let parent = geo::min_angle(a, b, c);
        for child in 0..4 {
            let t = refined.elements[4 * e + child];
            let [a, b, c] = t.map(|i| refined.nodes[i]);
            assert_relative_eq!(geo::min_angle(a, b, c), parent, max_relative = 1e-9);
        }
    }
}

#[test]
fn locate_vertex_centroid_and_hole() {
    let poly = octagon(3.0);
    let mesh = generate_hole_mesh(10.0, &poly, 0.5, &omega_w()).unwrap();

    let node = 137 % mesh.n_nodes();
    let (e, w) = mesh.locate(mesh.nodes[node]).unwrap();
    let k = mesh.elements[e].iter().position(|&i| i == node).unwrap();
    assert_relative_eq!(w[k], 1.0, max_relative = 1e-12);

    let e = mesh.n_elements() / 2;
    let centroid = mesh.element_centroid(e);
    let (found, w) = mesh.locate(centroid).unwrap();
    // The centroid may sit on a shared edge only in degenerate cases; it is
    // interior here, so the element matches and weights are 1/3.
    assert_eq!(found, e);
    for wi in w {
        assert_abs_diff_eq!(wi, 1.0 / 3.0, epsilon = 1e-12);
    }

    assert!(matches!(
        mesh.locate(Point2::new(0.0, 0.0)),
        Err(Error::PointNotFound { .. })
    ));
    assert!(matches!(
        mesh.locate(Point2::new(50.0, 0.0)),
        Err(Error::PointNotFound { .. })
    ));
}

#[test]
fn locate_inverts_barycentric_interpolation() {
    let poly = octagon(3.0);
    let mesh = generate_hole_mesh(10.0, &poly, 1.0, &omega_w()).unwrap();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
    let mut checked = 0;
    while checked < 1000 {
        let p = Point2::new(rng.random_range(-10.0..10.0), rng.random_range(-10.0..10.0));
        if geo::dist_to_polygon(p, &poly.vertices) < 1e-6 {
            continue;
        }
        match mesh.locate(p) {
            Ok((e, w)) => {
                assert_abs_diff_eq!(w.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
                assert!(w.iter().all(|&wi| (0.0..=1.0).contains(&wi)));
                let q = mesh.point_at(e, w);
                assert!(p.dist(q) <= 1e-10 * mesh.h, "round trip off by {}", p.dist(q));
                checked += 1;
            }
            Err(_) => {
                // Outside the domain or inside the hole.
                let inside_hole = geo::point_in_polygon(p, &poly.vertices);
                let outside = p.x.abs() > 10.0 - 1e-9 || p.y.abs() > 10.0 - 1e-9;
                assert!(inside_hole || outside, "({}, {}) not located", p.x, p.y);
            }
        }
    }
}

#[test]
fn every_generated_mesh_matches_its_analytic_area() {
    let octagon_area = 4.0 * 9.0 * (std::f64::consts::PI / 4.0).sin();
    let square = generate_square_mesh(10.0, 0.5, &omega_w()).unwrap();
    assert_relative_eq!(square.total_area(), 400.0, max_relative = 1e-10);
    let poly = octagon(3.0);
    let hole = generate_hole_mesh(10.0, &poly, 0.5, &omega_w()).unwrap();
    assert_relative_eq!(hole.total_area(), 400.0 - octagon_area, max_relative = 1e-10);
    let cell = generate_cell_conforming_mesh(10.0, &poly, 0.5, &omega_w()).unwrap();
    assert_relative_eq!(cell.total_area(), 400.0, max_relative = 1e-10);
}

#[test]
fn small_polygon_inside_one_element_still_meshes() {
    // Cell much smaller than the grid spacing: the cavity is a handful of
    // elements and the polygon hangs inside it.
    let tiny = polygonize(
        CellSpec { center: Point2::new(1.3, -0.9), radius: 0.12 },
        4,
        true,
        0.3,
    );
    let mesh = generate_hole_mesh(10.0, &tiny, 0.5, &omega_w()).unwrap();
    mesh.validate().unwrap();
    let poly_area = crate::mesh::polygon_area(&tiny.vertices);
    assert_relative_eq!(mesh.total_area(), 400.0 - poly_area, max_relative = 1e-10);
}

#[test]
fn degenerate_polygon_edge_is_rejected() {
    let mut poly = octagon(3.0);
    // Collapse one edge to a sliver far below the threshold.
    poly.vertices[1] = poly.vertices[0];
    poly.vertices[1].x += 1e-7;
    assert!(matches!(
        generate_hole_mesh(10.0, &poly, 0.5, &omega_w()),
        Err(Error::DegenerateGeometry(_))
    ));
}

#[test]
fn polygon_outside_subdomain_is_rejected() {
    let poly = octagon(6.0);
    assert!(generate_hole_mesh(10.0, &poly, 0.5, &omega_w()).is_err());
}

#[test]
fn dump_load_round_trip_is_exact() {
    let poly = octagon(3.0);
    for mesh in [
        generate_square_mesh(10.0, 2.5, &omega_w()).unwrap(),
        generate_hole_mesh(10.0, &poly, 1.0, &omega_w()).unwrap(),
        generate_cell_conforming_mesh(10.0, &poly, 1.0, &omega_w()).unwrap(),
    ] {
        let text = mesh.dump();
        let loaded = Mesh::load(&text).unwrap();
        assert_eq!(loaded.n_nodes(), mesh.n_nodes());
        assert_eq!(loaded.elements, mesh.elements);
        for (a, b) in loaded.nodes.iter().zip(&mesh.nodes) {
            assert_eq!(a.x, b.x);
            assert_eq!(a.y, b.y);
        }
        assert_eq!(loaded.dump(), text);
        // The conforming mesh recovers its interface loop from regions.
        assert_eq!(loaded.hole_loop.len(), mesh.hole_loop.len());
    }
}

#[test]
fn loaded_mesh_failures_are_reported() {
    assert!(Mesh::load("").is_err());
    assert!(Mesh::load("MESH2 1 0").is_err());
    // Node index out of range.
    let bad = "MESH2 3 1 0\n0 0\n1 0\n0 1\n0 1 5 EXTERIOR\n";
    assert!(Mesh::load(bad).is_err());
    // Inverted element (clockwise order).
    let cw = "MESH2 3 1 3\n0 0\n1 0\n0 1\n0 2 1 EXTERIOR\n0 2 OUTER\n2 1 OUTER\n1 0 OUTER\n";
    assert!(Mesh::load(cw).is_err());
}

#[test]
fn mirror_symmetric_grid() {
    // The checkerboard diagonal pattern makes the square mesh symmetric
    // under x → −x: every element maps onto another element.
    let mesh = generate_square_mesh(10.0, 2.5, &omega_w()).unwrap();
    let mirrored: std::collections::BTreeSet<[(i64, i64); 3]> = mesh
        .elements
        .iter()
        .map(|tri| {
            let mut pts = tri.map(|i| {
                let p = mesh.nodes[i];
                ((-p.x * 1e6).round() as i64, (p.y * 1e6).round() as i64)
            });
            pts.sort();
            pts
        })
        .collect();
    for tri in &mesh.elements {
        let mut pts = tri.map(|i| {
            let p = mesh.nodes[i];
            ((p.x * 1e6).round() as i64, (p.y * 1e6).round() as i64)
        });
        pts.sort();
        assert!(mirrored.contains(&pts), "element {pts:?} has no mirror image");
    }
}
