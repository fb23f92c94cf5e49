// temporary debug: inspect annulus sliver
#[test]
fn debug_octagon_mesh() {
    use celltract_core::cellmodel::{polygonize, CellSpec};
    use celltract_core::mesh::*;
    let poly = polygonize(CellSpec { center: Point2::new(0.0, 0.0), radius: 3.0 }, 8, false, 0.0);
    let sub = SubdomainSpec::AxisAlignedSquare { half_width: 5.0 };
    match generate_hole_mesh(10.0, &poly, 0.5, &sub) {
        Ok(m) => println!("OK: {} elements", m.n_elements()),
        Err(e) => println!("ERR: {e}"),
    }
}
