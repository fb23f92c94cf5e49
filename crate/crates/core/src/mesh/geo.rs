//! Small planar geometry predicates shared by the mesh generators.

use super::Point2;

/// z-component of the cross product of two plane vectors.
pub(crate) fn cross(u: Point2, v: Point2) -> f64 {
    u.x * v.y - u.y * v.x
}

/// Twice the signed area of triangle (a, b, c).
pub(crate) fn orient(a: Point2, b: Point2, c: Point2) -> f64 {
    cross(b - a, c - a)
}

/// Signed polygon area (positive for counterclockwise vertex order).
pub(crate) fn polygon_signed_area(poly: &[Point2]) -> f64 {
    let n = poly.len();
    let mut s = 0.0;
    for i in 0..n {
        let j = (i + 1) % n;
        s += poly[i].x * poly[j].y - poly[j].x * poly[i].y;
    }
    0.5 * s
}

/// Even-odd crossing test; points on the boundary may land either way,
/// callers that care use `dist_to_polygon` as well.
pub(crate) fn point_in_polygon(p: Point2, poly: &[Point2]) -> bool {
    let n = poly.len();
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (pi, pj) = (poly[i], poly[j]);
        if (pi.y > p.y) != (pj.y > p.y) {
            let x_cross = pi.x + (p.y - pi.y) / (pj.y - pi.y) * (pj.x - pi.x);
            if p.x < x_cross {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

/// Distance from `p` to segment (a, b).
pub(crate) fn dist_point_segment(p: Point2, a: Point2, b: Point2) -> f64 {
    let ab = b - a;
    let len2 = ab.x * ab.x + ab.y * ab.y;
    if len2 == 0.0 {
        return p.dist(a);
    }
    let t = (((p.x - a.x) * ab.x + (p.y - a.y) * ab.y) / len2).clamp(0.0, 1.0);
    p.dist(a + ab * t)
}

/// Distance from `p` to the closed polyline of `poly`.
pub(crate) fn dist_to_polygon(p: Point2, poly: &[Point2]) -> f64 {
    let n = poly.len();
    let mut d = f64::INFINITY;
    for i in 0..n {
        d = d.min(dist_point_segment(p, poly[i], poly[(i + 1) % n]));
    }
    d
}

/// Proper intersection of open segments (a, b) and (c, d): the segments
/// cross at a single interior point of both.
pub(crate) fn segments_properly_intersect(a: Point2, b: Point2, c: Point2, d: Point2) -> bool {
    let d1 = orient(c, d, a);
    let d2 = orient(c, d, b);
    let d3 = orient(a, b, c);
    let d4 = orient(a, b, d);
    ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
}

/// Whether `p` lies in the closed triangle (a, b, c) given a tolerance on
/// the barycentric sign test (scaled by the triangle area).
pub(crate) fn point_in_triangle(p: Point2, a: Point2, b: Point2, c: Point2, tol: f64) -> bool {
    let area2 = orient(a, b, c).abs();
    let eps = tol * area2.max(f64::MIN_POSITIVE);
    let w0 = orient(a, b, p);
    let w1 = orient(b, c, p);
    let w2 = orient(c, a, p);
    (w0 >= -eps && w1 >= -eps && w2 >= -eps) || (w0 <= eps && w1 <= eps && w2 <= eps)
}

/// Smallest interior angle of triangle (a, b, c), in radians.
pub(crate) fn min_angle(a: Point2, b: Point2, c: Point2) -> f64 {
    let la = b.dist(c);
    let lb = c.dist(a);
    let lc = a.dist(b);
    let angle = |opp: f64, s1: f64, s2: f64| {
        let cos = ((s1 * s1 + s2 * s2 - opp * opp) / (2.0 * s1 * s2)).clamp(-1.0, 1.0);
        cos.acos()
    };
    angle(la, lb, lc).min(angle(lb, lc, la)).min(angle(lc, la, lb))
}
