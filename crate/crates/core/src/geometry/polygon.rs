//! Brute-force polygon predicates on sampled curves.

use crate::{Complex, Real};

fn cross(a: Complex, b: Complex) -> Real {
    a.re * b.im - a.im * b.re
}

fn orient(a: Complex, b: Complex, c: Complex) -> Real {
    cross(b - a, c - a)
}

fn on_segment(a: Complex, b: Complex, p: Complex) -> bool {
    p.re >= a.re.min(b.re) && p.re <= a.re.max(b.re) && p.im >= a.im.min(b.im) && p.im <= a.im.max(b.im)
}

/// Closed-segment intersection test (touching counts as intersecting).
pub fn segments_intersect(p1: Complex, p2: Complex, q1: Complex, q2: Complex) -> bool {
    if p1.re.max(p2.re) < q1.re.min(q2.re)
        || q1.re.max(q2.re) < p1.re.min(p2.re)
        || p1.im.max(p2.im) < q1.im.min(q2.im)
        || q1.im.max(q2.im) < p1.im.min(p2.im)
    {
        return false;
    }
    let d1 = orient(q1, q2, p1);
    let d2 = orient(q1, q2, p2);
    let d3 = orient(p1, p2, q1);
    let d4 = orient(p1, p2, q2);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    (d1 == 0.0 && on_segment(q1, q2, p1))
        || (d2 == 0.0 && on_segment(q1, q2, p2))
        || (d3 == 0.0 && on_segment(p1, p2, q1))
        || (d4 == 0.0 && on_segment(p1, p2, q2))
}

/// Distance from `p` to the segment `[a, b]`.
pub fn point_segment_distance(p: Complex, a: Complex, b: Complex) -> Real {
    let d = b - a;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let s = (((p - a) * d.conj()).re / len2).clamp(0.0, 1.0);
    (p - (a + d * s)).norm()
}

/// First pair of non-adjacent intersecting edges of a closed polygon.
pub fn first_self_intersection(v: &[Complex]) -> Option<(usize, usize)> {
    let n = v.len();
    if n < 4 {
        return None;
    }
    for i in 0..n {
        let (a, b) = (v[i], v[(i + 1) % n]);
        for j in (i + 2)..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            if segments_intersect(a, b, v[j], v[(j + 1) % n]) {
                return Some((i, j));
            }
        }
    }
    None
}

/// Whether two closed polygons share any point on their edges.
pub fn polygons_intersect(u: &[Complex], v: &[Complex]) -> bool {
    let (n, m) = (u.len(), v.len());
    (0..n).any(|i| {
        let (a, b) = (u[i], u[(i + 1) % n]);
        (0..m).any(|j| segments_intersect(a, b, v[j], v[(j + 1) % m]))
    })
}

/// Winding number of a closed polygon about `p`, by summed turning angles.
pub fn polygon_winding(v: &[Complex], p: Complex) -> i64 {
    let n = v.len();
    let mut total = 0.0;
    for i in 0..n {
        let a = v[i] - p;
        let b = v[(i + 1) % n] - p;
        total += (b / a).arg();
    }
    (total / (2.0 * std::f64::consts::PI)).round() as i64
}

/// Winding number of a sampled closed path of values about zero.
pub fn winding_about_zero(v: &[Complex]) -> i64 {
    polygon_winding(v, Complex::new(0.0, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;

    #[test]
    fn crossing_and_disjoint_segments() {
        assert!(segments_intersect(c64(0., 0.), c64(1., 1.), c64(0., 1.), c64(1., 0.)));
        assert!(!segments_intersect(c64(0., 0.), c64(1., 0.), c64(0., 1.), c64(1., 1.)));
        assert!(segments_intersect(c64(0., 0.), c64(1., 0.), c64(1., 0.), c64(2., 3.)));
    }

    #[test]
    fn square_winding() {
        let sq = [c64(0., 0.), c64(1., 0.), c64(1., 1.), c64(0., 1.)];
        assert_eq!(polygon_winding(&sq, c64(0.5, 0.5)), 1);
        assert_eq!(polygon_winding(&sq, c64(1.5, 0.5)), 0);
        let rev: Vec<_> = sq.iter().rev().copied().collect();
        assert_eq!(polygon_winding(&rev, c64(0.5, 0.5)), -1);
        assert!(first_self_intersection(&sq).is_none());
        let bow = [c64(0., 0.), c64(1., 1.), c64(1., 0.), c64(0., 1.)];
        assert!(first_self_intersection(&bow).is_some());
    }
}
