//! The eroded free spaces F^(r), landmarks, D-closeness, local components
//! K(q, r), and conditional free space F[P].

use crate::clip;
use crate::error::Error;
use crate::geom::{
    linf_dist, square, square_corners, Point, PolygonalEnvironment, PolygonalRegion, Ring, Tolerance,
};

/// The set of placements whose `radius`-square fits inside the workspace,
/// together with its vertex set V^(r).
#[derive(Clone, Debug)]
pub struct FreeSpace {
    pub radius: f64,
    pub region: PolygonalRegion,
    pub vertices: Vec<Point>,
}

impl FreeSpace {
    pub fn from_region(radius: f64, region: PolygonalRegion) -> Self {
        let vertices = region.vertices().collect();
        FreeSpace { radius, region, vertices }
    }

    pub fn is_empty(&self) -> bool {
        self.region.is_empty()
    }
}

/// The landmark set Λ: vertices of F^(1) and F^(2) plus all start and target
/// placements.
#[derive(Clone, Debug)]
pub struct Landmarks {
    points: Vec<Point>,
}

impl Landmarks {
    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Minimum ℓ∞ distance from `p` to any landmark.
    pub fn min_linf(&self, p: Point) -> f64 {
        self.points
            .iter()
            .map(|u| linf_dist(p, *u))
            .fold(f64::INFINITY, f64::min)
    }

    #[cfg(test)]
    pub fn from_points(points: Vec<Point>) -> Self {
        Landmarks { points }
    }
}

/// Erosion of the workspace by the square of radius `r`: each boundary edge
/// contributes its Minkowski sum with the square (a hexagon, or a rectangle
/// for axis-parallel edges), holes contribute their own body as well, and the
/// union of those pieces is subtracted from the workspace.
pub fn erode(workspace: &PolygonalEnvironment, r: f64) -> Result<FreeSpace, Error> {
    erode_with_tol(workspace, r, Tolerance::default())
}

pub fn erode_with_tol(workspace: &PolygonalEnvironment, r: f64, tol: Tolerance) -> Result<FreeSpace, Error> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::input(format!("erosion radius must be > 0, got {r}")));
    }
    let mut pieces: Vec<Ring> = Vec::new();
    for seg in workspace.outer().segments() {
        pieces.push(edge_square_sum(seg.a, seg.b, r));
    }
    for hole in workspace.holes() {
        // The hole body itself is an obstacle.
        let mut body = hole.clone();
        if !body.is_ccw() {
            body.reverse();
        }
        pieces.push(body);
        for seg in hole.segments() {
            pieces.push(edge_square_sum(seg.a, seg.b, r));
        }
    }
    let region = clip::difference_all(&workspace.region(), &pieces, tol);
    Ok(FreeSpace::from_region(r, region))
}

/// Minkowski sum of a segment with the axis-aligned square of radius `r`:
/// the convex hull of the two translated squares.
fn edge_square_sum(a: Point, b: Point, r: f64) -> Ring {
    let mut pts: Vec<Point> = Vec::with_capacity(8);
    pts.extend_from_slice(&square_corners(a, r));
    pts.extend_from_slice(&square_corners(b, r));
    convex_hull(pts)
}

fn convex_hull(mut pts: Vec<Point>) -> Ring {
    pts.sort_by(|p, q| p.x.total_cmp(&q.x).then(p.y.total_cmp(&q.y)));
    pts.dedup_by(|p, q| p.x == q.x && p.y == q.y);
    if pts.len() < 3 {
        // degenerate; pad to a triangle-ish ring so downstream code survives
        while pts.len() < 3 {
            pts.push(*pts.last().unwrap());
        }
        return Ring::new_unchecked(pts);
    }
    let cross = |o: Point, a: Point, b: Point| (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
    let mut hull: Vec<Point> = Vec::with_capacity(pts.len() * 2);
    for &p in &pts {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    let lower_len = hull.len() + 1;
    for &p in pts.iter().rev() {
        while hull.len() >= lower_len && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();
    Ring::new_unchecked(hull)
}

/// Λ = V^(1) ∪ V^(2) ∪ {s_i, t_i}. Start/target placements must lie in F^(1).
/// Duplicates within 10·eta are merged, keeping the earliest occurrence so
/// starts and targets survive with exact coordinates.
pub fn landmarks(
    f1: &FreeSpace,
    f2: &FreeSpace,
    starts: &[Point],
    targets: &[Point],
    tol: Tolerance,
) -> Result<Landmarks, Error> {
    for p in starts.iter().chain(targets.iter()) {
        if !f1.region.contains_point(*p, tol) {
            return Err(Error::OutsideFreeSpace { x: p.x, y: p.y });
        }
    }
    // Endpoints deduplicate among themselves and vertices among themselves;
    // an endpoint that happens to coincide with a free-space vertex is still
    // listed (it plays both roles).
    let merge_tol = 10.0 * tol.eta;
    let mut points: Vec<Point> = Vec::new();
    for p in starts.iter().chain(targets.iter()) {
        if !points.iter().any(|q| linf_dist(*p, *q) <= merge_tol) {
            points.push(*p);
        }
    }
    let endpoint_count = points.len();
    for p in f1.vertices.iter().chain(f2.vertices.iter()) {
        if !points[endpoint_count..]
            .iter()
            .any(|q| linf_dist(*p, *q) <= merge_tol)
        {
            points.push(*p);
        }
    }
    points.sort_by(|p, q| p.x.total_cmp(&q.x).then(p.y.total_cmp(&q.y)));
    Ok(Landmarks { points })
}

/// True iff some landmark lies within ℓ∞ distance `d` of `p`.
pub fn is_close(p: Point, lm: &Landmarks, d: f64) -> bool {
    lm.points.iter().any(|u| linf_dist(p, *u) <= d)
}

/// K(q, r): the connected component of B(q, r) ∩ F that contains `q`.
pub fn local_component(f: &FreeSpace, q: Point, r: f64, tol: Tolerance) -> Result<PolygonalRegion, Error> {
    if !f.region.contains_point(q, tol) {
        return Err(Error::OutsideFreeSpace { x: q.x, y: q.y });
    }
    let ball = square(q, r)?;
    let clipped = clip::intersect(&f.region, &ball, tol);
    // point-location: pick the face containing q
    for face in clipped.faces() {
        let single = PolygonalRegion::new(vec![face.clone()]);
        if single.contains_point(q, tol) {
            return Ok(single);
        }
    }
    // q sits on a clipping artifact; fall back to the face with the nearest
    // boundary
    let mut best: Option<(f64, PolygonalRegion)> = None;
    for face in clipped.faces() {
        let single = PolygonalRegion::new(vec![face.clone()]);
        let d = single.boundary_dist(q);
        if best.as_ref().is_none_or(|(bd, _)| d < *bd) {
            best = Some((d, single));
        }
    }
    best.map(|(_, r)| r)
        .ok_or_else(|| Error::precondition("B(q,r) ∩ F is empty".to_string()))
}

/// F[P]: the free space minus the open squares B(p, 2) around parked robots.
pub fn conditional_freespace(f: &FreeSpace, parked: &[Point], tol: Tolerance) -> PolygonalRegion {
    if parked.is_empty() {
        return f.region.clone();
    }
    let pieces: Vec<Ring> = parked
        .iter()
        .map(|p| Ring::new_unchecked(square_corners(*p, 2.0).to_vec()))
        .collect();
    clip::difference_all(&f.region, &pieces, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::pt;
    use crate::oracle::raster_erode;

    fn room(side: f64) -> PolygonalEnvironment {
        PolygonalEnvironment::new(
            vec![pt(0.0, 0.0), pt(side, 0.0), pt(side, side), pt(0.0, side)],
            vec![],
        )
        .unwrap()
    }

    fn room_with_hole() -> PolygonalEnvironment {
        PolygonalEnvironment::new(
            vec![pt(0.0, 0.0), pt(10.0, 0.0), pt(10.0, 10.0), pt(0.0, 10.0)],
            vec![vec![pt(4.0, 4.0), pt(6.0, 4.0), pt(6.0, 6.0), pt(4.0, 6.0)]],
        )
        .unwrap()
    }

    fn l_shape() -> PolygonalEnvironment {
        PolygonalEnvironment::new(
            vec![
                pt(0.0, 0.0),
                pt(20.0, 0.0),
                pt(20.0, 4.0),
                pt(10.0, 4.0),
                pt(10.0, 10.0),
                pt(0.0, 10.0),
            ],
            vec![],
        )
        .unwrap()
    }

    #[test]
    fn erode_convex_room() {
        let f = erode(&room(10.0), 1.0).unwrap();
        assert_eq!(f.vertices.len(), 4);
        assert!((f.region.area() - 64.0).abs() < 1e-9);
        let (lo, hi) = f.region.bbox().unwrap();
        assert!((lo.x - 1.0).abs() < 1e-9 && (hi.x - 9.0).abs() < 1e-9);
        assert!((lo.y - 1.0).abs() < 1e-9 && (hi.y - 9.0).abs() < 1e-9);
    }

    #[test]
    fn erode_room_with_hole() {
        let tol = Tolerance::default();
        let f = erode(&room_with_hole(), 1.0).unwrap();
        // [1,9]^2 minus the open dilated hole (3,7)^2
        assert_eq!(f.vertices.len(), 8);
        assert!((f.region.area() - (64.0 - 16.0)).abs() < 1e-9);
        assert!(!f.region.contains_point(pt(5.0, 5.0), tol));
        assert!(f.region.contains_point(pt(3.0, 5.0), tol)); // dilated hole boundary is free
        assert!(f.region.contains_point(pt(1.5, 1.5), tol));
    }

    #[test]
    fn erode_matches_raster_oracle_on_l_shape() {
        let tol = Tolerance::default();
        let env = l_shape();
        let f = erode(&env, 1.0).unwrap();
        let mask = raster_erode(&env, 1.0, 0.05).unwrap();
        let mut agree = 0usize;
        let mut total = 0usize;
        for row in 0..mask.rows {
            for col in 0..mask.cols {
                let c = mask.cell_center(col, row);
                total += 1;
                if mask.is_free(col, row) == f.region.contains_point(c, tol) {
                    agree += 1;
                }
            }
        }
        let frac = agree as f64 / total as f64;
        assert!(frac >= 0.999, "agreement {frac}");
    }

    #[test]
    fn erode_monotone_in_radius() {
        let tol = Tolerance::default();
        let env = room_with_hole();
        let f1 = erode(&env, 1.0).unwrap();
        let f2 = erode(&env, 1.5).unwrap();
        let mut seed = 123456789u64;
        let mut next = move || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (seed >> 11) as f64 / (1u64 << 53) as f64 * 10.0
        };
        for _ in 0..1000 {
            let p = pt(next(), next());
            if f2.region.contains_point(p, tol) {
                assert!(f1.region.contains_point(p, tol), "monotonicity violated at {p:?}");
            }
        }
    }

    #[test]
    fn erode_agrees_with_square_fit_predicate() {
        // random point is in erode(W, r) iff its r-square fits in W, up to a
        // tolerance band around the boundary
        let tol = Tolerance::default();
        let env = l_shape();
        let f = erode(&env, 1.0).unwrap();
        let w = env.region();
        let mut seed = 987654321u64;
        let mut next = move || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (seed >> 11) as f64 / (1u64 << 53) as f64
        };
        let mut checked = 0;
        for _ in 0..10_000 {
            let p = pt(next() * 20.0, next() * 10.0);
            let in_f = f.region.contains_point(p, tol);
            let fits = crate::geom::region_contains_rect(
                &w,
                pt(p.x - 1.0, p.y - 1.0),
                pt(p.x + 1.0, p.y + 1.0),
                tol,
            );
            // skip the knife-edge band where both answers are legitimate
            if f.region.boundary_dist(p) < 1e-7 {
                continue;
            }
            checked += 1;
            assert_eq!(in_f, fits, "disagreement at {p:?}");
        }
        assert!(checked > 9000);
    }

    #[test]
    fn landmark_enumeration() {
        let tol = Tolerance::default();
        let env = room(10.0);
        let f1 = erode(&env, 1.0).unwrap();
        let f2 = erode(&env, 2.0).unwrap();
        let lm = landmarks(&f1, &f2, &[pt(2.0, 2.0)], &[pt(8.0, 8.0)], tol).unwrap();
        // 4 corners of [1,9]^2, 4 corners of [2,8]^2, start, target
        assert_eq!(lm.len(), 10);
        // start coinciding with a vertex of F^(1) deduplicates
        let lm = landmarks(&f1, &f2, &[pt(1.0, 1.0)], &[pt(1.0, 1.0)], tol).unwrap();
        assert_eq!(lm.len(), 9);
        // rejects placements outside F^(1)
        assert!(landmarks(&f1, &f2, &[pt(0.5, 0.5)], &[pt(8.0, 8.0)], tol).is_err());
    }

    #[test]
    fn landmarks_with_hole_count() {
        let tol = Tolerance::default();
        let env = room_with_hole();
        let f1 = erode(&env, 1.0).unwrap();
        let f2 = erode(&env, 2.0).unwrap();
        // F^(2) for this workspace is empty ([2,8]^2 minus dilated hole (2,8)^2)
        assert!(f2.is_empty());
        let lm = landmarks(&f1, &f2, &[pt(1.5, 1.5)], &[pt(8.5, 8.5)], tol).unwrap();
        assert_eq!(lm.len(), f1.vertices.len() + 2);
        for p in [pt(1.5, 1.5), pt(8.5, 8.5)] {
            assert!(lm.points().contains(&p));
        }
    }

    #[test]
    fn is_close_cases() {
        let lm = Landmarks::from_points(vec![pt(0.0, 0.0)]);
        assert!(is_close(pt(3.0, 4.0), &lm, 4.0));
        assert!(!is_close(pt(3.0, 4.0), &lm, 3.9));
        assert!(is_close(pt(0.0, 0.0), &lm, 0.0));
    }

    #[test]
    fn local_component_interior() {
        let tol = Tolerance::default();
        let env = room(102.0);
        let f = erode(&env, 1.0).unwrap(); // [1,101]^2
        let k = local_component(&f, pt(51.0, 51.0), 10.0, tol).unwrap();
        assert!((k.area() - 400.0).abs() < 1e-6);
        let (lo, hi) = k.bbox().unwrap();
        assert!((lo.x - 41.0).abs() < 1e-9 && (hi.x - 61.0).abs() < 1e-9);
    }

    #[test]
    fn local_component_selects_connected_part() {
        let tol = Tolerance::default();
        // two rooms joined by a corridor that erosion pinches shut
        let env = PolygonalEnvironment::new(
            vec![
                pt(0.0, 0.0),
                pt(10.0, 0.0),
                pt(10.0, 4.4),
                pt(14.0, 4.4),
                pt(14.0, 0.0),
                pt(24.0, 0.0),
                pt(24.0, 10.0),
                pt(14.0, 10.0),
                pt(14.0, 5.6),
                pt(10.0, 5.6),
                pt(10.0, 10.0),
                pt(0.0, 10.0),
            ],
            vec![],
        )
        .unwrap();
        let f = erode(&env, 1.0).unwrap();
        // the 1.2-wide corridor vanishes at radius 1: two components remain
        assert_eq!(f.region.faces().len(), 2);
        let q = pt(5.0, 5.0);
        let k = local_component(&f, q, 40.0, tol).unwrap();
        assert!(k.contains_point(q, tol));
        assert!(!k.contains_point(pt(19.0, 5.0), tol), "other room must be excluded");
    }

    #[test]
    fn local_component_subset_invariants() {
        let tol = Tolerance::default();
        let env = l_shape();
        let f = erode(&env, 1.0).unwrap();
        let q = pt(5.0, 5.0);
        let r = 3.0;
        let k = local_component(&f, q, r, tol).unwrap();
        assert!(k.contains_point(q, tol));
        let mut seed = 555u64;
        let mut next = move || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (seed >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..500 {
            let p = pt(q.x - r + 2.0 * r * next(), q.y - r + 2.0 * r * next());
            if k.contains_point(p, tol) {
                assert!(linf_dist(p, q) <= r + 1e-7);
                assert!(f.region.contains_point(p, tol));
            }
        }
    }

    #[test]
    fn local_component_on_boundary_point() {
        let tol = Tolerance::default();
        let env = l_shape();
        let f = erode(&env, 1.0).unwrap();
        // q on the free-space boundary (closed set: still a member)
        let q = pt(5.0, 1.0);
        assert!(f.region.contains_point(q, tol));
        let k = local_component(&f, q, 1.0, tol).unwrap();
        assert!(k.contains_point(q, tol));
        // clipped to B(q, 1) and truncated by the wall below
        let (lo, hi) = k.bbox().unwrap();
        assert!(lo.y >= 1.0 - 1e-9 && hi.y <= 2.0 + 1e-9);
        assert!(lo.x >= 4.0 - 1e-9 && hi.x <= 6.0 + 1e-9);
    }

    #[test]
    fn conditional_freespace_cases() {
        let tol = Tolerance::default();
        let env = room(10.0);
        let f = erode(&env, 1.0).unwrap();
        let r = conditional_freespace(&f, &[pt(5.0, 5.0)], tol);
        assert!(!r.contains_point(pt(5.0, 5.0), tol));
        assert!(r.contains_point(pt(3.0, 5.0), tol)); // boundary of the removed square
        assert!(r.contains_point(pt(1.5, 1.5), tol));
        let id = conditional_freespace(&f, &[], tol);
        assert_eq!(id.area(), f.region.area());
        // two parked robots vs. raster check
        let r2 = conditional_freespace(&f, &[pt(3.0, 3.0), pt(7.0, 7.0)], tol);
        let mut seed = 31337u64;
        let mut next = move || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (seed >> 11) as f64 / (1u64 << 53) as f64 * 10.0
        };
        for _ in 0..2000 {
            let p = pt(next(), next());
            let in_f = f.region.contains_point(p, tol);
            let blocked = linf_dist(p, pt(3.0, 3.0)) < 2.0 - 1e-7 || linf_dist(p, pt(7.0, 7.0)) < 2.0 - 1e-7;
            let expected = in_f && !blocked;
            let on_edge = (linf_dist(p, pt(3.0, 3.0)) - 2.0).abs() < 1e-6
                || (linf_dist(p, pt(7.0, 7.0)) - 2.0).abs() < 1e-6;
            if !on_edge {
                assert_eq!(r2.contains_point(p, tol), expected, "at {p:?}");
            }
        }
    }
}
