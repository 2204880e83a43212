//! Planar primitives: points, segments, axis-aligned squares, polygonal
//! regions with holes, and the containment predicates the planner relies on.
//!
//! All regions are interpreted as closed point sets; containment predicates
//! resolve ties within a tolerance band toward "contained".

use crate::error::Error;

/// Default numeric tolerance in workspace units.
pub const DEFAULT_ETA: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerance {
    pub eta: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { eta: DEFAULT_ETA }
    }
}

impl Tolerance {
    pub fn new(eta: f64) -> Result<Self, Error> {
        if !(eta >= 0.0) || !eta.is_finite() {
            return Err(Error::input(format!("tolerance must be finite and >= 0, got {eta}")));
        }
        Ok(Tolerance { eta })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

pub fn pt(x: f64, y: f64) -> Point {
    Point { x, y }
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn l2(&self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn lerp(&self, other: Point, t: f64) -> Point {
        Point {
            x: self.x + t * (other.x - self.x),
            y: self.y + t * (other.y - self.y),
        }
    }

    pub fn sub(&self, other: Point) -> Point {
        Point {
            x: self.x - other.x,
            y: self.y - other.y,
        }
    }

    pub fn add(&self, other: Point) -> Point {
        Point {
            x: self.x + other.x,
            y: self.y + other.y,
        }
    }
}

/// ℓ∞ distance between two placements. This is the collision metric for
/// axis-aligned square robots: two unit-radius squares overlap iff their
/// centers are closer than 2.
pub fn linf_dist(p: Point, q: Point) -> f64 {
    (p.x - q.x).abs().max((p.y - q.y).abs())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Segment {
    pub a: Point,
    pub b: Point,
}

impl Segment {
    pub fn new(a: Point, b: Point) -> Self {
        Segment { a, b }
    }

    pub fn length(&self) -> f64 {
        self.a.l2(self.b)
    }

    pub fn at(&self, t: f64) -> Point {
        self.a.lerp(self.b, t)
    }

    pub fn is_degenerate(&self, tol: Tolerance) -> bool {
        linf_dist(self.a, self.b) <= tol.eta
    }
}

/// Euclidean distance from a point to a segment.
pub fn point_segment_dist(p: Point, s: &Segment) -> f64 {
    let dx = s.b.x - s.a.x;
    let dy = s.b.y - s.a.y;
    let len2 = dx * dx + dy * dy;
    if len2 == 0.0 {
        return p.l2(s.a);
    }
    let t = (((p.x - s.a.x) * dx + (p.y - s.a.y) * dy) / len2).clamp(0.0, 1.0);
    p.l2(s.at(t))
}

/// ℓ∞ distance from a point to a segment (exact; the minimum of a piecewise
/// linear function attained at an endpoint or where the two coordinate gaps
/// balance).
pub fn point_segment_linf_dist(p: Point, s: &Segment) -> f64 {
    let f = |t: f64| linf_dist(p, s.at(t));
    let mut best = f(0.0).min(f(1.0));
    // Candidate interior parameters: where |dx(t)| = |dy(t)| or a gap is 0.
    let ax = s.a.x - p.x;
    let bx = s.b.x - s.a.x;
    let ay = s.a.y - p.y;
    let by = s.b.y - s.a.y;
    let mut push = |t: f64| {
        if t > 0.0 && t < 1.0 {
            best = best.min(f(t));
        }
    };
    if bx != 0.0 {
        push(-ax / bx);
    }
    if by != 0.0 {
        push(-ay / by);
    }
    // |ax + t bx| = |ay + t by| → ax + t bx = ±(ay + t by)
    let d1 = bx - by;
    if d1 != 0.0 {
        push((ay - ax) / d1);
    }
    let d2 = bx + by;
    if d2 != 0.0 {
        push(-(ax + ay) / d2);
    }
    best
}

/// A closed polygonal ring, stored without a repeated closing vertex.
#[derive(Clone, Debug, PartialEq)]
pub struct Ring {
    points: Vec<Point>,
}

impl Ring {
    pub fn new(points: Vec<Point>) -> Result<Self, Error> {
        if points.len() < 3 {
            return Err(Error::input(format!(
                "ring needs at least 3 vertices, got {}",
                points.len()
            )));
        }
        if points.iter().any(|p| !p.is_finite()) {
            return Err(Error::input("ring has non-finite coordinates".to_string()));
        }
        Ok(Ring { points })
    }

    /// Builds a ring allowing degenerate (zero-area) input, e.g. a point square.
    pub fn new_unchecked(points: Vec<Point>) -> Self {
        Ring { points }
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn segments(&self) -> impl Iterator<Item = Segment> + '_ {
        let n = self.points.len();
        (0..n).map(move |i| Segment::new(self.points[i], self.points[(i + 1) % n]))
    }

    /// Twice the signed area (positive for counterclockwise).
    pub fn signed_area2(&self) -> f64 {
        let n = self.points.len();
        let mut s = 0.0;
        for i in 0..n {
            let p = self.points[i];
            let q = self.points[(i + 1) % n];
            s += p.x * q.y - q.x * p.y;
        }
        s
    }

    pub fn is_ccw(&self) -> bool {
        self.signed_area2() > 0.0
    }

    pub fn reverse(&mut self) {
        self.points.reverse();
    }

    pub fn bbox(&self) -> (Point, Point) {
        let mut lo = pt(f64::INFINITY, f64::INFINITY);
        let mut hi = pt(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in &self.points {
            lo.x = lo.x.min(p.x);
            lo.y = lo.y.min(p.y);
            hi.x = hi.x.max(p.x);
            hi.y = hi.y.max(p.y);
        }
        (lo, hi)
    }

    /// Drops consecutive duplicate vertices and collinear middle vertices.
    pub fn simplified(&self, tol: Tolerance) -> Ring {
        let mut pts: Vec<Point> = Vec::with_capacity(self.points.len());
        for &p in &self.points {
            if let Some(&last) = pts.last() {
                if linf_dist(last, p) <= tol.eta {
                    continue;
                }
            }
            pts.push(p);
        }
        while pts.len() >= 2 && linf_dist(pts[0], *pts.last().unwrap()) <= tol.eta {
            pts.pop();
        }
        let mut out: Vec<Point> = Vec::with_capacity(pts.len());
        let n = pts.len();
        for i in 0..n {
            let prev = pts[(i + n - 1) % n];
            let cur = pts[i];
            let next = pts[(i + 1) % n];
            let cross = (cur.x - prev.x) * (next.y - prev.y) - (cur.y - prev.y) * (next.x - prev.x);
            let span = linf_dist(prev, next).max(1.0);
            if cross.abs() > tol.eta * span {
                out.push(cur);
            } else {
                // Keep collinear vertices that are not between their neighbors
                // (a degenerate spike).
                let dot = (cur.x - prev.x) * (next.x - prev.x) + (cur.y - prev.y) * (next.y - prev.y);
                let len2 = (next.x - prev.x).powi(2) + (next.y - prev.y).powi(2);
                if dot < -tol.eta || dot > len2 + tol.eta {
                    out.push(cur);
                }
            }
        }
        if out.len() < 3 {
            Ring { points: pts }
        } else {
            Ring { points: out }
        }
    }
}

/// One face: an outer ring (CCW) with zero or more hole rings (CW).
#[derive(Clone, Debug, PartialEq)]
pub struct Face {
    pub outer: Ring,
    pub holes: Vec<Ring>,
}

/// A closed polygonal region: a union of pairwise interior-disjoint faces.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct PolygonalRegion {
    faces: Vec<Face>,
}

impl PolygonalRegion {
    pub fn empty() -> Self {
        PolygonalRegion { faces: Vec::new() }
    }

    /// Builds a region, repairing ring orientation (outer CCW, holes CW).
    pub fn new(faces: Vec<Face>) -> Self {
        let mut faces = faces;
        for f in &mut faces {
            if !f.outer.is_ccw() {
                f.outer.reverse();
            }
            for h in &mut f.holes {
                if h.is_ccw() {
                    h.reverse();
                }
            }
        }
        PolygonalRegion { faces }
    }

    pub fn from_ring(outer: Ring) -> Self {
        PolygonalRegion::new(vec![Face { outer, holes: Vec::new() }])
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }

    pub fn rings(&self) -> impl Iterator<Item = &Ring> {
        self.faces
            .iter()
            .flat_map(|f| std::iter::once(&f.outer).chain(f.holes.iter()))
    }

    pub fn segments(&self) -> impl Iterator<Item = Segment> + '_ {
        self.rings().flat_map(|r| r.segments().collect::<Vec<_>>())
    }

    pub fn vertices(&self) -> impl Iterator<Item = Point> + '_ {
        self.rings().flat_map(|r| r.points().iter().copied())
    }

    pub fn vertex_count(&self) -> usize {
        self.rings().map(|r| r.len()).sum()
    }

    pub fn area(&self) -> f64 {
        self.faces
            .iter()
            .map(|f| {
                let mut a = f.outer.signed_area2();
                for h in &f.holes {
                    a += h.signed_area2(); // holes are CW: negative
                }
                a
            })
            .sum::<f64>()
            / 2.0
    }

    pub fn bbox(&self) -> Option<(Point, Point)> {
        let mut lo = pt(f64::INFINITY, f64::INFINITY);
        let mut hi = pt(f64::NEG_INFINITY, f64::NEG_INFINITY);
        let mut any = false;
        for f in &self.faces {
            let (l, h) = f.outer.bbox();
            lo.x = lo.x.min(l.x);
            lo.y = lo.y.min(l.y);
            hi.x = hi.x.max(h.x);
            hi.y = hi.y.max(h.y);
            any = true;
        }
        any.then_some((lo, hi))
    }

    /// Euclidean distance from a point to the region boundary.
    pub fn boundary_dist(&self, p: Point) -> f64 {
        let mut best = f64::INFINITY;
        for r in self.rings() {
            for s in r.segments() {
                best = best.min(point_segment_dist(p, &s));
            }
        }
        best
    }

    /// Closed containment: true iff `p` lies in the region, treating points
    /// within `tol.eta` of the boundary as contained.
    pub fn contains_point(&self, p: Point, tol: Tolerance) -> bool {
        for face in &self.faces {
            if face_contains(face, p, tol) {
                return true;
            }
        }
        false
    }

    /// Exact closed containment of a segment via crossing analysis: split the
    /// segment at every boundary crossing and test the midpoint of each piece.
    pub fn contains_segment(&self, s: &Segment, tol: Tolerance) -> bool {
        if !self.contains_point(s.a, tol) || !self.contains_point(s.b, tol) {
            return false;
        }
        if s.is_degenerate(tol) {
            return true;
        }
        let mut params = vec![0.0, 1.0];
        for r in self.rings() {
            for e in r.segments() {
                segment_intersection_params(s, &e, &mut params);
            }
        }
        params.sort_by(f64::total_cmp);
        params.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        for w in params.windows(2) {
            let mid = s.at(0.5 * (w[0] + w[1]));
            if !self.contains_point(mid, tol) {
                return false;
            }
        }
        true
    }
}

fn face_contains(face: &Face, p: Point, tol: Tolerance) -> bool {
    // Boundary band counts as contained (closed region).
    for s in face.outer.segments() {
        if point_segment_dist(p, &s) <= tol.eta {
            return true;
        }
    }
    for h in &face.holes {
        for s in h.segments() {
            if point_segment_dist(p, &s) <= tol.eta {
                return true;
            }
        }
    }
    if !ring_contains_crossing(&face.outer, p) {
        return false;
    }
    for h in &face.holes {
        if ring_contains_crossing(h, p) {
            return false;
        }
    }
    true
}

/// Even-odd crossing test; boundary behavior is unspecified (callers handle
/// the boundary band first).
fn ring_contains_crossing(r: &Ring, p: Point) -> bool {
    let pts = r.points();
    let n = pts.len();
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let a = pts[i];
        let b = pts[j];
        if (a.y > p.y) != (b.y > p.y) {
            let x_cross = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if p.x < x_cross {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

/// Appends to `params` every parameter t along `s` where `s` meets segment `e`
/// (proper crossings, touches, and the endpoints of collinear overlaps).
pub fn segment_intersection_params(s: &Segment, e: &Segment, params: &mut Vec<f64>) {
    let r = s.b.sub(s.a);
    let d = e.b.sub(e.a);
    let denom = r.x * d.y - r.y * d.x;
    let qp = e.a.sub(s.a);
    let scale = r.x.abs().max(r.y.abs()).max(d.x.abs()).max(d.y.abs()).max(1.0);
    if denom.abs() > 1e-14 * scale * scale {
        let t = (qp.x * d.y - qp.y * d.x) / denom;
        let u = (qp.x * r.y - qp.y * r.x) / denom;
        if (-1e-12..=1.0 + 1e-12).contains(&t) && (-1e-12..=1.0 + 1e-12).contains(&u) {
            params.push(t.clamp(0.0, 1.0));
        }
    } else {
        // Parallel. Check for collinear overlap.
        let cross = qp.x * r.y - qp.y * r.x;
        let rlen2 = r.x * r.x + r.y * r.y;
        if rlen2 == 0.0 {
            return;
        }
        if cross.abs() > 1e-12 * scale * scale {
            return;
        }
        let t0 = (qp.x * r.x + qp.y * r.y) / rlen2;
        let t1 = t0 + (d.x * r.x + d.y * r.y) / rlen2;
        let (lo, hi) = if t0 <= t1 { (t0, t1) } else { (t1, t0) };
        if hi < 0.0 || lo > 1.0 {
            return;
        }
        params.push(lo.clamp(0.0, 1.0));
        params.push(hi.clamp(0.0, 1.0));
    }
}

/// Axis-aligned closed square of radius `r` (side `2r`) centered at `center`.
pub fn square(center: Point, r: f64) -> Result<PolygonalRegion, Error> {
    if !(r >= 0.0) || !r.is_finite() {
        return Err(Error::input(format!("square radius must be >= 0, got {r}")));
    }
    let ring = Ring::new_unchecked(vec![
        pt(center.x - r, center.y - r),
        pt(center.x + r, center.y - r),
        pt(center.x + r, center.y + r),
        pt(center.x - r, center.y + r),
    ]);
    Ok(PolygonalRegion::from_ring(ring))
}

/// Corner points of the square of radius `r` at `center`, CCW from bottom-left.
pub fn square_corners(center: Point, r: f64) -> [Point; 4] {
    [
        pt(center.x - r, center.y - r),
        pt(center.x + r, center.y - r),
        pt(center.x + r, center.y + r),
        pt(center.x - r, center.y + r),
    ]
}

/// True iff no point of `s` lies in the open axis-aligned square of radius `r`
/// at `center`; riding the closed boundary is permitted. Exact: intersects the
/// parameter intervals where each coordinate gap drops below `r`.
pub fn segment_avoids_open_square(s: &Segment, center: Point, r: f64, tol: Tolerance) -> bool {
    debug_assert!(r > 0.0);
    // Penetration must exceed the tolerance band to count as a violation.
    let r_eff = r - tol.eta;
    let ix = interval_abs_lt(s.a.x - center.x, s.b.x - s.a.x, r_eff);
    let iy = interval_abs_lt(s.a.y - center.y, s.b.y - s.a.y, r_eff);
    let lo = ix.0.max(iy.0).max(0.0);
    let hi = ix.1.min(iy.1).min(1.0);
    lo >= hi
}

/// Open parameter interval where |a + t·b| < c (possibly empty or unbounded,
/// clamped to ±inf).
fn interval_abs_lt(a: f64, b: f64, c: f64) -> (f64, f64) {
    if c <= 0.0 {
        return (f64::INFINITY, f64::NEG_INFINITY);
    }
    if b == 0.0 {
        return if a.abs() < c {
            (f64::NEG_INFINITY, f64::INFINITY)
        } else {
            (f64::INFINITY, f64::NEG_INFINITY)
        };
    }
    let t0 = (-c - a) / b;
    let t1 = (c - a) / b;
    if t0 <= t1 {
        (t0, t1)
    } else {
        (t1, t0)
    }
}

/// Minimum ℓ∞ distance from `center` over the segment (used by verification
/// reports to find witness times).
pub fn segment_min_linf_to(s: &Segment, center: Point) -> (f64, f64) {
    let f = |t: f64| linf_dist(s.at(t), center);
    let mut best = (f(0.0), 0.0);
    let candidates = [1.0f64];
    for &t in &candidates {
        let v = f(t);
        if v < best.0 {
            best = (v, t);
        }
    }
    let ax = s.a.x - center.x;
    let bx = s.b.x - s.a.x;
    let ay = s.a.y - center.y;
    let by = s.b.y - s.a.y;
    let mut push = |t: f64| {
        if t > 0.0 && t < 1.0 {
            let v = f(t);
            if v < best.0 {
                best = (v, t);
            }
        }
    };
    if bx != 0.0 {
        push(-ax / bx);
    }
    if by != 0.0 {
        push(-ay / by);
    }
    let d1 = bx - by;
    if d1 != 0.0 {
        push((ay - ax) / d1);
    }
    let d2 = bx + by;
    if d2 != 0.0 {
        push(-(ax + ay) / d2);
    }
    best
}

/// True iff the closed axis-aligned rectangle `[lo, hi]` is contained in the
/// region: all four corners inside and no boundary edge entering the open
/// rectangle.
pub fn region_contains_rect(region: &PolygonalRegion, lo: Point, hi: Point, tol: Tolerance) -> bool {
    let cx = 0.5 * (lo.x + hi.x);
    let cy = 0.5 * (lo.y + hi.y);
    let rx = 0.5 * (hi.x - lo.x);
    let ry = 0.5 * (hi.y - lo.y);
    let corners = [pt(lo.x, lo.y), pt(hi.x, lo.y), pt(hi.x, hi.y), pt(lo.x, hi.y)];
    for c in corners {
        if !region.contains_point(c, tol) {
            return false;
        }
    }
    if rx <= 0.0 || ry <= 0.0 {
        return true;
    }
    // No boundary edge may enter the open rectangle.
    let center = pt(cx, cy);
    for r in region.rings() {
        for e in r.segments() {
            if !segment_avoids_open_rect(&e, center, rx, ry, tol) {
                return false;
            }
        }
    }
    true
}

fn segment_avoids_open_rect(s: &Segment, center: Point, rx: f64, ry: f64, tol: Tolerance) -> bool {
    let ix = interval_abs_lt(s.a.x - center.x, s.b.x - s.a.x, rx - tol.eta);
    let iy = interval_abs_lt(s.a.y - center.y, s.b.y - s.a.y, ry - tol.eta);
    let lo = ix.0.max(iy.0).max(0.0);
    let hi = ix.1.min(iy.1).min(1.0);
    lo >= hi
}

/// The workspace: one outer boundary plus hole boundaries.
#[derive(Clone, Debug, PartialEq)]
pub struct PolygonalEnvironment {
    pub name: Option<String>,
    outer: Ring,
    holes: Vec<Ring>,
}

impl PolygonalEnvironment {
    pub fn new(outer: Vec<Point>, holes: Vec<Vec<Point>>) -> Result<Self, Error> {
        let mut outer = Ring::new(outer)?;
        if outer.signed_area2().abs() <= 0.0 {
            return Err(Error::input("environment outer ring has zero area".to_string()));
        }
        if !outer.is_ccw() {
            outer.reverse();
        }
        let mut hole_rings = Vec::with_capacity(holes.len());
        for h in holes {
            let mut ring = Ring::new(h)?;
            if ring.is_ccw() {
                ring.reverse();
            }
            hole_rings.push(ring);
        }
        Ok(PolygonalEnvironment { name: None, outer, holes: hole_rings })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn outer(&self) -> &Ring {
        &self.outer
    }

    pub fn holes(&self) -> &[Ring] {
        &self.holes
    }

    pub fn region(&self) -> PolygonalRegion {
        PolygonalRegion {
            faces: vec![Face { outer: self.outer.clone(), holes: self.holes.clone() }],
        }
    }

    pub fn bbox(&self) -> (Point, Point) {
        self.outer.bbox()
    }

    pub fn vertex_count(&self) -> usize {
        self.outer.len() + self.holes.iter().map(|h| h.len()).sum::<usize>()
    }
}
