//! Executable free-space structure theory: far-point topology checks,
//! corridor detection with portals and parking places, revolving areas,
//! well-separated revolving areas, and the two-robot jiggle maneuver.

use crate::error::Error;
use crate::freespace::{is_close, local_component, FreeSpace, Landmarks};
use crate::geom::{
    linf_dist, point_segment_dist, region_contains_rect, segment_intersection_params, Point,
    PolygonalRegion, Ring, Segment, Tolerance,
};
use crate::kinematics::Configuration;
use crate::plan::Plan;

/// A maximal narrow passage: a trapezoid between two free-space edges whose
/// portal widths are at most 2 (too narrow for two robots to pass).
#[derive(Clone, Debug)]
pub struct Corridor {
    pub blockers: (Segment, Segment),
    pub portal_minus: Segment,
    pub portal_plus: Segment,
    /// Unit vector along the blockers, oriented from σ⁻ to σ⁺.
    pub direction: Point,
    /// Segment joining the portal midpoints.
    pub bisector: Segment,
    /// Maximum ℓ∞ distance between the endpoints of a portal.
    pub width: f64,
    /// ℓ∞ length of the bisector.
    pub depth: f64,
}

impl Corridor {
    pub fn trapezoid(&self) -> PolygonalRegion {
        PolygonalRegion::new(vec![crate::geom::Face {
            outer: Ring::new_unchecked(vec![
                self.portal_minus.a,
                self.portal_minus.b,
                self.portal_plus.b,
                self.portal_plus.a,
            ]),
            holes: vec![],
        }])
    }

    pub fn contains(&self, p: Point, tol: Tolerance) -> bool {
        self.trapezoid().contains_point(p, tol)
    }

    fn slide_scale(&self) -> f64 {
        self.direction.x.abs().max(self.direction.y.abs())
    }

    /// Portal parallel to σ⁻ at ℓ∞ distance `r` inside the corridor.
    fn portal_at(&self, r: f64, from_minus: bool) -> Segment {
        let shift = r / self.slide_scale();
        let (base, sign) = if from_minus {
            (self.portal_minus, 1.0)
        } else {
            (self.portal_plus, -1.0)
        };
        let d = Point::new(sign * shift * self.direction.x, sign * shift * self.direction.y);
        Segment::new(base.a.add(d), base.b.add(d))
    }
}

/// A placement whose whole unit square of placements stays free: two robots
/// can maneuver around each other inside it.
#[derive(Clone, Copy, Debug)]
pub struct RevolvingArea {
    pub center: Point,
}

/// Revolving-area centers pairwise ℓ∞-separated by at least 4.
#[derive(Clone, Debug)]
pub struct WSRASet {
    pub centers: Vec<Point>,
}

/// Counts the free-space edges intersecting ∂K(q, D/3). Far from every
/// landmark that boundary can meet at most two edges; this reports the
/// actual count so sweeps can assert the bound.
pub fn far_topology_check(
    f: &FreeSpace,
    lm: &Landmarks,
    q: Point,
    d: f64,
    tol: Tolerance,
) -> Result<usize, Error> {
    if !f.region.contains_point(q, tol) {
        return Err(Error::OutsideFreeSpace { x: q.x, y: q.y });
    }
    if is_close(q, lm, d) {
        return Err(Error::precondition(format!(
            "point ({}, {}) is {d}-close; the far-topology check needs a {d}-far point",
            q.x, q.y
        )));
    }
    let k = local_component(f, q, d / 3.0, tol)?;
    let mut count = 0usize;
    for e in f.region.segments() {
        if segment_touches_region(&e, &k, tol) {
            count += 1;
        }
    }
    Ok(count)
}

fn segment_touches_region(e: &Segment, region: &PolygonalRegion, tol: Tolerance) -> bool {
    let Some((lo, hi)) = region.bbox() else { return false };
    let (ex0, ex1) = (e.a.x.min(e.b.x), e.a.x.max(e.b.x));
    let (ey0, ey1) = (e.a.y.min(e.b.y), e.a.y.max(e.b.y));
    if ex1 < lo.x - tol.eta || ex0 > hi.x + tol.eta || ey1 < lo.y - tol.eta || ey0 > hi.y + tol.eta {
        return false;
    }
    if region.contains_point(e.a, tol) || region.contains_point(e.b, tol) {
        return true;
    }
    for ring in region.rings() {
        for b in ring.segments() {
            let mut params = Vec::new();
            segment_intersection_params(e, &b, &mut params);
            if !params.is_empty() {
                return true;
            }
        }
    }
    false
}

/// Enumerates maximal corridors between parallel free-space edge pairs.
/// Portals are pinned by landmarks (every free-space vertex is one) or by the
/// blockers' extents, so maximality holds by construction; candidates failing
/// the width bound or containing foreign geometry are discarded.
pub fn find_max_corridors(f: &FreeSpace, lm: &Landmarks, tol: Tolerance) -> Vec<Corridor> {
    let edges: Vec<(Segment, Point)> = f
        .region
        .rings()
        .flat_map(|r| r.segments().collect::<Vec<_>>())
        .map(|s| {
            let d = s.b.sub(s.a);
            let len = d.x.hypot(d.y);
            // interior of F lies to the left of each directed boundary edge
            let n = Point::new(-d.y / len, d.x / len);
            (s, n)
        })
        .collect();
    let mut out: Vec<Corridor> = Vec::new();
    for i in 0..edges.len() {
        for j in (i + 1)..edges.len() {
            collect_parallel_pair_corridors(&edges[i], &edges[j], f, lm, tol, &mut out);
        }
    }
    // maximality: drop corridors contained in another one
    let mut keep = vec![true; out.len()];
    for a in 0..out.len() {
        for b in 0..out.len() {
            if a == b || !keep[a] || !keep[b] {
                continue;
            }
            let ta = out[a].trapezoid();
            let corners_b = [
                out[b].portal_minus.a,
                out[b].portal_minus.b,
                out[b].portal_plus.a,
                out[b].portal_plus.b,
            ];
            let inside = corners_b.iter().all(|p| ta.contains_point(*p, Tolerance::new(1e-7).unwrap()));
            if inside && (out[a].depth > out[b].depth + 1e-9 || out[a].width > out[b].width + 1e-9) {
                keep[b] = false;
            }
        }
    }
    let mut result: Vec<Corridor> = out
        .into_iter()
        .zip(keep)
        .filter_map(|(c, k)| k.then_some(c))
        .collect();
    result.sort_by(|a, b| {
        a.bisector
            .a
            .x
            .total_cmp(&b.bisector.a.x)
            .then(a.bisector.a.y.total_cmp(&b.bisector.a.y))
    });
    result
}

fn collect_parallel_pair_corridors(
    (ei, ni): &(Segment, Point),
    (ej, nj): &(Segment, Point),
    f: &FreeSpace,
    lm: &Landmarks,
    tol: Tolerance,
    out: &mut Vec<Corridor>,
) {
    let di = ei.b.sub(ei.a);
    let li = di.x.hypot(di.y);
    let dj = ej.b.sub(ej.a);
    let lj = dj.x.hypot(dj.y);
    if li <= tol.eta || lj <= tol.eta {
        return;
    }
    let d = Point::new(di.x / li, di.y / li);
    let cross = d.x * (dj.y / lj) - d.y * (dj.x / lj);
    if cross.abs() > 1e-9 {
        return; // only parallel blocker pairs are supported
    }
    // signed gap from line i toward line j along ni
    let gap = (ej.a.x - ei.a.x) * ni.x + (ej.a.y - ei.a.y) * ni.y;
    if gap <= tol.eta {
        return; // ej must lie on the free side of ei
    }
    // free sides must face each other
    let back = (ei.a.x - ej.a.x) * nj.x + (ei.a.y - ej.a.y) * nj.y;
    if back <= tol.eta {
        return;
    }
    // chord vector spanning the strip (the portal direction)
    let chord = if d.x.abs() <= 1e-12 || d.y.abs() <= 1e-12 {
        // axis-aligned blockers: perpendicular portals
        Point::new(gap * ni.x, gap * ni.y)
    } else {
        // slanted blockers: the inscribed square touches at opposite corners,
        // so the portal runs along the diagonal toward the far line
        let sx = ni.x.signum();
        let sy = ni.y.signum();
        let denom = ni.x.abs() + ni.y.abs();
        let alpha = gap / denom;
        Point::new(alpha * sx, alpha * sy)
    };
    let width = chord.x.abs().max(chord.y.abs());
    if width > 2.0 + 10.0 * tol.eta {
        return;
    }
    // parameter range (projection onto d, measured from ei.a) where both
    // portal endpoints stay on their respective edges
    let proj = |p: Point| (p.x - ei.a.x) * d.x + (p.y - ei.a.y) * d.y;
    let (i_lo, i_hi) = (0.0f64, li);
    let pj0 = proj(ej.a.sub(chord));
    let pj1 = proj(ej.b.sub(chord));
    let (j_lo, j_hi) = if pj0 <= pj1 { (pj0, pj1) } else { (pj1, pj0) };
    let lo = i_lo.max(j_lo);
    let hi = i_hi.min(j_hi);
    if hi - lo <= 1e-9 {
        return;
    }
    let portal_at = |p: f64| {
        let base = Point::new(ei.a.x + p * d.x, ei.a.y + p * d.y);
        Segment::new(base, base.add(chord))
    };
    // landmark cuts: a landmark strictly inside the swept strip pins portals
    let mut cuts: Vec<f64> = vec![lo, hi];
    for u in lm.points() {
        // coordinates of u in the (d, chord) frame anchored at ei.a
        let t_chord = ((u.x - ei.a.x) * ni.x + (u.y - ei.a.y) * ni.y) / gap;
        if t_chord <= 1e-9 || t_chord >= 1.0 - 1e-9 {
            continue;
        }
        let p_u = proj(*u) - t_chord * (proj(ei.a.add(chord)));
        if p_u > lo + 1e-9 && p_u < hi - 1e-9 {
            cuts.push(p_u);
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    for w in cuts.windows(2) {
        let (p0, p1) = (w[0], w[1]);
        if p1 - p0 <= 1e-9 {
            continue;
        }
        let pm = portal_at(p0);
        let pp = portal_at(p1);
        let center = Point::new(
            0.25 * (pm.a.x + pm.b.x + pp.a.x + pp.b.x),
            0.25 * (pm.a.y + pm.b.y + pp.a.y + pp.b.y),
        );
        if !f.region.contains_point(center, tol) {
            continue;
        }
        let trap = PolygonalRegion::from_ring(Ring::new_unchecked(vec![pm.a, pm.b, pp.b, pp.a]));
        if trap.area().abs() < 1e-9 {
            continue;
        }
        // no landmark strictly inside
        let strictly_inside = |p: Point| {
            trap.contains_point(p, tol) && trap.boundary_dist(p) > 1e-7
        };
        if lm.points().iter().any(|u| strictly_inside(*u)) {
            continue;
        }
        // no foreign free-space edge through the interior
        let mut intruded = false;
        for e in f.region.segments() {
            if segments_equal(&e, ei, tol) || segments_equal(&e, ej, tol) {
                continue;
            }
            if strictly_inside(e.a) || strictly_inside(e.b) {
                intruded = true;
                break;
            }
            let mid = e.at(0.5);
            if strictly_inside(mid) {
                intruded = true;
                break;
            }
        }
        if intruded {
            continue;
        }
        let bis = Segment::new(pm.at(0.5), pp.at(0.5));
        let depth = linf_dist(bis.a, bis.b);
        if depth <= 1e-9 {
            continue;
        }
        let dir_sign = ((pp.a.x - pm.a.x) * d.x + (pp.a.y - pm.a.y) * d.y).signum();
        out.push(Corridor {
            blockers: (
                Segment::new(pm.a, pp.a),
                Segment::new(pm.b, pp.b),
            ),
            portal_minus: pm,
            portal_plus: pp,
            direction: Point::new(dir_sign * d.x, dir_sign * d.y),
            bisector: bis,
            width,
            depth,
        });
    }
}

fn segments_equal(a: &Segment, b: &Segment, tol: Tolerance) -> bool {
    (linf_dist(a.a, b.a) <= tol.eta && linf_dist(a.b, b.b) <= tol.eta)
        || (linf_dist(a.a, b.b) <= tol.eta && linf_dist(a.b, b.a) <= tol.eta)
}

/// σ⁻(r), σ⁺(r), and the r-sanctum trapezoid between them.
pub fn corridor_sections(c: &Corridor, r: f64) -> Result<(Segment, Segment, PolygonalRegion), Error> {
    if !(r >= 0.0) {
        return Err(Error::input(format!("section offset must be >= 0, got {r}")));
    }
    if c.depth < 2.0 * r - 1e-12 {
        return Err(Error::precondition(format!(
            "corridor depth {} is less than 2r = {}",
            c.depth,
            2.0 * r
        )));
    }
    let sm = c.portal_at(r, true);
    let sp = c.portal_at(r, false);
    let sanctum = PolygonalRegion::from_ring(Ring::new_unchecked(vec![sm.a, sm.b, sp.b, sp.a]));
    Ok((sm, sp, sanctum))
}

/// Parking placements on the corridor bisector near each portal: at least `k`
/// points per side within the first 10k of depth, pairwise ℓ∞ ≥ 4, built on
/// the width-4 grid overlay.
pub fn parking_places(c: &Corridor, k: usize, tol: Tolerance) -> Result<(Vec<Point>, Vec<Point>), Error> {
    if k == 0 {
        return Err(Error::input("k must be at least 1".to_string()));
    }
    let need = 20.0 * k as f64;
    if c.depth < need - 1e-9 {
        return Err(Error::precondition(format!(
            "corridor depth {} is less than 20k = {need}",
            c.depth
        )));
    }
    let minus = parking_side(c, k, true, tol)?;
    let plus = parking_side(c, k, false, tol)?;
    Ok((minus, plus))
}

fn parking_side(c: &Corridor, k: usize, from_minus: bool, tol: Tolerance) -> Result<Vec<Point>, Error> {
    // bisector parameterized from the chosen portal inward
    let (start, dir) = if from_minus {
        (c.bisector.a, c.bisector.b.sub(c.bisector.a))
    } else {
        (c.bisector.b, c.bisector.a.sub(c.bisector.b))
    };
    let len = dir.x.hypot(dir.y);
    let d = Point::new(dir.x / len, dir.y / len);
    let linf_per_unit = d.x.abs().max(d.y.abs());
    let window_lo = 2.0 / linf_per_unit;
    let window_hi = (10.0 * k as f64) / linf_per_unit;
    // the grid family crossing the bisector transversally: vertical lines
    // x ∈ 4Z when the corridor runs mostly along x, else horizontal lines
    let use_vertical = d.x.abs() >= d.y.abs();
    let mut points = Vec::new();
    // advance to successive grid-line crossings
    let coord = |p: Point| if use_vertical { p.x } else { p.y };
    let dcoord = if use_vertical { d.x } else { d.y };
    if dcoord.abs() < 1e-12 {
        return Err(Error::precondition(
            "corridor bisector is parallel to the grid family".to_string(),
        ));
    }
    // first grid line at or after window_lo
    let c0 = coord(start) + window_lo * dcoord;
    let next_grid = if dcoord > 0.0 {
        (c0 / 4.0).ceil() * 4.0
    } else {
        (c0 / 4.0).floor() * 4.0
    };
    let mut s = window_lo + (next_grid - c0) / dcoord;
    while s <= window_hi + 1e-9 && s <= len + 1e-9 {
        let p = Point::new(start.x + s * d.x, start.y + s * d.y);
        points.push(p);
        s += 4.0 / dcoord.abs();
    }
    if points.len() < k {
        return Err(Error::precondition(format!(
            "only {} parking candidates fit in the 10k window, need {k}",
            points.len()
        )));
    }
    let _ = tol;
    Ok(points)
}

/// True iff the unit square of placements centered at `p` lies in F
/// (equivalently, the radius-2 workspace square around `p` is obstacle-free).
pub fn has_revolving_area(f: &FreeSpace, p: Point, tol: Tolerance) -> bool {
    region_contains_rect(
        &f.region,
        Point::new(p.x - 1.0, p.y - 1.0),
        Point::new(p.x + 1.0, p.y + 1.0),
        tol,
    )
}

/// At least `j` well-separated revolving areas inside K(q, 24j), built on the
/// width-4 grid overlay. Requires `q` to be 48j-far: far enough that the
/// component is vertex-free at the grid scale, without demanding the
/// worst-case margin.
pub fn wsra_centers(
    f: &FreeSpace,
    lm: &Landmarks,
    q: Point,
    j: usize,
    tol: Tolerance,
) -> Result<WSRASet, Error> {
    if j == 0 {
        return Ok(WSRASet { centers: Vec::new() });
    }
    let required = 48.0 * j as f64;
    let measured = lm.min_linf(q);
    if measured <= required {
        return Err(Error::NotFarEnough { required, measured });
    }
    let corridors = find_max_corridors(f, lm, tol);
    if corridors.iter().any(|c| c.contains(q, tol)) {
        return Err(Error::precondition(format!(
            "point ({}, {}) lies in a corridor",
            q.x, q.y
        )));
    }
    let r = 24.0 * j as f64;
    let k_region = local_component(f, q, r, tol)?;
    let mut centers = Vec::new();
    let i_lo = ((q.x - r) / 4.0).ceil() as i64;
    let i_hi = ((q.x + r) / 4.0).floor() as i64;
    let j_lo = ((q.y - r) / 4.0).ceil() as i64;
    let j_hi = ((q.y + r) / 4.0).floor() as i64;
    'outer: for gi in i_lo..=i_hi {
        for gj in j_lo..=j_hi {
            let p = Point::new(gi as f64 * 4.0, gj as f64 * 4.0);
            if k_region.contains_point(p, tol) && has_revolving_area(f, p, tol) {
                centers.push(p);
                if centers.len() >= j {
                    break 'outer;
                }
            }
        }
    }
    if centers.len() < j {
        return Err(Error::precondition(format!(
            "found only {} revolving-area grid centers in K(q, {r}), need {j}",
            centers.len()
        )));
    }
    Ok(WSRASet { centers })
}

/// Clockwise perimeter walk positions on the boundary of the square of radius
/// `radius` at `center`: s ∈ [0, 4·side) starting at the top-right corner,
/// going down the right edge first.
fn perimeter_point(center: Point, radius: f64, s: f64) -> Point {
    let side = 2.0 * radius;
    let s = s.rem_euclid(4.0 * side);
    if s < side {
        Point::new(center.x + radius, center.y + radius - s)
    } else if s < 2.0 * side {
        Point::new(center.x + radius - (s - side), center.y - radius)
    } else if s < 3.0 * side {
        Point::new(center.x - radius, center.y - radius + (s - 2.0 * side))
    } else {
        Point::new(center.x - radius + (s - 3.0 * side), center.y + radius)
    }
}

fn perimeter_param(center: Point, radius: f64, p: Point) -> f64 {
    let side = 2.0 * radius;
    let dx = p.x - center.x;
    let dy = p.y - center.y;
    if (dx - radius).abs() <= 1e-9 {
        (center.y + radius - p.y).clamp(0.0, side)
    } else if (dy + radius).abs() <= 1e-9 {
        side + (center.x + radius - p.x).clamp(0.0, side)
    } else if (dx + radius).abs() <= 1e-9 {
        2.0 * side + (p.y - (center.y - radius)).clamp(0.0, side)
    } else {
        3.0 * side + (p.x - (center.x - radius)).clamp(0.0, side)
    }
}

/// The two-robot jiggle: robot 2 travels from `a` to `b` on ∂B(p, 2) while
/// robot 1 starts and ends at `p`, both staying inside B(p, 2). Robot 1
/// mirrors robot 2 through `p` during the revolve, which keeps the pair at
/// ℓ∞ distance exactly 2 throughout.
pub fn jiggle_plan(p: Point, a: Point, b: Point, f: &FreeSpace, tol: Tolerance) -> Result<Plan, Error> {
    if !has_revolving_area(f, p, tol) {
        return Err(Error::precondition(format!(
            "no revolving area at ({}, {})",
            p.x, p.y
        )));
    }
    for (name, q) in [("a", a), ("b", b)] {
        if (linf_dist(p, q) - 2.0).abs() > 1e-7 {
            return Err(Error::precondition(format!(
                "{name} must lie on the boundary of B(p, 2), got ℓ∞ distance {}",
                linf_dist(p, q)
            )));
        }
        if !f.region.contains_point(q, tol) {
            return Err(Error::OutsideFreeSpace { x: q.x, y: q.y });
        }
    }
    if linf_dist(a, b) <= tol.eta {
        // trivial plan: nothing moves
        let cfg = Configuration::new(vec![p, a]);
        return Plan::new(vec![cfg.clone(), cfg]);
    }
    if linf_dist(a, b) < 2.0 - 1e-9 {
        return Err(Error::precondition(format!(
            "a and b must be ℓ∞-separated by at least 2, got {}",
            linf_dist(a, b)
        )));
    }
    // nearest points of the revolving-area boundary
    let clamp1 = |q: Point| {
        Point::new(
            p.x + (q.x - p.x).clamp(-1.0, 1.0),
            p.y + (q.y - p.y).clamp(-1.0, 1.0),
        )
    };
    let a1 = clamp1(a);
    let b1 = clamp1(b);
    let mirror = |q: Point| Point::new(2.0 * p.x - q.x, 2.0 * p.y - q.y);
    let mut configs: Vec<Configuration> = Vec::new();
    let mut push = |r1: Point, r2: Point| {
        configs.push(Configuration::new(vec![r1, r2]));
    };
    // 1. robot 1 parks on the far side of the revolving area
    push(p, a);
    push(mirror(a1), a);
    // 2. robot 2 steps inward onto the revolving-area boundary
    push(mirror(a1), a1);
    // 3. both revolve clockwise, robot 1 mirrored through p, breaking legs at
    //    the corners of the revolving area
    let side = 2.0;
    let total = 4.0 * side;
    let s0 = perimeter_param(p, 1.0, a1);
    let s1 = perimeter_param(p, 1.0, b1);
    let walk = (s1 - s0).rem_euclid(total);
    let mut s = 0.0;
    while s < walk - 1e-12 {
        let to_corner = side - (s0 + s).rem_euclid(side);
        let step = to_corner.min(walk - s).max(1e-12);
        s += step;
        let r2 = perimeter_point(p, 1.0, s0 + s);
        push(mirror(r2), r2);
    }
    // 4. robot 2 steps back out to b
    push(mirror(b1), b);
    // 5. robot 1 returns home
    push(p, b);
    let mut dedup: Vec<Configuration> = Vec::new();
    for c in configs {
        if dedup.last().map(|l| {
            l.placements()
                .iter()
                .zip(c.placements())
                .all(|(x, y)| linf_dist(*x, *y) <= tol.eta)
        }) != Some(true)
        {
            dedup.push(c);
        }
    }
    Plan::new(dedup)
}

/// Bundled corridor/revolving-area report used by the CLI.
#[derive(Clone, Debug)]
pub struct DiagnosticsReport {
    pub corridors: Vec<Corridor>,
    pub landmark_count: usize,
    pub f2_empty: bool,
}

pub fn diagnose(f: &FreeSpace, f2: &FreeSpace, lm: &Landmarks, tol: Tolerance) -> DiagnosticsReport {
    DiagnosticsReport {
        corridors: find_max_corridors(f, lm, tol),
        landmark_count: lm.len(),
        f2_empty: f2.is_empty(),
    }
}

/// True iff some landmark lies on (within tol of) the given portal segment.
pub fn landmark_on_portal(c: &Corridor, lm: &Landmarks, tol: Tolerance) -> bool {
    lm.points().iter().any(|u| {
        point_segment_dist(*u, &c.portal_minus) <= 1e-6 + tol.eta
            || point_segment_dist(*u, &c.portal_plus) <= 1e-6 + tol.eta
    })
}
