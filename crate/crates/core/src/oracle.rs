//! Brute-force reference implementations used for testing and cross-checks:
//! rasterized erosion, time-sampled motion checking, and a fine-grid
//! product-space shortest path.
//!
//! These deliberately avoid the predicates in `geom`/`freespace`: containment
//! uses winding numbers instead of crossing parity, and segment-square tests
//! use outcode clipping instead of interval intersection, so the two paths
//! can validate each other.

use std::collections::{BinaryHeap, HashMap};

use crate::error::Error;
use crate::geom::{Point, PolygonalEnvironment, Ring};
use crate::kinematics::Configuration;

/// Occupancy bitmap over a uniform grid.
#[derive(Clone, Debug)]
pub struct RasterMask {
    pub origin: Point,
    pub pitch: f64,
    pub cols: usize,
    pub rows: usize,
    free: Vec<bool>,
}

impl RasterMask {
    pub fn is_free(&self, col: usize, row: usize) -> bool {
        self.free[row * self.cols + col]
    }

    pub fn cell_center(&self, col: usize, row: usize) -> Point {
        Point::new(
            self.origin.x + (col as f64 + 0.5) * self.pitch,
            self.origin.y + (row as f64 + 0.5) * self.pitch,
        )
    }

    pub fn cell_count(&self) -> usize {
        self.free.len()
    }

    pub fn free_count(&self) -> usize {
        self.free.iter().filter(|b| **b).count()
    }
}

/// Winding number of `ring` around `p`; nonzero means inside.
fn winding_number(ring: &Ring, p: Point) -> i32 {
    let pts = ring.points();
    let n = pts.len();
    let mut wn = 0i32;
    for i in 0..n {
        let a = pts[i];
        let b = pts[(i + 1) % n];
        let is_left = (b.x - a.x) * (p.y - a.y) - (p.x - a.x) * (b.y - a.y);
        if a.y <= p.y {
            if b.y > p.y && is_left > 0.0 {
                wn += 1;
            }
        } else if b.y <= p.y && is_left < 0.0 {
            wn -= 1;
        }
    }
    wn
}

fn env_contains(env: &PolygonalEnvironment, p: Point) -> bool {
    if winding_number(env.outer(), p) == 0 {
        return false;
    }
    for h in env.holes() {
        if winding_number(h, p) != 0 {
            return false;
        }
    }
    true
}

/// Cohen–Sutherland style test: does segment `ab` intersect the open
/// axis-aligned box `[lo, hi]`?
fn segment_enters_open_box(a: Point, b: Point, lo: Point, hi: Point) -> bool {
    const LEFT: u8 = 1;
    const RIGHT: u8 = 2;
    const BOTTOM: u8 = 4;
    const TOP: u8 = 8;
    let code = |p: Point| -> u8 {
        let mut c = 0u8;
        if p.x <= lo.x {
            c |= LEFT;
        } else if p.x >= hi.x {
            c |= RIGHT;
        }
        if p.y <= lo.y {
            c |= BOTTOM;
        } else if p.y >= hi.y {
            c |= TOP;
        }
        c
    };
    let (mut a, mut b) = (a, b);
    let (mut ca, mut cb) = (code(a), code(b));
    loop {
        if ca == 0 || cb == 0 {
            return true; // an endpoint strictly inside
        }
        if ca & cb != 0 {
            return false; // both strictly on one outside side
        }
        // Clip the endpoint with the larger code against the box boundary.
        let (c, swap) = if ca >= cb { (ca, false) } else { (cb, true) };
        let p;
        if c & TOP != 0 {
            p = Point::new(a.x + (b.x - a.x) * (hi.y - a.y) / (b.y - a.y), hi.y);
        } else if c & BOTTOM != 0 {
            p = Point::new(a.x + (b.x - a.x) * (lo.y - a.y) / (b.y - a.y), lo.y);
        } else if c & RIGHT != 0 {
            p = Point::new(hi.x, a.y + (b.y - a.y) * (hi.x - a.x) / (b.x - a.x));
        } else {
            p = Point::new(lo.x, a.y + (b.y - a.y) * (lo.x - a.x) / (b.x - a.x));
        }
        if swap {
            b = p;
            cb = code(b);
        } else {
            a = p;
            ca = code(a);
        }
        if linf(a, b) < 1e-13 {
            return false; // clipped to a boundary point
        }
    }
}

fn linf(a: Point, b: Point) -> f64 {
    (a.x - b.x).abs().max((a.y - b.y).abs())
}

/// Exact per-cell check: the square of radius `r` centered at the cell center
/// fits inside the environment.
fn square_fits(env: &PolygonalEnvironment, c: Point, r: f64) -> bool {
    let corners = [
        Point::new(c.x - r, c.y - r),
        Point::new(c.x + r, c.y - r),
        Point::new(c.x + r, c.y + r),
        Point::new(c.x - r, c.y + r),
    ];
    if !env_contains(env, c) {
        return false;
    }
    for p in corners {
        // Nudge inward so exact boundary contact still counts as inside.
        let eps = 1e-12;
        let q = Point::new(
            p.x + eps * (c.x - p.x).signum(),
            p.y + eps * (c.y - p.y).signum(),
        );
        if !env_contains(env, q) {
            return false;
        }
    }
    let lo = corners[0];
    let hi = corners[2];
    for ring in std::iter::once(env.outer()).chain(env.holes().iter()) {
        for s in ring.segments() {
            if segment_enters_open_box(s.a, s.b, lo, hi) {
                return false;
            }
        }
    }
    true
}

/// Rasterized erosion: cell is marked free iff its center's `r`-square lies
/// inside the environment.
pub fn raster_erode(env: &PolygonalEnvironment, r: f64, pitch: f64) -> Result<RasterMask, Error> {
    if !(pitch > 0.0) {
        return Err(Error::input(format!("raster pitch must be > 0, got {pitch}")));
    }
    let (lo, hi) = env.bbox();
    let cols = ((hi.x - lo.x) / pitch).ceil() as usize;
    let rows = ((hi.y - lo.y) / pitch).ceil() as usize;
    let mut free = vec![false; cols * rows];
    use rayon::prelude::*;
    free.par_chunks_mut(cols).enumerate().for_each(|(row, chunk)| {
        for (col, cell) in chunk.iter_mut().enumerate() {
            let c = Point::new(
                lo.x + (col as f64 + 0.5) * pitch,
                lo.y + (row as f64 + 0.5) * pitch,
            );
            *cell = square_fits(env, c, r);
        }
    });
    Ok(RasterMask { origin: lo, pitch, cols, rows, free })
}

/// Depth of a placement inside the environment: the ℓ∞ distance to the
/// nearest boundary point (negative sign means outside).
pub fn clearance(env: &PolygonalEnvironment, p: Point) -> f64 {
    let mut d = f64::INFINITY;
    for ring in std::iter::once(env.outer()).chain(env.holes().iter()) {
        let pts = ring.points();
        let n = pts.len();
        for i in 0..n {
            d = d.min(linf_point_segment(p, pts[i], pts[(i + 1) % n]));
        }
    }
    if env_contains(env, p) {
        d
    } else {
        -d
    }
}

/// ℓ∞ distance from `p` to segment `ab`: closed form for axis-aligned
/// segments (clamp the free coordinate), ternary search over the convex
/// parameter objective otherwise.
fn linf_point_segment(p: Point, a: Point, b: Point) -> f64 {
    if a.y == b.y {
        let (x0, x1) = if a.x <= b.x { (a.x, b.x) } else { (b.x, a.x) };
        let dx = if p.x < x0 {
            x0 - p.x
        } else if p.x > x1 {
            p.x - x1
        } else {
            0.0
        };
        return dx.max((p.y - a.y).abs());
    }
    if a.x == b.x {
        let (y0, y1) = if a.y <= b.y { (a.y, b.y) } else { (b.y, a.y) };
        let dy = if p.y < y0 {
            y0 - p.y
        } else if p.y > y1 {
            p.y - y1
        } else {
            0.0
        };
        return dy.max((p.x - a.x).abs());
    }
    let f = |t: f64| {
        let x = a.x + t * (b.x - a.x);
        let y = a.y + t * (b.y - a.y);
        (p.x - x).abs().max((p.y - y).abs())
    };
    let mut lo = 0.0f64;
    let mut hi = 1.0f64;
    for _ in 0..60 {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if f(m1) <= f(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    f(0.0).min(f(1.0)).min(f(0.5 * (lo + hi)))
}

/// Minimum workspace clearance and pairwise ℓ∞ separation over the linear
/// motion from `a` to `b`, sampled at `samples` uniformly spaced times.
pub fn sampled_motion_check(
    a: &Configuration,
    b: &Configuration,
    env: &PolygonalEnvironment,
    samples: usize,
) -> (f64, f64) {
    assert!(samples >= 2);
    let k = a.len();
    let mut min_clear = f64::INFINITY;
    let mut min_sep = f64::INFINITY;
    for s in 0..samples {
        let t = s as f64 / (samples - 1) as f64;
        let mut placements = Vec::with_capacity(k);
        for i in 0..k {
            let p = a.placements()[i].lerp(b.placements()[i], t);
            min_clear = min_clear.min(clearance(env, p));
            placements.push(p);
        }
        for i in 0..k {
            for j in (i + 1)..k {
                min_sep = min_sep.min(linf(placements[i], placements[j]));
            }
        }
    }
    (min_clear, min_sep)
}

/// Exact minimum ℓ∞ norm of the linear motion `rel(t) = a + t(b−a)`, t∈[0,1],
/// by evaluating the candidate breakpoints of the piecewise-linear norm.
fn min_linf_linear(ax: f64, ay: f64, bx: f64, by: f64) -> f64 {
    let dx = bx - ax;
    let dy = by - ay;
    let f = |t: f64| (ax + t * dx).abs().max((ay + t * dy).abs());
    let mut best = f(0.0).min(f(1.0));
    let mut cand = |t: f64| {
        if t > 0.0 && t < 1.0 {
            best = best.min(f(t));
        }
    };
    if dx != 0.0 {
        cand(-ax / dx);
    }
    if dy != 0.0 {
        cand(-ay / dy);
    }
    if dx - dy != 0.0 {
        cand((ay - ax) / (dx - dy));
    }
    if dx + dy != 0.0 {
        cand(-(ax + ay) / (dx + dy));
    }
    best
}

#[derive(Clone, Copy, PartialEq)]
struct HeapEntry {
    dist: f64,
    node: u32,
}

impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

pub enum GridOptimum {
    Cost(f64),
    Unreachable,
}

/// Dijkstra over the full product grid with 8-connected per-robot moves and
/// exact pairwise feasibility per step. Reference only; refuses large grids.
pub fn product_grid_optimum(
    env: &PolygonalEnvironment,
    starts: &[Point],
    targets: &[Point],
    pitch: f64,
) -> Result<GridOptimum, Error> {
    let k = starts.len();
    if k == 0 || k > 2 || targets.len() != k {
        return Err(Error::input("product grid oracle supports k in {1, 2}".to_string()));
    }
    if !(pitch > 0.0) {
        return Err(Error::input("pitch must be positive".to_string()));
    }
    let (lo, hi) = env.bbox();
    let cols = ((hi.x - lo.x) / pitch).round() as usize + 1;
    let rows = ((hi.y - lo.y) / pitch).round() as usize + 1;
    if cols > 40 || rows > 40 {
        return Err(Error::BudgetExceeded(format!(
            "grid {cols}x{rows} exceeds the 40x40 oracle budget"
        )));
    }
    let gp = |c: usize, r: usize| Point::new(lo.x + c as f64 * pitch, lo.y + r as f64 * pitch);
    let n = cols * rows;
    let mut node_free = vec![false; n];
    for r in 0..rows {
        for c in 0..cols {
            node_free[r * cols + c] = square_fits(env, gp(c, r), 1.0);
        }
    }
    let to_node = |p: Point| -> Result<usize, Error> {
        let c = ((p.x - lo.x) / pitch).round() as isize;
        let r = ((p.y - lo.y) / pitch).round() as isize;
        let snapped = gp(c.max(0) as usize, r.max(0) as usize);
        if c < 0 || r < 0 || c as usize >= cols || r as usize >= rows || linf(snapped, p) > 1e-9 {
            return Err(Error::input(format!(
                "oracle endpoints must lie on the {pitch}-grid, got ({}, {})",
                p.x, p.y
            )));
        }
        Ok(r as usize * cols + c as usize)
    };

    let moves: Vec<(isize, isize)> = vec![
        (0, 0),
        (1, 0),
        (-1, 0),
        (0, 1),
        (0, -1),
        (1, 1),
        (1, -1),
        (-1, 1),
        (-1, -1),
    ];

    // Per-robot step feasibility, precomputed per (node, move): endpoints
    // free and no environment edge crossing the swept region.
    let step_free_once = |from: usize, to: usize| -> bool {
        if !node_free[from] || !node_free[to] {
            return false;
        }
        if from == to {
            return true;
        }
        let a = gp(from % cols, from / cols);
        let b = gp(to % cols, to / cols);
        let lo_box = Point::new(a.x.min(b.x) - 1.0, a.y.min(b.y) - 1.0);
        let hi_box = Point::new(a.x.max(b.x) + 1.0, a.y.max(b.y) + 1.0);
        // For axis-aligned moves the swept region is exactly this box; for
        // diagonal moves the box over-approximates, so fall back to dense
        // square checks along the (short) step to avoid false negatives.
        let diagonal = a.x != b.x && a.y != b.y;
        if !diagonal {
            for ring in std::iter::once(env.outer()).chain(env.holes().iter()) {
                for s in ring.segments() {
                    if segment_enters_open_box(s.a, s.b, lo_box, hi_box) {
                        return false;
                    }
                }
            }
            true
        } else {
            const STEPS: usize = 32;
            for i in 0..=STEPS {
                let t = i as f64 / STEPS as f64;
                if !square_fits(env, a.lerp(b, t), 1.0) {
                    return false;
                }
            }
            true
        }
    };
    let mut step_table = vec![false; n * moves.len()];
    for u in 0..n {
        let (uc, ur) = (u % cols, u / cols);
        for (mi, &(dc, dr)) in moves.iter().enumerate() {
            let (vc, vr) = (uc as isize + dc, ur as isize + dr);
            if vc < 0 || vr < 0 || vc as usize >= cols || vr as usize >= rows {
                continue;
            }
            let v = vr as usize * cols + vc as usize;
            step_table[u * moves.len() + mi] = step_free_once(u, v);
        }
    }
    let step_free = |u: usize, mi: usize| step_table[u * moves.len() + mi];

    if k == 1 {
        let s = to_node(starts[0])?;
        let t = to_node(targets[0])?;
        if !node_free[s] || !node_free[t] {
            return Err(Error::input("oracle endpoints are not free placements".to_string()));
        }
        let mut dist: Vec<f64> = vec![f64::INFINITY; n];
        let mut heap = BinaryHeap::new();
        dist[s] = 0.0;
        heap.push(HeapEntry { dist: 0.0, node: s as u32 });
        while let Some(HeapEntry { dist: d, node }) = heap.pop() {
            let u = node as usize;
            if d > dist[u] {
                continue;
            }
            if u == t {
                return Ok(GridOptimum::Cost(d));
            }
            let (uc, ur) = (u % cols, u / cols);
            for (mi, &(dc, dr)) in moves.iter().enumerate().skip(1) {
                let (vc, vr) = (uc as isize + dc, ur as isize + dr);
                if vc < 0 || vr < 0 || vc as usize >= cols || vr as usize >= rows {
                    continue;
                }
                let v = vr as usize * cols + vc as usize;
                if !step_free(u, mi) {
                    continue;
                }
                let w = pitch * ((dc * dc + dr * dr) as f64).sqrt();
                if d + w < dist[v] {
                    dist[v] = d + w;
                    heap.push(HeapEntry { dist: d + w, node: v as u32 });
                }
            }
        }
        return Ok(GridOptimum::Unreachable);
    }

    // k == 2: joint state space.
    let s1 = to_node(starts[0])?;
    let s2 = to_node(starts[1])?;
    let t1 = to_node(targets[0])?;
    let t2 = to_node(targets[1])?;
    let pos = |u: usize| gp(u % cols, u / cols);
    let pair_ok = |u1: usize, u2: usize| linf(pos(u1), pos(u2)) >= 2.0 - 1e-9;
    if !pair_ok(s1, s2) || !pair_ok(t1, t2) {
        return Err(Error::input("oracle endpoints are not a feasible pair".to_string()));
    }
    let enc = |u1: usize, u2: usize| (u1 * n + u2) as u32;
    let mut dist: HashMap<u32, f64> = HashMap::new();
    let mut heap = BinaryHeap::new();
    let start = enc(s1, s2);
    let goal = enc(t1, t2);
    dist.insert(start, 0.0);
    heap.push(HeapEntry { dist: 0.0, node: start });
    // Precompute per-robot step moves for speed.
    while let Some(HeapEntry { dist: d, node }) = heap.pop() {
        if d > dist[&node] + 1e-15 {
            continue;
        }
        if node == goal {
            return Ok(GridOptimum::Cost(d));
        }
        let u1 = node as usize / n;
        let u2 = node as usize % n;
        let (c1, r1) = (u1 % cols, u1 / cols);
        let (c2, r2) = (u2 % cols, u2 / cols);
        for (mi1, &(dc1, dr1)) in moves.iter().enumerate() {
            let (vc1, vr1) = (c1 as isize + dc1, r1 as isize + dr1);
            if vc1 < 0 || vr1 < 0 || vc1 as usize >= cols || vr1 as usize >= rows {
                continue;
            }
            let v1 = vr1 as usize * cols + vc1 as usize;
            if !step_free(u1, mi1) {
                continue;
            }
            for (mi2, &(dc2, dr2)) in moves.iter().enumerate() {
                if dc1 == 0 && dr1 == 0 && dc2 == 0 && dr2 == 0 {
                    continue;
                }
                let (vc2, vr2) = (c2 as isize + dc2, r2 as isize + dr2);
                if vc2 < 0 || vr2 < 0 || vc2 as usize >= cols || vr2 as usize >= rows {
                    continue;
                }
                let v2 = vr2 as usize * cols + vc2 as usize;
                if !step_free(u2, mi2) {
                    continue;
                }
                // exact pairwise feasibility along the joint step
                let pa = pos(u1);
                let pb = pos(u2);
                let qa = pos(v1);
                let qb = pos(v2);
                if min_linf_linear(pa.x - pb.x, pa.y - pb.y, qa.x - qb.x, qa.y - qb.y) < 2.0 - 1e-9 {
                    continue;
                }
                let w = pitch
                    * (((dc1 * dc1 + dr1 * dr1) as f64).sqrt()
                        + ((dc2 * dc2 + dr2 * dr2) as f64).sqrt());
                let v = enc(v1, v2);
                let nd = d + w;
                if nd < *dist.get(&v).unwrap_or(&f64::INFINITY) - 1e-15 {
                    dist.insert(v, nd);
                    heap.push(HeapEntry { dist: nd, node: v });
                }
            }
        }
    }
    Ok(GridOptimum::Unreachable)
}
