//! Breakpoint reduction for robust plans: per-epoch snapped free spaces,
//! their vertical decompositions, and order-type shortcutting that never
//! increases cost.
//!
//! The shortcut loop walks the input plan's timeline. Each epoch anchors a
//! unit square at every robot's current placement and snaps the free space
//! inside each square to a coarse grid region F* sandwiched between
//! F_ρ ∩ □ and F ∩ □. Within an epoch, the latest plan time whose
//! configuration sits in the same vertical-decomposition cells with a
//! sign-compatible order type is shortcut to with one straight joint leg.

use crate::clip;
use crate::error::Error;
use crate::freespace::FreeSpace;
use crate::geom::{
    linf_dist, region_contains_rect, segment_avoids_open_square, segment_intersection_params,
    Point, PolygonalRegion, Ring, Segment, Tolerance,
};
use crate::kinematics::{pairs_share_signed_direction, Configuration};
use crate::plan::Plan;

/// One convex cell of a vertical decomposition: an x-slab bounded below and
/// above by lines y = m·x + b.
#[derive(Clone, Copy, Debug)]
pub struct TrapCell {
    pub x_left: f64,
    pub x_right: f64,
    pub bottom: (f64, f64),
    pub top: (f64, f64),
}

impl TrapCell {
    pub fn contains(&self, p: Point, tol: Tolerance) -> bool {
        if p.x < self.x_left - tol.eta || p.x > self.x_right + tol.eta {
            return false;
        }
        let lo = self.bottom.0 * p.x + self.bottom.1;
        let hi = self.top.0 * p.x + self.top.1;
        p.y >= lo - tol.eta && p.y <= hi + tol.eta
    }
}

/// The simplified free space F* inside one robot's anchor square, with its
/// vertical decomposition.
#[derive(Clone, Debug)]
pub struct SnappedFreeSpace {
    pub robot: usize,
    pub anchor: Point,
    pub rho: f64,
    pub region: PolygonalRegion,
    pub cells: Vec<TrapCell>,
    /// Vertices of the snapped boundary curve P* strictly inside the anchor
    /// square (the curve standing in for ∂F; square corners excluded).
    pub interior_vertices: Vec<Point>,
}

impl SnappedFreeSpace {
    /// Index of the cell containing `p`, breaking boundary ties toward the
    /// cell next entered along `dir` (lowest index as the final tie rule).
    pub fn locate(&self, p: Point, dir: Point, tol: Tolerance) -> Option<usize> {
        let hits: Vec<usize> = (0..self.cells.len())
            .filter(|&i| self.cells[i].contains(p, tol))
            .collect();
        match hits.len() {
            0 => None,
            1 => Some(hits[0]),
            _ => {
                let step = (16.0 * tol.eta).max(1e-9);
                let probe = Point::new(p.x + dir.x * step, p.y + dir.y * step);
                hits.iter()
                    .copied()
                    .find(|&i| self.cells[i].contains(probe, tol))
                    .or(Some(hits[0]))
            }
        }
    }
}

/// Snaps the free space inside the unit square anchored at `anchor` onto a
/// grid-aligned region sandwiched between F_ρ ∩ □ and F ∩ □: the union of
/// grid cells meeting the robust core. Cell pitch is ρ/2 when that fits the
/// 2/ρ complexity budget, else ρ (a pitch above ρ would break the sandwich).
pub fn snap_freespace(
    f: &FreeSpace,
    f_rho: &FreeSpace,
    anchor: Point,
    rho: f64,
    tol: Tolerance,
) -> Result<SnappedFreeSpace, Error> {
    if !(rho > 0.0) {
        return Err(Error::input(format!("rho must be > 0, got {rho}")));
    }
    if !f.region.contains_point(anchor, tol) {
        return Err(Error::OutsideFreeSpace { x: anchor.x, y: anchor.y });
    }
    let lo = Point::new(anchor.x - 1.0, anchor.y - 1.0);
    let hi = Point::new(anchor.x + 1.0, anchor.y + 1.0);
    let square_ring = Ring::new_unchecked(vec![
        Point::new(lo.x, lo.y),
        Point::new(hi.x, lo.y),
        Point::new(hi.x, hi.y),
        Point::new(lo.x, hi.y),
    ]);

    // Identity fast path: the whole anchor square is free, nothing to snap.
    if region_contains_rect(&f.region, lo, hi, tol) {
        let region = PolygonalRegion::from_ring(square_ring);
        let cells = vertical_decomposition_region(&region, tol);
        return Ok(SnappedFreeSpace {
            robot: 0,
            anchor,
            rho,
            region,
            cells,
            interior_vertices: Vec::new(),
        });
    }

    let square_region = PolygonalRegion::from_ring(square_ring);
    let core = clip::intersect(&f_rho.region, &square_region, tol);
    if core.is_empty() {
        return Ok(SnappedFreeSpace {
            robot: 0,
            anchor,
            rho,
            region: PolygonalRegion::empty(),
            cells: Vec::new(),
            interior_vertices: Vec::new(),
        });
    }

    let budget = (2.0 / rho).ceil().max(1.0) as usize;
    for pitch in [0.5 * rho, rho] {
        let cells = grid_cells_meeting(&core, lo, hi, pitch, tol);
        let merged = merge_cell_columns(&cells, tol);
        if merged.len() <= budget || pitch >= rho {
            let rects: Vec<Ring> = merged
                .iter()
                .map(|c| {
                    Ring::new_unchecked(vec![
                        Point::new(c.x_left, c.bottom.1),
                        Point::new(c.x_right, c.bottom.1),
                        Point::new(c.x_right, c.top.1),
                        Point::new(c.x_left, c.top.1),
                    ])
                })
                .collect();
            let region = clip::union_all(&rects, tol);
            let interior_vertices = region
                .vertices()
                .filter(|p| {
                    p.x > lo.x + tol.eta
                        && p.x < hi.x - tol.eta
                        && p.y > lo.y + tol.eta
                        && p.y < hi.y - tol.eta
                })
                .collect();
            return Ok(SnappedFreeSpace {
                robot: 0,
                anchor,
                rho,
                region,
                cells: merged,
                interior_vertices,
            });
        }
    }
    unreachable!("the rho-pitch pass always returns");
}

/// Grid cells (pitch-aligned to the square's corner, clipped to the square)
/// that intersect the robust core, grouped into maximal vertical runs.
fn grid_cells_meeting(
    core: &PolygonalRegion,
    lo: Point,
    hi: Point,
    pitch: f64,
    tol: Tolerance,
) -> Vec<TrapCell> {
    let cols = ((hi.x - lo.x) / pitch).ceil() as usize;
    let rows = ((hi.y - lo.y) / pitch).ceil() as usize;
    let mut out = Vec::new();
    for c in 0..cols {
        let x0 = lo.x + c as f64 * pitch;
        let x1 = (x0 + pitch).min(hi.x);
        let mut run_start: Option<usize> = None;
        for r in 0..=rows {
            let marked = r < rows && {
                let y0 = lo.y + r as f64 * pitch;
                let y1 = (y0 + pitch).min(hi.y);
                rect_meets_region(core, Point::new(x0, y0), Point::new(x1, y1), tol)
            };
            match (marked, run_start) {
                (true, None) => run_start = Some(r),
                (false, Some(start)) => {
                    let y0 = lo.y + start as f64 * pitch;
                    let y1 = (lo.y + r as f64 * pitch).min(hi.y);
                    out.push(TrapCell { x_left: x0, x_right: x1, bottom: (0.0, y0), top: (0.0, y1) });
                    run_start = None;
                }
                _ => {}
            }
        }
    }
    out
}

fn rect_meets_region(region: &PolygonalRegion, lo: Point, hi: Point, tol: Tolerance) -> bool {
    let corners = [
        Point::new(lo.x, lo.y),
        Point::new(hi.x, lo.y),
        Point::new(hi.x, hi.y),
        Point::new(lo.x, hi.y),
    ];
    let center = Point::new(0.5 * (lo.x + hi.x), 0.5 * (lo.y + hi.y));
    for c in corners.iter().chain(std::iter::once(&center)) {
        if region.contains_point(*c, tol) {
            return true;
        }
    }
    for v in region.vertices() {
        if v.x >= lo.x - tol.eta && v.x <= hi.x + tol.eta && v.y >= lo.y - tol.eta && v.y <= hi.y + tol.eta
        {
            return true;
        }
    }
    let rect_edges = [
        Segment::new(corners[0], corners[1]),
        Segment::new(corners[1], corners[2]),
        Segment::new(corners[2], corners[3]),
        Segment::new(corners[3], corners[0]),
    ];
    for ring in region.rings() {
        for e in ring.segments() {
            for re in &rect_edges {
                let mut params = Vec::new();
                segment_intersection_params(re, &e, &mut params);
                if !params.is_empty() {
                    return true;
                }
            }
        }
    }
    false
}

/// Merges horizontally adjacent axis-aligned cells with identical y-intervals.
fn merge_cell_columns(cells: &[TrapCell], tol: Tolerance) -> Vec<TrapCell> {
    let mut merged: Vec<TrapCell> = Vec::new();
    for cell in cells {
        if let Some(last) = merged.last_mut() {
            if (last.x_right - cell.x_left).abs() <= tol.eta
                && (last.bottom.1 - cell.bottom.1).abs() <= tol.eta
                && (last.top.1 - cell.top.1).abs() <= tol.eta
            {
                last.x_right = cell.x_right;
                continue;
            }
        }
        merged.push(*cell);
    }
    merged
}

/// Vertical decomposition of a snapped free space (already column-structured).
pub fn vertical_decomposition(sfs: &SnappedFreeSpace) -> Vec<TrapCell> {
    sfs.cells.clone()
}

/// Slab decomposition of an arbitrary polygonal region: vertical walls
/// through every vertex, one trapezoid per free interval, adjacent slabs
/// merged when their supporting lines agree.
pub fn vertical_decomposition_region(region: &PolygonalRegion, tol: Tolerance) -> Vec<TrapCell> {
    let mut xs: Vec<f64> = region.vertices().map(|p| p.x).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup_by(|a, b| (*a - *b).abs() <= tol.eta);
    if xs.len() < 2 {
        return Vec::new();
    }
    // (cell index, bottom line, top line) per interval of the previous slab
    type SlabEntry = (usize, (f64, f64), (f64, f64));
    let mut cells: Vec<TrapCell> = Vec::new();
    let mut prev_slab: Vec<SlabEntry> = Vec::new();
    for w in xs.windows(2) {
        let (x0, x1) = (w[0], w[1]);
        if x1 - x0 <= tol.eta {
            continue;
        }
        let xm = 0.5 * (x0 + x1);
        let mut lines: Vec<(f64, f64)> = Vec::new();
        for ring in region.rings() {
            for e in ring.segments() {
                let (ex0, ex1) = if e.a.x <= e.b.x { (e.a.x, e.b.x) } else { (e.b.x, e.a.x) };
                if ex0 <= x0 + tol.eta && ex1 >= x1 - tol.eta && (e.b.x - e.a.x).abs() > tol.eta {
                    let m = (e.b.y - e.a.y) / (e.b.x - e.a.x);
                    let b = e.a.y - m * e.a.x;
                    lines.push((m, b));
                }
            }
        }
        lines.sort_by(|a, b| (a.0 * xm + a.1).total_cmp(&(b.0 * xm + b.1)));
        let mut new_slab: Vec<SlabEntry> = Vec::new();
        let mut i = 0;
        while i + 1 < lines.len() {
            let bottom = lines[i];
            let top = lines[i + 1];
            let ymid = 0.5 * ((bottom.0 * xm + bottom.1) + (top.0 * xm + top.1));
            if !region.contains_point(Point::new(xm, ymid), tol) {
                i += 1;
                continue;
            }
            i += 2;
            let same_line = |a: (f64, f64), b: (f64, f64)| {
                (a.0 - b.0).abs() <= 1e-9 && (a.1 - b.1).abs() <= 1e-9 * (1.0 + a.1.abs().max(b.1.abs()))
            };
            let merge_target = prev_slab
                .iter()
                .find(|(ci, pb, pt_)| {
                    same_line(*pb, bottom) && same_line(*pt_, top) && (cells[*ci].x_right - x0).abs() <= tol.eta
                })
                .map(|(ci, _, _)| *ci);
            if let Some(ci) = merge_target {
                cells[ci].x_right = x1;
                new_slab.push((ci, bottom, top));
            } else {
                cells.push(TrapCell { x_left: x0, x_right: x1, bottom, top });
                new_slab.push((cells.len() - 1, bottom, top));
            }
        }
        prev_slab = new_slab;
    }
    cells
}

/// Parameter position along a piecewise-linear plan.
#[derive(Clone, Copy, Debug, PartialEq)]
struct TimePos {
    leg: usize,
    t: f64,
}

impl TimePos {
    fn key(&self) -> f64 {
        self.leg as f64 + self.t
    }
}

fn config_at(plan: &Plan, pos: TimePos) -> Configuration {
    let a = &plan.breakpoints()[pos.leg];
    let b = &plan.breakpoints()[(pos.leg + 1).min(plan.breakpoint_count() - 1)];
    a.lerp(b, pos.t)
}

/// Epoch-and-order-type shortcutting. The input must be ρ-robust (feasible at
/// radius 1+ρ); the output is feasible at radius 1, never costlier, keeps the
/// endpoints, and respects the breakpoint budget 2^k (2/ρ)^k (cost+1).
/// Internally iterates passes to a fixpoint, so a second application cannot
/// reduce the breakpoint count further.
pub fn shortcut(
    plan: &Plan,
    f: &FreeSpace,
    f_rho: &FreeSpace,
    rho: f64,
    tol: Tolerance,
) -> Result<Plan, Error> {
    check_robust(plan, f_rho, rho, tol)?;
    let mut current = plan.clone();
    for _ in 0..8 {
        let next = shortcut_pass(&current, f, f_rho, rho, tol)?;
        if next.breakpoint_count() >= current.breakpoint_count() {
            return Ok(current);
        }
        current = next;
    }
    Ok(current)
}

fn check_robust(plan: &Plan, f_rho: &FreeSpace, rho: f64, tol: Tolerance) -> Result<(), Error> {
    let k = plan.k();
    let sep = 2.0 * (1.0 + rho);
    let mut violations = 0usize;
    let mut first_leg = usize::MAX;
    for (leg, (a, b)) in plan.legs().enumerate() {
        let mut bad = false;
        for i in 0..k {
            let s = Segment::new(a.placements()[i], b.placements()[i]);
            if !f_rho.region.contains_segment(&s, tol) {
                bad = true;
            }
        }
        for i in 0..k {
            for j in (i + 1)..k {
                let rel = Segment::new(
                    a.placements()[i].sub(a.placements()[j]),
                    b.placements()[i].sub(b.placements()[j]),
                );
                if !segment_avoids_open_square(&rel, Point::new(0.0, 0.0), sep, tol) {
                    bad = true;
                }
            }
        }
        if bad {
            violations += 1;
            first_leg = first_leg.min(leg);
        }
    }
    if violations > 0 {
        return Err(Error::NotRobust { rho, violations, first_leg });
    }
    Ok(())
}

fn shortcut_pass(
    plan: &Plan,
    f: &FreeSpace,
    f_rho: &FreeSpace,
    rho: f64,
    tol: Tolerance,
) -> Result<Plan, Error> {
    let k = plan.k();
    let legs = plan.breakpoint_count() - 1;
    let end = TimePos { leg: legs - 1, t: 1.0 };
    let mut out: Vec<Configuration> = vec![plan.start().clone()];
    let mut pos = TimePos { leg: 0, t: 0.0 };
    let mut epoch = Epoch::start(plan, pos, f, f_rho, rho, tol)?;

    loop {
        if pos.key() >= end.key() - 1e-12 {
            break;
        }
        let curr = config_at(plan, pos);
        let mut tau: Vec<Option<usize>> = Vec::with_capacity(k);
        for i in 0..k {
            let dir = leg_direction(plan, pos, i);
            tau.push(epoch.spaces[i].locate(curr.placements()[i], dir, tol));
        }
        let shortcut_to = if tau.iter().all(|t| t.is_some()) {
            find_lambda_theta(plan, pos, end, &curr, &tau, &epoch, tol)
        } else {
            None
        };
        match shortcut_to {
            Some(later) => {
                push_config(&mut out, config_at(plan, later));
                pos = later;
            }
            None => {
                let next = if pos.t < 1.0 - 1e-12 {
                    TimePos { leg: pos.leg, t: 1.0 }
                } else {
                    TimePos { leg: pos.leg + 1, t: 1.0 }
                };
                let cfg = config_at(plan, next);
                push_config(&mut out, cfg.clone());
                pos = next;
                if pos.key() >= end.key() - 1e-12 {
                    break;
                }
                let outside = (0..k).any(|i| {
                    linf_dist(cfg.placements()[i], epoch.anchor.placements()[i]) > 1.0 + tol.eta
                });
                if outside {
                    pos = normalize_pos(pos, legs);
                    epoch = Epoch::start(plan, pos, f, f_rho, rho, tol)?;
                }
            }
        }
        pos = normalize_pos(pos, legs);
    }
    push_config(&mut out, plan.end().clone());
    if out.len() < 2 {
        out.push(plan.end().clone());
    }
    Plan::new(out)
}

fn normalize_pos(pos: TimePos, legs: usize) -> TimePos {
    if pos.t >= 1.0 - 1e-12 && pos.leg + 1 < legs {
        TimePos { leg: pos.leg + 1, t: 0.0 }
    } else {
        pos
    }
}

fn leg_direction(plan: &Plan, pos: TimePos, robot: usize) -> Point {
    let a = &plan.breakpoints()[pos.leg];
    let b = &plan.breakpoints()[(pos.leg + 1).min(plan.breakpoint_count() - 1)];
    let d = b.placements()[robot].sub(a.placements()[robot]);
    let n = d.x.abs().max(d.y.abs());
    if n <= 0.0 {
        Point::new(0.0, 0.0)
    } else {
        Point::new(d.x / n, d.y / n)
    }
}

/// Per-epoch state: the anchor configuration and each robot's snapped free
/// space. Anchor squares stay fixed until some robot leaves its square.
struct Epoch {
    anchor: Configuration,
    spaces: Vec<SnappedFreeSpace>,
}

impl Epoch {
    fn start(
        plan: &Plan,
        pos: TimePos,
        f: &FreeSpace,
        f_rho: &FreeSpace,
        rho: f64,
        tol: Tolerance,
    ) -> Result<Epoch, Error> {
        let anchor = config_at(plan, pos);
        let mut spaces = Vec::with_capacity(anchor.len());
        for (i, p) in anchor.placements().iter().enumerate() {
            let mut sfs = snap_freespace(f, f_rho, *p, rho, tol)?;
            sfs.robot = i;
            spaces.push(sfs);
        }
        Ok(Epoch { anchor, spaces })
    }
}

/// The maximal later time (up to `end`) whose configuration sits in the same
/// VD cells and shares a same-signed separating direction per pair with the
/// current configuration. Candidate times are breakpoints, cell-wall
/// crossings, and pair-separation threshold crossings.
fn find_lambda_theta(
    plan: &Plan,
    pos: TimePos,
    end: TimePos,
    curr: &Configuration,
    tau: &[Option<usize>],
    epoch: &Epoch,
    tol: Tolerance,
) -> Option<TimePos> {
    let k = plan.k();
    let mut candidates: Vec<TimePos> = Vec::new();
    for leg in pos.leg..=end.leg {
        let a = &plan.breakpoints()[leg];
        let b = &plan.breakpoints()[leg + 1];
        let t_lo = if leg == pos.leg { pos.t } else { 0.0 };
        candidates.push(TimePos { leg, t: 1.0 });
        for (i, slot) in tau.iter().enumerate() {
            let ai = a.placements()[i];
            let bi = b.placements()[i];
            let Some(ci) = *slot else { continue };
            let c = &epoch.spaces[i].cells[ci];
            for t in [
                line_cross_t(ai.x, bi.x, c.x_left),
                line_cross_t(ai.x, bi.x, c.x_right),
                affine_cross_t(ai, bi, c.bottom),
                affine_cross_t(ai, bi, c.top),
            ]
            .into_iter()
            .flatten()
            {
                if t > t_lo + 1e-12 && t < 1.0 {
                    candidates.push(TimePos { leg, t });
                }
            }
        }
        for i in 0..k {
            for j in (i + 1)..k {
                let dx0 = a.placements()[i].x - a.placements()[j].x;
                let dx1 = b.placements()[i].x - b.placements()[j].x;
                let dy0 = a.placements()[i].y - a.placements()[j].y;
                let dy1 = b.placements()[i].y - b.placements()[j].y;
                for thr in [2.0, -2.0] {
                    for t in [cross_value_t(dx0, dx1, thr), cross_value_t(dy0, dy1, thr)]
                        .into_iter()
                        .flatten()
                    {
                        if t > t_lo + 1e-12 && t < 1.0 {
                            candidates.push(TimePos { leg, t });
                        }
                    }
                }
            }
        }
    }
    candidates.retain(|c| c.key() > pos.key() + 1e-9 && c.key() <= end.key() + 1e-12);
    candidates.sort_by(|a, b| b.key().total_cmp(&a.key()));
    candidates.dedup_by(|a, b| (a.key() - b.key()).abs() < 1e-12);
    for cand in candidates {
        let cfg = config_at(plan, cand);
        let in_cells = (0..k).all(|i| {
            tau[i].is_some_and(|ci| epoch.spaces[i].cells[ci].contains(cfg.placements()[i], tol))
        });
        if in_cells && pairs_share_signed_direction(curr, &cfg, tol) {
            return Some(cand);
        }
    }
    None
}

fn line_cross_t(a: f64, b: f64, wall: f64) -> Option<f64> {
    let d = b - a;
    if d.abs() < 1e-15 {
        return None;
    }
    Some((wall - a) / d)
}

fn affine_cross_t(a: Point, b: Point, line: (f64, f64)) -> Option<f64> {
    let (m, c) = line;
    let num = a.y - (m * a.x + c);
    let den = (a.y - b.y) - m * (a.x - b.x);
    if den.abs() < 1e-15 {
        return None;
    }
    Some(num / den)
}

fn cross_value_t(v0: f64, v1: f64, thr: f64) -> Option<f64> {
    let d = v1 - v0;
    if d.abs() < 1e-15 {
        return None;
    }
    Some((thr - v0) / d)
}

fn push_config(out: &mut Vec<Configuration>, cfg: Configuration) {
    if let Some(last) = out.last() {
        let same = last
            .placements()
            .iter()
            .zip(cfg.placements())
            .all(|(a, b)| a.x == b.x && a.y == b.y);
        if same {
            return;
        }
    }
    out.push(cfg);
}

/// Pointwise sandwich check F_ρ ∩ □ ⊆ F* ⊆ F ∩ □ on a sample grid, with a
/// small band excused around region boundaries (raster tolerance).
pub fn sandwich_holds(
    sfs: &SnappedFreeSpace,
    f: &FreeSpace,
    f_rho: &FreeSpace,
    samples: usize,
    tol: Tolerance,
) -> bool {
    let lo = Point::new(sfs.anchor.x - 1.0, sfs.anchor.y - 1.0);
    let side = 2.0;
    let n = (samples as f64).sqrt().ceil() as usize;
    let band = 1e-6;
    for i in 0..n {
        for j in 0..n {
            let p = Point::new(
                lo.x + side * (i as f64 + 0.5) / n as f64,
                lo.y + side * (j as f64 + 0.5) / n as f64,
            );
            let in_core =
                f_rho.region.contains_point(p, tol) && f_rho.region.boundary_dist(p) > band;
            let in_star = sfs.region.contains_point(p, tol);
            if in_core && !in_star && sfs.region.boundary_dist(p) > band {
                return false;
            }
            let star_deep = in_star && sfs.region.boundary_dist(p) > band;
            if star_deep && !f.region.contains_point(p, tol) && f.region.boundary_dist(p) > band {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freespace::erode_with_tol;
    use crate::geom::{pt, PolygonalEnvironment};
    use crate::plan::{breakpoint_budget, cost, verify_against};

    fn room(side: f64) -> PolygonalEnvironment {
        PolygonalEnvironment::new(
            vec![pt(0.0, 0.0), pt(side, 0.0), pt(side, side), pt(0.0, side)],
            vec![],
        )
        .unwrap()
    }

    fn spaces(env: &PolygonalEnvironment, rho: f64) -> (FreeSpace, FreeSpace) {
        let tol = Tolerance::default();
        let f = erode_with_tol(env, 1.0, tol).unwrap();
        let f_rho = erode_with_tol(env, 1.0 + rho, tol).unwrap();
        (f, f_rho)
    }

    #[test]
    fn snap_identity_when_square_free() {
        let tol = Tolerance::default();
        let env = room(20.0);
        let (f, f_rho) = spaces(&env, 0.5);
        let sfs = snap_freespace(&f, &f_rho, pt(10.0, 10.0), 0.5, tol).unwrap();
        assert!((sfs.region.area() - 4.0).abs() < 1e-9);
        assert_eq!(sfs.cells.len(), 1);
        assert!(sfs.interior_vertices.is_empty());
    }

    #[test]
    fn snap_empty_core_is_well_defined() {
        let tol = Tolerance::default();
        let env = room(4.5);
        let (f, f_rho) = spaces(&env, 1.0);
        let sfs = snap_freespace(&f, &f_rho, pt(1.0, 1.0), 1.0, tol).unwrap();
        assert!(sandwich_holds(&sfs, &f, &f_rho, 900, tol));
    }

    #[test]
    fn snap_sandwich_near_wall() {
        let tol = Tolerance::default();
        let env = room(20.0);
        for rho in [0.25, 0.5, 1.0] {
            let (f, f_rho) = spaces(&env, rho);
            let anchor = pt(1.4, 10.0);
            let sfs = snap_freespace(&f, &f_rho, anchor, rho, tol).unwrap();
            assert!(sandwich_holds(&sfs, &f, &f_rho, 2500, tol), "rho={rho}");
            let budget = (2.0 / rho).ceil() as usize;
            assert!(
                sfs.cells.len() <= budget,
                "rho={rho}: {} cells over budget {budget}",
                sfs.cells.len()
            );
        }
    }

    #[test]
    fn snap_single_vertex_example() {
        // one reflex free-space vertex inside the band; snapped vertices land
        // on the rho/2 (or rho) grid and the sandwich holds
        let tol = Tolerance::default();
        let env = PolygonalEnvironment::new(
            vec![
                pt(0.0, 0.0),
                pt(20.0, 0.0),
                pt(20.0, 20.0),
                pt(10.13, 20.0),
                pt(10.13, 9.49),
                pt(0.0, 9.49),
            ],
            vec![],
        )
        .unwrap();
        let rho = 0.5;
        let (f, f_rho) = spaces(&env, rho);
        let anchor = pt(8.9, 8.2);
        assert!(f.region.contains_point(anchor, tol));
        let sfs = snap_freespace(&f, &f_rho, anchor, rho, tol).unwrap();
        assert!(sandwich_holds(&sfs, &f, &f_rho, 2500, tol));
        let lo = pt(anchor.x - 1.0, anchor.y - 1.0);
        for v in &sfs.interior_vertices {
            let on_grid = |coord: f64, origin: f64| {
                let fine = (coord - origin) / (rho / 2.0);
                let coarse = (coord - origin) / rho;
                (fine - fine.round()).abs() < 1e-6 || (coarse - coarse.round()).abs() < 1e-6
            };
            assert!(on_grid(v.x, lo.x) && on_grid(v.y, lo.y), "vertex {v:?} off-grid");
        }
    }

    #[test]
    fn vd_full_square_one_cell() {
        let tol = Tolerance::default();
        let region = crate::geom::square(pt(0.0, 0.0), 1.0).unwrap();
        let cells = vertical_decomposition_region(&region, tol);
        assert_eq!(cells.len(), 1);
    }

    #[test]
    fn vd_reflex_vertex_two_cells() {
        let tol = Tolerance::default();
        let region = PolygonalRegion::from_ring(Ring::new_unchecked(vec![
            pt(0.0, 0.0),
            pt(2.0, 0.0),
            pt(2.0, 1.2),
            pt(1.3, 1.2),
            pt(1.3, 2.0),
            pt(0.0, 2.0),
        ]));
        let cells = vertical_decomposition_region(&region, tol);
        assert_eq!(cells.len(), 2);
    }

    #[test]
    fn vd_cell_budget_random_anchors() {
        let tol = Tolerance::default();
        let env = room(20.0);
        let rho = 0.25;
        let (f, f_rho) = spaces(&env, rho);
        let mut seed = 42u64;
        let mut next = move || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (seed >> 11) as f64 / (1u64 << 53) as f64
        };
        let mut tried = 0;
        while tried < 20 {
            let anchor = pt(1.0 + next() * 18.0, 1.0 + next() * 18.0);
            if !f.region.contains_point(anchor, tol) {
                continue;
            }
            tried += 1;
            let sfs = snap_freespace(&f, &f_rho, anchor, rho, tol).unwrap();
            assert!(sfs.cells.len() <= 8, "rho = 0.25 allows at most 8 cells");
            assert!(sandwich_holds(&sfs, &f, &f_rho, 900, tol));
        }
    }

    fn straight_plan(points: &[(f64, f64)]) -> Plan {
        Plan::new(
            points
                .iter()
                .map(|(x, y)| Configuration::new(vec![pt(*x, *y)]))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn shortcut_identity_on_straight_leg() {
        let tol = Tolerance::default();
        let env = room(30.0);
        let (f, f_rho) = spaces(&env, 1.0);
        let p = straight_plan(&[(5.0, 5.0), (25.0, 25.0)]);
        let out = shortcut(&p, &f, &f_rho, 1.0, tol).unwrap();
        assert_eq!(out.breakpoint_count(), 2);
        assert_eq!(out.start(), p.start());
        assert_eq!(out.end(), p.end());
    }

    #[test]
    fn shortcut_collapses_zigzag_in_anchor_square() {
        let tol = Tolerance::default();
        let env = room(30.0);
        let (f, f_rho) = spaces(&env, 1.0);
        let p = straight_plan(&[
            (10.0, 10.0),
            (10.3, 10.4),
            (10.1, 10.6),
            (10.5, 10.2),
            (10.6, 10.6),
        ]);
        let out = shortcut(&p, &f, &f_rho, 1.0, tol).unwrap();
        assert_eq!(out.breakpoint_count(), 2, "zigzag inside one square collapses");
        assert!(cost(&out) < cost(&p));
    }

    #[test]
    fn shortcut_stationary_plan() {
        let tol = Tolerance::default();
        let env = room(30.0);
        let (f, f_rho) = spaces(&env, 1.0);
        let cfg = Configuration::new(vec![pt(10.0, 10.0)]);
        let p = Plan::new(vec![cfg.clone(), cfg.clone(), cfg.clone()]).unwrap();
        let out = shortcut(&p, &f, &f_rho, 1.0, tol).unwrap();
        assert_eq!(out.breakpoint_count(), 2);
        assert_eq!(cost(&out), 0.0);
    }

    #[test]
    fn shortcut_does_not_cut_through_a_hole() {
        let tol = Tolerance::default();
        let env = PolygonalEnvironment::new(
            vec![pt(0.0, 0.0), pt(30.0, 0.0), pt(30.0, 30.0), pt(0.0, 30.0)],
            vec![vec![pt(12.0, 12.0), pt(18.0, 12.0), pt(18.0, 18.0), pt(12.0, 18.0)]],
        )
        .unwrap();
        let rho = 1.0;
        let (f, f_rho) = spaces(&env, rho);
        // jittered walk around the dilated hole, staying in F_2 throughout
        let mut pts_list = Vec::new();
        let waypoints = [
            pt(6.0, 6.0),
            pt(15.0, 7.8),
            pt(22.3, 7.9),
            pt(23.9, 15.0),
            pt(22.2, 22.1),
            pt(15.0, 23.9),
        ];
        for w in waypoints.windows(2) {
            for s in 0..5 {
                let t = s as f64 / 5.0;
                let base = w[0].lerp(w[1], t);
                let wob = if s % 2 == 0 { 0.12 } else { -0.12 };
                pts_list.push(pt(base.x, base.y + wob));
            }
        }
        pts_list.push(waypoints[5]);
        let plan = Plan::new(pts_list.iter().map(|p| Configuration::new(vec![*p])).collect()).unwrap();
        let rep_in = verify_against(&plan, &f_rho, 1.0 + rho, tol);
        assert!(rep_in.feasible, "generator must produce a robust plan: {:?}", rep_in.violations);
        let out = shortcut(&plan, &f, &f_rho, rho, tol).unwrap();
        assert!(cost(&out) <= cost(&plan) + 1e-8);
        assert!(out.breakpoint_count() <= plan.breakpoint_count());
        let rep = verify_against(&out, &f, 1.0, tol);
        assert!(rep.feasible, "output must not cut the hole: {:?}", rep.violations);
    }

    #[test]
    fn shortcut_rejects_non_robust() {
        let tol = Tolerance::default();
        let env = room(10.0);
        let (f, f_rho) = spaces(&env, 1.0);
        // a placement 1.5 from the wall is in F but not in F_2
        let p = straight_plan(&[(1.5, 5.0), (5.0, 5.0)]);
        assert!(matches!(shortcut(&p, &f, &f_rho, 1.0, tol), Err(Error::NotRobust { .. })));
    }

    #[test]
    fn shortcut_contract_on_jittered_two_robot_plan() {
        let tol = Tolerance::default();
        let env = room(40.0);
        let rho = 1.0;
        let (f, f_rho) = spaces(&env, rho);
        let mut bps = Vec::new();
        let mut x = 5.0;
        let mut seed = 7u64;
        let mut next = move || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (seed >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..50 {
            let j1 = (next() - 0.5) * 0.5;
            let j2 = (next() - 0.5) * 0.5;
            bps.push(Configuration::new(vec![pt(x, 10.0 + j1), pt(x, 16.0 + j2)]));
            x += 0.25;
        }
        let plan = Plan::new(bps).unwrap();
        let input_cost = cost(&plan);
        let out = shortcut(&plan, &f, &f_rho, rho, tol).unwrap();
        let out_cost = cost(&out);
        assert!(out_cost <= input_cost + 1e-8, "cost must not increase");
        assert!(out.breakpoint_count() < plan.breakpoint_count());
        let budget = breakpoint_budget(2, rho, out_cost);
        assert!((out.breakpoint_count() as u64) <= budget);
        let rep = verify_against(&out, &f, 1.0, tol);
        assert!(rep.feasible, "{:?}", rep.violations);
        // band-separated robots keep the output robust, so a second
        // application goes through and is a no-op on the breakpoint count
        let again = shortcut(&out, &f, &f_rho, rho, tol).unwrap();
        assert_eq!(again.breakpoint_count(), out.breakpoint_count());
    }
}
