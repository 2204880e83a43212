//! Regularized boolean operations on polygonal regions, backed by `i_overlay`.
//!
//! Results are closed regularized sets (the closure of the interior), which
//! matches the interpretation of free spaces as closed regions.

use i_overlay::core::fill_rule::FillRule;
use i_overlay::core::overlay_rule::OverlayRule;
use i_overlay::float::single::SingleFloatOverlay;

use crate::geom::{Face, Point, PolygonalRegion, Ring, Tolerance};

type Path = Vec<[f64; 2]>;
type Shapes = Vec<Vec<Path>>;

fn ring_to_path(r: &Ring) -> Path {
    r.points().iter().map(|p| [p.x, p.y]).collect()
}

/// Flattens a region into overlay paths. Orientation is already normalized
/// (outer CCW, holes CW), which is what the non-zero fill rule expects.
fn region_to_paths(region: &PolygonalRegion) -> Vec<Path> {
    region.rings().map(ring_to_path).collect()
}

fn shapes_to_region(shapes: Shapes, tol: Tolerance) -> PolygonalRegion {
    let mut faces = Vec::new();
    for shape in shapes {
        let mut rings = shape.into_iter().filter_map(|path| {
            if path.len() < 3 {
                return None;
            }
            let ring = Ring::new_unchecked(path.into_iter().map(|[x, y]| Point::new(x, y)).collect());
            let ring = ring.simplified(tol);
            if ring.len() < 3 || ring.signed_area2().abs() < 1e-18 {
                return None;
            }
            Some(ring)
        });
        let Some(outer) = rings.next() else { continue };
        let holes: Vec<Ring> = rings.collect();
        faces.push(Face { outer, holes });
    }
    PolygonalRegion::new(faces)
}

fn overlay(a: &PolygonalRegion, b: &PolygonalRegion, rule: OverlayRule, tol: Tolerance) -> PolygonalRegion {
    let subj = region_to_paths(a);
    let clip = region_to_paths(b);
    let shapes = subj.overlay(&clip, rule, FillRule::NonZero);
    shapes_to_region(shapes, tol)
}

pub fn intersect(a: &PolygonalRegion, b: &PolygonalRegion, tol: Tolerance) -> PolygonalRegion {
    if a.is_empty() || b.is_empty() {
        return PolygonalRegion::empty();
    }
    overlay(a, b, OverlayRule::Intersect, tol)
}

pub fn difference(a: &PolygonalRegion, b: &PolygonalRegion, tol: Tolerance) -> PolygonalRegion {
    if a.is_empty() {
        return PolygonalRegion::empty();
    }
    if b.is_empty() {
        return a.clone();
    }
    overlay(a, b, OverlayRule::Difference, tol)
}

pub fn union(a: &PolygonalRegion, b: &PolygonalRegion, tol: Tolerance) -> PolygonalRegion {
    if a.is_empty() {
        return b.clone();
    }
    if b.is_empty() {
        return a.clone();
    }
    overlay(a, b, OverlayRule::Union, tol)
}

/// Union of many convex pieces in a single overlay pass.
pub fn union_all(pieces: &[Ring], tol: Tolerance) -> PolygonalRegion {
    if pieces.is_empty() {
        return PolygonalRegion::empty();
    }
    let mut paths: Vec<Path> = Vec::with_capacity(pieces.len());
    for r in pieces {
        let mut r = r.clone();
        if !r.is_ccw() {
            r.reverse();
        }
        paths.push(ring_to_path(&r));
    }
    let empty: Vec<Path> = Vec::new();
    let shapes = paths.overlay(&empty, OverlayRule::Subject, FillRule::NonZero);
    shapes_to_region(shapes, tol)
}

/// Subtracts a batch of CCW pieces from `a` in one overlay pass.
pub fn difference_all(a: &PolygonalRegion, pieces: &[Ring], tol: Tolerance) -> PolygonalRegion {
    if a.is_empty() {
        return PolygonalRegion::empty();
    }
    if pieces.is_empty() {
        return a.clone();
    }
    let subj = region_to_paths(a);
    let mut clip: Vec<Path> = Vec::with_capacity(pieces.len());
    for r in pieces {
        let mut r = r.clone();
        if !r.is_ccw() {
            r.reverse();
        }
        clip.push(ring_to_path(&r));
    }
    let shapes = subj.overlay(&clip, OverlayRule::Difference, FillRule::NonZero);
    shapes_to_region(shapes, tol)
}
