//! Feasibility predicates on configurations and straight-line joint motions,
//! plus order types and the geodesic sufficient condition.

use crate::error::Error;
use crate::freespace::FreeSpace;
use crate::geom::{linf_dist, segment_avoids_open_square, Point, Segment, Tolerance};

/// A k-tuple of placements.
#[derive(Clone, Debug, PartialEq)]
pub struct Configuration {
    placements: Vec<Point>,
}

impl Configuration {
    pub fn new(placements: Vec<Point>) -> Self {
        Configuration { placements }
    }

    pub fn len(&self) -> usize {
        self.placements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.placements.is_empty()
    }

    pub fn placements(&self) -> &[Point] {
        &self.placements
    }

    pub fn lerp(&self, other: &Configuration, t: f64) -> Configuration {
        Configuration {
            placements: self
                .placements
                .iter()
                .zip(&other.placements)
                .map(|(a, b)| a.lerp(*b, t))
                .collect(),
        }
    }
}

/// Which axes separate a pair of placements by at least 2.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PairDirections {
    pub x: bool,
    pub y: bool,
}

/// Per-pair separation directions for a configuration; entry for pair (i, j),
/// i < j, is at index `pair_index(i, j, k)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderType {
    k: usize,
    pairs: Vec<PairDirections>,
}

pub fn pair_index(i: usize, j: usize, k: usize) -> usize {
    debug_assert!(i < j && j < k);
    i * k - i * (i + 1) / 2 + (j - i - 1)
}

impl OrderType {
    pub fn pair(&self, i: usize, j: usize) -> PairDirections {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        self.pairs[pair_index(i, j, self.k)]
    }

    pub fn pairs(&self) -> &[PairDirections] {
        &self.pairs
    }
}

/// Free configuration test: every placement in the free space (closed) and
/// every pair at ℓ∞ distance at least 2 (touching allowed).
pub fn config_feasible(c: &Configuration, f: &FreeSpace, tol: Tolerance) -> bool {
    let k = c.len();
    for p in c.placements() {
        if !f.region.contains_point(*p, tol) {
            return false;
        }
    }
    for i in 0..k {
        for j in (i + 1)..k {
            if linf_dist(c.placements()[i], c.placements()[j]) < 2.0 - tol.eta {
                return false;
            }
        }
    }
    true
}

/// The order type of a feasible configuration: per pair, which axes separate
/// the placements by at least 2. Infeasible configurations are rejected.
pub fn order_types(c: &Configuration, tol: Tolerance) -> Result<OrderType, Error> {
    let k = c.len();
    let mut pairs = Vec::with_capacity(k * (k - 1) / 2);
    for i in 0..k {
        for j in (i + 1)..k {
            let a = c.placements()[i];
            let b = c.placements()[j];
            let dirs = PairDirections {
                x: (a.x - b.x).abs() >= 2.0 - tol.eta,
                y: (a.y - b.y).abs() >= 2.0 - tol.eta,
            };
            if !dirs.x && !dirs.y {
                return Err(Error::precondition(format!(
                    "configuration is infeasible: robots {i} and {j} are separated by only {}",
                    linf_dist(a, b)
                )));
            }
            pairs.push(dirs);
        }
    }
    Ok(OrderType { k, pairs })
}

/// Exact edge predicate: the straight joint segment from `a` to `b` stays in
/// the 2k-dimensional free space. Per robot the leg must stay in `f`; per pair
/// the relative-displacement segment must avoid the open square of radius 2.
pub fn motion_feasible(a: &Configuration, b: &Configuration, f: &FreeSpace, tol: Tolerance) -> bool {
    let k = a.len();
    debug_assert_eq!(k, b.len());
    for i in 0..k {
        for j in (i + 1)..k {
            if !pair_motion_feasible(
                a.placements()[i],
                a.placements()[j],
                b.placements()[i],
                b.placements()[j],
                tol,
            ) {
                return false;
            }
        }
    }
    for i in 0..k {
        let leg = Segment::new(a.placements()[i], b.placements()[i]);
        if !f.region.contains_segment(&leg, tol) {
            return false;
        }
    }
    true
}

/// Pairwise part of the edge predicate on the relative-displacement segment.
pub fn pair_motion_feasible(ai: Point, aj: Point, bi: Point, bj: Point, tol: Tolerance) -> bool {
    let rel = Segment::new(ai.sub(aj), bi.sub(bj));
    segment_avoids_open_square(&rel, Point::new(0.0, 0.0), 2.0, tol)
}

/// Sufficient condition for the straight-line joint motion to be feasible:
/// each robot's segment stays in `f`, and every pair shares a separating axis
/// with the same sign of the coordinate difference at both endpoints. Implies
/// `motion_feasible`.
pub fn geodesic_condition(a: &Configuration, b: &Configuration, f: &FreeSpace, tol: Tolerance) -> bool {
    if !pairs_share_signed_direction(a, b, tol) {
        return false;
    }
    for i in 0..a.len() {
        let leg = Segment::new(a.placements()[i], b.placements()[i]);
        if !f.region.contains_segment(&leg, tol) {
            return false;
        }
    }
    true
}

/// Order-type matching with sign persistence: for every pair there is an axis
/// on which both endpoint configurations are separated by at least 2 with the
/// same sign. This is what makes the linear interpolation collision-free.
pub fn pairs_share_signed_direction(a: &Configuration, b: &Configuration, tol: Tolerance) -> bool {
    let k = a.len();
    for i in 0..k {
        for j in (i + 1)..k {
            let dxa = a.placements()[i].x - a.placements()[j].x;
            let dxb = b.placements()[i].x - b.placements()[j].x;
            let dya = a.placements()[i].y - a.placements()[j].y;
            let dyb = b.placements()[i].y - b.placements()[j].y;
            let thr = 2.0 - tol.eta;
            let x_ok = dxa.abs() >= thr && dxb.abs() >= thr && dxa * dxb > 0.0;
            let y_ok = dya.abs() >= thr && dyb.abs() >= thr && dya * dyb > 0.0;
            if !x_ok && !y_ok {
                return false;
            }
        }
    }
    true
}
