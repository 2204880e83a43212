//! Planner parameter derivation and grid sampling of the free space near
//! landmarks.

use std::collections::HashSet;

use crate::error::Error;
use crate::freespace::{FreeSpace, Landmarks};
use crate::geom::{Point, Tolerance};

/// Growth factor f(k, ρ) = 2^k · (2/ρ)^k from the breakpoint-bound analysis.
pub fn growth_factor(k: usize, rho: f64) -> f64 {
    2f64.powi(k as i32) * (2.0 / rho).powi(k as i32)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NeighborPolicy {
    /// All feasible vertices are neighbor candidates (no radius bound; this is
    /// the setting the approximation guarantee assumes).
    Full,
    /// Restrict to per-robot ℓ∞ moves of at most the given radius. Faster, but
    /// voids the approximation guarantee.
    Radius(f64),
}

/// Which practical caps fired while deriving parameters.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct OverridesUsed {
    pub pitch_floor_applied: bool,
    pub delta_overridden: bool,
    pub pitch_overridden: bool,
    pub pitch_clamped_to_delta: bool,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Overrides {
    /// The constant C in Δ = C·k²/ε.
    pub delta_constant: Option<f64>,
    /// Explicit Δ, replacing the formula.
    pub delta: Option<f64>,
    /// Explicit grid pitch, replacing the formula and the floor.
    pub pitch: Option<f64>,
    /// Lower cap for the derived pitch (default 0.05 workspace units).
    pub pitch_floor: Option<f64>,
    /// Robustness parameter ρ (defaults to ε).
    pub rho: Option<f64>,
    pub tolerance: Option<f64>,
    pub neighbor_policy: Option<NeighborPolicy>,
}

#[derive(Clone, Copy, Debug)]
pub struct PlannerParams {
    pub k: usize,
    pub epsilon: f64,
    pub rho: f64,
    pub delta: f64,
    /// Grid spacing ε̄ actually used for sampling.
    pub pitch: f64,
    /// The uncapped ε̄ = ε / (f(k,ε)·√2·k) from the analysis.
    pub pitch_derived: f64,
    pub tol: Tolerance,
    pub neighbor_policy: NeighborPolicy,
    pub overrides_used: OverridesUsed,
}

pub const DEFAULT_PITCH_FLOOR: f64 = 0.05;

/// Derives Δ and the sampling pitch from (k, ε), applying the practical pitch
/// floor. The theoretical pitch is astronomically small for most inputs; the
/// floor keeps the tool usable and is recorded in `overrides_used`.
pub fn derive_params(k: usize, epsilon: f64, overrides: &Overrides) -> Result<PlannerParams, Error> {
    if k < 1 {
        return Err(Error::input("k must be at least 1".to_string()));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::input(format!("epsilon must lie in (0, 1), got {epsilon}")));
    }
    let rho = overrides.rho.unwrap_or(epsilon);
    if !(rho > 0.0) {
        return Err(Error::input(format!("rho must be > 0, got {rho}")));
    }
    let tol = match overrides.tolerance {
        Some(eta) => Tolerance::new(eta)?,
        None => Tolerance::default(),
    };
    let mut used = OverridesUsed::default();

    let c = overrides.delta_constant.unwrap_or(1.0);
    let delta = match overrides.delta {
        Some(d) => {
            used.delta_overridden = true;
            d
        }
        None => c * (k * k) as f64 / epsilon,
    };
    if !(delta > 0.0) {
        return Err(Error::input(format!("delta must be > 0, got {delta}")));
    }

    let pitch_derived = epsilon / (growth_factor(k, epsilon) * std::f64::consts::SQRT_2 * k as f64);
    let floor = overrides.pitch_floor.unwrap_or(DEFAULT_PITCH_FLOOR);
    let mut pitch = match overrides.pitch {
        Some(p) => {
            used.pitch_overridden = true;
            p
        }
        None => {
            if pitch_derived < floor {
                used.pitch_floor_applied = true;
                floor
            } else {
                pitch_derived
            }
        }
    };
    if !(pitch > 0.0) {
        return Err(Error::input(format!("pitch must be > 0, got {pitch}")));
    }
    if pitch > delta {
        pitch = delta;
        used.pitch_clamped_to_delta = true;
    }

    Ok(PlannerParams {
        k,
        epsilon,
        rho,
        delta,
        pitch,
        pitch_derived,
        tol,
        neighbor_policy: overrides.neighbor_policy.unwrap_or(NeighborPolicy::Full),
        overrides_used: used,
    })
}

/// X: grid vertices in F that are Δ-close to a landmark, plus the exact start
/// and target placements.
#[derive(Clone, Debug)]
pub struct SampleSet {
    points: Vec<Point>,
    pub includes_endpoints: bool,
}

impl SampleSet {
    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Index of a point with exactly these coordinates, if present.
    pub fn index_of(&self, p: Point) -> Option<usize> {
        self.points.iter().position(|q| q.x == p.x && q.y == p.y)
    }
}

/// Enumerates only the grid cells inside the Δ-squares around landmarks, never
/// the full bounding box.
pub fn sample(
    f: &FreeSpace,
    lm: &Landmarks,
    params: &PlannerParams,
    starts: &[Point],
    targets: &[Point],
) -> SampleSet {
    let pitch = params.pitch;
    let delta = params.delta;
    let tol = params.tol;
    let mut seen: HashSet<(i64, i64)> = HashSet::new();
    let mut grid_points: Vec<(i64, i64)> = Vec::new();
    for u in lm.points() {
        let i_lo = ((u.x - delta) / pitch).ceil() as i64;
        let i_hi = ((u.x + delta) / pitch).floor() as i64;
        let j_lo = ((u.y - delta) / pitch).ceil() as i64;
        let j_hi = ((u.y + delta) / pitch).floor() as i64;
        for i in i_lo..=i_hi {
            for j in j_lo..=j_hi {
                if seen.insert((i, j)) {
                    grid_points.push((i, j));
                }
            }
        }
    }
    grid_points.sort_unstable();
    let mut points: Vec<Point> = Vec::new();
    for (i, j) in grid_points {
        let p = Point::new(i as f64 * pitch, j as f64 * pitch);
        if f.region.contains_point(p, tol) {
            points.push(p);
        }
    }
    for p in starts.iter().chain(targets.iter()) {
        if !points.iter().any(|q| q.x == p.x && q.y == p.y) {
            points.push(*p);
        }
    }
    SampleSet { points, includes_endpoints: true }
}
