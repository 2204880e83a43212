//! The plan data type, its cost, and the verifier: feasibility at a given
//! inflation radius, Δ-tameness, and the breakpoint budget.

use rayon::prelude::*;

use crate::error::Error;
use crate::freespace::{erode_with_tol, FreeSpace, Landmarks};
use crate::geom::{
    linf_dist, segment_avoids_open_square, segment_min_linf_to, Point, PolygonalEnvironment, Segment,
    Tolerance,
};
use crate::kinematics::Configuration;
use crate::sampling::growth_factor;

/// Synchronized piecewise-linear joint motion: robots interpolate linearly
/// between consecutive breakpoints.
#[derive(Clone, Debug, PartialEq)]
pub struct Plan {
    breakpoints: Vec<Configuration>,
}

impl Plan {
    pub fn new(breakpoints: Vec<Configuration>) -> Result<Self, Error> {
        if breakpoints.len() < 2 {
            return Err(Error::input(format!(
                "a plan needs at least 2 breakpoints, got {}",
                breakpoints.len()
            )));
        }
        let k = breakpoints[0].len();
        if k == 0 || breakpoints.iter().any(|c| c.len() != k) {
            return Err(Error::input("all breakpoints must have the same positive k".to_string()));
        }
        Ok(Plan { breakpoints })
    }

    pub fn k(&self) -> usize {
        self.breakpoints[0].len()
    }

    pub fn breakpoints(&self) -> &[Configuration] {
        &self.breakpoints
    }

    pub fn breakpoint_count(&self) -> usize {
        self.breakpoints.len()
    }

    pub fn legs(&self) -> impl Iterator<Item = (&Configuration, &Configuration)> {
        self.breakpoints.windows(2).map(|w| (&w[0], &w[1]))
    }

    pub fn start(&self) -> &Configuration {
        self.breakpoints.first().unwrap()
    }

    pub fn end(&self) -> &Configuration {
        self.breakpoints.last().unwrap()
    }
}

/// Sum over robots of the ℓ2 arc length of their paths.
pub fn cost(plan: &Plan) -> f64 {
    let k = plan.k();
    let mut total = 0.0;
    for i in 0..k {
        for (a, b) in plan.legs() {
            total += a.placements()[i].l2(b.placements()[i]);
        }
    }
    total
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ViolationKind {
    Robot(usize),
    Pair(usize, usize),
}

#[derive(Clone, Copy, Debug)]
pub struct Violation {
    pub leg: usize,
    pub kind: ViolationKind,
    /// Witness time in [0, 1] along the leg where the violation is deepest.
    pub time: f64,
}

#[derive(Clone, Debug)]
pub struct VerificationReport {
    pub feasible: bool,
    pub radius_checked: f64,
    pub violations: Vec<Violation>,
    pub cost: f64,
    pub breakpoint_count: usize,
    /// Breakpoint budget 2^k (2/ρ)^k (cost+1) for ρ = radius − 1; absent at
    /// radius exactly 1.
    pub budget: Option<u64>,
    /// Filled in when landmarks and Δ are supplied (see `tameness`).
    pub tame: Option<bool>,
    pub far_breakpoints: Vec<(usize, usize)>,
}

/// Exact leg-by-leg feasibility at robot radius `radius` (≥ 1): each robot's
/// leg inside `erode(env, radius)` and each pair's relative-displacement leg
/// avoiding the open square of radius `2·radius`.
pub fn verify(
    plan: &Plan,
    env: &PolygonalEnvironment,
    radius: f64,
    tol: Tolerance,
) -> Result<VerificationReport, Error> {
    if !(radius >= 1.0) {
        return Err(Error::input(format!("verification radius must be >= 1, got {radius}")));
    }
    let f = erode_with_tol(env, radius, tol)?;
    let report = verify_against(plan, &f, radius, tol);
    Ok(report)
}

/// Same check against an already-eroded free space of the given radius.
pub fn verify_against(plan: &Plan, f: &FreeSpace, radius: f64, tol: Tolerance) -> VerificationReport {
    let k = plan.k();
    let sep = 2.0 * radius;
    let legs: Vec<(usize, &Configuration, &Configuration)> = plan
        .legs()
        .enumerate()
        .map(|(i, (a, b))| (i, a, b))
        .collect();
    let mut violations: Vec<Violation> = legs
        .par_iter()
        .flat_map_iter(|(leg, a, b)| {
            let mut out = Vec::new();
            for i in 0..k {
                let s = Segment::new(a.placements()[i], b.placements()[i]);
                if !f.region.contains_segment(&s, tol) {
                    out.push(Violation {
                        leg: *leg,
                        kind: ViolationKind::Robot(i),
                        time: clearance_witness(&s, f, tol),
                    });
                }
            }
            for i in 0..k {
                for j in (i + 1)..k {
                    let rel = Segment::new(
                        a.placements()[i].sub(a.placements()[j]),
                        b.placements()[i].sub(b.placements()[j]),
                    );
                    if !segment_avoids_open_square(&rel, Point::new(0.0, 0.0), sep, tol) {
                        let (_, t) = segment_min_linf_to(&rel, Point::new(0.0, 0.0));
                        out.push(Violation { leg: *leg, kind: ViolationKind::Pair(i, j), time: t });
                    }
                }
            }
            out
        })
        .collect();
    violations.sort_by(|a, b| {
        (a.leg, violation_rank(a.kind)).cmp(&(b.leg, violation_rank(b.kind)))
    });
    let c = cost(plan);
    let rho = radius - 1.0;
    VerificationReport {
        feasible: violations.is_empty(),
        radius_checked: radius,
        violations,
        cost: c,
        breakpoint_count: plan.breakpoint_count(),
        budget: (rho > 0.0).then(|| breakpoint_budget(k, rho, c)),
        tame: None,
        far_breakpoints: Vec::new(),
    }
}

fn violation_rank(kind: ViolationKind) -> (usize, usize) {
    match kind {
        ViolationKind::Robot(i) => (0, i),
        ViolationKind::Pair(i, j) => (1, i * 1000 + j),
    }
}

/// Witness time for a robot-leg exit: golden-section refinement of the
/// sampled minimum workspace clearance along the leg.
fn clearance_witness(s: &Segment, f: &FreeSpace, tol: Tolerance) -> f64 {
    let depth = |t: f64| {
        let p = s.at(t);
        let d = f.region.boundary_dist(p);
        if f.region.contains_point(p, tol) {
            d
        } else {
            -d
        }
    };
    const COARSE: usize = 512;
    let mut best_t = 0.0;
    let mut best = f64::INFINITY;
    for i in 0..=COARSE {
        let t = i as f64 / COARSE as f64;
        let v = depth(t);
        if v < best {
            best = v;
            best_t = t;
        }
    }
    let mut lo = (best_t - 1.0 / COARSE as f64).max(0.0);
    let mut hi = (best_t + 1.0 / COARSE as f64).min(1.0);
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - phi * (hi - lo);
    let mut x2 = lo + phi * (hi - lo);
    let mut f1 = depth(x1);
    let mut f2 = depth(x2);
    for _ in 0..60 {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = depth(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = depth(x2);
        }
    }
    0.5 * (lo + hi)
}

/// Reports every (breakpoint index, robot index) whose placement is Δ-far.
pub fn tameness(plan: &Plan, lm: &Landmarks, delta: f64) -> (bool, Vec<(usize, usize)>) {
    let mut far = Vec::new();
    for (b, cfg) in plan.breakpoints().iter().enumerate() {
        for (i, p) in cfg.placements().iter().enumerate() {
            if lm.min_linf(*p) > delta {
                far.push((b, i));
            }
        }
    }
    (far.is_empty(), far)
}

/// ⌈2^k · (2/ρ)^k · (cost + 1)⌉ — the breakpoint budget the simplifier must
/// respect for ρ-robust inputs.
pub fn breakpoint_budget(k: usize, rho: f64, plan_cost: f64) -> u64 {
    assert!(rho > 0.0, "breakpoint budget needs rho > 0");
    (growth_factor(k, rho) * (plan_cost + 1.0)).ceil() as u64
}

/// Convenience: maximum ℓ∞ deviation between two plans' matching endpoints
/// (used by tests asserting endpoints unchanged).
pub fn endpoints_match(a: &Plan, b: &Plan) -> bool {
    let da = linf_dist_config(a.start(), b.start());
    let db = linf_dist_config(a.end(), b.end());
    da == 0.0 && db == 0.0
}

fn linf_dist_config(a: &Configuration, b: &Configuration) -> f64 {
    a.placements()
        .iter()
        .zip(b.placements())
        .map(|(p, q)| linf_dist(*p, *q))
        .fold(0.0, f64::max)
}
