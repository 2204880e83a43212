//! Implicit configuration-graph search: vertices are k-tuples of sample
//! points, edges are exact straight-line feasible joint motions, weights are
//! summed ℓ2 leg lengths. The graph is never materialized; neighbors are
//! generated and feasibility-checked on demand.
//!
//! The search is Dijkstra over the implicit graph, run with the consistent
//! potential h(v) = Σ_i ℓ2(v_i, t_i) (equivalently A*), which preserves
//! optimality and determinism while skipping provably non-improving regions.

use std::collections::{BinaryHeap, HashMap};
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::error::Error;
use crate::freespace::{erode_with_tol, landmarks, FreeSpace};
use crate::geom::{linf_dist, Point, PolygonalEnvironment, Segment};
use crate::kinematics::{config_feasible, pair_motion_feasible, Configuration};
use crate::plan::Plan;
use crate::sampling::{sample, NeighborPolicy, PlannerParams, SampleSet};

/// Hard cap on |X| for multi-robot search; beyond this the per-robot segment
/// table alone is unreasonable.
const MAX_SAMPLES_MULTI: usize = 4096;

#[derive(Clone, Copy, Debug, Default)]
pub struct SearchBudget {
    pub max_expansions: Option<u64>,
    pub max_time: Option<Duration>,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct SearchStats {
    pub vertices_expanded: u64,
    pub edges_relaxed: u64,
    pub landmark_count: usize,
    pub sample_count: usize,
    pub wall: Duration,
}

#[derive(Clone, Debug)]
pub enum SearchOutcome {
    Found(Plan),
    /// No path exists in the sampled graph. This is not a proof of true
    /// unreachability; the near-optimality guarantee only covers ε-robust
    /// reachable inputs at the theoretically derived sampling pitch.
    Unreachable,
}

#[derive(Clone, Debug)]
pub struct SearchResult {
    pub outcome: SearchOutcome,
    pub cost: Option<f64>,
    pub stats: SearchStats,
}

/// The implicit graph: sample set, free space, and the memoized per-robot
/// segment-feasibility table.
pub struct ConfigGraph<'a> {
    pub samples: &'a SampleSet,
    pub f: &'a FreeSpace,
    pub params: &'a PlannerParams,
    seg_table: Option<Vec<u64>>,
    n: usize,
}

impl<'a> ConfigGraph<'a> {
    pub fn new(samples: &'a SampleSet, f: &'a FreeSpace, params: &'a PlannerParams) -> Result<Self, Error> {
        let n = samples.len();
        let k = params.k;
        if k >= 2 && n > MAX_SAMPLES_MULTI {
            return Err(Error::BudgetExceeded(format!(
                "sample set of {n} points is too large for k = {k} (cap {MAX_SAMPLES_MULTI}); \
                 raise the pitch floor or restrict Δ"
            )));
        }
        let seg_table = (k >= 2).then(|| {
            let words_per_row = n.div_ceil(64);
            let tol = params.tol;
            let pts = samples.points();
            let rows: Vec<Vec<u64>> = (0..n)
                .into_par_iter()
                .map(|i| {
                    let mut row = vec![0u64; words_per_row];
                    for j in 0..n {
                        let s = Segment::new(pts[i], pts[j]);
                        if j == i || f.region.contains_segment(&s, tol) {
                            row[j / 64] |= 1 << (j % 64);
                        }
                    }
                    row
                })
                .collect();
            let mut flat = Vec::with_capacity(n * words_per_row);
            for row in rows {
                flat.extend_from_slice(&row);
            }
            flat
        });
        Ok(ConfigGraph { samples, f, params, seg_table, n })
    }

    #[inline]
    fn segment_ok(&self, i: u32, j: u32) -> bool {
        match &self.seg_table {
            Some(table) => {
                let words_per_row = self.n.div_ceil(64);
                let idx = i as usize * words_per_row + j as usize / 64;
                table[idx] & (1 << (j as usize % 64)) != 0
            }
            None => {
                let pts = self.samples.points();
                let s = Segment::new(pts[i as usize], pts[j as usize]);
                self.f.region.contains_segment(&s, self.params.tol)
            }
        }
    }

    fn config_points(&self, v: &[u32]) -> Configuration {
        Configuration::new(v.iter().map(|&i| self.samples.points()[i as usize]).collect())
    }

    /// All neighbors of `v` with edge weights, in deterministic index order.
    /// Under `Full` every feasible vertex is a candidate; under `Radius(r)`
    /// candidates are limited to per-robot ℓ∞ moves of at most `r`.
    pub fn neighbors(&self, v: &[u32]) -> Vec<(Vec<u32>, f64)> {
        let mut out = Vec::new();
        self.for_each_neighbor(v, |u, w| out.push((u.to_vec(), w)));
        out
    }

    fn for_each_neighbor(&self, v: &[u32], mut visit: impl FnMut(&[u32], f64)) {
        let k = self.params.k;
        let pts = self.samples.points();
        let n = self.n as u32;
        let radius = match self.params.neighbor_policy {
            NeighborPolicy::Full => f64::INFINITY,
            NeighborPolicy::Radius(r) => r + self.params.tol.eta,
        };
        let mut u = vec![0u32; k];
        self.enumerate_rec(v, &mut u, 0, k, pts, n, radius, &mut visit);
    }
}

#[derive(Clone, PartialEq)]
struct QueueEntry {
    f: f64,
    g: f64,
    v: Box<[u32]>,
}

impl Eq for QueueEntry {}

impl Ord for QueueEntry {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // min-heap on (f, lexicographic configuration)
        other
            .f
            .total_cmp(&self.f)
            .then_with(|| other.v.cmp(&self.v))
    }
}

impl PartialOrd for QueueEntry {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// End-to-end planning: erode, collect landmarks, sample, and search.
pub fn plan(
    env: &PolygonalEnvironment,
    starts: &[Point],
    targets: &[Point],
    params: &PlannerParams,
    budget: &SearchBudget,
) -> Result<SearchResult, Error> {
    let t0 = Instant::now();
    let k = params.k;
    if starts.len() != k || targets.len() != k {
        return Err(Error::input(format!(
            "expected {k} starts and targets, got {} and {}",
            starts.len(),
            targets.len()
        )));
    }
    let tol = params.tol;
    let f1 = erode_with_tol(env, 1.0, tol)?;
    let f2 = erode_with_tol(env, 2.0, tol)?;
    let lm = landmarks(&f1, &f2, starts, targets, tol)?;
    let s_cfg = Configuration::new(starts.to_vec());
    let t_cfg = Configuration::new(targets.to_vec());
    if !config_feasible(&s_cfg, &f1, tol) {
        return Err(Error::input("start configuration is infeasible".to_string()));
    }
    if !config_feasible(&t_cfg, &f1, tol) {
        return Err(Error::input("target configuration is infeasible".to_string()));
    }
    let samples = sample(&f1, &lm, params, starts, targets);
    let graph = ConfigGraph::new(&samples, &f1, params)?;
    let start: Vec<u32> = starts
        .iter()
        .map(|p| samples.index_of(*p).expect("sample set contains starts") as u32)
        .collect();
    let target: Vec<u32> = targets
        .iter()
        .map(|p| samples.index_of(*p).expect("sample set contains targets") as u32)
        .collect();
    let mut result = search(&graph, &start, &target, budget, t0)?;
    result.stats.landmark_count = lm.len();
    result.stats.sample_count = samples.len();
    Ok(result)
}

/// Shortest path in the implicit graph from `start` to `target`.
pub fn search(
    graph: &ConfigGraph,
    start: &[u32],
    target: &[u32],
    budget: &SearchBudget,
    t0: Instant,
) -> Result<SearchResult, Error> {
    let k = graph.params.k;
    let pts = graph.samples.points();
    let tpts: Vec<Point> = target.iter().map(|&i| pts[i as usize]).collect();
    let h = |v: &[u32]| -> f64 {
        let mut s = 0.0;
        for i in 0..k {
            s += pts[v[i] as usize].l2(tpts[i]);
        }
        s
    };

    let mut dist: HashMap<Box<[u32]>, f64> = HashMap::new();
    let mut pred: HashMap<Box<[u32]>, Box<[u32]>> = HashMap::new();
    let mut heap: BinaryHeap<QueueEntry> = BinaryHeap::new();
    let mut stats = SearchStats::default();

    let sboxed: Box<[u32]> = start.into();
    let tboxed: Box<[u32]> = target.into();
    dist.insert(sboxed.clone(), 0.0);
    heap.push(QueueEntry { f: h(start), g: 0.0, v: sboxed });

    while let Some(QueueEntry { g, v, .. }) = heap.pop() {
        if g > *dist.get(&v).unwrap_or(&f64::INFINITY) + 1e-15 {
            continue;
        }
        if v == tboxed {
            stats.wall = t0.elapsed();
            let plan = reconstruct(graph, &pred, &v);
            return Ok(SearchResult { outcome: SearchOutcome::Found(plan), cost: Some(g), stats });
        }
        stats.vertices_expanded += 1;
        if let Some(cap) = budget.max_expansions {
            if stats.vertices_expanded > cap {
                return Err(Error::BudgetExceeded(format!(
                    "expansion budget {cap} exhausted ({} edges relaxed)",
                    stats.edges_relaxed
                )));
            }
        }
        if stats.vertices_expanded % 256 == 0 {
            if let Some(cap) = budget.max_time {
                if t0.elapsed() > cap {
                    return Err(Error::BudgetExceeded(format!(
                        "time budget {cap:?} exhausted after {} expansions",
                        stats.vertices_expanded
                    )));
                }
            }
        }
        let neighbors = parallel_neighbors(graph, &v);
        for (u, w) in neighbors {
            stats.edges_relaxed += 1;
            let nd = g + w;
            let entry = dist.get(u.as_slice());
            if entry.is_none_or(|&d| nd < d - 1e-15) {
                let ub: Box<[u32]> = u.into();
                dist.insert(ub.clone(), nd);
                pred.insert(ub.clone(), v.clone());
                heap.push(QueueEntry { f: nd + h(&ub), g: nd, v: ub });
            }
        }
    }
    stats.wall = t0.elapsed();
    Ok(SearchResult { outcome: SearchOutcome::Unreachable, cost: None, stats })
}

/// Neighbor generation for one expansion. For k ≥ 2 the outer robot's move is
/// parallelized; candidate order (and therefore every downstream result) is
/// independent of the thread count.
fn parallel_neighbors(graph: &ConfigGraph, v: &[u32]) -> Vec<(Vec<u32>, f64)> {
    let k = graph.params.k;
    let pts = graph.samples.points();
    if k == 1 {
        let tol = graph.params.tol;
        let radius = match graph.params.neighbor_policy {
            NeighborPolicy::Full => f64::INFINITY,
            NeighborPolicy::Radius(r) => r + tol.eta,
        };
        let all: Vec<u32> = (0..graph.n as u32).collect();
        let chunks: Vec<Vec<(Vec<u32>, f64)>> = all
            .par_chunks(512)
            .map(|chunk| {
                chunk
                    .iter()
                    .filter(|&&c| c != v[0])
                    .filter(|&&c| graph.segment_ok(v[0], c))
                    .filter(|&&c| {
                        !radius.is_finite()
                            || linf_dist(pts[v[0] as usize], pts[c as usize]) <= radius
                    })
                    .map(|&c| (vec![c], pts[v[0] as usize].l2(pts[c as usize])))
                    .collect()
            })
            .collect();
        return chunks.concat();
    }
    let n = graph.n as u32;
    let tol = graph.params.tol;
    let radius = match graph.params.neighbor_policy {
        NeighborPolicy::Full => f64::INFINITY,
        NeighborPolicy::Radius(r) => r + tol.eta,
    };
    let firsts: Vec<u32> = (0..n)
        .filter(|&c| graph.segment_ok(v[0], c))
        .filter(|&c| {
            !radius.is_finite() || linf_dist(pts[v[0] as usize], pts[c as usize]) <= radius
        })
        .collect();
    let chunks: Vec<Vec<(Vec<u32>, f64)>> = firsts
        .par_iter()
        .map(|&first| {
            let mut local = Vec::new();
            let mut u = vec![0u32; k];
            u[0] = first;
            graph.enumerate_rec(v, &mut u, 1, k, pts, n, radius, &mut |cand: &[u32], w| {
                local.push((cand.to_vec(), w));
            });
            local
        })
        .collect();
    chunks.into_iter().flatten().collect()
}

impl<'a> ConfigGraph<'a> {
    #[allow(clippy::too_many_arguments)]
    fn enumerate_rec(
        &self,
        v: &[u32],
        u: &mut Vec<u32>,
        depth: usize,
        k: usize,
        pts: &[Point],
        n: u32,
        radius: f64,
        visit: &mut impl FnMut(&[u32], f64),
    ) {
        if depth == k {
            if u.as_slice() == v {
                return;
            }
            let mut w = 0.0;
            for i in 0..k {
                w += pts[v[i] as usize].l2(pts[u[i] as usize]);
            }
            visit(u, w);
            return;
        }
        for cand in 0..n {
            if !self.segment_ok(v[depth], cand) {
                continue;
            }
            if radius.is_finite() && linf_dist(pts[v[depth] as usize], pts[cand as usize]) > radius {
                continue;
            }
            let tol = self.params.tol;
            let mut ok = true;
            for prev in 0..depth {
                if linf_dist(pts[u[prev] as usize], pts[cand as usize]) < 2.0 - tol.eta {
                    ok = false;
                    break;
                }
                if !pair_motion_feasible(
                    pts[v[prev] as usize],
                    pts[v[depth] as usize],
                    pts[u[prev] as usize],
                    pts[cand as usize],
                    tol,
                ) {
                    ok = false;
                    break;
                }
            }
            if ok {
                u[depth] = cand;
                self.enumerate_rec(v, u, depth + 1, k, pts, n, radius, visit);
            }
        }
    }
}

fn reconstruct(graph: &ConfigGraph, pred: &HashMap<Box<[u32]>, Box<[u32]>>, target: &[u32]) -> Plan {
    let mut chain: Vec<Box<[u32]>> = vec![target.into()];
    while let Some(prev) = pred.get(chain.last().unwrap()) {
        chain.push(prev.clone());
    }
    chain.reverse();
    let breakpoints: Vec<Configuration> = chain.iter().map(|v| graph.config_points(v)).collect();
    Plan::new(breakpoints).expect("search paths have >= 2 breakpoints")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{pt, Tolerance};
    use crate::kinematics::motion_feasible;
    use crate::sampling::{derive_params, Overrides};

    fn room(side: f64) -> PolygonalEnvironment {
        PolygonalEnvironment::new(
            vec![pt(0.0, 0.0), pt(side, 0.0), pt(side, side), pt(0.0, side)],
            vec![],
        )
        .unwrap()
    }

    fn params_k(k: usize, pitch: f64) -> PlannerParams {
        derive_params(k, 0.5, &Overrides {
            pitch: Some(pitch),
            ..Overrides::default()
        })
        .unwrap()
    }

    #[test]
    fn neighbors_on_3x3_grid() {
        let tol = Tolerance::default();
        let env = room(10.0);
        let f = erode_with_tol(&env, 1.0, tol).unwrap();
        let lm = crate::freespace::Landmarks::from_points(vec![pt(5.0, 5.0)]);
        let mut p = params_k(1, 1.0);
        p.delta = 1.0;
        let x = sample(&f, &lm, &p, &[], &[]);
        assert_eq!(x.len(), 9);
        let graph = ConfigGraph::new(&x, &f, &p).unwrap();
        let center = x.index_of(pt(5.0, 5.0)).unwrap() as u32;
        let nb = graph.neighbors(&[center]);
        assert_eq!(nb.len(), 8);
        // Radius(pitch) policy keeps all 8 one-pitch neighbors
        let mut pr = p;
        pr.neighbor_policy = NeighborPolicy::Radius(2f64.sqrt());
        let graph = ConfigGraph::new(&x, &f, &pr).unwrap();
        let nb = graph.neighbors(&[center]);
        assert_eq!(nb.len(), 8);
    }

    #[test]
    fn single_robot_straight_line() {
        let env = room(20.0);
        let p = params_k(1, 1.0);
        let res = plan(&env, &[pt(2.0, 2.0)], &[pt(18.0, 18.0)], &p, &SearchBudget::default()).unwrap();
        let cost = res.cost.unwrap();
        assert!((cost - 16.0 * 2f64.sqrt()).abs() < 1e-9, "cost {cost}");
        match res.outcome {
            SearchOutcome::Found(plan) => {
                assert_eq!(plan.start().placements()[0], pt(2.0, 2.0));
                assert_eq!(plan.end().placements()[0], pt(18.0, 18.0));
            }
            SearchOutcome::Unreachable => panic!("must be reachable"),
        }
    }

    #[test]
    fn two_robot_swap_found_and_feasible() {
        let tol = Tolerance::default();
        let env = room(12.0);
        let p = params_k(2, 1.0);
        let starts = [pt(4.0, 6.0), pt(8.0, 6.0)];
        let targets = [pt(8.0, 6.0), pt(4.0, 6.0)];
        let res = plan(&env, &starts, &targets, &p, &SearchBudget::default()).unwrap();
        let plan = match res.outcome {
            SearchOutcome::Found(pl) => pl,
            SearchOutcome::Unreachable => panic!("swap must be solvable"),
        };
        let f = erode_with_tol(&env, 1.0, tol).unwrap();
        for (a, b) in plan.legs() {
            assert!(motion_feasible(a, b, &f, tol));
        }
        let c = res.cost.unwrap();
        assert!(c >= 8.0 - 1e-9, "cannot beat the displacement sum, got {c}");
        assert!(c <= 12.0, "swap in an open room should be cheap, got {c}");
    }

    #[test]
    fn unreachable_in_sampled_graph() {
        // two rooms joined by a corridor eroded shut: no path in the graph
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
        let p = params_k(1, 1.0);
        let res = plan(&env, &[pt(5.0, 5.0)], &[pt(19.0, 5.0)], &p, &SearchBudget::default()).unwrap();
        assert!(matches!(res.outcome, SearchOutcome::Unreachable));
    }

    #[test]
    fn budget_error_reported() {
        let env = room(20.0);
        let p = params_k(2, 1.0);
        let starts = [pt(4.0, 6.0), pt(8.0, 6.0)];
        let targets = [pt(8.0, 6.0), pt(4.0, 6.0)];
        let budget = SearchBudget { max_expansions: Some(2), max_time: None };
        assert!(matches!(
            plan(&env, &starts, &targets, &p, &budget),
            Err(Error::BudgetExceeded(_))
        ));
    }

    #[test]
    fn infeasible_endpoints_rejected() {
        let env = room(12.0);
        let p = params_k(2, 1.0);
        // overlapping starts
        let starts = [pt(4.0, 6.0), pt(5.0, 6.0)];
        let targets = [pt(8.0, 6.0), pt(4.0, 6.0)];
        assert!(matches!(plan(&env, &starts, &targets, &p, &SearchBudget::default()), Err(Error::Input(_))));
    }

    #[test]
    fn matches_reference_dijkstra_on_materialized_graph() {
        // materialize a small 2-robot graph and compare against a plain
        // dense Dijkstra implemented here from scratch
        let tol = Tolerance::default();
        let env = room(8.0);
        let mut p = params_k(2, 2.0);
        p.delta = 10.0;
        let f = erode_with_tol(&env, 1.0, tol).unwrap();
        let f2 = erode_with_tol(&env, 2.0, tol).unwrap();
        let starts = [pt(1.0, 1.0), pt(7.0, 7.0)];
        let targets = [pt(7.0, 1.0), pt(1.0, 7.0)];
        let lm = landmarks(&f, &f2, &starts, &targets, tol).unwrap();
        let x = sample(&f, &lm, &p, &starts, &targets);
        let n = x.len() as u32;
        // vertices: all feasible ordered pairs
        let mut verts: Vec<[u32; 2]> = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    let c = Configuration::new(vec![
                        x.points()[i as usize],
                        x.points()[j as usize],
                    ]);
                    if config_feasible(&c, &f, tol) {
                        verts.push([i, j]);
                    }
                }
            }
        }
        assert!(verts.len() <= 5000, "keep the reference graph small");
        let vid: HashMap<[u32; 2], usize> = verts.iter().enumerate().map(|(a, b)| (*b, a)).collect();
        let cfg = |v: [u32; 2]| {
            Configuration::new(vec![x.points()[v[0] as usize], x.points()[v[1] as usize]])
        };
        // dense edge list via the exact predicate
        let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); verts.len()];
        for (a, &va) in verts.iter().enumerate() {
            for (b, &vb) in verts.iter().enumerate() {
                if a == b {
                    continue;
                }
                if motion_feasible(&cfg(va), &cfg(vb), &f, tol) {
                    let w = x.points()[va[0] as usize].l2(x.points()[vb[0] as usize])
                        + x.points()[va[1] as usize].l2(x.points()[vb[1] as usize]);
                    adj[a].push((b, w));
                }
            }
        }
        let s = vid[&[
            x.index_of(starts[0]).unwrap() as u32,
            x.index_of(starts[1]).unwrap() as u32,
        ]];
        let t = vid[&[
            x.index_of(targets[0]).unwrap() as u32,
            x.index_of(targets[1]).unwrap() as u32,
        ]];
        // plain Dijkstra
        let mut dist = vec![f64::INFINITY; verts.len()];
        let mut heap = BinaryHeap::new();
        dist[s] = 0.0;
        heap.push(std::cmp::Reverse((ordered_float(0.0), s)));
        while let Some(std::cmp::Reverse((d, u))) = heap.pop() {
            let d = f64::from_bits(d.rotate_right(1));
            if d > dist[u] + 1e-12 {
                continue;
            }
            for &(v, w) in &adj[u] {
                if d + w < dist[v] - 1e-15 {
                    dist[v] = d + w;
                    heap.push(std::cmp::Reverse((ordered_float(d + w), v)));
                }
            }
        }
        let reference = dist[t];
        let res = plan(&env, &starts, &targets, &p, &SearchBudget::default()).unwrap();
        let got = res.cost.unwrap();
        assert!(
            (got - reference).abs() < 1e-9,
            "implicit search {got} vs reference {reference}"
        );
    }

    fn ordered_float(x: f64) -> u64 {
        // order-preserving bit trick for nonnegative floats
        x.to_bits().rotate_left(1)
    }
}
