//! Command-line surface: plan, verify, simplify, diagnose, render.
//!
//! Exit codes: 0 success, 1 verification failed, 2 input error,
//! 3 unreachable in the sampled graph, 4 resource budget exceeded.

mod formats;
mod render;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use squadplan_core::diagnostics;
use squadplan_core::error::Error as CoreError;
use squadplan_core::freespace::{erode_with_tol, is_close, landmarks};
use squadplan_core::geom::{Point, PolygonalEnvironment, Tolerance};
use squadplan_core::plan::{cost, tameness, verify, Plan, ViolationKind};
use squadplan_core::planner::{plan as run_planner, SearchBudget, SearchOutcome};
use squadplan_core::sampling::{derive_params, NeighborPolicy, Overrides, PlannerParams};
use squadplan_core::simplify::shortcut;

use formats::{num_to_str, parse_environment, parse_plan, plan_to_string, ParamsEcho};

const EXIT_VERIFY_FAILED: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_UNREACHABLE: u8 = 3;
const EXIT_BUDGET: u8 = 4;

#[derive(Parser)]
#[command(name = "squadplan", version, about = "Min-sum motion planning for unit-square robots")]
struct Cli {
    /// Cap on worker threads (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    /// Numeric tolerance eta in workspace units.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tolerance: f64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ParamArgs {
    /// Approximation parameter ε in (0, 1).
    #[arg(long, default_value_t = 0.5)]
    epsilon: f64,

    /// Robustness parameter ρ (defaults to ε).
    #[arg(long)]
    rho: Option<f64>,

    /// Landmark neighborhood radius Δ (overrides C·k²/ε).
    #[arg(long)]
    delta: Option<f64>,

    /// Constant C in Δ = C·k²/ε.
    #[arg(long, default_value_t = 1.0)]
    delta_constant: f64,

    /// Grid pitch ε̄ (overrides the derived value and the floor).
    #[arg(long)]
    pitch: Option<f64>,

    /// Lower cap applied to the derived pitch.
    #[arg(long, default_value_t = 0.05)]
    pitch_floor: f64,

    /// Restrict neighbor candidates to per-robot ℓ∞ moves of at most this
    /// radius (voids the approximation guarantee).
    #[arg(long)]
    neighbor_radius: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Compute a min-sum plan between start and target configurations.
    Plan {
        #[arg(long)]
        env: PathBuf,
        /// Start placements, e.g. "2,2;8,6".
        #[arg(long)]
        starts: String,
        /// Target placements, same syntax as --starts.
        #[arg(long)]
        targets: String,
        #[command(flatten)]
        params: ParamArgs,
        /// Maximum vertex expansions before giving up.
        #[arg(long)]
        budget_expansions: Option<u64>,
        /// Wall-clock budget in seconds.
        #[arg(long)]
        budget_seconds: Option<f64>,
        /// Output plan file.
        #[arg(long)]
        out: PathBuf,
    },
    /// Check a plan's feasibility at a given robot radius.
    Verify {
        #[arg(long)]
        env: PathBuf,
        #[arg(long)]
        plan: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        /// Report Δ-tameness against the environment's landmarks.
        #[arg(long)]
        delta: Option<f64>,
    },
    /// Reduce a ρ-robust plan's breakpoints without increasing cost.
    Simplify {
        #[arg(long)]
        env: PathBuf,
        #[arg(long)]
        plan: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        rho: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Report corridors, revolving areas, and far-point topology statistics.
    Diagnose {
        #[arg(long)]
        env: PathBuf,
        /// Robot count used for depth thresholds in the report.
        #[arg(long, default_value_t = 2)]
        k: usize,
        /// Sample this many D-far points and report the far-topology counts.
        #[arg(long)]
        sweep_far_topology: Option<usize>,
        /// Report well-separated revolving areas around this point, e.g. "200,200".
        #[arg(long)]
        wsra: Option<String>,
        /// How many well-separated revolving areas to request.
        #[arg(long, default_value_t = 2)]
        wsra_j: usize,
        /// Seed for randomized sweeps.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Draw an environment and plan as an SVG.
    Render {
        #[arg(long)]
        env: PathBuf,
        #[arg(long)]
        plan: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Add timed transforms animating the robots along their traces.
        #[arg(long)]
        animate: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads > 0 {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global();
    }
    let tol = match Tolerance::new(cli.tolerance) {
        Ok(t) => t,
        Err(e) => return input_error(&e.to_string()),
    };
    match cli.command {
        Command::Plan { env, starts, targets, params, budget_expansions, budget_seconds, out } => {
            cmd_plan(&env, &starts, &targets, &params, budget_expansions, budget_seconds, &out, tol)
        }
        Command::Verify { env, plan, radius, delta } => cmd_verify(&env, &plan, radius, delta, tol),
        Command::Simplify { env, plan, rho, out } => cmd_simplify(&env, &plan, rho, &out, tol),
        Command::Diagnose { env, k, sweep_far_topology, wsra, wsra_j, seed } => {
            cmd_diagnose(&env, k, sweep_far_topology, wsra.as_deref(), wsra_j, seed, tol)
        }
        Command::Render { env, plan, out, animate } => cmd_render(&env, &plan, &out, animate),
    }
}

fn input_error(msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(EXIT_INPUT)
}

fn read_env(path: &PathBuf) -> Result<PolygonalEnvironment, ExitCode> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| input_error(&format!("{}: {e}", path.display())))?;
    parse_environment(&text).map_err(|e| input_error(&format!("{}: {e}", path.display())))
}

fn read_plan(path: &PathBuf) -> Result<Plan, ExitCode> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| input_error(&format!("{}: {e}", path.display())))?;
    let (plan, _) = parse_plan(&text).map_err(|e| input_error(&format!("{}: {e}", path.display())))?;
    Ok(plan)
}

fn parse_placements(s: &str) -> Result<Vec<Point>, String> {
    s.split(';')
        .map(|pair| {
            let mut it = pair.split(',');
            let x = it
                .next()
                .ok_or_else(|| format!("bad placement {pair:?}"))?
                .trim()
                .parse::<f64>()
                .map_err(|e| format!("bad placement {pair:?}: {e}"))?;
            let y = it
                .next()
                .ok_or_else(|| format!("bad placement {pair:?}"))?
                .trim()
                .parse::<f64>()
                .map_err(|e| format!("bad placement {pair:?}: {e}"))?;
            if it.next().is_some() {
                return Err(format!("bad placement {pair:?}: too many coordinates"));
            }
            Ok(Point::new(x, y))
        })
        .collect()
}

fn build_params(args: &ParamArgs, k: usize, tol: Tolerance) -> Result<PlannerParams, CoreError> {
    derive_params(k, args.epsilon, &Overrides {
        delta_constant: Some(args.delta_constant),
        delta: args.delta,
        pitch: args.pitch,
        pitch_floor: Some(args.pitch_floor),
        rho: args.rho,
        tolerance: Some(tol.eta),
        neighbor_policy: args.neighbor_radius.map(NeighborPolicy::Radius),
    })
}

fn params_echo(p: &PlannerParams, args: &ParamArgs) -> ParamsEcho {
    let mut entries = vec![
        ("epsilon".to_string(), num_to_str(p.epsilon)),
        ("rho".to_string(), num_to_str(p.rho)),
        ("delta".to_string(), num_to_str(p.delta)),
        ("pitch".to_string(), num_to_str(p.pitch)),
        ("pitch_floor".to_string(), num_to_str(args.pitch_floor)),
        ("tolerance".to_string(), num_to_str(p.tol.eta)),
    ];
    if let Some(r) = args.neighbor_radius {
        entries.push(("neighbor_radius".to_string(), num_to_str(r)));
    }
    if p.overrides_used.pitch_floor_applied {
        entries.push(("pitch_floor_applied".to_string(), "true".to_string()));
    }
    ParamsEcho { entries }
}

#[allow(clippy::too_many_arguments)]
fn cmd_plan(
    env_path: &PathBuf,
    starts: &str,
    targets: &str,
    args: &ParamArgs,
    budget_expansions: Option<u64>,
    budget_seconds: Option<f64>,
    out: &PathBuf,
    tol: Tolerance,
) -> ExitCode {
    let env = match read_env(env_path) {
        Ok(e) => e,
        Err(code) => return code,
    };
    let starts = match parse_placements(starts) {
        Ok(v) => v,
        Err(e) => return input_error(&e),
    };
    let targets = match parse_placements(targets) {
        Ok(v) => v,
        Err(e) => return input_error(&e),
    };
    if starts.len() != targets.len() || starts.is_empty() {
        return input_error("starts and targets must list the same positive number of placements");
    }
    let params = match build_params(args, starts.len(), tol) {
        Ok(p) => p,
        Err(e) => return input_error(&e.to_string()),
    };
    let budget = SearchBudget {
        max_expansions: budget_expansions,
        max_time: budget_seconds.map(Duration::from_secs_f64),
    };
    let result = match run_planner(&env, &starts, &targets, &params, &budget) {
        Ok(r) => r,
        Err(CoreError::BudgetExceeded(msg)) => {
            eprintln!("budget exceeded: {msg}");
            return ExitCode::from(EXIT_BUDGET);
        }
        Err(e) => return input_error(&e.to_string()),
    };
    println!("landmarks: {}", result.stats.landmark_count);
    println!("samples: {}", result.stats.sample_count);
    if params.overrides_used.pitch_floor_applied {
        println!(
            "pitch floor applied: derived {} capped to {}",
            num_to_str(params.pitch_derived),
            num_to_str(params.pitch)
        );
    }
    eprintln!(
        "search: {} expanded, {} relaxed, {:.3}s",
        result.stats.vertices_expanded,
        result.stats.edges_relaxed,
        result.stats.wall.as_secs_f64()
    );
    match result.outcome {
        SearchOutcome::Found(plan) => {
            let c = result.cost.unwrap_or_else(|| cost(&plan));
            println!("cost: {}", num_to_str(c));
            let text = plan_to_string(&plan, c, &params_echo(&params, args));
            if let Err(e) = std::fs::write(out, text) {
                return input_error(&format!("{}: {e}", out.display()));
            }
            ExitCode::SUCCESS
        }
        SearchOutcome::Unreachable => {
            println!("unreachable in the sampled graph (not a proof of true unreachability)");
            ExitCode::from(EXIT_UNREACHABLE)
        }
    }
}

fn cmd_verify(
    env_path: &PathBuf,
    plan_path: &PathBuf,
    radius: f64,
    delta: Option<f64>,
    tol: Tolerance,
) -> ExitCode {
    let env = match read_env(env_path) {
        Ok(e) => e,
        Err(code) => return code,
    };
    let plan = match read_plan(plan_path) {
        Ok(p) => p,
        Err(code) => return code,
    };
    let mut report = match verify(&plan, &env, radius, tol) {
        Ok(r) => r,
        Err(e) => return input_error(&e.to_string()),
    };
    if let Some(d) = delta {
        let f1 = erode_with_tol(&env, 1.0, tol).expect("radius 1 erosion");
        let f2 = erode_with_tol(&env, 2.0, tol).expect("radius 2 erosion");
        let s: Vec<Point> = plan.start().placements().to_vec();
        let t: Vec<Point> = plan.end().placements().to_vec();
        match landmarks(&f1, &f2, &s, &t, tol) {
            Ok(lm) => {
                let (tame, far) = tameness(&plan, &lm, d);
                report.tame = Some(tame);
                report.far_breakpoints = far;
            }
            Err(e) => return input_error(&e.to_string()),
        }
    }
    println!("cost: {}", num_to_str(report.cost));
    println!("breakpoints: {}", report.breakpoint_count);
    if let Some(b) = report.budget {
        println!("breakpoint budget at radius {}: {b}", num_to_str(radius));
    }
    if let Some(tame) = report.tame {
        println!("tame: {tame}");
        for (bp, robot) in &report.far_breakpoints {
            println!("far breakpoint: index {bp} robot {robot}");
        }
    }
    if report.feasible {
        println!("feasible at radius {}", num_to_str(radius));
        ExitCode::SUCCESS
    } else {
        println!("INFEASIBLE at radius {}", num_to_str(radius));
        for v in &report.violations {
            match v.kind {
                ViolationKind::Robot(i) => println!(
                    "  leg {}: robot {i} leaves the free space near t={}",
                    v.leg,
                    num_to_str((v.time * 1e6).round() / 1e6)
                ),
                ViolationKind::Pair(i, j) => println!(
                    "  leg {}: robots {i},{j} separate below {} near t={}",
                    v.leg,
                    num_to_str(2.0 * radius),
                    num_to_str((v.time * 1e6).round() / 1e6)
                ),
            }
        }
        ExitCode::from(EXIT_VERIFY_FAILED)
    }
}

fn cmd_simplify(env_path: &PathBuf, plan_path: &PathBuf, rho: f64, out: &PathBuf, tol: Tolerance) -> ExitCode {
    let env = match read_env(env_path) {
        Ok(e) => e,
        Err(code) => return code,
    };
    let plan = match read_plan(plan_path) {
        Ok(p) => p,
        Err(code) => return code,
    };
    let f = match erode_with_tol(&env, 1.0, tol) {
        Ok(f) => f,
        Err(e) => return input_error(&e.to_string()),
    };
    let f_rho = match erode_with_tol(&env, 1.0 + rho, tol) {
        Ok(f) => f,
        Err(e) => return input_error(&e.to_string()),
    };
    match shortcut(&plan, &f, &f_rho, rho, tol) {
        Ok(simplified) => {
            let c = cost(&simplified);
            println!(
                "breakpoints: {} -> {}",
                plan.breakpoint_count(),
                simplified.breakpoint_count()
            );
            println!("cost: {} -> {}", num_to_str(cost(&plan)), num_to_str(c));
            let text = plan_to_string(&simplified, c, &ParamsEcho::default());
            if let Err(e) = std::fs::write(out, text) {
                return input_error(&format!("{}: {e}", out.display()));
            }
            ExitCode::SUCCESS
        }
        Err(CoreError::NotRobust { rho, violations, first_leg }) => {
            eprintln!(
                "plan is not {rho}-robust: {violations} violating leg check(s), first at leg {first_leg}"
            );
            // echo the verifier's report for the robust radius
            if let Ok(rep) = verify(&plan, &env, 1.0 + rho, tol) {
                for v in rep.violations.iter().take(20) {
                    match v.kind {
                        ViolationKind::Robot(i) => {
                            eprintln!("  leg {}: robot {i} exits F^({})", v.leg, 1.0 + rho)
                        }
                        ViolationKind::Pair(i, j) => {
                            eprintln!("  leg {}: robots {i},{j} too close for radius {}", v.leg, 1.0 + rho)
                        }
                    }
                }
            }
            ExitCode::from(EXIT_INPUT)
        }
        Err(e) => input_error(&e.to_string()),
    }
}

fn splitmix(state: &mut u64) -> f64 {
    *state = state.wrapping_add(0x9e3779b97f4a7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z = z ^ (z >> 31);
    (z >> 11) as f64 / (1u64 << 53) as f64
}

#[allow(clippy::too_many_arguments)]
fn cmd_diagnose(
    env_path: &PathBuf,
    k: usize,
    sweep: Option<usize>,
    wsra: Option<&str>,
    wsra_j: usize,
    seed: u64,
    tol: Tolerance,
) -> ExitCode {
    let env = match read_env(env_path) {
        Ok(e) => e,
        Err(code) => return code,
    };
    let f = match erode_with_tol(&env, 1.0, tol) {
        Ok(f) => f,
        Err(e) => return input_error(&e.to_string()),
    };
    let f2 = match erode_with_tol(&env, 2.0, tol) {
        Ok(f) => f,
        Err(e) => return input_error(&e.to_string()),
    };
    let lm = match landmarks(&f, &f2, &[], &[], tol) {
        Ok(l) => l,
        Err(e) => return input_error(&e.to_string()),
    };
    let report = diagnostics::diagnose(&f, &f2, &lm, tol);
    println!("landmarks: {}", report.landmark_count);
    if report.f2_empty {
        println!("note: F^(2) is empty; landmark set carries no radius-2 vertices");
    }
    println!("corridors: {}", report.corridors.len());
    for (i, c) in report.corridors.iter().enumerate() {
        println!(
            "corridor {i}: width {} depth {} portal- ({},{})-({},{}) portal+ ({},{})-({},{}) deep_enough_for_parking_k{k}: {}",
            num_to_str((c.width * 1e9).round() / 1e9),
            num_to_str((c.depth * 1e9).round() / 1e9),
            num_to_str(c.portal_minus.a.x),
            num_to_str(c.portal_minus.a.y),
            num_to_str(c.portal_minus.b.x),
            num_to_str(c.portal_minus.b.y),
            num_to_str(c.portal_plus.a.x),
            num_to_str(c.portal_plus.a.y),
            num_to_str(c.portal_plus.b.x),
            num_to_str(c.portal_plus.b.y),
            c.depth >= 20.0 * k as f64,
        );
        if c.depth >= 20.0 * k as f64 {
            if let Ok((minus, plus)) = diagnostics::parking_places(c, k, tol) {
                println!("  parking-: {}", placements_str(&minus));
                println!("  parking+: {}", placements_str(&plus));
            }
        }
    }
    if let Some(point_str) = wsra {
        match parse_placements(point_str) {
            Ok(points) if points.len() == 1 => {
                match diagnostics::wsra_centers(&f, &lm, points[0], wsra_j, tol) {
                    Ok(set) => println!(
                        "wsra (j={wsra_j}) at ({},{}): {}",
                        num_to_str(points[0].x),
                        num_to_str(points[0].y),
                        placements_str(&set.centers)
                    ),
                    Err(e) => println!("wsra (j={wsra_j}): unavailable: {e}"),
                }
            }
            _ => return input_error("--wsra expects a single \"x,y\" point"),
        }
    }
    if let Some(n) = sweep {
        let Some((lo, hi)) = f.region.bbox() else {
            println!("far-topology sweep: free space is empty");
            return ExitCode::SUCCESS;
        };
        // D chosen from the environment scale
        let d = 0.1 * (hi.x - lo.x).max(hi.y - lo.y);
        let mut state = seed;
        let mut counts = [0usize; 4];
        let mut sampled = 0usize;
        let mut attempts = 0usize;
        while sampled < n && attempts < 200 * n.max(1) {
            attempts += 1;
            let p = Point::new(
                lo.x + (hi.x - lo.x) * splitmix(&mut state),
                lo.y + (hi.y - lo.y) * splitmix(&mut state),
            );
            if !f.region.contains_point(p, tol) || is_close(p, &lm, d) {
                continue;
            }
            sampled += 1;
            if let Ok(c) = diagnostics::far_topology_check(&f, &lm, p, d, tol) {
                counts[c.min(3)] += 1;
            }
        }
        println!(
            "far-topology sweep: D={} sampled={} counts: 0-edges={} 1-edge={} 2-edges={} >2-edges={}",
            num_to_str(d),
            sampled,
            counts[0],
            counts[1],
            counts[2],
            counts[3]
        );
        if counts[3] > 0 {
            println!("warning: far-point topology bound exceeded; flag for investigation");
        }
    }
    ExitCode::SUCCESS
}

fn placements_str(points: &[Point]) -> String {
    points
        .iter()
        .map(|p| format!("({},{})", num_to_str(p.x), num_to_str(p.y)))
        .collect::<Vec<_>>()
        .join(" ")
}

fn cmd_render(env_path: &PathBuf, plan_path: &PathBuf, out: &PathBuf, animate: bool) -> ExitCode {
    let env = match read_env(env_path) {
        Ok(e) => e,
        Err(code) => return code,
    };
    let plan = match read_plan(plan_path) {
        Ok(p) => p,
        Err(code) => return code,
    };
    let svg = render::render_svg(&env, &plan, animate);
    match std::fs::write(out, svg) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => input_error(&format!("{}: {e}", out.display())),
    }
}
