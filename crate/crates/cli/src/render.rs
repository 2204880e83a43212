//! Static (and optionally SMIL-animated) SVG rendering of an environment and
//! a plan: environment outline, robot squares at breakpoints, per-robot
//! colored traces.

use squadplan_core::geom::{Point, PolygonalEnvironment, Ring};
use squadplan_core::plan::Plan;

const PALETTE: [&str; 8] = [
    "#d62728", "#1f77b4", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf", "#bcbd22",
];

fn fmt(v: f64) -> String {
    let r = (v * 1000.0).round() / 1000.0;
    format!("{r}")
}

fn ring_points(r: &Ring) -> String {
    r.points()
        .iter()
        .map(|p| format!("{},{}", fmt(p.x), fmt(p.y)))
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn render_svg(env: &PolygonalEnvironment, plan: &Plan, animate: bool) -> String {
    let (lo, hi) = env.bbox();
    let margin = 1.0;
    let view = format!(
        "{} {} {} {}",
        fmt(lo.x - margin),
        fmt(lo.y - margin),
        fmt(hi.x - lo.x + 2.0 * margin),
        fmt(hi.y - lo.y + 2.0 * margin)
    );
    let mut s = String::new();
    s.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\"{view}\" width=\"800\" height=\"600\">\n"
    ));
    // flip y so the workspace reads with y up
    s.push_str(&format!(
        "<g transform=\"translate(0,{}) scale(1,-1)\">\n",
        fmt(lo.y + hi.y)
    ));
    s.push_str(&format!(
        "<polygon points=\"{}\" fill=\"#f2f2f2\" stroke=\"#222222\" stroke-width=\"0.08\"/>\n",
        ring_points(env.outer())
    ));
    for h in env.holes() {
        s.push_str(&format!(
            "<polygon points=\"{}\" fill=\"#c8c8c8\" stroke=\"#222222\" stroke-width=\"0.08\"/>\n",
            ring_points(h)
        ));
    }
    let k = plan.k();
    let n = plan.breakpoint_count();
    for robot in 0..k {
        let color = PALETTE[robot % PALETTE.len()];
        let trace: Vec<Point> = plan
            .breakpoints()
            .iter()
            .map(|c| c.placements()[robot])
            .collect();
        let has_trace = trace.windows(2).any(|w| w[0] != w[1]);
        if has_trace {
            let pts = trace
                .iter()
                .map(|p| format!("{},{}", fmt(p.x), fmt(p.y)))
                .collect::<Vec<_>>()
                .join(" ");
            s.push_str(&format!(
                "<polyline class=\"trace\" points=\"{pts}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"0.12\" stroke-dasharray=\"0.3 0.15\"/>\n"
            ));
        }
        // faint squares at intermediate breakpoints, solid at the endpoints
        for (i, p) in trace.iter().enumerate() {
            let opacity = if i == 0 || i == n - 1 { "0.85" } else { "0.18" };
            s.push_str(&format!(
                "<rect x=\"{}\" y=\"{}\" width=\"2\" height=\"2\" fill=\"{color}\" fill-opacity=\"{opacity}\" stroke=\"{color}\" stroke-width=\"0.05\"/>\n",
                fmt(p.x - 1.0),
                fmt(p.y - 1.0)
            ));
        }
        if animate && has_trace {
            // one moving square per robot driven by timed transforms
            let dur = 1.5 * (n as f64 - 1.0);
            let xs: Vec<String> = trace.iter().map(|p| fmt(p.x - 1.0)).collect();
            let ys: Vec<String> = trace.iter().map(|p| fmt(p.y - 1.0)).collect();
            let times: Vec<String> = (0..n)
                .map(|i| fmt(i as f64 / (n as f64 - 1.0)))
                .collect();
            s.push_str(&format!(
                "<rect x=\"{}\" y=\"{}\" width=\"2\" height=\"2\" fill=\"{color}\" fill-opacity=\"0.7\">\n",
                xs[0], ys[0]
            ));
            s.push_str(&format!(
                "<animate attributeName=\"x\" dur=\"{}s\" repeatCount=\"indefinite\" values=\"{}\" keyTimes=\"{}\"/>\n",
                fmt(dur),
                xs.join(";"),
                times.join(";")
            ));
            s.push_str(&format!(
                "<animate attributeName=\"y\" dur=\"{}s\" repeatCount=\"indefinite\" values=\"{}\" keyTimes=\"{}\"/>\n",
                fmt(dur),
                ys.join(";"),
                times.join(";")
            ));
            s.push_str("</rect>\n");
        }
    }
    s.push_str("</g>\n</svg>\n");
    s
}
