//! Environment and plan file formats: JSON documents with coordinates stored
//! as decimal strings so that serialize → parse round-trips bit-exactly.

use serde_json::Value;
use squadplan_core::geom::{Point, PolygonalEnvironment};
use squadplan_core::kinematics::Configuration;
use squadplan_core::plan::Plan;

#[derive(Debug)]
pub struct FormatError(pub String);

impl std::fmt::Display for FormatError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for FormatError {}

fn err(msg: impl Into<String>) -> FormatError {
    FormatError(msg.into())
}

/// Shortest decimal form that parses back to the identical f64.
pub fn num_to_str(v: f64) -> String {
    format!("{v}")
}

fn parse_num(v: &Value, what: &str) -> Result<f64, FormatError> {
    let s = match v {
        Value::String(s) => s.clone(),
        Value::Number(n) => n.to_string(),
        _ => return Err(err(format!("{what}: expected a decimal string"))),
    };
    s.parse::<f64>()
        .map_err(|e| err(format!("{what}: bad number {s:?}: {e}")))
}

fn parse_point(v: &Value, what: &str) -> Result<Point, FormatError> {
    let arr = v
        .as_array()
        .ok_or_else(|| err(format!("{what}: expected [x, y]")))?;
    if arr.len() != 2 {
        return Err(err(format!("{what}: expected 2 coordinates, got {}", arr.len())));
    }
    Ok(Point::new(
        parse_num(&arr[0], what)?,
        parse_num(&arr[1], what)?,
    ))
}

fn parse_ring(v: &Value, what: &str) -> Result<Vec<Point>, FormatError> {
    let arr = v
        .as_array()
        .ok_or_else(|| err(format!("{what}: expected a vertex list")))?;
    arr.iter()
        .enumerate()
        .map(|(i, p)| parse_point(p, &format!("{what}[{i}]")))
        .collect()
}

pub fn parse_environment(text: &str) -> Result<PolygonalEnvironment, FormatError> {
    let doc: Value = serde_json::from_str(text).map_err(|e| err(format!("environment file: {e}")))?;
    let obj = doc
        .as_object()
        .ok_or_else(|| err("environment file: expected a JSON object"))?;
    let outer = parse_ring(
        obj.get("outer").ok_or_else(|| err("environment file: missing \"outer\""))?,
        "outer",
    )?;
    let holes = match obj.get("holes") {
        None | Some(Value::Null) => Vec::new(),
        Some(v) => v
            .as_array()
            .ok_or_else(|| err("holes: expected a list of vertex lists"))?
            .iter()
            .enumerate()
            .map(|(i, h)| parse_ring(h, &format!("holes[{i}]")))
            .collect::<Result<Vec<_>, _>>()?,
    };
    let mut env = PolygonalEnvironment::new(outer, holes).map_err(|e| err(e.to_string()))?;
    if let Some(Value::String(name)) = obj.get("name") {
        env = env.with_name(name.clone());
    }
    Ok(env)
}

fn point_json(p: Point) -> String {
    format!("[\"{}\",\"{}\"]", num_to_str(p.x), num_to_str(p.y))
}

#[cfg_attr(not(test), allow(dead_code))]
pub fn environment_to_string(env: &PolygonalEnvironment) -> String {
    let mut s = String::from("{");
    if let Some(name) = &env.name {
        s.push_str(&format!("\"name\":{},", Value::String(name.clone())));
    }
    s.push_str("\"outer\":[");
    s.push_str(
        &env.outer()
            .points()
            .iter()
            .map(|p| point_json(*p))
            .collect::<Vec<_>>()
            .join(","),
    );
    s.push_str("],\"holes\":[");
    s.push_str(
        &env.holes()
            .iter()
            .map(|h| {
                format!(
                    "[{}]",
                    h.points()
                        .iter()
                        .map(|p| point_json(*p))
                        .collect::<Vec<_>>()
                        .join(",")
                )
            })
            .collect::<Vec<_>>()
            .join(","),
    );
    s.push_str("]}\n");
    s
}

/// Echo of the parameters a plan was produced with, stored as decimal strings.
#[derive(Clone, Debug, Default)]
pub struct ParamsEcho {
    pub entries: Vec<(String, String)>,
}

pub fn parse_plan(text: &str) -> Result<(Plan, Option<f64>), FormatError> {
    let doc: Value = serde_json::from_str(text).map_err(|e| err(format!("plan file: {e}")))?;
    let obj = doc.as_object().ok_or_else(|| err("plan file: expected a JSON object"))?;
    let k = obj
        .get("k")
        .and_then(|v| v.as_u64())
        .ok_or_else(|| err("plan file: missing integer \"k\""))? as usize;
    let bps = obj
        .get("breakpoints")
        .and_then(|v| v.as_array())
        .ok_or_else(|| err("plan file: missing \"breakpoints\""))?;
    let mut configs = Vec::with_capacity(bps.len());
    for (i, bp) in bps.iter().enumerate() {
        let pts = bp
            .as_array()
            .ok_or_else(|| err(format!("breakpoints[{i}]: expected a list of points")))?;
        if pts.len() != k {
            return Err(err(format!(
                "breakpoints[{i}]: expected {k} placements, got {}",
                pts.len()
            )));
        }
        let placements = pts
            .iter()
            .enumerate()
            .map(|(r, p)| parse_point(p, &format!("breakpoints[{i}][{r}]")))
            .collect::<Result<Vec<_>, _>>()?;
        configs.push(Configuration::new(placements));
    }
    let plan = Plan::new(configs).map_err(|e| err(e.to_string()))?;
    let cost = match obj.get("cost") {
        Some(v) => Some(parse_num(v, "cost")?),
        None => None,
    };
    Ok((plan, cost))
}

pub fn plan_to_string(plan: &Plan, cost: f64, params: &ParamsEcho) -> String {
    let mut s = String::from("{");
    s.push_str(&format!("\"k\":{},", plan.k()));
    s.push_str("\"breakpoints\":[");
    s.push_str(
        &plan
            .breakpoints()
            .iter()
            .map(|cfg| {
                format!(
                    "[{}]",
                    cfg.placements()
                        .iter()
                        .map(|p| point_json(*p))
                        .collect::<Vec<_>>()
                        .join(",")
                )
            })
            .collect::<Vec<_>>()
            .join(","),
    );
    s.push_str(&format!("],\"cost\":\"{}\"", num_to_str(cost)));
    if !params.entries.is_empty() {
        s.push_str(",\"params\":{");
        s.push_str(
            &params
                .entries
                .iter()
                .map(|(k, v)| format!("\"{k}\":\"{v}\""))
                .collect::<Vec<_>>()
                .join(","),
        );
        s.push('}');
    }
    s.push_str("}\n");
    s
}
