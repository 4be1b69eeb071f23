//! Spec-file parsing for carriers, rays, fields, and maps. Parse errors
//! carry a pointer to the offending field so the driver can exit with the
//! schema code.

use coarsegeom::carrier::Carrier;
use coarsegeom::coarsemaps::PointMap;
use coarsegeom::collar::CollarSpace;
use coarsegeom::ends::{Ray, RayGenerator};
use coarsegeom::error::Error as CoreError;
use coarsegeom::higson::ScalarField;
use coarsegeom::space::{FiniteMetricSpace, LazyGraph, Point};
use serde_json::Value;
use std::sync::Arc;

/// Schema violations exit with code 2 and name the offending field;
/// operation errors exit with code 1 and reproduce the module error.
#[derive(Debug)]
pub enum CliError {
    Schema { field: String, message: String },
    Op(CoreError),
}

impl CliError {
    pub fn schema(field: &str, message: impl Into<String>) -> CliError {
        CliError::Schema {
            field: field.to_string(),
            message: message.into(),
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> CliError {
        CliError::Op(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Schema { field, message } => write!(f, "config error at `{field}`: {message}"),
            CliError::Op(e) => write!(f, "{e}"),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub fn read_json(path_or_inline: &str, field: &str) -> CliResult<Value> {
    let text = if path_or_inline.trim_start().starts_with(['{', '[']) {
        path_or_inline.to_string()
    } else {
        std::fs::read_to_string(path_or_inline)
            .map_err(|e| CliError::schema(field, format!("cannot read {path_or_inline}: {e}")))?
    };
    serde_json::from_str(&text)
        .map_err(|e| CliError::schema(field, format!("invalid JSON: {e}")))
}

/// Carrier spec: a graph family, or a collar over a named boundary.
///
/// {"type":"zd","d":2} | {"type":"free","rank":2}
/// | {"type":"finite","edges":[[0,1],...],"root":0}
/// | {"type":"collar","boundary":{"type":"cycle","n":8,"scale":0.125},"levels":40}
pub fn parse_carrier(v: &Value, field: &str) -> CliResult<Arc<Carrier>> {
    let ty = v
        .get("type")
        .and_then(Value::as_str)
        .ok_or_else(|| CliError::schema(&format!("{field}.type"), "missing carrier type"))?;
    match ty {
        "zd" | "free" | "finite" => {
            let graph = LazyGraph::from_spec_json(&v.to_string())
                .map_err(|e| CliError::schema(field, e.to_string()))?;
            Ok(Arc::new(Carrier::Graph(graph)))
        }
        "collar" => {
            let levels = v
                .get("levels")
                .and_then(Value::as_u64)
                .ok_or_else(|| CliError::schema(&format!("{field}.levels"), "missing depth level count"))?;
            let boundary = v
                .get("boundary")
                .ok_or_else(|| CliError::schema(&format!("{field}.boundary"), "missing boundary"))?;
            let fms = parse_boundary(boundary, &format!("{field}.boundary"))?;
            let collar =
                CollarSpace::harmonic(fms, levels as usize).map_err(CliError::Op)?;
            Ok(Arc::new(Carrier::Collar(collar)))
        }
        other => Err(CliError::schema(
            &format!("{field}.type"),
            format!("unknown carrier type '{other}'"),
        )),
    }
}

/// {"type":"cycle","n":8,"scale":0.125} | {"type":"point"}
/// | {"type":"finite","edges":[...],"root":0}
pub fn parse_boundary(v: &Value, field: &str) -> CliResult<FiniteMetricSpace> {
    let ty = v
        .get("type")
        .and_then(Value::as_str)
        .ok_or_else(|| CliError::schema(&format!("{field}.type"), "missing boundary type"))?;
    match ty {
        "cycle" => {
            let n = v
                .get("n")
                .and_then(Value::as_u64)
                .ok_or_else(|| CliError::schema(&format!("{field}.n"), "missing cycle size"))?;
            let scale = v.get("scale").and_then(Value::as_f64).unwrap_or(1.0);
            Ok(FiniteMetricSpace::cycle(n as usize, scale))
        }
        "point" => Ok(FiniteMetricSpace::from_matrix(vec![Point::Vertex(0)], vec![0.0])
            .expect("single point matrix")),
        "finite" => {
            let graph = LazyGraph::from_spec_json(&v.to_string())
                .map_err(|e| CliError::schema(field, e.to_string()))?;
            let n = match graph.family() {
                coarsegeom::space::GraphFamily::Finite { adjacency, .. } => adjacency.len() as u64,
                _ => unreachable!(),
            };
            coarsegeom::space::ball(&graph, &graph.root(), n, 0).map_err(CliError::Op)
        }
        other => Err(CliError::schema(
            &format!("{field}.type"),
            format!("unknown boundary type '{other}'"),
        )),
    }
}

/// Ray spec:
/// {"builtin":"axis","direction":[1,0]}
/// | {"builtin":"word","head":"a","cycle":"b"}
/// | {"builtin":"descent","boundary":0,"start":2,"step":1}
/// | {"points":[...]}
pub fn parse_ray(v: &Value, carrier: &Arc<Carrier>, len: usize, field: &str) -> CliResult<Ray> {
    if let Some(points) = v.get("points") {
        let pts: Vec<Point> = serde_json::from_value(points.clone())
            .map_err(|e| CliError::schema(&format!("{field}.points"), e.to_string()))?;
        return Ray::new(carrier.clone(), carrier.default_base(), pts, None).map_err(CliError::Op);
    }
    let builtin = v
        .get("builtin")
        .and_then(Value::as_str)
        .ok_or_else(|| CliError::schema(field, "ray needs either `points` or `builtin`"))?;
    let generator = match builtin {
        "axis" => {
            let direction: Vec<i64> = serde_json::from_value(
                v.get("direction")
                    .cloned()
                    .ok_or_else(|| CliError::schema(&format!("{field}.direction"), "missing"))?,
            )
            .map_err(|e| CliError::schema(&format!("{field}.direction"), e.to_string()))?;
            RayGenerator::LatticeAxis { direction }
        }
        "word" => RayGenerator::WordPath {
            head: v
                .get("head")
                .and_then(Value::as_str)
                .unwrap_or_default()
                .to_string(),
            cycle: v
                .get("cycle")
                .and_then(Value::as_str)
                .ok_or_else(|| CliError::schema(&format!("{field}.cycle"), "missing"))?
                .to_string(),
        },
        "descent" => RayGenerator::CollarDescent {
            boundary: v.get("boundary").and_then(Value::as_u64).unwrap_or(0) as usize,
            start: v.get("start").and_then(Value::as_u64).unwrap_or(1) as usize,
            step: v.get("step").and_then(Value::as_u64).unwrap_or(1).max(1) as usize,
        },
        other => {
            return Err(CliError::schema(
                &format!("{field}.builtin"),
                format!("unknown builtin '{other}'"),
            ))
        }
    };
    Ray::from_generator(carrier.clone(), generator, len).map_err(CliError::Op)
}

pub fn parse_rays(v: &Value, carrier: &Arc<Carrier>, len: usize, field: &str) -> CliResult<Vec<Ray>> {
    let list = if let Some(arr) = v.as_array() {
        arr.clone()
    } else if let Some(arr) = v.get("rays").and_then(Value::as_array) {
        arr.clone()
    } else {
        return Err(CliError::schema(field, "expected an array of ray specs"));
    };
    list.iter()
        .enumerate()
        .map(|(i, spec)| parse_ray(spec, carrier, len, &format!("{field}[{i}]")))
        .collect()
}

/// Field spec: built-ins `const:<c>`, `collar:cos`, `collar:sin`,
/// `collar:depth`, or an expression in the gauge variable x.
pub fn parse_field(spec: &str, carrier: &Arc<Carrier>, field: &str) -> CliResult<ScalarField> {
    if let Some(c) = spec.strip_prefix("const:") {
        let c: f64 = c
            .parse()
            .map_err(|_| CliError::schema(field, format!("bad constant '{c}'")))?;
        return Ok(ScalarField::constant(c));
    }
    match spec {
        "collar:cos" => ScalarField::collar_angular(carrier.clone(), false).map_err(CliError::Op),
        "collar:sin" => ScalarField::collar_angular(carrier.clone(), true).map_err(CliError::Op),
        "collar:depth" => ScalarField::collar_depth(carrier.clone()).map_err(CliError::Op),
        expr => ScalarField::from_expr(expr, carrier.clone(), carrier.default_base())
            .map_err(CliError::Op),
    }
}

/// Map spec: `identity` | `scale:<k>` | `floordiv:<k>` | `constant:<point json>`
/// | `wordhom:<image>,<image>,...`
pub fn parse_map(spec: &str, carrier: &Arc<Carrier>, field: &str) -> CliResult<PointMap> {
    if spec == "identity" {
        return Ok(PointMap::identity());
    }
    if let Some(k) = spec.strip_prefix("scale:") {
        let k: i64 = k
            .parse()
            .map_err(|_| CliError::schema(field, format!("bad scale factor '{k}'")))?;
        let dim = match &**carrier {
            Carrier::Graph(g) => match g.family() {
                coarsegeom::space::GraphFamily::Lattice { dim } => *dim,
                _ => return Err(CliError::schema(field, "scale maps need a lattice carrier")),
            },
            _ => return Err(CliError::schema(field, "scale maps need a lattice carrier")),
        };
        let matrix: Vec<Vec<i64>> = (0..dim)
            .map(|i| (0..dim).map(|j| if i == j { k } else { 0 }).collect())
            .collect();
        return Ok(PointMap::lattice_linear(matrix));
    }
    if let Some(k) = spec.strip_prefix("floordiv:") {
        let k: i64 = k
            .parse()
            .map_err(|_| CliError::schema(field, format!("bad divisor '{k}'")))?;
        if k == 0 {
            return Err(CliError::schema(field, "divisor must be nonzero"));
        }
        return Ok(PointMap::lattice_floor_div(k));
    }
    if let Some(p) = spec.strip_prefix("constant:") {
        let point: Point = serde_json::from_str(p)
            .map_err(|e| CliError::schema(field, format!("bad point: {e}")))?;
        return Ok(PointMap::constant(point));
    }
    if let Some(images) = spec.strip_prefix("wordhom:") {
        let images: Vec<String> = images.split(',').map(str::to_string).collect();
        return Ok(PointMap::word_homomorphism(images));
    }
    // tabulated on a truncation: {"table":[[from,to],...]} inline or in a file
    if spec.trim_start().starts_with('{') || std::path::Path::new(spec).exists() {
        let v = read_json(spec, field)?;
        let entries = v
            .get("table")
            .and_then(Value::as_array)
            .ok_or_else(|| CliError::schema(field, "tabulated maps need a `table` array"))?;
        let mut table = std::collections::BTreeMap::new();
        for (i, entry) in entries.iter().enumerate() {
            let pair: (Point, Point) = serde_json::from_value(entry.clone())
                .map_err(|e| CliError::schema(&format!("{field}.table[{i}]"), e.to_string()))?;
            table.insert(pair.0, pair.1);
        }
        return Ok(PointMap::tabulated(table));
    }
    Err(CliError::schema(
        field,
        format!("unknown map spec '{spec}'"),
    ))
}

pub fn parse_u64_list(text: &str, field: &str) -> CliResult<Vec<u64>> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<u64>()
                .map_err(|_| CliError::schema(field, format!("bad integer '{t}'")))
        })
        .collect()
}

pub fn parse_f64_list(text: &str, field: &str) -> CliResult<Vec<f64>> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| CliError::schema(field, format!("bad number '{t}'")))
        })
        .collect()
}
