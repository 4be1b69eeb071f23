//! Execution of the subcommands: each returns the `result` JSON object of
//! the report; the driver wraps it with the parameter echo.

use crate::specs::*;
use coarsegeom::asdim::{build_collar_cover, diagonal_escape, GradedCover};
use coarsegeom::carrier::Carrier;
use coarsegeom::coarsemaps::{are_close, is_bornologous_sampled, is_coarse_bornologous_sampled};
use coarsegeom::collar::CollarSpace;
use coarsegeom::ends::{
    end_tree, equivalent, Budget, EndRelation, HorizonPolicy, Ray, RelationKind,
};
use coarsegeom::higson::{corona_partition, so_defect_profile, ScalarField};
use coarsegeom::largescale::{check_coarse_axioms, ControlledSet, Cover};
use coarsegeom::space::{hyperbolicity_delta, FiniteMetricSpace, Point};
use serde_json::{json, Value};
use std::collections::BTreeSet;
use std::sync::Arc;

pub fn relation_from_name(
    name: &str,
    carrier: &Arc<Carrier>,
    fields: Vec<ScalarField>,
) -> CliResult<EndRelation> {
    let kind = match name {
        "metric" => RelationKind::Metric,
        "c0" => RelationKind::C0,
        "boundary" => RelationKind::BoundaryMetric,
        "group" => RelationKind::GroupLeft,
        "gromov" => RelationKind::Gromov {
            basepoint: carrier.default_base(),
        },
        "freudenthal" => RelationKind::Freudenthal {
            basepoint: carrier.default_base(),
        },
        "fields" => {
            if fields.is_empty() {
                return Err(CliError::schema("--fields", "the fields relation needs --fields"));
            }
            RelationKind::FunctionFamily(fields)
        }
        other => {
            return Err(CliError::schema(
                "--rel",
                format!("unknown relation '{other}' (metric|c0|boundary|group|gromov|freudenthal|fields)"),
            ))
        }
    };
    Ok(EndRelation::new(kind, carrier.clone()))
}

pub fn budget_from_flags(
    len: usize,
    max_scale: Option<f64>,
    tolerances: &Option<String>,
) -> CliResult<Budget> {
    let mut budget = Budget::for_prefix(len);
    if let Some(s) = max_scale {
        budget.max_scale = s;
    }
    if let Some(t) = tolerances {
        budget.tolerances = parse_f64_list(t, "--tolerances")?;
        if budget.tolerances.is_empty() {
            return Err(CliError::schema("--tolerances", "schedule is empty"));
        }
    }
    Ok(budget)
}

pub fn run_ends(
    graph_spec: &Value,
    levels: &[u64],
    horizon: &str,
    dot_path: Option<&str>,
) -> CliResult<Value> {
    let carrier = parse_carrier(graph_spec, "--graph")?;
    let graph = carrier
        .graph()
        .ok_or_else(|| CliError::schema("--graph", "ends needs a graph carrier"))?;
    let policy = match horizon {
        "double" => HorizonPolicy::Double,
        h if h.starts_with("offset:") => HorizonPolicy::Offset(
            h[7..]
                .parse()
                .map_err(|_| CliError::schema("--horizon", "bad offset"))?,
        ),
        h if h.starts_with("fixed:") => HorizonPolicy::Fixed(
            h[6..]
                .parse()
                .map_err(|_| CliError::schema("--horizon", "bad fixed horizon"))?,
        ),
        other => {
            return Err(CliError::schema(
                "--horizon",
                format!("unknown policy '{other}' (double|offset:K|fixed:H)"),
            ))
        }
    };
    let tree = end_tree(graph, &graph.root(), levels, policy)?;
    if let Some(path) = dot_path {
        std::fs::write(path, tree.to_dot())
            .map_err(|e| CliError::schema("--dot", format!("cannot write {path}: {e}")))?;
    }
    Ok(serde_json::to_value(tree.report()).expect("report serializes"))
}

pub fn run_delta(
    space_spec: &Value,
    radius: Option<u64>,
    margin: Option<u64>,
    base_index: Option<usize>,
) -> CliResult<Value> {
    let carrier = parse_carrier(space_spec, "--space")?;
    let fms: FiniteMetricSpace = match &*carrier {
        Carrier::Graph(g) => {
            let r = match (radius, g.family()) {
                (Some(r), _) => r,
                (None, coarsegeom::space::GraphFamily::Finite { adjacency, .. }) => {
                    adjacency.len() as u64
                }
                (None, _) => {
                    return Err(CliError::schema(
                        "--radius",
                        "infinite graphs need an explicit truncation radius",
                    ))
                }
            };
            coarsegeom::space::ball(g, &g.root(), r, margin.unwrap_or(r))?
        }
        Carrier::Collar(c) => c.to_metric_space(),
    };
    let report = hyperbolicity_delta(&fms, base_index)?;
    Ok(serde_json::to_value(report).expect("delta report serializes"))
}

#[allow(clippy::too_many_arguments)]
pub fn run_equiv(
    graph_spec: &Value,
    rel: &str,
    x: &Value,
    y: &Value,
    len: usize,
    fields: &Option<String>,
    max_scale: Option<f64>,
    tolerances: &Option<String>,
) -> CliResult<Value> {
    let carrier = parse_carrier(graph_spec, "--graph")?;
    let field_list = match fields {
        Some(spec) => spec
            .split(';')
            .map(|f| parse_field(f.trim(), &carrier, "--fields"))
            .collect::<CliResult<Vec<_>>>()?,
        None => Vec::new(),
    };
    let relation = relation_from_name(rel, &carrier, field_list)?;
    let rx = parse_ray(x, &carrier, len, "--x")?;
    let ry = parse_ray(y, &carrier, len, "--y")?;
    let budget = budget_from_flags(len, max_scale, tolerances)?;
    let verdict = equivalent(&relation, &rx, &ry, &budget)?;
    Ok(json!({
        "relation": rel,
        "budget": budget,
        "verdict": verdict,
    }))
}

pub fn run_so_profile(
    graph_spec: &Value,
    field_spec: &str,
    radii: &[u64],
    meshes: &[u64],
    horizon: u64,
    csv_path: Option<&str>,
) -> CliResult<Value> {
    let carrier = parse_carrier(graph_spec, "--graph")?;
    let graph = carrier
        .graph()
        .ok_or_else(|| CliError::schema("--graph", "so-profile needs a graph carrier"))?;
    let field = parse_field(field_spec, &carrier, "--field")?;
    let profile = so_defect_profile(&field, graph, &graph.root(), meshes, radii, horizon)?;
    if let Some(path) = csv_path {
        std::fs::write(path, profile.to_csv())
            .map_err(|e| CliError::schema("--csv", format!("cannot write {path}: {e}")))?;
    }
    Ok(json!({
        "field": field.tag,
        "profile": profile,
    }))
}

#[allow(clippy::too_many_arguments)]
pub fn run_corona(
    graph_spec: &Value,
    rays_spec: &Value,
    rel: &str,
    len: usize,
    fields: &Option<String>,
    max_scale: Option<f64>,
    tolerances: &Option<String>,
) -> CliResult<Value> {
    let carrier = parse_carrier(graph_spec, "--graph")?;
    let rays = parse_rays(rays_spec, &carrier, len, "--rays")?;
    let field_list = match fields {
        Some(spec) => spec
            .split(';')
            .map(|f| parse_field(f.trim(), &carrier, "--fields"))
            .collect::<CliResult<Vec<_>>>()?,
        None => Vec::new(),
    };
    let relation = relation_from_name(rel, &carrier, field_list)?;
    let budget = budget_from_flags(len, max_scale, tolerances)?;
    let partition = corona_partition(&rays, &relation, &budget)?;
    Ok(serde_json::to_value(partition).expect("partition serializes"))
}

pub fn run_axioms(generators_spec: &Value, points: usize, depth: usize) -> CliResult<Value> {
    let arr = generators_spec
        .as_array()
        .ok_or_else(|| CliError::schema("--generators", "expected an array of pair lists"))?;
    let mut generators = Vec::with_capacity(arr.len());
    for (i, g) in arr.iter().enumerate() {
        let pairs: Vec<(usize, usize)> = serde_json::from_value(g.clone())
            .map_err(|e| CliError::schema(&format!("--generators[{i}]"), e.to_string()))?;
        generators.push(ControlledSet::new(pairs));
    }
    let report = check_coarse_axioms(&generators, points, depth);
    Ok(serde_json::to_value(report).expect("axiom report serializes"))
}

/// Canned collar construction: graded covers (arcs then singletons over a
/// cycle, singletons over a point) and a shrinking box cover.
pub fn run_collar_cover(
    boundary: &str,
    levels: usize,
    k: usize,
    max_steps: Option<usize>,
) -> CliResult<Value> {
    let (fms, arc_cover): (FiniteMetricSpace, Option<Cover>) = if boundary == "point" {
        (
            FiniteMetricSpace::from_matrix(vec![Point::Vertex(0)], vec![0.0]).expect("point"),
            None,
        )
    } else if let Some(rest) = boundary.strip_prefix("cycle:") {
        let parts: Vec<&str> = rest.split(':').collect();
        let n: usize = parts
            .first()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| CliError::schema("--boundary", "cycle needs a size (cycle:N[:scale])"))?;
        if n < 4 || n % 2 != 0 {
            return Err(CliError::schema("--boundary", "cycle size must be even and ≥ 4"));
        }
        let scale: f64 = parts.get(1).and_then(|t| t.parse().ok()).unwrap_or(1.0 / n as f64);
        let arcs: Vec<BTreeSet<usize>> = (0..n / 2)
            .map(|i| [2 * i, 2 * i + 1, (2 * i + 2) % n].into_iter().collect())
            .collect();
        (FiniteMetricSpace::cycle(n, scale), Some(Cover::new(arcs)))
    } else {
        return Err(CliError::schema(
            "--boundary",
            format!("unknown boundary '{boundary}' (point|cycle:N[:scale])"),
        ));
    };
    if k == 0 && arc_cover.is_some() {
        return Err(CliError::schema(
            "--k",
            "cycle boundaries need k ≥ 1 (arc covers have multiplicity 2)",
        ));
    }
    let collar = CollarSpace::harmonic(fms.clone(), levels)?;
    let spacing = if fms.len() > 1 { fms.dist(0, 1) } else { 1.0 };
    let n_boundary = fms.len();
    let singletons = Cover::new((0..n_boundary).map(|a| [a].into_iter().collect()).collect());
    let grade_count = (levels / 2).max(8);
    let grades: Vec<GradedCover> = (1..=grade_count)
        .map(|g| {
            let cover = match &arc_cover {
                Some(arcs) if (g as f64) * 2.0 * spacing <= 1.0 => arcs.clone(),
                _ => singletons.clone(),
            };
            GradedCover {
                cover,
                delta: 0.9 * spacing.min(0.6) * 0.72f64.powi(g as i32 - 1),
            }
        })
        .collect();
    // shrinking boxes: short arcs near the top, singleton columns below
    let mut elements: Vec<BTreeSet<usize>> = Vec::new();
    for j in 0..levels - 1 {
        for a in 0..n_boundary {
            let mut e = BTreeSet::new();
            e.insert(collar.flat_index(a, j));
            e.insert(collar.flat_index(a, j + 1));
            if j < 4 && n_boundary > 1 {
                e.insert(collar.flat_index((a + 1) % n_boundary, j));
                e.insert(collar.flat_index((a + 1) % n_boundary, j + 1));
            }
            elements.push(e);
        }
    }
    for a in 0..n_boundary {
        elements.push([collar.flat_index(a, levels - 1)].into_iter().collect());
    }
    let plan = build_collar_cover(&collar, &grades, &Cover::new(elements), k, max_steps)?;
    let trace_lines: Vec<String> = plan
        .trace
        .iter()
        .map(|t| {
            format!(
                "step {}: level gap {:.6}, grade {}, star floor {:.6}, next level {:.6}",
                t.step, t.level_gap, t.chosen_alpha, t.star_min_depth, t.chosen_mu
            )
        })
        .collect();
    Ok(json!({
        "boundary": boundary,
        "levels": levels,
        "k": k,
        "multiplicity": plan.multiplicity,
        "bound": 3 * (k + 1),
        "mu": plan.mu,
        "alpha": plan.alpha,
        "covered_depth": plan.covered_depth,
        "band_count": plan.bands.len(),
        "element_count": plan.w.elements.len(),
        // band elements as flat collar indices (boundary · levels + depth)
        "w": plan.w,
        "trace": plan.trace,
        "trace_lines": trace_lines,
    }))
}

pub fn run_diag(family: &str, size: usize, r_max: usize) -> CliResult<Value> {
    let tables: Vec<Vec<Vec<f64>>> = match family {
        "zero" => vec![vec![vec![0.0; r_max]; size.max(1)]; size.max(1)],
        f if f.starts_with("const:") => {
            let c: f64 = f[6..]
                .parse()
                .map_err(|_| CliError::schema("--family", "bad constant"))?;
            vec![vec![vec![c; r_max]; size.max(1)]; size.max(1)]
        }
        "rowindex" => (0..size.max(1))
            .map(|_| {
                (0..size.max(1))
                    .map(|i| vec![(i + 1) as f64; r_max])
                    .collect()
            })
            .collect(),
        f => {
            let v = read_json(f, "--family")?;
            serde_json::from_value(v)
                .map_err(|e| CliError::schema("--family", e.to_string()))?
        }
    };
    let out = diagonal_escape(&tables, r_max)?;
    Ok(serde_json::to_value(out).expect("diagonal report serializes"))
}

#[allow(clippy::too_many_arguments)]
pub fn run_maps(
    graph_spec: &Value,
    map_spec: &str,
    map2_spec: &Option<String>,
    check: &str,
    rel: &str,
    rays_spec: &Value,
    len: usize,
    max_scale: Option<f64>,
    tolerances: &Option<String>,
) -> CliResult<Value> {
    let carrier = parse_carrier(graph_spec, "--graph")?;
    let relation = relation_from_name(rel, &carrier, Vec::new())?;
    let map = parse_map(map_spec, &carrier, "--map")?;
    let rays = parse_rays(rays_spec, &carrier, len, "--rays")?;
    let budget = budget_from_flags(len, max_scale, tolerances)?;
    let verdict = match check {
        "bornologous" => {
            if rays.len() % 2 != 0 {
                return Err(CliError::schema(
                    "--rays",
                    "the bornologous check pairs rays consecutively; supply an even count",
                ));
            }
            let pairs: Vec<(Ray, Ray)> = rays
                .chunks(2)
                .map(|c| (c[0].clone(), c[1].clone()))
                .collect();
            is_bornologous_sampled(&map, &relation, &relation, &pairs, &budget)?
        }
        "coarse" => {
            let basis: Vec<Vec<Point>> = vec![ball_points(&carrier, 2)?];
            is_coarse_bornologous_sampled(&map, &relation, &relation, &rays, &basis, &budget)?
        }
        "close" => {
            let spec2 = map2_spec
                .as_ref()
                .ok_or_else(|| CliError::schema("--map2", "the close check needs a second map"))?;
            let map2 = parse_map(spec2, &carrier, "--map2")?;
            are_close(&map, &map2, &relation, &rays, &budget)?
        }
        other => {
            return Err(CliError::schema(
                "--check",
                format!("unknown check '{other}' (bornologous|coarse|close)"),
            ))
        }
    };
    Ok(json!({
        "map": map.tag,
        "check": check,
        "verdict": verdict,
    }))
}

fn ball_points(carrier: &Arc<Carrier>, radius: u64) -> CliResult<Vec<Point>> {
    match &**carrier {
        Carrier::Graph(g) => {
            let ball = g.bfs_distances(&g.root(), radius)?;
            let mut pts: Vec<Point> = ball.into_keys().collect();
            pts.sort();
            Ok(pts)
        }
        Carrier::Collar(c) => {
            let mut pts = Vec::new();
            for a in 0..c.boundary().len() {
                pts.push(c.point(a, 0));
            }
            Ok(pts)
        }
    }
}
