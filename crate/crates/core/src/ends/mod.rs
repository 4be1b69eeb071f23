//! End-equivalence relations as scale-indexed decision procedures, and
//! Freudenthal end trees.
//!
//! Each relation quantifies over infinite tails, so decisions are returned
//! as [`ScaleVerdict`]s: EQUIVALENT only with a stability certificate
//! (flatness or cleared thresholds on the tail tranche), DISTINGUISHED only
//! with a concrete witness (growth certificate, permanent separation, or a
//! separating radius), INCONCLUSIVE otherwise.

pub mod ray;
pub mod verdict;

pub use ray::{extend_ray, EscapeCertificate, Ray, RayGenerator};
pub use verdict::{Budget, ScaleVerdict, VerdictStatus};

use crate::carrier::Carrier;
use crate::error::{Error, Result};
use crate::higson::ScalarField;
use crate::space::{complement_components, ComponentLabeling, Point};
use serde::Serialize;
use std::collections::BTreeSet;
use std::sync::Arc;

#[derive(Clone)]
pub enum RelationKind {
    /// Bounded distance: some M with d(x_n, y_n) < M for all n.
    Metric,
    /// d(x_n, y_n) → 0.
    C0,
    /// Distance in the ambient extension metric → 0 (collar carriers).
    BoundaryMetric,
    /// |f(x_n) − f(y_n)| → 0 for every field in the family.
    FunctionFamily(Vec<ScalarField>),
    /// x_n⁻¹·y_n ranges over a fixed finite set.
    GroupLeft,
    /// ⟨x_n, y_n⟩_p → ∞ for the fixed base point.
    Gromov { basepoint: Point },
    /// No complement component of a ball eventually separates the tails.
    Freudenthal { basepoint: Point },
}

impl RelationKind {
    pub fn name(&self) -> &'static str {
        match self {
            RelationKind::Metric => "metric",
            RelationKind::C0 => "c0",
            RelationKind::BoundaryMetric => "boundary-metric",
            RelationKind::FunctionFamily(_) => "function-family",
            RelationKind::GroupLeft => "group-left",
            RelationKind::Gromov { .. } => "gromov",
            RelationKind::Freudenthal { .. } => "freudenthal",
        }
    }
}

#[derive(Clone)]
pub struct EndRelation {
    pub kind: RelationKind,
    pub carrier: Arc<Carrier>,
}

impl EndRelation {
    pub fn new(kind: RelationKind, carrier: Arc<Carrier>) -> EndRelation {
        EndRelation { kind, carrier }
    }
}

fn check_carriers(rel: &EndRelation, x: &Ray, y: &Ray) -> Result<()> {
    let (sa, sb, sc) = (
        rel.carrier.signature(),
        x.carrier().signature(),
        y.carrier().signature(),
    );
    if sb != sc {
        return Err(Error::CarrierMismatch(sb, sc));
    }
    if sa != sb {
        return Err(Error::CarrierMismatch(sa, sb));
    }
    Ok(())
}

/// Decide equivalence of two rays under a relation, within a budget.
pub fn equivalent(rel: &EndRelation, x: &Ray, y: &Ray, budget: &Budget) -> Result<ScaleVerdict> {
    x.require_escaping()?;
    y.require_escaping()?;
    equivalent_certified(rel, x, y, budget)
}

/// Like [`equivalent`], but without the per-prefix escape check. For
/// selection rays drawn from a medium end whose blocks already carry the
/// escape certificate: a selection may wobble in gauge even though the
/// underlying object escapes.
pub fn equivalent_certified(
    rel: &EndRelation,
    x: &Ray,
    y: &Ray,
    budget: &Budget,
) -> Result<ScaleVerdict> {
    if budget.tolerances.is_empty() {
        return Err(Error::EmptySchedule);
    }
    check_carriers(rel, x, y)?;
    let len = x.len().min(y.len());
    if x.points()[..len] == y.points()[..len] {
        return Ok(ScaleVerdict::equivalent(0.0, "identical prefixes"));
    }
    if len < 4 {
        return Ok(ScaleVerdict::inconclusive(format!(
            "prefix length {len} too short for tranche analysis"
        )));
    }
    match &rel.kind {
        RelationKind::Metric => {
            let d = pair_series(rel, x, y, len, |c, a, b| c.distance(a, b))?;
            Ok(bounded_distance_verdict(&d, budget))
        }
        RelationKind::C0 => {
            let d = pair_series(rel, x, y, len, |c, a, b| c.distance(a, b))?;
            Ok(vanishing_verdict(&d, budget, "d"))
        }
        RelationKind::BoundaryMetric => {
            if rel.carrier.collar().is_none() {
                return Err(Error::invalid(
                    "boundary-metric relation needs a collar carrier",
                ));
            }
            let d = pair_series(rel, x, y, len, |c, a, b| c.distance(a, b))?;
            Ok(vanishing_verdict(&d, budget, "d"))
        }
        RelationKind::FunctionFamily(fields) => {
            if fields.is_empty() {
                return Err(Error::invalid("function family is empty"));
            }
            let mut inconclusive: Option<ScaleVerdict> = None;
            let mut scale = 0.0f64;
            for f in fields {
                let mut vals = Vec::with_capacity(len);
                for n in 0..len {
                    vals.push((f.eval(x.point(n))? - f.eval(y.point(n))?).abs());
                }
                let v = vanishing_verdict(&vals, budget, &f.tag);
                match v {
                    ScaleVerdict::Distinguished { .. } => return Ok(v),
                    ScaleVerdict::Inconclusive { .. } => {
                        if inconclusive.is_none() {
                            inconclusive = Some(v);
                        }
                    }
                    ScaleVerdict::Equivalent { scale: s, .. } => scale = scale.max(s),
                }
            }
            Ok(inconclusive.unwrap_or_else(|| {
                ScaleVerdict::equivalent(
                    scale,
                    format!("all {} fields vanish on the tail", fields.len()),
                )
            }))
        }
        RelationKind::GroupLeft => group_left_verdict(rel, x, y, len, budget),
        RelationKind::Gromov { basepoint } => {
            let g = pair_series(rel, x, y, len, |c, a, b| c.gromov_product(a, b, basepoint))?;
            Ok(divergence_verdict(&g, budget))
        }
        RelationKind::Freudenthal { basepoint } => {
            freudenthal_verdict(rel, basepoint, x, y, len, budget)
        }
    }
}

fn pair_series<F>(rel: &EndRelation, x: &Ray, y: &Ray, len: usize, f: F) -> Result<Vec<f64>>
where
    F: Fn(&Carrier, &Point, &Point) -> Result<f64>,
{
    (0..len)
        .map(|n| f(&rel.carrier, x.point(n), y.point(n)))
        .collect()
}

fn tail_start(len: usize) -> usize {
    len / 2
}

/// Bounded-distance rule: EQUIVALENT when the sup is realized early and the
/// tail stays flat; DISTINGUISHED on a monotone-growth certificate over the
/// tail (average slope ≥ 1/4) or when the tail sits permanently above the
/// scale cap.
fn bounded_distance_verdict(d: &[f64], budget: &Budget) -> ScaleVerdict {
    let len = d.len();
    let half = tail_start(len);
    let sup_all = d.iter().cloned().fold(0.0f64, f64::max);
    let sup_head = d[..half].iter().cloned().fold(0.0f64, f64::max);
    let sup_tail = d[half..].iter().cloned().fold(0.0f64, f64::max);
    if sup_tail <= sup_head && sup_all < budget.max_scale {
        return ScaleVerdict::equivalent(
            sup_all + 1.0,
            format!("sup distance {sup_all} realized early and flat on the tail; M = {}", sup_all + 1.0),
        );
    }
    let tail = &d[half..];
    let monotone = tail.windows(2).all(|w| w[1] >= w[0]);
    let growth = tail.last().unwrap() - tail[0];
    if monotone && growth >= (tail.len() as f64 / 4.0).max(2.0) {
        return ScaleVerdict::distinguished_at_index(
            len - 1,
            d[len - 1],
            format!(
                "distance grows monotonically by {growth} over the tail tranche, final value {}",
                d[len - 1]
            ),
        );
    }
    let inf_tail = tail.iter().cloned().fold(f64::INFINITY, f64::min);
    if inf_tail > budget.max_scale {
        return ScaleVerdict::distinguished_at_radius(
            budget.max_scale,
            inf_tail,
            format!("distance stays above the scale cap {} on the tail", budget.max_scale),
        );
    }
    ScaleVerdict::inconclusive(format!(
        "no flatness or growth certificate at {}",
        budget.describe()
    ))
}

/// Vanishing rule for C0-style conditions: every tolerance must be cleared
/// by an index leaving at least a quarter of the prefix as evidence;
/// permanent separation on the tail tranche distinguishes.
fn vanishing_verdict(values: &[f64], budget: &Budget, label: &str) -> ScaleVerdict {
    let len = values.len();
    let half = tail_start(len);
    // suffix suprema
    let mut suffix_sup = vec![0.0f64; len + 1];
    for n in (0..len).rev() {
        suffix_sup[n] = values[n].max(suffix_sup[n + 1]);
    }
    let latest_allowed = (3 * len) / 4;
    let mut cleared = Vec::new();
    let mut all_cleared = true;
    for &eps in &budget.tolerances {
        match (0..len).find(|&m| suffix_sup[m] < eps) {
            Some(m) if m <= latest_allowed => cleared.push((eps, m)),
            _ => {
                all_cleared = false;
                break;
            }
        }
    }
    if all_cleared {
        let min_eps = budget.tolerances.iter().cloned().fold(f64::INFINITY, f64::min);
        return ScaleVerdict::equivalent(
            1.0 / min_eps,
            format!("{label}: tail sup below each tolerance by indices {cleared:?}"),
        );
    }
    let inf_tail = values[half..].iter().cloned().fold(f64::INFINITY, f64::min);
    let separating = budget
        .tolerances
        .iter()
        .cloned()
        .filter(|&e| inf_tail >= e)
        .fold(f64::NEG_INFINITY, f64::max);
    if separating.is_finite() {
        return ScaleVerdict::distinguished_at_radius(
            separating,
            inf_tail,
            format!("{label}: stays ≥ {separating} on the tail tranche (inf {inf_tail})"),
        );
    }
    ScaleVerdict::inconclusive(format!(
        "{label}: neither vanishing nor permanent separation at {}",
        budget.describe()
    ))
}

/// Divergence rule for Gromov products: every threshold must be cleared by
/// an index leaving a quarter of the prefix; a tail with no growth over the
/// head tranche is a boundedness witness.
fn divergence_verdict(g: &[f64], budget: &Budget) -> ScaleVerdict {
    let len = g.len();
    let half = tail_start(len);
    let mut suffix_inf = vec![f64::INFINITY; len + 1];
    for n in (0..len).rev() {
        suffix_inf[n] = g[n].min(suffix_inf[n + 1]);
    }
    let latest_allowed = (3 * len) / 4;
    let thresholds = budget.thresholds();
    let mut cleared = Vec::new();
    let mut all_cleared = true;
    for &t in &thresholds {
        match (0..len).find(|&m| suffix_inf[m] >= t) {
            Some(m) if m <= latest_allowed => cleared.push((t, m)),
            _ => {
                all_cleared = false;
                break;
            }
        }
    }
    if all_cleared {
        let t_max = thresholds.iter().cloned().fold(0.0f64, f64::max);
        return ScaleVerdict::equivalent(
            t_max,
            format!("product clears thresholds by indices {cleared:?}"),
        );
    }
    let sup_head = g[..half].iter().cloned().fold(0.0f64, f64::max);
    let sup_tail = g[half..].iter().cloned().fold(0.0f64, f64::max);
    if sup_tail <= sup_head {
        let arg = half
            + g[half..]
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.total_cmp(b.1))
                .map(|(i, _)| i)
                .unwrap_or(0);
        return ScaleVerdict::distinguished_at_index(
            arg,
            sup_tail,
            format!("product bounded by {sup_tail} on the tail tranche, no growth"),
        );
    }
    ScaleVerdict::inconclusive(format!(
        "product still growing but thresholds not cleared at {}",
        budget.describe()
    ))
}

fn group_left_verdict(
    rel: &EndRelation,
    x: &Ray,
    y: &Ray,
    len: usize,
    budget: &Budget,
) -> Result<ScaleVerdict> {
    let half = tail_start(len);
    let mut diffs = Vec::with_capacity(len);
    for n in 0..len {
        diffs.push(rel.carrier.group_diff(x.point(n), y.point(n))?);
    }
    let mut seen: BTreeSet<&Point> = BTreeSet::new();
    let mut first_occurrence = Vec::new();
    for (n, q) in diffs.iter().enumerate() {
        if seen.insert(q) {
            first_occurrence.push(n);
        }
    }
    let new_in_tail: Vec<usize> = first_occurrence
        .iter()
        .copied()
        .filter(|&n| n >= half)
        .collect();
    let gauge = |q: &Point| q.word_length().map(|l| l as f64).unwrap_or(f64::NAN);
    if new_in_tail.is_empty() && (seen.len() as f64) <= budget.max_scale {
        return Ok(ScaleVerdict::equivalent(
            seen.len() as f64,
            format!(
                "difference set has {} values, stable over the tail tranche",
                seen.len()
            ),
        ));
    }
    let head_gauge = diffs[..half].iter().map(|q| gauge(q)).fold(0.0f64, f64::max);
    let tail_gauge = diffs[half..].iter().map(|q| gauge(q)).fold(0.0f64, f64::max);
    if !new_in_tail.is_empty() && tail_gauge > head_gauge {
        let witness = *new_in_tail.last().unwrap();
        return Ok(ScaleVerdict::distinguished_at_index(
            witness,
            gauge(&diffs[witness]),
            format!(
                "new difference values keep appearing (index {witness}, |q| = {}), word length growing",
                gauge(&diffs[witness])
            ),
        ));
    }
    Ok(ScaleVerdict::inconclusive(format!(
        "difference set neither stable nor escaping at {}",
        budget.describe()
    )))
}

fn freudenthal_verdict(
    rel: &EndRelation,
    basepoint: &Point,
    x: &Ray,
    y: &Ray,
    len: usize,
    budget: &Budget,
) -> Result<ScaleVerdict> {
    let graph = rel
        .carrier
        .graph()
        .ok_or_else(|| Error::invalid("freudenthal relation needs a graph carrier"))?;
    // gauges with respect to the relation's base point
    let gauge = |ray: &Ray, n: usize| rel.carrier.escape_gauge(basepoint, ray.point(n));
    let mut agreements = Vec::new();
    let mut any_inconclusive = false;
    for r in budget.radii() {
        // tail = indices after the last visit to B(base, r)
        let tail_start = |ray: &Ray| -> Result<usize> {
            let mut last_inside = None;
            for n in 0..len {
                if gauge(ray, n)? <= r as f64 {
                    last_inside = Some(n);
                }
            }
            Ok(last_inside.map(|n| n + 1).unwrap_or(0))
        };
        let (sx, sy) = (tail_start(x)?, tail_start(y)?);
        if sx >= len || sy >= len {
            any_inconclusive = true;
            continue;
        }
        // horizon must reach the nearest tail point of each ray
        let mut need = 0.0f64;
        for (ray, start) in [(x, sx), (y, sy)] {
            let mut m = f64::INFINITY;
            for n in start..len {
                m = m.min(gauge(ray, n)?);
            }
            need = need.max(m);
        }
        let horizon = (2 * r + 2).max(need.ceil() as u64 + 1);
        let labeling = complement_components(graph, basepoint, r, horizon)?;
        let occupancy = |ray: &Ray, start: usize| -> Result<BTreeSet<usize>> {
            let mut occ = BTreeSet::new();
            for n in start..len {
                if let Some(&c) = labeling.membership.get(ray.point(n)) {
                    occ.insert(c);
                }
            }
            Ok(occ)
        };
        let cx = occupancy(x, sx)?;
        let cy = occupancy(y, sy)?;
        if cx.is_empty() || cy.is_empty() {
            any_inconclusive = true;
            continue;
        }
        if cx.is_disjoint(&cy) {
            return Ok(ScaleVerdict::distinguished_at_radius(
                r as f64,
                r as f64,
                format!(
                    "tails occupy disjoint component sets {:?} vs {:?} of the (r={r}, horizon={horizon}) annulus",
                    cx.iter().map(|&c| labeling.id(c).to_string()).collect::<Vec<_>>(),
                    cy.iter().map(|&c| labeling.id(c).to_string()).collect::<Vec<_>>()
                ),
            ));
        }
        if cx == cy {
            agreements.push(r);
        } else {
            any_inconclusive = true;
        }
    }
    if any_inconclusive {
        Ok(ScaleVerdict::inconclusive(format!(
            "component occupancy not decisive at every radius in {:?}",
            budget.radii()
        )))
    } else {
        Ok(ScaleVerdict::equivalent(
            *agreements.last().unwrap_or(&1) as f64,
            format!("tails share annulus components at radii {agreements:?}"),
        ))
    }
}

/// Per-level complement components with refinement maps along a radius
/// schedule. All levels are computed inside one horizon (taken from the
/// policy at the largest scheduled radius) so deeper annuli are subsets of
/// shallower ones and the refinement maps are well-defined.
#[derive(Debug, Clone)]
pub struct EndTree {
    pub levels: Vec<TreeLevel>,
    /// `refinements[i][c]` is the index of the level-i component containing
    /// component c of level i+1.
    pub refinements: Vec<Vec<usize>>,
    pub horizon: u64,
}

#[derive(Debug, Clone)]
pub struct TreeLevel {
    pub radius: u64,
    pub labeling: ComponentLabeling,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub enum HorizonPolicy {
    /// Use exactly this horizon.
    Fixed(u64),
    /// horizon = largest radius + offset.
    Offset(u64),
    /// horizon = 2·largest radius + 2.
    Double,
}

impl HorizonPolicy {
    pub fn horizon(&self, max_radius: u64) -> u64 {
        match self {
            HorizonPolicy::Fixed(h) => *h,
            HorizonPolicy::Offset(k) => max_radius + k,
            HorizonPolicy::Double => 2 * max_radius + 2,
        }
    }
}

pub fn end_tree(
    graph: &crate::space::LazyGraph,
    base: &Point,
    schedule: &[u64],
    policy: HorizonPolicy,
) -> Result<EndTree> {
    if schedule.is_empty() {
        return Err(Error::EmptySchedule);
    }
    for w in schedule.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::invalid("radius schedule must be strictly increasing"));
        }
    }
    let max_radius = *schedule.last().unwrap();
    let horizon = policy.horizon(max_radius);
    if horizon <= max_radius {
        return Err(Error::invalid("horizon must exceed the largest radius"));
    }
    let mut levels = Vec::with_capacity(schedule.len());
    for &r in schedule {
        levels.push(TreeLevel {
            radius: r,
            labeling: complement_components(graph, base, r, horizon)?,
        });
    }
    let mut refinements = Vec::with_capacity(levels.len().saturating_sub(1));
    for i in 0..levels.len().saturating_sub(1) {
        let shallow = &levels[i].labeling;
        let deep = &levels[i + 1].labeling;
        let mut map = Vec::with_capacity(deep.components.len());
        for members in &deep.components {
            let rep = &members[0];
            let parent = shallow.membership.get(rep).copied().ok_or_else(|| {
                Error::invalid(format!(
                    "refinement undefined: {rep} missing from the level-{} annulus",
                    levels[i].radius
                ))
            })?;
            map.push(parent);
        }
        refinements.push(map);
    }
    Ok(EndTree {
        levels,
        refinements,
        horizon,
    })
}

/// Number of components at a scheduled level.
pub fn end_class_count(tree: &EndTree, radius: u64) -> Result<usize> {
    tree.levels
        .iter()
        .find(|l| l.radius == radius)
        .map(|l| l.labeling.count())
        .ok_or(Error::UnknownLevel(radius))
}

#[derive(Debug, Clone, Serialize)]
pub struct EndTreeReport {
    pub horizon: u64,
    pub levels: Vec<LevelReport>,
    pub refinements: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct LevelReport {
    pub radius: u64,
    pub count: usize,
    pub components: Vec<ComponentReport>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ComponentReport {
    pub id: String,
    pub size: usize,
}

impl EndTree {
    pub fn report(&self) -> EndTreeReport {
        EndTreeReport {
            horizon: self.horizon,
            levels: self
                .levels
                .iter()
                .map(|l| LevelReport {
                    radius: l.radius,
                    count: l.labeling.count(),
                    components: l
                        .labeling
                        .components
                        .iter()
                        .map(|members| ComponentReport {
                            id: members[0].to_string(),
                            size: members.len(),
                        })
                        .collect(),
                })
                .collect(),
            refinements: self.refinements.clone(),
        }
    }

    /// Graphviz rendering: one rank per level, refinement maps as edges
    /// from deeper to shallower components.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph ends {\n  rankdir=BT;\n  node [shape=box];\n");
        for (i, level) in self.levels.iter().enumerate() {
            out.push_str("  { rank=same;");
            for (c, members) in level.labeling.components.iter().enumerate() {
                out.push_str(&format!(
                    " \"L{i}C{c}\" [label=\"r={} {} (#{})\"];",
                    level.radius,
                    members[0],
                    members.len()
                ));
            }
            out.push_str(" }\n");
        }
        for (i, map) in self.refinements.iter().enumerate() {
            for (c, &parent) in map.iter().enumerate() {
                out.push_str(&format!(
                    "  \"L{}C{c}\" -> \"L{i}C{parent}\";\n",
                    i + 1
                ));
            }
        }
        out.push_str("}\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::LazyGraph;

    fn line() -> Arc<Carrier> {
        Arc::new(Carrier::Graph(LazyGraph::lattice(1)))
    }

    fn grid() -> Arc<Carrier> {
        Arc::new(Carrier::Graph(LazyGraph::lattice(2)))
    }

    fn f2() -> Arc<Carrier> {
        Arc::new(Carrier::Graph(LazyGraph::free_group(2)))
    }

    fn axis_ray(carrier: &Arc<Carrier>, direction: Vec<i64>, len: usize) -> Ray {
        Ray::from_generator(
            carrier.clone(),
            RayGenerator::LatticeAxis { direction },
            len,
        )
        .unwrap()
    }

    fn word_ray(carrier: &Arc<Carrier>, head: &str, cycle: &str, len: usize) -> Ray {
        Ray::from_generator(
            carrier.clone(),
            RayGenerator::WordPath {
                head: head.into(),
                cycle: cycle.into(),
            },
            len,
        )
        .unwrap()
    }

    /// Shifted copy of the n ↦ n ray: x_n = n + shift.
    fn shifted_ray(carrier: &Arc<Carrier>, shift: i64, len: usize) -> Ray {
        let pts = (0..len as i64).map(|n| Point::Lattice(vec![n + shift])).collect();
        Ray::new(carrier.clone(), Point::Lattice(vec![0]), pts, None).unwrap()
    }

    #[test]
    fn metric_bounded_pair_is_equivalent() {
        let c = line();
        let x = axis_ray(&c, vec![1], 100);
        let y = shifted_ray(&c, 5, 100);
        let rel = EndRelation::new(RelationKind::Metric, c.clone());
        let v = equivalent(&rel, &x, &y, &x.default_budget()).unwrap();
        match v {
            ScaleVerdict::Equivalent { scale, .. } => assert_eq!(scale, 6.0),
            other => panic!("expected equivalent, got {other:?}"),
        }
    }

    #[test]
    fn metric_opposite_rays_distinguished() {
        let c = line();
        let x = axis_ray(&c, vec![1], 100);
        let y = axis_ray(&c, vec![-1], 100);
        let rel = EndRelation::new(RelationKind::Metric, c.clone());
        let v = equivalent(&rel, &x, &y, &x.default_budget()).unwrap();
        assert!(v.is_distinguished());
    }

    #[test]
    fn freudenthal_vs_metric_on_the_grid() {
        let c = grid();
        let x = axis_ray(&c, vec![1, 0], 60);
        let y = axis_ray(&c, vec![0, 1], 60);
        let budget = Budget::new(16.0, vec![1.0, 0.5, 0.25]).unwrap();
        let fre = EndRelation::new(
            RelationKind::Freudenthal {
                basepoint: Point::origin(2),
            },
            c.clone(),
        );
        assert!(equivalent(&fre, &x, &y, &budget).unwrap().is_equivalent());
        let met = EndRelation::new(RelationKind::Metric, c.clone());
        assert!(equivalent(&met, &x, &y, &budget).unwrap().is_distinguished());
    }

    #[test]
    fn freudenthal_separates_line_ends() {
        let c = line();
        let x = axis_ray(&c, vec![1], 60);
        let y = axis_ray(&c, vec![-1], 60);
        let rel = EndRelation::new(
            RelationKind::Freudenthal {
                basepoint: Point::Lattice(vec![0]),
            },
            c.clone(),
        );
        let v = equivalent(&rel, &x, &y, &Budget::new(8.0, vec![1.0]).unwrap()).unwrap();
        match v {
            ScaleVerdict::Distinguished { witness_radius, .. } => {
                assert_eq!(witness_radius, Some(1.0))
            }
            other => panic!("expected distinguished, got {other:?}"),
        }
    }

    #[test]
    fn gromov_branches_in_the_free_group() {
        let c = f2();
        let x = word_ray(&c, "", "a", 60);
        let y = word_ray(&c, "", "b", 60);
        let rel = EndRelation::new(
            RelationKind::Gromov {
                basepoint: Point::identity_word(),
            },
            c.clone(),
        );
        let v = equivalent(&rel, &x, &y, &x.default_budget()).unwrap();
        assert!(v.is_distinguished());
        // same branch diverges together
        let z = word_ray(&c, "a", "a", 60);
        let v = equivalent(&rel, &x, &z, &x.default_budget()).unwrap();
        assert!(v.is_equivalent());
    }

    /// The divergence relation is insensitive to the base point choice on
    /// the tested pairs (checked, not assumed).
    #[test]
    fn gromov_verdicts_agree_across_base_points() {
        let c = f2();
        let pairs = [
            (word_ray(&c, "", "a", 60), word_ray(&c, "aa", "a", 60)),
            (word_ray(&c, "", "a", 60), word_ray(&c, "", "b", 60)),
            (word_ray(&c, "a", "b", 60), word_ray(&c, "abb", "b", 60)),
        ];
        let budget = Budget::for_prefix(60);
        for (x, y) in &pairs {
            let statuses: Vec<VerdictStatus> = ["", "a", "bA"]
                .iter()
                .map(|base| {
                    let rel = EndRelation::new(
                        RelationKind::Gromov {
                            basepoint: Point::Word((*base).into()),
                        },
                        c.clone(),
                    );
                    equivalent(&rel, x, y, &budget).unwrap().status()
                })
                .collect();
            assert!(
                statuses.windows(2).all(|w| w[0] == w[1]),
                "base-dependent statuses {statuses:?}"
            );
        }
    }

    #[test]
    fn identical_rays_trivially_equivalent() {
        let c = line();
        let x = axis_ray(&c, vec![1], 10);
        for kind in [
            RelationKind::Metric,
            RelationKind::C0,
            RelationKind::GroupLeft,
            RelationKind::Gromov {
                basepoint: Point::Lattice(vec![0]),
            },
            RelationKind::Freudenthal {
                basepoint: Point::Lattice(vec![0]),
            },
        ] {
            let rel = EndRelation::new(kind, c.clone());
            let v = equivalent(&rel, &x, &x, &x.default_budget()).unwrap();
            assert!(v.is_equivalent(), "{} not reflexive", rel.kind.name());
        }
    }

    #[test]
    fn group_left_matches_bounded_difference() {
        let c = line();
        let x = axis_ray(&c, vec![1], 100);
        let y = shifted_ray(&c, 5, 100);
        let rel = EndRelation::new(RelationKind::GroupLeft, c.clone());
        assert!(equivalent(&rel, &x, &y, &x.default_budget())
            .unwrap()
            .is_equivalent());
        // doubling map escapes
        let pts = (0..100i64).map(|n| Point::Lattice(vec![2 * n])).collect();
        let z = Ray::new(c.clone(), Point::Lattice(vec![0]), pts, None).unwrap();
        assert!(equivalent(&rel, &x, &z, &x.default_budget())
            .unwrap()
            .is_distinguished());
    }

    #[test]
    fn carrier_mismatch_is_an_error() {
        let x = axis_ray(&line(), vec![1], 10);
        let y = axis_ray(&grid(), vec![1, 0], 10);
        let rel = EndRelation::new(RelationKind::Metric, line());
        assert!(matches!(
            equivalent(&rel, &x, &y, &x.default_budget()),
            Err(Error::CarrierMismatch(_, _))
        ));
    }

    #[test]
    fn empty_schedule_is_an_error() {
        let c = line();
        let x = axis_ray(&c, vec![1], 10);
        let rel = EndRelation::new(RelationKind::Metric, c.clone());
        let bad = Budget {
            max_scale: 5.0,
            tolerances: vec![],
        };
        assert!(matches!(
            equivalent(&rel, &x, &x, &bad),
            Err(Error::EmptySchedule)
        ));
    }

    #[test]
    fn line_end_tree() {
        let g = LazyGraph::lattice(1);
        let tree = end_tree(&g, &Point::Lattice(vec![0]), &[1, 2, 4, 8], HorizonPolicy::Double)
            .unwrap();
        for level in &tree.levels {
            assert_eq!(level.labeling.count(), 2);
        }
        for map in &tree.refinements {
            assert_eq!(map.len(), 2);
        }
        assert_eq!(end_class_count(&tree, 4).unwrap(), 2);
        assert!(end_class_count(&tree, 3).is_err());
    }

    #[test]
    fn grid_end_tree_single_class() {
        let g = LazyGraph::lattice(2);
        let tree =
            end_tree(&g, &Point::origin(2), &[1, 2, 4], HorizonPolicy::Double).unwrap();
        for level in &tree.levels {
            assert_eq!(level.labeling.count(), 1);
        }
    }

    #[test]
    fn free_group_class_counts() {
        let g = LazyGraph::free_group(2);
        let tree = end_tree(
            &g,
            &Point::identity_word(),
            &[1, 2],
            HorizonPolicy::Offset(2),
        )
        .unwrap();
        assert_eq!(end_class_count(&tree, 1).unwrap(), 12);
        assert_eq!(end_class_count(&tree, 2).unwrap(), 36);
    }

    #[test]
    fn refinement_maps_compose_along_the_schedule() {
        let g = LazyGraph::free_group(2);
        let tree = end_tree(
            &g,
            &Point::identity_word(),
            &[1, 2, 3],
            HorizonPolicy::Offset(2),
        )
        .unwrap();
        // composing level-2→1 after level-3→2 equals direct containment
        for (c, members) in tree.levels[2].labeling.components.iter().enumerate() {
            let via = tree.refinements[0][tree.refinements[1][c]];
            let direct = tree.levels[0].labeling.membership[&members[0]];
            assert_eq!(via, direct);
        }
    }

    #[test]
    fn finite_graph_beyond_horizon_has_no_classes() {
        let g = LazyGraph::finite(&[(0, 1), (1, 2)], 0);
        let tree = end_tree(&g, &Point::Vertex(0), &[5], HorizonPolicy::Fixed(10)).unwrap();
        assert_eq!(end_class_count(&tree, 5).unwrap(), 0);
    }

    #[test]
    fn dot_export_mentions_every_component() {
        let g = LazyGraph::lattice(1);
        let tree =
            end_tree(&g, &Point::Lattice(vec![0]), &[1, 2], HorizonPolicy::Double).unwrap();
        let dot = tree.to_dot();
        assert!(dot.contains("rank=same"));
        assert!(dot.contains("L1C0\" -> \"L0C"));
    }
}
