//! Slowly oscillating function testing, corona partitions of ray samples,
//! and separating-function construction from end trees.
//!
//! The finite-scale form of "slowly oscillating" is the defect profile: for
//! each radius r and mesh M, the worst oscillation of the field over metric
//! balls of diameter ≤ M whose points all lie outside B(base, r). Balls of
//! every mesh are cofinal among uniformly bounded families for the metric
//! structures in scope, which keeps the search space finite.

pub mod expr;

use crate::carrier::Carrier;
use crate::ends::{equivalent, Budget, EndRelation, Ray, RelationKind, ScaleVerdict, VerdictStatus};
use crate::error::{Error, Result};
use crate::space::{LazyGraph, Point};
use serde::Serialize;
use std::sync::Arc;

/// A point field with values in [0, 1]. Out-of-range values are rejected at
/// evaluation, never clamped.
#[derive(Clone)]
pub struct ScalarField {
    pub tag: String,
    f: Arc<dyn Fn(&Point) -> Result<f64> + Send + Sync>,
}

impl std::fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "ScalarField({})", self.tag)
    }
}

impl ScalarField {
    pub fn new(
        tag: impl Into<String>,
        f: impl Fn(&Point) -> Result<f64> + Send + Sync + 'static,
    ) -> ScalarField {
        ScalarField {
            tag: tag.into(),
            f: Arc::new(f),
        }
    }

    pub fn eval(&self, p: &Point) -> Result<f64> {
        let v = (self.f)(p)?;
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::FieldOutOfRange {
                tag: self.tag.clone(),
                point: p.to_string(),
                value: v,
            });
        }
        Ok(v)
    }

    pub fn constant(c: f64) -> ScalarField {
        ScalarField::new(format!("const:{c}"), move |_| Ok(c))
    }

    /// Field defined by an expression in the escape gauge x = g(p).
    pub fn from_expr(src: &str, carrier: Arc<Carrier>, base: Point) -> Result<ScalarField> {
        let ast = expr::Expr::parse(src)?;
        let tag = src.to_string();
        Ok(ScalarField::new(tag, move |p| {
            let x = carrier.escape_gauge(&base, p)?;
            ast.eval(x)
        }))
    }

    /// Angular coordinate pullback for a collar over n cyclically arranged
    /// boundary points: (trig(2π·a/n) + 1)/2.
    pub fn collar_angular(carrier: Arc<Carrier>, sine: bool) -> Result<ScalarField> {
        let n = carrier
            .collar()
            .ok_or_else(|| Error::invalid("angular coordinate needs a collar carrier"))?
            .boundary()
            .len() as f64;
        let tag = if sine { "collar:sin" } else { "collar:cos" };
        Ok(ScalarField::new(tag, move |p| match p {
            Point::Collar { boundary, .. } => {
                let theta = 2.0 * std::f64::consts::PI * (*boundary as f64) / n;
                let t = if sine { theta.sin() } else { theta.cos() };
                Ok((t + 1.0) / 2.0)
            }
            other => Err(Error::MissingCollarData(other.to_string())),
        }))
    }

    /// Depth coordinate of a collar point.
    pub fn collar_depth(carrier: Arc<Carrier>) -> Result<ScalarField> {
        if carrier.collar().is_none() {
            return Err(Error::invalid("depth coordinate needs a collar carrier"));
        }
        Ok(ScalarField::new("collar:depth", move |p| {
            carrier
                .collar_clearance(p)
                .ok_or_else(|| Error::MissingCollarData(p.to_string()))
        }))
    }
}

/// One profile cell: worst oscillation over tested balls of diameter ≤ mesh
/// lying outside B(base, radius), with the maximizing ball recorded.
#[derive(Debug, Clone, Serialize)]
pub struct ProfileEntry {
    pub radius: u64,
    pub mesh: u64,
    pub defect: f64,
    pub witness_center: Option<Point>,
    pub witness_pair: Option<(Point, Point)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SOProfile {
    pub entries: Vec<ProfileEntry>,
}

impl SOProfile {
    pub fn entry(&self, radius: u64, mesh: u64) -> Option<&ProfileEntry> {
        self.entries
            .iter()
            .find(|e| e.radius == radius && e.mesh == mesh)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("r,M,defect,witness\n");
        for e in &self.entries {
            let w = match (&e.witness_center, &e.witness_pair) {
                (Some(c), Some((a, b))) => format!("center {c} pair {a}|{b}"),
                _ => String::from("-"),
            };
            out.push_str(&format!("{},{},{},{}\n", e.radius, e.mesh, e.defect, w));
        }
        out
    }
}

/// Oscillation defects of a field over balls centered in the annuli between
/// each radius and the horizon. A ball of radius ⌊M/2⌋ has diameter ≤ M;
/// centers are kept at gauge > r + ⌊M/2⌋ so every tested ball misses
/// B(base, r) entirely.
pub fn so_defect_profile(
    field: &ScalarField,
    graph: &LazyGraph,
    base: &Point,
    meshes: &[u64],
    radii: &[u64],
    horizon: u64,
) -> Result<SOProfile> {
    if radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("radii must be strictly increasing"));
    }
    if meshes.iter().any(|&m| m == 0) {
        return Err(Error::invalid("meshes must be positive"));
    }
    let within = graph.bfs_distances(base, horizon)?;
    let mut points: Vec<(Point, u64)> = within.into_iter().collect();
    points.sort();
    let mut entries = Vec::new();
    for &r in radii {
        for &mesh in meshes {
            let k = mesh / 2;
            let min_gauge = r + k;
            let centers: Vec<&Point> = points
                .iter()
                .filter(|(_, g)| *g > min_gauge && *g <= horizon)
                .map(|(p, _)| p)
                .collect();
            if centers.is_empty() {
                return Err(Error::invalid(format!(
                    "horizon {horizon} leaves no test centers for radius {r}, mesh {mesh}"
                )));
            }
            let mut defect = 0.0f64;
            let mut witness_center = None;
            let mut witness_pair = None;
            for c in centers {
                let ball = graph.bfs_distances(c, k)?;
                let mut lo = (f64::INFINITY, None::<Point>);
                let mut hi = (f64::NEG_INFINITY, None::<Point>);
                for p in ball.keys() {
                    let v = field.eval(p)?;
                    if v < lo.0 {
                        lo = (v, Some(p.clone()));
                    }
                    if v > hi.0 {
                        hi = (v, Some(p.clone()));
                    }
                }
                let osc = hi.0 - lo.0;
                if osc > defect {
                    defect = osc;
                    witness_center = Some(c.clone());
                    witness_pair = match (hi.1, lo.1) {
                        (Some(a), Some(b)) => Some((a, b)),
                        _ => None,
                    };
                }
            }
            entries.push(ProfileEntry {
                radius: r,
                mesh,
                defect,
                witness_center,
                witness_pair,
            });
        }
    }
    Ok(SOProfile { entries })
}

/// EQUIVALENT iff defect(r', M) < ε for every scheduled (ε, r), every
/// recorded radius r' ≥ r, and every mesh; DISTINGUISHED with the witness
/// ball otherwise.
pub fn is_slowly_oscillating(profile: &SOProfile, schedule: &[(f64, u64)]) -> Result<ScaleVerdict> {
    if schedule.is_empty() {
        return Err(Error::EmptySchedule);
    }
    let mut min_eps = f64::INFINITY;
    for &(eps, r) in schedule {
        if !profile.entries.iter().any(|e| e.radius == r) {
            return Err(Error::invalid(format!(
                "profile does not cover scheduled radius {r}"
            )));
        }
        min_eps = min_eps.min(eps);
        for e in profile.entries.iter().filter(|e| e.radius >= r) {
            if e.defect >= eps {
                let witness = e
                    .witness_center
                    .as_ref()
                    .map(|c| c.to_string())
                    .unwrap_or_default();
                return Ok(ScaleVerdict::distinguished_at_radius(
                    e.radius as f64,
                    e.defect,
                    format!(
                        "defect {} ≥ ε = {eps} at radius {}, mesh {} (ball at {witness})",
                        e.defect, e.radius, e.mesh
                    ),
                ));
            }
        }
    }
    Ok(ScaleVerdict::equivalent(
        1.0 / min_eps,
        format!("all defects below schedule {schedule:?}"),
    ))
}

#[derive(Debug, Clone, Serialize)]
pub struct CoronaPartition {
    /// Ray indices grouped into classes, each sorted, classes ordered by
    /// least member.
    pub classes: Vec<Vec<usize>>,
    /// Pairs whose verdict was INCONCLUSIVE; reported, never merged.
    pub inconclusive_pairs: Vec<(usize, usize)>,
    pub pair_statuses: Vec<(usize, usize, VerdictStatus)>,
}

struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> UnionFind {
        UnionFind {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
    }
}

/// Partition a ray sample by pairwise verdicts under a relation: EQUIVALENT
/// pairs merge, INCONCLUSIVE pairs are reported separately.
pub fn corona_partition(
    rays: &[Ray],
    rel: &EndRelation,
    budget: &Budget,
) -> Result<CoronaPartition> {
    let n = rays.len();
    let mut uf = UnionFind::new(n);
    let mut inconclusive = Vec::new();
    let mut statuses = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let v = equivalent(rel, &rays[i], &rays[j], budget)?;
            statuses.push((i, j, v.status()));
            match v.status() {
                VerdictStatus::Equivalent => uf.union(i, j),
                VerdictStatus::Inconclusive => inconclusive.push((i, j)),
                VerdictStatus::Distinguished => {}
            }
        }
    }
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut root_to_class: std::collections::BTreeMap<usize, usize> = Default::default();
    for i in 0..n {
        let r = uf.find(i);
        match root_to_class.get(&r) {
            Some(&c) => classes[c].push(i),
            None => {
                root_to_class.insert(r, classes.len());
                classes.push(vec![i]);
            }
        }
    }
    classes.sort_by_key(|c| c[0]);
    Ok(CoronaPartition {
        classes,
        inconclusive_pairs: inconclusive,
        pair_statuses: statuses,
    })
}

/// Convenience: partition by a function family.
pub fn corona_partition_fields(
    rays: &[Ray],
    fields: Vec<ScalarField>,
    carrier: Arc<Carrier>,
    budget: &Budget,
) -> Result<CoronaPartition> {
    let rel = EndRelation::new(RelationKind::FunctionFamily(fields), carrier);
    corona_partition(rays, &rel, budget)
}

/// A separating field built from an end tree: 0 deep inside the chosen
/// component, 1 deep inside every other component, ramped across the
/// annulus r..r+width with slope ≤ 1/width.
#[derive(Clone)]
pub struct SeparatingField {
    pub field: ScalarField,
    pub warning: Option<String>,
    pub level: u64,
    pub ramp_width: u64,
}

/// Build the canonical separating slowly oscillating field for a component
/// of the level-`radius` annulus. Points beyond the tree's horizon are
/// classified by the carrier family (subtree root for free groups, sign for
/// the line, the unique component for higher-dimensional lattices).
pub fn separating_so_function(
    graph: &LazyGraph,
    tree: &crate::ends::EndTree,
    radius: u64,
    component_id: &Point,
    ramp_width: Option<u64>,
) -> Result<SeparatingField> {
    let level = tree
        .levels
        .iter()
        .find(|l| l.radius == radius)
        .ok_or(Error::UnknownLevel(radius))?;
    let chosen = level
        .labeling
        .components
        .iter()
        .position(|members| &members[0] == component_id)
        .ok_or_else(|| Error::UnknownComponent(component_id.to_string(), radius))?;
    let width = ramp_width.unwrap_or_else(|| (4 * radius).max(8));
    if level.labeling.count() == 1 {
        return Ok(SeparatingField {
            field: ScalarField::constant(0.0),
            warning: Some(format!(
                "single end class at level {radius}; no complementary component to separate"
            )),
            level: radius,
            ramp_width: width,
        });
    }
    let base = graph.root();
    let membership = level.labeling.membership.clone();
    let family = graph.family().clone();
    let graph_for_eval = graph.clone();
    let tag = format!("sep(r={radius},w={width},comp={component_id})");
    let count = level.labeling.count();
    let classify = move |p: &Point| -> Result<usize> {
        if let Some(&c) = membership.get(p) {
            return Ok(c);
        }
        match (&family, p) {
            (crate::space::GraphFamily::FreeGroup { .. }, Point::Word(w)) => {
                let ancestor: String = w.chars().take(radius as usize + 1).collect();
                membership
                    .get(&Point::Word(ancestor))
                    .copied()
                    .ok_or_else(|| Error::UnknownComponent(p.to_string(), radius))
            }
            (crate::space::GraphFamily::Lattice { dim: 1 }, Point::Lattice(v)) => {
                let rep = Point::Lattice(vec![if v[0] > 0 {
                    radius as i64 + 1
                } else {
                    -(radius as i64) - 1
                }]);
                membership
                    .get(&rep)
                    .copied()
                    .ok_or_else(|| Error::UnknownComponent(p.to_string(), radius))
            }
            (crate::space::GraphFamily::Lattice { .. }, Point::Lattice(_)) if count == 1 => Ok(0),
            _ => Err(Error::UnknownComponent(p.to_string(), radius)),
        }
    };
    let field = ScalarField::new(tag, move |p| {
        let g = graph_for_eval.distance(&base, p)?;
        if g <= radius as f64 {
            return Ok(0.0);
        }
        let t = ((g - radius as f64) / width as f64).clamp(0.0, 1.0);
        if classify(p)? == chosen {
            Ok(1.0 - t)
        } else {
            Ok(t)
        }
    });
    Ok(SeparatingField {
        field,
        warning: None,
        level: radius,
        ramp_width: width,
    })
}
