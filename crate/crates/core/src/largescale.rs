//! Cover/star calculus, controlled-set algebra on finite truncations,
//! medium ends, membership tests for induced large-scale structures, and
//! the repetition coupling used to compare pointwise and blockwise ends.

use crate::carrier::Carrier;
use crate::ends::{equivalent, equivalent_certified, Budget, EndRelation, Ray, ScaleVerdict};
use crate::error::{Error, Result};
use crate::space::{is_bounded, BoundedStructure, FiniteMetricSpace, Point};
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};

/// A finite family of finite point sets over a carrier truncation, stored
/// as index sets into the truncation's point list. Families used as covers
/// must hit every point; families used as uniformly bounded collections may
/// leave gaps (see [`Cover::gaps`]).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Cover {
    pub elements: Vec<BTreeSet<usize>>,
}

impl Cover {
    pub fn new(elements: Vec<BTreeSet<usize>>) -> Cover {
        Cover { elements }
    }

    pub fn from_slices(slices: &[&[usize]]) -> Cover {
        Cover {
            elements: slices.iter().map(|s| s.iter().copied().collect()).collect(),
        }
    }

    /// Points of 0..n not covered by any element.
    pub fn gaps(&self, n: usize) -> Vec<usize> {
        let mut hit = vec![false; n];
        for e in &self.elements {
            for &i in e {
                if i < n {
                    hit[i] = true;
                }
            }
        }
        (0..n).filter(|&i| !hit[i]).collect()
    }

    pub fn is_cover_of(&self, n: usize) -> bool {
        self.gaps(n).is_empty()
    }

    /// Indices of empty elements (flagged, not removed).
    pub fn empty_elements(&self) -> Vec<usize> {
        self.elements
            .iter()
            .enumerate()
            .filter(|(_, e)| e.is_empty())
            .map(|(i, _)| i)
            .collect()
    }

    /// Per-point membership counts; the maximum is the multiplicity.
    pub fn multiplicity(&self, n: usize) -> usize {
        let mut counts = vec![0usize; n];
        for e in &self.elements {
            for &i in e {
                if i < n {
                    counts[i] += 1;
                }
            }
        }
        counts.into_iter().max().unwrap_or(0)
    }

    pub fn mesh(&self, fms: &FiniteMetricSpace) -> f64 {
        self.elements
            .iter()
            .map(|e| {
                let idx: Vec<usize> = e.iter().copied().collect();
                fms.diameter_of(&idx)
            })
            .fold(0.0, f64::max)
    }

    /// Every element is contained in some element of `coarser`.
    pub fn refines(&self, coarser: &Cover) -> bool {
        self.elements
            .iter()
            .all(|e| coarser.elements.iter().any(|c| e.is_subset(c)))
    }

    pub fn element_points(&self, idx: usize, fms: &FiniteMetricSpace) -> Vec<Point> {
        self.elements[idx]
            .iter()
            .map(|&i| fms.point(i).clone())
            .collect()
    }

    /// Serialize as arrays of point arrays over the carrier truncation.
    pub fn to_point_json(&self, fms: &FiniteMetricSpace) -> serde_json::Value {
        serde_json::Value::Array(
            self.elements
                .iter()
                .map(|e| {
                    serde_json::to_value(
                        e.iter().map(|&i| fms.point(i).clone()).collect::<Vec<_>>(),
                    )
                    .expect("points serialize")
                })
                .collect(),
        )
    }

    /// Parse from arrays of point arrays; every point must belong to the
    /// truncation.
    pub fn from_point_json(
        value: &serde_json::Value,
        fms: &FiniteMetricSpace,
    ) -> Result<Cover> {
        let arr = value
            .as_array()
            .ok_or_else(|| Error::invalid("cover JSON must be an array of point arrays"))?;
        let mut elements = Vec::with_capacity(arr.len());
        for elem in arr {
            let points: Vec<Point> = serde_json::from_value(elem.clone())
                .map_err(|e| Error::Spec(e.to_string()))?;
            let mut set = BTreeSet::new();
            for p in points {
                set.insert(
                    fms.index_of(&p)
                        .ok_or_else(|| Error::UnknownPoint(p.to_string()))?,
                );
            }
            elements.push(set);
        }
        Ok(Cover::new(elements))
    }
}

/// A finite relation on a truncation: a set of ordered point-index pairs.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct ControlledSet {
    pub pairs: BTreeSet<(usize, usize)>,
}

impl ControlledSet {
    pub fn new(pairs: impl IntoIterator<Item = (usize, usize)>) -> ControlledSet {
        ControlledSet {
            pairs: pairs.into_iter().collect(),
        }
    }

    pub fn diagonal(n: usize) -> ControlledSet {
        ControlledSet::new((0..n).map(|i| (i, i)))
    }

    pub fn inverse(&self) -> ControlledSet {
        ControlledSet::new(self.pairs.iter().map(|&(x, y)| (y, x)))
    }

    pub fn union(&self, other: &ControlledSet) -> ControlledSet {
        ControlledSet::new(self.pairs.iter().chain(other.pairs.iter()).copied())
    }

    /// E∘F = {(x, y) : ∃z, (x, z) ∈ E and (z, y) ∈ F}.
    pub fn compose(&self, other: &ControlledSet) -> ControlledSet {
        let mut by_first: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for &(z, y) in &other.pairs {
            by_first.entry(z).or_default().push(y);
        }
        let mut out = BTreeSet::new();
        for &(x, z) in &self.pairs {
            if let Some(ys) = by_first.get(&z) {
                for &y in ys {
                    out.insert((x, y));
                }
            }
        }
        ControlledSet { pairs: out }
    }

    pub fn is_subset(&self, other: &ControlledSet) -> bool {
        self.pairs.is_subset(&other.pairs)
    }

    /// Slice E[x] = {y : (x, y) ∈ E}.
    pub fn slice(&self, x: usize) -> BTreeSet<usize> {
        self.pairs
            .iter()
            .filter(|&&(a, _)| a == x)
            .map(|&(_, y)| y)
            .collect()
    }
}

/// st(B, U): union of the elements of U that intersect B. B itself is not
/// automatically included.
pub fn star(b: &BTreeSet<usize>, u: &Cover) -> BTreeSet<usize> {
    let mut out = BTreeSet::new();
    for e in &u.elements {
        if !e.is_disjoint(b) {
            out.extend(e.iter().copied());
        }
    }
    out
}

/// Element-wise star, order preserved.
pub fn star_family(bs: &Cover, u: &Cover) -> Cover {
    Cover {
        elements: bs.elements.iter().map(|b| star(b, u)).collect(),
    }
}

/// ⋃_{B ∈ U} B × B.
pub fn cover_to_controlled(u: &Cover) -> ControlledSet {
    let mut pairs = BTreeSet::new();
    for e in &u.elements {
        for &x in e {
            for &y in e {
                pairs.insert((x, y));
            }
        }
    }
    ControlledSet { pairs }
}

/// The slice family {E[x]} over the carrier 0..n. Empty slices are kept;
/// callers can flag them via [`Cover::empty_elements`].
pub fn controlled_to_cover(e: &ControlledSet, n: usize) -> Cover {
    Cover {
        elements: (0..n).map(|x| e.slice(x)).collect(),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AxiomReport {
    pub diagonal_within_closure: bool,
    /// Downward closure holds by the subset semantics of the report.
    pub subsets_within_closure: bool,
    pub inverses_within_closure: bool,
    pub unions_within_closure: bool,
    pub compositions_within_closure: bool,
    pub reached_fixpoint: bool,
    /// ⊆-maximal members of the closure generated to the composition depth.
    pub closure: Vec<ControlledSet>,
    /// Explicit inverses, pairwise unions, and pairwise compositions of the
    /// generators.
    pub generator_inverses: Vec<ControlledSet>,
    pub generator_unions: Vec<ControlledSet>,
    pub generator_compositions: Vec<ControlledSet>,
}

/// Close the generators under diagonal, inverse, union, and composition to
/// a fixed depth, then report which axioms hold within that closure (a set
/// counts as inside when it is contained in some closure member).
pub fn check_coarse_axioms(
    generators: &[ControlledSet],
    n: usize,
    depth: usize,
) -> AxiomReport {
    let mut family: BTreeSet<ControlledSet> = generators.iter().cloned().collect();
    family.insert(ControlledSet::diagonal(n));
    let mut reached_fixpoint = false;
    for _ in 0..depth {
        let mut next = family.clone();
        let members: Vec<ControlledSet> = family.iter().cloned().collect();
        for e in &members {
            next.insert(e.inverse());
        }
        for e in &members {
            for f in &members {
                next.insert(e.union(f));
                next.insert(e.compose(f));
            }
        }
        if next == family {
            reached_fixpoint = true;
            break;
        }
        family = next;
    }
    let within = |candidate: &ControlledSet| family.iter().any(|m| candidate.is_subset(m));
    let members: Vec<ControlledSet> = family.iter().cloned().collect();
    let inverses_ok = members.iter().all(|e| within(&e.inverse()));
    let mut unions_ok = true;
    let mut compositions_ok = true;
    for e in &members {
        for f in &members {
            if !within(&e.union(f)) {
                unions_ok = false;
            }
            if !within(&e.compose(f)) {
                compositions_ok = false;
            }
        }
    }
    // keep only ⊆-maximal members in the reported closure
    let maximal: Vec<ControlledSet> = members
        .iter()
        .filter(|e| !members.iter().any(|m| *e != m && e.is_subset(m)))
        .cloned()
        .collect();
    AxiomReport {
        diagonal_within_closure: within(&ControlledSet::diagonal(n)),
        subsets_within_closure: true,
        inverses_within_closure: inverses_ok,
        unions_within_closure: unions_ok,
        compositions_within_closure: compositions_ok,
        reached_fixpoint,
        closure: maximal,
        generator_inverses: generators.iter().map(|e| e.inverse()).collect(),
        generator_unions: generators
            .iter()
            .flat_map(|e| generators.iter().map(move |f| e.union(f)))
            .collect(),
        generator_compositions: generators
            .iter()
            .flat_map(|e| generators.iter().map(move |f| e.compose(f)))
            .collect(),
    }
}

/// An escaping sequence of bounded nonempty blocks.
#[derive(Debug, Clone)]
pub struct MediumEnd {
    pub blocks: Vec<Vec<Point>>,
}

impl MediumEnd {
    pub fn new(blocks: Vec<Vec<Point>>) -> Result<MediumEnd> {
        for (n, b) in blocks.iter().enumerate() {
            if b.is_empty() {
                return Err(Error::EmptyBlock(n));
            }
        }
        Ok(MediumEnd { blocks })
    }

    /// Escape certificate on block min-gauges: for each radius the last
    /// block touching the ball is recorded, and stagnating sequences fail.
    pub fn require_escaping(&self, carrier: &Carrier, base: &Point) -> Result<()> {
        let mut min_gauges = Vec::with_capacity(self.blocks.len());
        for b in &self.blocks {
            let mut g = f64::INFINITY;
            for p in b {
                g = g.min(carrier.escape_gauge(base, p)?);
            }
            min_gauges.push(g);
        }
        let len = min_gauges.len();
        if len >= 2 {
            let half = len / 2;
            let head = min_gauges[..half].iter().cloned().fold(f64::MIN, f64::max);
            let tail = min_gauges[half..].iter().cloned().fold(f64::MIN, f64::max);
            if tail <= head {
                return Err(Error::NotASimpleEnd {
                    radius: tail.max(0.0).floor(),
                });
            }
        }
        Ok(())
    }
}

/// Deterministic pair schedule for a sorted block: unordered pairs sorted
/// by in-block spread (then canonically), thinned to `cap` by quantiles so
/// the tightest and widest pairs always survive.
fn block_pairs(
    block: &[Point],
    cap: usize,
    carrier: &Carrier,
) -> Result<Vec<(Point, Point)>> {
    let mut pairs = Vec::new();
    for i in 0..block.len() {
        for j in i..block.len() {
            let d = carrier.distance(&block[i], &block[j])?;
            pairs.push((d, i, j));
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let k = cap.max(1).min(pairs.len());
    let mut out = Vec::with_capacity(k);
    for t in 0..k {
        let idx = if k == 1 { 0 } else { t * (pairs.len() - 1) / (k - 1) };
        let (_, i, j) = pairs[idx];
        out.push((block[i].clone(), block[j].clone()));
    }
    Ok(out)
}

/// Sample selection rays x_n, y_n ∈ B_n (exhaustively when block pair
/// counts fit under `pair_cap`) and conjoin their equivalence verdicts.
/// The k-th selection takes the k-th spread quantile in every block, so
/// the final selection pairs each block's most separated points.
pub fn is_uniformly_bounded_medium_end(
    me: &MediumEnd,
    rel: &EndRelation,
    pair_cap: usize,
    budget: &Budget,
) -> Result<ScaleVerdict> {
    let base = rel.carrier.default_base();
    me.require_escaping(&rel.carrier, &base)?;
    let mut schedules: Vec<Vec<(Point, Point)>> = Vec::with_capacity(me.blocks.len());
    for b in &me.blocks {
        let mut sorted = b.clone();
        sorted.sort();
        sorted.dedup();
        schedules.push(block_pairs(&sorted, pair_cap.max(1), &rel.carrier)?);
    }
    let selections = schedules.iter().map(|s| s.len()).max().unwrap_or(0);
    let mut verdicts = Vec::with_capacity(selections);
    for k in 0..selections {
        let mut xs = Vec::with_capacity(me.blocks.len());
        let mut ys = Vec::with_capacity(me.blocks.len());
        for sched in &schedules {
            let pos = if selections == 1 {
                0
            } else {
                k * (sched.len() - 1) / (selections - 1)
            };
            let (x, y) = &sched[pos];
            xs.push(x.clone());
            ys.push(y.clone());
        }
        let rx = Ray::new(rel.carrier.clone(), base.clone(), xs, None)?;
        let ry = Ray::new(rel.carrier.clone(), base.clone(), ys, None)?;
        verdicts.push(equivalent_certified(rel, &rx, &ry, budget)?);
    }
    Ok(ScaleVerdict::conjoin(verdicts))
}

/// Build the two-point-block medium end of each verified-equivalent pair
/// and test uniform boundedness; EQUIVALENT across the sample supports
/// reflexivity of the relation, DISTINGUISHED refutes it with the witness
/// pair.
pub fn reflexivity_check(
    rel: &EndRelation,
    sample: &[(Ray, Ray)],
    pair_cap: usize,
    budget: &Budget,
) -> Result<ScaleVerdict> {
    let mut verdicts = Vec::with_capacity(sample.len());
    for (idx, (x, y)) in sample.iter().enumerate() {
        let v = equivalent(rel, x, y, budget)?;
        if !v.is_equivalent() {
            return Err(Error::PairNotEquivalent(idx));
        }
        let len = x.len().min(y.len());
        let blocks: Vec<Vec<Point>> = (0..len)
            .map(|n| {
                let mut b = vec![x.point(n).clone()];
                if y.point(n) != x.point(n) {
                    b.push(y.point(n).clone());
                }
                b
            })
            .collect();
        let me = MediumEnd::new(blocks)?;
        verdicts.push(is_uniformly_bounded_medium_end(&me, rel, pair_cap, budget)?);
    }
    Ok(ScaleVerdict::conjoin(verdicts))
}

#[derive(Debug, Clone, Serialize)]
pub struct LssReport {
    pub verdict: ScaleVerdict,
    /// Per scheduled radius: the star of the ball and its boundedness.
    pub star_bounded: Vec<(u64, bool)>,
    /// One verdict per enumerated escaping medium end.
    pub medium_end_verdicts: Vec<ScaleVerdict>,
    pub enumerated_medium_ends: usize,
}

pub struct LssCaps {
    pub medium_end_cap: usize,
    pub pair_cap: usize,
}

impl Default for LssCaps {
    fn default() -> LssCaps {
        LssCaps {
            medium_end_cap: 64,
            pair_cap: 16,
        }
    }
}

/// Membership test for the large-scale structure induced by a relation:
/// stars of scheduled balls must stay bounded, and every enumerated
/// escaping medium end made of cover elements must be uniformly bounded.
/// Enumeration is adversarial (largest elements first within gauge shells)
/// and capped.
pub fn lss_membership(
    u: &Cover,
    fms: &FiniteMetricSpace,
    base_index: usize,
    rel: &EndRelation,
    bstruct: &BoundedStructure,
    radii: &[u64],
    caps: &LssCaps,
    budget: &Budget,
) -> Result<LssReport> {
    let mut verdicts = Vec::new();
    let mut star_bounded = Vec::new();
    for &r in radii {
        let ball: BTreeSet<usize> = fms.ball_indices(base_index, r as f64).into_iter().collect();
        let st = star(&ball, u);
        let pts: Vec<Point> = st.iter().map(|&i| fms.point(i).clone()).collect();
        let ok = is_bounded(bstruct, &pts, &rel.carrier)?;
        star_bounded.push((r, ok));
        if ok {
            verdicts.push(ScaleVerdict::equivalent(
                r as f64,
                format!("st(B(base,{r}), U) bounded"),
            ));
        } else {
            let idx: Vec<usize> = st.iter().copied().collect();
            verdicts.push(ScaleVerdict::distinguished_at_radius(
                r as f64,
                fms.diameter_of(&idx),
                format!("st(B(base,{r}), U) is unbounded at scale"),
            ));
        }
    }
    // gauge shells for escaping enumeration
    let gauges: Vec<f64> = (0..fms.len()).map(|i| fms.dist(base_index, i)).collect();
    let max_gauge = gauges.iter().cloned().fold(0.0f64, f64::max);
    let shell_width = (max_gauge / 6.0).max(1.0);
    let shell_of = |e: &BTreeSet<usize>| -> Option<usize> {
        e.iter()
            .map(|&i| gauges[i])
            .fold(None, |acc: Option<f64>, g| {
                Some(acc.map_or(g, |a| a.min(g)))
            })
            .map(|g| (g / shell_width).floor() as usize)
    };
    let mut shells: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (idx, e) in u.elements.iter().enumerate() {
        if e.is_empty() {
            continue;
        }
        if let Some(s) = shell_of(e) {
            shells.entry(s).or_default().push(idx);
        }
    }
    for members in shells.values_mut() {
        members.sort_by(|&a, &b| {
            let da = fms.diameter_of(&u.elements[a].iter().copied().collect::<Vec<_>>());
            let db = fms.diameter_of(&u.elements[b].iter().copied().collect::<Vec<_>>());
            db.total_cmp(&da).then(a.cmp(&b))
        });
    }
    let shell_lists: Vec<&Vec<usize>> = shells.values().collect();
    let mut me_verdicts = Vec::new();
    if shell_lists.len() >= 2 {
        let deepest = shell_lists.iter().map(|l| l.len()).max().unwrap_or(0);
        let count = deepest.min(caps.medium_end_cap.max(1));
        for j in 0..count {
            let blocks: Vec<Vec<Point>> = shell_lists
                .iter()
                .map(|list| {
                    let idx = list[j % list.len()];
                    u.elements[idx]
                        .iter()
                        .map(|&i| fms.point(i).clone())
                        .collect()
                })
                .collect();
            let me = MediumEnd::new(blocks)?;
            let base = rel.carrier.default_base();
            if me.require_escaping(&rel.carrier, &base).is_err() {
                // shells too flat to escape; skip this selection
                continue;
            }
            me_verdicts.push(is_uniformly_bounded_medium_end(
                &me,
                rel,
                caps.pair_cap,
                budget,
            )?);
        }
    }
    verdicts.extend(me_verdicts.iter().cloned());
    Ok(LssReport {
        verdict: ScaleVerdict::conjoin(verdicts),
        star_bounded,
        enumerated_medium_ends: me_verdicts.len(),
        medium_end_verdicts: me_verdicts,
    })
}

/// C0-style uniform boundedness: for each scheduled (radius, ε), every
/// element meeting the complement of B(base, radius) must have out-of-ball
/// diameter ≤ ε.
pub fn c0_uniformly_bounded(
    u: &Cover,
    fms: &FiniteMetricSpace,
    base_index: usize,
    schedule: &[(u64, f64)],
) -> Result<ScaleVerdict> {
    if schedule.is_empty() {
        return Err(Error::EmptySchedule);
    }
    for &(r, eps) in schedule {
        for (idx, e) in u.elements.iter().enumerate() {
            let outside: Vec<usize> = e
                .iter()
                .copied()
                .filter(|&i| fms.dist(base_index, i) > r as f64)
                .collect();
            if outside.is_empty() {
                continue;
            }
            let d = fms.diameter_of(&outside);
            if d > eps {
                return Ok(ScaleVerdict::distinguished_at_radius(
                    r as f64,
                    d,
                    format!(
                        "element {idx} has out-of-ball diameter {d} > ε = {eps} beyond radius {r}"
                    ),
                ));
            }
        }
    }
    let min_eps = schedule.iter().map(|&(_, e)| e).fold(f64::INFINITY, f64::min);
    Ok(ScaleVerdict::equivalent(
        1.0 / min_eps,
        format!("mesh shrinks below every scheduled ε: {schedule:?}"),
    ))
}

/// The coupled sequences of the blockwise-to-pointwise comparison: x
/// repeats the least element of each set as many times as the set has
/// elements, y lists the elements in canonical order, and the block
/// sequence repeats the set itself, so x_n, y_n ∈ V_n at every index.
#[derive(Debug, Clone, Serialize)]
pub struct CouplingSequences {
    pub x: Vec<Point>,
    pub y: Vec<Point>,
    pub blocks: Vec<Vec<Point>>,
}

pub fn repetition_coupling(families: &[Vec<Point>]) -> Result<CouplingSequences> {
    let mut x = Vec::new();
    let mut y = Vec::new();
    let mut blocks = Vec::new();
    for (k, family) in families.iter().enumerate() {
        if family.is_empty() {
            return Err(Error::EmptyBlock(k));
        }
        let mut sorted = family.clone();
        sorted.sort();
        sorted.dedup();
        let representative = sorted[0].clone();
        for member in &sorted {
            x.push(representative.clone());
            y.push(member.clone());
            blocks.push(sorted.clone());
        }
    }
    Ok(CouplingSequences { x, y, blocks })
}
