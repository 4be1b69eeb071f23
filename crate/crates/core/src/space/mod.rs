//! Bounded structures, metric truncations of lazy infinite graphs, Gromov
//! products, hyperbolicity kernels, and complement-component labelings.

pub mod graph;
pub mod metric;
pub mod point;

pub use graph::{GraphFamily, GraphSpec, LazyGraph};
pub use metric::FiniteMetricSpace;
pub use point::{invert_word, mul_words, reduce_word, Point};

use crate::carrier::Carrier;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashSet};

/// Membership rule for bounded subsets of a carrier.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum BoundedStructure {
    /// Sets of diameter at most `cap`.
    MetricDiameter { cap: f64 },
    /// Every finite set is bounded.
    FiniteSets,
    /// Collar sets whose distance to the boundary stays at least `epsilon`.
    CollarMargin { epsilon: f64 },
}

/// Decide whether `set` is bounded under `structure`, using `carrier` for
/// the metric or collar data the structure kind requires.
pub fn is_bounded(structure: &BoundedStructure, set: &[Point], carrier: &Carrier) -> Result<bool> {
    match structure {
        BoundedStructure::FiniteSets => Ok(true),
        BoundedStructure::MetricDiameter { cap } => {
            for (k, a) in set.iter().enumerate() {
                for b in &set[k + 1..] {
                    if carrier.distance(a, b)? > *cap {
                        return Ok(false);
                    }
                }
            }
            Ok(true)
        }
        BoundedStructure::CollarMargin { epsilon } => {
            let mut min_clearance = f64::INFINITY;
            for p in set {
                let c = carrier
                    .collar_clearance(p)
                    .ok_or_else(|| Error::MissingCollarData(p.to_string()))?;
                min_clearance = min_clearance.min(c);
            }
            Ok(set.is_empty() || min_clearance >= *epsilon)
        }
    }
}

/// Truncation of a lazy graph: the points at distance ≤ `radius` from
/// `center`, with shortest-path distances computed by BFS inside the
/// enlarged ball of radius `radius + margin`. Every entry is an upper bound
/// on the true graph distance and is exact whenever some geodesic stays
/// within the enlarged ball (always the case for lattices and trees).
pub fn ball(
    graph: &LazyGraph,
    center: &Point,
    radius: u64,
    margin: u64,
) -> Result<FiniteMetricSpace> {
    let enlarged = graph.bfs_distances(center, radius + margin)?;
    let allowed: HashSet<Point> = enlarged.keys().cloned().collect();
    let mut points: Vec<Point> = enlarged
        .iter()
        .filter(|(_, &d)| d <= radius)
        .map(|(p, _)| p.clone())
        .collect();
    points.sort();
    let n = points.len();
    let mut dist = vec![f64::INFINITY; n * n];
    for (i, p) in points.iter().enumerate() {
        let from_p = graph.bfs_within(p, &allowed)?;
        for (j, q) in points.iter().enumerate() {
            if let Some(&d) = from_p.get(q) {
                dist[i * n + j] = d as f64;
            }
        }
    }
    FiniteMetricSpace::from_matrix(points, dist)
}

/// `ball` with the default margin policy (margin = radius).
pub fn ball_default(graph: &LazyGraph, center: &Point, radius: u64) -> Result<FiniteMetricSpace> {
    ball(graph, center, radius, radius)
}

/// ⟨x,y⟩_a = ½(d(x,a) + d(y,a) − d(x,y)). Errors when a needed distance is
/// infinite.
pub fn gromov_product(space: &FiniteMetricSpace, x: usize, y: usize, a: usize) -> Result<f64> {
    let (dxa, dya, dxy) = (space.dist(x, a), space.dist(y, a), space.dist(x, y));
    if !dxa.is_finite() || !dya.is_finite() || !dxy.is_finite() {
        return Err(Error::InfiniteDistance(
            space.point(x).to_string(),
            space.point(y).to_string(),
        ));
    }
    Ok(0.5 * (dxa + dya - dxy))
}

/// Four-point hyperbolicity report. `delta` is four times the largest gap
/// `min(⟨x,z⟩_a, ⟨z,y⟩_a) − ⟨x,y⟩_a`, clamped at zero, so finite trees
/// report exactly 0. The witnessing quadruple (a, x, y, z) is included.
#[derive(Debug, Clone, Serialize)]
pub struct DeltaReport {
    pub delta: f64,
    pub witness: Option<DeltaWitness>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DeltaWitness {
    pub base: Point,
    pub x: Point,
    pub y: Point,
    pub z: Point,
    pub gap: f64,
}

/// Least δ ≥ 0 such that ⟨x,y⟩_a ≥ min(⟨x,z⟩_a, ⟨z,y⟩_a) − δ/4 holds for
/// the fixed base (O(n³)), or for every base when none is given (O(n⁴)).
pub fn hyperbolicity_delta(space: &FiniteMetricSpace, base: Option<usize>) -> Result<DeltaReport> {
    let n = space.len();
    if n == 0 {
        return Err(Error::EmptySpace);
    }
    let bases: Vec<usize> = match base {
        Some(a) => vec![a],
        None => (0..n).collect(),
    };
    let mut best_gap = 0.0f64;
    let mut witness: Option<DeltaWitness> = None;
    for &a in &bases {
        // products against the base, reused across the triple scan
        let mut prod = vec![0.0f64; n * n];
        for x in 0..n {
            for y in 0..n {
                prod[x * n + y] = gromov_product(space, x, y, a)?;
            }
        }
        for x in 0..n {
            for y in 0..n {
                let pxy = prod[x * n + y];
                for z in 0..n {
                    let gap = prod[x * n + z].min(prod[z * n + y]) - pxy;
                    if gap > best_gap {
                        best_gap = gap;
                        witness = Some(DeltaWitness {
                            base: space.point(a).clone(),
                            x: space.point(x).clone(),
                            y: space.point(y).clone(),
                            z: space.point(z).clone(),
                            gap,
                        });
                    }
                }
            }
        }
    }
    Ok(DeltaReport {
        delta: 4.0 * best_gap,
        witness,
    })
}

/// Connected components of the annulus B(center, horizon) \ B(center, radius),
/// labeled by their least member in canonical point order.
#[derive(Debug, Clone)]
pub struct ComponentLabeling {
    /// Components ordered by least member; each member list is sorted.
    pub components: Vec<Vec<Point>>,
    pub membership: BTreeMap<Point, usize>,
}

impl ComponentLabeling {
    pub fn count(&self) -> usize {
        self.components.len()
    }

    /// Canonical id of a component: its least member.
    pub fn id(&self, c: usize) -> &Point {
        &self.components[c][0]
    }
}

pub fn complement_components(
    graph: &LazyGraph,
    center: &Point,
    radius: u64,
    horizon: u64,
) -> Result<ComponentLabeling> {
    if horizon <= radius {
        return Err(Error::invalid("horizon must exceed radius"));
    }
    let all = graph.bfs_distances(center, horizon)?;
    let annulus: HashSet<Point> = all
        .iter()
        .filter(|(_, &d)| d > radius)
        .map(|(p, _)| p.clone())
        .collect();
    let mut seeds: Vec<Point> = annulus.iter().cloned().collect();
    seeds.sort();
    let mut membership: BTreeMap<Point, usize> = BTreeMap::new();
    let mut components: Vec<Vec<Point>> = Vec::new();
    for seed in seeds {
        if membership.contains_key(&seed) {
            continue;
        }
        let reach = graph.bfs_within(&seed, &annulus)?;
        let mut members: Vec<Point> = reach.into_keys().collect();
        members.sort();
        let c = components.len();
        for m in &members {
            membership.insert(m.clone(), c);
        }
        components.push(members);
    }
    Ok(ComponentLabeling {
        components,
        membership,
    })
}
