//! Lazy locally finite graphs: a root plus a finite-neighbor oracle.
//!
//! Three built-in families with computable normal forms: ℤᵈ lattices,
//! free groups (4-regular trees for rank 2), and explicit finite graphs.
//! Metric data within truncations is derived by BFS; `distance` is exact
//! per family (ℓ¹ for lattices, reduced word length for free groups,
//! whole-graph BFS for finite graphs).

use super::point::{invert_word, mul_words, Point};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum GraphSpec {
    Zd { d: usize },
    Free { rank: usize },
    Finite { edges: Vec<(u64, u64)>, root: u64 },
}

#[derive(Debug, Clone)]
pub enum GraphFamily {
    /// ℤᵈ with the standard generators ±e_i.
    Lattice { dim: usize },
    /// Free group of the given rank; Cayley graph is a 2·rank-regular tree.
    FreeGroup { rank: usize },
    /// Explicit finite graph. Adjacency is stored as given, so asymmetric
    /// oracles surface as structural errors during BFS.
    Finite {
        adjacency: BTreeMap<u64, Vec<u64>>,
        root: u64,
    },
}

#[derive(Debug, Clone)]
pub struct LazyGraph {
    family: GraphFamily,
}

impl LazyGraph {
    pub fn lattice(dim: usize) -> LazyGraph {
        LazyGraph {
            family: GraphFamily::Lattice { dim },
        }
    }

    pub fn free_group(rank: usize) -> LazyGraph {
        assert!(rank >= 1 && rank <= 26, "free rank must be in 1..=26");
        LazyGraph {
            family: GraphFamily::FreeGroup { rank },
        }
    }

    /// Build a finite graph from an undirected edge list.
    pub fn finite(edges: &[(u64, u64)], root: u64) -> LazyGraph {
        let mut adjacency: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
        adjacency.entry(root).or_default();
        for &(u, v) in edges {
            adjacency.entry(u).or_default().push(v);
            adjacency.entry(v).or_default().push(u);
        }
        for nbrs in adjacency.values_mut() {
            nbrs.sort_unstable();
            nbrs.dedup();
        }
        LazyGraph {
            family: GraphFamily::Finite { adjacency, root },
        }
    }

    /// Adjacency taken verbatim, without symmetrization. BFS-based
    /// operations reject the graph if the oracle turns out asymmetric.
    pub fn from_adjacency(adjacency: BTreeMap<u64, Vec<u64>>, root: u64) -> LazyGraph {
        LazyGraph {
            family: GraphFamily::Finite { adjacency, root },
        }
    }

    pub fn from_spec(spec: &GraphSpec) -> Result<LazyGraph> {
        match spec {
            GraphSpec::Zd { d } => {
                if *d == 0 {
                    return Err(Error::Spec("lattice dimension must be >= 1".into()));
                }
                Ok(LazyGraph::lattice(*d))
            }
            GraphSpec::Free { rank } => {
                if *rank == 0 || *rank > 26 {
                    return Err(Error::Spec("free rank must be in 1..=26".into()));
                }
                Ok(LazyGraph::free_group(*rank))
            }
            GraphSpec::Finite { edges, root } => Ok(LazyGraph::finite(edges, *root)),
        }
    }

    pub fn from_spec_json(json: &str) -> Result<LazyGraph> {
        let spec: GraphSpec =
            serde_json::from_str(json).map_err(|e| Error::Spec(e.to_string()))?;
        LazyGraph::from_spec(&spec)
    }

    pub fn family(&self) -> &GraphFamily {
        &self.family
    }

    pub fn signature(&self) -> String {
        match &self.family {
            GraphFamily::Lattice { dim } => format!("zd:{dim}"),
            GraphFamily::FreeGroup { rank } => format!("free:{rank}"),
            GraphFamily::Finite { adjacency, root } => {
                format!("finite:{}:{root}", adjacency.len())
            }
        }
    }

    pub fn root(&self) -> Point {
        match &self.family {
            GraphFamily::Lattice { dim } => Point::origin(*dim),
            GraphFamily::FreeGroup { .. } => Point::identity_word(),
            GraphFamily::Finite { root, .. } => Point::Vertex(*root),
        }
    }

    /// Finite ordered neighbor list; deterministic across calls.
    pub fn neighbors(&self, p: &Point) -> Result<Vec<Point>> {
        match (&self.family, p) {
            (GraphFamily::Lattice { dim }, Point::Lattice(coords)) => {
                if coords.len() != *dim {
                    return Err(Error::UnknownPoint(p.to_string()));
                }
                let mut out = Vec::with_capacity(2 * dim);
                for i in 0..*dim {
                    for delta in [-1i64, 1] {
                        let mut c = coords.clone();
                        c[i] += delta;
                        out.push(Point::Lattice(c));
                    }
                }
                Ok(out)
            }
            (GraphFamily::FreeGroup { rank }, Point::Word(w)) => {
                let mut out = Vec::with_capacity(2 * rank);
                for g in 0..*rank {
                    let gen = (b'a' + g as u8) as char;
                    let inv = gen.to_ascii_uppercase();
                    out.push(Point::Word(mul_words(w, &gen.to_string())));
                    out.push(Point::Word(mul_words(w, &inv.to_string())));
                }
                Ok(out)
            }
            (GraphFamily::Finite { adjacency, .. }, Point::Vertex(v)) => adjacency
                .get(v)
                .map(|ns| ns.iter().map(|&n| Point::Vertex(n)).collect())
                .ok_or_else(|| Error::UnknownPoint(p.to_string())),
            _ => Err(Error::UnknownPoint(p.to_string())),
        }
    }

    /// Exact graph distance. Lattices use the ℓ¹ norm of the difference,
    /// free groups the reduced length of u⁻¹v, finite graphs a BFS.
    pub fn distance(&self, a: &Point, b: &Point) -> Result<f64> {
        match (&self.family, a, b) {
            (GraphFamily::Lattice { dim }, Point::Lattice(x), Point::Lattice(y)) => {
                if x.len() != *dim || y.len() != *dim {
                    return Err(Error::UnknownPoint(a.to_string()));
                }
                Ok(x.iter()
                    .zip(y)
                    .map(|(p, q)| p.abs_diff(*q) as f64)
                    .sum())
            }
            (GraphFamily::FreeGroup { .. }, Point::Word(u), Point::Word(v)) => {
                Ok(mul_words(&invert_word(u), v).len() as f64)
            }
            (GraphFamily::Finite { .. }, Point::Vertex(u), Point::Vertex(v)) => {
                let dist = self.bfs_distances(&Point::Vertex(*u), u64::MAX)?;
                dist.get(&Point::Vertex(*v))
                    .map(|&d| d as f64)
                    .ok_or_else(|| Error::InfiniteDistance(a.to_string(), b.to_string()))
            }
            _ => Err(Error::UnknownPoint(a.to_string())),
        }
    }

    /// Group difference x⁻¹·y for group families.
    pub fn group_diff(&self, x: &Point, y: &Point) -> Result<Point> {
        match (&self.family, x, y) {
            (GraphFamily::Lattice { .. }, Point::Lattice(a), Point::Lattice(b)) => {
                if a.len() != b.len() {
                    return Err(Error::UnknownPoint(y.to_string()));
                }
                Ok(Point::Lattice(
                    a.iter().zip(b).map(|(p, q)| q - p).collect(),
                ))
            }
            (GraphFamily::FreeGroup { .. }, Point::Word(u), Point::Word(v)) => {
                Ok(Point::Word(mul_words(&invert_word(u), v)))
            }
            _ => Err(Error::invalid(
                "left-translation structure needs a group family (lattice or free)",
            )),
        }
    }

    /// BFS from `start` out to distance `max_dist`, with a symmetry check on
    /// every discovered edge.
    pub fn bfs_distances(&self, start: &Point, max_dist: u64) -> Result<HashMap<Point, u64>> {
        let mut dist: HashMap<Point, u64> = HashMap::new();
        let mut queue: VecDeque<Point> = VecDeque::new();
        dist.insert(start.clone(), 0);
        queue.push_back(start.clone());
        while let Some(u) = queue.pop_front() {
            let du = dist[&u];
            if du == max_dist {
                continue;
            }
            for v in self.neighbors(&u)? {
                if !dist.contains_key(&v) {
                    if !self.neighbors(&v)?.contains(&u) {
                        return Err(Error::AsymmetricAdjacency(u.to_string(), v.to_string()));
                    }
                    dist.insert(v.clone(), du + 1);
                    queue.push_back(v);
                }
            }
        }
        Ok(dist)
    }

    /// Shortest-path distances from `start` restricted to the induced
    /// subgraph on `allowed`.
    pub fn bfs_within(
        &self,
        start: &Point,
        allowed: &HashSet<Point>,
    ) -> Result<HashMap<Point, u64>> {
        let mut dist: HashMap<Point, u64> = HashMap::new();
        if !allowed.contains(start) {
            return Ok(dist);
        }
        let mut queue: VecDeque<Point> = VecDeque::new();
        dist.insert(start.clone(), 0);
        queue.push_back(start.clone());
        while let Some(u) = queue.pop_front() {
            let du = dist[&u];
            for v in self.neighbors(&u)? {
                if allowed.contains(&v) && !dist.contains_key(&v) {
                    dist.insert(v.clone(), du + 1);
                    queue.push_back(v);
                }
            }
        }
        Ok(dist)
    }
}
