//! Finite (pseudo-)metric spaces with extended-real distance matrices.

use super::point::Point;
use crate::error::{Error, Result};
use std::collections::BTreeMap;

/// A finite list of points with a symmetric distance matrix. Entries may be
/// `f64::INFINITY` (∞-pseudo-metrics); zero distance between distinct points
/// is permitted. Constructors derived from BFS are valid by construction;
/// `validate` checks the axioms for explicitly supplied matrices.
#[derive(Debug, Clone)]
pub struct FiniteMetricSpace {
    points: Vec<Point>,
    index: BTreeMap<Point, usize>,
    dist: Vec<f64>,
}

impl FiniteMetricSpace {
    pub fn from_matrix(points: Vec<Point>, dist: Vec<f64>) -> Result<FiniteMetricSpace> {
        let n = points.len();
        if dist.len() != n * n {
            return Err(Error::invalid(format!(
                "distance matrix has {} entries, expected {}",
                dist.len(),
                n * n
            )));
        }
        let mut index = BTreeMap::new();
        for (i, p) in points.iter().enumerate() {
            if index.insert(p.clone(), i).is_some() {
                return Err(Error::invalid(format!("duplicate point {p}")));
            }
        }
        Ok(FiniteMetricSpace {
            points,
            index,
            dist,
        })
    }

    /// Cycle graph C_n with hop distances scaled by `scale`.
    pub fn cycle(n: usize, scale: f64) -> FiniteMetricSpace {
        let points: Vec<Point> = (0..n as u64).map(Point::Vertex).collect();
        let mut dist = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                let hops = (i as i64 - j as i64).unsigned_abs().min((n as u64) - (i as i64 - j as i64).unsigned_abs());
                dist[i * n + j] = hops as f64 * scale;
            }
        }
        FiniteMetricSpace {
            index: points.iter().cloned().zip(0..).collect(),
            points,
            dist,
        }
    }

    /// Path graph P_n with unit edges.
    pub fn path(n: usize) -> FiniteMetricSpace {
        let points: Vec<Point> = (0..n as u64).map(Point::Vertex).collect();
        let mut dist = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                dist[i * n + j] = (i as i64 - j as i64).unsigned_abs() as f64;
            }
        }
        FiniteMetricSpace {
            index: points.iter().cloned().zip(0..).collect(),
            points,
            dist,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &Point {
        &self.points[i]
    }

    pub fn index_of(&self, p: &Point) -> Option<usize> {
        self.index.get(p).copied()
    }

    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.points.len() + j]
    }

    pub fn dist_points(&self, a: &Point, b: &Point) -> Result<f64> {
        let i = self
            .index_of(a)
            .ok_or_else(|| Error::UnknownPoint(a.to_string()))?;
        let j = self
            .index_of(b)
            .ok_or_else(|| Error::UnknownPoint(b.to_string()))?;
        Ok(self.dist(i, j))
    }

    /// Max pairwise distance over a set of indices (0 for empty or singleton).
    pub fn diameter_of(&self, indices: &[usize]) -> f64 {
        let mut d = 0.0f64;
        for (k, &i) in indices.iter().enumerate() {
            for &j in &indices[k + 1..] {
                d = d.max(self.dist(i, j));
            }
        }
        d
    }

    pub fn diameter(&self) -> f64 {
        let all: Vec<usize> = (0..self.len()).collect();
        self.diameter_of(&all)
    }

    /// Indices within distance `r` of point `center`.
    pub fn ball_indices(&self, center: usize, r: f64) -> Vec<usize> {
        (0..self.len())
            .filter(|&j| self.dist(center, j) <= r)
            .collect()
    }

    /// Check zero diagonal, symmetry, nonnegativity, and the triangle
    /// inequality over all finite triples. O(n³).
    pub fn validate(&self) -> Result<()> {
        let n = self.len();
        for i in 0..n {
            if self.dist(i, i) != 0.0 {
                return Err(Error::invalid(format!(
                    "dist({p},{p}) = {} != 0",
                    self.dist(i, i),
                    p = self.points[i]
                )));
            }
            for j in 0..n {
                let d = self.dist(i, j);
                if d < 0.0 || d.is_nan() {
                    return Err(Error::invalid(format!("negative or NaN distance at ({i},{j})")));
                }
                if d != self.dist(j, i) {
                    return Err(Error::invalid(format!(
                        "asymmetric distances at ({}, {})",
                        self.points[i], self.points[j]
                    )));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                let dij = self.dist(i, j);
                if !dij.is_finite() {
                    continue;
                }
                for k in 0..n {
                    let dik = self.dist(i, k);
                    let dkj = self.dist(k, j);
                    if dik.is_finite() && dkj.is_finite() && dij > dik + dkj + 1e-9 {
                        return Err(Error::invalid(format!(
                            "triangle inequality fails at ({}, {}, {})",
                            self.points[i], self.points[j], self.points[k]
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cycle_distances() {
        let c = FiniteMetricSpace::cycle(8, 1.0);
        assert_eq!(c.dist(0, 4), 4.0);
        assert_eq!(c.dist(0, 7), 1.0);
        c.validate().unwrap();
    }

    #[test]
    fn infinite_entries_are_allowed() {
        let pts = vec![Point::Vertex(0), Point::Vertex(1)];
        let m = FiniteMetricSpace::from_matrix(
            pts,
            vec![0.0, f64::INFINITY, f64::INFINITY, 0.0],
        )
        .unwrap();
        m.validate().unwrap();
        assert!(m.dist(0, 1).is_infinite());
    }
}
