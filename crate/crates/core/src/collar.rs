//! Collar spaces A × (0, 1]: a finite boundary metric space crossed with a
//! descending depth schedule, carrying the ℓ¹ product metric
//! d((a,t),(a',t')) = d_A(a,a') + |t − t'|.

use crate::error::{Error, Result};
use crate::space::{FiniteMetricSpace, Point};

#[derive(Debug, Clone)]
pub struct CollarSpace {
    boundary: FiniteMetricSpace,
    /// Strictly decreasing depths in (0, 1].
    depths: Vec<f64>,
}

impl CollarSpace {
    pub fn new(boundary: FiniteMetricSpace, depths: Vec<f64>) -> Result<CollarSpace> {
        if boundary.is_empty() {
            return Err(Error::EmptySpace);
        }
        if depths.is_empty() {
            return Err(Error::invalid("depth schedule is empty"));
        }
        for w in depths.windows(2) {
            if w[1] >= w[0] {
                return Err(Error::invalid("depth schedule must be strictly decreasing"));
            }
        }
        if depths[0] > 1.0 || *depths.last().unwrap() <= 0.0 {
            return Err(Error::invalid("depths must lie in (0, 1]"));
        }
        Ok(CollarSpace { boundary, depths })
    }

    /// Harmonic schedule {1/j : 1 ≤ j ≤ levels}.
    pub fn harmonic(boundary: FiniteMetricSpace, levels: usize) -> Result<CollarSpace> {
        let depths = (1..=levels).map(|j| 1.0 / j as f64).collect();
        CollarSpace::new(boundary, depths)
    }

    pub fn boundary(&self) -> &FiniteMetricSpace {
        &self.boundary
    }

    pub fn depths(&self) -> &[f64] {
        &self.depths
    }

    pub fn depth_count(&self) -> usize {
        self.depths.len()
    }

    pub fn point(&self, boundary: usize, depth: usize) -> Point {
        Point::Collar { boundary, depth }
    }

    /// Depth value t of a collar point; distance to the boundary copy A×{0}.
    pub fn clearance(&self, p: &Point) -> Result<f64> {
        match p {
            Point::Collar { depth, .. } => self
                .depths
                .get(*depth)
                .copied()
                .ok_or_else(|| Error::UnknownPoint(p.to_string())),
            _ => Err(Error::MissingCollarData(p.to_string())),
        }
    }

    pub fn boundary_index(&self, p: &Point) -> Result<usize> {
        match p {
            Point::Collar { boundary, .. } if *boundary < self.boundary.len() => Ok(*boundary),
            _ => Err(Error::UnknownPoint(p.to_string())),
        }
    }

    pub fn distance(&self, x: &Point, y: &Point) -> Result<f64> {
        let (bx, by) = (self.boundary_index(x)?, self.boundary_index(y)?);
        let (tx, ty) = (self.clearance(x)?, self.clearance(y)?);
        Ok(self.boundary.dist(bx, by) + (tx - ty).abs())
    }

    /// Distance from a collar point to a boundary point (a', 0).
    pub fn distance_to_boundary_point(&self, x: &Point, a: usize) -> Result<f64> {
        let bx = self.boundary_index(x)?;
        Ok(self.boundary.dist(bx, a) + self.clearance(x)?)
    }

    /// The deepest scheduled depth index with t ≤ bound, if any.
    pub fn first_depth_at_most(&self, bound: f64) -> Option<usize> {
        self.depths.iter().position(|&t| t <= bound)
    }

    /// Enumerate the collar as a finite metric space. Point (a, j) gets
    /// index a·depth_count + j.
    pub fn to_metric_space(&self) -> FiniteMetricSpace {
        let na = self.boundary.len();
        let nj = self.depths.len();
        let n = na * nj;
        let mut points = Vec::with_capacity(n);
        for a in 0..na {
            for j in 0..nj {
                points.push(Point::Collar {
                    boundary: a,
                    depth: j,
                });
            }
        }
        let mut dist = vec![0.0; n * n];
        for a in 0..na {
            for j in 0..nj {
                let i1 = a * nj + j;
                for b in 0..na {
                    for k in 0..nj {
                        let i2 = b * nj + k;
                        dist[i1 * n + i2] =
                            self.boundary.dist(a, b) + (self.depths[j] - self.depths[k]).abs();
                    }
                }
            }
        }
        FiniteMetricSpace::from_matrix(points, dist).expect("collar enumeration is well-formed")
    }

    pub fn flat_index(&self, boundary: usize, depth: usize) -> usize {
        boundary * self.depths.len() + depth
    }

    pub fn signature(&self) -> String {
        format!("collar:{}x{}", self.boundary.len(), self.depths.len())
    }
}
