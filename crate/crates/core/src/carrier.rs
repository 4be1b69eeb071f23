//! A carrier is the ambient space rays and covers live on: either a lazy
//! infinite graph or a collar space. It provides the exact metric, the
//! escape gauge (the quantity that must diverge along a simple end), and
//! group structure where the family has one.

use crate::collar::CollarSpace;
use crate::error::{Error, Result};
use crate::space::{LazyGraph, Point};

#[derive(Debug, Clone)]
pub enum Carrier {
    Graph(LazyGraph),
    Collar(CollarSpace),
}

impl Carrier {
    pub fn distance(&self, x: &Point, y: &Point) -> Result<f64> {
        match self {
            Carrier::Graph(g) => g.distance(x, y),
            Carrier::Collar(c) => c.distance(x, y),
        }
    }

    /// Default base point: the graph root, or the shallowest point above
    /// boundary index 0 for collars.
    pub fn default_base(&self) -> Point {
        match self {
            Carrier::Graph(g) => g.root(),
            Carrier::Collar(_) => Point::Collar {
                boundary: 0,
                depth: 0,
            },
        }
    }

    /// Escape gauge g(x): diverges along a sequence exactly when the
    /// sequence leaves every bounded set. Graphs use distance to the base;
    /// collars use the reciprocal boundary clearance (bounded sets are
    /// those with clearance bounded away from zero).
    pub fn escape_gauge(&self, base: &Point, x: &Point) -> Result<f64> {
        match self {
            Carrier::Graph(g) => g.distance(base, x),
            Carrier::Collar(c) => Ok(1.0 / c.clearance(x)?),
        }
    }

    /// Boundary clearance for collar points, `None` on graphs.
    pub fn collar_clearance(&self, x: &Point) -> Option<f64> {
        match self {
            Carrier::Graph(_) => None,
            Carrier::Collar(c) => c.clearance(x).ok(),
        }
    }

    pub fn group_diff(&self, x: &Point, y: &Point) -> Result<Point> {
        match self {
            Carrier::Graph(g) => g.group_diff(x, y),
            Carrier::Collar(_) => Err(Error::invalid(
                "left-translation structure needs a group family",
            )),
        }
    }

    pub fn gromov_product(&self, x: &Point, y: &Point, p: &Point) -> Result<f64> {
        let (dxp, dyp, dxy) = (
            self.distance(x, p)?,
            self.distance(y, p)?,
            self.distance(x, y)?,
        );
        if !dxp.is_finite() || !dyp.is_finite() || !dxy.is_finite() {
            return Err(Error::InfiniteDistance(x.to_string(), y.to_string()));
        }
        Ok(0.5 * (dxp + dyp - dxy))
    }

    pub fn graph(&self) -> Option<&LazyGraph> {
        match self {
            Carrier::Graph(g) => Some(g),
            Carrier::Collar(_) => None,
        }
    }

    pub fn collar(&self) -> Option<&CollarSpace> {
        match self {
            Carrier::Graph(_) => None,
            Carrier::Collar(c) => Some(c),
        }
    }

    pub fn signature(&self) -> String {
        match self {
            Carrier::Graph(g) => g.signature(),
            Carrier::Collar(c) => c.signature(),
        }
    }
}
