//! Rays: finite prefixes of candidate simple ends, with escape certificates.
//!
//! A simple end must leave every bounded set for good. A finite prefix can
//! certify that behavior only up to a scale: the certificate records the
//! gauge of every point (distance to base on graphs, reciprocal boundary
//! clearance on collars), the last index seen at or below each radius, and
//! whether the gauge keeps making progress. A prefix whose gauge maximum
//! does not grow over its second half is flagged as stagnating and is not
//! accepted as a simple-end approximation.

use super::verdict::Budget;
use crate::carrier::Carrier;
use crate::error::{Error, Result};
use crate::space::{mul_words, Point};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum RayGenerator {
    /// n ↦ n · direction on a lattice.
    LatticeAxis { direction: Vec<i64> },
    /// n ↦ head · cycleⁿ in a free group (reduced).
    WordPath { head: String, cycle: String },
    /// n ↦ (boundary, start + n·step) descending the collar depth schedule.
    CollarDescent {
        boundary: usize,
        start: usize,
        step: usize,
    },
    /// Explicit table; undefined beyond its length.
    Table { points: Vec<Point> },
}

impl RayGenerator {
    pub fn generate(&self, n: usize) -> Option<Point> {
        match self {
            RayGenerator::LatticeAxis { direction } => Some(Point::Lattice(
                direction.iter().map(|&c| c * n as i64).collect(),
            )),
            RayGenerator::WordPath { head, cycle } => {
                let mut w = head.clone();
                for _ in 0..n {
                    w = mul_words(&w, cycle);
                }
                Some(Point::Word(w))
            }
            RayGenerator::CollarDescent {
                boundary,
                start,
                step,
            } => Some(Point::Collar {
                boundary: *boundary,
                depth: start + n * step,
            }),
            RayGenerator::Table { points } => points.get(n).cloned(),
        }
    }
}

/// Finite-scale escape data for a prefix.
#[derive(Debug, Clone, Serialize)]
pub struct EscapeCertificate {
    pub gauges: Vec<f64>,
    /// Largest radius the prefix certifies escape for (⌊max gauge⌋), when
    /// not stagnating.
    pub escape_scale: f64,
    /// Witness radius when the gauge maximum fails to grow over the second
    /// half of the prefix.
    pub stagnation: Option<f64>,
}

impl EscapeCertificate {
    fn from_gauges(gauges: Vec<f64>) -> EscapeCertificate {
        let len = gauges.len();
        let max_all = gauges.iter().cloned().fold(0.0f64, f64::max);
        let stagnation = if len >= 2 {
            let half = len / 2;
            let head_max = gauges[..half].iter().cloned().fold(f64::MIN, f64::max);
            let tail_max = gauges[half..].iter().cloned().fold(f64::MIN, f64::max);
            if tail_max <= head_max {
                Some(tail_max.max(0.0).floor())
            } else {
                None
            }
        } else {
            None
        };
        EscapeCertificate {
            gauges,
            escape_scale: max_all.floor(),
            stagnation,
        }
    }

    /// Last prefix index with gauge ≤ r, if any.
    pub fn last_below(&self, r: f64) -> Option<usize> {
        self.gauges
            .iter()
            .enumerate()
            .rev()
            .find(|(_, &g)| g <= r)
            .map(|(i, _)| i)
    }
}

#[derive(Debug, Clone)]
pub struct Ray {
    carrier: Arc<Carrier>,
    base: Point,
    points: Vec<Point>,
    generator: Option<RayGenerator>,
    certificate: EscapeCertificate,
}

impl Ray {
    pub fn new(
        carrier: Arc<Carrier>,
        base: Point,
        points: Vec<Point>,
        generator: Option<RayGenerator>,
    ) -> Result<Ray> {
        if points.is_empty() {
            return Err(Error::invalid("ray prefix is empty"));
        }
        let mut gauges = Vec::with_capacity(points.len());
        for p in &points {
            gauges.push(carrier.escape_gauge(&base, p)?);
        }
        Ok(Ray {
            certificate: EscapeCertificate::from_gauges(gauges),
            carrier,
            base,
            points,
            generator,
        })
    }

    /// Run a generator out to `len` points, based at the carrier default.
    pub fn from_generator(carrier: Arc<Carrier>, gen: RayGenerator, len: usize) -> Result<Ray> {
        let base = carrier.default_base();
        let mut points = Vec::with_capacity(len);
        for n in 0..len {
            match gen.generate(n) {
                Some(p) => points.push(p),
                None => return Err(Error::ExtensionUndefined { index: n }),
            }
        }
        Ray::new(carrier, base, points, Some(gen))
    }

    pub fn carrier(&self) -> &Arc<Carrier> {
        &self.carrier
    }

    pub fn base(&self) -> &Point {
        &self.base
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, n: usize) -> &Point {
        &self.points[n]
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn certificate(&self) -> &EscapeCertificate {
        &self.certificate
    }

    /// Reject prefixes that stagnate (fail the escape certificate).
    pub fn require_escaping(&self) -> Result<()> {
        match self.certificate.stagnation {
            Some(radius) => Err(Error::NotASimpleEnd { radius }),
            None => Ok(()),
        }
    }

    /// Default budget for comparisons over this prefix.
    pub fn default_budget(&self) -> Budget {
        Budget::for_prefix(self.len())
    }

    /// Image ray under a pointwise map into `target`, based at the target
    /// default base. The image keeps no generator.
    pub fn map_points<F>(&self, target: Arc<Carrier>, f: F) -> Result<Ray>
    where
        F: Fn(&Point) -> Result<Point>,
    {
        let base = target.default_base();
        let points: Result<Vec<Point>> = self.points.iter().map(|p| f(p)).collect();
        Ray::new(target, base, points?, None)
    }
}

/// Extend a ray's prefix via its generator and recompute the certificate.
/// Fails if the generator is missing or undefined at some index, or if the
/// extended prefix violates the escape certificate.
pub fn extend_ray(ray: &Ray, target_len: usize) -> Result<Ray> {
    if target_len < ray.len() {
        return Err(Error::invalid("target length below current prefix length"));
    }
    let gen = ray
        .generator
        .clone()
        .ok_or_else(|| Error::invalid("ray has no generator oracle"))?;
    let mut points = ray.points.clone();
    for n in ray.len()..target_len {
        match gen.generate(n) {
            Some(p) => points.push(p),
            None => return Err(Error::ExtensionUndefined { index: n }),
        }
    }
    let extended = Ray::new(
        ray.carrier.clone(),
        ray.base.clone(),
        points,
        Some(gen),
    )?;
    extended.require_escaping()?;
    Ok(extended)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::LazyGraph;

    fn line() -> Arc<Carrier> {
        Arc::new(Carrier::Graph(LazyGraph::lattice(1)))
    }

    #[test]
    fn straight_ray_certifies_high_scale() {
        let ray = Ray::from_generator(
            line(),
            RayGenerator::LatticeAxis { direction: vec![1] },
            1,
        )
        .unwrap();
        let ray = extend_ray(&ray, 100).unwrap();
        assert_eq!(ray.len(), 100);
        assert!(ray.certificate().escape_scale >= 99.0);
    }

    #[test]
    fn constant_ray_fails_at_radius_zero() {
        let pts = vec![Point::Lattice(vec![0]); 2];
        let ray = Ray::new(
            line(),
            Point::Lattice(vec![0]),
            pts,
            Some(RayGenerator::Table {
                points: vec![Point::Lattice(vec![0]); 10],
            }),
        )
        .unwrap();
        let err = extend_ray(&ray, 10).unwrap_err();
        match err {
            Error::NotASimpleEnd { radius } => assert_eq!(radius, 0.0),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn word_ray_in_free_group() {
        let f2 = Arc::new(Carrier::Graph(LazyGraph::free_group(2)));
        let ray = Ray::from_generator(
            f2,
            RayGenerator::WordPath {
                head: String::new(),
                cycle: "a".into(),
            },
            50,
        )
        .unwrap();
        assert!(ray.certificate().escape_scale >= 49.0);
        assert_eq!(ray.point(3), &Point::Word("aaa".into()));
    }

    #[test]
    fn table_generator_runs_out() {
        let gen = RayGenerator::Table {
            points: vec![Point::Lattice(vec![0]), Point::Lattice(vec![1])],
        };
        let ray = Ray::from_generator(line(), gen, 2).unwrap();
        let err = extend_ray(&ray, 5).unwrap_err();
        assert!(matches!(err, Error::ExtensionUndefined { index: 2 }));
    }

    #[test]
    fn last_below_matches_gauges() {
        let ray = Ray::from_generator(
            line(),
            RayGenerator::LatticeAxis { direction: vec![1] },
            20,
        )
        .unwrap();
        assert_eq!(ray.certificate().last_below(5.0), Some(5));
        assert_eq!(ray.certificate().last_below(0.5), Some(0));
    }
}
