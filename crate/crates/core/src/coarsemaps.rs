//! Sampled checks for coarse-map conditions (bornologous, coarse
//! bornologous, closeness) and boundary extensions over collar spaces.
//!
//! All checks are sampled: they run over supplied ray pairs and a finite
//! basis of bounded sets, and return [`ScaleVerdict`]s. A map whose image
//! rays stop escaping is fine for the plain bornologous check (collapsing
//! an end is allowed there) but refutes the coarse check.

use crate::carrier::Carrier;
use crate::collar::CollarSpace;
use crate::ends::{equivalent, Budget, EndRelation, Ray, ScaleVerdict};
use crate::error::{Error, Result};
use crate::space::{invert_word, mul_words, Point};
use std::collections::BTreeMap;
use std::sync::Arc;

/// A deterministic point map given by an oracle.
#[derive(Clone)]
pub struct PointMap {
    pub tag: String,
    f: Arc<dyn Fn(&Point) -> Result<Point> + Send + Sync>,
}

impl std::fmt::Debug for PointMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "PointMap({})", self.tag)
    }
}

impl PointMap {
    pub fn new(
        tag: impl Into<String>,
        f: impl Fn(&Point) -> Result<Point> + Send + Sync + 'static,
    ) -> PointMap {
        PointMap {
            tag: tag.into(),
            f: Arc::new(f),
        }
    }

    pub fn apply(&self, p: &Point) -> Result<Point> {
        (self.f)(p)
    }

    pub fn identity() -> PointMap {
        PointMap::new("identity", |p| Ok(p.clone()))
    }

    pub fn constant(value: Point) -> PointMap {
        PointMap::new(format!("const:{value}"), move |_| Ok(value.clone()))
    }

    /// Integer-matrix linear map on lattice points (rows × input dim).
    pub fn lattice_linear(matrix: Vec<Vec<i64>>) -> PointMap {
        PointMap::new(format!("linear:{matrix:?}"), move |p| match p {
            Point::Lattice(v) => {
                let out: Vec<i64> = matrix
                    .iter()
                    .map(|row| {
                        if row.len() != v.len() {
                            return Err(Error::invalid("matrix row does not match dimension"));
                        }
                        Ok(row.iter().zip(v).map(|(a, b)| a * b).sum())
                    })
                    .collect::<Result<_>>()?;
                Ok(Point::Lattice(out))
            }
            other => Err(Error::UnknownPoint(other.to_string())),
        })
    }

    /// n ↦ ⌊n/k⌋ coordinatewise.
    pub fn lattice_floor_div(k: i64) -> PointMap {
        PointMap::new(format!("floordiv:{k}"), move |p| match p {
            Point::Lattice(v) => Ok(Point::Lattice(v.iter().map(|c| c.div_euclid(k)).collect())),
            other => Err(Error::UnknownPoint(other.to_string())),
        })
    }

    /// Word homomorphism: generator i maps to `images[i]` (inverses map to
    /// the inverse images).
    pub fn word_homomorphism(images: Vec<String>) -> PointMap {
        PointMap::new(format!("wordhom:{images:?}"), move |p| match p {
            Point::Word(w) => {
                let mut out = String::new();
                for c in w.chars() {
                    let idx = c.to_ascii_lowercase() as usize - 'a' as usize;
                    let image = images
                        .get(idx)
                        .ok_or_else(|| Error::invalid(format!("no image for generator {c}")))?;
                    if c.is_ascii_lowercase() {
                        out = mul_words(&out, image);
                    } else {
                        out = mul_words(&out, &invert_word(image));
                    }
                }
                Ok(Point::Word(out))
            }
            other => Err(Error::UnknownPoint(other.to_string())),
        })
    }

    pub fn tabulated(table: BTreeMap<Point, Point>) -> PointMap {
        PointMap::new("tabulated", move |p| {
            table
                .get(p)
                .cloned()
                .ok_or_else(|| Error::UnknownPoint(p.to_string()))
        })
    }

    /// g ∘ f (apply `f` first).
    pub fn compose(g: &PointMap, f: &PointMap) -> PointMap {
        let (gf, ff) = (g.clone(), f.clone());
        PointMap::new(format!("{}∘{}", g.tag, f.tag), move |p| {
            gf.apply(&ff.apply(p)?)
        })
    }
}

fn image_ray(map: &PointMap, ray: &Ray, target: &Arc<Carrier>) -> Result<Ray> {
    ray.map_points(target.clone(), |p| map.apply(p))
}

/// Image boundedness at scale: finite diameter on graphs, positive boundary
/// clearance on collars.
fn image_bounded(points: &[Point], carrier: &Carrier) -> Result<bool> {
    match carrier {
        Carrier::Graph(_) => {
            for (i, a) in points.iter().enumerate() {
                for b in &points[i + 1..] {
                    if !carrier.distance(a, b)?.is_finite() {
                        return Ok(false);
                    }
                }
            }
            Ok(true)
        }
        Carrier::Collar(c) => {
            for p in points {
                if c.clearance(p)? <= 0.0 {
                    return Ok(false);
                }
            }
            Ok(true)
        }
    }
}

/// A small sample window around the base, used to probe preimages: BFS on
/// graphs capped by point count, the full enumeration on collars.
fn sample_window(carrier: &Carrier, cap_points: usize) -> Result<Vec<(Point, f64)>> {
    let base = carrier.default_base();
    match carrier {
        Carrier::Graph(g) => {
            let mut radius = 1u64;
            let mut best = g.bfs_distances(&base, 1)?;
            loop {
                let next = g.bfs_distances(&base, radius + 1)?;
                if next.len() > cap_points || next.len() == best.len() {
                    break;
                }
                best = next;
                radius += 1;
            }
            let mut out: Vec<(Point, f64)> =
                best.into_iter().map(|(p, d)| (p, d as f64)).collect();
            out.sort_by(|a, b| a.0.cmp(&b.0));
            Ok(out)
        }
        Carrier::Collar(c) => {
            let mut out = Vec::new();
            for a in 0..c.boundary().len() {
                for j in 0..c.depth_count() {
                    let p = c.point(a, j);
                    let gauge = carrier.escape_gauge(&base, &p)?;
                    out.push((p, gauge));
                }
            }
            out.sort_by(|a, b| a.0.cmp(&b.0));
            Ok(out)
        }
    }
}

/// Bornologous check over verified-equivalent ray pairs: bounded test sets
/// around the source base must stay bounded in the image, and image rays
/// of each pair must either stop being simple ends or be equivalent under
/// the target relation.
pub fn is_bornologous_sampled(
    map: &PointMap,
    rel_x: &EndRelation,
    rel_y: &EndRelation,
    pairs: &[(Ray, Ray)],
    budget: &Budget,
) -> Result<ScaleVerdict> {
    let mut verdicts = Vec::new();
    // bounded basis: balls around the source base
    let window = sample_window(&rel_x.carrier, 512)?;
    for r in [1.0, 2.0, 4.0] {
        let set: Vec<Point> = window
            .iter()
            .filter(|(_, g)| *g <= r)
            .map(|(p, _)| p.clone())
            .collect();
        if set.is_empty() {
            continue;
        }
        let image: Result<Vec<Point>> = set.iter().map(|p| map.apply(p)).collect();
        let image = image?;
        if image_bounded(&image, &rel_y.carrier)? {
            verdicts.push(ScaleVerdict::equivalent(
                r,
                format!("image of the radius-{r} test ball is bounded"),
            ));
        } else {
            verdicts.push(ScaleVerdict::distinguished_at_radius(
                r,
                f64::INFINITY,
                format!("image of the radius-{r} test ball is unbounded"),
            ));
        }
    }
    for (idx, (x, y)) in pairs.iter().enumerate() {
        let v = equivalent(rel_x, x, y, budget)?;
        if !v.is_equivalent() {
            return Err(Error::PairNotEquivalent(idx));
        }
        let fx = image_ray(map, x, &rel_y.carrier)?;
        let fy = image_ray(map, y, &rel_y.carrier)?;
        if fx.certificate().stagnation.is_some() || fy.certificate().stagnation.is_some() {
            verdicts.push(ScaleVerdict::equivalent(
                0.0,
                format!("pair {idx}: an image ray is not a simple end (allowed here)"),
            ));
            continue;
        }
        verdicts.push(equivalent(rel_y, &fx, &fy, budget)?);
    }
    Ok(ScaleVerdict::conjoin(verdicts))
}

/// Coarse bornologous check: additionally, every single ray must map to an
/// escaping ray, and preimages of the bounded basis must stay bounded at
/// scale (they may not stretch to the sample window's edge).
pub fn is_coarse_bornologous_sampled(
    map: &PointMap,
    rel_x: &EndRelation,
    rel_y: &EndRelation,
    rays: &[Ray],
    bounded_basis: &[Vec<Point>],
    budget: &Budget,
) -> Result<ScaleVerdict> {
    let mut verdicts = Vec::new();
    for (idx, ray) in rays.iter().enumerate() {
        let image = image_ray(map, ray, &rel_y.carrier)?;
        if let Some(radius) = image.certificate().stagnation {
            verdicts.push(ScaleVerdict::distinguished_at_radius(
                radius,
                radius,
                format!("ray {idx}: image stops escaping (stagnates at radius {radius})"),
            ));
            continue;
        }
        verdicts.push(ScaleVerdict::equivalent(
            image.certificate().escape_scale,
            format!("ray {idx}: image escapes to scale {}", image.certificate().escape_scale),
        ));
    }
    // preimages of the bounded basis within the sample window; window
    // points where the map is undefined at the available resolution are
    // outside the certified depth and are skipped
    let window = sample_window(&rel_x.carrier, 512)?;
    let reach = window.iter().map(|(_, g)| *g).fold(0.0f64, f64::max);
    for (bidx, bset) in bounded_basis.iter().enumerate() {
        let mut worst: Option<(Point, f64)> = None;
        for (p, gauge) in &window {
            let fp = match map.apply(p) {
                Ok(q) => q,
                Err(_) => continue,
            };
            if bset.contains(&fp) && *gauge > worst.as_ref().map_or(f64::MIN, |w| w.1) {
                worst = Some((p.clone(), *gauge));
            }
        }
        if let Some((p, gauge)) = worst {
            if gauge > 0.75 * reach {
                verdicts.push(ScaleVerdict::distinguished_at_radius(
                    gauge,
                    gauge,
                    format!(
                        "preimage of bounded test set {bidx} reaches {p} at gauge {gauge} (window reach {reach})"
                    ),
                ));
                continue;
            }
        }
        verdicts.push(ScaleVerdict::equivalent(
            reach,
            format!("preimage of bounded test set {bidx} is bounded at scale"),
        ));
    }
    // pair equivalence over equivalent pairs of the sample
    for i in 0..rays.len() {
        for j in i + 1..rays.len() {
            let v = equivalent(rel_x, &rays[i], &rays[j], budget)?;
            if !v.is_equivalent() {
                continue;
            }
            let fx = image_ray(map, &rays[i], &rel_y.carrier)?;
            let fy = image_ray(map, &rays[j], &rel_y.carrier)?;
            if fx.certificate().stagnation.is_some() || fy.certificate().stagnation.is_some() {
                continue; // already reported above
            }
            verdicts.push(equivalent(rel_y, &fx, &fy, budget)?);
        }
    }
    Ok(ScaleVerdict::conjoin(verdicts))
}

/// Closeness of two maps: per ray, both image rays must be simple ends and
/// equivalent under the target relation.
pub fn are_close(
    map_f: &PointMap,
    map_g: &PointMap,
    rel_y: &EndRelation,
    rays: &[Ray],
    budget: &Budget,
) -> Result<ScaleVerdict> {
    let mut verdicts = Vec::with_capacity(rays.len());
    for ray in rays {
        let fx = image_ray(map_f, ray, &rel_y.carrier)?;
        let gx = image_ray(map_g, ray, &rel_y.carrier)?;
        fx.require_escaping()?;
        gx.require_escaping()?;
        verdicts.push(equivalent(rel_y, &fx, &gx, budget)?);
    }
    Ok(ScaleVerdict::conjoin(verdicts))
}

/// A finite interior net approximating the boundary: Hausdorff distance and
/// boundary clearance are recorded data, checkable against the net points.
#[derive(Debug, Clone)]
pub struct Net {
    pub points: Vec<Point>,
    pub hausdorff: f64,
    pub clearance: f64,
}

/// Canonical interior sampler for a collar: the shallowest scheduled depth
/// at most `max_dist` above the requested boundary point.
pub fn collar_interior_sampler(collar: &CollarSpace) -> impl Fn(usize, f64) -> Option<Point> + '_ {
    move |boundary, max_dist| {
        collar
            .first_depth_at_most(max_dist)
            .map(|depth| Point::Collar { boundary, depth })
    }
}

/// Build nets Y_n (n = 1..n_max) with Hausdorff distance ≤ 2/n to the
/// boundary and positive, decreasing clearance, by picking one interior
/// point per 1/n-ball around each boundary point.
pub fn totally_bounded_nets(
    collar: &CollarSpace,
    sampler: &dyn Fn(usize, f64) -> Option<Point>,
    n_max: usize,
) -> Result<Vec<Net>> {
    let boundary = collar.boundary();
    let mut nets = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let radius = 1.0 / n as f64;
        let mut points = Vec::with_capacity(boundary.len());
        for a in 0..boundary.len() {
            let p = sampler(a, radius).ok_or_else(|| Error::NetCoverage {
                point: boundary.point(a).to_string(),
                radius,
            })?;
            if collar.distance_to_boundary_point(&p, a)? > radius + 1e-12 {
                return Err(Error::NetCoverage {
                    point: boundary.point(a).to_string(),
                    radius,
                });
            }
            points.push(p);
        }
        // actual Hausdorff distance between the net and the boundary copy
        let mut hausdorff = 0.0f64;
        for a in 0..boundary.len() {
            let mut best = f64::INFINITY;
            for p in &points {
                best = best.min(collar.distance_to_boundary_point(p, a)?);
            }
            hausdorff = hausdorff.max(best);
        }
        let mut clearance = f64::INFINITY;
        for p in &points {
            clearance = clearance.min(collar.clearance(p)?);
            hausdorff = hausdorff.max(collar.clearance(p)?);
        }
        nets.push(Net {
            points,
            hausdorff,
            clearance,
        });
    }
    Ok(nets)
}

/// Extend a boundary map across the collar: points at depth ≥ 1 go to
/// `y0`; a point at depth t ∈ [1/(m+1), 1/m) goes to the point of the
/// first net with Hausdorff distance < 1/m that is closest to the image of
/// its nearest boundary point (nearest within depth, which realizes the
/// d(x, A) > 0.5·d(x, x') constraint). Ties break by canonical order. The
/// image of the interior stays in the interior.
pub fn extend_from_boundary(
    boundary_map: &PointMap,
    source: &CollarSpace,
    target: &CollarSpace,
    nets: &[Net],
    y0: Point,
) -> Result<PointMap> {
    target.clearance(&y0)?;
    // tabulate the boundary map as source index → target index
    let mut table = Vec::with_capacity(source.boundary().len());
    for a in 0..source.boundary().len() {
        let image = boundary_map.apply(source.boundary().point(a))?;
        let idx = target
            .boundary()
            .index_of(&image)
            .ok_or_else(|| Error::UnknownPoint(image.to_string()))?;
        table.push(idx);
    }
    let source = source.clone();
    let target = target.clone();
    let nets = nets.to_vec();
    let tag = format!("extend({},y0={y0})", boundary_map.tag);
    Ok(PointMap::new(tag, move |x| {
        let t = source.clearance(x)?;
        if t >= 1.0 {
            return Ok(y0.clone());
        }
        let inv = 1.0 / t;
        let mut m = inv.floor() as u64;
        if (inv - inv.round()).abs() < 1e-9 {
            m = inv.round() as u64 - 1;
        }
        let m = m.max(1);
        let net = nets
            .iter()
            .find(|n| n.hausdorff < 1.0 / m as f64)
            .ok_or(Error::NetResolution { needed: m })?;
        // nearest boundary points satisfy d(x, A) > 0.5 · d(x, x'):
        // candidates are those with d_A(a_x, a') < t
        let ax = source.boundary_index(x)?;
        let mut best: Option<(f64, usize)> = None;
        for a in 0..source.boundary().len() {
            let d = source.boundary().dist(ax, a) + t;
            if source.boundary().dist(ax, a) < t {
                match best {
                    Some((bd, _)) if bd <= d => {}
                    _ => best = Some((d, a)),
                }
            }
        }
        let x_prime = best.map(|(_, a)| a).unwrap_or(ax);
        let g_xp = table[x_prime];
        let mut chosen: Option<(f64, &Point)> = None;
        for p in &net.points {
            let d = target.distance_to_boundary_point(p, g_xp)?;
            let better = match &chosen {
                None => true,
                Some((bd, bp)) => d < *bd - 1e-12 || ((d - *bd).abs() <= 1e-12 && p < bp),
            };
            if better {
                chosen = Some((d, p));
            }
        }
        chosen
            .map(|(_, p)| p.clone())
            .ok_or_else(|| Error::invalid("net has no points"))
    }))
}

/// Boundary-extension harness: along each sampled ray the image must be
/// Cauchy at scale (tail diameter under the finest tolerance), and image
/// limits must agree exactly on rays that are equivalent in the source.
pub fn extension_limit_check(
    map: &PointMap,
    rel_x: &EndRelation,
    rel_y: &EndRelation,
    rays: &[Ray],
    budget: &Budget,
) -> Result<ScaleVerdict> {
    let eps = budget
        .tolerances
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    let mut verdicts = Vec::new();
    let mut images = Vec::with_capacity(rays.len());
    for (idx, ray) in rays.iter().enumerate() {
        let image = image_ray(map, ray, &rel_y.carrier)?;
        let len = image.len();
        let tail: Vec<&Point> = (len / 2..len).map(|n| image.point(n)).collect();
        let mut diam = 0.0f64;
        for (i, a) in tail.iter().enumerate() {
            for b in &tail[i + 1..] {
                diam = diam.max(rel_y.carrier.distance(a, b)?);
            }
        }
        if diam < eps {
            verdicts.push(ScaleVerdict::equivalent(
                1.0 / eps,
                format!("ray {idx}: image tail diameter {diam} < {eps}"),
            ));
        } else {
            verdicts.push(ScaleVerdict::inconclusive(format!(
                "ray {idx}: image tail diameter {diam} not below {eps}"
            )));
        }
        images.push(image);
    }
    for i in 0..rays.len() {
        for j in i + 1..rays.len() {
            if equivalent(rel_x, &rays[i], &rays[j], budget)?.is_equivalent() {
                verdicts.push(equivalent(rel_y, &images[i], &images[j], budget)?);
            }
        }
    }
    Ok(ScaleVerdict::conjoin(verdicts))
}
