//! Uniform-cover verification and the band construction that coarsens a
//! uniformly bounded collar cover into one of multiplicity ≤ 3k+3.
//!
//! The collar is discretized as boundary × depth grid. The construction
//! walks depth thresholds μ_0 = 1 > μ_1 = 1/2 > μ_2 > ..., picks graded
//! boundary covers V_{α(n)} with shrinking uniformity radii, and assembles
//! the band cover W = ⋃ V_{α(n)} × (μ_{n+2}, μ_{n−1}]. Every depth lies in
//! at most 3 bands, so multiplicity is at most 3·(k+1). All claims are
//! re-verified exhaustively on the grid after the run.

use crate::collar::CollarSpace;
use crate::error::{Error, Result};
use crate::largescale::Cover;
use crate::space::FiniteMetricSpace;
use serde::Serialize;
use std::collections::BTreeSet;

/// Verified data of a uniform cover: mesh, multiplicity, and the largest
/// uniformity threshold (every ball of radius strictly below it lies inside
/// some element), computed exhaustively.
#[derive(Debug, Clone, Serialize)]
pub struct UniformCoverWitness {
    pub cover: Cover,
    pub mesh: f64,
    pub multiplicity: usize,
    pub lebesgue: f64,
}

pub fn verify_uniform_cover(
    a: &FiniteMetricSpace,
    v: &Cover,
    k: usize,
) -> Result<UniformCoverWitness> {
    let n = a.len();
    if let Some(&gap) = v.gaps(n).first() {
        return Err(Error::NotACover(a.point(gap).to_string()));
    }
    let mut counts = vec![0usize; n];
    for e in &v.elements {
        for &i in e {
            counts[i] += 1;
        }
    }
    for (i, &c) in counts.iter().enumerate() {
        if c > k + 1 {
            return Err(Error::MultiplicityExceeded {
                point: a.point(i).to_string(),
                found: c,
                limit: k + 1,
            });
        }
    }
    let mesh = v.mesh(a);
    // uniformity threshold: min over points of the best clearance an
    // element containing the point has to its complement
    let mut lebesgue = f64::INFINITY;
    for p in 0..n {
        let mut best = 0.0f64;
        for e in &v.elements {
            if !e.contains(&p) {
                continue;
            }
            let clearance = (0..n)
                .filter(|q| !e.contains(q))
                .map(|q| a.dist(p, q))
                .fold(f64::INFINITY, f64::min);
            best = best.max(clearance);
        }
        lebesgue = lebesgue.min(best);
    }
    if lebesgue <= 0.0 {
        return Err(Error::invalid(
            "cover admits no positive uniformity radius",
        ));
    }
    Ok(UniformCoverWitness {
        cover: v.clone(),
        mesh,
        multiplicity: counts.into_iter().max().unwrap_or(0),
        lebesgue,
    })
}

/// A graded boundary cover handed to the band construction: the cover plus
/// its declared uniformity radius δ (any positive value at most the
/// verified threshold is valid; the list must be strictly decreasing).
#[derive(Debug, Clone)]
pub struct GradedCover {
    pub cover: Cover,
    pub delta: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct StepTrace {
    pub step: usize,
    /// Absolute difference of the two previous levels (the gap the next
    /// grade's δ must undercut).
    pub level_gap: f64,
    pub chosen_alpha: usize,
    pub star_min_depth: f64,
    pub chosen_mu: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CollarCoverPlan {
    /// μ_0 = 1 > μ_1 = 1/2 > ... (strictly decreasing thresholds).
    pub mu: Vec<f64>,
    /// α(0) = 0 < α(1) < ... (grade picked per band).
    pub alpha: Vec<usize>,
    /// The assembled band cover over the collar grid.
    pub w: Cover,
    pub k: usize,
    pub multiplicity: usize,
    /// Depth above which coarsening is verified: every input element
    /// meeting A × [covered_depth, 1] is contained in some band element.
    pub covered_depth: f64,
    pub trace: Vec<StepTrace>,
    /// Band n covers the depth interval (mu[n+2], mu[n-1]] with grade
    /// alpha[n]; element ranges index into `w.elements`.
    pub bands: Vec<(usize, usize)>,
}

fn depth_of(collar: &CollarSpace, flat: usize) -> f64 {
    collar.depths()[flat % collar.depth_count()]
}

fn max_diam_meeting_below(
    collar: &CollarSpace,
    fms: &FiniteMetricSpace,
    u: &Cover,
    bound: f64,
) -> (f64, Option<usize>) {
    let mut worst = (0.0f64, None);
    for (idx, e) in u.elements.iter().enumerate() {
        if e.iter().any(|&i| depth_of(collar, i) <= bound) {
            let pts: Vec<usize> = e.iter().copied().collect();
            let d = fms.diameter_of(&pts);
            if d > worst.0 {
                worst = (d, Some(idx));
            }
        }
    }
    worst
}

/// Run the band construction for a uniformly bounded cover `u` of the
/// discretized collar, using graded boundary covers of multiplicity ≤ k+1.
/// Stops when the requested number of steps completes, or when the depth
/// grid or the grade list is exhausted (`max_steps = None` runs as deep as
/// the discretization allows). The returned plan is verified: multiplicity
/// at most 3k+3 and exhaustive coarsening over the covered depth range.
pub fn build_collar_cover(
    collar: &CollarSpace,
    grades: &[GradedCover],
    u: &Cover,
    k: usize,
    max_steps: Option<usize>,
) -> Result<CollarCoverPlan> {
    let boundary = collar.boundary();
    let fms = collar.to_metric_space();
    let n_collar = boundary.len() * collar.depth_count();
    if !u.is_cover_of(n_collar) {
        let gap = u.gaps(n_collar)[0];
        return Err(Error::NotACover(fms.point(gap).to_string()));
    }
    // validate grades: verified uniform covers, mesh ≤ 1/n, δ strictly
    // decreasing and at most the verified threshold
    let mut deltas = Vec::with_capacity(grades.len() + 1);
    deltas.push(f64::INFINITY); // grade 0: the whole boundary
    for (i, g) in grades.iter().enumerate() {
        let witness = verify_uniform_cover(boundary, &g.cover, k)?;
        let n = i + 1;
        if witness.mesh > 1.0 / n as f64 + 1e-12 {
            return Err(Error::invalid(format!(
                "grade {n} has mesh {} > 1/{n}",
                witness.mesh
            )));
        }
        if g.delta <= 0.0 || g.delta > witness.lebesgue {
            return Err(Error::invalid(format!(
                "grade {n} declares δ = {} outside (0, {}]",
                g.delta, witness.lebesgue
            )));
        }
        if *deltas.last().unwrap() <= g.delta {
            return Err(Error::invalid(
                "declared uniformity radii must be strictly decreasing",
            ));
        }
        deltas.push(g.delta);
    }
    // mesh must shrink with depth
    let deepest = *collar.depths().last().unwrap();
    let shallow_mesh = max_diam_meeting_below(collar, &fms, u, 1.0).0;
    let (deep_mesh, deep_witness) = max_diam_meeting_below(collar, &fms, u, deepest);
    if deep_mesh >= shallow_mesh && shallow_mesh > 0.0 {
        return Err(Error::MeshNotShrinking {
            element: deep_witness.unwrap_or(0),
            diameter: deep_mesh,
        });
    }

    let mut mu: Vec<f64> = vec![1.0, 0.5];
    let mut alpha = vec![0usize];
    let mut trace = Vec::new();
    let grid: Vec<f64> = collar.depths().to_vec();
    loop {
        let s = alpha.len();
        if let Some(limit) = max_steps {
            if s > limit {
                break;
            }
        }
        let gap = (mu[s - 1] - mu[s]).abs();
        let next_alpha = match (alpha[s - 1] + 1..deltas.len()).find(|&m| deltas[m] < gap) {
            Some(m) => m,
            None => {
                if max_steps.is_some() {
                    return Err(Error::DepthExhausted {
                        step: s,
                        detail: format!("no grade with δ below the level gap {gap}"),
                    });
                }
                break;
            }
        };
        // star of the region at depth ≥ μ_s
        let region: BTreeSet<usize> = (0..n_collar)
            .filter(|&i| depth_of(collar, i) >= mu[s] - 1e-12)
            .collect();
        let star = crate::largescale::star(&region, u);
        let star_min = star
            .iter()
            .map(|&i| depth_of(collar, i))
            .fold(f64::INFINITY, f64::min);
        // largest grid value below the star floor whose tail mesh fits
        // (grid is descending, so plain iteration finds it)
        let candidate = grid
            .iter()
            .find(|&&d| {
                d < star_min - 1e-12
                    && max_diam_meeting_below(collar, &fms, u, d).0 < deltas[next_alpha] / 2.0
            })
            .copied();
        let new_mu = match candidate {
            Some(d) => d,
            None => {
                if max_steps.is_some() {
                    return Err(Error::DepthExhausted {
                        step: s,
                        detail: format!(
                            "no grid depth below {star_min} with mesh under δ/2 = {}",
                            deltas[next_alpha] / 2.0
                        ),
                    });
                }
                break;
            }
        };
        if new_mu >= mu[s] {
            if max_steps.is_some() {
                return Err(Error::DepthExhausted {
                    step: s,
                    detail: "level thresholds stopped decreasing".into(),
                });
            }
            break;
        }
        trace.push(StepTrace {
            step: s,
            level_gap: gap,
            chosen_alpha: next_alpha,
            star_min_depth: star_min,
            chosen_mu: new_mu,
        });
        alpha.push(next_alpha);
        mu.push(new_mu);
    }
    let stages = alpha.len() - 1; // completed stages beyond α(0)
    if stages < 1 {
        return Err(Error::DepthExhausted {
            step: 1,
            detail: "discretization too shallow for a single stage".into(),
        });
    }
    // assemble W: band n uses grade alpha[n] over (mu[n+2], mu[n-1]]
    let grade_cover = |g: usize| -> Cover {
        if g == 0 {
            Cover::new(vec![(0..boundary.len()).collect()])
        } else {
            grades[g - 1].cover.clone()
        }
    };
    let mut w_elements = Vec::new();
    let mut bands = Vec::new();
    for n in 0..stages {
        let hi = if n == 0 { 1.0 } else { mu[n - 1] };
        let lo = mu[n + 2];
        let start = w_elements.len();
        for e in &grade_cover(alpha[n]).elements {
            let mut band_elem = BTreeSet::new();
            for &a in e {
                for j in 0..collar.depth_count() {
                    let d = collar.depths()[j];
                    if d > lo + 1e-12 && d <= hi + 1e-12 {
                        band_elem.insert(collar.flat_index(a, j));
                    }
                }
            }
            if !band_elem.is_empty() {
                w_elements.push(band_elem);
            }
        }
        bands.push((start, w_elements.len()));
    }
    let w = Cover::new(w_elements);
    // verification pass
    for win in mu.windows(2) {
        if win[1] >= win[0] {
            return Err(Error::invalid("level thresholds are not strictly decreasing"));
        }
    }
    for win in alpha.windows(2) {
        if win[1] <= win[0] {
            return Err(Error::invalid("grade indices are not strictly increasing"));
        }
    }
    let multiplicity = w.multiplicity(n_collar);
    if multiplicity > 3 * (k + 1) {
        let mut counts = vec![0usize; n_collar];
        for e in &w.elements {
            for &i in e {
                counts[i] += 1;
            }
        }
        let worst = counts.iter().enumerate().max_by_key(|(_, &c)| c).unwrap().0;
        return Err(Error::MultiplicityExceeded {
            point: fms.point(worst).to_string(),
            found: multiplicity,
            limit: 3 * (k + 1),
        });
    }
    // coarsening over the covered depth range
    let covered_depth = mu[stages - 1];
    for (idx, e) in u.elements.iter().enumerate() {
        if e.is_empty() {
            continue;
        }
        if e.iter().any(|&i| depth_of(collar, i) >= covered_depth - 1e-12) {
            let contained = w.elements.iter().any(|we| e.is_subset(we));
            if !contained {
                return Err(Error::invalid(format!(
                    "band cover fails to coarsen element {idx} within the covered range"
                )));
            }
        }
    }
    Ok(CollarCoverPlan {
        mu,
        alpha,
        w,
        k,
        multiplicity,
        covered_depth,
        trace,
        bands,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SliceCheck {
    /// The chosen slice depth (deepest qualifying grid value).
    pub depth: f64,
    pub depth_index: usize,
    /// Elements meeting the slice, as boundary-index sets.
    pub restriction: Vec<BTreeSet<usize>>,
    pub multiplicity: usize,
    pub max_restricted_diameter: f64,
}

/// Find a depth t such that every cover element meeting A×{t} has diameter
/// below 1/(2r), then verify the restriction to the slice refines the
/// r-ball cover of the boundary with multiplicity ≤ k+1.
pub fn slice_check(
    collar: &CollarSpace,
    v: &Cover,
    r: f64,
    k: usize,
) -> Result<SliceCheck> {
    let boundary = collar.boundary();
    let fms = collar.to_metric_space();
    let n_collar = boundary.len() * collar.depth_count();
    let mult_all = v.multiplicity(n_collar);
    if mult_all > k + 1 {
        return Err(Error::MultiplicityExceeded {
            point: "collar".into(),
            found: mult_all,
            limit: k + 1,
        });
    }
    let threshold = 1.0 / (2.0 * r);
    let mut chosen: Option<usize> = None;
    'depths: for j in (0..collar.depth_count()).rev() {
        for e in &v.elements {
            let meets = e.iter().any(|&i| i % collar.depth_count() == j);
            if meets {
                let pts: Vec<usize> = e.iter().copied().collect();
                if fms.diameter_of(&pts) >= threshold {
                    continue 'depths;
                }
            }
        }
        chosen = Some(j);
        break;
    }
    let depth_index = chosen.ok_or_else(|| Error::DepthExhausted {
        step: 0,
        detail: format!("no slice where every meeting element has diameter < {threshold}"),
    })?;
    let mut restriction = Vec::new();
    let mut max_diam = 0.0f64;
    for e in &v.elements {
        let proj: BTreeSet<usize> = e
            .iter()
            .filter(|&&i| i % collar.depth_count() == depth_index)
            .map(|&i| i / collar.depth_count())
            .collect();
        if proj.is_empty() {
            continue;
        }
        let idx: Vec<usize> = proj.iter().copied().collect();
        let diam = boundary.diameter_of(&idx);
        max_diam = max_diam.max(diam);
        // must sit inside some r-ball of the boundary
        let refines = (0..boundary.len())
            .any(|c| proj.iter().all(|&p| boundary.dist(c, p) <= r));
        if !refines {
            return Err(Error::invalid(format!(
                "slice restriction of an element is not inside any {r}-ball"
            )));
        }
        restriction.push(proj);
    }
    let mut counts = vec![0usize; boundary.len()];
    for e in &restriction {
        for &i in e {
            counts[i] += 1;
        }
    }
    let multiplicity = counts.into_iter().max().unwrap_or(0);
    if multiplicity > k + 1 {
        return Err(Error::MultiplicityExceeded {
            point: "slice".into(),
            found: multiplicity,
            limit: k + 1,
        });
    }
    Ok(SliceCheck {
        depth: collar.depths()[depth_index],
        depth_index,
        restriction,
        multiplicity,
        max_restricted_diameter: max_diam,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct EscapeCertificateCell {
    pub lambda_index: usize,
    pub bound: usize,
    /// Grid cell (row, column) owned by this (function, bound) pair.
    pub cell: (usize, usize),
    pub lambda_value: f64,
    pub xi_value: f64,
    pub gap: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DiagonalEscape {
    /// ξ tabulated on the |S| × R_max grid.
    pub xi: Vec<Vec<f64>>,
    pub certificates: Vec<EscapeCertificateCell>,
}

/// Tabulate ξ(i, R) = λ_i(i, R) + R + 1 on the grid and certify that every
/// (λ, R) combination owns a cell where ξ − λ = R + 1 > R. Each λ is a
/// table of nonnegative values with |S| rows and R_max columns.
pub fn diagonal_escape(s: &[Vec<Vec<f64>>], r_max: usize) -> Result<DiagonalEscape> {
    if s.is_empty() || r_max == 0 {
        return Err(Error::GridTooSmall(
            "need at least one function and one bound".into(),
        ));
    }
    let rows = s.len();
    for (l, table) in s.iter().enumerate() {
        if table.len() != rows || table.iter().any(|row| row.len() != r_max) {
            return Err(Error::GridTooSmall(format!(
                "function {l} is not tabulated on the {rows}×{r_max} grid"
            )));
        }
        if table.iter().flatten().any(|&v| v < 0.0 || !v.is_finite()) {
            return Err(Error::invalid("function values must be finite and nonnegative"));
        }
    }
    // cell (i, R) is owned by (λ_i, R): the identity round-robin covers
    // every combination exactly once
    let mut xi = vec![vec![0.0f64; r_max]; rows];
    for i in 0..rows {
        for r in 0..r_max {
            xi[i][r] = s[i][i][r] + (r + 1) as f64 + 1.0;
        }
    }
    let mut certificates = Vec::with_capacity(rows * r_max);
    for l in 0..rows {
        for r in 0..r_max {
            let lambda_value = s[l][l][r];
            let xi_value = xi[l][r];
            certificates.push(EscapeCertificateCell {
                lambda_index: l,
                bound: r + 1,
                cell: (l, r),
                lambda_value,
                xi_value,
                gap: xi_value - lambda_value,
            });
        }
    }
    Ok(DiagonalEscape { xi, certificates })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::Point;

    fn arcs_of_three() -> Cover {
        Cover::from_slices(&[&[0, 1, 2], &[2, 3, 4], &[4, 5, 6], &[6, 7, 0]])
    }

    #[test]
    fn cycle_arc_cover_verifies() {
        let cycle = FiniteMetricSpace::cycle(8, 1.0);
        let w = verify_uniform_cover(&cycle, &arcs_of_three(), 1).unwrap();
        assert_eq!(w.multiplicity, 2);
        assert_eq!(w.mesh, 2.0);
        assert_eq!(w.lebesgue, 1.0);
    }

    #[test]
    fn whole_space_cover_has_multiplicity_one() {
        let cycle = FiniteMetricSpace::cycle(8, 1.0);
        let v = Cover::from_slices(&[&[0, 1, 2, 3, 4, 5, 6, 7]]);
        let w = verify_uniform_cover(&cycle, &v, 0).unwrap();
        assert_eq!(w.multiplicity, 1);
        assert!(w.lebesgue.is_infinite());
    }

    #[test]
    fn singleton_cover_of_two_points() {
        let two = FiniteMetricSpace::from_matrix(
            vec![Point::Vertex(0), Point::Vertex(1)],
            vec![0.0, 1.0, 1.0, 0.0],
        )
        .unwrap();
        let v = Cover::from_slices(&[&[0], &[1]]);
        let w = verify_uniform_cover(&two, &v, 0).unwrap();
        // balls of radius < 1 lie in elements; radius 1 does not
        assert_eq!(w.lebesgue, 1.0);
        assert_eq!(w.mesh, 0.0);
    }

    #[test]
    fn cover_violations_are_rejected() {
        let cycle = FiniteMetricSpace::cycle(8, 1.0);
        let not_cover = Cover::from_slices(&[&[0, 1]]);
        assert!(matches!(
            verify_uniform_cover(&cycle, &not_cover, 1),
            Err(Error::NotACover(_))
        ));
        let heavy = Cover::from_slices(&[
            &[0, 1, 2, 3, 4, 5, 6, 7],
            &[0, 1],
            &[0, 7],
        ]);
        assert!(matches!(
            verify_uniform_cover(&cycle, &heavy, 1),
            Err(Error::MultiplicityExceeded { .. })
        ));
    }

    fn single_point_boundary() -> FiniteMetricSpace {
        FiniteMetricSpace::from_matrix(vec![Point::Vertex(0)], vec![0.0]).unwrap()
    }

    /// Columns of adjacent depth pairs over each boundary point.
    fn depth_pair_cover(collar: &CollarSpace) -> Cover {
        let nj = collar.depth_count();
        let na = collar.boundary().len();
        let mut elements = Vec::new();
        for a in 0..na {
            for j in 0..nj - 1 {
                elements.push(
                    [collar.flat_index(a, j), collar.flat_index(a, j + 1)]
                        .into_iter()
                        .collect(),
                );
            }
            elements.push([collar.flat_index(a, nj - 1)].into_iter().collect());
        }
        Cover::new(elements)
    }

    #[test]
    fn single_point_collar_bands_overlap_at_most_three() {
        let collar = CollarSpace::harmonic(single_point_boundary(), 48).unwrap();
        let grades: Vec<GradedCover> = (1..=24)
            .map(|n| GradedCover {
                cover: Cover::from_slices(&[&[0]]),
                delta: 0.6 / (1 << n.min(50)) as f64,
            })
            .collect();
        let u = depth_pair_cover(&collar);
        let plan = build_collar_cover(&collar, &grades, &u, 0, None).unwrap();
        assert!(plan.multiplicity <= 3, "multiplicity {}", plan.multiplicity);
        assert!(plan.mu.windows(2).all(|w| w[1] < w[0]));
        assert!(plan.alpha.windows(2).all(|w| w[1] > w[0]));
        assert!(plan.trace.len() >= 2);
    }

    #[test]
    fn band_form_input_coarsens_trivially() {
        // u already of band form: each element is a full band column
        let collar = CollarSpace::harmonic(single_point_boundary(), 32).unwrap();
        let grades: Vec<GradedCover> = (1..=16)
            .map(|n| GradedCover {
                cover: Cover::from_slices(&[&[0]]),
                delta: 0.6 / (1 << n.min(50)) as f64,
            })
            .collect();
        let u = depth_pair_cover(&collar);
        let plan = build_collar_cover(&collar, &grades, &u, 0, None).unwrap();
        // every element of w is contained in itself
        for e in &plan.w.elements {
            assert!(plan.w.elements.iter().any(|we| e.is_subset(we)));
        }
    }

    #[test]
    fn shallow_grid_reports_depth_exhaustion() {
        let collar = CollarSpace::harmonic(single_point_boundary(), 4).unwrap();
        let grades: Vec<GradedCover> = (1..=4)
            .map(|n| GradedCover {
                cover: Cover::from_slices(&[&[0]]),
                delta: 0.6 / (1 << n) as f64,
            })
            .collect();
        let u = depth_pair_cover(&collar);
        let err = build_collar_cover(&collar, &grades, &u, 0, Some(12));
        assert!(matches!(err, Err(Error::DepthExhausted { .. })));
    }

    #[test]
    fn fixed_mesh_cover_is_rejected() {
        let collar = CollarSpace::harmonic(single_point_boundary(), 24).unwrap();
        let grades: Vec<GradedCover> = (1..=8)
            .map(|n| GradedCover {
                cover: Cover::from_slices(&[&[0]]),
                delta: 0.6 / (1 << n) as f64,
            })
            .collect();
        // every element spans the full depth range: mesh does not shrink
        let all: BTreeSet<usize> = (0..collar.depth_count()).collect();
        let u = Cover::new(vec![all]);
        let err = build_collar_cover(&collar, &grades, &u, 0, None);
        assert!(matches!(err, Err(Error::MeshNotShrinking { .. })));
    }

    #[test]
    fn slice_check_on_band_form() {
        let collar = CollarSpace::harmonic(single_point_boundary(), 40).unwrap();
        let v = depth_pair_cover(&collar);
        // adjacent depth pairs give each point membership 2
        let out = slice_check(&collar, &v, 2.0, 1).unwrap();
        assert!(out.multiplicity <= 2);
        assert!(out.max_restricted_diameter < 1.0 / 4.0);
        // passing at r implies passing at smaller integer r with the same t
        let out1 = slice_check(&collar, &v, 1.0, 1).unwrap();
        assert!(out1.depth >= out.depth - 1e-12);
    }

    #[test]
    fn slice_check_fails_on_fixed_mesh() {
        let collar = CollarSpace::harmonic(FiniteMetricSpace::cycle(8, 1.0), 16).unwrap();
        // elements always span 3 boundary points: diameter 2 at every depth
        let mut elements = Vec::new();
        for a in 0..8usize {
            for j in 0..16 {
                let mut e = BTreeSet::new();
                e.insert(collar.flat_index(a, j));
                e.insert(collar.flat_index((a + 1) % 8, j));
                e.insert(collar.flat_index((a + 2) % 8, j));
                elements.push(e);
            }
        }
        let v = Cover::new(elements);
        // multiplicity is 3 ≤ k+1 for k = 2, but diameters never drop below 1/(2r)
        let err = slice_check(&collar, &v, 4.0, 2);
        assert!(matches!(err, Err(Error::DepthExhausted { .. })));
    }

    #[test]
    fn diagonal_escape_examples() {
        // single zero function, one bound
        let zero = vec![vec![vec![0.0]]];
        let out = diagonal_escape(&zero, 1).unwrap();
        assert_eq!(out.xi[0][0], 2.0);
        assert_eq!(out.certificates.len(), 1);
        assert_eq!(out.certificates[0].gap, 2.0);

        // two constant functions, two bounds
        let s = vec![
            vec![vec![0.0, 0.0], vec![0.0, 0.0]],
            vec![vec![5.0, 5.0], vec![5.0, 5.0]],
        ];
        let out = diagonal_escape(&s, 2).unwrap();
        for c in &out.certificates {
            assert_eq!(c.gap, (c.bound + 1) as f64);
            assert!(c.gap > c.bound as f64);
        }

        // λ(i, R) = i + 1 (row index, 1-based)
        let s: Vec<Vec<Vec<f64>>> = (0..3)
            .map(|_| {
                (0..3)
                    .map(|i| vec![(i + 1) as f64; 4])
                    .collect()
            })
            .collect();
        let out = diagonal_escape(&s, 4).unwrap();
        for c in &out.certificates {
            assert_eq!(c.xi_value, (c.cell.0 + 1) as f64 + (c.bound + 1) as f64);
        }
        assert!(diagonal_escape(&[], 3).is_err());
    }
}
