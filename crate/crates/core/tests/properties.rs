//! Property tests for the structural invariants: metric axioms of
//! truncations, Gromov product bounds, verdict symmetry and reflexivity,
//! cover/controlled-set round trips, and the coupling property.

use coarsegeom::carrier::Carrier;
use coarsegeom::ends::{
    equivalent, Budget, EndRelation, Ray, RayGenerator, RelationKind, VerdictStatus,
};
use coarsegeom::largescale::{
    controlled_to_cover, cover_to_controlled, repetition_coupling, star, star_family,
    ControlledSet, Cover,
};
use coarsegeom::space::{
    ball, complement_components, gromov_product, hyperbolicity_delta, is_bounded,
    BoundedStructure, LazyGraph, Point,
};
use proptest::prelude::*;
use std::collections::BTreeSet;
use std::sync::Arc;

fn line() -> Arc<Carrier> {
    Arc::new(Carrier::Graph(LazyGraph::lattice(1)))
}

fn grid() -> Arc<Carrier> {
    Arc::new(Carrier::Graph(LazyGraph::lattice(2)))
}

// =============================================================================
// Strategies
// =============================================================================

/// Random connected graph on 2..=10 vertices: a random tree plus extra edges.
fn connected_graph() -> impl Strategy<Value = LazyGraph> {
    (2usize..=10, proptest::collection::vec(any::<u64>(), 0..20)).prop_map(|(n, extra)| {
        let mut edges: Vec<(u64, u64)> = (1..n as u64)
            .map(|v| (v, extra.get(v as usize % extra.len().max(1)).copied().unwrap_or(0) % v))
            .collect();
        for (i, e) in extra.iter().enumerate() {
            let u = (e % n as u64) as u64;
            let v = ((e >> 8) % n as u64) as u64;
            if u != v && i % 2 == 0 {
                edges.push((u, v));
            }
        }
        LazyGraph::finite(&edges, 0)
    })
}

/// A bounded-noise escaping lattice ray: x_n = n·dir + wobble_n.
fn noisy_ray(carrier: Arc<Carrier>, dir: i64, len: usize, noise: &[i64]) -> Ray {
    let pts = (0..len)
        .map(|n| Point::Lattice(vec![dir * n as i64 + noise[n % noise.len()].rem_euclid(3)]))
        .collect();
    Ray::new(carrier, Point::Lattice(vec![0]), pts, None).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    // -------------------------------------------------------------------------
    // space: truncations are pseudo-metric, balls are monotone
    // -------------------------------------------------------------------------

    #[test]
    fn prop_ball_truncations_are_metric_spaces(g in connected_graph(), r in 0u64..4) {
        let b = ball(&g, &g.root(), r, 1).unwrap();
        b.validate().unwrap();
    }

    #[test]
    fn prop_ball_monotone_in_radius(g in connected_graph(), r in 0u64..3) {
        let small = ball(&g, &g.root(), r, 0).unwrap();
        let big = ball(&g, &g.root(), r + 1, 0).unwrap();
        for p in small.points() {
            prop_assert!(big.index_of(p).is_some());
        }
    }

    #[test]
    fn prop_ball_distances_never_increase_with_margin(g in connected_graph(), r in 1u64..4) {
        let tight = ball(&g, &g.root(), r, 0).unwrap();
        let wide = ball(&g, &g.root(), r, r).unwrap();
        for (i, p) in tight.points().iter().enumerate() {
            for (j, q) in tight.points().iter().enumerate() {
                let wi = wide.index_of(p).unwrap();
                let wj = wide.index_of(q).unwrap();
                prop_assert!(wide.dist(wi, wj) <= tight.dist(i, j));
            }
        }
    }

    #[test]
    fn prop_gromov_symmetry_and_bound(g in connected_graph()) {
        let b = ball(&g, &g.root(), 3, 3).unwrap();
        let n = b.len();
        for x in 0..n {
            for y in 0..n {
                for a in 0..n {
                    if let (Ok(p1), Ok(p2)) = (gromov_product(&b, x, y, a), gromov_product(&b, y, x, a)) {
                        prop_assert_eq!(p1, p2);
                        prop_assert!(p1 <= b.dist(x, a).min(b.dist(y, a)) + 1e-9);
                        prop_assert!(p1 >= -1e-9);
                    }
                }
            }
        }
    }

    #[test]
    fn prop_full_scan_delta_dominates_fixed_base(g in connected_graph(), base_pick in 0usize..8) {
        let b = ball(&g, &g.root(), 3, 3).unwrap();
        let full = hyperbolicity_delta(&b, None).unwrap().delta;
        let base = base_pick % b.len();
        let fixed = hyperbolicity_delta(&b, Some(base)).unwrap().delta;
        prop_assert!(full >= fixed - 1e-9);
    }

    // -------------------------------------------------------------------------
    // space: bounded-structure axioms
    // -------------------------------------------------------------------------

    #[test]
    fn prop_bounded_structure_axioms(coords in proptest::collection::vec(-30i64..30, 1..8), cap in 5f64..40.0) {
        let carrier = line();
        let pts: Vec<Point> = coords.iter().map(|&c| Point::Lattice(vec![c])).collect();
        let diam_cap = BoundedStructure::MetricDiameter { cap };
        let diam_double = BoundedStructure::MetricDiameter { cap: 2.0 * cap };
        // axiom 1: singletons bounded under every kind
        for p in &pts {
            let single = vec![p.clone()];
            let fin = is_bounded(&BoundedStructure::FiniteSets, &single, &carrier).unwrap();
            let met = is_bounded(&diam_cap, &single, &carrier).unwrap();
            prop_assert!(fin && met);
        }
        // axiom 2: subsets of bounded sets stay bounded
        if is_bounded(&diam_cap, &pts, &carrier).unwrap() {
            for k in 0..pts.len() {
                let sub: Vec<Point> = pts.iter().take(k).cloned().collect();
                let ok = is_bounded(&diam_cap, &sub, &carrier).unwrap();
                prop_assert!(ok);
            }
        }
        // axiom 3 for the diameter kind holds at the doubled cap
        let half = pts.len() / 2;
        let (a, mut c) = (pts[..half.max(1)].to_vec(), pts[half.saturating_sub(1)..].to_vec());
        c.extend(a.iter().cloned()); // force intersection
        let a_ok = is_bounded(&diam_cap, &a, &carrier).unwrap();
        let c_ok = is_bounded(&diam_cap, &c, &carrier).unwrap();
        if a_ok && c_ok {
            let union: Vec<Point> = a.iter().chain(c.iter()).cloned().collect();
            let ok = is_bounded(&diam_double, &union, &carrier).unwrap();
            prop_assert!(ok);
        }
    }

    // -------------------------------------------------------------------------
    // ends: verdict symmetry and reflexivity
    // -------------------------------------------------------------------------

    #[test]
    fn prop_verdict_symmetry(dir in prop_oneof![Just(1i64), Just(-1i64)],
                             shift in 0i64..6,
                             noise in proptest::collection::vec(-2i64..3, 4),
                             len in 24usize..64) {
        let c = line();
        let x = noisy_ray(c.clone(), 1, len, &noise);
        let pts = (0..len).map(|n| Point::Lattice(vec![dir * n as i64 + shift])).collect();
        let y = Ray::new(c.clone(), Point::Lattice(vec![0]), pts, None).unwrap();
        let budget = Budget::for_prefix(len);
        for kind in [
            RelationKind::Metric,
            RelationKind::C0,
            RelationKind::GroupLeft,
            RelationKind::Gromov { basepoint: Point::Lattice(vec![0]) },
            RelationKind::Freudenthal { basepoint: Point::Lattice(vec![0]) },
        ] {
            let rel = EndRelation::new(kind, c.clone());
            let fwd = equivalent(&rel, &x, &y, &budget).unwrap();
            let bwd = equivalent(&rel, &y, &x, &budget).unwrap();
            prop_assert_eq!(fwd.status(), bwd.status(), "asymmetric {}", rel.kind.name());
        }
    }

    #[test]
    fn prop_verdict_reflexivity(noise in proptest::collection::vec(-2i64..3, 4), len in 24usize..64) {
        let c = line();
        let x = noisy_ray(c.clone(), 1, len, &noise);
        let budget = Budget::for_prefix(len);
        for kind in [
            RelationKind::Metric,
            RelationKind::C0,
            RelationKind::GroupLeft,
            RelationKind::Gromov { basepoint: Point::Lattice(vec![0]) },
            RelationKind::Freudenthal { basepoint: Point::Lattice(vec![0]) },
        ] {
            let rel = EndRelation::new(kind, c.clone());
            let v = equivalent(&rel, &x, &x, &budget).unwrap();
            prop_assert_eq!(v.status(), VerdictStatus::Equivalent);
        }
    }

    // -------------------------------------------------------------------------
    // largescale: translations and stars
    // -------------------------------------------------------------------------

    #[test]
    fn prop_star_contains_covered_set(elem_data in proptest::collection::vec(proptest::collection::btree_set(0usize..12, 1..5), 1..6),
                                      b in proptest::collection::btree_set(0usize..12, 0..6)) {
        let mut u = Cover::new(elem_data);
        // make u cover b
        u.elements.push(b.clone());
        let st = star(&b, &u);
        prop_assert!(b.is_subset(&st));
    }

    #[test]
    fn prop_slice_family_refines_star_family(elem_data in proptest::collection::vec(proptest::collection::btree_set(0usize..10, 1..5), 1..6)) {
        let u = Cover::new(elem_data);
        let n = 10;
        let slices = controlled_to_cover(&cover_to_controlled(&u), n);
        let stars = star_family(&u, &u);
        for (x, slice) in slices.elements.iter().enumerate() {
            if slice.is_empty() {
                continue;
            }
            // the slice at x is covered by the star of any element containing x
            let holds = u
                .elements
                .iter()
                .zip(stars.elements.iter())
                .any(|(e, st)| e.contains(&x) && slice.is_subset(st));
            prop_assert!(holds, "slice at {x} not inside the star of its element");
        }
    }

    #[test]
    fn prop_square_union_recovers_reflexive_relations(pairs in proptest::collection::btree_set((0usize..8, 0usize..8), 0..20)) {
        let n = 8;
        let mut with_diag: BTreeSet<(usize, usize)> = pairs.clone();
        with_diag.extend((0..n).map(|i| (i, i)));
        let e = ControlledSet::new(with_diag.clone());
        let back = cover_to_controlled(&controlled_to_cover(&e, n));
        for &(x, y) in &with_diag {
            prop_assert!(back.pairs.contains(&(x, y)));
            prop_assert!(back.pairs.contains(&(y, x)));
        }
    }

    // -------------------------------------------------------------------------
    // largescale: the coupling property
    // -------------------------------------------------------------------------

    #[test]
    fn prop_coupling_keeps_selections_inside_blocks(families in proptest::collection::vec(proptest::collection::vec(-20i64..20, 1..6), 1..6)) {
        let fams: Vec<Vec<Point>> = families
            .iter()
            .map(|f| f.iter().map(|&c| Point::Lattice(vec![c])).collect())
            .collect();
        let out = repetition_coupling(&fams).unwrap();
        let expected: usize = fams
            .iter()
            .map(|f| {
                let s: BTreeSet<&Point> = f.iter().collect();
                s.len()
            })
            .sum();
        prop_assert_eq!(out.x.len(), expected);
        prop_assert_eq!(out.y.len(), expected);
        prop_assert_eq!(out.blocks.len(), expected);
        for n in 0..out.x.len() {
            prop_assert!(out.blocks[n].contains(&out.x[n]));
            prop_assert!(out.blocks[n].contains(&out.y[n]));
        }
    }
}

// =============================================================================
// Deterministic invariants that don't need generated inputs
// =============================================================================

/// Distinguished witnesses survive on arithmetic subsequences through the
/// witness index.
#[test]
fn subsequence_stability_of_distinguished_verdicts() {
    let c = line();
    let len = 96usize;
    let x = Ray::from_generator(
        c.clone(),
        RayGenerator::LatticeAxis { direction: vec![1] },
        len,
    )
    .unwrap();
    let y = Ray::from_generator(
        c.clone(),
        RayGenerator::LatticeAxis { direction: vec![-1] },
        len,
    )
    .unwrap();
    let rel = EndRelation::new(RelationKind::Metric, c.clone());
    let budget = Budget::for_prefix(len);
    let v = equivalent(&rel, &x, &y, &budget).unwrap();
    let witness = match &v {
        coarsegeom::ends::ScaleVerdict::Distinguished { witness_index, .. } => {
            witness_index.unwrap()
        }
        other => panic!("expected distinguished, got {other:?}"),
    };
    for step in [2usize, 3, 5] {
        let offset = witness % step;
        let idx: Vec<usize> = (0..len).filter(|n| n % step == offset).collect();
        let sub = |r: &Ray| {
            let pts: Vec<Point> = idx.iter().map(|&n| r.point(n).clone()).collect();
            Ray::new(c.clone(), r.base().clone(), pts, None).unwrap()
        };
        let v = equivalent(&rel, &sub(&x), &sub(&y), &Budget::for_prefix(idx.len())).unwrap();
        assert_ne!(
            v.status(),
            VerdictStatus::Equivalent,
            "subsequence with step {step} through the witness became equivalent"
        );
    }
}

/// Bounded distance implies component agreement on the grid; the converse
/// fails on the two axes.
#[test]
fn metric_implies_freudenthal_on_the_grid() {
    let c = grid();
    let len = 60usize;
    let budget = Budget::new(12.0, vec![1.0, 0.5, 0.25]).unwrap();
    let met = EndRelation::new(RelationKind::Metric, c.clone());
    let fre = EndRelation::new(
        RelationKind::Freudenthal {
            basepoint: Point::origin(2),
        },
        c.clone(),
    );
    let mk = |dir: [i64; 2], shift: [i64; 2]| {
        let pts = (0..len as i64)
            .map(|n| Point::Lattice(vec![dir[0] * n + shift[0], dir[1] * n + shift[1]]))
            .collect();
        Ray::new(c.clone(), Point::origin(2), pts, None).unwrap()
    };
    let pairs = [
        (mk([1, 0], [0, 0]), mk([1, 0], [3, 2])),
        (mk([0, 1], [0, 0]), mk([0, 1], [1, 1])),
        (mk([1, 1], [0, 0]), mk([1, 1], [2, 0])),
    ];
    for (x, y) in &pairs {
        let m = equivalent(&met, x, y, &budget).unwrap();
        assert!(m.is_equivalent());
        let f = equivalent(&fre, x, y, &budget).unwrap();
        assert!(
            f.is_equivalent(),
            "metric-equivalent pair not freudenthal-equivalent"
        );
    }
    // converse fails: the two axes agree in components but not in distance
    let x = mk([1, 0], [0, 0]);
    let y = mk([0, 1], [0, 0]);
    assert!(equivalent(&fre, &x, &y, &budget).unwrap().is_equivalent());
    assert!(equivalent(&met, &x, &y, &budget).unwrap().is_distinguished());
}

/// Word-difference stability agrees with bounded distance on lattices.
#[test]
fn group_left_agrees_with_metric_on_lattices() {
    for dim in [1usize, 2] {
        let c = Arc::new(Carrier::Graph(LazyGraph::lattice(dim)));
        let len = 60usize;
        let budget = Budget::for_prefix(len);
        let met = EndRelation::new(RelationKind::Metric, c.clone());
        let grp = EndRelation::new(RelationKind::GroupLeft, c.clone());
        let mk = |scale: i64, shift: i64| {
            let pts = (0..len as i64)
                .map(|n| Point::Lattice((0..dim).map(|d| if d == 0 { scale * n + shift } else { 0 }).collect()))
                .collect();
            Ray::new(c.clone(), Point::origin(dim), pts, None).unwrap()
        };
        let cases = [
            (mk(1, 0), mk(1, 4)),
            (mk(1, 0), mk(1, 0)),
            (mk(1, 0), mk(2, 0)),
            (mk(1, 0), mk(-1, 0)),
        ];
        for (x, y) in &cases {
            let m = equivalent(&met, x, y, &budget).unwrap();
            let g = equivalent(&grp, x, y, &budget).unwrap();
            assert_eq!(m.status(), g.status(), "disagreement in dim {dim}");
        }
    }
}

/// Verdicts only upgrade INCONCLUSIVE as the budget grows on the canonical
/// pairs.
#[test]
fn verdicts_monotone_in_budget_on_canonical_pairs() {
    let c = line();
    let len = 80usize;
    let mk = |dir: i64, shift: i64| {
        let pts = (0..len as i64)
            .map(|n| Point::Lattice(vec![dir * n + shift]))
            .collect();
        Ray::new(c.clone(), Point::Lattice(vec![0]), pts, None).unwrap()
    };
    let rel = EndRelation::new(RelationKind::Metric, c.clone());
    let pairs = [
        (mk(1, 0), mk(1, 5), VerdictStatus::Equivalent),
        (mk(1, 0), mk(-1, 0), VerdictStatus::Distinguished),
    ];
    for (x, y, expected) in &pairs {
        for scale in [20.0, 40.0, 200.0] {
            let budget = Budget::new(scale, vec![1.0, 0.5, 0.25]).unwrap();
            let v = equivalent(&rel, x, y, &budget).unwrap();
            assert_eq!(v.status(), *expected, "status flipped at scale {scale}");
        }
    }
}

/// Refinement maps of the end tree hit every component that carries a
/// tested escaping ray.
#[test]
fn refinement_maps_cover_ray_components() {
    let g = LazyGraph::free_group(2);
    let tree = coarsegeom::ends::end_tree(
        &g,
        &Point::identity_word(),
        &[1, 2],
        coarsegeom::ends::HorizonPolicy::Offset(2),
    )
    .unwrap();
    let rays = ["a", "b", "A", "B", "ab", "ba"];
    let deep = &tree.levels[1].labeling;
    let map = &tree.refinements[0];
    for w in rays {
        // a deep annulus point along the ray direction
        let word: String = w.chars().cycle().take(3).collect();
        let word = coarsegeom::space::reduce_word(&word);
        let p = Point::Word(word.chars().take(3).collect());
        if let Some(&c) = deep.membership.get(&p) {
            let parent = map[c];
            let shallow_member = &tree.levels[0].labeling.components[parent][0];
            // parent component contains the ray's shallow marker
            let marker = Point::Word(word.chars().take(2).collect());
            assert_eq!(
                tree.levels[0].labeling.membership[&marker], parent,
                "refinement of {w} lands in the wrong component ({shallow_member})"
            );
        }
    }
    // refinement maps are surjective here: every shallow component has a child
    let mut hit = vec![false; tree.levels[0].labeling.count()];
    for &parent in map {
        hit[parent] = true;
    }
    assert!(hit.into_iter().all(|h| h));
}

/// Component counts never decrease with radius on trees, and stay pinned on
/// lattices.
#[test]
fn component_counts_by_family() {
    let f2 = LazyGraph::free_group(2);
    let mut last = 0;
    for r in 1..=3u64 {
        let l = complement_components(&f2, &Point::identity_word(), r, r + 2).unwrap();
        assert!(l.count() >= last);
        last = l.count();
    }
    let line_graph = LazyGraph::lattice(1);
    let plane = LazyGraph::lattice(2);
    for r in 1..=4u64 {
        assert_eq!(
            complement_components(&line_graph, &Point::Lattice(vec![0]), r, r + 2)
                .unwrap()
                .count(),
            2
        );
        assert_eq!(
            complement_components(&plane, &Point::origin(2), r, r + 2)
                .unwrap()
                .count(),
            1
        );
    }
}
