use std::collections::HashSet;

use bscvt::cvt::{lloyd_bs, LloydOptions, SampleSet};
use bscvt::geom2d::{delaunay, point_segment_distance, BoundingBox, Point, Polygon};
use bscvt::maps::{AffineMap, BoxDomain, DiagramMap, TraceDet};
use bscvt::optim::OptimOptions;
use bscvt::pipeline::{
    extract_boundary, multigrid, refine_delaunay, refine_spheres, restrict_region, PipelineError, RefineConfig,
    RegionRestriction,
};

fn d2_box() -> BoundingBox {
    BoundingBox::new(-2.5, 2.5, -2.5, 2.5).unwrap()
}

/// Inside `{ |t| - 2 <= det <= t²/4 }` up to `slack`.
fn in_d2_region(y: Point, slack: f64) -> bool {
    y.x.abs() <= 2.0 + slack && y.y <= y.x * y.x / 4.0 + slack && y.y >= y.x.abs() - 2.0 - slack
}

fn identity(lo: f64, hi: f64) -> AffineMap {
    AffineMap::coordinate_projection(2, lo, hi).unwrap()
}

fn quick(n_ref: usize) -> RefineConfig {
    RefineConfig { n_ref, q1: 20, q2: 150, ..RefineConfig::default() }
}

#[test]
fn delaunay_refinement_on_a_uniform_grid() {
    let map = identity(0.0, 1.0);
    let samples: Vec<Vec<f64>> = (0..25).map(|k| vec![(k % 5) as f64 * 0.25, (k / 5) as f64 * 0.25]).collect();
    let state = SampleSet::new(&map, samples, BoundingBox::new(-0.1, 1.1, -0.1, 1.1).unwrap(), 0).unwrap();
    let edges = delaunay(&state.images).unwrap().edges();
    let (next, stats) = refine_delaunay(&map, &state, &OptimOptions::default(), None).unwrap();

    // axis edges 0.25 and diagonals 0.35 all sit in the band around the mean
    assert_eq!(stats.added, edges.len());
    assert_eq!(next.len(), 25 + edges.len());
    for &(a, b) in &edges {
        let mid = state.images[a].midpoint(state.images[b]);
        assert!(next.images[25..].iter().any(|y| y.distance(mid) < 1e-8), "missing midpoint {mid:?}");
    }
}

#[test]
fn delaunay_refinement_skips_short_cluster_edges() {
    let map = identity(0.0, 1.0);
    let mut samples: Vec<Vec<f64>> = (0..16).map(|k| vec![0.05 + (k % 4) as f64 * 0.3, 0.05 + (k / 4) as f64 * 0.3]).collect();
    let center = Point::new(0.5, 0.5);
    for (dx, dy) in [(0.004, 0.0), (-0.004, 0.002), (0.0, -0.004), (0.001, 0.004)] {
        samples.push(vec![center.x + dx, center.y + dy]);
    }
    let state = SampleSet::new(&map, samples, BoundingBox::new(-0.1, 1.1, -0.1, 1.1).unwrap(), 0).unwrap();
    let (next, stats) = refine_delaunay(&map, &state, &OptimOptions::default(), None).unwrap();
    assert!(stats.added > 0);
    for y in &next.images[state.len()..] {
        assert!(y.distance(center) > 0.01, "cluster edge refined at {y:?}");
    }
}

#[test]
fn delaunay_refinement_stays_in_the_d2_region() {
    let map = TraceDet::new(2).unwrap();
    let state = multigrid(&map, 30, d2_box(), &quick(0), 5, None).unwrap().state;
    let (next, stats) = refine_delaunay(&map, &state, &OptimOptions::default(), None).unwrap();
    assert!(stats.added > 30);
    for (x, y) in next.samples.iter().zip(&next.images) {
        assert!(map.domain().contains(x));
        assert!(in_d2_region(*y, 1e-3), "{y:?}");
    }
}

#[test]
fn rank_deficient_samples_get_no_candidates() {
    let map = TraceDet::new(2).unwrap();
    // diag(t, t): both Jacobian rows are parallel
    let samples = vec![vec![-0.5, -0.5, 0.0], vec![0.0, 0.0, 0.0], vec![0.5, 0.5, 0.0]];
    let state = SampleSet::new(&map, samples, d2_box(), 0).unwrap();
    let (next, stats) = refine_spheres(&map, &state, &RefineConfig::default()).unwrap();
    assert_eq!(stats.added, 0);
    assert_eq!(stats.rank_deficient, 3);
    assert_eq!(next, state);
}

#[test]
fn sphere_candidates_follow_the_first_order_radius() {
    let map = TraceDet::new(2).unwrap();
    // close images keep the sphere radius small
    let samples = vec![vec![0.3, -0.2, 0.1], vec![0.33, -0.2, 0.1], vec![0.3, -0.17, 0.13]];
    let state = SampleSet::new(&map, samples, d2_box(), 0).unwrap();
    let r = {
        let y = &state.images;
        y[0].distance(y[1]).min(y[0].distance(y[2])).min(y[1].distance(y[2])) / 3.0
    };
    let cfg = RefineConfig { recenter: false, ..RefineConfig::default() };
    let (next, stats) = refine_spheres(&map, &state, &cfg).unwrap();
    assert_eq!(stats.added, 12);
    for (k, y) in next.images[3..].iter().enumerate() {
        let d = y.distance(state.images[k / 4]);
        assert!(d >= r / 2.0 && d <= 2.0 * r, "candidate {k}: {d} vs r = {r}");
    }
}

#[test]
fn recentering_unlocks_a_corner_sample() {
    // (x0 + x2, x1 + x2): the corner (1, 1, -1) shares its image with the
    // center of the cube
    let domain = BoxDomain::cube(3, -1.0, 1.0).unwrap();
    let map = AffineMap::new([vec![1.0, 0.0, 1.0], vec![0.0, 1.0, 1.0]], Point::ORIGIN, domain).unwrap();
    let samples = vec![vec![1.0, 1.0, -1.0], vec![0.5, -0.5, 0.0], vec![-0.5, 0.5, 0.0]];
    let state = SampleSet::new(&map, samples, BoundingBox::new(-2.5, 2.5, -2.5, 2.5).unwrap(), 0).unwrap();

    let plain = RefineConfig { recenter: false, ..RefineConfig::default() };
    let (_, without) = refine_spheres(&map, &state, &plain).unwrap();
    let (next, with) = refine_spheres(&map, &state, &RefineConfig::default()).unwrap();
    assert_eq!(without.added, 8);
    assert_eq!(with.added, 12);
    assert!(with.recentered >= 1);
    assert!(next.images[0].distance(Point::ORIGIN) < 1e-6);
    assert!(next.samples.iter().all(|x| map.domain().contains(x)));
}

#[test]
fn multigrid_growth_per_round() {
    let map = TraceDet::new(2).unwrap();
    let cfg = RefineConfig { n_ref: 2, ..RefineConfig::default() };
    let run = multigrid(&map, 30, d2_box(), &cfg, 7, None).unwrap();
    assert_eq!(run.history.len(), 3);
    for w in run.history.windows(2) {
        let factor = w[1].samples as f64 / w[0].samples as f64;
        assert!((2.0..=6.0).contains(&factor), "{} -> {}", w[0].samples, w[1].samples);
    }
    assert!(run.state.images.iter().all(|&y| in_d2_region(y, 1e-6)));
}

#[test]
fn multigrid_is_deterministic() {
    let map = TraceDet::new(2).unwrap();
    let a = multigrid(&map, 15, d2_box(), &quick(1), 11, None).unwrap();
    let b = multigrid(&map, 15, d2_box(), &quick(1), 11, None).unwrap();
    assert_eq!(a.history, b.history);
    assert_eq!(a.state, b.state);
}

#[test]
fn restriction_to_a_small_disk_in_d4() {
    let map = TraceDet::new(4).unwrap();
    let rr = RegionRestriction::new(Point::new(3.9, 1.0), 0.2).unwrap();
    let bbox = map.default_box().unwrap();
    let run = multigrid(&map, 20, bbox, &quick(0), 3, Some(&rr)).unwrap();
    assert!(run.state.len() >= 3);
    for y in &run.state.images {
        assert!(rr.contains(*y, 1e-3), "{y:?} outside the disk");
    }
}

#[test]
fn restrict_region_confines_an_existing_state() {
    let map = TraceDet::new(2).unwrap();
    let state = multigrid(&map, 40, d2_box(), &quick(0), 2, None).unwrap().state;
    let rr = RegionRestriction::new(Point::new(1.0, -0.5), 0.4).unwrap();
    let restricted = restrict_region(&map, &state, &rr, &quick(0)).unwrap();
    assert!(restricted.len() >= 3);
    assert!(restricted.images.iter().all(|&y| rr.contains(y, 1e-3)));
}

#[test]
fn a_disk_around_everything_changes_nothing() {
    let map = TraceDet::new(2).unwrap();
    let rr = RegionRestriction::new(Point::ORIGIN, 100.0).unwrap();
    let free = multigrid(&map, 20, d2_box(), &quick(0), 4, None).unwrap();
    let held = multigrid(&map, 20, d2_box(), &quick(0), 4, Some(&rr)).unwrap();
    assert_eq!(free.state.len(), held.state.len());
    assert!((free.history[0].energy - held.history[0].energy).abs() < 1e-9);
    for (a, b) in free.state.images.iter().zip(&held.state.images) {
        assert!(a.distance(*b) < 1e-6);
    }
}

#[test]
fn a_far_disk_is_infeasible() {
    let map = TraceDet::new(2).unwrap();
    let rr = RegionRestriction::new(Point::new(2.0, 2.3), 0.1).unwrap();
    match multigrid(&map, 20, d2_box(), &quick(0), 4, Some(&rr)) {
        Err(PipelineError::InfeasibleRegion { distance, radius }) => assert!(distance > radius),
        other => panic!("expected an infeasible region, got {other:?}"),
    }
}

fn convex_hull(points: &[Point]) -> Vec<Point> {
    let mut p = points.to_vec();
    p.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    let mut hull: Vec<Point> = Vec::new();
    for pass in 0..2 {
        let start = hull.len();
        for &q in &p {
            while hull.len() >= start + 2 && (hull[hull.len() - 1] - hull[hull.len() - 2]).cross(q - hull[hull.len() - 2]) <= 0.0 {
                hull.pop();
            }
            hull.push(q);
        }
        hull.pop();
        if pass == 0 {
            p.reverse();
        }
    }
    hull
}

fn boundary_distance(p: Point, poly: &[Point]) -> f64 {
    (0..poly.len())
        .map(|i| point_segment_distance(p, poly[i], poly[(i + 1) % poly.len()]))
        .fold(f64::INFINITY, f64::min)
}

#[test]
fn convex_region_outline_is_the_hull() {
    let map = identity(0.0, 1.0);
    let state = SampleSet::random(&map, 300, BoundingBox::new(-0.05, 1.05, -0.05, 1.05).unwrap(), 2).unwrap();
    let state = lloyd_bs(&map, state, &LloydOptions::default().with_max_iters(150)).unwrap().state;
    let b = extract_boundary(&state, 12.0, 155.0).unwrap();
    assert_eq!(b.loops.len(), 1);
    let outline = b.loops[0].vertices();
    let hull = convex_hull(&state.images);
    let h = outline
        .iter()
        .map(|&v| boundary_distance(v, &hull))
        .chain(hull.iter().map(|&v| boundary_distance(v, outline)))
        .fold(0.0, f64::max);
    let diam = BoundingBox::around(&hull).unwrap().diameter();
    assert!(h < 1e-2 * diam, "Hausdorff {h} vs diameter {diam}");
}

#[test]
fn d2_outline_area_and_shape() {
    let map = TraceDet::new(2).unwrap();
    let state = multigrid(&map, 420, d2_box(), &quick(0), 9, None).unwrap().state;
    let b = extract_boundary(&state, 12.0, 155.0).unwrap();
    let exact = 16.0 / 3.0;
    assert!((b.area() - exact).abs() < 0.05 * exact, "area {}", b.area());

    for poly in &b.loops {
        assert!(poly.signed_area() > 0.0);
        assert!(poly.is_simple());
    }
    let tess = state.tessellate().unwrap();
    let mut disp: Vec<f64> = state.images.iter().zip(&tess.centroids).map(|(y, c)| y.distance(*c)).collect();
    let flagged: HashSet<usize> = b.flagged.iter().copied().collect();
    let flagged_disp: Vec<f64> = flagged.iter().map(|&i| disp[i]).collect();
    disp.sort_by(f64::total_cmp);
    let median = disp[disp.len() / 2];
    assert!(flagged_disp.iter().all(|&d| d > median));
}

#[test]
fn sliver_triangles_are_dropped() {
    let map = identity(0.0, 1.0);
    let samples = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0], vec![0.5, 0.002]];
    let state = SampleSet::new(&map, samples, BoundingBox::new(-0.5, 1.5, -0.5, 1.5).unwrap(), 0).unwrap();
    let b = extract_boundary(&state, 12.0, 155.0).unwrap();
    assert_eq!(b.dropped_triangles, 1);
    let sliver = Polygon::new(vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(0.5, 0.002)]).unwrap();
    assert!((b.area() - (1.0 - sliver.area())).abs() < 1e-12);
}

#[test]
fn impossible_thresholds_fail() {
    let map = identity(0.0, 1.0);
    let state = SampleSet::random(&map, 30, BoundingBox::new(-0.1, 1.1, -0.1, 1.1).unwrap(), 1).unwrap();
    assert!(matches!(extract_boundary(&state, 80.0, 90.0), Err(PipelineError::Extraction(_))));
}

proptest::proptest! {
    #![proptest_config(proptest::prelude::ProptestConfig::with_cases(24))]

    #[test]
    fn refinement_keeps_samples_and_stays_in_the_box(seed in 0u64..1000, m in 4usize..25, spheres in proptest::bool::ANY) {
        let map = TraceDet::new(2).unwrap();
        let state = SampleSet::random(&map, m, d2_box(), seed).unwrap();
        let (next, stats) = if spheres {
            refine_spheres(&map, &state, &RefineConfig::default()).unwrap()
        } else {
            refine_delaunay(&map, &state, &OptimOptions::default(), None).unwrap()
        };
        proptest::prop_assert_eq!(next.len(), state.len() + stats.added);
        for (x, y) in next.samples.iter().zip(&next.images) {
            proptest::prop_assert!(map.domain().contains(x));
            proptest::prop_assert!(next.bbox.contains_strictly(*y));
        }
    }
}
