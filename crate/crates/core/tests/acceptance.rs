//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.
//!
//! `cargo test --release --test acceptance` runs all of them;
//! `cargo test --test acceptance -- 3 7` runs a subset.

use std::collections::HashSet;
use std::f64::consts::{PI, TAU};
use std::time::{Duration, Instant};

use bscvt::cvt::{
    composed_energy_grad, cvt_energy_grad, lloyd_bs, lloyd_step, variational_cvt_bs, LloydOptions, SampleSet,
};
use bscvt::geom2d::{point_segment_distance, BoundingBox, Point};
use bscvt::maps::{
    apw_eval, monte_carlo, uniform_sample, ConvexShapeMap, ConvexShapeParams, DiagramMap, Jacobian, TraceDet,
};
use bscvt::optim::OptimOptions;
use bscvt::pipeline::{extract_boundary, multigrid, Boundary, MultigridRun, RefineConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = (bool, String);

fn d2_box() -> BoundingBox {
    BoundingBox::new(-2.5, 2.5, -2.5, 2.5).unwrap()
}

fn d3_box() -> BoundingBox {
    BoundingBox::new(-5.0, 5.0, -5.0, 5.0).unwrap()
}

/// The tracedet:2 multigrid run shared by criteria 1 and 8.
struct D2Run {
    run: MultigridRun,
    boundary: Boundary,
    elapsed: Duration,
}

fn d2_run() -> D2Run {
    let map = TraceDet::new(2).unwrap();
    let cfg = RefineConfig { n_ref: 3, ..RefineConfig::default() };
    let t = Instant::now();
    let run = multigrid(&map, 30, d2_box(), &cfg, 7, None).unwrap();
    let boundary = extract_boundary(&run.state, 12.0, 155.0).unwrap();
    D2Run { run, boundary, elapsed: t.elapsed() }
}

/// Dense polyline of the boundary of `{ |t| - 2 <= det <= t²/4, |t| <= 2 }`:
/// the parabola, the V and the two vertical sides at `t = ±2`.
fn d2_analytic_boundary(n: usize) -> Vec<Vec<Point>> {
    let ts = |i: usize| -2.0 + 4.0 * i as f64 / n as f64;
    let upper = (0..=n).map(|i| Point::new(ts(i), ts(i) * ts(i) / 4.0)).collect();
    let lower = (0..=n).map(|i| Point::new(ts(i), ts(i).abs() - 2.0)).collect();
    let sides = [-2.0, 2.0].map(|t| vec![Point::new(t, 0.0), Point::new(t, 1.0)]);
    let [left, right] = sides;
    vec![upper, lower, left, right]
}

fn distance_to_polylines(p: Point, lines: &[Vec<Point>]) -> f64 {
    lines
        .iter()
        .flat_map(|l| l.windows(2).map(move |w| point_segment_distance(p, w[0], w[1])))
        .fold(f64::INFINITY, f64::min)
}

fn closed(vertices: &[Point]) -> Vec<Point> {
    let mut v = vertices.to_vec();
    v.push(vertices[0]);
    v
}

/// Two-sided Hausdorff distance between polylines, with polygon edges
/// probed at quarter points.
fn hausdorff(a: &[Vec<Point>], b: &[Vec<Point>]) -> f64 {
    let probes = |lines: &[Vec<Point>]| -> Vec<Point> {
        lines
            .iter()
            .flat_map(|l| {
                l.windows(2)
                    .flat_map(|w| (0..4).map(move |k| w[0] + (w[1] - w[0]) * (k as f64 / 4.0)))
                    .collect::<Vec<_>>()
            })
            .collect()
    };
    let ab = probes(a).into_iter().map(|p| distance_to_polylines(p, b)).fold(0.0, f64::max);
    let ba = probes(b).into_iter().map(|p| distance_to_polylines(p, a)).fold(0.0, f64::max);
    ab.max(ba)
}

fn criterion_1(d2: &D2Run) -> Outcome {
    let state = &d2.run.state;
    let counts: Vec<usize> = d2.run.history.iter().map(|r| r.samples).collect();
    let in_region = state.images.iter().all(|y| {
        let (q, det) = (y.x, y.y);
        q >= -2.0 - 1e-6 && q <= 2.0 + 1e-6 && det >= q.abs() - 2.0 - 1e-3 && det <= q * q / 4.0 + 1e-3
    });
    let outline: Vec<Vec<Point>> = d2.boundary.loops.iter().map(|p| closed(p.vertices())).collect();
    let h = hausdorff(&outline, &d2_analytic_boundary(4000));
    let ok = state.len() >= 300 && in_region && h < 0.1 && d2.elapsed < Duration::from_secs(300);
    (
        ok,
        format!(
            "samples per round {counts:?}, images in region: {in_region}, loops {}, Hausdorff {h:.4} (< 0.1), runtime {:.1?} (< 5 min)",
            d2.boundary.loops.len(),
            d2.elapsed
        ),
    )
}

fn criterion_2() -> Outcome {
    let map = TraceDet::new(2).unwrap();
    let mut lines = Vec::new();
    let mut band = true;
    let mut paired = true;
    for seed in 1..=5u64 {
        let start = SampleSet::random(&map, 200, d2_box(), seed).unwrap();
        let lloyd = lloyd_bs(&map, start.clone(), &LloydOptions::default().with_max_iters(1000)).unwrap();
        let opts = OptimOptions::default().with_max_iters(1000).with_grad_tol(1e-8);
        let var = variational_cvt_bs(&map, start, &opts, None).unwrap();
        let g = var.energy();
        if seed == 1 {
            band = (18.5..=20.0).contains(&g);
        }
        let ok = g <= lloyd.energy + 1e-6;
        paired &= ok;
        lines.push(format!("seed {seed}: variational {g:.6} lloyd {:.6}{}", lloyd.energy, if ok { "" } else { " (higher)" }));
    }
    (band && paired, format!("G in [18.5, 20]: {band}; variational <= lloyd + 1e-6 on all seeds: {paired}; {}", lines.join("; ")))
}

fn random_points(n: usize, bbox: &BoundingBox, seed: u64) -> Vec<Point> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| Point::new(rng.gen_range(bbox.xmin..bbox.xmax), rng.gen_range(bbox.ymin..bbox.ymax)))
        .collect()
}

fn relative(diff: f64, scale: f64) -> f64 {
    diff / scale.max(1e-300)
}

fn energy_fd_error(seed: u64) -> f64 {
    let bbox = BoundingBox::new(-1.0, 1.0, -1.0, 1.0).unwrap();
    let pts = random_points(12, &bbox, seed);
    let g = |p: &[Point]| cvt_energy_grad(p, &bbox).unwrap().0.energy;
    let (_, grad) = cvt_energy_grad(&pts, &bbox).unwrap();
    let h = 1e-6;
    let (mut diff, mut norm) = (0.0f64, 0.0f64);
    for i in 0..pts.len() {
        for (axis, step) in [Point::new(h, 0.0), Point::new(0.0, h)].into_iter().enumerate() {
            let (mut plus, mut minus) = (pts.clone(), pts.clone());
            plus[i] += step;
            minus[i] = minus[i] - step;
            let fd = (g(&plus) - g(&minus)) / (2.0 * h);
            let an = if axis == 0 { grad[i].x } else { grad[i].y };
            diff += (fd - an).powi(2);
            norm += fd * fd;
        }
    }
    relative(diff.sqrt(), norm.sqrt())
}

fn composed_fd_error(seed: u64) -> f64 {
    let map = TraceDet::new(2).unwrap();
    let state = SampleSet::random(&map, 15, d2_box(), seed).unwrap();
    let (_, grad) = composed_energy_grad(&state, &map).unwrap();
    let h = 1e-6;
    let (mut diff, mut norm) = (0.0f64, 0.0f64);
    for i in 0..state.len() {
        for k in 0..map.dim() {
            let shifted = |delta: f64| {
                let mut samples = state.samples.clone();
                samples[i][k] += delta;
                let s = SampleSet::new(&map, samples, state.bbox, seed).unwrap();
                composed_energy_grad(&s, &map).unwrap().0
            };
            let fd = (shifted(h) - shifted(-h)) / (2.0 * h);
            diff += (fd - grad[map.dim() * i + k]).powi(2);
            norm += fd * fd;
        }
    }
    relative(diff.sqrt(), norm.sqrt())
}

fn jacobian_fd_error(map: &dyn DiagramMap, seed: u64, i: u64) -> f64 {
    let d = map.domain();
    let x: Vec<f64> = uniform_sample(d, seed, i)
        .iter()
        .enumerate()
        .map(|(k, v)| {
            let c = 0.5 * (d.lower()[k] + d.upper()[k]);
            c + 0.95 * (v - c)
        })
        .collect();
    let an: Jacobian = map.jacobian(&x).unwrap();
    let h = 1e-6;
    let (mut diff, mut norm) = (0.0f64, 0.0f64);
    for k in 0..x.len() {
        let (mut xp, mut xm) = (x.clone(), x.clone());
        xp[k] += h;
        xm[k] -= h;
        let (fp, fm) = (map.evaluate(&xp).unwrap(), map.evaluate(&xm).unwrap());
        let fd = [(fp.x - fm.x) / (2.0 * h), (fp.y - fm.y) / (2.0 * h)];
        for row in 0..2 {
            diff += (fd[row] - an.rows[row][k]).powi(2);
            norm += fd[row] * fd[row];
        }
    }
    relative(diff.sqrt(), norm.sqrt())
}

fn criterion_3() -> Outcome {
    let worst = |errs: &mut dyn Iterator<Item = f64>| errs.fold(0.0f64, f64::max);
    let a = worst(&mut (0..10).map(energy_fd_error));
    let b = worst(&mut (0..10).map(composed_fd_error));
    let tracedet = TraceDet::new(3).unwrap();
    let apw = ConvexShapeMap::new(50).unwrap();
    let c1 = worst(&mut (0..30).map(|i| jacobian_fd_error(&tracedet, 31, i)));
    let c2 = worst(&mut (0..30).map(|i| jacobian_fd_error(&apw, 32, i)));
    let ok = a < 1e-5 && b < 1e-4 && c1 < 1e-5 && c2 < 1e-5;
    (
        ok,
        format!("energy gradient {a:.2e} (< 1e-5), composed gradient {b:.2e} (< 1e-4), tracedet:3 Jacobian {c1:.2e}, apw:50 Jacobian {c2:.2e} (< 1e-5)"),
    )
}

/// Largest determinant over symmetric 3×3 matrices with entries in {-1, 0, 1}.
fn brute_force_max_det() -> f64 {
    let vals = [-1.0, 0.0, 1.0];
    let mut best = f64::NEG_INFINITY;
    for code in 0..3usize.pow(6) {
        let e: Vec<f64> = (0..6).map(|k| vals[(code / 3usize.pow(k)) % 3]).collect();
        let (a, b, c, d, f, g) = (e[0], e[1], e[2], e[3], e[4], e[5]);
        // [[a, d, f], [d, b, g], [f, g, c]]
        let det = a * (b * c - g * g) - d * (d * c - g * f) + f * (d * g - b * f);
        best = best.max(det);
    }
    best
}

fn criterion_4() -> Outcome {
    let map = TraceDet::new(3).unwrap();
    let run = multigrid(&map, 30, d3_box(), &RefineConfig::default(), 1, None).unwrap();
    let boundary = extract_boundary(&run.state, 12.0, 155.0).unwrap();
    let max_det = boundary
        .loops
        .iter()
        .flat_map(|p| p.vertices().iter().map(|v| v.y))
        .fold(f64::NEG_INFINITY, f64::max);
    let oracle = brute_force_max_det();
    let ok = (max_det - 4.0).abs() <= 0.05 && oracle == 4.0;
    (ok, format!("{} samples, outline max det {max_det:.5} (4 ± 0.05), brute-force max over {{-1,0,1}} entries {oracle}", run.state.len()))
}

fn criterion_5() -> Outcome {
    let map = ConvexShapeMap::new(50).unwrap();
    let bbox = map.default_box().unwrap();
    let run = multigrid(&map, 15, bbox, &RefineConfig::default(), 1, None).unwrap();
    let corner = Point::new(100.0 / (4.0 * PI), TAU);
    let closest = run.state.images.iter().map(|y| y.distance(corner)).fold(f64::INFINITY, f64::min);

    // square [-1,1]²: A = 4, P = 8, W = 8/3; rhombus (±1,0),(0,±1): A = 2, P = 4√2, W = 2/3
    let square = apw_eval(&ConvexShapeParams { rho: vec![0.0, 0.0], h_q: 1.0 }).unwrap();
    let rhombus = apw_eval(&ConvexShapeParams { rho: vec![0.5, 0.0], h_q: 0.0 }).unwrap();
    let square_ok = square.distance(Point::new(100.0 * 4.0 / 64.0, 16.0 / (8.0 / 3.0))) < 1e-12;
    let rhombus_ok = rhombus.distance(Point::new(6.25, 6.0)) < 1e-12;
    let ok = closest <= 0.15 && square_ok && rhombus_ok;
    (
        ok,
        format!(
            "{} samples, closest image to ({:.4}, {:.4}) at distance {closest:.4} (<= 0.15); square {square:?}, rhombus {rhombus:?}",
            run.state.len(),
            corner.x,
            corner.y
        ),
    )
}

fn occupied_cells(images: &[Point], bbox: &BoundingBox, n: usize) -> usize {
    images
        .iter()
        .map(|y| {
            let i = (((y.x - bbox.xmin) / bbox.width() * n as f64).floor() as usize).min(n - 1);
            let j = (((y.y - bbox.ymin) / bbox.height() * n as f64).floor() as usize).min(n - 1);
            (i, j)
        })
        .collect::<HashSet<_>>()
        .len()
}

fn criterion_6() -> Outcome {
    let map = TraceDet::new(3).unwrap();
    let bbox = d3_box();
    let mut ok = true;
    let mut lines = Vec::new();
    for seed in 1..=3u64 {
        let start = SampleSet::random(&map, 200, bbox, seed).unwrap();
        let lloyd = lloyd_bs(&map, start, &LloydOptions::default()).unwrap();
        let var = variational_cvt_bs(&map, lloyd.state, &OptimOptions::default().with_max_iters(1500), None).unwrap();
        let mc = monte_carlo(&map, 200, seed).unwrap();
        let (cvt, base) = (occupied_cells(&var.state.images, &bbox, 50), occupied_cells(&mc.images, &bbox, 50));
        ok &= cvt >= 2 * base;
        lines.push(format!("seed {seed}: cvt {cvt} mc {base} ratio {:.2}", cvt as f64 / base as f64));
    }
    (ok, format!("occupied cells of a 50x50 grid, need ratio >= 2: {}", lines.join("; ")))
}

fn criterion_7() -> Outcome {
    let bbox = BoundingBox::new(-1.0, 1.0, -1.0, 1.0).unwrap();
    let mut pts = random_points(50, &bbox, 2024);
    let mut g = cvt_energy_grad(&pts, &bbox).unwrap().0.energy;
    let start = g;
    for step in 0..100 {
        pts = lloyd_step(&pts, &bbox).unwrap();
        let next = cvt_energy_grad(&pts, &bbox).unwrap().0.energy;
        if next > g {
            return (false, format!("step {step}: G rose from {g:.15} to {next:.15}"));
        }
        g = next;
    }
    (true, format!("100 steps, G {start:.6} -> {g:.6}, never increasing"))
}

fn criterion_8(d2: &D2Run) -> Outcome {
    let map = TraceDet::new(2).unwrap();
    let state = &d2.run.state;
    let tess = state.tessellate().unwrap();
    let flagged: HashSet<usize> = d2.boundary.flagged.iter().copied().collect();
    let tol = 1e-3 * state.bbox.diameter();
    let (mut eligible, mut hit) = (0usize, 0usize);
    for i in 0..state.len() {
        if flagged.contains(&i) || map.jacobian(&state.samples[i]).unwrap().smallest_singular_value() <= 1e-3 {
            continue;
        }
        eligible += 1;
        hit += (state.images[i].distance(tess.centroids[i]) < tol) as usize;
    }
    let share = hit as f64 / eligible.max(1) as f64;
    (
        eligible > 0 && share >= 0.9,
        format!("{hit}/{eligible} eligible samples within {tol:.2e} of their centroid ({:.1}%, need 90%)", 100.0 * share),
    )
}

fn main() {
    let selected: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let wanted = |k: usize| selected.is_empty() || selected.contains(&k);
    let d2 = (wanted(1) || wanted(8)).then(d2_run);

    let mut failed = 0;
    for k in 1..=8 {
        if !wanted(k) {
            continue;
        }
        let t = Instant::now();
        let (ok, detail) = match k {
            1 => criterion_1(d2.as_ref().unwrap()),
            2 => criterion_2(),
            3 => criterion_3(),
            4 => criterion_4(),
            5 => criterion_5(),
            6 => criterion_6(),
            7 => criterion_7(),
            _ => criterion_8(d2.as_ref().unwrap()),
        };
        failed += !ok as usize;
        println!("{} criterion {k}: {detail} [{:.1?}]", if ok { "PASS" } else { "FAIL" }, t.elapsed());
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
