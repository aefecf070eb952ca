//! Multigrid sampling of the (trace, determinant) diagram of symmetric
//! 2×2 matrices, followed by boundary extraction.
//!
//! Run with `cargo run --release --example multigrid -- [seed] [rounds]`.

use std::time::Instant;

use bscvt::geom2d::BoundingBox;
use bscvt::maps::{DiagramMap, TraceDet};
use bscvt::pipeline::{extract_boundary, multigrid, RefineConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let seed: u64 = args.next().map_or(Ok(7), |s| s.parse())?;
    let n_ref: usize = args.next().map_or(Ok(3), |s| s.parse())?;

    let map = TraceDet::new(2)?;
    let bbox = BoundingBox::new(-2.5, 2.5, -2.5, 2.5)?;
    let cfg = RefineConfig { n_ref, ..RefineConfig::default() };

    let t = Instant::now();
    let run = multigrid(&map, 30, bbox, &cfg, seed, None)?;
    for r in &run.history {
        println!("round {}  samples {:5}  added {:5}  H = {:.6}", r.round, r.samples, r.added, r.energy);
    }
    println!("elapsed {:.1?}", t.elapsed());

    // distance of each image outside {|t| - 2 <= det <= t²/4}
    let worst = run
        .state
        .images
        .iter()
        .map(|y| (y.y - y.x * y.x / 4.0).max(y.x.abs() - 2.0 - y.y).max(y.x.abs() - 2.0).max(0.0))
        .fold(0.0, f64::max);
    println!("largest violation of the analytic bounds: {worst:.2e}");

    let boundary = extract_boundary(&run.state, 12.0, 155.0)?;
    println!(
        "boundary: {} loop(s), area {:.4} (exact 16/3 = {:.4}), {} flagged samples",
        boundary.loops.len(),
        boundary.area(),
        16.0 / 3.0,
        boundary.flagged.len()
    );

    let tess = run.state.tessellate()?;
    let flagged: std::collections::HashSet<usize> = boundary.flagged.iter().copied().collect();
    let (mut eligible, mut good) = (0, 0);
    for (i, (x, y)) in run.state.samples.iter().zip(&run.state.images).enumerate() {
        if flagged.contains(&i) || map.jacobian(x)?.smallest_singular_value() <= 1e-3 {
            continue;
        }
        eligible += 1;
        if y.distance(tess.centroids[i]) < 1e-3 * bbox.diameter() {
            good += 1;
        }
    }
    println!("samples at their centroid: {good}/{eligible}");
    Ok(())
}
