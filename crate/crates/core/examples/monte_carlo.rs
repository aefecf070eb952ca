//! Monte Carlo sampling against an optimised point set of the same size on
//! the (trace, determinant) diagram of symmetric 3×3 matrices: occupied
//! cells of a 50×50 grid over the box.
//!
//! Run with `cargo run --release --example monte_carlo -- [points] [seed]`.

use std::collections::HashSet;

use bscvt::cvt::{lloyd_bs, variational_cvt_bs, LloydOptions, SampleSet};
use bscvt::geom2d::{BoundingBox, Point};
use bscvt::maps::{monte_carlo, TraceDet};
use bscvt::optim::OptimOptions;

fn occupied(images: &[Point], bbox: &BoundingBox, n: usize) -> usize {
    images
        .iter()
        .map(|y| {
            let i = (((y.x - bbox.xmin) / bbox.width() * n as f64) as usize).min(n - 1);
            let j = (((y.y - bbox.ymin) / bbox.height() * n as f64) as usize).min(n - 1);
            (i, j)
        })
        .collect::<HashSet<_>>()
        .len()
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let m: usize = args.next().map_or(Ok(200), |s| s.parse())?;
    let seed: u64 = args.next().map_or(Ok(1), |s| s.parse())?;
    let map = TraceDet::new(3)?;
    let bbox = BoundingBox::new(-5.0, 5.0, -5.0, 5.0)?;

    let mc = monte_carlo(&map, m, seed)?;
    let start = SampleSet::random(&map, m, bbox, seed)?;
    let lloyd = lloyd_bs(&map, start, &LloydOptions::default())?;
    let var = variational_cvt_bs(&map, lloyd.state, &OptimOptions::default().with_max_iters(1500), None)?;

    let spread = |ys: &[Point]| {
        let b = BoundingBox::around(ys).unwrap();
        format!("tr [{:.2}, {:.2}] det [{:.2}, {:.2}]", b.xmin, b.xmax, b.ymin, b.ymax)
    };
    println!("monte carlo  {} occupied cells, {}", occupied(&mc.images, &bbox, 50), spread(&mc.images));
    println!("optimised    {} occupied cells, {}", occupied(&var.state.images, &bbox, 50), spread(&var.state.images));
    println!("composed energy {:.4} -> {:.4}", var.initial_energy, var.energy());
    Ok(())
}
