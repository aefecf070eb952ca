//! Sampling only the part of the (trace, determinant) diagram of symmetric
//! 4×4 matrices inside a small disk.
//!
//! Run with `cargo run --release --example restricted_region -- [cx] [cy] [r]`.

use bscvt::geom2d::Point;
use bscvt::maps::{DiagramMap, TraceDet};
use bscvt::pipeline::{multigrid, RefineConfig, RegionRestriction};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let v: Vec<f64> = std::env::args().skip(1).map(|s| s.parse()).collect::<Result<_, _>>()?;
    let (cx, cy, r) = match v[..] {
        [cx, cy, r] => (cx, cy, r),
        _ => (3.9, 1.0, 0.2),
    };
    let map = TraceDet::new(4)?;
    let rr = RegionRestriction::new(Point::new(cx, cy), r)?;
    let cfg = RefineConfig { n_ref: 2, ..RefineConfig::default() };
    let run = multigrid(&map, 20, map.default_box().ok_or("no default box")?, &cfg, 3, Some(&rr))?;

    for h in &run.history {
        println!("round {}  samples {:4}  H = {:.6}", h.round, h.samples, h.energy);
    }
    let farthest = run.state.images.iter().map(|y| y.distance(rr.center)).fold(0.0, f64::max);
    println!("farthest image from ({cx}, {cy}): {farthest:.5} (radius {r})");
    let b = run.state.bbox;
    println!("tessellation box [{:.3}, {:.3}] x [{:.3}, {:.3}]", b.xmin, b.xmax, b.ymin, b.ymax);
    Ok(())
}
