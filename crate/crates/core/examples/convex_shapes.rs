//! Area, perimeter and moment of inertia of symmetric convex polygons, and
//! multigrid sampling of the resulting diagram.
//!
//! Run with `cargo run --release --example convex_shapes -- [segments] [rounds]`.

use std::f64::consts::{PI, TAU};

use bscvt::geom2d::Point;
use bscvt::maps::{apw_eval, shape_build, ConvexShapeMap, ConvexShapeParams, DiagramMap, ShapeMeasures};
use bscvt::pipeline::{multigrid, RefineConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let q: usize = args.next().map_or(Ok(50), |s| s.parse())?;
    let n_ref: usize = args.next().map_or(Ok(3), |s| s.parse())?;

    for (name, p) in [
        ("square", ConvexShapeParams { rho: vec![0.0, 0.0], h_q: 1.0 }),
        ("rhombus", ConvexShapeParams { rho: vec![0.5, 0.0], h_q: 0.0 }),
    ] {
        let poly = shape_build(&p)?;
        let m = ShapeMeasures::of_polygon(&poly);
        let y = apw_eval(&p)?;
        println!("{name:8} {} vertices  A {:.4}  P {:.4}  W {:.4}  -> ({:.4}, {:.4})", poly.len(), m.area, m.perimeter, m.moment, y.x, y.y);
    }

    let map = ConvexShapeMap::new(q)?;
    let bbox = map.default_box().ok_or("no default box")?;
    let cfg = RefineConfig { n_ref, ..RefineConfig::default() };
    let run = multigrid(&map, 15, bbox, &cfg, 1, None)?;
    for r in &run.history {
        println!("round {}  samples {:4}  H = {:.6}", r.round, r.samples, r.energy);
    }
    let disk = Point::new(100.0 / (4.0 * PI), TAU);
    let (i, d) = run
        .state
        .images
        .iter()
        .enumerate()
        .map(|(i, y)| (i, y.distance(disk)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap();
    println!("closest image to the disk ({:.4}, {:.4}): {:?} at distance {d:.4}", disk.x, disk.y, run.state.images[i]);
    Ok(())
}
