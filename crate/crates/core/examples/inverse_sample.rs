//! Solving `F(x) = c` on the parameter box, and moving a sample along its
//! fiber towards the middle of the box.
//!
//! Run with `cargo run --example inverse_sample`.

use bscvt::geom2d::Point;
use bscvt::maps::{DiagramMap, TraceDet};
use bscvt::optim::{inverse_sample, recenter, OptimOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let map = TraceDet::new(2)?;
    let opts = OptimOptions::default();
    // a start with a = c would keep that symmetry all the way
    let x0 = vec![0.3, -0.2, 0.1];

    // (1, -1) is attained, (0, 3) lies above the parabola det = tr²/4
    for c in [Point::new(1.0, -1.0), Point::new(0.0, 3.0)] {
        let r = inverse_sample(&map, c, &x0, &opts);
        let y = map.evaluate(&r.x_star)?;
        println!(
            "target ({:5.2}, {:5.2})  reached ({:.6}, {:.6})  residual {:.3e}  status {:?} after {} iterations",
            c.x,
            c.y,
            y.x,
            y.y,
            y.distance(c),
            r.status,
            r.iterations
        );
    }

    // diag(1, -1) sits on a corner of the box; its fiber has interior points
    let corner = vec![1.0, -1.0, 0.0];
    let before = map.evaluate(&corner)?;
    let rc = recenter(&map, &corner, 10, &opts);
    let after = map.evaluate(&rc.x_star)?;
    let sup = |x: &[f64]| x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    println!(
        "recenter: {:?} -> {:.4?} ({:?}), sup norm {:.4} -> {:.4}, image moved by {:.2e}",
        corner,
        rc.x_star,
        rc.status,
        sup(&corner),
        sup(&rc.x_star),
        before.distance(after)
    );
    Ok(())
}
