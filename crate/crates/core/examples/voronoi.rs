//! Clipped Voronoi cells of random points and plain Lloyd iterations on
//! them. Writes the final tessellation to `voronoi.svg`.
//!
//! Run with `cargo run --example voronoi -- [points] [steps]`.

use bscvt::cli::cells_svg;
use bscvt::cvt::{cvt_energy_grad, lloyd_step};
use bscvt::geom2d::{clipped_voronoi, BoundingBox, Point};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map_or(Ok(100), |s| s.parse())?;
    let steps: usize = args.next().map_or(Ok(50), |s| s.parse())?;

    let bbox = BoundingBox::new(0.0, 2.0, 0.0, 1.0)?;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut pts: Vec<Point> = (0..n)
        .map(|_| Point::new(rng.gen_range(0.0..2.0), rng.gen_range(0.0..1.0)))
        .collect();

    for step in 0..=steps {
        let (report, grad) = cvt_energy_grad(&pts, &bbox)?;
        let gnorm = grad.iter().map(|g| g.norm_squared()).sum::<f64>().sqrt();
        if step % 10 == 0 || step == steps {
            println!("step {step:3}  G = {:.8}  |grad| = {gnorm:.3e}  max |y - c| = {:.3e}", report.energy, report.max_displacement());
        }
        if step < steps {
            pts = lloyd_step(&pts, &bbox)?;
        }
    }

    let tess = clipped_voronoi(&pts, &bbox)?;
    println!("{} cells, total area {:.12}", tess.len(), tess.total_area());
    std::fs::write("voronoi.svg", cells_svg(bbox, &pts, &tess))?;
    println!("wrote voronoi.svg");
    Ok(())
}
