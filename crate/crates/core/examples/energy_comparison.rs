//! Lloyd through the map against direct minimisation of the composed
//! energy, for 200 samples of the 2×2 trace/determinant map.
//!
//! Run with `cargo run --release --example energy_comparison -- [seed]`.

use std::time::Instant;

use bscvt::cvt::{lloyd_bs, variational_cvt_bs, LloydOptions, SampleSet};
use bscvt::geom2d::BoundingBox;
use bscvt::maps::TraceDet;
use bscvt::optim::OptimOptions;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let seed = std::env::args().nth(1).map_or(Ok(1), |s| s.parse())?;
    let map = TraceDet::new(2)?;
    let bbox = BoundingBox::new(-2.5, 2.5, -2.5, 2.5)?;
    let start = SampleSet::random(&map, 200, bbox, seed)?;

    let t = Instant::now();
    let lloyd = lloyd_bs(&map, start.clone(), &LloydOptions::default().with_max_iters(1000))?;
    println!(
        "lloyd        G = {:.6}  iterations = {:4}  converged = {}  ({:.1?})",
        lloyd.energy,
        lloyd.log.len(),
        lloyd.converged,
        t.elapsed()
    );

    let t = Instant::now();
    let opts = OptimOptions::default().with_max_iters(std::env::args().nth(2).map_or(Ok(1000), |s| s.parse())?).with_grad_tol(1e-8);
    let var = variational_cvt_bs(&map, start, &opts, None)?;
    println!(
        "variational  G = {:.6}  iterations = {:4}  status = {:?}  evals = {}  ({:.1?})",
        var.energy(),
        var.iterations,
        var.status,
        var.evals,
        t.elapsed()
    );
    Ok(())
}
