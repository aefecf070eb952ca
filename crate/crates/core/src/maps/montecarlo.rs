use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{BoxDomain, DiagramMap, MapError, Result};
use crate::geom2d::Point;

/// Uniform parameter samples and their images.
#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloRun {
    pub samples: Vec<Vec<f64>>,
    pub images: Vec<Point>,
    /// Draws rejected because the map failed on them.
    pub skipped: usize,
}

/// A uniform point of `domain` drawn from the stream `(seed, stream)`.
pub fn uniform_sample(domain: &BoxDomain, seed: u64, stream: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    draw(domain, &mut rng)
}

fn draw(domain: &BoxDomain, rng: &mut ChaCha8Rng) -> Vec<f64> {
    domain
        .lower()
        .iter()
        .zip(domain.upper())
        .map(|(&a, &b)| a + (b - a) * rng.gen::<f64>())
        .collect()
}

/// Images of `n` uniform samples of the map's domain.
///
/// Sample `i` is drawn from its own ChaCha stream keyed by `(seed, i)`, so
/// the output does not depend on evaluation order or thread count. Draws on
/// which the map fails are redrawn from the same stream; the whole run
/// gives up after `100 n` draws.
pub fn monte_carlo(map: &dyn DiagramMap, n: usize, seed: u64) -> Result<MonteCarloRun> {
    if n == 0 {
        return Err(MapError::InvalidParameters("sample count must be positive".into()));
    }
    let budget = 100 * n;
    let per_sample: Vec<(Option<(Vec<f64>, Point)>, usize)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let mut fails = 0;
            while fails < budget {
                let x = draw(map.domain(), &mut rng);
                match map.evaluate(&x) {
                    Ok(y) if y.is_finite() => return (Some((x, y)), fails),
                    _ => fails += 1,
                }
            }
            (None, fails)
        })
        .collect();

    let skipped: usize = per_sample.iter().map(|(_, f)| f).sum();
    let attempts = skipped + per_sample.iter().filter(|(s, _)| s.is_some()).count();
    if skipped + n > budget || per_sample.iter().any(|(s, _)| s.is_none()) {
        return Err(MapError::SamplingExhausted { attempts, skipped });
    }
    let (samples, images) = per_sample.into_iter().filter_map(|(s, _)| s).unzip();
    Ok(MonteCarloRun {
        samples,
        images,
        skipped,
    })
}
