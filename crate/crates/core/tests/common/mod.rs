#![allow(dead_code)]

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use trackcop::{DiagonalSpec, PlFunction, Track};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Sorted knots `0 = t_0 < … < t_k = 1` with `k + 1` points.
pub fn random_knots(rng: &mut ChaCha8Rng, k: usize) -> Vec<f64> {
    let mut inner: Vec<f64> = (0..k.saturating_sub(1)).map(|_| rng.gen_range(0.0..1.0)).collect();
    inner.sort_by(f64::total_cmp);
    inner.dedup();
    let mut xs = vec![0.0];
    xs.extend(inner.into_iter().filter(|&v| v > 0.0 && v < 1.0));
    xs.push(1.0);
    xs
}

/// Arbitrary piecewise-linear function with values in `[-1, 1]`.
pub fn random_pl(rng: &mut ChaCha8Rng, max_knots: usize) -> PlFunction {
    let k = rng.gen_range(1..max_knots);
    let xs = random_knots(rng, k);
    let ys = xs.iter().map(|_| rng.gen_range(-1.0..1.0)).collect();
    PlFunction::new(xs, ys).unwrap()
}

/// Strictly increasing track through `(0, 0)` and `(1, 1)`.
pub fn random_track(rng: &mut ChaCha8Rng, max_knots: usize) -> Track {
    let k = rng.gen_range(1..max_knots);
    let xs = random_knots(rng, k);
    let weights: Vec<f64> = (1..xs.len()).map(|_| rng.gen_range(0.05..1.0)).collect();
    let total: f64 = weights.iter().sum();
    let mut ys = vec![0.0];
    let mut acc = 0.0;
    for w in &weights[..weights.len() - 1] {
        acc += w / total;
        ys.push(acc);
    }
    ys.push(1.0);
    Track::new(PlFunction::new(xs, ys).unwrap()).unwrap()
}

/// Increments `lo + w·(hi − lo)` on the section knots with `w` piecewise
/// constant over a few random blocks.
pub fn random_eligible(rng: &mut ChaCha8Rng, spec: &DiagonalSpec) -> PlFunction {
    let knots = spec.knots();
    let bounds = spec.increment_bounds(knots);
    let blocks = rng.gen_range(1..6);
    let cuts: Vec<f64> = (0..blocks).map(|_| rng.gen_range(0.0..1.0)).collect();
    let levels: Vec<f64> = (0..=blocks).map(|_| rng.gen_range(0.0..1.0)).collect();
    let mut ys = vec![0.0];
    for (k, &(lo, hi)) in bounds.iter().enumerate() {
        let block = cuts.iter().filter(|&&c| c < knots[k]).count();
        ys.push(ys[k] + lo + levels[block] * (hi - lo));
    }
    PlFunction::new(knots.to_vec(), ys).unwrap()
}

/// An eligible `ψ` with one segment pushed outside its increment bounds.
pub fn perturbed(rng: &mut ChaCha8Rng, spec: &DiagonalSpec) -> PlFunction {
    let base = random_eligible(rng, spec);
    let knots = spec.knots();
    let bounds = spec.increment_bounds(knots);
    let k = rng.gen_range(0..bounds.len());
    let dx = knots[k + 1] - knots[k];
    let (lo, hi) = bounds[k];
    let amount = rng.gen_range(0.05..0.5) * dx + 1e-6;
    let inc = if rng.gen_bool(0.5) { hi + amount } else { lo - amount };
    let mut ys = base.ys().to_vec();
    let shift = inc - (ys[k + 1] - ys[k]);
    for y in &mut ys[k + 1..] {
        *y += shift;
    }
    PlFunction::new(knots.to_vec(), ys).unwrap()
}

/// Increasing 1-Lipschitz function with value 0 at 0.
pub fn random_lipschitz(rng: &mut ChaCha8Rng, max_knots: usize) -> PlFunction {
    let k = rng.gen_range(1..max_knots);
    let xs = random_knots(rng, k);
    let mut ys = vec![0.0];
    for w in xs.windows(2) {
        let last = *ys.last().unwrap();
        ys.push(last + rng.gen_range(0.0..=1.0) * (w[1] - w[0]));
    }
    PlFunction::new(xs, ys).unwrap()
}
