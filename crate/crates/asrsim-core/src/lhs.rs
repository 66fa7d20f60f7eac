//! Seeded Latin hypercube sampling.

use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Draws `n` points with one sample per equal-probability stratum in every
/// dimension. Strata orders are permuted independently per dimension with a
/// generator seeded from `seed`, so the design is deterministic.
///
/// Returns `n` rows of `ranges.len()` columns.
pub fn latin_hypercube(n: usize, ranges: &[(f64, f64)], seed: u64) -> Vec<Vec<f64>> {
    let dims = ranges.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = alloc::vec![alloc::vec![0.0; dims]; n];
    let mut strata: Vec<usize> = (0..n).collect();
    for (dim, &(lo, hi)) in ranges.iter().enumerate() {
        strata.sort_unstable();
        strata.shuffle(&mut rng);
        for (row, &stratum) in strata.iter().enumerate() {
            let jitter: f64 = rng.random();
            let unit = (stratum as f64 + jitter) / n as f64;
            rows[row][dim] = lo + (hi - lo) * unit;
        }
    }
    rows
}
