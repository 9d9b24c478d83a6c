//! Seeded random streams and chunked Monte Carlo.
//!
//! Every stochastic routine takes an explicit generator. Parallel loops split
//! their trials into fixed-size chunks, each driven by its own ChaCha stream
//! derived from `(seed, chunk index)`, so results do not depend on thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;

pub type SimRng = ChaCha12Rng;

/// Trials handled by one derived stream in [`par_trials`].
pub const CHUNK: usize = 8192;

pub fn seeded(seed: u64) -> SimRng {
    SimRng::seed_from_u64(seed)
}

/// Independent stream `stream` of the generator seeded with `seed`.
pub fn derived(seed: u64, stream: u64) -> SimRng {
    let mut rng = SimRng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Runs `trials` trials in parallel chunks; `f(rng, n)` handles `n` trials
/// and the per-chunk results come back in chunk order.
pub fn par_trials<T, F>(trials: usize, seed: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut SimRng, usize) -> T + Sync,
{
    let chunks = trials.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let n = CHUNK.min(trials - c * CHUNK);
            let mut rng = derived(seed, c as u64);
            f(&mut rng, n)
        })
        .collect()
}
