//! Seeded random streams.
//!
//! A run owns one generator seeded from a 64-bit seed. Monte-Carlo sweeps
//! split their shots into fixed-size blocks and give block `k` the ChaCha
//! stream `k` under the same seed, so results do not depend on how blocks are
//! scheduled.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

/// Shots per independent stream in Monte-Carlo sweeps.
pub const SHOTS_PER_STREAM: u64 = 1 << 16;

pub fn run_rng(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn stream_rng(seed: u64, stream: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Runs `shot` for `shots` trials over per-block streams and counts successes.
pub fn count_successes<F>(seed: u64, shots: u64, mut shot: F) -> u64
where
    F: FnMut(&mut SimRng) -> bool,
{
    let mut hits = 0;
    let mut done = 0;
    let mut stream = 0;
    while done < shots {
        let block = SHOTS_PER_STREAM.min(shots - done);
        let mut rng = stream_rng(seed, stream);
        for _ in 0..block {
            hits += shot(&mut rng) as u64;
        }
        done += block;
        stream += 1;
    }
    hits
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn streams_differ_and_repeat() {
        let a: u64 = stream_rng(7, 0).random();
        let b: u64 = stream_rng(7, 1).random();
        assert_ne!(a, b);
        assert_eq!(a, stream_rng(7, 0).random::<u64>());
    }

    #[test]
    fn count_is_deterministic() {
        let f = |r: &mut SimRng| r.random::<f64>() < 0.3;
        assert_eq!(count_successes(3, 200_000, f), count_successes(3, 200_000, f));
    }
}
