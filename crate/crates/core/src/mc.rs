//! Seeded, thread-count independent Monte Carlo plumbing.
//!
//! Work is cut into fixed chunks; chunk `c` draws from ChaCha8 stream `c` of
//! the seed, and per-chunk statistics are merged in chunk order. The result
//! therefore depends only on `(seed, n)`, never on scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::Result;

pub(crate) const CHUNK: usize = 2048;

pub(crate) fn chunk_rng(seed: u64, chunk: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk as u64);
    rng
}

/// `f(rng, len)` for every chunk, in chunk order.
pub(crate) fn map_chunks<T: Send>(
    n: usize,
    seed: u64,
    f: impl Fn(&mut ChaCha8Rng, usize) -> Result<T> + Sync,
) -> Result<Vec<T>> {
    let chunks = n.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let len = CHUNK.min(n - c * CHUNK);
            f(&mut chunk_rng(seed, c), len)
        })
        .collect()
}

/// Welford accumulator with Chan's pairwise merge.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct RunningStats {
    count: u64,
    mean: f64,
    m2: f64,
}

impl RunningStats {
    pub fn push(&mut self, v: f64) {
        self.count += 1;
        let d = v - self.mean;
        self.mean += d / self.count as f64;
        self.m2 += d * (v - self.mean);
    }

    pub fn merge(&mut self, o: &RunningStats) {
        if o.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *o;
            return;
        }
        let n = self.count + o.count;
        let d = o.mean - self.mean;
        self.mean += d * o.count as f64 / n as f64;
        self.m2 += o.m2 + d * d * (self.count as f64 * o.count as f64) / n as f64;
        self.count = n;
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }

    pub fn std_error(&self) -> f64 {
        if self.count == 0 {
            return f64::INFINITY;
        }
        (self.variance() / self.count as f64).sqrt()
    }
}

/// Mean and standard error of `f` over `n` draws.
pub(crate) fn mc_mean(n: usize, seed: u64, f: impl Fn(&mut ChaCha8Rng) -> Result<f64> + Sync) -> Result<RunningStats> {
    let parts = map_chunks(n, seed, |rng, len| {
        let mut s = RunningStats::default();
        for _ in 0..len {
            s.push(f(rng)?);
        }
        Ok(s)
    })?;
    let mut total = RunningStats::default();
    for p in &parts {
        total.merge(p);
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn merge_matches_single_pass() {
        let vals: Vec<f64> = (0..1000).map(|i| ((i * 37) % 101) as f64 * 0.1).collect();
        let mut all = RunningStats::default();
        vals.iter().for_each(|&v| all.push(v));
        let mut a = RunningStats::default();
        let mut b = RunningStats::default();
        vals[..313].iter().for_each(|&v| a.push(v));
        vals[313..].iter().for_each(|&v| b.push(v));
        a.merge(&b);
        assert_eq!(a.count(), all.count());
        assert!((a.mean() - all.mean()).abs() < 1e-12);
        assert!((a.variance() - all.variance()).abs() < 1e-10);
    }

    #[test]
    fn independent_of_thread_count() {
        let f = |rng: &mut ChaCha8Rng| Ok(rng.random::<f64>());
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = one.install(|| mc_mean(20_000, 7, f)).unwrap();
        let b = four.install(|| mc_mean(20_000, 7, f)).unwrap();
        assert_eq!(a, b);
        assert!((a.mean() - 0.5).abs() < 5.0 * a.std_error());
    }
}
