//! Seeded, counter-based Monte Carlo.
//!
//! Sample `i` belongs to chunk `i / CHUNK`; every chunk draws from its own
//! ChaCha stream, so a sample depends only on `(seed, i)` and never on the
//! thread that evaluates it. Chunk statistics are merged pairwise in chunk
//! order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};

pub const CHUNK: u64 = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McStream {
    pub seed: u64,
    pub count: u64,
}

pub fn mc_stream(seed: u64, count: u64) -> McStream {
    McStream { seed, count }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub count: u64,
}

#[derive(Debug, Clone, Copy)]
struct Moments {
    n: f64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn merge(a: Moments, b: Moments) -> Moments {
        let n = a.n + b.n;
        if n == 0.0 {
            return a;
        }
        let delta = b.mean - a.mean;
        Moments {
            n,
            mean: a.mean + delta * b.n / n,
            m2: a.m2 + b.m2 + delta * delta * a.n * b.n / n,
        }
    }
}

fn merge_pairwise(parts: &[Moments]) -> Moments {
    match parts.len() {
        0 => Moments {
            n: 0.0,
            mean: 0.0,
            m2: 0.0,
        },
        1 => parts[0],
        len => {
            let (l, r) = parts.split_at(len / 2);
            Moments::merge(merge_pairwise(l), merge_pairwise(r))
        }
    }
}

impl McStream {
    pub fn chunks(&self) -> u64 {
        self.count.div_ceil(CHUNK)
    }

    /// Generator for chunk `c`.
    pub fn chunk_rng(&self, c: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(c);
        rng
    }

    /// Draws for sample `index`: `f` is called on the chunk generator after
    /// the preceding samples of the chunk have consumed theirs.
    pub fn sample<T>(&self, index: u64, mut f: impl FnMut(&mut ChaCha8Rng) -> T) -> T {
        let mut rng = self.chunk_rng(index / CHUNK);
        for _ in 0..index % CHUNK {
            f(&mut rng);
        }
        f(&mut rng)
    }

    /// Mean and standard error of `f` over the stream.
    pub fn estimate<F>(&self, f: F) -> Result<McEstimate>
    where
        F: Fn(&mut ChaCha8Rng) -> Result<f64> + Sync,
    {
        if self.count == 0 {
            return Err(Error::EmptySample);
        }
        let parts = (0..self.chunks())
            .into_par_iter()
            .map(|c| {
                let mut rng = self.chunk_rng(c);
                let len = CHUNK.min(self.count - c * CHUNK) as usize;
                let mut values = Vec::with_capacity(len);
                for _ in 0..len {
                    let v = f(&mut rng)?;
                    if !v.is_finite() {
                        return Err(Error::NonFinite("Monte Carlo sample".into()));
                    }
                    values.push(v);
                }
                let mean = super::pairwise_sum(&values) / len as f64;
                let dev: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
                Ok(Moments {
                    n: len as f64,
                    mean,
                    m2: super::pairwise_sum(&dev),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let m = merge_pairwise(&parts);
        let var = if m.n > 1.0 { m.m2 / (m.n - 1.0) } else { 0.0 };
        Ok(McEstimate {
            mean: m.mean,
            std_error: (var / m.n).sqrt(),
            count: self.count,
        })
    }
}
