//! Deterministic replicate fan-out.
//!
//! Every replicate owns a ChaCha8 stream: the key is derived from the master
//! seed and a per-experiment tag, the stream id is the replicate index. Work
//! is cut into fixed-size batches that do not depend on the number of
//! workers, and batch results are merged in batch order, so sums are
//! bit-identical for any thread count and with or without the `parallel`
//! feature.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::stats::MeanAccumulator;

pub type ReplicateRng = ChaCha8Rng;

const BATCH: usize = 1024;

/// How replicates are executed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Exec {
    Sequential,
    /// Rayon pool with the given number of workers; `0` means rayon's default.
    /// Falls back to sequential execution without the `parallel` feature.
    #[default]
    Parallel,
    ParallelWith(usize),
}

impl Exec {
    pub fn from_jobs(jobs: usize) -> Self {
        match jobs {
            0 => Exec::Parallel,
            1 => Exec::Sequential,
            n => Exec::ParallelWith(n),
        }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derive a stream tag from a label and parameter index.
pub fn tag(label: &str, index: u64) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325u64;
    for b in label.bytes() {
        h = (h ^ b as u64).wrapping_mul(0x0100_0000_01b3);
    }
    splitmix64(h ^ splitmix64(index))
}

/// Random source of replicate `replicate` under `(master, tag)`.
pub fn replicate_rng(master: u64, tag: u64, replicate: u64) -> ReplicateRng {
    let mut rng = ChaCha8Rng::seed_from_u64(splitmix64(master) ^ splitmix64(tag.rotate_left(17)));
    rng.set_stream(replicate);
    rng
}

#[cfg(feature = "parallel")]
fn run_batches<T, F>(exec: Exec, batches: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    match exec {
        Exec::Sequential => (0..batches).map(f).collect(),
        Exec::Parallel => (0..batches).into_par_iter().map(f).collect(),
        Exec::ParallelWith(jobs) => match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
            Ok(pool) => pool.install(|| (0..batches).into_par_iter().map(&f).collect()),
            Err(_) => (0..batches).map(f).collect(),
        },
    }
}

#[cfg(not(feature = "parallel"))]
fn run_batches<T, F>(_exec: Exec, batches: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..batches).map(f).collect()
}

/// Evaluate `f` once per replicate and return the results in replicate order.
pub fn map_replicates<T, F>(exec: Exec, master: u64, tag: u64, count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut ReplicateRng) -> T + Sync + Send,
{
    let batches = count.div_ceil(BATCH);
    let chunks = run_batches(exec, batches, |b| {
        let lo = b * BATCH;
        let hi = (lo + BATCH).min(count);
        (lo..hi)
            .map(|i| f(&mut replicate_rng(master, tag, i as u64)))
            .collect::<Vec<_>>()
    });
    chunks.into_iter().flatten().collect()
}

/// Accumulate `WIDTH` statistics per replicate.
pub fn accumulate<const WIDTH: usize, F>(
    exec: Exec,
    master: u64,
    tag: u64,
    count: usize,
    f: F,
) -> [MeanAccumulator; WIDTH]
where
    F: Fn(&mut ReplicateRng) -> [f64; WIDTH] + Sync + Send,
{
    let batches = count.div_ceil(BATCH);
    let partial = run_batches(exec, batches, |b| {
        let lo = b * BATCH;
        let hi = (lo + BATCH).min(count);
        let mut acc = [MeanAccumulator::default(); WIDTH];
        for i in lo..hi {
            let values = f(&mut replicate_rng(master, tag, i as u64));
            for (a, v) in acc.iter_mut().zip(values) {
                a.push(v);
            }
        }
        acc
    });
    let mut total = [MeanAccumulator::default(); WIDTH];
    for acc in &partial {
        for (t, a) in total.iter_mut().zip(acc) {
            t.merge(a);
        }
    }
    total
}
