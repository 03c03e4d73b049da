//! Reproducible random streams and uniform subset sampling.
//!
//! All randomness comes from ChaCha8 seeded via `seed_from_u64`, with an
//! explicit stream id per independent unit of work (trial, repetition). Output
//! depends only on `(seed, stream)`, not on thread scheduling or platform.

use std::collections::HashMap;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type SeededRng = ChaCha8Rng;

/// Generator for stream `stream` of `seed`.
pub fn rng_for(seed: u64, stream: u64) -> SeededRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// A seed for an independent sub-experiment, derived from `(seed, stream)`.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    rng_for(seed, stream).next_u64()
}

/// Uniform size-`k` subset of `0..population` via a partial Fisher–Yates shuffle.
///
/// Returns the first `k` positions of the shuffled index array, in draw order.
/// Swaps are recorded sparsely, so the cost is O(k) regardless of `population`,
/// and the output is identical to shuffling a dense array.
pub fn partial_shuffle<R: Rng + ?Sized>(rng: &mut R, population: usize, k: usize) -> Vec<usize> {
    assert!(k <= population, "cannot draw {k} of {population}");
    let mut swapped: HashMap<usize, usize> = HashMap::with_capacity(2 * k);
    let mut out = Vec::with_capacity(k);
    for i in 0..k {
        let j = rng.gen_range(i..population);
        let at_j = *swapped.get(&j).unwrap_or(&j);
        let at_i = *swapped.get(&i).unwrap_or(&i);
        swapped.insert(j, at_i);
        out.push(at_j);
    }
    out
}

/// Uniform size-`k` subset of `0..population`, sorted ascending.
pub fn sample_subset<R: Rng + ?Sized>(rng: &mut R, population: usize, k: usize) -> Vec<usize> {
    let mut s = partial_shuffle(rng, population, k);
    s.sort_unstable();
    s
}

/// Binomial coefficient, saturating at `u128::MAX`.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step.
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i + 1) as u128,
            None => return u128::MAX,
        };
    }
    acc
}

/// Calls `f` on every size-`k` subset of `0..n` in lexicographic order.
pub fn for_each_combination(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        // Advance to the next combination.
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
            if i == 0 {
                return;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Calls `f` on every `arity`-tuple over `0..n` in lexicographic order.
pub fn for_each_tuple(n: usize, arity: usize, mut f: impl FnMut(&[usize])) {
    if arity > 0 && n == 0 {
        return;
    }
    let mut t = vec![0usize; arity];
    loop {
        f(&t);
        let mut i = arity;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            t[i] += 1;
            if t[i] < n {
                break;
            }
            t[i] = 0;
        }
    }
}
