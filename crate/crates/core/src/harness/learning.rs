//! Training/test sampling and the two equivalent ways of drawing fragment samples.

use rand::Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};
use crate::example::{ConstId, Example};
use crate::sampling::{partial_shuffle, rng_for, sample_subset};

/// A sampled training/test pair with the constant subsets (ids into the global example).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LearningInstance {
    pub train: Example,
    pub test: Example,
    pub train_ids: Vec<ConstId>,
    pub test_ids: Vec<ConstId>,
}

/// Draws the training and test constant subsets independently (they may overlap).
pub fn sample_domains<R: Rng + ?Sized>(
    rng: &mut R,
    population: usize,
    n: usize,
    u: usize,
) -> Result<(Vec<ConstId>, Vec<ConstId>)> {
    for size in [n, u] {
        if size > population {
            return Err(Error::FragmentTooLarge {
                k: size,
                domain: population,
            });
        }
    }
    let ids = |v: Vec<usize>| v.into_iter().map(|c| c as ConstId).collect();
    let train = ids(sample_subset(rng, population, n));
    let test = ids(sample_subset(rng, population, u));
    Ok((train, test))
}

/// Samples `Υ` and `Γ` as restrictions of `aleph` to uniform subsets of sizes `n` and `u`.
pub fn sample_learning_instance(aleph: &Example, n: usize, u: usize, seed: u64) -> Result<LearningInstance> {
    let mut rng = rng_for(seed, 0);
    let (train_ids, test_ids) = sample_domains(&mut rng, aleph.domain_size(), n, u)?;
    Ok(LearningInstance {
        train: aleph.restrict_ids(&train_ids),
        test: aleph.restrict_ids(&test_ids),
        train_ids,
        test_ids,
    })
}

fn check_lemma_sizes(population: usize, n: usize, k: usize) -> Result<()> {
    if k == 0 || k > n || n > population {
        return Err(Error::InvalidParameter(format!(
            "need 1 <= k <= n <= |domain|, got k={k} n={n} |domain|={population}"
        )));
    }
    Ok(())
}

/// `⌊n/k⌋` independent uniform size-k subsets of `0..population`, each sorted.
pub fn lemma3_sample_x<R: Rng + ?Sized>(
    rng: &mut R,
    population: usize,
    n: usize,
    k: usize,
) -> Result<Vec<Vec<usize>>> {
    check_lemma_sizes(population, n, k)?;
    Ok((0..n / k).map(|_| sample_subset(rng, population, k)).collect())
}

/// The same number of size-k subsets, drawn through a size-n sample:
/// sample the size-n subset, then `⌊n/k⌋` independent index subsets of
/// `0..population`, then a uniform injective map from the union of the indices
/// into the size-n subset, and return the images of the index subsets.
pub fn lemma3_sample_y<R: Rng + ?Sized>(
    rng: &mut R,
    population: usize,
    n: usize,
    k: usize,
) -> Result<Vec<Vec<usize>>> {
    check_lemma_sizes(population, n, k)?;
    let sample = sample_subset(rng, population, n);
    let index_sets: Vec<Vec<usize>> = (0..n / k).map(|_| sample_subset(rng, population, k)).collect();
    let mut union: Vec<usize> = index_sets.iter().flatten().copied().collect();
    union.sort_unstable();
    union.dedup();
    // |union| <= k·⌊n/k⌋ <= n, so the injection exists.
    let images = partial_shuffle(rng, n, union.len());
    let g = |i: usize| sample[images[union.binary_search(&i).unwrap()]];
    Ok(index_sets
        .into_iter()
        .map(|s| {
            let mut out: Vec<usize> = s.into_iter().map(g).collect();
            out.sort_unstable();
            out
        })
        .collect())
}

/// Outcome of a chi-square test of homogeneity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiSquareTest {
    pub statistic: f64,
    pub degrees_of_freedom: usize,
    pub p_value: f64,
}

/// Two-sample chi-square test that two count vectors over the same categories
/// come from one distribution. Categories empty in both samples are dropped.
pub fn chi_square_two_sample(a: &[u64], b: &[u64]) -> Result<ChiSquareTest> {
    if a.len() != b.len() {
        return Err(Error::InvalidParameter("count vectors differ in length".into()));
    }
    let (na, nb) = (a.iter().sum::<u64>() as f64, b.iter().sum::<u64>() as f64);
    if na == 0.0 || nb == 0.0 {
        return Err(Error::InvalidParameter("empty sample".into()));
    }
    let total = na + nb;
    let mut statistic = 0.0;
    let mut categories = 0usize;
    for (&x, &y) in a.iter().zip(b) {
        let col = (x + y) as f64;
        if col == 0.0 {
            continue;
        }
        categories += 1;
        let (ea, eb) = (na * col / total, nb * col / total);
        statistic += (x as f64 - ea).powi(2) / ea + (y as f64 - eb).powi(2) / eb;
    }
    let df = categories.saturating_sub(1);
    let p_value = if df == 0 {
        1.0
    } else {
        1.0 - ChiSquared::new(df as f64).unwrap().cdf(statistic)
    };
    Ok(ChiSquareTest {
        statistic,
        degrees_of_freedom: df,
        p_value,
    })
}

/// Index of a sorted pair `i < j` of `0..n` in lexicographic order.
pub fn pair_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}
