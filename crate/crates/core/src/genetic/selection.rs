//! Rank-roulette parent selection and elitist replacement.

use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;

/// Linear rank weights for a population sorted best first: the best of `n`
/// gets weight `n`, the worst gets 1.
pub fn rank_weights(n: usize) -> Vec<usize> {
    (1..=n).rev().collect()
}

/// Roulette wheel over ranks, built once per generation.
#[derive(Clone, Debug)]
pub struct RankWheel {
    dist: WeightedIndex<usize>,
}

impl RankWheel {
    /// `n` must be at least 1.
    pub fn new(n: usize) -> Self {
        RankWheel {
            dist: WeightedIndex::new(rank_weights(n)).expect("population is nonempty"),
        }
    }

    /// Rank (0 = best) of the selected parent.
    pub fn select_parent<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        self.dist.sample(rng)
    }
}

/// Number of elites kept: `ceil(fraction * size)`.
pub fn elite_count(population_size: usize, elite_fraction: f64) -> usize {
    let raw = elite_fraction * population_size as f64;
    // Guard against 0.1 * 100 = 10.000000000000002.
    ((raw - 1e-9).ceil().max(0.0) as usize).min(population_size)
}

/// New generation: the first `elites` of `ranked` (sorted best first) followed
/// by as many children as fill the original size.
pub fn replace_generation<T: Clone>(ranked: &[T], children: Vec<T>, elites: usize) -> Vec<T> {
    let size = ranked.len();
    let mut next: Vec<T> = ranked[..elites.min(size)].to_vec();
    next.extend(children.into_iter().take(size - next.len()));
    next
}
