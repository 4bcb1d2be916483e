use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::ServiceError;

/// Balanced task assignment.
///
/// Each participant receives the `k` snippets with the lowest coverage so
/// far; ties are broken by a fresh shuffle drawn from a seeded stream. The
/// result depends only on the seed and the registration order, and coverage
/// never differs by more than one across snippets.
#[derive(Debug, Clone)]
pub struct Assigner {
    rng: ChaCha8Rng,
    coverage: Vec<usize>,
    per_participant: usize,
}

impl Assigner {
    pub fn new(seed: u64, snippet_count: usize, per_participant: usize) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            coverage: vec![0; snippet_count],
            per_participant,
        }
    }

    pub fn coverage(&self) -> &[usize] {
        &self.coverage
    }

    /// Snippet indices for the next participant.
    pub fn next(&mut self) -> Result<Vec<usize>, ServiceError> {
        let n = self.coverage.len();
        if self.per_participant > n || self.per_participant == 0 {
            return Err(ServiceError::CorpusExhausted {
                needed: self.per_participant,
                available: n,
            });
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut self.rng);
        // Stable sort keeps the shuffled order among equal coverage.
        order.sort_by_key(|&i| self.coverage[i]);
        order.truncate(self.per_participant);
        for &i in &order {
            self.coverage[i] += 1;
        }
        order.sort_unstable();
        Ok(order)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_balance() {
        let mut a = Assigner::new(1, 16, 4);
        let mut seen = vec![];
        for _ in 0..4 {
            seen.extend(a.next().unwrap());
        }
        seen.sort();
        assert_eq!(seen, (0..16).collect::<Vec<_>>());
    }

    #[test]
    fn single_snippet() {
        let mut a = Assigner::new(1, 1, 1);
        for _ in 0..5 {
            assert_eq!(a.next().unwrap(), vec![0]);
        }
    }

    #[test]
    fn balancing_bound() {
        let mut a = Assigner::new(7, 16, 4);
        for _ in 0..27 {
            let t = a.next().unwrap();
            assert_eq!(t.len(), 4);
            assert!(t.windows(2).all(|w| w[0] < w[1]));
        }
        // floor(27 * 4 / 16) = 6
        assert!(a.coverage().iter().all(|&c| (6..=7).contains(&c)));
        assert_eq!(a.coverage().iter().sum::<usize>(), 108);
    }

    #[test]
    fn seeded_and_exhaustible() {
        let run = |seed| {
            let mut a = Assigner::new(seed, 10, 3);
            (0..5).map(|_| a.next().unwrap()).collect::<Vec<_>>()
        };
        assert_eq!(run(3), run(3));
        assert_ne!(run(3), run(4));
        assert!(matches!(
            Assigner::new(0, 2, 3).next(),
            Err(ServiceError::CorpusExhausted { needed: 3, available: 2 })
        ));
    }
}
