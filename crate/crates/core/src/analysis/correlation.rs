use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::{AttentionVector, Scalar};

use super::AnalysisError;

/// A rank correlation with its two-sided p-value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Correlation<F> {
    pub rho: F,
    pub p_value: F,
    pub n: usize,
}

/// Anything carrying a p-value.
pub trait PValue<F> {
    fn p_value(&self) -> F;
}

impl<F: Scalar> PValue<F> for Correlation<F> {
    fn p_value(&self) -> F {
        self.p_value
    }
}

/// 1-based ranks, ties receiving the mean of the ranks they span.
pub fn average_ranks<F: Scalar>(values: &[F]) -> Vec<F> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).expect("finite values"));
    let mut ranks = vec![F::zero(); values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && values[order[j]] == values[order[i]] {
            j += 1;
        }
        // Ranks i+1 ..= j averaged.
        let rank = F::from_count((i + 1 + j) as u64) / F::from_count(2);
        for &k in &order[i..j] {
            ranks[k] = rank;
        }
        i = j;
    }
    ranks
}

/// Spearman rank correlation: Pearson correlation of average-tie ranks,
/// with a two-sided p-value from the t-distribution with n−2 degrees of
/// freedom (approximate for small n).
pub fn spearman_slices<F: Scalar>(a: &[F], b: &[F]) -> Result<Correlation<F>, AnalysisError> {
    if a.len() != b.len() {
        return Err(AnalysisError::LengthMismatch(a.len(), b.len()));
    }
    let n = a.len();
    if n < 3 {
        return Err(AnalysisError::TooShort { needed: 3, got: n });
    }
    if a.iter().chain(b).any(|v| !v.is_finite()) {
        return Err(AnalysisError::NonFinite);
    }
    let ra = average_ranks(a);
    let rb = average_ranks(b);
    // Mean rank is (n+1)/2 exactly.
    let mean = F::from_count(n as u64 + 1) / F::from_count(2);
    let (mut cov, mut va, mut vb) = (F::zero(), F::zero(), F::zero());
    for (&x, &y) in ra.iter().zip(&rb) {
        let (dx, dy) = (x - mean, y - mean);
        cov = cov + dx * dy;
        va = va + dx * dx;
        vb = vb + dy * dy;
    }
    if va == F::zero() || vb == F::zero() {
        return Err(AnalysisError::DegenerateInput);
    }
    let rho = (cov / (va * vb).sqrt()).max(-F::one()).min(F::one());
    Ok(Correlation {
        rho,
        p_value: F::from_f64_lossy(t_test_p_value(rho.to_f64_lossy(), n)),
        n,
    })
}

fn t_test_p_value(rho: f64, n: usize) -> f64 {
    let df = (n - 2) as f64;
    let denom = 1.0 - rho * rho;
    if denom <= 0.0 {
        return 0.0;
    }
    let t = rho * (df / denom).sqrt();
    let dist = StudentsT::new(0.0, 1.0, df).expect("df >= 1");
    (2.0 * dist.sf(t.abs())).clamp(0.0, 1.0)
}

/// Spearman correlation between two attention vectors over the same tokens.
pub fn spearman<F: Scalar>(
    a: &AttentionVector<F>,
    b: &AttentionVector<F>,
) -> Result<Correlation<F>, AnalysisError> {
    spearman_slices(a.weights(), b.weights())
}

/// Results split by a significance threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct Filtered<T> {
    pub kept: Vec<T>,
    pub discarded: usize,
}

/// Keeps results with `p_value <= alpha`.
pub fn significance_filter<F: Scalar, T: PValue<F>>(results: Vec<T>, alpha: F) -> Filtered<T> {
    let total = results.len();
    let kept: Vec<T> = results.into_iter().filter(|r| r.p_value() <= alpha).collect();
    Filtered {
        discarded: total - kept.len(),
        kept,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn closed_form(a: &[f64], b: &[f64]) -> f64 {
        let (ra, rb) = (average_ranks(a), average_ranks(b));
        let n = a.len() as f64;
        let d2: f64 = ra.iter().zip(&rb).map(|(x, y)| (x - y) * (x - y)).sum();
        1.0 - 6.0 * d2 / (n * (n * n - 1.0))
    }

    #[test]
    fn known_rank_case() {
        let c = spearman_slices(&[1.0, 2.0, 3.0, 4.0, 5.0], &[1.0, 3.0, 2.0, 5.0, 4.0]).unwrap();
        assert!((c.rho - 0.8f64).abs() < 1e-12);
        assert_eq!(c.n, 5);
        // scipy.stats.spearmanr reference p-value.
        assert!((c.p_value - 0.104_088_038_661_827_88f64).abs() < 1e-9);
    }

    #[test]
    fn identity_and_reversal() {
        let a = [0.3, 0.1, 0.9, 0.5];
        let c = spearman_slices(&a, &a).unwrap();
        assert_eq!(c.rho, 1.0);
        assert_eq!(c.p_value, 0.0);
        let b = [0.5, 0.9, 0.1, 0.3];
        assert_eq!(spearman_slices(&a, &b).unwrap().rho, -1.0);
    }

    #[test]
    fn ties_share_average_rank() {
        assert_eq!(average_ranks(&[2.0, 1.0, 2.0, 3.0]), vec![2.5, 1.0, 2.5, 4.0]);
    }

    #[test]
    fn p_value_matches_reference() {
        let c = spearman_slices(&[1.0, 2.0, 3.0, 4.0, 5.0], &[2.0, 1.0, 4.0, 3.0, 5.0]).unwrap();
        assert!((c.rho - 0.8f64).abs() < 1e-12);
        let c = spearman_slices(&[1.0, 2.0, 3.0, 4.0, 5.0], &[3.0, 1.0, 2.0, 5.0, 4.0]).unwrap();
        assert!((c.rho - 0.6f64).abs() < 1e-12);
        // scipy.stats.spearmanr reference p-value.
        assert!((c.p_value - 0.284_756_979_865_293_75).abs() < 1e-9, "{}", c.p_value);
    }

    #[test]
    fn degenerate_and_bad_shapes() {
        assert_eq!(
            spearman_slices(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]).unwrap_err(),
            AnalysisError::DegenerateInput
        );
        assert!(matches!(
            spearman_slices(&[1.0, 2.0], &[1.0, 2.0]),
            Err(AnalysisError::TooShort { .. })
        ));
        assert!(matches!(
            spearman_slices(&[1.0, 2.0, 3.0], &[1.0, 2.0]),
            Err(AnalysisError::LengthMismatch(3, 2))
        ));
    }

    #[test]
    fn filter_counts() {
        let mk = |p: f64| Correlation { rho: 0.5, p_value: p, n: 10 };
        let all_low: Vec<_> = (0..4).map(|_| mk(0.01)).collect();
        assert_eq!(significance_filter(all_low, 0.05).kept.len(), 4);
        let all_high: Vec<_> = (0..4).map(|_| mk(0.5)).collect();
        let f = significance_filter(all_high, 0.05);
        assert_eq!((f.kept.len(), f.discarded), (0, 4));
        let mixed: Vec<_> = [0.01, 0.2, 0.04, 0.05, 0.3, 0.001, 0.02, 0.9, 0.03, 0.049]
            .into_iter()
            .map(mk)
            .collect();
        let f = significance_filter(mixed, 0.05);
        assert_eq!((f.kept.len(), f.discarded), (7, 3));
    }

    proptest! {
        #[test]
        fn tie_free_matches_closed_form(perm in Just((0..40).collect::<Vec<u32>>()).prop_shuffle(),
                                        vals in prop::collection::vec(-1e3f64..1e3, 40)) {
            let b: Vec<f64> = perm.iter().map(|&p| p as f64).collect();
            let mut a = vals.clone();
            a.sort_by(|x, y| x.partial_cmp(y).unwrap());
            a.dedup();
            prop_assume!(a.len() == 40);
            let c = spearman_slices(&a, &b).unwrap();
            prop_assert!((c.rho - closed_form(&a, &b)).abs() < 1e-12);
        }

        #[test]
        fn symmetric_bounded_rank_invariant(a in prop::collection::vec(0.0f64..1.0, 3..50),
                                            seed in any::<u64>()) {
            let b: Vec<f64> = a.iter().enumerate()
                .map(|(i, x)| ((i as u64).wrapping_mul(seed | 1) % 97) as f64 + x)
                .collect();
            if let Ok(ab) = spearman_slices(&a, &b) {
                let ba = spearman_slices(&b, &a).unwrap();
                prop_assert_eq!(ab.rho, ba.rho);
                prop_assert!(ab.rho.abs() <= 1.0);
                prop_assert!((0.0..=1.0).contains(&ab.p_value));
                let ea: Vec<f64> = a.iter().map(|x| x.exp() * 3.0 + 1.0).collect();
                prop_assert_eq!(spearman_slices(&ea, &b).unwrap().rho, ab.rho);
            }
        }
    }
}
