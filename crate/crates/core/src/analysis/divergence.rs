use crate::{AttentionVector, Scalar};

use super::AnalysisError;

/// Jensen–Shannon divergence in bits between two non-negative vectors, after
/// normalising each to sum to one. Lies in `[0, 1]`.
pub fn jsd_slices<F: Scalar>(a: &[F], b: &[F]) -> Result<F, AnalysisError> {
    if a.len() != b.len() {
        return Err(AnalysisError::LengthMismatch(a.len(), b.len()));
    }
    let (sa, sb): (F, F) = (a.iter().copied().sum(), b.iter().copied().sum());
    if !(sa > F::zero()) || !(sb > F::zero()) {
        return Err(AnalysisError::ZeroMass);
    }
    let half = F::from_f64_lossy(0.5);
    // p·log2(p/m), zero when p is zero.
    let term = |p: F, m: F| {
        if p > F::zero() {
            p * (p / m).log2()
        } else {
            F::zero()
        }
    };
    let mut total = F::zero();
    for (&x, &y) in a.iter().zip(b) {
        let (p, q) = (x / sa, y / sb);
        let m = (p + q) * half;
        // Addition commutes, so swapping the inputs gives the same bits.
        total = total + (term(p, m) + term(q, m)) * half;
    }
    Ok(total.max(F::zero()).min(F::one()))
}

pub fn jsd<F: Scalar>(a: &AttentionVector<F>, b: &AttentionVector<F>) -> Result<F, AnalysisError> {
    jsd_slices(a.weights(), b.weights())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn reference_values() {
        assert_eq!(jsd_slices(&[0.2, 0.3, 0.5], &[0.2, 0.3, 0.5]).unwrap(), 0.0);
        assert_eq!(jsd_slices(&[1.0, 0.0], &[0.0, 2.0]).unwrap(), 1.0);
        let v: f64 = jsd_slices(&[1.0, 1.0, 0.0], &[0.0, 1.0, 1.0]).unwrap();
        assert!((v - 0.5).abs() < 1e-12);
        // Scale does not matter.
        assert_eq!(jsd_slices(&[1.0, 3.0], &[2.0, 6.0]).unwrap(), 0.0);
    }

    #[test]
    fn zero_mass() {
        assert_eq!(jsd_slices(&[0.0, 0.0], &[1.0, 0.0]).unwrap_err(), AnalysisError::ZeroMass);
    }

    proptest! {
        #[test]
        fn symmetric_and_bounded(a in prop::collection::vec(0.0f64..1.0, 1..40), shift in 0usize..40) {
            let b: Vec<f64> = (0..a.len()).map(|i| a[(i + shift) % a.len()]).collect();
            prop_assume!(a.iter().sum::<f64>() > 0.0);
            let ab = jsd_slices(&a, &b).unwrap();
            let ba = jsd_slices(&b, &a).unwrap();
            prop_assert_eq!(ab, ba);
            prop_assert!((0.0..=1.0).contains(&ab));
        }
    }
}
