use rand::Rng;

use crate::error::{Error, Result};

/// Categorical distribution over the unmasked logits.
///
/// Masked actions have probability exactly 0 and log-probability `-inf`.
#[derive(Debug, Clone, PartialEq)]
pub struct MaskedCategorical {
    probs: Vec<f64>,
    log_probs: Vec<f64>,
}

pub fn masked_softmax(logits: &[f64], mask: &[bool]) -> Result<MaskedCategorical> {
    if logits.len() != mask.len() {
        return Err(Error::LengthMismatch {
            expected: logits.len(),
            got: mask.len(),
        });
    }
    let max = logits
        .iter()
        .zip(mask)
        .filter(|(_, &m)| m)
        .map(|(&l, _)| l)
        .fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return Err(Error::AllMasked);
    }
    let sum: f64 = logits
        .iter()
        .zip(mask)
        .filter(|(_, &m)| m)
        .map(|(&l, _)| (l - max).exp())
        .sum();
    let log_z = max + sum.ln();
    let log_probs: Vec<f64> = logits
        .iter()
        .zip(mask)
        .map(|(&l, &m)| if m { l - log_z } else { f64::NEG_INFINITY })
        .collect();
    let probs = log_probs.iter().map(|&lp| if lp.is_finite() { lp.exp() } else { 0.0 }).collect();
    Ok(MaskedCategorical { probs, log_probs })
}

impl MaskedCategorical {
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn log_prob(&self, action: usize) -> f64 {
        self.log_probs[action]
    }

    /// Inverse-CDF draw; never returns a masked action.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let mut last = 0;
        for (i, &p) in self.probs.iter().enumerate() {
            if p > 0.0 {
                acc += p;
                last = i;
                if u < acc {
                    return i;
                }
            }
        }
        last
    }

    /// Most likely action, lowest index on ties.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, &p) in self.probs.iter().enumerate() {
            if p > self.probs[best] {
                best = i;
            }
        }
        best
    }

    pub fn entropy(&self) -> f64 {
        self.probs
            .iter()
            .zip(&self.log_probs)
            .filter(|(&p, _)| p > 0.0)
            .map(|(&p, &lp)| -p * lp)
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn masked_entries_are_exactly_zero() {
        let d = masked_softmax(&[1.0, 50.0, 2.0, 3.0], &[true, false, true, true]).unwrap();
        assert_eq!(d.probs()[1], 0.0);
        assert_eq!(d.log_prob(1), f64::NEG_INFINITY);
        let s: f64 = d.probs().iter().sum();
        assert!((s - 1.0).abs() < 1e-12);
        assert_eq!(d.argmax(), 3);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..2000 {
            assert_ne!(d.sample(&mut rng), 1);
        }
    }

    #[test]
    fn all_masked_is_an_error() {
        assert!(matches!(masked_softmax(&[0.0, 1.0], &[false, false]), Err(Error::AllMasked)));
        assert!(masked_softmax(&[0.0], &[true, true]).is_err());
    }

    #[test]
    fn uniform_entropy_is_log_k() {
        let d = masked_softmax(&[0.3; 5], &[true, true, false, true, true]).unwrap();
        assert!((d.entropy() - 4f64.ln()).abs() < 1e-12);
        assert_eq!(d.argmax(), 0);
    }

    #[test]
    fn large_logits_stay_finite() {
        let d = masked_softmax(&[1e4, 1e4 - 1.0], &[true, true]).unwrap();
        assert!(d.probs().iter().all(|p| p.is_finite()));
        assert!((d.probs()[0] - 1.0 / (1.0 + (-1f64).exp())).abs() < 1e-12);
    }
}
