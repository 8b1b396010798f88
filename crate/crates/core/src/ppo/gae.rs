use crate::error::{Error, Result};

/// Generalized advantage estimates and value targets for one trajectory
/// segment.
///
/// `values` has one more entry than `rewards`: the last is the bootstrap
/// value of the state after the segment, 0 if the segment ended the episode.
/// Returns `(advantages, returns)` with `returns = advantages + values`.
pub fn gae(rewards: &[f64], values: &[f64], gamma: f64, lambda: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    if values.len() != rewards.len() + 1 {
        return Err(Error::LengthMismatch {
            expected: rewards.len() + 1,
            got: values.len(),
        });
    }
    let mut adv = vec![0.0; rewards.len()];
    let mut acc = 0.0;
    for t in (0..rewards.len()).rev() {
        let delta = rewards[t] + gamma * values[t + 1] - values[t];
        acc = delta + gamma * lambda * acc;
        adv[t] = acc;
    }
    let returns = adv.iter().zip(values).map(|(a, v)| a + v).collect();
    Ok((adv, returns))
}

/// Shifts and scales to zero mean and unit (population) standard deviation.
/// A constant input becomes all zeros.
pub fn normalize(xs: &mut [f64]) {
    if xs.is_empty() {
        return;
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    let std = var.sqrt().max(1e-8);
    for x in xs {
        *x = (*x - mean) / std;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_step_example() {
        let (adv, ret) = gae(&[1.0, 1.0], &[0.0, 0.0, 0.0], 0.9, 0.8).unwrap();
        assert!((adv[1] - 1.0).abs() < 1e-12);
        assert!((adv[0] - 1.72).abs() < 1e-12);
        assert_eq!(adv, ret);
    }

    #[test]
    fn lambda_one_is_discounted_return_minus_value() {
        let r = [0.5, -1.0, 2.0];
        let v = [0.1, 0.2, 0.3, 0.0];
        let (adv, _) = gae(&r, &v, 0.95, 1.0).unwrap();
        let g0 = 0.5 - 0.95 + 0.95 * 0.95 * 2.0;
        assert!((adv[0] - (g0 - 0.1)).abs() < 1e-12);
    }

    #[test]
    fn length_is_checked() {
        assert!(gae(&[1.0], &[0.0], 0.9, 0.9).is_err());
    }

    #[test]
    fn normalize_constant_is_zero() {
        let mut xs = [2.0; 4];
        normalize(&mut xs);
        assert_eq!(xs, [0.0; 4]);
        let mut ys = [1.0, 3.0];
        normalize(&mut ys);
        assert_eq!(ys, [-1.0, 1.0]);
    }
}
