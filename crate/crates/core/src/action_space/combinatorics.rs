use crate::error::{Error, Result};

pub fn binomial(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul(u128::from(n - i))? / u128::from(i + 1);
    }
    Some(acc)
}

/// `n! / (n - k)!`
pub fn permutations(n: u128, k: u128) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    (0..k).try_fold(1u128, |acc, i| acc.checked_mul(n - i))
}

/// Size of the unreduced action space: `C = binom(N + 1, 2)` UE pairs
/// (the extra element stands for "no UE"), arranged on `M` channels,
/// giving `C! / (C - M)!` actions.
pub fn count_full_actions(n_ues: usize, n_channels: usize) -> Result<u128> {
    let c = binomial(n_ues as u64 + 1, 2)
        .ok_or_else(|| Error::ActionSpace("pair count overflows".into()))?;
    if n_channels as u128 > c {
        return Err(Error::ActionSpace(format!(
            "{n_channels} channels exceed the {c} available pairs"
        )));
    }
    permutations(c, n_channels as u128)
        .ok_or_else(|| Error::ActionSpace("action count overflows u128".into()))
}
