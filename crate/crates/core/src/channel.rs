//! Large-scale path loss, Rayleigh block fading and the two-user NOMA/SIC
//! achievable-rate model.
//!
//! Gains are carried as linear power gains `|h|^2 = |g|^2 * beta`, where
//! `|g|^2` is the small-scale power (unit-mean exponential under Rayleigh
//! fading) and `beta = 10^(-PL/10)`.

use rand::Rng;
use rand_distr::Exp1;

use crate::config::ChannelConfig;
use crate::error::{Error, Result};

/// `intercept + slope * log10(d)` with `d` in kilometres.
pub fn pathloss_db(distance_km: f64) -> Result<f64> {
    pathloss_db_with(&ChannelConfig::default(), distance_km)
}

pub fn pathloss_db_with(cfg: &ChannelConfig, distance_km: f64) -> Result<f64> {
    if !(distance_km > 0.0) {
        return Err(Error::NonPositiveDistance(distance_km));
    }
    Ok(cfg.pathloss_intercept_db + cfg.pathloss_slope_db * distance_km.log10())
}

/// Linear large-scale gain for a path loss in dB.
pub fn pathloss_gain(pathloss_db: f64) -> f64 {
    10f64.powf(-pathloss_db / 10.0)
}

/// Thermal noise power in watts over `bandwidth_hz`.
pub fn noise_power_w(psd_dbm_hz: f64, bandwidth_hz: f64) -> f64 {
    let dbm = psd_dbm_hz + 10.0 * bandwidth_hz.log10();
    10f64.powf((dbm - 30.0) / 10.0)
}

/// Per-slot power gains `|h_{n,m}|^2`, row-major `n_ues x n_channels`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    n_channels: usize,
    gain_sq: Vec<f64>,
    pub noise_power_w: f64,
}

impl ChannelRealization {
    pub fn from_rows(rows: Vec<Vec<f64>>, noise_power_w: f64) -> Self {
        let n_channels = rows.first().map_or(0, Vec::len);
        debug_assert!(rows.iter().all(|r| r.len() == n_channels));
        Self {
            n_channels,
            gain_sq: rows.into_iter().flatten().collect(),
            noise_power_w,
        }
    }

    pub fn gain(&self, ue: usize, channel: usize) -> f64 {
        self.gain_sq[ue * self.n_channels + channel]
    }

    pub fn row(&self, ue: usize) -> &[f64] {
        &self.gain_sq[ue * self.n_channels..(ue + 1) * self.n_channels]
    }

    pub fn n_ues(&self) -> usize {
        self.gain_sq.len().checked_div(self.n_channels).unwrap_or(0)
    }

    pub fn n_channels(&self) -> usize {
        self.n_channels
    }
}

/// Draws one block-fading realization. `large_scale[n]` is `beta_n`.
///
/// Exactly `n * m` exponential draws are consumed regardless of the inputs so
/// the caller's random stream stays aligned across schedulers.
pub fn sample_fading<R: Rng + ?Sized>(
    large_scale: &[f64],
    n_channels: usize,
    rayleigh: bool,
    noise_power_w: f64,
    rng: &mut R,
) -> ChannelRealization {
    let mut gain_sq = Vec::with_capacity(large_scale.len() * n_channels);
    for &beta in large_scale {
        for _ in 0..n_channels {
            let g: f64 = rng.sample(Exp1);
            gain_sq.push(if rayleigh { g * beta } else { beta });
        }
    }
    ChannelRealization {
        n_channels,
        gain_sq,
        noise_power_w,
    }
}

/// One transmitter sharing a channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transmitter {
    pub ue: usize,
    pub gain_sq: f64,
    pub power_w: f64,
}

/// Achievable rates (bps) for one or two co-channel transmitters, returned in
/// input order.
///
/// With two users the stronger one (larger `|h|^2`, lower id on a tie) is
/// decoded first while the weaker one interferes; the weaker one is then
/// decoded interference-free after cancellation.
pub fn noma_rates(users: &[Transmitter], noise_power_w: f64, bandwidth_hz: f64) -> Result<Vec<f64>> {
    if !(bandwidth_hz > 0.0) {
        return Err(Error::Bandwidth(bandwidth_hz));
    }
    let shannon = |signal: f64, interference: f64| {
        bandwidth_hz * (1.0 + signal / (noise_power_w + interference)).log2()
    };
    match users {
        [only] => Ok(vec![shannon(only.gain_sq * only.power_w, 0.0)]),
        [a, b] => {
            let a_strong = a.gain_sq > b.gain_sq || (a.gain_sq == b.gain_sq && a.ue < b.ue);
            let (strong, weak) = if a_strong { (a, b) } else { (b, a) };
            let strong_rate = shannon(strong.gain_sq * strong.power_w, weak.gain_sq * weak.power_w);
            let weak_rate = shannon(weak.gain_sq * weak.power_w, 0.0);
            Ok(if a_strong {
                vec![strong_rate, weak_rate]
            } else {
                vec![weak_rate, strong_rate]
            })
        }
        _ => Err(Error::Occupancy(users.len())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn pathloss_reference_points() {
        assert_relative_eq!(pathloss_db(1.0).unwrap(), 128.1, epsilon = 1e-12);
        assert_relative_eq!(pathloss_db(0.1).unwrap(), 90.5, epsilon = 1e-12);
        assert_relative_eq!(pathloss_db(0.01).unwrap(), 52.9, epsilon = 1e-12);
        assert!(pathloss_db(0.0).is_err());
        assert!(pathloss_db(-1.0).is_err());
    }

    #[test]
    fn noise_power_reference_points() {
        assert_relative_eq!(noise_power_w(-174.0, 1e7), 10f64.powf(-13.4), max_relative = 1e-12);
        assert_relative_eq!(noise_power_w(-174.0, 1.0), 10f64.powf(-20.4), max_relative = 1e-12);
        // 10 log10(3e7) = 74.77121254719662
        let dbm = 10.0 * noise_power_w(-174.0, 3e7).log10() + 30.0;
        assert_relative_eq!(dbm, -99.228_787_452_803_38, epsilon = 1e-9);
    }

    #[test]
    fn large_scale_gain_at_one_km() {
        let beta = pathloss_gain(pathloss_db(1.0).unwrap());
        assert_relative_eq!(beta, 10f64.powf(-12.81), max_relative = 1e-12);
    }

    #[test]
    fn fading_is_unit_mean_and_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let real = sample_fading(&[1.0; 1000], 1000, true, 1.0, &mut rng);
        let mean: f64 = (0..1000)
            .flat_map(|n| real.row(n).to_vec())
            .sum::<f64>()
            / 1e6;
        assert!((mean - 1.0).abs() < 0.01, "mean {mean}");

        let a = sample_fading(&[1e-9, 2e-9], 3, true, 1.0, &mut ChaCha8Rng::seed_from_u64(5));
        let b = sample_fading(&[1e-9, 2e-9], 3, true, 1.0, &mut ChaCha8Rng::seed_from_u64(5));
        assert_eq!(a, b);
        assert!(a.row(0).iter().all(|&g| g >= 0.0));
    }

    #[test]
    fn single_user_is_shannon() {
        let tx = Transmitter { ue: 0, gain_sq: 1.0, power_w: 1.0 };
        let r = noma_rates(&[tx], 1.0, 1e6).unwrap();
        assert_eq!(r[0], 1e6);
    }

    #[test]
    fn two_user_hand_case() {
        let strong = Transmitter { ue: 4, gain_sq: 3.0, power_w: 1.0 };
        let weak = Transmitter { ue: 1, gain_sq: 1.0, power_w: 1.0 };
        let r = noma_rates(&[weak, strong], 1.0, 1.0).unwrap();
        assert_relative_eq!(r[1], 2.5f64.log2(), max_relative = 1e-12);
        assert_relative_eq!(r[0], 1.0, max_relative = 1e-12);
    }

    #[test]
    fn silent_partner_leaves_strong_rate_unchanged() {
        let strong = Transmitter { ue: 0, gain_sq: 2.0, power_w: 0.5 };
        let weak = Transmitter { ue: 1, gain_sq: 0.0, power_w: 0.5 };
        let alone = noma_rates(&[strong], 0.1, 1e3).unwrap()[0];
        let paired = noma_rates(&[strong, weak], 0.1, 1e3).unwrap();
        assert_eq!(paired[0], alone);
        assert_eq!(paired[1], 0.0);
    }

    #[test]
    fn tie_goes_to_lower_id() {
        let a = Transmitter { ue: 2, gain_sq: 1.0, power_w: 1.0 };
        let b = Transmitter { ue: 7, gain_sq: 1.0, power_w: 1.0 };
        let ab = noma_rates(&[a, b], 1.0, 1.0).unwrap();
        let ba = noma_rates(&[b, a], 1.0, 1.0).unwrap();
        // UE 2 is decoded first, under interference.
        assert_relative_eq!(ab[0], 1.5f64.log2());
        assert_eq!(ab[0], ba[1]);
        assert_eq!(ab[1], ba[0]);
    }

    #[test]
    fn rejects_bad_occupancy_and_bandwidth() {
        let t = Transmitter { ue: 0, gain_sq: 1.0, power_w: 1.0 };
        assert!(matches!(noma_rates(&[], 1.0, 1.0), Err(Error::Occupancy(0))));
        assert!(matches!(noma_rates(&[t, t, t], 1.0, 1.0), Err(Error::Occupancy(3))));
        assert!(matches!(noma_rates(&[t], 1.0, 0.0), Err(Error::Bandwidth(_))));
    }
}
