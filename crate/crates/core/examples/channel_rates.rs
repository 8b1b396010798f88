//! Path loss, noise floor and the two NOMA rates on one channel.
//!
//! cargo run --example channel_rates

use noma_sched::channel::{noise_power_w, noma_rates, pathloss_db, pathloss_gain, Transmitter};

fn main() -> noma_sched::Result<()> {
    let bandwidth = 10e6;
    let noise = noise_power_w(-174.0, bandwidth);
    println!("noise over {:.0} MHz: {:.2} dBm", bandwidth / 1e6, 10.0 * (noise * 1e3).log10());

    let near_km = 0.012;
    let far_km = 0.068;
    let (pl_near, pl_far) = (pathloss_db(near_km)?, pathloss_db(far_km)?);
    println!("path loss: near {pl_near:.1} dB, far {pl_far:.1} dB");

    let near = Transmitter { ue: 0, gain_sq: pathloss_gain(pl_near), power_w: 0.08 };
    let far = Transmitter { ue: 1, gain_sq: pathloss_gain(pl_far), power_w: 0.08 };

    let alone = noma_rates(&[far], noise, bandwidth)?;
    let shared = noma_rates(&[near, far], noise, bandwidth)?;
    println!("far UE alone:      {:8.2} Mb/s", alone[0] / 1e6);
    println!("sharing the channel:");
    println!("  near (decoded first, sees far as interference) {:8.2} Mb/s", shared[0] / 1e6);
    println!("  far  (decoded after cancellation)              {:8.2} Mb/s", shared[1] / 1e6);
    Ok(())
}
