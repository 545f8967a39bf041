const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of one trial, a pure function of its coordinates so trials can run
/// in any order.
pub fn child_seed(master: u64, snr_index: usize, trial_index: usize) -> u64 {
    let a = splitmix64(master);
    let b = splitmix64(a ^ (snr_index as u64).wrapping_mul(GOLDEN));
    splitmix64(b ^ splitmix64(trial_index as u64))
}
