//! Stable seed derivation. Seeds depend only on their inputs, never on
//! execution order, so trials can run in any order or in parallel.

/// SplitMix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Folds `parts` into a single well-mixed seed.
pub fn derive(parts: &[u64]) -> u64 {
    parts.iter().fold(0x6a09_e667_f3bc_c908, |acc, &p| mix(acc ^ mix(p)))
}

/// 64-bit FNV-1a of a label, for mixing names into seeds.
pub fn label_hash(label: &str) -> u64 {
    label
        .bytes()
        .fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

/// Seed of the problem instance (matrix, signal, noise) at one sweep point.
/// Every algorithm at that point sees the same instance.
pub fn instance_seed(base_seed: u64, point: &[u64], trial: usize) -> u64 {
    let mut parts = Vec::with_capacity(point.len() + 2);
    parts.push(base_seed);
    parts.extend_from_slice(point);
    parts.push(trial as u64);
    derive(&parts)
}

/// Seed reported on a trial record: the instance seed tagged with the
/// algorithm.
pub fn record_seed(instance: u64, algorithm: &str) -> u64 {
    derive(&[instance, label_hash(algorithm)])
}

/// Independent stream for one component of an instance.
pub fn component_seed(instance: u64, component: &str) -> u64 {
    derive(&[instance, label_hash(component), 0x5eed])
}
