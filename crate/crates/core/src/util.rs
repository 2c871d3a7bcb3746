//! Small numeric helpers shared by the simulation modules.

/// splitmix64 mixing step. Used to derive independent stream identifiers.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Mixes a sequence of integers into a single stream identifier.
pub fn stream_id(parts: &[u64]) -> u64 {
    let mut acc = 0x51_7c_c1_b7_27_22_0a_95u64;
    for &p in parts {
        acc = splitmix64(acc ^ p);
    }
    acc
}

/// Sums values in a canonical order: the result depends only on the multiset
/// of inputs, never on their arrangement or on thread count.
///
/// Used wherever a sum ranges over particles, so that permuting the particle
/// order (or changing the parallel schedule that produced the addends)
/// reproduces the same bits.
pub fn ordered_sum(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    sorted.iter().sum()
}

/// Mean over a canonical-order sum. Empty input returns 0.
pub fn ordered_mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    ordered_sum(values) / values.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordered_sum_is_permutation_invariant() {
        let v = vec![1.0e16, 1.0, -1.0e16, 3.5, 0.1, -7.25, 1e-9];
        let mut w = v.clone();
        w.reverse();
        w.swap(1, 4);
        assert_eq!(ordered_sum(&v).to_bits(), ordered_sum(&w).to_bits());
    }

    #[test]
    fn stream_id_separates_parts() {
        assert_ne!(stream_id(&[1, 2]), stream_id(&[2, 1]));
        assert_ne!(stream_id(&[0]), stream_id(&[0, 0]));
    }
}
