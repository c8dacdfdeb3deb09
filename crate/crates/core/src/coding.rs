//! Elias-gamma prefix code for positive integers.

/// Length in bits of the gamma code of `n ≥ 1`: `2⌊log₂ n⌋ + 1`.
pub fn gamma_len(n: u64) -> u32 {
    assert!(n >= 1, "gamma code is defined for n ≥ 1");
    2 * (63 - n.leading_zeros()) + 1
}

/// Gamma code of `n ≥ 1`: `⌊log₂ n⌋` zeros followed by `n` in binary.
pub fn gamma_encode(n: u64) -> Vec<bool> {
    assert!(n >= 1, "gamma code is defined for n ≥ 1");
    let width = 64 - n.leading_zeros();
    let mut bits = vec![false; (width - 1) as usize];
    bits.extend((0..width).rev().map(|i| (n >> i) & 1 == 1));
    bits
}

/// Decodes one gamma codeword from the front of `bits`; returns the value
/// and the number of bits consumed, or `None` if `bits` ends mid-codeword.
pub fn gamma_decode(bits: &[bool]) -> Option<(u64, usize)> {
    let zeros = bits.iter().position(|&b| b)?;
    if zeros >= 64 || bits.len() < 2 * zeros + 1 {
        return None;
    }
    let value = bits[zeros..=2 * zeros]
        .iter()
        .fold(0u64, |acc, &b| (acc << 1) | b as u64);
    Some((value, 2 * zeros + 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn length_table() {
        let lens: Vec<u32> = (1..=9).map(gamma_len).collect();
        assert_eq!(lens, [1, 3, 3, 5, 5, 5, 5, 7, 7]);
    }

    #[test]
    fn known_codewords() {
        let s = |v: Vec<bool>| v.iter().map(|&b| if b { '1' } else { '0' }).collect::<String>();
        assert_eq!(s(gamma_encode(1)), "1");
        assert_eq!(s(gamma_encode(2)), "010");
        assert_eq!(s(gamma_encode(3)), "011");
        assert_eq!(s(gamma_encode(4)), "00100");
    }

    #[test]
    fn truncated_codeword() {
        assert_eq!(gamma_decode(&[false, false, true]), None);
        assert_eq!(gamma_decode(&[false, false]), None);
    }

    proptest! {
        #[test]
        fn decode_inverts_encode(n in 1u64..1_000_000, tail in proptest::collection::vec(any::<bool>(), 0..8)) {
            let mut bits = gamma_encode(n);
            prop_assert_eq!(bits.len() as u32, gamma_len(n));
            let len = bits.len();
            bits.extend(tail);
            prop_assert_eq!(gamma_decode(&bits), Some((n, len)));
        }
    }
}
