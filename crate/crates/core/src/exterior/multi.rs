//! Multi-indices as bitmasks (bit i set ⇔ dx_i present, increasing order implied).

pub fn bits(mask: u32) -> Vec<usize> {
    let mut out = Vec::with_capacity(mask.count_ones() as usize);
    let mut m = mask;
    while m != 0 {
        out.push(m.trailing_zeros() as usize);
        m &= m - 1;
    }
    out
}

pub fn mask_of(idx: &[usize]) -> u32 {
    idx.iter().fold(0, |m, &i| m | (1 << i))
}

/// Sign of dx_a ∧ dx_b relative to dx_{a∪b}; 0 when they overlap.
pub fn wedge_sign(a: u32, b: u32) -> f64 {
    if a & b != 0 {
        return 0.0;
    }
    let mut swaps = 0u32;
    let mut m = b;
    while m != 0 {
        let j = m.trailing_zeros();
        m &= m - 1;
        swaps += (a >> (j + 1)).count_ones();
    }
    if swaps % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Sign of an index sequence relative to its sorted order; 0 on repeats.
pub fn perm_sign(seq: &[usize]) -> f64 {
    let mut s = 1.0;
    for i in 0..seq.len() {
        for j in i + 1..seq.len() {
            if seq[i] == seq[j] {
                return 0.0;
            }
            if seq[i] > seq[j] {
                s = -s;
            }
        }
    }
    s
}

/// All k-subsets of 0..n as masks, in increasing numeric order.
pub fn subsets(n: usize, k: usize) -> Vec<u32> {
    (0u32..(1u32 << n)).filter(|m| m.count_ones() as usize == k).collect()
}

pub fn full(n: usize) -> u32 {
    if n == 32 {
        u32::MAX
    } else {
        (1u32 << n) - 1
    }
}

pub fn label(mask: u32) -> String {
    bits(mask).iter().map(|b| b.to_string()).collect::<Vec<_>>().join("")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wedge_sign_matches_permutation_sign() {
        for a in 0u32..64 {
            for b in 0u32..64 {
                let mut seq = bits(a);
                seq.extend(bits(b));
                assert_eq!(wedge_sign(a, b), perm_sign(&seq), "{a} {b}");
            }
        }
    }
}
