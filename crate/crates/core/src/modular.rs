//! Tripling on numerators modulo `3^q − 1`.

pub(crate) fn pow3(q: usize) -> u64 {
    3u64.pow(q as u32)
}

/// Least `j ≥ 1` with `3^j k ≡ k (mod n)`, where `n = 3^q − 1`.
pub(crate) fn exact_period(k: u64, n: u64) -> usize {
    let mut x = k * 3 % n;
    let mut j = 1;
    while x != k {
        x = x * 3 % n;
        j += 1;
    }
    j
}
