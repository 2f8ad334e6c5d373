//! The index families A(n), B(n), C(n) that organize every recursion and relation.

/// An element `(k, ℓ, i)` of A(n): `k + ℓ = n + 1`, `k, ℓ ≥ 2`, `1 ≤ i ≤ k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ATriple {
    pub k: usize,
    pub l: usize,
    pub i: usize,
}

/// An element `(k, i; r₁..r_i)` of C(n): `2 ≤ k ≤ n`, `1 ≤ i ≤ k`, `Σ r + k − i = n`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CTuple {
    pub k: usize,
    pub i: usize,
    pub r: Vec<usize>,
}

/// A(n), ordered by `k` then `i`.
pub fn enum_a(n: usize) -> Vec<ATriple> {
    let mut out = Vec::new();
    for k in 2..=n.saturating_sub(1) {
        let l = n + 1 - k;
        for i in 1..=k {
            out.push(ATriple { k, l, i });
        }
    }
    out
}

/// All compositions of `n` into exactly `k` positive parts, lexicographically.
pub fn compositions_into(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return if n == 0 { vec![vec![]] } else { vec![] };
    }
    if n < k {
        return vec![];
    }
    let mut out = Vec::new();
    for first in 1..=n - (k - 1) {
        for mut rest in compositions_into(n - first, k - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// All compositions of `n` (any number of parts), ordered by part count then lexicographically.
pub fn compositions(n: usize) -> Vec<Vec<usize>> {
    (1..=n).flat_map(|k| compositions_into(n, k)).collect()
}

/// B(n): compositions of `n` into at least two parts.
pub fn enum_b(n: usize) -> Vec<Vec<usize>> {
    (2..=n).flat_map(|k| compositions_into(n, k)).collect()
}

/// C(n), ordered by `k`, then `i`, then `r` lexicographically.
pub fn enum_c(n: usize) -> Vec<CTuple> {
    let mut out = Vec::new();
    for k in 2..=n {
        for i in 1..=k {
            if n + i < k {
                continue;
            }
            for r in compositions_into(n + i - k, i) {
                out.push(CTuple { k, i, r });
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_a_sets() {
        assert!(enum_a(1).is_empty());
        assert!(enum_a(2).is_empty());
        assert_eq!(enum_a(3), vec![ATriple { k: 2, l: 2, i: 1 }, ATriple { k: 2, l: 2, i: 2 }]);
        assert_eq!(enum_a(4).len(), 5);
    }

    #[test]
    fn small_b_sets() {
        assert!(enum_b(1).is_empty());
        assert_eq!(enum_b(2), vec![vec![1, 1]]);
        assert_eq!(enum_b(3), vec![vec![1, 2], vec![2, 1], vec![1, 1, 1]]);
    }

    #[test]
    fn small_c_sets() {
        assert_eq!(enum_c(2), vec![CTuple { k: 2, i: 1, r: vec![1] }, CTuple { k: 2, i: 2, r: vec![1, 1] }]);
        assert_eq!(enum_c(3).len(), 6);
    }
}
