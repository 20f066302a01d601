//! Brute-force references sharing no code with the library.

#![allow(dead_code)]

/// `true` iff the subset of `[n]` encoded by `mask` (bit `a − 1` for `a`)
/// is free of nontrivial 3-term progressions.
pub fn mask_is_free(mask: u64, n: usize) -> bool {
    (1..=n / 2).all(|d| mask & (mask >> d) & (mask >> (2 * d)) == 0)
}

/// `(r₃(n), lexicographically least maximum witness)` by enumerating all
/// `2^n` subsets.
pub fn r3_by_enumeration(n: usize) -> (usize, Vec<usize>) {
    assert!(n <= 24, "enumeration is exponential");
    let mut best: Option<(usize, Vec<usize>)> = None;
    for mask in 0u64..(1 << n) {
        let size = mask.count_ones() as usize;
        if best.as_ref().is_some_and(|(s, _)| size < *s) || !mask_is_free(mask, n) {
            continue;
        }
        let members: Vec<usize> = (1..=n).filter(|&a| mask >> (a - 1) & 1 == 1).collect();
        let better = match &best {
            None => true,
            Some((s, w)) => size > *s || members < *w,
        };
        if better {
            best = Some((size, members));
        }
    }
    best.expect("the empty set is always free")
}

/// Ordered progression count `#{(x, d) ∈ Z_p² : x, x+d, x+2d ∈ A}`.
pub fn ordered_progressions_mod_p(a: &[usize], p: usize) -> u64 {
    let mut member = vec![false; p];
    for &x in a {
        member[x % p] = true;
    }
    let mut count = 0;
    for x in 0..p {
        for d in 0..p {
            if member[x] && member[(x + d) % p] && member[(x + 2 * d) % p] {
                count += 1;
            }
        }
    }
    count
}

/// `#{(a, d) : d ≥ 1, a, a+d, a+2d ∈ A}` over the integers.
pub fn t3_integers(a: &[usize]) -> u64 {
    let set: std::collections::HashSet<usize> = a.iter().copied().collect();
    let mut count = 0;
    for &x in a {
        for &y in a {
            if y > x && set.contains(&(2 * y - x)) {
                count += 1;
            }
        }
    }
    count
}
