//! Progression-free subsets of `[N]`: testing, counting, exact extremal
//! values and constructions.

mod behrend;
pub mod cache;
mod search;

pub use behrend::{behrend_set, behrend_set_auto, default_behrend_dimension};
pub use search::{exact_r3, exact_r3_with_limit, R3Method, R3Record, R3Solver, DEFAULT_N_MAX, HARD_N_MAX};

use rand::seq::SliceRandom;
use rand::Rng;

use crate::field::IntervalSet;

/// True iff no pair `a < b` in `A` has its midpoint in `A`.
pub fn is_3ap_free(a: &IntervalSet) -> bool {
    let members = a.to_vec();
    for (i, &x) in members.iter().enumerate() {
        for &y in &members[i + 1..] {
            if (x + y) % 2 == 0 && a.contains((x + y) / 2) {
                return false;
            }
        }
    }
    true
}

/// `T₃(A)`: number of `(a, a+d, a+2d) ⊆ A` with `d ≥ 1`.
///
/// For each difference the three shifted bitsets are intersected a word at a
/// time, so the cost is about `N² / 128` word operations.
pub fn count_3aps(a: &IntervalSet) -> u64 {
    let n = a.n();
    let words = n.div_ceil(64);
    let mut total = 0u64;
    for d in 1..=(n.saturating_sub(1) / 2) {
        let limit = n - 2 * d;
        let full_words = limit / 64;
        for w in 0..full_words {
            let base = w * 64;
            total += (a.window(base) & a.window(base + d) & a.window(base + 2 * d)).count_ones() as u64;
        }
        let rest = limit % 64;
        if rest > 0 && full_words < words {
            let base = full_words * 64;
            let mask = (1u64 << rest) - 1;
            total += (a.window(base) & a.window(base + d) & a.window(base + 2 * d) & mask).count_ones() as u64;
        }
    }
    total
}

/// Straightforward `O(N²)` count over `(a, d)`; the reference for
/// [`count_3aps`].
pub fn count_3aps_reference(a: &IntervalSet) -> u64 {
    let n = a.n();
    let mut total = 0;
    for start in 1..=n {
        let mut d = 1;
        while start + 2 * d <= n {
            if a.contains(start) && a.contains(start + d) && a.contains(start + 2 * d) {
                total += 1;
            }
            d += 1;
        }
    }
    total
}

/// Scan `1..=N` ascending and keep every element that closes no progression.
///
/// This yields the numbers whose base-3 expansion of `a − 1` uses only the
/// digits 0 and 1.
pub fn greedy_3ap_free(n: usize) -> IntervalSet {
    let mut set = IntervalSet::empty(n);
    let mut forbidden = IntervalSet::empty(n);
    let mut members = Vec::new();
    for a in 1..=n {
        if forbidden.contains(a) {
            continue;
        }
        for &b in &members {
            let c = 2 * a - b;
            if c <= n {
                forbidden.set_bit(c);
            }
        }
        members.push(a);
        set.set_bit(a);
    }
    set
}

/// A maximal progression-free set built greedily in a uniformly random
/// order. Used to generate varied test corpora.
pub fn random_3ap_free<R: Rng + ?Sized>(n: usize, rng: &mut R) -> IntervalSet {
    let mut order: Vec<usize> = (1..=n).collect();
    order.shuffle(rng);
    let mut set = IntervalSet::empty(n);
    let mut members: Vec<usize> = Vec::new();
    for a in order {
        if can_add(&set, &members, a) {
            set.set_bit(a);
            members.push(a);
        }
    }
    set
}

fn can_add(set: &IntervalSet, members: &[usize], a: usize) -> bool {
    let a = a as i64;
    members.iter().all(|&b| {
        let b = b as i64;
        let mid_ok = (a + b) % 2 != 0 || !set.contains_i64((a + b) / 2);
        mid_ok && !set.contains_i64(2 * b - a) && !set.contains_i64(2 * a - b)
    })
}
