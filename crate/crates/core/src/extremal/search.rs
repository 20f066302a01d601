//! Exact `r₃(N)` by branch and bound.
//!
//! Values are built up incrementally: `r₃(N) ∈ {r₃(N−1), r₃(N−1) + 1}`, and
//! the table of smaller values bounds every partial assignment (the
//! undecided tail `[i, hi]` holds at most `r₃(hi − i + 1)` more elements).
//!
//! For each `N` the search first asks whether a set of size `r₃(N−1) + 1`
//! exists. Any such set must contain both 1 and `N`, so both are fixed and
//! their midpoint constraints propagate from the start. The reflection
//! `a ↦ N + 1 − a` maps solutions to solutions; only sets that are
//! lexicographically no larger than their reflection are explored, which
//! amounts to capping every interior element at `N + 1 − s₂` once the second
//! element `s₂` is chosen. If no larger set exists the search runs again for
//! size `r₃(N−1)`.
//!
//! Elements are tried in ascending order, inclusion first, so the first set
//! of the target size reached is the lexicographically least one. Witnesses
//! are therefore canonical.

use crate::field::IntervalSet;
use crate::{Error, Result};

use super::is_3ap_free;

/// Default refusal threshold for exact search.
pub const DEFAULT_N_MAX: usize = 60;
/// Width of the search bitmasks.
pub const HARD_N_MAX: usize = 128;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum R3Method {
    Exact,
    Cached,
}

/// `r₃(N)` with a maximum progression-free witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct R3Record {
    pub n: usize,
    pub value: usize,
    pub witness: IntervalSet,
    pub method: R3Method,
}

/// Incremental exact solver holding every value computed so far.
#[derive(Debug, Clone)]
pub struct R3Solver {
    limit: usize,
    /// `records[i]` is `r₃(i + 1)`.
    records: Vec<R3Record>,
}

impl Default for R3Solver {
    fn default() -> Self {
        Self::new(DEFAULT_N_MAX).expect("default limit is valid")
    }
}

impl R3Solver {
    pub fn new(limit: usize) -> Result<Self> {
        if limit > HARD_N_MAX {
            return Err(Error::InvalidArgument(format!(
                "exact-search limit {limit} exceeds the supported maximum {HARD_N_MAX}"
            )));
        }
        Ok(Self { limit, records: Vec::new() })
    }

    pub fn limit(&self) -> usize {
        self.limit
    }

    /// `r₃(N)`, computing every smaller value on the way if needed.
    pub fn solve(&mut self, n: usize) -> Result<&R3Record> {
        if n == 0 {
            return Err(Error::InvalidArgument("r3 needs N >= 1".into()));
        }
        if n > self.limit {
            return Err(Error::SearchLimit { n, limit: self.limit });
        }
        while self.records.len() < n {
            let next = self.records.len() + 1;
            let record = self.compute(next);
            self.records.push(record);
        }
        Ok(&self.records[n - 1])
    }

    pub fn value(&mut self, n: usize) -> Result<usize> {
        self.solve(n).map(|r| r.value)
    }

    /// Values computed so far, `r₃(1), r₃(2), …`.
    pub fn records(&self) -> &[R3Record] {
        &self.records
    }

    fn compute(&self, n: usize) -> R3Record {
        // r3[L] for L < n; r3[0] = 0
        let mut r3 = vec![0usize];
        r3.extend(self.records.iter().map(|r| r.value));
        let mask = if n == 1 {
            Some(1u128)
        } else {
            let prev = r3[n - 1];
            let mut search = Search::new(n, &r3);
            search.find(prev + 1, true).or_else(|| search.find(prev, false))
        }
        .expect("r3(N) is r3(N-1) or r3(N-1) + 1");
        let witness = IntervalSet::from_members(n, (1..=n).filter(|&a| mask >> (a - 1) & 1 == 1))
            .expect("mask stays inside [N]");
        debug_assert!(is_3ap_free(&witness));
        R3Record { n, value: witness.len(), witness, method: R3Method::Exact }
    }
}

/// `r₃(N)` for `N ≤ DEFAULT_N_MAX`.
pub fn exact_r3(n: usize) -> Result<R3Record> {
    exact_r3_with_limit(n, DEFAULT_N_MAX)
}

pub fn exact_r3_with_limit(n: usize, limit: usize) -> Result<R3Record> {
    R3Solver::new(limit)?.solve(n).cloned()
}

struct Search<'a> {
    n: usize,
    r3: &'a [usize],
    target: usize,
    with_last: bool,
}

#[inline]
fn bit(a: usize) -> u128 {
    1u128 << (a - 1)
}

impl<'a> Search<'a> {
    fn new(n: usize, r3: &'a [usize]) -> Self {
        Self { n, r3, target: 0, with_last: false }
    }

    /// First (lexicographically least) progression-free set of exactly
    /// `target` elements containing 1, and also `N` when `with_last`.
    fn find(&mut self, target: usize, with_last: bool) -> Option<u128> {
        self.target = target;
        self.with_last = with_last;
        let n = self.n;
        let mut chosen = bit(1);
        let mut forbidden = 0u128;
        let mut count = 1;
        let hi = if with_last {
            chosen |= bit(n);
            count += 1;
            if (1 + n) % 2 == 0 {
                forbidden |= bit(n.div_ceil(2));
            }
            n - 1
        } else {
            n
        };
        if count == target {
            return Some(chosen);
        }
        self.descend(2, hi, chosen, forbidden, count)
    }

    fn descend(&mut self, i: usize, hi: usize, chosen: u128, forbidden: u128, count: usize) -> Option<u128> {
        if i > hi {
            return None;
        }
        let need = self.target - count;
        let span = hi - i + 1;
        let window = if span == 128 { u128::MAX } else { ((1u128 << span) - 1) << (i - 1) };
        let available = (window & !forbidden).count_ones() as usize;
        if available.min(self.r3[span]) < need {
            return None;
        }
        if forbidden & bit(i) == 0 {
            let (next_chosen, next_forbidden, next_hi) = self.include(i, hi, chosen, forbidden);
            if count + 1 == self.target {
                return Some(next_chosen);
            }
            if let Some(found) = self.descend(i + 1, next_hi, next_chosen, next_forbidden, count + 1) {
                return Some(found);
            }
        }
        self.descend(i + 1, hi, chosen, forbidden, count)
    }

    fn include(&self, a: usize, hi: usize, chosen: u128, mut forbidden: u128) -> (u128, u128, usize) {
        let n = self.n;
        let mut rest = chosen;
        while rest != 0 {
            let b = rest.trailing_zeros() as usize + 1;
            rest &= rest - 1;
            if b < a {
                let c = 2 * a - b;
                if c <= n {
                    forbidden |= bit(c);
                }
            } else if (a + b) % 2 == 0 {
                // b is the fixed endpoint N
                forbidden |= bit((a + b) / 2);
            }
        }
        let mut hi = hi;
        if self.with_last && chosen.count_ones() == 2 {
            // a is the second element: reflection symmetry caps the rest
            hi = hi.min(n + 1 - a);
        }
        (chosen | bit(a), forbidden, hi)
    }
}
