//! The prime field `Z_p`, exact functions on it, and subsets of `[N]`.
//!
//! Residues are 0-based; the interval `[N] = {1, …, N}` occupies residues
//! `1..=N`. Because `p > 2N`, any progression `x, x+d, x+2d (mod p)` with
//! all three terms in `[N]` is already a progression over the integers, so
//! embedding never creates new progressions.

use num_traits::{One, Zero};

use crate::{Error, Rational, Result};

/// Deterministic primality test by trial division; adequate for the moduli
/// used here (at most a few million).
pub fn is_prime(n: usize) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n % 2 == 0 || n % 3 == 0 {
        return false;
    }
    let mut i = 5;
    while i * i <= n {
        if n % i == 0 || n % (i + 2) == 0 {
            return false;
        }
        i += 6;
    }
    true
}

/// The modulus `p` together with the interval length `N` it was chosen for.
///
/// Invariant: `p` is an odd prime and `2N < p < 4N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimeContext {
    p: usize,
    n: usize,
}

impl PrimeContext {
    /// Validates an explicit `(N, p)` pair.
    pub fn new(n: usize, p: usize) -> Result<Self> {
        if n == 0 || p % 2 == 0 || !is_prime(p) || p <= 2 * n || p >= 4 * n {
            return Err(Error::InvalidModulus { p, n });
        }
        Ok(Self { p, n })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `a mod p` for a signed integer.
    pub fn reduce(&self, a: i64) -> usize {
        a.rem_euclid(self.p as i64) as usize
    }
}

/// The smallest prime `p` with `2N < p < 4N`.
///
/// Existence for `N ≥ 2` is Bertrand's postulate; the scan is direct, and
/// running off the end of the interval is reported as a bug rather than
/// silently widened.
pub fn find_bertrand_prime(n: usize) -> Result<PrimeContext> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "Bertrand prime needs N >= 2, got {n}"
        )));
    }
    let (lo, hi) = (2 * n, 4 * n);
    (lo + 1..hi)
        .find(|&p| is_prime(p))
        .map(|p| PrimeContext { p, n })
        .ok_or(Error::PrimeScanExhausted { lo, hi })
}

/// Distance from `t` to the nearest integer, `‖t‖_T ∈ [0, 1/2]`.
///
/// ```
/// use ap3::field::torus_distance;
/// use ap3::Rational;
/// assert_eq!(torus_distance(Rational::new(7, 5)), Rational::new(2, 5));
/// assert_eq!(torus_distance(Rational::new(-3, 1)), Rational::from_integer(0));
/// ```
pub fn torus_distance(t: Rational) -> Rational {
    let frac = t - t.floor();
    let other = Rational::one() - frac;
    if frac <= other {
        frac
    } else {
        other
    }
}

/// Numerator of `‖a / p‖_T` for a residue `a`: `min(a mod p, p − a mod p)`.
pub fn residue_torus_numerator(a: usize, p: usize) -> usize {
    let a = a % p;
    a.min(p - a)
}

const WORD: usize = 64;

/// A subset of `[N] = {1, …, N}` stored as packed bits.
///
/// Element `a` lives at bit `a − 1`; bits beyond `N` are always zero.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntervalSet {
    n: usize,
    words: Vec<u64>,
}

impl IntervalSet {
    pub fn empty(n: usize) -> Self {
        Self { n, words: vec![0; n.div_ceil(WORD)] }
    }

    pub fn full(n: usize) -> Self {
        let mut s = Self::empty(n);
        for a in 1..=n {
            s.set_bit(a);
        }
        s
    }

    /// Builds a set from its members; duplicates are ignored.
    pub fn from_members<I: IntoIterator<Item = usize>>(n: usize, members: I) -> Result<Self> {
        let mut s = Self::empty(n);
        for a in members {
            s.insert(a)?;
        }
        Ok(s)
    }

    pub fn insert(&mut self, a: usize) -> Result<()> {
        if a == 0 || a > self.n {
            return Err(Error::OutOfRange { element: a, n: self.n });
        }
        self.set_bit(a);
        Ok(())
    }

    pub fn remove(&mut self, a: usize) {
        if a >= 1 && a <= self.n {
            self.words[(a - 1) / WORD] &= !(1u64 << ((a - 1) % WORD));
        }
    }

    #[inline]
    pub(crate) fn set_bit(&mut self, a: usize) {
        debug_assert!(a >= 1 && a <= self.n);
        self.words[(a - 1) / WORD] |= 1u64 << ((a - 1) % WORD);
    }

    /// Membership; anything outside `[1, N]` is simply absent.
    #[inline]
    pub fn contains(&self, a: usize) -> bool {
        a >= 1 && a <= self.n && self.words[(a - 1) / WORD] >> ((a - 1) % WORD) & 1 == 1
    }

    /// Signed membership helper for arithmetic that may leave the interval.
    #[inline]
    pub fn contains_i64(&self, a: i64) -> bool {
        a >= 1 && self.contains(a as usize)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Members in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let bit = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(i * WORD + bit + 1)
            })
        })
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// The 64 membership bits for elements `start + 1 ..= start + 64`.
    #[inline]
    pub(crate) fn window(&self, start: usize) -> u64 {
        let (w, b) = (start / WORD, start % WORD);
        let lo = self.words.get(w).copied().unwrap_or(0);
        if b == 0 {
            lo
        } else {
            let hi = self.words.get(w + 1).copied().unwrap_or(0);
            (lo >> b) | (hi << (WORD - b))
        }
    }

    /// Same elements viewed inside a different interval length. Fails if an
    /// element would fall outside the new interval.
    pub fn with_n(&self, n: usize) -> Result<Self> {
        Self::from_members(n, self.iter())
    }
}

impl std::fmt::Debug for IntervalSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "IntervalSet(N={}, ", self.n)?;
        f.debug_set().entries(self.iter()).finish()?;
        write!(f, ")")
    }
}

/// An exact nonnegative function on `Z_p`: the value at `n` is
/// `counts[n] · scale`.
///
/// Indicators have scale 1 and counts in `{0, 1}`; the smoothed function
/// produced by convolving an indicator with the normalised measure on
/// `{0, x, 2x}` has scale 1/3 and counts in `{0, 1, 2, 3}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclicFunction {
    ctx: PrimeContext,
    counts: Vec<u32>,
    scale: Rational,
}

impl CyclicFunction {
    pub fn new(ctx: PrimeContext, counts: Vec<u32>, scale: Rational) -> Result<Self> {
        if counts.len() != ctx.p() {
            return Err(Error::InvalidArgument(format!(
                "expected {} counts, got {}",
                ctx.p(),
                counts.len()
            )));
        }
        if scale < Rational::zero() {
            return Err(Error::InvalidArgument("scale must be nonnegative".into()));
        }
        Ok(Self { ctx, counts, scale })
    }

    /// Indicator of a set of residues (each reduced mod `p`).
    pub fn indicator<I: IntoIterator<Item = usize>>(ctx: PrimeContext, residues: I) -> Self {
        let mut counts = vec![0; ctx.p()];
        for r in residues {
            counts[r % ctx.p()] = 1;
        }
        Self { ctx, counts, scale: Rational::one() }
    }

    pub fn ctx(&self) -> &PrimeContext {
        &self.ctx
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    pub fn scale(&self) -> Rational {
        self.scale
    }

    pub fn value(&self, n: usize) -> Rational {
        self.scale * Rational::from_integer(self.counts[n % self.ctx.p()] as i128)
    }

    /// Residues where the function is nonzero, ascending.
    pub fn support(&self) -> Vec<usize> {
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn max_count(&self) -> u32 {
        self.counts.iter().copied().max().unwrap_or(0)
    }

    pub fn total_count(&self) -> u64 {
        self.counts.iter().map(|&c| c as u64).sum()
    }

    pub fn is_indicator(&self) -> bool {
        self.scale == Rational::one() && self.counts.iter().all(|&c| c <= 1)
    }

    /// `E_x f(x)`.
    pub fn mean(&self) -> Rational {
        self.scale * Rational::new(self.total_count() as i128, self.ctx.p() as i128)
    }

    /// `E_x |f(x)|²`.
    pub fn mean_square(&self) -> Rational {
        let sq: i128 = self.counts.iter().map(|&c| (c as i128) * (c as i128)).sum();
        self.scale * self.scale * Rational::new(sq, self.ctx.p() as i128)
    }
}

/// The indicator `1_S` of `S ⊆ [N]` viewed inside `Z_p`.
pub fn embed(s: &IntervalSet, ctx: &PrimeContext) -> Result<CyclicFunction> {
    if s.n() != ctx.n() {
        return Err(Error::LengthMismatch { set: s.n(), context: ctx.n() });
    }
    Ok(CyclicFunction::indicator(*ctx, s.iter()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i128, d: i128) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn bertrand_examples() {
        assert_eq!(find_bertrand_prime(2).unwrap().p(), 5);
        assert_eq!(find_bertrand_prime(3).unwrap().p(), 7);
        assert_eq!(find_bertrand_prime(100).unwrap().p(), 211);
        assert!(find_bertrand_prime(1).is_err());
    }

    #[test]
    fn bertrand_prime_is_smallest_in_range() {
        for n in 2..2000 {
            let ctx = find_bertrand_prime(n).unwrap();
            let p = ctx.p();
            assert!(p > 2 * n && p < 4 * n && is_prime(p) && p % 2 == 1);
            assert!((2 * n + 1..p).all(|c| !is_prime(c)));
            assert_eq!(PrimeContext::new(n, p), Ok(ctx));
        }
    }

    #[test]
    fn context_rejects_bad_moduli() {
        assert!(PrimeContext::new(2, 4).is_err());
        assert!(PrimeContext::new(2, 3).is_err());
        assert!(PrimeContext::new(2, 11).is_err());
        assert!(PrimeContext::new(3, 11).is_ok());
    }

    #[test]
    fn torus_examples() {
        assert_eq!(torus_distance(q(7, 5)), q(2, 5));
        assert_eq!(torus_distance(q(1, 2)), q(1, 2));
        assert_eq!(torus_distance(q(-3, 1)), q(0, 1));
        assert_eq!(torus_distance(q(-1, 5)), q(1, 5));
    }

    #[test]
    fn embed_examples() {
        let ctx = PrimeContext::new(2, 5).unwrap();
        let s = IntervalSet::from_members(2, [1, 2]).unwrap();
        assert_eq!(embed(&s, &ctx).unwrap().counts(), &[0, 1, 1, 0, 0]);
        assert!(embed(&IntervalSet::empty(2), &ctx).unwrap().counts().iter().all(|&c| c == 0));

        let ctx = find_bertrand_prime(9).unwrap();
        let f = embed(&IntervalSet::full(9), &ctx).unwrap();
        for r in 0..ctx.p() {
            assert_eq!(f.counts()[r], u32::from((1..=9).contains(&r)));
        }
        assert!(f.is_indicator());

        let wrong = IntervalSet::empty(3);
        assert_eq!(
            embed(&wrong, &PrimeContext::new(2, 5).unwrap()),
            Err(Error::LengthMismatch { set: 3, context: 2 })
        );
    }

    #[test]
    fn interval_set_basics() {
        let mut s = IntervalSet::from_members(130, [1, 64, 65, 130]).unwrap();
        assert_eq!(s.len(), 4);
        assert_eq!(s.to_vec(), vec![1, 64, 65, 130]);
        assert!(s.contains(65) && !s.contains(0) && !s.contains(131));
        assert!(s.insert(131).is_err());
        s.remove(64);
        assert_eq!(s.to_vec(), vec![1, 65, 130]);
        assert_eq!(s.window(64) & 1, 1);
        assert_eq!(s.window(129), 1);
    }

    fn has_3ap_integers(s: &[usize]) -> bool {
        let set: std::collections::HashSet<_> = s.iter().copied().collect();
        s.iter().any(|&a| s.iter().any(|&b| b > a && (a + b) % 2 == 0 && set.contains(&((a + b) / 2))))
    }

    fn has_3ap_mod_p(s: &[usize], p: usize) -> bool {
        let f: std::collections::HashSet<_> = s.iter().copied().collect();
        (0..p).any(|x| {
            (1..p).any(|d| f.contains(&x) && f.contains(&((x + d) % p)) && f.contains(&((x + 2 * d) % p)))
        })
    }

    #[test]
    fn embedding_creates_no_progressions_exhaustive() {
        for n in 2..=10 {
            let p = find_bertrand_prime(n).unwrap().p();
            for mask in 0u32..(1 << n) {
                let s: Vec<usize> = (1..=n).filter(|&a| mask >> (a - 1) & 1 == 1).collect();
                assert_eq!(has_3ap_integers(&s), has_3ap_mod_p(&s, p), "N={n} S={s:?}");
            }
        }
    }

    proptest! {
        #[test]
        fn embedding_creates_no_progressions_random(
            n in 2usize..=200,
            picks in proptest::collection::vec(1usize..=200, 0..6),
        ) {
            let p = find_bertrand_prime(n).unwrap().p();
            let mut s: Vec<usize> = picks.into_iter().filter(|&a| a <= n).collect();
            s.sort_unstable();
            s.dedup();
            prop_assert_eq!(has_3ap_integers(&s), has_3ap_mod_p(&s, p));
        }

        #[test]
        fn torus_symmetries(num in -10_000i128..10_000, den in 1i128..500) {
            let t = Rational::new(num, den);
            let d = torus_distance(t);
            prop_assert!(d >= Rational::zero() && d <= q(1, 2));
            prop_assert_eq!(d, torus_distance(-t));
            prop_assert_eq!(d, torus_distance(t + Rational::one()));
            prop_assert!(torus_distance(t * Rational::from_integer(2)) <= d * Rational::from_integer(2));
        }

        #[test]
        fn residue_numerator_matches_rational(a in 0usize..10_000, p in 2usize..5000) {
            let d = torus_distance(Rational::new(a as i128, p as i128));
            prop_assert_eq!(d, Rational::new(residue_torus_numerator(a, p) as i128, p as i128));
        }
    }
}
