//! Counting progressions in a dense set by averaging over short progressions.
//!
//! Fix `M` and `k = ⌊N / 2M²⌋`. The block system `𝓑` consists of all
//! length-`M` progressions inside `[N]` with common difference `1 ≤ d ≤ k`;
//! `𝓑_d` holds those of difference `d`, and `|𝓑_d| = N − (M − 1)d`. Every
//! three-term progression lies in at most `⌊M²/4⌋` blocks, hence
//!
//! ```text
//! T₃(A) ≥ (4 / M²) Σ_{B ∈ 𝓑} T₃(A ∩ B),
//! ```
//!
//! and a block with `|A ∩ B| > r₃(M)` contributes at least one progression.
//! Counting such rich blocks `𝓒` gives the lower bound
//!
//! ```text
//! T₃(A) ≥ ((|A|/N − (r₃(M) + 1)/M) / M⁴) · N².
//! ```
//!
//! Everything here is integer or exact rational arithmetic.

use num_traits::Zero;
use serde::Serialize;

use crate::extremal::count_3aps;
use crate::field::IntervalSet;
use crate::json;
use crate::{Error, Rational, Result, VerificationError};

fn q(n: impl Into<i128>) -> Rational {
    Rational::from_integer(n.into())
}

/// `k = ⌊N / 2M²⌋`.
pub fn block_difference_limit(n: usize, m: usize) -> usize {
    n / (2 * m * m)
}

/// Length-`M` progressions in `[N]` with common difference `1..=k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockSystem {
    pub n: usize,
    pub m: usize,
    pub k: usize,
}

impl BlockSystem {
    pub fn new(n: usize, m: usize, k: usize) -> Self {
        Self { n, m, k }
    }

    /// The system used by the lemma, `k = ⌊N / 2M²⌋`.
    pub fn standard(n: usize, m: usize) -> Self {
        Self::new(n, m, block_difference_limit(n, m))
    }

    /// `|𝓑_d| = max(0, N − (M − 1)d)`.
    pub fn count_with_difference(&self, d: usize) -> usize {
        self.n.saturating_sub((self.m - 1) * d)
    }

    pub fn total(&self) -> usize {
        (1..=self.k).map(|d| self.count_with_difference(d)).sum()
    }

    /// Every block as `(start, difference)`, ordered by difference then start.
    pub fn blocks(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (1..=self.k).flat_map(move |d| (1..=self.count_with_difference(d)).map(move |s| (s, d)))
    }

    /// `I_d = [(M − 1)d + 1, N − (M − 1)d]`, possibly empty.
    pub fn core_interval(&self, d: usize) -> std::ops::RangeInclusive<usize> {
        let reach = (self.m - 1) * d;
        (reach + 1)..=self.n.saturating_sub(reach)
    }
}

/// Number of blocks of the system containing all of `a, a+d, a+2d`,
/// enumerated over the blocks that contain `a`.
pub fn occurrence_count(a: usize, d: usize, n: usize, m: usize, k: usize) -> Result<u64> {
    if a == 0 || d == 0 || a + 2 * d > n {
        return Err(Error::InvalidArgument(format!(
            "progression ({a}, {}, {}) is not inside [1, {n}]",
            a + d,
            a + 2 * d
        )));
    }
    if m == 0 {
        return Ok(0);
    }
    let mut count = 0;
    for step in 1..=k {
        for pos in 0..m {
            let Some(start) = a.checked_sub(pos * step).filter(|&s| s >= 1) else { break };
            if start + (m - 1) * step > n {
                continue;
            }
            let inside = |x: usize| (x - start) % step == 0 && (x - start) / step < m;
            if inside(a + d) && inside(a + 2 * d) {
                count += 1;
            }
        }
    }
    Ok(count)
}

/// A named exact inequality `lhs (relation) rhs`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub holds: bool,
    #[serde(serialize_with = "json::rational")]
    pub lhs: Rational,
    pub relation: &'static str,
    #[serde(serialize_with = "json::rational")]
    pub rhs: Rational,
}

impl Check {
    fn ge(name: &'static str, lhs: Rational, rhs: Rational) -> Self {
        Self { name, holds: lhs >= rhs, lhs, relation: ">=", rhs }
    }

    fn le(name: &'static str, lhs: Rational, rhs: Rational) -> Self {
        Self { name, holds: lhs <= rhs, lhs, relation: "<=", rhs }
    }
}

/// Block statistics for a set `A ⊆ [N]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VarnavidesCensus {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "M")]
    pub m: usize,
    pub k: usize,
    pub r3_m: usize,
    pub size_a: usize,
    /// `|𝓑_d|` for `d = 1..=k`.
    pub blocks_per_difference: Vec<u64>,
    pub total_blocks: u64,
    /// `Σ_{d ≤ k} |A ∩ I_d|`.
    pub core_hits: u64,
    /// `Σ_{B ∈ 𝓑} |A ∩ B|`.
    pub intersection_sum: u64,
    /// `|𝓒| = #{B : |A ∩ B| > r₃(M)}`.
    pub rich_blocks: u64,
    #[serde(serialize_with = "json::rational")]
    pub lower_bound: Rational,
    /// `k = 0`: the block system is empty and the counting argument says
    /// nothing.
    pub vacuous: bool,
}

impl VarnavidesCensus {
    /// The four counting inequalities of the argument, evaluated exactly.
    pub fn checks(&self) -> Vec<Check> {
        let (n, m, k) = (q(self.n as i128), q(self.m as i128), q(self.k as i128));
        let size = q(self.size_a as i128);
        let total = q(self.total_blocks as i128);
        let sum = q(self.intersection_sum as i128);
        let rich = q(self.rich_blocks as i128);
        let r3 = q(self.r3_m as i128);
        let spread = k * (size - q(2) * m * k);
        let mut out = vec![Check::le("total blocks <= N k", total, n * k)];
        if self.k >= 1 {
            out.push(Check::ge("intersection sum >= M sum_d |A cap I_d|", sum, m * q(self.core_hits as i128)));
            out.push(Check::ge("M sum_d |A cap I_d| >= M k (|A| - 2 M k)", m * q(self.core_hits as i128), m * spread));
        }
        out.push(Check::le("intersection sum <= M |C| + r3(M) (|B| - |C|)", sum, m * rich + r3 * (total - rich)));
        out.push(Check::ge("|C| >= k (|A| - 2 M k) - |B| r3(M) / M", rich, spread - total * r3 / m));
        out
    }
}

/// `((|A|/N − (r₃(M) + 1)/M) / M⁴) · N²` as an exact rational.
///
/// ```
/// use ap3::varnavides::varnavides_lower_bound;
/// use ap3::Rational;
/// assert_eq!(varnavides_lower_bound(100, 100, 8, 4), Rational::new(1875, 2048));
/// ```
pub fn varnavides_lower_bound(size_a: usize, n: usize, m: usize, r3_m: usize) -> Rational {
    let (n, m) = (q(n as i128), q(m as i128));
    let density_gap = q(size_a as i128) / n - q(r3_m as i128 + 1) / m;
    density_gap / (m * m * m * m) * n * n
}

fn check_params(a: &IntervalSet, m: usize) -> Result<()> {
    if m < 3 || m > a.n() {
        return Err(Error::InvalidArgument(format!("need 3 <= M <= N, got M = {m}, N = {}", a.n())));
    }
    Ok(())
}

fn tally(a: &IntervalSet, m: usize, r3_m: usize) -> VarnavidesCensus {
    let system = BlockSystem::standard(a.n(), m);
    let blocks_per_difference: Vec<u64> =
        (1..=system.k).map(|d| system.count_with_difference(d) as u64).collect();
    let core_hits = (1..=system.k)
        .map(|d| system.core_interval(d).filter(|&x| a.contains(x)).count() as u64)
        .sum();
    let (mut intersection_sum, mut rich_blocks) = (0u64, 0u64);
    for (start, d) in system.blocks() {
        let hits = (0..m).filter(|&j| a.contains(start + j * d)).count();
        intersection_sum += hits as u64;
        if hits > r3_m {
            rich_blocks += 1;
        }
    }
    VarnavidesCensus {
        n: a.n(),
        m,
        k: system.k,
        r3_m,
        size_a: a.len(),
        total_blocks: blocks_per_difference.iter().sum(),
        blocks_per_difference,
        core_hits,
        intersection_sum,
        rich_blocks,
        lower_bound: varnavides_lower_bound(a.len(), a.n(), m, r3_m),
        vacuous: system.k == 0,
    }
}

/// Computes the census and insists that every counting inequality holds.
/// `r3_m` must be `r₃(M)`.
pub fn census(a: &IntervalSet, m: usize, r3_m: usize) -> Result<VarnavidesCensus> {
    check_params(a, m)?;
    let c = tally(a, m, r3_m);
    let failed: Vec<&str> = c.checks().iter().filter(|ch| !ch.holds).map(|ch| ch.name).collect();
    if !failed.is_empty() {
        return Err(Error::Invariant(failed.join("; ")));
    }
    Ok(c)
}

/// Everything computed by [`verify_lemma`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LemmaReport {
    pub census: VarnavidesCensus,
    /// `T₃(A)`.
    pub t3: u64,
    /// `Σ_{B ∈ 𝓑} T₃(A ∩ B)`.
    pub block_t3_sum: u64,
    /// `(4 / M²) Σ_B T₃(A ∩ B)`.
    #[serde(serialize_with = "json::rational")]
    pub averaged_block_bound: Rational,
    /// The bound actually compared against `T₃(A)`.
    #[serde(serialize_with = "json::rational")]
    pub lower_bound: Rational,
    pub checks: Vec<Check>,
    pub vacuous: bool,
}

impl LemmaReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }
}

/// `Σ_{B ∈ 𝓑} T₃(A ∩ B)`. A progression inside a block is a progression of
/// block indices, so each block reduces to a subset of `[M]`.
pub fn block_progression_sum(a: &IntervalSet, system: &BlockSystem) -> u64 {
    system
        .blocks()
        .map(|(start, d)| {
            let local = (0..system.m).filter(|&j| a.contains(start + j * d)).map(|j| j + 1);
            count_3aps(&IntervalSet::from_members(system.m, local).expect("indices inside [M]"))
        })
        .sum()
}

/// Checks, exactly: the averaging inequality over all blocks, every census
/// inequality, and `T₃(A) ≥` the lower bound. `r3_m` must be `r₃(M)`.
pub fn verify_lemma(
    a: &IntervalSet,
    m: usize,
    r3_m: usize,
) -> std::result::Result<LemmaReport, VerificationError<LemmaReport>> {
    verify_lemma_with_bound_shift(a, m, r3_m, Rational::zero())
}

/// [`verify_lemma`] with `shift` added to the lower bound before comparison.
/// Only for exercising the failure path.
#[doc(hidden)]
pub fn verify_lemma_with_bound_shift(
    a: &IntervalSet,
    m: usize,
    r3_m: usize,
    shift: Rational,
) -> std::result::Result<LemmaReport, VerificationError<LemmaReport>> {
    check_params(a, m)?;
    let census = tally(a, m, r3_m);
    let system = BlockSystem::standard(a.n(), m);
    let t3 = count_3aps(a);
    let block_t3_sum = block_progression_sum(a, &system);
    let averaged_block_bound = Rational::new(4 * block_t3_sum as i128, (m * m) as i128);
    let lower_bound = census.lower_bound + shift;

    let mut checks = vec![Check::ge("T3(A) >= (4/M^2) sum_B T3(A cap B)", q(t3 as i128), averaged_block_bound)];
    checks.extend(census.checks());
    checks.push(Check::ge("T3(A) >= lower bound", q(t3 as i128), lower_bound));

    let report = LemmaReport {
        vacuous: census.vacuous,
        census,
        t3,
        block_t3_sum,
        averaged_block_bound,
        lower_bound,
        checks,
    };
    let failed: Vec<String> = report.checks.iter().filter(|c| !c.holds).map(|c| c.name.to_string()).collect();
    if failed.is_empty() {
        Ok(report)
    } else {
        Err(VerificationError::Failed { failed, report: Box::new(report) })
    }
}
