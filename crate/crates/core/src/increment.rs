//! The density-increment step.
//!
//! Starting from a progression-free `S ⊆ [N]` embedded in `Z_p`:
//!
//! 1. compute `f̂` and the large spectrum `R = {r : |f̂(r)| ≥ θ}`;
//! 2. find a dilate `0 < x ≤ p^{1−1/(|R|+1)}` with
//!    `‖xr/p‖_T ≤ p^{−1/(|R|+1)}` for all `r ∈ R`;
//! 3. convolve with the normalised measure on `B = {0, x, 2x}`:
//!    `g(n) = (f(n) + f(n−x) + f(n−2x)) / 3`;
//! 4. take `T = {n : g(n) > 0}` and `T′ = T ∩ [N]`;
//! 5. count progressions in `T′` from below by block averaging.
//!
//! [`run_pipeline`] records every intermediate object and evaluates each
//! inequality of the chain with an explicit constant:
//!
//! | id | inequality |
//! |----|------------|
//! | a  | `|R| ≤ E|f|² / θ²` |
//! | b  | `0 < x ≤ p^{1−1/(|R|+1)}` and `‖xr/p‖_T ≤ p^{−1/(|R|+1)}` on `R` |
//! | c  | `max_r |f̂(r) − ĝ(r)| ≤ max(2πδ, 2θ)` |
//! | d  | `|Λ(f) − Λ(g)| ≤ 3 · max_r |f̂(r) − ĝ(r)|` |
//! | e  | `Λ(f) = |S| / p²` |
//! | f  | `max g ≤ 2/3`, `|T| ≥ ⌈3|S|/2⌉`, `Λ(T) ≤ 27 Λ(g)`, `Λ(T′) ≤ Λ(T)` |
//! | g  | lower bound for `T₃(T′)` is at most `T₃(T′)` |
//!
//! The constant in (c) comes from `|1 − ĥ(r)| ≤ (2π‖xr/p‖ + 2π‖2xr/p‖)/3 ≤ 2πδ`
//! on `R` and `|f̂(r) − ĝ(r)| ≤ 2|f̂(r)| < 2θ` off it. (d) telescopes
//! `Λ(f) − Λ(g)` into three sums and applies Cauchy–Schwarz with
//! `Σ|f̂|², Σ|ĝ|² ≤ 1`. (f) uses `1_T ≤ 3g`.

use num_bigint::BigUint;
use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::extremal::{count_3aps, is_3ap_free, R3Solver};
use crate::field::{embed, find_bertrand_prime, residue_torus_numerator, CyclicFunction, IntervalSet, PrimeContext};
use crate::json::{self, Real};
use crate::spectral::{dft, lambda_direct, large_spectrum, paper_threshold, LargeSpectrum};
use crate::varnavides::varnavides_lower_bound;
use crate::{rational_to_f64, Error, Rational, Result, VerificationError};

/// The dilate and the bounds it was certified against.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DilationResult {
    pub x: usize,
    /// `δ = p^{−1/(|R|+1)}`.
    pub delta: Real,
    /// `p^{1−1/(|R|+1)}`.
    pub xmax: Real,
    /// `L = ⌊p^{|R|/(|R|+1)}⌋`, computed exactly. Both the range of `x` and
    /// the torus condition reduce to comparisons with `L`:
    /// `‖xr/p‖_T ≤ δ ⇔ min(xr mod p, p − xr mod p) ≤ L`.
    pub range_limit: usize,
    /// `max_{r ∈ R} ‖xr/p‖_T`, zero for empty `R`.
    #[serde(serialize_with = "json::rational")]
    pub max_torus_distance: Rational,
    /// `R = ∅`: the constraints are vacuous and `x = 1` is returned.
    pub degenerate: bool,
}

/// `⌊p^{k/(k+1)}⌋`: the largest `a` with `a^{k+1} ≤ p^k`.
pub fn dilation_range_limit(p: usize, k: usize) -> usize {
    if k == 0 {
        return 1;
    }
    let fits = |a: usize| -> bool {
        BigUint::from(a).pow(k as u32 + 1) <= BigUint::from(p).pow(k as u32)
    };
    let estimate = (p as f64).powf(k as f64 / (k as f64 + 1.0)).floor() as usize;
    let mut a = estimate.clamp(1, p);
    while a > 1 && !fits(a) {
        a -= 1;
    }
    while fits(a + 1) {
        a += 1;
    }
    a
}

/// Smallest dilate certifying the simultaneous approximation condition on
/// `R`, by exhaustive scan over `1..=L`.
///
/// Existence for nonempty `R`: the lattice
/// `{(x, xr₁ − pm₁, …, xr_k − pm_k)}` has determinant `p^k` in dimension
/// `k + 1`, and the closed box with every side `p^{k/(k+1)}` has volume
/// `2^{k+1} p^k`, so Minkowski's theorem supplies a nonzero point; its first
/// coordinate cannot vanish because `p^{k/(k+1)} < p`.
pub fn find_dilate(r: &LargeSpectrum, ctx: &PrimeContext) -> Result<DilationResult> {
    let p = ctx.p();
    let k = r.members.len();
    let delta = (p as f64).powf(-1.0 / (k as f64 + 1.0));
    let xmax = (p as f64).powf(1.0 - 1.0 / (k as f64 + 1.0));
    let limit = dilation_range_limit(p, k);
    if k == 0 {
        return Ok(DilationResult {
            x: 1,
            delta: Real(delta),
            xmax: Real(xmax),
            range_limit: limit,
            max_torus_distance: Rational::zero(),
            degenerate: true,
        });
    }
    let x = (1..=limit)
        .find(|&x| r.members.iter().all(|&res| residue_torus_numerator(x * res % p, p) <= limit))
        .ok_or(Error::DilationExhausted { p, size: k })?;
    Ok(DilationResult {
        x,
        delta: Real(delta),
        xmax: Real(xmax),
        range_limit: limit,
        max_torus_distance: max_torus_distance(x, &r.members, p),
        degenerate: false,
    })
}

fn max_torus_distance(x: usize, residues: &[usize], p: usize) -> Rational {
    let worst = residues.iter().map(|&r| residue_torus_numerator(x * r % p, p)).max().unwrap_or(0);
    Rational::new(worst as i128, p as i128)
}

/// `g(n) = (f(n) + f(n − x) + f(n − 2x)) / 3` as integer counts with scale
/// 1/3. `f` must be a 0/1 indicator.
pub fn convolve_with_b(f: &CyclicFunction, x: usize) -> Result<CyclicFunction> {
    let p = f.ctx().p();
    if !f.is_indicator() {
        return Err(Error::InvalidArgument("convolution input must be a 0/1 indicator".into()));
    }
    if x == 0 || x >= p {
        return Err(Error::InvalidArgument(format!("dilate must satisfy 0 < x < p, got {x}")));
    }
    let c = f.counts();
    let counts = (0..p)
        .map(|n| c[n] + c[(n + p - x) % p] + c[(n + 2 * (p - x)) % p])
        .collect();
    CyclicFunction::new(*f.ctx(), counts, Rational::new(1, 3))
}

/// `T = supp g` (an exact integer test) and `T′ = T ∩ [N]`.
///
/// Requires `N + 2x < p` so that `T ⊆ [1, N + 2x]` holds as integers;
/// otherwise translates wrap around `Z_p` and the containment fails.
pub fn support_and_restrict(g: &CyclicFunction, ctx: &PrimeContext, x: usize) -> Result<(Vec<usize>, IntervalSet)> {
    let reach = ctx.n() + 2 * x;
    if reach >= ctx.p() {
        return Err(Error::Wraparound { reach, p: ctx.p() });
    }
    let t = g.support();
    if let Some(&bad) = t.iter().find(|&&n| n == 0 || n > reach) {
        return Err(Error::Invariant(format!("support element {bad} outside [1, {reach}]")));
    }
    let restricted = IntervalSet::from_members(ctx.n(), t.iter().copied().filter(|&n| n <= ctx.n()))?;
    debug_assert!(t.len() - restricted.len() <= 2 * x);
    Ok((t, restricted))
}

/// How the large-spectrum threshold is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThetaMode {
    /// `(2 ln ln p / ln p)^{1/2}`.
    Paper,
    /// Half of `f̂(0) = |S|/p`, which keeps `0 ∈ R`.
    HalfDensity,
    Explicit(f64),
}

impl ThetaMode {
    pub fn label(&self) -> String {
        match self {
            ThetaMode::Paper => "paper".into(),
            ThetaMode::HalfDensity => "half-density".into(),
            ThetaMode::Explicit(t) => json::format_real(*t),
        }
    }
}

/// Length of the short progressions used for the final counting step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MChoice {
    /// `max(3, ⌊(ln p / ln ln p)^{1/16}⌋)`.
    Paper,
    Fixed(usize),
}

/// `max(3, ⌊(ln p / ln ln p)^{1/16}⌋)`.
pub fn default_block_length(p: usize) -> usize {
    let lp = (p as f64).ln();
    let v = (lp / lp.ln()).powf(1.0 / 16.0);
    if v.is_finite() { (v.floor() as usize).max(3) } else { 3 }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub theta: ThetaMode,
    pub m: MChoice,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self { theta: ThetaMode::Paper, m: MChoice::Paper }
    }
}

/// A summary of `f̂` (the full spectrum is not serialised).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumSummary {
    /// `f̂(0) = E f`.
    pub mean: Real,
    pub max_nontrivial_magnitude: Real,
    pub argmax_nontrivial: usize,
    /// `Σ_r |f̂(r)|²`.
    pub energy: Real,
    /// `E_x |f(x)|²`.
    #[serde(serialize_with = "json::rational")]
    pub mean_square: Rational,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PipelineScalars {
    #[serde(serialize_with = "json::rational")]
    pub lambda_f: Rational,
    #[serde(serialize_with = "json::rational")]
    pub lambda_g: Rational,
    #[serde(serialize_with = "json::rational")]
    pub lambda_t: Rational,
    #[serde(serialize_with = "json::rational")]
    pub lambda_t_restricted: Rational,
    /// `max_r |f̂(r) − ĝ(r)|`.
    pub max_coefficient_gap: Real,
    pub size_s: usize,
    pub size_t: usize,
    pub size_t_restricted: usize,
    pub t3_t_restricted: u64,
}

/// One named inequality, with both sides as reals for reporting.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub id: &'static str,
    pub statement: &'static str,
    pub holds: bool,
    /// The hypotheses are empty (e.g. `R = ∅` for the dilation bound, or a
    /// nonpositive lower bound) so the check holds trivially.
    pub vacuous: bool,
    pub lhs: Real,
    pub rhs: Real,
}

/// Quantities that are recorded but never asserted: the growth of `T′` over
/// `S`, and both sides of the final density comparison, whose error term has
/// no explicit constant.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Observations {
    /// `|T′| / |S|`.
    pub growth_ratio: Real,
    /// `|T′| ≥ 4|S|/3`.
    pub four_thirds_reached: bool,
    /// `|S| / N`.
    pub density_s: Real,
    /// `3 r₃(M) / 4M`.
    pub comparison_rhs: Real,
    /// `(ln ln N / ln N)^{1/4}`; NaN (serialised as null) when `ln ln N ≤ 0`.
    pub error_scale: Real,
}

/// Full record of a pipeline run; field order is the serialisation order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PipelineTrace {
    #[serde(rename = "N")]
    pub n: usize,
    pub p: usize,
    pub s: Vec<usize>,
    pub theta_mode: String,
    pub theta: Real,
    pub spectrum: SpectrumSummary,
    pub large_spectrum: Vec<usize>,
    pub dilation: DilationResult,
    pub b: [usize; 3],
    pub g_counts: Vec<u32>,
    #[serde(serialize_with = "json::rational")]
    pub g_scale: Rational,
    pub t: Vec<usize>,
    pub t_restricted: Vec<usize>,
    pub scalars: PipelineScalars,
    #[serde(rename = "M")]
    pub m: usize,
    pub r3_m: usize,
    #[serde(serialize_with = "json::rational")]
    pub varnavides_bound: Rational,
    pub verdicts: Vec<Verdict>,
    pub observations: Observations,
}

impl PipelineTrace {
    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.holds)
    }

    pub fn failed_verdicts(&self) -> Vec<String> {
        self.verdicts.iter().filter(|v| !v.holds).map(|v| v.id.to_string()).collect()
    }

    pub fn verdict(&self, id: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.id == id)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("trace serialises") + "\n"
    }
}

pub type PipelineError = VerificationError<PipelineTrace>;

/// Runs the whole chain on a progression-free `S`, using a fresh exact
/// solver for `r₃(M)`.
pub fn run_pipeline(s: &IntervalSet, config: &PipelineConfig) -> std::result::Result<PipelineTrace, PipelineError> {
    run_pipeline_with(s, config, &mut R3Solver::default())
}

/// [`run_pipeline`] drawing `r₃(M)` from a caller-owned solver, so repeated
/// runs share one table.
pub fn run_pipeline_with(
    s: &IntervalSet,
    config: &PipelineConfig,
    solver: &mut R3Solver,
) -> std::result::Result<PipelineTrace, PipelineError> {
    if !is_3ap_free(s) {
        return Err(Error::NotProgressionFree.into());
    }
    let ctx = find_bertrand_prime(s.n())?;
    let p = ctx.p();
    let f = embed(s, &ctx)?;
    let f_hat = dft(&f);

    let theta = match config.theta {
        ThetaMode::Paper => paper_threshold(p)?,
        ThetaMode::HalfDensity => rational_to_f64(&f.mean()) / 2.0,
        ThetaMode::Explicit(t) => t,
    };
    let r = large_spectrum(&f_hat, theta)?;
    let dilation = find_dilate(&r, &ctx)?;
    let x = dilation.x;
    let g = convolve_with_b(&f, x)?;
    let g_hat = dft(&g);
    let (t, t_restricted) = support_and_restrict(&g, &ctx, x)?;

    let m = match config.m {
        MChoice::Paper => default_block_length(p),
        MChoice::Fixed(m) => m,
    };
    if m < 3 {
        return Err(Error::InvalidArgument(format!("block length M must be at least 3, got {m}")).into());
    }
    let r3_m = solver.value(m)?;

    let lambda_f = lambda_direct(&f);
    let lambda_g = lambda_direct(&g);
    let lambda_t = lambda_direct(&CyclicFunction::indicator(ctx, t.iter().copied()));
    let lambda_t_restricted = lambda_direct(&embed(&t_restricted, &ctx)?);
    let max_gap = f_hat
        .coeffs()
        .iter()
        .zip(g_hat.coeffs())
        .map(|(a, b): (&Complex64, &Complex64)| (a - b).norm())
        .fold(0.0f64, f64::max);
    let t3_restricted = count_3aps(&t_restricted);
    let varnavides_bound = varnavides_lower_bound(t_restricted.len(), s.n(), m, r3_m);

    let size_s = s.len();
    let mean_square = f.mean_square();
    let delta = dilation.delta.0;
    let pr = |v: usize| Rational::from_integer(v as i128);
    let p2 = pr(p * p);

    let mut verdicts = Vec::new();
    verdicts.push(Verdict {
        id: "a",
        statement: "|R| <= E|f|^2 / theta^2",
        holds: (r.len() as f64) * theta * theta <= rational_to_f64(&mean_square),
        vacuous: false,
        lhs: Real(r.len() as f64),
        rhs: Real(rational_to_f64(&mean_square) / (theta * theta)),
    });
    verdicts.push(dilation_verdict(&dilation, &r, p, matches!(config.theta, ThetaMode::Paper)));
    let gap_bound = (2.0 * std::f64::consts::PI * delta).max(2.0 * theta);
    verdicts.push(Verdict {
        id: "c",
        statement: "max_r |f^(r) - g^(r)| <= max(2 pi delta, 2 theta)",
        holds: max_gap <= gap_bound,
        vacuous: false,
        lhs: Real(max_gap),
        rhs: Real(gap_bound),
    });
    let lambda_gap = (rational_to_f64(&lambda_f) - rational_to_f64(&lambda_g)).abs();
    verdicts.push(Verdict {
        id: "d",
        statement: "|Lambda(f) - Lambda(g)| <= 3 max_r |f^(r) - g^(r)|",
        holds: lambda_gap <= 3.0 * max_gap,
        vacuous: false,
        lhs: Real(lambda_gap),
        rhs: Real(3.0 * max_gap),
    });
    let expected_lambda_f = pr(size_s) / p2;
    verdicts.push(Verdict {
        id: "e",
        statement: "Lambda(f) = |S| / p^2",
        holds: lambda_f == expected_lambda_f,
        vacuous: false,
        lhs: Real(rational_to_f64(&lambda_f)),
        rhs: Real(rational_to_f64(&expected_lambda_f)),
    });
    verdicts.push(Verdict {
        id: "f.max_count",
        statement: "max_n g(n) <= 2/3",
        holds: g.max_count() <= 2,
        vacuous: false,
        lhs: Real(g.max_count() as f64 / 3.0),
        rhs: Real(2.0 / 3.0),
    });
    let min_t = (3 * size_s).div_ceil(2);
    verdicts.push(Verdict {
        id: "f.support_size",
        statement: "|T| >= ceil(3|S|/2)",
        holds: t.len() >= min_t,
        vacuous: false,
        lhs: Real(t.len() as f64),
        rhs: Real(min_t as f64),
    });
    let lambda_t_bound = Rational::from_integer(27) * lambda_g;
    verdicts.push(Verdict {
        id: "f.lambda_support",
        statement: "Lambda(T) <= 27 Lambda(g)",
        holds: lambda_t <= lambda_t_bound,
        vacuous: false,
        lhs: Real(rational_to_f64(&lambda_t)),
        rhs: Real(rational_to_f64(&lambda_t_bound)),
    });
    verdicts.push(Verdict {
        id: "f.lambda_restricted",
        statement: "Lambda(T') <= Lambda(T)",
        holds: lambda_t_restricted <= lambda_t,
        vacuous: false,
        lhs: Real(rational_to_f64(&lambda_t_restricted)),
        rhs: Real(rational_to_f64(&lambda_t)),
    });
    verdicts.push(Verdict {
        id: "g",
        statement: "varnavides_lower_bound(|T'|, N, M, r3(M)) <= T3(T')",
        holds: varnavides_bound <= pr(t3_restricted as usize),
        // no length-M progressions fit in [N] when M > N
        vacuous: m > s.n() || varnavides_bound <= Rational::zero(),
        lhs: Real(rational_to_f64(&varnavides_bound)),
        rhs: Real(t3_restricted as f64),
    });

    let nf = s.n() as f64;
    let lln = nf.ln().ln();
    let observations = Observations {
        growth_ratio: Real(if size_s == 0 { f64::NAN } else { t_restricted.len() as f64 / size_s as f64 }),
        four_thirds_reached: 3 * t_restricted.len() >= 4 * size_s,
        density_s: Real(size_s as f64 / nf),
        comparison_rhs: Real(3.0 * r3_m as f64 / (4.0 * m as f64)),
        error_scale: Real(if lln > 0.0 { (lln / nf.ln()).powf(0.25) } else { f64::NAN }),
    };

    let (argmax, max_mag) = f_hat.max_nontrivial().unwrap_or((0, 0.0));
    let trace = PipelineTrace {
        n: s.n(),
        p,
        s: s.to_vec(),
        theta_mode: config.theta.label(),
        theta: Real(theta),
        spectrum: SpectrumSummary {
            mean: Real(f_hat.coeff(0).re),
            max_nontrivial_magnitude: Real(max_mag),
            argmax_nontrivial: argmax,
            energy: Real(f_hat.energy()),
            mean_square,
        },
        large_spectrum: r.members.clone(),
        b: [0, x, 2 * x],
        dilation,
        g_counts: g.counts().to_vec(),
        g_scale: g.scale(),
        scalars: PipelineScalars {
            lambda_f,
            lambda_g,
            lambda_t,
            lambda_t_restricted,
            max_coefficient_gap: Real(max_gap),
            size_s,
            size_t: t.len(),
            size_t_restricted: t_restricted.len(),
            t3_t_restricted: t3_restricted,
        },
        t,
        t_restricted: t_restricted.to_vec(),
        m,
        r3_m,
        varnavides_bound,
        verdicts,
        observations,
    };
    if trace.passed() {
        Ok(trace)
    } else {
        Err(VerificationError::Failed { failed: trace.failed_verdicts(), report: Box::new(trace) })
    }
}

fn dilation_verdict(d: &DilationResult, r: &LargeSpectrum, p: usize, paper_regime: bool) -> Verdict {
    let statement = "0 < x <= p^(1-1/(|R|+1)) and ||xr/p|| <= p^(-1/(|R|+1)) on R";
    if d.degenerate {
        return Verdict {
            id: "b",
            statement,
            holds: true,
            vacuous: true,
            lhs: Real(0.0),
            rhs: d.delta,
        };
    }
    let limit = d.range_limit;
    let mut holds = d.x >= 1
        && d.x <= limit
        && r.members.iter().all(|&res| residue_torus_numerator(d.x * res % p, p) <= limit);
    if paper_regime {
        let lp = (p as f64).ln();
        if (r.len() as f64) <= lp / (2.0 * lp.ln()) {
            holds &= d.delta.0 <= 1.0 / lp && d.xmax.0 <= p as f64 / lp;
        }
    }
    Verdict {
        id: "b",
        statement,
        holds,
        vacuous: false,
        lhs: Real(d.max_torus_distance.to_f64().unwrap_or(f64::NAN)),
        rhs: d.delta,
    }
}
