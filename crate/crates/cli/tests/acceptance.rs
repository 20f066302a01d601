//! Acceptance suite: one line per criterion, nonzero exit if any fails.
//!
//! Every quantity is recomputed here by an independent route (enumeration,
//! closed forms, integer arithmetic) before it is compared with the library.

#[path = "../../core/tests/support/oracle.rs"]
mod oracle;

use std::process::{Command, ExitCode};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use ap3::extremal::{behrend_set_auto, greedy_3ap_free, random_3ap_free, R3Solver};
use ap3::field::{embed, find_bertrand_prime, CyclicFunction, IntervalSet, PrimeContext};
use ap3::increment::{find_dilate, run_pipeline_with, MChoice, PipelineConfig, ThetaMode};
use ap3::spectral::{dft, dft_direct, lambda_direct, lambda_spectral, parseval_defect, LargeSpectrum};
use ap3::varnavides::{occurrence_count, varnavides_lower_bound, verify_lemma};
use ap3::{Rational, VerificationError};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const GOLDEN: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../core/tests/golden/r3_small.json");

/// Sets generated by criterion 5, reused by criterion 8.
static PIPELINE_SETS: Mutex<Vec<(IntervalSet, usize)>> = Mutex::new(Vec::new());

type Criterion = fn() -> Result<String, String>;

fn main() -> ExitCode {
    let criteria: [(&str, Criterion); 9] = [
        ("r3 oracle agreement (N <= 20) and N = 40 within 300 s", c1_r3_oracle),
        ("spectral identities: Lambda rel 1e-9, Parseval 1e-12, under 60 s", c2_spectral),
        ("p^2 Lambda(1_A) = |A| + 2 T3(A) exactly", c3_bridge),
        ("dilation scan finds x in range for every R", c4_dilation),
        ("pipeline verdicts (a)-(f) on 500 runs, (g) when bound > 0", c5_pipeline),
        ("block averaging and lower bound exact on 200 sets, [100] with M = 8", c6_lemma),
        ("occurrence count <= floor(M^2/4), N <= 60, M in 3..=8", c7_occurrence),
        ("lower bound <= 0 for every progression-free set of criterion 5", c8_consistency),
        ("CLI byte-identical output on repeated runs", c9_determinism),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed().as_secs_f64();
        let (tag, detail) = match result {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failures += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {}: {tag} {name} [{detail}; {elapsed:.2} s]", i + 1);
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn c1_r3_oracle() -> Result<String, String> {
    let golden = ap3::extremal::cache::R3Cache::load(GOLDEN).map_err(|e| e.to_string())?;
    let mut solver = R3Solver::new(40).map_err(|e| e.to_string())?;
    for n in 1..=20 {
        let (value, witness) = oracle::r3_by_enumeration(n);
        let g = golden.get(n).ok_or(format!("golden file lacks N = {n}"))?;
        if (g.value, g.witness.to_vec()) != (value, witness.clone()) {
            return Err(format!("golden record for N = {n} disagrees with enumeration"));
        }
        let r = solver.solve(n).map_err(|e| e.to_string())?;
        if r.value != value || r.witness.to_vec() != witness {
            return Err(format!("N = {n}: search gives {} {:?}, enumeration {value} {witness:?}", r.value, r.witness));
        }
    }
    let start = Instant::now();
    let r40 = R3Solver::new(40).and_then(|mut s| s.value(40)).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    if elapsed > Duration::from_secs(300) {
        return Err(format!("r3(40) took {elapsed:?}"));
    }
    if !oracle::mask_is_free(mask_of(&solver.solve(20).unwrap().witness), 20) {
        return Err("witness for N = 20 has a progression".into());
    }
    Ok(format!("20 values match; r3(40) = {r40} in {:.3} s", elapsed.as_secs_f64()))
}

fn mask_of(s: &IntervalSet) -> u64 {
    s.iter().fold(0, |m, a| m | 1 << (a - 1))
}

fn random_function(ctx: PrimeContext, rng: &mut ChaCha8Rng) -> CyclicFunction {
    let p = ctx.p();
    let density: f64 = rng.random_range(0.05..1.0);
    let mut counts: Vec<u32> = (0..p).map(|_| if rng.random_bool(density) { rng.random_range(1..=4) } else { 0 }).collect();
    counts[rng.random_range(0..p)] = 1;
    CyclicFunction::new(ctx, counts, Rational::new(1, 4)).expect("valid function")
}

fn c2_spectral() -> Result<String, String> {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut worst_rel, mut worst_parseval) = (0f64, 0f64);
    for p in [5usize, 7, 11, 101, 257, 1009] {
        let ctx = PrimeContext::new((p - 1) / 2, p).map_err(|e| e.to_string())?;
        for _ in 0..200 {
            let f = random_function(ctx, &mut rng);
            let direct = lambda_direct(&f);
            let direct = *direct.numer() as f64 / *direct.denom() as f64;
            let spec = dft(&f);
            let via_fourier = lambda_spectral(&spec).map_err(|e| format!("p = {p}: {e}"))?;
            let rel = (via_fourier - direct).abs() / direct.abs();
            worst_rel = worst_rel.max(rel);
            worst_parseval = worst_parseval.max(parseval_defect(&f, &spec));
            if p <= 257 {
                worst_parseval = worst_parseval.max(parseval_defect(&f, &dft_direct(&f)));
            }
        }
    }
    let elapsed = start.elapsed();
    let detail = format!("max rel Lambda error {worst_rel:.2e}, max Parseval defect {worst_parseval:.2e}");
    if worst_rel <= 1e-9 && worst_parseval <= 1e-12 && elapsed < Duration::from_secs(60) {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn random_subset(n: usize, rng: &mut ChaCha8Rng) -> IntervalSet {
    let density: f64 = rng.random_range(0.0..1.0);
    IntervalSet::from_members(n, (1..=n).filter(|_| rng.random_bool(density))).expect("members in range")
}

fn c3_bridge() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for i in 0..200 {
        let n = rng.random_range(2..=500);
        let a = random_subset(n, &mut rng);
        let ctx = find_bertrand_prime(n).map_err(|e| e.to_string())?;
        let p = ctx.p() as i128;
        let members = a.to_vec();
        let t3 = oracle::t3_integers(&members) as i128;
        let lhs = lambda_direct(&embed(&a, &ctx).map_err(|e| e.to_string())?) * Rational::from_integer(p * p);
        let rhs = Rational::from_integer(members.len() as i128 + 2 * t3);
        if lhs != rhs {
            return Err(format!("run {i}, N = {n}: p^2 Lambda = {lhs}, |A| + 2 T3 = {rhs}"));
        }
        if n <= 120 && oracle::ordered_progressions_mod_p(&members, ctx.p()) as i128 != members.len() as i128 + 2 * t3 {
            return Err(format!("run {i}, N = {n}: embedding created progressions"));
        }
    }
    Ok("200 sets, N <= 500".into())
}

fn trial_division_prime(n: usize) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

fn c4_dilation() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut largest_x = 0;
    for i in 0..200 {
        let p = loop {
            let p = rng.random_range(5..=5003);
            if trial_division_prime(p) {
                break p;
            }
        };
        let k = rng.random_range(1..=6usize).min(p);
        let mut members: Vec<usize> = sample(&mut rng, p, k).into_vec();
        members.sort_unstable();
        let ctx = PrimeContext::new((p - 1) / 2, p).map_err(|e| e.to_string())?;
        let r = LargeSpectrum { threshold: 0.0, members: members.clone() };
        let d = find_dilate(&r, &ctx).map_err(|e| format!("run {i}, p = {p}, R = {members:?}: {e}"))?;
        // x ≤ p^{k/(k+1)} and ‖xr/p‖ ≤ p^{−1/(k+1)}, both raised to the power k + 1
        let (x, kk, pp) = (d.x as u128, k as u32, p as u128);
        let in_range = x >= 1 && x.pow(kk + 1) <= pp.pow(kk);
        let close = members.iter().all(|&r| {
            let t = (d.x * r % p).min(p - d.x * r % p) as u128;
            t.pow(kk + 1) <= pp.pow(kk)
        });
        if !(in_range && close) || d.degenerate {
            return Err(format!("run {i}, p = {p}, R = {members:?}: x = {} fails", d.x));
        }
        largest_x = largest_x.max(d.x);
    }
    Ok(format!("200 sets, zero exhaustion, largest x = {largest_x}"))
}

fn c5_pipeline() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut solver = R3Solver::default();
    let thetas = [ThetaMode::Paper, ThetaMode::HalfDensity, ThetaMode::Explicit(0.1)];
    let mut problems = Vec::new();
    let (mut g_checked, mut four_thirds) = (0, 0);
    let mut sets = Vec::new();
    for i in 0..500 {
        let (label, s) = match i % 4 {
            0 => ("greedy", greedy_3ap_free(rng.random_range(10..=2000))),
            1 => ("behrend", behrend_set_auto(rng.random_range(10..=2000)).map_err(|e| e.to_string())?),
            2 => ("exact", solver.solve(rng.random_range(10..=60)).map_err(|e| e.to_string())?.witness.clone()),
            _ => {
                let n = rng.random_range(10..=2000);
                ("random", random_3ap_free(n, &mut rng))
            }
        };
        let theta = thetas[(i / 4) % 3];
        let n = s.n();
        let config = PipelineConfig { theta, m: MChoice::Paper };
        let trace = match run_pipeline_with(&s, &config, &mut solver) {
            Ok(t) => t,
            Err(VerificationError::Failed { report, .. }) => *report,
            Err(VerificationError::Setup(e)) => {
                problems.push(format!("run {i} ({label}, N = {n}, {}): {e}", theta.label()));
                continue;
            }
        };
        for v in &trace.verdicts {
            let bound_positive = v.id == "g" && !v.vacuous;
            if !v.holds && (v.id != "g" || bound_positive) {
                problems.push(format!("run {i} ({label}, N = {n}, {}): verdict {} false", theta.label(), v.id));
            }
            g_checked += bound_positive as usize;
        }
        // exact restatements of the two headline facts
        if 2 * trace.t.len() < 3 * s.len() || trace.g_counts.iter().any(|&c| c > 2) {
            problems.push(format!("run {i}: support or max-count claim fails"));
        }
        four_thirds += trace.observations.four_thirds_reached as usize;
        sets.push((s, trace.m));
    }
    *PIPELINE_SETS.lock().unwrap() = sets;
    if problems.is_empty() {
        Ok(format!("500 runs; (g) non-vacuous in {g_checked}; |T'| >= 4|S|/3 observed in {four_thirds}"))
    } else {
        Err(format!("{} problems, first: {}", problems.len(), problems[0]))
    }
}

/// `Σ_{B} T₃(A ∩ B)` over length-`m` progressions with difference `1..=k`.
fn block_t3_sum(a: &IntervalSet, m: usize, k: usize) -> u64 {
    let n = a.n();
    let mut sum = 0;
    for d in 1..=k {
        for start in 1..=n.saturating_sub((m - 1) * d) {
            let inside: Vec<usize> = (0..m).map(|j| start + j * d).filter(|&x| a.contains(x)).collect();
            sum += oracle::t3_integers(&inside);
        }
    }
    sum
}

fn c6_lemma() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut solver = R3Solver::default();
    let mut positive = 0;
    for i in 0..200 {
        let m = 3 + i % 3;
        let n = rng.random_range(m.max(10)..=300);
        let a = random_subset(n, &mut rng);
        let r3_m = solver.value(m).map_err(|e| e.to_string())?;
        let report = verify_lemma(&a, m, r3_m).map_err(|e| match e {
            VerificationError::Failed { failed, .. } => format!("run {i}, N = {n}, M = {m}: {}", failed.join(", ")),
            VerificationError::Setup(e) => e.to_string(),
        })?;
        let t3 = oracle::t3_integers(&a.to_vec());
        let k = n / (2 * m * m);
        let (mm, nn) = ((m * m) as u64, n as i128);
        let bound = Rational::new((a.len() as i128 * m as i128 - (r3_m as i128 + 1) * nn) * nn, (m as i128).pow(5));
        let averaging = 4 * block_t3_sum(&a, m, k) <= mm * t3;
        if report.t3 != t3 || report.lower_bound != bound || !averaging || Rational::from_integer(t3 as i128) < bound {
            return Err(format!("run {i}, N = {n}, M = {m}: independent recomputation disagrees"));
        }
        positive += (bound > Rational::from_integer(0)) as usize;
    }
    let full = IntervalSet::full(100);
    let r3_8 = solver.value(8).map_err(|e| e.to_string())?;
    let report = verify_lemma(&full, 8, r3_8).map_err(|_| "A = [100], M = 8 fails".to_string())?;
    let closed_form: u64 = (1..=49).map(|d| 100 - 2 * d).sum();
    if report.lower_bound != Rational::new(1875, 2048) || report.t3 != 2450 || closed_form != 2450 || r3_8 != 4 {
        return Err(format!("A = [100], M = 8: bound {}, T3 {}", report.lower_bound, report.t3));
    }
    Ok(format!("200 sets ({positive} with positive bound); [100], M = 8: 1875/2048 <= 2450"))
}

fn c7_occurrence() -> Result<String, String> {
    let mut checked = 0u64;
    for n in 3..=60 {
        for m in 3..=8 {
            let cap = (m * m / 4) as u64;
            for k in [n / (2 * m * m), n] {
                for a in 1..=n {
                    for d in 1..=(n - a) / 2 {
                        let c = occurrence_count(a, d, n, m, k).map_err(|e| e.to_string())?;
                        if c > cap {
                            return Err(format!("(a, d) = ({a}, {d}), N = {n}, M = {m}, k = {k}: {c} > {cap}"));
                        }
                        if n <= 24 && k == n && c != brute_occurrence(a, d, n, m, k) {
                            return Err(format!("(a, d) = ({a}, {d}), N = {n}, M = {m}: enumeration disagrees"));
                        }
                        checked += 1;
                    }
                }
            }
        }
    }
    Ok(format!("{checked} (progression, M, k) cases"))
}

fn brute_occurrence(a: usize, d: usize, n: usize, m: usize, k: usize) -> u64 {
    let mut count = 0;
    for step in 1..=k {
        for start in 1..=n.saturating_sub((m - 1) * step) {
            let block: Vec<usize> = (0..m).map(|j| start + j * step).collect();
            count += [a, a + d, a + 2 * d].iter().all(|x| block.contains(x)) as u64;
        }
    }
    count
}

fn c8_consistency() -> Result<String, String> {
    let sets = PIPELINE_SETS.lock().unwrap();
    if sets.is_empty() {
        return Err("criterion 5 produced no sets".into());
    }
    let mut solver = R3Solver::default();
    let mut evaluated = 0;
    for (s, pipeline_m) in sets.iter() {
        for m in std::iter::once(*pipeline_m).chain(3..=8).filter(|&m| m <= s.n()) {
            let r3_m = solver.value(m).map_err(|e| e.to_string())?;
            let bound = varnavides_lower_bound(s.len(), s.n(), m, r3_m);
            if bound > Rational::from_integer(0) {
                return Err(format!("N = {}, |A| = {}, M = {m}: bound {bound} > 0", s.n(), s.len()));
            }
            evaluated += 1;
        }
    }
    Ok(format!("{} sets, {evaluated} evaluations", sets.len()))
}

fn c9_determinism() -> Result<String, String> {
    let dir = std::env::temp_dir().join(format!("ap3-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let set_file = dir.join("set.txt");
    std::fs::write(&set_file, "1\n2\n4\n5\n10\n11\n13\n14\n").map_err(|e| e.to_string())?;
    let cache = dir.join("r3.json");
    let file_source = format!("file:{}", set_file.display());
    let cache_arg = cache.display().to_string();
    let commands: Vec<Vec<&str>> = vec![
        vec!["r3", "--n", "1..30"],
        vec!["r3", "--n", "1..25", "--format", "json"],
        vec!["r3", "--n", "15..20", "--cache", &cache_arg],
        vec!["pipeline", "--n", "2"],
        vec!["pipeline", "--n", "500", "--source", "behrend", "--theta", "half-density"],
        vec!["pipeline", "--n", "300", "--source", "random", "--seed", "17", "--theta", "0.1"],
        vec!["pipeline", "--n", "40", "--source", "exact", "--theta", "half-density", "--format", "csv"],
        vec!["pipeline", "--n", "20", "--source", &file_source, "--m", "4"],
        vec!["varnavides", "--n", "100", "--m", "5", "--source", "full"],
        vec!["varnavides", "--n", "250", "--m", "3", "--source", "random", "--seed", "3", "--format", "csv"],
    ];
    let run = |args: &[&str]| {
        let out = Command::new(env!("CARGO_BIN_EXE_ap3")).args(args).output().expect("binary runs");
        (out.status.code(), out.stdout)
    };
    // building mutates the file, so it runs once up front
    if run(&["cache", "build", "--n", "1..20", "--cache", &cache_arg]).0 != Some(0) {
        return Err("cache build failed".into());
    }
    for args in &commands {
        let (first, second) = (run(args), run(args));
        if first != second {
            return Err(format!("`ap3 {}` differs between runs", args.join(" ")));
        }
        if first.0 != Some(0) || first.1.is_empty() {
            return Err(format!("`ap3 {}` exited with {:?}", args.join(" "), first.0));
        }
    }
    let _ = std::fs::remove_dir_all(&dir);
    Ok(format!("{} commands", commands.len()))
}
