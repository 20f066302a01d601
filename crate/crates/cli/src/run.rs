use std::path::Path;

use ap3::extremal::cache::R3Cache;
use ap3::extremal::{behrend_set_auto, count_3aps, greedy_3ap_free, random_3ap_free, R3Record, R3Solver};
use ap3::field::IntervalSet;
use ap3::increment::{run_pipeline_with, MChoice, PipelineConfig, PipelineTrace, ThetaMode};
use ap3::json::format_real;
use ap3::varnavides::{varnavides_lower_bound, verify_lemma_with_bound_shift, LemmaReport};
use ap3::{Error, Rational, VerificationError};
use rand::SeedableRng;
use serde::Serialize;

use crate::args::{CacheAction, Command, Format, NRange, PipelineArgs, R3Args, SetArgs, Source, Theta, VarnavidesArgs};

pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: u8,
}

enum Failure {
    Usage(String),
    Verification { stdout: String, message: String },
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            // the computation ran and could not certify its claim
            Error::Wraparound { .. }
            | Error::DilationExhausted { .. }
            | Error::ImaginaryResidue(_)
            | Error::Invariant(_)
            | Error::CorruptCache(_)
            | Error::CacheVersion { .. }
            | Error::CacheMismatch { .. } => Failure::Verification { stdout: String::new(), message: e.to_string() },
            _ => Failure::Usage(e.to_string()),
        }
    }
}

pub fn execute(command: Command) -> Outcome {
    let result = match command {
        Command::R3(a) => cmd_r3(&a),
        Command::Pipeline(a) => cmd_pipeline(&a),
        Command::Varnavides(a) => cmd_varnavides(&a),
        Command::Cache { action } => cmd_cache(&action),
    };
    match result {
        Ok(stdout) => Outcome { stdout, stderr: String::new(), code: 0 },
        Err(Failure::Usage(message)) => Outcome { stdout: String::new(), stderr: format!("error: {message}\n"), code: 1 },
        Err(Failure::Verification { stdout, message }) => {
            Outcome { stdout, stderr: format!("verification failed: {message}\n"), code: 2 }
        }
    }
}

fn load_cache(path: Option<&Path>) -> Result<R3Cache, Failure> {
    match path {
        Some(p) => Ok(R3Cache::load(p)?),
        None => Ok(R3Cache::new()),
    }
}

/// Cached record if present, otherwise exact search within the solver limit.
fn lookup(n: usize, cache: &R3Cache, solver: &mut R3Solver) -> Result<R3Record, Failure> {
    match cache.get(n) {
        Some(r) => Ok(r.clone()),
        None => Ok(solver.solve(n)?.clone()),
    }
}

#[derive(Serialize)]
struct R3Row<'a> {
    #[serde(rename = "N")]
    n: usize,
    value: usize,
    witness: Vec<usize>,
    method: &'a ap3::extremal::R3Method,
}

#[derive(Serialize)]
struct R3Table<'a> {
    records: Vec<R3Row<'a>>,
}

fn cmd_r3(a: &R3Args) -> Result<String, Failure> {
    let cache = load_cache(a.cache.as_deref())?;
    let mut solver = R3Solver::default();
    if let Some(n) = a.n.iter().find(|&n| n > solver.limit() && cache.get(n).is_none()) {
        return Err(Failure::Usage(format!(
            "r3({n}) is beyond the exact-search limit {} and not in the cache",
            solver.limit()
        )));
    }
    let records: Vec<R3Record> = a.n.iter().map(|n| lookup(n, &cache, &mut solver)).collect::<Result<_, _>>()?;
    let rows: Vec<R3Row> = records
        .iter()
        .map(|r| R3Row { n: r.n, value: r.value, witness: r.witness.to_vec(), method: &r.method })
        .collect();
    match a.format {
        Format::Json => Ok(serde_json::to_string_pretty(&R3Table { records: rows }).expect("rows serialise") + "\n"),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["N", "r3", "witness", "method"]).map_err(csv_failure)?;
            for row in &rows {
                let witness = row.witness.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
                let method = if *row.method == ap3::extremal::R3Method::Exact { "exact" } else { "cached" };
                w.write_record([row.n.to_string(), row.value.to_string(), witness, method.into()]).map_err(csv_failure)?;
            }
            finish_csv(w)
        }
    }
}

fn csv_failure(e: csv::Error) -> Failure {
    Failure::Usage(format!("csv output: {e}"))
}

fn finish_csv(w: csv::Writer<Vec<u8>>) -> Result<String, Failure> {
    let bytes = w.into_inner().map_err(|e| Failure::Usage(format!("csv output: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Set file: one integer per line, blank lines ignored, values in `[1, N]`,
/// no repeats.
fn read_set_file(path: &Path, n: usize) -> Result<IntervalSet, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let mut set = IntervalSet::empty(n);
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let bad = |why: &str| Failure::Usage(format!("{}:{}: {why}: {line:?}", path.display(), i + 1));
        let v: usize = line.parse().map_err(|_| bad("not a positive integer"))?;
        if v == 0 || v > n {
            return Err(bad(&format!("outside [1, {n}]")));
        }
        if set.contains(v) {
            return Err(bad("repeated element"));
        }
        set.insert(v)?;
    }
    Ok(set)
}

fn build_set(s: &SetArgs) -> Result<IntervalSet, Failure> {
    let n = s.n as usize;
    Ok(match &s.source {
        Source::Exact => {
            let cache = load_cache(s.cache.as_deref())?;
            lookup(n, &cache, &mut R3Solver::default())?.witness
        }
        Source::Greedy => greedy_3ap_free(n),
        Source::Behrend => behrend_set_auto(n)?,
        Source::Full => IntervalSet::full(n),
        Source::Random => random_3ap_free(n, &mut rand_chacha::ChaCha8Rng::seed_from_u64(s.seed)),
        Source::File(path) => read_set_file(path, n)?,
    })
}

fn verdict_csv(trace: &PipelineTrace) -> Result<String, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["id", "holds", "vacuous", "lhs", "rhs"]).map_err(csv_failure)?;
    for v in &trace.verdicts {
        w.write_record([v.id.to_string(), v.holds.to_string(), v.vacuous.to_string(), format_real(v.lhs.0), format_real(v.rhs.0)])
            .map_err(csv_failure)?;
    }
    finish_csv(w)
}

fn cmd_pipeline(a: &PipelineArgs) -> Result<String, Failure> {
    let set = build_set(&a.set)?;
    let config = PipelineConfig {
        theta: match a.theta {
            Theta::Paper => ThetaMode::Paper,
            Theta::HalfDensity => ThetaMode::HalfDensity,
            Theta::Explicit(t) => ThetaMode::Explicit(t),
        },
        m: a.m.map_or(MChoice::Paper, |m| MChoice::Fixed(m as usize)),
    };
    let render = |t: &PipelineTrace| match a.format {
        Format::Json => Ok(t.to_json()),
        Format::Csv => verdict_csv(t),
    };
    match run_pipeline_with(&set, &config, &mut R3Solver::default()) {
        Ok(trace) => render(&trace),
        Err(VerificationError::Setup(e)) => Err(e.into()),
        Err(VerificationError::Failed { failed, report }) => Err(Failure::Verification {
            stdout: render(&report)?,
            message: format!("verdict {} false", failed.join(", ")),
        }),
    }
}

fn lemma_csv(report: &LemmaReport) -> Result<String, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["check", "holds", "lhs", "relation", "rhs"]).map_err(csv_failure)?;
    for c in &report.checks {
        w.write_record([c.name.to_string(), c.holds.to_string(), c.lhs.to_string(), c.relation.to_string(), c.rhs.to_string()])
            .map_err(csv_failure)?;
    }
    finish_csv(w)
}

fn cmd_varnavides(a: &VarnavidesArgs) -> Result<String, Failure> {
    let set = build_set(&a.set)?;
    let m = a.m as usize;
    if m > set.n() {
        return Err(Failure::Usage(format!("need M <= N, got M = {m}, N = {}", set.n())));
    }
    let r3_m = R3Solver::default().value(m)?;
    // the injected bound is T3(A) + 1, which no set can meet
    let shift = if a.inject_faulty_bound {
        Rational::from_integer(count_3aps(&set) as i128 + 1) - varnavides_lower_bound(set.len(), set.n(), m, r3_m)
    } else {
        Rational::from_integer(0)
    };
    let render = |r: &LemmaReport| match a.format {
        Format::Json => Ok(serde_json::to_string_pretty(r).expect("report serialises") + "\n"),
        Format::Csv => lemma_csv(r),
    };
    match verify_lemma_with_bound_shift(&set, m, r3_m, shift) {
        Ok(report) => render(&report),
        Err(VerificationError::Setup(e)) => Err(e.into()),
        Err(VerificationError::Failed { failed, report }) => Err(Failure::Verification {
            stdout: render(&report)?,
            message: format!("check {} false", failed.join(", ")),
        }),
    }
}

fn cmd_cache(action: &CacheAction) -> Result<String, Failure> {
    match action {
        CacheAction::Build { n, cache } => build_cache(*n, cache),
        CacheAction::Verify { cache } => {
            let table = R3Cache::load(cache)?;
            let checked = table.verify(&mut R3Solver::default())?;
            Ok(format!("verified {checked} of {} records\n", table.len()))
        }
    }
}

fn build_cache(range: NRange, path: &Path) -> Result<String, Failure> {
    let mut table = R3Cache::load(path)?;
    let mut solver = R3Solver::default();
    let mut added = 0;
    for n in range.iter() {
        if table.get(n).is_none() {
            table.insert(solver.solve(n)?.clone());
            added += 1;
        }
    }
    table.store(path)?;
    Ok(format!("added {added} records, {} total\n", table.len()))
}
