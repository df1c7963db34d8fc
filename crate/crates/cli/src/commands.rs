//! The four subcommands. Each returns a JSON summary for stdout and whether
//! the run counts as a success; hard errors come back as [`CliError`].

use std::path::Path;
use std::time::Instant;

use nilnike_core::attacks::{attack_heisenberg_linear, attack_quaternion_linear, eavesdrop_generic, AttackReport};
use nilnike_core::protocol::{derive_key, run_exchange, ProtocolParams, Transcript};
use nilnike_core::quaternion::{MulTable, Scalar, TableEntry};
use nilnike_core::verify::{run_all, run_suite, VerifyConfig};
use nilnike_core::{Error, Group, Platform};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{parse_attacks, rng_for, AttackKind, Family, RunConfig};
use crate::error::{io_err, CliError, CliResult};
use crate::instance::{to_file, AnyLoaded, AnyPlatform, Instance, TranscriptFile};
use crate::with_instance;

/// Result of a subcommand: what to print and the exit status it implies.
#[derive(Debug)]
pub struct Outcome {
    pub stdout: Value,
    pub success: bool,
}

fn write_text(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(io_err(path))
}

fn pretty(v: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

/// `exchange`: sets up an instance, runs every user, checks agreement.
pub fn exchange(cfg: &RunConfig) -> CliResult<Outcome> {
    let mut rng = rng_for(cfg.seed, 0);
    let instance = AnyPlatform::from_config(cfg)?.setup(cfg.n, &mut rng, cfg.max_retries)?;
    with_instance!(&instance, params => exchange_on(cfg, params, &mut rng))
}

fn exchange_on<P: Platform>(
    cfg: &RunConfig,
    params: &ProtocolParams<P>,
    rng: &mut rand_chacha::ChaCha20Rng,
) -> CliResult<Outcome> {
    let (keys, transcript) = run_exchange(params, rng);
    let derived = keys
        .iter()
        .map(|k| derive_key(params, k, &transcript))
        .collect::<Result<Vec<_>, _>>()?;
    let g = &params.platform;
    let consistent = derived.iter().all(|k| g.same(k, &derived[0]));
    let secrets = cfg.test_mode.then_some((&keys[..], &derived[..]));
    let file = to_file(params, &transcript, cfg.seed, secrets);

    let mut summary = json!({
        "command": "exchange",
        "platform": g.descriptor().summary(),
        "users": params.users(),
        "consistent": consistent,
    });
    match &cfg.transcript {
        Some(path) => {
            write_text(path, &pretty(&file))?;
            summary["transcript"] = json!(path.display().to_string());
        }
        None => summary["transcript"] = serde_json::to_value(&file).expect("serializable"),
    }
    if cfg.test_mode {
        summary["key_hex"] = json!(hex::encode(g.encode(&derived[0])));
    }
    if !consistent {
        return Err(CliError::KeyMismatch);
    }
    Ok(Outcome {
        stdout: summary,
        success: true,
    })
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct ReportJson {
    pub algorithm: String,
    pub success: bool,
    pub refused: bool,
    pub ops: u64,
    pub millis: f64,
    pub exponents: Option<Vec<String>>,
    pub key_hex: Option<String>,
}

type Linear<P> = fn(
    &ProtocolParams<P>,
    &Transcript<<P as Group>::Element>,
) -> nilnike_core::Result<AttackReport<<P as Group>::Element>>;

struct Attempt<E> {
    report: Option<AttackReport<E>>,
    millis: f64,
}

fn attempt<P: Platform>(
    kind: AttackKind,
    params: &ProtocolParams<P>,
    transcript: &Transcript<P::Element>,
    budget: u128,
    linear: Option<Linear<P>>,
) -> CliResult<Attempt<P::Element>> {
    let start = Instant::now();
    let result = match (kind, linear) {
        (AttackKind::Generic, _) => eavesdrop_generic(params, transcript, budget),
        (_, Some(f)) => f(params, transcript),
        (_, None) => return Err(CliError::Config(format!("{} does not apply here", kind.name()))),
    };
    let millis = start.elapsed().as_secs_f64() * 1e3;
    match result {
        Ok(r) => Ok(Attempt {
            report: Some(r),
            millis,
        }),
        Err(Error::BudgetExceeded { .. }) => Ok(Attempt { report: None, millis }),
        Err(e) => Err(e.into()),
    }
}

fn attack_loaded<P: Platform>(
    cfg: &RunConfig,
    kinds: &[AttackKind],
    params: &ProtocolParams<P>,
    transcript: &Transcript<P::Element>,
    honest: Option<&P::Element>,
    linear: Option<Linear<P>>,
) -> CliResult<Vec<ReportJson>> {
    let g = &params.platform;
    kinds
        .iter()
        .map(|&kind| {
            let a = attempt(kind, params, transcript, cfg.budget, linear)?;
            let millis = if cfg.no_timing { 0.0 } else { a.millis };
            Ok(match a.report {
                Some(r) => ReportJson {
                    algorithm: r.algorithm.to_string(),
                    success: honest.is_none_or(|h| g.same(h, &r.key)),
                    refused: false,
                    ops: r.ops,
                    millis,
                    exponents: Some(r.exponents.iter().map(|e| e.to_string()).collect()),
                    key_hex: Some(hex::encode(g.encode(&r.key))),
                },
                None => ReportJson {
                    algorithm: kind.name().to_string(),
                    success: false,
                    refused: true,
                    ops: 0,
                    millis,
                    exponents: None,
                    key_hex: None,
                },
            })
        })
        .collect()
}

/// `attack`: runs the selected attacks against a transcript file. Success
/// requires every attack to finish and, for test-mode transcripts, to match
/// the recorded key.
pub fn attack(cfg: &RunConfig) -> CliResult<Outcome> {
    let path = cfg
        .transcript
        .as_ref()
        .ok_or_else(|| CliError::Config("attack needs --transcript".into()))?;
    let file = TranscriptFile::read(path)?;
    let loaded = file.load()?;
    let family = match &loaded {
        AnyLoaded::Heisenberg(_) => Family::Heisenberg,
        AnyLoaded::CyclicTriple(_) => Family::CyclicTriple,
        AnyLoaded::Quaternion(_) => Family::Quaternion,
    };
    let kinds = parse_attacks(&cfg.attacks, family)?;
    let reports = match &loaded {
        AnyLoaded::Heisenberg(l) => attack_loaded(
            cfg,
            &kinds,
            &l.params,
            &l.transcript,
            l.honest_key.as_ref(),
            Some(attack_heisenberg_linear),
        )?,
        AnyLoaded::CyclicTriple(l) => {
            attack_loaded(cfg, &kinds, &l.params, &l.transcript, l.honest_key.as_ref(), None)?
        }
        AnyLoaded::Quaternion(l) => attack_loaded(
            cfg,
            &kinds,
            &l.params,
            &l.transcript,
            l.honest_key.as_ref(),
            Some(attack_quaternion_linear),
        )?,
    };
    let success = reports.iter().all(|r| r.success);
    if let Some(out) = &cfg.report {
        write_text(out, &pretty(&reports))?;
    }
    Ok(Outcome {
        stdout: serde_json::to_value(&reports).expect("serializable"),
        success,
    })
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct BenchRow {
    pub platform: String,
    pub p: String,
    pub alpha: u32,
    pub n: usize,
    pub algorithm: String,
    /// Mean over trials.
    pub ops: f64,
    pub millis: f64,
    pub refused: bool,
}

fn bench_point<P: Platform>(
    cfg: &RunConfig,
    params: &ProtocolParams<P>,
    rng: &mut rand_chacha::ChaCha20Rng,
    linear: Option<Linear<P>>,
    trials: usize,
) -> CliResult<Vec<BenchRow>> {
    let kinds = parse_attacks(&cfg.attacks, cfg.family)?;
    let mut totals = vec![(0u64, 0f64, false); kinds.len()];
    for _ in 0..trials {
        let (keys, transcript) = run_exchange(params, rng);
        let honest = derive_key(params, &keys[0], &transcript)?;
        for (slot, &kind) in kinds.iter().enumerate() {
            let a = attempt(kind, params, &transcript, cfg.budget, linear)?;
            match a.report {
                Some(r) if params.platform.same(&r.key, &honest) => {
                    totals[slot].0 += r.ops;
                    totals[slot].1 += a.millis;
                }
                Some(_) => return Err(CliError::KeyMismatch),
                None => totals[slot].2 = true,
            }
        }
    }
    let d = params.platform.descriptor();
    Ok(kinds
        .iter()
        .zip(totals)
        .map(|(kind, (ops, millis, refused))| BenchRow {
            platform: d.family().to_string(),
            p: d.p().to_string(),
            alpha: params.alpha,
            n: params.n,
            algorithm: kind.name().to_string(),
            ops: if refused { 0.0 } else { ops as f64 / trials as f64 },
            millis: if refused || cfg.no_timing {
                0.0
            } else {
                millis / trials as f64
            },
            refused,
        })
        .collect())
}

/// Rows for every grid point, in grid order. Points run in parallel, each on
/// its own random stream.
pub fn bench_rows(cfg: &RunConfig) -> CliResult<Vec<BenchRow>> {
    let trials = cfg.trials.unwrap_or(1).max(1);
    let run = || {
        cfg.grid
            .par_iter()
            .enumerate()
            .map(|(idx, p)| {
                let mut point = cfg.clone();
                point.p = p.clone();
                let mut rng = rng_for(cfg.seed, idx as u64);
                let instance = AnyPlatform::from_config(&point)?.setup(point.n, &mut rng, point.max_retries)?;
                match &instance {
                    Instance::Heisenberg(params) => {
                        bench_point(&point, params, &mut rng, Some(attack_heisenberg_linear), trials)
                    }
                    Instance::CyclicTriple(params) => bench_point(&point, params, &mut rng, None, trials),
                    Instance::Quaternion(params) => {
                        bench_point(&point, params, &mut rng, Some(attack_quaternion_linear), trials)
                    }
                }
            })
            .collect::<CliResult<Vec<_>>>()
    };
    let rows = if cfg.workers > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.workers)
            .build()
            .map_err(|e| CliError::Config(e.to_string()))?
            .install(run)?
    } else {
        run()?
    };
    Ok(rows.into_iter().flatten().collect())
}

pub fn bench_csv(rows: &[BenchRow]) -> CliResult<String> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(["platform", "p", "alpha", "n", "algorithm", "ops", "millis", "refused"])?;
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Config(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// `bench`: CSV of operation counts over the grid.
pub fn bench(cfg: &RunConfig) -> CliResult<(String, Outcome)> {
    let csv = bench_csv(&bench_rows(cfg)?)?;
    let mut summary = json!({ "command": "bench", "points": cfg.grid.len() });
    if let Some(out) = &cfg.out {
        write_text(out, &csv)?;
        summary["out"] = json!(out.display().to_string());
    }
    Ok((
        csv,
        Outcome {
            stdout: summary,
            success: true,
        },
    ))
}

/// Test fixtures selectable from the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fixture {
    /// `j·i = +k` instead of `-k`.
    CorruptedSignTable,
}

pub fn verify_config(cfg: &RunConfig, fixture: Option<Fixture>) -> VerifyConfig {
    let mut v = VerifyConfig::default();
    match cfg.family {
        Family::Heisenberg => {
            v.heis_p = cfg.p.clone();
            v.heis_m = cfg.m;
        }
        Family::CyclicTriple => {
            v.cyc_p = cfg.p.clone();
            v.cyc_alpha = cfg.alpha;
        }
        Family::Quaternion => {
            v.quat_p = cfg.p.clone();
            v.quat_alpha = cfg.alpha;
            v.quat_n = cfg.n;
        }
    }
    if let Some(t) = cfg.trials {
        v.trials = t;
    }
    if fixture == Some(Fixture::CorruptedSignTable) {
        v.table = MulTable::standard().with_entry(
            2,
            1,
            TableEntry {
                target: 3,
                negative: false,
                scalar: Scalar::One,
            },
        );
    }
    v
}

/// `verify`: runs one named invariant suite or all of them.
pub fn verify(cfg: &RunConfig, suite: Option<&str>, fixture: Option<Fixture>) -> CliResult<Outcome> {
    let v = verify_config(cfg, fixture);
    let passed = match suite {
        Some(name) => run_suite(name, &v, cfg.seed).map(|()| vec![name.to_string()]),
        None => run_all(&v, cfg.seed).map(|names| names.into_iter().map(String::from).collect()),
    }
    .map_err(|f| CliError::Verify {
        suite: f.suite.to_string(),
        detail: f.detail,
    })?;
    Ok(Outcome {
        stdout: json!({ "command": "verify", "passed": passed }),
        success: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Settings;

    fn cfg(pairs: &[(&str, &str)]) -> RunConfig {
        let s: Settings = pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
        RunConfig::from_settings(&s, None).unwrap()
    }

    #[test]
    fn csv_layout() {
        let row = BenchRow {
            platform: "heisenberg".into(),
            p: "101".into(),
            alpha: 1,
            n: 2,
            algorithm: "generic".into(),
            ops: 39.5,
            millis: 0.0,
            refused: false,
        };
        assert_eq!(
            bench_csv(&[row]).unwrap(),
            "platform,p,alpha,n,algorithm,ops,millis,refused\nheisenberg,101,1,2,generic,39.5,0.0,false\n"
        );
    }

    #[test]
    fn bench_is_seeded_per_point() {
        let a = bench_rows(&cfg(&[("grid", "101,401"), ("seed", "3"), ("workers", "2")])).unwrap();
        let b = bench_rows(&cfg(&[("grid", "401"), ("seed", "3")])).unwrap();
        assert_eq!(a.len(), 4);
        assert_ne!(a[0].ops, 0.0);
        // The second grid point owns stream 1, the lone point stream 0.
        assert_eq!(b.len(), 2);
        assert_eq!(a[2].p, b[0].p);
    }

    #[test]
    fn verify_overrides() {
        let v = verify_config(&cfg(&[("platform", "quaternion"), ("p", "11"), ("alpha", "3"), ("trials", "4")]), None);
        assert_eq!((v.quat_p.clone(), v.quat_alpha, v.trials), (11u32.into(), 3, 4));
        let bad = verify_config(&cfg(&[]), Some(Fixture::CorruptedSignTable));
        assert_eq!(run_suite("quaternion-relations", &bad, 0).unwrap_err().suite, "quaternion-relations");
    }
}
