//! Run configuration: flat `key=value` files, overridden by command-line
//! flags, with `NILNIKE_SEED` as the seed fallback.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_bigint::BigUint;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;

use crate::error::{io_err, CliError, CliResult};

/// Name and version of the generator behind every seeded run. Changing the
/// algorithm or the way streams are derived requires a new name.
pub const PRNG: &str = "chacha20-v1";

pub const SEED_ENV: &str = "NILNIKE_SEED";

/// Independent stream `stream` of the generator seeded with `seed`.
pub fn rng_for(seed: u64, stream: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    Heisenberg,
    CyclicTriple,
    Quaternion,
}

impl FromStr for Family {
    type Err = CliError;
    fn from_str(s: &str) -> CliResult<Self> {
        match s {
            "heisenberg" => Ok(Family::Heisenberg),
            "cyclic-triple" | "cyclic" => Ok(Family::CyclicTriple),
            "quaternion" => Ok(Family::Quaternion),
            _ => Err(CliError::Config(format!("unknown platform {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum AttackKind {
    Generic,
    HeisenbergLinear,
    QuaternionLinear,
}

impl AttackKind {
    pub fn name(self) -> &'static str {
        match self {
            AttackKind::Generic => "generic",
            AttackKind::HeisenbergLinear => "heisenberg-linear",
            AttackKind::QuaternionLinear => "quaternion-linear",
        }
    }

    /// Attacks that apply to a platform family, generic first.
    pub fn available(family: Family) -> Vec<AttackKind> {
        match family {
            Family::Heisenberg => vec![AttackKind::Generic, AttackKind::HeisenbergLinear],
            Family::CyclicTriple => vec![AttackKind::Generic],
            Family::Quaternion => vec![AttackKind::Generic, AttackKind::QuaternionLinear],
        }
    }
}

/// Parses an attack list such as `generic,linear`. `linear` stands for the
/// linear attack of whichever platform is in use; `all` for every applicable
/// attack.
pub fn parse_attacks(spec: &str, family: Family) -> CliResult<Vec<AttackKind>> {
    let available = AttackKind::available(family);
    let mut out = Vec::new();
    for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let picked: Vec<AttackKind> = match item {
            "all" => available.clone(),
            "linear" => available
                .iter()
                .copied()
                .filter(|&a| a != AttackKind::Generic)
                .collect(),
            name => available.iter().copied().filter(|a| a.name() == name).collect(),
        };
        if picked.is_empty() {
            return Err(CliError::Config(format!(
                "attack {item:?} does not apply to this platform"
            )));
        }
        out.extend(picked);
    }
    out.sort();
    out.dedup();
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub family: Family,
    pub p: BigUint,
    pub m: usize,
    pub alpha: u32,
    pub n: usize,
    pub t: Option<BigUint>,
    pub precision: Option<u32>,
    pub seed: u64,
    /// Raw attack list, resolved per family by [`parse_attacks`].
    pub attacks: String,
    pub budget: u128,
    pub transcript: Option<PathBuf>,
    pub report: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub grid: Vec<BigUint>,
    pub trials: Option<usize>,
    pub workers: usize,
    pub max_retries: u32,
    pub test_mode: bool,
    pub no_timing: bool,
}

pub type Settings = BTreeMap<String, String>;

/// Reads a `key=value` file. Blank lines and lines starting with `#` are
/// skipped; keys may use `-` or `_`.
pub fn parse_config_text(text: &str) -> CliResult<Settings> {
    let mut out = Settings::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("line {}: expected key=value", no + 1)))?;
        out.insert(k.trim().replace('_', "-"), v.trim().to_string());
    }
    Ok(out)
}

pub fn read_config_file(path: &Path) -> CliResult<Settings> {
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    parse_config_text(&text)
}

fn parse<T: FromStr>(key: &str, v: &str) -> CliResult<T> {
    v.parse()
        .map_err(|_| CliError::Config(format!("{key}: cannot parse {v:?}")))
}

fn parse_bool(key: &str, v: &str) -> CliResult<bool> {
    match v {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(CliError::Config(format!("{key}: expected true or false, got {v:?}"))),
    }
}

const KEYS: &[&str] = &[
    "platform",
    "p",
    "m",
    "alpha",
    "n",
    "t",
    "precision",
    "seed",
    "attacks",
    "budget",
    "transcript",
    "report",
    "out",
    "grid",
    "trials",
    "workers",
    "max-retries",
    "test-mode",
    "no-timing",
];

impl RunConfig {
    /// Builds a configuration from merged settings. `env_seed` is consulted
    /// only when no `seed` key is present.
    pub fn from_settings(s: &Settings, env_seed: Option<&str>) -> CliResult<Self> {
        if let Some(unknown) = s.keys().find(|k| !KEYS.contains(&k.as_str())) {
            return Err(CliError::Config(format!("unknown key {unknown:?}")));
        }
        let get = |k: &str| s.get(k).map(String::as_str);
        let family: Family = get("platform").unwrap_or("heisenberg").parse()?;
        let default_p = match family {
            Family::Heisenberg => "101",
            Family::CyclicTriple => "3",
            Family::Quaternion => "5",
        };
        let p: BigUint = parse("p", get("p").unwrap_or(default_p))?;
        let seed = match get("seed").or(env_seed) {
            Some(v) => parse("seed", v)?,
            None => 0,
        };
        let attacks = get("attacks").unwrap_or("all").to_string();
        let grid = match get("grid") {
            Some(list) => list
                .split(',')
                .map(str::trim)
                .filter(|x| !x.is_empty())
                .map(|x| parse("grid", x))
                .collect::<CliResult<Vec<BigUint>>>()?,
            None => vec![101u32.into(), 401u32.into(), 1601u32.into()],
        };
        let opt_path = |k: &str| get(k).map(PathBuf::from);
        Ok(RunConfig {
            family,
            p,
            m: parse("m", get("m").unwrap_or("1"))?,
            alpha: parse("alpha", get("alpha").unwrap_or("1"))?,
            n: parse("n", get("n").unwrap_or("2"))?,
            t: get("t").map(|v| parse("t", v)).transpose()?,
            precision: get("precision").map(|v| parse("precision", v)).transpose()?,
            seed,
            attacks,
            budget: parse("budget", get("budget").unwrap_or("67108864"))?,
            transcript: opt_path("transcript"),
            report: opt_path("report"),
            out: opt_path("out"),
            grid,
            trials: get("trials").map(|v| parse("trials", v)).transpose()?,
            workers: parse("workers", get("workers").unwrap_or("0"))?,
            max_retries: parse("max-retries", get("max-retries").unwrap_or("64"))?,
            test_mode: parse_bool("test-mode", get("test-mode").unwrap_or("false"))?,
            no_timing: parse_bool("no-timing", get("no-timing").unwrap_or("false"))?,
        })
    }
}
