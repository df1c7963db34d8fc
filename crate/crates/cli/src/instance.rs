//! Runtime choice of platform family, and the transcript file format.

use std::path::Path;

use nilnike_core::cyclic::CyclicTripleGroup;
use nilnike_core::heisenberg::HeisenbergGroup;
use nilnike_core::protocol::{setup, setup_with_generators, PrivateKey, ProtocolParams, Transcript};
use nilnike_core::quaternion::{precision_for, MulTable, QuatParams, QuaternionPlatform};
use nilnike_core::{Platform, PlatformDescriptor};
use num_bigint::BigUint;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::config::{Family, RunConfig, PRNG};
use crate::error::{io_err, CliError, CliResult};

/// A platform of any family.
#[derive(Clone, Debug)]
#[allow(clippy::large_enum_variant)]
pub enum AnyPlatform {
    Heisenberg(HeisenbergGroup),
    CyclicTriple(CyclicTripleGroup),
    Quaternion(QuaternionPlatform),
}

/// Protocol parameters over a platform of any family.
#[derive(Clone, Debug)]
#[allow(clippy::large_enum_variant)]
pub enum Instance {
    Heisenberg(ProtocolParams<HeisenbergGroup>),
    CyclicTriple(ProtocolParams<CyclicTripleGroup>),
    Quaternion(ProtocolParams<QuaternionPlatform>),
}

/// Runs `$body` with `$params` bound to the concrete `ProtocolParams`.
#[macro_export]
macro_rules! with_instance {
    ($inst:expr, $params:ident => $body:expr) => {
        match $inst {
            $crate::instance::Instance::Heisenberg($params) => $body,
            $crate::instance::Instance::CyclicTriple($params) => $body,
            $crate::instance::Instance::Quaternion($params) => $body,
        }
    };
}

impl AnyPlatform {
    pub fn from_config(cfg: &RunConfig) -> CliResult<Self> {
        Self::build(
            cfg.family,
            cfg.p.clone(),
            cfg.m,
            cfg.alpha,
            cfg.n,
            cfg.t.clone(),
            cfg.precision,
        )
    }

    pub fn build(
        family: Family,
        p: BigUint,
        m: usize,
        alpha: u32,
        n: usize,
        t: Option<BigUint>,
        precision: Option<u32>,
    ) -> CliResult<Self> {
        Ok(match family {
            Family::Heisenberg => AnyPlatform::Heisenberg(HeisenbergGroup::new(p, m)?),
            Family::CyclicTriple => AnyPlatform::CyclicTriple(CyclicTripleGroup::new(p, alpha)?),
            Family::Quaternion => {
                let base = QuatParams::new(p, alpha, n)?;
                let t = t.unwrap_or_else(|| base.t().clone());
                let precision = precision.unwrap_or_else(|| precision_for(n, alpha));
                let q = QuatParams::custom(base.p().clone(), t, precision, alpha, n, MulTable::standard())?;
                AnyPlatform::Quaternion(QuaternionPlatform::new(q)?)
            }
        })
    }

    pub fn from_descriptor(d: &PlatformDescriptor) -> CliResult<Self> {
        match d {
            PlatformDescriptor::Heisenberg { p, m } => Self::build(Family::Heisenberg, p.clone(), *m, 1, 2, None, None),
            PlatformDescriptor::CyclicTriple { p, alpha } => {
                Self::build(Family::CyclicTriple, p.clone(), 1, *alpha, 2, None, None)
            }
            PlatformDescriptor::Quaternion {
                p,
                alpha,
                n,
                t,
                precision,
            } => Self::build(
                Family::Quaternion,
                p.clone(),
                1,
                *alpha,
                *n,
                Some(t.clone()),
                Some(*precision),
            ),
        }
    }

    /// Samples generators and fixes the protocol parameters.
    pub fn setup(self, n: usize, rng: &mut ChaCha20Rng, max_retries: u32) -> CliResult<Instance> {
        Ok(match self {
            AnyPlatform::Heisenberg(g) => Instance::Heisenberg(setup(g, n, rng, max_retries)?),
            AnyPlatform::CyclicTriple(g) => Instance::CyclicTriple(setup(g, n, rng, max_retries)?),
            AnyPlatform::Quaternion(g) => Instance::Quaternion(setup(g, n, rng, max_retries)?),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlatformJson {
    pub family: String,
    pub p: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub m: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub alpha: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub t: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub precision: Option<u32>,
}

impl From<&PlatformDescriptor> for PlatformJson {
    fn from(d: &PlatformDescriptor) -> Self {
        let mut out = PlatformJson {
            family: d.family().to_string(),
            p: d.p().to_string(),
            m: None,
            alpha: None,
            n: None,
            t: None,
            precision: None,
        };
        match d {
            PlatformDescriptor::Heisenberg { m, .. } => out.m = Some(*m),
            PlatformDescriptor::CyclicTriple { alpha, .. } => out.alpha = Some(*alpha),
            PlatformDescriptor::Quaternion {
                alpha, n, t, precision, ..
            } => {
                out.alpha = Some(*alpha);
                out.n = Some(*n);
                out.t = Some(t.to_string());
                out.precision = Some(*precision);
            }
        }
        out
    }
}

impl PlatformJson {
    fn descriptor(&self) -> CliResult<PlatformDescriptor> {
        let missing = |k: &str| CliError::Transcript(format!("platform.{k} missing"));
        let big = |v: &str| {
            v.parse::<BigUint>()
                .map_err(|_| CliError::Transcript(format!("bad number {v:?}")))
        };
        let p = big(&self.p)?;
        Ok(match self.family.as_str() {
            "heisenberg" => PlatformDescriptor::Heisenberg {
                p,
                m: self.m.ok_or_else(|| missing("m"))?,
            },
            "cyclic-triple" => PlatformDescriptor::CyclicTriple {
                p,
                alpha: self.alpha.ok_or_else(|| missing("alpha"))?,
            },
            "quaternion" => PlatformDescriptor::Quaternion {
                p,
                alpha: self.alpha.ok_or_else(|| missing("alpha"))?,
                n: self.n.ok_or_else(|| missing("n"))?,
                t: big(self.t.as_deref().ok_or_else(|| missing("t"))?)?,
                precision: self.precision.ok_or_else(|| missing("precision"))?,
            },
            other => return Err(CliError::Transcript(format!("unknown platform {other:?}"))),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShareJson {
    pub i: usize,
    pub j: usize,
    pub element_hex: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrivateJson {
    pub j: usize,
    pub a: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranscriptFile {
    pub platform: PlatformJson,
    pub n: usize,
    pub prng: String,
    pub seed: u64,
    pub generators: Vec<String>,
    pub shares: Vec<ShareJson>,
    pub key_order: String,
    /// Present only for transcripts written in test mode.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub private_keys: Option<Vec<PrivateJson>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub derived_keys: Option<Vec<String>>,
}

/// Encodes parameters and a transcript. Private material is included only
/// when `secrets` is given.
pub fn to_file<P: Platform>(
    params: &ProtocolParams<P>,
    transcript: &Transcript<P::Element>,
    seed: u64,
    secrets: Option<(&[PrivateKey], &[P::Element])>,
) -> TranscriptFile {
    let g = &params.platform;
    let enc = |e: &P::Element| hex::encode(g.encode(e));
    TranscriptFile {
        platform: PlatformJson::from(&g.descriptor()),
        n: params.n,
        prng: PRNG.to_string(),
        seed,
        generators: params.generators.iter().map(enc).collect(),
        shares: transcript
            .shares
            .iter()
            .map(|(&(i, j), e)| ShareJson {
                i,
                j,
                element_hex: enc(e),
            })
            .collect(),
        key_order: params.key_order.to_string(),
        private_keys: secrets.map(|(keys, _)| {
            keys.iter()
                .map(|k| PrivateJson {
                    j: k.j,
                    a: k.a.to_string(),
                })
                .collect()
        }),
        derived_keys: secrets.map(|(_, derived)| derived.iter().map(enc).collect()),
    }
}

/// A transcript read back from disk.
pub struct Loaded<P: Platform> {
    pub params: ProtocolParams<P>,
    pub transcript: Transcript<P::Element>,
    /// First recorded derived key, when the file was written in test mode.
    pub honest_key: Option<P::Element>,
}

#[allow(clippy::large_enum_variant)]
pub enum AnyLoaded {
    Heisenberg(Loaded<HeisenbergGroup>),
    CyclicTriple(Loaded<CyclicTripleGroup>),
    Quaternion(Loaded<QuaternionPlatform>),
}

fn decode_hex<P: Platform>(g: &P, s: &str) -> CliResult<P::Element> {
    let bytes = hex::decode(s).map_err(|e| CliError::Transcript(format!("bad hex: {e}")))?;
    Ok(g.decode(&bytes)?)
}

fn load<P: Platform>(platform: P, file: &TranscriptFile) -> CliResult<Loaded<P>> {
    let gens = file
        .generators
        .iter()
        .map(|s| decode_hex(&platform, s))
        .collect::<CliResult<Vec<_>>>()?;
    if gens.len() != file.n {
        return Err(CliError::Transcript(format!(
            "{} generators for n = {}",
            gens.len(),
            file.n
        )));
    }
    let params = setup_with_generators(platform, gens)?;
    if params.key_order.to_string() != file.key_order {
        return Err(CliError::Transcript("key_order does not match the generators".into()));
    }
    let mut transcript = Transcript::new();
    for s in &file.shares {
        if s.i == 0 || s.i > file.n || s.j == 0 || s.j > file.n + 1 {
            return Err(CliError::Transcript(format!(
                "share index ({}, {}) out of range",
                s.i, s.j
            )));
        }
        transcript
            .shares
            .insert((s.i, s.j), decode_hex(&params.platform, &s.element_hex)?);
    }
    for i in 1..=file.n {
        for j in 1..=file.n + 1 {
            transcript.share(i, j)?;
        }
    }
    let honest_key = match file.derived_keys.as_deref() {
        Some([first, ..]) => Some(decode_hex(&params.platform, first)?),
        _ => None,
    };
    Ok(Loaded {
        params,
        transcript,
        honest_key,
    })
}

impl TranscriptFile {
    pub fn read(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(io_err(path))?;
        serde_json::from_str(&text).map_err(|e| CliError::Transcript(e.to_string()))
    }

    pub fn load(&self) -> CliResult<AnyLoaded> {
        Ok(match AnyPlatform::from_descriptor(&self.platform.descriptor()?)? {
            AnyPlatform::Heisenberg(g) => AnyLoaded::Heisenberg(load(g, self)?),
            AnyPlatform::CyclicTriple(g) => AnyLoaded::CyclicTriple(load(g, self)?),
            AnyPlatform::Quaternion(g) => AnyLoaded::Quaternion(load(g, self)?),
        })
    }
}
