//! Seeded experiments: Condorcet-dimension surveys over random elections and
//! a hunt for instances of high dimension.
//!
//! Instance `i` of a run with seed `s` is drawn from a ChaCha8 stream keyed by
//! `(s, i)`, so results do not depend on how instances are scheduled across
//! threads. Reports list instances by index.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::condorcet::{condorcet_dimension, CondorcetError, WinningSetCertificate};
use crate::planar::{planar_winning_set, PlanarError};
use crate::profile::{PreferenceProfile, ProfileDocument};
use crate::rational::{format_rational, parse_rational};
use crate::spatial::{
    derive_profile, random_spatial_with, Norm, SpatialDocument, SpatialElection, SpatialError, SpatialParams,
};
use crate::tournament::log2_ceil_bound;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExperimentError {
    #[error("invalid experiment configuration: {0}")]
    InvalidConfig(String),
    #[error("instance {index}: {source}")]
    Generator { index: u64, source: SpatialError },
    #[error("instance {index}: {source}")]
    Planar { index: u64, source: PlanarError },
    #[error("instance {index}: {source}")]
    Dimension { index: u64, source: CondorcetError },
    #[error("could not start worker pool: {0}")]
    ThreadPool(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Generator {
    /// Independent uniformly random rankings.
    ImpartialCulture { m: usize, n: usize },
    /// Proximity preferences over uniform lattice points.
    Spatial(SpatialParams),
}

impl Generator {
    pub fn m(&self) -> usize {
        match self {
            Generator::ImpartialCulture { m, .. } => *m,
            Generator::Spatial(p) => p.m,
        }
    }

    pub fn n(&self) -> usize {
        match self {
            Generator::ImpartialCulture { n, .. } => *n,
            Generator::Spatial(p) => p.n,
        }
    }

    /// Whether instances go through the planar construction as well.
    pub fn feeds_planar(&self) -> bool {
        match self {
            Generator::Spatial(p) => {
                p.dimension == 2 && p.n % 2 == 1 && (p.norm.is_manhattan() || p.norm.is_infinity())
            }
            Generator::ImpartialCulture { .. } => false,
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::ImpartialCulture { m, n } => write!(f, "impartial:m={m},n={n}"),
            Generator::Spatial(p) => write!(
                f,
                "spatial:m={},n={},d={},box={},norm={}",
                p.m,
                p.n,
                p.dimension,
                format_rational(&p.bound),
                p.norm
            ),
        }
    }
}

impl FromStr for Generator {
    type Err = ExperimentError;

    /// `impartial:m=10,n=9` (or `ic:...`) and
    /// `spatial:m=20,n=21,d=2,box=100,norm=inf`. Spatial defaults: `d=2`,
    /// `box=100`, `norm=1`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = |msg: String| ExperimentError::InvalidConfig(msg);
        let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
        let mut fields = BTreeMap::new();
        for item in rest.split(',').filter(|t| !t.trim().is_empty()) {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| bad(format!("expected key=value, got {item:?}")))?;
            fields.insert(k.trim().to_ascii_lowercase(), v.trim().to_string());
        }
        let count = |key: &str, default: Option<usize>| -> Result<usize, ExperimentError> {
            match fields.get(key) {
                Some(v) => v
                    .parse()
                    .map_err(|_| bad(format!("{key} must be a non-negative integer"))),
                None => default.ok_or_else(|| bad(format!("missing {key}"))),
            }
        };
        let gen = match kind.trim() {
            "impartial" | "ic" => Generator::ImpartialCulture {
                m: count("m", None)?,
                n: count("n", None)?,
            },
            "spatial" => {
                let bound = match fields.get("box") {
                    Some(v) => parse_rational(v).map_err(|e| bad(e.to_string()))?,
                    None => crate::rational::int(100),
                };
                let norm = match fields.get("norm") {
                    Some(v) => v.parse::<Norm>().map_err(|e| bad(e.to_string()))?,
                    None => Norm::manhattan(),
                };
                Generator::Spatial(SpatialParams {
                    m: count("m", None)?,
                    n: count("n", None)?,
                    dimension: count("d", Some(2))?,
                    bound,
                    norm,
                })
            }
            other => return Err(bad(format!("unknown generator {other:?}"))),
        };
        Ok(gen)
    }
}

fn default_max_witnesses() -> usize {
    5
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub generator: Generator,
    pub instances: u64,
    pub seed: u64,
    /// Largest set size searched; defaults to `m`, which always terminates.
    #[serde(default)]
    pub k_max: Option<usize>,
    /// Highest-dimension instances kept in a survey report.
    #[serde(default = "default_max_witnesses")]
    pub max_witnesses: usize,
}

impl ExperimentConfig {
    pub fn new(generator: Generator, instances: u64, seed: u64) -> Self {
        Self {
            generator,
            instances,
            seed,
            k_max: None,
            max_witnesses: default_max_witnesses(),
        }
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        let bad = |msg: &str| Err(ExperimentError::InvalidConfig(msg.to_string()));
        if self.instances == 0 {
            return bad("instances must be at least 1");
        }
        if self.generator.m() == 0 || self.generator.n() == 0 {
            return bad("m and n must be at least 1");
        }
        if let Generator::Spatial(p) = &self.generator {
            if p.dimension == 0 {
                return bad("spatial dimension must be at least 1");
            }
        }
        if self.k_max == Some(0) {
            return bad("k_max must be at least 1");
        }
        Ok(())
    }

    fn k_max(&self) -> usize {
        self.k_max.unwrap_or(self.generator.m())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub seed: u64,
    pub index: u64,
}

/// RNG for instance `index` of a run seeded with `seed`.
pub fn instance_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// `n` independent uniformly random rankings of `m` candidates.
pub fn impartial_culture<R: Rng>(m: usize, n: usize, rng: &mut R) -> PreferenceProfile {
    let rankings = (0..n)
        .map(|_| {
            let mut r: Vec<usize> = (0..m).collect();
            r.shuffle(rng);
            r
        })
        .collect();
    PreferenceProfile::new(m, rankings).expect("shuffles are permutations")
}

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub provenance: Provenance,
    pub profile: PreferenceProfile,
    pub election: Option<SpatialElection>,
}

pub fn generate_instance(generator: &Generator, seed: u64, index: u64) -> Result<Instance, ExperimentError> {
    let mut rng = instance_rng(seed, index);
    let provenance = Provenance { seed, index };
    match generator {
        Generator::ImpartialCulture { m, n } => Ok(Instance {
            provenance,
            profile: impartial_culture(*m, *n, &mut rng),
            election: None,
        }),
        Generator::Spatial(params) => {
            let election =
                random_spatial_with(params, &mut rng).map_err(|source| ExperimentError::Generator { index, source })?;
            let profile = derive_profile(&election, &params.norm).profile;
            Ok(Instance {
                provenance,
                profile,
                election: Some(election),
            })
        }
    }
}

/// A fully serialized instance with its minimum winning set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub provenance: Provenance,
    pub dimension: usize,
    pub profile: ProfileDocument,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub election: Option<SpatialDocument>,
    pub certificate: WinningSetCertificate,
}

impl Witness {
    fn new(instance: &Instance, generator: &Generator, dimension: usize, certificate: WinningSetCertificate) -> Self {
        let election = match (generator, &instance.election) {
            (Generator::Spatial(p), Some(e)) => Some(SpatialDocument::new(e, &p.norm)),
            _ => None,
        };
        Self {
            provenance: instance.provenance,
            dimension,
            profile: instance.profile.to_document(),
            election,
            certificate,
        }
    }

    /// Independent re-verification: the certificate holds, it has the
    /// claimed size, and no smaller set is winning.
    pub fn reverify(&self) -> bool {
        let Ok(profile) = PreferenceProfile::try_from(self.profile.clone()) else {
            return false;
        };
        if let Some(doc) = &self.election {
            let Ok(e) = doc.election() else {
                return false;
            };
            if derive_profile(&e, &doc.norm).profile != profile {
                return false;
            }
        }
        let smaller_fails = self.dimension == 1
            || matches!(
                condorcet_dimension(&profile, self.dimension - 1),
                Err(CondorcetError::DimensionExceedsBound { .. })
            );
        self.certificate.size() == self.dimension && self.certificate.recheck(&profile) && smaller_fails
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanarComparison {
    pub index: u64,
    pub exact: usize,
    pub planar: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    /// Instance count per exact Condorcet dimension.
    pub histogram: BTreeMap<usize, u64>,
    /// Instances with no winning set of size `k_max` or less.
    pub exceeded_k_max: u64,
    pub max_dimension: usize,
    /// Lowest-index instances attaining `max_dimension`.
    pub witnesses: Vec<Witness>,
    /// Odd-`n` instances whose dimension exceeds `⌈log₂ m⌉`.
    pub log_bound_violations: Vec<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub planar: Option<Vec<PlanarComparison>>,
    /// Planar runs where the construction's set exceeds 3 or undercuts the exact dimension.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub planar_violations: Option<Vec<u64>>,
    /// Planar instances of dimension 3 or more.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub planar_dimension_three: Option<Vec<u64>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub wall_time_ms: Option<u64>,
}

impl ExperimentReport {
    /// The report with timing removed; a pure function of the configuration.
    pub fn without_timing(mut self) -> Self {
        self.wall_time_ms = None;
        self
    }
}

struct Outcome {
    instance: Instance,
    dimension: Option<(usize, WinningSetCertificate)>,
    planar: Option<usize>,
}

fn with_pool<T: Send>(threads: usize, job: impl FnOnce() -> T + Send) -> Result<T, ExperimentError> {
    if threads <= 1 {
        return Ok(job());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| ExperimentError::ThreadPool(e.to_string()))?;
    Ok(pool.install(job))
}

fn map_range<T: Send>(
    range: std::ops::Range<u64>,
    parallel: bool,
    f: impl Fn(u64) -> Result<T, ExperimentError> + Sync + Send,
) -> Result<Vec<T>, ExperimentError> {
    if parallel {
        range.into_par_iter().map(f).collect()
    } else {
        range.map(f).collect()
    }
}

fn survey_instance(cfg: &ExperimentConfig, index: u64) -> Result<Outcome, ExperimentError> {
    let instance = generate_instance(&cfg.generator, cfg.seed, index)?;
    let dimension = match condorcet_dimension(&instance.profile, cfg.k_max()) {
        Ok(r) => Some((r.dimension, r.witness)),
        Err(CondorcetError::DimensionExceedsBound { .. }) => None,
        Err(source) => return Err(ExperimentError::Dimension { index, source }),
    };
    let planar = match (&cfg.generator, &instance.election) {
        (Generator::Spatial(p), Some(e)) if cfg.generator.feeds_planar() => Some(
            planar_winning_set(e, &p.norm)
                .map_err(|source| ExperimentError::Planar { index, source })?
                .certificate
                .size(),
        ),
        _ => None,
    };
    Ok(Outcome {
        instance,
        dimension,
        planar,
    })
}

/// Exact dimension of every generated instance, plus the planar
/// construction's set size for planar L1/L∞ runs with odd `n`.
pub fn run_dimension_survey(cfg: &ExperimentConfig, threads: usize) -> Result<ExperimentReport, ExperimentError> {
    cfg.validate()?;
    let start = Instant::now();
    let outcomes = with_pool(threads, || {
        map_range(0..cfg.instances, threads > 1, |i| survey_instance(cfg, i))
    })??;

    let mut histogram = BTreeMap::new();
    let mut exceeded_k_max = 0;
    let mut log_bound_violations = Vec::new();
    let feeds_planar = cfg.generator.feeds_planar();
    let mut planar = Vec::new();
    let mut planar_violations = Vec::new();
    let mut planar_dimension_three = Vec::new();
    let log_bound = log2_ceil_bound(cfg.generator.m());
    let odd_n = cfg.generator.n() % 2 == 1;

    for o in &outcomes {
        let index = o.instance.provenance.index;
        let exact = o.dimension.as_ref().map(|(d, _)| *d);
        match exact {
            Some(d) => *histogram.entry(d).or_insert(0) += 1,
            None => exceeded_k_max += 1,
        }
        if odd_n && exact.is_none_or(|d| d > log_bound) {
            log_bound_violations.push(index);
        }
        if let Some(size) = o.planar {
            let exact = exact.unwrap_or(usize::MAX);
            planar.push(PlanarComparison {
                index,
                exact,
                planar: size,
            });
            if size > 3 || exact > size {
                planar_violations.push(index);
            }
            if exact >= 3 {
                planar_dimension_three.push(index);
            }
        }
    }

    let max_dimension = histogram.keys().next_back().copied().unwrap_or(0);
    let witnesses = outcomes
        .iter()
        .filter_map(|o| match &o.dimension {
            Some((d, cert)) if *d == max_dimension => Some(Witness::new(&o.instance, &cfg.generator, *d, cert.clone())),
            _ => None,
        })
        .take(cfg.max_witnesses)
        .collect();

    Ok(ExperimentReport {
        config: cfg.clone(),
        histogram,
        exceeded_k_max,
        max_dimension,
        witnesses,
        log_bound_violations,
        planar: feeds_planar.then_some(planar),
        planar_violations: feeds_planar.then_some(planar_violations),
        planar_dimension_three: feeds_planar.then_some(planar_dimension_three),
        wall_time_ms: Some(start.elapsed().as_millis() as u64),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HuntOutcome {
    pub config: ExperimentConfig,
    pub target: usize,
    /// Instances examined, including the witness if one was found.
    pub examined: u64,
    pub witness: Option<Witness>,
}

fn hunt_instance(cfg: &ExperimentConfig, target: usize, index: u64) -> Result<Option<Witness>, ExperimentError> {
    let instance = generate_instance(&cfg.generator, cfg.seed, index)?;
    match condorcet_dimension(&instance.profile, target - 1) {
        Ok(_) => Ok(None),
        Err(CondorcetError::DimensionExceedsBound { .. }) => {
            let full = condorcet_dimension(&instance.profile, instance.profile.m())
                .map_err(|source| ExperimentError::Dimension { index, source })?;
            Ok(Some(Witness::new(
                &instance,
                &cfg.generator,
                full.dimension,
                full.witness,
            )))
        }
        Err(source) => Err(ExperimentError::Dimension { index, source }),
    }
}

/// First instance (by index) whose Condorcet dimension is at least `target`.
pub fn hunt_high_dimension(
    cfg: &ExperimentConfig,
    target: usize,
    threads: usize,
) -> Result<HuntOutcome, ExperimentError> {
    cfg.validate()?;
    if target < 2 {
        return Err(ExperimentError::InvalidConfig("target must be at least 2".into()));
    }
    let chunk = if threads > 1 { threads as u64 * 32 } else { 1 };
    let found = with_pool(threads, || -> Result<Option<Witness>, ExperimentError> {
        let mut start = 0;
        while start < cfg.instances {
            let end = (start + chunk).min(cfg.instances);
            let hits = map_range(start..end, threads > 1, |i| hunt_instance(cfg, target, i))?;
            if let Some(w) = hits.into_iter().flatten().next() {
                return Ok(Some(w));
            }
            start = end;
        }
        Ok(None)
    })??;
    if let Some(w) = &found {
        assert!(w.reverify(), "hunt witness failed re-verification");
    }
    Ok(HuntOutcome {
        config: cfg.clone(),
        target,
        examined: found.as_ref().map_or(cfg.instances, |w| w.provenance.index + 1),
        witness: found,
    })
}
