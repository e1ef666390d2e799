//! Spatial elections under p-norms.
//!
//! Coordinates are exact rationals. Distances are compared in power form
//! (`Σ|Δ|^p` rather than its root), so rankings under integer `p` and the
//! infinity norm are decided exactly. Non-integer exponents fall back to
//! `f64`, where two values within a relative band of [`FLOAT_TIE_BAND`] count
//! as tied.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::profile::{CandidateId, PreferenceProfile, VoterId};
use crate::rational::{abs_diff, format_rational, int, parse_rational, RationalText};

pub const FLOAT_TIE_BAND: f64 = 1e-12;

/// Lattice resolution per half-axis used by [`random_spatial`].
pub const LATTICE_STEPS: i64 = 1000;

/// Regeneration attempts per point before giving up on a tie-free instance.
pub const TIE_RETRY_BUDGET: usize = 1000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpatialError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("election needs at least one voter and one candidate")]
    EmptyElection,
    #[error("points must have at least one coordinate")]
    ZeroDimension,
    #[error("scale must be positive")]
    NonpositiveScale,
    #[error("norm exponent must be at least 1, got {0}")]
    InvalidNorm(String),
    #[error("generator bound must be positive")]
    NonpositiveBound,
    #[error("could not generate a tie-free {what} after {attempts} attempts")]
    TieEliminationFailed { what: &'static str, attempts: usize },
}

/// A point with exact rational coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Point(pub Vec<BigRational>);

impl Point {
    pub fn from_ints(coords: &[i64]) -> Self {
        Point(coords.iter().map(|&c| int(c)).collect())
    }

    pub fn dimension(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[BigRational] {
        &self.0
    }
}

impl Serialize for Point {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = serializer.serialize_seq(Some(self.0.len()))?;
        for c in &self.0 {
            seq.serialize_element(&RationalText(c.clone()))?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for Point {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let coords = Vec::<RationalText>::deserialize(deserializer)?;
        Ok(Point(coords.into_iter().map(|r| r.0).collect()))
    }
}

/// A p-norm with rational `p ≥ 1`, or the infinity norm.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Norm {
    P(BigRational),
    Infinity,
}

impl Norm {
    pub fn p(p: BigRational) -> Result<Self, SpatialError> {
        if p < BigRational::one() {
            return Err(SpatialError::InvalidNorm(format_rational(&p)));
        }
        Ok(Norm::P(p))
    }

    pub fn manhattan() -> Self {
        Norm::P(BigRational::one())
    }

    pub fn integer(p: u32) -> Self {
        assert!(p >= 1, "p-norm exponent must be at least 1");
        Norm::P(int(p as i64))
    }

    pub fn is_manhattan(&self) -> bool {
        matches!(self, Norm::P(p) if p.is_one())
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, Norm::Infinity)
    }

    /// The exponent when it is an integer, so comparisons stay exact.
    pub fn integer_exponent(&self) -> Option<i32> {
        match self {
            Norm::P(p) if p.is_integer() => p.to_integer().to_i32(),
            _ => None,
        }
    }

    pub fn is_exact(&self) -> bool {
        self.is_infinity() || self.integer_exponent().is_some()
    }
}

impl fmt::Display for Norm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Norm::P(p) => write!(f, "p:{}", format_rational(p)),
            Norm::Infinity => f.write_str("inf"),
        }
    }
}

impl FromStr for Norm {
    type Err = SpatialError;

    /// Accepts `inf`, `infinity`, `p:<rational>` or a bare rational/decimal.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim().to_ascii_lowercase();
        if matches!(t.as_str(), "inf" | "infinity" | "p:inf" | "linf") {
            return Ok(Norm::Infinity);
        }
        let body = t.strip_prefix("p:").unwrap_or(&t);
        let p = parse_rational(body).map_err(|_| SpatialError::InvalidNorm(s.to_string()))?;
        Norm::p(p)
    }
}

impl Serialize for Norm {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Norm {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A quantity ordered like the true distance.
#[derive(Debug, Clone, PartialEq)]
pub enum Magnitude {
    Exact(BigRational),
    Approx(f64),
}

impl Magnitude {
    pub fn to_f64(&self) -> f64 {
        match self {
            Magnitude::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
            Magnitude::Approx(x) => *x,
        }
    }

    /// Ordering with float values inside the tie band treated as equal.
    pub fn compare(&self, other: &Magnitude) -> Ordering {
        match (self, other) {
            (Magnitude::Exact(a), Magnitude::Exact(b)) => a.cmp(b),
            _ => {
                let (a, b) = (self.to_f64(), other.to_f64());
                if floats_tied(a, b) {
                    Ordering::Equal
                } else {
                    a.total_cmp(&b)
                }
            }
        }
    }
}

fn floats_tied(a: f64, b: f64) -> bool {
    (a - b).abs() <= FLOAT_TIE_BAND * a.abs().max(b.abs()).max(1.0)
}

/// `Σ|aᵢ−bᵢ|^p` for finite `p` (exact for integer `p`), `max|aᵢ−bᵢ|` for infinity.
pub fn distance_power(a: &Point, b: &Point, norm: &Norm) -> Result<Magnitude, SpatialError> {
    if a.dimension() != b.dimension() {
        return Err(SpatialError::DimensionMismatch {
            expected: a.dimension(),
            found: b.dimension(),
        });
    }
    Ok(distance_power_unchecked(a, b, norm))
}

fn distance_power_unchecked(a: &Point, b: &Point, norm: &Norm) -> Magnitude {
    let diffs = a.0.iter().zip(&b.0).map(|(x, y)| abs_diff(x, y));
    match norm {
        Norm::Infinity => Magnitude::Exact(diffs.max().unwrap_or_else(BigRational::zero)),
        Norm::P(p) => match norm.integer_exponent() {
            Some(1) => Magnitude::Exact(diffs.fold(BigRational::zero(), |acc, d| acc + d)),
            Some(k) => Magnitude::Exact(diffs.fold(BigRational::zero(), |acc, d| acc + d.pow(k))),
            None => {
                let exp = p.to_f64().expect("finite exponent");
                Magnitude::Approx(diffs.map(|d| d.to_f64().unwrap_or(f64::NAN).powf(exp)).sum())
            }
        },
    }
}

/// Voters and candidates located in a common `D`-dimensional space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpatialElection {
    dimension: usize,
    voters: Vec<Point>,
    candidates: Vec<Point>,
}

impl SpatialElection {
    pub fn new(voters: Vec<Point>, candidates: Vec<Point>) -> Result<Self, SpatialError> {
        if voters.is_empty() || candidates.is_empty() {
            return Err(SpatialError::EmptyElection);
        }
        let dimension = candidates[0].dimension();
        if dimension == 0 {
            return Err(SpatialError::ZeroDimension);
        }
        if let Some(p) = voters.iter().chain(&candidates).find(|p| p.dimension() != dimension) {
            return Err(SpatialError::DimensionMismatch {
                expected: dimension,
                found: p.dimension(),
            });
        }
        Ok(Self {
            dimension,
            voters,
            candidates,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn voters(&self) -> &[Point] {
        &self.voters
    }

    pub fn candidates(&self) -> &[Point] {
        &self.candidates
    }

    pub fn n(&self) -> usize {
        self.voters.len()
    }

    pub fn m(&self) -> usize {
        self.candidates.len()
    }

    /// Applies `f` to every point, keeping the voter/candidate structure.
    pub fn map_points(&self, mut f: impl FnMut(&Point) -> Point) -> Result<Self, SpatialError> {
        Self::new(
            self.voters.iter().map(&mut f).collect(),
            self.candidates.iter().map(&mut f).collect(),
        )
    }
}

/// Two candidates at exactly equal distance from a voter.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistanceTie {
    pub voter: VoterId,
    /// The tied pair, lower index first (and ranked first).
    pub candidates: [CandidateId; 2],
}

#[derive(Debug, Clone, PartialEq)]
pub struct Derivation {
    pub profile: PreferenceProfile,
    pub ties: Vec<DistanceTie>,
}

impl Derivation {
    pub fn is_strict(&self) -> bool {
        self.ties.is_empty()
    }
}

/// Ranks candidates by increasing distance from `voter`. Returns the ranking
/// and the adjacent tied pairs (ties resolved by ascending index).
fn rank_by_distance(voter: &Point, candidates: &[Point], norm: &Norm) -> (Vec<usize>, Vec<(usize, usize)>) {
    let dist: Vec<Magnitude> = candidates
        .iter()
        .map(|c| distance_power_unchecked(voter, c, norm))
        .collect();
    let mut order: Vec<usize> = (0..candidates.len()).collect();
    let mut ties = Vec::new();
    if norm.is_exact() {
        order.sort_by(|&a, &b| dist[a].compare(&dist[b]).then(a.cmp(&b)));
        for w in order.windows(2) {
            if dist[w[0]].compare(&dist[w[1]]) == Ordering::Equal {
                ties.push((w[0], w[1]));
            }
        }
    } else {
        let val: Vec<f64> = dist.iter().map(Magnitude::to_f64).collect();
        order.sort_by(|&a, &b| val[a].total_cmp(&val[b]).then(a.cmp(&b)));
        // band-tied runs are reordered by index so the tie-break matches the exact path
        let mut start = 0;
        while start < order.len() {
            let mut end = start + 1;
            while end < order.len() && floats_tied(val[order[end - 1]], val[order[end]]) {
                end += 1;
            }
            order[start..end].sort_unstable();
            for w in order[start..end].windows(2) {
                ties.push((w[0], w[1]));
            }
            start = end;
        }
    }
    (order, ties)
}

/// Proximity preferences: each voter ranks candidates by increasing distance.
/// Exact ties are broken by ascending candidate index and reported.
pub fn derive_profile(e: &SpatialElection, norm: &Norm) -> Derivation {
    let mut rankings = Vec::with_capacity(e.n());
    let mut ties = Vec::new();
    for (v, voter) in e.voters.iter().enumerate() {
        let (order, tied) = rank_by_distance(voter, &e.candidates, norm);
        ties.extend(tied.into_iter().map(|(a, b)| DistanceTie {
            voter: VoterId(v),
            candidates: [CandidateId(a), CandidateId(b)],
        }));
        rankings.push(order);
    }
    let profile = PreferenceProfile::new(e.m(), rankings).expect("distance orders are permutations");
    Derivation { profile, ties }
}

/// Three voters and three candidates in the plane whose proximity preferences
/// form a Condorcet cycle under every p-norm.
pub fn lemma4_instance() -> SpatialElection {
    let voters = vec![
        Point::from_ints(&[9, 0]),
        Point::from_ints(&[0, 9]),
        Point::from_ints(&[-9, 0]),
    ];
    let candidates = vec![
        Point::from_ints(&[1, -1]),
        Point::from_ints(&[8, 10]),
        Point::from_ints(&[-9, 9]),
    ];
    SpatialElection::new(voters, candidates).expect("static instance is valid")
}

/// Maps every point `x` to `scale · (x + shift)`.
pub fn translate_scale(
    e: &SpatialElection,
    shift: &Point,
    scale: &BigRational,
) -> Result<SpatialElection, SpatialError> {
    if !scale.is_positive() {
        return Err(SpatialError::NonpositiveScale);
    }
    if shift.dimension() != e.dimension() {
        return Err(SpatialError::DimensionMismatch {
            expected: e.dimension(),
            found: shift.dimension(),
        });
    }
    e.map_points(|p| Point(p.0.iter().zip(&shift.0).map(|(x, s)| scale * (x + s)).collect()))
}

/// Parameters of the uniform lattice generator.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpatialParams {
    pub m: usize,
    pub n: usize,
    pub dimension: usize,
    /// Points lie in `[-bound, bound]^D`.
    #[serde(with = "crate::rational::text")]
    pub bound: BigRational,
    /// Norm under which the generated profile must be tie-free.
    pub norm: Norm,
}

impl SpatialParams {
    pub fn new(m: usize, n: usize, dimension: usize, bound: i64, norm: Norm) -> Self {
        Self {
            m,
            n,
            dimension,
            bound: int(bound),
            norm,
        }
    }
}

fn lattice_point<R: Rng>(rng: &mut R, dimension: usize, bound: &BigRational) -> Point {
    Point(
        (0..dimension)
            .map(|_| {
                let k = rng.random_range(-LATTICE_STEPS..=LATTICE_STEPS);
                bound * BigRational::new(BigInt::from(k), BigInt::from(LATTICE_STEPS))
            })
            .collect(),
    )
}

/// Random election with i.i.d. uniform lattice points in `[-bound, bound]^D`,
/// drawn from `rng`. Duplicate candidates and voters with a distance tie are
/// redrawn, so the derived profile under `params.norm` is strict.
pub fn random_spatial_with<R: Rng>(params: &SpatialParams, rng: &mut R) -> Result<SpatialElection, SpatialError> {
    if params.m == 0 || params.n == 0 {
        return Err(SpatialError::EmptyElection);
    }
    if params.dimension == 0 {
        return Err(SpatialError::ZeroDimension);
    }
    if !params.bound.is_positive() {
        return Err(SpatialError::NonpositiveBound);
    }
    let mut candidates: Vec<Point> = Vec::with_capacity(params.m);
    let mut taken = HashSet::with_capacity(params.m);
    for _ in 0..params.m {
        let point = (0..TIE_RETRY_BUDGET)
            .map(|_| lattice_point(rng, params.dimension, &params.bound))
            .find(|p| !taken.contains(p))
            .ok_or(SpatialError::TieEliminationFailed {
                what: "candidate",
                attempts: TIE_RETRY_BUDGET,
            })?;
        taken.insert(point.clone());
        candidates.push(point);
    }
    let mut voters = Vec::with_capacity(params.n);
    for _ in 0..params.n {
        let point = (0..TIE_RETRY_BUDGET)
            .map(|_| lattice_point(rng, params.dimension, &params.bound))
            .find(|p| rank_by_distance(p, &candidates, &params.norm).1.is_empty())
            .ok_or(SpatialError::TieEliminationFailed {
                what: "voter",
                attempts: TIE_RETRY_BUDGET,
            })?;
        voters.push(point);
    }
    SpatialElection::new(voters, candidates)
}

/// Seeded form of [`random_spatial_with`].
pub fn random_spatial(params: &SpatialParams, seed: u64) -> Result<SpatialElection, SpatialError> {
    random_spatial_with(params, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// JSON spatial document:
/// `{"dimension": .., "norm": "p:<rational>"|"inf", "voters": [..], "candidates": [..]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpatialDocument {
    pub dimension: usize,
    pub norm: Norm,
    pub voters: Vec<Point>,
    pub candidates: Vec<Point>,
}

impl SpatialDocument {
    pub fn new(e: &SpatialElection, norm: &Norm) -> Self {
        Self {
            dimension: e.dimension(),
            norm: norm.clone(),
            voters: e.voters().to_vec(),
            candidates: e.candidates().to_vec(),
        }
    }

    /// Validates the document and returns the election it describes.
    pub fn election(&self) -> Result<SpatialElection, SpatialError> {
        let e = SpatialElection::new(self.voters.clone(), self.candidates.clone())?;
        if e.dimension() != self.dimension {
            return Err(SpatialError::DimensionMismatch {
                expected: self.dimension,
                found: e.dimension(),
            });
        }
        Ok(e)
    }
}
