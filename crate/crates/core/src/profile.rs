//! Ordinal preference profiles.
//!
//! A [`PreferenceProfile`] holds one strict, complete ranking per voter. Both
//! the ranking (best to worst) and its inverse (candidate to position) are
//! stored so that pairwise preference queries and rank lookups are O(1).

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Index of a candidate, in `[0, m)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CandidateId(pub usize);

/// Index of a voter, in `[0, n)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VoterId(pub usize);

impl CandidateId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl VoterId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for CandidateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "c{}", self.0)
    }
}

impl fmt::Display for VoterId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProfileError {
    #[error("profile must have at least one candidate and one voter")]
    EmptyProfile,
    #[error("declared voter count {declared} does not match {actual} rankings")]
    VoterCountMismatch { declared: usize, actual: usize },
    #[error("voter {voter} ranks candidate {candidate} more than once")]
    DuplicateCandidateInRanking { voter: usize, candidate: usize },
    #[error("voter {voter} does not rank candidate {candidate}")]
    MissingCandidate { voter: usize, candidate: usize },
    #[error("voter {voter} ranks candidate {candidate}, outside [0, {m})")]
    CandidateOutOfRange { voter: usize, candidate: usize, m: usize },
    #[error("index {index} out of range for {what} (size {size})")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        size: usize,
    },
}

/// `n` strict rankings over `m` candidates.
#[derive(Clone, PartialEq, Eq)]
pub struct PreferenceProfile {
    m: usize,
    rankings: Vec<Vec<CandidateId>>,
    // positions[v][c] = 0-based position of candidate c in voter v's ranking
    positions: Vec<Vec<u32>>,
}

impl fmt::Debug for PreferenceProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PreferenceProfile")
            .field("m", &self.m)
            .field("n", &self.n())
            .field("rankings", &self.raw_rankings())
            .finish()
    }
}

/// Checks that `rankings` is a valid profile over `m` candidates.
///
/// Reports the first offending voter. The declared voter count is checked
/// against the number of rankings.
pub fn validate_profile(m: usize, n: usize, rankings: &[Vec<usize>]) -> Result<(), ProfileError> {
    if m == 0 || n == 0 || rankings.is_empty() {
        return Err(ProfileError::EmptyProfile);
    }
    if n != rankings.len() {
        return Err(ProfileError::VoterCountMismatch {
            declared: n,
            actual: rankings.len(),
        });
    }
    let mut seen = vec![false; m];
    for (voter, ranking) in rankings.iter().enumerate() {
        seen.iter_mut().for_each(|s| *s = false);
        for &candidate in ranking {
            if candidate >= m {
                return Err(ProfileError::CandidateOutOfRange { voter, candidate, m });
            }
            if seen[candidate] {
                return Err(ProfileError::DuplicateCandidateInRanking { voter, candidate });
            }
            seen[candidate] = true;
        }
        if let Some(candidate) = seen.iter().position(|s| !s) {
            return Err(ProfileError::MissingCandidate { voter, candidate });
        }
    }
    Ok(())
}

impl PreferenceProfile {
    /// Builds a profile from best-to-worst rankings, validating them.
    pub fn new(m: usize, rankings: Vec<Vec<usize>>) -> Result<Self, ProfileError> {
        validate_profile(m, rankings.len(), &rankings)?;
        let positions = rankings
            .iter()
            .map(|ranking| {
                let mut pos = vec![0u32; m];
                for (p, &c) in ranking.iter().enumerate() {
                    pos[c] = p as u32;
                }
                pos
            })
            .collect();
        let rankings = rankings
            .into_iter()
            .map(|r| r.into_iter().map(CandidateId).collect())
            .collect();
        Ok(Self { m, rankings, positions })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.rankings.len()
    }

    pub fn candidates(&self) -> impl Iterator<Item = CandidateId> {
        (0..self.m).map(CandidateId)
    }

    pub fn voters(&self) -> impl Iterator<Item = VoterId> {
        (0..self.n()).map(VoterId)
    }

    /// Voter `v`'s ranking, best first.
    pub fn ranking(&self, v: VoterId) -> &[CandidateId] {
        &self.rankings[v.0]
    }

    pub fn raw_rankings(&self) -> Vec<Vec<usize>> {
        self.rankings.iter().map(|r| r.iter().map(|c| c.0).collect()).collect()
    }

    fn check_voter(&self, v: VoterId) -> Result<(), ProfileError> {
        if v.0 >= self.n() {
            return Err(ProfileError::IndexOutOfRange {
                what: "voter",
                index: v.0,
                size: self.n(),
            });
        }
        Ok(())
    }

    fn check_candidate(&self, c: CandidateId) -> Result<(), ProfileError> {
        if c.0 >= self.m {
            return Err(ProfileError::IndexOutOfRange {
                what: "candidate",
                index: c.0,
                size: self.m,
            });
        }
        Ok(())
    }

    /// True iff voter `v` ranks `a` strictly above `b`.
    pub fn prefers(&self, v: VoterId, a: CandidateId, b: CandidateId) -> Result<bool, ProfileError> {
        self.check_voter(v)?;
        self.check_candidate(a)?;
        self.check_candidate(b)?;
        Ok(self.prefers_unchecked(v.0, a.0, b.0))
    }

    /// 1-based position of candidate `i` in voter `j`'s ranking.
    pub fn rank_position(&self, i: CandidateId, j: VoterId) -> Result<usize, ProfileError> {
        self.check_voter(j)?;
        self.check_candidate(i)?;
        Ok(self.rank_unchecked(j.0, i.0) as usize + 1)
    }

    #[inline]
    pub(crate) fn prefers_unchecked(&self, v: usize, a: usize, b: usize) -> bool {
        self.positions[v][a] < self.positions[v][b]
    }

    /// 0-based rank; lower is better.
    #[inline]
    pub(crate) fn rank_unchecked(&self, v: usize, c: usize) -> u32 {
        self.positions[v][c]
    }

    /// Number of voters ranking `a` above `b`.
    pub fn pairwise_support(&self, a: CandidateId, b: CandidateId) -> usize {
        self.positions.iter().filter(|pos| pos[a.0] < pos[b.0]).count()
    }

    pub fn to_document(&self) -> ProfileDocument {
        ProfileDocument {
            m: self.m,
            n: self.n(),
            rankings: self.raw_rankings(),
        }
    }
}

/// JSON interchange form: `{"m": .., "n": .., "rankings": [[..], ..]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProfileDocument {
    pub m: usize,
    pub n: usize,
    pub rankings: Vec<Vec<usize>>,
}

impl TryFrom<ProfileDocument> for PreferenceProfile {
    type Error = ProfileError;

    fn try_from(doc: ProfileDocument) -> Result<Self, Self::Error> {
        validate_profile(doc.m, doc.n, &doc.rankings)?;
        PreferenceProfile::new(doc.m, doc.rankings)
    }
}

impl From<&PreferenceProfile> for ProfileDocument {
    fn from(p: &PreferenceProfile) -> Self {
        p.to_document()
    }
}

impl Serialize for PreferenceProfile {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_document().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PreferenceProfile {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let doc = ProfileDocument::deserialize(deserializer)?;
        PreferenceProfile::try_from(doc).map_err(serde::de::Error::custom)
    }
}

/// The three-voter cyclic profile `0≻1≻2`, `1≻2≻0`, `2≻0≻1`.
pub fn cyclic_profile() -> PreferenceProfile {
    PreferenceProfile::new(3, vec![vec![0, 1, 2], vec![1, 2, 0], vec![2, 0, 1]]).expect("static profile is valid")
}
