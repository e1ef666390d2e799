//! Condorcet winners, winning-set certificates and the exact Condorcet
//! dimension.
//!
//! All majority tests are integer comparisons `2 * count > n`.

use itertools::Itertools;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::profile::{CandidateId, PreferenceProfile};
use crate::tournament::log2_ceil_bound;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CondorcetError {
    #[error("candidate set is empty")]
    EmptySet,
    #[error("candidate {candidate} is outside [0, {m})")]
    CandidateOutOfRange { candidate: usize, m: usize },
    #[error("no Condorcet winning set of size at most {k_max}")]
    DimensionExceedsBound { k_max: usize },
    #[error("search bound must be at least 1")]
    InvalidBound,
}

/// Support of one outside candidate against a winning set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChallengerSupport {
    pub challenger: CandidateId,
    /// Voters preferring some member of the set over the challenger.
    pub count: usize,
}

/// Proof that a set is Condorcet winning: for each outside candidate, the
/// number of voters who prefer some set member to it, each exceeding `n/2`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WinningSetCertificate {
    pub set: Vec<CandidateId>,
    pub per_challenger: Vec<ChallengerSupport>,
    pub n: usize,
}

impl WinningSetCertificate {
    pub fn size(&self) -> usize {
        self.set.len()
    }

    /// Recomputes every count from scratch and checks the certificate's
    /// structure: challengers are exactly the outside candidates and every
    /// count is a strict majority.
    pub fn recheck(&self, profile: &PreferenceProfile) -> bool {
        if self.n != profile.n() || self.set.is_empty() {
            return false;
        }
        let outside: Vec<CandidateId> = profile.candidates().filter(|c| !self.set.contains(c)).collect();
        if outside.len() != self.per_challenger.len() {
            return false;
        }
        outside.iter().zip(&self.per_challenger).all(|(&j, entry)| {
            let count = profile
                .voters()
                .filter(|&v| self.set.iter().any(|&i| profile.prefers(v, i, j).unwrap_or(false)))
                .count();
            entry.challenger == j && entry.count == count && 2 * count > self.n
        })
    }
}

/// Outcome of testing one candidate set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Winning(WinningSetCertificate),
    /// The first outside candidate (by index) that the set fails to beat.
    Defeated {
        challenger: CandidateId,
        count: usize,
    },
}

impl Verdict {
    pub fn certificate(&self) -> Option<&WinningSetCertificate> {
        match self {
            Verdict::Winning(cert) => Some(cert),
            Verdict::Defeated { .. } => None,
        }
    }

    pub fn into_certificate(self) -> Option<WinningSetCertificate> {
        match self {
            Verdict::Winning(cert) => Some(cert),
            Verdict::Defeated { .. } => None,
        }
    }

    pub fn is_winning(&self) -> bool {
        matches!(self, Verdict::Winning(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimensionResult {
    pub dimension: usize,
    pub witness: WinningSetCertificate,
    pub k_searched: usize,
}

/// Reusable buffers for repeated set checks on one profile.
struct SetChecker<'a> {
    profile: &'a PreferenceProfile,
    best_rank: Vec<u32>,
    inside: Vec<bool>,
}

impl<'a> SetChecker<'a> {
    fn new(profile: &'a PreferenceProfile) -> Self {
        Self {
            profile,
            best_rank: vec![0; profile.n()],
            inside: vec![false; profile.m()],
        }
    }

    fn load(&mut self, set: &[usize]) {
        let p = self.profile;
        for (v, best) in self.best_rank.iter_mut().enumerate() {
            *best = set.iter().map(|&i| p.rank_unchecked(v, i)).min().unwrap_or(u32::MAX);
        }
        self.inside.iter_mut().for_each(|x| *x = false);
        for &i in set {
            self.inside[i] = true;
        }
    }

    /// Voters whose favourite member of the loaded set is ranked above `j`.
    fn count(&self, j: usize) -> usize {
        self.best_rank
            .iter()
            .enumerate()
            .filter(|&(v, &best)| best < self.profile.rank_unchecked(v, j))
            .count()
    }

    /// Index of the first outside candidate without strict majority, or `None`.
    fn first_failure(&self) -> Option<(usize, usize)> {
        let n = self.profile.n();
        (0..self.profile.m())
            .filter(|&j| !self.inside[j])
            .map(|j| (j, self.count(j)))
            .find(|&(_, c)| 2 * c <= n)
    }

    fn certificate(&self, set: &[usize]) -> WinningSetCertificate {
        let per_challenger = (0..self.profile.m())
            .filter(|&j| !self.inside[j])
            .map(|j| ChallengerSupport {
                challenger: CandidateId(j),
                count: self.count(j),
            })
            .collect();
        WinningSetCertificate {
            set: set.iter().copied().map(CandidateId).collect(),
            per_challenger,
            n: self.profile.n(),
        }
    }
}

/// The candidate beating every other by strict majority, if any.
pub fn condorcet_winner(profile: &PreferenceProfile) -> Option<CandidateId> {
    let n = profile.n();
    profile.candidates().find(|&i| {
        profile
            .candidates()
            .filter(|&j| j != i)
            .all(|j| 2 * profile.pairwise_support(i, j) > n)
    })
}

fn normalize_set(profile: &PreferenceProfile, s: &[CandidateId]) -> Result<Vec<usize>, CondorcetError> {
    if s.is_empty() {
        return Err(CondorcetError::EmptySet);
    }
    let mut set: Vec<usize> = s.iter().map(|c| c.0).collect();
    if let Some(&bad) = set.iter().find(|&&c| c >= profile.m()) {
        return Err(CondorcetError::CandidateOutOfRange {
            candidate: bad,
            m: profile.m(),
        });
    }
    set.sort_unstable();
    set.dedup();
    Ok(set)
}

/// Tests whether `s` is a Condorcet winning set of `profile`.
pub fn is_condorcet_winning_set(profile: &PreferenceProfile, s: &[CandidateId]) -> Result<Verdict, CondorcetError> {
    let set = normalize_set(profile, s)?;
    let mut checker = SetChecker::new(profile);
    checker.load(&set);
    Ok(match checker.first_failure() {
        None => Verdict::Winning(checker.certificate(&set)),
        Some((j, count)) => Verdict::Defeated {
            challenger: CandidateId(j),
            count,
        },
    })
}

/// The default search bound `⌈log₂ m⌉`, which always suffices for odd `n`.
pub fn default_k_max(m: usize) -> usize {
    log2_ceil_bound(m)
}

/// Smallest winning set of size at most `k_max`, searched by increasing size
/// and lexicographically within a size. The first winning set found is the
/// witness.
pub fn condorcet_dimension(profile: &PreferenceProfile, k_max: usize) -> Result<DimensionResult, CondorcetError> {
    if k_max == 0 {
        return Err(CondorcetError::InvalidBound);
    }
    let m = profile.m();
    let mut checker = SetChecker::new(profile);
    for k in 1..=k_max.min(m) {
        for set in (0..m).combinations(k) {
            checker.load(&set);
            if checker.first_failure().is_none() {
                return Ok(DimensionResult {
                    dimension: k,
                    witness: checker.certificate(&set),
                    k_searched: k,
                });
            }
        }
    }
    Err(CondorcetError::DimensionExceedsBound { k_max })
}
