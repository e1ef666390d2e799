//! Embedding arbitrary strict profiles into spatial elections.
//!
//! Two constructions, both with integer coordinates and `ρ(i, j)` the 1-based
//! rank of candidate `i` for voter `j`:
//!
//! * candidate simplex (`D = m`): candidate `i` at `2m·eᵢ`, voter `j` at
//!   `(m − ρ(1, j), …, m − ρ(m, j))`. Under L∞ the distance from voter `j` to
//!   candidate `i` is exactly `m + ρ(i, j)`. Works for every p-norm.
//! * voter simplex (`D = n`): voter `j` at `B·eⱼ`, candidate `i` at
//!   `(−ρ(i, 1), …, −ρ(i, n))`. Under L∞ with `B ≥ m` the distance is
//!   `B + ρ(i, j)`. For `1 < p < ∞` a large enough `B` exists; it is found by
//!   doubling until the roundtrip verifies.
//!
//! Every result is checked by re-deriving the profile before it is returned.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::profile::{PreferenceProfile, VoterId};
use crate::rational::int;
use crate::spatial::{derive_profile, Norm, Point, SpatialDocument, SpatialElection};

/// Doublings of `B` tried by [`embed_voter_simplex`] after the initial value.
pub const SCALE_DOUBLING_BUDGET: u32 = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EmbeddingError {
    #[error("the voter simplex construction needs p > 1 or the infinity norm, got {0}")]
    UnsupportedNorm(String),
    #[error("embedding does not reproduce the profile: {0}")]
    RoundtripFailed(EmbeddingMismatch),
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EmbeddingMismatch {
    #[error("election has {m} candidates and {n} voters, profile has {expected_m} and {expected_n}")]
    Shape {
        m: usize,
        n: usize,
        expected_m: usize,
        expected_n: usize,
    },
    #[error("voter {voter} has a distance tie")]
    Tie { voter: VoterId },
    #[error("voter {voter} ranks candidates differently")]
    Ranking { voter: VoterId },
}

impl EmbeddingMismatch {
    pub fn voter(&self) -> Option<VoterId> {
        match self {
            EmbeddingMismatch::Shape { .. } => None,
            EmbeddingMismatch::Tie { voter } | EmbeddingMismatch::Ranking { voter } => Some(*voter),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Construction {
    CandidateSimplex,
    VoterSimplex,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmbeddingResult {
    pub election: SpatialElection,
    pub construction: Construction,
    pub norm: Norm,
    /// The voter-simplex scale `B`.
    pub scale: Option<BigInt>,
}

/// Spatial document plus construction metadata.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddingDocument {
    #[serde(flatten)]
    pub spatial: SpatialDocument,
    pub construction: Construction,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub scale: Option<String>,
}

impl EmbeddingResult {
    pub fn to_document(&self) -> EmbeddingDocument {
        EmbeddingDocument {
            spatial: SpatialDocument::new(&self.election, &self.norm),
            construction: self.construction,
            scale: self.scale.as_ref().map(BigInt::to_string),
        }
    }
}

/// True iff `e` under `norm` derives exactly `profile`, with no distance ties.
pub fn verify_embedding(
    profile: &PreferenceProfile,
    e: &SpatialElection,
    norm: &Norm,
) -> Result<(), EmbeddingMismatch> {
    if e.m() != profile.m() || e.n() != profile.n() {
        return Err(EmbeddingMismatch::Shape {
            m: e.m(),
            n: e.n(),
            expected_m: profile.m(),
            expected_n: profile.n(),
        });
    }
    let derived = derive_profile(e, norm);
    let first_tie = derived.ties.first().map(|t| t.voter);
    let first_diff = profile
        .voters()
        .find(|&v| derived.profile.ranking(v) != profile.ranking(v));
    match (first_tie, first_diff) {
        (Some(t), Some(d)) if d < t => Err(EmbeddingMismatch::Ranking { voter: d }),
        (Some(t), _) => Err(EmbeddingMismatch::Tie { voter: t }),
        (None, Some(d)) => Err(EmbeddingMismatch::Ranking { voter: d }),
        (None, None) => Ok(()),
    }
}

fn rank(profile: &PreferenceProfile, i: usize, j: usize) -> i64 {
    profile
        .rank_position(crate::CandidateId(i), VoterId(j))
        .expect("indices in range") as i64
}

/// Candidate-simplex embedding in `D = m` dimensions.
pub fn embed_candidate_simplex(profile: &PreferenceProfile, norm: &Norm) -> Result<EmbeddingResult, EmbeddingError> {
    let m = profile.m();
    let corner = 2 * m as i64;
    let candidates = (0..m)
        .map(|i| Point((0..m).map(|k| int(if k == i { corner } else { 0 })).collect()))
        .collect();
    let voters = (0..profile.n())
        .map(|j| Point((0..m).map(|i| int(m as i64 - rank(profile, i, j))).collect()))
        .collect();
    let election = SpatialElection::new(voters, candidates).expect("profile is non-empty");
    verify_embedding(profile, &election, norm).map_err(EmbeddingError::RoundtripFailed)?;
    Ok(EmbeddingResult {
        election,
        construction: Construction::CandidateSimplex,
        norm: norm.clone(),
        scale: None,
    })
}

fn voter_simplex_election(profile: &PreferenceProfile, scale: &BigRational) -> SpatialElection {
    let n = profile.n();
    let voters = (0..n)
        .map(|j| Point((0..n).map(|k| if k == j { scale.clone() } else { int(0) }).collect()))
        .collect();
    let candidates = (0..profile.m())
        .map(|i| Point((0..n).map(|j| int(-rank(profile, i, j))).collect()))
        .collect();
    SpatialElection::new(voters, candidates).expect("profile is non-empty")
}

/// Voter-simplex embedding in `D = n` dimensions.
///
/// `B` starts at `max(m, n·m)` and doubles until the roundtrip verifies.
pub fn embed_voter_simplex(profile: &PreferenceProfile, norm: &Norm) -> Result<EmbeddingResult, EmbeddingError> {
    if norm.is_manhattan() {
        return Err(EmbeddingError::UnsupportedNorm(norm.to_string()));
    }
    let (m, n) = (profile.m(), profile.n());
    let mut scale = BigInt::from(m.max(n * m));
    let mut last = None;
    for _ in 0..=SCALE_DOUBLING_BUDGET {
        let election = voter_simplex_election(profile, &BigRational::from_integer(scale.clone()));
        match verify_embedding(profile, &election, norm) {
            Ok(()) => {
                return Ok(EmbeddingResult {
                    election,
                    construction: Construction::VoterSimplex,
                    norm: norm.clone(),
                    scale: Some(scale),
                })
            }
            Err(mismatch) => last = Some(mismatch),
        }
        scale *= 2;
    }
    Err(EmbeddingError::RoundtripFailed(last.expect("at least one attempt")))
}

/// Dispatches to the requested construction.
pub fn embed(
    profile: &PreferenceProfile,
    construction: Construction,
    norm: &Norm,
) -> Result<EmbeddingResult, EmbeddingError> {
    match construction {
        Construction::CandidateSimplex => embed_candidate_simplex(profile, norm),
        Construction::VoterSimplex => embed_voter_simplex(profile, norm),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::cyclic_profile;
    use crate::spatial::{distance_power, Magnitude};
    use proptest::prelude::*;

    fn norms() -> Vec<Norm> {
        ["1", "1.5", "2", "3", "inf"]
            .iter()
            .map(|s| s.parse().unwrap())
            .collect()
    }

    #[test]
    fn candidate_simplex_two_candidates() {
        let p = PreferenceProfile::new(2, vec![vec![0, 1]]).unwrap();
        let r = embed_candidate_simplex(&p, &Norm::Infinity).unwrap();
        let e = &r.election;
        assert_eq!(e.candidates(), &[Point::from_ints(&[4, 0]), Point::from_ints(&[0, 4])]);
        assert_eq!(e.voters(), &[Point::from_ints(&[1, 0])]);
        let d0 = distance_power(&e.voters()[0], &e.candidates()[0], &Norm::Infinity).unwrap();
        let d1 = distance_power(&e.voters()[0], &e.candidates()[1], &Norm::Infinity).unwrap();
        assert_eq!((d0, d1), (Magnitude::Exact(int(3)), Magnitude::Exact(int(4))));
    }

    #[test]
    fn single_candidate_embeddings() {
        let p = PreferenceProfile::new(1, vec![vec![0], vec![0]]).unwrap();
        let r = embed_candidate_simplex(&p, &Norm::manhattan()).unwrap();
        assert_eq!(r.election.candidates(), &[Point::from_ints(&[2])]);
        assert_eq!(r.election.voters()[0], Point::from_ints(&[0]));
        let r = embed_voter_simplex(&p, &Norm::integer(2)).unwrap();
        assert_eq!(r.election.dimension(), 2);
    }

    #[test]
    fn voter_simplex_one_voter() {
        let p = PreferenceProfile::new(2, vec![vec![0, 1]]).unwrap();
        let r = embed_voter_simplex(&p, &Norm::Infinity).unwrap();
        assert_eq!(r.scale, Some(BigInt::from(2)));
        assert_eq!(r.election.voters(), &[Point::from_ints(&[2])]);
        assert_eq!(
            r.election.candidates(),
            &[Point::from_ints(&[-1]), Point::from_ints(&[-2])]
        );
    }

    #[test]
    fn voter_simplex_rejects_manhattan() {
        assert_eq!(
            embed_voter_simplex(&cyclic_profile(), &Norm::manhattan()),
            Err(EmbeddingError::UnsupportedNorm("p:1".into()))
        );
    }

    #[test]
    fn cyclic_profile_roundtrips() {
        let p = cyclic_profile();
        for norm in norms() {
            let r = embed_candidate_simplex(&p, &norm).unwrap();
            assert_eq!(r.election.dimension(), 3);
            assert_eq!(derive_profile(&r.election, &norm).profile, p);
            if !norm.is_manhattan() {
                let r = embed_voter_simplex(&p, &norm).unwrap();
                assert_eq!(r.election.dimension(), 3);
                assert!(verify_embedding(&p, &r.election, &norm).is_ok());
            }
        }
    }

    #[test]
    fn swapped_candidates_fail_verification() {
        let p = PreferenceProfile::new(2, vec![vec![0, 1]]).unwrap();
        let e = embed_candidate_simplex(&p, &Norm::Infinity).unwrap().election;
        let swapped = SpatialElection::new(
            e.voters().to_vec(),
            vec![e.candidates()[1].clone(), e.candidates()[0].clone()],
        )
        .unwrap();
        assert_eq!(
            verify_embedding(&p, &swapped, &Norm::Infinity),
            Err(EmbeddingMismatch::Ranking { voter: VoterId(0) })
        );
        let wrong_shape = PreferenceProfile::new(3, vec![vec![0, 1, 2]]).unwrap();
        assert!(matches!(
            verify_embedding(&wrong_shape, &e, &Norm::Infinity),
            Err(EmbeddingMismatch::Shape { .. })
        ));
    }

    #[test]
    fn tie_reported_as_mismatch() {
        let p = PreferenceProfile::new(2, vec![vec![0, 1]]).unwrap();
        let e = SpatialElection::new(
            vec![Point::from_ints(&[0])],
            vec![Point::from_ints(&[1]), Point::from_ints(&[-1])],
        )
        .unwrap();
        assert_eq!(
            verify_embedding(&p, &e, &Norm::Infinity),
            Err(EmbeddingMismatch::Tie { voter: VoterId(0) })
        );
    }

    #[test]
    fn document_carries_construction() {
        let r = embed_voter_simplex(&cyclic_profile(), &Norm::Infinity).unwrap();
        let json = serde_json::to_value(r.to_document()).unwrap();
        assert_eq!(json["construction"], "voter-simplex");
        assert_eq!(json["scale"], "9");
        assert_eq!(json["norm"], "inf");
        assert_eq!(json["dimension"], 3);
    }

    fn arb_profile() -> impl Strategy<Value = PreferenceProfile> {
        (1usize..9, 1usize..8).prop_flat_map(|(m, n)| {
            proptest::collection::vec(Just((0..m).collect::<Vec<_>>()).prop_shuffle(), n)
                .prop_map(move |rankings| PreferenceProfile::new(m, rankings).unwrap())
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn both_constructions_roundtrip(p in arb_profile()) {
            for norm in norms() {
                prop_assert!(embed_candidate_simplex(&p, &norm).is_ok());
                if !norm.is_manhattan() {
                    let r = embed_voter_simplex(&p, &norm).unwrap();
                    prop_assert_eq!(r.election.dimension(), p.n());
                }
            }
        }
    }
}
