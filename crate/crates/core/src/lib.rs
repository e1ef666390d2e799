//! Condorcet winning sets for ordinal and spatial elections.

pub mod condorcet;
pub mod embedding;
pub mod experiment;
pub mod planar;
pub mod profile;
pub mod rational;
pub mod spatial;
pub mod tournament;

pub use condorcet::{
    condorcet_dimension, condorcet_winner, default_k_max, is_condorcet_winning_set, ChallengerSupport, CondorcetError,
    DimensionResult, Verdict, WinningSetCertificate,
};
pub use embedding::{
    embed, embed_candidate_simplex, embed_voter_simplex, verify_embedding, Construction, EmbeddingDocument,
    EmbeddingError, EmbeddingMismatch, EmbeddingResult,
};
pub use experiment::{
    hunt_high_dimension, run_dimension_survey, ExperimentConfig, ExperimentError, ExperimentReport, Generator,
    HuntOutcome, Provenance, Witness,
};
pub use planar::{
    coordinate_medians, lemma2_check, planar_winning_set, quadrant_candidates, shear_to_l1, PlanarError, PlanarResult,
    Quadrant, QuadrantReport, QuadrantSelection,
};
pub use profile::{validate_profile, CandidateId, PreferenceProfile, ProfileDocument, ProfileError, VoterId};
pub use spatial::{
    derive_profile, distance_power, lemma4_instance, random_spatial, translate_scale, Derivation, DistanceTie,
    Magnitude, Norm, Point, SpatialDocument, SpatialElection, SpatialError, SpatialParams,
};
pub use tournament::{
    greedy_dominating_set, greedy_dominating_set_traced, is_dominating_set, log2_ceil_bound, majority_digraph,
    GreedyRound, GreedyTrace, Tournament, TournamentError,
};
