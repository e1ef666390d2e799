//! Condorcet winning sets of size at most three for planar elections under
//! the Manhattan and infinity norms.
//!
//! Voters' coordinate medians split the plane into four quadrants. The
//! candidate nearest (in L1) to the median point within each quadrant beats
//! every other candidate of that quadrant by strict majority, so these
//! representatives form a winning set `S`, and some `S \ {cᵢ}` is already
//! winning. The infinity norm reduces to L1 through the shear
//! `(x, y) ↦ (x + y, y − x)`, which doubles every L∞ distance into an L1
//! distance and so leaves all rankings unchanged.

use num_rational::BigRational;
use num_traits::Signed;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::condorcet::{is_condorcet_winning_set, WinningSetCertificate};
use crate::profile::{CandidateId, PreferenceProfile, VoterId};
use crate::spatial::{derive_profile, DistanceTie, Norm, Point, SpatialElection};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PlanarError {
    #[error("planar construction needs a 2-dimensional election, got dimension {found}")]
    WrongDimension { found: usize },
    #[error("planar construction needs an odd number of voters, got {n}")]
    EvenVoterCount { n: usize },
    #[error("planar construction supports only the L1 and infinity norms, got {0}")]
    UnsupportedNorm(String),
    #[error("derived preferences are not strict ({count} distance ties, first at voter {})", first.voter.0)]
    TiedPreferences { count: usize, first: DistanceTie },
    #[error("no subset of the quadrant representatives is Condorcet winning")]
    NoCertifiedSubset { representatives: Vec<CandidateId> },
}

/// Quadrants around the median point, counter-clockwise from the all-positive one.
///
/// Boundaries are half-open: `Q1 = {x ≥ 0, y ≥ 0}`, `Q2 = {x < 0, y ≥ 0}`,
/// `Q3 = {x < 0, y < 0}`, `Q4 = {x ≥ 0, y < 0}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Quadrant {
    Q1,
    Q2,
    Q3,
    Q4,
}

impl Quadrant {
    pub const ALL: [Quadrant; 4] = [Quadrant::Q1, Quadrant::Q2, Quadrant::Q3, Quadrant::Q4];

    /// Quadrant of a point given relative to the median point.
    pub fn of(x: &BigRational, y: &BigRational) -> Quadrant {
        match (x.is_negative(), y.is_negative()) {
            (false, false) => Quadrant::Q1,
            (true, false) => Quadrant::Q2,
            (true, true) => Quadrant::Q3,
            (false, true) => Quadrant::Q4,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadrantSelection {
    #[serde(with = "crate::rational::text")]
    pub median_x: BigRational,
    #[serde(with = "crate::rational::text")]
    pub median_y: BigRational,
    /// Per quadrant, the candidate closest to the median point (L1).
    pub representatives: [Option<CandidateId>; 4],
    /// Quadrant of every candidate, by candidate index.
    pub assignment: Vec<Quadrant>,
}

impl QuadrantSelection {
    pub fn representative(&self, q: Quadrant) -> Option<CandidateId> {
        self.representatives[q.index()]
    }

    /// Distinct representatives in quadrant order.
    pub fn distinct_representatives(&self) -> Vec<CandidateId> {
        let mut out: Vec<CandidateId> = Vec::with_capacity(4);
        for c in self.representatives.iter().flatten() {
            if !out.contains(c) {
                out.push(*c);
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanarResult {
    pub certificate: WinningSetCertificate,
    /// The selection, computed on the sheared election for the infinity norm.
    pub selection: QuadrantSelection,
    pub sheared: bool,
    /// Sets tested, in order, ending with the certified one.
    pub attempts: Vec<Vec<CandidateId>>,
}

fn require_planar(e: &SpatialElection) -> Result<(), PlanarError> {
    if e.dimension() != 2 {
        return Err(PlanarError::WrongDimension { found: e.dimension() });
    }
    Ok(())
}

fn median(mut values: Vec<BigRational>) -> BigRational {
    values.sort();
    values.swap_remove(values.len() / 2)
}

/// Median x- and y-coordinates of the voters.
pub fn coordinate_medians(e: &SpatialElection) -> Result<(BigRational, BigRational), PlanarError> {
    require_planar(e)?;
    if e.n() % 2 == 0 {
        return Err(PlanarError::EvenVoterCount { n: e.n() });
    }
    let xs = e.voters().iter().map(|v| v.0[0].clone()).collect();
    let ys = e.voters().iter().map(|v| v.0[1].clone()).collect();
    Ok((median(xs), median(ys)))
}

/// Assigns candidates to quadrants around the median point and picks, per
/// quadrant, the L1-nearest candidate to that point (lowest index on ties).
pub fn quadrant_candidates(e: &SpatialElection) -> Result<QuadrantSelection, PlanarError> {
    let (mx, my) = coordinate_medians(e)?;
    let mut representatives: [Option<CandidateId>; 4] = [None; 4];
    let mut best: [Option<BigRational>; 4] = Default::default();
    let mut assignment = Vec::with_capacity(e.m());
    for (i, c) in e.candidates().iter().enumerate() {
        let x = &c.0[0] - &mx;
        let y = &c.0[1] - &my;
        let q = Quadrant::of(&x, &y);
        let dist = x.abs() + y.abs();
        let slot = q.index();
        if best[slot].as_ref().is_none_or(|b| dist < *b) {
            best[slot] = Some(dist);
            representatives[slot] = Some(CandidateId(i));
        }
        assignment.push(q);
    }
    Ok(QuadrantSelection {
        median_x: mx,
        median_y: my,
        representatives,
        assignment,
    })
}

/// `(x, y) ↦ (x + y, y − x)`: the L1 distance between images is twice the
/// L∞ distance between the originals.
pub fn shear_to_l1(e: &SpatialElection) -> Result<SpatialElection, PlanarError> {
    require_planar(e)?;
    Ok(e.map_points(|p| {
        let (x, y) = (&p.0[0], &p.0[1]);
        Point(vec![x + y, y - x])
    })
    .expect("shear preserves dimension"))
}

/// Certified Condorcet winning set of size at most three.
///
/// Requires a planar election with an odd number of voters whose derived
/// preferences are strict under `norm` (L1 or L∞).
pub fn planar_winning_set(e: &SpatialElection, norm: &Norm) -> Result<PlanarResult, PlanarError> {
    require_planar(e)?;
    if e.n() % 2 == 0 {
        return Err(PlanarError::EvenVoterCount { n: e.n() });
    }
    let (working, sheared) = if norm.is_manhattan() {
        (e.clone(), false)
    } else if norm.is_infinity() {
        (shear_to_l1(e)?, true)
    } else {
        return Err(PlanarError::UnsupportedNorm(norm.to_string()));
    };
    let derivation = derive_profile(&working, &Norm::manhattan());
    if let Some(first) = derivation.ties.first() {
        return Err(PlanarError::TiedPreferences {
            count: derivation.ties.len(),
            first: first.clone(),
        });
    }
    let profile = derivation.profile;
    let selection = quadrant_candidates(&working)?;
    let reps = selection.distinct_representatives();

    let mut candidates: Vec<Vec<CandidateId>> = Vec::new();
    if reps.len() > 1 {
        for skip in 0..reps.len() {
            candidates.push(
                reps.iter()
                    .enumerate()
                    .filter(|&(i, _)| i != skip)
                    .map(|(_, &c)| c)
                    .collect(),
            );
        }
    }
    if reps.len() < 4 {
        candidates.push(reps.clone());
    }

    let mut attempts = Vec::new();
    for mut set in candidates {
        set.sort_unstable();
        let verdict = is_condorcet_winning_set(&profile, &set).expect("representatives are valid candidates");
        attempts.push(set);
        if let Some(certificate) = verdict.into_certificate() {
            return Ok(PlanarResult {
                certificate,
                selection,
                sheared,
                attempts,
            });
        }
    }
    Err(PlanarError::NoCertifiedSubset { representatives: reps })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadrantViolation {
    pub quadrant: Quadrant,
    pub representative: CandidateId,
    pub candidate: CandidateId,
    /// Voters preferring the representative.
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadrantReport {
    pub n: usize,
    /// Number of (representative, candidate) pairs examined.
    pub checked: usize,
    pub violations: Vec<QuadrantViolation>,
}

impl QuadrantReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks that every quadrant representative beats each other candidate of
/// its quadrant by strict majority under L1 proximity.
pub fn lemma2_check(e: &SpatialElection, sel: &QuadrantSelection) -> QuadrantReport {
    let profile = derive_profile(e, &Norm::manhattan()).profile;
    quadrant_report(&profile, sel)
}

fn quadrant_report(profile: &PreferenceProfile, sel: &QuadrantSelection) -> QuadrantReport {
    let n = profile.n();
    let mut checked = 0;
    let mut violations = Vec::new();
    for (i, &q) in sel.assignment.iter().enumerate() {
        let c = CandidateId(i);
        let rep = sel.representative(q).expect("occupied quadrant has a representative");
        if rep == c {
            continue;
        }
        checked += 1;
        let count = (0..n)
            .filter(|&v| profile.prefers(VoterId(v), rep, c).expect("indices in range"))
            .count();
        if 2 * count <= n {
            violations.push(QuadrantViolation {
                quadrant: q,
                representative: rep,
                candidate: c,
                count,
            });
        }
    }
    QuadrantReport { n, checked, violations }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;
    use crate::spatial::{lemma4_instance, random_spatial, SpatialParams};
    use crate::{condorcet_dimension, Magnitude};

    const P1: CandidateId = CandidateId(0);
    const P2: CandidateId = CandidateId(1);
    const P3: CandidateId = CandidateId(2);

    fn election(voters: &[[i64; 2]], candidates: &[[i64; 2]]) -> SpatialElection {
        SpatialElection::new(
            voters.iter().map(|p| Point::from_ints(p)).collect(),
            candidates.iter().map(|p| Point::from_ints(p)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn medians_of_lemma4() {
        assert_eq!(coordinate_medians(&lemma4_instance()).unwrap(), (int(0), int(0)));
        let single = election(&[[4, -7]], &[[0, 0]]);
        assert_eq!(coordinate_medians(&single).unwrap(), (int(4), int(-7)));
        let repeated = election(&[[1, 1], [1, 1], [5, 9]], &[[0, 0]]);
        assert_eq!(coordinate_medians(&repeated).unwrap(), (int(1), int(1)));
    }

    #[test]
    fn median_preconditions() {
        let even = election(&[[0, 0], [1, 1]], &[[0, 0]]);
        assert_eq!(coordinate_medians(&even), Err(PlanarError::EvenVoterCount { n: 2 }));
        let line = SpatialElection::new(vec![Point::from_ints(&[0])], vec![Point::from_ints(&[1])]).unwrap();
        assert_eq!(coordinate_medians(&line), Err(PlanarError::WrongDimension { found: 1 }));
        assert!(shear_to_l1(&line).is_err());
    }

    #[test]
    fn lemma4_quadrants() {
        let sel = quadrant_candidates(&lemma4_instance()).unwrap();
        assert_eq!(sel.representatives, [Some(P2), Some(P3), None, Some(P1)]);
        assert_eq!(sel.assignment, vec![Quadrant::Q4, Quadrant::Q1, Quadrant::Q2]);
    }

    #[test]
    fn candidate_at_median_point() {
        let e = election(&[[0, 0], [2, 2], [-2, -2]], &[[0, 0]]);
        let sel = quadrant_candidates(&e).unwrap();
        assert_eq!(sel.representative(Quadrant::Q1), Some(P1));
        assert_eq!(sel.distinct_representatives(), vec![P1]);
    }

    #[test]
    fn nearest_in_quadrant() {
        let e = election(&[[0, 0]], &[[2, 1], [1, 1]]);
        let sel = quadrant_candidates(&e).unwrap();
        assert_eq!(sel.representative(Quadrant::Q1), Some(P2));
    }

    #[test]
    fn boundary_points_follow_half_open_rule() {
        let z = int(0);
        let one = int(1);
        let neg = int(-1);
        assert_eq!(Quadrant::of(&z, &z), Quadrant::Q1);
        assert_eq!(Quadrant::of(&neg, &z), Quadrant::Q2);
        assert_eq!(Quadrant::of(&z, &neg), Quadrant::Q4);
        assert_eq!(Quadrant::of(&neg, &neg), Quadrant::Q3);
        assert_eq!(Quadrant::of(&one, &one), Quadrant::Q1);
    }

    #[test]
    fn lemma4_manhattan_has_tie() {
        let err = planar_winning_set(&lemma4_instance(), &Norm::manhattan()).unwrap_err();
        assert!(matches!(err, PlanarError::TiedPreferences { count: 1, .. }));
    }

    #[test]
    fn lemma4_perturbed_manhattan() {
        // the instance scaled by 2 with the second voter moved off the L1 tie
        let e = election(&[[18, 0], [0, 19], [-18, 0]], &[[2, -2], [16, 20], [-18, 18]]);
        let result = planar_winning_set(&e, &Norm::manhattan()).unwrap();
        assert_eq!(result.certificate.set, vec![P1, P3]);
        assert_eq!(result.attempts, vec![vec![P1, P3]]);
    }

    #[test]
    fn lemma4_infinity() {
        let e = lemma4_instance();
        let result = planar_winning_set(&e, &Norm::Infinity).unwrap();
        assert!(result.sheared);
        assert!(result.certificate.size() <= 3);
        assert_eq!(result.certificate.set, vec![P1, P2]);
        let profile = derive_profile(&e, &Norm::Infinity).profile;
        assert!(result.certificate.recheck(&profile));
    }

    #[test]
    fn single_candidate() {
        let e = election(&[[3, 3]], &[[-5, 8]]);
        let result = planar_winning_set(&e, &Norm::manhattan()).unwrap();
        assert_eq!(result.certificate.set, vec![P1]);
    }

    #[test]
    fn other_norms_rejected() {
        let err = planar_winning_set(&lemma4_instance(), &Norm::integer(2)).unwrap_err();
        assert_eq!(err, PlanarError::UnsupportedNorm("p:2".into()));
    }

    #[test]
    fn shear_examples() {
        let a = Point::from_ints(&[0, 0]);
        let b = Point::from_ints(&[1, 1]);
        let c = Point::from_ints(&[3, -1]);
        let e = SpatialElection::new(vec![a.clone()], vec![b.clone(), c.clone()]).unwrap();
        let s = shear_to_l1(&e).unwrap();
        assert_eq!(s.candidates()[0], Point::from_ints(&[2, 0]));
        assert_eq!(s.candidates()[1], Point::from_ints(&[2, -4]));
        let d1 = crate::distance_power(&s.voters()[0], &s.candidates()[1], &Norm::manhattan()).unwrap();
        assert_eq!(d1, Magnitude::Exact(int(6)));
    }

    #[test]
    fn lemma2_on_lemma4() {
        let e = lemma4_instance();
        let report = lemma2_check(&e, &quadrant_candidates(&e).unwrap());
        assert_eq!(report.checked, 0);
        assert!(report.passed());
    }

    #[test]
    fn random_instances_small_sweep() {
        for seed in 0..200u64 {
            for norm in [Norm::manhattan(), Norm::Infinity] {
                let params = SpatialParams::new(
                    2 + (seed % 9) as usize,
                    1 + 2 * (seed % 6) as usize,
                    2,
                    50,
                    norm.clone(),
                );
                let e = random_spatial(&params, seed).unwrap();
                let result = planar_winning_set(&e, &norm).unwrap();
                let profile = derive_profile(&e, &norm).profile;
                assert!(result.certificate.size() <= 3);
                assert!(result.certificate.recheck(&profile));
                let exact = condorcet_dimension(&profile, 3).unwrap();
                assert!(exact.dimension <= result.certificate.size());
                let working = if result.sheared {
                    shear_to_l1(&e).unwrap()
                } else {
                    e.clone()
                };
                assert!(lemma2_check(&working, &result.selection).passed());
            }
        }
    }
}
