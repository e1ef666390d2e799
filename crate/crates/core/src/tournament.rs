//! Majority digraphs and the greedy logarithmic dominating set.
//!
//! Arcs point from the pairwise loser to the pairwise winner: the arc
//! `(j, i)` exists when a strict majority of voters prefers `i` over `j`.
//! The in-neighbours of `i` are therefore the candidates `i` beats.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::profile::{CandidateId, PreferenceProfile};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TournamentError {
    #[error("candidates {a} and {b} are tied: the majority digraph is not a tournament")]
    IncompleteTournament { a: usize, b: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tournament {
    m: usize,
    // wins[i][j]: a strict majority prefers i over j, i.e. the arc (j, i)
    wins: Vec<Vec<bool>>,
}

impl Tournament {
    /// Builds a digraph from a `wins[i][j]` matrix. Diagonal entries are ignored.
    pub fn from_wins(mut wins: Vec<Vec<bool>>) -> Self {
        let m = wins.len();
        for (i, row) in wins.iter_mut().enumerate() {
            assert_eq!(row.len(), m, "wins matrix must be square");
            row[i] = false;
        }
        Self { m, wins }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// True iff a strict majority prefers `winner` over `loser`.
    pub fn beats(&self, winner: CandidateId, loser: CandidateId) -> bool {
        self.wins[winner.0][loser.0]
    }

    /// True iff the arc `(from, to)` exists, i.e. `to` beats `from`.
    pub fn has_arc(&self, from: CandidateId, to: CandidateId) -> bool {
        self.wins[to.0][from.0]
    }

    /// All arcs `(loser, winner)` in lexicographic order.
    pub fn arcs(&self) -> Vec<(CandidateId, CandidateId)> {
        let mut arcs = Vec::new();
        for from in 0..self.m {
            for to in 0..self.m {
                if self.wins[to][from] {
                    arcs.push((CandidateId(from), CandidateId(to)));
                }
            }
        }
        arcs
    }

    /// First unordered pair with no arc in either direction.
    pub fn first_tied_pair(&self) -> Option<(usize, usize)> {
        for a in 0..self.m {
            for b in a + 1..self.m {
                if !self.wins[a][b] && !self.wins[b][a] {
                    return Some((a, b));
                }
            }
        }
        None
    }

    pub fn is_complete(&self) -> bool {
        self.first_tied_pair().is_none()
    }

    /// Number of in-neighbours of `v` (vertices it beats) among `alive`.
    fn in_degree_within(&self, v: usize, alive: &[bool]) -> usize {
        (0..self.m).filter(|&u| alive[u] && self.wins[v][u]).count()
    }

    /// Graphviz rendering with arcs pointing loser -> winner.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph majority {\n");
        for v in 0..self.m {
            let _ = writeln!(out, "  {v};");
        }
        for (from, to) in self.arcs() {
            let _ = writeln!(out, "  {} -> {};", from.0, to.0);
        }
        out.push_str("}\n");
        out
    }
}

/// Majority digraph of a profile. Complete whenever `n` is odd.
pub fn majority_digraph(profile: &PreferenceProfile) -> Tournament {
    let m = profile.m();
    let n = profile.n();
    let mut support = vec![vec![0usize; m]; m];
    for v in 0..n {
        let ranking = profile.ranking(crate::VoterId(v));
        for (pos, a) in ranking.iter().enumerate() {
            for b in &ranking[pos + 1..] {
                support[a.0][b.0] += 1;
            }
        }
    }
    let wins = support
        .iter()
        .map(|row| row.iter().map(|&s| 2 * s > n).collect())
        .collect();
    Tournament::from_wins(wins)
}

/// One selection step of the greedy dominating set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GreedyRound {
    /// Vertices still undominated before the step.
    pub remaining: usize,
    pub selected: CandidateId,
    /// Vertices removed: the selected vertex plus its remaining in-neighbours.
    pub removed: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GreedyTrace {
    pub set: Vec<CandidateId>,
    pub rounds: Vec<GreedyRound>,
}

/// Greedy dominating set with its per-round trace.
///
/// Each round picks the remaining vertex beating the most remaining vertices
/// (lowest index on ties), then removes it and everything it beats.
pub fn greedy_dominating_set_traced(t: &Tournament) -> Result<GreedyTrace, TournamentError> {
    if let Some((a, b)) = t.first_tied_pair() {
        return Err(TournamentError::IncompleteTournament { a, b });
    }
    let mut alive = vec![true; t.m];
    let mut remaining = t.m;
    let mut set = Vec::new();
    let mut rounds = Vec::new();
    while remaining > 0 {
        let mut best: Option<(usize, usize)> = None;
        for v in (0..t.m).filter(|&v| alive[v]) {
            let deg = t.in_degree_within(v, &alive);
            if best.is_none_or(|(_, d)| deg > d) {
                best = Some((v, deg));
            }
        }
        let (v, deg) = best.expect("remaining > 0");
        for (a, &beaten) in alive.iter_mut().zip(&t.wins[v]) {
            *a &= !beaten;
        }
        alive[v] = false;
        rounds.push(GreedyRound {
            remaining,
            selected: CandidateId(v),
            removed: deg + 1,
        });
        remaining -= deg + 1;
        set.push(CandidateId(v));
    }
    set.sort_unstable();
    Ok(GreedyTrace { set, rounds })
}

/// Dominating set of size at most `⌈log₂ m⌉` (1 when `m = 1`), sorted by index.
pub fn greedy_dominating_set(t: &Tournament) -> Result<Vec<CandidateId>, TournamentError> {
    greedy_dominating_set_traced(t).map(|trace| trace.set)
}

/// True iff every vertex outside `s` is beaten by some member of `s`.
pub fn is_dominating_set(t: &Tournament, s: &[CandidateId]) -> bool {
    let mut inside = vec![false; t.m];
    for c in s {
        inside[c.0] = true;
    }
    (0..t.m)
        .filter(|&j| !inside[j])
        .all(|j| s.iter().any(|i| t.wins[i.0][j]))
}

/// `⌈log₂ m⌉`, with `m ≤ 1` mapped to 1.
pub fn log2_ceil_bound(m: usize) -> usize {
    if m <= 2 {
        1
    } else {
        (usize::BITS - (m - 1).leading_zeros()) as usize
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::cyclic_profile;
    use proptest::prelude::*;

    const P1: CandidateId = CandidateId(0);
    const P2: CandidateId = CandidateId(1);
    const P3: CandidateId = CandidateId(2);

    fn transitive(m: usize) -> Tournament {
        Tournament::from_wins((0..m).map(|i| (0..m).map(|j| i < j).collect()).collect())
    }

    #[test]
    fn cyclic_profile_gives_three_cycle() {
        let t = majority_digraph(&cyclic_profile());
        assert_eq!(t.arcs(), vec![(P1, P3), (P2, P1), (P3, P2)]);
        assert!(t.is_complete());
    }

    #[test]
    fn single_vertex_has_no_arcs() {
        let p = PreferenceProfile::new(1, vec![vec![0]]).unwrap();
        let t = majority_digraph(&p);
        assert!(t.arcs().is_empty());
        assert_eq!(greedy_dominating_set(&t).unwrap(), vec![P1]);
    }

    #[test]
    fn greedy_on_three_cycle() {
        let t = majority_digraph(&cyclic_profile());
        let trace = greedy_dominating_set_traced(&t).unwrap();
        assert_eq!(trace.set, vec![P1, P3]);
        assert_eq!(trace.rounds[0].selected, P1);
        assert_eq!(trace.rounds[0].removed, 2);
        assert!(is_dominating_set(&t, &trace.set));
    }

    #[test]
    fn transitive_tournament_has_winner() {
        let t = transitive(6);
        assert_eq!(greedy_dominating_set(&t).unwrap(), vec![P1]);
    }

    #[test]
    fn domination_checks() {
        let t = majority_digraph(&cyclic_profile());
        assert!(is_dominating_set(&t, &[P1, P3]));
        assert!(!is_dominating_set(&t, &[P1]));
        assert!(is_dominating_set(&t, &[P1, P2, P3]));
    }

    #[test]
    fn even_ties_are_rejected() {
        let p = PreferenceProfile::new(2, vec![vec![0, 1], vec![1, 0]]).unwrap();
        let t = majority_digraph(&p);
        assert!(t.arcs().is_empty());
        assert_eq!(
            greedy_dominating_set(&t),
            Err(TournamentError::IncompleteTournament { a: 0, b: 1 })
        );
    }

    #[test]
    fn log_bound_values() {
        let expected = [
            (1, 1),
            (2, 1),
            (3, 2),
            (4, 2),
            (5, 3),
            (8, 3),
            (9, 4),
            (16, 4),
            (17, 5),
            (32, 5),
        ];
        for (m, b) in expected {
            assert_eq!(log2_ceil_bound(m), b, "m = {m}");
        }
    }

    #[test]
    fn dot_export_lists_vertices_and_arcs() {
        let dot = majority_digraph(&cyclic_profile()).to_dot();
        assert!(dot.starts_with("digraph majority {"));
        assert!(dot.contains("  1 -> 0;"));
        assert_eq!(dot.matches("->").count(), 3);
    }

    fn arb_tournament() -> impl Strategy<Value = Tournament> {
        (1usize..33).prop_flat_map(|m| {
            proptest::collection::vec(any::<bool>(), m * m).prop_map(move |bits| {
                let mut wins = vec![vec![false; m]; m];
                for i in 0..m {
                    for j in i + 1..m {
                        if bits[i * m + j] {
                            wins[i][j] = true;
                        } else {
                            wins[j][i] = true;
                        }
                    }
                }
                Tournament::from_wins(wins)
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn greedy_is_dominating_and_logarithmic(t in arb_tournament()) {
            let trace = greedy_dominating_set_traced(&t).unwrap();
            prop_assert!(is_dominating_set(&t, &trace.set));
            prop_assert!(trace.set.len() <= log2_ceil_bound(t.m()));
            for r in &trace.rounds {
                prop_assert!(2 * (r.removed - 1) + 1 >= r.remaining);
            }
        }
    }
}
