//! The bounded pebbled network game F^k on a cylindric atom structure,
//! decided by exhaustive alternating search.
//!
//! A network is a set of at most k named nodes together with a total
//! labeling of the n-tuples over those nodes by atoms, such that tuples
//! with repeated nodes carry diagonal atoms and tuples agreeing off a
//! coordinate i carry T_i-related atoms. The universal player opens by
//! naming an atom that must appear in the network, and thereafter plays
//! cylindrifier demands: a labeled tuple t, a coordinate i, and a target
//! atom T_i-related to t's label. The existential player must realize
//! the demand at some node — an existing one, a fresh one while pebbles
//! remain, or (when all k node names are in use and the universal player
//! names a victim node outside t) by overwriting the victim and
//! re-covering every erased tuple. The existential player loses a round
//! they cannot answer.
//!
//! A universal win is a one-sided refutation certificate; survival is
//! never a membership proof.

use std::collections::HashMap;

use itertools::Itertools;

use crate::cylalg::CaAtomStructure;
use crate::error::{Error, Result};
use crate::games::Winner;

type Tuple = Vec<usize>;
type Labels = std::collections::BTreeMap<Tuple, usize>;

/// A network position: named nodes and a total labeling of their n-tuples.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct NetworkState {
    nodes: std::collections::BTreeSet<usize>,
    labels: Labels,
}

impl NetworkState {
    pub fn nodes(&self) -> &std::collections::BTreeSet<usize> {
        &self.nodes
    }
    pub fn labels(&self) -> &Labels {
        &self.labels
    }
}

/// A universal-player move.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NetMove {
    /// Opening move: the named atom must appear in the answered network.
    Initial { atom: usize },
    /// Cylindrifier demand on the labeled tuple: realize `atom` at
    /// coordinate `index`. `victim` names the node to overwrite when all
    /// pebbles are in use; it must not occur in `tuple`.
    Cylindrifier { tuple: Tuple, index: usize, atom: usize, victim: Option<usize> },
}

/// An existential answer: the node used to realize the demand (when one
/// was chosen) and the freshly assigned tuple labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetResponse {
    pub node: Option<usize>,
    pub labels: Vec<(Tuple, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetPvStep {
    pub challenge: NetMove,
    /// `None` when the existential player is stuck.
    pub response: Option<NetResponse>,
}

#[derive(Debug, Clone)]
pub struct NetOutcome {
    pub winner: Winner,
    pub rounds: usize,
    pub pebbles: usize,
    /// Always true: the bounded game tree is searched completely.
    pub exhaustive: bool,
    /// One-sided interpretation flag, set only on a universal win.
    pub flag: Option<String>,
    pub principal_variation: Vec<NetPvStep>,
}

struct NetSolver<'a> {
    s: &'a CaAtomStructure,
    k: usize,
    memo: HashMap<(Vec<(Tuple, usize)>, usize), bool>,
}

impl<'a> NetSolver<'a> {
    fn new(s: &'a CaAtomStructure, k: usize) -> Result<Self> {
        if k < s.dim() {
            return Err(Error::Parameter(format!(
                "pebble budget {k} is below the dimension {}: no tuple of distinct nodes fits",
                s.dim()
            )));
        }
        Ok(NetSolver { s, k, memo: HashMap::new() })
    }

    fn n(&self) -> usize {
        self.s.dim()
    }

    fn all_tuples(&self, nodes: &std::collections::BTreeSet<usize>) -> Vec<Tuple> {
        (0..self.n())
            .map(|_| nodes.iter().copied().collect::<Vec<_>>())
            .multi_cartesian_product()
            .collect()
    }

    /// Whether labeling tuple `t` with `a` is coherent against `labels`.
    fn label_ok(&self, labels: &Labels, t: &Tuple, a: usize) -> bool {
        let n = self.n();
        for i in 0..n {
            for j in (i + 1)..n {
                if t[i] == t[j] && !self.s.diagonal(i, j).unwrap().contains(&a) {
                    return false;
                }
            }
        }
        for (u, &b) in labels {
            if u == t {
                return b == a;
            }
            let diffs: Vec<usize> = (0..n).filter(|&m| t[m] != u[m]).collect();
            if diffs.len() == 1 && !self.s.related(diffs[0], a, b) {
                return false;
            }
        }
        true
    }

    /// All coherent total extensions of `base` over the tuples in `todo`.
    fn completions(&self, base: &Labels, todo: &[Tuple]) -> Vec<Labels> {
        fn rec(
            solver: &NetSolver,
            cur: &mut Labels,
            todo: &[Tuple],
            out: &mut Vec<Labels>,
        ) {
            match todo.first() {
                None => out.push(cur.clone()),
                Some(t) => {
                    if cur.contains_key(t) {
                        rec(solver, cur, &todo[1..], out);
                        return;
                    }
                    for a in 0..solver.s.atom_count() {
                        if solver.label_ok(cur, t, a) {
                            cur.insert(t.clone(), a);
                            rec(solver, cur, &todo[1..], out);
                            cur.remove(t);
                        }
                    }
                }
            }
        }
        let mut out = Vec::new();
        let mut cur = base.clone();
        rec(self, &mut cur, todo, &mut out);
        out
    }

    /// Node renaming canonical form: lexicographically least label list
    /// over all bijections of the node set onto 0..m.
    fn canonical(&self, state: &NetworkState) -> Vec<(Tuple, usize)> {
        let nodes: Vec<usize> = state.nodes.iter().copied().collect();
        let m = nodes.len();
        let mut best: Option<Vec<(Tuple, usize)>> = None;
        for perm in (0..m).permutations(m) {
            let rename: HashMap<usize, usize> =
                nodes.iter().copied().zip(perm.into_iter()).collect();
            let mut labels: Vec<(Tuple, usize)> = state
                .labels
                .iter()
                .map(|(t, &a)| (t.iter().map(|x| rename[x]).collect(), a))
                .collect();
            labels.sort_unstable();
            if best.as_ref().map_or(true, |b| labels < *b) {
                best = Some(labels);
            }
        }
        best.unwrap_or_default()
    }

    /// Nontrivial universal demands available in this position. Demands
    /// whose target equals the current label are omitted: they are always
    /// answerable in place and only spend the round (see `survives`).
    fn demands(&self, state: &NetworkState) -> Vec<NetMove> {
        let mut out = Vec::new();
        let full = state.nodes.len() == self.k;
        for (t, &cur) in &state.labels {
            for i in 0..self.n() {
                for a in 0..self.s.atom_count() {
                    if a == cur || !self.s.related(i, cur, a) {
                        continue;
                    }
                    let victims: Vec<usize> = if full {
                        state.nodes.iter().copied().filter(|v| !t.contains(v)).collect()
                    } else {
                        Vec::new()
                    };
                    if victims.is_empty() {
                        out.push(NetMove::Cylindrifier {
                            tuple: t.clone(),
                            index: i,
                            atom: a,
                            victim: None,
                        });
                    } else {
                        // all pebbles in use: the demand names the node to
                        // overwrite (one move per choice of victim)
                        for v in victims {
                            out.push(NetMove::Cylindrifier {
                                tuple: t.clone(),
                                index: i,
                                atom: a,
                                victim: Some(v),
                            });
                        }
                    }
                }
            }
        }
        out
    }

    fn is_legal(&self, state: &NetworkState, mv: &NetMove) -> bool {
        match mv {
            NetMove::Initial { atom } => {
                state.nodes.is_empty() && *atom < self.s.atom_count()
            }
            NetMove::Cylindrifier { tuple, index, atom, victim } => {
                if state.nodes.is_empty() || *index >= self.n() || *atom >= self.s.atom_count() {
                    return false;
                }
                let cur = match state.labels.get(tuple) {
                    Some(&c) => c,
                    None => return false,
                };
                if !self.s.related(*index, cur, *atom) {
                    return false;
                }
                let full = state.nodes.len() == self.k;
                let victim_available =
                    full && state.nodes.iter().any(|v| !tuple.contains(v));
                match victim {
                    // in-place repeats stay legal; otherwise a victim is
                    // mandatory once all pebbles are in use and one exists
                    None => *atom == cur || !victim_available,
                    Some(v) => victim_available && state.nodes.contains(v) && !tuple.contains(v),
                }
            }
        }
    }

    /// Existential answers in deterministic order, each with the
    /// resulting position.
    fn answers(&self, state: &NetworkState, mv: &NetMove) -> Vec<(NetResponse, NetworkState)> {
        let mut out = Vec::new();
        match mv {
            NetMove::Initial { atom } => {
                // networks over m <= min(n, k) nodes, designated tuple in
                // first-appearance normal form to avoid renamed duplicates
                for m in 1..=self.n().min(self.k) {
                    let nodes: std::collections::BTreeSet<usize> = (0..m).collect();
                    let tuples = self.all_tuples(&nodes);
                    for t in &tuples {
                        let mut next_fresh = 0usize;
                        let mut normal = true;
                        for &x in t {
                            if x == next_fresh {
                                next_fresh += 1;
                            } else if x > next_fresh {
                                normal = false;
                                break;
                            }
                        }
                        if !normal || next_fresh != m {
                            continue;
                        }
                        let mut base = Labels::new();
                        if !self.label_ok(&base, t, *atom) {
                            continue;
                        }
                        base.insert(t.clone(), *atom);
                        for done in self.completions(&base, &tuples) {
                            let labels: Vec<(Tuple, usize)> =
                                done.iter().map(|(u, &a)| (u.clone(), a)).collect();
                            out.push((
                                NetResponse { node: None, labels },
                                NetworkState { nodes: nodes.clone(), labels: done },
                            ));
                        }
                    }
                }
            }
            NetMove::Cylindrifier { tuple, index, atom, victim } => match victim {
                None => {
                    // realize at an existing node
                    for &z in &state.nodes {
                        let mut t2 = tuple.clone();
                        t2[*index] = z;
                        if state.labels.get(&t2) == Some(atom) {
                            out.push((
                                NetResponse { node: Some(z), labels: Vec::new() },
                                state.clone(),
                            ));
                        }
                    }
                    // or at a fresh node while pebbles remain
                    if state.nodes.len() < self.k {
                        let z = (0..self.k).find(|x| !state.nodes.contains(x)).unwrap();
                        let mut nodes = state.nodes.clone();
                        nodes.insert(z);
                        let mut t2 = tuple.clone();
                        t2[*index] = z;
                        if self.label_ok(&state.labels, &t2, *atom) {
                            let mut base = state.labels.clone();
                            base.insert(t2.clone(), *atom);
                            let todo: Vec<Tuple> = self
                                .all_tuples(&nodes)
                                .into_iter()
                                .filter(|u| u.contains(&z))
                                .collect();
                            for done in self.completions(&base, &todo) {
                                let fresh: Vec<(Tuple, usize)> = done
                                    .iter()
                                    .filter(|(u, _)| !state.labels.contains_key(*u))
                                    .map(|(u, &a)| (u.clone(), a))
                                    .collect();
                                out.push((
                                    NetResponse { node: Some(z), labels: fresh },
                                    NetworkState { nodes: nodes.clone(), labels: done },
                                ));
                            }
                        }
                    }
                }
                Some(v) => {
                    // forced overwrite: erase the victim, re-cover its tuples
                    let mut base: Labels = state
                        .labels
                        .iter()
                        .filter(|(u, _)| !u.contains(v))
                        .map(|(u, &a)| (u.clone(), a))
                        .collect();
                    let mut t2 = tuple.clone();
                    t2[*index] = *v;
                    if self.label_ok(&base, &t2, *atom) {
                        base.insert(t2.clone(), *atom);
                        let todo: Vec<Tuple> = self
                            .all_tuples(&state.nodes)
                            .into_iter()
                            .filter(|u| u.contains(v))
                            .collect();
                        for done in self.completions(&base, &todo) {
                            let fresh: Vec<(Tuple, usize)> = done
                                .iter()
                                .filter(|(u, _)| u.contains(v))
                                .map(|(u, &a)| (u.clone(), a))
                                .collect();
                            out.push((
                                NetResponse { node: Some(*v), labels: fresh },
                                NetworkState { nodes: state.nodes.clone(), labels: done },
                            ));
                        }
                    }
                }
            },
        }
        out
    }

    fn survives(&mut self, state: &NetworkState, rounds: usize) -> bool {
        if rounds == 0 {
            return true;
        }
        if state.nodes.is_empty() {
            // opening round: every named atom must be realizable
            return (0..self.s.atom_count()).all(|atom| {
                let mv = NetMove::Initial { atom };
                self.answers(state, &mv)
                    .into_iter()
                    .any(|(_, next)| self.survives(&next, rounds - 1))
            });
        }
        let key = (self.canonical(state), rounds);
        if let Some(&v) = self.memo.get(&key) {
            return v;
        }
        // a trivial in-place demand always lets the universal player
        // spend a round, so survival at `rounds` needs survival below
        let mut result = self.survives(state, rounds - 1);
        if result {
            for mv in self.demands(state) {
                let answered = self
                    .answers(state, &mv)
                    .into_iter()
                    .any(|(_, next)| self.survives(&next, rounds - 1));
                if !answered {
                    result = false;
                    break;
                }
            }
        }
        self.memo.insert(key, result);
        result
    }

    /// A stall move: in-place demand repeating an existing label.
    fn stall(&self, state: &NetworkState) -> (NetMove, NetResponse) {
        let (t, &a) = state.labels.iter().next().expect("nonempty network");
        let mv = NetMove::Cylindrifier { tuple: t.clone(), index: 0, atom: a, victim: None };
        (mv, NetResponse { node: Some(t[0]), labels: Vec::new() })
    }

    fn winning_challenge(&mut self, state: &NetworkState, rounds: usize) -> Option<NetMove> {
        if state.nodes.is_empty() {
            return (0..self.s.atom_count())
                .map(|atom| NetMove::Initial { atom })
                .find(|mv| {
                    !self
                        .answers(state, mv)
                        .into_iter()
                        .any(|(_, next)| self.survives(&next, rounds - 1))
                });
        }
        self.demands(state).into_iter().find(|mv| {
            !self
                .answers(state, mv)
                .into_iter()
                .any(|(_, next)| self.survives(&next, rounds - 1))
        })
    }

    fn principal_variation(&mut self, rounds: usize, winner: Winner) -> Vec<NetPvStep> {
        let mut pv = Vec::new();
        let mut state = NetworkState::default();
        let mut left = rounds;
        while left > 0 {
            match winner {
                Winner::Exists => {
                    let mv = if state.nodes.is_empty() {
                        NetMove::Initial { atom: 0 }
                    } else {
                        match self.demands(&state).into_iter().next() {
                            Some(m) => m,
                            None => {
                                let (m, r) = self.stall(&state);
                                pv.push(NetPvStep { challenge: m, response: Some(r) });
                                left -= 1;
                                continue;
                            }
                        }
                    };
                    let chosen = self
                        .answers(&state, &mv)
                        .into_iter()
                        .find(|(_, next)| self.survives(next, left - 1));
                    debug_assert!(chosen.is_some(), "exists wins, an answer must survive");
                    if let Some((resp, next)) = chosen {
                        pv.push(NetPvStep { challenge: mv, response: Some(resp) });
                        state = next;
                    }
                }
                Winner::ForAll => match self.winning_challenge(&state, left) {
                    Some(mv) => {
                        // follow the least answer; every answer stays lost
                        let chosen = self.answers(&state, &mv).into_iter().next();
                        match chosen {
                            Some((resp, next)) => {
                                pv.push(NetPvStep { challenge: mv, response: Some(resp) });
                                state = next;
                            }
                            None => {
                                pv.push(NetPvStep { challenge: mv, response: None });
                                return pv;
                            }
                        }
                    }
                    None => {
                        let (mv, resp) = self.stall(&state);
                        pv.push(NetPvStep { challenge: mv, response: Some(resp) });
                    }
                },
            }
            left -= 1;
        }
        pv
    }
}

/// Decides the k-pebble network game on `s` for the given round bound.
pub fn network_game_decide(s: &CaAtomStructure, k: usize, rounds: usize) -> Result<NetOutcome> {
    if rounds == 0 {
        return Err(Error::Parameter("round count must be positive".into()));
    }
    let mut solver = NetSolver::new(s, k)?;
    let winner = if solver.survives(&NetworkState::default(), rounds) {
        Winner::Exists
    } else {
        Winner::ForAll
    };
    let principal_variation = solver.principal_variation(rounds, winner);
    let flag = match winner {
        Winner::ForAll => Some(format!("refutes-{k}-embedding-candidate")),
        Winner::Exists => None,
    };
    Ok(NetOutcome { winner, rounds, pebbles: k, exhaustive: true, flag, principal_variation })
}

/// Replays an outcome's principal variation move-by-move and re-runs the
/// search, confirming both the line's legality and the verdict.
pub fn verify_net_outcome(s: &CaAtomStructure, outcome: &NetOutcome) -> Result<bool> {
    let mut solver = NetSolver::new(s, outcome.pebbles)?;
    let recomputed = if solver.survives(&NetworkState::default(), outcome.rounds) {
        Winner::Exists
    } else {
        Winner::ForAll
    };
    if recomputed != outcome.winner {
        return Ok(false);
    }
    let mut state = NetworkState::default();
    for (step_no, step) in outcome.principal_variation.iter().enumerate() {
        if step_no >= outcome.rounds || !solver.is_legal(&state, &step.challenge) {
            return Ok(false);
        }
        let answers = solver.answers(&state, &step.challenge);
        match &step.response {
            None => {
                // a stuck step is only valid when truly unanswerable,
                // and only a universal winner may claim one
                return Ok(outcome.winner == Winner::ForAll && answers.is_empty());
            }
            Some(resp) => match answers.into_iter().find(|(r, _)| r == resp) {
                Some((_, next)) => state = next,
                None => return Ok(false),
            },
        }
    }
    match outcome.winner {
        // a full surviving line must cover every round
        Winner::Exists => Ok(outcome.principal_variation.len() == outcome.rounds),
        // a universal win must have trapped the opponent before the bound
        Winner::ForAll => Ok(false),
    }
}

/// One-sided bounded classification certificate for k extra dimensions.
#[derive(Debug, Clone)]
pub struct ClassifyCertificate {
    pub label: String,
    pub outcome: NetOutcome,
}

/// Runs the network game with pebble budget dim + k_extra and wraps the
/// verdict as a one-sided certificate. A universal win refutes
/// k-completeness at the probed depth; survival is consistency only,
/// never a membership proof.
pub fn classify(s: &CaAtomStructure, k_extra: usize, rounds: usize) -> Result<ClassifyCertificate> {
    let budget = s.dim() + k_extra;
    let outcome = network_game_decide(s, budget, rounds)?;
    let label = match outcome.winner {
        Winner::ForAll => format!("{k_extra}-complete refuted at depth {rounds}"),
        Winner::Exists => format!("consistent-with-{k_extra}-complete at depth {rounds}"),
    };
    Ok(ClassifyCertificate { label, outcome })
}

/// A two-atom structure where one atom has a singleton T_0 class and a
/// reachable demand has no coherent witness: the universal player wins
/// within two rounds. Used as the standard dead-end fixture.
pub fn dead_end_structure() -> CaAtomStructure {
    use std::collections::{BTreeMap, BTreeSet};
    let atoms = vec!["u".to_string(), "v".to_string()];
    let t0: BTreeSet<(usize, usize)> = [(0, 0), (1, 1)].into_iter().collect();
    let t1: BTreeSet<(usize, usize)> =
        [(0, 0), (0, 1), (1, 0), (1, 1)].into_iter().collect();
    let all: BTreeSet<usize> = [0, 1].into_iter().collect();
    let only_u: BTreeSet<usize> = [0].into_iter().collect();
    let mut d = BTreeMap::new();
    d.insert((0, 0), all.clone());
    d.insert((1, 1), all);
    d.insert((0, 1), only_u.clone());
    d.insert((1, 0), only_u);
    CaAtomStructure::new(2, atoms, vec![t0, t1], d).expect("valid fixture")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cylalg::full_tuple_structure;

    #[test]
    fn dead_end_forall_wins_quickly() {
        let s = dead_end_structure();
        for rounds in 1..=4 {
            let out = network_game_decide(&s, 3, rounds).unwrap();
            assert_eq!(out.winner, Winner::ForAll, "rounds={rounds}");
            assert!(out.flag.as_deref().unwrap().contains("refutes"));
            assert!(verify_net_outcome(&s, &out).unwrap(), "rounds={rounds}");
        }
    }

    #[test]
    fn dead_end_certificate_is_short() {
        let s = dead_end_structure();
        let out = network_game_decide(&s, 3, 2).unwrap();
        assert!(out.principal_variation.len() <= 2);
        assert_eq!(out.principal_variation.last().unwrap().response, None);
    }

    #[test]
    fn full_tuple_structure_survives() {
        let s = full_tuple_structure(3, 2).unwrap();
        for rounds in 1..=3 {
            let out = network_game_decide(&s, 3, rounds).unwrap();
            assert_eq!(out.winner, Winner::Exists, "rounds={rounds}");
            assert!(out.flag.is_none());
            assert!(verify_net_outcome(&s, &out).unwrap(), "rounds={rounds}");
        }
    }

    #[test]
    fn pebbles_equal_to_dimension_can_strand_exists() {
        // with no node outside the demanded tuple, no overwrite exists and
        // a demand for an unseen base element is unanswerable
        let s = full_tuple_structure(3, 2).unwrap();
        let out = network_game_decide(&s, 2, 2).unwrap();
        assert_eq!(out.winner, Winner::ForAll);
        assert!(verify_net_outcome(&s, &out).unwrap());
    }

    #[test]
    fn discrete_structure_survives_trivially() {
        let s = CaAtomStructure::discrete(2, vec!["p".into(), "q".into()]).unwrap();
        let out = network_game_decide(&s, 3, 5).unwrap();
        assert_eq!(out.winner, Winner::Exists);
    }

    #[test]
    fn pebble_monotonicity() {
        let battery = [full_tuple_structure(2, 2).unwrap(), full_tuple_structure(3, 2).unwrap()];
        for s in &battery {
            for rounds in 1..=3 {
                for k in 2..=3 {
                    let now = network_game_decide(s, k, rounds).unwrap().winner;
                    let wider = network_game_decide(s, k + 1, rounds).unwrap().winner;
                    if now == Winner::Exists {
                        assert_eq!(wider, Winner::Exists, "k={k} rounds={rounds}");
                    }
                }
            }
        }
    }

    #[test]
    fn round_monotonicity_of_refutation() {
        let s = dead_end_structure();
        let mut refuted_before = false;
        for rounds in 1..=5 {
            let w = network_game_decide(&s, 3, rounds).unwrap().winner;
            if refuted_before {
                assert_eq!(w, Winner::ForAll, "refutation lost at rounds={rounds}");
            }
            refuted_before = w == Winner::ForAll;
        }
    }

    #[test]
    fn classify_certificates() {
        let dead = dead_end_structure();
        let cert = classify(&dead, 1, 2).unwrap();
        assert_eq!(cert.label, "1-complete refuted at depth 2");
        let full = full_tuple_structure(3, 2).unwrap();
        let cert = classify(&full, 1, 3).unwrap();
        assert_eq!(cert.label, "consistent-with-1-complete at depth 3");
    }

    #[test]
    fn budget_below_dimension_rejected() {
        let s = dead_end_structure();
        assert!(network_game_decide(&s, 1, 2).is_err());
    }

    #[test]
    fn bad_outcomes_fail_verification() {
        let s = dead_end_structure();
        let mut out = network_game_decide(&s, 3, 2).unwrap();
        out.winner = Winner::Exists;
        assert!(!verify_net_outcome(&s, &out).unwrap());
    }
}
