//! The atomic Ehrenfeucht-Fraisse game EF_mu(A, B), decided by full
//! alternating game-tree search with memoization.
//!
//! Exists wins a play when the induced correspondence a_i -> b_i is an
//! isomorphism of induced substructures (equality and every atomic
//! relation preserved in both directions). For purely relational atom
//! structures this is the faithful reading of the generated-substructure
//! win condition.
//!
//! When both structures carry only unary relations, positions are
//! memoized up to the interchange of atoms with equal unary profiles;
//! any profile-preserving bijection is an automorphism then, so the
//! quotient is exact. Extracted moves are always the lexicographically
//! least winning ones, independent of that optimization.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::games::rel_structure::RelStructure;
use crate::games::Winner;
use crate::structures::partition::PartitionStructure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Side {
    A,
    B,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::A => Side::B,
            Side::B => Side::A,
        }
    }
}

/// A universal-player challenge: an atom in one of the structures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EfMove {
    pub side: Side,
    pub atom: usize,
}

/// One principal-variation step: the challenge and the extracted
/// response (`None` when the existential player is stuck).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PvStep {
    pub challenge: EfMove,
    pub response: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct GameOutcome {
    pub winner: Winner,
    pub rounds: usize,
    /// Always true here: the bounded game tree is searched completely.
    pub exhaustive: bool,
    /// Lexicographically least line of play under the winner's strategy.
    pub principal_variation: Vec<PvStep>,
}

type PairMap = Vec<(usize, usize)>;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum MemoKey {
    Counts(Vec<(u64, usize)>, usize),
    Map(PairMap, usize),
}

struct EfSolver<'a> {
    a: &'a RelStructure,
    b: &'a RelStructure,
    unary_only: bool,
    profiles_a: Vec<u64>,
    profiles_b: Vec<u64>,
    memo: HashMap<MemoKey, bool>,
}

impl<'a> EfSolver<'a> {
    fn new(a: &'a RelStructure, b: &'a RelStructure) -> Result<Self> {
        if a.signature() != b.signature() {
            return Err(Error::Parameter(format!(
                "signature mismatch: {:?} vs {:?}",
                a.signature(),
                b.signature()
            )));
        }
        let unary_only = a.only_unary();
        let profiles_a = (0..a.atom_count()).map(|x| a.unary_profile(x)).collect();
        let profiles_b = (0..b.atom_count()).map(|y| b.unary_profile(y)).collect();
        Ok(EfSolver { a, b, unary_only, profiles_a, profiles_b, memo: HashMap::new() })
    }

    fn key(&self, map: &PairMap, rounds: usize) -> MemoKey {
        if self.unary_only {
            let mut counts: HashMap<u64, usize> = HashMap::new();
            for &(x, _) in map {
                *counts.entry(self.profiles_a[x]).or_insert(0) += 1;
            }
            let mut v: Vec<(u64, usize)> = counts.into_iter().collect();
            v.sort_unstable();
            MemoKey::Counts(v, rounds)
        } else {
            MemoKey::Map(map.clone(), rounds)
        }
    }

    /// Whether map + (x, y) is still a partial isomorphism.
    fn valid_extension(&self, map: &PairMap, x: usize, y: usize) -> bool {
        for &(px, py) in map {
            if (px == x) != (py == y) {
                return false; // functional + injective, both directions
            }
            if px == x && py == y {
                return true; // replayed pair, nothing new to check
            }
        }
        let mut extended = map.clone();
        extended.push((x, y));
        for rel in self.a.relations() {
            let rel_b = self
                .b
                .relations()
                .iter()
                .find(|r| r.name == rel.name)
                .expect("signatures match");
            match rel.arity {
                1 => {
                    if rel.tuples.contains(&vec![x]) != rel_b.tuples.contains(&vec![y]) {
                        return false;
                    }
                }
                2 => {
                    for &(x1, y1) in &extended {
                        for &(x2, y2) in &extended {
                            if x1 != x && x2 != x {
                                continue;
                            }
                            if rel.tuples.contains(&vec![x1, x2])
                                != rel_b.tuples.contains(&vec![y1, y2])
                            {
                                return false;
                            }
                        }
                    }
                }
                3 => {
                    for &(x1, y1) in &extended {
                        for &(x2, y2) in &extended {
                            for &(x3, y3) in &extended {
                                if x1 != x && x2 != x && x3 != x {
                                    continue;
                                }
                                if rel.tuples.contains(&vec![x1, x2, x3])
                                    != rel_b.tuples.contains(&vec![y1, y2, y3])
                                {
                                    return false;
                                }
                            }
                        }
                    }
                }
                _ => unreachable!(),
            }
        }
        true
    }

    fn extend(map: &PairMap, x: usize, y: usize) -> PairMap {
        let mut m = map.clone();
        if !m.contains(&(x, y)) {
            m.push((x, y));
            m.sort_unstable();
        }
        m
    }

    /// Challenge atoms worth considering for the universal player. In the
    /// unary-only quotient one representative per (profile, played) class
    /// is enough; otherwise every atom.
    fn challenges(&self, map: &PairMap, side: Side) -> Vec<usize> {
        let (count, profiles) = match side {
            Side::A => (self.a.atom_count(), &self.profiles_a),
            Side::B => (self.b.atom_count(), &self.profiles_b),
        };
        let played = |atom: usize| {
            map.iter().any(|&(x, y)| match side {
                Side::A => x == atom,
                Side::B => y == atom,
            })
        };
        if !self.unary_only {
            return (0..count).collect();
        }
        let mut seen: Vec<(u64, bool)> = Vec::new();
        let mut out = Vec::new();
        for atom in 0..count {
            let class = (profiles[atom], played(atom));
            if !seen.contains(&class) {
                seen.push(class);
                out.push(atom);
            }
        }
        out
    }

    /// Candidate responses in lexicographic order.
    fn responses(&self, map: &PairMap, challenge: EfMove) -> Vec<usize> {
        let count = match challenge.side {
            Side::A => self.b.atom_count(),
            Side::B => self.a.atom_count(),
        };
        // forced partner when the challenge atom was already played
        for &(x, y) in map {
            match challenge.side {
                Side::A if x == challenge.atom => return vec![y],
                Side::B if y == challenge.atom => return vec![x],
                _ => {}
            }
        }
        if !self.unary_only {
            return (0..count).collect();
        }
        let played = |atom: usize| {
            map.iter().any(|&(x, y)| match challenge.side {
                Side::A => y == atom,
                Side::B => x == atom,
            })
        };
        let profiles = match challenge.side {
            Side::A => &self.profiles_b,
            Side::B => &self.profiles_a,
        };
        let mut seen: Vec<u64> = Vec::new();
        let mut out = Vec::new();
        for atom in 0..count {
            if played(atom) {
                continue; // injectivity rules played atoms out
            }
            if !seen.contains(&profiles[atom]) {
                seen.push(profiles[atom]);
                out.push(atom);
            }
        }
        out
    }

    fn pair_for(&self, challenge: EfMove, response: usize) -> (usize, usize) {
        match challenge.side {
            Side::A => (challenge.atom, response),
            Side::B => (response, challenge.atom),
        }
    }

    fn survives(&mut self, map: &PairMap, rounds: usize) -> bool {
        if rounds == 0 {
            return true;
        }
        let key = self.key(map, rounds);
        if let Some(&v) = self.memo.get(&key) {
            return v;
        }
        let mut result = true;
        'moves: for side in [Side::A, Side::B] {
            for atom in self.challenges(map, side) {
                let challenge = EfMove { side, atom };
                let answered = self.responses(map, challenge).into_iter().any(|resp| {
                    let (x, y) = self.pair_for(challenge, resp);
                    self.valid_extension(map, x, y) && {
                        let next = Self::extend(map, x, y);
                        self.survives(&next, rounds - 1)
                    }
                });
                if !answered {
                    result = false;
                    break 'moves;
                }
            }
        }
        self.memo.insert(key, result);
        result
    }

    /// Lex-least surviving response, `None` when stuck.
    fn best_response(&mut self, map: &PairMap, challenge: EfMove, rounds: usize) -> Option<usize> {
        let candidates = self.responses(map, challenge);
        candidates.into_iter().find(|&resp| {
            let (x, y) = self.pair_for(challenge, resp);
            self.valid_extension(map, x, y) && {
                let next = Self::extend(map, x, y);
                self.survives(&next, rounds - 1)
            }
        })
    }

    /// Lex-least winning challenge for the universal player, if any.
    fn winning_challenge(&mut self, map: &PairMap, rounds: usize) -> Option<EfMove> {
        for side in [Side::A, Side::B] {
            for atom in self.challenges(map, side) {
                let challenge = EfMove { side, atom };
                if self.best_response(map, challenge, rounds).is_none() {
                    return Some(challenge);
                }
            }
        }
        None
    }

    fn principal_variation(&mut self, mu: usize, winner: Winner) -> Vec<PvStep> {
        let mut pv = Vec::new();
        let mut map = PairMap::new();
        let mut rounds = mu;
        while rounds > 0 {
            match winner {
                Winner::Exists => {
                    let challenge = EfMove { side: Side::A, atom: 0 };
                    let resp = self.best_response(&map, challenge, rounds);
                    debug_assert!(resp.is_some(), "exists wins, a response must survive");
                    if let Some(r) = resp {
                        let (x, y) = self.pair_for(challenge, r);
                        map = Self::extend(&map, x, y);
                        pv.push(PvStep { challenge, response: Some(r) });
                    }
                }
                Winner::ForAll => {
                    let challenge = match self.winning_challenge(&map, rounds) {
                        Some(c) => c,
                        None => break,
                    };
                    // any valid reply keeps the position lost; follow the least
                    let reply = self
                        .responses(&map, challenge)
                        .into_iter()
                        .find(|&resp| {
                            let (x, y) = self.pair_for(challenge, resp);
                            self.valid_extension(&map, x, y)
                        });
                    pv.push(PvStep { challenge, response: reply });
                    match reply {
                        Some(r) => {
                            let (x, y) = self.pair_for(challenge, r);
                            map = Self::extend(&map, x, y);
                        }
                        None => break, // existential player has no legal reply at all
                    }
                }
            }
            rounds -= 1;
        }
        pv
    }
}

/// Decides EF_mu(A, B) by exhaustive alternating search.
pub fn ef_decide(a: &RelStructure, b: &RelStructure, mu: usize) -> Result<GameOutcome> {
    if mu == 0 {
        return Err(Error::Parameter("round count mu must be positive".into()));
    }
    let mut solver = EfSolver::new(a, b)?;
    let winner = if solver.survives(&PairMap::new(), mu) {
        Winner::Exists
    } else {
        Winner::ForAll
    };
    let principal_variation = solver.principal_variation(mu, winner);
    Ok(GameOutcome { winner, rounds: mu, exhaustive: true, principal_variation })
}

/// Replays the deterministic lex-least strategy of the reported winner
/// against every opponent line and confirms the reported result.
pub fn verify_ef_outcome(a: &RelStructure, b: &RelStructure, outcome: &GameOutcome) -> Result<bool> {
    let mut solver = EfSolver::new(a, b)?;
    fn exists_holds(solver: &mut EfSolver, map: &PairMap, rounds: usize) -> bool {
        if rounds == 0 {
            return true;
        }
        for side in [Side::A, Side::B] {
            for atom in solver.challenges(map, side) {
                let challenge = EfMove { side, atom };
                match solver.best_response(map, challenge, rounds) {
                    None => return false,
                    Some(resp) => {
                        let (x, y) = solver.pair_for(challenge, resp);
                        let next = EfSolver::extend(map, x, y);
                        if !exists_holds(solver, &next, rounds - 1) {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }
    fn forall_holds(solver: &mut EfSolver, map: &PairMap, rounds: usize) -> bool {
        if rounds == 0 {
            return false; // ran out of rounds without trapping the opponent
        }
        let challenge = match solver.winning_challenge(map, rounds) {
            Some(c) => c,
            None => return false,
        };
        let mut any_reply = false;
        let replies: Vec<usize> = solver
            .responses(map, challenge)
            .into_iter()
            .filter(|&resp| {
                let (x, y) = solver.pair_for(challenge, resp);
                solver.valid_extension(map, x, y)
            })
            .collect();
        for resp in replies {
            any_reply = true;
            let (x, y) = solver.pair_for(challenge, resp);
            let next = EfSolver::extend(map, x, y);
            if !forall_holds(solver, &next, rounds - 1) {
                return false;
            }
        }
        if !any_reply {
            return true; // stuck immediately
        }
        true
    }
    Ok(match outcome.winner {
        Winner::Exists => exists_holds(&mut solver, &PairMap::new(), outcome.rounds),
        Winner::ForAll => forall_holds(&mut solver, &PairMap::new(), outcome.rounds),
    })
}

fn sorted_map(history: &[(usize, usize)]) -> PairMap {
    let mut map: PairMap = history.to_vec();
    map.sort_unstable();
    map.dedup();
    map
}

/// Lex-least response that keeps the existential player alive for the
/// remaining rounds, from an arbitrary mid-game position.
pub fn ef_best_response(
    a: &RelStructure,
    b: &RelStructure,
    history: &[(usize, usize)],
    challenge: EfMove,
    rounds_left: usize,
) -> Result<Option<usize>> {
    if rounds_left == 0 {
        return Err(Error::Parameter("no rounds left".into()));
    }
    let mut solver = EfSolver::new(a, b)?;
    Ok(solver.best_response(&sorted_map(history), challenge, rounds_left))
}

/// Lex-least winning universal challenge from a mid-game position, if
/// one exists within the remaining rounds.
pub fn ef_winning_challenge(
    a: &RelStructure,
    b: &RelStructure,
    history: &[(usize, usize)],
    rounds_left: usize,
) -> Result<Option<EfMove>> {
    if rounds_left == 0 {
        return Err(Error::Parameter("no rounds left".into()));
    }
    let mut solver = EfSolver::new(a, b)?;
    Ok(solver.winning_challenge(&sorted_map(history), rounds_left))
}

/// Whether answering `challenge` with `response` keeps the position a
/// partial isomorphism.
pub fn ef_move_valid(
    a: &RelStructure,
    b: &RelStructure,
    history: &[(usize, usize)],
    challenge: EfMove,
    response: usize,
) -> Result<bool> {
    let solver = EfSolver::new(a, b)?;
    let map = sorted_map(history);
    let (x, y) = solver.pair_for(challenge, response);
    Ok(solver.valid_extension(&map, x, y))
}

/// Response of the explicit partition-pair strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StrategyResponse {
    /// Answer with this (unit, index) atom of the other structure.
    Atom((usize, usize)),
    /// A fresh atom was required but the matching block is exhausted.
    Resign,
}

/// The explicit strategy for pairs from `build_partition_pair`: replayed
/// atoms get their existing partner, non-large blocks are answered by
/// copying, large blocks by the least-index fresh atom of the matching
/// block.
pub fn ef_partition_strategy_response(
    a: &PartitionStructure,
    b: &PartitionStructure,
    history: &[((usize, usize), (usize, usize))],
    side: Side,
    atom: (usize, usize),
) -> Result<StrategyResponse> {
    if a.units() != b.units() || a.large() != b.large() {
        return Err(Error::Parameter("not a partition pair (units or large sets differ)".into()));
    }
    let (unit, index) = atom;
    if unit >= a.units().len() {
        return Err(Error::Parameter(format!("unit index {unit} out of range")));
    }
    let own_size = match side {
        Side::A => a.size(unit),
        Side::B => b.size(unit),
    };
    if index >= own_size {
        return Err(Error::Parameter(format!("atom index {index} out of unit of size {own_size}")));
    }
    // replayed atom: answer with its partner
    for &(pa, pb) in history {
        match side {
            Side::A if pa == atom => return Ok(StrategyResponse::Atom(pb)),
            Side::B if pb == atom => return Ok(StrategyResponse::Atom(pa)),
            _ => {}
        }
    }
    if !a.is_large(unit) {
        return Ok(StrategyResponse::Atom(atom)); // copy exactly
    }
    let other_size = match side {
        Side::A => b.size(unit),
        Side::B => a.size(unit),
    };
    let used: Vec<usize> = history
        .iter()
        .map(|&(pa, pb)| match side {
            Side::A => pb,
            Side::B => pa,
        })
        .filter(|&(u, _)| u == unit)
        .map(|(_, i)| i)
        .collect();
    match (0..other_size).find(|i| !used.contains(i)) {
        Some(i) => Ok(StrategyResponse::Atom((unit, i))),
        None => Ok(StrategyResponse::Resign),
    }
}

/// Replays the explicit strategy against every universal line of play for
/// mu rounds; true when it never resigns. States are explored up to the
/// interchange of atoms within a block, which the strategy itself is
/// insensitive to.
pub fn partition_strategy_survives(
    a: &PartitionStructure,
    b: &PartitionStructure,
    mu: usize,
) -> Result<bool> {
    if a.units() != b.units() || a.large() != b.large() {
        return Err(Error::Parameter("not a partition pair (units or large sets differ)".into()));
    }
    let units = a.units().len();
    // state: number of distinct pairs per unit
    fn go(
        a: &PartitionStructure,
        b: &PartitionStructure,
        units: usize,
        state: &mut Vec<usize>,
        rounds: usize,
        memo: &mut HashMap<(Vec<usize>, usize), bool>,
    ) -> bool {
        if rounds == 0 {
            return true;
        }
        let key = (state.clone(), rounds);
        if let Some(&v) = memo.get(&key) {
            return v;
        }
        let mut ok = true;
        'moves: for u in 0..units {
            for side_a in [true, false] {
                let own = if side_a { a.size(u) } else { b.size(u) };
                let other = if side_a { b.size(u) } else { a.size(u) };
                if state[u] < own {
                    // universal player introduces a fresh atom in unit u
                    if state[u] >= other {
                        ok = false; // strategy resigns: no fresh partner
                        break 'moves;
                    }
                    state[u] += 1;
                    let sub = go(a, b, units, state, rounds - 1, memo);
                    state[u] -= 1;
                    if !sub {
                        ok = false;
                        break 'moves;
                    }
                }
            }
        }
        // replaying an already-played atom leaves the state unchanged
        if ok && state.iter().any(|&c| c > 0) && !go(a, b, units, state, rounds - 1, memo) {
            ok = false;
        }
        memo.insert(key, ok);
        ok
    }
    let mut state = vec![0usize; units];
    let mut memo = HashMap::new();
    Ok(go(a, b, units, &mut state, mu, &mut memo))
}

/// Closed-form verdict on partition pairs: Exists wins the mu-round game
/// iff every block has the same size in both structures when truncated
/// at mu. Used as an independent oracle by the test batteries.
pub fn partition_closed_form(a: &PartitionStructure, b: &PartitionStructure, mu: usize) -> Winner {
    let ok = (0..a.units().len())
        .all(|u| a.size(u).min(mu) == b.size(u).min(mu));
    if ok {
        Winner::Exists
    } else {
        Winner::ForAll
    }
}
