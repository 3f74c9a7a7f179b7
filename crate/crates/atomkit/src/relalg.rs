//! Finite relation-algebra atom structures.
//!
//! An atom structure is given by its atoms, a single identity atom, an
//! involutive converse and the set of consistent triples `(a, b, c)`,
//! read as "c is below a;b". The triple set is kept cycle-closed and
//! complete with the identity triples, so every operation can treat it
//! as the single source of truth.

use std::collections::BTreeSet;

use crate::error::{Error, Result};

/// An element of the complex algebra: a set of atom indices.
pub type AtomSet = BTreeSet<usize>;

/// A violated law together with a minimal witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LawWitness {
    pub law: &'static str,
    pub atoms: Vec<String>,
    pub detail: String,
}

/// Outcome of an axiom check. Passes exactly when no witness was found.
#[derive(Debug, Clone, Default)]
pub struct ConsistencyReport {
    pub witnesses: Vec<LawWitness>,
}

impl ConsistencyReport {
    pub fn pass(&self) -> bool {
        self.witnesses.is_empty()
    }

    pub fn merge(mut self, other: ConsistencyReport) -> ConsistencyReport {
        self.witnesses.extend(other.witnesses);
        self
    }
}

/// Finite relation-algebra atom structure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RaAtomStructure {
    atoms: Vec<String>,
    identity: usize,
    converse: Vec<usize>,
    /// Cycle-closed, identity-complete triple set.
    triples: BTreeSet<(usize, usize, usize)>,
}

/// The two Peircean transforms from the cycle law. Together they
/// generate all six variants of a triple.
fn cycle_transforms(conv: &[usize], t: (usize, usize, usize)) -> [(usize, usize, usize); 2] {
    let (a, b, c) = t;
    [(conv[a], c, b), (c, conv[b], a)]
}

/// Full Peircean orbit of a triple (at most 6 distinct variants).
pub fn cycle_orbit(conv: &[usize], t: (usize, usize, usize)) -> BTreeSet<(usize, usize, usize)> {
    let mut orbit = BTreeSet::new();
    let mut stack = vec![t];
    while let Some(u) = stack.pop() {
        if orbit.insert(u) {
            stack.extend(cycle_transforms(conv, u));
        }
    }
    orbit
}

impl RaAtomStructure {
    /// Builds a structure from diversity triples, closing under cycles and
    /// adding the identity triples automatically.
    pub fn build(
        atoms: Vec<String>,
        identity: &str,
        converse_pairs: &[(String, String)],
        diversity_triples: &[(String, String, String)],
    ) -> Result<Self> {
        Self::construct(atoms, identity, converse_pairs, diversity_triples, false)
    }

    /// Strict variant used by the file loader: the given diversity triple
    /// set must already be cycle-closed, otherwise loading fails with a
    /// message naming a missing variant.
    pub fn load_strict(
        atoms: Vec<String>,
        identity: &str,
        converse_pairs: &[(String, String)],
        diversity_triples: &[(String, String, String)],
    ) -> Result<Self> {
        Self::construct(atoms, identity, converse_pairs, diversity_triples, true)
    }

    fn construct(
        atoms: Vec<String>,
        identity: &str,
        converse_pairs: &[(String, String)],
        diversity_triples: &[(String, String, String)],
        strict_cycles: bool,
    ) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::Parameter("atom list is empty".into()));
        }
        let mut seen = BTreeSet::new();
        for a in &atoms {
            if !seen.insert(a.clone()) {
                return Err(Error::Parameter(format!("duplicate atom name `{a}`")));
            }
        }
        let index = |name: &str| -> Result<usize> {
            atoms
                .iter()
                .position(|a| a == name)
                .ok_or_else(|| Error::UnknownAtom(name.to_string()))
        };
        let identity = index(identity)?;

        let mut converse = vec![usize::MAX; atoms.len()];
        for (from, to) in converse_pairs {
            let f = index(from)?;
            let t = index(to)?;
            if converse[f] != usize::MAX && converse[f] != t {
                return Err(Error::Parameter(format!("conflicting converse for `{from}`")));
            }
            converse[f] = t;
        }
        if converse[identity] == usize::MAX {
            converse[identity] = identity;
        }
        for (i, c) in converse.iter().enumerate() {
            if *c == usize::MAX {
                return Err(Error::Parameter(format!("no converse given for `{}`", atoms[i])));
            }
        }
        if converse[identity] != identity {
            return Err(Error::Parameter("converse must fix the identity atom".into()));
        }
        for (i, &c) in converse.iter().enumerate() {
            if converse[c] != i {
                return Err(Error::Parameter(format!(
                    "converse is not involutive at `{}`",
                    atoms[i]
                )));
            }
        }

        let mut diversity: BTreeSet<(usize, usize, usize)> = BTreeSet::new();
        for (a, b, c) in diversity_triples {
            let t = (index(a)?, index(b)?, index(c)?);
            if t.0 == identity || t.1 == identity || t.2 == identity {
                return Err(Error::Parameter(format!(
                    "diversity triple ({a},{b},{c}) mentions the identity atom; identity triples are derived, not stored"
                )));
            }
            diversity.insert(t);
        }
        if strict_cycles {
            for &t in &diversity {
                for v in cycle_transforms(&converse, t) {
                    if !diversity.contains(&v) {
                        let name = |i: usize| atoms[i].as_str();
                        return Err(Error::format(format!(
                            "triple set not cycle-closed: ({},{},{}) present but required variant ({},{},{}) missing",
                            name(t.0), name(t.1), name(t.2), name(v.0), name(v.1), name(v.2)
                        )));
                    }
                }
            }
        }

        let mut triples: BTreeSet<(usize, usize, usize)> = BTreeSet::new();
        for &t in &diversity {
            triples.extend(cycle_orbit(&converse, t));
        }
        // Identity triples from the identity law, closed under cycles.
        for b in 0..atoms.len() {
            triples.extend(cycle_orbit(&converse, (identity, b, b)));
            triples.extend(cycle_orbit(&converse, (b, identity, b)));
        }

        Ok(RaAtomStructure { atoms, identity, converse, triples })
    }

    pub fn atom_count(&self) -> usize {
        self.atoms.len()
    }

    pub fn atom_names(&self) -> &[String] {
        &self.atoms
    }

    pub fn atom_name(&self, i: usize) -> &str {
        &self.atoms[i]
    }

    pub fn atom_index(&self, name: &str) -> Result<usize> {
        self.atoms
            .iter()
            .position(|a| a == name)
            .ok_or_else(|| Error::UnknownAtom(name.to_string()))
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn converse(&self, a: usize) -> usize {
        self.converse[a]
    }

    pub fn converse_map(&self) -> &[usize] {
        &self.converse
    }

    /// The non-identity atoms, in index order (the set I).
    pub fn diversity_atoms(&self) -> Vec<usize> {
        (0..self.atoms.len()).filter(|&a| a != self.identity).collect()
    }

    pub fn triples(&self) -> &BTreeSet<(usize, usize, usize)> {
        &self.triples
    }

    /// The stored triples not mentioning the identity atom.
    pub fn diversity_triples(&self) -> Vec<(usize, usize, usize)> {
        self.triples
            .iter()
            .copied()
            .filter(|&(a, b, c)| a != self.identity && b != self.identity && c != self.identity)
            .collect()
    }

    /// c below a;b at atom level.
    pub fn consistent(&self, a: usize, b: usize, c: usize) -> bool {
        self.triples.contains(&(a, b, c))
    }

    fn check_atom(&self, a: usize) -> Result<()> {
        if a >= self.atoms.len() {
            return Err(Error::AtomIndex { index: a, len: self.atoms.len() });
        }
        Ok(())
    }

    fn check_set(&self, x: &AtomSet) -> Result<()> {
        for &a in x {
            self.check_atom(a)?;
        }
        Ok(())
    }

    /// Complex-algebra composition: `{c : exists a in X, b in Y with (a,b,c) consistent}`.
    pub fn compose_sets(&self, x: &AtomSet, y: &AtomSet) -> Result<AtomSet> {
        self.check_set(x)?;
        self.check_set(y)?;
        let mut out = AtomSet::new();
        for &(a, b, c) in &self.triples {
            if x.contains(&a) && y.contains(&b) {
                out.insert(c);
            }
        }
        Ok(out)
    }

    /// Pointwise converse image.
    pub fn converse_set(&self, x: &AtomSet) -> Result<AtomSet> {
        self.check_set(x)?;
        Ok(x.iter().map(|&a| self.converse[a]).collect())
    }

    /// Checks all four atom-structure laws, reporting a minimal witness
    /// per violation.
    pub fn check_ra_axioms(&self) -> ConsistencyReport {
        let mut report = ConsistencyReport::default();
        let name = |i: usize| self.atoms[i].clone();
        let e = self.identity;

        for (a, &c) in self.converse.iter().enumerate() {
            if self.converse[c] != a {
                report.witnesses.push(LawWitness {
                    law: "converse-involution",
                    atoms: vec![name(a)],
                    detail: format!("conv(conv({})) = {} != {}", name(a), name(self.converse[c]), name(a)),
                });
            }
        }

        'cycle: for &t in &self.triples {
            for v in cycle_transforms(&self.converse, t) {
                if !self.triples.contains(&v) {
                    report.witnesses.push(LawWitness {
                        law: "cycle-closure",
                        atoms: vec![name(t.0), name(t.1), name(t.2)],
                        detail: format!(
                            "({},{},{}) present but variant ({},{},{}) missing",
                            name(t.0), name(t.1), name(t.2), name(v.0), name(v.1), name(v.2)
                        ),
                    });
                    break 'cycle;
                }
            }
        }

        'ident: for b in 0..self.atoms.len() {
            for c in 0..self.atoms.len() {
                let left = self.triples.contains(&(e, b, c));
                let right = self.triples.contains(&(b, e, c));
                if left != (b == c) || right != (b == c) {
                    report.witnesses.push(LawWitness {
                        law: "identity-law",
                        atoms: vec![name(b), name(c)],
                        detail: format!(
                            "identity law fails at ({},{}): left {}, right {}",
                            name(b), name(c), left, right
                        ),
                    });
                    break 'ident;
                }
            }
        }

        'assoc: for a in 0..self.atoms.len() {
            for b in 0..self.atoms.len() {
                for c in 0..self.atoms.len() {
                    for d in 0..self.atoms.len() {
                        let lhs = (0..self.atoms.len()).any(|x| {
                            self.triples.contains(&(a, b, x)) && self.triples.contains(&(x, c, d))
                        });
                        let rhs = (0..self.atoms.len()).any(|y| {
                            self.triples.contains(&(b, c, y)) && self.triples.contains(&(a, y, d))
                        });
                        if lhs != rhs {
                            report.witnesses.push(LawWitness {
                                law: "associativity",
                                atoms: vec![name(a), name(b), name(c), name(d)],
                                detail: format!(
                                    "peircean associativity fails at ({},{},{},{})",
                                    name(a), name(b), name(c), name(d)
                                ),
                            });
                            break 'assoc;
                        }
                    }
                }
            }
        }

        report
    }
}

/// The Maddux algebra E_k(2,3): k symmetric non-identity atoms, a triangle
/// of diversity atoms consistent exactly when it is not monochromatic.
pub fn build_maddux(k: usize) -> Result<RaAtomStructure> {
    if k == 0 {
        return Err(Error::Parameter(
            "E_k(2,3) needs at least one non-identity atom (k >= 1)".into(),
        ));
    }
    let mut atoms = vec!["Id".to_string()];
    for i in 0..k {
        atoms.push(format!("a{i}"));
    }
    let converse: Vec<(String, String)> =
        atoms.iter().map(|a| (a.clone(), a.clone())).collect();
    let mut diversity = Vec::new();
    for i in 0..k {
        for j in 0..k {
            for l in 0..k {
                if !(i == j && j == l) {
                    diversity.push((format!("a{i}"), format!("a{j}"), format!("a{l}")));
                }
            }
        }
    }
    RaAtomStructure::build(atoms, "Id", &converse, &diversity)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn set(items: &[usize]) -> AtomSet {
        items.iter().copied().collect()
    }

    #[test]
    fn maddux_zero_rejected() {
        assert!(build_maddux(0).is_err());
    }

    #[test]
    fn maddux_k1_composition_is_identity() {
        let m = build_maddux(1).unwrap();
        let a0 = m.atom_index("a0").unwrap();
        let id = m.identity();
        let comp = m.compose_sets(&set(&[a0]), &set(&[a0])).unwrap();
        assert_eq!(comp, set(&[id]));
        assert!(m.check_ra_axioms().pass());
    }

    #[test]
    fn maddux_diversity_triple_counts() {
        // oracle: enumerate all k^3 index triples, drop the monochromatic ones
        for k in 1..=6 {
            let m = build_maddux(k).unwrap();
            let mut expected = 0usize;
            for i in 0..k {
                for j in 0..k {
                    for l in 0..k {
                        if !(i == j && j == l) {
                            expected += 1;
                        }
                    }
                }
            }
            assert_eq!(expected, k * k * k - k);
            assert_eq!(m.diversity_triples().len(), expected, "k={k}");
        }
    }

    #[test]
    fn maddux_passes_axioms_up_to_six() {
        for k in 1..=6 {
            let m = build_maddux(k).unwrap();
            assert!(m.check_ra_axioms().pass(), "k={k}");
        }
    }

    #[test]
    fn broken_cycle_reported() {
        let m = build_maddux(3).unwrap();
        let mut broken = m.clone();
        // remove one variant of a diversity triple
        let t = *broken.triples.iter().find(|&&(a, b, c)| {
            a != broken.identity && b != broken.identity && c != broken.identity && a != c
        })
        .unwrap();
        broken.triples.remove(&(t.2, broken.converse[t.1], t.0));
        let report = broken.check_ra_axioms();
        assert!(!report.pass());
        assert!(report.witnesses.iter().any(|w| w.law == "cycle-closure"));
    }

    #[test]
    fn identity_is_composition_unit() {
        let m = build_maddux(3).unwrap();
        let id = m.identity();
        for a in 0..m.atom_count() {
            let comp = m.compose_sets(&set(&[a]), &set(&[id])).unwrap();
            assert_eq!(comp, set(&[a]));
            let comp = m.compose_sets(&set(&[id]), &set(&[a])).unwrap();
            assert_eq!(comp, set(&[a]));
        }
    }

    #[test]
    fn maddux3_self_composition() {
        let m = build_maddux(3).unwrap();
        let a0 = m.atom_index("a0").unwrap();
        let a1 = m.atom_index("a1").unwrap();
        let a2 = m.atom_index("a2").unwrap();
        let id = m.identity();
        let comp = m.compose_sets(&set(&[a0]), &set(&[a0])).unwrap();
        assert_eq!(comp, set(&[id, a1, a2]));
    }

    #[test]
    fn empty_set_is_absorbing() {
        let m = build_maddux(3).unwrap();
        let all: AtomSet = (0..m.atom_count()).collect();
        assert!(m.compose_sets(&AtomSet::new(), &all).unwrap().is_empty());
        assert!(m.compose_sets(&all, &AtomSet::new()).unwrap().is_empty());
    }

    #[test]
    fn converse_fixes_everything_in_symmetric_algebra() {
        let m = build_maddux(3).unwrap();
        let a1 = m.atom_index("a1").unwrap();
        assert_eq!(m.converse_set(&set(&[a1])).unwrap(), set(&[a1]));
        assert_eq!(m.converse_set(&set(&[m.identity()])).unwrap(), set(&[m.identity()]));
    }

    #[test]
    fn converse_set_involutive_on_random_sets() {
        let m = build_maddux(5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let x: AtomSet = (0..m.atom_count()).filter(|_| rng.gen_bool(0.5)).collect();
            let twice = m.converse_set(&m.converse_set(&x).unwrap()).unwrap();
            assert_eq!(twice, x);
        }
    }

    #[test]
    fn compose_distributes_over_union() {
        let m = build_maddux(4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let rand_set = |rng: &mut ChaCha8Rng| -> AtomSet {
            (0..m.atom_count()).filter(|_| rng.gen_bool(0.4)).collect()
        };
        for _ in 0..50 {
            let x = rand_set(&mut rng);
            let x2 = rand_set(&mut rng);
            let y = rand_set(&mut rng);
            let both: AtomSet = x.union(&x2).copied().collect();
            let lhs = m.compose_sets(&both, &y).unwrap();
            let rhs: AtomSet = m
                .compose_sets(&x, &y)
                .unwrap()
                .union(&m.compose_sets(&x2, &y).unwrap())
                .copied()
                .collect();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn unknown_atom_is_domain_error() {
        let m = build_maddux(2).unwrap();
        let bad = set(&[99]);
        assert!(m.compose_sets(&bad, &bad).is_err());
        assert!(m.converse_set(&bad).is_err());
    }

    #[test]
    fn index_permutations_are_automorphisms() {
        use itertools::Itertools;
        for k in 1..=4usize {
            let m = build_maddux(k).unwrap();
            let div: Vec<usize> = m.diversity_atoms();
            for perm in div.iter().copied().permutations(k) {
                // map: identity fixed, diversity atom div[i] -> perm[i]
                let mut map: Vec<usize> = (0..m.atom_count()).collect();
                for (i, &d) in div.iter().enumerate() {
                    map[d] = perm[i];
                }
                for &(a, b, c) in m.triples() {
                    assert!(m.consistent(map[a], map[b], map[c]));
                }
            }
        }
    }

    #[test]
    fn cycle_checker_agrees_with_six_variant_oracle() {
        let m = build_maddux(4).unwrap();
        // oracle: a set is cycle-closed iff it contains all 6 Peircean
        // variants of each member
        let conv = m.converse_map().to_vec();
        let six = |(a, b, c): (usize, usize, usize)| {
            [
                (a, b, c),
                (conv[a], c, b),
                (c, conv[b], a),
                (conv[b], conv[a], conv[c]),
                (b, conv[c], conv[a]),
                (conv[c], a, conv[b]),
            ]
        };
        for &t in m.triples() {
            for v in six(t) {
                assert!(m.triples().contains(&v), "missing variant {v:?} of {t:?}");
            }
        }
        // and the checker itself says pass
        assert!(m.check_ra_axioms().pass());
    }

    #[test]
    fn strict_load_rejects_open_cycles() {
        let atoms = vec!["Id".into(), "a0".into(), "a1".into()];
        let conv: Vec<(String, String)> = vec![
            ("a0".into(), "a0".into()),
            ("a1".into(), "a1".into()),
        ];
        // (a0,a0,a1) without its variants
        let err = RaAtomStructure::load_strict(
            atoms,
            "Id",
            &conv,
            &[("a0".into(), "a0".into(), "a1".into())],
        )
        .unwrap_err();
        assert!(err.to_string().contains("not cycle-closed"), "{err}");
    }

    #[test]
    fn multi_identity_not_expressible_single_identity_enforced() {
        // converse moving the identity is rejected
        let atoms = vec!["Id".into(), "a0".into()];
        let conv: Vec<(String, String)> =
            vec![("Id".into(), "a0".into()), ("a0".into(), "Id".into())];
        assert!(RaAtomStructure::build(atoms, "Id", &conv, &[]).is_err());
    }
}
