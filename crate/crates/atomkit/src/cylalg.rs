//! Finite cylindric atom structures of dimension n.
//!
//! A structure carries one binary relation T_i per index i < n and one
//! diagonal set D_ij per index pair. The checked correspondence
//! conditions are: each T_i is an equivalence, the T_i compose
//! commutatively, and D_ii is the full atom set.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::relalg::{AtomSet, ConsistencyReport, LawWitness};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CaAtomStructure {
    dim: usize,
    atoms: Vec<String>,
    /// T_i as a set of ordered pairs, one relation per index.
    t: Vec<BTreeSet<(usize, usize)>>,
    /// D_ij for all i, j < dim.
    d: BTreeMap<(usize, usize), AtomSet>,
}

impl CaAtomStructure {
    pub fn new(
        dim: usize,
        atoms: Vec<String>,
        t: Vec<BTreeSet<(usize, usize)>>,
        d: BTreeMap<(usize, usize), AtomSet>,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Parameter("dimension must be positive".into()));
        }
        if atoms.is_empty() {
            return Err(Error::Parameter("atom list is empty".into()));
        }
        let mut seen = BTreeSet::new();
        for a in &atoms {
            if !seen.insert(a.clone()) {
                return Err(Error::Parameter(format!("duplicate atom name `{a}`")));
            }
        }
        if t.len() != dim {
            return Err(Error::Parameter(format!(
                "expected {dim} relations T_i, got {}",
                t.len()
            )));
        }
        let n = atoms.len();
        for rel in &t {
            for &(p, q) in rel {
                if p >= n || q >= n {
                    return Err(Error::AtomIndex { index: p.max(q), len: n });
                }
            }
        }
        for i in 0..dim {
            for j in 0..dim {
                let set = d
                    .get(&(i, j))
                    .ok_or_else(|| Error::Parameter(format!("missing diagonal set D_{i}{j}")))?;
                for &a in set {
                    if a >= n {
                        return Err(Error::AtomIndex { index: a, len: n });
                    }
                }
            }
        }
        Ok(CaAtomStructure { dim, atoms, t, d })
    }

    /// The discrete structure: every T_i is the identity relation and
    /// every diagonal is the full atom set.
    pub fn discrete(dim: usize, atoms: Vec<String>) -> Result<Self> {
        let n = atoms.len();
        let ident: BTreeSet<(usize, usize)> = (0..n).map(|a| (a, a)).collect();
        let all: AtomSet = (0..n).collect();
        let t = vec![ident; dim];
        let mut d = BTreeMap::new();
        for i in 0..dim {
            for j in 0..dim {
                d.insert((i, j), all.clone());
            }
        }
        Self::new(dim, atoms, t, d)
    }

    pub fn dim(&self) -> usize {
        self.dim
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

    pub fn relation(&self, i: usize) -> Result<&BTreeSet<(usize, usize)>> {
        self.t.get(i).ok_or(Error::DimIndex { index: i, dim: self.dim })
    }

    pub fn related(&self, i: usize, a: usize, b: usize) -> bool {
        self.t[i].contains(&(a, b))
    }

    /// D_ij.
    pub fn diagonal(&self, i: usize, j: usize) -> Result<AtomSet> {
        if i >= self.dim {
            return Err(Error::DimIndex { index: i, dim: self.dim });
        }
        if j >= self.dim {
            return Err(Error::DimIndex { index: j, dim: self.dim });
        }
        Ok(self.d[&(i, j)].clone())
    }

    /// T_i-saturation of X: the complex-algebra cylindrification c_i.
    pub fn cylindrify(&self, i: usize, x: &AtomSet) -> Result<AtomSet> {
        if i >= self.dim {
            return Err(Error::DimIndex { index: i, dim: self.dim });
        }
        for &a in x {
            if a >= self.atoms.len() {
                return Err(Error::AtomIndex { index: a, len: self.atoms.len() });
            }
        }
        let mut out = AtomSet::new();
        for &(p, q) in &self.t[i] {
            if x.contains(&p) {
                out.insert(q);
            }
            if x.contains(&q) {
                out.insert(p);
            }
        }
        out.extend(x.iter().copied());
        Ok(out)
    }

    pub fn check_ca_atomstructure(&self) -> ConsistencyReport {
        let mut report = ConsistencyReport::default();
        let n = self.atoms.len();
        let name = |a: usize| self.atoms[a].clone();

        for (i, rel) in self.t.iter().enumerate() {
            if let Some(a) = (0..n).find(|&a| !rel.contains(&(a, a))) {
                report.witnesses.push(LawWitness {
                    law: "equivalence-reflexive",
                    atoms: vec![name(a)],
                    detail: format!("T_{i} misses ({0},{0})", name(a)),
                });
                continue;
            }
            if let Some(&(a, b)) = rel.iter().find(|&&(a, b)| !rel.contains(&(b, a))) {
                report.witnesses.push(LawWitness {
                    law: "equivalence-symmetric",
                    atoms: vec![name(a), name(b)],
                    detail: format!("T_{i} has ({},{}) but not the reverse", name(a), name(b)),
                });
                continue;
            }
            'trans: for &(a, b) in rel {
                for c in 0..n {
                    if rel.contains(&(b, c)) && !rel.contains(&(a, c)) {
                        report.witnesses.push(LawWitness {
                            law: "equivalence-transitive",
                            atoms: vec![name(a), name(b), name(c)],
                            detail: format!(
                                "T_{i}: ({},{}) and ({},{}) but not ({},{})",
                                name(a), name(b), name(b), name(c), name(a), name(c)
                            ),
                        });
                        break 'trans;
                    }
                }
            }
        }

        // relation composition must commute across indices
        let compose = |r: &BTreeSet<(usize, usize)>, s: &BTreeSet<(usize, usize)>| {
            let mut out = BTreeSet::new();
            let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n];
            for &(p, q) in s {
                succ[p].push(q);
            }
            for &(p, q) in r {
                for &z in &succ[q] {
                    out.insert((p, z));
                }
            }
            out
        };
        'comm: for i in 0..self.dim {
            for j in (i + 1)..self.dim {
                let ij = compose(&self.t[i], &self.t[j]);
                let ji = compose(&self.t[j], &self.t[i]);
                if ij != ji {
                    let &(a, b) = ij.symmetric_difference(&ji).next().unwrap();
                    report.witnesses.push(LawWitness {
                        law: "composition-commutes",
                        atoms: vec![name(a), name(b)],
                        detail: format!("T_{i} o T_{j} and T_{j} o T_{i} differ at ({},{})", name(a), name(b)),
                    });
                    break 'comm;
                }
            }
        }

        for i in 0..self.dim {
            if self.d[&(i, i)].len() != n {
                let a = (0..n).find(|a| !self.d[&(i, i)].contains(a)).unwrap();
                report.witnesses.push(LawWitness {
                    law: "diagonal-dii",
                    atoms: vec![name(a)],
                    detail: format!("D_{i}{i} misses atom {}", name(a)),
                });
            }
        }

        report
    }
}

/// The full n-tuple structure over a finite base: atoms are all n-tuples,
/// T_i relates tuples agreeing off index i, D_ij collects tuples with
/// equal i-th and j-th entries. Every cylindrifier demand on it is
/// satisfiable, which makes it the standard sanity instance for the
/// network game.
pub fn full_tuple_structure(base: usize, dim: usize) -> Result<CaAtomStructure> {
    if base == 0 || dim == 0 {
        return Err(Error::Parameter("base and dimension must be positive".into()));
    }
    let count = base.checked_pow(dim as u32).ok_or_else(|| {
        Error::Parameter("tuple structure too large".into())
    })?;
    let tuple = |idx: usize| -> Vec<usize> {
        let mut v = Vec::with_capacity(dim);
        let mut rest = idx;
        for _ in 0..dim {
            v.push(rest % base);
            rest /= base;
        }
        v
    };
    let atoms: Vec<String> = (0..count)
        .map(|idx| {
            let t = tuple(idx);
            t.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("-")
        })
        .collect();
    let mut t = Vec::with_capacity(dim);
    for i in 0..dim {
        let mut rel = BTreeSet::new();
        for p in 0..count {
            for q in 0..count {
                let tp = tuple(p);
                let tq = tuple(q);
                if (0..dim).all(|m| m == i || tp[m] == tq[m]) {
                    rel.insert((p, q));
                }
            }
        }
        t.push(rel);
    }
    let mut d = BTreeMap::new();
    for i in 0..dim {
        for j in 0..dim {
            let set: AtomSet = (0..count).filter(|&p| {
                let tp = tuple(p);
                tp[i] == tp[j]
            }).collect();
            d.insert((i, j), set);
        }
    }
    CaAtomStructure::new(dim, atoms, t, d)
}
