//! A uniform relational view of the crate's atom structures, used by the
//! Ehrenfeucht-Fraisse solver. Atoms are the universe; the operators
//! become named relations of arity 1 to 3.

use std::collections::BTreeSet;

use crate::cylalg::CaAtomStructure;
use crate::error::{Error, Result};
use crate::relalg::RaAtomStructure;
use crate::structures::partition::PartitionStructure;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    pub name: String,
    pub arity: usize,
    pub tuples: BTreeSet<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelStructure {
    atoms: Vec<String>,
    /// Sorted by name; the signature is the (name, arity) list.
    relations: Vec<Relation>,
}

impl RelStructure {
    pub fn new(atoms: Vec<String>, mut relations: Vec<Relation>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::Parameter("structure needs at least one atom".into()));
        }
        relations.sort_by(|a, b| a.name.cmp(&b.name));
        for rel in &relations {
            if rel.arity == 0 || rel.arity > 3 {
                return Err(Error::Parameter(format!(
                    "relation `{}` has unsupported arity {}",
                    rel.name, rel.arity
                )));
            }
            for t in &rel.tuples {
                if t.len() != rel.arity {
                    return Err(Error::Parameter(format!(
                        "relation `{}` has a tuple of wrong length",
                        rel.name
                    )));
                }
                if let Some(&a) = t.iter().find(|&&a| a >= atoms.len()) {
                    return Err(Error::AtomIndex { index: a, len: atoms.len() });
                }
            }
        }
        Ok(RelStructure { atoms, relations })
    }

    pub fn atom_count(&self) -> usize {
        self.atoms.len()
    }

    pub fn atom_names(&self) -> &[String] {
        &self.atoms
    }

    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }

    pub fn signature(&self) -> Vec<(String, usize)> {
        self.relations.iter().map(|r| (r.name.clone(), r.arity)).collect()
    }

    pub fn only_unary(&self) -> bool {
        self.relations.iter().all(|r| r.arity == 1)
    }

    /// Bitmask of unary relations the atom belongs to, in signature order.
    pub fn unary_profile(&self, atom: usize) -> u64 {
        let mut mask = 0u64;
        for (i, rel) in self.relations.iter().enumerate() {
            if rel.arity == 1 && rel.tuples.contains(&vec![atom]) {
                mask |= 1 << i;
            }
        }
        mask
    }

    pub fn from_partition(p: &PartitionStructure) -> RelStructure {
        let mut atoms = Vec::new();
        let mut per_unit: Vec<BTreeSet<Vec<usize>>> = vec![BTreeSet::new(); p.units().len()];
        for (u, i) in p.atoms() {
            per_unit[u].insert(vec![atoms.len()]);
            atoms.push(p.atom_name(u, i));
        }
        let relations = p
            .units()
            .iter()
            .enumerate()
            .map(|(u, name)| Relation {
                name: format!("block:{name}"),
                arity: 1,
                tuples: per_unit[u].clone(),
            })
            .collect();
        RelStructure::new(atoms, relations).expect("partition structures are well formed")
    }

    pub fn from_ra(s: &RaAtomStructure) -> RelStructure {
        let atoms = s.atom_names().to_vec();
        let relations = vec![
            Relation {
                name: "identity".into(),
                arity: 1,
                tuples: [vec![s.identity()]].into_iter().collect(),
            },
            Relation {
                name: "converse".into(),
                arity: 2,
                tuples: (0..s.atom_count()).map(|a| vec![a, s.converse(a)]).collect(),
            },
            Relation {
                name: "triple".into(),
                arity: 3,
                tuples: s.triples().iter().map(|&(a, b, c)| vec![a, b, c]).collect(),
            },
        ];
        RelStructure::new(atoms, relations).expect("ra structures are well formed")
    }

    pub fn from_ca(s: &CaAtomStructure) -> RelStructure {
        let atoms = s.atom_names().to_vec();
        let mut relations = Vec::new();
        for i in 0..s.dim() {
            relations.push(Relation {
                name: format!("t{i}"),
                arity: 2,
                tuples: s
                    .relation(i)
                    .expect("index below dim")
                    .iter()
                    .map(|&(a, b)| vec![a, b])
                    .collect(),
            });
        }
        for i in 0..s.dim() {
            for j in 0..s.dim() {
                relations.push(Relation {
                    name: format!("d{i}_{j}"),
                    arity: 1,
                    tuples: s
                        .diagonal(i, j)
                        .expect("indices below dim")
                        .into_iter()
                        .map(|a| vec![a])
                        .collect(),
                });
            }
        }
        RelStructure::new(atoms, relations).expect("ca structures are well formed")
    }
}
