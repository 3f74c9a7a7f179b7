//! Partition structures: a finite family of named blocks of atoms, with
//! a distinguished subset of "large" blocks on which two paired
//! structures may disagree in size.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionStructure {
    units: Vec<String>,
    sizes: Vec<usize>,
    large: BTreeSet<usize>,
}

impl PartitionStructure {
    pub fn new(units: Vec<String>, sizes: Vec<usize>, large: BTreeSet<usize>) -> Result<Self> {
        if units.len() != sizes.len() {
            return Err(Error::Parameter("one size per unit required".into()));
        }
        let mut seen = BTreeSet::new();
        for u in &units {
            if !seen.insert(u.clone()) {
                return Err(Error::Parameter(format!("duplicate unit `{u}`")));
            }
        }
        if let Some(i) = sizes.iter().position(|&s| s == 0) {
            return Err(Error::Parameter(format!("unit `{}` has no atoms", units[i])));
        }
        if let Some(&i) = large.iter().find(|&&i| i >= units.len()) {
            return Err(Error::Parameter(format!("large index {i} out of range")));
        }
        Ok(PartitionStructure { units, sizes, large })
    }

    pub fn units(&self) -> &[String] {
        &self.units
    }

    pub fn size(&self, unit: usize) -> usize {
        self.sizes[unit]
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn large(&self) -> &BTreeSet<usize> {
        &self.large
    }

    pub fn is_large(&self, unit: usize) -> bool {
        self.large.contains(&unit)
    }

    pub fn atom_count(&self) -> usize {
        self.sizes.iter().sum()
    }

    /// Atoms are addressed as unit:index pairs with stable names.
    pub fn atoms(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (u, &s) in self.sizes.iter().enumerate() {
            for i in 0..s {
                out.push((u, i));
            }
        }
        out
    }

    pub fn atom_name(&self, unit: usize, index: usize) -> String {
        format!("{}:{index}", self.units[unit])
    }
}

/// Builds two structures that agree outside the large units and may have
/// shrunken blocks on the large units in the second structure.
pub fn build_partition_pair(
    sizes_a: &BTreeMap<String, usize>,
    sizes_b: &BTreeMap<String, usize>,
    large: &BTreeSet<String>,
) -> Result<(PartitionStructure, PartitionStructure)> {
    if sizes_a.keys().ne(sizes_b.keys()) {
        return Err(Error::Parameter("the two structures must have the same units".into()));
    }
    for name in large {
        if !sizes_a.contains_key(name) {
            return Err(Error::Parameter(format!("large unit `{name}` is not a unit")));
        }
    }
    let units: Vec<String> = sizes_a.keys().cloned().collect();
    for (u, &sa) in sizes_a {
        let sb = sizes_b[u];
        if large.contains(u) {
            if sa < sb {
                return Err(Error::Parameter(format!(
                    "large unit `{u}`: first structure must not be smaller ({sa} < {sb})"
                )));
            }
        } else if sa != sb {
            return Err(Error::Parameter(format!(
                "sizes disagree on non-large unit `{u}` ({sa} vs {sb})"
            )));
        }
    }
    let large_idx: BTreeSet<usize> = units
        .iter()
        .enumerate()
        .filter(|(_, u)| large.contains(*u))
        .map(|(i, _)| i)
        .collect();
    let a = PartitionStructure::new(
        units.clone(),
        units.iter().map(|u| sizes_a[u]).collect(),
        large_idx.clone(),
    )?;
    let b = PartitionStructure::new(
        units.clone(),
        units.iter().map(|u| sizes_b[u]).collect(),
        large_idx,
    )?;
    Ok((a, b))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sizes(pairs: &[(&str, usize)]) -> BTreeMap<String, usize> {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    #[test]
    fn equal_sizes_give_identical_structures() {
        let s = sizes(&[("u", 3), ("v", 2)]);
        let (a, b) = build_partition_pair(&s, &s, &BTreeSet::new()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn large_block_asymmetry_allowed() {
        let a = sizes(&[("u", 4), ("v", 2)]);
        let b = sizes(&[("u", 3), ("v", 2)]);
        let large: BTreeSet<String> = ["u".to_string()].into_iter().collect();
        let (pa, pb) = build_partition_pair(&a, &b, &large).unwrap();
        assert_eq!(pa.size(0), 4);
        assert_eq!(pb.size(0), 3);
        assert!(pa.is_large(0));
        assert!(!pa.is_large(1));
    }

    #[test]
    fn disagreement_outside_large_rejected() {
        let a = sizes(&[("u", 4), ("v", 2)]);
        let b = sizes(&[("u", 4), ("v", 3)]);
        let large: BTreeSet<String> = ["u".to_string()].into_iter().collect();
        assert!(build_partition_pair(&a, &b, &large).is_err());
    }

    #[test]
    fn atom_addressing() {
        let p = PartitionStructure::new(
            vec!["u".into(), "v".into()],
            vec![2, 1],
            BTreeSet::new(),
        )
        .unwrap();
        assert_eq!(p.atom_count(), 3);
        assert_eq!(p.atoms(), vec![(0, 0), (0, 1), (1, 0)]);
        assert_eq!(p.atom_name(0, 1), "u:1");
    }
}
