//! Finite-or-cofinite set algebra over a countable blocked carrier.
//!
//! Elements of the term algebra over a blown-up atom structure are, per
//! infinite block, either a finite set or the complement of one. The
//! operations stay inside that class, which is what separates the term
//! algebra from the full powerset.

use std::collections::BTreeSet;

use crate::error::{Error, Result};

/// Shape of one carrier block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BlockShape {
    /// A block with exactly `size` atoms, addressed 0..size.
    Finite { size: usize },
    /// A countably infinite block, addressed by naturals `block:0, block:1, ...`.
    Infinite,
}

/// The carrier partition: named blocks, each finite or infinite.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FcCarrier {
    pub blocks: Vec<(String, BlockShape)>,
}

impl FcCarrier {
    pub fn new(blocks: Vec<(String, BlockShape)>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for (name, shape) in &blocks {
            if !seen.insert(name.clone()) {
                return Err(Error::Parameter(format!("duplicate block name `{name}`")));
            }
            if let BlockShape::Finite { size: 0 } = shape {
                return Err(Error::Parameter(format!("block `{name}` has size 0")));
            }
        }
        Ok(FcCarrier { blocks })
    }
}

/// Per-block value of a finite/cofinite element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BlockValue {
    /// Explicit subset. For an infinite block this is "finite mode";
    /// for a finite block it is the plain subset.
    Members(BTreeSet<usize>),
    /// Complement of a finite exception set; only valid on infinite blocks.
    Cofinite(BTreeSet<usize>),
}

/// A term-algebra element: one value per carrier block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinCofSet {
    carrier: FcCarrier,
    values: Vec<BlockValue>,
}

impl FinCofSet {
    pub fn new(carrier: FcCarrier, values: Vec<BlockValue>) -> Result<Self> {
        if values.len() != carrier.blocks.len() {
            return Err(Error::Parameter(format!(
                "expected {} block values, got {}",
                carrier.blocks.len(),
                values.len()
            )));
        }
        for ((name, shape), value) in carrier.blocks.iter().zip(&values) {
            match (shape, value) {
                (BlockShape::Finite { size }, BlockValue::Members(m)) => {
                    if let Some(&i) = m.iter().find(|&&i| i >= *size) {
                        return Err(Error::Parameter(format!(
                            "member {i} outside finite block `{name}` of size {size}"
                        )));
                    }
                }
                (BlockShape::Finite { .. }, BlockValue::Cofinite(_)) => {
                    return Err(Error::Parameter(format!(
                        "finite block `{name}` cannot carry a cofinite value"
                    )));
                }
                (BlockShape::Infinite, _) => {}
            }
        }
        Ok(FinCofSet { carrier, values })
    }

    pub fn carrier(&self) -> &FcCarrier {
        &self.carrier
    }

    pub fn values(&self) -> &[BlockValue] {
        &self.values
    }

    pub fn bottom(carrier: FcCarrier) -> Self {
        let values = carrier
            .blocks
            .iter()
            .map(|_| BlockValue::Members(BTreeSet::new()))
            .collect();
        FinCofSet { carrier, values }
    }

    pub fn top(carrier: FcCarrier) -> Self {
        let values = carrier
            .blocks
            .iter()
            .map(|(_, shape)| match shape {
                BlockShape::Finite { size } => BlockValue::Members((0..*size).collect()),
                BlockShape::Infinite => BlockValue::Cofinite(BTreeSet::new()),
            })
            .collect();
        FinCofSet { carrier, values }
    }

    fn check_same_carrier(&self, other: &FinCofSet) -> Result<()> {
        if self.carrier != other.carrier {
            return Err(Error::CarrierMismatch(
                "operands live over different carrier partitions".into(),
            ));
        }
        Ok(())
    }

    pub fn union(&self, other: &FinCofSet) -> Result<FinCofSet> {
        self.check_same_carrier(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(x, y)| match (x, y) {
                (BlockValue::Members(a), BlockValue::Members(b)) => {
                    BlockValue::Members(a.union(b).copied().collect())
                }
                (BlockValue::Members(a), BlockValue::Cofinite(b))
                | (BlockValue::Cofinite(b), BlockValue::Members(a)) => {
                    BlockValue::Cofinite(b.difference(a).copied().collect())
                }
                (BlockValue::Cofinite(a), BlockValue::Cofinite(b)) => {
                    BlockValue::Cofinite(a.intersection(b).copied().collect())
                }
            })
            .collect();
        Ok(FinCofSet { carrier: self.carrier.clone(), values })
    }

    pub fn intersect(&self, other: &FinCofSet) -> Result<FinCofSet> {
        self.check_same_carrier(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(x, y)| match (x, y) {
                (BlockValue::Members(a), BlockValue::Members(b)) => {
                    BlockValue::Members(a.intersection(b).copied().collect())
                }
                (BlockValue::Members(a), BlockValue::Cofinite(b))
                | (BlockValue::Cofinite(b), BlockValue::Members(a)) => {
                    BlockValue::Members(a.difference(b).copied().collect())
                }
                (BlockValue::Cofinite(a), BlockValue::Cofinite(b)) => {
                    BlockValue::Cofinite(a.union(b).copied().collect())
                }
            })
            .collect();
        Ok(FinCofSet { carrier: self.carrier.clone(), values })
    }

    pub fn complement(&self) -> FinCofSet {
        let values = self
            .carrier
            .blocks
            .iter()
            .zip(&self.values)
            .map(|((_, shape), v)| match (shape, v) {
                (BlockShape::Finite { size }, BlockValue::Members(m)) => {
                    BlockValue::Members((0..*size).filter(|i| !m.contains(i)).collect())
                }
                (BlockShape::Infinite, BlockValue::Members(m)) => BlockValue::Cofinite(m.clone()),
                (BlockShape::Infinite, BlockValue::Cofinite(e)) => BlockValue::Members(e.clone()),
                (BlockShape::Finite { .. }, BlockValue::Cofinite(_)) => unreachable!(),
            })
            .collect();
        FinCofSet { carrier: self.carrier.clone(), values }
    }

    /// Finite window onto the element: each infinite block is cut to its
    /// first `window` atoms. A window that would cut off an explicitly
    /// listed index misrepresents the element and is rejected.
    pub fn materialize(&self, window: usize) -> Result<BTreeSet<(usize, usize)>> {
        if window == 0 {
            return Err(Error::Parameter("window must be positive".into()));
        }
        let mut out = BTreeSet::new();
        for (block, ((_, shape), v)) in self.carrier.blocks.iter().zip(&self.values).enumerate() {
            match (shape, v) {
                (BlockShape::Finite { .. }, BlockValue::Members(m)) => {
                    out.extend(m.iter().map(|&i| (block, i)));
                }
                (BlockShape::Infinite, BlockValue::Members(m)) => {
                    if let Some(&i) = m.iter().find(|&&i| i >= window) {
                        return Err(Error::WindowTooSmall { window, index: i });
                    }
                    out.extend(m.iter().map(|&i| (block, i)));
                }
                (BlockShape::Infinite, BlockValue::Cofinite(e)) => {
                    if let Some(&i) = e.iter().find(|&&i| i >= window) {
                        return Err(Error::WindowTooSmall { window, index: i });
                    }
                    out.extend((0..window).filter(|i| !e.contains(i)).map(|i| (block, i)));
                }
                (BlockShape::Finite { .. }, BlockValue::Cofinite(_)) => unreachable!(),
            }
        }
        Ok(out)
    }

    /// Smallest window that materializes this element faithfully.
    pub fn min_window(&self) -> usize {
        let mut w = 1;
        for v in &self.values {
            let set = match v {
                BlockValue::Members(m) | BlockValue::Cofinite(m) => m,
            };
            if let Some(&max) = set.iter().next_back() {
                w = w.max(max + 1);
            }
        }
        w
    }
}

/// Description of a subset of a single infinite block, used to ask
/// whether it lives in the term representation at all.
#[derive(Debug, Clone)]
pub enum InfiniteSubsetDesc {
    Finite(BTreeSet<usize>),
    Cofinite(BTreeSet<usize>),
    /// Membership at index `i >= prefix.len()` follows
    /// `pattern[(i - prefix.len()) % pattern.len()]` forever.
    EventuallyPeriodic { prefix: Vec<bool>, pattern: Vec<bool> },
}

/// Membership test for the term representation: returns the block value
/// when the described subset is finite or cofinite, `None` when it is
/// neither (for example the even indices).
pub fn try_represent(desc: &InfiniteSubsetDesc) -> Option<BlockValue> {
    match desc {
        InfiniteSubsetDesc::Finite(m) => Some(BlockValue::Members(m.clone())),
        InfiniteSubsetDesc::Cofinite(e) => Some(BlockValue::Cofinite(e.clone())),
        InfiniteSubsetDesc::EventuallyPeriodic { prefix, pattern } => {
            if pattern.is_empty() || pattern.iter().all(|&b| !b) {
                let members = prefix
                    .iter()
                    .enumerate()
                    .filter(|(_, &b)| b)
                    .map(|(i, _)| i)
                    .collect();
                Some(BlockValue::Members(members))
            } else if pattern.iter().all(|&b| b) {
                let exceptions = prefix
                    .iter()
                    .enumerate()
                    .filter(|(_, &b)| !b)
                    .map(|(i, _)| i)
                    .collect();
                Some(BlockValue::Cofinite(exceptions))
            } else {
                None
            }
        }
    }
}
