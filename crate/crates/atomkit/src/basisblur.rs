//! Basic matrices, cylindric bases and the blur apparatus.
//!
//! The quantifier conditions (J4)_n and (J5)_n over a blur family J_l
//! come in three evaluation modes: a pruned exhaustive sweep, a naive
//! full enumeration (the trust anchor the pruned sweep is tested
//! against), and seeded uniform sampling for parameter regimes whose
//! full quantifier space is astronomically large. All three report the
//! lexicographically least violating instantiation they encounter.

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use itertools::Itertools;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::cylalg::CaAtomStructure;
use crate::error::{Error, Result};
use crate::relalg::{AtomSet, RaAtomStructure};

/// Default guard for basic-matrix enumeration, counted in candidate
/// upper-triangle assignments. Overridable through the CLI / ATOMKIT_CAP.
pub const DEFAULT_ENUM_CAP: u128 = 10_000_000;

/// True iff some arrangement (p,q,r) of the multiset {i,j,k} satisfies
/// r - q = q - p, i.e. one of the three is the average of the other two.
pub fn evenly_distributed(i: u64, j: u64, k: u64) -> bool {
    i + k == 2 * j || i + j == 2 * k || j + k == 2 * i
}

/// The ternary index predicate attached to a blur family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IndexPredicate {
    EvenlyDistributed,
}

impl IndexPredicate {
    pub fn eval(&self, i: u64, j: u64, k: u64) -> bool {
        match self {
            IndexPredicate::EvenlyDistributed => evenly_distributed(i, j, k),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            IndexPredicate::EvenlyDistributed => "evenly-distributed",
        }
    }
}

/// A blur family: all (or some) l-element subsets of the non-identity
/// atoms, plus the index predicate E.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlurSpec {
    l: usize,
    /// Each member sorted ascending; the family itself in lexicographic order.
    sets: Vec<Vec<usize>>,
    e: IndexPredicate,
}

impl BlurSpec {
    pub fn new(
        structure: &RaAtomStructure,
        l: usize,
        sets: Vec<Vec<usize>>,
        e: IndexPredicate,
    ) -> Result<Self> {
        let diversity: BTreeSet<usize> = structure.diversity_atoms().into_iter().collect();
        for set in &sets {
            if set.len() != l {
                return Err(Error::Parameter(format!(
                    "blur member {set:?} does not have cardinality {l}"
                )));
            }
            for &a in set {
                if !diversity.contains(&a) {
                    return Err(Error::Parameter(format!(
                        "blur member atom index {a} is not a non-identity atom"
                    )));
                }
            }
        }
        let mut sets = sets;
        for s in &mut sets {
            s.sort_unstable();
        }
        sets.sort();
        sets.dedup();
        Ok(BlurSpec { l, sets, e })
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn members(&self) -> &[Vec<usize>] {
        &self.sets
    }

    pub fn predicate(&self) -> IndexPredicate {
        self.e
    }
}

/// J_l: every l-subset of the non-identity atoms, in lexicographic order.
pub fn blur_index(structure: &RaAtomStructure, l: usize) -> Result<BlurSpec> {
    let diversity = structure.diversity_atoms();
    if l == 0 {
        return Err(Error::Parameter("blur cardinality l must be positive".into()));
    }
    if l > diversity.len() {
        return Err(Error::Parameter(format!(
            "blur cardinality l={l} exceeds |I|={}",
            diversity.len()
        )));
    }
    let sets: Vec<Vec<usize>> = diversity.into_iter().combinations(l).collect();
    BlurSpec::new(structure, l, sets, IndexPredicate::EvenlyDistributed)
}

/// n x n matrix of atoms with identity diagonal, converse-symmetric
/// entries and triangle-coherent triples.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct BasicMatrix {
    n: usize,
    entries: Vec<usize>,
}

impl BasicMatrix {
    pub fn from_entries(n: usize, entries: Vec<usize>) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::Parameter(format!(
                "expected {} entries for an {n}x{n} matrix, got {}",
                n * n,
                entries.len()
            )));
        }
        Ok(BasicMatrix { n, entries })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> usize {
        self.entries[i * self.n + j]
    }

    pub fn entries(&self) -> &[usize] {
        &self.entries
    }

    /// All three basic-matrix invariants against the given structure.
    pub fn is_basic(&self, s: &RaAtomStructure) -> bool {
        let n = self.n;
        for i in 0..n {
            if self.get(i, i) != s.identity() {
                return false;
            }
        }
        for i in 0..n {
            for j in 0..n {
                if self.get(j, i) != s.converse(self.get(i, j)) {
                    return false;
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if !s.consistent(self.get(i, j), self.get(j, k), self.get(i, k)) {
                        return false;
                    }
                }
            }
        }
        true
    }
}

/// All n x n basic matrices over the structure, in lexicographic order of
/// their upper-triangle entries. Refuses when the raw assignment count
/// exceeds the cap.
pub fn enumerate_basic_matrices(
    s: &RaAtomStructure,
    n: usize,
    cap: Option<u128>,
) -> Result<Vec<BasicMatrix>> {
    if n < 2 {
        return Err(Error::Parameter("matrix dimension must be at least 2".into()));
    }
    let cap = cap.unwrap_or(DEFAULT_ENUM_CAP);
    let cells: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .collect();
    let size = (s.atom_count() as u128)
        .checked_pow(cells.len() as u32)
        .unwrap_or(u128::MAX);
    if size > cap {
        return Err(Error::CapExceeded { size, cap });
    }

    let mut out = Vec::new();
    let mut entries = vec![s.identity(); n * n];
    fn fill(
        s: &RaAtomStructure,
        cells: &[(usize, usize)],
        pos: usize,
        entries: &mut Vec<usize>,
        n: usize,
        out: &mut Vec<BasicMatrix>,
    ) {
        if pos == cells.len() {
            out.push(BasicMatrix { n, entries: entries.clone() });
            return;
        }
        let (i, j) = cells[pos];
        'atoms: for a in 0..s.atom_count() {
            entries[i * n + j] = a;
            entries[j * n + i] = s.converse(a);
            // check every triangle all of whose off-diagonal cells are
            // already assigned (assignment order is row-major on i<j)
            for x in 0..n {
                for y in 0..n {
                    for z in 0..n {
                        let assigned = |p: usize, q: usize| {
                            p == q || {
                                let (lo, hi) = if p < q { (p, q) } else { (q, p) };
                                cells[..=pos].contains(&(lo, hi))
                            }
                        };
                        if assigned(x, y) && assigned(y, z) && assigned(x, z) {
                            if !s.consistent(
                                entries[x * n + y],
                                entries[y * n + z],
                                entries[x * n + z],
                            ) {
                                continue 'atoms;
                            }
                        }
                    }
                }
            }
            fill(s, cells, pos + 1, entries, n, out);
        }
        entries[i * n + j] = s.identity();
        entries[j * n + i] = s.identity();
    }
    fill(s, &cells, 0, &mut entries, n, &mut out);
    out.sort();
    Ok(out)
}

/// The cylindric atom structure induced by the basic matrices: atoms are
/// the matrices, T_i relates matrices agreeing outside row and column i,
/// D_ij collects matrices whose (i,j) entry is the identity.
pub fn ca_from_basic_matrices(
    s: &RaAtomStructure,
    n: usize,
    cap: Option<u128>,
) -> Result<CaAtomStructure> {
    let matrices = enumerate_basic_matrices(s, n, cap)?;
    let atoms: Vec<String> = matrices
        .iter()
        .map(|m| {
            (0..n)
                .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
                .map(|(i, j)| s.atom_name(m.get(i, j)))
                .collect::<Vec<_>>()
                .join(".")
        })
        .collect();
    let agree_off = |a: &BasicMatrix, b: &BasicMatrix, i: usize| {
        (0..n).all(|j| {
            (0..n).all(|k| j == i || k == i || a.get(j, k) == b.get(j, k))
        })
    };
    let mut t = Vec::with_capacity(n);
    for i in 0..n {
        let mut rel = BTreeSet::new();
        for (p, mp) in matrices.iter().enumerate() {
            for (q, mq) in matrices.iter().enumerate() {
                if agree_off(mp, mq, i) {
                    rel.insert((p, q));
                }
            }
        }
        t.push(rel);
    }
    let mut d = BTreeMap::new();
    for i in 0..n {
        for j in 0..n {
            let set: AtomSet = matrices
                .iter()
                .enumerate()
                .filter(|(_, m)| m.get(i, j) == s.identity())
                .map(|(idx, _)| idx)
                .collect();
            d.insert((i, j), set);
        }
    }
    CaAtomStructure::new(n, atoms, t, d)
}

/// How a quantifier condition is to be evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalMode {
    /// Full sweep with set-algebraic pruning.
    Exhaustive,
    /// Full sweep by pure enumeration; the oracle the pruned sweep must match.
    Naive,
    /// Uniformly seeded random instantiations.
    Sampled { samples: u64, seed: u64 },
}

/// A violating instantiation of (J4)_n: the V and W tuples (atom index
/// sets, positions 2..=n) for which no T in J works.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct J4Witness {
    pub v: Vec<Vec<usize>>,
    pub w: Vec<Vec<usize>>,
}

/// A violating instantiation of (J5)_n.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct J5Witness {
    pub p: Vec<usize>,
    pub q: Vec<usize>,
    pub w: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BlurWitness {
    J4(J4Witness),
    J5(J5Witness),
}

/// Result of a quantifier check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuantifierCheck {
    pub holds: bool,
    pub witness: Option<BlurWitness>,
    /// Number of sampled instantiations, when sampling was used.
    pub samples: Option<u64>,
}

fn atom_mask(atoms: &[usize]) -> u128 {
    atoms.iter().fold(0u128, |m, &a| m | (1u128 << a))
}

fn mask_atoms(mut m: u128) -> Vec<usize> {
    let mut out = Vec::new();
    while m != 0 {
        let a = m.trailing_zeros() as usize;
        out.push(a);
        m &= m - 1;
    }
    out
}

struct BlurContext {
    /// cons[b][c] = bitmask of atoms a with (b,c,a) consistent.
    cons: Vec<Vec<u128>>,
    blur_masks: Vec<u128>,
}

impl BlurContext {
    fn new(s: &RaAtomStructure, b: &BlurSpec) -> Result<Self> {
        let count = s.atom_count();
        if count > 128 {
            return Err(Error::Parameter(
                "blur checkers support at most 128 atoms".into(),
            ));
        }
        let mut cons = vec![vec![0u128; count]; count];
        for &(x, y, z) in s.triples() {
            cons[x][y] |= 1u128 << z;
        }
        let blur_masks = b.sets.iter().map(|set| atom_mask(set)).collect();
        Ok(BlurContext { cons, blur_masks })
    }

    /// The (J4) body for one position: every a in V below b;c for all
    /// b in W, c in T.
    fn j4_body(&self, v: u128, w: u128, t: u128) -> bool {
        for b in mask_atoms(w) {
            for c in mask_atoms(t) {
                if v & !self.cons[b][c] != 0 {
                    return false;
                }
            }
        }
        true
    }
}

/// Re-checks a single (J4) instantiation: true when some blur T in J
/// satisfies the body for these V and W tuples (positions 2..=n).
pub fn j4_instance_holds(
    s: &RaAtomStructure,
    b: &BlurSpec,
    v: &[Vec<usize>],
    w: &[Vec<usize>],
) -> Result<bool> {
    if v.len() != w.len() || v.is_empty() {
        return Err(Error::Parameter("V and W tuples must have equal positive length".into()));
    }
    let ctx = BlurContext::new(s, b)?;
    let vm: Vec<u128> = v.iter().map(|set| atom_mask(set)).collect();
    let wm: Vec<u128> = w.iter().map(|set| atom_mask(set)).collect();
    Ok(ctx.blur_masks.iter().any(|&t| {
        vm.iter().zip(&wm).all(|(&vi, &wi)| ctx.j4_body(vi, wi, t))
    }))
}

/// Re-checks a single (J5) instantiation: true when the blur W meets the
/// intersection of the compositions P_i;Q_i restricted to the diversity
/// atoms.
pub fn j5_instance_holds(
    s: &RaAtomStructure,
    b: &BlurSpec,
    p: &[usize],
    q: &[usize],
    w: &[usize],
) -> Result<bool> {
    if p.len() != q.len() || p.is_empty() {
        return Err(Error::Parameter("P and Q tuples must have equal positive length".into()));
    }
    let _ = BlurContext::new(s, b)?; // atom-count guard
    let divmask = atom_mask(&s.diversity_atoms());
    let mut meet = divmask;
    for (&pi, &qi) in p.iter().zip(q) {
        let mut m = 0u128;
        for &(x, y, z) in s.triples() {
            if x == pi && y == qi {
                m |= 1u128 << z;
            }
        }
        meet &= m & divmask;
    }
    Ok(meet & atom_mask(w) != 0)
}

fn require_n(n: usize) -> Result<()> {
    if n <= 2 {
        return Err(Error::Parameter(format!(
            "blur conditions are defined for n > 2, got n={n}"
        )));
    }
    Ok(())
}

/// (J4)_n: for all V_2..V_n, W_2..W_n in J there is T in J with every
/// a in V_i below b;c for all b in W_i, c in T. "a below b;c" reads as
/// membership of (b,c,a) in the triple set.
pub fn check_j4(
    s: &RaAtomStructure,
    b: &BlurSpec,
    n: usize,
    mode: EvalMode,
) -> Result<QuantifierCheck> {
    require_n(n)?;
    let ctx = BlurContext::new(s, b)?;
    let jlen = b.sets.len();
    if jlen == 0 {
        return Ok(QuantifierCheck { holds: true, witness: None, samples: None });
    }
    let groups = n - 1;

    let witness_for = |idx: &[usize]| -> BlurWitness {
        BlurWitness::J4(J4Witness {
            v: idx[..groups].iter().map(|&i| b.sets[i].clone()).collect(),
            w: idx[groups..].iter().map(|&i| b.sets[i].clone()).collect(),
        })
    };

    match mode {
        EvalMode::Exhaustive => {
            if jlen > 128 {
                return Err(Error::Parameter(format!(
                    "exhaustive (J4) sweep supports |J| <= 128 (|J| = {jlen}); use sampling"
                )));
            }
            // ok[v][w] = bitset over J of the T satisfying the body for (v, w)
            let full: u128 = if jlen == 128 { u128::MAX } else { (1u128 << jlen) - 1 };
            let mut ok = vec![vec![0u128; jlen]; jlen];
            for v in 0..jlen {
                for w in 0..jlen {
                    let mut mask = 0u128;
                    for t in 0..jlen {
                        if ctx.j4_body(ctx.blur_masks[v], ctx.blur_masks[w], ctx.blur_masks[t]) {
                            mask |= 1u128 << t;
                        }
                    }
                    ok[v][w] = mask;
                }
            }
            let mut idx = vec![0usize; 2 * groups];
            loop {
                let mut acc = full;
                for i in 0..groups {
                    acc &= ok[idx[i]][idx[groups + i]];
                    if acc == 0 {
                        break;
                    }
                }
                if acc == 0 {
                    return Ok(QuantifierCheck {
                        holds: false,
                        witness: Some(witness_for(&idx)),
                        samples: None,
                    });
                }
                // odometer, last coordinate fastest
                let mut pos = idx.len();
                loop {
                    if pos == 0 {
                        return Ok(QuantifierCheck { holds: true, witness: None, samples: None });
                    }
                    pos -= 1;
                    idx[pos] += 1;
                    if idx[pos] < jlen {
                        break;
                    }
                    idx[pos] = 0;
                }
            }
        }
        EvalMode::Naive => {
            // plain tensor lookup keeps the pure enumeration affordable
            let count = s.atom_count();
            let mut tensor = vec![false; count * count * count];
            for &(x, y, z) in s.triples() {
                tensor[(x * count + y) * count + z] = true;
            }
            let mut idx = vec![0usize; 2 * groups];
            loop {
                let mut found = false;
                't_loop: for t in 0..jlen {
                    for i in 0..groups {
                        let v = &b.sets[idx[i]];
                        let w = &b.sets[idx[groups + i]];
                        for &aa in v {
                            for &bb in w {
                                for &cc in &b.sets[t] {
                                    if !tensor[(bb * count + cc) * count + aa] {
                                        continue 't_loop;
                                    }
                                }
                            }
                        }
                    }
                    found = true;
                    break;
                }
                if !found {
                    return Ok(QuantifierCheck {
                        holds: false,
                        witness: Some(witness_for(&idx)),
                        samples: None,
                    });
                }
                let mut pos = idx.len();
                loop {
                    if pos == 0 {
                        return Ok(QuantifierCheck { holds: true, witness: None, samples: None });
                    }
                    pos -= 1;
                    idx[pos] += 1;
                    if idx[pos] < jlen {
                        break;
                    }
                    idx[pos] = 0;
                }
            }
        }
        EvalMode::Sampled { samples, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..samples {
                let idx: Vec<usize> =
                    (0..2 * groups).map(|_| rng.gen_range(0..jlen)).collect();
                let body = |t: usize| {
                    (0..groups).all(|i| {
                        ctx.j4_body(
                            ctx.blur_masks[idx[i]],
                            ctx.blur_masks[idx[groups + i]],
                            ctx.blur_masks[t],
                        )
                    })
                };
                // Probe spread-out candidates first: lexicographically
                // adjacent blurs share long prefixes, so a scan in lex
                // order can wade through thousands of consecutive
                // failures sharing one bad prefix atom. The full sweep
                // below keeps the check complete.
                let stride = (0x9e3779b97f4a7c15u64 as usize % jlen).max(1);
                let probes = 64.min(jlen);
                let found = (0..probes).any(|step| body((step * stride) % jlen))
                    || (0..jlen).any(body);
                if !found {
                    return Ok(QuantifierCheck {
                        holds: false,
                        witness: Some(witness_for(&idx)),
                        samples: Some(samples),
                    });
                }
            }
            Ok(QuantifierCheck { holds: true, witness: None, samples: Some(samples) })
        }
    }
}

/// (J5)_n: for all P_2..P_n, Q_2..Q_n in I and every W in J, W meets the
/// intersection of the compositions P_i;Q_i restricted to I.
pub fn check_j5(
    s: &RaAtomStructure,
    b: &BlurSpec,
    n: usize,
    mode: EvalMode,
) -> Result<QuantifierCheck> {
    require_n(n)?;
    let ctx = BlurContext::new(s, b)?;
    let diversity = s.diversity_atoms();
    let dlen = diversity.len();
    let jlen = b.sets.len();
    if jlen == 0 {
        return Ok(QuantifierCheck { holds: true, witness: None, samples: None });
    }
    let groups = n - 1;
    let divmask = atom_mask(&diversity);

    // comp[p][q] = atoms below p;q, restricted to I (indices into `diversity`)
    let comp = |p: usize, q: usize| -> u128 {
        let mut m = 0u128;
        for &(x, y, z) in s.triples() {
            if x == p && y == q {
                m |= 1u128 << z;
            }
        }
        m & divmask
    };

    let witness_for = |idx: &[usize], w: usize| -> BlurWitness {
        BlurWitness::J5(J5Witness {
            p: idx[..groups].iter().map(|&i| diversity[i]).collect(),
            q: idx[groups..].iter().map(|&i| diversity[i]).collect(),
            w: b.sets[w].clone(),
        })
    };

    match mode {
        EvalMode::Exhaustive | EvalMode::Naive => {
            let naive = matches!(mode, EvalMode::Naive);
            let table: Vec<Vec<u128>> = if naive {
                Vec::new()
            } else {
                (0..dlen)
                    .map(|p| (0..dlen).map(|q| comp(diversity[p], diversity[q])).collect())
                    .collect()
            };
            let mut idx = vec![0usize; 2 * groups];
            loop {
                for w in 0..jlen {
                    let violated = if naive {
                        // explicit membership scan
                        let mut meets = false;
                        'atom: for &a in &b.sets[w] {
                            for i in 0..groups {
                                let p = diversity[idx[i]];
                                let q = diversity[idx[groups + i]];
                                if !s.consistent(p, q, a) {
                                    continue 'atom;
                                }
                            }
                            meets = true;
                            break;
                        }
                        !meets
                    } else {
                        let mut acc = divmask;
                        for i in 0..groups {
                            acc &= table[idx[i]][idx[groups + i]];
                        }
                        acc & ctx.blur_masks[w] == 0
                    };
                    if violated {
                        return Ok(QuantifierCheck {
                            holds: false,
                            witness: Some(witness_for(&idx, w)),
                            samples: None,
                        });
                    }
                }
                let mut pos = idx.len();
                loop {
                    if pos == 0 {
                        return Ok(QuantifierCheck { holds: true, witness: None, samples: None });
                    }
                    pos -= 1;
                    idx[pos] += 1;
                    if idx[pos] < dlen {
                        break;
                    }
                    idx[pos] = 0;
                }
            }
        }
        EvalMode::Sampled { samples, seed } => {
            let table: Vec<Vec<u128>> = (0..dlen)
                .map(|p| (0..dlen).map(|q| comp(diversity[p], diversity[q])).collect())
                .collect();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..samples {
                let idx: Vec<usize> = (0..2 * groups).map(|_| rng.gen_range(0..dlen)).collect();
                let w = rng.gen_range(0..jlen);
                let mut acc = divmask;
                for i in 0..groups {
                    acc &= table[idx[i]][idx[groups + i]];
                }
                if acc & ctx.blur_masks[w] == 0 {
                    return Ok(QuantifierCheck {
                        holds: false,
                        witness: Some(witness_for(&idx, w)),
                        samples: Some(samples),
                    });
                }
            }
            Ok(QuantifierCheck { holds: true, witness: None, samples: Some(samples) })
        }
    }
}

/// Report of the n-blur check: the (J4) condition plus bookkeeping on E.
#[derive(Debug, Clone)]
pub struct BlurReport {
    pub j4: QuantifierCheck,
    pub e_name: &'static str,
    pub e_symmetric_checked: bool,
}

impl BlurReport {
    pub fn pass(&self) -> bool {
        self.j4.holds && self.e_symmetric_checked
    }
}

/// (J,E) as an n-blur: the displayed (J4)_n condition, with the index
/// predicate recorded and sanity-checked for symmetry on a small window.
pub fn is_n_blur(
    s: &RaAtomStructure,
    b: &BlurSpec,
    n: usize,
    mode: EvalMode,
) -> Result<BlurReport> {
    require_n(n)?;
    let j4 = check_j4(s, b, n, mode)?;
    let mut symmetric = true;
    for i in 0..8u64 {
        for j in 0..8u64 {
            for k in 0..8u64 {
                let v = b.e.eval(i, j, k);
                if v != b.e.eval(i, k, j) || v != b.e.eval(j, i, k) || v != b.e.eval(k, j, i) {
                    symmetric = false;
                }
            }
        }
    }
    Ok(BlurReport { j4, e_name: b.e.name(), e_symmetric_checked: symmetric })
}

/// One atom of the blown-up carrier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct BlownAtom {
    /// Copy index below the truncation.
    pub index: usize,
    /// Non-identity atom of the base structure.
    pub base: usize,
    /// Index into the blur family.
    pub blur: usize,
}

/// Finite truncation of the blown-up carrier {0..N-1} x I x J with its
/// two partitions: embedding fibers (by base atom) and blur colours.
#[derive(Debug, Clone)]
pub struct BlownCarrier {
    pub atoms: Vec<BlownAtom>,
    /// Fiber cells F_a, keyed by base atom, each a list of carrier indices.
    pub fibers: Vec<(usize, Vec<usize>)>,
    /// Colour cells G_W, keyed by blur index.
    pub colours: Vec<(usize, Vec<usize>)>,
}

impl BlownCarrier {
    /// Lifted consistency: a triple of blown atoms is consistent exactly
    /// when its base triple is consistent in the base structure.
    pub fn consistent(&self, s: &RaAtomStructure, x: BlownAtom, y: BlownAtom, z: BlownAtom) -> bool {
        s.consistent(x.base, y.base, z.base)
    }
}

/// Builds the truncated carrier with both partitions.
pub fn blow_up(s: &RaAtomStructure, b: &BlurSpec, truncation: usize) -> Result<BlownCarrier> {
    if truncation == 0 {
        return Err(Error::Parameter("truncation must be at least 1".into()));
    }
    let diversity = s.diversity_atoms();
    let mut atoms = Vec::new();
    for index in 0..truncation {
        for &base in &diversity {
            for blur in 0..b.sets.len() {
                atoms.push(BlownAtom { index, base, blur });
            }
        }
    }
    let mut fibers: Vec<(usize, Vec<usize>)> =
        diversity.iter().map(|&a| (a, Vec::new())).collect();
    let mut colours: Vec<(usize, Vec<usize>)> =
        (0..b.sets.len()).map(|w| (w, Vec::new())).collect();
    for (i, atom) in atoms.iter().enumerate() {
        let fiber = fibers.iter_mut().find(|(a, _)| *a == atom.base).unwrap();
        fiber.1.push(i);
        colours[atom.blur].1.push(i);
    }
    Ok(BlownCarrier { atoms, fibers, colours })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relalg::build_maddux;

    #[test]
    fn evenly_distributed_examples() {
        assert!(evenly_distributed(1, 2, 3));
        assert!(evenly_distributed(0, 0, 0));
        assert!(!evenly_distributed(0, 1, 3));
    }

    #[test]
    fn evenly_distributed_matches_arrangement_oracle() {
        use itertools::Itertools;
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..10_000 {
            let t: Vec<i64> = (0..3).map(|_| rng.gen_range(0..50)).collect();
            let oracle = t
                .iter()
                .copied()
                .permutations(3)
                .any(|p| p[2] - p[1] == p[1] - p[0]);
            let got = evenly_distributed(t[0] as u64, t[1] as u64, t[2] as u64);
            assert_eq!(got, oracle, "triple {t:?}");
            // symmetry under permutations
            for p in t.iter().copied().permutations(3) {
                assert_eq!(got, evenly_distributed(p[0] as u64, p[1] as u64, p[2] as u64));
            }
        }
    }

    #[test]
    fn blur_index_counts() {
        let m5 = build_maddux(5).unwrap();
        assert_eq!(blur_index(&m5, 2).unwrap().members().len(), 10);
        assert_eq!(blur_index(&m5, 5).unwrap().members().len(), 1);
        assert!(blur_index(&m5, 6).is_err());
        let m25 = build_maddux(25).unwrap();
        assert_eq!(blur_index(&m25, 5).unwrap().members().len(), 53130);
    }

    #[test]
    fn basic_matrices_e1_n2() {
        let m = build_maddux(1).unwrap();
        let ms = enumerate_basic_matrices(&m, 2, None).unwrap();
        assert_eq!(ms.len(), 2);
    }

    #[test]
    fn basic_matrices_trivial_structure() {
        let trivial = RaAtomStructure::build(vec!["Id".into()], "Id", &[], &[]).unwrap();
        for n in 2..=4 {
            let ms = enumerate_basic_matrices(&trivial, n, None).unwrap();
            assert_eq!(ms.len(), 1);
            assert!(ms[0].entries().iter().all(|&e| e == trivial.identity()));
        }
    }

    #[test]
    fn basic_matrices_match_bruteforce_filter() {
        // independent oracle: filter every raw upper-triangle assignment
        let m = build_maddux(3).unwrap();
        let n = 3;
        let count = m.atom_count();
        let mut oracle = Vec::new();
        for e01 in 0..count {
            for e02 in 0..count {
                for e12 in 0..count {
                    let mut entries = vec![m.identity(); n * n];
                    let mut put = |i: usize, j: usize, a: usize| {
                        entries[i * n + j] = a;
                        entries[j * n + i] = m.converse(a);
                    };
                    put(0, 1, e01);
                    put(0, 2, e02);
                    put(1, 2, e12);
                    let mat = BasicMatrix::from_entries(n, entries).unwrap();
                    if mat.is_basic(&m) {
                        oracle.push(mat);
                    }
                }
            }
        }
        oracle.sort();
        let got = enumerate_basic_matrices(&m, 3, None).unwrap();
        assert_eq!(got, oracle);
    }

    #[test]
    fn enumeration_cap_guard() {
        let m = build_maddux(6).unwrap();
        assert!(matches!(
            enumerate_basic_matrices(&m, 3, Some(10)),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn ca_from_matrices_passes_and_diagonal_filter() {
        let m = build_maddux(3).unwrap();
        let ca = ca_from_basic_matrices(&m, 3, None).unwrap();
        assert!(ca.check_ca_atomstructure().pass());
        let matrices = enumerate_basic_matrices(&m, 3, None).unwrap();
        let expected: AtomSet = matrices
            .iter()
            .enumerate()
            .filter(|(_, mat)| mat.get(0, 1) == m.identity())
            .map(|(i, _)| i)
            .collect();
        assert_eq!(ca.diagonal(0, 1).unwrap(), expected);
        assert_eq!(ca.diagonal(0, 1).unwrap(), ca.diagonal(1, 0).unwrap());
    }

    #[test]
    fn all_id_matrix_neighbours() {
        let m = build_maddux(2).unwrap();
        let matrices = enumerate_basic_matrices(&m, 3, None).unwrap();
        let ca = ca_from_basic_matrices(&m, 3, None).unwrap();
        let all_id = matrices
            .iter()
            .position(|mat| mat.entries().iter().all(|&e| e == m.identity()))
            .unwrap();
        for (q, mq) in matrices.iter().enumerate() {
            let related = ca.related(0, all_id, q);
            let differs_only_at_0 = (0..3).all(|j| {
                (0..3).all(|k| j == 0 || k == 0 || mq.get(j, k) == matrices[all_id].get(j, k))
            });
            assert_eq!(related, differs_only_at_0);
        }
    }

    #[test]
    fn j4_vacuous_on_empty_family() {
        let m = build_maddux(3).unwrap();
        let empty = BlurSpec::new(&m, 1, vec![], IndexPredicate::EvenlyDistributed).unwrap();
        for mode in [EvalMode::Exhaustive, EvalMode::Naive] {
            assert!(check_j4(&m, &empty, 3, mode).unwrap().holds);
            assert!(check_j5(&m, &empty, 3, mode).unwrap().holds);
        }
    }

    #[test]
    fn j4_singleton_blurs_hold_on_e3() {
        // one forbidden atom per index slot still leaves a third atom free
        let m = build_maddux(3).unwrap();
        let b = blur_index(&m, 1).unwrap();
        let pruned = check_j4(&m, &b, 3, EvalMode::Exhaustive).unwrap();
        let naive = check_j4(&m, &b, 3, EvalMode::Naive).unwrap();
        assert!(pruned.holds);
        assert_eq!(pruned, naive);
    }

    #[test]
    fn j4_pair_blurs_fail_on_e3() {
        // two 2-blurs can jointly exclude all three atoms, so no witness
        // blur remains
        let m = build_maddux(3).unwrap();
        let b = blur_index(&m, 2).unwrap();
        let pruned = check_j4(&m, &b, 3, EvalMode::Exhaustive).unwrap();
        let naive = check_j4(&m, &b, 3, EvalMode::Naive).unwrap();
        assert!(!pruned.holds);
        assert_eq!(pruned, naive);
        assert!(pruned.witness.is_some());
    }

    #[test]
    fn j5_singleton_direct_violation() {
        let m = build_maddux(3).unwrap();
        let a0 = m.atom_index("a0").unwrap();
        // a0 not below a0;a0 in E_3(2,3): the triple is monochromatic
        assert!(!m.consistent(a0, a0, a0));
        let b = blur_index(&m, 1).unwrap();
        let res = check_j5(&m, &b, 3, EvalMode::Exhaustive).unwrap();
        assert!(!res.holds);
        match res.witness.unwrap() {
            BlurWitness::J5(w) => {
                assert_eq!(w.p, vec![a0, a0]);
                assert_eq!(w.q, vec![a0, a0]);
                assert_eq!(w.w, vec![a0]);
            }
            _ => panic!("expected J5 witness"),
        }
    }

    #[test]
    fn pruned_matches_naive_small_grid() {
        for k in 3..=5usize {
            let m = build_maddux(k).unwrap();
            for l in 1..=2usize.min(k) {
                let b = blur_index(&m, l).unwrap();
                let p4 = check_j4(&m, &b, 3, EvalMode::Exhaustive).unwrap();
                let n4 = check_j4(&m, &b, 3, EvalMode::Naive).unwrap();
                assert_eq!(p4, n4, "J4 k={k} l={l}");
                let p5 = check_j5(&m, &b, 3, EvalMode::Exhaustive).unwrap();
                let n5 = check_j5(&m, &b, 3, EvalMode::Naive).unwrap();
                assert_eq!(p5, n5, "J5 k={k} l={l}");
            }
        }
    }

    #[test]
    fn j5_monotone_in_blur_size() {
        for k in 4..=6usize {
            let m = build_maddux(k).unwrap();
            for l in 1..k {
                let small = blur_index(&m, l).unwrap();
                let large = blur_index(&m, l + 1).unwrap();
                let rs = check_j5(&m, &small, 3, EvalMode::Exhaustive).unwrap();
                let rl = check_j5(&m, &large, 3, EvalMode::Exhaustive).unwrap();
                if rs.holds {
                    assert!(rl.holds, "J5 monotonicity broken at k={k} l={l}");
                }
            }
        }
    }

    #[test]
    fn is_n_blur_composition() {
        let m = build_maddux(3).unwrap();
        let b = blur_index(&m, 2).unwrap();
        let rep = is_n_blur(&m, &b, 3, EvalMode::Exhaustive).unwrap();
        assert!(!rep.pass());
        assert_eq!(rep.j4, check_j4(&m, &b, 3, EvalMode::Exhaustive).unwrap());
        assert_eq!(rep.e_name, "evenly-distributed");
        assert!(rep.e_symmetric_checked);
    }

    #[test]
    fn blow_up_cardinalities_and_partitions() {
        let m = build_maddux(3).unwrap();
        let b = BlurSpec::new(
            &m,
            1,
            vec![vec![1], vec![2], vec![3]],
            IndexPredicate::EvenlyDistributed,
        )
        .unwrap();
        let carrier = blow_up(&m, &b, 4).unwrap();
        assert_eq!(carrier.atoms.len(), 4 * 3 * 3);
        assert_eq!(carrier.fibers.len(), 3);
        assert_eq!(carrier.colours.len(), 3);
        // both partitions cover the carrier exactly once
        for cells in [&carrier.fibers, &carrier.colours] {
            let mut seen = vec![false; carrier.atoms.len()];
            for (_, cell) in cells.iter() {
                for &i in cell {
                    assert!(!seen[i], "overlap in partition");
                    seen[i] = true;
                }
            }
            assert!(seen.iter().all(|&s| s));
        }
    }

    #[test]
    fn lifted_consistency_follows_fibers() {
        for k in 2..=4usize {
            let m = build_maddux(k).unwrap();
            let b = blur_index(&m, 1).unwrap();
            let carrier = blow_up(&m, &b, 2).unwrap();
            for &x in carrier.atoms.iter().take(12) {
                for &y in carrier.atoms.iter().take(12) {
                    for &z in carrier.atoms.iter().take(12) {
                        assert_eq!(
                            carrier.consistent(&m, x, y, z),
                            m.consistent(x.base, y.base, z.base)
                        );
                    }
                }
            }
        }
    }
}
