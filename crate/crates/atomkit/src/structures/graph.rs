//! Undirected graphs with exact chromatic-number certificates.
//!
//! The search is exhaustive backtracking with a greedy clique lower
//! bound; every returned number comes with a proper colouring witness
//! and a completed refutation search at one colour less.

use std::collections::BTreeSet;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Default vertex cap for the exact search.
pub const DEFAULT_VERTEX_CAP: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    vertices: usize,
    /// Normalized i < j, no loops.
    edges: BTreeSet<(usize, usize)>,
}

impl Graph {
    pub fn new(vertices: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut normalized = BTreeSet::new();
        for (a, b) in edges {
            if a == b {
                return Err(Error::Parameter(format!("loop at vertex {a} not allowed")));
            }
            if a >= vertices || b >= vertices {
                return Err(Error::Parameter(format!(
                    "edge ({a},{b}) references a vertex >= {vertices}"
                )));
            }
            normalized.insert((a.min(b), a.max(b)));
        }
        Ok(Graph { vertices, edges: normalized })
    }

    pub fn complete(n: usize) -> Graph {
        let edges = (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j)));
        Graph::new(n, edges).unwrap()
    }

    pub fn cycle(n: usize) -> Result<Graph> {
        if n < 3 {
            return Err(Error::Parameter("a cycle needs at least 3 vertices".into()));
        }
        Graph::new(n, (0..n).map(|i| (i, (i + 1) % n)))
    }

    pub fn edgeless(n: usize) -> Graph {
        Graph::new(n, []).unwrap()
    }

    pub fn petersen() -> Graph {
        let mut edges = Vec::new();
        for i in 0..5 {
            edges.push((i, (i + 1) % 5)); // outer cycle
            edges.push((i, i + 5)); // spokes
            edges.push((i + 5, (i + 2) % 5 + 5)); // inner pentagram
        }
        Graph::new(10, edges).unwrap()
    }

    /// Erdos-Renyi style seeded random graph.
    pub fn random(n: usize, edge_prob: f64, seed: u64) -> Result<Graph> {
        if !(0.0..=1.0).contains(&edge_prob) {
            return Err(Error::Parameter("edge probability must be in [0,1]".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut edges = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                if rng.gen_bool(edge_prob) {
                    edges.push((i, j));
                }
            }
        }
        Graph::new(n, edges)
    }

    pub fn vertices(&self) -> usize {
        self.vertices
    }

    pub fn edges(&self) -> &BTreeSet<(usize, usize)> {
        &self.edges
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges.contains(&(a.min(b), a.max(b)))
    }

    pub fn max_degree(&self) -> usize {
        let mut deg = vec![0usize; self.vertices];
        for &(a, b) in &self.edges {
            deg[a] += 1;
            deg[b] += 1;
        }
        deg.into_iter().max().unwrap_or(0)
    }

    fn adjacency(&self) -> Vec<Vec<bool>> {
        let mut adj = vec![vec![false; self.vertices]; self.vertices];
        for &(a, b) in &self.edges {
            adj[a][b] = true;
            adj[b][a] = true;
        }
        adj
    }

    /// Greedy clique, used as a lower bound for the colour search.
    fn clique_lower_bound(&self) -> usize {
        let adj = self.adjacency();
        let mut best = usize::from(self.vertices > 0);
        for start in 0..self.vertices {
            let mut clique = vec![start];
            for v in 0..self.vertices {
                if clique.iter().all(|&c| adj[c][v]) {
                    clique.push(v);
                }
            }
            best = best.max(clique.len());
        }
        best
    }
}

/// An exact chromatic certificate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChromaticCertificate {
    pub chi: usize,
    /// One colour per vertex, a verified proper colouring with `chi` colours.
    pub coloring: Vec<usize>,
    /// True when chi > the trivial lower bound and the (chi-1)-colour
    /// search completed without finding a colouring.
    pub infeasibility_exhausted: bool,
}

fn colorable(adj: &[Vec<bool>], colors: usize, assignment: &mut Vec<usize>, next: usize) -> bool {
    let n = adj.len();
    if next == n {
        return true;
    }
    let used = assignment[..next].iter().copied().max().map_or(0, |m| m + 1);
    // symmetry break: a fresh vertex may open at most one new colour
    for c in 0..colors.min(used + 1) {
        if (0..next).all(|v| !(adj[v][next] && assignment[v] == c)) {
            assignment[next] = c;
            if colorable(adj, colors, assignment, next + 1) {
                return true;
            }
        }
    }
    false
}

/// Minimal proper-colouring size with witness and exhaustive
/// infeasibility evidence one colour below.
pub fn chromatic_number(g: &Graph, cap: Option<usize>) -> Result<ChromaticCertificate> {
    let cap = cap.unwrap_or(DEFAULT_VERTEX_CAP);
    if g.vertices() > cap {
        return Err(Error::CapExceeded { size: g.vertices() as u128, cap: cap as u128 });
    }
    if g.vertices() == 0 {
        return Ok(ChromaticCertificate { chi: 0, coloring: vec![], infeasibility_exhausted: true });
    }
    let adj = g.adjacency();
    let mut colors = g.clique_lower_bound();
    loop {
        let mut assignment = vec![0usize; g.vertices()];
        if colorable(&adj, colors, &mut assignment, 0) {
            debug_assert!(g
                .edges()
                .iter()
                .all(|&(a, b)| assignment[a] != assignment[b]));
            // certify chi-1 infeasibility by a completed search even when
            // the clique bound already implies it
            let infeasibility_exhausted = colors == 1 || {
                let mut refute = vec![0usize; g.vertices()];
                !colorable(&adj, colors - 1, &mut refute, 0)
            };
            debug_assert!(infeasibility_exhausted);
            return Ok(ChromaticCertificate { chi: colors, coloring: assignment, infeasibility_exhausted });
        }
        colors += 1;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphKind {
    Complete,
    OddCycle,
    Random,
}

/// Deterministic graph sequences: cliques, odd cycles, or seeded random
/// graphs as the probabilistic surrogate.
pub fn graph_sequence(
    kind: GraphKind,
    sizes: &[usize],
    edge_prob: f64,
    seed: u64,
    cap: Option<usize>,
) -> Result<Vec<Graph>> {
    let cap = cap.unwrap_or(DEFAULT_VERTEX_CAP);
    if let Some(&n) = sizes.iter().find(|&&n| n > cap) {
        return Err(Error::CapExceeded { size: n as u128, cap: cap as u128 });
    }
    let mut out = Vec::with_capacity(sizes.len());
    for (offset, &n) in sizes.iter().enumerate() {
        let g = match kind {
            GraphKind::Complete => Graph::complete(n),
            GraphKind::OddCycle => {
                if n % 2 == 0 {
                    return Err(Error::Parameter(format!("odd cycle of even size {n}")));
                }
                Graph::cycle(n)?
            }
            GraphKind::Random => Graph::random(n, edge_prob, seed.wrapping_add(offset as u64))?,
        };
        out.push(g);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GraphClass {
    /// Chromatic number at or above the threshold (the representable side).
    Good,
    /// Finitely colourable below the threshold.
    Bad,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classification {
    pub class: GraphClass,
    pub certificate: ChromaticCertificate,
    pub threshold: usize,
}

/// Bad iff the exact chromatic number is below the threshold.
pub fn classify_graph(g: &Graph, threshold: usize, cap: Option<usize>) -> Result<Classification> {
    let certificate = chromatic_number(g, cap)?;
    let class = if certificate.chi < threshold { GraphClass::Bad } else { GraphClass::Good };
    Ok(Classification { class, certificate, threshold })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chi(g: &Graph) -> usize {
        chromatic_number(g, None).unwrap().chi
    }

    #[test]
    fn clique_needs_all_colors() {
        assert_eq!(chi(&Graph::complete(4)), 4);
        assert_eq!(chi(&Graph::complete(6)), 6);
    }

    #[test]
    fn odd_cycles_need_three() {
        // oracle: exhaust all 2-colourings by hand for C_5
        let c5 = Graph::cycle(5).unwrap();
        let mut two_colorable = false;
        for mask in 0..(1u32 << 5) {
            let col: Vec<usize> = (0..5).map(|i| ((mask >> i) & 1) as usize).collect();
            if c5.edges().iter().all(|&(a, b)| col[a] != col[b]) {
                two_colorable = true;
            }
        }
        assert!(!two_colorable);
        let cert = chromatic_number(&c5, None).unwrap();
        assert_eq!(cert.chi, 3);
        assert!(cert.infeasibility_exhausted);
        assert_eq!(chi(&Graph::cycle(7).unwrap()), 3);
    }

    #[test]
    fn edgeless_and_empty() {
        assert_eq!(chi(&Graph::edgeless(5)), 1);
        assert_eq!(chi(&Graph::edgeless(0)), 0);
    }

    #[test]
    fn petersen_is_three_chromatic() {
        let p = Graph::petersen();
        assert_eq!(p.edges().len(), 15);
        let cert = chromatic_number(&p, None).unwrap();
        assert_eq!(cert.chi, 3);
        assert!(cert.infeasibility_exhausted);
        for &(a, b) in p.edges() {
            assert_ne!(cert.coloring[a], cert.coloring[b]);
        }
    }

    #[test]
    fn witness_is_proper_and_bounded_by_degree() {
        for seed in 0..20 {
            let g = Graph::random(9, 0.4, seed).unwrap();
            let cert = chromatic_number(&g, None).unwrap();
            for &(a, b) in g.edges() {
                assert_ne!(cert.coloring[a], cert.coloring[b]);
            }
            assert!(cert.coloring.iter().all(|&c| c < cert.chi));
            assert!(cert.chi <= g.max_degree() + 1 || g.vertices() == 0);
        }
    }

    #[test]
    fn cap_refusal() {
        let g = Graph::edgeless(20);
        assert!(matches!(chromatic_number(&g, None), Err(Error::CapExceeded { .. })));
        assert!(chromatic_number(&g, Some(25)).is_ok());
    }

    #[test]
    fn sequences() {
        let cliques = graph_sequence(GraphKind::Complete, &[2, 3, 4, 5], 0.0, 0, None).unwrap();
        let chis: Vec<usize> = cliques.iter().map(chi).collect();
        assert_eq!(chis, vec![2, 3, 4, 5]);

        let cycles = graph_sequence(GraphKind::OddCycle, &[3, 5, 7], 0.0, 0, None).unwrap();
        assert!(cycles.iter().all(|g| chi(g) == 3));
        assert!(graph_sequence(GraphKind::OddCycle, &[4], 0.0, 0, None).is_err());

        let r1 = graph_sequence(GraphKind::Random, &[8, 8], 0.5, 99, None).unwrap();
        let r2 = graph_sequence(GraphKind::Random, &[8, 8], 0.5, 99, None).unwrap();
        assert_eq!(r1, r2, "seeded determinism");
        assert_ne!(r1[0], r1[1], "distinct per-position streams");
    }

    #[test]
    fn classification_examples_and_monotonicity() {
        let k6 = Graph::complete(6);
        assert_eq!(classify_graph(&k6, 4, None).unwrap().class, GraphClass::Good);
        let c4 = Graph::cycle(4).unwrap();
        let cls = classify_graph(&c4, 3, None).unwrap();
        assert_eq!(cls.class, GraphClass::Bad);
        assert_eq!(cls.certificate.chi, 2);
        // threshold 1: every nonempty graph is good
        assert_eq!(classify_graph(&c4, 1, None).unwrap().class, GraphClass::Good);
        // raising the threshold never turns bad into good
        for t in 1..6 {
            let lo = classify_graph(&c4, t, None).unwrap().class;
            let hi = classify_graph(&c4, t + 1, None).unwrap().class;
            if lo == GraphClass::Bad {
                assert_eq!(hi, GraphClass::Bad);
            }
        }
    }
}
