//! The shared versioned text format, plus CSV and DOT converters.
//!
//! Every native file starts with the header line `atomkit 1` followed by
//! `kind <name>` and kind-specific lines, and closes with `end`. Tokens
//! are whitespace-separated, so names must not contain whitespace.
//! Loaders reject unknown versions and malformed lines with positioned
//! messages; field ordering on output is fixed, making writes
//! byte-deterministic.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use num_traits::Zero;

use crate::basisblur::{BlownCarrier, BlurSpec, BlurWitness, J4Witness, J5Witness};
use crate::cylalg::CaAtomStructure;
use crate::error::{Error, Result};
use crate::fincof::{BlockShape, BlockValue, FcCarrier, FinCofSet};
use crate::games::{
    EfMove, GameOutcome, NetMove, NetOutcome, NetPvStep, NetResponse, PvStep, Side, Winner,
};
use crate::relalg::RaAtomStructure;
use crate::structures::graph::Graph;
use crate::structures::partition::PartitionStructure;
use crate::{Rational, RationalVecAtom};

pub const FORMAT_VERSION: u32 = 1;

/// A blur-condition violation with enough context to rebuild the
/// instance it refutes (index blur of width l over the k-atom Maddux
/// structure, condition arity n).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessRecord {
    pub check: String,
    pub n: usize,
    pub maddux_k: usize,
    pub l: usize,
    pub witness: BlurWitness,
}

/// Any object the native format can carry.
#[derive(Debug, Clone)]
pub enum Document {
    Ra(RaAtomStructure),
    Ca(CaAtomStructure),
    FinCof(FinCofSet),
    Graph(Graph),
    Partition(PartitionStructure),
    VecAtom(RationalVecAtom),
    EfOutcome(GameOutcome),
    NetOutcome(NetOutcome),
    Witness(WitnessRecord),
}

impl Document {
    pub fn kind(&self) -> &'static str {
        match self {
            Document::Ra(_) => "ra",
            Document::Ca(_) => "ca",
            Document::FinCof(_) => "fincof",
            Document::Graph(_) => "graph",
            Document::Partition(_) => "partition",
            Document::VecAtom(_) => "vecatom",
            Document::EfOutcome(_) | Document::NetOutcome(_) => "outcome",
            Document::Witness(_) => "witness",
        }
    }
}

// ---------------------------------------------------------------- writers

fn header(kind: &str) -> String {
    format!("atomkit {FORMAT_VERSION}\nkind {kind}\n")
}

pub fn write_ra(s: &RaAtomStructure) -> String {
    let mut out = header("ra");
    out.push_str(&format!("atoms {}\n", s.atom_names().join(" ")));
    out.push_str(&format!("identity {}\n", s.atom_name(s.identity())));
    for a in 0..s.atom_count() {
        out.push_str(&format!("converse {} {}\n", s.atom_name(a), s.atom_name(s.converse(a))));
    }
    for (a, b, c) in s.diversity_triples() {
        out.push_str(&format!(
            "triple {} {} {}\n",
            s.atom_name(a),
            s.atom_name(b),
            s.atom_name(c)
        ));
    }
    out.push_str("end\n");
    out
}

pub fn write_ca(s: &CaAtomStructure) -> String {
    let mut out = header("ca");
    out.push_str(&format!("dim {}\n", s.dim()));
    out.push_str(&format!("atoms {}\n", s.atom_names().join(" ")));
    for i in 0..s.dim() {
        for &(a, b) in s.relation(i).expect("index in range") {
            out.push_str(&format!("rel {i} {} {}\n", s.atom_name(a), s.atom_name(b)));
        }
    }
    for i in 0..s.dim() {
        for j in 0..s.dim() {
            let names: Vec<&str> = s
                .diagonal(i, j)
                .expect("index in range")
                .iter()
                .map(|&a| s.atom_name(a))
                .collect();
            out.push_str(&format!("diag {i} {j} {}\n", names.join(" ")).replace(" \n", "\n"));
        }
    }
    out.push_str("end\n");
    out
}

pub fn write_fincof(s: &FinCofSet) -> String {
    let mut out = header("fincof");
    for (name, shape) in &s.carrier().blocks {
        match shape {
            BlockShape::Finite { size } => out.push_str(&format!("block {name} finite {size}\n")),
            BlockShape::Infinite => out.push_str(&format!("block {name} infinite\n")),
        }
    }
    for ((name, _), value) in s.carrier().blocks.iter().zip(s.values()) {
        let (tag, indices) = match value {
            BlockValue::Members(m) => ("members", m),
            BlockValue::Cofinite(m) => ("cofinite", m),
        };
        let list: Vec<String> = indices.iter().map(|i| i.to_string()).collect();
        out.push_str(&format!("value {name} {tag} {}\n", list.join(" ")).replace(" \n", "\n"));
    }
    out.push_str("end\n");
    out
}

pub fn write_graph(g: &Graph) -> String {
    let mut out = header("graph");
    out.push_str(&format!("vertices {}\n", g.vertices()));
    for &(a, b) in g.edges() {
        out.push_str(&format!("edge {a} {b}\n"));
    }
    out.push_str("end\n");
    out
}

pub fn write_partition(p: &PartitionStructure) -> String {
    let mut out = header("partition");
    for (u, name) in p.units().iter().enumerate() {
        let tag = if p.is_large(u) { "large" } else { "small" };
        out.push_str(&format!("unit {name} {} {tag}\n", p.size(u)));
    }
    out.push_str("end\n");
    out
}

pub fn write_vecatom(v: &RationalVecAtom) -> String {
    let mut out = header("vecatom");
    out.push_str(&format!("dim {}\n", v.dim()));
    for (i, value) in v.support() {
        out.push_str(&format!("entry {i} {value}\n"));
    }
    out.push_str("end\n");
    out
}

fn write_side(side: Side) -> &'static str {
    match side {
        Side::A => "A",
        Side::B => "B",
    }
}

pub fn write_ef_outcome(o: &GameOutcome) -> String {
    let mut out = header("outcome");
    out.push_str("game ef\n");
    out.push_str(&format!("winner {}\n", o.winner));
    out.push_str(&format!("rounds {}\n", o.rounds));
    for step in &o.principal_variation {
        let resp = match step.response {
            Some(r) => r.to_string(),
            None => "-".to_string(),
        };
        out.push_str(&format!(
            "step {} {} {resp}\n",
            write_side(step.challenge.side),
            step.challenge.atom
        ));
    }
    out.push_str("end\n");
    out
}

fn fmt_tuple(t: &[usize]) -> String {
    t.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

pub fn write_net_outcome(o: &NetOutcome) -> String {
    let mut out = header("outcome");
    out.push_str("game net\n");
    out.push_str(&format!("winner {}\n", o.winner));
    out.push_str(&format!("rounds {}\n", o.rounds));
    out.push_str(&format!("pebbles {}\n", o.pebbles));
    if let Some(flag) = &o.flag {
        out.push_str(&format!("flag {flag}\n"));
    }
    for step in &o.principal_variation {
        match &step.challenge {
            NetMove::Initial { atom } => out.push_str(&format!("challenge initial {atom}\n")),
            NetMove::Cylindrifier { tuple, index, atom, victim } => {
                let v = victim.map_or("-".to_string(), |v| v.to_string());
                out.push_str(&format!(
                    "challenge cyl {index} {atom} {v} {}\n",
                    fmt_tuple(tuple)
                ));
            }
        }
        match &step.response {
            None => out.push_str("response none\n"),
            Some(r) => {
                let node = r.node.map_or("-".to_string(), |z| z.to_string());
                let labels: Vec<String> = r
                    .labels
                    .iter()
                    .map(|(t, a)| {
                        let coords: Vec<String> = t.iter().map(|x| x.to_string()).collect();
                        format!("{}:{a}", coords.join("."))
                    })
                    .collect();
                out.push_str(
                    &format!("response {node} {}\n", labels.join(" ")).replace(" \n", "\n"),
                );
            }
        }
    }
    out.push_str("end\n");
    out
}

pub fn write_witness(w: &WitnessRecord) -> String {
    let mut out = header("witness");
    out.push_str(&format!("check {}\n", w.check));
    out.push_str(&format!("n {}\n", w.n));
    out.push_str(&format!("maddux {}\n", w.maddux_k));
    out.push_str(&format!("l {}\n", w.l));
    let join_sets = |sets: &[Vec<usize>]| {
        sets.iter()
            .map(|s| s.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))
            .collect::<Vec<_>>()
            .join(" ")
    };
    match &w.witness {
        BlurWitness::J4(j4) => {
            out.push_str(&format!("v {}\n", join_sets(&j4.v)));
            out.push_str(&format!("w {}\n", join_sets(&j4.w)));
        }
        BlurWitness::J5(j5) => {
            out.push_str(&format!("p {}\n", fmt_tuple(&j5.p)));
            out.push_str(&format!("q {}\n", fmt_tuple(&j5.q)));
            out.push_str(&format!("w {}\n", fmt_tuple(&j5.w)));
        }
    }
    out.push_str("end\n");
    out
}

pub fn write_document(doc: &Document) -> String {
    match doc {
        Document::Ra(s) => write_ra(s),
        Document::Ca(s) => write_ca(s),
        Document::FinCof(s) => write_fincof(s),
        Document::Graph(g) => write_graph(g),
        Document::Partition(p) => write_partition(p),
        Document::VecAtom(v) => write_vecatom(v),
        Document::EfOutcome(o) => write_ef_outcome(o),
        Document::NetOutcome(o) => write_net_outcome(o),
        Document::Witness(w) => write_witness(w),
    }
}

// ---------------------------------------------------------------- parser

struct Fields<'a> {
    /// (1-based line number, key, value tokens)
    lines: Vec<(usize, &'a str, Vec<&'a str>)>,
}

impl<'a> Fields<'a> {
    fn parse(text: &'a str) -> Result<Fields<'a>> {
        let mut lines = Vec::new();
        let mut header_seen = false;
        let mut ended = false;
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            let lineno = idx + 1;
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut tokens = line.split_whitespace();
            let key = tokens.next().expect("nonempty line");
            let rest: Vec<&str> = tokens.collect();
            if !header_seen {
                if key != "atomkit" || rest.len() != 1 {
                    return Err(Error::format_at(lineno, "expected header line `atomkit 1`"));
                }
                let version: u32 = rest[0]
                    .parse()
                    .map_err(|_| Error::format_at(lineno, "malformed version number"))?;
                if version != FORMAT_VERSION {
                    return Err(Error::format_at(
                        lineno,
                        format!(
                            "unsupported format version {version}; this build reads version {FORMAT_VERSION}"
                        ),
                    ));
                }
                header_seen = true;
                continue;
            }
            if ended {
                return Err(Error::format_at(lineno, "content after `end`"));
            }
            if key == "end" {
                ended = true;
                continue;
            }
            lines.push((lineno, key, rest));
        }
        if !header_seen {
            return Err(Error::format("missing header line `atomkit 1`"));
        }
        if !ended {
            return Err(Error::format("missing closing `end` line"));
        }
        Ok(Fields { lines })
    }

    fn single(&self, key: &str) -> Result<(usize, &[&'a str])> {
        let mut found = None;
        for (no, k, rest) in &self.lines {
            if *k == key {
                if found.is_some() {
                    return Err(Error::format_at(*no, format!("duplicate `{key}` line")));
                }
                found = Some((*no, rest.as_slice()));
            }
        }
        found.ok_or_else(|| Error::format(format!("missing `{key}` line")))
    }

    fn optional(&self, key: &str) -> Option<(usize, &[&'a str])> {
        self.lines.iter().find(|(_, k, _)| *k == key).map(|(no, _, r)| (*no, r.as_slice()))
    }

    fn all<'s>(&'s self, key: &'s str) -> impl Iterator<Item = (usize, &'s [&'a str])> + 's {
        self.lines
            .iter()
            .filter(move |(_, k, _)| *k == key)
            .map(|(no, _, r)| (*no, r.as_slice()))
    }
}

fn num<T: std::str::FromStr>(no: usize, token: &str, what: &str) -> Result<T> {
    token
        .parse()
        .map_err(|_| Error::format_at(no, format!("malformed {what} `{token}`")))
}

fn parse_ra(f: &Fields) -> Result<RaAtomStructure> {
    let (_, atom_tokens) = f.single("atoms")?;
    let atoms: Vec<String> = atom_tokens.iter().map(|s| s.to_string()).collect();
    let (no, id) = f.single("identity")?;
    if id.len() != 1 {
        return Err(Error::format_at(no, "identity line expects one atom name"));
    }
    let mut converse = Vec::new();
    for (no, rest) in f.all("converse") {
        if rest.len() != 2 {
            return Err(Error::format_at(no, "converse line expects two atom names"));
        }
        converse.push((rest[0].to_string(), rest[1].to_string()));
    }
    let mut triples = Vec::new();
    for (no, rest) in f.all("triple") {
        if rest.len() != 3 {
            return Err(Error::format_at(no, "triple line expects three atom names"));
        }
        triples.push((rest[0].to_string(), rest[1].to_string(), rest[2].to_string()));
    }
    RaAtomStructure::load_strict(atoms, id[0], &converse, &triples)
}

fn parse_ca(f: &Fields) -> Result<CaAtomStructure> {
    let (no, dim_tok) = f.single("dim")?;
    if dim_tok.len() != 1 {
        return Err(Error::format_at(no, "dim line expects one number"));
    }
    let dim: usize = num(no, dim_tok[0], "dimension")?;
    let (_, atom_tokens) = f.single("atoms")?;
    let atoms: Vec<String> = atom_tokens.iter().map(|s| s.to_string()).collect();
    let index = |no: usize, name: &str| -> Result<usize> {
        atoms
            .iter()
            .position(|a| a == name)
            .ok_or_else(|| Error::format_at(no, format!("unknown atom `{name}`")))
    };
    let mut t = vec![BTreeSet::new(); dim];
    for (no, rest) in f.all("rel") {
        if rest.len() != 3 {
            return Err(Error::format_at(no, "rel line expects index and two atom names"));
        }
        let i: usize = num(no, rest[0], "relation index")?;
        if i >= dim {
            return Err(Error::format_at(no, format!("relation index {i} out of dimension {dim}")));
        }
        t[i].insert((index(no, rest[1])?, index(no, rest[2])?));
    }
    let mut d = BTreeMap::new();
    for (no, rest) in f.all("diag") {
        if rest.len() < 2 {
            return Err(Error::format_at(no, "diag line expects two indices"));
        }
        let i: usize = num(no, rest[0], "diagonal index")?;
        let j: usize = num(no, rest[1], "diagonal index")?;
        let mut set = BTreeSet::new();
        for name in &rest[2..] {
            set.insert(index(no, name)?);
        }
        d.insert((i, j), set);
    }
    CaAtomStructure::new(dim, atoms, t, d)
}

fn parse_fincof(f: &Fields) -> Result<FinCofSet> {
    let mut blocks = Vec::new();
    for (no, rest) in f.all("block") {
        match rest {
            [name, "finite", size] => blocks
                .push((name.to_string(), BlockShape::Finite { size: num(no, size, "size")? })),
            [name, "infinite"] => blocks.push((name.to_string(), BlockShape::Infinite)),
            _ => {
                return Err(Error::format_at(
                    no,
                    "block line expects `<name> finite <size>` or `<name> infinite`",
                ))
            }
        }
    }
    let carrier = FcCarrier::new(blocks)?;
    let mut values: BTreeMap<String, BlockValue> = BTreeMap::new();
    for (no, rest) in f.all("value") {
        if rest.len() < 2 {
            return Err(Error::format_at(no, "value line expects a block name and a tag"));
        }
        let indices: BTreeSet<usize> = rest[2..]
            .iter()
            .map(|tok| num(no, tok, "index"))
            .collect::<Result<_>>()?;
        let value = match rest[1] {
            "members" => BlockValue::Members(indices),
            "cofinite" => BlockValue::Cofinite(indices),
            other => {
                return Err(Error::format_at(no, format!("unknown value tag `{other}`")))
            }
        };
        if values.insert(rest[0].to_string(), value).is_some() {
            return Err(Error::format_at(no, format!("duplicate value for block `{}`", rest[0])));
        }
    }
    let ordered: Vec<BlockValue> = carrier
        .blocks
        .iter()
        .map(|(name, _)| {
            values
                .remove(name)
                .ok_or_else(|| Error::format(format!("missing value for block `{name}`")))
        })
        .collect::<Result<_>>()?;
    if let Some(name) = values.keys().next() {
        return Err(Error::format(format!("value for unknown block `{name}`")));
    }
    FinCofSet::new(carrier, ordered)
}

fn parse_graph(f: &Fields) -> Result<Graph> {
    let (no, v) = f.single("vertices")?;
    if v.len() != 1 {
        return Err(Error::format_at(no, "vertices line expects one number"));
    }
    let vertices: usize = num(no, v[0], "vertex count")?;
    let mut edges = Vec::new();
    for (no, rest) in f.all("edge") {
        if rest.len() != 2 {
            return Err(Error::format_at(no, "edge line expects two vertex numbers"));
        }
        edges.push((num(no, rest[0], "vertex")?, num(no, rest[1], "vertex")?));
    }
    Graph::new(vertices, edges)
}

fn parse_partition(f: &Fields) -> Result<PartitionStructure> {
    let mut units = Vec::new();
    let mut sizes = Vec::new();
    let mut large = BTreeSet::new();
    for (no, rest) in f.all("unit") {
        match rest {
            [name, size, tag @ ("large" | "small")] => {
                if *tag == "large" {
                    large.insert(units.len());
                }
                units.push(name.to_string());
                sizes.push(num(no, size, "unit size")?);
            }
            _ => {
                return Err(Error::format_at(
                    no,
                    "unit line expects `<name> <size> large|small`",
                ))
            }
        }
    }
    PartitionStructure::new(units, sizes, large)
}

fn parse_vecatom(f: &Fields) -> Result<RationalVecAtom> {
    let (no, dim_tok) = f.single("dim")?;
    if dim_tok.len() != 1 {
        return Err(Error::format_at(no, "dim line expects one number"));
    }
    let dim: usize = num(no, dim_tok[0], "dimension")?;
    let mut entries: BTreeMap<usize, Rational> = BTreeMap::new();
    for (no, rest) in f.all("entry") {
        if rest.len() != 2 {
            return Err(Error::format_at(no, "entry line expects an index and a rational"));
        }
        let i: usize = num(no, rest[0], "index")?;
        let value: Rational = rest[1]
            .parse()
            .map_err(|_| Error::format_at(no, format!("malformed rational `{}`", rest[1])))?;
        if value.is_zero() {
            continue;
        }
        if entries.insert(i, value).is_some() {
            return Err(Error::format_at(no, format!("duplicate entry for index {i}")));
        }
    }
    RationalVecAtom::new(dim, entries)
}

fn parse_winner(no: usize, token: &str) -> Result<Winner> {
    match token {
        "Exists" => Ok(Winner::Exists),
        "ForAll" => Ok(Winner::ForAll),
        other => Err(Error::format_at(no, format!("unknown winner `{other}`"))),
    }
}

fn parse_ef_outcome(f: &Fields) -> Result<GameOutcome> {
    let (no, w) = f.single("winner")?;
    let winner = parse_winner(no, w[0])?;
    let (no, r) = f.single("rounds")?;
    let rounds: usize = num(no, r[0], "round count")?;
    let mut pv = Vec::new();
    for (no, rest) in f.all("step") {
        if rest.len() != 3 {
            return Err(Error::format_at(no, "step line expects side, atom, response"));
        }
        let side = match rest[0] {
            "A" => Side::A,
            "B" => Side::B,
            other => return Err(Error::format_at(no, format!("unknown side `{other}`"))),
        };
        let atom: usize = num(no, rest[1], "atom index")?;
        let response = match rest[2] {
            "-" => None,
            tok => Some(num(no, tok, "response index")?),
        };
        pv.push(PvStep { challenge: EfMove { side, atom }, response });
    }
    Ok(GameOutcome { winner, rounds, exhaustive: true, principal_variation: pv })
}

fn parse_net_outcome(f: &Fields) -> Result<NetOutcome> {
    let (no, w) = f.single("winner")?;
    let winner = parse_winner(no, w[0])?;
    let (no, r) = f.single("rounds")?;
    let rounds: usize = num(no, r[0], "round count")?;
    let (no, p) = f.single("pebbles")?;
    let pebbles: usize = num(no, p[0], "pebble count")?;
    let flag = f.optional("flag").map(|(_, rest)| rest.join(" "));
    let mut pv: Vec<NetPvStep> = Vec::new();
    let mut pending: Option<NetMove> = None;
    for (no, key, rest) in f.lines.iter().map(|(no, k, r)| (*no, *k, r.as_slice())) {
        match key {
            "challenge" => {
                if pending.is_some() {
                    return Err(Error::format_at(no, "challenge without a response"));
                }
                let mv = match rest {
                    ["initial", atom] => NetMove::Initial { atom: num(no, atom, "atom index")? },
                    ["cyl", index, atom, victim, tuple @ ..] if !tuple.is_empty() => {
                        NetMove::Cylindrifier {
                            index: num(no, index, "coordinate")?,
                            atom: num(no, atom, "atom index")?,
                            victim: match *victim {
                                "-" => None,
                                tok => Some(num(no, tok, "victim node")?),
                            },
                            tuple: tuple
                                .iter()
                                .map(|t| num(no, t, "node"))
                                .collect::<Result<_>>()?,
                        }
                    }
                    _ => return Err(Error::format_at(no, "malformed challenge line")),
                };
                pending = Some(mv);
            }
            "response" => {
                let challenge = pending
                    .take()
                    .ok_or_else(|| Error::format_at(no, "response without a challenge"))?;
                let response = match rest {
                    ["none"] => None,
                    [node, labels @ ..] => {
                        let node = match *node {
                            "-" => None,
                            tok => Some(num(no, tok, "node")?),
                        };
                        let mut parsed = Vec::new();
                        for label in labels {
                            let (coords, atom) = label.split_once(':').ok_or_else(|| {
                                Error::format_at(no, format!("malformed label `{label}`"))
                            })?;
                            let tuple: Vec<usize> = coords
                                .split('.')
                                .map(|c| num(no, c, "node"))
                                .collect::<Result<_>>()?;
                            parsed.push((tuple, num(no, atom, "atom index")?));
                        }
                        Some(NetResponse { node, labels: parsed })
                    }
                    [] => return Err(Error::format_at(no, "empty response line")),
                };
                pv.push(NetPvStep { challenge, response });
            }
            _ => {}
        }
    }
    if pending.is_some() {
        return Err(Error::format("trailing challenge without a response"));
    }
    Ok(NetOutcome { winner, rounds, pebbles, exhaustive: true, flag, principal_variation: pv })
}

fn parse_witness(f: &Fields) -> Result<WitnessRecord> {
    let (no, c) = f.single("check")?;
    let check = c[0].to_string();
    let (no_n, n_tok) = f.single("n")?;
    let n: usize = num(no_n, n_tok[0], "arity")?;
    let (no_k, k_tok) = f.single("maddux")?;
    let maddux_k: usize = num(no_k, k_tok[0], "atom count")?;
    let (no_l, l_tok) = f.single("l")?;
    let l: usize = num(no_l, l_tok[0], "blur width")?;
    let parse_sets = |no: usize, tokens: &[&str]| -> Result<Vec<Vec<usize>>> {
        tokens
            .iter()
            .map(|tok| tok.split(',').map(|x| num(no, x, "atom index")).collect())
            .collect()
    };
    let parse_list = |no: usize, tokens: &[&str]| -> Result<Vec<usize>> {
        tokens.iter().map(|tok| num(no, tok, "atom index")).collect()
    };
    let witness = match check.as_str() {
        "j4" => {
            let (no_v, v) = f.single("v")?;
            let (no_w, w) = f.single("w")?;
            BlurWitness::J4(J4Witness { v: parse_sets(no_v, v)?, w: parse_sets(no_w, w)? })
        }
        "j5" => {
            let (no_p, p) = f.single("p")?;
            let (no_q, q) = f.single("q")?;
            let (no_w, w) = f.single("w")?;
            BlurWitness::J5(J5Witness {
                p: parse_list(no_p, p)?,
                q: parse_list(no_q, q)?,
                w: parse_list(no_w, w)?,
            })
        }
        other => return Err(Error::format_at(no, format!("unknown check `{other}`"))),
    };
    Ok(WitnessRecord { check, n, maddux_k, l, witness })
}

pub fn parse_document(text: &str) -> Result<Document> {
    let f = Fields::parse(text)?;
    let (no, kind) = f.single("kind")?;
    if kind.len() != 1 {
        return Err(Error::format_at(no, "kind line expects one token"));
    }
    match kind[0] {
        "ra" => Ok(Document::Ra(parse_ra(&f)?)),
        "ca" => Ok(Document::Ca(parse_ca(&f)?)),
        "fincof" => Ok(Document::FinCof(parse_fincof(&f)?)),
        "graph" => Ok(Document::Graph(parse_graph(&f)?)),
        "partition" => Ok(Document::Partition(parse_partition(&f)?)),
        "vecatom" => Ok(Document::VecAtom(parse_vecatom(&f)?)),
        "outcome" => {
            let (no, game) = f.single("game")?;
            match game[0] {
                "ef" => Ok(Document::EfOutcome(parse_ef_outcome(&f)?)),
                "net" => Ok(Document::NetOutcome(parse_net_outcome(&f)?)),
                other => Err(Error::format_at(no, format!("unknown game `{other}`"))),
            }
        }
        "witness" => Ok(Document::Witness(parse_witness(&f)?)),
        other => Err(Error::format_at(no, format!("unknown kind `{other}`"))),
    }
}

// ------------------------------------------------------------- file I/O

pub fn read_document(path: &Path) -> Result<Document> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| Error::Io { path: path.display().to_string(), source })?;
    parse_document(&text)
}

pub fn write_file(path: &Path, content: &str) -> Result<()> {
    std::fs::write(path, content)
        .map_err(|source| Error::Io { path: path.display().to_string(), source })
}

// ------------------------------------------------------------------ CSV

/// One row per consistent triple (the sparse consistency tensor).
pub fn csv_ra_triples(s: &RaAtomStructure) -> String {
    let mut out = String::from("a,b,c\n");
    for &(a, b, c) in s.triples() {
        out.push_str(&format!("{},{},{}\n", s.atom_name(a), s.atom_name(b), s.atom_name(c)));
    }
    out
}

/// The full composition table: one row per atom pair, with the composed
/// atom set joined by `|`.
pub fn csv_ra_composition(s: &RaAtomStructure) -> Result<String> {
    let mut out = String::from("a,b,composition\n");
    for a in 0..s.atom_count() {
        for b in 0..s.atom_count() {
            let x: BTreeSet<usize> = [a].into_iter().collect();
            let y: BTreeSet<usize> = [b].into_iter().collect();
            let comp = s.compose_sets(&x, &y)?;
            let names: Vec<&str> = comp.iter().map(|&c| s.atom_name(c)).collect();
            out.push_str(&format!(
                "{},{},{}\n",
                s.atom_name(a),
                s.atom_name(b),
                names.join("|")
            ));
        }
    }
    Ok(out)
}

/// The blown-up carrier with its two partitions: one row per blown atom
/// with its fiber (base atom) and colour (blur member) coordinates.
pub fn csv_blown_carrier(s: &RaAtomStructure, b: &BlurSpec, carrier: &BlownCarrier) -> String {
    let mut out = String::from("copy,base,blur\n");
    for atom in &carrier.atoms {
        let blur: Vec<&str> = b.members()[atom.blur].iter().map(|&a| s.atom_name(a)).collect();
        out.push_str(&format!(
            "{},{},{}\n",
            atom.index,
            s.atom_name(atom.base),
            blur.join("|")
        ));
    }
    out
}

// ------------------------------------------------------------------ DOT

pub fn dot_graph(g: &Graph) -> String {
    let mut out = String::from("graph G {\n");
    for v in 0..g.vertices() {
        out.push_str(&format!("  {v};\n"));
    }
    for &(a, b) in g.edges() {
        out.push_str(&format!("  {a} -- {b};\n"));
    }
    out.push_str("}\n");
    out
}

pub fn parse_dot_graph(text: &str) -> Result<Graph> {
    let mut max_vertex: Option<usize> = None;
    let mut edges = Vec::new();
    let mut in_graph = false;
    for (idx, raw) in text.lines().enumerate() {
        let no = idx + 1;
        let line = raw.trim().trim_end_matches(';');
        if line.is_empty() {
            continue;
        }
        if !in_graph {
            if line.starts_with("graph") && line.ends_with('{') {
                in_graph = true;
                continue;
            }
            return Err(Error::format_at(no, "expected `graph <name> {`"));
        }
        if line == "}" {
            in_graph = false;
            continue;
        }
        let mut note = |v: usize| max_vertex = Some(max_vertex.map_or(v, |m| m.max(v)));
        match line.split("--").collect::<Vec<_>>()[..] {
            [single] => {
                let v: usize = num(no, single.trim(), "vertex")?;
                note(v);
            }
            [a, b] => {
                let a: usize = num(no, a.trim(), "vertex")?;
                let b: usize = num(no, b.trim(), "vertex")?;
                note(a);
                note(b);
                edges.push((a, b));
            }
            _ => return Err(Error::format_at(no, "malformed DOT statement")),
        }
    }
    Graph::new(max_vertex.map_or(0, |m| m + 1), edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basisblur::{blow_up, blur_index};
    use crate::games::{ef_decide, network_game_decide, RelStructure};
    use crate::relalg::build_maddux;
    use crate::structures::partition::build_partition_pair;

    fn roundtrip(doc: &Document) -> Document {
        parse_document(&write_document(doc)).expect("roundtrip parse")
    }

    #[test]
    fn ra_roundtrip() {
        let m = build_maddux(3).unwrap();
        match roundtrip(&Document::Ra(m.clone())) {
            Document::Ra(back) => assert_eq!(back, m),
            _ => panic!("kind changed"),
        }
    }

    #[test]
    fn ca_roundtrip() {
        let s = crate::games::dead_end_structure();
        match roundtrip(&Document::Ca(s.clone())) {
            Document::Ca(back) => assert_eq!(back, s),
            _ => panic!("kind changed"),
        }
    }

    #[test]
    fn fincof_roundtrip() {
        let carrier = FcCarrier::new(vec![
            ("u".into(), BlockShape::Finite { size: 3 }),
            ("v".into(), BlockShape::Infinite),
        ])
        .unwrap();
        let set = FinCofSet::new(
            carrier,
            vec![
                BlockValue::Members([0, 2].into_iter().collect()),
                BlockValue::Cofinite([1].into_iter().collect()),
            ],
        )
        .unwrap();
        match roundtrip(&Document::FinCof(set.clone())) {
            Document::FinCof(back) => assert_eq!(back, set),
            _ => panic!("kind changed"),
        }
    }

    #[test]
    fn graph_partition_vecatom_roundtrip() {
        let g = Graph::petersen();
        match roundtrip(&Document::Graph(g.clone())) {
            Document::Graph(back) => assert_eq!(back, g),
            _ => panic!("kind changed"),
        }
        let sizes: BTreeMap<String, usize> =
            [("u".to_string(), 4), ("v".to_string(), 2)].into_iter().collect();
        let sb: BTreeMap<String, usize> =
            [("u".to_string(), 3), ("v".to_string(), 2)].into_iter().collect();
        let large: BTreeSet<String> = ["u".to_string()].into_iter().collect();
        let (a, _) = build_partition_pair(&sizes, &sb, &large).unwrap();
        match roundtrip(&Document::Partition(a.clone())) {
            Document::Partition(back) => assert_eq!(back, a),
            _ => panic!("kind changed"),
        }
        let mut v = RationalVecAtom::zero(5).unwrap();
        v.set(0, Rational::new(3.into(), 2.into())).unwrap();
        v.set(3, Rational::new((-7).into(), 1.into())).unwrap();
        match roundtrip(&Document::VecAtom(v.clone())) {
            Document::VecAtom(back) => assert_eq!(back, v),
            _ => panic!("kind changed"),
        }
    }

    #[test]
    fn outcome_roundtrips() {
        let m = build_maddux(2).unwrap();
        let s = RelStructure::from_ra(&m);
        let out = ef_decide(&s, &s, 2).unwrap();
        match roundtrip(&Document::EfOutcome(out.clone())) {
            Document::EfOutcome(back) => {
                assert_eq!(back.winner, out.winner);
                assert_eq!(back.rounds, out.rounds);
                assert_eq!(back.principal_variation, out.principal_variation);
            }
            _ => panic!("kind changed"),
        }
        let dead = crate::games::dead_end_structure();
        let net = network_game_decide(&dead, 3, 2).unwrap();
        match roundtrip(&Document::NetOutcome(net.clone())) {
            Document::NetOutcome(back) => {
                assert_eq!(back.winner, net.winner);
                assert_eq!(back.pebbles, net.pebbles);
                assert_eq!(back.flag, net.flag);
                assert_eq!(back.principal_variation, net.principal_variation);
            }
            _ => panic!("kind changed"),
        }
    }

    #[test]
    fn witness_roundtrip() {
        let rec = WitnessRecord {
            check: "j4".into(),
            n: 3,
            maddux_k: 3,
            l: 2,
            witness: BlurWitness::J4(J4Witness {
                v: vec![vec![1, 2], vec![1, 3]],
                w: vec![vec![1, 2], vec![1, 3]],
            }),
        };
        match roundtrip(&Document::Witness(rec.clone())) {
            Document::Witness(back) => assert_eq!(back, rec),
            _ => panic!("kind changed"),
        }
    }

    #[test]
    fn version_gate() {
        let text = "atomkit 2\nkind graph\nvertices 1\nend\n";
        let err = parse_document(text).unwrap_err();
        assert!(err.to_string().contains("unsupported format version 2"));
    }

    #[test]
    fn cycle_incomplete_triples_rejected() {
        let m = build_maddux(3).unwrap();
        let text = write_ra(&m);
        // drop one diversity triple line: the loader must name the gap
        let broken: String = {
            let mut removed = false;
            text.lines()
                .filter(|l| {
                    if !removed && l.starts_with("triple a0 a0 a1") {
                        removed = true;
                        false
                    } else {
                        true
                    }
                })
                .map(|l| format!("{l}\n"))
                .collect()
        };
        assert_ne!(broken, text);
        let err = parse_document(&broken).unwrap_err();
        assert!(err.to_string().contains("cycle"), "got: {err}");
    }

    #[test]
    fn dot_roundtrip() {
        let g = Graph::cycle(5).unwrap();
        let back = parse_dot_graph(&dot_graph(&g)).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn csv_shapes() {
        let m = build_maddux(3).unwrap();
        let triples = csv_ra_triples(&m);
        assert_eq!(triples.lines().count() - 1, m.triples().len());
        let comp = csv_ra_composition(&m).unwrap();
        assert_eq!(comp.lines().count() - 1, m.atom_count() * m.atom_count());
        let blur = blur_index(&m, 1).unwrap();
        let carrier = blow_up(&m, &blur, 2).unwrap();
        let csv = csv_blown_carrier(&m, &blur, &carrier);
        assert_eq!(csv.lines().count() - 1, carrier.atoms.len());
    }

    #[test]
    fn writes_are_deterministic() {
        let m = build_maddux(4).unwrap();
        assert_eq!(write_ra(&m), write_ra(&m));
        let g = Graph::random(8, 0.5, 7).unwrap();
        assert_eq!(write_graph(&g), write_graph(&g));
    }
}
