//! Exact graph state, turnstile edge streams, and forest verification.
//!
//! The `ExactGraph` is the ground-truth oracle the sketches are judged
//! against: it stores the edge set explicitly, enforces simple-graph
//! discipline (no double inserts, no deletes of absent edges), and computes
//! connected components exactly.

use std::collections::BTreeSet;

use crate::agm::{SpanningForest, VertexSketchBank};
use crate::error::{Error, Result};

/// Disjoint sets with path compression and union by size. The canonical
/// representative of a set is its smallest member.
#[derive(Clone, Debug)]
pub struct UnionFind {
    parent: Vec<u32>,
    size: Vec<u32>,
    min_member: Vec<u32>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n as u32).collect(),
            size: vec![1; n],
            min_member: (0..n as u32).collect(),
        }
    }

    pub fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let gp = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = gp;
            x = gp;
        }
        x
    }

    /// Smallest vertex in x's component.
    pub fn canonical(&mut self, x: u32) -> u32 {
        let root = self.find(x);
        self.min_member[root as usize]
    }

    /// Returns false when both sides already share a component.
    pub fn union(&mut self, a: u32, b: u32) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra as usize] < self.size[rb as usize] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb as usize] = ra;
        self.size[ra as usize] += self.size[rb as usize];
        let m = self.min_member[ra as usize].min(self.min_member[rb as usize]);
        self.min_member[ra as usize] = m;
        true
    }

    pub fn component_count(&mut self) -> usize {
        (0..self.parent.len() as u32)
            .filter(|&v| self.find(v) == v)
            .count()
    }
}

/// Partition of `[0, n)` into components: `labels[v]` is the smallest
/// member of v's component.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    pub labels: Vec<u64>,
    pub count: usize,
}

impl Partition {
    pub fn from_union_find(uf: &mut UnionFind) -> Self {
        let n = uf.parent.len();
        let labels = (0..n as u32).map(|v| uf.canonical(v) as u64).collect();
        let count = uf.component_count();
        Partition { labels, count }
    }

    /// Component member lists, ordered by smallest member.
    pub fn groups(&self) -> Vec<Vec<u64>> {
        let mut out: Vec<Vec<u64>> = Vec::new();
        let mut index_of: std::collections::BTreeMap<u64, usize> = Default::default();
        for (v, &lab) in self.labels.iter().enumerate() {
            let slot = *index_of.entry(lab).or_insert_with(|| {
                out.push(Vec::new());
                out.len() - 1
            });
            out[slot].push(v as u64);
        }
        out.sort_by_key(|g| g[0]);
        out
    }
}

/// The ground-truth simple graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactGraph {
    n: u64,
    edges: BTreeSet<(u64, u64)>,
}

fn sorted_pair(u: u64, v: u64, n: u64) -> Result<(u64, u64)> {
    if u == v {
        return Err(Error::SelfLoop(u));
    }
    for w in [u, v] {
        if w >= n {
            return Err(Error::VertexOutOfRange { vertex: w, n });
        }
    }
    Ok((u.min(v), u.max(v)))
}

impl ExactGraph {
    pub fn new(n: u64) -> Self {
        ExactGraph { n, edges: BTreeSet::new() }
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.edges.iter().copied()
    }

    pub fn contains(&self, u: u64, v: u64) -> bool {
        sorted_pair(u, v, self.n).map(|p| self.edges.contains(&p)).unwrap_or(false)
    }

    pub fn insert(&mut self, u: u64, v: u64) -> Result<()> {
        let p = sorted_pair(u, v, self.n)?;
        if !self.edges.insert(p) {
            return Err(Error::Multiplicity { insert: true, u: p.0, v: p.1 });
        }
        Ok(())
    }

    pub fn delete(&mut self, u: u64, v: u64) -> Result<()> {
        let p = sorted_pair(u, v, self.n)?;
        if !self.edges.remove(&p) {
            return Err(Error::Multiplicity { insert: false, u: p.0, v: p.1 });
        }
        Ok(())
    }

    pub fn adjacency(&self) -> Vec<Vec<u64>> {
        let mut adj = vec![Vec::new(); self.n as usize];
        for &(u, v) in &self.edges {
            adj[u as usize].push(v);
            adj[v as usize].push(u);
        }
        adj
    }
}

/// Exact connected components via union-find, with smallest-member
/// canonical representatives.
pub fn oracle_components(g: &ExactGraph) -> Partition {
    let mut uf = UnionFind::new(g.n as usize);
    for (u, v) in g.edges() {
        uf.union(u as u32, v as u32);
    }
    Partition::from_union_find(&mut uf)
}

/// One turnstile stream event.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StreamOp {
    Insert(u64, u64),
    Delete(u64, u64),
    Query,
}

/// A parsed stream file: vertex count plus events in file order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stream {
    pub n: u64,
    pub ops: Vec<StreamOp>,
}

/// Parses the stream text format: a `n <N>` header, then one op per line
/// (`+ u v`, `- u v`, `?`). `#` starts a comment. Empty input parses to an
/// empty stream.
pub fn parse_stream(text: &str) -> Result<Stream> {
    let mut n: Option<u64> = None;
    let mut ops = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split_whitespace();
        let head = fields.next().expect("nonempty line");
        let err = |msg: String| Error::Parse { line: lineno + 1, msg };
        let read_pair = |fields: &mut dyn Iterator<Item = &str>| -> Result<(u64, u64)> {
            let u = fields
                .next()
                .ok_or_else(|| err("missing first endpoint".into()))?
                .parse::<u64>()
                .map_err(|e| err(format!("bad vertex id: {e}")))?;
            let v = fields
                .next()
                .ok_or_else(|| err("missing second endpoint".into()))?
                .parse::<u64>()
                .map_err(|e| err(format!("bad vertex id: {e}")))?;
            let bound = n.ok_or_else(|| err("op before `n <count>` header".into()))?;
            sorted_pair(u, v, bound).map_err(|e| err(e.to_string()))
        };
        match head {
            "n" => {
                if n.is_some() {
                    return Err(err("duplicate header".into()));
                }
                let count = fields
                    .next()
                    .ok_or_else(|| err("missing vertex count".into()))?
                    .parse::<u64>()
                    .map_err(|e| err(format!("bad vertex count: {e}")))?;
                n = Some(count);
            }
            "+" => {
                let (u, v) = read_pair(&mut fields)?;
                ops.push(StreamOp::Insert(u, v));
            }
            "-" => {
                let (u, v) = read_pair(&mut fields)?;
                ops.push(StreamOp::Delete(u, v));
            }
            "?" => ops.push(StreamOp::Query),
            other => return Err(err(format!("unknown op `{other}`"))),
        }
        if let Some(extra) = fields.next() {
            return Err(Error::Parse {
                line: lineno + 1,
                msg: format!("trailing field `{extra}`"),
            });
        }
    }
    Ok(Stream { n: n.unwrap_or(0), ops })
}

/// Parses the edge-list text format: a `n <N>` header then one `u v` pair
/// per line. `#` starts a comment.
pub fn parse_edge_list(text: &str) -> Result<ExactGraph> {
    let mut g: Option<ExactGraph> = None;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: String| Error::Parse { line: lineno + 1, msg };
        let fields: Vec<&str> = line.split_whitespace().collect();
        match (fields.as_slice(), &mut g) {
            (["n", count], slot) if slot.is_none() => {
                let n = count
                    .parse::<u64>()
                    .map_err(|e| err(format!("bad vertex count: {e}")))?;
                *slot = Some(ExactGraph::new(n));
            }
            ([a, b], Some(graph)) => {
                let u = a.parse::<u64>().map_err(|e| err(format!("bad vertex id: {e}")))?;
                let v = b.parse::<u64>().map_err(|e| err(format!("bad vertex id: {e}")))?;
                graph.insert(u, v).map_err(|e| err(e.to_string()))?;
            }
            _ => return Err(err(format!("unrecognized line `{line}`"))),
        }
    }
    g.ok_or_else(|| Error::Parse { line: 0, msg: "missing `n <count>` header".into() })
}

/// A named reason a forest fails verification.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    EdgeNotInGraph(u64, u64),
    Cycle,
    WrongEdgeCount { expected: usize, actual: usize },
    ComponentsMismatch,
}

/// Verification outcome; valid iff no violations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerificationReport {
    pub is_valid: bool,
    pub reasons: Vec<Violation>,
}

/// Checks a claimed forest against the exact graph: every edge present,
/// acyclic, the right edge count, and the same induced components.
pub fn verify_forest(f: &SpanningForest, g: &ExactGraph) -> VerificationReport {
    let mut reasons = Vec::new();
    let mut uf = UnionFind::new(g.n() as usize);
    let mut cyclic = false;
    for &(u, v) in &f.edges {
        if !g.contains(u, v) {
            reasons.push(Violation::EdgeNotInGraph(u, v));
        }
        if u < g.n() && v < g.n() && !uf.union(u as u32, v as u32) {
            cyclic = true;
        }
    }
    if cyclic {
        reasons.push(Violation::Cycle);
    }
    let truth = oracle_components(g);
    let expected = g.n() as usize - truth.count;
    if f.edges.len() != expected {
        reasons.push(Violation::WrongEdgeCount { expected, actual: f.edges.len() });
    }
    if Partition::from_union_find(&mut uf) != truth {
        reasons.push(Violation::ComponentsMismatch);
    }
    VerificationReport { is_valid: reasons.is_empty(), reasons }
}

/// Applies ops to the sketch bank and the exact oracle in lockstep; each
/// query yields the bank's forest plus its verification. Multiplicity
/// violations reject the stream at the offending op.
pub fn apply_stream(
    bank: &mut VertexSketchBank,
    g: &mut ExactGraph,
    ops: &[StreamOp],
) -> Result<Vec<(SpanningForest, VerificationReport)>> {
    if bank.params().n != g.n() {
        return Err(Error::InvalidParameter(format!(
            "bank is sized for {} vertices but the oracle has {}",
            bank.params().n,
            g.n()
        )));
    }
    let mut out = Vec::new();
    for op in ops {
        match *op {
            StreamOp::Insert(u, v) => {
                g.insert(u, v)?;
                bank.update(u, v, 1)?;
            }
            StreamOp::Delete(u, v) => {
                g.delete(u, v)?;
                bank.update(u, v, -1)?;
            }
            StreamOp::Query => {
                let forest = bank.query();
                let report = verify_forest(&forest, g);
                out.push((forest, report));
            }
        }
    }
    Ok(out)
}

/// The insert-only baseline: keep an edge iff its endpoints lie in
/// different trees so far. Deterministic, zero failure probability, and
/// unable to handle deletions.
pub fn incremental_baseline(n: u64, ops: &[StreamOp]) -> Result<SpanningForest> {
    let mut uf = UnionFind::new(n as usize);
    let mut edges = Vec::new();
    for op in ops {
        match *op {
            StreamOp::Insert(u, v) => {
                let (a, b) = sorted_pair(u, v, n)?;
                if uf.union(a as u32, b as u32) {
                    edges.push((a, b));
                }
            }
            StreamOp::Delete(_, _) => {
                return Err(Error::UnsupportedOp("the incremental baseline cannot delete"));
            }
            StreamOp::Query => {}
        }
    }
    Ok(SpanningForest { n, edges })
}
