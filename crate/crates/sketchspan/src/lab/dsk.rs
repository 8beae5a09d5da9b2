//! Planted block graphs: the hard family for spanning-forest sketching.
//!
//! On an ambient parameter `n` with integer fifth root `s`, the graph
//! lives on `s^4` vertices split into four groups: `floor(s^3 / 2)` hub
//! vertices, one private block of `s` vertices per hub, a contact group of
//! `s` vertices, and isolated leftovers. Hub `i` carries a relation
//! instance `(S_i, T_i)` over `[s]`: it connects to `|T_i|` random
//! vertices of its own block and `|S_i \ T_i|` random vertices of the
//! contact group. The only edges are hub-to-own-block and hub-to-contact,
//! so a block escapes to the rest of the graph through its hub's contact
//! edges alone; any spanning forest must surface one of them.

use rand::seq::index::sample as index_sample;
use rand::seq::SliceRandom;
use rand::Rng;

use super::ur::{sample_d_ur, UrInstance, UrParams};
use crate::agm::SpanningForest;
use crate::error::{Error, Result};
use crate::graph::ExactGraph;

/// Integer geometry of the family at ambient parameter `n = s^5`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DskShape {
    pub ambient_n: u64,
    /// s = n^(1/5).
    pub side: u64,
    /// Vertex count, s^4.
    pub vertices: u64,
    /// Number of hubs (and blocks), floor(s^3 / 2).
    pub num_blocks: u64,
    /// Vertices per block and per contact group: s.
    pub block_size: u64,
}

/// Validates that `n` is a perfect fifth power of an integer at least 4.
pub fn dsk_shape(n: u64) -> Result<DskShape> {
    let side = (n as f64).powf(0.2).round() as u64;
    let exact = side
        .checked_pow(5)
        .map(|p| p == n)
        .unwrap_or(false);
    if !exact || side < 4 {
        return Err(Error::Size(format!(
            "ambient n must be a perfect fifth power s^5 with s >= 4, got {n}"
        )));
    }
    Ok(DskShape {
        ambient_n: n,
        side,
        vertices: side.pow(4),
        num_blocks: side.pow(3) / 2,
        block_size: side,
    })
}

/// One sampled planted graph with its hidden instances.
#[derive(Clone, Debug)]
pub struct DskGraph {
    pub shape: DskShape,
    pub graph: ExactGraph,
    /// Hub i is `hubs[i]`, privately attached to `blocks[i]`.
    pub hubs: Vec<u64>,
    pub blocks: Vec<Vec<u64>>,
    /// The contact group every hub may reach.
    pub contact: Vec<u64>,
    /// The relation instance each hub encodes.
    pub instances: Vec<UrInstance>,
}

/// Samples the planted distribution. The relation parameters must be over
/// the universe `[s]`.
pub fn sample_d_sk<R: Rng>(n: u64, ur: &UrParams, rng: &mut R) -> Result<DskGraph> {
    let shape = dsk_shape(n)?;
    if ur.universe != shape.side {
        return Err(Error::InvalidParameter(format!(
            "relation universe {} must equal the block size {}",
            ur.universe, shape.side
        )));
    }
    let nb = shape.num_blocks as usize;
    let s = shape.block_size as usize;
    let needed = nb + nb * s + s;
    // the set is uniform but the sample order is unspecified; shuffle so
    // the split into groups is exchangeable
    let mut picks: Vec<u64> = index_sample(rng, shape.vertices as usize, needed)
        .into_iter()
        .map(|x| x as u64)
        .collect();
    picks.shuffle(rng);
    let hubs: Vec<u64> = picks[..nb].to_vec();
    let mut blocks: Vec<Vec<u64>> = Vec::with_capacity(nb);
    for i in 0..nb {
        let mut b = picks[nb + i * s..nb + (i + 1) * s].to_vec();
        b.sort_unstable();
        blocks.push(b);
    }
    let mut contact: Vec<u64> = picks[nb + nb * s..].to_vec();
    contact.sort_unstable();

    let mut graph = ExactGraph::new(shape.vertices);
    let mut instances = Vec::with_capacity(nb);
    for i in 0..nb {
        let inst = sample_d_ur(ur, rng);
        for bi in index_sample(rng, s, inst.t.len()) {
            graph.insert(hubs[i], blocks[i][bi])?;
        }
        let outward = inst.s.len() - inst.t.len();
        for ci in index_sample(rng, s, outward) {
            graph.insert(hubs[i], contact[ci])?;
        }
        instances.push(inst);
    }
    Ok(DskGraph { shape, graph, hubs, blocks, contact, instances })
}

/// Structural constraints every sample must satisfy: each edge is either
/// hub-to-own-block or hub-to-contact, and no block vertex touches
/// anything but its own hub. Returns human-readable violations.
pub fn check_dsk_invariants(d: &DskGraph) -> Vec<String> {
    let mut violations = Vec::new();
    let mut hub_of = std::collections::HashMap::new();
    for (i, &h) in d.hubs.iter().enumerate() {
        hub_of.insert(h, i);
    }
    let mut block_of = std::collections::HashMap::new();
    for (i, block) in d.blocks.iter().enumerate() {
        for &v in block {
            block_of.insert(v, i);
        }
    }
    let contact: std::collections::HashSet<u64> = d.contact.iter().copied().collect();
    for (a, b) in d.graph.edges() {
        let (hub, other) = match (hub_of.get(&a), hub_of.get(&b)) {
            (Some(&i), None) => (i, b),
            (None, Some(&i)) => (i, a),
            (Some(_), Some(_)) => {
                violations.push(format!("edge ({a}, {b}) joins two hubs"));
                continue;
            }
            (None, None) => {
                violations.push(format!("edge ({a}, {b}) touches no hub"));
                continue;
            }
        };
        match block_of.get(&other) {
            Some(&j) if j == hub => {}
            Some(&j) => {
                violations.push(format!(
                    "edge ({a}, {b}): hub {hub} reaches into foreign block {j}"
                ));
            }
            None if contact.contains(&other) => {}
            None => {
                violations.push(format!(
                    "edge ({a}, {b}): endpoint {other} is neither block nor contact"
                ));
            }
        }
    }
    violations
}

/// One draw of the mixed distribution: the planted graph, or a bipartite
/// half-split whose left degrees mimic the hub (respectively contact)
/// degree distribution.
#[derive(Clone, Debug)]
pub enum DskPrimeSample {
    Planted(DskGraph),
    Split {
        /// 1 mimics hub degrees, 2 mimics contact degrees.
        case_index: u8,
        left: Vec<u64>,
        right: Vec<u64>,
        graph: ExactGraph,
    },
}

impl DskPrimeSample {
    pub fn graph(&self) -> &ExactGraph {
        match self {
            DskPrimeSample::Planted(d) => &d.graph,
            DskPrimeSample::Split { graph, .. } => graph,
        }
    }

    pub fn case_index(&self) -> u8 {
        match self {
            DskPrimeSample::Planted(_) => 0,
            DskPrimeSample::Split { case_index, .. } => *case_index,
        }
    }
}

/// A hub's degree: always exactly m, since it spends |T| edges on its
/// block and |S \ T| on the contact group.
pub fn sample_dm_degree(ur: &UrParams) -> u64 {
    ur.m
}

/// A contact vertex's degree: each hub independently lands on a fixed
/// contact vertex with probability |S_j \ T_j| / s.
pub fn sample_dr_degree<R: Rng>(shape: &DskShape, ur: &UrParams, rng: &mut R) -> u64 {
    let mut degree = 0u64;
    for _ in 0..shape.num_blocks {
        let stage = rng.gen_range(0..ur.stages());
        let outward = ur.m - ur.schedule[stage];
        if rng.gen_range(0..shape.side) < outward {
            degree += 1;
        }
    }
    degree
}

/// Samples the three-way mixture with probability 1/3 each.
pub fn sample_d_sk_prime<R: Rng>(n: u64, ur: &UrParams, rng: &mut R) -> Result<DskPrimeSample> {
    let shape = dsk_shape(n)?;
    if ur.universe != shape.side {
        return Err(Error::InvalidParameter(format!(
            "relation universe {} must equal the block size {}",
            ur.universe, shape.side
        )));
    }
    let case = rng.gen_range(0u8..3);
    if case == 0 {
        return Ok(DskPrimeSample::Planted(sample_d_sk(n, ur, rng)?));
    }
    let v = shape.vertices as usize;
    let mut order: Vec<u64> = (0..shape.vertices).collect();
    order.shuffle(rng);
    let mut left = order[..v / 2].to_vec();
    let mut right = order[v / 2..].to_vec();
    left.sort_unstable();
    right.sort_unstable();
    let mut graph = ExactGraph::new(shape.vertices);
    for &u in &left {
        let degree = if case == 1 {
            sample_dm_degree(ur)
        } else {
            sample_dr_degree(&shape, ur, rng)
        } as usize;
        for ri in index_sample(rng, right.len(), degree.min(right.len())) {
            graph.insert(u, right[ri])?;
        }
    }
    Ok(DskPrimeSample::Split { case_index: case, left, right, graph })
}

/// A relation instance planted inside one hub of the graph family.
#[derive(Clone, Debug)]
pub struct Embedding {
    pub shape: DskShape,
    pub graph: ExactGraph,
    pub hubs: Vec<u64>,
    /// Which hub carries the embedded instance.
    pub hub_index: usize,
    /// The injection: element x of the relation universe maps to vertex
    /// `beta[x]`.
    pub beta: Vec<u64>,
    pub blocks: Vec<Vec<u64>>,
    pub contact: Vec<u64>,
}

impl Embedding {
    pub fn hub(&self) -> u64 {
        self.hubs[self.hub_index]
    }
}

/// Plants `(S, T)` at a random hub: the hub's neighborhood is exactly the
/// beta-image of S, with `beta(T)` inside the hub's own block and
/// `beta([s] \ T)` inside the contact group, so every hub-to-contact
/// forest edge decodes (through beta) to an element of S \ T. All other
/// hubs carry fresh instances from the same distribution.
pub fn embed_ur_in_dsk<R: Rng>(
    s_set: &[u64],
    t_set: &[u64],
    n: u64,
    ur: &UrParams,
    rng: &mut R,
) -> Result<Embedding> {
    let shape = dsk_shape(n)?;
    if ur.universe != shape.side {
        return Err(Error::InvalidParameter(format!(
            "relation universe {} must equal the block size {}",
            ur.universe, shape.side
        )));
    }
    let inst = UrInstance::new(s_set.to_vec(), t_set.to_vec(), 0)?;
    if inst.s.iter().any(|&x| x >= shape.side) {
        return Err(Error::InvalidParameter(
            "embedded set elements must lie in the block-size universe".into(),
        ));
    }
    let side = shape.side as usize;
    let nb = shape.num_blocks as usize;
    let v = shape.vertices as usize;

    // hubs, then the injection image, then fillers for every group; the
    // sample order is unspecified, so shuffle before splitting
    let needed = nb + side + (nb * side);
    let mut picks: Vec<u64> =
        index_sample(rng, v, needed).into_iter().map(|x| x as u64).collect();
    picks.shuffle(rng);
    let hubs: Vec<u64> = picks[..nb].to_vec();
    let beta: Vec<u64> = picks[nb..nb + side].to_vec();
    let mut pool = picks[nb + side..].to_vec();
    let hub_index = rng.gen_range(0..nb);

    let in_t = |x: u64| inst.t.binary_search(&x).is_ok();
    let mut blocks: Vec<Vec<u64>> = Vec::with_capacity(nb);
    let mut contact: Vec<u64> = (0..shape.side).filter(|&x| !in_t(x)).map(|x| beta[x as usize]).collect();
    let fill = |pool: &mut Vec<u64>, count: usize| -> Vec<u64> {
        pool.split_off(pool.len() - count)
    };
    for i in 0..nb {
        let mut block: Vec<u64> = if i == hub_index {
            inst.t.iter().map(|&x| beta[x as usize]).collect()
        } else {
            Vec::new()
        };
        block.extend(fill(&mut pool, side - block.len()));
        block.sort_unstable();
        blocks.push(block);
    }
    contact.extend(fill(&mut pool, side - contact.len()));
    contact.sort_unstable();

    let mut graph = ExactGraph::new(shape.vertices);
    for &x in &inst.s {
        graph.insert(hubs[hub_index], beta[x as usize])?;
    }
    for j in 0..nb {
        if j == hub_index {
            continue;
        }
        let other = sample_d_ur(ur, rng);
        for bi in index_sample(rng, side, other.t.len()) {
            graph.insert(hubs[j], blocks[j][bi])?;
        }
        let outward = other.s.len() - other.t.len();
        // avoid colliding with the planted hub's contact edges: hubs are
        // distinct vertices, so edges (hub_j, contact) never repeat
        for ci in index_sample(rng, side, outward) {
            graph.insert(hubs[j], contact[ci])?;
        }
    }
    Ok(Embedding { shape, graph, hubs, hub_index, beta, blocks, contact })
}

/// Reads the embedded answer out of a forest: the smallest contact vertex
/// the planted hub touches, pulled back through beta. On a valid spanning
/// forest this lands in S \ T. Returns the arbitrary element 0 if the
/// touched contact vertex is outside the injection image (impossible on
/// valid forests).
pub fn recover_embedded(e: &Embedding, forest: &SpanningForest) -> Option<u64> {
    let hub = e.hub();
    let contact: std::collections::HashSet<u64> = e.contact.iter().copied().collect();
    let mut touched: Vec<u64> = forest
        .edges
        .iter()
        .filter_map(|&(a, b)| {
            if a == hub && contact.contains(&b) {
                Some(b)
            } else if b == hub && contact.contains(&a) {
                Some(a)
            } else {
                None
            }
        })
        .collect();
    touched.sort_unstable();
    let u = *touched.first()?;
    Some(
        e.beta
            .iter()
            .position(|&img| img == u)
            .map(|x| x as u64)
            .unwrap_or(0),
    )
}

/// Vertex-shifted disjoint union of same-order graphs: a spanning forest
/// of the union is the union of per-copy spanning forests.
pub fn disconnected_copies(graphs: &[ExactGraph]) -> Result<ExactGraph> {
    let per = graphs
        .first()
        .ok_or_else(|| Error::InvalidParameter("need at least one copy".into()))?
        .n();
    if graphs.iter().any(|g| g.n() != per) {
        return Err(Error::InvalidParameter("copies must share one vertex count".into()));
    }
    let mut out = ExactGraph::new(per * graphs.len() as u64);
    for (i, g) in graphs.iter().enumerate() {
        let shift = per * i as u64;
        for (u, v) in g.edges() {
            out.insert(u + shift, v + shift)?;
        }
    }
    Ok(out)
}
