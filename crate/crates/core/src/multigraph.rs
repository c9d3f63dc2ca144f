//! Labeled undirected multigraphs with counter-distinguished loops.
//!
//! A provider's secret topology: vertices and links carry label sets, loops
//! exist only as padding material at boundary nodes (plus whatever the input
//! topology declares), and a non-empty subset of vertices is marked as the
//! boundary shared with adjacent networks. Graphs are immutable once built;
//! augmentation returns a new value so a signed graph can never drift from
//! its signature.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::pairing::{hash_to_scalar, Scalar};

/// Vertex identifier: the provider-chosen name from the topology file.
///
/// Boundary node names follow the inter-provider naming convention; internal
/// names are local to the provider.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(pub String);

impl VertexId {
    pub fn new(name: impl Into<String>) -> Self {
        Self(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Scalar identifier used in every encoding and commitment.
    pub fn to_scalar(&self) -> Scalar {
        hash_to_scalar(b"vertex", self.0.as_bytes())
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for VertexId {
    fn from(s: &str) -> Self {
        Self(s.to_string())
    }
}

/// Label attached to a vertex or edge.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Label(pub String);

impl Label {
    pub fn to_scalar(&self) -> Scalar {
        hash_to_scalar(b"label", self.0.as_bytes())
    }
}

impl From<&str> for Label {
    fn from(s: &str) -> Self {
        Self(s.to_string())
    }
}

/// Scalar for a loop counter; counters live in their own identifier universe.
pub fn counter_scalar(counter: u32) -> Scalar {
    hash_to_scalar(b"counter", &counter.to_le_bytes())
}

/// One loop instance at a vertex. Counters at a vertex are dense `1..=k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoopInstance {
    pub counter: u32,
    pub labels: BTreeSet<Label>,
}

/// Reference to a specific edge instance.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EdgeRef {
    /// Link between two distinct vertices, endpoints in ascending name order.
    Link(VertexId, VertexId),
    /// Loop instance at a vertex, identified by its counter.
    Loop(VertexId, u32),
}

impl EdgeRef {
    pub fn link(a: &VertexId, b: &VertexId) -> Self {
        if a <= b {
            EdgeRef::Link(a.clone(), b.clone())
        } else {
            EdgeRef::Link(b.clone(), a.clone())
        }
    }
}

impl fmt::Display for EdgeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EdgeRef::Link(u, v) => write!(f, "({u},{v})"),
            EdgeRef::Loop(v, c) => write!(f, "({v},{v})#{c}"),
        }
    }
}

/// Structural errors for graph construction and path machinery.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("duplicate vertex `{0}`")]
    DuplicateVertex(String),
    #[error("duplicate edge between `{0}` and `{1}`")]
    DuplicateEdge(String, String),
    #[error("edge from `{0}` to itself must be declared as a loop")]
    SelfEdge(String),
    #[error("loop counters at `{0}` must be dense 1..=k without repeats")]
    BadLoopCounters(String),
    #[error("boundary vertex `{0}` is not declared")]
    UnknownBoundary(String),
    #[error("empty boundary set")]
    EmptyBoundary,
    #[error("vertex `{0}` cannot reach boundary node `{1}`")]
    UnreachableBoundary(String, String),
    #[error("padding count must be at least 1")]
    BadPaddingCount,
    #[error("path of length {path} exceeds target {target}")]
    PathTooLong { path: usize, target: usize },
    #[error("terminal `{0}` lacks {1} unused loop instances for padding")]
    InsufficientLoops(String, usize),
    #[error("invalid path: {0}")]
    InvalidPath(String),
    #[error("schema error: {0}")]
    Schema(String),
}

/// Immutable labeled multigraph with loops and a boundary set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Multigraph {
    vertices: BTreeMap<VertexId, BTreeSet<Label>>,
    links: BTreeMap<(VertexId, VertexId), BTreeSet<Label>>,
    loops: BTreeMap<VertexId, Vec<LoopInstance>>,
    boundary: BTreeSet<VertexId>,
}

impl Multigraph {
    pub fn builder() -> MultigraphBuilder {
        MultigraphBuilder::default()
    }

    /// Number of vertices.
    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    /// Number of edge instances, counting every loop instance.
    pub fn edge_count(&self) -> usize {
        self.links.len() + self.loops.values().map(Vec::len).sum::<usize>()
    }

    /// Graph dimension `L = n + m`.
    pub fn dimension(&self) -> usize {
        self.vertex_count() + self.edge_count()
    }

    pub fn has_vertex(&self, v: &VertexId) -> bool {
        self.vertices.contains_key(v)
    }

    pub fn vertex_labels(&self, v: &VertexId) -> Option<&BTreeSet<Label>> {
        self.vertices.get(v)
    }

    pub fn boundary(&self) -> &BTreeSet<VertexId> {
        &self.boundary
    }

    /// Vertices in canonical (ascending name) order.
    pub fn vertices(&self) -> impl Iterator<Item = (&VertexId, &BTreeSet<Label>)> {
        self.vertices.iter()
    }

    /// Links in canonical order.
    pub fn links(&self) -> impl Iterator<Item = (&(VertexId, VertexId), &BTreeSet<Label>)> {
        self.links.iter()
    }

    /// Loop instances at a vertex, ordered by counter.
    pub fn loops_at(&self, v: &VertexId) -> &[LoopInstance] {
        self.loops.get(v).map(Vec::as_slice).unwrap_or(&[])
    }

    /// All loop instances in canonical order.
    pub fn loops(&self) -> impl Iterator<Item = (&VertexId, &LoopInstance)> {
        self.loops.iter().flat_map(|(v, ls)| ls.iter().map(move |l| (v, l)))
    }

    /// Every edge instance in canonical order: links first, then loops.
    pub fn edge_instances(&self) -> Vec<EdgeRef> {
        let mut out: Vec<EdgeRef> = self
            .links
            .keys()
            .map(|(u, v)| EdgeRef::Link(u.clone(), v.clone()))
            .collect();
        out.extend(self.loops().map(|(v, l)| EdgeRef::Loop(v.clone(), l.counter)));
        out
    }

    pub fn has_edge(&self, e: &EdgeRef) -> bool {
        match e {
            EdgeRef::Link(u, v) => self.links.contains_key(&(u.clone(), v.clone())),
            EdgeRef::Loop(v, c) => self.loops_at(v).iter().any(|l| l.counter == *c),
        }
    }

    pub fn edge_labels(&self, e: &EdgeRef) -> Option<&BTreeSet<Label>> {
        match e {
            EdgeRef::Link(u, v) => self.links.get(&(u.clone(), v.clone())),
            EdgeRef::Loop(v, c) => self
                .loops_at(v)
                .iter()
                .find(|l| l.counter == *c)
                .map(|l| &l.labels),
        }
    }

    fn neighbors(&self) -> BTreeMap<&VertexId, Vec<&VertexId>> {
        let mut adj: BTreeMap<&VertexId, Vec<&VertexId>> = BTreeMap::new();
        for v in self.vertices.keys() {
            adj.entry(v).or_default();
        }
        for (u, v) in self.links.keys() {
            adj.entry(u).or_default().push(v);
            adj.entry(v).or_default().push(u);
        }
        adj
    }

    /// Single-source hop distances over links (loops never shorten paths).
    pub fn distances(&self, from: &VertexId) -> Result<BTreeMap<VertexId, usize>, GraphError> {
        if !self.has_vertex(from) {
            return Err(GraphError::UnknownVertex(from.0.clone()));
        }
        let adj = self.neighbors();
        let mut dist = BTreeMap::new();
        dist.insert(from.clone(), 0usize);
        let mut queue = VecDeque::from([from]);
        while let Some(cur) = queue.pop_front() {
            let d = dist[cur];
            for &next in &adj[cur] {
                if !dist.contains_key(next) {
                    dist.insert(next.clone(), d + 1);
                    queue.push_back(next);
                }
            }
        }
        Ok(dist)
    }

    /// Minimum-hop path between two vertices, ignoring loops.
    ///
    /// Returns `None` when disconnected, and an empty path when `from == to`.
    pub fn shortest_path(&self, from: &VertexId, to: &VertexId) -> Result<Option<Path>, GraphError> {
        self.cheapest_path(from, to, |_, _| 1)
    }

    /// Minimum-cost path under a caller-supplied per-link cost.
    ///
    /// Hop count is `|_, _| 1`. Costs must be >= 1. Deterministic: ties break
    /// toward the lexicographically smaller predecessor.
    pub fn cheapest_path(
        &self,
        from: &VertexId,
        to: &VertexId,
        link_cost: impl Fn(&VertexId, &VertexId) -> u64,
    ) -> Result<Option<Path>, GraphError> {
        for v in [from, to] {
            if !self.has_vertex(v) {
                return Err(GraphError::UnknownVertex(v.0.clone()));
            }
        }
        let adj = self.neighbors();
        let mut best: BTreeMap<&VertexId, (u64, Option<&VertexId>)> = BTreeMap::new();
        best.insert(from, (0, None));
        // Dijkstra over a BTreeSet keyed (cost, vertex) for deterministic order.
        let mut frontier: BTreeSet<(u64, &VertexId)> = BTreeSet::from([(0, from)]);
        while let Some((cost, cur)) = frontier.pop_first() {
            if cur == to {
                break;
            }
            if cost > best[cur].0 {
                continue;
            }
            for &next in &adj[cur] {
                let c = link_cost(cur, next).max(1);
                let cand = cost + c;
                let better = match best.get(next) {
                    None => true,
                    Some(&(old, _)) => cand < old,
                };
                if better {
                    if let Some(&(old, _)) = best.get(next) {
                        frontier.remove(&(old, next));
                    }
                    best.insert(next, (cand, Some(cur)));
                    frontier.insert((cand, next));
                }
            }
        }
        if !best.contains_key(to) {
            return Ok(None);
        }
        let mut order = vec![to];
        while let Some(&(_, Some(prev))) = best.get(*order.last().unwrap()) {
            order.push(prev);
        }
        order.reverse();
        let steps = order
            .windows(2)
            .map(|w| PathStep {
                from: w[0].clone(),
                to: w[1].clone(),
                edge: EdgeRef::link(w[0], w[1]),
            })
            .collect::<Vec<_>>();
        let real = steps.len();
        Ok(Some(Path { steps, real_length: real }))
    }

    /// Padding target: the longest shortest-path distance from any vertex to
    /// any boundary node.
    ///
    /// Every (vertex, boundary) pair must be connected; a graph where some
    /// vertex cannot reach some boundary node has no finite target.
    pub fn padding_target(&self) -> Result<usize, GraphError> {
        if self.boundary.is_empty() {
            return Err(GraphError::EmptyBoundary);
        }
        let mut target = 0usize;
        for b in &self.boundary {
            let dist = self.distances(b)?;
            for v in self.vertices.keys() {
                match dist.get(v) {
                    Some(&d) => target = target.max(d),
                    None => {
                        return Err(GraphError::UnreachableBoundary(b.0.clone(), v.0.clone()))
                    }
                }
            }
        }
        Ok(target)
    }

    /// Returns a copy with `padding` extra counter-distinguished loops on
    /// every boundary node. Added loops carry no labels.
    pub fn augment(&self, padding: usize) -> Result<Multigraph, GraphError> {
        if padding < 1 {
            return Err(GraphError::BadPaddingCount);
        }
        let mut out = self.clone();
        for b in &self.boundary {
            let entry = out.loops.entry(b.clone()).or_default();
            let start = entry.len() as u32;
            for k in 1..=padding as u32 {
                entry.push(LoopInstance {
                    counter: start + k,
                    labels: BTreeSet::new(),
                });
            }
        }
        Ok(out)
    }

    /// Canonical JSON bytes: vertices ascending by id, edges lexicographic,
    /// loops by (vertex, counter).
    pub fn canonical_bytes(&self) -> Vec<u8> {
        serde_json::to_vec_pretty(&GraphFile::from(self)).expect("graph serializes")
    }

    /// SHA-256 digest of the canonical encoding.
    pub fn digest(&self) -> [u8; 32] {
        Sha256::digest(self.canonical_bytes()).into()
    }

    pub fn to_json(&self) -> String {
        String::from_utf8(self.canonical_bytes()).expect("json is utf8")
    }

    pub fn from_json(text: &str) -> Result<Self, GraphError> {
        let file: GraphFile =
            serde_json::from_str(text).map_err(|e| GraphError::Schema(e.to_string()))?;
        file.try_into()
    }
}

/// Incremental construction with validation at `build`.
#[derive(Default)]
pub struct MultigraphBuilder {
    vertices: Vec<(VertexId, BTreeSet<Label>)>,
    links: Vec<(VertexId, VertexId, BTreeSet<Label>)>,
    loops: Vec<(VertexId, BTreeSet<Label>, Option<u32>)>,
    boundary: Vec<VertexId>,
}

impl MultigraphBuilder {
    pub fn vertex<V: Into<VertexId>>(mut self, id: V, labels: impl IntoIterator<Item = Label>) -> Self {
        self.vertices.push((id.into(), labels.into_iter().collect()));
        self
    }

    pub fn link<V: Into<VertexId>>(mut self, u: V, v: V, labels: impl IntoIterator<Item = Label>) -> Self {
        self.links.push((u.into(), v.into(), labels.into_iter().collect()));
        self
    }

    /// Adds a loop with the next free counter at the vertex.
    pub fn loop_at<V: Into<VertexId>>(mut self, v: V, labels: impl IntoIterator<Item = Label>) -> Self {
        self.loops.push((v.into(), labels.into_iter().collect(), None));
        self
    }

    fn loop_with_counter(mut self, v: VertexId, labels: BTreeSet<Label>, counter: u32) -> Self {
        self.loops.push((v, labels, Some(counter)));
        self
    }

    pub fn boundary<V: Into<VertexId>>(mut self, ids: impl IntoIterator<Item = V>) -> Self {
        self.boundary.extend(ids.into_iter().map(Into::into));
        self
    }

    pub fn build(self) -> Result<Multigraph, GraphError> {
        let mut vertices: BTreeMap<VertexId, BTreeSet<Label>> = BTreeMap::new();
        for (id, labels) in self.vertices {
            if vertices.insert(id.clone(), labels).is_some() {
                return Err(GraphError::DuplicateVertex(id.0));
            }
        }
        let mut links: BTreeMap<(VertexId, VertexId), BTreeSet<Label>> = BTreeMap::new();
        for (u, v, labels) in self.links {
            if u == v {
                return Err(GraphError::SelfEdge(u.0));
            }
            for e in [&u, &v] {
                if !vertices.contains_key(e) {
                    return Err(GraphError::UnknownVertex(e.0.clone()));
                }
            }
            let key = if u <= v { (u, v) } else { (v, u) };
            if links.insert(key.clone(), labels).is_some() {
                return Err(GraphError::DuplicateEdge(key.0 .0, key.1 .0));
            }
        }
        let mut loops: BTreeMap<VertexId, Vec<LoopInstance>> = BTreeMap::new();
        for (v, labels, counter) in self.loops {
            if !vertices.contains_key(&v) {
                return Err(GraphError::UnknownVertex(v.0));
            }
            let entry = loops.entry(v).or_default();
            let counter = counter.unwrap_or(entry.len() as u32 + 1);
            entry.push(LoopInstance { counter, labels });
        }
        for (v, instances) in &mut loops {
            instances.sort_by_key(|l| l.counter);
            let dense = instances
                .iter()
                .enumerate()
                .all(|(i, l)| l.counter == i as u32 + 1);
            if !dense {
                return Err(GraphError::BadLoopCounters(v.0.clone()));
            }
        }
        let mut boundary = BTreeSet::new();
        for b in self.boundary {
            if !vertices.contains_key(&b) {
                return Err(GraphError::UnknownBoundary(b.0));
            }
            boundary.insert(b);
        }
        Ok(Multigraph {
            vertices,
            links,
            loops,
            boundary,
        })
    }
}

/// One traversal step along a path. `from`/`to` record direction; the
/// underlying instance is `edge`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathStep {
    pub from: VertexId,
    pub to: VertexId,
    pub edge: EdgeRef,
}

/// A source-to-terminal walk: `real_length` genuine steps followed by
/// distinct loop instances at the terminal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Path {
    steps: Vec<PathStep>,
    real_length: usize,
}

impl Path {
    /// Validating constructor for paths assembled by hand.
    pub fn new(steps: Vec<PathStep>, real_length: usize, g: &Multigraph) -> Result<Self, GraphError> {
        let p = Path { steps, real_length };
        p.validate(g)?;
        Ok(p)
    }

    /// Constructor that skips validation, for building deliberately broken
    /// paths in adversarial tests.
    #[doc(hidden)]
    pub fn new_unchecked(steps: Vec<PathStep>, real_length: usize) -> Self {
        Path { steps, real_length }
    }

    /// A path whose first step is a loop at `v`: used when the source already
    /// is the vertex being proven toward, since the proof consumes at least
    /// one real first edge.
    pub fn loop_seed(g: &Multigraph, v: &VertexId) -> Result<Self, GraphError> {
        let first = g
            .loops_at(v)
            .first()
            .ok_or_else(|| GraphError::InsufficientLoops(v.0.clone(), 1))?;
        Ok(Path {
            steps: vec![PathStep {
                from: v.clone(),
                to: v.clone(),
                edge: EdgeRef::Loop(v.clone(), first.counter),
            }],
            real_length: 1,
        })
    }

    pub fn steps(&self) -> &[PathStep] {
        &self.steps
    }

    pub fn real_length(&self) -> usize {
        self.real_length
    }

    pub fn padded_length(&self) -> usize {
        self.steps.len()
    }

    pub fn source(&self) -> &VertexId {
        &self.steps[0].from
    }

    pub fn terminal(&self) -> &VertexId {
        &self.steps[self.real_length - 1].to
    }

    /// Checks every structural invariant against the graph.
    pub fn validate(&self, g: &Multigraph) -> Result<(), GraphError> {
        if self.real_length < 1 || self.real_length > self.steps.len() {
            return Err(GraphError::InvalidPath(format!(
                "real length {} out of range 1..={}",
                self.real_length,
                self.steps.len()
            )));
        }
        let mut seen = BTreeSet::new();
        for (i, step) in self.steps.iter().enumerate() {
            if !g.has_edge(&step.edge) {
                return Err(GraphError::InvalidPath(format!(
                    "step {i} uses missing edge {}",
                    step.edge
                )));
            }
            if !seen.insert(step.edge.clone()) {
                return Err(GraphError::InvalidPath(format!(
                    "edge instance {} reused",
                    step.edge
                )));
            }
            let endpoints_ok = match &step.edge {
                EdgeRef::Link(u, v) => {
                    (step.from == *u && step.to == *v) || (step.from == *v && step.to == *u)
                }
                EdgeRef::Loop(v, _) => step.from == *v && step.to == *v,
            };
            if !endpoints_ok {
                return Err(GraphError::InvalidPath(format!(
                    "step {i} direction does not match edge {}",
                    step.edge
                )));
            }
            if i > 0 && self.steps[i - 1].to != step.from {
                return Err(GraphError::InvalidPath(format!(
                    "steps {} and {i} do not share a vertex",
                    i - 1
                )));
            }
        }
        let terminal = self.terminal().clone();
        for (i, step) in self.steps.iter().enumerate().skip(self.real_length) {
            match &step.edge {
                EdgeRef::Loop(v, _) if *v == terminal => {}
                _ => {
                    return Err(GraphError::InvalidPath(format!(
                        "padding step {i} is not a loop at the terminal"
                    )))
                }
            }
        }
        Ok(())
    }
}

/// Extends a path to exactly `target` steps with unused loop instances at
/// the terminal.
pub fn pad_path(path: &Path, g: &Multigraph, target: usize) -> Result<Path, GraphError> {
    path.validate(g)?;
    if path.padded_length() > target {
        return Err(GraphError::PathTooLong {
            path: path.padded_length(),
            target,
        });
    }
    let terminal = path.terminal().clone();
    let used: BTreeSet<&EdgeRef> = path.steps.iter().map(|s| &s.edge).collect();
    let mut free = g
        .loops_at(&terminal)
        .iter()
        .map(|l| EdgeRef::Loop(terminal.clone(), l.counter))
        .filter(|e| !used.contains(e));
    let mut steps = path.steps.clone();
    let needed = target - steps.len();
    for _ in 0..needed {
        let edge = free
            .next()
            .ok_or_else(|| GraphError::InsufficientLoops(terminal.0.clone(), needed))?;
        steps.push(PathStep {
            from: terminal.clone(),
            to: terminal.clone(),
            edge,
        });
    }
    Ok(Path {
        steps,
        real_length: path.real_length,
    })
}

/// Builds a walk from `from` to `to` padded to exactly `target` steps.
///
/// Padding loops attach to whichever endpoint carries them: appended at the
/// terminal when possible, otherwise the walk is computed in reverse, padded
/// at `from`, and flipped so the loops lead the walk. When `from == to`,
/// a loop serves as the mandatory first edge.
pub fn padded_route(
    g: &Multigraph,
    from: &VertexId,
    to: &VertexId,
    target: usize,
) -> Result<Path, GraphError> {
    let base = if from == to {
        Path::loop_seed(g, from)?
    } else {
        g.shortest_path(from, to)?
            .ok_or_else(|| GraphError::UnreachableBoundary(to.0.clone(), from.0.clone()))?
    };
    if base.padded_length() > target {
        return Err(GraphError::PathTooLong {
            path: base.padded_length(),
            target,
        });
    }
    match pad_path(&base, g, target) {
        Err(GraphError::InsufficientLoops(..)) if from != to => {
            let walked = g
                .shortest_path(to, from)?
                .expect("reverse of a connected pair");
            let padded = pad_path(&walked, g, target)?;
            let steps = padded
                .steps()
                .iter()
                .rev()
                .map(|s| PathStep {
                    from: s.to.clone(),
                    to: s.from.clone(),
                    edge: s.edge.clone(),
                })
                .collect::<Vec<_>>();
            // Loops lead the reversed walk, so every step counts as real.
            let real = steps.len();
            Path::new(steps, real, g)
        }
        other => other,
    }
}

// --- file schema ------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct VertexRecord {
    id: String,
    #[serde(default)]
    labels: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct EdgeRecord {
    u: String,
    v: String,
    #[serde(default)]
    labels: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct LoopRecord {
    v: String,
    #[serde(default)]
    labels: Vec<String>,
    counter: u32,
}

/// On-disk graph document. See `docs/graph-format.md` for the schema.
#[derive(Serialize, Deserialize)]
struct GraphFile {
    vertices: Vec<VertexRecord>,
    #[serde(default)]
    edges: Vec<EdgeRecord>,
    #[serde(default)]
    loops: Vec<LoopRecord>,
    boundary: Vec<String>,
}

impl From<&Multigraph> for GraphFile {
    fn from(g: &Multigraph) -> Self {
        GraphFile {
            vertices: g
                .vertices
                .iter()
                .map(|(id, labels)| VertexRecord {
                    id: id.0.clone(),
                    labels: labels.iter().map(|l| l.0.clone()).collect(),
                })
                .collect(),
            edges: g
                .links
                .iter()
                .map(|((u, v), labels)| EdgeRecord {
                    u: u.0.clone(),
                    v: v.0.clone(),
                    labels: labels.iter().map(|l| l.0.clone()).collect(),
                })
                .collect(),
            loops: g
                .loops()
                .map(|(v, l)| LoopRecord {
                    v: v.0.clone(),
                    labels: l.labels.iter().map(|x| x.0.clone()).collect(),
                    counter: l.counter,
                })
                .collect(),
            boundary: g.boundary.iter().map(|b| b.0.clone()).collect(),
        }
    }
}

impl TryFrom<GraphFile> for Multigraph {
    type Error = GraphError;

    fn try_from(file: GraphFile) -> Result<Self, GraphError> {
        let mut b = Multigraph::builder();
        for v in file.vertices {
            b = b.vertex(
                VertexId(v.id),
                v.labels.into_iter().map(Label),
            );
        }
        for e in file.edges {
            b = b.link(
                VertexId(e.u),
                VertexId(e.v),
                e.labels.into_iter().map(Label),
            );
        }
        for l in file.loops {
            b = b.loop_with_counter(
                VertexId(l.v),
                l.labels.into_iter().map(Label).collect(),
                l.counter,
            );
        }
        b = b.boundary(file.boundary.into_iter().map(VertexId));
        b.build()
    }
}
