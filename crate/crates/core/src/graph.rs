//! Mixed graphs, orientations, reachability and the two reachability objectives.

use fixedbitset::FixedBitSet;
use thiserror::Error;

/// Objective values. Weights are `u64` with a `u64` total, so every score
/// is below `2^128` and fits without overflow.
pub type Score = u128;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex {v} out of range (n = {n})")]
    VertexOutOfRange { v: usize, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("weight vector has {got} entries, expected {expected}")]
    WeightLength { got: usize, expected: usize },
    #[error("total weight does not fit in 64 bits")]
    WeightOverflow,
    #[error("orientation has {got} directions but the graph has {expected} edges")]
    OrientationLength { got: usize, expected: usize },
    #[error("vertex set to contract is empty")]
    EmptySet,
}

/// A graph with undirected edges and directed arcs. Both are multisets;
/// edge `i` keeps its index and endpoint order for the lifetime of the value.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MixedGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
    arcs: Vec<(usize, usize)>,
}

impl MixedGraph {
    pub fn new(
        n: usize,
        edges: Vec<(usize, usize)>,
        arcs: Vec<(usize, usize)>,
    ) -> Result<Self, GraphError> {
        for &(u, v) in edges.iter().chain(arcs.iter()) {
            for x in [u, v] {
                if x >= n {
                    return Err(GraphError::VertexOutOfRange { v: x, n });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
        }
        Ok(MixedGraph { n, edges, arcs })
    }

    /// A digraph is a mixed graph without edges.
    pub fn digraph(n: usize, arcs: Vec<(usize, usize)>) -> Result<Self, GraphError> {
        Self::new(n, Vec::new(), arcs)
    }

    pub(crate) fn from_parts(n: usize, edges: Vec<(usize, usize)>, arcs: Vec<(usize, usize)>) -> Self {
        debug_assert!(Self::new(n, edges.clone(), arcs.clone()).is_ok());
        MixedGraph { n, edges, arcs }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn arcs(&self) -> &[(usize, usize)] {
        &self.arcs
    }

    /// Number of arcs, the parameter the solvers are exponential in.
    pub fn k(&self) -> usize {
        self.arcs.len()
    }

    pub fn is_digraph(&self) -> bool {
        self.edges.is_empty()
    }

    /// The same graph with every arc reversed.
    pub fn reversed(&self) -> MixedGraph {
        MixedGraph {
            n: self.n,
            edges: self.edges.clone(),
            arcs: self.arcs.iter().map(|&(u, v)| (v, u)).collect(),
        }
    }

    /// Out-adjacency where each edge is a digon.
    pub fn digon_adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(u, v) in &self.arcs {
            adj[u].push(v);
        }
        for &(u, v) in &self.edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        adj
    }

    /// Underlying undirected multigraph: edges first (ids `0..m`), then arcs
    /// (ids `m..m+k`), both as undirected links.
    pub fn underlying(&self) -> MixedGraph {
        let mut edges = self.edges.clone();
        edges.extend_from_slice(&self.arcs);
        MixedGraph { n: self.n, edges, arcs: Vec::new() }
    }

    /// Total degree in the underlying graph.
    pub fn ug_degree(&self, v: usize) -> usize {
        self.edges
            .iter()
            .chain(self.arcs.iter())
            .map(|&(a, b)| (a == v) as usize + (b == v) as usize)
            .sum()
    }

    pub fn out_arcs(&self, v: usize) -> usize {
        self.arcs.iter().filter(|a| a.0 == v).count()
    }

    pub fn in_arcs(&self, v: usize) -> usize {
        self.arcs.iter().filter(|a| a.1 == v).count()
    }

    /// Is the underlying graph connected? The empty graph counts as connected.
    pub fn is_connected(&self) -> bool {
        let mut dsu = Dsu::new(self.n);
        for &(u, v) in self.edges.iter().chain(self.arcs.iter()) {
            dsu.union(u, v);
        }
        (1..self.n).all(|v| dsu.find(v) == dsu.find(0))
    }

    /// Subgraph induced by `vertices` (in the given order, which becomes the
    /// local numbering). Returns the graph and, for each local edge, the index
    /// of the edge it came from.
    pub fn induced(&self, vertices: &[usize]) -> (MixedGraph, Vec<usize>) {
        let mut local = vec![usize::MAX; self.n];
        for (i, &v) in vertices.iter().enumerate() {
            local[v] = i;
        }
        let mut edges = Vec::new();
        let mut origin = Vec::new();
        for (i, &(u, v)) in self.edges.iter().enumerate() {
            if local[u] != usize::MAX && local[v] != usize::MAX {
                edges.push((local[u], local[v]));
                origin.push(i);
            }
        }
        let arcs = self
            .arcs
            .iter()
            .filter(|&&(u, v)| local[u] != usize::MAX && local[v] != usize::MAX)
            .map(|&(u, v)| (local[u], local[v]))
            .collect();
        (MixedGraph { n: vertices.len(), edges, arcs }, origin)
    }
}

/// A direction for every edge of a mixed graph: `true` orients edge
/// `(a, b)` as `a -> b`, `false` as `b -> a`. Arcs are untouched.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Orientation {
    pub forward: Vec<bool>,
}

impl Orientation {
    pub fn new(forward: Vec<bool>) -> Self {
        Orientation { forward }
    }

    pub fn all_forward(g: &MixedGraph) -> Self {
        Orientation { forward: vec![true; g.edges.len()] }
    }

    pub fn check(&self, g: &MixedGraph) -> Result<(), GraphError> {
        if self.forward.len() != g.edges.len() {
            return Err(GraphError::OrientationLength {
                got: self.forward.len(),
                expected: g.edges.len(),
            });
        }
        Ok(())
    }

    /// The arc that edge `e` becomes.
    pub fn arc(&self, g: &MixedGraph, e: usize) -> (usize, usize) {
        let (a, b) = g.edges[e];
        if self.forward[e] {
            (a, b)
        } else {
            (b, a)
        }
    }

    /// Induced digraph: the original arcs followed by the oriented edges.
    pub fn apply(&self, g: &MixedGraph) -> MixedGraph {
        assert_eq!(self.forward.len(), g.edges.len(), "orientation length mismatch");
        let mut arcs = g.arcs.clone();
        arcs.extend((0..g.edges.len()).map(|e| self.arc(g, e)));
        MixedGraph { n: g.n, edges: Vec::new(), arcs }
    }

    /// Re-orient the listed edges to the given directions.
    pub fn splice_edges(&mut self, edges: &[usize], forward: &[bool]) {
        for (&e, &f) in edges.iter().zip(forward) {
            self.forward[e] = f;
        }
    }
}

/// Nonnegative vertex weights with a cached total.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WeightFn {
    weights: Vec<u64>,
    total: u64,
}

impl WeightFn {
    pub fn new(weights: Vec<u64>) -> Result<Self, GraphError> {
        let mut total: u64 = 0;
        for &w in &weights {
            total = total.checked_add(w).ok_or(GraphError::WeightOverflow)?;
        }
        Ok(WeightFn { weights, total })
    }

    pub fn unit(n: usize) -> Self {
        WeightFn { weights: vec![1; n], total: n as u64 }
    }

    pub fn get(&self, v: usize) -> u64 {
        self.weights[v]
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// `|w|`.
    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn is_unit(&self) -> bool {
        self.weights.iter().all(|&w| w == 1)
    }

    /// Size measure `|V| + |w|` used for scaling arguments.
    pub fn size_measure(&self) -> u128 {
        self.weights.len() as u128 + self.total as u128
    }

    pub fn sum_of(&self, vertices: impl IntoIterator<Item = usize>) -> u64 {
        vertices.into_iter().map(|v| self.weights[v]).sum()
    }
}

/// A mixed graph with vertex weights.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedInstance {
    pub graph: MixedGraph,
    pub w: WeightFn,
    /// Set when the graph has no mixed cycle.
    pub acyclic: bool,
}

impl WeightedInstance {
    pub fn new(graph: MixedGraph, w: WeightFn) -> Result<Self, GraphError> {
        if w.len() != graph.n() {
            return Err(GraphError::WeightLength { got: w.len(), expected: graph.n() });
        }
        let acyclic = !mixed_cycle_exists(&graph);
        Ok(WeightedInstance { graph, w, acyclic })
    }

    pub fn unit(graph: MixedGraph) -> Self {
        let w = WeightFn::unit(graph.n());
        Self::new(graph, w).expect("unit weights always match")
    }
}

/// Reflexive-transitive reachability relation.
#[derive(Clone, Debug)]
pub struct ReachMatrix {
    rows: Vec<FixedBitSet>,
}

impl ReachMatrix {
    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn reaches(&self, u: usize, v: usize) -> bool {
        self.rows[u].contains(v)
    }

    pub fn row(&self, u: usize) -> &FixedBitSet {
        &self.rows[u]
    }

    /// Number of ordered pairs `(u, v)`, `u != v`, with `v` reachable from `u`.
    pub fn pair_count(&self) -> u128 {
        self.rows.iter().map(|r| r.count_ones(..) as u128 - 1).sum()
    }
}

/// Strongly connected components by iterative Tarjan. Component ids are
/// assigned in completion order, so every arc leaving a component points to
/// a component with a smaller id.
pub(crate) fn tarjan(adj: &[Vec<usize>]) -> (Vec<usize>, usize) {
    let n = adj.len();
    const UNSEEN: usize = usize::MAX;
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0; n];
    let mut comp = vec![UNSEEN; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut call: Vec<(usize, usize)> = Vec::new();
    let mut next_index = 0;
    let mut count = 0;
    for root in 0..n {
        if index[root] != UNSEEN {
            continue;
        }
        call.push((root, 0));
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut pos)) = call.last_mut() {
            if *pos < adj[v].len() {
                let u = adj[v][*pos];
                *pos += 1;
                if index[u] == UNSEEN {
                    index[u] = next_index;
                    low[u] = next_index;
                    next_index += 1;
                    stack.push(u);
                    on_stack[u] = true;
                    call.push((u, 0));
                } else if on_stack[u] {
                    low[v] = low[v].min(index[u]);
                }
            } else {
                call.pop();
                if let Some(&(p, _)) = call.last() {
                    low[p] = low[p].min(low[v]);
                }
                if low[v] == index[v] {
                    loop {
                        let x = stack.pop().expect("tarjan stack");
                        on_stack[x] = false;
                        comp[x] = count;
                        if x == v {
                            break;
                        }
                    }
                    count += 1;
                }
            }
        }
    }
    (comp, count)
}

/// SCCs plus, per component, the set of vertices it reaches.
pub(crate) struct Condensation {
    pub comp: Vec<usize>,
    pub members: Vec<Vec<usize>>,
    pub reach: Vec<FixedBitSet>,
}

pub(crate) fn condense(adj: &[Vec<usize>]) -> Condensation {
    let n = adj.len();
    let (comp, count) = tarjan(adj);
    let mut members = vec![Vec::new(); count];
    for v in 0..n {
        members[comp[v]].push(v);
    }
    let mut reach: Vec<FixedBitSet> = Vec::with_capacity(count);
    for c in 0..count {
        let mut bits = FixedBitSet::with_capacity(n);
        for &v in &members[c] {
            bits.insert(v);
        }
        for &v in &members[c] {
            for &u in &adj[v] {
                let cu = comp[u];
                if cu != c {
                    bits.union_with(&reach[cu]);
                }
            }
        }
        reach.push(bits);
    }
    Condensation { comp, members, reach }
}

fn weighted_from_condensation(cond: &Condensation, w: &[u64], total: u64) -> Score {
    let mut sum: u128 = 0;
    for (c, members) in cond.members.iter().enumerate() {
        let wc: u128 = members.iter().map(|&v| w[v] as u128).sum();
        if wc == 0 {
            continue;
        }
        let out: u128 = cond.reach[c].ones().map(|v| w[v] as u128).sum();
        sum += wc * out;
    }
    sum - total as u128
}

fn unit_from_condensation(cond: &Condensation) -> Score {
    cond.members
        .iter()
        .zip(&cond.reach)
        .map(|(m, r)| m.len() as u128 * r.count_ones(..) as u128)
        .sum::<u128>()
        - cond.comp.len() as u128
}

/// Reachability where each edge can be traversed in either direction
/// (mixed reachability); for a digraph this is the ordinary closure.
pub fn reach_closure(g: &MixedGraph) -> ReachMatrix {
    let cond = condense(&g.digon_adjacency());
    let rows = (0..g.n).map(|v| cond.reach[cond.comp[v]].clone()).collect();
    ReachMatrix { rows }
}

/// `R(D)`: ordered pairs of distinct vertices with the second reachable from
/// the first. Edges of a mixed graph count as traversable both ways.
pub fn score(g: &MixedGraph) -> Score {
    unit_from_condensation(&condense(&g.digon_adjacency()))
}

/// `R(D, w) = 2 sum C(w(v), 2) + sum_{u != v reachable} w(u) w(v)`.
///
/// Computed as `sum_u w(u) w(Out(u)) - |w|`, one term per strong component.
pub fn score_weighted(g: &MixedGraph, w: &WeightFn) -> Score {
    assert_eq!(w.len(), g.n, "weight length mismatch");
    weighted_from_condensation(&condense(&g.digon_adjacency()), &w.weights, w.total)
}

/// Weighted score of `g` under orientation `o` without materializing the digraph.
pub fn score_oriented(g: &MixedGraph, o: &Orientation, w: &WeightFn) -> Score {
    let mut adj = vec![Vec::new(); g.n];
    for &(u, v) in &g.arcs {
        adj[u].push(v);
    }
    for e in 0..g.edges.len() {
        let (u, v) = o.arc(g, e);
        adj[u].push(v);
    }
    weighted_from_condensation(&condense(&adj), &w.weights, w.total)
}

/// Weighted score of a partial orientation: edges with `None` stay
/// undirected, so the value upper-bounds every completion.
pub fn score_partial(g: &MixedGraph, dirs: &[Option<bool>], w: &WeightFn) -> Score {
    let mut adj = vec![Vec::new(); g.n];
    for &(u, v) in &g.arcs {
        adj[u].push(v);
    }
    for (e, &(a, b)) in g.edges.iter().enumerate() {
        match dirs[e] {
            Some(true) => adj[a].push(b),
            Some(false) => adj[b].push(a),
            None => {
                adj[a].push(b);
                adj[b].push(a);
            }
        }
    }
    weighted_from_condensation(&condense(&adj), &w.weights, w.total)
}

/// Strongly connected components, each sorted, listed by smallest member.
/// Edges count as digons.
pub fn scc(g: &MixedGraph) -> Vec<Vec<usize>> {
    let cond = condense(&g.digon_adjacency());
    let mut parts = cond.members;
    for p in &mut parts {
        p.sort_unstable();
    }
    parts.sort_unstable_by_key(|p| p[0]);
    parts
}

/// `(In(v), Out(v))`, both containing `v`, sorted.
pub fn in_out_sets(g: &MixedGraph, v: usize) -> (Vec<usize>, Vec<usize>) {
    let adj = g.digon_adjacency();
    let mut radj = vec![Vec::new(); g.n];
    for (u, list) in adj.iter().enumerate() {
        for &x in list {
            radj[x].push(u);
        }
    }
    (bfs(&radj, v), bfs(&adj, v))
}

fn bfs(adj: &[Vec<usize>], start: usize) -> Vec<usize> {
    let mut seen = vec![false; adj.len()];
    seen[start] = true;
    let mut queue = std::collections::VecDeque::from([start]);
    while let Some(v) = queue.pop_front() {
        for &u in &adj[v] {
            if !seen[u] {
                seen[u] = true;
                queue.push_back(u);
            }
        }
    }
    (0..adj.len()).filter(|&v| seen[v]).collect()
}

pub(crate) struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    pub fn new(n: usize) -> Self {
        Dsu { parent: (0..n).collect() }
    }

    pub fn find(&mut self, mut v: usize) -> usize {
        while self.parent[v] != v {
            self.parent[v] = self.parent[self.parent[v]];
            v = self.parent[v];
        }
        v
    }

    /// Returns false if already joined.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        true
    }
}

/// Does some orientation of `g` contain a directed cycle?
///
/// True iff the undirected part has a cycle (parallel edges included), or the
/// arcs form a cycle once every undirected component is shrunk to a point.
pub fn mixed_cycle_exists(g: &MixedGraph) -> bool {
    let mut dsu = Dsu::new(g.n);
    for &(u, v) in &g.edges {
        if !dsu.union(u, v) {
            return true;
        }
    }
    let mut adj = vec![Vec::new(); g.n];
    for &(u, v) in &g.arcs {
        let (cu, cv) = (dsu.find(u), dsu.find(v));
        if cu == cv {
            return true;
        }
        adj[cu].push(cv);
    }
    let (_, count) = tarjan(&adj);
    count < g.n
}

/// One connected component of `G - A(G)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Component {
    /// Sorted vertex ids.
    pub vertices: Vec<usize>,
    /// Sorted edge indices.
    pub edges: Vec<usize>,
}

impl Component {
    pub fn is_tree(&self) -> bool {
        self.edges.len() + 1 == self.vertices.len()
    }
}

/// Components of the graph with all arcs deleted, ordered by smallest vertex.
pub fn undirected_components(g: &MixedGraph) -> Vec<Component> {
    let mut dsu = Dsu::new(g.n);
    for &(u, v) in &g.edges {
        dsu.union(u, v);
    }
    let mut slot = vec![usize::MAX; g.n];
    let mut comps: Vec<Component> = Vec::new();
    for v in 0..g.n {
        let r = dsu.find(v);
        if slot[r] == usize::MAX {
            slot[r] = comps.len();
            comps.push(Component { vertices: Vec::new(), edges: Vec::new() });
        }
        comps[slot[r]].vertices.push(v);
    }
    for (e, &(u, _)) in g.edges.iter().enumerate() {
        let r = dsu.find(u);
        comps[slot[r]].edges.push(e);
    }
    comps
}

/// Result of shrinking a vertex set to a single vertex.
#[derive(Clone, Debug)]
pub struct Contracted {
    pub graph: MixedGraph,
    pub w: WeightFn,
    /// Old vertex -> new vertex.
    pub vertex_map: Vec<usize>,
    /// Old edge -> new edge; `None` for edges inside the contracted set.
    pub edge_map: Vec<Option<usize>>,
}

/// Contract `x` into one vertex whose weight is `w(x)`. Edges and arcs with
/// both ends in `x` disappear; the others are rerouted to the new vertex.
/// Surviving vertices keep their relative order and the new vertex takes the
/// slot of the smallest member of `x`.
pub fn contract_set(g: &MixedGraph, w: &WeightFn, x: &[usize]) -> Result<Contracted, GraphError> {
    if x.is_empty() {
        return Err(GraphError::EmptySet);
    }
    let mut in_x = vec![false; g.n];
    for &v in x {
        if v >= g.n {
            return Err(GraphError::VertexOutOfRange { v, n: g.n });
        }
        in_x[v] = true;
    }
    let mut vertex_map = vec![0; g.n];
    let mut merged = None;
    let mut next = 0;
    for v in 0..g.n {
        if in_x[v] {
            let id = *merged.get_or_insert_with(|| {
                next += 1;
                next - 1
            });
            vertex_map[v] = id;
        } else {
            vertex_map[v] = next;
            next += 1;
        }
    }
    let mut weights = vec![0u64; next];
    for v in 0..g.n {
        weights[vertex_map[v]] += w.get(v);
    }
    let mut edges = Vec::new();
    let mut edge_map = Vec::with_capacity(g.edges.len());
    for &(u, v) in &g.edges {
        if in_x[u] && in_x[v] {
            edge_map.push(None);
        } else {
            edge_map.push(Some(edges.len()));
            edges.push((vertex_map[u], vertex_map[v]));
        }
    }
    let arcs = g
        .arcs
        .iter()
        .filter(|&&(u, v)| !(in_x[u] && in_x[v]))
        .map(|&(u, v)| (vertex_map[u], vertex_map[v]))
        .collect();
    Ok(Contracted {
        graph: MixedGraph { n: next, edges, arcs },
        w: WeightFn { weights, total: w.total },
        vertex_map,
        edge_map,
    })
}

/// `D1<D2>`: every arc of `d1` whose endpoints both lie in the image of
/// `cover` takes the direction of the matching arc of `d2` (vertex `i` of
/// `d2` is vertex `cover[i]` of `d1`). Parallel arcs are matched as a multiset.
pub fn splice(d1: &MixedGraph, d2: &MixedGraph, cover: &[usize]) -> MixedGraph {
    assert_eq!(cover.len(), d2.n, "cover must name every vertex of d2");
    let mut pool: std::collections::HashMap<(usize, usize), Vec<(usize, usize)>> =
        std::collections::HashMap::new();
    for &(u, v) in d2.arcs.iter().rev() {
        let (a, b) = (cover[u], cover[v]);
        pool.entry((a.min(b), a.max(b))).or_default().push((a, b));
    }
    let arcs = d1
        .arcs
        .iter()
        .map(|&(u, v)| match pool.get_mut(&(u.min(v), u.max(v))).and_then(|p| p.pop()) {
            Some(arc) => arc,
            None => (u, v),
        })
        .collect();
    MixedGraph { n: d1.n, edges: d1.edges.clone(), arcs }
}
