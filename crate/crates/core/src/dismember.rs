//! Dismembering sets: few tree edges whose orientation, once fixed, leaves
//! every undirected component touching the arcs in a very limited way.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::graph::{undirected_components, Dsu, MixedGraph, WeightFn, WeightedInstance};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DismemberError {
    #[error("expected a tree (connected, no arcs, |E| = |V| - 1)")]
    NotATree,
    #[error("a component of the graph minus the removed edges contains a cycle")]
    NotAForest,
    #[error("vertex {0} out of range")]
    VertexOutOfRange(usize),
    #[error("edge index {0} out of range")]
    EdgeOutOfRange(usize),
    #[error("dismembering set has {size} edges, more than the cap of {cap}")]
    CapExceeded { size: usize, cap: usize },
}

/// A dismembering set split by origin: edges at branch vertices of the
/// pruned tree, and the remaining pruned-tree edges at marked vertices.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DismemberingSet {
    pub branch: Vec<usize>,
    pub terminal: Vec<usize>,
}

impl DismemberingSet {
    /// All edges, sorted.
    pub fn edges(&self) -> Vec<usize> {
        let mut all: Vec<usize> = self.branch.iter().chain(&self.terminal).copied().collect();
        all.sort_unstable();
        all
    }

    pub fn len(&self) -> usize {
        self.branch.len() + self.terminal.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn check_tree(t: &MixedGraph) -> Result<(), DismemberError> {
    if !t.arcs().is_empty() || t.edges().len() + 1 != t.n().max(1) || !t.is_connected() {
        return Err(DismemberError::NotATree);
    }
    Ok(())
}

fn degrees(n: usize, edges: &[(usize, usize)], alive: impl Fn(usize) -> bool) -> Vec<usize> {
    let mut deg = vec![0; n];
    for (i, &(u, v)) in edges.iter().enumerate() {
        if alive(i) {
            deg[u] += 1;
            deg[v] += 1;
        }
    }
    deg
}

/// Edges at a leaf, and edges at a vertex of degree at least 3, of a tree.
/// Always `|branch| <= 3 |leaf|`.
pub fn leaf_and_branch_edges(t: &MixedGraph) -> Result<(Vec<usize>, Vec<usize>), DismemberError> {
    check_tree(t)?;
    Ok(leaf_and_branch_of(t.n(), t.edges(), |_| true))
}

fn leaf_and_branch_of(
    n: usize,
    edges: &[(usize, usize)],
    alive: impl Fn(usize) -> bool + Copy,
) -> (Vec<usize>, Vec<usize>) {
    let deg = degrees(n, edges, alive);
    let live = (0..edges.len()).filter(|&i| alive(i));
    let mut leaf = Vec::new();
    let mut branch = Vec::new();
    for i in live {
        let (u, v) = edges[i];
        if deg[u] == 1 || deg[v] == 1 {
            leaf.push(i);
        }
        if deg[u] >= 3 || deg[v] >= 3 {
            branch.push(i);
        }
    }
    (leaf, branch)
}

/// Dismembering set for a tree and marked vertices `x`.
///
/// Unmarked leaves are pruned (smallest id first) until every leaf is
/// marked. Then the set is: every remaining edge at a vertex of degree >= 3,
/// plus every other remaining edge at a marked vertex. Sizes are bounded by
/// `3|x|` and `2|x|` respectively (asserted).
pub fn tree_dismembering(t: &MixedGraph, x: &[usize]) -> Result<DismemberingSet, DismemberError> {
    check_tree(t)?;
    let n = t.n();
    let mut marked = vec![false; n];
    for &v in x {
        if v >= n {
            return Err(DismemberError::VertexOutOfRange(v));
        }
        marked[v] = true;
    }
    let set = dismember_tree_edges(n, t.edges(), &marked);
    let xs = marked.iter().filter(|&&m| m).count();
    assert!(set.branch.len() <= 3 * xs, "branch edges exceed 3|X|");
    assert!(set.terminal.len() <= 2 * xs, "terminal edges exceed 2|X|");
    Ok(set)
}

/// Core of `tree_dismembering` on an edge list that is known to be a tree.
fn dismember_tree_edges(n: usize, edges: &[(usize, usize)], marked: &[bool]) -> DismemberingSet {
    let mut incident = vec![Vec::new(); n];
    for (i, &(u, v)) in edges.iter().enumerate() {
        incident[u].push(i);
        incident[v].push(i);
    }
    let mut deg: Vec<usize> = incident.iter().map(Vec::len).collect();
    let mut alive_edge = vec![true; edges.len()];
    let mut leaves: BTreeSet<usize> = (0..n).filter(|&v| deg[v] == 1 && !marked[v]).collect();
    while let Some(v) = leaves.pop_first() {
        if deg[v] != 1 {
            continue;
        }
        let e = incident[v].iter().copied().find(|&e| alive_edge[e]).expect("leaf edge");
        alive_edge[e] = false;
        deg[v] = 0;
        let (a, b) = edges[e];
        let u = if a == v { b } else { a };
        deg[u] -= 1;
        if deg[u] == 1 && !marked[u] {
            leaves.insert(u);
        }
    }
    let (_, branch) = leaf_and_branch_of(n, edges, |i| alive_edge[i]);
    let in_branch: BTreeSet<usize> = branch.iter().copied().collect();
    let terminal = (0..edges.len())
        .filter(|&i| alive_edge[i] && !in_branch.contains(&i))
        .filter(|&i| marked[edges[i].0] || marked[edges[i].1])
        .collect();
    DismemberingSet { branch, terminal }
}

/// Certificate, recomputed from scratch: after deleting `f`, every component
/// holds at most one vertex of `x` or of an `f`-edge, or it holds no vertex
/// of `x` and exactly two `f`-endpoints, each on exactly one `f`-edge.
pub fn is_dismembering(n: usize, edges: &[(usize, usize)], x: &[usize], f: &[usize]) -> bool {
    let mut removed = vec![false; edges.len()];
    let mut f_deg = vec![0usize; n];
    for &i in f {
        removed[i] = true;
        f_deg[edges[i].0] += 1;
        f_deg[edges[i].1] += 1;
    }
    let mut marked = vec![false; n];
    for &v in x {
        marked[v] = true;
    }
    let mut dsu = Dsu::new(n);
    for (i, &(u, v)) in edges.iter().enumerate() {
        if !removed[i] {
            dsu.union(u, v);
        }
    }
    let mut special: Vec<Vec<usize>> = vec![Vec::new(); n];
    for v in 0..n {
        if marked[v] || f_deg[v] > 0 {
            special[dsu.find(v)].push(v);
        }
    }
    special.iter().all(|s| {
        s.len() <= 1 || (s.len() == 2 && s.iter().all(|&v| !marked[v] && f_deg[v] == 1))
    })
}

/// Dismembering set for `(G - f0, V(f0))` where `G` is the undirected graph
/// on the edges of `g` (arcs ignored). Each component of `G - f0` must be a
/// tree; its marked vertices are the `f0` endpoints inside it. `|F| <= 10|f0|`.
pub fn forest_dismembering(g: &MixedGraph, f0: &[usize]) -> Result<Vec<usize>, DismemberError> {
    let m = g.edges().len();
    let mut in_f0 = vec![false; m];
    for &i in f0 {
        if i >= m {
            return Err(DismemberError::EdgeOutOfRange(i));
        }
        in_f0[i] = true;
    }
    let rest: Vec<usize> = (0..m).filter(|&i| !in_f0[i]).collect();
    let forest = MixedGraph::new(g.n(), rest.iter().map(|&i| g.edges()[i]).collect(), vec![])
        .expect("subgraph of a valid graph");
    let mut marked = vec![false; g.n()];
    for &i in f0 {
        let (u, v) = g.edges()[i];
        marked[u] = true;
        marked[v] = true;
    }
    let mut out = Vec::new();
    for comp in undirected_components(&forest) {
        if !comp.is_tree() {
            return Err(DismemberError::NotAForest);
        }
        let mut local = std::collections::HashMap::new();
        for (i, &v) in comp.vertices.iter().enumerate() {
            local.insert(v, i);
        }
        let tree_edges: Vec<(usize, usize)> = comp
            .edges
            .iter()
            .map(|&e| {
                let (u, v) = forest.edges()[e];
                (local[&u], local[&v])
            })
            .collect();
        let tree_marks: Vec<bool> = comp.vertices.iter().map(|&v| marked[v]).collect();
        let set = dismember_tree_edges(comp.vertices.len(), &tree_edges, &tree_marks);
        out.extend(set.edges().into_iter().map(|e| rest[comp.edges[e]]));
    }
    out.sort_unstable();
    assert!(out.len() <= 10 * f0.len(), "dismembering set exceeds 10|F0|");
    Ok(out)
}

/// Does every undirected component touch the arcs in at most one vertex, or
/// in exactly two vertices that each carry exactly one arc?
pub fn is_dismembered(wi: &WeightedInstance) -> bool {
    let g = &wi.graph;
    let mut arc_deg = vec![0usize; g.n()];
    for &(u, v) in g.arcs() {
        arc_deg[u] += 1;
        arc_deg[v] += 1;
    }
    undirected_components(g).iter().all(|c| {
        let touching: Vec<usize> = c.vertices.iter().copied().filter(|&v| arc_deg[v] > 0).collect();
        touching.len() <= 1 || (touching.len() == 2 && touching.iter().all(|&v| arc_deg[v] == 1))
    })
}

/// One partial orientation: the edges of the dismembering set turned into
/// arcs in one of the `2^|F|` ways.
#[derive(Clone, Debug)]
pub struct Member {
    pub instance: WeightedInstance,
    /// Member edge -> edge of the source instance.
    pub edge_origin: Vec<usize>,
    /// Fixed edges of the source instance with their chosen direction.
    pub fixed: Vec<(usize, bool)>,
}

/// All partial orientations of a dismembering set for `(UG(G) - A, V(A))`.
#[derive(Clone, Debug)]
pub struct Dismemberment {
    source: WeightedInstance,
    /// Edges of the source instance that get fixed.
    pub fixed_edges: Vec<usize>,
}

impl Dismemberment {
    pub fn len(&self) -> usize {
        1usize << self.fixed_edges.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Member `mask`: bit `i` set means fixed edge `i` is oriented backward.
    pub fn member(&self, mask: usize) -> Member {
        let g = &self.source.graph;
        let mut is_fixed = vec![false; g.edges().len()];
        for &e in &self.fixed_edges {
            is_fixed[e] = true;
        }
        let edge_origin: Vec<usize> = (0..g.edges().len()).filter(|&e| !is_fixed[e]).collect();
        let edges = edge_origin.iter().map(|&e| g.edges()[e]).collect();
        let mut arcs = g.arcs().to_vec();
        let mut fixed = Vec::with_capacity(self.fixed_edges.len());
        for (i, &e) in self.fixed_edges.iter().enumerate() {
            let forward = mask >> i & 1 == 0;
            let (a, b) = g.edges()[e];
            arcs.push(if forward { (a, b) } else { (b, a) });
            fixed.push((e, forward));
        }
        let graph = MixedGraph::from_parts(g.n(), edges, arcs);
        let instance = WeightedInstance::new(graph, self.source.w.clone()).expect("same vertices");
        Member { instance, edge_origin, fixed }
    }

    pub fn members(&self) -> impl Iterator<Item = Member> + '_ {
        (0..self.len()).map(move |mask| self.member(mask))
    }
}

/// Dismembering set of an acyclic instance with the arcs as `F0`, and the
/// lazily built family of its partial orientations. Every member is
/// dismembered and has at most `11k` arcs. Fails if `|F|` exceeds `cap`.
pub fn enumerate_dismembered(
    wi: &WeightedInstance,
    cap: usize,
) -> Result<Dismemberment, DismemberError> {
    let g = &wi.graph;
    let ug = g.underlying();
    let m = g.edges().len();
    let f0: Vec<usize> = (m..m + g.k()).collect();
    let fixed_edges = forest_dismembering(&ug, &f0)?;
    debug_assert!(fixed_edges.iter().all(|&e| e < m));
    if fixed_edges.len() > cap || fixed_edges.len() >= usize::BITS as usize {
        return Err(DismemberError::CapExceeded { size: fixed_edges.len(), cap });
    }
    Ok(Dismemberment { source: wi.clone(), fixed_edges })
}

/// Convenience: the weights a member instance carries.
pub fn member_weights(d: &Dismemberment) -> &WeightFn {
    &d.source.w
}
