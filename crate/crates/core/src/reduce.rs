//! Reductions between the unweighted problem on arbitrary mixed graphs and
//! the weighted problem on acyclic mixed graphs.

use std::collections::VecDeque;

use num_bigint::BigUint;
use thiserror::Error;

use crate::graph::{
    contract_set, mixed_cycle_exists, tarjan, Dsu, GraphError, MixedGraph, Orientation,
    WeightFn, WeightedInstance,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReduceError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("instance has a mixed cycle")]
    Cyclic,
    #[error("scale must be positive")]
    ZeroScale,
    #[error("expanded graph would have {needed} vertices, cap is {cap}")]
    TooLarge { needed: u128, cap: u128 },
}

/// One contraction of a mixed cycle.
#[derive(Clone, Debug)]
pub struct ContractionStep {
    /// Graph before the contraction.
    pub before: MixedGraph,
    /// Vertices of the cycle, in traversal order.
    pub cycle: Vec<usize>,
    /// Edges of the cycle with the direction that makes the cycle directed.
    pub cycle_edges: Vec<(usize, bool)>,
    pub vertex_map: Vec<usize>,
    pub edge_map: Vec<Option<usize>>,
}

/// Every contraction performed while making an instance acyclic, in order.
#[derive(Clone, Debug)]
pub struct ContractionTrace {
    pub original: MixedGraph,
    pub steps: Vec<ContractionStep>,
}

impl ContractionTrace {
    /// Original vertex -> vertex of the final graph.
    pub fn vertex_map(&self) -> Vec<usize> {
        let mut map: Vec<usize> = (0..self.original.n()).collect();
        for step in &self.steps {
            for m in &mut map {
                *m = step.vertex_map[*m];
            }
        }
        map
    }
}

/// A link of the digon expansion: edge `e` traversed forward or backward,
/// or arc `a`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Link {
    Edge(usize, bool),
    Arc(usize),
}

impl Link {
    fn id(self, m: usize) -> usize {
        match self {
            Link::Edge(e, _) => e,
            Link::Arc(a) => m + a,
        }
    }
}

fn link_adjacency(g: &MixedGraph) -> Vec<Vec<(usize, Link)>> {
    let mut adj = vec![Vec::new(); g.n()];
    for (e, &(u, v)) in g.edges().iter().enumerate() {
        adj[u].push((v, Link::Edge(e, true)));
        adj[v].push((u, Link::Edge(e, false)));
    }
    for (a, &(u, v)) in g.arcs().iter().enumerate() {
        adj[u].push((v, Link::Arc(a)));
    }
    adj
}

/// A shortest mixed cycle, as (vertices, links) in traversal order.
/// Ties go to the first starting link in (edges, then arcs) order.
fn shortest_mixed_cycle(g: &MixedGraph) -> Option<(Vec<usize>, Vec<Link>)> {
    if !mixed_cycle_exists(g) {
        return None;
    }
    let m = g.edges().len();
    let adj = link_adjacency(g);
    let mut starts = Vec::new();
    for (e, &(u, v)) in g.edges().iter().enumerate() {
        starts.push((u, v, Link::Edge(e, true)));
        starts.push((v, u, Link::Edge(e, false)));
    }
    for (a, &(u, v)) in g.arcs().iter().enumerate() {
        starts.push((u, v, Link::Arc(a)));
    }
    let mut best: Option<(Vec<usize>, Vec<Link>)> = None;
    let mut pred: Vec<Option<(usize, Link)>> = vec![None; g.n()];
    for (u, v, first) in starts {
        // Walk from v back to u without reusing the starting link.
        let limit = best.as_ref().map_or(usize::MAX, |b| b.1.len());
        pred.iter_mut().for_each(|p| *p = None);
        let mut dist = vec![usize::MAX; g.n()];
        dist[v] = 1;
        let mut queue = VecDeque::from([v]);
        let skip = first.id(m);
        while let Some(x) = queue.pop_front() {
            if x == u || dist[x] + 1 >= limit {
                break;
            }
            for &(y, link) in &adj[x] {
                if link.id(m) == skip || dist[y] != usize::MAX {
                    continue;
                }
                dist[y] = dist[x] + 1;
                pred[y] = Some((x, link));
                queue.push_back(y);
            }
        }
        if dist[u] == usize::MAX || dist[u] >= limit {
            continue;
        }
        // Predecessors lead from u back to v.
        let mut path = vec![u];
        let mut path_links = Vec::new();
        let mut x = u;
        while x != v {
            let (p, link) = pred[x].expect("bfs predecessor");
            path_links.push(link);
            path.push(p);
            x = p;
        }
        path.reverse();
        path_links.reverse();
        let mut links = vec![first];
        links.extend(path_links);
        let mut cyc = vec![u];
        cyc.extend_from_slice(&path[..path.len() - 1]);
        best = Some((cyc, links));
    }
    best
}

/// Contract mixed cycles until none is left, starting from weights `w`.
/// Each step contracts a shortest mixed cycle. The final instance has the
/// same optimum as `(g, w)` and `lift_orientation` carries orientations back.
pub fn contract_weighted(g: &MixedGraph, w: &WeightFn) -> (WeightedInstance, ContractionTrace) {
    let mut cur = g.clone();
    let mut cur_w = w.clone();
    let mut steps = Vec::new();
    while let Some((cycle, links)) = shortest_mixed_cycle(&cur) {
        let c = contract_set(&cur, &cur_w, &cycle).expect("cycle vertices are valid");
        let cycle_edges = links
            .iter()
            .filter_map(|l| match *l {
                Link::Edge(e, f) => Some((e, f)),
                Link::Arc(_) => None,
            })
            .collect();
        steps.push(ContractionStep {
            before: cur,
            cycle,
            cycle_edges,
            vertex_map: c.vertex_map,
            edge_map: c.edge_map,
        });
        cur = c.graph;
        cur_w = c.w;
    }
    let wi = WeightedInstance::new(cur, cur_w).expect("contraction keeps weights aligned");
    debug_assert!(wi.acyclic);
    (wi, ContractionTrace { original: g.clone(), steps })
}

/// Unit-weight entry point: the acyclic weighted instance of `g`.
pub fn contract_to_wammro(g: &MixedGraph) -> (WeightedInstance, ContractionTrace) {
    contract_weighted(g, &WeightFn::unit(g.n()))
}

/// Carry an orientation of the final contracted graph back to the original
/// graph. Every contracted cycle is oriented as a directed cycle; chords of
/// a contracted set keep their first-to-second direction.
pub fn lift_orientation(trace: &ContractionTrace, o: &Orientation) -> Orientation {
    let mut cur = o.clone();
    for step in trace.steps.iter().rev() {
        let mut forward: Vec<bool> = step
            .edge_map
            .iter()
            .map(|m| m.is_none_or(|e| cur.forward[e]))
            .collect();
        for &(e, f) in &step.cycle_edges {
            forward[e] = f;
        }
        cur = Orientation::new(forward);
    }
    cur
}

/// Bridges of the undirected multigraph on `n` vertices (parallel links are
/// never bridges). Returns a flag per link.
fn bridges(n: usize, links: &[(usize, usize)]) -> Vec<bool> {
    let mut adj = vec![Vec::new(); n];
    for (i, &(u, v)) in links.iter().enumerate() {
        adj[u].push((v, i));
        adj[v].push((u, i));
    }
    let mut is_bridge = vec![false; links.len()];
    let mut tin = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut timer = 0;
    for root in 0..n {
        if tin[root] != usize::MAX {
            continue;
        }
        tin[root] = timer;
        low[root] = timer;
        timer += 1;
        let mut stack: Vec<(usize, usize, usize)> = vec![(root, usize::MAX, 0)];
        while let Some(&mut (v, parent_link, ref mut pos)) = stack.last_mut() {
            if *pos < adj[v].len() {
                let (u, id) = adj[v][*pos];
                *pos += 1;
                if id == parent_link {
                    continue;
                }
                if tin[u] == usize::MAX {
                    tin[u] = timer;
                    low[u] = timer;
                    timer += 1;
                    stack.push((u, id, 0));
                } else {
                    low[v] = low[v].min(tin[u]);
                }
            } else {
                stack.pop();
                if let Some(&(p, _, _)) = stack.last() {
                    low[p] = low[p].min(low[v]);
                    if low[v] > tin[p] {
                        is_bridge[parent_link] = true;
                    }
                }
            }
        }
    }
    is_bridge
}

/// Condense without recording cycles: repeatedly merge every strongly
/// connected, bridgeless piece of the digon expansion (such a piece always
/// has a strongly connected orientation). Returns the acyclic instance and
/// the original-vertex map. Yields the same partition as `contract_weighted`.
pub fn condense_mixed(g: &MixedGraph, w: &WeightFn) -> (WeightedInstance, Vec<usize>) {
    let mut cur = g.clone();
    let mut cur_w = w.clone();
    let mut map: Vec<usize> = (0..g.n()).collect();
    loop {
        let (comp, _) = tarjan(&cur.digon_adjacency());
        // Links inside one strong component; the bridges among them split it.
        let mut inner = Vec::new();
        for &(u, v) in cur.edges().iter().chain(cur.arcs()) {
            if comp[u] == comp[v] {
                inner.push((u, v));
            }
        }
        let is_bridge = bridges(cur.n(), &inner);
        let mut dsu = Dsu::new(cur.n());
        let mut merged = false;
        for (i, &(u, v)) in inner.iter().enumerate() {
            if !is_bridge[i] {
                merged |= dsu.union(u, v);
            }
        }
        if !merged {
            break;
        }
        let mut groups: Vec<Vec<usize>> = vec![Vec::new(); cur.n()];
        for v in 0..cur.n() {
            groups[dsu.find(v)].push(v);
        }
        // Contract one group at a time; later groups are remapped.
        let mut local: Vec<usize> = (0..cur.n()).collect();
        for group in groups.into_iter().filter(|g| g.len() > 1) {
            let ids: Vec<usize> = group.iter().map(|&v| local[v]).collect();
            let c = contract_set(&cur, &cur_w, &ids).expect("valid group");
            for l in &mut local {
                *l = c.vertex_map[*l];
            }
            cur = c.graph;
            cur_w = c.w;
        }
        for m in &mut map {
            *m = local[*m];
        }
    }
    let wi = WeightedInstance::new(cur, cur_w).expect("weights aligned");
    debug_assert!(wi.acyclic);
    (wi, map)
}

/// Output of blowing a weighted instance up to an unweighted one.
#[derive(Clone, Debug)]
pub struct BlowupResult {
    /// Original vertices keep ids `0..n` and edges keep their indices, so an
    /// orientation of the weighted graph is an orientation of this one.
    pub graph: MixedGraph,
    /// Constant offset `2 sum_{w(v) > 0} [C(s w(v), 2) - s^2 C(w(v), 2)]`.
    pub k0: BigUint,
}

/// Replace each vertex of positive weight `w(v)` by `scale * w(v)` vertices
/// (itself plus pendants joined to it by digons). Weight-zero vertices stay
/// single. Then `R(expanded) = scale^2 R(G, w) + k0 + residual`, where the
/// residual counts pairs touching weight-zero vertices.
pub fn expand_to_mmro(
    wi: &WeightedInstance,
    scale: u64,
    vertex_cap: u128,
) -> Result<BlowupResult, ReduceError> {
    if !wi.acyclic {
        return Err(ReduceError::Cyclic);
    }
    if scale == 0 {
        return Err(ReduceError::ZeroScale);
    }
    let g = &wi.graph;
    let mut needed: u128 = 0;
    for v in 0..g.n() {
        let wv = wi.w.get(v) as u128;
        needed += if wv == 0 { 1 } else { wv * scale as u128 };
    }
    if needed > vertex_cap {
        return Err(ReduceError::TooLarge { needed, cap: vertex_cap });
    }
    let mut arcs = g.arcs().to_vec();
    let mut n = g.n();
    let mut k0 = BigUint::from(0u32);
    let s = BigUint::from(scale);
    for v in 0..g.n() {
        let wv = wi.w.get(v);
        if wv == 0 {
            continue;
        }
        let big = BigUint::from(wv) * &s;
        let pairs = |x: &BigUint| -> BigUint {
            if *x == BigUint::from(0u32) {
                BigUint::from(0u32)
            } else {
                x * (x - 1u32)
            }
        };
        // 2 C(x, 2) = x (x - 1)
        k0 += pairs(&big) - &s * &s * pairs(&BigUint::from(wv));
        let extra = wv as u128 * scale as u128 - 1;
        for _ in 0..extra {
            arcs.push((v, n));
            arcs.push((n, v));
            n += 1;
        }
    }
    Ok(BlowupResult { graph: MixedGraph::from_parts(n, g.edges().to_vec(), arcs), k0 })
}

/// One connected piece of an instance with maps back to the whole.
#[derive(Clone, Debug)]
pub struct SubInstance {
    pub instance: WeightedInstance,
    /// Local vertex -> global vertex.
    pub vertices: Vec<usize>,
    /// Local edge -> global edge.
    pub edges: Vec<usize>,
}

/// Split into the connected components of the underlying graph, ordered by
/// smallest vertex.
pub fn split_connected(wi: &WeightedInstance) -> Vec<SubInstance> {
    let g = &wi.graph;
    let mut dsu = Dsu::new(g.n());
    for &(u, v) in g.edges().iter().chain(g.arcs()) {
        dsu.union(u, v);
    }
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); g.n()];
    for v in 0..g.n() {
        groups[dsu.find(v)].push(v);
    }
    groups
        .into_iter()
        .filter(|grp| !grp.is_empty())
        .map(|vertices| {
            let (graph, edges) = g.induced(&vertices);
            let w = WeightFn::new(vertices.iter().map(|&v| wi.w.get(v)).collect())
                .expect("sub-total fits");
            let instance = WeightedInstance::new(graph, w).expect("weights aligned");
            SubInstance { instance, vertices, edges }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{score_oriented, score_weighted};

    fn mixed(n: usize, e: &[(usize, usize)], a: &[(usize, usize)]) -> MixedGraph {
        MixedGraph::new(n, e.to_vec(), a.to_vec()).unwrap()
    }

    #[test]
    fn triangle_contracts_to_point() {
        let g = mixed(3, &[(0, 1), (1, 2), (2, 0)], &[]);
        let (wi, trace) = contract_to_wammro(&g);
        assert_eq!(wi.graph.n(), 1);
        assert_eq!(wi.w.get(0), 3);
        assert!(wi.graph.edges().is_empty());
        let lifted = lift_orientation(&trace, &Orientation::new(vec![]));
        assert_eq!(score_oriented(&g, &lifted, &WeightFn::unit(3)), 6);
    }

    #[test]
    fn acyclic_input_is_untouched() {
        let g = mixed(3, &[(0, 1)], &[(1, 2)]);
        let (wi, trace) = contract_to_wammro(&g);
        assert_eq!(wi.graph, g);
        assert!(wi.w.is_unit());
        assert!(trace.steps.is_empty());
        let o = Orientation::new(vec![false]);
        assert_eq!(lift_orientation(&trace, &o), o);
    }

    #[test]
    fn cycle_through_arc_is_found() {
        let g = mixed(3, &[(0, 1), (1, 2)], &[(2, 0)]);
        let (cycle, links) = shortest_mixed_cycle(&g).unwrap();
        assert_eq!(cycle.len(), 3);
        assert_eq!(links.len(), 3);
    }

    #[test]
    fn parallel_edges_form_a_digon() {
        let g = mixed(3, &[(0, 1), (0, 1), (1, 2)], &[]);
        let (wi, trace) = contract_to_wammro(&g);
        assert_eq!(wi.graph.n(), 2);
        assert_eq!(trace.steps.len(), 1);
        let lifted = lift_orientation(&trace, &Orientation::new(vec![true]));
        assert_ne!(lifted.forward[0], lifted.forward[1]);
    }

    #[test]
    fn triangle_plus_pendant_round_trip() {
        let g = mixed(4, &[(0, 1), (1, 2), (2, 0), (2, 3)], &[]);
        let (wi, trace) = contract_to_wammro(&g);
        assert_eq!(wi.graph.n(), 2);
        for f in [true, false] {
            let o = Orientation::new(vec![f]);
            let lifted = lift_orientation(&trace, &o);
            assert_eq!(
                score_oriented(&g, &lifted, &WeightFn::unit(4)),
                score_oriented(&wi.graph, &o, &wi.w)
            );
            assert_eq!(score_oriented(&wi.graph, &o, &wi.w), 9);
        }
    }

    #[test]
    fn blowup_of_unit_weights_is_identity() {
        let wi = WeightedInstance::unit(mixed(3, &[(0, 1)], &[(1, 2)]));
        let b = expand_to_mmro(&wi, 1, 1000).unwrap();
        assert_eq!(b.graph, wi.graph);
        assert_eq!(b.k0, BigUint::from(0u32));
        // Larger scales multiply every positive weight.
        let b = expand_to_mmro(&wi, 7, 1000).unwrap();
        assert_eq!(b.graph.n(), 21);
        assert_eq!(b.k0, BigUint::from(3u32 * 42));
    }

    #[test]
    fn blowup_single_vertex() {
        let wi = WeightedInstance::new(mixed(1, &[], &[]), WeightFn::new(vec![2]).unwrap()).unwrap();
        let b = expand_to_mmro(&wi, 16, 1000).unwrap();
        assert_eq!(b.graph.n(), 32);
        assert_eq!(b.graph.arcs().len(), 62);
        // every pair among 32 strongly connected vertices
        assert_eq!(score_weighted(&b.graph, &WeightFn::unit(32)), 32 * 31);
        assert!(matches!(
            expand_to_mmro(&wi, 16, 10),
            Err(ReduceError::TooLarge { needed: 32, cap: 10 })
        ));
    }

    #[test]
    fn split_two_edges() {
        let wi = WeightedInstance::unit(mixed(4, &[(0, 1), (2, 3)], &[]));
        let parts = split_connected(&wi);
        assert_eq!(parts.len(), 2);
        assert_eq!(parts[1].vertices, vec![2, 3]);
        assert_eq!(parts[1].edges, vec![1]);
        let single = WeightedInstance::unit(mixed(3, &[(0, 1)], &[(2, 1)]));
        assert_eq!(split_connected(&single).len(), 1);
    }

    #[test]
    fn bridges_in_multigraph() {
        assert_eq!(bridges(3, &[(0, 1), (1, 2), (1, 2)]), vec![true, false, false]);
    }
}
