//! Replacement sets: small families of orientations of one undirected
//! component such that, in any global orientation, swapping in one of them
//! loses nothing (exact sets) or at most `eps * |w|^2` (approximate sets).
//!
//! Each set is built from one or two small supergraphs `U` of the component
//! `T`: `T` plus up to three new vertices whose weights summarize what the
//! rest of the graph can reach into or out of `T`. Every `U` is arboresque,
//! so each weight choice is solved exactly by the tree DP.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::sync::Mutex;

use num_rational::Ratio;
use thiserror::Error;

use crate::arboresque::{shape_of, solve_shape};
use crate::graph::{score_weighted, Component, MixedGraph, WeightFn, WeightedInstance};

/// Exact positive rational used for approximation parameters.
pub type Eps = Ratio<u128>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReplacementError {
    #[error("component does not touch any arc")]
    NoArcs,
    #[error("component touches the arcs in a way a dismembered instance cannot")]
    NotDismembered,
    #[error("{count} weight assignments exceed the cap of {cap}")]
    TooMany { count: usize, cap: usize },
    #[error("epsilon must be positive")]
    NonPositiveEps,
}

/// How `T` meets the arcs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Attachment {
    /// Entering arcs only at `x_in`, leaving arcs only at `x_out` (possibly
    /// the same vertex).
    Single { x_in: usize, x_out: usize },
    /// Two vertices with one arc each, both entering (`leaving = false`) or
    /// both leaving.
    Pair { x1: usize, x2: usize, leaving: bool },
}

/// One supergraph `U` of `T`. Local vertices `0..t` are the vertices of
/// `T` in the order of `Component::vertices`; the added vertices follow.
#[derive(Clone, Debug)]
pub struct Supergraph {
    pub graph: MixedGraph,
    pub added: usize,
    /// For each edge of `U`, its position in `Component::edges`.
    pub edge_slot: Vec<usize>,
    /// Tree edges that `U` already orients (as arcs): (position, forward).
    pub fixed: Vec<(usize, bool)>,
    /// 0 for the plain supergraph, 1 for the one with the `x_in -> x_out`
    /// path pre-oriented.
    pub variant: u8,
}

#[derive(Clone, Debug)]
pub struct SimulationSet {
    pub attachment: Attachment,
    pub supergraphs: Vec<Supergraph>,
}

/// Orientations of a component, one direction per entry of `Component::edges`.
#[derive(Clone, Debug, Default)]
pub struct ReplacementSet {
    pub orientations: Vec<Vec<bool>>,
    /// Number of (supergraph, weight assignment) pairs that were solved.
    pub assignments: usize,
}

impl ReplacementSet {
    pub fn len(&self) -> usize {
        self.orientations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.orientations.is_empty()
    }
}

/// Component vertices, attachment, supergraph variant, added weights.
type CacheKey = (Vec<usize>, Attachment, u8, [u64; 3]);

/// Memo of DP solutions keyed by component, supergraph and added weights.
/// Shared by all partial orientations of one instance, whose components
/// coincide.
#[derive(Default)]
pub struct ReplacementCache {
    solved: Mutex<HashMap<CacheKey, Vec<bool>>>,
}

impl ReplacementCache {
    pub fn new() -> Self {
        Self::default()
    }
}

fn attachment(g: &MixedGraph, comp: &Component) -> Result<Attachment, ReplacementError> {
    let mut in_t = vec![false; g.n()];
    for &v in &comp.vertices {
        in_t[v] = true;
    }
    let mut entering = vec![0usize; g.n()];
    let mut leaving = vec![0usize; g.n()];
    for &(u, v) in g.arcs() {
        if in_t[v] && !in_t[u] {
            entering[v] += 1;
        }
        if in_t[u] && !in_t[v] {
            leaving[u] += 1;
        }
        if in_t[u] && in_t[v] {
            return Err(ReplacementError::NotDismembered);
        }
    }
    let touching: Vec<usize> =
        comp.vertices.iter().copied().filter(|&v| entering[v] + leaving[v] > 0).collect();
    match touching.as_slice() {
        [] => Err(ReplacementError::NoArcs),
        &[x] => Ok(Attachment::Single { x_in: x, x_out: x }),
        &[a, b] => {
            if entering[a] + leaving[a] != 1 || entering[b] + leaving[b] != 1 {
                return Err(ReplacementError::NotDismembered);
            }
            Ok(match (entering[a] == 1, entering[b] == 1) {
                (true, false) => Attachment::Single { x_in: a, x_out: b },
                (false, true) => Attachment::Single { x_in: b, x_out: a },
                (true, true) => Attachment::Pair { x1: a, x2: b, leaving: false },
                (false, false) => Attachment::Pair { x1: a, x2: b, leaving: true },
            })
        }
        _ => Err(ReplacementError::NotDismembered),
    }
}

/// Tree path from `a` to `b` inside the component, as (position, forward).
fn tree_path(g: &MixedGraph, comp: &Component, a: usize, b: usize) -> Vec<(usize, bool)> {
    let mut adj: HashMap<usize, Vec<(usize, usize)>> = HashMap::new();
    for (pos, &e) in comp.edges.iter().enumerate() {
        let (u, v) = g.edges()[e];
        adj.entry(u).or_default().push((v, pos));
        adj.entry(v).or_default().push((u, pos));
    }
    let mut pred: HashMap<usize, (usize, usize)> = HashMap::new();
    let mut queue = VecDeque::from([a]);
    pred.insert(a, (a, usize::MAX));
    while let Some(x) = queue.pop_front() {
        for &(y, pos) in adj.get(&x).map(Vec::as_slice).unwrap_or(&[]) {
            if let std::collections::hash_map::Entry::Vacant(slot) = pred.entry(y) {
                slot.insert((x, pos));
                queue.push_back(y);
            }
        }
    }
    let mut path = Vec::new();
    let mut x = b;
    while x != a {
        let (p, pos) = pred[&x];
        let (u, _) = g.edges()[comp.edges[pos]];
        path.push((pos, u == p));
        x = p;
    }
    path.reverse();
    path
}

/// The one or two arboresque supergraphs of `T` used to summarize every
/// possible orientation of the rest of the graph.
pub fn build_simulation_set(
    wi: &WeightedInstance,
    comp: &Component,
) -> Result<SimulationSet, ReplacementError> {
    let g = &wi.graph;
    let at = attachment(g, comp)?;
    let t = comp.vertices.len();
    let local: HashMap<usize, usize> =
        comp.vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let tree_edges: Vec<(usize, usize)> = comp
        .edges
        .iter()
        .map(|&e| {
            let (u, v) = g.edges()[e];
            (local[&u], local[&v])
        })
        .collect();
    let make = |arcs: Vec<(usize, usize)>, added: usize, fixed: Vec<(usize, bool)>, variant: u8| {
        let mut is_fixed = vec![false; tree_edges.len()];
        let mut arcs = arcs;
        for &(pos, fwd) in &fixed {
            is_fixed[pos] = true;
            let (u, v) = tree_edges[pos];
            arcs.push(if fwd { (u, v) } else { (v, u) });
        }
        let edge_slot: Vec<usize> = (0..tree_edges.len()).filter(|&p| !is_fixed[p]).collect();
        let edges = edge_slot.iter().map(|&p| tree_edges[p]).collect();
        Supergraph {
            graph: MixedGraph::new(t + added, edges, arcs).expect("valid supergraph"),
            added,
            edge_slot,
            fixed,
            variant,
        }
    };
    let supergraphs = match at {
        Attachment::Single { x_in, x_out } => {
            let (zi, zo) = (t, t + 1);
            let arcs = vec![(zi, zo), (zi, local[&x_in]), (local[&x_out], zo)];
            let mut list = vec![make(arcs.clone(), 2, Vec::new(), 0)];
            if x_in != x_out {
                list.push(make(arcs, 2, tree_path(g, comp, x_in, x_out), 1));
            }
            list
        }
        Attachment::Pair { x1, x2, leaving } => {
            let (z1, z2, z3) = (t, t + 1, t + 2);
            let (l1, l2) = (local[&x1], local[&x2]);
            let mut arcs = vec![(z3, l1), (z1, l1), (z2, l2), (z3, l2)];
            if leaving {
                arcs.iter_mut().for_each(|a| *a = (a.1, a.0));
            }
            vec![make(arcs, 3, Vec::new(), 0)]
        }
    };
    Ok(SimulationSet { attachment: at, supergraphs })
}

/// Vertices outside `T` that reach `x` (or, with `forward`, are reached from
/// `x`) by a mixed path that avoids the other vertices of `T`.
fn pool(g: &MixedGraph, in_t: &[bool], x: usize, forward: bool) -> Vec<bool> {
    let mut adj = vec![Vec::new(); g.n()];
    for &(u, v) in g.arcs() {
        if forward {
            adj[u].push(v);
        } else {
            adj[v].push(u);
        }
    }
    for &(u, v) in g.edges() {
        adj[u].push(v);
        adj[v].push(u);
    }
    let mut seen = vec![false; g.n()];
    seen[x] = true;
    let mut queue = VecDeque::from([x]);
    while let Some(y) = queue.pop_front() {
        for &z in &adj[y] {
            if !seen[z] && !in_t[z] {
                seen[z] = true;
                queue.push_back(z);
            }
        }
    }
    seen[x] = false;
    seen
}

/// Every combination of added-vertex weights that some orientation of the
/// rest of the graph can produce: each outside vertex contributes its weight
/// to at most one added vertex it can be routed to.
fn achievable_weights(
    wi: &WeightedInstance,
    comp: &Component,
    at: Attachment,
    cap: usize,
) -> Result<Vec<[u64; 3]>, ReplacementError> {
    let g = &wi.graph;
    let mut in_t = vec![false; g.n()];
    for &v in &comp.vertices {
        in_t[v] = true;
    }
    // Per outside vertex: the slot masks it may add its weight to.
    let options: Vec<Vec<usize>> = match at {
        Attachment::Single { x_in, x_out } => {
            let to_in = pool(g, &in_t, x_in, false);
            let from_out = pool(g, &in_t, x_out, true);
            (0..g.n())
                .map(|v| {
                    let mut o = Vec::new();
                    if to_in[v] {
                        o.push(0);
                    }
                    if from_out[v] {
                        o.push(1);
                    }
                    o
                })
                .collect()
        }
        Attachment::Pair { x1, x2, leaving } => {
            let p1 = pool(g, &in_t, x1, leaving);
            let p2 = pool(g, &in_t, x2, leaving);
            (0..g.n())
                .map(|v| match (p1[v], p2[v]) {
                    (true, true) => vec![0, 1, 2],
                    (true, false) => vec![0],
                    (false, true) => vec![1],
                    (false, false) => vec![],
                })
                .collect()
        }
    };
    let mut set: BTreeSet<[u64; 3]> = BTreeSet::from([[0; 3]]);
    for v in 0..g.n() {
        let wv = wi.w.get(v);
        if in_t[v] || wv == 0 || options[v].is_empty() {
            continue;
        }
        let mut next = set.clone();
        for t in &set {
            for &slot in &options[v] {
                let mut u = *t;
                u[slot] += wv;
                next.insert(u);
            }
        }
        if next.len() > cap {
            return Err(ReplacementError::TooMany { count: next.len(), cap });
        }
        set = next;
    }
    Ok(set.into_iter().collect())
}

/// Default cap on weight assignments per component.
pub const DEFAULT_ASSIGNMENT_CAP: usize = 1 << 20;

fn solve_assignments(
    wi: &WeightedInstance,
    comp: &Component,
    sim: &SimulationSet,
    weights: &BTreeSet<[u64; 3]>,
    cache: &ReplacementCache,
) -> ReplacementSet {
    let mut found: BTreeSet<Vec<bool>> = BTreeSet::new();
    let mut assignments = 0;
    let base: Vec<u64> = comp.vertices.iter().map(|&v| wi.w.get(v)).collect();
    for sg in &sim.supergraphs {
        let shape = shape_of(&sg.graph).expect("simulation supergraphs are arboresque");
        for tuple in weights {
            assignments += 1;
            let key = (comp.vertices.clone(), sim.attachment, sg.variant, *tuple);
            if let Some(hit) = cache.solved.lock().expect("cache lock").get(&key) {
                found.insert(hit.clone());
                continue;
            }
            let mut w = base.clone();
            w.extend_from_slice(&tuple[..sg.added]);
            let w = WeightFn::new(w).expect("weights bounded by the instance total");
            let (o, _) = solve_shape(&sg.graph, &w, shape);
            let mut dirs = vec![true; comp.edges.len()];
            for (j, &slot) in sg.edge_slot.iter().enumerate() {
                dirs[slot] = o.forward[j];
            }
            for &(slot, f) in &sg.fixed {
                dirs[slot] = f;
            }
            cache.solved.lock().expect("cache lock").insert(key, dirs.clone());
            found.insert(dirs);
        }
    }
    ReplacementSet { orientations: found.into_iter().collect(), assignments }
}

fn check_component(wi: &WeightedInstance, comp: &Component) -> Result<Option<SimulationSet>, ReplacementError> {
    let sim = build_simulation_set(wi, comp)?;
    Ok(if comp.edges.is_empty() { None } else { Some(sim) })
}

/// Optimal replacement set: solve every supergraph under every achievable
/// weight assignment and keep the distinct orientations of `T`.
pub fn exact_replacement_set(
    wi: &WeightedInstance,
    comp: &Component,
) -> Result<ReplacementSet, ReplacementError> {
    exact_replacement_set_with(wi, comp, &ReplacementCache::new(), DEFAULT_ASSIGNMENT_CAP)
}

pub fn exact_replacement_set_with(
    wi: &WeightedInstance,
    comp: &Component,
    cache: &ReplacementCache,
    cap: usize,
) -> Result<ReplacementSet, ReplacementError> {
    let Some(sim) = check_component(wi, comp)? else {
        return Ok(ReplacementSet { orientations: vec![Vec::new()], assignments: 0 });
    };
    let weights: BTreeSet<[u64; 3]> =
        achievable_weights(wi, comp, sim.attachment, cap)?.into_iter().collect();
    Ok(solve_assignments(wi, comp, &sim, &weights, cache))
}

/// Grid of values `ceil(i * eps * omega / set_size)` for `0 <= i <= set_size / eps`.
fn grid_values(set_size: u128, omega: u128, eps: Eps) -> Vec<u64> {
    let (num, den) = (*eps.numer(), *eps.denom());
    let kmax = set_size * den / num;
    let mut vals: Vec<u64> = (0..=kmax)
        .map(|i| {
            let top = i * num * omega;
            let bot = den * set_size;
            top.div_ceil(bot) as u64
        })
        .collect();
    vals.dedup();
    vals
}

/// Largest grid value not above `c`.
fn snap(c: u64, set_size: u128, omega: u128, eps: Eps) -> u64 {
    if omega == 0 {
        return 0;
    }
    let (num, den) = (*eps.numer(), *eps.denom());
    let kmax = set_size * den / num;
    let i = (c as u128 * den * set_size / (num * omega)).min(kmax);
    (i * num * omega).div_ceil(den * set_size) as u64
}

/// Every map from `set_size` points into the grid
/// `{ceil(i * eps * omega / set_size)}`; each map `c'` into `[omega]` has a
/// grid map within `eps * omega` in total.
pub fn eps_grid(set_size: usize, omega: u64, eps: Eps, cap: usize) -> Result<Vec<Vec<u64>>, ReplacementError> {
    if *eps.numer() == 0 {
        return Err(ReplacementError::NonPositiveEps);
    }
    let vals = grid_values(set_size as u128, omega as u128, eps);
    let count = (vals.len() as u128).checked_pow(set_size as u32).unwrap_or(u128::MAX);
    if count > cap as u128 {
        return Err(ReplacementError::TooMany { count: count.min(usize::MAX as u128) as usize, cap });
    }
    let mut out: Vec<Vec<u64>> = vec![Vec::new()];
    for _ in 0..set_size {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                vals.iter().map(move |&v| {
                    let mut p = prefix.clone();
                    p.push(v);
                    p
                })
            })
            .collect();
    }
    Ok(out)
}

/// Approximate replacement set: like the exact one, but every achievable
/// weight assignment is first rounded down to the grid for `eps / 12`.
/// Swapping in a member loses at most `eps * |w|^2`.
pub fn eps_replacement_set(
    wi: &WeightedInstance,
    comp: &Component,
    eps: Eps,
) -> Result<ReplacementSet, ReplacementError> {
    eps_replacement_set_with(wi, comp, eps, &ReplacementCache::new(), DEFAULT_ASSIGNMENT_CAP)
}

pub fn eps_replacement_set_with(
    wi: &WeightedInstance,
    comp: &Component,
    eps: Eps,
    cache: &ReplacementCache,
    cap: usize,
) -> Result<ReplacementSet, ReplacementError> {
    if *eps.numer() == 0 {
        return Err(ReplacementError::NonPositiveEps);
    }
    let Some(sim) = check_component(wi, comp)? else {
        return Ok(ReplacementSet { orientations: vec![Vec::new()], assignments: 0 });
    };
    let step = eps / 12;
    let omega = wi.w.total() as u128;
    let added = sim.supergraphs[0].added as u128;
    let weights: BTreeSet<[u64; 3]> = achievable_weights(wi, comp, sim.attachment, cap)?
        .into_iter()
        .map(|t| t.map(|c| snap(c, added, omega, step)))
        .collect();
    Ok(solve_assignments(wi, comp, &sim, &weights, cache))
}

/// Check `|R(D, w) - R(D, w2)| <= 2 |w + w2| |w - w2|`.
pub fn weight_perturbation_bound(d: &MixedGraph, w: &WeightFn, w2: &WeightFn) -> bool {
    let a = score_weighted(d, w);
    let b = score_weighted(d, w2);
    let diff = a.abs_diff(b);
    let sum: u128 = w.total() as u128 + w2.total() as u128;
    let dist: u128 = w.as_slice().iter().zip(w2.as_slice()).map(|(&x, &y)| x.abs_diff(y) as u128).sum();
    match sum.checked_mul(dist).and_then(|p| p.checked_mul(2)) {
        Some(bound) => diff <= bound,
        None => true,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::undirected_components;

    fn inst(n: usize, e: &[(usize, usize)], a: &[(usize, usize)]) -> WeightedInstance {
        WeightedInstance::unit(MixedGraph::new(n, e.to_vec(), a.to_vec()).unwrap())
    }

    #[test]
    fn grid_examples() {
        let half = Eps::new(1, 2);
        assert_eq!(grid_values(1, 10, half), vec![0, 5, 10]);
        assert_eq!(eps_grid(1, 10, half, 100).unwrap().len(), 3);
        assert_eq!(snap(7, 1, 10, half), 5);
        assert_eq!(eps_grid(2, 0, half, 100).unwrap(), vec![vec![0, 0]]);
        // eps at least the set size: only the endpoints
        assert_eq!(grid_values(2, 9, Eps::new(2, 1)), vec![0, 9]);
        assert!(eps_grid(1, 3, Eps::new(0, 1), 10).is_err());
    }

    #[test]
    fn path_with_entry_and_exit() {
        // a -> x_in - m - x_out -> b
        let wi = inst(5, &[(0, 1), (1, 2)], &[(3, 0), (2, 4)]);
        let comp = &undirected_components(&wi.graph)[0];
        let sim = build_simulation_set(&wi, comp).unwrap();
        assert_eq!(sim.attachment, Attachment::Single { x_in: 0, x_out: 2 });
        assert_eq!(sim.supergraphs.len(), 2);
        for sg in &sim.supergraphs {
            assert_eq!(sg.graph.n(), comp.vertices.len() + 2);
            assert!(shape_of(&sg.graph).is_ok());
        }
        assert_eq!(sim.supergraphs[1].fixed, vec![(0, true), (1, true)]);
    }

    #[test]
    fn two_entering_arcs() {
        let wi = inst(5, &[(0, 1), (1, 2)], &[(3, 0), (4, 2)]);
        let comp = &undirected_components(&wi.graph)[0];
        let sim = build_simulation_set(&wi, comp).unwrap();
        assert_eq!(sim.attachment, Attachment::Pair { x1: 0, x2: 2, leaving: false });
        assert_eq!(sim.supergraphs.len(), 1);
        assert_eq!(sim.supergraphs[0].graph.n(), 6);
        assert!(shape_of(&sim.supergraphs[0].graph).is_ok());
    }

    #[test]
    fn single_attachment_vertex() {
        let wi = inst(4, &[(0, 1), (1, 2)], &[(3, 1)]);
        let comp = &undirected_components(&wi.graph)[0];
        let sim = build_simulation_set(&wi, comp).unwrap();
        assert_eq!(sim.attachment, Attachment::Single { x_in: 1, x_out: 1 });
        assert_eq!(sim.supergraphs.len(), 1);
    }

    #[test]
    fn rejects_arc_free_component() {
        let wi = inst(3, &[(0, 1)], &[]);
        let comp = &undirected_components(&wi.graph)[0];
        assert_eq!(exact_replacement_set(&wi, comp).unwrap_err(), ReplacementError::NoArcs);
    }

    #[test]
    fn singleton_component() {
        let wi = inst(2, &[], &[(0, 1)]);
        let comp = &undirected_components(&wi.graph)[0];
        assert_eq!(exact_replacement_set(&wi, comp).unwrap().orientations, vec![Vec::<bool>::new()]);
    }

    #[test]
    fn single_edge_component() {
        // a -> x - y -> b, |w| restricted to 2 outside
        let wi = inst(4, &[(0, 1)], &[(2, 0), (1, 3)]);
        let comp = &undirected_components(&wi.graph)[0];
        let set = exact_replacement_set(&wi, comp).unwrap();
        assert!(set.len() <= 2);
        assert!(set.orientations.contains(&vec![true]));
    }

    #[test]
    fn perturbation_examples() {
        let d = MixedGraph::digraph(1, vec![]).unwrap();
        let three = WeightFn::new(vec![3]).unwrap();
        let one = WeightFn::new(vec![1]).unwrap();
        assert!(weight_perturbation_bound(&d, &three, &three));
        assert!(weight_perturbation_bound(&d, &three, &one));
    }
}
