//! End-to-end solvers: exhaustive oracle, exact pipeline, approximation
//! scheme, and constructive lower-bound orientations.

use std::collections::VecDeque;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use thiserror::Error;

use crate::arboresque::{solve_tree, ArboresqueError};
use crate::dismember::{enumerate_dismembered, DismemberError, Member};
use crate::graph::{
    score_oriented, score_partial, undirected_components, Component, GraphError, MixedGraph,
    Orientation, Score, WeightFn, WeightedInstance,
};
use crate::reduce::{contract_weighted, lift_orientation, split_connected};
use crate::replacement::{
    eps_replacement_set_with, exact_replacement_set_with, Eps, ReplacementCache,
    ReplacementError, ReplacementSet, DEFAULT_ASSIGNMENT_CAP,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolveError {
    #[error("{edges} edges exceed the brute-force cap of {cap}")]
    BruteCap { edges: usize, cap: usize },
    #[error(transparent)]
    Dismember(#[from] DismemberError),
    #[error(transparent)]
    Replacement(#[from] ReplacementError),
    #[error(transparent)]
    Arboresque(#[from] ArboresqueError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("instance is not connected")]
    Disconnected,
    #[error("expected a tree")]
    NotATree,
    #[error("value {value} exceeds two thirds of the total {total}")]
    Unbalanced { value: u64, total: u64 },
    #[error("epsilon must be positive")]
    NonPositiveEps,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Exact,
    Approx(Eps),
    Brute,
    LowerBound,
}

#[derive(Clone, Debug, Default)]
pub struct Stats {
    /// Mixed cycles contracted before solving.
    pub contractions: usize,
    /// Connected pieces solved independently.
    pub pieces: usize,
    /// Largest dismembering set over all pieces.
    pub dismembering_size: usize,
    /// Partial orientations solved.
    pub members: usize,
    /// Largest number of undirected components in one member.
    pub max_components: usize,
    /// Largest replacement set seen.
    pub max_replacement_set: usize,
    /// Weight assignments solved by the tree DP (cache hits included).
    pub assignments: usize,
    /// Complete orientations scored in the product search.
    pub leaves: u64,
    /// Branches cut by the reachability upper bound.
    pub pruned: u64,
    /// For lower-bound orientations: whether the stated bound is guaranteed.
    pub bound_guaranteed: Option<bool>,
    pub elapsed: Duration,
}

impl Stats {
    fn absorb(&mut self, other: &Stats) {
        self.members += other.members;
        self.max_components = self.max_components.max(other.max_components);
        self.max_replacement_set = self.max_replacement_set.max(other.max_replacement_set);
        self.assignments += other.assignments;
        self.leaves += other.leaves;
        self.pruned += other.pruned;
    }
}

#[derive(Clone, Debug)]
pub struct SolveResult {
    pub orientation: Orientation,
    /// Weighted score of `orientation`, recomputed from scratch.
    pub value: Score,
    pub mode: Mode,
    pub stats: Stats,
}

#[derive(Clone, Copy, Debug)]
pub struct SolveOptions {
    /// Largest dismembering set whose `2^|F|` partial orientations are tried.
    pub max_dismember: usize,
    /// Cap on weight assignments per component.
    pub assignment_cap: usize,
    /// Solve partial orientations on the rayon pool.
    pub parallel: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { max_dismember: 24, assignment_cap: DEFAULT_ASSIGNMENT_CAP, parallel: false }
    }
}

pub const DEFAULT_BRUTE_CAP: usize = 20;

/// Try all `2^|E|` orientations. Among optimal ones the lexicographically
/// smallest direction vector wins (forward before backward, edge 0 first).
pub fn brute_force(g: &MixedGraph, w: &WeightFn, cap: usize) -> Result<SolveResult, SolveError> {
    let start = Instant::now();
    let m = g.edges().len();
    if m > cap || m >= 64 {
        return Err(SolveError::BruteCap { edges: m, cap });
    }
    if w.len() != g.n() {
        return Err(GraphError::WeightLength { got: w.len(), expected: g.n() }.into());
    }
    let mut o = Orientation::all_forward(g);
    let mut best: Option<(Score, u64)> = None;
    for counter in 0..1u64 << m {
        for (e, f) in o.forward.iter_mut().enumerate() {
            *f = counter >> (m - 1 - e) & 1 == 0;
        }
        let v = score_oriented(g, &o, w);
        if best.is_none_or(|(b, _)| v > b) {
            best = Some((v, counter));
        }
    }
    let (value, counter) = best.expect("at least one orientation");
    for (e, f) in o.forward.iter_mut().enumerate() {
        *f = counter >> (m - 1 - e) & 1 == 0;
    }
    let stats = Stats { leaves: 1 << m, elapsed: start.elapsed(), ..Stats::default() };
    Ok(SolveResult { orientation: o, value, mode: Mode::Brute, stats })
}

/// Optimal orientation of an unweighted mixed graph.
pub fn solve_exact(g: &MixedGraph, opts: &SolveOptions) -> Result<SolveResult, SolveError> {
    solve_weighted(g, &WeightFn::unit(g.n()), None, opts)
}

/// Optimal orientation for arbitrary nonnegative vertex weights.
pub fn solve_exact_weighted(
    g: &MixedGraph,
    w: &WeightFn,
    opts: &SolveOptions,
) -> Result<SolveResult, SolveError> {
    solve_weighted(g, w, None, opts)
}

/// Orientation within a factor `1 - eps` of optimal.
pub fn solve_approx(g: &MixedGraph, eps: Eps, opts: &SolveOptions) -> Result<SolveResult, SolveError> {
    solve_weighted(g, &WeightFn::unit(g.n()), Some(eps), opts)
}

pub fn solve_approx_weighted(
    g: &MixedGraph,
    w: &WeightFn,
    eps: Eps,
    opts: &SolveOptions,
) -> Result<SolveResult, SolveError> {
    solve_weighted(g, w, Some(eps), opts)
}

fn solve_weighted(
    g: &MixedGraph,
    w: &WeightFn,
    approx: Option<Eps>,
    opts: &SolveOptions,
) -> Result<SolveResult, SolveError> {
    let start = Instant::now();
    if w.len() != g.n() {
        return Err(GraphError::WeightLength { got: w.len(), expected: g.n() }.into());
    }
    if approx.is_some_and(|e| *e.numer() == 0) {
        return Err(SolveError::NonPositiveEps);
    }
    let (wi, trace) = contract_weighted(g, w);
    let mut stats = Stats { contractions: trace.steps.len(), ..Stats::default() };
    let mut forward = vec![true; wi.graph.edges().len()];
    let mut expected: Score = 0;
    let pieces = split_connected(&wi);
    stats.pieces = pieces.len();
    for piece in &pieces {
        let (value, dirs) = solve_connected(&piece.instance, approx, opts, &mut stats)?;
        expected += value;
        for (j, &d) in dirs.iter().enumerate() {
            forward[piece.edges[j]] = d;
        }
    }
    let contracted = Orientation::new(forward);
    debug_assert_eq!(score_oriented(&wi.graph, &contracted, &wi.w), expected);
    let orientation = lift_orientation(&trace, &contracted);
    let value = score_oriented(g, &orientation, w);
    assert_eq!(value, expected, "lifted value must match the contracted value");
    stats.elapsed = start.elapsed();
    let mode = approx.map_or(Mode::Exact, Mode::Approx);
    Ok(SolveResult { orientation, value, mode, stats })
}

/// Solve one connected acyclic instance; returns its value and edge directions.
fn solve_connected(
    inst: &WeightedInstance,
    approx: Option<Eps>,
    opts: &SolveOptions,
    stats: &mut Stats,
) -> Result<(Score, Vec<bool>), SolveError> {
    let g = &inst.graph;
    if g.edges().is_empty() {
        return Ok((score_oriented(g, &Orientation::new(vec![]), &inst.w), vec![]));
    }
    if g.k() == 0 {
        let (o, v) = solve_tree(inst)?;
        return Ok((v, o.forward));
    }
    let dis = enumerate_dismembered(inst, opts.max_dismember)?;
    stats.dismembering_size = stats.dismembering_size.max(dis.fixed_edges.len());
    let cache = ReplacementCache::new();
    let run = |mask: usize| -> Result<(Score, usize, Vec<bool>, Stats), SolveError> {
        let member = dis.member(mask);
        let (value, member_dirs, st) = solve_member(&member, approx, &cache, opts)?;
        let mut dirs = vec![true; g.edges().len()];
        for (j, &d) in member_dirs.iter().enumerate() {
            dirs[member.edge_origin[j]] = d;
        }
        for &(e, f) in &member.fixed {
            dirs[e] = f;
        }
        Ok((value, mask, dirs, st))
    };
    let better = |a: &(Score, usize, Vec<bool>, Stats), b: &(Score, usize, Vec<bool>, Stats)| {
        a.0 > b.0 || (a.0 == b.0 && a.1 < b.1)
    };
    let best = if opts.parallel {
        let all: Vec<_> = (0..dis.len()).into_par_iter().map(run).collect::<Result<_, _>>()?;
        let mut best: Option<(Score, usize, Vec<bool>, Stats)> = None;
        for r in all {
            stats.absorb(&r.3);
            if best.as_ref().is_none_or(|b| better(&r, b)) {
                best = Some(r);
            }
        }
        best
    } else {
        let mut best: Option<(Score, usize, Vec<bool>, Stats)> = None;
        for mask in 0..dis.len() {
            let r = run(mask)?;
            stats.absorb(&r.3);
            if best.as_ref().is_none_or(|b| better(&r, b)) {
                best = Some(r);
            }
        }
        best
    };
    let (value, _, dirs, _) = best.expect("at least one member");
    Ok((value, dirs))
}

/// Best orientation of one dismembered member: pick one replacement
/// orientation per undirected component, searching the product with an
/// upper-bound cut.
fn solve_member(
    member: &Member,
    approx: Option<Eps>,
    cache: &ReplacementCache,
    opts: &SolveOptions,
) -> Result<(Score, Vec<bool>, Stats), SolveError> {
    let inst = &member.instance;
    let g = &inst.graph;
    let k = g.k();
    let comps = undirected_components(g);
    assert!(comps.len() <= 1.max(2 * k), "too many undirected components for a dismembered member");
    let mut st = Stats { members: 1, max_components: comps.len(), ..Stats::default() };
    let mut sets: Vec<(Component, ReplacementSet)> = Vec::new();
    for comp in comps.into_iter().filter(|c| !c.edges.is_empty()) {
        let set = match approx {
            None => exact_replacement_set_with(inst, &comp, cache, opts.assignment_cap)?,
            Some(eps) => {
                let slack = eps / (392 * (k as u128).pow(3));
                eps_replacement_set_with(inst, &comp, slack, cache, opts.assignment_cap)?
            }
        };
        st.assignments += set.assignments;
        st.max_replacement_set = st.max_replacement_set.max(set.len());
        sets.push((comp, set));
    }
    sets.sort_by_key(|(_, s)| std::cmp::Reverse(s.len()));
    let mut search = Search { g, w: &inst.w, sets: &sets, best: None, leaves: 0, pruned: 0 };
    let mut dirs = vec![None; g.edges().len()];
    search.go(0, &mut dirs);
    st.leaves = search.leaves;
    st.pruned = search.pruned;
    let (value, dirs) = search.best.expect("some leaf is always reached");
    Ok((value, dirs, st))
}

struct Search<'a> {
    g: &'a MixedGraph,
    w: &'a WeightFn,
    sets: &'a [(Component, ReplacementSet)],
    best: Option<(Score, Vec<bool>)>,
    leaves: u64,
    pruned: u64,
}

impl Search<'_> {
    fn go(&mut self, i: usize, dirs: &mut Vec<Option<bool>>) {
        if i == self.sets.len() {
            let o = Orientation::new(dirs.iter().map(|d| d.expect("all assigned")).collect());
            let v = score_oriented(self.g, &o, self.w);
            self.leaves += 1;
            if self.best.as_ref().is_none_or(|(b, _)| v > *b) {
                self.best = Some((v, o.forward));
            }
            return;
        }
        if let Some((b, _)) = &self.best {
            if score_partial(self.g, dirs, self.w) <= *b {
                self.pruned += 1;
                return;
            }
        }
        let (comp, set) = &self.sets[i];
        for o in &set.orientations {
            for (pos, &e) in comp.edges.iter().enumerate() {
                dirs[e] = Some(o[pos]);
            }
            self.go(i + 1, dirs);
        }
        for &e in &comp.edges {
            dirs[e] = None;
        }
    }
}

fn tree_adjacency(t: &MixedGraph) -> Result<Vec<Vec<(usize, usize)>>, SolveError> {
    if t.k() != 0 || t.edges().len() + 1 != t.n() || !t.is_connected() {
        return Err(SolveError::NotATree);
    }
    let mut adj = vec![Vec::new(); t.n()];
    for (e, &(u, v)) in t.edges().iter().enumerate() {
        adj[u].push((v, e));
        adj[v].push((u, e));
    }
    Ok(adj)
}

/// BFS order and parent (vertex, edge) from `root`.
fn rooted(adj: &[Vec<(usize, usize)>], root: usize) -> (Vec<usize>, Vec<(usize, usize)>) {
    let mut parent = vec![(usize::MAX, usize::MAX); adj.len()];
    parent[root] = (root, usize::MAX);
    let mut order = vec![root];
    let mut i = 0;
    while i < order.len() {
        let v = order[i];
        i += 1;
        for &(u, e) in &adj[v] {
            if parent[u].0 == usize::MAX {
                parent[u] = (v, e);
                order.push(u);
            }
        }
    }
    (order, parent)
}

/// Vertex whose removal leaves the lightest heaviest component; ties go to
/// the smaller id. That component weighs at most half the tree.
pub fn centroid(t: &MixedGraph, w: &WeightFn) -> Result<usize, SolveError> {
    let adj = tree_adjacency(t)?;
    let (order, parent) = rooted(&adj, 0);
    let mut sub: Vec<u64> = (0..t.n()).map(|v| w.get(v)).collect();
    for &v in order.iter().skip(1).rev() {
        sub[parent[v].0] += sub[v];
    }
    let total = sub[0];
    let heaviest = |v: usize| -> u64 {
        let up = total - sub[v];
        adj[v]
            .iter()
            .filter(|&&(u, _)| parent[u].0 == v && u != 0)
            .map(|&(u, _)| sub[u])
            .fold(up, u64::max)
    };
    Ok((0..t.n()).min_by_key(|&v| (heaviest(v), v)).expect("nonempty tree"))
}

/// Split indices of `s` into two groups, each with sum at least `sum(s) / 3`.
/// Requires every element to be at most two thirds of the total.
pub fn balanced_partition(s: &[u64]) -> Result<(Vec<usize>, Vec<usize>), SolveError> {
    let total: u64 = s.iter().sum();
    if let Some(&bad) = s.iter().find(|&&x| 3 * x as u128 > 2 * total as u128) {
        return Err(SolveError::Unbalanced { value: bad, total });
    }
    let mut idx: Vec<usize> = (0..s.len()).collect();
    idx.sort_by_key(|&i| (std::cmp::Reverse(s[i]), i));
    let mut side = vec![false; s.len()];
    let (mut a, mut b) = (0u64, 0u64);
    for i in idx {
        if a <= b {
            a += s[i];
        } else {
            side[i] = true;
            b += s[i];
        }
    }
    // Move single elements from the heavier side while that narrows the gap.
    loop {
        let heavy_is_b = b > a;
        let diff = a.abs_diff(b);
        let pick = (0..s.len())
            .filter(|&i| side[i] == heavy_is_b && s[i] > 0 && s[i] < diff)
            .max_by_key(|&i| (s[i], std::cmp::Reverse(i)));
        let Some(i) = pick else { break };
        side[i] = !side[i];
        if heavy_is_b {
            b -= s[i];
            a += s[i];
        } else {
            a -= s[i];
            b += s[i];
        }
    }
    let first = (0..s.len()).filter(|&i| !side[i]).collect();
    let second = (0..s.len()).filter(|&i| side[i]).collect();
    Ok((first, second))
}

/// Orient tree `t` (local numbering) so that the weighted score is at least
/// `w(t)^2 / 49` whenever `w(t) >= 2`. Returns per-edge directions.
fn tree_lower_bound(t: &MixedGraph, w: &WeightFn) -> Result<Vec<bool>, SolveError> {
    let adj = tree_adjacency(t)?;
    let total = w.total();
    let mut forward = vec![true; t.edges().len()];
    if total <= 7 {
        if (0..t.n()).any(|v| w.get(v) >= 2) {
            return Ok(forward);
        }
        let positive: Vec<usize> = (0..t.n()).filter(|&v| w.get(v) > 0).collect();
        if let [u, v, ..] = positive[..] {
            // Orient the u-v path from u to v.
            let (_, parent) = rooted(&adj, v);
            let mut x = u;
            while x != v {
                let (p, e) = parent[x];
                forward[e] = t.edges()[e].0 == x;
                x = p;
            }
        }
        return Ok(forward);
    }
    let c = centroid(t, w)?;
    if 4 * w.get(c) >= total {
        return Ok(forward);
    }
    let (order, parent) = rooted(&adj, c);
    // Group vertices by the branch at c they hang from.
    let mut branch = vec![usize::MAX; t.n()];
    let mut branches: Vec<usize> = Vec::new();
    for &v in order.iter().skip(1) {
        let p = parent[v].0;
        branch[v] = if p == c {
            branches.push(v);
            branches.len() - 1
        } else {
            branch[p]
        };
    }
    let mut weights = vec![0u64; branches.len()];
    for v in 0..t.n() {
        if v != c {
            weights[branch[v]] += w.get(v);
        }
    }
    let (toward, _) = balanced_partition(&weights)?;
    let mut is_toward = vec![false; branches.len()];
    for i in toward {
        is_toward[i] = true;
    }
    for &v in order.iter().skip(1) {
        let (p, e) = parent[v];
        let (a, _) = t.edges()[e];
        // toward c: child -> parent; away: parent -> child
        forward[e] = if is_toward[branch[v]] { a == v } else { a == p };
    }
    Ok(forward)
}

/// Constructive orientation with a guaranteed fraction of `|w|^2`: at least
/// `|w|^2 / 49` without arcs (when `|w| >= 2`) and `|w|^2 / (196 k^2)` with
/// `k >= 1` arcs (when some orientation scores at least 1).
pub fn lower_bound_orientation(wi: &WeightedInstance) -> Result<SolveResult, SolveError> {
    let start = Instant::now();
    let g = &wi.graph;
    if !g.is_connected() {
        return Err(SolveError::Disconnected);
    }
    let k = g.k() as u64;
    let total = wi.w.total();
    let mut forward = vec![true; g.edges().len()];
    let guaranteed;
    if k >= 1 && total <= 2 * k {
        // Any orientation scoring at least 1 suffices here.
        guaranteed = (0..g.n()).any(|v| wi.w.get(v) >= 2) || orient_positive_path(wi, &mut forward);
    } else {
        let comps = undirected_components(g);
        let heaviest = comps
            .iter()
            .max_by_key(|c| (wi.w.sum_of(c.vertices.iter().copied()), std::cmp::Reverse(c.vertices[0])))
            .expect("nonempty graph");
        let (t, origin) = g.induced(&heaviest.vertices);
        let t = MixedGraph::new(t.n(), t.edges().to_vec(), vec![])?;
        let tw = WeightFn::new(heaviest.vertices.iter().map(|&v| wi.w.get(v)).collect())?;
        for (j, d) in tree_lower_bound(&t, &tw)?.into_iter().enumerate() {
            forward[origin[j]] = d;
        }
        guaranteed = total >= 2;
    }
    let orientation = Orientation::new(forward);
    let value = score_oriented(g, &orientation, &wi.w);
    let stats = Stats { bound_guaranteed: Some(guaranteed), elapsed: start.elapsed(), ..Stats::default() };
    Ok(SolveResult { orientation, value, mode: Mode::LowerBound, stats })
}

/// Find positive-weight `u != v` with a mixed path from `u` to `v` and orient
/// the path's edges along it.
fn orient_positive_path(wi: &WeightedInstance, forward: &mut [bool]) -> bool {
    let g = &wi.graph;
    let mut adj: Vec<Vec<(usize, Option<usize>)>> = vec![Vec::new(); g.n()];
    for (e, &(a, b)) in g.edges().iter().enumerate() {
        adj[a].push((b, Some(e)));
        adj[b].push((a, Some(e)));
    }
    for &(a, b) in g.arcs() {
        adj[a].push((b, None));
    }
    for u in (0..g.n()).filter(|&u| wi.w.get(u) > 0) {
        let mut pred: Vec<Option<(usize, Option<usize>)>> = vec![None; g.n()];
        pred[u] = Some((u, None));
        let mut queue = VecDeque::from([u]);
        while let Some(x) = queue.pop_front() {
            if x != u && wi.w.get(x) > 0 {
                let mut y = x;
                while y != u {
                    let (p, e) = pred[y].expect("bfs predecessor");
                    if let Some(e) = e {
                        forward[e] = g.edges()[e].0 == p;
                    }
                    y = p;
                }
                return true;
            }
            for &(y, e) in &adj[x] {
                if pred[y].is_none() {
                    pred[y] = Some((x, e));
                    queue.push_back(y);
                }
            }
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mixed(n: usize, e: &[(usize, usize)], a: &[(usize, usize)]) -> MixedGraph {
        MixedGraph::new(n, e.to_vec(), a.to_vec()).unwrap()
    }

    #[test]
    fn brute_small() {
        let star = mixed(4, &[(0, 1), (0, 2), (0, 3)], &[]);
        assert_eq!(brute_force(&star, &WeightFn::unit(4), 20).unwrap().value, 5);
        let p4 = mixed(4, &[(0, 1), (1, 2), (2, 3)], &[]);
        assert_eq!(brute_force(&p4, &WeightFn::unit(4), 20).unwrap().value, 6);
        let arcs = mixed(3, &[], &[(0, 1), (1, 2)]);
        let r = brute_force(&arcs, &WeightFn::unit(3), 20).unwrap();
        assert_eq!(r.value, 3);
        assert!(r.orientation.forward.is_empty());
        assert!(matches!(brute_force(&p4, &WeightFn::unit(4), 2), Err(SolveError::BruteCap { .. })));
    }

    #[test]
    fn brute_tie_break_prefers_forward() {
        let e = mixed(2, &[(0, 1)], &[]);
        assert_eq!(brute_force(&e, &WeightFn::unit(2), 20).unwrap().orientation.forward, vec![true]);
    }

    #[test]
    fn triangle_with_pendant() {
        let g = mixed(4, &[(0, 1), (1, 2), (2, 0), (2, 3)], &[]);
        let r = solve_exact(&g, &SolveOptions::default()).unwrap();
        assert_eq!(r.value, 9);
        assert_eq!(r.stats.contractions, 1);
    }

    #[test]
    fn exact_with_arcs_matches_brute() {
        let g = mixed(6, &[(0, 1), (1, 2), (3, 4)], &[(2, 3), (5, 0), (4, 5)]);
        let want = brute_force(&g, &WeightFn::unit(6), 20).unwrap().value;
        assert_eq!(solve_exact(&g, &SolveOptions::default()).unwrap().value, want);
        let par = SolveOptions { parallel: true, ..SolveOptions::default() };
        assert_eq!(solve_exact(&g, &par).unwrap().value, want);
        let approx = solve_approx(&g, Eps::new(1, 10), &SolveOptions::default()).unwrap();
        assert!(approx.value * 10 >= want * 9);
    }

    #[test]
    fn edgeless_graph() {
        let g = mixed(3, &[], &[(0, 1)]);
        let r = solve_exact(&g, &SolveOptions::default()).unwrap();
        assert_eq!(r.value, 1);
    }

    #[test]
    fn centroid_examples() {
        let p3 = mixed(3, &[(0, 1), (1, 2)], &[]);
        assert_eq!(centroid(&p3, &WeightFn::unit(3)).unwrap(), 1);
        let star = mixed(4, &[(0, 1), (0, 2), (0, 3)], &[]);
        assert_eq!(centroid(&star, &WeightFn::new(vec![0, 1, 1, 1]).unwrap()).unwrap(), 0);
    }

    #[test]
    fn partition_examples() {
        let (a, b) = balanced_partition(&[2, 2, 2]).unwrap();
        assert!(a.len().min(b.len()) >= 1);
        let (a, b) = balanced_partition(&[1, 1, 1, 1]).unwrap();
        assert_eq!((a.len(), b.len()), (2, 2));
        assert!(matches!(balanced_partition(&[5, 1]), Err(SolveError::Unbalanced { .. })));
        assert_eq!(balanced_partition(&[]).unwrap(), (vec![], vec![]));
    }

    #[test]
    fn lower_bound_small_cases() {
        let two = WeightedInstance::unit(mixed(2, &[(0, 1)], &[]));
        let r = lower_bound_orientation(&two).unwrap();
        assert_eq!(r.value, 1);
        let apart = WeightedInstance::unit(mixed(2, &[], &[]));
        assert_eq!(lower_bound_orientation(&apart).unwrap_err(), SolveError::Disconnected);
    }

    #[test]
    fn lower_bound_on_long_path() {
        let n = 12;
        let edges: Vec<(usize, usize)> = (0..n - 1).map(|i| (i, i + 1)).collect();
        let wi = WeightedInstance::unit(mixed(n, &edges, &[]));
        let r = lower_bound_orientation(&wi).unwrap();
        assert!(r.value * 16 >= (n * n) as u128);
    }
}
