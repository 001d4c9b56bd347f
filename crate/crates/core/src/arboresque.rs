//! Optimal orientations of trees and of "arboresque" graphs: a tree plus one
//! special arc `r -> s` where `r` (or, mirrored, `s`) has exactly two
//! incident links, both arcs in the same direction.
//!
//! The tree is rooted at `s`. Each vertex keeps a Pareto frontier of
//! profiles of its oriented subtree:
//!
//! * `b`: the subtree root is reachable from `r`;
//! * `inn` / `out`: weight of the vertices that reach / are reached from it;
//! * `reach`: weighted score of the subtree alone;
//! * `gain`: weight of `Out(v)` not already reached from `r`.
//!
//! At the root, the special arc adds exactly `w(r) * gain`.

use std::collections::HashMap;

use thiserror::Error;

use crate::graph::{score_oriented, MixedGraph, Orientation, Score, WeightFn, WeightedInstance};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArboresqueError {
    #[error("graph is neither a tree nor a tree plus one qualifying special arc")]
    NotArboresque,
    #[error("expected a connected graph without arcs")]
    NotATree,
}

/// Which end of the special arc satisfies the degree condition.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// `d+(r) = d(r) = 2`.
    Tail,
    /// `d-(s) = d(s) = 2`.
    Head,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Shape {
    /// No arcs; the underlying graph is a tree.
    Tree,
    Special { arc: usize, r: usize, s: usize, side: Side },
}

fn is_tree_without(g: &MixedGraph, skip: Option<usize>) -> bool {
    let links = g.edges().len() + g.k() - skip.is_some() as usize;
    if links + 1 != g.n() {
        return false;
    }
    let mut dsu = crate::graph::Dsu::new(g.n());
    let arcs = g.arcs().iter().enumerate().filter(|&(i, _)| Some(i) != skip).map(|(_, a)| a);
    for &(u, v) in g.edges().iter().chain(arcs) {
        if !dsu.union(u, v) {
            return false;
        }
    }
    true
}

/// Classify `wi`: a plain tree, or the first arc (by index) that can serve
/// as the special arc.
pub fn check_arboresque(wi: &WeightedInstance) -> Result<Shape, ArboresqueError> {
    shape_of(&wi.graph)
}

pub(crate) fn shape_of(g: &MixedGraph) -> Result<Shape, ArboresqueError> {
    if g.k() == 0 {
        return if g.n() > 0 && is_tree_without(g, None) {
            Ok(Shape::Tree)
        } else {
            Err(ArboresqueError::NotArboresque)
        };
    }
    for (arc, &(r, s)) in g.arcs().iter().enumerate() {
        let side = if g.out_arcs(r) == 2 && g.ug_degree(r) == 2 {
            Side::Tail
        } else if g.in_arcs(s) == 2 && g.ug_degree(s) == 2 {
            Side::Head
        } else {
            continue;
        };
        if is_tree_without(g, Some(arc)) {
            return Ok(Shape::Special { arc, r, s, side });
        }
    }
    Err(ArboresqueError::NotArboresque)
}

/// Optimal orientation of an arboresque instance and its value.
pub fn solve_arboresque(wi: &WeightedInstance) -> Result<(Orientation, Score), ArboresqueError> {
    let shape = check_arboresque(wi)?;
    Ok(solve_shape(&wi.graph, &wi.w, shape))
}

/// Optimal orientation of an arc-free tree.
pub fn solve_tree(wi: &WeightedInstance) -> Result<(Orientation, Score), ArboresqueError> {
    if wi.graph.k() != 0 {
        return Err(ArboresqueError::NotATree);
    }
    match check_arboresque(wi) {
        Ok(shape) => Ok(solve_shape(&wi.graph, &wi.w, shape)),
        Err(_) => Err(ArboresqueError::NotATree),
    }
}

pub(crate) fn solve_shape(g: &MixedGraph, w: &WeightFn, shape: Shape) -> (Orientation, Score) {
    match shape {
        Shape::Tree => run(g, w, None),
        Shape::Special { arc, r, s, side: Side::Tail } => run(g, w, Some((arc, r, s))),
        Shape::Special { arc, r, s, side: Side::Head } => {
            // Reversing every arc and every edge direction preserves scores;
            // in the reversed graph the condition sits at the tail.
            let rev = g.reversed();
            let (o, v) = run(&rev, w, Some((arc, s, r)));
            (Orientation::new(o.forward.iter().map(|f| !f).collect()), v)
        }
    }
}

#[derive(Clone, Copy, Debug)]
enum Link {
    Edge(usize),
    /// Arc pointing from the first listed endpoint (tail) to the other.
    Arc { tail: usize },
}

#[derive(Clone, Copy, Debug)]
struct Profile {
    b: bool,
    inn: u64,
    out: u64,
    gain: u64,
    reach: u128,
    prev: u32,
    child: u32,
    toward_child: bool,
}

fn prune(candidates: HashMap<(bool, u64, u64, u64), Profile>) -> Vec<Profile> {
    let mut all: Vec<Profile> = candidates.into_values().collect();
    all.sort_unstable_by(|a, b| {
        (b.b, b.reach, b.inn, b.out, b.gain).cmp(&(a.b, a.reach, a.inn, a.out, a.gain))
    });
    let mut kept: Vec<Profile> = Vec::new();
    let mut group_start = 0;
    for p in all {
        if kept.last().is_some_and(|q| q.b != p.b) {
            group_start = kept.len();
        }
        let dominated = kept[group_start..]
            .iter()
            .any(|q| q.inn >= p.inn && q.out >= p.out && q.gain >= p.gain);
        if !dominated {
            kept.push(p);
        }
    }
    kept
}

fn insert(map: &mut HashMap<(bool, u64, u64, u64), Profile>, p: Profile) {
    map.entry((p.b, p.inn, p.out, p.gain))
        .and_modify(|q| {
            if p.reach > q.reach {
                *q = p;
            }
        })
        .or_insert(p);
}

/// The DP proper. `special = (arc, r, s)` with the degree condition at `r`.
fn run(g: &MixedGraph, w: &WeightFn, special: Option<(usize, usize, usize)>) -> (Orientation, Score) {
    let n = g.n();
    let mut adj: Vec<Vec<(usize, Link)>> = vec![Vec::new(); n];
    for (e, &(u, v)) in g.edges().iter().enumerate() {
        adj[u].push((v, Link::Edge(e)));
        adj[v].push((u, Link::Edge(e)));
    }
    for (a, &(u, v)) in g.arcs().iter().enumerate() {
        if special.is_some_and(|(sa, _, _)| sa == a) {
            continue;
        }
        adj[u].push((v, Link::Arc { tail: u }));
        adj[v].push((u, Link::Arc { tail: u }));
    }
    let root = special.map_or(0, |(_, _, s)| s);
    let r = special.map(|(_, r, _)| r);

    // Root the tree.
    let mut parent = vec![usize::MAX; n];
    let mut order = vec![root];
    parent[root] = root;
    let mut i = 0;
    while i < order.len() {
        let v = order[i];
        i += 1;
        for &(u, _) in &adj[v] {
            if parent[u] == usize::MAX {
                parent[u] = v;
                order.push(u);
            }
        }
    }
    debug_assert_eq!(order.len(), n, "tree must be connected");
    let mut on_path = vec![false; n];
    if let Some(r) = r {
        let mut x = r;
        on_path[x] = true;
        while x != root {
            x = parent[x];
            on_path[x] = true;
        }
    }
    let mut children: Vec<Vec<(usize, Link)>> = vec![Vec::new(); n];
    for v in 0..n {
        for &(u, link) in &adj[v] {
            if parent[u] == v && u != root {
                children[v].push((u, link));
            }
        }
        children[v].sort_by_key(|&(u, _)| (!on_path[u], u));
    }

    let mut stages: Vec<Vec<Vec<Profile>>> = vec![Vec::new(); n];
    for &v in order.iter().rev() {
        let wv = w.get(v);
        let is_r = Some(v) == r;
        let base = Profile {
            b: is_r,
            inn: wv,
            out: wv,
            gain: if is_r { 0 } else { wv },
            reach: wv as u128 * wv.saturating_sub(1) as u128,
            prev: 0,
            child: 0,
            toward_child: false,
        };
        let mut vs = vec![vec![base]];
        for &(x, link) in &children[v] {
            let (down, up) = match link {
                Link::Edge(_) => (true, true),
                Link::Arc { tail } => (tail == v, tail == x),
            };
            let child_frontier = stages[x].last().expect("child processed");
            let current = vs.last().expect("stage");
            let mut map = HashMap::new();
            for (pi, p) in current.iter().enumerate() {
                for (ci, c) in child_frontier.iter().enumerate() {
                    if down {
                        insert(
                            &mut map,
                            Profile {
                                b: p.b,
                                inn: p.inn,
                                out: p.out + c.out,
                                gain: p.gain + if p.b { 0 } else { c.gain },
                                reach: p.reach + p.inn as u128 * c.out as u128 + c.reach,
                                prev: pi as u32,
                                child: ci as u32,
                                toward_child: true,
                            },
                        );
                    }
                    if up {
                        let b = p.b || c.b;
                        insert(
                            &mut map,
                            Profile {
                                b,
                                inn: p.inn + c.inn,
                                out: p.out,
                                gain: if b && !p.b { 0 } else { p.gain },
                                reach: p.reach + p.out as u128 * c.inn as u128 + c.reach,
                                prev: pi as u32,
                                child: ci as u32,
                                toward_child: false,
                            },
                        );
                    }
                }
            }
            vs.push(prune(map));
        }
        stages[v] = vs;
    }

    let wr = r.map_or(0, |r| w.get(r)) as u128;
    let top = stages[root].last().expect("root stage");
    let (best_idx, best_val) = top
        .iter()
        .enumerate()
        .map(|(i, p)| (i, p.reach + wr * p.gain as u128))
        .fold((0, 0u128), |acc, x| if x.1 > acc.1 { x } else { acc });

    let mut forward = vec![true; g.edges().len()];
    let mut stack = vec![(root, stages[root].len() - 1, best_idx)];
    while let Some((v, k, idx)) = stack.pop() {
        if k == 0 {
            continue;
        }
        let p = stages[v][k][idx];
        let (x, link) = children[v][k - 1];
        if let Link::Edge(e) = link {
            let (a, _) = g.edges()[e];
            forward[e] = (a == v) == p.toward_child;
        }
        stack.push((v, k - 1, p.prev as usize));
        stack.push((x, stages[x].len() - 1, p.child as usize));
    }
    let o = Orientation::new(forward);
    let value = score_oriented(g, &o, w);
    debug_assert_eq!(value, best_val, "profile value must match the witness");
    (o, value)
}
