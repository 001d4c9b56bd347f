//! Instance text formats, random generators, the Max-2-SAT gadget and an
//! adversarial family whose replacement sets must be large.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::dismember::is_dismembered;
use crate::graph::{
    mixed_cycle_exists, Component, GraphError, MixedGraph, Orientation, Score, WeightFn,
    WeightedInstance,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InstanceError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("invalid SAT instance: {0}")]
    Sat(String),
    #[error("{vars} variables exceed the brute-force cap of {cap}")]
    SatCap { vars: usize, cap: usize },
    #[error("parameter out of range: {0}")]
    Param(String),
    #[error("no instance passed the filters after {0} attempts")]
    Exhausted(usize),
}

fn perr(line: usize, msg: impl Into<String>) -> InstanceError {
    InstanceError::Parse { line, msg: msg.into() }
}

fn field<T: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T, InstanceError> {
    let tok = tok.ok_or_else(|| perr(line, format!("missing {what}")))?;
    tok.parse().map_err(|_| perr(line, format!("bad {what} '{tok}'")))
}

fn vertex(tok: Option<&str>, line: usize, n: usize) -> Result<usize, InstanceError> {
    let v: usize = field(tok, line, "vertex")?;
    if v == 0 || v > n {
        return Err(perr(line, format!("vertex {v} out of range 1..={n}")));
    }
    Ok(v - 1)
}

/// Parse the `p mmro` text format (1-based vertices, default weight 1).
pub fn parse_instance(text: &str) -> Result<(MixedGraph, WeightFn), InstanceError> {
    let mut header: Option<(usize, usize, usize)> = None;
    let mut weights: Vec<Option<u64>> = Vec::new();
    let mut edges = Vec::new();
    let mut arcs = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let mut tok = raw.split_whitespace();
        let Some(kind) = tok.next() else { continue };
        match kind {
            "c" => continue,
            "p" => {
                if header.is_some() {
                    return Err(perr(line, "duplicate header"));
                }
                if tok.next() != Some("mmro") {
                    return Err(perr(line, "expected 'p mmro <n> <edges> <arcs>'"));
                }
                let n = field(tok.next(), line, "vertex count")?;
                let me = field(tok.next(), line, "edge count")?;
                let ma = field(tok.next(), line, "arc count")?;
                header = Some((n, me, ma));
                weights = vec![None; n];
            }
            "w" | "e" | "a" => {
                let (n, _, _) = header.ok_or_else(|| perr(line, "header must come first"))?;
                let u = vertex(tok.next(), line, n)?;
                if kind == "w" {
                    let raw_w: i128 = field(tok.next(), line, "weight")?;
                    if raw_w < 0 {
                        return Err(perr(line, "negative weight"));
                    }
                    let w = u64::try_from(raw_w).map_err(|_| perr(line, "weight too large"))?;
                    if weights[u].replace(w).is_some() {
                        return Err(perr(line, format!("second weight for vertex {}", u + 1)));
                    }
                } else {
                    let v = vertex(tok.next(), line, n)?;
                    if u == v {
                        return Err(perr(line, "self-loop"));
                    }
                    if kind == "e" { edges.push((u, v)) } else { arcs.push((u, v)) }
                }
            }
            other => return Err(perr(line, format!("unknown line type '{other}'"))),
        }
        if tok.next().is_some() {
            return Err(perr(line, "trailing tokens"));
        }
    }
    let (n, me, ma) = header.ok_or_else(|| perr(0, "missing header"))?;
    if edges.len() != me || arcs.len() != ma {
        return Err(perr(
            0,
            format!("header declares {me} edges and {ma} arcs, found {} and {}", edges.len(), arcs.len()),
        ));
    }
    let g = MixedGraph::new(n, edges, arcs)?;
    let w = WeightFn::new(weights.into_iter().map(|w| w.unwrap_or(1)).collect())?;
    Ok((g, w))
}

pub fn serialize_instance(g: &MixedGraph, w: &WeightFn) -> String {
    let mut s = format!("p mmro {} {} {}\n", g.n(), g.edges().len(), g.k());
    for v in 0..g.n() {
        if w.get(v) != 1 {
            let _ = writeln!(s, "w {} {}", v + 1, w.get(v));
        }
    }
    for &(u, v) in g.edges() {
        let _ = writeln!(s, "e {} {}", u + 1, v + 1);
    }
    for &(u, v) in g.arcs() {
        let _ = writeln!(s, "a {} {}", u + 1, v + 1);
    }
    s
}

/// `s <value>` followed by one `o <tail> <head>` line per edge in index order.
pub fn format_orientation(g: &MixedGraph, o: &Orientation, value: Score) -> String {
    let mut s = format!("s {value}\n");
    for e in 0..g.edges().len() {
        let (u, v) = o.arc(g, e);
        let _ = writeln!(s, "o {} {}", u + 1, v + 1);
    }
    s
}

/// Parse an orientation of `g`. Lines may come in any order; each `o u v`
/// claims an unused edge with endpoints `{u, v}` (lowest index first).
/// Returns the recorded value, if any, and the orientation.
pub fn parse_orientation(text: &str, g: &MixedGraph) -> Result<(Option<Score>, Orientation), InstanceError> {
    let mut free: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for (e, &(u, v)) in g.edges().iter().enumerate().rev() {
        free.entry((u.min(v), u.max(v))).or_default().push(e);
    }
    let mut forward: Vec<Option<bool>> = vec![None; g.edges().len()];
    let mut value = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let mut tok = raw.split_whitespace();
        match tok.next() {
            None | Some("c") => continue,
            Some("s") => value = Some(field(tok.next(), line, "value")?),
            Some("o") => {
                let u = vertex(tok.next(), line, g.n())?;
                let v = vertex(tok.next(), line, g.n())?;
                let e = free
                    .get_mut(&(u.min(v), u.max(v)))
                    .and_then(Vec::pop)
                    .ok_or_else(|| perr(line, format!("no unused edge {{{}, {}}}", u + 1, v + 1)))?;
                forward[e] = Some(g.edges()[e].0 == u);
            }
            Some(other) => return Err(perr(line, format!("unknown line type '{other}'"))),
        }
    }
    let forward = forward
        .into_iter()
        .enumerate()
        .map(|(e, f)| f.ok_or_else(|| perr(0, format!("edge {} has no direction", e + 1))))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((value, Orientation::new(forward)))
}

/// A literal: variable index (0-based) and polarity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lit {
    pub var: usize,
    pub positive: bool,
}

impl Lit {
    pub fn holds(self, assignment: &[bool]) -> bool {
        assignment[self.var] == self.positive
    }
}

/// Max-2-SAT instance with every variable in one to three clauses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SatInstance {
    var_count: usize,
    clauses: Vec<[Lit; 2]>,
}

impl SatInstance {
    /// Each clause needs two literals over distinct variables; each variable
    /// must occur in one to three clauses.
    pub fn new(var_count: usize, clauses: Vec<[Lit; 2]>) -> Result<Self, InstanceError> {
        if var_count == 0 {
            return Err(InstanceError::Sat("no variables".into()));
        }
        let mut occ = vec![0usize; var_count];
        for (i, c) in clauses.iter().enumerate() {
            for l in c {
                if l.var >= var_count {
                    return Err(InstanceError::Sat(format!("clause {} uses unknown variable", i + 1)));
                }
                occ[l.var] += 1;
            }
            if c[0].var == c[1].var {
                return Err(InstanceError::Sat(format!("clause {} repeats a variable", i + 1)));
            }
        }
        if let Some(x) = occ.iter().position(|&o| o == 0 || o > 3) {
            return Err(InstanceError::Sat(format!(
                "variable {} occurs in {} clauses (allowed 1..=3)",
                x + 1,
                occ[x]
            )));
        }
        Ok(SatInstance { var_count, clauses })
    }

    pub fn var_count(&self) -> usize {
        self.var_count
    }

    pub fn clauses(&self) -> &[[Lit; 2]] {
        &self.clauses
    }

    pub fn satisfied(&self, assignment: &[bool]) -> usize {
        self.clauses.iter().filter(|c| c[0].holds(assignment) || c[1].holds(assignment)).count()
    }
}

/// DIMACS-style: `p cnf <vars> <clauses>`, then `l1 l2 0` per clause.
pub fn parse_sat(text: &str) -> Result<SatInstance, InstanceError> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let mut tok = raw.split_whitespace().peekable();
        match tok.peek().copied() {
            None | Some("c") => continue,
            Some("p") => {
                tok.next();
                if tok.next() != Some("cnf") {
                    return Err(perr(line, "expected 'p cnf <vars> <clauses>'"));
                }
                header = Some((field(tok.next(), line, "variable count")?, field(tok.next(), line, "clause count")?));
            }
            Some(_) => {
                let (vars, _) = header.ok_or_else(|| perr(line, "header must come first"))?;
                let lits: Vec<i64> = tok.map(|t| t.parse().map_err(|_| perr(line, format!("bad literal '{t}'")))).collect::<Result<_, _>>()?;
                let [a, b, 0] = lits[..] else {
                    return Err(perr(line, "clause must be two nonzero literals and a 0"));
                };
                let lit = |x: i64| -> Result<Lit, InstanceError> {
                    let var = x.unsigned_abs() as usize;
                    if x == 0 || var > vars {
                        return Err(perr(line, format!("literal {x} out of range")));
                    }
                    Ok(Lit { var: var - 1, positive: x > 0 })
                };
                clauses.push([lit(a)?, lit(b)?]);
            }
        }
    }
    let (vars, count) = header.ok_or_else(|| perr(0, "missing header"))?;
    if clauses.len() != count {
        return Err(perr(0, format!("header declares {count} clauses, found {}", clauses.len())));
    }
    SatInstance::new(vars, clauses)
}

pub fn serialize_sat(sat: &SatInstance) -> String {
    let mut s = format!("p cnf {} {}\n", sat.var_count, sat.clauses.len());
    for c in &sat.clauses {
        let lit = |l: Lit| if l.positive { l.var as i64 + 1 } else { -(l.var as i64 + 1) };
        let _ = writeln!(s, "{} {} 0", lit(c[0]), lit(c[1]));
    }
    s
}

pub const MAX2SAT_VAR_CAP: usize = 20;

/// Best assignment by exhaustion (first optimum in binary counting order,
/// variable 0 as the lowest bit).
pub fn max2sat_brute(sat: &SatInstance) -> Result<(Vec<bool>, usize), InstanceError> {
    if sat.var_count > MAX2SAT_VAR_CAP {
        return Err(InstanceError::SatCap { vars: sat.var_count, cap: MAX2SAT_VAR_CAP });
    }
    let mut best = (Vec::new(), 0usize);
    let mut assignment = vec![false; sat.var_count];
    for mask in 0u32..1 << sat.var_count {
        for (x, a) in assignment.iter_mut().enumerate() {
            *a = mask >> x & 1 == 1;
        }
        let s = sat.satisfied(&assignment);
        if mask == 0 || s > best.1 {
            best = (assignment.clone(), s);
        }
    }
    // A uniformly random assignment satisfies 3/4 of the clauses on average.
    assert!(4 * best.1 >= 3 * sat.clauses.len(), "max-2-sat optimum below 3/4 of the clauses");
    Ok(best)
}

/// Output of the Max-2-SAT gadget.
#[derive(Clone, Debug)]
pub struct GadgetResult {
    pub instance: WeightedInstance,
    /// Unordered clause pairs sharing a variable.
    pub y_count: usize,
    /// Per clause: (source `a_C`, sink `b_C`).
    pub clause_vertices: Vec<(usize, usize)>,
    /// Per variable: (`s_x`, `s_not_x`); edge `x` joins them in that order.
    pub literal_vertices: Vec<(usize, usize)>,
}

/// Weighted acyclic instance whose optimum is `2 |Y| + max satisfied`, where
/// `Y` is the set of clause pairs sharing a variable.
pub fn gen_sat_gadget(sat: &SatInstance) -> GadgetResult {
    let m = sat.clauses.len();
    let nv = sat.var_count;
    let clause_vertices: Vec<(usize, usize)> = (0..m).map(|j| (2 * j, 2 * j + 1)).collect();
    let literal_vertices: Vec<(usize, usize)> = (0..nv).map(|x| (2 * m + 2 * x, 2 * m + 2 * x + 1)).collect();
    let edges = literal_vertices.clone();
    let mut arcs = Vec::new();
    let mut y_count = 0;
    for c in 0..m {
        for d in c + 1..m {
            let vars = |j: usize| sat.clauses[j].map(|l| l.var);
            if vars(c).iter().any(|x| vars(d).contains(x)) {
                y_count += 1;
                arcs.push((clause_vertices[c].0, clause_vertices[d].1));
                arcs.push((clause_vertices[d].0, clause_vertices[c].1));
            }
        }
    }
    for (j, clause) in sat.clauses.iter().enumerate() {
        let (a, b) = clause_vertices[j];
        for l in clause {
            let (pos, neg) = literal_vertices[l.var];
            // The literal holds iff its own s-vertex is reached from the
            // opposite one, which lets a_C reach b_C.
            let (own, other) = if l.positive { (pos, neg) } else { (neg, pos) };
            arcs.push((a, other));
            arcs.push((own, b));
        }
    }
    let n = 2 * m + 2 * nv;
    let mut w = vec![0u64; n];
    w[..2 * m].iter_mut().for_each(|x| *x = 1);
    let graph = MixedGraph::new(n, edges, arcs).expect("gadget is a valid graph");
    let instance = WeightedInstance::new(graph, WeightFn::new(w).expect("small")).expect("aligned");
    GadgetResult { instance, y_count, clause_vertices, literal_vertices }
}

/// Orientation of the gadget induced by an assignment: variable `x` true
/// orients its edge from `s_not_x` to `s_x`.
pub fn assignment_orientation(gadget: &GadgetResult, assignment: &[bool]) -> Orientation {
    assert_eq!(assignment.len(), gadget.literal_vertices.len());
    Orientation::new(assignment.iter().map(|&t| !t).collect())
}

/// Instance on which every optimal replacement set for the path component
/// has at least `q + 1` members.
#[derive(Clone, Debug)]
pub struct ReplacementFamily {
    pub q: usize,
    pub instance: WeightedInstance,
    /// The path `u_0 .. u_q`; its edges are `0..q` in path order.
    pub tree: Component,
}

impl ReplacementFamily {
    pub fn x(&self) -> usize {
        0
    }

    pub fn y(&self) -> usize {
        1
    }

    pub fn u(&self, i: usize) -> usize {
        2 + i
    }

    pub fn v(&self, i: usize) -> usize {
        3 + self.q + i
    }

    /// The orientation of the path with every edge pointing toward `u_i`.
    pub fn toward(&self, i: usize) -> Vec<bool> {
        (0..self.q).map(|j| j < i).collect()
    }

    /// Partial orientation with `v_i -> x` and `x -> v_j` for `j != i`. The
    /// path edges stay undirected and keep indices `0..q`.
    pub fn partial(&self, i: usize) -> MixedGraph {
        let g = &self.instance.graph;
        let mut arcs = g.arcs().to_vec();
        for j in 0..=self.q {
            arcs.push(if j == i { (self.v(j), self.x()) } else { (self.x(), self.v(j)) });
        }
        MixedGraph::new(g.n(), g.edges()[..self.q].to_vec(), arcs).expect("valid")
    }
}

/// Build the family for `1 <= q <= 4`: vertices `x, y, u_0..u_q, v_0..v_q`,
/// path `u_0 .. u_q`, edges `v_i - x`, arcs `x -> u_0` and `y -> u_q`,
/// weights `w(v_i) = 4^i N`, `w(u_i) = 2^(q^2 - i^2)`, `w(x) = 0`, `w(y) = N`
/// with `N = 2 C(q + 2, 2) 4^(q^2)`.
pub fn gen_replacement_lb(q: usize) -> Result<ReplacementFamily, InstanceError> {
    gen_replacement_lb_with_arc(q, false)
}

/// As `gen_replacement_lb`, but with `second_arc_to_v = true` the arc from
/// `y` goes to `v_q` instead of `u_q`.
pub fn gen_replacement_lb_with_arc(q: usize, second_arc_to_v: bool) -> Result<ReplacementFamily, InstanceError> {
    if !(1..=4).contains(&q) {
        return Err(InstanceError::Param(format!("q must be in 1..=4, got {q}")));
    }
    let n = 2 * q + 4;
    let (x, y) = (0, 1);
    let u = |i: usize| 2 + i;
    let v = |i: usize| 3 + q + i;
    let mut edges: Vec<(usize, usize)> = (0..q).map(|i| (u(i), u(i + 1))).collect();
    edges.extend((0..=q).map(|i| (v(i), x)));
    let arcs = vec![(x, u(0)), (y, if second_arc_to_v { v(q) } else { u(q) })];
    let binom = ((q + 2) * (q + 1) / 2) as u64;
    let big_n = 2 * binom * (1u64 << (2 * q * q));
    let mut w = vec![0u64; n];
    w[y] = big_n;
    for i in 0..=q {
        w[v(i)] = (1u64 << (2 * i)) * big_n;
        w[u(i)] = 1u64 << (q * q - i * i);
    }
    let graph = MixedGraph::new(n, edges, arcs)?;
    let instance = WeightedInstance::new(graph, WeightFn::new(w)?)?;
    let tree = Component { vertices: (0..=q).map(u).collect(), edges: (0..q).collect() };
    Ok(ReplacementFamily { q, instance, tree })
}

/// Post-filters for `gen_random`.
#[derive(Clone, Copy, Debug, Default)]
pub struct Filters {
    pub connected: bool,
    pub acyclic: bool,
    pub dismembered: bool,
}

pub const RANDOM_ATTEMPTS: usize = 100_000;

/// Every unordered vertex pair independently gets an edge with probability
/// `edge_prob` and an arc (random direction) with probability `arc_prob`.
/// Weights are uniform in `1..=weight_max` (all zero if `weight_max = 0`).
/// Draws repeat until the filters pass.
pub fn gen_random(
    n: usize,
    edge_prob: f64,
    arc_prob: f64,
    weight_max: u64,
    seed: u64,
    filters: Filters,
) -> Result<(MixedGraph, WeightFn), InstanceError> {
    for p in [edge_prob, arc_prob] {
        if !(0.0..=1.0).contains(&p) {
            return Err(InstanceError::Param(format!("probability {p} outside [0, 1]")));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..RANDOM_ATTEMPTS {
        let mut edges = Vec::new();
        let mut arcs = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen_bool(edge_prob) {
                    edges.push((u, v));
                }
                if rng.gen_bool(arc_prob) {
                    arcs.push(if rng.gen_bool(0.5) { (u, v) } else { (v, u) });
                }
            }
        }
        let w: Vec<u64> = (0..n).map(|_| if weight_max == 0 { 0 } else { rng.gen_range(1..=weight_max) }).collect();
        let g = MixedGraph::new(n, edges, arcs)?;
        if filters.connected && !g.is_connected() {
            continue;
        }
        if (filters.acyclic || filters.dismembered) && mixed_cycle_exists(&g) {
            continue;
        }
        let w = WeightFn::new(w)?;
        if filters.dismembered && !is_dismembered(&WeightedInstance::new(g.clone(), w.clone())?) {
            continue;
        }
        return Ok((g, w));
    }
    Err(InstanceError::Exhausted(RANDOM_ATTEMPTS))
}

/// Random recursive tree on `n` vertices with shuffled labels.
pub fn random_tree(n: usize, rng: &mut impl Rng) -> Vec<(usize, usize)> {
    let mut label: Vec<usize> = (0..n).collect();
    label.shuffle(rng);
    (1..n).map(|v| (label[rng.gen_range(0..v)], label[v])).collect()
}

/// Random connected mixed graph with exactly `m` edges and `k` arcs
/// (`m + k >= n - 1`); parallel links may occur. A single vertex gets no
/// links.
pub fn random_connected(n: usize, m: usize, k: usize, rng: &mut impl Rng) -> MixedGraph {
    assert!(n >= 1 && m + k + 1 >= n, "not enough links to connect");
    if n == 1 {
        return MixedGraph::new(1, vec![], vec![]).expect("valid");
    }
    let mut links = random_tree(n, rng);
    while links.len() < m + k {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u != v {
            links.push((u, v));
        }
    }
    links.shuffle(rng);
    let arcs = links[..k].iter().map(|&(u, v)| if rng.gen_bool(0.5) { (u, v) } else { (v, u) }).collect();
    MixedGraph::new(n, links[k..].to_vec(), arcs).expect("valid links")
}

/// Random arboresque instance on `n >= 3` vertices: a random tree on
/// `n - 1` vertices with some edges turned into arcs, plus a new vertex `r`
/// with arcs to two tree vertices. Mirrored at random.
pub fn random_arboresque(n: usize, weight_max: u64, rng: &mut impl Rng) -> WeightedInstance {
    assert!(n >= 3);
    let mut edges = Vec::new();
    let mut arcs = Vec::new();
    for (u, v) in random_tree(n - 1, rng) {
        match rng.gen_range(0..4) {
            0 => arcs.push((u, v)),
            1 => arcs.push((v, u)),
            _ => edges.push((u, v)),
        }
    }
    let r = n - 1;
    arcs.insert(0, (r, rng.gen_range(0..r)));
    arcs.push((r, rng.gen_range(0..r)));
    if rng.gen_bool(0.5) {
        arcs.iter_mut().for_each(|a| *a = (a.1, a.0));
    }
    let w = (0..n).map(|_| rng.gen_range(0..=weight_max)).collect();
    WeightedInstance::new(MixedGraph::new(n, edges, arcs).expect("valid"), WeightFn::new(w).expect("small"))
        .expect("aligned")
}

/// Random valid Max-2-SAT instance with up to `vars` variables and up to
/// `clauses` clauses; variables that end up unused are dropped.
pub fn random_sat(vars: usize, clauses: usize, rng: &mut impl Rng) -> SatInstance {
    loop {
        let mut occ = vec![0usize; vars];
        let mut list = Vec::new();
        for _ in 0..clauses * 4 {
            if list.len() == clauses {
                break;
            }
            let open: Vec<usize> = (0..vars).filter(|&x| occ[x] < 3).collect();
            if open.len() < 2 {
                break;
            }
            let pick: Vec<usize> = open.choose_multiple(rng, 2).copied().collect();
            occ[pick[0]] += 1;
            occ[pick[1]] += 1;
            list.push([
                Lit { var: pick[0], positive: rng.gen_bool(0.5) },
                Lit { var: pick[1], positive: rng.gen_bool(0.5) },
            ]);
        }
        let used: BTreeSet<usize> = list.iter().flat_map(|c| c.map(|l| l.var)).collect();
        if used.is_empty() {
            continue;
        }
        let rename: HashMap<usize, usize> = used.iter().enumerate().map(|(i, &x)| (x, i)).collect();
        let list = list
            .into_iter()
            .map(|c| c.map(|l| Lit { var: rename[&l.var], positive: l.positive }))
            .collect();
        return SatInstance::new(used.len(), list).expect("generated within bounds");
    }
}
