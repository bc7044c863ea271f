//! Shared fixtures, random generators, and independent graph-walk oracles
//! for the integration suites. The oracles here deliberately avoid the
//! decision-diagram machinery: they work on adjacency lists and plain sets so
//! that agreement with the symbolic implementations is meaningful evidence.
#![allow(dead_code)]

use std::collections::{HashMap, HashSet, VecDeque};
use std::rc::Rc;

use petgraph::algo::{is_cyclic_directed, tarjan_scc};
use petgraph::graph::{DiGraph, NodeIndex};
use rand::rngs::StdRng;
use rand::Rng;

use aggmc::logic::DdManager;
use aggmc::ltl::LtlAst;
use aggmc::model::ExplicitKs;
use aggmc::tgba::{AccSet, LazyGraph, Verdict};
use aggmc::Deadline;

/// The worked eight-state example structure over propositions a, b, c.
pub const FIG_KS_TEXT: &str = "\
ap: a b c
state 0 100
state 1 100
state 2 100
state 3 100
state 4 110
state 5 100
state 6 010
state 7 011
edge 0 1
edge 0 4
edge 1 2
edge 2 3
edge 3 1
edge 4 5
edge 5 6
edge 6 7
edge 7 4
init 0
";

pub fn fig_ks(mgr: &Rc<DdManager>) -> ExplicitKs {
    ExplicitKs::parse(mgr, FIG_KS_TEXT).expect("fixture structure parses")
}

/// A random total structure with exactly `n` states over the given
/// propositions. Every state keeps one to three distinct successors so runs
/// are always infinite.
pub fn random_ks_sized(
    mgr: &Rc<DdManager>,
    rng: &mut StdRng,
    n: usize,
    ap_names: &[&str],
) -> ExplicitKs {
    let labels: Vec<Vec<bool>> = (0..n)
        .map(|_| ap_names.iter().map(|_| rng.random()).collect())
        .collect();
    let mut edges = Vec::new();
    for s in 0..n {
        let deg = rng.random_range(1..=3usize.min(n));
        let mut targets = HashSet::new();
        while targets.len() < deg {
            targets.insert(rng.random_range(0..n));
        }
        let mut targets: Vec<usize> = targets.into_iter().collect();
        targets.sort_unstable();
        for t in targets {
            edges.push((s, t));
        }
    }
    ExplicitKs::build(mgr, ap_names, &labels, &edges, 0).expect("random structure builds")
}

pub fn random_ks(
    mgr: &Rc<DdManager>,
    rng: &mut StdRng,
    max_states: usize,
    ap_names: &[&str],
) -> ExplicitKs {
    let n = rng.random_range(1..=max_states);
    random_ks_sized(mgr, rng, n, ap_names)
}

/// A random formula of nesting depth at most `depth` over the given
/// proposition names. With `allow_x` false the result never contains a next
/// operator.
pub fn random_formula(rng: &mut StdRng, depth: usize, props: &[&str], allow_x: bool) -> LtlAst {
    if depth == 0 {
        return match rng.random_range(0..8u32) {
            0 => LtlAst::True,
            1 => LtlAst::False,
            _ => LtlAst::prop(props[rng.random_range(0..props.len())]),
        };
    }
    let sub = |rng: &mut StdRng| random_formula(rng, depth - 1, props, allow_x);
    match rng.random_range(0..10u32) {
        0 => sub(rng).not(),
        1 => {
            if allow_x {
                sub(rng).next()
            } else {
                sub(rng).eventually()
            }
        }
        2 => sub(rng).eventually(),
        3 => sub(rng).always(),
        4 => sub(rng).and(sub(rng)),
        5 => sub(rng).or(sub(rng)),
        6 => sub(rng).implies(sub(rng)),
        7 | 8 => sub(rng).until(sub(rng)),
        _ => sub(rng).release(sub(rng)),
    }
}

/// A random propositional (operator-free) formula.
pub fn random_prop_formula(rng: &mut StdRng, depth: usize, props: &[&str]) -> LtlAst {
    if depth == 0 {
        return match rng.random_range(0..8u32) {
            0 => LtlAst::True,
            1 => LtlAst::False,
            _ => LtlAst::prop(props[rng.random_range(0..props.len())]),
        };
    }
    let sub = |rng: &mut StdRng| random_prop_formula(rng, depth - 1, props);
    match rng.random_range(0..4u32) {
        0 => sub(rng).not(),
        1 => sub(rng).and(sub(rng)),
        2 => sub(rng).or(sub(rng)),
        _ => sub(rng).implies(sub(rng)),
    }
}

/// Evaluates a propositional formula under a truth function on names.
pub fn eval_prop(f: &LtlAst, truth: &dyn Fn(&str) -> bool) -> bool {
    match f {
        LtlAst::True => true,
        LtlAst::False => false,
        LtlAst::Prop(p) => truth(p),
        LtlAst::Not(g) => !eval_prop(g, truth),
        LtlAst::And(g, h) => eval_prop(g, truth) && eval_prop(h, truth),
        LtlAst::Or(g, h) => eval_prop(g, truth) || eval_prop(h, truth),
        LtlAst::Implies(g, h) => !eval_prop(g, truth) || eval_prop(h, truth),
        other => panic!("not a propositional formula: {other}"),
    }
}

/// A lazily defined product graph expanded into dense indices.
pub struct Expanded<N> {
    pub nodes: Vec<N>,
    /// Successor lists, parallel to `nodes`.
    pub succs: Vec<Vec<(AccSet, usize)>>,
}

pub fn expand<G: LazyGraph>(g: &mut G) -> Expanded<G::Node> {
    let init = g.initial().expect("initial node");
    let mut index: HashMap<G::Node, usize> = HashMap::new();
    let mut nodes = vec![init.clone()];
    let mut succs: Vec<Vec<(AccSet, usize)>> = Vec::new();
    index.insert(init.clone(), 0);
    let mut queue = VecDeque::from([init]);
    while let Some(n) = queue.pop_front() {
        let outs = g.successors(&n).expect("successor expansion");
        let mut row = Vec::with_capacity(outs.len());
        for (acc, dst) in outs.iter() {
            let next = index.len();
            let j = *index.entry(dst.clone()).or_insert_with(|| {
                nodes.push(dst.clone());
                queue.push_back(dst.clone());
                next
            });
            row.push((*acc, j));
        }
        succs.push(row);
    }
    assert_eq!(nodes.len(), succs.len());
    Expanded { nodes, succs }
}

/// Brute-force emptiness on an expanded product: non-empty iff some strongly
/// connected component carries at least one internal edge whose marks,
/// unioned over the component, cover every acceptance condition. All nodes
/// are reachable by construction of `expand`.
pub fn scc_oracle(succs: &[Vec<(AccSet, usize)>], acc_count: u32) -> Verdict {
    let mut graph: DiGraph<(), AccSet> = DiGraph::new();
    let idx: Vec<NodeIndex> = (0..succs.len()).map(|_| graph.add_node(())).collect();
    for (s, row) in succs.iter().enumerate() {
        for &(acc, t) in row {
            graph.add_edge(idx[s], idx[t], acc);
        }
    }
    let full = AccSet::full(acc_count);
    for comp in tarjan_scc(&graph) {
        let members: HashSet<NodeIndex> = comp.iter().copied().collect();
        let mut seen = AccSet::empty();
        let mut internal = false;
        for &n in &comp {
            for e in graph.edges(n) {
                if members.contains(&petgraph::visit::EdgeRef::target(&e)) {
                    internal = true;
                    seen = seen.union(*e.weight());
                }
            }
        }
        if internal && seen == full {
            return Verdict::NonEmpty;
        }
    }
    Verdict::Empty
}

/// Truth of `f` on the ultimately periodic word whose letters are
/// `letters[0..]` with `letters[loop_start..]` repeating forever. Letters
/// assign truth values to the names in `props` positionally. Least/greatest
/// fixpoints over the lasso positions give the standard semantics of until
/// and release.
pub fn eval_lasso_word(
    f: &LtlAst,
    letters: &[Vec<bool>],
    loop_start: usize,
    props: &[&str],
) -> bool {
    let n = letters.len();
    assert!(n > 0 && loop_start < n);
    let succ = |i: usize| if i + 1 < n { i + 1 } else { loop_start };
    fn vals(
        f: &LtlAst,
        letters: &[Vec<bool>],
        props: &[&str],
        succ: &dyn Fn(usize) -> usize,
    ) -> Vec<bool> {
        let n = letters.len();
        let sub = |g: &LtlAst| vals(g, letters, props, succ);
        match f {
            LtlAst::True => vec![true; n],
            LtlAst::False => vec![false; n],
            LtlAst::Prop(p) => {
                let k = props.iter().position(|q| q == p).expect("known proposition");
                letters.iter().map(|row| row[k]).collect()
            }
            LtlAst::Not(g) => sub(g).iter().map(|v| !v).collect(),
            LtlAst::And(g, h) => {
                let (g, h) = (sub(g), sub(h));
                (0..n).map(|i| g[i] && h[i]).collect()
            }
            LtlAst::Or(g, h) => {
                let (g, h) = (sub(g), sub(h));
                (0..n).map(|i| g[i] || h[i]).collect()
            }
            LtlAst::Implies(g, h) => {
                let (g, h) = (sub(g), sub(h));
                (0..n).map(|i| !g[i] || h[i]).collect()
            }
            LtlAst::Next(g) => {
                let g = sub(g);
                (0..n).map(|i| g[succ(i)]).collect()
            }
            LtlAst::Eventually(g) => {
                let g = sub(g);
                let mut cur = vec![false; n];
                loop {
                    let new: Vec<bool> = (0..n).map(|i| g[i] || cur[succ(i)]).collect();
                    if new == cur {
                        return new;
                    }
                    cur = new;
                }
            }
            LtlAst::Always(g) => {
                let g = sub(g);
                let mut cur = vec![true; n];
                loop {
                    let new: Vec<bool> = (0..n).map(|i| g[i] && cur[succ(i)]).collect();
                    if new == cur {
                        return new;
                    }
                    cur = new;
                }
            }
            LtlAst::Until(g, h) => {
                let (g, h) = (sub(g), sub(h));
                let mut cur = vec![false; n];
                loop {
                    let new: Vec<bool> =
                        (0..n).map(|i| h[i] || (g[i] && cur[succ(i)])).collect();
                    if new == cur {
                        return new;
                    }
                    cur = new;
                }
            }
            LtlAst::Release(g, h) => {
                let (g, h) = (sub(g), sub(h));
                let mut cur = vec![true; n];
                loop {
                    let new: Vec<bool> =
                        (0..n).map(|i| h[i] && (g[i] || cur[succ(i)])).collect();
                    if new == cur {
                        return new;
                    }
                    cur = new;
                }
            }
        }
    }
    vals(f, letters, props, &succ)[0]
}

/// A lasso-shaped structure whose single infinite run spells exactly the
/// ultimately periodic word described by `letters` and `loop_start`.
pub fn word_ks(
    mgr: &Rc<DdManager>,
    letters: &[Vec<bool>],
    loop_start: usize,
    props: &[&str],
) -> ExplicitKs {
    let n = letters.len();
    let mut edges: Vec<(usize, usize)> = (0..n - 1).map(|i| (i, i + 1)).collect();
    edges.push((n - 1, loop_start));
    ExplicitKs::build(mgr, props, letters, &edges, 0).expect("word structure builds")
}

/// Adjacency lists of an explicit structure, for the graph-walk references.
pub fn adjacency(ks: &ExplicitKs) -> Vec<Vec<usize>> {
    (0..ks.state_count())
        .map(|s| ks.successors(s).to_vec())
        .collect()
}

/// Reference for the target-filtered successor operator: successors of `a`
/// whose own label satisfies the filter.
pub fn walk_succ_f(adj: &[Vec<usize>], sat: &HashSet<usize>, a: &HashSet<usize>) -> HashSet<usize> {
    let mut out = HashSet::new();
    for &s in a {
        for &t in &adj[s] {
            if sat.contains(&t) {
                out.insert(t);
            }
        }
    }
    out
}

/// Reference for the source-filtered successor operator: successors of the
/// members of `a` that themselves satisfy the filter.
pub fn walk_f_succ(adj: &[Vec<usize>], sat: &HashSet<usize>, a: &HashSet<usize>) -> HashSet<usize> {
    let mut out = HashSet::new();
    for &s in a {
        if sat.contains(&s) {
            for &t in &adj[s] {
                out.insert(t);
            }
        }
    }
    out
}

fn walk_closure(
    adj: &[Vec<usize>],
    sat: &HashSet<usize>,
    a: &HashSet<usize>,
    step: fn(&[Vec<usize>], &HashSet<usize>, &HashSet<usize>) -> HashSet<usize>,
) -> HashSet<usize> {
    let mut out = a.clone();
    let mut frontier = a.clone();
    while !frontier.is_empty() {
        let mut next = HashSet::new();
        for t in step(adj, sat, &frontier) {
            if out.insert(t) {
                next.insert(t);
            }
        }
        frontier = next;
    }
    out
}

pub fn walk_reach_f(
    adj: &[Vec<usize>],
    sat: &HashSet<usize>,
    a: &HashSet<usize>,
) -> HashSet<usize> {
    walk_closure(adj, sat, a, walk_succ_f)
}

pub fn walk_f_reach(
    adj: &[Vec<usize>],
    sat: &HashSet<usize>,
    a: &HashSet<usize>,
) -> HashSet<usize> {
    walk_closure(adj, sat, a, walk_f_succ)
}

/// Reference cycle test on the subgraph induced by `a`.
pub fn walk_contains_cycle(adj: &[Vec<usize>], a: &HashSet<usize>) -> bool {
    let mut graph: DiGraph<(), ()> = DiGraph::new();
    let mut idx: HashMap<usize, NodeIndex> = HashMap::new();
    for &s in a {
        idx.insert(s, graph.add_node(()));
    }
    for &s in a {
        for &t in &adj[s] {
            if a.contains(&t) {
                graph.add_edge(idx[&s], idx[&t], ());
            }
        }
    }
    is_cyclic_directed(&graph)
}

/// Decodes an aggregate to a sorted state-id list.
pub fn sorted_ids(ks: &ExplicitKs, a: &aggmc::model::Aggregate) -> Vec<usize> {
    let mut ids = ks.decode(a).expect("aggregate decodes");
    ids.sort_unstable();
    ids
}

pub fn set_of(ids: &[usize]) -> HashSet<usize> {
    ids.iter().copied().collect()
}

pub fn no_deadline() -> Deadline {
    Deadline::none()
}
