//! On-the-fly emptiness check for lazily expanded product graphs.
//!
//! Every product in this crate implements [`LazyGraph`]; the check is a
//! single-pass depth-first search that maintains a stack of candidate
//! strongly connected components and merges them on back edges while
//! accumulating the acceptance marks seen inside each component
//! (Couvreur-style). It stops as soon as one component's accumulated marks
//! cover the whole acceptance universe, so a non-empty verdict never expands
//! more of the product than needed to certify it.

use std::collections::{HashMap, HashSet, VecDeque};
use std::hash::Hash;
use std::rc::Rc;

use crate::error::{Deadline, Error, Result};
use crate::tgba::AccSet;

/// A graph whose nodes and edges are produced on demand. Implementations
/// must be deterministic and repeatable: the same node always yields the
/// same successor sequence.
pub trait LazyGraph {
    type Node: Clone + Eq + Hash + std::fmt::Debug;

    fn initial(&mut self) -> Result<Self::Node>;

    /// Successor edges of `n` in a fixed order. Implementations cache, so
    /// repeated calls are cheap and do not grow the explored region.
    fn successors(&mut self, n: &Self::Node) -> Result<Rc<Vec<(AccSet, Self::Node)>>>;

    /// Number of acceptance conditions of the product.
    fn acc_count(&self) -> u32;

    /// Human-readable node description for counterexample display.
    fn describe(&self, n: &Self::Node) -> String {
        format!("{n:?}")
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Verdict {
    Empty,
    NonEmpty,
}

/// An ultimately periodic run: `prefix` leads from the initial node to the
/// cycle's first node; `cycle` returns to its own first node. Each entry
/// carries the acceptance marks of the edge leaving that node within the
/// lasso; the marks on the cycle cover the whole acceptance universe.
#[derive(Clone, Debug)]
pub struct Lasso<N> {
    pub prefix: Vec<(N, AccSet)>,
    pub cycle: Vec<(N, AccSet)>,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct CheckStats {
    /// Nodes whose successor list was computed.
    pub expanded: usize,
    /// Successor edges scanned.
    pub edges: usize,
}

#[derive(Debug)]
pub struct EmptinessResult<N> {
    pub verdict: Verdict,
    pub lasso: Option<Lasso<N>>,
    pub stats: CheckStats,
}

struct Root {
    index: usize,
    acc: AccSet,
}

struct TodoEntry<N> {
    node: N,
    succs: Rc<Vec<(AccSet, N)>>,
    next: usize,
}

/// Decides language emptiness of the product and, when non-empty, returns an
/// accepting lasso over the expanded part of the graph.
pub fn emptiness_check<G: LazyGraph>(
    g: &mut G,
    deadline: &Deadline,
) -> Result<EmptinessResult<G::Node>> {
    let full = AccSet::full(g.acc_count());
    let mut stats = CheckStats::default();
    // Discovery index per node; 0 marks dead (fully explored, not accepting).
    let mut index: HashMap<G::Node, usize> = HashMap::new();
    let mut live: Vec<G::Node> = Vec::new();
    let mut roots: Vec<Root> = Vec::new();
    // Acceptance marks of the depth-first tree edge that entered each root.
    let mut arcs: Vec<AccSet> = Vec::new();
    let mut todo: Vec<TodoEntry<G::Node>> = Vec::new();

    let init = g.initial()?;
    index.insert(init.clone(), 1);
    live.push(init.clone());
    roots.push(Root { index: 1, acc: AccSet::empty() });
    arcs.push(AccSet::empty());
    let succs = g.successors(&init)?;
    stats.expanded += 1;
    todo.push(TodoEntry { node: init, succs, next: 0 });

    let mut steps: u32 = 0;
    while let Some(top) = todo.last_mut() {
        steps = steps.wrapping_add(1);
        if steps % 512 == 0 {
            deadline.check()?;
        }
        if top.next >= top.succs.len() {
            // Node fully scanned; close its component if it is the root.
            let entry = todo.pop().unwrap();
            let idx = index[&entry.node];
            if roots.last().map(|r| r.index) == Some(idx) {
                roots.pop();
                arcs.pop();
                while live.len() >= idx {
                    let dead = live.pop().unwrap();
                    index.insert(dead, 0);
                }
            }
            continue;
        }
        let (acc, dst) = top.succs[top.next].clone();
        top.next += 1;
        stats.edges += 1;
        match index.get(&dst).copied() {
            None => {
                let idx = live.len() + 1;
                index.insert(dst.clone(), idx);
                live.push(dst.clone());
                roots.push(Root { index: idx, acc: AccSet::empty() });
                arcs.push(acc);
                let succs = g.successors(&dst)?;
                stats.expanded += 1;
                todo.push(TodoEntry { node: dst, succs, next: 0 });
            }
            Some(0) => {} // dead region
            Some(i) => {
                // Edge into the live region: merge the components on the
                // root stack down to the one containing dst.
                let mut gathered = acc;
                while roots.last().map(|r| r.index) > Some(i) {
                    let r = roots.pop().unwrap();
                    gathered = gathered.union(r.acc).union(arcs.pop().unwrap());
                }
                let top_root = roots.last_mut().unwrap();
                top_root.acc = top_root.acc.union(gathered);
                if top_root.acc == full {
                    let scc_start = top_root.index;
                    let lasso =
                        extract_lasso(g, &todo, &live, scc_start, full, deadline, &mut stats)?;
                    return Ok(EmptinessResult {
                        verdict: Verdict::NonEmpty,
                        lasso: Some(lasso),
                        stats,
                    });
                }
            }
        }
    }
    Ok(EmptinessResult {
        verdict: Verdict::Empty,
        lasso: None,
        stats,
    })
}

/// Builds the counterexample once an accepting component is found. The
/// component is `live[scc_start-1..]`; it is strongly connected and every
/// acceptance condition occurs on some edge inside it, so a covering cycle
/// can be stitched together by repeated shortest-path searches that never
/// leave the already-expanded region.
fn extract_lasso<G: LazyGraph>(
    g: &mut G,
    todo: &[TodoEntry<G::Node>],
    live: &[G::Node],
    scc_start: usize,
    full: AccSet,
    deadline: &Deadline,
    stats: &mut CheckStats,
) -> Result<Lasso<G::Node>> {
    let comp: HashSet<G::Node> = live[scc_start - 1..].iter().cloned().collect();
    // The depth-first path enters the component exactly once and stays
    // (everything below the entry point on the todo stack is in it).
    let entry_pos = todo
        .iter()
        .position(|e| comp.contains(&e.node))
        .expect("accepting component not on the search path");
    let mut prefix = Vec::with_capacity(entry_pos);
    for i in 0..entry_pos {
        let e = &todo[i];
        // The tree edge to the next path node is the last one scanned.
        let (acc, dst) = e.succs[e.next - 1].clone();
        debug_assert_eq!(dst, todo[i + 1].node);
        let _ = dst;
        prefix.push((e.node.clone(), acc));
    }
    let anchor = todo[entry_pos].node.clone();

    // Shortest path inside the component from `from` to an edge satisfying
    // `hit`; returns the traversed edges (src, acc, dst).
    type Edge<N> = (N, AccSet, N);
    let mut bfs = |from: &G::Node,
                   hit: &dyn Fn(&G::Node, AccSet, &G::Node) -> bool,
                   stats: &mut CheckStats|
     -> Result<Vec<Edge<G::Node>>> {
        let mut parent: HashMap<G::Node, Edge<G::Node>> = HashMap::new();
        let mut queue = VecDeque::from([from.clone()]);
        let mut seen: HashSet<G::Node> = HashSet::from([from.clone()]);
        while let Some(u) = queue.pop_front() {
            deadline.check()?;
            let succs = g.successors(&u)?;
            for (acc, v) in succs.iter() {
                if !comp.contains(v) {
                    continue;
                }
                stats.edges += 1;
                if hit(&u, *acc, v) {
                    let mut path = vec![(u.clone(), *acc, v.clone())];
                    let mut cur = u;
                    while &cur != from {
                        let e = parent[&cur].clone();
                        cur = e.0.clone();
                        path.push(e);
                    }
                    path.reverse();
                    return Ok(path);
                }
                if seen.insert(v.clone()) {
                    parent.insert(v.clone(), (u.clone(), *acc, v.clone()));
                    queue.push_back(v.clone());
                }
            }
        }
        unreachable!("target not reachable inside a strongly connected component")
    };

    let mut cycle_edges: Vec<Edge<G::Node>> = Vec::new();
    let mut missing = full;
    let mut cur = anchor.clone();
    while !missing.is_empty() {
        let path = bfs(
            &cur,
            &|_, acc, _| !acc.intersect(missing).is_empty(),
            stats,
        )?;
        // Remove every condition covered anywhere along the path.
        let mut covered = AccSet::empty();
        for (_, acc, _) in &path {
            covered = covered.union(*acc);
        }
        missing = missing.intersect(covered_complement(covered, full));
        cur = path.last().unwrap().2.clone();
        cycle_edges.extend(path);
    }
    if cur != anchor || cycle_edges.is_empty() {
        let path = bfs(&cur, &|_, _, v| *v == anchor, stats)?;
        cycle_edges.extend(path);
    }
    let cycle = cycle_edges
        .into_iter()
        .map(|(src, acc, _)| (src, acc))
        .collect();
    Ok(Lasso { prefix, cycle })
}

fn covered_complement(covered: AccSet, full: AccSet) -> AccSet {
    // full \ covered, expressed with the available set ops.
    let mut out = AccSet::empty();
    for i in full.indices() {
        if !covered.contains(i) {
            out = out.with(i);
        }
    }
    out
}

/// Exhaustively expands the graph; returns (reachable nodes, edges). Used
/// for full-size baselines and by tests.
pub fn explore_all<G: LazyGraph>(g: &mut G, deadline: &Deadline) -> Result<(usize, usize)> {
    let init = g.initial()?;
    let mut seen: HashSet<G::Node> = HashSet::from([init.clone()]);
    let mut queue = VecDeque::from([init]);
    let mut edges = 0usize;
    while let Some(n) = queue.pop_front() {
        deadline.check()?;
        for (_, dst) in g.successors(&n)?.iter() {
            edges += 1;
            if seen.insert(dst.clone()) {
                queue.push_back(dst.clone());
            }
        }
    }
    Ok((seen.len(), edges))
}

/// Replays a lasso against the graph: every step must be an actual edge with
/// the recorded acceptance marks, the prefix must start at the initial node,
/// the cycle must close on its first node, and the cycle's marks must cover
/// the acceptance universe.
pub fn validate_lasso<G: LazyGraph>(g: &mut G, lasso: &Lasso<G::Node>) -> Result<()> {
    if lasso.cycle.is_empty() {
        return Err(Error::usage("lasso cycle is empty".to_string()));
    }
    let init = g.initial()?;
    let first = lasso
        .prefix
        .first()
        .map(|(n, _)| n)
        .unwrap_or(&lasso.cycle[0].0);
    if *first != init {
        return Err(Error::usage("lasso does not start at the initial node".to_string()));
    }
    let mut check_edge = |src: &G::Node, acc: AccSet, dst: &G::Node| -> Result<()> {
        let succs = g.successors(src)?;
        if succs.iter().any(|(a, d)| *a == acc && d == dst) {
            Ok(())
        } else {
            Err(Error::usage(format!(
                "lasso step {} -> {} with marks {} is not an edge",
                g.describe(src),
                g.describe(dst),
                acc
            )))
        }
    };
    let full_path: Vec<&(G::Node, AccSet)> =
        lasso.prefix.iter().chain(lasso.cycle.iter()).collect();
    for i in 0..full_path.len() {
        let (src, acc) = full_path[i];
        let dst = if i + 1 < full_path.len() {
            &full_path[i + 1].0
        } else {
            &lasso.cycle[0].0
        };
        check_edge(src, *acc, dst)?;
    }
    let mut covered = AccSet::empty();
    for (_, acc) in &lasso.cycle {
        covered = covered.union(*acc);
    }
    if covered != AccSet::full(g.acc_count()) {
        return Err(Error::usage(format!(
            "cycle marks {covered} do not cover the acceptance universe"
        )));
    }
    Ok(())
}
