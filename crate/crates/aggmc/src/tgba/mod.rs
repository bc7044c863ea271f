//! Transition-based generalized Büchi automata.
//!
//! Acceptance sits on transitions: a run is accepting iff for every
//! acceptance condition, infinitely many of its transitions carry that
//! condition. Guards are decision-diagram expressions over the automaton's
//! observed propositions.

pub mod emptiness;

pub use emptiness::{
    emptiness_check, explore_all, validate_lasso, CheckStats, EmptinessResult, Lasso, LazyGraph,
    Verdict,
};

use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::rc::Rc;

use crate::error::{Error, Result};
use crate::logic::{BoolExpr, DdManager, PropId};
use crate::ltl::LtlAst;

/// A set of acceptance-condition indices (at most 32 conditions).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct AccSet(u32);

impl AccSet {
    pub const MAX_CONDITIONS: u32 = 32;

    pub fn empty() -> AccSet {
        AccSet(0)
    }

    /// The set {0, …, n-1}.
    pub fn full(n: u32) -> AccSet {
        assert!(n <= Self::MAX_CONDITIONS);
        if n == 0 {
            AccSet(0)
        } else {
            AccSet(u32::MAX >> (32 - n))
        }
    }

    pub fn singleton(i: u32) -> AccSet {
        assert!(i < Self::MAX_CONDITIONS);
        AccSet(1 << i)
    }

    #[must_use]
    pub fn with(self, i: u32) -> AccSet {
        assert!(i < Self::MAX_CONDITIONS);
        AccSet(self.0 | 1 << i)
    }

    pub fn contains(self, i: u32) -> bool {
        i < Self::MAX_CONDITIONS && self.0 >> i & 1 == 1
    }

    #[must_use]
    pub fn union(self, other: AccSet) -> AccSet {
        AccSet(self.0 | other.0)
    }

    #[must_use]
    pub fn intersect(self, other: AccSet) -> AccSet {
        AccSet(self.0 & other.0)
    }

    pub fn is_subset_of(self, other: AccSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> u32 {
        self.0.count_ones()
    }

    pub fn indices(self) -> impl Iterator<Item = u32> {
        let bits = self.0;
        (0..Self::MAX_CONDITIONS).filter(move |i| bits >> i & 1 == 1)
    }
}

impl fmt::Display for AccSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        let mut first = true;
        for i in self.indices() {
            if !first {
                write!(f, " ")?;
            }
            write!(f, "{i}")?;
            first = false;
        }
        write!(f, "}}")
    }
}

impl fmt::Debug for AccSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Clone, Debug)]
pub struct TgbaEdge {
    pub dst: usize,
    pub guard: BoolExpr,
    pub acc: AccSet,
}

/// Explicit automaton with dense state ids, guard expressions over `aps`,
/// and transition-based acceptance. Construction validates that guards are
/// satisfiable, guard supports stay within `aps`, and every state is
/// reachable from the initial one.
pub struct Tgba {
    mgr: Rc<DdManager>,
    aps: Vec<PropId>,
    edges: Vec<Vec<TgbaEdge>>,
    init: usize,
    acc_count: u32,
    /// Set by the translator: whether the source formula was Next-free.
    /// `None` for imported or hand-built automata.
    stutter_invariant: Option<bool>,
    /// fv[q]: union of guard supports over all transitions reachable from q.
    fv: Vec<Vec<PropId>>,
}

impl Tgba {
    pub fn from_parts(
        mgr: Rc<DdManager>,
        aps: Vec<PropId>,
        edges: Vec<Vec<TgbaEdge>>,
        init: usize,
        acc_count: u32,
        stutter_invariant: Option<bool>,
    ) -> Result<Tgba> {
        if acc_count > AccSet::MAX_CONDITIONS {
            return Err(Error::usage(format!(
                "at most {} acceptance conditions supported",
                AccSet::MAX_CONDITIONS
            )));
        }
        let n = edges.len();
        if init >= n {
            return Err(Error::usage("initial state out of range".to_string()));
        }
        let ap_set: BTreeSet<PropId> = aps.iter().copied().collect();
        for (src, outs) in edges.iter().enumerate() {
            for e in outs {
                if e.dst >= n {
                    return Err(Error::usage(format!(
                        "edge {src} -> {} out of range",
                        e.dst
                    )));
                }
                if !e.guard.is_satisfiable() {
                    return Err(Error::usage(format!(
                        "unsatisfiable guard on edge {src} -> {}",
                        e.dst
                    )));
                }
                if !Rc::ptr_eq(e.guard.manager(), &mgr) {
                    return Err(Error::usage(
                        "guard from a different manager".to_string(),
                    ));
                }
                for p in e.guard.free_vars() {
                    if !ap_set.contains(&p) {
                        return Err(Error::usage(format!(
                            "guard on edge {src} -> {} mentions {} outside the automaton's propositions",
                            e.dst,
                            mgr.prop_name(p)
                        )));
                    }
                }
                if !e.acc.is_subset_of(AccSet::full(acc_count)) {
                    return Err(Error::usage(format!(
                        "edge {src} -> {} uses acceptance index outside 0..{acc_count}",
                        e.dst
                    )));
                }
            }
        }
        // Reachability.
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([init]);
        seen[init] = true;
        while let Some(q) = queue.pop_front() {
            for e in &edges[q] {
                if !seen[e.dst] {
                    seen[e.dst] = true;
                    queue.push_back(e.dst);
                }
            }
        }
        if let Some(q) = seen.iter().position(|s| !s) {
            return Err(Error::usage(format!(
                "state {q} unreachable from the initial state"
            )));
        }
        let fv = compute_fv(&edges);
        Ok(Tgba {
            mgr,
            aps,
            edges,
            init,
            acc_count,
            stutter_invariant,
            fv,
        })
    }

    pub fn manager(&self) -> &Rc<DdManager> {
        &self.mgr
    }

    pub fn aps(&self) -> &[PropId] {
        &self.aps
    }

    pub fn state_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.iter().map(|e| e.len()).sum()
    }

    pub fn init(&self) -> usize {
        self.init
    }

    pub fn acc_count(&self) -> u32 {
        self.acc_count
    }

    pub fn all_acc(&self) -> AccSet {
        AccSet::full(self.acc_count)
    }

    pub fn edges(&self, q: usize) -> &[TgbaEdge] {
        &self.edges[q]
    }

    pub fn stutter_invariant(&self) -> Option<bool> {
        self.stutter_invariant
    }

    /// Propositions that can still influence guards from `q` onward: the
    /// union of guard supports over all transitions reachable from `q`.
    /// Monotone along edges: fv(dst) ⊆ fv(src).
    pub fn fv(&self, q: usize) -> &[PropId] {
        &self.fv[q]
    }

    /// Disjunction of the guards of self-loops on `q` whose acceptance marks
    /// are contained in `ac`; false when there are none.
    pub fn sf(&self, q: usize, ac: AccSet) -> Result<BoolExpr> {
        let mut acc = self.mgr.mk_false();
        for e in &self.edges[q] {
            if e.dst == q && e.acc.is_subset_of(ac) {
                acc = acc.or(&e.guard)?;
            }
        }
        Ok(acc)
    }

    /// Guarantees at least one acceptance condition. If the automaton has
    /// none (every run accepting), acceptance {0} is added on depth-first
    /// back edges only: every cycle contains at least one back edge, so the
    /// language is unchanged, while edges that cannot close a cycle stay
    /// unmarked and cannot mislead aggregation heuristics keyed on accepting
    /// self-loops.
    pub fn ensure_acceptance(mut self) -> Tgba {
        if self.acc_count > 0 {
            return self;
        }
        self.acc_count = 1;
        let n = self.edges.len();
        let mut color = vec![0u8; n]; // 0 = white, 1 = on stack, 2 = done
        // Iterative DFS; stack entries are (state, next edge index).
        let mut stack: Vec<(usize, usize)> = vec![(self.init, 0)];
        color[self.init] = 1;
        loop {
            let next = match stack.last_mut() {
                None => break,
                Some((q, idx)) => {
                    let q = *q;
                    if *idx < self.edges[q].len() {
                        let i = *idx;
                        *idx += 1;
                        Some((q, i))
                    } else {
                        None
                    }
                }
            };
            match next {
                Some((q, i)) => {
                    let dst = self.edges[q][i].dst;
                    match color[dst] {
                        0 => {
                            color[dst] = 1;
                            stack.push((dst, 0));
                        }
                        // Back edge: dst is on the current DFS path.
                        1 => self.edges[q][i].acc = AccSet::singleton(0),
                        _ => {}
                    }
                }
                None => {
                    let (q, _) = stack.pop().unwrap();
                    color[q] = 2;
                }
            }
        }
        self
    }
}

fn compute_fv(edges: &[Vec<TgbaEdge>]) -> Vec<Vec<PropId>> {
    let n = edges.len();
    let mut sets: Vec<BTreeSet<PropId>> = (0..n)
        .map(|q| {
            edges[q]
                .iter()
                .flat_map(|e| e.guard.free_vars())
                .collect()
        })
        .collect();
    // Propagate along edges to a fixpoint; automata are small.
    loop {
        let mut changed = false;
        for q in 0..n {
            let mut add: Vec<PropId> = Vec::new();
            for e in &edges[q] {
                if e.dst != q {
                    for p in &sets[e.dst] {
                        if !sets[q].contains(p) {
                            add.push(*p);
                        }
                    }
                }
            }
            for p in add {
                sets[q].insert(p);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    sets.into_iter().map(|s| s.into_iter().collect()).collect()
}

impl fmt::Debug for Tgba {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Tgba({} states, {} edges, {} acc)",
            self.state_count(),
            self.edge_count(),
            self.acc_count
        )
    }
}

/// Serializes to the line-oriented exchange format:
///
/// ```text
/// ap: a b
/// acc-count: 1
/// init: 0
/// 0 0 "a & !b" {}
/// 0 1 "b" {}
/// 1 1 "true" {0}
/// ```
///
/// Guards are rendered as a disjunction of conjunctions of literals over the
/// guard's own support, so exporting an imported text is the identity once
/// the text is in this canonical form.
pub fn export_automaton(a: &Tgba) -> String {
    let mut out = String::new();
    let names: Vec<String> = a.aps.iter().map(|&p| a.mgr.prop_name(p)).collect();
    out.push_str(&format!("ap: {}\n", names.join(" ")));
    out.push_str(&format!("acc-count: {}\n", a.acc_count));
    out.push_str(&format!("init: {}\n", a.init));
    for q in 0..a.state_count() {
        for e in a.edges(q) {
            out.push_str(&format!(
                "{} {} \"{}\" {}\n",
                q,
                e.dst,
                render_guard(&a.mgr, &e.guard),
                e.acc
            ));
        }
    }
    out
}

fn render_guard(mgr: &Rc<DdManager>, g: &BoolExpr) -> String {
    if g.is_true() {
        return "true".to_string();
    }
    if g.is_false() {
        return "false".to_string();
    }
    let support = g.free_vars();
    let mut terms = Vec::new();
    for m in g.minterms(&support).unwrap_or_default() {
        let lits: Vec<String> = m
            .iter()
            .map(|(p, v)| {
                let name = mgr.prop_name(p);
                if v {
                    name
                } else {
                    format!("!{name}")
                }
            })
            .collect();
        terms.push(lits.join(" & "));
    }
    terms.join(" | ")
}

/// Parses the exchange format produced by [`export_automaton`]. Propositions
/// are declared in the manager as needed; guards must stay within the `ap:`
/// line and be satisfiable.
pub fn import_automaton(mgr: &Rc<DdManager>, text: &str) -> Result<Tgba> {
    let mut aps: Option<Vec<PropId>> = None;
    let mut acc_count: Option<u32> = None;
    let mut init: Option<usize> = None;
    let mut raw_edges: Vec<(usize, usize, BoolExpr, AccSet)> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        let err = |msg: &str| Error::format(format!("line {}: {msg}", lineno + 1));
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("ap:") {
            let mut ids = Vec::new();
            for name in rest.split_whitespace() {
                ids.push(mgr.find_or_declare(name)?);
            }
            aps = Some(ids);
        } else if let Some(rest) = line.strip_prefix("acc-count:") {
            acc_count = Some(
                rest.trim()
                    .parse::<u32>()
                    .map_err(|_| err("bad acc-count"))?,
            );
        } else if let Some(rest) = line.strip_prefix("init:") {
            init = Some(rest.trim().parse::<usize>().map_err(|_| err("bad init"))?);
        } else {
            // src dst "guard" {acc}
            let (src, rest) = line
                .split_once(char::is_whitespace)
                .ok_or_else(|| err("expected `src dst \"guard\" {acc}`"))?;
            let (dst, rest) = rest
                .trim_start()
                .split_once(char::is_whitespace)
                .ok_or_else(|| err("expected `src dst \"guard\" {acc}`"))?;
            let src: usize = src.parse().map_err(|_| err("bad source state"))?;
            let dst: usize = dst.parse().map_err(|_| err("bad destination state"))?;
            let rest = rest.trim_start();
            if !rest.starts_with('"') {
                return Err(err("guard must be quoted"));
            }
            let close = rest[1..]
                .find('"')
                .ok_or_else(|| err("unterminated guard"))?;
            let guard_src = &rest[1..1 + close];
            let after = rest[2 + close..].trim();
            if !(after.starts_with('{') && after.ends_with('}')) {
                return Err(err("expected `{acc indices}`"));
            }
            let mut acc = AccSet::empty();
            for part in after[1..after.len() - 1].split_whitespace() {
                let i: u32 = part.parse().map_err(|_| err("bad acceptance index"))?;
                if i >= AccSet::MAX_CONDITIONS {
                    return Err(err("acceptance index too large"));
                }
                acc = acc.with(i);
            }
            let ast = crate::ltl::parse_ltl(guard_src)
                .map_err(|e| err(&format!("guard: {e}")))?;
            let guard = propositional_expr(mgr, &ast)
                .map_err(|e| err(&format!("guard: {e}")))?;
            raw_edges.push((src, dst, guard, acc));
        }
    }
    let aps = aps.ok_or_else(|| Error::format("missing ap: line".to_string()))?;
    let acc_count =
        acc_count.ok_or_else(|| Error::format("missing acc-count: line".to_string()))?;
    let init = init.ok_or_else(|| Error::format("missing init: line".to_string()))?;
    let n = raw_edges
        .iter()
        .map(|&(s, d, ..)| s.max(d) + 1)
        .chain([init + 1])
        .max()
        .unwrap();
    let mut edges: Vec<Vec<TgbaEdge>> = vec![Vec::new(); n];
    for (src, dst, guard, acc) in raw_edges {
        edges[src].push(TgbaEdge { dst, guard, acc });
    }
    Tgba::from_parts(Rc::clone(mgr), aps, edges, init, acc_count, None)
}

/// Builds a guard expression from a propositional formula (no temporal
/// operators allowed); propositions must already be declared.
pub fn propositional_expr(mgr: &Rc<DdManager>, f: &LtlAst) -> Result<BoolExpr> {
    match f {
        LtlAst::True => Ok(mgr.mk_true()),
        LtlAst::False => Ok(mgr.mk_false()),
        LtlAst::Prop(name) => {
            let p = mgr
                .prop_by_name(name)
                .ok_or_else(|| Error::usage(format!("unknown proposition {name:?}")))?;
            mgr.mk_var(p)
        }
        LtlAst::Not(a) => propositional_expr(mgr, a)?.not(),
        LtlAst::And(a, b) => propositional_expr(mgr, a)?.and(&propositional_expr(mgr, b)?),
        LtlAst::Or(a, b) => propositional_expr(mgr, a)?.or(&propositional_expr(mgr, b)?),
        LtlAst::Implies(a, b) => {
            propositional_expr(mgr, a)?.implies(&propositional_expr(mgr, b)?)
        }
        _ => Err(Error::usage(
            "temporal operator in propositional context".to_string(),
        )),
    }
}
