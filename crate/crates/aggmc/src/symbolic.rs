//! Fully symbolic emptiness decisions on the monolithic product.
//!
//! The product of an automaton and a model is represented without ever
//! enumerating its states: the automaton state is log-encoded in fresh
//! decision-diagram variables placed above the model's state variables.  All
//! automaton edges are folded into one step relation over (current bits,
//! model state, next bits) — source code ∧ guard-satisfying states ∧ target
//! code — plus one subrelation per acceptance condition, so a product image
//! costs a single conjoin-quantify against the automaton factor followed by
//! the model's partitioned image, regardless of how many edges the automaton
//! has.  Two classical algorithms decide emptiness on this encoding: an
//! SCC-hull iteration using the forward relation ([`owcty`]) and a nested
//! greatest fixpoint over backward reachability ([`el`]).

use std::collections::HashMap;

use num_bigint::BigUint;

use crate::error::{Deadline, Error, Result};
use crate::logic::{BoolExpr, PropId};
use crate::model::{self, KripkeModel};
use crate::tgba::{AccSet, Tgba, Verdict};

struct SymEdge {
    src: usize,
    dst: usize,
    /// Model states satisfying the edge's guard.
    sat: BoolExpr,
    acc: AccSet,
}

/// The synchronized product in symbolic form: a set of product states is a
/// formula over the automaton bits and the model's state variables.
pub struct SymbolicProduct<'a> {
    t: &'a dyn KripkeModel,
    /// Automaton state bits, least significant first; declared above all
    /// model variables so the small automaton factor stays shallow.
    bits: Vec<PropId>,
    /// Primed automaton bits, paired with `bits` in variable order.
    bits_next: Vec<PropId>,
    /// Cube fixing the bits to each automaton state's code.
    codes: Vec<BoolExpr>,
    edges: Vec<SymEdge>,
    /// Automaton step relation over (bits, state vars, primed bits).
    aut_rel: BoolExpr,
    /// Subrelation of the edges carrying each acceptance condition.
    aut_rel_cond: Vec<BoolExpr>,
    /// Rename maps between the two bit generations.
    to_next: Vec<(PropId, PropId)>,
    to_cur: Vec<(PropId, PropId)>,
    init: BoolExpr,
    all_acc: AccSet,
    /// Counting universe: automaton bits then model state variables.
    vars: Vec<PropId>,
}

/// Disjunction of many terms, merged pairwise to keep intermediate diagrams
/// balanced.
fn union_all(mut items: Vec<BoolExpr>, empty: BoolExpr) -> Result<BoolExpr> {
    if items.is_empty() {
        return Ok(empty);
    }
    while items.len() > 1 {
        let mut next = Vec::with_capacity(items.len().div_ceil(2));
        let mut it = items.into_iter();
        while let Some(a) = it.next() {
            match it.next() {
                Some(b) => next.push(a.union(&b)?),
                None => next.push(a),
            }
        }
        items = next;
    }
    Ok(items.pop().unwrap())
}

/// Encodes the product of `a` and `t` symbolically.  Fresh bit variables are
/// declared in `t`'s manager (named uniquely, so several products can share
/// a manager); existing diagrams are unaffected.
pub fn build_symbolic_product<'a>(
    a: &'a Tgba,
    t: &'a dyn KripkeModel,
) -> Result<SymbolicProduct<'a>> {
    if !std::rc::Rc::ptr_eq(a.manager(), t.manager()) {
        return Err(Error::usage(
            "automaton and model use different managers".to_string(),
        ));
    }
    for p in a.aps() {
        if !t.aps().contains(p) {
            return Err(Error::usage(format!(
                "automaton proposition {} is not an atomic proposition of the model",
                a.manager().prop_name(*p)
            )));
        }
    }
    let mgr = t.manager();
    let n = a.state_count();
    let n_bits = if n <= 1 {
        0
    } else {
        (usize::BITS - (n - 1).leading_zeros()) as usize
    };
    // Probe for free names so repeated builds on one manager coexist; the
    // primed bit is declared right after its partner to keep them adjacent
    // in the variable order.
    let declare = |stem: String| -> Result<PropId> {
        let mut k = 0usize;
        loop {
            let name = if k == 0 { stem.clone() } else { format!("{stem}#{k}") };
            if mgr.prop_by_name(&name).is_none() {
                return mgr.declare_prop_top(&name);
            }
            k += 1;
        }
    };
    let mut bits = Vec::with_capacity(n_bits);
    let mut bits_next = Vec::with_capacity(n_bits);
    for i in 0..n_bits {
        bits.push(declare(format!("@q{i}"))?);
        bits_next.push(declare(format!("@q{i}'"))?);
    }
    let cube_for = |q: usize, over: &[PropId]| -> Result<BoolExpr> {
        let mut cube = mgr.mk_true();
        for (i, &b) in over.iter().enumerate() {
            let lit = mgr.mk_var(b)?;
            let lit = if (q >> i) & 1 == 1 { lit } else { lit.not()? };
            cube = cube.and(&lit)?;
        }
        Ok(cube)
    };
    let mut codes = Vec::with_capacity(n);
    let mut codes_next = Vec::with_capacity(n);
    for q in 0..n {
        codes.push(cube_for(q, &bits)?);
        codes_next.push(cube_for(q, &bits_next)?);
    }

    // Guard satisfaction sets, computed once per distinct guard diagram.
    let mut sat_cache: HashMap<u64, BoolExpr> = HashMap::new();
    let mut edges = Vec::new();
    for q in 0..n {
        for e in a.edges(q) {
            let sat = match sat_cache.get(&e.guard.node_id()) {
                Some(s) => s.clone(),
                None => {
                    let s = model::sat_states(t, &e.guard)?;
                    sat_cache.insert(e.guard.node_id(), s.clone());
                    s
                }
            };
            edges.push(SymEdge { src: q, dst: e.dst, sat, acc: e.acc });
        }
    }

    // Fold the edges into the monolithic automaton relation and the
    // per-condition subrelations, grouping by source state so each source
    // cube is conjoined once.
    let build_rel = |keep: &dyn Fn(AccSet) -> bool| -> Result<BoolExpr> {
        let mut by_src: Vec<Vec<BoolExpr>> = vec![Vec::new(); n];
        for e in &edges {
            if keep(e.acc) {
                by_src[e.src].push(e.sat.and(&codes_next[e.dst])?);
            }
        }
        let mut parts = Vec::new();
        for (q, terms) in by_src.into_iter().enumerate() {
            if terms.is_empty() {
                continue;
            }
            let merged = union_all(terms, mgr.mk_false())?;
            parts.push(codes[q].and(&merged)?);
        }
        union_all(parts, mgr.mk_false())
    };
    let aut_rel = build_rel(&|_| true)?;
    let mut aut_rel_cond = Vec::new();
    for c in a.all_acc().indices() {
        aut_rel_cond.push(build_rel(&|acc: AccSet| acc.contains(c))?);
    }

    let to_next: Vec<(PropId, PropId)> =
        bits.iter().copied().zip(bits_next.iter().copied()).collect();
    let to_cur: Vec<(PropId, PropId)> =
        bits_next.iter().copied().zip(bits.iter().copied()).collect();
    let init = codes[a.init()].and(t.initial().expr())?;
    let mut vars = bits.clone();
    vars.extend_from_slice(t.state_vars());
    Ok(SymbolicProduct {
        t,
        bits,
        bits_next,
        codes,
        edges,
        aut_rel,
        aut_rel_cond,
        to_next,
        to_cur,
        init,
        all_acc: a.all_acc(),
        vars,
    })
}

impl<'a> SymbolicProduct<'a> {
    /// The symbolic initial state set (a single product state).
    pub fn initial(&self) -> &BoolExpr {
        &self.init
    }

    /// Number of automaton edges folded into the step relation.
    pub fn relation_count(&self) -> usize {
        self.edges.len()
    }

    /// Cardinality of a product state set.
    pub fn count(&self, set: &BoolExpr) -> Result<BigUint> {
        set.count(&self.vars)
    }

    /// Image of `set` through the relation of edge `i` alone.
    pub fn image_edge(&self, i: usize, set: &BoolExpr) -> Result<BoolExpr> {
        let e = &self.edges[i];
        let at_src = set.and_exists(&self.codes[e.src], &self.bits)?;
        let stepped = model::image(self.t, &at_src.intersect(&e.sat)?)?;
        self.codes[e.dst].and(&stepped)
    }

    /// Image through the given automaton subrelation: resolve the automaton
    /// step (guard checked at the source state, target bits primed), push
    /// the result through the model's partitioned image with the primed bits
    /// riding along, then unprime.
    fn image_via(&self, rel: &BoolExpr, set: &BoolExpr) -> Result<BoolExpr> {
        let moved = set.and_exists(rel, &self.bits)?;
        let stepped = model::image(self.t, &moved)?;
        stepped.rename(&self.to_cur)
    }

    /// Preimage through the given automaton subrelation.
    fn preimage_via(&self, rel: &BoolExpr, set: &BoolExpr) -> Result<BoolExpr> {
        let primed = set.rename(&self.to_next)?;
        let stepped = model::preimage(self.t, &primed)?;
        stepped.and_exists(rel, &self.bits_next)
    }

    /// Image through the full step relation.
    pub fn image(&self, set: &BoolExpr) -> Result<BoolExpr> {
        self.image_via(&self.aut_rel, set)
    }

    /// Image through the edges carrying acceptance condition `cond`.
    fn image_cond(&self, set: &BoolExpr, cond: u32) -> Result<BoolExpr> {
        self.image_via(&self.aut_rel_cond[cond as usize], set)
    }

    /// Preimage through the edges whose acceptance marks contain `cond`, or
    /// through every edge when `cond` is `None`.
    fn preimage_filtered(&self, set: &BoolExpr, cond: Option<u32>) -> Result<BoolExpr> {
        match cond {
            Some(c) => self.preimage_via(&self.aut_rel_cond[c as usize], set),
            None => self.preimage_via(&self.aut_rel, set),
        }
    }

    /// Preimage through the full step relation.
    pub fn preimage(&self, set: &BoolExpr) -> Result<BoolExpr> {
        self.preimage_filtered(set, None)
    }

    /// Forward reachable set of the product.
    pub fn reachable(&self, deadline: &Deadline) -> Result<BoolExpr> {
        let mut cur = self.init.clone();
        loop {
            deadline.check()?;
            let nxt = cur.union(&self.image(&cur)?)?;
            if nxt.equals(&cur) {
                return Ok(cur);
            }
            cur = nxt;
        }
    }
}

/// Outcome of a symbolic emptiness decision.
#[derive(Clone, Debug)]
pub struct SymbolicRun {
    pub verdict: Verdict,
    /// Outer hull/fixpoint iterations until stabilization.
    pub outer_iterations: usize,
    /// Decision-diagram node count after the run (the store only grows, so
    /// this is the peak).
    pub peak_nodes: usize,
}

/// SCC-hull emptiness over the forward relation.  Starting from the
/// reachable set, the hull repeatedly drops states with no predecessor in
/// the hull, then keeps per acceptance condition only states forward
/// reachable (inside the hull) from the target of a condition-bearing edge
/// leaving the hull's interior.  The language is nonempty exactly when the
/// stable hull is nonempty.
pub fn owcty(p: &SymbolicProduct, deadline: &Deadline) -> Result<SymbolicRun> {
    let mut hull = p.reachable(deadline)?;
    let mut outer = 0usize;
    loop {
        deadline.check()?;
        outer += 1;
        let before = hull.clone();
        // Trim to states with a predecessor in the hull.
        loop {
            deadline.check()?;
            let trimmed = hull.intersect(&p.image(&hull)?)?;
            if trimmed.equals(&hull) {
                break;
            }
            hull = trimmed;
        }
        // Per condition: forward reachability inside the hull from the
        // condition's entry points.
        for cond in p.all_acc.indices() {
            let seed = p.image_cond(&hull, cond)?;
            let mut reach = seed.intersect(&hull)?;
            loop {
                deadline.check()?;
                let grown = reach.union(&p.image(&reach)?.intersect(&hull)?)?;
                if grown.equals(&reach) {
                    break;
                }
                reach = grown;
            }
            hull = reach;
        }
        // The hull only ever shrinks.
        assert!(
            hull.difference(&before).map(|d| d.is_empty()).unwrap_or(false),
            "hull grew across an iteration"
        );
        if hull.equals(&before) {
            let verdict = if hull.is_empty() {
                Verdict::Empty
            } else {
                Verdict::NonEmpty
            };
            return Ok(SymbolicRun {
                verdict,
                outer_iterations: outer,
                peak_nodes: p.t.manager().node_count(),
            });
        }
    }
}

/// Emerson–Lei emptiness: the greatest fixpoint
/// `νZ. ⋂_c Z ∩ Pre(BackReach_Z(Z ∩ Pre_c(Z)))`, evaluated inside the
/// reachable set.  A state survives when, for every acceptance condition, it
/// can reach (within the candidate set) a state with a condition-bearing
/// edge back into the candidate set.
pub fn el(p: &SymbolicProduct, deadline: &Deadline) -> Result<SymbolicRun> {
    let mut z = p.reachable(deadline)?;
    let mut outer = 0usize;
    loop {
        deadline.check()?;
        outer += 1;
        let before = z.clone();
        if p.all_acc.is_empty() {
            // No acceptance conditions: every cycle accepts, so keep states
            // with a successor in the candidate set.
            z = z.intersect(&p.preimage(&z)?)?;
        } else {
            for cond in p.all_acc.indices() {
                let seed = z.intersect(&p.preimage_filtered(&z, Some(cond))?)?;
                let mut back = seed;
                loop {
                    deadline.check()?;
                    let grown = back.union(&z.intersect(&p.preimage(&back)?)?)?;
                    if grown.equals(&back) {
                        break;
                    }
                    back = grown;
                }
                z = z.intersect(&p.preimage(&back)?)?;
            }
        }
        assert!(
            z.difference(&before).map(|d| d.is_empty()).unwrap_or(false),
            "candidate set grew across an iteration"
        );
        if z.equals(&before) {
            let verdict = if z.is_empty() {
                Verdict::Empty
            } else {
                Verdict::NonEmpty
            };
            return Ok(SymbolicRun {
                verdict,
                outer_iterations: outer,
                peak_nodes: p.t.manager().node_count(),
            });
        }
    }
}
