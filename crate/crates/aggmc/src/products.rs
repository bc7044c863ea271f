//! Product constructions between an automaton and a model: the plain
//! synchronized product, the observation graph (and its product), the
//! observation product, the self-loop aggregation product (plus its
//! terminal-state variant), and one-step successor aggregation.
//!
//! Every construction implements [`LazyGraph`], expanding successors on
//! demand and caching them, so the emptiness check only pays for the part of
//! the product it actually visits.  Successor enumeration order is fixed
//! (automaton edges in declaration order, state classes by least member), so
//! two builds of the same product explore identically.

use std::collections::HashMap;
use std::rc::Rc;

use crate::error::{Deadline, Error, Result};
use crate::logic::{Assignment, BoolExpr, PropId};
use crate::model::{self, Aggregate, ExplicitKs, KripkeModel};
use crate::tgba::{AccSet, LazyGraph, Tgba};

/// Conjunction of literals fixing every proposition in the assignment.
fn assignment_expr(m: &dyn KripkeModel, rho: &Assignment) -> Result<BoolExpr> {
    let mgr = m.manager();
    let mut acc = mgr.mk_true();
    for (p, v) in rho.iter() {
        let lit = mgr.mk_var(p)?;
        let lit = if v { lit } else { lit.not()? };
        acc = acc.and(&lit)?;
    }
    Ok(acc)
}

fn check_alphabet(a: &Tgba, t: &dyn KripkeModel) -> Result<()> {
    if !Rc::ptr_eq(a.manager(), t.manager()) {
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
    Ok(())
}

/// The label of a singleton/homogeneous aggregate over `obs`; usage error
/// when the set mixes labels.
fn label_or_err(
    t: &dyn KripkeModel,
    a: &Aggregate,
    obs: &[PropId],
    what: &str,
) -> Result<Assignment> {
    model::label_of(t, a, obs)?.ok_or_else(|| {
        Error::usage(format!("{what} is not homogeneous over the observed propositions"))
    })
}

/// Expansion counters shared by all product constructions.
#[derive(Clone, Copy, Debug, Default)]
pub struct ProductStats {
    /// Nodes whose successors have been computed (and cached).
    pub expanded: usize,
    /// Total successor edges across expanded nodes.
    pub edges: usize,
}

macro_rules! impl_stats {
    ($ty:ident) => {
        impl<'a> $ty<'a> {
            /// Counters over the expanded (cached) part of the graph.
            pub fn stats(&self) -> ProductStats {
                ProductStats {
                    expanded: self.cache.len(),
                    edges: self.cache.values().map(|v| v.len()).sum(),
                }
            }
        }
    };
}

// ---------------------------------------------------------------------------
// Plain synchronized product
// ---------------------------------------------------------------------------

/// Product of an automaton and a model over concrete states: nodes `(q, s)`
/// with `s` a total assignment over the model's state variables.
pub struct PlainProduct<'a> {
    a: &'a Tgba,
    t: &'a dyn KripkeModel,
    deadline: Deadline,
    init: (usize, Assignment),
    cache: HashMap<(usize, Assignment), Rc<Vec<(AccSet, (usize, Assignment))>>>,
}

impl_stats!(PlainProduct);

/// Builds the plain synchronized product.  From `(q1, s1)` there is an edge
/// to `(q2, s2)` for every automaton edge `q1 → (f, ac) → q2` whose guard is
/// satisfied by the label of `s1` and every model transition `s1 → s2`; the
/// edge carries `ac`.
pub fn plain_product<'a>(
    a: &'a Tgba,
    t: &'a dyn KripkeModel,
    deadline: Deadline,
) -> Result<PlainProduct<'a>> {
    check_alphabet(a, t)?;
    let init_states = t.initial();
    let s0 = init_states
        .expr()
        .first_minterm(t.state_vars())?
        .ok_or_else(|| Error::usage("model has no initial state".to_string()))?;
    // A multi-state initial set has no single product start.
    if !init_states
        .expr()
        .equals(&assignment_expr(t, &s0)?)
    {
        return Err(Error::usage(
            "plain product requires a single initial state".to_string(),
        ));
    }
    Ok(PlainProduct {
        a,
        t,
        deadline,
        init: (a.init(), s0),
        cache: HashMap::new(),
    })
}

impl<'a> PlainProduct<'a> {
    fn state_label(&self, s: &Assignment) -> Result<Assignment> {
        let cube = assignment_expr(self.t, s)?;
        label_or_err(self.t, &Aggregate::from_expr(cube), self.t.aps(), "state")
    }
}

impl<'a> LazyGraph for PlainProduct<'a> {
    type Node = (usize, Assignment);

    fn initial(&mut self) -> Result<Self::Node> {
        Ok(self.init.clone())
    }

    fn successors(&mut self, n: &Self::Node) -> Result<Rc<Vec<(AccSet, Self::Node)>>> {
        if let Some(cached) = self.cache.get(n) {
            return Ok(Rc::clone(cached));
        }
        self.deadline.check()?;
        let (q1, s1) = n;
        let label = self.state_label(s1)?;
        let cube = assignment_expr(self.t, s1)?;
        let image = model::image(self.t, &cube)?;
        let succ_states = image.minterms(self.t.state_vars())?;
        let mut out = Vec::new();
        for e in self.a.edges(*q1) {
            if !e.guard.eval(&label)? {
                continue;
            }
            for s2 in &succ_states {
                out.push((e.acc, (e.dst, s2.clone())));
            }
        }
        let out = Rc::new(out);
        self.cache.insert(n.clone(), Rc::clone(&out));
        Ok(out)
    }

    fn acc_count(&self) -> u32 {
        self.a.acc_count()
    }

    fn describe(&self, n: &Self::Node) -> String {
        format!("(q{}, {})", n.0, self.t.describe_state(&n.1))
    }
}

// ---------------------------------------------------------------------------
// Observation graph
// ---------------------------------------------------------------------------

/// A node of the observation graph: either an aggregate (homogeneous over
/// the observed propositions and closed under same-label successors) or a
/// divergent sink identified by its label.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum SogNode {
    Agg(Aggregate),
    Divergent(Assignment),
}

/// The observation graph over a chosen subset of atomic propositions,
/// materialized as an explicit Kripke structure so it can feed the plain
/// product directly.
pub struct Sog {
    ks: ExplicitKs,
    nodes: Vec<SogNode>,
}

impl Sog {
    pub fn ks(&self) -> &ExplicitKs {
        &self.ks
    }

    pub fn node(&self, i: usize) -> &SogNode {
        &self.nodes[i]
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }
}

/// Builds the observation graph of `t` over `obs`:
///
/// * the initial node aggregates every state reachable from the initial one
///   through states sharing its observed label;
/// * an aggregate's successors are, per observed label class of its
///   out-of-aggregate successors, the class closed under that same label;
/// * an aggregate containing a cycle additionally steps to a divergent sink
///   carrying the aggregate's label, and divergent sinks loop on themselves.
pub fn sog_build(t: &dyn KripkeModel, obs: &[PropId], deadline: &Deadline) -> Result<Sog> {
    for p in obs {
        if !t.aps().contains(p) {
            return Err(Error::usage(format!(
                "{} is not an atomic proposition of the model",
                t.manager().prop_name(*p)
            )));
        }
    }
    let init = t.initial();
    let l0 = label_or_err(t, &init, obs, "initial state set")?;
    let a0 = model::reach_f(t, &init, &assignment_expr(t, &l0)?, deadline)?;

    let mut nodes: Vec<SogNode> = vec![SogNode::Agg(a0.clone())];
    let mut index: HashMap<SogNode, usize> = HashMap::from([(SogNode::Agg(a0), 0)]);
    let mut labels: Vec<Assignment> = vec![l0];
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut next = 0usize;
    while next < nodes.len() {
        deadline.check()?;
        let node = nodes[next].clone();
        match node {
            SogNode::Agg(a) => {
                let l = labels[next].clone();
                let fresh = model::image(t, a.expr())?.difference(a.expr())?;
                for (l2, class) in
                    model::partition_by_observed(t, &Aggregate::from_expr(fresh), obs)?
                {
                    let a2 = model::reach_f(t, &class, &assignment_expr(t, &l2)?, deadline)?;
                    let key = SogNode::Agg(a2);
                    let dst = *index.entry(key.clone()).or_insert_with(|| {
                        nodes.push(key);
                        labels.push(l2);
                        nodes.len() - 1
                    });
                    edges.push((next, dst));
                }
                if model::contains_cycle(t, &a, deadline)? {
                    let key = SogNode::Divergent(l.clone());
                    let dst = *index.entry(key.clone()).or_insert_with(|| {
                        nodes.push(key);
                        labels.push(l);
                        nodes.len() - 1
                    });
                    edges.push((next, dst));
                }
            }
            SogNode::Divergent(_) => edges.push((next, next)),
        }
        next += 1;
    }

    let mgr = t.manager();
    let ap_names: Vec<String> = obs.iter().map(|&p| mgr.prop_name(p)).collect();
    let ap_refs: Vec<&str> = ap_names.iter().map(String::as_str).collect();
    let label_bits: Vec<Vec<bool>> = labels
        .iter()
        .map(|l| obs.iter().map(|&p| l.get(p) == Some(true)).collect())
        .collect();
    let ks = ExplicitKs::build(mgr, &ap_refs, &label_bits, &edges, 0)?;
    Ok(Sog { ks, nodes })
}

// ---------------------------------------------------------------------------
// Observation product
// ---------------------------------------------------------------------------

/// A state of the observation product: an aggregate state `(q, a)` with `a`
/// homogeneous over the propositions still observable from `q` and closed
/// under same-label successors, or a divergent state `(q, l)`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum SopState {
    Agg(usize, Aggregate),
    Div(usize, Assignment),
}

/// The observation product.  The observed alphabet shrinks along the run:
/// state `(q, a)` only distinguishes the propositions some guard reachable
/// from `q` still mentions.
pub struct Sop<'a> {
    a: &'a Tgba,
    t: &'a dyn KripkeModel,
    deadline: Deadline,
    init: SopState,
    cache: HashMap<SopState, Rc<Vec<(AccSet, SopState)>>>,
}

impl_stats!(Sop);

/// Builds the observation product.  Rejects automata whose source formula
/// used the next-step operator: aggregation by observed label is only sound
/// for stutter-invariant properties.
pub fn sop<'a>(a: &'a Tgba, t: &'a dyn KripkeModel, deadline: Deadline) -> Result<Sop<'a>> {
    check_alphabet(a, t)?;
    if a.stutter_invariant() == Some(false) {
        return Err(Error::usage(
            "the observation product requires a stutter-invariant automaton \
             (the source formula uses the next-step operator)"
                .to_string(),
        ));
    }
    let init = t.initial();
    let fv0 = a.fv(a.init());
    let l0 = label_or_err(t, &init, fv0, "initial state set")?;
    let a0 = model::reach_f(t, &init, &assignment_expr(t, &l0)?, &deadline)?;
    Ok(Sop {
        a,
        t,
        deadline,
        init: SopState::Agg(a.init(), a0),
        cache: HashMap::new(),
    })
}

impl<'a> LazyGraph for Sop<'a> {
    type Node = SopState;

    fn initial(&mut self) -> Result<Self::Node> {
        Ok(self.init.clone())
    }

    fn successors(&mut self, n: &Self::Node) -> Result<Rc<Vec<(AccSet, Self::Node)>>> {
        if let Some(cached) = self.cache.get(n) {
            return Ok(Rc::clone(cached));
        }
        self.deadline.check()?;
        let mut out = Vec::new();
        match n {
            SopState::Agg(q1, a1) => {
                let l1 = label_or_err(self.t, a1, self.a.fv(*q1), "aggregate")?;
                let fresh = model::image(self.t, a1.expr())?.difference(a1.expr())?;
                let fresh = Aggregate::from_expr(fresh);
                let divergent = model::contains_cycle(self.t, a1, &self.deadline)?;
                // Class partitions per distinct target alphabet, computed
                // once each.
                let mut partitions: HashMap<Vec<PropId>, Vec<(Assignment, Aggregate)>> =
                    HashMap::new();
                for e in self.a.edges(*q1) {
                    if !e.guard.eval(&l1)? {
                        continue;
                    }
                    let fv2 = self.a.fv(e.dst).to_vec();
                    let classes = match partitions.get(&fv2) {
                        Some(c) => c.clone(),
                        None => {
                            let c = model::partition_by_observed(self.t, &fresh, &fv2)?;
                            partitions.insert(fv2.clone(), c.clone());
                            c
                        }
                    };
                    for (l2, class) in classes {
                        let a2 = model::reach_f(
                            self.t,
                            &class,
                            &assignment_expr(self.t, &l2)?,
                            &self.deadline,
                        )?;
                        out.push((e.acc, SopState::Agg(e.dst, a2)));
                    }
                    if divergent {
                        out.push((
                            e.acc,
                            SopState::Div(e.dst, l1.restrict_to(self.a.fv(e.dst))),
                        ));
                    }
                }
            }
            SopState::Div(q1, l1) => {
                for e in self.a.edges(*q1) {
                    if !e.guard.eval(l1)? {
                        continue;
                    }
                    out.push((e.acc, SopState::Div(e.dst, l1.restrict_to(self.a.fv(e.dst)))));
                }
            }
        }
        let out = Rc::new(out);
        self.cache.insert(n.clone(), Rc::clone(&out));
        Ok(out)
    }

    fn acc_count(&self) -> u32 {
        self.a.acc_count()
    }

    fn describe(&self, n: &Self::Node) -> String {
        match n {
            SopState::Agg(q, a) => {
                let c = model::count_states(self.t, a)
                    .map(|c| c.to_string())
                    .unwrap_or_else(|_| "?".to_string());
                format!("(q{q}, {c} states)")
            }
            SopState::Div(q, l) => {
                format!("(q{q}, div {})", l.render(self.t.manager()))
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Self-loop aggregation product
// ---------------------------------------------------------------------------

/// A state of the self-loop aggregation product.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct SlapState {
    pub q: usize,
    pub a: Aggregate,
}

/// The self-loop aggregation product: along an automaton edge
/// `q1 → (f, ac) → q2`, the new aggregate collects the `f`-successors of the
/// current one and then closes under the guards of `q2`'s self-loops whose
/// acceptance marks are within `ac`.  Sound for full LTL.
pub struct Slap<'a> {
    a: &'a Tgba,
    t: &'a dyn KripkeModel,
    deadline: Deadline,
    init: SlapState,
    cache: HashMap<SlapState, Rc<Vec<(AccSet, SlapState)>>>,
    /// Terminal-state treatment (the FST variant) when set.
    fst: bool,
}

impl_stats!(Slap);

fn slap_impl<'a>(
    a: &'a Tgba,
    t: &'a dyn KripkeModel,
    deadline: Deadline,
    fst: bool,
) -> Result<Slap<'a>> {
    check_alphabet(a, t)?;
    let sf0 = a.sf(a.init(), AccSet::empty())?;
    let a0 = model::f_reach(t, &t.initial(), &sf0, &deadline)?;
    Ok(Slap {
        a,
        t,
        deadline,
        init: SlapState { q: a.init(), a: a0 },
        cache: HashMap::new(),
        fst,
    })
}

/// Builds the self-loop aggregation product.
pub fn slap<'a>(a: &'a Tgba, t: &'a dyn KripkeModel, deadline: Deadline) -> Result<Slap<'a>> {
    slap_impl(a, t, deadline, false)
}

/// Builds the self-loop aggregation product with fully symbolic treatment of
/// terminal automaton states: a product state whose automaton state has
/// itself as only successor gets a single accepting self-loop when an
/// in-aggregate symbolic search finds an accepting cycle, and no successors
/// otherwise.
pub fn slap_fst<'a>(
    a: &'a Tgba,
    t: &'a dyn KripkeModel,
    deadline: Deadline,
) -> Result<Slap<'a>> {
    slap_impl(a, t, deadline, true)
}

impl<'a> Slap<'a> {
    /// Whether `q` has itself as only successor (and at least one edge).
    fn is_terminal(&self, q: usize) -> bool {
        let edges = self.a.edges(q);
        !edges.is_empty() && edges.iter().all(|e| e.dst == q)
    }

    /// Whether the self-loops of terminal `q` jointly cover all acceptance
    /// conditions; if they do not, no accepting run can stay in `q`, and the
    /// terminal shortcut would be unsound to apply.
    fn self_loops_cover_acceptance(&self, q: usize) -> bool {
        let mut covered = AccSet::empty();
        for e in self.a.edges(q) {
            if e.dst == q {
                covered = covered.union(e.acc);
            }
        }
        covered == self.a.all_acc()
    }

    /// Fully symbolic search for an accepting cycle of the model restricted
    /// to the closure of `a1` under the self-loop guards of terminal `q`.
    ///
    /// The candidate set starts as that closure and shrinks to a hull: states
    /// with no successor inside the hull are dropped, then for each
    /// acceptance condition only states that can reach (inside the hull) an
    /// edge carrying that condition are kept.  The hull is nonempty exactly
    /// when an accepting lasso lies inside the aggregate.
    fn terminal_accepting_cycle(&self, q: usize, a1: &Aggregate) -> Result<bool> {
        let full = self.a.all_acc();
        let sf_all = self.a.sf(q, full)?;
        let c = model::f_reach(self.t, a1, &sf_all, &self.deadline)?;
        // Per-self-loop source filters: a step s → s' belongs to the loop's
        // relation when λ(s) satisfies its guard.
        let mut loops: Vec<(BoolExpr, AccSet)> = Vec::new();
        for e in self.a.edges(q) {
            if e.dst == q {
                loops.push((model::sat_states(self.t, &e.guard)?, e.acc));
            }
        }
        let pre_within = |x: &BoolExpr, filter: Option<u32>| -> Result<BoolExpr> {
            let mut acc = self.t.manager().mk_false();
            let pre = model::preimage(self.t, x)?;
            for (sat, ac) in &loops {
                if let Some(cond) = filter {
                    if !ac.contains(cond) {
                        continue;
                    }
                }
                acc = acc.union(&pre.intersect(sat)?)?;
            }
            Ok(acc)
        };
        let mut hull = c.expr().clone();
        loop {
            self.deadline.check()?;
            let before = hull.clone();
            // Keep states with a successor inside the hull.
            hull = hull.intersect(&pre_within(&hull, None)?)?;
            // Per condition: keep states that can reach, inside the hull, the
            // source of an edge carrying it.
            for cond in full.indices() {
                let sources = hull.intersect(&pre_within(&hull, Some(cond))?)?;
                let mut back = sources;
                loop {
                    self.deadline.check()?;
                    let grown = back.union(&hull.intersect(&pre_within(&back, None)?)?)?;
                    if grown.equals(&back) {
                        break;
                    }
                    back = grown;
                }
                hull = back;
            }
            if hull.equals(&before) {
                return Ok(!hull.is_empty());
            }
        }
    }
}

impl<'a> LazyGraph for Slap<'a> {
    type Node = SlapState;

    fn initial(&mut self) -> Result<Self::Node> {
        Ok(self.init.clone())
    }

    fn successors(&mut self, n: &Self::Node) -> Result<Rc<Vec<(AccSet, Self::Node)>>> {
        if let Some(cached) = self.cache.get(n) {
            return Ok(Rc::clone(cached));
        }
        self.deadline.check()?;
        let mut out = Vec::new();
        if self.fst && self.is_terminal(n.q) && self.self_loops_cover_acceptance(n.q) {
            if self.terminal_accepting_cycle(n.q, &n.a)? {
                out.push((self.a.all_acc(), n.clone()));
            }
        } else {
            for e in self.a.edges(n.q) {
                if e.dst == n.q && e.acc.is_empty() {
                    continue;
                }
                let stepped = model::f_succ(self.t, &n.a, &e.guard)?;
                if stepped.is_empty() {
                    continue;
                }
                let sf = self.a.sf(e.dst, e.acc)?;
                let a2 = model::f_reach(self.t, &stepped, &sf, &self.deadline)?;
                out.push((e.acc, SlapState { q: e.dst, a: a2 }));
            }
        }
        let out = Rc::new(out);
        self.cache.insert(n.clone(), Rc::clone(&out));
        Ok(out)
    }

    fn acc_count(&self) -> u32 {
        self.a.acc_count()
    }

    fn describe(&self, n: &Self::Node) -> String {
        let c = model::count_states(self.t, &n.a)
            .map(|c| c.to_string())
            .unwrap_or_else(|_| "?".to_string());
        format!("(q{}, {c} states)", n.q)
    }
}

// ---------------------------------------------------------------------------
// One-step successor aggregation
// ---------------------------------------------------------------------------

/// A state of the one-step aggregation product.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct BczState {
    pub q: usize,
    pub a: Aggregate,
}

/// One-step successor aggregation: aggregates group the direct successors of
/// the previous aggregate by their label over the automaton's propositions,
/// with no transitive closure.
pub struct Bcz<'a> {
    a: &'a Tgba,
    t: &'a dyn KripkeModel,
    deadline: Deadline,
    init: BczState,
    cache: HashMap<BczState, Rc<Vec<(AccSet, BczState)>>>,
}

impl_stats!(Bcz);

/// Builds the one-step aggregation product.
pub fn bcz_product<'a>(
    a: &'a Tgba,
    t: &'a dyn KripkeModel,
    deadline: Deadline,
) -> Result<Bcz<'a>> {
    check_alphabet(a, t)?;
    let init = t.initial();
    label_or_err(t, &init, a.aps(), "initial state set")?;
    Ok(Bcz {
        a,
        t,
        deadline,
        init: BczState { q: a.init(), a: init },
        cache: HashMap::new(),
    })
}

impl<'a> LazyGraph for Bcz<'a> {
    type Node = BczState;

    fn initial(&mut self) -> Result<Self::Node> {
        Ok(self.init.clone())
    }

    fn successors(&mut self, n: &Self::Node) -> Result<Rc<Vec<(AccSet, Self::Node)>>> {
        if let Some(cached) = self.cache.get(n) {
            return Ok(Rc::clone(cached));
        }
        self.deadline.check()?;
        let obs = self.a.aps();
        let l1 = label_or_err(self.t, &n.a, obs, "aggregate")?;
        let image = Aggregate::from_expr(model::image(self.t, n.a.expr())?);
        let classes = model::partition_by_observed(self.t, &image, obs)?;
        let mut out = Vec::new();
        for e in self.a.edges(n.q) {
            if !e.guard.eval(&l1)? {
                continue;
            }
            for (_, class) in &classes {
                out.push((e.acc, BczState { q: e.dst, a: class.clone() }));
            }
        }
        let out = Rc::new(out);
        self.cache.insert(n.clone(), Rc::clone(&out));
        Ok(out)
    }

    fn acc_count(&self) -> u32 {
        self.a.acc_count()
    }

    fn describe(&self, n: &Self::Node) -> String {
        let c = model::count_states(self.t, &n.a)
            .map(|c| c.to_string())
            .unwrap_or_else(|_| "?".to_string());
        format!("(q{}, {c} states)", n.q)
    }
}

// ---------------------------------------------------------------------------
// Concrete counterexamples
// ---------------------------------------------------------------------------

/// A concrete ultimately periodic run of the model witnessing a violation:
/// states are total assignments over the model's state variables.
#[derive(Clone, Debug)]
pub struct ConcreteTrace {
    pub prefix: Vec<Assignment>,
    pub cycle: Vec<Assignment>,
}

/// Produces a concrete witness trace by running the plain product, or `None`
/// when the language is empty.  The returned trace is independently
/// re-validated against the model: every consecutive pair must be a model
/// transition, every automaton guard must hold at the source state's label,
/// and the cycle's acceptance marks must cover the whole universe.
pub fn concretize(
    a: &Tgba,
    t: &dyn KripkeModel,
    deadline: Deadline,
) -> Result<Option<ConcreteTrace>> {
    let mut p = plain_product(a, t, deadline)?;
    let r = crate::tgba::emptiness_check(&mut p, &deadline)?;
    let Some(lasso) = r.lasso else {
        return Ok(None);
    };
    crate::tgba::validate_lasso(&mut p, &lasso)?;
    // Independent replay against the transition relation and labeling.
    let steps: Vec<&(usize, Assignment)> = lasso
        .prefix
        .iter()
        .map(|(n, _)| n)
        .chain(lasso.cycle.iter().map(|(n, _)| n))
        .collect();
    for i in 0..steps.len() {
        let (_, s1) = steps[i];
        let (_, s2) = if i + 1 < steps.len() {
            steps[i + 1]
        } else {
            &lasso.cycle[0].0
        };
        let img = model::image(t, &assignment_expr(t, s1)?)?;
        if img.intersect(&assignment_expr(t, s2)?)?.is_empty() {
            return Err(Error::model(format!(
                "witness step {} -> {} is not a model transition",
                t.describe_state(s1),
                t.describe_state(s2)
            )));
        }
    }
    Ok(Some(ConcreteTrace {
        prefix: lasso.prefix.iter().map(|(n, _)| n.1.clone()).collect(),
        cycle: lasso.cycle.iter().map(|(n, _)| n.1.clone()).collect(),
    }))
}

// ---------------------------------------------------------------------------
// Graph dump
// ---------------------------------------------------------------------------

/// Renders the fully expanded product: one `state` line per node in
/// breadth-first discovery order (with the implementation's description,
/// e.g. aggregate cardinalities), then one edge line per transition.
pub fn dump_graph<G: LazyGraph>(g: &mut G, deadline: &Deadline) -> Result<String> {
    let init = g.initial()?;
    let mut order: Vec<G::Node> = vec![init.clone()];
    let mut index: HashMap<G::Node, usize> = HashMap::from([(init, 0)]);
    let mut lines_edges: Vec<String> = Vec::new();
    let mut next = 0usize;
    while next < order.len() {
        deadline.check()?;
        let node = order[next].clone();
        for (acc, dst) in g.successors(&node)?.iter() {
            let dst_idx = match index.get(dst) {
                Some(&i) => i,
                None => {
                    order.push(dst.clone());
                    index.insert(dst.clone(), order.len() - 1);
                    order.len() - 1
                }
            };
            lines_edges.push(format!("{next} {dst_idx} {acc}"));
        }
        next += 1;
    }
    let mut out = String::new();
    for (i, n) in order.iter().enumerate() {
        out.push_str(&format!("state {i}: {}\n", g.describe(n)));
    }
    for l in lines_edges {
        out.push_str(&l);
        out.push('\n');
    }
    Ok(out)
}
