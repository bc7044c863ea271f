//! Kripke-structure backends and the symbolic set operators the aggregating
//! products are built from.
//!
//! A [`KripkeModel`] exposes a state space through a symbolic encoding: a set
//! of current-state variables, a transition relation split into one or more
//! partial relations, and a characteristic set per atomic proposition.  On
//! top of that interface this module provides the four filtered successor /
//! reachability operators ([`succ_f`], [`reach_f`], [`f_succ`], [`f_reach`]),
//! in-aggregate cycle detection ([`contains_cycle`]) and partitioning of a
//! set into label-homogeneous classes ([`partition_by_observed`]).

pub mod builtin;
pub mod explicit;
pub mod petri;

pub use builtin::builtin_model;
pub use explicit::ExplicitKs;
pub use petri::{PetriNetKs, PetriSpec};

use std::fmt;
use std::rc::Rc;

use num_bigint::BigUint;

use crate::error::{Deadline, Error, Result};
use crate::logic::{Assignment, BoolExpr, DdManager, PropId};

/// A symbolically represented set of model states (over the model's
/// current-state variables).
///
/// Equality and hashing use the canonical diagram node, so two aggregates
/// built through different operation sequences compare equal iff they denote
/// the same state set.
#[derive(Clone)]
pub struct Aggregate {
    expr: BoolExpr,
}

impl Aggregate {
    pub fn from_expr(expr: BoolExpr) -> Aggregate {
        Aggregate { expr }
    }

    pub fn expr(&self) -> &BoolExpr {
        &self.expr
    }

    pub fn is_empty(&self) -> bool {
        self.expr.is_empty()
    }
}

impl PartialEq for Aggregate {
    fn eq(&self, other: &Aggregate) -> bool {
        self.expr.node_id() == other.expr.node_id()
    }
}

impl Eq for Aggregate {}

impl std::hash::Hash for Aggregate {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.expr.node_id().hash(state);
    }
}

impl fmt::Debug for Aggregate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Aggregate({})", self.expr.render())
    }
}

/// A state space with a symbolic encoding.
///
/// `state_vars` and `next_vars` are parallel: variable `i` of the next-state
/// frame immediately follows variable `i` of the current frame in the diagram
/// order, so frame renames are order-preserving.
pub trait KripkeModel {
    fn manager(&self) -> &Rc<DdManager>;

    /// Observable atomic propositions, in declaration order.
    fn aps(&self) -> &[PropId];

    /// Current-state encoding variables.
    fn state_vars(&self) -> &[PropId];

    /// Next-state encoding variables, parallel to `state_vars`.
    fn next_vars(&self) -> &[PropId];

    /// The singleton aggregate holding the initial state.
    fn initial(&self) -> Aggregate;

    /// Characteristic set (over `state_vars`) of the states where `p` holds.
    fn sat_prop(&self, p: PropId) -> Result<BoolExpr>;

    /// Number of partial transition relations.
    fn relation_count(&self) -> usize;

    /// Successors of `set` under partial relation `rel`.
    fn image_rel(&self, rel: usize, set: &BoolExpr) -> Result<BoolExpr>;

    /// Predecessors of `set` under partial relation `rel`.
    fn preimage_rel(&self, rel: usize, set: &BoolExpr) -> Result<BoolExpr>;

    /// Human-readable rendering of one concrete state.
    fn describe_state(&self, state: &Assignment) -> String;
}

/// Successors of `set` under the full transition relation.
pub fn image(m: &dyn KripkeModel, set: &BoolExpr) -> Result<BoolExpr> {
    let mut acc = m.manager().mk_false();
    for rel in 0..m.relation_count() {
        acc = acc.union(&m.image_rel(rel, set)?)?;
    }
    Ok(acc)
}

/// Predecessors of `set` under the full transition relation.
pub fn preimage(m: &dyn KripkeModel, set: &BoolExpr) -> Result<BoolExpr> {
    let mut acc = m.manager().mk_false();
    for rel in 0..m.relation_count() {
        acc = acc.union(&m.preimage_rel(rel, set)?)?;
    }
    Ok(acc)
}

/// States whose label satisfies the propositional formula `f` (over the
/// model's atomic propositions).
pub fn sat_states(m: &dyn KripkeModel, f: &BoolExpr) -> Result<BoolExpr> {
    let aps = m.aps();
    for v in f.free_vars() {
        if !aps.contains(&v) {
            return Err(Error::usage(format!(
                "formula mentions {}, which is not an atomic proposition of the model",
                m.manager().prop_name(v)
            )));
        }
    }
    let mut map = Vec::with_capacity(aps.len());
    for &p in aps {
        map.push((p, m.sat_prop(p)?));
    }
    f.compose(&map)
}

/// Successors of `a` whose own label satisfies `f`:
/// `{s' | ∃s ∈ a, s → s', λ(s') ⊨ f}`.
pub fn succ_f(m: &dyn KripkeModel, a: &Aggregate, f: &BoolExpr) -> Result<Aggregate> {
    let sat = sat_states(m, f)?;
    Ok(Aggregate::from_expr(image(m, a.expr())?.intersect(&sat)?))
}

/// Successors of the states of `a` that satisfy `f`:
/// `{s' | ∃s ∈ a, s → s', λ(s) ⊨ f}`.
pub fn f_succ(m: &dyn KripkeModel, a: &Aggregate, f: &BoolExpr) -> Result<Aggregate> {
    let sat = sat_states(m, f)?;
    Ok(Aggregate::from_expr(image(m, &a.expr().intersect(&sat)?)?))
}

/// Least superset of `a` closed under [`succ_f`]: repeatedly adds successors
/// satisfying `f`.  Iterates chaotically, one partial relation at a time in
/// declaration order, until a full round changes nothing.
pub fn reach_f(
    m: &dyn KripkeModel,
    a: &Aggregate,
    f: &BoolExpr,
    deadline: &Deadline,
) -> Result<Aggregate> {
    let sat = sat_states(m, f)?;
    let mut cur = a.expr().clone();
    loop {
        let mut changed = false;
        for rel in 0..m.relation_count() {
            deadline.check()?;
            let nxt = cur.union(&m.image_rel(rel, &cur)?.intersect(&sat)?)?;
            if !nxt.equals(&cur) {
                cur = nxt;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    Ok(Aggregate::from_expr(cur))
}

/// Least superset of `a` closed under [`f_succ`]: repeatedly adds successors
/// of members satisfying `f`.
pub fn f_reach(
    m: &dyn KripkeModel,
    a: &Aggregate,
    f: &BoolExpr,
    deadline: &Deadline,
) -> Result<Aggregate> {
    let sat = sat_states(m, f)?;
    let mut cur = a.expr().clone();
    loop {
        let mut changed = false;
        for rel in 0..m.relation_count() {
            deadline.check()?;
            let frontier = cur.intersect(&sat)?;
            let nxt = cur.union(&m.image_rel(rel, &frontier)?)?;
            if !nxt.equals(&cur) {
                cur = nxt;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    Ok(Aggregate::from_expr(cur))
}

/// Whether the transition relation restricted to `a` contains a cycle.
/// Computed as the greatest fixpoint `νX. a ∩ preimage(X)`: the result holds
/// exactly the states of `a` from which an infinite path inside `a` starts,
/// which is nonempty iff `a` contains a cycle.
pub fn contains_cycle(m: &dyn KripkeModel, a: &Aggregate, deadline: &Deadline) -> Result<bool> {
    let mut x = a.expr().clone();
    loop {
        deadline.check()?;
        let nxt = a.expr().intersect(&preimage(m, &x)?)?;
        if nxt.equals(&x) {
            return Ok(!x.is_empty());
        }
        x = nxt;
    }
}

/// Splits `a` into nonempty classes that each agree on every proposition in
/// `obs`, together with the shared partial label of each class.
///
/// Classes are ordered by their least member in the state encoding (the
/// order in which a class's first state would be enumerated), which is fixed
/// and total; the classes of a set therefore always enumerate identically.
pub fn partition_by_observed(
    m: &dyn KripkeModel,
    a: &Aggregate,
    obs: &[PropId],
) -> Result<Vec<(Assignment, Aggregate)>> {
    if a.is_empty() {
        return Ok(Vec::new());
    }
    let aps = m.aps();
    for p in obs {
        if !aps.contains(p) {
            return Err(Error::usage(format!(
                "{} is not an atomic proposition of the model",
                m.manager().prop_name(*p)
            )));
        }
    }
    let mut classes: Vec<(Assignment, BoolExpr)> =
        vec![(Assignment::empty(), a.expr().clone())];
    for &p in obs {
        let sat = m.sat_prop(p)?;
        let mut split = Vec::with_capacity(classes.len() * 2);
        for (asg, set) in classes {
            let pos = set.intersect(&sat)?;
            let neg = set.difference(&sat)?;
            for (value, part) in [(false, neg), (true, pos)] {
                if !part.is_empty() {
                    let mut asg2 = asg.clone();
                    asg2.set(p, value);
                    split.push((asg2, part));
                }
            }
        }
        classes = split;
    }
    let mut keyed = Vec::with_capacity(classes.len());
    for (asg, set) in classes {
        let first = set
            .first_minterm(m.state_vars())?
            .expect("nonempty class has a minterm");
        keyed.push((first, asg, set));
    }
    keyed.sort_by(|x, y| x.0.cmp(&y.0));
    Ok(keyed
        .into_iter()
        .map(|(_, asg, set)| (asg, Aggregate::from_expr(set)))
        .collect())
}

/// The shared label of `a` over `obs` if `a` is homogeneous with respect to
/// `obs`, else `None`.
pub fn label_of(
    m: &dyn KripkeModel,
    a: &Aggregate,
    obs: &[PropId],
) -> Result<Option<Assignment>> {
    if a.is_empty() {
        return Ok(None);
    }
    let mut out = Assignment::empty();
    for &p in obs {
        let sat = m.sat_prop(p)?;
        if a.expr().difference(&sat)?.is_empty() {
            out.set(p, true);
        } else if a.expr().intersect(&sat)?.is_empty() {
            out.set(p, false);
        } else {
            return Ok(None);
        }
    }
    Ok(Some(out))
}

/// All states reachable from the initial state.
pub fn reachable_states(m: &dyn KripkeModel, deadline: &Deadline) -> Result<Aggregate> {
    let mut cur = m.initial().expr().clone();
    loop {
        let mut changed = false;
        for rel in 0..m.relation_count() {
            deadline.check()?;
            let nxt = cur.union(&m.image_rel(rel, &cur)?)?;
            if !nxt.equals(&cur) {
                cur = nxt;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    Ok(Aggregate::from_expr(cur))
}

/// Exact cardinality of an aggregate.
pub fn count_states(m: &dyn KripkeModel, a: &Aggregate) -> Result<BigUint> {
    a.expr().count(m.state_vars())
}
