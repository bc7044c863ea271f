//! Propositional formulas and state sets over a shared decision-diagram
//! engine.
//!
//! One [`DdManager`] serves both roles in this crate: transition guards of
//! automata and symbolic state sets of models are the same [`BoolExpr`] type,
//! so products can intersect a guard with a state set directly. Diagrams are
//! hash-consed, which makes semantic equality a node-id comparison.
//!
//! Variable order is declaration order; there is no dynamic reordering.
//! [`DdManager::declare_prop_top`] additionally lets a caller place a block of
//! variables above everything declared so far (used for automaton state bits
//! in the fully symbolic product). A configurable node ceiling turns runaway
//! growth into a [`Error::Resource`] instead of memory exhaustion. Managers
//! are single-threaded; cross-process parallelism happens at the benchmark
//! driver level.

use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;
use std::rc::Rc;

use num_bigint::BigUint;

use crate::error::{Error, Result};

/// Opaque handle for a declared propositional variable.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct PropId(u32);

impl PropId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

type NodeId = u32;
const FALSE: NodeId = 0;
const TRUE: NodeId = 1;
/// Sentinel variable index for the two terminal nodes.
const NO_VAR: u32 = u32::MAX;

const DEFAULT_NODE_CEILING: usize = 4_000_000;
/// Operation caches are cleared wholesale past this size; correctness is
/// unaffected, only recomputation cost.
const CACHE_LIMIT: usize = 1 << 20;

#[derive(Clone, Copy)]
struct Node {
    var: u32,
    lo: NodeId,
    hi: NodeId,
}

const OP_AND: u8 = 0;
const OP_OR: u8 = 1;
const OP_XOR: u8 = 2;
const OP_NOT: u8 = 3;
const OP_EXISTS: u8 = 4;

struct Mgr {
    nodes: Vec<Node>,
    unique: HashMap<(u32, NodeId, NodeId), NodeId>,
    apply_cache: HashMap<(u8, NodeId, NodeId), NodeId>,
    andex_cache: HashMap<(NodeId, NodeId, NodeId), NodeId>,
    /// Variable names in declaration order (index = PropId).
    names: Vec<String>,
    by_name: HashMap<String, u32>,
    /// Position of each variable in the diagram order.
    rank_of: Vec<u32>,
    ceiling: usize,
}

impl Mgr {
    fn node(&self, id: NodeId) -> Node {
        self.nodes[id as usize]
    }

    fn rank(&self, var: u32) -> u32 {
        if var == NO_VAR {
            u32::MAX
        } else {
            self.rank_of[var as usize]
        }
    }

    fn top_rank(&self, id: NodeId) -> u32 {
        self.rank(self.node(id).var)
    }

    fn mk_node(&mut self, var: u32, lo: NodeId, hi: NodeId) -> Result<NodeId> {
        if lo == hi {
            return Ok(lo);
        }
        if let Some(&n) = self.unique.get(&(var, lo, hi)) {
            return Ok(n);
        }
        if self.nodes.len() >= self.ceiling {
            return Err(Error::Resource(format!(
                "decision-diagram node ceiling of {} reached",
                self.ceiling
            )));
        }
        let id = self.nodes.len() as NodeId;
        self.nodes.push(Node { var, lo, hi });
        self.unique.insert((var, lo, hi), id);
        Ok(id)
    }

    fn trim_caches(&mut self) {
        if self.apply_cache.len() > CACHE_LIMIT {
            self.apply_cache.clear();
        }
        if self.andex_cache.len() > CACHE_LIMIT {
            self.andex_cache.clear();
        }
    }

    fn not(&mut self, a: NodeId) -> Result<NodeId> {
        if a == FALSE {
            return Ok(TRUE);
        }
        if a == TRUE {
            return Ok(FALSE);
        }
        if let Some(&r) = self.apply_cache.get(&(OP_NOT, a, 0)) {
            return Ok(r);
        }
        let n = self.node(a);
        let lo = self.not(n.lo)?;
        let hi = self.not(n.hi)?;
        let r = self.mk_node(n.var, lo, hi)?;
        self.apply_cache.insert((OP_NOT, a, 0), r);
        Ok(r)
    }

    fn apply(&mut self, op: u8, a: NodeId, b: NodeId) -> Result<NodeId> {
        match op {
            OP_AND => {
                if a == FALSE || b == FALSE {
                    return Ok(FALSE);
                }
                if a == TRUE {
                    return Ok(b);
                }
                if b == TRUE || a == b {
                    return Ok(a);
                }
            }
            OP_OR => {
                if a == TRUE || b == TRUE {
                    return Ok(TRUE);
                }
                if a == FALSE {
                    return Ok(b);
                }
                if b == FALSE || a == b {
                    return Ok(a);
                }
            }
            OP_XOR => {
                if a == b {
                    return Ok(FALSE);
                }
                if a == FALSE {
                    return Ok(b);
                }
                if b == FALSE {
                    return Ok(a);
                }
                if a == TRUE {
                    return self.not(b);
                }
                if b == TRUE {
                    return self.not(a);
                }
            }
            _ => unreachable!("binary apply on non-binary op"),
        }
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        if let Some(&r) = self.apply_cache.get(&(op, a, b)) {
            return Ok(r);
        }
        let (ra, rb) = (self.top_rank(a), self.top_rank(b));
        let var = if ra <= rb {
            self.node(a).var
        } else {
            self.node(b).var
        };
        let (a0, a1) = self.cofactor(a, var);
        let (b0, b1) = self.cofactor(b, var);
        let lo = self.apply(op, a0, b0)?;
        let hi = self.apply(op, a1, b1)?;
        let r = self.mk_node(var, lo, hi)?;
        self.apply_cache.insert((op, a, b), r);
        Ok(r)
    }

    /// Shannon cofactors of `f` w.r.t. `var`; identity when `var` is below
    /// `f`'s top variable.
    fn cofactor(&self, f: NodeId, var: u32) -> (NodeId, NodeId) {
        if f <= TRUE {
            return (f, f);
        }
        let n = self.node(f);
        if n.var == var {
            (n.lo, n.hi)
        } else {
            (f, f)
        }
    }

    /// Existential quantification; `cube` is a positive conjunction of the
    /// quantified variables.
    fn exists(&mut self, f: NodeId, mut cube: NodeId) -> Result<NodeId> {
        if f <= TRUE || cube == TRUE {
            return Ok(f);
        }
        let fr = self.top_rank(f);
        while cube > TRUE && self.top_rank(cube) < fr {
            cube = self.node(cube).hi;
        }
        if cube == TRUE {
            return Ok(f);
        }
        if let Some(&r) = self.apply_cache.get(&(OP_EXISTS, f, cube)) {
            return Ok(r);
        }
        let n = self.node(f);
        let r = if self.node(cube).var == n.var {
            let rest = self.node(cube).hi;
            let lo = self.exists(n.lo, rest)?;
            if lo == TRUE {
                TRUE
            } else {
                let hi = self.exists(n.hi, rest)?;
                self.apply(OP_OR, lo, hi)?
            }
        } else {
            let lo = self.exists(n.lo, cube)?;
            let hi = self.exists(n.hi, cube)?;
            self.mk_node(n.var, lo, hi)?
        };
        self.apply_cache.insert((OP_EXISTS, f, cube), r);
        Ok(r)
    }

    /// Fused relational product: exists(cube, a ∧ b) without building a ∧ b.
    fn and_exists(&mut self, a: NodeId, b: NodeId, mut cube: NodeId) -> Result<NodeId> {
        if a == FALSE || b == FALSE {
            return Ok(FALSE);
        }
        if cube == TRUE {
            return self.apply(OP_AND, a, b);
        }
        if a == TRUE {
            return self.exists(b, cube);
        }
        if b == TRUE {
            return self.exists(a, cube);
        }
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        let top = self.top_rank(a).min(self.top_rank(b));
        while cube > TRUE && self.top_rank(cube) < top {
            cube = self.node(cube).hi;
        }
        if cube == TRUE {
            return self.apply(OP_AND, a, b);
        }
        if let Some(&r) = self.andex_cache.get(&(a, b, cube)) {
            return Ok(r);
        }
        let var = if self.top_rank(a) <= self.top_rank(b) {
            self.node(a).var
        } else {
            self.node(b).var
        };
        let (a0, a1) = self.cofactor(a, var);
        let (b0, b1) = self.cofactor(b, var);
        let r = if self.node(cube).var == var {
            let rest = self.node(cube).hi;
            let lo = self.and_exists(a0, b0, rest)?;
            if lo == TRUE {
                TRUE
            } else {
                let hi = self.and_exists(a1, b1, rest)?;
                self.apply(OP_OR, lo, hi)?
            }
        } else {
            let lo = self.and_exists(a0, b0, cube)?;
            let hi = self.and_exists(a1, b1, cube)?;
            self.mk_node(var, lo, hi)?
        };
        self.andex_cache.insert((a, b, cube), r);
        Ok(r)
    }

    /// Variable substitution. Precondition (checked by callers): the map
    /// preserves relative order between any two variables in `f`'s support.
    fn replace(
        &mut self,
        f: NodeId,
        map: &HashMap<u32, u32>,
        memo: &mut HashMap<NodeId, NodeId>,
    ) -> Result<NodeId> {
        if f <= TRUE {
            return Ok(f);
        }
        if let Some(&r) = memo.get(&f) {
            return Ok(r);
        }
        let n = self.node(f);
        let var = map.get(&n.var).copied().unwrap_or(n.var);
        let lo = self.replace(n.lo, map, memo)?;
        let hi = self.replace(n.hi, map, memo)?;
        let r = self.mk_node(var, lo, hi)?;
        memo.insert(f, r);
        Ok(r)
    }

    fn restrict(
        &mut self,
        f: NodeId,
        fixed: &HashMap<u32, bool>,
        memo: &mut HashMap<NodeId, NodeId>,
    ) -> Result<NodeId> {
        if f <= TRUE {
            return Ok(f);
        }
        if let Some(&r) = memo.get(&f) {
            return Ok(r);
        }
        let n = self.node(f);
        let r = match fixed.get(&n.var) {
            Some(&v) => {
                let child = if v { n.hi } else { n.lo };
                self.restrict(child, fixed, memo)?
            }
            None => {
                let lo = self.restrict(n.lo, fixed, memo)?;
                let hi = self.restrict(n.hi, fixed, memo)?;
                self.mk_node(n.var, lo, hi)?
            }
        };
        memo.insert(f, r);
        Ok(r)
    }

    fn support(&self, f: NodeId, out: &mut Vec<u32>) {
        let mut seen = vec![false; 0];
        seen.resize(self.nodes.len(), false);
        let mut vars: Vec<bool> = vec![false; self.names.len()];
        let mut stack = vec![f];
        while let Some(n) = stack.pop() {
            if n <= TRUE || seen[n as usize] {
                continue;
            }
            seen[n as usize] = true;
            let node = self.node(n);
            vars[node.var as usize] = true;
            stack.push(node.lo);
            stack.push(node.hi);
        }
        for (v, present) in vars.iter().enumerate() {
            if *present {
                out.push(v as u32);
            }
        }
    }

    fn eval(&self, f: NodeId, lookup: &HashMap<u32, bool>) -> bool {
        let mut cur = f;
        while cur > TRUE {
            let n = self.node(cur);
            // Support coverage is checked by the caller.
            cur = if lookup[&n.var] { n.hi } else { n.lo };
        }
        cur == TRUE
    }
}

/// Hash-consing manager for [`BoolExpr`] values.
///
/// Shared via `Rc`; all expressions combined together must come from the same
/// manager (mixing is a usage error).
pub struct DdManager {
    inner: RefCell<Mgr>,
}

impl DdManager {
    pub fn new() -> Rc<DdManager> {
        Self::with_node_ceiling(DEFAULT_NODE_CEILING)
    }

    pub fn with_node_ceiling(ceiling: usize) -> Rc<DdManager> {
        let mut nodes = Vec::with_capacity(1024);
        nodes.push(Node {
            var: NO_VAR,
            lo: FALSE,
            hi: FALSE,
        });
        nodes.push(Node {
            var: NO_VAR,
            lo: TRUE,
            hi: TRUE,
        });
        Rc::new(DdManager {
            inner: RefCell::new(Mgr {
                nodes,
                unique: HashMap::new(),
                apply_cache: HashMap::new(),
                andex_cache: HashMap::new(),
                names: Vec::new(),
                by_name: HashMap::new(),
                rank_of: Vec::new(),
                ceiling: ceiling.max(16),
            }),
        })
    }

    /// Total nodes ever created. The engine never frees nodes, so this is
    /// also the peak.
    pub fn node_count(&self) -> usize {
        self.inner.borrow().nodes.len()
    }

    pub fn set_node_ceiling(&self, ceiling: usize) {
        self.inner.borrow_mut().ceiling = ceiling.max(16);
    }

    /// Declares a fresh variable at the bottom of the current order.
    pub fn declare_prop(self: &Rc<Self>, name: &str) -> Result<PropId> {
        let mut m = self.inner.borrow_mut();
        if m.by_name.contains_key(name) {
            return Err(Error::usage(format!("proposition {name:?} already declared")));
        }
        let id = m.names.len() as u32;
        m.names.push(name.to_string());
        m.by_name.insert(name.to_string(), id);
        // Fresh variables go to the bottom of the order, so rank = index.
        m.rank_of.push(id);
        Ok(PropId(id))
    }

    /// Declares a fresh variable above every existing one. Relative order of
    /// previously declared variables is unchanged, so existing diagrams stay
    /// valid.
    pub fn declare_prop_top(self: &Rc<Self>, name: &str) -> Result<PropId> {
        let mut m = self.inner.borrow_mut();
        if m.by_name.contains_key(name) {
            return Err(Error::usage(format!("proposition {name:?} already declared")));
        }
        let id = m.names.len() as u32;
        m.names.push(name.to_string());
        m.by_name.insert(name.to_string(), id);
        for r in m.rank_of.iter_mut() {
            *r += 1;
        }
        m.rank_of.push(0);
        Ok(PropId(id))
    }

    pub fn find_or_declare(self: &Rc<Self>, name: &str) -> Result<PropId> {
        if let Some(p) = self.prop_by_name(name) {
            return Ok(p);
        }
        self.declare_prop(name)
    }

    pub fn prop_by_name(&self, name: &str) -> Option<PropId> {
        self.inner.borrow().by_name.get(name).copied().map(PropId)
    }

    pub fn prop_name(&self, p: PropId) -> String {
        self.inner.borrow().names[p.index()].clone()
    }

    pub fn prop_count(&self) -> usize {
        self.inner.borrow().names.len()
    }

    /// All declared variables in declaration order.
    pub fn props(&self) -> Vec<PropId> {
        (0..self.prop_count() as u32).map(PropId).collect()
    }

    pub fn mk_true(self: &Rc<Self>) -> BoolExpr {
        BoolExpr {
            mgr: Rc::clone(self),
            node: TRUE,
        }
    }

    pub fn mk_false(self: &Rc<Self>) -> BoolExpr {
        BoolExpr {
            mgr: Rc::clone(self),
            node: FALSE,
        }
    }

    pub fn mk_var(self: &Rc<Self>, p: PropId) -> Result<BoolExpr> {
        if p.index() >= self.prop_count() {
            return Err(Error::usage("mk_var on undeclared proposition".to_string()));
        }
        let node = {
            let mut m = self.inner.borrow_mut();
            m.mk_node(p.0, FALSE, TRUE)?
        };
        Ok(BoolExpr {
            mgr: Rc::clone(self),
            node,
        })
    }

    pub fn mk_not(e: &BoolExpr) -> Result<BoolExpr> {
        e.not()
    }

    pub fn mk_and(self: &Rc<Self>, es: &[BoolExpr]) -> Result<BoolExpr> {
        let mut acc = self.mk_true();
        for e in es {
            acc = acc.and(e)?;
        }
        Ok(acc)
    }

    pub fn mk_or(self: &Rc<Self>, es: &[BoolExpr]) -> Result<BoolExpr> {
        let mut acc = self.mk_false();
        for e in es {
            acc = acc.or(e)?;
        }
        Ok(acc)
    }

    /// Minterm of `rho` over exactly the propositions in `over`: the
    /// conjunction of a literal per listed variable. All listed variables must
    /// be defined by `rho`.
    pub fn assignment_as_expr(self: &Rc<Self>, rho: &Assignment, over: &[PropId]) -> Result<BoolExpr> {
        let mut acc = self.mk_true();
        for &p in over {
            let v = rho.get(p).ok_or_else(|| {
                Error::usage(format!(
                    "assignment does not define proposition {}",
                    self.prop_name(p)
                ))
            })?;
            let var = self.mk_var(p)?;
            let lit = if v { var } else { var.not()? };
            acc = acc.and(&lit)?;
        }
        Ok(acc)
    }

    fn cube(&self, vars: &[PropId]) -> Result<NodeId> {
        let mut m = self.inner.borrow_mut();
        let mut sorted: Vec<u32> = vars.iter().map(|p| p.0).collect();
        sorted.sort_by_key(|&v| std::cmp::Reverse(m.rank(v)));
        sorted.dedup();
        let mut acc = TRUE;
        for v in sorted {
            acc = m.mk_node(v, FALSE, acc)?;
        }
        Ok(acc)
    }
}

impl fmt::Debug for DdManager {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "DdManager({} vars, {} nodes)",
            self.prop_count(),
            self.node_count()
        )
    }
}

/// A canonical propositional formula / symbolic set over its manager's
/// variables. Cheap to clone; equality is node identity.
#[derive(Clone)]
pub struct BoolExpr {
    mgr: Rc<DdManager>,
    node: NodeId,
}

impl PartialEq for BoolExpr {
    fn eq(&self, other: &Self) -> bool {
        Rc::ptr_eq(&self.mgr, &other.mgr) && self.node == other.node
    }
}
impl Eq for BoolExpr {}

impl std::hash::Hash for BoolExpr {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        (Rc::as_ptr(&self.mgr) as usize).hash(state);
        self.node.hash(state);
    }
}

impl fmt::Debug for BoolExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BoolExpr#{}", self.node)
    }
}

impl BoolExpr {
    pub fn manager(&self) -> &Rc<DdManager> {
        &self.mgr
    }

    /// Stable identity within the manager; equal ids mean equal functions.
    pub fn node_id(&self) -> u64 {
        self.node as u64
    }

    fn check_same_manager(&self, other: &BoolExpr) -> Result<()> {
        if Rc::ptr_eq(&self.mgr, &other.mgr) {
            Ok(())
        } else {
            Err(Error::usage(
                "expressions from different managers combined".to_string(),
            ))
        }
    }

    fn wrap(&self, node: NodeId) -> BoolExpr {
        BoolExpr {
            mgr: Rc::clone(&self.mgr),
            node,
        }
    }

    fn binop(&self, other: &BoolExpr, op: u8) -> Result<BoolExpr> {
        self.check_same_manager(other)?;
        let node = {
            let mut m = self.mgr.inner.borrow_mut();
            let r = m.apply(op, self.node, other.node)?;
            m.trim_caches();
            r
        };
        Ok(self.wrap(node))
    }

    pub fn and(&self, other: &BoolExpr) -> Result<BoolExpr> {
        self.binop(other, OP_AND)
    }

    pub fn or(&self, other: &BoolExpr) -> Result<BoolExpr> {
        self.binop(other, OP_OR)
    }

    pub fn xor(&self, other: &BoolExpr) -> Result<BoolExpr> {
        self.binop(other, OP_XOR)
    }

    pub fn not(&self) -> Result<BoolExpr> {
        let node = {
            let mut m = self.mgr.inner.borrow_mut();
            let r = m.not(self.node)?;
            m.trim_caches();
            r
        };
        Ok(self.wrap(node))
    }

    pub fn implies(&self, other: &BoolExpr) -> Result<BoolExpr> {
        self.not()?.or(other)
    }

    pub fn iff(&self, other: &BoolExpr) -> Result<BoolExpr> {
        self.xor(other)?.not()
    }

    pub fn is_true(&self) -> bool {
        self.node == TRUE
    }

    pub fn is_false(&self) -> bool {
        self.node == FALSE
    }

    pub fn is_satisfiable(&self) -> bool {
        self.node != FALSE
    }

    // Set-flavored aliases: a BoolExpr doubles as the characteristic function
    // of a state set.

    pub fn union(&self, other: &BoolExpr) -> Result<BoolExpr> {
        self.or(other)
    }

    pub fn intersect(&self, other: &BoolExpr) -> Result<BoolExpr> {
        self.and(other)
    }

    pub fn difference(&self, other: &BoolExpr) -> Result<BoolExpr> {
        self.and(&other.not()?)
    }

    pub fn is_empty(&self) -> bool {
        self.is_false()
    }

    pub fn equals(&self, other: &BoolExpr) -> bool {
        self == other
    }

    /// Evaluates under a total-enough assignment; usage error if some support
    /// variable is undefined.
    pub fn eval(&self, rho: &Assignment) -> Result<bool> {
        let support = self.free_vars();
        let mut lookup: HashMap<u32, bool> = HashMap::new();
        for p in &support {
            match rho.get(*p) {
                Some(v) => {
                    lookup.insert(p.0, v);
                }
                None => {
                    return Err(Error::usage(format!(
                        "assignment does not define proposition {}",
                        self.mgr.prop_name(*p)
                    )))
                }
            }
        }
        let m = self.mgr.inner.borrow();
        Ok(m.eval(self.node, &lookup))
    }

    /// Support of the function, ascending by declaration index.
    pub fn free_vars(&self) -> Vec<PropId> {
        let m = self.mgr.inner.borrow();
        let mut out = Vec::new();
        m.support(self.node, &mut out);
        out.into_iter().map(PropId).collect()
    }

    /// Existentially quantifies the listed variables away.
    pub fn exists(&self, vars: &[PropId]) -> Result<BoolExpr> {
        if vars.is_empty() {
            return Ok(self.clone());
        }
        let cube = self.mgr.cube(vars)?;
        let node = {
            let mut m = self.mgr.inner.borrow_mut();
            let r = m.exists(self.node, cube)?;
            m.trim_caches();
            r
        };
        Ok(self.wrap(node))
    }

    /// Universally quantifies the listed variables away.
    pub fn forall(&self, vars: &[PropId]) -> Result<BoolExpr> {
        self.not()?.exists(vars)?.not()
    }

    /// Fused `exists(vars, self ∧ other)`.
    pub fn and_exists(&self, other: &BoolExpr, vars: &[PropId]) -> Result<BoolExpr> {
        self.check_same_manager(other)?;
        let cube = self.mgr.cube(vars)?;
        let node = {
            let mut m = self.mgr.inner.borrow_mut();
            let r = m.and_exists(self.node, other.node, cube)?;
            m.trim_caches();
            r
        };
        Ok(self.wrap(node))
    }

    /// Cofactors the expression under the (partial) assignment.
    pub fn restrict(&self, partial: &Assignment) -> Result<BoolExpr> {
        let fixed: HashMap<u32, bool> = partial.iter().map(|(p, v)| (p.0, v)).collect();
        let node = {
            let mut m = self.mgr.inner.borrow_mut();
            let mut memo = HashMap::new();
            m.restrict(self.node, &fixed, &mut memo)?
        };
        Ok(self.wrap(node))
    }

    /// Renames variables. The map must preserve the relative order of the
    /// expression's support (checked).
    pub fn rename(&self, map: &[(PropId, PropId)]) -> Result<BoolExpr> {
        let lookup: HashMap<u32, u32> = map.iter().map(|(a, b)| (a.0, b.0)).collect();
        {
            let m = self.mgr.inner.borrow();
            let mut support = Vec::new();
            m.support(self.node, &mut support);
            let mut mapped: Vec<(u32, u32)> = support
                .iter()
                .map(|&v| (m.rank(v), m.rank(lookup.get(&v).copied().unwrap_or(v))))
                .collect();
            mapped.sort_unstable();
            for w in mapped.windows(2) {
                if w[0].1 >= w[1].1 {
                    return Err(Error::usage(
                        "rename map does not preserve variable order".to_string(),
                    ));
                }
            }
        }
        let node = {
            let mut m = self.mgr.inner.borrow_mut();
            let mut memo = HashMap::new();
            m.replace(self.node, &lookup, &mut memo)?
        };
        Ok(self.wrap(node))
    }

    /// Simultaneously substitutes an expression for each mapped variable.
    /// Unmapped variables are left in place.
    pub fn compose(&self, map: &[(PropId, BoolExpr)]) -> Result<BoolExpr> {
        for (_, g) in map {
            self.check_same_manager(g)?;
        }
        let subst: HashMap<u32, BoolExpr> = map.iter().map(|(p, g)| (p.0, g.clone())).collect();
        let mut memo: HashMap<NodeId, BoolExpr> = HashMap::new();
        self.compose_rec(self.node, &subst, &mut memo)
    }

    fn compose_rec(
        &self,
        node: NodeId,
        subst: &HashMap<u32, BoolExpr>,
        memo: &mut HashMap<NodeId, BoolExpr>,
    ) -> Result<BoolExpr> {
        if node == TRUE {
            return Ok(self.mgr.mk_true());
        }
        if node == FALSE {
            return Ok(self.mgr.mk_false());
        }
        if let Some(e) = memo.get(&node) {
            return Ok(e.clone());
        }
        let n = self.mgr.inner.borrow().node(node);
        let lo = self.compose_rec(n.lo, subst, memo)?;
        let hi = self.compose_rec(n.hi, subst, memo)?;
        let v = match subst.get(&n.var) {
            Some(g) => g.clone(),
            None => self.mgr.mk_var(PropId(n.var))?,
        };
        let r = v.and(&hi)?.or(&v.not()?.and(&lo)?)?;
        memo.insert(node, r.clone());
        Ok(r)
    }

    /// Exact model count over the given universe of variables, which must
    /// cover the support.
    pub fn count(&self, universe: &[PropId]) -> Result<BigUint> {
        let m = self.mgr.inner.borrow();
        let mut vars: Vec<u32> = universe.iter().map(|p| p.0).collect();
        vars.sort_by_key(|&v| m.rank(v));
        vars.dedup();
        let pos: HashMap<u32, usize> = vars.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        {
            let mut support = Vec::new();
            m.support(self.node, &mut support);
            for v in support {
                if !pos.contains_key(&v) {
                    return Err(Error::usage(format!(
                        "count universe does not cover support variable {}",
                        m.names[v as usize]
                    )));
                }
            }
        }
        let total_levels = vars.len();
        fn level(
            m: &Mgr,
            pos: &HashMap<u32, usize>,
            total: usize,
            id: NodeId,
        ) -> usize {
            if id <= TRUE {
                total
            } else {
                pos[&m.node(id).var]
            }
        }
        let mut memo: HashMap<NodeId, BigUint> = HashMap::new();
        fn go(
            m: &Mgr,
            pos: &HashMap<u32, usize>,
            total: usize,
            id: NodeId,
            memo: &mut HashMap<NodeId, BigUint>,
        ) -> BigUint {
            if id == FALSE {
                return BigUint::from(0u32);
            }
            if id == TRUE {
                return BigUint::from(1u32);
            }
            if let Some(c) = memo.get(&id) {
                return c.clone();
            }
            let n = m.node(id);
            let here = pos[&n.var];
            let mut acc = BigUint::from(0u32);
            for child in [n.lo, n.hi] {
                let c = go(m, pos, total, child, memo);
                let gap = level(m, pos, total, child) - here - 1;
                acc += c << gap;
            }
            memo.insert(id, acc.clone());
            acc
        }
        let root_level = level(&m, &pos, total_levels, self.node);
        let c = go(&m, &pos, total_levels, self.node, &mut memo);
        Ok(c << root_level)
    }

    /// Lexicographically least satisfying assignment over the universe
    /// (variables compared in diagram order, false before true), or `None`
    /// for the empty set. The universe must cover the support.
    pub fn first_minterm(&self, universe: &[PropId]) -> Result<Option<Assignment>> {
        if self.node == FALSE {
            return Ok(None);
        }
        let m = self.mgr.inner.borrow();
        let mut vars: Vec<u32> = universe.iter().map(|p| p.0).collect();
        vars.sort_by_key(|&v| m.rank(v));
        vars.dedup();
        let mut pairs: Vec<(PropId, bool)> = Vec::with_capacity(vars.len());
        let mut cur = self.node;
        for &v in &vars {
            if cur > TRUE && m.node(cur).var == v {
                let n = m.node(cur);
                if n.lo != FALSE {
                    pairs.push((PropId(v), false));
                    cur = n.lo;
                } else {
                    pairs.push((PropId(v), true));
                    cur = n.hi;
                }
            } else {
                // Free at this level: least completion uses false.
                pairs.push((PropId(v), false));
            }
        }
        if cur != TRUE {
            return Err(Error::usage(
                "first_minterm universe does not cover the support".to_string(),
            ));
        }
        drop(m);
        Ok(Some(Assignment::new(pairs)?))
    }

    /// All satisfying assignments over the universe, in lexicographic diagram
    /// order (false before true). Intended for small sets; the universe must
    /// cover the support.
    pub fn minterms(&self, universe: &[PropId]) -> Result<Vec<Assignment>> {
        let m = self.mgr.inner.borrow();
        let mut vars: Vec<u32> = universe.iter().map(|p| p.0).collect();
        vars.sort_by_key(|&v| m.rank(v));
        vars.dedup();
        {
            let mut support = Vec::new();
            m.support(self.node, &mut support);
            let set: std::collections::HashSet<u32> = vars.iter().copied().collect();
            for v in support {
                if !set.contains(&v) {
                    return Err(Error::usage(
                        "minterms universe does not cover the support".to_string(),
                    ));
                }
            }
        }
        let mut out = Vec::new();
        let mut prefix: Vec<(PropId, bool)> = Vec::with_capacity(vars.len());
        fn go(
            m: &Mgr,
            vars: &[u32],
            depth: usize,
            id: NodeId,
            prefix: &mut Vec<(PropId, bool)>,
            out: &mut Vec<Assignment>,
        ) {
            if id == FALSE {
                return;
            }
            if depth == vars.len() {
                debug_assert_eq!(id, TRUE);
                out.push(Assignment {
                    pairs: prefix.clone(),
                });
                return;
            }
            let v = vars[depth];
            let (lo, hi) = if id > TRUE && m.node(id).var == v {
                (m.node(id).lo, m.node(id).hi)
            } else {
                (id, id)
            };
            prefix.push((PropId(v), false));
            go(m, vars, depth + 1, lo, prefix, out);
            prefix.pop();
            prefix.push((PropId(v), true));
            go(m, vars, depth + 1, hi, prefix, out);
            prefix.pop();
        }
        go(&m, &vars, 0, self.node, &mut prefix, &mut out);
        // Lexicographic on declaration order, not diagram order, would differ
        // only if ranks were permuted; keep diagram order (matches the
        // documented enumeration order) but store pairs sorted by PropId.
        for a in &mut out {
            a.pairs.sort_by_key(|(p, _)| *p);
        }
        Ok(out)
    }

    /// Human-readable rendering as a sum of products over the support.
    /// Falls back to a node summary when the expression has many terms.
    pub fn render(&self) -> String {
        if self.is_true() {
            return "true".to_string();
        }
        if self.is_false() {
            return "false".to_string();
        }
        let support = self.free_vars();
        let terms = match self.count(&support) {
            Ok(c) => c,
            Err(_) => return format!("<expr #{}>", self.node),
        };
        if terms > BigUint::from(64u32) {
            return format!("<expr #{} over {} vars>", self.node, support.len());
        }
        let mut parts = Vec::new();
        for rho in self.minterms(&support).unwrap_or_default() {
            parts.push(rho.render(&self.mgr));
        }
        parts.join(" | ")
    }
}

/// A finite (partial) truth assignment, kept sorted by variable.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Assignment {
    pairs: Vec<(PropId, bool)>,
}

impl Assignment {
    pub fn new(mut pairs: Vec<(PropId, bool)>) -> Result<Assignment> {
        pairs.sort_by_key(|(p, _)| *p);
        for w in pairs.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::usage(
                    "duplicate proposition in assignment".to_string(),
                ));
            }
        }
        Ok(Assignment { pairs })
    }

    pub fn empty() -> Assignment {
        Assignment { pairs: Vec::new() }
    }

    pub fn get(&self, p: PropId) -> Option<bool> {
        self.pairs
            .binary_search_by_key(&p, |(q, _)| *q)
            .ok()
            .map(|i| self.pairs[i].1)
    }

    pub fn set(&mut self, p: PropId, v: bool) {
        match self.pairs.binary_search_by_key(&p, |(q, _)| *q) {
            Ok(i) => self.pairs[i].1 = v,
            Err(i) => self.pairs.insert(i, (p, v)),
        }
    }

    pub fn domain(&self) -> Vec<PropId> {
        self.pairs.iter().map(|(p, _)| *p).collect()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (PropId, bool)> + '_ {
        self.pairs.iter().copied()
    }

    /// Restriction to the listed propositions (silently dropping ones not in
    /// the domain).
    pub fn restrict_to(&self, props: &[PropId]) -> Assignment {
        let keep: std::collections::HashSet<PropId> = props.iter().copied().collect();
        Assignment {
            pairs: self
                .pairs
                .iter()
                .filter(|(p, _)| keep.contains(p))
                .copied()
                .collect(),
        }
    }

    /// Pointwise agreement on `props` (undefined on both sides counts as
    /// agreement).
    pub fn agrees_on(&self, other: &Assignment, props: &[PropId]) -> bool {
        props.iter().all(|&p| self.get(p) == other.get(p))
    }

    /// Rendering like `a !b c`; the empty assignment renders as `true`.
    pub fn render(&self, mgr: &DdManager) -> String {
        if self.pairs.is_empty() {
            return "true".to_string();
        }
        self.pairs
            .iter()
            .map(|(p, v)| {
                let name = mgr.prop_name(*p);
                if *v {
                    name
                } else {
                    format!("!{name}")
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    /// Test-local expression trees, the independent semantics oracle for the
    /// diagram engine.
    #[derive(Clone, Debug)]
    enum Ast {
        Const(bool),
        Var(usize),
        Not(Box<Ast>),
        And(Box<Ast>, Box<Ast>),
        Or(Box<Ast>, Box<Ast>),
        Xor(Box<Ast>, Box<Ast>),
    }

    impl Ast {
        fn random(rng: &mut StdRng, nvars: usize, depth: usize) -> Ast {
            if depth == 0 || rng.random_bool(0.3) {
                if rng.random_bool(0.15) {
                    Ast::Const(rng.random_bool(0.5))
                } else {
                    Ast::Var(rng.random_range(0..nvars))
                }
            } else {
                let a = Box::new(Ast::random(rng, nvars, depth - 1));
                match rng.random_range(0..4) {
                    0 => Ast::Not(a),
                    1 => Ast::And(a, Box::new(Ast::random(rng, nvars, depth - 1))),
                    2 => Ast::Or(a, Box::new(Ast::random(rng, nvars, depth - 1))),
                    _ => Ast::Xor(a, Box::new(Ast::random(rng, nvars, depth - 1))),
                }
            }
        }

        fn eval(&self, bits: u32) -> bool {
            match self {
                Ast::Const(b) => *b,
                Ast::Var(i) => bits >> i & 1 == 1,
                Ast::Not(a) => !a.eval(bits),
                Ast::And(a, b) => a.eval(bits) && b.eval(bits),
                Ast::Or(a, b) => a.eval(bits) || b.eval(bits),
                Ast::Xor(a, b) => a.eval(bits) ^ b.eval(bits),
            }
        }

        fn build(&self, mgr: &Rc<DdManager>, vars: &[PropId]) -> BoolExpr {
            match self {
                Ast::Const(true) => mgr.mk_true(),
                Ast::Const(false) => mgr.mk_false(),
                Ast::Var(i) => mgr.mk_var(vars[*i]).unwrap(),
                Ast::Not(a) => a.build(mgr, vars).not().unwrap(),
                Ast::And(a, b) => a.build(mgr, vars).and(&b.build(mgr, vars)).unwrap(),
                Ast::Or(a, b) => a.build(mgr, vars).or(&b.build(mgr, vars)).unwrap(),
                Ast::Xor(a, b) => a.build(mgr, vars).xor(&b.build(mgr, vars)).unwrap(),
            }
        }
    }

    fn setup(nvars: usize) -> (Rc<DdManager>, Vec<PropId>) {
        let mgr = DdManager::new();
        let vars: Vec<PropId> = (0..nvars)
            .map(|i| mgr.declare_prop(&format!("p{i}")).unwrap())
            .collect();
        (mgr, vars)
    }

    fn assignment_for(vars: &[PropId], bits: u32) -> Assignment {
        Assignment::new(
            vars.iter()
                .enumerate()
                .map(|(i, &p)| (p, bits >> i & 1 == 1))
                .collect(),
        )
        .unwrap()
    }

    /// Canonicity: truth-table equivalence iff identical node ids, over 1000
    /// random pairs of expressions on up to 8 variables.
    #[test]
    fn canonical_form_matches_truth_tables() {
        let mut rng = StdRng::seed_from_u64(0xC0FFEE);
        let (mgr, vars) = setup(8);
        for _ in 0..1000 {
            let a = Ast::random(&mut rng, 8, 4);
            let b = Ast::random(&mut rng, 8, 4);
            let ea = a.build(&mgr, &vars);
            let eb = b.build(&mgr, &vars);
            let equiv = (0u32..256).all(|bits| a.eval(bits) == b.eval(bits));
            assert_eq!(
                equiv,
                ea.node_id() == eb.node_id(),
                "canonicity violated for {a:?} vs {b:?}"
            );
        }
    }

    /// eval agrees with the independent tree evaluator on 1000 random cases.
    #[test]
    fn eval_matches_ast_oracle() {
        let mut rng = StdRng::seed_from_u64(7);
        let (mgr, vars) = setup(8);
        for _ in 0..1000 {
            let ast = Ast::random(&mut rng, 8, 5);
            let e = ast.build(&mgr, &vars);
            let bits: u32 = rng.random_range(0..256);
            let rho = assignment_for(&vars, bits);
            assert_eq!(e.eval(&rho).unwrap(), ast.eval(bits));
        }
    }

    /// Set algebra agrees with explicit subset computation on a 2^16 universe.
    #[test]
    fn set_ops_match_explicit_sets() {
        let mut rng = StdRng::seed_from_u64(99);
        let (mgr, vars) = setup(16);
        let explicit = |ast: &Ast| -> Vec<bool> { (0u32..65536).map(|b| ast.eval(b)).collect() };
        for _ in 0..20 {
            let a = Ast::random(&mut rng, 16, 5);
            let b = Ast::random(&mut rng, 16, 5);
            let (ea, eb) = (a.build(&mgr, &vars), b.build(&mgr, &vars));
            let (xa, xb) = (explicit(&a), explicit(&b));
            let probe: u32 = rng.random_range(0..65536);
            let check = |e: &BoolExpr, x: &dyn Fn(usize) -> bool| {
                let cnt = e.count(&vars).unwrap();
                let want: u64 = (0..65536).filter(|&i| x(i)).count() as u64;
                assert_eq!(cnt, BigUint::from(want));
                for bits in [0u32, 1, 12345, 65535, probe] {
                    let rho = assignment_for(&vars, bits);
                    assert_eq!(e.eval(&rho).unwrap(), x(bits as usize));
                }
            };
            check(&ea.union(&eb).unwrap(), &|i| xa[i] || xb[i]);
            check(&ea.intersect(&eb).unwrap(), &|i| xa[i] && xb[i]);
            check(&ea.difference(&eb).unwrap(), &|i| xa[i] && !xb[i]);
            assert_eq!(ea.is_empty(), xa.iter().all(|v| !v));
            assert_eq!(
                ea.equals(&eb),
                (0..65536).all(|i| xa[i] == xb[i]),
            );
        }
    }

    /// count is exact on small universes, including expressions whose
    /// support is a strict subset of the universe.
    #[test]
    fn count_is_exact() {
        let (mgr, vars) = setup(10);
        let a = mgr.mk_var(vars[0]).unwrap();
        let b = mgr.mk_var(vars[1]).unwrap();
        let e = a.or(&b).unwrap();
        assert_eq!(e.count(&vars).unwrap(), BigUint::from(3u32 * 256));
        assert_eq!(e.count(&vars[0..2]).unwrap(), BigUint::from(3u32));
        assert_eq!(mgr.mk_true().count(&vars).unwrap(), BigUint::from(1024u32));
        assert_eq!(mgr.mk_false().count(&vars).unwrap(), BigUint::from(0u32));
        assert!(e.count(&vars[0..1]).is_err());
    }

    #[test]
    fn exists_and_restrict() {
        let (mgr, vars) = setup(4);
        let a = mgr.mk_var(vars[0]).unwrap();
        let b = mgr.mk_var(vars[1]).unwrap();
        let f = a.and(&b).unwrap();
        assert!(f.exists(&[vars[0]]).unwrap().equals(&b));
        assert!(f.exists(&[vars[0], vars[1]]).unwrap().is_true());
        let rho = Assignment::new(vec![(vars[0], true)]).unwrap();
        assert!(f.restrict(&rho).unwrap().equals(&b));
        let rho0 = Assignment::new(vec![(vars[0], false)]).unwrap();
        assert!(f.restrict(&rho0).unwrap().is_false());
        // forall over one var of a ∨ b keeps b.
        let g = a.or(&b).unwrap();
        assert!(g.forall(&[vars[0]]).unwrap().equals(&b));
    }

    #[test]
    fn and_exists_matches_separate_ops() {
        let mut rng = StdRng::seed_from_u64(1234);
        let (mgr, vars) = setup(8);
        for _ in 0..200 {
            let a = Ast::random(&mut rng, 8, 4).build(&mgr, &vars);
            let b = Ast::random(&mut rng, 8, 4).build(&mgr, &vars);
            let k = rng.random_range(0..=vars.len());
            let quant: Vec<PropId> = vars[..k].to_vec();
            let fused = a.and_exists(&b, &quant).unwrap();
            let split = a.and(&b).unwrap().exists(&quant).unwrap();
            assert!(fused.equals(&split));
        }
    }

    #[test]
    fn rename_shifts_variables() {
        let (mgr, vars) = setup(6);
        // Map p0,p2 -> p1,p3 (order preserving).
        let f = mgr
            .mk_var(vars[0])
            .unwrap()
            .and(&mgr.mk_var(vars[2]).unwrap())
            .unwrap();
        let g = f.rename(&[(vars[0], vars[1]), (vars[2], vars[3])]).unwrap();
        let want = mgr
            .mk_var(vars[1])
            .unwrap()
            .and(&mgr.mk_var(vars[3]).unwrap())
            .unwrap();
        assert!(g.equals(&want));
        // Order-violating map is rejected.
        assert!(f.rename(&[(vars[0], vars[3]), (vars[2], vars[1])]).is_err());
    }

    #[test]
    fn minterm_enumeration_is_ordered_and_complete() {
        let (mgr, vars) = setup(3);
        let a = mgr.mk_var(vars[0]).unwrap();
        let c = mgr.mk_var(vars[2]).unwrap();
        let f = a.or(&c).unwrap();
        let ms = f.minterms(&vars).unwrap();
        assert_eq!(ms.len(), 6);
        assert_eq!(ms[0], f.first_minterm(&vars).unwrap().unwrap());
        // All distinct, all satisfy, in strictly increasing diagram order.
        for pair in ms.windows(2) {
            assert!(pair[0] < pair[1]);
        }
        for rho in &ms {
            assert!(f.eval(rho).unwrap());
        }
        assert!(mgr.mk_false().first_minterm(&vars).unwrap().is_none());
    }

    #[test]
    fn assignment_restriction_and_agreement() {
        let (mgr, vars) = setup(3);
        let _ = mgr;
        let rho1 = Assignment::new(vec![(vars[0], true), (vars[1], true), (vars[2], false)]).unwrap();
        let rho2 = Assignment::new(vec![(vars[0], true), (vars[1], true), (vars[2], true)]).unwrap();
        assert!(rho1.agrees_on(&rho2, &vars[0..2]));
        assert!(!rho1.agrees_on(&rho2, &vars));
        assert_eq!(rho1.restrict_to(&vars[0..2]), rho2.restrict_to(&vars[0..2]));
    }

    #[test]
    fn assignment_as_expr_is_minterm() {
        let (mgr, vars) = setup(3);
        let rho = Assignment::new(vec![(vars[0], true), (vars[1], false), (vars[2], true)]).unwrap();
        let e = mgr.assignment_as_expr(&rho, &vars).unwrap();
        assert_eq!(e.count(&vars).unwrap(), BigUint::from(1u32));
        assert!(e.eval(&rho).unwrap());
        let partial = mgr.assignment_as_expr(&rho, &vars[0..2]).unwrap();
        assert_eq!(partial.count(&vars).unwrap(), BigUint::from(2u32));
    }

    #[test]
    fn mixed_managers_rejected() {
        let (m1, v1) = setup(1);
        let (m2, v2) = setup(1);
        let a = m1.mk_var(v1[0]).unwrap();
        let b = m2.mk_var(v2[0]).unwrap();
        assert!(matches!(a.and(&b), Err(Error::Usage(_))));
    }

    #[test]
    fn node_ceiling_is_enforced() {
        let mgr = DdManager::with_node_ceiling(24);
        let vars: Vec<PropId> = (0..16)
            .map(|i| mgr.declare_prop(&format!("p{i}")).unwrap())
            .collect();
        let mut acc = mgr.mk_false();
        let mut hit = false;
        for chunk in vars.chunks(2) {
            let mut term = mgr.mk_true();
            for &p in chunk {
                term = match term.and(&mgr.mk_var(p).unwrap()) {
                    Ok(t) => t,
                    Err(Error::Resource(_)) => {
                        hit = true;
                        break;
                    }
                    Err(e) => panic!("unexpected error {e}"),
                };
            }
            if hit {
                break;
            }
            acc = match acc.or(&term) {
                Ok(a) => a,
                Err(Error::Resource(_)) => {
                    hit = true;
                    break;
                }
                Err(e) => panic!("unexpected error {e}"),
            };
        }
        assert!(hit, "ceiling of 24 nodes never triggered");
    }

    #[test]
    fn declare_prop_top_keeps_existing_exprs_valid() {
        let (mgr, vars) = setup(3);
        let f = mgr
            .mk_var(vars[0])
            .unwrap()
            .and(&mgr.mk_var(vars[2]).unwrap())
            .unwrap();
        let top = mgr.declare_prop_top("z").unwrap();
        let g = mgr.mk_var(top).unwrap().and(&f).unwrap();
        let mut rho = assignment_for(&vars, 0b101);
        rho.set(top, true);
        assert!(g.eval(&rho).unwrap());
        rho.set(top, false);
        assert!(!g.eval(&rho).unwrap());
        // z sits above: the first minterm over (z, p0..p2) fixes z=false for
        // an expression not mentioning z.
        let fm = f
            .first_minterm(&[top, vars[0], vars[1], vars[2]])
            .unwrap()
            .unwrap();
        assert_eq!(fm.get(top), Some(false));
    }

    #[test]
    fn duplicate_declarations_rejected() {
        let mgr = DdManager::new();
        mgr.declare_prop("a").unwrap();
        assert!(mgr.declare_prop("a").is_err());
        assert!(mgr.find_or_declare("a").is_ok());
    }

    #[test]
    fn compose_matches_pointwise_substitution() {
        // f(p,q,r) with p := x∧y and q := ¬x must agree with evaluating f at
        // the substituted inputs, for every truth table of f and all inputs.
        let (mgr, vars) = setup(5);
        let (p, q, r, x, y) = (vars[0], vars[1], vars[2], vars[3], vars[4]);
        let mut rng = StdRng::seed_from_u64(99);
        for _ in 0..200 {
            let truth: u8 = rng.random();
            let mut f = mgr.mk_false();
            for idx in 0..8u8 {
                if truth >> idx & 1 == 1 {
                    let rho = Assignment::new(vec![
                        (p, idx & 4 != 0),
                        (q, idx & 2 != 0),
                        (r, idx & 1 != 0),
                    ])
                    .unwrap();
                    f = f.or(&mgr.assignment_as_expr(&rho, &[p, q, r]).unwrap()).unwrap();
                }
            }
            let gx = mgr.mk_var(x).unwrap().and(&mgr.mk_var(y).unwrap()).unwrap();
            let gq = mgr.mk_var(x).unwrap().not().unwrap();
            let h = f.compose(&[(p, gx.clone()), (q, gq.clone())]).unwrap();
            for bits in 0..8u8 {
                let rho = Assignment::new(vec![
                    (x, bits & 4 != 0),
                    (y, bits & 2 != 0),
                    (r, bits & 1 != 0),
                ])
                .unwrap();
                let expect = {
                    let sub = Assignment::new(vec![
                        (p, gx.eval(&rho.restrict_to(&[x, y])).unwrap()),
                        (q, gq.eval(&rho.restrict_to(&[x])).unwrap()),
                        (r, rho.get(r).unwrap()),
                    ])
                    .unwrap();
                    f.eval(&sub).unwrap()
                };
                assert_eq!(h.eval(&rho).unwrap(), expect, "truth={truth:#b} bits={bits:#b}");
            }
        }
    }

}
