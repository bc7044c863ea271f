//! Tableau translation from LTL to transition-based generalized Büchi
//! automata.
//!
//! States are sets of obligations (interned subformulas); each state expands
//! into branches (label, next-obligations, promises) by rewriting every
//! obligation one step. An Until obligation that postpones its right-hand
//! side "promises" it; one acceptance condition per Until subformula marks
//! exactly the transitions that do not promise it, so a run is accepting iff
//! no promise is deferred forever.
//!
//! When an Until/Release right-hand (resp. left-hand) operand is purely
//! propositional, the branch for satisfying it now is made disjoint from the
//! branch that postpones (`f U g = g ∨ (¬g ∧ f ∧ X(f U g))`). This keeps
//! self-loop guards tight, which directly improves self-loop aggregation,
//! without risking blowup: for temporal operands the classic overlapping
//! expansion is used instead.

use std::collections::{BTreeSet, HashMap};
use std::rc::Rc;

use indexmap::IndexSet;

use crate::error::{Error, Result};
use crate::logic::{BoolExpr, DdManager};
use crate::ltl::{is_syntactically_stutter_invariant, nnf, simplify, LtlAst};
use crate::tgba::{AccSet, Tgba, TgbaEdge};

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
enum Tf {
    True,
    False,
    /// Literal over a proposition index; `true` means negated.
    Lit(u32, bool),
    And(u32, u32),
    Or(u32, u32),
    Next(u32),
    Until(u32, u32),
    Release(u32, u32),
}

struct Arena {
    terms: IndexSet<Tf>,
}

impl Arena {
    fn new() -> Arena {
        Arena {
            terms: IndexSet::new(),
        }
    }

    fn intern(&mut self, t: Tf) -> u32 {
        self.terms.insert_full(t).0 as u32
    }

    fn get(&self, id: u32) -> &Tf {
        self.terms.get_index(id as usize).unwrap()
    }

    /// Interns the negation (the fragment is closed under negation).
    fn neg(&mut self, id: u32) -> u32 {
        let t = self.get(id).clone();
        let n = match t {
            Tf::True => Tf::False,
            Tf::False => Tf::True,
            Tf::Lit(p, neg) => Tf::Lit(p, !neg),
            Tf::And(a, b) => {
                let (na, nb) = (self.neg(a), self.neg(b));
                Tf::Or(na, nb)
            }
            Tf::Or(a, b) => {
                let (na, nb) = (self.neg(a), self.neg(b));
                Tf::And(na, nb)
            }
            Tf::Next(a) => {
                let na = self.neg(a);
                Tf::Next(na)
            }
            Tf::Until(a, b) => {
                let (na, nb) = (self.neg(a), self.neg(b));
                Tf::Release(na, nb)
            }
            Tf::Release(a, b) => {
                let (na, nb) = (self.neg(a), self.neg(b));
                Tf::Until(na, nb)
            }
        };
        self.intern(n)
    }

    fn is_boolean(&self, id: u32) -> bool {
        match *self.get(id) {
            Tf::True | Tf::False | Tf::Lit(..) => true,
            Tf::And(a, b) | Tf::Or(a, b) => self.is_boolean(a) && self.is_boolean(b),
            Tf::Next(_) | Tf::Until(..) | Tf::Release(..) => false,
        }
    }

    fn collect_untils(&self, id: u32, out: &mut BTreeSet<u32>, seen: &mut BTreeSet<u32>) {
        if !seen.insert(id) {
            return;
        }
        match *self.get(id) {
            Tf::True | Tf::False | Tf::Lit(..) => {}
            Tf::Next(a) => self.collect_untils(a, out, seen),
            Tf::And(a, b) | Tf::Or(a, b) | Tf::Release(a, b) => {
                self.collect_untils(a, out, seen);
                self.collect_untils(b, out, seen);
            }
            Tf::Until(a, b) => {
                out.insert(id);
                self.collect_untils(a, out, seen);
                self.collect_untils(b, out, seen);
            }
        }
    }
}

#[derive(Clone)]
struct Branch {
    label: BoolExpr,
    nexts: BTreeSet<u32>,
    promises: BTreeSet<u32>,
}

struct Translator {
    arena: Arena,
    mgr: Rc<DdManager>,
    /// Proposition literals as diagram variables, indexed like `Tf::Lit`.
    lits: Vec<BoolExpr>,
    expand_memo: HashMap<u32, Rc<Vec<Branch>>>,
}

impl Translator {
    fn lower(&mut self, f: &LtlAst, prop_index: &HashMap<String, u32>) -> u32 {
        match f {
            LtlAst::True => self.arena.intern(Tf::True),
            LtlAst::False => self.arena.intern(Tf::False),
            LtlAst::Prop(p) => self.arena.intern(Tf::Lit(prop_index[p], false)),
            LtlAst::Not(inner) => match &**inner {
                LtlAst::Prop(p) => self.arena.intern(Tf::Lit(prop_index[p], true)),
                // Input is in negation normal form.
                _ => unreachable!("non-literal negation after nnf"),
            },
            LtlAst::And(a, b) => {
                let (ia, ib) = (self.lower(a, prop_index), self.lower(b, prop_index));
                self.arena.intern(Tf::And(ia, ib))
            }
            LtlAst::Or(a, b) => {
                let (ia, ib) = (self.lower(a, prop_index), self.lower(b, prop_index));
                self.arena.intern(Tf::Or(ia, ib))
            }
            LtlAst::Next(a) => {
                let ia = self.lower(a, prop_index);
                self.arena.intern(Tf::Next(ia))
            }
            LtlAst::Eventually(a) => {
                let tt = self.arena.intern(Tf::True);
                let ia = self.lower(a, prop_index);
                self.arena.intern(Tf::Until(tt, ia))
            }
            LtlAst::Always(a) => {
                let ff = self.arena.intern(Tf::False);
                let ia = self.lower(a, prop_index);
                self.arena.intern(Tf::Release(ff, ia))
            }
            LtlAst::Until(a, b) => {
                let (ia, ib) = (self.lower(a, prop_index), self.lower(b, prop_index));
                self.arena.intern(Tf::Until(ia, ib))
            }
            LtlAst::Release(a, b) => {
                let (ia, ib) = (self.lower(a, prop_index), self.lower(b, prop_index));
                self.arena.intern(Tf::Release(ia, ib))
            }
            LtlAst::Implies(..) => unreachable!("implication after nnf"),
        }
    }

    fn unit_branch(&self) -> Branch {
        Branch {
            label: self.mgr.mk_true(),
            nexts: BTreeSet::new(),
            promises: BTreeSet::new(),
        }
    }

    fn cross(&self, xs: &[Branch], ys: &[Branch]) -> Result<Vec<Branch>> {
        let mut out = Vec::with_capacity(xs.len() * ys.len());
        for x in xs {
            for y in ys {
                let label = x.label.and(&y.label)?;
                if label.is_false() {
                    continue;
                }
                let mut nexts = x.nexts.clone();
                nexts.extend(y.nexts.iter().copied());
                let mut promises = x.promises.clone();
                promises.extend(y.promises.iter().copied());
                out.push(Branch {
                    label,
                    nexts,
                    promises,
                });
            }
        }
        Ok(out)
    }

    fn expand(&mut self, id: u32) -> Result<Rc<Vec<Branch>>> {
        if let Some(b) = self.expand_memo.get(&id) {
            return Ok(Rc::clone(b));
        }
        let t = self.arena.get(id).clone();
        let branches = match t {
            Tf::True => vec![self.unit_branch()],
            Tf::False => vec![],
            Tf::Lit(p, neg) => {
                let var = &self.lits[p as usize];
                let label = if neg { var.not()? } else { var.clone() };
                vec![Branch {
                    label,
                    nexts: BTreeSet::new(),
                    promises: BTreeSet::new(),
                }]
            }
            Tf::And(a, b) => {
                let (xa, xb) = (self.expand(a)?, self.expand(b)?);
                self.cross(&xa, &xb)?
            }
            Tf::Or(a, b) => {
                let (xa, xb) = (self.expand(a)?, self.expand(b)?);
                let mut out = xa.as_ref().clone();
                out.extend(xb.iter().cloned());
                out
            }
            Tf::Next(a) => vec![Branch {
                label: self.mgr.mk_true(),
                nexts: BTreeSet::from([a]),
                promises: BTreeSet::new(),
            }],
            Tf::Until(a, b) => {
                // g ∨ ([¬g ∧] f ∧ X(f U g)), promising g in the second arm.
                let now = self.expand(b)?.as_ref().clone();
                let mut postpone = self.expand(a)?.as_ref().clone();
                if self.arena.is_boolean(b) {
                    let nb = self.arena.neg(b);
                    let guard_not_g = self.expand(nb)?;
                    postpone = self.cross(&postpone, &guard_not_g)?;
                }
                let loop_branch = vec![Branch {
                    label: self.mgr.mk_true(),
                    nexts: BTreeSet::from([id]),
                    promises: BTreeSet::from([id]),
                }];
                let mut out = now;
                out.extend(self.cross(&postpone, &loop_branch)?);
                out
            }
            Tf::Release(a, b) => {
                // (f ∧ g) ∨ (g [∧ ¬f] ∧ X(f R g)).
                let g = self.expand(b)?;
                let f = self.expand(a)?;
                let both = self.cross(&f, &g)?;
                let mut postpone = g.as_ref().clone();
                if self.arena.is_boolean(a) {
                    let na = self.arena.neg(a);
                    let guard_not_f = self.expand(na)?;
                    postpone = self.cross(&postpone, &guard_not_f)?;
                }
                let loop_branch = vec![Branch {
                    label: self.mgr.mk_true(),
                    nexts: BTreeSet::from([id]),
                    promises: BTreeSet::new(),
                }];
                let mut out = both;
                out.extend(self.cross(&postpone, &loop_branch)?);
                out
            }
        };
        let rc = Rc::new(branches);
        self.expand_memo.insert(id, Rc::clone(&rc));
        Ok(rc)
    }

    fn expand_state(&mut self, state: &BTreeSet<u32>) -> Result<Vec<Branch>> {
        let mut acc = vec![self.unit_branch()];
        for &ob in state {
            let bs = self.expand(ob)?;
            acc = self.cross(&acc, &bs)?;
        }
        // Merge branches with identical next-obligations and promises by
        // disjoining their labels; order the result canonically.
        let mut merged: HashMap<(BTreeSet<u32>, BTreeSet<u32>), BoolExpr> = HashMap::new();
        let mut keys: Vec<(BTreeSet<u32>, BTreeSet<u32>)> = Vec::new();
        for b in acc {
            let key = (b.nexts, b.promises);
            match merged.get_mut(&key) {
                Some(l) => *l = l.or(&b.label)?,
                None => {
                    merged.insert(key.clone(), b.label);
                    keys.push(key);
                }
            }
        }
        keys.sort();
        Ok(keys
            .into_iter()
            .map(|key| {
                let label = merged[&key].clone();
                Branch {
                    label,
                    nexts: key.0,
                    promises: key.1,
                }
            })
            .collect())
    }
}

/// Translates an LTL formula into a TGBA over the formula's propositions
/// (declared in `mgr` as needed, in sorted name order). The result carries
/// one acceptance condition per Until subformula (empty-acceptance results
/// get one via back-edge marking), keeps only states that can reach an
/// accepting cycle (the initial state always stays), and leaves no
/// acceptance marks on edges between distinct strongly connected components.
pub fn translate(mgr: &Rc<DdManager>, f: &LtlAst) -> Result<Tgba> {
    let f = simplify(f);
    let stutter = is_syntactically_stutter_invariant(&f);
    let f = nnf(&f);
    let prop_names = f.props();
    let mut prop_index = HashMap::new();
    let mut aps = Vec::new();
    let mut lits = Vec::new();
    for (i, name) in prop_names.iter().enumerate() {
        let p = mgr.find_or_declare(name)?;
        prop_index.insert(name.clone(), i as u32);
        aps.push(p);
        lits.push(mgr.mk_var(p)?);
    }
    let mut tr = Translator {
        arena: Arena::new(),
        mgr: Rc::clone(mgr),
        lits,
        expand_memo: HashMap::new(),
    };
    let root = tr.lower(&f, &prop_index);

    let mut untils = BTreeSet::new();
    tr.arena
        .collect_untils(root, &mut untils, &mut BTreeSet::new());
    if untils.len() as u32 > AccSet::MAX_CONDITIONS {
        return Err(Error::usage(format!(
            "more than {} Until subformulas",
            AccSet::MAX_CONDITIONS
        )));
    }
    let cond_index: HashMap<u32, u32> = untils
        .iter()
        .enumerate()
        .map(|(i, &u)| (u, i as u32))
        .collect();
    let acc_count = untils.len() as u32;
    let all_conds = AccSet::full(acc_count);

    // Breadth-first construction over obligation sets. A trivially true
    // obligation constrains nothing and is dropped so that {true} and {}
    // denote the same state.
    let true_id = tr.arena.intern(Tf::True);
    let normalize = |mut s: BTreeSet<u32>| {
        s.remove(&true_id);
        s
    };
    let mut state_ids: IndexSet<BTreeSet<u32>> = IndexSet::new();
    let init_state = normalize(BTreeSet::from([root]));
    state_ids.insert(init_state.clone());
    let mut edges: Vec<Vec<TgbaEdge>> = Vec::new();
    let mut next_to_visit = 0usize;
    while next_to_visit < state_ids.len() {
        let state = state_ids.get_index(next_to_visit).unwrap().clone();
        next_to_visit += 1;
        let mut outs = Vec::new();
        for b in tr.expand_state(&state)? {
            let dst = state_ids.insert_full(normalize(b.nexts.clone())).0;
            let mut acc = AccSet::empty();
            for (&u, &ci) in &cond_index {
                if !b.promises.contains(&u) {
                    acc = acc.with(ci);
                }
            }
            outs.push(TgbaEdge {
                dst,
                guard: b.label,
                acc,
            });
        }
        edges.push(outs);
    }

    prune_and_finish(mgr, aps, edges, acc_count, all_conds, stutter)
}

/// Drops states that cannot reach an accepting cycle, strips acceptance
/// marks from edges that link two different strongly connected components,
/// and packages the result (adding an acceptance condition if there is
/// none).
fn prune_and_finish(
    mgr: &Rc<DdManager>,
    aps: Vec<crate::logic::PropId>,
    edges: Vec<Vec<TgbaEdge>>,
    acc_count: u32,
    all_conds: AccSet,
    stutter: bool,
) -> Result<Tgba> {
    let n = edges.len();
    let sccs = tarjan_sccs(&edges);
    let scc_count = sccs.iter().map(|&c| c + 1).max().unwrap_or(0);
    // An SCC is accepting when its internal edges jointly cover all
    // conditions; with no conditions at all, any internal cycle accepts.
    let mut internal_acc = vec![AccSet::empty(); scc_count];
    let mut has_internal_edge = vec![false; scc_count];
    for (src, outs) in edges.iter().enumerate() {
        for e in outs {
            if sccs[src] == sccs[e.dst] {
                let c = sccs[src];
                internal_acc[c] = internal_acc[c].union(e.acc);
                has_internal_edge[c] = true;
            }
        }
    }
    let accepting: Vec<bool> = (0..scc_count)
        .map(|c| has_internal_edge[c] && internal_acc[c] == all_conds)
        .collect();
    // States that can reach an accepting SCC (backward closure).
    let mut keep: Vec<bool> = (0..n).map(|q| accepting[sccs[q]]).collect();
    loop {
        let mut changed = false;
        for (src, outs) in edges.iter().enumerate() {
            if !keep[src] && outs.iter().any(|e| keep[e.dst]) {
                keep[src] = true;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    keep[0] = true; // the initial state stays even when its language is empty
    let mut renumber = vec![usize::MAX; n];
    let mut kept = 0usize;
    for q in 0..n {
        if keep[q] {
            renumber[q] = kept;
            kept += 1;
        }
    }
    let mut new_edges: Vec<Vec<TgbaEdge>> = vec![Vec::new(); kept];
    for (src, outs) in edges.iter().enumerate() {
        if !keep[src] {
            continue;
        }
        for e in outs {
            if !keep[e.dst] {
                continue;
            }
            let acc = if sccs[src] == sccs[e.dst] {
                e.acc
            } else {
                AccSet::empty()
            };
            new_edges[renumber[src]].push(TgbaEdge {
                dst: renumber[e.dst],
                guard: e.guard.clone(),
                acc,
            });
        }
    }
    let t = Tgba::from_parts(
        Rc::clone(mgr),
        aps,
        new_edges,
        0,
        acc_count,
        Some(stutter),
    )?;
    Ok(t.ensure_acceptance())
}

/// Iterative Tarjan; returns the SCC id per state (ids are arbitrary but
/// dense).
fn tarjan_sccs(edges: &[Vec<TgbaEdge>]) -> Vec<usize> {
    let n = edges.len();
    let mut low = vec![0usize; n];
    let mut num = vec![usize::MAX; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut scc_of = vec![usize::MAX; n];
    let mut counter = 0usize;
    let mut scc_count = 0usize;
    for start in 0..n {
        if num[start] != usize::MAX {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(start, 0)];
        num[start] = counter;
        low[start] = counter;
        counter += 1;
        stack.push(start);
        on_stack[start] = true;
        while let Some(&(q, i)) = call.last() {
            if i < edges[q].len() {
                call.last_mut().unwrap().1 += 1;
                let w = edges[q][i].dst;
                if num[w] == usize::MAX {
                    num[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[q] = low[q].min(num[w]);
                }
            } else {
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    low[parent] = low[parent].min(low[q]);
                }
                if low[q] == num[q] {
                    loop {
                        let w = stack.pop().unwrap();
                        on_stack[w] = false;
                        scc_of[w] = scc_count;
                        if w == q {
                            break;
                        }
                    }
                    scc_count += 1;
                }
            }
        }
    }
    scc_of
}
