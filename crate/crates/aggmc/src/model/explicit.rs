//! Explicit-state Kripke structures with a symbolic view.
//!
//! States are dense ids `0..n`; the symbolic encoding uses
//! `⌈log₂ n⌉` current-state bits (most significant first) interleaved with
//! their next-state twins, so the numeric order of state ids equals the
//! enumeration order of the encoding.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::rc::Rc;

use crate::error::{Error, Result};
use crate::logic::{Assignment, BoolExpr, DdManager, PropId};
use crate::model::{Aggregate, KripkeModel};

pub struct ExplicitKs {
    mgr: Rc<DdManager>,
    ap_ids: Vec<PropId>,
    cur: Vec<PropId>,
    nxt: Vec<PropId>,
    labels: Vec<Assignment>,
    adj: Vec<Vec<usize>>,
    init: usize,
    relation: BoolExpr,
    sat: Vec<BoolExpr>,
    cur_to_nxt: Vec<(PropId, PropId)>,
    nxt_to_cur: Vec<(PropId, PropId)>,
    initial: Aggregate,
}

impl ExplicitKs {
    /// Builds a structure with `labels[s]` giving the truth value of each
    /// proposition of `ap_names` at state `s`.
    pub fn build(
        mgr: &Rc<DdManager>,
        ap_names: &[&str],
        labels: &[Vec<bool>],
        edges: &[(usize, usize)],
        init: usize,
    ) -> Result<ExplicitKs> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::model("a Kripke structure needs at least one state"));
        }
        if init >= n {
            return Err(Error::model(format!("initial state {init} out of range")));
        }
        for (i, row) in labels.iter().enumerate() {
            if row.len() != ap_names.len() {
                return Err(Error::model(format!(
                    "state {i} has {} label bits, expected {}",
                    row.len(),
                    ap_names.len()
                )));
            }
        }
        for &(s, t) in edges {
            if s >= n || t >= n {
                return Err(Error::model(format!("edge {s} -> {t} out of range")));
            }
        }

        let mut ap_ids = Vec::with_capacity(ap_names.len());
        for name in ap_names {
            ap_ids.push(mgr.find_or_declare(name)?);
        }
        let bits = bits_for(n);
        // A per-build stamp keeps encoding variable names unique if several
        // models share a manager.
        let stamp = mgr.prop_count();
        let mut cur = Vec::with_capacity(bits);
        let mut nxt = Vec::with_capacity(bits);
        for k in 0..bits {
            cur.push(mgr.declare_prop(&format!("@{stamp}c{k}"))?);
            nxt.push(mgr.declare_prop(&format!("@{stamp}n{k}"))?);
        }
        let cur_to_nxt: Vec<(PropId, PropId)> =
            cur.iter().copied().zip(nxt.iter().copied()).collect();
        let nxt_to_cur: Vec<(PropId, PropId)> =
            nxt.iter().copied().zip(cur.iter().copied()).collect();

        let cube = |vars: &[PropId], value: usize| -> Result<BoolExpr> {
            let rho = encode(vars, value);
            mgr.assignment_as_expr(&rho, vars)
        };

        let mut relation = mgr.mk_false();
        let mut sorted_edges: Vec<(usize, usize)> = edges.to_vec();
        sorted_edges.sort_unstable();
        sorted_edges.dedup();
        for &(s, t) in &sorted_edges {
            relation = relation.union(&cube(&cur, s)?.intersect(&cube(&nxt, t)?)?)?;
        }

        let mut sat = Vec::with_capacity(ap_ids.len());
        for a in 0..ap_ids.len() {
            let mut set = mgr.mk_false();
            for (s, row) in labels.iter().enumerate() {
                if row[a] {
                    set = set.union(&cube(&cur, s)?)?;
                }
            }
            sat.push(set);
        }

        let mut adj = vec![Vec::new(); n];
        for &(s, t) in &sorted_edges {
            adj[s].push(t);
        }

        let label_assignments: Vec<Assignment> = labels
            .iter()
            .map(|row| {
                Assignment::new(
                    ap_ids.iter().copied().zip(row.iter().copied()).collect(),
                )
            })
            .collect::<Result<_>>()?;

        let initial = Aggregate::from_expr(cube(&cur, init)?);
        Ok(ExplicitKs {
            mgr: Rc::clone(mgr),
            ap_ids,
            cur,
            nxt,
            labels: label_assignments,
            adj,
            init,
            relation,
            sat,
            cur_to_nxt,
            nxt_to_cur,
            initial,
        })
    }

    pub fn state_count(&self) -> usize {
        self.labels.len()
    }

    pub fn init_state(&self) -> usize {
        self.init
    }

    /// The label of state `s` as a total assignment over the APs.
    pub fn label(&self, s: usize) -> &Assignment {
        &self.labels[s]
    }

    /// Successor ids of `s`, ascending.
    pub fn successors(&self, s: usize) -> &[usize] {
        &self.adj[s]
    }

    /// The singleton symbolic set `{s}`.
    pub fn state_cube(&self, s: usize) -> Result<BoolExpr> {
        self.mgr.assignment_as_expr(&encode(&self.cur, s), &self.cur)
    }

    /// The symbolic set holding exactly the listed states.
    pub fn aggregate_of(&self, ids: &[usize]) -> Result<Aggregate> {
        let mut set = self.mgr.mk_false();
        for &s in ids {
            set = set.union(&self.state_cube(s)?)?;
        }
        Ok(Aggregate::from_expr(set))
    }

    /// The state ids contained in an aggregate, ascending.
    pub fn decode(&self, a: &Aggregate) -> Result<Vec<usize>> {
        let mut out = Vec::new();
        for rho in a.expr().minterms(&self.cur)? {
            let id = decode(&self.cur, &rho);
            if id < self.state_count() {
                out.push(id);
            }
        }
        Ok(out)
    }

    pub fn state_id(&self, state: &Assignment) -> usize {
        decode(&self.cur, state)
    }

    /// Parses the text format:
    /// `ap: a b`, then `state <id> <bits>` (one bit per AP), `edge <src>
    /// <dst>`, `init <id>` lines.  Blank lines and `#` comments are skipped.
    pub fn parse(mgr: &Rc<DdManager>, text: &str) -> Result<ExplicitKs> {
        let mut ap_names: Option<Vec<&str>> = None;
        let mut states: Vec<(usize, Vec<bool>)> = Vec::new();
        let mut edges: Vec<(usize, usize)> = Vec::new();
        let mut init: Option<usize> = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |msg: String| Error::format(format!("line {}: {msg}", lineno + 1));
            let mut tok = line.split_whitespace();
            match tok.next().unwrap() {
                "ap:" => {
                    if ap_names.is_some() {
                        return Err(bad("duplicate ap: line".into()));
                    }
                    ap_names = Some(tok.collect());
                }
                "state" => {
                    let aps = ap_names
                        .as_ref()
                        .ok_or_else(|| bad("state before ap: line".into()))?;
                    let id: usize = tok
                        .next()
                        .and_then(|t| t.parse().ok())
                        .ok_or_else(|| bad("state needs a numeric id".into()))?;
                    let bits = tok
                        .next()
                        .ok_or_else(|| bad("state needs a bit string".into()))?;
                    if tok.next().is_some() {
                        return Err(bad("trailing tokens after state line".into()));
                    }
                    if bits.len() != aps.len() && !(aps.is_empty() && bits == "-") {
                        return Err(bad(format!(
                            "label {bits} has {} bits, expected {}",
                            bits.len(),
                            aps.len()
                        )));
                    }
                    let row = if bits == "-" {
                        Vec::new()
                    } else {
                        bits.chars()
                            .map(|c| match c {
                                '0' => Ok(false),
                                '1' => Ok(true),
                                _ => Err(bad(format!("bad label bit {c}"))),
                            })
                            .collect::<Result<_>>()?
                    };
                    states.push((id, row));
                }
                "edge" => {
                    let s: usize = tok
                        .next()
                        .and_then(|t| t.parse().ok())
                        .ok_or_else(|| bad("edge needs numeric endpoints".into()))?;
                    let t: usize = tok
                        .next()
                        .and_then(|t| t.parse().ok())
                        .ok_or_else(|| bad("edge needs numeric endpoints".into()))?;
                    edges.push((s, t));
                }
                "init" => {
                    if init.is_some() {
                        return Err(bad("duplicate init line".into()));
                    }
                    init = Some(
                        tok.next()
                            .and_then(|t| t.parse().ok())
                            .ok_or_else(|| bad("init needs a numeric id".into()))?,
                    );
                }
                other => return Err(bad(format!("unknown directive {other}"))),
            }
        }
        let ap_names = ap_names.ok_or_else(|| Error::format("missing ap: line"))?;
        let init = init.ok_or_else(|| Error::format("missing init line"))?;
        let n = states.len();
        let mut labels = vec![None; n];
        for (id, row) in states {
            if id >= n {
                return Err(Error::format(format!(
                    "state ids must be dense 0..{n}, got {id}"
                )));
            }
            if labels[id].replace(row).is_some() {
                return Err(Error::format(format!("state {id} declared twice")));
            }
        }
        let labels: Vec<Vec<bool>> = labels
            .into_iter()
            .map(|o| o.ok_or_else(|| Error::format("state ids must be dense")))
            .collect::<Result<_>>()?;
        ExplicitKs::build(mgr, &ap_names, &labels, &edges, init)
    }

    /// Serializes in the format accepted by [`ExplicitKs::parse`].
    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str("ap:");
        for &p in &self.ap_ids {
            let _ = write!(out, " {}", self.mgr.prop_name(p));
        }
        out.push('\n');
        for (s, label) in self.labels.iter().enumerate() {
            let mut bits = String::new();
            for &p in &self.ap_ids {
                bits.push(if label.get(p) == Some(true) { '1' } else { '0' });
            }
            if bits.is_empty() {
                bits.push('-');
            }
            let _ = writeln!(out, "state {s} {bits}");
        }
        let mut all: BTreeSet<(usize, usize)> = BTreeSet::new();
        for (s, succs) in self.adj.iter().enumerate() {
            for &t in succs {
                all.insert((s, t));
            }
        }
        for (s, t) in all {
            let _ = writeln!(out, "edge {s} {t}");
        }
        let _ = writeln!(out, "init {}", self.init);
        out
    }
}

impl KripkeModel for ExplicitKs {
    fn manager(&self) -> &Rc<DdManager> {
        &self.mgr
    }

    fn aps(&self) -> &[PropId] {
        &self.ap_ids
    }

    fn state_vars(&self) -> &[PropId] {
        &self.cur
    }

    fn next_vars(&self) -> &[PropId] {
        &self.nxt
    }

    fn initial(&self) -> Aggregate {
        self.initial.clone()
    }

    fn sat_prop(&self, p: PropId) -> Result<BoolExpr> {
        match self.ap_ids.iter().position(|&q| q == p) {
            Some(i) => Ok(self.sat[i].clone()),
            None => Err(Error::usage(format!(
                "{} is not an atomic proposition of this model",
                self.mgr.prop_name(p)
            ))),
        }
    }

    fn relation_count(&self) -> usize {
        1
    }

    fn image_rel(&self, _rel: usize, set: &BoolExpr) -> Result<BoolExpr> {
        self.relation
            .and_exists(set, &self.cur)?
            .rename(&self.nxt_to_cur)
    }

    fn preimage_rel(&self, _rel: usize, set: &BoolExpr) -> Result<BoolExpr> {
        let shifted = set.rename(&self.cur_to_nxt)?;
        self.relation.and_exists(&shifted, &self.nxt)
    }

    fn describe_state(&self, state: &Assignment) -> String {
        format!("s{}", decode(&self.cur, state))
    }
}

fn bits_for(n: usize) -> usize {
    let mut bits = 1;
    while (1usize << bits) < n {
        bits += 1;
    }
    bits
}

/// Encodes `value` over `vars`, most significant variable first.
fn encode(vars: &[PropId], value: usize) -> Assignment {
    let mut rho = Assignment::empty();
    let w = vars.len();
    for (k, &v) in vars.iter().enumerate() {
        rho.set(v, value >> (w - 1 - k) & 1 == 1);
    }
    rho
}

fn decode(vars: &[PropId], rho: &Assignment) -> usize {
    let mut value = 0usize;
    for &v in vars {
        value = value << 1 | usize::from(rho.get(v) == Some(true));
    }
    value
}

/// The running 8-state example used across product tests: states s0..s7,
/// labels over {a, b, c}: s0..s3 and s5 carry a¬b¬c, s4 carries ab¬c, s6
/// carries ¬ab¬c, s7 carries ¬abc.  Edges: s0→{s1,s4}, the chain s1→s2→s3
/// closing back s3→s1, and the ring s4→s5→s6→s7→s4.
#[cfg(test)]
pub(crate) fn fig_ks(mgr: &Rc<DdManager>) -> ExplicitKs {
    let a__ = vec![true, false, false];
    let ab_ = vec![true, true, false];
    let _b_ = vec![false, true, false];
    let _bc = vec![false, true, true];
    ExplicitKs::build(
        mgr,
        &["a", "b", "c"],
        &[
            a__.clone(),
            a__.clone(),
            a__.clone(),
            a__.clone(),
            ab_,
            a__,
            _b_,
            _bc,
        ],
        &[
            (0, 1),
            (0, 4),
            (1, 2),
            (2, 3),
            (3, 1),
            (4, 5),
            (5, 6),
            (6, 7),
            (7, 4),
        ],
        0,
    )
    .unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model;
    use crate::Deadline;

    fn ids(ks: &ExplicitKs, a: &Aggregate) -> Vec<usize> {
        ks.decode(a).unwrap()
    }

    #[test]
    fn worked_examples_for_all_operators() {
        let mgr = DdManager::new();
        let ks = fig_ks(&mgr);
        let dl = Deadline::none();
        let a = mgr.mk_var(mgr.prop_by_name("a").unwrap()).unwrap();
        let b = mgr.mk_var(mgr.prop_by_name("b").unwrap()).unwrap();
        let anb = a.and(&b.not().unwrap()).unwrap();
        let top = mgr.mk_true();
        let bot = mgr.mk_false();

        let s = |list: &[usize]| ks.aggregate_of(list).unwrap();

        // Destination-filtered successors.
        let r = model::succ_f(&ks, &s(&[0]), &anb).unwrap();
        assert_eq!(ids(&ks, &r), vec![1]);
        let r = model::succ_f(&ks, &s(&[4]), &top).unwrap();
        assert_eq!(ids(&ks, &r), vec![5]);
        let r = model::succ_f(&ks, &s(&[]), &top).unwrap();
        assert!(r.is_empty());

        // Destination-filtered closure.
        let r = model::reach_f(&ks, &s(&[0]), &anb, &dl).unwrap();
        assert_eq!(ids(&ks, &r), vec![0, 1, 2, 3]);
        let r = model::reach_f(&ks, &s(&[5]), &top, &dl).unwrap();
        assert_eq!(ids(&ks, &r), vec![4, 5, 6, 7]);
        let r = model::reach_f(&ks, &s(&[0, 4]), &bot, &dl).unwrap();
        assert_eq!(ids(&ks, &r), vec![0, 4]);

        // Source-filtered successors.
        let r = model::f_succ(&ks, &s(&[0, 1, 2, 3, 4]), &b).unwrap();
        assert_eq!(ids(&ks, &r), vec![5]);
        let r = model::f_succ(&ks, &s(&[5]), &top).unwrap();
        assert_eq!(ids(&ks, &r), vec![6]);

        // Source-filtered closure.
        let r = model::f_reach(&ks, &s(&[0]), &anb, &dl).unwrap();
        assert_eq!(ids(&ks, &r), vec![0, 1, 2, 3, 4]);
        let r = model::f_reach(&ks, &s(&[6]), &top, &dl).unwrap();
        assert_eq!(ids(&ks, &r), vec![4, 5, 6, 7]);
        let r = model::f_reach(&ks, &s(&[2]), &bot, &dl).unwrap();
        assert_eq!(ids(&ks, &r), vec![2]);

        // Cycle detection.
        assert!(model::contains_cycle(&ks, &s(&[0, 1, 2, 3]), &dl).unwrap());
        assert!(!model::contains_cycle(&ks, &s(&[4]), &dl).unwrap());
        assert!(!model::contains_cycle(&ks, &s(&[]), &dl).unwrap());
        assert!(model::contains_cycle(&ks, &s(&[4, 5, 6, 7]), &dl).unwrap());
    }

    #[test]
    fn partition_groups_and_orders_by_least_member() {
        let mgr = DdManager::new();
        let ks = fig_ks(&mgr);
        let all = ks.aggregate_of(&[0, 1, 2, 3, 4, 5, 6, 7]).unwrap();
        let pa = mgr.prop_by_name("a").unwrap();
        let pb = mgr.prop_by_name("b").unwrap();
        let classes = model::partition_by_observed(&ks, &all, &[pa, pb]).unwrap();
        assert_eq!(classes.len(), 3);
        let as_bits: Vec<(Vec<bool>, Vec<usize>)> = classes
            .iter()
            .map(|(asg, set)| {
                (
                    vec![asg.get(pa).unwrap(), asg.get(pb).unwrap()],
                    ids(&ks, set),
                )
            })
            .collect();
        assert_eq!(
            as_bits,
            vec![
                (vec![true, false], vec![0, 1, 2, 3, 5]),
                (vec![true, true], vec![4]),
                (vec![false, true], vec![6, 7]),
            ]
        );
        // Homogeneity: each class agrees with its label on the observed set.
        for (asg, set) in &classes {
            for s in ids(&ks, set) {
                assert!(ks.label(s).agrees_on(asg, &[pa, pb]));
            }
        }
        // Over the empty observation set: one class, the whole aggregate.
        let trivial = model::partition_by_observed(&ks, &all, &[]).unwrap();
        assert_eq!(trivial.len(), 1);
        assert_eq!(ids(&ks, &trivial[0].1), (0..8).collect::<Vec<_>>());
        assert!(trivial[0].0.is_empty());
    }

    #[test]
    fn label_of_reports_homogeneity() {
        let mgr = DdManager::new();
        let ks = fig_ks(&mgr);
        let pa = mgr.prop_by_name("a").unwrap();
        let pb = mgr.prop_by_name("b").unwrap();
        let homo = ks.aggregate_of(&[0, 1, 2, 3]).unwrap();
        let l = model::label_of(&ks, &homo, &[pa, pb]).unwrap().unwrap();
        assert_eq!(l.get(pa), Some(true));
        assert_eq!(l.get(pb), Some(false));
        let mixed = ks.aggregate_of(&[3, 4]).unwrap();
        assert!(model::label_of(&ks, &mixed, &[pa, pb]).unwrap().is_none());
        // Homogeneous over {a} even though mixed over {a,b}.
        let l = model::label_of(&ks, &mixed, &[pa]).unwrap().unwrap();
        assert_eq!(l.get(pa), Some(true));
    }

    #[test]
    fn text_format_round_trips() {
        let mgr = DdManager::new();
        let ks = fig_ks(&mgr);
        let text = ks.render();
        let mgr2 = DdManager::new();
        let back = ExplicitKs::parse(&mgr2, &text).unwrap();
        assert_eq!(back.render(), text);
        assert_eq!(back.state_count(), 8);
        assert_eq!(back.init_state(), 0);
        assert_eq!(back.successors(0), &[1, 4]);

        assert!(ExplicitKs::parse(&DdManager::new(), "state 0 00\n").is_err());
        assert!(ExplicitKs::parse(&DdManager::new(), "ap: a\nstate 0 11\ninit 0\n").is_err());
        assert!(ExplicitKs::parse(&DdManager::new(), "ap: a\nstate 0 1\n").is_err());
        assert!(
            ExplicitKs::parse(&DdManager::new(), "ap: a\nstate 0 1\nedge 0 3\ninit 0\n").is_err()
        );
    }

    #[test]
    fn reachable_states_and_counts() {
        let mgr = DdManager::new();
        let ks = fig_ks(&mgr);
        let dl = Deadline::none();
        let reach = model::reachable_states(&ks, &dl).unwrap();
        assert_eq!(ids(&ks, &reach), (0..8).collect::<Vec<_>>());
        assert_eq!(
            model::count_states(&ks, &reach).unwrap(),
            num_bigint::BigUint::from(8u32)
        );
    }
}
