//! Bounded place/transition nets with a symbolic marking encoding.
//!
//! Each place with bound `k` is encoded on `⌈log₂(k+1)⌉` bits (most
//! significant first); current/next twins are interleaved and places follow
//! their declaration order.  Every transition owns one partial relation;
//! firing a transition past a declared place bound is an error, detected
//! symbolically during image computation.
//!
//! Atomic propositions are named marking predicates built from comparisons
//! `place OP constant` (`=`, `>=`, `<=`) combined with `!`, `&&`, `||` and
//! parentheses.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::rc::Rc;

use crate::error::{Error, Result};
use crate::logic::{Assignment, BoolExpr, DdManager, PropId};
use crate::model::{Aggregate, KripkeModel};

/// Largest accepted place bound; keeps relation construction, which
/// enumerates marking values, linear and predictable.
const MAX_BOUND: u64 = 1 << 16;

#[derive(Clone, Debug)]
pub struct PlaceSpec {
    pub name: String,
    pub bound: u64,
    pub init: u64,
}

#[derive(Clone, Debug)]
pub struct TransSpec {
    pub name: String,
    pub input: Vec<(String, u64)>,
    pub output: Vec<(String, u64)>,
}

/// Structural description of a net; the buildable/parsable carrier behind
/// [`PetriNetKs`].
#[derive(Clone, Debug, Default)]
pub struct PetriSpec {
    pub places: Vec<PlaceSpec>,
    pub transitions: Vec<TransSpec>,
    /// `(name, predicate source)` pairs.
    pub props: Vec<(String, String)>,
}

impl PetriSpec {
    pub fn place(&mut self, name: &str, bound: u64, init: u64) {
        self.places.push(PlaceSpec {
            name: name.to_string(),
            bound,
            init,
        });
    }

    pub fn trans(&mut self, name: &str, input: &[(&str, u64)], output: &[(&str, u64)]) {
        self.transitions.push(TransSpec {
            name: name.to_string(),
            input: input.iter().map(|&(p, w)| (p.to_string(), w)).collect(),
            output: output.iter().map(|&(p, w)| (p.to_string(), w)).collect(),
        });
    }

    pub fn prop(&mut self, name: &str, pred: &str) {
        self.props.push((name.to_string(), pred.to_string()));
    }

    /// Parses the text format: `place <name> bound <k> init <m>`,
    /// `trans <name> in <place:weight ...> out <place:weight ...>`,
    /// `prop <name> := <predicate>`.  Blank lines and `#` comments are
    /// skipped.
    pub fn parse(text: &str) -> Result<PetriSpec> {
        let mut spec = PetriSpec::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |msg: String| Error::format(format!("line {}: {msg}", lineno + 1));
            let toks: Vec<&str> = line.split_whitespace().collect();
            match toks[0] {
                "place" => {
                    if toks.len() != 6 || toks[2] != "bound" || toks[4] != "init" {
                        return Err(bad(
                            "expected: place <name> bound <k> init <m>".into()
                        ));
                    }
                    let bound: u64 = toks[3]
                        .parse()
                        .map_err(|_| bad(format!("bad bound {}", toks[3])))?;
                    let init: u64 = toks[5]
                        .parse()
                        .map_err(|_| bad(format!("bad initial marking {}", toks[5])))?;
                    spec.place(toks[1], bound, init);
                }
                "trans" => {
                    if toks.len() < 3 || toks[2] != "in" {
                        return Err(bad(
                            "expected: trans <name> in <p:w ...> out <p:w ...>".into(),
                        ));
                    }
                    let out_at = toks
                        .iter()
                        .position(|&t| t == "out")
                        .ok_or_else(|| bad("missing out section".into()))?;
                    let arc = |t: &str| -> Result<(String, u64)> {
                        let (p, w) = t
                            .split_once(':')
                            .ok_or_else(|| bad(format!("bad arc {t}, expected place:weight")))?;
                        let w: u64 =
                            w.parse().map_err(|_| bad(format!("bad arc weight in {t}")))?;
                        Ok((p.to_string(), w))
                    };
                    let input = toks[3..out_at].iter().map(|t| arc(t)).collect::<Result<_>>()?;
                    let output = toks[out_at + 1..]
                        .iter()
                        .map(|t| arc(t))
                        .collect::<Result<_>>()?;
                    spec.transitions.push(TransSpec {
                        name: toks[1].to_string(),
                        input,
                        output,
                    });
                }
                "prop" => {
                    let rest = line.strip_prefix("prop").unwrap().trim();
                    let (name, pred) = rest
                        .split_once(":=")
                        .ok_or_else(|| bad("expected: prop <name> := <predicate>".into()))?;
                    spec.prop(name.trim(), pred.trim());
                }
                other => return Err(bad(format!("unknown directive {other}"))),
            }
        }
        Ok(spec)
    }

    /// Serializes in the format accepted by [`PetriSpec::parse`].
    pub fn render(&self) -> String {
        let mut out = String::new();
        for p in &self.places {
            let _ = writeln!(out, "place {} bound {} init {}", p.name, p.bound, p.init);
        }
        for t in &self.transitions {
            let _ = write!(out, "trans {} in", t.name);
            for (p, w) in &t.input {
                let _ = write!(out, " {p}:{w}");
            }
            let _ = write!(out, " out");
            for (p, w) in &t.output {
                let _ = write!(out, " {p}:{w}");
            }
            out.push('\n');
        }
        for (name, pred) in &self.props {
            let _ = writeln!(out, "prop {name} := {pred}");
        }
        out
    }
}

struct PlaceEnc {
    bound: u64,
    init: u64,
    cur: Vec<PropId>,
    nxt: Vec<PropId>,
}

pub struct PetriNetKs {
    mgr: Rc<DdManager>,
    spec: PetriSpec,
    enc: Vec<PlaceEnc>,
    flat_cur: Vec<PropId>,
    flat_nxt: Vec<PropId>,
    ap_ids: Vec<PropId>,
    ap_sets: Vec<BoolExpr>,
    rels: Vec<BoolExpr>,
    /// Per transition: (place index, enabled-but-would-overflow set).
    overflows: Vec<Vec<(usize, BoolExpr)>>,
    cur_to_nxt: Vec<(PropId, PropId)>,
    nxt_to_cur: Vec<(PropId, PropId)>,
    initial: Aggregate,
}

impl PetriNetKs {
    pub fn from_spec(mgr: &Rc<DdManager>, spec: &PetriSpec) -> Result<PetriNetKs> {
        let mut index: HashMap<&str, usize> = HashMap::new();
        for (i, p) in spec.places.iter().enumerate() {
            if index.insert(&p.name, i).is_some() {
                return Err(Error::model(format!("place {} declared twice", p.name)));
            }
            if p.bound > MAX_BOUND {
                return Err(Error::model(format!(
                    "place {} bound {} exceeds the supported maximum {MAX_BOUND}",
                    p.name, p.bound
                )));
            }
            if p.init > p.bound {
                return Err(Error::model(format!(
                    "place {} starts at {} which exceeds its bound {}",
                    p.name, p.init, p.bound
                )));
            }
        }
        if spec.places.is_empty() {
            return Err(Error::model("a net needs at least one place"));
        }

        let stamp = mgr.prop_count();
        let mut enc = Vec::with_capacity(spec.places.len());
        let mut flat_cur = Vec::new();
        let mut flat_nxt = Vec::new();
        for (i, p) in spec.places.iter().enumerate() {
            let bits = bits_for_bound(p.bound);
            let mut cur = Vec::with_capacity(bits);
            let mut nxt = Vec::with_capacity(bits);
            for k in 0..bits {
                cur.push(mgr.declare_prop(&format!("@{stamp}P{i}b{k}"))?);
                nxt.push(mgr.declare_prop(&format!("@{stamp}P{i}b{k}'"))?);
            }
            flat_cur.extend_from_slice(&cur);
            flat_nxt.extend_from_slice(&nxt);
            enc.push(PlaceEnc {
                bound: p.bound,
                init: p.init,
                cur,
                nxt,
            });
        }
        let cur_to_nxt: Vec<(PropId, PropId)> = flat_cur
            .iter()
            .copied()
            .zip(flat_nxt.iter().copied())
            .collect();
        let nxt_to_cur: Vec<(PropId, PropId)> = flat_nxt
            .iter()
            .copied()
            .zip(flat_cur.iter().copied())
            .collect();

        let value_cube = |vars: &[PropId], value: u64| -> Result<BoolExpr> {
            let mut rho = Assignment::empty();
            let w = vars.len();
            for (k, &v) in vars.iter().enumerate() {
                rho.set(v, value >> (w - 1 - k) as u64 & 1 == 1);
            }
            mgr.assignment_as_expr(&rho, vars)
        };

        let mut rels = Vec::with_capacity(spec.transitions.len());
        let mut overflows = Vec::with_capacity(spec.transitions.len());
        for t in &spec.transitions {
            let mut touched: HashMap<usize, (u64, u64)> = HashMap::new();
            for (list, side) in [(&t.input, 0usize), (&t.output, 1usize)] {
                for (pname, w) in list {
                    let &pi = index.get(pname.as_str()).ok_or_else(|| {
                        Error::model(format!(
                            "transition {} references unknown place {pname}",
                            t.name
                        ))
                    })?;
                    let e = touched.entry(pi).or_insert((0, 0));
                    if side == 0 {
                        e.0 += w;
                    } else {
                        e.1 += w;
                    }
                }
            }
            let mut order: Vec<usize> = touched.keys().copied().collect();
            order.sort_unstable();

            let mut rel = mgr.mk_true();
            let mut enabled = mgr.mk_true();
            let mut ovf_parts: Vec<(usize, BoolExpr)> = Vec::new();
            for &pi in &order {
                let (w_in, w_out) = touched[&pi];
                let p = &enc[pi];
                let mut rel_p = mgr.mk_false();
                let mut ena_p = mgr.mk_false();
                let mut ovf_p = mgr.mk_false();
                for v in w_in..=p.bound {
                    let src = value_cube(&p.cur, v)?;
                    ena_p = ena_p.union(&src)?;
                    let target = v - w_in + w_out;
                    if target > p.bound {
                        ovf_p = ovf_p.union(&src)?;
                    } else {
                        rel_p = rel_p.union(&src.intersect(&value_cube(&p.nxt, target)?)?)?;
                    }
                }
                rel = rel.intersect(&rel_p)?;
                enabled = enabled.intersect(&ena_p)?;
                if !ovf_p.is_empty() {
                    ovf_parts.push((pi, ovf_p));
                }
            }
            for (pi, p) in enc.iter().enumerate() {
                if !touched.contains_key(&pi) {
                    for (&c, &n) in p.cur.iter().zip(&p.nxt) {
                        let eq = mgr.mk_var(c)?.iff(&mgr.mk_var(n)?)?;
                        rel = rel.intersect(&eq)?;
                    }
                }
            }
            let ovf_parts = ovf_parts
                .into_iter()
                .map(|(pi, s)| Ok((pi, s.intersect(&enabled)?)))
                .collect::<Result<Vec<_>>>()?;
            rels.push(rel);
            overflows.push(ovf_parts);
        }

        let mut ap_ids = Vec::with_capacity(spec.props.len());
        let mut ap_sets = Vec::with_capacity(spec.props.len());
        for (name, pred) in &spec.props {
            let ast = parse_pred(pred)
                .map_err(|e| Error::format(format!("predicate for {name}: {e}")))?;
            let set = compile_pred(&ast, &index, &enc, &value_cube)?;
            ap_ids.push(mgr.find_or_declare(name)?);
            ap_sets.push(set);
        }

        let mut init = mgr.mk_true();
        for p in &enc {
            init = init.intersect(&value_cube(&p.cur, p.init)?)?;
        }

        Ok(PetriNetKs {
            mgr: Rc::clone(mgr),
            spec: spec.clone(),
            enc,
            flat_cur,
            flat_nxt,
            ap_ids,
            ap_sets,
            rels,
            overflows,
            cur_to_nxt,
            nxt_to_cur,
            initial: Aggregate::from_expr(init),
        })
    }

    pub fn parse(mgr: &Rc<DdManager>, text: &str) -> Result<PetriNetKs> {
        PetriNetKs::from_spec(mgr, &PetriSpec::parse(text)?)
    }

    pub fn spec(&self) -> &PetriSpec {
        &self.spec
    }

    /// The marking of `place` in a concrete state.
    pub fn marking_of(&self, state: &Assignment, place: usize) -> u64 {
        let p = &self.enc[place];
        let mut v = 0u64;
        for &b in &p.cur {
            v = v << 1 | u64::from(state.get(b) == Some(true));
        }
        v
    }
}

impl KripkeModel for PetriNetKs {
    fn manager(&self) -> &Rc<DdManager> {
        &self.mgr
    }

    fn aps(&self) -> &[PropId] {
        &self.ap_ids
    }

    fn state_vars(&self) -> &[PropId] {
        &self.flat_cur
    }

    fn next_vars(&self) -> &[PropId] {
        &self.flat_nxt
    }

    fn initial(&self) -> Aggregate {
        self.initial.clone()
    }

    fn sat_prop(&self, p: PropId) -> Result<BoolExpr> {
        match self.ap_ids.iter().position(|&q| q == p) {
            Some(i) => Ok(self.ap_sets[i].clone()),
            None => Err(Error::usage(format!(
                "{} is not an atomic proposition of this model",
                self.mgr.prop_name(p)
            ))),
        }
    }

    fn relation_count(&self) -> usize {
        self.rels.len()
    }

    fn image_rel(&self, rel: usize, set: &BoolExpr) -> Result<BoolExpr> {
        for (pi, ovf) in &self.overflows[rel] {
            if !set.intersect(ovf)?.is_empty() {
                return Err(Error::model(format!(
                    "transition {} exceeds the bound of place {}",
                    self.spec.transitions[rel].name, self.spec.places[*pi].name
                )));
            }
        }
        self.rels[rel]
            .and_exists(set, &self.flat_cur)?
            .rename(&self.nxt_to_cur)
    }

    fn preimage_rel(&self, rel: usize, set: &BoolExpr) -> Result<BoolExpr> {
        let shifted = set.rename(&self.cur_to_nxt)?;
        self.rels[rel].and_exists(&shifted, &self.flat_nxt)
    }

    fn describe_state(&self, state: &Assignment) -> String {
        let mut parts = Vec::new();
        for (pi, p) in self.spec.places.iter().enumerate() {
            let v = self.marking_of(state, pi);
            if v > 0 {
                parts.push(format!("{}={v}", p.name));
            }
        }
        if parts.is_empty() {
            "(empty marking)".to_string()
        } else {
            parts.join(" ")
        }
    }
}

fn bits_for_bound(bound: u64) -> usize {
    let mut bits = 1;
    while (1u64 << bits) <= bound {
        bits += 1;
    }
    bits
}

#[derive(Debug)]
enum Pred {
    Cmp(String, CmpOp, u64),
    Not(Box<Pred>),
    And(Box<Pred>, Box<Pred>),
    Or(Box<Pred>, Box<Pred>),
}

#[derive(Debug, Clone, Copy)]
enum CmpOp {
    Eq,
    Ge,
    Le,
}

fn compile_pred(
    pred: &Pred,
    index: &HashMap<&str, usize>,
    enc: &[PlaceEnc],
    value_cube: &dyn Fn(&[PropId], u64) -> Result<BoolExpr>,
) -> Result<BoolExpr> {
    match pred {
        Pred::Cmp(place, op, k) => {
            let &pi = index.get(place.as_str()).ok_or_else(|| {
                Error::format(format!("predicate references unknown place {place}"))
            })?;
            let p = &enc[pi];
            let mut acc: Option<BoolExpr> = None;
            for v in 0..=p.bound {
                let keep = match op {
                    CmpOp::Eq => v == *k,
                    CmpOp::Ge => v >= *k,
                    CmpOp::Le => v <= *k,
                };
                if keep {
                    let cube = value_cube(&p.cur, v)?;
                    acc = Some(match acc {
                        None => cube,
                        Some(a) => a.union(&cube)?,
                    });
                }
            }
            match acc {
                Some(a) => Ok(a),
                None => {
                    // Nothing in range: the comparison is unsatisfiable.
                    // Reuse an empty set over this place's bits.
                    let cube = value_cube(&p.cur, 0)?;
                    cube.difference(&cube)
                }
            }
        }
        Pred::Not(x) => compile_pred(x, index, enc, value_cube)?.not(),
        Pred::And(x, y) => compile_pred(x, index, enc, value_cube)?
            .intersect(&compile_pred(y, index, enc, value_cube)?),
        Pred::Or(x, y) => compile_pred(x, index, enc, value_cube)?
            .union(&compile_pred(y, index, enc, value_cube)?),
    }
}

fn parse_pred(src: &str) -> std::result::Result<Pred, String> {
    let toks = lex_pred(src)?;
    let mut pos = 0;
    let pred = parse_or(&toks, &mut pos)?;
    if pos != toks.len() {
        return Err(format!("unexpected trailing token {:?}", toks[pos]));
    }
    Ok(pred)
}

#[derive(Debug, PartialEq, Clone)]
enum PTok {
    Ident(String),
    Num(u64),
    Op(CmpOpTok),
    AndAnd,
    OrOr,
    Bang,
    LPar,
    RPar,
}

#[derive(Debug, PartialEq, Clone, Copy)]
enum CmpOpTok {
    Eq,
    Ge,
    Le,
}

fn lex_pred(src: &str) -> std::result::Result<Vec<PTok>, String> {
    let bytes = src.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' => i += 1,
            '(' => {
                toks.push(PTok::LPar);
                i += 1;
            }
            ')' => {
                toks.push(PTok::RPar);
                i += 1;
            }
            '!' => {
                toks.push(PTok::Bang);
                i += 1;
            }
            '=' => {
                toks.push(PTok::Op(CmpOpTok::Eq));
                i += 1;
            }
            '>' | '<' => {
                if i + 1 >= bytes.len() || bytes[i + 1] != b'=' {
                    return Err(format!("expected {c}= (only =, >=, <= are supported)"));
                }
                toks.push(PTok::Op(if c == '>' { CmpOpTok::Ge } else { CmpOpTok::Le }));
                i += 2;
            }
            '&' | '|' => {
                if i + 1 >= bytes.len() || bytes[i + 1] != bytes[i] {
                    return Err(format!("expected {c}{c}"));
                }
                toks.push(if c == '&' { PTok::AndAnd } else { PTok::OrOr });
                i += 2;
            }
            '0'..='9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let n: u64 = src[start..i]
                    .parse()
                    .map_err(|_| format!("bad number {}", &src[start..i]))?;
                toks.push(PTok::Num(n));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                toks.push(PTok::Ident(src[start..i].to_string()));
            }
            other => return Err(format!("unexpected character {other}")),
        }
    }
    Ok(toks)
}

fn parse_or(toks: &[PTok], pos: &mut usize) -> std::result::Result<Pred, String> {
    let mut left = parse_and(toks, pos)?;
    while toks.get(*pos) == Some(&PTok::OrOr) {
        *pos += 1;
        let right = parse_and(toks, pos)?;
        left = Pred::Or(Box::new(left), Box::new(right));
    }
    Ok(left)
}

fn parse_and(toks: &[PTok], pos: &mut usize) -> std::result::Result<Pred, String> {
    let mut left = parse_atom(toks, pos)?;
    while toks.get(*pos) == Some(&PTok::AndAnd) {
        *pos += 1;
        let right = parse_atom(toks, pos)?;
        left = Pred::And(Box::new(left), Box::new(right));
    }
    Ok(left)
}

fn parse_atom(toks: &[PTok], pos: &mut usize) -> std::result::Result<Pred, String> {
    match toks.get(*pos) {
        Some(PTok::Bang) => {
            *pos += 1;
            Ok(Pred::Not(Box::new(parse_atom(toks, pos)?)))
        }
        Some(PTok::LPar) => {
            *pos += 1;
            let inner = parse_or(toks, pos)?;
            if toks.get(*pos) != Some(&PTok::RPar) {
                return Err("missing )".to_string());
            }
            *pos += 1;
            Ok(inner)
        }
        Some(PTok::Ident(name)) => {
            let name = name.clone();
            *pos += 1;
            let op = match toks.get(*pos) {
                Some(PTok::Op(op)) => *op,
                _ => return Err(format!("expected a comparison after {name}")),
            };
            *pos += 1;
            let k = match toks.get(*pos) {
                Some(PTok::Num(k)) => *k,
                _ => return Err("expected a number after the comparison".to_string()),
            };
            *pos += 1;
            let op = match op {
                CmpOpTok::Eq => CmpOp::Eq,
                CmpOpTok::Ge => CmpOp::Ge,
                CmpOpTok::Le => CmpOp::Le,
            };
            Ok(Pred::Cmp(name, op, k))
        }
        other => Err(format!("unexpected token {other:?}")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{self};
    use crate::Deadline;
    use num_bigint::BigUint;

    fn two_slot_net() -> PetriSpec {
        let mut s = PetriSpec::default();
        s.place("free", 2, 2);
        s.place("busy", 2, 0);
        s.trans("acquire", &[("free", 1)], &[("busy", 1)]);
        s.trans("release", &[("busy", 1)], &[("free", 1)]);
        s.prop("idle", "free = 2");
        s.prop("some_busy", "busy >= 1");
        s
    }

    #[test]
    fn small_net_reachability_and_props() {
        let mgr = DdManager::new();
        let net = PetriNetKs::from_spec(&mgr, &two_slot_net()).unwrap();
        let dl = Deadline::none();
        let reach = model::reachable_states(&net, &dl).unwrap();
        // Tokens are conserved: (free, busy) ∈ {(2,0), (1,1), (0,2)}.
        assert_eq!(model::count_states(&net, &reach).unwrap(), BigUint::from(3u32));
        let idle = mgr.prop_by_name("idle").unwrap();
        let si = net.sat_prop(idle).unwrap();
        assert_eq!(
            reach.expr().intersect(&si).unwrap().count(net.state_vars()).unwrap(),
            BigUint::from(1u32)
        );
        // From the initial marking, `acquire` leads to free=1 busy=1.
        let img = model::image(&net, net.initial().expr()).unwrap();
        let rho = img.first_minterm(net.state_vars()).unwrap().unwrap();
        assert_eq!(net.marking_of(&rho, 0), 1);
        assert_eq!(net.marking_of(&rho, 1), 1);
        assert_eq!(net.describe_state(&rho), "free=1 busy=1");
    }

    #[test]
    fn bound_violation_is_detected() {
        let mut s = PetriSpec::default();
        s.place("p", 1, 1);
        s.place("q", 1, 1);
        s.trans("t", &[("p", 1)], &[("q", 1)]);
        let mgr = DdManager::new();
        let net = PetriNetKs::from_spec(&mgr, &s).unwrap();
        let err = model::reachable_states(&net, &Deadline::none()).unwrap_err();
        let msg = format!("{err}");
        assert!(msg.contains("exceeds the bound of place q"), "{msg}");
    }

    #[test]
    fn weighted_arcs_and_self_loops() {
        let mut s = PetriSpec::default();
        s.place("p", 4, 4);
        s.place("q", 4, 0);
        // Consumes two from p, produces one in q; requires q nonempty via a
        // read loop once seeded.
        s.trans("seed", &[("p", 2)], &[("q", 1)]);
        s.trans("step", &[("p", 2), ("q", 1)], &[("q", 2)]);
        let mgr = DdManager::new();
        let net = PetriNetKs::from_spec(&mgr, &s).unwrap();
        let reach = model::reachable_states(&net, &Deadline::none()).unwrap();
        // p=4 q=0 → (seed) p=2 q=1 → {seed: p=0 q=2, step: p=0 q=2} — both
        // collapse; markings: (4,0), (2,1), (0,2).
        assert_eq!(model::count_states(&net, &reach).unwrap(), BigUint::from(3u32));
    }

    #[test]
    fn predicate_parser_accepts_combinations_and_rejects_garbage() {
        let mut s = two_slot_net();
        s.prop("combo", "(free >= 1 && !(busy = 2)) || busy <= 0");
        let mgr = DdManager::new();
        assert!(PetriNetKs::from_spec(&mgr, &s).is_ok());

        let mut bad = two_slot_net();
        bad.prop("nope", "free > 1");
        assert!(PetriNetKs::from_spec(&DdManager::new(), &bad).is_err());
        let mut bad = two_slot_net();
        bad.prop("nope", "free = busy");
        assert!(PetriNetKs::from_spec(&DdManager::new(), &bad).is_err());
        let mut bad = two_slot_net();
        bad.prop("nope", "nosuch = 1");
        assert!(PetriNetKs::from_spec(&DdManager::new(), &bad).is_err());
    }

    #[test]
    fn text_format_round_trips() {
        let spec = two_slot_net();
        let text = spec.render();
        let back = PetriSpec::parse(&text).unwrap();
        assert_eq!(back.render(), text);
        let mgr = DdManager::new();
        let net = PetriNetKs::parse(&mgr, &text).unwrap();
        assert_eq!(net.relation_count(), 2);
        assert!(PetriSpec::parse("place p bound 1\n").is_err());
        assert!(PetriSpec::parse("trans t in p:1\n").is_err());
        assert!(PetriSpec::parse("widget w\n").is_err());
        // Unknown place in a transition fails at build time.
        let s = PetriSpec::parse("place p bound 1 init 0\ntrans t in q:1 out\n").unwrap();
        assert!(PetriNetKs::from_spec(&DdManager::new(), &s).is_err());
    }
}
