//! LTL abstract syntax, parsing, printing, and normal forms.
//!
//! Propositions are plain names at this level; they are bound to
//! decision-diagram variables only during translation, so parsing a formula
//! over previously unseen propositions simply extends the universe.

mod translate;

pub use translate::translate;

use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum LtlAst {
    True,
    False,
    Prop(String),
    Not(Box<LtlAst>),
    And(Box<LtlAst>, Box<LtlAst>),
    Or(Box<LtlAst>, Box<LtlAst>),
    Implies(Box<LtlAst>, Box<LtlAst>),
    Next(Box<LtlAst>),
    Eventually(Box<LtlAst>),
    Always(Box<LtlAst>),
    Until(Box<LtlAst>, Box<LtlAst>),
    Release(Box<LtlAst>, Box<LtlAst>),
}

impl LtlAst {
    pub fn not(self) -> LtlAst {
        LtlAst::Not(Box::new(self))
    }
    pub fn and(self, rhs: LtlAst) -> LtlAst {
        LtlAst::And(Box::new(self), Box::new(rhs))
    }
    pub fn or(self, rhs: LtlAst) -> LtlAst {
        LtlAst::Or(Box::new(self), Box::new(rhs))
    }
    pub fn implies(self, rhs: LtlAst) -> LtlAst {
        LtlAst::Implies(Box::new(self), Box::new(rhs))
    }
    pub fn next(self) -> LtlAst {
        LtlAst::Next(Box::new(self))
    }
    pub fn eventually(self) -> LtlAst {
        LtlAst::Eventually(Box::new(self))
    }
    pub fn always(self) -> LtlAst {
        LtlAst::Always(Box::new(self))
    }
    pub fn until(self, rhs: LtlAst) -> LtlAst {
        LtlAst::Until(Box::new(self), Box::new(rhs))
    }
    pub fn release(self, rhs: LtlAst) -> LtlAst {
        LtlAst::Release(Box::new(self), Box::new(rhs))
    }
    pub fn prop(name: &str) -> LtlAst {
        LtlAst::Prop(name.to_string())
    }

    /// Proposition names used in the formula, sorted and deduplicated.
    pub fn props(&self) -> Vec<String> {
        let mut out = Vec::new();
        fn walk(f: &LtlAst, out: &mut Vec<String>) {
            match f {
                LtlAst::True | LtlAst::False => {}
                LtlAst::Prop(p) => out.push(p.clone()),
                LtlAst::Not(a)
                | LtlAst::Next(a)
                | LtlAst::Eventually(a)
                | LtlAst::Always(a) => walk(a, out),
                LtlAst::And(a, b)
                | LtlAst::Or(a, b)
                | LtlAst::Implies(a, b)
                | LtlAst::Until(a, b)
                | LtlAst::Release(a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
            }
        }
        walk(self, &mut out);
        out.sort();
        out.dedup();
        out
    }

    /// Syntactic operator count (size of the expression tree).
    pub fn size(&self) -> usize {
        match self {
            LtlAst::True | LtlAst::False | LtlAst::Prop(_) => 1,
            LtlAst::Not(a) | LtlAst::Next(a) | LtlAst::Eventually(a) | LtlAst::Always(a) => {
                1 + a.size()
            }
            LtlAst::And(a, b)
            | LtlAst::Or(a, b)
            | LtlAst::Implies(a, b)
            | LtlAst::Until(a, b)
            | LtlAst::Release(a, b) => 1 + a.size() + b.size(),
        }
    }
}

/// True iff the formula contains no Next operator. Next-free formulas cannot
/// distinguish stutter-equivalent behaviors, which is what the
/// observation-based methods require.
pub fn is_syntactically_stutter_invariant(f: &LtlAst) -> bool {
    match f {
        LtlAst::True | LtlAst::False | LtlAst::Prop(_) => true,
        LtlAst::Next(_) => false,
        LtlAst::Not(a) | LtlAst::Eventually(a) | LtlAst::Always(a) => {
            is_syntactically_stutter_invariant(a)
        }
        LtlAst::And(a, b)
        | LtlAst::Or(a, b)
        | LtlAst::Implies(a, b)
        | LtlAst::Until(a, b)
        | LtlAst::Release(a, b) => {
            is_syntactically_stutter_invariant(a) && is_syntactically_stutter_invariant(b)
        }
    }
}

/// Negation normal form: negations pushed to propositions, implications
/// expanded. Eventually/Always survive (they are kept as sugar for the
/// translation to desugar).
pub fn nnf(f: &LtlAst) -> LtlAst {
    match f {
        LtlAst::True | LtlAst::False | LtlAst::Prop(_) => f.clone(),
        LtlAst::And(a, b) => nnf(a).and(nnf(b)),
        LtlAst::Or(a, b) => nnf(a).or(nnf(b)),
        LtlAst::Implies(a, b) => nnf(&a.clone().not()).or(nnf(b)),
        LtlAst::Next(a) => nnf(a).next(),
        LtlAst::Eventually(a) => nnf(a).eventually(),
        LtlAst::Always(a) => nnf(a).always(),
        LtlAst::Until(a, b) => nnf(a).until(nnf(b)),
        LtlAst::Release(a, b) => nnf(a).release(nnf(b)),
        LtlAst::Not(g) => match &**g {
            LtlAst::True => LtlAst::False,
            LtlAst::False => LtlAst::True,
            LtlAst::Prop(_) => f.clone(),
            LtlAst::Not(a) => nnf(a),
            LtlAst::And(a, b) => nnf(&a.clone().not()).or(nnf(&b.clone().not())),
            LtlAst::Or(a, b) => nnf(&a.clone().not()).and(nnf(&b.clone().not())),
            LtlAst::Implies(a, b) => nnf(a).and(nnf(&b.clone().not())),
            LtlAst::Next(a) => nnf(&a.clone().not()).next(),
            LtlAst::Eventually(a) => nnf(&a.clone().not()).always(),
            LtlAst::Always(a) => nnf(&a.clone().not()).eventually(),
            LtlAst::Until(a, b) => nnf(&a.clone().not()).release(nnf(&b.clone().not())),
            LtlAst::Release(a, b) => nnf(&a.clone().not()).until(nnf(&b.clone().not())),
        },
    }
}

fn mk_not(g: LtlAst) -> LtlAst {
    match g {
        LtlAst::True => LtlAst::False,
        LtlAst::False => LtlAst::True,
        LtlAst::Not(h) => *h,
        g => LtlAst::Not(Box::new(g)),
    }
}

fn mk_next(g: LtlAst) -> LtlAst {
    match g {
        LtlAst::True => LtlAst::True,
        LtlAst::False => LtlAst::False,
        g => LtlAst::Next(Box::new(g)),
    }
}

fn mk_f(g: LtlAst) -> LtlAst {
    match g {
        LtlAst::True => LtlAst::True,
        LtlAst::False => LtlAst::False,
        // F F g and F (f U g) both ask only that g happens.
        LtlAst::Eventually(h) => mk_f(*h),
        LtlAst::Until(_, h) => mk_f(*h),
        LtlAst::Always(h) => match *h {
            // F G F g asks no more than G F g.
            LtlAst::Eventually(k) => LtlAst::Always(Box::new(mk_f(*k))),
            other => LtlAst::Eventually(Box::new(LtlAst::Always(Box::new(other)))),
        },
        g => LtlAst::Eventually(Box::new(g)),
    }
}

fn mk_g(g: LtlAst) -> LtlAst {
    match g {
        LtlAst::True => LtlAst::True,
        LtlAst::False => LtlAst::False,
        // G G g and G (f R g) both pin g forever.
        LtlAst::Always(h) => mk_g(*h),
        LtlAst::Release(_, h) => mk_g(*h),
        LtlAst::Eventually(h) => match *h {
            // G F G g asks no more than F G g.
            LtlAst::Always(k) => LtlAst::Eventually(Box::new(mk_g(*k))),
            other => LtlAst::Always(Box::new(LtlAst::Eventually(Box::new(other)))),
        },
        g => LtlAst::Always(Box::new(g)),
    }
}

fn mk_and(a: LtlAst, b: LtlAst) -> LtlAst {
    match (a, b) {
        (LtlAst::False, _) | (_, LtlAst::False) => LtlAst::False,
        (LtlAst::True, x) | (x, LtlAst::True) => x,
        (a, b) if a == b => a,
        (a, b) => LtlAst::And(Box::new(a), Box::new(b)),
    }
}

fn mk_or(a: LtlAst, b: LtlAst) -> LtlAst {
    match (a, b) {
        (LtlAst::True, _) | (_, LtlAst::True) => LtlAst::True,
        (LtlAst::False, x) | (x, LtlAst::False) => x,
        (a, b) if a == b => a,
        (a, b) => LtlAst::Or(Box::new(a), Box::new(b)),
    }
}

fn mk_implies(a: LtlAst, b: LtlAst) -> LtlAst {
    match (a, b) {
        (LtlAst::False, _) => LtlAst::True,
        (_, LtlAst::True) => LtlAst::True,
        (LtlAst::True, b) => b,
        (a, LtlAst::False) => mk_not(a),
        (a, b) if a == b => LtlAst::True,
        (a, b) => LtlAst::Implies(Box::new(a), Box::new(b)),
    }
}

fn mk_until(a: LtlAst, b: LtlAst) -> LtlAst {
    match (a, b) {
        (_, LtlAst::True) => LtlAst::True,
        (_, LtlAst::False) => LtlAst::False,
        (LtlAst::False, b) => b,
        (LtlAst::True, b) => mk_f(b),
        (a, b) if a == b => a,
        // The left operand is irrelevant once the right one is reachable
        // whenever it likes: f U F g just asks that g happens.
        (_, LtlAst::Eventually(h)) => mk_f(*h),
        (a, b) => LtlAst::Until(Box::new(a), Box::new(b)),
    }
}

fn mk_release(a: LtlAst, b: LtlAst) -> LtlAst {
    match (a, b) {
        (_, LtlAst::False) => LtlAst::False,
        (_, LtlAst::True) => LtlAst::True,
        (LtlAst::True, b) => b,
        (LtlAst::False, b) => mk_g(b),
        (a, b) if a == b => a,
        // Releasing an invariant changes nothing: f R G g pins g forever.
        (_, LtlAst::Always(h)) => mk_g(*h),
        (a, b) => LtlAst::Release(Box::new(a), Box::new(b)),
    }
}

/// Language-preserving syntactic simplification: constant folding,
/// idempotence, and the standard collapses of stacked temporal operators
/// (`F F`, `G G`, `f U F g`, `true U g`, `false R g`, ...). Applied before
/// translation, it keeps degenerate inputs from inflating the tableau.
pub fn simplify(f: &LtlAst) -> LtlAst {
    match f {
        LtlAst::True | LtlAst::False | LtlAst::Prop(_) => f.clone(),
        LtlAst::Not(g) => mk_not(simplify(g)),
        LtlAst::Next(g) => mk_next(simplify(g)),
        LtlAst::Eventually(g) => mk_f(simplify(g)),
        LtlAst::Always(g) => mk_g(simplify(g)),
        LtlAst::And(a, b) => mk_and(simplify(a), simplify(b)),
        LtlAst::Or(a, b) => mk_or(simplify(a), simplify(b)),
        LtlAst::Implies(a, b) => mk_implies(simplify(a), simplify(b)),
        LtlAst::Until(a, b) => mk_until(simplify(a), simplify(b)),
        LtlAst::Release(a, b) => mk_release(simplify(a), simplify(b)),
    }
}

// Precedence levels for printing and parsing: higher binds tighter.
const PREC_IMPLIES: u8 = 0;
const PREC_OR: u8 = 1;
const PREC_AND: u8 = 2;
const PREC_UNTIL: u8 = 3;
const PREC_UNARY: u8 = 4;

impl fmt::Display for LtlAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn go(node: &LtlAst, min: u8, out: &mut fmt::Formatter<'_>) -> fmt::Result {
            let prec = match node {
                LtlAst::True | LtlAst::False | LtlAst::Prop(_) => u8::MAX,
                LtlAst::Not(_)
                | LtlAst::Next(_)
                | LtlAst::Eventually(_)
                | LtlAst::Always(_) => PREC_UNARY,
                LtlAst::Until(..) | LtlAst::Release(..) => PREC_UNTIL,
                LtlAst::And(..) => PREC_AND,
                LtlAst::Or(..) => PREC_OR,
                LtlAst::Implies(..) => PREC_IMPLIES,
            };
            let parens = prec < min;
            if parens {
                write!(out, "(")?;
            }
            match node {
                LtlAst::True => write!(out, "true")?,
                LtlAst::False => write!(out, "false")?,
                LtlAst::Prop(p) => write!(out, "{p}")?,
                LtlAst::Not(a) => {
                    write!(out, "!")?;
                    go(a, PREC_UNARY, out)?;
                }
                LtlAst::Next(a) => {
                    write!(out, "X ")?;
                    go(a, PREC_UNARY, out)?;
                }
                LtlAst::Eventually(a) => {
                    write!(out, "F ")?;
                    go(a, PREC_UNARY, out)?;
                }
                LtlAst::Always(a) => {
                    write!(out, "G ")?;
                    go(a, PREC_UNARY, out)?;
                }
                LtlAst::Until(a, b) => {
                    // Right-associative: left operand needs parens when it is
                    // itself an Until/Release.
                    go(a, PREC_UNTIL + 1, out)?;
                    write!(out, " U ")?;
                    go(b, PREC_UNTIL, out)?;
                }
                LtlAst::Release(a, b) => {
                    go(a, PREC_UNTIL + 1, out)?;
                    write!(out, " R ")?;
                    go(b, PREC_UNTIL, out)?;
                }
                LtlAst::And(a, b) => {
                    // Left-associative: a right-nested operand needs parens
                    // to survive a structural round trip.
                    go(a, PREC_AND, out)?;
                    write!(out, " && ")?;
                    go(b, PREC_AND + 1, out)?;
                }
                LtlAst::Or(a, b) => {
                    go(a, PREC_OR, out)?;
                    write!(out, " || ")?;
                    go(b, PREC_OR + 1, out)?;
                }
                LtlAst::Implies(a, b) => {
                    go(a, PREC_IMPLIES + 1, out)?;
                    write!(out, " -> ")?;
                    go(b, PREC_IMPLIES, out)?;
                }
            }
            if parens {
                write!(out, ")")?;
            }
            Ok(())
        }
        go(self, 0, f)
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    True,
    False,
    Not,
    And,
    Or,
    Implies,
    Until,
    Release,
    Next,
    Eventually,
    Always,
    LParen,
    RParen,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn tokens(src: &'a str) -> Result<Vec<(Tok, usize)>> {
        let mut lx = Lexer {
            src: src.as_bytes(),
            pos: 0,
        };
        let mut out = Vec::new();
        loop {
            lx.skip_ws();
            if lx.pos >= lx.src.len() {
                return Ok(out);
            }
            let at = lx.pos;
            let c = lx.src[lx.pos];
            let tok = match c {
                b'(' => {
                    lx.pos += 1;
                    Tok::LParen
                }
                b')' => {
                    lx.pos += 1;
                    Tok::RParen
                }
                b'!' => {
                    lx.pos += 1;
                    Tok::Not
                }
                b'&' => {
                    lx.pos += 1;
                    if lx.peek() == Some(b'&') {
                        lx.pos += 1;
                    }
                    Tok::And
                }
                b'|' => {
                    lx.pos += 1;
                    if lx.peek() == Some(b'|') {
                        lx.pos += 1;
                    }
                    Tok::Or
                }
                b'-' => {
                    lx.pos += 1;
                    if lx.peek() == Some(b'>') {
                        lx.pos += 1;
                        Tok::Implies
                    } else {
                        return Err(Error::Syntax {
                            offset: at,
                            msg: "expected '->'".to_string(),
                        });
                    }
                }
                c if c.is_ascii_alphabetic() || c == b'_' => {
                    let start = lx.pos;
                    while lx.pos < lx.src.len() {
                        let c = lx.src[lx.pos];
                        if c.is_ascii_alphanumeric() || c == b'_' || c == b'.' {
                            lx.pos += 1;
                        } else {
                            break;
                        }
                    }
                    let word = std::str::from_utf8(&lx.src[start..lx.pos]).unwrap();
                    match word {
                        "true" => Tok::True,
                        "false" => Tok::False,
                        "U" => Tok::Until,
                        "R" => Tok::Release,
                        "X" => Tok::Next,
                        "F" => Tok::Eventually,
                        "G" => Tok::Always,
                        _ => Tok::Ident(word.to_string()),
                    }
                }
                _ => {
                    return Err(Error::Syntax {
                        offset: at,
                        msg: format!("unexpected character {:?}", c as char),
                    })
                }
            };
            out.push((tok, at));
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|(_, o)| *o).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        self.pos += 1;
        t
    }

    fn err(&self, msg: &str) -> Error {
        Error::Syntax {
            offset: self.offset(),
            msg: msg.to_string(),
        }
    }

    fn implies(&mut self) -> Result<LtlAst> {
        let lhs = self.or()?;
        if self.peek() == Some(&Tok::Implies) {
            self.bump();
            let rhs = self.implies()?;
            Ok(lhs.implies(rhs))
        } else {
            Ok(lhs)
        }
    }

    fn or(&mut self) -> Result<LtlAst> {
        let mut lhs = self.and()?;
        while self.peek() == Some(&Tok::Or) {
            self.bump();
            lhs = lhs.or(self.and()?);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<LtlAst> {
        let mut lhs = self.until()?;
        while self.peek() == Some(&Tok::And) {
            self.bump();
            lhs = lhs.and(self.until()?);
        }
        Ok(lhs)
    }

    fn until(&mut self) -> Result<LtlAst> {
        let lhs = self.unary()?;
        match self.peek() {
            Some(Tok::Until) => {
                self.bump();
                let rhs = self.until()?;
                Ok(lhs.until(rhs))
            }
            Some(Tok::Release) => {
                self.bump();
                let rhs = self.until()?;
                Ok(lhs.release(rhs))
            }
            _ => Ok(lhs),
        }
    }

    fn unary(&mut self) -> Result<LtlAst> {
        match self.peek() {
            Some(Tok::Not) => {
                self.bump();
                Ok(self.unary()?.not())
            }
            Some(Tok::Next) => {
                self.bump();
                Ok(self.unary()?.next())
            }
            Some(Tok::Eventually) => {
                self.bump();
                Ok(self.unary()?.eventually())
            }
            Some(Tok::Always) => {
                self.bump();
                Ok(self.unary()?.always())
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<LtlAst> {
        match self.peek() {
            Some(Tok::True) => {
                self.bump();
                Ok(LtlAst::True)
            }
            Some(Tok::False) => {
                self.bump();
                Ok(LtlAst::False)
            }
            Some(Tok::Ident(_)) => match self.bump() {
                Tok::Ident(name) => Ok(LtlAst::Prop(name)),
                _ => unreachable!(),
            },
            Some(Tok::LParen) => {
                self.bump();
                let inner = self.implies()?;
                if self.peek() == Some(&Tok::RParen) {
                    self.bump();
                    Ok(inner)
                } else {
                    Err(self.err("expected ')'"))
                }
            }
            Some(_) => Err(self.err("expected a formula")),
            None => Err(self.err("unexpected end of input")),
        }
    }
}

/// Parses the textual LTL syntax.
///
/// Grammar, loosest to tightest: `->` (right-assoc), `||`/`|`, `&&`/`&`,
/// `U`/`R` (right-assoc), then `!`, `X`, `F`, `G`, atoms. Identifiers match
/// `[a-zA-Z_][a-zA-Z0-9_.]*`; `true false U R X F G` are reserved words.
/// Errors carry the byte offset of the offending token.
pub fn parse_ltl(src: &str) -> Result<LtlAst> {
    let toks = Lexer::tokens(src)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end: src.len(),
    };
    let f = p.implies()?;
    if p.pos != p.toks.len() {
        return Err(p.err("trailing input after formula"));
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn p(s: &str) -> LtlAst {
        parse_ltl(s).unwrap()
    }

    #[test]
    fn parses_precedence() {
        assert_eq!(p("a U b && c"), p("(a U b) && c"));
        assert_eq!(p("a && b || c"), p("(a && b) || c"));
        assert_eq!(p("a || b -> c"), p("(a || b) -> c"));
        assert_eq!(p("a -> b -> c"), p("a -> (b -> c)"));
        assert_eq!(p("a U b U c"), p("a U (b U c)"));
        assert_eq!(p("!a U b"), p("(!a) U b"));
        assert_eq!(p("X a U b"), p("(X a) U b"));
        assert_eq!(p("G F a"), LtlAst::prop("a").eventually().always());
        assert_eq!(p("a & b | c"), p("a && b || c"));
    }

    #[test]
    fn identifier_rules() {
        assert_eq!(p("foo_bar.x1"), LtlAst::prop("foo_bar.x1"));
        // "Xa" is one identifier, not Next(a).
        assert_eq!(p("Xa"), LtlAst::prop("Xa"));
        // Reserved words cannot be propositions.
        assert!(parse_ltl("U").is_err());
    }

    #[test]
    fn error_positions() {
        match parse_ltl("a U") {
            Err(Error::Syntax { offset, .. }) => assert_eq!(offset, 3),
            other => panic!("expected syntax error, got {other:?}"),
        }
        match parse_ltl("a @ b") {
            Err(Error::Syntax { offset, .. }) => assert_eq!(offset, 2),
            other => panic!("expected syntax error, got {other:?}"),
        }
        match parse_ltl("(a U b") {
            Err(Error::Syntax { offset, .. }) => assert_eq!(offset, 6),
            other => panic!("expected syntax error, got {other:?}"),
        }
        assert!(parse_ltl("a b").is_err());
        assert!(parse_ltl("").is_err());
    }

    fn random_formula(rng: &mut StdRng, depth: usize) -> LtlAst {
        let props = ["a", "b", "c", "d"];
        if depth == 0 || rng.random_bool(0.25) {
            return match rng.random_range(0..6) {
                0 => LtlAst::True,
                1 => LtlAst::False,
                _ => LtlAst::prop(props[rng.random_range(0..props.len())]),
            };
        }
        let a = random_formula(rng, depth - 1);
        match rng.random_range(0..9) {
            0 => a.not(),
            1 => a.next(),
            2 => a.eventually(),
            3 => a.always(),
            4 => a.and(random_formula(rng, depth - 1)),
            5 => a.or(random_formula(rng, depth - 1)),
            6 => a.implies(random_formula(rng, depth - 1)),
            7 => a.until(random_formula(rng, depth - 1)),
            _ => a.release(random_formula(rng, depth - 1)),
        }
    }

    /// print -> parse round-trips structurally for 500 random formulas.
    #[test]
    fn print_parse_round_trip() {
        let mut rng = StdRng::seed_from_u64(42);
        for _ in 0..500 {
            let f = random_formula(&mut rng, 5);
            let printed = f.to_string();
            let reparsed = parse_ltl(&printed)
                .unwrap_or_else(|e| panic!("reparse of {printed:?} failed: {e}"));
            assert_eq!(f, reparsed, "round trip changed {printed}");
            assert_eq!(printed, reparsed.to_string());
        }
    }

    #[test]
    fn nnf_pushes_negations() {
        // Negation only on propositions afterwards.
        fn check(f: &LtlAst) {
            match f {
                LtlAst::Not(inner) => assert!(matches!(**inner, LtlAst::Prop(_))),
                LtlAst::Implies(..) => panic!("implication survived nnf"),
                LtlAst::True | LtlAst::False | LtlAst::Prop(_) => {}
                LtlAst::And(a, b)
                | LtlAst::Or(a, b)
                | LtlAst::Until(a, b)
                | LtlAst::Release(a, b) => {
                    check(a);
                    check(b);
                }
                LtlAst::Next(a) | LtlAst::Eventually(a) | LtlAst::Always(a) => check(a),
            }
        }
        let mut rng = StdRng::seed_from_u64(43);
        for _ in 0..300 {
            let f = random_formula(&mut rng, 5);
            check(&nnf(&f));
        }
        assert_eq!(nnf(&p("!(a U b)")), p("!a R !b"));
        assert_eq!(nnf(&p("!G a")), p("F !a"));
        assert_eq!(nnf(&p("!(a -> b)")), p("a && !b"));
    }

    #[test]
    fn simplify_folds_degenerate_terms() {
        let cases = [
            ("c U true", "true"),
            ("c U false", "false"),
            ("!true U a", "a"),
            ("true U b", "F b"),
            ("X false", "false"),
            ("X true", "true"),
            ("!!a", "a"),
            ("a && a", "a"),
            ("a || a", "a"),
            ("a && false", "false"),
            ("a || true", "true"),
            ("a -> a", "true"),
            ("a -> false", "!a"),
            ("false -> a", "true"),
            ("F F (true U a)", "F a"),
            ("F (a U b)", "F b"),
            ("G (a R b)", "G b"),
            ("F G F a", "G F a"),
            ("G F G b", "F G b"),
            ("a U F b", "F b"),
            ("a R G b", "G b"),
            ("false R b", "G b"),
            ("true R b", "b"),
            ("a U a", "a"),
            ("G G a", "G a"),
            ("F F a", "F a"),
            ("X (a && a)", "X a"),
        ];
        for (input, expected) in cases {
            assert_eq!(simplify(&p(input)), p(expected), "simplify({input})");
        }
    }

    /// `simplify` preserves the language: checked against direct evaluation
    /// on random ultimately-periodic words.
    #[test]
    fn simplify_preserves_semantics_on_lasso_words() {
        fn holds(f: &LtlAst, letters: &[[bool; 4]], loop_start: usize) -> bool {
            let n = letters.len();
            let succ = |i: usize| if i + 1 < n { i + 1 } else { loop_start };
            fn vals(
                f: &LtlAst,
                letters: &[[bool; 4]],
                succ: &dyn Fn(usize) -> usize,
            ) -> Vec<bool> {
                let n = letters.len();
                match f {
                    LtlAst::True => vec![true; n],
                    LtlAst::False => vec![false; n],
                    LtlAst::Prop(name) => {
                        let k = match name.as_str() {
                            "a" => 0,
                            "b" => 1,
                            "c" => 2,
                            _ => 3,
                        };
                        letters.iter().map(|l| l[k]).collect()
                    }
                    LtlAst::Not(g) => {
                        vals(g, letters, succ).into_iter().map(|v| !v).collect()
                    }
                    LtlAst::Next(g) => {
                        let v = vals(g, letters, succ);
                        (0..n).map(|i| v[succ(i)]).collect()
                    }
                    LtlAst::And(x, y) => {
                        let (vx, vy) = (vals(x, letters, succ), vals(y, letters, succ));
                        (0..n).map(|i| vx[i] && vy[i]).collect()
                    }
                    LtlAst::Or(x, y) => {
                        let (vx, vy) = (vals(x, letters, succ), vals(y, letters, succ));
                        (0..n).map(|i| vx[i] || vy[i]).collect()
                    }
                    LtlAst::Implies(x, y) => {
                        let (vx, vy) = (vals(x, letters, succ), vals(y, letters, succ));
                        (0..n).map(|i| !vx[i] || vy[i]).collect()
                    }
                    LtlAst::Eventually(g) => {
                        vals(&LtlAst::True.until((**g).clone()), letters, succ)
                    }
                    LtlAst::Always(g) => {
                        vals(&LtlAst::False.release((**g).clone()), letters, succ)
                    }
                    LtlAst::Until(x, y) => {
                        let (vx, vy) = (vals(x, letters, succ), vals(y, letters, succ));
                        let mut v = vec![false; n];
                        loop {
                            let next: Vec<bool> =
                                (0..n).map(|i| vy[i] || (vx[i] && v[succ(i)])).collect();
                            if next == v {
                                return v;
                            }
                            v = next;
                        }
                    }
                    LtlAst::Release(x, y) => {
                        let (vx, vy) = (vals(x, letters, succ), vals(y, letters, succ));
                        let mut v = vec![true; n];
                        loop {
                            let next: Vec<bool> =
                                (0..n).map(|i| vy[i] && (vx[i] || v[succ(i)])).collect();
                            if next == v {
                                return v;
                            }
                            v = next;
                        }
                    }
                }
            }
            vals(f, letters, &succ)[0]
        }

        let mut rng = StdRng::seed_from_u64(44);
        for _ in 0..400 {
            let f = random_formula(&mut rng, 5);
            let s = simplify(&f);
            for _ in 0..6 {
                let len = rng.random_range(1..=6);
                let letters: Vec<[bool; 4]> = (0..len)
                    .map(|_| [rng.random(), rng.random(), rng.random(), rng.random()])
                    .collect();
                let loop_start = rng.random_range(0..len);
                assert_eq!(
                    holds(&f, &letters, loop_start),
                    holds(&s, &letters, loop_start),
                    "simplify changed {f} into {s} on {letters:?} loop {loop_start}"
                );
            }
        }
    }

    #[test]
    fn stutter_invariance_is_next_freedom() {
        assert!(is_syntactically_stutter_invariant(&p("G (a -> F b)")));
        assert!(!is_syntactically_stutter_invariant(&p("G (a -> X b)")));
        assert!(!is_syntactically_stutter_invariant(&p("!(X a)")));
    }

    #[test]
    fn collects_props() {
        assert_eq!(p("b U (a && b)").props(), vec!["a", "b"]);
        assert!(p("true").props().is_empty());
    }
}
