//! Line-oriented theory files.
//!
//! ```text
//! // comment
//! domain people 3
//! predicate Smokes(people) 0.2 0.5
//! predicate Friends(people, people)
//! !Smokes(x) | Cancer(x)
//! exists d: Born(p, d)
//! mln 3/2 Smokes(x) & Friends(x, y) => Smokes(y)
//! ```
//!
//! Variables start with a lowercase letter, constants with an uppercase one.
//! Weights are exact: `0.2`, `-1`, `3/2`.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::logic::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {col}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("unknown predicate {0}")]
    UnknownPredicate(String),
    #[error("unknown domain {0}")]
    UnknownDomain(String),
    #[error("predicate {name} takes {expected} arguments, got {found}")]
    ArityMismatch { name: String, expected: usize, found: usize },
    #[error("{term} is used with domains {first} and {second}")]
    InconsistentDomain { term: String, first: String, second: String },
    #[error("malformed weight {0}")]
    MalformedWeight(String),
    #[error("duplicate domain {0}")]
    DuplicateDomain(String),
    #[error("duplicate predicate {0}")]
    DuplicatePredicate(String),
    #[error("{0}")]
    Syntax(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DomainDecl {
    pub name: String,
    pub size: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PredicateDecl {
    pub name: String,
    pub domains: Vec<String>,
    /// `(Φ, Φ̄)`; `None` when the declaration gave no weights (both 1).
    pub weight: Option<(Rational, Rational)>,
}

impl PredicateDecl {
    pub fn weights(&self) -> (Rational, Rational) {
        self.weight.clone().unwrap_or_else(|| (Rational::one(), Rational::one()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SourceTerm {
    Var(String),
    Const(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SourceLiteral {
    pub positive: bool,
    pub pred: String,
    pub args: Vec<SourceTerm>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SourceClause {
    /// Existentially quantified variable, all others universal.
    pub exists: Option<String>,
    pub literals: Vec<SourceLiteral>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Formula {
    Atom(SourceLiteral),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MlnLine {
    /// Factor applied per satisfied grounding.
    pub weight: Rational,
    pub formula: Formula,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SourceTheory {
    pub domains: Vec<DomainDecl>,
    pub predicates: Vec<PredicateDecl>,
    pub clauses: Vec<SourceClause>,
    pub mln: Vec<MlnLine>,
}

impl SourceTheory {
    pub fn domain(&self, name: &str) -> Option<&DomainDecl> {
        self.domains.iter().find(|d| d.name == name)
    }

    pub fn predicate(&self, name: &str) -> Option<&PredicateDecl> {
        self.predicates.iter().find(|p| p.name == name)
    }

    /// Override the size of a declared domain.
    pub fn set_domain(&mut self, name: &str, size: u64) -> Result<(), ParseErrorKind> {
        let d = self
            .domains
            .iter_mut()
            .find(|d| d.name == name)
            .ok_or_else(|| ParseErrorKind::UnknownDomain(name.to_string()))?;
        d.size = size;
        Ok(())
    }
}

/// Parse a whole file.
pub fn parse_theory(text: &str) -> Result<SourceTheory, ParseError> {
    let mut t = SourceTheory::default();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split("//").next().unwrap_or("");
        let mut lx = Lexer::new(line, i + 1);
        lx.skip_ws();
        if lx.at_end() {
            continue;
        }
        let start = lx.pos;
        let word = lx.peek_word();
        match word.as_deref() {
            Some("domain") => {
                lx.word();
                let name = lx.expect_word()?;
                let size = lx.expect_nat()?;
                lx.expect_end()?;
                if t.domain(&name).is_some() {
                    return Err(lx.error_at(start, ParseErrorKind::DuplicateDomain(name)));
                }
                t.domains.push(DomainDecl { name, size });
            }
            Some("predicate") => {
                lx.word();
                let name_at = lx.pos;
                let name = lx.expect_word()?;
                lx.expect('(')?;
                let mut domains = Vec::new();
                if !lx.eat(')') {
                    loop {
                        let d_at = lx.pos;
                        let d = lx.expect_word()?;
                        if t.domain(&d).is_none() {
                            return Err(lx.error_at(d_at, ParseErrorKind::UnknownDomain(d)));
                        }
                        domains.push(d);
                        if lx.eat(')') {
                            break;
                        }
                        lx.expect(',')?;
                    }
                }
                let weight = if lx.at_end() {
                    None
                } else {
                    let a = lx.expect_weight()?;
                    let b = lx.expect_weight()?;
                    Some((a, b))
                };
                lx.expect_end()?;
                if t.predicate(&name).is_some() {
                    return Err(lx.error_at(name_at, ParseErrorKind::DuplicatePredicate(name)));
                }
                t.predicates.push(PredicateDecl { name, domains, weight });
            }
            Some("mln") => {
                lx.word();
                let weight = lx.expect_weight()?;
                let formula = lx.formula(&t)?;
                lx.expect_end()?;
                check_formula_domains(&t, &formula, &lx)?;
                t.mln.push(MlnLine { weight, formula });
            }
            _ => {
                let exists = if word.as_deref() == Some("exists") {
                    lx.word();
                    let v = lx.expect_word()?;
                    if !is_var(&v) {
                        return Err(lx.error_at(start, ParseErrorKind::Syntax(format!("{v} is not a variable"))));
                    }
                    lx.expect(':')?;
                    Some(v)
                } else {
                    None
                };
                let mut literals = Vec::new();
                loop {
                    let positive = !lx.eat('!');
                    let at = lx.pos;
                    let mut l = lx.literal(&t)?;
                    l.positive = positive;
                    literals.push((at, l));
                    if !lx.eat('|') {
                        break;
                    }
                }
                lx.expect_end()?;
                check_domains(&t, literals.iter().map(|(at, l)| (*at, l)), &lx)?;
                t.clauses.push(SourceClause { exists, literals: literals.into_iter().map(|(_, l)| l).collect() });
            }
        }
    }
    Ok(t)
}

fn is_var(s: &str) -> bool {
    s.chars().next().is_some_and(|c| c.is_lowercase())
}

fn check_domains<'a>(
    t: &SourceTheory,
    lits: impl Iterator<Item = (usize, &'a SourceLiteral)>,
    lx: &Lexer,
) -> Result<(), ParseError> {
    let mut seen: HashMap<&SourceTerm, &str> = HashMap::new();
    for (at, l) in lits {
        let decl = t.predicate(&l.pred).expect("checked by the literal parser");
        for (term, d) in l.args.iter().zip(&decl.domains) {
            match seen.get(term) {
                Some(prev) if *prev != d.as_str() => {
                    let name = match term {
                        SourceTerm::Var(v) | SourceTerm::Const(v) => v.clone(),
                    };
                    return Err(lx.error_at(
                        at,
                        ParseErrorKind::InconsistentDomain { term: name, first: prev.to_string(), second: d.clone() },
                    ));
                }
                Some(_) => {}
                None => {
                    seen.insert(term, d);
                }
            }
        }
    }
    Ok(())
}

fn check_formula_domains(t: &SourceTheory, f: &Formula, lx: &Lexer) -> Result<(), ParseError> {
    let mut atoms = Vec::new();
    f.atoms(&mut atoms);
    check_domains(t, atoms.into_iter().map(|a| (1, a)), lx)
}

impl Formula {
    pub fn atoms<'a>(&'a self, out: &mut Vec<&'a SourceLiteral>) {
        match self {
            Formula::Atom(a) => out.push(a),
            Formula::Not(f) => f.atoms(out),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|f| f.atoms(out)),
            Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.atoms(out);
                b.atoms(out);
            }
        }
    }
}

struct Lexer<'a> {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    _src: &'a str,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str, line: usize) -> Self {
        Lexer { chars: src.chars().collect(), pos: 0, line, _src: src }
    }

    fn error_at(&self, pos: usize, kind: ParseErrorKind) -> ParseError {
        ParseError { line: self.line, col: pos + 1, kind }
    }

    fn error(&self, msg: impl Into<String>) -> ParseError {
        self.error_at(self.pos, ParseErrorKind::Syntax(msg.into()))
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos >= self.chars.len()
    }

    fn expect_end(&mut self) -> Result<(), ParseError> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.error(format!("unexpected {:?}", self.chars[self.pos])))
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn eat_str(&mut self, s: &str) -> bool {
        self.skip_ws();
        let n = s.chars().count();
        if self.chars.len() >= self.pos + n && self.chars[self.pos..self.pos + n].iter().copied().eq(s.chars()) {
            self.pos += n;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(format!("expected {c:?}")))
        }
    }

    fn peek_word(&mut self) -> Option<String> {
        let save = self.pos;
        let w = self.word();
        self.pos = save;
        w
    }

    fn word(&mut self) -> Option<String> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.chars.len() && (self.chars[self.pos].is_alphanumeric() || self.chars[self.pos] == '_') {
            self.pos += 1;
        }
        (self.pos > start).then(|| self.chars[start..self.pos].iter().collect())
    }

    fn expect_word(&mut self) -> Result<String, ParseError> {
        self.word().ok_or_else(|| self.error("expected a name"))
    }

    fn expect_nat(&mut self) -> Result<u64, ParseError> {
        let at = self.pos;
        let w = self.expect_word()?;
        w.parse().map_err(|_| self.error_at(at, ParseErrorKind::Syntax(format!("expected a natural number, got {w}"))))
    }

    fn expect_weight(&mut self) -> Result<Rational, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.chars.len() && !self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
        let tok: String = self.chars[start..self.pos].iter().collect();
        if tok.is_empty() {
            return Err(self.error("expected a weight"));
        }
        parse_rational(&tok).ok_or_else(|| self.error_at(start, ParseErrorKind::MalformedWeight(tok)))
    }

    fn literal(&mut self, t: &SourceTheory) -> Result<SourceLiteral, ParseError> {
        let at = self.pos;
        let name = self.expect_word()?;
        let decl = t
            .predicate(&name)
            .ok_or_else(|| self.error_at(at, ParseErrorKind::UnknownPredicate(name.clone())))?;
        self.expect('(')?;
        let mut args = Vec::new();
        if !self.eat(')') {
            loop {
                let w = self.expect_word()?;
                args.push(if is_var(&w) { SourceTerm::Var(w) } else { SourceTerm::Const(w) });
                if self.eat(')') {
                    break;
                }
                self.expect(',')?;
            }
        }
        if args.len() != decl.domains.len() {
            return Err(self.error_at(
                at,
                ParseErrorKind::ArityMismatch { name, expected: decl.domains.len(), found: args.len() },
            ));
        }
        Ok(SourceLiteral { positive: true, pred: name, args })
    }

    /// formula := imp ("<=>" imp)*
    fn formula(&mut self, t: &SourceTheory) -> Result<Formula, ParseError> {
        let mut f = self.implication(t)?;
        while self.eat_str("<=>") {
            let g = self.implication(t)?;
            f = Formula::Iff(Box::new(f), Box::new(g));
        }
        Ok(f)
    }

    /// imp := or ("=>" imp)?
    fn implication(&mut self, t: &SourceTheory) -> Result<Formula, ParseError> {
        let f = self.disjunction(t)?;
        if self.eat_str("=>") {
            let g = self.implication(t)?;
            return Ok(Formula::Implies(Box::new(f), Box::new(g)));
        }
        Ok(f)
    }

    fn disjunction(&mut self, t: &SourceTheory) -> Result<Formula, ParseError> {
        let mut parts = vec![self.conjunction(t)?];
        while self.eat('|') {
            parts.push(self.conjunction(t)?);
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap_or_else(|| unreachable!()) } else { Formula::Or(parts) })
    }

    fn conjunction(&mut self, t: &SourceTheory) -> Result<Formula, ParseError> {
        let mut parts = vec![self.unary(t)?];
        while self.eat('&') {
            parts.push(self.unary(t)?);
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap_or_else(|| unreachable!()) } else { Formula::And(parts) })
    }

    fn unary(&mut self, t: &SourceTheory) -> Result<Formula, ParseError> {
        if self.eat('!') {
            return Ok(Formula::Not(Box::new(self.unary(t)?)));
        }
        if self.eat('(') {
            let f = self.formula(t)?;
            self.expect(')')?;
            return Ok(f);
        }
        Ok(Formula::Atom(self.literal(t)?))
    }
}

/// Exact value of `3`, `-0.25`, `7/3` or `-7/3`.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    if body.is_empty() || body.starts_with(['+', '-']) {
        return None;
    }
    let value = if let Some((p, q)) = body.split_once('/') {
        let p: BigInt = digits(p)?;
        let q: BigInt = digits(q)?;
        if q.is_zero() {
            return None;
        }
        BigRational::new(p, q)
    } else if let Some((int, frac)) = body.split_once('.') {
        if int.is_empty() && frac.is_empty() {
            return None;
        }
        let i: BigInt = if int.is_empty() { BigInt::zero() } else { digits(int)? };
        let f: BigInt = if frac.is_empty() { BigInt::zero() } else { digits(frac)? };
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        BigRational::new(i * &scale + f, scale)
    } else {
        BigRational::from_integer(digits(body)?)
    };
    Some(if neg { -value } else { value })
}

fn digits(s: &str) -> Option<BigInt> {
    if s.is_empty() || !s.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

/// `p` for integers, `p/q` otherwise.
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for SourceTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SourceTerm::Var(s) | SourceTerm::Const(s) => f.write_str(s),
        }
    }
}

impl fmt::Display for SourceLiteral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let args: Vec<String> = self.args.iter().map(ToString::to_string).collect();
        write!(f, "{}{}({})", if self.positive { "" } else { "!" }, self.pred, args.join(", "))
    }
}

impl Formula {
    fn is_simple(&self) -> bool {
        matches!(self, Formula::Atom(_) | Formula::Not(_))
    }

    fn wrapped(&self) -> String {
        if self.is_simple() {
            self.to_string()
        } else {
            format!("({self})")
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Atom(a) => write!(f, "{a}"),
            Formula::Not(g) => write!(f, "!{}", g.wrapped()),
            Formula::And(gs) => f.write_str(&gs.iter().map(Formula::wrapped).collect::<Vec<_>>().join(" & ")),
            Formula::Or(gs) => f.write_str(&gs.iter().map(Formula::wrapped).collect::<Vec<_>>().join(" | ")),
            Formula::Implies(a, b) => write!(f, "{} => {}", a.wrapped(), b.wrapped()),
            Formula::Iff(a, b) => write!(f, "{} <=> {}", a.wrapped(), b.wrapped()),
        }
    }
}

/// Text that parses back to `t`.
pub fn serialize_theory(t: &SourceTheory) -> String {
    let mut out = String::new();
    for d in &t.domains {
        out.push_str(&format!("domain {} {}\n", d.name, d.size));
    }
    for p in &t.predicates {
        out.push_str(&format!("predicate {}({})", p.name, p.domains.join(", ")));
        if let Some((a, b)) = &p.weight {
            out.push_str(&format!(" {} {}", format_rational(a), format_rational(b)));
        }
        out.push('\n');
    }
    for c in &t.clauses {
        if let Some(v) = &c.exists {
            out.push_str(&format!("exists {v}: "));
        }
        let lits: Vec<String> = c.literals.iter().map(ToString::to_string).collect();
        out.push_str(&lits.join(" | "));
        out.push('\n');
    }
    for m in &t.mln {
        out.push_str(&format!("mln {} {}\n", format_rational(&m.weight), m.formula));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(p: i64, q: i64) -> Rational {
        BigRational::new(p.into(), q.into())
    }

    const SMOKERS: &str = "domain people 2\n\
        predicate Smokes(people) 0.2 0.5\n\
        predicate Cancer(people) 0.8 1.2\n\
        !Smokes(x) | Cancer(x)\n";

    #[test]
    fn smokers_weights_exact() {
        let t = parse_theory(SMOKERS).unwrap();
        assert_eq!(t.predicate("Smokes").unwrap().weight, Some((r(1, 5), r(1, 2))));
        assert_eq!(t.predicate("Cancer").unwrap().weight, Some((r(4, 5), r(6, 5))));
        assert_eq!(t.clauses.len(), 1);
        assert!(!t.clauses[0].literals[0].positive);
    }

    #[test]
    fn empty_input() {
        assert_eq!(parse_theory("").unwrap(), SourceTheory::default());
        assert_eq!(parse_theory("// only a comment\n\n").unwrap(), SourceTheory::default());
    }

    #[test]
    fn inconsistent_variable_domain() {
        let src = "domain a 2\ndomain b 2\npredicate P(a)\npredicate Q(b)\n!P(x) | Q(x)\n";
        let e = parse_theory(src).unwrap_err();
        assert_eq!(e.line, 5);
        assert!(matches!(e.kind, ParseErrorKind::InconsistentDomain { .. }));
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse_theory("domain d 2\nP(x)\n").unwrap_err();
        assert_eq!((e.line, e.col), (2, 1));
        assert!(matches!(e.kind, ParseErrorKind::UnknownPredicate(_)));
        let e = parse_theory("domain d 2\npredicate P(d)\nP(x, y)\n").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::ArityMismatch { expected: 1, found: 2, .. }));
        let e = parse_theory("domain d 2\npredicate P(d) 0.x 1\n").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::MalformedWeight(_)));
        assert_eq!(e.col, 16);
        let e = parse_theory("domain d 2\ndomain d 3\n").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::DuplicateDomain(_)));
    }

    #[test]
    fn rationals() {
        assert_eq!(parse_rational("0.2"), Some(r(1, 5)));
        assert_eq!(parse_rational("-1"), Some(r(-1, 1)));
        assert_eq!(parse_rational("-7/3"), Some(r(-7, 3)));
        assert_eq!(parse_rational(".5"), Some(r(1, 2)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("--1"), None);
        assert_eq!(parse_rational("1e3"), None);
        assert_eq!(format_rational(&r(1, 3)), "1/3");
        assert_eq!(format_rational(&r(-4, 2)), "-2");
    }

    #[test]
    fn round_trip_exists_and_mln() {
        let src = "domain p 2\ndomain d 3\npredicate Born(p, d)\npredicate S(p) 1 -1\n\
                   exists v: Born(x, v)\nmln 1/3 !(Born(x, y) & S(x)) => Born(x, y) <=> S(x)\n";
        let t = parse_theory(src).unwrap();
        let text = serialize_theory(&t);
        assert!(text.contains("exists v: Born(x, v)"));
        assert!(text.contains("mln 1/3"));
        assert_eq!(parse_theory(&text).unwrap(), t);
    }

    #[test]
    fn smokers_round_trip() {
        let t = parse_theory(SMOKERS).unwrap();
        assert_eq!(parse_theory(&serialize_theory(&t)).unwrap(), t);
    }

    #[test]
    fn operator_precedence() {
        let t = parse_theory("domain d 1\npredicate P(d)\npredicate Q(d)\nmln 2 P(x) | Q(x) & P(x) => Q(x)\n").unwrap();
        match &t.mln[0].formula {
            Formula::Implies(a, _) => assert!(matches!(**a, Formula::Or(_))),
            f => panic!("unexpected {f:?}"),
        }
    }
}
