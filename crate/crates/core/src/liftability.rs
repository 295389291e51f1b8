//! Membership checks for the liftable classes FO², RU, S²FO² and S²RU.
//!
//! The RU check runs the lifted rules on a copy of the theory whose segment
//! sizes are symbolic, so its answer does not depend on any domain size.

use std::collections::{HashMap, HashSet};
use std::fmt;

use crate::canon::{shape_key, CanonicalKey};
use crate::engine::rules;
use crate::engine::simplify::simplify;
use crate::logic::{Clause, Size, Theory};

/// Theories explored by one RU check before it answers `Unknown`.
pub const RU_NODE_CAP: u64 = 20_000;
/// Candidate α-predicates above which subsets are not enumerated exhaustively.
const SUBSET_CANDIDATE_CAP: usize = 10;
/// Trace lines kept in an RU witness.
const TRACE_CAP: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Member,
    NonMember,
    Unknown,
}

impl Verdict {
    /// Verdict of a theory that needs every part to be a member.
    fn and(self, other: Verdict) -> Verdict {
        match (self, other) {
            (Verdict::NonMember, _) | (_, Verdict::NonMember) => Verdict::NonMember,
            (Verdict::Unknown, _) | (_, Verdict::Unknown) => Verdict::Unknown,
            _ => Verdict::Member,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Verdict::Member => "yes",
            Verdict::NonMember => "no",
            Verdict::Unknown => "unknown",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Clone, Debug)]
pub struct Fo2Report {
    pub member: bool,
    /// First clause with more than two logical variables.
    pub offending: Option<String>,
}

#[derive(Clone, Debug)]
pub enum RuWitness {
    /// Rules applied, indented by depth.
    Trace(Vec<String>),
    /// A theory where no rule applies and no unary atom is left.
    Stuck(String),
    /// A theory whose shape reappeared below itself.
    Repeated(String),
    /// The exploration hit [`RU_NODE_CAP`].
    NodeCap,
}

#[derive(Clone, Debug)]
pub struct RuReport {
    pub verdict: Verdict,
    pub witness: RuWitness,
}

#[derive(Clone, Debug)]
pub struct S2Report {
    pub verdict: Verdict,
    /// The α-predicates of the best partition found.
    pub alpha_preds: Vec<String>,
    pub alpha_clauses: Vec<String>,
    pub beta_clauses: Vec<String>,
    /// Binary predicates not considered as α-predicates because both
    /// arguments range over the same domain.
    pub same_domain_excluded: Vec<String>,
    /// RU report of β, for S²RU.
    pub beta_ru: Option<RuReport>,
}

#[derive(Clone, Debug)]
pub struct ClassReport {
    pub fo2: Fo2Report,
    pub ru: RuReport,
    pub s2fo2: S2Report,
    pub s2ru: S2Report,
}

/// Run all four checks.
pub fn check(t: &Theory) -> ClassReport {
    ClassReport { fo2: is_fo2(t), ru: is_ru(t), s2fo2: is_s2fo2(t), s2ru: is_s2ru(t) }
}

fn lv_count(c: &Clause) -> usize {
    let mut seen: Vec<u16> = c.lits.iter().flat_map(|l| l.vars()).collect();
    seen.sort_unstable();
    seen.dedup();
    seen.len()
}

/// Every clause has at most two logical variables.
pub fn is_fo2(t: &Theory) -> Fo2Report {
    match t.clauses.iter().find(|c| lv_count(c) > 2) {
        Some(c) => Fo2Report { member: false, offending: Some(t.display_clause(c)) },
        None => Fo2Report { member: true, offending: None },
    }
}

/// Copy of `t` with every used segment given its own symbolic size.
pub fn symbolize(t: &Theory) -> Theory {
    let mut s = t.clone();
    for (i, seg) in s.segments.iter_mut().enumerate() {
        seg.size = Size::Symbolic(i as u32);
    }
    s
}

/// Recursively unary check.
pub fn is_ru(t: &Theory) -> RuReport {
    let sym = symbolize(t);
    let mut search = RuSearch::new(sym.segments.len() as u32);
    let verdict = search.visit(sym, 0);
    let witness = match verdict {
        Verdict::Member => RuWitness::Trace(search.trace),
        Verdict::NonMember => RuWitness::Stuck(search.stuck.unwrap_or_default()),
        Verdict::Unknown => match search.repeated {
            Some(r) => RuWitness::Repeated(r),
            None => RuWitness::NodeCap,
        },
    };
    RuReport { verdict, witness }
}

struct RuSearch {
    next_symbol: u32,
    nodes: u64,
    memo: HashMap<CanonicalKey, Verdict>,
    path: HashSet<CanonicalKey>,
    trace: Vec<String>,
    stuck: Option<String>,
    repeated: Option<String>,
}

impl RuSearch {
    fn new(next_symbol: u32) -> Self {
        RuSearch {
            next_symbol,
            nodes: 0,
            memo: HashMap::new(),
            path: HashSet::new(),
            trace: Vec::new(),
            stuck: None,
            repeated: None,
        }
    }

    fn note(&mut self, depth: usize, step: &str) {
        if self.trace.len() < TRACE_CAP {
            self.trace.push(format!("{}{step}", "  ".repeat(depth)));
        }
    }

    fn visit(&mut self, t: Theory, depth: usize) -> Verdict {
        self.nodes += 1;
        if self.nodes > RU_NODE_CAP {
            return Verdict::Unknown;
        }
        let s = simplify(&t);
        if s.contradiction {
            self.note(depth, "contradiction");
            return Verdict::Member;
        }
        let mut t = s.theory;
        if t.clauses.is_empty() {
            self.note(depth, "empty");
            return Verdict::Member;
        }
        t.compact();
        let key = shape_key(&t);
        if let Some(&v) = self.memo.get(&key) {
            self.note(depth, "cached");
            return v;
        }
        if self.path.contains(&key) {
            self.repeated.get_or_insert_with(|| t.to_string());
            return Verdict::Unknown;
        }
        self.path.insert(key.clone());
        let v = self.expand(&t, depth);
        self.path.remove(&key);
        self.memo.insert(key, v);
        v
    }

    fn expand(&mut self, t: &Theory, depth: usize) -> Verdict {
        if let Some(comps) = rules::decompose(t) {
            self.note(depth, "decomposition");
            let mut v = Verdict::Member;
            for c in comps {
                v = v.and(self.visit(c, depth + 1));
                if v == Verdict::NonMember {
                    break;
                }
            }
            return v;
        }
        if let Some(ld) = rules::lifted_decompose(t) {
            self.note(depth, "lifted decomposition");
            return self.visit(ld.child, depth + 1);
        }
        if let Some(atom) = rules::pick_ground_atom(t) {
            self.note(depth, "case analysis");
            let (a, b) = rules::case_analysis(t, &atom);
            let v = self.visit(a, depth + 1);
            if v == Verdict::NonMember {
                return v;
            }
            return v.and(self.visit(b, depth + 1));
        }
        if let Some((cell, seg)) = rules::pick_unary_cell(t) {
            self.note(depth, &format!("lifted case analysis on {}", t.preds[cell.pred as usize].name));
            let mut b = t.clone();
            let (ts, fs) = b.split_symbolic(seg, &mut self.next_symbol);
            let branch = rules::lifted_case_branch(&b, &cell, seg, ts, fs);
            return self.visit(branch, depth + 1);
        }
        self.stuck.get_or_insert_with(|| t.to_string());
        Verdict::NonMember
    }
}

/// Binary predicates usable as α-predicates, and those excluded because both
/// arguments share a domain.
fn alpha_candidates(t: &Theory) -> (Vec<u32>, Vec<u32>) {
    let mut used: Vec<u32> = t.clauses.iter().flat_map(|c| c.lits.iter().map(|l| l.pred)).collect();
    used.sort_unstable();
    used.dedup();
    let binary: Vec<u32> = used.into_iter().filter(|&p| t.preds[p as usize].arity() == 2).collect();
    binary.into_iter().partition(|&p| {
        let d = &t.preds[p as usize].domains;
        d[0] != d[1]
    })
}

/// A clause made of exactly two different literals of `p` and nothing else.
fn is_alpha_clause(c: &Clause, p: u32) -> bool {
    c.lits.len() == 2 && c.lits.iter().all(|l| l.pred == p) && c.lits[0] != c.lits[1]
}

/// Split the clauses into α and β for the α-predicate set `set`, or `None` when
/// some β clause breaks the constraints.
fn partition(t: &Theory, set: &[u32]) -> Option<(Vec<usize>, Vec<usize>)> {
    let mut alpha = Vec::new();
    let mut beta = Vec::new();
    for (i, c) in t.clauses.iter().enumerate() {
        if set.iter().any(|&p| is_alpha_clause(c, p)) {
            alpha.push(i);
            continue;
        }
        let s_lits: Vec<_> = c.lits.iter().filter(|l| set.contains(&l.pred)).collect();
        if s_lits.len() > 1 {
            return None;
        }
        if s_lits.len() == 1 {
            let wide = c.lits.iter().any(|l| !set.contains(&l.pred) && l.var_count() > 1);
            if wide {
                return None;
            }
        }
        beta.push(i);
    }
    Some((alpha, beta))
}

/// Subsets of the candidates to try, largest first. Without exhaustive
/// enumeration, the greedy fixpoint is tried followed by the empty set.
fn candidate_sets(t: &Theory, cands: &[u32]) -> Vec<Vec<u32>> {
    if cands.len() <= SUBSET_CANDIDATE_CAP {
        let mut sets: Vec<Vec<u32>> = (0u32..1 << cands.len())
            .map(|m| cands.iter().enumerate().filter(|(i, _)| m & (1 << i) != 0).map(|(_, &p)| p).collect())
            .collect();
        sets.sort_by_key(|s: &Vec<u32>| std::cmp::Reverse(s.len()));
        return sets;
    }
    let mut set = cands.to_vec();
    while partition(t, &set).is_none() {
        // drop every α-predicate of the first β clause that breaks the rules
        let offending = t.clauses.iter().find(|c| {
            !set.iter().any(|&p| is_alpha_clause(c, p)) && partition(&t.with_clauses(vec![(*c).clone()]), &set).is_none()
        });
        match offending {
            Some(c) => set.retain(|p| !c.lits.iter().any(|l| l.pred == *p)),
            None => set.clear(),
        }
    }
    vec![set, Vec::new()]
}

fn names(t: &Theory, preds: &[u32]) -> Vec<String> {
    preds.iter().map(|&p| t.preds[p as usize].name.clone()).collect()
}

fn clause_strings(t: &Theory, idx: &[usize]) -> Vec<String> {
    idx.iter().map(|&i| t.display_clause(&t.clauses[i])).collect()
}

fn s2_check(t: &Theory, ru: bool) -> S2Report {
    let (cands, excluded) = alpha_candidates(t);
    let mut best: Option<S2Report> = None;
    let mut fallback: Option<S2Report> = None;
    for set in candidate_sets(t, &cands) {
        let Some((alpha, beta)) = partition(t, &set) else { continue };
        let beta_theory = t.with_clauses(beta.iter().map(|&i| t.clauses[i].clone()).collect());
        let (verdict, beta_ru) = if ru {
            let r = is_ru(&beta_theory);
            (r.verdict, Some(r))
        } else {
            let member = is_fo2(&beta_theory).member;
            (if member { Verdict::Member } else { Verdict::NonMember }, None)
        };
        let report = S2Report {
            verdict,
            alpha_preds: names(t, &set),
            alpha_clauses: clause_strings(t, &alpha),
            beta_clauses: clause_strings(t, &beta),
            same_domain_excluded: names(t, &excluded),
            beta_ru,
        };
        match verdict {
            Verdict::Member => {
                best = Some(report);
                break;
            }
            Verdict::Unknown if fallback.as_ref().is_none_or(|f| f.verdict != Verdict::Unknown) => {
                fallback = Some(report)
            }
            _ if fallback.is_none() => fallback = Some(report),
            _ => {}
        }
    }
    best.or(fallback).unwrap_or_else(|| S2Report {
        verdict: Verdict::NonMember,
        alpha_preds: Vec::new(),
        alpha_clauses: Vec::new(),
        beta_clauses: clause_strings(t, &(0..t.clauses.len()).collect::<Vec<_>>()),
        same_domain_excluded: names(t, &excluded),
        beta_ru: None,
    })
}

/// S²FO²: some α-predicate set leaves a β part in FO².
pub fn is_s2fo2(t: &Theory) -> S2Report {
    s2_check(t, false)
}

/// S²RU: some α-predicate set leaves a β part in RU.
pub fn is_s2ru(t: &Theory) -> S2Report {
    s2_check(t, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_theory;
    use crate::preprocess::compile;

    fn theory(src: &str) -> Theory {
        compile(&parse_theory(src).unwrap()).unwrap().theory
    }

    #[test]
    fn verdict_conjunction() {
        use Verdict::*;
        assert_eq!(Member.and(Member), Member);
        assert_eq!(Member.and(Unknown), Unknown);
        assert_eq!(Unknown.and(NonMember), NonMember);
        assert_eq!(NonMember.label(), "no");
    }

    #[test]
    fn two_variable_theories_are_fo2_and_ru() {
        let t = theory("domain d 3\npredicate F(d, d)\npredicate P(d)\n!F(x, y) | F(y, x)\n!P(x) | F(x, y)\n");
        assert!(is_fo2(&t).member);
        assert_eq!(is_ru(&t).verdict, Verdict::Member);
    }

    #[test]
    fn three_variables_break_fo2() {
        let t = theory("domain d 3\npredicate F(d, d)\n!F(x, y) | !F(y, z) | F(x, z)\n");
        let r = is_fo2(&t);
        assert!(!r.member);
        assert!(r.offending.is_some());
    }
}
