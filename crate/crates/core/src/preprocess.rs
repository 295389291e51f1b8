//! From parsed source to weighted universal clauses: typing of variables and
//! constants, existential elimination and MLN formula encoding.

use std::collections::HashMap;

use crate::engine::simplify::normalize_clause;
use crate::error::{Error, Result};
use crate::logic::{Clause, Literal, Predicate, Rational, RootDomain, Size, Term, Theory, Weight};
use crate::oracle::ExistentialClause;
use crate::parser::{Formula, SourceLiteral, SourceTerm, SourceTheory};

/// Atom occurrences allowed in one MLN formula.
pub const DEFAULT_FORMULA_LIMIT: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IntroducedKind {
    Skolem,
    Aux,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Introduced {
    pub name: String,
    pub kind: IntroducedKind,
    pub weight: Weight,
    /// Source line the predicate stands for.
    pub note: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EncodingArtifacts {
    pub introduced: Vec<Introduced>,
}

/// A source theory ready for counting.
#[derive(Clone, Debug)]
pub struct Compiled {
    /// Universal clauses only; existentials replaced by Skolem clauses.
    pub theory: Theory,
    /// The theory before Skolemization, without the existential sentences.
    pub original: Theory,
    /// Existential sentences of `original`, typed against its registries.
    pub existentials: Vec<ExistentialClause>,
    pub artifacts: EncodingArtifacts,
}

/// Typing context shared by all clauses of one source theory.
struct Lowering {
    theory: Theory,
    pred_ids: HashMap<String, u32>,
    root_seg: Vec<u32>,
    consts: HashMap<(usize, String), u32>,
}

impl Lowering {
    fn new(src: &SourceTheory) -> Result<Self> {
        let domains: Vec<RootDomain> =
            src.domains.iter().map(|d| RootDomain { name: d.name.clone(), size: d.size }).collect();
        let dom_idx = |name: &str| {
            src.domains
                .iter()
                .position(|d| d.name == name)
                .ok_or_else(|| Error::Invalid(format!("unknown domain {name}")))
        };
        let mut preds = Vec::new();
        let mut pred_ids = HashMap::new();
        for p in &src.predicates {
            let doms = p.domains.iter().map(|d| dom_idx(d)).collect::<Result<Vec<_>>>()?;
            let (pos, neg) = p.weights();
            pred_ids.insert(p.name.clone(), preds.len() as u32);
            preds.push(Predicate { name: p.name.clone(), domains: doms, weight: Weight::new(pos, neg) });
        }
        let mut theory = Theory::new(domains, preds);
        // constants are carved out of their root before the segment is sized
        let mut consts = HashMap::new();
        let mut per_root = vec![0u64; src.domains.len()];
        let mut lits: Vec<&SourceLiteral> = src.clauses.iter().flat_map(|c| c.literals.iter()).collect();
        for m in &src.mln {
            m.formula.atoms(&mut lits);
        }
        for l in lits {
            let p = src.predicate(&l.pred).ok_or_else(|| Error::Invalid(format!("unknown predicate {}", l.pred)))?;
            for (a, d) in l.args.iter().zip(&p.domains) {
                if let SourceTerm::Const(name) = a {
                    let r = dom_idx(d)?;
                    if let std::collections::hash_map::Entry::Vacant(e) = consts.entry((r, name.clone())) {
                        e.insert(theory.add_constant(r, name));
                        per_root[r] += 1;
                    }
                }
            }
        }
        let mut root_seg = Vec::new();
        for (r, d) in src.domains.iter().enumerate() {
            let n = d.size.checked_sub(per_root[r]).ok_or_else(|| {
                Error::Invalid(format!("domain {} has {} individuals but {} constants", d.name, d.size, per_root[r]))
            })?;
            root_seg.push(theory.add_segment(r, Size::Known(n)));
        }
        Ok(Lowering { theory, pred_ids, root_seg, consts })
    }

    fn pred(&self, name: &str) -> Result<u32> {
        self.pred_ids.get(name).copied().ok_or_else(|| Error::Invalid(format!("unknown predicate {name}")))
    }

    /// Lower literals sharing one variable scope.
    fn literals(&self, lits: &[(bool, &SourceLiteral)], vars: &mut Vec<(String, u32)>) -> Result<Vec<Literal>> {
        let mut out = Vec::new();
        for &(positive, l) in lits {
            let pid = self.pred(&l.pred)?;
            let doms = self.theory.preds[pid as usize].domains.clone();
            let mut args = Vec::new();
            for (a, &r) in l.args.iter().zip(&doms) {
                args.push(match a {
                    SourceTerm::Const(name) => Term::Const(self.consts[&(r, name.clone())]),
                    SourceTerm::Var(name) => {
                        let seg = self.root_seg[r];
                        let i = match vars.iter().position(|(n, _)| n == name) {
                            Some(i) => {
                                if vars[i].1 != seg {
                                    return Err(Error::Invalid(format!("variable {name} used with two domains")));
                                }
                                i
                            }
                            None => {
                                vars.push((name.clone(), seg));
                                vars.len() - 1
                            }
                        };
                        Term::Var(i as u16)
                    }
                });
            }
            out.push(Literal::new(positive, pid, args));
        }
        Ok(out)
    }

    fn fresh_name(&self, stem: &str) -> String {
        let mut i = 0;
        loop {
            let name = format!("{stem}{i}");
            if !self.theory.preds.iter().any(|p| p.name == name) {
                return name;
            }
            i += 1;
        }
    }

    fn add_pred(&mut self, name: String, domains: Vec<usize>, weight: Weight) -> u32 {
        let id = self.theory.add_predicate(Predicate { name: name.clone(), domains, weight });
        self.pred_ids.insert(name, id);
        id
    }
}

fn clause_from(vars: &[(String, u32)], lits: Vec<Literal>) -> Clause {
    Clause::new(vars.iter().map(|(_, s)| *s).collect::<Vec<_>>(), lits)
}

/// Type every clause and formula of `src`, replace existentials by Skolem
/// clauses and encode MLN lines.
pub fn compile(src: &SourceTheory) -> Result<Compiled> {
    compile_with_limit(src, DEFAULT_FORMULA_LIMIT)
}

pub fn compile_with_limit(src: &SourceTheory, formula_limit: usize) -> Result<Compiled> {
    let mut lw = Lowering::new(src)?;
    let mut artifacts = EncodingArtifacts::default();
    let mut existentials = Vec::new();
    for c in &src.clauses {
        let mut vars = Vec::new();
        let lits: Vec<(bool, &SourceLiteral)> = c.literals.iter().map(|l| (l.positive, l)).collect();
        let lowered = lw.literals(&lits, &mut vars)?;
        let clause = clause_from(&vars, lowered);
        match &c.exists {
            None => lw.theory.clauses.push(clause),
            Some(v) => {
                let var = vars.iter().position(|(n, _)| n == v).ok_or_else(|| {
                    Error::UnsupportedExistential(format!("existential variable {v} does not occur in its clause"))
                })?;
                existentials.push(ExistentialClause { clause, var: var as u16 });
            }
        }
    }
    for m in &src.mln {
        let (clauses, art) = encode_mln(&mut lw, &m.weight, &m.formula, formula_limit)?;
        lw.theory.clauses.extend(clauses);
        artifacts.introduced.extend(art.introduced);
    }
    let original = lw.theory.clone();
    let (theory, sk) = skolemize_into(lw, &existentials)?;
    artifacts.introduced.extend(sk.introduced);
    Ok(Compiled { theory, original, existentials, artifacts })
}

/// Replace every `∀ū ∃v: L1 ∨ … ∨ Lk` by `∀ū, v: S(ū) ∨ ¬Li` for each `i`,
/// with a fresh predicate `S` weighted `(1, -1)`.
pub fn skolemize_existentials(src: &SourceTheory) -> Result<(Theory, EncodingArtifacts)> {
    let c = compile(src)?;
    let artifacts = EncodingArtifacts {
        introduced: c.artifacts.introduced.into_iter().filter(|i| i.kind == IntroducedKind::Skolem).collect(),
    };
    Ok((c.theory, artifacts))
}

fn skolemize_into(mut lw: Lowering, exists: &[ExistentialClause]) -> Result<(Theory, EncodingArtifacts)> {
    let mut art = EncodingArtifacts::default();
    for e in exists {
        let c = &e.clause;
        if c.lits.is_empty() {
            return Err(Error::UnsupportedExistential("empty clause".into()));
        }
        let outer: Vec<u16> = (0..c.vars.len() as u16).filter(|&v| v != e.var).collect();
        let domains: Vec<usize> = outer.iter().map(|&v| lw.theory.segments[c.vars[v as usize] as usize].root).collect();
        let name = lw.fresh_name("Sk");
        let weight = Weight::ints(1, -1);
        let s = lw.add_pred(name.clone(), domains, weight.clone());
        let head = Literal::new(true, s, outer.iter().map(|&v| Term::Var(v)).collect::<Vec<_>>());
        for l in &c.lits {
            lw.theory.clauses.push(Clause::new(c.vars.clone(), vec![head.clone(), l.negated()]));
        }
        art.introduced.push(Introduced {
            name,
            kind: IntroducedKind::Skolem,
            weight,
            note: format!("exists {}", lw.theory.display_clause(c)),
        });
    }
    Ok((lw.theory, art))
}

/// Encode one weighted formula of `src` as clauses over a fresh predicate
/// `Aux ⇔ f` with weights `(weight, 1)`. The clauses refer to the registries
/// of the returned theory.
pub fn encode_mln_formula(src: &SourceTheory, weight: &Rational, f: &Formula) -> Result<(Theory, EncodingArtifacts)> {
    let mut lw = Lowering::new(src)?;
    let (clauses, art) = encode_mln(&mut lw, weight, f, DEFAULT_FORMULA_LIMIT)?;
    lw.theory.clauses = clauses;
    Ok((lw.theory, art))
}

/// Negation normal form with atoms as (sign, literal).
#[derive(Clone, Debug)]
enum Nnf<'a> {
    Lit(bool, &'a SourceLiteral),
    And(Vec<Nnf<'a>>),
    Or(Vec<Nnf<'a>>),
}

fn nnf(f: &Formula, positive: bool) -> Nnf<'_> {
    match f {
        Formula::Atom(a) => Nnf::Lit(positive == a.positive, a),
        Formula::Not(g) => nnf(g, !positive),
        Formula::And(gs) => {
            let parts = gs.iter().map(|g| nnf(g, positive)).collect();
            if positive {
                Nnf::And(parts)
            } else {
                Nnf::Or(parts)
            }
        }
        Formula::Or(gs) => {
            let parts = gs.iter().map(|g| nnf(g, positive)).collect();
            if positive {
                Nnf::Or(parts)
            } else {
                Nnf::And(parts)
            }
        }
        Formula::Implies(a, b) => {
            if positive {
                Nnf::Or(vec![nnf(a, false), nnf(b, true)])
            } else {
                Nnf::And(vec![nnf(a, true), nnf(b, false)])
            }
        }
        Formula::Iff(a, b) => {
            // (a ∧ b) ∨ (¬a ∧ ¬b), or its negation (a ∧ ¬b) ∨ (¬a ∧ b)
            let (x, y) = if positive { (true, true) } else { (true, false) };
            Nnf::Or(vec![Nnf::And(vec![nnf(a, x), nnf(b, y)]), Nnf::And(vec![nnf(a, !x), nnf(b, !y)])])
        }
    }
}

/// Clauses (lists of signed literals) equivalent to an NNF formula.
fn cnf<'a>(f: &Nnf<'a>) -> Vec<Vec<(bool, &'a SourceLiteral)>> {
    match f {
        Nnf::Lit(s, l) => vec![vec![(*s, *l)]],
        Nnf::And(gs) => gs.iter().flat_map(cnf).collect(),
        Nnf::Or(gs) => {
            let mut acc: Vec<Vec<(bool, &SourceLiteral)>> = vec![Vec::new()];
            for g in gs {
                let part = cnf(g);
                let mut next = Vec::with_capacity(acc.len() * part.len());
                for a in &acc {
                    for p in &part {
                        let mut c = a.clone();
                        c.extend(p.iter().copied());
                        next.push(c);
                    }
                }
                acc = next;
            }
            acc
        }
    }
}

fn encode_mln(lw: &mut Lowering, weight: &Rational, f: &Formula, limit: usize) -> Result<(Vec<Clause>, EncodingArtifacts)> {
    let mut atoms = Vec::new();
    f.atoms(&mut atoms);
    if atoms.len() > limit {
        return Err(Error::FormulaTooLarge { size: atoms.len(), limit });
    }
    // variables in order of first occurrence; all of them are Aux arguments
    let mut vars: Vec<(String, u32)> = Vec::new();
    let all: Vec<(bool, &SourceLiteral)> = atoms.iter().map(|a| (true, *a)).collect();
    lw.literals(&all, &mut vars)?;
    let domains: Vec<usize> = vars.iter().map(|(_, s)| lw.theory.segments[*s as usize].root).collect();
    let name = lw.fresh_name("Aux");
    let w = Weight::new(weight.clone(), Rational::from_integer(1.into()));
    let aux = lw.add_pred(name.clone(), domains.clone(), w.clone());
    let aux_args: Vec<Term> = (0..vars.len() as u16).map(Term::Var).collect();
    let mut clauses = Vec::new();
    for (sign, formula_sign) in [(false, true), (true, false)] {
        for c in cnf(&nnf(f, formula_sign)) {
            let mut lits = lw.literals(&c, &mut vars)?;
            lits.push(Literal::new(sign, aux, aux_args.clone()));
            if let Some(c) = normalize_clause(&clause_from(&vars, lits)) {
                clauses.push(c);
            }
        }
    }
    // Aux atoms whose same-domain arguments coincide are not groundings of
    // the formula (its variables are distinct); force them false.
    let segs: Vec<u32> = vars.iter().map(|(_, s)| *s).collect();
    for blocks in coincidences(&domains) {
        let nb = blocks.iter().max().map_or(0, |m| m + 1);
        let mut cvars = vec![0u32; nb];
        for (pos, &b) in blocks.iter().enumerate() {
            cvars[b] = segs[pos];
        }
        let args: Vec<Term> = blocks.iter().map(|&b| Term::Var(b as u16)).collect();
        clauses.push(Clause::new(cvars, vec![Literal::new(false, aux, args)]));
    }
    let art = EncodingArtifacts {
        introduced: vec![Introduced { name, kind: IntroducedKind::Aux, weight: w, note: f.to_string() }],
    };
    Ok((clauses, art))
}

/// Set partitions of argument positions into blocks of equal domain, other
/// than the all-singletons one, as block indices per position.
fn coincidences(domains: &[usize]) -> Vec<Vec<usize>> {
    fn go(domains: &[usize], cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let pos = cur.len();
        if pos == domains.len() {
            let nb = cur.iter().max().map_or(0, |m| m + 1);
            if nb < domains.len() {
                out.push(cur.clone());
            }
            return;
        }
        let nb = cur.iter().max().map_or(0, |m| m + 1);
        for b in 0..=nb {
            let fits = b == nb || cur.iter().position(|&x| x == b).is_some_and(|i| domains[i] == domains[pos]);
            if fits {
                cur.push(b);
                go(domains, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(domains, &mut Vec::new(), &mut out);
    out
}

/// Remove duplicate literals, tautologies and duplicate clauses.
pub fn normalize_theory(t: &Theory) -> Theory {
    let mut clauses: Vec<Clause> = t.clauses.iter().filter_map(normalize_clause).collect();
    clauses.sort();
    clauses.dedup();
    t.with_clauses(clauses)
}
