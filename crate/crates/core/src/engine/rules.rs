//! Rewrites applied by the driver. Each function returns `None` when the rule
//! does not apply.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::logic::{Cell, CellArg, Clause, Literal, Part, Predicate, Size, Term, Theory, Weight};

/// Connected components, when there are at least two.
pub fn decompose(t: &Theory) -> Option<Vec<Theory>> {
    let comps = t.connected_components();
    (comps.len() >= 2).then_some(comps)
}

#[derive(Clone, Debug)]
pub struct LiftedDecomposition {
    /// One representative copy.
    pub child: Theory,
    pub seg: u32,
    /// The copies are indexed by unordered pairs of individuals rather than by
    /// single individuals.
    pub pairs: bool,
}

impl LiftedDecomposition {
    /// Number of isomorphic copies.
    pub fn exponent(&self, t: &Theory) -> Option<u64> {
        let n = t.segments[self.seg as usize].size.known()?;
        Some(if self.pairs { n * n.saturating_sub(1) / 2 } else { n })
    }
}

fn subst(l: &Literal, map: &[Option<u32>]) -> Literal {
    Literal {
        positive: l.positive,
        pred: l.pred,
        args: l
            .args
            .iter()
            .map(|&a| match a {
                Term::Var(v) => map[v as usize].map(Term::Const).unwrap_or(a),
                Term::Const(_) => a,
            })
            .collect(),
    }
}

fn substitute(c: &Clause, map: &[Option<u32>]) -> Clause {
    let mut out = Clause::new(c.vars.clone(), c.lits.iter().map(|l| subst(l, map)).collect());
    out.drop_unused_vars();
    out
}

/// A segment every clause quantifies exactly once (or exactly twice) and that
/// every literal mentions, so that grounding it yields independent isomorphic
/// copies.
pub fn lifted_decompose(t: &Theory) -> Option<LiftedDecomposition> {
    if t.clauses.is_empty() {
        return None;
    }
    for seg in t.used_segments() {
        if t.segments[seg as usize].size.is_empty() {
            continue;
        }
        let root = t.segments[seg as usize].root;
        let single = t.clauses.iter().all(|c| {
            c.vars_in(seg) == 1 && {
                let v = c.vars.iter().position(|&s| s == seg).unwrap_or(0) as u16;
                c.lits.iter().all(|l| l.has_var(v))
            }
        });
        if single {
            let mut child = t.empty_like();
            let a = child.fresh_constant(root, "I");
            child.clauses = t
                .clauses
                .iter()
                .map(|c| {
                    let map: Vec<Option<u32>> = c.vars.iter().map(|&s| (s == seg).then_some(a)).collect();
                    substitute(c, &map)
                })
                .collect();
            return Some(LiftedDecomposition { child, seg, pairs: false });
        }
        let pair = t.clauses.iter().all(|c| {
            c.vars_in(seg) == 2 && {
                let vs: Vec<u16> = (0..c.vars.len() as u16).filter(|&v| c.vars[v as usize] == seg).collect();
                c.lits.iter().all(|l| l.has_var(vs[0]) && l.has_var(vs[1]))
            }
        });
        if pair && t.segments[seg as usize].size.at_least(2) {
            let mut child = t.empty_like();
            let a = child.fresh_constant(root, "I");
            let b = child.fresh_constant(root, "I");
            let mut clauses = Vec::new();
            for c in &t.clauses {
                let vs: Vec<usize> = (0..c.vars.len()).filter(|&v| c.vars[v] == seg).collect();
                for (x, y) in [(a, b), (b, a)] {
                    let mut map = vec![None; c.vars.len()];
                    map[vs[0]] = Some(x);
                    map[vs[1]] = Some(y);
                    clauses.push(substitute(c, &map));
                }
            }
            child.clauses = clauses;
            return Some(LiftedDecomposition { child, seg, pairs: true });
        }
    }
    None
}

fn most_frequent(t: &Theory, pick: impl Fn(&Cell) -> bool) -> Option<Cell> {
    let mut counts: BTreeMap<Cell, usize> = BTreeMap::new();
    for c in &t.clauses {
        for cell in c.cells() {
            if pick(&cell) {
                *counts.entry(cell).or_default() += 1;
            }
        }
    }
    let best = counts.values().copied().max()?;
    counts.into_iter().find(|(_, n)| *n == best).map(|(c, _)| c)
}

/// The ground atom occurring most often (ties broken by cell order).
pub fn pick_ground_atom(t: &Theory) -> Option<Cell> {
    most_frequent(t, |c| c.var_slots() == 0)
}

/// Most frequent cell with exactly one logical variable, and its segment.
pub fn pick_unary_cell(t: &Theory) -> Option<(Cell, u32)> {
    let cell = most_frequent(t, |c| c.var_slots() == 1)?;
    let seg = cell.args.iter().find_map(|a| match *a {
        CellArg::Var { seg, .. } => Some(seg),
        CellArg::Const(_) => None,
    })?;
    Some((cell, seg))
}

/// Unit clause asserting `sign` for every atom of `cell`, with its variable
/// typed by `seg`.
fn unit_over(cell: &Cell, seg: Option<u32>, sign: bool) -> Clause {
    let args: Vec<Term> = cell
        .args
        .iter()
        .map(|a| match *a {
            CellArg::Const(k) => Term::Const(k),
            CellArg::Var { slot, .. } => Term::Var(slot as u16),
        })
        .collect();
    let vars = seg.map(|s| vec![s]).unwrap_or_default();
    Clause::new(vars, vec![Literal::new(sign, cell.pred, args)])
}

/// The two branches of case analysis on a ground atom.
pub fn case_analysis(t: &Theory, atom: &Cell) -> (Theory, Theory) {
    let mut pos = t.clone();
    pos.clauses.push(unit_over(atom, None, true));
    let mut neg = t.clone();
    neg.clauses.push(unit_over(atom, None, false));
    (pos, neg)
}

/// Branch of lifted case analysis where `cell`'s segment `seg` has been split
/// into `t_seg` (atoms true) and `f_seg` (atoms false).
pub fn lifted_case_branch(t: &Theory, cell: &Cell, seg: u32, t_seg: u32, f_seg: u32) -> Theory {
    let mut b = t.clone();
    b.segments[seg as usize].split = Some(vec![Part::Seg(t_seg), Part::Seg(f_seg)]);
    b.shatter();
    b.clauses.push(unit_over(cell, Some(t_seg), true));
    b.clauses.push(unit_over(cell, Some(f_seg), false));
    b
}

/// Branch `k` of lifted case analysis: exactly `k` individuals of the
/// segment make the atom true.
pub fn lifted_case_split(t: &Theory, cell: &Cell, seg: u32, k: u64) -> Result<Theory> {
    let mut b = t.clone();
    let (ts, fs) = b.split_segment(seg, k)?;
    Ok(lifted_case_branch(&b, cell, seg, ts, fs))
}

/// All branches of lifted case analysis share one shattered structure; only
/// the sizes of the two parts differ. Returns that structure with both parts
/// non-empty, or `None` when the segment has fewer than two individuals.
pub fn lifted_case_template(t: &Theory, cell: &Cell, seg: u32) -> Result<Option<(Theory, u32, u32)>> {
    let n = t.segments[seg as usize].size.known().ok_or(Error::SymbolicSize)?;
    if n < 2 {
        return Ok(None);
    }
    let mut b = t.clone();
    let (ts, fs) = b.split_segment(seg, 1)?;
    Ok(Some((lifted_case_branch(&b, cell, seg, ts, fs), ts, fs)))
}

/// Branch `k` of a template from [`lifted_case_template`].
pub fn instantiate_branch(template: &Theory, t_seg: u32, f_seg: u32, n: u64, k: u64) -> Theory {
    let mut b = template.clone();
    b.segments[t_seg as usize].size = Size::Known(k);
    b.segments[f_seg as usize].size = Size::Known(n - k);
    b
}

/// Factor `∀X: G1 ∨ G2` where `G1` and `G2` share only the variables `X` and
/// their private variables live in different segments, using two fresh
/// predicates over `X`.
pub fn reused_var_rewrite(t: &Theory) -> Option<Theory> {
    for (ci, c) in t.clauses.iter().enumerate() {
        if let Some(new) = rewrite_clause(t, c) {
            let mut out = t.clone();
            out.clauses.remove(ci);
            let (clauses, preds) = new;
            let mut ids = Vec::new();
            for p in preds {
                ids.push(out.add_predicate(p));
            }
            for mut cl in clauses {
                for l in &mut cl.lits {
                    if l.pred >= u32::MAX - 1 {
                        l.pred = ids[(u32::MAX - l.pred) as usize];
                    }
                }
                out.clauses.push(cl);
            }
            return Some(out);
        }
    }
    None
}

/// Placeholder predicate ids for the fresh predicates: A = MAX, B = MAX - 1.
fn rewrite_clause(t: &Theory, c: &Clause) -> Option<(Vec<Clause>, Vec<Predicate>)> {
    if c.lits.len() < 2 {
        return None;
    }
    let nv = c.vars.len();
    let shared: Vec<u16> = (0..nv as u16).filter(|&v| c.lits.iter().all(|l| l.has_var(v))).collect();
    let private = |l: &Literal| -> Vec<u16> { l.vars().filter(|v| !shared.contains(v)).collect() };
    // union literals that share a private variable
    let n = c.lits.len();
    let mut comp: Vec<usize> = (0..n).collect();
    for v in 0..nv as u16 {
        if shared.contains(&v) {
            continue;
        }
        let holders: Vec<usize> = (0..n).filter(|&i| c.lits[i].has_var(v)).collect();
        for w in holders.windows(2) {
            let (a, b) = (comp[w[0]], comp[w[1]]);
            for x in comp.iter_mut() {
                if *x == b {
                    *x = a;
                }
            }
        }
    }
    let first = (0..n).find(|&i| !private(&c.lits[i]).is_empty())?;
    let g1: Vec<usize> = (0..n).filter(|&i| comp[i] == comp[first]).collect();
    let g2: Vec<usize> = (0..n).filter(|&i| comp[i] != comp[first]).collect();
    let segs_of = |g: &[usize]| -> Vec<u32> {
        let mut s: Vec<u32> = g.iter().flat_map(|&i| private(&c.lits[i])).map(|v| c.vars[v as usize]).collect();
        s.sort_unstable();
        s.dedup();
        s
    };
    let (s1, s2) = (segs_of(&g1), segs_of(&g2));
    if s2.is_empty() || s1.iter().any(|s| s2.contains(s)) {
        return None;
    }
    let domains: Vec<usize> = shared.iter().map(|&v| t.segments[c.vars[v as usize] as usize].root).collect();
    let x_args: Vec<Term> = shared.iter().map(|&v| Term::Var(v)).collect();
    let a = |sign| Literal::new(sign, u32::MAX, x_args.clone());
    let b = |sign| Literal::new(sign, u32::MAX - 1, x_args.clone());
    let lits_of = |g: &[usize]| -> Vec<Literal> { g.iter().map(|&i| c.lits[i].clone()).collect() };
    let mk = |mut lits: Vec<Literal>, extra: Literal| {
        lits.push(extra);
        let mut cl = Clause::new(c.vars.clone(), lits);
        cl.drop_unused_vars();
        cl
    };
    let clauses = vec![
        mk(lits_of(&g1), a(false)),
        mk(lits_of(&g2), a(true)),
        mk(vec![b(true)], a(true)),
        mk(lits_of(&g2), b(true)),
    ];
    let idx = t.preds.len();
    let preds = vec![
        Predicate { name: format!("_A{idx}"), domains: domains.clone(), weight: Weight::ints(1, 1) },
        Predicate { name: format!("_B{}", idx + 1), domains, weight: Weight::ints(1, -1) },
    ];
    Some((clauses, preds))
}

/// Make one individual of `seg` explicit: the segment becomes a fresh constant
/// plus a segment one smaller, and every clause is shattered accordingly.
pub fn domain_recursion(t: &Theory, seg: u32) -> Result<Theory> {
    let s = &t.segments[seg as usize];
    let n = match s.size {
        Size::Known(0) => return Err(Error::EmptySegment),
        Size::Known(n) => n,
        Size::Symbolic(_) => return Err(Error::SymbolicSize),
    };
    let root = s.root;
    let mut out = t.clone();
    let k = out.fresh_constant(root, "N");
    let rest = out.add_segment(root, Size::Known(n - 1));
    out.refine(seg, vec![Part::Const(k), Part::Seg(rest)]);
    Ok(out)
}

/// Replace `seg` by explicit constants.
pub fn ground_segment(t: &Theory, seg: u32) -> Result<Theory> {
    let s = &t.segments[seg as usize];
    let n = s.size.known().ok_or(Error::SymbolicSize)?;
    let root = s.root;
    let mut out = t.clone();
    let parts = (0..n).map(|_| Part::Const(out.fresh_constant(root, "G"))).collect();
    out.refine(seg, parts);
    Ok(out)
}
