//! Normalization, subsumption and unit propagation to a fixpoint.

use crate::logic::{Cell, Clause, Segment, Term, Theory};

/// Mappings tried per subsumption check before giving up.
const SUBSUME_CAP: u32 = 1000;

#[derive(Clone, Debug)]
pub struct Simplified {
    pub theory: Theory,
    /// Some non-vacuous clause became empty.
    pub contradiction: bool,
    /// Cells fixed by unit propagation, with their truth value.
    pub fixed: Vec<(Cell, bool)>,
}

/// Sort and dedupe literals; `None` for tautologies.
pub fn normalize_clause(c: &Clause) -> Option<Clause> {
    let mut lits = c.lits.clone();
    lits.sort_unstable();
    lits.dedup();
    for w in lits.windows(2) {
        if w[0].pred == w[1].pred && w[0].args == w[1].args && w[0].positive != w[1].positive {
            return None;
        }
    }
    Some(Clause::new(c.vars.clone(), lits))
}

/// Clause cleanup without unit propagation: tautologies, duplicate literals,
/// vacuous clauses, unused variables and duplicate clauses.
pub fn normalize(t: &mut Theory) {
    let segs = &t.segments;
    t.clauses.retain_mut(|c| {
        if c.is_vacuous(segs) {
            return false;
        }
        c.lits.sort_unstable();
        c.lits.dedup();
        if c.lits.windows(2).any(|w| w[0].pred == w[1].pred && w[0].args == w[1].args) {
            return false;
        }
        c.drop_unused_vars();
        true
    });
    t.clauses.sort_unstable();
    t.clauses.dedup();
}

/// Whether some injective, segment-preserving renaming of `small`'s
/// variables maps its literals into `big`'s. `None` when the search cap was hit.
pub fn subsumes(small: &Clause, big: &Clause) -> Option<bool> {
    if small.lits.len() > big.lits.len() || small.vars.len() > big.vars.len() {
        return Some(false);
    }
    for s in small.vars.iter() {
        if small.vars_in(*s) > big.vars_in(*s) {
            return Some(false);
        }
    }
    for l in &small.lits {
        if !big.lits.iter().any(|b| b.pred == l.pred && b.positive == l.positive) {
            return Some(false);
        }
    }
    let mut map = vec![u16::MAX; small.vars.len()];
    let mut used = vec![false; big.vars.len()];
    let mut steps = 0u32;
    let found = match_lits(small, big, 0, &mut map, &mut used, &mut steps);
    if steps > SUBSUME_CAP && !found {
        return None;
    }
    Some(found)
}

fn match_lits(small: &Clause, big: &Clause, i: usize, map: &mut [u16], used: &mut [bool], steps: &mut u32) -> bool {
    if i == small.lits.len() {
        return true;
    }
    let l = &small.lits[i];
    for b in &big.lits {
        *steps += 1;
        if *steps > SUBSUME_CAP {
            return false;
        }
        if b.pred != l.pred || b.positive != l.positive {
            continue;
        }
        let mut bound: Vec<u16> = Vec::new();
        let mut ok = true;
        for (x, y) in l.args.iter().zip(&b.args) {
            match (*x, *y) {
                (Term::Const(a), Term::Const(c)) if a == c => {}
                (Term::Var(v), Term::Var(w)) => {
                    let v = v as usize;
                    if map[v] == u16::MAX {
                        if used[w as usize] || small.vars[v] != big.vars[w as usize] {
                            ok = false;
                            break;
                        }
                        map[v] = w;
                        used[w as usize] = true;
                        bound.push(v as u16);
                    } else if map[v] != w {
                        ok = false;
                        break;
                    }
                }
                _ => {
                    ok = false;
                    break;
                }
            }
        }
        if ok && match_lits(small, big, i + 1, map, used, steps) {
            return true;
        }
        for v in bound {
            used[map[v as usize] as usize] = false;
            map[v as usize] = u16::MAX;
        }
    }
    false
}

/// Drop every clause subsumed by another remaining clause.
pub fn remove_subsumed(clauses: &mut Vec<Clause>) -> bool {
    let n = clauses.len();
    let mut removed = vec![false; n];
    for i in 0..n {
        for j in 0..n {
            if i == j || removed[j] {
                continue;
            }
            if subsumes(&clauses[j], &clauses[i]) == Some(true) {
                removed[i] = true;
                break;
            }
        }
    }
    if !removed.iter().any(|&r| r) {
        return false;
    }
    let mut k = 0;
    clauses.retain(|_| {
        let keep = !removed[k];
        k += 1;
        keep
    });
    true
}

/// Fix the atoms of one unit clause. Returns the cell and sign fixed, or `None`
/// when the theory has no unit clause.
pub fn propagate_one_unit(t: &mut Theory) -> Option<(Cell, bool)> {
    let idx = t.clauses.iter().position(|c| c.is_unit())?;
    let unit = t.clauses.swap_remove(idx);
    let cell = unit.lits[0].cell(&unit.vars);
    let sign = unit.lits[0].positive;
    apply_fixed(&mut t.clauses, &cell, sign);
    Some((cell, sign))
}

/// Remove clauses satisfied by `cell = sign` and falsified literals elsewhere.
pub fn apply_fixed(clauses: &mut Vec<Clause>, cell: &Cell, sign: bool) {
    clauses.retain_mut(|c| {
        let mut satisfied = false;
        let vars = &c.vars;
        c.lits.retain(|l| {
            if !l.in_cell(vars, cell) {
                return true;
            }
            if l.positive == sign {
                satisfied = true;
            }
            false
        });
        !satisfied
    });
}

fn has_contradiction(clauses: &[Clause], segs: &[Segment]) -> bool {
    clauses.iter().any(|c| c.lits.is_empty() && !c.is_vacuous(segs))
}

/// Normalize, remove subsumed clauses and propagate units until nothing
/// changes.
pub fn simplify(t: &Theory) -> Simplified {
    let mut t = t.clone();
    let mut fixed = Vec::new();
    loop {
        normalize(&mut t);
        if has_contradiction(&t.clauses, &t.segments) {
            return Simplified { theory: t.with_clauses(Vec::new()), contradiction: true, fixed };
        }
        let mut propagated = false;
        while let Some(f) = propagate_one_unit(&mut t) {
            fixed.push(f);
            propagated = true;
        }
        if propagated {
            continue;
        }
        if !remove_subsumed(&mut t.clauses) {
            break;
        }
    }
    Simplified { theory: t, contradiction: false, fixed }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{Literal, Predicate, RootDomain, Size, Weight};

    fn base(n: u64) -> (Theory, u32) {
        let mut t = Theory::new(
            vec![RootDomain { name: "d".into(), size: n }],
            vec![
                Predicate { name: "P".into(), domains: vec![0], weight: Weight::unit() },
                Predicate { name: "Q".into(), domains: vec![0], weight: Weight::unit() },
            ],
        );
        let s = t.add_segment(0, Size::Known(n));
        (t, s)
    }

    fn lit(pos: bool, p: u32, v: u16) -> Literal {
        Literal::new(pos, p, vec![Term::Var(v)])
    }

    #[test]
    fn tautology_removed() {
        let c = Clause::new(vec![0], vec![lit(true, 0, 0), lit(false, 0, 0)]);
        assert!(normalize_clause(&c).is_none());
        let c = Clause::new(vec![0, 0], vec![lit(true, 0, 0), lit(false, 0, 1)]);
        assert!(normalize_clause(&c).is_some());
    }

    #[test]
    fn unit_subsumes_superclause() {
        let (mut t, s) = base(3);
        t.clauses.push(Clause::new(vec![s], vec![lit(true, 0, 0), lit(true, 1, 0)]));
        t.clauses.push(Clause::new(vec![s], vec![lit(true, 0, 0)]));
        assert_eq!(subsumes(&t.clauses[1], &t.clauses[0]), Some(true));
        assert_eq!(subsumes(&t.clauses[0], &t.clauses[1]), Some(false));
        remove_subsumed(&mut t.clauses);
        assert_eq!(t.clauses.len(), 1);
        assert!(t.clauses[0].is_unit());
    }

    #[test]
    fn distinct_vars_do_not_subsume_single_var() {
        // P(x) | Q(y) with x != y does not subsume P(x) | Q(x)
        let small = Clause::new(vec![0, 0], vec![lit(true, 0, 0), lit(true, 1, 1)]);
        let big = Clause::new(vec![0], vec![lit(true, 0, 0), lit(true, 1, 0)]);
        assert_eq!(subsumes(&small, &big), Some(false));
    }

    #[test]
    fn contradiction_detected() {
        let (mut t, s) = base(2);
        t.clauses.push(Clause::new(vec![s], vec![lit(true, 0, 0)]));
        t.clauses.push(Clause::new(vec![s], vec![lit(false, 0, 0)]));
        assert!(simplify(&t).contradiction);
    }

    #[test]
    fn vacuous_clause_dropped() {
        let (mut t, s) = base(1);
        t.clauses.push(Clause::new(vec![s, s], vec![lit(true, 0, 0), lit(true, 1, 1)]));
        let r = simplify(&t);
        assert!(!r.contradiction);
        assert!(r.theory.clauses.is_empty());
    }

    #[test]
    fn duplicate_literals_merged() {
        let c = Clause::new(vec![0], vec![lit(true, 0, 0), lit(true, 0, 0)]);
        assert_eq!(normalize_clause(&c).unwrap().lits.len(), 1);
    }
}
