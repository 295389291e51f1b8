//! Brute-force weighted model counting over a full propositional grounding.
//!
//! Every root domain is instantiated with its declared number of individuals:
//! the constants used by the theory first, then one block per segment, then
//! anonymous individuals that no clause mentions. Variables typed with the same
//! segment are instantiated injectively.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::engine::Value;
use crate::error::{Error, Result};
use crate::logic::{Clause, Term, Theory};

pub const DEFAULT_LIMIT: u64 = 26;

/// Assignments evaluated per parallel work item.
const BLOCK_BITS: u32 = 14;

/// A clause `∀ū ∃v: C(ū, v)`; `var` is the existential variable of `clause`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExistentialClause {
    pub clause: Clause,
    pub var: u16,
}

#[derive(Clone, Debug)]
pub struct GroundTheory {
    /// Predicate of each ground atom.
    pub atom_pred: Vec<u32>,
    /// Each clause as (atoms occurring positively, atoms occurring negatively).
    pub clauses: Vec<(u64, u64)>,
    /// Some clause has no satisfying assignment at all.
    pub unsat: bool,
    pub weights: Vec<(BigRational, BigRational)>,
}

impl GroundTheory {
    pub fn atom_count(&self) -> usize {
        self.atom_pred.len()
    }
}

pub fn ground_theory(t: &Theory, limit: u64) -> Result<GroundTheory> {
    ground_theory_with(t, &[], limit)
}

/// Ground `t` together with existential sentences.
pub fn ground_theory_with(t: &Theory, exists: &[ExistentialClause], limit: u64) -> Result<GroundTheory> {
    let atoms: u64 = t.declared_counts().iter().sum();
    if atoms > limit.min(63) {
        return Err(Error::OracleLimit { atoms, limit });
    }
    // individuals per root: constants, then segment blocks
    let mut const_id = vec![u64::MAX; t.constants.len()];
    let mut seg_range = vec![(0u64, 0u64); t.segments.len()];
    let mut next = vec![0u64; t.domains.len()];
    let mut used_consts = t.used_constants();
    let mut used_segs = t.used_segments();
    for e in exists {
        for l in &e.clause.lits {
            for a in &l.args {
                if let Term::Const(k) = a {
                    used_consts.push(*k);
                }
            }
        }
        used_segs.extend(e.clause.vars.iter().copied());
    }
    used_consts.sort_unstable();
    used_consts.dedup();
    used_segs.sort_unstable();
    used_segs.dedup();
    for &k in &used_consts {
        let r = t.constants[k as usize].root;
        const_id[k as usize] = next[r];
        next[r] += 1;
    }
    for &s in &used_segs {
        let seg = &t.segments[s as usize];
        let n = seg.size.known().ok_or(Error::SymbolicSize)?;
        seg_range[s as usize] = (next[seg.root], n);
        next[seg.root] += n;
    }
    for (r, d) in t.domains.iter().enumerate() {
        if next[r] > d.size {
            return Err(Error::Invalid(format!(
                "domain {} holds {} individuals but the theory uses {}",
                d.name, d.size, next[r]
            )));
        }
    }
    // atom indexing: predicate-major, row-major over root individuals
    let mut pred_base = Vec::with_capacity(t.preds.len());
    let mut atom_pred = Vec::new();
    for (p, pred) in t.preds.iter().enumerate() {
        pred_base.push(atom_pred.len() as u64);
        let n: u64 = pred.domains.iter().map(|&d| t.domains[d].size).product();
        atom_pred.extend(std::iter::repeat_n(p as u32, n as usize));
    }
    let atom_index = |pred: u32, ids: &[u64]| -> u64 {
        let p = &t.preds[pred as usize];
        let mut idx = 0u64;
        for (i, &d) in p.domains.iter().enumerate() {
            idx = idx * t.domains[d].size + ids[i];
        }
        pred_base[pred as usize] + idx
    };
    let mut g = GroundTheory {
        atom_pred,
        clauses: Vec::new(),
        unsat: false,
        weights: t.preds.iter().map(|p| (p.weight.pos.clone(), p.weight.neg.clone())).collect(),
    };
    let instance = |c: &Clause, assign: &[u64]| -> (u64, u64, bool) {
        let (mut pos, mut neg) = (0u64, 0u64);
        for l in &c.lits {
            let ids: Vec<u64> = l
                .args
                .iter()
                .map(|a| match *a {
                    Term::Var(v) => assign[v as usize],
                    Term::Const(k) => const_id[k as usize],
                })
                .collect();
            let bit = 1u64 << atom_index(l.pred, &ids);
            if l.positive {
                pos |= bit;
            } else {
                neg |= bit;
            }
        }
        (pos, neg, pos & neg != 0)
    };
    for c in &t.clauses {
        for assign in assignments(&c.vars, &seg_range) {
            let (pos, neg, taut) = instance(c, &assign);
            if taut {
                continue;
            }
            if pos == 0 && neg == 0 {
                g.unsat = true;
            }
            g.clauses.push((pos, neg));
        }
    }
    for e in exists {
        let c = &e.clause;
        let outer: Vec<u32> =
            c.vars.iter().enumerate().map(|(i, &s)| if i == e.var as usize { u32::MAX } else { s }).collect();
        for assign in assignments(&outer, &seg_range) {
            let (mut pos, mut neg, mut taut) = (0u64, 0u64, false);
            let (start, n) = seg_range[c.vars[e.var as usize] as usize];
            for v in start..start + n {
                let same_seg_clash = c
                    .vars
                    .iter()
                    .enumerate()
                    .any(|(i, &s)| i != e.var as usize && s == c.vars[e.var as usize] && assign[i] == v);
                if same_seg_clash {
                    continue;
                }
                let mut full = assign.clone();
                full[e.var as usize] = v;
                let (p, q, t2) = instance(c, &full);
                pos |= p;
                neg |= q;
                taut |= t2;
            }
            if taut || pos & neg != 0 {
                continue;
            }
            if pos == 0 && neg == 0 {
                g.unsat = true;
            }
            g.clauses.push((pos, neg));
        }
    }
    g.clauses.sort_unstable();
    g.clauses.dedup();
    Ok(g)
}

/// Injective-per-segment assignments of individuals to variables. Variables
/// typed `u32::MAX` are left at 0.
fn assignments(vars: &[u32], seg_range: &[(u64, u64)]) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    let mut cur = vec![0u64; vars.len()];
    fn rec(i: usize, vars: &[u32], seg_range: &[(u64, u64)], cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if i == vars.len() {
            out.push(cur.clone());
            return;
        }
        if vars[i] == u32::MAX {
            rec(i + 1, vars, seg_range, cur, out);
            return;
        }
        let (start, n) = seg_range[vars[i] as usize];
        for v in start..start + n {
            if (0..i).any(|j| vars[j] == vars[i] && cur[j] == v) {
                continue;
            }
            cur[i] = v;
            rec(i + 1, vars, seg_range, cur, out);
        }
    }
    rec(0, vars, seg_range, &mut cur, &mut out);
    out
}

type Histogram = HashMap<Vec<u16>, u64>;

fn count_block(g: &GroundTheory, masks: &[u64], lo: u64, hi: u64) -> Histogram {
    let mut hist = Histogram::new();
    'next: for a in lo..hi {
        for &(pos, neg) in &g.clauses {
            if a & pos == 0 && !a & neg == 0 {
                continue 'next;
            }
        }
        let key: Vec<u16> = masks.iter().map(|m| (a & m).count_ones() as u16).collect();
        *hist.entry(key).or_default() += 1;
    }
    hist
}

fn merge(mut a: Histogram, b: Histogram) -> Histogram {
    for (k, v) in b {
        *a.entry(k).or_default() += v;
    }
    a
}

/// Number of satisfying assignments grouped by the number of true atoms of
/// each predicate. Blocks of assignments run on the rayon pool when
/// `parallel` is set and the feature is enabled.
fn histogram(g: &GroundTheory, parallel: bool) -> Histogram {
    let n = g.atom_count() as u32;
    let mut masks = vec![0u64; g.weights.len()];
    for (i, &p) in g.atom_pred.iter().enumerate() {
        masks[p as usize] |= 1 << i;
    }
    if g.unsat {
        return Histogram::new();
    }
    let total = 1u64 << n;
    if n <= BLOCK_BITS {
        return count_block(g, &masks, 0, total);
    }
    let blocks = 1u64 << (n - BLOCK_BITS);
    let size = 1u64 << BLOCK_BITS;
    #[cfg(feature = "parallel")]
    if parallel {
        use rayon::prelude::*;
        return (0..blocks)
            .into_par_iter()
            .map(|b| count_block(g, &masks, b * size, (b + 1) * size))
            .reduce(Histogram::new, merge);
    }
    #[cfg(not(feature = "parallel"))]
    let _ = parallel;
    (0..blocks).map(|b| count_block(g, &masks, b * size, (b + 1) * size)).fold(Histogram::new(), merge)
}

/// Exact weighted model count of a ground theory.
pub fn brute_force_wfomc(g: &GroundTheory) -> BigRational {
    brute_force_value(g)
}

/// Exact weighted model count on the calling thread only.
pub fn brute_force_sequential(g: &GroundTheory) -> BigRational {
    brute_force_impl(g, false)
}

pub fn brute_force_value<V: Value>(g: &GroundTheory) -> V {
    brute_force_impl(g, true)
}

fn brute_force_impl<V: Value>(g: &GroundTheory, parallel: bool) -> V {
    let mut totals = vec![0u64; g.weights.len()];
    for &p in &g.atom_pred {
        totals[p as usize] += 1;
    }
    let mut sum = V::zero();
    for (key, count) in histogram(g, parallel) {
        let mut w = V::from_rational(&BigRational::from_integer(BigInt::from(count)));
        for (p, &k) in key.iter().enumerate() {
            let (pos, neg) = &g.weights[p];
            w = w.mul(&V::from_rational(pos).pow(k as u64));
            w = w.mul(&V::from_rational(neg).pow(totals[p] - k as u64));
        }
        sum = sum.add(&w);
    }
    sum
}

/// Ground and count in one step.
pub fn oracle_wfomc(t: &Theory, limit: u64) -> Result<BigRational> {
    Ok(brute_force_wfomc(&ground_theory(t, limit)?))
}

/// Ground and count a theory with existential sentences.
pub fn oracle_wfomc_with(t: &Theory, exists: &[ExistentialClause], limit: u64) -> Result<BigRational> {
    Ok(brute_force_wfomc(&ground_theory_with(t, exists, limit)?))
}

/// Number of models (all weights one).
pub fn model_count(t: &Theory, limit: u64) -> Result<u64> {
    let g = ground_theory(t, limit)?;
    Ok(histogram(&g, true).values().sum())
}
