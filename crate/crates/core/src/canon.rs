//! Canonical keys for theories.
//!
//! Segments, constants and predicates are ordered by colour refinement on their
//! occurrences. Blocks of objects that stay tied are permuted exhaustively when
//! small, otherwise kept in index order; either way the key is a complete
//! serialization of the theory under some renaming, so equal keys always mean
//! isomorphic theories. Missing a symmetry only costs cache hits.

use std::hash::{Hash, Hasher};

use num_bigint::Sign;
use num_traits::Signed;
use rustc_hash::FxHasher;
use smallvec::SmallVec;

use crate::logic::{Rational, Size, Term, Theory};

/// Orderings tried when colour refinement leaves ties.
const TIE_ORDER_CAP: usize = 48;
/// Variable orderings tried per clause.
const VAR_PERM_CAP: usize = 144;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalKey(Box<[u32]>);

impl CanonicalKey {
    pub fn words(&self) -> &[u32] {
        &self.0
    }

    /// Little-endian byte serialization of the key.
    pub fn to_bytes(&self) -> Vec<u8> {
        self.0.iter().flat_map(|w| w.to_le_bytes()).collect()
    }
}

/// Key including segment sizes and weights.
pub fn canonical_key(t: &Theory) -> CanonicalKey {
    key_with(t, true)
}

/// Key with segment sizes erased.
pub fn shape_key(t: &Theory) -> CanonicalKey {
    key_with(t, false)
}

fn h<T: Hash>(x: T) -> u64 {
    let mut s = FxHasher::default();
    x.hash(&mut s);
    s.finish()
}

struct Local {
    segs: Vec<u32>,
    consts: Vec<u32>,
    preds: Vec<u32>,
    seg_of: Vec<usize>,
    const_of: Vec<usize>,
    pred_of: Vec<usize>,
}

fn positions(ids: &[u32], len: usize) -> Vec<usize> {
    let mut out = vec![usize::MAX; len];
    for (i, &x) in ids.iter().enumerate() {
        out[x as usize] = i;
    }
    out
}

fn index_objects(t: &Theory) -> Local {
    let segs = t.used_segments();
    let consts = t.used_constants();
    let mut preds: Vec<u32> = t.clauses.iter().flat_map(|c| c.lits.iter().map(|l| l.pred)).collect();
    preds.sort_unstable();
    preds.dedup();
    let seg_of = positions(&segs, t.segments.len());
    let const_of = positions(&consts, t.constants.len());
    let pred_of = positions(&preds, t.preds.len());
    Local { segs, consts, preds, seg_of, const_of, pred_of }
}

fn weight_words(r: &Rational, out: &mut Vec<u32>) {
    let num = r.numer();
    out.push(match num.sign() {
        Sign::Minus => 2,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    });
    let nd = num.abs().to_u32_digits().1;
    out.push(nd.len() as u32);
    out.extend(nd);
    let dd = r.denom().to_u32_digits().1;
    out.push(dd.len() as u32);
    out.extend(dd);
}

fn size_words(s: Size, out: &mut Vec<u32>) {
    match s {
        Size::Known(n) => {
            out.push(0);
            out.push((n >> 32) as u32);
            out.push(n as u32);
        }
        Size::Symbolic(i) => {
            out.push(1);
            out.push(i);
        }
    }
}

/// Colour refinement over segments, constants and predicates.
fn refine_colors(t: &Theory, loc: &Local, sizes: bool) -> (Vec<u64>, Vec<u64>, Vec<u64>) {
    let mut seg_c: Vec<u64> = loc
        .segs
        .iter()
        .map(|&s| if sizes { h(("s", t.segments[s as usize].size)) } else { h("s") })
        .collect();
    let mut const_c: Vec<u64> = vec![h("k"); loc.consts.len()];
    let mut pred_c: Vec<u64> = loc
        .preds
        .iter()
        .map(|&p| {
            let pr = &t.preds[p as usize];
            h(("p", pr.arity(), &pr.weight.pos, &pr.weight.neg))
        })
        .collect();
    let count = |v: &[u64]| {
        let mut w = v.to_vec();
        w.sort_unstable();
        w.dedup();
        w.len()
    };
    let mut classes = count(&seg_c) + count(&const_c) + count(&pred_c);
    let total = seg_c.len() + const_c.len() + pred_c.len();
    for _ in 0..=total {
        let mut seg_occ: Vec<Vec<u64>> = vec![Vec::new(); seg_c.len()];
        let mut const_occ: Vec<Vec<u64>> = vec![Vec::new(); const_c.len()];
        let mut pred_occ: Vec<Vec<u64>> = vec![Vec::new(); pred_c.len()];
        for c in &t.clauses {
            // a variable is described by its segment and where it occurs
            let mut var_prof: Vec<Vec<u64>> = vec![Vec::new(); c.vars.len()];
            for l in &c.lits {
                let pc = pred_c[loc.pred_of[l.pred as usize]];
                for (i, a) in l.args.iter().enumerate() {
                    if let Term::Var(v) = a {
                        var_prof[*v as usize].push(h((pc, l.positive, i)));
                    }
                }
            }
            let var_c: Vec<u64> = var_prof
                .iter_mut()
                .enumerate()
                .map(|(v, p)| {
                    p.sort_unstable();
                    h((seg_c[loc.seg_of[c.vars[v] as usize]], &*p))
                })
                .collect();
            let lit_c: Vec<u64> = c
                .lits
                .iter()
                .map(|l| {
                    let args: Vec<u64> = l
                        .args
                        .iter()
                        .map(|a| match *a {
                            Term::Var(v) => var_c[v as usize],
                            Term::Const(k) => h(("c", const_c[loc.const_of[k as usize]])),
                        })
                        .collect();
                    h((l.positive, pred_c[loc.pred_of[l.pred as usize]], args))
                })
                .collect();
            let mut sorted = lit_c.clone();
            sorted.sort_unstable();
            let cc = h(&sorted);
            for (l, &lc) in c.lits.iter().zip(&lit_c) {
                pred_occ[loc.pred_of[l.pred as usize]].push(h((cc, lc)));
                for (i, a) in l.args.iter().enumerate() {
                    match *a {
                        Term::Var(v) => seg_occ[loc.seg_of[c.vars[v as usize] as usize]].push(h((cc, lc, i))),
                        Term::Const(k) => const_occ[loc.const_of[k as usize]].push(h((cc, lc, i))),
                    }
                }
            }
        }
        let update = |cols: &mut Vec<u64>, occ: &mut Vec<Vec<u64>>| {
            for (c, o) in cols.iter_mut().zip(occ.iter_mut()) {
                o.sort_unstable();
                *c = h((*c, &*o));
            }
        };
        update(&mut seg_c, &mut seg_occ);
        update(&mut const_c, &mut const_occ);
        update(&mut pred_c, &mut pred_occ);
        let next = count(&seg_c) + count(&const_c) + count(&pred_c);
        if next == classes {
            break;
        }
        classes = next;
    }
    (seg_c, const_c, pred_c)
}

/// Candidate orderings of objects: sorted by colour, tied blocks permuted when
/// the total number of combinations stays under `cap`.
fn orderings(colors: &[u64], cap: usize) -> Vec<Vec<usize>> {
    let mut idx: Vec<usize> = (0..colors.len()).collect();
    idx.sort_by_key(|&i| (colors[i], i));
    let mut blocks: Vec<(usize, usize)> = Vec::new();
    let mut i = 0;
    while i < idx.len() {
        let mut j = i + 1;
        while j < idx.len() && colors[idx[j]] == colors[idx[i]] {
            j += 1;
        }
        if j - i > 1 {
            blocks.push((i, j));
        }
        i = j;
    }
    let mut combos: usize = 1;
    for &(a, b) in &blocks {
        combos = combos.saturating_mul(factorial(b - a));
    }
    if blocks.is_empty() || combos > cap {
        return vec![idx];
    }
    let mut out = vec![idx];
    for &(a, b) in &blocks {
        let mut next = Vec::new();
        for base in &out {
            for p in permutations(&base[a..b]) {
                let mut o = base.clone();
                o[a..b].copy_from_slice(&p);
                next.push(o);
            }
        }
        out = next;
    }
    out
}

fn factorial(n: usize) -> usize {
    (1..=n).fold(1usize, |a, b| a.saturating_mul(b))
}

pub(crate) fn permutations<T: Copy>(items: &[T]) -> Vec<Vec<T>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let x = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, x);
            out.push(p);
        }
    }
    out
}

fn encode_clause(c: &crate::logic::Clause, seg_ord: &[u32], const_ord: &[u32], pred_ord: &[u32], loc: &Local) -> Vec<u32> {
    let n = c.vars.len();
    let var_seg: Vec<u32> = c.vars.iter().map(|s| seg_ord[loc.seg_of[*s as usize]]).collect();
    let mut base: Vec<usize> = (0..n).collect();
    base.sort_by_key(|&v| (var_seg[v], v));
    let mut groups: Vec<(usize, usize)> = Vec::new();
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        while j < n && var_seg[base[j]] == var_seg[base[i]] {
            j += 1;
        }
        if j - i > 1 {
            groups.push((i, j));
        }
        i = j;
    }
    let combos = groups.iter().fold(1usize, |a, &(x, y)| a.saturating_mul(factorial(y - x)));
    let mut orders = vec![base];
    if combos <= VAR_PERM_CAP {
        for &(a, b) in &groups {
            let mut next = Vec::new();
            for o in &orders {
                for p in permutations(&o[a..b]) {
                    let mut q = o.clone();
                    q[a..b].copy_from_slice(&p);
                    next.push(q);
                }
            }
            orders = next;
        }
    }
    let mut best: Option<Vec<u32>> = None;
    let mut new_of = vec![0u32; n];
    for order in &orders {
        for (pos, &v) in order.iter().enumerate() {
            new_of[v] = pos as u32;
        }
        let mut lits: SmallVec<[SmallVec<[u32; 4]>; 4]> = c
            .lits
            .iter()
            .map(|l| {
                let mut w = SmallVec::new();
                w.push((pred_ord[loc.pred_of[l.pred as usize]] << 1) | l.positive as u32);
                for a in &l.args {
                    w.push(match *a {
                        Term::Var(v) => new_of[v as usize],
                        Term::Const(k) => 0x8000_0000 | const_ord[loc.const_of[k as usize]],
                    });
                }
                w
            })
            .collect();
        lits.sort_unstable();
        let mut enc = Vec::with_capacity(2 + n + lits.len() * 3);
        enc.push(n as u32);
        enc.extend(order.iter().map(|&v| var_seg[v]));
        enc.push(lits.len() as u32);
        for l in lits {
            enc.extend(l);
        }
        if best.as_ref().is_none_or(|b| enc < *b) {
            best = Some(enc);
        }
    }
    best.unwrap_or_default()
}

fn key_with(t: &Theory, sizes: bool) -> CanonicalKey {
    let loc = index_objects(t);
    let (sc, kc, pc) = refine_colors(t, &loc, sizes);
    let seg_orders = orderings(&sc, TIE_ORDER_CAP);
    let const_orders = orderings(&kc, TIE_ORDER_CAP);
    let pred_orders = orderings(&pc, TIE_ORDER_CAP);
    let budget = seg_orders.len() * const_orders.len() * pred_orders.len();
    let (seg_orders, const_orders, pred_orders) = if budget > TIE_ORDER_CAP {
        (vec![seg_orders[0].clone()], vec![const_orders[0].clone()], vec![pred_orders[0].clone()])
    } else {
        (seg_orders, const_orders, pred_orders)
    };
    let invert = |order: &[usize]| {
        let mut inv = vec![0u32; order.len()];
        for (pos, &i) in order.iter().enumerate() {
            inv[i] = pos as u32;
        }
        inv
    };
    let mut best: Option<Vec<u32>> = None;
    for so in &seg_orders {
        let seg_ord = invert(so);
        for ko in &const_orders {
            let const_ord = invert(ko);
            for po in &pred_orders {
                let pred_ord = invert(po);
                let mut out = Vec::new();
                out.push(so.len() as u32);
                for &i in so {
                    if sizes {
                        size_words(t.segments[loc.segs[i] as usize].size, &mut out);
                    }
                }
                out.push(ko.len() as u32);
                out.push(po.len() as u32);
                for &i in po {
                    let p = &t.preds[loc.preds[i] as usize];
                    out.push(p.arity() as u32);
                    weight_words(&p.weight.pos, &mut out);
                    weight_words(&p.weight.neg, &mut out);
                }
                let mut clauses: Vec<Vec<u32>> =
                    t.clauses.iter().map(|c| encode_clause(c, &seg_ord, &const_ord, &pred_ord, &loc)).collect();
                clauses.sort_unstable();
                clauses.dedup();
                out.push(clauses.len() as u32);
                for c in clauses {
                    out.extend(c);
                }
                if best.as_ref().is_none_or(|b| out < *b) {
                    best = Some(out);
                }
            }
        }
    }
    CanonicalKey(best.unwrap_or_default().into_boxed_slice())
}
