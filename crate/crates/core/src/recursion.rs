//! Domain recursion: make one individual explicit and check, by a bounded
//! exploration with the lifted rules, that the theory comes back at a smaller
//! size.

use std::collections::HashSet;

use crate::canon::{canonical_key, shape_key, CanonicalKey};
use crate::engine::rules;
use crate::engine::simplify::simplify;
use crate::error::Result;
use crate::logic::{Size, Theory};

pub use crate::engine::rules::domain_recursion;

/// Segment counts above which zeroed variants of an ancestor are not
/// enumerated.
const VARIANT_SEGMENT_CAP: usize = 5;

/// Shapes of the theories domain recursion was applied to on the current path,
/// with the total size they had.
#[derive(Clone, Debug, Default)]
pub struct RecursionGuard {
    entries: Vec<(CanonicalKey, u64)>,
}

impl RecursionGuard {
    /// Record `t` together with the variants obtained by emptying some of its
    /// segments. Returns a mark for [`RecursionGuard::truncate`].
    pub fn push(&mut self, t: &Theory) -> usize {
        let mark = self.entries.len();
        let size = t.total_size();
        self.entries.push((shape_key(t), size));
        let segs = t.used_segments();
        if segs.len() > 1 && segs.len() <= VARIANT_SEGMENT_CAP {
            for mask in 1..(1u32 << segs.len()) - 1 {
                let mut v = t.clone();
                for (i, &s) in segs.iter().enumerate() {
                    if mask & (1 << i) != 0 {
                        v.segments[s as usize].size = Size::Known(0);
                    }
                }
                let mut s = simplify(&v).theory;
                if s.clauses.is_empty() {
                    continue;
                }
                s.compact();
                self.entries.push((shape_key(&s), size));
            }
        }
        mark
    }

    pub fn truncate(&mut self, mark: usize) {
        self.entries.truncate(mark);
    }

    /// Whether a theory of this shape and total size recurs on a recorded
    /// ancestor at strictly smaller size.
    pub fn recurs(&self, shape: &CanonicalKey, size: u64) -> bool {
        self.entries.iter().any(|(k, s)| size < *s && k == shape)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Probe {
    Accept,
    Reject,
}

/// Explore `child` (the result of domain recursion) with the lifted rules for
/// at most `budget` nodes. Accepts when every leaf is closed: empty,
/// contradictory, already cached, or a recurrence recorded in `guard`.
///
/// Accepted explorations are remembered by shape, rejected ones by full key.
pub fn probe_candidate(
    child: &Theory,
    budget: u64,
    guard: &RecursionGuard,
    accepted: &mut HashSet<CanonicalKey>,
    rejected: &mut HashSet<CanonicalKey>,
    is_cached: &dyn Fn(&CanonicalKey) -> bool,
) -> Probe {
    let mut c = child.clone();
    c.compact();
    let shape = shape_key(&c);
    if accepted.contains(&shape) {
        return Probe::Accept;
    }
    let key = canonical_key(&c);
    if rejected.contains(&key) {
        return Probe::Reject;
    }
    let mut explorer = Explorer { budget, nodes: 0, guard, is_cached, closed: HashSet::new() };
    if explorer.closes(c) {
        accepted.insert(shape);
        Probe::Accept
    } else {
        rejected.insert(key);
        Probe::Reject
    }
}

/// Convenience wrapper: apply domain recursion on `seg` and probe the result
/// with a fresh guard holding only `t`.
pub fn probe_segment(t: &Theory, seg: u32, budget: u64) -> Result<Probe> {
    let child = domain_recursion(t, seg)?;
    let mut guard = RecursionGuard::default();
    guard.push(t);
    Ok(probe_candidate(&child, budget, &guard, &mut HashSet::new(), &mut HashSet::new(), &|_| false))
}

struct Explorer<'a> {
    budget: u64,
    nodes: u64,
    guard: &'a RecursionGuard,
    is_cached: &'a dyn Fn(&CanonicalKey) -> bool,
    closed: HashSet<CanonicalKey>,
}

impl Explorer<'_> {
    fn closes(&mut self, t: Theory) -> bool {
        self.nodes += 1;
        if self.nodes > self.budget {
            return false;
        }
        let s = simplify(&t);
        if s.contradiction {
            return true;
        }
        let mut t = s.theory;
        if t.clauses.is_empty() {
            return true;
        }
        t.compact();
        let key = canonical_key(&t);
        if self.closed.contains(&key) || (self.is_cached)(&key) {
            return true;
        }
        if self.guard.recurs(&shape_key(&t), t.total_size()) {
            return true;
        }
        let ok = self.expand(&t);
        if ok {
            self.closed.insert(key);
        }
        ok
    }

    fn expand(&mut self, t: &Theory) -> bool {
        if let Some(comps) = rules::decompose(t) {
            return comps.into_iter().all(|c| self.closes(c));
        }
        if let Some(ld) = rules::lifted_decompose(t) {
            return self.closes(ld.child);
        }
        if let Some(atom) = rules::pick_ground_atom(t) {
            let (a, b) = rules::case_analysis(t, &atom);
            return self.closes(a) && self.closes(b);
        }
        if let Some((cell, seg)) = rules::pick_unary_cell(t) {
            let Some(n) = t.segments[seg as usize].size.known() else { return false };
            let ks: Vec<u64> = if n < 2 { (0..=n).collect() } else { vec![n / 2] };
            return ks.into_iter().all(|k| match rules::lifted_case_split(t, &cell, seg, k) {
                Ok(b) => self.closes(b),
                Err(_) => false,
            });
        }
        if let Some(child) = rules::reused_var_rewrite(t) {
            return self.closes(child);
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_theory;
    use crate::preprocess::compile;

    fn theory(src: &str) -> Theory {
        let mut t = compile(&parse_theory(src).unwrap()).unwrap().theory;
        t.shatter();
        t
    }

    const SYMTRANS: &str = "domain p 6\npredicate F(p, p)\n!F(x, y) | !F(y, z) | F(x, z)\n!F(x, y) | F(y, x)\n!F(x, y) | !F(y, x) | F(x, x)\n";

    #[test]
    fn guard_only_matches_smaller_recurrences() {
        let big = theory(SYMTRANS);
        let small = theory(&SYMTRANS.replace("p 6", "p 4"));
        let mut guard = RecursionGuard::default();
        let mark = guard.push(&big);
        assert!(guard.recurs(&shape_key(&small), small.total_size()));
        assert!(!guard.recurs(&shape_key(&big), big.total_size()));
        guard.truncate(mark);
        assert!(guard.is_empty());
    }

    #[test]
    fn symmetric_transitivity_probe_accepts() {
        let t = theory(SYMTRANS);
        let seg = t.used_segments()[0];
        assert_eq!(probe_segment(&t, seg, 1000).unwrap(), Probe::Accept);
    }

    #[test]
    fn probe_rejects_on_exhausted_budget() {
        let t = theory(SYMTRANS);
        let seg = t.used_segments()[0];
        assert_eq!(probe_segment(&t, seg, 0).unwrap(), Probe::Reject);
    }
}
