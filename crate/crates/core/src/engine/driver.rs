use std::collections::HashSet;
use std::time::Instant;

use num_rational::BigRational;

use super::rules::{self, LiftedDecomposition};
use super::simplify::{simplify, Simplified};
use super::{Cache, EngineConfig, Mode, Value};
use crate::canon::{canonical_key, CanonicalKey};
use crate::error::{Error, Result};
use crate::logic::{Cell, Theory};
use crate::recursion::{probe_candidate, Probe, RecursionGuard};

/// Counters collected during one query.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Stats {
    pub nodes: u64,
    pub cache_hits: u64,
    pub cache_misses: u64,
    pub decompositions: u64,
    pub lifted_decompositions: u64,
    pub case_analyses: u64,
    pub lifted_case_analyses: u64,
    pub rewrites: u64,
    pub domain_recursions: u64,
    pub forced_recursions: u64,
    pub groundings: u64,
    pub probes_accepted: u64,
    pub probes_rejected: u64,
}

/// Exact weighted model count of `t` over its declared domains.
pub fn wfomc(t: &Theory, cfg: &EngineConfig) -> Result<BigRational> {
    let cache = Cache::new();
    wfomc_with(t, cfg, &cache).map(|(v, _)| v)
}

/// Same computation in floating point.
pub fn wfomc_float(t: &Theory, cfg: &EngineConfig) -> Result<f64> {
    let cache = Cache::new();
    wfomc_with(t, cfg, &cache).map(|(v, _)| v)
}

/// Weighted model count using (and filling) `cache`.
pub fn wfomc_with<V: Value>(t: &Theory, cfg: &EngineConfig, cache: &Cache<V>) -> Result<(V, Stats)> {
    let mut t = t.clone();
    t.shatter();
    let declared = t.declared_counts();
    let mentioned = t.mentioned_counts()?;
    let mut ctx = Ctx::new(cfg, cache);
    let core = ctx.solve(t.clone(), mentioned.clone())?;
    let free = smoothing_between::<V>(&t, &declared, &mentioned)?;
    Ok((core.mul(&free), ctx.stats))
}

/// `∏_P (Φ(P) + Φ̄(P))^{m_P}` where `m_P` counts the atoms of `P` mentioned by
/// `parent` but by none of `children` and not fixed by `fixed`.
pub fn smoothing_factor(parent: &Theory, children: &[&Theory], fixed: &[u64]) -> Result<BigRational> {
    let before = parent.mentioned_counts()?;
    let mut after = vec![0u64; before.len()];
    for c in children {
        for (p, n) in c.mentioned_counts()?.into_iter().enumerate().take(before.len()) {
            after[p] += n;
        }
    }
    for (p, n) in fixed.iter().enumerate().take(before.len()) {
        after[p] += n;
    }
    smoothing_between(parent, &before, &after)
}

/// Sum out atoms counted in `before` but not in `after`.
fn smoothing_between<V: Value>(t: &Theory, before: &[u64], after: &[u64]) -> Result<V> {
    let mut f = V::one();
    for (p, &b) in before.iter().enumerate() {
        let a = after.get(p).copied().unwrap_or(0);
        if a > b {
            return Err(Error::Invalid(format!(
                "rewrite grew the atoms of {} from {b} to {a}",
                t.preds[p].name
            )));
        }
        if a < b {
            f = f.mul(&V::from_rational(&t.preds[p].weight.total()).pow(b - a));
        }
    }
    Ok(f)
}

struct Ctx<'a, V> {
    cfg: &'a EngineConfig,
    cache: &'a Cache<V>,
    stats: Stats,
    guard: RecursionGuard,
    accepted: HashSet<CanonicalKey>,
    rejected: HashSet<CanonicalKey>,
}

impl<'a, V: Value> Ctx<'a, V> {
    fn new(cfg: &'a EngineConfig, cache: &'a Cache<V>) -> Self {
        Ctx {
            cfg,
            cache,
            stats: Stats::default(),
            guard: RecursionGuard::default(),
            accepted: HashSet::new(),
            rejected: HashSet::new(),
        }
    }

    fn tick(&mut self) -> Result<()> {
        self.stats.nodes += 1;
        if let Some(b) = self.cfg.node_budget {
            if self.stats.nodes > b {
                return Err(Error::BudgetExceeded(b));
            }
        }
        if let Some(d) = self.cfg.deadline {
            if self.stats.nodes.is_multiple_of(64) && Instant::now() > d {
                return Err(Error::Timeout);
            }
        }
        Ok(())
    }

    /// Weighted count over the atoms mentioned by `t`, whose mentioned counts
    /// are `before`.
    fn solve(&mut self, t: Theory, before: Vec<u64>) -> Result<V> {
        self.tick()?;
        let Simplified { theory: mut s, contradiction, fixed } = simplify(&t);
        if contradiction {
            return Ok(V::zero());
        }
        let mut factor = V::one();
        let after_simplify = s.mentioned_counts()?;
        let mut after = after_simplify.clone();
        for (cell, sign) in &fixed {
            let n = cell.size(&t.segments).ok_or(Error::SymbolicSize)?;
            let w = t.weight(cell.pred);
            let w = if *sign { &w.pos } else { &w.neg };
            factor = factor.mul(&V::from_rational(w).pow(n));
            after[cell.pred as usize] += n;
        }
        factor = factor.mul(&smoothing_between::<V>(&t, &before, &after)?);
        if s.clauses.is_empty() || factor.is_zero() {
            return Ok(factor);
        }
        s.compact();
        let key = self.cfg.use_cache.then(|| canonical_key(&s));
        if let Some(k) = &key {
            if let Some(v) = self.cache.get(k) {
                self.stats.cache_hits += 1;
                return Ok(factor.mul(&v));
            }
            self.stats.cache_misses += 1;
        }
        let v = self.apply_rules(&s, after_simplify)?;
        if let Some(k) = key {
            self.cache.insert(k, v.clone());
        }
        Ok(factor.mul(&v))
    }

    /// Solve a child whose mentioned atoms may be fewer than the parent's.
    fn solve_child(&mut self, parent_counts: &[u64], parent: &Theory, child: Theory, copies: u64) -> Result<V> {
        let unit = child.mentioned_counts()?;
        let mut after = unit.clone();
        for a in after.iter_mut() {
            *a *= copies;
        }
        let smooth = smoothing_between::<V>(parent, parent_counts, &after)?;
        let v = self.solve(child, unit)?;
        Ok(v.pow(copies).mul(&smooth))
    }

    fn apply_rules(&mut self, t: &Theory, counts: Vec<u64>) -> Result<V> {
        if let Some(comps) = rules::decompose(t) {
            self.stats.decompositions += 1;
            let mut v = V::one();
            for c in comps {
                let m = c.mentioned_counts()?;
                v = v.mul(&self.solve(c, m)?);
                if v.is_zero() {
                    break;
                }
            }
            return Ok(v);
        }
        if let Some(ld) = rules::lifted_decompose(t) {
            self.stats.lifted_decompositions += 1;
            let LiftedDecomposition { child, .. } = &ld;
            let e = ld.exponent(t).ok_or(Error::SymbolicSize)?;
            return self.solve_child(&counts, t, child.clone(), e);
        }
        if let Some(atom) = rules::pick_ground_atom(t) {
            self.stats.case_analyses += 1;
            let (pos, neg) = rules::case_analysis(t, &atom);
            let a = self.solve_child(&counts, t, pos, 1)?;
            let b = self.solve_child(&counts, t, neg, 1)?;
            return Ok(a.add(&b));
        }
        if let Some((cell, seg)) = rules::pick_unary_cell(t) {
            self.stats.lifted_case_analyses += 1;
            return self.lifted_case(t, &counts, &cell, seg);
        }
        if let Some(child) = rules::reused_var_rewrite(t) {
            self.stats.rewrites += 1;
            return self.solve_child(&counts, t, child, 1);
        }
        if self.cfg.mode == Mode::RD {
            if let Some(v) = self.try_recursion(t, &counts)? {
                return Ok(v);
            }
        }
        self.ground(t, &counts)
    }

    fn lifted_case(&mut self, t: &Theory, counts: &[u64], cell: &Cell, seg: u32) -> Result<V> {
        let n = t.segments[seg as usize].size.known().ok_or(Error::SymbolicSize)?;
        let template = rules::lifted_case_template(t, cell, seg)?;
        let mut total = V::zero();
        for k in 0..=n {
            let branch = match &template {
                Some((b, ts, fs)) => rules::instantiate_branch(b, *ts, *fs, n, k),
                None => rules::lifted_case_split(t, cell, seg, k)?,
            };
            let v = self.solve_child(counts, t, branch, 1)?;
            if !v.is_zero() {
                total = total.add(&V::binomial(n, k).mul(&v));
            }
        }
        Ok(total)
    }

    fn try_recursion(&mut self, t: &Theory, counts: &[u64]) -> Result<Option<V>> {
        let candidates: Vec<u32> = t
            .used_segments()
            .into_iter()
            .filter(|&s| t.segments[s as usize].size.known().is_some_and(|n| n >= 1))
            .collect();
        if candidates.is_empty() {
            return Ok(None);
        }
        let mark = self.guard.push(t);
        let mut chosen = None;
        for &seg in &candidates {
            let child = rules::domain_recursion(t, seg)?;
            let verdict = {
                let cache = self.cache;
                probe_candidate(
                    &child,
                    self.cfg.probe_budget,
                    &self.guard,
                    &mut self.accepted,
                    &mut self.rejected,
                    &|k| cache.contains(k),
                )
            };
            match verdict {
                Probe::Accept => {
                    self.stats.probes_accepted += 1;
                    chosen = Some(child);
                    break;
                }
                Probe::Reject => self.stats.probes_rejected += 1,
            }
        }
        if chosen.is_none() && self.cfg.dr_before_grounding && counts.iter().sum::<u64>() > self.cfg.ground_atom_limit {
            self.stats.forced_recursions += 1;
            chosen = Some(rules::domain_recursion(t, candidates[0])?);
        }
        let out = match chosen {
            Some(child) => {
                self.stats.domain_recursions += 1;
                Some(self.solve_child(counts, t, child, 1))
            }
            None => None,
        };
        self.guard.truncate(mark);
        out.transpose()
    }

    fn ground(&mut self, t: &Theory, counts: &[u64]) -> Result<V> {
        let atoms: u64 = counts.iter().sum();
        if atoms > self.cfg.ground_atom_limit {
            return Err(Error::GroundingTooLarge { atoms, limit: self.cfg.ground_atom_limit });
        }
        let seg = t
            .used_segments()
            .into_iter()
            .min_by_key(|&s| (t.segments[s as usize].size.known().unwrap_or(u64::MAX), s))
            .ok_or_else(|| Error::Invalid("no rule applies to a ground theory".into()))?;
        self.stats.groundings += 1;
        let child = rules::ground_segment(t, seg)?;
        self.solve_child(counts, t, child, 1)
    }
}
