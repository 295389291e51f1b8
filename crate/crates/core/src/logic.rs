//! Populations, segments, literals, constrained clauses and theories.
//!
//! A root domain is partitioned into *segments* (anonymous, exchangeable
//! individuals) and explicit *constants*. Segments never contain constants and
//! two segments never overlap, so variables typed with different segments (or a
//! variable and a constant) always denote different individuals. Two distinct
//! variables typed with the same segment are implicitly distinct as well.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use smallvec::SmallVec;

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Cardinality of a segment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Size {
    Known(u64),
    /// Opaque size used by the membership checkers; assumed large.
    Symbolic(u32),
}

impl Size {
    pub fn known(self) -> Option<u64> {
        match self {
            Size::Known(n) => Some(n),
            Size::Symbolic(_) => None,
        }
    }

    /// Whether the segment holds at least `k` individuals.
    pub fn at_least(self, k: u64) -> bool {
        match self {
            Size::Known(n) => n >= k,
            Size::Symbolic(_) => true,
        }
    }

    pub fn is_empty(self) -> bool {
        self == Size::Known(0)
    }
}

impl fmt::Display for Size {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Size::Known(n) => write!(f, "{n}"),
            Size::Symbolic(i) => write!(f, "n{i}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootDomain {
    pub name: String,
    pub size: u64,
}

/// Weights of a predicate's ground atoms when true and when false.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Weight {
    pub pos: Rational,
    pub neg: Rational,
}

impl Weight {
    pub fn new(pos: Rational, neg: Rational) -> Self {
        Weight { pos, neg }
    }

    pub fn unit() -> Self {
        Weight::new(Rational::one(), Rational::one())
    }

    pub fn ints(pos: i64, neg: i64) -> Self {
        Weight::new(Rational::from_integer(pos.into()), Rational::from_integer(neg.into()))
    }

    /// Weight of an atom whose value is summed out.
    pub fn total(&self) -> Rational {
        &self.pos + &self.neg
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Predicate {
    pub name: String,
    /// Root domain index per argument position.
    pub domains: Vec<usize>,
    pub weight: Weight,
}

impl Predicate {
    pub fn arity(&self) -> usize {
        self.domains.len()
    }
}

/// A part of a segment that has been split.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Part {
    Seg(u32),
    Const(u32),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Segment {
    pub root: usize,
    pub size: Size,
    /// Set once the segment has been split; clauses still typed with it are
    /// stale until shattered.
    pub split: Option<Vec<Part>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constant {
    pub root: usize,
    pub name: Arc<str>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(u16),
    Const(u32),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub positive: bool,
    pub pred: u32,
    pub args: SmallVec<[Term; 3]>,
}

impl Literal {
    pub fn new(positive: bool, pred: u32, args: impl Into<SmallVec<[Term; 3]>>) -> Self {
        Literal { positive, pred, args: args.into() }
    }

    pub fn negated(&self) -> Literal {
        Literal { positive: !self.positive, ..self.clone() }
    }

    pub fn vars(&self) -> impl Iterator<Item = u16> + '_ {
        self.args.iter().filter_map(|t| match t {
            Term::Var(v) => Some(*v),
            Term::Const(_) => None,
        })
    }

    /// Number of distinct logical variables in the literal.
    pub fn var_count(&self) -> usize {
        let mut seen: Vec<u16> = self.vars().collect();
        seen.sort_unstable();
        seen.dedup();
        seen.len()
    }

    pub fn has_var(&self, v: u16) -> bool {
        self.args.contains(&Term::Var(v))
    }

    /// Whether `self.cell(clause_vars) == *cell`, without building the cell.
    pub fn in_cell(&self, clause_vars: &[u32], cell: &Cell) -> bool {
        if self.pred != cell.pred || self.args.len() != cell.args.len() {
            return false;
        }
        let mut slots = [u16::MAX; 8];
        let mut used = 0usize;
        for (t, c) in self.args.iter().zip(cell.args.iter()) {
            match (*t, *c) {
                (Term::Const(a), CellArg::Const(b)) if a == b => {}
                (Term::Var(v), CellArg::Var { seg, slot }) => {
                    if clause_vars[v as usize] != seg {
                        return false;
                    }
                    let i = match slots[..used].iter().position(|&s| s == v) {
                        Some(i) => i,
                        None if used < slots.len() => {
                            slots[used] = v;
                            used += 1;
                            used - 1
                        }
                        None => return self.cell(clause_vars) == *cell,
                    };
                    if i != slot as usize {
                        return false;
                    }
                }
                _ => return false,
            }
        }
        true
    }

    /// The set of ground atoms this literal ranges over inside its clause.
    pub fn cell(&self, clause_vars: &[u32]) -> Cell {
        let mut slots: SmallVec<[u16; 4]> = SmallVec::new();
        let args = self
            .args
            .iter()
            .map(|t| match *t {
                Term::Const(c) => CellArg::Const(c),
                Term::Var(v) => {
                    let slot = match slots.iter().position(|&s| s == v) {
                        Some(i) => i,
                        None => {
                            slots.push(v);
                            slots.len() - 1
                        }
                    };
                    CellArg::Var { seg: clause_vars[v as usize], slot: slot as u8 }
                }
            })
            .collect();
        Cell { pred: self.pred, args }
    }
}

/// Argument class of a cell position.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CellArg {
    Const(u32),
    /// Positions sharing a slot hold the same individual; different slots over
    /// the same segment hold different individuals.
    Var { seg: u32, slot: u8 },
}

/// A block of ground atoms of one predicate. In a shattered theory two cells are
/// either equal or disjoint.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cell {
    pub pred: u32,
    pub args: SmallVec<[CellArg; 4]>,
}

impl Cell {
    /// Number of ground atoms in the cell, `None` when a size is symbolic.
    pub fn size(&self, segments: &[Segment]) -> Option<u64> {
        let mut per_seg: SmallVec<[(u32, u8); 4]> = self
            .args
            .iter()
            .filter_map(|a| match *a {
                CellArg::Var { seg, slot } => Some((seg, slot)),
                CellArg::Const(_) => None,
            })
            .collect();
        per_seg.sort_unstable();
        per_seg.dedup();
        let mut total: u64 = 1;
        let mut i = 0;
        while i < per_seg.len() {
            let seg = per_seg[i].0;
            let mut k = 0u64;
            while i < per_seg.len() && per_seg[i].0 == seg {
                k += 1;
                i += 1;
            }
            let n = segments[seg as usize].size.known()?;
            total = total.checked_mul(falling(n, k))?;
        }
        Some(total)
    }

    pub fn var_slots(&self) -> usize {
        let mut slots: SmallVec<[u8; 4]> = self
            .args
            .iter()
            .filter_map(|a| match *a {
                CellArg::Var { slot, .. } => Some(slot),
                CellArg::Const(_) => None,
            })
            .collect();
        slots.sort_unstable();
        slots.dedup();
        slots.len()
    }
}

/// n (n-1) ... (n-k+1)
pub fn falling(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u64, |acc, i| acc.saturating_mul(n - i))
}

/// A universally quantified clause. Variable `i` is typed with segment
/// `vars[i]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Clause {
    pub vars: SmallVec<[u32; 4]>,
    pub lits: Vec<Literal>,
}

impl Clause {
    pub fn new(vars: impl Into<SmallVec<[u32; 4]>>, lits: Vec<Literal>) -> Self {
        Clause { vars: vars.into(), lits }
    }

    pub fn ground(lits: Vec<Literal>) -> Self {
        Clause { vars: SmallVec::new(), lits }
    }

    pub fn is_unit(&self) -> bool {
        self.lits.len() == 1
    }

    pub fn var_count(&self) -> usize {
        self.vars.len()
    }

    /// Number of variables typed with `seg`.
    pub fn vars_in(&self, seg: u32) -> usize {
        self.vars.iter().filter(|&&s| s == seg).count()
    }

    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        self.lits.iter().map(move |l| l.cell(&self.vars))
    }

    /// True when some segment holds fewer individuals than the clause has
    /// pairwise-distinct variables over it; such a clause has no groundings.
    pub fn is_vacuous(&self, segments: &[Segment]) -> bool {
        let mut counts: SmallVec<[(u32, u64); 4]> = SmallVec::new();
        for &s in &self.vars {
            match counts.iter_mut().find(|(seg, _)| *seg == s) {
                Some((_, c)) => *c += 1,
                None => counts.push((s, 1)),
            }
        }
        counts.iter().any(|&(s, k)| !segments[s as usize].size.at_least(k))
    }

    /// Replace variable `v` by constant `k`. The remaining variables keep their
    /// segments; a constant never belongs to a segment, so they stay distinct
    /// from `k`.
    pub fn substitute_constant(&self, theory: &Theory, v: u16, k: u32) -> Result<Clause> {
        let seg = *self
            .vars
            .get(v as usize)
            .ok_or_else(|| Error::Invalid(format!("no variable {v} in clause")))?;
        let seg_root = theory.segments[seg as usize].root;
        if theory.constants[k as usize].root != seg_root {
            return Err(Error::RootMismatch);
        }
        let lits = self
            .lits
            .iter()
            .map(|l| Literal {
                args: l
                    .args
                    .iter()
                    .map(|&t| if t == Term::Var(v) { Term::Const(k) } else { t })
                    .collect(),
                ..l.clone()
            })
            .collect();
        let mut out = Clause::new(self.vars.clone(), lits);
        out.drop_unused_vars();
        Ok(out)
    }

    /// Renumber variables so that only variables occurring in literals remain.
    /// Callers must make sure the clause is not vacuous first.
    pub fn drop_unused_vars(&mut self) {
        let mut used: SmallVec<[bool; 8]> = SmallVec::from_elem(false, self.vars.len());
        for l in &self.lits {
            for v in l.vars() {
                used[v as usize] = true;
            }
        }
        if used.iter().all(|&u| u) {
            return;
        }
        let mut map = vec![u16::MAX; self.vars.len()];
        let mut vars = Vec::new();
        for (i, &u) in used.iter().enumerate() {
            if u {
                map[i] = vars.len() as u16;
                vars.push(self.vars[i]);
            }
        }
        for l in &mut self.lits {
            for t in &mut l.args {
                if let Term::Var(v) = t {
                    *v = map[*v as usize];
                }
            }
        }
        self.vars = vars.into();
    }
}

/// A set of constrained clauses together with the registries they refer to.
#[derive(Clone, Debug)]
pub struct Theory {
    pub domains: Arc<Vec<RootDomain>>,
    pub preds: Arc<Vec<Predicate>>,
    pub segments: Vec<Segment>,
    pub constants: Vec<Constant>,
    pub clauses: Vec<Clause>,
}

impl Theory {
    pub fn new(domains: Vec<RootDomain>, preds: Vec<Predicate>) -> Self {
        Theory {
            domains: Arc::new(domains),
            preds: Arc::new(preds),
            segments: Vec::new(),
            constants: Vec::new(),
            clauses: Vec::new(),
        }
    }

    /// Same registries, no clauses.
    pub fn empty_like(&self) -> Theory {
        Theory { clauses: Vec::new(), ..self.clone() }
    }

    pub fn with_clauses(&self, clauses: Vec<Clause>) -> Theory {
        Theory {
            domains: self.domains.clone(),
            preds: self.preds.clone(),
            segments: self.segments.clone(),
            constants: self.constants.clone(),
            clauses,
        }
    }

    pub fn add_segment(&mut self, root: usize, size: Size) -> u32 {
        self.segments.push(Segment { root, size, split: None });
        (self.segments.len() - 1) as u32
    }

    pub fn add_constant(&mut self, root: usize, name: &str) -> u32 {
        self.constants.push(Constant { root, name: Arc::from(name) });
        (self.constants.len() - 1) as u32
    }

    /// Fresh constant with a name unused in this theory.
    pub fn fresh_constant(&mut self, root: usize, stem: &str) -> u32 {
        let mut i = self.constants.len();
        loop {
            let name = format!("{stem}{i}");
            if !self.constants.iter().any(|c| *c.name == name) {
                return self.add_constant(root, &name);
            }
            i += 1;
        }
    }

    pub fn add_predicate(&mut self, pred: Predicate) -> u32 {
        Arc::make_mut(&mut self.preds).push(pred);
        (self.preds.len() - 1) as u32
    }

    pub fn weight(&self, pred: u32) -> &Weight {
        &self.preds[pred as usize].weight
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    pub fn has_symbolic_sizes(&self) -> bool {
        self.used_segments().iter().any(|&s| self.segments[s as usize].size.known().is_none())
    }

    /// Segments referenced by at least one clause, ascending.
    pub fn used_segments(&self) -> Vec<u32> {
        let mut segs: Vec<u32> = self.clauses.iter().flat_map(|c| c.vars.iter().copied()).collect();
        segs.sort_unstable();
        segs.dedup();
        segs
    }

    pub fn used_constants(&self) -> Vec<u32> {
        let mut cs: Vec<u32> = self
            .clauses
            .iter()
            .flat_map(|c| c.lits.iter())
            .flat_map(|l| l.args.iter())
            .filter_map(|t| match t {
                Term::Const(c) => Some(*c),
                Term::Var(_) => None,
            })
            .collect();
        cs.sort_unstable();
        cs.dedup();
        cs
    }

    /// Sum of the sizes of all referenced segments.
    pub fn total_size(&self) -> u64 {
        self.used_segments()
            .iter()
            .map(|&s| self.segments[s as usize].size.known().unwrap_or(0))
            .sum()
    }

    /// Raw ground-atom counts per predicate and tuple of argument classes.
    /// Distinctness between variables is not taken into account here.
    pub fn atom_universe(&self) -> Result<BTreeMap<(u32, Vec<Part>), u64>> {
        let mut out = BTreeMap::new();
        for c in &self.clauses {
            for l in &c.lits {
                let mut n: u64 = 1;
                let mut key = Vec::with_capacity(l.args.len());
                for t in &l.args {
                    match *t {
                        Term::Const(k) => key.push(Part::Const(k)),
                        Term::Var(v) => {
                            let seg = c.vars[v as usize];
                            let size = self.segments[seg as usize]
                                .size
                                .known()
                                .ok_or(Error::SymbolicSize)?;
                            n = n.saturating_mul(size);
                            key.push(Part::Seg(seg));
                        }
                    }
                }
                out.insert((l.pred, key), n);
            }
        }
        Ok(out)
    }

    /// Distinct cells mentioned by the clauses.
    pub fn cells(&self) -> Vec<Cell> {
        let mut cells: Vec<Cell> = self.clauses.iter().flat_map(|c| c.cells()).collect();
        cells.sort_unstable();
        cells.dedup();
        cells
    }

    /// Number of mentioned ground atoms per predicate (indexed by predicate).
    pub fn mentioned_counts(&self) -> Result<Vec<u64>> {
        let mut counts = vec![0u64; self.preds.len()];
        let mut seen: rustc_hash::FxHashSet<Cell> = Default::default();
        for c in &self.clauses {
            for l in &c.lits {
                let cell = l.cell(&c.vars);
                let n = cell.size(&self.segments).ok_or(Error::SymbolicSize)?;
                if seen.insert(cell) {
                    counts[l.pred as usize] += n;
                }
            }
        }
        Ok(counts)
    }

    /// Number of ground atoms per predicate over the declared root domains.
    pub fn declared_counts(&self) -> Vec<u64> {
        self.preds
            .iter()
            .map(|p| p.domains.iter().map(|&d| self.domains[d].size).product())
            .collect()
    }

    /// Partition of the clauses into groups that share no ground atoms.
    pub fn connected_components(&self) -> Vec<Theory> {
        component_indices(self)
            .into_iter()
            .map(|idx| self.with_clauses(idx.into_iter().map(|i| self.clauses[i].clone()).collect()))
            .collect()
    }

    /// Register two fresh segments of sizes `k` and `n - k` splitting `seg`.
    /// Clauses over `seg` become stale until [`Theory::shatter`] runs.
    pub fn split_segment(&mut self, seg: u32, k: u64) -> Result<(u32, u32)> {
        let s = &self.segments[seg as usize];
        let n = s.size.known().ok_or(Error::SymbolicSize)?;
        if k > n {
            return Err(Error::SplitOutOfRange { k, n });
        }
        let root = s.root;
        let t = self.add_segment(root, Size::Known(k));
        let f = self.add_segment(root, Size::Known(n - k));
        self.segments[seg as usize].split = Some(vec![Part::Seg(t), Part::Seg(f)]);
        Ok((t, f))
    }

    /// Split a (possibly symbolic) segment into two fresh symbolic segments.
    pub fn split_symbolic(&mut self, seg: u32, next_symbol: &mut u32) -> (u32, u32) {
        let root = self.segments[seg as usize].root;
        let t = self.add_segment(root, Size::Symbolic(*next_symbol));
        let f = self.add_segment(root, Size::Symbolic(*next_symbol + 1));
        *next_symbol += 2;
        self.segments[seg as usize].split = Some(vec![Part::Seg(t), Part::Seg(f)]);
        (t, f)
    }

    /// Replace every clause typed with a split segment by one copy per
    /// assignment of its variables to the parts, so that each grounding of the
    /// original clause is covered exactly once.
    pub fn shatter(&mut self) -> bool {
        let mut changed = false;
        loop {
            let stale = self
                .clauses
                .iter()
                .flat_map(|c| c.vars.iter())
                .find(|&&s| self.segments[s as usize].split.is_some())
                .copied();
            let Some(seg) = stale else { break };
            let parts = self.segments[seg as usize].split.clone().unwrap_or_default();
            let clauses = std::mem::take(&mut self.clauses);
            self.clauses = clauses.into_iter().flat_map(|c| refine_clause(&c, seg, &parts, &self.segments)).collect();
            changed = true;
        }
        changed
    }

    /// Split `seg` into `parts` and shatter.
    pub fn refine(&mut self, seg: u32, parts: Vec<Part>) {
        self.segments[seg as usize].split = Some(parts);
        self.shatter();
    }

    /// Drop unreferenced segments and constants and renumber the rest.
    pub fn compact(&mut self) {
        let segs = self.used_segments();
        let consts = self.used_constants();
        if segs.len() == self.segments.len() && consts.len() == self.constants.len() {
            return;
        }
        let mut seg_map = vec![u32::MAX; self.segments.len()];
        let mut new_segs = Vec::with_capacity(segs.len());
        for &s in &segs {
            seg_map[s as usize] = new_segs.len() as u32;
            let mut seg = self.segments[s as usize].clone();
            seg.split = None;
            new_segs.push(seg);
        }
        let mut const_map = vec![u32::MAX; self.constants.len()];
        let mut new_consts = Vec::with_capacity(consts.len());
        for &k in &consts {
            const_map[k as usize] = new_consts.len() as u32;
            new_consts.push(self.constants[k as usize].clone());
        }
        for c in &mut self.clauses {
            for s in &mut c.vars {
                *s = seg_map[*s as usize];
            }
            for l in &mut c.lits {
                for t in &mut l.args {
                    if let Term::Const(k) = t {
                        *k = const_map[*k as usize];
                    }
                }
            }
        }
        self.segments = new_segs;
        self.constants = new_consts;
    }

    pub fn display_clause(&self, c: &Clause) -> String {
        let lits: Vec<String> = c
            .lits
            .iter()
            .map(|l| {
                let args: Vec<String> = l
                    .args
                    .iter()
                    .map(|t| match *t {
                        Term::Var(v) => format!("v{v}"),
                        Term::Const(k) => self.constants[k as usize].name.to_string(),
                    })
                    .collect();
                format!("{}{}({})", if l.positive { "" } else { "!" }, self.preds[l.pred as usize].name, args.join(","))
            })
            .collect();
        let body = if lits.is_empty() { "false".to_string() } else { lits.join(" | ") };
        if c.vars.is_empty() {
            body
        } else {
            let q: Vec<String> = c
                .vars
                .iter()
                .enumerate()
                .map(|(i, &s)| {
                    let seg = &self.segments[s as usize];
                    format!("v{i}:{}#{}[{}]", self.domains[seg.root].name, s, seg.size)
                })
                .collect();
            format!("{}: {}", q.join(" "), body)
        }
    }
}

impl fmt::Display for Theory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.clauses {
            writeln!(f, "{}", self.display_clause(c))?;
        }
        Ok(())
    }
}

pub(crate) fn component_indices(t: &Theory) -> Vec<Vec<usize>> {
    let n = t.clauses.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut owner: HashMap<Cell, usize> = HashMap::new();
    for (i, c) in t.clauses.iter().enumerate() {
        for cell in c.cells() {
            match owner.get(&cell) {
                Some(&j) => {
                    let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                    if a != b {
                        parent[a] = b;
                    }
                }
                None => {
                    owner.insert(cell, i);
                }
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(i);
    }
    let mut out: Vec<Vec<usize>> = groups.into_values().collect();
    out.sort_by_key(|g| g[0]);
    out
}

/// Copies of `c` with the variables typed `seg` distributed over `parts`.
/// Two variables never receive the same constant, and parts that are known to
/// be empty are skipped.
pub(crate) fn refine_clause(c: &Clause, seg: u32, parts: &[Part], segments: &[Segment]) -> Vec<Clause> {
    let targets: Vec<u16> = (0..c.vars.len() as u16).filter(|&v| c.vars[v as usize] == seg).collect();
    if targets.is_empty() {
        return vec![c.clone()];
    }
    let live: Vec<Part> = parts
        .iter()
        .copied()
        .filter(|p| match p {
            Part::Seg(s) => !segments[*s as usize].size.is_empty(),
            Part::Const(_) => true,
        })
        .collect();
    let mut out = Vec::new();
    let mut choice = vec![0usize; targets.len()];
    if live.is_empty() {
        return out;
    }
    'outer: loop {
        let mut ok = true;
        for i in 0..targets.len() {
            if let Part::Const(k) = live[choice[i]] {
                if choice[..i].iter().any(|&j| live[j] == Part::Const(k)) {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            let mut vars = c.vars.clone();
            let mut subst: Vec<Option<u32>> = vec![None; c.vars.len()];
            for (i, &v) in targets.iter().enumerate() {
                match live[choice[i]] {
                    Part::Seg(s) => vars[v as usize] = s,
                    Part::Const(k) => subst[v as usize] = Some(k),
                }
            }
            let lits = c
                .lits
                .iter()
                .map(|l| Literal {
                    positive: l.positive,
                    pred: l.pred,
                    args: l
                        .args
                        .iter()
                        .map(|&t| match t {
                            Term::Var(v) => subst[v as usize].map(Term::Const).unwrap_or(t),
                            Term::Const(_) => t,
                        })
                        .collect(),
                })
                .collect();
            let mut copy = Clause::new(vars, lits);
            // substituted variables no longer occur in any literal
            copy.drop_unused_vars_keep_typed(&subst);
            out.push(copy);
        }
        let mut i = 0;
        loop {
            if i == targets.len() {
                break 'outer;
            }
            choice[i] += 1;
            if choice[i] < live.len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
    out
}

impl Clause {
    /// Remove the variables that were replaced by constants; other unused
    /// variables keep quantifying the clause.
    fn drop_unused_vars_keep_typed(&mut self, subst: &[Option<u32>]) {
        if subst.iter().all(Option::is_none) {
            return;
        }
        let mut map = vec![u16::MAX; self.vars.len()];
        let mut vars = Vec::new();
        for (i, s) in subst.iter().enumerate() {
            if s.is_none() {
                map[i] = vars.len() as u16;
                vars.push(self.vars[i]);
            }
        }
        for l in &mut self.lits {
            for t in &mut l.args {
                if let Term::Var(v) = t {
                    *v = map[*v as usize];
                }
            }
        }
        self.vars = vars.into();
    }
}

pub fn rational_from_i64(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}
