#![allow(dead_code)]

use num_rational::BigRational;
use num_traits::One;
use proptest::prelude::*;
use wfomc_core::engine::{wfomc, EngineConfig, Mode};
use wfomc_core::oracle::{oracle_wfomc_with, DEFAULT_LIMIT};
use wfomc_core::parser::parse_theory;
use wfomc_core::preprocess::{compile, Compiled};

pub const SMOKERS: &str = "domain people 2
predicate Smokes(people) 0.2 0.5
predicate Cancer(people) 0.8 1.2
!Smokes(x) | Cancer(x)
";

pub const SYMTRANS: &str = "domain p 3
predicate F(p, p)
!F(x, y) | !F(y, z) | F(x, z)
!F(x, y) | F(y, x)
!F(x, y) | !F(y, x) | F(x, x)
";

pub const S4: &str = "domain dx 2
domain dy 2
predicate S(dx, dy)
S(x1, y1) | !S(x2, y1) | S(x2, y2) | !S(x1, y2)
";

pub const BIRTHDAY: &str = "domain people 2
domain days 3
predicate Born(people, days)
exists d: Born(p, d)
!Born(p, d1) | !Born(p, d2)
!Born(p1, d) | !Born(p2, d)
";

pub const BIRTHDAY_NOINJ: &str = "domain people 2
domain days 3
predicate Born(people, days)
exists d: Born(p, d)
!Born(p, d1) | !Born(p, d2)
";

pub const VOLUNTEERS: &str = "domain v 2
domain j 2
predicate Assigned(v, j)
predicate InvolvesGas(j)
predicate Smokes(v)
predicate Friends(v, v)
!Assigned(v1, j) | !Assigned(v2, j)
!Assigned(v, j1) | !Assigned(v, j2)
!InvolvesGas(j) | !Assigned(v, j) | !Smokes(v)
mln 2 Smokes(v1) & Friends(v1, v2) => Smokes(v2)
";

pub const RU_NOT_FO2: &str = "domain p 2
predicate F(p, p)
predicate G(p, p, p)
F(x, y) | F(y, z) | G(x, y, z)
";

pub const FXY_FYX: &str = "domain p 3
predicate Friend(p, p)
!Friend(x, y) | Friend(y, x)
";

pub const TRANSITIVITY: &str = "domain p 3
predicate F(p, p)
!F(x, y) | !F(y, z) | F(x, z)
";

pub fn load(src: &str, sizes: &[(&str, u64)]) -> Compiled {
    let mut s = parse_theory(src).expect("parses");
    for (d, n) in sizes {
        s.set_domain(d, *n).expect("domain exists");
    }
    compile(&s).expect("compiles")
}

pub fn engine(c: &Compiled, mode: Mode) -> BigRational {
    let cfg = EngineConfig::new(mode).with_ground_limit(64);
    wfomc(&c.theory, &cfg).expect("engine")
}

pub fn oracle(c: &Compiled) -> BigRational {
    oracle_wfomc_with(&c.original, &c.existentials, DEFAULT_LIMIT).expect("oracle")
}

pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

pub const WEIGHTS: [(i64, i64); 8] = [(1, 1), (2, 1), (1, 2), (-1, 1), (3, 2), (-1, 3), (0, 1), (5, 4)];
pub const VAR_NAMES: [[&str; 3]; 2] = [["a", "b", "c"], ["u", "v", "w"]];
pub const MAX_ATOMS: u64 = 14;

#[derive(Clone, Debug)]
pub struct Spec {
    pub domains: Vec<u64>,
    /// Argument domains and the two weights.
    pub preds: Vec<(Vec<usize>, BigRational, BigRational)>,
    /// Sign, predicate, and one variable pick per argument.
    pub clauses: Vec<Vec<(bool, usize, Vec<usize>)>>,
}

impl Spec {
    pub fn atoms_of(&self, p: usize) -> u64 {
        self.preds[p].0.iter().map(|&d| self.domains[d]).product()
    }

    pub fn atoms(&self) -> u64 {
        (0..self.preds.len()).map(|p| self.atoms_of(p)).sum()
    }

    /// Source text; `pred_order` lists predicates in declaration order,
    /// `names` renames them and `clause_order` permutes the clauses.
    pub fn text_with(&self, pred_order: &[usize], names: &[String], clause_order: &[usize], extra: &str) -> String {
        let mut s = String::new();
        for (i, n) in self.domains.iter().enumerate() {
            s += &format!("domain d{i} {n}\n");
        }
        for &p in pred_order {
            let args: Vec<String> = self.preds[p].0.iter().map(|d| format!("d{d}")).collect();
            let (_, w, wb) = &self.preds[p];
            s += &format!("predicate {}({}) {w} {wb}\n", names[p], args.join(", "));
        }
        s += extra;
        for &c in clause_order {
            let lits: Vec<String> = self.clauses[c]
                .iter()
                .map(|(pos, p, vars)| {
                    let args: Vec<&str> =
                        self.preds[*p].0.iter().zip(vars).map(|(&d, &v)| VAR_NAMES[d][v]).collect();
                    format!("{}{}({})", if *pos { "" } else { "!" }, names[*p], args.join(", "))
                })
                .collect();
            s += &lits.join(" | ");
            s.push('\n');
        }
        s
    }

    /// The same theory with every weight set to one.
    pub fn unweighted(&self) -> Spec {
        let mut s = self.clone();
        for p in &mut s.preds {
            p.1 = BigRational::one();
            p.2 = BigRational::one();
        }
        s
    }

    pub fn text(&self) -> String {
        let order: Vec<usize> = (0..self.preds.len()).collect();
        let names: Vec<String> = order.iter().map(|p| format!("P{p}")).collect();
        let clauses: Vec<usize> = (0..self.clauses.len()).collect();
        self.text_with(&order, &names, &clauses, "")
    }
}

pub fn weight(i: usize) -> BigRational {
    BigRational::new(WEIGHTS[i].0.into(), WEIGHTS[i].1.into())
}

pub fn spec() -> impl Strategy<Value = Spec> {
    let domains = prop::collection::vec(1u64..=3, 1..=2);
    let preds = prop::collection::vec((prop::collection::vec(0usize..2, 1..=2), 0..WEIGHTS.len(), 0..WEIGHTS.len()), 1..=3);
    let clauses =
        prop::collection::vec(prop::collection::vec((any::<bool>(), 0usize..3, prop::collection::vec(0usize..3, 2)), 1..=3), 1..=3);
    (domains, preds, clauses)
        .prop_map(|(domains, preds, clauses)| {
            let nd = domains.len();
            let preds: Vec<_> = preds.into_iter().map(|(args, w, wb)| (args.into_iter().map(|d| d % nd).collect(), weight(w), weight(wb))).collect();
            let np = preds.len();
            let clauses = clauses
                .into_iter()
                .map(|c| c.into_iter().map(|(s, p, vars)| (s, p % np, vars)).collect())
                .collect();
            let mut s = Spec { domains, preds, clauses };
            for c in &mut s.clauses {
                for (_, p, vars) in c.iter_mut() {
                    vars.truncate(s.preds[*p].0.len());
                }
            }
            s
        })
        .prop_filter("oracle-sized", |s| s.atoms() <= MAX_ATOMS)
}
