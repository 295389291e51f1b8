mod common;

use common::{weight, WEIGHTS};
use num_rational::BigRational;
use num_traits::Pow;
use proptest::prelude::*;
use wfomc_core::canon::canonical_key;
use wfomc_core::engine::{wfomc, EngineConfig, Mode};
use wfomc_core::liftability::{self, Verdict};
use wfomc_core::parser::{parse_theory, serialize_theory};

fn count(text: &str, cfg: &EngineConfig) -> BigRational {
    let c = common::load(text, &[]);
    wfomc(&c.theory, cfg).expect("engine")
}

fn rd() -> EngineConfig {
    EngineConfig::new(Mode::RD)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn engine_matches_oracle_in_both_modes(s in common::spec()) {
        let c = common::load(&s.text(), &[]);
        let o = common::oracle(&c);
        prop_assert_eq!(common::engine(&c, Mode::RD), o.clone());
        prop_assert_eq!(common::engine(&c, Mode::R), o);
    }

    #[test]
    fn cache_does_not_change_counts(s in common::spec()) {
        let mut off = rd();
        off.use_cache = false;
        prop_assert_eq!(count(&s.text(), &rd()), count(&s.text(), &off));
    }

    #[test]
    fn scaling_weights_scales_count(s in common::spec(), p in 0usize..3, f in prop::sample::select(vec![(-3i64, 2i64), (2, 1), (1, 3), (-1, 1)])) {
        let p = p % s.preds.len();
        let factor = BigRational::new(f.0.into(), f.1.into());
        let mut scaled = s.clone();
        scaled.preds[p].1 *= &factor;
        scaled.preds[p].2 *= &factor;
        let want = count(&s.text(), &rd()) * Pow::pow(&factor, s.atoms_of(p) as u32);
        prop_assert_eq!(count(&scaled.text(), &rd()), want);
    }

    #[test]
    fn fresh_predicate_multiplies_by_total_weight(s in common::spec(), w in 0usize..WEIGHTS.len(), wb in 0usize..WEIGHTS.len()) {
        let base = count(&s.text(), &rd());
        let (w, wb) = (weight(w), weight(wb));
        let extra = format!("predicate Fresh(d0) {w} {wb}\n");
        let order: Vec<usize> = (0..s.preds.len()).collect();
        let names: Vec<String> = order.iter().map(|p| format!("P{p}")).collect();
        let clauses: Vec<usize> = (0..s.clauses.len()).collect();
        let smoothed = s.text_with(&order, &names, &clauses, &extra);
        let want = base * Pow::pow(&(w + wb), s.domains[0] as u32);
        prop_assert_eq!(count(&smoothed, &rd()), want);
    }

    #[test]
    fn canonical_key_ignores_names_and_order(s in common::spec(), seed in any::<u64>()) {
        let n = s.preds.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.rotate_left((seed % n as u64) as usize);
        let names: Vec<String> = (0..n).map(|p| format!("Q{}", (p as u64 * 7 + seed) % 97)).collect();
        let mut names = names;
        names.sort();
        names.dedup();
        prop_assume!(names.len() == n);
        let mut clauses: Vec<usize> = (0..s.clauses.len()).collect();
        clauses.reverse();
        let a = common::load(&s.text(), &[]);
        let b = common::load(&s.text_with(&order, &names, &clauses, ""), &[]);
        prop_assert_eq!(canonical_key(&a.theory), canonical_key(&b.theory));
        prop_assert_eq!(common::engine(&a, Mode::RD), common::engine(&b, Mode::RD));
    }

    #[test]
    fn serialized_theories_parse_back(s in common::spec()) {
        let parsed = parse_theory(&s.text()).expect("parses");
        let again = parse_theory(&serialize_theory(&parsed)).expect("round trip parses");
        prop_assert_eq!(parsed, again);
    }

    #[test]
    fn subset_laws_hold(s in common::spec()) {
        let c = common::load(&s.text(), &[]);
        let r = liftability::check(&c.theory);
        let fo2 = if r.fo2.member { Verdict::Member } else { Verdict::NonMember };
        for (a, b) in [(fo2, r.ru.verdict), (fo2, r.s2fo2.verdict), (fo2, r.s2ru.verdict), (r.ru.verdict, r.s2ru.verdict), (r.s2fo2.verdict, r.s2ru.verdict)] {
            prop_assert!(!(a == Verdict::Member && b == Verdict::NonMember), "{:?} then {:?}", a, b);
        }
    }
}

#[test]
fn unit_weights_count_models() {
    let c = common::load(common::FXY_FYX, &[]);
    // Symmetric relation over 3 distinct pairs plus 3 free diagonal atoms.
    assert_eq!(common::engine(&c, Mode::RD), common::int(64));
    assert_eq!(common::oracle(&c), common::int(64));
}
