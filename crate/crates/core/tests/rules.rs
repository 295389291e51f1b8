//! Each rewrite checked in isolation against brute force.

mod common;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow};
use proptest::prelude::*;
use wfomc_core::engine::rules;
use wfomc_core::engine::simplify::simplify;
use wfomc_core::oracle::oracle_wfomc;
use wfomc_core::Theory;

const LIMIT: u64 = 24;

fn oracle(t: &Theory) -> BigRational {
    oracle_wfomc(t, LIMIT).expect("oracle")
}

/// Unweighted count over the mentioned atoms only.
fn mentioned_count(t: &Theory) -> BigRational {
    let declared: u64 = t.declared_counts().iter().sum();
    let mentioned: u64 = t.mentioned_counts().expect("counts").iter().sum();
    oracle(t) / Pow::pow(&BigRational::from_integer(2.into()), (declared - mentioned) as u32)
}

fn binomial(n: u64, k: u64) -> BigRational {
    BigRational::from_integer(num_integer::binomial(BigInt::from(n), BigInt::from(k)))
}

/// The compiled theory, shattered and simplified as the driver sees it.
fn prepared(s: &common::Spec) -> Theory {
    let mut t = common::load(&s.text(), &[]).theory;
    t.shatter();
    let r = simplify(&t);
    if r.contradiction {
        t
    } else {
        r.theory
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, max_global_rejects: 200_000, ..ProptestConfig::default() })]

    #[test]
    fn domain_recursion_and_grounding_preserve_the_count(s in common::spec()) {
        let t = prepared(&s);
        let z = oracle(&t);
        for seg in t.used_segments() {
            if t.segments[seg as usize].size.known().unwrap_or(0) == 0 {
                continue;
            }
            prop_assert_eq!(oracle(&rules::domain_recursion(&t, seg).unwrap()), z.clone());
            prop_assert_eq!(oracle(&rules::ground_segment(&t, seg).unwrap()), z.clone());
        }
    }

    #[test]
    fn ground_case_analysis_partitions_models(s in common::spec()) {
        let t = prepared(&s);
        let seg = t.used_segments().into_iter().find(|&g| t.segments[g as usize].size.known().unwrap_or(0) > 0);
        prop_assume!(seg.is_some());
        let dr = rules::domain_recursion(&t, seg.unwrap()).unwrap();
        let atom = rules::pick_ground_atom(&dr);
        prop_assume!(atom.is_some());
        let (pos, neg) = rules::case_analysis(&dr, &atom.unwrap());
        prop_assert_eq!(oracle(&pos) + oracle(&neg), oracle(&t));
    }

    #[test]
    fn lifted_case_analysis_sums_over_splits(s in common::spec()) {
        let t = prepared(&s);
        let unary = rules::pick_unary_cell(&t);
        prop_assume!(unary.is_some());
        let (cell, seg) = unary.unwrap();
        let n = t.segments[seg as usize].size.known().unwrap();
        let mut total = BigRational::from_integer(0.into());
        for k in 0..=n {
            let b = rules::lifted_case_split(&t, &cell, seg, k).unwrap();
            total += binomial(n, k) * oracle(&b);
        }
        prop_assert_eq!(total, oracle(&t));
    }

    #[test]
    fn lifted_case_template_matches_direct_split(s in common::spec()) {
        let t = prepared(&s);
        let unary = rules::pick_unary_cell(&t);
        prop_assume!(unary.is_some());
        let (cell, seg) = unary.unwrap();
        let n = t.segments[seg as usize].size.known().unwrap();
        let template = rules::lifted_case_template(&t, &cell, seg).unwrap();
        prop_assume!(template.is_some());
        let (tpl, ts, fs) = template.unwrap();
        for k in 0..=n {
            let direct = rules::lifted_case_split(&t, &cell, seg, k).unwrap();
            prop_assert_eq!(oracle(&rules::instantiate_branch(&tpl, ts, fs, n, k)), oracle(&direct));
        }
    }

    #[test]
    fn decomposition_multiplies_components(s in common::spec()) {
        let t = prepared(&s.unweighted());
        let comps = rules::decompose(&t);
        prop_assume!(comps.is_some());
        let product = comps.unwrap().iter().map(mentioned_count).fold(BigRational::one(), |a, b| a * b);
        prop_assert_eq!(product, mentioned_count(&t));
    }

    #[test]
    fn lifted_decomposition_raises_the_copy(s in common::spec()) {
        let t = prepared(&s.unweighted());
        let ld = rules::lifted_decompose(&t);
        prop_assume!(ld.is_some());
        let ld = ld.unwrap();
        let e = ld.exponent(&t).unwrap();
        prop_assert_eq!(Pow::pow(&mentioned_count(&ld.child), e as u32), mentioned_count(&t));
    }

    #[test]
    fn reused_variable_rewrite_preserves_the_count(s in common::spec()) {
        let t = prepared(&s);
        let r = rules::reused_var_rewrite(&t);
        prop_assume!(r.is_some());
        prop_assert_eq!(oracle(&r.unwrap()), oracle(&t));
    }

    #[test]
    fn simplification_preserves_the_count(s in common::spec()) {
        let mut t = common::load(&s.unweighted().text(), &[]).theory;
        t.shatter();
        let r = simplify(&t);
        if r.contradiction {
            prop_assert_eq!(oracle(&t), BigRational::from_integer(0.into()));
        } else {
            // Fixed atoms are no longer mentioned, so brute force counts them both ways.
            let fixed: u64 = r.fixed.iter().map(|(c, _)| c.size(&t.segments).unwrap()).sum();
            let freed = Pow::pow(&BigRational::from_integer(2.into()), fixed as u32);
            prop_assert_eq!(oracle(&r.theory), oracle(&t) * freed);
        }
    }
}
