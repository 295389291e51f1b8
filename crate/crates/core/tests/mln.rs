mod common;

use num_rational::BigRational;
use wfomc_core::engine::Mode;

const FRIENDS: &str = "domain p 2
predicate Smokes(p)
predicate Friends(p, p)
mln 2 Smokes(x) & Friends(x, y) => Smokes(y)
";

/// Sum over all interpretations of 2 to the number of satisfied groundings
/// `(x, y)`, `x != y`, of `Smokes(x) & Friends(x, y) => Smokes(y)`.
fn enumerate(n: usize) -> BigRational {
    let atoms = n + n * n;
    let mut total = BigRational::from_integer(0.into());
    for bits in 0u64..1 << atoms {
        let smokes = |i: usize| bits >> i & 1 == 1;
        let friends = |i: usize, j: usize| bits >> (n + i * n + j) & 1 == 1;
        let mut satisfied = 0u32;
        for x in 0..n {
            for y in 0..n {
                if x != y && (!(smokes(x) && friends(x, y)) || smokes(y)) {
                    satisfied += 1;
                }
            }
        }
        total += BigRational::from_integer(num_bigint::BigInt::from(2u64.pow(satisfied)));
    }
    total
}

#[test]
fn mln_matches_direct_enumeration() {
    for n in 1..=3u64 {
        let c = common::load(FRIENDS, &[("p", n)]);
        let want = enumerate(n as usize);
        assert_eq!(common::engine(&c, Mode::RD), want, "n={n}");
        assert_eq!(common::engine(&c, Mode::R), want, "n={n}");
        assert_eq!(common::oracle(&c), want, "n={n}");
    }
}
