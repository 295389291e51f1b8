use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use wfomc_core::engine::{wfomc, EngineConfig, Mode};
use wfomc_core::oracle::{brute_force_sequential, brute_force_wfomc, ground_theory_with};
use wfomc_core::parser::parse_theory;
use wfomc_core::preprocess::{compile, Compiled};

const SYMTRANS: &str = "domain p 3
predicate F(p, p)
!F(x, y) | !F(y, z) | F(x, z)
!F(x, y) | F(y, x)
!F(x, y) | !F(y, x) | F(x, x)
";

const S4: &str = "domain dx 2
domain dy 2
predicate S(dx, dy)
S(x1, y1) | !S(x2, y1) | S(x2, y2) | !S(x1, y2)
";

const SMOKERS: &str = "domain people 2
predicate Smokes(people) 0.2 0.5
predicate Cancer(people) 0.8 1.2
!Smokes(x) | Cancer(x)
";

fn load(src: &str, sizes: &[(&str, u64)]) -> Compiled {
    let mut s = parse_theory(src).unwrap();
    for (d, n) in sizes {
        s.set_domain(d, *n).unwrap();
    }
    compile(&s).unwrap()
}

fn oracle(c: &mut Criterion) {
    let mut group = c.benchmark_group("oracle");
    group.sample_size(10);
    for (x, y) in [(4, 4), (4, 5)] {
        let t = load(S4, &[("dx", x), ("dy", y)]);
        let g = ground_theory_with(&t.original, &t.existentials, 32).unwrap();
        let id = format!("s4_{x}x{y}");
        group.bench_with_input(BenchmarkId::new("parallel", &id), &g, |b, g| b.iter(|| brute_force_wfomc(black_box(g))));
        group.bench_with_input(BenchmarkId::new("sequential", &id), &g, |b, g| {
            b.iter(|| brute_force_sequential(black_box(g)))
        });
    }
    group.finish();
}

fn engine(c: &mut Criterion) {
    let mut group = c.benchmark_group("engine");
    group.sample_size(10);
    let cases = [
        ("symtrans_rd", SYMTRANS, vec![("p", 20)], Mode::RD),
        ("symtrans_r", SYMTRANS, vec![("p", 7)], Mode::R),
        ("s4_rd", S4, vec![("dx", 8), ("dy", 8)], Mode::RD),
        ("smokers_rd", SMOKERS, vec![("people", 100)], Mode::RD),
    ];
    for (name, src, sizes, mode) in cases {
        let t = load(src, &sizes);
        let cfg = EngineConfig::new(mode).with_ground_limit(1_000);
        group.bench_function(name, |b| b.iter(|| wfomc(black_box(&t.theory), &cfg).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, oracle, engine);
criterion_main!(benches);
