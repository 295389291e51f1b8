mod common;

use common::*;
use wfomc_core::engine::Mode;

fn agree(src: &str, sizes: &[(&str, u64)]) {
    let c = load(src, sizes);
    let o = oracle(&c);
    for mode in [Mode::R, Mode::RD] {
        assert_eq!(engine(&c, mode), o, "{mode:?} {sizes:?}\n{src}");
    }
}

#[test]
fn smokers_matches_oracle() {
    for n in 1..=6 {
        agree(SMOKERS, &[("people", n)]);
    }
}

#[test]
fn symtrans_matches_oracle() {
    for n in 1..=4 {
        agree(SYMTRANS, &[("p", n)]);
    }
}

#[test]
fn s4_matches_oracle() {
    for (a, b) in [(1, 1), (1, 2), (2, 2), (2, 3), (3, 2), (3, 3)] {
        agree(S4, &[("dx", a), ("dy", b)]);
    }
}

#[test]
fn birthday_matches_oracle() {
    for (n, d) in [(1, 1), (2, 3), (3, 4), (2, 5)] {
        agree(BIRTHDAY, &[("people", n), ("days", d)]);
        agree(BIRTHDAY_NOINJ, &[("people", n), ("days", d)]);
    }
}

#[test]
fn birthday_closed_forms() {
    for (n, d) in [(2i64, 3i64), (3, 4), (3, 5), (4, 7)] {
        let falling: i64 = (0..n).map(|i| d - i).product();
        let with = load(BIRTHDAY, &[("people", n as u64), ("days", d as u64)]);
        let without = load(BIRTHDAY_NOINJ, &[("people", n as u64), ("days", d as u64)]);
        assert_eq!(engine(&with, Mode::RD), int(falling));
        assert_eq!(engine(&without, Mode::RD), int(d.pow(n as u32)));
    }
}

#[test]
fn transitivity_matches_oracle() {
    for n in 1..=4 {
        agree(TRANSITIVITY, &[("p", n)]);
    }
}
