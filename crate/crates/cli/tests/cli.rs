use std::path::PathBuf;
use std::process::{Command, Output};

fn theory(name: &str) -> String {
    format!("{}/theories/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn scratch(name: &str, text: &str) -> String {
    let p = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

fn wfomc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wfomc")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn count_prints_rational_and_decimal() {
    let o = wfomc(&["count", &theory("smokers.th"), "--set-domain", "people=2"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "841/625 (1.34560000000)");
}

#[test]
fn count_prints_integers_bare() {
    let o = wfomc(&["count", &theory("symtrans.th"), "--set-domain", "p=3"]);
    assert_eq!(stdout(&o).trim(), "15");
    let o = wfomc(&["count", &theory("symtrans.th"), "--set-domain", "p=3", "--mode", "R"]);
    assert_eq!(stdout(&o).trim(), "15");
}

#[test]
fn count_stats_lists_counters() {
    let o = wfomc(&["count", &theory("symtrans.th"), "--stats"]);
    let out = stdout(&o);
    for key in ["nodes:", "cache_hits:", "domain_recursions:", "groundings:"] {
        assert!(out.contains(key), "{key} missing from {out}");
    }
}

#[test]
fn ratio_of_birthday_variants() {
    let o = wfomc(&[
        "ratio",
        &theory("birthday.th"),
        &theory("birthday_noinj.th"),
        "--set-domain",
        "people=2",
        "--set-domain",
        "days=3",
    ]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "2/3 (0.666666666667)");
}

#[test]
fn ratio_with_zero_denominator_exits_2() {
    let zero = scratch("zero.th", "domain p 2\npredicate A(p)\nA(x)\n!A(x)\n");
    let o = wfomc(&["ratio", &theory("smokers.th"), &zero]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn parse_errors_exit_1() {
    let bad = scratch("bad.th", "domain p 2\npredicate A(p)\nB(x)\n");
    assert_eq!(wfomc(&["count", &bad]).status.code(), Some(1));
    let o = wfomc(&["count", &theory("smokers.th"), "--set-domain", "nope=3"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn limits_exit_2() {
    let o = wfomc(&["count", &theory("symtrans.th"), "--budget", "1"]);
    assert_eq!(o.status.code(), Some(2));
    let o = wfomc(&["count", &theory("transitivity.th"), "--mode", "R", "--ground-limit", "2"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn oracle_agrees_and_respects_limit() {
    let o = wfomc(&["oracle", &theory("symtrans.th"), "--set-domain", "p=4"]);
    assert_eq!(stdout(&o).trim(), "52");
    let o = wfomc(&["oracle", &theory("symtrans.th"), "--set-domain", "p=5", "--limit", "20"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn check_reports_every_class() {
    let o = wfomc(&["check", &theory("volunteers.th")]);
    let out = stdout(&o);
    let verdicts: Vec<(&str, &str)> = out
        .lines()
        .map(|l| {
            let (class, rest) = l.split_once(": ").unwrap();
            (class, rest.split_whitespace().next().unwrap())
        })
        .collect();
    assert_eq!(verdicts, vec![("FO2", "no"), ("RU", "no"), ("S2FO2", "yes"), ("S2RU", "yes")]);
    assert!(out.contains("alpha predicates {Assigned}"));
}

#[test]
fn bench_writes_csv_with_timeouts() {
    let csv = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("bench.csv");
    let o = wfomc(&[
        "bench",
        &theory("symtrans.th"),
        "--domain",
        "p",
        "--sizes",
        "2:6:2",
        "--mode",
        "both",
        "--ground-limit",
        "100",
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "theory,mode,n,seconds,nodes,cache_hits,value,status");
    assert_eq!(lines.len(), 7);
    assert!(lines[1].starts_with("symtrans,R,2,"));
    assert!(lines.iter().skip(1).all(|l| l.ends_with(",ok")));
    assert!(lines[6].contains(",RD,6,") && lines[6].contains(",877,"));

    let o = wfomc(&["bench", &theory("symtrans.th"), "--domain", "p", "--sizes", "30:32", "--timeout", "0.001"]);
    let out = stdout(&o);
    let rows: Vec<&str> = out.lines().skip(1).collect();
    assert!(rows[0].ends_with(",timeout"), "{out}");
    assert!(rows[1..].iter().all(|r| r.ends_with(",skipped")), "{out}");
}

#[test]
fn bench_records_row_errors_and_continues() {
    let o = wfomc(&["bench", &theory("transitivity.th"), "--domain", "p", "--sizes", "2:7:5", "--mode", "R"]);
    assert!(o.status.success());
    let out = stdout(&o);
    let rows: Vec<&str> = out.lines().skip(1).collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[0].ends_with(",ok"));
    assert!(rows[1].contains("grounding-too-large"), "{out}");
}

#[test]
fn bundled_theories_count_without_grounding() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("theories");
    let mut seen = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let name = path.file_name().unwrap().to_string_lossy().into_owned();
        let o = wfomc(&["count", path.to_str().unwrap(), "--stats"]);
        assert!(o.status.success(), "{name}");
        let out = stdout(&o);
        let grounded = out.lines().any(|l| l.starts_with("groundings:") && l != "groundings: 0");
        assert_eq!(grounded, name == "transitivity.th", "{name}: {out}");
        seen += 1;
    }
    assert!(seen >= 9);
}
