//! Acceptance run: the full pipeline twice (1 and 2 workers), then one
//! PASS/FAIL line per criterion, checked against the report rows rather
//! than the report's own verdicts.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::time::Instant;

use kfib_verify::cli::main_with;
use kfib_verify::interval::Interval;
use kfib_verify::properties::{run_suites, PropertyPlan};
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde_json::Value;

type Sol = (u64, i64, i64, i64);

struct Outcome {
    lines: Vec<(bool, String)>,
}

impl Outcome {
    fn check(&mut self, n: u32, ok: bool, what: &str, detail: String) {
        self.lines.push((ok, format!("{} criterion {n}: {what} ({detail})", if ok { "PASS" } else { "FAIL" })));
    }
}

fn run_all(out: &Path, jobs: usize) -> (i32, f64) {
    let args: Vec<String> = [
        "kfib-verify",
        "--jobs",
        &jobs.to_string(),
        "--out",
        out.to_str().unwrap(),
        "run",
        "--campaign",
        "all",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    let t = Instant::now();
    let code = main_with(args);
    (code, t.elapsed().as_secs_f64())
}

fn rows<'a>(report: &'a Value, key: &str) -> Vec<&'a Value> {
    report[key].as_array().map(|a| a.iter().collect()).unwrap_or_default()
}

fn by_k<'a>(v: &[&'a Value]) -> BTreeMap<u64, &'a Value> {
    v.iter().map(|r| (r["k"].as_u64().unwrap(), *r)).collect()
}

fn f(v: &Value) -> f64 {
    v.as_f64().unwrap_or(f64::NAN)
}

fn sol(v: &Value) -> Sol {
    (v["k"].as_u64().unwrap(), v["n"].as_i64().unwrap(), v["m"].as_i64().unwrap(), v["a"].as_i64().unwrap())
}

/// Parametric family at `k` (with the `m = 1` twin of the first level).
fn family_c(k: u64) -> Vec<Sol> {
    let mut out = Vec::new();
    let k = k as i64;
    let mut l = 1i64;
    while (1i64 << l) + l - 2 <= k {
        let p = 1i64 << l;
        out.push((k as u64, k + p, p + l - 1, k + p - 2));
        if l == 1 {
            out.push((k as u64, k + 2, 1, k));
        }
        l += 1;
    }
    out
}

/// Diagonal and sporadic solutions at `k`.
fn small(k: u64) -> Vec<Sol> {
    let mut out = vec![(k, 1, 1, 1), (k, 2, 1, 1)];
    for t in 2..=(k as i64 + 1) {
        out.push((k, t, t, t - 1));
    }
    out
}

fn extended(section: &Value) -> BTreeMap<u64, i64> {
    section["extended"]
        .as_array()
        .into_iter()
        .flatten()
        .map(|p| (p[0].as_u64().unwrap(), p[1].as_i64().unwrap()))
        .collect()
}

fn main() {
    let dir = tempfile::tempdir().expect("temp dir");
    let p1 = dir.path().join("report-j1.json");
    let p2 = dir.path().join("report-j2.json");
    let (code1, secs1) = run_all(&p1, 1);
    let (code2, secs2) = run_all(&p2, 2);
    let bytes1 = std::fs::read(&p1).unwrap_or_default();
    let bytes2 = std::fs::read(&p2).unwrap_or_default();
    let report: Value = serde_json::from_slice(&bytes1).unwrap_or(Value::Null);
    let timing: Value = std::fs::read(dir.path().join("report-j1.json.timing.json"))
        .ok()
        .and_then(|b| serde_json::from_slice(&b).ok())
        .unwrap_or(Value::Null);
    let secs = |name: &str| timing[name].as_f64().unwrap_or(f64::INFINITY);
    let mut o = Outcome { lines: Vec::new() };

    let red = by_k(&rows(&report, "reductions"));
    let lt_ks: Vec<u64> = (3..=340).collect();
    let eq_ks: Vec<u64> = (3..=690).collect();

    // 1. stage-1 reduction
    let s1: Vec<(u64, f64)> = lt_ks.iter().filter_map(|k| red.get(k).map(|r| (*k, f(&r["stage1_bound"])))).collect();
    let worst = s1.iter().copied().fold((0, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a });
    o.check(
        1,
        s1.len() == lt_ks.len() && worst.1 < 680.0 && secs("reductions") < 600.0,
        "stage-1 reduction on k in [3,340]: epsilon > 0, max bound on n-m < 680",
        format!("{} of {} k, max {:.3} at k={}, reductions took {:.0}s", s1.len(), lt_ks.len(), worst.1, worst.0, secs("reductions")),
    );

    // 2. stage-2 reduction
    let s2: Vec<(u64, f64)> = lt_ks
        .iter()
        .filter_map(|k| red.get(k).and_then(|r| r["stage2"]["max_bound"].as_f64()).map(|b| (*k, b)))
        .collect();
    let worst = s2.iter().copied().fold((0, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a });
    o.check(
        2,
        s2.len() == lt_ks.len() && worst.1 < 680.0,
        "stage-2 reduction on k in [3,340]: max bound on n-1 < 680",
        format!("{} of {} k, max {:.3} at k={}", s2.len(), lt_ks.len(), worst.1, worst.0),
    );

    // 3. a = n-2 reduction
    let s3: Vec<(u64, i64)> = eq_ks
        .iter()
        .filter_map(|k| red.get(k).and_then(|r| r["stage2"]["n_max"].as_i64()).map(|b| (*k, b)))
        .collect();
    let worst = s3.iter().copied().max_by_key(|x| x.1).unwrap_or((0, i64::MAX));
    o.check(
        3,
        s3.len() == eq_ks.len() && worst.1 <= 1380,
        "a = n-2 reduction on k in [3,690]: n <= 1380",
        format!("{} of {} k, max n {} at k={}", s3.len(), eq_ks.len(), worst.1, worst.0),
    );

    // 4. search with a < n-2
    let lt = &report["search_lt"];
    let lt_hits = lt["hits"].as_array().map_or(usize::MAX, |h| h.len());
    o.check(
        4,
        lt["k_min"] == 3 && lt["k_max"] == 340 && lt["n_box"] == 680 && lt_hits == 0 && secs("search-lt") < 1800.0,
        "search k in [3,340], n in [k+2,680], a < n-2: no solutions",
        format!("{lt_hits} hits, {:.1}s", secs("search-lt")),
    );

    // 5. search with a = n-2
    let eq = &report["search_eq"];
    let eq_found: BTreeSet<Sol> = eq["hits"].as_array().into_iter().flatten().map(sol).collect();
    let eq_expected: BTreeSet<Sol> = eq_ks.iter().flat_map(|&k| family_c(k)).collect();
    let tagged = eq["hits"]
        .as_array()
        .into_iter()
        .flatten()
        .all(|h| h["family"].as_str().is_some_and(|s| s.starts_with("C(")) && h["a_relation"] == "equal");
    o.check(
        5,
        eq["k_min"] == 3
            && eq["k_max"] == 690
            && eq["n_box"] == 1380
            && eq_found == eq_expected
            && tagged
            && secs("search-eq") < 1800.0,
        "search k in [3,690], n in [k+2,1380], a = n-2: exactly the parametric family",
        format!("{} hits, {} expected, {:.1}s", eq_found.len(), eq_expected.len(), secs("search-eq")),
    );

    // 6. constant chain
    let bounds = by_k(&rows(&report, "bounds"));
    let mut bad = Vec::new();
    for &k in &eq_ks {
        let Some(r) = bounds.get(&k) else {
            bad.push(format!("k={k} missing"));
            continue;
        };
        let kf = k as f64;
        let lk = kf.ln();
        let mk_int: Option<BigInt> = r["m_k"].as_str().and_then(|s| s.parse().ok());
        let mk = mk_int.as_ref().and_then(|m| m.to_f64()).unwrap_or(f64::INFINITY);
        // integer M <= x iff M <= floor(x); x enclosed at 256 bits
        let lemma3 = {
            let p = 256;
            let kk = Interval::from_int(k, p);
            &(&Interval::from_int(BigInt::from(666) * BigInt::from(10).pow(25), p) * &kk.powi(7)) * &kk.ln().powi(5)
        };
        let checks = [
            r["ok"] == true,
            f(&r["c_k"]) <= 1.5e11 * kf * kf * (1.0 + lk),
            f(&r["stage1_coefficient"]) <= 8.75e11,
            f(&r["stage2_coefficient"]) <= 5.12e23,
            mk_int.is_some_and(|m| Interval::from_int(m, 256).certainly_le(&lemma3)),
            f(&r["n_bound"]) <= mk,
        ];
        if let Some(i) = checks.iter().position(|c| !c) {
            bad.push(format!("k={k} check {i}"));
        }
    }
    o.check(
        6,
        bad.is_empty(),
        "constant chain for k in [3,690]: C_k, both coefficients, M_k and the n bound",
        if bad.is_empty() { format!("{} values of k", bounds.len()) } else { bad.join(", ") },
    );

    // 7. identity and property suites, full plan
    let t = Instant::now();
    let suites = run_suites(&PropertyPlan::default());
    let t7 = t.elapsed().as_secs_f64();
    let names: BTreeSet<&str> = suites.iter().map(|s| s.name.as_str()).collect();
    let failed: Vec<String> = suites.iter().filter(|s| !s.passed).map(|s| format!("{}: {}", s.name, s.detail)).collect();
    let reported_ok = rows(&report, "properties").iter().all(|s| s["passed"] == true) && report["properties"].is_array();
    o.check(
        7,
        failed.is_empty() && reported_ok && names.len() >= 10 && t7 < 300.0,
        "identity and property suites",
        if failed.is_empty() { format!("{} suites in {t7:.1}s", names.len()) } else { failed.join("; ") },
    );

    // 8. end to end
    let found: BTreeSet<Sol> = rows(&report, "solutions").into_iter().map(sol).collect();
    let lt_box = extended(lt);
    let eq_box = extended(eq);
    let mut expected = BTreeSet::new();
    for &k in &lt_ks {
        let b = lt_box.get(&k).copied().unwrap_or(680);
        expected.extend(small(k).into_iter().chain(family_c(k)).filter(|s| s.1 <= b));
    }
    for &k in &eq_ks {
        let b = eq_box.get(&k).copied().unwrap_or(1380);
        expected.extend(family_c(k).into_iter().filter(|s| s.1 <= b));
    }
    o.check(
        8,
        code1 == 0 && code2 == 0 && !bytes1.is_empty() && bytes1 == bytes2 && found == expected && report["verified"] == true,
        "run --campaign all: exit 0, solutions equal the families in the boxes, identical for 1 and 2 workers",
        format!(
            "exit {code1}/{code2}, {} solutions, {} expected, identical bytes: {}, {secs1:.0}s + {secs2:.0}s",
            found.len(),
            expected.len(),
            bytes1 == bytes2
        ),
    );

    for (_, line) in &o.lines {
        println!("{line}");
    }
    if o.lines.iter().any(|(ok, _)| !ok) {
        std::process::exit(1);
    }
}
