//! Identity and property suites, run as a pass/fail matrix.
//!
//! Each suite checks a family of exact or interval-certified statements over
//! a fixed range and reports the number of cases and the first failure.

use std::ops::RangeInclusive;

use num_bigint::BigInt;
use num_integer::Roots;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebraic::{
    self, alpha_in_bracket, binet_full, certify_binet_error, conjugate_roots, dominant_root, escalate,
    f_k_eval, height_f_k, lemma4_decompose, CAP_DIGITS, HEIGHT_K_CAP, START_DIGITS,
};
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::kfib::{cooper_howard, generate_by_window, segment_closed_form, truncated_expansion, KFibTable};
use crate::reduction::{dujella_petho, nearest_int_dist, ReductionInstance, ReductionOutcome};

const SEED: u64 = 0x6b66_6962;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteResult {
    pub name: String,
    pub cases: usize,
    pub passed: bool,
    /// First failure, empty on success.
    pub detail: String,
}

/// Accumulates cases and keeps the first failure.
struct Tally {
    name: &'static str,
    cases: usize,
    failure: Option<String>,
}

impl Tally {
    fn new(name: &'static str) -> Self {
        Tally { name, cases: 0, failure: None }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok && self.failure.is_none() {
            self.failure = Some(what());
        }
    }

    fn result(&mut self, r: Result<()>, what: impl FnOnce() -> String) {
        match r {
            Ok(()) => self.check(true, String::new),
            Err(e) => self.check(false, || format!("{}: {e}", what())),
        }
    }

    fn finish(self) -> SuiteResult {
        SuiteResult {
            name: self.name.to_string(),
            cases: self.cases,
            passed: self.failure.is_none() && self.cases > 0,
            detail: self.failure.unwrap_or_default(),
        }
    }
}

/// Ranges for every suite. [`PropertyPlan::restricted`] intersects the
/// per-suite `k` ranges with a caller range.
#[derive(Clone, Debug)]
pub struct PropertyPlan {
    pub cooper_howard: RangeInclusive<u32>,
    pub segment: RangeInclusive<u32>,
    pub growth: RangeInclusive<u32>,
    pub binet: RangeInclusive<u32>,
    pub roots: RangeInclusive<u32>,
    pub monotone: RangeInclusive<u32>,
    pub heights: RangeInclusive<u32>,
    pub lemma4_k: RangeInclusive<u32>,
    pub lemma4_samples: usize,
    pub expansion_samples: usize,
    pub reduction_instances: usize,
}

impl Default for PropertyPlan {
    fn default() -> Self {
        PropertyPlan {
            cooper_howard: 2..=12,
            segment: 3..=50,
            growth: 2..=20,
            binet: 2..=10,
            roots: 2..=60,
            monotone: 2..=100,
            heights: 2..=HEIGHT_K_CAP,
            lemma4_k: 3..=200,
            lemma4_samples: 200,
            expansion_samples: 500,
            reduction_instances: 20,
        }
    }
}

fn clip(r: &RangeInclusive<u32>, lo: u32, hi: u32) -> RangeInclusive<u32> {
    (*r.start()).max(lo)..=(*r.end()).min(hi)
}

impl PropertyPlan {
    pub fn restricted(k_min: u32, k_max: u32) -> Self {
        let d = PropertyPlan::default();
        PropertyPlan {
            cooper_howard: clip(&d.cooper_howard, k_min, k_max),
            segment: clip(&d.segment, k_min, k_max),
            growth: clip(&d.growth, k_min, k_max),
            binet: clip(&d.binet, k_min, k_max),
            roots: clip(&d.roots, k_min, k_max),
            monotone: clip(&d.monotone, k_min, k_max),
            heights: clip(&d.heights, k_min, k_max),
            lemma4_k: clip(&d.lemma4_k, k_min, k_max),
            ..d
        }
    }
}

/// Runs every suite in a fixed order.
pub fn run_suites(plan: &PropertyPlan) -> Vec<SuiteResult> {
    let mut out = vec![
        cooper_howard_suite(plan.cooper_howard.clone()),
        segment_suite(plan.segment.clone()),
        recurrence_suite(plan.growth.clone()),
        growth_suite(plan.growth.clone()),
        expansion_suite(plan.expansion_samples),
        binet_suite(plan.binet.clone()),
        root_suite(plan.roots.clone()),
        monotone_suite(plan.monotone.clone()),
        lemma4_suite(plan.lemma4_k.clone(), plan.lemma4_samples),
        height_suite(plan.heights.clone()),
        reduction_oracle_suite(plan.reduction_instances),
    ];
    // suites whose range was emptied by a restriction are dropped
    out.retain(|s| s.cases > 0 || !s.detail.is_empty());
    out
}

/// Cooper-Howard expansion against the recurrence for `n <= 300`.
pub fn cooper_howard_suite(ks: RangeInclusive<u32>) -> SuiteResult {
    let mut t = Tally::new("cooper_howard");
    for k in ks {
        let table = match KFibTable::generate(k, 300) {
            Ok(t) => t,
            Err(e) => {
                t.check(false, || format!("k={k}: {e}"));
                continue;
            }
        };
        for n in (k as i64 + 2)..=300 {
            let ok = cooper_howard(k, n).ok().as_ref() == table.get(n);
            t.check(ok, || format!("k={k}, n={n}"));
        }
    }
    t.finish()
}

/// `F_n = 2^(n-2) - (n-k) 2^(n-k-3)` on `k+2 <= n <= 2k+2`.
pub fn segment_suite(ks: RangeInclusive<u32>) -> SuiteResult {
    let mut t = Tally::new("segment_closed_form");
    for k in ks {
        let top = 2 * k as i64 + 2;
        let table = KFibTable::generate(k, top).expect("k >= 2");
        for n in (k as i64 + 2)..=top {
            let ok = segment_closed_form(k, n).ok().as_ref() == table.get(n);
            t.check(ok, || format!("k={k}, n={n}"));
        }
    }
    t.finish()
}

/// Three-term recursion and the window generator agree with the table.
pub fn recurrence_suite(ks: RangeInclusive<u32>) -> SuiteResult {
    let mut t = Tally::new("recurrence");
    for k in ks {
        let table = KFibTable::generate(k, 400).expect("k >= 2");
        let window = generate_by_window(k, 400);
        t.check(window.as_slice() == table.positive_terms(), || format!("k={k}: window generator"));
        for n in 3..=400 {
            let ok = table
                .term_three_recursion(n)
                .is_ok_and(|v| Some(&v) == table.get(n).map(|x| BigInt::from(x.clone())).as_ref());
            t.check(ok, || format!("k={k}, n={n}: three-term recursion"));
        }
    }
    t.finish()
}

/// `F_n < 2^(n-2)` for `n >= k+2` and `alpha^(n-2) <= F_n <= alpha^(n-1)`.
pub fn growth_suite(ks: RangeInclusive<u32>) -> SuiteResult {
    let mut t = Tally::new("growth");
    for k in ks {
        let table = KFibTable::generate(k, 400).expect("k >= 2");
        for n in (k as i64 + 2)..=400 {
            let f = table.get(n).unwrap();
            t.check(f.bits() < n as u64 - 1, || format!("k={k}, n={n}: F_n < 2^(n-2)"));
        }
        // alpha^400 needs about 400 bits before the fractional part is useful
        let ctx = match dominant_root(k, 160) {
            Ok(c) => c,
            Err(e) => {
                t.check(false, || format!("k={k}: {e}"));
                continue;
            }
        };
        let a = &ctx.alpha;
        let p = a.prec();
        let mut lower = a.recip();
        let mut upper = Interval::one(p);
        for n in 1..=400i64 {
            let f = Interval::from_int(BigInt::from(table.get(n).unwrap().clone()), p);
            let ok = lower.certainly_le(&f) && f.certainly_le(&upper);
            t.check(ok, || format!("k={k}, n={n}: alpha^(n-2) <= F_n <= alpha^(n-1)"));
            lower = upper.clone();
            upper = &upper * a;
        }
    }
    t.finish()
}

/// The truncated expansion's remainder bound on random `(k, n, J)`.
pub fn expansion_suite(samples: usize) -> SuiteResult {
    let mut t = Tally::new("truncated_expansion");
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    for _ in 0..samples {
        let k: u32 = rng.gen_range(3..=40);
        let hi = ((1i64 << k.min(20)) - 1).min(600);
        let n = rng.gen_range(k as i64 + 2..=hi.max(k as i64 + 2));
        let order = rng.gen_range(1..=2u32);
        let table = KFibTable::generate(k, n).expect("k >= 2");
        let ok = truncated_expansion(k, n, order).is_ok_and(|e| {
            e.holds_for(table.get(n).unwrap()) && (e.coefficients[0] == BigInt::from(k as i64 - n))
        });
        t.check(ok, || format!("k={k}, n={n}, J={order}"));
    }
    t.finish()
}

/// `|F_n - f_k(alpha) alpha^(n-1)| < 1/2` for `n <= 200`, and the full Binet
/// sum isolating `F_n` for `2 <= n <= 200`.
pub fn binet_suite(ks: RangeInclusive<u32>) -> SuiteResult {
    let mut t = Tally::new("binet");
    for k in ks {
        let table = KFibTable::generate(k, 200).expect("k >= 2");
        let r = escalate(START_DIGITS, CAP_DIGITS, |d| {
            let ctx = conjugate_roots(k, d)?;
            for n in (2 - k as i64)..=200 {
                let exact = BigInt::from(table.get(n).unwrap().clone());
                certify_binet_error(&ctx, n, &exact)?;
                if n >= 2 {
                    let v = binet_full(&ctx, n)?;
                    if v.unique_integer() != Some(exact.clone()) {
                        return Err(Error::Certification(format!("Binet sum at n={n} misses F_n")));
                    }
                }
            }
            Ok(())
        });
        t.result(r, || format!("k={k}"));
    }
    t.finish()
}

/// Bracket, conjugate moduli, `f_k(alpha)` range, `|f_k|` at the conjugates,
/// the norm of `f_k(alpha)` and monotonicity of `f_k` on the bracket.
pub fn root_suite(ks: RangeInclusive<u32>) -> SuiteResult {
    let mut t = Tally::new("roots");
    for k in ks {
        let r = escalate(START_DIGITS, CAP_DIGITS, |d| {
            let ctx = conjugate_roots(k, d)?;
            ctx.check_invariants()?;
            let p = ctx.bits();
            let left = &Interval::from_int(2, p) - &Interval::one(p).mul_pow2(1 - k as i64);
            let f_left = f_k_eval(k, &left)?;
            let f_two = f_k_eval(k, &Interval::from_int(2, p))?;
            if !(f_left.certainly_gt(&ctx.f_alpha) && ctx.f_alpha.certainly_gt(&f_two)) {
                return Err(Error::Precision("f_k ordering on the bracket undecided".into()));
            }
            Ok(())
        });
        t.result(r, || format!("k={k}"));
    }
    t.finish()
}

/// `alpha(k) < alpha(k+1)` and both lie in their brackets.
pub fn monotone_suite(ks: RangeInclusive<u32>) -> SuiteResult {
    let mut t = Tally::new("alpha_monotone");
    let mut prev: Option<Interval> = None;
    for k in ks {
        match dominant_root(k, 64) {
            Ok(ctx) => {
                t.check(alpha_in_bracket(k, &ctx.alpha), || format!("k={k}: bracket"));
                if let Some(a) = &prev {
                    t.check(a.certainly_lt(&ctx.alpha), || format!("k={k}: alpha not increasing"));
                }
                prev = Some(ctx.alpha);
            }
            Err(e) => t.check(false, || format!("k={k}: {e}")),
        }
    }
    t.finish()
}

/// The `delta`/`eta` bounds on random `(k, r)` with `1 < r`, `(r-1)^2 < 2^k`.
pub fn lemma4_suite(ks: RangeInclusive<u32>, samples: usize) -> SuiteResult {
    let mut t = Tally::new("lemma4");
    if ks.is_empty() {
        return t.finish();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 4);
    for _ in 0..samples {
        let k = rng.gen_range(ks.clone());
        // r - 1 < 2^(k/2), kept below 2000 so alpha^(r-1) stays cheap
        let r_top = if k >= 22 { 2000 } else { (((1i64 << k) - 1).sqrt() + 1).min(2000) };
        let r = rng.gen_range(2..=r_top.max(2));
        let start = START_DIGITS.max((r as f64 * 0.302) as u32 + 40);
        let res = escalate(start, CAP_DIGITS, |d| {
            let ctx = dominant_root(k, d)?;
            lemma4_decompose(&ctx, r).map(|_| ())
        });
        t.result(res, || format!("k={k}, r={r}"));
    }
    t.finish()
}

/// `h(f_k(alpha)) < 3 log k` from the exact minimal polynomial.
pub fn height_suite(ks: RangeInclusive<u32>) -> SuiteResult {
    let mut t = Tally::new("height");
    for k in ks {
        let r = escalate(START_DIGITS, CAP_DIGITS, |d| height_f_k(k, HEIGHT_K_CAP, d).map(|_| ()));
        t.result(r, || format!("k={k}"));
    }
    t.finish()
}

/// Largest real `w` allowed by the inequality at one `u`, or `None` when the
/// form is not positive (one-sided) or vanishes.
fn largest_w(inst: &ReductionInstance, u: i64) -> Result<Option<Interval>> {
    let x = &inst.gamma.mul_int(&BigInt::from(u)) + &inst.mu;
    let d = if inst.two_sided {
        nearest_int_dist(&x)
    } else {
        // smallest positive value of x - v over integers v
        let v = x.floor_lo();
        let d = &x - &Interval::from_int(v, x.prec());
        if d.certainly_lt(&Interval::one(x.prec())) {
            d
        } else {
            return Err(Error::Precision(format!("fractional part at u={u} undecided")));
        }
    };
    if d.contains_zero() {
        if d.is_point() {
            return Ok(None);
        }
        return Err(Error::Precision(format!("form at u={u} not separated from 0")));
    }
    Ok(Some(inst.a.div(&d).ln().div(&inst.b.ln())))
}

/// Brute force over `1 <= u <= M`: every `w` with a solution must lie below
/// the returned bound.
pub fn reduction_oracle(inst: &ReductionInstance, out: &ReductionOutcome) -> Result<()> {
    let m: i64 = (&inst.m).try_into().map_err(|_| Error::InvalidArgument("M too large for brute force".into()))?;
    for u in 1..=m {
        if let Some(w) = largest_w(inst, u)? {
            if !w.certainly_le(&out.w_bound) {
                return Err(Error::Certification(format!(
                    "u={u} admits w up to {} beyond the bound {}",
                    w.mid_f64(),
                    out.w_bound.mid_f64()
                )));
            }
        }
    }
    Ok(())
}

/// Synthetic reduction instances with `M <= 1000`; the first is
/// `gamma = sqrt 2`, `mu = 1/3`, `A = 1`, `B = 2`, `M = 1000`.
pub fn synthetic_instances(count: usize) -> Vec<ReductionInstance> {
    let p = 256;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 1);
    let mut out = vec![ReductionInstance {
        gamma: Interval::from_int(2, p).sqrt(),
        mu: Interval::from_ratio(&BigInt::one(), &BigInt::from(3), p),
        a: Interval::one(p),
        b: Interval::from_int(2, p),
        m: BigInt::from(1000),
        two_sided: false,
    }];
    let tribonacci = dominant_root(3, 80).expect("k = 3").alpha.with_prec(p);
    while out.len() < count {
        let gamma = if rng.gen_bool(0.5) {
            let r = loop {
                let r: i64 = rng.gen_range(2..=500);
                let s = (r as f64).sqrt() as i64;
                if s * s != r && (s + 1) * (s + 1) != r {
                    break r;
                }
            };
            Interval::from_int(r, p).sqrt()
        } else {
            let a: i64 = rng.gen_range(2..=30);
            let b: i64 = rng.gen_range(a + 1..=40);
            Interval::from_int(a, p).ln().div(&Interval::from_int(b, p).ln())
        };
        let num: i64 = rng.gen_range(1..=50);
        let den: i64 = rng.gen_range(2..=97);
        let mu = &Interval::from_ratio(&BigInt::from(num), &BigInt::from(den), p)
            + &Interval::from_int(rng.gen_range(2..=50i64), p).sqrt().mul_pow2(-3);
        let b = match rng.gen_range(0..3) {
            0 => Interval::from_int(2, p),
            1 => Interval::from_int(3, p),
            _ => tribonacci.clone(),
        };
        out.push(ReductionInstance {
            gamma,
            mu,
            a: Interval::from_int(rng.gen_range(1..=10i64), p),
            b,
            m: BigInt::from(rng.gen_range(10..=1000i64)),
            two_sided: rng.gen_bool(0.5),
        });
    }
    out
}

pub fn reduction_oracle_suite(count: usize) -> SuiteResult {
    let mut t = Tally::new("reduction_oracle");
    for (i, inst) in synthetic_instances(count).iter().enumerate() {
        let r = dujella_petho(inst).and_then(|o| reduction_oracle(inst, &o));
        t.result(r, || format!("instance {i}"));
    }
    t.finish()
}

/// The `delta`/`eta` decomposition at one point, exposed for the command line.
pub fn lemma4_point(k: u32, r: i64) -> Result<algebraic::Lemma4Decomposition> {
    escalate(START_DIGITS, CAP_DIGITS, |d| lemma4_decompose(&dominant_root(k, d)?, r))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suites_pass() {
        for s in [
            cooper_howard_suite(2..=4),
            segment_suite(3..=6),
            recurrence_suite(2..=3),
            growth_suite(2..=3),
            expansion_suite(20),
            binet_suite(2..=3),
            root_suite(2..=5),
            monotone_suite(2..=8),
            lemma4_suite(3..=30, 10),
            height_suite(2..=4),
            reduction_oracle_suite(3),
        ] {
            assert!(s.passed, "{}: {}", s.name, s.detail);
            assert!(s.cases > 0);
        }
    }

    #[test]
    fn oracle_catches_a_false_bound() {
        let inst = &synthetic_instances(1)[0];
        let mut o = dujella_petho(inst).unwrap();
        reduction_oracle(inst, &o).unwrap();
        o.w_bound = Interval::zero(o.w_bound.prec());
        assert!(reduction_oracle(inst, &o).is_err());
    }

    #[test]
    fn restriction_clips_ranges() {
        let p = PropertyPlan::restricted(5, 8);
        assert_eq!(p.cooper_howard, 5..=8);
        assert_eq!(p.segment, 5..=8);
        assert_eq!(p.heights, 5..=8);
        let q = PropertyPlan::restricted(100, 200);
        assert!(q.cooper_howard.is_empty());
    }

    #[test]
    fn failure_is_recorded() {
        let mut t = Tally::new("x");
        t.check(true, String::new);
        t.check(false, || "first".into());
        t.check(false, || "second".into());
        let r = t.finish();
        assert!(!r.passed);
        assert_eq!((r.cases, r.detail.as_str()), (3, "first"));
    }
}
