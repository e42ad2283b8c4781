//! Exact search for `F_n^(k) + F_m^(k) = 2^a` and classification of the hits.
//!
//! The known solutions come in three families:
//!
//! * diagonal `(1,1,1)` and `(t,t,t-1)` for `2 <= t <= k+1`,
//! * the sporadic `(2,1,1)`,
//! * `(k+2^l, 2^l+l-1, k+2^l-2)` whenever `2^l + l - 2 <= k`.
//!
//! Since `F_1 = F_2`, a hit with `m = 1` has a twin with `m = 2`. Both are
//! reported as found; [`SolutionRecord::canonical`] folds them together.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kfib::{power_of_two_exponent, KFibTable};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Family {
    ADiagonal,
    BSporadic,
    CParametric(u32),
    Unexpected,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::ADiagonal => write!(f, "A"),
            Family::BSporadic => write!(f, "B"),
            Family::CParametric(l) => write!(f, "C({l})"),
            Family::Unexpected => write!(f, "unexpected"),
        }
    }
}

/// Position of `a` relative to `n - 2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ARelation {
    Below,
    Equal,
    /// Only the diagonal and `(2,1,1)` land here.
    Above,
}

impl ARelation {
    pub fn of(n: i64, a: i64) -> ARelation {
        match a.cmp(&(n - 2)) {
            Ordering::Less => ARelation::Below,
            Ordering::Equal => ARelation::Equal,
            Ordering::Greater => ARelation::Above,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AFilter {
    /// `a < n - 2`
    Below,
    /// `a = n - 2`
    Equal,
    All,
}

impl AFilter {
    pub fn accepts(self, rel: ARelation) -> bool {
        match self {
            AFilter::Below => rel == ARelation::Below,
            AFilter::Equal => rel == ARelation::Equal,
            AFilter::All => true,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SolutionRecord {
    pub k: u32,
    pub n: i64,
    pub m: i64,
    pub a: i64,
    pub family: Family,
    pub a_relation: ARelation,
}

impl SolutionRecord {
    /// Classifies `(k, n, m, a)` without re-verifying it.
    pub fn new(k: u32, n: i64, m: i64, a: i64) -> SolutionRecord {
        SolutionRecord { k, n, m, a, family: classify(k, n, m, a), a_relation: ARelation::of(n, a) }
    }

    /// Key with `m = 1` folded to `m = 2`, except for `(2,1,1)`.
    pub fn canonical(&self) -> (u32, i64, i64, i64) {
        let m = if self.m == 1 && self.n > 2 { 2 } else { self.m };
        (self.k, self.n, m, self.a)
    }

    /// Re-checks the equation against a freshly generated table.
    pub fn reverify(&self) -> bool {
        match KFibTable::generate(self.k, self.n.max(self.m)) {
            Ok(t) => verify_in(&t, self.n, self.m) == Some(self.a),
            Err(_) => false,
        }
    }
}

/// `Some(a)` iff `F_n + F_m = 2^a`.
pub fn verify_equation(k: u32, n: i64, m: i64) -> Option<i64> {
    if k < 2 || m < 1 || n < m {
        return None;
    }
    let t = KFibTable::generate(k, n).ok()?;
    verify_in(&t, n, m)
}

fn verify_in(t: &KFibTable, n: i64, m: i64) -> Option<i64> {
    let s = t.get(n)? + t.get(m)?;
    power_of_two_exponent(&s).map(|a| a as i64)
}

/// Smallest `l` is 1; returns every `l` with `2^l + l - 2 <= k`.
pub fn family_c_levels(k: u32) -> Vec<u32> {
    (1u32..)
        .take_while(|&l| l < 40 && (1u64 << l) + l as u64 - 2 <= k as u64)
        .collect()
}

/// `(n, m, a)` of the parametric family at level `l`.
pub fn family_c_triple(k: u32, l: u32) -> (i64, i64, i64) {
    let p = 1i64 << l;
    (k as i64 + p, p + l as i64 - 1, k as i64 + p - 2)
}

/// Builds and verifies the parametric solutions for `k`.
pub fn family_c_enumerate(k: u32) -> Result<Vec<SolutionRecord>> {
    if k < 3 {
        return Err(Error::InvalidArgument(format!("family C needs k >= 3, got {k}")));
    }
    let levels = family_c_levels(k);
    let n_top = levels.iter().map(|&l| family_c_triple(k, l).0).max().unwrap_or(1);
    let table = KFibTable::generate(k, n_top)?;
    let mut out = Vec::with_capacity(levels.len());
    for l in levels {
        let (n, m, a) = family_c_triple(k, l);
        if m > k as i64 + 1 || n > 2 * k as i64 + 1 {
            return Err(Error::Certification(format!(
                "family C at k={k}, l={l} gives (n,m)=({n},{m}) outside m<=k+1, n<=2k+1"
            )));
        }
        if verify_in(&table, n, m) != Some(a) {
            return Err(Error::Certification(format!(
                "family C at k={k}, l={l}: F_{n}+F_{m} != 2^{a}"
            )));
        }
        out.push(SolutionRecord::new(k, n, m, a));
    }
    Ok(out)
}

/// All `(n, a)` with `n <= n_max` and `F_n = 2^(a-1)`.
pub fn pure_power_scan(k: u32, n_max: i64) -> Result<Vec<(i64, i64)>> {
    if k < 3 {
        return Err(Error::InvalidArgument(format!("pure power scan needs k >= 3, got {k}")));
    }
    if n_max < 1 {
        return Ok(Vec::new());
    }
    let t = KFibTable::generate(k, n_max)?;
    Ok(t.positive_terms()
        .iter()
        .enumerate()
        .filter_map(|(i, f)| power_of_two_exponent(f).map(|e| (i as i64 + 1, e as i64 + 1)))
        .collect())
}

pub fn classify(k: u32, n: i64, m: i64, a: i64) -> Family {
    let k = k as i64;
    if (n, m, a) == (2, 1, 1) {
        return Family::BSporadic;
    }
    if n == m && ((n, a) == (1, 1) || (2 <= n && n <= k + 1 && a == n - 1)) {
        return Family::ADiagonal;
    }
    let m = if m == 1 { 2 } else { m };
    for l in family_c_levels(k as u32) {
        if (n, m, a) == family_c_triple(k as u32, l) {
            return Family::CParametric(l);
        }
    }
    Family::Unexpected
}

/// Solutions with `n < k+2`, where every term is a power of two, listed directly.
pub fn small_index_solutions(k: u32, n_bound: i64) -> Vec<SolutionRecord> {
    let mut out = vec![SolutionRecord::new(k, 1, 1, 1), SolutionRecord::new(k, 2, 1, 1)];
    for t in 2..=(k as i64 + 1) {
        out.push(SolutionRecord::new(k, t, t, t - 1));
    }
    out.retain(|r| r.n <= n_bound);
    out.sort();
    out
}

/// The solutions of the classification inside `n <= n_bound`, with both
/// `m = 1` and `m = 2` listed for the level-1 parametric family.
pub fn expected_solutions(k: u32, n_bound: i64, filter: AFilter) -> Vec<SolutionRecord> {
    let mut out = small_index_solutions(k, n_bound);
    for l in family_c_levels(k) {
        let (n, m, a) = family_c_triple(k, l);
        out.push(SolutionRecord::new(k, n, m, a));
        if m == 2 {
            out.push(SolutionRecord::new(k, n, 1, a));
        }
    }
    out.retain(|r| r.n <= n_bound && filter.accepts(r.a_relation));
    out.sort();
    out
}

/// Hits with `k+2 <= n <= n_bound`, `1 <= m < n` by checking every pair.
pub fn pairwise_scan(table: &KFibTable, n_bound: i64) -> Vec<(i64, i64, i64)> {
    let k = table.k() as i64;
    let f = table.positive_terms();
    let mut out = Vec::new();
    for n in (k + 2)..=n_bound {
        let fnn = &f[(n - 1) as usize];
        let lo_n = low_limb(fnn);
        for m in 1..n {
            let fm = &f[(m - 1) as usize];
            // The low 64 bits of a power of two are zero or a single bit.
            let lo = lo_n.wrapping_add(low_limb(fm));
            if lo != 0 && !lo.is_power_of_two() {
                continue;
            }
            if let Some(a) = power_of_two_exponent(&(fnn + fm)) {
                out.push((n, m, a as i64));
            }
        }
    }
    out
}

/// Hits with `a = n - 2` and `k+2 <= n <= n_bound`: binary search for
/// `2^(n-2) - F_n` among `F_1..F_{n-1}`.
pub fn targeted_scan(table: &KFibTable, n_bound: i64) -> Vec<(i64, i64, i64)> {
    let k = table.k() as i64;
    let f = table.positive_terms();
    let mut out = Vec::new();
    for n in (k + 2)..=n_bound {
        let p = BigUint::from(1u32) << (n - 2) as u64;
        let fnn = &f[(n - 1) as usize];
        if fnn >= &p {
            continue;
        }
        let r = p - fnn;
        let prefix = &f[..(n - 1) as usize];
        // The prefix is nondecreasing, strictly so after F_1 = F_2.
        let start = prefix.partition_point(|x| x < &r);
        for (i, x) in prefix.iter().enumerate().skip(start) {
            if x != &r {
                break;
            }
            out.push((n, i as i64 + 1, n - 2));
        }
    }
    out
}

fn low_limb(x: &BigUint) -> u64 {
    x.iter_u64_digits().next().unwrap_or(0)
}

/// Every solution for a single `k` with `n <= n_bound`, sorted.
pub fn search_k(k: u32, n_bound: i64, filter: AFilter) -> Result<Vec<SolutionRecord>> {
    if k < 3 {
        return Err(Error::InvalidArgument(format!("search needs k >= 3, got {k}")));
    }
    let mut out: Vec<SolutionRecord> = small_index_solutions(k, n_bound);
    if n_bound >= k as i64 + 2 {
        let table = KFibTable::generate(k, n_bound)?;
        let hits = match filter {
            AFilter::Equal => targeted_scan(&table, n_bound),
            _ => pairwise_scan(&table, n_bound),
        };
        out.extend(hits.into_iter().map(|(n, m, a)| SolutionRecord::new(k, n, m, a)));
        for (n, a) in pure_power_scan(k, n_bound)? {
            if n >= k as i64 + 2 {
                out.push(SolutionRecord::new(k, n, n, a));
            }
        }
    }
    out.retain(|r| filter.accepts(r.a_relation));
    for r in &out {
        if r.n > r.m && r.n >= k as i64 + 2 && r.a > r.n - 2 {
            return Err(Error::Certification(format!(
                "hit {:?} violates a <= n-2",
                (r.k, r.n, r.m, r.a)
            )));
        }
    }
    out.sort();
    Ok(out)
}

/// Runs [`search_k`] over `ks` in parallel and merges by `(k, n, m)`.
/// `n_bound` may depend on `k`; `on_done` sees each finished `k`.
pub fn exhaustive_search<B, D>(
    ks: &[u32],
    n_bound: B,
    filter: AFilter,
    on_done: D,
) -> Result<Vec<SolutionRecord>>
where
    B: Fn(u32) -> i64 + Sync,
    D: Fn(u32, &[SolutionRecord]) + Sync,
{
    let per_k: Vec<Result<Vec<SolutionRecord>>> = ks
        .par_iter()
        .map(|&k| {
            let recs = search_k(k, n_bound(k), filter)?;
            on_done(k, &recs);
            Ok(recs)
        })
        .collect();
    let mut out = Vec::new();
    for r in per_k {
        out.extend(r?);
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// Independent oracle: window recurrence and plain addition over every pair.
pub fn naive_search(k: u32, n_bound: i64) -> Vec<(i64, i64, i64)> {
    if n_bound < 1 {
        return Vec::new();
    }
    let f = crate::kfib::generate_by_window(k, n_bound as usize);
    let mut out = Vec::new();
    for n in 1..=n_bound {
        for m in 1..=n {
            let s = &f[(n - 1) as usize] + &f[(m - 1) as usize];
            let bits = s.bits();
            if s == BigUint::from(1u32) << (bits - 1) {
                out.push((n, m, bits as i64 - 1));
            }
        }
    }
    out
}
