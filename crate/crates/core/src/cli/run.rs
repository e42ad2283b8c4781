//! Campaign orchestration: bounds, reductions, searches, properties.

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::Serialize;

use super::cache::RootCache;
use super::checkpoint::Checkpoint;
use super::config::{Campaign, CampaignConfig, EQ_BOX, LT_BOX};
use super::report::{
    AssertionRow, BoundRow, ConfigSummary, PrecisionSummary, ReductionRow, SearchSection, SolutionRow, Stage2Row,
    VerificationReport,
};
use crate::error::{Error, Result};
use crate::matveev::{m_k, stage2_bound};
use crate::properties::{run_suites, PropertyPlan};
use crate::reduction::{campaign_with, stage1_with, Precision, RootSource};
use crate::search::{expected_solutions, family_c_enumerate, search_k, AFilter, ARelation, Family, SolutionRecord};

pub struct RunOutput {
    pub report: VerificationReport,
    /// Seconds per campaign, in execution order.
    pub timings: Vec<(String, f64)>,
}

/// Runs the selected campaigns on a pool of `config.jobs` workers.
pub fn run(config: &CampaignConfig) -> Result<RunOutput> {
    let mut config = config.clone();
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    pool.install(|| Runner::new(&config).run())
}

struct Runner<'a> {
    config: &'a CampaignConfig,
    roots: RootSource,
    precision: Precision,
    timings: Vec<(String, f64)>,
    assertions: Vec<AssertionRow>,
}

fn assertion(name: &str, passed: bool, detail: String) -> AssertionRow {
    AssertionRow { name: name.to_string(), passed, detail }
}

impl<'a> Runner<'a> {
    fn new(config: &'a CampaignConfig) -> Self {
        let roots = match &config.cache_dir {
            Some(d) => RootCache::new(d.join("roots")).source(),
            None => RootSource::default(),
        };
        Runner {
            config,
            roots,
            precision: Precision { min_digits: config.start_digits, cap_digits: config.cap_digits },
            timings: Vec::new(),
            assertions: Vec::new(),
        }
    }

    fn checkpoint(&self, name: &str, settings: &str) -> Result<Option<Checkpoint>> {
        match &self.config.cache_dir {
            Some(d) => {
                let dir: PathBuf = d.join("checkpoints");
                let settings = format!("v{} {settings}", env!("CARGO_PKG_VERSION"));
                Ok(Some(Checkpoint::open(&dir, name, &settings, self.config.fresh)?))
            }
            None => Ok(None),
        }
    }

    fn timed<T>(&mut self, name: &str, f: impl FnOnce(&mut Self) -> Result<T>) -> Result<T> {
        log::info!("{name}: start");
        let t = Instant::now();
        let out = f(self)?;
        let secs = t.elapsed().as_secs_f64();
        log::info!("{name}: done in {secs:.1}s");
        self.timings.push((name.to_string(), secs));
        Ok(out)
    }

    fn run(mut self) -> Result<RunOutput> {
        let c = self.config;
        let bounds = if c.selected(Campaign::Bounds) {
            Some(self.timed("bounds", |s| s.bounds())?)
        } else {
            None
        };
        let reductions = if [Campaign::ReduceStage1, Campaign::ReduceStage2, Campaign::ReduceAneq]
            .iter()
            .any(|x| c.selected(*x))
        {
            Some(self.timed("reductions", |s| s.reductions())?)
        } else {
            None
        };
        let n_max: BTreeMap<u32, i64> = reductions
            .iter()
            .flatten()
            .filter_map(|r| r.stage2.as_ref().map(|s| (r.k, s.n_max)))
            .collect();
        let (search_lt, lt_records) = if c.selected(Campaign::SearchLt) {
            let (sec, recs) = self.timed("search-lt", |s| s.search(Campaign::SearchLt, &n_max))?;
            (Some(sec), recs)
        } else {
            (None, Vec::new())
        };
        let (search_eq, eq_records) = if c.selected(Campaign::SearchEq) {
            let (sec, recs) = self.timed("search-eq", |s| s.search(Campaign::SearchEq, &n_max))?;
            (Some(sec), recs)
        } else {
            (None, Vec::new())
        };
        let solutions = self.timed("solutions", |s| {
            s.solutions(&lt_records, search_lt.as_ref(), &eq_records, search_eq.as_ref(), &n_max)
        })?;
        let properties = if c.selected(Campaign::Properties) {
            Some(self.timed("properties", |s| s.properties())?)
        } else {
            None
        };
        let max_digits_used = reductions.iter().flatten().map(|r| r.digits).max().unwrap_or(0);
        let verified = self.assertions.iter().all(|a| a.passed);
        let report = VerificationReport {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config: ConfigSummary {
                k_min: c.k_min,
                k_max: c.k_max,
                campaigns: c.campaigns.iter().map(|x| x.name().to_string()).collect(),
            },
            precision: PrecisionSummary {
                start_digits: c.start_digits,
                cap_digits: c.cap_digits,
                max_digits_used,
            },
            notes: vec![
                "the a = n-2 reduction reuses the two linear forms of the general case with u = a, v = n".into(),
                "m = 1 hits are listed next to their m = 2 twins (F_1 = F_2) and flagged".into(),
                "real-valued bounds are f64 values rounded up from certified enclosures".into(),
            ],
            bounds,
            reductions,
            search_lt,
            search_eq,
            solutions,
            properties,
            assertions: self.assertions,
            verified,
        };
        Ok(RunOutput { report, timings: self.timings })
    }

    /// Maps `f` over `ks` in parallel, reusing and recording checkpoint rows.
    fn per_k<T, F>(&self, ks: &[u32], ckpt: Option<&Checkpoint>, f: F) -> Result<Vec<T>>
    where
        T: Serialize + DeserializeOwned + Send,
        F: Fn(u32, Option<T>) -> Result<(T, bool)> + Sync,
    {
        let out: Vec<Result<T>> = ks
            .par_iter()
            .map(|&k| {
                let cached = ckpt.and_then(|c| c.get::<T>(k));
                let (v, fresh) = f(k, cached)?;
                if fresh {
                    if let Some(c) = ckpt {
                        c.record(k, &v)?;
                    }
                }
                log::debug!("k = {k} done");
                Ok(v)
            })
            .collect();
        out.into_iter().collect()
    }

    fn bounds(&mut self) -> Result<Vec<BoundRow>> {
        let ks = self.config.ks(Campaign::Bounds);
        let ckpt = self.checkpoint("bounds", "")?;
        let rows = self.per_k(&ks, ckpt.as_ref(), |k, cached: Option<BoundRow>| {
            if let Some(r) = cached {
                return Ok((r, false));
            }
            let row = match stage2_bound(k) {
                Ok(b) => BoundRow {
                    k,
                    m_k: b.m_k.to_string(),
                    c_k: b.c_k.upper_f64(),
                    stage1_coefficient: b.stage1.upper_f64(),
                    stage2_coefficient: b.stage2.upper_f64(),
                    n_bound: b.n_bound.upper_f64(),
                    displayed_chain: b.displayed_chain.upper_f64(),
                    ok: true,
                    detail: String::new(),
                },
                Err(Error::Certification(e)) => BoundRow {
                    k,
                    m_k: m_k(k)?.to_string(),
                    c_k: 0.0,
                    stage1_coefficient: 0.0,
                    stage2_coefficient: 0.0,
                    n_bound: 0.0,
                    displayed_chain: 0.0,
                    ok: false,
                    detail: e,
                },
                Err(e) => return Err(e),
            };
            Ok((row, true))
        })?;
        let bad: Vec<String> = rows.iter().filter(|r| !r.ok).map(|r| format!("k={}: {}", r.k, r.detail)).collect();
        self.assertions.push(assertion(
            "bounds: constant chain and n bound within M_k for every k",
            bad.is_empty() && !rows.is_empty(),
            bad.first().cloned().unwrap_or_else(|| format!("{} values of k", rows.len())),
        ));
        Ok(rows)
    }

    fn reductions(&mut self) -> Result<Vec<ReductionRow>> {
        let c = self.config;
        let s1: BTreeSet<u32> = c.ks(Campaign::ReduceStage1).into_iter().collect();
        let mut s2: BTreeSet<u32> = BTreeSet::new();
        if c.selected(Campaign::ReduceStage2) {
            s2.extend(c.ks(Campaign::ReduceStage2));
        }
        if c.selected(Campaign::ReduceAneq) {
            s2.extend(c.ks(Campaign::ReduceAneq));
        }
        let mut ks: BTreeSet<u32> = s2.clone();
        if c.selected(Campaign::ReduceStage1) {
            ks.extend(s1.iter().copied());
        }
        let ks: Vec<u32> = ks.into_iter().collect();
        let settings = format!("start={} cap={}", self.precision.min_digits, self.precision.cap_digits);
        let ckpt = self.checkpoint("reduce", &settings)?;
        let prec = self.precision;
        let roots = self.roots.clone();
        let rows = self.per_k(&ks, ckpt.as_ref(), |k, cached: Option<ReductionRow>| {
            let want2 = s2.contains(&k);
            if let Some(r) = cached {
                if r.stage2.is_some() || !want2 {
                    return Ok((r, false));
                }
            }
            let row = if want2 {
                let camp = campaign_with(k, &prec, roots.clone())?;
                ReductionRow {
                    k,
                    m_k: camp.m_k.to_string(),
                    digits: camp.digits,
                    stage1_q_digits: camp.stage1.q.to_string().len(),
                    stage1_bound: camp.stage1.w_bound.upper_f64(),
                    stage1_attempts: camp.stage1.attempts,
                    nm_max: camp.nm_max,
                    stage2: Some(Stage2Row {
                        max_bound: camp.stage2_max.upper_f64(),
                        argmax_nm: camp.stage2_argmax,
                        n_max: camp.n_max,
                        max_attempts: camp.max_attempts,
                    }),
                }
            } else {
                let (o, digits) = stage1_with(k, &prec, roots.clone())?;
                ReductionRow {
                    k,
                    m_k: m_k(k)?.to_string(),
                    digits,
                    stage1_q_digits: o.q.to_string().len(),
                    stage1_bound: o.w_bound.upper_f64(),
                    stage1_attempts: o.attempts,
                    nm_max: o.w_max(),
                    stage2: None,
                }
            };
            Ok((row, true))
        })?;

        let box_f = LT_BOX as f64;
        if c.selected(Campaign::ReduceStage1) {
            let sel: Vec<&ReductionRow> = rows.iter().filter(|r| s1.contains(&r.k)).collect();
            let worst = sel.iter().max_by(|a, b| a.stage1_bound.total_cmp(&b.stage1_bound));
            self.assertions.push(assertion(
                "reduce-stage1: epsilon > 0 for every k and max bound on n-m < 680",
                !sel.is_empty() && worst.is_some_and(|w| w.stage1_bound < box_f),
                worst.map(|w| format!("max {:.4} at k={}", w.stage1_bound, w.k)).unwrap_or_default(),
            ));
        }
        if c.selected(Campaign::ReduceStage2) {
            let lt: BTreeSet<u32> = c.ks(Campaign::ReduceStage2).into_iter().collect();
            let sel: Vec<(u32, &Stage2Row)> = rows
                .iter()
                .filter(|r| lt.contains(&r.k))
                .filter_map(|r| r.stage2.as_ref().map(|s| (r.k, s)))
                .collect();
            let worst = sel.iter().max_by(|a, b| a.1.max_bound.total_cmp(&b.1.max_bound));
            self.assertions.push(assertion(
                "reduce-stage2: max bound on n-1 over the grid < 680",
                !sel.is_empty() && worst.is_some_and(|w| w.1.max_bound < box_f),
                worst
                    .map(|(k, s)| format!("max {:.4} at k={k}, n-m={}", s.max_bound, s.argmax_nm))
                    .unwrap_or_default(),
            ));
        }
        if c.selected(Campaign::ReduceAneq) {
            let eq: BTreeSet<u32> = c.ks(Campaign::ReduceAneq).into_iter().collect();
            let sel: Vec<(u32, i64)> = rows
                .iter()
                .filter(|r| eq.contains(&r.k))
                .filter_map(|r| r.stage2.as_ref().map(|s| (r.k, s.n_max)))
                .collect();
            let worst = sel.iter().max_by_key(|x| x.1);
            self.assertions.push(assertion(
                "reduce-aneq: n <= 1380 for every k",
                !sel.is_empty() && worst.is_some_and(|w| w.1 <= EQ_BOX),
                worst.map(|(k, n)| format!("max n {n} at k={k}")).unwrap_or_default(),
            ));
        }
        Ok(rows)
    }

    /// Scans one search campaign; returns the section and every record found.
    fn search(&mut self, which: Campaign, n_max: &BTreeMap<u32, i64>) -> Result<(SearchSection, Vec<SolutionRecord>)> {
        let (published, filter, name) = match which {
            Campaign::SearchLt => (LT_BOX, AFilter::All, "search-lt"),
            _ => (EQ_BOX, AFilter::Equal, "search-eq"),
        };
        let ks = self.config.ks(which);
        let n_box = |k: u32| n_max.get(&k).map_or(published, |&b| b.max(published));
        let ckpt = self.checkpoint(name, &format!("box={published}"))?;
        let per: Vec<(i64, Vec<SolutionRecord>)> =
            self.per_k(&ks, ckpt.as_ref(), |k, cached: Option<(i64, Vec<SolutionRecord>)>| {
                let b = n_box(k);
                if let Some(c) = cached {
                    if c.0 == b {
                        return Ok((c, false));
                    }
                }
                Ok(((b, search_k(k, b, filter)?), true))
            })?;
        let mut extended = Vec::new();
        let mut records = Vec::new();
        for (k, (b, recs)) in ks.iter().zip(per) {
            if b != published {
                extended.push((*k, b));
            }
            records.extend(recs);
        }
        let hits: Vec<SolutionRow> = match which {
            Campaign::SearchLt => records
                .iter()
                .filter(|r| r.a_relation == ARelation::Below)
                .map(SolutionRow::from_record)
                .collect(),
            _ => records.iter().map(SolutionRow::from_record).collect(),
        };
        match which {
            Campaign::SearchLt => self.assertions.push(assertion(
                "search-lt: no solution with a < n-2",
                hits.is_empty() && !ks.is_empty(),
                format!("{} hits over {} values of k", hits.len(), ks.len()),
            )),
            _ => {
                let expected: Vec<SolutionRecord> =
                    ks.iter().flat_map(|&k| expected_solutions(k, n_box(k), AFilter::Equal)).collect();
                let shape = ks.iter().try_for_each(|&k| family_c_enumerate(k).map(|_| ()));
                self.assertions.push(assertion(
                    "search-eq: hits are exactly the parametric family",
                    records == expected && !ks.is_empty(),
                    format!("{} hits, {} expected", records.len(), expected.len()),
                ));
                self.assertions.push(assertion(
                    "search-eq: parametric family has m <= k+1 and n <= 2k+1",
                    shape.is_ok(),
                    shape.err().map(|e| e.to_string()).unwrap_or_default(),
                ));
            }
        }
        let (k_min, k_max) = (ks.first().copied().unwrap_or(0), ks.last().copied().unwrap_or(0));
        Ok((SearchSection { k_min, k_max, n_box: published, extended, hits }, records))
    }

    fn solutions(
        &mut self,
        lt: &[SolutionRecord],
        lt_sec: Option<&SearchSection>,
        eq: &[SolutionRecord],
        eq_sec: Option<&SearchSection>,
        n_max: &BTreeMap<u32, i64>,
    ) -> Result<Vec<SolutionRow>> {
        let mut all: Vec<SolutionRecord> = lt.iter().chain(eq).copied().collect();
        all.sort();
        all.dedup();
        if lt_sec.is_none() && eq_sec.is_none() {
            return Ok(Vec::new());
        }
        let box_of = |published: i64, k: u32| n_max.get(&k).map_or(published, |&b| b.max(published));
        let mut expected: Vec<SolutionRecord> = Vec::new();
        if lt_sec.is_some() {
            for k in self.config.ks(Campaign::SearchLt) {
                expected.extend(expected_solutions(k, box_of(LT_BOX, k), AFilter::All));
            }
        }
        if eq_sec.is_some() {
            for k in self.config.ks(Campaign::SearchEq) {
                expected.extend(expected_solutions(k, box_of(EQ_BOX, k), AFilter::Equal));
            }
        }
        expected.sort();
        expected.dedup();

        let unexpected: Vec<&SolutionRecord> = all.iter().filter(|r| r.family == Family::Unexpected).collect();
        self.assertions.push(assertion(
            "solutions: no record outside the known families",
            unexpected.is_empty(),
            unexpected.first().map(|r| format!("{:?}", (r.k, r.n, r.m, r.a))).unwrap_or_default(),
        ));
        let bad: Vec<&SolutionRecord> = all.par_iter().filter(|r| !r.reverify()).collect();
        self.assertions.push(assertion(
            "solutions: every record re-verifies from a fresh table",
            bad.is_empty(),
            format!("{} records", all.len()),
        ));
        self.assertions.push(assertion(
            "solutions: equal the known families inside the searched boxes",
            all == expected,
            format!("{} found, {} expected", all.len(), expected.len()),
        ));
        let outside: Vec<&SolutionRecord> = all
            .iter()
            .filter(|r| r.n > r.m && r.n >= r.k as i64 + 2)
            .filter(|r| n_max.get(&r.k).is_some_and(|&b| r.n > b))
            .collect();
        self.assertions.push(assertion(
            "solutions: within the per-k reduction bounds",
            outside.is_empty(),
            outside.first().map(|r| format!("{:?}", (r.k, r.n, r.m, r.a))).unwrap_or_default(),
        ));
        Ok(all.iter().map(SolutionRow::from_record).collect())
    }

    fn properties(&mut self) -> Result<Vec<crate::properties::SuiteResult>> {
        let plan = PropertyPlan::restricted(self.config.k_min, self.config.k_max);
        let suites = run_suites(&plan);
        let failed: Vec<String> =
            suites.iter().filter(|s| !s.passed).map(|s| format!("{}: {}", s.name, s.detail)).collect();
        self.assertions.push(assertion(
            "properties: every identity suite passes",
            failed.is_empty() && !suites.is_empty(),
            if failed.is_empty() { format!("{} suites", suites.len()) } else { failed.join("; ") },
        ));
        Ok(suites)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::config::parse_campaigns;

    fn small(campaigns: &str, jobs: usize) -> CampaignConfig {
        CampaignConfig {
            k_min: 3,
            k_max: 12,
            jobs,
            campaigns: parse_campaigns(campaigns).unwrap(),
            ..Default::default()
        }
    }

    #[test]
    fn small_all_is_verified_and_deterministic() {
        let a = run(&small("all", 1)).unwrap().report;
        assert!(a.verified, "{:?}", a.failed());
        let b = run(&small("all", 3)).unwrap().report;
        assert_eq!(a.to_json(), b.to_json());
        assert_eq!(a.search_lt.as_ref().unwrap().hits.len(), 0);
        assert!(a.solutions.iter().any(|s| s.family == "B"));
    }

    #[test]
    fn checkpoints_resume_identically() {
        let dir = tempfile::tempdir().unwrap();
        let mut c = small("reduce", 1);
        c.k_max = 8;
        c.cache_dir = Some(dir.path().to_path_buf());
        let a = run(&c).unwrap().report;
        let b = run(&c).unwrap().report;
        assert_eq!(a.to_json(), b.to_json());
        assert!(dir.path().join("checkpoints/reduce.ckpt").exists());
        assert!(std::fs::read_dir(dir.path().join("roots")).unwrap().count() > 0);
    }

    #[test]
    fn search_eq_only_lists_family_c() {
        let r = run(&small("search-eq", 1)).unwrap().report;
        assert!(r.verified);
        assert!(r.solutions.iter().all(|s| s.family.starts_with('C')));
    }
}
