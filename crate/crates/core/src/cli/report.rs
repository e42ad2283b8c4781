//! Report document, JSON and CSV rendering.
//!
//! Big integers are decimal strings. Real bounds are `f64` values rounded
//! up from the certified enclosure, so comparing them against a threshold
//! is conservative. Nothing that depends on timing or worker count goes
//! into the report; runtimes are written next to it.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::properties::SuiteResult;
use crate::search::SolutionRecord;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundRow {
    pub k: u32,
    pub m_k: String,
    pub c_k: f64,
    pub stage1_coefficient: f64,
    pub stage2_coefficient: f64,
    /// Strict bound on `n` from the logarithmic inequality.
    pub n_bound: f64,
    pub displayed_chain: f64,
    pub ok: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Stage2Row {
    /// Largest real bound on `n - 1` over the grid.
    pub max_bound: f64,
    pub argmax_nm: i64,
    /// `n <= n_max`.
    pub n_max: i64,
    pub max_attempts: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReductionRow {
    pub k: u32,
    pub m_k: String,
    pub digits: u32,
    pub stage1_q_digits: usize,
    /// Real bound on `n - m` (`n - m < stage1_bound`).
    pub stage1_bound: f64,
    pub stage1_attempts: usize,
    /// `n - m <= nm_max`.
    pub nm_max: i64,
    pub stage2: Option<Stage2Row>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolutionRow {
    pub k: u32,
    pub n: i64,
    pub m: i64,
    pub a: i64,
    pub family: String,
    pub a_relation: String,
    /// `m = 1` hit whose `m = 2` twin is also listed.
    pub m_one_twin: bool,
}

impl SolutionRow {
    pub fn from_record(r: &SolutionRecord) -> Self {
        SolutionRow {
            k: r.k,
            n: r.n,
            m: r.m,
            a: r.a,
            family: r.family.to_string(),
            a_relation: format!("{:?}", r.a_relation).to_lowercase(),
            m_one_twin: r.canonical().2 != r.m,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchSection {
    pub k_min: u32,
    pub k_max: u32,
    /// Published box for `n`.
    pub n_box: i64,
    /// `(k, box)` where a reduction bound exceeded the published box and the
    /// scan was extended.
    pub extended: Vec<(u32, i64)>,
    pub hits: Vec<SolutionRow>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AssertionRow {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConfigSummary {
    pub k_min: u32,
    pub k_max: u32,
    pub campaigns: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PrecisionSummary {
    pub start_digits: u32,
    pub cap_digits: u32,
    pub max_digits_used: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub tool: String,
    pub version: String,
    pub config: ConfigSummary,
    pub precision: PrecisionSummary,
    pub notes: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bounds: Option<Vec<BoundRow>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reductions: Option<Vec<ReductionRow>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub search_lt: Option<SearchSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub search_eq: Option<SearchSection>,
    pub solutions: Vec<SolutionRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub properties: Option<Vec<SuiteResult>>,
    pub assertions: Vec<AssertionRow>,
    pub verified: bool,
}

impl VerificationReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Flat export: one row per `(k, bound kind)` and one per solution.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("section,k,n,m,a,kind,value\n");
        let mut row = |sec: &str, k: u32, nma: Option<(i64, i64, i64)>, kind: &str, value: &str| {
            let (n, m, a) = nma.map(|(n, m, a)| (n.to_string(), m.to_string(), a.to_string())).unwrap_or_default();
            let _ = writeln!(s, "{sec},{k},{n},{m},{a},{kind},{value}");
        };
        for b in self.bounds.iter().flatten() {
            row("bound", b.k, None, "m_k", &b.m_k);
            row("bound", b.k, None, "c_k", &b.c_k.to_string());
            row("bound", b.k, None, "stage1_coefficient", &b.stage1_coefficient.to_string());
            row("bound", b.k, None, "stage2_coefficient", &b.stage2_coefficient.to_string());
            row("bound", b.k, None, "n_bound", &b.n_bound.to_string());
        }
        for r in self.reductions.iter().flatten() {
            row("reduction", r.k, None, "stage1_bound", &r.stage1_bound.to_string());
            row("reduction", r.k, None, "nm_max", &r.nm_max.to_string());
            if let Some(s2) = &r.stage2 {
                row("reduction", r.k, None, "stage2_bound", &s2.max_bound.to_string());
                row("reduction", r.k, None, "n_max", &s2.n_max.to_string());
            }
        }
        for x in &self.solutions {
            let kind = if x.m_one_twin { format!("{} twin", x.family) } else { x.family.clone() };
            row("solution", x.k, Some((x.n, x.m, x.a)), &kind, &x.a_relation);
        }
        s
    }

    pub fn failed(&self) -> Vec<&AssertionRow> {
        self.assertions.iter().filter(|a| !a.passed).collect()
    }
}
