//! Campaign selection, ranges and the precision policy.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::Serialize;

use crate::algebraic::{CAP_DIGITS, START_DIGITS};
use crate::error::{Error, Result};

/// `k` range of the two-term reduction and the general search.
pub const LT_K: (u32, u32) = (3, 340);
/// `k` range of the `a = n - 2` reduction and search.
pub const EQ_K: (u32, u32) = (3, 690);
/// Published box for `n` when `a < n - 2` (and for `n - m`).
pub const LT_BOX: i64 = 680;
/// Published box for `n` when `a = n - 2`.
pub const EQ_BOX: i64 = 1380;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Campaign {
    Bounds,
    ReduceStage1,
    ReduceStage2,
    ReduceAneq,
    SearchLt,
    SearchEq,
    Properties,
}

impl Campaign {
    /// Dependency order.
    pub const ALL: [Campaign; 7] = [
        Campaign::Bounds,
        Campaign::ReduceStage1,
        Campaign::ReduceStage2,
        Campaign::ReduceAneq,
        Campaign::SearchLt,
        Campaign::SearchEq,
        Campaign::Properties,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Campaign::Bounds => "bounds",
            Campaign::ReduceStage1 => "reduce-stage1",
            Campaign::ReduceStage2 => "reduce-stage2",
            Campaign::ReduceAneq => "reduce-aneq",
            Campaign::SearchLt => "search-lt",
            Campaign::SearchEq => "search-eq",
            Campaign::Properties => "properties",
        }
    }

    /// The `k` range the campaign covers before the user range is applied.
    pub fn native_range(self) -> (u32, u32) {
        match self {
            Campaign::Bounds | Campaign::ReduceAneq | Campaign::SearchEq => EQ_K,
            Campaign::ReduceStage1 | Campaign::ReduceStage2 | Campaign::SearchLt => LT_K,
            Campaign::Properties => (2, u32::MAX),
        }
    }
}

impl fmt::Display for Campaign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A campaign name or one of the groups `reduce`, `search`, `all`.
pub fn parse_campaigns(s: &str) -> Result<Vec<Campaign>> {
    let v = match s {
        "all" => Campaign::ALL.to_vec(),
        "reduce" => vec![Campaign::ReduceStage1, Campaign::ReduceStage2, Campaign::ReduceAneq],
        "search" => vec![Campaign::SearchLt, Campaign::SearchEq],
        _ => match Campaign::ALL.iter().find(|c| c.name() == s) {
            Some(c) => vec![*c],
            None => return Err(Error::InvalidArgument(format!("unknown campaign {s:?}"))),
        },
    };
    Ok(v)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Json,
    Csv,
    Both,
}

impl FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "both" => Ok(Format::Both),
            _ => Err(Error::InvalidArgument(format!("unknown format {s:?}"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct CampaignConfig {
    /// User restriction on `k`; each campaign intersects it with its own range.
    pub k_min: u32,
    pub k_max: u32,
    pub start_digits: u32,
    pub cap_digits: u32,
    pub jobs: usize,
    /// Sorted, deduplicated, in dependency order.
    pub campaigns: Vec<Campaign>,
    pub cache_dir: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub fresh: bool,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        CampaignConfig {
            k_min: 2,
            k_max: EQ_K.1,
            start_digits: START_DIGITS,
            cap_digits: CAP_DIGITS,
            jobs: 1,
            campaigns: Campaign::ALL.to_vec(),
            cache_dir: None,
            out: None,
            format: Format::Json,
            fresh: false,
        }
    }
}

impl CampaignConfig {
    pub fn validate(&mut self) -> Result<()> {
        if self.k_min < 2 {
            return Err(Error::InvalidArgument(format!("k-min must be at least 2, got {}", self.k_min)));
        }
        if self.k_min > self.k_max {
            return Err(Error::InvalidArgument(format!(
                "empty k range [{}, {}]",
                self.k_min, self.k_max
            )));
        }
        if self.start_digits < START_DIGITS {
            return Err(Error::InvalidArgument(format!(
                "precision must be at least {START_DIGITS} digits, got {}",
                self.start_digits
            )));
        }
        if self.cap_digits < self.start_digits {
            return Err(Error::InvalidArgument("precision cap is below the start precision".into()));
        }
        if self.jobs == 0 {
            return Err(Error::InvalidArgument("jobs must be at least 1".into()));
        }
        if self.campaigns.is_empty() {
            return Err(Error::InvalidArgument("no campaign selected".into()));
        }
        self.campaigns.sort();
        self.campaigns.dedup();
        Ok(())
    }

    pub fn selected(&self, c: Campaign) -> bool {
        self.campaigns.contains(&c)
    }

    /// `k` values of `c` after applying the user range (empty when disjoint).
    pub fn ks(&self, c: Campaign) -> Vec<u32> {
        let (lo, hi) = c.native_range();
        (lo.max(self.k_min)..=hi.min(self.k_max)).collect()
    }
}
