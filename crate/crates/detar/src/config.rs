use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{bail, Context};

/// Which experiment a configuration drives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExperimentId {
    Example1,
    Example2,
    Example3,
    NetAudit,
}

impl ExperimentId {
    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentId::Example1 => "example1",
            ExperimentId::Example2 => "example2",
            ExperimentId::Example3 => "example3",
            ExperimentId::NetAudit => "net-audit",
        }
    }

    pub fn default_m_range(self) -> MRange {
        match self {
            ExperimentId::Example1 | ExperimentId::Example2 => MRange::new(9, 14),
            ExperimentId::Example3 => MRange::new(7, 14),
            ExperimentId::NetAudit => MRange::new(4, 12),
        }
    }

    pub fn default_grid(self) -> u32 {
        match self {
            ExperimentId::Example1 => 5,
            ExperimentId::Example2 => 10,
            ExperimentId::Example3 | ExperimentId::NetAudit => 0,
        }
    }
}

impl fmt::Display for ExperimentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Inclusive range of net resolutions, written `A..B` on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MRange {
    pub start: u32,
    pub end: u32,
}

impl MRange {
    pub fn new(start: u32, end: u32) -> Self {
        MRange { start, end }
    }

    pub fn values(&self) -> Vec<u32> {
        (self.start..=self.end).collect()
    }
}

impl fmt::Display for MRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}

impl FromStr for MRange {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> anyhow::Result<Self> {
        let (a, b) = match s.split_once("..") {
            Some(pair) => pair,
            None => (s, s),
        };
        let start: u32 = a.trim().parse().with_context(|| format!("bad m-range start in {s:?}"))?;
        let end: u32 = b
            .trim()
            .trim_start_matches('=')
            .parse()
            .with_context(|| format!("bad m-range end in {s:?}"))?;
        if end < start {
            bail!("m-range {s:?} is not ascending");
        }
        Ok(MRange { start, end })
    }
}

/// Everything needed to rerun an experiment bit for bit.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: ExperimentId,
    pub m_range: MRange,
    /// Grid resolution `m_g` of the δ-cover.
    pub grid_m: u32,
    /// Base seed; the baseline runs use `seed, seed + 1, …`.
    pub seed: u64,
    /// Number of pseudo-random runs averaged per point.
    pub random_runs: u64,
    /// Random trials per isotropic estimate (net audit only).
    pub isotropic_trials: usize,
    pub out: Option<PathBuf>,
    pub plot_data: bool,
}

impl ExperimentConfig {
    pub fn new(experiment: ExperimentId) -> Self {
        ExperimentConfig {
            experiment,
            m_range: experiment.default_m_range(),
            grid_m: experiment.default_grid(),
            seed: 0,
            random_runs: 10,
            isotropic_trials: 10_000,
            out: None,
            plot_data: false,
        }
    }

    pub fn with_m_range(mut self, m_range: MRange) -> Self {
        self.m_range = m_range;
        self
    }

    pub fn with_grid(mut self, grid_m: u32) -> Self {
        self.grid_m = grid_m;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}
