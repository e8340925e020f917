use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

use detar_core::discrepancy::{fit_rate, RateFit};

use crate::experiments::{AuditRow, BoundCheck, ExperimentRun, ResultRow};

/// Header of every experiment results file.
pub const RESULTS_HEADER: &str = "experiment,sampler,m,M,N,discrepancy_lower,discrepancy_upper,delta,grid_m,seed";

#[derive(Debug, Serialize, Deserialize)]
struct CsvRow {
    experiment: String,
    sampler: String,
    m: u32,
    #[serde(rename = "M")]
    driver_count: f64,
    #[serde(rename = "N")]
    n: f64,
    discrepancy_lower: Option<f64>,
    discrepancy_upper: Option<f64>,
    delta: Option<f64>,
    grid_m: Option<u32>,
    seed: Option<u64>,
}

impl From<&ResultRow> for CsvRow {
    fn from(r: &ResultRow) -> Self {
        CsvRow {
            experiment: r.experiment.to_string(),
            sampler: r.sampler.clone(),
            m: r.m,
            driver_count: r.driver_count,
            n: r.n,
            discrepancy_lower: r.discrepancy_lower,
            discrepancy_upper: r.discrepancy_upper,
            delta: r.delta,
            grid_m: r.grid_m,
            seed: r.seed,
        }
    }
}

pub fn write_results<W: Write>(rows: &[ResultRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(CsvRow::from(r))?;
    }
    w.flush()?;
    Ok(())
}

/// A series read back from a results file.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesFit {
    pub experiment: String,
    pub sampler: String,
    pub seed: Option<u64>,
    pub points: usize,
    pub fit: RateFit,
}

/// Refits every `(experiment, sampler, seed)` series of a results file on
/// `discrepancy_lower`. Series with fewer than three measurements are skipped.
pub fn refit_results<R: io::Read>(input: R) -> Result<Vec<SeriesFit>> {
    let mut reader = csv::Reader::from_reader(input);
    let mut groups: BTreeMap<(String, String, Option<u64>), Vec<(f64, f64)>> = BTreeMap::new();
    for record in reader.deserialize() {
        let row: CsvRow = record.context("malformed results row")?;
        if let Some(d) = row.discrepancy_lower {
            groups
                .entry((row.experiment, row.sampler, row.seed))
                .or_default()
                .push((row.n, d));
        }
    }
    let mut fits = Vec::new();
    for ((experiment, sampler, seed), pairs) in groups {
        if pairs.len() < 3 {
            continue;
        }
        if let Ok(fit) = fit_rate(&pairs) {
            fits.push(SeriesFit {
                experiment,
                sampler,
                seed,
                points: pairs.len(),
                fit,
            });
        }
    }
    Ok(fits)
}

pub fn write_checks<W: Write>(checks: &[BoundCheck], out: &mut W) -> io::Result<()> {
    for c in checks {
        let verdict = if c.passed { "PASS" } else { "FAIL" };
        writeln!(out, "check\t{verdict}\t{}\t{}", c.name, c.detail)?;
    }
    Ok(())
}

pub fn write_slopes<W: Write>(run: &ExperimentRun, out: &mut W) -> io::Result<()> {
    let c = &run.config;
    writeln!(out, "# experiment {}", c.experiment)?;
    writeln!(out, "# m_range {}", c.m_range)?;
    writeln!(out, "# grid_m {}", c.grid_m)?;
    writeln!(out, "# seed {}", c.seed)?;
    writeln!(out, "# random_runs {}", c.random_runs)?;
    writeln!(out, "# fits use discrepancy_lower against N")?;
    for w in &run.warnings {
        writeln!(out, "# warning: {w}")?;
    }
    writeln!(out, "sampler\tslope\tintercept\tr_squared")?;
    for (sampler, f) in &run.fits {
        writeln!(out, "{sampler}\t{:.6}\t{:.6}\t{:.6}", f.slope, f.intercept, f.r_squared)?;
    }
    write_checks(&run.checks, out)
}

/// `log10 N`, `log10 D` and the fitted line for every fitted series.
pub fn write_plot_data<W: Write>(run: &ExperimentRun, out: &mut W) -> io::Result<()> {
    writeln!(out, "sampler\tlog10_N\tlog10_D\tlog10_fit")?;
    for (sampler, f) in &run.fits {
        for row in run.series(sampler) {
            let Some(d) = row.discrepancy_lower else { continue };
            let fitted = (f.intercept + f.slope * row.n.ln()) / std::f64::consts::LN_10;
            writeln!(out, "{sampler}\t{:.6}\t{:.6}\t{:.6}", row.n.log10(), d.log10(), fitted)?;
        }
    }
    Ok(())
}

pub fn write_audit<W: Write>(rows: &[AuditRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["s", "m", "t", "fair", "isotropic_estimate", "bound", "pass"])?;
    for r in rows {
        w.write_record([
            r.s.to_string(),
            r.m.to_string(),
            r.t.to_string(),
            r.fair.to_string(),
            r.isotropic_estimate.to_string(),
            r.bound.to_string(),
            r.passes().to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// `dir/name.csv` → `dir/name.<suffix>`.
pub fn sidecar(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}.{suffix}"))
}

pub fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(f))
}

/// Writes the results CSV, the slopes sidecar and, if asked, the plot data.
/// Returns the paths written.
pub fn write_run(run: &ExperimentRun, path: &Path) -> Result<Vec<PathBuf>> {
    let mut written = vec![path.to_path_buf()];
    write_results(&run.rows, create(path)?)?;
    let slopes = sidecar(path, "slopes.txt");
    let mut w = create(&slopes)?;
    write_slopes(run, &mut w)?;
    w.flush()?;
    written.push(slopes);
    if run.config.plot_data {
        let plot = sidecar(path, "plot.tsv");
        let mut w = create(&plot)?;
        write_plot_data(run, &mut w)?;
        w.flush()?;
        written.push(plot);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(sampler: &str, n: f64, d: Option<f64>) -> ResultRow {
        ResultRow {
            experiment: "example1",
            sampler: sampler.into(),
            m: 9,
            driver_count: 512.0,
            n,
            discrepancy_lower: d,
            discrepancy_upper: d.map(|v| v + 0.01),
            delta: d.map(|_| 0.01),
            grid_m: Some(5),
            seed: None,
        }
    }

    #[test]
    fn header_and_empty_fields() {
        let mut buf = Vec::new();
        write_results(&[row("DAR_CUBE", 400.0, Some(0.02)), row("DAR_CUBE", 400.0, None)], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), RESULTS_HEADER);
        assert_eq!(lines.next().unwrap(), "example1,DAR_CUBE,9,512.0,400.0,0.02,0.03,0.01,5,");
        assert_eq!(lines.next().unwrap(), "example1,DAR_CUBE,9,512.0,400.0,,,,5,");
    }

    #[test]
    fn refit_recovers_slope() {
        let rows: Vec<ResultRow> = [100.0, 1000.0, 10000.0]
            .iter()
            .map(|&n| row("DAR_CUBE", n, Some(2.0 / n)))
            .collect();
        let mut buf = Vec::new();
        write_results(&rows, &mut buf).unwrap();
        let fits = refit_results(buf.as_slice()).unwrap();
        assert_eq!(fits.len(), 1);
        assert!((fits[0].fit.slope + 1.0).abs() < 1e-12);
    }

    #[test]
    fn sidecar_names() {
        assert_eq!(sidecar(Path::new("out/ex1.csv"), "slopes.txt"), PathBuf::from("out/ex1.slopes.txt"));
    }
}
