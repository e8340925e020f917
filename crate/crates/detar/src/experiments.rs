use std::thread;

use anyhow::{bail, Context, Result};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use detar_core::densities::{
    example1_density, example2_density_and_proposal, example3_decomposition, Decomposition,
    Proposal, TargetDensity, UniformProposal,
};
use detar_core::discrepancy::{
    fit_rate, isotropic_lower_estimate, star_discrepancy_1d_exact, DeltaCover, DiscrepancyReport,
    RateFit, DEFAULT_GRID_BUDGET,
};
use detar_core::nets::{audit_t_value, DigitalNet, DirectionNumberTable};
use detar_core::samplers::{
    dar_cube_at, dar_real_at, drar_sample, drar_sample_with, plan_drar, rar, RandomDriver,
    SampleSet,
};

use crate::config::{ExperimentConfig, ExperimentId};

/// One line of the results CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub experiment: &'static str,
    pub sampler: String,
    pub m: u32,
    /// Driver points consumed.
    pub driver_count: f64,
    /// Points returned.
    pub n: f64,
    pub discrepancy_lower: Option<f64>,
    pub discrepancy_upper: Option<f64>,
    pub delta: Option<f64>,
    pub grid_m: Option<u32>,
    pub seed: Option<u64>,
}

/// A pass/fail verdict on one of an experiment's expected properties.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl BoundCheck {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        BoundCheck {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

/// Rows, fitted slopes and checks produced by one experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRun {
    pub config: ExperimentConfig,
    pub rows: Vec<ResultRow>,
    /// `(sampler, fit)` for every series with at least three resolutions.
    pub fits: Vec<(String, RateFit)>,
    pub checks: Vec<BoundCheck>,
    pub warnings: Vec<String>,
}

impl ExperimentRun {
    pub fn fit(&self, sampler: &str) -> Option<&RateFit> {
        self.fits.iter().find(|(s, _)| s == sampler).map(|(_, f)| f)
    }

    pub fn all_checks_pass(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// Rows of one sampler, in ascending `m`.
    pub fn series(&self, sampler: &str) -> Vec<&ResultRow> {
        self.rows.iter().filter(|r| r.sampler == sampler).collect()
    }
}

/// `(N, grid_max)` pairs of a series, skipping rows without a measurement.
pub fn series_pairs(rows: &[ResultRow], sampler: &str) -> Vec<(f64, f64)> {
    rows.iter()
        .filter(|r| r.sampler == sampler)
        .filter_map(|r| r.discrepancy_lower.map(|d| (r.n, d)))
        .collect()
}

/// Fits every named series that has at least three positive measurements.
pub fn fit_series(rows: &[ResultRow], samplers: &[&str]) -> Vec<(String, RateFit)> {
    samplers
        .iter()
        .filter_map(|&s| {
            let pairs = series_pairs(rows, s);
            (pairs.len() >= 3)
                .then(|| fit_rate(&pairs).ok())
                .flatten()
                .map(|f| (s.to_string(), f))
        })
        .collect()
}

fn measured_row(
    experiment: ExperimentId,
    sampler: &str,
    m: u32,
    sample: &SampleSet,
    report: Option<&DiscrepancyReport>,
    seed: Option<u64>,
) -> ResultRow {
    ResultRow {
        experiment: experiment.as_str(),
        sampler: sampler.to_string(),
        m,
        driver_count: sample.driver_count as f64,
        n: sample.len() as f64,
        discrepancy_lower: report.map(|r| r.lower_bound),
        discrepancy_upper: report.map(|r| r.upper_bound),
        delta: report.map(|r| r.delta),
        grid_m: report.map(|r| r.grid_m),
        seed,
    }
}

fn mean_row(experiment: ExperimentId, sampler: &str, m: u32, runs: &[ResultRow], grid_m: Option<u32>) -> ResultRow {
    let k = runs.len() as f64;
    let mean = |f: &dyn Fn(&ResultRow) -> Option<f64>| -> Option<f64> {
        let vals: Option<Vec<f64>> = runs.iter().map(f).collect();
        vals.map(|v| v.iter().sum::<f64>() / k)
    };
    ResultRow {
        experiment: experiment.as_str(),
        sampler: sampler.to_string(),
        m,
        driver_count: runs.iter().map(|r| r.driver_count).sum::<f64>() / k,
        n: runs.iter().map(|r| r.n).sum::<f64>() / k,
        discrepancy_lower: mean(&|r| r.discrepancy_lower),
        discrepancy_upper: mean(&|r| r.discrepancy_upper),
        delta: runs.first().and_then(|r| r.delta),
        grid_m,
        seed: None,
    }
}

fn check_config(config: &ExperimentConfig, expected: ExperimentId) -> Result<()> {
    if config.experiment != expected {
        bail!("configuration is for {}, not {}", config.experiment, expected);
    }
    if config.m_range.start > config.m_range.end {
        bail!("m-range must be ascending");
    }
    if config.random_runs == 0 {
        bail!("at least one random run is needed");
    }
    Ok(())
}

/// Runs `f` for every resolution on its own thread and returns the results
/// in ascending `m`.
fn per_resolution<T: Send>(ms: &[u32], f: impl Fn(u32) -> Result<T> + Sync) -> Result<Vec<T>> {
    let f = &f;
    thread::scope(|scope| {
        let handles: Vec<_> = ms.iter().map(|&m| scope.spawn(move || f(m))).collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|_| bail!("worker thread panicked")))
            .collect()
    })
}

fn grid_warning(err: &detar_core::Error, grid_m: u32) -> String {
    format!("grid m_g = {grid_m} unavailable ({err}); discrepancy columns left empty, try a smaller --grid")
}

/// Deterministic versus random acceptance-rejection for the non-product
/// density on `[0, 1]^4`, measured by the δ-cover at resolution `m_g`.
pub fn run_example1(config: &ExperimentConfig) -> Result<ExperimentRun> {
    check_config(config, ExperimentId::Example1)?;
    let id = ExperimentId::Example1;
    let table = DirectionNumberTable::bundled();
    let psi = example1_density();
    let proposal = UniformProposal::new(psi.dimension());
    let mut warnings = Vec::new();
    let cover = match DeltaCover::cube(&psi, config.grid_m, DEFAULT_GRID_BUDGET) {
        Ok(c) => Some(c),
        Err(e) => {
            warnings.push(grid_warning(&e, config.grid_m));
            None
        }
    };
    let ms = config.m_range.values();
    let blocks = per_resolution(&ms, |m| {
        let expected = (m as f64).exp2() * psi.total_mass() / psi.bound();
        let dar = dar_cube_at(&psi, expected.floor() as usize, m, &table)?;
        let report = cover.as_ref().map(|c| c.evaluate(&dar.points)).transpose()?;
        let mut rows = vec![measured_row(id, "DAR_CUBE", m, &dar, report.as_ref(), None)];
        let mut runs = Vec::new();
        for i in 0..config.random_runs {
            let seed = config.seed.wrapping_add(i);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let sample = rar(&psi, &proposal, dar.len(), &mut rng)?;
            let report = cover.as_ref().map(|c| c.evaluate(&sample.points)).transpose()?;
            runs.push(measured_row(id, "RAR", m, &sample, report.as_ref(), Some(seed)));
        }
        let grid = cover.as_ref().map(|c| c.grid_m());
        let mean = mean_row(id, "RAR_MEAN", m, &runs, grid);
        rows.extend(runs);
        rows.push(mean);
        Ok(rows)
    })?;
    let rows: Vec<ResultRow> = blocks.into_iter().flatten().collect();
    let fits = fit_series(&rows, &["DAR_CUBE", "RAR_MEAN"]);

    let mut checks = Vec::new();
    if let Some(f) = fits.iter().find(|(s, _)| s == "DAR_CUBE") {
        checks.push(BoundCheck::new(
            "example1 DAR slope <= -0.55",
            f.1.slope <= -0.55,
            format!("slope {:.4}", f.1.slope),
        ));
    }
    if let Some(f) = fits.iter().find(|(s, _)| s == "RAR_MEAN") {
        checks.push(BoundCheck::new(
            "example1 RAR slope in [-0.60, -0.38]",
            (-0.60..=-0.38).contains(&f.1.slope),
            format!("slope {:.4}", f.1.slope),
        ));
    }
    let dar = series_pairs(&rows, "DAR_CUBE");
    let rar_mean = series_pairs(&rows, "RAR_MEAN");
    let mut compared = Vec::new();
    let mut dominated = true;
    for (m, (d, r)) in ms.iter().zip(dar.iter().zip(&rar_mean)) {
        if *m >= 11 {
            dominated &= d.1 < r.1;
            compared.push(format!("m={m}: {:.3e} vs {:.3e}", d.1, r.1));
        }
    }
    if !compared.is_empty() {
        checks.push(BoundCheck::new(
            "example1 DAR below RAR mean for m >= 11",
            dominated,
            compared.join("; "),
        ));
    }
    Ok(ExperimentRun {
        config: config.clone(),
        rows,
        fits,
        checks,
        warnings,
    })
}

/// Deterministic versus random acceptance-rejection for the Gamma(3/2)
/// product on `R_+^2` with the uniform/Pareto proposal.
pub fn run_example2(config: &ExperimentConfig) -> Result<ExperimentRun> {
    check_config(config, ExperimentId::Example2)?;
    let id = ExperimentId::Example2;
    let table = DirectionNumberTable::bundled();
    let (psi, proposal) = example2_density_and_proposal();
    let mut warnings = Vec::new();
    let mut checks = Vec::new();
    let cover = match DeltaCover::real(&psi, &proposal, config.grid_m, DEFAULT_GRID_BUDGET) {
        Ok(c) => {
            let corner: Vec<f64> = (0..psi.dimension()).map(|j| *c.anchors(j).last().unwrap_or(&0.0)).collect();
            let full = psi.box_mass(&corner);
            checks.push(BoundCheck::new(
                "example2 grid reaches the full mass",
                (full - psi.total_mass()).abs() <= 1e-6,
                format!("mass {full:.9} vs C {:.9}", psi.total_mass()),
            ));
            Some(c)
        }
        Err(e) => {
            warnings.push(grid_warning(&e, config.grid_m));
            None
        }
    };
    let ms = config.m_range.values();
    let blocks = per_resolution(&ms, |m| {
        let expected = (m as f64).exp2() * psi.total_mass() / (psi.bound() * proposal.total_mass());
        let dar = dar_real_at(&psi, &proposal, expected.floor() as usize, m, &table)?;
        let report = cover.as_ref().map(|c| c.evaluate(&dar.points)).transpose()?;
        let mut rows = vec![measured_row(id, "DAR_REAL", m, &dar, report.as_ref(), None)];
        let mut runs = Vec::new();
        for i in 0..config.random_runs {
            let seed = config.seed.wrapping_add(i);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let sample = rar(&psi, &proposal, dar.len(), &mut rng)?;
            let report = cover.as_ref().map(|c| c.evaluate(&sample.points)).transpose()?;
            runs.push(measured_row(id, "RAR", m, &sample, report.as_ref(), Some(seed)));
        }
        let grid = cover.as_ref().map(|c| c.grid_m());
        let mean = mean_row(id, "RAR_MEAN", m, &runs, grid);
        rows.extend(runs);
        rows.push(mean);
        Ok(rows)
    })?;
    let rows: Vec<ResultRow> = blocks.into_iter().flatten().collect();
    let fits = fit_series(&rows, &["DAR_REAL", "RAR_MEAN"]);

    let dar_fit = fits.iter().find(|(s, _)| s == "DAR_REAL").map(|f| f.1);
    let rar_fit = fits.iter().find(|(s, _)| s == "RAR_MEAN").map(|f| f.1);
    if let Some(d) = dar_fit {
        checks.push(BoundCheck::new(
            "example2 DAR slope <= -0.60",
            d.slope <= -0.60,
            format!("slope {:.4}", d.slope),
        ));
    }
    if let (Some(d), Some(r)) = (dar_fit, rar_fit) {
        checks.push(BoundCheck::new(
            "example2 RAR slope >= DAR slope + 0.15",
            r.slope >= d.slope + 0.15,
            format!("RAR {:.4}, DAR {:.4}", r.slope, d.slope),
        ));
    }
    Ok(ExperimentRun {
        config: config.clone(),
        rows,
        fits,
        checks,
        warnings,
    })
}

fn exact_report(points: &[f64], decomposition: &Decomposition) -> Result<DiscrepancyReport> {
    let d = star_discrepancy_1d_exact(points, |x| decomposition.cdf(x))?;
    Ok(DiscrepancyReport {
        grid_max: d,
        delta: 0.0,
        lower_bound: d,
        upper_bound: d,
        n: points.len(),
        grid_m: 0,
    })
}

/// Reduced acceptance-rejection for `x^2 + sin 4x` on `[0, 1]` with
/// `N = 2^m` requested points, against the same algorithm fed by a
/// pseudo-random driver.
pub fn run_example3(config: &ExperimentConfig) -> Result<ExperimentRun> {
    check_config(config, ExperimentId::Example3)?;
    let id = ExperimentId::Example3;
    let table = DirectionNumberTable::bundled();
    let decomposition = example3_decomposition();
    let ms = config.m_range.values();
    let blocks = per_resolution(&ms, |m| {
        let n = 1usize
            .checked_shl(m)
            .filter(|_| m < 40)
            .context("example3 resolution too large")?;
        let plan = plan_drar(&decomposition, n)?;
        let out = drar_sample(&plan, &table)?;
        let report = exact_report(out.samples.points.as_flat(), &decomposition)?;
        let mut row = measured_row(id, out.samples.tag.as_str(), m, &out.samples, Some(&report), None);
        row.grid_m = None;
        let mut rows = vec![row];
        let mut runs = Vec::new();
        for i in 0..config.random_runs {
            let seed = config.seed.wrapping_add(i);
            let mut driver = RandomDriver::new(2, ChaCha8Rng::seed_from_u64(seed));
            let out = drar_sample_with(&plan, &mut driver)?;
            let report = exact_report(out.samples.points.as_flat(), &decomposition)?;
            let mut row = measured_row(id, "DRAR_RANDOM", m, &out.samples, Some(&report), Some(seed));
            row.grid_m = None;
            runs.push(row);
        }
        let mean = mean_row(id, "DRAR_RANDOM_MEAN", m, &runs, None);
        rows.extend(runs);
        rows.push(mean);
        Ok(rows)
    })?;
    let rows: Vec<ResultRow> = blocks.into_iter().flatten().collect();
    let deterministic = rows.first().map(|r| r.sampler.clone()).unwrap_or_else(|| "DRAR".into());
    let fits = fit_series(&rows, &[deterministic.as_str(), "DRAR_RANDOM_MEAN"]);

    let mut checks = Vec::new();
    if let Some((_, f)) = fits.iter().find(|(s, _)| *s == deterministic) {
        checks.push(BoundCheck::new(
            "example3 DRAR slope <= -0.85",
            f.slope <= -0.85,
            format!("slope {:.4}", f.slope),
        ));
    }
    if let Some((_, f)) = fits.iter().find(|(s, _)| s == "DRAR_RANDOM_MEAN") {
        checks.push(BoundCheck::new(
            "example3 random-driver slope in [-0.62, -0.40]",
            (-0.62..=-0.40).contains(&f.slope),
            format!("slope {:.4}", f.slope),
        ));
    }
    Ok(ExperimentRun {
        config: config.clone(),
        rows,
        fits,
        checks,
        warnings: Vec::new(),
    })
}

/// One line of the net audit.
#[derive(Debug, Clone, PartialEq)]
pub struct AuditRow {
    pub s: usize,
    pub m: u32,
    pub t: u32,
    /// Every elementary interval of order `<= m - t` is fair.
    pub fair: bool,
    pub isotropic_estimate: f64,
    /// `2 s 2^{t/s} M^{-1/s}`.
    pub bound: f64,
}

impl AuditRow {
    pub fn passes(&self) -> bool {
        self.fair && self.isotropic_estimate <= self.bound
    }
}

/// `2 s 2^{t/s} M^{-1/s}` for a base-2 net of `M = 2^m` points.
pub fn isotropic_bound(s: usize, m: u32, t: u32) -> f64 {
    let s_f = s as f64;
    2.0 * s_f * (t as f64 / s_f).exp2() * (-(m as f64) / s_f).exp2()
}

/// Audits `t` and the isotropic discrepancy bound of Sobol nets for every
/// `s` in `dims` and `m` in the configured range.
pub fn run_net_audit(config: &ExperimentConfig, dims: &[usize]) -> Result<(Vec<AuditRow>, Vec<BoundCheck>)> {
    check_config(config, ExperimentId::NetAudit)?;
    if config.m_range.end > 12 || dims.iter().any(|&s| s == 0 || s > 5) {
        bail!("net audit supports s <= 5 and m <= 12");
    }
    let table = DirectionNumberTable::bundled();
    let mut jobs = Vec::new();
    for &s in dims {
        for m in config.m_range.values() {
            jobs.push((s, m));
        }
    }
    let rows: Vec<AuditRow> = thread::scope(|scope| {
        let handles: Vec<_> = jobs
            .iter()
            .map(|&(s, m)| {
                let table = &table;
                scope.spawn(move || -> Result<AuditRow> {
                    let net = DigitalNet::sobol(m, s, table)?;
                    let audit = audit_t_value(&net.points_dyadic(), m, m)?;
                    let seed = config.seed.wrapping_add(((s as u64) << 8) | m as u64);
                    let estimate = isotropic_lower_estimate(&net.points(), config.isotropic_trials, seed)?;
                    Ok(AuditRow {
                        s,
                        m,
                        t: audit.t,
                        fair: audit.fair_order == m - audit.t,
                        isotropic_estimate: estimate,
                        bound: isotropic_bound(s, m, audit.t),
                    })
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|_| bail!("worker thread panicked")))
            .collect::<Result<Vec<_>>>()
    })?;

    let mut checks = Vec::new();
    let failing: Vec<String> = rows.iter().filter(|r| !r.passes()).map(|r| format!("s={} m={}", r.s, r.m)).collect();
    checks.push(BoundCheck::new(
        "net audit isotropic bound",
        failing.is_empty(),
        if failing.is_empty() { format!("{} rows", rows.len()) } else { failing.join(", ") },
    ));
    let low_dim: Vec<String> = rows
        .iter()
        .filter(|r| r.s <= 2 && r.t != 0)
        .map(|r| format!("s={} m={} t={}", r.s, r.m, r.t))
        .collect();
    checks.push(BoundCheck::new(
        "net audit t = 0 for s <= 2",
        low_dim.is_empty(),
        low_dim.join(", "),
    ));
    Ok((rows, checks))
}
