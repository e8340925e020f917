use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

use detar::config::{ExperimentConfig, ExperimentId, MRange};
use detar::output::{self, write_audit, write_checks};
use detar::{run_example1, run_example2, run_example3, run_net_audit};

#[derive(Parser, Debug)]
#[command(name = "detar", version, about = "Deterministic acceptance-rejection experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Non-product density on [0,1]^4: DAR against RAR.
    Example1(RunArgs),
    /// Gamma(3/2) product on R_+^2: DAR through the inverse Rosenblatt map.
    Example2(RunArgs),
    /// x^2 + sin 4x on [0,1]: reduced acceptance-rejection.
    Example3(RunArgs),
    /// Quality parameter and isotropic bound of Sobol nets.
    NetAudit {
        #[command(flatten)]
        run: RunArgs,
        /// Comma-separated dimensions to audit.
        #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,5")]
        dims: Vec<usize>,
        /// Random convex test sets per isotropic estimate.
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
    },
    /// Refit log-log slopes from a results CSV.
    Fit {
        /// Results file written by one of the experiment subcommands.
        input: PathBuf,
    },
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Inclusive range of net resolutions, e.g. 9..14.
    #[arg(long = "m-range")]
    m_range: Option<MRange>,
    /// δ-cover grid resolution m_g.
    #[arg(long)]
    grid: Option<u32>,
    /// Base seed of the pseudo-random baselines.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output CSV; defaults to results/<experiment>.csv.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write log-log plot data next to the CSV.
    #[arg(long = "plot-data")]
    plot_data: bool,
}

impl RunArgs {
    fn config(&self, id: ExperimentId) -> ExperimentConfig {
        let mut c = ExperimentConfig::new(id).with_seed(self.seed);
        if let Some(r) = self.m_range {
            c = c.with_m_range(r);
        }
        if let Some(g) = self.grid {
            c = c.with_grid(g);
        }
        c.out = Some(
            self.out
                .clone()
                .unwrap_or_else(|| PathBuf::from(format!("results/{}.csv", id.as_str()))),
        );
        c.plot_data = self.plot_data;
        c
    }
}

fn run(cli: Cli) -> Result<bool> {
    let stderr = &mut io::stderr();
    match cli.command {
        Command::Example1(args) => experiment(args.config(ExperimentId::Example1), run_example1),
        Command::Example2(args) => experiment(args.config(ExperimentId::Example2), run_example2),
        Command::Example3(args) => experiment(args.config(ExperimentId::Example3), run_example3),
        Command::NetAudit { run, dims, trials } => {
            let mut config = run.config(ExperimentId::NetAudit);
            config.isotropic_trials = trials;
            let (rows, checks) = run_net_audit(&config, &dims)?;
            let path = config.out.clone().expect("output path is always set");
            let mut w = output::create(&path)?;
            write_audit(&rows, &mut w)?;
            w.flush()?;
            eprintln!("wrote {}", path.display());
            write_checks(&checks, stderr)?;
            Ok(checks.iter().all(|c| c.passed))
        }
        Command::Fit { input } => {
            let fits = output::refit_results(File::open(&input)?)?;
            let mut out = io::stdout().lock();
            writeln!(out, "experiment\tsampler\tseed\tpoints\tslope\tintercept\tr_squared")?;
            for f in fits {
                let seed = f.seed.map(|s| s.to_string()).unwrap_or_default();
                writeln!(
                    out,
                    "{}\t{}\t{}\t{}\t{:.6}\t{:.6}\t{:.6}",
                    f.experiment, f.sampler, seed, f.points, f.fit.slope, f.fit.intercept, f.fit.r_squared
                )?;
            }
            Ok(true)
        }
    }
}

fn experiment(
    config: ExperimentConfig,
    runner: fn(&ExperimentConfig) -> Result<detar::ExperimentRun>,
) -> Result<bool> {
    let run = runner(&config)?;
    for w in &run.warnings {
        eprintln!("warning: {w}");
    }
    let path = config.out.clone().expect("output path is always set");
    for p in output::write_run(&run, &path)? {
        eprintln!("wrote {}", p.display());
    }
    write_checks(&run.checks, &mut io::stderr())?;
    Ok(run.all_checks_pass())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
