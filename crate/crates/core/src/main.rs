use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use smd_ama::harness::{
    self, load_csv, output, Algo, ExperimentConfig, OracleKind, QbbSettings,
};
use smd_ama::{Averaging, Beta0, Loss};

#[derive(Parser)]
#[command(name = "smd-ama", version, about = "Active model aggregation via stochastic mirror descent")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one algorithm over replicated splits.
    Run {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "smd-ama")]
        algo: Algo,
        /// Label budget (QBB only).
        #[arg(long)]
        budget: Option<usize>,
        #[command(flatten)]
        qbb: QbbArgs,
    },
    /// SMD-AMA at several values of mu: labels used vs. test error.
    SweepMu {
        #[command(flatten)]
        common: Common,
        /// Comma-separated mu values in [0, 1).
        #[arg(long, value_delimiter = ',', default_value = "0,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9")]
        mus: Vec<f64>,
    },
    /// SMD-AMA vs. QBB given the same number of labels.
    CompareQbb {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        qbb: QbbArgs,
    },
}

#[derive(Args)]
struct Common {
    /// Numeric CSV, one example per row.
    #[arg(long)]
    data: PathBuf,
    /// 0-based index of the label column.
    #[arg(long)]
    label_col: usize,
    /// Skip the first row.
    #[arg(long)]
    header: bool,
    #[arg(long, default_value_t = 0.3)]
    mu: f64,
    /// `auto` or a positive number.
    #[arg(long, default_value = "auto")]
    beta0: Beta0,
    #[arg(long, default_value_t = 80)]
    stumps_per_dim: usize,
    #[arg(long, default_value = "squared")]
    loss: Loss,
    /// Fraction of rows used as the training stream.
    #[arg(long, default_value_t = 0.7)]
    split: f64,
    #[arg(long, default_value_t = 10)]
    reps: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Rounds between test evaluations (default: stream length / 200).
    #[arg(long)]
    eval_every: Option<usize>,
    #[arg(long, default_value = "dataset")]
    oracle: OracleKind,
    /// Average the pre-update iterates theta_0..theta_{T-1} instead of theta_1..theta_T.
    #[arg(long)]
    avg_shift: bool,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Args)]
struct QbbArgs {
    #[arg(long, default_value_t = 100)]
    candidate_size: usize,
    #[arg(long, default_value_t = 50)]
    boost_rounds: usize,
    /// Uniformly sampled labels before the first boost (counted against the budget).
    #[arg(long, default_value_t = 10)]
    seed_size: usize,
}

impl Common {
    fn config(&self, algo: Algo, qbb: QbbSettings) -> ExperimentConfig {
        ExperimentConfig {
            algo,
            mu: self.mu,
            beta0: self.beta0,
            stumps_per_dim: self.stumps_per_dim,
            loss: self.loss,
            replicates: self.reps,
            seed: self.seed,
            split: self.split,
            eval_every: self.eval_every,
            oracle: self.oracle,
            averaging: if self.avg_shift {
                Averaging::PreUpdate
            } else {
                Averaging::PostUpdate
            },
            qbb,
        }
    }
}

impl QbbArgs {
    fn settings(&self, budget: Option<usize>) -> QbbSettings {
        QbbSettings {
            budget,
            candidate_size: self.candidate_size,
            boost_rounds: self.boost_rounds,
            seed_size: self.seed_size,
        }
    }
}

fn load(common: &Common) -> Result<harness::Dataset> {
    load_csv(&common.data, common.label_col, common.header)
        .with_context(|| format!("loading {}", common.data.display()))
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run {
            common,
            algo,
            budget,
            qbb,
        } => {
            let cfg = common.config(algo, qbb.settings(budget));
            let ds = load(&common)?;
            let res = harness::run_experiment(&cfg, &ds)?;
            output::write_run(&common.out, &cfg, &res)?;
            let s = &res.summary;
            println!(
                "{} on {}: error {:.4} ± {:.4}, loss {:.4}, queries {:.1} ({:.4} of stream)",
                s.algo, s.dataset, s.err_mean, s.err_std, s.loss_mean, s.queries_mean, s.query_fraction
            );
        }
        Command::SweepMu { common, mus } => {
            let cfg = common.config(Algo::SmdAma, QbbSettings::default());
            let ds = load(&common)?;
            let sweep = harness::sweep_mu(&cfg, &ds, &mus)?;
            output::write_sweep(&common.out, &cfg, &sweep)?;
            println!("mu\terror\tqueries\tfloor");
            for r in &sweep.rows {
                println!("{}\t{:.4}\t{:.1}\t{:.1}", r.mu, r.err_mean, r.queries_mean, r.epsilon_floor);
            }
        }
        Command::CompareQbb { common, qbb } => {
            let cfg = common.config(Algo::SmdAma, qbb.settings(None));
            let ds = load(&common)?;
            let cmp = harness::match_budget_qbb(&cfg, &ds)?;
            output::write_comparison(&common.out, &cfg, &cmp)?;
            let s = &cmp.summary;
            println!(
                "{}: budget {:.1}, SMD-AMA error {:.4}, QBB error {:.4}",
                s.dataset, s.budget_mean, s.smd_ama_error_mean, s.qbb_error_mean
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
