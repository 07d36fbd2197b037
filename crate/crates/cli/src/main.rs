use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use relaylab_core::harness::{
    emit_outputs, run_analytic, run_experiment, run_simulate, ExperimentConfig, ExperimentId, Overrides,
};
use relaylab_core::Result;

#[derive(Parser)]
#[command(name = "relaylab", version, about = "Hybrid active/passive relay experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Success probability against interferer density.
    Fig2(Common),
    /// Success probability against storage capacity.
    Fig3(Common),
    /// Regret race of the bandit policies on the piecewise-stationary schedule.
    Fig4(Common),
    /// Print the closed-form terms and their sum.
    Analytic(Common),
    /// Print Monte Carlo success probabilities with standard errors.
    Simulate(Common),
}

#[derive(Args, Clone)]
struct Common {
    /// TOML file with [params], [sweep], [run], [bandit] and [analytic] sections.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory for CSV and SVG files.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    replications: Option<u64>,
    /// Monte Carlo slots per grid point.
    #[arg(long)]
    slots: Option<u64>,
    /// Discount factor of the discounted policies.
    #[arg(long)]
    gamma: Option<f64>,
    /// Discounted KL-UCB with discounted counts and log of their total.
    #[arg(long)]
    canonical_discount: bool,
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long)]
    threads: Option<usize>,
}

impl Common {
    fn load(&self, id: ExperimentId) -> Result<ExperimentConfig> {
        let base = match &self.config {
            Some(path) => ExperimentConfig::from_file(id, path)?,
            None => ExperimentConfig::defaults(id),
        };
        base.with_overrides(&Overrides {
            seed: self.seed,
            out_dir: self.out.clone(),
            replications: self.replications,
            n_slots: self.slots,
            gamma: self.gamma,
            canonical_discount: self.canonical_discount,
            threads: self.threads,
        })
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Fig2(c) => figure(&c.load(ExperimentId::Fig2)?),
        Command::Fig3(c) => figure(&c.load(ExperimentId::Fig3)?),
        Command::Fig4(c) => figure(&c.load(ExperimentId::Fig4)?),
        Command::Analytic(c) => {
            let t = run_analytic(&c.load(ExperimentId::Custom)?)?;
            println!("term,value");
            println!("active,{:.8}", t.active);
            println!("passive_rescue,{:.8}", t.passive_rescue);
            println!("passive_only,{:.8}", t.passive_only);
            println!("total,{:.8}", t.total);
            Ok(())
        }
        Command::Simulate(c) => {
            let e = run_simulate(&c.load(ExperimentId::Custom)?)?;
            println!("estimator,estimate,std_error,slots");
            for (name, p) in [
                ("active", e.active),
                ("passive", e.passive),
                ("optimal", e.optimal),
                ("term_active", e.term_active),
                ("term_passive_rescue", e.term_passive_rescue),
                ("term_passive_only", e.term_passive_only),
            ] {
                println!("{name},{:.8},{:.8},{}", p.mean(), p.std_error(), p.trials);
            }
            Ok(())
        }
    }
}

fn figure(config: &ExperimentConfig) -> Result<()> {
    let table = run_experiment(config)?;
    for path in emit_outputs(&table, config)? {
        println!("{}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("relaylab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
