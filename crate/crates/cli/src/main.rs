//! `spike-mh`: train spiking policies with Metropolis-Hastings sampling (or
//! the DQL baseline), evaluate checkpoints, and rebuild reports from CSVs.

use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use spike_mh::env::{run_episode, EnvKind, DEFAULT_T_MAX};
use spike_mh::snn::{SnnPolicy, DEFAULT_T_SNN};
use spike_mh_cli::config::{ConfigFile, ExperimentConfig, Overrides};
use spike_mh_cli::experiment::load_checkpoint;
use spike_mh_cli::{report, run_experiment};

#[derive(Parser)]
#[command(
    name = "spike-mh",
    version,
    about = "Reward-driven Metropolis-Hastings training of spiking policies on CartPole and Acrobot"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a training experiment over one or more seeds.
    Train {
        /// Environment: cartpole | acrobot.
        #[arg(long)]
        env: Option<String>,
        /// Algorithm: mh-snn | dql.
        #[arg(long)]
        algo: Option<String>,
        /// TOML config file; flags override its values.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Comma-separated seed list, e.g. 1,2,3.
        #[arg(long, value_delimiter = ',')]
        seeds: Option<Vec<u64>>,
        /// Output directory for CSVs, SVGs, checkpoints and summary.json.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate a checkpointed parameter tensor.
    Eval {
        /// Path to a ParamTensor JSON checkpoint.
        #[arg(long)]
        params: PathBuf,
        /// Environment: cartpole | acrobot.
        #[arg(long)]
        env: String,
        /// Number of episodes to run (seeds seed, seed+1, ...).
        #[arg(long, default_value_t = 10)]
        episodes: usize,
        /// Seed of the first episode.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// SNN micro-steps per environment step.
        #[arg(long, default_value_t = DEFAULT_T_SNN)]
        t_snn: usize,
    },
    /// Rebuild plots and comparison tables from the CSVs of finished runs.
    Report {
        /// Directory holding run CSVs (searched one level deep).
        #[arg(long = "in")]
        input: PathBuf,
        /// Moving-average width for re-rendered plots.
        #[arg(long, default_value_t = 50)]
        window: usize,
    },
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Train { env, algo, config, seeds, out } => {
            let file = match config {
                Some(path) => ConfigFile::load(&path)?,
                None => ConfigFile::default(),
            };
            let overrides = Overrides { env, algo, seeds, out_dir: out };
            let experiment = ExperimentConfig::resolve(&file, &overrides)?;
            let summary = run_experiment(&experiment)?;

            println!(
                "{} on {}: {} seed(s) -> {}",
                summary.algo,
                summary.env,
                summary.seeds.len(),
                experiment.out_dir.display()
            );
            for seed in &summary.seeds {
                println!(
                    "  seed {:>3}: best reward {:>8.1} (iteration {}, episode {}, {:.1}s)",
                    seed.seed,
                    seed.best_reward,
                    seed.best_iteration,
                    seed.best_episode,
                    seed.wall_clock_s
                );
            }
            println!("  median best {:.1}, max best {:.1}", summary.median_best, summary.max_best);
        }
        Command::Eval { params, env, episodes, seed, t_snn } => {
            let kind: EnvKind = env.parse().map_err(anyhow::Error::msg)?;
            let tensor = load_checkpoint(&params)?;
            anyhow::ensure!(
                tensor.obs_dim == kind.obs_dim() && tensor.n_actions == kind.n_actions(),
                "checkpoint is {}x{} but {kind} needs {}x{}",
                tensor.obs_dim,
                tensor.n_actions,
                kind.obs_dim(),
                kind.n_actions()
            );
            anyhow::ensure!(episodes >= 1, "need at least one episode");

            let mut policy = SnnPolicy::new(&tensor, t_snn);
            let mut total = 0.0;
            for k in 0..episodes {
                let ep_seed = seed.wrapping_add(k as u64);
                let (reward, steps) = run_episode(kind, &mut policy, ep_seed, DEFAULT_T_MAX)
                    .context("episode rollout")?;
                total += reward;
                println!("episode seed {ep_seed}: reward {reward:.1} over {steps} steps");
            }
            println!("mean reward over {episodes} episode(s): {:.3}", total / episodes as f64);
        }
        Command::Report { input, window } => {
            anyhow::ensure!(window >= 1, "window must be >= 1");
            let table = report::report_from_dir(&input, window)?;
            print!("{}", table.text);
            println!("(table.txt and table.csv written to {})", input.display());
        }
    }
    Ok(())
}
