//! Seed-sweep orchestration: runs each seed (in parallel up to the
//! `SPIKE_MH_THREADS` cap), writes one CSV and one SVG per seed, checkpoints
//! the best parameters whenever they improve, and emits `summary.json`.

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use spike_mh::dql::dql_train;
use spike_mh::mh::{init_params, train_with_observer};
use spike_mh::snn::ParamTensor;

use crate::config::{Algo, ExperimentConfig};
use crate::logs::{write_csv, DqlCsvRow, MhCsvRow};
use crate::plot::reward_curve_svg;
use crate::report::moving_average;

/// Environment variable capping the number of parallel seed workers.
pub const THREADS_ENV_VAR: &str = "SPIKE_MH_THREADS";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedSummary {
    pub seed: u64,
    pub best_reward: f64,
    /// MH iteration (or DQL episode) at which the best was first reached.
    pub best_iteration: usize,
    /// Environment episodes consumed up to that point (MH runs two episodes
    /// per iteration plus one initial evaluation).
    pub best_episode: usize,
    pub wall_clock_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub env: String,
    pub algo: String,
    pub smoothing_window: usize,
    pub seeds: Vec<SeedSummary>,
    pub median_best: f64,
    pub max_best: f64,
}

impl RunSummary {
    fn from_seeds(config: &ExperimentConfig, seeds: Vec<SeedSummary>) -> Self {
        let mut bests: Vec<f64> = seeds.iter().map(|s| s.best_reward).collect();
        bests.sort_by(|a, b| a.partial_cmp(b).expect("rewards are finite"));
        let median_best = if bests.len() % 2 == 1 {
            bests[bests.len() / 2]
        } else {
            0.5 * (bests[bests.len() / 2 - 1] + bests[bests.len() / 2])
        };
        let max_best = *bests.last().expect("at least one seed");
        Self {
            env: config.env.to_string(),
            algo: config.algo.to_string(),
            smoothing_window: config.smoothing_window,
            seeds,
            median_best,
            max_best,
        }
    }
}

/// Number of seed workers: the `SPIKE_MH_THREADS` cap, else the machine's
/// parallelism, never more than the number of seeds.
fn worker_count(n_seeds: usize) -> usize {
    let cap = std::env::var(THREADS_ENV_VAR)
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n >= 1);
    let available =
        std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    cap.unwrap_or(available).min(n_seeds).max(1)
}

/// Run every seed of the experiment, write per-seed artifacts and the
/// experiment summary, and return the summary.
pub fn run_experiment(config: &ExperimentConfig) -> Result<RunSummary> {
    std::fs::create_dir_all(&config.out_dir)
        .with_context(|| format!("creating output directory {}", config.out_dir.display()))?;

    let n_seeds = config.seeds.len();
    let workers = worker_count(n_seeds);
    let next_seed = AtomicUsize::new(0);
    let results: Vec<Mutex<Option<Result<SeedSummary>>>> =
        (0..n_seeds).map(|_| Mutex::new(None)).collect();

    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let idx = next_seed.fetch_add(1, Ordering::Relaxed);
                if idx >= n_seeds {
                    break;
                }
                let outcome = run_seed(config, config.seeds[idx]);
                *results[idx].lock().expect("no poisoned seed slot") = Some(outcome);
            });
        }
    });

    let mut seed_summaries = Vec::with_capacity(n_seeds);
    for slot in results {
        let outcome = slot.into_inner().expect("no poisoned seed slot");
        seed_summaries.push(outcome.expect("worker stored a result")?);
    }

    let summary = RunSummary::from_seeds(config, seed_summaries);
    let summary_path = config.out_dir.join("summary.json");
    let json = serde_json::to_string_pretty(&summary)?;
    std::fs::write(&summary_path, json)
        .with_context(|| format!("writing {}", summary_path.display()))?;
    Ok(summary)
}

fn run_seed(config: &ExperimentConfig, seed: u64) -> Result<SeedSummary> {
    let start = Instant::now();
    let prefix = config.artifact_prefix();
    let base = config.out_dir.join(format!("{prefix}_seed{seed}"));

    match config.algo {
        Algo::MhSnn => run_mh_seed(config, seed, &base, start),
        Algo::Dql => run_dql_seed(config, seed, &base, start),
    }
}

fn run_mh_seed(
    config: &ExperimentConfig,
    seed: u64,
    base: &Path,
    start: Instant,
) -> Result<SeedSummary> {
    let mh = &config.mh;
    let core_config = mh.to_core(seed);
    let init = init_params(config.env, seed, mh.init_weight_sigma, mh.init_alpha, mh.init_mu);

    let checkpoint_path = base.with_extension("best.json");
    let mut rows: Vec<MhCsvRow> = Vec::with_capacity(mh.n_iter);
    let mut checkpoint_error: Option<anyhow::Error> = None;
    let result = train_with_observer(
        config.env,
        &init,
        mh.t_snn,
        &core_config,
        |record, improved| {
            rows.push(MhCsvRow::from(record));
            if let Some(best) = improved {
                if checkpoint_error.is_none() {
                    if let Err(e) = write_checkpoint(&checkpoint_path, best) {
                        checkpoint_error = Some(e);
                    }
                }
            }
        },
    )?;
    if let Some(e) = checkpoint_error {
        return Err(e);
    }
    // A chain that never improves on the initial evaluation still leaves a
    // usable checkpoint: the initial parameters.
    if !checkpoint_path.exists() {
        write_checkpoint(&checkpoint_path, &result.best_params)?;
    }

    write_csv(&base.with_extension("csv"), &rows)?;

    let raw: Vec<f64> = rows.iter().map(|r| r.episode_reward).collect();
    let smoothed = moving_average(&raw, config.smoothing_window);
    let svg = reward_curve_svg(
        &format!("{} on {} (seed {seed})", config.algo, config.env),
        "MH iteration",
        &raw,
        &smoothed,
    );
    std::fs::write(base.with_extension("svg"), svg)?;

    Ok(SeedSummary {
        seed,
        best_reward: result.best_reward,
        best_iteration: result.best_iteration(),
        best_episode: result.best_episode(),
        wall_clock_s: start.elapsed().as_secs_f64(),
    })
}

fn run_dql_seed(
    config: &ExperimentConfig,
    seed: u64,
    base: &Path,
    start: Instant,
) -> Result<SeedSummary> {
    let result = dql_train(config.env, config.dql_hidden_layers, &config.dql, seed);

    let rows: Vec<DqlCsvRow> = result.episodes.iter().map(DqlCsvRow::from).collect();
    write_csv(&base.with_extension("csv"), &rows)?;

    let raw: Vec<f64> = rows.iter().map(|r| r.episode_reward).collect();
    let smoothed = moving_average(&raw, config.smoothing_window);
    let svg = reward_curve_svg(
        &format!(
            "{} ({} hidden) on {} (seed {seed})",
            config.algo, config.dql_hidden_layers, config.env
        ),
        "episode",
        &raw,
        &smoothed,
    );
    std::fs::write(base.with_extension("svg"), svg)?;

    Ok(SeedSummary {
        seed,
        best_reward: result.best_reward,
        best_iteration: result.best_episode,
        best_episode: result.best_episode,
        wall_clock_s: start.elapsed().as_secs_f64(),
    })
}

fn write_checkpoint(path: &PathBuf, params: &ParamTensor) -> Result<()> {
    let json = serde_json::to_string_pretty(params)?;
    std::fs::write(path, json).with_context(|| format!("writing checkpoint {}", path.display()))
}

/// Load a parameter checkpoint, validating shapes and ranges.
pub fn load_checkpoint(path: &Path) -> Result<ParamTensor> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading checkpoint {}", path.display()))?;
    let params: ParamTensor = serde_json::from_str(&text)
        .with_context(|| format!("parsing checkpoint {}", path.display()))?;
    params.validate().map_err(anyhow::Error::msg)?;
    Ok(params)
}
