//! Reward-curve smoothing, the comparison table, and re-deriving both from
//! the CSV artifacts of finished runs.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};

use crate::experiment::{RunSummary, SeedSummary};
use crate::logs::{read_csv, DqlCsvRow, MhCsvRow};
use crate::plot::reward_curve_svg;

/// Trailing moving average of width `window`: `output[i]` is the mean of
/// `input[max(0, i-window+1)..=i]`, so the output has the input's length and
/// the window is shorter at the start of the series.
pub fn moving_average(series: &[f64], window: usize) -> Vec<f64> {
    assert!(window >= 1, "window must be >= 1");
    let mut out = Vec::with_capacity(series.len());
    let mut sum = 0.0;
    for i in 0..series.len() {
        sum += series[i];
        if i >= window {
            sum -= series[i - window];
        }
        let len = (i + 1).min(window) as f64;
        out.push(sum / len);
    }
    out
}

/// Round to the nearest multiple of 10, halves away from zero.
pub fn round_to_decade(value: f64) -> f64 {
    (value / 10.0).round() * 10.0
}

/// Comparison table: one row per environment, one column per algorithm,
/// best rewards rounded to the nearest decade. The CSV keeps the unrounded
/// values.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub text: String,
    pub csv: String,
}

pub fn emit_table(summaries: &[RunSummary]) -> Table {
    assert!(!summaries.is_empty(), "emit_table needs at least one summary");

    let envs: Vec<String> = {
        let mut seen = BTreeSet::new();
        let mut order = Vec::new();
        for s in summaries {
            if seen.insert(s.env.clone()) {
                order.push(s.env.clone());
            }
        }
        order
    };
    let algos: Vec<String> = {
        let mut seen = BTreeSet::new();
        let mut order = Vec::new();
        for s in summaries {
            if seen.insert(s.algo.clone()) {
                order.push(s.algo.clone());
            }
        }
        order
    };

    let cell = |env: &str, algo: &str| -> Option<f64> {
        summaries.iter().find(|s| s.env == env && s.algo == algo).map(|s| s.max_best)
    };

    let mut text = String::new();
    let col = 10;
    text.push_str(&format!("{:<col$}", "env"));
    for algo in &algos {
        text.push_str(&format!(" | {algo:>col$}"));
    }
    text.push('\n');
    text.push_str(&"-".repeat(col + algos.len() * (col + 3)));
    text.push('\n');
    for env in &envs {
        text.push_str(&format!("{env:<col$}"));
        for algo in &algos {
            match cell(env, algo) {
                Some(v) => text.push_str(&format!(" | {:>col$}", round_to_decade(v))),
                None => text.push_str(&format!(" | {:>col$}", "-")),
            }
        }
        text.push('\n');
    }

    let mut csv = String::from("env,algo,max_best_reward,max_best_reward_rounded\n");
    for env in &envs {
        for algo in &algos {
            if let Some(v) = cell(env, algo) {
                csv.push_str(&format!("{env},{algo},{v},{}\n", round_to_decade(v)));
            }
        }
    }

    Table { text, csv }
}

/// One parsed per-seed CSV.
struct ParsedRun {
    algo: String,
    env: String,
    seed: u64,
    path: PathBuf,
    rewards: Vec<f64>,
    best_reward: f64,
    best_iteration: usize,
    best_episode: usize,
    x_label: &'static str,
}

fn parse_run_csv(path: &Path) -> Result<ParsedRun> {
    let stem = path
        .file_stem()
        .and_then(|s| s.to_str())
        .with_context(|| format!("bad CSV name {}", path.display()))?;
    let parts: Vec<&str> = stem.split('_').collect();
    if parts.len() != 3 || !parts[2].starts_with("seed") {
        bail!("CSV name {stem} does not match <algo>_<env>_seed<N>");
    }
    let seed: u64 = parts[2][4..].parse().with_context(|| format!("seed in {stem}"))?;

    let header = std::fs::read_to_string(path)?
        .lines()
        .next()
        .unwrap_or_default()
        .to_string();

    let (rewards, best_idx, x_label): (Vec<f64>, usize, &'static str) =
        if header.starts_with("step,") {
            let rows: Vec<MhCsvRow> = read_csv(path)?;
            let rewards: Vec<f64> = rows.iter().map(|r| r.episode_reward).collect();
            let best = rewards.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let idx = rewards.iter().position(|&r| r >= best).unwrap_or(0);
            (rewards, idx, "MH iteration")
        } else if header.starts_with("episode,") {
            let rows: Vec<DqlCsvRow> = read_csv(path)?;
            let rewards: Vec<f64> = rows.iter().map(|r| r.episode_reward).collect();
            let best = rewards.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let idx = rewards.iter().position(|&r| r >= best).unwrap_or(0);
            (rewards, idx, "episode")
        } else {
            bail!("unrecognized CSV header in {}: {header}", path.display());
        };

    let best_reward = rewards.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let (best_iteration, best_episode) = if x_label == "MH iteration" {
        // CSV rows are 1-based iterations; two episodes per iteration plus
        // the initial evaluation.
        let iter = best_idx + 1;
        (iter, 1 + 2 * iter)
    } else {
        (best_idx, best_idx)
    };

    Ok(ParsedRun {
        algo: parts[0].to_string(),
        env: parts[1].to_string(),
        seed,
        path: path.to_path_buf(),
        rewards,
        best_reward,
        best_iteration,
        best_episode,
        x_label,
    })
}

fn collect_run_csvs(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut found = Vec::new();
    let mut stack = vec![(dir.to_path_buf(), 0usize)];
    while let Some((d, depth)) = stack.pop() {
        for entry in std::fs::read_dir(&d).with_context(|| format!("listing {}", d.display()))? {
            let path = entry?.path();
            if path.is_dir() && depth == 0 {
                stack.push((path, 1));
            } else if path.extension().is_some_and(|e| e == "csv")
                && path
                    .file_stem()
                    .and_then(|s| s.to_str())
                    .is_some_and(|s| s.contains("_seed"))
            {
                found.push(path);
            }
        }
    }
    found.sort();
    Ok(found)
}

/// Rebuild summaries, plots and the comparison table from the CSVs under
/// `dir` (and its direct subdirectories). Returns the table after writing
/// `table.txt` and `table.csv` into `dir`.
pub fn report_from_dir(dir: &Path, window: usize) -> Result<Table> {
    let csvs = collect_run_csvs(dir)?;
    if csvs.is_empty() {
        bail!("no run CSVs found under {}", dir.display());
    }

    let mut groups: BTreeMap<(String, String), Vec<ParsedRun>> = BTreeMap::new();
    for path in &csvs {
        let run = parse_run_csv(path)?;
        groups.entry((run.env.clone(), run.algo.clone())).or_default().push(run);
    }

    let mut summaries = Vec::new();
    for ((env, algo), runs) in &groups {
        for run in runs {
            let smoothed = moving_average(&run.rewards, window);
            let svg = reward_curve_svg(
                &format!("{algo} on {env} (seed {})", run.seed),
                run.x_label,
                &run.rewards,
                &smoothed,
            );
            std::fs::write(run.path.with_extension("svg"), svg)?;
        }

        let seeds: Vec<SeedSummary> = runs
            .iter()
            .map(|r| SeedSummary {
                seed: r.seed,
                best_reward: r.best_reward,
                best_iteration: r.best_iteration,
                best_episode: r.best_episode,
                wall_clock_s: 0.0,
            })
            .collect();
        let mut bests: Vec<f64> = seeds.iter().map(|s| s.best_reward).collect();
        bests.sort_by(|a, b| a.partial_cmp(b).expect("finite rewards"));
        let median_best = if bests.len() % 2 == 1 {
            bests[bests.len() / 2]
        } else {
            0.5 * (bests[bests.len() / 2 - 1] + bests[bests.len() / 2])
        };
        summaries.push(RunSummary {
            env: env.clone(),
            algo: algo.clone(),
            smoothing_window: window,
            seeds,
            median_best,
            max_best: *bests.last().expect("at least one seed"),
        });
    }

    let table = emit_table(&summaries);
    std::fs::write(dir.join("table.txt"), &table.text)?;
    std::fs::write(dir.join("table.csv"), &table.csv)?;
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::SeedSummary;

    #[test]
    fn moving_average_identity_window() {
        let series = vec![3.0, -1.0, 4.0];
        assert_eq!(moving_average(&series, 1), series);
    }

    #[test]
    fn moving_average_constant_series() {
        let series = vec![7.0; 20];
        assert_eq!(moving_average(&series, 6), series);
    }

    #[test]
    fn moving_average_two_point_window() {
        assert_eq!(moving_average(&[0.0, 10.0], 2), vec![0.0, 5.0]);
    }

    #[test]
    fn moving_average_preserves_length_and_monotonicity() {
        let series: Vec<f64> = (0..100).map(|i| (i * i) as f64).collect();
        let smoothed = moving_average(&series, 50);
        assert_eq!(smoothed.len(), series.len());
        for pair in smoothed.windows(2) {
            assert!(pair[1] >= pair[0], "smoothing a non-decreasing series stays non-decreasing");
        }
    }

    #[test]
    fn moving_average_empty_series() {
        assert!(moving_average(&[], 50).is_empty());
    }

    #[test]
    fn decade_rounding_examples() {
        assert_eq!(round_to_decade(500.0), 500.0);
        assert_eq!(round_to_decade(-87.0), -90.0);
        assert_eq!(round_to_decade(284.0), 280.0);
        assert_eq!(round_to_decade(-144.9), -140.0);
    }

    fn summary(env: &str, algo: &str, best: f64) -> RunSummary {
        RunSummary {
            env: env.to_string(),
            algo: algo.to_string(),
            smoothing_window: 50,
            seeds: vec![SeedSummary {
                seed: 1,
                best_reward: best,
                best_iteration: 10,
                best_episode: 21,
                wall_clock_s: 0.0,
            }],
            median_best: best,
            max_best: best,
        }
    }

    #[test]
    fn table_layout_and_rounding() {
        let summaries = vec![
            summary("cartpole", "mh-snn", 500.0),
            summary("cartpole", "dql", 284.0),
            summary("acrobot", "mh-snn", -87.0),
            summary("acrobot", "dql", -144.0),
        ];
        let table = emit_table(&summaries);
        assert!(table.text.contains("cartpole"));
        assert!(table.text.contains("500"));
        assert!(table.text.contains("280"));
        assert!(table.text.contains("-90"));
        assert!(table.csv.contains("cartpole,dql,284,280\n"));
        assert!(table.csv.contains("acrobot,mh-snn,-87,-90\n"));
    }
}
