//! CSV log schemas. The CSV is the canonical run artifact; every row parses
//! back to the record it came from, and identical runs produce byte-identical
//! files.

use std::path::Path;

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use spike_mh::dql::EpisodeRecord;
use spike_mh::mh::ChainRecord;

/// MH run row: `step,episode_reward,accepted,acceptance_ratio,best_reward`.
/// `episode_reward` is the proposal's accumulated reward R(W').
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MhCsvRow {
    pub step: usize,
    pub episode_reward: f64,
    pub accepted: bool,
    pub acceptance_ratio: f64,
    pub best_reward: f64,
}

impl From<&ChainRecord> for MhCsvRow {
    fn from(rec: &ChainRecord) -> Self {
        Self {
            step: rec.iteration,
            episode_reward: rec.reward_proposal,
            accepted: rec.accepted,
            acceptance_ratio: rec.acceptance_ratio,
            best_reward: rec.best_reward_so_far,
        }
    }
}

/// DQL run row: `episode,episode_reward,epsilon`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DqlCsvRow {
    pub episode: usize,
    pub episode_reward: f64,
    pub epsilon: f64,
}

impl From<&EpisodeRecord> for DqlCsvRow {
    fn from(rec: &EpisodeRecord) -> Self {
        Self { episode: rec.episode, episode_reward: rec.reward, epsilon: rec.epsilon }
    }
}

pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)
        .with_context(|| format!("creating CSV {}", path.display()))?;
    for row in rows {
        writer.serialize(row)?;
    }
    writer.flush()?;
    Ok(())
}

pub fn read_csv<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    let mut reader =
        csv::Reader::from_path(path).with_context(|| format!("reading CSV {}", path.display()))?;
    let mut rows = Vec::new();
    for row in reader.deserialize() {
        rows.push(row.with_context(|| format!("parsing CSV row in {}", path.display()))?);
    }
    Ok(rows)
}
