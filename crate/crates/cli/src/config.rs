//! TOML experiment configuration: one `[experiment]` block plus nested
//! algorithm blocks. Every default is overridable from the file, and the
//! `train` subcommand's flags override the file in turn.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use spike_mh::dql::DqlConfig;
use spike_mh::env::EnvKind;
use spike_mh::mh::{MhConfig, PriorKind};
use spike_mh::snn::DEFAULT_T_SNN;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algo {
    MhSnn,
    Dql,
}

impl fmt::Display for Algo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Algo::MhSnn => write!(f, "mh-snn"),
            Algo::Dql => write!(f, "dql"),
        }
    }
}

impl FromStr for Algo {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "mh-snn" | "mh_snn" | "mhsnn" => Ok(Algo::MhSnn),
            "dql" => Ok(Algo::Dql),
            other => Err(format!("unknown algorithm '{other}' (expected mh-snn|dql)")),
        }
    }
}

/// On-disk layout of a config file. All sections and fields are optional;
/// anything missing falls back to the defaults below.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigFile {
    pub experiment: ExperimentSection,
    pub mh: MhSection,
    pub snn: SnnSection,
    pub dql: DqlSection,
}

impl ConfigFile {
    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config file {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing config file {}", path.display()))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentSection {
    pub env: Option<String>,
    pub algo: Option<String>,
    pub seeds: Vec<u64>,
    pub out_dir: Option<PathBuf>,
    pub smoothing_window: usize,
}

impl Default for ExperimentSection {
    fn default() -> Self {
        Self { env: None, algo: None, seeds: vec![1, 2, 3, 4, 5], out_dir: None, smoothing_window: 50 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MhSection {
    /// Defaults to 500 iterations on CartPole and 1000 on Acrobot.
    pub n_iter: Option<usize>,
    pub proposal_sigma: f64,
    /// "flat" or "gaussian".
    pub prior: String,
    pub prior_sigma: f64,
    /// Defaults to 0 on CartPole and -501 on Acrobot.
    pub reward_floor: Option<f64>,
    pub episodes_per_eval: usize,
    pub common_random_numbers: bool,
    pub literal_best_rule: bool,
    pub init_weight_sigma: f64,
    pub init_alpha: f64,
    pub init_mu: f64,
}

impl Default for MhSection {
    fn default() -> Self {
        Self {
            n_iter: None,
            proposal_sigma: 0.1,
            prior: "flat".to_string(),
            prior_sigma: 1.0,
            reward_floor: None,
            episodes_per_eval: 1,
            common_random_numbers: true,
            literal_best_rule: false,
            init_weight_sigma: 0.5,
            init_alpha: 0.9,
            init_mu: 1.0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SnnSection {
    pub t_snn: usize,
}

impl Default for SnnSection {
    fn default() -> Self {
        Self { t_snn: DEFAULT_T_SNN }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DqlSection {
    pub hidden_layers: usize,
    pub learning_rate: f64,
    pub gamma: f64,
    pub epsilon_start: f64,
    pub epsilon_end: f64,
    pub epsilon_decay: f64,
    pub batch_size: usize,
    pub buffer_capacity: usize,
    pub target_sync_interval: u64,
    pub max_episodes: usize,
    pub stop_at_reward: Option<f64>,
}

impl Default for DqlSection {
    fn default() -> Self {
        let d = DqlConfig::default();
        Self {
            hidden_layers: 1,
            learning_rate: d.learning_rate,
            gamma: d.gamma,
            epsilon_start: d.epsilon_start,
            epsilon_end: d.epsilon_end,
            epsilon_decay: d.epsilon_decay,
            batch_size: d.batch_size,
            buffer_capacity: d.buffer_capacity,
            target_sync_interval: d.target_sync_interval,
            max_episodes: d.max_episodes,
            stop_at_reward: d.stop_at_reward,
        }
    }
}

/// Fully resolved settings for the MH trainer, per experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct MhSettings {
    pub n_iter: usize,
    pub proposal_sigma: f64,
    pub prior: PriorKind,
    pub reward_floor: f64,
    pub episodes_per_eval: usize,
    pub common_random_numbers: bool,
    pub literal_best_rule: bool,
    pub init_weight_sigma: f64,
    pub init_alpha: f64,
    pub init_mu: f64,
    pub t_snn: usize,
}

impl MhSettings {
    pub fn to_core(&self, base_seed: u64) -> MhConfig {
        MhConfig {
            n_iter: self.n_iter,
            proposal_sigma: self.proposal_sigma,
            prior: self.prior,
            reward_floor: self.reward_floor,
            base_seed,
            episodes_per_eval: self.episodes_per_eval,
            common_random_numbers: self.common_random_numbers,
            literal_best_rule: self.literal_best_rule,
        }
    }
}

/// Fully resolved experiment: environment, algorithm, seeds, output paths and
/// the algorithm-specific blocks.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub env: EnvKind,
    pub algo: Algo,
    pub seeds: Vec<u64>,
    pub out_dir: PathBuf,
    pub smoothing_window: usize,
    pub mh: MhSettings,
    pub dql: DqlConfig,
    pub dql_hidden_layers: usize,
}

/// Command-line overrides applied on top of a config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub env: Option<String>,
    pub algo: Option<String>,
    pub seeds: Option<Vec<u64>>,
    pub out_dir: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn resolve(file: &ConfigFile, overrides: &Overrides) -> Result<Self> {
        let env_str = overrides
            .env
            .clone()
            .or_else(|| file.experiment.env.clone())
            .context("no environment given (set [experiment].env or pass --env)")?;
        let env: EnvKind = env_str.parse().map_err(anyhow::Error::msg)?;

        let algo_str = overrides
            .algo
            .clone()
            .or_else(|| file.experiment.algo.clone())
            .context("no algorithm given (set [experiment].algo or pass --algo)")?;
        let algo: Algo = algo_str.parse().map_err(anyhow::Error::msg)?;

        let seeds = overrides.seeds.clone().unwrap_or_else(|| file.experiment.seeds.clone());
        if seeds.is_empty() {
            bail!("seed list is empty");
        }
        if file.experiment.smoothing_window < 1 {
            bail!("smoothing_window must be >= 1");
        }

        let out_dir = overrides
            .out_dir
            .clone()
            .or_else(|| file.experiment.out_dir.clone())
            .unwrap_or_else(|| PathBuf::from(format!("runs/{algo}_{env}")));

        let defaults = MhConfig::for_env(env);
        let prior = match file.mh.prior.to_ascii_lowercase().as_str() {
            "flat" => PriorKind::Flat,
            "gaussian" => PriorKind::Gaussian { sigma: file.mh.prior_sigma },
            other => bail!("unknown prior '{other}' (expected flat|gaussian)"),
        };
        if !file.mh.proposal_sigma.is_finite() || file.mh.proposal_sigma <= 0.0 {
            bail!("proposal_sigma must be > 0");
        }
        if file.mh.episodes_per_eval < 1 {
            bail!("episodes_per_eval must be >= 1");
        }

        let mh = MhSettings {
            n_iter: file.mh.n_iter.unwrap_or(defaults.n_iter),
            proposal_sigma: file.mh.proposal_sigma,
            prior,
            reward_floor: file.mh.reward_floor.unwrap_or(defaults.reward_floor),
            episodes_per_eval: file.mh.episodes_per_eval,
            common_random_numbers: file.mh.common_random_numbers,
            literal_best_rule: file.mh.literal_best_rule,
            init_weight_sigma: file.mh.init_weight_sigma,
            init_alpha: file.mh.init_alpha,
            init_mu: file.mh.init_mu,
            t_snn: file.snn.t_snn.max(1),
        };

        let dql = DqlConfig {
            learning_rate: file.dql.learning_rate,
            gamma: file.dql.gamma,
            epsilon_start: file.dql.epsilon_start,
            epsilon_end: file.dql.epsilon_end,
            epsilon_decay: file.dql.epsilon_decay,
            batch_size: file.dql.batch_size,
            buffer_capacity: file.dql.buffer_capacity,
            target_sync_interval: file.dql.target_sync_interval,
            max_episodes: file.dql.max_episodes,
            stop_at_reward: file.dql.stop_at_reward,
        };

        Ok(Self {
            env,
            algo,
            seeds,
            out_dir,
            smoothing_window: file.experiment.smoothing_window,
            mh,
            dql,
            dql_hidden_layers: file.dql.hidden_layers,
        })
    }

    /// File prefix for per-seed artifacts, e.g. `mh-snn_cartpole`.
    pub fn artifact_prefix(&self) -> String {
        format!("{}_{}", self.algo, self.env)
    }
}
