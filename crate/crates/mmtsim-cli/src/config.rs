//! TOML experiment configuration.
//!
//! One flat document with a table per engine module. Every field has a
//! default, so a config file only needs the keys it overrides. Parsing is
//! strict: unknown keys are rejected rather than ignored.

use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::{Deserialize, Serialize};

/// Encoding for summary records and verification reports.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum, Default,
)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    /// Comma-separated values, one header row.
    #[default]
    Csv,
    /// Pretty-printed JSON.
    Json,
}

/// Named parameter bundles reproducing the two reference experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    /// Drifting profile: phi = 0.7, all fractions and coefficients 1/2.
    Collusive,
    /// Collapsing profile: phi = 0.3, all fractions and coefficients 1/2.
    NonCollusive,
}

/// Learning rule selector.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum, Default,
)]
#[serde(rename_all = "lowercase")]
pub enum DynamicKind {
    /// Block-coordinate updates with uniform step draws.
    #[default]
    Block,
    /// Projected gradient ascent on the drift surrogate.
    Pga,
}

/// Learner initialization selector.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum, Default,
)]
#[serde(rename_all = "lowercase")]
pub enum StartKind {
    /// Non-collusive start: x = 0 (v_alpha = 1, k_alpha = 0), y = 0.5.
    #[default]
    Default,
    /// Already-collusive start: x = 0.5, y = 0, any phi.
    Collusive,
}

/// `[strategy]`: the fixed profile simulated or learned from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StrategySection {
    /// Probability of a buy round.
    pub phi: f64,
    /// Taker buy fraction.
    pub k_alpha: f64,
    /// Taker sell fraction.
    pub k_beta: f64,
    /// Maker ask illiquidity coefficient.
    pub v_alpha: f64,
    /// Maker bid illiquidity coefficient.
    pub v_beta: f64,
}

impl Default for StrategySection {
    fn default() -> Self {
        Self {
            phi: 0.7,
            k_alpha: 0.5,
            k_beta: 0.5,
            v_alpha: 0.5,
            v_beta: 0.5,
        }
    }
}

/// `[market]`: noise law and starting state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MarketSection {
    /// Mean of log noise.
    pub log_mean: f64,
    /// Standard deviation of log noise.
    pub log_std: f64,
    /// Starting price.
    pub initial_price: f64,
    /// Starting cash per player.
    pub initial_cash: f64,
    /// Starting inventory per player.
    pub initial_inventory: f64,
}

impl Default for MarketSection {
    fn default() -> Self {
        Self {
            log_mean: 0.0,
            log_std: 0.5,
            initial_price: 1.0,
            initial_cash: 1.0,
            initial_inventory: 1.0,
        }
    }
}

/// `[sim]`: Monte Carlo shape and seeding.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimSection {
    /// Rounds per episode.
    pub rounds: u64,
    /// Independent episodes.
    pub trials: u64,
    /// Master seed; every episode derives its own stream.
    pub seed: u64,
    /// Record the coupled zero-impact benchmark path.
    pub record_benchmark: bool,
}

impl Default for SimSection {
    fn default() -> Self {
        Self {
            rounds: 3000,
            trials: 10,
            seed: 42,
            record_benchmark: true,
        }
    }
}

/// `[learning]`: dynamic, step sizes, and episode length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LearningSection {
    /// Which update rule runs.
    pub dynamic: DynamicKind,
    /// Learning steps per episode.
    pub max_steps: u64,
    /// Smallest block step.
    pub delta_min: f64,
    /// Largest block step.
    pub delta_max: f64,
    /// Uniform gradient rate for all four coordinates.
    pub eta: f64,
    /// Initialization.
    pub start: StartKind,
}

impl Default for LearningSection {
    fn default() -> Self {
        Self {
            dynamic: DynamicKind::Block,
            max_steps: 200,
            delta_min: 0.1,
            delta_max: 0.1,
            eta: 0.1,
            start: StartKind::Default,
        }
    }
}

/// `[feasibility]`: grid and oracle effort for the region map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FeasibilitySection {
    /// Smallest `v_alpha` on the grid.
    pub v_alpha_min: f64,
    /// Largest `v_alpha` on the grid.
    pub v_alpha_max: f64,
    /// Grid points along `v_alpha`.
    pub v_alpha_steps: usize,
    /// Smallest `k_alpha` on the grid.
    pub k_alpha_min: f64,
    /// Largest `k_alpha` on the grid.
    pub k_alpha_max: f64,
    /// Grid points along `k_alpha`.
    pub k_alpha_steps: usize,
    /// Smallest `v_beta` on the grid.
    pub v_beta_min: f64,
    /// Largest `v_beta` on the grid.
    pub v_beta_max: f64,
    /// Grid points along `v_beta`.
    pub v_beta_steps: usize,
    /// Smallest `k_beta` on the grid.
    pub k_beta_min: f64,
    /// Largest `k_beta` on the grid.
    pub k_beta_max: f64,
    /// Grid points along `k_beta`.
    pub k_beta_steps: usize,
    /// Oracle episode length.
    pub rounds: u64,
    /// Oracle episodes per grid point.
    pub trials: u64,
}

impl Default for FeasibilitySection {
    fn default() -> Self {
        Self {
            v_alpha_min: 0.0,
            v_alpha_max: 3.0,
            v_alpha_steps: 50,
            k_alpha_min: 0.0,
            k_alpha_max: 1.2,
            k_alpha_steps: 50,
            v_beta_min: 0.0,
            v_beta_max: 0.0,
            v_beta_steps: 1,
            k_beta_min: 0.0,
            k_beta_max: 0.0,
            k_beta_steps: 1,
            rounds: 3000,
            trials: 10,
        }
    }
}

/// `[bounds]`: reduced-coordinate start for the stopping-time table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BoundsSection {
    /// Starting buy product.
    pub x0: f64,
    /// Starting sell product.
    pub y0: f64,
}

impl Default for BoundsSection {
    fn default() -> Self {
        Self { x0: 0.0, y0: 0.5 }
    }
}

/// `[output]`: artifact placement and encoding.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    /// Directory all artifacts land in; created if missing.
    pub dir: PathBuf,
    /// Encoding of summary records and reports.
    pub format: Format,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("out"),
            format: Format::Csv,
        }
    }
}

/// The whole experiment configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct Config {
    /// Strategy profile.
    pub strategy: StrategySection,
    /// Noise and starting state.
    pub market: MarketSection,
    /// Monte Carlo shape.
    pub sim: SimSection,
    /// Learning dynamic.
    pub learning: LearningSection,
    /// Region-map grid.
    pub feasibility: FeasibilitySection,
    /// Stopping-time bound inputs.
    pub bounds: BoundsSection,
    /// Artifact placement.
    pub output: OutputSection,
}

impl Config {
    /// Parses a TOML config file.
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config file {}", path.display()))?;
        toml::from_str(&text)
            .with_context(|| format!("cannot parse config file {}", path.display()))
    }

    /// Serializes the full configuration (every key explicit).
    pub fn to_toml(&self) -> anyhow::Result<String> {
        toml::to_string_pretty(self).context("cannot serialize config")
    }

    /// Overwrites the strategy and noise sections with a preset's values.
    pub fn apply_preset(&mut self, preset: Preset) {
        let phi = match preset {
            Preset::Collusive => 0.7,
            Preset::NonCollusive => 0.3,
        };
        self.strategy = StrategySection {
            phi,
            k_alpha: 0.5,
            k_beta: 0.5,
            v_alpha: 0.5,
            v_beta: 0.5,
        };
        self.market = MarketSection::default();
        self.sim.rounds = 3000;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips_through_toml() {
        let mut config = Config::default();
        config.apply_preset(Preset::NonCollusive);
        config.sim.seed = 1234;
        config.learning.dynamic = DynamicKind::Pga;
        config.output.format = Format::Json;
        let text = config.to_toml().unwrap();
        let reparsed: Config = toml::from_str(&text).unwrap();
        assert_eq!(reparsed, config);
    }

    #[test]
    fn partial_files_fill_with_defaults() {
        let config: Config = toml::from_str("[strategy]\nphi = 0.4\n").unwrap();
        assert_eq!(config.strategy.phi, 0.4);
        assert_eq!(config.strategy.k_alpha, 0.5);
        assert_eq!(config.sim.rounds, 3000);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = toml::from_str::<Config>("[strategy]\nphee = 0.4\n").unwrap_err();
        assert!(err.to_string().contains("phee"));
    }
}
