//! Experiment configuration file.
//!
//! ```toml
//! [game]
//! L = 6
//! Kmin = 3
//! Kmax = 3
//! C = 4
//!
//! [agent]
//! kind = "qlearn"
//! alpha = 0.1
//! epsilon0 = 0.2
//! epsilonDecay = 0.995
//! gamma = 0.95
//! seedCount = 20
//!
//! [run]
//! episodes = 500
//! criterionWindow = 5
//! criterionMaxErrors = 0
//! alpha = 0.05
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::agents::{AgentConfig, AgentKind};
use crate::engine::EpisodeParams;

use super::pairs::MeasureSettings;
use super::training::DEFAULT_MAX_ATTEMPTS;
use super::HarnessError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GameSection {
    #[serde(rename = "L")]
    pub length: usize,
    #[serde(rename = "Kmin")]
    pub k_min: usize,
    #[serde(rename = "Kmax")]
    pub k_max: usize,
    #[serde(rename = "C")]
    pub colors: usize,
    /// Discount used for episode returns; defaults to the agent's gamma.
    pub gamma: Option<f64>,
}

impl Default for GameSection {
    fn default() -> Self {
        let p = EpisodeParams::default();
        Self {
            length: p.length,
            k_min: p.k_min,
            k_max: p.k_max,
            colors: p.colors,
            gamma: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default, rename_all = "camelCase")]
pub struct AgentSection {
    pub kind: String,
    pub alpha: f64,
    pub epsilon0: f64,
    pub epsilon_decay: f64,
    pub gamma: f64,
    pub seed_count: usize,
    /// First run seed; seeds are `seed .. seed + seedCount`.
    pub seed: u64,
    pub avoid_repeats: bool,
}

impl Default for AgentSection {
    fn default() -> Self {
        let a = AgentConfig::default();
        Self {
            kind: a.kind.name().to_string(),
            alpha: a.alpha,
            epsilon0: a.epsilon0,
            epsilon_decay: a.epsilon_decay,
            gamma: a.gamma,
            seed_count: 10,
            seed: 0,
            avoid_repeats: a.avoid_repeats,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default, rename_all = "camelCase")]
pub struct RunSection {
    pub episodes: usize,
    pub criterion_window: usize,
    pub criterion_max_errors: usize,
    /// Significance level for pair detection.
    pub alpha: f64,
    pub max_attempts: usize,
    pub asymptote_eps: f64,
    pub asymptote_window: usize,
}

impl Default for RunSection {
    fn default() -> Self {
        let m = MeasureSettings::default();
        Self {
            episodes: 500,
            criterion_window: m.criterion_window,
            criterion_max_errors: m.criterion_max_errors,
            alpha: 0.05,
            max_attempts: DEFAULT_MAX_ATTEMPTS,
            asymptote_eps: m.asymptote_eps,
            asymptote_window: m.asymptote_window,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub game: GameSection,
    pub agent: AgentSection,
    pub run: RunSection,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, HarnessError> {
        let config: Self = toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        config.check()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn check(&self) -> Result<(), HarnessError> {
        let invalid = |e: &dyn std::fmt::Display| HarnessError::Config(e.to_string());
        self.params().check().map_err(|e| invalid(&e))?;
        self.agent_config()
            .map_err(|e| invalid(&e))?
            .check()
            .map_err(|e| invalid(&e))?;
        if self.run.episodes == 0 {
            return Err(HarnessError::Config(
                "run.episodes must be at least 1".into(),
            ));
        }
        if self.run.criterion_window == 0 || self.run.asymptote_window == 0 {
            return Err(HarnessError::Config("windows must be at least 1".into()));
        }
        if !(self.run.alpha > 0.0 && self.run.alpha < 1.0) {
            return Err(HarnessError::Config("run.alpha must lie in (0, 1)".into()));
        }
        if self.agent.seed_count == 0 {
            return Err(HarnessError::Config(
                "agent.seedCount must be at least 1".into(),
            ));
        }
        if self.run.max_attempts == 0 {
            return Err(HarnessError::Config(
                "run.maxAttempts must be at least 1".into(),
            ));
        }
        Ok(())
    }

    pub fn params(&self) -> EpisodeParams {
        EpisodeParams {
            length: self.game.length,
            k_min: self.game.k_min,
            k_max: self.game.k_max,
            colors: self.game.colors,
            gamma: self.game.gamma.unwrap_or(self.agent.gamma),
        }
    }

    pub fn agent_config(&self) -> Result<AgentConfig, HarnessError> {
        Ok(AgentConfig {
            kind: self.agent.kind.parse::<AgentKind>()?,
            alpha: self.agent.alpha,
            epsilon0: self.agent.epsilon0,
            epsilon_decay: self.agent.epsilon_decay,
            gamma: self.agent.gamma,
            seed: self.agent.seed,
            avoid_repeats: self.agent.avoid_repeats,
        })
    }

    pub fn seeds(&self) -> Vec<u64> {
        (0..self.agent.seed_count as u64)
            .map(|i| self.agent.seed + i)
            .collect()
    }

    pub fn measure_settings(&self) -> MeasureSettings {
        MeasureSettings {
            criterion_window: self.run.criterion_window,
            criterion_max_errors: self.run.criterion_max_errors,
            asymptote_eps: self.run.asymptote_eps,
            asymptote_window: self.run.asymptote_window,
        }
    }
}
