//! Simulation configuration files.
//!
//! ```toml
//! [field]
//! characteristic = 2
//! degree = 8
//!
//! [protocol]
//! rounds = 6
//! strict = true
//!
//! [spacetime]
//! distance_m = 100000.0
//! processing_time_s = 1e-6
//!
//! [run]
//! mode = "honest"        # honest | attack | hiding-audit | timing-audit
//! seed = 7
//! bit = 1                # optional; drawn from the seed when absent
//! strategy = "w.json"    # attack mode, relative to the config file
//! trials = 1
//! inject_round = 3       # optional response delay
//! inject_delay_s = 0.001
//! ```

use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::adversary::{CheatingStrategy, StrategyFile};
use crate::gf::FieldConfig;
use crate::protocol::ProtocolParams;
use crate::spacetime::SpacetimeConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeName {
    Honest,
    Attack,
    HidingAudit,
    TimingAudit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolSection {
    pub rounds: usize,
    #[serde(default)]
    pub strict: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub mode: ModeName,
    pub seed: u64,
    #[serde(default)]
    pub bit: Option<u8>,
    #[serde(default)]
    pub strategy: Option<PathBuf>,
    #[serde(default = "one")]
    pub trials: u64,
    #[serde(default)]
    pub inject_round: Option<usize>,
    #[serde(default)]
    pub inject_delay_s: Option<f64>,
}

fn one() -> u64 {
    1
}

/// The file as written.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub field: FieldConfig,
    pub protocol: ProtocolSection,
    pub spacetime: SpacetimeConfig,
    pub run: RunSection,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, HarnessError> {
        toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

/// Extra delay added to one round's response.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Injection {
    pub round: usize,
    pub delay_s: f64,
}

#[derive(Debug, Clone)]
pub enum RunMode {
    Honest,
    Attack(Arc<CheatingStrategy>),
    HidingAudit,
    TimingAudit,
}

impl RunMode {
    pub fn name(&self) -> &'static str {
        match self {
            RunMode::Honest => "honest",
            RunMode::Attack(_) => "attack",
            RunMode::HidingAudit => "hiding-audit",
            RunMode::TimingAudit => "timing-audit",
        }
    }
}

/// A validated configuration.
#[derive(Debug, Clone)]
pub struct SimulationConfig {
    pub params: ProtocolParams,
    pub spacetime: SpacetimeConfig,
    pub seed: u64,
    pub mode: RunMode,
    pub bit: Option<bool>,
    pub trials: u64,
    pub injection: Option<Injection>,
}

impl SimulationConfig {
    /// Reads a config file; a strategy path is resolved against the
    /// file's directory.
    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::Io(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::from_file(&ConfigFile::parse(&text)?, base)
    }

    pub fn from_file(file: &ConfigFile, base: &Path) -> Result<Self, HarnessError> {
        let field = file.field.build()?;
        let params = ProtocolParams::new(field, file.protocol.rounds, file.protocol.strict)?;
        file.spacetime.validate()?;
        let run = &file.run;
        let bit = match run.bit {
            None => None,
            Some(0) => Some(false),
            Some(1) => Some(true),
            Some(other) => return Err(HarnessError::Config(format!("bit must be 0 or 1, got {other}"))),
        };
        let injection = match (run.inject_round, run.inject_delay_s) {
            (None, None) => None,
            (Some(round), Some(delay_s)) => {
                if round == 0 || round > params.rounds() {
                    return Err(HarnessError::Config(format!("inject_round {round} outside 1..={}", params.rounds())));
                }
                if !(delay_s.is_finite() && delay_s >= 0.0) {
                    return Err(HarnessError::Config("inject_delay_s must be non-negative".into()));
                }
                Some(Injection { round, delay_s })
            }
            _ => return Err(HarnessError::Config("inject_round and inject_delay_s go together".into())),
        };
        if run.trials == 0 {
            return Err(HarnessError::Config("trials must be positive".into()));
        }
        let mode = match run.mode {
            ModeName::Honest => RunMode::Honest,
            ModeName::HidingAudit => RunMode::HidingAudit,
            ModeName::TimingAudit => RunMode::TimingAudit,
            ModeName::Attack => {
                let rel = run
                    .strategy
                    .as_ref()
                    .ok_or_else(|| HarnessError::Config("attack mode needs a strategy file".into()))?;
                let path = base.join(rel);
                let text = std::fs::read_to_string(&path).map_err(|e| HarnessError::Io(format!("{}: {e}", path.display())))?;
                let strategy = StrategyFile::from_json(&text)?.to_strategy()?;
                RunMode::Attack(Arc::new(strategy))
            }
        };
        let cfg = Self { params, spacetime: file.spacetime, seed: run.seed, mode, bit, trials: run.trials, injection };
        cfg.check_strategy()?;
        Ok(cfg)
    }

    fn check_strategy(&self) -> Result<(), HarnessError> {
        if let RunMode::Attack(s) = &self.mode {
            if **s.field_tables().spec() != **self.params.field() {
                return Err(HarnessError::StrategyMismatch(format!(
                    "strategy over {}, protocol over {}",
                    s.field_tables().spec(),
                    self.params.field()
                )));
            }
            if s.rounds() != self.params.rounds() {
                return Err(HarnessError::StrategyMismatch(format!(
                    "strategy has {} rounds, protocol has {}",
                    s.rounds(),
                    self.params.rounds()
                )));
            }
        }
        Ok(())
    }

    pub fn with_mode(mut self, mode: RunMode) -> Result<Self, HarnessError> {
        self.mode = mode;
        self.check_strategy()?;
        Ok(self)
    }
}
