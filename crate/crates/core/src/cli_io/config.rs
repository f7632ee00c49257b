use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::protocol::{ParticipantProfile, SessionConfig, SimulatedParticipant};
use crate::psychophysics::{Modality, ObserverModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Simulate,
    Analyze,
    ReproducePaper,
    Montecarlo,
    Validate,
}

impl Mode {
    pub const ALL: [Mode; 5] = [Mode::Simulate, Mode::Analyze, Mode::ReproducePaper, Mode::Montecarlo, Mode::Validate];

    pub fn label(self) -> &'static str {
        match self {
            Mode::Simulate => "simulate",
            Mode::Analyze => "analyze",
            Mode::ReproducePaper => "reproduce-paper",
            Mode::Montecarlo => "montecarlo",
            Mode::Validate => "validate",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Mode::ALL.into_iter().find(|m| m.label() == s).ok_or_else(|| Error::Config(format!("unknown mode `{s}`")))
    }
}

/// Staircase validation settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MonteCarloConfig {
    pub modalities: Vec<Modality>,
    /// Multipliers applied to the observer's sigma and criterion; one
    /// parameter point per entry.
    pub sensitivity_scales: Vec<f64>,
    pub observer: ObserverModel,
    pub profile: ParticipantProfile,
    /// Allowed relative gap between the median JND and the analytic point.
    pub tolerance: f64,
}

impl Default for MonteCarloConfig {
    fn default() -> Self {
        Self {
            modalities: vec![Modality::Position, Modality::Velocity, Modality::Torque],
            sensitivity_scales: vec![1.0],
            observer: ObserverModel::default(),
            profile: ParticipantProfile::default(),
            tolerance: 0.15,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct ReproduceConfig {
    /// Negative control: shuffle this participant-table column before checking.
    pub shuffle_column: Option<String>,
}

/// Everything a run needs. Loaded from TOML; every key is optional.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub mode: Mode,
    pub seed: u64,
    /// Monte Carlo runs per parameter point.
    pub runs: usize,
    /// Size of the generated cohort when `cohort` is empty.
    pub participants: usize,
    /// Participant table for analyze, validate and reproduce-paper. The
    /// bundled table is used when absent.
    pub input: Option<PathBuf>,
    pub out: PathBuf,
    pub session: SessionConfig,
    pub montecarlo: MonteCarloConfig,
    pub reproduce: ReproduceConfig,
    /// Explicit simulated participants; overrides `participants`.
    pub cohort: Vec<SimulatedParticipant>,
    /// Resamples for the normality screen in analyze.
    pub normality_resamples: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            mode: Mode::ReproducePaper,
            seed: 1,
            runs: 500,
            participants: 11,
            input: None,
            out: PathBuf::from("out"),
            session: SessionConfig::default(),
            montecarlo: MonteCarloConfig::default(),
            reproduce: ReproduceConfig::default(),
            cohort: Vec::new(),
            normality_resamples: 10_000,
        }
    }
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| {
            let line = e.span().map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1).unwrap_or(0);
            Error::Parse { line, message: e.message().to_string() }
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        self.session.validate()?;
        self.montecarlo.observer.validate()?;
        for p in &self.cohort {
            p.observer.validate()?;
        }
        if self.runs == 0 {
            return Err(Error::Config("runs must be at least 1".into()));
        }
        if self.montecarlo.sensitivity_scales.iter().any(|s| !(*s > 0.0)) {
            return Err(Error::Config("sensitivity_scales must be positive".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_dotted_keys() {
        let cfg = RunConfig::from_toml_str(
            "mode = \"montecarlo\"\nseed = 9\nsession.plant.dt_s = 0.002\nmontecarlo.observer.velocity.sigma = 4.0\nmontecarlo.observer.velocity.criterion = 5.0\nmontecarlo.modalities = [\"Velocity\"]\n",
        )
        .unwrap();
        assert_eq!(cfg.mode, Mode::Montecarlo);
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.session.plant.dt_s, 0.002);
        assert_eq!(cfg.montecarlo.observer.velocity.sigma, 4.0);
        assert_eq!(cfg.montecarlo.observer.velocity.criterion, 5.0);
        assert_eq!(cfg.montecarlo.observer.position, ObserverModel::default().position);
        assert_eq!(cfg.montecarlo.modalities, vec![Modality::Velocity]);
    }

    #[test]
    fn default_round_trips() {
        let cfg = RunConfig::default();
        let text = cfg.to_toml_string().unwrap();
        assert_eq!(RunConfig::from_toml_str(&text).unwrap(), cfg);
    }

    #[test]
    fn errors_carry_line() {
        let err = RunConfig::from_toml_str("seed = 1\n\nbogus_key = 3\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
        let err = RunConfig::from_toml_str("seed = \"x\"\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }), "{err}");
        assert!(RunConfig::from_toml_str("runs = 0\n").is_err());
        assert!("nonsense".parse::<Mode>().is_err());
        assert_eq!("reproduce-paper".parse::<Mode>().unwrap(), Mode::ReproducePaper);
    }
}
