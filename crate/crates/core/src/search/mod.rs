//! Instanton-array search.
//!
//! The search keeps an [`InstantonArray`] and sweeps over it repeatedly: each
//! slot's configuration is perturbed with a weight-preserving Gaussian step,
//! the result is classified by the decoder, and offered back to the array.
//! Perturbation amplitudes follow a negative feedback rule: a successful
//! step attaches a larger amplitude to the new configuration, and every
//! attempt shrinks the amplitude attached to its parent.

mod array;
mod progress;
mod runner;
mod scheme;
mod timer;

use std::sync::Arc;

use thiserror::Error;

pub use array::{load_checkpoint, ArraySlot, InstantonArray, LoadedCheckpoint};
pub use progress::{aggregate_progress, cdf_csv, weight_grid, CdfRow, ProgressLog, ProgressRecord};
pub use runner::{perturb, perturb_coefficient, run, SearchOutcome, Searcher, SweepStats};
pub use scheme::{choose_amplitude, scheme_by_name, AmplitudeScheme, Attached, Damped, SchemeRegistry, Wide};
pub use timer::{Stopwatch, TimerKind};

use crate::channel::NoiseVector;
use crate::decoder::DecodeError;

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("noise vector has length {got}, but the code has {expected} bits")]
    LengthMismatch { expected: usize, got: usize },
    #[error("checkpoint line {line}: {message}")]
    Checkpoint { line: usize, message: String },
    #[error("progress log line {line}: {message}")]
    Progress { line: usize, message: String },
    #[error("invalid search configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Decode(#[from] DecodeError),
}

/// When an attempt from slot `k` shrinks the number attached to slot `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecayOn {
    EveryAttempt,
    RejectionOnly,
}

/// Which parent value the growth factor multiplies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GrowthBase {
    PreDecay,
    PostDecay,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FeedbackRule {
    pub decay_on: DecayOn,
    pub growth_base: GrowthBase,
}

impl Default for FeedbackRule {
    fn default() -> Self {
        Self {
            decay_on: DecayOn::EveryAttempt,
            growth_base: GrowthBase::PreDecay,
        }
    }
}

impl FeedbackRule {
    pub fn describe(&self) -> String {
        let decay = match self.decay_on {
            DecayOn::EveryAttempt => "every-attempt",
            DecayOn::RejectionOnly => "rejection-only",
        };
        let base = match self.growth_base {
            GrowthBase::PreDecay => "pre-decay",
            GrowthBase::PostDecay => "post-decay",
        };
        format!("decay={decay} growth-base={base}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Budget {
    Sweeps(u64),
    /// Seconds on the configured timer.
    Seconds(f64),
}

#[derive(Debug, Clone)]
pub struct SearchConfig {
    pub scheme: Arc<dyn AmplitudeScheme>,
    pub n_max: usize,
    pub budget: Budget,
    pub rng_seed: u64,
    pub initial_amp: f64,
    pub amp_growth: f64,
    pub amp_decay: f64,
    pub feedback: FeedbackRule,
    /// Configurations checked before the first sweep.
    pub seeds: Vec<NoiseVector>,
    /// Stop as soon as `w(slot n_max)` is at or below this weight.
    pub target_weight: Option<f64>,
    pub timer: TimerKind,
    /// Progress is also recorded every this many sweeps.
    pub log_every_sweeps: u64,
    /// Free-form code identity copied into progress-log headers.
    pub code_label: String,
}

impl SearchConfig {
    pub fn new(scheme: Arc<dyn AmplitudeScheme>, n_max: usize, budget: Budget, rng_seed: u64) -> Self {
        Self {
            scheme,
            n_max,
            budget,
            rng_seed,
            initial_amp: 0.1,
            amp_growth: 2.0,
            amp_decay: 0.999,
            feedback: FeedbackRule::default(),
            seeds: Vec::new(),
            target_weight: None,
            timer: TimerKind::preferred(),
            log_every_sweeps: 100,
            code_label: String::new(),
        }
    }

    pub fn validate(&self) -> Result<(), SearchError> {
        let positive = |x: f64| x > 0.0 && x.is_finite();
        if !positive(self.initial_amp) {
            return Err(SearchError::Config(format!("initial amplitude {} must be positive", self.initial_amp)));
        }
        if !(positive(self.amp_decay) && self.amp_decay < 1.0) {
            return Err(SearchError::Config(format!("amplitude decay {} must lie in (0, 1)", self.amp_decay)));
        }
        if !(self.amp_growth > 1.0 && self.amp_growth.is_finite()) {
            return Err(SearchError::Config(format!("amplitude growth {} must exceed 1", self.amp_growth)));
        }
        if let Budget::Seconds(s) = self.budget {
            if !(s >= 0.0) {
                return Err(SearchError::Config(format!("time budget {s} must be non-negative")));
            }
        }
        if self.log_every_sweeps == 0 {
            return Err(SearchError::Config("log interval must be at least one sweep".into()));
        }
        Ok(())
    }
}
