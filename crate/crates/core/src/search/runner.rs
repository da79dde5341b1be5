use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{Budget, DecayOn, GrowthBase, InstantonArray, ProgressLog, SearchConfig, SearchError, Stopwatch};
use crate::channel::{self, NoiseVector};
use crate::code::TannerGraph;
use crate::decoder::MinSumDecoder;

/// Names of the random components, recorded in log headers.
pub(crate) const RNG_DESCRIPTION: &str = "chacha8";
pub(crate) const NORMAL_DESCRIPTION: &str = "ziggurat (rand_distr StandardNormal)";

/// `c = sqrt(1 - a^2 N / w)`, or `None` when `a^2 N >= w`.
pub fn perturb_coefficient(w: f64, a: f64, n: usize) -> Option<f64> {
    let ratio = a * a * n as f64 / w;
    (a > 0.0 && ratio < 1.0).then(|| (1.0 - ratio).sqrt())
}

/// `c xi + a psi` with `psi` standard normal; keeps `E |.|^2 = w(xi)`.
///
/// Returns `None` when the amplitude is too large for `c` to be real.
pub fn perturb(xi: &NoiseVector, a: f64, rng: &mut dyn RngCore) -> Option<NoiseVector> {
    let mut out = vec![0.0; xi.len()];
    perturb_into(xi, xi.weight(), a, rng, &mut out).then_some(NoiseVector::new(out))
}

pub(crate) fn perturb_into<R: Rng + ?Sized>(xi: &[f64], w: f64, a: f64, rng: &mut R, out: &mut [f64]) -> bool {
    let Some(c) = perturb_coefficient(w, a, xi.len()) else {
        return false;
    };
    for (o, x) in out.iter_mut().zip(xi) {
        let psi: f64 = rng.sample(StandardNormal);
        *o = c * x + a * psi;
    }
    true
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SweepStats {
    pub attempts: usize,
    /// Candidates that updated at least one slot.
    pub accepted: usize,
    /// Attempts skipped because `a^2 N >= w`.
    pub infeasible: usize,
    /// Candidates discarded by weight alone, without decoding.
    pub screened: usize,
    pub top_improved: bool,
}

#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub array: InstantonArray,
    pub progress: ProgressLog,
    pub sweeps: u64,
    pub accepted: u64,
    pub seconds: f64,
    pub reached_target: bool,
    pub warnings: Vec<String>,
}

/// One search run: an array, its random stream, and its clock.
///
/// A searcher must be driven from the thread that created it, since the
/// default clock is that thread's CPU time.
pub struct Searcher<'g> {
    graph: &'g TannerGraph,
    config: SearchConfig,
    array: InstantonArray,
    rng: ChaCha8Rng,
    decoder: MinSumDecoder<'g>,
    candidate: Vec<f64>,
    h: Vec<f64>,
    clock: Stopwatch,
    progress: ProgressLog,
    sweeps: u64,
    accepted: u64,
    warnings: Vec<String>,
}

impl<'g> Searcher<'g> {
    /// Starts from the all-ones array.
    pub fn new(graph: &'g TannerGraph, config: SearchConfig) -> Result<Self, SearchError> {
        let array = InstantonArray::new(graph.n_bits(), config.n_max, config.initial_amp);
        Self::with_array(graph, config, array)
    }

    /// Starts from an existing array, e.g. a loaded checkpoint.
    pub fn with_array(graph: &'g TannerGraph, config: SearchConfig, array: InstantonArray) -> Result<Self, SearchError> {
        config.validate()?;
        if array.n_bits() != graph.n_bits() {
            return Err(SearchError::LengthMismatch {
                expected: graph.n_bits(),
                got: array.n_bits(),
            });
        }
        if array.n_max() != config.n_max {
            return Err(SearchError::Config(format!(
                "array has n_max={}, configuration asks for {}",
                array.n_max(),
                config.n_max
            )));
        }
        let n = graph.n_bits();
        let mut progress = ProgressLog::default();
        progress.header = vec![
            ("seed".into(), config.rng_seed.to_string()),
            ("scheme".into(), config.scheme.describe()),
            ("code".into(), config.code_label.clone()),
            ("timer".into(), config.timer.as_str().into()),
            ("n_max".into(), config.n_max.to_string()),
            ("feedback".into(), config.feedback.describe()),
            ("rng".into(), RNG_DESCRIPTION.into()),
            ("normal".into(), NORMAL_DESCRIPTION.into()),
        ];
        let mut searcher = Self {
            graph,
            rng: ChaCha8Rng::seed_from_u64(config.rng_seed),
            clock: Stopwatch::start(config.timer),
            config,
            array,
            decoder: MinSumDecoder::new(graph),
            candidate: vec![0.0; n],
            h: vec![0.0; n],
            progress,
            sweeps: 0,
            accepted: 0,
            warnings: Vec::new(),
        };
        searcher.check_seeds()?;
        let w = searcher.array.top_weight();
        searcher.progress.push(searcher.clock.elapsed(), w);
        Ok(searcher)
    }

    fn check_seeds(&mut self) -> Result<(), SearchError> {
        let seeds = std::mem::take(&mut self.config.seeds);
        for (i, seed) in seeds.iter().enumerate() {
            if seed.len() != self.graph.n_bits() {
                let msg = format!(
                    "seed {i}: length {} does not match the code's {} bits; skipped",
                    seed.len(),
                    self.graph.n_bits()
                );
                log::warn!("{msg}");
                self.warnings.push(msg);
                continue;
            }
            let withstand = self.decoder.withstand_with_buffer(seed, &mut self.h, self.config.n_max)?;
            self.array
                .offer_weighted(seed, seed.weight(), withstand, self.config.initial_amp);
        }
        self.config.seeds = seeds;
        Ok(())
    }

    pub fn array(&self) -> &InstantonArray {
        &self.array
    }

    pub fn progress(&self) -> &ProgressLog {
        &self.progress
    }

    pub fn sweeps(&self) -> u64 {
        self.sweeps
    }

    pub fn elapsed(&self) -> f64 {
        self.clock.elapsed()
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// One pass `k = 0..=n_max` of perturb-and-check.
    pub fn sweep(&mut self) -> Result<SweepStats, SearchError> {
        let mut stats = SweepStats::default();
        let n_max = self.config.n_max;
        let growth = self.config.amp_growth;
        let decay = self.config.amp_decay;

        for k in 0..=n_max {
            stats.attempts += 1;
            let slot = self.array.slot(k);
            let parent_amp = slot.amp;
            let a = self.config.scheme.choose(parent_amp, &mut self.rng);
            let feasible = perturb_into(&slot.xi, slot.w, a, &mut self.rng, &mut self.candidate);

            let mut updated = Vec::new();
            if feasible {
                let w = channel::weight(&self.candidate);
                // The array is non-decreasing, so nothing lighter than the
                // top slot means nothing to improve.
                if w < self.array.top_weight() {
                    let withstand = self
                        .decoder
                        .withstand_with_buffer(&self.candidate, &mut self.h, n_max)?;
                    let base = match self.config.feedback.growth_base {
                        GrowthBase::PreDecay => parent_amp,
                        GrowthBase::PostDecay => parent_amp * decay,
                    };
                    updated = self.array.offer_weighted(&self.candidate, w, withstand, growth * base);
                } else {
                    stats.screened += 1;
                }
            } else {
                stats.infeasible += 1;
            }

            let accepted = !updated.is_empty();
            if accepted {
                stats.accepted += 1;
                if updated.last() == Some(&n_max) {
                    stats.top_improved = true;
                    let t = self.clock.elapsed();
                    self.progress.push(t, self.array.top_weight());
                }
            }
            // A replaced slot k holds the new configuration; the decay belongs
            // to the parent that was evicted.
            let decays = match self.config.feedback.decay_on {
                DecayOn::EveryAttempt => true,
                DecayOn::RejectionOnly => !accepted,
            };
            if decays && !updated.contains(&k) {
                self.array.slot_mut(k).amp *= decay;
            }
        }

        self.sweeps += 1;
        self.accepted += stats.accepted as u64;
        if self.sweeps % self.config.log_every_sweeps == 0 && !stats.top_improved {
            let t = self.clock.elapsed();
            self.progress.push(t, self.array.top_weight());
        }
        Ok(stats)
    }

    pub fn budget_exhausted(&self) -> bool {
        match self.config.budget {
            Budget::Sweeps(n) => self.sweeps >= n,
            Budget::Seconds(s) => self.clock.elapsed() >= s,
        }
    }

    pub fn reached_target(&self) -> bool {
        self.config
            .target_weight
            .is_some_and(|t| self.array.top_weight() <= t)
    }

    /// Sweeps until the budget runs out or the target weight is reached,
    /// calling `after_sweep` after each sweep.
    pub fn run_with(mut self, mut after_sweep: impl FnMut(&Searcher<'g>, &SweepStats)) -> Result<SearchOutcome, SearchError> {
        while !self.budget_exhausted() && !self.reached_target() {
            let stats = self.sweep()?;
            after_sweep(&self, &stats);
        }
        Ok(self.finish())
    }

    pub fn finish(mut self) -> SearchOutcome {
        let seconds = self.clock.elapsed();
        let w = self.array.top_weight();
        if self.progress.records.last().map(|r| r.w) != Some(w) || self.sweeps > 0 {
            self.progress.push(seconds, w);
        }
        SearchOutcome {
            reached_target: self.reached_target(),
            array: self.array,
            progress: self.progress,
            sweeps: self.sweeps,
            accepted: self.accepted,
            seconds,
            warnings: self.warnings,
        }
    }
}

/// Runs a search from the all-ones array until its budget or target.
pub fn run(graph: &TannerGraph, config: SearchConfig) -> Result<SearchOutcome, SearchError> {
    Searcher::new(graph, config)?.run_with(|_, _| {})
}
