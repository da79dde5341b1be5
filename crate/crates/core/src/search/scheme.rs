//! Perturbation-amplitude schemes.
//!
//! Each scheme turns the feedback number `A` attached to an array slot into
//! the amplitude `a` of one perturbation. Schemes are trait objects looked up
//! by name in a [`SchemeRegistry`], so the CLI and checkpoints refer to them
//! as plain strings.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rand::{Rng, RngCore};

pub trait AmplitudeScheme: Send + Sync {
    /// Registry key, e.g. `"A"`.
    fn name(&self) -> &str;

    /// One-line description for logs and manifests.
    fn describe(&self) -> String;

    fn choose(&self, attached: f64, rng: &mut dyn RngCore) -> f64;
}

impl fmt::Debug for dyn AmplitudeScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.describe())
    }
}

fn log_uniform(lo: f64, hi: f64, rng: &mut dyn RngCore) -> f64 {
    rng.random_range(lo.ln()..hi.ln()).exp()
}

/// `a = A`.
#[derive(Debug, Clone, Default)]
pub struct Attached;

impl AmplitudeScheme for Attached {
    fn name(&self) -> &str {
        "A"
    }

    fn describe(&self) -> String {
        "A: a = A".into()
    }

    fn choose(&self, attached: f64, _rng: &mut dyn RngCore) -> f64 {
        attached
    }
}

/// `log a` uniform on `(log lower*A, log upper*A)`.
#[derive(Debug, Clone)]
pub struct Damped {
    pub lower: f64,
    pub upper: f64,
}

impl Default for Damped {
    fn default() -> Self {
        Self { lower: 0.1, upper: 1.0 }
    }
}

impl AmplitudeScheme for Damped {
    fn name(&self) -> &str {
        "D"
    }

    fn describe(&self) -> String {
        format!("D: log-uniform a in ({}A, {}A)", self.lower, self.upper)
    }

    fn choose(&self, attached: f64, rng: &mut dyn RngCore) -> f64 {
        log_uniform(self.lower * attached, self.upper * attached, rng)
    }
}

/// `log a` uniform on fixed absolute bounds, ignoring `A`.
#[derive(Debug, Clone)]
pub struct Wide {
    pub lower: f64,
    pub upper: f64,
}

impl Default for Wide {
    fn default() -> Self {
        Self { lower: 1e-14, upper: 0.1 }
    }
}

impl AmplitudeScheme for Wide {
    fn name(&self) -> &str {
        "W"
    }

    fn describe(&self) -> String {
        format!("W: log-uniform a in ({:e}, {})", self.lower, self.upper)
    }

    fn choose(&self, _attached: f64, rng: &mut dyn RngCore) -> f64 {
        log_uniform(self.lower, self.upper, rng)
    }
}

/// Name-indexed collection of amplitude schemes.
#[derive(Clone, Default)]
pub struct SchemeRegistry {
    schemes: BTreeMap<String, Arc<dyn AmplitudeScheme>>,
}

impl SchemeRegistry {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Registry holding `A`, `D`, and `W` with their default bounds.
    pub fn with_defaults() -> Self {
        let mut r = Self::empty();
        r.register(Arc::new(Attached));
        r.register(Arc::new(Damped::default()));
        r.register(Arc::new(Wide::default()));
        r
    }

    /// Adds a scheme, replacing any previous one with the same name.
    pub fn register(&mut self, scheme: Arc<dyn AmplitudeScheme>) {
        self.schemes.insert(scheme.name().to_string(), scheme);
    }

    pub fn get(&self, name: &str) -> Option<Arc<dyn AmplitudeScheme>> {
        self.schemes.get(name).cloned()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.schemes.keys().map(String::as_str)
    }
}

/// Looks up a default scheme by name.
pub fn scheme_by_name(name: &str) -> Option<Arc<dyn AmplitudeScheme>> {
    SchemeRegistry::with_defaults().get(name)
}

pub fn choose_amplitude(scheme: &dyn AmplitudeScheme, attached: f64, rng: &mut dyn RngCore) -> f64 {
    scheme.choose(attached, rng)
}
