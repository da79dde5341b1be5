//! Noise configurations for the AWGN channel.
//!
//! Noise is measured relative to the all-plus codeword, `xi_i = 1 - x_i`, so
//! `xi = 0` is a clean channel and `xi_i = 1` leaves bit `i` undecided. The
//! channel enters in exactly two places, [`weight`] and [`llr_from_noise`];
//! both use the Gaussian weight `F(xi) = xi^2`. The SNR-dependent scale of the
//! log-likelihoods is dropped since min-sum decoding is invariant under
//! positive scaling of its input.

use std::fmt::Write as _;
use std::ops::{Deref, DerefMut};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NoiseParseError {
    #[error("line {line}: not a number: {text:?}")]
    NotANumber { line: usize, text: String },
    #[error("noise file contains no values")]
    Empty,
}

/// A real noise vector; components are never clamped.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct NoiseVector(pub Vec<f64>);

impl NoiseVector {
    pub fn new(components: Vec<f64>) -> Self {
        Self(components)
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![0.0; n])
    }

    /// The fully undecided configuration, `h = 0`.
    pub fn ones(n: usize) -> Self {
        Self(vec![1.0; n])
    }

    pub fn weight(&self) -> f64 {
        weight(&self.0)
    }

    pub fn llr(&self) -> Vec<f64> {
        llr_from_noise(&self.0)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self(self.0.iter().map(|x| x * factor).collect())
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for NoiseVector {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl DerefMut for NoiseVector {
    fn deref_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }
}

impl From<Vec<f64>> for NoiseVector {
    fn from(v: Vec<f64>) -> Self {
        Self(v)
    }
}

/// Effective weight `sum xi_i^2`.
#[inline]
pub fn weight(xi: &[f64]) -> f64 {
    xi.iter().map(|x| x * x).sum()
}

/// Decoder input `h_i = 1 - xi_i`.
pub fn llr_from_noise(xi: &[f64]) -> Vec<f64> {
    xi.iter().map(|x| 1.0 - x).collect()
}

#[inline]
pub(crate) fn llr_into(xi: &[f64], h: &mut [f64]) {
    for (h, x) in h.iter_mut().zip(xi) {
        *h = 1.0 - x;
    }
}

/// Parses one real per line. Blank lines and `#` comments are skipped.
pub fn load_noise(text: &str) -> Result<NoiseVector, NoiseParseError> {
    let mut values = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let v = t.parse::<f64>().map_err(|_| NoiseParseError::NotANumber {
            line: i + 1,
            text: t.to_string(),
        })?;
        values.push(v);
    }
    if values.is_empty() {
        return Err(NoiseParseError::Empty);
    }
    Ok(NoiseVector(values))
}

/// One value per line in shortest round-trip decimal form.
pub fn save_noise(xi: &[f64]) -> String {
    let mut out = String::with_capacity(xi.len() * 20);
    for x in xi {
        writeln!(out, "{x:?}").unwrap();
    }
    out
}
