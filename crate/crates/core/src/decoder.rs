//! Min-sum iterative decoding with a codeword check at every iteration.
//!
//! Iteration `k` computes the output `m(k) = h + sum of incoming check
//! messages`, stops if `sign m(k)` is a codeword, and otherwise produces the
//! next round of bit-to-check and check-to-bit messages. Nothing is damped,
//! normalized, or saturated, so integer inputs stay integer throughout.

use std::fmt::{self, Write as _};

use num_traits::Signed;

use thiserror::Error;

use crate::channel::{self, NoiseVector};
use crate::code::TannerGraph;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DecodeError {
    #[error("input has length {got}, but the code has {expected} bits")]
    LengthMismatch { expected: usize, got: usize },
}

/// How a decoding run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OutcomeKind {
    /// `sign h` already was the transmitted (all-plus) codeword.
    DecodedAtInput,
    /// The all-plus codeword appeared at iteration `k >= 1`.
    Corrected(usize),
    /// Some other codeword appeared at iteration `k`.
    WrongCodeword(usize),
    /// No codeword within the iteration cap.
    Survived(usize),
}

impl OutcomeKind {
    /// Iteration at which the run stopped.
    pub fn last_iteration(self) -> usize {
        match self {
            OutcomeKind::DecodedAtInput => 0,
            OutcomeKind::Corrected(k) | OutcomeKind::WrongCodeword(k) | OutcomeKind::Survived(k) => k,
        }
    }

    pub fn withstand(self) -> Withstand {
        match self {
            OutcomeKind::DecodedAtInput => Withstand::ImmediateDecode,
            OutcomeKind::Corrected(k) => Withstand::Count(k - 1),
            OutcomeKind::WrongCodeword(_) => Withstand::Infinite,
            OutcomeKind::Survived(n) => Withstand::Count(n),
        }
    }
}

impl fmt::Display for OutcomeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OutcomeKind::DecodedAtInput => write!(f, "decoded-at-input"),
            OutcomeKind::Corrected(k) => write!(f, "corrected k={k}"),
            OutcomeKind::WrongCodeword(k) => write!(f, "wrong-codeword k={k}"),
            OutcomeKind::Survived(n) => write!(f, "survived n_max={n}"),
        }
    }
}

/// Number of iterations a noise configuration withstands.
///
/// Ordered so that a larger value is a more harmful configuration:
/// `ImmediateDecode < Count(0) < Count(1) < ... < Infinite`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Withstand {
    ImmediateDecode,
    Count(usize),
    Infinite,
}

impl Withstand {
    /// Whether the configuration belongs to the error set `E(n)`.
    pub fn withstands(self, n: usize) -> bool {
        match self {
            Withstand::ImmediateDecode => false,
            Withstand::Count(c) => c >= n,
            Withstand::Infinite => true,
        }
    }

    /// Largest iteration count `<= cap` that this value withstands.
    pub fn capped(self, cap: usize) -> Option<usize> {
        match self {
            Withstand::ImmediateDecode => None,
            Withstand::Count(c) => Some(c.min(cap)),
            Withstand::Infinite => Some(cap),
        }
    }
}

impl fmt::Display for Withstand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Withstand::ImmediateDecode => write!(f, "immediate"),
            Withstand::Count(n) => write!(f, "{n}"),
            Withstand::Infinite => write!(f, "inf"),
        }
    }
}

/// Message values the decoder can run on.
///
/// `f64` is the working type. Exact rationals (`num_rational::Rational64`,
/// `BigRational`) follow the same arithmetic without rounding, which matters
/// on orbits where min-sum amplifies any perturbation.
pub trait Message: Signed + Clone + PartialOrd {}

impl<T: Signed + Clone + PartialOrd> Message for T {}

#[derive(Debug, Clone, PartialEq)]
pub struct DecodeOutcome<T = f64> {
    pub kind: OutcomeKind,
    /// `m(0), m(1), ...` up to the stopping iteration, when requested.
    pub trace: Option<Vec<Vec<T>>>,
}

impl<T> DecodeOutcome<T> {
    pub fn withstand(&self) -> Withstand {
        self.kind.withstand()
    }
}

#[inline]
fn sgn<T: Message>(x: &T) -> i8 {
    let zero = T::zero();
    if *x > zero {
        1
    } else if *x < zero {
        -1
    } else {
        0
    }
}

/// Reusable min-sum decoder bound to one graph.
///
/// Holds per-edge message buffers so repeated decodes do not allocate.
pub struct MinSumDecoder<'g, T = f64> {
    graph: &'g TannerGraph,
    // Check-to-bit messages, indexed by edge id.
    mu: Vec<T>,
    // Bit-to-check messages, indexed by edge id.
    eta: Vec<T>,
    m: Vec<T>,
    signs: Vec<i8>,
}

impl<'g, T: Message> MinSumDecoder<'g, T> {
    pub fn new(graph: &'g TannerGraph) -> Self {
        Self {
            graph,
            mu: vec![T::zero(); graph.n_edges()],
            eta: vec![T::zero(); graph.n_edges()],
            m: vec![T::zero(); graph.n_bits()],
            signs: vec![0; graph.n_bits()],
        }
    }

    pub fn graph(&self) -> &'g TannerGraph {
        self.graph
    }

    pub fn decode(&mut self, h: &[T], n_max: usize, capture_trace: bool) -> Result<DecodeOutcome<T>, DecodeError> {
        let g = self.graph;
        if h.len() != g.n_bits() {
            return Err(DecodeError::LengthMismatch {
                expected: g.n_bits(),
                got: h.len(),
            });
        }
        self.mu.fill(T::zero());
        let mut trace = capture_trace.then(Vec::new);

        let mut k = 0;
        loop {
            self.compute_output(h);
            if let Some(t) = trace.as_mut() {
                t.push(self.m.clone());
            }
            if let Some(kind) = self.classify(k) {
                return Ok(DecodeOutcome { kind, trace });
            }
            if k == n_max {
                return Ok(DecodeOutcome {
                    kind: OutcomeKind::Survived(n_max),
                    trace,
                });
            }
            self.bit_update(h);
            self.check_update();
            k += 1;
        }
    }

    fn compute_output(&mut self, h: &[T]) {
        let g = self.graph;
        for (i, (m, hi)) in self.m.iter_mut().zip(h).enumerate() {
            let mut acc = hi.clone();
            for &e in g.bit_edges(i) {
                acc = acc + self.mu[e].clone();
            }
            *m = acc;
        }
    }

    fn classify(&mut self, k: usize) -> Option<OutcomeKind> {
        let mut all_plus = true;
        for (s, m) in self.signs.iter_mut().zip(&self.m) {
            *s = sgn(m);
            if *s == 0 {
                return None;
            }
            all_plus &= *s > 0;
        }
        if all_plus {
            return Some(if k == 0 {
                OutcomeKind::DecodedAtInput
            } else {
                OutcomeKind::Corrected(k)
            });
        }
        let g = self.graph;
        let satisfied = (0..g.n_checks()).all(|a| {
            g.check_edges(a)
                .filter(|&e| self.signs[g.edge_bit(e)] < 0)
                .count()
                % 2
                == 0
        });
        satisfied.then_some(OutcomeKind::WrongCodeword(k))
    }

    /// `eta(i -> a) = h_i + sum over b != a of mu(b -> i)`, summed in adjacency order.
    fn bit_update(&mut self, h: &[T]) {
        let g = self.graph;
        for (i, hi) in h.iter().enumerate() {
            let edges = g.bit_edges(i);
            for &e in edges {
                let mut acc = hi.clone();
                for &f in edges {
                    if f != e {
                        acc = acc + self.mu[f].clone();
                    }
                }
                self.eta[e] = acc;
            }
        }
    }

    /// `mu(a -> i) = min over j != i of |eta(j -> a)| * product of sgn eta(j -> a)`,
    /// using the two smallest magnitudes. `sgn 0 = 0`.
    fn check_update(&mut self) {
        let g = self.graph;
        for a in 0..g.n_checks() {
            let edges = g.check_edges(a);
            // Every check has degree >= 2, so both minima get set.
            let mut min1: Option<T> = None;
            let mut min2: Option<T> = None;
            let mut min1_edge = usize::MAX;
            let mut sign_prod: i8 = 1;
            let mut zeros = 0usize;
            let mut zero_edge = usize::MAX;
            for e in edges.clone() {
                let v = &self.eta[e];
                let s = sgn(v);
                if s == 0 {
                    zeros += 1;
                    zero_edge = e;
                } else {
                    sign_prod *= s;
                }
                let mag = v.abs();
                if min1.as_ref().is_none_or(|m| mag < *m) {
                    min2 = min1.take();
                    min1 = Some(mag);
                    min1_edge = e;
                } else if min2.as_ref().is_none_or(|m| mag < *m) {
                    min2 = Some(mag);
                }
            }
            let (min1, min2) = (min1.unwrap_or_else(T::zero), min2.unwrap_or_else(T::zero));
            for e in edges {
                let mag = if e == min1_edge { &min2 } else { &min1 };
                let sign = match zeros {
                    0 => sign_prod * sgn(&self.eta[e]),
                    // Only the zero edge itself sees all-nonzero inputs.
                    1 if e == zero_edge => sign_prod,
                    _ => 0,
                };
                self.mu[e] = match sign {
                    1 => mag.clone(),
                    -1 => -mag.clone(),
                    _ => T::zero(),
                };
            }
        }
    }
}

/// One-shot min-sum decode of input `h` with at most `n_max` iterations.
pub fn decode<T: Message>(graph: &TannerGraph, h: &[T], n_max: usize, capture_trace: bool) -> Result<DecodeOutcome<T>, DecodeError> {
    MinSumDecoder::new(graph).decode(h, n_max, capture_trace)
}

/// Iterations withstood by noise `xi` under a cap of `n_max`.
pub fn withstand_count(graph: &TannerGraph, xi: &[f64], n_max: usize) -> Result<Withstand, DecodeError> {
    Ok(decode(graph, &channel::llr_from_noise(xi), n_max, false)?.withstand())
}

impl MinSumDecoder<'_, f64> {
    /// Like [`withstand_count`], reusing this decoder's buffers.
    pub fn withstand(&mut self, xi: &NoiseVector, n_max: usize) -> Result<Withstand, DecodeError> {
        let h = xi.llr();
        Ok(self.decode(&h, n_max, false)?.withstand())
    }

    pub(crate) fn withstand_with_buffer(&mut self, xi: &[f64], h: &mut [f64], n_max: usize) -> Result<Withstand, DecodeError> {
        channel::llr_into(xi, h);
        Ok(self.decode(h, n_max, false)?.withstand())
    }
}

/// CSV with header `k,m_1,...,m_N`, one row per iteration, shortest round-trip reals.
pub fn trace_csv(trace: &[Vec<f64>]) -> String {
    let n = trace.first().map_or(0, Vec::len);
    let mut out = String::from("k");
    for i in 1..=n {
        write!(out, ",m_{i}").unwrap();
    }
    out.push('\n');
    for (k, row) in trace.iter().enumerate() {
        write!(out, "{k}").unwrap();
        for v in row {
            write!(out, ",{v:?}").unwrap();
        }
        out.push('\n');
    }
    out
}
