//! The instanton array: for each `k = 0..=n_max`, the lowest-weight noise
//! configuration seen so far that withstands `k` iterations.

use std::fmt::Write as _;

use log::warn;

use super::SearchError;
use crate::channel::{self, NoiseVector};
use crate::code::TannerGraph;
use crate::decoder::{MinSumDecoder, Withstand};

#[derive(Debug, Clone, PartialEq)]
pub struct ArraySlot {
    pub xi: NoiseVector,
    /// Cached `weight(xi)`.
    pub w: f64,
    /// Feedback number `A` attached to `xi`.
    pub amp: f64,
}

impl ArraySlot {
    pub fn new(xi: NoiseVector, amp: f64) -> Self {
        let w = xi.weight();
        Self { xi, w, amp }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InstantonArray {
    n_bits: usize,
    slots: Vec<ArraySlot>,
}

impl InstantonArray {
    /// Every slot starts at the all-ones vector (`h = 0`), which withstands
    /// any number of iterations.
    pub fn new(n_bits: usize, n_max: usize, initial_amp: f64) -> Self {
        let slot = ArraySlot::new(NoiseVector::ones(n_bits), initial_amp);
        Self {
            n_bits,
            slots: vec![slot; n_max + 1],
        }
    }

    pub fn n_bits(&self) -> usize {
        self.n_bits
    }

    pub fn n_max(&self) -> usize {
        self.slots.len() - 1
    }

    pub fn slots(&self) -> &[ArraySlot] {
        &self.slots
    }

    pub fn slot(&self, k: usize) -> &ArraySlot {
        &self.slots[k]
    }

    pub(crate) fn slot_mut(&mut self, k: usize) -> &mut ArraySlot {
        &mut self.slots[k]
    }

    pub fn weights(&self) -> Vec<f64> {
        self.slots.iter().map(|s| s.w).collect()
    }

    /// Weight of the last slot, the quantity tracked in progress logs.
    pub fn top_weight(&self) -> f64 {
        self.slots[self.n_max()].w
    }

    /// Offers `xi` to every slot it is eligible for.
    ///
    /// A configuration withstanding `m` iterations also withstands every
    /// `k <= m`, so it replaces each such slot it strictly beats in weight.
    /// Replaced slots get `amp` attached. Returns the updated indices.
    pub fn offer(&mut self, xi: &NoiseVector, withstand: Withstand, amp: f64) -> Result<Vec<usize>, SearchError> {
        if xi.len() != self.n_bits {
            return Err(SearchError::LengthMismatch {
                expected: self.n_bits,
                got: xi.len(),
            });
        }
        Ok(self.offer_weighted(xi, xi.weight(), withstand, amp))
    }

    pub(crate) fn offer_weighted(&mut self, xi: &[f64], w: f64, withstand: Withstand, amp: f64) -> Vec<usize> {
        let Some(m) = withstand.capped(self.n_max()) else {
            return Vec::new();
        };
        let mut updated = Vec::new();
        for (k, slot) in self.slots[..=m].iter_mut().enumerate() {
            if w < slot.w {
                slot.xi.copy_from_slice(xi);
                slot.w = w;
                slot.amp = amp;
                updated.push(k);
            }
        }
        updated
    }

    /// Text form: a header line, then per slot `k w amp` and a line of the
    /// vector's components.
    pub fn save_checkpoint(&self) -> String {
        let mut out = String::new();
        writeln!(out, "instanton-array N={} n_max={}", self.n_bits, self.n_max()).unwrap();
        for (k, s) in self.slots.iter().enumerate() {
            writeln!(out, "{k} {:?} {:?}", s.w, s.amp).unwrap();
            let comps: Vec<String> = s.xi.iter().map(|x| format!("{x:?}")).collect();
            writeln!(out, "{}", comps.join(" ")).unwrap();
        }
        out
    }
}

/// Result of reading a checkpoint against a graph.
#[derive(Debug, Clone)]
pub struct LoadedCheckpoint {
    pub array: InstantonArray,
    /// Slots that had to be demoted or re-weighted.
    pub warnings: Vec<String>,
}

fn parse_header(line: &str) -> Option<(usize, usize)> {
    let rest = line.trim().strip_prefix("instanton-array")?;
    let mut n = None;
    let mut n_max = None;
    for field in rest.split_whitespace() {
        if let Some(v) = field.strip_prefix("N=") {
            n = v.parse().ok();
        } else if let Some(v) = field.strip_prefix("n_max=") {
            n_max = v.parse().ok();
        } else {
            return None;
        }
    }
    Some((n?, n_max?))
}

/// Reads a checkpoint and re-validates it under `graph`.
///
/// With `n_max = None` the file's own `n_max` is kept; a larger value seeds
/// the prefix from the file and initializes the rest to all-ones. Each stored
/// vector is re-classified: one that still withstands its index is restored
/// in place, one that does not is offered only where it qualifies.
pub fn load_checkpoint(
    text: &str,
    graph: &TannerGraph,
    n_max: Option<usize>,
    initial_amp: f64,
) -> Result<LoadedCheckpoint, SearchError> {
    let bad = |line: usize, message: String| SearchError::Checkpoint { line, message };
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));

    let (_, header) = lines.next().ok_or_else(|| bad(1, "empty checkpoint".into()))?;
    let (n_bits, file_n_max) =
        parse_header(header).ok_or_else(|| bad(1, format!("malformed header {header:?}")))?;
    if n_bits != graph.n_bits() {
        return Err(bad(
            1,
            format!("header N={n_bits} does not match the code's {} bits", graph.n_bits()),
        ));
    }

    let mut stored = Vec::with_capacity(file_n_max + 1);
    for expect_k in 0..=file_n_max {
        let (ln, meta) = lines
            .next()
            .ok_or_else(|| bad(0, format!("missing slot {expect_k}")))?;
        let fields: Vec<&str> = meta.split_whitespace().collect();
        let parsed = match fields.as_slice() {
            [k, w, amp] => k
                .parse::<usize>()
                .ok()
                .zip(w.parse::<f64>().ok())
                .zip(amp.parse::<f64>().ok())
                .map(|((k, w), amp)| (k, w, amp)),
            _ => None,
        };
        let (k, w, amp) = parsed.ok_or_else(|| bad(ln, format!("corrupted slot line {meta:?}")))?;
        if k != expect_k {
            return Err(bad(ln, format!("expected slot {expect_k}, found {k}")));
        }
        if !(amp > 0.0 && amp.is_finite()) {
            return Err(bad(ln, format!("slot {k} amplitude {amp} is not positive")));
        }
        let (vln, vec_line) = lines
            .next()
            .ok_or_else(|| bad(ln + 1, format!("missing vector for slot {k}")))?;
        let xi: Vec<f64> = vec_line
            .split_whitespace()
            .map(str::parse::<f64>)
            .collect::<Result<_, _>>()
            .map_err(|_| bad(vln, format!("corrupted vector for slot {k}")))?;
        if xi.len() != n_bits {
            return Err(bad(vln, format!("slot {k} vector has {} values, expected {n_bits}", xi.len())));
        }
        stored.push((w, amp, NoiseVector::new(xi), vln));
    }
    if let Some((ln, extra)) = lines.find(|(_, l)| !l.trim().is_empty()) {
        return Err(bad(ln, format!("unexpected trailing data {extra:?}")));
    }

    let n_max = n_max.unwrap_or(file_n_max);
    let mut array = InstantonArray::new(n_bits, n_max, initial_amp);
    let mut decoder = MinSumDecoder::new(graph);
    let mut h = vec![0.0; n_bits];
    let mut warnings = Vec::new();
    let mut classified = Vec::with_capacity(stored.len());

    for (k, (w_stored, amp, xi, _)) in stored.into_iter().enumerate() {
        let w = channel::weight(&xi);
        if (w - w_stored).abs() > 1e-9 * w.abs().max(1.0) {
            warnings.push(format!("slot {k}: stored weight {w_stored} differs from recomputed {w}; using recomputed"));
        }
        let withstand = decoder.withstand_with_buffer(&xi, &mut h, n_max)?;
        let reach = withstand.capped(n_max);
        if k <= n_max {
            if reach.is_some_and(|m| m >= k) {
                *array.slot_mut(k) = ArraySlot { xi: xi.clone(), w, amp };
            } else {
                let at = reach.map_or("nowhere (decodes immediately)".to_string(), |m| format!("at index <= {m}"));
                warnings.push(format!("slot {k}: vector withstands only {withstand} iterations; offered {at}"));
            }
        }
        classified.push((xi, w, amp, withstand));
    }
    for (xi, w, amp, withstand) in &classified {
        array.offer_weighted(xi, *w, *withstand, *amp);
    }
    for msg in &warnings {
        warn!("{msg}");
    }
    Ok(LoadedCheckpoint { array, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::build_toy;

    fn toy_instanton() -> NoiseVector {
        NoiseVector::new([10.0, 6.0, 4.0, 4.0].iter().map(|x| x / 7.0).collect())
    }

    #[test]
    fn init_shapes() {
        let a = InstantonArray::new(4, 5, 0.1);
        assert_eq!(a.slots().len(), 6);
        assert!(a.slots().iter().all(|s| s.w == 4.0 && s.amp == 0.1));
        assert_eq!(InstantonArray::new(155, 100, 0.1).slots().len(), 101);
        assert!(InstantonArray::new(155, 100, 0.1).slots().iter().all(|s| s.w == 155.0));
        assert_eq!(InstantonArray::new(4, 0, 0.1).slots().len(), 1);
    }

    #[test]
    fn offer_instanton_fills_everything() {
        let mut a = InstantonArray::new(4, 5, 0.1);
        let updated = a.offer(&toy_instanton(), Withstand::Infinite, 0.2).unwrap();
        assert_eq!(updated, vec![0, 1, 2, 3, 4, 5]);
        assert!(a.slots().iter().all(|s| (s.w - 24.0 / 7.0).abs() < 1e-12 && s.amp == 0.2));
    }

    #[test]
    fn offer_rejections() {
        let mut a = InstantonArray::new(4, 5, 0.1);
        a.offer(&NoiseVector::new(vec![0.5; 4]), Withstand::Count(3), 0.1).unwrap();
        let heavier = NoiseVector::new(vec![0.6; 4]);
        assert!(a.offer(&heavier, Withstand::Count(3), 0.1).unwrap().is_empty());
        // Equal weight is not an improvement.
        assert!(a.offer(&NoiseVector::new(vec![0.5; 4]), Withstand::Count(3), 0.1).unwrap().is_empty());
        assert!(a.offer(&NoiseVector::zeros(4), Withstand::ImmediateDecode, 0.1).unwrap().is_empty());
        assert!(matches!(
            a.offer(&NoiseVector::zeros(3), Withstand::Count(1), 0.1),
            Err(SearchError::LengthMismatch { expected: 4, got: 3 })
        ));
    }

    #[test]
    fn offer_only_reaches_its_count() {
        let mut a = InstantonArray::new(4, 5, 0.1);
        let updated = a.offer(&NoiseVector::new(vec![0.5; 4]), Withstand::Count(2), 0.3).unwrap();
        assert_eq!(updated, vec![0, 1, 2]);
        assert_eq!(a.slot(3).w, 4.0);
        let updated = a.offer(&NoiseVector::new(vec![0.7; 4]), Withstand::Count(40), 0.3).unwrap();
        assert_eq!(updated, vec![3, 4, 5]);
    }

    #[test]
    fn checkpoint_round_trip() {
        let g = build_toy();
        let mut a = InstantonArray::new(4, 6, 0.1);
        a.offer(&toy_instanton(), Withstand::Infinite, 0.2).unwrap();
        a.slot_mut(6).amp = 0.1 * 0.999f64.powi(17);
        let text = a.save_checkpoint();
        assert!(text.starts_with("instanton-array N=4 n_max=6\n"));
        let loaded = load_checkpoint(&text, &g, None, 0.1).unwrap();
        assert!(loaded.warnings.is_empty());
        assert_eq!(loaded.array, a);
        assert_eq!(loaded.array.save_checkpoint(), text);
    }

    #[test]
    fn checkpoint_extends_to_larger_cap() {
        let g = build_toy();
        let mut a = InstantonArray::new(4, 3, 0.1);
        // Withstands exactly one iteration on the toy code.
        let weak = NoiseVector::new(vec![1.2, 0.1, 0.1, 0.1]);
        let ws = crate::decoder::withstand_count(&g, &weak, 10).unwrap();
        a.offer(&weak, ws, 0.4).unwrap();
        let loaded = load_checkpoint(&a.save_checkpoint(), &g, Some(8), 0.1).unwrap();
        assert_eq!(loaded.array.n_max(), 8);
        for k in 0..=8 {
            let s = loaded.array.slot(k);
            if ws.withstands(k) {
                assert_eq!(s.xi, weak);
            } else if k > 3 {
                assert_eq!(s.w, 4.0);
            }
        }
        assert_eq!(loaded.array.slot(8).xi, NoiseVector::ones(4));
    }

    #[test]
    fn checkpoint_demotes_invalid_slots() {
        let g = build_toy();
        let weak = NoiseVector::new(vec![1.2, 0.1, 0.1, 0.1]);
        let ws = crate::decoder::withstand_count(&g, &weak, 100).unwrap();
        let Withstand::Count(m) = ws else { panic!("{ws:?}") };
        assert!(m < 5);
        // Hand-build a checkpoint claiming `weak` at slot 5.
        let mut a = InstantonArray::new(4, 5, 0.1);
        *a.slot_mut(5) = ArraySlot::new(weak.clone(), 0.3);
        let loaded = load_checkpoint(&a.save_checkpoint(), &g, None, 0.1).unwrap();
        assert_eq!(loaded.warnings.len(), 1);
        assert!(loaded.warnings[0].contains("slot 5"));
        assert_eq!(loaded.array.slot(5).w, 4.0);
        assert_eq!(loaded.array.slot(m).xi, weak);
        let w = loaded.array.weights();
        assert!(w.windows(2).all(|p| p[0] <= p[1]));
    }

    #[test]
    fn checkpoint_errors() {
        let g = build_toy();
        let text = InstantonArray::new(4, 2, 0.1).save_checkpoint();
        let other = crate::code::build_tanner_155();
        assert!(matches!(load_checkpoint(&text, &other, None, 0.1), Err(SearchError::Checkpoint { line: 1, .. })));
        let broken = text.replacen("1 4.0 0.1", "1 four 0.1", 1);
        assert!(matches!(load_checkpoint(&broken, &g, None, 0.1), Err(SearchError::Checkpoint { line: 4, .. })));
        let short = text.replacen("1.0 1.0 1.0 1.0\n", "1.0 1.0\n", 1);
        assert!(matches!(load_checkpoint(&short, &g, None, 0.1), Err(SearchError::Checkpoint { line: 3, .. })));
        assert!(load_checkpoint("garbage\n", &g, None, 0.1).is_err());
    }
}
