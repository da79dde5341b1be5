//! LDPC codes as sparse Tanner graphs.
//!
//! A [`TannerGraph`] stores both adjacency directions of the parity-check
//! matrix, kept in ascending index order, plus a check-major edge layout that
//! the decoder uses for per-edge message storage.

use std::fmt::Write as _;

use thiserror::Error;

/// Circulant size of the [155, 64, 20] quasi-cyclic code.
const TANNER_CIRCULANT: usize = 31;

/// Shift exponents of the three 31-row strips of five circulant blocks.
const TANNER_EXPONENTS: [[usize; 5]; 3] = [[1, 2, 4, 8, 16], [5, 10, 20, 9, 18], [25, 19, 7, 14, 28]];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CodeError {
    #[error("code must have at least one bit and one check (got {n_bits} bits, {n_checks} checks)")]
    Empty { n_bits: usize, n_checks: usize },
    #[error("check {check} has degree {degree}; every check needs degree >= 2")]
    CheckDegree { check: usize, degree: usize },
    #[error("check {check} references bit {bit}, but the code has {n_bits} bits")]
    BitOutOfRange { check: usize, bit: usize, n_bits: usize },
    #[error("check {check} lists bit {bit} more than once")]
    DuplicateEdge { check: usize, bit: usize },
    #[error("sign vector has length {got}, expected {expected}")]
    LengthMismatch { expected: usize, got: usize },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("alist line {line}: {message}")]
pub struct AlistError {
    pub line: usize,
    pub message: String,
}

impl AlistError {
    fn new(line: usize, message: impl Into<String>) -> Self {
        Self {
            line,
            message: message.into(),
        }
    }
}

/// Sparse bipartite bit/check graph of a binary linear code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TannerGraph {
    n_bits: usize,
    n_checks: usize,
    bit_to_checks: Vec<Vec<usize>>,
    check_to_bits: Vec<Vec<usize>>,
    // Check-major edge layout: edges of check `a` are `check_start[a]..check_start[a + 1]`.
    check_start: Vec<usize>,
    edge_bit: Vec<usize>,
    // Bit-major view: edge ids of bit `i` in `bit_to_checks[i]` order.
    bit_start: Vec<usize>,
    bit_edges: Vec<usize>,
}

impl TannerGraph {
    /// Builds a graph from per-check bit lists (0-based).
    ///
    /// Lists are sorted; the bit-side adjacency is derived from them.
    pub fn from_checks(n_bits: usize, checks: Vec<Vec<usize>>) -> Result<Self, CodeError> {
        let n_checks = checks.len();
        if n_bits == 0 || n_checks == 0 {
            return Err(CodeError::Empty { n_bits, n_checks });
        }
        let mut check_to_bits = checks;
        for (check, bits) in check_to_bits.iter_mut().enumerate() {
            bits.sort_unstable();
            if let Some(&bit) = bits.iter().find(|&&b| b >= n_bits) {
                return Err(CodeError::BitOutOfRange { check, bit, n_bits });
            }
            if let Some(w) = bits.windows(2).find(|w| w[0] == w[1]) {
                return Err(CodeError::DuplicateEdge { check, bit: w[0] });
            }
            if bits.len() < 2 {
                return Err(CodeError::CheckDegree {
                    check,
                    degree: bits.len(),
                });
            }
        }

        let mut bit_to_checks = vec![Vec::new(); n_bits];
        for (check, bits) in check_to_bits.iter().enumerate() {
            for &bit in bits {
                bit_to_checks[bit].push(check);
            }
        }

        let mut check_start = Vec::with_capacity(n_checks + 1);
        let mut edge_bit = Vec::new();
        check_start.push(0);
        for bits in &check_to_bits {
            edge_bit.extend_from_slice(bits);
            check_start.push(edge_bit.len());
        }

        // Checks are visited in ascending order, so each bit's edge ids come
        // out in the same order as `bit_to_checks`.
        let mut per_bit: Vec<Vec<usize>> = vec![Vec::new(); n_bits];
        for (edge, &bit) in edge_bit.iter().enumerate() {
            per_bit[bit].push(edge);
        }
        let mut bit_start = Vec::with_capacity(n_bits + 1);
        let mut bit_edges = Vec::with_capacity(edge_bit.len());
        bit_start.push(0);
        for edges in per_bit {
            bit_edges.extend(edges);
            bit_start.push(bit_edges.len());
        }

        Ok(Self {
            n_bits,
            n_checks,
            bit_to_checks,
            check_to_bits,
            check_start,
            edge_bit,
            bit_start,
            bit_edges,
        })
    }

    pub fn n_bits(&self) -> usize {
        self.n_bits
    }

    pub fn n_checks(&self) -> usize {
        self.n_checks
    }

    pub fn n_edges(&self) -> usize {
        self.edge_bit.len()
    }

    pub fn bit_to_checks(&self) -> &[Vec<usize>] {
        &self.bit_to_checks
    }

    pub fn check_to_bits(&self) -> &[Vec<usize>] {
        &self.check_to_bits
    }

    pub fn bit_degrees(&self) -> Vec<usize> {
        self.bit_to_checks.iter().map(Vec::len).collect()
    }

    pub fn check_degrees(&self) -> Vec<usize> {
        self.check_to_bits.iter().map(Vec::len).collect()
    }

    /// Edge-id range owned by `check` in the check-major layout.
    #[inline]
    pub(crate) fn check_edges(&self, check: usize) -> std::ops::Range<usize> {
        self.check_start[check]..self.check_start[check + 1]
    }

    #[inline]
    pub(crate) fn edge_bit(&self, edge: usize) -> usize {
        self.edge_bit[edge]
    }

    /// Edge ids incident to `bit`, ordered like `bit_to_checks[bit]`.
    #[inline]
    pub(crate) fn bit_edges(&self, bit: usize) -> &[usize] {
        &self.bit_edges[self.bit_start[bit]..self.bit_start[bit + 1]]
    }

    /// Tests whether a sign vector is a codeword.
    ///
    /// A zero entry is an undecided bit and never completes a codeword.
    pub fn is_codeword(&self, signs: &[i8]) -> Result<bool, CodeError> {
        if signs.len() != self.n_bits {
            return Err(CodeError::LengthMismatch {
                expected: self.n_bits,
                got: signs.len(),
            });
        }
        if signs.contains(&0) {
            return Ok(false);
        }
        Ok(self.check_to_bits.iter().all(|bits| {
            bits.iter().filter(|&&b| signs[b] < 0).count() % 2 == 0
        }))
    }

    /// Rank of the parity-check matrix over GF(2).
    pub fn gf2_rank(&self) -> usize {
        let words = self.n_bits.div_ceil(64);
        let mut rows: Vec<Vec<u64>> = self
            .check_to_bits
            .iter()
            .map(|bits| {
                let mut row = vec![0u64; words];
                for &b in bits {
                    row[b / 64] |= 1 << (b % 64);
                }
                row
            })
            .collect();

        let mut rank = 0;
        for col in 0..self.n_bits {
            let (w, mask) = (col / 64, 1u64 << (col % 64));
            let Some(pivot) = (rank..rows.len()).find(|&r| rows[r][w] & mask != 0) else {
                continue;
            };
            rows.swap(rank, pivot);
            let pivot_row = rows[rank].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r != rank && row[w] & mask != 0 {
                    for (x, p) in row.iter_mut().zip(&pivot_row) {
                        *x ^= p;
                    }
                }
            }
            rank += 1;
        }
        rank
    }
}

/// The 4-bit, 5-check toy code whose two codewords are all-plus and all-minus.
pub fn build_toy() -> TannerGraph {
    let checks = vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![0, 3], vec![0, 1, 2, 3]];
    TannerGraph::from_checks(4, checks).expect("toy code is valid")
}

/// Tanner's [155, 64, 20] quasi-cyclic code.
///
/// Row `r` of circulant `R^e` has its single one at column `(r + e) mod 31`.
pub fn build_tanner_155() -> TannerGraph {
    let p = TANNER_CIRCULANT;
    let mut checks = Vec::with_capacity(3 * p);
    for strip in &TANNER_EXPONENTS {
        for r in 0..p {
            checks.push(
                strip
                    .iter()
                    .enumerate()
                    .map(|(block, &e)| p * block + (r + e) % p)
                    .collect(),
            );
        }
    }
    TannerGraph::from_checks(5 * p, checks).expect("tanner code is valid")
}

type Builder = fn() -> TannerGraph;

/// Codes that can be requested by name instead of by alist file.
const BUILTIN_CODES: &[(&str, Builder)] = &[("toy", build_toy), ("tanner155", build_tanner_155)];

pub fn builtin(name: &str) -> Option<TannerGraph> {
    BUILTIN_CODES
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, build)| build())
}

pub fn builtin_names() -> impl Iterator<Item = &'static str> {
    BUILTIN_CODES.iter().map(|(n, _)| *n)
}

/// Writes the canonical alist form: unpadded, ascending 1-based indices.
pub fn to_alist(graph: &TannerGraph) -> String {
    let bit_deg = graph.bit_degrees();
    let check_deg = graph.check_degrees();
    let join = |v: &mut dyn Iterator<Item = usize>| {
        v.map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
    };

    let mut out = String::new();
    writeln!(out, "{} {}", graph.n_bits, graph.n_checks).unwrap();
    writeln!(
        out,
        "{} {}",
        bit_deg.iter().max().copied().unwrap_or(0),
        check_deg.iter().max().copied().unwrap_or(0)
    )
    .unwrap();
    writeln!(out, "{}", join(&mut bit_deg.iter().copied())).unwrap();
    writeln!(out, "{}", join(&mut check_deg.iter().copied())).unwrap();
    for checks in &graph.bit_to_checks {
        writeln!(out, "{}", join(&mut checks.iter().map(|c| c + 1))).unwrap();
    }
    for bits in &graph.check_to_bits {
        writeln!(out, "{}", join(&mut bits.iter().map(|b| b + 1))).unwrap();
    }
    out
}

struct Tokens<'a> {
    iter: Box<dyn Iterator<Item = (usize, &'a str)> + 'a>,
    last_line: usize,
}

impl<'a> Tokens<'a> {
    fn new(text: &'a str) -> Self {
        let iter = text
            .lines()
            .enumerate()
            .flat_map(|(i, line)| line.split_whitespace().map(move |t| (i + 1, t)));
        Self {
            iter: Box::new(iter),
            last_line: 1,
        }
    }

    fn next_number(&mut self, what: &str) -> Result<(usize, usize), AlistError> {
        let (line, tok) = self
            .iter
            .next()
            .ok_or_else(|| AlistError::new(self.last_line, format!("unexpected end of file reading {what}")))?;
        self.last_line = line;
        let value = tok
            .parse::<usize>()
            .map_err(|_| AlistError::new(line, format!("malformed {what}: {tok:?}")))?;
        Ok((line, value))
    }

    /// Next non-zero entry; zeros are padding.
    fn next_index(&mut self, what: &str) -> Result<(usize, usize), AlistError> {
        loop {
            let (line, v) = self.next_number(what)?;
            if v != 0 {
                return Ok((line, v));
            }
        }
    }
}

/// Parses alist text. Zero entries are treated as padding wherever an index
/// is expected, so padded and unpadded files give the same graph.
pub fn from_alist(text: &str) -> Result<TannerGraph, AlistError> {
    let mut tok = Tokens::new(text);
    let (hdr_line, n_bits) = tok.next_number("header N")?;
    let (_, n_checks) = tok.next_number("header M")?;
    if n_bits == 0 || n_checks == 0 {
        return Err(AlistError::new(hdr_line, "malformed header: N and M must be positive"));
    }
    let (_, max_bit) = tok.next_number("max bit degree")?;
    let (_, max_check) = tok.next_number("max check degree")?;

    let mut bit_deg = Vec::with_capacity(n_bits);
    for _ in 0..n_bits {
        let (line, d) = tok.next_number("bit degree")?;
        if d > max_bit {
            return Err(AlistError::new(
                line,
                format!("degree mismatch: bit degree {d} exceeds declared maximum {max_bit}"),
            ));
        }
        bit_deg.push(d);
    }
    let mut check_deg = Vec::with_capacity(n_checks);
    for _ in 0..n_checks {
        let (line, d) = tok.next_number("check degree")?;
        if d > max_check {
            return Err(AlistError::new(
                line,
                format!("degree mismatch: check degree {d} exceeds declared maximum {max_check}"),
            ));
        }
        check_deg.push(d);
    }
    if bit_deg.iter().sum::<usize>() != check_deg.iter().sum::<usize>() {
        return Err(AlistError::new(
            tok.last_line,
            "degree mismatch: bit degrees and check degrees count different numbers of edges",
        ));
    }

    let mut bit_lists = Vec::with_capacity(n_bits);
    for (bit, &d) in bit_deg.iter().enumerate() {
        let mut list = Vec::with_capacity(d);
        for _ in 0..d {
            let (line, c) = tok.next_index("check index")?;
            if c > n_checks {
                return Err(AlistError::new(
                    line,
                    format!("check index {c} of bit {} out of range 1..={n_checks}", bit + 1),
                ));
            }
            list.push(c - 1);
        }
        bit_lists.push(list);
    }

    let mut check_lists = Vec::with_capacity(n_checks);
    let mut check_lines = Vec::with_capacity(n_checks);
    for (check, &d) in check_deg.iter().enumerate() {
        let mut list = Vec::with_capacity(d);
        let mut first_line = tok.last_line;
        for j in 0..d {
            let (line, b) = tok.next_index("bit index")?;
            if j == 0 {
                first_line = line;
            }
            if b > n_bits {
                return Err(AlistError::new(
                    line,
                    format!("bit index {b} of check {} out of range 1..={n_bits}", check + 1),
                ));
            }
            list.push(b - 1);
        }
        check_lists.push(list);
        check_lines.push(first_line);
    }

    // Anything after the last list must be padding.
    while let Some((line, t)) = tok.iter.next() {
        if t != "0" {
            return Err(AlistError::new(line, format!("unexpected trailing data {t:?}")));
        }
    }

    for (check, bits) in check_lists.iter().enumerate() {
        for &b in bits {
            if !bit_lists[b].contains(&check) {
                return Err(AlistError::new(
                    check_lines[check],
                    format!("transpose mismatch: check {} lists bit {}, but bit {} does not list check {}", check + 1, b + 1, b + 1, check + 1),
                ));
            }
        }
    }
    for (bit, checks) in bit_lists.iter().enumerate() {
        for &c in checks {
            if !check_lists[c].contains(&bit) {
                return Err(AlistError::new(
                    check_lines[c],
                    format!("transpose mismatch: bit {} lists check {}, but check {} does not list bit {}", bit + 1, c + 1, c + 1, bit + 1),
                ));
            }
        }
    }

    TannerGraph::from_checks(n_bits, check_lists).map_err(|e| {
        let line = match &e {
            CodeError::CheckDegree { check, .. }
            | CodeError::DuplicateEdge { check, .. }
            | CodeError::BitOutOfRange { check, .. } => check_lines[*check],
            _ => hdr_line,
        };
        AlistError::new(line, e.to_string())
    })
}
