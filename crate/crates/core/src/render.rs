//! Grayscale renderings of decoder behavior.
//!
//! * Two-dimensional cuts of noise space through `0` and an anchor vector,
//!   toned by how many iterations each point withstands.
//! * Decoding traces: one row per iteration, one column per bit, toned by the
//!   output `m`.
//!
//! Images are binary PGM (`P5`, maxval 255).

use std::fmt::{self, Write as _};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use thiserror::Error;

use crate::channel::{self, NoiseVector};
use crate::code::TannerGraph;
use crate::decoder::{DecodeError, MinSumDecoder, OutcomeKind, Withstand};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RenderError {
    #[error("vector has length {got}, but the code has {expected} bits")]
    LengthMismatch { expected: usize, got: usize },
    #[error("anchor vector is zero")]
    ZeroAnchor,
    #[error("third point is (numerically) collinear with the anchor")]
    Collinear,
    #[error("indicator bit {bit} is out of range for {n_bits} bits{}", if *one_based { " (1-based)" } else { "" })]
    IndicatorOutOfRange { bit: usize, n_bits: usize, one_based: bool },
    #[error("invalid cut geometry: {0}")]
    Geometry(String),
    #[error("trace has {len} rows; need at least k_min + 2 = {need}")]
    TraceTooShort { len: usize, need: usize },
    #[error(transparent)]
    Decode(#[from] DecodeError),
}

/// 8-bit grayscale image, row-major from the top-left corner.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<u8>,
}

impl GrayImage {
    pub fn row(&self, r: usize) -> &[u8] {
        &self.pixels[r * self.width..(r + 1) * self.width]
    }

    pub fn get(&self, col: usize, row: usize) -> u8 {
        self.pixels[row * self.width + col]
    }

    pub fn to_pgm(&self) -> Vec<u8> {
        let mut out = format!("P5\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend_from_slice(&self.pixels);
        out
    }
}

/// Quantizes a tone in `[0, 1]` to a byte: 256 equal-width bins, so `0` is
/// black, `1` is white, and `1/2` lands on 128.
pub fn tone_byte(tone: f64) -> u8 {
    (tone * 256.0).floor().clamp(0.0, 255.0) as u8
}

/// Cut tone for a withstand value: `(9 - log2 n) / 11` for `n >= 1`,
/// `10/11` for `n = 0`, white for immediate decoding, black for a wrong
/// codeword. Clamped to `[0, 1]`.
pub fn cut_tone(withstand: Withstand) -> f64 {
    match withstand {
        Withstand::ImmediateDecode => 1.0,
        Withstand::Count(0) => 10.0 / 11.0,
        Withstand::Count(n) => ((9.0 - (n as f64).log2()) / 11.0).clamp(0.0, 1.0),
        Withstand::Infinite => 0.0,
    }
}

/// Trace tone `(1 + m/10) / 2`, clamped to `[0, 1]`.
pub fn trace_tone(m: f64) -> f64 {
    ((1.0 + m / 10.0) / 2.0).clamp(0.0, 1.0)
}

/// The third point fixing the plane of a cut.
#[derive(Debug, Clone, PartialEq)]
pub enum ThirdPoint {
    Vector(NoiseVector),
    /// Standard normal components from a seeded generator.
    Random { seed: u64 },
    /// Ones at the listed bits, zeros elsewhere.
    Indicator { bits: Vec<usize>, one_based: bool },
}

impl ThirdPoint {
    pub fn resolve(&self, n_bits: usize) -> Result<NoiseVector, RenderError> {
        match self {
            ThirdPoint::Vector(v) => {
                if v.len() != n_bits {
                    return Err(RenderError::LengthMismatch {
                        expected: n_bits,
                        got: v.len(),
                    });
                }
                Ok(v.clone())
            }
            ThirdPoint::Random { seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                Ok(NoiseVector::new(
                    (0..n_bits).map(|_| StandardNormal.sample(&mut rng)).collect(),
                ))
            }
            ThirdPoint::Indicator { bits, one_based } => {
                let mut v = NoiseVector::zeros(n_bits);
                for &b in bits {
                    let idx = if *one_based { b.checked_sub(1) } else { Some(b) };
                    match idx {
                        Some(i) if i < n_bits => v[i] = 1.0,
                        _ => {
                            return Err(RenderError::IndicatorOutOfRange {
                                bit: b,
                                n_bits,
                                one_based: *one_based,
                            })
                        }
                    }
                }
                Ok(v)
            }
        }
    }
}

impl fmt::Display for ThirdPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ThirdPoint::Vector(_) => write!(f, "vector"),
            ThirdPoint::Random { seed } => write!(f, "random(seed={seed})"),
            ThirdPoint::Indicator { bits, one_based } => {
                write!(f, "indicator({:?}, {})", bits, if *one_based { "1-based" } else { "0-based" })
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CutSpec {
    /// Placed at `(u, v) = (1, 0)`.
    pub anchor: NoiseVector,
    pub third: ThirdPoint,
    /// Horizontal extent, in units of `|anchor|`.
    pub u_range: (f64, f64),
    /// Vertical extent, in units of `|anchor|`.
    pub v_range: (f64, f64),
    pub width: usize,
    pub height: usize,
    pub n_cap: usize,
}

impl CutSpec {
    pub fn new(anchor: NoiseVector, third: ThirdPoint) -> Self {
        Self {
            anchor,
            third,
            u_range: (-0.25, 1.5),
            v_range: (-0.6, 0.6),
            width: 432,
            height: 288,
            n_cap: 1024,
        }
    }

    /// Grid coordinates of a pixel; endpoints are included.
    pub fn pixel_uv(&self, col: usize, row: usize) -> (f64, f64) {
        let frac = |i: usize, n: usize| if n > 1 { i as f64 / (n - 1) as f64 } else { 0.0 };
        let (u0, u1) = self.u_range;
        let (v0, v1) = self.v_range;
        (u0 + (u1 - u0) * frac(col, self.width), v1 - (v1 - v0) * frac(row, self.height))
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Orthonormal basis of the plane through `0`, `anchor`, and `third`, with
/// the first vector along the anchor.
pub fn plane_basis(anchor: &[f64], third: &[f64]) -> Result<(Vec<f64>, Vec<f64>), RenderError> {
    if anchor.len() != third.len() {
        return Err(RenderError::LengthMismatch {
            expected: anchor.len(),
            got: third.len(),
        });
    }
    let na = dot(anchor, anchor).sqrt();
    if na == 0.0 {
        return Err(RenderError::ZeroAnchor);
    }
    let e1: Vec<f64> = anchor.iter().map(|x| x / na).collect();
    let proj = dot(third, &e1);
    let resid: Vec<f64> = third.iter().zip(&e1).map(|(t, e)| t - proj * e).collect();
    let nr = dot(&resid, &resid).sqrt();
    let nt = dot(third, third).sqrt();
    if nt == 0.0 || nr < 1e-9 * nt {
        return Err(RenderError::Collinear);
    }
    let e2 = resid.into_iter().map(|x| x / nr).collect();
    Ok((e1, e2))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutCell {
    pub u: f64,
    pub v: f64,
    pub withstand: Withstand,
    pub tone: f64,
}

#[derive(Debug, Clone)]
pub struct CutRender {
    pub image: GrayImage,
    /// Row-major, matching the image.
    pub cells: Vec<CutCell>,
}

impl CutRender {
    /// `u,v,withstand,tone` per pixel.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("u,v,withstand,tone\n");
        for c in &self.cells {
            writeln!(out, "{:?},{:?},{},{:?}", c.u, c.v, c.withstand, c.tone).unwrap();
        }
        out
    }
}

/// Noise vector at grid point `(u, v)` of a cut.
pub fn cut_point(scale: f64, e1: &[f64], e2: &[f64], u: f64, v: f64) -> Vec<f64> {
    let (su, sv) = (u * scale, v * scale);
    e1.iter().zip(e2).map(|(a, b)| su * a + sv * b).collect()
}

/// Classifies every pixel of a cut. Pixels are evaluated in parallel; the
/// output does not depend on evaluation order.
pub fn render_cut(graph: &TannerGraph, spec: &CutSpec) -> Result<CutRender, RenderError> {
    let n = graph.n_bits();
    if spec.anchor.len() != n {
        return Err(RenderError::LengthMismatch {
            expected: n,
            got: spec.anchor.len(),
        });
    }
    if spec.width == 0 || spec.height == 0 {
        return Err(RenderError::Geometry(format!("resolution {}x{} is empty", spec.width, spec.height)));
    }
    let ok = |(a, b): (f64, f64)| a.is_finite() && b.is_finite() && a < b;
    if !ok(spec.u_range) || !ok(spec.v_range) {
        return Err(RenderError::Geometry(format!(
            "ranges u={:?} v={:?} must be finite and increasing",
            spec.u_range, spec.v_range
        )));
    }
    let third = spec.third.resolve(n)?;
    let (e1, e2) = plane_basis(&spec.anchor, &third)?;
    let scale = spec.anchor.weight().sqrt();

    let cells: Vec<CutCell> = (0..spec.width * spec.height)
        .into_par_iter()
        .map_init(
            || (MinSumDecoder::new(graph), vec![0.0; n]),
            |(decoder, h), idx| {
                let (u, v) = spec.pixel_uv(idx % spec.width, idx / spec.width);
                let xi = cut_point(scale, &e1, &e2, u, v);
                let withstand = decoder.withstand_with_buffer(&xi, h, spec.n_cap)?;
                Ok(CutCell {
                    u,
                    v,
                    withstand,
                    tone: cut_tone(withstand),
                })
            },
        )
        .collect::<Result<_, DecodeError>>()?;

    let pixels = cells.iter().map(|c| tone_byte(c.tone)).collect();
    Ok(CutRender {
        image: GrayImage {
            width: spec.width,
            height: spec.height,
            pixels,
        },
        cells,
    })
}

#[derive(Debug, Clone)]
pub struct TraceRender {
    /// Row 0 is `h = m(0)`; row `k` is `m(k)`.
    pub image: GrayImage,
    /// Where decoding stopped; shorter images come from a codeword stop.
    pub outcome: OutcomeKind,
    pub trace: Vec<Vec<f64>>,
}

/// Renders `m(0..=n_iters)` for noise `xi`, stopping early at a codeword.
pub fn render_trace(graph: &TannerGraph, xi: &[f64], n_iters: usize) -> Result<TraceRender, RenderError> {
    if xi.len() != graph.n_bits() {
        return Err(RenderError::LengthMismatch {
            expected: graph.n_bits(),
            got: xi.len(),
        });
    }
    let h = channel::llr_from_noise(xi);
    let out = MinSumDecoder::new(graph).decode(&h, n_iters, true)?;
    let trace = out.trace.expect("trace requested");
    let pixels = trace.iter().flatten().map(|&m| tone_byte(trace_tone(m))).collect();
    Ok(TraceRender {
        image: GrayImage {
            width: graph.n_bits(),
            height: trace.len(),
            pixels,
        },
        outcome: out.kind,
        trace,
    })
}

fn sign_row(row: &[f64]) -> Vec<i8> {
    row.iter()
        .map(|&m| if m > 0.0 { 1 } else if m < 0.0 { -1 } else { 0 })
        .collect()
}

/// Smallest `p >= 1` with `sign m(k + p) = sign m(k)` for all
/// `k_min <= k <= last - p`, among periods seen at least twice in full.
pub fn detect_sign_period(trace: &[Vec<f64>], k_min: usize) -> Result<Option<usize>, RenderError> {
    if trace.len() < k_min + 2 {
        return Err(RenderError::TraceTooShort {
            len: trace.len(),
            need: k_min + 2,
        });
    }
    let signs: Vec<Vec<i8>> = trace[k_min..].iter().map(|r| sign_row(r)).collect();
    let span = signs.len() - 1;
    Ok((1..=span / 2).find(|&p| (0..=span - p).all(|k| signs[k] == signs[k + p])))
}
