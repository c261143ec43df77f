//! Long records: overlapping bins solved independently and cross-faded with
//! complementary Hann ramps.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::solve::{assemble_decomposition, coincident_tracks, order_phases, solve_phased};
use super::types::{ComplexEnvelope, Decomposition, OrderSpec, SampledSignal, VkfConfig};
use crate::error::{Result, VkfError};

/// Half-open sample range `[start, start + len)` of one bin.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BinSpan {
    pub start: usize,
    pub len: usize,
}

impl BinSpan {
    pub fn end(&self) -> usize {
        self.start + self.len
    }
}

/// Bin boundaries for a record of `n` samples.
///
/// Bins advance by `bin_length − round(overlap·bin_length)`; the last bin is
/// anchored to the end of the record so every bin has full length.
pub fn bin_layout(n: usize, config: &VkfConfig) -> Vec<BinSpan> {
    let len = config.bin_length;
    if len >= n {
        return vec![BinSpan { start: 0, len: n }];
    }
    let overlap = ((config.overlap * len as f64).round() as usize).clamp(2, len - 1);
    let hop = len - overlap;
    let mut spans = Vec::new();
    let mut start = 0;
    while start + len < n {
        spans.push(BinSpan { start, len });
        start += hop;
    }
    spans.push(BinSpan { start: n - len, len });
    spans
}

/// Cross-fade weights over a transition of `m` samples: `(outgoing, incoming)`.
///
/// The incoming weight is a rising Hann half-window and the outgoing weight is
/// its complement, so each pair sums to exactly 1.0 in floating point.
pub fn blend_weights(m: usize) -> Vec<(f64, f64)> {
    (0..m)
        .map(|j| {
            let incoming = 0.5 - 0.5 * (PI * (j as f64 + 0.5) / m as f64).cos();
            (1.0 - incoming, incoming)
        })
        .collect()
}

/// One contiguous stretch of the output and how it is filled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Segment {
    /// Copied from a single bin.
    Single { bin: usize, start: usize, end: usize },
    /// Cross-faded from bin `from` into bin `from + 1`.
    Blend { from: usize, start: usize, end: usize },
}

/// Partition of `[0, n)` into pass-through and cross-fade stretches.
pub fn blend_plan(spans: &[BinSpan]) -> Vec<Segment> {
    let mut plan = Vec::new();
    let mut pos = 0;
    for (i, span) in spans.iter().enumerate() {
        match spans.get(i + 1) {
            Some(next) => {
                let blend_start = next.start.max(pos);
                if blend_start > pos {
                    plan.push(Segment::Single {
                        bin: i,
                        start: pos,
                        end: blend_start,
                    });
                }
                plan.push(Segment::Blend {
                    from: i,
                    start: blend_start,
                    end: span.end(),
                });
                pos = span.end();
            }
            None => {
                if span.end() > pos {
                    plan.push(Segment::Single {
                        bin: i,
                        start: pos,
                        end: span.end(),
                    });
                }
            }
        }
    }
    plan
}

/// Solves a record of any length by binning; falls back to one block when the
/// record fits in a single bin.
pub fn solve_long(
    y: &SampledSignal,
    orders: &[OrderSpec],
    config: &VkfConfig,
) -> Result<Decomposition> {
    config.validate()?;
    // Phases are integrated over the whole record so bins share one carrier reference.
    let phases = order_phases(y, orders)?;
    let weights: Vec<f64> = orders.iter().map(|o| o.weight).collect();
    let spans = bin_layout(y.len(), config);

    let solved: Vec<_> = spans
        .par_iter()
        .enumerate()
        .map(|(index, span)| {
            let ys = &y.samples()[span.start..span.end()];
            let ps: Vec<_> = phases.iter().map(|p| p.slice(span.start, span.len)).collect();
            solve_phased(ys, &ps, &weights, config).map_err(|e| VkfError::Bin {
                index,
                source: Box::new(e),
            })
        })
        .collect();
    let solved = solved.into_iter().collect::<Result<Vec<_>>>()?;

    let n = y.len();
    let s = orders.len();
    let mut blended = vec![vec![Complex64::new(0.0, 0.0); n]; s];
    for seg in blend_plan(&spans) {
        match seg {
            Segment::Single { bin, start, end } => {
                let off = spans[bin].start;
                for (o, out) in blended.iter_mut().enumerate() {
                    let src = solved[bin].0[o].values();
                    out[start..end].copy_from_slice(&src[start - off..end - off]);
                }
            }
            Segment::Blend { from, start, end } => {
                let (a_off, b_off) = (spans[from].start, spans[from + 1].start);
                let w = blend_weights(end - start);
                for (o, out) in blended.iter_mut().enumerate() {
                    let a = solved[from].0[o].values();
                    let b = solved[from + 1].0[o].values();
                    for (j, k) in (start..end).enumerate() {
                        let (wa, wb) = w[j];
                        out[k] = a[k - a_off] * wa + b[k - b_off] * wb;
                    }
                }
            }
        }
    }

    let envelopes = blended
        .into_iter()
        .map(ComplexEnvelope::new)
        .collect::<Result<Vec<_>>>()?;
    let stats = solved.iter().map(|(_, st)| *st).collect();
    assemble_decomposition(
        y.samples(),
        envelopes,
        phases,
        stats,
        coincident_tracks(orders),
        config,
    )
}
