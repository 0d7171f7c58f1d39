//! Gray-mapped 16-QAM over an AWGN channel.
//!
//! Each symbol carries 4 bits b0 b1 b2 b3: (b0, b1) select the in-phase
//! amplitude and (b2, b3) the quadrature amplitude through the per-axis Gray
//! map 00 -> -3, 01 -> -1, 11 -> +1, 10 -> +3, scaled by 1/sqrt(10) so the
//! average symbol energy is exactly 1. Noise is seeded per symbol index, so
//! symbol blocks can be processed in any order or in parallel with identical
//! results.

use num_complex::Complex64;

use crate::bits::BitString;
use crate::rng::{mix, SplitMix64};

/// Bits carried per 16-QAM symbol.
pub const BITS_PER_SYMBOL: usize = 4;

/// Amplitude scale making the mean constellation energy exactly 1:
/// per axis (9+1+1+9)/4 = 5, two axes -> 10, so points scale by 1/sqrt(10).
fn amp_scale() -> f64 {
    1.0 / 10.0f64.sqrt()
}

/// Per-axis Gray map: 2 bits -> unscaled amplitude.
fn axis_amplitude(bits: u8) -> f64 {
    match bits {
        0b00 => -3.0,
        0b01 => -1.0,
        0b11 => 1.0,
        0b10 => 3.0,
        _ => unreachable!("2-bit input"),
    }
}

/// The 16 constellation points indexed by the 4-bit pattern b0b1b2b3
/// (MSB-first, so index 0b0000 is the (-3,-3) corner).
#[derive(Debug, Clone)]
pub struct ConstellationMap {
    points: [Complex64; 16],
}

impl Default for ConstellationMap {
    fn default() -> Self {
        Self::new()
    }
}

impl ConstellationMap {
    pub fn new() -> ConstellationMap {
        let s = amp_scale();
        let mut points = [Complex64::new(0.0, 0.0); 16];
        for (pattern, point) in points.iter_mut().enumerate() {
            let i_bits = ((pattern >> 2) & 0b11) as u8;
            let q_bits = (pattern & 0b11) as u8;
            *point = Complex64::new(axis_amplitude(i_bits) * s, axis_amplitude(q_bits) * s);
        }
        ConstellationMap { points }
    }

    pub fn point(&self, pattern: usize) -> Complex64 {
        self.points[pattern]
    }

    pub fn points(&self) -> &[Complex64; 16] {
        &self.points
    }

    /// Nearest constellation point; exact ties resolve toward the smaller
    /// bit pattern because the scan runs in pattern order with a strict
    /// comparison.
    pub fn nearest(&self, received: Complex64) -> usize {
        let mut best = 0usize;
        let mut best_dist = f64::INFINITY;
        for (pattern, point) in self.points.iter().enumerate() {
            let d = (received - point).norm_sqr();
            if d < best_dist {
                best_dist = d;
                best = pattern;
            }
        }
        best
    }
}

/// AWGN channel parameters. `ebn0_db = f64::INFINITY` is the noise-off
/// sentinel (sigma^2 = 0).
#[derive(Debug, Clone, Copy)]
pub struct ChannelParams {
    pub ebn0_db: f64,
    pub noise_seed: u64,
}

impl ChannelParams {
    pub fn new(ebn0_db: f64, noise_seed: u64) -> ChannelParams {
        ChannelParams { ebn0_db, noise_seed }
    }

    /// Noise variance per real dimension: sigma^2 = N0/2 with
    /// N0 = (Es/4) / 10^(ebn0_db/10) and Es = 1, i.e. Eb is the energy per
    /// transmitted (channel-coded) bit.
    pub fn noise_variance(&self) -> f64 {
        if self.ebn0_db == f64::INFINITY {
            return 0.0;
        }
        let ebn0 = 10f64.powf(self.ebn0_db / 10.0);
        let n0 = (1.0 / BITS_PER_SYMBOL as f64) / ebn0;
        n0 / 2.0
    }
}

/// Maps bits to symbols, 4 bits per symbol. The input length must already be
/// a multiple of 4; the caller records its own padding.
pub fn modulate(bits: &BitString, map: &ConstellationMap) -> Vec<Complex64> {
    assert_eq!(bits.len() % BITS_PER_SYMBOL, 0, "pad to 4-bit symbols first");
    bits.as_slice()
        .chunks_exact(BITS_PER_SYMBOL)
        .map(|chunk| {
            let pattern = chunk.iter().fold(0usize, |p, &b| (p << 1) | b as usize);
            map.point(pattern)
        })
        .collect()
}

/// Adds seeded Gaussian noise of variance sigma^2 per real dimension.
/// The noise for symbol i depends only on (noise_seed, i): Box-Muller over
/// two SplitMix64 uniforms.
pub fn apply_awgn(symbols: &[Complex64], params: &ChannelParams) -> Vec<Complex64> {
    let sigma2 = params.noise_variance();
    if sigma2 == 0.0 {
        return symbols.to_vec();
    }
    let sigma = sigma2.sqrt();
    symbols
        .iter()
        .enumerate()
        .map(|(i, &s)| {
            let (n_re, n_im) = gaussian_pair(params.noise_seed, i as u64);
            s + Complex64::new(sigma * n_re, sigma * n_im)
        })
        .collect()
}

/// Standard-normal pair for (seed, index), via Box-Muller.
fn gaussian_pair(seed: u64, index: u64) -> (f64, f64) {
    let mut rng = SplitMix64::new(mix(&[seed, index]));
    // Guard the log against an exact zero draw.
    let u1 = rng.next_f64().max(1e-300);
    let u2 = rng.next_f64();
    let radius = (-2.0 * u1.ln()).sqrt();
    let angle = 2.0 * std::f64::consts::PI * u2;
    (radius * angle.cos(), radius * angle.sin())
}

/// Nearest-point hard decisions, 4 bits per symbol.
pub fn demodulate_hard(symbols: &[Complex64], map: &ConstellationMap) -> BitString {
    let mut out = BitString::with_capacity(symbols.len() * BITS_PER_SYMBOL);
    for &y in symbols {
        let pattern = map.nearest(y);
        out.push_uint(pattern as u64, BITS_PER_SYMBOL);
    }
    out
}

/// Noise floor substituted for sigma^2 = 0 so noise-off LLRs stay finite
/// (magnitude ~200 for the nearest/next-nearest gap), large enough to
/// saturate every decoder.
const MIN_SIGMA2: f64 = 1e-3;

/// Max-log LLR per bit:
/// LLR(b_i) = (min over symbols with b_i=1 of |y-s|^2
///             - min over symbols with b_i=0 of |y-s|^2) / (2 sigma^2),
/// so positive means bit 0, matching the global convention.
pub fn demodulate_llr(
    symbols: &[Complex64],
    map: &ConstellationMap,
    params: &ChannelParams,
) -> Vec<f64> {
    let sigma2 = params.noise_variance().max(MIN_SIGMA2);
    let mut out = Vec::with_capacity(symbols.len() * BITS_PER_SYMBOL);
    for &y in symbols {
        let mut min0 = [f64::INFINITY; BITS_PER_SYMBOL];
        let mut min1 = [f64::INFINITY; BITS_PER_SYMBOL];
        for (pattern, point) in map.points().iter().enumerate() {
            let d = (y - point).norm_sqr();
            for bit in 0..BITS_PER_SYMBOL {
                let is_one = pattern & (1 << (BITS_PER_SYMBOL - 1 - bit)) != 0;
                if is_one {
                    min1[bit] = min1[bit].min(d);
                } else {
                    min0[bit] = min0[bit].min(d);
                }
            }
        }
        for bit in 0..BITS_PER_SYMBOL {
            out.push((min1[bit] - min0[bit]) / (2.0 * sigma2));
        }
    }
    out
}
