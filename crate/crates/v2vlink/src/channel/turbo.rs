//! Turbo code: two recursive systematic convolutional encoders joined by an
//! interleaver, rate 1/3, iteratively decoded with max-log-MAP constituents.
//!
//! Both constituents reuse the convolutional generator taps in recursive
//! form: g2 = 1+D+D^2+D^3 is the feedback polynomial and g1 = 1+D^2+D^3 the
//! feedforward. Encoder 1 sees the info bits and is terminated with three
//! tail bits; encoder 2 sees the interleaved info bits and is left
//! unterminated. The output multiplex is per-bit triplets
//! (systematic, parity1, parity2) followed by the three tail
//! (bit, parity1) pairs: 3L + 6 bits for L info bits.

use crate::bits::BitString;
use crate::channel::ChannelError;
use crate::rng::{mix, seeded_permutation};

const NEG_INF: f64 = f64::NEG_INFINITY;

/// Tail bits appended by the terminated constituent (= encoder memory).
pub const TAIL_BITS: usize = 3;

/// Deterministic interleaver: a Fisher-Yates permutation driven by
/// SplitMix64 seeded with mix(seed, length).
#[derive(Debug, Clone)]
pub struct InterleaverSpec {
    length: usize,
    seed: u64,
    /// interleaved[k] = input[perm[k]]
    perm: Vec<usize>,
}

impl InterleaverSpec {
    pub fn new(seed: u64, length: usize) -> InterleaverSpec {
        let perm = seeded_permutation(mix(&[seed, length as u64]), length);
        InterleaverSpec { length, seed, perm }
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn permutation(&self) -> &[usize] {
        &self.perm
    }

    fn interleave<T: Copy>(&self, x: &[T]) -> Vec<T> {
        self.perm.iter().map(|&i| x[i]).collect()
    }

    fn deinterleave<T: Copy + Default>(&self, y: &[T]) -> Vec<T> {
        let mut out = vec![T::default(); y.len()];
        for (k, &i) in self.perm.iter().enumerate() {
            out[i] = y[k];
        }
        out
    }
}

/// 8-state recursive systematic constituent trellis.
#[derive(Debug, Clone)]
pub struct RscTrellis {
    states: usize,
    /// step[s][u] = (next state, parity bit)
    step: Vec<[(usize, u8); 2]>,
    /// Input that drives the feedback to zero, per state (used for the tail).
    term_input: Vec<u8>,
}

impl RscTrellis {
    /// Builds the RSC trellis from feedback and feedforward taps (constant
    /// term first). The standard code uses feedback [1,1,1,1] (from g2) and
    /// feedforward [1,0,1,1] (from g1).
    pub fn new(feedback: &[u8], feedforward: &[u8]) -> RscTrellis {
        assert_eq!(feedback.len(), feedforward.len());
        assert_eq!(feedback[0], 1, "feedback polynomial must have constant term 1");
        let memory = feedback.len() - 1;
        let states = 1 << memory;

        let mut step = vec![[(0usize, 0u8); 2]; states];
        let mut term_input = vec![0u8; states];
        for s in 0..states {
            // State bits are the previous feedback values, newest as MSB.
            let reg = |i: usize| ((s >> (memory - i)) & 1) as u8;
            let mut fb_sum = 0u8;
            for i in 1..=memory {
                fb_sum ^= feedback[i] & reg(i);
            }
            term_input[s] = fb_sum; // input u = fb_sum makes the new feedback value 0
            for u in 0..2u8 {
                let a = u ^ fb_sum;
                let mut parity = feedforward[0] & a;
                for i in 1..=memory {
                    parity ^= feedforward[i] & reg(i);
                }
                let next = ((a as usize) << (memory - 1)) | (s >> 1);
                step[s][u as usize] = (next, parity);
            }
        }
        RscTrellis {
            states,
            step,
            term_input,
        }
    }

    /// Constituent trellis built from the convolutional generator pair.
    pub fn standard() -> RscTrellis {
        RscTrellis::new(&[1, 1, 1, 1], &[1, 0, 1, 1])
    }

    pub fn states(&self) -> usize {
        self.states
    }

    /// Runs the encoder over `info`, returning parity bits and, when
    /// `terminate` is set, the three (tail bit, tail parity) pairs.
    fn encode(&self, info: &BitString, terminate: bool) -> (Vec<u8>, Vec<(u8, u8)>) {
        let mut parity = Vec::with_capacity(info.len());
        let mut state = 0usize;
        for u in info.iter() {
            let (next, p) = self.step[state][u as usize];
            parity.push(p);
            state = next;
        }
        let mut tail = Vec::new();
        if terminate {
            for _ in 0..TAIL_BITS {
                let u = self.term_input[state];
                let (next, p) = self.step[state][u as usize];
                tail.push((u, p));
                state = next;
            }
            debug_assert_eq!(state, 0);
        }
        (parity, tail)
    }
}

/// Encodes `info` (whose length must equal the interleaver length) into the
/// rate-1/3 turbo multiplex described in the module docs.
pub fn turbo_encode(
    info: &BitString,
    trellis: &RscTrellis,
    il: &InterleaverSpec,
) -> Result<BitString, ChannelError> {
    if info.len() != il.length() {
        return Err(ChannelError::InterleaverMismatch {
            got: info.len(),
            expected: il.length(),
        });
    }
    let (parity1, tail) = trellis.encode(info, true);
    let permuted: BitString = il.interleave(info.as_slice()).into_iter().collect();
    let (parity2, _) = trellis.encode(&permuted, false);

    let mut out = BitString::with_capacity(3 * info.len() + 2 * TAIL_BITS);
    for k in 0..info.len() {
        out.push(info[k]);
        out.push(parity1[k]);
        out.push(parity2[k]);
    }
    for &(bit, parity) in &tail {
        out.push(bit);
        out.push(parity);
    }
    Ok(out)
}

/// One max-log-MAP (BCJR with max) pass over a constituent code.
///
/// `sys` and `par` are channel LLRs for the systematic and parity bits,
/// `apriori` the extrinsic information from the other decoder. When `tail`
/// is given the trellis is terminated through those (sys, par) LLR pairs and
/// the backward recursion starts from the zero state; otherwise it starts
/// uniform. Returns the posterior LLR per info bit.
fn max_log_map(
    trellis: &RscTrellis,
    sys: &[f64],
    par: &[f64],
    apriori: &[f64],
    tail: Option<&[(f64, f64)]>,
) -> Vec<f64> {
    let len = sys.len();
    let states = trellis.states;
    // Symmetric bit metric: +l/2 for bit 0, -l/2 for bit 1.
    let half = |bit: u8, l: f64| if bit == 0 { 0.5 * l } else { -0.5 * l };

    // Branch metric for (state, input) at info step k.
    let gamma = |s: usize, u: u8, k: usize| -> f64 {
        let (_, p) = trellis.step[s][u as usize];
        half(u, sys[k] + apriori[k]) + half(p, par[k])
    };

    let tail_steps = tail.map_or(0, |t| t.len());
    let total = len + tail_steps;

    // Forward recursion.
    let mut alpha = vec![vec![NEG_INF; states]; total + 1];
    alpha[0][0] = 0.0;
    for k in 0..total {
        for s in 0..states {
            let a = alpha[k][s];
            if a == NEG_INF {
                continue;
            }
            if k < len {
                for u in 0..2u8 {
                    let (ns, _) = trellis.step[s][u as usize];
                    let m = a + gamma(s, u, k);
                    if m > alpha[k + 1][ns] {
                        alpha[k + 1][ns] = m;
                    }
                }
            } else {
                // Tail: the single termination input per state.
                let u = trellis.term_input[s];
                let (ns, p) = trellis.step[s][u as usize];
                let (ts, tp) = tail.unwrap()[k - len];
                let m = a + half(u, ts) + half(p, tp);
                if m > alpha[k + 1][ns] {
                    alpha[k + 1][ns] = m;
                }
            }
        }
        // Normalize to keep metrics bounded on long blocks.
        let mx = alpha[k + 1].iter().cloned().fold(NEG_INF, f64::max);
        if mx.is_finite() {
            for v in alpha[k + 1].iter_mut() {
                *v -= mx;
            }
        }
    }

    // Backward recursion.
    let mut beta = vec![vec![NEG_INF; states]; total + 1];
    if tail.is_some() {
        beta[total][0] = 0.0;
    } else {
        beta[total] = vec![0.0; states];
    }
    for k in (0..total).rev() {
        for s in 0..states {
            if k < len {
                for u in 0..2u8 {
                    let (ns, _) = trellis.step[s][u as usize];
                    let b = beta[k + 1][ns];
                    if b == NEG_INF {
                        continue;
                    }
                    let m = b + gamma(s, u, k);
                    if m > beta[k][s] {
                        beta[k][s] = m;
                    }
                }
            } else {
                let u = trellis.term_input[s];
                let (ns, p) = trellis.step[s][u as usize];
                let b = beta[k + 1][ns];
                if b == NEG_INF {
                    continue;
                }
                let (ts, tp) = tail.unwrap()[k - len];
                let m = b + half(u, ts) + half(p, tp);
                if m > beta[k][s] {
                    beta[k][s] = m;
                }
            }
        }
        let mx = beta[k].iter().cloned().fold(NEG_INF, f64::max);
        if mx.is_finite() {
            for v in beta[k].iter_mut() {
                *v -= mx;
            }
        }
    }

    // Posterior LLR: max over u=0 branches minus max over u=1 branches.
    let mut posterior = Vec::with_capacity(len);
    for k in 0..len {
        let mut best = [NEG_INF; 2];
        for s in 0..states {
            let a = alpha[k][s];
            if a == NEG_INF {
                continue;
            }
            for u in 0..2usize {
                let (ns, _) = trellis.step[s][u];
                let b = beta[k + 1][ns];
                if b == NEG_INF {
                    continue;
                }
                let m = a + gamma(s, u as u8, k) + b;
                if m > best[u] {
                    best[u] = m;
                }
            }
        }
        posterior.push(best[0] - best[1]);
    }
    posterior
}

/// Iterative turbo decoding: the two constituent decoders exchange extrinsic
/// information through the interleaver for `iterations` rounds, then the
/// final posterior is hard-decided. Positive LLR decodes to bit 0.
pub fn turbo_decode(
    llrs: &[f64],
    trellis: &RscTrellis,
    il: &InterleaverSpec,
    iterations: usize,
) -> Result<BitString, ChannelError> {
    assert!(iterations >= 1, "at least one iteration required");
    let len = il.length();
    let expected = 3 * len + 2 * TAIL_BITS;
    if llrs.len() != expected {
        return Err(ChannelError::MalformedLength {
            got: llrs.len(),
            reason: format!("expected {expected} LLRs for interleaver length {len}"),
        });
    }

    let mut sys = Vec::with_capacity(len);
    let mut par1 = Vec::with_capacity(len);
    let mut par2 = Vec::with_capacity(len);
    for k in 0..len {
        sys.push(llrs[3 * k]);
        par1.push(llrs[3 * k + 1]);
        par2.push(llrs[3 * k + 2]);
    }
    let tail: Vec<(f64, f64)> = (0..TAIL_BITS)
        .map(|i| (llrs[3 * len + 2 * i], llrs[3 * len + 2 * i + 1]))
        .collect();

    let sys2 = il.interleave(&sys);
    let mut apriori1 = vec![0.0; len];
    let mut posterior2 = vec![0.0; len];

    for _ in 0..iterations {
        let posterior1 = max_log_map(trellis, &sys, &par1, &apriori1, Some(&tail));
        let extrinsic1: Vec<f64> = (0..len)
            .map(|k| posterior1[k] - sys[k] - apriori1[k])
            .collect();

        let apriori2 = il.interleave(&extrinsic1);
        posterior2 = max_log_map(trellis, &sys2, &par2, &apriori2, None);
        let extrinsic2: Vec<f64> = (0..len)
            .map(|k| posterior2[k] - sys2[k] - apriori2[k])
            .collect();
        apriori1 = il.deinterleave(&extrinsic2);
    }

    let final_llrs = il.deinterleave(&posterior2);
    Ok(final_llrs.iter().map(|&l| if l < 0.0 { 1 } else { 0 }).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::hamming_distance;
    use crate::rng::SplitMix64;

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    fn llrs_of(bits: &BitString, amplitude: f64) -> Vec<f64> {
        bits.iter()
            .map(|b| if b == 0 { amplitude } else { -amplitude })
            .collect()
    }

    #[test]
    fn interleaver_is_bijective_and_deterministic() {
        for len in [1usize, 2, 7, 128] {
            let il = InterleaverSpec::new(42, len);
            let mut image: Vec<usize> = il.permutation().to_vec();
            image.sort_unstable();
            assert_eq!(image, (0..len).collect::<Vec<_>>());
            assert_eq!(
                il.permutation(),
                InterleaverSpec::new(42, len).permutation()
            );
        }
        let data: Vec<u8> = (0..50).map(|i| (i % 2) as u8).collect();
        let il = InterleaverSpec::new(9, 50);
        assert_eq!(il.deinterleave(&il.interleave(&data)), data);
    }

    #[test]
    fn all_zero_info_encodes_to_zeros() {
        let t = RscTrellis::standard();
        for len in [1usize, 4, 33] {
            let il = InterleaverSpec::new(1, len);
            let enc = turbo_encode(&BitString::repeat(0, len), &t, &il).unwrap();
            assert_eq!(enc, BitString::repeat(0, 3 * len + 6));
        }
    }

    #[test]
    fn systematic_bits_appear_verbatim() {
        let t = RscTrellis::standard();
        let info = bs("110100101101");
        let il = InterleaverSpec::new(5, info.len());
        let enc = turbo_encode(&info, &t, &il).unwrap();
        for k in 0..info.len() {
            assert_eq!(enc[3 * k], info[k], "systematic position {k}");
        }
    }

    #[test]
    fn length_formula() {
        let t = RscTrellis::standard();
        let il = InterleaverSpec::new(2, 4);
        let enc = turbo_encode(&bs("1000"), &t, &il).unwrap();
        assert_eq!(enc.len(), 18);
        assert!(matches!(
            turbo_encode(&bs("10000"), &t, &il),
            Err(ChannelError::InterleaverMismatch { got: 5, expected: 4 })
        ));
    }

    #[test]
    fn encoder_is_linear() {
        let t = RscTrellis::standard();
        let mut rng = SplitMix64::new(17);
        for _ in 0..30 {
            let len = 1 + rng.next_below(40);
            let il = InterleaverSpec::new(7, len);
            let a: BitString = (0..len).map(|_| (rng.next_u64() & 1) as u8).collect();
            let b: BitString = (0..len).map(|_| (rng.next_u64() & 1) as u8).collect();
            let lhs = turbo_encode(&(&a ^ &b), &t, &il).unwrap();
            let rhs = &turbo_encode(&a, &t, &il).unwrap() ^ &turbo_encode(&b, &t, &il).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn clean_round_trip_at_one_iteration() {
        let t = RscTrellis::standard();
        let mut rng = SplitMix64::new(23);
        for _ in 0..20 {
            let len = 1 + rng.next_below(60);
            let il = InterleaverSpec::new(11, len);
            let info: BitString = (0..len).map(|_| (rng.next_u64() & 1) as u8).collect();
            let enc = turbo_encode(&info, &t, &il).unwrap();
            let decoded = turbo_decode(&llrs_of(&enc, 8.0), &t, &il, 1).unwrap();
            assert_eq!(decoded, info);
        }
    }

    #[test]
    fn clean_decisions_stable_across_iterations() {
        let t = RscTrellis::standard();
        let il = InterleaverSpec::new(3, 48);
        let mut rng = SplitMix64::new(29);
        let info: BitString = (0..48).map(|_| (rng.next_u64() & 1) as u8).collect();
        let enc = turbo_encode(&info, &t, &il).unwrap();
        let llrs = llrs_of(&enc, 8.0);
        let one = turbo_decode(&llrs, &t, &il, 1).unwrap();
        let six = turbo_decode(&llrs, &t, &il, 6).unwrap();
        assert_eq!(one, info);
        assert_eq!(six, info, "converged decisions must not change");
    }

    #[test]
    fn malformed_length_rejected() {
        let t = RscTrellis::standard();
        let il = InterleaverSpec::new(3, 4);
        assert!(turbo_decode(&[0.0; 17], &t, &il, 1).is_err());
    }

    #[test]
    fn more_iterations_do_not_hurt_at_2db() {
        // Monte Carlo self-comparison on a BPSK-style AWGN channel at
        // Eb/N0 = 2 dB per information bit (so the rate-1/3 redundancy does
        // not push the raw channel into the error-free regime): BER after 6
        // iterations must not exceed BER after 1 iteration over >= 1e5 info
        // bits, and both decoders see identical noise.
        let t = RscTrellis::standard();
        let len = 128usize;
        let il = InterleaverSpec::new(19, len);
        let blocks = 800; // 102_400 info bits
        let rate = 1.0 / 3.0;
        let sigma2 = 1.0 / (2.0 * rate * 10f64.powf(2.0 / 10.0));
        let sigma = sigma2.sqrt();

        let mut rng = SplitMix64::new(0xBE7);
        let mut gauss = move || {
            // Box-Muller from two uniforms.
            let u1 = rng.next_f64().max(1e-12);
            let u2 = rng.next_f64();
            (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
        };

        let mut info_rng = SplitMix64::new(0xFACE);
        let mut errors = [0usize; 2];
        let mut total = 0usize;
        for _ in 0..blocks {
            let info: BitString = (0..len).map(|_| (info_rng.next_u64() & 1) as u8).collect();
            let enc = turbo_encode(&info, &t, &il).unwrap();
            let llrs: Vec<f64> = enc
                .iter()
                .map(|b| {
                    let x = if b == 0 { 1.0 } else { -1.0 };
                    let y = x + sigma * gauss();
                    2.0 * y / sigma2
                })
                .collect();
            for (slot, iters) in [(0usize, 1usize), (1, 6)] {
                let dec = turbo_decode(&llrs, &t, &il, iters).unwrap();
                errors[slot] += hamming_distance(&dec, &info).unwrap();
            }
            total += len;
        }
        assert!(total >= 100_000);
        assert!(
            errors[1] <= errors[0],
            "6 iterations ({}) worse than 1 ({}) over {} bits",
            errors[1],
            errors[0],
            total
        );
        // The comparison is only meaningful if iteration 1 actually errs.
        assert!(errors[0] > 0, "channel too clean to compare");
    }
}
