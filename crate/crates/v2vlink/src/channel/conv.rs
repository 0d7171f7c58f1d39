//! Rate-1/2 convolutional code and soft-decision Viterbi decoding.
//!
//! The standard code uses generator taps g1 = [1 0 1 1] and g2 = [1 1 1 1],
//! where tap i multiplies the input delayed by i steps: with input u_t,
//!
//! ```text
//! y1 = u_t + u_{t-2} + u_{t-3}            (mod 2)
//! y2 = u_t + u_{t-1} + u_{t-2} + u_{t-3}  (mod 2)
//! ```
//!
//! Three delay elements give an 8-state trellis. The encoder appends
//! `memory` zero flush bits, so every codeword terminates in the zero state
//! and the decoder runs over a doubly-terminated trellis.

use crate::bits::BitString;
use crate::channel::ChannelError;

/// Trellis description for a rate-1/2 feedforward convolutional code.
#[derive(Debug, Clone)]
pub struct TrellisSpec {
    g1: Vec<u8>,
    g2: Vec<u8>,
    memory: usize,
    states: usize,
    /// next_state[s][u]
    next_state: Vec<[usize; 2]>,
    /// outputs[s][u] = (y1, y2)
    outputs: Vec<[(u8, u8); 2]>,
}

impl TrellisSpec {
    /// Builds a trellis from generator taps. Both generators must have the
    /// same length; memory is taps-1 delay elements.
    pub fn new(g1: &[u8], g2: &[u8]) -> TrellisSpec {
        assert_eq!(g1.len(), g2.len(), "generators must have equal length");
        assert!(g1.len() >= 2);
        assert!(g1.iter().chain(g2).all(|&t| t <= 1));
        let memory = g1.len() - 1;
        let states = 1 << memory;

        // State s holds (u_{t-1}, .., u_{t-memory}) with u_{t-1} as MSB.
        let mut next_state = vec![[0usize; 2]; states];
        let mut outputs = vec![[(0u8, 0u8); 2]; states];
        for s in 0..states {
            for u in 0..2usize {
                let tap = |g: &[u8]| -> u8 {
                    let mut y = g[0] & u as u8;
                    for i in 1..=memory {
                        let delayed = ((s >> (memory - i)) & 1) as u8;
                        y ^= g[i] & delayed;
                    }
                    y
                };
                outputs[s][u] = (tap(g1), tap(g2));
                next_state[s][u] = (u << (memory - 1)) | (s >> 1);
            }
        }

        TrellisSpec {
            g1: g1.to_vec(),
            g2: g2.to_vec(),
            memory,
            states,
            next_state,
            outputs,
        }
    }

    /// The (2,1,4) code with the fixed generator pair above.
    pub fn standard() -> TrellisSpec {
        TrellisSpec::new(&[1, 0, 1, 1], &[1, 1, 1, 1])
    }

    pub fn memory(&self) -> usize {
        self.memory
    }

    pub fn states(&self) -> usize {
        self.states
    }

    pub fn generators(&self) -> (&[u8], &[u8]) {
        (&self.g1, &self.g2)
    }
}

/// Encodes `info` plus `memory` zero flush bits. Output length is exactly
/// `2 * (len(info) + memory)` and the encoder ends in the zero state.
pub fn conv_encode(info: &BitString, t: &TrellisSpec) -> BitString {
    let mut out = BitString::with_capacity(2 * (info.len() + t.memory));
    let mut state = 0usize;
    for u in info.iter().chain(std::iter::repeat(0).take(t.memory)) {
        let (y1, y2) = t.outputs[state][u as usize];
        out.push(y1);
        out.push(y2);
        state = t.next_state[state][u as usize];
    }
    debug_assert_eq!(state, 0);
    out
}

/// Maximum-likelihood sequence decoding over the terminated trellis.
///
/// `llrs` holds one value per transmitted bit, positive meaning bit 0. The
/// path metric sums the LLRs of output bits decoded as 1, which is exactly
/// the (negated, shifted) log-likelihood, so the minimum-cost path is the ML
/// codeword. Flush steps admit only the zero input; traceback starts at the
/// zero state. Returns the info bits with the flush bits stripped.
pub fn viterbi_decode(llrs: &[f64], t: &TrellisSpec) -> Result<BitString, ChannelError> {
    if llrs.len() % 2 != 0 {
        return Err(ChannelError::MalformedLength {
            got: llrs.len(),
            reason: "LLR count must be even for a rate-1/2 code".into(),
        });
    }
    let steps = llrs.len() / 2;
    if steps < t.memory {
        return Err(ChannelError::MalformedLength {
            got: llrs.len(),
            reason: format!("need at least {} LLRs for the flush bits", 2 * t.memory),
        });
    }
    let info_len = steps - t.memory;

    let mut metric = vec![f64::INFINITY; t.states];
    metric[0] = 0.0;
    // survivor[k][s] = (previous state, input) of the best path into s.
    let mut survivor = vec![vec![(0u8, 0u8); t.states]; steps];

    for k in 0..steps {
        let (l1, l2) = (llrs[2 * k], llrs[2 * k + 1]);
        let inputs: &[usize] = if k < info_len { &[0, 1] } else { &[0] };
        let mut next = vec![f64::INFINITY; t.states];
        for s in 0..t.states {
            if metric[s].is_infinite() {
                continue;
            }
            for &u in inputs {
                let (y1, y2) = t.outputs[s][u];
                let cost = metric[s]
                    + if y1 == 1 { l1 } else { 0.0 }
                    + if y2 == 1 { l2 } else { 0.0 };
                let ns = t.next_state[s][u];
                if cost < next[ns] {
                    next[ns] = cost;
                    survivor[k][ns] = (s as u8, u as u8);
                }
            }
        }
        metric = next;
    }

    let mut decoded = vec![0u8; steps];
    let mut state = 0usize; // terminated
    for k in (0..steps).rev() {
        let (prev, input) = survivor[k][state];
        decoded[k] = input;
        state = prev as usize;
    }
    Ok(decoded[..info_len].iter().copied().collect())
}
