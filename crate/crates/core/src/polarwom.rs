//! Polar-code WOM encoder: lossy compression of the state through a test
//! channel with randomized successive cancellation (SC), plus a dither.
//!
//! The frozen set carries the message. Its size follows the rate target
//! `C_W - eps_c`, and its members are the least reliable synthetic
//! channels, estimated by genie-aided Monte Carlo.

use std::collections::BTreeMap;
use std::path::Path;

use num_bigint::BigUint;
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::limits::capacity_wom;
use crate::permlib::BinaryWord;
use crate::scalar::{floor_mul, fraction_to_f64, Fraction};
use crate::womlib::{check_message, ConcentratedWom, ConcentratedWomParams, WomError};

/// Log-likelihood ratios are clamped to this magnitude (nats).
pub const LLR_CLAMP: f64 = 40.0;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum PolarError {
    #[error("block length {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("expected length {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("encoding failed: {violations}")]
    EncodeFailure { violations: PolarViolations },
    #[error("invalid parameters: {0}")]
    ParamError(String),
    #[error("frozen-set cache: {0}")]
    Cache(String),
}

/// Why an SC output was rejected.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolarViolations {
    /// Cells with `x = 1` where the state is 0.
    pub cells_above_state: usize,
    pub weight: usize,
    pub weight_in_band: bool,
}

impl std::fmt::Display for PolarViolations {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} cells above the state, weight {} ({})",
            self.cells_above_state,
            self.weight,
            if self.weight_in_band { "in band" } else { "out of band" }
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolarParams {
    pub n: usize,
    pub w_s: Fraction,
    pub w_x: Fraction,
    /// Rate back-off below `C_W`.
    pub eps_c: f64,
    pub beta: f64,
    /// Weight band for the success check.
    pub delta: Fraction,
}

impl PolarParams {
    pub fn new(n: usize, w_s: Fraction, w_x: Fraction, eps_c: f64, delta: Fraction) -> Result<Self, PolarError> {
        if !n.is_power_of_two() {
            return Err(PolarError::NotPowerOfTwo(n));
        }
        if w_x > w_s || w_s > Fraction::new(1, 1) || *w_x.numer() == 0 {
            return Err(PolarError::ParamError("need 0 < w_x <= w_s <= 1".into()));
        }
        if !(0.0..=1.0).contains(&eps_c) {
            return Err(PolarError::ParamError(format!("eps_c = {eps_c}")));
        }
        Ok(Self { n, w_s, w_x, eps_c, beta: 0.25, delta })
    }

    pub fn c_w(&self) -> f64 {
        capacity_wom(fraction_to_f64(&self.w_s), fraction_to_f64(&self.w_x)).expect("weights validated")
    }

    /// Number of message bits, `floor(n (C_W - eps_c))`, never negative.
    pub fn message_bits(&self) -> usize {
        let r = self.c_w() - self.eps_c;
        if r <= 0.0 {
            0
        } else {
            ((self.n as f64 * r) + 1e-9).floor() as usize
        }
    }

    /// `2^{-n^beta} / (2n)`; underflows to zero for practical `n`.
    pub fn delta_n(&self) -> f64 {
        2f64.powf(-(self.n as f64).powf(self.beta)) / (2.0 * self.n as f64)
    }

    fn key(&self, trials: usize, seed: u64) -> String {
        let text = format!(
            "n={};ws={};wx={};bits={};trials={};seed={}",
            self.n,
            self.w_s,
            self.w_x,
            self.message_bits(),
            trials,
            seed
        );
        let digest = Sha256::digest(text.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// `x = u G^{(x) log n}` with `G = [[1,0],[1,1]]`, via butterflies.
pub fn polar_transform(u: &BinaryWord) -> Result<BinaryWord, PolarError> {
    let n = u.len();
    if !n.is_power_of_two() {
        return Err(PolarError::NotPowerOfTwo(n));
    }
    let mut x = u.bits().to_vec();
    transform_in_place(&mut x);
    Ok(BinaryWord::from_bits(x))
}

fn transform_in_place(x: &mut [bool]) {
    let n = x.len();
    let mut h = 1;
    while h < n {
        for block in x.chunks_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter()) {
                *a ^= *b;
            }
        }
        h *= 2;
    }
}

/// `W(s, g | v)`: the table value for `(s, x = g xor v)`.
pub fn test_channel_prob(s: bool, g: bool, v: bool, w_s: f64, w_x: f64) -> f64 {
    match (s, g ^ v) {
        (true, false) => w_s - w_x,
        (true, true) => w_x,
        (false, false) => 1.0 - w_s,
        (false, true) => 0.0,
    }
}

fn clamp(l: f64) -> f64 {
    l.clamp(-LLR_CLAMP, LLR_CLAMP)
}

fn channel_llr(s: bool, g: bool, w_s: f64, w_x: f64) -> f64 {
    let p0 = test_channel_prob(s, g, false, w_s, w_x);
    let p1 = test_channel_prob(s, g, true, w_s, w_x);
    match (p0 > 0.0, p1 > 0.0) {
        (true, true) => clamp((p0 / p1).ln()),
        (true, false) => LLR_CLAMP,
        (false, true) => -LLR_CLAMP,
        (false, false) => 0.0,
    }
}

/// Exact check-node combination in the log domain.
fn boxplus(a: f64, b: f64) -> f64 {
    let sign = if (a < 0.0) ^ (b < 0.0) { -1.0 } else { 1.0 };
    let m = a.abs().min(b.abs());
    clamp(sign * m + (-(a + b).abs()).exp().ln_1p() - (-(a - b).abs()).exp().ln_1p())
}

/// Successive cancellation over channel LLRs. `decide(i, llr_i)` fixes
/// `u_i`; the return value of the top call is `u G`.
struct Sc {
    scratch: Vec<Vec<f64>>,
    out: Vec<bool>,
}

impl Sc {
    fn new(n: usize) -> Self {
        let mut scratch = Vec::new();
        let mut h = n / 2;
        while h >= 1 {
            scratch.push(vec![0.0; h]);
            h /= 2;
        }
        Self { scratch, out: vec![false; n] }
    }

    fn run<D: FnMut(usize, f64) -> bool>(&mut self, llr: &[f64], decide: &mut D) -> &[bool] {
        rec(&mut self.scratch, llr, 0, &mut self.out, decide);
        &self.out
    }
}

fn rec<D: FnMut(usize, f64) -> bool>(
    scratch: &mut [Vec<f64>],
    llr: &[f64],
    base: usize,
    out: &mut [bool],
    decide: &mut D,
) {
    let n = llr.len();
    if n == 1 {
        out[0] = decide(base, llr[0]);
        return;
    }
    let h = n / 2;
    let (cur, rest) = scratch.split_first_mut().expect("one scratch level per halving");
    let (lo, hi) = llr.split_at(h);
    for k in 0..h {
        cur[k] = boxplus(lo[k], hi[k]);
    }
    let (left, right) = out.split_at_mut(h);
    rec(rest, &cur[..h], base, left, decide);
    for k in 0..h {
        cur[k] = clamp(hi[k] + if left[k] { -lo[k] } else { lo[k] });
    }
    rec(rest, &cur[..h], base + h, right, decide);
    for k in 0..h {
        left[k] ^= right[k];
    }
}

const CHUNKS: usize = 64;

/// Per-index unreliability: Monte-Carlo estimate of the Bhattacharyya
/// parameter of each synthetic channel, with the genie supplying the true
/// past bits.
pub fn estimate_unreliability(params: &PolarParams, trials: usize, seed: u64) -> Vec<f64> {
    let n = params.n;
    let (ws, wx) = (fraction_to_f64(&params.w_s), fraction_to_f64(&params.w_x));
    let per_chunk = trials.div_ceil(CHUNKS);
    let sums: Vec<Vec<f64>> = (0..CHUNKS)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64 + 1);
            let mut sc = Sc::new(n);
            let mut acc = vec![0.0; n];
            let count = per_chunk.min(trials.saturating_sub(c * per_chunk));
            let mut u = vec![false; n];
            let mut llr = vec![0.0; n];
            for _ in 0..count {
                for b in u.iter_mut() {
                    *b = rng.gen();
                }
                let mut v = u.clone();
                transform_in_place(&mut v);
                for j in 0..n {
                    let r: f64 = rng.gen();
                    let (s, x) = if r < ws - wx {
                        (true, false)
                    } else if r < ws {
                        (true, true)
                    } else {
                        (false, false)
                    };
                    llr[j] = channel_llr(s, x ^ v[j], ws, wx);
                }
                sc.run(&llr, &mut |i, l| {
                    let signed = if u[i] { -l } else { l };
                    acc[i] += (-signed / 2.0).exp().min(1e6);
                    u[i]
                });
            }
            acc
        })
        .collect();
    let mut total = vec![0.0; n];
    for chunk in &sums {
        for (t, v) in total.iter_mut().zip(chunk) {
            *t += v;
        }
    }
    total.iter().map(|t| t / trials as f64).collect()
}

/// The `message_bits` least reliable indices, ascending.
pub fn build_frozen_set(params: &PolarParams, trials: usize, seed: u64) -> Result<Vec<usize>, PolarError> {
    if trials < 1000 {
        return Err(PolarError::ParamError(format!("{trials} trials, need at least 1000")));
    }
    let z = estimate_unreliability(params, trials, seed);
    Ok(pick_least_reliable(&z, params.message_bits()))
}

fn pick_least_reliable(z: &[f64], count: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..z.len()).collect();
    order.sort_by(|&a, &b| z[b].total_cmp(&z[a]).then(a.cmp(&b)));
    let mut picked = order[..count].to_vec();
    picked.sort_unstable();
    picked
}

/// Frozen-set cache file: parameter hash to index list.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FrozenCache {
    pub schema: u32,
    pub entries: BTreeMap<String, Vec<usize>>,
}

/// Like [`build_frozen_set`], reusing and updating a JSON cache file.
pub fn build_frozen_set_cached(
    params: &PolarParams,
    trials: usize,
    seed: u64,
    path: &Path,
) -> Result<Vec<usize>, PolarError> {
    let mut cache = if path.exists() {
        let text = std::fs::read_to_string(path).map_err(|e| PolarError::Cache(e.to_string()))?;
        serde_json::from_str(&text).map_err(|e| PolarError::Cache(e.to_string()))?
    } else {
        FrozenCache { schema: 1, entries: BTreeMap::new() }
    };
    let key = params.key(trials, seed);
    if let Some(f) = cache.entries.get(&key) {
        return Ok(f.clone());
    }
    let frozen = build_frozen_set(params, trials, seed)?;
    cache.entries.insert(key, frozen.clone());
    let text = serde_json::to_string_pretty(&cache).map_err(|e| PolarError::Cache(e.to_string()))?;
    std::fs::write(path, text).map_err(|e| PolarError::Cache(e.to_string()))?;
    Ok(frozen)
}

/// Uniform dither word derived from a seed (e.g. the block address).
pub fn dither(n: usize, seed: u64) -> BinaryWord {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(u64::MAX);
    BinaryWord::from_bits((0..n).map(|_| rng.gen()).collect())
}

/// Polar WOM codec with a fixed frozen set.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarCode {
    params: PolarParams,
    frozen: Vec<usize>,
    is_frozen: Vec<bool>,
}

impl PolarCode {
    pub fn new(params: PolarParams, frozen: Vec<usize>) -> Result<Self, PolarError> {
        let n = params.n;
        let mut is_frozen = vec![false; n];
        for &i in &frozen {
            if i >= n || is_frozen[i] {
                return Err(PolarError::ParamError(format!("bad frozen index {i}")));
            }
            is_frozen[i] = true;
        }
        let mut frozen = frozen;
        frozen.sort_unstable();
        Ok(Self { params, frozen, is_frozen })
    }

    pub fn params(&self) -> &PolarParams {
        &self.params
    }

    pub fn frozen(&self) -> &[usize] {
        &self.frozen
    }

    fn check_len(&self, len: usize) -> Result<(), PolarError> {
        if len != self.params.n {
            return Err(PolarError::DimensionMismatch { expected: self.params.n, got: len });
        }
        Ok(())
    }

    fn violations(&self, x: &BinaryWord, s: &BinaryWord) -> PolarViolations {
        let above = (0..x.len()).filter(|&j| x.get(j) && !s.get(j)).count();
        let to_ratio = |f: &Fraction| Ratio::new(*f.numer() as i64, *f.denom() as i64);
        let dev = Ratio::new(x.weight() as i64, self.params.n as i64) - to_ratio(&self.params.w_x);
        PolarViolations {
            cells_above_state: above,
            weight: x.weight(),
            weight_in_band: (if dev < Ratio::from_integer(0) { -dev } else { dev }) <= to_ratio(&self.params.delta),
        }
    }

    /// Runs SC with the given decision rule for the non-frozen bits and
    /// returns the pre-check codeword.
    pub fn encode_with<D: FnMut(usize, f64) -> bool>(
        &self,
        m: &[bool],
        s: &BinaryWord,
        g: &BinaryWord,
        mut choose: D,
    ) -> Result<BinaryWord, PolarError> {
        let n = self.params.n;
        self.check_len(s.len())?;
        self.check_len(g.len())?;
        if m.len() != self.frozen.len() {
            return Err(PolarError::DimensionMismatch { expected: self.frozen.len(), got: m.len() });
        }
        let expected = floor_mul(&self.params.w_s, n);
        if s.weight() != expected {
            return Err(PolarError::ParamError(format!("state weight {} != {expected}", s.weight())));
        }
        let (ws, wx) = (fraction_to_f64(&self.params.w_s), fraction_to_f64(&self.params.w_x));
        let llr: Vec<f64> = (0..n).map(|j| channel_llr(s.get(j), g.get(j), ws, wx)).collect();
        let mut msg_pos = vec![usize::MAX; n];
        for (k, &i) in self.frozen.iter().enumerate() {
            msg_pos[i] = k;
        }
        let mut sc = Sc::new(n);
        let v = sc.run(&llr, &mut |i, l| {
            if self.is_frozen[i] {
                m[msg_pos[i]]
            } else {
                choose(i, l)
            }
        });
        Ok(BinaryWord::from_bits(v.iter().zip(g.bits()).map(|(&a, &b)| a ^ b).collect()))
    }

    /// Randomized SC encoding; draws come from a generator keyed by
    /// `(seed, m, s, g)`, so the output is reproducible.
    pub fn encode(&self, m: &[bool], s: &BinaryWord, g: &BinaryWord, seed: u64) -> Result<BinaryWord, PolarError> {
        let mut h = Sha256::new();
        h.update(seed.to_le_bytes());
        for part in [m, s.bits(), g.bits()] {
            h.update((part.len() as u64).to_le_bytes());
            h.update(part.iter().map(|&b| b as u8).collect::<Vec<u8>>());
        }
        let mut rng = ChaCha8Rng::from_seed(h.finalize().into());
        let x = self.encode_with(m, s, g, |_, l| {
            // P(u = 0) = L / (L + 1) with L = e^l
            let p0 = 1.0 / (1.0 + (-l).exp());
            rng.gen::<f64>() >= p0
        })?;
        let violations = self.violations(&x, s);
        if violations.cells_above_state > 0 || !violations.weight_in_band {
            return Err(PolarError::EncodeFailure { violations });
        }
        Ok(x)
    }

    /// `u = transform(x xor g)`, restricted to the frozen set.
    pub fn decode(&self, x: &BinaryWord, g: &BinaryWord) -> Result<Vec<bool>, PolarError> {
        self.check_len(x.len())?;
        self.check_len(g.len())?;
        let u = polar_transform(&x.xor(g))?;
        Ok(self.frozen.iter().map(|&i| u.get(i)).collect())
    }
}

pub fn polar_wom_encode(
    code: &PolarCode,
    m: &[bool],
    s: &BinaryWord,
    g: &BinaryWord,
    seed: u64,
) -> Result<BinaryWord, PolarError> {
    code.encode(m, s, g, seed)
}

pub fn polar_wom_decode(code: &PolarCode, x: &BinaryWord, g: &BinaryWord) -> Result<Vec<bool>, PolarError> {
    code.decode(x, g)
}

/// Polar code as a concentrated WOM code with a fixed dither and seed.
/// Message `m` carries the bits of `m - 1`, least significant first.
#[derive(Debug, Clone)]
pub struct PolarConcentratedWom {
    code: PolarCode,
    dither: BinaryWord,
    seed: u64,
}

impl PolarConcentratedWom {
    pub fn new(code: PolarCode, address: u64, seed: u64) -> Self {
        let dither = dither(code.params.n, address);
        Self { code, dither, seed }
    }

    pub fn code(&self) -> &PolarCode {
        &self.code
    }
}

impl ConcentratedWom for PolarConcentratedWom {
    fn params(&self) -> ConcentratedWomParams {
        let p = &self.code.params;
        ConcentratedWomParams {
            n: p.n,
            k_c: BigUint::from(1u32) << self.code.frozen.len(),
            w_s: p.w_s,
            w_x: p.w_x,
            delta: p.delta,
        }
    }

    fn encode(&self, m: &BigUint, s: &BinaryWord) -> Result<BinaryWord, WomError> {
        check_message(m, &self.params().k_c)?;
        let v = m - 1u32;
        let bits: Vec<bool> = (0..self.code.frozen.len()).map(|i| v.bit(i as u64)).collect();
        self.code
            .encode(&bits, s, &self.dither, self.seed)
            .map_err(|e| WomError::EncodeFailure(e.to_string()))
    }

    fn decode(&self, x: &BinaryWord) -> Result<BigUint, WomError> {
        let bits = self
            .code
            .decode(x, &self.dither)
            .map_err(|_| WomError::BadLength { len: x.len(), n: self.code.params.n })?;
        let mut v = BigUint::from(0u32);
        for (i, &b) in bits.iter().enumerate() {
            v.set_bit(i as u64, b);
        }
        Ok(v + 1u32)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn word(s: &str) -> BinaryWord {
        BinaryWord::parse(s).unwrap()
    }

    #[test]
    fn transform_small() {
        assert_eq!(polar_transform(&word("10")).unwrap(), word("10"));
        assert_eq!(polar_transform(&word("01")).unwrap(), word("11"));
        assert_eq!(polar_transform(&word("0000")).unwrap(), word("0000"));
        assert_eq!(polar_transform(&word("101")), Err(PolarError::NotPowerOfTwo(3)));
    }

    #[test]
    fn channel_table() {
        let (ws, wx) = (0.6, 0.2);
        assert_eq!(test_channel_prob(false, true, false, ws, wx), 0.0);
        assert_eq!(test_channel_prob(true, true, false, ws, wx), wx);
        for v in [false, true] {
            let total: f64 = [(false, false), (false, true), (true, false), (true, true)]
                .iter()
                .map(|&(s, g)| test_channel_prob(s, g, v, ws, wx))
                .sum();
            assert!((total - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn boxplus_matches_definition() {
        for &(a, b) in &[(0.3, -1.2), (2.0, 3.0), (-0.7, -0.1), (10.0, 0.5)] {
            let exact = 2.0 * ((a / 2.0f64).tanh() * (b / 2.0f64).tanh()).atanh();
            assert!((boxplus(a, b) - exact).abs() < 1e-9);
        }
    }

    #[test]
    fn sc_with_genie_reproduces_codeword() {
        let mut sc = Sc::new(8);
        let u = [true, false, true, true, false, false, true, false];
        let v = sc.run(&[0.1; 8], &mut |i, _| u[i]).to_vec();
        let want = polar_transform(&BinaryWord::from_bits(u.to_vec())).unwrap();
        assert_eq!(v, want.bits());
    }

    #[test]
    fn rate_zero_freezes_nothing() {
        let p = PolarParams::new(8, Fraction::new(1, 2), Fraction::new(1, 4), 1.0, Fraction::new(1, 10)).unwrap();
        assert_eq!(p.message_bits(), 0);
        assert!(build_frozen_set(&p, 1000, 1).unwrap().is_empty());
        assert!(build_frozen_set(&p, 10, 1).is_err());
    }

    #[test]
    fn decode_inverts_transform() {
        let p = PolarParams::new(8, Fraction::new(1, 2), Fraction::new(1, 4), 0.0, Fraction::new(1, 10)).unwrap();
        let code = PolarCode::new(p, vec![0, 1, 2, 4]).unwrap();
        let g = dither(8, 3);
        let u = word("10110010");
        let x = polar_transform(&u).unwrap().xor(&g);
        assert_eq!(code.decode(&x, &g).unwrap(), vec![true, false, true, false]);
    }
}
