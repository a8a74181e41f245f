//! Concatenated constant-weight WOM code from the affine hash family
//! `x -> (a x + b)` over GF(2^n), truncated to its leading bits.
//!
//! Blocks form a `t1 x t2` matrix. All blocks of column `j` share one hash
//! index `m_a[j]`, found by brute force. Hash index `i` in `[1, 2^{2n}]`
//! names the pair `a = (i-1) >> n`, `b = (i-1) mod 2^n`.

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::gf2n::{irreducible_poly, mul_raw};
use super::{
    check_len, check_message, check_state, join_mixed_radix, split_mixed_radix, to_u64,
    ConcatWom, ConcatWomParams, Gf2nElement, WomError,
};
use crate::limits::{capacity_wom, LimitsError};
use crate::permlib::{constant_weight_words, BinaryWord};
use crate::scalar::{floor_mul, fraction_to_f64, Fraction};

/// Field value of a word: bit `j` of the word is the coefficient of `x^j`.
fn word_value(x: &BinaryWord) -> u32 {
    x.bits()
        .iter()
        .enumerate()
        .fold(0, |acc, (j, &b)| acc | (u32::from(b) << j))
}

/// The pair `(a, b)` named by hash index `idx`.
pub fn hash_pair(idx: u64, n: u32) -> Result<(Gf2nElement, Gf2nElement), WomError> {
    if idx == 0 || idx > 1u64 << (2 * n) {
        return Err(WomError::IndexOutOfRange {
            m_a: BigUint::from(idx),
            count: BigUint::from(1u64 << (2 * n)),
        });
    }
    let raw = idx - 1;
    let mask = (1u64 << n) - 1;
    Ok((
        Gf2nElement::new((raw >> n) as u32, n)?,
        Gf2nElement::new((raw & mask) as u32, n)?,
    ))
}

fn check_kl(n: u32, k: usize, l: usize) -> Result<(), WomError> {
    if l > k || k > n as usize {
        return Err(WomError::ParamError(format!("need l <= k <= n, got l={l}, k={k}, n={n}")));
    }
    Ok(())
}

/// Leading `k - l` bits of `a x + b` as an integer.
pub fn hash_value(ha: &(Gf2nElement, Gf2nElement), k: usize, l: usize, x: &BinaryWord) -> Result<u32, WomError> {
    let (a, b) = ha;
    let n = a.degree();
    if b.degree() != n {
        return Err(WomError::DegreeMismatch(n, b.degree()));
    }
    check_kl(n, k, l)?;
    check_len(x, n as usize)?;
    let v = mul_raw(a.value(), word_value(x), n, a.modulus()) ^ b.value();
    let width = (k - l) as u32;
    Ok(if width == 0 { 0 } else { v >> (n - width) })
}

/// Leading `k - l` bits of `a x + b`, most significant first.
pub fn hash_eval(ha: &(Gf2nElement, Gf2nElement), k: usize, l: usize, x: &BinaryWord) -> Result<BinaryWord, WomError> {
    let v = hash_value(ha, k, l, x)?;
    let width = k - l;
    Ok(BinaryWord::from_bits(
        (0..width).map(|t| v >> (width - 1 - t) & 1 == 1).collect(),
    ))
}

/// Hash-based concatenated WOM code. Each block carries `k` message bits,
/// using the family with parameters `(n, k + l, l)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HashWom {
    pub n: usize,
    pub t1: usize,
    pub t2: usize,
    pub k: usize,
    pub l: usize,
    pub w_s: Fraction,
    pub w_x: Fraction,
}

/// Output of [`hash_wom_encode`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HashWomEncoding {
    /// `x[i][j]` is the codeword of block `(i, j)`.
    pub x: Vec<Vec<BinaryWord>>,
    /// Hash index per column.
    pub m_a: Vec<u64>,
}

impl HashWom {
    pub fn new(n: usize, t1: usize, t2: usize, k: usize, l: usize, w_s: Fraction, w_x: Fraction) -> Result<Self, WomError> {
        irreducible_poly(n as u32)?;
        check_kl(n as u32, k + l, l)?;
        if t1 == 0 || t2 == 0 || w_x > w_s || w_s > Fraction::new(1, 1) {
            return Err(WomError::ParamError("need t1, t2 >= 1 and w_x <= w_s <= 1".into()));
        }
        if 2 * n > 40 {
            return Err(WomError::ParamError(format!("n = {n} makes the hash search too large")));
        }
        Ok(Self { n, t1, t2, k, l, w_s, w_x })
    }

    pub fn index_count(&self) -> u64 {
        1u64 << (2 * self.n)
    }

    fn degree(&self) -> u32 {
        self.n as u32
    }

    /// `R_W = (t1 k - 2n) / (n t1)`.
    pub fn rate(&self) -> f64 {
        (self.t1 * self.k) as f64 / (self.n * self.t1) as f64 - 2.0 / self.t1 as f64
    }

    fn block_radices(&self) -> Vec<BigUint> {
        vec![BigUint::from(1u64 << self.k); self.t1 * self.t2]
    }

    fn index_radices(&self) -> Vec<BigUint> {
        vec![BigUint::from(self.index_count()); self.t2]
    }
}

fn check_shape<T>(m: &[Vec<T>], t1: usize, t2: usize, what: &str) -> Result<(), WomError> {
    if m.len() != t1 || m.iter().any(|row| row.len() != t2) {
        return Err(WomError::ShapeMismatch(format!("{what} is not {t1} x {t2}")));
    }
    Ok(())
}

/// Searches, per column, the smallest hash index for which every block has
/// an eligible codeword hashing to its message. Messages are 1-based values
/// in `[1, 2^k]`.
pub fn hash_wom_encode(code: &HashWom, m: &[Vec<u64>], s: &[Vec<BinaryWord>]) -> Result<HashWomEncoding, WomError> {
    check_shape(m, code.t1, code.t2, "message matrix")?;
    check_shape(s, code.t1, code.t2, "state matrix")?;
    let k_b = BigUint::from(1u64 << code.k);
    let weight = floor_mul(&code.w_x, code.n);
    let mut x = vec![vec![BinaryWord::zeros(code.n); code.t2]; code.t1];
    let mut m_a = Vec::with_capacity(code.t2);
    for j in 0..code.t2 {
        let mut eligible = Vec::with_capacity(code.t1);
        for i in 0..code.t1 {
            check_message(&BigUint::from(m[i][j]), &k_b)?;
            check_state(&s[i][j], code.n, &code.w_s)?;
            let support = s[i][j].support();
            let words: Vec<(BinaryWord, u32)> = constant_weight_words(support.len(), weight)
                .map(|sub| {
                    let mut w = BinaryWord::zeros(code.n);
                    for p in sub.support() {
                        w.set(support[p], true);
                    }
                    let v = word_value(&w);
                    (w, v)
                })
                .collect();
            eligible.push(words);
        }
        let degree = code.degree();
        let modulus = irreducible_poly(degree)?;
        let mask = (1u64 << code.n) - 1;
        let width = code.k as u32;
        let pick = |idx: u64| -> Option<Vec<usize>> {
            let raw = idx - 1;
            let (a, b) = ((raw >> code.n) as u32, (raw & mask) as u32);
            eligible
                .iter()
                .enumerate()
                .map(|(i, words)| {
                    let want = (m[i][j] - 1) as u32;
                    words.iter().position(|(_, v)| {
                        let h = mul_raw(a, *v, degree, modulus) ^ b;
                        (if width == 0 { 0 } else { h >> (degree - width) }) == want
                    })
                })
                .collect()
        };
        let found = (1..=code.index_count())
            .into_par_iter()
            .find_first(|&idx| pick(idx).is_some())
            .ok_or(WomError::NoEncoding {
                column: j,
                searched: code.index_count(),
            })?;
        for (i, p) in pick(found).expect("index was accepted").into_iter().enumerate() {
            x[i][j] = eligible[i][p].0.clone();
        }
        m_a.push(found);
    }
    Ok(HashWomEncoding { x, m_a })
}

/// Evaluates the column hash on every block.
pub fn hash_wom_decode(code: &HashWom, x: &[Vec<BinaryWord>], m_a: &[u64]) -> Result<Vec<Vec<u64>>, WomError> {
    check_shape(x, code.t1, code.t2, "codeword matrix")?;
    if m_a.len() != code.t2 {
        return Err(WomError::ShapeMismatch(format!("{} hash indices for t2 = {}", m_a.len(), code.t2)));
    }
    let pairs = m_a
        .iter()
        .map(|&idx| hash_pair(idx, code.degree()))
        .collect::<Result<Vec<_>, _>>()?;
    x.iter()
        .map(|row| {
            row.iter()
                .zip(&pairs)
                .map(|(w, ha)| Ok(u64::from(hash_value(ha, code.k + code.l, code.l, w)?) + 1))
                .collect()
        })
        .collect()
}

impl ConcatWom for HashWom {
    fn params(&self) -> ConcatWomParams {
        ConcatWomParams {
            n: self.n,
            t1: self.t1,
            t2: self.t2,
            t: self.t1 * self.t2,
            k_w: BigUint::from(1u32) << (self.k * self.t1 * self.t2),
            k_a: BigUint::from(1u32) << (2 * self.n * self.t2),
            w_s: self.w_s,
            w_x: self.w_x,
            k: self.k,
            l: self.l,
        }
    }

    /// Block `b` of the flat slice is matrix entry `(b mod t1, b / t1)`.
    fn encode(&self, m: &BigUint, s: &[BinaryWord]) -> Result<(Vec<BinaryWord>, BigUint), WomError> {
        let p = self.params();
        check_message(m, &p.k_w)?;
        if s.len() != p.t {
            return Err(WomError::ShapeMismatch(format!("{} blocks for t = {}", s.len(), p.t)));
        }
        let digits = split_mixed_radix(m, &self.block_radices());
        let mut mm = vec![vec![0u64; self.t2]; self.t1];
        let mut ss = vec![vec![BinaryWord::zeros(0); self.t2]; self.t1];
        for (b, (d, st)) in digits.iter().zip(s).enumerate() {
            mm[b % self.t1][b / self.t1] = to_u64(d);
            ss[b % self.t1][b / self.t1] = st.clone();
        }
        let enc = hash_wom_encode(self, &mm, &ss)?;
        let flat = (0..p.t).map(|b| enc.x[b % self.t1][b / self.t1].clone()).collect();
        let idx: Vec<BigUint> = enc.m_a.iter().map(|&v| BigUint::from(v)).collect();
        Ok((flat, join_mixed_radix(&idx, &self.index_radices())))
    }

    fn decode(&self, x: &[BinaryWord], m_a: &BigUint) -> Result<BigUint, WomError> {
        let p = self.params();
        if x.len() != p.t {
            return Err(WomError::ShapeMismatch(format!("{} blocks for t = {}", x.len(), p.t)));
        }
        super::check_index(m_a, &p.k_a)?;
        let idx: Vec<u64> = split_mixed_radix(m_a, &self.index_radices()).iter().map(to_u64).collect();
        let mut xx = vec![vec![BinaryWord::zeros(0); self.t2]; self.t1];
        for (b, w) in x.iter().enumerate() {
            xx[b % self.t1][b / self.t1] = w.clone();
        }
        let mm = hash_wom_decode(self, &xx, &idx)?;
        let digits: Vec<BigUint> = (0..p.t).map(|b| BigUint::from(mm[b % self.t1][b / self.t1])).collect();
        Ok(join_mixed_radix(&digits, &self.block_radices()))
    }
}

/// Rate bookkeeping for the asymptotic parameter recipe, evaluated
/// numerically. `t2` is only reported through its logarithm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HashRateReport {
    pub eps: f64,
    pub c: f64,
    pub n: usize,
    pub k: usize,
    pub l: usize,
    pub t1: u64,
    pub log2_t2: f64,
    pub rate: f64,
    pub c_w: f64,
    /// `rate > c_w - eps`.
    pub meets_bound: bool,
}

impl HashRateReport {
    /// `n = ceil((c/eps) log2(1/eps))`, `k = floor(n (C_W - 2 eps/3))`,
    /// `l = ceil(eps n / 3)`, `t1 = floor(eps^{-c/12} - 1)`, `log2 t2 = 4n/delta`.
    pub fn from_recipe(eps: f64, c: f64, delta: f64, w_s: &Fraction, w_x: &Fraction) -> Result<Self, LimitsError> {
        if !(eps > 0.0 && eps <= 0.5 && c > 20.0 && delta > 0.0) {
            return Err(LimitsError::DomainError(format!("eps = {eps}, c = {c}, delta = {delta}")));
        }
        let c_w = capacity_wom(fraction_to_f64(w_s), fraction_to_f64(w_x))?;
        let n = ((c / eps) * (1.0 / eps).log2()).ceil() as usize;
        let k = (n as f64 * (c_w - 2.0 * eps / 3.0)).floor() as usize;
        let l = (eps * n as f64 / 3.0).ceil() as usize;
        let t1 = ((1.0 / eps).powf(c / 12.0) - 1.0).floor() as u64;
        let rate = (t1 as f64 * k as f64 - 2.0 * n as f64) / (n as f64 * t1 as f64);
        Ok(Self {
            eps,
            c,
            n,
            k,
            l,
            t1,
            log2_t2: 4.0 * n as f64 / delta,
            rate,
            c_w,
            meets_bound: rate > c_w - eps,
        })
    }
}
