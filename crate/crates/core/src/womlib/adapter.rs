//! Turning a concentrated-weight code into a constant-weight weak code by
//! flipping a few bits and storing the flip word as the side index.

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use super::{
    check_index, check_len, check_message, check_state, ConcentratedWom, ConcentratedWomParams,
    WeakWom, WeakWomParams, WomError,
};
use crate::permlib::{bounded_count, constant_weight_words, rank_bounded_weight, unrank_bounded_weight, BinaryWord};
use crate::scalar::{floor_mul, Fraction};

fn flip_budget(p: &ConcentratedWomParams) -> usize {
    floor_mul(&p.delta, p.n)
}

/// Encodes with the inner code, then flips the lowest eligible positions so
/// the codeword weight is exactly `floor(w_x n)`. Returns `(x, m_a)`.
pub fn cw_weak_encode<C: ConcentratedWom + ?Sized>(
    inner: &C,
    m: &BigUint,
    s: &BinaryWord,
) -> Result<(BinaryWord, BigUint), WomError> {
    let p = inner.params();
    check_state(s, p.n, &p.w_s)?;
    let x_c = inner
        .encode(m, s)
        .map_err(|e| WomError::InnerEncodeFailure(e.to_string()))?;
    if !x_c.is_below(s) {
        return Err(WomError::InnerContract("codeword is not below the state".into()));
    }
    let target = floor_mul(&p.w_x, p.n);
    let mut a = BinaryWord::zeros(p.n);
    let (need, eligible): (usize, Vec<usize>) = if x_c.weight() <= target {
        let free = (0..p.n).filter(|&j| s.get(j) && !x_c.get(j)).collect();
        (target - x_c.weight(), free)
    } else {
        (x_c.weight() - target, x_c.support())
    };
    let budget = flip_budget(&p);
    if need > budget {
        return Err(WomError::InnerContract(format!(
            "codeword weight {} is {need} away from {target}, beyond the band of {budget}",
            x_c.weight()
        )));
    }
    for &j in eligible.iter().take(need) {
        a.set(j, true);
    }
    let m_a = rank_bounded_weight(&a, budget)?;
    Ok((x_c.xor(&a), m_a))
}

/// Undoes the flips named by `m_a` and decodes with the inner code.
pub fn cw_weak_decode<C: ConcentratedWom + ?Sized>(
    inner: &C,
    x: &BinaryWord,
    m_a: &BigUint,
) -> Result<BigUint, WomError> {
    let p = inner.params();
    check_len(x, p.n)?;
    let budget = flip_budget(&p);
    check_index(m_a, &bounded_count(p.n, budget))?;
    let a = unrank_bounded_weight(p.n, budget, m_a)?;
    inner.decode(&x.xor(&a))
}

/// Weak WOM code wrapping a concentrated one.
#[derive(Debug, Clone)]
pub struct ConstantWeightAdapter<C> {
    inner: C,
}

impl<C: ConcentratedWom> ConstantWeightAdapter<C> {
    pub fn new(inner: C) -> Self {
        Self { inner }
    }

    pub fn inner(&self) -> &C {
        &self.inner
    }
}

impl<C: ConcentratedWom> WeakWom for ConstantWeightAdapter<C> {
    fn params(&self) -> WeakWomParams {
        let p = self.inner.params();
        WeakWomParams {
            n: p.n,
            k_a: bounded_count(p.n, flip_budget(&p)),
            k_w: p.k_c,
            w_s: p.w_s,
            w_x: p.w_x,
        }
    }

    fn encode(&self, m: &BigUint, s: &BinaryWord) -> Result<(BinaryWord, BigUint), WomError> {
        cw_weak_encode(&self.inner, m, s)
    }

    fn decode(&self, x: &BinaryWord, m_a: &BigUint) -> Result<BigUint, WomError> {
        cw_weak_decode(&self.inner, x, m_a)
    }
}

/// Deterministic concentrated code whose codeword weights follow a script.
///
/// The message is the sum of the 1-based one-positions modulo `K_C`, plus 1.
/// The encoder looks up a weight offset from `offsets` (indexed by the
/// message and the state) and returns the lexicographically first word of
/// that weight below the state with the right checksum.
#[derive(Debug, Clone)]
pub struct ScriptedConcentratedWom {
    n: usize,
    k_c: u64,
    w_s: Fraction,
    w_x: Fraction,
    delta: Fraction,
    offsets: Vec<i64>,
}

impl ScriptedConcentratedWom {
    pub fn new(
        n: usize,
        k_c: u64,
        w_s: Fraction,
        w_x: Fraction,
        delta: Fraction,
        offsets: Vec<i64>,
    ) -> Result<Self, WomError> {
        let band = floor_mul(&delta, n) as i64;
        let target = floor_mul(&w_x, n) as i64;
        if k_c == 0 || offsets.is_empty() {
            return Err(WomError::ParamError("need K_C >= 1 and a non-empty script".into()));
        }
        if w_x > w_s || w_s > Fraction::new(1, 1) {
            return Err(WomError::ParamError("need w_x <= w_s <= 1".into()));
        }
        let state = floor_mul(&w_s, n) as i64;
        if offsets
            .iter()
            .any(|o| o.abs() > band || target + o < 0 || target + o > state)
        {
            return Err(WomError::ParamError(format!(
                "offsets {offsets:?} leave the band of {band} around weight {target}"
            )));
        }
        Ok(Self {
            n,
            k_c,
            w_s,
            w_x,
            delta,
            offsets,
        })
    }

    fn checksum(&self, x: &BinaryWord) -> u64 {
        let sum: u64 = x.support().iter().map(|&j| j as u64 + 1).sum();
        sum % self.k_c + 1
    }
}

impl ConcentratedWom for ScriptedConcentratedWom {
    fn params(&self) -> ConcentratedWomParams {
        ConcentratedWomParams {
            n: self.n,
            k_c: BigUint::from(self.k_c),
            w_s: self.w_s,
            w_x: self.w_x,
            delta: self.delta,
        }
    }

    fn encode(&self, m: &BigUint, s: &BinaryWord) -> Result<BinaryWord, WomError> {
        check_message(m, &BigUint::from(self.k_c))?;
        check_state(s, self.n, &self.w_s)?;
        let m = m.to_u64().expect("checked against K_C");
        let support = s.support();
        let salt: u64 = support.iter().map(|&j| j as u64).sum();
        let offset = self.offsets[((m - 1 + salt) % self.offsets.len() as u64) as usize];
        let weight = (floor_mul(&self.w_x, self.n) as i64 + offset) as usize;
        constant_weight_words(support.len(), weight)
            .map(|sub| {
                let mut x = BinaryWord::zeros(self.n);
                for k in sub.support() {
                    x.set(support[k], true);
                }
                x
            })
            .find(|x| self.checksum(x) == m)
            .ok_or_else(|| WomError::EncodeFailure(format!("no weight-{weight} word with checksum {m}")))
    }

    fn decode(&self, x: &BinaryWord) -> Result<BigUint, WomError> {
        check_len(x, self.n)?;
        Ok(BigUint::from(self.checksum(x)))
    }
}
