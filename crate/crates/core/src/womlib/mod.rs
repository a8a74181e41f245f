//! Write-once-memory (WOM) ingredient codes.
//!
//! A WOM encoder gets a message and a state word `s` and returns a codeword
//! `x <= s`. Four contracts are modelled:
//!
//! * [`StrongWom`]: exact codeword weight, decodable from `x` alone.
//! * [`WeakWom`]: exact weight, decoding also needs a side index `m_a`.
//! * [`ConcentratedWom`]: codeword weight only within a `delta` band.
//! * [`ConcatWom`]: `t` inner blocks that share side indices.
//!
//! Messages and side indices are 1-based big integers.

mod adapter;
mod gf2n;
mod hash;
mod table;

pub use adapter::{cw_weak_decode, cw_weak_encode, ConstantWeightAdapter, ScriptedConcentratedWom};
pub use gf2n::{gf2n_mul, irreducible_poly, Gf2nElement, IRREDUCIBLE_POLYS};
pub use hash::{
    hash_eval, hash_pair, hash_value, hash_wom_decode, hash_wom_encode, HashRateReport, HashWom,
    HashWomEncoding,
};
pub use table::{example_table, example_wom_decode, example_wom_encode, Example3Wom, WomTable};

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::permlib::{BinaryWord, PermError};
use crate::scalar::{floor_mul, Fraction};

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum WomError {
    #[error("message {m} outside [1, {count}]")]
    MessageOutOfRange { m: BigUint, count: BigUint },
    #[error("side index {m_a} outside [1, {count}]")]
    IndexOutOfRange { m_a: BigUint, count: BigUint },
    #[error("state has length {len} and weight {weight}, expected length {n} and weight {expected}")]
    BadState {
        len: usize,
        weight: usize,
        n: usize,
        expected: usize,
    },
    #[error("word has length {len}, expected {n}")]
    BadLength { len: usize, n: usize },
    #[error("inner encoder failed: {0}")]
    InnerEncodeFailure(String),
    #[error("inner encoder broke its contract: {0}")]
    InnerContract(String),
    #[error("encoder failed: {0}")]
    EncodeFailure(String),
    #[error("field degrees differ: {0} vs {1}")]
    DegreeMismatch(u32, u32),
    #[error("no irreducible polynomial on file for degree {0}")]
    UnsupportedDegree(u32),
    #[error("invalid parameters: {0}")]
    ParamError(String),
    #[error("no hash index works for column {column} after searching {searched} indices")]
    NoEncoding { column: usize, searched: u64 },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error(transparent)]
    Perm(#[from] PermError),
}

/// Parameters of a constant-weight strong WOM code.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrongWomParams {
    pub n: usize,
    #[serde(with = "crate::bigser")]
    pub k_w: BigUint,
    pub w_s: Fraction,
    pub w_x: Fraction,
}

/// Parameters of a constant-weight weak WOM code.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeakWomParams {
    pub n: usize,
    #[serde(with = "crate::bigser")]
    pub k_w: BigUint,
    #[serde(with = "crate::bigser")]
    pub k_a: BigUint,
    pub w_s: Fraction,
    pub w_x: Fraction,
}

impl WeakWomParams {
    /// `(1/n) log2(K_W / K_a)`.
    pub fn rate(&self) -> f64 {
        (crate::limits::log2_big(&self.k_w) - crate::limits::log2_big(&self.k_a)) / self.n as f64
    }
}

/// Parameters of a concentrated-weight WOM code.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConcentratedWomParams {
    pub n: usize,
    #[serde(with = "crate::bigser")]
    pub k_c: BigUint,
    pub w_s: Fraction,
    pub w_x: Fraction,
    pub delta: Fraction,
}

/// Parameters of a constant-weight concatenated WOM code.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConcatWomParams {
    /// Inner block length.
    pub n: usize,
    pub t1: usize,
    pub t2: usize,
    /// `t1 * t2`.
    pub t: usize,
    #[serde(with = "crate::bigser")]
    pub k_w: BigUint,
    #[serde(with = "crate::bigser")]
    pub k_a: BigUint,
    pub w_s: Fraction,
    pub w_x: Fraction,
    /// Message bits per block.
    pub k: usize,
    /// Hash truncation slack.
    pub l: usize,
}

fn state_weight(n: usize, w_s: &Fraction) -> usize {
    floor_mul(w_s, n)
}

pub trait StrongWom: Send + Sync {
    fn params(&self) -> StrongWomParams;
    fn encode(&self, m: &BigUint, s: &BinaryWord) -> Result<BinaryWord, WomError>;
    fn decode(&self, x: &BinaryWord) -> Result<BigUint, WomError>;
}

pub trait WeakWom: Send + Sync {
    fn params(&self) -> WeakWomParams;
    fn encode(&self, m: &BigUint, s: &BinaryWord) -> Result<(BinaryWord, BigUint), WomError>;
    fn decode(&self, x: &BinaryWord, m_a: &BigUint) -> Result<BigUint, WomError>;
}

pub trait ConcentratedWom: Send + Sync {
    fn params(&self) -> ConcentratedWomParams;
    fn encode(&self, m: &BigUint, s: &BinaryWord) -> Result<BinaryWord, WomError>;
    fn decode(&self, x: &BinaryWord) -> Result<BigUint, WomError>;
}

/// Blocks are passed as a flat slice of length `t`.
pub trait ConcatWom: Send + Sync {
    fn params(&self) -> ConcatWomParams;
    fn encode(&self, m: &BigUint, s: &[BinaryWord]) -> Result<(Vec<BinaryWord>, BigUint), WomError>;
    fn decode(&self, x: &[BinaryWord], m_a: &BigUint) -> Result<BigUint, WomError>;
}

impl<W: StrongWom + ?Sized> StrongWom for Box<W> {
    fn params(&self) -> StrongWomParams {
        (**self).params()
    }
    fn encode(&self, m: &BigUint, s: &BinaryWord) -> Result<BinaryWord, WomError> {
        (**self).encode(m, s)
    }
    fn decode(&self, x: &BinaryWord) -> Result<BigUint, WomError> {
        (**self).decode(x)
    }
}

impl<W: WeakWom + ?Sized> WeakWom for Box<W> {
    fn params(&self) -> WeakWomParams {
        (**self).params()
    }
    fn encode(&self, m: &BigUint, s: &BinaryWord) -> Result<(BinaryWord, BigUint), WomError> {
        (**self).encode(m, s)
    }
    fn decode(&self, x: &BinaryWord, m_a: &BigUint) -> Result<BigUint, WomError> {
        (**self).decode(x, m_a)
    }
}

impl<W: ConcentratedWom + ?Sized> ConcentratedWom for Box<W> {
    fn params(&self) -> ConcentratedWomParams {
        (**self).params()
    }
    fn encode(&self, m: &BigUint, s: &BinaryWord) -> Result<BinaryWord, WomError> {
        (**self).encode(m, s)
    }
    fn decode(&self, x: &BinaryWord) -> Result<BigUint, WomError> {
        (**self).decode(x)
    }
}

impl<W: ConcatWom + ?Sized> ConcatWom for Box<W> {
    fn params(&self) -> ConcatWomParams {
        (**self).params()
    }
    fn encode(&self, m: &BigUint, s: &[BinaryWord]) -> Result<(Vec<BinaryWord>, BigUint), WomError> {
        (**self).encode(m, s)
    }
    fn decode(&self, x: &[BinaryWord], m_a: &BigUint) -> Result<BigUint, WomError> {
        (**self).decode(x, m_a)
    }
}

/// Strong code viewed as a weak code with a single side index.
#[derive(Debug, Clone)]
pub struct StrongAsWeak<W>(pub W);

impl<W: StrongWom> WeakWom for StrongAsWeak<W> {
    fn params(&self) -> WeakWomParams {
        let p = self.0.params();
        WeakWomParams {
            n: p.n,
            k_w: p.k_w,
            k_a: BigUint::one(),
            w_s: p.w_s,
            w_x: p.w_x,
        }
    }

    fn encode(&self, m: &BigUint, s: &BinaryWord) -> Result<(BinaryWord, BigUint), WomError> {
        Ok((self.0.encode(m, s)?, BigUint::one()))
    }

    fn decode(&self, x: &BinaryWord, m_a: &BigUint) -> Result<BigUint, WomError> {
        check_index(m_a, &BigUint::one())?;
        self.0.decode(x)
    }
}

/// Weak code viewed as a concatenated code with one block.
#[derive(Debug, Clone)]
pub struct SingleBlock<W>(pub W);

impl<W: WeakWom> ConcatWom for SingleBlock<W> {
    fn params(&self) -> ConcatWomParams {
        let p = self.0.params();
        ConcatWomParams {
            n: p.n,
            t1: 1,
            t2: 1,
            t: 1,
            k_w: p.k_w,
            k_a: p.k_a,
            w_s: p.w_s,
            w_x: p.w_x,
            k: 0,
            l: 0,
        }
    }

    fn encode(&self, m: &BigUint, s: &[BinaryWord]) -> Result<(Vec<BinaryWord>, BigUint), WomError> {
        if s.len() != 1 {
            return Err(WomError::ShapeMismatch(format!("{} blocks for t = 1", s.len())));
        }
        let (x, m_a) = self.0.encode(m, &s[0])?;
        Ok((vec![x], m_a))
    }

    fn decode(&self, x: &[BinaryWord], m_a: &BigUint) -> Result<BigUint, WomError> {
        if x.len() != 1 {
            return Err(WomError::ShapeMismatch(format!("{} blocks for t = 1", x.len())));
        }
        self.0.decode(&x[0], m_a)
    }
}

pub(crate) fn check_message(m: &BigUint, count: &BigUint) -> Result<(), WomError> {
    if m.is_zero() || m > count {
        return Err(WomError::MessageOutOfRange {
            m: m.clone(),
            count: count.clone(),
        });
    }
    Ok(())
}

pub(crate) fn check_index(m_a: &BigUint, count: &BigUint) -> Result<(), WomError> {
    if m_a.is_zero() || m_a > count {
        return Err(WomError::IndexOutOfRange {
            m_a: m_a.clone(),
            count: count.clone(),
        });
    }
    Ok(())
}

pub(crate) fn check_state(s: &BinaryWord, n: usize, w_s: &Fraction) -> Result<(), WomError> {
    let expected = state_weight(n, w_s);
    if s.len() != n || s.weight() != expected {
        return Err(WomError::BadState {
            len: s.len(),
            weight: s.weight(),
            n,
            expected,
        });
    }
    Ok(())
}

pub(crate) fn check_len(x: &BinaryWord, n: usize) -> Result<(), WomError> {
    if x.len() != n {
        return Err(WomError::BadLength { len: x.len(), n });
    }
    Ok(())
}

/// Splits the 1-based index `m` into 1-based digits of the given radices,
/// least significant first.
pub fn split_mixed_radix(m: &BigUint, radices: &[BigUint]) -> Vec<BigUint> {
    let mut rest = m - 1u32;
    radices
        .iter()
        .map(|r| {
            let d = &rest % r;
            rest = &rest / r;
            d + 1u32
        })
        .collect()
}

/// Inverse of [`split_mixed_radix`].
pub fn join_mixed_radix(digits: &[BigUint], radices: &[BigUint]) -> BigUint {
    let mut acc = BigUint::zero();
    for (d, r) in digits.iter().zip(radices).rev() {
        acc = acc * r + (d - 1u32);
    }
    acc + 1u32
}

pub(crate) fn to_u64(v: &BigUint) -> u64 {
    v.to_u64().expect("value fits in 64 bits")
}
