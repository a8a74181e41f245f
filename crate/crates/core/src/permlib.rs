//! Multiset permutations, characteristic vectors and enumerative codes.
//!
//! Cells are 0-based positions. Ranks and enumerative indices are 1-based,
//! so `unrank_perm(spec, 1)` is the lexicographically first permutation.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigUint;
use num_integer::binomial;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::{floor_mul, Fraction};

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum PermError {
    #[error("multiset spec needs at least one rank and positive multiplicities")]
    InvalidSpec,
    #[error("index {idx} outside [1, {count}]")]
    IndexOutOfRange { idx: BigUint, count: BigUint },
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("word weight {weight} exceeds bound {max}")]
    WeightTooHigh { weight: usize, max: usize },
    #[error("cell {cell} outside [0, {n})")]
    CellOutOfRange { cell: usize, n: usize },
}

/// The multiset `{base^{mult[0]}, (base+1)^{mult[1]}, ...}`.
///
/// `base` is 1 for ordinary rank multisets; enumerative codes over upper
/// ranks (e.g. `{2,2,3,3}`) use a larger base.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MultisetSpec {
    base: usize,
    mult: Vec<usize>,
}

impl MultisetSpec {
    pub fn new(mult: Vec<usize>) -> Result<Self, PermError> {
        Self::with_base(1, mult)
    }

    pub fn with_base(base: usize, mult: Vec<usize>) -> Result<Self, PermError> {
        if mult.is_empty() || mult.contains(&0) || base == 0 {
            return Err(PermError::InvalidSpec);
        }
        Ok(Self { base, mult })
    }

    /// `{1^z, ..., q^z}`.
    pub fn uniform(q: usize, z: usize) -> Result<Self, PermError> {
        Self::new(vec![z; q])
    }

    pub fn q(&self) -> usize {
        self.mult.len()
    }

    pub fn n(&self) -> usize {
        self.mult.iter().sum()
    }

    pub fn base(&self) -> usize {
        self.base
    }

    pub fn mult(&self) -> &[usize] {
        &self.mult
    }

    /// Largest label in the multiset.
    pub fn top(&self) -> usize {
        self.base + self.mult.len() - 1
    }

    /// Multiplicity of `label`, zero when the label is outside the multiset.
    pub fn mult_of(&self, label: usize) -> usize {
        if label < self.base || label > self.top() {
            0
        } else {
            self.mult[label - self.base]
        }
    }

    /// `Some(z)` if every rank has the same multiplicity.
    pub fn uniform_z(&self) -> Option<usize> {
        let z = self.mult[0];
        self.mult.iter().all(|&m| m == z).then_some(z)
    }

    /// Sorted inverse form, i.e. the lexicographically first element.
    pub fn first_inv(&self) -> Vec<usize> {
        self.mult
            .iter()
            .enumerate()
            .flat_map(|(i, &m)| std::iter::repeat(self.base + i).take(m))
            .collect()
    }
}

/// Multiset permutation in inverse form: `inv[j]` is the rank of cell `j`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MsPermutation {
    spec: MultisetSpec,
    inv: Vec<usize>,
}

impl MsPermutation {
    pub fn new(spec: MultisetSpec, inv: Vec<usize>) -> Result<Self, PermError> {
        if inv.len() != spec.n() {
            return Err(PermError::InvalidPermutation(format!(
                "length {} but spec has n = {}",
                inv.len(),
                spec.n()
            )));
        }
        let mut counts = vec![0usize; spec.q()];
        for &v in &inv {
            if v < spec.base || v > spec.top() {
                return Err(PermError::InvalidPermutation(format!(
                    "label {v} outside [{}, {}]",
                    spec.base,
                    spec.top()
                )));
            }
            counts[v - spec.base] += 1;
        }
        if counts != spec.mult {
            return Err(PermError::InvalidPermutation(format!(
                "multiplicities {counts:?} differ from {:?}",
                spec.mult
            )));
        }
        Ok(Self { spec, inv })
    }

    /// Permutation of `{1^z, ..., q^z}`.
    pub fn uniform(q: usize, z: usize, inv: Vec<usize>) -> Result<Self, PermError> {
        Self::new(MultisetSpec::uniform(q, z)?, inv)
    }

    /// Infers the spec from the labels, which must cover `1..=max` with
    /// every label present.
    pub fn from_inv(inv: Vec<usize>) -> Result<Self, PermError> {
        let q = inv.iter().copied().max().unwrap_or(0);
        if q == 0 || inv.contains(&0) {
            return Err(PermError::InvalidPermutation("ranks start at 1".into()));
        }
        let mut mult = vec![0usize; q];
        for &v in &inv {
            mult[v - 1] += 1;
        }
        let spec = MultisetSpec::new(mult)
            .map_err(|_| PermError::InvalidPermutation("some rank is unused".into()))?;
        Ok(Self { spec, inv })
    }

    pub fn spec(&self) -> &MultisetSpec {
        &self.spec
    }

    pub fn inv(&self) -> &[usize] {
        &self.inv
    }

    pub fn into_inv(self) -> Vec<usize> {
        self.inv
    }

    pub fn n(&self) -> usize {
        self.inv.len()
    }

    pub fn q(&self) -> usize {
        self.spec.q()
    }

    /// Cells with rank `i`, ascending.
    pub fn cells_of_rank(&self, i: usize) -> Vec<usize> {
        (0..self.inv.len()).filter(|&j| self.inv[j] == i).collect()
    }
}

impl fmt::Display for MsPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_csv(f, &self.inv)
    }
}

fn write_csv(f: &mut fmt::Formatter<'_>, v: &[usize]) -> fmt::Result {
    for (k, x) in v.iter().enumerate() {
        if k > 0 {
            f.write_str(",")?;
        }
        write!(f, "{x}")?;
    }
    Ok(())
}

/// Bit vector with cached Hamming weight.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BinaryWord {
    bits: Vec<bool>,
    weight: usize,
}

impl BinaryWord {
    pub fn zeros(n: usize) -> Self {
        Self {
            bits: vec![false; n],
            weight: 0,
        }
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        let weight = bits.iter().filter(|&&b| b).count();
        Self { bits, weight }
    }

    /// Parses a string of `0`/`1` characters.
    pub fn parse(s: &str) -> Option<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Some(false),
                '1' => Some(true),
                _ => None,
            })
            .collect::<Option<Vec<_>>>()
            .map(Self::from_bits)
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn weight(&self) -> usize {
        self.weight
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn get(&self, j: usize) -> bool {
        self.bits[j]
    }

    pub fn set(&mut self, j: usize, v: bool) {
        if self.bits[j] != v {
            self.bits[j] = v;
            if v {
                self.weight += 1;
            } else {
                self.weight -= 1;
            }
        }
    }

    /// Positions holding a one, ascending.
    pub fn support(&self) -> Vec<usize> {
        (0..self.bits.len()).filter(|&j| self.bits[j]).collect()
    }

    /// Componentwise `self <= other`. Lengths must agree.
    pub fn is_below(&self, other: &BinaryWord) -> bool {
        self.bits.len() == other.bits.len()
            && self.bits.iter().zip(&other.bits).all(|(&a, &b)| !a || b)
    }

    pub fn xor(&self, other: &BinaryWord) -> BinaryWord {
        assert_eq!(self.len(), other.len(), "xor of words with different lengths");
        Self::from_bits(
            self.bits
                .iter()
                .zip(&other.bits)
                .map(|(&a, &b)| a ^ b)
                .collect(),
        )
    }
}

impl fmt::Display for BinaryWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// `|S_M| = n! / prod z_i!`.
pub fn count_perms(spec: &MultisetSpec) -> BigUint {
    let mut total = BigUint::one();
    let mut placed = 0usize;
    for &z in &spec.mult {
        placed += z;
        total *= binomial(BigUint::from(placed), BigUint::from(z));
    }
    total
}

/// Enumerative code `h_M`: the `idx`-th inverse-form vector in
/// lexicographic order.
pub fn unrank_perm(spec: &MultisetSpec, idx: &BigUint) -> Result<MsPermutation, PermError> {
    let count = count_perms(spec);
    if idx.is_zero() || *idx > count {
        return Err(PermError::IndexOutOfRange {
            idx: idx.clone(),
            count,
        });
    }
    let mut rest = idx - 1u32;
    let mut remaining = spec.mult.clone();
    let mut left = spec.n();
    // `block` counts arrangements of the remaining multiset.
    let mut block = count;
    let mut inv = Vec::with_capacity(left);
    for _ in 0..spec.n() {
        for (i, r) in remaining.iter_mut().enumerate() {
            if *r == 0 {
                continue;
            }
            let sub = &block * *r / left;
            if rest < sub {
                inv.push(spec.base + i);
                *r -= 1;
                block = sub;
                break;
            }
            rest -= &sub;
        }
        left -= 1;
    }
    Ok(MsPermutation {
        spec: spec.clone(),
        inv,
    })
}

/// Inverse of [`unrank_perm`].
pub fn rank_perm(perm: &MsPermutation) -> BigUint {
    let spec = &perm.spec;
    let mut remaining = spec.mult.clone();
    let mut left = spec.n();
    let mut block = count_perms(spec);
    let mut rank = BigUint::zero();
    for &label in &perm.inv {
        let target = label - spec.base;
        for r in remaining.iter().take(target) {
            if *r > 0 {
                rank += &block * *r / left;
            }
        }
        block = &block * remaining[target] / left;
        remaining[target] -= 1;
        left -= 1;
    }
    rank + 1u32
}

/// Validates `inv` against `spec` and ranks it.
pub fn rank_inv(spec: &MultisetSpec, inv: &[usize]) -> Result<BigUint, PermError> {
    let perm = MsPermutation::new(spec.clone(), inv.to_vec())?;
    Ok(rank_perm(&perm))
}

/// Characteristic vector of `set` in `{0,1}^n`.
pub fn theta(set: &BTreeSet<usize>, n: usize) -> Result<BinaryWord, PermError> {
    let mut w = BinaryWord::zeros(n);
    for &j in set {
        if j >= n {
            return Err(PermError::CellOutOfRange { cell: j, n });
        }
        w.set(j, true);
    }
    Ok(w)
}

pub fn theta_inv(w: &BinaryWord) -> BTreeSet<usize> {
    w.support().into_iter().collect()
}

/// `U_{i1,i2}`: cells whose rank lies in `[i1, i2]`; empty when `i1 > i2`.
pub fn rank_union(perm: &MsPermutation, i1: usize, i2: usize) -> BTreeSet<usize> {
    if i1 > i2 {
        return BTreeSet::new();
    }
    (0..perm.n())
        .filter(|&j| (i1..=i2).contains(&perm.inv[j]))
        .collect()
}

/// Number of `n`-bit words with weight at most `max_weight`.
pub fn bounded_count(n: usize, max_weight: usize) -> BigUint {
    (0..=max_weight.min(n))
        .map(|w| binomial(BigUint::from(n), BigUint::from(w)))
        .sum()
}

/// `floor(delta * n)`.
pub fn bounded_max_weight(n: usize, delta: &Fraction) -> usize {
    floor_mul(delta, n)
}

/// `h_{<=delta}`: weight-major, then lexicographic within a weight class.
pub fn unrank_bounded(n: usize, delta: &Fraction, idx: &BigUint) -> Result<BinaryWord, PermError> {
    unrank_bounded_weight(n, bounded_max_weight(n, delta), idx)
}

pub fn unrank_bounded_weight(
    n: usize,
    max_weight: usize,
    idx: &BigUint,
) -> Result<BinaryWord, PermError> {
    let count = bounded_count(n, max_weight);
    if idx.is_zero() || *idx > count {
        return Err(PermError::IndexOutOfRange {
            idx: idx.clone(),
            count,
        });
    }
    let mut rest = idx - 1u32;
    let mut weight = 0;
    loop {
        let class = binomial(BigUint::from(n), BigUint::from(weight));
        if rest < class {
            break;
        }
        rest -= class;
        weight += 1;
    }
    Ok(unrank_constant_weight(n, weight, &rest))
}

/// `h_{<=delta}^{-1}`.
pub fn rank_bounded(w: &BinaryWord, delta: &Fraction) -> Result<BigUint, PermError> {
    rank_bounded_weight(w, bounded_max_weight(w.len(), delta))
}

pub fn rank_bounded_weight(w: &BinaryWord, max_weight: usize) -> Result<BigUint, PermError> {
    if w.weight() > max_weight {
        return Err(PermError::WeightTooHigh {
            weight: w.weight(),
            max: max_weight,
        });
    }
    let below = bounded_count(w.len(), w.weight()) - binomial(BigUint::from(w.len()), BigUint::from(w.weight()));
    Ok(below + rank_constant_weight(w) + 1u32)
}

/// 0-based lexicographic rank of `w` among words of its length and weight.
fn rank_constant_weight(w: &BinaryWord) -> BigUint {
    let n = w.len();
    let mut ones_left = w.weight();
    let mut rank = BigUint::zero();
    for j in 0..n {
        if ones_left == 0 {
            break;
        }
        if w.get(j) {
            // every word with a zero here and the same prefix comes first
            rank += binomial(BigUint::from(n - j - 1), BigUint::from(ones_left));
            ones_left -= 1;
        }
    }
    rank
}

fn unrank_constant_weight(n: usize, weight: usize, rest: &BigUint) -> BinaryWord {
    let mut rest = rest.clone();
    let mut w = BinaryWord::zeros(n);
    let mut ones_left = weight;
    for j in 0..n {
        if ones_left == 0 {
            break;
        }
        let zeros_here = binomial(BigUint::from(n - j - 1), BigUint::from(ones_left));
        if rest >= zeros_here {
            rest -= zeros_here;
            w.set(j, true);
            ones_left -= 1;
        }
    }
    w
}

/// All `n`-bit words of weight `k` in lexicographic order.
pub fn constant_weight_words(n: usize, k: usize) -> impl Iterator<Item = BinaryWord> {
    // walk combinations of one-positions so that the bit strings come out sorted:
    // lexicographic order on strings is reverse-lex on the position sets
    let mut next = (k <= n).then(|| (n - k..n).collect::<Vec<usize>>());
    std::iter::from_fn(move || {
        let cur = next.take()?;
        let mut word = BinaryWord::zeros(n);
        for &p in &cur {
            word.set(p, true);
        }
        // predecessor of `cur` in lex order on sorted position tuples
        let mut c = cur;
        let mut i = c.len();
        let lower = |i: usize, c: &[usize]| if i == 0 { 0 } else { c[i - 1] + 1 };
        while i > 0 {
            i -= 1;
            if c[i] > lower(i, &c) {
                c[i] -= 1;
                // push the tail as far right as possible
                for t in i + 1..c.len() {
                    c[t] = n - (c.len() - t);
                }
                next = Some(c);
                break;
            }
        }
        Some(word)
    })
}

/// Lexicographic successor of a multiset permutation in place; false at the end.
pub fn next_inv(inv: &mut [usize]) -> bool {
    if inv.len() < 2 {
        return false;
    }
    let mut i = inv.len() - 1;
    while i > 0 && inv[i - 1] >= inv[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = inv.len() - 1;
    while inv[j] <= inv[i - 1] {
        j -= 1;
    }
    inv.swap(i - 1, j);
    inv[i..].reverse();
    true
}

/// Every element of `S_M` in lexicographic order.
pub fn all_perms(spec: &MultisetSpec) -> impl Iterator<Item = MsPermutation> + '_ {
    let mut cur = Some(spec.first_inv());
    std::iter::from_fn(move || {
        let inv = cur.take()?;
        let mut succ = inv.clone();
        if next_inv(&mut succ) {
            cur = Some(succ);
        }
        Some(MsPermutation {
            spec: spec.clone(),
            inv,
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    fn set(v: &[usize]) -> BTreeSet<usize> {
        v.iter().copied().collect()
    }

    #[test]
    fn counts() {
        let m = MultisetSpec::with_base(2, vec![2, 2]).unwrap();
        assert_eq!(count_perms(&m), big(6));
        assert_eq!(count_perms(&MultisetSpec::new(vec![1]).unwrap()), big(1));
        let s32 = MultisetSpec::uniform(3, 2).unwrap();
        assert_eq!(count_perms(&s32), big(90));
        assert_eq!(all_perms(&s32).count(), 90);
    }

    #[test]
    fn upper_rank_code() {
        let m = MultisetSpec::with_base(2, vec![2, 2]).unwrap();
        assert_eq!(unrank_perm(&m, &big(1)).unwrap().inv(), &[2, 2, 3, 3]);
        assert_eq!(unrank_perm(&m, &big(2)).unwrap().inv(), &[2, 3, 2, 3]);
        assert_eq!(rank_inv(&m, &[3, 3, 2, 2]).unwrap(), big(6));
        assert!(matches!(
            unrank_perm(&m, &big(7)),
            Err(PermError::IndexOutOfRange { .. })
        ));
        assert!(unrank_perm(&m, &big(0)).is_err());
    }

    #[test]
    fn two_singletons() {
        let m = MultisetSpec::new(vec![1, 1]).unwrap();
        assert_eq!(unrank_perm(&m, &big(2)).unwrap().inv(), &[2, 1]);
    }

    #[test]
    fn invalid_permutation() {
        let m = MultisetSpec::uniform(2, 2).unwrap();
        assert!(matches!(
            rank_inv(&m, &[1, 1, 1, 2]),
            Err(PermError::InvalidPermutation(_))
        ));
        assert!(MsPermutation::from_inv(vec![1, 3, 3]).is_err());
    }

    #[test]
    fn theta_examples() {
        assert_eq!(theta(&set(&[1, 4]), 6).unwrap().to_string(), "010010");
        assert_eq!(theta(&set(&[]), 4).unwrap().to_string(), "0000");
        let w = BinaryWord::parse("010010").unwrap();
        assert_eq!(theta_inv(&w), set(&[1, 4]));
        assert!(theta(&set(&[6]), 6).is_err());
    }

    #[test]
    fn rank_unions() {
        let sigma = MsPermutation::uniform(3, 2, vec![1, 2, 1, 3, 2, 3]).unwrap();
        assert_eq!(rank_union(&sigma, 1, 2), set(&[0, 1, 2, 4]));
        assert!(rank_union(&sigma, 1, 0).is_empty());
        assert_eq!(rank_union(&sigma, 1, 3), set(&[0, 1, 2, 3, 4, 5]));
    }

    #[test]
    fn bounded_examples() {
        let quarter = Fraction::new(1, 4);
        assert_eq!(unrank_bounded(4, &quarter, &big(1)).unwrap().to_string(), "0000");
        assert_eq!(unrank_bounded(4, &quarter, &big(2)).unwrap().to_string(), "0001");
        assert_eq!(unrank_bounded(4, &quarter, &big(5)).unwrap().to_string(), "1000");
        assert!(unrank_bounded(4, &quarter, &big(6)).is_err());
        let w = BinaryWord::parse("0011").unwrap();
        assert_eq!(
            rank_bounded(&w, &quarter),
            Err(PermError::WeightTooHigh { weight: 2, max: 1 })
        );
    }

    #[test]
    fn bounded_roundtrip_n10() {
        let delta = Fraction::new(3, 10);
        let count = bounded_count(10, 3);
        assert_eq!(count, big(1 + 10 + 45 + 120));
        let mut idx = big(1);
        while idx <= count {
            let w = unrank_bounded(10, &delta, &idx).unwrap();
            assert_eq!(rank_bounded(&w, &delta).unwrap(), idx);
            idx += 1u32;
        }
    }

    #[test]
    fn constant_weight_order() {
        let words: Vec<String> = constant_weight_words(4, 2).map(|w| w.to_string()).collect();
        assert_eq!(words, ["0011", "0101", "0110", "1001", "1010", "1100"]);
        assert_eq!(constant_weight_words(3, 0).count(), 1);
        assert_eq!(constant_weight_words(3, 4).count(), 0);
    }

    #[test]
    fn next_inv_walks_lex_order() {
        let mut v = vec![1, 1, 2];
        let mut seen = vec![v.clone()];
        while next_inv(&mut v) {
            seen.push(v.clone());
        }
        assert_eq!(seen, vec![vec![1, 1, 2], vec![1, 2, 1], vec![2, 1, 1]]);
    }
}
