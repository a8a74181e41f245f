//! Rank-modulation rewriting codes assembled from WOM ingredients.
//!
//! Every code maps a 1-based message in `[K_R]` and a stored permutation
//! `sigma` to a new permutation `pi` with `cost_perms(sigma, pi) <= r`.
//! Messages split into parts `(m_1, ..., m_{q-r})` by mixed radix, least
//! significant part first: `q - r - 1` WOM parts in `[K_W]` and one
//! enumerative part in `[K_M]`.

use std::collections::BTreeSet;
use std::ops::Range;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cellmod::cost_perms;
use crate::limits::{capacity_rm, log2_big};
use crate::permlib::{
    count_perms, rank_inv, rank_perm, theta, theta_inv, unrank_perm, BinaryWord, MsPermutation,
    MultisetSpec, PermError,
};
use crate::scalar::Fraction;
use crate::womlib::{
    example_wom_decode, example_wom_encode, join_mixed_radix, split_mixed_radix, ConcatWom,
    StrongWom, WomError,
};

#[derive(Error, Debug, Clone, PartialEq)]
pub enum RmError {
    #[error("message {m} outside [1, {count}]")]
    MessageOutOfRange { m: BigUint, count: BigUint },
    #[error("permutation is not in the codebook: {0}")]
    CodebookViolation(String),
    #[error("ingredient failed at rank {rank}: {source}")]
    IngredientFailure { rank: usize, source: WomError },
    #[error("no rewrite found at rank {rank}: column {column} exhausted {searched} hash indices")]
    RewriteFailure { rank: usize, column: usize, searched: u64 },
    #[error("ingredient does not fit the scheme: {0}")]
    ParamError(String),
    #[error(transparent)]
    Perm(#[from] PermError),
}

/// Contiguous run of cells holding one sub-permutation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    pub name: String,
    pub start: usize,
    pub spec: MultisetSpec,
}

impl Segment {
    fn new(name: impl Into<String>, start: usize, spec: MultisetSpec) -> Self {
        Self { name: name.into(), start, spec }
    }

    pub fn range(&self) -> Range<usize> {
        self.start..self.start + self.spec.n()
    }
}

/// Codebook descriptor: a permutation is in the codebook when each segment
/// holds a permutation of its multiset.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Layout {
    pub q: usize,
    pub z: usize,
    pub segments: Vec<Segment>,
}

impl Layout {
    fn plain(q: usize, z: usize) -> Result<Self, RmError> {
        Ok(Self {
            q,
            z,
            segments: vec![Segment::new("all", 0, MultisetSpec::uniform(q, z)?)],
        })
    }

    pub fn contains(&self, perm: &MsPermutation) -> bool {
        self.check(perm).is_ok()
    }

    fn check(&self, perm: &MsPermutation) -> Result<(), RmError> {
        if *perm.spec() != MultisetSpec::uniform(self.q, self.z)? {
            return Err(RmError::CodebookViolation(format!(
                "expected a permutation of S_{{{},{}}}",
                self.q, self.z
            )));
        }
        for seg in &self.segments {
            MsPermutation::new(seg.spec.clone(), perm.inv()[seg.range()].to_vec())
                .map_err(|e| RmError::CodebookViolation(format!("segment {}: {e}", seg.name)))?;
        }
        Ok(())
    }

    /// Lexicographically first codebook member.
    pub fn first(&self) -> MsPermutation {
        let inv: Vec<usize> = self.segments.iter().flat_map(|s| s.spec.first_inv()).collect();
        MsPermutation::uniform(self.q, self.z, inv).expect("segments tile the multiset")
    }

    /// Uniformly random codebook member.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> MsPermutation {
        let mut inv = Vec::with_capacity(self.q * self.z);
        for seg in &self.segments {
            let idx = random_index(rng, &count_perms(&seg.spec));
            inv.extend(unrank_perm(&seg.spec, &idx).expect("index in range").into_inv());
        }
        MsPermutation::uniform(self.q, self.z, inv).expect("segments tile the multiset")
    }
}

/// Uniform draw from `[1, count]`.
pub fn random_index<R: Rng + ?Sized>(rng: &mut R, count: &BigUint) -> BigUint {
    let bits = count.bits();
    loop {
        let bytes: Vec<u8> = (0..bits.div_ceil(8)).map(|_| rng.gen()).collect();
        let mut v = BigUint::from_bytes_le(&bytes);
        v &= (BigUint::one() << bits) - 1u32;
        if v < *count {
            return v + 1u32;
        }
    }
}

/// Message split into its parts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RmMessage {
    pub parts: Vec<BigUint>,
}

impl RmMessage {
    pub fn from_flat(m: &BigUint, radices: &[BigUint]) -> Self {
        Self { parts: split_mixed_radix(m, radices) }
    }

    pub fn to_flat(&self, radices: &[BigUint]) -> BigUint {
        join_mixed_radix(&self.parts, radices)
    }
}

/// A `(q, z, K_R, r)` rewriting code.
pub trait RewriteCode: Send + Sync {
    fn name(&self) -> String;
    fn q(&self) -> usize;
    fn z(&self) -> usize;
    fn r(&self) -> usize;
    /// `[K_W; q - r - 1]` followed by `K_M`.
    fn message_radices(&self) -> Vec<BigUint>;
    fn layout(&self) -> Layout;
    fn encode(&self, m: &BigUint, sigma: &MsPermutation) -> Result<MsPermutation, RmError>;
    fn decode(&self, pi: &MsPermutation) -> Result<BigUint, RmError>;

    fn n(&self) -> usize {
        self.q() * self.z()
    }

    /// `K_R`.
    fn message_count(&self) -> BigUint {
        self.message_radices().iter().product()
    }

    fn in_codebook(&self, perm: &MsPermutation) -> bool {
        self.layout().contains(perm)
    }

    /// State of a fresh block.
    fn initial(&self) -> MsPermutation {
        self.layout().first()
    }
}

impl<C: RewriteCode + ?Sized> RewriteCode for Box<C> {
    fn name(&self) -> String {
        (**self).name()
    }
    fn q(&self) -> usize {
        (**self).q()
    }
    fn z(&self) -> usize {
        (**self).z()
    }
    fn r(&self) -> usize {
        (**self).r()
    }
    fn message_radices(&self) -> Vec<BigUint> {
        (**self).message_radices()
    }
    fn layout(&self) -> Layout {
        (**self).layout()
    }
    fn encode(&self, m: &BigUint, sigma: &MsPermutation) -> Result<MsPermutation, RmError> {
        (**self).encode(m, sigma)
    }
    fn decode(&self, pi: &MsPermutation) -> Result<BigUint, RmError> {
        (**self).decode(pi)
    }
}

fn check_message(m: &BigUint, count: &BigUint) -> Result<(), RmError> {
    if *m == BigUint::from(0u32) || m > count {
        return Err(RmError::MessageOutOfRange { m: m.clone(), count: count.clone() });
    }
    Ok(())
}

/// Rate and distance to capacity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemeRate {
    /// `log2(K_R) / (q z)`.
    pub rate: f64,
    pub capacity: f64,
    /// `C_R - R_R`.
    pub gap: f64,
}

pub fn scheme_rate<C: RewriteCode + ?Sized>(code: &C) -> SchemeRate {
    let rate = log2_big(&code.message_count()) / code.n() as f64;
    let capacity = capacity_rm::<f64>(code.r()).expect("r >= 1");
    SchemeRate { rate, capacity, gap: capacity - rate }
}

/// Smallest `a` with `|S_{r+1,a}| >= K_a`.
pub fn a_min(k_a: &BigUint, r: usize) -> usize {
    let mut a = 1;
    while count_perms(&MultisetSpec::uniform(r + 1, a).expect("r + 1 >= 1")) < *k_a {
        a += 1;
    }
    a
}

/// Ranks `[q - r, q]` of the cells that are still unassigned, cells taken
/// in ascending order.
fn upper_spec(q: usize, r: usize, z: usize) -> MultisetSpec {
    MultisetSpec::with_base(q - r, vec![z; r + 1]).expect("positive multiplicities")
}

fn fill_upper(inv: &mut [usize], spec: &MultisetSpec, idx: &BigUint) -> Result<(), RmError> {
    let upper = unrank_perm(spec, idx)?;
    let free: Vec<usize> = (0..inv.len()).filter(|&j| inv[j] == 0).collect();
    for (&cell, &label) in free.iter().zip(upper.inv()) {
        inv[cell] = label;
    }
    Ok(())
}

fn read_upper(inv: &[usize], spec: &MultisetSpec) -> Result<BigUint, RmError> {
    let labels: Vec<usize> = inv.iter().copied().filter(|&l| l >= spec.base()).collect();
    Ok(rank_inv(spec, &labels)?)
}

fn state_word(sigma: &[usize], pi: &[usize], i: usize, r: usize) -> BinaryWord {
    BinaryWord::from_bits(sigma.iter().zip(pi).map(|(&s, &p)| s <= i + r && p == 0).collect())
}

fn ingredient(rank: usize) -> impl Fn(WomError) -> RmError {
    move |e| match e {
        WomError::NoEncoding { column, searched } => RmError::RewriteFailure { rank, column, searched },
        source => RmError::IngredientFailure { rank, source },
    }
}

fn check_codeword(x: &BinaryWord, s: &BinaryWord, z: usize, rank: usize) -> Result<(), RmError> {
    if !x.is_below(s) || x.weight() != z {
        return Err(RmError::IngredientFailure {
            rank,
            source: WomError::InnerContract(format!("codeword {x} is not a weight-{z} word below {s}")),
        });
    }
    Ok(())
}

/// The 30-message code on `S_{3,2}` with cost 1. `m = (m_1, m_2)` with
/// `m_1` in `[5]` for rank 1 and `m_2` in `[6]` for ranks 2 and 3.
pub fn con1_encode(m: (usize, usize), sigma: &MsPermutation) -> Result<MsPermutation, RmError> {
    if *sigma.spec() != MultisetSpec::uniform(3, 2)? {
        return Err(RmError::CodebookViolation("expected a permutation of S_{3,2}".into()));
    }
    let u: BTreeSet<usize> = (0..6).filter(|&j| sigma.inv()[j] <= 2).collect();
    let pair = example_wom_encode(m.0, &u).map_err(ingredient(1))?;
    let mut inv = vec![0; 6];
    for &j in &pair {
        inv[j] = 1;
    }
    fill_upper(&mut inv, &upper_spec(3, 1, 2), &BigUint::from(m.1))?;
    Ok(MsPermutation::uniform(3, 2, inv)?)
}

pub fn con1_decode(pi: &MsPermutation) -> Result<(usize, usize), RmError> {
    if *pi.spec() != MultisetSpec::uniform(3, 2)? {
        return Err(RmError::CodebookViolation("expected a permutation of S_{3,2}".into()));
    }
    let pair: BTreeSet<usize> = pi.cells_of_rank(1).into_iter().collect();
    let m1 = example_wom_decode(&pair).map_err(ingredient(1))?;
    let m2 = read_upper(pi.inv(), &upper_spec(3, 1, 2))?;
    Ok((m1, m2.to_usize().expect("at most 6")))
}

/// [`con1_encode`] behind the [`RewriteCode`] interface.
#[derive(Debug, Clone, Copy, Default)]
pub struct Construction1;

impl RewriteCode for Construction1 {
    fn name(&self) -> String {
        "con1".into()
    }
    fn q(&self) -> usize {
        3
    }
    fn z(&self) -> usize {
        2
    }
    fn r(&self) -> usize {
        1
    }
    fn message_radices(&self) -> Vec<BigUint> {
        vec![BigUint::from(5u32), BigUint::from(6u32)]
    }
    fn layout(&self) -> Layout {
        Layout::plain(3, 2).expect("valid")
    }

    fn encode(&self, m: &BigUint, sigma: &MsPermutation) -> Result<MsPermutation, RmError> {
        check_message(m, &self.message_count())?;
        let parts = RmMessage::from_flat(m, &self.message_radices()).parts;
        let part = |i: usize| parts[i].to_usize().expect("small");
        con1_encode((part(0), part(1)), sigma)
    }

    fn decode(&self, pi: &MsPermutation) -> Result<BigUint, RmError> {
        let (m1, m2) = con1_decode(pi)?;
        let msg = RmMessage { parts: vec![BigUint::from(m1), BigUint::from(m2)] };
        Ok(msg.to_flat(&self.message_radices()))
    }
}

fn fraction(num: usize, den: usize) -> Fraction {
    Fraction::new(num as u64, den as u64)
}

/// Rewriting code over all of `S_{q,z}` from a strong WOM code of length
/// `qz` with weights `(r+1)/q` and `1/q`.
#[derive(Debug, Clone)]
pub struct Construction2<W> {
    wom: W,
    q: usize,
    z: usize,
    r: usize,
}

impl<W: StrongWom> Construction2<W> {
    pub fn new(wom: W, q: usize, r: usize) -> Result<Self, RmError> {
        let p = wom.params();
        if r == 0 || r + 1 >= q || p.n % q != 0 {
            return Err(RmError::ParamError(format!("need 1 <= r <= q - 2 and q | n, got q={q}, r={r}, n={}", p.n)));
        }
        if p.w_s != fraction(r + 1, q) || p.w_x != fraction(1, q) {
            return Err(RmError::ParamError(format!(
                "weights {}/{} do not match {}/{q} and 1/{q}",
                p.w_s,
                p.w_x,
                r + 1
            )));
        }
        Ok(Self { q, z: p.n / q, r, wom })
    }

    pub fn wom(&self) -> &W {
        &self.wom
    }
}

impl<W: StrongWom> RewriteCode for Construction2<W> {
    fn name(&self) -> String {
        "con2".into()
    }
    fn q(&self) -> usize {
        self.q
    }
    fn z(&self) -> usize {
        self.z
    }
    fn r(&self) -> usize {
        self.r
    }
    fn message_radices(&self) -> Vec<BigUint> {
        let mut radices = vec![self.wom.params().k_w; self.q - self.r - 1];
        radices.push(count_perms(&upper_spec(self.q, self.r, self.z)));
        radices
    }
    fn layout(&self) -> Layout {
        Layout::plain(self.q, self.z).expect("valid")
    }

    fn encode(&self, m: &BigUint, sigma: &MsPermutation) -> Result<MsPermutation, RmError> {
        let radices = self.message_radices();
        check_message(m, &self.message_count())?;
        self.layout().check(sigma)?;
        let parts = RmMessage::from_flat(m, &radices).parts;
        let mut inv = vec![0; self.n()];
        for (i, part) in (1..self.q - self.r).zip(&parts) {
            let s = state_word(sigma.inv(), &inv, i, self.r);
            let x = self.wom.encode(part, &s).map_err(ingredient(i))?;
            check_codeword(&x, &s, self.z, i)?;
            for j in theta_inv(&x) {
                inv[j] = i;
            }
        }
        fill_upper(&mut inv, &upper_spec(self.q, self.r, self.z), parts.last().expect("K_M part"))?;
        Ok(MsPermutation::uniform(self.q, self.z, inv)?)
    }

    fn decode(&self, pi: &MsPermutation) -> Result<BigUint, RmError> {
        self.layout().check(pi)?;
        let mut parts = Vec::with_capacity(self.q - self.r);
        for i in 1..self.q - self.r {
            let x = theta(&pi.cells_of_rank(i).into_iter().collect(), self.n())?;
            parts.push(self.wom.decode(&x).map_err(ingredient(i))?);
        }
        parts.push(read_upper(pi.inv(), &upper_spec(self.q, self.r, self.z))?);
        Ok(RmMessage { parts }.to_flat(&self.message_radices()))
    }
}

/// Every permutation of `S_{q,z}` is a message: the cost is unbounded
/// (`r = q - 1`).
#[derive(Debug, Clone, Copy)]
pub struct Uncoded {
    q: usize,
    z: usize,
}

impl Uncoded {
    pub fn new(q: usize, z: usize) -> Result<Self, RmError> {
        if q < 2 {
            return Err(RmError::ParamError("need q >= 2".into()));
        }
        MultisetSpec::uniform(q, z)?;
        Ok(Self { q, z })
    }
}

impl RewriteCode for Uncoded {
    fn name(&self) -> String {
        "uncoded".into()
    }
    fn q(&self) -> usize {
        self.q
    }
    fn z(&self) -> usize {
        self.z
    }
    fn r(&self) -> usize {
        self.q - 1
    }
    fn message_radices(&self) -> Vec<BigUint> {
        vec![count_perms(&MultisetSpec::uniform(self.q, self.z).expect("valid"))]
    }
    fn layout(&self) -> Layout {
        Layout::plain(self.q, self.z).expect("valid")
    }

    fn encode(&self, m: &BigUint, sigma: &MsPermutation) -> Result<MsPermutation, RmError> {
        self.layout().check(sigma)?;
        check_message(m, &self.message_count())?;
        Ok(unrank_perm(sigma.spec(), m)?)
    }

    fn decode(&self, pi: &MsPermutation) -> Result<BigUint, RmError> {
        self.layout().check(pi)?;
        Ok(rank_perm(pi))
    }
}

/// Where the WOM part sits in the cell string.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MainPosition {
    /// `(pi_W, pi_a..., pi_b)`, for a single weak WOM block.
    First,
    /// `(pi_a..., pi_b, pi_x1, ..., pi_xt)`, for concatenated WOM blocks.
    Last,
}

/// Rewriting code with side-index sub-permutations, over a concatenated WOM
/// code with `t` blocks of length `q z_W`.
///
/// Each block carries its own copy of the upper ranks, so
/// `K_M = |S_M|^t` with `M = {(q-r)^{z_W}, ..., q^{z_W}}`.
#[derive(Debug, Clone)]
pub struct IndexedScheme<C> {
    wom: C,
    q: usize,
    r: usize,
    z_w: usize,
    t: usize,
    a: usize,
    position: MainPosition,
}

impl<C: ConcatWom> IndexedScheme<C> {
    pub fn new(wom: C, q: usize, r: usize, position: MainPosition) -> Result<Self, RmError> {
        let p = wom.params();
        if r == 0 || r + 1 >= q || p.n % q != 0 || p.t == 0 {
            return Err(RmError::ParamError(format!("need 1 <= r <= q - 2 and q | n, got q={q}, r={r}, n={}", p.n)));
        }
        if p.w_s != fraction(r + 1, q) || p.w_x != fraction(1, q) {
            return Err(RmError::ParamError(format!(
                "weights {}/{} do not match {}/{q} and 1/{q}",
                p.w_s,
                p.w_x,
                r + 1
            )));
        }
        Ok(Self {
            q,
            r,
            z_w: p.n / q,
            t: p.t,
            a: a_min(&p.k_a, r),
            position,
            wom,
        })
    }

    pub fn a(&self) -> usize {
        self.a
    }

    pub fn z_w(&self) -> usize {
        self.z_w
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn wom(&self) -> &C {
        &self.wom
    }

    fn n_w(&self) -> usize {
        self.q * self.z_w
    }

    fn index_spec(&self) -> MultisetSpec {
        MultisetSpec::uniform(self.r + 1, self.a).expect("positive")
    }

    fn balance_spec(&self) -> MultisetSpec {
        let k = self.q - self.r - 1;
        MultisetSpec::with_base(self.r + 2, vec![k * self.a; k]).expect("positive")
    }

    /// `(main blocks, index parts, balance)` segments.
    fn parts(&self) -> (Vec<Segment>, Vec<Segment>, Segment) {
        let main_len = self.t * self.n_w();
        let side_start = match self.position {
            MainPosition::First => main_len,
            MainPosition::Last => 0,
        };
        let main_start = match self.position {
            MainPosition::First => 0,
            MainPosition::Last => {
                let k = self.q - self.r - 1;
                k * (self.r + 1) * self.a + k * k * self.a
            }
        };
        let block = MultisetSpec::uniform(self.q, self.z_w).expect("positive");
        let main = (0..self.t)
            .map(|j| Segment::new(format!("x{}", j + 1), main_start + j * self.n_w(), block.clone()))
            .collect();
        let idx_len = (self.r + 1) * self.a;
        let index = (0..self.q - self.r - 1)
            .map(|i| Segment::new(format!("a{}", i + 1), side_start + i * idx_len, self.index_spec()))
            .collect();
        let balance = Segment::new("b", side_start + (self.q - self.r - 1) * idx_len, self.balance_spec());
        (main, index, balance)
    }

    fn block_radices(&self) -> Vec<BigUint> {
        vec![count_perms(&upper_spec(self.q, self.r, self.z_w)); self.t]
    }
}

impl<C: ConcatWom> RewriteCode for IndexedScheme<C> {
    fn name(&self) -> String {
        match self.position {
            MainPosition::First => "con3".into(),
            MainPosition::Last => "con6".into(),
        }
    }
    fn q(&self) -> usize {
        self.q
    }
    fn z(&self) -> usize {
        self.t * self.z_w + (self.q - self.r - 1) * self.a
    }
    fn r(&self) -> usize {
        self.r
    }
    fn message_radices(&self) -> Vec<BigUint> {
        let mut radices = vec![self.wom.params().k_w; self.q - self.r - 1];
        radices.push(self.block_radices().iter().product());
        radices
    }

    fn layout(&self) -> Layout {
        let (main, index, balance) = self.parts();
        let mut segments = Vec::new();
        match self.position {
            MainPosition::First => {
                segments.extend(main);
                segments.extend(index);
                segments.push(balance);
            }
            MainPosition::Last => {
                segments.extend(index);
                segments.push(balance);
                segments.extend(main);
            }
        }
        Layout { q: self.q, z: self.z(), segments }
    }

    fn encode(&self, m: &BigUint, sigma: &MsPermutation) -> Result<MsPermutation, RmError> {
        check_message(m, &self.message_count())?;
        self.layout().check(sigma)?;
        let parts = RmMessage::from_flat(m, &self.message_radices()).parts;
        let (main, index, balance) = self.parts();
        let mut inv = sigma.inv().to_vec();
        let mut blocks: Vec<Vec<usize>> = vec![vec![0; self.n_w()]; self.t];
        for (i, part) in (1..self.q - self.r).zip(&parts) {
            let states: Vec<BinaryWord> = main
                .iter()
                .zip(&blocks)
                .map(|(seg, pi)| state_word(&sigma.inv()[seg.range()], pi, i, self.r))
                .collect();
            let (xs, m_a) = self.wom.encode(part, &states).map_err(ingredient(i))?;
            if xs.len() != self.t {
                return Err(RmError::IngredientFailure {
                    rank: i,
                    source: WomError::ShapeMismatch(format!("{} blocks for t = {}", xs.len(), self.t)),
                });
            }
            for ((x, s), pi) in xs.iter().zip(&states).zip(blocks.iter_mut()) {
                check_codeword(x, s, self.z_w, i)?;
                for j in x.support() {
                    pi[j] = i;
                }
            }
            let side = unrank_perm(&self.index_spec(), &m_a).map_err(|e| RmError::IngredientFailure {
                rank: i,
                source: WomError::Perm(e),
            })?;
            inv[index[i - 1].range()].copy_from_slice(side.inv());
        }
        let upper = upper_spec(self.q, self.r, self.z_w);
        let digits = split_mixed_radix(parts.last().expect("K_M part"), &self.block_radices());
        for ((seg, pi), d) in main.iter().zip(blocks.iter_mut()).zip(&digits) {
            fill_upper(pi, &upper, d)?;
            inv[seg.range()].copy_from_slice(pi);
        }
        debug_assert_eq!(inv[balance.range()], sigma.inv()[balance.range()]);
        Ok(MsPermutation::uniform(self.q, self.z(), inv)?)
    }

    fn decode(&self, pi: &MsPermutation) -> Result<BigUint, RmError> {
        self.layout().check(pi)?;
        let (main, index, _) = self.parts();
        let mut parts = Vec::with_capacity(self.q - self.r);
        for i in 1..self.q - self.r {
            let xs: Vec<BinaryWord> = main
                .iter()
                .map(|seg| BinaryWord::from_bits(pi.inv()[seg.range()].iter().map(|&l| l == i).collect()))
                .collect();
            let m_a = rank_inv(&self.index_spec(), &pi.inv()[index[i - 1].range()])?;
            parts.push(self.wom.decode(&xs, &m_a).map_err(ingredient(i))?);
        }
        let upper = upper_spec(self.q, self.r, self.z_w);
        let digits = main
            .iter()
            .map(|seg| read_upper(&pi.inv()[seg.range()], &upper))
            .collect::<Result<Vec<_>, _>>()?;
        parts.push(join_mixed_radix(&digits, &self.block_radices()));
        Ok(RmMessage { parts }.to_flat(&self.message_radices()))
    }
}

/// Encodes and checks the cost bound and codebook membership.
pub fn checked_encode<C: RewriteCode + ?Sized>(
    code: &C,
    m: &BigUint,
    sigma: &MsPermutation,
) -> Result<(MsPermutation, i64), RmError> {
    let pi = code.encode(m, sigma)?;
    let cost = cost_perms(sigma, &pi).expect("same spec");
    assert!(cost <= code.r() as i64, "{} rewrote at cost {cost} > r", code.name());
    assert!(code.in_codebook(&pi), "{} left its codebook", code.name());
    Ok((pi, cost))
}
