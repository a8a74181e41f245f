//! Ball sizes, capacities, code-size bounds and brute-force oracles.

use std::collections::HashSet;

use num_bigint::BigUint;
use num_integer::binomial;
use num_traits::{Float, ToPrimitive};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cellmod::cost_perms;
use crate::permlib::{all_perms, constant_weight_words, count_perms, BinaryWord, MsPermutation, MultisetSpec, PermError};
use crate::scalar::floor_mul;
use crate::womlib::StrongWomParams;

/// Comparison tolerance for capacity values.
pub const CAPACITY_TOL: f64 = 1e-12;

/// Largest permutation set that exhaustive oracles will walk.
pub const ENUMERATION_LIMIT: u64 = 1_000_000;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum LimitsError {
    #[error("{0} is outside the domain")]
    DomainError(String),
    #[error("need 1 <= r <= q-1 and z >= 1, got q={q}, z={z}, r={r}")]
    ParamError { q: usize, z: usize, r: usize },
    #[error("instance has {count} permutations, above the limit of {ENUMERATION_LIMIT}")]
    InstanceTooLarge { count: BigUint },
    #[error("code table is not a partition of the constant-weight words: {0}")]
    NotAPartition(String),
    #[error(transparent)]
    Perm(#[from] PermError),
}

/// Binary entropy in bits.
pub fn entropy<F: Float>(p: F) -> Result<F, LimitsError> {
    if !(p >= F::zero() && p <= F::one()) {
        return Err(LimitsError::DomainError(format!(
            "p = {:?}",
            p.to_f64().unwrap_or(f64::NAN)
        )));
    }
    let term = |t: F| if t > F::zero() { -t * t.log2() } else { F::zero() };
    Ok(term(p) + term(F::one() - p))
}

fn check_qzr(q: usize, z: usize, r: usize) -> Result<(), LimitsError> {
    if r < 1 || r >= q || z < 1 {
        return Err(LimitsError::ParamError { q, z, r });
    }
    Ok(())
}

/// Closed-form size of the cost-`r` ball in `S_{q,z}`.
pub fn ball_size(q: usize, z: usize, r: usize) -> Result<BigUint, LimitsError> {
    check_qzr(q, z, r)?;
    let c = |a: usize| binomial(BigUint::from(a), BigUint::from(z));
    let mut size = num_traits::pow(c((r + 1) * z), q - r);
    for i in 1..=r {
        size *= c(i * z);
    }
    Ok(size)
}

/// Every permutation reachable from `sigma` at cost at most `r`, in
/// lexicographic order.
pub fn ball_enumerate(sigma: &MsPermutation, r: usize) -> Result<Vec<MsPermutation>, LimitsError> {
    let spec = sigma.spec();
    let count = count_perms(spec);
    if count > BigUint::from(ENUMERATION_LIMIT) {
        return Err(LimitsError::InstanceTooLarge { count });
    }
    Ok(all_perms(spec)
        .filter(|pi| cost_perms(sigma, pi).expect("same spec") <= r as i64)
        .collect())
}

/// `C_R(r) = (r+1) H(1/(r+1))`.
pub fn capacity_rm<F: Float>(r: usize) -> Result<F, LimitsError> {
    if r < 1 {
        return Err(LimitsError::DomainError(format!("r = {r}")));
    }
    let k = F::from(r + 1).expect("small integer");
    Ok(k * entropy(F::one() / k)?)
}

/// `C_W = w_s H(w_x / w_s)`.
pub fn capacity_wom<F: Float>(w_s: F, w_x: F) -> Result<F, LimitsError> {
    if !(w_x > F::zero() && w_x <= w_s && w_s <= F::one()) {
        return Err(LimitsError::DomainError(format!(
            "w_s = {:?}, w_x = {:?}",
            w_s.to_f64(),
            w_x.to_f64()
        )));
    }
    Ok(w_s * entropy(w_x / w_s)?)
}

/// `log2` of a big integer.
pub fn log2_big(v: &BigUint) -> f64 {
    let bits = v.bits();
    if bits <= 1000 {
        return v.to_f64().expect("fits in f64").log2();
    }
    let shift = bits - 64;
    (v >> shift).to_f64().expect("64-bit value").log2() + shift as f64
}

/// Sphere-packing style bound `K_R <= |B_{q,z,r}|`.
pub fn check_code_bound(k_r: &BigUint, q: usize, z: usize, r: usize) -> Result<bool, LimitsError> {
    Ok(*k_r <= ball_size(q, z, r)?)
}

/// Exhaustively checks that every message has a codeword below every state
/// of weight `floor(w_s n)`.
///
/// `table[m]` lists the codewords of message `m + 1`. Rows must be disjoint
/// sets of weight-`floor(w_x n)` words; they need not cover every such word.
pub fn strong_wom_oracle(params: &StrongWomParams, table: &[Vec<BinaryWord>]) -> Result<bool, LimitsError> {
    let n = params.n;
    let wx = floor_mul(&params.w_x, n);
    if BigUint::from(table.len()) != params.k_w {
        return Err(LimitsError::NotAPartition(format!(
            "{} rows for {} messages",
            table.len(),
            params.k_w
        )));
    }
    let mut seen = HashSet::new();
    for row in table {
        for w in row {
            if w.len() != n || w.weight() != wx {
                return Err(LimitsError::NotAPartition(format!("word {w} is not in J_w(n)")));
            }
            if !seen.insert(w.clone()) {
                return Err(LimitsError::NotAPartition(format!("word {w} appears twice")));
            }
        }
    }
    Ok(constant_weight_words(n, floor_mul(&params.w_s, n))
        .all(|s| table.iter().all(|row| row.iter().any(|x| x.is_below(&s)))))
}

/// Ball size, its logarithm and both capacities for one parameter set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapacityReport {
    pub schema: u32,
    pub q: usize,
    pub z: usize,
    pub r: usize,
    #[serde(with = "crate::bigser")]
    pub ball_size: BigUint,
    pub log_ball: f64,
    /// `log_ball / (q z)`.
    pub rate_bound: f64,
    pub c_r: f64,
    /// WOM capacity at `w_s = (r+1)/q`, `w_x = 1/q`.
    pub c_w: f64,
}

impl CapacityReport {
    pub fn new(q: usize, z: usize, r: usize) -> Result<Self, LimitsError> {
        let ball = ball_size(q, z, r)?;
        let log_ball = log2_big(&ball);
        let qf = q as f64;
        Ok(Self {
            schema: 1,
            q,
            z,
            r,
            log_ball,
            rate_bound: log_ball / (q * z) as f64,
            c_r: capacity_rm(r)?,
            c_w: capacity_wom((r + 1) as f64 / qf, 1.0 / qf)?,
            ball_size: ball,
        })
    }
}

/// `|S_M|` as used by exhaustive oracles, rejecting oversized instances.
pub fn guarded_count(spec: &MultisetSpec) -> Result<BigUint, LimitsError> {
    let count = count_perms(spec);
    if count > BigUint::from(ENUMERATION_LIMIT) {
        return Err(LimitsError::InstanceTooLarge { count });
    }
    Ok(count)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entropy_values() {
        assert_eq!(entropy(0.5f64).unwrap(), 1.0);
        assert_eq!(entropy(0.0f64).unwrap(), 0.0);
        assert_eq!(entropy(1.0f64).unwrap(), 0.0);
        assert!((entropy(0.25f64).unwrap() - 0.811_278_124_459_132_8).abs() < CAPACITY_TOL);
        assert!((entropy(0.25f32).unwrap() - 0.811_278_1).abs() < 1e-6);
        assert!(entropy(1.5f64).is_err());
        assert!(entropy(f64::NAN).is_err());
    }

    #[test]
    fn ball_sizes() {
        assert_eq!(ball_size(3, 2, 1).unwrap(), BigUint::from(36u32));
        assert_eq!(ball_size(3, 1, 1).unwrap(), BigUint::from(4u32));
        // z = 1: (r+1)^{q-r} r!
        assert_eq!(ball_size(5, 1, 2).unwrap(), BigUint::from(27u32 * 2));
        assert_eq!(ball_size(3, 2, 2).unwrap(), BigUint::from(90u32));
        assert!(matches!(ball_size(3, 2, 3), Err(LimitsError::ParamError { .. })));
        assert!(ball_size(3, 2, 0).is_err());
    }

    #[test]
    fn ball_enumeration_small() {
        let sigma = MsPermutation::uniform(3, 2, vec![1, 2, 1, 3, 2, 3]).unwrap();
        assert_eq!(ball_enumerate(&sigma, 1).unwrap().len(), 36);
        assert_eq!(ball_enumerate(&sigma, 2).unwrap().len(), 90);
        let s3 = MsPermutation::uniform(3, 1, vec![2, 3, 1]).unwrap();
        assert_eq!(ball_enumerate(&s3, 1).unwrap().len(), 4);
        let big = MsPermutation::new(MultisetSpec::uniform(5, 3).unwrap(), MultisetSpec::uniform(5, 3).unwrap().first_inv()).unwrap();
        assert!(matches!(
            ball_enumerate(&big, 1),
            Err(LimitsError::InstanceTooLarge { .. })
        ));
    }

    #[test]
    fn capacities() {
        assert_eq!(capacity_rm::<f64>(1).unwrap(), 2.0);
        let cw: f64 = capacity_wom(2.0 / 3.0, 1.0 / 3.0).unwrap();
        assert!((cw - 2.0 / 3.0).abs() < CAPACITY_TOL);
        assert_eq!(capacity_wom(0.4f64, 0.4).unwrap(), 0.0);
        assert!(capacity_wom(0.3f64, 0.4).is_err());
        assert!(capacity_wom(0.3f64, 0.0).is_err());
        assert!(capacity_rm::<f64>(0).is_err());
    }

    #[test]
    fn code_bounds() {
        let k = |v: u32| BigUint::from(v);
        assert!(check_code_bound(&k(30), 3, 2, 1).unwrap());
        assert!(!check_code_bound(&k(37), 3, 2, 1).unwrap());
        assert!((1..=4).all(|v| check_code_bound(&k(v), 3, 1, 1).unwrap()));
        assert!(!check_code_bound(&k(5), 3, 1, 1).unwrap());
    }

    #[test]
    fn big_logs() {
        let v = BigUint::from(1u32) << 3000u32;
        assert!((log2_big(&v) - 3000.0).abs() < 1e-9);
        assert!((log2_big(&BigUint::from(30u32)) - 30f64.log2()).abs() < 1e-15);
    }

    #[test]
    fn report_fields() {
        let rep = CapacityReport::new(3, 2, 1).unwrap();
        assert_eq!(rep.ball_size, BigUint::from(36u32));
        assert!(rep.rate_bound < rep.c_r);
        let json = serde_json::to_value(&rep).unwrap();
        assert_eq!(json["schema"], 1);
        assert_eq!(json["ball_size"], "36");
    }
}
