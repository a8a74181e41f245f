//! The 5-message strong WOM code on 6 cells with weights 2/3 and 1/3.

use std::collections::BTreeSet;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::{check_len, check_message, check_state, StrongWom, StrongWomParams, WomError};
use crate::permlib::{theta, theta_inv, BinaryWord};
use crate::scalar::Fraction;

/// Codeword pairs per message, 0-based cells, each row sorted.
const ROWS: [[[usize; 2]; 3]; 5] = [
    [[0, 1], [2, 3], [4, 5]],
    [[0, 2], [1, 5], [3, 4]],
    [[0, 3], [1, 4], [2, 5]],
    [[0, 4], [1, 2], [3, 5]],
    [[0, 5], [1, 3], [2, 4]],
];

/// Picks the lexicographically smallest codeword pair of message `m` that
/// lies inside the 4-cell set `u`.
pub fn example_wom_encode(m: usize, u: &BTreeSet<usize>) -> Result<BTreeSet<usize>, WomError> {
    if !(1..=5).contains(&m) {
        return Err(WomError::MessageOutOfRange {
            m: BigUint::from(m),
            count: BigUint::from(5u32),
        });
    }
    if u.len() != 4 || u.iter().any(|&j| j >= 6) {
        return Err(WomError::BadState {
            len: 6,
            weight: u.len(),
            n: 6,
            expected: 4,
        });
    }
    ROWS[m - 1]
        .iter()
        .find(|pair| pair.iter().all(|j| u.contains(j)))
        .map(|pair| pair.iter().copied().collect())
        .ok_or_else(|| WomError::EncodeFailure("table row has no pair inside the state".into()))
}

/// Message whose row contains `pair`.
pub fn example_wom_decode(pair: &BTreeSet<usize>) -> Result<usize, WomError> {
    let p: Vec<usize> = pair.iter().copied().collect();
    ROWS.iter()
        .position(|row| row.iter().any(|c| c.as_slice() == p.as_slice()))
        .map(|i| i + 1)
        .ok_or_else(|| WomError::ShapeMismatch(format!("{p:?} is not a 2-subset of 6 cells")))
}

/// Rows as words, `table[m-1]` holding the codewords of message `m`.
pub fn example_table() -> Vec<Vec<BinaryWord>> {
    ROWS.iter()
        .map(|row| {
            row.iter()
                .map(|pair| theta(&pair.iter().copied().collect(), 6).expect("cells below 6"))
                .collect()
        })
        .collect()
}

/// Code table file: one list of bit strings per message.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WomTable {
    pub schema: u32,
    pub n: usize,
    pub w_s: Fraction,
    pub w_x: Fraction,
    pub rows: Vec<Vec<String>>,
}

impl WomTable {
    pub fn example() -> Self {
        Self {
            schema: 1,
            n: 6,
            w_s: Fraction::new(2, 3),
            w_x: Fraction::new(1, 3),
            rows: example_table()
                .iter()
                .map(|row| row.iter().map(ToString::to_string).collect())
                .collect(),
        }
    }

    pub fn words(&self) -> Result<Vec<Vec<BinaryWord>>, WomError> {
        self.rows
            .iter()
            .map(|row| {
                row.iter()
                    .map(|s| {
                        BinaryWord::parse(s)
                            .ok_or_else(|| WomError::ShapeMismatch(format!("bad word {s:?}")))
                    })
                    .collect()
            })
            .collect()
    }

    pub fn params(&self) -> StrongWomParams {
        StrongWomParams {
            n: self.n,
            k_w: BigUint::from(self.rows.len()),
            w_s: self.w_s,
            w_x: self.w_x,
        }
    }
}

/// The table code as a [`StrongWom`].
#[derive(Debug, Clone, Copy, Default)]
pub struct Example3Wom;

impl StrongWom for Example3Wom {
    fn params(&self) -> StrongWomParams {
        WomTable::example().params()
    }

    fn encode(&self, m: &BigUint, s: &BinaryWord) -> Result<BinaryWord, WomError> {
        let p = self.params();
        check_message(m, &p.k_w)?;
        check_state(s, 6, &p.w_s)?;
        let pair = example_wom_encode(m.to_usize().expect("small"), &theta_inv(s))?;
        Ok(theta(&pair, 6)?)
    }

    fn decode(&self, x: &BinaryWord) -> Result<BigUint, WomError> {
        check_len(x, 6)?;
        Ok(BigUint::from(example_wom_decode(&theta_inv(x))?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::permlib::constant_weight_words;

    fn set(v: &[usize]) -> BTreeSet<usize> {
        v.iter().copied().collect()
    }

    #[test]
    fn worked_examples() {
        assert_eq!(example_wom_encode(3, &set(&[0, 1, 2, 4])).unwrap(), set(&[1, 4]));
        assert_eq!(example_wom_encode(1, &set(&[0, 1, 2, 3])).unwrap(), set(&[0, 1]));
        assert_eq!(example_wom_encode(5, &set(&[2, 3, 4, 5])).unwrap(), set(&[2, 4]));
        assert_eq!(example_wom_decode(&set(&[1, 4])).unwrap(), 3);
        assert_eq!(example_wom_decode(&set(&[0, 1])).unwrap(), 1);
    }

    #[test]
    fn rows_partition_the_pairs() {
        let mut all: Vec<BinaryWord> = example_table().into_iter().flatten().collect();
        all.sort();
        let mut pairs: Vec<BinaryWord> = constant_weight_words(6, 2).collect();
        pairs.sort();
        assert_eq!(all, pairs);
    }

    #[test]
    fn roundtrip_all_states() {
        for s in constant_weight_words(6, 4) {
            for m in 1..=5u32 {
                let x = Example3Wom.encode(&BigUint::from(m), &s).unwrap();
                assert!(x.is_below(&s));
                assert_eq!(x.weight(), 2);
                assert_eq!(Example3Wom.decode(&x).unwrap(), BigUint::from(m));
            }
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(example_wom_encode(6, &set(&[0, 1, 2, 3])).is_err());
        assert!(example_wom_encode(1, &set(&[0, 1, 2])).is_err());
        assert!(example_wom_decode(&set(&[0, 1, 2])).is_err());
        let s = BinaryWord::parse("111000").unwrap();
        assert!(Example3Wom.encode(&BigUint::from(1u32), &s).is_err());
    }

    #[test]
    fn table_file_roundtrip() {
        let t = WomTable::example();
        let json = serde_json::to_string(&t).unwrap();
        let back: WomTable = serde_json::from_str(&json).unwrap();
        assert_eq!(back.words().unwrap(), example_table());
    }
}
