//! Scalar types: cell levels and exact weight fractions.

use std::fmt::Debug;
use std::ops::{Add, Sub};

use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::{One, ToPrimitive, Zero};

/// Exact fraction used for weights (`w_s`, `w_x`, `delta`) so that
/// `floor(w * n)` never suffers from rounding.
pub type Fraction = Ratio<u64>;

/// `floor(w * n)`.
pub fn floor_mul(w: &Fraction, n: usize) -> usize {
    let n = n as u64;
    // (numer * n) / denom without intermediate overflow for realistic sizes
    ((*w.numer() as u128 * n as u128) / *w.denom() as u128) as usize
}

pub fn fraction_to_f64(w: &Fraction) -> f64 {
    *w.numer() as f64 / *w.denom() as f64
}

/// Charge level of a cell.
///
/// Implemented for `f32`, `f64` and the exact rationals `Ratio<i64>`,
/// `BigRational`. Every operation in `cellmod` is generic over it.
pub trait Level:
    Clone + Debug + PartialOrd + Zero + One + Add<Output = Self> + Sub<Output = Self> + ToPrimitive
{
    /// True for finite values; rationals always are.
    fn is_finite_level(&self) -> bool;

    /// `k * 1` built by repeated addition.
    fn from_count(k: usize) -> Self {
        let mut acc = Self::zero();
        for _ in 0..k {
            acc = acc + Self::one();
        }
        acc
    }
}

impl Level for f32 {
    fn is_finite_level(&self) -> bool {
        self.is_finite()
    }

    fn from_count(k: usize) -> Self {
        k as f32
    }
}

impl Level for f64 {
    fn is_finite_level(&self) -> bool {
        self.is_finite()
    }

    fn from_count(k: usize) -> Self {
        k as f64
    }
}

impl Level for Ratio<i64> {
    fn is_finite_level(&self) -> bool {
        true
    }

    fn from_count(k: usize) -> Self {
        Ratio::from_integer(k as i64)
    }
}

impl Level for Ratio<BigInt> {
    fn is_finite_level(&self) -> bool {
        true
    }

    fn from_count(k: usize) -> Self {
        Ratio::from_integer(BigInt::from(k))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floors_are_exact() {
        assert_eq!(floor_mul(&Fraction::new(1, 3), 9), 3);
        assert_eq!(floor_mul(&Fraction::new(2, 3), 6), 4);
        assert_eq!(floor_mul(&Fraction::new(3, 10), 10), 3);
        assert_eq!(floor_mul(&Fraction::new(33, 100), 1024), 337);
    }

    #[test]
    fn counts() {
        assert_eq!(<f64 as Level>::from_count(3), 3.0);
        assert_eq!(<Ratio<i64> as Level>::from_count(2), Ratio::from_integer(2));
    }
}
