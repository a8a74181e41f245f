//! Arithmetic in GF(2^n) for 3 <= n <= 16.

use super::WomError;

/// Irreducible polynomial per degree, including the leading term.
/// Degree 8 uses the AES polynomial.
pub const IRREDUCIBLE_POLYS: [(u32, u32); 14] = [
    (3, 0x0B),     // x^3 + x + 1
    (4, 0x13),     // x^4 + x + 1
    (5, 0x25),     // x^5 + x^2 + 1
    (6, 0x43),     // x^6 + x + 1
    (7, 0x83),     // x^7 + x + 1
    (8, 0x11B),    // x^8 + x^4 + x^3 + x + 1
    (9, 0x211),    // x^9 + x^4 + 1
    (10, 0x409),   // x^10 + x^3 + 1
    (11, 0x805),   // x^11 + x^2 + 1
    (12, 0x1053),  // x^12 + x^6 + x^4 + x + 1
    (13, 0x201B),  // x^13 + x^4 + x^3 + x + 1
    (14, 0x4443),  // x^14 + x^10 + x^6 + x + 1
    (15, 0x8003),  // x^15 + x + 1
    (16, 0x1100B), // x^16 + x^12 + x^3 + x + 1
];

pub fn irreducible_poly(degree: u32) -> Result<u32, WomError> {
    IRREDUCIBLE_POLYS
        .iter()
        .find(|(d, _)| *d == degree)
        .map(|&(_, p)| p)
        .ok_or(WomError::UnsupportedDegree(degree))
}

/// Field element; bit `i` of `value` is the coefficient of `x^i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Gf2nElement {
    value: u32,
    degree: u32,
}

impl Gf2nElement {
    pub fn new(value: u32, degree: u32) -> Result<Self, WomError> {
        irreducible_poly(degree)?;
        if value >> degree != 0 {
            return Err(WomError::ParamError(format!(
                "value {value:#x} does not fit degree {degree}"
            )));
        }
        Ok(Self { value, degree })
    }

    pub fn value(&self) -> u32 {
        self.value
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn modulus(&self) -> u32 {
        irreducible_poly(self.degree).expect("checked on construction")
    }

    pub fn add(&self, other: &Self) -> Result<Self, WomError> {
        same_field(self, other)?;
        Ok(Self {
            value: self.value ^ other.value,
            degree: self.degree,
        })
    }

    pub fn mul(&self, other: &Self) -> Result<Self, WomError> {
        gf2n_mul(self, other)
    }
}

fn same_field(a: &Gf2nElement, b: &Gf2nElement) -> Result<(), WomError> {
    if a.degree != b.degree {
        return Err(WomError::DegreeMismatch(a.degree, b.degree));
    }
    Ok(())
}

/// Carry-less product reduced by the field polynomial.
pub fn gf2n_mul(a: &Gf2nElement, b: &Gf2nElement) -> Result<Gf2nElement, WomError> {
    same_field(a, b)?;
    Ok(Gf2nElement {
        value: mul_raw(a.value, b.value, a.degree, a.modulus()),
        degree: a.degree,
    })
}

/// Shift-and-add multiplication, reducing as it goes.
pub(crate) fn mul_raw(a: u32, b: u32, degree: u32, modulus: u32) -> u32 {
    let mut acc = 0u32;
    let mut a = a;
    let mut b = b;
    while b != 0 {
        if b & 1 == 1 {
            acc ^= a;
        }
        b >>= 1;
        a <<= 1;
        if a >> degree & 1 == 1 {
            a ^= modulus;
        }
    }
    acc
}
