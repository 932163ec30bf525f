//! Arithmetic over the small binary extension fields GF(2^w), w = 1..=8.
//!
//! Coding coefficients live in one of these fields; the field is picked per
//! session so that its order is at least the number of receivers (see
//! [`field_for_receivers`]). Addition is carry-less (XOR). Multiplication and
//! inversion go through lookup tables built once at construction, so the hot
//! paths in the encoder and the buffers are table reads only.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// Largest supported field width in bits (GF(256)).
pub const MAX_WIDTH: u32 = 8;

/// Reduction polynomials for GF(2^w), w = 1..=8, with the leading term
/// included (e.g. 0x13 = x^4 + x + 1). All are irreducible over GF(2);
/// `FieldSpec::new` re-verifies that at construction.
const REDUCTION_POLYS: [u32; MAX_WIDTH as usize] = [
    0x3,   // x + 1
    0x7,   // x^2 + x + 1
    0xb,   // x^3 + x + 1
    0x13,  // x^4 + x + 1
    0x25,  // x^5 + x^2 + 1
    0x43,  // x^6 + x + 1
    0x83,  // x^7 + x + 1
    0x11d, // x^8 + x^4 + x^3 + x^2 + 1
];

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GaloisError {
    /// Zero has no multiplicative inverse.
    #[error("zero has no multiplicative inverse")]
    InvalidInverse,
    /// Requested a field wider than the supported 8 bits.
    #[error("field width {width_bits} out of range 1..={MAX_WIDTH}")]
    UnsupportedWidth { width_bits: u32 },
    /// More receivers than GF(256) can serve with distinct coefficients.
    #[error("{count} receivers exceed the largest supported field (order 256)")]
    TooManyReceivers { count: usize },
}

/// An element of GF(2^w), stored as its polynomial bit pattern.
///
/// The value is only meaningful relative to a [`FieldSpec`]; operations
/// check `value < order` in debug builds.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElement(pub u8);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    #[inline]
    pub fn value(self) -> u8 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// One concrete field GF(2^w): reduction polynomial plus full multiply and
/// inverse tables. Immutable after construction, safe to share across threads.
pub struct FieldSpec {
    width_bits: u32,
    order: u16,
    reduction_poly: u32,
    mul_table: Vec<u8>,
    inv_table: Vec<u8>,
}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldSpec")
            .field("width_bits", &self.width_bits)
            .field("order", &self.order)
            .field("reduction_poly", &self.reduction_poly)
            .finish()
    }
}

impl FieldSpec {
    /// Builds GF(2^w) for `width_bits` in 1..=8, verifying that the fixed
    /// reduction polynomial is irreducible before tabulating.
    pub fn new(width_bits: u32) -> Result<FieldSpec, GaloisError> {
        if width_bits == 0 || width_bits > MAX_WIDTH {
            return Err(GaloisError::UnsupportedWidth { width_bits });
        }
        let poly = REDUCTION_POLYS[(width_bits - 1) as usize];
        assert!(
            poly_is_irreducible(poly, width_bits),
            "reduction polynomial {poly:#x} for width {width_bits} is reducible"
        );
        let order = 1u16 << width_bits;
        let n = order as usize;

        let mut mul_table = vec![0u8; n * n];
        for a in 0..n {
            for b in a..n {
                let p = mul_shift_reduce(a as u32, b as u32, poly, width_bits);
                mul_table[a * n + b] = p;
                mul_table[b * n + a] = p;
            }
        }

        // a^-1 is the unique b with a*b = 1; scan each row once.
        let mut inv_table = vec![0u8; n];
        for a in 1..n {
            let row = &mul_table[a * n..(a + 1) * n];
            let b = row.iter().position(|&p| p == 1).expect("unit in field row");
            inv_table[a] = b as u8;
        }

        Ok(FieldSpec {
            width_bits,
            order,
            reduction_poly: poly,
            mul_table,
            inv_table,
        })
    }

    #[inline]
    pub fn width_bits(&self) -> u32 {
        self.width_bits
    }

    /// Field order M = 2^w.
    #[inline]
    pub fn order(&self) -> u16 {
        self.order
    }

    #[inline]
    pub fn reduction_poly(&self) -> u32 {
        self.reduction_poly
    }

    #[inline]
    fn check(&self, a: FieldElement) {
        debug_assert!(
            (a.0 as u16) < self.order,
            "element {} outside GF(2^{})",
            a.0,
            self.width_bits
        );
    }

    /// Addition (== subtraction): carry-less, so plain XOR.
    #[inline]
    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.check(a);
        self.check(b);
        FieldElement(a.0 ^ b.0)
    }

    #[inline]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.check(a);
        self.check(b);
        FieldElement(self.mul_table[a.0 as usize * self.order as usize + b.0 as usize])
    }

    /// Multiplicative inverse; zero is rejected.
    #[inline]
    pub fn inv(&self, a: FieldElement) -> Result<FieldElement, GaloisError> {
        self.check(a);
        if a.is_zero() {
            return Err(GaloisError::InvalidInverse);
        }
        Ok(FieldElement(self.inv_table[a.0 as usize]))
    }

    /// All field elements in increasing bit-pattern order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.order).map(|v| FieldElement(v as u8))
    }
}

/// Smallest field GF(2^w) whose order covers `count` receivers, with a floor
/// of GF(2). The encoder's coefficient-veto step needs order >= count.
pub fn field_for_receivers(count: usize) -> Result<Arc<FieldSpec>, GaloisError> {
    assert!(count >= 1, "receiver count must be positive");
    if count > 256 {
        return Err(GaloisError::TooManyReceivers { count });
    }
    let needed = count.max(2) as u32;
    let width = needed.next_power_of_two().trailing_zeros();
    Ok(Arc::new(FieldSpec::new(width)?))
}

/// Shift-and-add product of two GF(2^w) elements, reducing on every overflow
/// of the top bit. Used only to fill the tables.
fn mul_shift_reduce(mut a: u32, mut b: u32, poly: u32, width: u32) -> u8 {
    let mut acc = 0u32;
    while b != 0 {
        if b & 1 != 0 {
            acc ^= a;
        }
        b >>= 1;
        a <<= 1;
        if a & (1 << width) != 0 {
            a ^= poly;
        }
    }
    acc as u8
}

/// GF(2)[x] trial division: `poly` of degree `degree` is irreducible iff no
/// polynomial of degree 1..=degree/2 divides it. Exhaustive but tiny for
/// degree <= 8.
fn poly_is_irreducible(poly: u32, degree: u32) -> bool {
    for d in 1..=degree / 2 {
        for candidate in (1u32 << d)..(1u32 << (d + 1)) {
            if poly_rem_gf2(poly, candidate) == 0 {
                return false;
            }
        }
    }
    true
}

/// Remainder of GF(2)[x] long division.
fn poly_rem_gf2(mut a: u32, b: u32) -> u32 {
    let db = 31 - b.leading_zeros();
    while a != 0 {
        let da = 31 - a.leading_zeros();
        if da < db {
            break;
        }
        a ^= b << (da - db);
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent oracle: full carry-less multiply, then explicit polynomial
    /// long division. Different code path from the table builder, which
    /// reduces incrementally while shifting.
    fn mul_oracle(a: u8, b: u8, poly: u32, width: u32) -> u8 {
        let mut prod = 0u32;
        for i in 0..8 {
            if b & (1 << i) != 0 {
                prod ^= (a as u32) << i;
            }
        }
        while prod >> width != 0 {
            let deg = 31 - prod.leading_zeros();
            prod ^= poly << (deg - width);
        }
        prod as u8
    }

    // ─── construction ───────────────────────────────────────────────────

    #[test]
    fn rejects_unsupported_widths() {
        assert_eq!(
            FieldSpec::new(0).unwrap_err(),
            GaloisError::UnsupportedWidth { width_bits: 0 }
        );
        assert_eq!(
            FieldSpec::new(9).unwrap_err(),
            GaloisError::UnsupportedWidth { width_bits: 9 }
        );
    }

    #[test]
    fn all_reduction_polys_are_irreducible() {
        for w in 1..=MAX_WIDTH {
            let f = FieldSpec::new(w).unwrap();
            assert_eq!(f.order(), 1 << w);
            assert!(poly_is_irreducible(f.reduction_poly(), w));
        }
    }

    #[test]
    fn irreducibility_check_catches_composite() {
        // x^2 + 1 = (x + 1)^2 over GF(2).
        assert!(!poly_is_irreducible(0x5, 2));
        // x^4 + x^3 + x^2 + x = x * (...).
        assert!(!poly_is_irreducible(0x1e, 4));
    }

    // ─── known products, worked out by hand ─────────────────────────────

    #[test]
    fn gf4_products() {
        let f = FieldSpec::new(2).unwrap();
        // x * x = x^2 = x + 1 mod (x^2 + x + 1)
        assert_eq!(f.mul(FieldElement(2), FieldElement(2)), FieldElement(3));
        // x * (x + 1) = x^2 + x = 1
        assert_eq!(f.mul(FieldElement(2), FieldElement(3)), FieldElement(1));
        // (x + 1)^2 = x^2 + 1 = x
        assert_eq!(f.mul(FieldElement(3), FieldElement(3)), FieldElement(2));
    }

    #[test]
    fn gf16_products() {
        let f = FieldSpec::new(4).unwrap();
        // x^2 * x^2 = x^4 = x + 1 mod (x^4 + x + 1)
        assert_eq!(f.mul(FieldElement(4), FieldElement(4)), FieldElement(3));
        // x^3 * x^3 = x^6 = x^3 + x^2
        assert_eq!(f.mul(FieldElement(8), FieldElement(8)), FieldElement(12));
        // (x^2 + x + 1)(x^3 + 1) reduces to x^3 + x
        assert_eq!(f.mul(FieldElement(7), FieldElement(9)), FieldElement(10));
    }

    #[test]
    fn gf4_inverses() {
        let f = FieldSpec::new(2).unwrap();
        assert_eq!(f.inv(FieldElement(1)).unwrap(), FieldElement(1));
        assert_eq!(f.inv(FieldElement(2)).unwrap(), FieldElement(3));
        assert_eq!(f.inv(FieldElement(3)).unwrap(), FieldElement(2));
    }

    #[test]
    fn inverse_of_zero_is_an_error() {
        for w in 1..=MAX_WIDTH {
            let f = FieldSpec::new(w).unwrap();
            assert_eq!(f.inv(FieldElement::ZERO), Err(GaloisError::InvalidInverse));
        }
    }

    // ─── exhaustive checks ───────────────────────────────────────────────

    #[test]
    fn tables_match_independent_oracle() {
        for w in 1..=MAX_WIDTH {
            let f = FieldSpec::new(w).unwrap();
            for a in f.elements() {
                for b in f.elements() {
                    assert_eq!(
                        f.mul(a, b).value(),
                        mul_oracle(a.value(), b.value(), f.reduction_poly(), w),
                        "GF(2^{w}): {a} * {b}"
                    );
                }
            }
        }
    }

    #[test]
    fn field_axioms_exhaustive_small_widths() {
        for w in 1..=4 {
            let f = FieldSpec::new(w).unwrap();
            for a in f.elements() {
                for b in f.elements() {
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    for c in f.elements() {
                        assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                        assert_eq!(
                            f.mul(a, f.add(b, c)),
                            f.add(f.mul(a, b), f.mul(a, c)),
                            "distributivity in GF(2^{w})"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn every_nonzero_element_has_working_inverse() {
        for w in 1..=MAX_WIDTH {
            let f = FieldSpec::new(w).unwrap();
            for a in f.elements().skip(1) {
                let ai = f.inv(a).unwrap();
                assert_eq!(f.mul(a, ai), FieldElement::ONE, "GF(2^{w}): {a}");
            }
        }
    }

    // ─── field selection ─────────────────────────────────────────────────

    #[test]
    fn picks_smallest_field_covering_receivers() {
        let cases = [
            (1, 2),
            (2, 2),
            (3, 4),
            (4, 4),
            (5, 8),
            (8, 8),
            (9, 16),
            (17, 32),
            (129, 256),
            (256, 256),
        ];
        for (count, order) in cases {
            let f = field_for_receivers(count).unwrap();
            assert_eq!(f.order(), order, "count {count}");
            assert!(u16::from(f.order()) >= count.max(2) as u16);
        }
        assert_eq!(
            field_for_receivers(257).unwrap_err(),
            GaloisError::TooManyReceivers { count: 257 }
        );
    }
}
