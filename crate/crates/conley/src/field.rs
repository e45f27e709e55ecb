//! Exact arithmetic in the prime field Z/pZ.
//!
//! Every matrix entry in this crate is a residue in `[0, p)` for a prime `p`
//! held by a [`PrimeField`] descriptor. The descriptor exposes raw residue
//! arithmetic (used by the matrix kernels, which store bare `u64` residues),
//! while [`FieldElement`] pairs a residue with its field for the checked,
//! user-facing API.

use thiserror::Error;

/// Largest accepted characteristic. Products of two reduced residues then fit
/// in a `u64` without overflow.
pub const MAX_CHARACTERISTIC: u64 = 1 << 31;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("characteristic {0} is not prime")]
    NotPrime(u64),
    #[error("characteristic {0} exceeds the supported maximum 2^31")]
    TooLarge(u64),
    #[error("division by zero in Z/{0}Z")]
    DivisionByZero(u64),
    #[error("mismatched field characteristics {0} and {1}")]
    MismatchedFields(u64, u64),
}

/// Descriptor of the prime field Z/pZ.
///
/// Construction checks primality, so a `PrimeField` value is always a genuine
/// field. All operations take and return fully reduced residues.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    /// Creates the field Z/pZ, rejecting composite or oversized moduli.
    pub fn new(p: u64) -> Result<Self, FieldError> {
        if p > MAX_CHARACTERISTIC {
            return Err(FieldError::TooLarge(p));
        }
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        Ok(Self { p })
    }

    /// The field with two elements, the default everywhere in this crate.
    pub fn f2() -> Self {
        Self { p: 2 }
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    /// Reduces an arbitrary signed integer into `[0, p)`.
    pub fn reduce(&self, n: i64) -> u64 {
        let p = self.p as i64;
        (n.rem_euclid(p)) as u64
    }

    /// Wraps a residue as a checked element of this field.
    pub fn element(&self, n: i64) -> FieldElement {
        FieldElement {
            value: self.reduce(n),
            field: *self,
        }
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        a * b % self.p
    }

    /// Multiplicative inverse by the extended Euclidean algorithm.
    pub fn inv(&self, a: u64) -> Result<u64, FieldError> {
        if a == 0 {
            return Err(FieldError::DivisionByZero(self.p));
        }
        // Invariant: old_r = old_s * a (mod p), r = s * a (mod p).
        let (mut old_r, mut r) = (a as i64, self.p as i64);
        let (mut old_s, mut s) = (1i64, 0i64);
        while r != 0 {
            let q = old_r / r;
            (old_r, r) = (r, old_r - q * r);
            (old_s, s) = (s, old_s - q * s);
        }
        debug_assert_eq!(old_r, 1, "gcd(a, p) must be 1 for prime p");
        Ok(self.reduce(old_s))
    }

    /// `-a/b`, the coefficient that cancels a pivot entry `b` against `a`.
    pub fn neg_div(&self, a: u64, b: u64) -> Result<u64, FieldError> {
        Ok(self.mul(self.neg(a), self.inv(b)?))
    }
}

/// A residue together with the field it lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldElement {
    value: u64,
    field: PrimeField,
}

impl FieldElement {
    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    fn same_field(&self, other: &FieldElement) -> Result<(), FieldError> {
        if self.field != other.field {
            return Err(FieldError::MismatchedFields(self.field.p, other.field.p));
        }
        Ok(())
    }

    pub fn add(&self, other: &FieldElement) -> Result<FieldElement, FieldError> {
        self.same_field(other)?;
        Ok(FieldElement {
            value: self.field.add(self.value, other.value),
            field: self.field,
        })
    }

    pub fn sub(&self, other: &FieldElement) -> Result<FieldElement, FieldError> {
        self.same_field(other)?;
        Ok(FieldElement {
            value: self.field.sub(self.value, other.value),
            field: self.field,
        })
    }

    pub fn mul(&self, other: &FieldElement) -> Result<FieldElement, FieldError> {
        self.same_field(other)?;
        Ok(FieldElement {
            value: self.field.mul(self.value, other.value),
            field: self.field,
        })
    }

    pub fn inverse(&self) -> Result<FieldElement, FieldError> {
        Ok(FieldElement {
            value: self.field.inv(self.value)?,
            field: self.field,
        })
    }
}

impl std::fmt::Display for FieldElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.value)
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}
