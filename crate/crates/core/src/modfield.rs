//! Exact arithmetic in ℤ/dℤ for an odd prime `d`, and the d-th roots of unity.
//!
//! [`Field`] is the working context passed to every other module: it holds the
//! modulus, the inverse of 2 and a table of the `d` powers of `ω = exp(2πi/d)`.
//! Exponents are always reduced mod `d` before lookup, so identities such as
//! `ω^a ω^b = ω^(a+b)` hold without phase drift.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::Complex;

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;

/// Default absolute tolerance for complex comparisons.
pub const DEFAULT_TOL: f64 = 1e-10;

/// True iff `d` is prime and `d != 2`.
pub fn check_odd_prime(d: u64) -> bool {
    if d < 3 || d.is_multiple_of(2) {
        return false;
    }
    let mut k = 3;
    while k * k <= d {
        if d.is_multiple_of(k) {
            return false;
        }
        k += 2;
    }
    true
}

/// A residue modulo an odd prime, stored canonically in `[0, modulus)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElement {
    value: u32,
    modulus: u32,
}

impl FieldElement {
    /// Reduces `value` into `[0, modulus)`. Rejects moduli that are not odd primes.
    pub fn new(value: i64, modulus: u64) -> Result<Self> {
        if !check_odd_prime(modulus) || modulus > u32::MAX as u64 {
            return Err(Error::NotOddPrime(modulus));
        }
        Ok(Self::reduced(value, modulus as u32))
    }

    pub(crate) fn reduced(value: i64, modulus: u32) -> Self {
        FieldElement {
            value: value.rem_euclid(modulus as i64) as u32,
            modulus,
        }
    }

    pub fn value(self) -> u32 {
        self.value
    }

    pub fn modulus(self) -> u32 {
        self.modulus
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    fn same_modulus(self, other: Self) -> Result<()> {
        if self.modulus != other.modulus {
            return Err(Error::ModulusMismatch(self.modulus, other.modulus));
        }
        Ok(())
    }

    pub fn try_add(self, other: Self) -> Result<Self> {
        self.same_modulus(other)?;
        Ok(Self::reduced(
            self.value as i64 + other.value as i64,
            self.modulus,
        ))
    }

    pub fn try_sub(self, other: Self) -> Result<Self> {
        self.same_modulus(other)?;
        Ok(Self::reduced(
            self.value as i64 - other.value as i64,
            self.modulus,
        ))
    }

    pub fn try_mul(self, other: Self) -> Result<Self> {
        self.same_modulus(other)?;
        let p = (self.value as u64 * other.value as u64) % self.modulus as u64;
        Ok(FieldElement {
            value: p as u32,
            modulus: self.modulus,
        })
    }

    pub fn pow(self, mut exp: u64) -> Self {
        let m = self.modulus as u64;
        let mut base = self.value as u64 % m;
        let mut acc = 1u64 % m;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * base % m;
            }
            base = base * base % m;
            exp >>= 1;
        }
        FieldElement {
            value: acc as u32,
            modulus: self.modulus,
        }
    }

    /// Multiplicative inverse via Fermat's little theorem.
    pub fn inv(self) -> Result<Self> {
        if self.value == 0 {
            return Err(Error::NoInverse);
        }
        Ok(self.pow(self.modulus as u64 - 2))
    }

    /// `x · 2⁻¹ mod d`. For odd `d`, `2⁻¹ = (d+1)/2`.
    pub fn half(self) -> Self {
        let inv2 = (self.modulus as u64).div_ceil(2);
        FieldElement {
            value: (self.value as u64 * inv2 % self.modulus as u64) as u32,
            modulus: self.modulus,
        }
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl Add for FieldElement {
    type Output = FieldElement;
    fn add(self, rhs: Self) -> Self {
        self.try_add(rhs).expect("mismatched moduli")
    }
}

impl Sub for FieldElement {
    type Output = FieldElement;
    fn sub(self, rhs: Self) -> Self {
        self.try_sub(rhs).expect("mismatched moduli")
    }
}

impl Mul for FieldElement {
    type Output = FieldElement;
    fn mul(self, rhs: Self) -> Self {
        self.try_mul(rhs).expect("mismatched moduli")
    }
}

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> Self {
        Self::reduced(-(self.value as i64), self.modulus)
    }
}

/// `ω^exponent` with `ω = exp(2πi/d)`; the exponent lives in ℤ/dℤ.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RootOfUnity {
    pub exponent: FieldElement,
}

impl RootOfUnity {
    pub fn to_complex(self) -> C64 {
        let d = self.exponent.modulus() as f64;
        let theta = 2.0 * std::f64::consts::PI * self.exponent.value() as f64 / d;
        C64::new(theta.cos(), theta.sin())
    }
}

impl Mul for RootOfUnity {
    type Output = RootOfUnity;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, rhs: Self) -> Self {
        RootOfUnity {
            exponent: self.exponent + rhs.exponent,
        }
    }
}

/// Arithmetic context for ℤ/dℤ with `d` an odd prime.
///
/// Residues handled by the other modules are plain `u32` values in `[0, d)`;
/// all reductions go through this type so that no signed arithmetic leaks into
/// indices.
#[derive(Clone, Debug)]
pub struct Field {
    d: u32,
    inv2: u32,
    omega: Vec<C64>,
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.d == other.d
    }
}

impl Field {
    pub fn new(d: u64) -> Result<Self> {
        if !check_odd_prime(d) || d > u16::MAX as u64 {
            return Err(Error::NotOddPrime(d));
        }
        let omega = (0..d)
            .map(|k| {
                RootOfUnity {
                    exponent: FieldElement::reduced(k as i64, d as u32),
                }
                .to_complex()
            })
            .collect();
        Ok(Field {
            d: d as u32,
            inv2: d.div_ceil(2) as u32,
            omega,
        })
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn dim(&self) -> usize {
        self.d as usize
    }

    pub fn elem(&self, v: i64) -> FieldElement {
        FieldElement::reduced(v, self.d)
    }

    pub fn reduce(&self, v: i64) -> u32 {
        v.rem_euclid(self.d as i64) as u32
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        ((a as u64 + b as u64) % self.d as u64) as u32
    }

    pub fn sub(&self, a: u32, b: u32) -> u32 {
        ((a as u64 + self.d as u64 - (b % self.d) as u64) % self.d as u64) as u32
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.d as u64) as u32
    }

    pub fn neg(&self, a: u32) -> u32 {
        self.sub(0, a)
    }

    pub fn half(&self, a: u32) -> u32 {
        self.mul(a, self.inv2)
    }

    pub fn inv(&self, a: u32) -> Result<u32> {
        Ok(self.elem(a as i64).inv()?.value())
    }

    /// Table lookup of `ω^k`; `k` is reduced mod `d` first.
    pub fn omega(&self, k: u32) -> C64 {
        self.omega[(k % self.d) as usize]
    }

    pub fn omega_signed(&self, k: i64) -> C64 {
        self.omega[self.reduce(k) as usize]
    }

    pub fn root(&self, exponent: FieldElement) -> RootOfUnity {
        RootOfUnity { exponent }
    }

    pub fn residues(&self) -> std::ops::Range<u32> {
        0..self.d
    }
}
