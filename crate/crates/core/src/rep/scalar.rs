//! Real scalars the representation code is generic over.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// A real field type with a working precision.
///
/// `rug::Float` carries its precision in every value, so constants are built
/// from a precision argument rather than through `Zero`/`One`-style traits.
pub trait RepScalar:
    Clone
    + Debug
    + PartialOrd
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// Mantissa bits actually available for the requested precision.
    fn effective_bits(bits: u32) -> u32;
    fn from_f64(x: f64, bits: u32) -> Self;
    fn bits(&self) -> u32;
    fn sqrt(self) -> Self;
    fn abs(self) -> Self;
    fn to_f64(&self) -> f64;
    /// Decimal string with every significant digit of the value.
    fn to_decimal(&self) -> String;
    fn parse_decimal(s: &str, bits: u32) -> Option<Self>;

    fn zero(bits: u32) -> Self {
        Self::from_f64(0.0, bits)
    }

    fn one(bits: u32) -> Self {
        Self::from_f64(1.0, bits)
    }

    /// Unit roundoff `2^-bits`.
    fn unit_roundoff(bits: u32) -> f64 {
        (-(Self::effective_bits(bits) as f64)).exp2()
    }
}

impl RepScalar for f64 {
    fn effective_bits(_: u32) -> u32 {
        f64::MANTISSA_DIGITS
    }

    fn from_f64(x: f64, _: u32) -> Self {
        x
    }

    fn bits(&self) -> u32 {
        f64::MANTISSA_DIGITS
    }

    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }

    fn abs(self) -> Self {
        f64::abs(self)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn to_decimal(&self) -> String {
        // Rust prints the shortest string that round-trips.
        format!("{self:e}")
    }

    fn parse_decimal(s: &str, _: u32) -> Option<Self> {
        s.trim().parse().ok()
    }
}

impl RepScalar for rug::Float {
    fn effective_bits(bits: u32) -> u32 {
        bits.clamp(rug::float::prec_min(), rug::float::prec_max())
    }

    fn from_f64(x: f64, bits: u32) -> Self {
        rug::Float::with_val(Self::effective_bits(bits), x)
    }

    fn bits(&self) -> u32 {
        self.prec()
    }

    fn sqrt(self) -> Self {
        rug::Float::sqrt(self)
    }

    fn abs(self) -> Self {
        rug::Float::abs(self)
    }

    fn to_f64(&self) -> f64 {
        rug::Float::to_f64(self)
    }

    fn to_decimal(&self) -> String {
        format!("{self}")
    }

    fn parse_decimal(s: &str, bits: u32) -> Option<Self> {
        let parsed = rug::Float::parse(s.trim()).ok()?;
        Some(rug::Float::with_val(Self::effective_bits(bits), parsed))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn round_trip<S: RepScalar>(bits: u32) {
        let x = S::from_f64(2.0, bits).sqrt();
        let back = S::parse_decimal(&x.to_decimal(), bits).unwrap();
        assert!(back == x, "{:?} vs {:?}", back, x);
    }

    #[test]
    fn decimal_round_trip() {
        round_trip::<f64>(53);
        round_trip::<rug::Float>(212);
        round_trip::<rug::Float>(128);
    }

    #[test]
    fn precision_is_kept() {
        let x = rug::Float::from_f64(1.0, 212) / rug::Float::from_f64(3.0, 212);
        assert_eq!(x.bits(), 212);
        assert!(rug::Float::unit_roundoff(212) < 1e-63);
        assert_eq!(f64::unit_roundoff(212), f64::EPSILON / 2.0);
    }
}
