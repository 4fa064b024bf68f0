//! Numeric rings the engine can accumulate in.
//!
//! The closed-form sums are evaluated in any commutative ring that can embed
//! the integers. Exact counting uses [`BigInt`] (every unweighted term is an
//! integer once the counting-quantifier divisors are cleared), rational
//! weights use [`BigRational`], and `f64` is available for quick estimates.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Send
    + Sync
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn from_integer(value: &BigInt) -> Self;

    /// `None` when the value has no exact representation in this ring.
    fn from_rational(value: &BigRational) -> Option<Self>;

    fn to_rational(&self) -> Option<BigRational>;

    /// `(odd, t)` with `self = odd · 2^t`; rings without a cheap split return `t = 0`.
    fn split_pow2(&self) -> (Self, u64) {
        (self.clone(), 0)
    }

    fn mul_pow2(&self, shift: u64) -> Self {
        let two = Self::from_integer(&BigInt::from(2));
        self.clone() * two.pow_u64(shift)
    }

    fn pow_u64(&self, mut exp: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * base.clone();
            }
            exp >>= 1;
            if exp > 0 {
                base = base.clone() * base;
            }
        }
        acc
    }
}

impl Scalar for BigInt {
    fn from_integer(value: &BigInt) -> Self {
        value.clone()
    }

    fn from_rational(value: &BigRational) -> Option<Self> {
        value.is_integer().then(|| value.to_integer())
    }

    fn to_rational(&self) -> Option<BigRational> {
        Some(BigRational::from_integer(self.clone()))
    }

    fn split_pow2(&self) -> (Self, u64) {
        match self.trailing_zeros() {
            Some(t) if t > 0 => (self >> t, t),
            _ => (self.clone(), 0),
        }
    }

    fn mul_pow2(&self, shift: u64) -> Self {
        self << usize::try_from(shift).expect("shift exceeds addressable size")
    }

    // Table entries are small integers, frequently powers of two; split off
    // the two-adic part so it becomes a shift.
    fn pow_u64(&self, exp: u64) -> Self {
        if exp == 0 {
            return BigInt::one();
        }
        if self.is_zero() {
            return BigInt::zero();
        }
        let twos = self.trailing_zeros().unwrap_or(0);
        let odd = self >> twos;
        let odd_pow = if odd.is_one() {
            BigInt::one()
        } else if let Some(e) = exp.to_u32() {
            num_traits::pow::Pow::pow(&odd, e)
        } else {
            let mut base = odd;
            let mut acc = BigInt::one();
            let mut e = exp;
            while e > 0 {
                if e & 1 == 1 {
                    acc *= &base;
                }
                e >>= 1;
                if e > 0 {
                    base = &base * &base;
                }
            }
            acc
        };
        let shift = twos
            .checked_mul(exp)
            .and_then(|s| usize::try_from(s).ok())
            .expect("power exceeds addressable size");
        odd_pow << shift
    }
}

impl Scalar for BigRational {
    fn from_integer(value: &BigInt) -> Self {
        BigRational::from_integer(value.clone())
    }

    fn from_rational(value: &BigRational) -> Option<Self> {
        Some(value.clone())
    }

    fn to_rational(&self) -> Option<BigRational> {
        Some(self.clone())
    }

    fn split_pow2(&self) -> (Self, u64) {
        let (odd, t) = self.numer().split_pow2();
        (BigRational::new_raw(odd, self.denom().clone()), t)
    }

    fn mul_pow2(&self, shift: u64) -> Self {
        BigRational::new(self.numer().mul_pow2(shift), self.denom().clone())
    }

    fn pow_u64(&self, exp: u64) -> Self {
        let numer = self.numer().pow_u64(exp);
        let denom = self.denom().pow_u64(exp);
        BigRational::new(numer, denom)
    }
}

impl Scalar for f64 {
    fn from_integer(value: &BigInt) -> Self {
        value.to_f64().unwrap_or(f64::INFINITY)
    }

    fn from_rational(value: &BigRational) -> Option<Self> {
        value.to_f64()
    }

    fn to_rational(&self) -> Option<BigRational> {
        BigRational::from_float(*self)
    }

    fn mul_pow2(&self, shift: u64) -> Self {
        self * 2f64.pow_u64(shift)
    }

    fn pow_u64(&self, exp: u64) -> Self {
        match i32::try_from(exp) {
            Ok(e) => self.powi(e),
            Err(_) => self.powf(exp as f64),
        }
    }
}

/// Divides an accumulated total by a positive integer denominator.
pub fn divide<S: Scalar>(total: &S, denominator: &BigInt) -> Option<BigRational> {
    let r = total.to_rational()?;
    Some(r / BigRational::from_integer(denominator.clone()))
}

/// True when `total` is an exact multiple of `denominator`.
pub fn divides(total: &BigInt, denominator: &BigInt) -> bool {
    total.is_multiple_of(denominator)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bigint_pow_matches_naive() {
        for base in [0i64, 1, 2, 3, 4, 6, 12, 48, 1024] {
            for exp in [0u64, 1, 2, 5, 17, 64] {
                let got = BigInt::from(base).pow_u64(exp);
                let mut want = BigInt::one();
                for _ in 0..exp {
                    want *= base;
                }
                assert_eq!(got, want, "{base}^{exp}");
            }
        }
    }

    #[test]
    fn power_of_two_split() {
        let (odd, t) = BigInt::from(48).split_pow2();
        assert_eq!((odd, t), (BigInt::from(3), 4));
        assert_eq!(BigInt::from(3).mul_pow2(4), BigInt::from(48));
        let r = BigRational::new(12.into(), 5.into());
        let (odd, t) = r.split_pow2();
        assert_eq!(odd.mul_pow2(t), r);
        assert_eq!(BigInt::zero().split_pow2().1, 0);
    }

    #[test]
    fn rational_pow() {
        let half = BigRational::new(1.into(), 2.into());
        assert_eq!(half.pow_u64(3), BigRational::new(1.into(), 8.into()));
        let neg = BigRational::from_integer((-2).into());
        assert_eq!(neg.pow_u64(3), BigRational::from_integer((-8).into()));
    }

    #[test]
    fn integer_ring_rejects_fractions() {
        let third = BigRational::new(1.into(), 3.into());
        assert!(<BigInt as Scalar>::from_rational(&third).is_none());
        let six = BigRational::from_integer(6.into());
        assert_eq!(
            <BigInt as Scalar>::from_rational(&six),
            Some(BigInt::from(6))
        );
    }
}
