use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

/// Numeric domain the driver computes in.
pub trait Value: Clone + Debug + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn pow(&self, exp: u64) -> Self;
    fn from_rational(r: &BigRational) -> Self;
    fn binomial(n: u64, k: u64) -> Self;
    fn is_zero(&self) -> bool;
}

impl Value for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }

    fn one() -> Self {
        One::one()
    }

    fn add(&self, other: &Self) -> Self {
        self + other
    }

    fn mul(&self, other: &Self) -> Self {
        self * other
    }

    fn pow(&self, exp: u64) -> Self {
        if exp == 0 {
            return One::one();
        }
        if Zero::is_zero(self) || self.is_one() {
            return self.clone();
        }
        let mut base = self.clone();
        let mut acc: BigRational = One::one();
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    fn from_rational(r: &BigRational) -> Self {
        r.clone()
    }

    fn binomial(n: u64, k: u64) -> Self {
        BigRational::from_integer(binomial_int(n, k))
    }

    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
}

impl Value for f64 {
    fn zero() -> Self {
        0.0
    }

    fn one() -> Self {
        1.0
    }

    fn add(&self, other: &Self) -> Self {
        self + other
    }

    fn mul(&self, other: &Self) -> Self {
        self * other
    }

    fn pow(&self, exp: u64) -> Self {
        self.powf(exp as f64)
    }

    fn from_rational(r: &BigRational) -> Self {
        r.to_f64().unwrap_or(f64::NAN)
    }

    fn binomial(n: u64, k: u64) -> Self {
        binomial_int(n, k).to_f64().unwrap_or(f64::INFINITY)
    }

    fn is_zero(&self) -> bool {
        *self == 0.0
    }
}

pub(crate) fn binomial_int(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    num_integer::binomial(BigInt::from(n), BigInt::from(k.min(n - k)))
}
