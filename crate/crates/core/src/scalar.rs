//! Coefficient backends.
//!
//! All algebraic kernels are generic over [`Scalar`]. Two rings are provided:
//! double-precision complex numbers for grid work, and exact Gaussian
//! rationals (`Complex<BigRational>`) for tolerance-free identity checks.

use num::bigint::BigInt;
use num::complex::Complex;
use num::rational::BigRational;
use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

pub type C64 = Complex<f64>;
/// Exact element of ℚ(i).
pub type CRat = Complex<BigRational>;

/// Commutative ring with i, conjugation and division, enough for every
/// coefficient computation in the crate.
pub trait Scalar:
    Clone
    + PartialEq
    + Debug
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + 'static
{
    fn zero() -> Self;
    fn one() -> Self;
    /// The imaginary unit.
    fn i() -> Self;
    fn from_ratio(num: i64, den: i64) -> Self;
    fn conj(&self) -> Self;
    fn is_zero(&self) -> bool;
    /// Multiplicative inverse; panics on zero.
    fn inv(&self) -> Self;
    /// Best-effort numeric view, used for reports and float cross-checks.
    fn to_c64(&self) -> C64;

    /// Exact embedding of a dyadic double when the ring supports it.
    fn from_f64(x: f64) -> Option<Self>;

    fn from_int(k: i64) -> Self {
        Self::from_ratio(k, 1)
    }

    fn div(&self, other: &Self) -> Self {
        self.clone() * other.inv()
    }

    /// Integer power, negative exponents via `inv`.
    fn powi(&self, k: i64) -> Self {
        let base = if k < 0 { self.inv() } else { self.clone() };
        let mut acc = Self::one();
        for _ in 0..k.unsigned_abs() {
            acc = acc * base.clone();
        }
        acc
    }

    /// (−1)^k as a ring element.
    fn sign(k: u64) -> Self {
        if k % 2 == 0 {
            Self::one()
        } else {
            -Self::one()
        }
    }
}

impl Scalar for C64 {
    fn zero() -> Self {
        Complex::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex::new(1.0, 0.0)
    }
    fn i() -> Self {
        Complex::new(0.0, 1.0)
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        Complex::new(num as f64 / den as f64, 0.0)
    }
    fn conj(&self) -> Self {
        Complex::conj(self)
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn inv(&self) -> Self {
        Complex::new(1.0, 0.0) / self
    }
    fn to_c64(&self) -> C64 {
        *self
    }
    fn from_f64(x: f64) -> Option<Self> {
        Some(Complex::new(x, 0.0))
    }
}

fn rat_zero() -> BigRational {
    BigRational::from_integer(BigInt::from(0))
}

fn rat_is_zero(r: &BigRational) -> bool {
    num::Zero::is_zero(r)
}

impl Scalar for CRat {
    fn zero() -> Self {
        Complex::new(rat_zero(), rat_zero())
    }
    fn one() -> Self {
        Complex::new(BigRational::from_integer(BigInt::from(1)), rat_zero())
    }
    fn i() -> Self {
        Complex::new(rat_zero(), BigRational::from_integer(BigInt::from(1)))
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Complex::new(BigRational::new(BigInt::from(num), BigInt::from(den)), rat_zero())
    }
    fn conj(&self) -> Self {
        Complex::new(self.re.clone(), -self.im.clone())
    }
    fn is_zero(&self) -> bool {
        rat_is_zero(&self.re) && rat_is_zero(&self.im)
    }
    fn inv(&self) -> Self {
        let nsq = self.norm_sqr();
        assert!(!rat_is_zero(&nsq), "division by zero");
        Complex::new(self.re.clone() / nsq.clone(), -self.im.clone() / nsq)
    }
    fn to_c64(&self) -> C64 {
        fn approx(r: &BigRational) -> f64 {
            let num = r.numer().to_string().parse::<f64>().unwrap_or(f64::NAN);
            let den = r.denom().to_string().parse::<f64>().unwrap_or(f64::NAN);
            num / den
        }
        Complex::new(approx(&self.re), approx(&self.im))
    }
    fn from_f64(x: f64) -> Option<Self> {
        crat_from_f64(x)
    }
}

/// Free-function form of [`Scalar::from_f64`].
pub fn scalar_from_f64<S: Scalar>(x: f64) -> Option<S> {
    S::from_f64(x)
}

/// Exact rational from a float that is an integer multiple of 2^−20
/// (covers every parameter used in the test matrix, e.g. 0.5, 1, 2).
pub fn crat_from_f64(x: f64) -> Option<CRat> {
    let scaled = x * (1u64 << 20) as f64;
    if scaled.fract() != 0.0 || !scaled.is_finite() {
        return None;
    }
    Some(Complex::new(
        BigRational::new(BigInt::from(scaled as i64), BigInt::from(1u64 << 20)),
        rat_zero(),
    ))
}
