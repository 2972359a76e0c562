//! Double-double floating point: an unevaluated sum `hi + lo` of two `f64`
//! with `|lo| <= ulp(hi)/2`, giving roughly 31 significant decimal digits.
//!
//! Only the field operations, square root and floor are provided; everything
//! in this crate that needs extended precision is arranged so that no
//! transcendental function has to be evaluated in double-double.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Rem, Sub, SubAssign};

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, ToPrimitive, Zero};

/// Decimal digits carried by [`Dd`].
pub const WORKING_DIGITS: u32 = 31;

/// Complex double-double.
pub type Cdd = Complex<Dd>;

#[derive(Clone, Copy, Default)]
pub struct Dd {
    hi: f64,
    lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let e = b - (s - a);
    (s, e)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let e = a.mul_add(b, -p);
    (p, e)
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };
    pub const PI: Dd = Dd {
        hi: 3.141_592_653_589_793,
        lo: 1.224_646_799_147_353_2e-16,
    };
    pub const TWO_PI: Dd = Dd {
        hi: 6.283_185_307_179_586,
        lo: 2.449_293_598_294_706_4e-16,
    };

    pub const fn new(hi: f64, lo: f64) -> Self {
        Dd { hi, lo }
    }

    pub fn from_f64(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    pub fn hi(self) -> f64 {
        self.hi
    }

    pub fn lo(self) -> f64 {
        self.lo
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn abs(self) -> Self {
        if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) {
            -self
        } else {
            self
        }
    }

    pub fn is_finite(self) -> bool {
        self.hi.is_finite() && self.lo.is_finite()
    }

    pub fn floor(self) -> Self {
        let hi = self.hi.floor();
        if hi == self.hi {
            let (h, l) = quick_two_sum(hi, self.lo.floor());
            Dd { hi: h, lo: l }
        } else {
            Dd { hi, lo: 0.0 }
        }
    }

    pub fn sqrt(self) -> Self {
        if self.hi <= 0.0 {
            return Dd::ZERO;
        }
        // one Newton step from the f64 root
        let x = self.hi.sqrt();
        let xd = Dd::from_f64(x);
        let r = self - xd * xd;
        xd + r / Dd::from_f64(2.0 * x)
    }

    pub fn powi(self, n: i32) -> Self {
        if n < 0 {
            return Dd::ONE / self.powi(-n);
        }
        let mut base = self;
        let mut e = n as u32;
        let mut acc = Dd::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    /// Correctly-rounded-to-double-double conversion of an exact rational.
    pub fn from_rational(q: &BigRational) -> Self {
        if q.is_zero() {
            return Dd::ZERO;
        }
        let neg = q.is_negative();
        let num = q.numer().abs();
        let den = q.denom().clone();
        // scale so the integer quotient carries ~120 bits
        let shift = 120i64 - (num.bits() as i64 - den.bits() as i64);
        let scaled = if shift >= 0 {
            (num << shift as usize) / den
        } else {
            num / (den << (-shift) as usize)
        };
        let v = dd_from_bigint(&scaled);
        let v = v * Dd::from_f64(2f64).powi(-(shift as i32));
        if neg {
            -v
        } else {
            v
        }
    }
}

fn dd_from_bigint(n: &BigInt) -> Dd {
    let hi = n.to_f64().unwrap_or(f64::INFINITY);
    if !hi.is_finite() {
        return Dd::from_f64(hi);
    }
    let rest = n - BigInt::from_f64_exact(hi);
    let mid = rest.to_f64().unwrap_or(0.0);
    let rest2 = rest - BigInt::from_f64_exact(mid);
    let low = rest2.to_f64().unwrap_or(0.0);
    Dd::from_f64(hi) + Dd::from_f64(mid) + Dd::from_f64(low)
}

trait FromF64Exact {
    fn from_f64_exact(x: f64) -> Self;
}

impl FromF64Exact for BigInt {
    fn from_f64_exact(x: f64) -> Self {
        num_traits::FromPrimitive::from_f64(x).unwrap_or_default()
    }
}

impl From<f64> for Dd {
    fn from(x: f64) -> Self {
        Dd::from_f64(x)
    }
}

impl From<i64> for Dd {
    fn from(x: i64) -> Self {
        let hi = x as f64;
        let lo = (x - hi as i64) as f64;
        let (h, l) = quick_two_sum(hi, lo);
        Dd { hi: h, lo: l }
    }
}

impl From<u64> for Dd {
    fn from(x: u64) -> Self {
        let hi = x as f64;
        let lo = (x as i128 - hi as i128) as f64;
        let (h, l) = quick_two_sum(hi, lo);
        Dd { hi: h, lo: l }
    }
}

impl From<usize> for Dd {
    fn from(x: usize) -> Self {
        Dd::from(x as u64)
    }
}

impl From<i32> for Dd {
    fn from(x: i32) -> Self {
        Dd::from_f64(x as f64)
    }
}

impl Add for Dd {
    type Output = Dd;
    #[inline]
    fn add(self, b: Dd) -> Dd {
        let (s1, s2) = two_sum(self.hi, b.hi);
        let (t1, t2) = two_sum(self.lo, b.lo);
        let s2 = s2 + t1;
        let (s1, s2) = quick_two_sum(s1, s2);
        let s2 = s2 + t2;
        let (hi, lo) = quick_two_sum(s1, s2);
        Dd { hi, lo }
    }
}

impl Neg for Dd {
    type Output = Dd;
    #[inline]
    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Sub for Dd {
    type Output = Dd;
    #[inline]
    fn sub(self, b: Dd) -> Dd {
        self + (-b)
    }
}

impl Mul for Dd {
    type Output = Dd;
    #[inline]
    fn mul(self, b: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, b.hi);
        let e = e + (self.hi * b.lo + self.lo * b.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }
}

impl Div for Dd {
    type Output = Dd;
    #[inline]
    fn div(self, b: Dd) -> Dd {
        let q1 = self.hi / b.hi;
        let r = self - b * Dd::from_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b * Dd::from_f64(q2);
        let q3 = r.hi / b.hi;
        let (q1, q2) = quick_two_sum(q1, q2);
        Dd { hi: q1, lo: q2 } + Dd::from_f64(q3)
    }
}

impl Rem for Dd {
    type Output = Dd;
    fn rem(self, b: Dd) -> Dd {
        let q = (self / b).floor();
        self - q * b
    }
}

macro_rules! assign_op {
    ($tr:ident, $m:ident, $op:tt) => {
        impl $tr for Dd {
            #[inline]
            fn $m(&mut self, b: Dd) {
                *self = *self $op b;
            }
        }
    };
}
assign_op!(AddAssign, add_assign, +);
assign_op!(SubAssign, sub_assign, -);
assign_op!(MulAssign, mul_assign, *);
assign_op!(DivAssign, div_assign, /);

impl PartialEq for Dd {
    fn eq(&self, other: &Self) -> bool {
        self.hi == other.hi && self.lo == other.lo
    }
}

impl PartialOrd for Dd {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi) {
            Some(Ordering::Equal) => self.lo.partial_cmp(&other.lo),
            o => o,
        }
    }
}

impl Zero for Dd {
    fn zero() -> Self {
        Dd::ZERO
    }
    fn is_zero(&self) -> bool {
        self.hi == 0.0 && self.lo == 0.0
    }
}

impl One for Dd {
    fn one() -> Self {
        Dd::ONE
    }
}

impl Num for Dd {
    type FromStrRadixErr = std::num::ParseFloatError;
    fn from_str_radix(s: &str, _radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        s.parse::<f64>().map(Dd::from_f64)
    }
}

impl fmt::Debug for Dd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Dd({:e} + {:e})", self.hi, self.lo)
    }
}

impl fmt::Display for Dd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.to_f64(), f)
    }
}

/// `|z|` to f64 accuracy; used for step control and error bookkeeping.
pub fn cabs(z: Cdd) -> f64 {
    z.re.to_f64().hypot(z.im.to_f64())
}

pub fn cdd(re: f64, im: f64) -> Cdd {
    Complex::new(Dd::from_f64(re), Dd::from_f64(im))
}

pub fn creal(x: Dd) -> Cdd {
    Complex::new(x, Dd::ZERO)
}

pub fn to_c64(z: Cdd) -> Complex<f64> {
    Complex::new(z.re.to_f64(), z.im.to_f64())
}

pub fn from_c64(z: Complex<f64>) -> Cdd {
    cdd(z.re, z.im)
}

/// `2πi` as a complex double-double.
pub fn two_pi_i() -> Cdd {
    Complex::new(Dd::ZERO, Dd::TWO_PI)
}

/// `(2πi)^k` for any integer `k`.
pub fn two_pi_i_pow(k: i32) -> Cdd {
    let mag = Dd::TWO_PI.powi(k);
    match k.rem_euclid(4) {
        0 => Complex::new(mag, Dd::ZERO),
        1 => Complex::new(Dd::ZERO, mag),
        2 => Complex::new(-mag, Dd::ZERO),
        _ => Complex::new(Dd::ZERO, -mag),
    }
}

pub fn cpowi(z: Cdd, n: u32) -> Cdd {
    let mut acc = Complex::new(Dd::ONE, Dd::ZERO);
    let mut base = z;
    let mut e = n;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base;
        }
        base = base * base;
        e >>= 1;
    }
    acc
}

pub fn cscale(z: Cdd, s: Dd) -> Cdd {
    Complex::new(z.re * s, z.im * s)
}

/// The root of unity `exp(2πi·a/d)` to double-double accuracy, obtained by
/// Newton refinement of the f64 value on `z^d = 1`.
pub fn root_of_unity(a: i64, d: i64) -> Cdd {
    assert!(d > 0, "modulus must be positive");
    let a = a.rem_euclid(d);
    let theta = std::f64::consts::TAU * (a as f64) / (d as f64);
    let mut z = cdd(theta.cos(), theta.sin());
    let dd = Dd::from(d);
    for _ in 0..3 {
        let zd1 = cpowi(z, (d - 1) as u32);
        let f = zd1 * z - Complex::new(Dd::ONE, Dd::ZERO);
        let fp = cscale(zd1, dd);
        z = z - f / fp;
    }
    z
}
