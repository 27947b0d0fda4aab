//! Scalar abstraction shared by the fast (`f64`) and high-precision (MPFR) paths.
//!
//! Every numerical routine in the crate is generic over [`Real`]. A solve is
//! run entirely in one scalar type at one [`Precision`]; values of different
//! precisions are never mixed inside a computation.

use std::fmt::{self, Debug, Display};
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use rug::float::Constant;
use rug::ops::Pow;
use rug::Float;

use crate::error::{Error, Result};

/// Number of significant decimal digits carried by one computation.
///
/// `digits <= 16` selects the hardware `f64` path; anything larger is carried
/// out in MPFR at `bits()` binary digits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Precision {
    digits: u32,
}

impl Precision {
    /// IEEE double precision.
    pub const FAST: Precision = Precision { digits: 16 };
    /// Default for high-precision runs.
    pub const HIGH_DEFAULT_DIGITS: u32 = 100;
    pub const MIN_DIGITS: u32 = 15;
    /// Extra mantissa bits (about 10 decimal digits) so that interpolants with
    /// coefficients up to ~1e20 still meet their constraints to the requested
    /// number of digits.
    pub const GUARD_BITS: u32 = 32;

    pub fn new(digits: u32) -> Result<Self> {
        if digits < Self::MIN_DIGITS {
            return Err(Error::InvalidArgument(format!(
                "precision must be at least {} digits, got {digits}",
                Self::MIN_DIGITS
            )));
        }
        if digits <= 16 {
            Ok(Self::FAST)
        } else {
            Ok(Precision { digits })
        }
    }

    pub fn high() -> Self {
        Precision { digits: Self::HIGH_DEFAULT_DIGITS }
    }

    pub fn digits(self) -> u32 {
        self.digits
    }

    pub fn is_fast(self) -> bool {
        self.digits <= 16
    }

    /// Binary mantissa width used by the MPFR path: the requested digits
    /// plus [`Self::GUARD_BITS`].
    pub fn bits(self) -> u32 {
        if self.is_fast() {
            53
        } else {
            (f64::from(self.digits) * std::f64::consts::LOG2_10).ceil() as u32 + Self::GUARD_BITS
        }
    }

    /// Unit roundoff of the context.
    pub fn epsilon(self) -> f64 {
        if self.is_fast() {
            f64::EPSILON
        } else {
            10f64.powi(-(self.digits as i32))
        }
    }

    /// Pivot threshold below which a constraint row counts as dependent.
    ///
    /// 1e-10 in fast mode, 10^(-5/8 digits) otherwise (1e-62 at 100 digits).
    pub fn rank_tolerance(self) -> f64 {
        if self.is_fast() {
            1e-10
        } else {
            10f64.powi(-((5 * self.digits / 8) as i32))
        }
    }

    /// Relative bracket width at which root refinement stops.
    pub fn root_tolerance(self) -> f64 {
        if self.is_fast() {
            4.0 * f64::EPSILON
        } else {
            10f64.powi(-((self.digits - 10) as i32))
        }
    }

    /// Decimal exponent below which eigenvalues are flagged as untrustworthy.
    pub fn trust_floor(self) -> f64 {
        1e6 * self.epsilon()
    }
}

impl Default for Precision {
    fn default() -> Self {
        Self::high()
    }
}

impl Display for Precision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_fast() {
            write!(f, "fast")
        } else {
            write!(f, "{} digits", self.digits)
        }
    }
}

/// Real scalar used throughout the solver.
///
/// Constructors take the [`Precision`] of the surrounding computation; the
/// `f64` implementation ignores it.
pub trait Real:
    Clone
    + Debug
    + Display
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
    + for<'a> Div<&'a Self, Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + for<'a> AddAssign<&'a Self>
    + for<'a> SubAssign<&'a Self>
    + for<'a> MulAssign<&'a Self>
    + for<'a> DivAssign<&'a Self>
{
    fn from_f64(x: f64, prec: Precision) -> Self;
    /// Parses a plain decimal literal (no `pi`, no fractions).
    fn parse_decimal(s: &str, prec: Precision) -> Option<Self>;
    fn pi(prec: Precision) -> Self;

    fn sqrt(&self) -> Self;
    fn sin(&self) -> Self;
    fn cos(&self) -> Self;
    fn ln(&self) -> Self;
    fn abs(&self) -> Self;
    fn powi(&self, n: i32) -> Self;

    fn to_f64(&self) -> f64;
    fn is_finite(&self) -> bool;
    /// Decimal representation that parses back to the identical value.
    fn to_decimal(&self) -> String;
    fn is_zero(&self) -> bool;
    /// `x` at the precision of `self`.
    fn lit(&self, x: f64) -> Self;
    /// π at the precision of `self`.
    fn pi_like(&self) -> Self;

    fn zero(prec: Precision) -> Self {
        Self::from_f64(0.0, prec)
    }

    fn one(prec: Precision) -> Self {
        Self::from_f64(1.0, prec)
    }

    fn from_usize(n: usize, prec: Precision) -> Self {
        // exact for every index this crate produces
        Self::from_f64(n as f64, prec)
    }

    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    fn min_of(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    fn square(&self) -> Self {
        self.clone() * self
    }

    fn signum_f64(&self) -> f64 {
        let x = self.to_f64();
        if x > 0.0 {
            1.0
        } else if x < 0.0 {
            -1.0
        } else {
            0.0
        }
    }
}

/// Parses `"0.5"`, `"-pi"`, `"2pi"`, `"pi/2"`, `"1/64"`, `"3*pi/4"`.
pub fn parse_real<R: Real>(text: &str, prec: Precision) -> Result<R> {
    let s = text.trim();
    let bad = || Error::Parse(format!("cannot parse real number {text:?}"));
    if s.is_empty() {
        return Err(bad());
    }
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), Some(d.trim())),
        None => (s, None),
    };
    let numerator = parse_term::<R>(num, prec).ok_or_else(bad)?;
    match den {
        None => Ok(numerator),
        Some(d) => {
            let denominator = parse_term::<R>(d, prec).ok_or_else(bad)?;
            if denominator.to_f64() == 0.0 {
                return Err(Error::Parse(format!("zero denominator in {text:?}")));
            }
            Ok(numerator / denominator)
        }
    }
}

fn parse_term<R: Real>(s: &str, prec: Precision) -> Option<R> {
    let (negative, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest.trim()),
        None => (false, s.strip_prefix('+').unwrap_or(s).trim()),
    };
    let value = if let Some(coef) = body.strip_suffix("pi") {
        let coef = coef.trim().trim_end_matches('*').trim();
        let pi = R::pi(prec);
        if coef.is_empty() {
            pi
        } else {
            R::parse_decimal(coef, prec)? * pi
        }
    } else {
        R::parse_decimal(body, prec)?
    };
    Some(if negative { -value } else { value })
}

impl Real for f64 {
    fn from_f64(x: f64, _prec: Precision) -> Self {
        x
    }

    fn parse_decimal(s: &str, _prec: Precision) -> Option<Self> {
        s.parse::<f64>().ok().filter(|x| x.is_finite())
    }

    fn pi(_prec: Precision) -> Self {
        std::f64::consts::PI
    }

    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }

    fn sin(&self) -> Self {
        f64::sin(*self)
    }

    fn cos(&self) -> Self {
        f64::cos(*self)
    }

    fn ln(&self) -> Self {
        f64::ln(*self)
    }

    fn abs(&self) -> Self {
        f64::abs(*self)
    }

    fn powi(&self, n: i32) -> Self {
        f64::powi(*self, n)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }

    fn to_decimal(&self) -> String {
        format!("{self:e}")
    }

    fn is_zero(&self) -> bool {
        *self == 0.0
    }

    fn lit(&self, x: f64) -> Self {
        x
    }

    fn pi_like(&self) -> Self {
        std::f64::consts::PI
    }
}

/// MPFR-backed real number.
#[derive(Clone, PartialEq, PartialOrd)]
pub struct MpReal(Float);

impl MpReal {
    pub fn inner(&self) -> &Float {
        &self.0
    }

    pub fn into_inner(self) -> Float {
        self.0
    }

    fn decimal_digits(&self) -> usize {
        (f64::from(self.0.prec()) * std::f64::consts::LOG10_2).ceil() as usize + 1
    }
}

impl From<Float> for MpReal {
    fn from(value: Float) -> Self {
        MpReal(value)
    }
}

impl Debug for MpReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_decimal())
    }
}

impl Display for MpReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match f.precision() {
            Some(p) => write!(f, "{}", self.0.to_string_radix(10, Some(p.max(1)))),
            None => write!(f, "{}", self.to_decimal()),
        }
    }
}

impl Real for MpReal {
    fn from_f64(x: f64, prec: Precision) -> Self {
        MpReal(Float::with_val(prec.bits(), x))
    }

    fn parse_decimal(s: &str, prec: Precision) -> Option<Self> {
        let parsed = Float::parse(s).ok()?;
        let value = Float::with_val(prec.bits(), parsed);
        value.is_finite().then_some(MpReal(value))
    }

    fn pi(prec: Precision) -> Self {
        MpReal(Float::with_val(prec.bits(), Constant::Pi))
    }

    fn sqrt(&self) -> Self {
        MpReal(self.0.clone().sqrt())
    }

    fn sin(&self) -> Self {
        MpReal(self.0.clone().sin())
    }

    fn cos(&self) -> Self {
        MpReal(self.0.clone().cos())
    }

    fn ln(&self) -> Self {
        MpReal(self.0.clone().ln())
    }

    fn abs(&self) -> Self {
        MpReal(self.0.clone().abs())
    }

    fn powi(&self, n: i32) -> Self {
        MpReal(self.0.clone().pow(n))
    }

    fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }

    fn is_finite(&self) -> bool {
        self.0.is_finite()
    }

    fn to_decimal(&self) -> String {
        self.0.to_string_radix(10, Some(self.decimal_digits()))
    }

    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    fn lit(&self, x: f64) -> Self {
        MpReal(Float::with_val(self.0.prec(), x))
    }

    fn pi_like(&self) -> Self {
        MpReal(Float::with_val(self.0.prec(), Constant::Pi))
    }
}

macro_rules! mp_binop {
    ($tr:ident, $method:ident, $tra:ident, $method_assign:ident) => {
        impl $tr for MpReal {
            type Output = MpReal;
            fn $method(self, rhs: MpReal) -> MpReal {
                MpReal($tr::$method(self.0, rhs.0))
            }
        }
        impl<'a> $tr<&'a MpReal> for MpReal {
            type Output = MpReal;
            fn $method(self, rhs: &'a MpReal) -> MpReal {
                MpReal($tr::$method(self.0, &rhs.0))
            }
        }
        impl $tra for MpReal {
            fn $method_assign(&mut self, rhs: MpReal) {
                $tra::$method_assign(&mut self.0, rhs.0);
            }
        }
        impl<'a> $tra<&'a MpReal> for MpReal {
            fn $method_assign(&mut self, rhs: &'a MpReal) {
                $tra::$method_assign(&mut self.0, &rhs.0);
            }
        }
    };
}

mp_binop!(Add, add, AddAssign, add_assign);
mp_binop!(Sub, sub, SubAssign, sub_assign);
mp_binop!(Mul, mul, MulAssign, mul_assign);
mp_binop!(Div, div, DivAssign, div_assign);

impl Neg for MpReal {
    type Output = MpReal;
    fn neg(self) -> MpReal {
        MpReal(-self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precision_floor_is_enforced() {
        assert!(Precision::new(10).is_err());
        assert!(Precision::new(15).unwrap().is_fast());
        assert_eq!(Precision::new(100).unwrap().digits(), 100);
        assert!(Precision::new(100).unwrap().bits() >= 333);
    }

    #[test]
    fn parses_symbolic_forms() {
        let p = Precision::FAST;
        let pi = std::f64::consts::PI;
        assert_eq!(parse_real::<f64>("0.5", p).unwrap(), 0.5);
        assert_eq!(parse_real::<f64>("-pi", p).unwrap(), -pi);
        assert_eq!(parse_real::<f64>("pi/2", p).unwrap(), pi / 2.0);
        assert_eq!(parse_real::<f64>("3*pi/4", p).unwrap(), 3.0 * pi / 4.0);
        assert_eq!(parse_real::<f64>("2pi", p).unwrap(), 2.0 * pi);
        assert_eq!(parse_real::<f64>("1/64", p).unwrap(), 1.0 / 64.0);
        assert!(parse_real::<f64>("abc", p).is_err());
        assert!(parse_real::<f64>("1/0", p).is_err());
        assert!(parse_real::<f64>("", p).is_err());
    }

    #[test]
    fn high_precision_decimal_round_trip() {
        let p = Precision::high();
        let x = parse_real::<MpReal>("1/3", p).unwrap();
        let s = x.to_decimal();
        let y = parse_real::<MpReal>(&s, p).unwrap();
        assert_eq!(x, y);
        let third = x.to_f64();
        assert!((third - 1.0 / 3.0).abs() < 1e-16);
    }

    #[test]
    fn f64_decimal_round_trip() {
        for x in [0.1, 2.36786e-26, -1.0 / 3.0, 1e300] {
            let s = Real::to_decimal(&x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn mp_pi_is_accurate() {
        let p = Precision::new(60).unwrap();
        let pi = MpReal::pi(p);
        let s = pi.to_decimal();
        assert!(s.starts_with("3.14159265358979323846264338327950288419716939937510"));
        let zero = pi.sin();
        assert!(zero.abs().to_f64() < 1e-59);
    }

    #[test]
    fn literal_lifting_keeps_precision() {
        let p = Precision::high();
        let third = MpReal::one(p) / MpReal::from_f64(3.0, p);
        let lifted = third.lit(0.25);
        let sum = third.clone() + lifted;
        let expected = parse_real::<MpReal>("7/12", p).unwrap();
        assert!((sum - expected).abs().to_f64() < 1e-95);
    }
}
