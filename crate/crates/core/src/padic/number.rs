use std::fmt;
use std::sync::Arc;

use num_rational::Ratio;

use super::context::PadicContext;
use super::element::{PadicElement, Valuation};
use crate::error::{Error, Result};

/// An element of the field E, written π^shift · m with m integral.
///
/// The absolute precision is shift + precision(m). After normalization m is a
/// unit, or m is indistinguishable from zero.
#[derive(Clone)]
pub struct PadicNumber {
    shift: i64,
    mantissa: PadicElement,
}

impl fmt::Debug for PadicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.shift == 0 {
            write!(f, "{:?}", self.mantissa)
        } else {
            write!(f, "pi^{} * ({:?})", self.shift, self.mantissa)
        }
    }
}

impl fmt::Display for PadicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.shift == 0 || self.mantissa.is_zero() {
            write!(f, "{}", self.mantissa)
        } else {
            write!(f, "pi^{}*({})", self.shift, self.mantissa)
        }
    }
}

impl crate::linalg::Ring for PadicNumber {
    fn zero_like(&self) -> Self {
        PadicNumber::zero(self.ctx())
    }
    fn one_like(&self) -> Self {
        PadicNumber::one(self.ctx())
    }
    fn is_zero(&self) -> bool {
        PadicNumber::is_zero(self)
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn minus(&self, other: &Self) -> Self {
        self - other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn negate(&self) -> Self {
        self.neg()
    }
}

impl PartialEq for PadicNumber {
    fn eq(&self, other: &Self) -> bool {
        (self - other).is_zero()
    }
}

impl From<PadicElement> for PadicNumber {
    fn from(x: PadicElement) -> Self {
        PadicNumber::new(0, x)
    }
}

impl PadicNumber {
    pub fn new(shift: i64, mantissa: PadicElement) -> Self {
        let mut x = PadicNumber { shift, mantissa };
        x.normalize();
        x
    }

    fn normalize(&mut self) {
        if let Valuation::Exact(v) = self.mantissa.valuation() {
            if v > 0 {
                self.mantissa = self.mantissa.div_pi_pow(v).expect("valuation checked");
                self.shift += v as i64;
            }
        }
    }

    pub fn zero(ctx: &Arc<PadicContext>) -> Self {
        PadicElement::zero(ctx).into()
    }
    pub fn one(ctx: &Arc<PadicContext>) -> Self {
        PadicElement::one(ctx).into()
    }
    pub fn from_int(ctx: &Arc<PadicContext>, n: i64) -> Self {
        PadicElement::from_int(ctx, n).into()
    }
    /// π^k for any integer k.
    pub fn pi_pow(ctx: &Arc<PadicContext>, k: i64) -> Self {
        PadicNumber::new(k, PadicElement::one(ctx))
    }
    /// a/b for integers.
    pub fn from_ratio(ctx: &Arc<PadicContext>, num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::arg("zero denominator"));
        }
        Self::from_int(ctx, num).div(&Self::from_int(ctx, den))
    }

    pub fn ctx(&self) -> &Arc<PadicContext> {
        self.mantissa.ctx()
    }

    /// Absolute π-adic precision (may be negative).
    pub fn precision(&self) -> i64 {
        self.shift + self.mantissa.precision() as i64
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }

    /// π-adic valuation; `Err` carries the lower bound when indistinguishable
    /// from zero.
    pub fn valuation(&self) -> std::result::Result<i64, i64> {
        match self.mantissa.valuation() {
            Valuation::Exact(v) => Ok(self.shift + v as i64),
            Valuation::AtLeast(_) => Err(self.precision()),
        }
    }

    /// Valuation in v_p units.
    pub fn valuation_p(&self) -> std::result::Result<Ratio<i64>, Ratio<i64>> {
        let e = self.ctx().e() as i64;
        self.valuation()
            .map(|v| Ratio::new(v, e))
            .map_err(|v| Ratio::new(v, e))
    }

    pub fn is_integral(&self) -> bool {
        match self.valuation() {
            Ok(v) => v >= 0,
            Err(_) => true,
        }
    }

    /// The same number as an element of O_E, failing if it is not integral.
    pub fn to_integral(&self) -> Result<PadicElement> {
        if self.is_zero() {
            let prec = self.precision().max(0) as u32;
            return Ok(PadicElement::zero(self.ctx()).truncate(prec));
        }
        if self.shift < 0 {
            return Err(Error::NonIntegral);
        }
        Ok(self.mantissa.mul_pi_pow(self.shift as u32))
    }

    pub fn mul_pi_pow(&self, k: i64) -> Self {
        PadicNumber {
            shift: self.shift + k,
            mantissa: self.mantissa.clone(),
        }
    }

    fn align(&self, other: &Self) -> (i64, PadicElement, PadicElement) {
        let s = self.shift.min(other.shift);
        let a = self.mantissa.mul_pi_pow((self.shift - s) as u32);
        let b = other.mantissa.mul_pi_pow((other.shift - s) as u32);
        (s, a, b)
    }

    pub fn inverse(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::Undecidable("inverse of an element indistinguishable from zero".into()));
        }
        Ok(PadicNumber::new(-self.shift, self.mantissa.inverse()?))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self * &other.inverse()?)
    }

    pub fn pow(&self, k: i64) -> Result<Self> {
        if k < 0 {
            return self.inverse()?.pow(-k);
        }
        let mut r = Self::one(self.ctx());
        for _ in 0..k {
            r = &r * self;
        }
        Ok(r)
    }

    pub fn neg(&self) -> Self {
        PadicNumber {
            shift: self.shift,
            mantissa: -&self.mantissa,
        }
    }
}

impl<'a> std::ops::Add<&'a PadicNumber> for &'a PadicNumber {
    type Output = PadicNumber;
    fn add(self, rhs: &PadicNumber) -> PadicNumber {
        let (s, a, b) = self.align(rhs);
        PadicNumber::new(s, &a + &b)
    }
}

impl<'a> std::ops::Sub<&'a PadicNumber> for &'a PadicNumber {
    type Output = PadicNumber;
    fn sub(self, rhs: &PadicNumber) -> PadicNumber {
        let (s, a, b) = self.align(rhs);
        PadicNumber::new(s, &a - &b)
    }
}

impl<'a> std::ops::Mul<&'a PadicNumber> for &'a PadicNumber {
    type Output = PadicNumber;
    fn mul(self, rhs: &PadicNumber) -> PadicNumber {
        PadicNumber::new(self.shift + rhs.shift, &self.mantissa * &rhs.mantissa)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_arithmetic() {
        let ctx = PadicContext::qp(5, 8).unwrap();
        let x = PadicNumber::from_ratio(&ctx, 1, 25).unwrap();
        assert_eq!(x.valuation(), Ok(-2));
        let y = &x * &PadicNumber::from_int(&ctx, 50);
        assert_eq!(y, PadicNumber::from_int(&ctx, 2));
        assert!(y.is_integral());
        assert!(!x.is_integral());
        assert!(x.to_integral().is_err());
        let s = &x + &PadicNumber::from_int(&ctx, 1);
        assert_eq!(s.valuation(), Ok(-2));
    }
}
