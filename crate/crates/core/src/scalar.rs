//! The three-tier scalar tower and comparison tolerances.
//!
//! Every formula in the crate runs on [`Scalar`]:
//!
//! - exact rationals (a Gaussian rational with zero imaginary part),
//! - exact Gaussian rationals a + b*i with rational a, b,
//! - high-precision complex floats with a configurable mantissa length.
//!
//! Arithmetic between exact values stays exact; mixing an exact value with a
//! float promotes to the float's precision. Division by zero is a reported
//! error (`try_div`), never a silent NaN.
//!
//! JSON forms: `{"rat":[p,q]}`, `{"gauss":[[p,q],[r,s]]}`,
//! `{"float":[re,im],"bits":n}` (components as decimal strings for the exact
//! forms, f64 for the float form).

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::de::Error as DeError;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{QtError, Result};
use crate::hp::{HpComplex, DEFAULT_PRECISION_BITS};

/// Exact Gaussian rational a + b*i.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GaussRational {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        GaussRational { re, im }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    fn mul(&self, o: &Self) -> Self {
        GaussRational {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }

    fn div(&self, o: &Self) -> Option<Self> {
        if o.is_zero() {
            return None;
        }
        let den = &o.re * &o.re + &o.im * &o.im;
        Some(GaussRational {
            re: (&self.re * &o.re + &self.im * &o.im) / &den,
            im: (&self.im * &o.re - &self.re * &o.im) / &den,
        })
    }

    fn conj(&self) -> Self {
        GaussRational { re: self.re.clone(), im: -self.im.clone() }
    }
}

/// Truncation and comparison tolerances carried through numeric operations.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Tolerance {
    /// Truncation target for infinite products and lattice sums.
    pub tail_bound: f64,
    /// Comparison tolerance for float-mode identities.
    pub match_tol: f64,
}

impl Tolerance {
    pub fn new(tail_bound: f64, match_tol: f64) -> Result<Self> {
        if tail_bound <= 0.0 || match_tol <= 0.0 {
            return Err(QtError::Config("tolerances must be strictly positive".into()));
        }
        Ok(Tolerance { tail_bound, match_tol })
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { tail_bound: 1e-18, match_tol: 1e-10 }
    }
}

/// A value of the scalar tower.
#[derive(Debug, Clone)]
pub enum Scalar {
    Exact(GaussRational),
    Float(HpComplex),
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::from_int(0)
    }

    pub fn one() -> Self {
        Scalar::from_int(1)
    }

    pub fn from_int(n: i64) -> Self {
        Scalar::Exact(GaussRational::new(BigRational::from_integer(n.into()), BigRational::zero()))
    }

    /// Exact rational p/q.
    pub fn rat(p: i64, q: i64) -> Self {
        assert!(q != 0, "zero denominator in Scalar::rat");
        Scalar::Exact(GaussRational::new(
            BigRational::new(p.into(), q.into()),
            BigRational::zero(),
        ))
    }

    /// Exact Gaussian rational (p/q) + (r/s) i.
    pub fn gauss(p: i64, q: i64, r: i64, s: i64) -> Self {
        assert!(q != 0 && s != 0, "zero denominator in Scalar::gauss");
        Scalar::Exact(GaussRational::new(BigRational::new(p.into(), q.into()), BigRational::new(r.into(), s.into())))
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        Scalar::gauss(0, 1, 1, 1)
    }

    pub fn from_rational(r: BigRational) -> Self {
        Scalar::Exact(GaussRational::new(r, BigRational::zero()))
    }

    pub fn float(re: f64, im: f64, bits: usize) -> Self {
        Scalar::Float(HpComplex::from_f64(re, im, bits))
    }

    pub fn float64(re: f64) -> Self {
        Scalar::float(re, 0.0, 53)
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(g) => g.is_zero(),
            Scalar::Float(h) => h.is_zero(),
        }
    }

    pub fn is_real(&self) -> bool {
        match self {
            Scalar::Exact(g) => g.is_real(),
            Scalar::Float(h) => h.is_real(),
        }
    }

    pub fn conj(&self) -> Self {
        match self {
            Scalar::Exact(g) => Scalar::Exact(g.conj()),
            Scalar::Float(h) => Scalar::Float(h.conj()),
        }
    }

    /// Promote to the float tier at `bits` of precision (no-op on floats of
    /// higher precision).
    pub fn to_hp(&self, bits: usize) -> HpComplex {
        match self {
            Scalar::Exact(g) => HpComplex::from_rationals(&g.re, &g.im, bits),
            Scalar::Float(h) => h.clone(),
        }
    }

    pub fn promote(&self, bits: usize) -> Scalar {
        Scalar::Float(self.to_hp(bits))
    }

    pub fn to_c64(&self) -> Complex64 {
        match self {
            Scalar::Exact(g) => Complex64::new(
                g.re.to_f64().unwrap_or(f64::NAN),
                g.im.to_f64().unwrap_or(f64::NAN),
            ),
            Scalar::Float(h) => h.to_c64(),
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.to_c64().re
    }

    pub fn abs_f64(&self) -> f64 {
        self.to_c64().norm()
    }

    /// Exact parts, if this is an exact scalar.
    pub fn as_exact(&self) -> Option<&GaussRational> {
        match self {
            Scalar::Exact(g) => Some(g),
            _ => None,
        }
    }

    pub fn try_div(&self, rhs: &Scalar) -> Result<Scalar> {
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a
                .div(b)
                .map(Scalar::Exact)
                .ok_or_else(|| QtError::DivisionByZero(String::new())),
            _ => {
                let bits = self.float_bits().max(rhs.float_bits());
                let (a, b) = (self.to_hp(bits), rhs.to_hp(bits));
                a.div(&b)
                    .map(Scalar::Float)
                    .ok_or_else(|| QtError::DivisionByZero(String::new()))
            }
        }
    }

    /// Integer power (negative exponents divide; zero base with negative
    /// exponent is an error).
    pub fn powi(&self, n: i64) -> Result<Scalar> {
        if n == 0 {
            return Ok(Scalar::one());
        }
        let mut base = if n < 0 {
            Scalar::one().try_div(self)?
        } else {
            self.clone()
        };
        let mut e = n.unsigned_abs();
        let mut acc = Scalar::one();
        loop {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e == 0 {
                break;
            }
            base = &base * &base;
        }
        Ok(acc)
    }

    fn float_bits(&self) -> usize {
        match self {
            Scalar::Exact(_) => DEFAULT_PRECISION_BITS.min(53),
            Scalar::Float(h) => h.bits,
        }
    }

    /// |self - other| <= tol, evaluated at f64 resolution.
    pub fn approx_eq(&self, other: &Scalar, tol: f64) -> bool {
        if let (Scalar::Exact(a), Scalar::Exact(b)) = (self, other) {
            if a == b {
                return true;
            }
        }
        (self - other).abs_f64() <= tol
    }
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a == b,
            (a, b) => {
                let bits = a.float_bits().max(b.float_bits());
                a.to_hp(bits).sub(&b.to_hp(bits)).is_zero()
            }
        }
    }
}

macro_rules! impl_binop {
    ($trait:ident, $method:ident, $gauss:expr, $hp:ident) => {
        impl $trait<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                match (self, rhs) {
                    (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact($gauss(a, b)),
                    _ => {
                        let bits = self.float_bits().max(rhs.float_bits());
                        Scalar::Float(self.to_hp(bits).$hp(&rhs.to_hp(bits)))
                    }
                }
            }
        }
        impl $trait<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                (&self).$method(rhs)
            }
        }
    };
}

impl_binop!(Add, add, |a: &GaussRational, b: &GaussRational| GaussRational {
    re: &a.re + &b.re,
    im: &a.im + &b.im,
}, add);
impl_binop!(Sub, sub, |a: &GaussRational, b: &GaussRational| GaussRational {
    re: &a.re - &b.re,
    im: &a.im - &b.im,
}, sub);
impl_binop!(Mul, mul, |a: &GaussRational, b: &GaussRational| a.mul(b), mul);

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact(g) => Scalar::Exact(GaussRational {
                re: -g.re.clone(),
                im: -g.im.clone(),
            }),
            Scalar::Float(h) => Scalar::Float(h.neg()),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(g) if g.is_real() => write!(f, "{}", g.re),
            Scalar::Exact(g) => write!(f, "{} + {}i", g.re, g.im),
            Scalar::Float(h) => {
                let c = h.to_c64();
                if c.im == 0.0 {
                    write!(f, "{}", c.re)
                } else {
                    write!(f, "{} + {}i", c.re, c.im)
                }
            }
        }
    }
}

/// Parse "p/q", "p", or a decimal float; fractions become exact rationals.
impl FromStr for Scalar {
    type Err = QtError;
    fn from_str(s: &str) -> Result<Scalar> {
        let s = s.trim();
        if let Some((p, q)) = s.split_once('/') {
            let p: BigInt = p
                .trim()
                .parse()
                .map_err(|_| QtError::Config(format!("bad numerator in {s:?}")))?;
            let q: BigInt = q
                .trim()
                .parse()
                .map_err(|_| QtError::Config(format!("bad denominator in {s:?}")))?;
            if q.is_zero() {
                return Err(QtError::Config(format!("zero denominator in {s:?}")));
            }
            return Ok(Scalar::from_rational(BigRational::new(p, q)));
        }
        if let Ok(n) = s.parse::<BigInt>() {
            return Ok(Scalar::from_rational(BigRational::from_integer(n)));
        }
        let v: f64 = s
            .parse()
            .map_err(|_| QtError::Config(format!("cannot parse scalar {s:?}")))?;
        Ok(Scalar::float64(v))
    }
}

// --- serde -----------------------------------------------------------------

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ScalarRepr {
    Rat { rat: [String; 2] },
    Gauss { gauss: [[String; 2]; 2] },
    Float { float: [f64; 2], bits: usize },
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let repr = match self {
            Scalar::Exact(g) if g.is_real() => ScalarRepr::Rat {
                rat: [g.re.numer().to_string(), g.re.denom().to_string()],
            },
            Scalar::Exact(g) => ScalarRepr::Gauss {
                gauss: [
                    [g.re.numer().to_string(), g.re.denom().to_string()],
                    [g.im.numer().to_string(), g.im.denom().to_string()],
                ],
            },
            Scalar::Float(h) => {
                let c = h.to_c64();
                ScalarRepr::Float { float: [c.re, c.im], bits: h.bits }
            }
        };
        repr.serialize(ser)
    }
}

fn rat_from_strs(p: &str, q: &str) -> Option<BigRational> {
    let p: BigInt = p.parse().ok()?;
    let q: BigInt = q.parse().ok()?;
    if q.is_zero() {
        None
    } else {
        Some(BigRational::new(p, q))
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let repr = ScalarRepr::deserialize(de)?;
        match repr {
            ScalarRepr::Rat { rat: [p, q] } => rat_from_strs(&p, &q)
                .map(Scalar::from_rational)
                .ok_or_else(|| D::Error::custom("bad rational")),
            ScalarRepr::Gauss { gauss: [[a, b], [c, d]] } => {
                let re = rat_from_strs(&a, &b).ok_or_else(|| D::Error::custom("bad rational"))?;
                let im = rat_from_strs(&c, &d).ok_or_else(|| D::Error::custom("bad rational"))?;
                Ok(Scalar::Exact(GaussRational::new(re, im)))
            }
            ScalarRepr::Float { float: [re, im], bits } => Ok(Scalar::float(re, im, bits)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_stays_exact_and_mixing_promotes() {
        let a = Scalar::rat(1, 3);
        let b = Scalar::rat(1, 6);
        assert_eq!(&a + &b, Scalar::rat(1, 2));
        let f = Scalar::float(0.5, 0.0, 128);
        assert!(matches!(&a * &f, Scalar::Float(_)));
    }

    #[test]
    fn gaussian_arithmetic() {
        let i = Scalar::i();
        assert_eq!(&i * &i, Scalar::from_int(-1));
        let z = Scalar::gauss(1, 2, -1, 3); // 1/2 - i/3
        let w = z.try_div(&z).unwrap();
        assert_eq!(w, Scalar::one());
    }

    #[test]
    fn division_by_zero_reports() {
        assert!(Scalar::one().try_div(&Scalar::zero()).is_err());
        let fz = Scalar::float(0.0, 0.0, 64);
        assert!(Scalar::one().try_div(&fz).is_err());
    }

    #[test]
    fn powi_negative() {
        let h = Scalar::rat(2, 3).powi(-2).unwrap();
        assert_eq!(h, Scalar::rat(9, 4));
    }

    #[test]
    fn serde_roundtrip() {
        for s in [Scalar::rat(-7, 3), Scalar::gauss(1, 2, 5, 4), Scalar::float(1.25, -0.5, 96)] {
            let js = serde_json::to_string(&s).unwrap();
            let back: Scalar = serde_json::from_str(&js).unwrap();
            assert!(s.approx_eq(&back, 0.0));
        }
        assert_eq!(
            serde_json::to_string(&Scalar::rat(1, 2)).unwrap(),
            r#"{"rat":["1","2"]}"#
        );
    }

    #[test]
    fn parse_fraction_is_exact() {
        let s: Scalar = "3/7".parse().unwrap();
        assert_eq!(s, Scalar::rat(3, 7));
        let f: Scalar = "0.25".parse().unwrap();
        assert!(!f.is_exact());
    }
}
