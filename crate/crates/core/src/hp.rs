//! High-precision complex floats on top of `astro_float::BigFloat`.
//!
//! This is the float tier of the scalar tower: a complex number with a
//! configurable mantissa length in bits (default 128). Only the operations
//! the q-series layer actually needs are provided: field arithmetic,
//! absolute value, exp/ln/pow, and conversions.

use std::cell::RefCell;
use std::cmp::Ordering;

use astro_float::{BigFloat, Consts, RoundingMode};
use num_bigint::{BigInt, Sign};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Zero;

/// Default mantissa length in bits for the float tier.
pub const DEFAULT_PRECISION_BITS: usize = 128;

const RM: RoundingMode = RoundingMode::ToEven;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("constants cache"));
}

fn with_consts<T>(f: impl FnOnce(&mut Consts) -> T) -> T {
    CONSTS.with(|c| f(&mut c.borrow_mut()))
}

/// Complex number with `bits` of mantissa per component.
#[derive(Debug, Clone)]
pub struct HpComplex {
    pub re: BigFloat,
    pub im: BigFloat,
    pub bits: usize,
}

fn bigint_to_bigfloat(n: &BigInt, bits: usize) -> BigFloat {
    let (sign, digits) = n.to_u64_digits();
    if digits.is_empty() {
        return BigFloat::from_u64(0, bits);
    }
    // Horner over base-2^64 digits at a precision wide enough to be exact
    let p = (64 * digits.len()).max(bits);
    let shift = {
        let s = BigFloat::from_u64(1u64 << 32, p);
        s.mul(&s, p, RM)
    };
    let mut acc = BigFloat::from_u64(*digits.last().unwrap(), p);
    for d in digits.iter().rev().skip(1) {
        acc = acc.mul(&shift, p, RM).add(&BigFloat::from_u64(*d, p), p, RM);
    }
    if sign == Sign::Minus {
        acc = acc.neg();
    }
    acc
}

fn f64_of_bigfloat(x: &BigFloat) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    if x.is_nan() {
        return f64::NAN;
    }
    if x.is_inf_pos() {
        return f64::INFINITY;
    }
    if x.is_inf_neg() {
        return f64::NEG_INFINITY;
    }
    let (words, _n, sign, e, _inexact) = x.as_raw_parts().expect("finite value has raw parts");
    // mantissa is little-endian; value = 0.m * 2^e. Fuse the top two words
    // before converting so the result rounds once.
    let top = *words.last().unwrap_or(&0);
    let next = if words.len() >= 2 { words[words.len() - 2] } else { 0 };
    let frac128 = ((top as u128) << 64) | next as u128;
    let v = (frac128 as f64) * 2f64.powi(e - 128);
    if sign == astro_float::Sign::Neg {
        -v
    } else {
        v
    }
}

impl HpComplex {
    pub fn new(re: BigFloat, im: BigFloat, bits: usize) -> Self {
        HpComplex { re, im, bits }
    }

    pub fn from_f64(re: f64, im: f64, bits: usize) -> Self {
        HpComplex::new(BigFloat::from_f64(re, bits), BigFloat::from_f64(im, bits), bits)
    }

    pub fn from_rationals(re: &BigRational, im: &BigRational, bits: usize) -> Self {
        let conv = |r: &BigRational| -> BigFloat {
            if r.is_zero() {
                return BigFloat::from_u64(0, bits);
            }
            let n = bigint_to_bigfloat(r.numer(), bits);
            let d = bigint_to_bigfloat(r.denom(), bits);
            n.div(&d, bits, RM)
        };
        HpComplex::new(conv(re), conv(im), bits)
    }

    pub fn zero(bits: usize) -> Self {
        HpComplex::from_f64(0.0, 0.0, bits)
    }

    pub fn one(bits: usize) -> Self {
        HpComplex::from_f64(1.0, 0.0, bits)
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        HpComplex::new(self.re.clone(), self.im.neg(), self.bits)
    }

    pub fn neg(&self) -> Self {
        HpComplex::new(self.re.neg(), self.im.neg(), self.bits)
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let p = self.bits.max(rhs.bits);
        HpComplex::new(self.re.add(&rhs.re, p, RM), self.im.add(&rhs.im, p, RM), p)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let p = self.bits.max(rhs.bits);
        HpComplex::new(self.re.sub(&rhs.re, p, RM), self.im.sub(&rhs.im, p, RM), p)
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let p = self.bits.max(rhs.bits);
        let ac = self.re.mul(&rhs.re, p, RM);
        let bd = self.im.mul(&rhs.im, p, RM);
        let ad = self.re.mul(&rhs.im, p, RM);
        let bc = self.im.mul(&rhs.re, p, RM);
        HpComplex::new(ac.sub(&bd, p, RM), ad.add(&bc, p, RM), p)
    }

    pub fn div(&self, rhs: &Self) -> Option<Self> {
        if rhs.is_zero() {
            return None;
        }
        let p = self.bits.max(rhs.bits);
        let den = rhs
            .re
            .mul(&rhs.re, p, RM)
            .add(&rhs.im.mul(&rhs.im, p, RM), p, RM);
        let nre = self
            .re
            .mul(&rhs.re, p, RM)
            .add(&self.im.mul(&rhs.im, p, RM), p, RM);
        let nim = self
            .im
            .mul(&rhs.re, p, RM)
            .sub(&self.re.mul(&rhs.im, p, RM), p, RM);
        Some(HpComplex::new(nre.div(&den, p, RM), nim.div(&den, p, RM), p))
    }

    pub fn scale_f64(&self, c: f64) -> Self {
        let f = BigFloat::from_f64(c, self.bits);
        HpComplex::new(self.re.mul(&f, self.bits, RM), self.im.mul(&f, self.bits, RM), self.bits)
    }

    pub fn abs_sq(&self) -> BigFloat {
        let p = self.bits;
        self.re.mul(&self.re, p, RM).add(&self.im.mul(&self.im, p, RM), p, RM)
    }

    pub fn abs(&self) -> BigFloat {
        self.abs_sq().sqrt(self.bits, RM)
    }

    /// Low-precision estimate of |z|, used for truncation decisions only.
    pub fn abs_f64(&self) -> f64 {
        self.to_c64().norm()
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(f64_of_bigfloat(&self.re), f64_of_bigfloat(&self.im))
    }

    pub fn arg(&self) -> BigFloat {
        atan2(&self.im, &self.re, self.bits)
    }

    pub fn exp(&self) -> Self {
        let p = self.bits;
        let r = with_consts(|cc| self.re.exp(p, RM, cc));
        let (s, c) = with_consts(|cc| (self.im.sin(p, RM, cc), self.im.cos(p, RM, cc)));
        HpComplex::new(r.mul(&c, p, RM), r.mul(&s, p, RM), p)
    }

    pub fn ln(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let p = self.bits;
        let half = BigFloat::from_f64(0.5, p);
        let lr = with_consts(|cc| self.abs_sq().ln(p, RM, cc)).mul(&half, p, RM);
        Some(HpComplex::new(lr, self.arg(), p))
    }

    /// Principal-branch power `self^w`.
    pub fn pow(&self, w: &Self) -> Option<Self> {
        if self.is_zero() {
            return Some(HpComplex::zero(self.bits));
        }
        Some(w.mul(&self.ln()?).exp())
    }

    /// `x^y` for real positive `x` and real `y`, staying on the real axis.
    pub fn pow_real(x: &BigFloat, y: f64, bits: usize) -> BigFloat {
        let e = BigFloat::from_f64(y, bits);
        with_consts(|cc| x.pow(&e, bits, RM, cc))
    }
}

fn atan2(y: &BigFloat, x: &BigFloat, p: usize) -> BigFloat {
    let zero = BigFloat::from_u64(0, p);
    let pi = with_consts(|cc| cc.pi(p, RM));
    if x.is_zero() && y.is_zero() {
        return zero;
    }
    if x.is_zero() {
        let half = BigFloat::from_f64(0.5, p);
        let hp = pi.mul(&half, p, RM);
        return if y.is_negative() { hp.neg() } else { hp };
    }
    let ratio = y.div(x, p, RM);
    let base = with_consts(|cc| ratio.atan(p, RM, cc));
    match x.cmp(&zero).map(|c| c.cmp(&0)) {
        Some(Ordering::Greater) => base,
        _ => {
            if y.is_negative() {
                base.sub(&pi, p, RM)
            } else {
                base.add(&pi, p, RM)
            }
        }
    }
}

/// Compare |a - b| against a plain f64 tolerance.
pub fn hp_close(a: &HpComplex, b: &HpComplex, tol: f64) -> bool {
    a.sub(b).abs_f64() <= tol
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    #[test]
    fn roundtrip_and_field_ops() {
        let a = HpComplex::from_f64(1.5, -2.25, 128);
        let b = HpComplex::from_f64(0.75, 3.0, 128);
        let prod = a.mul(&b);
        let back = prod.div(&b).unwrap();
        assert!(hp_close(&back, &a, 1e-30));
        let c = prod.to_c64();
        let expect = Complex64::new(1.5, -2.25) * Complex64::new(0.75, 3.0);
        assert!((c - expect).norm() < 1e-14);
    }

    #[test]
    fn bigint_conversion_is_exact() {
        let n = BigInt::parse_bytes(b"340282366920938463463374607431768211456", 10).unwrap(); // 2^128
        let f = bigint_to_bigfloat(&n, 256);
        let two = BigFloat::from_u64(2, 256);
        let mut acc = BigFloat::from_u64(1, 256);
        for _ in 0..128 {
            acc = acc.mul(&two, 256, RM);
        }
        assert_eq!(f.cmp(&acc), Some(0));
    }

    #[test]
    fn exp_ln_inverse() {
        let z = HpComplex::from_f64(0.3, -1.2, 192);
        let w = z.exp().ln().unwrap();
        assert!(hp_close(&w, &z, 1e-40));
        let r = BigRational::one() / BigRational::from_integer(3.into());
        let h = HpComplex::from_rationals(&r, &BigRational::zero(), 128);
        assert!((h.to_c64().re - 1.0 / 3.0).abs() < 1e-16);
    }
}
