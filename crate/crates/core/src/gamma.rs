//! Complex log-gamma.
//!
//! Two independent routes: a Lanczos approximation at double precision
//! (the workhorse for the measure layer) and a Spouge series at high
//! precision (the reference). An internal-oracle test requires them to
//! agree on a grid; see `tests`.
//!
//! Branches: values may differ from the principal lgamma branch by
//! multiples of 2πi. Every use in this crate exponentiates sums or
//! differences whose imaginary parts cancel (conjugate pairs) or takes real
//! parts of conjugate-paired sums, so the branch never matters.

use num_complex::Complex64;

use crate::hp::HpComplex;

/// Lanczos g = 7, n = 9 coefficients (double precision).
const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// log Γ(z) for complex z via Lanczos; poles return +inf real part.
pub fn lgamma_complex(z: Complex64) -> Complex64 {
    if z.im == 0.0 && z.re <= 0.0 && z.re == z.re.floor() {
        return Complex64::new(f64::INFINITY, 0.0);
    }
    if z.re < 0.5 {
        // reflection: log Γ(z) = log(π / sin(π z)) - log Γ(1 - z)
        let pi = std::f64::consts::PI;
        let s = (pi * z).sin();
        return Complex64::new(pi, 0.0).ln() - s.ln() - lgamma_complex(Complex64::new(1.0, 0.0) - z);
    }
    let zm1 = z - 1.0;
    let mut acc = Complex64::new(LANCZOS_COEF[0], 0.0);
    for (k, &c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        acc += c / (zm1 + k as f64);
    }
    let t = zm1 + LANCZOS_G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (zm1 + 0.5) * t.ln() - t + acc.ln()
}

/// Γ(z) at double precision.
pub fn gamma_complex(z: Complex64) -> Complex64 {
    lgamma_complex(z).exp()
}

/// Real log Γ(x), x > 0.
pub fn lgamma_real(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    lgamma_complex(Complex64::new(x, 0.0)).re
}

/// log Γ(z) via the Spouge series at high precision. `a` terms give roughly
/// a·log2(2π)/2 ≈ 1.3·a bits below the leading magnitude; a = 41 with
/// 256-bit working precision is comfortably past double precision.
pub fn lgamma_complex_hp(z: &HpComplex, a: usize) -> HpComplex {
    let bits = z.bits.max(256);
    let z = HpComplex::new(z.re.clone(), z.im.clone(), bits);
    let half = HpComplex::from_f64(0.5, 0.0, bits);
    if z.to_c64().re < 0.5 {
        // reflection in high precision
        let pi = HpComplex::new(
            {
                let mut c = astro_float::Consts::new().expect("consts");
                c.pi(bits, astro_float::RoundingMode::ToEven)
            },
            astro_float::BigFloat::from_f64(0.0, bits),
            bits,
        );
        let piz = pi.mul(&z);
        let sin = sin_hp(&piz);
        let one = HpComplex::one(bits);
        return pi
            .ln()
            .expect("pi nonzero")
            .sub(&sin.ln().expect("off poles"))
            .sub(&lgamma_complex_hp(&one.sub(&z), a));
    }
    // Spouge for Γ(z) with shift w = z - 1:
    //   Γ(z) = (w+a)^(w+1/2) e^{-(w+a)} [sqrt(2π) + Σ_{k=1}^{a-1} c_k/(w+k)]
    //   c_k = (-1)^(k-1)/(k-1)! (a-k)^(k-1/2) e^(a-k)
    let w = z.sub(&HpComplex::one(bits));
    let mut acc = pi_hp(bits)
        .scale_f64(2.0)
        .pow(&HpComplex::from_f64(0.5, 0.0, bits))
        .expect("positive base");
    let mut fact = HpComplex::one(bits); // (k-1)!
    for k in 1..a {
        if k > 1 {
            fact = fact.scale_f64((k - 1) as f64);
        }
        let amk = HpComplex::from_f64((a - k) as f64, 0.0, bits);
        let mut ck = amk
            .pow(&HpComplex::from_f64(k as f64 - 0.5, 0.0, bits))
            .expect("positive base")
            .mul(&amk.exp())
            .div(&fact)
            .expect("factorial nonzero");
        if k % 2 == 0 {
            ck = ck.neg();
        }
        let denom = w.add(&HpComplex::from_f64(k as f64, 0.0, bits));
        acc = acc.add(&ck.div(&denom).expect("off poles"));
    }
    let wpa = w.add(&HpComplex::from_f64(a as f64, 0.0, bits));
    w.add(&half)
        .mul(&wpa.ln().expect("z+a in right half plane"))
        .sub(&wpa)
        .add(&acc.ln().expect("series sum nonzero"))
}

fn pi_hp(bits: usize) -> HpComplex {
    let mut c = astro_float::Consts::new().expect("consts");
    HpComplex::new(
        c.pi(bits, astro_float::RoundingMode::ToEven),
        astro_float::BigFloat::from_f64(0.0, bits),
        bits,
    )
}

fn sin_hp(z: &HpComplex) -> HpComplex {
    // sin(x+iy) = sin x cosh y + i cos x sinh y, via exp
    let i = HpComplex::from_f64(0.0, 1.0, z.bits);
    let eiz = i.mul(z).exp();
    let emiz = i.mul(z).neg().exp();
    eiz.sub(&emiz).div(&i.scale_f64(2.0)).expect("2i nonzero")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn real_values() {
        assert!((gamma_complex(Complex64::new(5.0, 0.0)).re - 24.0).abs() < 1e-12);
        assert!((lgamma_real(1.0)).abs() < 1e-14);
        assert!((lgamma_real(0.5) - (std::f64::consts::PI).sqrt().ln()).abs() < 1e-13);
    }

    #[test]
    fn functional_equation() {
        let z = Complex64::new(0.3, 1.7);
        let lhs = gamma_complex(z + 1.0);
        let rhs = z * gamma_complex(z);
        assert!((lhs - rhs).norm() < 1e-12 * rhs.norm());
    }

    #[test]
    fn conjugate_symmetry() {
        let z = Complex64::new(1.4, -0.8);
        let a = gamma_complex(z);
        let b = gamma_complex(z.conj()).conj();
        assert!((a - b).norm() < 1e-12 * a.norm());
    }

    /// Internal oracle: Lanczos (double) vs Spouge (high precision) on a
    /// grid of moderate arguments.
    #[test]
    fn lanczos_matches_spouge_to_1e12() {
        for &re in &[-2.3, -0.6, 0.5, 1.0, 2.2, 4.8] {
            for &im in &[-3.0, -0.7, 0.0, 1.3, 2.9] {
                let z = Complex64::new(re, im);
                let fast = lgamma_complex(z);
                let slow = lgamma_complex_hp(&HpComplex::from_f64(re, im, 256), 41).to_c64();
                // compare Γ itself to sidestep 2πi branch offsets
                let diff = (fast.exp() - slow.exp()).norm();
                let scale = slow.exp().norm().max(1e-30);
                assert!(diff / scale < 1e-12, "z={z}: lanczos={fast} spouge={slow}");
            }
        }
    }
}
