//! q-special functions: finite and infinite q-Pochhammers, partition
//! Pochhammers, theta functions, the quasi-constant psi_tau, the C± box
//! products, and the closed-form one-particle normalization.
//!
//! Notation:
//!
//! ```text
//! (u;q)_n      = prod_{i=1..n} (1 - u q^(i-1))
//! (u;q)_inf    = prod_{n>=0} (1 - u q^n)
//! (u;q,t)_nu   = prod_{i=1..l(nu)} (u t^(1-i); q)_{nu_i}
//! theta_q(v)   = (v;q)_inf (q/v;q)_inf
//! psi_tau(u)   = (-u)^(2 tau - 1) theta_q(t u) / theta_q(t/u),  u < 0, t = q^tau
//! C-_lam(z)    = prod_{(i,j) in lam} (1 - z q^(lam_i - j) t^(lam'_j - i))
//! C+_lam(z)    = prod_{(i,j) in lam} (1 - z q^(lam_i + j - 1) t^(2 - lam'_j - i))
//! ```
//!
//! Infinite products truncate by the analytic tail bound, not a fixed term
//! count; the achieved bound is returned alongside the value so downstream
//! error budgets compose.

use num_complex::Complex64;

use crate::error::{QtError, Result};
use crate::hp::{HpComplex, DEFAULT_PRECISION_BITS};
use crate::partitions::Partition;
use crate::scalar::{Scalar, Tolerance};

/// Value of a truncated infinite product together with the analytic bound
/// on the discarded tail (a bound on |log of the dropped factor product|).
#[derive(Debug, Clone)]
pub struct Truncated {
    pub value: Scalar,
    pub tail: f64,
}

fn working_bits(inputs: &[&Scalar]) -> usize {
    inputs
        .iter()
        .filter_map(|s| match s {
            Scalar::Float(h) => Some(h.bits),
            _ => None,
        })
        .max()
        .unwrap_or(DEFAULT_PRECISION_BITS)
}

/// Finite q-Pochhammer (u;q)_n; exact on exact inputs.
pub fn qpochhammer(u: &Scalar, q: &Scalar, n: u32) -> Scalar {
    let mut val = Scalar::one();
    let mut uq = u.clone();
    for _ in 0..n {
        val = &val * &(&Scalar::one() - &uq);
        uq = &uq * q;
    }
    val
}

/// Partition Pochhammer (u;q,t)_ν; exact on exact inputs.
pub fn qt_pochhammer(u: &Scalar, q: &Scalar, t: &Scalar, nu: &Partition) -> Result<Scalar> {
    let mut val = Scalar::one();
    for (i, &p) in nu.parts().iter().enumerate() {
        let shift = &*u * &t.powi(-(i as i64))?;
        val = &val * &qpochhammer(&shift, q, p);
    }
    Ok(val)
}

/// Infinite q-Pochhammer (u;q)_inf for |q| < 1, truncated at the tail
/// budget `tol.tail_bound`.
pub fn qpochhammer_inf(u: &Scalar, q: &Scalar, tol: &Tolerance) -> Result<Truncated> {
    let qa = q.abs_f64();
    if qa >= 1.0 {
        return Err(QtError::Domain(format!("(u;q)_inf requires |q| < 1, got |q| = {qa}")));
    }
    let bits = working_bits(&[u, q]);
    let uh = u.to_hp(bits);
    let qh = q.to_hp(bits);
    let one = HpComplex::one(bits);
    let mut val = one.clone();
    let mut uq = uh;
    let mut ua = uq.abs_f64();
    loop {
        // remaining tail: sum_{k>=n} |u| q^k / (1 - |u| q^k) <= ua/(1-qa) / (1-ua) for ua < 1
        let tail = if ua < 1.0 { ua / (1.0 - qa) / (1.0 - ua) } else { f64::INFINITY };
        if tail < tol.tail_bound {
            return Ok(Truncated { value: Scalar::Float(val), tail });
        }
        val = val.mul(&one.sub(&uq));
        if val.is_zero() {
            // a factor hit exactly zero; the product is exactly 0
            return Ok(Truncated { value: Scalar::Float(val), tail: 0.0 });
        }
        uq = uq.mul(&qh);
        ua *= qa;
    }
}

/// theta_q(v) = (v;q)_inf (q v^{-1};q)_inf, v != 0, |q| < 1.
pub fn theta(v: &Scalar, q: &Scalar, tol: &Tolerance) -> Result<Truncated> {
    if v.is_zero() {
        return Err(QtError::Domain("theta_q(0) is undefined".into()));
    }
    let a = qpochhammer_inf(v, q, tol)?;
    let b = qpochhammer_inf(&q.try_div(v)?, q, tol)?;
    Ok(Truncated { value: &a.value * &b.value, tail: a.tail + b.tail })
}

/// psi_tau(u) = (-u)^(2 tau - 1) theta_q(t u)/theta_q(t u^{-1}) for real
/// u < 0, with t = q^tau. Quasi-constant: psi_tau(q u) = psi_tau(u), and
/// identically 1 for integer tau >= 1.
pub fn psi_tau(u: &Scalar, q: &Scalar, tau: f64, tol: &Tolerance) -> Result<Scalar> {
    if !u.is_real() || u.to_f64() >= 0.0 {
        return Err(QtError::Domain("psi_tau requires real u < 0".into()));
    }
    let bits = working_bits(&[u, q]);
    let qh = q.to_hp(bits);
    let t = HpComplex::pow_real(&qh.re, tau, bits);
    let th = Scalar::Float(HpComplex::new(t, astro_float::BigFloat::from_f64(0.0, bits), bits));
    let num = theta(&(&th * u), q, tol)?;
    let den = theta(&th.try_div(u)?, q, tol)?;
    // (-u)^(2 tau - 1) via the real logarithm of -u > 0; no branch ambiguity
    let mu = (-u).to_hp(bits);
    let pw = HpComplex::pow_real(&mu.re, 2.0 * tau - 1.0, bits);
    let pref = Scalar::Float(HpComplex::new(pw, astro_float::BigFloat::from_f64(0.0, bits), bits));
    (&pref * &num.value).try_div(&den.value)
}

/// C^-_λ(z;q,t): finite product over the boxes of λ; exact on exact inputs.
pub fn c_minus(lam: &Partition, z: &Scalar, q: &Scalar, t: &Scalar) -> Result<Scalar> {
    let mut val = Scalar::one();
    for (i, j) in lam.boxes() {
        let f = &*z * &(&q.powi(lam.arm(i, j) as i64)? * &t.powi(lam.leg(i, j) as i64)?);
        val = &val * &(&Scalar::one() - &f);
    }
    Ok(val)
}

/// C^+_λ(z;q,t): finite product over the boxes of λ; exact on exact inputs.
pub fn c_plus(lam: &Partition, z: &Scalar, q: &Scalar, t: &Scalar) -> Result<Scalar> {
    let mut val = Scalar::one();
    for (i, j) in lam.boxes() {
        let qe = lam.part(i) as i64 + j as i64 - 1;
        let te = 2 - lam.transpose().part(j) as i64 - i as i64;
        let f = &*z * &(&q.powi(qe)? * &t.powi(te)?);
        val = &val * &(&Scalar::one() - &f);
    }
    Ok(val)
}

/// Closed form for the one-particle normalization Z(q;a,b,c,d) on the
/// two-sided lattice with endpoints ζ±:
///
/// ```text
/// Z = (1-q) ζ+ (q, a/c, a/d, b/c, b/d; q)_inf / (ab/(cdq); q)_inf
///       * theta_q(ζ-/ζ+) theta_q(cd ζ- ζ+) /
///         [theta_q(c ζ-) theta_q(d ζ-) theta_q(c ζ+) theta_q(d ζ+)]
/// ```
pub fn z1_closed_form(
    q: &Scalar,
    a: &Scalar,
    b: &Scalar,
    c: &Scalar,
    d: &Scalar,
    zeta_plus: &Scalar,
    zeta_minus: &Scalar,
    tol: &Tolerance,
) -> Result<Truncated> {
    let mut tail = 0.0;
    let mut prod = |x: Result<Truncated>| -> Result<Scalar> {
        let t = x?;
        tail += t.tail;
        Ok(t.value)
    };
    let mut num = prod(qpochhammer_inf(q, q, tol))?;
    for (x, y) in [(a, c), (a, d), (b, c), (b, d)] {
        num = &num * &prod(qpochhammer_inf(&x.try_div(y)?, q, tol))?;
    }
    let ab_over = a * b;
    let cdq = &(c * d) * q;
    let den = prod(qpochhammer_inf(&ab_over.try_div(&cdq)?, q, tol))?;

    let th_num = &prod(theta(&zeta_minus.try_div(zeta_plus)?, q, tol))?
        * &prod(theta(&(&(c * d) * &(zeta_minus * zeta_plus)), q, tol))?;
    let mut th_den = Scalar::one();
    for (x, z) in [(c, zeta_minus), (d, zeta_minus), (c, zeta_plus), (d, zeta_plus)] {
        let th = prod(theta(&(&*x * &*z), q, tol))?;
        if th.is_zero() || th.abs_f64() < tol.tail_bound {
            return Err(QtError::ParameterDegeneracy(
                "theta_q in the Z denominator vanishes (parameter collides with the lattice)".into(),
            ));
        }
        th_den = &th_den * &th;
    }
    let pref = &(&Scalar::one() - q) * zeta_plus;
    let value = (&(&pref * &num) * &th_num).try_div(&(&den * &th_den))?;
    Ok(Truncated { value, tail })
}

// --- f64 fast path -------------------------------------------------------------

/// Double-precision versions used by the lattice-measure layer, where many
/// products are taken per configuration. Cross-checked against the
/// high-precision path in the tests.
pub mod f64path {
    use super::*;

    /// (u;q)_inf at double precision.
    pub fn qpochhammer_inf_c64(u: Complex64, q: f64) -> Complex64 {
        let mut val = Complex64::new(1.0, 0.0);
        let mut uq = u;
        while uq.norm() > 1e-18 {
            val *= Complex64::new(1.0, 0.0) - uq;
            if val == Complex64::new(0.0, 0.0) {
                return val;
            }
            uq *= q;
        }
        val
    }

    pub fn qpochhammer_inf_f64(u: f64, q: f64) -> f64 {
        let mut val = 1.0;
        let mut uq = u;
        while uq.abs() > 1e-18 {
            val *= 1.0 - uq;
            if val == 0.0 {
                return 0.0;
            }
            uq *= q;
        }
        val
    }

    pub fn theta_f64(v: f64, q: f64) -> f64 {
        qpochhammer_inf_f64(v, q) * qpochhammer_inf_f64(q / v, q)
    }

    /// (a·u;q)_∞ / (b·u;q)_∞ fused factor-by-factor, so the ratio stays
    /// finite even when |u| is large enough that either product alone would
    /// overflow.
    pub fn poch_ratio_f64(a: f64, b: f64, u: f64, q: f64) -> f64 {
        let mut r = 1.0;
        let (mut ua, mut ub) = (a * u, b * u);
        while ua.abs() > 1e-18 || ub.abs() > 1e-18 {
            r *= (1.0 - ua) / (1.0 - ub);
            ua *= q;
            ub *= q;
        }
        r
    }

    pub fn psi_tau_f64(u: f64, q: f64, tau: f64) -> f64 {
        debug_assert!(u < 0.0);
        let t = q.powf(tau);
        (-u).powf(2.0 * tau - 1.0) * theta_f64(t * u, q) / theta_f64(t / u, q)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn finite_pochhammer_examples() {
        let u = Scalar::rat(1, 2);
        let q = Scalar::rat(1, 2);
        assert_eq!(qpochhammer(&u, &q, 0), Scalar::one());
        assert_eq!(qpochhammer(&Scalar::one(), &q, 3), Scalar::zero());
        assert_eq!(qpochhammer(&u, &q, 2), Scalar::rat(3, 8));
    }

    #[test]
    fn pochhammer_splitting_identity() {
        // (u;q)_{n+m} = (u;q)_n (u q^n; q)_m, exact
        let u = Scalar::rat(2, 7);
        let q = Scalar::rat(3, 5);
        for (n, m) in [(0, 4), (2, 3), (5, 1)] {
            let lhs = qpochhammer(&u, &q, n + m);
            let shifted = &u * &q.powi(n as i64).unwrap();
            let rhs = &qpochhammer(&u, &q, n) * &qpochhammer(&shifted, &q, m);
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn qt_pochhammer_examples() {
        let u = Scalar::rat(1, 5);
        let q = Scalar::rat(1, 2);
        let t = Scalar::rat(1, 3);
        assert_eq!(qt_pochhammer(&u, &q, &t, &Partition::empty()).unwrap(), Scalar::one());
        assert_eq!(
            qt_pochhammer(&u, &q, &t, &Partition::of(&[1])).unwrap(),
            &Scalar::one() - &u
        );
        let expect = &(&Scalar::one() - &u) * &(&Scalar::one() - &u.try_div(&t).unwrap());
        assert_eq!(qt_pochhammer(&u, &q, &t, &Partition::of(&[1, 1])).unwrap(), expect);
    }

    #[test]
    fn infinite_pochhammer_reference_value() {
        // (1/2; 1/2)_inf = 0.2887880950866...
        let r = qpochhammer_inf(&Scalar::rat(1, 2), &Scalar::rat(1, 2), &tol()).unwrap();
        assert!((r.value.to_f64() - 0.2887880950866).abs() < 1e-12);
        // stable across two precisions
        let hi = qpochhammer_inf(
            &Scalar::rat(1, 2).promote(256),
            &Scalar::rat(1, 2).promote(256),
            &Tolerance::new(1e-40, 1e-30).unwrap(),
        )
        .unwrap();
        assert!(r.value.approx_eq(&hi.value, 1e-15));
        assert_eq!(
            qpochhammer_inf(&Scalar::one(), &Scalar::rat(1, 2), &tol()).unwrap().value,
            Scalar::float(0.0, 0.0, 128)
        );
        assert_eq!(
            qpochhammer_inf(&Scalar::zero(), &Scalar::rat(1, 2), &tol()).unwrap().value.to_f64(),
            1.0
        );
        assert!(qpochhammer_inf(&Scalar::one(), &Scalar::from_int(2), &tol()).is_err());
    }

    #[test]
    fn pochhammer_inf_functional_equation() {
        // (u;q)_inf = (1-u)(uq;q)_inf
        let u = Scalar::float(0.35, 0.2, 128);
        let q = Scalar::rat(2, 5);
        let lhs = qpochhammer_inf(&u, &q, &tol()).unwrap().value;
        let rhs = &(&Scalar::one() - &u)
            * &qpochhammer_inf(&(&u * &q), &q, &tol()).unwrap().value;
        assert!(lhs.approx_eq(&rhs, 1e-15));
    }

    #[test]
    fn theta_symmetry_and_zero() {
        let q = Scalar::rat(1, 2);
        // theta_q(q) = 0 because (1;q)_inf has the factor (1-1)
        assert!(theta(&q, &q, &tol()).unwrap().value.is_zero());
        for v in [Scalar::rat(-3, 4), Scalar::float(0.6, 0.3, 128)] {
            let a = theta(&v, &q, &tol()).unwrap().value;
            let b = theta(&q.try_div(&v).unwrap(), &q, &tol()).unwrap().value;
            assert!(a.approx_eq(&b, 1e-14), "theta symmetry at {v}");
        }
        assert!(theta(&Scalar::zero(), &q, &tol()).is_err());
    }

    #[test]
    fn theta_brute_truncation_cross_check() {
        // direct product truncation at two tolerances
        let v = -1.0;
        let q = 0.5;
        let direct = f64path::theta_f64(v, q);
        let viahp = theta(&Scalar::float64(v), &Scalar::rat(1, 2), &tol()).unwrap().value.to_f64();
        assert!((direct - viahp).abs() < 1e-12);
    }

    #[test]
    fn psi_tau_integer_is_one() {
        let q = Scalar::rat(2, 5);
        for tau in [1.0, 2.0] {
            for u in [-1.7, -0.3] {
                let v = psi_tau(&Scalar::float64(u), &q, tau, &tol()).unwrap();
                assert!((v.to_f64() - 1.0).abs() < 1e-12, "tau={tau} u={u}");
            }
        }
    }

    #[test]
    fn psi_tau_quasi_constant() {
        let q = Scalar::rat(2, 5);
        for tau in [0.5, 1.5] {
            for u in [-0.3, -1.0, -2.5] {
                let a = psi_tau(&Scalar::float64(u), &q, tau, &tol()).unwrap();
                let b = psi_tau(&Scalar::float64(0.4 * u), &q, tau, &tol()).unwrap();
                assert!(a.approx_eq(&b, 1e-12), "tau={tau} u={u}");
            }
        }
        assert!(psi_tau(&Scalar::float64(0.5), &Scalar::rat(2, 5), 1.0, &tol()).is_err());
    }

    #[test]
    fn c_products_examples() {
        let q = Scalar::rat(1, 2);
        let t = Scalar::rat(1, 3);
        let z = Scalar::rat(3, 7);
        assert_eq!(c_minus(&Partition::empty(), &z, &q, &t).unwrap(), Scalar::one());
        assert_eq!(c_plus(&Partition::empty(), &z, &q, &t).unwrap(), Scalar::one());
        // both C products over a single box (1,1) reduce to 1 - z
        let one_box = Partition::of(&[1]);
        let expect = &Scalar::one() - &z;
        assert_eq!(c_minus(&one_box, &z, &q, &t).unwrap(), expect);
        assert_eq!(c_plus(&one_box, &z, &q, &t).unwrap(), expect);
    }

    #[test]
    fn f64_path_matches_hp_path() {
        let q = 0.37;
        for u in [0.8, -0.45, 0.1] {
            let fast = f64path::qpochhammer_inf_f64(u, q);
            let hp = qpochhammer_inf(&Scalar::float64(u), &Scalar::float64(q), &tol())
                .unwrap()
                .value
                .to_f64();
            assert!((fast - hp).abs() < 1e-13);
        }
    }
}
