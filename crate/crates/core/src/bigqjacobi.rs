//! Expansion coefficients sigma, the (q,t,s)-binomial, rho, pi, and the
//! N-variate big q-Jacobi polynomials.
//!
//! ```text
//! sigma(μ,ν) = [(-1)^|μ| t^2n(μ) q^-n(μ') / ((-1)^|ν| t^2n(ν) q^-n(ν'))]
//!              * P*_ν(q^μ)/P*_ν(q^ν) * C-_ν(t)/C-_μ(t)
//!
//! binom(λ,μ)_{q,t,s} = Pbar*_μ(X̂(λ); q,t,t^(1-N)s) / Pbar*_μ(X̂(μ); …),
//!     the grid X̂ built with the same shifted parameter t^(1-N)s;
//!     N = max(ℓ(λ), ℓ(μ), 1); invariant under s -> -s and independent of N.
//!
//! rho(λ,μ)   = γ^(|μ|-|λ|) t^(n(λ)-n(μ)) binom(λ,μ)_{q,t,sqrt(γδq/(αβ))}
//!              * (γq/α;q,t)_λ (γq/β;q,t)_λ / [(γq/α;q,t)_μ (γq/β;q,t)_μ]
//!              * C-_μ(t)/C-_λ(t) * C+_μ(γδq/(αβ))/C+_λ(γδq/(αβ))
//!
//! pi(λ,ν)    = sum_{ν ⊆ μ ⊆ λ} rho(λ,μ) sigma(μ,ν) γ^(|ν|-|μ|)
//!
//! φ_{λ|N}    = sum_{ν ⊆ λ} [(t^N;q,t)_λ/(t^N;q,t)_ν] pi(λ,ν) P_{ν|N}
//! ```
//!
//! Only s² enters the binomial after per-box cancellation (every factor of
//! the tableau sum is s times a rational), so `rho` never extracts the
//! square root: it evaluates the binomial as a rational function of
//! s² = γδq/(αβ). This keeps the whole degenerate-series coefficient layer
//! in exact Gaussian-rational arithmetic.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{QtError, Result};
use crate::parallel::maybe_par_map;
use crate::partitions::{enumerate_reverse_tableaux, tableau_weight, Partition};
use crate::polyfamilies::{bc_grid, bc_interpolation, interpolation, macdonald, shifted_eval};
use crate::qspecial::{c_minus, c_plus, qt_pochhammer};
use crate::scalar::Scalar;
use crate::sympoly::SymmetricPolynomial;

/// Parameter regime of a quadruple (α, β, γ, δ).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Series {
    Degenerate,
    Principal,
    Complementary,
}

/// A quadruple of parameters with its series tag.
///
/// Degenerate: α ∈ ζ₊⁻¹qᶻ, β ∈ ζ₋⁻¹qᶻ (β<0<α), γ = conj(δ) ∉ ℝ.
/// Principal: α = conj(β) ∉ ℝ, γ = conj(δ) ∉ ℝ, αβ < γδ q.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Quadruple {
    pub alpha: Scalar,
    pub beta: Scalar,
    pub gamma: Scalar,
    pub delta: Scalar,
    pub series: Series,
}

impl Quadruple {
    pub fn new(alpha: Scalar, beta: Scalar, gamma: Scalar, delta: Scalar, series: Series) -> Result<Self> {
        let q = Quadruple { alpha, beta, gamma, delta, series };
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<()> {
        let conj_pair = |x: &Scalar, y: &Scalar| x.conj().approx_eq(y, 1e-12) && !x.is_real();
        if !conj_pair(&self.gamma, &self.delta) {
            return Err(QtError::Config("quadruple needs γ = conj(δ) ∉ ℝ".into()));
        }
        match self.series {
            Series::Degenerate => {
                let a = self.alpha.to_f64();
                let b = self.beta.to_f64();
                if !(self.alpha.is_real() && self.beta.is_real() && b < 0.0 && 0.0 < a) {
                    return Err(QtError::Config("degenerate series needs β < 0 < α real".into()));
                }
            }
            Series::Principal => {
                if !conj_pair(&self.alpha, &self.beta) {
                    return Err(QtError::Config("principal series needs α = conj(β) ∉ ℝ".into()));
                }
            }
            Series::Complementary => {
                if !(self.alpha.is_real() && self.beta.is_real()) {
                    return Err(QtError::Config("complementary series needs real α, β".into()));
                }
            }
        }
        Ok(())
    }

    /// γδq/(αβ), the square of the binomial's s-argument.
    pub fn s_squared(&self, q: &Scalar) -> Result<Scalar> {
        (&(&self.gamma * &self.delta) * q).try_div(&(&self.alpha * &self.beta))
    }

    /// αβ < γδ·q as reals (both products are real for every series).
    pub fn product_constraint_holds(&self, q: f64) -> bool {
        let ab = (&self.alpha * &self.beta).to_f64();
        let gd = (&self.gamma * &self.delta).to_f64();
        ab < gd * q
    }

    pub fn swapped_alpha_beta(&self) -> Quadruple {
        Quadruple {
            alpha: self.beta.clone(),
            beta: self.alpha.clone(),
            gamma: self.gamma.clone(),
            delta: self.delta.clone(),
            series: self.series,
        }
    }

    pub fn swapped_gamma_delta(&self) -> Quadruple {
        Quadruple {
            alpha: self.alpha.clone(),
            beta: self.beta.clone(),
            gamma: self.delta.clone(),
            delta: self.gamma.clone(),
            series: self.series,
        }
    }
}

/// sigma(μ,ν;q,t): the expansion coefficient of the interpolation
/// polynomials on the Macdonald basis. Zero unless ν ⊆ μ; equals 1 at ν = μ.
pub fn sigma(mu: &Partition, nu: &Partition, q: &Scalar, t: &Scalar) -> Result<Scalar> {
    if !mu.contains(nu) {
        return Ok(Scalar::zero());
    }
    if mu == nu {
        return Ok(Scalar::one());
    }
    let n = mu.length().max(nu.length()).max(1);
    let num_eval = shifted_eval(nu, mu, q, t, n)?;
    if num_eval.is_zero() {
        return Ok(Scalar::zero());
    }
    let den_eval = shifted_eval(nu, nu, q, t, n)?;
    let sign = |k: u32| if k % 2 == 0 { Scalar::one() } else { Scalar::from_int(-1) };
    let pref_mu = &(&sign(mu.size()) * &t.powi(2 * mu.n_stat() as i64)?)
        * &q.powi(-(mu.transpose().n_stat() as i64))?;
    let pref_nu = &(&sign(nu.size()) * &t.powi(2 * nu.n_stat() as i64)?)
        * &q.powi(-(nu.transpose().n_stat() as i64))?;
    let c_ratio = c_minus(nu, t, q, t)?.try_div(&c_minus(mu, t, q, t)?)?;
    let val = &(&pref_mu.try_div(&pref_nu)? * &num_eval.try_div(&den_eval)?) * &c_ratio;
    Ok(val)
}

/// The binomial coefficient at an explicit scalar s.
pub fn binomial_qts(lam: &Partition, mu: &Partition, q: &Scalar, t: &Scalar, s: &Scalar) -> Result<Scalar> {
    if !lam.contains(mu) {
        return Ok(Scalar::zero());
    }
    let n = lam.length().max(mu.length()).max(1);
    let s_shift = &t.powi(1 - n as i64)? * s;
    let poly = bc_interpolation(mu, n, q, t, &s_shift)?;
    let num = poly.eval(&bc_grid(lam, n, q, t, &s_shift)?.points)?;
    let den = poly.eval(&bc_grid(mu, n, q, t, &s_shift)?.points)?;
    if den.is_zero() {
        return Err(QtError::ParameterDegeneracy(format!(
            "binomial denominator Pbar*_{mu}(X̂({mu})) vanished"
        )));
    }
    num.try_div(&den)
}

/// The binomial coefficient as a function of s² (no square root taken).
///
/// Every factor of the tableau sum is s·[(p - c) + (1/p - 1/c)/s²] with
/// rational p (grid multiplier) and c (box constant); the s^|μ| prefactors
/// of numerator and denominator cancel in the ratio.
pub fn binomial_qts_squared(
    lam: &Partition,
    mu: &Partition,
    q: &Scalar,
    t: &Scalar,
    s_squared: &Scalar,
) -> Result<Scalar> {
    if !lam.contains(mu) {
        return Ok(Scalar::zero());
    }
    if lam == mu {
        return Ok(Scalar::one());
    }
    let n = lam.length().max(mu.length()).max(1);
    let num = bc_tableau_sum_reduced(mu, lam, n, q, t, s_squared)?;
    let den = bc_tableau_sum_reduced(mu, mu, n, q, t, s_squared)?;
    if den.is_zero() {
        return Err(QtError::ParameterDegeneracy(format!(
            "binomial denominator Pbar*_{mu}(X̂({mu})) vanished"
        )));
    }
    num.try_div(&den)
}

/// Tableau sum of the BC combinatorial formula at the grid X̂(κ), with each
/// factor divided by s: sum_T psi_T prod_box [(p - c) + (1/p - 1/c)/s²],
/// where z = p·s (grid entry with the shifted parameter absorbed) and
/// w = c·s (box constant likewise).
fn bc_tableau_sum_reduced(
    mu: &Partition,
    kappa: &Partition,
    n: usize,
    q: &Scalar,
    t: &Scalar,
    s_squared: &Scalar,
) -> Result<Scalar> {
    // grid multiplier p_k = q^(κ_k) t^(1-k); box constant c = q^(j-1) t^(2-i-T)
    let p: Vec<Scalar> = (1..=n)
        .map(|k| Ok(&q.powi(kappa.part(k) as i64)? * &t.powi(1 - k as i64)?))
        .collect::<Result<Vec<_>>>()?;
    let p_inv: Vec<Scalar> = p.iter().map(|x| Scalar::one().try_div(x)).collect::<Result<Vec<_>>>()?;
    let mut total = Scalar::zero();
    for tab in enumerate_reverse_tableaux(mu, n) {
        let mut term = tableau_weight(&tab, n, q, t)?;
        for (i, j, v) in tab.iter_boxes() {
            let c = &q.powi(j as i64 - 1)? * &t.powi(2 - i as i64 - v as i64)?;
            let c_inv = Scalar::one().try_div(&c)?;
            let k = v as usize - 1;
            let even = &p[k] - &c;
            let odd = (&p_inv[k] - &c_inv).try_div(s_squared)?;
            term = &term * &(&even + &odd);
            if term.is_zero() {
                break;
            }
        }
        total = &total + &term;
    }
    Ok(total)
}

/// rho(λ,μ;q,t;α,β,γ,δ) per the expansion of the big q-Jacobi polynomials
/// on the interpolation polynomials. Zero unless μ ⊆ λ; equals 1 at μ = λ.
pub fn rho(lam: &Partition, mu: &Partition, q: &Scalar, t: &Scalar, quad: &Quadruple) -> Result<Scalar> {
    if !lam.contains(mu) {
        return Ok(Scalar::zero());
    }
    if lam == mu {
        return Ok(Scalar::one());
    }
    let degeneracy = |e: QtError| match e {
        QtError::DivisionByZero(_) => {
            QtError::ParameterDegeneracy("a denominator factor of rho vanished".into())
        }
        e => e,
    };
    let s2 = quad.s_squared(q)?;
    let binom = binomial_qts_squared(lam, mu, q, t, &s2)?;
    let g = &quad.gamma;
    let gq = g * q;
    let ga = gq.try_div(&quad.alpha)?;
    let gb = gq.try_div(&quad.beta)?;
    let poch = (&qt_pochhammer(&ga, q, t, lam)? * &qt_pochhammer(&gb, q, t, lam)?)
        .try_div(&(&qt_pochhammer(&ga, q, t, mu)? * &qt_pochhammer(&gb, q, t, mu)?))
        .map_err(degeneracy)?;
    let cm = c_minus(mu, t, q, t)?
        .try_div(&c_minus(lam, t, q, t)?)
        .map_err(degeneracy)?;
    let cp = c_plus(mu, &s2, q, t)?
        .try_div(&c_plus(lam, &s2, q, t)?)
        .map_err(degeneracy)?;
    let pref = &g.powi(mu.size() as i64 - lam.size() as i64)?
        * &t.powi(lam.n_stat() as i64 - mu.n_stat() as i64)?;
    Ok(&(&(&pref * &binom) * &poch) * &(&cm * &cp))
}

/// pi(λ,ν;q,t;α,β,γ,δ) = sum over ν ⊆ μ ⊆ λ of rho(λ,μ) sigma(μ,ν) γ^(|ν|-|μ|).
pub fn pi(lam: &Partition, nu: &Partition, q: &Scalar, t: &Scalar, quad: &Quadruple) -> Result<Scalar> {
    if !lam.contains(nu) {
        return Ok(Scalar::zero());
    }
    let mut total = Scalar::zero();
    for mu in Partition::interval(nu, lam) {
        let r = rho(lam, &mu, q, t, quad)?;
        if r.is_zero() {
            continue;
        }
        let s = sigma(&mu, nu, q, t)?;
        if s.is_zero() {
            continue;
        }
        let g = quad.gamma.powi(nu.size() as i64 - mu.size() as i64)?;
        total = &total + &(&(&r * &s) * &g);
    }
    Ok(total)
}

/// The N-variate big q-Jacobi polynomial
/// φ_{λ|N}(·;q,t;α,β,γt^(1-N),δt^(1-N)), built from its expansion on the
/// Macdonald basis with the N-free coefficients pi(λ,ν).
pub fn big_q_jacobi(
    lam: &Partition,
    n: usize,
    q: &Scalar,
    t: &Scalar,
    quad: &Quadruple,
) -> Result<SymmetricPolynomial> {
    if lam.length() > n {
        return Err(QtError::Index(format!("{lam} does not fit in {n} variables")));
    }
    let tn = t.powi(n as i64)?;
    let poch_lam = qt_pochhammer(&tn, q, t, lam)?;
    let mut out = SymmetricPolynomial::zero(n);
    for nu in lam.subpartitions() {
        let c = pi(lam, &nu, q, t, quad)?;
        if c.is_zero() {
            continue;
        }
        let ratio = poch_lam.try_div(&qt_pochhammer(&tn, q, t, &nu)?)?;
        let p = macdonald(&nu, n, q, t)?;
        out = out.add(&p.scale(&(&ratio * &c)))?;
    }
    Ok(out)
}

/// The same polynomial built through the independent route: the expansion
/// on interpolation polynomials with the rho coefficients,
/// φ = sum_μ [(t^N)_λ/(t^N)_μ] rho(λ,μ) γ^(-|μ|) I_{μ|N}(γx).
pub fn big_q_jacobi_interpolation_route(
    lam: &Partition,
    n: usize,
    q: &Scalar,
    t: &Scalar,
    quad: &Quadruple,
) -> Result<SymmetricPolynomial> {
    if lam.length() > n {
        return Err(QtError::Index(format!("{lam} does not fit in {n} variables")));
    }
    let tn = t.powi(n as i64)?;
    let poch_lam = qt_pochhammer(&tn, q, t, lam)?;
    let mut out = SymmetricPolynomial::zero(n);
    for mu in lam.subpartitions() {
        let r = rho(lam, &mu, q, t, quad)?;
        if r.is_zero() {
            continue;
        }
        let ratio = poch_lam.try_div(&qt_pochhammer(&tn, q, t, &mu)?)?;
        let ipoly = interpolation(&mu, n, q, t)?;
        // substitute x -> γx and divide by γ^|μ|: m_κ picks up γ^(|κ|-|μ|)
        let mut scaled = SymmetricPolynomial::zero(n);
        for (kappa, c) in ipoly.terms() {
            let gpow = quad.gamma.powi(kappa.size() as i64 - mu.size() as i64)?;
            scaled.add_term(kappa.clone(), &(c * &gpow) * &(&ratio * &r));
        }
        out = out.add(&scaled)?;
    }
    Ok(out)
}

/// Expansion-stability check: extract the coefficients of
/// φ_{λ|N}/(t^N;q,t)_λ on the normalized Macdonald basis P_{ν|N}/(t^N;q,t)_ν
/// by triangular solve — with φ built through the interpolation route, NOT
/// through pi — and compare them exactly with pi(λ,ν), at both N and N+1.
pub fn stability_check(lam: &Partition, n: usize, q: &Scalar, t: &Scalar, quad: &Quadruple) -> Result<bool> {
    for m in [n, n + 1] {
        let phi = big_q_jacobi_interpolation_route(lam, m, q, t, quad)?;
        let coeffs = phi.coefficients_in_macdonald(q, t)?;
        let tn = t.powi(m as i64)?;
        let poch_lam = qt_pochhammer(&tn, q, t, lam)?;
        for nu in lam.subpartitions() {
            let expect = pi(lam, &nu, q, t, quad)?;
            let ratio = poch_lam.try_div(&qt_pochhammer(&tn, q, t, &nu)?)?;
            let got = coeffs.get(&nu).cloned().unwrap_or_else(Scalar::zero).try_div(&ratio)?;
            if got != expect {
                return Ok(false);
            }
        }
        // no extraneous coefficients outside {ν ⊆ λ}
        for (nu, c) in &coeffs {
            if !lam.contains(nu) && !c.is_zero() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Table of pi coefficients for all λ up to a size cap, with (λ,λ) = 1 on
/// the diagonal and absent entries meaning 0. Entries for distinct pairs
/// are computed independently (in parallel when the feature is on).
#[derive(Debug, Clone)]
pub struct CoefficientTable {
    pub q: Scalar,
    pub t: Scalar,
    pub quad: Quadruple,
    pub entries: BTreeMap<(Partition, Partition), Scalar>,
}

impl CoefficientTable {
    pub fn build(q: &Scalar, t: &Scalar, quad: &Quadruple, max_size: u32) -> Result<Self> {
        let mut pairs = Vec::new();
        for lam in Partition::all_up_to(max_size, None) {
            for nu in lam.subpartitions() {
                pairs.push((lam.clone(), nu));
            }
        }
        let computed: Vec<Result<Scalar>> = maybe_par_map(&pairs, |(lam, nu)| pi(lam, nu, q, t, quad));
        let mut entries = BTreeMap::new();
        for (pair, val) in pairs.into_iter().zip(computed) {
            entries.insert(pair, val?);
        }
        Ok(CoefficientTable { q: q.clone(), t: t.clone(), quad: quad.clone(), entries })
    }

    pub fn get(&self, lam: &Partition, nu: &Partition) -> Scalar {
        self.entries
            .get(&(lam.clone(), nu.clone()))
            .cloned()
            .unwrap_or_else(Scalar::zero)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> Scalar {
        Scalar::rat(1, 2)
    }
    fn t() -> Scalar {
        Scalar::rat(1, 3)
    }

    /// ζ+ = 1, ζ- = -1 degenerate quadruple: α = 1/2, β = -1, γ = i, δ = -i.
    fn degenerate_quad() -> Quadruple {
        Quadruple::new(
            Scalar::rat(1, 2),
            Scalar::from_int(-1),
            Scalar::i(),
            -Scalar::i(),
            Series::Degenerate,
        )
        .unwrap()
    }

    #[test]
    fn sigma_triangularity() {
        for mu in Partition::all_up_to(3, None) {
            assert_eq!(sigma(&mu, &mu, &q(), &t()).unwrap(), Scalar::one());
            for nu in Partition::all_up_to(3, None) {
                if !mu.contains(&nu) {
                    assert_eq!(sigma(&mu, &nu, &q(), &t()).unwrap(), Scalar::zero());
                }
            }
        }
    }

    #[test]
    fn sigma_reproduces_interpolation_expansion() {
        // I_{μ|N}/(t^N)_μ = sum_ν sigma(μ,ν) P_{ν|N}/(t^N)_ν, exact
        for mu in Partition::all_up_to(4, None) {
            for n in [mu.length().max(1), mu.length() + 1] {
                let tn = t().powi(n as i64).unwrap();
                let ipoly = interpolation(&mu, n, &q(), &t()).unwrap();
                let poch_mu = qt_pochhammer(&tn, &q(), &t(), &mu).unwrap();
                let mut rhs = SymmetricPolynomial::zero(n);
                for nu in mu.subpartitions() {
                    let c = sigma(&mu, &nu, &q(), &t()).unwrap();
                    let ratio = poch_mu
                        .try_div(&qt_pochhammer(&tn, &q(), &t(), &nu).unwrap())
                        .unwrap();
                    let p = macdonald(&nu, n, &q(), &t()).unwrap();
                    rhs = rhs.add(&p.scale(&(&ratio * &c))).unwrap();
                }
                assert_eq!(ipoly, rhs, "mu={mu} N={n}");
            }
        }
    }

    #[test]
    fn binomial_properties() {
        let s = Scalar::rat(3, 5);
        assert_eq!(
            binomial_qts(&Partition::of(&[2, 1]), &Partition::of(&[2, 1]), &q(), &t(), &s).unwrap(),
            Scalar::one()
        );
        assert_eq!(
            binomial_qts(&Partition::of(&[2]), &Partition::of(&[1, 1]), &q(), &t(), &s).unwrap(),
            Scalar::zero()
        );
        // s -> -s invariance, exact; and the squared path agrees
        for (lam, mu) in [([3u32, 1].as_slice(), [1u32].as_slice()), (&[2, 2], &[2, 1]), (&[4], &[2])] {
            let (lam, mu) = (Partition::of(lam), Partition::of(mu));
            let a = binomial_qts(&lam, &mu, &q(), &t(), &s).unwrap();
            let b = binomial_qts(&lam, &mu, &q(), &t(), &(-&s)).unwrap();
            assert_eq!(a, b, "lam={lam} mu={mu}");
            let c = binomial_qts_squared(&lam, &mu, &q(), &t(), &(&s * &s)).unwrap();
            assert_eq!(a, c, "squared path lam={lam} mu={mu}");
        }
    }

    #[test]
    fn binomial_n_independence() {
        let s = Scalar::rat(3, 5);
        for (lam, mu) in [([2u32, 1].as_slice(), [1u32].as_slice()), (&[3, 1], &[2, 1])] {
            let (lam, mu) = (Partition::of(lam), Partition::of(mu));
            let n1 = lam.length().max(mu.length()).max(1);
            let reference = binomial_qts(&lam, &mu, &q(), &t(), &s).unwrap();
            for n in [n1, n1 + 1, n1 + 2] {
                let s_shift = &t().powi(1 - n as i64).unwrap() * &s;
                let poly = bc_interpolation(&mu, n, &q(), &t(), &s_shift).unwrap();
                let num = poly
                    .eval(&bc_grid(&lam, n, &q(), &t(), &s_shift).unwrap().points)
                    .unwrap();
                let den = poly
                    .eval(&bc_grid(&mu, n, &q(), &t(), &s_shift).unwrap().points)
                    .unwrap();
                let v = num.try_div(&den).unwrap();
                assert_eq!(v, reference, "lam={lam} mu={mu} N={n}");
            }
        }
    }

    #[test]
    fn rho_and_pi_basics() {
        let quad = degenerate_quad();
        let lam = Partition::of(&[2, 1]);
        assert_eq!(rho(&lam, &lam, &q(), &t(), &quad).unwrap(), Scalar::one());
        assert_eq!(
            rho(&Partition::of(&[2]), &Partition::of(&[1, 1]), &q(), &t(), &quad).unwrap(),
            Scalar::zero()
        );
        assert_eq!(pi(&lam, &lam, &q(), &t(), &quad).unwrap(), Scalar::one());
        assert_eq!(
            pi(&Partition::of(&[1]), &Partition::of(&[2]), &q(), &t(), &quad).unwrap(),
            Scalar::zero()
        );
        // pi is real in exact arithmetic for the degenerate series
        for nu in lam.subpartitions() {
            let v = pi(&lam, &nu, &q(), &t(), &quad).unwrap();
            assert!(v.is_real(), "pi({lam},{nu}) = {v} not real");
        }
    }

    #[test]
    fn pi_symmetries_exact() {
        let quad = degenerate_quad();
        let ab = quad.swapped_alpha_beta();
        let gd = quad.swapped_gamma_delta();
        for lam in Partition::all_up_to(3, None) {
            for nu in lam.subpartitions() {
                let base = pi(&lam, &nu, &q(), &t(), &quad).unwrap();
                assert_eq!(base, pi(&lam, &nu, &q(), &t(), &ab).unwrap(), "α↔β at ({lam},{nu})");
                assert_eq!(base, pi(&lam, &nu, &q(), &t(), &gd).unwrap(), "γ↔δ at ({lam},{nu})");
            }
        }
    }

    #[test]
    fn big_q_jacobi_leading_coefficient() {
        let quad = degenerate_quad();
        for lam in [Partition::of(&[1]), Partition::of(&[2, 1])] {
            let n = lam.length() + 1;
            let phi = big_q_jacobi(&lam, n, &q(), &t(), &quad).unwrap();
            let coeffs = phi.coefficients_in_macdonald(&q(), &t()).unwrap();
            assert_eq!(coeffs.get(&lam).unwrap(), &Scalar::one());
            assert_eq!(
                big_q_jacobi(&Partition::empty(), n, &q(), &t(), &quad).unwrap(),
                SymmetricPolynomial::constant(n, Scalar::one())
            );
        }
    }

    #[test]
    fn stability_small_cases() {
        let quad = degenerate_quad();
        for lam in [Partition::of(&[1]), Partition::of(&[2]), Partition::of(&[1, 1]), Partition::of(&[2, 1])] {
            let n = lam.length().max(1);
            assert!(stability_check(&lam, n, &q(), &t(), &quad).unwrap(), "lam={lam}");
        }
    }

    #[test]
    fn coefficient_table_diagonal() {
        let quad = degenerate_quad();
        let table = CoefficientTable::build(&q(), &t(), &quad, 2).unwrap();
        for lam in Partition::all_up_to(2, None) {
            assert_eq!(table.get(&lam, &lam), Scalar::one());
        }
        assert_eq!(table.get(&Partition::of(&[1]), &Partition::of(&[2])), Scalar::zero());
    }
}
