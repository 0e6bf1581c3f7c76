//! Discrete beta ensembles with explicit stochastic links, the continuous
//! s-measures with the Dixon–Anderson kernel, and the q → 1 degeneration
//! checks connecting them to the lattice measures.
//!
//! Discrete side (positions n_i = ν_i + (N-i)τ):
//!
//! ```text
//! P_N(ν) ∝ prod_{i<j} Γ(n_i-n_j+1) Γ(n_i-n_j+τ) / [Γ(n_i-n_j) Γ(n_i-n_j+1-τ)]
//!        × prod_i Γ(-z+(1-N)τ+n_i) Γ(-z'+(1-N)τ+n_i) / [Γ(w+1+n_i) Γ(w'+1+n_i)]
//!
//! L(ν,μ) = Γ(Nτ)/Γ(τ)^N
//!        × prod_{1≤i<j≤N}   Γ(μ_i-ν_j+(j-i)τ)   / Γ(μ_i-ν_j+(j-i-1)τ+1)
//!        × prod_{1≤i≤j≤N-1} Γ(ν_i-μ_j+(j-i+1)τ) / Γ(ν_i-μ_j+(j-i)τ+1)
//!        × prod_{1≤i<j≤N}   Γ(ν_i-ν_j+(j-i-1)τ+1) / Γ(ν_i-ν_j+(j-i+1)τ)
//!        × prod_{1≤i<j≤N-1} (μ_i-μ_j+(j-i)τ) × 1_{μ≺ν}
//! ```
//!
//! (The printed source drops a τ in the second denominator; the form above
//! is the one whose rows sum to 1.)
//!
//! Continuous side:
//!
//! ```text
//! P^{τ;s}_N(du) ∝ prod_k (1+iu_k)^(-s-(N-1)τ) (1-iu_k)^(-s̄-(N-1)τ)
//!               × prod_{k<l} (u_k-u_l)^(2τ) du
//!
//! L(u,dv) = Γ(Nτ)/Γ(τ)^N prod_{i<j}(u_i-u_j)^(1-2τ) prod_{i<j}(v_i-v_j)
//!         × prod_{i,j} |v_i-u_j|^(τ-1) 1_{v≺u} dv
//! ```

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::ensembles::{
    enumerate_configurations, partition_function, unnormalized_weight, Configuration, MeasureSpec,
    ParameterSet, QuadF,
};
use crate::error::{QtError, Result};
use crate::gamma::{lgamma_complex, lgamma_real};
use crate::parallel::maybe_par_map;
use crate::bigqjacobi::Series;
use crate::quadrature::{gauss_jacobi, gauss_legendre};
use crate::scalar::Tolerance;

// --- parameters -----------------------------------------------------------------

/// Principal-series parameters for the discrete beta ensemble: z' = conj(z),
/// w' = conj(w), Im z ≠ 0, Re(z+w) > -1/2.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ZwParams {
    pub tau: f64,
    pub z: Complex64,
    pub w: Complex64,
}

impl ZwParams {
    pub fn new(tau: f64, z: Complex64, w: Complex64) -> Result<Self> {
        if tau <= 0.0 {
            return Err(QtError::Config("tau must be positive".into()));
        }
        if z.im == 0.0 {
            return Err(QtError::Config("z must be non-real".into()));
        }
        if z.re + w.re <= -0.5 {
            return Err(QtError::Config("need Re(z+w) > -1/2".into()));
        }
        Ok(ZwParams { tau, z, w })
    }
}

/// Parameters of the s-measure (generalized Cauchy): Re(s) > 1/2.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SParams {
    pub s: Complex64,
    pub tau: f64,
}

impl SParams {
    pub fn new(s: Complex64, tau: f64) -> Result<Self> {
        if s.re <= 0.5 || tau <= 0.0 {
            return Err(QtError::Config("need Re(s) > 1/2 and tau > 0".into()));
        }
        Ok(SParams { s, tau })
    }
}

fn check_signature(nu: &[i64]) -> Result<()> {
    if nu.windows(2).any(|w| w[0] < w[1]) {
        return Err(QtError::Config(format!("not weakly decreasing: {nu:?}")));
    }
    Ok(())
}

// --- discrete beta ensembles -------------------------------------------------------

/// Unnormalized weight of the discrete beta ensemble at the signature ν.
/// Real and nonnegative for principal parameters (the z- and w-factors come
/// in conjugate pairs).
pub fn discrete_beta_weight(nu: &[i64], p: &ZwParams, n: usize) -> Result<f64> {
    check_signature(nu)?;
    if nu.len() != n {
        return Err(QtError::Index(format!("signature length {} != N = {}", nu.len(), n)));
    }
    let tau = p.tau;
    let pos = |i: usize| nu[i] as f64 + (n as f64 - (i + 1) as f64) * tau;
    let mut log_w = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let d = pos(i) - pos(j);
            log_w += lgamma_real(d + 1.0) + lgamma_real(d + tau)
                - lgamma_real(d)
                - lgamma_real(d + 1.0 - tau);
        }
    }
    for i in 0..n {
        let ni = pos(i);
        let shift = (1.0 - n as f64) * tau + ni;
        // Γ(-z+·)Γ(-z̄+·) = |Γ(-z+·)|² and likewise for the denominator
        log_w += 2.0 * lgamma_complex(Complex64::new(shift, 0.0) - p.z).re;
        log_w -= 2.0 * lgamma_complex(p.w + 1.0 + ni).re;
    }
    Ok(log_w.exp())
}

/// The stochastic link L^N_{N-1}(ν, μ) with the interlacing indicator.
pub fn discrete_link(nu: &[i64], mu: &[i64], tau: f64) -> Result<f64> {
    check_signature(nu)?;
    check_signature(mu)?;
    let n = nu.len();
    if mu.len() + 1 != n {
        return Err(QtError::Index("link needs |μ| = |ν| - 1".into()));
    }
    // interlacing ν_i >= μ_i >= ν_{i+1}
    for i in 0..n - 1 {
        if !(nu[i] >= mu[i] && mu[i] >= nu[i + 1]) {
            return Ok(0.0);
        }
    }
    let mut log_l = lgamma_real(n as f64 * tau) - n as f64 * lgamma_real(tau);
    // poles of the denominator Γ's cannot occur on the support: all
    // arguments below are >= min(τ, 1) > 0 there
    for i in 1..=n {
        for j in (i + 1)..=n {
            let d = (mu[i - 1] - nu[j - 1]) as f64;
            log_l += lgamma_real(d + (j - i) as f64 * tau);
            log_l -= lgamma_real(d + (j - i - 1) as f64 * tau + 1.0);
        }
    }
    for i in 1..=(n - 1) {
        for j in i..=(n - 1) {
            let d = (nu[i - 1] - mu[j - 1]) as f64;
            log_l += lgamma_real(d + (j - i + 1) as f64 * tau);
            log_l -= lgamma_real(d + (j - i) as f64 * tau + 1.0);
        }
    }
    for i in 1..=n {
        for j in (i + 1)..=n {
            let d = (nu[i - 1] - nu[j - 1]) as f64;
            log_l += lgamma_real(d + (j - i - 1) as f64 * tau + 1.0);
            log_l -= lgamma_real(d + (j - i + 1) as f64 * tau);
        }
    }
    let mut lin = 1.0;
    for i in 1..=(n - 1) {
        for j in (i + 1)..=(n - 1) {
            lin *= (mu[i - 1] - mu[j - 1]) as f64 + (j - i) as f64 * tau;
        }
    }
    Ok(log_l.exp() * lin)
}

/// The τ = 1 closed form:
/// (N-1)! ∏_{i<j≤N-1}(μ_i-μ_j+j-i) / ∏_{i<j≤N}(ν_i-ν_j+j-i) · 1_{μ≺ν}.
pub fn discrete_link_tau1(nu: &[i64], mu: &[i64]) -> Result<f64> {
    check_signature(nu)?;
    check_signature(mu)?;
    let n = nu.len();
    if mu.len() + 1 != n {
        return Err(QtError::Index("link needs |μ| = |ν| - 1".into()));
    }
    for i in 0..n - 1 {
        if !(nu[i] >= mu[i] && mu[i] >= nu[i + 1]) {
            return Ok(0.0);
        }
    }
    let mut v = (1..n).map(|k| k as f64).product::<f64>();
    for i in 0..n - 1 {
        for j in (i + 1)..n - 1 {
            v *= (mu[i] - mu[j] + (j - i) as i64) as f64;
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            v /= (nu[i] - nu[j] + (j - i) as i64) as f64;
        }
    }
    Ok(v)
}

/// All μ interlacing ν (a box product of ranges).
pub fn interlacing_signatures(nu: &[i64]) -> Vec<Vec<i64>> {
    let n = nu.len();
    if n == 0 {
        return vec![];
    }
    let mut out: Vec<Vec<i64>> = vec![Vec::new()];
    for i in 0..n - 1 {
        let (hi, lo) = (nu[i], nu[i + 1]);
        let mut next = Vec::new();
        for prefix in out {
            let upper = prefix.last().copied().unwrap_or(i64::MAX).min(hi);
            for m in lo..=upper {
                let mut p = prefix.clone();
                p.push(m);
                next.push(p);
            }
        }
        out = next;
    }
    out
}

/// Weakly decreasing integer tuples of length `n` with entries in
/// [-window, window].
pub fn signatures_in_window(n: usize, window: i64) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(n);
    fn rec(n: usize, lo: i64, hi: i64, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        let top = cur.last().copied().unwrap_or(hi);
        for v in (lo..=top).rev() {
            cur.push(v);
            rec(n, lo, hi, cur, out);
            cur.pop();
        }
    }
    rec(n, -window, window, &mut cur, &mut out);
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct CoherencyReport {
    pub n: usize,
    pub window: i64,
    /// max over μ in the inner window of |Σ_ν P_N(ν) L(ν,μ) - P_{N-1}(μ)|
    pub max_residual: f64,
    /// residual of the same computation with the link replaced by the
    /// uniform stochastic matrix on the interlacing support
    pub negative_control_residual: f64,
    /// window-truncation estimate: boundary mass of the ν-ensemble
    pub boundary_mass: f64,
    pub n_signatures: usize,
}

/// Verify the coherency P_N L = P_{N-1} over a signature window.
pub fn verify_discrete_coherency(p: &ZwParams, n: usize, window: i64) -> Result<CoherencyReport> {
    if n < 2 {
        return Err(QtError::Config("coherency needs N >= 2".into()));
    }
    let nus = signatures_in_window(n, window);
    let weights: Vec<f64> = maybe_par_map(&nus, |nu| discrete_beta_weight(nu, p, n))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let z_n: f64 = weights.iter().sum();
    let boundary_mass: f64 = nus
        .iter()
        .zip(&weights)
        .filter(|(nu, _)| nu.iter().any(|v| v.abs() >= window - 1))
        .map(|(_, w)| w)
        .sum::<f64>()
        / z_n;

    let mut lhs: std::collections::BTreeMap<Vec<i64>, f64> = std::collections::BTreeMap::new();
    let mut lhs_uniform = lhs.clone();
    let links: Vec<(usize, Vec<(Vec<i64>, f64, f64)>)> = maybe_par_map(
        &(0..nus.len()).collect::<Vec<_>>(),
        |&i| {
            let nu = &nus[i];
            let mus = interlacing_signatures(nu);
            let k = mus.len() as f64;
            let rows: Vec<(Vec<i64>, f64, f64)> = mus
                .into_iter()
                .map(|mu| {
                    let l = discrete_link(nu, &mu, p.tau).unwrap_or(0.0);
                    (mu, l, 1.0 / k)
                })
                .collect();
            (i, rows)
        },
    );
    for (i, rows) in links {
        let wn = weights[i] / z_n;
        for (mu, l, u) in rows {
            *lhs.entry(mu.clone()).or_insert(0.0) += wn * l;
            *lhs_uniform.entry(mu).or_insert(0.0) += wn * u;
        }
    }

    let inner = window - 2;
    let mus = signatures_in_window(n - 1, window);
    let mu_weights: Vec<f64> = maybe_par_map(&mus, |mu| discrete_beta_weight(mu, p, n - 1))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let z_m: f64 = mu_weights.iter().sum();
    let mut max_residual = 0.0f64;
    let mut max_uniform = 0.0f64;
    for (mu, wm) in mus.iter().zip(&mu_weights) {
        if mu.iter().any(|v| v.abs() > inner) {
            continue;
        }
        let rhs = wm / z_m;
        let l = lhs.get(mu).copied().unwrap_or(0.0);
        let u = lhs_uniform.get(mu).copied().unwrap_or(0.0);
        max_residual = max_residual.max((l - rhs).abs());
        max_uniform = max_uniform.max((u - rhs).abs());
    }
    Ok(CoherencyReport {
        n,
        window,
        max_residual,
        negative_control_residual: max_uniform,
        boundary_mass,
        n_signatures: nus.len(),
    })
}

// --- s-measures and the Dixon–Anderson kernel ------------------------------------------

/// Unnormalized s-measure density on u_1 > … > u_N.
pub fn s_measure_density(u: &[f64], p: &SParams) -> Result<f64> {
    if u.windows(2).any(|w| w[0] <= w[1]) {
        return Err(QtError::Config("coordinates must be strictly decreasing".into()));
    }
    let n = u.len() as f64;
    let expo = p.s + (n - 1.0) * p.tau;
    let mut log_d = 0.0;
    for &x in u {
        // (1+ix)^(-s-(N-1)τ) (1-ix)^(-s̄-(N-1)τ) = exp(-2 Re[(s+(N-1)τ) ln(1+ix)])
        log_d -= 2.0 * (expo * Complex64::new(1.0, x).ln()).re;
    }
    for (i, &x) in u.iter().enumerate() {
        for &y in &u[i + 1..] {
            log_d += 2.0 * p.tau * (x - y).ln();
        }
    }
    Ok(log_d.exp())
}

/// Normalization Z_N(s,τ) by quadrature on the tangent-transformed line
/// (N = 1 or 2).
pub fn s_measure_normalization(p: &SParams, n: usize, nodes: usize) -> Result<f64> {
    let rule = gauss_legendre(nodes)?;
    let half_pi = std::f64::consts::FRAC_PI_2;
    match n {
        1 => Ok(rule.integrate(-half_pi, half_pi, |th| {
            let u = th.tan();
            s_measure_density(&[u], p).unwrap_or(0.0) / th.cos().powi(2)
        })),
        2 => {
            // u1 > u2: integrate over th1, th2 with the ordering indicator
            let mut total = 0.0;
            for (i, &th1) in rule.nodes.iter().enumerate() {
                let t1 = half_pi * th1;
                let u1 = t1.tan();
                let w1 = rule.weights[i] * half_pi / t1.cos().powi(2);
                for (j, &th2) in rule.nodes.iter().enumerate() {
                    let t2 = half_pi * th2;
                    let u2 = t2.tan();
                    if u2 >= u1 {
                        continue;
                    }
                    let w2 = rule.weights[j] * half_pi / t2.cos().powi(2);
                    total += w1 * w2 * s_measure_density(&[u1, u2], p).unwrap_or(0.0);
                }
            }
            Ok(total)
        }
        _ => Err(QtError::Config("s-measure normalization implemented for N <= 2".into())),
    }
}

/// The Dixon–Anderson interlacing kernel density at (u, v), v strictly
/// interlacing u; zero otherwise.
pub fn dixon_anderson_kernel(u: &[f64], v: &[f64], tau: f64) -> Result<f64> {
    let n = u.len();
    if v.len() + 1 != n {
        return Err(QtError::Index("kernel needs |v| = |u| - 1".into()));
    }
    if u.windows(2).any(|w| w[0] <= w[1]) {
        return Err(QtError::Config("u must be strictly decreasing".into()));
    }
    for i in 0..n - 1 {
        if !(u[i] > v[i] && v[i] > u[i + 1]) {
            return Ok(0.0);
        }
    }
    let mut log_k = lgamma_real(n as f64 * tau) - n as f64 * lgamma_real(tau);
    for i in 0..n {
        for j in (i + 1)..n {
            log_k += (1.0 - 2.0 * tau) * (u[i] - u[j]).ln();
        }
    }
    for i in 0..n - 1 {
        for j in (i + 1)..n - 1 {
            log_k += (v[i] - v[j]).ln();
        }
    }
    for (i, &vi) in v.iter().enumerate() {
        for (j, &uj) in u.iter().enumerate() {
            // adjacent endpoints carry the integrable |v-u|^(τ-1) singularity
            let _ = (i, j);
            log_k += (tau - 1.0) * (vi - uj).abs().ln();
        }
    }
    Ok(log_k.exp())
}

/// ∫ L(u, dv) over the interlacing cell, by per-cell Gauss–Jacobi with
/// α = β = τ-1 absorbing the adjacent endpoint singularities (plain grids
/// fail for τ < 1). Implemented for N = 2, 3 (one and two inner cells).
pub fn da_kernel_total_integral(u: &[f64], tau: f64, nodes: usize) -> Result<f64> {
    let n = u.len();
    let rule = gauss_jacobi(nodes, tau - 1.0, tau - 1.0)?;
    let gamma_pref = (lgamma_real(n as f64 * tau) - n as f64 * lgamma_real(tau)).exp();
    let mut pref = gamma_pref;
    for i in 0..n {
        for j in (i + 1)..n {
            pref *= (u[i] - u[j]).powf(1.0 - 2.0 * tau);
        }
    }
    // smooth part: everything except the adjacent-cell singular factors
    let smooth = |v: &[f64]| -> f64 {
        let mut s = 1.0;
        for i in 0..v.len() {
            for j in (i + 1)..v.len() {
                s *= v[i] - v[j];
            }
        }
        for (i, &vi) in v.iter().enumerate() {
            for (j, &uj) in u.iter().enumerate() {
                if j != i && j != i + 1 {
                    s *= (vi - uj).abs().powf(tau - 1.0);
                }
            }
        }
        s
    };
    match n {
        2 => Ok(pref * rule.integrate_weighted(u[1], u[0], |v| smooth(&[v]))),
        3 => {
            let mut total = 0.0;
            for (i, &x1) in rule.nodes.iter().enumerate() {
                // map cell 1: (u2, u1)
                let a1 = 0.5 * (u[0] - u[1]);
                let v1 = 0.5 * (u[0] + u[1]) + a1 * x1;
                let w1 = rule.weights[i] * a1.powf(2.0 * tau - 1.0);
                for (j, &x2) in rule.nodes.iter().enumerate() {
                    let a2 = 0.5 * (u[1] - u[2]);
                    let v2 = 0.5 * (u[1] + u[2]) + a2 * x2;
                    let w2 = rule.weights[j] * a2.powf(2.0 * tau - 1.0);
                    total += w1 * w2 * smooth(&[v1, v2]);
                }
            }
            Ok(pref * total)
        }
        _ => Err(QtError::Config("kernel integral implemented for N = 2, 3".into())),
    }
}

/// Residual of the continuous coherency ∫ P_2 L(·,v) - P_1(v) at τ = 1,
/// where the kernel is uniform on (u_2, u_1): max over the v-grid.
pub fn verify_continuous_coherency_tau1(s: Complex64, grid: &[f64], nodes: usize) -> Result<f64> {
    let p = SParams::new(s, 1.0)?;
    let z2 = s_measure_normalization(&p, 2, nodes)?;
    let z1 = s_measure_normalization(&p, 1, nodes)?;
    let rule = gauss_legendre(nodes)?;
    let half_pi = std::f64::consts::FRAC_PI_2;
    let mut max_resid = 0.0f64;
    for &v in grid {
        // lhs(v) = (1/Z2) ∫_{u1 > v} ∫_{u2 < v} dens(u1,u2)/(u1-u2)
        let mut lhs = 0.0;
        let th_v = v.atan();
        for (i, &x1) in rule.nodes.iter().enumerate() {
            let th1 = th_v + (half_pi - th_v) * 0.5 * (x1 + 1.0);
            let u1 = th1.tan();
            let w1 = rule.weights[i] * (half_pi - th_v) * 0.5 / th1.cos().powi(2);
            for (j, &x2) in rule.nodes.iter().enumerate() {
                let th2 = -half_pi + (th_v + half_pi) * 0.5 * (x2 + 1.0);
                let u2 = th2.tan();
                let w2 = rule.weights[j] * (th_v + half_pi) * 0.5 / th2.cos().powi(2);
                if u1 <= v || u2 >= v {
                    continue;
                }
                lhs += w1 * w2 * s_measure_density(&[u1, u2], &p).unwrap_or(0.0) / (u1 - u2);
            }
        }
        lhs /= z2;
        let rhs = s_measure_density(&[v], &p)? / z1;
        max_resid = max_resid.max((lhs - rhs).abs());
    }
    Ok(max_resid)
}

// --- q → 1 degenerations -----------------------------------------------------------

/// (v q^A; q)_∞ / (v q^B; q)_∞, which tends to (1-v)^(B-A) as q → 1.
pub fn scalar_limit_ratio(v: f64, a_exp: f64, b_exp: f64, q: f64) -> f64 {
    let num = crate::qspecial::f64path::qpochhammer_inf_f64(v * q.powf(a_exp), q);
    let den = crate::qspecial::f64path::qpochhammer_inf_f64(v * q.powf(b_exp), q);
    num / den
}

#[derive(Debug, Clone, Serialize)]
pub struct LimitReport {
    pub qs: Vec<f64>,
    pub errors: Vec<f64>,
}

/// The lattice measure 𝕄_N with the substitution t = q^τ, α = q^(w+1),
/// β = q^(w'+1), γ = q^(-z), δ = q^(-z'), on ζ± = ±1.
pub fn measure_spec_from_zw(q: f64, p: &ZwParams, n: usize, tol: Tolerance) -> Result<MeasureSpec> {
    let params = ParameterSet::new(q, p.tau, 1.0, -1.0)?;
    let lnq = q.ln();
    let alpha = ((p.w + 1.0) * lnq).exp();
    let gamma = (-p.z * lnq).exp();
    let quad = QuadF {
        alpha,
        beta: alpha.conj(),
        gamma,
        delta: gamma.conj(),
        series: Series::Principal,
    };
    Ok(MeasureSpec::from_f64(params, quad, n, tol))
}

/// Prop 7.A check: |𝕄_N(q^{ν_N}, q^{ν_{N-1}+τ}, …) - P_N(ν)| along a q-sequence.
pub fn check_degeneration_discrete(
    q_seq: &[f64],
    p: &ZwParams,
    nu: &[i64],
    n: usize,
    window: i64,
) -> Result<LimitReport> {
    check_signature(nu)?;
    // reference probability: P_N(ν) over the signature window (q-free)
    let sigs = signatures_in_window(n, window);
    let weights: Vec<f64> = maybe_par_map(&sigs, |s| discrete_beta_weight(s, p, n))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let z: f64 = weights.iter().sum();
    let target = discrete_beta_weight(nu, p, n)? / z;

    // configuration with plus exponents (ν_N, …, ν_1): slot i at ν_{N-i+1}
    let mut plus: Vec<i64> = nu.to_vec();
    plus.reverse();
    let config = Configuration::new(plus, vec![])?;

    let mut errors = Vec::new();
    for &q in q_seq {
        let spec = measure_spec_from_zw(q, p, n, Tolerance::new(1e-8, 1e-8)?)?;
        let zq = partition_function(&spec)?.value;
        let m = unnormalized_weight(&config, &spec)? / zq;
        errors.push((m - target).abs());
    }
    Ok(LimitReport { qs: q_seq.to_vec(), errors })
}

/// Mass of 𝕄_N carried by configurations inside (lo, hi); tends to 1 as
/// q → 1 for (1-ε, 1+ε).
pub fn discrete_mass_concentration(
    q: f64,
    p: &ZwParams,
    n: usize,
    lo: f64,
    hi: f64,
) -> Result<f64> {
    let spec = measure_spec_from_zw(q, p, n, Tolerance::new(1e-8, 1e-8)?)?;
    let e = enumerate_configurations(&spec)?;
    let inside: f64 = e
        .configs
        .iter()
        .filter(|(c, _)| c.within_interval(&spec.params, lo, hi))
        .map(|(_, w)| w)
        .sum();
    Ok(inside / e.partition_function)
}

/// Prop 7.B check: sup-distance between the 𝕄_N-law CDF of the largest
/// particle and the s-measure CDF (N = 1), along a q-sequence. The
/// substitution is α = -i q^s, β = i q^(s̄), γ = -i, δ = i.
pub fn check_degeneration_continuous(
    q_seq: &[f64],
    p: &SParams,
    grid: &[f64],
    nodes: usize,
) -> Result<LimitReport> {
    let z1 = s_measure_normalization(p, 1, nodes)?;
    let rule = gauss_legendre(nodes)?;
    let half_pi = std::f64::consts::FRAC_PI_2;
    let cdf_s = |u: f64| -> f64 {
        let th_u = u.atan();
        rule.integrate(-half_pi, th_u, |th| {
            s_measure_density(&[th.tan()], p).unwrap_or(0.0) / th.cos().powi(2)
        }) / z1
    };

    let mut errors = Vec::new();
    for &q in q_seq {
        let lnq = q.ln();
        let alpha = Complex64::new(0.0, -1.0) * (p.s * lnq).exp();
        let quad = QuadF {
            alpha,
            beta: alpha.conj(),
            gamma: Complex64::new(0.0, -1.0),
            delta: Complex64::new(0.0, 1.0),
            series: Series::Principal,
        };
        let params = ParameterSet::new(q, p.tau, 1.0, -1.0)?;
        let spec = MeasureSpec::from_f64(params, quad, 1, Tolerance::new(1e-8, 1e-8)?);
        let e = enumerate_configurations(&spec)?;
        let z = e.partition_function;
        let mut pts: Vec<(f64, f64)> = e
            .configs
            .iter()
            .map(|(c, w)| (c.values(&spec.params)[0], w / z))
            .collect();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        let cdf_m = |u: f64| -> f64 {
            pts.iter().take_while(|(x, _)| *x <= u).map(|(_, w)| w).sum()
        };
        let sup = grid
            .iter()
            .map(|&u| (cdf_m(u) - cdf_s(u)).abs())
            .fold(0.0f64, f64::max);
        errors.push(sup);
    }
    Ok(LimitReport { qs: q_seq.to_vec(), errors })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zw() -> ZwParams {
        ZwParams::new(1.0, Complex64::new(-0.5, 1.0), Complex64::new(3.0, 0.0)).unwrap()
    }

    #[test]
    fn weight_basics() {
        let p = zw();
        // N=1: |Γ(-z+n)|²/|Γ(w+1+n)|², real positive
        let w = discrete_beta_weight(&[2], &p, 1).unwrap();
        assert!(w > 0.0);
        let g = crate::gamma::gamma_complex(Complex64::new(2.0, 0.0) - p.z);
        let h = crate::gamma::gamma_complex(p.w + 1.0 + 2.0);
        let direct = (g * g.conj() / (h * h.conj())).re;
        assert!((w - direct).abs() < 1e-12 * direct);
        assert!(discrete_beta_weight(&[0, 1], &p, 2).is_err());
    }

    #[test]
    fn interaction_tau1_is_squared_differences() {
        let p = ZwParams::new(1.0, Complex64::new(0.5, 1.0), Complex64::new(2.0, 0.5)).unwrap();
        let nu = vec![3i64, 1, 0];
        let w = discrete_beta_weight(&nu, &p, 3).unwrap();
        // strip the one-particle factors to isolate the interaction
        let mut one = 0.0;
        for (i, &v) in nu.iter().enumerate() {
            let ni = v as f64 + (3.0 - (i + 1) as f64) * 1.0;
            one += 2.0 * lgamma_complex(Complex64::new(-2.0 + ni, 0.0) - p.z).re;
            one -= 2.0 * lgamma_complex(p.w + 1.0 + ni).re;
        }
        let inter = w / one.exp();
        let ns: Vec<f64> = nu.iter().enumerate().map(|(i, &v)| v as f64 + (2 - i) as f64).collect();
        let mut expect = 1.0;
        for i in 0..3 {
            for j in (i + 1)..3 {
                expect *= (ns[i] - ns[j]).powi(2);
            }
        }
        assert!((inter - expect).abs() < 1e-10 * expect, "{inter} vs {expect}");
    }

    #[test]
    fn link_tau1_example() {
        // N=2, ν=(1,0): both interlacing μ get 1/2
        for mu in [0i64, 1] {
            let l = discrete_link(&[1, 0], &[mu], 1.0).unwrap();
            assert!((l - 0.5).abs() < 1e-13, "mu={mu}: {l}");
            let c = discrete_link_tau1(&[1, 0], &[mu]).unwrap();
            assert!((l - c).abs() < 1e-13);
        }
        // non-interlacing
        assert_eq!(discrete_link(&[1, 0], &[5], 1.0).unwrap(), 0.0);
    }

    #[test]
    fn link_rows_sum_to_one() {
        let cases: Vec<(Vec<i64>, f64)> = vec![
            (vec![3, 1, 0], 0.5),
            (vec![3, 1, 0], 1.5),
            (vec![5, 2, -1], 1.0),
            (vec![5, 2, -1], 2.0),
            (vec![2, 2, 1], 0.5),
            (vec![4, 0], 1.5),
            (vec![6, 3, 2, -2], 0.5),
            (vec![6, 3, 2, -2], 1.5),
        ];
        for (nu, tau) in cases {
            let s: f64 = interlacing_signatures(&nu)
                .iter()
                .map(|mu| discrete_link(&nu, mu, tau).unwrap())
                .sum();
            assert!((s - 1.0).abs() < 1e-12, "nu={nu:?} tau={tau}: {s}");
        }
    }

    #[test]
    fn link_tau1_matches_general_formula() {
        for nu in [vec![4i64, 1, 0], vec![3, 3, -1], vec![5, 2]] {
            for mu in interlacing_signatures(&nu) {
                let a = discrete_link(&nu, &mu, 1.0).unwrap();
                let b = discrete_link_tau1(&nu, &mu).unwrap();
                assert!((a - b).abs() < 1e-12 * b.max(1e-3), "nu={nu:?} mu={mu:?}");
            }
        }
    }

    #[test]
    fn s_measure_density_properties() {
        let p = SParams::new(Complex64::new(1.0, 0.0), 0.7).unwrap();
        // N=1, real s: symmetric under u -> -u, equals (1+u²)^(-s)
        for u in [0.3, 1.7] {
            let a = s_measure_density(&[u], &p).unwrap();
            let b = s_measure_density(&[-u], &p).unwrap();
            assert!((a - b).abs() < 1e-14);
            assert!((a - (1.0 + u * u).powf(-1.0)).abs() < 1e-14);
        }
        // complex s still gives a real positive density
        let pc = SParams::new(Complex64::new(0.8, 0.6), 1.3).unwrap();
        let d = s_measure_density(&[0.9, -0.4], &pc).unwrap();
        assert!(d > 0.0);
        assert!(s_measure_density(&[0.1, 0.4], &pc).is_err());
    }

    #[test]
    fn s_measure_normalization_stable_under_refinement() {
        let p = SParams::new(Complex64::new(1.0, 0.3), 1.0).unwrap();
        let a = s_measure_normalization(&p, 1, 120).unwrap();
        let b = s_measure_normalization(&p, 1, 240).unwrap();
        assert!((a - b).abs() < 1e-8 * b.abs());
    }

    #[test]
    fn da_kernel_tau1_is_uniform() {
        let u = [1.3, -0.4];
        let k = dixon_anderson_kernel(&u, &[0.2], 1.0).unwrap();
        assert!((k - 1.0 / (u[0] - u[1])).abs() < 1e-13);
        assert_eq!(dixon_anderson_kernel(&u, &[2.0], 1.0).unwrap(), 0.0);
    }

    #[test]
    fn da_kernel_integrates_to_one() {
        for tau in [0.5, 1.0, 2.0] {
            let u2 = [1.1, -0.7];
            let v = da_kernel_total_integral(&u2, tau, 48).unwrap();
            assert!((v - 1.0).abs() < 1e-6, "N=2 tau={tau}: {v}");
            let u3 = [2.0, 0.3, -1.4];
            let v3 = da_kernel_total_integral(&u3, tau, 48).unwrap();
            assert!((v3 - 1.0).abs() < 1e-6, "N=3 tau={tau}: {v3}");
        }
    }

    #[test]
    fn scalar_limit_example() {
        // (v q^2; q)_∞/(v; q)_∞ -> (1-v)^(-2) = 9/4 at v = 1/3
        let target = 2.25;
        let mut prev = f64::INFINITY;
        for q in [0.9, 0.99, 0.999] {
            let r = scalar_limit_ratio(1.0 / 3.0, 2.0, 0.0, q);
            let err = (r - target).abs();
            assert!(err < prev / 4.9, "q={q}: err {err} vs prev {prev}");
            prev = err;
        }
    }
}
