//! The two-sided q-lattice, configuration spaces Ω_N, the interaction
//! V_{q,t}, hypergeometric weights, the measures M_N / 𝕄_N, normalization
//! by truncated summation, orthogonality verification, exact sampling, and
//! a large-N convergence probe.
//!
//! Configurations are encoded structurally: per side a weakly increasing
//! list of free integer exponents n_1 ≤ n_2 ≤ …, the i-th particle of the
//! side sitting at ζ_± t^(i-1) q^(n_i). The τ-gap constraint (consecutive
//! real exponents differ by at least τ) is then automatic, and each
//! particle lives on its own shifted copy ζ_± t^(i-1) q^ℤ of the lattice.
//!
//! The measure layer runs at double precision. Single-particle weights and
//! pair-interaction factors are precomputed along exponent ladders (one
//! q-Pochhammer evaluation anchors a whole table; each further entry is one
//! multiply), which keeps q → 1 windows with thousands of lattice sites
//! affordable. Lattice sums are stratified by |X⁺| = k and pruned by
//! per-slot envelope bounds patterned on the Lemma-style estimates
//! (single-particle decay on both flanks, V bounded by a constant times
//! ∏ max(1,|x|)^(2τ(N-1))); the pruned mass is accumulated and reported
//! against the tail budget.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand_chacha::rand_core::{Rng as _, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

use crate::bigqjacobi::{big_q_jacobi, Quadruple, Series};
use crate::error::{QtError, Result};
use crate::parallel::maybe_par_map;
use crate::partitions::Partition;
use crate::qspecial::f64path::{poch_ratio_f64, psi_tau_f64};
use crate::scalar::Tolerance;
use crate::sympoly::{distinct_permutations, SymmetricPolynomial};

// --- parameters and configurations --------------------------------------------

/// The lattice-level parameters (q, t = q^τ, τ, ζ±).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ParameterSet {
    pub q: f64,
    pub tau: f64,
    pub zeta_plus: f64,
    pub zeta_minus: f64,
}

impl ParameterSet {
    pub fn new(q: f64, tau: f64, zeta_plus: f64, zeta_minus: f64) -> Result<Self> {
        if !(0.0 < q && q < 1.0) || tau <= 0.0 || zeta_plus <= 0.0 || zeta_minus >= 0.0 {
            return Err(QtError::Config(
                "need 0 < q < 1, tau > 0, zeta_plus > 0, zeta_minus < 0".into(),
            ));
        }
        Ok(ParameterSet { q, tau, zeta_plus, zeta_minus })
    }

    pub fn t(&self) -> f64 {
        self.q.powf(self.tau)
    }

    fn zeta(&self, side: Side) -> f64 {
        match side {
            Side::Plus => self.zeta_plus,
            Side::Minus => self.zeta_minus,
        }
    }

    /// Value of the slot-`k` particle (1-based) of the given side at free
    /// exponent n.
    pub fn value(&self, side: Side, slot: usize, n: i64) -> f64 {
        self.zeta(side) * (self.q.ln() * (n as f64 + (slot as f64 - 1.0) * self.tau)).exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Side {
    Plus,
    Minus,
}

/// The two-sided q-lattice ζ±q^ℤ with a truncation window on the exponents.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Lattice {
    pub q: f64,
    pub zeta_plus: f64,
    pub zeta_minus: f64,
    pub n_min: i64,
    pub n_max: i64,
}

impl Lattice {
    pub fn point(&self, side: Side, n: i64) -> f64 {
        let z = match side {
            Side::Plus => self.zeta_plus,
            Side::Minus => self.zeta_minus,
        };
        z * (self.q.ln() * n as f64).exp()
    }
}

/// A finite point configuration X = X⁺ ∪ X⁻, encoded by the free exponents
/// of its particles (weakly increasing per side). Serializes as
/// `{"plus":[…],"minus":[…]}`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Configuration {
    pub plus: Vec<i64>,
    pub minus: Vec<i64>,
}

impl Configuration {
    pub fn new(plus: Vec<i64>, minus: Vec<i64>) -> Result<Self> {
        let ok = |v: &[i64]| v.windows(2).all(|w| w[0] <= w[1]);
        if !ok(&plus) || !ok(&minus) {
            return Err(QtError::Config(
                "configuration exponents must be weakly increasing per side".into(),
            ));
        }
        Ok(Configuration { plus, minus })
    }

    pub fn n_particles(&self) -> usize {
        self.plus.len() + self.minus.len()
    }

    /// Particle values in strictly decreasing order.
    pub fn values(&self, params: &ParameterSet) -> Vec<f64> {
        let mut v: Vec<f64> = self
            .plus
            .iter()
            .enumerate()
            .map(|(i, &n)| params.value(Side::Plus, i + 1, n))
            .collect();
        // minus slot 1 is the most negative; deeper slots approach 0⁻
        for (j, &m) in self.minus.iter().enumerate().rev() {
            v.push(params.value(Side::Minus, j + 1, m));
        }
        v
    }

    /// True when every particle lies inside [lo, hi].
    pub fn within_interval(&self, params: &ParameterSet, lo: f64, hi: f64) -> bool {
        self.values(params).iter().all(|&x| lo <= x && x <= hi)
    }
}

/// Double-precision image of a [`Quadruple`].
#[derive(Debug, Clone, Copy)]
pub struct QuadF {
    pub alpha: Complex64,
    pub beta: Complex64,
    pub gamma: Complex64,
    pub delta: Complex64,
    pub series: Series,
}

impl From<&Quadruple> for QuadF {
    fn from(q: &Quadruple) -> Self {
        QuadF {
            alpha: q.alpha.to_c64(),
            beta: q.beta.to_c64(),
            gamma: q.gamma.to_c64(),
            delta: q.delta.to_c64(),
            series: q.series,
        }
    }
}

/// Everything needed to define one measure 𝕄_N: lattice parameters, the
/// quadruple (α,β,γ,δ) whose (γ,δ) part is rescaled by t^(1-N), the particle
/// count, and tolerances. `window_margin` widens the automatic truncation
/// window (in lattice steps) beyond what the tail budget asks for.
#[derive(Debug, Clone)]
pub struct MeasureSpec {
    pub params: ParameterSet,
    pub quad: QuadF,
    pub n: usize,
    pub tol: Tolerance,
    pub window_margin: i64,
}

impl MeasureSpec {
    pub fn new(params: ParameterSet, quad: &Quadruple, n: usize, tol: Tolerance) -> Result<Self> {
        quad.validate()?;
        Ok(MeasureSpec { params, quad: QuadF::from(quad), n, tol, window_margin: 0 })
    }

    pub fn from_f64(params: ParameterSet, quad: QuadF, n: usize, tol: Tolerance) -> Self {
        MeasureSpec { params, quad, n, tol, window_margin: 0 }
    }

    pub fn with_n(&self, n: usize) -> Self {
        let mut s = self.clone();
        s.n = n;
        s
    }

    /// The measure-level parameters (a,b,c,d) = (α, β, γ t^(1-N), δ t^(1-N)).
    pub fn abcd(&self) -> (Complex64, Complex64, Complex64, Complex64) {
        let tpow = self.params.t().powi(1 - self.n as i32);
        (self.quad.alpha, self.quad.beta, self.quad.gamma * tpow, self.quad.delta * tpow)
    }

    /// Principal-series summability at this N: |αβ| < |γδ| q^(2τ(N-1)+1)
    /// after the t^(1-N) substitution — guaranteed for every N by the
    /// fixed-quadruple constraint αβ < γδ q.
    pub fn summability_holds(&self) -> bool {
        match self.quad.series {
            Series::Degenerate => true,
            _ => {
                let ab = (self.quad.alpha * self.quad.beta).re;
                let gd = (self.quad.gamma * self.quad.delta).re;
                ab < gd * self.params.q
            }
        }
    }
}

// --- pointwise weights ----------------------------------------------------------

/// W(x;q;a,b,c,d) = (1-q)|x| (ax;q)_∞ (bx;q)_∞ / [(cx;q)_∞ (dx;q)_∞].
///
/// The four infinite products are fused factor-by-factor so the ratio never
/// overflows even far from zero. Real for conjugate (c,d) and real or
/// conjugate (a,b); exactly zero at the degenerate-series kill points (a
/// numerator factor crosses 0 on the lattice, detected within float
/// resolution).
pub fn weight_w(x: f64, q: f64, a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<f64> {
    let mut g = Complex64::new(1.0, 0.0);
    let (mut ua, mut ub, mut uc, mut ud) = (a * x, b * x, c * x, d * x);
    let one = Complex64::new(1.0, 0.0);
    loop {
        if ua.norm() < 1e-18 && ub.norm() < 1e-18 && uc.norm() < 1e-18 && ud.norm() < 1e-18 {
            break;
        }
        let (fa, fb) = (one - ua, one - ub);
        if fa.norm() < 1e-12 || fb.norm() < 1e-12 {
            return Ok(0.0); // kill point
        }
        let den = (one - uc) * (one - ud);
        if den.norm() < 1e-290 {
            return Err(QtError::ParameterDegeneracy(format!(
                "weight denominator vanished at x = {x}"
            )));
        }
        g *= fa * fb / den;
        ua *= q;
        ub *= q;
        uc *= q;
        ud *= q;
    }
    let w = (1.0 - q) * x.abs() * g;
    debug_assert!(
        w.im.abs() <= 1e-9 * (1.0 + w.re.abs()),
        "weight not real at x = {x}: {w}"
    );
    Ok(w.re)
}

/// The interaction V_{q,t}(X): Vandermonde times the one-sided and
/// cross-side Pochhammer-ratio factors. Strictly positive on valid
/// configurations.
pub fn v_qt(config: &Configuration, params: &ParameterSet) -> f64 {
    let q = params.q;
    let t = params.t();
    let ratio = |u: f64| poch_ratio_f64(q / t, t, u, q);
    let vals = config.values(params);
    let mut v = 1.0;
    for (i, &x) in vals.iter().enumerate() {
        for &y in &vals[i + 1..] {
            v *= x - y;
        }
    }
    for &x in &vals {
        for &y in &vals {
            if y < x {
                if x > 0.0 {
                    v *= x.powf(2.0 * params.tau - 1.0) * ratio(y / x);
                } else {
                    v *= y.abs().powf(2.0 * params.tau - 1.0) * ratio(x / y);
                }
            }
        }
    }
    v
}

/// |prod_{i≠j} prod_{r=0}^{τ-1} (x_i - x_j q^r)|, the integer-τ interaction.
/// Equals q^(τ(τ-1)N(N-1)/4) · V_{q,t}: the two differ by that
/// configuration-independent constant, which cancels in normalized measures.
pub fn v_qt_integer_tau(config: &Configuration, params: &ParameterSet) -> Result<f64> {
    let tau = params.tau;
    if tau.fract() != 0.0 || tau < 1.0 {
        return Err(QtError::Domain("integer-tau interaction needs tau in Z>=1".into()));
    }
    let vals = config.values(params);
    let mut v = 1.0;
    for (i, &x) in vals.iter().enumerate() {
        for (j, &y) in vals.iter().enumerate() {
            if i != j {
                for r in 0..tau as i64 {
                    v *= x - y * params.q.powi(r as i32);
                }
            }
        }
    }
    Ok(v.abs())
}

/// C_N(k; ζ+, ζ-) = prod_{1≤i<j≤N, i≤k} ψ_τ(ζ- ζ+^{-1} t^(N-i-j+1)).
/// Identically 1 for integer τ.
pub fn c_constant(n: usize, k: usize, params: &ParameterSet) -> Result<f64> {
    if k > n {
        return Err(QtError::Index(format!("k = {k} exceeds N = {n}")));
    }
    let t = params.t();
    let base = params.zeta_minus / params.zeta_plus;
    let mut v = 1.0;
    for i in 1..=k {
        for j in (i + 1)..=n {
            let u = base * t.powi((n as i64 - i as i64 - j as i64 + 1) as i32);
            v *= psi_tau_f64(u, params.q, params.tau);
        }
    }
    Ok(v)
}

/// Unnormalized weight C_N(|X⁺|) V_{q,t}(X) ∏ W(x) with the t^(1-N)
/// substitution applied to (γ,δ). Direct evaluation, no tables; the
/// enumeration layer has a faster incremental equivalent and is
/// cross-checked against this in the tests.
pub fn unnormalized_weight(config: &Configuration, spec: &MeasureSpec) -> Result<f64> {
    if config.n_particles() != spec.n {
        return Err(QtError::Index(format!(
            "configuration has {} particles, spec wants {}",
            config.n_particles(),
            spec.n
        )));
    }
    let (a, b, c, d) = spec.abcd();
    let mut w = c_constant(spec.n, config.plus.len(), &spec.params)?;
    for &x in &config.values(&spec.params) {
        w *= weight_w(x, spec.params.q, a, b, c, d)?;
        if w == 0.0 {
            return Ok(0.0);
        }
    }
    Ok(w * v_qt(config, &spec.params))
}

// --- slot and gap tables ----------------------------------------------------------

struct SlotTable {
    side: Side,
    slot: usize,
    lo: i64,
    value: Vec<f64>,
    weight: Vec<f64>,
    /// weight times max(1,|x|)^(2τ(N-1)), the per-particle envelope that
    /// absorbs the interaction growth
    envelope: Vec<f64>,
    env_suffix_sum: Vec<f64>,
}

impl SlotTable {
    fn hi(&self) -> i64 {
        self.lo + self.weight.len() as i64 - 1
    }
    fn idx(&self, n: i64) -> usize {
        (n - self.lo) as usize
    }
    fn env_sum_from(&self, n: i64) -> f64 {
        if n <= self.lo {
            return self.env_suffix_sum[0];
        }
        let i = self.idx(n);
        if i >= self.env_suffix_sum.len() {
            0.0
        } else {
            self.env_suffix_sum[i]
        }
    }
}

/// R(u) = (q t^{-1} u; q)_∞ / (t u; q)_∞ tabulated over u = base·q^(Δn+Δk·τ).
struct GapTable {
    dk_off: i64,
    dn_off: i64,
    table: Vec<Vec<f64>>,
    /// max over the table of R(u)/max(1,|u|)^(2τ-1), for the pair bound
    k_max: f64,
}

impl GapTable {
    fn get(&self, dk: i64, dn: i64) -> f64 {
        self.table[(dk + self.dk_off) as usize][(dn + self.dn_off) as usize]
    }
}

fn build_gap_table(base: f64, q: f64, tau: f64, dk_lo: i64, dk_hi: i64, dn_lo: i64, dn_hi: i64) -> GapTable {
    let t = q.powf(tau);
    let mut table = Vec::new();
    let mut k_max = 1.0f64;
    for dk in dk_lo..=dk_hi {
        let count = (dn_hi - dn_lo + 1) as usize;
        let mut row = Vec::with_capacity(count);
        // anchor at the leftmost Δn, then ladder R(uq) = R(u)(1-tu)/(1-qu/t)
        let u0 = base * (q.ln() * (dn_lo as f64 + dk as f64 * tau)).exp();
        let mut r = poch_ratio_f64(q / t, t, u0, q);
        let mut u = u0;
        for _ in 0..count {
            row.push(r);
            k_max = k_max.max(r.abs() / u.abs().max(1.0).powf(2.0 * tau - 1.0));
            r *= (1.0 - t * u) / (1.0 - q / t * u);
            u *= q;
        }
        table.push(row);
    }
    GapTable { dk_off: -dk_lo, dn_off: -dn_lo, table, k_max }
}

/// Structural support edge for the degenerate series: the smallest exponent
/// n with ζ q^n inside the support; weights at smaller n vanish at kill
/// points. `aligned` is a = α (plus side) or b = β (minus side).
fn degenerate_support_edge(zeta: f64, q: f64, aligned: f64) -> Result<i64> {
    // a = ζ^{-1} q^A  ->  support is n >= 1 - A
    let a_exp = (aligned * zeta).abs().ln() / q.ln();
    let rounded = a_exp.round();
    if (a_exp - rounded).abs() > 1e-6 {
        return Err(QtError::Config(format!(
            "degenerate parameter is not on the dual lattice (exponent {a_exp})"
        )));
    }
    Ok(1 - rounded as i64)
}

fn build_slot_tables(spec: &MeasureSpec) -> Result<Vec<Vec<SlotTable>>> {
    let p = &spec.params;
    let (a, b, c, d) = spec.abcd();
    let q = p.q;
    let gamma_e = 2.0 * p.tau * (spec.n as f64 - 1.0);
    let budget = spec.tol.tail_bound;

    let mut out = Vec::new();
    for side in [Side::Plus, Side::Minus] {
        let lo = match spec.quad.series {
            Series::Degenerate => {
                let aligned = if side == Side::Plus { a.re } else { b.re };
                degenerate_support_edge(p.zeta(side), q, aligned)?
            }
            _ => {
                // extend left until the envelope has decayed below the
                // budget; Lemma-4.A-style decay makes the envelope
                // geometric with ratio |ab/(cd q)| per step, once |x| is
                // large
                let env = |n: i64| -> Result<f64> {
                    let x = p.value(side, 1, n);
                    Ok(weight_w(x, q, a, b, c, d)?.abs() * x.abs().max(1.0).powf(gamma_e))
                };
                let mut lo = 0i64;
                let mut best = env(lo)?;
                let mut prev = best;
                loop {
                    lo -= 8;
                    let cur = env(lo)?;
                    best = best.max(cur);
                    let ratio = if prev > 0.0 { (cur / prev).min(0.999) } else { 0.5 };
                    let tail = cur / (1.0 - ratio.max(0.0));
                    if cur <= 0.0 || tail < budget * best * 1e-3 {
                        break;
                    }
                    prev = cur;
                    if lo < -4_000_000 {
                        return Err(QtError::Truncation { requested: budget, achieved: tail / best });
                    }
                }
                lo
            }
        };
        let mut slots = Vec::new();
        for slot in 1..=spec.n {
            slots.push(build_one_slot(spec, side, slot, lo, gamma_e)?);
        }
        out.push(slots);
    }
    Ok(out)
}

fn build_one_slot(spec: &MeasureSpec, side: Side, slot: usize, lo: i64, gamma_e: f64) -> Result<SlotTable> {
    let p = &spec.params;
    let (a, b, c, d) = spec.abcd();
    let q = p.q;
    let budget = spec.tol.tail_bound;

    let mut value = Vec::new();
    let mut weight = Vec::new();
    let mut envelope = Vec::new();

    let x0 = p.value(side, slot, lo);
    let mut x = x0;
    let mut n = lo;
    let mut env_max = 0.0f64;
    // anchor the fused Pochhammer ratio at n = lo, then ladder:
    // G(xq) = G(x) (1-cx)(1-dx) / [(1-ax)(1-bx)]
    let mut g = {
        let w0 = weight_w(x0, q, a, b, c, d)?;
        Complex64::new(w0 / ((1.0 - q) * x0.abs()), 0.0)
    };
    loop {
        let w = ((1.0 - q) * x.abs() * g.re).max(0.0);
        let env = w * x.abs().max(1.0).powf(gamma_e);
        value.push(x);
        weight.push(w);
        envelope.push(env);
        env_max = env_max.max(env);
        let tail = env * q / (1.0 - q);
        if n - lo > 16 && tail < budget * env_max * 1e-3 {
            break;
        }
        if n - lo > 4_000_000 {
            return Err(QtError::Truncation { requested: budget, achieved: tail / env_max });
        }
        let num = (1.0 - c * x) * (1.0 - d * x);
        let den = (1.0 - a * x) * (1.0 - b * x);
        if den.norm() < 1e-290 {
            // stepped onto a kill point from inside the support: cannot
            // happen for valid degenerate edges, treat as hard zero onward
            g = Complex64::new(0.0, 0.0);
        } else {
            g *= num / den;
        }
        x *= q;
        n += 1;
    }
    for _ in 0..spec.window_margin {
        let num = (1.0 - c * x) * (1.0 - d * x);
        let den = (1.0 - a * x) * (1.0 - b * x);
        g *= num / den;
        x *= q;
        let w = ((1.0 - q) * x.abs() * g.re).max(0.0);
        value.push(x);
        weight.push(w);
        envelope.push(w * x.abs().max(1.0).powf(gamma_e));
    }
    let mut env_suffix_sum = vec![0.0; envelope.len()];
    let mut acc = 0.0;
    for i in (0..envelope.len()).rev() {
        acc += envelope[i];
        env_suffix_sum[i] = acc;
    }
    Ok(SlotTable { side, slot, lo, value, weight, envelope, env_suffix_sum })
}

// --- enumeration ---------------------------------------------------------------

/// Result of a truncated enumeration of Ω_N.
#[derive(Debug, Clone)]
pub struct EnumerationResult {
    pub configs: Vec<(Configuration, f64)>,
    /// Σ of unnormalized weights, summed in a fixed order.
    pub partition_function: f64,
    /// Upper bound on the unnormalized mass discarded by pruning.
    pub tail_bound: f64,
    /// The realized exponent window (union over sides and slots).
    pub lattice: Lattice,
}

/// Tail/normalization report for the partition function.
#[derive(Debug, Clone, Serialize)]
pub struct TailReport {
    pub value: f64,
    pub tail_abs: f64,
    pub tail_rel: f64,
    pub n_configs: usize,
    pub n_min: i64,
    pub n_max: i64,
}

struct Enumerator<'a> {
    tau: f64,
    slots: Vec<&'a SlotTable>,
    same_gap: &'a GapTable,
    cross_gap: &'a GapTable,
    pair_bound: f64,
    c_n: f64,
    prune_rel: f64,
    z: f64,
    tail: f64,
}

impl<'a> Enumerator<'a> {
    /// Product of pair factors between the new particle and all placed ones.
    fn pair_factor(&self, placed: &[(Side, usize, i64, f64)], new: (Side, usize, i64, f64)) -> f64 {
        let (ns, nslot, nn, nx) = new;
        let mut f = 1.0;
        for &(os, oslot, on, ox) in placed {
            f *= match (os, ns) {
                (Side::Plus, Side::Plus) => {
                    // old is shallower: x = old > y = new > 0
                    let r = self.same_gap.get(nslot as i64 - oslot as i64, nn - on);
                    (ox - nx) * ox.powf(2.0 * self.tau - 1.0) * r
                }
                (Side::Plus, Side::Minus) => {
                    // x = old (positive) > y = new (negative)
                    let r = self.cross_gap.get(nslot as i64 - oslot as i64, nn - on);
                    (ox - nx) * ox.powf(2.0 * self.tau - 1.0) * r
                }
                (Side::Minus, Side::Minus) => {
                    // new is shallower (closer to 0⁻): x = new > y = old
                    let r = self.same_gap.get(nslot as i64 - oslot as i64, nn - on);
                    (nx - ox) * ox.abs().powf(2.0 * self.tau - 1.0) * r
                }
                (Side::Minus, Side::Plus) => unreachable!("plus slots are placed first"),
            };
        }
        f
    }

    fn dfs(
        &mut self,
        depth: usize,
        placed: &mut Vec<(Side, usize, i64, f64)>,
        w: f64,
        env: f64,
        sink: &mut dyn FnMut(&[(Side, usize, i64, f64)], f64),
    ) {
        if depth == self.slots.len() {
            let weight = self.c_n * w;
            self.z += weight;
            if weight != 0.0 {
                sink(placed, weight);
            }
            return;
        }
        let table = self.slots[depth];
        let mut n_lo = table.lo;
        if let Some(&(_, _, n, _)) = placed.iter().rev().find(|p| p.0 == table.side) {
            n_lo = n_lo.max(n);
        }
        for n in n_lo..=table.hi() {
            let i = table.idx(n);
            let wt = table.weight[i];
            if wt <= 0.0 {
                continue;
            }
            let env_here = table.envelope[i];
            // bound on the total remaining mass of the subtree rooted here
            let mut rest = 1.0;
            for d in depth + 1..self.slots.len() {
                let s = self.slots[d];
                let from = if s.side == table.side { n } else { s.lo };
                rest *= s.env_sum_from(from);
            }
            let bound = self.c_n.abs() * env * env_here * rest * self.pair_bound;
            if bound < self.prune_rel * self.z.max(1e-280) {
                self.tail += bound;
                continue;
            }
            let x = table.value[i];
            let pf = self.pair_factor(placed, (table.side, table.slot, n, x));
            placed.push((table.side, table.slot, n, x));
            self.dfs(depth + 1, placed, w * wt * pf, env * env_here, sink);
            placed.pop();
        }
    }
}

fn enumerate_with_sink(
    spec: &MeasureSpec,
    sink: &mut dyn FnMut(&[(Side, usize, i64, f64)], f64),
) -> Result<(f64, f64, Lattice)> {
    if spec.n == 0 {
        return Err(QtError::Config("N must be at least 1".into()));
    }
    if !spec.summability_holds() {
        return Err(QtError::Config(
            "principal-series summability constraint αβ < γδq fails".into(),
        ));
    }
    let tables = build_slot_tables(spec)?;
    let p = &spec.params;
    let n = spec.n;

    let lo_all = tables.iter().flat_map(|s| s.iter()).map(|t| t.lo).min().unwrap();
    let hi_all = tables.iter().flat_map(|s| s.iter()).map(|t| t.hi()).max().unwrap();
    let span = hi_all - lo_all;
    let nn = n as i64;
    let same_gap = build_gap_table(1.0, p.q, p.tau, 1, (nn - 1).max(1), 0, span.max(1));
    let cross_gap = build_gap_table(
        p.zeta_minus / p.zeta_plus,
        p.q,
        p.tau,
        1 - nn,
        nn - 1,
        -span,
        span,
    );
    // V(X) <= (2K)^(N(N-1)/2) ∏ max(1,|x|)^(2τ(N-1)) with K the tabulated
    // bound on R(u)/max(1,|u|)^(2τ-1); the envelope tables carry the
    // per-particle growth, this constant carries the rest
    let k_bound = same_gap.k_max.max(cross_gap.k_max);
    let pairs = (n * n.saturating_sub(1) / 2) as i32;
    let pair_bound = (2.0 * k_bound).powi(pairs).max(1.0);

    let mut z = 0.0;
    let mut tail = 0.0;
    // plus-heavy strata first: they carry the bulk of the mass in the
    // discrete-limit regimes, seeding the dynamic prune threshold early
    for k in (0..=n).rev() {
        let mut slots: Vec<&SlotTable> = Vec::new();
        for slot in 1..=k {
            slots.push(&tables[0][slot - 1]);
        }
        for slot in 1..=(n - k) {
            slots.push(&tables[1][slot - 1]);
        }
        let mut en = Enumerator {
            tau: p.tau,
            slots,
            same_gap: &same_gap,
            cross_gap: &cross_gap,
            pair_bound,
            c_n: c_constant(n, k, p)?,
            prune_rel: spec.tol.tail_bound * 1e-4,
            z,
            tail,
        };
        en.dfs(0, &mut Vec::new(), 1.0, 1.0, sink);
        z = en.z;
        tail = en.tail;
    }
    if z <= 0.0 {
        return Err(QtError::Truncation { requested: spec.tol.tail_bound, achieved: f64::INFINITY });
    }
    let rel = tail / z;
    if rel > spec.tol.tail_bound {
        return Err(QtError::Truncation { requested: spec.tol.tail_bound, achieved: rel });
    }
    Ok((
        z,
        tail,
        Lattice {
            q: p.q,
            zeta_plus: p.zeta_plus,
            zeta_minus: p.zeta_minus,
            n_min: lo_all,
            n_max: hi_all,
        },
    ))
}

fn placed_to_config(placed: &[(Side, usize, i64, f64)]) -> Configuration {
    let mut plus = Vec::new();
    let mut minus = Vec::new();
    for &(s, _, n, _) in placed {
        match s {
            Side::Plus => plus.push(n),
            Side::Minus => minus.push(n),
        }
    }
    Configuration { plus, minus }
}

/// Enumerate the truncated configuration space with unnormalized weights,
/// stratified by |X⁺| = k, pruning below the tail budget.
pub fn enumerate_configurations(spec: &MeasureSpec) -> Result<EnumerationResult> {
    let mut configs = Vec::new();
    let (z, tail, lattice) = enumerate_with_sink(spec, &mut |placed, w| {
        configs.push((placed_to_config(placed), w));
    })?;
    Ok(EnumerationResult { configs, partition_function: z, tail_bound: tail, lattice })
}

/// The normalization constant Z_N with its achieved tail bound.
pub fn partition_function(spec: &MeasureSpec) -> Result<TailReport> {
    let mut count = 0usize;
    let (z, tail, lattice) = enumerate_with_sink(spec, &mut |_, _| count += 1)?;
    Ok(TailReport {
        value: z,
        tail_abs: tail,
        tail_rel: tail / z,
        n_configs: count,
        n_min: lattice.n_min,
        n_max: lattice.n_max,
    })
}

/// Normalized weight M_N(X) of a single configuration.
pub fn measure_weight(config: &Configuration, spec: &MeasureSpec) -> Result<f64> {
    let z = partition_function(spec)?.value;
    Ok(unnormalized_weight(config, spec)? / z)
}

// --- compiled polynomial evaluation ----------------------------------------------

/// A symmetric polynomial compiled to f64 for fast evaluation on
/// configurations. Coefficients must be real up to float noise.
pub struct CompiledPoly {
    terms: Vec<(f64, Vec<Vec<u32>>)>,
}

impl CompiledPoly {
    pub fn compile(p: &SymmetricPolynomial) -> Result<CompiledPoly> {
        let n = p.num_vars();
        let mut terms = Vec::new();
        for (lam, c) in p.terms() {
            let cv = c.to_c64();
            if cv.im.abs() > 1e-9 * (1.0 + cv.re.abs()) {
                return Err(QtError::Domain(format!(
                    "polynomial has non-real coefficient {cv} at {lam}"
                )));
            }
            let mut padded = lam.parts().to_vec();
            padded.resize(n, 0);
            terms.push((cv.re, distinct_permutations(&padded)));
        }
        Ok(CompiledPoly { terms })
    }

    pub fn eval(&self, point: &[f64]) -> f64 {
        let mut total = 0.0;
        for (c, perms) in &self.terms {
            let mut msum = 0.0;
            for perm in perms {
                let mut term = 1.0;
                for (x, &e) in point.iter().zip(perm) {
                    if e > 0 {
                        term *= x.powi(e as i32);
                    }
                }
                msum += term;
            }
            total += c * msum;
        }
        total
    }
}

// --- orthogonality -----------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct OrthogonalityReport {
    pub n: usize,
    pub degree_cap: u32,
    /// max over λ ≠ μ of |S(λ,μ)| / sqrt(S(λ,λ) S(μ,μ))
    pub max_normalized_offdiag: f64,
    pub diagonals: Vec<(Partition, f64)>,
    pub offdiagonals: Vec<(Partition, Partition, f64)>,
    pub tail_rel: f64,
    pub total_mass: f64,
}

/// Verify that the big q-Jacobi polynomials are orthogonal under 𝕄_N by
/// direct summation over the truncated support: S(λ,μ) = Σ_X φ_λ φ_μ M_N.
pub fn verify_orthogonality(
    spec: &MeasureSpec,
    quad_exact: &Quadruple,
    q_exact: &crate::scalar::Scalar,
    t_exact: &crate::scalar::Scalar,
    degree_cap: u32,
) -> Result<OrthogonalityReport> {
    if spec.quad.series != Series::Degenerate {
        return Err(QtError::Config(
            "orthogonality verification requires the degenerate series".into(),
        ));
    }
    let lams: Vec<Partition> = Partition::all_up_to(degree_cap, Some(spec.n));
    let polys: Vec<CompiledPoly> = lams
        .iter()
        .map(|lam| CompiledPoly::compile(&big_q_jacobi(lam, spec.n, q_exact, t_exact, quad_exact)?))
        .collect::<Result<Vec<_>>>()?;

    let e = enumerate_configurations(spec)?;
    let z = e.partition_function;
    let values: Vec<(Vec<f64>, f64)> = e
        .configs
        .iter()
        .map(|(c, w)| (c.values(&spec.params), w / z))
        .collect();

    let k = lams.len();
    let indices: Vec<usize> = (0..k).collect();
    let rows: Vec<Vec<f64>> = maybe_par_map(&indices, |&i| {
        let mut row = vec![0.0; k];
        for (pt, w) in &values {
            let fi = polys[i].eval(pt);
            for (j, slot) in row.iter_mut().enumerate().take(k).skip(i) {
                *slot += fi * polys[j].eval(pt) * w;
            }
        }
        row
    });

    let mut diagonals = Vec::new();
    let mut offdiagonals = Vec::new();
    let mut max_norm: f64 = 0.0;
    for i in 0..k {
        diagonals.push((lams[i].clone(), rows[i][i]));
        if rows[i][i] <= 0.0 {
            return Err(QtError::Domain(format!(
                "diagonal moment for {} is not positive: {}",
                lams[i], rows[i][i]
            )));
        }
    }
    for i in 0..k {
        for j in (i + 1)..k {
            let norm = rows[i][j].abs() / (rows[i][i] * rows[j][j]).sqrt();
            max_norm = max_norm.max(norm);
            offdiagonals.push((lams[i].clone(), lams[j].clone(), norm));
        }
    }
    let total_mass: f64 = values.iter().map(|(_, w)| w).sum();
    Ok(OrthogonalityReport {
        n: spec.n,
        degree_cap,
        max_normalized_offdiag: max_norm,
        diagonals,
        offdiagonals,
        tail_rel: e.tail_bound / z,
        total_mass,
    })
}

// --- sampling -----------------------------------------------------------------------

/// Exact inverse-CDF sampling from the truncated, renormalized weights.
/// Deterministic given the seed.
pub fn sample(spec: &MeasureSpec, seed: u64, count: usize) -> Result<Vec<Configuration>> {
    let e = enumerate_configurations(spec)?;
    let z = e.partition_function;
    let mut cumulative = Vec::with_capacity(e.configs.len());
    let mut acc = 0.0;
    for (_, w) in &e.configs {
        acc += w / z;
        cumulative.push(acc);
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let u: f64 = (rng.next_u64() >> 11) as f64 * 2f64.powi(-53) * acc;
        let idx = cumulative.partition_point(|&c| c < u).min(e.configs.len() - 1);
        out.push(e.configs[idx].0.clone());
    }
    Ok(out)
}

// --- convergence probe ----------------------------------------------------------------

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub enum ProbeStatistic {
    /// Law of the largest particle.
    LargestParticle,
    /// Law of the sub-configuration outside (-ε, ε); configurations that
    /// agree outside the interval are identified, matching the topology of
    /// the configuration space.
    OutsideEpsilon(f64),
}

#[derive(Debug, Clone, Serialize)]
pub struct ProbeReport {
    pub ns: Vec<usize>,
    /// tv[i] = TV distance between the laws at ns[i] and ns[i+1].
    pub tv: Vec<f64>,
}

type Law = BTreeMap<Vec<(i8, u32, i64)>, f64>;

fn statistic_key(
    placed: &[(Side, usize, i64, f64)],
    stat: ProbeStatistic,
) -> Vec<(i8, u32, i64)> {
    match stat {
        ProbeStatistic::LargestParticle => {
            // the largest particle: plus slot 1 when present, otherwise the
            // minus particle closest to zero (the deepest minus slot)
            if let Some(&(_, slot, n, _)) = placed.iter().find(|p| p.0 == Side::Plus) {
                vec![(1, slot as u32, n)]
            } else if let Some(&(_, slot, n, _)) = placed.iter().rev().find(|p| p.0 == Side::Minus) {
                vec![(-1, slot as u32, n)]
            } else {
                vec![]
            }
        }
        ProbeStatistic::OutsideEpsilon(eps) => placed
            .iter()
            .filter(|&&(_, _, _, x)| x.abs() >= eps)
            .map(|&(s, slot, n, _)| (if s == Side::Plus { 1 } else { -1 }, slot as u32, n))
            .collect(),
    }
}

fn tv_distance(a: &Law, b: &Law) -> f64 {
    let mut keys: Vec<_> = a.keys().collect();
    keys.extend(b.keys());
    keys.sort();
    keys.dedup();
    0.5 * keys
        .iter()
        .map(|k| (a.get(*k).unwrap_or(&0.0) - b.get(*k).unwrap_or(&0.0)).abs())
        .sum::<f64>()
}

/// Total-variation distances between consecutive-N pushforward laws of the
/// statistic, at a fixed (q, t, quadruple).
pub fn convergence_probe(base: &MeasureSpec, ns: &[usize], stat: ProbeStatistic) -> Result<ProbeReport> {
    let mut laws: Vec<Law> = Vec::new();
    for &n in ns {
        let spec = base.with_n(n);
        let mut law: Law = BTreeMap::new();
        let (z, _, _) = enumerate_with_sink(&spec, &mut |placed, w| {
            *law.entry(statistic_key(placed, stat)).or_insert(0.0) += w;
        })?;
        for v in law.values_mut() {
            *v /= z;
        }
        laws.push(law);
    }
    let tv = laws.windows(2).map(|w| tv_distance(&w[0], &w[1])).collect();
    Ok(ProbeReport { ns: ns.to_vec(), tv })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Scalar;

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

    fn spec_n(n: usize) -> MeasureSpec {
        // q = 1/2, t = 1/3
        let p = ParameterSet::new(0.5, (1.0f64 / 3.0).ln() / 0.5f64.ln(), 1.0, -1.0).unwrap();
        MeasureSpec::new(p, &degenerate_quad(), n, Tolerance::new(1e-10, 1e-8).unwrap()).unwrap()
    }

    #[test]
    fn v_qt_trivial_and_tau_one() {
        let p = ParameterSet::new(0.5, 1.0, 1.0, -1.0).unwrap();
        let single = Configuration::new(vec![2], vec![]).unwrap();
        assert_eq!(v_qt(&single, &p), 1.0);
        // tau = 1: the squared Vandermonde
        let c = Configuration::new(vec![0, 1], vec![1]).unwrap();
        let vals = c.values(&p);
        let mut vdm2 = 1.0;
        for i in 0..vals.len() {
            for j in (i + 1)..vals.len() {
                vdm2 *= (vals[i] - vals[j]).powi(2);
            }
        }
        let v = v_qt(&c, &p);
        assert!((v - vdm2).abs() < 1e-12 * vdm2, "{v} vs {vdm2}");
        let oracle = v_qt_integer_tau(&c, &p).unwrap();
        assert!((v - oracle).abs() < 1e-12 * oracle);
    }

    #[test]
    fn v_qt_integer_tau_constant() {
        // tau = 2: (1.E) = q^(τ(τ-1)N(N-1)/4) V_{q,t}
        let p = ParameterSet::new(0.5, 2.0, 1.0, -1.0).unwrap();
        let c = Configuration::new(vec![0, 1], vec![0, 2]).unwrap();
        let v = v_qt(&c, &p);
        let oracle = v_qt_integer_tau(&c, &p).unwrap();
        let n = 4.0;
        let expect = p.q.powf(2.0 * 1.0 / 2.0 * n * (n - 1.0) / 2.0) * v;
        assert!((oracle - expect).abs() < 1e-10 * expect.abs(), "{oracle} vs {expect}");
    }

    #[test]
    fn c_constant_basics() {
        let p = ParameterSet::new(0.4, 2.0, 1.0, -1.0).unwrap();
        assert_eq!(c_constant(3, 0, &p).unwrap(), 1.0);
        for k in 0..=3 {
            assert!((c_constant(3, k, &p).unwrap() - 1.0).abs() < 1e-10, "integer tau");
        }
        // tau = 1/2, N = 2, k = 1: the single factor ψ_τ(ζ-/ζ+)
        let p2 = ParameterSet::new(0.4, 0.5, 1.0, -0.7).unwrap();
        let expect = psi_tau_f64(-0.7, 0.4, 0.5);
        assert!((c_constant(2, 1, &p2).unwrap() - expect).abs() < 1e-12);
    }

    #[test]
    fn weight_w_kill_points_and_positivity() {
        let q = 0.5;
        let (a, b) = (Complex64::new(0.5, 0.0), Complex64::new(-1.0, 0.0));
        let (c, d) = (Complex64::new(0.0, 1.0), Complex64::new(0.0, -1.0));
        // x = a^{-1} = 2 and x = a^{-1} q^{-1} = 4 are kill points
        assert_eq!(weight_w(2.0, q, a, b, c, d).unwrap(), 0.0);
        assert_eq!(weight_w(4.0, q, a, b, c, d).unwrap(), 0.0);
        assert_eq!(weight_w(-1.0, q, a, b, c, d).unwrap(), 0.0);
        // inside the support [b^{-1} q, a^{-1} q] = [-1/2, 1]
        for &x in &[1.0, 0.5, 0.25, -0.25, -0.5] {
            assert!(weight_w(x, q, a, b, c, d).unwrap() > 0.0, "x={x}");
        }
    }

    #[test]
    fn n1_partition_function_matches_closed_form() {
        let spec = spec_n(1);
        let z = partition_function(&spec).unwrap();
        let closed = crate::qspecial::z1_closed_form(
            &Scalar::rat(1, 2),
            &Scalar::rat(1, 2),
            &Scalar::from_int(-1),
            &Scalar::i(),
            &(-Scalar::i()),
            &Scalar::one(),
            &Scalar::from_int(-1),
            &Tolerance::default(),
        )
        .unwrap();
        let c = closed.value.to_c64();
        assert!(c.im.abs() < 1e-12);
        assert!((z.value - c.re).abs() < 1e-10 * c.re, "direct {} vs closed {}", z.value, c.re);
    }

    #[test]
    fn degenerate_support_is_respected() {
        let spec = spec_n(2);
        let e = enumerate_configurations(&spec).unwrap();
        // support is [β^{-1} q, α^{-1} q] = [-1/2, 1]
        assert!(!e.configs.is_empty());
        for (c, w) in &e.configs {
            assert!(*w >= 0.0);
            assert!(c.within_interval(&spec.params, -0.5, 1.0));
        }
        let outside = Configuration::new(vec![-1], vec![1]).unwrap();
        assert_eq!(unnormalized_weight(&outside, &spec).unwrap(), 0.0);
    }

    #[test]
    fn enumeration_weights_match_direct_evaluation() {
        let spec = spec_n(3);
        let e = enumerate_configurations(&spec).unwrap();
        assert!(!e.configs.is_empty());
        for (c, w) in e.configs.iter().step_by(e.configs.len() / 25 + 1) {
            let direct = unnormalized_weight(c, &spec).unwrap();
            assert!(
                (w - direct).abs() <= 1e-9 * direct.abs().max(1e-300),
                "config {c:?}: incremental {w} vs direct {direct}"
            );
        }
        let total: f64 = e.configs.iter().map(|(_, w)| w).sum::<f64>() / e.partition_function;
        assert!((total - 1.0).abs() < 1e-8);
    }

    #[test]
    fn measure_weights_in_unit_interval() {
        let spec = spec_n(2);
        let e = enumerate_configurations(&spec).unwrap();
        let z = e.partition_function;
        for (_, w) in &e.configs {
            let m = w / z;
            assert!((0.0..=1.0).contains(&m));
        }
    }

    #[test]
    fn sampling_is_deterministic_and_concentrates() {
        let spec = spec_n(2);
        let a = sample(&spec, 7, 200).unwrap();
        let b = sample(&spec, 7, 200).unwrap();
        assert_eq!(a, b);
        let c = sample(&spec, 8, 200).unwrap();
        assert_ne!(a, c);
        // empirical frequency of the max-weight configuration within 3
        // standard errors of its probability
        let e = enumerate_configurations(&spec).unwrap();
        let (best, bw) = e
            .configs
            .iter()
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .map(|(c, w)| (c.clone(), w / e.partition_function))
            .unwrap();
        let count = 100_000;
        let samples = sample(&spec, 12345, count).unwrap();
        let hits = samples.iter().filter(|c| **c == best).count() as f64;
        let freq = hits / count as f64;
        let se = (bw * (1.0 - bw) / count as f64).sqrt();
        assert!((freq - bw).abs() <= 3.0 * se, "freq {freq} vs prob {bw} (se {se})");
        for s in &samples {
            assert!(Configuration::new(s.plus.clone(), s.minus.clone()).is_ok());
        }
    }

    #[test]
    fn probe_tv_zero_for_equal_n() {
        let spec = spec_n(1);
        let r = convergence_probe(&spec, &[1, 1], ProbeStatistic::LargestParticle).unwrap();
        assert_eq!(r.tv, vec![0.0]);
    }

    #[test]
    fn principal_series_positive_weights() {
        let p = ParameterSet::new(0.5, 1.2, 1.0, -1.0).unwrap();
        let quad = Quadruple::new(
            Scalar::gauss(1, 4, 1, 4),
            Scalar::gauss(1, 4, -1, 4),
            Scalar::i(),
            -Scalar::i(),
            Series::Principal,
        )
        .unwrap();
        let spec = MeasureSpec::new(p, &quad, 2, Tolerance::new(1e-9, 1e-8).unwrap()).unwrap();
        let e = enumerate_configurations(&spec).unwrap();
        assert!(e.configs.iter().all(|(_, w)| *w > 0.0));
        let total: f64 = e.configs.iter().map(|(_, w)| w).sum::<f64>() / e.partition_function;
        assert!((total - 1.0).abs() < 1e-7);
    }

    #[test]
    fn lemma_5a_style_envelope_bound() {
        // fit the constant on one sample of configurations, then assert the
        // bound V <= C ∏ max(1,|x|)^(2τ(N-1)) on a fresh sample
        let p = ParameterSet::new(0.5, 1.3, 1.0, -1.0).unwrap();
        let n = 3;
        let gamma_e = 2.0 * p.tau * (n as f64 - 1.0);
        let mk = |seed: i64| -> Vec<Configuration> {
            let mut out = Vec::new();
            for a in 0..4i64 {
                for b in 0..3i64 {
                    let plus = vec![-2 + a, -2 + a + (seed % 2) + b];
                    let minus = vec![-1 + b + seed % 3];
                    out.push(Configuration::new(plus, minus).unwrap());
                }
            }
            out
        };
        let bound = |c: &Configuration| -> f64 {
            c.values(&p).iter().map(|x| x.abs().max(1.0).powf(gamma_e)).product()
        };
        let fit = mk(0)
            .iter()
            .map(|c| v_qt(c, &p) / bound(c))
            .fold(0.0f64, f64::max);
        for c in mk(1) {
            assert!(v_qt(&c, &p) <= 10.0 * fit * bound(&c), "config {c:?}");
        }
    }
}
