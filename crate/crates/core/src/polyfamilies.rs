//! The polynomial families: Macdonald P_{ν|N}, A-type interpolation
//! polynomials I_{μ|N}, BC-type interpolation polynomials, and their
//! evaluation grids.
//!
//! Combinatorial formulas (1-based box coordinates (i,j), tableau entry
//! T(i,j) in {1..N}):
//!
//! ```text
//! P_{μ|N}(x;q,t)  = sum_T psi_T(q,t) prod_{(i,j)} x_{T(i,j)}
//! I_{μ|N}(x;q,t)  = sum_T psi_T(q,t) prod_{(i,j)} (x_{T(i,j)} - q^(1-j) t^(T(i,j)+i-2))
//! Pbar*_{μ|N}(z;q,t,s) = sum_T psi_T(q,t) prod_{(i,j)}
//!     (z_T + 1/z_T - w - 1/w),   w = q^(j-1) t^(N-i+1-T(i,j)) s
//! ```
//!
//! Grids:
//!
//! ```text
//! X_N(λ)  = (q^(-λ1), q^(-λ2) t, ..., q^(-λN) t^(N-1))          (A-type)
//! X̂_N(λ) = (q^(λ1) t^(N-1) s, ..., q^(λN) s)                    (BC-type)
//! ```
//!
//! The Gram–Schmidt oracle orthogonalizes the monomial basis under the
//! (q,t) power-sum inner product and is an implementation-independent
//! cross-check of the tableau route; it ships in the production tree so the
//! CLI can expose `--oracle` comparisons.

use std::collections::BTreeMap;

use crate::error::{QtError, Result};
use crate::partitions::{enumerate_reverse_tableaux, tableau_weight, Partition};
use crate::scalar::Scalar;
use crate::sympoly::SymmetricPolynomial;

/// Which of the two vanishing grids a point set belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridKind {
    AType,
    BcType,
}

/// An evaluation grid point X_N(λ) or X̂_N(λ).
#[derive(Debug, Clone)]
pub struct EvaluationGrid {
    pub kind: GridKind,
    pub lambda: Partition,
    pub n: usize,
    pub points: Vec<Scalar>,
}

/// A-type grid X_N(λ).
pub fn a_grid(lam: &Partition, n: usize, q: &Scalar, t: &Scalar) -> Result<EvaluationGrid> {
    check_len(lam, n)?;
    let points = (1..=n)
        .map(|i| Ok(&q.powi(-(lam.part(i) as i64))? * &t.powi(i as i64 - 1)?))
        .collect::<Result<Vec<_>>>()?;
    Ok(EvaluationGrid { kind: GridKind::AType, lambda: lam.clone(), n, points })
}

/// BC-type grid X̂_N(λ) with parameter s.
pub fn bc_grid(lam: &Partition, n: usize, q: &Scalar, t: &Scalar, s: &Scalar) -> Result<EvaluationGrid> {
    check_len(lam, n)?;
    let points = (1..=n)
        .map(|i| Ok(&(&q.powi(lam.part(i) as i64)? * &t.powi((n - i) as i64)?) * s))
        .collect::<Result<Vec<_>>>()?;
    Ok(EvaluationGrid { kind: GridKind::BcType, lambda: lam.clone(), n, points })
}

fn check_len(lam: &Partition, n: usize) -> Result<()> {
    if lam.length() > n {
        return Err(QtError::Index(format!("partition {lam} does not fit in {n} variables")));
    }
    Ok(())
}

/// Collapse a dense monomial map into the m-basis; the input must be
/// symmetric (coefficients constant on permutation orbits).
fn collapse_to_m(map: BTreeMap<Vec<u32>, Scalar>, n: usize) -> SymmetricPolynomial {
    let mut out = SymmetricPolynomial::zero(n);
    for (e, c) in &map {
        if c.is_zero() {
            continue;
        }
        let mut sorted = e.clone();
        sorted.sort_unstable_by(|a, b| b.cmp(a));
        if *e == sorted {
            out.add_term(Partition::new(sorted).expect("sorted"), c.clone());
        } else if cfg!(debug_assertions) {
            let rep = map.get(&sorted).expect("symmetric polynomial has orbit representative");
            debug_assert!(rep == c, "asymmetric expansion at {e:?}");
        }
    }
    out
}

/// Macdonald polynomial P_{ν|N}(·;q,t) via the tableau formula.
pub fn macdonald(nu: &Partition, n: usize, q: &Scalar, t: &Scalar) -> Result<SymmetricPolynomial> {
    check_len(nu, n)?;
    let mut map: BTreeMap<Vec<u32>, Scalar> = BTreeMap::new();
    for tab in enumerate_reverse_tableaux(nu, n) {
        let w = tableau_weight(&tab, n, q, t)?;
        let e = tab.content(n);
        let entry = map.entry(e).or_insert_with(Scalar::zero);
        *entry = &*entry + &w;
    }
    Ok(collapse_to_m(map, n))
}

/// A-type interpolation polynomial I_{μ|N}(·;q,t) as an expanded polynomial.
pub fn interpolation(mu: &Partition, n: usize, q: &Scalar, t: &Scalar) -> Result<SymmetricPolynomial> {
    check_len(mu, n)?;
    let mut map: BTreeMap<Vec<u32>, Scalar> = BTreeMap::new();
    for tab in enumerate_reverse_tableaux(mu, n) {
        let w = tableau_weight(&tab, n, q, t)?;
        // expand prod (x_v - c_box) into the monomial map
        let mut terms: BTreeMap<Vec<u32>, Scalar> = BTreeMap::new();
        terms.insert(vec![0; n], w);
        for (i, j, v) in tab.iter_boxes() {
            let c = shift_constant(i, j, v, q, t)?;
            let mut next: BTreeMap<Vec<u32>, Scalar> = BTreeMap::new();
            for (e, cf) in terms {
                let mut e2 = e.clone();
                e2[v as usize - 1] += 1;
                let slot = next.entry(e2).or_insert_with(Scalar::zero);
                *slot = &*slot + &cf;
                let slot = next.entry(e).or_insert_with(Scalar::zero);
                *slot = &*slot - &(&c * &cf);
            }
            terms = next;
        }
        for (e, cf) in terms {
            let entry = map.entry(e).or_insert_with(Scalar::zero);
            *entry = &*entry + &cf;
        }
    }
    Ok(collapse_to_m(map, n))
}

/// The grid constant q^(1-j) t^(T+i-2) subtracted in the A-type formula.
fn shift_constant(i: usize, j: usize, v: u32, q: &Scalar, t: &Scalar) -> Result<Scalar> {
    Ok(&q.powi(1 - j as i64)? * &t.powi(v as i64 + i as i64 - 2)?)
}

/// Evaluate I_{μ|N}(point;q,t) directly from the tableau sum, without
/// expanding the polynomial.
pub fn interpolation_eval(
    mu: &Partition,
    n: usize,
    q: &Scalar,
    t: &Scalar,
    point: &[Scalar],
) -> Result<Scalar> {
    check_len(mu, n)?;
    if point.len() != n {
        return Err(QtError::Index("point length != N".into()));
    }
    let mut total = Scalar::zero();
    for tab in enumerate_reverse_tableaux(mu, n) {
        let mut term = tableau_weight(&tab, n, q, t)?;
        for (i, j, v) in tab.iter_boxes() {
            let c = shift_constant(i, j, v, q, t)?;
            term = &term * &(&point[v as usize - 1] - &c);
            if term.is_zero() {
                break;
            }
        }
        total = &total + &term;
    }
    Ok(total)
}

/// P*_ν(q^μ;q,t) in Okounkov's notation: the shifted polynomial evaluated on
/// the partition grid. Computed as I_{ν|N} with parameters (q⁻¹,t⁻¹) at the
/// point (q^μ1, q^μ2 t⁻¹, …, q^μN t^(1-N)); independent of N for
/// N ≥ max(ℓ(μ), ℓ(ν)).
pub fn shifted_eval(nu: &Partition, mu: &Partition, q: &Scalar, t: &Scalar, n: usize) -> Result<Scalar> {
    if n < nu.length().max(mu.length()) {
        return Err(QtError::Index(format!(
            "N = {n} too small for shifted evaluation of {nu} at {mu}"
        )));
    }
    let qi = Scalar::one().try_div(q)?;
    let ti = Scalar::one().try_div(t)?;
    let point = (1..=n)
        .map(|i| Ok(&q.powi(mu.part(i) as i64)? * &t.powi(1 - i as i64)?))
        .collect::<Result<Vec<_>>>()?;
    interpolation_eval(nu, n, &qi, &ti, &point)
}

/// Principal specialization P_{μ|N}(1,t,…,t^(N-1)) in closed form:
/// t^n(μ) (t^N;q,t)_μ / prod_{(i,j)∈μ} (1 - q^(μ_i-j) t^(μ'_j-i+1)).
pub fn principal_specialization(mu: &Partition, n: usize, q: &Scalar, t: &Scalar) -> Result<Scalar> {
    check_len(mu, n)?;
    let tn = t.powi(n as i64)?;
    let num = &t.powi(mu.n_stat() as i64)? * &crate::qspecial::qt_pochhammer(&tn, q, t, mu)?;
    let den = crate::qspecial::c_minus(mu, t, q, t)?;
    num.try_div(&den)
}

// --- BC-type interpolation ----------------------------------------------------

/// Evaluator for the BC_N-invariant interpolation polynomial
/// Pbar*^(N)_μ(·;q,t,s). Evaluation-only: no expanded Laurent representation
/// is stored.
#[derive(Debug, Clone)]
pub struct BcInterpolation {
    n: usize,
    /// Per tableau: weight psi_T and, per box, (variable index, w + 1/w).
    tableaux: Vec<(Scalar, Vec<(usize, Scalar)>)>,
}

/// Build the evaluator from the tableau sum.
pub fn bc_interpolation(
    mu: &Partition,
    n: usize,
    q: &Scalar,
    t: &Scalar,
    s: &Scalar,
) -> Result<BcInterpolation> {
    check_len(mu, n)?;
    if s.is_zero() {
        return Err(QtError::Domain("BC interpolation needs s != 0".into()));
    }
    let mut tableaux = Vec::new();
    for tab in enumerate_reverse_tableaux(mu, n) {
        let w = tableau_weight(&tab, n, q, t)?;
        let mut boxes = Vec::new();
        for (i, j, v) in tab.iter_boxes() {
            // w = q^(j-1) t^(N - i + 1 - T(i,j)) s
            let c = &(&q.powi(j as i64 - 1)? * &t.powi(n as i64 - i as i64 + 1 - v as i64)?) * s;
            let csum = &c + &Scalar::one().try_div(&c)?;
            boxes.push((v as usize - 1, csum));
        }
        tableaux.push((w, boxes));
    }
    Ok(BcInterpolation { n, tableaux })
}

impl BcInterpolation {
    /// Evaluate at (z_1, …, z_N); all coordinates must be nonzero.
    pub fn eval(&self, z: &[Scalar]) -> Result<Scalar> {
        if z.len() != self.n {
            return Err(QtError::Index("point length != N".into()));
        }
        let zsum = z
            .iter()
            .map(|zi| Ok(zi + &Scalar::one().try_div(zi)?))
            .collect::<Result<Vec<_>>>()
            .map_err(|_| QtError::Domain("BC evaluation at a zero coordinate".into()))?;
        let mut total = Scalar::zero();
        for (w, boxes) in &self.tableaux {
            let mut term = w.clone();
            for (var, csum) in boxes {
                term = &term * &(&zsum[*var] - csum);
                if term.is_zero() {
                    break;
                }
            }
            total = &total + &term;
        }
        Ok(total)
    }

    /// Batch evaluation entry point for CLI-facing use.
    pub fn batch_eval(&self, points: &[Vec<Scalar>]) -> Result<Vec<Scalar>> {
        points.iter().map(|p| self.eval(p)).collect()
    }
}

// --- oracles -------------------------------------------------------------------

/// Macdonald polynomial by Gram–Schmidt orthogonalization of the monomial
/// basis under ⟨p_λ, p_μ⟩ = δ_λμ z_λ ∏_i (1-q^λi)/(1-t^λi), restricted to N
/// variables. Independent of the tableau route.
pub fn macdonald_gram_schmidt_oracle(
    nu: &Partition,
    n: usize,
    q: &Scalar,
    t: &Scalar,
) -> Result<SymmetricPolynomial> {
    check_len(nu, n)?;
    if nu.is_empty() {
        return Ok(SymmetricPolynomial::constant(n, Scalar::one()));
    }
    let d = nu.size();
    let basis = gram_schmidt_degree(d, q, t)?;
    let coeffs = basis.get(nu).expect("partition of degree d");
    // restrict to N variables: drop m_λ with too many rows
    let mut out = SymmetricPolynomial::zero(n);
    for (lam, c) in coeffs {
        if lam.length() <= n {
            out.add_term(lam.clone(), c.clone());
        }
    }
    Ok(out)
}

type MVector = BTreeMap<Partition, Scalar>;

/// All Macdonald symmetric functions of degree d as m-basis vectors.
fn gram_schmidt_degree(d: u32, q: &Scalar, t: &Scalar) -> Result<BTreeMap<Partition, MVector>> {
    let mut parts = Partition::all_of_size(d);
    parts.sort(); // ascending lex, a linear extension of dominance
    let k = parts.len();
    let index: BTreeMap<&Partition, usize> = parts.iter().zip(0..).collect();

    // R[rho][lam] = coefficient of m_lam in p_rho (integer entries)
    let nvars = d as usize;
    let mut r = vec![vec![Scalar::zero(); k]; k];
    for (ri, rho) in parts.iter().enumerate() {
        let mut p = SymmetricPolynomial::constant(nvars, Scalar::one());
        for &part in rho.parts() {
            let pr = SymmetricPolynomial::monomial(nvars, Partition::of(&[part]))?;
            p = p.multiply_capped(&pr, d as usize)?;
        }
        for (lam, c) in p.terms() {
            r[ri][index[lam]] = c.clone();
        }
    }
    let rinv = invert_exact(&r)?;

    // Gram matrix of the monomial basis: G = Rinv D Rinv^T with
    // D_rho = z_rho prod (1-q^rho_i)/(1-t^rho_i)
    let mut dvec = Vec::with_capacity(k);
    for rho in &parts {
        let mut z = Scalar::one();
        let mut mult: BTreeMap<u32, u32> = BTreeMap::new();
        for &p in rho.parts() {
            *mult.entry(p).or_insert(0) += 1;
        }
        for (&p, &m) in &mult {
            z = &z * &Scalar::from_int(p as i64).powi(m as i64)?;
            z = &z * &Scalar::from_int(factorial(m));
        }
        for &p in rho.parts() {
            let num = &Scalar::one() - &q.powi(p as i64)?;
            let den = &Scalar::one() - &t.powi(p as i64)?;
            z = &z * &num.try_div(&den)?;
        }
        dvec.push(z);
    }
    let mut g = vec![vec![Scalar::zero(); k]; k];
    for a in 0..k {
        for b in a..k {
            let mut s = Scalar::zero();
            for (rho, dv) in dvec.iter().enumerate() {
                s = &s + &(&(&rinv[a][rho] * &rinv[b][rho]) * dv);
            }
            g[a][b] = s.clone();
            g[b][a] = s;
        }
    }
    let inner = |u: &[Scalar], v: &[Scalar]| -> Scalar {
        let mut s = Scalar::zero();
        for a in 0..k {
            if u[a].is_zero() {
                continue;
            }
            for b in 0..k {
                if !v[b].is_zero() {
                    s = &s + &(&(&u[a] * &v[b]) * &g[a][b]);
                }
            }
        }
        s
    };

    // Gram–Schmidt in ascending order: P_lam = m_lam - sum_{mu before lam} …
    let mut ortho: Vec<Vec<Scalar>> = Vec::with_capacity(k);
    for a in 0..k {
        let mut v = vec![Scalar::zero(); k];
        v[a] = Scalar::one();
        for w in ortho.iter().take(a) {
            let c = inner(&v, w).try_div(&inner(w, w))?;
            for b in 0..k {
                v[b] = &v[b] - &(&c * &w[b]);
            }
        }
        ortho.push(v);
    }

    let mut out = BTreeMap::new();
    for (a, lam) in parts.iter().enumerate() {
        let mut vec: MVector = BTreeMap::new();
        for b in 0..k {
            if !ortho[a][b].is_zero() {
                vec.insert(parts[b].clone(), ortho[a][b].clone());
            }
        }
        out.insert(lam.clone(), vec);
    }
    Ok(out)
}

fn factorial(m: u32) -> i64 {
    (1..=m as i64).product::<i64>().max(1)
}

/// Exact dense matrix inverse by Gauss–Jordan elimination.
fn invert_exact(m: &[Vec<Scalar>]) -> Result<Vec<Vec<Scalar>>> {
    let k = m.len();
    let mut a: Vec<Vec<Scalar>> = m.to_vec();
    let mut inv = vec![vec![Scalar::zero(); k]; k];
    for (i, row) in inv.iter_mut().enumerate() {
        row[i] = Scalar::one();
    }
    for col in 0..k {
        let pivot = (col..k)
            .find(|&r| !a[r][col].is_zero())
            .ok_or_else(|| QtError::DivisionByZero("singular transition matrix".into()))?;
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let p = a[col][col].clone();
        for j in 0..k {
            a[col][j] = a[col][j].try_div(&p)?;
            inv[col][j] = inv[col][j].try_div(&p)?;
        }
        for r in 0..k {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for j in 0..k {
                    a[r][j] = &a[r][j] - &(&f * &a[col][j]);
                    inv[r][j] = &inv[r][j] - &(&f * &inv[col][j]);
                }
            }
        }
    }
    Ok(inv)
}

/// Schur polynomial by the Jacobi–Trudi determinant s_ν = det(h_{ν_i-i+j}).
/// Oracle for the t = q degeneration of the Macdonald polynomials.
pub fn schur_jacobi_trudi(nu: &Partition, n: usize) -> Result<SymmetricPolynomial> {
    check_len(nu, n)?;
    if nu.is_empty() {
        return Ok(SymmetricPolynomial::constant(n, Scalar::one()));
    }
    let d = nu.size() as usize;
    let nvars = d.max(n);
    let l = nu.length();
    let h = |k: i64| -> Result<Option<SymmetricPolynomial>> {
        if k < 0 {
            return Ok(None);
        }
        let mut p = SymmetricPolynomial::zero(nvars);
        for lam in Partition::all_of_size(k as u32) {
            if lam.length() <= nvars {
                p.add_term(lam, Scalar::one());
            }
        }
        Ok(Some(p))
    };
    // permutation expansion of the l x l determinant
    let perms = permutations(l);
    let mut det = SymmetricPolynomial::zero(nvars);
    for (sign, perm) in perms {
        let mut prod = SymmetricPolynomial::constant(nvars, Scalar::one());
        let mut dead = false;
        for (i, &pi) in perm.iter().enumerate() {
            let k = nu.part(i + 1) as i64 - (i as i64 + 1) + (pi as i64 + 1);
            match h(k)? {
                Some(hk) => prod = prod.multiply_capped(&hk, d)?,
                None => {
                    dead = true;
                    break;
                }
            }
        }
        if !dead {
            det = det.add(&prod.scale(&Scalar::from_int(sign)))?;
        }
    }
    // restrict to N variables
    let mut out = SymmetricPolynomial::zero(n);
    for (lam, c) in det.terms() {
        if lam.length() <= n {
            out.add_term(lam.clone(), c.clone());
        }
    }
    Ok(out)
}

fn permutations(l: usize) -> Vec<(i64, Vec<usize>)> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = Vec::new();
    let mut used = vec![false; l];
    fn rec(l: usize, cur: &mut Vec<usize>, used: &mut [bool], sign: i64, out: &mut Vec<(i64, Vec<usize>)>) {
        if cur.len() == l {
            out.push((sign, cur.clone()));
            return;
        }
        for v in 0..l {
            if !used[v] {
                let inversions = cur.iter().filter(|&&c| c > v).count();
                used[v] = true;
                cur.push(v);
                rec(l, cur, used, sign * if inversions % 2 == 0 { 1 } else { -1 }, out);
                cur.pop();
                used[v] = false;
            }
        }
    }
    rec(l, &mut cur, &mut used, 1, &mut out);
    out
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

    #[test]
    fn macdonald_columns_are_elementary() {
        for k in 1..=3 {
            let nu = Partition::new(vec![1; k]).unwrap();
            let p = macdonald(&nu, 4, &q(), &t()).unwrap();
            let mut expect = SymmetricPolynomial::zero(4);
            expect.add_term(nu, Scalar::one());
            assert_eq!(p, expect);
        }
    }

    #[test]
    fn macdonald_two_two_known_coefficient() {
        let p = macdonald(&Partition::of(&[2]), 2, &q(), &t()).unwrap();
        // (1+q)(1-t)/(1-qt) at q=1/2, t=1/3 is 6/5
        assert_eq!(p.coefficient(&Partition::of(&[1, 1])), Scalar::rat(6, 5));
        assert_eq!(p.coefficient(&Partition::of(&[2])), Scalar::one());
    }

    #[test]
    fn macdonald_needs_enough_variables() {
        assert!(macdonald(&Partition::of(&[1, 1, 1]), 2, &q(), &t()).is_err());
    }

    #[test]
    fn gram_schmidt_agrees_with_tableaux_small() {
        for size in 0..=4 {
            for nu in Partition::all_of_size(size) {
                for n in nu.length().max(1)..=3 {
                    let a = macdonald(&nu, n, &q(), &t()).unwrap();
                    let b = macdonald_gram_schmidt_oracle(&nu, n, &q(), &t()).unwrap();
                    assert_eq!(a, b, "nu={nu} N={n}");
                }
            }
        }
    }

    #[test]
    fn t_equals_q_reduces_to_schur() {
        let qq = Scalar::rat(2, 5);
        for size in 1..=4 {
            for nu in Partition::all_of_size(size) {
                let n = nu.length().max(2).min(3);
                if nu.length() > n {
                    continue;
                }
                let mac = macdonald(&nu, n, &qq, &qq).unwrap();
                let schur = schur_jacobi_trudi(&nu, n).unwrap();
                assert_eq!(mac, schur, "nu={nu} N={n}");
            }
        }
    }

    #[test]
    fn interpolation_single_box() {
        let p = interpolation(&Partition::of(&[1]), 1, &q(), &t()).unwrap();
        // x1 - 1
        assert_eq!(p.coefficient(&Partition::of(&[1])), Scalar::one());
        assert_eq!(p.coefficient(&Partition::empty()), Scalar::from_int(-1));
    }

    #[test]
    fn interpolation_vanishing_and_nonvanishing() {
        let mu = Partition::of(&[2, 1]);
        let n = 3;
        for lam in Partition::all_up_to(3, Some(n)) {
            let grid = a_grid(&lam, n, &q(), &t()).unwrap();
            let v = interpolation_eval(&mu, n, &q(), &t(), &grid.points).unwrap();
            if lam == mu {
                assert!(!v.is_zero());
            } else {
                assert!(v.is_zero(), "I_(2,1)|3 at X({lam}) = {v}");
            }
        }
    }

    #[test]
    fn interpolation_stability() {
        // substituting x_N = t^(N-1) reduces N by one
        let n = 3;
        for mu in Partition::all_up_to(3, Some(n)) {
            let big = interpolation(&mu, n, &q(), &t()).unwrap();
            let pt = [Scalar::rat(5, 7), Scalar::rat(-2, 3)];
            let mut full = pt.to_vec();
            full.push(t().powi(n as i64 - 1).unwrap());
            let lhs = big.evaluate(&full).unwrap();
            let rhs = if mu.length() <= n - 1 {
                interpolation_eval(&mu, n - 1, &q(), &t(), &pt).unwrap()
            } else {
                Scalar::zero()
            };
            assert_eq!(lhs, rhs, "stability at mu={mu}");
        }
    }

    #[test]
    fn interpolation_top_component_is_macdonald() {
        for size in 0..=4 {
            for mu in Partition::all_up_to(size, Some(3)) {
                let n = 3;
                let i = interpolation(&mu, n, &q(), &t()).unwrap();
                let m = macdonald(&mu, n, &q(), &t()).unwrap();
                assert_eq!(i.component(mu.size() as usize), m, "mu={mu}");
            }
        }
    }

    #[test]
    fn shifted_eval_properties() {
        // extra vanishing and N-independence
        let qv = q();
        let tv = t();
        assert_eq!(
            shifted_eval(&Partition::of(&[2]), &Partition::of(&[1, 1]), &qv, &tv, 2).unwrap(),
            Scalar::zero()
        );
        assert_eq!(
            shifted_eval(&Partition::empty(), &Partition::of(&[3, 1]), &qv, &tv, 2).unwrap(),
            Scalar::one()
        );
        for nu in [Partition::of(&[1]), Partition::of(&[2, 1])] {
            for mu in [Partition::of(&[2, 1]), Partition::of(&[3, 2])] {
                let a = shifted_eval(&nu, &mu, &qv, &tv, 2).unwrap();
                let b = shifted_eval(&nu, &mu, &qv, &tv, 3).unwrap();
                let c = shifted_eval(&nu, &mu, &qv, &tv, 4).unwrap();
                assert_eq!(a, b);
                assert_eq!(b, c);
            }
        }
        assert!(shifted_eval(&Partition::of(&[1, 1, 1]), &Partition::of(&[1]), &qv, &tv, 2).is_err());
    }

    #[test]
    fn principal_specialization_matches_evaluation() {
        for size in 0..=4 {
            for mu in Partition::all_up_to(size, Some(3)) {
                let n = 3;
                let closed = principal_specialization(&mu, n, &q(), &t()).unwrap();
                let poly = macdonald(&mu, n, &q(), &t()).unwrap();
                let pt: Vec<Scalar> = (0..n).map(|i| t().powi(i as i64).unwrap()).collect();
                let direct = poly.evaluate(&pt).unwrap();
                assert_eq!(closed, direct, "mu={mu}");
            }
        }
        assert_eq!(
            principal_specialization(&Partition::of(&[1]), 2, &q(), &t()).unwrap(),
            &Scalar::one() + &t()
        );
    }

    #[test]
    fn bc_interpolation_empty_is_one() {
        let s = Scalar::rat(3, 5);
        let p = bc_interpolation(&Partition::empty(), 2, &q(), &t(), &s).unwrap();
        let v = p.eval(&[Scalar::rat(2, 3), Scalar::rat(5, 4)]).unwrap();
        assert_eq!(v, Scalar::one());
    }

    #[test]
    fn bc_vanishing_properties() {
        let s = Scalar::rat(3, 5);
        let n = 2;
        for mu in Partition::all_up_to(2, Some(n)) {
            let poly = bc_interpolation(&mu, n, &q(), &t(), &s).unwrap();
            for lam in Partition::all_up_to(3, Some(n)) {
                let grid = bc_grid(&lam, n, &q(), &t(), &s).unwrap();
                let v = poly.eval(&grid.points).unwrap();
                if lam == mu {
                    assert!(!v.is_zero());
                } else if lam.size() <= mu.size() || !lam.contains(&mu) {
                    assert!(v.is_zero(), "Pbar*_{mu} at Xhat({lam}) = {v}");
                }
            }
        }
    }

    #[test]
    fn bc_invariance_under_inversion_and_permutation() {
        let s = Scalar::rat(3, 5);
        let poly = bc_interpolation(&Partition::of(&[2, 1]), 2, &q(), &t(), &s).unwrap();
        let z = [Scalar::rat(7, 3), Scalar::rat(-4, 5)];
        let v = poly.eval(&z).unwrap();
        let zinv = [
            Scalar::one().try_div(&z[0]).unwrap(),
            z[1].clone(),
        ];
        assert_eq!(poly.eval(&zinv).unwrap(), v);
        let zperm = [z[1].clone(), z[0].clone()];
        assert_eq!(poly.eval(&zperm).unwrap(), v);
        assert!(poly.eval(&[Scalar::zero(), Scalar::one()]).is_err());
    }

    #[test]
    fn bc_leading_normalization() {
        // coefficient of z1^mu1 z2^mu2 equals 1: compare against the single
        // maximal tableau's top monomial by scaling z -> large
        let s = Scalar::rat(3, 5);
        let mu = Partition::of(&[2, 1]);
        let poly = bc_interpolation(&mu, 2, &q(), &t(), &s).unwrap();
        let big = Scalar::from_int(1 << 20);
        let z = [&big * &Scalar::rat(17, 16), big.clone()];
        let v = poly.eval(&z).unwrap();
        let lead = &z[0].powi(2).unwrap() * &z[1];
        let ratio = v.try_div(&lead).unwrap().to_f64();
        assert!((ratio - 1.0).abs() < 1e-4, "ratio {ratio}");
    }
}
