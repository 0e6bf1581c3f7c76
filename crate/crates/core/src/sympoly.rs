//! Sparse symmetric polynomials in N variables over [`Scalar`], stored in
//! the monomial symmetric basis m_λ.
//!
//! The m_λ basis is the storage format because the Macdonald polynomials are
//! unitriangular in it, which keeps the coefficient-extraction elimination
//! exact. Multiplication goes through brute symmetrization of products of
//! distinct permutations, which is adequate for the desk-scale degrees this
//! crate works at (the cap defaults to 12).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{QtError, Result};
use crate::partitions::Partition;
use crate::scalar::Scalar;

/// Default degree cap for ring operations.
pub const DEFAULT_DEGREE_CAP: usize = 12;

/// A symmetric polynomial Σ c_λ m_λ in `num_vars` variables.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricPolynomial {
    num_vars: usize,
    terms: BTreeMap<Partition, Scalar>,
}

impl SymmetricPolynomial {
    pub fn zero(num_vars: usize) -> Self {
        SymmetricPolynomial { num_vars, terms: BTreeMap::new() }
    }

    pub fn constant(num_vars: usize, c: Scalar) -> Self {
        let mut p = Self::zero(num_vars);
        p.add_term(Partition::empty(), c);
        p
    }

    /// The monomial symmetric polynomial m_λ.
    pub fn monomial(num_vars: usize, lam: Partition) -> Result<Self> {
        if lam.length() > num_vars {
            return Err(QtError::Index(format!(
                "m_{lam} needs at least {} variables, got {num_vars}",
                lam.length()
            )));
        }
        let mut p = Self::zero(num_vars);
        p.add_term(lam, Scalar::one());
        Ok(p)
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Partition, &Scalar)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, lam: &Partition) -> Scalar {
        self.terms.get(lam).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(|l| l.size() as usize).max().unwrap_or(0)
    }

    /// Add c·m_λ in place, pruning zeros.
    pub fn add_term(&mut self, lam: Partition, c: Scalar) {
        debug_assert!(lam.length() <= self.num_vars);
        let entry = self.terms.entry(lam.clone()).or_insert_with(Scalar::zero);
        *entry = &*entry + &c;
        if entry.is_zero() {
            self.terms.remove(&lam);
        }
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        if self.num_vars != rhs.num_vars {
            return Err(QtError::Index(format!(
                "mismatched num_vars {} vs {}",
                self.num_vars, rhs.num_vars
            )));
        }
        let mut out = self.clone();
        for (l, c) in rhs.terms() {
            out.add_term(l.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        if c.is_zero() {
            return Self::zero(self.num_vars);
        }
        let terms = self.terms.iter().map(|(l, v)| (l.clone(), v * c)).collect();
        SymmetricPolynomial { num_vars: self.num_vars, terms }
    }

    /// Top homogeneous component.
    pub fn top_component(&self) -> Self {
        let d = self.degree();
        let terms = self
            .terms
            .iter()
            .filter(|(l, _)| l.size() as usize == d)
            .map(|(l, c)| (l.clone(), c.clone()))
            .collect();
        SymmetricPolynomial { num_vars: self.num_vars, terms }
    }

    /// Homogeneous component of the given degree.
    pub fn component(&self, d: usize) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|(l, _)| l.size() as usize == d)
            .map(|(l, c)| (l.clone(), c.clone()))
            .collect();
        SymmetricPolynomial { num_vars: self.num_vars, terms }
    }

    pub fn multiply(&self, rhs: &Self) -> Result<Self> {
        self.multiply_capped(rhs, DEFAULT_DEGREE_CAP)
    }

    /// Product in the m-basis; refuses degrees beyond `cap`.
    pub fn multiply_capped(&self, rhs: &Self, cap: usize) -> Result<Self> {
        if self.num_vars != rhs.num_vars {
            return Err(QtError::Index(format!(
                "mismatched num_vars {} vs {}",
                self.num_vars, rhs.num_vars
            )));
        }
        let degree = self.degree() + rhs.degree();
        if degree > cap {
            return Err(QtError::DegreeCap { degree, cap });
        }
        let n = self.num_vars;
        let mut out = Self::zero(n);
        for (lam, cl) in &self.terms {
            let perms_l = distinct_permutations(&pad(lam, n));
            for (mu, cm) in &rhs.terms {
                let perms_m = distinct_permutations(&pad(mu, n));
                let coeff = cl * cm;
                // coefficient of m_ν = #{(α,β): α + β equals ν exactly}
                let mut counts: BTreeMap<Vec<u32>, u64> = BTreeMap::new();
                for a in &perms_l {
                    for b in &perms_m {
                        let s: Vec<u32> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                        if s.windows(2).all(|w| w[0] >= w[1]) {
                            *counts.entry(s).or_insert(0) += 1;
                        }
                    }
                }
                for (v, k) in counts {
                    let nu = Partition::new(v).expect("sorted vector");
                    out.add_term(nu, &coeff * &Scalar::from_int(k as i64));
                }
            }
        }
        Ok(out)
    }

    /// Evaluate at a point (length must equal `num_vars`).
    pub fn evaluate(&self, point: &[Scalar]) -> Result<Scalar> {
        if point.len() != self.num_vars {
            return Err(QtError::Index(format!(
                "point has {} coordinates, polynomial has {}",
                point.len(),
                self.num_vars
            )));
        }
        let mut total = Scalar::zero();
        for (lam, c) in &self.terms {
            let mut msum = Scalar::zero();
            for perm in distinct_permutations(&pad(lam, self.num_vars)) {
                let mut term = Scalar::one();
                for (x, &e) in point.iter().zip(&perm) {
                    if e > 0 {
                        term = &term * &x.powi(e as i64)?;
                    }
                }
                msum = &msum + &term;
            }
            total = &total + &(c * &msum);
        }
        Ok(total)
    }

    /// Unique coefficients c_ν with p = Σ c_ν P_{ν|N}(·;q,t), extracted by
    /// dominance-triangular elimination per homogeneous component.
    pub fn coefficients_in_macdonald(&self, q: &Scalar, t: &Scalar) -> Result<BTreeMap<Partition, Scalar>> {
        let mut out = BTreeMap::new();
        for d in (0..=self.degree()).rev() {
            let mut work = self.component(d);
            while !work.is_zero() {
                // dominance-maximal term; lex max is a linear extension of dominance
                let lam = work.terms.keys().max().unwrap().clone();
                debug_assert!(work
                    .terms
                    .keys()
                    .all(|m| m == &lam || m.dominance_cmp(&lam) != Some(std::cmp::Ordering::Greater)));
                let c = work.coefficient(&lam);
                let p = crate::polyfamilies::macdonald(&lam, self.num_vars, q, t)?;
                work = work.add(&p.scale(&(-&c)))?;
                out.insert(lam, c);
            }
        }
        Ok(out)
    }
}

fn pad(lam: &Partition, n: usize) -> Vec<u32> {
    let mut v = lam.parts().to_vec();
    v.resize(n, 0);
    v
}

/// All distinct permutations of a multiset, by repeated `prev_permutation`
/// over the sorted-descending start.
pub fn distinct_permutations(v: &[u32]) -> Vec<Vec<u32>> {
    let mut cur = v.to_vec();
    cur.sort_unstable_by(|a, b| b.cmp(a));
    let mut out = vec![cur.clone()];
    while prev_permutation(&mut cur) {
        out.push(cur.clone());
    }
    out
}

/// Next permutation in descending lexicographic order; false when exhausted.
fn prev_permutation(v: &mut [u32]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] <= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] >= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

// --- serde -------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct TermRepr {
    lambda: Vec<u32>,
    coef: Scalar,
}

#[derive(Serialize, Deserialize)]
struct PolyRepr {
    n: usize,
    terms: Vec<TermRepr>,
}

impl Serialize for SymmetricPolynomial {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        PolyRepr {
            n: self.num_vars,
            terms: self
                .terms
                .iter()
                .map(|(l, c)| TermRepr { lambda: l.parts().to_vec(), coef: c.clone() })
                .collect(),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for SymmetricPolynomial {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error;
        let repr = PolyRepr::deserialize(de)?;
        let mut p = SymmetricPolynomial::zero(repr.n);
        for t in repr.terms {
            let lam = Partition::new(t.lambda).map_err(D::Error::custom)?;
            if lam.length() > repr.n {
                return Err(D::Error::custom("partition longer than num_vars"));
            }
            p.add_term(lam, t.coef);
        }
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(n: usize, parts: &[u32]) -> SymmetricPolynomial {
        SymmetricPolynomial::monomial(n, Partition::of(parts)).unwrap()
    }

    #[test]
    fn m1_squared_in_two_vars() {
        let p = m(2, &[1]).multiply(&m(2, &[1])).unwrap();
        assert_eq!(p.coefficient(&Partition::of(&[2])), Scalar::one());
        assert_eq!(p.coefficient(&Partition::of(&[1, 1])), Scalar::from_int(2));
    }

    #[test]
    fn add_identity_and_mismatch() {
        let p = m(2, &[2, 1]);
        assert_eq!(p.add(&SymmetricPolynomial::zero(2)).unwrap(), p);
        assert!(p.add(&SymmetricPolynomial::zero(3)).is_err());
    }

    #[test]
    fn evaluate_examples() {
        let p = m(2, &[1]);
        let v = p.evaluate(&[Scalar::rat(1, 2), Scalar::rat(1, 3)]).unwrap();
        assert_eq!(v, Scalar::rat(5, 6));
        let p21 = m(2, &[2, 1]);
        assert_eq!(p21.evaluate(&[Scalar::one(), Scalar::one()]).unwrap(), Scalar::from_int(2));
        assert!(p21.evaluate(&[Scalar::one()]).is_err());
    }

    #[test]
    fn evaluate_is_symmetric() {
        let p = m(3, &[3, 1]).add(&m(3, &[2, 2]).scale(&Scalar::rat(2, 5))).unwrap();
        let pt = [Scalar::rat(2, 3), Scalar::rat(-1, 4), Scalar::rat(7, 5)];
        let perm = [pt[2].clone(), pt[0].clone(), pt[1].clone()];
        assert_eq!(p.evaluate(&pt).unwrap(), p.evaluate(&perm).unwrap());
    }

    #[test]
    fn degree_cap_enforced() {
        let p = m(2, &[7]);
        assert!(matches!(
            p.multiply(&m(2, &[6])),
            Err(QtError::DegreeCap { degree: 13, cap: 12 })
        ));
    }

    #[test]
    fn distinct_permutations_count() {
        assert_eq!(distinct_permutations(&[2, 1, 0]).len(), 6);
        assert_eq!(distinct_permutations(&[1, 1, 0]).len(), 3);
        assert_eq!(distinct_permutations(&[0, 0, 0]).len(), 1);
    }
}
