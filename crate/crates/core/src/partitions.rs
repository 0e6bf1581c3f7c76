//! Partitions, Young-diagram combinatorics, and reverse semistandard
//! tableaux — the indexing layer beneath every polynomial family.
//!
//! Partitions are value objects: weakly decreasing parts with trailing
//! zeros stripped at construction, so (2,1,0) = (2,1). Tableau enumeration
//! is lazy; each consumer opens its own stream.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{QtError, Result};
use crate::scalar::Scalar;

/// An integer partition λ₁ ≥ λ₂ ≥ … ≥ λₖ > 0, identified with its Young
/// diagram. Serializes as a JSON array of integers, e.g. `[3,1]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct Partition(Vec<u32>);

impl TryFrom<Vec<u32>> for Partition {
    type Error = QtError;
    fn try_from(v: Vec<u32>) -> Result<Self> {
        Partition::new(v)
    }
}

impl From<Partition> for Vec<u32> {
    fn from(p: Partition) -> Vec<u32> {
        p.0
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, p) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

impl Partition {
    /// Build from weakly decreasing parts; trailing zeros are stripped.
    pub fn new(parts: Vec<u32>) -> Result<Self> {
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(QtError::Index(format!("parts not weakly decreasing: {parts:?}")));
        }
        let mut parts = parts;
        while parts.last() == Some(&0) {
            parts.pop();
        }
        Ok(Partition(parts))
    }

    pub fn empty() -> Self {
        Partition(Vec::new())
    }

    /// Shorthand used throughout the tests.
    pub fn of(parts: &[u32]) -> Self {
        Partition::new(parts.to_vec()).expect("valid partition literal")
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    /// Number of nonzero parts ℓ(λ).
    pub fn length(&self) -> usize {
        self.0.len()
    }

    /// |λ| = number of boxes.
    pub fn size(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// λᵢ with 1-based `i`, zero beyond the length.
    pub fn part(&self, i: usize) -> u32 {
        if i == 0 || i > self.0.len() {
            0
        } else {
            self.0[i - 1]
        }
    }

    /// n(λ) = Σ (i-1) λᵢ.
    pub fn n_stat(&self) -> u64 {
        self.0.iter().enumerate().map(|(i, &p)| i as u64 * p as u64).sum()
    }

    /// Transpose (column lengths); an involution.
    pub fn transpose(&self) -> Partition {
        if self.0.is_empty() {
            return Partition::empty();
        }
        let cols = self.0[0] as usize;
        let parts = (0..cols)
            .map(|j| self.0.iter().filter(|&&p| p as usize > j).count() as u32)
            .collect();
        Partition(parts)
    }

    /// True iff μᵢ ≤ λᵢ for all i (diagram containment).
    pub fn contains(&self, mu: &Partition) -> bool {
        mu.0.iter().enumerate().all(|(i, &m)| m <= self.part(i + 1))
    }

    /// Boxes (i, j), 1-based, row-major.
    pub fn boxes(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.0
            .iter()
            .enumerate()
            .flat_map(|(i, &p)| (1..=p as usize).map(move |j| (i + 1, j)))
    }

    /// Arm length a(i,j) = λᵢ - j (1-based box inside the diagram).
    pub fn arm(&self, i: usize, j: usize) -> u32 {
        self.part(i) - j as u32
    }

    /// Leg length l(i,j) = λ'ⱼ - i.
    pub fn leg(&self, i: usize, j: usize) -> u32 {
        self.0.iter().filter(|&&p| p as usize >= j).count() as u32 - i as u32
    }

    /// Dominance partial order on partitions of equal size; `None` when
    /// incomparable or of different sizes.
    pub fn dominance_cmp(&self, other: &Partition) -> Option<Ordering> {
        if self.size() != other.size() {
            return None;
        }
        let n = self.0.len().max(other.0.len());
        let (mut a, mut b) = (0u64, 0u64);
        let mut le = true;
        let mut ge = true;
        for i in 1..=n {
            a += self.part(i) as u64;
            b += other.part(i) as u64;
            le &= a <= b;
            ge &= a >= b;
        }
        match (le, ge) {
            (true, true) => Some(Ordering::Equal),
            (false, true) => Some(Ordering::Greater),
            (true, false) => Some(Ordering::Less),
            (false, false) => None,
        }
    }

    /// All partitions μ ⊆ λ.
    pub fn subpartitions(&self) -> Vec<Partition> {
        Partition::interval(&Partition::empty(), self)
    }

    /// All μ with lo ⊆ μ ⊆ hi (empty when lo ⊄ hi).
    pub fn interval(lo: &Partition, hi: &Partition) -> Vec<Partition> {
        if !hi.contains(lo) {
            return Vec::new();
        }
        let mut out = Vec::new();
        let mut cur: Vec<u32> = Vec::new();
        fn rec(cur: &mut Vec<u32>, lo: &Partition, hi: &Partition, row: usize, out: &mut Vec<Partition>) {
            if row > hi.length() {
                out.push(Partition(cur.iter().copied().filter(|&p| p > 0).collect()));
                return;
            }
            let prev = if row == 1 { u32::MAX } else { cur[row - 2] };
            let top = hi.part(row).min(prev);
            let bot = lo.part(row);
            for p in (bot..=top).rev() {
                cur.push(p);
                rec(cur, lo, hi, row + 1, out);
                cur.pop();
            }
        }
        rec(&mut cur, lo, hi, 1, &mut out);
        out
    }

    /// All partitions of size exactly `n`.
    pub fn all_of_size(n: u32) -> Vec<Partition> {
        let mut out = Vec::new();
        let mut cur = Vec::new();
        fn rec(rem: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Partition>) {
            if rem == 0 {
                out.push(Partition(cur.clone()));
                return;
            }
            let hi = rem.min(max);
            for p in (1..=hi).rev() {
                cur.push(p);
                rec(rem - p, p, cur, out);
                cur.pop();
            }
        }
        rec(n, n, &mut cur, &mut out);
        out
    }

    /// All partitions with size ≤ `max_size` (optionally length-capped).
    pub fn all_up_to(max_size: u32, max_len: Option<usize>) -> Vec<Partition> {
        (0..=max_size)
            .flat_map(Partition::all_of_size)
            .filter(|p| max_len.is_none_or(|l| p.length() <= l))
            .collect()
    }
}

// --- reverse semistandard tableaux ------------------------------------------

/// A reverse semistandard tableau: entries weakly decrease along rows and
/// strictly decrease down columns, values in {1, …, N}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReverseTableau {
    shape: Partition,
    /// Row-major entries, one per box.
    entries: Vec<u32>,
}

impl ReverseTableau {
    pub fn shape(&self) -> &Partition {
        &self.shape
    }

    /// Entry at 1-based (i, j).
    pub fn entry(&self, i: usize, j: usize) -> u32 {
        let offset: usize = self.shape.parts()[..i - 1].iter().map(|&p| p as usize).sum();
        self.entries[offset + j - 1]
    }

    /// Boxes with their entries, row-major, 1-based coordinates.
    pub fn iter_boxes(&self) -> impl Iterator<Item = (usize, usize, u32)> + '_ {
        self.shape.boxes().zip(self.entries.iter()).map(|((i, j), &v)| (i, j, v))
    }

    /// Content vector: e[v-1] = #boxes with entry v.
    pub fn content(&self, n: usize) -> Vec<u32> {
        let mut e = vec![0u32; n];
        for &v in &self.entries {
            e[v as usize - 1] += 1;
        }
        e
    }
}

/// Lazy stream over all reverse tableaux of the given shape with entries in
/// {1, …, N}. Empty iff ℓ(μ) > N.
pub fn enumerate_reverse_tableaux(shape: &Partition, n: usize) -> ReverseTableauIter {
    ReverseTableauIter {
        shape: shape.clone(),
        boxes: shape.boxes().collect(),
        n: n as u32,
        stack: Vec::new(),
        started: false,
    }
}

pub struct ReverseTableauIter {
    shape: Partition,
    boxes: Vec<(usize, usize)>,
    n: u32,
    /// Entries chosen so far (DFS stack).
    stack: Vec<u32>,
    started: bool,
}

impl ReverseTableauIter {
    /// Largest admissible entry at box `idx` given the current stack.
    fn upper_bound(&self, idx: usize) -> u32 {
        let (i, j) = self.boxes[idx];
        let mut hi = self.n;
        if j > 1 {
            hi = hi.min(self.entry_at(i, j - 1));
        }
        if i > 1 {
            hi = hi.min(self.entry_at(i - 1, j) - 1);
        }
        hi
    }

    fn entry_at(&self, i: usize, j: usize) -> u32 {
        let offset: usize = self.shape.parts()[..i - 1].iter().map(|&p| p as usize).sum();
        self.stack[offset + j - 1]
    }

    /// Extend the stack to a full tableau, choosing the largest value at
    /// each box; returns false when impossible.
    fn extend_max(&mut self) -> bool {
        while self.stack.len() < self.boxes.len() {
            let hi = self.upper_bound(self.stack.len());
            if hi == 0 {
                return false;
            }
            self.stack.push(hi);
        }
        true
    }
}

impl Iterator for ReverseTableauIter {
    type Item = ReverseTableau;

    fn next(&mut self) -> Option<ReverseTableau> {
        if !self.started {
            self.started = true;
            if self.shape.length() > self.n as usize {
                return None;
            }
            if !self.extend_max() {
                return None;
            }
            return Some(ReverseTableau { shape: self.shape.clone(), entries: self.stack.clone() });
        }
        // backtrack: decrement the last box that can still go down
        loop {
            let v = self.stack.pop()?;
            if v > 1 {
                self.stack.push(v - 1);
                if self.extend_max() {
                    return Some(ReverseTableau {
                        shape: self.shape.clone(),
                        entries: self.stack.clone(),
                    });
                }
                // extension failed; keep backtracking through the partial stack
            }
        }
    }
}

// --- tableau weights ---------------------------------------------------------

/// b_λ(s) = (1 - q^a t^(l+1)) / (1 - q^(a+1) t^l) for a box s ∈ λ.
fn b_factor(lam: &Partition, i: usize, j: usize, q: &Scalar, t: &Scalar) -> Result<Scalar> {
    let a = lam.arm(i, j) as i64;
    let l = lam.leg(i, j) as i64;
    let one = Scalar::one();
    let num = &one - &(&q.powi(a)? * &t.powi(l + 1)?);
    let den = &one - &(&q.powi(a + 1)? * &t.powi(l)?);
    num.try_div(&den)
}

/// ψ_{λ/μ}(q,t) for a horizontal strip λ/μ: product of b_μ(s)/b_λ(s) over
/// boxes s of μ in rows meeting the strip but columns not meeting it
/// (Macdonald VI (6.24)(ii)).
pub fn psi_strip(lam: &Partition, mu: &Partition, q: &Scalar, t: &Scalar) -> Result<Scalar> {
    let in_mu = |i: usize, j: usize| mu.part(i) as usize >= j;
    let mut rows = vec![false; lam.length() + 1];
    let mut cols = vec![false; lam.part(1) as usize + 1];
    for (i, j) in lam.boxes() {
        if !in_mu(i, j) {
            rows[i] = true;
            cols[j] = true;
        }
    }
    let mut val = Scalar::one();
    for (i, j) in mu.boxes() {
        if rows[i] && !cols[j] {
            let num = b_factor(mu, i, j, q, t)?;
            let den = b_factor(lam, i, j, q, t)?;
            val = &val * &num.try_div(&den)?;
        }
    }
    Ok(val)
}

/// ψ_T(q,t): the weight of a reverse tableau in the combinatorial formula,
/// obtained as the product of one-strip weights over the level-set chain
/// (boxes with entry ≥ N+1-k, k = 1..N).
pub fn tableau_weight(tab: &ReverseTableau, n: usize, q: &Scalar, t: &Scalar) -> Result<Scalar> {
    if q.is_zero() || t.is_zero() {
        return Err(QtError::Domain("tableau_weight needs nonzero q, t".into()));
    }
    let shape = tab.shape();
    let mut val = Scalar::one();
    let mut prev = Partition::empty();
    for k in 1..=n {
        let thresh = (n + 1 - k) as u32;
        let rows: Vec<u32> = (1..=shape.length())
            .map(|i| (1..=shape.part(i) as usize).filter(|&j| tab.entry(i, j) >= thresh).count() as u32)
            .take_while(|&c| c > 0)
            .collect();
        let cur = Partition::new(rows)?;
        if cur != prev {
            val = &val * &psi_strip(&cur, &prev, q, t)?;
        }
        prev = cur;
    }
    Ok(val)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn n_stat_examples() {
        assert_eq!(Partition::empty().n_stat(), 0);
        assert_eq!(Partition::of(&[3]).n_stat(), 0);
        assert_eq!(Partition::of(&[2, 2, 1]).n_stat(), 4);
    }

    #[test]
    fn transpose_examples() {
        assert_eq!(Partition::empty().transpose(), Partition::empty());
        assert_eq!(Partition::of(&[3, 1]).transpose(), Partition::of(&[2, 1, 1]));
    }

    #[test]
    fn transpose_involution_exhaustive() {
        for n in 0..=8 {
            for lam in Partition::all_of_size(n) {
                assert_eq!(lam.transpose().transpose(), lam);
            }
        }
    }

    #[test]
    fn contains_examples() {
        let l21 = Partition::of(&[2, 1]);
        assert!(l21.contains(&Partition::of(&[1, 1])));
        assert!(!l21.contains(&Partition::of(&[3])));
        assert!(l21.contains(&l21));
    }

    #[test]
    fn containment_antisymmetry() {
        for n in 0..=5 {
            for a in Partition::all_of_size(n) {
                for m in 0..=5 {
                    for b in Partition::all_of_size(m) {
                        if a.contains(&b) && b.contains(&a) {
                            assert_eq!(a, b);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn normalization_strips_zeros() {
        assert_eq!(Partition::new(vec![2, 1, 0, 0]).unwrap(), Partition::of(&[2, 1]));
        assert!(Partition::new(vec![1, 2]).is_err());
    }

    #[test]
    fn tableau_enumeration_small() {
        let count = |mu: &[u32], n: usize| enumerate_reverse_tableaux(&Partition::of(mu), n).count();
        assert_eq!(count(&[1], 2), 2);
        assert_eq!(count(&[1, 1], 2), 1);
        assert_eq!(count(&[2], 2), 3);
        // l(mu) > N gives the empty stream
        assert_eq!(count(&[1, 1, 1], 2), 0);
    }

    #[test]
    fn tableau_entries_valid() {
        let mu = Partition::of(&[2, 1]);
        for t in enumerate_reverse_tableaux(&mu, 3) {
            for (i, j, v) in t.iter_boxes() {
                assert!((1..=3).contains(&v));
                if j > 1 {
                    assert!(t.entry(i, j - 1) >= v);
                }
                if i > 1 {
                    assert!(t.entry(i - 1, j) > v);
                }
            }
        }
    }

    /// Brute-force ordinary semistandard count; the reverse count must match
    /// via the bijection i ↦ N+1−i.
    fn ssyt_count(shape: &Partition, n: usize) -> usize {
        let boxes: Vec<(usize, usize)> = shape.boxes().collect();
        fn rec(idx: usize, boxes: &[(usize, usize)], fill: &mut Vec<u32>, shape: &Partition, n: u32) -> usize {
            if idx == boxes.len() {
                return 1;
            }
            let (i, j) = boxes[idx];
            let offset = |i: usize| -> usize { shape.parts()[..i - 1].iter().map(|&p| p as usize).sum() };
            let mut lo = 1;
            if j > 1 {
                lo = lo.max(fill[offset(i) + j - 2]);
            }
            if i > 1 {
                lo = lo.max(fill[offset(i - 1) + j - 1] + 1);
            }
            let mut total = 0;
            for v in lo..=n {
                fill.push(v);
                total += rec(idx + 1, boxes, fill, shape, n);
                fill.pop();
            }
            total
        }
        rec(0, &boxes, &mut Vec::new(), shape, n as u32)
    }

    #[test]
    fn reverse_count_equals_ssyt_count() {
        for size in 0..=5 {
            for mu in Partition::all_of_size(size) {
                for n in 1..=4 {
                    assert_eq!(
                        enumerate_reverse_tableaux(&mu, n).count(),
                        ssyt_count(&mu, n),
                        "shape {mu} N={n}"
                    );
                }
            }
        }
    }

    #[test]
    fn column_shape_weight_is_one() {
        let q = Scalar::rat(1, 2);
        let t = Scalar::rat(1, 3);
        for k in 1..=4 {
            let mu = Partition::new(vec![1; k]).unwrap();
            let tabs: Vec<_> = enumerate_reverse_tableaux(&mu, k).collect();
            assert_eq!(tabs.len(), 1);
            assert_eq!(tableau_weight(&tabs[0], k, &q, &t).unwrap(), Scalar::one());
        }
    }
}
