//! Gauss–Jacobi quadrature by Golub–Welsch.
//!
//! Rules integrate ∫_{-1}^{1} (1-x)^α (1+x)^β f(x) dx = Σ w_i f(x_i) for a
//! smooth f with α, β > -1, which absorbs the |v-u|^(τ-1) endpoint
//! singularities of the interlacing kernels. Nodes and weights come from
//! the eigendecomposition of the Jacobi recurrence matrix; the first
//! eigenvector component squared times the zeroth moment gives the weight.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{QtError, Result};
use crate::gamma::lgamma_real;

#[derive(Debug, Clone)]
pub struct QuadratureRule {
    pub alpha: f64,
    pub beta: f64,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// Gauss–Jacobi rule with `n` nodes for the weight (1-x)^α (1+x)^β.
pub fn gauss_jacobi(n: usize, alpha: f64, beta: f64) -> Result<QuadratureRule> {
    if n < 1 {
        return Err(QtError::Config("quadrature needs at least one node".into()));
    }
    if alpha <= -1.0 || beta <= -1.0 {
        return Err(QtError::Domain("Gauss-Jacobi needs alpha, beta > -1".into()));
    }
    let (a, b) = (alpha, beta);
    let diag = |k: usize| -> f64 {
        if k == 0 {
            if a + b + 2.0 == 0.0 {
                0.0
            } else {
                (b - a) / (a + b + 2.0)
            }
        } else {
            let k = k as f64;
            let d = (2.0 * k + a + b) * (2.0 * k + a + b + 2.0);
            (b * b - a * a) / d
        }
    };
    // off-diagonal e_k, k = 1..n-1; the k = 1 case uses the cancelled form
    // valid at a + b = -1
    let offdiag = |k: usize| -> f64 {
        let kf = k as f64;
        let sq = if k == 1 {
            4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + a + b).powi(2) * (3.0 + a + b))
        } else {
            4.0 * kf * (kf + a) * (kf + b) * (kf + a + b)
                / ((2.0 * kf + a + b).powi(2) * (2.0 * kf + a + b + 1.0) * (2.0 * kf + a + b - 1.0))
        };
        sq.sqrt()
    };
    let mut m = DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        m[(k, k)] = diag(k);
        if k + 1 < n {
            let e = offdiag(k + 1);
            m[(k, k + 1)] = e;
            m[(k + 1, k)] = e;
        }
    }
    let eig = SymmetricEigen::new(m);
    // zeroth moment 2^(a+b+1) Γ(a+1) Γ(b+1) / Γ(a+b+2)
    let mu0 = ((a + b + 1.0) * 2f64.ln() + lgamma_real(a + 1.0) + lgamma_real(b + 1.0)
        - lgamma_real(a + b + 2.0))
        .exp();
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| (eig.eigenvalues[i], mu0 * eig.eigenvectors[(0, i)].powi(2)))
        .collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    Ok(QuadratureRule {
        alpha,
        beta,
        nodes: pairs.iter().map(|p| p.0).collect(),
        weights: pairs.iter().map(|p| p.1).collect(),
    })
}

pub fn gauss_legendre(n: usize) -> Result<QuadratureRule> {
    gauss_jacobi(n, 0.0, 0.0)
}

impl QuadratureRule {
    /// ∫_a^b (b-x)^α (x-a)^β f(x) dx with f the smooth part.
    pub fn integrate_weighted<F: Fn(f64) -> f64>(&self, a: f64, b: f64, f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let scale = half.powf(self.alpha + self.beta + 1.0);
        scale
            * self
                .nodes
                .iter()
                .zip(&self.weights)
                .map(|(&x, &w)| w * f(mid + half * x))
                .sum::<f64>()
    }

    /// Plain ∫_a^b f(x) dx; requires an α = β = 0 rule.
    pub fn integrate<F: Fn(f64) -> f64>(&self, a: f64, b: f64, f: F) -> f64 {
        debug_assert!(self.alpha == 0.0 && self.beta == 0.0);
        self.integrate_weighted(a, b, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_polynomial_exactness() {
        let rule = gauss_legendre(8).unwrap();
        // degree-15 polynomial integrated exactly
        let v = rule.integrate(0.0, 2.0, |x| x.powi(15) - 3.0 * x.powi(7) + x);
        let exact = 2f64.powi(16) / 16.0 - 3.0 * 2f64.powi(8) / 8.0 + 2.0;
        assert!((v - exact).abs() < 1e-9 * exact.abs());
    }

    #[test]
    fn jacobi_moments() {
        // ∫_{-1}^{1} (1-x)^(-1/2) (1+x)^(-1/2) dx = π (Chebyshev case, a+b = -1)
        let rule = gauss_jacobi(12, -0.5, -0.5).unwrap();
        let v = rule.integrate_weighted(-1.0, 1.0, |_| 1.0);
        assert!((v - std::f64::consts::PI).abs() < 1e-12);
        // ∫_0^1 x^(1/2) (1-x)^(1/2) dx = π/8
        let rule2 = gauss_jacobi(12, 0.5, 0.5).unwrap();
        let v2 = rule2.integrate_weighted(0.0, 1.0, |_| 1.0);
        assert!((v2 - std::f64::consts::PI / 8.0).abs() < 1e-12);
    }

    #[test]
    fn singular_endpoint_with_smooth_part() {
        // ∫_{-1}^1 sin(x) / (1+x)^(1/3) dx, singularity at x = -1
        let rule = gauss_jacobi(24, 0.0, -1.0 / 3.0).unwrap();
        let v = rule.integrate_weighted(-1.0, 1.0, f64::sin);
        assert!((v - -0.420_798_774_650_082_9).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(gauss_jacobi(4, -1.0, 0.0).is_err());
        assert!(gauss_jacobi(0, 0.0, 0.0).is_err());
    }
}
