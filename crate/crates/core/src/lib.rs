//! (q,t)-deformed hypergeometric N-particle ensembles: polynomial families,
//! lattice measures, and their classical beta-ensemble degenerations.
//!
//! The crate is organized bottom-up:
//!
//! - [`scalar`]: the exact-rational / Gaussian-rational / high-precision
//!   float number tower everything runs on;
//! - [`partitions`]: Young diagrams and reverse semistandard tableaux;
//! - [`qspecial`]: q-Pochhammers, theta functions, the quasi-constant
//!   psi_tau, and the closed-form one-particle normalization;
//! - [`sympoly`]: sparse symmetric polynomials in the monomial basis;
//! - [`polyfamilies`]: Macdonald, A-type interpolation, and BC-type
//!   interpolation polynomials, with independent oracles;
//! - [`bigqjacobi`]: expansion coefficients (sigma, binomial, rho, pi) and
//!   the multivariate big q-Jacobi polynomials;
//! - [`ensembles`]: the two-sided q-lattice, configuration spaces, measure
//!   weights, normalization, orthogonality checks, sampling, and a large-N
//!   convergence probe;
//! - [`degenerations`]: discrete beta ensembles with stochastic links, the
//!   continuous s-measures with the Dixon–Anderson kernel, and the q→1
//!   limit checks.
//!
//! The `parallel` feature (on by default) backs the lattice sums and
//! verification sweeps with rayon; without it everything runs sequentially
//! through the same entry points.

pub mod bigqjacobi;
pub mod degenerations;
pub mod ensembles;
pub mod error;
pub mod gamma;
pub mod hp;
pub mod parallel;
pub mod partitions;
pub mod polyfamilies;
pub mod qspecial;
pub mod quadrature;
pub mod scalar;
pub mod sympoly;

pub use error::{QtError, Result};
pub use partitions::Partition;
pub use scalar::{Scalar, Tolerance};
pub use sympoly::SymmetricPolynomial;
