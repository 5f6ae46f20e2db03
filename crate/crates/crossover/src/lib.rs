//! Antisymmetric Hermitian random matrices interpolating between the chiral
//! Gaussian orthogonal ensemble (`a -> 0`) and the Gaussian antisymmetric
//! orthogonal ensemble (`a -> 1`).
//!
//! The eigenvalues form a Pfaffian point process. This crate builds its
//! skew-orthogonal polynomials, kernels and correlation functions, and checks
//! them against brute-force integration of the joint density and against
//! Monte Carlo sampling of the matrix models.
//!
//! Module layout, bottom up:
//!
//! * [`linalg`], [`special`], [`quad`]: numerical building blocks
//! * [`weights`]: one- and two-point weights `g`, `G` and their derived forms
//! * [`profile`]: Gaussian-smoothed polynomial profiles used for stable
//!   skew products and transforms
//! * [`sop`]: skew-orthogonal polynomials and their norms
//! * [`kernels`]: kernel entries and correlation functions
//! * [`dd`], [`extended`]: double-double arithmetic and the kernel data
//!   built with it, used close to `a = 1`
//! * [`jpdf`]: joint density and brute-force marginals
//! * [`ensemble`]: matrix samplers and histograms
//! * [`suite`]: named validation suites
//! * [`cli`]: command line front end

// `!(x > 0.0)` style guards reject NaN along with out-of-range values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod dd;
pub mod ensemble;
pub mod error;
pub mod extended;
pub mod jpdf;
pub mod kernels;
pub mod linalg;
pub mod profile;
pub mod quad;
pub mod sop;
pub mod special;
pub mod suite;
pub mod weights;

pub use error::{Error, Result};

/// Number of exact zero modes, `nu = N - 2n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Nu {
    Zero,
    One,
}

impl Nu {
    pub fn value(self) -> usize {
        match self {
            Nu::Zero => 0,
            Nu::One => 1,
        }
    }

    pub fn as_f64(self) -> f64 {
        self.value() as f64
    }
}

impl TryFrom<usize> for Nu {
    type Error = Error;
    fn try_from(v: usize) -> Result<Nu> {
        match v {
            0 => Ok(Nu::Zero),
            1 => Ok(Nu::One),
            _ => Err(Error::domain(format!("nu must be 0 or 1, got {v}"))),
        }
    }
}

impl std::fmt::Display for Nu {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.value())
    }
}
