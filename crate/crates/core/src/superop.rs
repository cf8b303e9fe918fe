//! Linear maps B → B in the canonical matrix-unit basis.
//!
//! A superoperator is stored as a D×D complex matrix acting on coordinate
//! vectors. Since the matrix units are orthonormal for the Hilbert-Schmidt
//! inner product, the 2-norm of this matrix is the operator norm with respect
//! to the Hilbert-Schmidt norm on B; that is the norm used in all residuals.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::algebra::{hermitian_eigenvalues, Algebra, AlgebraElement};
use crate::error::{Error, Result};

/// A linear map B → B.
#[derive(Debug, Clone)]
pub struct SuperOperator {
    algebra: Algebra,
    matrix: DMatrix<Complex64>,
}

impl SuperOperator {
    /// Wraps a D×D coordinate matrix.
    pub fn from_matrix(algebra: &Algebra, matrix: DMatrix<Complex64>) -> Result<Self> {
        let dim = algebra.dim();
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: matrix.nrows(),
            });
        }
        Ok(Self {
            algebra: algebra.clone(),
            matrix,
        })
    }

    /// Builds the matrix of a map by applying it to every basis element.
    pub fn from_fn(algebra: &Algebra, f: impl Fn(&AlgebraElement) -> AlgebraElement) -> Self {
        let dim = algebra.dim();
        let mut matrix = DMatrix::zeros(dim, dim);
        for p in 0..dim {
            let col = f(&algebra.basis_element(p)).to_coords();
            matrix.column_mut(p).copy_from(&col);
        }
        Self {
            algebra: algebra.clone(),
            matrix,
        }
    }

    pub fn identity(algebra: &Algebra) -> Self {
        Self {
            algebra: algebra.clone(),
            matrix: DMatrix::identity(algebra.dim(), algebra.dim()),
        }
    }

    pub fn zero(algebra: &Algebra) -> Self {
        Self {
            algebra: algebra.clone(),
            matrix: DMatrix::zeros(algebra.dim(), algebra.dim()),
        }
    }

    /// The map b ↦ a·b.
    pub fn left_mult(a: &AlgebraElement) -> Self {
        Self::from_fn(a.algebra(), |b| a.mul(b))
    }

    /// The map b ↦ b·a.
    pub fn right_mult(a: &AlgebraElement) -> Self {
        Self::from_fn(a.algebra(), |b| b.mul(a))
    }

    /// The conjugation b ↦ x*·b·x (a completely positive map).
    pub fn conjugation(x: &AlgebraElement) -> Self {
        let xa = x.adjoint();
        Self::from_fn(x.algebra(), |b| xa.mul(b).mul(x))
    }

    pub fn algebra(&self) -> &Algebra {
        &self.algebra
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn apply(&self, b: &AlgebraElement) -> AlgebraElement {
        AlgebraElement::from_coords(&self.algebra, &(&self.matrix * b.to_coords()))
            .expect("coordinate dimension is fixed by the algebra")
    }

    /// self ∘ other.
    pub fn compose(&self, other: &Self) -> Self {
        Self {
            algebra: self.algebra.clone(),
            matrix: &self.matrix * &other.matrix,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            algebra: self.algebra.clone(),
            matrix: &self.matrix + &other.matrix,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            algebra: self.algebra.clone(),
            matrix: &self.matrix - &other.matrix,
        }
    }

    pub fn scale(&self, z: Complex64) -> Self {
        Self {
            algebra: self.algebra.clone(),
            matrix: &self.matrix * z,
        }
    }

    /// n-fold composition by binary exponentiation.
    pub fn power(&self, n: usize) -> Self {
        let mut result = Self::identity(&self.algebra);
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                result = result.compose(&base);
            }
            base = base.compose(&base);
            n >>= 1;
        }
        result
    }

    /// exp(t·L) by scaling and squaring with Padé approximants.
    pub fn exp(&self, t: f64) -> Result<Self> {
        if !t.is_finite() {
            return Err(Error::InvalidTime(t));
        }
        let scaled = &self.matrix * Complex64::new(t, 0.0);
        Ok(Self {
            algebra: self.algebra.clone(),
            matrix: scaled.exp(),
        })
    }

    /// Operator norm with respect to the Hilbert-Schmidt norm on B.
    pub fn norm(&self) -> f64 {
        if self.matrix.nrows() == 0 {
            0.0
        } else {
            self.matrix.clone().singular_values().max()
        }
    }

    pub fn distance(&self, other: &Self) -> f64 {
        self.sub(other).norm()
    }

    /// Residual of T(b*) = T(b)* over the matrix-unit basis.
    pub fn hermiticity_residual(&self) -> f64 {
        (0..self.algebra.dim())
            .map(|p| {
                let u = self.algebra.basis_element(p);
                self.apply(&u.adjoint()).distance(&self.apply(&u).adjoint())
            })
            .fold(0.0, f64::max)
    }

    /// Whether T preserves hermiticity within `tol` (relative to max(1, ||T||)).
    pub fn is_hermiticity_preserving(&self, tol: f64) -> bool {
        self.hermiticity_residual() <= tol * self.norm().max(1.0)
    }

    /// The Choi-type block matrix [T(u_p*·u_q)]_{p,q} over the matrix-unit
    /// basis, flattened to a scalar matrix via B ⊂ M_d(ℂ).
    pub fn choi_matrix(&self) -> DMatrix<Complex64> {
        let dim = self.algebra.dim();
        let d = self.algebra.flat_dim();
        let mut choi = DMatrix::zeros(dim * d, dim * d);
        for p in 0..dim {
            let up = self.algebra.basis_element(p).adjoint();
            for q in 0..dim {
                let uq = self.algebra.basis_element(q);
                let val = self.apply(&up.mul(&uq)).to_flat();
                choi.view_mut((p * d, q * d), (d, d)).copy_from(&val);
            }
        }
        choi
    }

    /// Complete positivity: the flattened Choi-type matrix is positive
    /// semidefinite to within `tol` relative to its largest eigenvalue
    /// magnitude.
    ///
    /// Requires hermiticity preservation first; a violation is an error, not
    /// a `false`.
    pub fn is_completely_positive(&self, tol: f64) -> Result<bool> {
        let residual = self.hermiticity_residual();
        if residual > 1e-9 * self.norm().max(1.0) {
            return Err(Error::NotHermiticityPreserving { residual });
        }
        let eig = hermitian_eigenvalues(&self.choi_matrix());
        let scale = eig.iter().fold(0.0f64, |m, &l| m.max(l.abs()));
        Ok(eig.iter().all(|&l| l >= -tol * scale))
    }
}
