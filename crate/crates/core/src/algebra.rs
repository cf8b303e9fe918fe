//! Finite-dimensional unital C*-algebras B = ⊕_k M_{d_k}(ℂ) and their elements.
//!
//! Every inner product in this crate takes values in such an algebra. The
//! canonical linear basis of B is the family of matrix units, ordered block by
//! block and row-major within each block; all coordinate vectors and
//! superoperator matrices refer to this fixed ordering, which makes
//! serialization bit-reproducible.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// A finite direct sum of complex matrix blocks with conjugate-transpose
/// involution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Algebra {
    block_sizes: Vec<usize>,
}

impl Algebra {
    /// Creates the algebra ⊕_k M_{d_k}(ℂ). At least one block of positive
    /// size is required.
    pub fn new(block_sizes: Vec<usize>) -> Result<Self> {
        if block_sizes.is_empty() {
            return Err(Error::InvalidDescriptor(
                "algebra needs at least one block".into(),
            ));
        }
        if block_sizes.contains(&0) {
            return Err(Error::InvalidDescriptor(
                "algebra block sizes must be positive".into(),
            ));
        }
        Ok(Self { block_sizes })
    }

    /// The scalar algebra ℂ = M_1.
    pub fn scalar() -> Self {
        Self {
            block_sizes: vec![1],
        }
    }

    /// Full matrix algebra M_d.
    pub fn full_matrix(d: usize) -> Self {
        Self {
            block_sizes: vec![d],
        }
    }

    pub fn block_sizes(&self) -> &[usize] {
        &self.block_sizes
    }

    pub fn num_blocks(&self) -> usize {
        self.block_sizes.len()
    }

    /// Linear dimension D = Σ d_k² of the algebra.
    pub fn dim(&self) -> usize {
        self.block_sizes.iter().map(|d| d * d).sum()
    }

    /// Side length d = Σ d_k of the block-diagonal embedding B ⊂ M_d(ℂ).
    pub fn flat_dim(&self) -> usize {
        self.block_sizes.iter().sum()
    }

    /// Starting coordinate of block `k` in the matrix-unit basis.
    pub fn basis_offset(&self, block: usize) -> usize {
        self.block_sizes[..block].iter().map(|d| d * d).sum()
    }

    /// Starting row/column of block `k` in the flat embedding.
    pub fn flat_offset(&self, block: usize) -> usize {
        self.block_sizes[..block].iter().sum()
    }

    /// Decomposes a basis index into (block, row, col).
    pub fn basis_position(&self, p: usize) -> (usize, usize, usize) {
        let mut rest = p;
        for (k, &d) in self.block_sizes.iter().enumerate() {
            if rest < d * d {
                return (k, rest / d, rest % d);
            }
            rest -= d * d;
        }
        panic!(
            "basis index {p} out of range for algebra of dimension {}",
            self.dim()
        );
    }

    /// The matrix unit with basis index `p`.
    pub fn basis_element(&self, p: usize) -> AlgebraElement {
        let (k, i, j) = self.basis_position(p);
        let mut e = AlgebraElement::zero(self);
        e.blocks[k][(i, j)] = Complex64::new(1.0, 0.0);
        e
    }

    /// The unit element (identity in every block).
    pub fn unit(&self) -> AlgebraElement {
        AlgebraElement {
            algebra: self.clone(),
            blocks: self
                .block_sizes
                .iter()
                .map(|&d| DMatrix::identity(d, d))
                .collect(),
        }
    }

    pub fn zero(&self) -> AlgebraElement {
        AlgebraElement::zero(self)
    }

    pub(crate) fn check_same(&self, other: &Algebra) -> Result<()> {
        if self != other {
            return Err(Error::AlgebraMismatch {
                left: self.block_sizes.clone(),
                right: other.block_sizes.clone(),
            });
        }
        Ok(())
    }
}

/// An element of B, stored as one complex matrix per block.
#[derive(Debug, Clone)]
pub struct AlgebraElement {
    algebra: Algebra,
    blocks: Vec<DMatrix<Complex64>>,
}

impl AlgebraElement {
    pub fn zero(algebra: &Algebra) -> Self {
        Self {
            algebra: algebra.clone(),
            blocks: algebra
                .block_sizes()
                .iter()
                .map(|&d| DMatrix::zeros(d, d))
                .collect(),
        }
    }

    /// Builds an element from per-block matrices, validating the shapes.
    pub fn from_blocks(algebra: &Algebra, blocks: Vec<DMatrix<Complex64>>) -> Result<Self> {
        if blocks.len() != algebra.num_blocks() {
            return Err(Error::DimensionMismatch {
                expected: algebra.num_blocks(),
                found: blocks.len(),
            });
        }
        for (b, &d) in blocks.iter().zip(algebra.block_sizes()) {
            if b.nrows() != d || b.ncols() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: b.nrows().max(b.ncols()),
                });
            }
            if b.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::InvalidDescriptor(
                    "algebra element has non-finite entries".into(),
                ));
            }
        }
        Ok(Self {
            algebra: algebra.clone(),
            blocks,
        })
    }

    /// Scalar multiple of the unit.
    pub fn scalar(algebra: &Algebra, z: Complex64) -> Self {
        let mut e = algebra.unit();
        for b in &mut e.blocks {
            *b *= z;
        }
        e
    }

    pub fn algebra(&self) -> &Algebra {
        &self.algebra
    }

    pub fn blocks(&self) -> &[DMatrix<Complex64>] {
        &self.blocks
    }

    pub fn block(&self, k: usize) -> &DMatrix<Complex64> {
        &self.blocks[k]
    }

    /// Coordinates in the canonical matrix-unit basis (row-major per block).
    pub fn to_coords(&self) -> DVector<Complex64> {
        let mut v = DVector::zeros(self.algebra.dim());
        let mut idx = 0;
        for b in &self.blocks {
            for i in 0..b.nrows() {
                for j in 0..b.ncols() {
                    v[idx] = b[(i, j)];
                    idx += 1;
                }
            }
        }
        v
    }

    /// Inverse of [`AlgebraElement::to_coords`].
    pub fn from_coords(algebra: &Algebra, v: &DVector<Complex64>) -> Result<Self> {
        if v.len() != algebra.dim() {
            return Err(Error::DimensionMismatch {
                expected: algebra.dim(),
                found: v.len(),
            });
        }
        let mut e = AlgebraElement::zero(algebra);
        let mut idx = 0;
        for b in &mut e.blocks {
            for i in 0..b.nrows() {
                for j in 0..b.ncols() {
                    b[(i, j)] = v[idx];
                    idx += 1;
                }
            }
        }
        Ok(e)
    }

    /// The block-diagonal d×d scalar matrix representing this element under
    /// B ⊂ M_d(ℂ).
    pub fn to_flat(&self) -> DMatrix<Complex64> {
        let d = self.algebra.flat_dim();
        let mut m = DMatrix::zeros(d, d);
        for (k, b) in self.blocks.iter().enumerate() {
            let off = self.algebra.flat_offset(k);
            m.view_mut((off, off), (b.nrows(), b.ncols())).copy_from(b);
        }
        m
    }

    /// Extracts the block-diagonal part of a d×d scalar matrix. Off-block
    /// entries are ignored; use this only on matrices known to lie in B.
    pub fn from_flat(algebra: &Algebra, m: &DMatrix<Complex64>) -> Result<Self> {
        let d = algebra.flat_dim();
        if m.nrows() != d || m.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: m.nrows(),
            });
        }
        let blocks = algebra
            .block_sizes()
            .iter()
            .enumerate()
            .map(|(k, &dk)| {
                let off = algebra.flat_offset(k);
                m.view((off, off), (dk, dk)).into_owned()
            })
            .collect();
        Ok(Self {
            algebra: algebra.clone(),
            blocks,
        })
    }

    pub fn adjoint(&self) -> Self {
        Self {
            algebra: self.algebra.clone(),
            blocks: self.blocks.iter().map(|b| b.adjoint()).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a * b)
    }

    pub fn scale(&self, z: Complex64) -> Self {
        Self {
            algebra: self.algebra.clone(),
            blocks: self.blocks.iter().map(|b| b * z).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        self.scale(Complex64::new(-1.0, 0.0))
    }

    fn zip(
        &self,
        other: &Self,
        f: impl Fn(&DMatrix<Complex64>, &DMatrix<Complex64>) -> DMatrix<Complex64>,
    ) -> Self {
        debug_assert_eq!(self.algebra, other.algebra);
        Self {
            algebra: self.algebra.clone(),
            blocks: self
                .blocks
                .iter()
                .zip(&other.blocks)
                .map(|(a, b)| f(a, b))
                .collect(),
        }
    }

    /// Blockwise matrix exponential.
    pub fn exp(&self) -> Self {
        Self {
            algebra: self.algebra.clone(),
            blocks: self.blocks.iter().map(|b| b.clone().exp()).collect(),
        }
    }

    /// Operator norm: the largest singular value over all blocks.
    pub fn operator_norm(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| {
                if b.nrows() == 0 {
                    0.0
                } else {
                    b.clone().singular_values().max()
                }
            })
            .fold(0.0, f64::max)
    }

    /// Hilbert-Schmidt norm over all blocks.
    pub fn hs_norm(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| b.norm_squared())
            .sum::<f64>()
            .sqrt()
    }

    /// ||self - other|| in operator norm.
    pub fn distance(&self, other: &Self) -> f64 {
        self.sub(other).operator_norm()
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.operator_norm() <= tol
    }

    /// Residual of self-adjointness, ||b - b*||.
    pub fn self_adjoint_residual(&self) -> f64 {
        self.distance(&self.adjoint())
    }

    /// Whether the element commutes with every element of B, i.e. lies in
    /// the center C_B(B). Exact up to `tol` on the matrix-unit basis.
    pub fn is_central(&self, tol: f64) -> bool {
        (0..self.algebra.dim()).all(|p| {
            let u = self.algebra.basis_element(p);
            self.mul(&u).distance(&u.mul(self)) <= tol
        })
    }

    /// Positivity in the C*-sense: self-adjoint with every blockwise
    /// eigenvalue ≥ -tol·||b||.
    ///
    /// Inputs that fail self-adjointness beyond `tol` (relative to the norm)
    /// are rejected with a symmetry-violation error.
    pub fn is_positive(&self, tol: f64) -> Result<bool> {
        let norm = self.operator_norm();
        let residual = self.self_adjoint_residual();
        if residual > tol * norm.max(1.0) {
            return Err(Error::NotSelfAdjoint { residual, tol });
        }
        let threshold = -tol * norm;
        for b in &self.blocks {
            // symmetrize before the eigensolve so roundoff in the input
            // cannot leak into complex eigenvalues
            let h = (b + b.adjoint()) * Complex64::new(0.5, 0.0);
            let eig = h.symmetric_eigen();
            if eig.eigenvalues.iter().any(|&l| l < threshold) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Eigenvalues of a hermitian scalar matrix, ascending.
pub(crate) fn hermitian_eigenvalues(m: &DMatrix<Complex64>) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let h = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let mut ev: Vec<f64> = h.symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ev
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m2() -> Algebra {
        Algebra::full_matrix(2)
    }

    #[test]
    fn basis_roundtrip() {
        let a = Algebra::new(vec![1, 2]).unwrap();
        assert_eq!(a.dim(), 5);
        assert_eq!(a.flat_dim(), 3);
        for p in 0..a.dim() {
            let e = a.basis_element(p);
            let v = e.to_coords();
            for q in 0..a.dim() {
                let expect = if p == q { 1.0 } else { 0.0 };
                assert_eq!(v[q].re, expect);
                assert_eq!(v[q].im, 0.0);
            }
            let back = AlgebraElement::from_coords(&a, &v).unwrap();
            assert_eq!(back.distance(&e), 0.0);
        }
    }

    #[test]
    fn unit_is_neutral() {
        let a = Algebra::new(vec![2, 3]).unwrap();
        let one = a.unit();
        for p in 0..a.dim() {
            let e = a.basis_element(p);
            assert!(one.mul(&e).distance(&e) == 0.0);
            assert!(e.mul(&one).distance(&e) == 0.0);
        }
    }

    #[test]
    fn unit_is_positive() {
        let a = m2();
        assert!(a.unit().is_positive(1e-9).unwrap());
    }

    #[test]
    fn negated_unit_is_not_positive() {
        let a = m2();
        assert!(!a.unit().neg().is_positive(1e-9).unwrap());
    }

    #[test]
    fn squares_are_positive() {
        let a = Algebra::new(vec![1, 2]).unwrap();
        // a fixed non-self-adjoint element
        let mut b = AlgebraElement::zero(&a);
        b.blocks[0][(0, 0)] = Complex64::new(0.3, -1.2);
        b.blocks[1][(0, 1)] = Complex64::new(1.5, 0.4);
        b.blocks[1][(1, 0)] = Complex64::new(-0.2, 0.9);
        b.blocks[1][(1, 1)] = Complex64::new(0.7, 0.0);
        let sq = b.adjoint().mul(&b);
        assert!(sq.is_positive(1e-9).unwrap());
    }

    #[test]
    fn non_self_adjoint_rejected() {
        let a = m2();
        let mut b = AlgebraElement::zero(&a);
        b.blocks[0][(0, 1)] = Complex64::new(1.0, 0.0);
        assert!(matches!(
            b.is_positive(1e-9),
            Err(Error::NotSelfAdjoint { .. })
        ));
    }

    #[test]
    fn flat_embedding_is_multiplicative() {
        let a = Algebra::new(vec![2, 1]).unwrap();
        let x = a
            .basis_element(1)
            .add(&a.basis_element(4).scale(Complex64::new(0.0, 2.0)));
        let y = a.basis_element(2).add(&a.basis_element(0));
        let lhs = x.mul(&y).to_flat();
        let rhs = x.to_flat() * y.to_flat();
        assert!((lhs - rhs).norm() < 1e-14);
    }
}
