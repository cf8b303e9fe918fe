//! Finite-dimensional Hilbert B-B-modules (correspondences).
//!
//! A module is kept in the form F = P·B^k: a free right module B^k cut down
//! by the projection P = π(1), where the left action π: B → M_k(B) is a unital
//! *-homomorphism onto the corner. Every finitely generated Hilbert module
//! over a finite-dimensional C*-algebra is of this form, so no abstract
//! quotient bookkeeping is needed downstream.
//!
//! Vectors are handled in two layouts:
//! * coordinates: k algebra elements (b_1, …, b_k), the public form;
//! * flattened: the (k·d)×d complex matrix obtained by stacking the flat
//!   d×d pictures of the coordinates. Right action is matrix multiplication
//!   from the right, left action and module maps act from the left.
//!
//! Two constructions of "the same" module are comparable through Gram
//! matrices of corresponding vectors, never through representation equality:
//! the canonical form produced by [`canonicalize`] depends on eigenvector
//! phases and is unique only up to two-sided unitaries.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::algebra::{Algebra, AlgebraElement};
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Relative cutoff under which singular values of a Gram factorization are
/// treated as zero. Gram factorizations of Kolmogorov and tensor
/// constructions are the accuracy bottleneck of the crate.
pub const RANK_CUTOFF_REL: f64 = 1e-10;

/// A matrix over B, used for Gram matrices of generator families and for
/// left actions on symbols.
#[derive(Debug, Clone)]
pub struct BMatrix {
    algebra: Algebra,
    n: usize,
    entries: Vec<AlgebraElement>,
}

impl BMatrix {
    pub fn zero(algebra: &Algebra, n: usize) -> Self {
        Self {
            algebra: algebra.clone(),
            n,
            entries: vec![AlgebraElement::zero(algebra); n * n],
        }
    }

    pub fn from_fn(
        algebra: &Algebra,
        n: usize,
        mut f: impl FnMut(usize, usize) -> AlgebraElement,
    ) -> Self {
        let mut m = Self::zero(algebra, n);
        for r in 0..n {
            for c in 0..n {
                m.entries[r * n + c] = f(r, c);
            }
        }
        m
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, r: usize, c: usize) -> &AlgebraElement {
        &self.entries[r * self.n + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: AlgebraElement) {
        self.entries[r * self.n + c] = v;
    }

    /// The scalar matrix of the j-th block components, of size (n·d_j)².
    pub fn block_matrix(&self, j: usize) -> DMatrix<Complex64> {
        let dj = self.algebra.block_sizes()[j];
        let mut m = DMatrix::zeros(self.n * dj, self.n * dj);
        for r in 0..self.n {
            for c in 0..self.n {
                let b = self.get(r, c).block(j);
                m.view_mut((r * dj, c * dj), (dj, dj)).copy_from(b);
            }
        }
        m
    }

    /// Flattening through B ⊂ M_d(ℂ), of size (n·d)².
    pub fn flatten(&self) -> DMatrix<Complex64> {
        let d = self.algebra.flat_dim();
        let mut m = DMatrix::zeros(self.n * d, self.n * d);
        for r in 0..self.n {
            for c in 0..self.n {
                m.view_mut((r * d, c * d), (d, d))
                    .copy_from(&self.get(r, c).to_flat());
            }
        }
        m
    }

    /// ||M - M*|| across entries, for symmetry diagnostics.
    pub fn hermitian_residual(&self) -> f64 {
        let mut res = 0.0f64;
        for r in 0..self.n {
            for c in 0..self.n {
                res = res.max(self.get(r, c).distance(&self.get(c, r).adjoint()));
            }
        }
        res
    }
}

/// A finite-dimensional Hilbert B-B-module in the form P·B^k.
#[derive(Debug, Clone)]
pub struct Bimodule {
    algebra: Algebra,
    rank: usize,
    /// Flat (k·d)×(k·d) matrices of π(u_p), one per basis element of B.
    action: Vec<DMatrix<Complex64>>,
    /// Flat matrix of P = π(1).
    proj: DMatrix<Complex64>,
}

impl PartialEq for Bimodule {
    fn eq(&self, other: &Self) -> bool {
        self.algebra == other.algebra
            && self.rank == other.rank
            && self.action.iter().zip(&other.action).all(|(a, b)| a == b)
    }
}

impl Bimodule {
    /// The free module B^k with the amplified (diagonal) left action.
    pub fn free(algebra: &Algebra, rank: usize) -> Self {
        let d = algebra.flat_dim();
        let action = (0..algebra.dim())
            .map(|p| {
                let u = algebra.basis_element(p).to_flat();
                let mut m = DMatrix::zeros(rank * d, rank * d);
                for i in 0..rank {
                    m.view_mut((i * d, i * d), (d, d)).copy_from(&u);
                }
                m
            })
            .collect();
        Self::assemble(algebra, rank, action)
    }

    /// The zero module.
    pub fn zero_module(algebra: &Algebra) -> Self {
        Self::assemble(algebra, 0, vec![DMatrix::zeros(0, 0); algebra.dim()])
    }

    /// Builds a module from an explicit left action. The action must be a
    /// unital *-homomorphism onto the corner π(1)·M_k(B)·π(1); call
    /// [`Bimodule::validate`] to certify this numerically.
    pub fn from_action(
        algebra: &Algebra,
        rank: usize,
        action: Vec<DMatrix<Complex64>>,
    ) -> Result<Self> {
        if action.len() != algebra.dim() {
            return Err(Error::DimensionMismatch {
                expected: algebra.dim(),
                found: action.len(),
            });
        }
        let kd = rank * algebra.flat_dim();
        for m in &action {
            if m.nrows() != kd || m.ncols() != kd {
                return Err(Error::DimensionMismatch {
                    expected: kd,
                    found: m.nrows(),
                });
            }
        }
        Ok(Self::assemble(algebra, rank, action))
    }

    fn assemble(algebra: &Algebra, rank: usize, action: Vec<DMatrix<Complex64>>) -> Self {
        let kd = rank * algebra.flat_dim();
        let unit_coords = algebra.unit().to_coords();
        let mut proj = DMatrix::zeros(kd, kd);
        for (p, m) in action.iter().enumerate() {
            if unit_coords[p] != ZERO {
                proj += m * unit_coords[p];
            }
        }
        Self {
            algebra: algebra.clone(),
            rank,
            action,
            proj,
        }
    }

    pub fn algebra(&self) -> &Algebra {
        &self.algebra
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// The flat (k·d)² matrix of π(b).
    pub fn action_of(&self, b: &AlgebraElement) -> DMatrix<Complex64> {
        let kd = self.rank * self.algebra.flat_dim();
        let coords = b.to_coords();
        let mut m = DMatrix::zeros(kd, kd);
        for (p, a) in self.action.iter().enumerate() {
            if coords[p] != ZERO {
                m += a * coords[p];
            }
        }
        m
    }

    /// π(u_p) as a flat matrix.
    pub fn action_basis(&self, p: usize) -> &DMatrix<Complex64> {
        &self.action[p]
    }

    /// The (row, col) entry of π(u_p) ∈ M_k(B), as an algebra element.
    pub fn action_entry(&self, p: usize, row: usize, col: usize) -> AlgebraElement {
        let d = self.algebra.flat_dim();
        let sub = self.action[p].view((row * d, col * d), (d, d)).into_owned();
        AlgebraElement::from_flat(&self.algebra, &sub).expect("flat dimension fixed by the algebra")
    }

    /// Flat matrix of P = π(1); the identity of the module.
    pub fn projection_flat(&self) -> &DMatrix<Complex64> {
        &self.proj
    }

    /// Complex dimension of the module, dim_ℂ(P·B^k).
    ///
    /// The block-j part of P is a projection of rank tr(P_j), and each unit
    /// of rank carries d_j complex dimensions.
    pub fn complex_dimension(&self) -> usize {
        let d = self.algebra.flat_dim();
        let mut total = 0.0;
        for (j, &dj) in self.algebra.block_sizes().iter().enumerate() {
            let off = self.algebra.flat_offset(j);
            let mut tr = 0.0;
            for i in 0..self.rank {
                for r in 0..dj {
                    tr += self.proj[(i * d + off + r, i * d + off + r)].re;
                }
            }
            total += tr * dj as f64;
        }
        total.round() as usize
    }

    /// Numerically certifies the *-homomorphism and projection laws of the
    /// left action and the block structure of its entries.
    pub fn validate(&self, tol: f64) -> Result<()> {
        let dim = self.algebra.dim();
        let scale: f64 = self.action.iter().map(|m| m.norm()).fold(1.0f64, f64::max);
        // π(u_p)π(u_q) = π(u_p·u_q)
        for p in 0..dim {
            let up = self.algebra.basis_element(p);
            for q in 0..dim {
                let uq = self.algebra.basis_element(q);
                let lhs = &self.action[p] * &self.action[q];
                let rhs = self.action_of(&up.mul(&uq));
                let res = (lhs - rhs).norm();
                if res > tol * scale {
                    return Err(Error::Precondition(format!(
                        "left action is not multiplicative (residual {res:e})"
                    )));
                }
            }
            // π(u_p*) = π(u_p)*
            let res = (self.action_of(&up.adjoint()) - self.action[p].adjoint()).norm();
            if res > tol * scale {
                return Err(Error::Precondition(format!(
                    "left action is not involutive (residual {res:e})"
                )));
            }
        }
        // π(1) is a self-adjoint idempotent
        let p2 = (&self.proj * &self.proj) - &self.proj;
        if p2.norm() > tol * scale {
            return Err(Error::Precondition(format!(
                "π(1) is not idempotent (residual {:e})",
                p2.norm()
            )));
        }
        let pa = self.proj.adjoint() - &self.proj;
        if pa.norm() > tol * scale {
            return Err(Error::Precondition(format!(
                "π(1) is not self-adjoint (residual {:e})",
                pa.norm()
            )));
        }
        // entries of π(u_p) lie in B: no coupling between algebra blocks
        let d = self.algebra.flat_dim();
        for m in &self.action {
            for i in 0..self.rank {
                for i2 in 0..self.rank {
                    let sub = m.view((i * d, i2 * d), (d, d));
                    let mut off_mass = 0.0f64;
                    for (j, &dj) in self.algebra.block_sizes().iter().enumerate() {
                        let oj = self.algebra.flat_offset(j);
                        for r in 0..dj {
                            for c in 0..d {
                                if c < oj || c >= oj + dj {
                                    off_mass = off_mass.max(sub[(oj + r, c)].norm());
                                }
                            }
                        }
                    }
                    if off_mass > tol * scale {
                        return Err(Error::Precondition(format!(
                            "left action entry couples algebra blocks (mass {off_mass:e})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    // ----- vectors -------------------------------------------------------

    pub fn zero_vector(&self) -> ModuleVector {
        ModuleVector {
            algebra: self.algebra.clone(),
            coords: vec![AlgebraElement::zero(&self.algebra); self.rank],
        }
    }

    /// The i-th canonical generator e_i = P·ê_i.
    pub fn generator(&self, i: usize) -> ModuleVector {
        let mut coords = vec![AlgebraElement::zero(&self.algebra); self.rank];
        coords[i] = self.algebra.unit();
        self.project_vector(&ModuleVector {
            algebra: self.algebra.clone(),
            coords,
        })
    }

    /// Wraps coordinates after checking membership P·x = x.
    pub fn vector_from_coords(&self, coords: Vec<AlgebraElement>) -> Result<ModuleVector> {
        let x = ModuleVector {
            algebra: self.algebra.clone(),
            coords,
        };
        self.check_vector(&x)?;
        let flat = self.flatten_vector(&x);
        let res = (self.projection_flat() * &flat - &flat).norm();
        if res > 1e-9 * flat.norm().max(1.0) {
            return Err(Error::Precondition(format!(
                "vector is not in the range of π(1) (residual {res:e})"
            )));
        }
        Ok(x)
    }

    /// Applies P to arbitrary coordinates, producing a member.
    pub fn project_vector(&self, x: &ModuleVector) -> ModuleVector {
        let flat = self.flatten_vector(x);
        self.unflatten_vector(&(self.projection_flat() * flat))
    }

    pub(crate) fn check_vector(&self, x: &ModuleVector) -> Result<()> {
        self.algebra.check_same(&x.algebra)?;
        if x.coords.len() != self.rank {
            return Err(Error::DimensionMismatch {
                expected: self.rank,
                found: x.coords.len(),
            });
        }
        Ok(())
    }

    /// The (k·d)×d flat picture of a vector.
    pub fn flatten_vector(&self, x: &ModuleVector) -> DMatrix<Complex64> {
        let d = self.algebra.flat_dim();
        let mut m = DMatrix::zeros(self.rank * d, d);
        for (i, b) in x.coords.iter().enumerate() {
            m.view_mut((i * d, 0), (d, d)).copy_from(&b.to_flat());
        }
        m
    }

    pub fn unflatten_vector(&self, m: &DMatrix<Complex64>) -> ModuleVector {
        let d = self.algebra.flat_dim();
        let coords = (0..self.rank)
            .map(|i| {
                let sub = m.view((i * d, 0), (d, d)).into_owned();
                AlgebraElement::from_flat(&self.algebra, &sub)
                    .expect("flat dimension fixed by the algebra")
            })
            .collect();
        ModuleVector {
            algebra: self.algebra.clone(),
            coords,
        }
    }

    /// ⟨x, y⟩ = Σ_i x_i*·y_i.
    pub fn inner(&self, x: &ModuleVector, y: &ModuleVector) -> Result<AlgebraElement> {
        self.check_vector(x)?;
        self.check_vector(y)?;
        let mut acc = AlgebraElement::zero(&self.algebra);
        for (xi, yi) in x.coords.iter().zip(&y.coords) {
            acc = acc.add(&xi.adjoint().mul(yi));
        }
        Ok(acc)
    }

    /// Left action b·x = π(b)x.
    pub fn left_mul(&self, b: &AlgebraElement, x: &ModuleVector) -> Result<ModuleVector> {
        self.check_vector(x)?;
        self.algebra.check_same(b.algebra())?;
        let flat = self.action_of(b) * self.flatten_vector(x);
        Ok(self.unflatten_vector(&flat))
    }

    /// Right action x·b.
    pub fn right_mul(&self, x: &ModuleVector, b: &AlgebraElement) -> Result<ModuleVector> {
        self.check_vector(x)?;
        Ok(ModuleVector {
            algebra: self.algebra.clone(),
            coords: x.coords.iter().map(|c| c.mul(b)).collect(),
        })
    }

    /// √||⟨x,x⟩||.
    pub fn norm(&self, x: &ModuleVector) -> f64 {
        self.inner(x, x)
            .map(|g| g.operator_norm().max(0.0).sqrt())
            .unwrap_or(f64::NAN)
    }

    /// B-valued Gram matrix of a family of vectors.
    pub fn gram(&self, xs: &[ModuleVector]) -> Result<BMatrix> {
        let mut g = BMatrix::zero(&self.algebra, xs.len());
        for (r, x) in xs.iter().enumerate() {
            for (c, y) in xs.iter().enumerate() {
                g.set(r, c, self.inner(x, y)?);
            }
        }
        Ok(g)
    }

    /// A ℂ-basis of the center C_B(F) = {x : b·x = x·b for all b}.
    ///
    /// Solves the linear system π(u_p)x = x·u_p over the basis of B together
    /// with the membership constraint P·x = x; returns an orthonormal basis
    /// of the solution space (empty for the zero module).
    pub fn center(&self) -> Vec<ModuleVector> {
        let dim = self.algebra.dim();
        let n_coords = self.rank * dim;
        if n_coords == 0 {
            return Vec::new();
        }
        // columns: coordinate basis (i, p) ↦ vector with u_p in slot i
        let flats: Vec<DMatrix<Complex64>> = (0..n_coords)
            .map(|c| {
                let (i, p) = (c / dim, c % dim);
                let mut coords = vec![AlgebraElement::zero(&self.algebra); self.rank];
                coords[i] = self.algebra.basis_element(p);
                self.flatten_vector(&ModuleVector {
                    algebra: self.algebra.clone(),
                    coords,
                })
            })
            .collect();
        let to_coords = |flat: &DMatrix<Complex64>| -> DVector<Complex64> {
            let v = self.unflatten_vector(flat);
            let mut out = DVector::zeros(n_coords);
            for (i, b) in v.coords.iter().enumerate() {
                out.rows_mut(i * dim, dim).copy_from(&b.to_coords());
            }
            out
        };
        let mut rows = DMatrix::zeros((dim + 1) * n_coords, n_coords);
        for (c, flat) in flats.iter().enumerate() {
            for p in 0..dim {
                let u_flat = self.algebra.basis_element(p).to_flat();
                let diff = self.action_basis(p) * flat - flat * u_flat;
                rows.view_mut((p * n_coords, c), (n_coords, 1))
                    .copy_from(&to_coords(&diff));
            }
            let memb = self.projection_flat() * flat - flat;
            rows.view_mut((dim * n_coords, c), (n_coords, 1))
                .copy_from(&to_coords(&memb));
        }
        // null space by SVD
        let svd = rows.svd(false, true);
        let v_t = svd.v_t.expect("requested");
        let smax = svd.singular_values.iter().copied().fold(0.0f64, f64::max);
        let cutoff = (RANK_CUTOFF_REL * smax).max(1e-12);
        let mut basis = Vec::new();
        for (r, &s) in svd.singular_values.iter().enumerate() {
            if s <= cutoff {
                let row = v_t.row(r).adjoint();
                let mut coords = Vec::with_capacity(self.rank);
                for i in 0..self.rank {
                    let sub = DVector::from_iterator(dim, (0..dim).map(|p| row[i * dim + p]));
                    coords.push(
                        AlgebraElement::from_coords(&self.algebra, &sub)
                            .expect("coordinate dimension fixed"),
                    );
                }
                basis.push(ModuleVector {
                    algebra: self.algebra.clone(),
                    coords,
                });
            }
        }
        // rows of v_t beyond the singular value list also span the kernel
        for r in svd.singular_values.len()..v_t.nrows() {
            let row = v_t.row(r).adjoint();
            let mut coords = Vec::with_capacity(self.rank);
            for i in 0..self.rank {
                let sub = DVector::from_iterator(dim, (0..dim).map(|p| row[i * dim + p]));
                coords.push(
                    AlgebraElement::from_coords(&self.algebra, &sub)
                        .expect("coordinate dimension fixed"),
                );
            }
            basis.push(ModuleVector {
                algebra: self.algebra.clone(),
                coords,
            });
        }
        basis
    }
}

/// An element of a module, as coordinates over the free cover B^k.
#[derive(Debug, Clone)]
pub struct ModuleVector {
    algebra: Algebra,
    coords: Vec<AlgebraElement>,
}

impl ModuleVector {
    pub fn coords(&self) -> &[AlgebraElement] {
        &self.coords
    }

    pub fn algebra(&self) -> &Algebra {
        &self.algebra
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            algebra: self.algebra.clone(),
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            algebra: self.algebra.clone(),
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a.sub(b))
                .collect(),
        }
    }

    pub fn scale(&self, z: Complex64) -> Self {
        Self {
            algebra: self.algebra.clone(),
            coords: self.coords.iter().map(|c| c.scale(z)).collect(),
        }
    }

    pub fn from_coords(coords: Vec<AlgebraElement>) -> Result<Self> {
        let algebra = coords.first().map(|c| c.algebra().clone()).ok_or_else(|| {
            Error::InvalidDescriptor("vector needs at least one coordinate".into())
        })?;
        Ok(Self { algebra, coords })
    }

    pub(crate) fn raw(algebra: &Algebra, coords: Vec<AlgebraElement>) -> Self {
        Self {
            algebra: algebra.clone(),
            coords,
        }
    }
}

/// Inner product ⟨x_m⊙…⊙x_1, b·(y_m⊙…⊙y_1)⟩ of elementary tensors over a
/// common module, folded without materializing the tensor power:
/// the leftmost factor absorbs b, producing ⟨x, b·y⟩, which is then pushed
/// into the next factor.
pub fn elementary_inner(
    module: &Bimodule,
    xs: &[ModuleVector],
    b: &AlgebraElement,
    ys: &[ModuleVector],
) -> Result<AlgebraElement> {
    if xs.len() != ys.len() {
        return Err(Error::DimensionMismatch {
            expected: xs.len(),
            found: ys.len(),
        });
    }
    let mut c = b.clone();
    for (x, y) in xs.iter().zip(ys) {
        c = module.inner(x, &module.left_mul(&c, y)?)?;
    }
    Ok(c)
}

// ----- direct sums -------------------------------------------------------

/// F ⊕ G with its isometric embeddings and the complementary projections.
#[derive(Debug, Clone)]
pub struct DirectSum {
    left: Bimodule,
    right: Bimodule,
    module: Bimodule,
}

impl DirectSum {
    pub fn new(left: &Bimodule, right: &Bimodule) -> Result<Self> {
        left.algebra().check_same(right.algebra())?;
        let algebra = left.algebra().clone();
        let d = algebra.flat_dim();
        let (kl, kr) = (left.rank(), right.rank());
        let k = kl + kr;
        let action = (0..algebra.dim())
            .map(|p| {
                let mut m = DMatrix::zeros(k * d, k * d);
                m.view_mut((0, 0), (kl * d, kl * d))
                    .copy_from(left.action_basis(p));
                m.view_mut((kl * d, kl * d), (kr * d, kr * d))
                    .copy_from(right.action_basis(p));
                m
            })
            .collect();
        Ok(Self {
            left: left.clone(),
            right: right.clone(),
            module: Bimodule::assemble(&algebra, k, action),
        })
    }

    pub fn module(&self) -> &Bimodule {
        &self.module
    }

    pub fn left(&self) -> &Bimodule {
        &self.left
    }

    pub fn right(&self) -> &Bimodule {
        &self.right
    }

    pub fn embed_left(&self, x: &ModuleVector) -> Result<ModuleVector> {
        self.left.check_vector(x)?;
        let mut coords = x.coords.clone();
        coords.extend(vec![
            AlgebraElement::zero(self.left.algebra());
            self.right.rank()
        ]);
        Ok(ModuleVector::raw(self.left.algebra(), coords))
    }

    pub fn embed_right(&self, y: &ModuleVector) -> Result<ModuleVector> {
        self.right.check_vector(y)?;
        let mut coords = vec![AlgebraElement::zero(self.right.algebra()); self.left.rank()];
        coords.extend(y.coords.clone());
        Ok(ModuleVector::raw(self.right.algebra(), coords))
    }

    pub fn project_left(&self, x: &ModuleVector) -> Result<ModuleVector> {
        self.module.check_vector(x)?;
        Ok(ModuleVector::raw(
            self.left.algebra(),
            x.coords[..self.left.rank()].to_vec(),
        ))
    }

    pub fn project_right(&self, x: &ModuleVector) -> Result<ModuleVector> {
        self.module.check_vector(x)?;
        Ok(ModuleVector::raw(
            self.right.algebra(),
            x.coords[self.left.rank()..].to_vec(),
        ))
    }
}

// ----- canonicalization of generator presentations ------------------------

/// A module presented by N right-module generators: their B-valued Gram
/// matrix and the left action of each basis element expressed on symbols.
#[derive(Debug, Clone)]
pub struct GeneratorPresentation {
    pub algebra: Algebra,
    pub gram: BMatrix,
    /// One N×N matrix over B per basis element p of B; column a holds the
    /// expansion of u_p·g_a over the generators (coefficients act from the
    /// right).
    pub action: Vec<BMatrix>,
}

/// Result of [`canonicalize`]: the quotient module in P·B^k form, the image
/// of every input symbol, and diagnostics.
#[derive(Debug, Clone)]
pub struct CanonicalModule {
    pub module: Bimodule,
    pub images: Vec<ModuleVector>,
    /// Per algebra-block ranks m_j of the flattened Gram.
    pub block_ranks: Vec<usize>,
    /// How well the left action descends to the quotient.
    pub quotient_residual: f64,
}

/// Quotients a generator presentation by the null space of its Gram matrix
/// and repacks the result in P·B^k form through the left regular embedding:
/// per algebra block j the module becomes the full rectangle M_{m_j×d_j}
/// carried by the first m_j of the k·d_j flat rows.
pub fn canonicalize(pres: &GeneratorPresentation) -> Result<CanonicalModule> {
    canonicalize_with_cutoff(pres, RANK_CUTOFF_REL)
}

pub fn canonicalize_with_cutoff(
    pres: &GeneratorPresentation,
    cutoff_rel: f64,
) -> Result<CanonicalModule> {
    let algebra = &pres.algebra;
    let n = pres.gram.size();
    let nb = algebra.num_blocks();

    // eigendecompositions of the per-block scalar Grams
    let mut decomps = Vec::with_capacity(nb);
    let mut sigma_max = 0.0f64;
    for j in 0..nb {
        let m = pres.gram.block_matrix(j);
        let h = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
        let eig = h.symmetric_eigen();
        for &l in eig.eigenvalues.iter() {
            sigma_max = sigma_max.max(l.abs());
        }
        decomps.push(eig);
    }
    let cutoff = (cutoff_rel * sigma_max).max(1e-13 * sigma_max.max(1.0));
    let neg_floor = -1e-9 * sigma_max.max(1e-300);

    // factor each block Gram as X_j*·X_j with X_j of full row rank m_j
    let mut factors: Vec<DMatrix<Complex64>> = Vec::with_capacity(nb);
    let mut kept_eigenvalues: Vec<Vec<f64>> = Vec::with_capacity(nb);
    let mut block_ranks = Vec::with_capacity(nb);
    for (j, eig) in decomps.iter().enumerate() {
        let dj = algebra.block_sizes()[j];
        let ncols = n * dj;
        let mut cols = Vec::new();
        for (idx, &l) in eig.eigenvalues.iter().enumerate() {
            if l < neg_floor {
                return Err(Error::GramNotPositive { eigenvalue: l });
            }
            if l > cutoff {
                cols.push((idx, l));
            }
        }
        let m_j = cols.len();
        let mut x = DMatrix::zeros(m_j, ncols);
        for (row, &(idx, l)) in cols.iter().enumerate() {
            let v = eig.eigenvectors.column(idx);
            let s = Complex64::new(l.sqrt(), 0.0);
            for c in 0..ncols {
                x[(row, c)] = s * v[c].conj();
            }
        }
        kept_eigenvalues.push(cols.iter().map(|&(_, l)| l).collect());
        block_ranks.push(m_j);
        factors.push(x);
    }

    let k = block_ranks
        .iter()
        .zip(algebra.block_sizes())
        .map(|(&m, &dj)| m.div_ceil(dj))
        .max()
        .unwrap_or(0);

    let d = algebra.flat_dim();
    let flat_row = |j: usize, a: usize| -> usize {
        let dj = algebra.block_sizes()[j];
        (a / dj) * d + algebra.flat_offset(j) + (a % dj)
    };

    // left action: A_{p,j} = (X_j·Π_j(u_p))·X_j⁺ with X_j⁺ = X_j*·Λ⁻¹
    let mut action = vec![DMatrix::zeros(k * d, k * d); algebra.dim()];
    let mut quotient_residual = 0.0f64;
    for p in 0..algebra.dim() {
        let pi = pres.action[p].block_matrix_set(algebra);
        for j in 0..nb {
            let m_j = block_ranks[j];
            if m_j == 0 {
                continue;
            }
            let x = &factors[j];
            let w = x * &pi[j];
            let mut pinv = x.adjoint();
            for (col, &l) in kept_eigenvalues[j].iter().enumerate() {
                let inv = Complex64::new(1.0 / l, 0.0);
                for r in 0..pinv.nrows() {
                    pinv[(r, col)] *= inv;
                }
            }
            let a = &w * &pinv;
            quotient_residual = quotient_residual.max((&a * x - &w).norm());
            for r in 0..m_j {
                for c in 0..m_j {
                    action[p][(flat_row(j, r), flat_row(j, c))] = a[(r, c)];
                }
            }
        }
    }
    let module = Bimodule::assemble(algebra, k, action);

    // images of the symbols: column blocks of the factors
    let mut images = Vec::with_capacity(n);
    for s in 0..n {
        let mut flat = DMatrix::zeros(k * d, d);
        for j in 0..nb {
            let dj = algebra.block_sizes()[j];
            let off = algebra.flat_offset(j);
            let x = &factors[j];
            for a in 0..block_ranks[j] {
                for c in 0..dj {
                    flat[(flat_row(j, a), off + c)] = x[(a, s * dj + c)];
                }
            }
        }
        images.push(module.unflatten_vector(&flat));
    }

    Ok(CanonicalModule {
        module,
        images,
        block_ranks,
        quotient_residual,
    })
}

impl BMatrix {
    /// Per-block scalar matrices of this B-valued matrix.
    fn block_matrix_set(&self, algebra: &Algebra) -> Vec<DMatrix<Complex64>> {
        (0..algebra.num_blocks())
            .map(|j| self.block_matrix(j))
            .collect()
    }
}

// ----- interior tensor product --------------------------------------------

/// F ⊙ G over B, with the embedding of elementary tensors.
///
/// The tensor product is presented on the k_F·k_G symbols e_i ⊗ f_j with
/// Gram ⟨(i,j), (i',j')⟩ = ⟨f_j, ⟨e_i, e_i'⟩_F·f_j'⟩_G and then quotiented by
/// the null space; the defining relation x·b ⊗ y = x ⊗ b·y holds in the
/// quotient.
#[derive(Debug, Clone)]
pub struct TensorProduct {
    left: Bimodule,
    right: Bimodule,
    canonical: CanonicalModule,
}

impl TensorProduct {
    pub fn new(f: &Bimodule, g: &Bimodule) -> Result<Self> {
        f.algebra().check_same(g.algebra())?;
        let algebra = f.algebra().clone();
        let (kf, kg) = (f.rank(), g.rank());
        let n = kf * kg;
        let e: Vec<ModuleVector> = (0..kf).map(|i| f.generator(i)).collect();
        let fj: Vec<ModuleVector> = (0..kg).map(|j| g.generator(j)).collect();

        let mut gram = BMatrix::zero(&algebra, n);
        for i in 0..kf {
            for i2 in 0..kf {
                let mid = f.inner(&e[i], &e[i2])?;
                for j in 0..kg {
                    for j2 in 0..kg {
                        let v = g.inner(&fj[j], &g.left_mul(&mid, &fj[j2])?)?;
                        gram.set(i * kg + j, i2 * kg + j2, v);
                    }
                }
            }
        }

        let mut action = Vec::with_capacity(algebra.dim());
        for p in 0..algebra.dim() {
            let mut m = BMatrix::zero(&algebra, n);
            for i in 0..kf {
                // u_p·(e_i ⊗ f_j) = Σ_{i'} e_{i'} ⊗ (π_F(u_p)_{i',i}·f_j)
                for i2 in 0..kf {
                    let entry = f.action_entry(p, i2, i);
                    for j in 0..kg {
                        let moved = g.left_mul(&entry, &fj[j])?;
                        for j2 in 0..kg {
                            m.set(i2 * kg + j2, i * kg + j, moved.coords()[j2].clone());
                        }
                    }
                }
            }
            action.push(m);
        }

        let canonical = canonicalize(&GeneratorPresentation {
            algebra: algebra.clone(),
            gram,
            action,
        })?;
        Ok(Self {
            left: f.clone(),
            right: g.clone(),
            canonical,
        })
    }

    pub fn module(&self) -> &Bimodule {
        &self.canonical.module
    }

    pub fn left(&self) -> &Bimodule {
        &self.left
    }

    pub fn right(&self) -> &Bimodule {
        &self.right
    }

    pub fn block_ranks(&self) -> &[usize] {
        &self.canonical.block_ranks
    }

    /// Image of the symbol e_i ⊗ f_j in the quotient.
    pub fn symbol_image(&self, i: usize, j: usize) -> &ModuleVector {
        &self.canonical.images[i * self.right.rank() + j]
    }

    /// Class of the elementary tensor x ⊗ y.
    pub fn embed(&self, x: &ModuleVector, y: &ModuleVector) -> Result<ModuleVector> {
        self.left.check_vector(x)?;
        self.right.check_vector(y)?;
        let mut acc = self.module().zero_vector();
        for (i, xi) in x.coords().iter().enumerate() {
            let moved = self.right.left_mul(xi, y)?;
            for (j, c) in moved.coords().iter().enumerate() {
                let img = self.symbol_image(i, j);
                acc = acc.add(&self.module().right_mul(img, c)?);
            }
        }
        Ok(acc)
    }
}

/// Materialized left-associated tensor powers F, F⊙F, (F⊙F)⊙F, … of a module,
/// together with the embedding of elementary tensors.
///
/// Power 0 is B itself as the trivial module.
#[derive(Debug, Clone)]
pub struct TensorPowers {
    base: Bimodule,
    trivial: Bimodule,
    products: Vec<TensorProduct>,
}

impl TensorPowers {
    pub fn new(base: &Bimodule, max_power: usize) -> Result<Self> {
        let trivial = Bimodule::free(base.algebra(), 1);
        let mut products = Vec::new();
        let mut current = base.clone();
        for _ in 2..=max_power {
            let t = TensorProduct::new(&current, base)?;
            current = t.module().clone();
            products.push(t);
        }
        Ok(Self {
            base: base.clone(),
            trivial,
            products,
        })
    }

    pub fn base(&self) -> &Bimodule {
        &self.base
    }

    /// The module F^{⊙n} (n = 0 gives B).
    pub fn power(&self, n: usize) -> &Bimodule {
        match n {
            0 => &self.trivial,
            1 => &self.base,
            _ => self.products[n - 2].module(),
        }
    }

    /// Largest materialized power.
    pub fn max_power(&self) -> usize {
        self.products.len() + 1
    }

    /// Embeds x_n ⊙ … ⊙ x_1 (leftmost first) into F^{⊙n}.
    pub fn embed_elementary(&self, factors: &[ModuleVector]) -> Result<ModuleVector> {
        match factors.len() {
            0 => Err(Error::Precondition(
                "elementary tensor needs at least one factor".into(),
            )),
            1 => Ok(factors[0].clone()),
            _ => {
                let mut acc = factors[0].clone();
                for (extra, x) in factors[1..].iter().enumerate() {
                    acc = self.products[extra].embed(&acc, x)?;
                }
                Ok(acc)
            }
        }
    }
}
