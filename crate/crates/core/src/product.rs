//! The product of completely spatial systems, realized directly on the index
//! level: the product of the systems with indices F¹ and F² is the
//! time-ordered system over F¹ ⊕ F².
//!
//! The product is represented by its index module and unit parameters, never
//! by inductive limits of fibers; fiber vectors are materialized on demand
//! through the unit machinery. Associativity and commutativity surface as
//! canonical unitaries between differently bracketed sums and are checked via
//! Gram/generator agreement, not representation identity.

use crate::algebra::AlgebraElement;
use crate::bimodule::{Bimodule, DirectSum, ModuleVector};
use crate::error::{Error, Result};
use crate::trotter::trotter_product;
use crate::units::{BimoduleMap, TimeOrderedSystem, UnitParams};

/// A pair of (left, right) index vectors for each of the two units compared
/// by [`scalar_tensor_residual`].
pub type VectorPairSample = ((ModuleVector, ModuleVector), (ModuleVector, ModuleVector));

/// Which factor of a product an operation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// The product of the time-ordered systems over F¹ and F², realized as the
/// time-ordered system over F¹ ⊕ F² with its structural maps.
#[derive(Debug, Clone)]
pub struct ProductSystemPair {
    left: TimeOrderedSystem,
    right: TimeOrderedSystem,
    sum: DirectSum,
    product: TimeOrderedSystem,
}

impl ProductSystemPair {
    pub fn new(f1: &Bimodule, f2: &Bimodule) -> Result<Self> {
        f1.algebra().check_same(f2.algebra())?;
        let sum = DirectSum::new(f1, f2)?;
        Ok(Self {
            left: TimeOrderedSystem::new(f1.clone()),
            right: TimeOrderedSystem::new(f2.clone()),
            product: TimeOrderedSystem::new(sum.module().clone()),
            sum,
        })
    }

    pub fn factor(&self, side: Side) -> &TimeOrderedSystem {
        match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        }
    }

    pub fn product(&self) -> &TimeOrderedSystem {
        &self.product
    }

    pub fn sum(&self) -> &DirectSum {
        &self.sum
    }

    fn embed_vector(&self, side: Side, zeta: &ModuleVector) -> Result<ModuleVector> {
        match side {
            Side::Left => self.sum.embed_left(zeta),
            Side::Right => self.sum.embed_right(zeta),
        }
    }

    fn project_vector(&self, side: Side, zeta: &ModuleVector) -> Result<ModuleVector> {
        match side {
            Side::Left => self.sum.project_left(zeta),
            Side::Right => self.sum.project_right(zeta),
        }
    }

    /// A factor unit (β, ζ) becomes the product unit (β, ι_ℓ·ζ); generators
    /// among same-side embedded units are preserved exactly, the reference
    /// units of both factors become the single vacuum.
    pub fn embed_unit(&self, side: Side, p: &UnitParams) -> Result<UnitParams> {
        self.factor(side).index().check_vector(&p.zeta)?;
        Ok(UnitParams {
            beta: p.beta.clone(),
            zeta: self.embed_vector(side, &p.zeta)?,
        })
    }

    /// The projection morphism onto a factor at unit level:
    /// (β, ζ) ↦ (β, p_ℓ·ζ). Composing with the embedding is the identity on
    /// side-ℓ units; the morphism fixes the vacuum in both directions.
    pub fn project_unit(&self, side: Side, p: &UnitParams) -> Result<UnitParams> {
        self.product.index().check_vector(&p.zeta)?;
        Ok(UnitParams {
            beta: p.beta.clone(),
            zeta: self.project_vector(side, &p.zeta)?,
        })
    }

    /// Residual of the unit decomposition
    /// p = (embed(1, project(1,p)) ⊗ embed(2, project(2,p))) ⊗ ω^{-β}:
    /// zero at parameter level for every product unit.
    pub fn decompose_residual(&self, p: &UnitParams) -> Result<f64> {
        let left = self.embed_unit(Side::Left, &self.project_unit(Side::Left, p)?)?;
        let right = self.embed_unit(Side::Right, &self.project_unit(Side::Right, p)?)?;
        let both = trotter_product(&self.product, &left, &right)?;
        let correction = self.product.drift_unit(&p.beta.neg());
        let recombined = trotter_product(&self.product, &both, &correction)?;
        let beta_res = recombined.beta.distance(&p.beta);
        let zeta_res = self.product.index().norm(&recombined.zeta.sub(&p.zeta));
        Ok(beta_res.max(zeta_res))
    }

    /// Whether the decomposition holds at parameter level (residual ≤ tol).
    pub fn decompose_check(&self, p: &UnitParams, tol: f64) -> Result<bool> {
        Ok(self.decompose_residual(p)? <= tol)
    }

    /// The product morphism w = ι₁·a₁ + ι₂·a₂ of two maps a_ℓ: F → F^ℓ,
    /// together with its adjoint w* = a₁*·p₁ + a₂*·p₂.
    ///
    /// p_ℓ ∘ w = a_ℓ and ⟨w·x, y⟩ = ⟨x, w*·y⟩ hold exactly in coordinates.
    pub fn morphism_sum(
        &self,
        a1: &BimoduleMap,
        a2: &BimoduleMap,
    ) -> Result<(BimoduleMap, BimoduleMap)> {
        if a1.source() != a2.source() {
            return Err(Error::Precondition(
                "the two maps must share their source module".into(),
            ));
        }
        if a1.target() != self.left.index() || a2.target() != self.right.index() {
            return Err(Error::Precondition(
                "map targets must be the two factors".into(),
            ));
        }
        if !a1.is_bilinear(1e-12) || !a2.is_bilinear(1e-12) {
            return Err(Error::Precondition(
                "morphism summands must be two-sided linear".into(),
            ));
        }
        let d = self.product.algebra().flat_dim();
        let (kl, kr) = (self.left.index().rank(), self.right.index().rank());
        let k = kl + kr;
        let source_cols = a1.matrix().ncols();
        let mut w = nalgebra::DMatrix::zeros(k * d, source_cols);
        w.view_mut((0, 0), (kl * d, source_cols))
            .copy_from(a1.matrix());
        w.view_mut((kl * d, 0), (kr * d, source_cols))
            .copy_from(a2.matrix());
        let w = BimoduleMap::new(a1.source(), self.product.index(), w)?;
        let w_adj = w.adjoint();
        Ok((w, w_adj))
    }
}

/// Verifies the scalar-case tensor factorization on exponential units over
/// B = ℂ: the product inner product of embedded-and-Trotter-multiplied units
/// factors into the two tensor-slot inner products,
/// e^{t(⟨ζ¹,ζ¹'⟩+⟨ζ²,ζ²'⟩)} = e^{t⟨ζ¹,ζ¹'⟩}·e^{t⟨ζ²,ζ²'⟩}, and the vacuum
/// maps to ω ⊗ ω isometrically. Returns the largest residual observed.
pub fn scalar_tensor_residual(
    pair: &ProductSystemPair,
    samples: &[VectorPairSample],
    ts: &[f64],
) -> Result<f64> {
    if pair.product.algebra().block_sizes() != [1] {
        return Err(Error::Precondition(
            "tensor comparison requires the scalar algebra".into(),
        ));
    }
    let one = pair.product.algebra().unit();
    let mut res = 0.0f64;
    // vacuum pairing: ⟨ω, ω⟩ = 1 = 1·1 at every t
    for &t in ts {
        let v = pair
            .product
            .unit_inner(&pair.product.vacuum(), &pair.product.vacuum(), t, &one)?;
        res = res.max(v.distance(&one));
    }
    for ((z1, z2), (w1, w2)) in samples {
        let p = combined_exponential(pair, z1, z2)?;
        let q = combined_exponential(pair, w1, w2)?;
        let p1 = exponential(&pair.left, z1)?;
        let q1 = exponential(&pair.left, w1)?;
        let p2 = exponential(&pair.right, z2)?;
        let q2 = exponential(&pair.right, w2)?;
        for &t in ts {
            let whole = pair.product.unit_inner(&p, &q, t, &one)?.block(0)[(0, 0)];
            let f1 = pair.left.unit_inner(&p1, &q1, t, &one)?.block(0)[(0, 0)];
            let f2 = pair.right.unit_inner(&p2, &q2, t, &one)?.block(0)[(0, 0)];
            res = res.max((whole - f1 * f2).norm());
        }
    }
    Ok(res)
}

fn exponential(system: &TimeOrderedSystem, zeta: &ModuleVector) -> Result<UnitParams> {
    system.unit(AlgebraElement::zero(system.algebra()), zeta.clone())
}

fn combined_exponential(
    pair: &ProductSystemPair,
    z1: &ModuleVector,
    z2: &ModuleVector,
) -> Result<UnitParams> {
    let left = pair.embed_unit(Side::Left, &exponential(&pair.left, z1)?)?;
    let right = pair.embed_unit(Side::Right, &exponential(&pair.right, z2)?)?;
    trotter_product(&pair.product, &left, &right)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Algebra;
    use crate::units::BimoduleMap;
    use num_complex::Complex64;

    fn scalar_pair(r1: usize, r2: usize) -> ProductSystemPair {
        let a = Algebra::scalar();
        ProductSystemPair::new(&Bimodule::free(&a, r1), &Bimodule::free(&a, r2)).unwrap()
    }

    fn scalar_vec(m: &Bimodule, vals: &[Complex64]) -> ModuleVector {
        let coords = vals
            .iter()
            .map(|&z| AlgebraElement::scalar(m.algebra(), z))
            .collect();
        m.vector_from_coords(coords).unwrap()
    }

    #[test]
    fn trivial_factor_reduces_to_single_system() {
        let a = Algebra::scalar();
        let pair =
            ProductSystemPair::new(&Bimodule::free(&a, 2), &Bimodule::zero_module(&a)).unwrap();
        assert_eq!(pair.product().index().rank(), 2);
        // embedding a left unit and projecting back is the identity
        let z = scalar_vec(
            pair.factor(Side::Left).index(),
            &[Complex64::new(0.3, 0.1), Complex64::new(-0.2, 0.5)],
        );
        let p = exponential(pair.factor(Side::Left), &z).unwrap();
        let embedded = pair.embed_unit(Side::Left, &p).unwrap();
        let back = pair.project_unit(Side::Left, &embedded).unwrap();
        assert!(
            pair.factor(Side::Left)
                .index()
                .norm(&back.zeta.sub(&p.zeta))
                < 1e-15
        );
    }

    #[test]
    fn index_ranks_add() {
        let pair = scalar_pair(2, 3);
        assert_eq!(pair.product().index().rank(), 5);
        assert_eq!(
            pair.product().index().complex_dimension(),
            pair.factor(Side::Left).index().complex_dimension()
                + pair.factor(Side::Right).index().complex_dimension()
        );
    }

    #[test]
    fn both_vacua_become_the_single_vacuum() {
        let pair = scalar_pair(1, 1);
        for side in [Side::Left, Side::Right] {
            let embedded = pair.embed_unit(side, &pair.factor(side).vacuum()).unwrap();
            assert!(embedded.beta.operator_norm() < 1e-15);
            assert!(pair.product().index().norm(&embedded.zeta) < 1e-15);
        }
    }

    #[test]
    fn cross_side_generator_has_no_zeta_term() {
        // ⟨ι₁ζ₁, b·ι₂ζ₂⟩ = 0: the generator of a cross pair is β₁*·b + b·β₂
        let pair = scalar_pair(2, 2);
        let z1 = scalar_vec(
            pair.factor(Side::Left).index(),
            &[Complex64::new(0.7, -0.1), Complex64::new(0.2, 0.4)],
        );
        let z2 = scalar_vec(
            pair.factor(Side::Right).index(),
            &[Complex64::new(-0.3, 0.6), Complex64::new(0.1, 0.1)],
        );
        let b1 = AlgebraElement::scalar(pair.product().algebra(), Complex64::new(0.5, 0.2));
        let b2 = AlgebraElement::scalar(pair.product().algebra(), Complex64::new(-0.1, 0.8));
        let p1 = pair.factor(Side::Left).unit(b1.clone(), z1).unwrap();
        let p2 = pair.factor(Side::Right).unit(b2.clone(), z2).unwrap();
        let e1 = pair.embed_unit(Side::Left, &p1).unwrap();
        let e2 = pair.embed_unit(Side::Right, &p2).unwrap();
        let cross = pair.product().generator(&e1, &e2).unwrap();
        let drift_only = pair
            .product()
            .generator(
                &pair.product().drift_unit(&b1),
                &pair.product().drift_unit(&b2),
            )
            .unwrap();
        assert!(cross.distance(&drift_only) < 1e-14);
    }

    #[test]
    fn same_side_generators_preserved() {
        let pair = scalar_pair(2, 1);
        let sys = pair.factor(Side::Left);
        let z1 = scalar_vec(
            sys.index(),
            &[Complex64::new(0.7, -0.1), Complex64::new(0.2, 0.4)],
        );
        let z2 = scalar_vec(
            sys.index(),
            &[Complex64::new(-0.5, 0.3), Complex64::new(0.9, 0.0)],
        );
        let p = sys
            .unit(
                AlgebraElement::scalar(sys.algebra(), Complex64::new(0.3, 0.7)),
                z1,
            )
            .unwrap();
        let q = sys
            .unit(
                AlgebraElement::scalar(sys.algebra(), Complex64::new(-0.2, 0.1)),
                z2,
            )
            .unwrap();
        let lhs = sys.generator(&p, &q).unwrap();
        let rhs = pair
            .product()
            .generator(
                &pair.embed_unit(Side::Left, &p).unwrap(),
                &pair.embed_unit(Side::Left, &q).unwrap(),
            )
            .unwrap();
        assert!(lhs.distance(&rhs) < 1e-14);
    }

    #[test]
    fn project_embedded_to_other_side_is_a_drift_unit() {
        let pair = scalar_pair(2, 2);
        let z = scalar_vec(
            pair.factor(Side::Left).index(),
            &[Complex64::new(0.7, -0.1), Complex64::new(0.2, 0.4)],
        );
        let beta = AlgebraElement::scalar(pair.product().algebra(), Complex64::new(0.4, -0.6));
        let p = pair.factor(Side::Left).unit(beta.clone(), z).unwrap();
        let e = pair.embed_unit(Side::Left, &p).unwrap();
        let other = pair.project_unit(Side::Right, &e).unwrap();
        assert!(other.beta.distance(&beta) < 1e-15);
        assert!(pair.factor(Side::Right).index().norm(&other.zeta) < 1e-15);
    }

    #[test]
    fn vacuum_passes_decomposition() {
        let pair = scalar_pair(2, 2);
        assert!(pair
            .decompose_check(&pair.product().vacuum(), 1e-12)
            .unwrap());
    }

    #[test]
    fn product_units_decompose_exactly() {
        let pair = scalar_pair(2, 2);
        let z = scalar_vec(
            pair.product().index(),
            &[
                Complex64::new(0.7, -0.1),
                Complex64::new(0.2, 0.4),
                Complex64::new(-0.3, 0.6),
                Complex64::new(0.1, 0.1),
            ],
        );
        let p = pair
            .product()
            .unit(
                AlgebraElement::scalar(pair.product().algebra(), Complex64::new(0.8, -0.5)),
                z,
            )
            .unwrap();
        assert!(pair.decompose_residual(&p).unwrap() < 1e-12);
    }

    #[test]
    fn embedded_one_sided_unit_passes_decomposition() {
        let pair = scalar_pair(2, 1);
        let z = scalar_vec(
            pair.factor(Side::Left).index(),
            &[Complex64::new(0.7, -0.1), Complex64::new(0.2, 0.4)],
        );
        let p = pair
            .factor(Side::Left)
            .unit(
                AlgebraElement::scalar(pair.product().algebra(), Complex64::new(0.4, 0.2)),
                z,
            )
            .unwrap();
        let e = pair.embed_unit(Side::Left, &p).unwrap();
        assert!(pair.decompose_residual(&e).unwrap() < 1e-15);
    }

    #[test]
    fn morphism_sum_projects_back_to_summands() {
        let pair = scalar_pair(2, 1);
        let source = Bimodule::free(&Algebra::scalar(), 2);
        // two fixed bilinear maps (arbitrary matrices are bilinear over ℂ)
        let a1 = BimoduleMap::new(
            &source,
            pair.factor(Side::Left).index(),
            nalgebra::DMatrix::from_row_slice(
                2,
                2,
                &[
                    Complex64::new(0.3, 0.1),
                    Complex64::new(-0.2, 0.0),
                    Complex64::new(0.0, 0.7),
                    Complex64::new(0.5, -0.5),
                ],
            ),
        )
        .unwrap();
        let a2 = BimoduleMap::new(
            &source,
            pair.factor(Side::Right).index(),
            nalgebra::DMatrix::from_row_slice(
                1,
                2,
                &[Complex64::new(0.9, 0.0), Complex64::new(0.0, -0.4)],
            ),
        )
        .unwrap();
        let (w, w_adj) = pair.morphism_sum(&a1, &a2).unwrap();
        let x = scalar_vec(
            &source,
            &[Complex64::new(0.6, 0.2), Complex64::new(-0.1, 0.9)],
        );
        let wx = w.apply(&x).unwrap();
        // p_ℓ∘w = a_ℓ
        let p1 = pair.sum().project_left(&wx).unwrap();
        let p2 = pair.sum().project_right(&wx).unwrap();
        assert!(
            pair.factor(Side::Left)
                .index()
                .norm(&p1.sub(&a1.apply(&x).unwrap()))
                < 1e-14
        );
        assert!(
            pair.factor(Side::Right)
                .index()
                .norm(&p2.sub(&a2.apply(&x).unwrap()))
                < 1e-14
        );
        // adjoint identity ⟨w·x, y⟩ = ⟨x, w*·y⟩
        let y = scalar_vec(
            pair.product().index(),
            &[
                Complex64::new(0.1, 0.1),
                Complex64::new(0.4, -0.3),
                Complex64::new(-0.7, 0.2),
            ],
        );
        let lhs = pair.product().index().inner(&wx, &y).unwrap();
        let rhs = source.inner(&x, &w_adj.apply(&y).unwrap()).unwrap();
        assert!(lhs.distance(&rhs) < 1e-14);
    }

    #[test]
    fn morphism_sum_with_identity_and_zero_is_the_embedding() {
        let pair = scalar_pair(2, 1);
        let f1 = pair.factor(Side::Left).index().clone();
        let a1 = BimoduleMap::identity(&f1);
        let a2 = BimoduleMap::zero(&f1, pair.factor(Side::Right).index()).unwrap();
        let (w, _) = pair.morphism_sum(&a1, &a2).unwrap();
        let x = scalar_vec(&f1, &[Complex64::new(0.6, 0.2), Complex64::new(-0.1, 0.9)]);
        let wx = w.apply(&x).unwrap();
        let expected = pair.sum().embed_left(&x).unwrap();
        assert!(pair.product().index().norm(&wx.sub(&expected)) < 1e-14);
    }

    #[test]
    fn scalar_tensor_factorization_holds() {
        let pair = scalar_pair(2, 2);
        let f1 = pair.factor(Side::Left).index();
        let f2 = pair.factor(Side::Right).index();
        let samples = vec![
            (
                (
                    scalar_vec(f1, &[Complex64::new(0.4, 0.1), Complex64::new(-0.2, 0.3)]),
                    scalar_vec(f2, &[Complex64::new(0.8, 0.0), Complex64::new(0.1, -0.5)]),
                ),
                (
                    scalar_vec(f1, &[Complex64::new(-0.6, 0.2), Complex64::new(0.5, 0.5)]),
                    scalar_vec(f2, &[Complex64::new(0.3, 0.3), Complex64::new(-0.4, 0.0)]),
                ),
            ),
            (
                (
                    scalar_vec(f1, &[Complex64::new(0.2, -0.7), Complex64::new(0.0, 0.0)]),
                    // ζ² = 0 reduces to the factor-1 inner product
                    scalar_vec(f2, &[Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)]),
                ),
                (
                    scalar_vec(f1, &[Complex64::new(0.9, 0.1), Complex64::new(0.3, 0.0)]),
                    scalar_vec(f2, &[Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)]),
                ),
            ),
        ];
        let res = scalar_tensor_residual(&pair, &samples, &[0.1, 1.0, 2.0]).unwrap();
        assert!(res < 1e-12, "residual {res:e}");
    }

    #[test]
    fn tensor_comparison_rejects_nonscalar_algebra() {
        let a = Algebra::full_matrix(2);
        let pair = ProductSystemPair::new(&Bimodule::free(&a, 1), &Bimodule::free(&a, 1)).unwrap();
        assert!(scalar_tensor_residual(&pair, &[], &[1.0]).is_err());
    }
}
