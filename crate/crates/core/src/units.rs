//! Units of the time-ordered Fock module over an index bimodule F.
//!
//! The continuous units are parametrized by pairs (β, ζ) ∈ B × F. The
//! generator of the associated CPD-semigroup is
//!
//!   L^{(β,ζ),(β',ζ')}(b) = ⟨ζ, b·ζ'⟩ + β*·b + b·β',
//!
//! so inner products ⟨ξ_t, b·ξ'_t⟩ = exp(t·L)(b) are available in closed
//! form. A midpoint quadrature over the time-ordered simplex provides an
//! independent route to the same values through the explicit n-particle
//! components of the units.
//!
//! Units are values (parameter pairs) throughout; particle components are
//! materialized only where explicitly requested, which keeps all identity
//! checks exact in t.

use num_complex::Complex64;

use crate::algebra::{Algebra, AlgebraElement};
use crate::bimodule::{elementary_inner, Bimodule, ModuleVector, TensorPowers};
use crate::error::{Error, Result};
use crate::kernel::CpdKernel;
use crate::superop::SuperOperator;

/// The time-ordered product system determined by its index bimodule.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeOrderedSystem {
    index: Bimodule,
}

/// Parameters (β, ζ) of a continuous unit. The vacuum is (0, 0).
#[derive(Debug, Clone)]
pub struct UnitParams {
    pub beta: AlgebraElement,
    pub zeta: ModuleVector,
}

impl TimeOrderedSystem {
    pub fn new(index: Bimodule) -> Self {
        Self { index }
    }

    pub fn index(&self) -> &Bimodule {
        &self.index
    }

    pub fn algebra(&self) -> &Algebra {
        self.index.algebra()
    }

    /// The vacuum unit ω = (0, 0).
    pub fn vacuum(&self) -> UnitParams {
        UnitParams {
            beta: AlgebraElement::zero(self.algebra()),
            zeta: self.index.zero_vector(),
        }
    }

    /// The unit ω^β = (β, 0).
    pub fn drift_unit(&self, beta: &AlgebraElement) -> UnitParams {
        UnitParams {
            beta: beta.clone(),
            zeta: self.index.zero_vector(),
        }
    }

    pub fn unit(&self, beta: AlgebraElement, zeta: ModuleVector) -> Result<UnitParams> {
        self.index.check_vector(&zeta)?;
        self.algebra().check_same(beta.algebra())?;
        Ok(UnitParams { beta, zeta })
    }

    /// Generator L(b) = ⟨ζ, b·ζ'⟩ + β*·b + b·β', assembled exactly in the
    /// canonical basis.
    pub fn generator(&self, p: &UnitParams, p2: &UnitParams) -> Result<SuperOperator> {
        self.index.check_vector(&p.zeta)?;
        self.index.check_vector(&p2.zeta)?;
        let index = self.index.clone();
        let (z, z2) = (p.zeta.clone(), p2.zeta.clone());
        let (ba, b2) = (p.beta.adjoint(), p2.beta.clone());
        Ok(SuperOperator::from_fn(self.algebra(), move |b| {
            index
                .inner(&z, &index.left_mul(b, &z2).expect("checked"))
                .expect("checked")
                .add(&ba.mul(b))
                .add(&b.mul(&b2))
        }))
    }

    /// ⟨ξ_t, b·ξ'_t⟩ = exp(t·L)(b).
    pub fn unit_inner(
        &self,
        p: &UnitParams,
        p2: &UnitParams,
        t: f64,
        b: &AlgebraElement,
    ) -> Result<AlgebraElement> {
        if !(t >= 0.0) {
            return Err(Error::InvalidTime(t));
        }
        Ok(self.generator(p, p2)?.exp(t)?.apply(b))
    }

    /// The CPD kernel of generators of a labeled family of units.
    pub fn unit_kernel(&self, labeled: &[(String, UnitParams)]) -> Result<CpdKernel> {
        let labels: Vec<String> = labeled.iter().map(|(l, _)| l.clone()).collect();
        let mut entries = Vec::with_capacity(labeled.len() * labeled.len());
        for (_, p) in labeled {
            for (_, q) in labeled {
                entries.push(self.generator(p, q)?);
            }
        }
        CpdKernel::new(self.algebra(), labels, entries)
    }

    /// The n-particle component ξ_t^n(t_n, …, t_1) of the unit (β, ζ) at a
    /// strictly decreasing tuple inside (0, t), materialized in F^{⊙n}
    /// (leftmost time first). With ξ_s^0 := e^{sβ},
    ///
    ///   ξ_t^n(t_n,…,t_1) = ξ^0_{t-t_n}ζ ⊙ ξ^0_{t_n-t_{n-1}}ζ ⊙ … ⊙ ξ^0_{t_2-t_1}ζ·ξ^0_{t_1},
    ///
    /// and for the empty tuple the result is e^{tβ} inside B = F^{⊙0}.
    pub fn unit_component(
        &self,
        powers: &TensorPowers,
        p: &UnitParams,
        t: f64,
        times: &[f64],
    ) -> Result<ModuleVector> {
        if !(t > 0.0) {
            return Err(Error::InvalidTime(t));
        }
        for w in times.windows(2) {
            if !(w[0] > w[1]) {
                return Err(Error::InvalidTimeTuple(
                    "component times must be strictly decreasing".into(),
                ));
            }
        }
        if let (Some(&first), Some(&last)) = (times.first(), times.last()) {
            if !(first < t && last > 0.0) {
                return Err(Error::InvalidTimeTuple(
                    "component times must lie strictly inside (0, t)".into(),
                ));
            }
        }
        if times.is_empty() {
            let scalar = powers.power(0);
            return scalar.vector_from_coords(vec![p.beta.scale(Complex64::new(t, 0.0)).exp()]);
        }
        let factors = self.component_factors(p, t, times)?;
        powers.embed_elementary(&factors)
    }

    /// The factors of the elementary tensor above, leftmost first, without
    /// materializing the tensor power.
    pub fn component_factors(
        &self,
        p: &UnitParams,
        t: f64,
        times: &[f64],
    ) -> Result<Vec<ModuleVector>> {
        let n = times.len();
        let mut factors = Vec::with_capacity(n);
        for i in 0..n {
            let gap = if i == 0 {
                t - times[0]
            } else {
                times[i - 1] - times[i]
            };
            let left = p.beta.scale(Complex64::new(gap, 0.0)).exp();
            let mut f = self.index.left_mul(&left, &p.zeta)?;
            if i == n - 1 {
                let right = p.beta.scale(Complex64::new(times[n - 1], 0.0)).exp();
                f = self.index.right_mul(&f, &right)?;
            }
            factors.push(f);
        }
        Ok(factors)
    }

    /// Midpoint quadrature of Σ_{n≤n_max} ∫_{t>t_n>…>t_1>0} ⟨ξ_t^n, b·ξ'^n_t⟩
    /// over the order simplex with step h per axis: the independent oracle
    /// for [`TimeOrderedSystem::unit_inner`]. The rule is O(h); indicator-type
    /// integrands elsewhere in the crate defeat higher-order rules, so one
    /// rule is used everywhere.
    ///
    /// Cells are accumulated in lexicographic order; the result is
    /// deterministic.
    pub fn quadrature_inner(
        &self,
        p: &UnitParams,
        p2: &UnitParams,
        t: f64,
        b: &AlgebraElement,
        n_max: usize,
        h: f64,
    ) -> Result<AlgebraElement> {
        if !(t > 0.0) {
            return Err(Error::InvalidTime(t));
        }
        if !(h > 0.0) {
            return Err(Error::Precondition(
                "quadrature step must be positive".into(),
            ));
        }
        let exp_of = |x: &UnitParams, s: f64| x.beta.scale(Complex64::new(s, 0.0)).exp();
        let mut grid = Vec::new();
        let mut k = 0usize;
        loop {
            let s = (k as f64 + 0.5) * h;
            if s >= t {
                break;
            }
            grid.push(s);
            k += 1;
        }

        // n = 0: ⟨e^{tβ}, b·e^{tβ'}⟩
        let mut acc = exp_of(p, t).adjoint().mul(b).mul(&exp_of(p2, t));

        for n in 1..=n_max {
            if grid.len() < n {
                break;
            }
            let volume = h.powi(n as i32);
            // increasing index combinations c_0 < … < c_{n-1}; the time
            // tuple reads them backwards so times are decreasing
            let mut idx: Vec<usize> = (0..n).collect();
            loop {
                let times: Vec<f64> = idx.iter().rev().map(|&i| grid[i]).collect();
                let xs = self.component_factors(p, t, &times)?;
                let ys = self.component_factors(p2, t, &times)?;
                let val = elementary_inner(&self.index, &xs, b, &ys)?;
                acc = acc.add(&val.scale(Complex64::new(volume, 0.0)));
                if !next_combination(&mut idx, grid.len()) {
                    break;
                }
            }
        }
        Ok(acc)
    }

    /// Upper bound for the particle-number truncation tail
    /// Σ_{n>n_max} tⁿ(‖ζ‖‖ζ'‖)ⁿ e^{t(‖β‖+‖β'‖)}‖b‖/n! of
    /// [`TimeOrderedSystem::quadrature_inner`], reported alongside results.
    pub fn truncation_bound(
        &self,
        p: &UnitParams,
        p2: &UnitParams,
        t: f64,
        b_norm: f64,
        n_max: usize,
    ) -> f64 {
        let r = t * self.index.norm(&p.zeta) * self.index.norm(&p2.zeta);
        let pref = (t * (p.beta.operator_norm() + p2.beta.operator_norm())).exp() * b_norm;
        let mut term = 1.0;
        for n in 1..=n_max {
            term *= r / n as f64;
        }
        let ratio = r / (n_max as f64 + 1.0);
        let tail = if ratio < 1.0 {
            term * ratio / (1.0 - ratio)
        } else {
            term * r.exp()
        };
        pref * tail
    }

    /// Central and unital flags of a unit: central iff β commutes with B and
    /// b·ζ = ζ·b for all b; unital iff ⟨ζ,ζ⟩ + β* + β = 0 within `tol`.
    pub fn is_central_unital(&self, p: &UnitParams, tol: f64) -> Result<(bool, bool)> {
        self.index.check_vector(&p.zeta)?;
        let central_beta = p.beta.is_central(tol);
        let central_zeta = (0..self.algebra().dim()).all(|q| {
            let u = self.algebra().basis_element(q);
            let lhs = self.index.left_mul(&u, &p.zeta).expect("checked");
            let rhs = self.index.right_mul(&p.zeta, &u).expect("checked");
            self.index.norm(&lhs.sub(&rhs)) <= tol
        });
        let defect = self
            .index
            .inner(&p.zeta, &p.zeta)?
            .add(&p.beta.adjoint())
            .add(&p.beta);
        Ok((central_beta && central_zeta, defect.operator_norm() <= tol))
    }
}

/// Advances an increasing combination c_0 < … < c_{n-1} over {0, …, g-1} in
/// lexicographic order; false when exhausted.
fn next_combination(idx: &mut [usize], g: usize) -> bool {
    let n = idx.len();
    let mut i = n;
    while i > 0 {
        i -= 1;
        if idx[i] < g - (n - i) {
            idx[i] += 1;
            for j in i + 1..n {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

// ----- morphisms -----------------------------------------------------------

/// A right-linear adjointable map between modules, kept as its flat matrix.
#[derive(Debug, Clone)]
pub struct BimoduleMap {
    source: Bimodule,
    target: Bimodule,
    matrix: nalgebra::DMatrix<Complex64>,
}

impl BimoduleMap {
    pub fn new(
        source: &Bimodule,
        target: &Bimodule,
        matrix: nalgebra::DMatrix<Complex64>,
    ) -> Result<Self> {
        source.algebra().check_same(target.algebra())?;
        let d = source.algebra().flat_dim();
        if matrix.nrows() != target.rank() * d || matrix.ncols() != source.rank() * d {
            return Err(Error::DimensionMismatch {
                expected: target.rank() * d,
                found: matrix.nrows(),
            });
        }
        Ok(Self {
            source: source.clone(),
            target: target.clone(),
            matrix,
        })
    }

    /// The identity of a module (the flat matrix of π(1)).
    pub fn identity(module: &Bimodule) -> Self {
        Self {
            source: module.clone(),
            target: module.clone(),
            matrix: module.projection_flat().clone(),
        }
    }

    pub fn zero(source: &Bimodule, target: &Bimodule) -> Result<Self> {
        source.algebra().check_same(target.algebra())?;
        let d = source.algebra().flat_dim();
        Ok(Self {
            source: source.clone(),
            target: target.clone(),
            matrix: nalgebra::DMatrix::zeros(target.rank() * d, source.rank() * d),
        })
    }

    pub fn source(&self) -> &Bimodule {
        &self.source
    }

    pub fn target(&self) -> &Bimodule {
        &self.target
    }

    pub fn matrix(&self) -> &nalgebra::DMatrix<Complex64> {
        &self.matrix
    }

    pub fn apply(&self, x: &ModuleVector) -> Result<ModuleVector> {
        self.source.check_vector(x)?;
        let flat = &self.matrix * self.source.flatten_vector(x);
        Ok(self.target.unflatten_vector(&flat))
    }

    /// The adjoint; ⟨a·x, y⟩ = ⟨x, a*·y⟩ holds exactly in coordinates.
    pub fn adjoint(&self) -> Self {
        Self {
            source: self.target.clone(),
            target: self.source.clone(),
            matrix: self.matrix.adjoint(),
        }
    }

    /// self ∘ other.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.source != other.target {
            return Err(Error::Precondition(
                "map composition source/target mismatch".into(),
            ));
        }
        Ok(Self {
            source: other.source.clone(),
            target: self.target.clone(),
            matrix: &self.matrix * &other.matrix,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.source != other.source || self.target != other.target {
            return Err(Error::Precondition("map addition shape mismatch".into()));
        }
        Ok(Self {
            source: self.source.clone(),
            target: self.target.clone(),
            matrix: &self.matrix + &other.matrix,
        })
    }

    pub fn scale(&self, z: Complex64) -> Self {
        Self {
            source: self.source.clone(),
            target: self.target.clone(),
            matrix: &self.matrix * z,
        }
    }

    /// Residual of two-sided linearity: sup over the basis of
    /// ||A·π_F(u_p) - π_{F'}(u_p)·A||, the mass outside the corner P'·A·P,
    /// and the mass outside the block structure of B.
    pub fn bilinearity_residual(&self) -> f64 {
        let mut res = 0.0f64;
        for p in 0..self.source.algebra().dim() {
            let lhs = &self.matrix * self.source.action_basis(p);
            let rhs = self.target.action_basis(p) * &self.matrix;
            res = res.max((lhs - rhs).norm());
        }
        let corner = self.target.projection_flat() * &self.matrix * self.source.projection_flat();
        res = res.max((&self.matrix - corner).norm());
        let d = self.source.algebra().flat_dim();
        let algebra = self.source.algebra();
        for i in 0..self.target.rank() {
            for i2 in 0..self.source.rank() {
                let sub = self.matrix.view((i * d, i2 * d), (d, d));
                for (j, &dj) in algebra.block_sizes().iter().enumerate() {
                    let oj = algebra.flat_offset(j);
                    for r in 0..dj {
                        for c in 0..d {
                            if c < oj || c >= oj + dj {
                                res = res.max(sub[(oj + r, c)].norm());
                            }
                        }
                    }
                }
            }
        }
        res
    }

    pub fn is_bilinear(&self, tol: f64) -> bool {
        self.bilinearity_residual() <= tol * self.matrix.norm().max(1.0)
    }

    /// Two-sided unitarity: a*·a and a·a* are the identities (projections)
    /// of the source and target modules.
    pub fn is_unitary(&self, tol: f64) -> bool {
        let aa = self.matrix.adjoint() * &self.matrix;
        let aat = &self.matrix * self.matrix.adjoint();
        (aa - self.source.projection_flat()).norm() <= tol
            && (aat - self.target.projection_flat()).norm() <= tol
    }
}

/// The matrix Γ = (γ, η*; η', a) of a morphism between time-ordered systems,
/// acting on units as (β, ζ) ↦ (γ + β + ⟨η, ζ⟩, η' + a·ζ).
#[derive(Debug, Clone)]
pub struct MorphismMatrix {
    pub gamma: AlgebraElement,
    pub eta: ModuleVector,
    pub eta_prime: ModuleVector,
    pub map: BimoduleMap,
}

impl MorphismMatrix {
    /// Validates shapes and the two-sided linearity of the corner map.
    pub fn new(
        source: &TimeOrderedSystem,
        target: &TimeOrderedSystem,
        gamma: AlgebraElement,
        eta: ModuleVector,
        eta_prime: ModuleVector,
        map: BimoduleMap,
    ) -> Result<Self> {
        source.index().check_vector(&eta)?;
        target.index().check_vector(&eta_prime)?;
        if map.source() != source.index() || map.target() != target.index() {
            return Err(Error::Precondition(
                "morphism corner map does not connect the given systems".into(),
            ));
        }
        if !map.is_bilinear(1e-12) {
            return Err(Error::Precondition(format!(
                "morphism corner map is not two-sided linear (residual {:e})",
                map.bilinearity_residual()
            )));
        }
        Ok(Self {
            gamma,
            eta,
            eta_prime,
            map,
        })
    }

    pub fn identity(system: &TimeOrderedSystem) -> Self {
        Self {
            gamma: AlgebraElement::zero(system.algebra()),
            eta: system.index().zero_vector(),
            eta_prime: system.index().zero_vector(),
            map: BimoduleMap::identity(system.index()),
        }
    }

    /// Action on units: (β, ζ) ↦ (γ + β + ⟨η, ζ⟩, η' + a·ζ).
    pub fn apply(&self, source: &TimeOrderedSystem, p: &UnitParams) -> Result<UnitParams> {
        source.index().check_vector(&p.zeta)?;
        let beta = self
            .gamma
            .add(&p.beta)
            .add(&source.index().inner(&self.eta, &p.zeta)?);
        let zeta = self.eta_prime.add(&self.map.apply(&p.zeta)?);
        Ok(UnitParams { beta, zeta })
    }

    /// The adjoint morphism matrix Γ* = (γ*, η'*; η, a*).
    pub fn adjoint(&self) -> Self {
        Self {
            gamma: self.gamma.adjoint(),
            eta: self.eta_prime.clone(),
            eta_prime: self.eta.clone(),
            map: self.map.adjoint(),
        }
    }

    /// Isomorphism test: the corner map must be two-sided linear and a
    /// two-sided unitary.
    pub fn is_isomorphism(&self, tol: f64) -> bool {
        self.map.is_bilinear(tol) && self.map.is_unitary(tol)
    }

    /// Whether Γ satisfies the automorphism constraints: unitary corner,
    /// η' central, η = -a*·η', Re γ = -⟨η',η'⟩/2 and Im γ central.
    pub fn satisfies_automorphism_constraints(
        &self,
        target: &TimeOrderedSystem,
        tol: f64,
    ) -> Result<bool> {
        if !self.is_isomorphism(tol) {
            return Ok(false);
        }
        let index = target.index();
        let central = (0..target.algebra().dim()).all(|q| {
            let u = target.algebra().basis_element(q);
            let lhs = index.left_mul(&u, &self.eta_prime).expect("checked");
            let rhs = index.right_mul(&self.eta_prime, &u).expect("checked");
            index.norm(&lhs.sub(&rhs)) <= tol
        });
        if !central {
            return Ok(false);
        }
        let eta_expected = self
            .map
            .adjoint()
            .apply(&self.eta_prime)?
            .scale(Complex64::new(-1.0, 0.0));
        if self.map.source().norm(&self.eta.sub(&eta_expected)) > tol {
            return Ok(false);
        }
        let re_defect = self
            .gamma
            .add(&self.gamma.adjoint())
            .add(&index.inner(&self.eta_prime, &self.eta_prime)?);
        if re_defect.operator_norm() > tol {
            return Ok(false);
        }
        Ok(self.gamma.sub(&self.gamma.adjoint()).is_central(tol))
    }

    /// A morphism is spatial when it fixes the vacuum in both directions.
    /// Implemented as an explicit check of the two vacuum conditions (which
    /// forces γ = 0, η = 0, η' = 0), not assumed from the matrix form.
    pub fn is_spatial(
        &self,
        source: &TimeOrderedSystem,
        target: &TimeOrderedSystem,
        tol: f64,
    ) -> Result<bool> {
        let fwd = self.apply(source, &source.vacuum())?;
        let bwd = self.adjoint().apply(target, &target.vacuum())?;
        Ok(fwd.beta.operator_norm() <= tol
            && target.index().norm(&fwd.zeta) <= tol
            && bwd.beta.operator_norm() <= tol
            && source.index().norm(&bwd.zeta) <= tol)
    }
}

/// The automorphism sending the vacuum to a central unital unit (β, ζ):
/// Γ = (γ = β, η = -ζ; η' = ζ, a = id).
pub fn automorphism_to(system: &TimeOrderedSystem, p: &UnitParams) -> Result<MorphismMatrix> {
    let (central, unital) = system.is_central_unital(p, 1e-10)?;
    if !central || !unital {
        return Err(Error::Precondition(
            "automorphism target must be a central unital unit".into(),
        ));
    }
    MorphismMatrix::new(
        system,
        system,
        p.beta.clone(),
        p.zeta.scale(Complex64::new(-1.0, 0.0)),
        p.zeta.clone(),
        BimoduleMap::identity(system.index()),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bimodule::Bimodule;

    fn scalar_system(dim_f: usize) -> TimeOrderedSystem {
        TimeOrderedSystem::new(Bimodule::free(&Algebra::scalar(), dim_f))
    }

    fn scalar_unit(sys: &TimeOrderedSystem, beta: Complex64, zeta: &[Complex64]) -> UnitParams {
        let a = sys.algebra();
        let coords = zeta.iter().map(|&z| AlgebraElement::scalar(a, z)).collect();
        sys.unit(
            AlgebraElement::scalar(a, beta),
            sys.index().vector_from_coords(coords).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn vacuum_pair_has_zero_generator() {
        let sys = scalar_system(2);
        let l = sys.generator(&sys.vacuum(), &sys.vacuum()).unwrap();
        assert!(l.norm() < 1e-15);
    }

    #[test]
    fn vacuum_inner_is_identity_for_all_t() {
        let sys = scalar_system(2);
        let b = AlgebraElement::scalar(sys.algebra(), Complex64::new(0.3, -0.7));
        for &t in &[0.0, 0.5, 2.0] {
            let v = sys.unit_inner(&sys.vacuum(), &sys.vacuum(), t, &b).unwrap();
            assert!(v.distance(&b) < 1e-14);
        }
    }

    #[test]
    fn drift_only_generator() {
        // ζ = ζ' = 0 gives L(b) = β*·b + b·β'
        let sys = scalar_system(1);
        let p = scalar_unit(&sys, Complex64::new(0.2, 0.4), &[Complex64::new(0.0, 0.0)]);
        let q = scalar_unit(&sys, Complex64::new(-0.1, 0.3), &[Complex64::new(0.0, 0.0)]);
        let l = sys.generator(&p, &q).unwrap();
        let got = l.apply(&sys.algebra().unit()).block(0)[(0, 0)];
        let expect = Complex64::new(0.2, 0.4).conj() + Complex64::new(-0.1, 0.3);
        assert!((got - expect).norm() < 1e-15);
    }

    #[test]
    fn scalar_exponential_inner() {
        // B = ℂ: ⟨ξ_t(0,ζ), ξ_t(0,ζ')⟩ = e^{t·conj(ζ)ζ'}; series oracle
        let sys = scalar_system(1);
        let (z, z2) = (Complex64::new(0.6, -0.2), Complex64::new(-0.4, 0.9));
        let p = scalar_unit(&sys, Complex64::new(0.0, 0.0), &[z]);
        let q = scalar_unit(&sys, Complex64::new(0.0, 0.0), &[z2]);
        let t = 1.4;
        let got = sys
            .unit_inner(&p, &q, t, &sys.algebra().unit())
            .unwrap()
            .block(0)[(0, 0)];
        let lambda = z.conj() * z2;
        let mut series = Complex64::new(0.0, 0.0);
        let mut term = Complex64::new(1.0, 0.0);
        for k in 0..60 {
            if k > 0 {
                term *= lambda * t / k as f64;
            }
            series += term;
        }
        assert!((got - series).norm() < 1e-12);
    }

    #[test]
    fn component_empty_tuple_is_exp_beta() {
        let sys = scalar_system(1);
        let p = scalar_unit(&sys, Complex64::new(0.3, 0.1), &[Complex64::new(1.0, 0.0)]);
        let powers = TensorPowers::new(sys.index(), 1).unwrap();
        let c = sys.unit_component(&powers, &p, 2.0, &[]).unwrap();
        let got = c.coords()[0].block(0)[(0, 0)];
        let expect = (Complex64::new(0.3, 0.1) * 2.0).exp();
        assert!((got - expect).norm() < 1e-13);
    }

    #[test]
    fn component_with_zero_drift_is_constant_zeta() {
        let sys = scalar_system(2);
        let z = [Complex64::new(0.7, 0.2), Complex64::new(-0.1, 0.5)];
        let p = scalar_unit(&sys, Complex64::new(0.0, 0.0), &z);
        let powers = TensorPowers::new(sys.index(), 2).unwrap();
        // n = 1: the component is ζ itself
        let c = sys.unit_component(&powers, &p, 1.0, &[0.4]).unwrap();
        assert!(sys.index().norm(&c.sub(&p.zeta)) < 1e-13);
        // n = 2, β = 0: ζ ⊙ ζ
        let c2 = sys.unit_component(&powers, &p, 1.0, &[0.8, 0.3]).unwrap();
        let elementary = powers
            .embed_elementary(&[p.zeta.clone(), p.zeta.clone()])
            .unwrap();
        let m = powers.power(2);
        assert!(m.norm(&c2.sub(&elementary)) < 1e-12);
    }

    #[test]
    fn component_rejects_bad_tuples() {
        let sys = scalar_system(1);
        let p = scalar_unit(&sys, Complex64::new(0.0, 0.0), &[Complex64::new(1.0, 0.0)]);
        let powers = TensorPowers::new(sys.index(), 2).unwrap();
        assert!(sys.unit_component(&powers, &p, 1.0, &[0.2, 0.6]).is_err());
        assert!(sys.unit_component(&powers, &p, 1.0, &[1.2]).is_err());
    }

    #[test]
    fn quadrature_vacuum_returns_b_exactly() {
        let sys = scalar_system(1);
        let b = AlgebraElement::scalar(sys.algebra(), Complex64::new(0.8, -0.3));
        let q = sys
            .quadrature_inner(&sys.vacuum(), &sys.vacuum(), 1.0, &b, 4, 0.25)
            .unwrap();
        assert!(q.distance(&b) < 1e-15);
    }

    #[test]
    fn quadrature_partial_sums_approach_exponential() {
        // B = ℂ, ζ = 1, β = 0: the partial sums Σ_{n≤n_max} C(G,n)hⁿ climb
        // towards (1+h)^G, the h-discretization of e^t
        let sys = scalar_system(1);
        let p = scalar_unit(&sys, Complex64::new(0.0, 0.0), &[Complex64::new(1.0, 0.0)]);
        let one = sys.algebra().unit();
        let t = 1.0;
        let h: f64 = 1.0 / 8.0;
        let limit = (1.0 + h).powi(8);
        let mut prev_gap = f64::INFINITY;
        for n_max in [1usize, 2, 4, 8] {
            let q = sys.quadrature_inner(&p, &p, t, &one, n_max, h).unwrap();
            let gap = (q.block(0)[(0, 0)].re - limit).abs();
            assert!(gap < prev_gap + 1e-12);
            prev_gap = gap;
        }
        // n_max = 8 exhausts all of G = 8 axes: the sum is exact
        assert!(prev_gap < 1e-12);
        // and the discretized value itself sits within O(h) of e^t
        assert!((limit - t.exp()).abs() < 2.0 * h);
    }

    #[test]
    fn quadrature_matches_closed_form_linearly_in_h() {
        let sys = scalar_system(1);
        let p = scalar_unit(&sys, Complex64::new(0.1, -0.2), &[Complex64::new(0.8, 0.1)]);
        let q = scalar_unit(
            &sys,
            Complex64::new(-0.2, 0.1),
            &[Complex64::new(0.5, -0.4)],
        );
        let one = sys.algebra().unit();
        let t = 0.5;
        let closed = sys.unit_inner(&p, &q, t, &one).unwrap();
        let n_max = 6;
        let errs: Vec<f64> = [1.0 / 8.0, 1.0 / 16.0, 1.0 / 32.0]
            .iter()
            .map(|&h| {
                sys.quadrature_inner(&p, &q, t, &one, n_max, h)
                    .unwrap()
                    .distance(&closed)
            })
            .collect();
        // successive halving should at least shrink close to linearly
        assert!(errs[1] < errs[0] * 0.7, "errors {errs:?}");
        assert!(errs[2] < errs[1] * 0.7, "errors {errs:?}");
        let tail = sys.truncation_bound(&p, &q, t, 1.0, n_max);
        assert!(
            errs[2] < 5.0 * (1.0 / 32.0) + tail,
            "errors {errs:?} tail {tail:e}"
        );
    }

    #[test]
    fn identity_morphism_fixes_units() {
        let sys = scalar_system(2);
        let p = scalar_unit(
            &sys,
            Complex64::new(0.2, 0.1),
            &[Complex64::new(0.5, 0.0), Complex64::new(0.0, 0.3)],
        );
        let id = MorphismMatrix::identity(&sys);
        let q = id.apply(&sys, &p).unwrap();
        assert!(q.beta.distance(&p.beta) < 1e-15);
        assert!(sys.index().norm(&q.zeta.sub(&p.zeta)) < 1e-15);
        assert!(id.is_isomorphism(1e-10));
        assert!(id.is_spatial(&sys, &sys, 1e-12).unwrap());
    }

    #[test]
    fn morphism_without_eta_shifts_acts_as_drift_plus_map() {
        // η = 0, η' = 0: (β, ζ) ↦ (γ + β, a·ζ)
        let sys = scalar_system(2);
        let gamma = AlgebraElement::scalar(sys.algebra(), Complex64::new(0.4, -0.9));
        let a_mat = nalgebra::DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(0.0, 1.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(-1.0, 0.0),
            ],
        );
        let map = BimoduleMap::new(sys.index(), sys.index(), a_mat).unwrap();
        let m = MorphismMatrix::new(
            &sys,
            &sys,
            gamma.clone(),
            sys.index().zero_vector(),
            sys.index().zero_vector(),
            map.clone(),
        )
        .unwrap();
        let p = scalar_unit(
            &sys,
            Complex64::new(0.2, 0.1),
            &[Complex64::new(0.5, 0.0), Complex64::new(0.0, 0.3)],
        );
        let q = m.apply(&sys, &p).unwrap();
        assert!(q.beta.distance(&gamma.add(&p.beta)) < 1e-15);
        assert!(sys.index().norm(&q.zeta.sub(&map.apply(&p.zeta).unwrap())) < 1e-15);
        // the chosen a is a 2×2 unitary over ℂ, so this is an isomorphism
        assert!(m.is_isomorphism(1e-10));
    }

    #[test]
    fn zero_corner_map_is_not_an_isomorphism() {
        let sys = scalar_system(2);
        let zero = BimoduleMap::zero(sys.index(), sys.index()).unwrap();
        let gamma = AlgebraElement::zero(sys.algebra());
        let m = MorphismMatrix::new(
            &sys,
            &sys,
            gamma,
            sys.index().zero_vector(),
            sys.index().zero_vector(),
            zero,
        )
        .unwrap();
        assert!(!m.is_isomorphism(1e-10));
    }

    #[test]
    fn vacuum_is_central_unital() {
        let sys = scalar_system(2);
        let (c, u) = sys.is_central_unital(&sys.vacuum(), 1e-10).unwrap();
        assert!(c && u);
    }

    #[test]
    fn drift_unit_with_positive_beta_is_not_unital() {
        // (1, 0) has ⟨ξ_t, ξ_t⟩ = e^{2t}; evaluate through unit_inner
        let sys = scalar_system(1);
        let p = sys.drift_unit(&sys.algebra().unit());
        let (_, unital) = sys.is_central_unital(&p, 1e-10).unwrap();
        assert!(!unital);
        let v = sys
            .unit_inner(&p, &p, 1.0, &sys.algebra().unit())
            .unwrap()
            .block(0)[(0, 0)];
        assert!((v.re - (2.0f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn automorphism_to_vacuum_is_the_identity() {
        let sys = scalar_system(1);
        let g = automorphism_to(&sys, &sys.vacuum()).unwrap();
        assert!(g.gamma.operator_norm() == 0.0);
        assert!(sys.index().norm(&g.eta) == 0.0);
        assert!(sys.index().norm(&g.eta_prime) == 0.0);
        assert!((g.map.matrix() - sys.index().projection_flat()).norm() == 0.0);
    }

    #[test]
    fn automorphism_recipe_on_scalar_system() {
        // B = ℂ, F = ℂ, ζ = 1, β = -1/2: Γ data is (-1/2, -1; 1, 1)
        let sys = scalar_system(1);
        let p = scalar_unit(&sys, Complex64::new(-0.5, 0.0), &[Complex64::new(1.0, 0.0)]);
        let (c, u) = sys.is_central_unital(&p, 1e-10).unwrap();
        assert!(c && u);
        let g = automorphism_to(&sys, &p).unwrap();
        assert!((g.gamma.block(0)[(0, 0)] - Complex64::new(-0.5, 0.0)).norm() < 1e-15);
        assert!((g.eta.coords()[0].block(0)[(0, 0)] - Complex64::new(-1.0, 0.0)).norm() < 1e-15);
        assert!(
            (g.eta_prime.coords()[0].block(0)[(0, 0)] - Complex64::new(1.0, 0.0)).norm() < 1e-15
        );
        assert!(g.is_isomorphism(1e-10));
        assert!(g.satisfies_automorphism_constraints(&sys, 1e-10).unwrap());
        // vacuum goes to p
        let v = g.apply(&sys, &sys.vacuum()).unwrap();
        assert!(v.beta.distance(&p.beta) < 1e-14);
        assert!(sys.index().norm(&v.zeta.sub(&p.zeta)) < 1e-14);
    }

    #[test]
    fn automorphisms_preserve_generators() {
        let sys = scalar_system(1);
        let target = scalar_unit(
            &sys,
            Complex64::new(-0.2, 0.7),
            &[Complex64::new(0.632455532033676, 0.0)],
        );
        // ⟨ζ,ζ⟩ = 0.4, so Re β must be -0.2
        let (c, u) = sys.is_central_unital(&target, 1e-9).unwrap();
        assert!(c && u);
        let g = automorphism_to(&sys, &target).unwrap();
        let p = scalar_unit(&sys, Complex64::new(0.3, -0.4), &[Complex64::new(0.9, 0.2)]);
        let q = scalar_unit(
            &sys,
            Complex64::new(-0.1, 0.6),
            &[Complex64::new(-0.3, 0.8)],
        );
        let before = sys.generator(&p, &q).unwrap();
        let after = sys
            .generator(&g.apply(&sys, &p).unwrap(), &g.apply(&sys, &q).unwrap())
            .unwrap();
        assert!(before.distance(&after) < 1e-12);
    }

    #[test]
    fn unit_kernel_semigroup_is_unital_at_vacuum() {
        // 𝔘_t^{ω,ω} = id for all t
        let sys = scalar_system(2);
        let p = scalar_unit(
            &sys,
            Complex64::new(0.1, 0.2),
            &[Complex64::new(0.4, 0.0), Complex64::new(0.0, -0.6)],
        );
        let kernel = sys
            .unit_kernel(&[("w".into(), sys.vacuum()), ("p".into(), p)])
            .unwrap();
        for &t in &[0.3, 1.1] {
            let kt = kernel.at_time(t).unwrap();
            let w = kt.entry(0, 0);
            assert!(w.distance(&SuperOperator::identity(sys.algebra())) < 1e-12);
        }
    }
}
