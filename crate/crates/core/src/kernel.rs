//! Operator-valued kernels on a finite index set: complete positive
//! definiteness, Kolmogorov decomposition, entrywise semigroup evaluation and
//! the Christensen-Evans split of a generator.

use num_complex::Complex64;

use crate::algebra::{hermitian_eigenvalues, Algebra, AlgebraElement};
use crate::bimodule::{canonicalize, BMatrix, Bimodule, GeneratorPresentation, ModuleVector};
use crate::error::{Error, Result};
use crate::superop::SuperOperator;

/// Default relative tolerance for positivity certification.
pub const PSD_TOL: f64 = 1e-9;

/// A kernel S × S → B(B) with hermitian symmetry K^{s,s'}(b)* = K^{s',s}(b*).
#[derive(Debug, Clone)]
pub struct CpdKernel {
    algebra: Algebra,
    labels: Vec<String>,
    entries: Vec<SuperOperator>,
}

impl CpdKernel {
    /// Builds a kernel from row-major entries, validating distinct labels and
    /// hermitian symmetry (within 1e-12 relative to the largest entry norm).
    pub fn new(
        algebra: &Algebra,
        labels: Vec<String>,
        entries: Vec<SuperOperator>,
    ) -> Result<Self> {
        let n = labels.len();
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(Error::DuplicateLabel(l.clone()));
            }
        }
        if entries.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: entries.len(),
            });
        }
        let kernel = Self {
            algebra: algebra.clone(),
            labels,
            entries,
        };
        let residual = kernel.symmetry_residual();
        let scale = kernel
            .entries
            .iter()
            .map(|t| t.norm())
            .fold(1.0f64, f64::max);
        if residual > 1e-12 * scale {
            return Err(Error::KernelNotSymmetric { residual });
        }
        Ok(kernel)
    }

    /// The Kolmogorov-form kernel K^{s,s'}(b) = ⟨x_s, b·x_{s'}⟩ of a family
    /// of module vectors.
    pub fn from_vectors(module: &Bimodule, labeled: &[(String, ModuleVector)]) -> Result<Self> {
        let algebra = module.algebra().clone();
        let labels: Vec<String> = labeled.iter().map(|(l, _)| l.clone()).collect();
        let mut entries = Vec::with_capacity(labeled.len() * labeled.len());
        for (_, x) in labeled {
            for (_, y) in labeled {
                entries.push(SuperOperator::from_fn(&algebra, |b| {
                    module
                        .inner(x, &module.left_mul(b, y).expect("validated"))
                        .expect("validated")
                }));
            }
        }
        Self::new(&algebra, labels, entries)
    }

    pub fn algebra(&self) -> &Algebra {
        &self.algebra
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn size(&self) -> usize {
        self.labels.len()
    }

    pub fn label_index(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn entry(&self, row: usize, col: usize) -> &SuperOperator {
        &self.entries[row * self.labels.len() + col]
    }

    /// max over entries and basis elements of ||K^{s,s'}(u)* - K^{s',s}(u*)||.
    pub fn symmetry_residual(&self) -> f64 {
        let n = self.labels.len();
        let mut res = 0.0f64;
        for r in 0..n {
            for c in 0..n {
                for p in 0..self.algebra.dim() {
                    let u = self.algebra.basis_element(p);
                    let lhs = self.entry(r, c).apply(&u).adjoint();
                    let rhs = self.entry(c, r).apply(&u.adjoint());
                    res = res.max(lhs.distance(&rhs));
                }
            }
        }
        res
    }

    /// The scalar matrix with blocks K^{s,s'}(u_p*·u_q), rows (s,p), columns
    /// (s',q), flattened through B ⊂ M_d(ℂ).
    ///
    /// Positivity of this single matrix certifies complete positive
    /// definiteness: arbitrary families Σ b_i* K^{s_i,s_j}(a_i*·a_j) b_j
    /// reduce to it by expanding the a_i over matrix units, and repeated
    /// labels are compressions of amplifications of this matrix.
    pub fn flattened_matrix(&self) -> nalgebra::DMatrix<Complex64> {
        let n = self.labels.len();
        let dim = self.algebra.dim();
        let d = self.algebra.flat_dim();
        let side = n * dim * d;
        let mut m = nalgebra::DMatrix::zeros(side, side);
        for s in 0..n {
            for s2 in 0..n {
                let k = self.entry(s, s2);
                for p in 0..dim {
                    let up = self.algebra.basis_element(p).adjoint();
                    for q in 0..dim {
                        let uq = self.algebra.basis_element(q);
                        let val = k.apply(&up.mul(&uq)).to_flat();
                        m.view_mut(((s * dim + p) * d, (s2 * dim + q) * d), (d, d))
                            .copy_from(&val);
                    }
                }
            }
        }
        m
    }

    /// Smallest eigenvalue of the flattened matrix, relative scale included.
    fn flattened_spectrum(&self) -> (f64, f64) {
        let eig = hermitian_eigenvalues(&self.flattened_matrix());
        let min = eig.first().copied().unwrap_or(0.0);
        let scale = eig.iter().fold(0.0f64, |m, &l| m.max(l.abs()));
        (min, scale)
    }

    /// Complete positive definiteness within `tol` (relative).
    pub fn is_cpd(&self, tol: f64) -> Result<bool> {
        let (min, scale) = self.flattened_spectrum();
        Ok(min >= -tol * scale.max(1e-300))
    }

    /// Kolmogorov decomposition: a module F and vectors ζ_s with
    /// ⟨ζ_s, b·ζ_{s'}⟩ = K^{s,s'}(b), where F is generated by {b·ζ_s·b'}.
    pub fn kolmogorov(&self) -> Result<KolmogorovDecomposition> {
        let (min, scale) = self.flattened_spectrum();
        if min < -PSD_TOL * scale.max(1e-300) {
            return Err(Error::NotCpd {
                min_eigenvalue: min,
            });
        }
        let n = self.labels.len();
        let dim = self.algebra.dim();
        let nsym = n * dim;
        // symbols (s, p) stand for u_p·ζ_s; Gram from the kernel
        let mut gram = BMatrix::zero(&self.algebra, nsym);
        for s in 0..n {
            for p in 0..dim {
                let up = self.algebra.basis_element(p);
                for s2 in 0..n {
                    for q in 0..dim {
                        let uq = self.algebra.basis_element(q);
                        gram.set(
                            s * dim + p,
                            s2 * dim + q,
                            self.entry(s, s2).apply(&up.adjoint().mul(&uq)),
                        );
                    }
                }
            }
        }
        // left action: u_q·(u_p·ζ_s) expands over symbols (s, r) with the
        // scalar coefficients of u_q·u_p in the basis
        let mut action = Vec::with_capacity(dim);
        for q in 0..dim {
            let uq = self.algebra.basis_element(q);
            let mut m = BMatrix::zero(&self.algebra, nsym);
            for s in 0..n {
                for p in 0..dim {
                    let prod = uq.mul(&self.algebra.basis_element(p)).to_coords();
                    for r in 0..dim {
                        if prod[r] != Complex64::new(0.0, 0.0) {
                            m.set(
                                s * dim + r,
                                s * dim + p,
                                AlgebraElement::scalar(&self.algebra, prod[r]),
                            );
                        }
                    }
                }
            }
            action.push(m);
        }
        let canonical = canonicalize(&GeneratorPresentation {
            algebra: self.algebra.clone(),
            gram,
            action,
        })?;
        // ζ_s = Σ_p (coords of 1)_p · image(s, p)
        let unit_coords = self.algebra.unit().to_coords();
        let vectors = (0..n)
            .map(|s| {
                let mut acc = canonical.module.zero_vector();
                for p in 0..dim {
                    if unit_coords[p] != Complex64::new(0.0, 0.0) {
                        acc = acc.add(&canonical.images[s * dim + p].scale(unit_coords[p]));
                    }
                }
                acc
            })
            .collect();
        Ok(KolmogorovDecomposition {
            labels: self.labels.clone(),
            module: canonical.module,
            vectors,
            block_ranks: canonical.block_ranks,
        })
    }

    /// Entrywise exp(t·K), the CPD-semigroup at time t of a generator kernel.
    pub fn at_time(&self, t: f64) -> Result<CpdKernel> {
        if !(t >= 0.0) {
            return Err(Error::InvalidTime(t));
        }
        let entries = self
            .entries
            .iter()
            .map(|l| l.exp(t))
            .collect::<Result<Vec<_>>>()?;
        // exp(t·L) of a symmetric kernel is symmetric again
        Ok(Self {
            algebra: self.algebra.clone(),
            labels: self.labels.clone(),
            entries,
        })
    }

    /// Entrywise composition self^{s,s'} ∘ other^{s,s'}.
    pub fn compose_entrywise(&self, other: &CpdKernel) -> Result<CpdKernel> {
        if self.labels != other.labels {
            return Err(Error::Precondition(
                "kernels have different label sets".into(),
            ));
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.compose(b))
            .collect();
        Ok(Self {
            algebra: self.algebra.clone(),
            labels: self.labels.clone(),
            entries,
        })
    }

    pub fn distance(&self, other: &CpdKernel) -> f64 {
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.distance(b))
            .fold(0.0, f64::max)
    }

    /// Christensen-Evans split of a generator kernel with respect to the
    /// reference label ω: L^{s,s'}(b) = L0^{s,s'}(b) + β_s*·b + b·β_{s'} with
    /// L0 completely positive definite, β_s = L^{ω,s}(1) and β_ω = 0.
    ///
    /// The ω row must behave as a central unital row, L^{ω,s}(b) = b·L^{ω,s}(1)
    /// with L^{ω,ω} = 0, within `tol`. A split whose L0 fails complete
    /// positive definiteness is reported (not repaired): the kernel is then
    /// not a CE-generator with respect to ω, and whether it can still arise
    /// from a genuine product system is not decided here.
    pub fn ce_split(&self, reference: &str, tol: f64) -> Result<CeSplit> {
        let w = self.label_index(reference)?;
        let n = self.labels.len();
        let scale = self.entries.iter().map(|t| t.norm()).fold(1.0f64, f64::max);
        // the ω row must be b ↦ b·β_s
        let mut betas = Vec::with_capacity(n);
        let mut row_residual = 0.0f64;
        for s in 0..n {
            let beta = self.entry(w, s).apply(&self.algebra.unit());
            let expected = SuperOperator::right_mult(&beta);
            row_residual = row_residual.max(self.entry(w, s).distance(&expected));
            betas.push(beta);
        }
        // unitality of the reference: L^{ω,ω} = 0, hence β_ω = 0
        row_residual = row_residual.max(self.entry(w, w).norm());
        if row_residual > tol * scale {
            return Err(Error::ReferenceNotCentral {
                label: reference.to_string(),
                residual: row_residual,
            });
        }
        let mut entries = Vec::with_capacity(n * n);
        for s in 0..n {
            let left = SuperOperator::left_mult(&betas[s].adjoint());
            for s2 in 0..n {
                let right = SuperOperator::right_mult(&betas[s2]);
                entries.push(self.entry(s, s2).sub(&left).sub(&right));
            }
        }
        let l0 = CpdKernel {
            algebra: self.algebra.clone(),
            labels: self.labels.clone(),
            entries,
        };
        let (min, spec_scale) = l0.flattened_spectrum();
        if min < -PSD_TOL * spec_scale.max(1e-300) {
            return Err(Error::NotCeGenerator {
                min_eigenvalue: min,
            });
        }
        Ok(CeSplit {
            reference: reference.to_string(),
            betas,
            l0,
        })
    }
}

/// Kolmogorov decomposition of a CPD kernel.
#[derive(Debug, Clone)]
pub struct KolmogorovDecomposition {
    pub labels: Vec<String>,
    pub module: Bimodule,
    pub vectors: Vec<ModuleVector>,
    pub block_ranks: Vec<usize>,
}

impl KolmogorovDecomposition {
    /// Rebuilds the kernel ⟨ζ_s, b·ζ_{s'}⟩ for round-trip checks.
    pub fn kernel(&self) -> Result<CpdKernel> {
        let labeled: Vec<(String, ModuleVector)> = self
            .labels
            .iter()
            .cloned()
            .zip(self.vectors.iter().cloned())
            .collect();
        CpdKernel::from_vectors(&self.module, &labeled)
    }
}

/// The data of a Christensen-Evans split.
#[derive(Debug, Clone)]
pub struct CeSplit {
    pub reference: String,
    pub betas: Vec<AlgebraElement>,
    pub l0: CpdKernel,
}

impl CeSplit {
    /// Reconstructs L^{s,s'}(b) = L0^{s,s'}(b) + β_s*·b + b·β_{s'}.
    pub fn reassemble(&self) -> CpdKernel {
        let n = self.l0.size();
        let mut entries = Vec::with_capacity(n * n);
        for s in 0..n {
            let left = SuperOperator::left_mult(&self.betas[s].adjoint());
            for s2 in 0..n {
                let right = SuperOperator::right_mult(&self.betas[s2]);
                entries.push(self.l0.entry(s, s2).add(&left).add(&right));
            }
        }
        CpdKernel {
            algebra: self.l0.algebra.clone(),
            labels: self.l0.labels.clone(),
            entries,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m2() -> Algebra {
        Algebra::full_matrix(2)
    }

    fn element(a: &Algebra, entries: &[(usize, usize, f64, f64)]) -> AlgebraElement {
        let mut m = nalgebra::DMatrix::zeros(2, 2);
        for &(i, j, re, im) in entries {
            m[(i, j)] = Complex64::new(re, im);
        }
        AlgebraElement::from_blocks(a, vec![m]).unwrap()
    }

    fn kolmogorov_form_kernel(a: &Algebra) -> CpdKernel {
        // K^{s,s'}(b) = x_s*·b·x_{s'} on three labels
        let xs = vec![
            element(a, &[(0, 0, 1.0, 0.0), (1, 1, 0.5, 0.2)]),
            element(a, &[(0, 1, 0.7, -0.3), (1, 0, 0.1, 0.0)]),
            element(a, &[(0, 0, 0.2, 0.1), (0, 1, 0.4, 0.0), (1, 1, -0.6, 0.0)]),
        ];
        let labels = vec!["x".to_string(), "y".to_string(), "z".to_string()];
        let mut entries = Vec::new();
        for x in &xs {
            for y in &xs {
                let (x, y) = (x.clone(), y.clone());
                entries.push(SuperOperator::from_fn(a, move |b| {
                    x.adjoint().mul(b).mul(&y)
                }));
            }
        }
        CpdKernel::new(a, labels, entries).unwrap()
    }

    #[test]
    fn kolmogorov_form_is_cpd() {
        let a = m2();
        assert!(kolmogorov_form_kernel(&a).is_cpd(PSD_TOL).unwrap());
    }

    #[test]
    fn negated_identity_kernel_is_not_cpd() {
        // singleton S with K(b) = -b fails at a = b = 1
        let a = m2();
        let k = CpdKernel::new(
            &a,
            vec!["s".into()],
            vec![SuperOperator::identity(&a).scale(Complex64::new(-1.0, 0.0))],
        )
        .unwrap();
        assert!(!k.is_cpd(PSD_TOL).unwrap());
    }

    #[test]
    fn zero_kernel_gives_zero_module() {
        let a = m2();
        let k = CpdKernel::new(
            &a,
            vec!["a".into(), "b".into()],
            vec![SuperOperator::zero(&a); 4],
        )
        .unwrap();
        let dec = k.kolmogorov().unwrap();
        assert_eq!(dec.module.complex_dimension(), 0);
        for v in &dec.vectors {
            assert!(dec.module.norm(v) < 1e-12);
        }
    }

    #[test]
    fn kolmogorov_roundtrip_on_construction_form() {
        let a = m2();
        let k = kolmogorov_form_kernel(&a);
        let dec = k.kolmogorov().unwrap();
        let back = dec.kernel().unwrap();
        assert!(k.distance(&back) < 1e-9);
        // the construction embeds in B, so the module is at most B
        assert!(dec.module.complex_dimension() <= a.dim());
    }

    #[test]
    fn kolmogorov_rank_matches_gram_rank_oracle() {
        let a = m2();
        let k = kolmogorov_form_kernel(&a);
        let dec = k.kolmogorov().unwrap();
        // independent oracle: eigendecomposition rank of the flattened
        // symbol Gram (single block, so the block Gram is the whole matrix)
        let n = k.size();
        let dim = a.dim();
        let mut gram = BMatrix::zero(&a, n * dim);
        for s in 0..n {
            for p in 0..dim {
                for s2 in 0..n {
                    for q in 0..dim {
                        gram.set(
                            s * dim + p,
                            s2 * dim + q,
                            k.entry(s, s2)
                                .apply(&a.basis_element(p).adjoint().mul(&a.basis_element(q))),
                        );
                    }
                }
            }
        }
        let eig = hermitian_eigenvalues(&gram.block_matrix(0));
        let scale = eig.iter().fold(0.0f64, |m, &l| m.max(l.abs()));
        let oracle_rank: usize = eig.iter().filter(|&&l| l > 1e-10 * scale).count();
        assert_eq!(dec.block_ranks, vec![oracle_rank]);
        // each unit of block rank carries d_j = 2 complex dimensions
        assert_eq!(dec.module.complex_dimension(), 2 * oracle_rank);
    }

    #[test]
    fn semigroup_at_zero_is_identity_kernel() {
        let a = m2();
        let k = kolmogorov_form_kernel(&a);
        let id = k.at_time(0.0).unwrap();
        for r in 0..3 {
            for c in 0..3 {
                assert!(id.entry(r, c).distance(&SuperOperator::identity(&a)) < 1e-14);
            }
        }
    }

    #[test]
    fn scalar_semigroup_exponentiates_entrywise() {
        let a = Algebra::scalar();
        let lam = [
            [Complex64::new(-0.2, 0.0), Complex64::new(0.1, 0.3)],
            [Complex64::new(0.1, -0.3), Complex64::new(0.4, 0.0)],
        ];
        let entries = lam
            .iter()
            .flatten()
            .map(|&l| SuperOperator::from_fn(&a, move |b| b.scale(l)))
            .collect();
        let k = CpdKernel::new(&a, vec!["u".into(), "v".into()], entries).unwrap();
        let t = 0.8;
        let kt = k.at_time(t).unwrap();
        for r in 0..2 {
            for c in 0..2 {
                let got = kt.entry(r, c).apply(&a.unit()).block(0)[(0, 0)];
                let expect = (lam[r][c] * t).exp();
                assert!((got - expect).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn semigroup_composition_law() {
        let a = m2();
        let k = kolmogorov_form_kernel(&a);
        let (s, t) = (0.4, 0.9);
        let lhs = k.at_time(s + t).unwrap();
        let rhs = k
            .at_time(t)
            .unwrap()
            .compose_entrywise(&k.at_time(s).unwrap())
            .unwrap();
        assert!(lhs.distance(&rhs) < 1e-10);
    }

    #[test]
    fn ce_split_rejects_noncentral_reference() {
        let a = m2();
        let k = kolmogorov_form_kernel(&a);
        // a Kolmogorov-form row is b ↦ x*·b·y, not b ↦ b·β
        assert!(matches!(
            k.ce_split("x", 1e-10),
            Err(Error::ReferenceNotCentral { .. })
        ));
    }

    #[test]
    fn ce_split_reports_non_ce_generators() {
        // a kernel with an intact reference row whose split part is not CPD:
        // subtract a strong Kolmogorov form from a diagonal entry away from ω
        let a = m2();
        let x = element(&a, &[(0, 0, 1.0, 0.0), (1, 1, 1.0, 0.0)]);
        let neg = {
            let x = x.clone();
            SuperOperator::from_fn(&a, move |b| {
                x.adjoint().mul(b).mul(&x).scale(Complex64::new(-1.0, 0.0))
            })
        };
        let entries = vec![
            SuperOperator::zero(&a),
            SuperOperator::zero(&a),
            SuperOperator::zero(&a),
            neg,
        ];
        let k = CpdKernel::new(&a, vec!["w".into(), "p".into()], entries).unwrap();
        assert!(matches!(
            k.ce_split("w", 1e-10),
            Err(Error::NotCeGenerator { .. })
        ));
    }
}
