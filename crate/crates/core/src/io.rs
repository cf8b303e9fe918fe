//! Serialization descriptors for the file formats consumed by the batch
//! driver.
//!
//! Elements are stored as row-major (re, im) pairs per block in the canonical
//! matrix-unit order, so the encoding is bit-reproducible across runs.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::{Algebra, AlgebraElement};
use crate::bimodule::{Bimodule, ModuleVector};
use crate::error::{Error, Result};
use crate::free_flow::{FreeUnitParam, IndicatorTerm};
use crate::kernel::CpdKernel;
use crate::superop::SuperOperator;
use crate::units::{TimeOrderedSystem, UnitParams};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AlgebraDesc {
    pub block_sizes: Vec<usize>,
}

impl AlgebraDesc {
    pub fn from_algebra(a: &Algebra) -> Self {
        Self {
            block_sizes: a.block_sizes().to_vec(),
        }
    }

    pub fn to_algebra(&self) -> Result<Algebra> {
        Algebra::new(self.block_sizes.clone())
    }
}

/// Row-major complex pairs per block, canonical basis order.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ElementDesc {
    pub blocks: Vec<Vec<[f64; 2]>>,
}

impl ElementDesc {
    pub fn from_element(e: &AlgebraElement) -> Self {
        Self {
            blocks: e
                .blocks()
                .iter()
                .map(|b| {
                    let mut out = Vec::with_capacity(b.nrows() * b.ncols());
                    for i in 0..b.nrows() {
                        for j in 0..b.ncols() {
                            out.push([b[(i, j)].re, b[(i, j)].im]);
                        }
                    }
                    out
                })
                .collect(),
        }
    }

    pub fn to_element(&self, algebra: &Algebra) -> Result<AlgebraElement> {
        if self.blocks.len() != algebra.num_blocks() {
            return Err(Error::InvalidDescriptor(format!(
                "element has {} blocks, algebra has {}",
                self.blocks.len(),
                algebra.num_blocks()
            )));
        }
        let mut coords = Vec::with_capacity(algebra.dim());
        for (k, (&d, entries)) in algebra.block_sizes().iter().zip(&self.blocks).enumerate() {
            if entries.len() != d * d {
                return Err(Error::InvalidDescriptor(format!(
                    "block {k} has {} entries, expected {}",
                    entries.len(),
                    d * d
                )));
            }
            coords.extend(entries.iter().map(|&[re, im]| Complex64::new(re, im)));
        }
        AlgebraElement::from_coords(algebra, &DVector::from_vec(coords))
    }
}

/// A D×D coordinate matrix, rows outer.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SuperOpDesc {
    pub matrix: Vec<Vec<[f64; 2]>>,
}

impl SuperOpDesc {
    pub fn from_superop(t: &SuperOperator) -> Self {
        let m = t.matrix();
        Self {
            matrix: (0..m.nrows())
                .map(|r| {
                    (0..m.ncols())
                        .map(|c| [m[(r, c)].re, m[(r, c)].im])
                        .collect()
                })
                .collect(),
        }
    }

    pub fn to_superop(&self, algebra: &Algebra) -> Result<SuperOperator> {
        let dim = algebra.dim();
        if self.matrix.len() != dim || self.matrix.iter().any(|r| r.len() != dim) {
            return Err(Error::InvalidDescriptor(format!(
                "superoperator matrix must be {dim}×{dim}"
            )));
        }
        let mut m = DMatrix::zeros(dim, dim);
        for (r, row) in self.matrix.iter().enumerate() {
            for (c, &[re, im]) in row.iter().enumerate() {
                m[(r, c)] = Complex64::new(re, im);
            }
        }
        SuperOperator::from_matrix(algebra, m)
    }
}

/// Kernel file: label list plus per-pair superoperator matrices (row-major
/// over label pairs) in the canonical basis.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KernelDesc {
    pub algebra: AlgebraDesc,
    pub labels: Vec<String>,
    pub entries: Vec<SuperOpDesc>,
}

impl KernelDesc {
    pub fn from_kernel(k: &CpdKernel) -> Self {
        let n = k.size();
        let mut entries = Vec::with_capacity(n * n);
        for r in 0..n {
            for c in 0..n {
                entries.push(SuperOpDesc::from_superop(k.entry(r, c)));
            }
        }
        Self {
            algebra: AlgebraDesc::from_algebra(k.algebra()),
            labels: k.labels().to_vec(),
            entries,
        }
    }

    pub fn to_kernel(&self) -> Result<CpdKernel> {
        let algebra = self.algebra.to_algebra()?;
        let entries = self
            .entries
            .iter()
            .map(|e| e.to_superop(&algebra))
            .collect::<Result<Vec<_>>>()?;
        CpdKernel::new(&algebra, self.labels.clone(), entries)
    }
}

/// Bimodule descriptor: algebra blocks, free rank, and the left action of
/// every basis element as a rank×rank matrix over B.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BimoduleDesc {
    pub algebra: AlgebraDesc,
    pub rank: usize,
    /// `action[p][i][j]` is the (i, j) entry of π(u_p) in B.
    pub action: Vec<Vec<Vec<ElementDesc>>>,
}

impl BimoduleDesc {
    pub fn from_bimodule(m: &Bimodule) -> Self {
        let algebra = m.algebra();
        let action = (0..algebra.dim())
            .map(|p| {
                (0..m.rank())
                    .map(|i| {
                        (0..m.rank())
                            .map(|j| ElementDesc::from_element(&m.action_entry(p, i, j)))
                            .collect()
                    })
                    .collect()
            })
            .collect();
        Self {
            algebra: AlgebraDesc::from_algebra(algebra),
            rank: m.rank(),
            action,
        }
    }

    pub fn to_bimodule(&self) -> Result<Bimodule> {
        let algebra = self.algebra.to_algebra()?;
        let d = algebra.flat_dim();
        if self.action.len() != algebra.dim() {
            return Err(Error::InvalidDescriptor(format!(
                "module action must list {} basis matrices",
                algebra.dim()
            )));
        }
        let mut action = Vec::with_capacity(algebra.dim());
        for (p, rows) in self.action.iter().enumerate() {
            if rows.len() != self.rank || rows.iter().any(|r| r.len() != self.rank) {
                return Err(Error::InvalidDescriptor(format!(
                    "action matrix {p} must be {}×{} over B",
                    self.rank, self.rank
                )));
            }
            let mut m = DMatrix::zeros(self.rank * d, self.rank * d);
            for (i, row) in rows.iter().enumerate() {
                for (j, entry) in row.iter().enumerate() {
                    let e = entry.to_element(&algebra)?;
                    m.view_mut((i * d, j * d), (d, d)).copy_from(&e.to_flat());
                }
            }
            action.push(m);
        }
        let module = Bimodule::from_action(&algebra, self.rank, action)?;
        module.validate(1e-9)?;
        Ok(module)
    }
}

/// Unit file: (β, ζ) per the algebra/bimodule conventions.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UnitDesc {
    pub beta: ElementDesc,
    pub zeta: Vec<ElementDesc>,
}

impl UnitDesc {
    pub fn from_unit(p: &UnitParams) -> Self {
        Self {
            beta: ElementDesc::from_element(&p.beta),
            zeta: p
                .zeta
                .coords()
                .iter()
                .map(ElementDesc::from_element)
                .collect(),
        }
    }

    pub fn to_unit(&self, system: &TimeOrderedSystem) -> Result<UnitParams> {
        let algebra = system.algebra();
        let beta = self.beta.to_element(algebra)?;
        let coords = self
            .zeta
            .iter()
            .map(|e| e.to_element(algebra))
            .collect::<Result<Vec<_>>>()?;
        let zeta = system.index().vector_from_coords(coords)?;
        system.unit(beta, zeta)
    }
}

/// Free-unit file: per-n records of (interval list, factor coordinates).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FreeUnitDesc {
    /// components[n-1] lists the indicator terms of ζⁿ.
    pub components: Vec<Vec<FreeTermDesc>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FreeTermDesc {
    pub intervals: Vec<[f64; 2]>,
    pub factors: Vec<Vec<ElementDesc>>,
}

impl FreeUnitDesc {
    pub fn from_param(p: &FreeUnitParam) -> Self {
        Self {
            components: (1..=p.max_particles())
                .map(|n| {
                    p.component_terms(n)
                        .iter()
                        .map(|t| FreeTermDesc {
                            intervals: t.intervals.iter().map(|&(a, b)| [a, b]).collect(),
                            factors: t
                                .factors
                                .iter()
                                .map(|f| f.coords().iter().map(ElementDesc::from_element).collect())
                                .collect(),
                        })
                        .collect()
                })
                .collect(),
        }
    }

    pub fn to_param(&self, base: &Bimodule) -> Result<FreeUnitParam> {
        let algebra = base.algebra();
        let mut components = Vec::with_capacity(self.components.len());
        for terms in &self.components {
            let mut out = Vec::with_capacity(terms.len());
            for t in terms {
                let factors = t
                    .factors
                    .iter()
                    .map(|coords| {
                        let cs = coords
                            .iter()
                            .map(|e| e.to_element(algebra))
                            .collect::<Result<Vec<_>>>()?;
                        base.vector_from_coords(cs)
                    })
                    .collect::<Result<Vec<_>>>()?;
                out.push(IndicatorTerm {
                    intervals: t.intervals.iter().map(|&[a, b]| (a, b)).collect(),
                    factors,
                });
            }
            components.push(out);
        }
        FreeUnitParam::new(base, components)
    }
}

/// Morphism file: (γ, η, η', a) with a as a flat matrix from the source
/// module's flattened coordinates to the target's.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MorphismDesc {
    pub gamma: ElementDesc,
    pub eta: Vec<ElementDesc>,
    pub eta_prime: Vec<ElementDesc>,
    pub map: Vec<Vec<[f64; 2]>>,
}

impl MorphismDesc {
    pub fn from_morphism(m: &crate::units::MorphismMatrix) -> Self {
        let a = m.map.matrix();
        Self {
            gamma: ElementDesc::from_element(&m.gamma),
            eta: m
                .eta
                .coords()
                .iter()
                .map(ElementDesc::from_element)
                .collect(),
            eta_prime: m
                .eta_prime
                .coords()
                .iter()
                .map(ElementDesc::from_element)
                .collect(),
            map: (0..a.nrows())
                .map(|r| {
                    (0..a.ncols())
                        .map(|c| [a[(r, c)].re, a[(r, c)].im])
                        .collect()
                })
                .collect(),
        }
    }

    pub fn to_morphism(
        &self,
        source: &TimeOrderedSystem,
        target: &TimeOrderedSystem,
    ) -> Result<crate::units::MorphismMatrix> {
        let algebra = source.algebra();
        let gamma = self.gamma.to_element(algebra)?;
        let eta = source.index().vector_from_coords(
            self.eta
                .iter()
                .map(|e| e.to_element(algebra))
                .collect::<Result<Vec<_>>>()?,
        )?;
        let eta_prime = target.index().vector_from_coords(
            self.eta_prime
                .iter()
                .map(|e| e.to_element(algebra))
                .collect::<Result<Vec<_>>>()?,
        )?;
        let d = algebra.flat_dim();
        let (rows, cols) = (target.index().rank() * d, source.index().rank() * d);
        if self.map.len() != rows || self.map.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidDescriptor(format!(
                "morphism map must be {rows}×{cols}"
            )));
        }
        let mut m = DMatrix::zeros(rows, cols);
        for (r, row) in self.map.iter().enumerate() {
            for (c, &[re, im]) in row.iter().enumerate() {
                m[(r, c)] = Complex64::new(re, im);
            }
        }
        let map = crate::units::BimoduleMap::new(source.index(), target.index(), m)?;
        crate::units::MorphismMatrix::new(source, target, gamma, eta, eta_prime, map)
    }
}

/// Round-trip helper used by tests and the driver.
pub fn module_vector_coords(v: &ModuleVector) -> Vec<ElementDesc> {
    v.coords().iter().map(ElementDesc::from_element).collect()
}
