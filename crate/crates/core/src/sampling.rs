//! Deterministic generators for randomized instances.
//!
//! Every randomized experiment derives its inputs from a named generator in
//! this module and a caller-supplied RNG, so failures replay exactly from
//! the seed.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::{Rng, RngExt};

use crate::algebra::{Algebra, AlgebraElement};
use crate::bimodule::{Bimodule, ModuleVector};
use crate::free_flow::{FreeUnitParam, IndicatorTerm, TimeTuple};
use crate::kernel::CpdKernel;
use crate::superop::SuperOperator;
use crate::units::{TimeOrderedSystem, UnitParams};

pub fn complex_unit_disc<R: Rng>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        * Complex64::new(0.5f64.sqrt(), 0.0)
}

/// Dense element with entries in the complex unit square, scaled to operator
/// norm ≤ `norm_bound` (exactly `norm_bound` unless the draw was zero).
pub fn algebra_element<R: Rng>(algebra: &Algebra, rng: &mut R, norm_bound: f64) -> AlgebraElement {
    let v = DVector::from_iterator(
        algebra.dim(),
        (0..algebra.dim()).map(|_| complex_unit_disc(rng)),
    );
    let e = AlgebraElement::from_coords(algebra, &v).expect("dimension fixed");
    let n = e.operator_norm();
    if n <= 1e-300 {
        e
    } else {
        e.scale(Complex64::new(norm_bound / n, 0.0))
    }
}

/// Self-adjoint element of operator norm ≤ `norm_bound`.
pub fn self_adjoint_element<R: Rng>(
    algebra: &Algebra,
    rng: &mut R,
    norm_bound: f64,
) -> AlgebraElement {
    let e = algebra_element(algebra, rng, norm_bound);
    e.add(&e.adjoint()).scale(Complex64::new(0.5, 0.0))
}

/// Central element (a random scalar in every block), operator norm ≤ bound.
pub fn central_element<R: Rng>(algebra: &Algebra, rng: &mut R, norm_bound: f64) -> AlgebraElement {
    let blocks: Vec<_> = algebra
        .block_sizes()
        .iter()
        .map(|&d| {
            let z = complex_unit_disc(rng);
            nalgebra::DMatrix::from_diagonal_element(d, d, z)
        })
        .collect();
    let e = AlgebraElement::from_blocks(algebra, blocks).expect("shapes fixed");
    let n = e.operator_norm();
    if n <= 1e-300 {
        e
    } else {
        e.scale(Complex64::new(norm_bound / n, 0.0))
    }
}

/// Dense superoperator scaled to norm ≤ `norm_bound`.
pub fn superoperator<R: Rng>(algebra: &Algebra, rng: &mut R, norm_bound: f64) -> SuperOperator {
    let dim = algebra.dim();
    let m =
        nalgebra::DMatrix::from_iterator(dim, dim, (0..dim * dim).map(|_| complex_unit_disc(rng)));
    let s = SuperOperator::from_matrix(algebra, m).expect("dimension fixed");
    let n = s.norm();
    if n <= 1e-300 {
        s
    } else {
        s.scale(Complex64::new(norm_bound / n, 0.0))
    }
}

/// A member of the module with norm ≤ `norm_bound`: random free coordinates
/// projected by π(1), then rescaled.
pub fn module_vector<R: Rng>(module: &Bimodule, rng: &mut R, norm_bound: f64) -> ModuleVector {
    let coords: Vec<AlgebraElement> = (0..module.rank())
        .map(|_| algebra_element(module.algebra(), rng, 1.0))
        .collect();
    let x = module.project_vector(&ModuleVector::raw(module.algebra(), coords));
    let n = module.norm(&x);
    if n <= 1e-300 {
        x
    } else {
        x.scale(Complex64::new(norm_bound / n, 0.0))
    }
}

/// Unit parameters with ‖β‖ ≤ `beta_bound` and ‖ζ‖ ≤ `zeta_bound`.
pub fn unit_params<R: Rng>(
    system: &TimeOrderedSystem,
    rng: &mut R,
    beta_bound: f64,
    zeta_bound: f64,
) -> UnitParams {
    system
        .unit(
            algebra_element(system.algebra(), rng, beta_bound),
            module_vector(system.index(), rng, zeta_bound),
        )
        .expect("shapes fixed")
}

/// A central unital unit over index module F: ζ central (random combination
/// of a center basis), β = i·h - ⟨ζ,ζ⟩/2 with h a random central self-adjoint.
/// None when the center of F is trivial.
pub fn central_unital_unit<R: Rng>(
    system: &TimeOrderedSystem,
    rng: &mut R,
    scale: f64,
) -> Option<UnitParams> {
    let center = system.index().center();
    if center.is_empty() {
        return None;
    }
    let mut zeta = system.index().zero_vector();
    for v in &center {
        zeta = zeta.add(&v.scale(complex_unit_disc(rng) * scale));
    }
    let h = {
        let c = central_element(system.algebra(), rng, scale);
        c.add(&c.adjoint()).scale(Complex64::new(0.5, 0.0))
    };
    let gram = system.index().inner(&zeta, &zeta).ok()?;
    let beta = h
        .scale(Complex64::new(0.0, 1.0))
        .sub(&gram.scale(Complex64::new(0.5, 0.0)));
    Some(UnitParams { beta, zeta })
}

/// Kolmogorov-form kernel K^{s,s'}(b) = Σ_r x_{s,r}*·b·x_{s',r} over random
/// elements, `terms` summands per label.
pub fn kolmogorov_form_kernel<R: Rng>(
    algebra: &Algebra,
    labels: &[&str],
    terms: usize,
    rng: &mut R,
) -> CpdKernel {
    let xs: Vec<Vec<AlgebraElement>> = labels
        .iter()
        .map(|_| {
            (0..terms)
                .map(|_| algebra_element(algebra, rng, 1.0))
                .collect()
        })
        .collect();
    let mut entries = Vec::with_capacity(labels.len() * labels.len());
    for row in &xs {
        for col in &xs {
            let (row, col) = (row.clone(), col.clone());
            entries.push(SuperOperator::from_fn(algebra, move |b| {
                let mut acc = AlgebraElement::zero(b.algebra());
                for (x, y) in row.iter().zip(&col) {
                    acc = acc.add(&x.adjoint().mul(b).mul(y));
                }
                acc
            }));
        }
    }
    CpdKernel::new(
        algebra,
        labels.iter().map(|s| s.to_string()).collect(),
        entries,
    )
    .expect("Kolmogorov form is hermitian symmetric")
}

/// Hermitian-symmetric generator kernel with entries of norm ≤ `norm_bound`:
/// entries K^{s,s'} random with K^{s',s}(b) := K^{s,s'}(b*)* enforced.
pub fn generator_kernel<R: Rng>(
    algebra: &Algebra,
    labels: &[&str],
    norm_bound: f64,
    rng: &mut R,
) -> CpdKernel {
    let n = labels.len();
    let mut entries = vec![SuperOperator::zero(algebra); n * n];
    for s in 0..n {
        for s2 in s..n {
            let t = superoperator(algebra, rng, norm_bound);
            if s == s2 {
                // symmetrize the diagonal: K(b) := (T(b) + T(b*)*)/2
                let sym = {
                    let t2 = t.clone();
                    SuperOperator::from_fn(algebra, move |b| {
                        t2.apply(b)
                            .add(&t2.apply(&b.adjoint()).adjoint())
                            .scale(Complex64::new(0.5, 0.0))
                    })
                };
                entries[s * n + s2] = sym;
            } else {
                let mirrored = {
                    let t2 = t.clone();
                    SuperOperator::from_fn(algebra, move |b| t2.apply(&b.adjoint()).adjoint())
                };
                entries[s * n + s2] = t;
                entries[s2 * n + s] = mirrored;
            }
        }
    }
    CpdKernel::new(
        algebra,
        labels.iter().map(|s| s.to_string()).collect(),
        entries,
    )
    .expect("mirrored construction is hermitian symmetric")
}

/// Tuple of the given length, entries uniform in (lo, hi].
pub fn time_tuple<R: Rng>(rng: &mut R, len: usize, lo: f64, hi: f64) -> TimeTuple {
    TimeTuple::new(
        (0..len)
            .map(|_| rng.random_range(lo..hi).max(lo + 1e-12))
            .collect(),
    )
    .expect("entries positive")
}

/// Free unit parameter over `base` truncated at `max_particles`: one or two
/// indicator terms per component with intervals aligned to the dyadic grid
/// {0, 1/2, 1, 3/2, 2}.
pub fn free_unit_param<R: Rng>(
    base: &Bimodule,
    rng: &mut R,
    max_particles: usize,
) -> FreeUnitParam {
    let boundaries = [0.0, 0.5, 1.0, 1.5, 2.0];
    let mut components = Vec::with_capacity(max_particles);
    for n in 1..=max_particles {
        let mut terms = Vec::new();
        for _ in 0..rng.random_range(1..=2usize) {
            let intervals = (0..n - 1)
                .map(|_| {
                    let i = rng.random_range(0..boundaries.len() - 1);
                    let j = rng.random_range(i + 1..boundaries.len());
                    (boundaries[i], boundaries[j])
                })
                .collect();
            let factors = (0..n).map(|_| module_vector(base, rng, 1.0)).collect();
            terms.push(IndicatorTerm { intervals, factors });
        }
        components.push(terms);
    }
    FreeUnitParam::new(base, components).expect("shapes fixed")
}
