//! The weighted mean ⊞ and the Trotter product ⊗ of units, together with the
//! discretized approximants that realize both as limits along uniform
//! partitions.
//!
//! At parameter level the operations are exact arithmetic:
//!
//!   ⊞ κ_i·(β_i, ζ_i) = (Σκ_i β_i, Σκ_i ζ_i)       (Σκ_i = 1),
//!   (β_1, ζ_1) ⊗ (β_2, ζ_2) = (β_1+β_2, ζ_1+ζ_2)   (mean with the vacuum
//!                                                    subtracted).
//!
//! The approximants compose the exact inner-product maps of the discretized
//! mean n times; their distance to exp(t·L) of the mean decays like the mesh
//! t/n, which the convergence report verifies.

use num_complex::Complex64;

use crate::algebra::AlgebraElement;
use crate::error::{Error, Result};
use crate::superop::SuperOperator;
use crate::units::{TimeOrderedSystem, UnitParams};

/// A weighted family of units with complex weights summing to one.
#[derive(Debug, Clone)]
pub struct WeightedUnits {
    weights: Vec<Complex64>,
    units: Vec<UnitParams>,
}

impl WeightedUnits {
    pub fn new(weights: Vec<Complex64>, units: Vec<UnitParams>) -> Result<Self> {
        if weights.len() != units.len() {
            return Err(Error::DimensionMismatch {
                expected: weights.len(),
                found: units.len(),
            });
        }
        if units.is_empty() {
            return Err(Error::Precondition("weighted mean of nothing".into()));
        }
        let sum: Complex64 = weights.iter().sum();
        let residual = (sum - Complex64::new(1.0, 0.0)).norm();
        if residual > 1e-12 {
            return Err(Error::WeightSum {
                sum: format!("{sum}"),
                residual,
            });
        }
        Ok(Self { weights, units })
    }

    pub fn weights(&self) -> &[Complex64] {
        &self.weights
    }

    pub fn units(&self) -> &[UnitParams] {
        &self.units
    }
}

/// The mean ⊞ κ_i·p_i = (Σκ_i β_i, Σκ_i ζ_i). Its generator against any
/// fixed unit is the same weighted sum of generators, exactly.
pub fn boxplus(system: &TimeOrderedSystem, w: &WeightedUnits) -> Result<UnitParams> {
    let mut beta = AlgebraElement::zero(system.algebra());
    let mut zeta = system.index().zero_vector();
    for (k, p) in w.weights.iter().zip(&w.units) {
        system.index().check_vector(&p.zeta)?;
        beta = beta.add(&p.beta.scale(*k));
        zeta = zeta.add(&p.zeta.scale(*k));
    }
    Ok(UnitParams { beta, zeta })
}

/// The Trotter product p_1 ⊗ p_2 = (p_1 ⊞ p_2 ⊟ ω): parameters add.
pub fn trotter_product(
    system: &TimeOrderedSystem,
    p1: &UnitParams,
    p2: &UnitParams,
) -> Result<UnitParams> {
    let w = WeightedUnits::new(
        vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(-1.0, 0.0),
        ],
        vec![p1.clone(), p2.clone(), system.vacuum()],
    )?;
    boxplus(system, &w)
}

/// Splits a unit into its exponential part and drift: (β, ζ) = (0, ζ) ⊗ ω^β.
/// The CPD part of the generator depends only on ζ, so it is untouched.
pub fn exponentialize(system: &TimeOrderedSystem, p: &UnitParams) -> (UnitParams, AlgebraElement) {
    (
        UnitParams {
            beta: AlgebraElement::zero(system.algebra()),
            zeta: p.zeta.clone(),
        },
        p.beta.clone(),
    )
}

/// The one-step map Y_s(b) = Σ_{i,j} conj(κ_i)·κ_j·⟨ξ^i_s, b·ξ^j_s⟩ of the
/// discretized mean.
pub fn mean_step(system: &TimeOrderedSystem, w: &WeightedUnits, s: f64) -> Result<SuperOperator> {
    let mut y = SuperOperator::zero(system.algebra());
    for (ki, pi) in w.weights.iter().zip(&w.units) {
        for (kj, pj) in w.weights.iter().zip(&w.units) {
            let u = system.generator(pi, pj)?.exp(s)?;
            y = y.add(&u.scale(ki.conj() * kj));
        }
    }
    Ok(y)
}

/// (Y_{t/n})^{∘n}: the exact inner-product semigroup of the n-fold
/// discretized mean, as a superoperator.
pub fn approximant_superop(
    system: &TimeOrderedSystem,
    w: &WeightedUnits,
    t: f64,
    n: usize,
) -> Result<SuperOperator> {
    if n == 0 {
        return Err(Error::Precondition("approximant needs n ≥ 1".into()));
    }
    if !(t >= 0.0) {
        return Err(Error::InvalidTime(t));
    }
    Ok(mean_step(system, w, t / n as f64)?.power(n))
}

/// (Y_{t/n})^{∘n}(b).
pub fn approximant_semigroup(
    system: &TimeOrderedSystem,
    w: &WeightedUnits,
    t: f64,
    n: usize,
    b: &AlgebraElement,
) -> Result<AlgebraElement> {
    Ok(approximant_superop(system, w, t, n)?.apply(b))
}

/// The cross step Z_s(b) = Σ_i κ_i·⟨ξ'_s, b·ξ^i_s⟩ against a fixed unit.
pub fn cross_step(
    system: &TimeOrderedSystem,
    probe: &UnitParams,
    w: &WeightedUnits,
    s: f64,
) -> Result<SuperOperator> {
    let mut z = SuperOperator::zero(system.algebra());
    for (k, p) in w.weights.iter().zip(&w.units) {
        let u = system.generator(probe, p)?.exp(s)?;
        z = z.add(&u.scale(*k));
    }
    Ok(z)
}

/// (Z_{t/n})^{∘n}, converging to ⟨ξ'_t, (·)·ξ_t(⊞w)⟩ at rate O(1/n).
pub fn cross_approximant_superop(
    system: &TimeOrderedSystem,
    probe: &UnitParams,
    w: &WeightedUnits,
    t: f64,
    n: usize,
) -> Result<SuperOperator> {
    if n == 0 {
        return Err(Error::Precondition("approximant needs n ≥ 1".into()));
    }
    if !(t >= 0.0) {
        return Err(Error::InvalidTime(t));
    }
    Ok(cross_step(system, probe, w, t / n as f64)?.power(n))
}

/// (Z_{t/n})^{∘n}(b).
pub fn cross_approximant(
    system: &TimeOrderedSystem,
    probe: &UnitParams,
    w: &WeightedUnits,
    t: f64,
    n: usize,
    b: &AlgebraElement,
) -> Result<AlgebraElement> {
    Ok(cross_approximant_superop(system, probe, w, t, n)?.apply(b))
}

/// One row of a convergence report.
#[derive(Debug, Clone)]
pub struct ConvergenceRow {
    pub n: usize,
    pub mesh: f64,
    pub error: f64,
    /// error of the previous row divided by this one (NaN on the first row).
    pub ratio: f64,
}

/// Error of the mean approximant against exp(t·L_mean) along doubling n.
pub fn convergence_report(
    system: &TimeOrderedSystem,
    w: &WeightedUnits,
    t: f64,
    ns: &[usize],
) -> Result<Vec<ConvergenceRow>> {
    let mean = boxplus(system, w)?;
    let limit = system.generator(&mean, &mean)?.exp(t)?;
    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(ns.len());
    for &n in ns {
        let err = approximant_superop(system, w, t, n)?.distance(&limit);
        let ratio = rows
            .last()
            .map(|r: &ConvergenceRow| r.error / err)
            .unwrap_or(f64::NAN);
        rows.push(ConvergenceRow {
            n,
            mesh: t / n as f64,
            error: err,
            ratio,
        });
    }
    Ok(rows)
}

/// Same as [`convergence_report`] for the cross approximant against
/// exp(t·L^{probe, ⊞w}).
pub fn cross_convergence_report(
    system: &TimeOrderedSystem,
    probe: &UnitParams,
    w: &WeightedUnits,
    t: f64,
    ns: &[usize],
) -> Result<Vec<ConvergenceRow>> {
    let mean = boxplus(system, w)?;
    let limit = system.generator(probe, &mean)?.exp(t)?;
    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(ns.len());
    for &n in ns {
        let err = cross_approximant_superop(system, probe, w, t, n)?.distance(&limit);
        let ratio = rows
            .last()
            .map(|r: &ConvergenceRow| r.error / err)
            .unwrap_or(f64::NAN);
        rows.push(ConvergenceRow {
            n,
            mesh: t / n as f64,
            error: err,
            ratio,
        });
    }
    Ok(rows)
}

/// Spot check along a non-uniform partition: composes the one-step means of
/// the given increments in order. The error bound depends only on the mesh
/// max(increments).
pub fn partition_approximant(
    system: &TimeOrderedSystem,
    w: &WeightedUnits,
    increments: &[f64],
) -> Result<SuperOperator> {
    let mut acc = SuperOperator::identity(system.algebra());
    for &s in increments {
        if !(s > 0.0) {
            return Err(Error::InvalidTime(s));
        }
        acc = mean_step(system, w, s)?.compose(&acc);
    }
    Ok(acc)
}
