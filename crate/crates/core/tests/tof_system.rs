//! Cross-checks of unit inner products over M₂: the closed form against the
//! simplex quadrature, the semigroup law, the kernel structure of unit
//! families, and morphism covariance.

use num_complex::Complex64;
use prodsys::bimodule::TensorPowers;
use prodsys::kernel::PSD_TOL;
use prodsys::sampling;
use prodsys::units::{automorphism_to, TimeOrderedSystem};
use prodsys::{Algebra, Bimodule};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

fn m2_system() -> TimeOrderedSystem {
    TimeOrderedSystem::new(Bimodule::free(&Algebra::full_matrix(2), 1))
}

#[test]
fn unit_inner_satisfies_the_semigroup_law() {
    let mut rng = ChaCha20Rng::seed_from_u64(2001);
    let system = m2_system();
    for _ in 0..4 {
        let p = sampling::unit_params(&system, &mut rng, 1.0, 1.0);
        let q = sampling::unit_params(&system, &mut rng, 1.0, 1.0);
        let b = sampling::algebra_element(system.algebra(), &mut rng, 1.0);
        let (s, t) = (0.6, 0.9);
        let inner_s = system.unit_inner(&p, &q, s, &b).unwrap();
        let lhs = system.unit_inner(&p, &q, t, &inner_s).unwrap();
        let rhs = system.unit_inner(&p, &q, s + t, &b).unwrap();
        assert!(lhs.distance(&rhs) < 1e-10);
    }
}

#[test]
fn quadrature_oracle_agrees_with_closed_form_on_m2() {
    let mut rng = ChaCha20Rng::seed_from_u64(2002);
    let system = m2_system();
    let t = 0.5;
    let n_max = 4;
    for _ in 0..2 {
        let p = sampling::unit_params(&system, &mut rng, 1.0, 1.0);
        let q = sampling::unit_params(&system, &mut rng, 1.0, 1.0);
        let b = sampling::algebra_element(system.algebra(), &mut rng, 1.0);
        let closed = system.unit_inner(&p, &q, t, &b).unwrap();
        let tail = system.truncation_bound(&p, &q, t, b.operator_norm(), n_max);
        let errs: Vec<f64> = [1.0 / 8.0, 1.0 / 16.0, 1.0 / 32.0]
            .iter()
            .map(|&h| {
                system
                    .quadrature_inner(&p, &q, t, &b, n_max, h)
                    .unwrap()
                    .distance(&closed)
            })
            .collect();
        // self-convergence: halving h at least noticeably shrinks the error
        assert!(
            errs[1] < 0.75 * errs[0] + tail,
            "errs {errs:?} tail {tail:e}"
        );
        assert!(
            errs[2] < 0.75 * errs[1] + tail,
            "errs {errs:?} tail {tail:e}"
        );
        // absolute agreement within quadrature error + truncation tail
        assert!(
            errs[2] <= 4.0 * (1.0 / 32.0) + tail,
            "errs {errs:?} tail {tail:e}"
        );
    }
}

#[test]
fn materialized_components_match_factor_folds() {
    // the inner product of materialized tensor components equals the fold
    // over the factors; ties the tensor machinery to the quadrature path
    let mut rng = ChaCha20Rng::seed_from_u64(2003);
    let system = m2_system();
    let powers = TensorPowers::new(system.index(), 3).unwrap();
    let t = 1.0;
    let times = [0.8, 0.55, 0.2];
    for _ in 0..2 {
        let p = sampling::unit_params(&system, &mut rng, 1.0, 1.0);
        let q = sampling::unit_params(&system, &mut rng, 1.0, 1.0);
        let b = sampling::algebra_element(system.algebra(), &mut rng, 1.0);
        for n in 1..=3usize {
            let xs = system.unit_component(&powers, &p, t, &times[..n]).unwrap();
            let ys = system.unit_component(&powers, &q, t, &times[..n]).unwrap();
            let lhs = powers
                .power(n)
                .inner(&xs, &powers.power(n).left_mul(&b, &ys).unwrap())
                .unwrap();
            let rhs = prodsys::bimodule::elementary_inner(
                system.index(),
                &system.component_factors(&p, t, &times[..n]).unwrap(),
                &b,
                &system.component_factors(&q, t, &times[..n]).unwrap(),
            )
            .unwrap();
            assert!(
                lhs.distance(&rhs) < 1e-9,
                "n = {n}, residual {:e}",
                lhs.distance(&rhs)
            );
        }
    }
}

#[test]
fn unit_kernels_are_ce_generators() {
    // any finite family of units containing the vacuum yields a kernel whose
    // CE-split succeeds with L0 completely positive definite
    let mut rng = ChaCha20Rng::seed_from_u64(2004);
    let system = m2_system();
    let labeled = vec![
        ("w".to_string(), system.vacuum()),
        (
            "p".to_string(),
            sampling::unit_params(&system, &mut rng, 1.0, 1.0),
        ),
        (
            "q".to_string(),
            sampling::unit_params(&system, &mut rng, 1.0, 1.0),
        ),
        (
            "r".to_string(),
            sampling::unit_params(&system, &mut rng, 1.0, 1.0),
        ),
    ];
    let kernel = system.unit_kernel(&labeled).unwrap();
    let split = kernel.ce_split("w", 1e-10).unwrap();
    assert!(split.l0.is_cpd(PSD_TOL).unwrap());
}

#[test]
fn automorphism_covariance_of_generators_on_block_algebra() {
    // over B = ℂ⊕M₂ with F = B the center is 2-dimensional; automorphisms
    // built from central unital units preserve all pairwise generators
    let mut rng = ChaCha20Rng::seed_from_u64(2005);
    let algebra = Algebra::new(vec![1, 2]).unwrap();
    let system = TimeOrderedSystem::new(Bimodule::free(&algebra, 1));
    let target = sampling::central_unital_unit(&system, &mut rng, 0.7).unwrap();
    let (central, unital) = system.is_central_unital(&target, 1e-10).unwrap();
    assert!(central && unital);
    let morphism = automorphism_to(&system, &target).unwrap();
    assert!(morphism.is_isomorphism(1e-10));
    assert!(morphism
        .satisfies_automorphism_constraints(&system, 1e-10)
        .unwrap());
    // vacuum maps to the target
    let image = morphism.apply(&system, &system.vacuum()).unwrap();
    assert!(image.beta.distance(&target.beta) < 1e-12);
    assert!(system.index().norm(&image.zeta.sub(&target.zeta)) < 1e-12);
    // generators are conjugation-invariant
    for _ in 0..3 {
        let p = sampling::unit_params(&system, &mut rng, 1.0, 1.0);
        let q = sampling::unit_params(&system, &mut rng, 1.0, 1.0);
        let before = system.generator(&p, &q).unwrap();
        let after = system
            .generator(
                &morphism.apply(&system, &p).unwrap(),
                &morphism.apply(&system, &q).unwrap(),
            )
            .unwrap();
        assert!(before.distance(&after) < 1e-10);
    }
}

#[test]
fn noncentral_unit_is_detected() {
    let mut rng = ChaCha20Rng::seed_from_u64(2006);
    let system = m2_system();
    // a generic ζ over M₂ is not central
    let p = sampling::unit_params(&system, &mut rng, 1.0, 1.0);
    let (central, _) = system.is_central_unital(&p, 1e-10).unwrap();
    assert!(!central);
    assert!(automorphism_to(&system, &p).is_err());
}

#[test]
fn central_unital_examples_over_m2() {
    // (i·h - ⟨ζ,ζ⟩/2, ζ) with ζ central and h central self-adjoint is
    // central and unital; over M₂ the center is the scalars
    let system = m2_system();
    let algebra = system.algebra();
    let zeta = system
        .index()
        .vector_from_coords(vec![prodsys::AlgebraElement::scalar(
            algebra,
            Complex64::new(0.6, 0.0),
        )])
        .unwrap();
    let gram = system.index().inner(&zeta, &zeta).unwrap();
    let beta = prodsys::AlgebraElement::scalar(algebra, Complex64::new(0.0, 0.35))
        .sub(&gram.scale(Complex64::new(0.5, 0.0)));
    let p = system.unit(beta, zeta).unwrap();
    let (central, unital) = system.is_central_unital(&p, 1e-10).unwrap();
    assert!(central && unital);
}
