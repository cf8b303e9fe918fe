//! The acceptance criteria: one function per criterion, each returning a
//! report with every verified assertion and its pinned tolerance.
//!
//! All instances are desk-scale (B = M₁, M₂, ℂ⊕M₂; module ranks ≤ 4) and
//! derive deterministically from the seed through the named generators in
//! `prodsys::sampling`.

use num_complex::Complex64;
use prodsys::free_flow::{
    decompose, enumerate_valid_segmentations, free_inner_closed, free_inner_quadrature,
    overlap_superop, unit_recursion_residual,
};
use prodsys::kernel::PSD_TOL;
use prodsys::product::{ProductSystemPair, Side};
use prodsys::sampling;
use prodsys::trotter::{
    approximant_superop, boxplus, cross_approximant_superop, exponentialize, trotter_product,
    WeightedUnits,
};
use prodsys::units::{automorphism_to, TimeOrderedSystem, UnitParams};
use prodsys::{Algebra, AlgebraElement, Bimodule, CpdKernel, SuperOperator};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::report::Report;

fn rng_for(seed: u64, stream: u64) -> ChaCha20Rng {
    // separate, replayable stream per criterion
    ChaCha20Rng::seed_from_u64(seed ^ (stream.wrapping_mul(0x9e37_79b9_7f4a_7c15)))
}

fn m2_system() -> TimeOrderedSystem {
    TimeOrderedSystem::new(Bimodule::free(&Algebra::full_matrix(2), 1))
}

/// Semigroup law of entrywise exponentials: for 50 seeded generator kernels
/// over M₂, ||exp((s+t)L) - exp(tL)∘exp(sL)|| ≤ 1e-10 at s,t ∈ {0.3, 0.7}.
pub fn c01_semigroup_law(seed: u64) -> Report {
    let mut report = Report::new();
    let mut rng = rng_for(seed, 1);
    let algebra = Algebra::full_matrix(2);
    let tol = 1e-10;
    for k in 0..50 {
        let kernel = sampling::generator_kernel(&algebra, &["u", "v"], 2.0, &mut rng);
        let mut residual = 0.0f64;
        for &s in &[0.3, 0.7] {
            for &t in &[0.3, 0.7] {
                let lhs = kernel.at_time(s + t).expect("t ≥ 0");
                let rhs = kernel
                    .at_time(t)
                    .expect("t ≥ 0")
                    .compose_entrywise(&kernel.at_time(s).expect("t ≥ 0"))
                    .expect("same labels");
                residual = residual.max(lhs.distance(&rhs));
            }
        }
        report.check(
            "Eq3.1",
            &format!("exp((s+t)L) = exp(tL)∘exp(sL), kernel {k}"),
            residual,
            tol,
        );
    }
    report
}

/// CPD certification and Kolmogorov round-trip: 20 seeded Kolmogorov-form
/// kernels pass is_cpd and reproduce within 1e-9; 5 perturbed kernels with an
/// injected negative direction fail is_cpd.
pub fn c02_cpd_kolmogorov(seed: u64) -> Report {
    let mut report = Report::new();
    let mut rng = rng_for(seed, 2);
    let algebra = Algebra::full_matrix(2);
    for k in 0..20 {
        let kernel = sampling::kolmogorov_form_kernel(&algebra, &["a", "b", "c"], 2, &mut rng);
        let cpd = kernel.is_cpd(PSD_TOL).expect("symmetric by construction");
        report.check_bool(
            "Sec3-CPD",
            &format!("Kolmogorov-form kernel {k} is CPD"),
            cpd,
        );
        let dec = kernel.kolmogorov().expect("CPD");
        let back = dec.kernel().expect("vectors valid");
        report.check(
            "Sec3-Kolmogorov",
            &format!("round-trip of kernel {k}"),
            kernel.distance(&back),
            1e-9,
        );
    }
    for k in 0..5 {
        let kernel = sampling::kolmogorov_form_kernel(&algebra, &["a", "b"], 1, &mut rng);
        let x = sampling::algebra_element(&algebra, &mut rng, 1.0);
        let neg = {
            let x = x.clone();
            SuperOperator::from_fn(&algebra, move |b| {
                x.adjoint().mul(b).mul(&x).scale(Complex64::new(-4.0, 0.0))
            })
        };
        let mut entries = Vec::new();
        for r in 0..2 {
            for c in 0..2 {
                let e = kernel.entry(r, c).clone();
                entries.push(if r == 0 && c == 0 { e.add(&neg) } else { e });
            }
        }
        let perturbed = CpdKernel::new(&algebra, vec!["a".into(), "b".into()], entries)
            .expect("perturbation preserves symmetry");
        let cpd = perturbed.is_cpd(PSD_TOL).expect("symmetric");
        report.check_bool(
            "Sec3-CPD",
            &format!("negative injection {k} is rejected"),
            !cpd,
        );
    }
    report
}

/// CE-split of unit kernels containing the vacuum: β_ω = 0, the L0 rows and
/// columns at ω vanish, L0 equals the ζ-pairing exactly, and L0 is CPD.
pub fn c03_ce_split(seed: u64) -> Report {
    let mut report = Report::new();
    let mut rng = rng_for(seed, 3);
    let system = m2_system();
    let algebra = system.algebra().clone();
    for k in 0..10 {
        let p1 = sampling::unit_params(&system, &mut rng, 1.0, 1.0);
        let p2 = sampling::unit_params(&system, &mut rng, 1.0, 1.0);
        let kernel = system
            .unit_kernel(&[
                ("w".into(), system.vacuum()),
                ("p".into(), p1.clone()),
                ("q".into(), p2.clone()),
            ])
            .expect("valid units");
        let split = kernel.ce_split("w", 1e-10).expect("vacuum row is central");
        report.check(
            "Eq4.2",
            &format!("β_ω = 0, instance {k}"),
            split.betas[0].operator_norm(),
            1e-12,
        );
        let mut edge = 0.0f64;
        for s in 0..3 {
            edge = edge.max(split.l0.entry(0, s).norm());
            edge = edge.max(split.l0.entry(s, 0).norm());
        }
        report.check(
            "Eq4.2",
            &format!("L0 vanishes at ω, instance {k}"),
            edge,
            1e-12,
        );
        let expected = SuperOperator::from_fn(&algebra, |b| {
            system
                .index()
                .inner(
                    &p1.zeta,
                    &system.index().left_mul(b, &p2.zeta).expect("member"),
                )
                .expect("member")
        });
        report.check(
            "Eq4.2",
            &format!("L0 = ⟨ζ, (·)ζ'⟩, instance {k}"),
            split.l0.entry(1, 2).distance(&expected),
            1e-12,
        );
        report.check_bool(
            "Eq4.2",
            &format!("L0 is CPD, instance {k}"),
            split.l0.is_cpd(PSD_TOL).expect("symmetric"),
        );
    }
    report
}

/// Trotter convergence at rate O(1/n): on 10 seeded M₂ instances with
/// ‖β‖,‖ζ‖ ≤ 1 and t = 1, error(2n) ≤ 0.75·error(n) for n ∈ {64,…,2048} and
/// error(4096) ≤ 1e-3; the cross-approximant obeys the same rate.
pub fn c04_trotter_convergence(seed: u64) -> Report {
    let mut report = Report::new();
    let mut rng = rng_for(seed, 4);
    let system = m2_system();
    let t = 1.0;
    let ns = [64usize, 128, 256, 512, 1024, 2048, 4096];
    for k in 0..10 {
        let p1 = sampling::unit_params(&system, &mut rng, 1.0, 1.0);
        let p2 = sampling::unit_params(&system, &mut rng, 1.0, 1.0);
        let probe = sampling::unit_params(&system, &mut rng, 1.0, 1.0);
        let w = WeightedUnits::new(
            vec![Complex64::new(0.5, 0.0), Complex64::new(0.5, 0.0)],
            vec![p1, p2],
        )
        .expect("weights sum to one");
        let mean = boxplus(&system, &w).expect("same system");

        let limit = system
            .generator(&mean, &mean)
            .expect("member")
            .exp(t)
            .expect("finite");
        let errors: Vec<f64> = ns
            .iter()
            .map(|&n| {
                approximant_superop(&system, &w, t, n)
                    .expect("n ≥ 1")
                    .distance(&limit)
            })
            .collect();
        for (i, pair) in errors.windows(2).enumerate() {
            report.check(
                "LemA.5-rate",
                &format!("instance {k}: error({}) ≤ 0.75·error({})", ns[i + 1], ns[i]),
                pair[1],
                0.75 * pair[0] + 1e-13,
            );
        }
        report.check(
            "LemA.5-rate",
            &format!("instance {k}: error(4096)"),
            errors[ns.len() - 1],
            1e-3,
        );

        let cross_limit = system
            .generator(&probe, &mean)
            .expect("member")
            .exp(t)
            .expect("finite");
        let cross_errors: Vec<f64> = ns
            .iter()
            .map(|&n| {
                cross_approximant_superop(&system, &probe, &w, t, n)
                    .expect("n ≥ 1")
                    .distance(&cross_limit)
            })
            .collect();
        for (i, pair) in cross_errors.windows(2).enumerate() {
            report.check(
                "LemA.5-cross",
                &format!(
                    "instance {k}: cross error({}) ≤ 0.75·error({})",
                    ns[i + 1],
                    ns[i]
                ),
                pair[1],
                0.75 * pair[0] + 1e-13,
            );
        }
        report.check(
            "LemA.5-cross",
            &format!("instance {k}: cross error(4096)"),
            cross_errors[ns.len() - 1],
            1e-3,
        );
    }
    report
}

/// Trotter algebra at parameter and generator level: associativity, vacuum
/// neutrality, drift composition and the vacuum-corrected generator identity,
/// all within 1e-12.
pub fn c05_trotter_algebra(seed: u64) -> Report {
    let mut report = Report::new();
    let mut rng = rng_for(seed, 5);
    let system = m2_system();
    for k in 0..10 {
        let p1 = sampling::unit_params(&system, &mut rng, 1.0, 1.0);
        let p2 = sampling::unit_params(&system, &mut rng, 1.0, 1.0);
        let p3 = sampling::unit_params(&system, &mut rng, 1.0, 1.0);
        let probe = sampling::unit_params(&system, &mut rng, 1.0, 1.0);

        let assoc_l = trotter_product(
            &system,
            &trotter_product(&system, &p1, &p2).expect("same system"),
            &p3,
        )
        .expect("same system");
        let assoc_r = trotter_product(
            &system,
            &p1,
            &trotter_product(&system, &p2, &p3).expect("same system"),
        )
        .expect("same system");
        report.check(
            "Prop4.5",
            &format!("associativity, instance {k}"),
            param_distance(&system, &assoc_l, &assoc_r),
            1e-12,
        );

        let neutral = trotter_product(&system, &p1, &system.vacuum()).expect("same system");
        report.check(
            "Def4.4",
            &format!("vacuum neutrality, instance {k}"),
            param_distance(&system, &neutral, &p1),
            1e-12,
        );

        let b1 = sampling::algebra_element(system.algebra(), &mut rng, 1.0);
        let b2 = sampling::algebra_element(system.algebra(), &mut rng, 1.0);
        let drifts = trotter_product(&system, &system.drift_unit(&b1), &system.drift_unit(&b2))
            .expect("same system");
        report.check(
            "Cor4.6",
            &format!("ω^β1 ⊗ ω^β2 = ω^(β1+β2), instance {k}"),
            param_distance(&system, &drifts, &system.drift_unit(&b1.add(&b2))),
            1e-12,
        );

        // exponential split leaves the CPD part alone and recombines exactly
        let (exp_part, drift) = exponentialize(&system, &p1);
        let back =
            trotter_product(&system, &exp_part, &system.drift_unit(&drift)).expect("same system");
        report.check(
            "Cor4.3",
            &format!("exponential split recombines, instance {k}"),
            param_distance(&system, &back, &p1),
            1e-12,
        );

        let prod = trotter_product(&system, &p1, &p2).expect("same system");
        let lhs = system.generator(&probe, &prod).expect("member");
        let rhs = system
            .generator(&probe, &p1)
            .expect("member")
            .add(&system.generator(&probe, &p2).expect("member"))
            .sub(&system.generator(&probe, &system.vacuum()).expect("member"));
        report.check(
            "Sec4-warning",
            &format!("L(p', p1⊗p2) = L(p',p1)+L(p',p2)-L(p',ω), instance {k}"),
            lhs.distance(&rhs),
            1e-12,
        );
    }
    report
}

fn param_distance(system: &TimeOrderedSystem, a: &UnitParams, b: &UnitParams) -> f64 {
    a.beta
        .distance(&b.beta)
        .max(system.index().norm(&a.zeta.sub(&b.zeta)))
}

/// Index additivity: pairwise generators of Trotter-composed embedded
/// exponential units equal the direct-sum generators exactly on 20 seeded
/// instances.
pub fn c06_index_additivity(seed: u64) -> Report {
    let mut report = Report::new();
    let mut rng = rng_for(seed, 6);
    let algebra = Algebra::full_matrix(2);
    let pair = ProductSystemPair::new(&Bimodule::free(&algebra, 1), &Bimodule::free(&algebra, 2))
        .expect("same algebra");
    for k in 0..20 {
        let z1 = sampling::module_vector(pair.factor(Side::Left).index(), &mut rng, 1.0);
        let z2 = sampling::module_vector(pair.factor(Side::Right).index(), &mut rng, 1.0);
        let w1 = sampling::module_vector(pair.factor(Side::Left).index(), &mut rng, 1.0);
        let w2 = sampling::module_vector(pair.factor(Side::Right).index(), &mut rng, 1.0);
        let compose = |a: &prodsys::ModuleVector, b: &prodsys::ModuleVector| {
            let ea = pair
                .embed_unit(
                    Side::Left,
                    &pair
                        .factor(Side::Left)
                        .unit(AlgebraElement::zero(&algebra), a.clone())
                        .expect("member"),
                )
                .expect("member");
            let eb = pair
                .embed_unit(
                    Side::Right,
                    &pair
                        .factor(Side::Right)
                        .unit(AlgebraElement::zero(&algebra), b.clone())
                        .expect("member"),
                )
                .expect("member");
            trotter_product(pair.product(), &ea, &eb).expect("same system")
        };
        let direct = |a: &prodsys::ModuleVector, b: &prodsys::ModuleVector| {
            pair.product()
                .unit(
                    AlgebraElement::zero(&algebra),
                    pair.sum()
                        .embed_left(a)
                        .expect("member")
                        .add(&pair.sum().embed_right(b).expect("member")),
                )
                .expect("member")
        };
        let lhs = pair
            .product()
            .generator(&compose(&z1, &z2), &compose(&w1, &w2))
            .expect("member");
        let rhs = pair
            .product()
            .generator(&direct(&z1, &z2), &direct(&w1, &w2))
            .expect("member");
        report.check(
            "Thm6.7",
            &format!("index additivity on generators, instance {k}"),
            lhs.distance(&rhs),
            1e-12,
        );
    }
    report
}

/// Unit decomposition in the product: 20 seeded product units recombine from
/// their projections exactly; perturbed exponential factors are rejected.
pub fn c07_unit_decomposition(seed: u64) -> Report {
    let mut report = Report::new();
    let mut rng = rng_for(seed, 7);
    let algebra = Algebra::full_matrix(2);
    let pair = ProductSystemPair::new(&Bimodule::free(&algebra, 1), &Bimodule::free(&algebra, 1))
        .expect("same algebra");
    for k in 0..20 {
        let p = sampling::unit_params(pair.product(), &mut rng, 1.0, 1.0);
        report.check(
            "Thm5.6",
            &format!("decomposition residual, instance {k}"),
            pair.decompose_residual(&p).expect("member"),
            1e-12,
        );
        // uniqueness: perturbing the left exponential factor must fail
        let delta = sampling::module_vector(pair.factor(Side::Left).index(), &mut rng, 1e-2);
        let left = pair
            .embed_unit(
                Side::Left,
                &pair
                    .factor(Side::Left)
                    .unit(
                        p.beta.clone(),
                        pair.project_unit(Side::Left, &p)
                            .expect("member")
                            .zeta
                            .add(&delta),
                    )
                    .expect("member"),
            )
            .expect("member");
        let right = pair
            .embed_unit(
                Side::Right,
                &pair.project_unit(Side::Right, &p).expect("member"),
            )
            .expect("member");
        let both = trotter_product(pair.product(), &left, &right).expect("same system");
        let recombined = trotter_product(
            pair.product(),
            &both,
            &pair.product().drift_unit(&p.beta.neg()),
        )
        .expect("same system");
        let residual = param_distance(pair.product(), &recombined, &p);
        report.check_bool(
            "Thm5.6",
            &format!("perturbed factors rejected, instance {k}"),
            residual > 1e-4,
        );
    }
    report
}

/// Automorphisms from central unital units over ℂ⊕M₂: the recipe produces a
/// two-sided unitary morphism sending the vacuum to the unit, and all
/// pairwise generators are conjugation-invariant within 1e-10.
pub fn c08_automorphisms(seed: u64) -> Report {
    let mut report = Report::new();
    let mut rng = rng_for(seed, 8);
    let algebra = Algebra::new(vec![1, 2]).expect("valid blocks");
    let system = TimeOrderedSystem::new(Bimodule::free(&algebra, 1));
    for k in 0..10 {
        let target =
            sampling::central_unital_unit(&system, &mut rng, 0.8).expect("center is nontrivial");
        let (central, unital) = system.is_central_unital(&target, 1e-10).expect("member");
        report.check_bool(
            "Prop6.6",
            &format!("sampled unit is central and unital, instance {k}"),
            central && unital,
        );
        let morphism = automorphism_to(&system, &target).expect("central unital");
        report.check_bool(
            "Prop6.6",
            &format!("morphism is an isomorphism, instance {k}"),
            morphism.is_isomorphism(1e-10),
        );
        report.check_bool(
            "Prop6.6",
            &format!("morphism satisfies the automorphism constraints, instance {k}"),
            morphism
                .satisfies_automorphism_constraints(&system, 1e-10)
                .expect("member"),
        );
        let image = morphism.apply(&system, &system.vacuum()).expect("member");
        report.check(
            "Prop6.6",
            &format!("vacuum maps to (β, ζ), instance {k}"),
            param_distance(&system, &image, &target),
            1e-12,
        );
        let mut residual = 0.0f64;
        for _ in 0..3 {
            let p = sampling::unit_params(&system, &mut rng, 1.0, 1.0);
            let q = sampling::unit_params(&system, &mut rng, 1.0, 1.0);
            let before = system.generator(&p, &q).expect("member");
            let after = system
                .generator(
                    &morphism.apply(&system, &p).expect("member"),
                    &morphism.apply(&system, &q).expect("member"),
                )
                .expect("member");
            residual = residual.max(before.distance(&after));
        }
        report.check(
            "Prop6.6",
            &format!("generators conjugation-invariant, instance {k}"),
            residual,
            1e-10,
        );
    }
    report
}

/// Exhaustive tuple-decomposition check: over all tuples of length ≤ 7 with
/// entries in {1,2,3,4}, brute-force enumeration finds exactly one valid
/// segmentation and it equals the greedy output.
pub fn c09_tuple_decomposition(_seed: u64) -> Report {
    let mut report = Report::new();
    let values = [1.0f64, 2.0, 3.0, 4.0];
    let mut total = 0usize;
    for len in 1..=7usize {
        let mut mismatches = 0usize;
        let mut nonunique = 0usize;
        let mut idx = vec![0usize; len];
        loop {
            let entries: Vec<f64> = idx.iter().map(|&i| values[i]).collect();
            total += 1;
            let valid = enumerate_valid_segmentations(&entries);
            if valid.len() != 1 {
                nonunique += 1;
            } else {
                let tuple = prodsys::free_flow::TimeTuple::new(entries).expect("positive");
                if valid[0] != decompose(&tuple) {
                    mismatches += 1;
                }
            }
            // odometer over {0..3}^len
            let mut pos = len;
            let mut done = true;
            while pos > 0 {
                pos -= 1;
                if idx[pos] + 1 < values.len() {
                    idx[pos] += 1;
                    for p in pos + 1..len {
                        idx[p] = 0;
                    }
                    done = false;
                    break;
                }
            }
            if done {
                break;
            }
        }
        report.check(
            "Prop9.1",
            &format!("unique segmentation for all length-{len} tuples"),
            nonunique as f64,
            0.5,
        );
        report.check(
            "Prop9.1",
            &format!("greedy output matches the oracle at length {len}"),
            mismatches as f64,
            0.5,
        );
    }
    report.check_bool(
        "Prop9.1",
        &format!("checked {total} tuples (≥ 16384)"),
        total >= 16384,
    );
    report
}

/// The free flow is the time-ordered system over its index: the closed
/// overlap series equals the unit inner product on the Kolmogorov-realized
/// truncated index within 1e-9, and the simplex quadrature converges to it
/// with observed order ≥ 0.9 over h ∈ {1/8, 1/16, 1/32} (N = 3, B = M₂,
/// rank-one F).
pub fn c10_free_flow_isomorphism(seed: u64) -> Report {
    let mut report = Report::new();
    let mut rng = rng_for(seed, 10);
    let algebra = Algebra::full_matrix(2);
    let base = Bimodule::free(&algebra, 1);
    let n_particles = 3;
    let t = 1.0;
    let z1 = sampling::free_unit_param(&base, &mut rng, n_particles);
    let z2 = sampling::free_unit_param(&base, &mut rng, n_particles);

    // Kolmogorov realization of the overlap kernel
    let entries = vec![
        overlap_superop(&z1, &z1, n_particles).expect("same base"),
        overlap_superop(&z1, &z2, n_particles).expect("same base"),
        overlap_superop(&z2, &z1, n_particles).expect("same base"),
        overlap_superop(&z2, &z2, n_particles).expect("same base"),
    ];
    let kernel = CpdKernel::new(&algebra, vec!["z".into(), "z'".into()], entries)
        .expect("overlap kernel is symmetric");
    let dec = kernel.kolmogorov().expect("overlap kernel is CPD");
    let system = TimeOrderedSystem::new(dec.module.clone());
    let p = system
        .unit(AlgebraElement::zero(&algebra), dec.vectors[0].clone())
        .expect("member");
    let q = system
        .unit(AlgebraElement::zero(&algebra), dec.vectors[1].clone())
        .expect("member");
    for pidx in 0..algebra.dim() {
        let b = algebra.basis_element(pidx);
        let closed = free_inner_closed(&z1, &z2, &b, t, n_particles).expect("finite");
        let via_units = system.unit_inner(&p, &q, t, &b).expect("member");
        report.check(
            "Thm9.3",
            &format!("closed series = unit inner product at basis {pidx}"),
            closed.distance(&via_units),
            1e-9,
        );
    }

    // quadrature order in h against the closed form
    let one = algebra.unit();
    let closed = free_inner_closed(&z1, &z2, &one, t, n_particles).expect("finite");
    let errs: Vec<f64> = [1.0 / 8.0, 1.0 / 16.0, 1.0 / 32.0]
        .iter()
        .map(|&h| {
            free_inner_quadrature(&z1, &z2, &one, t, n_particles, h)
                .expect("finite")
                .distance(&closed)
        })
        .collect();
    let order1 = (errs[0] / errs[1]).log2();
    let order2 = (errs[1] / errs[2]).log2();
    report.check(
        "Cor9.2-quadrature",
        "observed order ≥ 0.9 on h = 1/8 → 1/16",
        (0.9 - order1).max(0.0),
        1e-12,
    );
    report.check(
        "Cor9.2-quadrature",
        "observed order ≥ 0.9 on h = 1/16 → 1/32",
        (0.9 - order2).max(0.0),
        1e-12,
    );
    report
}

/// The shift recursion at split horizons with its unique contributing term,
/// pointwise within 1e-12 on 200 seeded tuples.
pub fn c11_unit_recursion(seed: u64) -> Report {
    let mut report = Report::new();
    let mut rng = rng_for(seed, 11);
    let algebra = Algebra::full_matrix(2);
    let base = Bimodule::free(&algebra, 1);
    let zeta = sampling::free_unit_param(&base, &mut rng, 3);
    let mut max_residual = 0.0f64;
    let mut max_admissible = 0usize;
    for k in 0..200 {
        let len = rng.random_range(1..=5usize);
        let tuple = sampling::time_tuple(&mut rng, len, 0.05, 2.4);
        let s = rng.random_range(0.3..1.2);
        let t = rng.random_range(0.3..1.2);
        let (residual, admissible) =
            unit_recursion_residual(&zeta, s, t, &tuple).expect("positive times");
        max_residual = max_residual.max(residual);
        max_admissible = max_admissible.max(admissible);
        if k % 50 == 49 {
            report.check(
                "Eq9.1",
                &format!("recursion residual over tuples {}..{}", k - 49, k),
                max_residual,
                1e-12,
            );
        }
    }
    report.check_bool(
        "Eq9.1",
        "at most one contributing term per tuple",
        max_admissible <= 1,
    );
    report
}

/// Scalar-case tensor factorization of exponential-unit inner products,
/// within 1e-12 on 20 seeded complex-vector instances at t ∈ {0.1, 1, 2}.
pub fn c12_scalar_tensor(seed: u64) -> Report {
    let mut report = Report::new();
    let mut rng = rng_for(seed, 12);
    let algebra = Algebra::scalar();
    let pair = ProductSystemPair::new(&Bimodule::free(&algebra, 2), &Bimodule::free(&algebra, 2))
        .expect("same algebra");
    for k in 0..20 {
        let sample = (
            (
                sampling::module_vector(pair.factor(Side::Left).index(), &mut rng, 1.0),
                sampling::module_vector(pair.factor(Side::Right).index(), &mut rng, 1.0),
            ),
            (
                sampling::module_vector(pair.factor(Side::Left).index(), &mut rng, 1.0),
                sampling::module_vector(pair.factor(Side::Right).index(), &mut rng, 1.0),
            ),
        );
        let res = prodsys::product::scalar_tensor_residual(&pair, &[sample], &[0.1, 1.0, 2.0])
            .expect("scalar algebra");
        report.check(
            "Prop6.8",
            &format!("tensor factorization, instance {k}"),
            res,
            1e-12,
        );
    }
    report
}

/// A named criterion runner.
pub type Criterion = (&'static str, fn(u64) -> Report);

/// Name, runner pairs for all criteria, in order.
pub fn all_criteria() -> Vec<Criterion> {
    vec![
        ("C01 semigroup law (Eq3.1)", c01_semigroup_law),
        ("C02 CPD + Kolmogorov round-trip (Sec3)", c02_cpd_kolmogorov),
        ("C03 CE-split (Eq4.2)", c03_ce_split),
        ("C04 Trotter convergence (LemA.5)", c04_trotter_convergence),
        (
            "C05 Trotter algebra (Def4.4/Prop4.5/Cor4.6)",
            c05_trotter_algebra,
        ),
        ("C06 index additivity (Thm6.7)", c06_index_additivity),
        ("C07 unit decomposition (Thm5.6)", c07_unit_decomposition),
        ("C08 automorphisms (Prop6.6)", c08_automorphisms),
        ("C09 tuple decomposition (Prop9.1)", c09_tuple_decomposition),
        (
            "C10 free flow isomorphism (Thm9.3/Cor9.2)",
            c10_free_flow_isomorphism,
        ),
        ("C11 unit recursion (Eq9.1)", c11_unit_recursion),
        (
            "C12 scalar tensor factorization (Prop6.8)",
            c12_scalar_tensor,
        ),
    ]
}

/// Runs every criterion with the given seed into one report.
pub fn run_suite(seed: u64) -> Report {
    let mut report = Report::new();
    for (_, runner) in all_criteria() {
        report.extend(runner(seed));
    }
    report
}
