//! Property tests for the algebra and superoperator layer.

use nalgebra::DVector;
use num_complex::Complex64;
use prodsys::{Algebra, AlgebraElement, SuperOperator};
use proptest::prelude::*;

fn complex_strategy() -> impl Strategy<Value = Complex64> {
    (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(re, im)| Complex64::new(re, im))
}

fn element_strategy(algebra: Algebra) -> impl Strategy<Value = AlgebraElement> {
    let dim = algebra.dim();
    proptest::collection::vec(complex_strategy(), dim).prop_map(move |coords| {
        AlgebraElement::from_coords(&algebra, &DVector::from_vec(coords)).unwrap()
    })
}

fn superop_strategy(algebra: Algebra, norm_bound: f64) -> impl Strategy<Value = SuperOperator> {
    let dim = algebra.dim();
    proptest::collection::vec(complex_strategy(), dim * dim).prop_map(move |entries| {
        let m = nalgebra::DMatrix::from_vec(dim, dim, entries);
        let t = SuperOperator::from_matrix(&algebra, m).unwrap();
        let n = t.norm();
        if n <= 1e-300 {
            t
        } else {
            t.scale(Complex64::new(norm_bound / n, 0.0))
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    // exp((s+t)L) = exp(tL)∘exp(sL), relative to the size of the result
    #[test]
    fn exponential_semigroup_law(
        l in superop_strategy(Algebra::new(vec![1, 2]).unwrap(), 5.0),
        s in 0.0f64..2.0,
        t in 0.0f64..2.0,
    ) {
        let lhs = l.exp(s + t).unwrap();
        let rhs = l.exp(t).unwrap().compose(&l.exp(s).unwrap());
        let scale = lhs.norm().max(1.0);
        prop_assert!(lhs.distance(&rhs) <= 1e-10 * scale);
    }

    // b*·b is positive for every b
    #[test]
    fn squares_are_positive(b in element_strategy(Algebra::new(vec![2, 1]).unwrap())) {
        prop_assert!(b.adjoint().mul(&b).is_positive(1e-9).unwrap());
    }

    // exp(tL) against an independent scaled Taylor oracle: sum the series at
    // t/2^k where it converges fast, then square k times
    #[test]
    fn exponential_matches_taylor_oracle(
        l in superop_strategy(Algebra::new(vec![1, 2]).unwrap(), 4.0),
        t in -2.0f64..2.0,
    ) {
        let fast = l.exp(t).unwrap();
        let k = 6u32;
        let step = t / f64::from(1u32 << k);
        let scaled = l.matrix() * Complex64::new(step, 0.0);
        let dim = scaled.nrows();
        let mut series = nalgebra::DMatrix::<Complex64>::identity(dim, dim);
        let mut term = nalgebra::DMatrix::<Complex64>::identity(dim, dim);
        for order in 1..30 {
            term = &term * &scaled / Complex64::new(f64::from(order), 0.0);
            series += &term;
        }
        let mut oracle = series;
        for _ in 0..k {
            oracle = &oracle * &oracle;
        }
        let oracle = SuperOperator::from_matrix(l.algebra(), oracle).unwrap();
        let scale = fast.norm().max(1.0);
        prop_assert!(fast.distance(&oracle) <= 1e-12 * scale);
    }

    // complete positivity is invariant under unitary conjugation
    // T ↦ u*·T(u·(·)·u*)·u
    #[test]
    fn cp_invariant_under_unitary_conjugation(
        x in element_strategy(Algebra::full_matrix(2)),
        h in element_strategy(Algebra::full_matrix(2)),
    ) {
        let algebra = Algebra::full_matrix(2);
        // u = exp(i(h+h*)/2) is unitary
        let herm = h.add(&h.adjoint()).scale(Complex64::new(0.5, 0.0));
        let u = herm.scale(Complex64::new(0.0, 1.0)).exp();
        let t = SuperOperator::conjugation(&x);
        let conjugated = {
            let (u2, t2) = (u.clone(), t.clone());
            SuperOperator::from_fn(&algebra, move |b| {
                u2.adjoint()
                    .mul(&t2.apply(&u2.mul(b).mul(&u2.adjoint())))
                    .mul(&u2)
            })
        };
        let before = t.is_completely_positive(1e-9).unwrap();
        let after = conjugated.is_completely_positive(1e-9).unwrap();
        prop_assert_eq!(before, after);
        prop_assert!(before);
    }
}
