use std::collections::BTreeSet;

use proptest::prelude::*;
use quadra_core::numerics::{
    determinant, is_positive_definite, solve_linear, symmetric_eigenvalues,
};
use quadra_core::prescribed::{solve, solve_prescribed_real};
use quadra_core::tmp::solve_tmp;
use quadra_core::verify::moments_of;
use quadra_core::{
    Atom, Matrix, Measure, Mode, MomentSequence, Polynomial, PrescribedProblem, Scalar,
    TmpVerdict, Tolerances,
};

fn grid(k: i64) -> Scalar {
    Scalar::ratio(k, 1000)
}

fn measure_from(points: &BTreeSet<i64>, weights: &[i64]) -> Measure {
    Measure::new(
        points
            .iter()
            .zip(weights)
            .map(|(&k, &w)| (Atom::Real(grid(k)), grid(w)))
            .collect(),
    )
    .unwrap()
}

fn atoms(max: usize) -> impl Strategy<Value = (BTreeSet<i64>, Vec<i64>)> {
    (
        prop::collection::btree_set(-10_000i64..=10_000, 1..=max),
        prop::collection::vec(1i64..=2000, max),
    )
}

fn int_matrix(n: usize) -> impl Strategy<Value = Matrix> {
    prop::collection::vec(-20i64..=20, n * n).prop_map(move |v| {
        Matrix::from_fn(n, n, |i, j| Scalar::from(v[i * n + j]))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn exact_solve_satisfies_system(a in int_matrix(4), b in prop::collection::vec(-50i64..=50, 4)) {
        let b: Vec<Scalar> = b.into_iter().map(Scalar::from).collect();
        match solve_linear(&a, &b) {
            Ok(x) => prop_assert_eq!(a.mul_vec(&x).unwrap(), b),
            Err(_) => prop_assert!(determinant(&a).unwrap().is_zero()),
        }
    }

    #[test]
    fn determinant_is_multiplicative(a in int_matrix(3), b in int_matrix(3)) {
        let ab = a.mul(&b).unwrap();
        prop_assert_eq!(
            determinant(&ab).unwrap(),
            determinant(&a).unwrap() * determinant(&b).unwrap()
        );
    }

    #[test]
    fn pd_matrices_have_nonnegative_eigenvalues(a in int_matrix(4)) {
        let g = a.transpose().mul(&a).unwrap();
        if is_positive_definite(&g).unwrap().is_yes() {
            let norm = g.to_f64_rows().iter().flatten().fold(0.0f64, |m, x| m.max(x.abs()));
            for e in symmetric_eigenvalues(&g).unwrap() {
                prop_assert!(e > -1e-6 * norm);
            }
        }
    }

    #[test]
    fn from_roots_vanishes_on_roots(roots in prop::collection::vec(-5000i64..=5000, 1..=5)) {
        let roots: Vec<Scalar> = roots.into_iter().map(grid).collect();
        let p = Polynomial::from_roots(&roots);
        prop_assert_eq!(p.degree(), roots.len());
        prop_assert!(p.is_monic());
        for r in &roots {
            prop_assert!(p.eval(r).is_zero());
        }
    }

    #[test]
    fn companion_characteristic_polynomial(
        coeffs in prop::collection::vec(-30i64..=30, 1..=4),
        x in -20i64..=20,
    ) {
        let mut c: Vec<Scalar> = coeffs.into_iter().map(Scalar::from).collect();
        c.push(Scalar::from(1));
        let p = Polynomial::new(c);
        let comp = p.companion_matrix().unwrap();
        let n = comp.rows();
        let xs = Scalar::from(x);
        let shifted = Matrix::identity(n, Mode::Exact).scale(&xs).sub(&comp).unwrap();
        prop_assert_eq!(determinant(&shifted).unwrap(), p.eval(&xs));
    }

    #[test]
    fn localizing_is_linear_in_f(
        gamma in prop::collection::vec(-100i64..=100, 9),
        f in prop::collection::vec(-5i64..=5, 1..=3),
        g in prop::collection::vec(-5i64..=5, 1..=3),
    ) {
        let gamma = MomentSequence::from_ints(&gamma).unwrap();
        let f = Polynomial::new(f.into_iter().map(Scalar::from).collect());
        let g = Polynomial::new(g.into_iter().map(Scalar::from).collect());
        let sum = gamma.localize(&f.add(&g)).unwrap().values;
        let lf = gamma.localize(&f).unwrap().values;
        let lg = gamma.localize(&g).unwrap().values;
        let n = sum.len().min(lf.len()).min(lg.len());
        for i in 0..n {
            prop_assert_eq!(&sum[i], &(&lf[i] + &lg[i]));
        }
    }

    #[test]
    fn moment_matrices_are_hankel(gamma in prop::collection::vec(-100i64..=100, 1..=11)) {
        let gamma = MomentSequence::from_ints(&gamma).unwrap();
        let ell = gamma.degree() / 2;
        let m = gamma.moment_matrix(ell).unwrap();
        for i in 0..=ell {
            for j in 0..=ell {
                prop_assert_eq!(&m[(i, j)], &gamma.as_slice()[i + j]);
            }
        }
    }

    #[test]
    fn recursion_of_vanishing_polynomial_continues_moments((pts, w) in atoms(4), extra in 1usize..=3) {
        let measure = measure_from(&pts, &w);
        let h = Polynomial::from_roots(&measure.real_nodes());
        let degree = 2 * pts.len();
        let gamma = moments_of(&measure, degree);
        let extended = gamma.recursive_extend(&h, extra).unwrap();
        prop_assert_eq!(extended, moments_of(&measure, degree + extra));
    }

    #[test]
    fn moments_are_linear_in_the_measure((pa, wa) in atoms(3), (pb, wb) in atoms(3)) {
        let a = measure_from(&pa, &wa);
        let b = measure_from(&pb, &wb);
        let mut merged: Vec<(Atom, Scalar)> = a.atoms().to_vec();
        for (atom, rho) in b.atoms() {
            match merged.iter_mut().find(|(x, _)| x == atom) {
                Some((_, r)) => *r = &*r + rho,
                None => merged.push((atom.clone(), rho.clone())),
            }
        }
        let union = Measure::new(merged).unwrap();
        let (ma, mb) = (moments_of(&a, 6), moments_of(&b, 6));
        let sum: Vec<Scalar> = ma.as_slice().iter().zip(mb.as_slice()).map(|(x, y)| x + y).collect();
        prop_assert_eq!(moments_of(&union, 6).into_vec(), sum);
    }

    #[test]
    fn classical_round_trip_is_exact((pts, w) in atoms(5)) {
        let measure = measure_from(&pts, &w);
        let gamma = moments_of(&measure, 2 * pts.len());
        match solve_tmp(&gamma, &Tolerances::default()).unwrap() {
            TmpVerdict::Unique(found) => prop_assert_eq!(found, measure),
            other => prop_assert!(false, "{:?}", other),
        }
    }

    #[test]
    fn classical_scaling_covariance((pts, w) in atoms(4), c in 1i64..=50) {
        let measure = measure_from(&pts, &w);
        let gamma = moments_of(&measure, 2 * pts.len());
        let c = Scalar::ratio(c, 7);
        let scaled = MomentSequence::new(gamma.as_slice().iter().map(|g| g * &c).collect()).unwrap();
        let tol = Tolerances::default();
        let (TmpVerdict::Unique(a), TmpVerdict::Unique(b)) =
            (solve_tmp(&gamma, &tol).unwrap(), solve_tmp(&scaled, &tol).unwrap())
        else {
            return Err(TestCaseError::fail("expected unique measures"));
        };
        prop_assert_eq!(a.real_nodes(), b.real_nodes());
        for (x, y) in a.densities().iter().zip(b.densities()) {
            prop_assert_eq!(&(x * &c), &y);
        }
    }

    #[test]
    fn prescribed_round_trip_is_exact((pts, w) in atoms(6), pick in 1usize..=5) {
        prop_assume!(pts.len() >= 2);
        let measure = measure_from(&pts, &w);
        let d1 = pick.min(pts.len() - 1);
        let d2 = pts.len() - d1;
        let gamma = moments_of(&measure, d1 + 2 * d2 - 1);
        let prescribed: Vec<Scalar> = measure.real_nodes().into_iter().rev().take(d1).collect();
        let tol = Tolerances::default();
        let problem = PrescribedProblem::new(gamma, prescribed, d2, false, &tol).unwrap();
        let out = solve_prescribed_real(&problem, &tol).unwrap();
        let found = out.verdict.quadrature().map(|q| q.measure.clone());
        prop_assert_eq!(found, Some(measure));
    }

    #[test]
    fn infinity_round_trip((pts, w) in atoms(4), pick in 1usize..=4, alpha in 1i64..=3000) {
        let measure = measure_from(&pts, &w)
            .with_atom(Atom::Infinity, grid(alpha))
            .unwrap();
        let d1 = pick.min(pts.len());
        let d2 = pts.len() + 1 - d1;
        let gamma = moments_of(&measure, d1 + 2 * d2 - 1);
        let prescribed: Vec<Scalar> = measure.real_nodes()[..d1].to_vec();
        let tol = Tolerances::default();
        let Ok(problem) = PrescribedProblem::new(gamma.clone(), prescribed, d2, true, &tol) else {
            return Ok(());
        };
        let out = solve(&problem, &tol).unwrap();
        let found = out.verdict.quadrature().map(|q| q.measure.clone());
        prop_assert!(found.is_some(), "{:?}", out.verdict);
        prop_assert_eq!(moments_of(&found.unwrap(), gamma.degree()), gamma);
    }
}
