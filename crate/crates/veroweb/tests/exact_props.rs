use proptest::prelude::*;
use veroweb::exact::factor::{factor, rational_roots};
use veroweb::exact::jet::monomials;
use veroweb::exact::{qf, var_names, Field, JetSeries, Matrix, UniPoly, Q, QI};

fn rat() -> impl Strategy<Value = Q> {
    (-9i64..10, 1i64..5).prop_map(|(n, d)| qf(n, d))
}

fn gauss() -> impl Strategy<Value = QI> {
    (rat(), rat()).prop_map(|(a, b)| QI::new(a, b))
}

fn square(n: usize) -> impl Strategy<Value = Matrix> {
    prop::collection::vec(prop::collection::vec(rat(), n), n).prop_map(Matrix::from_rows)
}

fn sized_square() -> impl Strategy<Value = Matrix> {
    (1usize..5).prop_flat_map(square)
}

fn poly(max_deg: usize) -> impl Strategy<Value = UniPoly> {
    prop::collection::vec(rat(), 1..=max_deg + 1).prop_map(UniPoly::new)
}

fn eval_matrix(p: &UniPoly, a: &Matrix) -> Matrix {
    // Horner in the matrix algebra
    let n = a.rows();
    p.coeffs().iter().rev().fold(Matrix::zeros(n, n), |acc, c| acc.mul(a).add(&Matrix::identity(n).scale(c)))
}

fn series(vars: &std::sync::Arc<Vec<String>>, coeffs: &[Q]) -> JetSeries {
    let monos = monomials(vars.len(), 3);
    JetSeries::from_terms(vars, 3, monos.into_iter().zip(coeffs.iter().cloned()).map(|(m, c)| (m.0, c)))
}

fn field_axioms<F: Field>(a: F, b: F, c: F) -> Result<(), TestCaseError> {
    prop_assert_eq!(a.clone() + b.clone(), b.clone() + a.clone());
    prop_assert_eq!(a.clone() * b.clone(), b.clone() * a.clone());
    prop_assert_eq!((a.clone() * b.clone()) * c.clone(), a.clone() * (b.clone() * c.clone()));
    prop_assert_eq!(a.clone() * (b.clone() + c.clone()), a.clone() * b.clone() + a.clone() * c.clone());
    prop_assert_eq!(a.clone() - a.clone(), F::zero());
    if a != F::zero() {
        prop_assert_eq!(a.clone() * a.inv(), F::one());
        prop_assert_eq!((b.clone() / a.clone()) * a.clone(), b.clone());
    }
    prop_assert_eq!(F::parse(&a.to_string()).unwrap(), a);
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rationals_form_a_field(a in rat(), b in rat(), c in rat()) {
        field_axioms(a, b, c)?;
    }

    #[test]
    fn gaussian_rationals_form_a_field(a in gauss(), b in gauss(), c in gauss()) {
        field_axioms(a.clone(), b, c)?;
        prop_assert_eq!(a.clone() * a.conj(), QI::from_q(a.norm()));
    }

    #[test]
    fn determinant_is_multiplicative((a, b) in (1usize..5).prop_flat_map(|n| (square(n), square(n)))) {
        prop_assert_eq!(a.mul(&b).det(), a.det() * b.det());
        prop_assert_eq!(a.transpose().det(), a.det());
    }

    #[test]
    fn inverse_exists_iff_determinant_nonzero(a in sized_square()) {
        match a.inverse() {
            Some(inv) => {
                prop_assert!(a.det() != Q::from_i64(0));
                prop_assert_eq!(a.mul(&inv), Matrix::identity(a.rows()));
            }
            None => prop_assert_eq!(a.det(), Q::from_i64(0)),
        }
    }

    #[test]
    fn rank_plus_nullity(rows in 1usize..5, cols in 1usize..5, seed in prop::collection::vec(rat(), 16)) {
        // repeat a row so rank deficiency occurs
        let mut m: Vec<Vec<Q>> = (0..rows).map(|i| (0..cols).map(|j| seed[(i * cols + j) % 16].clone()).collect()).collect();
        if rows > 1 {
            m[rows - 1] = m[0].clone();
        }
        let a = Matrix::from_rows(m);
        let ker = a.kernel_vectors();
        prop_assert_eq!(a.rank() + ker.len(), cols);
        for v in &ker {
            prop_assert!(a.apply(v).iter().all(|x| *x == Q::from_i64(0)));
        }
        let (r, piv) = a.rref();
        prop_assert_eq!(piv.len(), a.rank());
        prop_assert_eq!(r.rref().0, r);
    }

    #[test]
    fn solve_returns_a_solution(a in sized_square(), x in prop::collection::vec(rat(), 4)) {
        let x = &x[..a.cols()];
        let b = a.apply(x);
        let y = a.solve(&b).expect("consistent system");
        prop_assert_eq!(a.apply(&y), b);
    }

    #[test]
    fn characteristic_polynomial_annihilates(a in sized_square()) {
        let p = a.char_poly().unwrap();
        prop_assert_eq!(p.degree(), Some(a.rows()));
        // det(M + tI) annihilates −M
        prop_assert!(eval_matrix(&p, &a.scale(&Q::from_i64(-1))).is_zero());
        prop_assert_eq!(p.coeff(0), a.det());
        prop_assert_eq!(p.coeff(a.rows() - 1), a.trace());
    }

    #[test]
    fn division_with_remainder(f in poly(6), g in poly(3)) {
        prop_assume!(!g.is_zero());
        let (quo, rem) = f.div_rem(&g);
        prop_assert_eq!(quo.mul(&g).add(&rem), f);
        prop_assert!(rem.is_zero() || rem.degree() < g.degree());
    }

    #[test]
    fn gcd_divides_both(f in poly(4), g in poly(4), h in poly(2)) {
        prop_assume!(!h.is_zero() && !f.is_zero() && !g.is_zero());
        let (a, b) = (f.mul(&h), g.mul(&h));
        let d = a.gcd(&b);
        prop_assert!(a.div_exact(&d).is_some());
        prop_assert!(b.div_exact(&d).is_some());
        prop_assert!(d.div_exact(&h.monic()).is_some());
    }

    #[test]
    fn factorisation_multiplies_back(roots in prop::collection::vec(rat(), 0..4), extra in poly(3)) {
        prop_assume!(!extra.is_zero());
        let p = roots.iter().fold(extra.clone(), |acc, r| acc.mul(&UniPoly::linear(-r.clone())));
        let fz = factor(&p);
        let prod = fz.factors.iter().fold(UniPoly::constant(p.lead()), |acc, (f, k)| acc.mul(&f.pow(*k)));
        prop_assert_eq!(prod, p.clone());
        let found = rational_roots(&p);
        for r in &roots {
            prop_assert!(found.contains(r));
        }
        for r in &found {
            prop_assert_eq!(p.eval(r), Q::from_i64(0));
        }
    }

    #[test]
    fn jet_product_rules(a in prop::collection::vec(rat(), 10), b in prop::collection::vec(rat(), 10)) {
        let vars = var_names(&["u", "v"]);
        let (f, g) = (series(&vars, &a), series(&vars, &b));
        for i in 0..2 {
            let lhs = f.mul(&g).deriv(i);
            let rhs = f.deriv(i).mul(&g).add(&f.mul(&g.deriv(i)));
            prop_assert_eq!(lhs, rhs);
            prop_assert_eq!(f.deriv(i).integrate(i).deriv(i), f.deriv(i));
        }
        if f.constant_term() != Q::from_i64(0) {
            let inv = f.inverse().unwrap();
            prop_assert_eq!(f.mul(&inv), JetSeries::one(&vars, 3));
        }
    }
}
