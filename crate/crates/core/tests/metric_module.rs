mod common;

use courant_cas::der::DerElement;
use courant_cas::module::{bianchi_check, Connection, Curvature, MetricModule};
use courant_cas::poly::{Algebra, Poly};
use courant_cas::{sample, Error};
use proptest::prelude::*;

#[test]
fn metrize_example() {
    let alg = Algebra::free_poly(&["x"]).unwrap();
    let gram = vec![
        vec![alg.parse_poly("1 + x^2").unwrap(), alg.parse_poly("x").unwrap()],
        vec![alg.parse_poly("x").unwrap(), alg.one()],
    ];
    let m = MetricModule::with_gram(alg.clone(), gram).unwrap();
    let flat = Connection::flat(&m);
    assert!(!flat.is_metric(&m));
    let c = flat.metrize(&m);
    assert!(c.is_metric(&m));
    assert!(bianchi_check(&c, &m).unwrap());
}

#[test]
fn non_unimodular_gram_is_rejected() {
    let alg = Algebra::free_poly(&["x"]).unwrap();
    let gram = vec![vec![alg.parse_poly("1 + x^2").unwrap(), alg.zero()], vec![alg.zero(), alg.one()]];
    assert!(matches!(MetricModule::with_gram(alg, gram), Err(Error::GramNotInvertible(_))));
}

#[test]
fn asymmetric_gram_is_rejected() {
    let alg = Algebra::free(1);
    let gram = vec![vec![alg.one(), alg.gen(0)], vec![alg.zero(), alg.one()]];
    assert!(matches!(MetricModule::with_gram(alg, gram), Err(Error::GramNotSymmetric(0, 1))));
}

#[test]
fn dual_number_gram_with_eps() {
    let dual = Algebra::dual_num();
    let eps = dual.gen(0);
    let m = MetricModule::with_gram(dual.clone(), vec![vec![dual.one(), eps.clone()], vec![eps, dual.one()]]).unwrap();
    let c = Connection::flat(&m).metrize(&m);
    assert!(c.is_metric(&m));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn gram_inverse_is_exact(seed in any::<u64>(), nv in 1usize..=2, rank in 1usize..=4) {
        let mut rng = common::rng(seed);
        let alg = Algebra::free(nv);
        let m = MetricModule::with_gram(alg.clone(), sample::unimodular_gram(&mut rng, &alg, rank, 2)).unwrap();
        for a in 0..rank {
            for b in 0..rank {
                let mut acc = alg.zero();
                for c in 0..rank {
                    acc = &acc + &(m.gram(a, c) * m.ginv(c, b));
                }
                prop_assert_eq!(acc, if a == b { alg.one() } else { alg.zero() });
            }
        }
    }

    #[test]
    fn metrized_connections_are_metric(seed in any::<u64>(), nv in 1usize..=2, rank in 1usize..=3) {
        let mut rng = common::rng(seed);
        let ra = sample::rothstein_algebra(&mut rng, nv, rank, 1).unwrap();
        let (m, c) = (ra.module(), ra.connection());
        for i in 0..m.der_rank() {
            for a in 0..rank {
                for b in 0..rank {
                    let lhs = m.gram(a, b).der_basis_apply(i);
                    let rhs = &m.inner(&c.nabla_basis(m, i, &m.basis(a)), &m.basis(b)).unwrap()
                        + &m.inner(&m.basis(a), &c.nabla_basis(m, i, &m.basis(b))).unwrap();
                    prop_assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn curvature_properties(seed in any::<u64>(), rank in 1usize..=3) {
        let mut rng = common::rng(seed);
        let ra = sample::rothstein_algebra(&mut rng, 2, rank, 1).unwrap();
        let (m, c) = (ra.module(), ra.connection());
        let kind = m.kind();
        let r = Curvature::new(c, m).unwrap();
        prop_assert!(r.bianchi_holds(c, m));
        // skew-adjointness of the operator
        for a in 0..rank {
            for b in 0..rank {
                let x = c.curvature_operator(m, 0, 1, &m.basis(a));
                let y = c.curvature_operator(m, 0, 1, &m.basis(b));
                prop_assert!((&m.inner(&x, &m.basis(b)).unwrap() + &m.inner(&y, &m.basis(a)).unwrap()).is_zero());
            }
        }
        // pairing form agrees with the operator form
        let x = sample::module_element(&mut rng, m, 1);
        let y = sample::module_element(&mut rng, m, 1);
        prop_assert_eq!(r.pair(m, 0, 1, &x, &y), m.inner(&c.curvature_operator(m, 0, 1, &x), &y).unwrap());
        // A-bilinearity in the derivation slots
        let f = sample::poly(&mut rng, kind, 1, 2);
        let d = DerElement::basis(kind, 0);
        let e = DerElement::basis(kind, 1);
        let lhs = c.curvature_operator_general(m, &d.scale(&f).unwrap(), &e, &x).unwrap();
        prop_assert_eq!(lhs, c.curvature_operator(m, 0, 1, &x).scale(&f));
        let general = c.curvature_operator_general(m, &d, &e.scale(&Poly::from_int(kind, 1)).unwrap(), &x).unwrap();
        prop_assert_eq!(general, c.curvature_operator(m, 0, 1, &x));
    }
}
