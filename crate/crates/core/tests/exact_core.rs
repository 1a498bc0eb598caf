mod common;

use courant_cas::der::{DerElement, SymMultiDerivation};
use courant_cas::poly::{Algebra, BackendKind, Poly};
use courant_cas::{sample, Rational};
use proptest::prelude::*;
use rand::Rng;

fn backends() -> [BackendKind; 3] {
    [Algebra::free(1).kind(), Algebra::free(2).kind(), Algebra::dual_num().kind()]
}

fn random_der<R: Rng>(rng: &mut R, kind: BackendKind) -> DerElement {
    let comps = (0..kind.num_gens()).map(|_| sample::poly(rng, kind, 2, 3)).collect();
    DerElement::new(kind, comps).unwrap()
}

#[test]
fn worked_products() {
    let alg = Algebra::free_poly(&["x"]).unwrap();
    let p = &alg.parse_poly("1 + x").unwrap() * &alg.parse_poly("1 - x").unwrap();
    assert_eq!(p, alg.parse_poly("1 - x^2").unwrap());
    let dual = Algebra::dual_num();
    let eps = dual.gen(0);
    assert!((&eps * &eps).is_zero());
    assert_eq!(&p + &alg.zero(), p);
}

#[test]
fn worked_derivations() {
    let alg = Algebra::free_poly(&["x", "y"]).unwrap();
    let k = alg.kind();
    let dx = DerElement::basis(k, 0);
    assert_eq!(dx.apply(&alg.parse_poly("x^2*y").unwrap()).unwrap(), alg.parse_poly("2*x*y").unwrap());
    assert!(dx.apply(&alg.one()).unwrap().is_zero());
    assert!(dx.commutator(&DerElement::basis(k, 1)).unwrap().is_zero());

    let dual = Algebra::dual_num();
    let eps_d = DerElement::basis(dual.kind(), 0);
    assert_eq!(eps_d.apply(&dual.gen(0)).unwrap(), dual.gen(0));
}

#[test]
fn commutator_of_euler_and_dx() {
    // [x d_x, d_x] evaluated by hand on x and x^2: (x d_x d_x - d_x x d_x)
    let alg = Algebra::free_poly(&["x"]).unwrap();
    let k = alg.kind();
    let x = alg.gen(0);
    let euler = DerElement::new(k, vec![x.clone()]).unwrap();
    let dx = DerElement::basis(k, 0);
    let c = euler.commutator(&dx).unwrap();
    for f in [x.clone(), &x * &x] {
        let by_hand = &euler.apply(&dx.apply(&f).unwrap()).unwrap() - &dx.apply(&euler.apply(&f).unwrap()).unwrap();
        assert_eq!(c.apply(&f).unwrap(), by_hand);
    }
    assert_eq!(c, DerElement::basis(k, 0).scale(&Poly::from_int(k, -1)).unwrap());
}

#[test]
fn dual_derivations_are_rational_multiples_of_eps_d() {
    let dual = Algebra::dual_num();
    let k = dual.kind();
    let eps = dual.gen(0);
    // eps * (eps d) = 0 in the module of derivations
    let d = DerElement::new(k, vec![&Poly::from_int(k, 3) + &eps]).unwrap();
    assert_eq!(d, DerElement::new(k, vec![Poly::from_int(k, 3)]).unwrap());
    assert!(DerElement::basis(k, 0).scale(&eps).unwrap().is_zero());
}

#[test]
fn sym_square_of_derivations_vanishes_over_dual_numbers() {
    let dual = Algebra::dual_num();
    let k = dual.kind();
    let eps = dual.gen(0);
    let d = DerElement::basis(k, 0);
    assert!(SymMultiDerivation::from_sym_product(&[d.clone(), d]).unwrap().is_zero());
    let p = SymMultiDerivation::new(k, 2, vec![(vec![0, 0], eps.clone())]).unwrap();
    assert_eq!(p.eval(&[eps.clone(), eps.clone()]).unwrap(), eps);
    assert!(p.eval(&[dual.one(), eps.clone()]).unwrap().is_zero());
    assert!(p.eval(&[eps.clone(), &eps * &eps]).unwrap().is_zero());
}

#[test]
fn asymmetric_tables_are_rejected() {
    let alg = Algebra::free(2);
    let k = alg.kind();
    let r = SymMultiDerivation::new(k, 2, vec![(vec![0, 1], Poly::one(k)), (vec![1, 0], Poly::from_int(k, 2))]);
    assert!(r.is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn ring_axioms(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        for kind in backends() {
            let [a, b, c] = [0; 3].map(|_| sample::poly(&mut rng, kind, 3, 4));
            prop_assert!((&a - &a).is_zero());
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a * &Poly::one(kind), a.clone());
        }
    }

    #[test]
    fn leibniz(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        for kind in backends() {
            let d = random_der(&mut rng, kind);
            let a = sample::poly(&mut rng, kind, 3, 4);
            let b = sample::poly(&mut rng, kind, 3, 4);
            let lhs = d.apply(&(&a * &b)).unwrap();
            let rhs = &(&d.apply(&a).unwrap() * &b) + &(&a * &d.apply(&b).unwrap());
            prop_assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn commutator_jacobi_and_antisymmetry(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        for kind in backends() {
            let [d, e, f] = [0; 3].map(|_| random_der(&mut rng, kind));
            let br = |x: &DerElement, y: &DerElement| x.commutator(y).unwrap();
            let jac = br(&d, &br(&e, &f)).add(&br(&e, &br(&f, &d))).unwrap().add(&br(&f, &br(&d, &e))).unwrap();
            prop_assert!(jac.is_zero());
            prop_assert!(br(&d, &e).add(&br(&e, &d)).unwrap().is_zero());
            prop_assert!(br(&d, &d).is_zero());
        }
    }

    #[test]
    fn multiderivations_are_symmetric_and_leibniz(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let kind = Algebra::free(2).kind();
        let entries = [vec![0, 0], vec![0, 1], vec![1, 1]].into_iter().map(|k| (k, sample::poly(&mut rng, kind, 1, 2))).collect();
        let p = SymMultiDerivation::new(kind, 2, entries).unwrap();
        let [a, b, c] = [0; 3].map(|_| sample::poly(&mut rng, kind, 2, 3));
        prop_assert_eq!(p.eval(&[a.clone(), c.clone()]).unwrap(), p.eval(&[c.clone(), a.clone()]).unwrap());
        let lhs = p.eval(&[&a * &b, c.clone()]).unwrap();
        let rhs = &(&a * &p.eval(&[b.clone(), c.clone()]).unwrap()) + &(&b * &p.eval(&[a.clone(), c.clone()]).unwrap());
        prop_assert_eq!(lhs, rhs);
        prop_assert!(p.eval(&[Poly::constant(kind, Rational::new(2, 3)), c]).unwrap().is_zero());
    }
}
