mod common;

use courant_cas::courant::{
    derived_bracket, identity_gram, make_quadratic_lie, make_standard_courant, so3_constants, verify_courant, verify_morphism,
    CourantStructure,
};
use courant_cas::der::DerElement;
use courant_cas::iso::{AlgebraIso, ModuleIso};
use courant_cas::module::ModuleElement;
use courant_cas::symbol_map::apply_j;
use courant_cas::{sample, Error, Rational};
use std::sync::OnceLock;

use proptest::prelude::*;
use rand::Rng;

#[test]
fn standard_anchor_is_the_vector_field_part() {
    let cs = make_standard_courant(2).unwrap();
    let m = cs.module();
    let alg = m.algebra();
    let x = alg.gen(0);
    let u = m.element(vec![x.clone(), alg.one(), alg.gen(1), alg.zero()]).unwrap();
    assert_eq!(cs.anchor(&u).unwrap(), DerElement::new(m.kind(), vec![x, alg.one()]).unwrap());
}

#[test]
fn derived_bracket_reproduces_the_value_table() {
    for cs in [make_standard_courant(1).unwrap(), make_standard_courant(2).unwrap(), so3()] {
        let m = cs.module();
        for a in 0..m.rank() {
            for b in 0..m.rank() {
                let (x, y) = (m.basis(a), m.basis(b));
                let v = derived_bracket(&cs, &x, &y).unwrap();
                assert_eq!(v, cs.m().value(m, &[a, b]));
                assert_eq!(v, cs.bracket(&x, &y).unwrap());
            }
        }
    }
}

#[test]
fn coordinate_swap_is_a_morphism_of_the_standard_structure() {
    let cs = make_standard_courant(2).unwrap();
    let m = cs.module();
    let g = AlgebraIso::permutation(vec![1, 0]).unwrap();
    let images = [1, 0, 3, 2].map(|a| m.basis(a)).to_vec();
    let psi = ModuleIso::new(g, m, m, images).unwrap();
    assert!(verify_morphism(&cs, &cs, &psi).unwrap().ok());
    // swapping only the module basis breaks the anchor
    let bad = ModuleIso::new(AlgebraIso::identity(2), m, m, [1, 0, 3, 2].map(|a| m.basis(a)).to_vec()).unwrap();
    assert!(!verify_morphism(&cs, &cs, &bad).unwrap().anchor_preserved);
}

#[test]
fn non_invariant_pairings_are_rejected() {
    let mut gram = identity_gram(3);
    gram[2][2] = Rational::from_int(2);
    assert!(matches!(make_quadratic_lie(&so3_constants(), gram), Err(Error::NotCourant(_))));
}

fn so3() -> CourantStructure {
    make_quadratic_lie(&so3_constants(), identity_gram(3)).unwrap()
}

/// Standard structures for n = 1, 2, built once per test binary.
fn standard(n: usize) -> &'static CourantStructure {
    static CELLS: [OnceLock<CourantStructure>; 2] = [OnceLock::new(), OnceLock::new()];
    CELLS[n - 1].get_or_init(|| make_standard_courant(n).unwrap())
}

fn section<R: Rng>(rng: &mut R, cs: &CourantStructure) -> ModuleElement {
    sample::module_element(rng, cs.module(), 2)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn derived_bracket_is_dorfman(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let n = 1 + (seed % 2) as usize;
        let cs = standard(n);
        let (u, v) = (section(&mut rng, cs), section(&mut rng, cs));
        let got = derived_bracket(cs, &u, &v).unwrap();
        let want = common::dorfman(n, &u, &v);
        prop_assert_eq!(got.coeffs(), want.as_slice());
    }

    #[test]
    fn leibniz_in_the_second_argument(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let cs = standard(2);
        let (x, y) = (section(&mut rng, cs), section(&mut rng, cs));
        let f = sample::poly(&mut rng, cs.module().kind(), 2, 3);
        let lhs = cs.bracket(&x, &y.scale(&f)).unwrap();
        let rhs = cs.bracket(&x, &y).unwrap().scale(&f).add(&y.scale(&cs.anchor(&x).unwrap().apply(&f).unwrap()));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn verification_routes_agree_on_perturbed_structures(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let so3 = so3();
        let cs = if seed % 2 == 0 { standard(1) } else { &so3 };
        let ra = cs.rothstein();
        let bump = sample::roth_element(&mut rng, ra, 3, 1, 1);
        let theta = cs.theta().add(&bump);
        let m = apply_j(ra, &theta, 3).unwrap();
        let rep = verify_courant(ra.module(), &m, None).unwrap();
        prop_assert!(rep.routes_agree(), "{:?}", rep);
        prop_assert_eq!(rep.ok, CourantStructure::from_theta(ra.clone(), theta).is_ok());
    }
}
