mod common;

use courant_cas::cmap::{bracket, from_form, pushforward, symbol_tower, to_form, verify, wedge, CMapElement, WedgeMode};
use courant_cas::courant::{identity_gram, make_quadratic_lie, so3_constants};
use courant_cas::der::DerElement;
use courant_cas::iso::{AlgebraIso, ModuleIso};
use courant_cas::module::{MetricModule, ModuleElement};
use courant_cas::poly::{Algebra, Poly};
use courant_cas::rothstein::{RothElement, RothsteinAlgebra};
use courant_cas::symbol_map::apply_j;
use courant_cas::{sample, Rational};
use proptest::prelude::*;
use rand::Rng;

fn same(a: &CMapElement, b: &CMapElement) -> bool {
    a == b || (a.is_zero() && b.is_zero())
}

fn sign(r: usize, s: usize) -> Rational {
    Rational::from_int(if (r * s) % 2 == 0 { 1 } else { -1 })
}

/// A random module with random valid elements of degrees 0..=4.
struct Family {
    ra: RothsteinAlgebra,
    bases: Vec<Vec<CMapElement>>,
}

impl Family {
    fn new(seed: u64) -> Self {
        let mut rng = common::rng(seed);
        let nv = 1 + (seed % 2) as usize;
        let rank = 2 + (seed / 2 % 2) as usize;
        let ra = sample::rothstein_algebra(&mut rng, nv, rank, 1).unwrap();
        let bases = (0..=4).map(|r| common::valid_c_basis(ra.module(), r, 1)).collect();
        Family { ra, bases }
    }

    fn m(&self) -> &MetricModule {
        self.ra.module()
    }

    fn element<R: Rng>(&self, rng: &mut R, r: usize) -> CMapElement {
        common::random_combination(rng, self.m(), r, &self.bases[r], 3)
    }
}

fn general_args<R: Rng>(rng: &mut R, m: &MetricModule, n: usize) -> Vec<ModuleElement> {
    (0..n).map(|_| sample::module_element(rng, m, 1)).collect()
}

#[test]
fn so3_signed_permutation_pushforward() {
    let cs = make_quadratic_lie(&so3_constants(), identity_gram(3)).unwrap();
    let m = cs.module();
    let k = m.kind();
    // e1 -> e2, e2 -> e1, e3 -> -e3 is an isometry and an automorphism of the cross product
    let images = vec![m.basis(1), m.basis(0), m.basis(2).scale(&Poly::from_int(k, -1))];
    let iso = ModuleIso::new(AlgebraIso::identity(0), m, m, images).unwrap();
    assert_eq!(pushforward(m, cs.m(), &iso, m).unwrap(), *cs.m());
    let inner = cs.m().insert(m, &m.basis(0)).unwrap();
    let pushed = pushforward(m, &inner, &iso, m).unwrap();
    assert_eq!(pushed, cs.m().insert(m, &m.basis(1)).unwrap());
}

#[test]
fn dual_number_towers_verify() {
    let dual = Algebra::dual_num();
    let k = dual.kind();
    let eps = dual.gen(0);
    let m = MetricModule::with_gram(dual, vec![vec![Poly::one(k), eps.clone()], vec![eps, Poly::one(k)]]).unwrap();
    for r in 0..=4 {
        for c in common::valid_c_basis(&m, r, 1) {
            assert!(verify(&m, &c, None).unwrap().ok);
            assert!(symbol_tower(&m, &c).is_ok());
        }
    }
}

#[test]
fn perturbed_symbols_fail_verification() {
    let fam = Family::new(11);
    let m = fam.m();
    let k = m.kind();
    let mut rng = common::rng(12);
    for _ in 0..10 {
        let c = fam.element(&mut rng, 3);
        let rebuilt = CMapElement::from_tables(m, 3, |a| c.value(m, a), |a| c.symbol(m, a).unwrap()).unwrap();
        assert_eq!(rebuilt, c);
        let bump = DerElement::new(k, (0..k.num_gens()).map(|_| sample::nonzero_poly(&mut rng, k, 1, 2)).collect()).unwrap();
        let at = rng.gen_range(0..m.rank());
        let other = CMapElement::from_tables(m, 3, |a| c.value(m, a), |a| {
            let s = c.symbol(m, a).unwrap();
            if a[0] == at { s.add(&bump).unwrap() } else { s }
        })
        .unwrap();
        assert!(!verify(m, &other, None).unwrap().ok);
    }
}

#[test]
fn broken_forms_are_rejected() {
    let fam = Family::new(13);
    let m = fam.m();
    let mut rng = common::rng(14);
    let c = fam.element(&mut rng, 3);
    let mut entries: Vec<_> = c.entries().map(|(k, v)| (k.gens.clone(), k.args.clone(), v.clone())).collect();
    let bump = Poly::one(m.kind());
    match entries.iter_mut().find(|e| e.0.is_empty()) {
        Some(e) => e.2 = &e.2 + &bump,
        None => entries.push((vec![], vec![0, 0, 0], bump)),
    }
    let broken = CMapElement::from_entries(m, 3, entries).unwrap();
    assert!(from_form(m, &to_form(&broken)).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn jacobi_and_leibniz(seed in any::<u64>()) {
        let fam = Family::new(seed % 4);
        let m = fam.m();
        let mut rng = common::rng(seed);
        let (r, s, t) = (rng.gen_range(0..=3usize), rng.gen_range(0..=3usize), rng.gen_range(0..=3usize));
        let (a, b, c) = (fam.element(&mut rng, r), fam.element(&mut rng, s), fam.element(&mut rng, t));
        let br = |x: &CMapElement, y: &CMapElement| bracket(m, x, y).unwrap();
        let lhs = br(&a, &br(&b, &c));
        let rhs = br(&br(&a, &b), &c).add(&br(&b, &br(&a, &c)).scale_q(&sign(r, s)));
        prop_assert!(same(&lhs, &rhs));
        let w = |x: &CMapElement, y: &CMapElement| wedge(m, x, y, WedgeMode::Recursive).unwrap();
        if r + s >= 2 && r + t >= 2 {
            let lhs = br(&a, &w(&b, &c));
            let rhs = w(&br(&a, &b), &c).add(&w(&b, &br(&a, &c)).scale_q(&sign(r, s)));
            prop_assert!(same(&lhs, &rhs));
        }
    }

    #[test]
    fn wedge_is_graded_commutative_and_associative(seed in any::<u64>()) {
        let fam = Family::new(seed % 4);
        let m = fam.m();
        let mut rng = common::rng(seed);
        let (r, s, t) = (rng.gen_range(0..=2usize), rng.gen_range(0..=2usize), rng.gen_range(0..=2usize));
        let (a, b, c) = (fam.element(&mut rng, r), fam.element(&mut rng, s), fam.element(&mut rng, t));
        let w = |x: &CMapElement, y: &CMapElement| wedge(m, x, y, WedgeMode::Shuffle).unwrap();
        prop_assert_eq!(w(&a, &b), w(&b, &a).scale_q(&sign(r, s)));
        prop_assert_eq!(w(&w(&a, &b), &c), w(&a, &w(&b, &c)));
        prop_assert_eq!(w(&a, &b), wedge(m, &a, &b, WedgeMode::Recursive).unwrap());
    }

    #[test]
    fn bracket_matches_insertion_oracle(seed in any::<u64>()) {
        let fam = Family::new(seed % 4);
        let m = fam.m();
        let mut rng = common::rng(seed);
        let (r, s) = (rng.gen_range(1..=4usize), rng.gen_range(1..=3usize));
        let (a, b) = (fam.element(&mut rng, r), fam.element(&mut rng, s));
        let v = bracket(m, &a, &b).unwrap();
        let xs = general_args(&mut rng, m, r + s - 2);
        prop_assert_eq!(v.eval_form(m, &[], &xs).unwrap(), common::bracket_by_insertion(m, &a, &b, &xs));
    }

    #[test]
    fn evaluation_matches_nested_rothstein_brackets(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let ra = sample::rothstein_algebra(&mut rng, 2, 3, 1).unwrap();
        let m = ra.module();
        let r = rng.gen_range(1..=4usize);
        let phi = sample::roth_element(&mut rng, &ra, r, 1, 3);
        let c = apply_j(&ra, &phi, r).unwrap();
        let xs = general_args(&mut rng, m, r);
        let letters: Vec<RothElement> = xs.iter().map(RothElement::vector).collect();
        let nested = ra.nested(&phi, &letters).unwrap();
        prop_assert_eq!(ra.scalar(c.eval_form(m, &[], &xs).unwrap()), nested);
    }

    #[test]
    fn forms_and_evaluators_round_trip(seed in any::<u64>()) {
        let fam = Family::new(seed % 4);
        let m = fam.m();
        let mut rng = common::rng(seed);
        let r = rng.gen_range(2..=4usize);
        let c = fam.element(&mut rng, r);
        prop_assert_eq!(from_form(m, &to_form(&c)).unwrap(), c.clone());
        let rebuilt = CMapElement::from_evaluator(m, r, |xs| c.eval(m, xs).unwrap()).unwrap();
        prop_assert_eq!(rebuilt, c);
    }

    #[test]
    fn symbol_is_linear_in_the_last_argument(seed in any::<u64>()) {
        let fam = Family::new(seed % 4);
        let m = fam.m();
        let mut rng = common::rng(seed);
        let r = rng.gen_range(3..=4usize);
        let c = fam.element(&mut rng, r);
        let g = rng.gen_range(0..m.algebra().num_gens());
        let mut xs = general_args(&mut rng, m, r - 2);
        let f = sample::poly(&mut rng, m.kind(), 2, 2);
        let base = c.eval_form(m, &[g], &xs).unwrap();
        let last = xs.pop().unwrap().scale(&f);
        xs.push(last);
        prop_assert_eq!(c.eval_form(m, &[g], &xs).unwrap(), &f * &base);
    }

    #[test]
    fn pushforward_preserves_brackets(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let fam = Family::new(2 * (seed % 2) + 1);
        let m = fam.m();
        let g = AlgebraIso::permutation(vec![1, 0]).unwrap();
        let gram = (0..m.rank()).map(|a| (0..m.rank()).map(|b| g.apply(m.gram(a, b))).collect()).collect();
        let target = MetricModule::with_gram(m.algebra().clone(), gram).unwrap();
        let iso = ModuleIso::new(g, m, &target, (0..m.rank()).map(|a| target.basis(a)).collect()).unwrap();
        let (r, s) = (rng.gen_range(1..=3usize), rng.gen_range(1..=3usize));
        let (a, b) = (fam.element(&mut rng, r), fam.element(&mut rng, s));
        let push = |x: &CMapElement| pushforward(m, x, &iso, &target).unwrap();
        prop_assert!(verify(&target, &push(&a), None).unwrap().ok);
        prop_assert!(same(&push(&bracket(m, &a, &b).unwrap()), &bracket(&target, &push(&a), &push(&b)).unwrap()));
    }
}
