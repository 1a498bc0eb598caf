mod common;

use std::sync::OnceLock;

use courant_cas::courant::{identity_gram, make_quadratic_lie, make_standard_courant, so3_constants, CourantStructure};
use courant_cas::deform::{
    block, cohomology_dims, differential, differential_c, internal_degrees, mc_extend, mc_obstruction, mc_residual, mc_solve_next,
    theta_degree, trivial_deformation, validate_series, DeformationSeries,
};
use courant_cas::rothstein::RothsteinAlgebra;
use courant_cas::symbol_map::{apply_j, counterexample_sder};
use courant_cas::{sample, Error};
use proptest::prelude::*;
use rand::Rng;

fn structures() -> &'static [CourantStructure] {
    static CELL: OnceLock<Vec<CourantStructure>> = OnceLock::new();
    CELL.get_or_init(|| {
        vec![
            make_standard_courant(1).unwrap(),
            make_standard_courant(2).unwrap(),
            make_quadratic_lie(&so3_constants(), identity_gram(3)).unwrap(),
        ]
    })
}

#[test]
fn so3_cohomology_is_that_of_the_three_sphere() {
    let cs = &structures()[2];
    let dims: Vec<usize> = cohomology_dims(cs, 0..=3, 0..=0).unwrap().iter().map(|r| r.dim).collect();
    assert_eq!(dims, vec![1, 0, 0, 1]);
}

#[test]
fn standard_structure_is_acyclic_in_degree_zero_above_r_zero() {
    for cs in &structures()[..2] {
        let recs = cohomology_dims(cs, 0..=4, 0..=0).unwrap();
        let dims: Vec<usize> = recs.iter().map(|r| r.dim).collect();
        assert_eq!(dims, vec![1, 0, 0, 0, 0]);
        for r in &recs {
            assert_eq!(r.dim, r.chain_dim - r.rank_out - r.rank_in);
        }
    }
}

#[test]
fn blocks_compose_to_zero() {
    let cs = &structures()[1];
    for d in -2..=2 {
        for r in 0..4 {
            assert!(block(cs, r, d).unwrap().composes_to_zero(&block(cs, r + 1, d).unwrap()));
        }
    }
}

#[test]
fn grading_requires_polynomial_coefficients() {
    let (ra, _) = counterexample_sder().unwrap();
    let m = ra.module();
    // theta = 0 is a (trivial) Courant structure over the dual numbers
    let cs = CourantStructure::from_theta(RothsteinAlgebra::with_default_connection(m.clone()).unwrap(), ra.zero()).unwrap();
    assert!(matches!(theta_degree(&cs), Err(Error::Unsupported(_))));
}

#[test]
fn series_violating_the_relation_are_rejected() {
    let cs = &structures()[0];
    let ra = cs.rothstein();
    let x = ra.module().algebra().gen(0);
    let bad = ra.d(0).wedge(&ra.e(0)).scale(&x);
    assert!(!differential(cs, &bad).unwrap().is_zero());
    let s = DeformationSeries { terms: vec![bad] };
    assert!(matches!(validate_series(cs, &s), Err(Error::InvalidSeries(1))));
    assert!(matches!(mc_obstruction(cs, &s), Err(Error::InvalidSeries(1))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn differential_squares_to_zero_and_matches_the_bracket_side(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let cs = &structures()[(seed % 3) as usize];
        let ra = cs.rothstein();
        let r = rng.gen_range(0..=3usize);
        let phi = sample::roth_element(&mut rng, ra, r, 2, 3);
        let dphi = differential(cs, &phi).unwrap();
        prop_assert!(differential(cs, &dphi).unwrap().is_zero());
        let jphi = apply_j(ra, &phi, r).unwrap();
        prop_assert_eq!(apply_j(ra, &dphi, r + 1).unwrap(), differential_c(cs, &jphi).unwrap());
    }

    #[test]
    fn differential_preserves_the_internal_grading(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let cs = &structures()[(seed % 2) as usize];
        let h = theta_degree(cs).unwrap();
        let ra = cs.rothstein();
        let r = rng.gen_range(0..=4usize);
        let phi = sample::roth_element(&mut rng, ra, r, 2, 1);
        let ds = internal_degrees(cs, &phi);
        prop_assume!(ds.len() == 1);
        let out = internal_degrees(cs, &differential(cs, &phi).unwrap());
        prop_assert!(out.iter().all(|&d| d == ds[0] + h));
    }

    #[test]
    fn trivial_deformations_extend(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let cs = &structures()[if seed % 2 == 0 { 0 } else { 2 }];
        let ra = cs.rothstein();
        let xi = sample::roth_element(&mut rng, ra, 2, 1, 2);
        let k = rng.gen_range(1..=3usize);
        let full = trivial_deformation(cs, &xi, k + 1).unwrap();
        let s = DeformationSeries { terms: full.terms[..k].to_vec() };
        for j in 1..=k {
            prop_assert!(mc_residual(cs, &s, j).unwrap().is_zero());
        }
        let (obs, cocycle) = mc_obstruction(cs, &s).unwrap();
        prop_assert!(cocycle);
        prop_assert!(differential(cs, &obs).unwrap().is_zero());
        prop_assert!(mc_extend(cs, &s, &full.terms[k]).unwrap());
        if theta_degree(cs).is_ok() {
            let next = mc_solve_next(cs, &s).unwrap();
            prop_assert!(next.is_some());
            prop_assert!(mc_extend(cs, &s, &next.unwrap()).unwrap());
        }
    }
}
