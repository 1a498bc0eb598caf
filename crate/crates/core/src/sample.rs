//! Seeded random generators for property checks.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::Result;
use crate::module::{Connection, MetricModule, ModuleElement};
use crate::poly::{Algebra, BackendKind, Mono, Poly};
use crate::rothstein::{RothElement, RothsteinAlgebra};
use crate::scalar::Rational;

/// Polynomial with at most `max_terms` monomials of degree `<= max_deg`
/// and integer coefficients in `[-3, 3]`.
pub fn poly<R: Rng>(rng: &mut R, kind: BackendKind, max_deg: u32, max_terms: usize) -> Poly {
    let n = kind.num_gens();
    let mut out = Poly::zero(kind);
    let nterms = rng.gen_range(0..=max_terms);
    for _ in 0..nterms {
        let mut e = vec![0u32; n];
        let deg = if n == 0 { 0 } else { rng.gen_range(0..=max_deg) };
        for _ in 0..deg {
            e[rng.gen_range(0..n)] += 1;
        }
        let c = rng.gen_range(-3i64..=3);
        out = &out + &Poly::monomial(kind, Mono(e.into_iter().collect()), Rational::from_int(c));
    }
    out
}

pub fn nonzero_poly<R: Rng>(rng: &mut R, kind: BackendKind, max_deg: u32, max_terms: usize) -> Poly {
    loop {
        let p = poly(rng, kind, max_deg, max_terms.max(1));
        if !p.is_zero() {
            return p;
        }
    }
}

pub fn module_element<R: Rng>(rng: &mut R, m: &MetricModule, max_deg: u32) -> ModuleElement {
    let coeffs = (0..m.rank()).map(|_| poly(rng, m.kind(), max_deg, 2)).collect();
    m.element(coeffs).expect("rank matches")
}

/// Gram matrix `U^T G0 U` with `G0` a constant split form and `U`
/// unipotent upper triangular with polynomial entries of degree `<= deg`.
pub fn unimodular_gram<R: Rng>(rng: &mut R, alg: &Algebra, rank: usize, deg: u32) -> Vec<Vec<Poly>> {
    let k = alg.kind();
    let mut g0 = vec![vec![Poly::zero(k); rank]; rank];
    let mut a = 0;
    while a < rank {
        if a + 1 < rank && rng.gen_bool(0.5) {
            g0[a][a + 1] = Poly::one(k);
            g0[a + 1][a] = Poly::one(k);
            a += 2;
        } else {
            g0[a][a] = Poly::from_int(k, if rng.gen_bool(0.5) { 1 } else { 2 });
            a += 1;
        }
    }
    let mut u = vec![vec![Poly::zero(k); rank]; rank];
    for (i, row) in u.iter_mut().enumerate() {
        row[i] = Poly::one(k);
        for x in row.iter_mut().skip(i + 1) {
            if rng.gen_bool(0.4) {
                *x = poly(rng, k, deg, 1);
            }
        }
    }
    let mut g = vec![vec![Poly::zero(k); rank]; rank];
    for i in 0..rank {
        for j in 0..rank {
            let mut acc = Poly::zero(k);
            for p in 0..rank {
                for q in 0..rank {
                    if !u[p][i].is_zero() && !g0[p][q].is_zero() && !u[q][j].is_zero() {
                        acc = &acc + &(&(&u[p][i] * &g0[p][q]) * &u[q][j]);
                    }
                }
            }
            g[i][j] = acc;
        }
    }
    g
}

/// Metrization of a random Christoffel table with coefficients of degree `<= deg`.
pub fn metric_connection<R: Rng>(rng: &mut R, m: &MetricModule, deg: u32) -> Connection {
    let gamma = (0..m.der_rank())
        .map(|_| {
            (0..m.rank())
                .map(|_| {
                    let x = module_element(rng, m, deg);
                    if m.kind().is_dual() {
                        x.scale(&Poly::var(m.kind(), 0))
                    } else {
                        x
                    }
                })
                .collect()
        })
        .collect();
    Connection::new(m, gamma).expect("valid table").metrize(m)
}

/// Random metric module with a random metric connection.
pub fn rothstein_algebra<R: Rng>(rng: &mut R, nvars: usize, rank: usize, deg: u32) -> Result<RothsteinAlgebra> {
    let alg = Algebra::free(nvars);
    let gram = unimodular_gram(rng, &alg, rank, deg);
    let m = MetricModule::with_gram(alg, gram)?;
    let c = metric_connection(rng, &m, deg);
    RothsteinAlgebra::new(m, c)
}

/// Homogeneous element of degree `r` with up to `nterms` terms.
pub fn roth_element<R: Rng>(rng: &mut R, ra: &RothsteinAlgebra, r: usize, coeff_deg: u32, nterms: usize) -> RothElement {
    let kind = ra.kind();
    let rank = ra.rank();
    let nd = ra.module().der_rank();
    let mut out = ra.zero();
    let shapes: Vec<usize> = (0..=r / 2).filter(|p| r - 2 * p <= rank && (*p == 0 || nd > 0)).collect();
    if shapes.is_empty() {
        return out;
    }
    for _ in 0..nterms {
        let p = *shapes.choose(rng).expect("nonempty");
        let k = r - 2 * p;
        let sym: Vec<usize> = (0..p).map(|_| rng.gen_range(0..nd)).collect();
        let mut idx: Vec<usize> = (0..rank).collect();
        idx.shuffle(rng);
        let ext = idx[..k].to_vec();
        let c = nonzero_poly(rng, kind, coeff_deg, 2);
        out = out.add(&RothElement::from_terms(kind, rank, [(sym, ext, c)]).expect("valid indices"));
    }
    out
}
