//! The Poisson monomorphism `J` from the Rothstein algebra into `C(E)`,
//! its inverse in degree 3, and membership in its image.

use std::collections::BTreeMap;

use crate::cmap::{self, canonical_keys, CMapElement, TowerKey};
use crate::der::{sorted_tuples, SymMultiDerivation};
use crate::module::{Connection, MetricModule};
use crate::error::{Error, Result};
use crate::linalg::{solve_columns, Solve, SparseVec};
use crate::poly::{Algebra, Mono, Poly};
use crate::rothstein::{RothElement, RothsteinAlgebra};
use crate::scalar::Rational;

/// `J(phi)` for `phi` homogeneous of degree `r`: every tower entry is the
/// nested Rothstein bracket of `phi` with the corresponding generators and
/// basis vectors.
pub fn apply_j(ra: &RothsteinAlgebra, phi: &RothElement, r: usize) -> Result<CMapElement> {
    ra.check(phi)?;
    if !phi.is_homogeneous_of(r) {
        return Err(Error::Degree(format!("element is not homogeneous of degree {r}")));
    }
    let m = ra.module();
    let ngens = m.algebra().num_gens();
    let mut entries = Vec::new();
    if phi.is_zero() {
        return Ok(CMapElement::zero(m, r));
    }
    for p in 0..=r / 2 {
        for gens in sorted_tuples(ngens, p) {
            let letters: Vec<RothElement> = gens.iter().map(|&g| ra.gen(g)).collect();
            let head = ra.nested(phi, &letters)?;
            if head.is_zero() {
                continue;
            }
            let mut args = Vec::new();
            fill_args(ra, &head, r - 2 * p, &gens, &mut args, &mut entries)?;
        }
    }
    CMapElement::from_entries(m, r, entries)
}

fn fill_args(
    ra: &RothsteinAlgebra,
    cur: &RothElement,
    left: usize,
    gens: &[usize],
    args: &mut Vec<usize>,
    out: &mut Vec<(Vec<usize>, Vec<usize>, Poly)>,
) -> Result<()> {
    if left == 0 {
        let v = cur.coeff(&[], &[]);
        if !v.is_zero() {
            out.push((gens.to_vec(), args.clone(), v));
        }
        return Ok(());
    }
    for a in 0..ra.rank() {
        let next = ra.bracket(cur, &ra.e(a))?;
        if next.is_zero() {
            continue;
        }
        args.push(a);
        fill_args(ra, &next, left - 1, gens, args, out)?;
        args.pop();
    }
    Ok(())
}

/// A Rothstein element together with its image.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct JImage {
    pub source: RothElement,
    pub target: CMapElement,
}

impl JImage {
    pub fn new(ra: &RothsteinAlgebra, source: RothElement, r: usize) -> Result<Self> {
        let target = apply_j(ra, &source, r)?;
        Ok(JImage { source, target })
    }
}

/// Preimage of a degree-3 element: `phi_1 = -D_g ^ u_g` carries the
/// symbol, and the remainder `T = C - J(phi_1)` is an antisymmetric
/// `A`-trilinear form that lifts to `Lambda^3 E`.
pub fn invert_j_deg3(ra: &RothsteinAlgebra, c: &CMapElement) -> Result<RothElement> {
    let m = ra.module();
    c.check(m)?;
    if c.degree() != 3 {
        return Err(Error::Degree(format!("expected degree 3, got {}", c.degree())));
    }
    let report = cmap::verify(m, c, None)?;
    if !report.ok {
        return Err(Error::InvalidElement(report.violation.unwrap_or_default()));
    }
    let kind = m.kind();
    let mut phi1 = ra.zero();
    for g in 0..m.algebra().num_gens() {
        let mut u = c.d_map(m, &[], g);
        if kind.is_dual() {
            // d_C(eps) lies in eps E; only its eps-coefficient matters
            u = u.map_coeffs(|f| f.gen_derivative(0));
        }
        phi1 = phi1.sub(&ra.d(g).wedge(&RothElement::vector(&u)));
    }
    let t = c.sub(&apply_j(ra, &phi1, 3)?);
    let dual: Vec<_> = (0..m.rank()).map(|a| m.dual_basis(a)).collect();
    let mut terms = Vec::new();
    for a in 0..m.rank() {
        for b in 0..m.rank() {
            for d in 0..m.rank() {
                let v = t.eval_form(m, &[], &[dual[d].clone(), dual[b].clone(), dual[a].clone()])?;
                let mut args = [a, b, d];
                let w = t.eval_form(m, &[], &[dual[b].clone(), dual[d].clone(), dual[a].clone()])?;
                if w != -&v || (a == b || b == d || a == d) && !v.is_zero() {
                    return Err(Error::InvalidElement("the remainder form is not antisymmetric".into()));
                }
                args.sort_unstable();
                if a < b && b < d {
                    terms.push((vec![], vec![a, b, d], v));
                }
            }
        }
    }
    let theta = RothElement::from_terms(kind, m.rank(), terms)?;
    let out = theta.add(&phi1);
    if apply_j(ra, &out, 3)? != *c {
        return Err(Error::InvalidElement("reconstructed preimage does not map back".into()));
    }
    Ok(out)
}

/// A coordinate of a tower table: entry key and coefficient monomial.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct Coordinate {
    pub key: TowerKey,
    pub mono: Mono,
}

/// Evidence that an element is outside the image of `J` within the truncation.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Certificate {
    /// Coefficient-degree cap of the truncation.
    pub cap: u32,
    /// A linear functional on table coordinates vanishing on the image but not on the input.
    pub residual: Vec<(Coordinate, Rational)>,
    /// Value of the functional on the input.
    pub value: Rational,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Membership {
    Member(RothElement),
    NonMember(Certificate),
}

/// Rothstein basis monomials of degree `r` with coefficient degree at most `cap`.
fn roth_basis(ra: &RothsteinAlgebra, r: usize, cap: u32) -> Vec<RothElement> {
    let m = ra.module();
    let kind = m.kind();
    let nder = m.der_rank();
    let monos = m.algebra().monomials_up_to(cap);
    let mut out = Vec::new();
    for p in 0..=r / 2 {
        let k = r - 2 * p;
        for sym in sorted_tuples(nder, p) {
            for ext in crate::der::sorted_tuples(m.rank(), k).into_iter().filter(|e| e.windows(2).all(|w| w[0] < w[1])) {
                for mono in &monos {
                    let t = RothElement::from_terms(kind, m.rank(), [(sym.clone(), ext.clone(), mono.clone())]).expect("valid term");
                    if !t.is_zero() && !out.contains(&t) {
                        out.push(t);
                    }
                }
            }
        }
    }
    out
}

fn coordinates(c: &CMapElement, index: &mut BTreeMap<Coordinate, usize>) -> SparseVec {
    let mut v = SparseVec::new();
    for (k, p) in c.entries() {
        for (mono, q) in p.terms() {
            let coord = Coordinate { key: k.clone(), mono: mono.clone() };
            let n = index.len();
            let i = *index.entry(coord).or_insert(n);
            v.insert(i, q.clone());
        }
    }
    v
}

/// Decides whether `c` lies in the image of `J` by an exact linear solve
/// over the rationals. Over the dual numbers the answer is conclusive; over
/// polynomial rings a failure within the coefficient cap is reported as
/// inconclusive. Without an explicit cap the polynomial case widens the
/// truncation step by step, up to the degree growth the connection and the
/// inverse gram can cause.
pub fn chat_membership(ra: &RothsteinAlgebra, c: &CMapElement, cap: Option<u32>) -> Result<Membership> {
    let m = ra.module();
    c.check(m)?;
    if m.kind().is_dual() {
        return membership_at(ra, c, cap.unwrap_or(1));
    }
    if let Some(cap) = cap {
        return membership_at(ra, c, cap);
    }
    let start = c.max_coeff_degree() + 1;
    let last = start + c.degree() as u32 * (structure_degree(ra) + 1);
    for cap in start..last {
        if let Ok(found) = membership_at(ra, c, cap) {
            return Ok(found);
        }
    }
    membership_at(ra, c, last)
}

/// Largest coefficient degree among the gram, its inverse and the Christoffel table.
fn structure_degree(ra: &RothsteinAlgebra) -> u32 {
    let m = ra.module();
    let n = m.rank();
    let gram = (0..n).flat_map(|a| (0..n).flat_map(move |b| [m.gram(a, b).degree(), m.ginv(a, b).degree()]));
    let gamma = ra.connection().table().iter().flatten().flat_map(|x| x.coeffs().iter().map(Poly::degree));
    gram.chain(gamma).flatten().max().unwrap_or(0)
}

fn membership_at(ra: &RothsteinAlgebra, c: &CMapElement, cap: u32) -> Result<Membership> {
    let kind = ra.kind();
    let basis = roth_basis(ra, c.degree(), cap);
    let mut index = BTreeMap::new();
    let columns = basis.iter().map(|phi| Ok(coordinates(&apply_j(ra, phi, c.degree())?, &mut index))).collect::<Result<Vec<_>>>()?;
    let b = coordinates(c, &mut index);
    match solve_columns(&columns, &b) {
        Solve::Solution(x) => {
            let mut pre = ra.zero();
            for (i, q) in x {
                pre = pre.add(&basis[i].scale_q(&q));
            }
            Ok(Membership::Member(pre))
        }
        Solve::Infeasible(y) => {
            if !kind.is_dual() {
                return Err(Error::Inconclusive(cap as usize));
            }
            let coords: BTreeMap<usize, Coordinate> = index.into_iter().map(|(k, v)| (v, k)).collect();
            let value = crate::linalg::dot(&y, &b);
            let residual = y.into_iter().map(|(i, q)| (coords[&i].clone(), q)).collect();
            Ok(Membership::NonMember(Certificate { cap, residual, value }))
        }
    }
}

/// `lambda(phi)` on sorted generator tuples: the nested bracket
/// `{..{phi, x_g1}, .., x_gp}` where `p` is the largest symmetric degree in `phi`.
pub fn lambda(ra: &RothsteinAlgebra, phi: &RothElement) -> Result<BTreeMap<Vec<usize>, RothElement>> {
    ra.check(phi)?;
    let p = phi.terms().map(|(k, _)| k.sym.len()).max().unwrap_or(0);
    let top = RothElement::from_terms(phi.kind(), phi.rank(), phi.terms().filter(|(k, _)| k.sym.len() == p).map(|(k, v)| (k.sym.clone(), k.ext.clone(), v.clone())))?;
    let mut out = BTreeMap::new();
    for gens in sorted_tuples(ra.module().algebra().num_gens(), p) {
        let letters: Vec<RothElement> = gens.iter().map(|&g| ra.gen(g)).collect();
        let v = ra.nested(&top, &letters)?;
        if !v.is_zero() {
            out.insert(gens, v);
        }
    }
    Ok(out)
}

/// Injectivity of `lambda` on this input: the image vanishes only if `phi` does.
pub fn lambda_check(ra: &RothsteinAlgebra, phi: &RothElement) -> Result<bool> {
    Ok(lambda(ra, phi)?.is_empty() == phi.is_zero())
}

/// Over the dual numbers with `E = A`, `<a, b> = ab`: the symmetric
/// biderivation `P(eps, eps) = eps` yields `C(x, y, z) = P(x, z) y` in
/// `C^4(E)`. Its tower is reconstructed from values alone.
pub fn counterexample_sder() -> Result<(RothsteinAlgebra, CMapElement)> {
    let alg = Algebra::dual_num();
    let kind = alg.kind();
    let m = MetricModule::new(alg, vec!["e".into()], vec![vec![Poly::one(kind)]])?;
    let p = SymMultiDerivation::new(kind, 2, vec![(vec![0, 0], Poly::var(kind, 0))])?;
    let c = CMapElement::from_evaluator(&m, 4, |xs| {
        let v = p.eval(&[xs[0].coeff(0).clone(), xs[2].coeff(0).clone()]).expect("dual arguments");
        xs[1].scale(&v)
    })?;
    let ra = RothsteinAlgebra::new(m.clone(), Connection::flat(&m))?;
    Ok((ra, c))
}

/// All canonical keys of degree `r` for `ra`'s module.
pub fn keys_of(ra: &RothsteinAlgebra, r: usize) -> Vec<TowerKey> {
    let m = ra.module();
    canonical_keys(m.algebra().num_gens(), m.rank(), r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hyperbolic_x() -> RothsteinAlgebra {
        let m = MetricModule::constant(Algebra::free_poly(&["x"]).unwrap(), &[vec![0, 1], vec![1, 0]]).unwrap();
        RothsteinAlgebra::with_default_connection(m).unwrap()
    }

    #[test]
    fn j_of_derivation_is_minus_covariant_derivative() {
        let m = MetricModule::constant(Algebra::free_poly(&["x"]).unwrap(), &[vec![0, 1], vec![1, 0]]).unwrap();
        let x = m.algebra().gen(0);
        let gamma = vec![vec![m.basis(0).scale(&x), m.basis(1).scale(&-&x)]];
        let conn = Connection::new(&m, gamma).unwrap();
        let ra = RothsteinAlgebra::new(m.clone(), conn.clone()).unwrap();
        let jd = apply_j(&ra, &ra.d(0), 2).unwrap();
        for y in [m.basis(0), m.basis(1).scale(&x)] {
            let want = conn.nabla_basis(&m, 0, &y).neg();
            assert_eq!(jd.eval(&m, &[y]).unwrap(), want);
        }
    }

    #[test]
    fn j_of_bivector() {
        let ra = hyperbolic_x();
        let m = ra.module();
        let j = apply_j(&ra, &ra.e(0).wedge(&ra.e(1)), 2).unwrap();
        for z in [m.basis(0), m.basis(1)] {
            let want = m.basis(1).scale(&-&m.inner(&m.basis(0), &z).unwrap()).add(&m.basis(0).scale(&m.inner(&m.basis(1), &z).unwrap()));
            assert_eq!(j.eval(m, &[z]).unwrap(), want);
        }
    }

    #[test]
    fn lambda_of_square_derivation() {
        let ra = hyperbolic_x();
        let phi = ra.d(0).wedge(&ra.d(0));
        let l = lambda(&ra, &phi).unwrap();
        assert_eq!(l[&vec![0, 0]], ra.scalar(Poly::from_int(ra.kind(), 2)));
        assert!(lambda_check(&ra, &phi).unwrap());
        assert!(lambda_check(&ra, &ra.zero()).unwrap());
    }

    #[test]
    fn counterexample_is_outside_the_image() {
        let (ra, c) = counterexample_sder().unwrap();
        let eps = Poly::var(ra.kind(), 0);
        assert_eq!(c.entries().map(|(k, v)| (k.clone(), v.clone())).collect::<Vec<_>>(), vec![(TowerKey { gens: vec![0, 0], args: vec![] }, eps)]);
        assert!(cmap::verify(ra.module(), &c, None).unwrap().ok);
        match chat_membership(&ra, &c, None).unwrap() {
            Membership::NonMember(cert) => assert!(!cert.value.is_zero()),
            Membership::Member(_) => panic!("must not be in the image"),
        }
    }

    #[test]
    fn membership_of_an_image() {
        let ra = hyperbolic_x();
        let x = ra.module().algebra().gen(0);
        let phi = ra.d(0).wedge(&ra.e(0)).scale(&x).add(&ra.e(0).wedge(&ra.e(1)).wedge(&ra.e(0)));
        let c = apply_j(&ra, &phi, 3).unwrap();
        match chat_membership(&ra, &c, None).unwrap() {
            Membership::Member(pre) => assert_eq!(apply_j(&ra, &pre, 3).unwrap(), c),
            Membership::NonMember(_) => panic!("image must be a member"),
        }
        assert_eq!(apply_j(&ra, &invert_j_deg3(&ra, &c).unwrap(), 3).unwrap(), c);
    }
}
