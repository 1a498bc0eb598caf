//! The deformation complex `(R(E), {theta, .})`, its graded blocks and
//! cohomology, and Maurer-Cartan extension of formal deformations.

use std::collections::BTreeMap;
use std::ops::RangeInclusive;

use crate::cmap::{bracket, CMapElement};
use crate::courant::CourantStructure;
use crate::der::sorted_tuples;
use crate::error::{Error, Result};
use crate::linalg::{solve_columns, Echelon, Solve, SparseVec};
use crate::poly::{Mono, Poly};
use crate::rothstein::{RothElement, RothKey};
use crate::scalar::Rational;

/// `delta_m(phi) = {theta, phi}`.
pub fn differential(cs: &CourantStructure, phi: &RothElement) -> Result<RothElement> {
    cs.rothstein().bracket(cs.theta(), phi)
}

/// `delta_m(C) = [m, C]` on the bracket side.
pub fn differential_c(cs: &CourantStructure, c: &CMapElement) -> Result<CMapElement> {
    bracket(cs.module(), cs.m(), c)
}

/// Internal degree of a single term: coefficient degree, minus one per
/// derivation, plus the weights of the basis vectors.
fn term_degree(cs: &CourantStructure, key: &RothKey, mono: &Mono) -> i64 {
    mono.degree() as i64 - key.sym.len() as i64 + key.ext.iter().map(|&a| cs.weights()[a] as i64).sum::<i64>()
}

/// Internal degrees occurring in `phi`.
pub fn internal_degrees(cs: &CourantStructure, phi: &RothElement) -> Vec<i64> {
    let mut out: Vec<i64> = phi.terms().flat_map(|(k, v)| v.terms().map(move |(mono, _)| term_degree(cs, k, mono))).collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Internal degree of `theta`, which must be homogeneous.
pub fn theta_degree(cs: &CourantStructure) -> Result<i64> {
    if cs.module().kind().is_dual() {
        return Err(Error::Unsupported("graded blocks are defined for polynomial algebras only".into()));
    }
    match internal_degrees(cs, cs.theta()).as_slice() {
        [] => Ok(0),
        [h] => Ok(*h),
        ds => Err(Error::Grading(format!("theta is not homogeneous in the internal grading (degrees {ds:?})"))),
    }
}

/// The matrix of `delta` from the block `(r, d)` to `(r + 1, d + h)`.
#[derive(Clone, Debug)]
pub struct GradedComplexBlock {
    pub r: usize,
    pub d: i64,
    /// Basis monomials of the domain.
    pub domain: Vec<(RothKey, Mono)>,
    /// Basis monomials of the codomain.
    pub codomain: Vec<(RothKey, Mono)>,
    /// One column per domain element, indexed by codomain position.
    pub columns: Vec<SparseVec>,
}

impl GradedComplexBlock {
    pub fn rank(&self) -> usize {
        let mut e = Echelon::new();
        for (j, c) in self.columns.iter().enumerate() {
            e.insert(c.clone(), j);
        }
        e.rank()
    }

    /// Whether `next . self` is the zero matrix.
    pub fn composes_to_zero(&self, next: &GradedComplexBlock) -> bool {
        self.columns.iter().all(|c| {
            let mut acc = SparseVec::new();
            for (i, q) in c {
                crate::linalg::axpy(&mut acc, q, &next.columns[*i]);
            }
            acc.is_empty()
        })
    }
}

/// Basis of the block `(r, d)`: derivation multisets, increasing basis
/// subsets and coefficient monomials of matching internal degree.
pub fn block_basis(cs: &CourantStructure, r: usize, d: i64) -> Vec<(RothKey, Mono)> {
    let m = cs.module();
    let nder = m.der_rank();
    let mut out = Vec::new();
    for p in 0..=r / 2 {
        let k = r - 2 * p;
        if k > m.rank() {
            continue;
        }
        for sym in sorted_tuples(nder, p) {
            for ext in sorted_tuples(m.rank(), k).into_iter().filter(|e| e.windows(2).all(|w| w[0] < w[1])) {
                let w: i64 = ext.iter().map(|&a| cs.weights()[a] as i64).sum();
                let q = d + p as i64 - w;
                if q < 0 {
                    continue;
                }
                for mono in m.algebra().monomials_up_to(q as u32) {
                    let (mn, _) = mono.terms().next().expect("monomial");
                    if mn.degree() as i64 == q {
                        out.push((RothKey { sym: sym.clone(), ext: ext.clone() }, mn.clone()));
                    }
                }
            }
        }
    }
    out
}

fn basis_element(cs: &CourantStructure, key: &RothKey, mono: &Mono) -> RothElement {
    let kind = cs.module().kind();
    RothElement::from_terms(kind, cs.module().rank(), [(key.sym.clone(), key.ext.clone(), Poly::monomial(kind, mono.clone(), Rational::one()))])
        .expect("valid basis term")
}

fn coords(phi: &RothElement, index: &BTreeMap<(RothKey, Mono), usize>) -> Option<SparseVec> {
    let mut v = SparseVec::new();
    for (k, p) in phi.terms() {
        for (mono, q) in p.terms() {
            let i = *index.get(&(k.clone(), mono.clone()))?;
            v.insert(i, q.clone());
        }
    }
    Some(v)
}

/// Builds the block `(r, d)`, checking that `delta` lands in degree `d + h`.
pub fn block(cs: &CourantStructure, r: usize, d: i64) -> Result<GradedComplexBlock> {
    let h = theta_degree(cs)?;
    let domain = block_basis(cs, r, d);
    let codomain = block_basis(cs, r + 1, d + h);
    let index: BTreeMap<(RothKey, Mono), usize> = codomain.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();
    let mut columns = Vec::with_capacity(domain.len());
    for (key, mono) in &domain {
        let img = differential(cs, &basis_element(cs, key, mono))?;
        let col = coords(&img, &index).ok_or_else(|| {
            Error::Grading(format!("the differential leaves internal degree {} from block ({r}, {d})", d + h))
        })?;
        columns.push(col);
    }
    Ok(GradedComplexBlock { r, d, domain, codomain, columns })
}

/// One row of a cohomology table.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CohomologyRecord {
    pub r: usize,
    pub d: i64,
    /// Dimension of the cochain block.
    pub chain_dim: usize,
    /// Rank of `delta` leaving the block.
    pub rank_out: usize,
    /// Rank of `delta` entering the block.
    pub rank_in: usize,
    pub dim: usize,
}

/// `dim H^r_d = dim ker(delta_(r, d)) - rank(delta_(r-1, d-h))` over the given ranges.
pub fn cohomology_dims(cs: &CourantStructure, rs: RangeInclusive<usize>, ds: RangeInclusive<i64>) -> Result<Vec<CohomologyRecord>> {
    let h = theta_degree(cs)?;
    let mut out = Vec::new();
    let mut ranks: BTreeMap<(usize, i64), usize> = BTreeMap::new();
    let mut rank_of = |r: usize, d: i64| -> Result<usize> {
        if let Some(&k) = ranks.get(&(r, d)) {
            return Ok(k);
        }
        let k = block(cs, r, d)?.rank();
        ranks.insert((r, d), k);
        Ok(k)
    };
    for r in rs {
        for d in ds.clone() {
            let chain_dim = block_basis(cs, r, d).len();
            let rank_out = rank_of(r, d)?;
            let rank_in = if r == 0 { 0 } else { rank_of(r - 1, d - h)? };
            out.push(CohomologyRecord { r, d, chain_dim, rank_out, rank_in, dim: chain_dim - rank_out - rank_in });
        }
    }
    Ok(out)
}

/// Coefficients `m_1, .., m_k` of `m_t = m + m_1 t + .. + m_k t^k`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DeformationSeries {
    pub terms: Vec<RothElement>,
}

impl DeformationSeries {
    pub fn order(&self) -> usize {
        self.terms.len()
    }

    /// `m_j` with `m_0 = theta`.
    fn coeff<'a>(&'a self, cs: &'a CourantStructure, j: usize) -> &'a RothElement {
        if j == 0 {
            cs.theta()
        } else {
            &self.terms[j - 1]
        }
    }
}

/// `sum_{i=1}^{j-1} {m_i, m_(j-i)}`.
fn quadratic_part(cs: &CourantStructure, s: &DeformationSeries, j: usize) -> Result<RothElement> {
    let ra = cs.rothstein();
    let mut acc = ra.zero();
    for i in 1..j {
        acc = acc.add(&ra.bracket(s.coeff(cs, i), s.coeff(cs, j - i))?);
    }
    Ok(acc)
}

/// The order-`j` relation `2 delta m_j + sum_{i=1}^{j-1} {m_i, m_(j-i)}`.
pub fn mc_residual(cs: &CourantStructure, s: &DeformationSeries, j: usize) -> Result<RothElement> {
    let lin = differential(cs, s.coeff(cs, j))?.scale_q(&Rational::from_int(2));
    Ok(lin.add(&quadratic_part(cs, s, j)?))
}

/// Fails with the first order at which the series violates its relation.
pub fn validate_series(cs: &CourantStructure, s: &DeformationSeries) -> Result<()> {
    for (j, t) in s.terms.iter().enumerate() {
        cs.rothstein().check(t)?;
        if !t.is_homogeneous_of(3) {
            return Err(Error::InvalidSeries(j + 1));
        }
    }
    for j in 1..=s.order() {
        if !mc_residual(cs, s, j)?.is_zero() {
            return Err(Error::InvalidSeries(j));
        }
    }
    Ok(())
}

/// The obstruction `sum_{i=1}^{k} {m_i, m_(k+1-i)}` and whether it is a cocycle.
pub fn mc_obstruction(cs: &CourantStructure, s: &DeformationSeries) -> Result<(RothElement, bool)> {
    validate_series(cs, s)?;
    let obs = quadratic_part(cs, s, s.order() + 1)?;
    let cocycle = differential(cs, &obs)?.is_zero();
    Ok((obs, cocycle))
}

/// Accepts `m_(k+1)` iff `2 delta m_(k+1) = -obstruction`.
pub fn mc_extend(cs: &CourantStructure, s: &DeformationSeries, candidate: &RothElement) -> Result<bool> {
    let (obs, _) = mc_obstruction(cs, s)?;
    let lhs = differential(cs, candidate)?.scale_q(&Rational::from_int(2));
    Ok(lhs.add(&obs).is_zero())
}

/// Searches the graded blocks for some `m_(k+1)` extending the series.
/// Returns `None` when the obstruction is not exact in the blocks it touches.
pub fn mc_solve_next(cs: &CourantStructure, s: &DeformationSeries) -> Result<Option<RothElement>> {
    let (obs, _) = mc_obstruction(cs, s)?;
    let h = theta_degree(cs)?;
    let target = obs.scale_q(&Rational::new(-1, 2));
    let mut out = cs.rothstein().zero();
    for d in internal_degrees(cs, &target) {
        let part = restrict_degree(cs, &target, d);
        let blk = block(cs, 3, d - h)?;
        let index: BTreeMap<(RothKey, Mono), usize> = blk.codomain.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();
        let Some(b) = coords(&part, &index) else { return Ok(None) };
        match solve_columns(&blk.columns, &b) {
            Solve::Solution(x) => {
                for (i, q) in x {
                    let (key, mono) = &blk.domain[i];
                    out = out.add(&basis_element(cs, key, mono).scale_q(&q));
                }
            }
            Solve::Infeasible(_) => return Ok(None),
        }
    }
    Ok(Some(out))
}

fn restrict_degree(cs: &CourantStructure, phi: &RothElement, d: i64) -> RothElement {
    let kind = cs.module().kind();
    let terms = phi.terms().flat_map(|(k, v)| {
        v.terms()
            .filter(move |(mono, _)| term_degree(cs, k, mono) == d)
            .map(move |(mono, q)| (k.sym.clone(), k.ext.clone(), Poly::monomial(kind, mono.clone(), q.clone())))
    });
    RothElement::from_terms(kind, phi.rank(), terms.collect::<Vec<_>>()).expect("terms of phi")
}

/// `m_j = ad_xi^j(theta) / j!`, the expansion of `exp(t ad_xi) theta`.
pub fn trivial_deformation(cs: &CourantStructure, xi: &RothElement, k: usize) -> Result<DeformationSeries> {
    let ra = cs.rothstein();
    ra.check(xi)?;
    if !xi.is_homogeneous_of(2) {
        return Err(Error::Degree("trivial deformations are generated by degree-2 elements".into()));
    }
    let mut terms = Vec::with_capacity(k);
    let mut cur = cs.theta().clone();
    for j in 1..=k {
        cur = ra.bracket(xi, &cur)?.scale_q(&Rational::new(1, j as i64));
        terms.push(cur.clone());
    }
    Ok(DeformationSeries { terms })
}
