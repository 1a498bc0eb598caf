//! Free modules with a symmetric inner product of unit determinant, metric
//! connections and their curvature.

use crate::der::{der_rank, DerElement};
use crate::error::{Error, Result};
use crate::linalg::{poly_det, poly_inverse};
use crate::poly::{Algebra, BackendKind, Poly};
use crate::scalar::Rational;

/// Antisymmetric matrix of coefficients: `sum_{a<b} m[a][b] e_a ^ e_b`.
pub type Bivector = Vec<Vec<Poly>>;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ModuleElement {
    kind: BackendKind,
    coeffs: Vec<Poly>,
}

impl ModuleElement {
    pub fn new(kind: BackendKind, coeffs: Vec<Poly>) -> Result<Self> {
        for c in &coeffs {
            kind.check(c.kind())?;
        }
        Ok(ModuleElement { kind, coeffs })
    }

    pub fn zero(kind: BackendKind, rank: usize) -> Self {
        ModuleElement { kind, coeffs: vec![Poly::zero(kind); rank] }
    }

    pub fn basis(kind: BackendKind, rank: usize, a: usize) -> Self {
        let mut x = Self::zero(kind, rank);
        x.coeffs[a] = Poly::one(kind);
        x
    }

    pub fn kind(&self) -> BackendKind {
        self.kind
    }

    pub fn rank(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[Poly] {
        &self.coeffs
    }

    pub fn coeff(&self, a: usize) -> &Poly {
        &self.coeffs[a]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Poly::is_zero)
    }

    fn check(&self, other: &ModuleElement) -> Result<()> {
        self.kind.check(other.kind)?;
        if self.rank() != other.rank() {
            return Err(Error::ModuleMismatch(format!("rank {} vs {}", self.rank(), other.rank())));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &ModuleElement) -> Result<ModuleElement> {
        self.check(other)?;
        Ok(ModuleElement { kind: self.kind, coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect() })
    }

    pub fn add(&self, other: &ModuleElement) -> ModuleElement {
        self.try_add(other).expect("module mismatch")
    }

    pub fn sub(&self, other: &ModuleElement) -> ModuleElement {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> ModuleElement {
        ModuleElement { kind: self.kind, coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub fn scale(&self, a: &Poly) -> ModuleElement {
        ModuleElement { kind: self.kind, coeffs: self.coeffs.iter().map(|c| a * c).collect() }
    }

    pub fn scale_q(&self, q: &Rational) -> ModuleElement {
        ModuleElement { kind: self.kind, coeffs: self.coeffs.iter().map(|c| c.scale(q)).collect() }
    }

    /// Applies `f` to every coefficient.
    pub fn map_coeffs(&self, f: impl Fn(&Poly) -> Poly) -> ModuleElement {
        ModuleElement { kind: self.kind, coeffs: self.coeffs.iter().map(f).collect() }
    }
}

/// A free module of finite rank with a symmetric inner product whose Gram
/// determinant is a unit.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MetricModule {
    alg: Algebra,
    names: Vec<String>,
    gram: Vec<Vec<Poly>>,
    ginv: Vec<Vec<Poly>>,
}

impl MetricModule {
    pub fn new(alg: Algebra, names: Vec<String>, gram: Vec<Vec<Poly>>) -> Result<Self> {
        let m = names.len();
        if m == 0 {
            return Err(Error::ModuleMismatch("module rank must be positive".into()));
        }
        if gram.len() != m || gram.iter().any(|r| r.len() != m) {
            return Err(Error::ModuleMismatch(format!("gram matrix must be {m}x{m}")));
        }
        for row in &gram {
            for p in row {
                alg.kind().check(p.kind())?;
            }
        }
        for a in 0..m {
            for b in 0..a {
                if gram[a][b] != gram[b][a] {
                    return Err(Error::GramNotSymmetric(b, a));
                }
            }
        }
        let ginv = poly_inverse(&gram, alg.kind())
            .ok_or_else(|| Error::GramNotInvertible(alg.fmt(&poly_det(&gram, alg.kind()))))?;
        Ok(MetricModule { alg, names, gram, ginv })
    }

    /// Basis `e1..em` with the given Gram matrix.
    pub fn with_gram(alg: Algebra, gram: Vec<Vec<Poly>>) -> Result<Self> {
        let names = (1..=gram.len()).map(|i| format!("e{i}")).collect();
        Self::new(alg, names, gram)
    }

    /// Gram matrix given by rational constants.
    pub fn constant(alg: Algebra, gram: &[Vec<i64>]) -> Result<Self> {
        let k = alg.kind();
        let g = gram.iter().map(|r| r.iter().map(|&v| Poly::from_int(k, v)).collect()).collect();
        Self::with_gram(alg, g)
    }

    pub fn algebra(&self) -> &Algebra {
        &self.alg
    }

    pub fn kind(&self) -> BackendKind {
        self.alg.kind()
    }

    pub fn rank(&self) -> usize {
        self.names.len()
    }

    /// Number of basis derivations of the coefficient algebra.
    pub fn der_rank(&self) -> usize {
        der_rank(self.kind())
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn basis_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn gram(&self, a: usize, b: usize) -> &Poly {
        &self.gram[a][b]
    }

    pub fn gram_matrix(&self) -> &[Vec<Poly>] {
        &self.gram
    }

    pub fn ginv(&self, a: usize, b: usize) -> &Poly {
        &self.ginv[a][b]
    }

    pub fn zero(&self) -> ModuleElement {
        ModuleElement::zero(self.kind(), self.rank())
    }

    pub fn basis(&self, a: usize) -> ModuleElement {
        ModuleElement::basis(self.kind(), self.rank(), a)
    }

    pub fn element(&self, coeffs: Vec<Poly>) -> Result<ModuleElement> {
        if coeffs.len() != self.rank() {
            return Err(Error::ModuleMismatch(format!("expected {} coefficients, got {}", self.rank(), coeffs.len())));
        }
        ModuleElement::new(self.kind(), coeffs)
    }

    pub(crate) fn check_elem(&self, x: &ModuleElement) -> Result<()> {
        self.kind().check(x.kind())?;
        if x.rank() != self.rank() {
            return Err(Error::ModuleMismatch(format!("element of rank {} in module of rank {}", x.rank(), self.rank())));
        }
        Ok(())
    }

    /// Dual basis vector `sum_b ginv[a][b] e_b`, so that `<e_c, dual(a)> = delta_ca`.
    pub fn dual_basis(&self, a: usize) -> ModuleElement {
        ModuleElement { kind: self.kind(), coeffs: self.ginv[a].clone() }
    }

    pub fn inner(&self, x: &ModuleElement, y: &ModuleElement) -> Result<Poly> {
        self.check_elem(x)?;
        self.check_elem(y)?;
        let mut acc = self.alg.zero();
        for (a, xa) in x.coeffs.iter().enumerate() {
            if xa.is_zero() {
                continue;
            }
            for (b, yb) in y.coeffs.iter().enumerate() {
                if yb.is_zero() || self.gram[a][b].is_zero() {
                    continue;
                }
                acc = &acc + &(&(xa * &self.gram[a][b]) * yb);
            }
        }
        Ok(acc)
    }

    /// `<x, e_b>` for every basis index.
    pub fn pairings(&self, x: &ModuleElement) -> Vec<Poly> {
        (0..self.rank())
            .map(|b| {
                let mut acc = self.alg.zero();
                for (a, xa) in x.coeffs.iter().enumerate() {
                    if !xa.is_zero() && !self.gram[a][b].is_zero() {
                        acc = &acc + &(xa * &self.gram[a][b]);
                    }
                }
                acc
            })
            .collect()
    }

    /// The element `y` with `<y, e_b> = values[b]`.
    pub fn from_pairings(&self, values: &[Poly]) -> ModuleElement {
        let coeffs = (0..self.rank())
            .map(|c| {
                let mut acc = self.alg.zero();
                for (b, v) in values.iter().enumerate() {
                    if !v.is_zero() && !self.ginv[b][c].is_zero() {
                        acc = &acc + &(v * &self.ginv[b][c]);
                    }
                }
                acc
            })
            .collect();
        ModuleElement { kind: self.kind(), coeffs }
    }

    /// Pairs `(x_i, y_i)` with `sum <x_i, y_i> = 1`.
    pub fn fullness_witness(&self) -> Vec<(ModuleElement, ModuleElement)> {
        vec![(self.basis(0), self.dual_basis(0))]
    }

    pub fn fmt_elem(&self, x: &ModuleElement) -> String {
        let mut parts = Vec::new();
        for (a, c) in x.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if c.is_one() {
                parts.push(self.names[a].clone());
            } else if c.num_terms() == 1 {
                parts.push(format!("{}*{}", self.alg.fmt(c), self.names[a]));
            } else {
                parts.push(format!("({})*{}", self.alg.fmt(c), self.names[a]));
            }
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
}

/// Christoffel table `gamma[i][a] = nabla_{d_i} e_a` for the basis
/// derivations `d_i` of the coefficient algebra.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Connection {
    gamma: Vec<Vec<ModuleElement>>,
}

impl Connection {
    pub fn flat(m: &MetricModule) -> Self {
        Connection { gamma: vec![vec![m.zero(); m.rank()]; m.der_rank()] }
    }

    pub fn new(m: &MetricModule, gamma: Vec<Vec<ModuleElement>>) -> Result<Self> {
        if gamma.len() != m.der_rank() {
            return Err(Error::InvalidConnection(format!("expected {} derivation rows, got {}", m.der_rank(), gamma.len())));
        }
        for row in &gamma {
            if row.len() != m.rank() {
                return Err(Error::InvalidConnection(format!("expected {} entries per row", m.rank())));
            }
            for x in row {
                m.check_elem(x)?;
                if m.kind().is_dual() && x.coeffs.iter().any(|c| !c.constant_term().is_zero()) {
                    return Err(Error::InvalidConnection(
                        "over the dual numbers nabla_{eps d} must take values in eps E".into(),
                    ));
                }
            }
        }
        Ok(Connection { gamma })
    }

    pub fn christoffel(&self, i: usize, a: usize) -> &ModuleElement {
        &self.gamma[i][a]
    }

    pub fn table(&self) -> &[Vec<ModuleElement>] {
        &self.gamma
    }

    /// Covariant derivative along the `i`-th basis derivation.
    pub fn nabla_basis(&self, m: &MetricModule, i: usize, x: &ModuleElement) -> ModuleElement {
        let mut out = x.map_coeffs(|c| c.der_basis_apply(i));
        for (a, xa) in x.coeffs.iter().enumerate() {
            if !xa.is_zero() {
                out = out.add(&self.gamma[i][a].scale(xa));
            }
        }
        let _ = m;
        out
    }

    pub fn nabla(&self, m: &MetricModule, d: &DerElement, x: &ModuleElement) -> Result<ModuleElement> {
        m.check_elem(x)?;
        m.kind().check(d.kind())?;
        let mut out = m.zero();
        for (i, di) in d.comps().iter().enumerate() {
            if !di.is_zero() {
                out = out.add(&self.nabla_basis(m, i, x).scale(di));
            }
        }
        Ok(out)
    }

    /// First `(i, a, b)` where metricity fails, if any.
    pub fn metric_defect(&self, m: &MetricModule) -> Option<(usize, usize, usize)> {
        for i in 0..m.der_rank() {
            for a in 0..m.rank() {
                for b in a..m.rank() {
                    let lhs = m.gram(a, b).der_basis_apply(i);
                    let rhs = &m.inner(&self.gamma[i][a], &m.basis(b)).unwrap()
                        + &m.inner(&m.basis(a), &self.gamma[i][b]).unwrap();
                    if lhs != rhs {
                        return Some((i, a, b));
                    }
                }
            }
        }
        None
    }

    pub fn is_metric(&self, m: &MetricModule) -> bool {
        self.metric_defect(m).is_none()
    }

    pub(crate) fn require_metric(&self, m: &MetricModule) -> Result<()> {
        match self.metric_defect(m) {
            None => Ok(()),
            Some((i, a, b)) => Err(Error::NonMetric(format!("derivation {i}, basis pair ({a}, {b})"))),
        }
    }

    /// The metric connection `<nabla e_a, e_b> = (<G e_a, e_b> - <e_a, G e_b> + d<e_a, e_b>) / 2`.
    pub fn metrize(&self, m: &MetricModule) -> Connection {
        let half = Rational::new(1, 2);
        let gamma = (0..m.der_rank())
            .map(|i| {
                (0..m.rank())
                    .map(|a| {
                        let vals: Vec<Poly> = (0..m.rank())
                            .map(|b| {
                                let s = &(&m.inner(&self.gamma[i][a], &m.basis(b)).unwrap()
                                    - &m.inner(&m.basis(a), &self.gamma[i][b]).unwrap())
                                    + &m.gram(a, b).der_basis_apply(i);
                                s.scale(&half)
                            })
                            .collect();
                        m.from_pairings(&vals)
                    })
                    .collect()
            })
            .collect();
        Connection { gamma }
    }

    /// Curvature operator `R(d_i, d_j) x`; coordinate derivations commute.
    pub fn curvature_operator(&self, m: &MetricModule, i: usize, j: usize, x: &ModuleElement) -> ModuleElement {
        let a = self.nabla_basis(m, i, &self.nabla_basis(m, j, x));
        let b = self.nabla_basis(m, j, &self.nabla_basis(m, i, x));
        a.sub(&b)
    }

    /// Curvature operator for arbitrary derivations.
    pub fn curvature_operator_general(&self, m: &MetricModule, d: &DerElement, e: &DerElement, x: &ModuleElement) -> Result<ModuleElement> {
        let a = self.nabla(m, d, &self.nabla(m, e, x)?)?;
        let b = self.nabla(m, e, &self.nabla(m, d, x)?)?;
        let c = self.nabla(m, &d.commutator(e)?, x)?;
        Ok(a.sub(&b).sub(&c))
    }

    /// Covariant derivative of a bivector along `d_i`.
    pub fn nabla_bivector(&self, m: &MetricModule, i: usize, rho: &Bivector) -> Bivector {
        let n = m.rank();
        let g = |a: usize, c: usize| self.gamma[i][a].coeff(c);
        let mut out = vec![vec![m.algebra().zero(); n]; n];
        for c in 0..n {
            for d in 0..n {
                let mut acc = rho[c][d].der_basis_apply(i);
                for a in 0..n {
                    if !rho[a][d].is_zero() && !g(a, c).is_zero() {
                        acc = &acc + &(&rho[a][d] * g(a, c));
                    }
                    if !rho[c][a].is_zero() && !g(a, d).is_zero() {
                        acc = &acc + &(&rho[c][a] * g(a, d));
                    }
                }
                out[c][d] = acc;
            }
        }
        out
    }
}

/// `r(d_i, d_j)` for all pairs of basis derivations.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Curvature {
    r: Vec<Vec<Bivector>>,
}

impl Curvature {
    pub fn new(conn: &Connection, m: &MetricModule) -> Result<Self> {
        conn.require_metric(m)?;
        let nd = m.der_rank();
        let n = m.rank();
        let mut r = vec![vec![vec![vec![m.algebra().zero(); n]; n]; nd]; nd];
        for i in 0..nd {
            for j in 0..nd {
                if i == j {
                    continue;
                }
                for a in 0..n {
                    let ra = conn.curvature_operator(m, i, j, &m.dual_basis(a));
                    for b in 0..n {
                        r[i][j][a][b] = m.inner(&ra, &m.dual_basis(b))?;
                    }
                }
            }
        }
        Ok(Curvature { r })
    }

    pub fn from_tables(r: Vec<Vec<Bivector>>) -> Self {
        Curvature { r }
    }

    pub fn r(&self, i: usize, j: usize) -> &Bivector {
        &self.r[i][j]
    }

    pub fn tables(&self) -> &[Vec<Bivector>] {
        &self.r
    }

    pub fn is_zero(&self) -> bool {
        self.r.iter().flatten().flatten().flatten().all(Poly::is_zero)
    }

    /// `<r(d_i, d_j), x ^ y>`.
    pub fn pair(&self, m: &MetricModule, i: usize, j: usize, x: &ModuleElement, y: &ModuleElement) -> Poly {
        let px = m.pairings(x);
        let py = m.pairings(y);
        let rho = &self.r[i][j];
        let mut acc = m.algebra().zero();
        for a in 0..m.rank() {
            for b in 0..m.rank() {
                if !rho[a][b].is_zero() {
                    acc = &acc + &(&(&rho[a][b] * &px[a]) * &py[b]);
                }
            }
        }
        acc
    }

    /// Cyclic sum of covariant derivatives vanishes on every triple.
    pub fn bianchi_holds(&self, conn: &Connection, m: &MetricModule) -> bool {
        let nd = m.der_rank();
        for i in 0..nd {
            for j in 0..nd {
                for k in 0..nd {
                    let t1 = conn.nabla_bivector(m, i, &self.r[j][k]);
                    let t2 = conn.nabla_bivector(m, j, &self.r[k][i]);
                    let t3 = conn.nabla_bivector(m, k, &self.r[i][j]);
                    for a in 0..m.rank() {
                        for b in 0..m.rank() {
                            if !(&(&t1[a][b] + &t2[a][b]) + &t3[a][b]).is_zero() {
                                return false;
                            }
                        }
                    }
                }
            }
        }
        true
    }
}

pub fn bianchi_check(conn: &Connection, m: &MetricModule) -> Result<bool> {
    Ok(Curvature::new(conn, m)?.bianchi_holds(conn, m))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hyperbolic() -> MetricModule {
        MetricModule::constant(Algebra::free_poly(&["x"]).unwrap(), &[vec![0, 1], vec![1, 0]]).unwrap()
    }

    #[test]
    fn hyperbolic_pairing() {
        let m = hyperbolic();
        assert!(m.inner(&m.basis(0), &m.basis(1)).unwrap().is_one());
        assert!(m.inner(&m.basis(0), &m.basis(0)).unwrap().is_zero());
    }

    #[test]
    fn fullness_witnesses() {
        let m = hyperbolic();
        assert_eq!(m.fullness_witness(), vec![(m.basis(0), m.basis(1))]);
        let alg = Algebra::free(0);
        let id = MetricModule::constant(alg.clone(), &[vec![1]]).unwrap();
        assert_eq!(id.fullness_witness(), vec![(id.basis(0), id.basis(0))]);
        let two = MetricModule::constant(alg, &[vec![2]]).unwrap();
        let (x, y) = two.fullness_witness().remove(0);
        assert_eq!(y, two.basis(0).scale_q(&Rational::new(1, 2)));
        assert!(two.inner(&x, &y).unwrap().is_one());
    }

    #[test]
    fn non_symmetric_or_singular_gram_rejected() {
        let alg = Algebra::free_poly(&["x"]).unwrap();
        let p = |s: &str| alg.parse_poly(s).unwrap();
        let bad = MetricModule::with_gram(alg.clone(), vec![vec![p("1"), p("x")], vec![p("0"), p("1")]]);
        assert!(matches!(bad, Err(Error::GramNotSymmetric(0, 1))));
        let sing = MetricModule::with_gram(alg.clone(), vec![vec![p("1+x^2"), p("0")], vec![p("0"), p("1")]]);
        assert!(matches!(sing, Err(Error::GramNotInvertible(_))));
    }

    #[test]
    fn metrize_produces_the_half_derivative() {
        let alg = Algebra::free_poly(&["x"]).unwrap();
        let p = |s: &str| alg.parse_poly(s).unwrap();
        let m = MetricModule::with_gram(alg.clone(), vec![vec![p("1+x^2"), p("x")], vec![p("x"), p("1")]]).unwrap();
        let c = Connection::flat(&m).metrize(&m);
        assert!(c.is_metric(&m));
        assert_eq!(m.inner(c.christoffel(0, 0), &m.basis(0)).unwrap(), p("x"));
        assert_eq!(c.metrize(&m), c);
        assert!(!Connection::flat(&m).is_metric(&m));
    }

    #[test]
    fn flat_connection_has_no_curvature() {
        let m = MetricModule::constant(Algebra::free(2), &[vec![0, 1], vec![1, 0]]).unwrap();
        let c = Connection::flat(&m);
        let r = Curvature::new(&c, &m).unwrap();
        assert!(r.is_zero());
        assert!(r.bianchi_holds(&c, &m));
    }

    #[test]
    fn curvature_requires_metric_connection() {
        let alg = Algebra::free_poly(&["x"]).unwrap();
        let p = |s: &str| alg.parse_poly(s).unwrap();
        let m = MetricModule::with_gram(alg.clone(), vec![vec![p("1+x^2"), p("x")], vec![p("x"), p("1")]]).unwrap();
        assert!(matches!(Curvature::new(&Connection::flat(&m), &m), Err(Error::NonMetric(_))));
    }

    #[test]
    fn dual_connections_live_in_eps_e() {
        let alg = Algebra::dual_num();
        let m = MetricModule::constant(alg.clone(), &[vec![1]]).unwrap();
        let bad = Connection::new(&m, vec![vec![m.basis(0)]]);
        assert!(matches!(bad, Err(Error::InvalidConnection(_))));
    }
}
