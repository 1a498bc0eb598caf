//! Courant algebroid structures as degree-3 elements `m` with `[m, m] = 0`.

use crate::cmap::{self, bracket, CMapElement, VerifyReport};
use crate::der::DerElement;
use crate::error::{Error, Result};
use crate::iso::ModuleIso;
use crate::module::{Connection, MetricModule, ModuleElement};
use crate::poly::{Algebra, Poly};
use crate::rothstein::{RothElement, RothsteinAlgebra};
use crate::scalar::Rational;
use crate::symbol_map::{apply_j, invert_j_deg3};

/// A Courant structure, held on both sides: `m` in `C^3(E)` and a
/// Rothstein preimage `theta` with `J(theta) = m`.
#[derive(Clone, Debug)]
pub struct CourantStructure {
    ra: RothsteinAlgebra,
    m: CMapElement,
    theta: RothElement,
    weights: Vec<i32>,
}

impl CourantStructure {
    /// Builds the structure from a Rothstein element of degree 3.
    pub fn from_theta(ra: RothsteinAlgebra, theta: RothElement) -> Result<Self> {
        let m = apply_j(&ra, &theta, 3)?;
        Self::checked(ra, m, theta)
    }

    /// Builds the structure from a bracket table, lifting it to the Rothstein side.
    pub fn from_cmap(ra: RothsteinAlgebra, m: CMapElement) -> Result<Self> {
        let report = cmap::verify(ra.module(), &m, None)?;
        if !report.ok {
            return Err(Error::NotCourant(report.violation.unwrap_or_default()));
        }
        let theta = invert_j_deg3(&ra, &m)?;
        Self::checked(ra, m, theta)
    }

    fn checked(ra: RothsteinAlgebra, m: CMapElement, theta: RothElement) -> Result<Self> {
        let rep = verify_courant(ra.module(), &m, None)?;
        if !rep.ok {
            return Err(Error::NotCourant(rep.violation.unwrap_or_else(|| "verification routes disagree".into())));
        }
        let weights = vec![0; ra.rank()];
        Ok(CourantStructure { ra, m, theta, weights })
    }

    /// Internal weights of the basis vectors, used to grade the deformation complex.
    pub fn with_weights(mut self, weights: Vec<i32>) -> Result<Self> {
        if weights.len() != self.ra.rank() {
            return Err(Error::Arity { expected: self.ra.rank(), got: weights.len() });
        }
        self.weights = weights;
        Ok(self)
    }

    pub fn module(&self) -> &MetricModule {
        self.ra.module()
    }

    pub fn rothstein(&self) -> &RothsteinAlgebra {
        &self.ra
    }

    pub fn m(&self) -> &CMapElement {
        &self.m
    }

    pub fn theta(&self) -> &RothElement {
        &self.theta
    }

    pub fn weights(&self) -> &[i32] {
        &self.weights
    }

    /// The anchor `sigma(x)`.
    pub fn anchor(&self, x: &ModuleElement) -> Result<DerElement> {
        anchor_of(self.module(), &self.m, x)
    }

    /// `[x, y]` read off the value table.
    pub fn bracket(&self, x: &ModuleElement, y: &ModuleElement) -> Result<ModuleElement> {
        self.m.eval(self.module(), &[x.clone(), y.clone()])
    }
}

fn anchor_of(m: &MetricModule, c: &CMapElement, x: &ModuleElement) -> Result<DerElement> {
    m.check_elem(x)?;
    let mut out = DerElement::zero(m.kind());
    for (a, f) in x.coeffs().iter().enumerate() {
        if !f.is_zero() {
            out = out.add(&c.symbol(m, &[a])?.scale(f)?)?;
        }
    }
    Ok(out)
}

/// The derived bracket `[[x, m], y]`, computed with the bracket of `C(E)`.
pub fn derived_bracket(cs: &CourantStructure, x: &ModuleElement, y: &ModuleElement) -> Result<ModuleElement> {
    let m = cs.module();
    let xm = bracket(m, &CMapElement::vector(m, x), &cs.m)?;
    let v = bracket(m, &xm, &CMapElement::vector(m, y))?;
    Ok(v.as_vector(m).expect("degree 1"))
}

/// `theta_std = -sum_i D_i ^ f_i` on `A^{2n}` with basis `e_i` (vector
/// fields) and `f_i` (one-forms), hyperbolic pairing and flat connection.
pub fn make_standard_courant(n: usize) -> Result<CourantStructure> {
    if n == 0 {
        return Err(Error::Unsupported("the standard structure needs at least one variable".into()));
    }
    let names: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
    let alg = Algebra::free_poly(&names)?;
    let kind = alg.kind();
    let basis: Vec<String> = (1..=n).map(|i| format!("e{i}")).chain((1..=n).map(|i| format!("f{i}"))).collect();
    let gram = (0..2 * n)
        .map(|a| (0..2 * n).map(|b| if a + n == b || b + n == a { Poly::one(kind) } else { Poly::zero(kind) }).collect())
        .collect();
    let m = MetricModule::new(alg, basis, gram)?;
    let ra = RothsteinAlgebra::new(m.clone(), Connection::flat(&m))?;
    let mut theta = ra.zero();
    for i in 0..n {
        theta = theta.sub(&ra.d(i).wedge(&ra.e(n + i)));
    }
    let weights = (0..2 * n).map(|a| if a < n { -1 } else { 1 }).collect();
    CourantStructure::from_theta(ra, theta)?.with_weights(weights)
}

/// A quadratic Lie algebra over `Q`: `[e_a, e_b] = sum_c consts[a][b][c] e_c`.
pub fn make_quadratic_lie(consts: &[Vec<Vec<Rational>>], gram: Vec<Vec<Rational>>) -> Result<CourantStructure> {
    let n = gram.len();
    let alg = Algebra::free(0);
    let kind = alg.kind();
    let gram_p: Vec<Vec<Poly>> = gram.iter().map(|row| row.iter().map(|q| Poly::constant(kind, q.clone())).collect()).collect();
    let m = MetricModule::with_gram(alg, gram_p)?;
    if consts.len() != n || consts.iter().any(|r| r.len() != n || r.iter().any(|c| c.len() != n)) {
        return Err(Error::MalformedTable(format!("structure constants must be {n} x {n} x {n}")));
    }
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                if consts[a][b][c] != -&consts[b][a][c] {
                    return Err(Error::MalformedTable(format!("structure constants not antisymmetric in ({a}, {b})")));
                }
            }
        }
    }
    let value = |a: usize, b: usize| -> ModuleElement {
        m.element((0..n).map(|c| Poly::constant(kind, consts[a][b][c].clone())).collect()).expect("rank n")
    };
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let lhs = &m.inner(&value(a, b), &m.basis(c))? + &m.inner(&m.basis(b), &value(a, c))?;
                if !lhs.is_zero() {
                    return Err(Error::NotCourant(format!(
                        "the pairing is not invariant: <[{0},{1}],{2}> + <{1},[{0},{2}]> != 0",
                        m.names()[a],
                        m.names()[b],
                        m.names()[c]
                    )));
                }
            }
        }
    }
    let c = CMapElement::from_tables(&m, 3, |args| value(args[0], args[1]), |_| DerElement::zero(kind))?;
    let ra = RothsteinAlgebra::new(m.clone(), Connection::flat(&m))?;
    CourantStructure::from_cmap(ra, c)
}

/// Structure constants of `so(3)`, the cross product.
pub fn so3_constants() -> Vec<Vec<Vec<Rational>>> {
    let mut c = vec![vec![vec![Rational::zero(); 3]; 3]; 3];
    for (a, b, d) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
        c[a][b][d] = Rational::one();
        c[b][a][d] = Rational::from_int(-1);
    }
    c
}

pub fn identity_gram(n: usize) -> Vec<Vec<Rational>> {
    (0..n).map(|a| (0..n).map(|b| if a == b { Rational::one() } else { Rational::zero() }).collect()).collect()
}

/// Outcome of [`verify_courant`].
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CourantReport {
    /// Both routes succeeded.
    pub ok: bool,
    /// `m` is a valid element of `C^3(E)` and `[m, m] = 0`.
    pub bracket_route: bool,
    /// The three axioms hold on the probe set.
    pub axiom_route: bool,
    pub cmap: VerifyReport,
    /// Largest monomial degree in axiom probes.
    pub probe_degree: u32,
    pub axiom_checks: usize,
    pub violation: Option<String>,
}

impl CourantReport {
    pub fn routes_agree(&self) -> bool {
        self.bracket_route == self.axiom_route
    }
}

/// Checks `m` twice: through `[m, m] = 0` and by evaluating the Courant
/// axioms on triples of monomial multiples of basis vectors, each of degree
/// at most `probe_degree` (default 1) and of total degree at most twice that.
/// Two nonconstant slots are needed to see `sigma sigma^* != 0`.
pub fn verify_courant(m: &MetricModule, c: &CMapElement, probe_degree: Option<u32>) -> Result<CourantReport> {
    c.check(m)?;
    if c.degree() != 3 {
        return Err(Error::Degree(format!("Courant structures have degree 3, not {}", c.degree())));
    }
    let probe_degree = probe_degree.unwrap_or(1);
    let cmap_rep = cmap::verify(m, c, None)?;
    let mm_zero = bracket(m, c, c)?.is_zero();
    let bracket_route = cmap_rep.ok && mm_zero;
    let mut violation = if !cmap_rep.ok {
        cmap_rep.violation.clone()
    } else if !mm_zero {
        Some("[m, m] is nonzero".to_string())
    } else {
        None
    };

    let probes: Vec<(ModuleElement, u32)> = m
        .algebra()
        .monomials_up_to(probe_degree)
        .into_iter()
        .flat_map(|mu| {
            let d = mu.degree().unwrap_or(0);
            (0..m.rank()).map(move |a| (m.basis(a).scale(&mu), d))
        })
        .collect();
    let br = |x: &ModuleElement, y: &ModuleElement| c.eval(m, &[x.clone(), y.clone()]);
    let anchor_apply = |x: &ModuleElement, f: &Poly| -> Result<Poly> { anchor_of(m, c, x)?.apply(f) };
    let mut triples: Vec<[ModuleElement; 3]> = Vec::new();
    for (x, dx) in &probes {
        for (y, dy) in &probes {
            for (z, dz) in &probes {
                if dx + dy + dz <= 2 * probe_degree {
                    triples.push([x.clone(), y.clone(), z.clone()]);
                }
            }
        }
    }
    let label = |t: &[ModuleElement; 3]| -> String { t.iter().map(|x| m.fmt_elem(x)).collect::<Vec<_>>().join(", ") };
    let mut axiom_route = true;
    let mut axiom_checks = 0;
    let mut axiom_violation = None;
    for t in &triples {
        let [x, y, z] = t;
        axiom_checks += 1;
        let jac_l = br(x, &br(y, z)?)?;
        let jac_r = br(&br(x, y)?, z)?.add(&br(y, &br(x, z)?)?);
        if jac_l != jac_r {
            axiom_violation = Some(format!("Jacobi identity fails at ({})", label(t)));
        } else {
            let yz = m.inner(y, z)?;
            let der_l = anchor_apply(x, &yz)?;
            let der_r = &m.inner(&br(x, y)?, z)? + &m.inner(y, &br(x, z)?)?;
            if der_l != der_r {
                axiom_violation = Some(format!("derivation axiom fails at ({})", label(t)));
            } else {
                let sym_r = m.inner(&br(y, z)?.add(&br(z, y)?), x)?;
                if der_l != sym_r {
                    axiom_violation = Some(format!("symmetric part axiom fails at ({})", label(t)));
                }
            }
        }
        if axiom_violation.is_some() {
            axiom_route = false;
            break;
        }
    }
    if violation.is_none() {
        violation = axiom_violation;
    }
    Ok(CourantReport {
        ok: bracket_route && axiom_route,
        bracket_route,
        axiom_route,
        cmap: cmap_rep,
        probe_degree,
        axiom_checks,
        violation,
    })
}

/// The five morphism conditions, checked on generator and basis probes.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MorphismReport {
    pub algebra_morphism: bool,
    pub module_morphism: bool,
    pub bracket_preserved: bool,
    pub anchor_preserved: bool,
    pub pairing_preserved: bool,
}

impl MorphismReport {
    pub fn ok(&self) -> bool {
        self.algebra_morphism && self.module_morphism && self.bracket_preserved && self.anchor_preserved && self.pairing_preserved
    }
}

pub fn verify_morphism(cs1: &CourantStructure, cs2: &CourantStructure, psi: &ModuleIso) -> Result<MorphismReport> {
    let (m1, m2) = (cs1.module(), cs2.module());
    m1.kind().check(m2.kind())?;
    let phi = &psi.alg;
    let alg = m1.algebra();
    let mut funcs: Vec<Poly> = alg.monomials_up_to(2);
    funcs.push(&alg.one() + &alg.monomials_up_to(1).last().cloned().unwrap_or_else(|| alg.one()));
    let mut algebra_morphism = phi.apply(&alg.one()).is_one();
    for f in &funcs {
        for g in &funcs {
            algebra_morphism &= phi.apply(&(f * g)) == &phi.apply(f) * &phi.apply(g);
        }
    }
    let basis: Vec<ModuleElement> = (0..m1.rank()).map(|a| m1.basis(a)).collect();
    let mut module_morphism = true;
    for f in &funcs {
        for x in &basis {
            module_morphism &= psi.apply(&x.scale(f)) == psi.apply(x).scale(&phi.apply(f));
        }
    }
    let mut probes = basis.clone();
    for g in 0..alg.num_gens() {
        probes.extend(basis.iter().map(|x| x.scale(&alg.gen(g))));
    }
    let mut bracket_preserved = true;
    let mut pairing_preserved = true;
    let mut anchor_preserved = true;
    for x in &probes {
        for f in &funcs {
            anchor_preserved &= phi.apply(&cs1.anchor(x)?.apply(f)?) == cs2.anchor(&psi.apply(x))?.apply(&phi.apply(f))?;
        }
        for y in &probes {
            bracket_preserved &= psi.apply(&cs1.bracket(x, y)?) == cs2.bracket(&psi.apply(x), &psi.apply(y))?;
            pairing_preserved &= phi.apply(&m1.inner(x, y)?) == m2.inner(&psi.apply(x), &psi.apply(y))?;
        }
    }
    Ok(MorphismReport { algebra_morphism, module_morphism, bracket_preserved, anchor_preserved, pairing_preserved })
}
