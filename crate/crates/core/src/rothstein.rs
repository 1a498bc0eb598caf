//! The Rothstein algebra `Sym(Der A) (x) Lambda(E)` with its wedge product and
//! the connection-dependent Poisson bracket of degree -2.

use std::collections::BTreeMap;
use std::fmt::Write;

use crate::der::DerElement;
use crate::error::{Error, Result};
use crate::iso::ModuleIso;
use crate::module::{Bivector, Connection, Curvature, MetricModule, ModuleElement};
use crate::poly::{BackendKind, Poly};
use crate::scalar::Rational;

/// Monomial shape: a multiset of basis derivations and an increasing list
/// of module basis indices.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct RothKey {
    pub sym: Vec<usize>,
    pub ext: Vec<usize>,
}

impl RothKey {
    pub fn degree(&self) -> usize {
        2 * self.sym.len() + self.ext.len()
    }
}

/// Sorts `ext` in place, returning the permutation sign, or `None` on a
/// repeated index.
pub(crate) fn sort_ext(ext: &mut [usize]) -> Option<bool> {
    let mut neg = false;
    for i in 1..ext.len() {
        let mut j = i;
        while j > 0 && ext[j - 1] > ext[j] {
            ext.swap(j - 1, j);
            neg = !neg;
            j -= 1;
        }
    }
    if ext.windows(2).any(|w| w[0] == w[1]) {
        None
    } else {
        Some(neg)
    }
}

fn without_one(v: &[usize], x: usize) -> Vec<usize> {
    let mut out = v.to_vec();
    let pos = out.iter().position(|&y| y == x).expect("present");
    out.remove(pos);
    out
}

fn counts(v: &[usize]) -> Vec<(usize, i64)> {
    let mut out: Vec<(usize, i64)> = Vec::new();
    for &x in v {
        match out.last_mut() {
            Some((y, c)) if *y == x => *c += 1,
            _ => out.push((x, 1)),
        }
    }
    out
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RothElement {
    kind: BackendKind,
    rank: usize,
    terms: BTreeMap<RothKey, Poly>,
}

impl RothElement {
    pub fn zero(kind: BackendKind, rank: usize) -> Self {
        RothElement { kind, rank, terms: BTreeMap::new() }
    }

    pub fn scalar(kind: BackendKind, rank: usize, f: Poly) -> Self {
        let mut out = Self::zero(kind, rank);
        out.add_term(vec![], vec![], f);
        out
    }

    pub fn vector(x: &ModuleElement) -> Self {
        let mut out = Self::zero(x.kind(), x.rank());
        for (a, c) in x.coeffs().iter().enumerate() {
            out.add_term(vec![], vec![a], c.clone());
        }
        out
    }

    pub fn basis_vector(kind: BackendKind, rank: usize, a: usize) -> Self {
        let mut out = Self::zero(kind, rank);
        out.add_term(vec![], vec![a], Poly::one(kind));
        out
    }

    pub fn der_basis(kind: BackendKind, rank: usize, i: usize) -> Self {
        let mut out = Self::zero(kind, rank);
        out.add_term(vec![i], vec![], Poly::one(kind));
        out
    }

    pub fn der(d: &DerElement, rank: usize) -> Self {
        let mut out = Self::zero(d.kind(), rank);
        for (i, c) in d.comps().iter().enumerate() {
            out.add_term(vec![i], vec![], c.clone());
        }
        out
    }

    /// `sum_{a<b} rho[a][b] e_a ^ e_b`.
    pub fn bivector(kind: BackendKind, rank: usize, rho: &Bivector) -> Self {
        let mut out = Self::zero(kind, rank);
        for a in 0..rank {
            for b in a + 1..rank {
                out.add_term(vec![], vec![a, b], rho[a][b].clone());
            }
        }
        out
    }

    pub fn from_terms(kind: BackendKind, rank: usize, terms: impl IntoIterator<Item = (Vec<usize>, Vec<usize>, Poly)>) -> Result<Self> {
        let mut out = Self::zero(kind, rank);
        for (sym, ext, c) in terms {
            kind.check(c.kind())?;
            if sym.iter().any(|&i| i >= kind.num_gens()) || ext.iter().any(|&a| a >= rank) {
                return Err(Error::InvalidElement("index out of range".into()));
            }
            out.add_term(sym, ext, c);
        }
        Ok(out)
    }

    pub(crate) fn add_term(&mut self, mut sym: Vec<usize>, mut ext: Vec<usize>, coeff: Poly) {
        if coeff.is_zero() {
            return;
        }
        sym.sort_unstable();
        let mut coeff = coeff;
        if self.kind.is_dual() {
            // eps annihilates eps*d/deps, and its symmetric square maps to
            // zero among symmetric biderivations
            match sym.len() {
                0 => {}
                1 => coeff = coeff.mod_eps(),
                _ => return,
            }
            if coeff.is_zero() {
                return;
            }
        }
        let Some(neg) = sort_ext(&mut ext) else { return };
        if neg {
            coeff = -&coeff;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(RothKey { sym, ext }) {
            Entry::Vacant(v) => {
                v.insert(coeff);
            }
            Entry::Occupied(mut o) => {
                let s = o.get() + &coeff;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn kind(&self) -> BackendKind {
        self.kind
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn terms(&self) -> impl Iterator<Item = (&RothKey, &Poly)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, sym: &[usize], ext: &[usize]) -> Poly {
        self.terms
            .get(&RothKey { sym: sym.to_vec(), ext: ext.to_vec() })
            .cloned()
            .unwrap_or_else(|| Poly::zero(self.kind))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Degree if all terms share it; `None` for zero or mixed elements.
    pub fn degree(&self) -> Option<usize> {
        let mut it = self.terms.keys().map(RothKey::degree);
        let d = it.next()?;
        it.all(|e| e == d).then_some(d)
    }

    pub fn is_homogeneous_of(&self, r: usize) -> bool {
        self.terms.keys().all(|k| k.degree() == r)
    }

    pub fn part(&self, r: usize) -> RothElement {
        RothElement {
            kind: self.kind,
            rank: self.rank,
            terms: self.terms.iter().filter(|(k, _)| k.degree() == r).map(|(k, v)| (k.clone(), v.clone())).collect(),
        }
    }

    /// Largest total polynomial degree among coefficients.
    pub fn max_coeff_degree(&self) -> u32 {
        self.terms.values().filter_map(Poly::degree).max().unwrap_or(0)
    }

    pub(crate) fn check(&self, other: &RothElement) -> Result<()> {
        self.kind.check(other.kind)?;
        if self.rank != other.rank {
            return Err(Error::ModuleMismatch(format!("rank {} vs {}", self.rank, other.rank)));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &RothElement) -> Result<RothElement> {
        self.check(other)?;
        let mut out = self.clone();
        for (k, v) in &other.terms {
            out.add_term(k.sym.clone(), k.ext.clone(), v.clone());
        }
        Ok(out)
    }

    pub fn add(&self, other: &RothElement) -> RothElement {
        self.try_add(other).expect("module mismatch")
    }

    pub fn sub(&self, other: &RothElement) -> RothElement {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> RothElement {
        self.scale_q(&Rational::from_int(-1))
    }

    pub fn scale_q(&self, q: &Rational) -> RothElement {
        let mut out = Self::zero(self.kind, self.rank);
        for (k, v) in &self.terms {
            out.add_term(k.sym.clone(), k.ext.clone(), v.scale(q));
        }
        out
    }

    pub fn scale(&self, f: &Poly) -> RothElement {
        let mut out = Self::zero(self.kind, self.rank);
        for (k, v) in &self.terms {
            out.add_term(k.sym.clone(), k.ext.clone(), v * f);
        }
        out
    }

    pub fn try_wedge(&self, other: &RothElement) -> Result<RothElement> {
        self.check(other)?;
        let mut out = Self::zero(self.kind, self.rank);
        for (k1, v1) in &self.terms {
            for (k2, v2) in &other.terms {
                let mut sym = k1.sym.clone();
                sym.extend_from_slice(&k2.sym);
                let mut ext = k1.ext.clone();
                ext.extend_from_slice(&k2.ext);
                out.add_term(sym, ext, v1 * v2);
            }
        }
        Ok(out)
    }

    pub fn wedge(&self, other: &RothElement) -> RothElement {
        self.try_wedge(other).expect("module mismatch")
    }

    /// Applies `f` to every coefficient.
    pub fn map_coeffs(&self, f: impl Fn(&Poly) -> Poly) -> RothElement {
        let mut out = Self::zero(self.kind, self.rank);
        for (k, v) in &self.terms {
            out.add_term(k.sym.clone(), k.ext.clone(), f(v));
        }
        out
    }

    pub fn fmt(&self, m: &MetricModule) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let alg = m.algebra();
        let mut s = String::new();
        for (n, (k, v)) in self.terms.iter().enumerate() {
            let (neg, v) = if v.num_terms() == 1 && v.terms().next().is_some_and(|(_, c)| c.is_negative()) {
                (true, -v)
            } else {
                (false, v.clone())
            };
            if n > 0 {
                s.push_str(if neg { " - " } else { " + " });
            } else if neg {
                s.push('-');
            }
            let mut factors = Vec::new();
            let sym: Vec<String> = k.sym.iter().map(|&i| format!("d({})", alg.names()[i])).collect();
            if !sym.is_empty() {
                factors.push(sym.join("∨"));
            }
            let ext: Vec<String> = k.ext.iter().map(|&a| m.names()[a].clone()).collect();
            if !ext.is_empty() {
                factors.push(ext.join("∧"));
            }
            let coef = if v.num_terms() > 1 { format!("({})", alg.fmt(&v)) } else { alg.fmt(&v) };
            if factors.is_empty() {
                s.push_str(&coef);
            } else {
                if !v.is_one() {
                    let _ = write!(s, "{coef} * ");
                }
                s.push_str(&factors.join(" ⊗ "));
            }
        }
        s
    }
}

/// A metric module with a fixed metric connection, which determines the
/// Poisson bracket.
#[derive(Clone, Debug)]
pub struct RothsteinAlgebra {
    module: MetricModule,
    conn: Connection,
    curv: Curvature,
}

impl RothsteinAlgebra {
    pub fn new(module: MetricModule, conn: Connection) -> Result<Self> {
        let curv = Curvature::new(&conn, &module)?;
        Ok(RothsteinAlgebra { module, conn, curv })
    }

    /// Uses the metrization of the flat connection.
    pub fn with_default_connection(module: MetricModule) -> Result<Self> {
        let conn = Connection::flat(&module).metrize(&module);
        Self::new(module, conn)
    }

    pub fn module(&self) -> &MetricModule {
        &self.module
    }

    pub fn connection(&self) -> &Connection {
        &self.conn
    }

    pub fn curvature(&self) -> &Curvature {
        &self.curv
    }

    pub fn kind(&self) -> BackendKind {
        self.module.kind()
    }

    pub fn rank(&self) -> usize {
        self.module.rank()
    }

    pub fn zero(&self) -> RothElement {
        RothElement::zero(self.kind(), self.rank())
    }

    pub fn scalar(&self, f: Poly) -> RothElement {
        RothElement::scalar(self.kind(), self.rank(), f)
    }

    pub fn gen(&self, g: usize) -> RothElement {
        self.scalar(Poly::var(self.kind(), g))
    }

    pub fn e(&self, a: usize) -> RothElement {
        RothElement::basis_vector(self.kind(), self.rank(), a)
    }

    pub fn d(&self, i: usize) -> RothElement {
        RothElement::der_basis(self.kind(), self.rank(), i)
    }

    pub fn check(&self, x: &RothElement) -> Result<()> {
        self.kind().check(x.kind())?;
        if x.rank() != self.rank() {
            return Err(Error::ModuleMismatch(format!("element of rank {} in module of rank {}", x.rank(), self.rank())));
        }
        Ok(())
    }

    pub fn bracket(&self, phi: &RothElement, psi: &RothElement) -> Result<RothElement> {
        self.check(phi)?;
        self.check(psi)?;
        let mut out = self.zero();
        for (k1, f) in &phi.terms {
            for (k2, h) in &psi.terms {
                self.bracket_terms(&mut out, f, k1, h, k2);
            }
        }
        Ok(out)
    }

    fn bracket_terms(&self, out: &mut RothElement, f: &Poly, k1: &RothKey, h: &Poly, k2: &RothKey) {
        let m = &self.module;
        let (p, xi) = (&k1.sym, &k1.ext);
        let (q, eta) = (&k2.sym, &k2.ext);
        let cat = |a: &[usize], b: &[usize]| -> Vec<usize> { a.iter().chain(b).copied().collect() };
        let mut ext_xi_eta = xi.clone();
        ext_xi_eta.extend_from_slice(eta);

        // {f, D_j} = D_j(f)
        for &(j, mj) in &counts(q) {
            let c = &f.der_basis_apply(j) * h;
            out.add_term(cat(p, &without_one(q, j)), ext_xi_eta.clone(), c.scale(&Rational::from_int(mj)));
        }
        // {D_i, h} = -D_i(h)
        for &(i, mi) in &counts(p) {
            let c = f * &h.der_basis_apply(i);
            out.add_term(cat(&without_one(p, i), q), ext_xi_eta.clone(), c.scale(&Rational::from_int(-mi)));
        }
        // {D_i, D_j} = -r(D_i, D_j)
        if !self.kind().is_dual() {
            for &(i, mi) in &counts(p) {
                for &(j, mj) in &counts(q) {
                    let rho = self.curv.r(i, j);
                    let sym = cat(&without_one(p, i), &without_one(q, j));
                    let fh = (f * h).scale(&Rational::from_int(-mi * mj));
                    for a in 0..m.rank() {
                        for b in a + 1..m.rank() {
                            if !rho[a][b].is_zero() {
                                let mut ext = vec![a, b];
                                ext.extend_from_slice(&ext_xi_eta);
                                out.add_term(sym.clone(), ext, &fh * &rho[a][b]);
                            }
                        }
                    }
                }
            }
        }
        // {D_i, e_b} = -nabla_i e_b
        for &(i, mi) in &counts(p) {
            let sym = cat(&without_one(p, i), q);
            let fh = (f * h).scale(&Rational::from_int(-mi));
            for (l, &b) in eta.iter().enumerate() {
                for (c, g) in self.conn.christoffel(i, b).coeffs().iter().enumerate() {
                    if !g.is_zero() {
                        let mut ext = ext_xi_eta.clone();
                        ext[xi.len() + l] = c;
                        out.add_term(sym.clone(), ext, &fh * g);
                    }
                }
            }
        }
        // {e_a, D_j} = nabla_j e_a
        for &(j, mj) in &counts(q) {
            let sym = cat(p, &without_one(q, j));
            let fh = (f * h).scale(&Rational::from_int(mj));
            for (k, &a) in xi.iter().enumerate() {
                for (c, g) in self.conn.christoffel(j, a).coeffs().iter().enumerate() {
                    if !g.is_zero() {
                        let mut ext = ext_xi_eta.clone();
                        ext[k] = c;
                        out.add_term(sym.clone(), ext, &fh * g);
                    }
                }
            }
        }
        // {e_a, e_b} = <e_a, e_b>
        if !xi.is_empty() && !eta.is_empty() {
            let fh = f * h;
            let sym = cat(p, q);
            for (k, &a) in xi.iter().enumerate() {
                for (l, &b) in eta.iter().enumerate() {
                    let g = m.gram(a, b);
                    if g.is_zero() {
                        continue;
                    }
                    let neg = (xi.len() - k - 1 + l) % 2 == 1;
                    let mut ext: Vec<usize> = xi.iter().enumerate().filter(|&(t, _)| t != k).map(|(_, &v)| v).collect();
                    ext.extend(eta.iter().enumerate().filter(|&(t, _)| t != l).map(|(_, &v)| v));
                    let c = &fh * g;
                    out.add_term(sym.clone(), ext, if neg { -&c } else { c });
                }
            }
        }
    }

    /// The bracket of the derivation `D` viewed in degree 2 with `phi`.
    pub fn der_element(&self, d: &DerElement) -> RothElement {
        RothElement::der(d, self.rank())
    }

    /// `{{...{phi, l_1}, ...}, l_k}`.
    pub fn nested(&self, phi: &RothElement, letters: &[RothElement]) -> Result<RothElement> {
        let mut cur = phi.clone();
        for l in letters {
            if cur.is_zero() {
                break;
            }
            cur = self.bracket(&cur, l)?;
        }
        Ok(cur)
    }

    /// Push-forward along an isometric bijection into `target`.
    pub fn pushforward(&self, phi: &RothElement, iso: &ModuleIso, target: &RothsteinAlgebra) -> Result<RothElement> {
        self.check(phi)?;
        iso.require_isometric_bijection(&self.module, &target.module)?;
        let images: Vec<RothElement> = (0..self.rank()).map(|a| RothElement::vector(iso.image(a))).collect();
        let mut naive = target.zero();
        for (k, v) in &phi.terms {
            let mut t = target.scalar(iso.alg.apply(v));
            for &i in &k.sym {
                t = t.wedge(&target.d(iso.alg.push_der(i)));
            }
            for &a in &k.ext {
                t = t.wedge(&images[a]);
            }
            naive = naive.add(&t);
        }
        let transported = iso.transport_connection(&self.module, &self.conn, &target.module)?;
        let change = ConnectionChange::new(&target.module, &transported, &target.conn)?;
        Ok(change.apply(&naive))
    }
}

/// The derivation `t` of the Rothstein algebra induced by the difference
/// `T = nabla - nabla'` of two metric connections.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ConnectionChange {
    kind: BackendKind,
    rank: usize,
    t: Vec<Bivector>,
}

impl ConnectionChange {
    pub fn new(m: &MetricModule, from: &Connection, to: &Connection) -> Result<Self> {
        from.require_metric(m)?;
        to.require_metric(m)?;
        let t = (0..m.der_rank())
            .map(|i| {
                let t_of = |a: usize| -> ModuleElement {
                    let x = m.dual_basis(a);
                    from.nabla_basis(m, i, &x).sub(&to.nabla_basis(m, i, &x))
                };
                (0..m.rank())
                    .map(|a| {
                        let ta = t_of(a);
                        (0..m.rank()).map(|b| m.inner(&ta, &m.dual_basis(b)).unwrap()).collect()
                    })
                    .collect()
            })
            .collect();
        Ok(ConnectionChange { kind: m.kind(), rank: m.rank(), t })
    }

    pub fn tables(&self) -> &[Bivector] {
        &self.t
    }

    pub fn is_zero(&self) -> bool {
        self.t.iter().flatten().flatten().all(Poly::is_zero)
    }

    /// One application of the derivation `D_i -> t_i`.
    pub fn apply_t(&self, phi: &RothElement) -> RothElement {
        let mut out = RothElement::zero(self.kind, self.rank);
        for (k, v) in &phi.terms {
            for &(i, mi) in &counts(&k.sym) {
                let rest = without_one(&k.sym, i);
                let c = v.scale(&Rational::from_int(mi));
                for a in 0..self.rank {
                    for b in a + 1..self.rank {
                        let r = &self.t[i][a][b];
                        if !r.is_zero() {
                            let mut ext = vec![a, b];
                            ext.extend_from_slice(&k.ext);
                            out.add_term(rest.clone(), ext, &c * r);
                        }
                    }
                }
            }
        }
        out
    }

    /// `exp(t) = sum t^n / n!`; the series stops once the symmetric degree is used up.
    pub fn apply(&self, phi: &RothElement) -> RothElement {
        let mut out = phi.clone();
        let mut cur = phi.clone();
        let mut n = 1i64;
        loop {
            cur = self.apply_t(&cur).scale_q(&Rational::new(1, n));
            if cur.is_zero() {
                return out;
            }
            out = out.add(&cur);
            n += 1;
        }
    }
}

/// Parses `coef * d(x)∨d(y) ⊗ e1∧e3 + ...`. Juxtaposition separators
/// `*`, `∨`, `⊗`, `∧` all denote the wedge product; over the dual numbers
/// `d(eps)` stands for `eps d/deps`.
pub fn parse_roth(m: &MetricModule, s: &str) -> Result<RothElement> {
    let mut p = RParser { m, text: s, pos: 0 };
    let out = p.expr()?;
    p.skip_ws();
    if p.pos != s.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(out)
}

struct RParser<'a> {
    m: &'a MetricModule,
    text: &'a str,
    pos: usize,
}

impl RParser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse { pos: self.pos, msg: format!("{msg} in {:?}", self.text) }
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.text[self.pos..].chars().next() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.text[self.pos..].chars().next()
    }

    fn bump(&mut self) {
        if let Some(c) = self.text[self.pos..].chars().next() {
            self.pos += c.len_utf8();
        }
    }

    fn zero(&self) -> RothElement {
        RothElement::zero(self.m.kind(), self.m.rank())
    }

    fn expr(&mut self) -> Result<RothElement> {
        let mut acc = self.zero();
        let mut neg = false;
        match self.peek() {
            Some('-') => {
                neg = true;
                self.bump();
            }
            Some('+') => self.bump(),
            _ => {}
        }
        loop {
            let t = self.term()?;
            acc = acc.add(&if neg { t.neg() } else { t });
            match self.peek() {
                Some('+') => {
                    neg = false;
                    self.bump();
                }
                Some('-') => {
                    neg = true;
                    self.bump();
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<RothElement> {
        let mut acc = self.factor()?;
        while matches!(self.peek(), Some('*' | '∨' | '⊗' | '∧')) {
            self.bump();
            acc = acc.wedge(&self.factor()?);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<RothElement> {
        let base = self.atom()?;
        if self.peek() == Some('^') {
            self.bump();
            self.skip_ws();
            let start = self.pos;
            while self.text[self.pos..].starts_with(|c: char| c.is_ascii_digit()) {
                self.pos += 1;
            }
            let e: u32 = self.text[start..self.pos].parse().map_err(|_| self.err("expected exponent"))?;
            let mut out = RothElement::scalar(self.m.kind(), self.m.rank(), Poly::one(self.m.kind()));
            for _ in 0..e {
                out = out.wedge(&base);
            }
            return Ok(out);
        }
        Ok(base)
    }

    fn ident(&mut self) -> String {
        let start = self.pos;
        while let Some(c) = self.text[self.pos..].chars().next() {
            if c.is_alphanumeric() || c == '_' {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
        self.text[start..self.pos].to_string()
    }

    fn atom(&mut self) -> Result<RothElement> {
        let kind = self.m.kind();
        let rank = self.m.rank();
        match self.peek() {
            Some('(') => {
                self.bump();
                let e = self.expr()?;
                if self.peek() != Some(')') {
                    return Err(self.err("expected ')'"));
                }
                self.bump();
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.text[self.pos..].starts_with(|c: char| c.is_ascii_digit() || c == '/') {
                    self.pos += 1;
                }
                let q: Rational = self.text[start..self.pos].parse().map_err(|_| {
                    Error::Parse { pos: start, msg: format!("bad rational in {:?}", self.text) }
                })?;
                Ok(RothElement::scalar(kind, rank, Poly::constant(kind, q)))
            }
            Some(_) => {
                let start = self.pos;
                let name = self.ident();
                if name.is_empty() {
                    return Err(self.err("unexpected character"));
                }
                if name == "d" && self.text[self.pos..].starts_with('(') {
                    self.bump();
                    self.skip_ws();
                    let var = self.ident();
                    self.skip_ws();
                    if !self.text[self.pos..].starts_with(')') {
                        return Err(self.err("expected ')'"));
                    }
                    self.bump();
                    let i = self.m.algebra().gen_index(&var).ok_or_else(|| Error::Parse {
                        pos: start,
                        msg: format!("unknown variable {var:?} in {:?}", self.text),
                    })?;
                    return Ok(RothElement::der_basis(kind, rank, i));
                }
                if let Some(a) = self.m.basis_index(&name) {
                    return Ok(RothElement::basis_vector(kind, rank, a));
                }
                if let Some(g) = self.m.algebra().gen_index(&name) {
                    return Ok(RothElement::scalar(kind, rank, Poly::var(kind, g)));
                }
                Err(Error::Parse { pos: start, msg: format!("unknown name {name:?} in {:?}", self.text) })
            }
            None => Err(self.err("unexpected end of input")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Algebra;

    fn hyperbolic_xy() -> RothsteinAlgebra {
        let m = MetricModule::constant(Algebra::free_poly(&["x", "y"]).unwrap(), &[vec![0, 1], vec![1, 0]]).unwrap();
        RothsteinAlgebra::new(m.clone(), Connection::flat(&m)).unwrap()
    }

    #[test]
    fn wedge_of_disjoint_factors() {
        let r = hyperbolic_xy();
        let m = r.module();
        assert_eq!(r.d(0).wedge(&r.e(0)), parse_roth(m, "d(x) ⊗ e1").unwrap());
        assert!(r.e(0).wedge(&r.e(0)).is_zero());
        let lhs = r.d(0).wedge(&r.e(0)).wedge(&r.d(0).wedge(&r.e(1)));
        assert_eq!(lhs, parse_roth(m, "d(x)∨d(x) ⊗ e1∧e2").unwrap());
    }

    #[test]
    fn generator_brackets() {
        let r = hyperbolic_xy();
        let m = r.module();
        assert!(r.bracket(&r.e(0), &r.e(1)).unwrap() == r.scalar(Poly::one(r.kind())));
        let x2 = parse_roth(m, "x^2").unwrap();
        assert_eq!(r.bracket(&r.d(0), &x2).unwrap(), parse_roth(m, "-2*x").unwrap());
        assert!(r.bracket(&r.d(0), &r.d(1)).unwrap().is_zero());
    }

    #[test]
    fn exterior_swap_sign() {
        let r = hyperbolic_xy();
        assert_eq!(r.e(1).wedge(&r.e(0)), r.e(0).wedge(&r.e(1)).neg());
    }

    #[test]
    fn display_round_trip() {
        let r = hyperbolic_xy();
        let m = r.module();
        let phi = parse_roth(m, "(x + 2*y) * d(x)∨d(y) ⊗ e1 - 3/2 * e1∧e2 + y").unwrap();
        assert_eq!(parse_roth(m, &phi.fmt(m)).unwrap(), phi);
    }

    #[test]
    fn dual_symmetric_square_vanishes() {
        let m = MetricModule::constant(Algebra::dual_num(), &[vec![1]]).unwrap();
        let r = RothsteinAlgebra::new(m.clone(), Connection::flat(&m)).unwrap();
        assert!(r.d(0).wedge(&r.d(0)).is_zero());
        assert!(parse_roth(&m, "eps * d(eps)").unwrap().is_zero());
    }

    #[test]
    fn unchanged_under_trivial_connection_change() {
        let r = hyperbolic_xy();
        let t = ConnectionChange::new(r.module(), r.connection(), r.connection()).unwrap();
        let phi = parse_roth(r.module(), "x * d(x)∨d(y) ⊗ e1 + e1∧e2").unwrap();
        assert_eq!(t.apply(&phi), phi);
    }
}
