//! Sparse multivariate polynomials over the rationals, for the two supported
//! coefficient algebras: the free polynomial ring `Q[x_1..x_n]` and the dual
//! numbers `Q[eps]/(eps^2)`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::scalar::Rational;

/// Which coefficient algebra a value lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BackendKind {
    FreePoly(usize),
    DualNum,
}

impl BackendKind {
    /// Number of algebra generators (variables, or the single `eps`).
    pub fn num_gens(self) -> usize {
        match self {
            BackendKind::FreePoly(n) => n,
            BackendKind::DualNum => 1,
        }
    }

    pub fn is_dual(self) -> bool {
        matches!(self, BackendKind::DualNum)
    }

    pub(crate) fn check(self, other: BackendKind) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::BackendMismatch(format!("{self:?}"), format!("{other:?}")))
        }
    }
}

/// Exponent vector, ordered graded-lexicographically.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Mono(pub SmallVec<[u32; 4]>);

impl Mono {
    pub fn one(nvars: usize) -> Self {
        Mono(SmallVec::from_elem(0, nvars))
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    fn mul(&self, other: &Mono) -> Mono {
        Mono(self.0.iter().zip(other.0.iter()).map(|(a, b)| a + b).collect())
    }
}

impl Ord for Mono {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A polynomial in normal form: no zero coefficients, and over the dual
/// numbers no exponent above one.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    kind: BackendKind,
    terms: BTreeMap<Mono, Rational>,
}

fn nvars(kind: BackendKind) -> usize {
    kind.num_gens()
}

impl Poly {
    pub fn zero(kind: BackendKind) -> Self {
        Poly { kind, terms: BTreeMap::new() }
    }

    pub fn one(kind: BackendKind) -> Self {
        Self::constant(kind, Rational::one())
    }

    pub fn constant(kind: BackendKind, c: Rational) -> Self {
        let mut p = Self::zero(kind);
        if !c.is_zero() {
            p.terms.insert(Mono::one(nvars(kind)), c);
        }
        p
    }

    pub fn from_int(kind: BackendKind, n: i64) -> Self {
        Self::constant(kind, Rational::from_int(n))
    }

    /// The `i`-th generator.
    pub fn var(kind: BackendKind, i: usize) -> Self {
        assert!(i < nvars(kind), "generator index out of range");
        let mut m = Mono::one(nvars(kind));
        m.0[i] = 1;
        Self::monomial(kind, m, Rational::one())
    }

    pub fn monomial(kind: BackendKind, mono: Mono, c: Rational) -> Self {
        assert_eq!(mono.0.len(), nvars(kind));
        let mut p = Self::zero(kind);
        if !c.is_zero() && !(kind.is_dual() && mono.0[0] > 1) {
            p.terms.insert(mono, c);
        }
        p
    }

    pub fn kind(&self) -> BackendKind {
        self.kind
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.constant_term().is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Mono::is_one)
    }

    pub fn constant_term(&self) -> Rational {
        self.terms
            .get(&Mono::one(nvars(self.kind)))
            .cloned()
            .unwrap_or_default()
    }

    pub fn as_constant(&self) -> Option<Rational> {
        self.is_constant().then(|| self.constant_term())
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(Mono::degree).max()
    }

    fn add_term(&mut self, m: Mono, c: Rational) {
        if c.is_zero() || (self.kind.is_dual() && m.0[0] > 1) {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn try_add(&self, other: &Poly) -> Result<Poly> {
        self.kind.check(other.kind)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Poly) -> Result<Poly> {
        self.kind.check(other.kind)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c);
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &Poly) -> Result<Poly> {
        self.kind.check(other.kind)?;
        let mut out = Poly::zero(self.kind);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.kind);
        }
        Poly {
            kind: self.kind,
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut out = Poly::one(self.kind);
        for _ in 0..e {
            out = &out * self;
        }
        out
    }

    /// Formal partial derivative with respect to generator `g`. Every
    /// derivation `D` satisfies `D(f) = sum_g gen_derivative(f, g) * D(x_g)`.
    pub fn gen_derivative(&self, g: usize) -> Poly {
        let mut out = Poly::zero(self.kind);
        for (m, c) in &self.terms {
            let e = m.0[g];
            if e > 0 {
                let mut m2 = m.clone();
                m2.0[g] -= 1;
                out.add_term(m2, c * &Rational::from_int(e as i64));
            }
        }
        out
    }

    /// Applies the `i`-th basis derivation: `d/dx_i` for free polynomials,
    /// `eps d/deps` for the dual numbers.
    pub fn der_basis_apply(&self, i: usize) -> Poly {
        match self.kind {
            BackendKind::FreePoly(_) => self.gen_derivative(i),
            BackendKind::DualNum => {
                let c1 = self.gen_derivative(0).constant_term();
                Poly::monomial(self.kind, Mono(SmallVec::from_elem(1, 1)), c1)
            }
        }
    }

    /// Value of the basis derivation `i` on generator `g`.
    pub fn der_on_gen(kind: BackendKind, i: usize, g: usize) -> Poly {
        Poly::var(kind, g).der_basis_apply(i)
    }

    /// Renames variables: `x_i -> x_{perm[i]}`.
    pub fn permute_vars(&self, perm: &[usize]) -> Poly {
        let mut out = Poly::zero(self.kind);
        for (m, c) in &self.terms {
            let mut m2 = Mono::one(nvars(self.kind));
            for (i, &e) in m.0.iter().enumerate() {
                m2.0[perm[i]] = e;
            }
            out.add_term(m2, c.clone());
        }
        out
    }

    /// For the dual numbers, the part surviving multiplication into an
    /// `eps`-annihilated module (the constant term). Identity otherwise.
    pub fn mod_eps(&self) -> Poly {
        match self.kind {
            BackendKind::DualNum => Poly::constant(self.kind, self.constant_term()),
            BackendKind::FreePoly(_) => self.clone(),
        }
    }

    /// Multiplicative inverse if the polynomial is a unit.
    pub fn unit_inverse(&self) -> Option<Poly> {
        match self.kind {
            BackendKind::FreePoly(_) => {
                let c = self.as_constant()?.recip()?;
                Some(Poly::constant(self.kind, c))
            }
            BackendKind::DualNum => {
                let a0 = self.constant_term().recip()?;
                let a1 = self.gen_derivative(0).constant_term();
                let eps = Poly::var(self.kind, 0);
                Some(&Poly::constant(self.kind, a0.clone()) - &eps.scale(&(&(&a1 * &a0) * &a0)))
            }
        }
    }

    pub fn display<'a>(&'a self, names: &'a [String]) -> PolyDisplay<'a> {
        PolyDisplay { p: self, names }
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        self.try_add(rhs).expect("backend mismatch in polynomial addition")
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self.try_sub(rhs).expect("backend mismatch in polynomial subtraction")
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        self.try_mul(rhs).expect("backend mismatch in polynomial multiplication")
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(&Rational::from_int(-1))
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = default_names(self.kind);
        write!(f, "{}", self.display(&names))
    }
}

pub struct PolyDisplay<'a> {
    p: &'a Poly,
    names: &'a [String],
}

impl fmt::Display for PolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.p.is_zero() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.p.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            let mut factors: Vec<String> = Vec::new();
            if !abs.is_one() || m.is_one() {
                factors.push(abs.to_string());
            }
            for (i, &e) in m.0.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(self.names[i].clone()),
                    _ => factors.push(format!("{}^{}", self.names[i], e)),
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

pub(crate) fn default_names(kind: BackendKind) -> Vec<String> {
    match kind {
        BackendKind::FreePoly(n) => (1..=n).map(|i| format!("x{i}")).collect(),
        BackendKind::DualNum => vec!["eps".to_string()],
    }
}

/// A coefficient algebra together with the names of its generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Algebra {
    kind: BackendKind,
    names: Vec<String>,
}

impl Algebra {
    pub fn free_poly<S: AsRef<str>>(names: &[S]) -> Result<Self> {
        let names: Vec<String> = names.iter().map(|s| s.as_ref().to_string()).collect();
        for (i, n) in names.iter().enumerate() {
            let valid = n.chars().next().is_some_and(|c| c.is_alphabetic() || c == '_')
                && n.chars().all(|c| c.is_alphanumeric() || c == '_');
            if !valid {
                return Err(Error::Parse { pos: 0, msg: format!("invalid variable name {n:?}") });
            }
            if names[..i].contains(n) {
                return Err(Error::Parse { pos: 0, msg: format!("duplicate variable name {n:?}") });
            }
        }
        Ok(Algebra { kind: BackendKind::FreePoly(names.len()), names })
    }

    /// `Q[x_1..x_n]` with default variable names.
    pub fn free(n: usize) -> Self {
        let kind = BackendKind::FreePoly(n);
        Algebra { kind, names: default_names(kind) }
    }

    pub fn dual_num() -> Self {
        Algebra { kind: BackendKind::DualNum, names: vec!["eps".to_string()] }
    }

    pub fn kind(&self) -> BackendKind {
        self.kind
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn num_gens(&self) -> usize {
        self.kind.num_gens()
    }

    pub fn gen(&self, i: usize) -> Poly {
        Poly::var(self.kind, i)
    }

    pub fn zero(&self) -> Poly {
        Poly::zero(self.kind)
    }

    pub fn one(&self) -> Poly {
        Poly::one(self.kind)
    }

    pub fn constant(&self, c: Rational) -> Poly {
        Poly::constant(self.kind, c)
    }

    pub fn gen_index(&self, name: &str) -> Option<usize> {
        if self.kind.is_dual() && (name == "eps" || name == "ε") {
            return Some(0);
        }
        self.names.iter().position(|n| n == name)
    }

    pub fn fmt(&self, p: &Poly) -> String {
        p.display(&self.names).to_string()
    }

    /// All monomials of total degree at most `d` (over the dual numbers only
    /// `1` and `eps` exist).
    pub fn monomials_up_to(&self, d: u32) -> Vec<Poly> {
        let n = self.num_gens();
        let mut out = Vec::new();
        let mut cur = vec![0u32; n];
        fn rec(i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
            if i == cur.len() {
                out.push(cur.clone());
                return;
            }
            for e in 0..=left {
                cur[i] = e;
                rec(i + 1, left - e, cur, out);
            }
            cur[i] = 0;
        }
        let mut exps = Vec::new();
        let cap = if self.kind.is_dual() { d.min(1) } else { d };
        rec(0, cap, &mut cur, &mut exps);
        exps.sort_by_key(|e| Mono(e.iter().copied().collect()));
        for e in exps {
            out.push(Poly::monomial(self.kind, Mono(e.into_iter().collect()), Rational::one()));
        }
        out
    }

    /// Parses `c1*x^2*y + c2` style text with rational coefficients `p/q`.
    pub fn parse_poly(&self, s: &str) -> Result<Poly> {
        let mut p = Parser { alg: self, s: s.as_bytes(), pos: 0, text: s };
        p.skip_ws();
        let out = p.expr()?;
        p.skip_ws();
        if p.pos != p.s.len() {
            return Err(p.err("unexpected trailing input"));
        }
        Ok(out)
    }
}

struct Parser<'a> {
    alg: &'a Algebra,
    s: &'a [u8],
    text: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse { pos: self.pos, msg: format!("{msg} in {:?}", self.text) }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Poly> {
        let kind = self.alg.kind;
        let mut acc = Poly::zero(kind);
        let mut sign = 1i64;
        match self.peek() {
            Some(b'-') => {
                sign = -1;
                self.pos += 1;
            }
            Some(b'+') => self.pos += 1,
            _ => {}
        }
        loop {
            let t = self.term()?;
            acc = &acc + &t.scale(&Rational::from_int(sign));
            match self.peek() {
                Some(b'+') => {
                    sign = 1;
                    self.pos += 1;
                }
                Some(b'-') => {
                    sign = -1;
                    self.pos += 1;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Poly> {
        let mut acc = self.factor()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            let f = self.factor()?;
            acc = &acc * &f;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Poly> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let e = self.uint()?;
            let e: u32 = e.parse().map_err(|_| self.err("exponent too large"))?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn uint(&mut self) -> Result<String> {
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected a number"));
        }
        Ok(self.text[start..self.pos].to_string())
    }

    fn atom(&mut self) -> Result<Poly> {
        let kind = self.alg.kind;
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let num = self.uint()?;
                let mut den = "1".to_string();
                if self.peek() == Some(b'/') {
                    self.pos += 1;
                    self.skip_ws();
                    den = self.uint()?;
                }
                let q: Rational = format!("{num}/{den}").parse().map_err(|_| self.err("bad rational"))?;
                Ok(Poly::constant(kind, q))
            }
            Some(_) => {
                let start = self.pos;
                let rest = &self.text[start..];
                let len: usize = rest
                    .char_indices()
                    .take_while(|(_, c)| c.is_alphanumeric() || *c == '_')
                    .map(|(_, c)| c.len_utf8())
                    .sum();
                if len == 0 {
                    return Err(self.err("unexpected character"));
                }
                let name = &rest[..len];
                self.pos += len;
                match self.alg.gen_index(name) {
                    Some(i) => Ok(Poly::var(kind, i)),
                    None => {
                        self.pos = start;
                        Err(self.err(&format!("unknown variable {name:?}")))
                    }
                }
            }
            None => Err(self.err("unexpected end of input")),
        }
    }
}
