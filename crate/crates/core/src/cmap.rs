//! Quasi-Courant brackets `C^r(E)`.
//!
//! An element of degree `r` is stored through its whole symbol tower: the
//! entry at `(gens, args)` is the nested bracket
//! `[[..[[C, x_g1], .., x_gp], e_a1], .., e_ak]` in `A`, with `2p + k = r`.
//! Level 0 holds `<C(e_a1, .., e_a(r-1)), e_ar>`, level 1 the symbol on
//! generators, and higher levels the iterated symbols. Values on arbitrary
//! module elements are recovered from these with the swap and derivation
//! rules.

use std::collections::BTreeMap;

use crate::der::{sorted_tuples, DerElement};
use crate::error::{Error, Result};
use crate::iso::ModuleIso;
use crate::module::{MetricModule, ModuleElement};
use crate::poly::{BackendKind, Poly};
use crate::scalar::Rational;

/// Largest `r + s` accepted by [`bracket`] and [`wedge`].
pub const MAX_PAIR_DEGREE: usize = 12;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct TowerKey {
    pub gens: Vec<usize>,
    pub args: Vec<usize>,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Letter {
    Gen(usize),
    Vec(usize),
}

impl Letter {
    fn weight(self) -> isize {
        match self {
            Letter::Gen(_) => 2,
            Letter::Vec(_) => 1,
        }
    }

    fn odd(self) -> bool {
        matches!(self, Letter::Vec(_))
    }
}

fn key_of(word: &[Letter]) -> TowerKey {
    let mut gens = Vec::new();
    let mut args = Vec::new();
    for l in word {
        match *l {
            Letter::Gen(g) => gens.push(g),
            Letter::Vec(a) => args.push(a),
        }
    }
    gens.sort_unstable();
    TowerKey { gens, args }
}

fn all_tuples(rank: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..rank).map(move |a| {
                    let mut t = t.clone();
                    t.push(a);
                    t
                })
            })
            .collect();
    }
    out
}

/// Every canonical tower key of degree `r`.
pub fn canonical_keys(ngens: usize, rank: usize, r: usize) -> Vec<TowerKey> {
    let mut out = Vec::new();
    for p in 0..=r / 2 {
        for gens in sorted_tuples(ngens, p) {
            for args in all_tuples(rank, r - 2 * p) {
                out.push(TowerKey { gens: gens.clone(), args });
            }
        }
    }
    out
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CMapElement {
    kind: BackendKind,
    rank: usize,
    degree: usize,
    entries: BTreeMap<TowerKey, Poly>,
}

impl CMapElement {
    pub fn zero(m: &MetricModule, r: usize) -> Self {
        CMapElement { kind: m.kind(), rank: m.rank(), degree: r, entries: BTreeMap::new() }
    }

    pub fn scalar(m: &MetricModule, a: Poly) -> Self {
        let mut out = Self::zero(m, 0);
        out.set(TowerKey { gens: vec![], args: vec![] }, a);
        out
    }

    pub fn vector(m: &MetricModule, x: &ModuleElement) -> Self {
        let mut out = Self::zero(m, 1);
        for (b, v) in m.pairings(x).into_iter().enumerate() {
            out.set(TowerKey { gens: vec![], args: vec![b] }, v);
        }
        out
    }

    fn set(&mut self, key: TowerKey, v: Poly) {
        if v.is_zero() {
            self.entries.remove(&key);
        } else {
            self.entries.insert(key, v);
        }
    }

    /// Builds an element from tower entries `(gens, args, value)`; missing
    /// entries are zero.
    pub fn from_entries(m: &MetricModule, r: usize, entries: impl IntoIterator<Item = (Vec<usize>, Vec<usize>, Poly)>) -> Result<Self> {
        let mut out = Self::zero(m, r);
        for (mut gens, args, v) in entries {
            m.kind().check(v.kind())?;
            if 2 * gens.len() + args.len() != r {
                return Err(Error::MalformedTable(format!(
                    "entry with {} generators and {} arguments does not fit degree {r}",
                    gens.len(),
                    args.len()
                )));
            }
            if gens.iter().any(|&g| g >= m.algebra().num_gens()) || args.iter().any(|&a| a >= m.rank()) {
                return Err(Error::MalformedTable("index out of range".into()));
            }
            gens.sort_unstable();
            let key = TowerKey { gens, args };
            if out.entries.contains_key(&key) {
                return Err(Error::MalformedTable(format!("duplicate entry {key:?}")));
            }
            out.set(key, v);
        }
        Ok(out)
    }

    /// Builds an element of degree 2 or 3 from its value table on basis
    /// tuples and its symbol table.
    pub fn from_tables(
        m: &MetricModule,
        r: usize,
        values: impl Fn(&[usize]) -> ModuleElement,
        symbol: impl Fn(&[usize]) -> DerElement,
    ) -> Result<Self> {
        if !(2..=3).contains(&r) {
            return Err(Error::Unsupported(format!(
                "value and symbol tables determine elements of degree 2 and 3 only, not {r}; give tower entries instead"
            )));
        }
        let mut entries = Vec::new();
        for args in all_tuples(m.rank(), r - 1) {
            let v = values(&args);
            m.check_elem(&v)?;
            for (b, p) in m.pairings(&v).into_iter().enumerate() {
                let mut a = args.clone();
                a.push(b);
                entries.push((vec![], a, p));
            }
        }
        for args in all_tuples(m.rank(), r - 2) {
            let s = symbol(&args);
            m.kind().check(s.kind())?;
            for g in 0..m.algebra().num_gens() {
                entries.push((vec![g], args.clone(), s.on_gen(g)));
            }
        }
        Self::from_entries(m, r, entries)
    }

    /// Builds the tower of the map `f` (taking `r - 1` arguments) from its
    /// values alone, recovering symbols through the fullness witness.
    pub fn from_evaluator(m: &MetricModule, r: usize, f: impl Fn(&[ModuleElement]) -> ModuleElement) -> Result<Self> {
        if r < 2 {
            return Err(Error::Degree("evaluators describe elements of degree >= 2".into()));
        }
        let form = |xs: &[ModuleElement]| -> Poly {
            let (last, init) = xs.split_last().expect("r >= 2");
            m.inner(&f(init), last).expect("module elements")
        };
        let (u0, v0) = m.fullness_witness().remove(0);
        // pi^(p)(gens)(xs): each generator a = <a u0, v0> expands into two insertions
        fn level(gens: &[usize], xs: Vec<ModuleElement>, u0: &ModuleElement, v0: &ModuleElement, form: &dyn Fn(&[ModuleElement]) -> Poly) -> Poly {
            match gens.split_last() {
                None => form(&xs),
                Some((&g, rest)) => {
                    let u = u0.scale(&Poly::var(u0.kind(), g));
                    let mut a = xs.clone();
                    a.push(u.clone());
                    a.push(v0.clone());
                    let mut b = xs;
                    b.push(v0.clone());
                    b.push(u);
                    &level(rest, a, u0, v0, form) + &level(rest, b, u0, v0, form)
                }
            }
        }
        let mut entries = Vec::new();
        for key in canonical_keys(m.algebra().num_gens(), m.rank(), r) {
            let xs: Vec<ModuleElement> = key.args.iter().map(|&a| m.basis(a)).collect();
            let v = level(&key.gens, xs, &u0, &v0, &form);
            entries.push((key.gens, key.args, v));
        }
        Self::from_entries(m, r, entries)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn kind(&self) -> BackendKind {
        self.kind
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn entries(&self) -> impl Iterator<Item = (&TowerKey, &Poly)> {
        self.entries.iter()
    }

    pub fn entry(&self, gens: &[usize], args: &[usize]) -> Poly {
        let mut g = gens.to_vec();
        g.sort_unstable();
        self.entries
            .get(&TowerKey { gens: g, args: args.to_vec() })
            .cloned()
            .unwrap_or_else(|| Poly::zero(self.kind))
    }

    fn entry_ref(&self, key: &TowerKey) -> Option<&Poly> {
        self.entries.get(key)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn max_coeff_degree(&self) -> u32 {
        self.entries.values().filter_map(Poly::degree).max().unwrap_or(0)
    }

    pub(crate) fn check(&self, m: &MetricModule) -> Result<()> {
        self.kind.check(m.kind())?;
        if self.rank != m.rank() {
            return Err(Error::ModuleMismatch(format!("element of rank {} in module of rank {}", self.rank, m.rank())));
        }
        Ok(())
    }

    fn check_pair(&self, other: &CMapElement) -> Result<()> {
        self.kind.check(other.kind)?;
        if self.rank != other.rank {
            return Err(Error::ModuleMismatch(format!("rank {} vs {}", self.rank, other.rank)));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &CMapElement) -> Result<CMapElement> {
        self.check_pair(other)?;
        if self.degree != other.degree && !self.is_zero() && !other.is_zero() {
            return Err(Error::Degree(format!("cannot add degrees {} and {}", self.degree, other.degree)));
        }
        let mut out = if self.is_zero() { CMapElement { degree: other.degree, ..self.clone() } } else { self.clone() };
        for (k, v) in &other.entries {
            let s = match out.entries.get(k) {
                Some(x) => x + v,
                None => v.clone(),
            };
            out.set(k.clone(), s);
        }
        Ok(out)
    }

    pub fn add(&self, other: &CMapElement) -> CMapElement {
        self.try_add(other).expect("compatible elements")
    }

    pub fn sub(&self, other: &CMapElement) -> CMapElement {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> CMapElement {
        self.scale_q(&Rational::from_int(-1))
    }

    pub fn scale_q(&self, q: &Rational) -> CMapElement {
        let mut out = CMapElement { entries: BTreeMap::new(), ..self.clone() };
        for (k, v) in &self.entries {
            out.set(k.clone(), v.scale(q));
        }
        out
    }

    /// Module structure `a C`, which is also `a ^ C`.
    pub fn scale(&self, a: &Poly) -> CMapElement {
        let mut out = CMapElement { entries: BTreeMap::new(), ..self.clone() };
        for (k, v) in &self.entries {
            out.set(k.clone(), v * a);
        }
        out
    }

    /// Value on basis vectors, `C(e_a1, .., e_a(r-1))`.
    pub fn value(&self, m: &MetricModule, args: &[usize]) -> ModuleElement {
        let vals: Vec<Poly> = (0..m.rank())
            .map(|b| {
                let mut a = args.to_vec();
                a.push(b);
                self.entry(&[], &a)
            })
            .collect();
        m.from_pairings(&vals)
    }

    /// Symbol on basis vectors, `sigma_C(e_a1, .., e_a(r-2))`.
    pub fn symbol(&self, m: &MetricModule, args: &[usize]) -> Result<DerElement> {
        let vals: Vec<Poly> = (0..m.algebra().num_gens()).map(|g| self.entry(&[g], args)).collect();
        DerElement::from_gen_values(m.kind(), &vals)
    }

    /// `d_C(e_a1, ..) x_g` as a module element.
    pub fn d_map(&self, m: &MetricModule, args: &[usize], g: usize) -> ModuleElement {
        let vals: Vec<Poly> = (0..m.rank())
            .map(|b| {
                let mut a = args.to_vec();
                a.push(b);
                self.entry(&[g], &a)
            })
            .collect();
        m.from_pairings(&vals)
    }

    /// The level element `delta^(p)(x_g1, .., x_gp)` of degree `r - 2p`.
    pub fn level_element(&self, gens: &[usize]) -> CMapElement {
        let mut g0 = gens.to_vec();
        g0.sort_unstable();
        let r = self.degree - 2 * gens.len();
        let mut out = CMapElement { degree: r, entries: BTreeMap::new(), ..self.clone() };
        for (k, v) in &self.entries {
            let mut rest = k.gens.clone();
            let ok = g0.iter().all(|g| match rest.iter().position(|x| x == g) {
                Some(i) => {
                    rest.remove(i);
                    true
                }
                None => false,
            });
            if ok && 2 * rest.len() + k.args.len() == r {
                out.set(TowerKey { gens: rest, args: k.args.clone() }, v.clone());
            }
        }
        out
    }

    /// Evaluates the level-`p` form `pi^(p)(gens)(args)` on arbitrary module
    /// elements.
    pub fn eval_form(&self, m: &MetricModule, gens: &[usize], args: &[ModuleElement]) -> Result<Poly> {
        self.check(m)?;
        if 2 * gens.len() + args.len() != self.degree {
            return Err(Error::Arity { expected: self.degree - 2 * gens.len(), got: args.len() });
        }
        for x in args {
            m.check_elem(x)?;
        }
        let mut g = gens.to_vec();
        g.sort_unstable();
        let slots: Vec<Vec<(Poly, usize)>> = args
            .iter()
            .map(|x| {
                let mut s = Vec::new();
                for (a, c) in x.coeffs().iter().enumerate() {
                    for (mono, q) in c.terms() {
                        s.push((Poly::monomial(m.kind(), mono.clone(), q.clone()), a));
                    }
                }
                s
            })
            .collect();
        let mut acc = Poly::zero(m.kind());
        let mut cur = Vec::with_capacity(slots.len());
        self.expand(m, &g, &slots, &mut cur, &mut acc);
        Ok(acc)
    }

    fn expand(&self, m: &MetricModule, gens: &[usize], slots: &[Vec<(Poly, usize)>], cur: &mut Vec<(Poly, usize)>, acc: &mut Poly) {
        if cur.len() == slots.len() {
            *acc = &*acc + &self.ev(m, gens, cur);
            return;
        }
        for t in &slots[cur.len()] {
            cur.push(t.clone());
            self.expand(m, gens, slots, cur, acc);
            cur.pop();
        }
    }

    fn ev(&self, m: &MetricModule, gens: &[usize], slots: &[(Poly, usize)]) -> Poly {
        let kind = m.kind();
        let mut scalar = Rational::one();
        let mut s: Vec<(Poly, usize)> = Vec::with_capacity(slots.len());
        for (c, a) in slots {
            match c.as_constant() {
                Some(q) => {
                    if q.is_zero() {
                        return Poly::zero(kind);
                    }
                    scalar *= q;
                    s.push((Poly::one(kind), *a));
                }
                None => s.push((c.clone(), *a)),
            }
        }
        let Some(j) = s.iter().rposition(|(c, _)| !c.is_constant()) else {
            let key = TowerKey { gens: gens.to_vec(), args: s.iter().map(|(_, a)| *a).collect() };
            return self.entry_ref(&key).map_or_else(|| Poly::zero(kind), |v| v.scale(&scalar));
        };
        if j + 1 == s.len() {
            let f = std::mem::replace(&mut s[j].0, Poly::one(kind));
            return (&f * &self.ev(m, gens, &s)).scale(&scalar);
        }
        // y_j y_{j+1} -> -y_{j+1} y_j + (derivative of <y_j, y_{j+1}>) at the next level
        let pairing = &s[j].0 * m.gram(s[j].1, s[j + 1].1);
        let mut swapped = s.clone();
        swapped.swap(j, j + 1);
        let mut res = -&self.ev(m, gens, &swapped);
        if !pairing.is_zero() {
            let rest: Vec<(Poly, usize)> = s.iter().enumerate().filter(|&(t, _)| t != j && t != j + 1).map(|(_, v)| v.clone()).collect();
            for h in 0..m.algebra().num_gens() {
                let dh = pairing.gen_derivative(h);
                if dh.is_zero() {
                    continue;
                }
                let mut g2 = gens.to_vec();
                g2.push(h);
                g2.sort_unstable();
                res = &res + &(&dh * &self.ev(m, &g2, &rest));
            }
        }
        res.scale(&scalar)
    }

    /// `C(x_1, .., x_(r-1))` on arbitrary module elements.
    pub fn eval(&self, m: &MetricModule, args: &[ModuleElement]) -> Result<ModuleElement> {
        if self.degree == 0 {
            return Err(Error::Degree("elements of degree 0 are not maps".into()));
        }
        if args.len() + 1 != self.degree {
            return Err(Error::Arity { expected: self.degree - 1, got: args.len() });
        }
        let vals = (0..m.rank())
            .map(|b| {
                let mut a = args.to_vec();
                a.push(m.basis(b));
                self.eval_form(m, &[], &a)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(m.from_pairings(&vals))
    }

    /// The scalar of a degree-0 element.
    pub fn as_scalar(&self) -> Option<Poly> {
        (self.degree == 0).then(|| self.entry(&[], &[]))
    }

    /// The module element of a degree-1 element.
    pub fn as_vector(&self, m: &MetricModule) -> Option<ModuleElement> {
        (self.degree == 1).then(|| self.value(m, &[]))
    }

    /// `i_x C`, inserting `x` in the first argument.
    pub fn insert(&self, m: &MetricModule, x: &ModuleElement) -> Result<CMapElement> {
        if self.degree < 2 {
            return Err(Error::Degree(format!("cannot insert into an element of degree {}", self.degree)));
        }
        m.check_elem(x)?;
        let r = self.degree - 1;
        let mut out = CMapElement { degree: r, entries: BTreeMap::new(), ..self.clone() };
        for key in canonical_keys(m.algebra().num_gens(), m.rank(), r) {
            let mut args = vec![x.clone()];
            args.extend(key.args.iter().map(|&a| m.basis(a)));
            let v = self.eval_form(m, &key.gens, &args)?;
            out.set(key, v);
        }
        Ok(out)
    }

    pub fn fmt(&self, m: &MetricModule) -> String {
        let alg = m.algebra();
        let mut parts = Vec::new();
        for (k, v) in &self.entries {
            let gens: Vec<&str> = k.gens.iter().map(|&g| alg.names()[g].as_str()).collect();
            let args: Vec<&str> = k.args.iter().map(|&a| m.names()[a].as_str()).collect();
            parts.push(format!("[{}; {}] = {}", gens.join(","), args.join(","), alg.fmt(v)));
        }
        format!("degree {} {{{}}}", self.degree, parts.join(", "))
    }
}

fn word_entry<'a>(c: &'a CMapElement, word: &[Letter]) -> Option<&'a Poly> {
    c.entry_ref(&key_of(word))
}

fn bracket_value(
    m: &MetricModule,
    c1: &CMapElement,
    c2: &CMapElement,
    w1: &mut Vec<Letter>,
    w2: &mut Vec<Letter>,
    rest: &[Letter],
    d1: isize,
    d2: isize,
) -> Poly {
    let kind = m.kind();
    let Some((&l, tail)) = rest.split_first() else {
        return match (d1, d2) {
            (1, 1) => {
                let mut acc = Poly::zero(kind);
                for b in 0..m.rank() {
                    w1.push(Letter::Vec(b));
                    let p1 = word_entry(c1, w1).cloned();
                    w1.pop();
                    let Some(p1) = p1 else { continue };
                    for c in 0..m.rank() {
                        let gi = m.ginv(b, c);
                        if gi.is_zero() {
                            continue;
                        }
                        w2.push(Letter::Vec(c));
                        if let Some(p2) = word_entry(c2, w2) {
                            acc = &acc + &(&(&p1 * gi) * p2);
                        }
                        w2.pop();
                    }
                }
                acc
            }
            (2, 0) => sigma_on(m, c1, w1, word_entry(c2, w2)),
            (0, 2) => -&sigma_on(m, c2, w2, word_entry(c1, w1)),
            _ => Poly::zero(kind),
        };
    };
    let wl = l.weight();
    let mut acc = Poly::zero(kind);
    if d1 - wl >= 0 {
        w1.push(l);
        let v = bracket_value(m, c1, c2, w1, w2, tail, d1 - wl, d2);
        w1.pop();
        acc = if l.odd() && d2 % 2 == 1 { &acc - &v } else { &acc + &v };
    }
    if d2 - wl >= 0 {
        w2.push(l);
        let v = bracket_value(m, c1, c2, w1, w2, tail, d1, d2 - wl);
        w2.pop();
        acc = &acc + &v;
    }
    acc
}

/// `sigma_D(a)` for the degree-2 element reached by `word` from `c`.
fn sigma_on(m: &MetricModule, c: &CMapElement, word: &mut Vec<Letter>, a: Option<&Poly>) -> Poly {
    let kind = m.kind();
    let Some(a) = a else { return Poly::zero(kind) };
    let mut acc = Poly::zero(kind);
    for g in 0..m.algebra().num_gens() {
        let da = a.gen_derivative(g);
        if da.is_zero() {
            continue;
        }
        word.push(Letter::Gen(g));
        if let Some(s) = word_entry(c, word) {
            acc = &acc + &(&da * s);
        }
        word.pop();
    }
    acc
}

fn word_of(key: &TowerKey) -> Vec<Letter> {
    key.gens.iter().map(|&g| Letter::Gen(g)).chain(key.args.iter().map(|&a| Letter::Vec(a))).collect()
}

/// The graded Lie bracket of degree -2.
pub fn bracket(m: &MetricModule, c1: &CMapElement, c2: &CMapElement) -> Result<CMapElement> {
    c1.check(m)?;
    c2.check(m)?;
    let (r, s) = (c1.degree, c2.degree);
    if r + s > MAX_PAIR_DEGREE {
        return Err(Error::Degree(format!("bracket of degrees {r} and {s} exceeds the supported total {MAX_PAIR_DEGREE}")));
    }
    if r + s < 2 {
        return Ok(CMapElement::zero(m, 0));
    }
    let n = r + s - 2;
    let mut out = CMapElement::zero(m, n);
    if c1.is_zero() || c2.is_zero() {
        return Ok(out);
    }
    for key in canonical_keys(m.algebra().num_gens(), m.rank(), n) {
        let word = word_of(&key);
        let v = bracket_value(m, c1, c2, &mut Vec::new(), &mut Vec::new(), &word, r as isize, s as isize);
        out.set(key, v);
    }
    Ok(out)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum WedgeMode {
    Recursive,
    Shuffle,
}

fn wedge_value(c1: &CMapElement, c2: &CMapElement, w1: &mut Vec<Letter>, w2: &mut Vec<Letter>, rest: &[Letter], d1: isize, d2: isize, kind: BackendKind) -> Poly {
    let Some((&l, tail)) = rest.split_first() else {
        if d1 != 0 || d2 != 0 {
            return Poly::zero(kind);
        }
        return match (word_entry(c1, w1), word_entry(c2, w2)) {
            (Some(a), Some(b)) => a * b,
            _ => Poly::zero(kind),
        };
    };
    let wl = l.weight();
    let mut acc = Poly::zero(kind);
    if d1 - wl >= 0 {
        w1.push(l);
        let v = wedge_value(c1, c2, w1, w2, tail, d1 - wl, d2, kind);
        w1.pop();
        acc = if l.odd() && d2 % 2 == 1 { &acc - &v } else { &acc + &v };
    }
    if d2 - wl >= 0 {
        w2.push(l);
        let v = wedge_value(c1, c2, w1, w2, tail, d1, d2 - wl, kind);
        w2.pop();
        acc = &acc + &v;
    }
    acc
}

/// Shuffles of `0..n` into a first block of size `p` (increasing) and the
/// rest (increasing), with their signs.
fn shuffles(n: usize, p: usize) -> Vec<(Vec<usize>, Vec<usize>, bool)> {
    let mut out = Vec::new();
    for first in sorted_subsets(n, p) {
        let second: Vec<usize> = (0..n).filter(|i| !first.contains(i)).collect();
        let mut inversions = 0usize;
        for &a in &first {
            inversions += second.iter().filter(|&&b| b < a).count();
        }
        out.push((first, second, inversions % 2 == 1));
    }
    out
}

fn sorted_subsets(n: usize, p: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, p, &mut Vec::new(), &mut out);
    out
}

/// Level-0 form of `c1 ^ c2` on basis vectors `args` (length `r + s`) by
/// the closed shuffle formula.
fn shuffle_form(c1: &CMapElement, c2: &CMapElement, args: &[usize], kind: BackendKind) -> Poly {
    let (r, s) = (c1.degree, c2.degree);
    if r == 0 {
        return &c1.entry(&[], &[]) * &c2.entry(&[], args);
    }
    if s == 0 {
        return &c2.entry(&[], &[]) * &c1.entry(&[], args);
    }
    let (xs, last) = args.split_at(r + s - 1);
    let mut acc = Poly::zero(kind);
    let pick = |idx: &[usize]| -> Vec<usize> { idx.iter().map(|&i| xs[i]).collect() };
    let mut first_sum = Poly::zero(kind);
    for (a, b, neg) in shuffles(r + s - 1, r) {
        let mut tail = pick(&b);
        tail.push(last[0]);
        let t = &c1.entry(&[], &pick(&a)) * &c2.entry(&[], &tail);
        first_sum = if neg { &first_sum - &t } else { &first_sum + &t };
    }
    if (r * s) % 2 == 1 {
        first_sum = -&first_sum;
    }
    acc = &acc + &first_sum;
    for (a, b, neg) in shuffles(r + s - 1, s) {
        let mut tail = pick(&b);
        tail.push(last[0]);
        let t = &c2.entry(&[], &pick(&a)) * &c1.entry(&[], &tail);
        acc = if neg { &acc - &t } else { &acc + &t };
    }
    acc
}

/// The graded commutative product.
pub fn wedge(m: &MetricModule, c1: &CMapElement, c2: &CMapElement, mode: WedgeMode) -> Result<CMapElement> {
    c1.check(m)?;
    c2.check(m)?;
    let (r, s) = (c1.degree, c2.degree);
    if r + s > MAX_PAIR_DEGREE {
        return Err(Error::Degree(format!("wedge of degrees {r} and {s} exceeds the supported total {MAX_PAIR_DEGREE}")));
    }
    let n = r + s;
    let mut out = CMapElement::zero(m, n);
    if c1.is_zero() || c2.is_zero() {
        return Ok(out);
    }
    let kind = m.kind();
    for key in canonical_keys(m.algebra().num_gens(), m.rank(), n) {
        let v = match mode {
            WedgeMode::Recursive => {
                let word = word_of(&key);
                wedge_value(c1, c2, &mut Vec::new(), &mut Vec::new(), &word, r as isize, s as isize, kind)
            }
            WedgeMode::Shuffle => {
                // generators distribute as a derivation, then the closed formula on levels
                let p = key.gens.len();
                let mut acc = Poly::zero(kind);
                for mask in 0..(1usize << p) {
                    let g1: Vec<usize> = (0..p).filter(|i| mask >> i & 1 == 1).map(|i| key.gens[i]).collect();
                    let g2: Vec<usize> = (0..p).filter(|i| mask >> i & 1 == 0).map(|i| key.gens[i]).collect();
                    if 2 * g1.len() > r || 2 * g2.len() > s {
                        continue;
                    }
                    let l1 = c1.level_element(&g1);
                    let l2 = c2.level_element(&g2);
                    if l1.degree + l2.degree != key.args.len() {
                        continue;
                    }
                    acc = &acc + &shuffle_form(&l1, &l2, &key.args, kind);
                }
                acc
            }
        };
        out.set(key, v);
    }
    Ok(out)
}

/// Push-forward `Phi_* C = Phi o C o (Phi^{-1} x ...)` along an isometric bijection.
pub fn pushforward(source: &MetricModule, c: &CMapElement, iso: &ModuleIso, target: &MetricModule) -> Result<CMapElement> {
    c.check(source)?;
    iso.require_isometric_bijection(source, target)?;
    let inv_alg = iso.alg.inverse();
    let mut out = CMapElement::zero(target, c.degree);
    for key in canonical_keys(target.algebra().num_gens(), target.rank(), c.degree) {
        let gens: Vec<usize> = key.gens.iter().map(|&g| inv_alg.perm()[g]).collect();
        let args = key.args.iter().map(|&a| iso.apply_inv(&target.basis(a))).collect::<Result<Vec<_>>>()?;
        let v = c.eval_form(source, &gens, &args)?;
        out.set(key, iso.alg.apply(&v));
    }
    Ok(out)
}

/// Outcome of [`verify`].
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct VerifyReport {
    pub ok: bool,
    /// Largest monomial degree used in probe arguments.
    pub depth: u32,
    pub basis_checks: usize,
    pub probe_checks: usize,
    pub violation: Option<String>,
}

/// Default probe depth `2 (max coefficient degree + 1)`.
pub fn default_depth(c: &CMapElement) -> u32 {
    2 * (c.max_coeff_degree() + 1)
}

/// Upper bound on probe evaluations per identity family.
const PROBE_BUDGET: usize = 4000;

/// Checks the defining identities of `C^r(E)`: the swap identity at every
/// adjacent position of every tower level (the last position is the
/// metricity condition), first on basis vectors and then on monomial
/// multiples of basis vectors up to degree `depth` in two slots.
pub fn verify(m: &MetricModule, c: &CMapElement, depth: Option<u32>) -> Result<VerifyReport> {
    c.check(m)?;
    let depth = depth.unwrap_or_else(|| default_depth(c));
    let mut report = VerifyReport { ok: true, depth, basis_checks: 0, probe_checks: 0, violation: None };
    let ngens = m.algebra().num_gens();
    let r = c.degree;
    let fail = |report: &mut VerifyReport, msg: String| {
        report.ok = false;
        report.violation = Some(msg);
    };
    for k in c.entries.keys() {
        if 2 * k.gens.len() + k.args.len() != r {
            fail(&mut report, format!("malformed entry {k:?}"));
            return Ok(report);
        }
    }
    if m.kind().is_dual() {
        for (k, v) in &c.entries {
            if !k.gens.is_empty() && !v.constant_term().is_zero() {
                fail(&mut report, format!("symbol value at generators {:?}, arguments {:?} is not a derivation of the dual numbers", k.gens, k.args));
                return Ok(report);
            }
        }
    }
    let names = |args: &[usize]| -> String { args.iter().map(|&a| m.names()[a].clone()).collect::<Vec<_>>().join(",") };
    // basis-level swap identities
    for p in 0..=r / 2 {
        let k = r - 2 * p;
        if k < 2 {
            continue;
        }
        for gens in sorted_tuples(ngens, p) {
            for args in all_tuples(m.rank(), k) {
                for i in 0..k - 1 {
                    report.basis_checks += 1;
                    let mut sw = args.clone();
                    sw.swap(i, i + 1);
                    let lhs = &c.entry(&gens, &args) + &c.entry(&gens, &sw);
                    let pairing = m.gram(args[i], args[i + 1]);
                    let rest: Vec<usize> = args.iter().enumerate().filter(|&(t, _)| t != i && t != i + 1).map(|(_, &v)| v).collect();
                    let mut rhs = Poly::zero(m.kind());
                    for h in 0..ngens {
                        let dh = pairing.gen_derivative(h);
                        if !dh.is_zero() {
                            let mut g2 = gens.clone();
                            g2.push(h);
                            rhs = &rhs + &(&dh * &c.entry(&g2, &rest));
                        }
                    }
                    if lhs != rhs {
                        let what = if p == 0 && i + 2 == k { "metricity" } else { "swap" };
                        fail(&mut report, format!("{what} identity fails at level {p}, position {i}, arguments ({})", names(&args)));
                        return Ok(report);
                    }
                }
            }
        }
    }
    // probes with monomial coefficients in two slots
    let monos = m.algebra().monomials_up_to(depth);
    let mut cases: Vec<(usize, Vec<usize>, Vec<usize>, usize)> = Vec::new();
    for p in 0..=r / 2 {
        let k = r - 2 * p;
        if k < 2 {
            continue;
        }
        for gens in sorted_tuples(ngens, p) {
            for args in all_tuples(m.rank(), k) {
                for i in 0..k - 1 {
                    cases.push((p, gens.clone(), args.clone(), i));
                }
            }
        }
    }
    let pairs: Vec<(usize, usize)> = (0..monos.len()).flat_map(|a| (0..monos.len()).map(move |b| (a, b))).filter(|&(a, b)| a + b > 0).collect();
    let total = cases.len() * pairs.len();
    let stride = total.div_ceil(PROBE_BUDGET).max(1);
    let mut idx = 0usize;
    for (p, gens, args, i) in &cases {
        let k = args.len();
        for &(a, b) in &pairs {
            idx += 1;
            if !idx.is_multiple_of(stride) {
                continue;
            }
            report.probe_checks += 1;
            let mut xs: Vec<ModuleElement> = args.iter().map(|&t| m.basis(t)).collect();
            xs[*i] = xs[*i].scale(&monos[a]);
            xs[*i + 1] = xs[*i + 1].scale(&monos[b]);
            let mut sw = xs.clone();
            sw.swap(*i, i + 1);
            let lhs = &c.eval_form(m, gens, &xs)? + &c.eval_form(m, gens, &sw)?;
            let pairing = m.inner(&xs[*i], &xs[i + 1])?;
            let rest: Vec<ModuleElement> = xs.iter().enumerate().filter(|&(t, _)| t != *i && t != i + 1).map(|(_, v)| v.clone()).collect();
            let mut rhs = Poly::zero(m.kind());
            for h in 0..ngens {
                let dh = pairing.gen_derivative(h);
                if !dh.is_zero() {
                    let mut g2 = gens.clone();
                    g2.push(h);
                    rhs = &rhs + &(&dh * &c.eval_form(m, &g2, &rest)?);
                }
            }
            // the last slot must be A-linear as well
            let lin_ok = if i + 2 == k {
                let mut ys = xs.clone();
                let f = monos[b].clone();
                ys[i + 1] = m.basis(args[i + 1]);
                c.eval_form(m, gens, &xs)? == &f * &c.eval_form(m, gens, &ys)?
            } else {
                true
            };
            if lhs != rhs || !lin_ok {
                let (ma, mb) = (m.algebra().fmt(&monos[a]), m.algebra().fmt(&monos[b]));
                fail(
                    &mut report,
                    format!("identity fails on probe at level {p}, position {i}, arguments ({}) with coefficients {ma}, {mb}", names(args)),
                );
                return Ok(report);
            }
        }
    }
    Ok(report)
}

/// Forms `omega_C(x_1, .., x_r) = <C(x_1, .., x_(r-1)), x_r>` together with
/// their iterated symbols; shares the tower layout of [`CMapElement`].
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CForm {
    inner: CMapElement,
}

impl CForm {
    pub fn degree(&self) -> usize {
        self.inner.degree
    }

    /// `omega(e_a1, .., e_ar)`.
    pub fn value(&self, args: &[usize]) -> Poly {
        self.inner.entry(&[], args)
    }

    /// `sigma_omega(e_a1, .., e_a(r-2))` on the generator `x_g`.
    pub fn symbol_on_gen(&self, args: &[usize], g: usize) -> Poly {
        self.inner.entry(&[g], args)
    }

    pub fn eval(&self, m: &MetricModule, args: &[ModuleElement]) -> Result<Poly> {
        self.inner.eval_form(m, &[], args)
    }
}

pub fn to_form(c: &CMapElement) -> CForm {
    CForm { inner: c.clone() }
}

/// Rebuilds the map from a form, rejecting forms that violate the defining identities.
pub fn from_form(m: &MetricModule, w: &CForm) -> Result<CMapElement> {
    let report = verify(m, &w.inner, None)?;
    if !report.ok {
        return Err(Error::MalformedTable(report.violation.unwrap_or_default()));
    }
    Ok(w.inner.clone())
}

/// The levels `pi^(p)` for `0 <= 2p <= r`, each indexed by sorted generator tuples.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SymbolTower {
    pub levels: Vec<BTreeMap<Vec<usize>, CMapElement>>,
}

impl SymbolTower {
    pub fn level(&self, p: usize, gens: &[usize]) -> Option<&CMapElement> {
        let mut g = gens.to_vec();
        g.sort_unstable();
        self.levels.get(p)?.get(&g)
    }
}

/// Extracts the tower and checks that each level is the symbol of the previous one.
pub fn symbol_tower(m: &MetricModule, c: &CMapElement) -> Result<SymbolTower> {
    let report = verify(m, c, None)?;
    if !report.ok {
        return Err(Error::MalformedTable(format!("symbol extraction inconsistent: {}", report.violation.unwrap_or_default())));
    }
    let ngens = m.algebra().num_gens();
    let levels = (0..=c.degree / 2)
        .map(|p| sorted_tuples(ngens, p).into_iter().map(|g| (g.clone(), c.level_element(&g))).collect())
        .collect();
    Ok(SymbolTower { levels })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Algebra;

    fn so3() -> (MetricModule, CMapElement) {
        let m = MetricModule::constant(Algebra::free(0), &[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]).unwrap();
        let mut entries = Vec::new();
        for (a, b, c) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
            entries.push((vec![], vec![a, b, c], Poly::one(m.kind())));
            entries.push((vec![], vec![b, a, c], Poly::from_int(m.kind(), -1)));
        }
        let c = CMapElement::from_entries(&m, 3, entries).unwrap();
        (m, c)
    }

    #[test]
    fn cross_product_values() {
        let (m, c) = so3();
        assert_eq!(c.eval(&m, &[m.basis(0), m.basis(1)]).unwrap(), m.basis(2));
        assert!(verify(&m, &c, None).unwrap().ok);
        assert_eq!(to_form(&c).value(&[0, 1, 2]), Poly::one(m.kind()));
    }

    #[test]
    fn pairing_times_vector_is_not_quasi_courant() {
        let m = MetricModule::constant(Algebra::free_poly(&["x"]).unwrap(), &[vec![0, 1], vec![1, 0]]).unwrap();
        let k = m.kind();
        let c = CMapElement::from_tables(&m, 3, |a| m.basis(0).scale(m.gram(a[0], a[1])), |_| DerElement::zero(k)).unwrap();
        let rep = verify(&m, &c, None).unwrap();
        assert!(!rep.ok);
        assert!(rep.violation.unwrap().contains("identity fails"));
    }

    #[test]
    fn bracket_of_vectors_is_pairing() {
        let m = MetricModule::constant(Algebra::free_poly(&["x"]).unwrap(), &[vec![0, 1], vec![1, 0]]).unwrap();
        let x = CMapElement::vector(&m, &m.basis(0));
        let y = CMapElement::vector(&m, &m.basis(1).scale(&m.algebra().gen(0)));
        assert_eq!(bracket(&m, &x, &y).unwrap().as_scalar().unwrap(), m.algebra().gen(0));
    }

    #[test]
    fn wedge_of_scalar_and_vector() {
        let m = MetricModule::constant(Algebra::free_poly(&["x"]).unwrap(), &[vec![0, 1], vec![1, 0]]).unwrap();
        let a = CMapElement::scalar(&m, m.algebra().gen(0));
        let x = CMapElement::vector(&m, &m.basis(1));
        for mode in [WedgeMode::Recursive, WedgeMode::Shuffle] {
            let w = wedge(&m, &a, &x, mode).unwrap();
            assert_eq!(w.as_vector(&m).unwrap(), m.basis(1).scale(&m.algebra().gen(0)));
        }
    }

    #[test]
    fn wedge_of_vectors_inserted() {
        let m = MetricModule::constant(Algebra::free_poly(&["x"]).unwrap(), &[vec![0, 1], vec![1, 0]]).unwrap();
        let x = m.basis(0).add(&m.basis(1).scale(&m.algebra().gen(0)));
        let y = m.basis(1);
        let xy = wedge(&m, &CMapElement::vector(&m, &x), &CMapElement::vector(&m, &y), WedgeMode::Recursive).unwrap();
        for z in [m.basis(0), m.basis(1), m.basis(0).scale(&m.algebra().gen(0))] {
            let got = xy.insert(&m, &z).unwrap().as_vector(&m).unwrap();
            let want = y.scale(&-&m.inner(&x, &z).unwrap()).add(&x.scale(&m.inner(&y, &z).unwrap()));
            assert_eq!(got, want);
        }
    }

    #[test]
    fn so3_jacobi_via_bracket() {
        let (m, c) = so3();
        assert!(bracket(&m, &c, &c).unwrap().is_zero());
    }
}
