//! Derivations of the coefficient algebra and symmetric multiderivations.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::poly::{BackendKind, Poly};

/// A derivation in normal form. Over `Q[x_1..x_n]` the components are the
/// coefficients of `d/dx_i`; over the dual numbers there is a single
/// rational coefficient of `eps d/deps`, stored as a constant polynomial.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct DerElement {
    kind: BackendKind,
    comps: Vec<Poly>,
}

/// Number of basis derivations for a backend.
pub fn der_rank(kind: BackendKind) -> usize {
    kind.num_gens()
}

impl DerElement {
    pub fn new(kind: BackendKind, comps: Vec<Poly>) -> Result<Self> {
        if comps.len() != der_rank(kind) {
            return Err(Error::Arity { expected: der_rank(kind), got: comps.len() });
        }
        for c in &comps {
            kind.check(c.kind())?;
        }
        let comps = if kind.is_dual() { comps.iter().map(Poly::mod_eps).collect() } else { comps };
        Ok(DerElement { kind, comps })
    }

    pub fn zero(kind: BackendKind) -> Self {
        DerElement { kind, comps: vec![Poly::zero(kind); der_rank(kind)] }
    }

    /// The `i`-th basis derivation.
    pub fn basis(kind: BackendKind, i: usize) -> Self {
        let mut d = Self::zero(kind);
        d.comps[i] = Poly::one(kind);
        d
    }

    /// The derivation with the given values on the algebra generators.
    pub fn from_gen_values(kind: BackendKind, values: &[Poly]) -> Result<Self> {
        match kind {
            BackendKind::FreePoly(_) => Self::new(kind, values.to_vec()),
            BackendKind::DualNum => {
                let v = &values[0];
                if !v.constant_term().is_zero() {
                    return Err(Error::InvalidElement(
                        "a derivation of the dual numbers maps eps into (eps)".into(),
                    ));
                }
                let c = v.gen_derivative(0).constant_term();
                Self::new(kind, vec![Poly::constant(kind, c)])
            }
        }
    }

    pub fn kind(&self) -> BackendKind {
        self.kind
    }

    pub fn comps(&self) -> &[Poly] {
        &self.comps
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(Poly::is_zero)
    }

    pub fn apply(&self, a: &Poly) -> Result<Poly> {
        self.kind.check(a.kind())?;
        let mut out = Poly::zero(self.kind);
        for (i, c) in self.comps.iter().enumerate() {
            if !c.is_zero() {
                out = &out + &(c * &a.der_basis_apply(i));
            }
        }
        Ok(out)
    }

    /// Value on the `g`-th algebra generator.
    pub fn on_gen(&self, g: usize) -> Poly {
        self.apply(&Poly::var(self.kind, g)).expect("same backend")
    }

    pub fn add(&self, other: &DerElement) -> Result<DerElement> {
        self.kind.check(other.kind)?;
        let comps = self.comps.iter().zip(&other.comps).map(|(a, b)| a + b).collect();
        Self::new(self.kind, comps)
    }

    pub fn scale(&self, a: &Poly) -> Result<DerElement> {
        self.kind.check(a.kind())?;
        Self::new(self.kind, self.comps.iter().map(|c| a * c).collect())
    }

    pub fn commutator(&self, other: &DerElement) -> Result<DerElement> {
        self.kind.check(other.kind)?;
        let vals: Vec<Poly> = (0..self.kind.num_gens())
            .map(|g| {
                let a = self.apply(&other.on_gen(g)).expect("same backend");
                let b = other.apply(&self.on_gen(g)).expect("same backend");
                &a - &b
            })
            .collect();
        Self::from_gen_values(self.kind, &vals)
    }
}

/// A symmetric multiderivation, stored by its values on sorted tuples of
/// algebra generators.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SymMultiDerivation {
    kind: BackendKind,
    arity: usize,
    table: BTreeMap<Vec<usize>, Poly>,
}

impl SymMultiDerivation {
    pub fn new(kind: BackendKind, arity: usize, entries: Vec<(Vec<usize>, Poly)>) -> Result<Self> {
        let mut table = BTreeMap::new();
        for (mut key, v) in entries {
            if key.len() != arity {
                return Err(Error::Arity { expected: arity, got: key.len() });
            }
            if key.iter().any(|&g| g >= kind.num_gens()) {
                return Err(Error::MalformedTable("generator index out of range".into()));
            }
            kind.check(v.kind())?;
            key.sort_unstable();
            if let Some(old) = table.get(&key) {
                if old != &v {
                    return Err(Error::MalformedTable(format!("asymmetric values at {key:?}")));
                }
            }
            if !v.is_zero() {
                table.insert(key, v);
            }
        }
        Ok(SymMultiDerivation { kind, arity, table })
    }

    /// The image of `D_1 v ... v D_p` in symmetric multiderivations.
    pub fn from_sym_product(ders: &[DerElement]) -> Result<Self> {
        let kind = ders.first().map(|d| d.kind()).ok_or(Error::Arity { expected: 1, got: 0 })?;
        let p = ders.len();
        let n = kind.num_gens();
        let mut entries = Vec::new();
        for key in sorted_tuples(n, p) {
            let mut acc = Poly::zero(kind);
            for perm in permutations(p) {
                let mut term = Poly::one(kind);
                for (slot, &k) in perm.iter().enumerate() {
                    term = &term * &ders[k].on_gen(key[slot]);
                }
                acc = &acc + &term;
            }
            entries.push((key, acc));
        }
        Self::new(kind, p, entries)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn is_zero(&self) -> bool {
        self.table.is_empty()
    }

    pub fn eval(&self, args: &[Poly]) -> Result<Poly> {
        if args.len() != self.arity {
            return Err(Error::Arity { expected: self.arity, got: args.len() });
        }
        for a in args {
            self.kind.check(a.kind())?;
        }
        let mut out = Poly::zero(self.kind);
        for (key, v) in &self.table {
            // sum over the distinct orderings of the sorted key
            let mut seen = std::collections::BTreeSet::new();
            for perm in permutations(self.arity) {
                let gens: Vec<usize> = perm.iter().map(|&k| key[k]).collect();
                if !seen.insert(gens.clone()) {
                    continue;
                }
                let mut term = v.clone();
                for (slot, &g) in gens.iter().enumerate() {
                    term = &term * &args[slot].gen_derivative(g);
                    if term.is_zero() {
                        break;
                    }
                }
                out = &out + &term;
            }
        }
        Ok(out)
    }
}

pub(crate) fn sorted_tuples(n: usize, p: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for g in start..n {
            cur.push(g);
            rec(g, n, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, p, &mut Vec::new(), &mut out);
    out
}

pub(crate) fn permutations(p: usize) -> Vec<Vec<usize>> {
    fn rec(cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                rec(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; p], &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Algebra;

    #[test]
    fn coordinate_derivations_commute() {
        let k = BackendKind::FreePoly(2);
        let c = DerElement::basis(k, 0).commutator(&DerElement::basis(k, 1)).unwrap();
        assert!(c.is_zero());
    }

    #[test]
    fn commutator_of_euler_and_partial() {
        let a = Algebra::free_poly(&["x"]).unwrap();
        let x = a.gen(0);
        let xdx = DerElement::basis(a.kind(), 0).scale(&x).unwrap();
        let dx = DerElement::basis(a.kind(), 0);
        let c = xdx.commutator(&dx).unwrap();
        assert_eq!(c, DerElement::basis(a.kind(), 0).scale(&a.parse_poly("-1").unwrap()).unwrap());
    }

    #[test]
    fn derivation_kills_one() {
        let a = Algebra::free_poly(&["x", "y"]).unwrap();
        let d = DerElement::new(a.kind(), vec![a.parse_poly("x*y").unwrap(), a.parse_poly("3").unwrap()]).unwrap();
        assert!(d.apply(&a.one()).unwrap().is_zero());
    }

    #[test]
    fn eps_multiple_of_dual_derivation_is_zero() {
        let a = Algebra::dual_num();
        let d = DerElement::new(a.kind(), vec![a.gen(0)]).unwrap();
        assert!(d.is_zero());
    }

    #[test]
    fn biderivation_of_dual_numbers() {
        let a = Algebra::dual_num();
        let eps = a.gen(0);
        let p = SymMultiDerivation::new(a.kind(), 2, vec![(vec![0, 0], eps.clone())]).unwrap();
        assert_eq!(p.eval(&[eps.clone(), eps.clone()]).unwrap(), eps);
        assert!(p.eval(&[a.one(), eps.clone()]).unwrap().is_zero());
        assert!(p.eval(&[eps.clone(), &eps * &eps]).unwrap().is_zero());
        let sym = SymMultiDerivation::from_sym_product(&[DerElement::basis(a.kind(), 0), DerElement::basis(a.kind(), 0)]).unwrap();
        assert!(sym.is_zero());
    }

    #[test]
    fn sym_product_on_free_polys() {
        let a = Algebra::free_poly(&["x"]).unwrap();
        let dx = DerElement::basis(a.kind(), 0);
        let p = SymMultiDerivation::from_sym_product(&[dx.clone(), dx]).unwrap();
        let x = a.gen(0);
        assert_eq!(p.eval(&[x.clone(), x]).unwrap(), a.parse_poly("2").unwrap());
    }
}
