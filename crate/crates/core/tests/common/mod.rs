#![allow(dead_code)]

use std::collections::BTreeMap;

use courant_cas::cmap::{canonical_keys, CMapElement};
use courant_cas::linalg::{nullspace, SparseVec};
use courant_cas::module::{MetricModule, ModuleElement};
use courant_cas::poly::Poly;
use courant_cas::Rational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Dorfman bracket on `A^{2n}` (first `n` slots vector fields, last `n`
/// one-forms): `[X,Y] + L_X eta - i_Y d xi`.
pub fn dorfman(n: usize, u: &ModuleElement, v: &ModuleElement) -> Vec<Poly> {
    let kind = u.kind();
    let (x, xi) = (&u.coeffs()[..n], &u.coeffs()[n..]);
    let (y, eta) = (&v.coeffs()[..n], &v.coeffs()[n..]);
    let mut out = vec![Poly::zero(kind); 2 * n];
    for j in 0..n {
        let mut vf = Poly::zero(kind);
        let mut form = Poly::zero(kind);
        for i in 0..n {
            vf = &vf + &(&(&x[i] * &y[j].gen_derivative(i)) - &(&y[i] * &x[j].gen_derivative(i)));
            form = &form + &(&(&x[i] * &eta[j].gen_derivative(i)) + &(&eta[i] * &x[i].gen_derivative(j)));
            form = &form - &(&y[i] * &(&xi[j].gen_derivative(i) - &xi[i].gen_derivative(j)));
        }
        out[j] = vf;
        out[n + j] = form;
    }
    out
}

/// `<[C1, C2](x_1, .., x_(N-1)), x_N>` computed by peeling arguments with
/// insertion: `i_x [C1, C2] = (-1)^s [i_x C1, C2] + [C1, i_x C2]`.
pub fn bracket_by_insertion(m: &MetricModule, c1: &CMapElement, c2: &CMapElement, xs: &[ModuleElement]) -> Poly {
    let kind = m.kind();
    let (r, s) = (c1.degree(), c2.degree());
    if r + s < 2 || r + s - 2 != xs.len() {
        return Poly::zero(kind);
    }
    let Some((x, rest)) = xs.split_first() else {
        return match (r, s) {
            (1, 1) => m.inner(&c1.as_vector(m).unwrap(), &c2.as_vector(m).unwrap()).unwrap(),
            (2, 0) => sigma(m, c1, &c2.as_scalar().unwrap()),
            (0, 2) => -&sigma(m, c2, &c1.as_scalar().unwrap()),
            _ => Poly::zero(kind),
        };
    };
    let mut acc = Poly::zero(kind);
    if let Some(ix1) = insert(m, c1, x) {
        let t = bracket_by_insertion(m, &ix1, c2, rest);
        acc = if s % 2 == 1 { &acc - &t } else { &acc + &t };
    }
    if let Some(ix2) = insert(m, c2, x) {
        acc = &acc + &bracket_by_insertion(m, c1, &ix2, rest);
    }
    acc
}

fn insert(m: &MetricModule, c: &CMapElement, x: &ModuleElement) -> Option<CMapElement> {
    match c.degree() {
        0 => None,
        1 => Some(CMapElement::scalar(m, m.inner(&c.as_vector(m).unwrap(), x).unwrap())),
        _ => Some(c.insert(m, x).unwrap()),
    }
}

fn sigma(m: &MetricModule, d: &CMapElement, a: &Poly) -> Poly {
    let mut acc = Poly::zero(m.kind());
    for g in 0..m.algebra().num_gens() {
        acc = &acc + &(&a.gen_derivative(g) * &d.eval_form(m, &[g], &[]).unwrap());
    }
    acc
}

/// A Q-basis of the elements of degree `r` whose tower entries have
/// coefficient degree at most `cap` and satisfy the basis-level swap
/// identities (plus the dual-number symbol condition).
pub fn valid_c_basis(m: &MetricModule, r: usize, cap: u32) -> Vec<CMapElement> {
    let kind = m.kind();
    let ngens = m.algebra().num_gens();
    let monos = m.algebra().monomials_up_to(cap);
    let keys = canonical_keys(ngens, m.rank(), r);
    let var = |k: usize, mu: usize| k * monos.len() + mu;
    let key_index: BTreeMap<_, _> = keys.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();
    let mut rows: Vec<SparseVec> = Vec::new();
    // a row per (identity, output monomial)
    let push_poly_identity = |rows: &mut Vec<SparseVec>, terms: Vec<(usize, Poly)>| {
        // sum over (key, multiplier) of multiplier * entry(key) = 0
        let mut by_mono: BTreeMap<Vec<u32>, SparseVec> = BTreeMap::new();
        for (k, mult) in terms {
            for (mu_i, mu) in monos.iter().enumerate() {
                let prod = &mult * mu;
                for (mono, q) in prod.terms() {
                    let e = by_mono.entry(mono.0.to_vec()).or_default();
                    let slot = e.entry(var(k, mu_i)).or_insert_with(Rational::zero);
                    *slot = &*slot + q;
                }
            }
        }
        for (_, mut row) in by_mono {
            row.retain(|_, q| !q.is_zero());
            if !row.is_empty() {
                rows.push(row);
            }
        }
    };
    for k in &keys {
        let p = k.gens.len();
        let n = k.args.len();
        for i in 0..n.saturating_sub(1) {
            let mut sw = k.args.clone();
            sw.swap(i, i + 1);
            let mut terms = vec![(key_index[k], Poly::one(kind))];
            let swk = courant_cas::cmap::TowerKey { gens: k.gens.clone(), args: sw };
            terms.push((key_index[&swk], Poly::one(kind)));
            let pairing = m.gram(k.args[i], k.args[i + 1]);
            let rest: Vec<usize> = k.args.iter().enumerate().filter(|&(t, _)| t != i && t != i + 1).map(|(_, &v)| v).collect();
            for h in 0..ngens {
                let dh = pairing.gen_derivative(h);
                if !dh.is_zero() {
                    let mut g2 = k.gens.clone();
                    g2.push(h);
                    g2.sort_unstable();
                    terms.push((key_index[&courant_cas::cmap::TowerKey { gens: g2, args: rest.clone() }], -&dh));
                }
            }
            push_poly_identity(&mut rows, terms);
        }
        if kind.is_dual() && p > 0 {
            // the constant term of a symbol value vanishes
            let mut row = SparseVec::new();
            row.insert(var(key_index[k], 0), Rational::one());
            rows.push(row);
        }
    }
    let nvars = keys.len() * monos.len();
    nullspace(&rows, nvars)
        .into_iter()
        .map(|v| {
            let mut entries: BTreeMap<usize, Poly> = BTreeMap::new();
            for (i, q) in v {
                let (k, mu) = (i / monos.len(), i % monos.len());
                let e = entries.entry(k).or_insert_with(|| Poly::zero(kind));
                *e = &*e + &monos[mu].scale(&q);
            }
            CMapElement::from_entries(m, r, entries.into_iter().map(|(k, p)| (keys[k].gens.clone(), keys[k].args.clone(), p))).unwrap()
        })
        .collect()
}

/// A random combination of `basis` with small integer weights.
pub fn random_combination<R: Rng>(rng: &mut R, m: &MetricModule, r: usize, basis: &[CMapElement], terms: usize) -> CMapElement {
    let mut out = CMapElement::zero(m, r);
    if basis.is_empty() {
        return out;
    }
    for _ in 0..terms {
        let b = &basis[rng.gen_range(0..basis.len())];
        let w = rng.gen_range(-3i64..=3);
        out = out.add(&b.scale_q(&Rational::from_int(w)));
    }
    out
}
