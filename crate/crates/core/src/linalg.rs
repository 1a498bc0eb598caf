//! Exact linear algebra over the rationals on sparse vectors, plus
//! determinants and inverses of small polynomial matrices.

use std::collections::BTreeMap;

use crate::poly::{BackendKind, Poly};
use crate::scalar::Rational;

/// Sparse vector: index -> nonzero entry.
pub type SparseVec = BTreeMap<usize, Rational>;

pub fn sparse_from_dense(v: &[Rational]) -> SparseVec {
    v.iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| (i, c.clone()))
        .collect()
}

pub fn dot(a: &SparseVec, b: &SparseVec) -> Rational {
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let mut acc = Rational::zero();
    for (i, x) in small {
        if let Some(y) = large.get(i) {
            acc += x * y;
        }
    }
    acc
}

/// `v += c * w`
pub fn axpy(v: &mut SparseVec, c: &Rational, w: &SparseVec) {
    if c.is_zero() {
        return;
    }
    for (i, x) in w {
        let e = v.entry(*i).or_default();
        *e += c * x;
        if e.is_zero() {
            v.remove(i);
        }
    }
}

/// Incrementally built row-echelon basis. Each stored row has leading
/// entry 1 at its pivot, and optionally remembers which combination of
/// inserted vectors produced it.
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    rows: Vec<SparseVec>,
    combos: Vec<SparseVec>,
    pivot_row: BTreeMap<usize, usize>,
}

impl Echelon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn pivots(&self) -> impl Iterator<Item = usize> + '_ {
        self.pivot_row.keys().copied()
    }

    /// Reduces `v` against the stored rows; `combo` tracks the same
    /// operations on the combination coefficients.
    fn reduce(&self, v: &mut SparseVec, combo: &mut SparseVec) {
        let mut cursor = 0usize;
        loop {
            let next = v.range(cursor..).find(|(k, _)| self.pivot_row.contains_key(k)).map(|(k, c)| (*k, c.clone()));
            let Some((k, c)) = next else { break };
            let r = self.pivot_row[&k];
            let neg = -&c;
            axpy(v, &neg, &self.rows[r]);
            axpy(combo, &neg, &self.combos[r]);
            cursor = k + 1;
        }
    }

    /// Inserts `v` tagged as input number `tag`. Returns true if it was
    /// independent of the rows seen so far.
    pub fn insert(&mut self, v: SparseVec, tag: usize) -> bool {
        let mut v = v;
        let mut combo = SparseVec::new();
        combo.insert(tag, Rational::one());
        self.reduce(&mut v, &mut combo);
        let Some((&p, lead)) = v.iter().next() else { return false };
        let inv = lead.recip().expect("nonzero pivot");
        for x in v.values_mut() {
            *x = &*x * &inv;
        }
        for x in combo.values_mut() {
            *x = &*x * &inv;
        }
        self.pivot_row.insert(p, self.rows.len());
        self.rows.push(v);
        self.combos.push(combo);
        true
    }

    /// Writes `v` as a combination of inserted vectors, if it lies in their span.
    pub fn express(&self, v: &SparseVec) -> Option<SparseVec> {
        let mut v = v.clone();
        let mut combo = SparseVec::new();
        self.reduce(&mut v, &mut combo);
        if v.is_empty() {
            Some(combo.into_iter().map(|(k, c)| (k, -c)).collect())
        } else {
            None
        }
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        let mut v = v.clone();
        let mut combo = SparseVec::new();
        self.reduce(&mut v, &mut combo);
        v.is_empty()
    }
}

/// Rank of a list of sparse row vectors.
pub fn rank(rows: &[SparseVec]) -> usize {
    let mut e = Echelon::new();
    for (i, r) in rows.iter().enumerate() {
        e.insert(r.clone(), i);
    }
    e.rank()
}

/// Basis of the right kernel `{x : M x = 0}` of a matrix given by rows,
/// with `ncols` columns.
pub fn nullspace(rows: &[SparseVec], ncols: usize) -> Vec<SparseVec> {
    let mut e = Echelon::new();
    for (i, r) in rows.iter().enumerate() {
        e.insert(r.clone(), i);
    }
    // back-substitute to reduced row echelon form
    let mut rref: Vec<(usize, SparseVec)> = e.pivot_row.iter().map(|(&p, &r)| (p, e.rows[r].clone())).collect();
    for i in (0..rref.len()).rev() {
        let (pi, ri) = rref[i].clone();
        for row in rref.iter_mut().take(i) {
            if let Some(c) = row.1.get(&pi).cloned() {
                axpy(&mut row.1, &-&c, &ri);
            }
        }
    }
    let pivots: BTreeMap<usize, SparseVec> = rref.into_iter().collect();
    let mut out = Vec::new();
    for f in (0..ncols).filter(|c| !pivots.contains_key(c)) {
        let mut x = SparseVec::new();
        x.insert(f, Rational::one());
        for (p, row) in &pivots {
            if let Some(c) = row.get(&f) {
                x.insert(*p, -c);
            }
        }
        out.push(x);
    }
    out
}

/// Outcome of solving `A x = b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Solve {
    /// A solution `x` (indexed by column).
    Solution(SparseVec),
    /// A row combination `y` (indexed by row) with `y^T A = 0` and `y^T b != 0`.
    Infeasible(SparseVec),
}

/// Solves `A x = b` where `A` is given by its columns (each indexed by row).
pub fn solve_columns(columns: &[SparseVec], b: &SparseVec) -> Solve {
    let mut e = Echelon::new();
    for (j, c) in columns.iter().enumerate() {
        e.insert(c.clone(), j);
    }
    if let Some(x) = e.express(b) {
        return Solve::Solution(x);
    }
    let nrows = columns
        .iter()
        .flat_map(|c| c.keys().copied())
        .chain(b.keys().copied())
        .max()
        .map_or(0, |m| m + 1);
    for y in nullspace(columns, nrows) {
        if !dot(&y, b).is_zero() {
            return Solve::Infeasible(y);
        }
    }
    unreachable!("b outside the column span must be detected by the left kernel")
}

/// Determinant by cofactor expansion (matrices here are small).
pub fn poly_det(m: &[Vec<Poly>], kind: BackendKind) -> Poly {
    let n = m.len();
    if n == 0 {
        return Poly::one(kind);
    }
    let cols: Vec<usize> = (0..n).collect();
    det_rec(m, 0, &cols, kind)
}

fn det_rec(m: &[Vec<Poly>], row: usize, cols: &[usize], kind: BackendKind) -> Poly {
    if cols.len() == 1 {
        return m[row][cols[0]].clone();
    }
    let mut acc = Poly::zero(kind);
    for (k, &c) in cols.iter().enumerate() {
        if m[row][c].is_zero() {
            continue;
        }
        let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
        let minor = det_rec(m, row + 1, &rest, kind);
        let term = &m[row][c] * &minor;
        acc = if k % 2 == 0 { &acc + &term } else { &acc - &term };
    }
    acc
}

/// Inverse of a polynomial matrix whose determinant is a unit.
pub fn poly_inverse(m: &[Vec<Poly>], kind: BackendKind) -> Option<Vec<Vec<Poly>>> {
    let n = m.len();
    let det = poly_det(m, kind);
    let dinv = det.unit_inverse()?;
    let mut inv = vec![vec![Poly::zero(kind); n]; n];
    for i in 0..n {
        for j in 0..n {
            // cofactor of entry (j, i)
            let minor: Vec<Vec<Poly>> = (0..n)
                .filter(|&r| r != j)
                .map(|r| (0..n).filter(|&c| c != i).map(|c| m[r][c].clone()).collect())
                .collect();
            let mut c = poly_det(&minor, kind);
            if (i + j) % 2 == 1 {
                c = -&c;
            }
            inv[i][j] = &c * &dinv;
        }
    }
    Some(inv)
}
