//! Isomorphisms of coefficient algebras (variable permutations) and
//! semilinear module maps along them.

use crate::error::{Error, Result};
use crate::linalg::poly_inverse;
use crate::module::{MetricModule, ModuleElement};
use crate::poly::Poly;

/// `x_i -> x_{perm[i]}`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AlgebraIso {
    perm: Vec<usize>,
    inv: Vec<usize>,
}

impl AlgebraIso {
    pub fn identity(ngens: usize) -> Self {
        let perm: Vec<usize> = (0..ngens).collect();
        AlgebraIso { inv: perm.clone(), perm }
    }

    pub fn permutation(perm: Vec<usize>) -> Result<Self> {
        let n = perm.len();
        let mut inv = vec![usize::MAX; n];
        for (i, &p) in perm.iter().enumerate() {
            if p >= n || inv[p] != usize::MAX {
                return Err(Error::InvalidElement(format!("{perm:?} is not a permutation")));
            }
            inv[p] = i;
        }
        Ok(AlgebraIso { perm, inv })
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &p)| i == p)
    }

    pub fn apply(&self, f: &Poly) -> Poly {
        f.permute_vars(&self.perm)
    }

    pub fn apply_inv(&self, f: &Poly) -> Poly {
        f.permute_vars(&self.inv)
    }

    /// Index of the pushed-forward basis derivation `g d_i g^{-1}`.
    pub fn push_der(&self, i: usize) -> usize {
        self.perm[i]
    }

    pub fn inverse(&self) -> AlgebraIso {
        AlgebraIso { perm: self.inv.clone(), inv: self.perm.clone() }
    }
}

/// A map `G: E -> E'` with `G(f x) = g(f) G(x)`, given by the images of
/// the source basis.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ModuleIso {
    pub alg: AlgebraIso,
    images: Vec<ModuleElement>,
    inv_images: Option<Vec<ModuleElement>>,
}

impl ModuleIso {
    pub fn new(alg: AlgebraIso, source: &MetricModule, target: &MetricModule, images: Vec<ModuleElement>) -> Result<Self> {
        source.kind().check(target.kind())?;
        if alg.perm().len() != source.algebra().num_gens() {
            return Err(Error::Arity { expected: source.algebra().num_gens(), got: alg.perm().len() });
        }
        if images.len() != source.rank() {
            return Err(Error::Arity { expected: source.rank(), got: images.len() });
        }
        for y in &images {
            target.check_elem(y)?;
        }
        // G^{-1}(e'_b) = sum_a g^{-1}(K[b][a]) e_a with K = (matrix of G)^{-1}
        let mat: Vec<Vec<Poly>> = images.iter().map(|y| y.coeffs().to_vec()).collect();
        let inv_images = if source.rank() == target.rank() {
            poly_inverse(&mat, source.kind()).map(|k| {
                (0..target.rank())
                    .map(|b| {
                        let coeffs = (0..source.rank()).map(|a| alg.apply_inv(&k[b][a])).collect();
                        source.element(coeffs).expect("rank checked")
                    })
                    .collect()
            })
        } else {
            None
        };
        Ok(ModuleIso { alg, images, inv_images })
    }

    pub fn identity(m: &MetricModule) -> Self {
        let images = (0..m.rank()).map(|a| m.basis(a)).collect();
        Self::new(AlgebraIso::identity(m.algebra().num_gens()), m, m, images).expect("identity is valid")
    }

    pub fn image(&self, a: usize) -> &ModuleElement {
        &self.images[a]
    }

    pub fn is_bijective(&self) -> bool {
        self.inv_images.is_some()
    }

    pub fn apply(&self, x: &ModuleElement) -> ModuleElement {
        let mut out = ModuleElement::zero(x.kind(), self.images[0].rank());
        for (a, c) in x.coeffs().iter().enumerate() {
            if !c.is_zero() {
                out = out.add(&self.images[a].scale(&self.alg.apply(c)));
            }
        }
        out
    }

    pub fn apply_inv(&self, y: &ModuleElement) -> Result<ModuleElement> {
        let inv = self.inv_images.as_ref().ok_or_else(|| Error::NotIsometric("map is not bijective".into()))?;
        let mut out = ModuleElement::zero(y.kind(), inv[0].rank());
        for (b, c) in y.coeffs().iter().enumerate() {
            if !c.is_zero() {
                out = out.add(&inv[b].scale(&self.alg.apply_inv(c)));
            }
        }
        Ok(out)
    }

    /// First basis pair where `g(<e_a, e_b>) != <G e_a, G e_b>`.
    pub fn isometry_defect(&self, source: &MetricModule, target: &MetricModule) -> Option<(usize, usize)> {
        for a in 0..source.rank() {
            for b in a..source.rank() {
                let lhs = self.alg.apply(source.gram(a, b));
                let rhs = target.inner(&self.images[a], &self.images[b]).ok()?;
                if lhs != rhs {
                    return Some((a, b));
                }
            }
        }
        None
    }

    pub fn require_isometric_bijection(&self, source: &MetricModule, target: &MetricModule) -> Result<()> {
        if let Some((a, b)) = self.isometry_defect(source, target) {
            return Err(Error::NotIsometric(format!(
                "inner product of {} and {} is not preserved",
                source.names()[a],
                source.names()[b]
            )));
        }
        if !self.is_bijective() {
            return Err(Error::NotIsometric("map is not bijective".into()));
        }
        Ok(())
    }
}

impl ModuleIso {
    /// The connection on the target making `G` connection-preserving:
    /// `nabla'_{g D} y = G(nabla_D G^{-1} y)`.
    pub fn transport_connection(
        &self,
        source: &MetricModule,
        conn: &crate::module::Connection,
        target: &MetricModule,
    ) -> Result<crate::module::Connection> {
        let mut gamma = vec![Vec::new(); target.der_rank()];
        for i in 0..source.der_rank() {
            gamma[self.alg.push_der(i)] = (0..target.rank())
                .map(|b| Ok(self.apply(&conn.nabla_basis(source, i, &self.apply_inv(&target.basis(b))?))))
                .collect::<Result<Vec<_>>>()?;
        }
        crate::module::Connection::new(target, gamma)
    }
}
