//! Problem documents: a JSON description of an algebra, a metric module, a
//! connection, named elements and a list of commands.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use crate::cmap::CMapElement;
use crate::courant::{make_quadratic_lie, make_standard_courant, so3_constants, identity_gram, CourantStructure};
use crate::error::{Error, Result};
use crate::module::{Connection, MetricModule, ModuleElement};
use crate::poly::{Algebra, Poly};
use crate::rothstein::{parse_roth, RothElement, RothsteinAlgebra};
use crate::sample;
use crate::scalar::Rational;

pub const SCHEMA: &str = "courant-cas/1";

/// A polynomial or rational literal, written as a string or an integer.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum Literal {
    Int(i64),
    Text(String),
}

impl Literal {
    fn text(&self) -> String {
        match self {
            Literal::Int(i) => i.to_string(),
            Literal::Text(s) => s.clone(),
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum AlgebraSpec {
    FreePoly { vars: Vec<String> },
    DualNum,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModuleSpec {
    pub basis: Vec<String>,
    pub gram: Vec<Vec<Literal>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum ConnectionSpec {
    Named(String),
    Table(ConnectionTable),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct ConnectionTable {
    /// `christoffel[i][a]` is `nabla_{D_i} e_a`, a module element literal.
    #[serde(default)]
    pub christoffel: Option<Vec<Vec<String>>>,
    /// Same layout; the table is replaced by its metric part.
    #[serde(default)]
    pub metrize_of: Option<Vec<Vec<String>>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Preset {
    StandardCourant { n: usize },
    So3,
    QuadraticLie { basis: Vec<String>, gram: Vec<Vec<Literal>>, brackets: BTreeMap<String, String> },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntrySpec {
    #[serde(default)]
    pub gens: Vec<String>,
    #[serde(default)]
    pub args: Vec<String>,
    pub value: Literal,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct RandomSpec {
    pub degree: usize,
    #[serde(default = "one")]
    pub coeff_degree: u32,
    #[serde(default = "two")]
    pub terms: usize,
}

fn one() -> u32 {
    1
}

fn two() -> usize {
    2
}

#[derive(Clone, Debug, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum ElementSpec {
    /// A Rothstein expression such as `x * d(x) ∧ e1`.
    Roth(String),
    /// Tower entries of a bracket element.
    Cmap { degree: usize, entries: Vec<EntrySpec> },
    /// A seeded random Rothstein element.
    Random(RandomSpec),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "op", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Command {
    VerifyCourant {
        #[serde(default = "default_m")]
        target: String,
        #[serde(default)]
        probe_degree: Option<u32>,
    },
    CmapVerify {
        target: String,
        #[serde(default)]
        depth: Option<u32>,
    },
    Bracket {
        lhs: String,
        rhs: String,
        #[serde(default)]
        side: Side,
        #[serde(default, rename = "as")]
        store: Option<String>,
    },
    Wedge {
        lhs: String,
        rhs: String,
        #[serde(default)]
        mode: Mode,
        #[serde(default)]
        side: Side,
        #[serde(default, rename = "as")]
        store: Option<String>,
    },
    SymbolTower {
        target: String,
    },
    JMap {
        target: String,
        #[serde(default, rename = "as")]
        store: Option<String>,
    },
    JInvert {
        target: String,
        #[serde(default = "three")]
        degree: usize,
        #[serde(default, rename = "as")]
        store: Option<String>,
    },
    ChatMembership {
        target: String,
        #[serde(default)]
        cap: Option<u32>,
    },
    Cohomology {
        #[serde(default = "default_m")]
        structure: String,
        #[serde(default = "default_r")]
        r: [usize; 2],
        #[serde(default = "default_d")]
        d: [i64; 2],
    },
    McExtend {
        #[serde(default = "default_m")]
        structure: String,
        series: Vec<String>,
        candidate: String,
    },
    CounterexampleSder,
}

fn default_m() -> String {
    "m".into()
}

fn three() -> usize {
    3
}

fn default_r() -> [usize; 2] {
    [0, 5]
}

fn default_d() -> [i64; 2] {
    [-3, 3]
}

#[derive(Clone, Copy, Debug, Default, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum Side {
    #[default]
    Cmap,
    Rothstein,
}

#[derive(Clone, Copy, Debug, Default, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    #[default]
    Recursive,
    Shuffle,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct ProblemDocument {
    pub schema: String,
    #[serde(default)]
    pub preset: Option<Preset>,
    #[serde(default)]
    pub algebra: Option<AlgebraSpec>,
    #[serde(default)]
    pub module: Option<ModuleSpec>,
    #[serde(default)]
    pub connection: Option<ConnectionSpec>,
    /// Internal weights of the basis vectors for cohomology blocks.
    #[serde(default)]
    pub weights: Option<Vec<i32>>,
    #[serde(default)]
    pub elements: BTreeMap<String, ElementSpec>,
    #[serde(default)]
    pub commands: Vec<Command>,
}

/// Converts a serde position to a byte offset in `text`.
fn byte_offset(text: &str, line: usize, column: usize) -> usize {
    let mut off = 0;
    for (i, l) in text.split_inclusive('\n').enumerate() {
        if i + 1 == line {
            return off + column.saturating_sub(1).min(l.len());
        }
        off += l.len();
    }
    off
}

impl ProblemDocument {
    pub fn parse(text: &str) -> Result<Self> {
        let doc: ProblemDocument = serde_json::from_str(text).map_err(|e| Error::Parse {
            pos: byte_offset(text, e.line(), e.column()),
            msg: format!("{e}"),
        })?;
        if doc.schema != SCHEMA {
            return Err(Error::Unsupported(format!("schema {:?}, expected {SCHEMA:?}", doc.schema)));
        }
        Ok(doc)
    }
}

/// A named value: Rothstein elements keep their degree when known.
#[derive(Clone, Debug)]
pub enum Value {
    Roth(RothElement, Option<usize>),
    Cmap(CMapElement),
}

/// Everything a document declares, resolved and validated.
#[derive(Clone, Debug)]
pub struct Context {
    pub ra: RothsteinAlgebra,
    pub values: BTreeMap<String, Value>,
    pub structure: Option<CourantStructure>,
    pub weights: Option<Vec<i32>>,
}

impl Context {
    pub fn module(&self) -> &MetricModule {
        self.ra.module()
    }

    pub fn get(&self, name: &str) -> Result<&Value> {
        self.values.get(name).ok_or_else(|| Error::InvalidElement(format!("unresolved reference {name:?}")))
    }

    /// The named element as a bracket element, applying `J` to Rothstein elements.
    pub fn cmap(&self, name: &str) -> Result<CMapElement> {
        match self.get(name)? {
            Value::Cmap(c) => Ok(c.clone()),
            Value::Roth(phi, deg) => {
                let r = deg.or_else(|| phi.degree()).ok_or_else(|| Error::Degree(format!("{name:?} has no single degree")))?;
                crate::symbol_map::apply_j(&self.ra, phi, r)
            }
        }
    }

    pub fn roth(&self, name: &str) -> Result<(RothElement, Option<usize>)> {
        match self.get(name)? {
            Value::Roth(phi, deg) => Ok((phi.clone(), *deg)),
            Value::Cmap(_) => Err(Error::InvalidElement(format!("{name:?} is a bracket table, not a Rothstein element"))),
        }
    }

    /// The Courant structure named `name`, or the preset's.
    pub fn structure(&self, name: &str) -> Result<CourantStructure> {
        if let Some(cs) = &self.structure {
            if name == "m" || name == "theta" {
                return Ok(cs.clone());
            }
        }
        let cs = match self.get(name)? {
            Value::Cmap(c) => CourantStructure::from_cmap(self.ra.clone(), c.clone())?,
            Value::Roth(phi, _) => CourantStructure::from_theta(self.ra.clone(), phi.clone())?,
        };
        match &self.weights {
            Some(w) => cs.with_weights(w.clone()),
            None => Ok(cs),
        }
    }
}

fn gram_of(alg: &Algebra, gram: &[Vec<Literal>]) -> Result<Vec<Vec<Poly>>> {
    gram.iter().map(|row| row.iter().map(|l| alg.parse_poly(&l.text())).collect()).collect()
}

fn vector(m: &MetricModule, s: &str) -> Result<ModuleElement> {
    let phi = parse_roth(m, s)?;
    let mut coeffs = vec![Poly::zero(m.kind()); m.rank()];
    for (k, v) in phi.terms() {
        if !k.sym.is_empty() || k.ext.len() != 1 {
            return Err(Error::InvalidElement(format!("{s:?} is not a module element")));
        }
        coeffs[k.ext[0]] = v.clone();
    }
    m.element(coeffs)
}

fn connection_table(m: &MetricModule, t: &[Vec<String>]) -> Result<Connection> {
    let gamma = t.iter().map(|row| row.iter().map(|s| vector(m, s)).collect::<Result<Vec<_>>>()).collect::<Result<Vec<_>>>()?;
    Connection::new(m, gamma)
}

fn quadratic_lie(basis: &[String], gram: &[Vec<Literal>], brackets: &BTreeMap<String, String>) -> Result<CourantStructure> {
    let alg = Algebra::free(0);
    let n = basis.len();
    let gram_p = gram_of(&alg, gram)?;
    let m = MetricModule::new(alg, basis.to_vec(), gram_p.clone())?;
    let mut consts = vec![vec![vec![Rational::zero(); n]; n]; n];
    for (pair, val) in brackets {
        let names: Vec<&str> = pair.split(',').map(str::trim).collect();
        let [a, b] = names[..] else {
            return Err(Error::InvalidElement(format!("bracket key {pair:?} must be \"a, b\"")));
        };
        let ia = m.basis_index(a).ok_or_else(|| Error::InvalidElement(format!("unknown basis vector {a:?}")))?;
        let ib = m.basis_index(b).ok_or_else(|| Error::InvalidElement(format!("unknown basis vector {b:?}")))?;
        let v = vector(&m, val)?;
        for c in 0..n {
            let q = v.coeff(c).as_constant().expect("constant over Q").clone();
            consts[ia][ib][c] = q.clone();
            consts[ib][ia][c] = -&q;
        }
    }
    let gram_q = gram_p.iter().map(|row| row.iter().map(|p| p.as_constant().expect("constant").clone()).collect()).collect();
    make_quadratic_lie(&consts, gram_q)
}

/// Resolves a document. Every reference, literal and table is checked here,
/// before any command runs.
pub fn build_context(doc: &ProblemDocument, seed: u64) -> Result<Context> {
    let mut values = BTreeMap::new();
    let mut structure = None;
    let ra = match &doc.preset {
        Some(p) => {
            if doc.algebra.is_some() || doc.module.is_some() || doc.connection.is_some() {
                return Err(Error::InvalidElement("a preset fixes the algebra, module and connection".into()));
            }
            let cs = match p {
                Preset::StandardCourant { n } => make_standard_courant(*n)?,
                Preset::So3 => make_quadratic_lie(&so3_constants(), identity_gram(3))?,
                Preset::QuadraticLie { basis, gram, brackets } => quadratic_lie(basis, gram, brackets)?,
            };
            values.insert("m".to_string(), Value::Cmap(cs.m().clone()));
            values.insert("theta".to_string(), Value::Roth(cs.theta().clone(), Some(3)));
            let ra = cs.rothstein().clone();
            structure = Some(cs);
            ra
        }
        None => {
            let alg = match &doc.algebra {
                Some(AlgebraSpec::FreePoly { vars }) => Algebra::free_poly(vars)?,
                Some(AlgebraSpec::DualNum) => Algebra::dual_num(),
                None => return Err(Error::InvalidElement("document needs a preset or an algebra".into())),
            };
            let spec = doc.module.as_ref().ok_or_else(|| Error::InvalidElement("document needs a module".into()))?;
            let gram = gram_of(&alg, &spec.gram)?;
            if gram.len() != spec.basis.len() || gram.iter().any(|r| r.len() != spec.basis.len()) {
                return Err(Error::Arity { expected: spec.basis.len(), got: gram.len() });
            }
            let m = MetricModule::new(alg, spec.basis.clone(), gram)?;
            let conn = match &doc.connection {
                None => Connection::flat(&m),
                Some(ConnectionSpec::Named(s)) if s == "flat" => Connection::flat(&m),
                Some(ConnectionSpec::Named(s)) => return Err(Error::InvalidConnection(format!("unknown connection {s:?}"))),
                Some(ConnectionSpec::Table(t)) => match (&t.christoffel, &t.metrize_of) {
                    (Some(c), None) => connection_table(&m, c)?,
                    (None, Some(c)) => connection_table(&m, c)?.metrize(&m),
                    _ => return Err(Error::InvalidConnection("give exactly one of christoffel and metrize-of".into())),
                },
            };
            RothsteinAlgebra::new(m, conn)?
        }
    };
    if let Some(w) = &doc.weights {
        if w.len() != ra.rank() {
            return Err(Error::Arity { expected: ra.rank(), got: w.len() });
        }
    }
    let m = ra.module().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for (name, spec) in &doc.elements {
        let v = match spec {
            ElementSpec::Roth(s) => Value::Roth(parse_roth(&m, s)?, None),
            ElementSpec::Cmap { degree, entries } => {
                let mut es = Vec::new();
                for e in entries {
                    let gens = e
                        .gens
                        .iter()
                        .map(|g| m.algebra().gen_index(g).ok_or_else(|| Error::InvalidElement(format!("unknown variable {g:?}"))))
                        .collect::<Result<Vec<_>>>()?;
                    let args = e
                        .args
                        .iter()
                        .map(|a| m.basis_index(a).ok_or_else(|| Error::InvalidElement(format!("unknown basis vector {a:?}"))))
                        .collect::<Result<Vec<_>>>()?;
                    es.push((gens, args, m.algebra().parse_poly(&e.value.text())?));
                }
                Value::Cmap(CMapElement::from_entries(&m, *degree, es)?)
            }
            ElementSpec::Random(r) => Value::Roth(sample::roth_element(&mut rng, &ra, r.degree, r.coeff_degree, r.terms), Some(r.degree)),
        };
        if values.insert(name.clone(), v).is_some() {
            return Err(Error::InvalidElement(format!("{name:?} is already defined by the preset")));
        }
    }
    let ctx = Context { ra, values, structure, weights: doc.weights.clone() };
    validate_refs(doc, &ctx)?;
    Ok(ctx)
}

fn validate_refs(doc: &ProblemDocument, ctx: &Context) -> Result<()> {
    let mut known: Vec<String> = ctx.values.keys().cloned().collect();
    let need = |name: &String, known: &[String]| -> Result<()> {
        if known.contains(name) {
            Ok(())
        } else {
            Err(Error::InvalidElement(format!("unresolved reference {name:?}")))
        }
    };
    for c in &doc.commands {
        match c {
            Command::VerifyCourant { target, .. } | Command::CmapVerify { target, .. } | Command::SymbolTower { target } | Command::ChatMembership { target, .. } => {
                need(target, &known)?
            }
            Command::Bracket { lhs, rhs, store, .. } | Command::Wedge { lhs, rhs, store, .. } => {
                need(lhs, &known)?;
                need(rhs, &known)?;
                known.extend(store.clone());
            }
            Command::JMap { target, store } | Command::JInvert { target, store, .. } => {
                need(target, &known)?;
                known.extend(store.clone());
            }
            Command::Cohomology { structure, .. } => need(structure, &known)?,
            Command::McExtend { structure, series, candidate } => {
                need(structure, &known)?;
                for s in series {
                    need(s, &known)?;
                }
                need(candidate, &known)?;
            }
            Command::CounterexampleSder => {}
        }
    }
    Ok(())
}
