// Elements of the C-map complex stored as symbol towers: verification,
// the bracket, both wedge algorithms and the tower itself.

use courant_cas::cmap::{self, symbol_tower, verify, CMapElement, WedgeMode};
use courant_cas::module::MetricModule;
use courant_cas::poly::Algebra;
use courant_cas::rothstein::{parse_roth, RothsteinAlgebra};
use courant_cas::symbol_map::apply_j;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let alg = Algebra::free_poly(&["x"])?;
    let m = MetricModule::constant(alg.clone(), &[vec![1, 0], vec![0, -1]])?;
    let ra = RothsteinAlgebra::with_default_connection(m.clone())?;

    // a degree-2 element with a nonzero symbol and a degree-1 element
    let c2 = apply_j(&ra, &parse_roth(&m, "x * d(x) + e1 ∧ e2")?, 2)?;
    let c1 = CMapElement::vector(&m, &m.element(vec![alg.gen(0), alg.one()])?);
    println!("C2 = {}", c2.fmt(&m));
    println!("C1 = {}", c1.fmt(&m));

    let report = verify(&m, &c2, None)?;
    println!("verify C2: ok={} basis checks={} probe checks={}", report.ok, report.basis_checks, report.probe_checks);

    let br = cmap::bracket(&m, &c2, &c1)?;
    println!("[C2, C1] = {}", br.fmt(&m));
    let rec = cmap::wedge(&m, &c2, &c1, WedgeMode::Recursive)?;
    let shuf = cmap::wedge(&m, &c2, &c1, WedgeMode::Shuffle)?;
    if rec != shuf {
        return Err("the two wedge algorithms disagree".into());
    }
    println!("C2 ^ C1 = {}", rec.fmt(&m));

    // evaluation on x e1, e2 and insertion of a vector
    let args = [m.basis(0).scale(&alg.gen(0)), m.basis(1)];
    println!("C2(x e1, e2) = {}", alg.fmt(&c2.eval_form(&m, &[], &args)?));
    println!("i_(e1) C2 = {}", c2.insert(&m, &m.basis(0))?.fmt(&m));

    let tower = symbol_tower(&m, &c2)?;
    for (p, level) in tower.levels.iter().enumerate() {
        for (gens, el) in level {
            println!("level {p} {gens:?}: {}", el.fmt(&m));
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("cmap_operations example");
}
