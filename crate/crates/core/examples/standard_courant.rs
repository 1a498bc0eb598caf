// The standard Courant algebroid on vector fields plus one-forms: the derived
// bracket, the anchor, axiom checks and a morphism.

use courant_cas::courant::{make_standard_courant, verify_courant, verify_morphism};
use courant_cas::iso::{AlgebraIso, ModuleIso};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let cs = make_standard_courant(2)?;
    let m = cs.module();
    let alg = m.algebra();
    println!("theta = {}", cs.theta().fmt(m));

    // basis: e1, e2 are d/dx1, d/dx2 and f1, f2 are dx1, dx2
    let v = m.element(vec![alg.gen(1), alg.zero(), alg.zero(), alg.gen(0)])?;
    let w = m.element(vec![alg.zero(), alg.gen(0), alg.parse_poly("x1*x2")?, alg.zero()])?;
    println!("anchor(v) = {:?}", cs.anchor(&v)?.comps().iter().map(|p| alg.fmt(p)).collect::<Vec<_>>());
    println!("[v, w] = {}", m.fmt_elem(&cs.bracket(&v, &w)?));
    println!("[w, v] = {}", m.fmt_elem(&cs.bracket(&w, &v)?));

    let report = verify_courant(m, cs.m(), Some(2))?;
    println!("bracket route {}, axiom route {}, {} axiom checks", report.bracket_route, report.axiom_route, report.axiom_checks);
    if !report.ok {
        return Err(format!("standard structure rejected: {:?}", report.violation).into());
    }

    // swapping x1 and x2 together with the matching basis vectors is an automorphism
    let images = [1, 0, 3, 2].map(|a| m.basis(a)).to_vec();
    let psi = ModuleIso::new(AlgebraIso::permutation(vec![1, 0])?, m, m, images)?;
    let mr = verify_morphism(&cs, &cs, &psi)?;
    println!("coordinate swap: {mr:?}");
    if !mr.ok() {
        return Err("coordinate swap should be an automorphism".into());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("standard_courant example");
}
