// Polynomials, dual numbers and derivations with exact rational coefficients.

use courant_cas::der::{DerElement, SymMultiDerivation};
use courant_cas::poly::Algebra;
use courant_cas::Rational;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let alg = Algebra::free_poly(&["x", "y"])?;
    let names = alg.names();
    let p = alg.parse_poly("1/2*x^2*y - 3*y + 7/3")?;
    let q = alg.parse_poly("x - y")?;
    let pq = &p * &q;
    println!("({}) * ({}) = {}", p.display(names), q.display(names), pq.display(names));

    // x d/dx + y^2 d/dy acting on p, and its commutator with d/dx
    let k = alg.kind();
    let v = DerElement::new(k, vec![alg.gen(0), alg.parse_poly("y^2")?])?;
    let dx = DerElement::basis(k, 0);
    println!("v(p) = {}", v.apply(&p)?.display(names));
    let c = v.commutator(&dx)?;
    if c != dx.scale(&alg.parse_poly("-1")?)? {
        return Err("[x d/dx + y^2 d/dy, d/dx] should be -d/dx".into());
    }

    // eps^2 = 0, and every derivation of the dual numbers is a multiple of eps d/deps
    let dual = Algebra::dual_num();
    let eps = dual.gen(0);
    if !(&eps * &eps).is_zero() {
        return Err("eps^2 must vanish".into());
    }
    let half = DerElement::new(dual.kind(), vec![dual.constant(Rational::new(1, 2))])?;
    println!("requesting eps -> 1/2 gives eps -> {}", dual.fmt(&half.on_gen(0)));

    // a symmetric bi-derivation from the product d/dx . d/dy
    let bi = SymMultiDerivation::from_sym_product(&[dx, DerElement::basis(k, 1)])?;
    let val = bi.eval(&[alg.parse_poly("x*y")?, alg.parse_poly("x*y")?])?;
    println!("(d/dx . d/dy)(xy, xy) = {}", val.display(names));
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("exact_arithmetic example");
}
