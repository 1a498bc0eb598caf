// Over the dual numbers the symbol map is not surjective: a valid degree-4
// C-map whose top symbol is eps (d/deps)^2 has no preimage.

use courant_cas::cmap::verify;
use courant_cas::symbol_map::{chat_membership, counterexample_sder, Membership};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let (ra, c) = counterexample_sder()?;
    let m = ra.module();
    println!("C = {}", c.fmt(m));
    let report = verify(m, &c, None)?;
    if !report.ok {
        return Err(format!("counterexample fails verification: {:?}", report.violation).into());
    }

    // C(x, y, z) = P(x, z) y with P(eps, eps) = eps
    let eps = m.basis(0).scale(&m.algebra().gen(0));
    let one = m.basis(0);
    println!("C(eps e, e, eps e) = {}", m.fmt_elem(&c.eval(m, &[eps.clone(), one, eps])?));

    match chat_membership(&ra, &c, None)? {
        Membership::NonMember(cert) => {
            println!("not in the image; functional value {} on {} coordinates", cert.value, cert.residual.len());
            for (coord, q) in &cert.residual {
                println!("    {q} * [{:?} {:?}] {:?}", coord.key.gens, coord.key.args, coord.mono.0.as_slice());
            }
        }
        Membership::Member(pre) => return Err(format!("unexpected preimage {}", pre.fmt(m)).into()),
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("counterexample example");
}
