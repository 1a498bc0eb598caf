// The symbol map from the Rothstein algebra into C-maps, membership in its
// image with a preimage, and the explicit inverse in degree 3.

use courant_cas::cmap;
use courant_cas::module::MetricModule;
use courant_cas::poly::Algebra;
use courant_cas::rothstein::{parse_roth, RothsteinAlgebra};
use courant_cas::symbol_map::{apply_j, chat_membership, invert_j_deg3, Membership};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let alg = Algebra::free_poly(&["x", "y"])?;
    let m = MetricModule::constant(alg, &[vec![0, 1], vec![1, 0]])?;
    let ra = RothsteinAlgebra::with_default_connection(m.clone())?;

    // J is a morphism of brackets
    let a = parse_roth(&m, "y * d(x) ⊗ e1 + x * d(y) ⊗ e2")?;
    let b = parse_roth(&m, "x * d(y) + e1 ∧ e2")?;
    let (ja, jb) = (apply_j(&ra, &a, 3)?, apply_j(&ra, &b, 2)?);
    let lhs = apply_j(&ra, &ra.bracket(&a, &b)?, 3)?;
    let rhs = cmap::bracket(&m, &ja, &jb)?;
    if lhs != rhs {
        return Err("J does not preserve the bracket".into());
    }
    println!("J(a) = {}", ja.fmt(&m));

    // recover a from J(a), once by the degree-3 formula and once by linear algebra
    let back = invert_j_deg3(&ra, &ja)?;
    println!("inverse of J(a) = {}", back.fmt(&m));
    match chat_membership(&ra, &ja, None)? {
        Membership::Member(pre) => println!("membership preimage = {}", pre.fmt(&m)),
        Membership::NonMember(cert) => return Err(format!("J(a) reported outside the image: {cert:?}").into()),
    }
    if back != a {
        return Err("degree-3 inverse did not recover a".into());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("symbol_map example");
}
