// A quadratic Lie algebra as a Courant algebroid over a point, and its
// deformation cohomology.

use courant_cas::courant::{identity_gram, make_quadratic_lie, so3_constants, verify_courant};
use courant_cas::deform::cohomology_dims;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let cs = make_quadratic_lie(&so3_constants(), identity_gram(3))?;
    let m = cs.module();
    println!("theta = {}", cs.theta().fmt(m));
    for (a, b) in [(0, 1), (1, 2), (2, 0)] {
        println!("[e{}, e{}] = {}", a + 1, b + 1, m.fmt_elem(&cs.bracket(&m.basis(a), &m.basis(b))?));
    }
    if !verify_courant(m, cs.m(), None)?.ok {
        return Err("so(3) should be a Courant algebroid".into());
    }

    // Chevalley-Eilenberg cohomology of so(3): that of the 3-sphere
    let recs = cohomology_dims(&cs, 0..=3, 0..=0)?;
    for r in &recs {
        println!("H^{} : chains {}, rank out {}, rank in {}, dim {}", r.r, r.chain_dim, r.rank_out, r.rank_in, r.dim);
    }
    let dims: Vec<usize> = recs.iter().map(|r| r.dim).collect();
    if dims != [1, 0, 0, 1] {
        return Err(format!("unexpected dimensions {dims:?}").into());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("so3_lie example");
}
