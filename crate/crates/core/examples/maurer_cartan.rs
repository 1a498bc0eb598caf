// Formal deformations of the standard structure: the differential, a graded
// cohomology table, and extension of a Maurer-Cartan series order by order.

use courant_cas::courant::make_standard_courant;
use courant_cas::deform::{cohomology_dims, differential, mc_extend, mc_obstruction, mc_solve_next, theta_degree, trivial_deformation, DeformationSeries};
use courant_cas::rothstein::parse_roth;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let cs = make_standard_courant(1)?;
    let m = cs.module();
    println!("theta has internal degree {}", theta_degree(&cs)?);
    for r in cohomology_dims(&cs, 0..=3, -1..=1)? {
        println!("H^{}_{} = {}", r.r, r.d, r.dim);
    }

    // the flow of a degree-2 element gives a deformation to every order
    let xi = parse_roth(m, "x1^2 * e1 ∧ f1")?;
    println!("delta xi = {}", differential(&cs, &xi)?.fmt(m));
    let full = trivial_deformation(&cs, &xi, 3)?;
    for (j, t) in full.terms.iter().enumerate() {
        println!("m_{} = {}", j + 1, t.fmt(m));
    }
    let head = DeformationSeries { terms: full.terms[..2].to_vec() };
    let (obs, cocycle) = mc_obstruction(&cs, &head)?;
    println!("obstruction at order 3 = {} (cocycle: {cocycle})", obs.fmt(m));
    if !mc_extend(&cs, &head, &full.terms[2])? {
        return Err("the flow term was rejected".into());
    }
    // any solution differs from the flow term by a cocycle
    let next = mc_solve_next(&cs, &head)?.ok_or("no extension found")?;
    if !differential(&cs, &next.sub(&full.terms[2]))?.is_zero() {
        return Err("solutions should differ by a cocycle".into());
    }
    println!("solver picked m_3 = {}", next.fmt(m));
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("maurer_cartan example");
}
