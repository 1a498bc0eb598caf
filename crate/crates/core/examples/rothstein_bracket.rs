// The graded Poisson algebra of a metric module: products, brackets and the
// isomorphism between the algebras of two metric connections.

use courant_cas::module::MetricModule;
use courant_cas::poly::Algebra;
use courant_cas::rothstein::{parse_roth, ConnectionChange, RothsteinAlgebra};
use courant_cas::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let m = MetricModule::constant(Algebra::free_poly(&["x", "y"])?, &[vec![0, 1], vec![1, 0]])?;
    let ra = RothsteinAlgebra::with_default_connection(m.clone())?;

    let a = parse_roth(&m, "x*y * d(x) ⊗ e1")?;
    let b = parse_roth(&m, "e1 ∧ e2 + y^2 * d(y)")?;
    println!("a = {}", a.fmt(&m));
    println!("b = {}", b.fmt(&m));
    println!("a b = {}", a.wedge(&b).fmt(&m));
    println!("{{a, b}} = {}", ra.bracket(&a, &b)?.fmt(&m));
    // the pairing is the bracket of degree-one elements
    println!("{{e1, e2}} = {}", ra.bracket(&ra.e(0), &ra.e(1))?.fmt(&m));

    // change of connection: exp(t) is a Poisson isomorphism
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let other = sample::metric_connection(&mut rng, &m, 1);
    let rb = RothsteinAlgebra::new(m.clone(), other.clone())?;
    let t = ConnectionChange::new(&m, ra.connection(), &other)?;
    let lhs = t.apply(&ra.bracket(&a, &b)?);
    let rhs = rb.bracket(&t.apply(&a), &t.apply(&b))?;
    if lhs != rhs {
        return Err("exp(t) does not intertwine the brackets".into());
    }
    println!("exp(t) a = {}", t.apply(&a).fmt(&m));
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("rothstein_bracket example");
}
