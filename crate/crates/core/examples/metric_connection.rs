// A free module with a non-constant metric, a metric connection built from
// the flat one, and its curvature.

use courant_cas::module::{Connection, Curvature, MetricModule};
use courant_cas::poly::Algebra;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let alg = Algebra::free_poly(&["x"])?;
    let gram = vec![vec![alg.parse_poly("1 + x^2")?, alg.gen(0)], vec![alg.gen(0), alg.one()]];
    let m = MetricModule::with_gram(alg.clone(), gram)?;
    println!("g^-1 = [[{}, {}], [{}, {}]]", alg.fmt(m.ginv(0, 0)), alg.fmt(m.ginv(0, 1)), alg.fmt(m.ginv(1, 0)), alg.fmt(m.ginv(1, 1)));

    let flat = Connection::flat(&m);
    if let Some((i, a, b)) = flat.metric_defect(&m) {
        println!("flat connection is not metric: defect along d{i} on ({a}, {b})");
    }
    let conn = flat.metrize(&m);
    if !conn.is_metric(&m) {
        return Err("metrized connection must be metric".into());
    }
    for a in 0..m.rank() {
        println!("nabla_x e{} = {}", a + 1, m.fmt_elem(conn.christoffel(0, a)));
    }

    // one variable: every curvature component R(d_x, d_x) vanishes
    let r = Curvature::new(&conn, &m)?;
    println!("curvature zero: {}, Bianchi holds: {}", r.is_zero(), r.bianchi_holds(&conn, &m));

    // two variables give room for genuine curvature
    let alg2 = Algebra::free_poly(&["x", "y"])?;
    let m2 = MetricModule::constant(alg2.clone(), &[vec![1, 0], vec![0, 1]])?;
    let e1 = m2.basis(0);
    let e2 = m2.basis(1);
    let gamma = vec![
        vec![e2.scale(&alg2.parse_poly("y")?), e1.scale(&alg2.parse_poly("-y")?)],
        vec![m2.zero(), m2.zero()],
    ];
    let rotating = Connection::new(&m2, gamma)?;
    let r2 = Curvature::new(&rotating, &m2)?;
    println!("R(d_x, d_y)(e1, e2) = {}", alg2.fmt(&r2.pair(&m2, 0, 1, &e1, &e2)));
    if !r2.bianchi_holds(&rotating, &m2) {
        return Err("Bianchi identity failed".into());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("metric_connection example");
}
