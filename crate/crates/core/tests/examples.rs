mod exact_arithmetic {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/exact_arithmetic.rs"));
}
mod metric_connection {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/metric_connection.rs"));
}
mod rothstein_bracket {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/rothstein_bracket.rs"));
}
mod cmap_operations {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/cmap_operations.rs"));
}
mod symbol_map {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/symbol_map.rs"));
}
mod counterexample {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/counterexample.rs"));
}
mod standard_courant {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/standard_courant.rs"));
}
mod so3_lie {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/so3_lie.rs"));
}
mod maurer_cartan {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/maurer_cartan.rs"));
}
mod documents {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/documents.rs"));
}

#[test]
fn example_exact_arithmetic() {
    exact_arithmetic::run_example().expect("exact_arithmetic");
}

#[test]
fn example_metric_connection() {
    metric_connection::run_example().expect("metric_connection");
}

#[test]
fn example_rothstein_bracket() {
    rothstein_bracket::run_example().expect("rothstein_bracket");
}

#[test]
fn example_cmap_operations() {
    cmap_operations::run_example().expect("cmap_operations");
}

#[test]
fn example_symbol_map() {
    symbol_map::run_example().expect("symbol_map");
}

#[test]
fn example_counterexample() {
    counterexample::run_example().expect("counterexample");
}

#[test]
fn example_standard_courant() {
    standard_courant::run_example().expect("standard_courant");
}

#[test]
fn example_so3_lie() {
    so3_lie::run_example().expect("so3_lie");
}

#[test]
fn example_maurer_cartan() {
    maurer_cartan::run_example().expect("maurer_cartan");
}

#[test]
fn example_documents() {
    documents::run_example().expect("documents");
}
