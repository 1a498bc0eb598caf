// Running a problem document, the format the command-line tool reads.

use courant_cas::cli::{run_text, Options};

const DOC: &str = r#"{
  "schema": "courant-cas/1",
  "preset": {"name": "standard-courant", "n": 1},
  "elements": {"v": {"roth": "x1*e1 + f1"}},
  "commands": [
    {"op": "verify-courant"},
    {"op": "bracket", "lhs": "theta", "rhs": "v", "side": "rothstein", "as": "dv"},
    {"op": "j-map", "target": "dv"},
    {"op": "cohomology", "r": [0, 2], "d": [0, 0]}
  ]
}"#;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let report = run_text(DOC, &Options::default());
    print!("{}", report.render_human());
    if report.exit_code != 0 {
        return Err(format!("document failed with exit code {}", report.exit_code).into());
    }
    // the shipped documents live next to the crate
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/docs/documents/so3.json");
    let so3 = run_text(&std::fs::read_to_string(path)?, &Options::default());
    println!("so3.json: status {}", so3.json["status"]);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("documents example");
}
