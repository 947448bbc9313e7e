//! Reading, validating and rewriting JSON instance files, then running the
//! invariant suite on them.
//!
//! ```bash
//! cargo run --example instance_files
//! ```

use pandora::enumerate::Budget;
use pandora::harness::file::{InstanceFile, LoadedProblem};
use pandora::harness::verify::verify_problem;

const WORKED: &str = r#"{
  "version": "1",
  "items": [
    {"cost": "0", "dist": [{"value": "5", "prob": "1"}]},
    {"cost": "2", "dist": [{"value": "0", "prob": "1/2"}, {"value": "10", "prob": "1/2"}]}
  ]
}"#;

const BAD: &str = r#"{
  "version": "1",
  "items": [{"cost": 1, "dist": [{"value": 1, "prob": 0.5}, {"value": 2, "prob": 0.4}]}]
}"#;

fn main() -> pandora::error::Result<()> {
    let file = InstanceFile::from_json(WORKED)?;
    println!("string numbers select exact mode: {}", file.is_exact());
    let LoadedProblem::Exact(problem) = file.load()? else {
        unreachable!("string numbers load exactly")
    };
    for item in problem.instance.items() {
        let ix = item.indices();
        println!("item {}: u_rsv {} u_bkp {} alpha {}", item.id(), ix.u_rsv, ix.u_bkp, ix.alpha_local);
    }

    let suite = verify_problem(&problem, Budget::default(), "worked");
    for check in suite.summaries() {
        println!("  {:<40} {}", check.name, if check.passed { "ok" } else { "FAILED" });
    }

    println!("\ncanonical form:\n{}", file.canonical()?.to_json());

    match InstanceFile::from_json(BAD).and_then(|f| f.load()) {
        Ok(_) => println!("unexpectedly accepted"),
        Err(e) => println!("rejected: {e}"),
    }
    Ok(())
}
