//! Runs the built-in catalogue at a = 0.25, 0.5, 0.75.

use fracpicard::corpus::{corpus_run_all, CorpusConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for order in [0.25, 0.5, 0.75] {
        println!("a = {order}");
        for r in corpus_run_all(&CorpusConfig { order, n: 2 })? {
            println!("  {:<18} {}  {}", r.name, if r.passed { "pass" } else { "FAIL" }, r.detail);
        }
    }
    Ok(())
}
