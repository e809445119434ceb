//! Every example builds and runs to completion.

use std::path::PathBuf;
use std::process::Command;

const EXAMPLES: [&str; 8] = [
    "operators",
    "quadrature_oracle",
    "contraction_solve",
    "nonuniqueness",
    "existence_radius",
    "real_line",
    "hypothesis_checks",
    "corpus_table",
];

fn example_dir() -> PathBuf {
    // target/<profile>/deps/<test binary> -> target/<profile>/examples
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().join("examples")
}

#[test]
fn examples_run() {
    let dir = example_dir();
    for name in EXAMPLES {
        let path = dir.join(name);
        assert!(path.exists(), "example binary {} missing; build with cargo test", path.display());
        let out = Command::new(&path).output().unwrap();
        assert!(
            out.status.success(),
            "{name} failed: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        assert!(!out.stdout.is_empty(), "{name} printed nothing");
    }
}

#[test]
fn examples_listed_match_sources() {
    let src = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples");
    let mut found: Vec<String> = std::fs::read_dir(src)
        .unwrap()
        .filter_map(|e| {
            let p = e.unwrap().path();
            (p.extension()? == "rs").then(|| p.file_stem().unwrap().to_string_lossy().into_owned())
        })
        .collect();
    found.sort();
    let mut listed: Vec<String> = EXAMPLES.iter().map(|s| s.to_string()).collect();
    listed.sort();
    assert_eq!(found, listed);
}
