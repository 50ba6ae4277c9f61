//! The bundled verification suite, run as an integration test: one
//! PASS/FAIL line per criterion, failing the build if any criterion fails.

#[test]
fn acceptance_criteria() {
    let results = height_census::selftest::run_all();
    for result in &results {
        println!("{}", result.line());
    }
    let failures: Vec<&str> = results.iter().filter(|r| !r.pass).map(|r| r.name).collect();
    assert!(
        failures.is_empty(),
        "failed criteria: {}\n{}",
        failures.join(", "),
        results
            .iter()
            .map(|r| r.line())
            .collect::<Vec<_>>()
            .join("\n")
    );
}
