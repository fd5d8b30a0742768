//! Acceptance criteria at the default resolution (n = 64, m = 32, T = 1,
//! dt = 1e-3). Prints one PASS/FAIL line per criterion and exits nonzero if
//! any criterion fails. Trailing arguments select criteria by name prefix.

use std::process::ExitCode;
use std::time::Instant;

use lagflow::verify::Verifier;

const CRITERIA: [&str; 9] = [
    "steady_states",
    "conservation",
    "potential_vorticity",
    "flow_map_structure",
    "exact_flow",
    "smooth_dependence",
    "zero_viscosity_limit",
    "form_equivalence",
    "operator_identities",
];

fn main() -> ExitCode {
    let filters: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let verifier = Verifier::new();
    let mut failed = 0;
    let mut ran = 0;
    for name in CRITERIA {
        if !filters.is_empty() && !filters.iter().any(|f| name.starts_with(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let check = verifier.check(name);
        ran += 1;
        let verdict = if check.passed { "PASS" } else { "FAIL" };
        println!("{verdict} {name} ({:.1}s): {}", start.elapsed().as_secs_f64(), check.detail);
        failed += usize::from(!check.passed);
    }
    println!("acceptance: {ran} criteria, {} passed, {failed} failed", ran - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
