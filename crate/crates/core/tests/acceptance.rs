use std::process::ExitCode;

fn main() -> ExitCode {
    let mut failed = 0;
    for r in zhufusion::acceptance::run_all() {
        let status = if r.passed { "PASS" } else { "FAIL" };
        println!("criterion {:>2} {status} {} ({:.1}s): {}", r.id, r.name, r.seconds, r.detail);
        if !r.passed {
            failed += 1;
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
