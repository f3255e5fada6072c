//! One line per criterion: `PASS|FAIL  #id  seconds  title  detail`.

use patcx_cli::args::DEFAULT_SEED;
use patcx_cli::reproduce::{run_criterion, ALL};

fn main() {
    // `cargo test -- --list` and filters are not meaningful here.
    if std::env::args().any(|a| a == "--list") {
        println!("acceptance: test");
        return;
    }
    let mut failed = 0;
    for id in ALL {
        let r = run_criterion(id, DEFAULT_SEED);
        if !r.passed {
            failed += 1;
        }
        let limit = r.limit_secs.map_or(String::new(), |l| format!(" (limit {l} s)"));
        println!(
            "{} criterion {:>2}  {:>7.2} s{limit}  {}: {}",
            if r.passed { "PASS" } else { "FAIL" },
            r.id,
            r.elapsed_secs,
            r.title,
            r.detail
        );
    }
    println!("acceptance: {} passed, {failed} failed", ALL.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
