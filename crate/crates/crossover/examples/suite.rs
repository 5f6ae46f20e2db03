//! Runs one validation suite and prints its table.
//!
//! `cargo run --example suite -- limits`

use crossover::suite::{all_passed, format_table, run_suite, SuiteOptions};

fn main() -> crossover::Result<()> {
    let name = std::env::args().nth(1).unwrap_or_else(|| "weights".into());
    let checks = run_suite(&name, &SuiteOptions::default())?;
    print!("{}", format_table(&checks));
    println!("{}", if all_passed(&checks) { "all passed" } else { "some checks failed" });
    Ok(())
}
