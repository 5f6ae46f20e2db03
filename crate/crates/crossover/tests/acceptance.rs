//! Acceptance run: one PASS/FAIL line per criterion, followed by the checks
//! behind it. Monte Carlo parts use seed 2026 and 8 streams.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the table.

use crossover::suite::{self, format_table, Check, DEFAULT_SEED, DEFAULT_STREAMS};
use crossover::Result;
use std::time::{Duration, Instant};

const A_GRID: [f64; 3] = [0.2, 0.5, 0.9];
const MC_A_GRID: [f64; 3] = [0.1, 0.5, 0.9];

struct Criterion {
    id: usize,
    title: &'static str,
    budget: Option<Duration>,
    run: fn() -> Result<Vec<Check>>,
}

fn criteria() -> Vec<Criterion> {
    let mins = |m: u64| Some(Duration::from_secs(60 * m));
    vec![
        Criterion { id: 1, title: "skew-orthogonality", budget: mins(2), run: || suite::skew_orthogonality(&A_GRID) },
        Criterion { id: 2, title: "polynomial representations", budget: None, run: || suite::representations(&A_GRID) },
        Criterion { id: 3, title: "weight closed forms", budget: None, run: || suite::weight_forms(&A_GRID) },
        Criterion { id: 4, title: "kernel vs brute-force jpdf", budget: mins(5), run: || suite::jpdf_oracle(0.5) },
        Criterion { id: 5, title: "normalizations", budget: None, run: || suite::normalization(&A_GRID) },
        Criterion { id: 6, title: "chGOE / GAOE / split limits", budget: None, run: suite::limits },
        Criterion {
            id: 7,
            title: "Monte Carlo histograms",
            budget: mins(10),
            run: || suite::monte_carlo(&MC_A_GRID, DEFAULT_SEED, DEFAULT_STREAMS),
        },
        Criterion { id: 8, title: "Pfaffians", budget: None, run: || suite::pfaffians(DEFAULT_SEED) },
        Criterion {
            id: 9,
            title: "Heine averages and n=1 density",
            budget: None,
            run: || suite::heine(0.5, DEFAULT_SEED, DEFAULT_STREAMS),
        },
        Criterion {
            id: 10,
            title: "model equivalence and split",
            budget: None,
            run: || suite::split(DEFAULT_SEED, DEFAULT_STREAMS),
        },
    ]
}

#[test]
fn acceptance() {
    let mut summary = Vec::new();
    let mut details = String::new();
    for c in criteria() {
        let start = Instant::now();
        let result = (c.run)();
        let elapsed = start.elapsed();
        let (passed, note) = match &result {
            Ok(checks) => {
                let failed: Vec<&Check> = checks.iter().filter(|k| !k.passed).collect();
                let in_time = c.budget.is_none_or(|b| elapsed <= b);
                let note = match (failed.first(), in_time) {
                    (Some(k), _) => format!("{} of {} checks failed, first: {}", failed.len(), checks.len(), k.name),
                    (None, false) => format!("over the time budget of {:?}", c.budget.unwrap()),
                    (None, true) => format!("{} checks", checks.len()),
                };
                (failed.is_empty() && in_time, note)
            }
            Err(e) => (false, format!("error: {e}")),
        };
        let line = format!(
            "criterion {:>2}: {} {} ({:.1} s; {note})",
            c.id,
            if passed { "PASS" } else { "FAIL" },
            c.title,
            elapsed.as_secs_f64()
        );
        println!("{line}");
        if let Ok(checks) = &result {
            details.push_str(&format!("\ncriterion {}\n{}", c.id, format_table(checks)));
        }
        summary.push((c.id, passed));
    }
    println!("{details}");
    let failed: Vec<usize> = summary.iter().filter(|(_, p)| !p).map(|(id, _)| *id).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
