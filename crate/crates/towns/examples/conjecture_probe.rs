//! Empirical sweep of two open questions at small n.
//!
//! For each parameter cell the exact extremal size is computed, then tested
//! against two conjectured patterns: on the diagonal the maximum should not
//! grow when the common residue does, and off the diagonal it should never
//! exceed n. A finding is a concrete counterexample, not an error.

use towns::search::{probe_conjectures, SearchBudget};

fn main() -> towns::Result<()> {
    let report = probe_conjectures(3, 8, &SearchBudget::default())?;

    println!("exact sizes, k = {}, n up to {}", report.k, report.n_max);
    println!("{:>4} {:>6} {:>6} {:>6} {:>6} {:>6} {:>6} {:>6} {:>6} {:>6}", "n",
        "(0,0)", "(0,1)", "(0,2)", "(1,0)", "(1,1)", "(1,2)", "(2,0)", "(2,1)", "(2,2)");
    for n in 1..=report.n_max {
        print!("{n:>4}");
        for cell in report.cells.iter().filter(|c| c.n == n) {
            let mark = if cell.optimal { ' ' } else { '?' };
            print!(" {:>5}{mark}", cell.size);
        }
        println!();
    }

    println!();
    if report.findings.is_empty() {
        println!("no counterexamples: diagonal sizes are monotone in the residue and");
        println!("distinct-residue towns stay within n members on this range");
    } else {
        for finding in &report.findings {
            println!("{}: {}", finding.conjecture, finding.detail);
        }
    }
    Ok(())
}
