//! Exhaustive extremal values for modulus 3, capped by the hard cell.
//!
//! Prints the exact maximum town size for every parameter pair at a few
//! ground set sizes, then settles (0,0) at n = 12, where the Hadamard
//! product construction with 24 members turns out to be best possible.

use towns::bounds::bound_oracle;
use towns::search::{extremal_search, SearchBudget, SearchLimits};

fn main() -> towns::Result<()> {
    let limits = SearchLimits::default();
    let budget = SearchBudget::default();

    println!("exact extremal sizes, k = 3");
    println!("{:>4} {:>6} {:>6} {:>6} {:>6} {:>6} {:>6} {:>6} {:>6} {:>6}", "n",
        "(0,0)", "(0,1)", "(0,2)", "(1,0)", "(1,1)", "(1,2)", "(2,0)", "(2,1)", "(2,2)");
    for n in 3..=9 {
        print!("{n:>4}");
        for a in 0..3 {
            for b in 0..3 {
                let out = extremal_search(a, b, 3, n, &limits, &budget)?;
                assert!(out.status.is_optimal());
                print!(" {:>6}", out.size);
            }
        }
        println!();
    }

    println!();
    println!("the hard cell: a = 0, b = 0, n = 12");
    let big = SearchBudget { max_nodes: u64::MAX, max_millis: 30 * 60 * 1000 };
    let out = extremal_search(0, 0, 3, 12, &limits, &big)?;
    let upper = bound_oracle(0, 0, 3, 12)?.best_value();
    println!("  size     {} ({})", out.size, out.status);
    println!("  upper    {upper} (eventown cap)");
    println!("  nodes    {}", out.nodes);
    println!("  elapsed  {:.2?}", out.elapsed);
    println!("  witness members: {}", out.witness.len());
    for s in out.witness.members().iter().take(5) {
        println!("    {s}");
    }
    println!("    ...");
    Ok(())
}
