//! The upper-bound oracle: which rules fire where, and which one wins.
//!
//! For composite moduli every prime divisor is tried separately with the
//! residues reduced; any family mod k is also a family mod each divisor, so
//! the smallest value over all fired rules is a correct bound.

use towns::bounds::{bound_oracle, BoundResult};

fn dump(result: &BoundResult) {
    println!(
        "({},{}) mod {}, n = {}:",
        result.a(),
        result.b(),
        result.k(),
        result.n()
    );
    for rule in result.rules() {
        let prime = match rule.p {
            Some(p) => format!("p = {p}"),
            None => "any modulus".into(),
        };
        let tight = if rule.tight { ", tight" } else { "" };
        println!("  {:<18} {:<12} gives {}{tight}", rule.id.name(), prime, rule.value);
    }
    let best = result.best_rule();
    println!("  best: {} via {}", result.best_value(), best.id.name());
}

fn main() -> towns::Result<()> {
    // Distinct residues mod 3: the deficit rule shaves the counting bound
    // by one and the exact table agrees.
    dump(&bound_oracle(0, 1, 3, 9)?);
    println!();

    // A schedule row away from k = 3: same shape, no exact table behind it.
    dump(&bound_oracle(2, 1, 7, 16)?);
    println!();

    // Composite modulus: the two prime divisors disagree and the better
    // one wins.
    dump(&bound_oracle(3, 1, 6, 8)?);
    println!();
    dump(&bound_oracle(4, 1, 6, 10)?);
    println!();

    // Equal residues: the bound is a power of two, kept symbolic until
    // someone asks for digits.
    let even = bound_oracle(3, 3, 6, 11)?;
    dump(&even);
    let value = even.best_value();
    println!(
        "  evaluated: {}",
        value.evaluate().map(|v| v.to_string()).unwrap_or_else(|| "too large for u128".into())
    );
    println!();

    // Symbolic values order correctly even when they cannot be evaluated.
    let huge = bound_oracle(1, 1, 2, 400)?;
    println!(
        "(1,1) mod 2, n = 400: best bound {} (exact digits would overflow u128)",
        huge.best_value()
    );
    Ok(())
}
