//! A tour of the family generators and how the best one is picked.
//!
//! Every construction is re-checked against its claimed parameters before
//! printing, so the sizes shown are genuinely attained lower bounds.

use towns::constructions::{
    augment, best_lower_bound_named, block_construction, co_star, frankl_odlyzko, paley_hadamard,
    star,
};

fn main() -> towns::Result<()> {
    let pencil = star(2, 1, 3, 9)?;
    assert!(pencil.check_town().passed());
    println!("star for (2,1) mod 3, n = 9: {} members", pencil.len());
    for member in pencil.members().iter().take(3) {
        println!("  {member}");
    }
    println!("  ...");

    let dual = co_star(0, 2, 3, 9)?;
    assert!(dual.check_town().passed());
    println!();
    println!("co-star for (0,2) mod 3, n = 9: {} members", dual.len());
    for member in dual.members().iter().take(3) {
        println!("  {member}");
    }
    println!("  ...");

    let blocks = block_construction(1, 3, 13)?;
    assert!(blocks.check_town().passed());
    println!();
    println!(
        "block construction m = 1, k = 3, n = 13: {} members (2^{})",
        blocks.len(),
        (13 - 1) / 3
    );

    // Order 12 comes from the Paley matrix at q = 11; its rows split into
    // positive and negative supports of constant size 6.
    let h = paley_hadamard(11)?;
    println!();
    println!("paley hadamard matrix, order {}:", h.order());
    for i in 0..4 {
        let row: String = (0..h.order())
            .map(|j| if h.entry(i, j) > 0 { '+' } else { '-' })
            .collect();
        println!("  {row}");
    }
    println!("  ... ({} more rows)", h.order() - 4);

    let product = frankl_odlyzko(3, 24)?;
    assert!(product.check_town().passed());
    println!();
    println!(
        "hadamard product family k = 3, n = 24: {} members (24^2), all sizes = 0 mod 3",
        product.len()
    );

    let shifted = augment(&frankl_odlyzko(3, 23)?, 1);
    assert!(shifted.check_town().passed());
    println!(
        "augmented by one common point: {} members over {}",
        shifted.len(),
        shifted.spec()
    );

    println!();
    println!("best construction per cell, (0,2) mod 3:");
    for n in 7..=12 {
        let (family, name) = best_lower_bound_named(0, 2, 3, n)?;
        assert!(family.check_town().passed());
        println!("  n = {n:>2}: {:>3} members via {name}", family.len());
    }
    Ok(())
}
