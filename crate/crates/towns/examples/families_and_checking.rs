//! Families as bitsets, the membership checker, and the text format.
//!
//! Builds a valid (1,0) mod 2 family by hand, breaks it, shows what the
//! checker reports, and round-trips the family through its file format.

use towns::{Family, SetWord, TownSpec};

fn main() -> towns::Result<()> {
    let spec = TownSpec::new(5, 2, 1, 0)?;
    let mut family = Family::empty(spec);
    family.push(SetWord::from_elements(5, &[1, 2, 3])?)?;
    family.push(SetWord::from_elements(5, &[1, 2, 4])?)?;
    family.push(SetWord::from_elements(5, &[1, 2, 5])?)?;

    println!("family over {spec}:");
    for member in family.members() {
        println!("  {member}  (|.| = {})", member.cardinality());
    }
    let report = family.check_town();
    assert!(report.passed());
    println!("checker: valid town (odd sizes, even pairwise intersections)");

    // Same sets, wrong claim: as a (1,1) mod 2 family every pair is flagged
    // because the size-2 intersections are even.
    let wrong = Family::new(TownSpec::new(5, 2, 1, 1)?, family.members().to_vec())?;
    let report = wrong.check_town();
    println!();
    println!("reinterpreted over {}:", wrong.spec());
    for violation in report.violations() {
        println!("  {violation}");
    }

    // The text format: header `n k a b`, then one member per line.
    println!();
    let text = family.render();
    println!("rendered:\n{text}");
    let parsed = Family::parse(&text)?;
    assert_eq!(parsed.render(), text);
    println!("round-trips losslessly");

    // Complementation sends (1,0) mod 2 at n = 5 to (0,1) and stays valid.
    let flipped = family.substitute();
    println!();
    println!("complemented family over {}:", flipped.spec());
    for member in flipped.members() {
        println!("  {member}");
    }
    assert!(flipped.check_town().passed());
    assert_eq!(flipped.substitute().render(), family.render());
    println!("complementation is an involution");
    Ok(())
}
