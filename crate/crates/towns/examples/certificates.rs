//! Linear-algebra certificates over GF(p^2).
//!
//! Each member becomes its indicator vector extended by a fixed α with
//! α^2 = -b; the Gram matrix of a valid family is forced to (a-b)·I. When
//! a ≠ b mod p that gives linear independence (size ≤ n), when a = b it
//! gives a totally isotropic span (size ≤ 2^⌊(n+1)/2⌋). A false claim
//! surfaces as a rank deficit.

use towns::algebra::{alpha_vectors, gram_matrix, independence_certificate, isotropy_certificate};
use towns::constructions::{frankl_odlyzko, star};
use towns::Family;

fn main() -> towns::Result<()> {
    let family = star(2, 1, 3, 9)?;
    let cert = independence_certificate(&family, 3)?;
    println!("independence certificate for a (2,1) mod 3 star, n = 9:");
    println!("{}", serde_json::to_string_pretty(&cert.to_json()).unwrap());
    assert!(cert.holds && cert.rank == family.len());

    // The Gram matrix itself: diagonal a-b = 1, zero elsewhere.
    let system = alpha_vectors(&family, 3)?;
    let gram = gram_matrix(&system.field, &system.vectors);
    println!();
    println!("its gram matrix over GF(9), r = {}:", system.field.r());
    for i in 0..family.len() {
        let row: Vec<String> = (0..family.len()).map(|j| gram.get(i, j).to_string()).collect();
        println!("  [{}]", row.join(" "));
    }

    let product = frankl_odlyzko(3, 12)?;
    let cert = isotropy_certificate(&product, 3)?;
    println!();
    println!("isotropy certificate for the 24-member product family, n = 12:");
    println!("{}", serde_json::to_string_pretty(&cert.to_json()).unwrap());
    assert!(cert.holds);
    println!(
        "an isotropic span of rank {} admits at most 2^{} = {} members; {} seen",
        cert.rank,
        cert.rank,
        1u32 << cert.rank,
        cert.size
    );

    // {1,2} = {1} + {2} over GF(3), so the claimed (1,0) mod 3 town cannot
    // have independent vectors; the certificate refuses to hold.
    let fake = Family::parse("2 3 1 0\n1\n2\n1 2\n")?;
    let cert = independence_certificate(&fake, 3)?;
    println!();
    println!("a false claim (three sets said to pairwise meet in 0 mod 3):");
    println!("  holds = {}, rank = {} over {} members", cert.holds, cert.rank, cert.size);
    assert!(!cert.holds);
    Ok(())
}
