//! Explicit isomorphisms for shuffle{S} + shuffle{S} and friends.

use csb_shuffle::order::{enumerate, parse_term, OrderTerm};
use csb_shuffle::skolem::identities::{witness_absorb_shuffland, witness_idempotence};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let s = vec![OrderTerm::fin(1), OrderTerm::Omega];
    let w = witness_idempotence(&s)?;
    let src = parse_term("shuffle{1,w}+shuffle{1,w}")?;
    for x in enumerate(&src).take(4) {
        let y = w.forward(&x)?;
        println!("{x} -> {y} -> {}", w.backward(&y)?);
    }
    let w = witness_absorb_shuffland(&s, &OrderTerm::Omega)?;
    let src = parse_term("shuffle{1,w}+w+shuffle{1,w}")?;
    for x in enumerate(&src).take(4) {
        println!("{x} -> {}", w.forward(&x)?);
    }
    Ok(())
}
