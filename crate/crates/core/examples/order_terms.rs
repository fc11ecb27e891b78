//! Parses order terms, lists a few elements in order and compares them.

use csb_shuffle::order::{compare, embed_in_q, parse_term, Enumeration};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for text in ["3+rev(w)", "w+rev(w)", "shuffle{0,1,2}", "shuffle{2,w}"] {
        let t = parse_term(text)?;
        println!("{text} => {t} (dense: {}, adjacent pairs: {})", t.is_dense(), t.has_adjacent());
        let mut xs = Enumeration::new(&t).prefix(5);
        xs.sort_by(|a, b| compare(&t, a, b).unwrap());
        for x in &xs {
            println!("  {x} -> {}", embed_in_q(&t, x)?);
        }
    }
    Ok(())
}
