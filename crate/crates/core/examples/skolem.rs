//! Two different dense colorings over the same palette are isomorphic:
//! the back-and-forth witness, checked on samples.

use csb_shuffle::check::{iso_check, Plan};
use csb_shuffle::skolem::coloring::{make_dense_coloring, make_seeded_coloring, Palette};
use csb_shuffle::skolem::identities::{back_and_forth, coloring_order};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let a = make_dense_coloring(Palette::labels(&["a", "b"]))?;
    let b = make_seeded_coloring(Palette::labels(&["a", "b"]), 7)?;
    let (oa, ob) = (coloring_order(&a), coloring_order(&b));
    let src: Vec<_> = (0..300).map(|k| oa.nth(k)).collect();
    let dst: Vec<_> = (0..100).map(|k| ob.nth(k)).collect();
    let w = back_and_forth(oa, ob)?;
    for p in src.iter().take(5) {
        println!("{p} -> {}", w.forward(p)?);
    }
    let r = iso_check(&w, &src, &dst, Plan::new(500, 200, 0, 1), None);
    println!("{}", serde_json::to_string(&r.to_json())?);
    Ok(())
}
