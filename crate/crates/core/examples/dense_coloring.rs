//! A dense 3-coloring of the dyadics: the first colors and some witnesses.

use csb_shuffle::order::Dyadic;
use csb_shuffle::skolem::coloring::{make_dense_coloring, Palette};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let c = make_dense_coloring(Palette::labels(&["red", "green", "blue"]))?;
    let first: Vec<String> = (0..15)
        .map(|k| {
            let d = Dyadic::from_index(k);
            format!("{d}:{}", c.color_at(d))
        })
        .collect();
    println!("{}", first.join(" "));
    let (lo, hi) = (Dyadic::new(5, 4).unwrap(), Dyadic::new(3, 3).unwrap());
    for color in 0..3 {
        let w = c.witness(Some(lo), Some(hi), color)?;
        println!("color {color} between {lo} and {hi}: {w}");
    }
    Ok(())
}
