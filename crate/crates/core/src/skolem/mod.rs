//! Dense colorings, back-and-forth matching and shuffle witnesses.

pub mod coloring;
pub mod identities;
pub mod points;
pub mod session;
pub mod witness;

pub use coloring::{
    make_dense_coloring, make_seeded_coloring, make_shared_sentinel_colorings, Color,
    DenseColoring, Palette, SentinelSet,
};
pub use points::{Budget, Ent, Lex, Periodic, Point, Search, Shape, Structure, TreeOrder};
pub use session::{simplest_between, ColoredOrder, RationalsOrder, Session};
pub use witness::{IsoWitness, Traced};
pub use identities::{
    back_and_forth, coloring_order, ordered_sum, shuffle, term_iso, witness_absorb_set,
    witness_absorb_shuffland, witness_idempotence, OrderedSum, Presentation,
};
