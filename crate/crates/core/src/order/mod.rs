//! Order terms, their elements, enumeration and embeddings into the rationals.

pub mod element;
pub mod embed;
pub mod enumerate;
pub mod rational;
pub mod term;

pub use element::{compare, reverse_semantics, typecheck, Element};
pub use embed::{embed_in_q, invert_from_q};
pub use enumerate::{enumerate, Enumeration};
pub use rational::{Dyadic, DyadicWord, ExtRational, Rational};
pub use term::{parse_term, OrderTerm};
