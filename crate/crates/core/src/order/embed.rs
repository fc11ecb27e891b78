//! Order embeddings of term orders into the rationals of (0, 1).
//!
//! Sums split (0, 1) at 1/2, finite orders use equally spaced points, `w`
//! uses `1 - 1/(k+2)`, reversal uses `x -> 1 - x`, and shuffles place each
//! position's block into a disjoint quaternary slot (see
//! [`slot_of`](crate::order::rational::slot_of)). Every map is invertible in
//! closed form, so no allocation state is kept.

use num_bigint::BigInt;
use num_traits::One;

use crate::error::{Error, Result};
use crate::order::element::{typecheck, Element};
use crate::order::rational::{slot_locate, slot_place, Rational};
use crate::order::term::OrderTerm;
use crate::skolem::coloring::shuffle_engine;

/// Strictly monotone embedding of `t` into (0, 1).
pub fn embed_in_q(t: &OrderTerm, e: &Element) -> Result<Rational> {
    typecheck(t, e)?;
    Ok(forward(t, e))
}

fn forward(t: &OrderTerm, e: &Element) -> Rational {
    match (t, e) {
        (OrderTerm::FinOrd(n), Element::Idx(k)) => Rational::new(*k as i64 + 1, *n as i64 + 1),
        (OrderTerm::Omega, Element::Idx(k)) => {
            Rational::one() - Rational::from_big(BigInt::one(), BigInt::from(*k) + 2)
        }
        (OrderTerm::Rationals, Element::Rat(x)) => {
            let half = Rational::half();
            let denom = Rational::integer(2) * (Rational::one() + x.abs());
            &half + &(x / &denom)
        }
        (OrderTerm::Reverse(s), Element::Rev(x)) => Rational::one() - forward(s, x),
        (OrderTerm::Sum(a, _), Element::Left(x)) => forward(a, x) / Rational::integer(2),
        (OrderTerm::Sum(_, b), Element::Right(x)) => {
            (Rational::one() + forward(b, x)) / Rational::integer(2)
        }
        (OrderTerm::Shuffle(ps), Element::Shuf { pos, color, sub }) => {
            slot_place(*pos, &forward(&ps[*color], sub))
        }
        _ => unreachable!("typechecked"),
    }
}

/// Inverse of [`embed_in_q`]; `NotInImage` for values outside the image.
pub fn invert_from_q(t: &OrderTerm, r: &Rational) -> Result<Element> {
    if !r.in_unit_open() {
        return Err(Error::NotInImage);
    }
    match t {
        OrderTerm::Zero => Err(Error::NotInImage),
        OrderTerm::FinOrd(n) => {
            let k1 = r * &Rational::integer(*n as i64 + 1);
            if !k1.is_integer() {
                return Err(Error::NotInImage);
            }
            let k: u64 = (k1.floor() - 1u8).try_into().map_err(|_| Error::NotInImage)?;
            if k < *n {
                Ok(Element::Idx(k))
            } else {
                Err(Error::NotInImage)
            }
        }
        OrderTerm::Omega => {
            let k2 = Rational::one() / (Rational::one() - r.clone());
            if !k2.is_integer() || k2.floor() < BigInt::from(2) {
                return Err(Error::NotInImage);
            }
            let k: u64 = (k2.floor() - 2u8).try_into().map_err(|_| Error::NotInImage)?;
            Ok(Element::Idx(k))
        }
        OrderTerm::Rationals => {
            let y = Rational::integer(2) * r.clone() - Rational::one();
            let x = &y / &(Rational::one() - y.abs());
            Ok(Element::Rat(x))
        }
        OrderTerm::Reverse(s) => Ok(Element::rev(invert_from_q(s, &(Rational::one() - r.clone()))?)),
        OrderTerm::Sum(a, b) => {
            let two = Rational::integer(2);
            let half = Rational::half();
            if *r < half {
                Ok(Element::left(invert_from_q(a, &(r * &two))?))
            } else if *r > half {
                Ok(Element::right(invert_from_q(b, &(r * &two - Rational::one()))?))
            } else {
                Err(Error::NotInImage)
            }
        }
        OrderTerm::Shuffle(ps) => {
            let (pos, inner) = slot_locate(r)?;
            let color = shuffle_engine(ps.len()).color_of_index(pos.index());
            Ok(Element::shuf(pos, color, invert_from_q(&ps[color], &inner)?))
        }
    }
}

/// The embedding of one term as a value with both directions.
#[derive(Clone, Debug)]
pub struct QEmbedding {
    pub term: OrderTerm,
}

impl QEmbedding {
    pub fn new(term: OrderTerm) -> QEmbedding {
        QEmbedding { term }
    }

    pub fn forward(&self, e: &Element) -> Result<Rational> {
        embed_in_q(&self.term, e)
    }

    pub fn invert(&self, r: &Rational) -> Result<Element> {
        invert_from_q(&self.term, r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::order::{enumerate, parse_term};

    #[test]
    fn omega_is_monotone() {
        let vals: Vec<Rational> = (0..100)
            .map(|k| embed_in_q(&OrderTerm::Omega, &Element::Idx(k)).unwrap())
            .collect();
        assert!(vals.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn roundtrip_on_corpus() {
        for s in [
            "3",
            "w",
            "rev(w)",
            "Q",
            "shuffle{1}",
            "shuffle{1,2}",
            "shuffle{2,w}",
            "w+rev(w)",
            "shuffle{Q+1,shuffle{1}}",
        ] {
            let t = parse_term(s).unwrap();
            let elems: Vec<Element> = enumerate(&t).take(300).collect();
            let mut sorted = elems.clone();
            sorted.sort_by(|a, b| crate::order::element::compare_unchecked(&t, a, b));
            let images: Vec<Rational> = sorted.iter().map(|e| embed_in_q(&t, e).unwrap()).collect();
            assert!(images.windows(2).all(|w| w[0] < w[1]), "{s}");
            for (e, r) in sorted.iter().zip(&images) {
                assert_eq!(&invert_from_q(&t, r).unwrap(), e, "{s}");
            }
        }
    }

    #[test]
    fn outside_image() {
        let t = parse_term("1+1").unwrap();
        assert_eq!(invert_from_q(&t, &Rational::half()), Err(Error::NotInImage));
        assert_eq!(invert_from_q(&OrderTerm::FinOrd(2), &Rational::new(1, 2)), Err(Error::NotInImage));
        assert_eq!(invert_from_q(&OrderTerm::Zero, &Rational::new(1, 3)), Err(Error::NotInImage));
        assert_eq!(invert_from_q(&OrderTerm::Omega, &Rational::new(1, 3)), Err(Error::NotInImage));
    }
}
