//! Exact rationals, closed rationals and dyadic positions.
//!
//! [`Dyadic`] values in the open unit interval are the canonical model of the
//! dense order used for shuffle positions. They are enumerated breadth-first
//! (1/2, 1/4, 3/4, 1/8, ...), and that enumeration index is what every
//! deterministic schedule in the crate is keyed on.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Arbitrary precision rational, always kept in lowest terms.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rational(BigRational);

impl Rational {
    pub fn new(numer: i64, denom: i64) -> Self {
        assert!(denom != 0, "zero denominator");
        Rational(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    pub fn from_big(numer: BigInt, denom: BigInt) -> Self {
        Rational(BigRational::new(numer, denom))
    }

    pub fn integer(n: i64) -> Self {
        Rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn half() -> Self {
        Rational::new(1, 2)
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn inner(&self) -> &BigRational {
        &self.0
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn floor(&self) -> BigInt {
        self.0.floor().to_integer()
    }

    pub fn abs(&self) -> Rational {
        Rational(self.0.abs())
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    /// True for values strictly between 0 and 1.
    pub fn in_unit_open(&self) -> bool {
        self.is_positive() && self.0 < BigRational::one()
    }

    /// Comparison by cross multiplication, independent of the `Ord` impl.
    pub fn cross_cmp(&self, other: &Rational) -> Ordering {
        (self.numer() * other.denom()).cmp(&(other.numer() * self.denom()))
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident) => {
        impl std::ops::$tr<&Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational(std::ops::$tr::$method(&self.0, &rhs.0))
            }
        }
        impl std::ops::$tr<Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational(std::ops::$tr::$method(self.0, rhs.0))
            }
        }
    };
}
forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl std::ops::Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numer(), self.denom())
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rational {
    type Err = Error;

    /// Accepts `p/q` or a bare integer `p`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::TypeMismatch(format!("not a rational: {s:?}"));
        let s = s.trim();
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s, "1"),
        };
        let n: BigInt = n.parse().map_err(|_| bad())?;
        let d: BigInt = d.parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        Ok(Rational::from_big(n, d))
    }
}

/// The closed rationals: `-inf < q < +inf` for every rational `q`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExtRational {
    NegInf,
    Fin(Rational),
    PosInf,
}

impl ExtRational {
    pub fn as_fin(&self) -> Option<&Rational> {
        match self {
            ExtRational::Fin(q) => Some(q),
            _ => None,
        }
    }

    pub fn is_fin(&self) -> bool {
        matches!(self, ExtRational::Fin(_))
    }

    pub fn as_dyadic(&self) -> Option<Dyadic> {
        self.as_fin().and_then(Dyadic::from_rational)
    }
}

impl From<Dyadic> for ExtRational {
    fn from(d: Dyadic) -> Self {
        ExtRational::Fin(d.to_rational())
    }
}

impl fmt::Display for ExtRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtRational::NegInf => f.write_str("-inf"),
            ExtRational::PosInf => f.write_str("+inf"),
            ExtRational::Fin(q) => write!(f, "{q}"),
        }
    }
}

impl fmt::Debug for ExtRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for ExtRational {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "-inf" | "-oo" => Ok(ExtRational::NegInf),
            "+inf" | "inf" | "+oo" | "oo" => Ok(ExtRational::PosInf),
            other => other.parse().map(ExtRational::Fin),
        }
    }
}

/// Deepest level a [`Dyadic`] may have.
pub const MAX_LEVEL: u32 = 62;

/// A dyadic rational `num / 2^level` strictly inside (0, 1), `num` odd.
///
/// Ordering is by value.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Dyadic {
    num: u64,
    level: u32,
}

impl Dyadic {
    pub fn new(num: u64, level: u32) -> Option<Dyadic> {
        if level == 0 || level > MAX_LEVEL || num.is_multiple_of(2) || num >= (1u64 << level) {
            return None;
        }
        Some(Dyadic { num, level })
    }

    pub fn half() -> Dyadic {
        Dyadic { num: 1, level: 1 }
    }

    pub fn num(self) -> u64 {
        self.num
    }

    pub fn level(self) -> u32 {
        self.level
    }

    /// Breadth-first enumeration index: 1/2 -> 0, 1/4 -> 1, 3/4 -> 2, ...
    pub fn index(self) -> u64 {
        (1u64 << (self.level - 1)) - 1 + (self.num - 1) / 2
    }

    pub fn from_index(k: u64) -> Dyadic {
        let level = 64 - (k + 1).leading_zeros();
        let j = k + 1 - (1u64 << (level - 1));
        Dyadic {
            num: 2 * j + 1,
            level,
        }
    }

    pub fn to_rational(self) -> Rational {
        Rational::from_big(BigInt::from(self.num), BigInt::from(1u64) << self.level)
    }

    pub fn from_rational(q: &Rational) -> Option<Dyadic> {
        if !q.in_unit_open() {
            return None;
        }
        let d = q.denom();
        let level = d.bits().checked_sub(1)? as u32;
        if (BigInt::from(1u8) << level) != *d {
            return None;
        }
        let num: u64 = q.numer().try_into().ok()?;
        Dyadic::new(num, level)
    }

    /// Binary word `b1 .. bl` with `0.b1..bl` equal to the value; the last bit is 1.
    pub fn word(self) -> DyadicWord {
        let bits = (0..self.level)
            .rev()
            .map(|i| (self.num >> i) & 1 == 1)
            .collect();
        DyadicWord { bits }
    }

    /// Value scaled to a common level, for exact comparison.
    fn scaled(self, level: u32) -> u128 {
        (self.num as u128) << (level - self.level)
    }

    /// Odd-numerator dyadics of exactly `level` strictly between the bounds,
    /// in increasing order. `None` bounds mean 0 and 1.
    pub fn at_level_between(
        level: u32,
        lo: Option<Dyadic>,
        hi: Option<Dyadic>,
    ) -> impl Iterator<Item = Dyadic> {
        let first = match lo {
            None => 1u64,
            Some(a) => {
                // smallest odd m with m / 2^level > a
                let m = if a.level <= level {
                    (a.num << (level - a.level)) + 1
                } else {
                    (a.num >> (a.level - level)) + 1
                };
                m | 1
            }
        };
        let last = match hi {
            None => (1u64 << level) - 1,
            Some(b) => {
                // largest m with m / 2^level < b
                if b.level <= level {
                    (b.num << (level - b.level)).saturating_sub(1)
                } else {
                    b.num >> (b.level - level)
                }
            }
        };
        let last = if last % 2 == 0 { last.saturating_sub(1) } else { last };
        (first..=last)
            .step_by(2)
            .filter(move |&m| m >= first && m <= last)
            .map(move |num| Dyadic { num, level })
    }

    /// All dyadics strictly between the bounds in enumeration-index order.
    pub fn between(lo: Option<Dyadic>, hi: Option<Dyadic>) -> impl Iterator<Item = Dyadic> {
        (1..=MAX_LEVEL).flat_map(move |l| Dyadic::at_level_between(l, lo, hi))
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let l = self.level.max(other.level);
        self.scaled(l).cmp(&other.scaled(l))
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, 1u64 << self.level)
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Dyadic {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let q: Rational = s.parse()?;
        Dyadic::from_rational(&q).ok_or_else(|| Error::TypeMismatch(format!("not a dyadic in (0,1): {s}")))
    }
}

/// Finite binary word. Words naming order elements end in 1.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct DyadicWord {
    pub bits: Vec<bool>,
}

impl DyadicWord {
    /// Word of the `j`-th block in breadth-first order (empty word first).
    pub fn block(j: u64) -> DyadicWord {
        let len = 63 - (j + 1).leading_zeros();
        let v = j + 1 - (1u64 << len);
        DyadicWord {
            bits: (0..len).rev().map(|i| (v >> i) & 1 == 1).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    fn value_num(&self) -> u64 {
        self.bits.iter().fold(0u64, |acc, &b| (acc << 1) | b as u64)
    }

    /// The dyadic `0.w`; `None` for the empty word or words not ending in 1.
    pub fn to_dyadic(&self) -> Option<Dyadic> {
        if self.bits.last() != Some(&true) {
            return None;
        }
        Dyadic::new(self.value_num(), self.bits.len() as u32)
    }

    /// Open interval of all dyadics whose word extends this one, as bounds
    /// usable with [`Dyadic::between`]. `None` stands for 0 or 1.
    pub fn block_bounds(&self) -> (Option<Dyadic>, Option<Dyadic>) {
        let l = self.bits.len() as u32;
        let v = self.value_num();
        let to = |num: u64| -> Option<Dyadic> {
            if num == 0 || num == (1u64 << l) {
                return None;
            }
            let tz = num.trailing_zeros().min(l);
            Dyadic::new(num >> tz, l - tz)
        };
        (to(v), to(v + 1))
    }

    /// Whether `d` lies strictly inside this word's block.
    pub fn contains(&self, d: Dyadic) -> bool {
        let l = self.bits.len() as u32;
        d.level > l && (d.num >> (d.level - l)) == self.value_num()
    }
}

/// Quaternary interval layout for dyadic positions.
///
/// The position with word `u1` owns the half-open slot
/// `[x_u + 4^-l, x_u + 2 * 4^-l)` where `l = |u1|` and `x_u` writes the bits of
/// `u` as base-4 digits 0 and 2. Slots of distinct positions are disjoint and
/// ordered like the positions, so an inner value in (0, 1) can be placed in
/// the slot of its position and recovered again.
pub fn slot_of(pos: Dyadic) -> (Rational, Rational) {
    let word = pos.word();
    let l = word.len();
    let mut start = BigInt::zero();
    for &b in &word.bits[..l - 1] {
        start = start * 4 + if b { 2 } else { 0 };
    }
    start = start * 4 + 1;
    let denom = BigInt::from(1u8) << (2 * l);
    (
        Rational::from_big(start, denom.clone()),
        Rational::from_big(BigInt::one(), denom),
    )
}

/// Places `inner` (in (0,1)) inside the slot of `pos`.
pub fn slot_place(pos: Dyadic, inner: &Rational) -> Rational {
    let (start, width) = slot_of(pos);
    &start + &(&width * inner)
}

/// Inverse of [`slot_place`]: recovers the position and the inner value.
pub fn slot_locate(value: &Rational) -> Result<(Dyadic, Rational)> {
    if !value.in_unit_open() {
        return Err(Error::NotInImage);
    }
    let four = Rational::integer(4);
    let mut r = value.clone();
    let mut num = 0u64;
    for level in 1..=MAX_LEVEL {
        let scaled = &r * &four;
        let digit = scaled.floor();
        r = &scaled - &Rational::from_big(digit.clone(), BigInt::one());
        let digit: u8 = digit.try_into().map_err(|_| Error::NotInImage)?;
        match digit {
            0 => num <<= 1,
            2 => num = (num << 1) | 1,
            1 => {
                num = (num << 1) | 1;
                if r.is_zero_value() {
                    return Err(Error::NotInImage);
                }
                let pos = Dyadic::new(num, level).ok_or(Error::NotInImage)?;
                return Ok((pos, r));
            }
            _ => return Err(Error::NotInImage),
        }
    }
    Err(Error::NotInImage)
}

impl Rational {
    pub(crate) fn is_zero_value(&self) -> bool {
        self.0.is_zero()
    }
}
