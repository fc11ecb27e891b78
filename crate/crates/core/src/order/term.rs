//! Terms denoting countable linear orders.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A finite description of a countable linear order.
///
/// `Shuffle` parts are kept normalized: no `Zero` parts, no structural
/// duplicates, at least one part. Use [`OrderTerm::shuffle`] to build one.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum OrderTerm {
    Zero,
    FinOrd(u64),
    Omega,
    Rationals,
    Reverse(Box<OrderTerm>),
    Sum(Box<OrderTerm>, Box<OrderTerm>),
    Shuffle(Vec<OrderTerm>),
}

impl OrderTerm {
    pub fn fin(n: u64) -> OrderTerm {
        if n == 0 {
            OrderTerm::Zero
        } else {
            OrderTerm::FinOrd(n)
        }
    }

    pub fn rev(t: OrderTerm) -> OrderTerm {
        OrderTerm::Reverse(Box::new(t))
    }

    pub fn sum(a: OrderTerm, b: OrderTerm) -> OrderTerm {
        OrderTerm::Sum(Box::new(a), Box::new(b))
    }

    /// Normalizing shuffle constructor. Empty parts are dropped and duplicates
    /// removed, keeping first occurrences. A shuffle of only empty parts is `Zero`.
    pub fn shuffle(parts: Vec<OrderTerm>) -> Result<OrderTerm> {
        if parts.is_empty() {
            return Err(Error::EmptyShuffle);
        }
        let mut kept: Vec<OrderTerm> = Vec::with_capacity(parts.len());
        for p in parts {
            if !p.is_empty() && !kept.contains(&p) {
                kept.push(p);
            }
        }
        if kept.is_empty() {
            Ok(OrderTerm::Zero)
        } else {
            Ok(OrderTerm::Shuffle(kept))
        }
    }

    /// Re-normalizes every shuffle inside the term.
    pub fn normalized(&self) -> OrderTerm {
        match self {
            OrderTerm::Reverse(t) => OrderTerm::rev(t.normalized()),
            OrderTerm::Sum(a, b) => OrderTerm::sum(a.normalized(), b.normalized()),
            OrderTerm::Shuffle(ps) => {
                OrderTerm::shuffle(ps.iter().map(|p| p.normalized()).collect())
                    .unwrap_or(OrderTerm::Zero)
            }
            t => t.clone(),
        }
    }

    pub fn is_empty(&self) -> bool {
        match self {
            OrderTerm::Zero => true,
            OrderTerm::Reverse(t) => t.is_empty(),
            OrderTerm::Sum(a, b) => a.is_empty() && b.is_empty(),
            OrderTerm::Shuffle(ps) => ps.iter().all(|p| p.is_empty()),
            _ => false,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.cardinality().is_some()
    }

    /// Number of elements, or `None` when infinite.
    pub fn cardinality(&self) -> Option<u64> {
        match self {
            OrderTerm::Zero => Some(0),
            OrderTerm::FinOrd(n) => Some(*n),
            OrderTerm::Omega | OrderTerm::Rationals => None,
            OrderTerm::Reverse(t) => t.cardinality(),
            OrderTerm::Sum(a, b) => Some(a.cardinality()? + b.cardinality()?),
            OrderTerm::Shuffle(ps) => {
                if ps.iter().all(|p| p.is_empty()) {
                    Some(0)
                } else {
                    None
                }
            }
        }
    }

    pub fn has_min(&self) -> bool {
        match self {
            OrderTerm::Zero | OrderTerm::Rationals | OrderTerm::Shuffle(_) => false,
            OrderTerm::FinOrd(_) | OrderTerm::Omega => true,
            OrderTerm::Reverse(t) => t.has_max(),
            OrderTerm::Sum(a, b) => {
                if a.is_empty() {
                    b.has_min()
                } else {
                    a.has_min()
                }
            }
        }
    }

    pub fn has_max(&self) -> bool {
        match self {
            OrderTerm::Zero | OrderTerm::Rationals | OrderTerm::Shuffle(_) | OrderTerm::Omega => {
                false
            }
            OrderTerm::FinOrd(_) => true,
            OrderTerm::Reverse(t) => t.has_min(),
            OrderTerm::Sum(a, b) => {
                if b.is_empty() {
                    a.has_max()
                } else {
                    b.has_max()
                }
            }
        }
    }

    /// Whether some pair `x < y` has nothing strictly between.
    pub fn has_adjacent(&self) -> bool {
        match self {
            OrderTerm::Zero | OrderTerm::Rationals => false,
            OrderTerm::FinOrd(n) => *n >= 2,
            OrderTerm::Omega => true,
            OrderTerm::Reverse(t) => t.has_adjacent(),
            OrderTerm::Sum(a, b) => {
                a.has_adjacent()
                    || b.has_adjacent()
                    || (!a.is_empty() && !b.is_empty() && a.has_max() && b.has_min())
            }
            OrderTerm::Shuffle(ps) => ps.iter().any(|p| p.has_adjacent()),
        }
    }

    /// Dense with at least two elements.
    pub fn is_dense(&self) -> bool {
        !self.has_adjacent() && self.cardinality().is_none_or(|n| n >= 2)
    }
}

impl fmt::Display for OrderTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrderTerm::Zero => f.write_str("0"),
            OrderTerm::FinOrd(n) => write!(f, "{n}"),
            OrderTerm::Omega => f.write_str("w"),
            OrderTerm::Rationals => f.write_str("Q"),
            OrderTerm::Reverse(t) => write!(f, "rev({t})"),
            OrderTerm::Sum(a, b) => {
                if matches!(**b, OrderTerm::Sum(..)) {
                    write!(f, "{a}+({b})")
                } else {
                    write!(f, "{a}+{b}")
                }
            }
            OrderTerm::Shuffle(ps) => {
                f.write_str("shuffle{")?;
                for (k, p) in ps.iter().enumerate() {
                    if k > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{p}")?;
                }
                f.write_str("}")
            }
        }
    }
}

impl FromStr for OrderTerm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_term(s)
    }
}

/// Parses and normalizes a term.
///
/// ```
/// use csb_shuffle::order::{parse_term, OrderTerm};
/// let t = parse_term("shuffle{0, 1, 1}").unwrap();
/// assert_eq!(t, OrderTerm::Shuffle(vec![OrderTerm::FinOrd(1)]));
/// ```
pub fn parse_term(text: &str) -> Result<OrderTerm> {
    let mut p = Parser {
        chars: text.chars().collect(),
        at: 0,
    };
    let t = p.sum()?;
    p.skip_ws();
    if p.at < p.chars.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(t)
}

struct Parser {
    chars: Vec<char>,
    at: usize,
}

impl Parser {
    fn error(&self, message: &str) -> Error {
        let mut line = 1;
        let mut column = 1;
        for &c in &self.chars[..self.at.min(self.chars.len())] {
            if c == '\n' {
                line += 1;
                column = 1;
            } else {
                column += 1;
            }
        }
        Error::Syntax {
            line,
            column,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.at < self.chars.len() && self.chars[self.at].is_whitespace() {
            self.at += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.at).copied()
    }

    fn eat(&mut self, word: &str) -> bool {
        self.skip_ws();
        let w: Vec<char> = word.chars().collect();
        if self.chars[self.at..].starts_with(&w) {
            self.at += w.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, word: &str) -> Result<()> {
        if self.eat(word) {
            Ok(())
        } else {
            Err(self.error(&format!("expected `{word}`")))
        }
    }

    fn sum(&mut self) -> Result<OrderTerm> {
        let mut t = self.atom()?;
        while self.eat("+") {
            let rhs = self.atom()?;
            t = OrderTerm::sum(t, rhs);
        }
        Ok(t)
    }

    fn atom(&mut self) -> Result<OrderTerm> {
        match self.peek() {
            None => Err(self.error("unexpected end of input")),
            Some(c) if c.is_ascii_digit() => {
                let start = self.at;
                while self.at < self.chars.len() && self.chars[self.at].is_ascii_digit() {
                    self.at += 1;
                }
                let digits: String = self.chars[start..self.at].iter().collect();
                let n: u64 = digits.parse().map_err(|_| {
                    self.at = start;
                    self.error("integer out of range")
                })?;
                Ok(OrderTerm::fin(n))
            }
            Some('w') => {
                self.at += 1;
                Ok(OrderTerm::Omega)
            }
            Some('Q') => {
                self.at += 1;
                Ok(OrderTerm::Rationals)
            }
            Some('(') => {
                self.at += 1;
                let t = self.sum()?;
                self.expect(")")?;
                Ok(t)
            }
            Some('r') => {
                self.expect("rev")?;
                self.expect("(")?;
                let t = self.sum()?;
                self.expect(")")?;
                Ok(OrderTerm::rev(t))
            }
            Some('s') => {
                self.expect("shuffle")?;
                self.expect("{")?;
                if self.peek() == Some('}') {
                    return Err(Error::EmptyShuffle);
                }
                let mut parts = vec![self.sum()?];
                while self.eat(",") {
                    parts.push(self.sum()?);
                }
                self.expect("}")?;
                OrderTerm::shuffle(parts)
            }
            Some(_) => Err(self.error("expected a term")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> OrderTerm {
        parse_term(s).unwrap()
    }

    #[test]
    fn grammar() {
        assert_eq!(
            p("shuffle{1,2}"),
            OrderTerm::Shuffle(vec![OrderTerm::FinOrd(1), OrderTerm::FinOrd(2)])
        );
        assert_eq!(p("shuffle{0,1}"), OrderTerm::Shuffle(vec![OrderTerm::FinOrd(1)]));
        assert_eq!(p("shuffle{0}"), OrderTerm::Zero);
        assert_eq!(parse_term("shuffle{}"), Err(Error::EmptyShuffle));
        assert_eq!(
            p("rev(w)+1"),
            OrderTerm::sum(OrderTerm::rev(OrderTerm::Omega), OrderTerm::FinOrd(1))
        );
        assert_eq!(
            p("1 + 2 + 3"),
            OrderTerm::sum(
                OrderTerm::sum(OrderTerm::FinOrd(1), OrderTerm::FinOrd(2)),
                OrderTerm::FinOrd(3)
            )
        );
    }

    #[test]
    fn syntax_errors_carry_positions() {
        match parse_term("1 +\n  x") {
            Err(Error::Syntax { line, column, .. }) => assert_eq!((line, column), (2, 3)),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_term("shuffle{1"), Err(Error::Syntax { .. })));
        assert!(matches!(parse_term("1 2"), Err(Error::Syntax { .. })));
    }

    #[test]
    fn display_roundtrips() {
        for s in [
            "0",
            "3",
            "w",
            "Q",
            "rev(w)",
            "w+rev(w)",
            "1+(2+3)",
            "shuffle{1,2}",
            "shuffle{2,w}",
            "shuffle{1,shuffle{1}}",
            "rev(shuffle{Q+1})+w",
        ] {
            let t = p(s);
            assert_eq!(p(&t.to_string()), t, "{s}");
        }
    }

    #[test]
    fn structural_probes() {
        assert!(p("shuffle{2}").has_adjacent());
        assert!(!p("shuffle{1}").has_adjacent());
        assert!(p("w+rev(w)").has_adjacent());
        assert!(p("rev(w)+w").has_adjacent());
        assert!(!p("Q+Q").has_adjacent());
        assert!(p("1+Q").has_min());
        assert!(!p("rev(w)").has_min());
        assert!(p("rev(w)").has_max());
        assert_eq!(p("2+3").cardinality(), Some(5));
        assert!(p("shuffle{1}").is_dense());
    }
}
