//! Finite binary words and single coordinates of Cantor space.
//!
//! A [`Coordinate`] is an infinite binary sequence with a finite description:
//! either eventually periodic (`A·w·w·w…`) or a named aperiodic stream with a
//! finite modification at the front. Both variants are kept in a canonical
//! form so that equality of the infinite words is plain structural equality.

use std::fmt;

use crate::error::{Error, Result};

/// A finite word over `{0, 1}`.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BinaryWord(Vec<bool>);

impl BinaryWord {
    pub const EMPTY: BinaryWord = BinaryWord(Vec::new());

    pub fn empty() -> Self {
        BinaryWord(Vec::new())
    }

    pub fn from_bits(bits: impl IntoIterator<Item = bool>) -> Self {
        BinaryWord(bits.into_iter().collect())
    }

    /// Parses a word from a string of `0`s and `1`s. Returns `None` on any
    /// other character.
    pub fn parse(s: &str) -> Option<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Some(false),
                '1' => Some(true),
                _ => None,
            })
            .collect::<Option<Vec<_>>>()
            .map(BinaryWord)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn get(&self, i: usize) -> Option<bool> {
        self.0.get(i).copied()
    }

    pub fn last(&self) -> Option<bool> {
        self.0.last().copied()
    }

    pub fn push(&mut self, bit: bool) {
        self.0.push(bit);
    }

    pub fn pop(&mut self) -> Option<bool> {
        self.0.pop()
    }

    /// The word extended by one symbol.
    pub fn child(&self, bit: bool) -> Self {
        let mut w = self.clone();
        w.push(bit);
        w
    }

    pub fn concat(&self, other: &BinaryWord) -> Self {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        BinaryWord(v)
    }

    pub fn slice(&self, start: usize, end: usize) -> Self {
        BinaryWord(self.0[start..end].to_vec())
    }

    pub fn suffix_from(&self, start: usize) -> Self {
        BinaryWord(self.0[start..].to_vec())
    }

    pub fn is_prefix_of(&self, other: &BinaryWord) -> bool {
        other.0.starts_with(&self.0)
    }

    /// Two words are comparable when one is a prefix of the other; the
    /// cylinder sets they name then intersect.
    pub fn comparable(&self, other: &BinaryWord) -> bool {
        self.is_prefix_of(other) || other.is_prefix_of(self)
    }

    pub fn repeat(&self, times: usize) -> Self {
        BinaryWord(self.0.repeat(times))
    }

    /// Rotation that moves the last symbol to the front.
    fn rotate_right(&mut self) {
        self.0.rotate_right(1);
    }

    fn rotate_left_by(&mut self, k: usize) {
        if !self.0.is_empty() {
            let k = k % self.0.len();
            self.0.rotate_left(k);
        }
    }

    /// The shortest word `u` with `self = u^k`.
    pub fn primitive_root(&self) -> BinaryWord {
        let n = self.0.len();
        for d in 1..n {
            if n.is_multiple_of(d) && self.0.chunks(d).all(|c| c == &self.0[..d]) {
                return BinaryWord(self.0[..d].to_vec());
            }
        }
        self.clone()
    }

    pub fn is_primitive(&self) -> bool {
        !self.is_empty() && self.primitive_root().len() == self.len()
    }
}

impl fmt::Display for BinaryWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BinaryWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            f.write_str("ε")
        } else {
            write!(f, "\"{self}\"")
        }
    }
}

/// Named aperiodic streams usable as irrational coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Stream {
    /// Symbol `i` is the parity of the number of ones in the binary expansion of `i`.
    ThueMorse,
}

impl Stream {
    pub fn symbol(self, i: u64) -> bool {
        match self {
            Stream::ThueMorse => i.count_ones() % 2 == 1,
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            Stream::ThueMorse => "TM",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        match tag {
            "TM" => Some(Stream::ThueMorse),
            _ => None,
        }
    }
}

/// An eventually periodic word `preamble · period^∞` in canonical form:
/// the period is primitive and the preamble is as short as possible.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RationalCoord {
    preamble: BinaryWord,
    period: BinaryWord,
}

impl RationalCoord {
    pub fn preamble(&self) -> &BinaryWord {
        &self.preamble
    }

    pub fn period(&self) -> &BinaryWord {
        &self.period
    }
}

/// `prepend · σ^drop(stream)` in canonical form: no trailing symbol of
/// `prepend` can be pushed back into the stream by decrementing `drop`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AperiodicCoord {
    stream: Stream,
    drop: u64,
    prepend: BinaryWord,
}

impl AperiodicCoord {
    pub fn stream(&self) -> Stream {
        self.stream
    }

    pub fn drop(&self) -> u64 {
        self.drop
    }

    pub fn prepend(&self) -> &BinaryWord {
        &self.prepend
    }

    fn canonicalize(mut self) -> Self {
        while self.drop > 0 && self.prepend.last() == Some(self.stream.symbol(self.drop - 1)) {
            self.prepend.pop();
            self.drop -= 1;
        }
        self
    }
}

/// One coordinate of a point of Cantor space.
///
/// Values are always canonical, so the derived `PartialEq` decides equality
/// of the underlying infinite words.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Coordinate {
    Rational(RationalCoord),
    Aperiodic(AperiodicCoord),
}

impl Coordinate {
    /// Canonical form of `preamble · period^∞`.
    ///
    /// The period is reduced to its primitive root, then trailing preamble
    /// symbols equal to the period's last symbol are absorbed by rotating
    /// the period right.
    pub fn rational(preamble: BinaryWord, period: BinaryWord) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::InvalidPeriod);
        }
        let mut preamble = preamble;
        let mut period = period.primitive_root();
        while !preamble.is_empty() && preamble.last() == period.last() {
            preamble.pop();
            period.rotate_right();
        }
        Ok(Coordinate::Rational(RationalCoord { preamble, period }))
    }

    /// Convenience constructor from `0`/`1` strings. Panics on malformed input.
    pub fn rational_str(preamble: &str, period: &str) -> Self {
        let a = BinaryWord::parse(preamble).expect("preamble must be a binary string");
        let w = BinaryWord::parse(period).expect("period must be a binary string");
        Coordinate::rational(a, w).expect("period must be nonempty")
    }

    pub fn aperiodic(stream: Stream, drop: u64, prepend: BinaryWord) -> Self {
        Coordinate::Aperiodic(
            AperiodicCoord {
                stream,
                drop,
                prepend,
            }
            .canonicalize(),
        )
    }

    /// The constant sequence `bit^∞`.
    pub fn constant(bit: bool) -> Self {
        Coordinate::Rational(RationalCoord {
            preamble: BinaryWord::empty(),
            period: BinaryWord::from_bits([bit]),
        })
    }

    pub fn thue_morse() -> Self {
        Coordinate::aperiodic(Stream::ThueMorse, 0, BinaryWord::empty())
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, Coordinate::Rational(_))
    }

    pub fn as_rational(&self) -> Option<&RationalCoord> {
        match self {
            Coordinate::Rational(r) => Some(r),
            Coordinate::Aperiodic(_) => None,
        }
    }

    pub fn symbol(&self, i: usize) -> bool {
        match self {
            Coordinate::Rational(r) => {
                let a = r.preamble.len();
                if i < a {
                    r.preamble.0[i]
                } else {
                    r.period.0[(i - a) % r.period.len()]
                }
            }
            Coordinate::Aperiodic(s) => {
                let u = s.prepend.len();
                if i < u {
                    s.prepend.0[i]
                } else {
                    s.stream.symbol(s.drop + (i - u) as u64)
                }
            }
        }
    }

    /// The first `length` symbols.
    pub fn prefix(&self, length: usize) -> BinaryWord {
        BinaryWord((0..length).map(|i| self.symbol(i)).collect())
    }

    pub fn starts_with(&self, p: &BinaryWord) -> bool {
        p.0.iter().enumerate().all(|(i, &b)| self.symbol(i) == b)
    }

    /// The tail left after removing the leading word `p`.
    pub fn strip_prefix(&self, p: &BinaryWord) -> Result<Self> {
        if !self.starts_with(p) {
            return Err(Error::PrefixMismatch {
                prefix: p.to_string(),
            });
        }
        let k = p.len();
        Ok(match self {
            Coordinate::Rational(r) => {
                let a = r.preamble.len();
                if k <= a {
                    Coordinate::rational(r.preamble.suffix_from(k), r.period.clone())?
                } else {
                    let mut period = r.period.clone();
                    period.rotate_left_by(k - a);
                    Coordinate::rational(BinaryWord::empty(), period)?
                }
            }
            Coordinate::Aperiodic(s) => {
                let u = s.prepend.len();
                if k <= u {
                    Coordinate::aperiodic(s.stream, s.drop, s.prepend.suffix_from(k))
                } else {
                    Coordinate::aperiodic(s.stream, s.drop + (k - u) as u64, BinaryWord::empty())
                }
            }
        })
    }

    /// The word `q` followed by this coordinate.
    pub fn prepend(&self, q: &BinaryWord) -> Self {
        match self {
            Coordinate::Rational(r) => Coordinate::rational(q.concat(&r.preamble), r.period.clone())
                .expect("canonical period is nonempty"),
            Coordinate::Aperiodic(s) => Coordinate::aperiodic(s.stream, s.drop, q.concat(&s.prepend)),
        }
    }

    /// Replaces the leading word `from` by `to`.
    pub fn replace_prefix(&self, from: &BinaryWord, to: &BinaryWord) -> Result<Self> {
        Ok(self.strip_prefix(from)?.prepend(to))
    }
}

/// Equality of the infinite words named by two coordinates.
pub fn coords_equal(a: &Coordinate, b: &Coordinate) -> bool {
    a == b
}

impl fmt::Display for Coordinate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coordinate::Rational(r) => write!(f, "{}({})", r.preamble, r.period),
            Coordinate::Aperiodic(s) => write!(f, "{}~{}[{}]", s.prepend, s.stream.tag(), s.drop),
        }
    }
}
