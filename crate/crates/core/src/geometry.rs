//! Rectangles, patterns and points of `C^n` and `C^ω`.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};
use crate::words::{BinaryWord, Coordinate};

/// The `n` of `nV`: a positive integer or `ω`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Dimension {
    Finite(usize),
    Omega,
}

impl Dimension {
    pub fn contains_index(self, i: usize) -> bool {
        match self {
            Dimension::Finite(n) => i < n,
            Dimension::Omega => true,
        }
    }

    pub fn check_index(self, i: usize) -> Result<()> {
        if self.contains_index(i) {
            Ok(())
        } else {
            Err(Error::DimensionMismatch(format!("index {i} is out of range for dimension {self}")))
        }
    }

    /// Group name, e.g. `2V` or `ωV`.
    pub fn group_name(self) -> String {
        match self {
            Dimension::Finite(n) => format!("{n}V"),
            Dimension::Omega => "omegaV".to_string(),
        }
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Dimension::Finite(n) => write!(f, "{n}"),
            Dimension::Omega => f.write_str("omega"),
        }
    }
}

pub(crate) fn same_dim(a: Dimension, b: Dimension) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::DimensionMismatch(format!("{a} vs {b}")))
    }
}

/// The measure `2^(-exponent)` of a rectangle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DyadicMeasure {
    pub exponent: usize,
}

impl DyadicMeasure {
    pub const ONE: DyadicMeasure = DyadicMeasure { exponent: 0 };

    /// Compares an exact sum of dyadic measures with 1.
    ///
    /// Counts are carried from the finest exponent upward, so no value ever
    /// needs more than a machine word.
    pub fn sum_cmp_one(measures: impl IntoIterator<Item = DyadicMeasure>) -> Ordering {
        let mut counts: BTreeMap<usize, u64> = BTreeMap::new();
        for m in measures {
            *counts.entry(m.exponent).or_default() += 1;
        }
        let mut leftover = false;
        while let Some((e, c)) = counts.pop_last() {
            if e == 0 {
                return match (c, leftover) {
                    (0, _) => Ordering::Less,
                    (1, false) => Ordering::Equal,
                    _ => Ordering::Greater,
                };
            }
            if c % 2 == 1 {
                leftover = true;
            }
            if c / 2 > 0 {
                *counts.entry(e - 1).or_default() += c / 2;
            }
        }
        Ordering::Less
    }
}

impl fmt::Display for DyadicMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "2^-{}", self.exponent)
    }
}

/// A clopen box in `C^n`: one finite prefix per coordinate, `ε` where absent.
///
/// Only nonempty prefixes are stored, so structural equality is set equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Rectangle {
    dim: Dimension,
    prefixes: BTreeMap<usize, BinaryWord>,
}

impl Rectangle {
    pub fn full(dim: Dimension) -> Self {
        Rectangle {
            dim,
            prefixes: BTreeMap::new(),
        }
    }

    pub fn new(dim: Dimension, prefixes: impl IntoIterator<Item = (usize, BinaryWord)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (i, w) in prefixes {
            dim.check_index(i)?;
            if !w.is_empty() {
                map.insert(i, w);
            }
        }
        Ok(Rectangle { dim, prefixes: map })
    }

    /// A finite-dimensional rectangle from positional `0`/`1` strings.
    /// Panics on malformed input; meant for tests and fixtures.
    pub fn from_strs(prefixes: &[&str]) -> Self {
        let dim = Dimension::Finite(prefixes.len());
        let words = prefixes
            .iter()
            .map(|s| BinaryWord::parse(s).expect("binary string"))
            .enumerate();
        Rectangle::new(dim, words).expect("indices are in range")
    }

    pub fn dim(&self) -> Dimension {
        self.dim
    }

    pub fn prefix(&self, i: usize) -> &BinaryWord {
        static EMPTY: BinaryWord = BinaryWord::EMPTY;
        self.prefixes.get(&i).unwrap_or(&EMPTY)
    }

    /// Indices with a nonempty prefix, ascending.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.prefixes.keys().copied()
    }

    pub fn prefixes(&self) -> &BTreeMap<usize, BinaryWord> {
        &self.prefixes
    }

    pub fn with_prefix(&self, i: usize, w: BinaryWord) -> Self {
        let mut r = self.clone();
        if w.is_empty() {
            r.prefixes.remove(&i);
        } else {
            r.prefixes.insert(i, w);
        }
        r
    }

    /// Total prefix length; the measure is `2^(-depth)`.
    pub fn depth(&self) -> usize {
        self.prefixes.values().map(BinaryWord::len).sum()
    }

    pub fn measure(&self) -> DyadicMeasure {
        DyadicMeasure {
            exponent: self.depth(),
        }
    }

    pub fn contains(&self, x: &Point) -> Result<bool> {
        same_dim(self.dim, x.dim())?;
        Ok(self.prefixes.iter().all(|(&i, p)| x.coord(i).starts_with(p)))
    }

    /// True when `other ⊆ self`.
    pub fn contains_rect(&self, other: &Rectangle) -> bool {
        self.prefixes.iter().all(|(&i, p)| p.is_prefix_of(other.prefix(i)))
    }

    pub fn is_disjoint(&self, other: &Rectangle) -> bool {
        self.prefixes
            .iter()
            .any(|(&i, p)| !p.comparable(other.prefix(i)))
    }

    pub fn intersect(&self, other: &Rectangle) -> Result<Option<Rectangle>> {
        same_dim(self.dim, other.dim)?;
        let mut prefixes = self.prefixes.clone();
        for (&i, q) in &other.prefixes {
            let p = self.prefix(i);
            if q.is_prefix_of(p) {
                continue;
            }
            if !p.is_prefix_of(q) {
                return Ok(None);
            }
            prefixes.insert(i, q.clone());
        }
        Ok(Some(Rectangle {
            dim: self.dim,
            prefixes,
        }))
    }

    /// Halves the rectangle along coordinate `i`.
    pub fn split(&self, i: usize) -> Result<(Rectangle, Rectangle)> {
        self.dim.check_index(i)?;
        let p = self.prefix(i);
        Ok((self.with_prefix(i, p.child(false)), self.with_prefix(i, p.child(true))))
    }

    /// Pieces of `self \ other` as disjoint rectangles, peeling siblings
    /// coordinate by coordinate in increasing index order, shortest first.
    fn subtract(&self, other: &Rectangle) -> Vec<Rectangle> {
        let Some(core) = self.intersect(other).expect("same dimension") else {
            return vec![self.clone()];
        };
        let mut pieces = Vec::new();
        let mut current = self.clone();
        for (&i, target) in &core.prefixes {
            let mut p = current.prefix(i).clone();
            for pos in p.len()..target.len() {
                let bit = target.get(pos).expect("in range");
                pieces.push(current.with_prefix(i, p.child(!bit)));
                p.push(bit);
                current = current.with_prefix(i, p.clone());
            }
        }
        pieces
    }

    /// All indices mentioned by either rectangle, ascending.
    fn joint_support(&self, other: &Rectangle) -> BTreeSet<usize> {
        self.prefixes.keys().chain(other.prefixes.keys()).copied().collect()
    }
}

impl Ord for Rectangle {
    /// Lexicographic in the prefixes, lowest index first, with `ε` for
    /// unconstrained coordinates.
    fn cmp(&self, other: &Self) -> Ordering {
        self.dim.cmp(&other.dim).then_with(|| {
            for i in self.joint_support(other) {
                match self.prefix(i).cmp(other.prefix(i)) {
                    Ordering::Equal => continue,
                    ord => return ord,
                }
            }
            Ordering::Equal
        })
    }
}

impl PartialOrd for Rectangle {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Rectangle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.dim {
            Dimension::Finite(n) => {
                f.write_str("(")?;
                for i in 0..n {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{}", self.prefix(i))?;
                }
                f.write_str(")")
            }
            Dimension::Omega => {
                f.write_str("{")?;
                for (k, (i, p)) in self.prefixes.iter().enumerate() {
                    if k > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{i}:{p}")?;
                }
                f.write_str("}")
            }
        }
    }
}

impl fmt::Debug for Rectangle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn check_dims(dim: Dimension, rects: &[Rectangle]) -> Result<()> {
    rects.iter().try_for_each(|r| same_dim(dim, r.dim))
}

fn first_overlap(rects: &[Rectangle]) -> Option<(&Rectangle, &Rectangle)> {
    for (k, a) in rects.iter().enumerate() {
        for b in &rects[k + 1..] {
            if !a.is_disjoint(b) {
                return Some((a, b));
            }
        }
    }
    None
}

/// Describes why `rects` fails to partition the space, or `None` if it does.
pub fn pattern_defect(dim: Dimension, rects: &[Rectangle]) -> Result<Option<String>> {
    check_dims(dim, rects)?;
    if rects.is_empty() {
        return Ok(Some("no cells".to_string()));
    }
    if let Some((a, b)) = first_overlap(rects) {
        return Ok(Some(format!("cells {a} and {b} overlap")));
    }
    match DyadicMeasure::sum_cmp_one(rects.iter().map(Rectangle::measure)) {
        Ordering::Equal => Ok(None),
        Ordering::Less => {
            let gap = complement(dim, rects)
                .into_iter()
                .next()
                .expect("a disjoint family of measure < 1 leaves a gap");
            let cells: Vec<String> = rects.iter().map(Rectangle::to_string).collect();
            Ok(Some(format!("cells {} leave region {gap} uncovered", cells.join(", "))))
        }
        Ordering::Greater => unreachable!("disjoint rectangles cannot have measure > 1"),
    }
}

/// True iff the rectangles are pairwise disjoint and their measures sum to 1.
pub fn is_pattern(dim: Dimension, rects: &[Rectangle]) -> Result<bool> {
    Ok(pattern_defect(dim, rects)?.is_none())
}

/// Disjoint rectangles covering everything outside `rects`, which must be
/// pairwise disjoint.
fn complement(dim: Dimension, rects: &[Rectangle]) -> Vec<Rectangle> {
    let mut pieces = vec![Rectangle::full(dim)];
    for r in rects {
        pieces = pieces.iter().flat_map(|p| p.subtract(r)).collect();
    }
    pieces
}

/// A finite partition of `C^n` into rectangles, stored in sorted order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Pattern {
    dim: Dimension,
    rects: Vec<Rectangle>,
}

impl Pattern {
    pub fn new(dim: Dimension, mut rects: Vec<Rectangle>) -> Result<Self> {
        if let Some(defect) = pattern_defect(dim, &rects)? {
            return Err(Error::NotAPattern(defect));
        }
        rects.sort();
        Ok(Pattern { dim, rects })
    }

    pub fn trivial(dim: Dimension) -> Self {
        Pattern {
            dim,
            rects: vec![Rectangle::full(dim)],
        }
    }

    pub fn dim(&self) -> Dimension {
        self.dim
    }

    pub fn rects(&self) -> &[Rectangle] {
        &self.rects
    }

    pub fn len(&self) -> usize {
        self.rects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rects.is_empty()
    }

    pub fn into_rects(self) -> Vec<Rectangle> {
        self.rects
    }

    /// Index of the unique cell containing `x`.
    pub fn locate(&self, x: &Point) -> Result<usize> {
        same_dim(self.dim, x.dim())?;
        Ok(self
            .rects
            .iter()
            .position(|r| r.contains(x).expect("same dimension"))
            .expect("a pattern covers every point"))
    }
}

/// Extends pairwise-disjoint rectangles to a pattern containing each of them.
pub fn complete_to_pattern(dim: Dimension, rects: &[Rectangle]) -> Result<Pattern> {
    check_dims(dim, rects)?;
    if let Some((a, b)) = first_overlap(rects) {
        return Err(Error::NotDisjoint(a.to_string(), b.to_string()));
    }
    let mut all = rects.to_vec();
    all.extend(complement(dim, rects));
    all.sort();
    Ok(Pattern { dim, rects: all })
}

/// The common refinement: every nonempty intersection of a cell of `p` with a cell of `q`.
pub fn refine_pattern(p: &Pattern, q: &Pattern) -> Result<Pattern> {
    same_dim(p.dim, q.dim)?;
    let mut rects = Vec::new();
    for a in &p.rects {
        for b in &q.rects {
            if let Some(c) = a.intersect(b)? {
                rects.push(c);
            }
        }
    }
    rects.sort();
    Ok(Pattern { dim: p.dim, rects })
}

/// A point of `C^n`, or of `C^ω` with all but finitely many coordinates
/// equal to a shared default.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Point {
    Finite(Vec<Coordinate>),
    Omega {
        explicit: BTreeMap<usize, Coordinate>,
        default: Coordinate,
    },
}

impl Point {
    pub fn finite(coords: Vec<Coordinate>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::DimensionMismatch("a point needs at least one coordinate".into()));
        }
        Ok(Point::Finite(coords))
    }

    /// Explicit entries equal to the default are dropped.
    pub fn omega(explicit: BTreeMap<usize, Coordinate>, default: Coordinate) -> Self {
        let explicit = explicit.into_iter().filter(|(_, c)| *c != default).collect();
        Point::Omega { explicit, default }
    }

    pub fn dim(&self) -> Dimension {
        match self {
            Point::Finite(c) => Dimension::Finite(c.len()),
            Point::Omega { .. } => Dimension::Omega,
        }
    }

    pub fn coord(&self, i: usize) -> &Coordinate {
        match self {
            Point::Finite(c) => &c[i],
            Point::Omega { explicit, default } => explicit.get(&i).unwrap_or(default),
        }
    }

    pub fn with_coord(&self, i: usize, c: Coordinate) -> Self {
        match self {
            Point::Finite(cs) => {
                let mut cs = cs.clone();
                cs[i] = c;
                Point::Finite(cs)
            }
            Point::Omega { explicit, default } => {
                let mut explicit = explicit.clone();
                if c == *default {
                    explicit.remove(&i);
                } else {
                    explicit.insert(i, c);
                }
                Point::Omega {
                    explicit,
                    default: default.clone(),
                }
            }
        }
    }

    /// Indices whose coordinates are individually listed: all of them for
    /// `C^n`, the explicit ones for `C^ω`.
    pub fn listed_indices(&self) -> Vec<usize> {
        match self {
            Point::Finite(c) => (0..c.len()).collect(),
            Point::Omega { explicit, .. } => explicit.keys().copied().collect(),
        }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Finite(cs) => {
                f.write_str("[")?;
                for (k, c) in cs.iter().enumerate() {
                    if k > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{c}")?;
                }
                f.write_str("]")
            }
            Point::Omega { explicit, default } => {
                f.write_str("[")?;
                for (i, c) in explicit {
                    write!(f, "{i}:{c}; ")?;
                }
                write!(f, "default={default}]")
            }
        }
    }
}

fn random_word<R: Rng + ?Sized>(rng: &mut R, min: usize, max: usize) -> BinaryWord {
    let len = rng.gen_range(min..=max);
    BinaryWord::from_bits((0..len).map(|_| rng.gen::<bool>()))
}

/// A random eventually periodic coordinate with short preamble and period.
pub fn random_rational_coord<R: Rng + ?Sized>(rng: &mut R) -> Coordinate {
    let a = random_word(rng, 0, 4);
    let w = random_word(rng, 1, 4);
    Coordinate::rational(a, w).expect("nonempty period")
}

/// Highest explicit index used for random `C^ω` points and elements.
pub const OMEGA_SAMPLE_SPAN: usize = 6;

/// A random point with rational coordinates.
pub fn random_rational_point<R: Rng + ?Sized>(dim: Dimension, rng: &mut R) -> Point {
    match dim {
        Dimension::Finite(n) => Point::Finite((0..n).map(|_| random_rational_coord(rng)).collect()),
        Dimension::Omega => {
            let mut explicit = BTreeMap::new();
            for i in 0..OMEGA_SAMPLE_SPAN {
                if rng.gen_bool(0.5) {
                    explicit.insert(i, random_rational_coord(rng));
                }
            }
            Point::omega(explicit, random_rational_coord(rng))
        }
    }
}
