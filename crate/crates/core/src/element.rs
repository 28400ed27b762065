//! Elements of `nV` as finite unions of rectangle maps.
//!
//! An [`Element`] pairs a domain pattern with a range pattern cell by cell.
//! Each cell acts by the prefix map: strip the domain prefix from every
//! coordinate, then prepend the range prefix.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::{
    complete_to_pattern, pattern_defect, same_dim, Dimension, Point, Rectangle, OMEGA_SAMPLE_SPAN,
};

/// The prefix map from `domain` onto `range`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RectangleMap {
    pub domain: Rectangle,
    pub range: Rectangle,
}

impl RectangleMap {
    pub fn new(domain: Rectangle, range: Rectangle) -> Result<Self> {
        same_dim(domain.dim(), range.dim())?;
        Ok(RectangleMap { domain, range })
    }

    pub fn is_identity(&self) -> bool {
        self.domain == self.range
    }

    fn touched_indices(&self) -> BTreeSet<usize> {
        self.domain.support().chain(self.range.support()).collect()
    }

    /// Image of a point of the domain rectangle.
    pub fn apply(&self, x: &Point) -> Point {
        let mut y = x.clone();
        for i in self.touched_indices() {
            let c = x
                .coord(i)
                .replace_prefix(self.domain.prefix(i), self.range.prefix(i))
                .expect("point lies in the domain rectangle");
            y = y.with_coord(i, c);
        }
        y
    }

    /// Image under this map of a rectangle contained in the domain.
    fn push_forward(&self, rect: &Rectangle) -> Rectangle {
        transport(rect, &self.domain, &self.range)
    }

    fn pull_back(&self, rect: &Rectangle) -> Rectangle {
        transport(rect, &self.range, &self.domain)
    }

    pub fn inverse(&self) -> Self {
        RectangleMap {
            domain: self.range.clone(),
            range: self.domain.clone(),
        }
    }

    fn split(&self, i: usize) -> Result<(RectangleMap, RectangleMap)> {
        let (d0, d1) = self.domain.split(i)?;
        let (r0, r1) = self.range.split(i)?;
        Ok((
            RectangleMap { domain: d0, range: r0 },
            RectangleMap { domain: d1, range: r1 },
        ))
    }
}

impl fmt::Display for RectangleMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}->{}", self.domain, self.range)
    }
}

impl fmt::Debug for RectangleMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Replaces the `from` prefixes of `rect ⊆ from` by the `to` prefixes.
fn transport(rect: &Rectangle, from: &Rectangle, to: &Rectangle) -> Rectangle {
    let indices: BTreeSet<usize> = rect.support().chain(to.support()).collect();
    let prefixes = indices.into_iter().map(|i| {
        let tail = rect.prefix(i).suffix_from(from.prefix(i).len());
        (i, to.prefix(i).concat(&tail))
    });
    Rectangle::new(rect.dim(), prefixes).expect("indices come from rectangles of this dimension")
}

/// An element of `nV`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Element {
    dim: Dimension,
    maps: Vec<RectangleMap>,
}

impl Element {
    /// Builds and validates an element: domains and ranges must each form a pattern.
    pub fn new(dim: Dimension, maps: Vec<RectangleMap>) -> Result<Self> {
        for m in &maps {
            same_dim(dim, m.domain.dim())?;
            same_dim(dim, m.range.dim())?;
        }
        // ranges first: when both sides are broken the range error is reported
        let ranges: Vec<Rectangle> = maps.iter().map(|m| m.range.clone()).collect();
        if let Some(defect) = pattern_defect(dim, &ranges)? {
            return Err(Error::InvalidRangePattern(defect));
        }
        let domains: Vec<Rectangle> = maps.iter().map(|m| m.domain.clone()).collect();
        if let Some(defect) = pattern_defect(dim, &domains)? {
            return Err(Error::InvalidDomainPattern(defect));
        }
        Ok(Element { dim, maps })
    }

    pub fn from_pairs(dim: Dimension, pairs: Vec<(Rectangle, Rectangle)>) -> Result<Self> {
        let maps = pairs
            .into_iter()
            .map(|(d, r)| RectangleMap::new(d, r))
            .collect::<Result<Vec<_>>>()?;
        Element::new(dim, maps)
    }

    pub fn identity(dim: Dimension) -> Self {
        let full = Rectangle::full(dim);
        Element {
            dim,
            maps: vec![RectangleMap {
                domain: full.clone(),
                range: full,
            }],
        }
    }

    pub fn dim(&self) -> Dimension {
        self.dim
    }

    pub fn maps(&self) -> &[RectangleMap] {
        &self.maps
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    /// The cell whose domain contains `x`.
    pub fn cell_at(&self, x: &Point) -> Result<&RectangleMap> {
        same_dim(self.dim, x.dim())?;
        Ok(self
            .maps
            .iter()
            .find(|m| m.domain.contains(x).expect("same dimension"))
            .expect("domains partition the space"))
    }

    pub fn apply(&self, x: &Point) -> Result<Point> {
        Ok(self.cell_at(x)?.apply(x))
    }

    /// `self ∘ f`: apply `f` first, then `self`. The result is not reduced.
    pub fn compose(&self, f: &Element) -> Result<Element> {
        same_dim(self.dim, f.dim)?;
        let mut maps = Vec::new();
        for fm in &f.maps {
            for gm in &self.maps {
                if let Some(piece) = fm.range.intersect(&gm.domain)? {
                    maps.push(RectangleMap {
                        domain: fm.pull_back(&piece),
                        range: gm.push_forward(&piece),
                    });
                }
            }
        }
        Ok(Element { dim: self.dim, maps })
    }

    pub fn invert(&self) -> Element {
        Element {
            dim: self.dim,
            maps: self.maps.iter().map(RectangleMap::inverse).collect(),
        }
    }

    /// `self^k` for any integer `k`, reduced after every step.
    pub fn pow(&self, k: i64) -> Element {
        let base = if k < 0 { self.invert() } else { self.clone() };
        let mut acc = Element::identity(self.dim);
        for _ in 0..k.unsigned_abs() {
            acc = base.compose(&acc).expect("same dimension").reduce();
        }
        acc
    }

    /// True iff every cell has identical domain and range prefixes.
    pub fn is_identity(&self) -> bool {
        self.maps.iter().all(RectangleMap::is_identity)
    }

    /// Equality as maps of `C^n`, independent of the chosen decomposition.
    pub fn equals(&self, other: &Element) -> Result<bool> {
        Ok(self.compose(&other.invert())?.is_identity())
    }

    /// Indices where some domain or range prefix is nonempty.
    pub fn support_dims(&self) -> BTreeSet<usize> {
        self.maps.iter().flat_map(RectangleMap::touched_indices).collect()
    }

    /// Splits cell `k` in half along coordinate `i` on both sides.
    /// The result is the same map with one more cell.
    pub fn split_cell(&self, k: usize, i: usize) -> Result<Element> {
        let (a, b) = self.maps[k].split(i)?;
        let mut maps = self.maps.clone();
        maps.splice(k..=k, [a, b]);
        Ok(Element { dim: self.dim, maps })
    }

    /// The same cells sorted by domain, then range.
    pub fn sorted(&self) -> Element {
        let mut maps = self.maps.clone();
        maps.sort_by(|a, b| a.domain.cmp(&b.domain).then_with(|| a.range.cmp(&b.range)));
        Element { dim: self.dim, maps }
    }

    /// Greedily merges sibling cells until none remain.
    ///
    /// Two cells merge when their domains are `P·0`, `P·1` and their ranges
    /// `Q·0`, `Q·1` at the same coordinate, in the same order, and agree
    /// everywhere else. Cells are scanned in sorted order, lowest index first.
    pub fn reduce(&self) -> Element {
        let mut maps = self.sorted().maps;
        loop {
            let (next, merged) = merge_pass(&maps);
            maps = next;
            if !merged {
                break;
            }
            maps.sort_by(|a, b| a.domain.cmp(&b.domain).then_with(|| a.range.cmp(&b.range)));
        }
        Element { dim: self.dim, maps }
    }

    /// Acts as `f` on coordinate `i` and as the identity elsewhere.
    pub fn lift_1d(f: &Element, i: usize, dim: Dimension) -> Result<Element> {
        same_dim(f.dim, Dimension::Finite(1))?;
        dim.check_index(i)?;
        let lift = |r: &Rectangle| Rectangle::new(dim, [(i, r.prefix(0).clone())]);
        let maps = f
            .maps
            .iter()
            .map(|m| {
                Ok(RectangleMap {
                    domain: lift(&m.domain)?,
                    range: lift(&m.range)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Element { dim, maps })
    }

    /// An element with `domain → range` as one of its cells.
    ///
    /// Both complements are completed to prefix codes; the one with fewer
    /// cells is padded by repeatedly halving its last cell, then the
    /// leftover cells are paired in sorted order.
    pub fn with_cell(domain: &Rectangle, range: &Rectangle) -> Result<Element> {
        let dim = domain.dim();
        same_dim(dim, range.dim())?;
        let full = Rectangle::full(dim);
        if (*domain == full) != (*range == full) {
            return Err(Error::IncompatibleShapes(format!(
                "cannot map {domain} onto {range}: exactly one of them is the whole space"
            )));
        }
        let rest = |r: &Rectangle| -> Result<Vec<Rectangle>> {
            Ok(complete_to_pattern(dim, std::slice::from_ref(r))?
                .into_rects()
                .into_iter()
                .filter(|c| c != r)
                .collect())
        };
        let mut dom_rest = rest(domain)?;
        let mut rng_rest = rest(range)?;
        let split_index = domain
            .support()
            .chain(range.support())
            .min()
            .unwrap_or(0);
        while dom_rest.len() != rng_rest.len() {
            let shorter = if dom_rest.len() < rng_rest.len() {
                &mut dom_rest
            } else {
                &mut rng_rest
            };
            let last = shorter.pop().expect("complement of a proper rectangle is nonempty");
            let (a, b) = last.split(split_index)?;
            shorter.push(a);
            shorter.push(b);
        }
        dom_rest.sort();
        rng_rest.sort();
        let mut maps = vec![RectangleMap::new(domain.clone(), range.clone())?];
        maps.extend(
            dom_rest
                .into_iter()
                .zip(rng_rest)
                .map(|(d, r)| RectangleMap { domain: d, range: r }),
        );
        Element::new(dim, maps)
    }
}

fn merge_pass(maps: &[RectangleMap]) -> (Vec<RectangleMap>, bool) {
    let mut consumed = vec![false; maps.len()];
    let mut pending: HashMap<(usize, Rectangle, Rectangle), (usize, bool)> = HashMap::new();
    let mut out = Vec::with_capacity(maps.len());
    let mut merged_any = false;
    for (k, m) in maps.iter().enumerate() {
        for i in m.domain.support() {
            let (p, q) = (m.domain.prefix(i), m.range.prefix(i));
            if q.is_empty() || p.last() != q.last() {
                continue;
            }
            let bit = p.last().expect("support prefixes are nonempty");
            let parent_p = p.slice(0, p.len() - 1);
            let parent_q = q.slice(0, q.len() - 1);
            let key = (i, m.domain.with_prefix(i, parent_p), m.range.with_prefix(i, parent_q));
            match pending.get(&key) {
                Some(&(other, other_bit)) if other_bit != bit && !consumed[other] => {
                    consumed[other] = true;
                    consumed[k] = true;
                    out.push(RectangleMap {
                        domain: key.1.clone(),
                        range: key.2.clone(),
                    });
                    merged_any = true;
                    break;
                }
                _ => {
                    pending.insert(key, (k, bit));
                }
            }
        }
    }
    out.extend(
        maps.iter()
            .zip(&consumed)
            .filter(|(_, &c)| !c)
            .map(|(m, _)| m.clone()),
    );
    (out, merged_any)
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Element")
            .field("dim", &self.dim)
            .field("maps", &self.maps)
            .finish()
    }
}

/// Cycles `rects[0] → rects[1] → … → rects[0]` by prefix replacement and
/// fixes everything outside them.
///
/// The rectangles must be pairwise disjoint. Going once around the cycle
/// replaces each prefix by itself, so points inside the rectangles have
/// period exactly `k`.
pub fn cycle_element(rects: &[Rectangle]) -> Result<Element> {
    if rects.len() < 2 {
        return Err(Error::IncompatibleShapes(format!(
            "a cycle needs at least 2 rectangles, got {}",
            rects.len()
        )));
    }
    let dim = rects[0].dim();
    let completion = complete_to_pattern(dim, rects)?;
    let cycled: HashSet<&Rectangle> = rects.iter().collect();
    let mut maps: Vec<RectangleMap> = rects
        .iter()
        .zip(rects.iter().cycle().skip(1))
        .map(|(a, b)| RectangleMap {
            domain: a.clone(),
            range: b.clone(),
        })
        .collect();
    maps.extend(
        completion
            .rects()
            .iter()
            .filter(|r| !cycled.contains(r))
            .map(|r| RectangleMap {
                domain: r.clone(),
                range: r.clone(),
            }),
    );
    Element::new(dim, maps)
}

fn random_split_index<R: Rng + ?Sized>(dim: Dimension, rng: &mut R) -> usize {
    match dim {
        Dimension::Finite(n) => rng.gen_range(0..n),
        Dimension::Omega => rng.gen_range(0..OMEGA_SAMPLE_SPAN),
    }
}

fn random_pattern_cells<R: Rng + ?Sized>(dim: Dimension, cells: usize, rng: &mut R) -> Vec<Rectangle> {
    let mut rects = vec![Rectangle::full(dim)];
    while rects.len() < cells {
        let k = rng.gen_range(0..rects.len());
        let i = random_split_index(dim, rng);
        let (a, b) = rects[k].split(i).expect("index valid for dimension");
        rects[k] = a;
        rects.push(b);
    }
    rects
}

/// A pseudo-random element with `cell_budget` cells, determined by `seed`.
pub fn random_element(dim: Dimension, cell_budget: usize, seed: u64) -> Element {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_element_with(dim, cell_budget, &mut rng)
}

pub fn random_element_with<R: Rng + ?Sized>(dim: Dimension, cell_budget: usize, rng: &mut R) -> Element {
    let cells = cell_budget.max(1);
    let domains = random_pattern_cells(dim, cells, rng);
    let mut ranges = random_pattern_cells(dim, cells, rng);
    ranges.shuffle(rng);
    let maps = domains
        .into_iter()
        .zip(ranges)
        .map(|(domain, range)| RectangleMap { domain, range })
        .collect();
    Element::new(dim, maps).expect("random patterns are valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{is_pattern, random_rational_point};
    use crate::words::Coordinate;

    fn r(p: &[&str]) -> Rectangle {
        Rectangle::from_strs(p)
    }

    const D1: Dimension = Dimension::Finite(1);

    fn f_star() -> Element {
        Element::from_pairs(
            D1,
            vec![
                (r(&["0"]), r(&["00"])),
                (r(&["10"]), r(&["01"])),
                (r(&["11"]), r(&["1"])),
            ],
        )
        .unwrap()
    }

    fn pt(coords: &[(&str, &str)]) -> Point {
        Point::finite(coords.iter().map(|&(a, w)| Coordinate::rational_str(a, w)).collect()).unwrap()
    }

    #[test]
    fn new_element_examples() {
        let f = f_star();
        assert!(is_pattern(D1, &f.maps().iter().map(|m| m.domain.clone()).collect::<Vec<_>>()).unwrap());
        let id2 = Element::from_pairs(D1, vec![(r(&["0"]), r(&["0"])), (r(&["1"]), r(&["1"]))]).unwrap();
        assert!(id2.is_identity());
        let bad = Element::from_pairs(D1, vec![(r(&["0"]), r(&["00"])), (r(&["1"]), r(&["01"]))]);
        assert!(matches!(bad, Err(Error::InvalidRangePattern(_))));
        let bad = Element::from_pairs(D1, vec![(r(&["0"]), r(&["0"])), (r(&["01"]), r(&["1"]))]);
        assert!(matches!(bad, Err(Error::InvalidDomainPattern(_))));
        let bad = Element::from_pairs(D1, vec![(r(&["0", ""]), r(&["0"]))]);
        assert!(matches!(bad, Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn identity_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for dim in [D1, Dimension::Finite(3), Dimension::Omega] {
            let id = Element::identity(dim);
            let x = random_rational_point(dim, &mut rng);
            assert_eq!(id.apply(&x).unwrap(), x);
            assert_eq!(id.invert(), id);
        }
        let f = f_star();
        let composed = Element::identity(D1).compose(&f).unwrap();
        assert_eq!(composed, f);
    }

    #[test]
    fn apply_examples() {
        let f = f_star();
        assert_eq!(f.apply(&pt(&[("", "1")])).unwrap(), pt(&[("", "1")]));
        assert_eq!(f.apply(&pt(&[("", "0")])).unwrap(), pt(&[("", "0")]));
        let y = f.apply(&pt(&[("1", "0")])).unwrap();
        assert_eq!(y, pt(&[("01", "0")]));
        let expected: String = "01".chars().chain(std::iter::repeat('0')).take(20).collect();
        assert_eq!(y.coord(0).prefix(20).to_string(), expected);
    }

    #[test]
    fn compose_examples() {
        let f = f_star();
        assert!(f.compose(&f.invert()).unwrap().is_identity());
        assert_eq!(f.compose(&f.invert()).unwrap().reduce(), Element::identity(D1));
        let ff = f.compose(&f).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            let x = random_rational_point(D1, &mut rng);
            assert_eq!(ff.apply(&x).unwrap(), f.apply(&f.apply(&x).unwrap()).unwrap());
        }
    }

    #[test]
    fn invert_examples() {
        let f = f_star();
        assert_eq!(f.invert().invert(), f);
        assert_eq!(f.invert().apply(&pt(&[("01", "0")])).unwrap(), pt(&[("1", "0")]));
    }

    #[test]
    fn is_identity_examples() {
        assert!(Element::identity(Dimension::Finite(2)).is_identity());
        assert!(!f_star().is_identity());
    }

    #[test]
    fn equality_examples() {
        let f = f_star();
        let split = f.split_cell(0, 0).unwrap();
        assert_eq!(split.maps()[0].to_string(), "(00)->(000)");
        assert_eq!(split.maps()[1].to_string(), "(01)->(001)");
        assert!(f.equals(&split).unwrap());
        assert!(!f.equals(&Element::identity(D1)).unwrap());
        assert!(!f.equals(&f.invert()).unwrap());
        assert!(matches!(
            f.equals(&Element::identity(Dimension::Finite(2))),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn reduce_examples() {
        let f = f_star();
        assert_eq!(f.split_cell(0, 0).unwrap().reduce(), f.sorted());
        let id2 = Element::from_pairs(D1, vec![(r(&["0"]), r(&["0"])), (r(&["1"]), r(&["1"]))]).unwrap();
        assert_eq!(id2.reduce(), Element::identity(D1));
        assert_eq!(f.reduce(), f.sorted());
    }

    #[test]
    fn reduce_respects_order_of_siblings() {
        let swap = Element::from_pairs(D1, vec![(r(&["0"]), r(&["1"])), (r(&["1"]), r(&["0"]))]).unwrap();
        assert_eq!(swap.reduce().len(), 2);
    }

    #[test]
    fn cycle_examples() {
        let c = cycle_element(&[r(&["0"]), r(&["1"])]).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c.apply(&pt(&[("", "0")])).unwrap(), pt(&[("1", "0")]));

        let c = cycle_element(&[r(&["00"]), r(&["11"])]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let x = random_rational_point(D1, &mut rng);
            let outside = !r(&["00"]).contains(&x).unwrap() && !r(&["11"]).contains(&x).unwrap();
            if outside {
                assert_eq!(c.apply(&x).unwrap(), x);
            }
        }

        let c = cycle_element(&[r(&["00", ""]), r(&["01", ""]), r(&["1", ""])]).unwrap();
        assert_eq!(c.len(), 3);
        assert!(matches!(
            cycle_element(&[r(&["0"]), r(&["0", "1"])]),
            Err(Error::DimensionMismatch(_))
        ));
        assert!(matches!(
            cycle_element(&[r(&["0"]), r(&["0"])]),
            Err(Error::NotDisjoint(_, _))
        ));
        assert!(matches!(cycle_element(&[r(&["0"])]), Err(Error::IncompatibleShapes(_))));
    }

    #[test]
    fn lift_examples() {
        let f = f_star();
        let d2 = Dimension::Finite(2);
        let lifted = Element::lift_1d(&f, 0, d2).unwrap();
        let x = pt(&[("", "1"), ("", "0")]);
        assert_eq!(lifted.apply(&x).unwrap(), x);
        assert!(Element::lift_1d(&Element::identity(D1), 1, d2).unwrap().is_identity());
        let lifted = Element::lift_1d(&f, 3, Dimension::Omega).unwrap();
        assert_eq!(lifted.support_dims(), BTreeSet::from([3]));
        assert!(matches!(Element::lift_1d(&f, 2, d2), Err(Error::DimensionMismatch(_))));
        assert!(matches!(Element::lift_1d(&lifted, 0, d2), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn support_examples() {
        assert!(Element::identity(Dimension::Omega).support_dims().is_empty());
        assert_eq!(f_star().support_dims(), BTreeSet::from([0]));
        let lifted = Element::lift_1d(&f_star(), 7, Dimension::Omega).unwrap();
        assert_eq!(lifted.support_dims(), BTreeSet::from([7]));
    }

    #[test]
    fn random_element_examples() {
        let d2 = Dimension::Finite(2);
        assert_eq!(random_element(d2, 6, 42), random_element(d2, 6, 42));
        assert_eq!(random_element(d2, 1, 9), Element::identity(d2));
        for seed in 0..1000 {
            let dim = [D1, d2, Dimension::Finite(3), Dimension::Omega][seed as usize % 4];
            let f = random_element(dim, 1 + (seed as usize % 9), seed);
            let doms: Vec<_> = f.maps().iter().map(|m| m.domain.clone()).collect();
            let rngs: Vec<_> = f.maps().iter().map(|m| m.range.clone()).collect();
            assert!(is_pattern(dim, &doms).unwrap());
            assert!(is_pattern(dim, &rngs).unwrap());
        }
    }

    #[test]
    fn with_cell_contains_requested_map() {
        let d = r(&["011"]);
        let q = r(&["1"]);
        let f = Element::with_cell(&d, &q).unwrap();
        assert!(f.maps().contains(&RectangleMap::new(d, q).unwrap()));
        let f = Element::with_cell(&r(&["11"]), &r(&["1"])).unwrap();
        assert_eq!(f.sorted(), f_star().sorted());
        assert!(matches!(
            Element::with_cell(&Rectangle::full(D1), &r(&["1"])),
            Err(Error::IncompatibleShapes(_))
        ));
    }

    #[test]
    fn pow_matches_repeated_composition() {
        let f = f_star();
        assert!(f.pow(3).equals(&f.compose(&f).unwrap().compose(&f).unwrap()).unwrap());
        assert!(f.pow(-2).equals(&f.invert().compose(&f.invert()).unwrap()).unwrap());
        assert!(f.pow(0).is_identity());
    }
}
