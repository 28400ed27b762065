//! Germs of elements at fixed points and the germ signature.
//!
//! Let `x` be fixed by `f` and let `D → R` be the cell of `f` whose domain
//! contains `x`. At a rational coordinate `i` with canonical period `w`, the
//! prefixes `P = D_i` and `Q = R_i` satisfy `σ^|P| x_i = σ^|Q| x_i`, so
//! `|P| - |Q|` is a multiple of `|w|`. The signature entry is that multiple.
//! At an aperiodic coordinate the two prefixes must coincide. The resulting
//! integer vector determines the germ of `f` at `x` and is additive under
//! composition.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::ops::{Add, Neg};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::element::{random_element_with, Element};
use crate::error::{Error, Result};
use crate::geometry::{Dimension, Point, Rectangle, OMEGA_SAMPLE_SPAN};
use crate::words::Coordinate;

/// Sparse integer vector indexed by coordinates; zero entries are not stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct GermSignature(BTreeMap<usize, i64>);

impl GermSignature {
    pub fn zero() -> Self {
        GermSignature(BTreeMap::new())
    }

    pub fn from_entries(entries: impl IntoIterator<Item = (usize, i64)>) -> Self {
        let mut map = BTreeMap::new();
        for (i, v) in entries {
            *map.entry(i).or_insert(0) += v;
        }
        map.retain(|_, v| *v != 0);
        GermSignature(map)
    }

    /// The standard basis vector `sign · e_i`.
    pub fn unit(i: usize, sign: i64) -> Self {
        GermSignature::from_entries([(i, sign)])
    }

    pub fn get(&self, i: usize) -> i64 {
        self.0.get(&i).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.keys().copied()
    }

    pub fn entries(&self) -> &BTreeMap<usize, i64> {
        &self.0
    }

    /// Dense form over indices `0..len`.
    pub fn to_dense(&self, len: usize) -> Vec<i64> {
        (0..len).map(|i| self.get(i)).collect()
    }
}

impl Add for &GermSignature {
    type Output = GermSignature;

    fn add(self, rhs: &GermSignature) -> GermSignature {
        GermSignature::from_entries(self.0.iter().chain(rhs.0.iter()).map(|(&i, &v)| (i, v)))
    }
}

impl Neg for &GermSignature {
    type Output = GermSignature;

    fn neg(self) -> GermSignature {
        GermSignature(self.0.iter().map(|(&i, &v)| (i, -v)).collect())
    }
}

impl fmt::Display for GermSignature {
    /// `i:±k` pairs separated by spaces; the zero signature renders as `0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("0");
        }
        for (k, (i, v)) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{i}:{v:+}")?;
        }
        Ok(())
    }
}

/// Orientation of a germ generator: `Positive` gives signature `+1`,
/// i.e. the domain prefix is one period longer than the range prefix.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Positive,
    Negative,
}

impl Direction {
    pub fn sign(self) -> i64 {
        match self {
            Direction::Positive => 1,
            Direction::Negative => -1,
        }
    }

    pub fn from_sign(sign: i64) -> Option<Self> {
        match sign {
            1 => Some(Direction::Positive),
            -1 => Some(Direction::Negative),
            _ => None,
        }
    }
}

pub fn fixes(f: &Element, x: &Point) -> Result<bool> {
    Ok(f.apply(x)? == *x)
}

fn require_fixed(f: &Element, x: &Point) -> Result<()> {
    if fixes(f, x)? {
        Ok(())
    } else {
        Err(Error::NotFixed)
    }
}

/// The signature of `f` at a point it fixes.
pub fn germ_signature(f: &Element, x: &Point) -> Result<GermSignature> {
    require_fixed(f, x)?;
    let cell = f.cell_at(x)?;
    let indices: BTreeSet<usize> = cell.domain.support().chain(cell.range.support()).collect();
    let mut entries = Vec::new();
    for i in indices {
        let p = cell.domain.prefix(i);
        let q = cell.range.prefix(i);
        match x.coord(i) {
            Coordinate::Rational(r) => {
                let period = r.period().len() as i64;
                let diff = p.len() as i64 - q.len() as i64;
                if diff % period != 0 {
                    return Err(Error::InternalAlignment {
                        index: i,
                        domain_len: p.len(),
                        range_len: q.len(),
                        period_len: r.period().len(),
                    });
                }
                entries.push((i, diff / period));
            }
            Coordinate::Aperiodic(_) => {
                if p != q {
                    return Err(Error::RigidityViolation {
                        index: i,
                        domain: p.to_string(),
                        range: q.to_string(),
                    });
                }
            }
        }
    }
    Ok(GermSignature::from_entries(entries))
}

/// True iff `f` is the identity on some neighbourhood of `x`.
pub fn germ_trivial(f: &Element, x: &Point) -> Result<bool> {
    require_fixed(f, x)?;
    Ok(f.cell_at(x)?.is_identity())
}

pub fn germ_equal(f: &Element, g: &Element, x: &Point) -> Result<bool> {
    require_fixed(f, x)?;
    require_fixed(g, x)?;
    germ_trivial(&f.compose(&g.invert())?, x)
}

/// The germ of an element at a point it fixes.
#[derive(Clone, Debug)]
pub struct GermClass {
    representative: Element,
    base: Point,
}

impl GermClass {
    pub fn new(representative: Element, base: Point) -> Result<Self> {
        require_fixed(&representative, &base)?;
        Ok(GermClass {
            representative,
            base,
        })
    }

    pub fn representative(&self) -> &Element {
        &self.representative
    }

    pub fn base(&self) -> &Point {
        &self.base
    }

    pub fn signature(&self) -> GermSignature {
        germ_signature(&self.representative, &self.base).expect("representative fixes the base")
    }

    pub fn compose(&self, other: &GermClass) -> Result<GermClass> {
        if self.base != other.base {
            return Err(Error::DimensionMismatch("germs at different base points".into()));
        }
        GermClass::new(self.representative.compose(&other.representative)?, self.base.clone())
    }
}

impl PartialEq for GermClass {
    fn eq(&self, other: &Self) -> bool {
        self.base == other.base
            && germ_equal(&self.representative, &other.representative, &self.base).unwrap_or(false)
    }
}

/// An element fixing `x` whose signature is `±1` at coordinate `i` and zero
/// elsewhere.
///
/// With `x_i = A·w^∞` canonical, the one-dimensional element has a cell
/// `A·w·w → A·w` (reversed for `Negative`); the complements are completed to
/// prefix codes, the shorter one padded, and leftover leaves paired in order.
pub fn germ_generator(x: &Point, i: usize, direction: Direction) -> Result<Element> {
    let dim = x.dim();
    dim.check_index(i)?;
    let r = x.coord(i).as_rational().ok_or(Error::IrrationalCoordinate(i))?;
    let long = r.preamble().concat(&r.period().repeat(2));
    let short = r.preamble().concat(r.period());
    let d1 = Dimension::Finite(1);
    let g = Element::with_cell(&Rectangle::new(d1, [(0, long)])?, &Rectangle::new(d1, [(0, short)])?)?;
    let g = match direction {
        Direction::Positive => g,
        Direction::Negative => g.invert(),
    };
    Element::lift_1d(&g, i, dim)
}

/// `|x|`: the number of rational coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RationalityCount {
    Finite(usize),
    Omega,
}

impl fmt::Display for RationalityCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RationalityCount::Finite(k) => write!(f, "{k}"),
            RationalityCount::Omega => f.write_str("omega"),
        }
    }
}

pub fn rationality_count(x: &Point) -> RationalityCount {
    match x {
        Point::Finite(cs) => RationalityCount::Finite(cs.iter().filter(|c| c.is_rational()).count()),
        Point::Omega { explicit, default } => {
            if default.is_rational() {
                RationalityCount::Omega
            } else {
                RationalityCount::Finite(explicit.values().filter(|c| c.is_rational()).count())
            }
        }
    }
}

/// An element `g` with `g(f(x)) = x` whose cell at `f(x)` exactly undoes the
/// cell of `f` at `x`, so `g ∘ f` fixes `x` with trivial germ.
pub fn fixer(f: &Element, x: &Point) -> Result<Element> {
    let cell = f.cell_at(x)?;
    Element::with_cell(&cell.range, &cell.domain)
}

/// Rational coordinates of `x` that random fixing elements act on.
fn rational_indices(x: &Point) -> Vec<usize> {
    let span = match x.dim() {
        Dimension::Finite(n) => n,
        Dimension::Omega => OMEGA_SAMPLE_SPAN,
    };
    (0..span).filter(|&i| x.coord(i).is_rational()).collect()
}

/// A pseudo-random element fixing `x`, for tests and experiments.
///
/// It is `h₁ ∘ γ ∘ h₂` where each `hᵢ` is a random element corrected by
/// [`fixer`] and `γ` is a single cell `∏ Aᵢ·wᵢ^(3+eᵢ) → ∏ Aᵢ·wᵢ³` with random
/// `eᵢ ∈ -2..=2` at the rational coordinates of `x`. One joint cell keeps the
/// size additive in the number of coordinates; a product of generators
/// would multiply cell counts.
pub fn random_fixing_element(x: &Point, cell_budget: usize, seed: u64) -> Element {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = x.dim();
    let fixing_noise = |rng: &mut ChaCha8Rng| {
        let f = random_element_with(dim, cell_budget, rng);
        fixer(&f, x).expect("dimensions agree").compose(&f).expect("dimensions agree").reduce()
    };
    let h1 = fixing_noise(&mut rng);
    let h2 = fixing_noise(&mut rng);
    let mut domain = Vec::new();
    let mut range = Vec::new();
    for i in rational_indices(x) {
        let e: i64 = rng.gen_range(-2..=2);
        if e != 0 {
            let r = x.coord(i).as_rational().expect("rational index");
            domain.push((i, r.preamble().concat(&r.period().repeat((3 + e) as usize))));
            range.push((i, r.preamble().concat(&r.period().repeat(3))));
        }
    }
    let gamma = if domain.is_empty() {
        Element::identity(dim)
    } else {
        let d = Rectangle::new(dim, domain).expect("indices in range");
        let r = Rectangle::new(dim, range).expect("indices in range");
        Element::with_cell(&d, &r).expect("both sides are proper")
    };
    h1.compose(&gamma)
        .and_then(|e| e.compose(&h2))
        .expect("dimensions agree")
        .reduce()
}

/// Coordinates used for the base points of rank reports, cycled by index.
fn report_coordinate(i: usize) -> Coordinate {
    match i % 2 {
        0 => Coordinate::rational_str("", "0"),
        _ => Coordinate::rational_str("", "1"),
    }
}

/// The all-rational base point used for a group of dimension `dim`.
pub fn report_point(dim: Dimension, k_max: usize) -> Point {
    match dim {
        Dimension::Finite(n) => Point::Finite((0..n).map(report_coordinate).collect()),
        Dimension::Omega => Point::omega(
            (0..k_max).map(|i| (i, report_coordinate(i))).collect(),
            Coordinate::rational_str("", "0"),
        ),
    }
}

/// Rank of an integer matrix by fraction-free elimination.
pub fn integer_rank(rows: &[Vec<i64>]) -> usize {
    let mut m: Vec<Vec<i128>> = rows.iter().map(|r| r.iter().map(|&v| v as i128).collect()).collect();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..m.len()).find(|&r| m[r][c] != 0) else {
            continue;
        };
        m.swap(rank, p);
        for r in 0..m.len() {
            if r != rank && m[r][c] != 0 {
                let (a, b) = (m[rank][c], m[r][c]);
                let pivot = m[rank].clone();
                for (v, &q) in m[r].iter_mut().zip(&pivot) {
                    *v = *v * a - q * b;
                }
                let g = m[r].iter().fold(0i128, |g, &v| gcd(g, v.abs()));
                if g > 1 {
                    m[r].iter_mut().for_each(|v| *v /= g);
                }
            }
        }
        rank += 1;
    }
    rank
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// One group's part of a rank report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GroupRecord {
    pub group: String,
    pub point: String,
    pub generator_signatures: Vec<Vec<i64>>,
    pub realized_rank: usize,
    /// For `ωV` only a lower bound is realized.
    pub realized_rank_is_lower_bound: bool,
    /// Every signature of the group is supported on this many coordinates.
    pub support_bound: String,
    pub products_checked: usize,
    pub products_failed: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Conclusion {
    pub isomorphic_possible: bool,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RankReport {
    pub k_max: usize,
    pub groups: Vec<GroupRecord>,
    pub conclusion: Conclusion,
}

fn group_record(dim: Dimension, k_max: usize) -> Result<GroupRecord> {
    let rank = match dim {
        Dimension::Finite(n) => n,
        Dimension::Omega => k_max,
    };
    let x = report_point(dim, k_max);
    let gens = (0..rank)
        .map(|i| germ_generator(&x, i, Direction::Positive))
        .collect::<Result<Vec<_>>>()?;
    let signatures = gens
        .iter()
        .map(|g| Ok(germ_signature(g, &x)?.to_dense(rank)))
        .collect::<Result<Vec<_>>>()?;
    let (checked, failed) = check_products(&x, &gens, k_max)?;
    Ok(GroupRecord {
        group: dim.group_name(),
        point: x.to_string(),
        realized_rank: integer_rank(&signatures),
        generator_signatures: signatures,
        realized_rank_is_lower_bound: dim == Dimension::Omega,
        support_bound: match dim {
            Dimension::Finite(n) => n.to_string(),
            Dimension::Omega => "omega".to_string(),
        },
        products_checked: checked,
        products_failed: failed,
    })
}

/// Forms `∏ gens[i]^v[i]` for every `v ∈ {-k..k}^rank` and compares its
/// signature with `v`. Returns `(checked, failed)`.
///
/// Products are built depth-first so each shared prefix is composed once.
fn check_products(x: &Point, gens: &[Element], k: usize) -> Result<(usize, usize)> {
    let k = k as i64;
    let mut powers: HashMap<(usize, i64), Element> = HashMap::new();
    for (i, g) in gens.iter().enumerate() {
        for e in -k..=k {
            powers.insert((i, e), g.pow(e));
        }
    }
    let mut checked = 0;
    let mut failed = 0;
    let mut exps = Vec::with_capacity(gens.len());
    product_walk(x, gens.len(), k, &powers, &Element::identity(x.dim()), &mut exps, &mut checked, &mut failed)?;
    Ok((checked, failed))
}

#[allow(clippy::too_many_arguments)]
fn product_walk(
    x: &Point,
    rank: usize,
    k: i64,
    powers: &HashMap<(usize, i64), Element>,
    acc: &Element,
    exps: &mut Vec<i64>,
    checked: &mut usize,
    failed: &mut usize,
) -> Result<()> {
    let depth = exps.len();
    if depth == rank {
        *checked += 1;
        let expected = GermSignature::from_entries(exps.iter().copied().enumerate());
        if germ_signature(acc, x)? != expected {
            *failed += 1;
        }
        return Ok(());
    }
    for e in -k..=k {
        let next = powers[&(depth, e)].compose(acc)?;
        exps.push(e);
        product_walk(x, rank, k, powers, &next, exps, checked, failed)?;
        exps.pop();
    }
    Ok(())
}

/// Compares the germ ranks of `mV` and `nV` at all-rational points.
///
/// Each group's generators are checked to have the standard basis as
/// signatures, and every vector in `{-k_max..k_max}^rank` is realized by a
/// product of generator powers. `nV` has germ rank exactly `n`; `ωV` is shown
/// to reach at least `k_max`.
pub fn rank_report(m: Dimension, n: Dimension, k_max: usize) -> Result<RankReport> {
    let groups = vec![group_record(m, k_max)?, group_record(n, k_max)?];
    let conclusion = conclude(m, n, &groups);
    Ok(RankReport {
        k_max,
        groups,
        conclusion,
    })
}

fn conclude(m: Dimension, n: Dimension, groups: &[GroupRecord]) -> Conclusion {
    let (a, b) = (&groups[0], &groups[1]);
    if a.products_failed + b.products_failed > 0 {
        return Conclusion {
            isomorphic_possible: true,
            reason: "some products failed to realize their signatures".into(),
        };
    }
    let describe = |r: &GroupRecord| {
        if r.realized_rank_is_lower_bound {
            format!(">={}", r.realized_rank)
        } else {
            r.realized_rank.to_string()
        }
    };
    let separated = match (m, n) {
        (Dimension::Finite(_), Dimension::Finite(_)) => a.realized_rank != b.realized_rank,
        (Dimension::Finite(_), Dimension::Omega) => b.realized_rank > a.realized_rank,
        (Dimension::Omega, Dimension::Finite(_)) => a.realized_rank > b.realized_rank,
        (Dimension::Omega, Dimension::Omega) => false,
    };
    let reason = if separated {
        format!(
            "germ ranks {} and {} differ",
            describe(a),
            describe(b)
        )
    } else {
        format!("germ ranks {} and {} do not separate the groups", describe(a), describe(b))
    };
    Conclusion {
        isomorphic_possible: !separated,
        reason,
    }
}

impl fmt::Display for RankReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "k_max: {}", self.k_max)?;
        for g in &self.groups {
            writeln!(f)?;
            writeln!(f, "group: {}", g.group)?;
            writeln!(f, "point: {}", g.point)?;
            let rows: Vec<String> = g
                .generator_signatures
                .iter()
                .map(|r| format!("[{}]", r.iter().map(i64::to_string).collect::<Vec<_>>().join(" ")))
                .collect();
            writeln!(f, "generator_signatures: {}", rows.join(" "))?;
            let bound = if g.realized_rank_is_lower_bound { ">=" } else { "" };
            writeln!(f, "realized_rank: {bound}{}", g.realized_rank)?;
            writeln!(f, "support_bound: {}", g.support_bound)?;
            writeln!(f, "products_checked: {}", g.products_checked)?;
            writeln!(f, "products_failed: {}", g.products_failed)?;
        }
        writeln!(f)?;
        writeln!(f, "conclusion: {}", self.conclusion.reason)?;
        writeln!(
            f,
            "isomorphic_possible: {}",
            if self.conclusion.isomorphic_possible { "yes" } else { "no" }
        )
    }
}
