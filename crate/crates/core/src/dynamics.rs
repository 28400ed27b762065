//! Orbits of points under a single element, with exact cycle detection.

use crate::element::Element;
use crate::error::Result;
use crate::geometry::Point;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Period {
    Exact(usize),
    /// No repetition was found within this many steps.
    Truncated(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitResult {
    /// Distinct orbit points, starting with the initial point.
    pub points: Vec<Point>,
    pub preperiod: usize,
    pub period: Period,
}

impl OrbitResult {
    pub fn period(&self) -> Option<usize> {
        match self.period {
            Period::Exact(p) => Some(p),
            Period::Truncated(_) => None,
        }
    }
}

/// Iterates `f` from `x` for at most `max_steps` applications, comparing
/// each new point with every earlier one.
///
/// Points with aperiodic coordinates can have infinite orbits; those come
/// back as [`Period::Truncated`].
pub fn orbit(f: &Element, x: &Point, max_steps: usize) -> Result<OrbitResult> {
    let mut points = vec![x.clone()];
    for _ in 0..max_steps {
        let next = f.apply(points.last().expect("nonempty"))?;
        if let Some(j) = points.iter().position(|p| *p == next) {
            let period = points.len() - j;
            return Ok(OrbitResult {
                points,
                preperiod: j,
                period: Period::Exact(period),
            });
        }
        points.push(next);
    }
    Ok(OrbitResult {
        points,
        preperiod: 0,
        period: Period::Truncated(max_steps),
    })
}

/// True iff `f^k(x) = x`.
pub fn orbit_is_periodic(f: &Element, x: &Point, k: usize) -> Result<bool> {
    let o = orbit(f, x, k + 1)?;
    Ok(o.preperiod == 0 && matches!(o.period, Period::Exact(p) if k.is_multiple_of(p)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::element::cycle_element;
    use crate::geometry::{Dimension, Rectangle};
    use crate::words::Coordinate;

    fn r(p: &[&str]) -> Rectangle {
        Rectangle::from_strs(p)
    }

    fn pt(coords: &[(&str, &str)]) -> Point {
        Point::finite(coords.iter().map(|&(a, w)| Coordinate::rational_str(a, w)).collect()).unwrap()
    }

    #[test]
    fn orbit_examples() {
        let swap = cycle_element(&[r(&["0"]), r(&["1"])]).unwrap();
        let o = orbit(&swap, &pt(&[("", "0")]), 10).unwrap();
        assert_eq!((o.preperiod, o.period), (0, Period::Exact(2)));
        assert_eq!(o.points[1], pt(&[("1", "0")]));

        let x = pt(&[("01", "10"), ("", "1")]);
        let o = orbit(&Element::identity(Dimension::Finite(2)), &x, 10).unwrap();
        assert_eq!(o.period, Period::Exact(1));

        let f_star = Element::from_pairs(
            Dimension::Finite(1),
            vec![
                (r(&["0"]), r(&["00"])),
                (r(&["10"]), r(&["01"])),
                (r(&["11"]), r(&["1"])),
            ],
        )
        .unwrap();
        let o = orbit(&f_star, &pt(&[("", "1")]), 10).unwrap();
        assert_eq!(o.period, Period::Exact(1));
    }

    #[test]
    fn wandering_point_truncates() {
        let f_star = Element::from_pairs(
            Dimension::Finite(1),
            vec![
                (r(&["0"]), r(&["00"])),
                (r(&["10"]), r(&["01"])),
                (r(&["11"]), r(&["1"])),
            ],
        )
        .unwrap();
        // 0^k·1·0^∞ is pushed one step deeper towards 0^∞ at every iteration
        let o = orbit(&f_star, &pt(&[("1", "0")]), 25).unwrap();
        assert_eq!(o.period, Period::Truncated(25));
        assert_eq!(o.points.len(), 26);
    }

    #[test]
    fn periodicity_predicate() {
        let d2 = Dimension::Finite(2);
        let _ = d2;
        let c = cycle_element(&[r(&["00", ""]), r(&["01", ""]), r(&["10", ""])]).unwrap();
        let x = pt(&[("00", "1"), ("", "0")]);
        assert!(orbit_is_periodic(&c, &x, 3).unwrap());
        assert!(!orbit_is_periodic(&c, &x, 2).unwrap());
        assert!(orbit_is_periodic(&c, &x, 6).unwrap());
        assert!(orbit_is_periodic(&Element::identity(d2), &x, 1).unwrap());
    }
}
