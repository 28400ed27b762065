//! Exact computation in the Brin–Thompson groups `nV` acting on powers of
//! the Cantor set.
//!
//! Points, rectangles and elements all have finite descriptions, and every
//! operation is exact: coordinates are eventually periodic words or a named
//! aperiodic stream with a finite modification, kept in canonical form.
//!
//! The central invariant is the germ signature ([`germ::germ_signature`]):
//! at a fixed point `x`, an element's germ is determined by one integer per
//! rational coordinate of `x`, giving `G(nV, x) ≅ Z^|x|`. The rank of that
//! group separates `mV` from `nV` ([`germ::rank_report`]).

pub mod dynamics;
pub mod element;
pub mod error;
pub mod geometry;
pub mod germ;
pub mod textio;
pub mod words;

pub use element::{cycle_element, random_element, Element, RectangleMap};
pub use error::{Error, Result, SourceSpan};
pub use geometry::{complete_to_pattern, is_pattern, refine_pattern, Dimension, DyadicMeasure, Pattern, Point, Rectangle};
pub use words::{coords_equal, BinaryWord, Coordinate, Stream};
