//! Text formats for coordinates, points, rectangles and elements.
//!
//! ```text
//! coordinate  A(w)            eventually periodic, e.g. 01(10), (0)
//!             u~TM[k]         Thue-Morse with k symbols dropped, u prepended
//! point       [c, c, ...]                 finite
//!             [i:c; j:c; default=c]       omega
//! rectangle   (p0, p1, ...)   finite, empty slots allowed
//!             {i:p, j:q}      omega, sparse
//! element     nv <n|omega>    header, then one cell per line: D -> R
//! ```
//!
//! Whitespace inside a line is ignored and `#` starts a comment. Rendering
//! produces the canonical spelling, which parses back to an identical value.

pub mod cli;

use std::collections::BTreeMap;

use crate::element::{Element, RectangleMap};
use crate::error::{Error, Result, SourceSpan};
use crate::geometry::{Dimension, Point, Rectangle};
use crate::words::{BinaryWord, Coordinate, Stream};

struct Cursor {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    /// Column of `chars[0]` in the source line, 1-based.
    base_column: usize,
}

impl Cursor {
    fn new(src: &str, line: usize, base_column: usize) -> Self {
        Cursor {
            chars: src.chars().collect(),
            pos: 0,
            line,
            base_column,
        }
    }

    fn span(&self, start: usize, length: usize) -> SourceSpan {
        SourceSpan {
            line: self.line,
            column: self.base_column + start,
            length: length.max(1),
        }
    }

    fn error<T>(&self, start: usize, message: impl Into<String>) -> Result<T> {
        let length = self.pos.saturating_sub(start).max(1);
        Err(Error::Syntax {
            span: self.span(start, length),
            message: message.into(),
        })
    }

    fn error_here<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Syntax {
            span: self.span(self.pos, 1),
            message: message.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.chars.get(self.pos).is_some_and(|c| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            match self.peek() {
                Some(found) => self.error_here(format!("expected `{c}`, found `{found}`")),
                None => self.error_here(format!("expected `{c}`, found end of input")),
            }
        }
    }

    fn eat_str(&mut self, s: &str) -> bool {
        self.skip_ws();
        let n = s.chars().count();
        if self.chars.len() >= self.pos + n && self.chars[self.pos..self.pos + n].iter().copied().eq(s.chars()) {
            self.pos += n;
            true
        } else {
            false
        }
    }

    fn word(&mut self) -> BinaryWord {
        self.skip_ws();
        let mut w = BinaryWord::empty();
        while let Some(&c) = self.chars.get(self.pos) {
            match c {
                '0' => w.push(false),
                '1' => w.push(true),
                _ => break,
            }
            self.pos += 1;
        }
        w
    }

    fn number(&mut self) -> Result<usize> {
        self.skip_ws();
        let start = self.pos;
        while self.chars.get(self.pos).is_some_and(char::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return self.error_here("expected a number");
        }
        let digits: String = self.chars[start..self.pos].iter().collect();
        match digits.parse() {
            Ok(n) => Ok(n),
            Err(_) => self.error(start, "number out of range"),
        }
    }

    fn identifier(&mut self) -> String {
        self.skip_ws();
        let start = self.pos;
        while self.chars.get(self.pos).is_some_and(|c| c.is_ascii_alphanumeric()) {
            self.pos += 1;
        }
        self.chars[start..self.pos].iter().collect()
    }

    /// True when a decimal index followed by `:` starts here.
    fn looks_like_index(&mut self) -> bool {
        self.skip_ws();
        let mut p = self.pos;
        while self.chars.get(p).is_some_and(char::is_ascii_digit) {
            p += 1;
        }
        if p == self.pos {
            return false;
        }
        while self.chars.get(p).is_some_and(|c| c.is_whitespace()) {
            p += 1;
        }
        self.chars.get(p) == Some(&':')
    }

    fn finish(&mut self) -> Result<()> {
        match self.peek() {
            None => Ok(()),
            Some(c) => self.error_here(format!("unexpected `{c}`")),
        }
    }

    fn coordinate(&mut self) -> Result<Coordinate> {
        self.skip_ws();
        let start = self.pos;
        let head = self.word();
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let period = self.word();
                self.expect(')')?;
                if period.is_empty() {
                    return self.error(start, "period must be nonempty");
                }
                Ok(Coordinate::rational(head, period)?)
            }
            Some('~') => {
                self.pos += 1;
                let tag_start = self.pos;
                let tag = self.identifier();
                let Some(stream) = Stream::from_tag(&tag) else {
                    return self.error(tag_start, format!("unknown stream `{tag}`"));
                };
                self.expect('[')?;
                let drop = self.number()? as u64;
                self.expect(']')?;
                Ok(Coordinate::aperiodic(stream, drop, head))
            }
            _ => self.error_here("expected `(` or `~` in coordinate"),
        }
    }

    fn point(&mut self) -> Result<Point> {
        self.expect('[')?;
        if self.looks_like_index() || self.peek() == Some('d') {
            let mut explicit = BTreeMap::new();
            loop {
                if self.eat_str("default") {
                    self.expect('=')?;
                    let default = self.coordinate()?;
                    self.expect(']')?;
                    return Ok(Point::omega(explicit, default));
                }
                let start = self.pos;
                let i = self.number()?;
                self.expect(':')?;
                let c = self.coordinate()?;
                if explicit.insert(i, c).is_some() {
                    return self.error(start, format!("index {i} listed twice"));
                }
                if !(self.eat(';') || self.eat(',')) {
                    return self.error_here("expected `;` before `default=`");
                }
            }
        }
        let mut coords = vec![self.coordinate()?];
        while self.eat(',') {
            coords.push(self.coordinate()?);
        }
        self.expect(']')?;
        Ok(Point::Finite(coords))
    }

    fn rectangle(&mut self, dim: Dimension) -> Result<Rectangle> {
        let start = self.pos;
        match dim {
            Dimension::Finite(n) => {
                self.expect('(')?;
                let mut slots = vec![self.word()];
                while self.eat(',') {
                    slots.push(self.word());
                }
                self.expect(')')?;
                if slots.len() != n {
                    return self.error(start, format!("expected {n} slots, found {}", slots.len()));
                }
                Ok(Rectangle::new(dim, slots.into_iter().enumerate())?)
            }
            Dimension::Omega => {
                self.expect('{')?;
                let mut prefixes = BTreeMap::new();
                if !self.eat('}') {
                    loop {
                        let entry = self.pos;
                        let i = self.number()?;
                        self.expect(':')?;
                        let w = self.word();
                        if prefixes.insert(i, w).is_some() {
                            return self.error(entry, format!("index {i} listed twice"));
                        }
                        if self.eat('}') {
                            break;
                        }
                        self.expect(',')?;
                    }
                }
                Ok(Rectangle::new(dim, prefixes)?)
            }
        }
    }
}

fn strip_comment(line: &str) -> &str {
    line.split_once('#').map_or(line, |(code, _)| code)
}

pub fn parse_coordinate(text: &str) -> Result<Coordinate> {
    let mut c = Cursor::new(text, 1, 1);
    let v = c.coordinate()?;
    c.finish()?;
    Ok(v)
}

pub fn parse_point(text: &str) -> Result<Point> {
    let mut c = Cursor::new(text, 1, 1);
    let v = c.point()?;
    c.finish()?;
    Ok(v)
}

pub fn render_point(x: &Point) -> String {
    x.to_string()
}

pub fn parse_rectangle(text: &str, dim: Dimension) -> Result<Rectangle> {
    let mut c = Cursor::new(text, 1, 1);
    let v = c.rectangle(dim)?;
    c.finish()?;
    Ok(v)
}

pub fn parse_dimension(text: &str) -> Result<Dimension> {
    let t = text.trim();
    if t == "omega" {
        return Ok(Dimension::Omega);
    }
    match t.parse::<usize>() {
        Ok(n) if n > 0 => Ok(Dimension::Finite(n)),
        _ => Err(Error::Syntax {
            span: SourceSpan {
                line: 1,
                column: 1,
                length: text.len().max(1),
            },
            message: format!("expected a positive integer or `omega`, found `{text}`"),
        }),
    }
}

/// Parses and validates an element.
pub fn parse_element(text: &str) -> Result<Element> {
    let mut dim = None;
    let mut maps = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line_no = k + 1;
        let code = strip_comment(raw);
        if code.trim().is_empty() {
            continue;
        }
        let mut c = Cursor::new(code, line_no, 1);
        match dim {
            None => {
                if !c.eat_str("nv") {
                    return c.error_here("expected header `nv <n|omega>`");
                }
                c.skip_ws();
                let start = c.pos;
                let rest: String = c.chars[start..].iter().collect();
                dim = Some(parse_dimension(&rest).map_err(|_| Error::Syntax {
                    span: c.span(start, rest.trim_end().chars().count()),
                    message: format!("expected a positive integer or `omega`, found `{}`", rest.trim()),
                })?);
            }
            Some(d) => {
                let domain = c.rectangle(d)?;
                if !c.eat_str("->") {
                    return c.error_here("expected `->`");
                }
                let range = c.rectangle(d)?;
                c.finish()?;
                maps.push(RectangleMap::new(domain, range)?);
            }
        }
    }
    let Some(dim) = dim else {
        return Err(Error::Syntax {
            span: SourceSpan {
                line: 1,
                column: 1,
                length: 1,
            },
            message: "missing header `nv <n|omega>`".into(),
        });
    };
    Element::new(dim, maps)
}

/// Header line, then one `D->R` line per cell, sorted by domain.
pub fn render_element(f: &Element) -> String {
    let mut out = format!("nv {}\n", f.dim());
    for m in f.sorted().maps() {
        out.push_str(&m.to_string());
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::element::random_element;

    fn r(p: &[&str]) -> Rectangle {
        Rectangle::from_strs(p)
    }

    fn f_star() -> Element {
        Element::from_pairs(
            Dimension::Finite(1),
            vec![
                (r(&["0"]), r(&["00"])),
                (r(&["10"]), r(&["01"])),
                (r(&["11"]), r(&["1"])),
            ],
        )
        .unwrap()
    }

    fn span_of(e: Error) -> SourceSpan {
        match e {
            Error::Syntax { span, .. } => span,
            other => panic!("expected a syntax error, got {other:?}"),
        }
    }

    #[test]
    fn parse_element_examples() {
        assert_eq!(parse_element("nv 1\n(0)->(00)\n(10)->(01)\n(11)->(1)").unwrap(), f_star());
        assert_eq!(
            parse_element("nv 2\n(,)->(,)").unwrap(),
            Element::identity(Dimension::Finite(2))
        );
        assert!(matches!(
            parse_element("nv 1\n(0)->(00)"),
            Err(Error::InvalidRangePattern(_))
        ));
    }

    #[test]
    fn parse_element_tolerates_comments_and_spaces() {
        let text = "# f star\n  nv   1 # header\n\n( 0 ) -> ( 00 )\n(10)->(01)   # middle\n (11) ->(1)\n";
        assert_eq!(parse_element(text).unwrap(), f_star());
    }

    #[test]
    fn render_examples() {
        assert_eq!(render_element(&Element::identity(Dimension::Finite(1))), "nv 1\n()->()\n");
        let text = render_element(&f_star());
        assert_eq!(text, "nv 1\n(0)->(00)\n(10)->(01)\n(11)->(1)\n");
        assert_eq!(parse_element(&text).unwrap(), f_star().sorted());
        assert_eq!(render_element(&parse_element(&text).unwrap()), text);
    }

    #[test]
    fn omega_elements_round_trip() {
        let text = "nv omega\n{0:0, 4:1}->{0:00}\n{0:0,4:0}->{0:01}\n{0:1}->{0:1}\n";
        let f = parse_element(text).unwrap();
        let rendered = render_element(&f);
        assert_eq!(rendered, "nv omega\n{0:0,4:0}->{0:01}\n{0:0,4:1}->{0:00}\n{0:1}->{0:1}\n");
        assert_eq!(parse_element(&rendered).unwrap(), f.sorted());
    }

    #[test]
    fn random_elements_round_trip() {
        for seed in 0..200 {
            let dim = [Dimension::Finite(1), Dimension::Finite(2), Dimension::Finite(3), Dimension::Omega]
                [seed as usize % 4];
            let f = random_element(dim, 1 + seed as usize % 7, seed);
            let text = render_element(&f);
            let g = parse_element(&text).unwrap();
            assert_eq!(g, f.sorted());
            assert_eq!(render_element(&g), text);
        }
    }

    #[test]
    fn point_examples() {
        let x = parse_point("[(1)]").unwrap();
        assert_eq!(x, Point::Finite(vec![Coordinate::rational_str("", "1")]));
        assert_eq!(render_point(&parse_point("[0110(10)]").unwrap()), "[01(10)]");
        let x = parse_point("[~TM[3]]").unwrap();
        match x.coord(0) {
            Coordinate::Aperiodic(a) => assert_eq!(a.drop(), 3),
            other => panic!("unexpected {other:?}"),
        }
        let x = parse_point("[0:(1); default=(0)]").unwrap();
        assert_eq!(x.dim(), Dimension::Omega);
        assert_eq!(render_point(&x), "[0:(1); default=(0)]");
        assert_eq!(render_point(&parse_point("[ ~TM[0] , (0)]").unwrap()), "[~TM[0], (0)]");
        assert_eq!(render_point(&parse_point("[default=(0)]").unwrap()), "[default=(0)]");
    }

    #[test]
    fn rectangle_examples() {
        let d3 = Dimension::Finite(3);
        assert_eq!(parse_rectangle("(01, 1, )", d3).unwrap(), r(&["01", "1", ""]));
        let om = parse_rectangle("{0:01, 3:1}", Dimension::Omega).unwrap();
        assert_eq!(om.to_string(), "{0:01,3:1}");
        assert!(parse_rectangle("(01, 1)", d3).is_err());
    }

    #[test]
    fn syntax_errors_carry_spans() {
        let span = span_of(parse_element("nv 1\n(0)->(00)\n(10)=>(01)").unwrap_err());
        assert_eq!((span.line, span.column), (3, 5));
        let span = span_of(parse_element("nv 2\n(0)->(1,)").unwrap_err());
        assert_eq!(span.line, 2);
        let span = span_of(parse_element("nv zero\n").unwrap_err());
        assert_eq!((span.line, span.column), (1, 4));
        let span = span_of(parse_point("[01(10), (2)]").unwrap_err());
        assert_eq!((span.line, span.column), (1, 11));
        assert!(parse_point("[01()]").unwrap_err().is_syntax());
        assert!(parse_point("[~XX[0]]").unwrap_err().is_syntax());
        assert!(parse_element("").unwrap_err().is_syntax());
        assert!(parse_element("(0)->(0)").unwrap_err().is_syntax());
    }

    #[test]
    fn dimension_parsing() {
        assert_eq!(parse_dimension("3").unwrap(), Dimension::Finite(3));
        assert_eq!(parse_dimension("omega").unwrap(), Dimension::Omega);
        assert!(parse_dimension("0").is_err());
    }
}
