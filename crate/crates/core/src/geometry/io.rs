//! Plain-text polygon files: a vertex count on the first line, then one
//! `x y` pair per line.

use std::fmt::Write as _;
use std::path::Path;

use super::point::Point;
use super::polygon::Polygon;
use crate::error::{Error, Result};

pub fn parse_polygon(text: &str) -> Result<Polygon> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let (line, first) = lines.next().ok_or(Error::Parse {
        line: 1,
        msg: "empty polygon file".into(),
    })?;
    let count: usize = first.parse().map_err(|_| Error::Parse {
        line,
        msg: format!("expected vertex count, got {first:?}"),
    })?;
    let mut pts = Vec::with_capacity(count);
    for (line, l) in lines.by_ref().take(count) {
        let mut it = l.split_whitespace();
        let mut coord = || -> Result<f64> {
            it.next()
                .ok_or(Error::Parse {
                    line,
                    msg: "expected two coordinates".into(),
                })?
                .parse::<f64>()
                .map_err(|e| Error::Parse {
                    line,
                    msg: e.to_string(),
                })
        };
        let (x, y) = (coord()?, coord()?);
        if it.next().is_some() {
            return Err(Error::Parse {
                line,
                msg: "trailing tokens".into(),
            });
        }
        pts.push(Point::new(x, y));
    }
    if pts.len() != count {
        return Err(Error::Parse {
            line,
            msg: format!("declared {count} vertices, found {}", pts.len()),
        });
    }
    if let Some((line, _)) = lines.next() {
        return Err(Error::Parse {
            line,
            msg: "unexpected content after the vertex list".into(),
        });
    }
    Polygon::new(pts)
}

pub fn format_polygon(poly: &Polygon) -> String {
    let mut out = format!("{}\n", poly.len());
    for p in poly.vertices() {
        let _ = writeln!(out, "{:?} {:?}", p.x, p.y);
    }
    out
}

pub fn read_polygon_file(path: impl AsRef<Path>) -> Result<Polygon> {
    parse_polygon(&std::fs::read_to_string(path)?)
}

pub fn write_polygon_file(path: impl AsRef<Path>, poly: &Polygon) -> Result<()> {
    std::fs::write(path, format_polygon(poly))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_square() {
        let p = parse_polygon("4\n0 0\n1 0\n1 1\n0 1\n").unwrap();
        assert_eq!(p.len(), 4);
        assert_eq!(p.area(), 1.0);
    }

    #[test]
    fn round_trip_is_exact() {
        let p = Polygon::regular(7, Point::new(0.1, -0.2), 1.3, 0.4).unwrap();
        assert_eq!(parse_polygon(&format_polygon(&p)).unwrap(), p);
    }

    #[test]
    fn rejects_bad_files() {
        assert!(parse_polygon("").is_err());
        assert!(parse_polygon("3\n0 0\n1 0\n").is_err());
        assert!(parse_polygon("3\n0 0\n1 0\n0 x\n").is_err());
        assert!(parse_polygon("3\n0 0\n1 0\n0 1\n5 5\n").is_err());
        // nonconvex vertex list is caught by validation
        assert!(parse_polygon("5\n0 0\n2 0\n1 0.2\n2 2\n0 2\n").is_err());
    }
}
