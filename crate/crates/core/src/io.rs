//! Pattern files: CSV with an `x,y` header, one point per row.

use std::collections::HashMap;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::{Point, PointPattern, Window};

/// Read a pattern observed in `window` from a CSV file.
pub fn read_pattern_csv(path: &Path, window: Window) -> Result<PointPattern> {
    parse_pattern_csv(File::open(path)?, path, window)
}

/// Parse pattern CSV from `reader`; `path` only labels errors. Line numbers
/// count the header as line 1.
pub fn parse_pattern_csv<R: Read>(reader: R, path: &Path, window: Window) -> Result<PointPattern> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(reader);
    let parse_err = |line: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    if rdr.headers()?.len() < 2 {
        return Err(parse_err(1, "expected a header with two columns".into()));
    }
    let mut points = Vec::new();
    let mut seen: HashMap<(u64, u64), usize> = HashMap::new();
    let mut outside: Vec<(usize, Point)> = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.len() < 2 {
            return Err(parse_err(line, format!("expected 2 columns, found {}", record.len())));
        }
        let coord = |i: usize| -> Result<f64> {
            let field = &record[i];
            match field.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(parse_err(line, format!("invalid coordinate '{field}'"))),
            }
        };
        let p = Point::new(coord(0)?, coord(1)?);
        if !window.contains(p) {
            outside.push((line, p));
            continue;
        }
        let key = ((p.x + 0.0).to_bits(), (p.y + 0.0).to_bits());
        if seen.insert(key, line).is_some() {
            return Err(Error::DuplicatePoint { x: p.x, y: p.y, line });
        }
        points.push(p);
    }
    if let Some(&(first_line, p)) = outside.first() {
        for (line, q) in &outside {
            log::error!("line {line}: ({}, {}) outside the window", q.x, q.y);
        }
        return Err(Error::PointsOutside {
            count: outside.len(),
            first_line,
            x: p.x,
            y: p.y,
        });
    }
    PointPattern::new(points, window)
}

/// Write `pat` as `x,y` CSV; coordinates round-trip exactly.
pub fn write_pattern_csv<W: Write>(pat: &PointPattern, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["x", "y"])?;
    for p in pat.points() {
        w.write_record([p.x.to_string(), p.y.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_pattern_file(pat: &PointPattern, path: &Path) -> Result<()> {
    write_pattern_csv(pat, File::create(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<PointPattern> {
        parse_pattern_csv(text.as_bytes(), Path::new("mem.csv"), Window::new(0.0, 100.0, 0.0, 100.0).unwrap())
    }

    #[test]
    fn two_point_file() {
        let pat = parse("x,y\n1.0,2.0\n3.5,4.1").unwrap();
        assert_eq!(pat.points(), &[Point::new(1.0, 2.0), Point::new(3.5, 4.1)]);
    }

    #[test]
    fn malformed_row_reports_line() {
        let err = parse("x,y\n1.0,2.0\n1.0,abc\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
    }

    #[test]
    fn duplicates_rejected() {
        let err = parse("x,y\n1.0,2.0\n1.0,2.0\n").unwrap_err();
        assert!(matches!(err, Error::DuplicatePoint { line: 3, .. }), "{err}");
    }

    #[test]
    fn outside_points_rejected() {
        let err = parse("x,y\n1.0,2.0\n101,5\n-1,3\n").unwrap_err();
        assert!(matches!(err, Error::PointsOutside { count: 2, first_line: 3, .. }), "{err}");
    }

    #[test]
    fn write_then_read_round_trips() {
        let w = Window::unit_square();
        let pat = PointPattern::new(vec![Point::new(0.1, 1.0 / 3.0), Point::new(0.7, 0.2)], w).unwrap();
        let mut buf = Vec::new();
        write_pattern_csv(&pat, &mut buf).unwrap();
        let back = parse_pattern_csv(buf.as_slice(), Path::new("mem.csv"), w).unwrap();
        assert_eq!(back, pat);
    }
}
