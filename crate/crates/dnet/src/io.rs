//! Point-set text files.
//!
//! ```text
//! # d=2 N=4 base=2 m=2 exact=1
//! 0 0
//! 1 2
//! ...
//! ```
//!
//! With `exact=1` the values are integer numerators over `base^m`; otherwise
//! they are decimals with 17 significant digits. Sets that do not live on a
//! grid are written with `base=0 m=0 exact=0`.

use std::fmt::Write as _;

use dnet_core::PointSet;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

fn err(line: usize, message: impl Into<String>) -> ParseError {
    ParseError {
        line,
        message: message.into(),
    }
}

pub fn write_points(ps: &PointSet) -> String {
    let d = ps.dim();
    let mut out = String::new();
    match ps.grid().filter(|_| ps.is_exact()) {
        Some(g) => {
            let _ = writeln!(out, "# d={d} N={} base={} m={} exact=1", ps.len(), g.base(), g.depth());
            for row in g.numerators().chunks_exact(d.max(1)) {
                let line: Vec<String> = row.iter().map(u64::to_string).collect();
                let _ = writeln!(out, "{}", line.join(" "));
            }
        }
        None => {
            let (b, m) = ps.grid().map_or((0, 0), |g| (g.base(), g.depth()));
            let _ = writeln!(out, "# d={d} N={} base={b} m={m} exact=0", ps.len());
            for p in ps.points() {
                let line: Vec<String> = p.iter().map(|x| format!("{x:.16e}")).collect();
                let _ = writeln!(out, "{}", line.join(" "));
            }
        }
    }
    out
}

struct Header {
    d: usize,
    n: usize,
    base: u32,
    m: u32,
    exact: bool,
}

fn parse_header(line: &str) -> Result<Header, ParseError> {
    let body = line
        .strip_prefix('#')
        .ok_or_else(|| err(1, "expected a header starting with '#'"))?;
    let (mut d, mut n, mut base, mut m, mut exact) = (None, None, None, None, None);
    for field in body.split_whitespace() {
        let (k, v) = field
            .split_once('=')
            .ok_or_else(|| err(1, format!("header field '{field}' is not key=value")))?;
        let num = || v.parse::<u64>().map_err(|_| err(1, format!("header value '{v}' for '{k}' is not an integer")));
        match k {
            "d" => d = Some(num()? as usize),
            "N" => n = Some(num()? as usize),
            "base" => base = Some(num()? as u32),
            "m" => m = Some(num()? as u32),
            "exact" => exact = Some(num()? != 0),
            _ => return Err(err(1, format!("unknown header field '{k}'"))),
        }
    }
    let need = |x: Option<_>, k: &str| x.ok_or_else(|| err(1, format!("header lacks '{k}'")));
    Ok(Header {
        d: need(d, "d")?,
        n: need(n, "N")?,
        base: base.unwrap_or(0),
        m: m.unwrap_or(0),
        exact: exact.unwrap_or(false),
    })
}

pub fn read_points(text: &str) -> Result<PointSet, ParseError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    let (_, first) = lines.next().ok_or_else(|| err(1, "empty file"))?;
    let h = parse_header(first)?;
    if h.d == 0 {
        return Err(err(1, "d must be positive"));
    }
    if h.exact && h.base < 2 {
        return Err(err(1, "exact files need base >= 2"));
    }
    let rows: Vec<(usize, &str)> = lines.filter(|(_, l)| !l.is_empty() && !l.starts_with('#')).collect();
    if rows.len() != h.n {
        let line = rows.last().map_or(1, |r| r.0);
        return Err(err(line, format!("header says N={} but the file has {} points", h.n, rows.len())));
    }
    let denom = if h.exact {
        (h.base as u64).checked_pow(h.m).ok_or_else(|| err(1, "base^m overflows"))?
    } else {
        0
    };
    let mut nums = Vec::new();
    let mut coords = Vec::new();
    for (no, row) in &rows {
        let fields: Vec<&str> = row.split_whitespace().collect();
        if fields.len() != h.d {
            return Err(err(*no, format!("expected {} values, found {}", h.d, fields.len())));
        }
        for f in fields {
            if h.exact {
                let x = f.parse::<u64>().map_err(|_| err(*no, format!("'{f}' is not an integer numerator")))?;
                if x >= denom {
                    return Err(err(*no, format!("numerator {x} is not below {}^{}", h.base, h.m)));
                }
                nums.push(x);
            } else {
                let x: f64 = f.parse().map_err(|_| err(*no, format!("'{f}' is not a number")))?;
                if !(0.0..1.0).contains(&x) {
                    return Err(err(*no, format!("coordinate {f} is outside [0, 1)")));
                }
                coords.push(x);
            }
        }
    }
    let ps = if h.exact {
        PointSet::from_grid(h.d, h.base, h.m, nums)
    } else {
        PointSet::from_coords(h.d, coords)
    };
    ps.map_err(|e| err(rows.first().map_or(1, |r| r.0), e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use dnet_core::GeneratorSet;

    #[test]
    fn exact_round_trip() {
        let ps = GeneratorSet::faure(3, 2, 2).unwrap().generate();
        let text = write_points(&ps);
        assert!(text.starts_with("# d=2 N=9 base=3 m=2 exact=1\n"));
        assert_eq!(read_points(&text).unwrap(), ps);
    }

    #[test]
    fn decimal_round_trip_is_bit_exact() {
        let ps = PointSet::random(10, 3, 4);
        let back = read_points(&write_points(&ps)).unwrap();
        assert_eq!(back.coords(), ps.coords());
    }

    #[test]
    fn errors_name_the_line() {
        let e = read_points("# d=2 N=2 base=0 m=0 exact=0\n0.1 0.2\n0.3\n").unwrap_err();
        assert_eq!(e.line, 3);
        let e = read_points("# d=1 N=2 exact=0\n0.5\n1.5\n").unwrap_err();
        assert_eq!(e.line, 3);
        let e = read_points("d=1\n").unwrap_err();
        assert_eq!(e.line, 1);
        let e = read_points("# d=1 N=1 base=2 m=2 exact=1\nx\n").unwrap_err();
        assert_eq!(e.line, 2);
    }
}
