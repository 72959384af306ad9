//! Plain-text vectors and sampling masks.
//!
//! Vector files hold real numbers separated by whitespace, commas or
//! newlines; `#` starts a comment. Mask files start with a shape line,
//! `line N` or `grid H W`, followed by zero-based indices in the same
//! free layout.

use std::fmt::Write as _;
use std::path::Path;

use super::records::{format_f64, write_bytes};
use crate::error::{Error, Result};
use crate::operators::{MaskDomain, SamplingMask};

fn tokens(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().flat_map(|(i, line)| {
        let body = line.split('#').next().unwrap_or("");
        body.split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .map(move |t| (i + 1, t))
    })
}

pub fn parse_vector(text: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (line, tok) in tokens(text) {
        let v: f64 = tok
            .parse()
            .map_err(|_| Error::parse(line, format!("not a number: {tok:?}")))?;
        if !v.is_finite() {
            return Err(Error::parse(line, format!("non-finite value {tok:?}")));
        }
        out.push(v);
    }
    Ok(out)
}

/// One value per line, 17 significant digits.
pub fn format_vector(v: &[f64]) -> String {
    let mut s = String::with_capacity(v.len() * 24);
    for x in v {
        let _ = writeln!(s, "{}", format_f64(*x));
    }
    s
}

pub fn read_vector(path: impl AsRef<Path>) -> Result<Vec<f64>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_vector(&text).map_err(|e| Error::invalid(format!("{}: {e}", path.display())))
}

pub fn write_vector(v: &[f64], path: impl AsRef<Path>) -> Result<()> {
    write_bytes(path.as_ref(), format_vector(v).as_bytes())
}

pub fn parse_mask(text: &str) -> Result<SamplingMask> {
    let mut toks = tokens(text).peekable();
    let (line, kind) = toks.next().ok_or_else(|| Error::invalid("empty mask file"))?;
    let mut dim = |what: &str| -> Result<usize> {
        let (l, t) = toks
            .next()
            .ok_or_else(|| Error::parse(line, format!("missing {what}")))?;
        t.parse()
            .map_err(|_| Error::parse(l, format!("bad {what} {t:?}")))
    };
    let domain = match kind {
        "line" => MaskDomain::Line(dim("length")?),
        "grid" => {
            let height = dim("height")?;
            let width = dim("width")?;
            MaskDomain::Grid { height, width }
        }
        other => return Err(Error::parse(line, format!("expected `line` or `grid`, found {other:?}"))),
    };
    let mut indices = Vec::new();
    for (l, t) in toks {
        indices.push(
            t.parse::<usize>()
                .map_err(|_| Error::parse(l, format!("bad index {t:?}")))?,
        );
    }
    SamplingMask::with_domain(indices, domain)
}

pub fn format_mask(mask: &SamplingMask) -> String {
    let mut s = match mask.domain() {
        MaskDomain::Line(n) => format!("line {n}\n"),
        MaskDomain::Grid { height, width } => format!("grid {height} {width}\n"),
    };
    for i in mask.indices() {
        let _ = writeln!(s, "{i}");
    }
    s
}

pub fn read_mask(path: impl AsRef<Path>) -> Result<SamplingMask> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_mask(&text).map_err(|e| Error::invalid(format!("{}: {e}", path.display())))
}

pub fn write_mask(mask: &SamplingMask, path: impl AsRef<Path>) -> Result<()> {
    write_bytes(path.as_ref(), format_mask(mask).as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vectors() {
        let v = parse_vector("# header\n1.5, -2\n3e-3 4\n\n5 # trailing\n").unwrap();
        assert_eq!(v, vec![1.5, -2.0, 3e-3, 4.0, 5.0]);
        let w = vec![0.1, 1.0 / 3.0, -7e-300];
        assert_eq!(parse_vector(&format_vector(&w)).unwrap(), w);
        assert!(parse_vector("1 two 3").is_err());
        assert!(parse_vector("inf").is_err());
        assert!(parse_vector("").unwrap().is_empty());
    }

    #[test]
    fn masks() {
        let m = parse_mask("line 8\n5 1, 3\n").unwrap();
        assert_eq!(m.indices(), &[1, 3, 5]);
        assert_eq!(parse_mask(&format_mask(&m)).unwrap(), m);
        let g = parse_mask("# 2-D\ngrid 4 4\n0 5 15").unwrap();
        assert_eq!(g.domain(), MaskDomain::Grid { height: 4, width: 4 });
        assert_eq!(parse_mask(&format_mask(&g)).unwrap(), g);
        assert!(parse_mask("").is_err());
        assert!(parse_mask("line\n").is_err());
        assert!(parse_mask("ring 4\n1").is_err());
        assert!(parse_mask("line 4\n4").is_err());
        assert!(parse_mask("line 4\n1 1").is_err());
        assert!(parse_mask("grid 2 x\n1").is_err());
    }
}
