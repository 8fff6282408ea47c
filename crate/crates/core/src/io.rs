//! Text exports. UTF-8, LF line endings, one header line; vertices are
//! written 1-based.

use std::io::{self, BufRead, Write};

use crate::graphstats::DegreeHistogram;
use crate::process::GraphState;
use crate::scalar::Real;

#[derive(Debug, thiserror::Error)]
pub enum ParseError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("expected header {expected:?}, found {found:?}")]
    Header { expected: String, found: String },
    #[error("line {line}: {message}")]
    Row { line: usize, message: String },
}

/// `src\thead` per edge.
pub fn write_edges<T: Real, W: Write>(state: &GraphState<T>, mut w: W) -> io::Result<()> {
    writeln!(w, "src\thead")?;
    for (s, h) in state.edges() {
        writeln!(w, "{}\t{}", s + 1, h + 1)?;
    }
    Ok(())
}

/// `vertex,x,y,z` per vertex.
pub fn write_positions<T: Real, W: Write>(state: &GraphState<T>, mut w: W) -> io::Result<()> {
    writeln!(w, "vertex,x,y,z")?;
    for (v, p) in state.positions().iter().enumerate() {
        let [x, y, z] = p.coords();
        writeln!(w, "{},{:e},{:e},{:e}", v + 1, x.as_f64(), y.as_f64(), z.as_f64())?;
    }
    Ok(())
}

/// `k,count` for every non-empty degree.
pub fn write_histogram<W: Write>(hist: &DegreeHistogram, mut w: W) -> io::Result<()> {
    writeln!(w, "k,count")?;
    for (k, c) in hist.nonzero() {
        writeln!(w, "{k},{c}")?;
    }
    Ok(())
}

/// `k,p_k` rows.
pub fn write_theory<T: Real, W: Write>(rows: impl IntoIterator<Item = (usize, T)>, mut w: W) -> io::Result<()> {
    writeln!(w, "k,p_k")?;
    for (k, p) in rows {
        writeln!(w, "{k},{:e}", p.as_f64())?;
    }
    Ok(())
}

/// `sigma,delta` rows of a mismatch trajectory starting at `tau`.
pub fn write_trajectory<W: Write>(tau: usize, trajectory: &[u64], mut w: W) -> io::Result<()> {
    writeln!(w, "sigma,delta")?;
    for (i, d) in trajectory.iter().enumerate() {
        writeln!(w, "{},{d}", tau + i)?;
    }
    Ok(())
}

fn read_rows<R: BufRead>(r: R, header: &str, sep: char, width: usize) -> Result<Vec<Vec<String>>, ParseError> {
    let mut lines = r.lines();
    let first = lines.next().transpose()?.unwrap_or_default();
    if first != header {
        return Err(ParseError::Header {
            expected: header.into(),
            found: first,
        });
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        let fields: Vec<String> = line.split(sep).map(str::to_string).collect();
        if fields.len() != width {
            return Err(ParseError::Row {
                line: i + 2,
                message: format!("expected {width} fields, found {}", fields.len()),
            });
        }
        rows.push(fields);
    }
    Ok(rows)
}

fn field<F: std::str::FromStr>(s: &str, line: usize) -> Result<F, ParseError> {
    s.parse().map_err(|_| ParseError::Row {
        line,
        message: format!("cannot parse {s:?}"),
    })
}

/// Reads `k,count` back as `(k, count)` pairs.
pub fn read_histogram<R: BufRead>(r: R) -> Result<Vec<(usize, u64)>, ParseError> {
    read_rows(r, "k,count", ',', 2)?
        .iter()
        .enumerate()
        .map(|(i, f)| Ok((field(&f[0], i + 2)?, field(&f[1], i + 2)?)))
        .collect()
}

/// Reads `k,p_k` back.
pub fn read_theory<R: BufRead>(r: R) -> Result<Vec<(usize, f64)>, ParseError> {
    read_rows(r, "k,p_k", ',', 2)?
        .iter()
        .enumerate()
        .map(|(i, f)| Ok((field(&f[0], i + 2)?, field(&f[1], i + 2)?)))
        .collect()
}

/// Reads `src\thead` back as 1-based pairs.
pub fn read_edges<R: BufRead>(r: R) -> Result<Vec<(usize, usize)>, ParseError> {
    read_rows(r, "src\thead", '\t', 2)?
        .iter()
        .enumerate()
        .map(|(i, f)| Ok((field(&f[0], i + 2)?, field(&f[1], i + 2)?)))
        .collect()
}

/// Reads `sigma,delta` back.
pub fn read_trajectory<R: BufRead>(r: R) -> Result<Vec<(usize, u64)>, ParseError> {
    read_rows(r, "sigma,delta", ',', 2)?
        .iter()
        .enumerate()
        .map(|(i, f)| Ok((field(&f[0], i + 2)?, field(&f[1], i + 2)?)))
        .collect()
}

/// Reads `vertex,x,y,z` back.
pub fn read_positions<R: BufRead>(r: R) -> Result<Vec<(usize, [f64; 3])>, ParseError> {
    read_rows(r, "vertex,x,y,z", ',', 4)?
        .iter()
        .enumerate()
        .map(|(i, f)| {
            let l = i + 2;
            Ok((field(&f[0], l)?, [field(&f[1], l)?, field(&f[2], l)?, field(&f[3], l)?]))
        })
        .collect()
}
