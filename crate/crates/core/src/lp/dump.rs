//! Plain-text LP dump for cross-checking against external solvers.
//!
//! ```text
//! rows=<R> cols=<C>
//! <C objective coefficients>
//! <C coefficients of row 0> <rhs 0>
//! ...
//! <C coefficients of row R-1> <rhs R-1>
//! ```
//!
//! Values are space separated, in scientific notation with 17 significant
//! digits, so a dump read back reproduces the program bit for bit.

use std::io::{BufRead, Write};

use super::StandardFormLp;
use crate::error::{Error, Result};
use crate::fmt_sig17;

pub fn write_dump<W: Write>(lp: &StandardFormLp, mut out: W) -> Result<()> {
    let (m, n) = (lp.n_rows(), lp.n_cols());
    writeln!(out, "rows={m} cols={n}")?;
    write_line(&mut out, lp.objective().iter().copied())?;
    for i in 0..m {
        let row = (0..n).map(|j| lp.entry(i, j)).chain(std::iter::once(lp.rhs()[i]));
        write_line(&mut out, row)?;
    }
    Ok(())
}

fn write_line<W: Write>(out: &mut W, values: impl Iterator<Item = f64>) -> Result<()> {
    let mut first = true;
    for v in values {
        if !first {
            out.write_all(b" ")?;
        }
        out.write_all(fmt_sig17(v).as_bytes())?;
        first = false;
    }
    out.write_all(b"\n")?;
    Ok(())
}

pub fn read_dump<R: BufRead>(input: R) -> Result<StandardFormLp> {
    let mut lines = input.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty LP dump".into()))??;
    let (m, n) = parse_header(&header)?;

    let mut next_row = |expect: usize, what: &str| -> Result<Vec<f64>> {
        let line = lines
            .next()
            .ok_or_else(|| Error::Parse(format!("missing {what}")))??;
        let vals = line
            .split_whitespace()
            .map(|t| t.parse::<f64>().map_err(|e| Error::Parse(format!("{what}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        if vals.len() != expect {
            return Err(Error::Parse(format!(
                "{what} has {} values, expected {expect}",
                vals.len()
            )));
        }
        Ok(vals)
    };

    let objective = next_row(n, "objective row")?;
    let mut rows = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    for i in 0..m {
        let mut r = next_row(n + 1, &format!("row {i}"))?;
        rhs.push(r.pop().unwrap());
        rows.push(r);
    }
    StandardFormLp::from_rows(objective, &rows, rhs)
}

fn parse_header(line: &str) -> Result<(usize, usize)> {
    let bad = || Error::Parse(format!("bad LP dump header: {line:?}"));
    let mut parts = line.split_whitespace();
    let rows = parts
        .next()
        .and_then(|p| p.strip_prefix("rows="))
        .and_then(|v| v.parse().ok())
        .ok_or_else(bad)?;
    let cols = parts
        .next()
        .and_then(|p| p.strip_prefix("cols="))
        .and_then(|v| v.parse().ok())
        .ok_or_else(bad)?;
    if parts.next().is_some() {
        return Err(bad());
    }
    Ok((rows, cols))
}
