//! OEIS b-files: one `n a(n)` pair per line.

use std::fmt::Display;
use std::io::{self, Write};

#[derive(Debug, thiserror::Error)]
pub enum BFileError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: expected index {expected}, found {found}")]
    Gap { line: usize, expected: u64, found: u64 },
}

/// Writes `terms` indexed from `offset`.
pub fn write_bfile<W: Write, T: Display>(out: &mut W, offset: u64, terms: &[T]) -> io::Result<()> {
    for (i, t) in terms.iter().enumerate() {
        writeln!(out, "{} {}", offset + i as u64, t)?;
    }
    Ok(())
}

pub fn format_bfile<T: Display>(offset: u64, terms: &[T]) -> String {
    let mut buf = Vec::new();
    write_bfile(&mut buf, offset, terms).expect("writing to memory");
    String::from_utf8(buf).expect("ascii output")
}

/// Reads a b-file with consecutive indices; returns the first index and the
/// values. Blank lines and `#` comments are skipped.
pub fn parse_bfile(text: &str) -> Result<(u64, Vec<i64>), BFileError> {
    let mut first = None;
    let mut values = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let malformed = |message: &str| BFileError::Malformed { line: i + 1, message: message.to_string() };
        let mut parts = line.split_whitespace();
        let (Some(n), Some(v), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(malformed("expected `n a(n)`"));
        };
        let n: u64 = n.parse().map_err(|_| malformed("index is not a nonnegative integer"))?;
        let v: i64 = v.parse().map_err(|_| malformed("value is not a 64-bit integer"))?;
        let start = *first.get_or_insert(n);
        let expected = start + values.len() as u64;
        if n != expected {
            return Err(BFileError::Gap { line: i + 1, expected, found: n });
        }
        values.push(v);
    }
    Ok((first.unwrap_or(0), values))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let text = format_bfile(1, &[1, 2, 1, 4]);
        assert_eq!(text, "1 1\n2 2\n3 1\n4 4\n");
        assert_eq!(parse_bfile(&text).unwrap(), (1, vec![1, 2, 1, 4]));
        assert!(matches!(parse_bfile("0 1\n2 3\n"), Err(BFileError::Gap { line: 2, .. })));
        assert!(matches!(parse_bfile("# c\n0 x\n"), Err(BFileError::Malformed { line: 2, .. })));
    }
}
