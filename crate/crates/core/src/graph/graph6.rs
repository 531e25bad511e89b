//! graph6 text encoding, one graph per line.

use std::io::{BufRead, Write};
use std::path::Path;

use super::bitgraph::BitGraph;
use crate::error::{Error, Result};

const BIAS: u8 = 63;

/// Encodes `g` as a graph6 line (without the trailing newline).
pub fn encode(g: &BitGraph) -> String {
    let n = g.n();
    let mut out = Vec::with_capacity(2 + (n * n) / 12);
    if n <= 62 {
        out.push(n as u8 + BIAS);
    } else {
        out.push(126);
        out.push(((n >> 12) & 63) as u8 + BIAS);
        out.push(((n >> 6) & 63) as u8 + BIAS);
        out.push((n & 63) as u8 + BIAS);
    }
    let mut acc = 0u8;
    let mut nbits = 0;
    for j in 1..n {
        for i in 0..j {
            acc = (acc << 1) | g.has_edge(i, j) as u8;
            nbits += 1;
            if nbits == 6 {
                out.push(acc + BIAS);
                acc = 0;
                nbits = 0;
            }
        }
    }
    if nbits > 0 {
        out.push((acc << (6 - nbits)) + BIAS);
    }
    // Every byte is in 63..=126, so this is ASCII.
    String::from_utf8(out).expect("graph6 bytes are ASCII")
}

fn parse_err(offset: usize, msg: impl Into<String>) -> Error {
    Error::Parse { offset, msg: msg.into() }
}

/// Decodes one graph6 line. Surrounding whitespace is ignored.
pub fn decode(line: &str) -> Result<BitGraph> {
    let bytes = line.trim_end_matches(['\n', '\r']).as_bytes();
    if bytes.is_empty() {
        return Err(parse_err(0, "empty line"));
    }
    for (i, &b) in bytes.iter().enumerate() {
        if !(BIAS..=126).contains(&b) {
            return Err(parse_err(i, format!("byte {b:#04x} outside the graph6 range")));
        }
    }
    let (n, mut pos) = if bytes[0] == 126 {
        if bytes.len() < 4 {
            return Err(parse_err(bytes.len(), "truncated vertex count"));
        }
        if bytes[1] == 126 {
            return Err(parse_err(1, "vertex counts beyond 258047 are not supported"));
        }
        let n = bytes[1..4].iter().fold(0usize, |acc, &b| (acc << 6) | (b - BIAS) as usize);
        (n, 4)
    } else {
        ((bytes[0] - BIAS) as usize, 1)
    };
    if n > super::bitgraph::MAX_VERTICES {
        return Err(parse_err(0, format!("{n} vertices exceeds the 64-vertex cap")));
    }
    let pairs = n * n.saturating_sub(1) / 2;
    let need = pairs.div_ceil(6);
    if bytes.len() - pos != need {
        return Err(parse_err(
            pos + (bytes.len() - pos).min(need),
            format!("expected {need} edge bytes for {n} vertices, found {}", bytes.len() - pos),
        ));
    }
    let mut g = BitGraph::empty(n);
    let mut bit = 0usize;
    'outer: for j in 1..n {
        for i in 0..j {
            let byte = bytes[pos] - BIAS;
            if (byte >> (5 - bit)) & 1 == 1 {
                g.add_edge(i, j);
            }
            bit += 1;
            if bit == 6 {
                bit = 0;
                pos += 1;
                if pos == bytes.len() {
                    break 'outer;
                }
            }
        }
    }
    if bit != 0 {
        let last = bytes[pos] - BIAS;
        if last & ((1u8 << (6 - bit)) - 1) != 0 {
            return Err(parse_err(pos, "nonzero padding bits"));
        }
    }
    Ok(g)
}

/// Reads a graph6 file, skipping blank lines and an optional `>>graph6<<` header.
pub fn read_file(path: &Path) -> Result<Vec<BitGraph>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (lineno, line) in std::io::BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let line = line.strip_prefix(">>graph6<<").unwrap_or(&line).trim();
        if line.is_empty() {
            continue;
        }
        out.push(decode(line).map_err(|e| match e {
            Error::Parse { offset, msg } => {
                Error::Parse { offset, msg: format!("{}:{}: {msg}", path.display(), lineno + 1) }
            }
            other => other,
        })?);
    }
    Ok(out)
}

/// Writes graphs as LF-terminated graph6 lines.
pub fn write_file<'a, I>(path: &Path, graphs: I) -> Result<()>
where
    I: IntoIterator<Item = &'a BitGraph>,
{
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = std::io::BufWriter::new(file);
    for g in graphs {
        writeln!(w, "{}", encode(g)).map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn base_cases() {
        assert_eq!(encode(&BitGraph::empty(0)), "?");
        assert_eq!(decode("?").unwrap(), BitGraph::empty(0));
        assert_eq!(encode(&BitGraph::complete(2)), "A_");
        assert_eq!(decode("A_").unwrap(), BitGraph::complete(2));
        assert_eq!(encode(&BitGraph::empty(2)), "A?");
    }

    #[test]
    fn known_lines() {
        // Reference strings produced by nauty's geng/showg conventions.
        assert_eq!(encode(&BitGraph::complete(3)), "Bw");
        assert_eq!(encode(&BitGraph::cycle(5)), "Dhc");
        assert_eq!(encode(&BitGraph::complete(4)), "C~");
    }

    #[test]
    fn long_form_counts() {
        let g = BitGraph::cycle(64);
        let s = encode(&g);
        assert!(s.starts_with('~'));
        assert_eq!(decode(&s).unwrap(), g);
    }

    #[test]
    fn malformed_lines_report_offsets() {
        match decode("A") {
            Err(Error::Parse { offset, .. }) => assert_eq!(offset, 1),
            other => panic!("{other:?}"),
        }
        match decode("B w") {
            Err(Error::Parse { offset, .. }) => assert_eq!(offset, 1),
            other => panic!("{other:?}"),
        }
        // K2 with a stray padding bit.
        assert!(matches!(decode("A`"), Err(Error::Parse { offset: 1, .. })));
        assert!(decode("").is_err());
        assert!(decode("Bww").is_err());
    }
}
