//! Plain-text codeword files.
//!
//! The first line is a header of `key=value` tokens after the tag
//! `rackmsr-codeword`. Array codes then list one row per line, one symbol per
//! node; the RS code lists one node per line since its symbols are long.
//! Symbols use the decimal integer encoding and `*` marks an erased node. A
//! node with any `*` entry is treated as erased as a whole.
//!
//! Data files use the same body layout without a header and with `k` nodes.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::codes::Family;
use crate::ffield::{FieldElement, FieldError};
use crate::specfile::AnyCode;

pub const TAG: &str = "rackmsr-codeword";

#[derive(Debug, Error)]
pub enum TextError {
    #[error("bad header: {0}")]
    Header(String),
    #[error("header {key}={found} does not match the code ({expected})")]
    Mismatch {
        key: String,
        found: String,
        expected: String,
    },
    #[error("bad shape: {0}")]
    Shape(String),
    #[error("line {line}: {source}")]
    Symbol { line: usize, source: FieldError },
}

/// Received word: `None` marks an erased node.
pub type Received = Vec<Option<Vec<FieldElement>>>;

fn node_per_line(code: &AnyCode) -> bool {
    code.as_dyn().family() == Family::Rs
}

fn header_fields(code: &AnyCode) -> Vec<(String, String)> {
    let c = code.as_dyn();
    let mut h = vec![
        ("family".to_string(), c.family().to_string()),
        ("n".to_string(), c.length().to_string()),
        ("l".to_string(), c.rows().to_string()),
        ("k".to_string(), c.dimension().to_string()),
    ];
    if let AnyCode::Rs(rs) = code {
        let p = rs.params();
        let primes: Vec<String> = rs.primes().iter().map(|p| p.to_string()).collect();
        h.extend([
            ("q".to_string(), p.q.to_string()),
            ("u".to_string(), p.rack.rack_size.to_string()),
            ("racks".to_string(), p.rack.racks.to_string()),
            ("helpers".to_string(), p.rack.helpers.to_string()),
            ("primes".to_string(), primes.join(",")),
            ("seed".to_string(), p.seed.to_string()),
        ]);
    }
    h.push(("field".to_string(), c.field().header()));
    h
}

fn write_body(out: &mut String, cols: &[Option<Vec<FieldElement>>], l: usize, by_node: bool) {
    let sym = |j: usize, i: usize| match &cols[j] {
        Some(c) => c[i].to_string(),
        None => "*".to_string(),
    };
    if by_node {
        for j in 0..cols.len() {
            let line: Vec<String> = (0..l).map(|i| sym(j, i)).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
    } else {
        for i in 0..l {
            let line: Vec<String> = (0..cols.len()).map(|j| sym(j, i)).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
    }
}

/// Renders a (possibly partially erased) codeword.
pub fn write_codeword(code: &AnyCode, cols: &[Option<Vec<FieldElement>>]) -> String {
    let header: Vec<String> = header_fields(code)
        .into_iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect();
    let mut out = format!("{TAG} {}\n", header.join(" "));
    write_body(&mut out, cols, code.as_dyn().rows(), node_per_line(code));
    out
}

fn read_body(
    code: &AnyCode,
    lines: &[(usize, &str)],
    nodes: usize,
) -> Result<Received, TextError> {
    let c = code.as_dyn();
    let l = c.rows();
    let by_node = node_per_line(code);
    let (outer, inner) = if by_node { (nodes, l) } else { (l, nodes) };
    if lines.len() != outer {
        return Err(TextError::Shape(format!("expected {outer} lines, found {}", lines.len())));
    }
    let mut erased = vec![false; nodes];
    let mut grid = vec![vec![c.field().zero(); l]; nodes];
    for (a, (lineno, line)) in lines.iter().enumerate() {
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != inner {
            return Err(TextError::Shape(format!(
                "line {lineno}: expected {inner} symbols, found {}",
                tokens.len()
            )));
        }
        for (b, tok) in tokens.iter().enumerate() {
            let (j, i) = if by_node { (a, b) } else { (b, a) };
            if *tok == "*" {
                erased[j] = true;
                continue;
            }
            grid[j][i] = c
                .field()
                .parse(tok)
                .map_err(|source| TextError::Symbol { line: *lineno, source })?;
        }
    }
    Ok(grid
        .into_iter()
        .zip(erased)
        .map(|(col, e)| if e { None } else { Some(col) })
        .collect())
}

/// Parses a codeword file written for `code`, checking the header.
pub fn read_codeword(code: &AnyCode, text: &str) -> Result<Received, TextError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, s)| (i + 1, s.trim()))
        .filter(|(_, s)| !s.is_empty());
    let (_, header) = lines.next().ok_or_else(|| TextError::Header("empty file".into()))?;
    let mut tokens = header.split_whitespace();
    if tokens.next() != Some(TAG) {
        return Err(TextError::Header(format!("missing {TAG} tag")));
    }
    let found: BTreeMap<&str, &str> = tokens
        .map(|t| t.split_once('=').ok_or_else(|| TextError::Header(format!("token {t:?} is not key=value"))))
        .collect::<Result<_, _>>()?;
    for (key, expected) in header_fields(code) {
        match found.get(key.as_str()) {
            Some(v) if *v == expected => {}
            Some(v) => {
                return Err(TextError::Mismatch {
                    key,
                    found: v.to_string(),
                    expected,
                })
            }
            None => return Err(TextError::Header(format!("missing {key}"))),
        }
    }
    let body: Vec<(usize, &str)> = lines.collect();
    read_body(code, &body, code.as_dyn().length())
}

/// Renders `k` data nodes in the body layout of `code`.
pub fn write_data(code: &AnyCode, data: &[Vec<FieldElement>]) -> String {
    let cols: Received = data.iter().cloned().map(Some).collect();
    let mut out = String::new();
    write_body(&mut out, &cols, code.as_dyn().rows(), node_per_line(code));
    out
}

/// Parses `k` data nodes; erasures are not allowed.
pub fn read_data(code: &AnyCode, text: &str) -> Result<Vec<Vec<FieldElement>>, TextError> {
    let body: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, s)| (i + 1, s.trim()))
        .filter(|(_, s)| !s.is_empty())
        .collect();
    read_body(code, &body, code.as_dyn().dimension())?
        .into_iter()
        .enumerate()
        .map(|(j, c)| c.ok_or_else(|| TextError::Shape(format!("data node {j} is erased"))))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::{random_codeword, random_data};
    use crate::specfile::CodeParams;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn build(family: Family, racks: usize, rack_size: usize, k: usize, helpers: usize, q: Option<u64>) -> AnyCode {
        CodeParams {
            family,
            racks,
            rack_size,
            k,
            helpers,
            field: None,
            q,
            seed: 1,
            max_l: None,
        }
        .build()
        .unwrap()
    }

    #[test]
    fn round_trip_with_erasures_all_families() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for code in [
            build(Family::C1, 4, 2, 5, 3, None),
            build(Family::C2, 4, 1, 2, 3, None),
            build(Family::C3, 3, 2, 3, 2, None),
            build(Family::Rs, 2, 2, 2, 1, Some(3)),
        ] {
            let c = code.as_dyn();
            let cw = random_codeword(c, &mut rng).unwrap();
            let text = write_codeword(&code, &cw.to_received());
            let back = read_codeword(&code, &text).unwrap();
            assert_eq!(back, cw.to_received());
            let decoded = c.erasure_decode(&back).unwrap();
            assert!(c.parity_check(&decoded));
            let erased = cw.erase(&[1]);
            assert_eq!(read_codeword(&code, &write_codeword(&code, &erased)).unwrap(), erased);
            let data = random_data(c, &mut rng);
            assert_eq!(read_data(&code, &write_data(&code, &data)).unwrap(), data);
        }
    }

    #[test]
    fn rs_lists_one_symbol_per_line() {
        let code = build(Family::Rs, 2, 2, 2, 1, Some(3));
        let cw = random_codeword(code.as_dyn(), &mut ChaCha8Rng::seed_from_u64(2)).unwrap();
        let text = write_codeword(&code, &cw.to_received());
        assert_eq!(text.lines().count(), 5);
        assert!(text.lines().next().unwrap().contains("primes=3,5"));
    }

    #[test]
    fn header_and_shape_errors() {
        let code = build(Family::C2, 4, 1, 2, 3, None);
        let cw = random_codeword(code.as_dyn(), &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        let text = write_codeword(&code, &cw.to_received());
        assert!(matches!(read_codeword(&code, &text.replace("n=4", "n=5")), Err(TextError::Mismatch { .. })));
        assert!(matches!(read_codeword(&code, &text[TAG.len()..]), Err(TextError::Header(_))));
        let short: String = text.lines().take(3).collect::<Vec<_>>().join("\n");
        assert!(matches!(read_codeword(&code, &short), Err(TextError::Shape(_))));
        let bad = text.replacen("\n", "\n99 ", 1);
        assert!(read_codeword(&code, &bad).is_err());
    }

    #[test]
    fn partial_star_erases_the_node() {
        let code = build(Family::C2, 4, 1, 2, 3, None);
        let cw = random_codeword(code.as_dyn(), &mut ChaCha8Rng::seed_from_u64(4)).unwrap();
        let text = write_codeword(&code, &cw.to_received());
        let mut lines: Vec<String> = text.lines().map(String::from).collect();
        let mut toks: Vec<String> = lines[1].split(' ').map(String::from).collect();
        toks[2] = "*".into();
        lines[1] = toks.join(" ");
        let back = read_codeword(&code, &lines.join("\n")).unwrap();
        assert!(back[2].is_none());
        assert_eq!(back[0].as_deref(), Some(cw.column(0)));
    }
}
