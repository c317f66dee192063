//! Line-oriented text format for Tanner codes.
//!
//! ```text
//! # comments and blank lines are ignored
//! N J
//! 0 : v_1 v_2 ... v_n0      one line per local-code node, 0-based variables,
//! 1 : ...                   listed in edge-label order
//! code 0                    one block per local-code node
//! parity                    either the directive `parity` ...
//! code 1
//! 000                       ... or every codeword as a bitstring whose
//! 110                       k-th character is the bit on edge label k
//! 011
//! 101
//! ```
//!
//! Node lines may appear in any order but every `j` in `0..J` must be given
//! exactly once, likewise the `code j` blocks.

use std::fmt::Write as _;

use crate::code::{LocalCode, TannerCode, TannerGraph};
use crate::error::{Error, Result};

pub fn parse_code(text: &str) -> Result<TannerCode> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(no, line)| (no + 1, line.split('#').next().unwrap_or("").trim()))
        .filter(|(_, line)| !line.is_empty());

    let (no, header) = lines
        .next()
        .ok_or_else(|| Error::parse("empty code file"))?;
    let mut fields = header.split_whitespace();
    let num_vars = parse_usize(fields.next(), no, "N")?;
    let num_checks = parse_usize(fields.next(), no, "J")?;
    if fields.next().is_some() {
        return Err(Error::parse(format!("line {no}: header must be `N J`")));
    }

    let mut neighbors: Vec<Option<Vec<usize>>> = vec![None; num_checks];
    let mut blocks: Vec<Option<Vec<String>>> = vec![None; num_checks];
    let mut current: Option<usize> = None;

    for (no, line) in lines {
        if let Some(rest) = line.strip_prefix("code") {
            let j = parse_usize(Some(rest.trim()), no, "local-code index")?;
            let slot = blocks
                .get_mut(j)
                .ok_or_else(|| Error::parse(format!("line {no}: local-code index {j} >= J")))?;
            if slot.is_some() {
                return Err(Error::parse(format!(
                    "line {no}: duplicate block for code {j}"
                )));
            }
            *slot = Some(Vec::new());
            current = Some(j);
        } else if let Some((head, tail)) = line.split_once(':') {
            if current.is_some() {
                return Err(Error::parse(format!(
                    "line {no}: neighbor lines must precede code blocks"
                )));
            }
            let j = parse_usize(Some(head.trim()), no, "local-code index")?;
            let vars = tail
                .split_whitespace()
                .map(|t| parse_usize(Some(t), no, "variable index"))
                .collect::<Result<Vec<_>>>()?;
            let slot = neighbors
                .get_mut(j)
                .ok_or_else(|| Error::parse(format!("line {no}: local-code index {j} >= J")))?;
            if slot.is_some() {
                return Err(Error::parse(format!(
                    "line {no}: duplicate neighbor line for {j}"
                )));
            }
            *slot = Some(vars);
        } else if let Some(j) = current {
            blocks[j]
                .as_mut()
                .expect("block opened")
                .push(line.to_string());
        } else {
            return Err(Error::parse(format!("line {no}: unexpected {line:?}")));
        }
    }

    let checks = neighbors
        .into_iter()
        .enumerate()
        .map(|(j, n)| n.ok_or_else(|| Error::parse(format!("missing neighbor line for {j}"))))
        .collect::<Result<Vec<_>>>()?;
    let graph = TannerGraph::new(num_vars, checks).map_err(|e| Error::parse(e.to_string()))?;

    let local_codes = blocks
        .into_iter()
        .enumerate()
        .map(|(j, block)| {
            let block = block.ok_or_else(|| Error::parse(format!("missing code block for {j}")))?;
            let degree = graph.check_degree(j);
            let code = match block.as_slice() {
                [directive] if directive == "parity" => LocalCode::parity(degree),
                [] => Err(Error::parse(format!("code block {j} is empty"))),
                words => LocalCode::from_bitstrings(words),
            }
            .map_err(|e| Error::parse(format!("code block {j}: {e}")))?;
            if code.len() != degree {
                return Err(Error::parse(format!(
                    "code block {j}: codeword length {} but node has {degree} neighbors",
                    code.len()
                )));
            }
            Ok(code)
        })
        .collect::<Result<Vec<_>>>()?;

    TannerCode::new(graph, local_codes).map_err(|e| Error::parse(e.to_string()))
}

fn parse_usize(field: Option<&str>, line: usize, what: &str) -> Result<usize> {
    let field = field.ok_or_else(|| Error::parse(format!("line {line}: missing {what}")))?;
    field
        .parse()
        .map_err(|_| Error::parse(format!("line {line}: invalid {what} {field:?}")))
}

/// Serializes a code; output is canonical so equal codes give equal bytes.
pub fn write_code(code: &TannerCode) -> String {
    let graph = code.graph();
    let mut out = String::new();
    let _ = writeln!(out, "{} {}", graph.num_vars(), graph.num_checks());
    for c in 0..graph.num_checks() {
        let vars: Vec<String> = graph
            .check_neighbors(c)
            .iter()
            .map(|v| v.to_string())
            .collect();
        let _ = writeln!(out, "{c} : {}", vars.join(" "));
    }
    for (c, local) in code.local_codes().iter().enumerate() {
        let _ = writeln!(out, "code {c}");
        if local.is_parity() {
            out.push_str("parity\n");
        } else {
            for &w in local.words() {
                let _ = writeln!(out, "{}", local.word_bitstring(w));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::fixtures::six_cycle;

    const SIX_CYCLE: &str = "\
# three variables, three degree-2 parity checks
3 3
0 : 0 1
1 : 1 2
2 : 2 0
code 0
parity
code 1
00
11
code 2
parity
";

    #[test]
    fn parses_six_cycle() {
        let code = parse_code(SIX_CYCLE).unwrap();
        assert_eq!(code, six_cycle());
        assert_eq!(write_code(&code), write_code(&six_cycle()));
        assert_eq!(parse_code(&write_code(&code)).unwrap(), code);
    }

    #[test]
    fn explicit_codewords_round_trip() {
        let text = "4 1\n0 : 0 1 2 3\ncode 0\n0000\n1111\n";
        let code = parse_code(text).unwrap();
        assert_eq!(code.d_star(), 4);
        assert_eq!(write_code(&code), text);
    }

    #[test]
    fn rejects_malformed_files() {
        let dup_neighbor = "3 1\n0 : 0 0 1\ncode 0\nparity\n";
        assert!(parse_code(dup_neighbor).is_err());
        let bad_len = "3 1\n0 : 0 1 2\ncode 0\n00\n11\n";
        assert!(parse_code(bad_len).is_err());
        let missing_block = "2 1\n0 : 0 1\n";
        assert!(parse_code(missing_block).is_err());
        let bad_header = "2\n0 : 0 1\ncode 0\nparity\n";
        assert!(parse_code(bad_header).is_err());
        let isolated = "3 1\n0 : 0 1\ncode 0\nparity\n";
        assert!(parse_code(isolated).is_err());
        let out_of_range = "2 1\n0 : 0 5\ncode 0\nparity\n";
        assert!(parse_code(out_of_range).is_err());
        assert!(parse_code("").is_err());
    }
}
