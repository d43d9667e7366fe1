//! Plain-text edge-list format.
//!
//! ```text
//! <n> <m>
//! <u> <v>      (m lines, u < v, lexicographically sorted)
//! ```
//!
//! ASCII decimal, single spaces, LF line endings and a trailing newline.
//! [`serialize`] always produces exactly this form; [`parse`] additionally
//! accepts pairs written as `v u` or out of order, but never duplicates.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::graph::{normalize, Graph, GraphError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}: malformed header, expected `<n> <m>`")]
    MalformedHeader { line: usize },
    #[error("line {line}: malformed edge, expected `<u> <v>`")]
    MalformedEdge { line: usize },
    #[error("header announces {expected} edges but the body has {found}")]
    CountMismatch { expected: usize, found: usize },
    #[error("line {line}: duplicate edge {{{u}, {v}}}")]
    DuplicateEdge { line: usize, u: usize, v: usize },
    #[error("line {line}: {source}")]
    Graph {
        line: usize,
        #[source]
        source: GraphError,
    },
}

fn two_numbers(line: &str) -> Option<(usize, usize)> {
    let mut it = line.split(' ');
    let a = it.next()?.parse().ok()?;
    let b = it.next()?.parse().ok()?;
    it.next().is_none().then_some((a, b))
}

pub fn parse(doc: &str) -> Result<Graph, ParseError> {
    let mut lines = doc.lines().enumerate().map(|(i, l)| (i + 1, l.trim_end_matches('\r')));
    let (n, m) = match lines.next() {
        Some((_, l)) => two_numbers(l).ok_or(ParseError::MalformedHeader { line: 1 })?,
        None => return Err(ParseError::MalformedHeader { line: 1 }),
    };
    let mut seen = BTreeSet::new();
    let mut found = 0;
    let mut blank = false;
    for (line, text) in lines {
        // Only trailing blank lines are tolerated.
        if text.is_empty() {
            blank = true;
            continue;
        }
        if blank {
            return Err(ParseError::MalformedEdge { line });
        }
        let (u, v) = two_numbers(text).ok_or(ParseError::MalformedEdge { line })?;
        for w in [u, v] {
            if w >= n {
                return Err(ParseError::Graph { line, source: GraphError::VertexOutOfRange { vertex: w, n } });
            }
        }
        if u == v {
            return Err(ParseError::Graph { line, source: GraphError::SelfLoop(u) });
        }
        let e = normalize(u, v);
        if !seen.insert(e) {
            return Err(ParseError::DuplicateEdge { line, u: e.0, v: e.1 });
        }
        found += 1;
    }
    if found != m {
        return Err(ParseError::CountMismatch { expected: m, found });
    }
    Ok(Graph::from_sorted_unchecked(n, seen.into_iter().collect()))
}

pub fn serialize(g: &Graph) -> String {
    use std::fmt::Write;
    let mut out = String::with_capacity(8 + 12 * g.size());
    let _ = writeln!(out, "{} {}", g.order(), g.size());
    for &(u, v) in g.edges() {
        let _ = writeln!(out, "{u} {v}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parse_path() {
        let g = parse("3 2\n0 1\n1 2\n").unwrap();
        assert_eq!(g, Graph::new(3, [(0, 1), (1, 2)]).unwrap());
    }

    #[test]
    fn parse_errors() {
        assert_eq!(parse("3 2\n0 1\n"), Err(ParseError::CountMismatch { expected: 2, found: 1 }));
        assert_eq!(parse("3\n"), Err(ParseError::MalformedHeader { line: 1 }));
        assert_eq!(parse(""), Err(ParseError::MalformedHeader { line: 1 }));
        assert_eq!(parse("3 1\n0  1\n"), Err(ParseError::MalformedEdge { line: 2 }));
        assert_eq!(
            parse("3 2\n0 1\n1 0\n"),
            Err(ParseError::DuplicateEdge { line: 3, u: 0, v: 1 })
        );
        assert!(matches!(parse("3 1\n0 3\n"), Err(ParseError::Graph { line: 2, .. })));
        assert!(matches!(parse("3 1\n2 2\n"), Err(ParseError::Graph { line: 2, .. })));
        assert_eq!(parse("3 2\n0 1\n\n1 2\n"), Err(ParseError::MalformedEdge { line: 4 }));
        assert!(parse("3 1\n0 1\n\n").is_ok());
    }

    #[test]
    fn serialize_is_canonical() {
        let g = Graph::new(4, [(3, 1), (0, 2), (1, 0)]).unwrap();
        assert_eq!(serialize(&g), "4 3\n0 1\n0 2\n1 3\n");
        assert_eq!(serialize(&Graph::empty(0)), "0 0\n");
    }

    proptest! {
        #[test]
        fn round_trips(n in 1usize..12, raw in proptest::collection::vec((0usize..12, 0usize..12), 0..40)) {
            let pairs: Vec<_> = raw.into_iter().map(|(u, v)| (u % n, v % n)).filter(|(u, v)| u != v).collect();
            let g = Graph::new(n, pairs).unwrap();
            let doc = serialize(&g);
            let back = parse(&doc).unwrap();
            prop_assert_eq!(&back, &g);
            prop_assert_eq!(serialize(&back), doc);
        }
    }
}
