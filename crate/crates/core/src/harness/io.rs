//! Text formats: `mg <n> <m>` followed by `e <u> <v>` lines for graphs, and
//! `or <m>` followed by `+`/`-` lines for orientations.

use crate::error::{Error, Result};
use crate::graph::{Dir, MultiGraph, Orientation, ResidueMap};

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

/// Non-empty lines with `#` comments stripped, numbered from 1.
fn content_lines(s: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    s.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("");
        let toks: Vec<&str> = l.split_whitespace().collect();
        (!toks.is_empty()).then_some((i + 1, toks))
    })
}

fn number(tok: &str, line: usize) -> Result<usize> {
    tok.parse().map_err(|_| parse_err(line, format!("expected a number, got {tok:?}")))
}

pub fn write_graph(g: &MultiGraph) -> String {
    let mut s = format!("mg {} {}\n", g.vertex_count(), g.edge_count());
    for e in g.edges() {
        s.push_str(&format!("e {} {}\n", e.u, e.v));
    }
    s
}

/// Edge ids are assigned in file order.
pub fn parse_graph(s: &str) -> Result<MultiGraph> {
    let mut lines = content_lines(s);
    let (ln, head) = lines.next().ok_or_else(|| parse_err(1, "empty input"))?;
    if head.len() != 3 || head[0] != "mg" {
        return Err(parse_err(ln, "expected header `mg <n> <m>`"));
    }
    let n = number(head[1], ln)?;
    let m = number(head[2], ln)?;
    let mut g = MultiGraph::new(n);
    for (ln, toks) in lines {
        if toks.len() != 3 || toks[0] != "e" {
            return Err(parse_err(ln, "expected `e <u> <v>`"));
        }
        let (u, v) = (number(toks[1], ln)?, number(toks[2], ln)?);
        g.add_edge(u, v).map_err(|e| parse_err(ln, e.to_string()))?;
    }
    if g.edge_count() != m {
        return Err(parse_err(ln, format!("header declares {m} edges, found {}", g.edge_count())));
    }
    Ok(g)
}

/// `+` when the edge runs from its first to its second endpoint.
pub fn write_orientation(g: &MultiGraph, o: &Orientation) -> Result<String> {
    o.require_total(g)?;
    let mut s = format!("or {}\n", g.edge_count());
    for e in g.edges() {
        s.push_str(if o.get(e.id) == Some(Dir::Forward) { "+\n" } else { "-\n" });
    }
    Ok(s)
}

pub fn parse_orientation(s: &str, g: &MultiGraph) -> Result<Orientation> {
    let mut lines = content_lines(s);
    let (ln, head) = lines.next().ok_or_else(|| parse_err(1, "empty input"))?;
    if head.len() != 2 || head[0] != "or" {
        return Err(parse_err(ln, "expected header `or <m>`"));
    }
    let m = number(head[1], ln)?;
    if m != g.edge_count() {
        return Err(parse_err(ln, format!("orientation has {m} edges, graph has {}", g.edge_count())));
    }
    let mut o = Orientation::new();
    let edges = g.edges();
    let mut count = 0;
    for (ln, toks) in lines {
        let d = match toks.as_slice() {
            ["+"] => Dir::Forward,
            ["-"] => Dir::Backward,
            _ => return Err(parse_err(ln, "expected `+` or `-`")),
        };
        let e = edges.get(count).ok_or_else(|| parse_err(ln, "more arcs than edges"))?;
        o.set(e.id, d);
        count += 1;
    }
    if count != m {
        return Err(parse_err(0, format!("expected {m} arcs, found {count}")));
    }
    Ok(o)
}

/// A comma-separated list of n residues, or a single value used everywhere.
pub fn parse_residues(spec: &str, modulus: usize, n: usize) -> Result<ResidueMap> {
    let vals: Vec<i64> = spec
        .split(',')
        .map(|t| t.trim().parse::<i64>().map_err(|_| parse_err(1, format!("bad residue {t:?}"))))
        .collect::<Result<_>>()?;
    match vals.len() {
        1 => ResidueMap::constant(modulus, n, vals[0]),
        l if l == n => ResidueMap::new(modulus, vals),
        l => Err(Error::domain(format!("{l} residues given for {n} vertices"))),
    }
}

pub fn write_residues(p: &ResidueMap) -> String {
    p.values().iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graph_round_trip() {
        let g = MultiGraph::from_edges(3, &[(0, 1), (0, 1), (2, 1)]).unwrap();
        let s = write_graph(&g);
        assert_eq!(s, "mg 3 3\ne 0 1\ne 0 1\ne 2 1\n");
        assert_eq!(parse_graph(&s).unwrap(), g);
    }

    #[test]
    fn orientation_round_trip() {
        let g = MultiGraph::from_edges(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        let s = "# triangle\nor 3\n+\n-\n+\n";
        let o = parse_orientation(s, &g).unwrap();
        assert_eq!(o.out_degrees(&g), vec![1, 0, 2]);
        assert_eq!(write_orientation(&g, &o).unwrap(), "or 3\n+\n-\n+\n");
    }

    #[test]
    fn parse_errors_carry_lines() {
        assert!(matches!(parse_graph("mg 2 1\ne 0 0\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_graph("mg 2 2\ne 0 1\n"), Err(Error::Parse { .. })));
        assert!(matches!(parse_graph("graph\n"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn residues() {
        assert_eq!(parse_residues("1", 3, 2).unwrap().values(), &[1, 1]);
        assert_eq!(parse_residues("4,-1", 3, 2).unwrap().values(), &[1, 2]);
        assert!(parse_residues("1,2,3", 3, 2).is_err());
    }
}
