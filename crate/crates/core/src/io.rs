//! Plain-text formats.
//!
//! * skeleton: `q m`, then `m` lines `i j` with `1 <= i <= j <= q`
//! * allocation: one line of `q` non-negative integers
//! * general graph: `n m`, then `m` lines `u v`, 0-based
//! * cycle cover: one line per cycle, 0-based vertices of `K_x` in order
//! * LP record: objective, then `y`, then `c` in skeleton edge order
//!
//! Blank lines are ignored everywhere.

use crate::cover::CycleCover;
use crate::error::{Error, Result};
use crate::exact::GeneralGraph;
use crate::lp::LpSolution;
use crate::skeleton::{EdgeCoefficients, NodeAllocation, SkeletonGraph};

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty())
}

fn numbers(line: usize, text: &str) -> Result<Vec<u64>> {
    text.split_whitespace()
        .map(|t| {
            t.parse::<u64>().map_err(|_| Error::Parse {
                line,
                msg: format!("`{t}` is not a non-negative integer"),
            })
        })
        .collect()
}

fn pair(line: usize, text: &str) -> Result<(u64, u64)> {
    match numbers(line, text)?.as_slice() {
        &[a, b] => Ok((a, b)),
        other => Err(Error::Parse {
            line,
            msg: format!("expected two integers, found {}", other.len()),
        }),
    }
}

/// `(line, a, b)` for each body line.
type Pairs = Vec<(usize, u64, u64)>;

/// Header pair plus the `m` pairs following it.
fn header_and_pairs(text: &str) -> Result<((u64, u64), Pairs)> {
    let mut lines = content_lines(text);
    let (hl, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        msg: "missing header line".into(),
    })?;
    let header = pair(hl, header)?;
    let mut body = Vec::new();
    for (line, l) in lines {
        let (a, b) = pair(line, l)?;
        body.push((line, a, b));
    }
    if body.len() as u64 != header.1 {
        return Err(Error::Parse {
            line: hl,
            msg: format!(
                "header announces {} edges but {} follow",
                header.1,
                body.len()
            ),
        });
    }
    Ok((header, body))
}

pub fn parse_skeleton(text: &str) -> Result<SkeletonGraph> {
    let ((q, _), body) = header_and_pairs(text)?;
    let mut edges = Vec::with_capacity(body.len());
    for (line, i, j) in body {
        if i < 1 || j > q || i > j {
            return Err(Error::Parse {
                line,
                msg: format!("edge `{i} {j}` must satisfy 1 <= i <= j <= {q}"),
            });
        }
        edges.push((i as usize - 1, j as usize - 1));
    }
    SkeletonGraph::new(q as usize, edges)
}

pub fn write_skeleton(s: &SkeletonGraph) -> String {
    let mut out = format!("{} {}\n", s.node_count(), s.edge_count());
    for e in s.edges() {
        out.push_str(&format!("{} {}\n", e.a + 1, e.b + 1));
    }
    out
}

pub fn parse_allocation(text: &str) -> Result<NodeAllocation> {
    let mut lines = content_lines(text);
    let (line, l) = lines.next().ok_or(Error::Parse {
        line: 1,
        msg: "missing allocation line".into(),
    })?;
    if let Some((extra, _)) = lines.next() {
        return Err(Error::Parse {
            line: extra,
            msg: "allocation must be a single line".into(),
        });
    }
    Ok(NodeAllocation::new(numbers(line, l)?))
}

pub fn write_allocation(x: &NodeAllocation) -> String {
    format!("{}\n", join(x.values()))
}

pub fn parse_general_graph(text: &str) -> Result<GeneralGraph> {
    let ((n, _), body) = header_and_pairs(text)?;
    for &(line, u, v) in &body {
        if u >= n || v >= n {
            return Err(Error::Parse {
                line,
                msg: format!("edge `{u} {v}` out of range for {n} vertices"),
            });
        }
    }
    GeneralGraph::new(
        n as usize,
        body.into_iter().map(|(_, u, v)| (u as usize, v as usize)),
    )
}

pub fn write_general_graph(g: &GeneralGraph) -> String {
    let mut out = format!("{} {}\n", g.vertex_count(), g.edge_count());
    for &(u, v) in g.edges() {
        out.push_str(&format!("{u} {v}\n"));
    }
    out
}

pub fn parse_cover(text: &str) -> Result<CycleCover> {
    let cycles = content_lines(text)
        .map(|(line, l)| Ok(numbers(line, l)?.into_iter().map(|v| v as usize).collect()))
        .collect::<Result<Vec<Vec<usize>>>>()?;
    Ok(CycleCover { cycles })
}

/// Reads an LP record. Lines are positional, so an empty `c` line (no
/// skeleton edges) may be present or omitted.
pub fn parse_lp_record(text: &str) -> Result<LpSolution> {
    let lines: Vec<&str> = text.lines().collect();
    if lines.len() < 2 {
        return Err(Error::Parse {
            line: lines.len() + 1,
            msg: "an LP record needs objective, y and c lines".into(),
        });
    }
    let objective = match numbers(1, lines[0])?.as_slice() {
        &[v] => v,
        _ => {
            return Err(Error::Parse {
                line: 1,
                msg: "objective line must hold one integer".into(),
            })
        }
    };
    let y = numbers(2, lines[1])?;
    let c = lines.get(2).map_or(Ok(Vec::new()), |l| numbers(3, l))?;
    if let Some(pos) = lines.iter().skip(3).position(|l| !l.trim().is_empty()) {
        return Err(Error::Parse {
            line: pos + 4,
            msg: "unexpected content after the c line".into(),
        });
    }
    Ok(LpSolution {
        y: NodeAllocation::new(y),
        c: EdgeCoefficients::on_skeleton(c),
        objective,
        rounds: 0,
    })
}

fn join(values: &[u64]) -> String {
    values
        .iter()
        .map(u64::to_string)
        .collect::<Vec<_>>()
        .join(" ")
}
