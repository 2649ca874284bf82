//! Text formats for point sets, nodes and weights.
//!
//! Point export: one block per p-set, each a header line
//! `# kind=<S|T> p=<p> d=<d> denom=<q>` followed by one line of `d`
//! space-separated numerators per point. Node files use the same layout
//! (only `denom=` is required in the header), or plain lines of
//! floating-point coordinates when no header is present.

use std::io::Write;

use crate::error::{Error, Result};
use crate::integrator::Node;
use crate::korobov::{KorobovSet, RationalPoint, SetKind, UnionPointSet};

pub fn write_set<W: Write>(w: &mut W, set: &KorobovSet) -> std::io::Result<()> {
    writeln!(
        w,
        "# kind={} p={} d={} denom={}",
        set.kind(),
        set.p(),
        set.dim(),
        set.denominator()
    )?;
    let mut row = vec![0u64; set.dim()];
    let mut line = String::new();
    for i in 0..set.len() {
        set.numerators_into(i, &mut row);
        line.clear();
        for (j, a) in row.iter().enumerate() {
            if j > 0 {
                line.push(' ');
            }
            line.push_str(&a.to_string());
        }
        writeln!(w, "{line}")?;
    }
    Ok(())
}

pub fn write_union<W: Write>(w: &mut W, uset: &UnionPointSet) -> std::io::Result<()> {
    for set in uset.sets() {
        write_set(w, set)?;
    }
    Ok(())
}

/// One header-delimited block of a point file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointBlock {
    pub kind: Option<SetKind>,
    pub p: Option<u64>,
    pub denominator: u64,
    pub points: Vec<RationalPoint>,
}

fn parse_err(line: usize, msg: impl std::fmt::Display) -> Error {
    Error::Parse(format!("line {line}: {msg}"))
}

fn parse_header(line_no: usize, line: &str) -> Result<PointBlock> {
    let mut block = PointBlock {
        kind: None,
        p: None,
        denominator: 0,
        points: Vec::new(),
    };
    for field in line.trim_start_matches('#').split_whitespace() {
        let (key, value) = field
            .split_once('=')
            .ok_or_else(|| parse_err(line_no, format!("malformed header field {field:?}")))?;
        let num = || value.parse::<u64>().map_err(|e| parse_err(line_no, e));
        match key {
            "kind" => {
                block.kind = Some(match value {
                    "S" => SetKind::S,
                    "T" => SetKind::T,
                    other => return Err(parse_err(line_no, format!("unknown kind {other:?}"))),
                })
            }
            "p" => block.p = Some(num()?),
            "denom" => block.denominator = num()?,
            "d" => {}
            other => return Err(parse_err(line_no, format!("unknown header key {other:?}"))),
        }
    }
    if block.denominator == 0 {
        return Err(parse_err(line_no, "header lacks a positive denom"));
    }
    Ok(block)
}

/// Parses a point file into its blocks.
pub fn read_points(text: &str) -> Result<Vec<PointBlock>> {
    let mut blocks: Vec<PointBlock> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('#') {
            blocks.push(parse_header(i + 1, line)?);
            continue;
        }
        let block = blocks
            .last_mut()
            .ok_or_else(|| parse_err(i + 1, "points before any header"))?;
        let nums = line
            .split_whitespace()
            .map(|t| t.parse::<u64>().map_err(|e| parse_err(i + 1, e)))
            .collect::<Result<Vec<_>>>()?;
        let x = RationalPoint::new(nums, block.denominator).map_err(|e| parse_err(i + 1, e))?;
        block.points.push(x);
    }
    Ok(blocks)
}

/// Reads nodes from a point file or from plain float rows.
pub fn read_nodes(text: &str) -> Result<Vec<Node>> {
    let has_header = text.lines().any(|l| l.trim_start().starts_with('#'));
    let nodes: Vec<Node> = if has_header {
        read_points(text)?
            .into_iter()
            .flat_map(|b| b.points.into_iter().map(Node::Rational))
            .collect()
    } else {
        text.lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty())
            .map(|(i, l)| {
                let x = l
                    .split(|c: char| c.is_whitespace() || c == ',')
                    .filter(|t| !t.is_empty())
                    .map(|t| t.parse::<f64>().map_err(|e| parse_err(i + 1, e)))
                    .collect::<Result<Vec<_>>>()?;
                if x.iter().any(|v| !(0.0..1.0).contains(v)) {
                    return Err(parse_err(i + 1, "coordinates must lie in [0,1)"));
                }
                Ok(Node::Real(x))
            })
            .collect::<Result<_>>()?
    };
    if nodes.is_empty() {
        return Err(Error::Parse("no nodes found".into()));
    }
    Ok(nodes)
}

/// One weight per non-empty line.
pub fn read_weights(text: &str) -> Result<Vec<f64>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| l.trim().parse::<f64>().map_err(|e| parse_err(i + 1, e)))
        .collect()
}
