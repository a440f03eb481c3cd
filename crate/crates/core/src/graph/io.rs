//! Text graph format.
//!
//! ```text
//! {"format":"hopcut-graph","version":1,"n":4,"m":3,...}
//! # nodes id,label0,label1
//! 0,1,0
//! # edges tail,head,weight_numerator
//! 0,2,18446744073709551616
//! ```
//!
//! Weight numerators are decimal integers over `2^scale_sigma`.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::{Edge, GraphMode, LayeredGraph, NodeId, NodeLabel};
use crate::error::{Error, Result};
use crate::scaled::ScaledRational;

pub const GRAPH_FORMAT: &str = "hopcut-graph";
pub const GRAPH_FORMAT_VERSION: u32 = 1;

const NODES_MARK: &str = "# nodes id,label0,label1";
const EDGES_MARK: &str = "# edges tail,head,weight_numerator";

#[derive(Debug, Serialize, Deserialize)]
struct Header {
    format: String,
    version: u32,
    n: usize,
    m: usize,
    layers: usize,
    mode: GraphMode,
    scale_sigma: u32,
    seed: u64,
    layer_sizes: Vec<u32>,
}

pub fn write_graph<W: Write>(g: &LayeredGraph, mut out: W) -> Result<()> {
    let header = Header {
        format: GRAPH_FORMAT.into(),
        version: GRAPH_FORMAT_VERSION,
        n: g.node_count(),
        m: g.edge_count(),
        layers: g.layer_count(),
        mode: g.mode(),
        scale_sigma: g.scale_sigma(),
        seed: g.seed(),
        layer_sizes: g.layer_sizes(),
    };
    serde_json::to_writer(&mut out, &header)?;
    writeln!(out)?;
    writeln!(out, "{NODES_MARK}")?;
    for (id, l) in g.labels().iter().enumerate() {
        writeln!(out, "{id},{},{}", l.0[0], l.0[1])?;
    }
    writeln!(out, "{EDGES_MARK}")?;
    for e in g.edges() {
        writeln!(out, "{},{},{}", e.tail, e.head, e.weight.num)?;
    }
    out.flush()?;
    Ok(())
}

pub fn graph_to_bytes(g: &LayeredGraph) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    write_graph(g, &mut buf)?;
    Ok(buf)
}

fn fields<const N: usize>(line: &str, lineno: usize) -> Result<[&str; N]> {
    let parts: Vec<&str> = line.split(',').collect();
    parts
        .try_into()
        .map_err(|_| Error::Format(format!("line {lineno}: expected {N} comma-separated fields")))
}

fn num<T: std::str::FromStr>(s: &str, lineno: usize) -> Result<T> {
    s.parse()
        .map_err(|_| Error::Format(format!("line {lineno}: bad number {s:?}")))
}

pub fn read_graph<R: BufRead>(input: R) -> Result<LayeredGraph> {
    let mut lines = input.lines().enumerate();
    let mut next = |what: &str| -> Result<(usize, String)> {
        match lines.next() {
            Some((i, l)) => Ok((i + 1, l?)),
            None => Err(Error::Format(format!("unexpected end of file, expected {what}"))),
        }
    };
    let (_, head) = next("header")?;
    let header: Header =
        serde_json::from_str(&head).map_err(|e| Error::Format(format!("graph header: {e}")))?;
    if header.format != GRAPH_FORMAT || header.version != GRAPH_FORMAT_VERSION {
        return Err(Error::Format(format!(
            "unsupported graph format {} v{}",
            header.format, header.version
        )));
    }
    if header.layer_sizes.len() != header.layers
        || header.layer_sizes.iter().map(|&s| s as usize).sum::<usize>() != header.n
    {
        return Err(Error::Format("layer sizes disagree with header counts".into()));
    }
    let (i, mark) = next("node section")?;
    if mark != NODES_MARK {
        return Err(Error::Format(format!("line {i}: expected node section marker")));
    }
    let mut labels = Vec::with_capacity(header.n);
    for id in 0..header.n {
        let (i, line) = next("node line")?;
        let [a, b, c] = fields::<3>(&line, i)?;
        if num::<usize>(a, i)? != id {
            return Err(Error::Format(format!("line {i}: node ids must be consecutive")));
        }
        labels.push(NodeLabel([num(b, i)?, num(c, i)?]));
    }
    let (i, mark) = next("edge section")?;
    if mark != EDGES_MARK {
        return Err(Error::Format(format!("line {i}: expected edge section marker")));
    }
    let mut edges = Vec::with_capacity(header.m);
    for _ in 0..header.m {
        let (i, line) = next("edge line")?;
        let [a, b, c] = fields::<3>(&line, i)?;
        edges.push(Edge::new(
            NodeId(num(a, i)?),
            NodeId(num(b, i)?),
            ScaledRational::new(num(c, i)?, header.scale_sigma),
        ));
    }
    if let Ok((i, extra)) = next("eof") {
        if !extra.is_empty() {
            return Err(Error::Format(format!("line {i}: trailing data")));
        }
    }
    LayeredGraph::from_parts(header.mode, header.scale_sigma, header.seed, &header.layer_sizes, labels, edges)
        .map_err(|e| Error::Format(format!("graph rejected: {e}")))
}
