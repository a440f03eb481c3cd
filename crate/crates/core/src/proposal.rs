//! Candidate hopsets and shortcut sets.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::paths::{bfs, shortest_paths};
use crate::graph::{Edge, LayeredGraph, NodeId};
use crate::scaled::ScaledRational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProposalKind {
    Hopset,
    Shortcut,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "ProposalJson", try_from = "ProposalJson")]
pub struct EdgeSetProposal {
    pub kind: ProposalKind,
    pub scale_sigma: u32,
    pub edges: Vec<Edge>,
    pub config: serde_json::Value,
}

#[derive(Serialize, Deserialize)]
struct ProposalJson {
    kind: ProposalKind,
    scale_sigma: u32,
    edges: Vec<(u32, u32, String)>,
    #[serde(default)]
    config: serde_json::Value,
}

impl From<EdgeSetProposal> for ProposalJson {
    fn from(p: EdgeSetProposal) -> Self {
        let sigma = p.scale_sigma;
        ProposalJson {
            kind: p.kind,
            scale_sigma: sigma,
            edges: p
                .edges
                .iter()
                .map(|e| {
                    let w = e.weight.rescale(sigma).unwrap_or(e.weight);
                    (e.tail.0, e.head.0, w.num.to_string())
                })
                .collect(),
            config: p.config,
        }
    }
}

impl TryFrom<ProposalJson> for EdgeSetProposal {
    type Error = String;
    fn try_from(j: ProposalJson) -> std::result::Result<Self, String> {
        let edges = j
            .edges
            .into_iter()
            .map(|(u, v, w)| {
                w.parse::<i128>()
                    .map(|num| Edge::new(NodeId(u), NodeId(v), ScaledRational::new(num, j.scale_sigma)))
                    .map_err(|_| format!("bad weight numerator {w:?}"))
            })
            .collect::<std::result::Result<_, _>>()?;
        Ok(EdgeSetProposal { kind: j.kind, scale_sigma: j.scale_sigma, edges, config: j.config })
    }
}

impl EdgeSetProposal {
    pub fn empty(kind: ProposalKind, scale_sigma: u32) -> Self {
        Self { kind, scale_sigma, edges: Vec::new(), config: serde_json::Value::Null }
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProposalViolation {
    pub index: usize,
    pub tail: NodeId,
    pub head: NodeId,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub pass: bool,
    pub checked: usize,
    pub violations: Vec<ProposalViolation>,
}

/// Hopset edges must carry exactly `dist_G(u, v)`; shortcut edges must lie in
/// the transitive closure. Self-loops and out-of-range ids are violations.
pub fn validate_proposal(g: &LayeredGraph, h: &EdgeSetProposal) -> Result<ValidationReport> {
    let n = g.node_count() as u32;
    let mut violations = Vec::new();
    let mut by_tail: BTreeMap<NodeId, Vec<usize>> = BTreeMap::new();
    for (i, e) in h.edges.iter().enumerate() {
        let reason = if e.tail.0 >= n || e.head.0 >= n {
            Some("node id out of range")
        } else if e.tail == e.head {
            Some("self-loop")
        } else if e.weight.is_negative() {
            Some("negative weight")
        } else {
            None
        };
        match reason {
            Some(r) => violations.push(ProposalViolation { index: i, tail: e.tail, head: e.head, reason: r.into() }),
            None => by_tail.entry(e.tail).or_default().push(i),
        }
    }
    let groups: Vec<(NodeId, Vec<usize>)> = by_tail.into_iter().collect();
    let found: Vec<Vec<ProposalViolation>> = groups
        .par_iter()
        .map(|(tail, idxs)| -> Result<Vec<ProposalViolation>> {
            let mut out = Vec::new();
            match h.kind {
                ProposalKind::Hopset => {
                    let sssp = shortest_paths(g, *tail)?;
                    for &i in idxs {
                        let e = &h.edges[i];
                        let reason = match sssp.weight(e.head) {
                            None => Some("head unreachable from tail".to_string()),
                            Some(d) if d != e.weight => Some(format!("weight {} differs from distance {}", e.weight, d)),
                            Some(_) => None,
                        };
                        if let Some(reason) = reason {
                            out.push(ProposalViolation { index: i, tail: e.tail, head: e.head, reason });
                        }
                    }
                }
                ProposalKind::Shortcut => {
                    let dist = bfs(g, *tail, None);
                    for &i in idxs {
                        let e = &h.edges[i];
                        if dist[e.head.index()] == u32::MAX {
                            out.push(ProposalViolation {
                                index: i,
                                tail: e.tail,
                                head: e.head,
                                reason: "not in the transitive closure".into(),
                            });
                        }
                    }
                }
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    violations.extend(found.into_iter().flatten());
    violations.sort_by_key(|v| v.index);
    Ok(ValidationReport { pass: violations.is_empty(), checked: h.edges.len(), violations })
}

/// Errors with [`Error::InvalidProposal`] unless the proposal validates.
pub fn ensure_valid(g: &LayeredGraph, h: &EdgeSetProposal) -> Result<()> {
    let report = validate_proposal(g, h)?;
    match report.violations.first() {
        None => Ok(()),
        Some(v) => Err(Error::InvalidProposal(format!(
            "{} of {} edges invalid; first: edge {} ({} -> {}): {}",
            report.violations.len(),
            report.checked,
            v.index,
            v.tail,
            v.head,
            v.reason
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{GraphMode, NodeLabel};

    fn path3() -> LayeredGraph {
        let labels = (0..3).map(|j| NodeLabel([j, 0])).collect();
        let w = ScaledRational::integer;
        let edges = vec![Edge::new(NodeId(0), NodeId(1), w(2)), Edge::new(NodeId(1), NodeId(2), w(3))];
        LayeredGraph::from_parts(GraphMode::Directed, 0, 0, &[1, 1, 1], labels, edges).unwrap()
    }

    fn hopset(edges: &[(u32, u32, i64)]) -> EdgeSetProposal {
        EdgeSetProposal {
            kind: ProposalKind::Hopset,
            scale_sigma: 0,
            edges: edges
                .iter()
                .map(|&(a, b, x)| Edge::new(NodeId(a), NodeId(b), ScaledRational::integer(x)))
                .collect(),
            config: serde_json::Value::Null,
        }
    }

    #[test]
    fn empty_passes() {
        assert!(validate_proposal(&path3(), &hopset(&[])).unwrap().pass);
    }

    #[test]
    fn wrong_weight_is_listed() {
        let r = validate_proposal(&path3(), &hopset(&[(0, 2, 5), (0, 2, 6), (2, 0, 5), (1, 1, 0)])).unwrap();
        assert!(!r.pass);
        let bad: Vec<usize> = r.violations.iter().map(|v| v.index).collect();
        assert_eq!(bad, vec![1, 2, 3]);
    }

    #[test]
    fn shortcut_needs_reachability() {
        let mut h = hopset(&[(0, 2, 1), (2, 0, 1)]);
        h.kind = ProposalKind::Shortcut;
        let r = validate_proposal(&path3(), &h).unwrap();
        assert_eq!(r.violations.len(), 1);
        assert_eq!(r.violations[0].index, 1);
        assert!(ensure_valid(&path3(), &h).is_err());
    }

    #[test]
    fn json_round_trip() {
        let mut h = hopset(&[(0, 2, 5)]);
        h.edges[0].weight = ScaledRational::new(i128::MAX - 3, 0);
        let s = serde_json::to_string(&h).unwrap();
        assert!(s.contains(&(i128::MAX - 3).to_string()));
        let back: EdgeSetProposal = serde_json::from_str(&s).unwrap();
        assert_eq!(back, h);
    }
}
