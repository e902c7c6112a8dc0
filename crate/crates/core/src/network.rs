//! Burgers-vector bookkeeping for defect networks: junction balance,
//! reconnection and annihilation with curvature-screened exchange.
//!
//! Sign convention: Burgers vectors flowing into a junction or a
//! reconnection volume count positive. With `Delta b^a = -int_V R^a_b ^ e^b`,
//!
//! ```text
//! sum b_in - sum b_out = int_V R^a_b ^ e^b = -Delta b
//! b_f = b_1 + b_2 + Delta b
//! ```
//!
//! so the total `sum_lines b + sum_events (-Delta b)` never changes.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::dynamics::{DisclinationField, DislocationLine, Domain, Vec3};
use crate::error::{Error, Result};
use crate::forms::{integrate_over_box, wedge, AxisBox, Coframe, FormField, Pairing, ValueType};

/// Outgoing Burgers vectors with every component below this are treated as
/// annihilated.
pub const ANNIHILATION_TOLERANCE: f64 = 1e-12;

/// Junction imbalances above this are reported.
pub const BALANCE_TOLERANCE: f64 = 1e-6;

/// `Delta b^a = -int_V R^a_b ^ e^b` over an axis-aligned box.
pub fn curvature_screened_flux(r: &FormField, e: &Coframe, volume: &AxisBox, samples: usize) -> Result<Vec3> {
    if r.value_type() != ValueType::FrameMatrixAntisym(3) || r.degree() != 2 {
        return Err(Error::FramePairing("curvature must be an so(3)-valued 2-form".into()));
    }
    if !r.grid().approx_eq(e.form().grid()) {
        return Err(Error::GridMismatch);
    }
    let re = wedge(r, e.form(), Pairing::MatrixVector)?;
    let flux = integrate_over_box(&re, volume, samples)?;
    Ok(-Vec3::new(flux[0], flux[1], flux[2]))
}

/// Where an edge of the network ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Endpoint {
    Junction(u64),
    Boundary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Junction {
    pub id: u64,
    pub position: Vec3,
    /// Side of the cube used for the screening integral; defaults to the
    /// caller's value (10 core radii) when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub volume_side: Option<f64>,
}

/// Directed from `endpoints[0]` to `endpoints[1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct DislocationEdge {
    pub endpoints: [Endpoint; 2],
    pub burgers: Vec3,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct DisclinationEdge {
    pub endpoints: [Endpoint; 2],
    pub frank: Vec3,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct DefectNetwork {
    pub junctions: Vec<Junction>,
    pub dislocation_edges: Vec<DislocationEdge>,
    pub disclination_edges: Vec<DisclinationEdge>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase", tag = "kind")]
pub enum Violation {
    /// `sum b_in - sum b_out + Delta b` is not zero.
    Imbalance { junction: u64, residual: Vec3, magnitude: f64 },
    /// A disclination edge ends at a junction no other disclination edge
    /// touches.
    DanglingDisclination { junction: u64, edge: usize },
    UnknownJunction { junction: u64 },
}

impl DefectNetwork {
    fn junction(&self, id: u64) -> Option<&Junction> {
        self.junctions.iter().find(|j| j.id == id)
    }

    /// Structural checks: dangling disclination ends and references to
    /// missing junctions.
    pub fn structural_violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut unknown = std::collections::BTreeSet::new();
        let all_ends = self
            .dislocation_edges
            .iter()
            .flat_map(|e| e.endpoints)
            .chain(self.disclination_edges.iter().flat_map(|e| e.endpoints));
        for end in all_ends {
            if let Endpoint::Junction(id) = end {
                if self.junction(id).is_none() {
                    unknown.insert(id);
                }
            }
        }
        out.extend(unknown.into_iter().map(|junction| Violation::UnknownJunction { junction }));
        for (k, edge) in self.disclination_edges.iter().enumerate() {
            for end in edge.endpoints {
                if let Endpoint::Junction(id) = end {
                    // a self-loop counts twice, so a lone closed loop is fine
                    let degree: usize = self
                        .disclination_edges
                        .iter()
                        .map(|e| e.endpoints.iter().filter(|&&p| p == Endpoint::Junction(id)).count())
                        .sum();
                    if degree < 2 {
                        out.push(Violation::DanglingDisclination { junction: id, edge: k });
                    }
                }
            }
        }
        out
    }

    /// `sum b_in - sum b_out` at a junction.
    pub fn net_inflow(&self, id: u64) -> Vec3 {
        self.dislocation_edges.iter().fold(Vec3::zeros(), |acc, e| {
            let mut acc = acc;
            if e.endpoints[1] == Endpoint::Junction(id) {
                acc += e.burgers;
            }
            if e.endpoints[0] == Endpoint::Junction(id) {
                acc -= e.burgers;
            }
            acc
        })
    }

    /// Describe the current lines and disclinations as a network. Line ends
    /// on the domain boundary map to `Boundary`; other ends become
    /// junctions. Disclinations are straight lines through the domain.
    pub fn snapshot(lines: &[DislocationLine], disclinations: &DisclinationField, domain: &Domain) -> Self {
        let tol = 1e-9 * domain.min_extent();
        let on_boundary = |p: &Vec3| (0..3).any(|i| (p[i] - domain.lo[i]).abs() <= tol || (p[i] - domain.hi[i]).abs() <= tol);
        let mut net = DefectNetwork::default();
        let mut next = 0u64;
        let mut end = |p: Vec3, net: &mut DefectNetwork| {
            if on_boundary(&p) {
                Endpoint::Boundary
            } else {
                next += 1;
                net.junctions.push(Junction { id: next, position: p, volume_side: None });
                Endpoint::Junction(next)
            }
        };
        for l in lines {
            let first = l.nodes[0];
            let endpoints = if l.closed {
                let j = end(first, &mut net);
                [j, j]
            } else {
                let a = end(first, &mut net);
                [a, end(*l.nodes.last().expect("validated line"), &mut net)]
            };
            net.dislocation_edges.push(DislocationEdge { endpoints, burgers: l.burgers });
        }
        for d in &disclinations.frank_vectors {
            net.disclination_edges.push(DisclinationEdge {
                endpoints: [Endpoint::Boundary, Endpoint::Boundary],
                frank: d.theta,
            });
        }
        net
    }
}

/// Fields that screen Burgers exchange, with the quadrature resolution.
#[derive(Debug, Clone, Copy)]
pub struct Screening<'a> {
    pub curvature: &'a FormField,
    pub coframe: &'a Coframe,
    pub samples: usize,
}

impl Screening<'_> {
    fn flux(&self, volume: &AxisBox) -> Result<Vec3> {
        curvature_screened_flux(self.curvature, self.coframe, volume, self.samples)
    }
}

/// Junction balance against the curvature enclosed in a cube around each
/// junction (`default_side` unless the junction sets its own).
pub fn check_junction_balance(
    network: &DefectNetwork,
    screening: Option<&Screening<'_>>,
    default_side: f64,
) -> Result<Vec<Violation>> {
    let mut out = network.structural_violations();
    for j in &network.junctions {
        let delta_b = match screening {
            Some(s) => {
                let side = j.volume_side.unwrap_or(default_side);
                s.flux(&AxisBox::cube([j.position.x, j.position.y, j.position.z], side))?
            }
            None => Vec3::zeros(),
        };
        let residual = network.net_inflow(j.id) + delta_b;
        let magnitude = residual.norm();
        if magnitude > BALANCE_TOLERANCE {
            out.push(Violation::Imbalance { junction: j.id, residual, magnitude });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct VolumeRecord {
    pub lo: [f64; 3],
    pub hi: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ReconnectionEvent {
    pub incoming: Vec<Vec3>,
    pub outgoing: Vec<Vec3>,
    pub delta_b: Vec3,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub enclosed_volume: Option<VolumeRecord>,
    /// Step at which the event happened.
    pub timestamp: usize,
    #[serde(default)]
    pub line_ids: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub contact: Option<Vec3>,
}

impl ReconnectionEvent {
    pub fn annihilated(&self) -> bool {
        self.outgoing.is_empty()
    }
}

/// `b_f = b1 + b2 + Delta b`.
pub fn reconnect(b1: Vec3, b2: Vec3, delta_b: Vec3, timestamp: usize) -> (Vec3, ReconnectionEvent) {
    let bf = b1 + b2 + delta_b;
    let annihilated = bf.iter().all(|c| c.abs() <= ANNIHILATION_TOLERANCE);
    let event = ReconnectionEvent {
        incoming: vec![b1, b2],
        outgoing: if annihilated { Vec::new() } else { vec![bf] },
        delta_b,
        enclosed_volume: None,
        timestamp,
        line_ids: Vec::new(),
        contact: None,
    };
    (bf, event)
}

/// `sum_lines b - sum_events Delta b`, conserved by every event.
pub fn ledger_total(lines: &[DislocationLine], events: &[ReconnectionEvent]) -> Vec3 {
    let lines: Vec3 = lines.iter().map(|l| l.burgers).sum();
    let exchanged: Vec3 = events.iter().map(|e| e.delta_b).sum();
    lines - exchanged
}

/// First pair of nodes on different lines closer than `threshold`, scanning
/// in (line order, node index) order.
fn find_contact(lines: &[DislocationLine], threshold: f64) -> Option<(usize, usize, usize, usize)> {
    for i in 0..lines.len() {
        for j in i + 1..lines.len() {
            for (k, p) in lines[i].nodes.iter().enumerate() {
                for (l, q) in lines[j].nodes.iter().enumerate() {
                    if (p - q).norm() < threshold {
                        return Some((i, k, j, l));
                    }
                }
            }
        }
    }
    None
}

/// Nodes of `line` other than `k`, ordered so the sequence ends next to
/// `k` (`towards = true`) or starts next to it.
fn half(line: &DislocationLine, k: usize, towards: bool) -> Vec<Vec3> {
    let n = line.nodes.len();
    if line.closed {
        let mut seq: Vec<Vec3> = (1..n).map(|s| line.nodes[(k + s) % n]).collect();
        if !towards {
            seq.reverse();
        }
        return seq;
    }
    let before: Vec<Vec3> = line.nodes[..k].to_vec();
    let after: Vec<Vec3> = line.nodes[k + 1..].to_vec();
    // keep the longer side; ties keep the side before the contact for the
    // first line and after it for the second
    let use_before = if towards {
        before.len() >= after.len()
    } else {
        before.len() > after.len()
    };
    let mut seq = if use_before { before } else { after };
    // orient: before-side naturally ends at k, after-side starts after k
    if use_before != towards {
        seq.reverse();
    }
    seq
}

/// One pass of `x_i <- (x_{i-1} + 2 x_i + x_{i+1}) / 4` on interior nodes.
fn smooth(nodes: &[Vec3]) -> Vec<Vec3> {
    let n = nodes.len();
    let mut out = nodes.to_vec();
    for i in 1..n.saturating_sub(1) {
        out[i] = (nodes[i - 1] + nodes[i] * 2.0 + nodes[i + 1]) * 0.25;
    }
    out.dedup();
    out
}

/// Box of side `side` around `c`, intersected with the domain.
fn contact_volume(c: &Vec3, side: f64, domain: &Domain) -> AxisBox {
    let h = 0.5 * side;
    let lo = [0, 1, 2].map(|i| (c[i] - h).max(domain.lo[i]));
    let hi = [0, 1, 2].map(|i| (c[i] + h).min(domain.hi[i]));
    AxisBox::new3(lo, hi)
}

/// Merge or annihilate lines whose nodes come within `threshold`, until no
/// contacts remain.
pub fn detect_and_reconnect(
    mut lines: Vec<DislocationLine>,
    threshold: f64,
    screening: Option<&Screening<'_>>,
    domain: &Domain,
    timestamp: usize,
) -> Result<(Vec<DislocationLine>, Vec<ReconnectionEvent>)> {
    if !(threshold > 0.0) {
        return Err(Error::InvalidParams("reconnection threshold must be positive".into()));
    }
    lines.sort_by_key(|l| l.id);
    let mut events = Vec::new();
    while let Some((i, k, j, l)) = find_contact(&lines, threshold) {
        let (a, b) = (&lines[i], &lines[j]);
        let contact = (a.nodes[k] + b.nodes[l]) * 0.5;
        let volume = contact_volume(&contact, 2.0 * threshold, domain);
        let delta_b = match screening {
            Some(s) => s.flux(&volume)?,
            None => Vec3::zeros(),
        };
        let (bf, mut event) = reconnect(a.burgers, b.burgers, delta_b, timestamp);
        event.enclosed_volume = Some(VolumeRecord {
            lo: [volume.lo[0], volume.lo[1], volume.lo[2]],
            hi: [volume.hi[0], volume.hi[1], volume.hi[2]],
        });
        event.line_ids = vec![a.id, b.id];
        event.contact = Some(contact);
        let merged = if event.annihilated() {
            None
        } else {
            let mut nodes = half(a, k, true);
            nodes.push(contact);
            nodes.extend(half(b, l, false));
            Some(DislocationLine {
                id: a.id.min(b.id),
                nodes: smooth(&nodes),
                burgers: bf,
                closed: false,
                mobility: 0.5 * (a.mobility + b.mobility),
            })
        };
        lines.remove(j);
        lines.remove(i);
        if let Some(m) = merged {
            m.validate()?;
            lines.push(m);
            lines.sort_by_key(|l| l.id);
        }
        events.push(event);
    }
    Ok((lines, events))
}

/// One JSON object per line.
pub fn write_events_jsonl<W: Write>(mut w: W, events: &[ReconnectionEvent]) -> Result<()> {
    for e in events {
        serde_json::to_writer(&mut w, e)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}
