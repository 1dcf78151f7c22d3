//! The 1D vascular graph: straight cylindrical segments between network
//! nodes, boundary data at Dirichlet nodes, and topology queries.

mod classify;
mod dgf;

pub use classify::{classify_arterial_venous, VesselClass, ARTERIAL_PO2_MMHG, VENOUS_PO2_MMHG};
pub use dgf::{parse_dgf, read_dgf, write_dgf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{DomainBox, Point3};

pub type NodeId = usize;
pub type SegmentId = usize;

/// Dirichlet data carried by a boundary node.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryData {
    /// Blood pressure, Pa.
    pub pressure: f64,
    /// Vascular oxygen partial pressure, mmHg. Set by arterial/venous classification.
    pub po2: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkNode {
    pub id: NodeId,
    pub position: Point3,
    pub boundary: Option<BoundaryData>,
}

impl NetworkNode {
    pub fn is_boundary(&self) -> bool {
        self.boundary.is_some()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub id: SegmentId,
    pub node_a: NodeId,
    pub node_b: NodeId,
    /// Radius in m.
    pub radius: f64,
}

impl Segment {
    pub fn other(&self, node: NodeId) -> NodeId {
        if node == self.node_a {
            self.node_b
        } else {
            self.node_a
        }
    }

    pub fn touches(&self, node: NodeId) -> bool {
        self.node_a == node || self.node_b == node
    }

    pub fn shares_node(&self, other: &Segment) -> bool {
        self.touches(other.node_a) || self.touches(other.node_b)
    }
}

/// Geometric graph of nodes and cylindrical segments.
///
/// Node and segment ids are their positions in the internal vectors; removal
/// compacts both and renumbers.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct VascularNetwork {
    nodes: Vec<NetworkNode>,
    segments: Vec<Segment>,
    adjacency: Vec<Vec<SegmentId>>,
}

/// Serializable form of a network. Adjacency is rebuilt on load.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NetworkSnapshot {
    pub nodes: Vec<NetworkNode>,
    pub segments: Vec<Segment>,
}

impl VascularNetwork {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a network from loose parts, validating every segment.
    pub fn from_parts(
        positions: impl IntoIterator<Item = (Point3, Option<BoundaryData>)>,
        segments: impl IntoIterator<Item = (NodeId, NodeId, f64)>,
    ) -> Result<Self> {
        let mut net = Self::new();
        for (p, b) in positions {
            net.add_node(p, b);
        }
        for (a, b, r) in segments {
            net.add_segment(a, b, r)?;
        }
        Ok(net)
    }

    pub fn add_node(&mut self, position: Point3, boundary: Option<BoundaryData>) -> NodeId {
        let id = self.nodes.len();
        self.nodes.push(NetworkNode {
            id,
            position,
            boundary,
        });
        self.adjacency.push(Vec::new());
        id
    }

    pub fn add_segment(&mut self, node_a: NodeId, node_b: NodeId, radius: f64) -> Result<SegmentId> {
        let n = self.nodes.len();
        if node_a >= n || node_b >= n {
            return Err(Error::Topology(format!(
                "segment references unknown node ({node_a}, {node_b}); network has {n} nodes"
            )));
        }
        if node_a == node_b {
            return Err(Error::Topology(format!("self-loop at node {node_a}")));
        }
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::Validation(format!("non-positive radius {radius}")));
        }
        let len = (self.nodes[node_b].position - self.nodes[node_a].position).norm();
        if !(len > 0.0) {
            return Err(Error::Validation(format!(
                "zero-length segment between nodes {node_a} and {node_b}"
            )));
        }
        let id = self.segments.len();
        self.segments.push(Segment {
            id,
            node_a,
            node_b,
            radius,
        });
        self.adjacency[node_a].push(id);
        self.adjacency[node_b].push(id);
        Ok(id)
    }

    pub fn nodes(&self) -> &[NetworkNode] {
        &self.nodes
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn node(&self, id: NodeId) -> &NetworkNode {
        &self.nodes[id]
    }

    pub fn segment(&self, id: SegmentId) -> &Segment {
        &self.segments[id]
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn segment_count(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn incident(&self, node: NodeId) -> &[SegmentId] {
        &self.adjacency[node]
    }

    pub fn degree(&self, node: NodeId) -> usize {
        self.adjacency[node].len()
    }

    pub fn position(&self, node: NodeId) -> Point3 {
        self.nodes[node].position
    }

    pub fn set_boundary(&mut self, node: NodeId, boundary: Option<BoundaryData>) {
        self.nodes[node].boundary = boundary;
    }

    pub fn set_radius(&mut self, seg: SegmentId, radius: f64) {
        self.segments[seg].radius = radius;
    }

    pub fn endpoints(&self, seg: SegmentId) -> (Point3, Point3) {
        let s = &self.segments[seg];
        (self.nodes[s.node_a].position, self.nodes[s.node_b].position)
    }

    /// Length in m and unit orientation pointing from `node_a` to `node_b`.
    pub fn segment_geometry(&self, seg: SegmentId) -> Result<(f64, Point3)> {
        let s = self
            .segments
            .get(seg)
            .ok_or_else(|| Error::Topology(format!("unknown segment {seg}")))?;
        let d = self.nodes[s.node_b].position - self.nodes[s.node_a].position;
        let len = d.norm();
        if !(len > 0.0) {
            return Err(Error::Validation(format!("segment {seg} has zero length")));
        }
        Ok((len, d / len))
    }

    pub fn segment_length(&self, seg: SegmentId) -> f64 {
        let (a, b) = self.endpoints(seg);
        (b - a).norm()
    }

    pub fn boundary_nodes(&self) -> impl Iterator<Item = &NetworkNode> {
        self.nodes.iter().filter(|n| n.is_boundary())
    }

    /// Degree-1 nodes lying strictly inside `region`.
    ///
    /// Inflow/outflow nodes on the faces of the tissue domain are never
    /// strictly inside it, so they are excluded when `region` is the domain or
    /// any sub-box of it.
    pub fn terminal_nodes(&self, region: &DomainBox) -> Vec<NodeId> {
        self.nodes
            .iter()
            .filter(|n| self.degree(n.id) == 1 && region.contains_strictly(&n.position))
            .map(|n| n.id)
            .collect()
    }

    /// The unique segment attached to a degree-1 node.
    pub fn terminal_segment(&self, node: NodeId) -> Option<SegmentId> {
        match self.adjacency[node].as_slice() {
            [s] => Some(*s),
            _ => None,
        }
    }

    /// Returns the sub-network of segments with radius strictly above `threshold`.
    pub fn extract_large_vessels(&self, threshold: f64) -> VascularNetwork {
        let keep: Vec<bool> = self.segments.iter().map(|s| s.radius > threshold).collect();
        let mut out = self.clone();
        let drop: Vec<SegmentId> = (0..keep.len()).filter(|&i| !keep[i]).collect();
        out.remove_segments(&drop);
        out
    }

    /// Removes the listed segments and then every node left without any
    /// incident segment. Returns the old-to-new node id map.
    pub fn remove_segments(&mut self, ids: &[SegmentId]) -> Vec<Option<NodeId>> {
        let mut dead = vec![false; self.segments.len()];
        for &i in ids {
            dead[i] = true;
        }
        let segments: Vec<Segment> = self
            .segments
            .iter()
            .filter(|s| !dead[s.id])
            .copied()
            .collect();
        let mut used = vec![false; self.nodes.len()];
        for s in &segments {
            used[s.node_a] = true;
            used[s.node_b] = true;
        }
        self.rebuild(segments, &used)
    }

    /// Removes nodes flagged `false` in `keep_node` (which must not be
    /// referenced by any kept segment) and renumbers.
    fn rebuild(&mut self, segments: Vec<Segment>, keep_node: &[bool]) -> Vec<Option<NodeId>> {
        let mut map = vec![None; self.nodes.len()];
        let mut nodes = Vec::new();
        for n in &self.nodes {
            if keep_node[n.id] {
                map[n.id] = Some(nodes.len());
                nodes.push(NetworkNode {
                    id: nodes.len(),
                    ..n.clone()
                });
            }
        }
        let mut adjacency = vec![Vec::new(); nodes.len()];
        let segments: Vec<Segment> = segments
            .into_iter()
            .enumerate()
            .map(|(id, s)| {
                let a = map[s.node_a].expect("segment endpoint removed");
                let b = map[s.node_b].expect("segment endpoint removed");
                adjacency[a].push(id);
                adjacency[b].push(id);
                Segment {
                    id,
                    node_a: a,
                    node_b: b,
                    radius: s.radius,
                }
            })
            .collect();
        self.nodes = nodes;
        self.segments = segments;
        self.adjacency = adjacency;
        map
    }

    /// Connected components of the graph, as lists of node ids.
    pub fn components(&self) -> Vec<Vec<NodeId>> {
        let mut seen = vec![false; self.nodes.len()];
        let mut out = Vec::new();
        for start in 0..self.nodes.len() {
            if seen[start] {
                continue;
            }
            let mut stack = vec![start];
            let mut comp = Vec::new();
            seen[start] = true;
            while let Some(n) = stack.pop() {
                comp.push(n);
                for &s in &self.adjacency[n] {
                    let m = self.segments[s].other(n);
                    if !seen[m] {
                        seen[m] = true;
                        stack.push(m);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// Disjoint union; ids of `other` are shifted.
    pub fn merge(&mut self, other: &VascularNetwork) {
        let shift = self.nodes.len();
        for n in &other.nodes {
            self.add_node(n.position, n.boundary);
        }
        for s in &other.segments {
            self.add_segment(s.node_a + shift, s.node_b + shift, s.radius)
                .expect("segments of a valid network stay valid after shifting");
        }
    }

    pub fn snapshot(&self) -> NetworkSnapshot {
        NetworkSnapshot {
            nodes: self.nodes.clone(),
            segments: self.segments.clone(),
        }
    }

    pub fn from_snapshot(snap: &NetworkSnapshot) -> Result<Self> {
        let mut net = Self::new();
        for (i, n) in snap.nodes.iter().enumerate() {
            if n.id != i {
                return Err(Error::Validation(format!("node id {} at position {i}", n.id)));
            }
            net.add_node(n.position, n.boundary);
        }
        for s in &snap.segments {
            net.add_segment(s.node_a, s.node_b, s.radius)?;
        }
        Ok(net)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.snapshot())?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_snapshot(&serde_json::from_str(text)?)
    }

    /// Checks the adjacency lists against the segment list.
    pub fn check_adjacency(&self) -> bool {
        let mut expected = vec![Vec::new(); self.nodes.len()];
        for s in &self.segments {
            expected[s.node_a].push(s.id);
            expected[s.node_b].push(s.id);
        }
        expected.iter_mut().zip(&self.adjacency).all(|(e, a)| {
            let mut a = a.clone();
            a.sort_unstable();
            e.sort_unstable();
            *e == a
        })
    }
}
