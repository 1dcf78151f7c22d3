//! Vessel collision test with an eight-octant spatial index.
//!
//! Each stored segment is listed in every octant its bounding box touches.
//! A query visits the octants touched by the candidate's bounding box
//! inflated by `R_new + R_max`, which can never miss a segment closer than
//! the sum of radii, so the indexed test agrees with a full scan.

use crate::geometry::{segment_distance, DomainBox, Point3};
use crate::network::{NodeId, SegmentId, VascularNetwork};

/// A proposed vessel from an existing node to either a new point or another
/// existing node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate {
    pub from: NodeId,
    pub to: Endpoint,
    pub radius: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Endpoint {
    Point(Point3),
    Node(NodeId),
}

impl Candidate {
    fn geometry(&self, net: &VascularNetwork) -> (Point3, Point3) {
        let a = net.position(self.from);
        let b = match self.to {
            Endpoint::Point(p) => p,
            Endpoint::Node(n) => net.position(n),
        };
        (a, b)
    }

    fn shares_node_with(&self, net: &VascularNetwork, seg: SegmentId) -> bool {
        let s = net.segment(seg);
        s.touches(self.from) || matches!(self.to, Endpoint::Node(n) if s.touches(n))
    }

    fn collides_with(&self, net: &VascularNetwork, a: &Point3, b: &Point3, seg: SegmentId) -> bool {
        if self.shares_node_with(net, seg) {
            return false;
        }
        let (p, q) = net.endpoints(seg);
        segment_distance(a, b, &p, &q) < self.radius + net.segment(seg).radius
    }
}

/// Full pairwise test against every segment of the network.
pub fn collides_brute_force(net: &VascularNetwork, cand: &Candidate) -> bool {
    let (a, b) = cand.geometry(net);
    (0..net.segment_count()).any(|s| cand.collides_with(net, &a, &b, s))
}

#[derive(Debug, Clone)]
pub struct OctantIndex {
    center: Point3,
    octants: [Vec<SegmentId>; 8],
    max_radius: f64,
}

impl OctantIndex {
    /// Splits `domain` at its centre. Octants extend without bound outward so
    /// segments poking out of the domain are still indexed.
    pub fn build(net: &VascularNetwork, domain: &DomainBox) -> Self {
        let mut idx = Self {
            center: domain.center(),
            octants: Default::default(),
            max_radius: 0.0,
        };
        for s in 0..net.segment_count() {
            idx.insert(net, s);
        }
        idx
    }

    fn octants_touching(&self, bbox: &DomainBox) -> impl Iterator<Item = usize> + '_ {
        let c = self.center;
        let lo = bbox.lower;
        let hi = bbox.upper;
        (0..8).filter(move |&o| {
            (0..3).all(|a| {
                if o >> a & 1 == 0 {
                    lo[a] <= c[a]
                } else {
                    hi[a] >= c[a]
                }
            })
        })
    }

    pub fn insert(&mut self, net: &VascularNetwork, seg: SegmentId) {
        let (a, b) = net.endpoints(seg);
        let bbox = DomainBox::bounding(&a, &b);
        let hits: Vec<usize> = self.octants_touching(&bbox).collect();
        for o in hits {
            self.octants[o].push(seg);
        }
        self.max_radius = self.max_radius.max(net.segment(seg).radius);
    }

    /// Indexed collision test.
    pub fn collides(&self, net: &VascularNetwork, cand: &Candidate) -> bool {
        let (a, b) = cand.geometry(net);
        let query = DomainBox::bounding(&a, &b).inflate(cand.radius + self.max_radius);
        let mut seen: Vec<SegmentId> = Vec::new();
        for o in self.octants_touching(&query) {
            for &s in &self.octants[o] {
                seen.push(s);
            }
        }
        seen.sort_unstable();
        seen.dedup();
        seen.into_iter().any(|s| cand.collides_with(net, &a, &b, s))
    }

    pub fn octant_sizes(&self) -> [usize; 8] {
        std::array::from_fn(|o| self.octants[o].len())
    }
}

/// Inserts the candidate unless it collides. A point endpoint becomes a new
/// node carrying `boundary`. Returns the new segment id when accepted.
pub fn check_and_insert(
    net: &mut VascularNetwork,
    index: &mut OctantIndex,
    cand: &Candidate,
    boundary: Option<crate::network::BoundaryData>,
) -> Option<SegmentId> {
    if index.collides(net, cand) {
        return None;
    }
    let to = match cand.to {
        Endpoint::Point(p) => net.add_node(p, boundary),
        Endpoint::Node(n) => n,
    };
    let seg = net.add_segment(cand.from, to, cand.radius).ok()?;
    index.insert(net, seg);
    Some(seg)
}

/// All pairs of segments without a shared node closer than their radii sum.
pub fn collision_violations(net: &VascularNetwork) -> Vec<(SegmentId, SegmentId)> {
    let segs = net.segments();
    let mut out = Vec::new();
    for i in 0..segs.len() {
        let (a0, a1) = net.endpoints(i);
        for j in i + 1..segs.len() {
            if segs[i].shares_node(&segs[j]) {
                continue;
            }
            let (b0, b1) = net.endpoints(j);
            if segment_distance(&a0, &a1, &b0, &b1) < segs[i].radius + segs[j].radius {
                out.push((i, j));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn line(a: Point3, b: Point3, r: f64) -> VascularNetwork {
        VascularNetwork::from_parts([(a, None), (b, None)], [(0, 1, r)]).unwrap()
    }

    fn domain() -> DomainBox {
        DomainBox::cube(0.0, 1.0).unwrap()
    }

    #[test]
    fn child_at_parent_end_is_accepted() {
        let mut net = line(Point3::new(0.1, 0.5, 0.5), Point3::new(0.4, 0.5, 0.5), 0.05);
        let mut idx = OctantIndex::build(&net, &domain());
        let cand = Candidate { from: 1, to: Endpoint::Point(Point3::new(0.6, 0.5, 0.5)), radius: 0.05 };
        assert_eq!(check_and_insert(&mut net, &mut idx, &cand, None), Some(1));
        assert_eq!(net.segment_count(), 2);
    }

    #[test]
    fn crossing_vessel_is_rejected() {
        let mut net = line(Point3::new(0.1, 0.5, 0.5), Point3::new(0.9, 0.5, 0.5), 0.01);
        let n = net.add_node(Point3::new(0.5, 0.1, 0.5), None);
        let mut idx = OctantIndex::build(&net, &domain());
        let cand = Candidate { from: n, to: Endpoint::Point(Point3::new(0.5, 0.9, 0.5)), radius: 0.01 };
        assert_eq!(check_and_insert(&mut net, &mut idx, &cand, None), None);
        assert_eq!(net.segment_count(), 1);
    }

    #[test]
    fn touching_at_exact_radius_sum_is_accepted() {
        let mut net = line(Point3::new(0.0, 0.0, 0.0), Point3::new(1.0, 0.0, 0.0), 0.25);
        let n = net.add_node(Point3::new(0.0, 0.5, 0.0), None);
        let idx = OctantIndex::build(&net, &domain());
        let cand = Candidate { from: n, to: Endpoint::Point(Point3::new(1.0, 0.5, 0.0)), radius: 0.25 };
        assert!(!idx.collides(&net, &cand));
        let closer = Candidate { radius: 0.2500001, ..cand };
        assert!(idx.collides(&net, &closer));
    }

    #[test]
    fn link_between_existing_nodes_is_exempt_at_both_ends() {
        let net = VascularNetwork::from_parts(
            [
                (Point3::new(0.1, 0.1, 0.5), None),
                (Point3::new(0.5, 0.5, 0.5), None),
                (Point3::new(0.9, 0.1, 0.5), None),
                (Point3::new(0.5, 0.9, 0.5), None),
            ],
            [(0, 1, 0.05), (2, 3, 0.05)],
        )
        .unwrap();
        let idx = OctantIndex::build(&net, &domain());
        let cand = Candidate { from: 1, to: Endpoint::Node(3), radius: 0.05 };
        assert!(!idx.collides(&net, &cand));
        assert!(!collides_brute_force(&net, &cand));
    }

    #[test]
    fn indexed_test_matches_full_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let mut net = VascularNetwork::new();
        for _ in 0..200 {
            let a: Point3 = Point3::from_fn(|_, _| rng.random::<f64>());
            let b = a + Point3::from_fn(|_, _| rng.random_range(-0.15..0.15));
            let na = net.add_node(a, None);
            let nb = net.add_node(b, None);
            net.add_segment(na, nb, rng.random_range(0.001..0.02)).unwrap();
        }
        let idx = OctantIndex::build(&net, &domain());
        for _ in 0..500 {
            let from = rng.random_range(0..net.node_count());
            let p = net.position(from) + Point3::from_fn(|_, _| rng.random_range(-0.2..0.2));
            let cand = Candidate { from, to: Endpoint::Point(p), radius: rng.random_range(0.001..0.02) };
            assert_eq!(idx.collides(&net, &cand), collides_brute_force(&net, &cand));
        }
    }
}
