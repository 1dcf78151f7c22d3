//! Synthetic starting networks for runs without a measured vascular tree.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::geometry::{enlarge_domain, DomainBox, Point3};
use crate::network::{BoundaryData, VascularNetwork};

/// Four straight vessels entering the tissue domain through its faces: two
/// arterial, two venous. Each ends in an interior tip with Dirichlet data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StarterSpec {
    /// Edge length of the cubic roi `[0, roi_edge]³`, m.
    pub roi_edge: f64,
    pub enlargement: f64,
    /// Fraction of the roi edge each vessel penetrates.
    pub depth: f64,
    pub segments_per_vessel: usize,
    pub arterial_radius: f64,
    pub venous_radius: f64,
    /// Pa.
    pub arterial_inlet_pressure: f64,
    pub arterial_tip_pressure: f64,
    pub venous_outlet_pressure: f64,
    pub venous_tip_pressure: f64,
    /// mmHg.
    pub arterial_po2: f64,
    pub venous_po2: f64,
}

impl Default for StarterSpec {
    fn default() -> Self {
        Self {
            roi_edge: 0.5e-3,
            enlargement: 0.1,
            depth: 0.4,
            segments_per_vessel: 3,
            arterial_radius: 7.5e-6,
            venous_radius: 9.0e-6,
            arterial_inlet_pressure: 8000.0,
            arterial_tip_pressure: 7500.0,
            venous_outlet_pressure: 3500.0,
            venous_tip_pressure: 4000.0,
            arterial_po2: 75.0,
            venous_po2: 38.0,
        }
    }
}

impl StarterSpec {
    pub fn roi(&self) -> Result<DomainBox> {
        DomainBox::cube(0.0, self.roi_edge)
    }

    pub fn domain(&self) -> Result<DomainBox> {
        Ok(enlarge_domain(&self.roi()?, self.enlargement))
    }
}

/// Builds the four-vessel starter described by `spec`.
pub fn desk_starter(spec: &StarterSpec) -> Result<VascularNetwork> {
    let domain = spec.domain()?;
    let e = spec.roi_edge;
    let lo = domain.lower[0];
    let hi = domain.upper[0];
    // (entry point, direction, arterial)
    let vessels = [
        (Point3::new(lo, 0.3 * e, 0.3 * e), Point3::new(1.0, 0.0, 0.0), true),
        (Point3::new(0.7 * e, hi, 0.7 * e), Point3::new(0.0, -1.0, 0.0), true),
        (Point3::new(hi, 0.7 * e, 0.3 * e), Point3::new(-1.0, 0.0, 0.0), false),
        (Point3::new(0.3 * e, lo, 0.7 * e), Point3::new(0.0, 1.0, 0.0), false),
    ];
    let n = spec.segments_per_vessel.max(1);
    let length = (domain.upper[0] - domain.lower[0]) * 0.5 - 0.5 * e + spec.depth * e;
    let mut net = VascularNetwork::new();
    for (entry, dir, arterial) in vessels {
        let (p_in, p_tip, po2, radius) = if arterial {
            (spec.arterial_inlet_pressure, spec.arterial_tip_pressure, spec.arterial_po2, spec.arterial_radius)
        } else {
            (spec.venous_outlet_pressure, spec.venous_tip_pressure, spec.venous_po2, spec.venous_radius)
        };
        let mut prev = net.add_node(entry, Some(BoundaryData { pressure: p_in, po2: Some(po2) }));
        for k in 1..=n {
            let pos = entry + dir * (length * k as f64 / n as f64);
            let bd = (k == n).then_some(BoundaryData { pressure: p_tip, po2: Some(po2) });
            let node = net.add_node(pos, bd);
            net.add_segment(prev, node, radius)?;
            prev = node;
        }
    }
    Ok(net)
}
