use super::{NodeId, VascularNetwork};
use crate::error::{Error, Result};
use crate::flow::FlowState;

pub const ARTERIAL_PO2_MMHG: f64 = 75.0;
pub const VENOUS_PO2_MMHG: f64 = 38.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VesselClass {
    Artery,
    Vein,
}

impl VesselClass {
    pub fn po2(self) -> f64 {
        match self {
            VesselClass::Artery => ARTERIAL_PO2_MMHG,
            VesselClass::Vein => VENOUS_PO2_MMHG,
        }
    }
}

/// Labels every boundary node by the speed of its terminal segment and
/// writes the matching vascular PO2 into its boundary data.
///
/// A segment slower than the network-wide mean speed is venous; ties go to
/// the arterial side.
pub fn classify_arterial_venous(
    net: &mut VascularNetwork,
    flow: Option<&FlowState>,
) -> Result<Vec<(NodeId, VesselClass)>> {
    let flow = flow.ok_or_else(|| Error::State("classification needs a flow solution".into()))?;
    classify_by_speed(net, &flow.u_v)
}

pub(crate) fn classify_by_speed(
    net: &mut VascularNetwork,
    velocities: &[f64],
) -> Result<Vec<(NodeId, VesselClass)>> {
    if velocities.len() != net.segment_count() {
        return Err(Error::State(format!(
            "flow solution has {} segment velocities, network has {} segments",
            velocities.len(),
            net.segment_count()
        )));
    }
    if velocities.is_empty() {
        return Ok(Vec::new());
    }
    let mean = velocities.iter().map(|u| u.abs()).sum::<f64>() / velocities.len() as f64;
    let boundary: Vec<NodeId> = net.boundary_nodes().map(|n| n.id).collect();
    let mut labels = Vec::with_capacity(boundary.len());
    for id in boundary {
        let inc = net.incident(id);
        let speed = if inc.is_empty() {
            mean
        } else {
            inc.iter().map(|&s| velocities[s].abs()).sum::<f64>() / inc.len() as f64
        };
        let class = if speed < mean {
            VesselClass::Vein
        } else {
            VesselClass::Artery
        };
        let mut b = net.node(id).boundary.expect("boundary node");
        b.po2 = Some(class.po2());
        net.set_boundary(id, Some(b));
        labels.push((id, class));
    }
    Ok(labels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point3;
    use crate::network::BoundaryData;

    fn two_segments() -> VascularNetwork {
        let bc = Some(BoundaryData { pressure: 1000.0, po2: None });
        VascularNetwork::from_parts(
            [
                (Point3::new(0.0, 0.0, 0.0), bc),
                (Point3::new(1e-4, 0.0, 0.0), None),
                (Point3::new(2e-4, 0.0, 0.0), bc),
            ],
            [(0, 1, 5e-6), (1, 2, 5e-6)],
        )
        .unwrap()
    }

    #[test]
    fn slower_segment_is_venous() {
        let mut net = two_segments();
        let labels = classify_by_speed(&mut net, &[1.0, -3.0]).unwrap();
        assert_eq!(labels, vec![(0, VesselClass::Vein), (2, VesselClass::Artery)]);
        assert_eq!(net.node(0).boundary.unwrap().po2, Some(38.0));
        assert_eq!(net.node(2).boundary.unwrap().po2, Some(75.0));
    }

    #[test]
    fn ties_are_arterial() {
        let mut net = two_segments();
        let labels = classify_by_speed(&mut net, &[2.0, 2.0]).unwrap();
        assert!(labels.iter().all(|(_, c)| *c == VesselClass::Artery));
    }

    #[test]
    fn missing_flow_is_state_error() {
        let mut net = two_segments();
        assert!(matches!(classify_arterial_venous(&mut net, None), Err(Error::State(_))));
        assert!(matches!(classify_by_speed(&mut net, &[1.0]), Err(Error::State(_))));
    }
}
