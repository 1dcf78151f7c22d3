//! One evaluation of the coupled model: surface coupling, flow,
//! arterial/venous classification and oxygen.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::flow::{assemble_flow_system, FlowParameters, FlowState};
use crate::network::{classify_arterial_venous, VascularNetwork, VesselClass};
use crate::oxygen::{assemble_transport_operator, solve_oxygen, FixedPointOptions, OxygenParameters, OxygenState};
use crate::rheology::RheologyParameters;
use crate::tissue_grid::{SurfaceCoupling, SurfaceSampling, TissueGrid};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelParameters {
    pub rheology: RheologyParameters,
    pub flow: FlowParameters,
    pub oxygen: OxygenParameters,
    pub fixed_point: FixedPointOptions,
    /// Relative residual for the flow solve.
    pub flow_tolerance: f64,
    /// Angular samples per ring of the vessel surface.
    pub angular_samples: usize,
}

impl Default for ModelParameters {
    fn default() -> Self {
        Self {
            rheology: RheologyParameters::default(),
            flow: FlowParameters::default(),
            oxygen: OxygenParameters::default(),
            fixed_point: FixedPointOptions::default(),
            flow_tolerance: 1e-12,
            angular_samples: 8,
        }
    }
}

impl ModelParameters {
    pub fn validate(&self) -> Result<()> {
        self.rheology.validate()?;
        self.flow.validate()?;
        self.oxygen.validate()?;
        self.fixed_point.validate()?;
        if !(self.flow_tolerance > 0.0) {
            return Err(crate::Error::Validation("flow_tolerance must be positive".into()));
        }
        if self.angular_samples < 2 {
            return Err(crate::Error::Validation("angular_samples must be at least 2".into()));
        }
        Ok(())
    }

    pub fn sampling(&self) -> SurfaceSampling {
        SurfaceSampling {
            n_axial: None,
            n_angular: self.angular_samples,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CoupledSolution {
    pub coupling: SurfaceCoupling,
    pub flow: FlowState,
    pub oxygen: OxygenState,
}

/// Solves flow then oxygen. Boundary nodes without a vascular PO2 trigger a
/// classification of all boundary nodes from the flow field first.
pub fn solve_coupled(
    net: &mut VascularNetwork,
    grid: &TissueGrid,
    params: &ModelParameters,
    warm_start: Option<&CoupledSolution>,
) -> Result<CoupledSolution> {
    params.validate()?;
    let coupling = SurfaceCoupling::build(grid, net, params.sampling())?;
    let flow = assemble_flow_system(net, grid, &coupling, &params.rheology, &params.flow)?
        .solve_with(warm_start.map(|w| &w.flow), params.flow_tolerance)?;
    if net.boundary_nodes().any(|n| n.boundary.is_some_and(|b| b.po2.is_none())) {
        let labels = classify_arterial_venous(net, Some(&flow))?;
        for (id, class) in labels {
            let mut b = net.node(id).boundary.expect("boundary node");
            b.po2 = Some(match class {
                VesselClass::Artery => params.oxygen.arterial_po2,
                VesselClass::Vein => params.oxygen.venous_po2,
            });
            net.set_boundary(id, Some(b));
        }
    }
    let op = assemble_transport_operator(net, grid, &coupling, &flow, &params.flow, &params.oxygen)?;
    let oxygen = solve_oxygen(&op, &params.oxygen, warm_start.map(|w| &w.oxygen), &params.fixed_point)?;
    Ok(CoupledSolution { coupling, flow, oxygen })
}
