//! Stationary coupled flow: Darcy flow in the tissue, Poiseuille flow on the
//! vascular graph, Starling filtration across the sampled vessel walls.
//!
//! Unknowns are the tissue cell pressures followed by the pressures of the
//! non-Dirichlet network nodes. Each wall sample exchanges
//! `q = L_p·a·(Π p_v − p_t − σΔπ)`; the cell gains `q` and the two segment
//! nodes lose `w_a·q` and `w_b·q`, so the matrix is symmetric.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CsrMatrix, SolveReport, SolverOptions, TripletBuilder};
use crate::network::{NodeId, VascularNetwork};
use crate::rheology::{vessel_conductance, RheologyParameters};
use crate::tissue_grid::{SurfaceCoupling, TissueGrid};
use crate::units::volumetric_to_ug_per_s;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FlowParameters {
    /// Tissue permeability K_t, m².
    pub tissue_permeability: f64,
    /// Interstitial fluid viscosity μ_t, Pa·s.
    pub interstitial_viscosity: f64,
    /// Wall hydraulic conductivity L_p, m/(Pa·s).
    pub wall_conductivity: f64,
    pub reflection: f64,
    /// Plasma oncotic pressure π_v, Pa.
    pub oncotic_plasma: f64,
    /// Interstitial oncotic pressure π_t, Pa.
    pub oncotic_interstitial: f64,
}

impl Default for FlowParameters {
    fn default() -> Self {
        Self {
            tissue_permeability: 1.0e-18,
            interstitial_viscosity: 1.3e-3,
            wall_conductivity: 1.0e-12,
            reflection: 0.1,
            oncotic_plasma: 3733.0,
            oncotic_interstitial: 666.0,
        }
    }
}

impl FlowParameters {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("tissue_permeability", self.tissue_permeability),
            ("interstitial_viscosity", self.interstitial_viscosity),
            ("oncotic_plasma", self.oncotic_plasma),
            ("oncotic_interstitial", self.oncotic_interstitial),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Validation(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.wall_conductivity >= 0.0 && self.wall_conductivity.is_finite()) {
            return Err(Error::Validation(format!(
                "wall_conductivity must be non-negative, got {}",
                self.wall_conductivity
            )));
        }
        if !(0.0..=1.0).contains(&self.reflection) {
            return Err(Error::Validation(format!(
                "reflection must lie in [0, 1], got {}",
                self.reflection
            )));
        }
        Ok(())
    }

    /// Tissue mobility K_t/μ_t.
    pub fn mobility(&self) -> f64 {
        self.tissue_permeability / self.interstitial_viscosity
    }

    /// σ(π_v − π_t), Pa.
    pub fn oncotic_offset(&self) -> f64 {
        self.reflection * (self.oncotic_plasma - self.oncotic_interstitial)
    }
}

/// Starling filtration velocity from vessel to tissue, m/s.
pub fn starling_flux(p_v_wall: f64, p_t_wall: f64, params: &FlowParameters) -> f64 {
    params.wall_conductivity * ((p_v_wall - p_t_wall) - params.oncotic_offset())
}

/// Maps network nodes to unknown indices; Dirichlet nodes have none.
#[derive(Debug, Clone)]
pub(crate) struct Layout {
    pub cells: usize,
    pub node_unknown: Vec<Option<usize>>,
    pub size: usize,
}

impl Layout {
    pub fn new(cells: usize, net: &VascularNetwork, fixed: impl Fn(NodeId) -> bool) -> Self {
        let mut next = cells;
        let node_unknown = (0..net.node_count())
            .map(|n| {
                if fixed(n) {
                    None
                } else {
                    next += 1;
                    Some(next - 1)
                }
            })
            .collect();
        Self {
            cells,
            node_unknown,
            size: next,
        }
    }
}

/// Assembled flow system, ready to be solved.
#[derive(Debug, Clone)]
pub struct FlowSystem<'a> {
    net: &'a VascularNetwork,
    grid: &'a TissueGrid,
    coupling: &'a SurfaceCoupling,
    params: FlowParameters,
    matrix: CsrMatrix,
    rhs: Vec<f64>,
    layout: Layout,
    conductance: Vec<f64>,
    viscosity: Vec<f64>,
    pinned_cell: Option<usize>,
}

impl FlowSystem<'_> {
    pub fn matrix(&self) -> &CsrMatrix {
        &self.matrix
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    pub fn unknowns(&self) -> usize {
        self.layout.size
    }

    /// Cell fixed to 0 Pa when nothing anchors the tissue pressure.
    pub fn pinned_cell(&self) -> Option<usize> {
        self.pinned_cell
    }

    pub fn conductances(&self) -> &[f64] {
        &self.conductance
    }
}

fn check_dirichlet_components(net: &VascularNetwork) -> Result<()> {
    for comp in net.components() {
        if !comp.iter().any(|&n| net.node(n).is_boundary()) {
            return Err(Error::Singular(format!(
                "network component containing node {} has no Dirichlet node",
                comp[0]
            )));
        }
    }
    Ok(())
}

pub fn assemble_flow_system<'a>(
    net: &'a VascularNetwork,
    grid: &'a TissueGrid,
    coupling: &'a SurfaceCoupling,
    rheology: &RheologyParameters,
    params: &FlowParameters,
) -> Result<FlowSystem<'a>> {
    params.validate()?;
    rheology.validate()?;
    if coupling.segments.len() != net.segment_count() {
        return Err(Error::State(
            "surface coupling was built for a different network".into(),
        ));
    }
    check_dirichlet_components(net)?;

    let nc = grid.cell_count();
    let layout = Layout::new(nc, net, |n| net.node(n).is_boundary());
    let exchange_total: f64 = params.wall_conductivity * coupling.total_area();
    let pinned_cell = (exchange_total == 0.0).then_some(0);
    let pinned = |c: usize| pinned_cell == Some(c);

    let mut t = TripletBuilder::with_capacity(layout.size, 7 * nc + 16 * net.segment_count());
    let mut rhs = vec![0.0; layout.size];

    let mob = params.mobility();
    for (c, nb, axis) in grid.interior_faces() {
        let tr = mob * grid.face_area(axis) / grid.spacing()[axis];
        let (pc, pn) = (pinned(c), pinned(nb));
        if !pc {
            t.add(c, c, tr);
        }
        if !pn {
            t.add(nb, nb, tr);
        }
        if !pc && !pn {
            t.add(c, nb, -tr);
            t.add(nb, c, -tr);
        }
    }
    for c in 0..nc {
        t.add(c, c, if pinned(c) { 1.0 } else { 0.0 });
    }

    let node_value = |n: NodeId| net.node(n).boundary.map(|b| b.pressure).unwrap_or(0.0);

    let mut conductance = Vec::with_capacity(net.segment_count());
    let mut viscosity = Vec::with_capacity(net.segment_count());
    for seg in net.segments() {
        let l = net.segment_length(seg.id);
        let mu = rheology.viscosity_for_radius(seg.radius)?;
        let g = vessel_conductance(seg.radius, l, mu)?;
        conductance.push(g);
        viscosity.push(mu);
        let ends = [seg.node_a, seg.node_b];
        for (i, &n) in ends.iter().enumerate() {
            let Some(row) = layout.node_unknown[n] else { continue };
            let other = ends[1 - i];
            t.add(row, row, g);
            match layout.node_unknown[other] {
                Some(col) => t.add(row, col, -g),
                None => rhs[row] += g * node_value(other),
            }
        }
    }

    let offset = params.oncotic_offset();
    if params.wall_conductivity > 0.0 {
        for seg in net.segments() {
            let sc = coupling.segment(seg.id);
            let ends = [seg.node_a, seg.node_b];
            for x in &sc.samples {
                let (wa, wb) = sc.weights(x.s);
                let w = [wa, wb];
                let k = params.wall_conductivity * x.area;
                let c = x.cell;
                // cell row: k·(p_c − Σ w p_n) = −k·offset
                t.add(c, c, k);
                rhs[c] -= k * offset;
                for (i, &n) in ends.iter().enumerate() {
                    match layout.node_unknown[n] {
                        Some(col) => {
                            t.add(c, col, -k * w[i]);
                            t.add(col, c, -k * w[i]);
                        }
                        None => rhs[c] += k * w[i] * node_value(n),
                    }
                }
                // node rows: w_i·k·(Σ w p_n − p_c) = w_i·k·offset
                for (i, &n) in ends.iter().enumerate() {
                    let Some(row) = layout.node_unknown[n] else { continue };
                    rhs[row] += w[i] * k * offset;
                    for (j, &m) in ends.iter().enumerate() {
                        let v = w[i] * w[j] * k;
                        match layout.node_unknown[m] {
                            Some(col) => t.add(row, col, v),
                            None => rhs[row] -= v * node_value(m),
                        }
                    }
                }
            }
        }
    }

    Ok(FlowSystem {
        net,
        grid,
        coupling,
        params: *params,
        matrix: t.build(),
        rhs,
        layout,
        conductance,
        viscosity,
        pinned_cell,
    })
}

/// Converged flow fields.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FlowState {
    /// Tissue pressure per cell, Pa.
    pub p_t: Vec<f64>,
    /// Blood pressure per node, Pa.
    pub p_v: Vec<f64>,
    /// Mean blood velocity per segment, m/s, positive from node_a to node_b.
    pub u_v: Vec<f64>,
    /// Darcy velocity per cell, m/s.
    pub u_t: Vec<[f64; 3]>,
    /// Volumetric flow per segment, m³/s, positive from node_a to node_b.
    pub q_v: Vec<f64>,
    /// One-directional filtration from vessels into tissue, µg/s.
    pub f_tv: f64,
    /// Net filtration summed over tissue cells, m³/s.
    pub filtration_tissue_side: f64,
    /// Net filtration summed over network nodes, m³/s.
    pub filtration_vessel_side: f64,
    /// Σ |q| over all wall samples, m³/s.
    pub filtration_gross: f64,
    /// Outflow from each Dirichlet node into the system, m³/s.
    pub boundary_flux: Vec<(NodeId, f64)>,
    pub iterations: usize,
    pub relative_residual: f64,
}

impl FlowState {
    /// Σ boundary fluxes and Σ |boundary fluxes|.
    pub fn boundary_balance(&self) -> (f64, f64) {
        self.boundary_flux
            .iter()
            .fold((0.0, 0.0), |(s, a), (_, q)| (s + q, a + q.abs()))
    }
}

impl FlowSystem<'_> {
    pub fn solve(&self, rel_tol: f64) -> Result<FlowState> {
        self.solve_with(None, rel_tol)
    }

    /// Solves starting from a previous state when given. Nodes the previous
    /// state does not know start at its mean tissue pressure.
    pub fn solve_with(&self, initial: Option<&FlowState>, rel_tol: f64) -> Result<FlowState> {
        let x0 = initial.filter(|s| s.p_t.len() == self.layout.cells).map(|s| {
            let mean = s.p_t.iter().sum::<f64>() / s.p_t.len() as f64;
            let mut x = s.p_t.clone();
            x.resize(self.layout.size, mean);
            for (n, u) in self.layout.node_unknown.iter().enumerate() {
                if let (Some(u), Some(p)) = (u, s.p_v.get(n)) {
                    x[*u] = *p;
                }
            }
            x
        });
        let opts = SolverOptions::cg(rel_tol);
        let (x, report) = linalg::solve(&self.matrix, &self.rhs, x0.as_deref(), &opts)?;
        Ok(self.state_from(&x, report))
    }

    fn state_from(&self, x: &[f64], report: SolveReport) -> FlowState {
        let (net, grid, coupling, params) = (self.net, self.grid, self.coupling, &self.params);
        let nc = self.layout.cells;
        let p_t = x[..nc].to_vec();
        let p_v: Vec<f64> = (0..net.node_count())
            .map(|n| match self.layout.node_unknown[n] {
                Some(u) => x[u],
                None => net.node(n).boundary.map(|b| b.pressure).unwrap_or(0.0),
            })
            .collect();

        let mut u_v = Vec::with_capacity(net.segment_count());
        let mut q_v = Vec::with_capacity(net.segment_count());
        for seg in net.segments() {
            let l = net.segment_length(seg.id);
            let dp = p_v[seg.node_b] - p_v[seg.node_a];
            u_v.push(-seg.radius * seg.radius / (8.0 * self.viscosity[seg.id]) * dp / l);
            q_v.push(-self.conductance[seg.id] * dp);
        }

        let u_t = tissue_velocities(grid, &p_t, params);

        let mut node_out = vec![0.0; net.node_count()];
        for seg in net.segments() {
            let q = q_v[seg.id];
            node_out[seg.node_a] += q;
            node_out[seg.node_b] -= q;
        }
        let (mut tissue_side, mut positive, mut gross) = (0.0, 0.0, 0.0);
        let mut node_exchange = vec![0.0; net.node_count()];
        for seg in net.segments() {
            let sc = coupling.segment(seg.id);
            for s in &sc.samples {
                let (wa, wb) = sc.weights(s.s);
                let pv = wa * p_v[seg.node_a] + wb * p_v[seg.node_b];
                let q = starling_flux(pv, p_t[s.cell], params) * s.area;
                tissue_side += q;
                positive += q.max(0.0);
                gross += q.abs();
                node_exchange[seg.node_a] += wa * q;
                node_exchange[seg.node_b] += wb * q;
            }
        }
        let vessel_side = node_exchange.iter().sum();
        let boundary_flux = net
            .boundary_nodes()
            .map(|n| (n.id, node_out[n.id] + node_exchange[n.id]))
            .collect();

        FlowState {
            p_t,
            p_v,
            u_v,
            u_t,
            q_v,
            f_tv: volumetric_to_ug_per_s(positive),
            filtration_tissue_side: tissue_side,
            filtration_vessel_side: vessel_side,
            filtration_gross: gross,
            boundary_flux,
            iterations: report.iterations,
            relative_residual: report.relative_residual,
        }
    }
}

/// Darcy velocity at cell centres from averaged face velocities; outer faces
/// carry no flow.
pub fn tissue_velocities(grid: &TissueGrid, p_t: &[f64], params: &FlowParameters) -> Vec<[f64; 3]> {
    let mob = params.mobility();
    let h = grid.spacing();
    (0..grid.cell_count())
        .map(|c| {
            let mut u = [0.0; 3];
            for (axis, ua) in u.iter_mut().enumerate() {
                let face = |nb: Option<usize>, sign: f64| {
                    nb.map(|nb| -mob * sign * (p_t[nb] - p_t[c]) / h[axis]).unwrap_or(0.0)
                };
                *ua = 0.5 * (face(grid.neighbor(c, axis, 1), 1.0) + face(grid.neighbor(c, axis, -1), -1.0));
            }
            u
        })
        .collect()
}

/// Volumetric Darcy flux across the face from cell `c` to its neighbour
/// `nb` along `axis`, m³/s.
pub fn face_flux(grid: &TissueGrid, p_t: &[f64], c: usize, nb: usize, axis: usize, params: &FlowParameters) -> f64 {
    params.mobility() * grid.face_area(axis) / grid.spacing()[axis] * (p_t[c] - p_t[nb])
}

/// Assembles and solves in one call.
pub fn solve_flow(
    net: &VascularNetwork,
    grid: &TissueGrid,
    coupling: &SurfaceCoupling,
    rheology: &RheologyParameters,
    params: &FlowParameters,
    rel_tol: f64,
) -> Result<FlowState> {
    assemble_flow_system(net, grid, coupling, rheology, params)?.solve(rel_tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{DomainBox, Point3};
    use crate::network::BoundaryData;
    use crate::tissue_grid::{build_grid, SurfaceSampling};
    use nalgebra::{Matrix3, Vector3};

    fn bd(p: f64) -> Option<BoundaryData> {
        Some(BoundaryData { pressure: p, po2: None })
    }

    fn grid() -> TissueGrid {
        build_grid(DomainBox::cube(0.0, 2e-4).unwrap(), [4, 4, 4]).unwrap()
    }

    #[test]
    fn starling_examples() {
        let p = FlowParameters::default();
        let eq = FlowParameters {
            oncotic_plasma: 1000.0,
            oncotic_interstitial: 1000.0,
            ..p
        };
        assert_eq!(starling_flux(5.0, 5.0, &eq), 0.0);
        assert!((starling_flux(306.7, 0.0, &p)).abs() < 1e-24);
        let v = starling_flux(1000.0, 0.0, &p);
        assert!((v - 6.933e-10).abs() < 1e-22);
    }

    #[test]
    fn decoupled_poiseuille_is_linear() {
        let g = grid();
        let net = VascularNetwork::from_parts(
            [
                (Point3::new(0.0, 1e-4, 1e-4), bd(8000.0)),
                (Point3::new(0.5e-4, 1e-4, 1e-4), None),
                (Point3::new(2e-4, 1e-4, 1e-4), bd(4000.0)),
            ],
            [(0, 1, 5e-6), (1, 2, 5e-6)],
        )
        .unwrap();
        let sc = SurfaceCoupling::build(&g, &net, SurfaceSampling::default()).unwrap();
        let params = FlowParameters {
            wall_conductivity: 0.0,
            ..Default::default()
        };
        let sys = assemble_flow_system(&net, &g, &sc, &RheologyParameters::default(), &params).unwrap();
        assert_eq!(sys.pinned_cell(), Some(0));
        let st = sys.solve(1e-14).unwrap();
        assert!((st.p_v[1] - 7000.0).abs() < 1e-9);
        assert!((st.q_v[0] - st.q_v[1]).abs() <= 1e-12 * st.q_v[0]);
        assert_eq!(st.f_tv, 0.0);
        assert!(st.p_t.iter().all(|&p| p.abs() < 1e-9));
    }

    #[test]
    fn y_junction_matches_hand_assembled_system() {
        let g = grid();
        let c = Point3::new(1e-4, 1e-4, 1e-4);
        let ends = [
            Point3::new(0.0, 1e-4, 1e-4),
            Point3::new(2e-4, 0.2e-4, 1e-4),
            Point3::new(2e-4, 1.9e-4, 1.5e-4),
        ];
        let pressures = [9000.0, 4000.0, 5000.0];
        let radii = [6e-6, 4e-6, 5e-6];
        let net = VascularNetwork::from_parts(
            [(c, None)]
                .into_iter()
                .chain(ends.iter().zip(pressures).map(|(p, v)| (*p, bd(v)))),
            (0..3).map(|i| (i + 1, 0, radii[i])),
        )
        .unwrap();
        let sc = SurfaceCoupling::build(&g, &net, SurfaceSampling::default()).unwrap();
        let params = FlowParameters {
            wall_conductivity: 0.0,
            ..Default::default()
        };
        let rh = RheologyParameters::default();
        let st = solve_flow(&net, &g, &sc, &rh, &params, 1e-14).unwrap();
        let gs: Vec<f64> = (0..3)
            .map(|i| {
                let mu = rh.viscosity_for_radius(radii[i]).unwrap();
                std::f64::consts::PI * radii[i].powi(4) / (8.0 * mu * (ends[i] - c).norm())
            })
            .collect();
        let expected = gs.iter().zip(pressures).map(|(g, p)| g * p).sum::<f64>() / gs.iter().sum::<f64>();
        assert!((st.p_v[0] - expected).abs() <= 1e-10 * expected);
        let (net_flux, total) = st.boundary_balance();
        assert!(net_flux.abs() <= 1e-10 * total);
    }

    #[test]
    fn uniform_dirichlet_gives_constant_solution() {
        let g = grid();
        let net = VascularNetwork::from_parts(
            [
                (Point3::new(0.0, 1e-4, 1e-4), bd(3000.0)),
                (Point3::new(1e-4, 1e-4, 1e-4), None),
                (Point3::new(2e-4, 1e-4, 1e-4), bd(3000.0)),
            ],
            [(0, 1, 5e-6), (1, 2, 5e-6)],
        )
        .unwrap();
        let sc = SurfaceCoupling::build(&g, &net, SurfaceSampling::default()).unwrap();
        let params = FlowParameters {
            reflection: 0.0,
            ..Default::default()
        };
        let st = solve_flow(&net, &g, &sc, &RheologyParameters::default(), &params, 1e-14).unwrap();
        for p in st.p_t.iter().chain(&st.p_v) {
            assert!((p - 3000.0).abs() < 1e-6, "{p}");
        }
        assert!(st.f_tv < 1e-12);
    }

    #[test]
    fn coupled_system_is_symmetric_and_conservative() {
        let g = grid();
        let net = VascularNetwork::from_parts(
            [
                (Point3::new(0.0, 0.5e-4, 1e-4), bd(8000.0)),
                (Point3::new(1e-4, 1e-4, 1e-4), None),
                (Point3::new(2e-4, 0.5e-4, 1e-4), bd(3000.0)),
                (Point3::new(1e-4, 2e-4, 1.2e-4), bd(2500.0)),
            ],
            [(0, 1, 6e-6), (1, 2, 5e-6), (1, 3, 4e-6)],
        )
        .unwrap();
        let sc = SurfaceCoupling::build(&g, &net, SurfaceSampling::default()).unwrap();
        let params = FlowParameters {
            wall_conductivity: 1e-9,
            ..Default::default()
        };
        let sys = assemble_flow_system(&net, &g, &sc, &RheologyParameters::default(), &params).unwrap();
        assert!(sys.matrix().is_symmetric(1e-14));
        assert_eq!(sys.pinned_cell(), None);
        let st = sys.solve(1e-13).unwrap();
        let (net_flux, total) = st.boundary_balance();
        assert!(net_flux.abs() <= 1e-8 * total);
        let rel = (st.filtration_tissue_side - st.filtration_vessel_side).abs() / st.filtration_gross;
        assert!(rel <= 1e-12);
        // Maximum principle on the tissue side.
        let lo = 2500.0 - params.oncotic_offset();
        assert!(st.p_t.iter().all(|&p| p <= 8000.0 && p >= lo));
    }

    #[test]
    fn isolated_component_without_dirichlet_is_singular() {
        let g = grid();
        let net = VascularNetwork::from_parts(
            [
                (Point3::new(0.0, 1e-4, 1e-4), bd(3000.0)),
                (Point3::new(1e-4, 1e-4, 1e-4), None),
                (Point3::new(0.5e-4, 0.5e-4, 0.5e-4), None),
                (Point3::new(1.5e-4, 0.5e-4, 0.5e-4), None),
            ],
            [(0, 1, 5e-6), (2, 3, 5e-6)],
        )
        .unwrap();
        let sc = SurfaceCoupling::build(&g, &net, SurfaceSampling::default()).unwrap();
        let r = assemble_flow_system(&net, &g, &sc, &RheologyParameters::default(), &FlowParameters::default());
        assert!(matches!(r, Err(Error::Singular(_))));
    }

    #[test]
    fn hand_assembled_resistor_oracle() {
        // Chain of three free nodes between two Dirichlet ends, solved densely.
        let g = grid();
        let xs = [0.0, 0.4e-4, 0.9e-4, 1.3e-4, 2e-4];
        let radii = [6e-6, 5e-6, 4.5e-6, 4e-6];
        let net = VascularNetwork::from_parts(
            xs.iter().enumerate().map(|(i, &x)| {
                let b = match i {
                    0 => bd(7000.0),
                    4 => bd(3500.0),
                    _ => None,
                };
                (Point3::new(x, 1e-4, 1e-4), b)
            }),
            (0..4).map(|i| (i, i + 1, radii[i])),
        )
        .unwrap();
        let sc = SurfaceCoupling::build(&g, &net, SurfaceSampling::default()).unwrap();
        let params = FlowParameters {
            wall_conductivity: 0.0,
            ..Default::default()
        };
        let rh = RheologyParameters::default();
        let st = solve_flow(&net, &g, &sc, &rh, &params, 1e-14).unwrap();
        let gk: Vec<f64> = (0..4)
            .map(|i| {
                let mu = rh.viscosity_for_radius(radii[i]).unwrap();
                std::f64::consts::PI * radii[i].powi(4) / (8.0 * mu * (xs[i + 1] - xs[i]))
            })
            .collect();
        let a = Matrix3::new(
            gk[0] + gk[1], -gk[1], 0.0,
            -gk[1], gk[1] + gk[2], -gk[2],
            0.0, -gk[2], gk[2] + gk[3],
        );
        let b = Vector3::new(gk[0] * 7000.0, 0.0, gk[3] * 3500.0);
        let p = a.lu().solve(&b).unwrap();
        for i in 0..3 {
            assert!((st.p_v[i + 1] - p[i]).abs() <= 1e-10 * p[i]);
        }
    }
}
