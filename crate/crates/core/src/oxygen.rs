//! Stationary oxygen transport: upwind advection and diffusion in tissue and
//! vessels, Kedem-Katchalsky wall exchange and Michaelis-Menten consumption,
//! solved by a damped Picard iteration.
//!
//! The 1D balance is written for the whole vessel cross-section, so the
//! advective flux is the volumetric flow times PO2 and the diffusive flux
//! carries a πR² factor. PO2 is in mmHg throughout.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flow::{face_flux, starling_flux, FlowParameters, FlowState, Layout};
use crate::linalg::{self, CsrMatrix, SolverOptions, TripletBuilder};
use crate::network::{NodeId, VascularNetwork};
use crate::tissue_grid::{SurfaceCoupling, TissueGrid};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OxygenParameters {
    /// D_v, m²/s.
    pub vascular_diffusivity: f64,
    /// D_t, m²/s.
    pub tissue_diffusivity: f64,
    /// L_PO2, m/s.
    pub wall_permeability: f64,
    /// m0, mmHg/s.
    pub max_consumption: f64,
    /// PO2 at half-maximal consumption, mmHg.
    pub half_consumption_po2: f64,
    pub arterial_po2: f64,
    pub venous_po2: f64,
}

impl Default for OxygenParameters {
    fn default() -> Self {
        Self {
            vascular_diffusivity: 5.0e-5,
            tissue_diffusivity: 1.35e-7,
            wall_permeability: 3.5e-5,
            max_consumption: 3.0,
            half_consumption_po2: 1.0,
            arterial_po2: 75.0,
            venous_po2: 38.0,
        }
    }
}

impl OxygenParameters {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("vascular_diffusivity", self.vascular_diffusivity),
            ("tissue_diffusivity", self.tissue_diffusivity),
            ("half_consumption_po2", self.half_consumption_po2),
            ("arterial_po2", self.arterial_po2),
            ("venous_po2", self.venous_po2),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Validation(format!("{name} must be positive, got {v}")));
            }
        }
        for (name, v) in [
            ("wall_permeability", self.wall_permeability),
            ("max_consumption", self.max_consumption),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::Validation(format!("{name} must be non-negative, got {v}")));
            }
        }
        Ok(())
    }
}

/// Oxygen consumption rate, mmHg/s.
pub fn michaelis_menten(po2: f64, params: &OxygenParameters) -> Result<f64> {
    if !(po2 >= 0.0) {
        return Err(Error::Domain(format!("PO2 must be non-negative, got {po2}")));
    }
    Ok(params.max_consumption * po2 / (po2 + params.half_consumption_po2))
}

/// Oxygen flux across the wall, mmHg·m/s, positive from vessel to tissue.
pub fn kedem_katchalsky_flux(
    p_v_wall: f64,
    p_t_wall: f64,
    po2_v_wall: f64,
    po2_t_wall: f64,
    flow: &FlowParameters,
    oxygen: &OxygenParameters,
) -> f64 {
    let jp = starling_flux(p_v_wall, p_t_wall, flow);
    (1.0 - flow.reflection) * jp * 0.5 * (po2_v_wall + po2_t_wall)
        + oxygen.wall_permeability * (po2_v_wall - po2_t_wall)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FixedPointOptions {
    /// θ in x ← (1−θ)x + θ·solve(x).
    pub damping: f64,
    /// Relative update tolerance.
    pub tolerance: f64,
    pub max_iter: usize,
    pub linear_tolerance: f64,
}

impl Default for FixedPointOptions {
    fn default() -> Self {
        Self {
            damping: 0.5,
            tolerance: 1e-8,
            max_iter: 200,
            linear_tolerance: 1e-12,
        }
    }
}

impl FixedPointOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(Error::Validation(format!("damping must lie in (0, 1], got {}", self.damping)));
        }
        if !(self.tolerance > 0.0) || !(self.linear_tolerance > 0.0) {
            return Err(Error::Validation("tolerances must be positive".into()));
        }
        if self.max_iter == 0 {
            return Err(Error::Validation("max_iter must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OxygenState {
    /// Tissue PO2 per cell, mmHg.
    pub po2_t: Vec<f64>,
    /// Vascular PO2 per node, mmHg.
    pub po2_v: Vec<f64>,
    pub iterations: usize,
    pub last_update: f64,
    pub history: Vec<f64>,
}

/// Transport operator without the consumption term, which is added per
/// iteration.
#[derive(Debug, Clone)]
pub struct TransportOperator<'a> {
    net: &'a VascularNetwork,
    layout: Layout,
    matrix: CsrMatrix,
    rhs: Vec<f64>,
    cell_volume: f64,
    max_boundary_po2: f64,
}

#[derive(Clone, Copy)]
enum Var {
    Cell(usize),
    Node(NodeId),
}

struct Assembler<'a> {
    layout: &'a Layout,
    dirichlet: &'a [Option<f64>],
    t: TripletBuilder,
    rhs: Vec<f64>,
}

impl Assembler<'_> {
    fn row(&self, v: Var) -> Option<usize> {
        match v {
            Var::Cell(c) => Some(c),
            Var::Node(n) => self.layout.node_unknown[n],
        }
    }

    /// Adds `coef·x[var]` to the equation of `eq`.
    fn add(&mut self, eq: Var, var: Var, coef: f64) {
        let Some(row) = self.row(eq) else { return };
        match var {
            Var::Cell(c) => self.t.add(row, c, coef),
            Var::Node(n) => match self.layout.node_unknown[n] {
                Some(col) => self.t.add(row, col, coef),
                None => self.rhs[row] -= coef * self.dirichlet[n].unwrap_or(0.0),
            },
        }
    }

    /// Adds a flux `F = cu·x[u] + cd·x[d]` leaving `from` and entering `to`.
    fn flux(&mut self, from: Var, to: Var, terms: [(Var, f64); 2]) {
        for (v, c) in terms {
            self.add(from, v, c);
            self.add(to, v, -c);
        }
    }
}

pub fn assemble_transport_operator<'a>(
    net: &'a VascularNetwork,
    grid: &TissueGrid,
    coupling: &SurfaceCoupling,
    flow: &FlowState,
    flow_params: &FlowParameters,
    params: &OxygenParameters,
) -> Result<TransportOperator<'a>> {
    params.validate()?;
    if flow.p_t.len() != grid.cell_count() || flow.p_v.len() != net.node_count() || flow.q_v.len() != net.segment_count() {
        return Err(Error::State("flow solution does not match network and grid".into()));
    }
    if coupling.segments.len() != net.segment_count() {
        return Err(Error::State("surface coupling was built for a different network".into()));
    }
    let mut dirichlet = vec![None; net.node_count()];
    let mut max_boundary_po2: f64 = 0.0;
    for n in net.boundary_nodes() {
        let po2 = n.boundary.and_then(|b| b.po2).ok_or_else(|| {
            Error::State(format!(
                "boundary node {} has no vascular PO2; classify arterial/venous nodes first",
                n.id
            ))
        })?;
        dirichlet[n.id] = Some(po2);
        max_boundary_po2 = max_boundary_po2.max(po2);
    }

    let nc = grid.cell_count();
    let layout = Layout::new(nc, net, |n| dirichlet[n].is_some());
    let mut a = Assembler {
        layout: &layout,
        dirichlet: &dirichlet,
        t: TripletBuilder::with_capacity(layout.size, 9 * nc + 20 * net.segment_count()),
        rhs: vec![0.0; layout.size],
    };
    for row in 0..layout.size {
        a.t.add(row, row, 0.0);
    }

    let h = grid.spacing();
    for (c, nb, axis) in grid.interior_faces() {
        let f = face_flux(grid, &flow.p_t, c, nb, axis, flow_params);
        let d = params.tissue_diffusivity * grid.face_area(axis) / h[axis];
        let (from, to) = (Var::Cell(c), Var::Cell(nb));
        a.flux(from, to, [(from, f.max(0.0) + d), (to, f.min(0.0) - d)]);
    }

    for seg in net.segments() {
        let l = net.segment_length(seg.id);
        let q = flow.q_v[seg.id];
        let d = params.vascular_diffusivity * std::f64::consts::PI * seg.radius * seg.radius / l;
        let (from, to) = (Var::Node(seg.node_a), Var::Node(seg.node_b));
        a.flux(from, to, [(from, q.max(0.0) + d), (to, q.min(0.0) - d)]);

        let sc = coupling.segment(seg.id);
        for s in &sc.samples {
            let (wa, wb) = sc.weights(s.s);
            let pv = wa * flow.p_v[seg.node_a] + wb * flow.p_v[seg.node_b];
            let alpha = 0.5 * (1.0 - flow_params.reflection) * starling_flux(pv, flow.p_t[s.cell], flow_params);
            let lw = params.wall_permeability;
            // J·area = (α+L)·area·(wa·Pa + wb·Pb) + (α−L)·area·Pt
            let terms = [
                (Var::Node(seg.node_a), (alpha + lw) * s.area * wa),
                (Var::Node(seg.node_b), (alpha + lw) * s.area * wb),
                (Var::Cell(s.cell), (alpha - lw) * s.area),
            ];
            for (v, c) in terms {
                a.add(Var::Cell(s.cell), v, -c);
                a.add(Var::Node(seg.node_a), v, wa * c);
                a.add(Var::Node(seg.node_b), v, wb * c);
            }
        }
    }

    let Assembler { t, rhs, .. } = a;
    Ok(TransportOperator {
        net,
        matrix: t.build(),
        rhs,
        layout,
        cell_volume: grid.cell_volume(),
        max_boundary_po2,
    })
}

impl TransportOperator<'_> {
    pub fn matrix(&self) -> &CsrMatrix {
        &self.matrix
    }

    pub fn unknowns(&self) -> usize {
        self.layout.size
    }

    fn unpack(&self, x: &[f64], iterations: usize, history: Vec<f64>) -> OxygenState {
        let po2_v = (0..self.net.node_count())
            .map(|n| match self.layout.node_unknown[n] {
                Some(u) => x[u],
                None => self.net.node(n).boundary.and_then(|b| b.po2).unwrap_or(0.0),
            })
            .collect();
        OxygenState {
            po2_t: x[..self.layout.cells].to_vec(),
            po2_v,
            iterations,
            last_update: history.last().copied().unwrap_or(0.0),
            history,
        }
    }

    /// Initial iterate from a previous state. Cells must match; nodes beyond
    /// the previous node count start at the largest boundary value.
    fn pack(&self, state: &OxygenState) -> Option<Vec<f64>> {
        if state.po2_t.len() != self.layout.cells {
            return None;
        }
        let mut x = state.po2_t.clone();
        x.resize(self.layout.size, self.max_boundary_po2);
        for (n, u) in self.layout.node_unknown.iter().enumerate() {
            if let (Some(u), Some(v)) = (u, state.po2_v.get(n)) {
                x[*u] = *v;
            }
        }
        Some(x)
    }

    fn linear_solve(&self, x: &[f64], params: &OxygenParameters, tol: f64) -> Result<Vec<f64>> {
        let mut m = self.matrix.clone();
        if params.max_consumption > 0.0 {
            let mut sink = vec![0.0; self.layout.size];
            for (c, s) in sink.iter_mut().enumerate().take(self.layout.cells) {
                *s = params.max_consumption * self.cell_volume / (x[c].max(0.0) + params.half_consumption_po2);
            }
            m.add_diagonal(&sink);
        }
        let (y, _) = linalg::solve(&m, &self.rhs, Some(x), &SolverOptions::bicgstab(tol))?;
        Ok(y)
    }
}

/// Damped Picard iteration on the consumption term.
///
/// With `m0 = 0` the problem is linear and a single undamped solve is done.
pub fn solve_oxygen(
    op: &TransportOperator<'_>,
    params: &OxygenParameters,
    initial: Option<&OxygenState>,
    opts: &FixedPointOptions,
) -> Result<OxygenState> {
    params.validate()?;
    opts.validate()?;
    let mut x = initial
        .and_then(|s| op.pack(s))
        .unwrap_or_else(|| vec![op.max_boundary_po2; op.layout.size]);
    if params.max_consumption == 0.0 {
        let y = op.linear_solve(&x, params, opts.linear_tolerance)?;
        return Ok(op.unpack(&y, 1, vec![0.0]));
    }
    let theta = opts.damping;
    let mut history = Vec::new();
    for it in 1..=opts.max_iter {
        let y = op.linear_solve(&x, params, opts.linear_tolerance)?;
        let mut diff = 0.0;
        let mut norm = 0.0;
        for (xi, yi) in x.iter_mut().zip(&y) {
            let next = (1.0 - theta) * *xi + theta * yi;
            diff += (next - *xi) * (next - *xi);
            norm += next * next;
            *xi = next;
        }
        let update = diff.sqrt() / norm.sqrt().max(f64::MIN_POSITIVE);
        history.push(update);
        log::trace!("oxygen fixed point {it}: relative update {update:e}");
        if update <= opts.tolerance {
            return Ok(op.unpack(&x, it, history));
        }
    }
    Err(Error::Convergence {
        iterations: opts.max_iter,
        last_update: history.last().copied().unwrap_or(f64::NAN),
        history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::solve_flow;
    use crate::geometry::{DomainBox, Point3};
    use crate::network::BoundaryData;
    use crate::rheology::RheologyParameters;
    use crate::tissue_grid::{build_grid, SurfaceSampling};

    fn bd(p: f64, po2: f64) -> Option<BoundaryData> {
        Some(BoundaryData { pressure: p, po2: Some(po2) })
    }

    #[test]
    fn michaelis_menten_points() {
        let p = OxygenParameters::default();
        assert_eq!(michaelis_menten(p.half_consumption_po2, &p).unwrap(), p.max_consumption / 2.0);
        assert_eq!(michaelis_menten(0.0, &p).unwrap(), 0.0);
        assert!((michaelis_menten(34.0, &p).unwrap() - 3.0 * 34.0 / 35.0).abs() < 1e-15);
        assert!(matches!(michaelis_menten(-1.0, &p), Err(Error::Domain(_))));
    }

    #[test]
    fn kedem_katchalsky_examples() {
        let f = FlowParameters::default();
        let o = OxygenParameters::default();
        // p_v − p_t equal to the oncotic offset makes J_p vanish.
        let pv = f.oncotic_offset();
        assert_eq!(kedem_katchalsky_flux(pv, 0.0, 40.0, 40.0, &f, &o), 0.0);
        let j = kedem_katchalsky_flux(pv, 0.0, 75.0, 35.0, &f, &o);
        assert!((j - 1.4e-3).abs() < 1e-15);
        let full = FlowParameters { reflection: 1.0, ..f };
        let j = kedem_katchalsky_flux(1e4, 0.0, 75.0, 35.0, &full, &o);
        assert!((j - o.wall_permeability * 40.0).abs() < 1e-15);
    }

    struct Case {
        net: VascularNetwork,
        grid: TissueGrid,
        coupling: SurfaceCoupling,
        flow: FlowState,
    }

    fn single_vessel(lp: f64, cells: usize) -> Case {
        let grid = build_grid(DomainBox::cube(0.0, 2e-4).unwrap(), [cells; 3]).unwrap();
        let net = VascularNetwork::from_parts(
            (0..=10).map(|i| {
                let b = match i {
                    0 => bd(8000.0, 75.0),
                    10 => bd(4000.0, 38.0),
                    _ => None,
                };
                (Point3::new(i as f64 * 2e-5, 1e-4, 1e-4), b)
            }),
            (0..10).map(|i| (i, i + 1, 5e-6)),
        )
        .unwrap();
        let coupling = SurfaceCoupling::build(&grid, &net, SurfaceSampling::default()).unwrap();
        let fp = FlowParameters { wall_conductivity: lp, ..Default::default() };
        let flow = solve_flow(&net, &grid, &coupling, &RheologyParameters::default(), &fp, 1e-13).unwrap();
        Case { net, grid, coupling, flow }
    }

    #[test]
    fn missing_classification_is_a_state_error() {
        let mut c = single_vessel(0.0, 4);
        c.net.set_boundary(0, Some(BoundaryData { pressure: 8000.0, po2: None }));
        let r = assemble_transport_operator(
            &c.net, &c.grid, &c.coupling, &c.flow, &FlowParameters::default(), &OxygenParameters::default(),
        );
        assert!(matches!(r, Err(Error::State(_))));
    }

    #[test]
    fn advection_diffusion_profile_matches_closed_form() {
        // No wall exchange: the vessel carries a pure 1D problem.
        let c = single_vessel(0.0, 4);
        let fp = FlowParameters { wall_conductivity: 0.0, ..Default::default() };
        let op_params = OxygenParameters {
            wall_permeability: 0.0,
            max_consumption: 0.0,
            vascular_diffusivity: 1e-6,
            ..Default::default()
        };
        let op = assemble_transport_operator(&c.net, &c.grid, &c.coupling, &c.flow, &fp, &op_params).unwrap();
        let st = solve_oxygen(&op, &op_params, None, &FixedPointOptions::default()).unwrap();
        assert_eq!(st.iterations, 1);
        // Upwind scheme: the discrete solution of u·P' = D·P'' with the
        // exact recurrence of the upwind stencil.
        let u = c.flow.u_v[0];
        let h = 2e-5;
        let pe = u * h / op_params.vascular_diffusivity;
        let r = 1.0 + pe;
        let n = 10;
        for i in 0..=n {
            let expected = 75.0 + (38.0 - 75.0) * (r.powi(i) - 1.0) / (r.powi(n) - 1.0);
            assert!((st.po2_v[i as usize] - expected).abs() < 1e-8, "node {i}");
        }
        // Continuum closed form within the discretisation error.
        let l = 2e-4;
        let pe_l = u * l / op_params.vascular_diffusivity;
        for i in 0..=n {
            let x = i as f64 * h;
            let exact = 75.0 + (38.0 - 75.0) * (pe_l * x / l).exp_m1() / pe_l.exp_m1();
            assert!((st.po2_v[i as usize] - exact).abs() < 0.2 * 37.0, "node {i}");
        }
    }

    #[test]
    fn diffusion_dominated_limit_is_linear() {
        let c = single_vessel(0.0, 4);
        let fp = FlowParameters { wall_conductivity: 0.0, ..Default::default() };
        let op_params = OxygenParameters {
            wall_permeability: 0.0,
            max_consumption: 0.0,
            vascular_diffusivity: 1.0,
            ..Default::default()
        };
        let op = assemble_transport_operator(&c.net, &c.grid, &c.coupling, &c.flow, &fp, &op_params).unwrap();
        let st = solve_oxygen(&op, &op_params, None, &FixedPointOptions::default()).unwrap();
        for i in 0..=10 {
            let lin = 75.0 + (38.0 - 75.0) * i as f64 / 10.0;
            assert!((st.po2_v[i] - lin).abs() <= 0.01 * lin);
        }
    }

    #[test]
    fn consumption_lowers_tissue_po2_and_stays_bounded() {
        let c = single_vessel(1e-12, 6);
        let fp = FlowParameters::default();
        let mut states = Vec::new();
        for m0 in [0.0, 3.0, 4.0] {
            let op_params = OxygenParameters { max_consumption: m0, ..Default::default() };
            let op = assemble_transport_operator(&c.net, &c.grid, &c.coupling, &c.flow, &fp, &op_params).unwrap();
            let st = solve_oxygen(&op, &op_params, None, &FixedPointOptions::default()).unwrap();
            for v in st.po2_t.iter().chain(&st.po2_v) {
                assert!(*v >= 0.0 && *v <= 75.0 + 1e-9, "{v}");
            }
            states.push(st);
        }
        for (a, b) in states[0].po2_t.iter().zip(&states[1].po2_t) {
            assert!(b <= a);
        }
        let mean = |s: &OxygenState| s.po2_t.iter().sum::<f64>() / s.po2_t.len() as f64;
        assert!(mean(&states[0]) > mean(&states[1]));
        assert!(mean(&states[1]) > mean(&states[2]));
    }

    #[test]
    fn fixed_point_is_deterministic() {
        let c = single_vessel(1e-12, 4);
        let fp = FlowParameters::default();
        let op_params = OxygenParameters::default();
        let op = assemble_transport_operator(&c.net, &c.grid, &c.coupling, &c.flow, &fp, &op_params).unwrap();
        let a = solve_oxygen(&op, &op_params, None, &FixedPointOptions::default()).unwrap();
        let b = solve_oxygen(&op, &op_params, None, &FixedPointOptions::default()).unwrap();
        assert_eq!(a.po2_t, b.po2_t);
        assert_eq!(a.iterations, b.iterations);
    }

    #[test]
    fn iteration_cap_reports_history() {
        let c = single_vessel(1e-12, 4);
        let fp = FlowParameters::default();
        let op_params = OxygenParameters::default();
        let op = assemble_transport_operator(&c.net, &c.grid, &c.coupling, &c.flow, &fp, &op_params).unwrap();
        let opts = FixedPointOptions { max_iter: 2, tolerance: 1e-14, ..Default::default() };
        match solve_oxygen(&op, &op_params, None, &opts) {
            Err(Error::Convergence { iterations, history, .. }) => {
                assert_eq!(iterations, 2);
                assert_eq!(history.len(), 2);
            }
            other => panic!("expected convergence error, got {other:?}"),
        }
    }
}
