//! Growth phases, linking of terminals, and clipping to the region of interest.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::bifurcation::{bifurcation_angles, build_bifurcation_directions, growth_direction};
use super::collision::{check_and_insert, Candidate, Endpoint, OctantIndex};
use super::control_volume::control_volume_averages;
use super::sampling::{
    bifurcation_decision, murray_branch_radii, sample_length, sample_length_ratio, sample_link_distance,
    sample_small_radius,
};
use super::GrowthParameters;
use crate::error::{Error, Result};
use crate::geometry::{DomainBox, Point3};
use crate::model::{solve_coupled, CoupledSolution, ModelParameters};
use crate::network::{BoundaryData, NodeId, VascularNetwork};
use crate::tissue_grid::TissueGrid;
use crate::units::pa_to_mmhg;

/// Everything a growth run needs besides the starting network.
#[derive(Debug, Clone)]
pub struct GrowthSetup {
    /// Tissue domain Ω.
    pub domain: DomainBox,
    pub roi: DomainBox,
    pub cells: [usize; 3],
    pub model: ModelParameters,
    pub growth: GrowthParameters,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub phase: u8,
    pub iteration: usize,
    /// Roi-averaged tissue PO2 of the evaluation at the start of the step,
    /// mmHg. None for pruning steps, which do not solve.
    pub po2_roi: Option<f64>,
    pub grown: usize,
    pub links: usize,
    pub removed: usize,
    pub terminals: usize,
    pub segments: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct BifurcationRecord {
    pub phase: u8,
    pub iteration: usize,
    pub parent_radius: f64,
    pub radii: [f64; 2],
    pub parent_direction: [f64; 3],
    pub gradient_direction: [f64; 3],
    pub directions: [[f64; 3]; 2],
    pub normal: [f64; 3],
    /// Branch that kept its optimal angle.
    pub kept: usize,
    pub phi: [f64; 2],
    pub clamped: bool,
    pub accepted: [bool; 2],
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SmallRadiusRecord {
    pub raw: f64,
    pub radius: f64,
    pub parent: f64,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct LinkRecord {
    pub phase: u8,
    pub from: NodeId,
    pub to: NodeId,
    pub radius: f64,
    pub distance: f64,
    pub max_distance: f64,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct GrowthReport {
    pub steps: Vec<StepRecord>,
    pub bifurcations: Vec<BifurcationRecord>,
    pub small_radii: Vec<SmallRadiusRecord>,
    pub links: Vec<LinkRecord>,
    /// Candidate vessels rejected for collision or leaving the domain.
    pub rejected: usize,
    pub phase_iterations: [usize; 3],
}

impl GrowthReport {
    pub fn total_iterations(&self) -> usize {
        self.phase_iterations.iter().sum()
    }
}

/// Result of a complete run.
#[derive(Debug, Clone)]
pub struct GrowthOutcome {
    /// Network clipped to the roi.
    pub network: VascularNetwork,
    /// Network on Ω before clipping.
    pub full_network: VascularNetwork,
    /// Final solve on the unclipped network.
    pub solution: CoupledSolution,
    pub grid: TissueGrid,
    pub report: GrowthReport,
    pub po2_roi: f64,
    /// mmHg.
    pub pressure_roi: f64,
    /// µg/s.
    pub exchange_rate: f64,
}

pub type Observer<'o> = Box<dyn FnMut(&StepRecord, &VascularNetwork) -> Result<()> + 'o>;

/// State of a growth run between phases.
pub struct GrowthRun<'o> {
    setup: GrowthSetup,
    grid: TissueGrid,
    net: VascularNetwork,
    index: OctantIndex,
    /// Last solved blood pressure per node; grown nodes inherit from their tip.
    pressures: Vec<f64>,
    rng: ChaCha8Rng,
    solution: Option<CoupledSolution>,
    report: GrowthReport,
    observer: Option<Observer<'o>>,
}

impl<'o> GrowthRun<'o> {
    pub fn new(setup: GrowthSetup, net: VascularNetwork) -> Result<Self> {
        setup.growth.validate()?;
        setup.model.validate()?;
        if setup.roi.overlap_volume(&setup.domain) < setup.roi.volume() * (1.0 - 1e-12) {
            return Err(Error::Validation("region of interest must lie inside the tissue domain".into()));
        }
        let grid = TissueGrid::new(setup.domain, setup.cells)?;
        let index = OctantIndex::build(&net, &setup.domain);
        let pressures = initial_pressures(&net);
        Ok(Self {
            rng: ChaCha8Rng::seed_from_u64(setup.seed),
            setup,
            grid,
            net,
            index,
            pressures,
            solution: None,
            report: GrowthReport::default(),
            observer: None,
        })
    }

    /// Called after every step with the step summary and the current network.
    pub fn with_observer(mut self, observer: Observer<'o>) -> Self {
        self.observer = Some(observer);
        self
    }

    pub fn network(&self) -> &VascularNetwork {
        &self.net
    }

    pub fn grid(&self) -> &TissueGrid {
        &self.grid
    }

    pub fn report(&self) -> &GrowthReport {
        &self.report
    }

    pub fn solution(&self) -> Option<&CoupledSolution> {
        self.solution.as_ref()
    }

    fn params(&self) -> &GrowthParameters {
        &self.setup.growth
    }

    fn evaluate(&mut self) -> Result<f64> {
        let sol = solve_coupled(&mut self.net, &self.grid, &self.setup.model, self.solution.as_ref())?;
        self.pressures = sol.flow.p_v.clone();
        let po2 = self.grid.region_average(&sol.oxygen.po2_t, &self.setup.roi);
        self.solution = Some(sol);
        Ok(po2)
    }

    fn interior_tips(&self) -> Vec<NodeId> {
        self.net.terminal_nodes(&self.setup.domain)
    }

    fn large_tips(&self) -> Vec<NodeId> {
        let thr = self.params().large_radius;
        self.interior_tips()
            .into_iter()
            .filter(|&n| {
                let s = self.net.terminal_segment(n).expect("terminal");
                self.net.segment(s).radius > thr
            })
            .collect()
    }

    fn finish_step(&mut self, step: StepRecord) -> Result<()> {
        log::debug!(
            "phase {} iteration {}: po2 {:?} grown {} links {} removed {} terminals {} segments {}",
            step.phase,
            step.iteration,
            step.po2_roi,
            step.grown,
            step.links,
            step.removed,
            step.terminals,
            step.segments
        );
        if let Some(obs) = self.observer.as_mut() {
            obs(&step, &self.net)?;
        }
        self.report.steps.push(step);
        Ok(())
    }

    /// Grows every terminal vessel above the large-radius threshold until the
    /// roi PO2 settles.
    pub fn run_phase1(&mut self) -> Result<()> {
        let mut old = 0.0;
        let mut j = 0;
        loop {
            j += 1;
            let wrap = wrap(1, j);
            let po2 = self.evaluate().map_err(wrap)?;
            let mut grown = 0;
            for tip in self.large_tips() {
                grown += self.grow_tip(tip, 1, j).map_err(wrap)?;
            }
            let remaining = self.large_tips().len();
            self.report.phase_iterations[0] = j;
            self.finish_step(StepRecord {
                phase: 1,
                iteration: j,
                po2_roi: Some(po2),
                grown,
                links: 0,
                removed: 0,
                terminals: self.interior_tips().len(),
                segments: self.net.segment_count(),
            })?;
            let rel = if po2 != 0.0 { ((po2 - old) / po2).abs() } else { f64::INFINITY };
            if rel < self.params().rel_change_p1 || j >= self.params().max_iter_p1 || remaining == 0 {
                return Ok(());
            }
            old = po2;
        }
    }

    /// Grows capillaries from every terminal in hypoxic control volumes and
    /// links terminals into existing vessels.
    pub fn run_phase2(&mut self) -> Result<()> {
        let mut old = 0.0;
        let mut j = 0;
        loop {
            j += 1;
            let wrap = wrap(2, j);
            let po2 = self.evaluate().map_err(wrap)?;
            let stop_po2 = self.params().po2_stop;
            let mut grown = 0;
            let mut links = 0;
            if po2 <= stop_po2 {
                let field = &self.solution.as_ref().expect("solved").oxygen.po2_t;
                let (cv, _) = control_volume_averages(&self.grid, field, &self.setup.roi, self.params().cv_per_axis);
                for tip in self.interior_tips() {
                    if cv.average_at(&self.net.position(tip)) > stop_po2 {
                        continue;
                    }
                    grown += self.grow_tip(tip, 2, j).map_err(wrap)?;
                }
                links = self.link_terminals(2);
            }
            self.report.phase_iterations[1] = j;
            self.finish_step(StepRecord {
                phase: 2,
                iteration: j,
                po2_roi: Some(po2),
                grown,
                links,
                removed: 0,
                terminals: self.interior_tips().len(),
                segments: self.net.segment_count(),
            })?;
            if (po2 - old).abs() < self.params().change_p2 || po2 > stop_po2 || j >= self.params().max_iter_p2 {
                return Ok(());
            }
            old = po2;
        }
    }

    /// Removes terminal vessels ending inside the roi and links the new
    /// terminals, until few terminals remain.
    pub fn run_phase3(&mut self) -> Result<()> {
        let mut j = 0;
        loop {
            j += 1;
            let removed = self.prune_terminals();
            let links = self.link_terminals(3);
            let roi = self.setup.roi;
            let terminals = self
                .interior_tips()
                .into_iter()
                .filter(|&n| roi.contains(&self.net.position(n)))
                .count();
            self.report.phase_iterations[2] = j;
            self.finish_step(StepRecord {
                phase: 3,
                iteration: j,
                po2_roi: None,
                grown: 0,
                links,
                removed,
                terminals,
                segments: self.net.segment_count(),
            })?;
            if terminals < self.params().p3_terminal_stop || j >= self.params().max_iter_p3 {
                return Ok(());
            }
        }
    }

    /// Final solve on Ω and clipping to the roi.
    pub fn finish(mut self) -> Result<GrowthOutcome> {
        let j = self.report.total_iterations() + 1;
        let po2_roi = self.evaluate().map_err(wrap(4, j))?;
        let sol = self.solution.take().expect("solved");
        let pressure_roi = pa_to_mmhg(self.grid.region_average(&sol.flow.p_t, &self.setup.roi));
        let network = clip_to_region(&self.net, &self.setup.roi, &sol.flow.p_v, &sol.oxygen.po2_v)?;
        Ok(GrowthOutcome {
            network,
            full_network: self.net,
            exchange_rate: sol.flow.f_tv,
            solution: sol,
            grid: self.grid,
            report: self.report,
            po2_roi,
            pressure_roi,
        })
    }

    /// Grows one terminal. Returns the number of vessels added.
    fn grow_tip(&mut self, tip: NodeId, phase: u8, iteration: usize) -> Result<usize> {
        let seg = self
            .net
            .terminal_segment(tip)
            .ok_or_else(|| Error::Topology(format!("node {tip} is not terminal")))?;
        let parent_radius = self.net.segment(seg).radius;
        let other = self.net.segment(seg).other(tip);
        let tip_pos = self.net.position(tip);
        let d_k = (tip_pos - self.net.position(other)).normalize();
        let field = &self.solution.as_ref().expect("solved").oxygen.po2_t;
        let grad = self.grid.gradient_at(field, &tip_pos);
        let params = self.setup.growth;
        let d_g = growth_direction(&grad, &d_k, params.lambda_g);
        let boundary = self.net.node(tip).boundary;

        let r = sample_length_ratio(&mut self.rng, &params);
        let mut branches: Vec<(f64, Point3, f64)> = Vec::with_capacity(2);
        let mut record = None;
        if bifurcation_decision(r, &params) {
            let (mut r1, mut r2) = murray_branch_radii(parent_radius, &mut self.rng, &params);
            if phase == 2 {
                r1 = self.redraw_small(r1, parent_radius);
                r2 = self.redraw_small(r2, parent_radius);
            }
            let angles = bifurcation_angles(parent_radius, r1, r2);
            let dirs = build_bifurcation_directions(&d_k, &d_g, angles.phi1, angles.phi2, &mut self.rng);
            let l1 = sample_length(r1, &mut self.rng, &params);
            let l2 = sample_length(r2, &mut self.rng, &params);
            branches.push((r1, dirs.d1, l1));
            branches.push((r2, dirs.d2, l2));
            record = Some(BifurcationRecord {
                phase,
                iteration,
                parent_radius,
                radii: [r1, r2],
                parent_direction: d_k.into(),
                gradient_direction: d_g.into(),
                directions: [dirs.d1.into(), dirs.d2.into()],
                normal: dirs.normal.into(),
                kept: dirs.kept,
                phi: [angles.phi1, angles.phi2],
                clamped: angles.clamped,
                accepted: [false; 2],
            });
        } else {
            let mut radius = parent_radius;
            if phase == 2 {
                radius = self.redraw_small(radius, parent_radius);
            }
            branches.push((radius, d_g, parent_radius * r));
        }

        let mut added = 0;
        let mut accepted = [false; 2];
        for (i, (radius, dir, len)) in branches.into_iter().enumerate() {
            let end = tip_pos + dir * len;
            if !self.setup.domain.contains(&end) {
                self.report.rejected += 1;
                continue;
            }
            let cand = Candidate { from: tip, to: Endpoint::Point(end), radius };
            if check_and_insert(&mut self.net, &mut self.index, &cand, boundary).is_some() {
                self.pressures.push(self.pressures[tip]);
                accepted[i] = true;
                added += 1;
            } else {
                self.report.rejected += 1;
            }
        }
        if added > 0 {
            self.net.set_boundary(tip, None);
        }
        if let Some(mut rec) = record {
            rec.accepted = accepted;
            self.report.bifurcations.push(rec);
        }
        Ok(added)
    }

    fn redraw_small(&mut self, radius: f64, parent: f64) -> f64 {
        if radius >= self.setup.growth.small_radius_switch {
            return radius;
        }
        let (raw, r) = sample_small_radius(parent, &mut self.rng, &self.setup.growth);
        self.report.small_radii.push(SmallRadiusRecord { raw, radius: r, parent });
        r
    }

    /// Tries to connect every interior terminal to a node inside its forward
    /// cone. Returns the number of links made.
    fn link_terminals(&mut self, phase: u8) -> usize {
        let params = self.setup.growth;
        let cos_half = (params.cone_angle / 2.0).cos();
        let domain = self.setup.domain;
        let mut made = 0;
        for x in self.interior_tips() {
            if self.net.degree(x) != 1 {
                continue;
            }
            let seg = self.net.terminal_segment(x).expect("terminal");
            let rx = self.net.segment(seg).radius;
            let parent = self.net.segment(seg).other(x);
            let px = self.net.position(x);
            let axis = (px - self.net.position(parent)).normalize();
            let max_dist = sample_link_distance(&mut self.rng, &params);
            let mut cands: Vec<(NodeId, f64, f64)> = Vec::new();
            for y in 0..self.net.node_count() {
                if y == x || y == parent {
                    continue;
                }
                let v = self.net.position(y) - px;
                let dist = v.norm();
                if !(dist > 0.0) || dist > max_dist || v.dot(&axis) < cos_half * dist {
                    continue;
                }
                cands.push((y, dist, (self.pressures[x] - self.pressures[y]).abs()));
            }
            if cands.is_empty() {
                continue;
            }
            let dp_max = cands.iter().map(|c| c.2).fold(0.0, f64::max);
            let mut scored: Vec<(f64, NodeId, f64)> = cands
                .into_iter()
                .map(|(y, dist, dp)| {
                    let dp_term = if dp_max > 0.0 { dp / dp_max } else { 0.0 };
                    (dp_term - dist / max_dist, y, dist)
                })
                .collect();
            scored.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
            for (_, y, dist) in scored {
                let inc = self.net.incident(y);
                let ry = inc.iter().map(|&s| self.net.segment(s).radius).sum::<f64>() / inc.len() as f64;
                let radius = 0.5 * (rx + ry);
                let y_was_tip = self.net.degree(y) == 1 && domain.contains_strictly(&self.net.position(y));
                let cand = Candidate { from: x, to: Endpoint::Node(y), radius };
                if check_and_insert(&mut self.net, &mut self.index, &cand, None).is_some() {
                    self.net.set_boundary(x, None);
                    if y_was_tip {
                        self.net.set_boundary(y, None);
                    }
                    self.report.links.push(LinkRecord { phase, from: x, to: y, radius, distance: dist, max_distance: max_dist });
                    made += 1;
                    break;
                }
                self.report.rejected += 1;
            }
        }
        made
    }

    /// Removes terminal vessels whose tip lies in the roi. A node left as a
    /// new terminal takes over the boundary data of a removed tip.
    fn prune_terminals(&mut self) -> usize {
        let roi = self.setup.roi;
        let tips: Vec<NodeId> = self
            .interior_tips()
            .into_iter()
            .filter(|&n| roi.contains(&self.net.position(n)))
            .collect();
        if tips.is_empty() {
            return 0;
        }
        let mut segs = Vec::with_capacity(tips.len());
        let mut lost = vec![0usize; self.net.node_count()];
        let mut inherit: Vec<Option<BoundaryData>> = vec![None; self.net.node_count()];
        for &t in &tips {
            let s = self.net.terminal_segment(t).expect("terminal");
            if segs.contains(&s) {
                continue;
            }
            segs.push(s);
            let seg = self.net.segment(s);
            lost[seg.node_a] += 1;
            lost[seg.node_b] += 1;
            let y = seg.other(t);
            if inherit[y].is_none() {
                inherit[y] = self.net.node(t).boundary;
            }
        }
        for y in 0..self.net.node_count() {
            let left = self.net.degree(y) - lost[y];
            if left == 1 && self.net.node(y).boundary.is_none() {
                if let Some(b) = inherit[y] {
                    self.net.set_boundary(y, Some(b));
                }
            }
        }
        let map = self.net.remove_segments(&segs);
        let mut pressures = vec![0.0; self.net.node_count()];
        for (old, new) in map.iter().enumerate() {
            if let Some(n) = new {
                pressures[*n] = self.pressures[old];
            }
        }
        self.pressures = pressures;
        self.index = OctantIndex::build(&self.net, &self.setup.domain);
        segs.len()
    }
}

fn wrap(phase: u8, iteration: usize) -> impl Fn(Error) -> Error + Copy {
    move |e| Error::Growth { phase, iteration, source: Box::new(e) }
}

/// Boundary pressures where known, their mean elsewhere.
fn initial_pressures(net: &VascularNetwork) -> Vec<f64> {
    let known: Vec<f64> = net.boundary_nodes().map(|n| n.boundary.expect("boundary").pressure).collect();
    let mean = if known.is_empty() { 0.0 } else { known.iter().sum::<f64>() / known.len() as f64 };
    net.nodes()
        .iter()
        .map(|n| n.boundary.map_or(mean, |b| b.pressure))
        .collect()
}

/// Keeps the part of every segment inside `region`. Crossing segments are
/// cut at the box face; each cut point becomes a boundary node carrying the
/// solved pressure and PO2 of the nearer original endpoint.
pub fn clip_to_region(net: &VascularNetwork, region: &DomainBox, p_v: &[f64], po2_v: &[f64]) -> Result<VascularNetwork> {
    if p_v.len() != net.node_count() || po2_v.len() != net.node_count() {
        return Err(Error::State("clip needs one pressure and PO2 per node".into()));
    }
    let mut out = VascularNetwork::new();
    let mut kept: Vec<Option<NodeId>> = vec![None; net.node_count()];
    for seg in net.segments() {
        let (a, b) = net.endpoints(seg.id);
        let Some((t0, t1)) = clip_parameters(&a, &b, region) else {
            continue;
        };
        if (t1 - t0) * (b - a).norm() < 1e-12 {
            continue;
        }
        let mut end = |t: f64, at_node: bool, node: NodeId, near: NodeId, out: &mut VascularNetwork| -> NodeId {
            if at_node {
                *kept[node].get_or_insert_with(|| out.add_node(net.position(node), net.node(node).boundary))
            } else {
                let p = a + (b - a) * t;
                out.add_node(p, Some(BoundaryData { pressure: p_v[near], po2: Some(po2_v[near]) }))
            }
        };
        let near0 = if t0 <= 0.5 { seg.node_a } else { seg.node_b };
        let near1 = if t1 < 0.5 { seg.node_a } else { seg.node_b };
        let na = end(t0, t0 == 0.0, seg.node_a, near0, &mut out);
        let nb = end(t1, t1 == 1.0, seg.node_b, near1, &mut out);
        out.add_segment(na, nb, seg.radius)?;
    }
    Ok(out)
}

/// Parameter interval of the segment a→b inside the closed box.
fn clip_parameters(a: &Point3, b: &Point3, region: &DomainBox) -> Option<(f64, f64)> {
    let mut t0 = 0.0f64;
    let mut t1 = 1.0f64;
    let d = b - a;
    for ax in 0..3 {
        if d[ax] == 0.0 {
            if a[ax] < region.lower[ax] || a[ax] > region.upper[ax] {
                return None;
            }
            continue;
        }
        let mut lo = (region.lower[ax] - a[ax]) / d[ax];
        let mut hi = (region.upper[ax] - a[ax]) / d[ax];
        if lo > hi {
            std::mem::swap(&mut lo, &mut hi);
        }
        t0 = t0.max(lo);
        t1 = t1.min(hi);
    }
    (t0 <= t1).then_some((t0, t1))
}

/// Runs all three phases and the final solve.
pub fn generate(setup: GrowthSetup, net: VascularNetwork) -> Result<GrowthOutcome> {
    let mut run = GrowthRun::new(setup, net)?;
    run.run_phase1()?;
    run.run_phase2()?;
    run.run_phase3()?;
    run.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::enlarge_domain;
    use crate::growth::collision_violations;
    use crate::units::MILLIMETER;

    fn um(x: f64, y: f64, z: f64) -> Point3 {
        Point3::new(x, y, z) * 1e-6
    }

    #[test]
    fn clip_cuts_crossing_segment() {
        let mut net = VascularNetwork::new();
        let a = net.add_node(um(-50.0, 50.0, 50.0), Some(BoundaryData { pressure: 10.0, po2: Some(70.0) }));
        let b = net.add_node(um(30.0, 50.0, 50.0), None);
        let c = net.add_node(um(80.0, 50.0, 50.0), None);
        net.add_segment(a, b, 4e-6).unwrap();
        net.add_segment(b, c, 4e-6).unwrap();
        let roi = DomainBox::new(um(0.0, 0.0, 0.0), um(100.0, 100.0, 100.0)).unwrap();
        let clipped = clip_to_region(&net, &roi, &[10.0, 8.0, 6.0], &[70.0, 60.0, 50.0]).unwrap();
        assert_eq!(clipped.segment_count(), 2);
        let cut = clipped.nodes().iter().find(|n| n.position[0].abs() < 1e-12).expect("cut node");
        // Cut at x = 0 is nearer to b (t = 0.625).
        assert_eq!(cut.boundary, Some(BoundaryData { pressure: 8.0, po2: Some(60.0) }));
        for n in clipped.nodes() {
            assert!(roi.contains(&n.position));
        }
        let total: f64 = (0..clipped.segment_count()).map(|s| clipped.segment_length(s)).sum();
        assert!((total - 80e-6).abs() < 1e-15);
    }

    #[test]
    fn clip_drops_outside() {
        let mut net = VascularNetwork::new();
        let a = net.add_node(um(-50.0, -50.0, 50.0), None);
        let b = net.add_node(um(-10.0, -50.0, 50.0), None);
        net.add_segment(a, b, 4e-6).unwrap();
        let roi = DomainBox::new(um(0.0, 0.0, 0.0), um(100.0, 100.0, 100.0)).unwrap();
        let clipped = clip_to_region(&net, &roi, &[0.0; 2], &[0.0; 2]).unwrap();
        assert!(clipped.is_empty());
    }

    fn small_setup(seed: u64) -> (GrowthSetup, VascularNetwork) {
        let roi = DomainBox::cube(0.0, 0.3 * MILLIMETER).unwrap();
        let domain = enlarge_domain(&roi, 0.1);
        let mut net = VascularNetwork::new();
        let art = BoundaryData { pressure: 8000.0, po2: Some(75.0) };
        let ven = BoundaryData { pressure: 3500.0, po2: Some(38.0) };
        let a0 = net.add_node(um(-30.0, 100.0, 150.0), Some(art));
        let a1 = net.add_node(um(100.0, 100.0, 150.0), Some(BoundaryData { pressure: 7500.0, ..art }));
        let v0 = net.add_node(um(330.0, 200.0, 150.0), Some(ven));
        let v1 = net.add_node(um(200.0, 200.0, 150.0), Some(BoundaryData { pressure: 4000.0, ..ven }));
        net.add_segment(a0, a1, 6e-6).unwrap();
        net.add_segment(v0, v1, 7e-6).unwrap();
        let setup = GrowthSetup {
            domain,
            roi,
            cells: [8, 8, 8],
            model: ModelParameters::default(),
            growth: GrowthParameters { max_iter_p1: 3, max_iter_p2: 3, max_iter_p3: 3, ..Default::default() },
            seed,
        };
        (setup, net)
    }

    #[test]
    fn small_run_is_collision_free_and_deterministic() {
        let (setup, net) = small_setup(11);
        let mut run = GrowthRun::new(setup.clone(), net.clone()).unwrap();
        run.run_phase1().unwrap();
        run.run_phase2().unwrap();
        assert!(collision_violations(run.network()).is_empty());
        run.run_phase3().unwrap();
        assert!(collision_violations(run.network()).is_empty());
        let a = run.finish().unwrap();
        let b = generate(setup, net).unwrap();
        assert_eq!(a.network, b.network);
        assert_eq!(a.po2_roi.to_bits(), b.po2_roi.to_bits());
        assert!(a.network.check_adjacency());
        let total = a.report.total_iterations();
        assert!(total >= 3 && total <= 9);
    }

    #[test]
    fn phase1_without_large_tips_is_one_evaluation() {
        let (mut setup, mut net) = small_setup(3);
        setup.growth.large_radius = 10e-6;
        net.set_radius(0, 4e-6);
        let before = net.clone();
        let mut run = GrowthRun::new(setup, net).unwrap();
        run.run_phase1().unwrap();
        assert_eq!(run.report().phase_iterations[0], 1);
        assert_eq!(run.network().segment_count(), before.segment_count());
    }

    #[test]
    fn grown_tips_keep_inherited_boundary() {
        let (setup, net) = small_setup(5);
        let mut run = GrowthRun::new(setup, net).unwrap();
        run.run_phase1().unwrap();
        let net = run.network();
        for n in net.nodes() {
            if net.degree(n.id) > 1 {
                assert!(n.boundary.is_none(), "inner node {} kept Dirichlet data", n.id);
            }
        }
        for b in &run.report().bifurcations {
            for d in b.directions {
                let d = Point3::from(d);
                assert!((d.norm() - 1.0).abs() < 1e-12);
            }
        }
    }
}
