//! Uniform cell-centred hexahedral mesh over the tissue box, and the
//! sampled vessel-surface measure that couples it to the 1D network.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{any_perpendicular, DomainBox, Point3};
use crate::network::{SegmentId, VascularNetwork};

#[derive(Debug, Clone, PartialEq)]
pub struct TissueGrid {
    bounds: DomainBox,
    counts: [usize; 3],
    spacing: Point3,
}

/// Builds a uniform grid; every axis needs at least two cells.
pub fn build_grid(bounds: DomainBox, counts: [usize; 3]) -> Result<TissueGrid> {
    TissueGrid::new(bounds, counts)
}

impl TissueGrid {
    pub fn new(bounds: DomainBox, counts: [usize; 3]) -> Result<Self> {
        if counts.iter().any(|&c| c < 2) {
            return Err(Error::Validation(format!(
                "grid needs at least 2 cells per axis, got {counts:?}"
            )));
        }
        let e = bounds.extent();
        let spacing = Point3::new(
            e.x / counts[0] as f64,
            e.y / counts[1] as f64,
            e.z / counts[2] as f64,
        );
        Ok(Self {
            bounds,
            counts,
            spacing,
        })
    }

    pub fn bounds(&self) -> &DomainBox {
        &self.bounds
    }

    pub fn counts(&self) -> [usize; 3] {
        self.counts
    }

    pub fn spacing(&self) -> Point3 {
        self.spacing
    }

    pub fn min_spacing(&self) -> f64 {
        self.spacing.min()
    }

    pub fn cell_count(&self) -> usize {
        self.counts.iter().product()
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing.x * self.spacing.y * self.spacing.z
    }

    /// Area of a face normal to `axis`.
    pub fn face_area(&self, axis: usize) -> f64 {
        let h = self.spacing;
        match axis {
            0 => h.y * h.z,
            1 => h.x * h.z,
            _ => h.x * h.y,
        }
    }

    /// Linear index, x fastest.
    pub fn index(&self, ijk: [usize; 3]) -> usize {
        ijk[0] + self.counts[0] * (ijk[1] + self.counts[1] * ijk[2])
    }

    pub fn ijk(&self, idx: usize) -> [usize; 3] {
        let nx = self.counts[0];
        let ny = self.counts[1];
        [idx % nx, (idx / nx) % ny, idx / (nx * ny)]
    }

    pub fn cell_center(&self, idx: usize) -> Point3 {
        let [i, j, k] = self.ijk(idx);
        self.bounds.lower
            + Point3::new(
                (i as f64 + 0.5) * self.spacing.x,
                (j as f64 + 0.5) * self.spacing.y,
                (k as f64 + 0.5) * self.spacing.z,
            )
    }

    pub fn cell_box(&self, idx: usize) -> DomainBox {
        let c = self.cell_center(idx);
        let half = self.spacing * 0.5;
        DomainBox {
            lower: c - half,
            upper: c + half,
        }
    }

    /// Cell containing `p`, or `None` outside the grid.
    pub fn locate(&self, p: &Point3) -> Option<usize> {
        if !self.bounds.contains(p) {
            return None;
        }
        Some(self.locate_clamped(p).0)
    }

    /// Cell containing `p` after clamping to the grid; the flag reports
    /// whether clamping was needed.
    pub fn locate_clamped(&self, p: &Point3) -> (usize, bool) {
        let mut ijk = [0usize; 3];
        let mut clamped = false;
        for a in 0..3 {
            let t = (p[a] - self.bounds.lower[a]) / self.spacing[a];
            let n = self.counts[a];
            if !(t >= 0.0 && t <= n as f64) {
                clamped = true;
            }
            ijk[a] = if t.is_nan() || t < 0.0 {
                0
            } else {
                (t.floor() as usize).min(n - 1)
            };
        }
        (self.index(ijk), clamped)
    }

    /// Neighbour across the face of `idx` in direction `dir` (+1 or -1)
    /// along `axis`.
    pub fn neighbor(&self, idx: usize, axis: usize, dir: i32) -> Option<usize> {
        let mut ijk = self.ijk(idx);
        if dir > 0 {
            if ijk[axis] + 1 >= self.counts[axis] {
                return None;
            }
            ijk[axis] += 1;
        } else {
            if ijk[axis] == 0 {
                return None;
            }
            ijk[axis] -= 1;
        }
        Some(self.index(ijk))
    }

    /// Interior faces as (lower cell, upper cell, axis), each listed once.
    pub fn interior_faces(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        (0..self.cell_count()).flat_map(move |c| {
            (0..3).filter_map(move |axis| self.neighbor(c, axis, 1).map(|nb| (c, nb, axis)))
        })
    }

    /// Central-difference gradient of a cell field at the cell containing `p`.
    /// One-sided at the grid boundary.
    pub fn gradient_at(&self, field: &[f64], p: &Point3) -> Point3 {
        let (c, _) = self.locate_clamped(p);
        let mut g = Point3::zeros();
        for axis in 0..3 {
            let hi = self.neighbor(c, axis, 1);
            let lo = self.neighbor(c, axis, -1);
            let h = self.spacing[axis];
            g[axis] = match (lo, hi) {
                (Some(l), Some(u)) => (field[u] - field[l]) / (2.0 * h),
                (None, Some(u)) => (field[u] - field[c]) / h,
                (Some(l), None) => (field[c] - field[l]) / h,
                (None, None) => 0.0,
            };
        }
        g
    }

    /// Volume-weighted mean of a cell field over `region`.
    pub fn region_average(&self, field: &[f64], region: &DomainBox) -> f64 {
        let (mut num, mut vol) = (0.0, 0.0);
        for c in self.cells_overlapping(region) {
            let w = self.cell_box(c).overlap_volume(region);
            num += w * field[c];
            vol += w;
        }
        if vol > 0.0 {
            num / vol
        } else {
            0.0
        }
    }

    /// Cells whose boxes overlap `region` with positive volume.
    pub fn cells_overlapping(&self, region: &DomainBox) -> Vec<usize> {
        let mut range = [(0usize, 0usize); 3];
        for a in 0..3 {
            let lo = ((region.lower[a] - self.bounds.lower[a]) / self.spacing[a]).floor();
            let hi = ((region.upper[a] - self.bounds.lower[a]) / self.spacing[a]).ceil();
            let n = self.counts[a] as f64;
            range[a] = (lo.clamp(0.0, n) as usize, hi.clamp(0.0, n) as usize);
        }
        let mut out = Vec::new();
        for k in range[2].0..range[2].1 {
            for j in range[1].0..range[1].1 {
                for i in range[0].0..range[0].1 {
                    let c = self.index([i, j, k]);
                    if self.cell_box(c).overlap_volume(region) > 0.0 {
                        out.push(c);
                    }
                }
            }
        }
        out
    }
}

/// One quadrature point group: all angular samples of one ring that fall in
/// the same cell, merged.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingSample {
    pub cell: usize,
    pub ring: usize,
    /// Arc length along the segment, measured from `node_a`.
    pub s: f64,
    /// Lateral surface area, m².
    pub area: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SegmentCoupling {
    pub length: f64,
    pub n_axial: usize,
    pub n_angular: usize,
    /// Ordered by ring.
    pub samples: Vec<CouplingSample>,
}

impl SegmentCoupling {
    pub fn total_area(&self) -> f64 {
        self.samples.iter().map(|s| s.area).sum()
    }

    /// Hat-function weights of the two segment nodes at arc length `s`.
    pub fn weights(&self, s: f64) -> (f64, f64) {
        let t = s / self.length;
        (1.0 - t, t)
    }

    fn ring(&self, ring: usize) -> &[CouplingSample] {
        let start = self.samples.partition_point(|x| x.ring < ring);
        let end = self.samples.partition_point(|x| x.ring <= ring);
        &self.samples[start..end]
    }
}

/// How finely each vessel surface is sampled.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceSampling {
    /// Rings per segment; `None` picks `max(4, 2·ceil(l/h))`.
    pub n_axial: Option<usize>,
    pub n_angular: usize,
}

impl Default for SurfaceSampling {
    fn default() -> Self {
        Self {
            n_axial: None,
            n_angular: 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceCoupling {
    pub segments: Vec<SegmentCoupling>,
    /// Number of raw samples that fell outside the grid and were clamped.
    pub clamped_samples: usize,
}

pub fn build_surface_coupling(
    grid: &TissueGrid,
    net: &VascularNetwork,
    sampling: SurfaceSampling,
) -> Result<SurfaceCoupling> {
    SurfaceCoupling::build(grid, net, sampling)
}

impl SurfaceCoupling {
    pub fn build(grid: &TissueGrid, net: &VascularNetwork, sampling: SurfaceSampling) -> Result<Self> {
        if sampling.n_angular < 2 || sampling.n_axial.is_some_and(|n| n < 2) {
            return Err(Error::Validation(
                "surface sampling needs at least 2 axial and 2 angular samples".into(),
            ));
        }
        let h = grid.min_spacing();
        let per_segment: Vec<(SegmentCoupling, usize)> = net
            .segments()
            .par_iter()
            .map(|seg| {
                let (a, b) = net.endpoints(seg.id);
                let axis = b - a;
                let l = axis.norm();
                let d = axis / l;
                let n_ax = sampling
                    .n_axial
                    .unwrap_or_else(|| 4.max(2 * (l / h).ceil() as usize));
                let n_ang = sampling.n_angular;
                let e1 = any_perpendicular(&d);
                let e2 = d.cross(&e1);
                let area = 2.0 * std::f64::consts::PI * seg.radius * l / (n_ax * n_ang) as f64;
                let mut samples = Vec::with_capacity(n_ax * 2);
                let mut clamped = 0;
                let mut ring_cells: Vec<(usize, usize)> = Vec::with_capacity(n_ang);
                for i in 0..n_ax {
                    let s = (i as f64 + 0.5) * l / n_ax as f64;
                    let centre = a + d * s;
                    ring_cells.clear();
                    for j in 0..n_ang {
                        let th = (j as f64 + 0.5) * 2.0 * std::f64::consts::PI / n_ang as f64;
                        let p = centre + (e1 * th.cos() + e2 * th.sin()) * seg.radius;
                        let (c, was_clamped) = grid.locate_clamped(&p);
                        clamped += was_clamped as usize;
                        match ring_cells.iter_mut().find(|(cell, _)| *cell == c) {
                            Some(entry) => entry.1 += 1,
                            None => ring_cells.push((c, 1)),
                        }
                    }
                    for &(cell, count) in &ring_cells {
                        samples.push(CouplingSample {
                            cell,
                            ring: i,
                            s,
                            area: area * count as f64,
                        });
                    }
                }
                (
                    SegmentCoupling {
                        length: l,
                        n_axial: n_ax,
                        n_angular: n_ang,
                        samples,
                    },
                    clamped,
                )
            })
            .collect();
        let clamped_samples = per_segment.iter().map(|x| x.1).sum();
        if clamped_samples > 0 {
            log::debug!("{clamped_samples} surface samples clamped onto the grid");
        }
        Ok(Self {
            segments: per_segment.into_iter().map(|x| x.0).collect(),
            clamped_samples,
        })
    }

    pub fn total_area(&self) -> f64 {
        self.segments.iter().map(|s| s.total_area()).sum()
    }

    pub fn segment(&self, seg: SegmentId) -> &SegmentCoupling {
        &self.segments[seg]
    }

    /// Area-weighted mean of `field` over the sample ring nearest to `s`.
    pub fn circumferential_average(&self, field: &[f64], seg: SegmentId, s: f64) -> f64 {
        let sc = &self.segments[seg];
        let ring = ((s / sc.length * sc.n_axial as f64).floor().max(0.0) as usize).min(sc.n_axial - 1);
        let samples = sc.ring(ring);
        let (num, den) = samples
            .iter()
            .fold((0.0, 0.0), |(n, d), x| (n + x.area * field[x.cell], d + x.area));
        num / den
    }
}

/// Value of a nodal 1D field on the wall ring at arc length `s`.
pub fn project_1d_to_surface(p_v: &[f64], net: &VascularNetwork, seg: SegmentId, s: f64) -> f64 {
    let sg = net.segment(seg);
    let t = s / net.segment_length(seg);
    (1.0 - t) * p_v[sg.node_a] + t * p_v[sg.node_b]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::enlarge_domain;
    use crate::units::MILLIMETER;
    use proptest::prelude::*;

    fn unit_grid(n: usize) -> TissueGrid {
        build_grid(DomainBox::cube(0.0, 1.0).unwrap(), [n, n, n]).unwrap()
    }

    fn single_vessel(a: Point3, b: Point3, r: f64) -> VascularNetwork {
        VascularNetwork::from_parts([(a, None), (b, None)], [(0, 1, r)]).unwrap()
    }

    #[test]
    fn unit_box_two_cells_per_axis() {
        let g = unit_grid(2);
        assert_eq!(g.cell_count(), 8);
        assert!((g.cell_volume() - 0.125).abs() < 1e-15);
    }

    #[test]
    fn table_box_spacing() {
        let roi = DomainBox::new(
            Point3::new(0.038, 8.8e-4, 8.8e-4) * MILLIMETER,
            Point3::new(1.13, 1.05, 1.50) * MILLIMETER,
        )
        .unwrap();
        let omega = enlarge_domain(&roi, 0.1);
        let g = build_grid(omega, [40, 40, 50]).unwrap();
        let h = g.spacing() / 1e-6;
        // extent * 1.2 / count, in µm
        let expected = [1.092 * 1.2 / 40.0, 1.04912 * 1.2 / 40.0, 1.49912 * 1.2 / 50.0];
        for a in 0..3 {
            assert!((h[a] - expected[a] * 1000.0).abs() < 1e-9, "axis {a}: {}", h[a]);
        }
        assert!((h.x - 32.76).abs() < 0.01);
        assert!((h.z - 35.98).abs() < 0.01);
    }

    #[test]
    fn too_few_cells_rejected() {
        let b = DomainBox::cube(0.0, 1.0).unwrap();
        assert!(matches!(build_grid(b, [1, 2, 2]), Err(Error::Validation(_))));
    }

    #[test]
    fn index_round_trip() {
        let g = build_grid(DomainBox::cube(0.0, 1.0).unwrap(), [3, 4, 5]).unwrap();
        for c in 0..g.cell_count() {
            assert_eq!(g.index(g.ijk(c)), c);
            assert_eq!(g.locate(&g.cell_center(c)), Some(c));
        }
    }

    #[test]
    fn vessel_inside_one_cell_couples_to_it() {
        let g = unit_grid(4);
        let c = g.index([1, 2, 1]);
        let centre = g.cell_center(c);
        let net = single_vessel(
            centre - Point3::new(0.05, 0.0, 0.0),
            centre + Point3::new(0.05, 0.0, 0.0),
            0.01,
        );
        let sc = build_surface_coupling(&g, &net, SurfaceSampling::default()).unwrap();
        let expected = 2.0 * std::f64::consts::PI * 0.01 * 0.1;
        assert!(sc.segments[0].samples.iter().all(|x| x.cell == c));
        assert!((sc.total_area() - expected).abs() <= 1e-12 * expected);
    }

    #[test]
    fn crossing_face_splits_area_evenly() {
        let g = unit_grid(2);
        let net = single_vessel(Point3::new(0.3, 0.25, 0.25), Point3::new(0.7, 0.25, 0.25), 0.01);
        let sampling = SurfaceSampling {
            n_axial: Some(10),
            n_angular: 8,
        };
        let sc = build_surface_coupling(&g, &net, sampling).unwrap();
        let mut left = 0.0;
        let mut right = 0.0;
        for x in &sc.segments[0].samples {
            if g.ijk(x.cell)[0] == 0 {
                left += x.area;
            } else {
                right += x.area;
            }
        }
        let quantum = sc.total_area() / 80.0;
        assert!((left - right).abs() <= quantum);
    }

    #[test]
    fn samples_outside_are_clamped_and_counted() {
        let g = unit_grid(2);
        let net = single_vessel(Point3::new(0.0, 0.5, 0.5), Point3::new(0.4, 0.5, 0.5), 0.01);
        let sc = build_surface_coupling(&g, &net, SurfaceSampling::default()).unwrap();
        assert_eq!(sc.clamped_samples, 0);
        let net = single_vessel(Point3::new(0.1, 0.0, 0.5), Point3::new(0.4, 0.0, 0.5), 0.01);
        let sc = build_surface_coupling(&g, &net, SurfaceSampling::default()).unwrap();
        assert!(sc.clamped_samples > 0);
        let expected = 2.0 * std::f64::consts::PI * 0.01 * 0.3;
        assert!((sc.total_area() - expected).abs() <= 1e-12 * expected);
    }

    #[test]
    fn circumferential_average_of_constant() {
        let g = unit_grid(4);
        let net = single_vessel(Point3::new(0.1, 0.5, 0.5), Point3::new(0.9, 0.5, 0.5), 0.02);
        let sc = build_surface_coupling(&g, &net, SurfaceSampling::default()).unwrap();
        let field = vec![3.25; g.cell_count()];
        for s in [0.0, 0.2, 0.8] {
            assert_eq!(sc.circumferential_average(&field, 0, s), 3.25);
        }
    }

    #[test]
    fn circumferential_average_of_linear_field() {
        let g = unit_grid(10);
        let net = single_vessel(Point3::new(0.05, 0.5, 0.5), Point3::new(0.95, 0.5, 0.5), 0.02);
        let sc = build_surface_coupling(&g, &net, SurfaceSampling::default()).unwrap();
        let field: Vec<f64> = (0..g.cell_count()).map(|c| g.cell_center(c).x).collect();
        for s in [0.1, 0.45, 0.77] {
            let v = sc.circumferential_average(&field, 0, s);
            assert!((v - (0.05 + s)).abs() <= g.spacing().x);
        }
    }

    #[test]
    fn two_half_rings_average_to_half() {
        // Vessel on the plane y = 0.5 separating two cell layers.
        let g = unit_grid(2);
        let net = single_vessel(Point3::new(0.1, 0.5, 0.25), Point3::new(0.4, 0.5, 0.25), 0.01);
        let sc = build_surface_coupling(&g, &net, SurfaceSampling::default()).unwrap();
        let field: Vec<f64> = (0..8).map(|c| if g.ijk(c)[1] == 0 { 0.0 } else { 1.0 }).collect();
        let v = sc.circumferential_average(&field, 0, 0.15);
        assert!((v - 0.5).abs() <= 1.0 / 8.0);
    }

    #[test]
    fn projection_interpolates_nodal_values() {
        let net = single_vessel(Point3::zeros(), Point3::new(2.0, 0.0, 0.0), 0.1);
        let p = [10.0, 20.0];
        assert_eq!(project_1d_to_surface(&p, &net, 0, 1.0), 15.0);
        assert_eq!(project_1d_to_surface(&p, &net, 0, 0.0), 10.0);
        assert_eq!(project_1d_to_surface(&p, &net, 0, 2.0), 20.0);
    }

    #[test]
    fn region_average_of_octant_indicator() {
        let g = unit_grid(6);
        let roi = DomainBox::cube(0.0, 1.0).unwrap();
        let field: Vec<f64> = (0..g.cell_count())
            .map(|c| {
                let p = g.cell_center(c);
                if p.x < 0.5 && p.y < 0.5 && p.z < 0.5 { 1.0 } else { 0.0 }
            })
            .collect();
        assert!((g.region_average(&field, &roi) - 0.125).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn per_segment_area_is_conserved(
            ax in 0.05f64..0.95, ay in 0.05f64..0.95, az in 0.05f64..0.95,
            bx in 0.05f64..0.95, by in 0.05f64..0.95, bz in 0.05f64..0.95,
            r in 0.001f64..0.05, n in 2usize..7, nang in 2usize..12,
        ) {
            let a = Point3::new(ax, ay, az);
            let b = Point3::new(bx, by, bz);
            prop_assume!((b - a).norm() > 1e-3);
            let net = single_vessel(a, b, r);
            let g = unit_grid(n);
            let sc = build_surface_coupling(&g, &net, SurfaceSampling { n_axial: None, n_angular: nang }).unwrap();
            let expected = 2.0 * std::f64::consts::PI * r * (b - a).norm();
            prop_assert!((sc.total_area() - expected).abs() <= 1e-12 * expected);
            for x in &sc.segments[0].samples {
                prop_assert!(x.cell < g.cell_count());
                prop_assert!(x.s >= 0.0 && x.s <= sc.segments[0].length);
            }
        }
    }
}
