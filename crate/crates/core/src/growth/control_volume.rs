use crate::geometry::{DomainBox, Point3};
use crate::tissue_grid::TissueGrid;

/// Averages of a cell field over an n×n×n split of the region of interest.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlVolumeField {
    roi: DomainBox,
    per_axis: usize,
    pub averages: Vec<f64>,
}

impl ControlVolumeField {
    pub fn per_axis(&self) -> usize {
        self.per_axis
    }

    pub fn cv_box(&self, idx: usize) -> DomainBox {
        let n = self.per_axis;
        let ijk = [idx % n, (idx / n) % n, idx / (n * n)];
        let h = self.roi.extent() / n as f64;
        let lower = self.roi.lower + Point3::from_fn(|a, _| ijk[a] as f64 * h[a]);
        // The last CV ends exactly on the roi face.
        let upper = Point3::from_fn(|a, _| {
            if ijk[a] + 1 == n {
                self.roi.upper[a]
            } else {
                self.roi.lower[a] + (ijk[a] + 1) as f64 * h[a]
            }
        });
        DomainBox { lower, upper }
    }

    /// CV containing `p`; points outside the roi map to the nearest CV.
    pub fn index_of(&self, p: &Point3) -> usize {
        let n = self.per_axis;
        let e = self.roi.extent();
        let mut ijk = [0usize; 3];
        for a in 0..3 {
            let t = ((p[a] - self.roi.lower[a]) / e[a] * n as f64).floor();
            ijk[a] = t.clamp(0.0, (n - 1) as f64) as usize;
        }
        ijk[0] + n * (ijk[1] + n * ijk[2])
    }

    pub fn average_at(&self, p: &Point3) -> f64 {
        self.averages[self.index_of(p)]
    }
}

/// Per-CV averages and the roi average of a cell field, weighting partial
/// cells by their overlap volume.
pub fn control_volume_averages(
    grid: &TissueGrid,
    field: &[f64],
    roi: &DomainBox,
    per_axis: usize,
) -> (ControlVolumeField, f64) {
    let mut cv = ControlVolumeField {
        roi: *roi,
        per_axis,
        averages: Vec::with_capacity(per_axis.pow(3)),
    };
    for i in 0..per_axis.pow(3) {
        let b = cv.cv_box(i);
        cv.averages.push(grid.region_average(field, &b));
    }
    let total = grid.region_average(field, roi);
    (cv, total)
}
