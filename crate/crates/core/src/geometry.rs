use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Point3 = Vector3<f64>;

/// Axis-aligned cuboid, used for the tissue domain, the region of interest and
/// any sub-box (octants, control volumes).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DomainBox {
    pub lower: Point3,
    pub upper: Point3,
}

impl DomainBox {
    pub fn new(lower: Point3, upper: Point3) -> Result<Self> {
        if (0..3).all(|i| lower[i] < upper[i]) {
            Ok(Self { lower, upper })
        } else {
            Err(Error::Validation(format!(
                "box lower corner {lower:?} must be strictly below upper corner {upper:?}"
            )))
        }
    }

    pub fn cube(lower: f64, upper: f64) -> Result<Self> {
        Self::new(Point3::repeat(lower), Point3::repeat(upper))
    }

    pub fn extent(&self) -> Point3 {
        self.upper - self.lower
    }

    pub fn volume(&self) -> f64 {
        let e = self.extent();
        e.x * e.y * e.z
    }

    pub fn center(&self) -> Point3 {
        0.5 * (self.lower + self.upper)
    }

    /// Closed containment.
    pub fn contains(&self, p: &Point3) -> bool {
        (0..3).all(|i| p[i] >= self.lower[i] && p[i] <= self.upper[i])
    }

    /// Open containment: the point lies in the interior, not on a face.
    pub fn contains_strictly(&self, p: &Point3) -> bool {
        (0..3).all(|i| p[i] > self.lower[i] && p[i] < self.upper[i])
    }

    pub fn intersects(&self, other: &DomainBox) -> bool {
        (0..3).all(|i| self.lower[i] <= other.upper[i] && other.lower[i] <= self.upper[i])
    }

    /// Volume of the intersection with `other` (zero when disjoint).
    pub fn overlap_volume(&self, other: &DomainBox) -> f64 {
        (0..3)
            .map(|i| (self.upper[i].min(other.upper[i]) - self.lower[i].max(other.lower[i])).max(0.0))
            .product()
    }

    /// Grows the box by `margin` in every direction.
    pub fn inflate(&self, margin: f64) -> DomainBox {
        DomainBox {
            lower: self.lower.add_scalar(-margin),
            upper: self.upper.add_scalar(margin),
        }
    }

    /// Bounding box of a line segment.
    pub fn bounding(a: &Point3, b: &Point3) -> DomainBox {
        DomainBox {
            lower: a.inf(b),
            upper: a.sup(b),
        }
    }

    /// Nearest point of the closed box.
    pub fn clamp(&self, p: &Point3) -> Point3 {
        p.sup(&self.lower).inf(&self.upper)
    }
}

/// Grows each axis of `roi` by `factor` times its extent at both ends.
pub fn enlarge_domain(roi: &DomainBox, factor: f64) -> DomainBox {
    let pad = roi.extent() * factor;
    DomainBox {
        lower: roi.lower - pad,
        upper: roi.upper + pad,
    }
}

/// Minimal Euclidean distance between segments `p0-p1` and `q0-q1`.
///
/// Clamped closest-point computation; degenerate (zero-length) segments are
/// handled as points.
pub fn segment_distance(p0: &Point3, p1: &Point3, q0: &Point3, q1: &Point3) -> f64 {
    let d1 = p1 - p0;
    let d2 = q1 - q0;
    let r = p0 - q0;
    let a = d1.dot(&d1);
    let e = d2.dot(&d2);
    let f = d2.dot(&r);
    let eps = f64::EPSILON * (a + e).max(f64::MIN_POSITIVE);

    let (s, t) = if a <= eps && e <= eps {
        (0.0, 0.0)
    } else if a <= eps {
        (0.0, (f / e).clamp(0.0, 1.0))
    } else {
        let c = d1.dot(&r);
        if e <= eps {
            ((-c / a).clamp(0.0, 1.0), 0.0)
        } else {
            let b = d1.dot(&d2);
            let denom = a * e - b * b;
            let mut s = if denom > eps * (a * e) {
                ((b * f - c * e) / denom).clamp(0.0, 1.0)
            } else {
                0.0
            };
            let mut t = (b * s + f) / e;
            if t < 0.0 {
                t = 0.0;
                s = (-c / a).clamp(0.0, 1.0);
            } else if t > 1.0 {
                t = 1.0;
                s = ((b - c) / a).clamp(0.0, 1.0);
            }
            (s, t)
        }
    };
    let cp = p0 + d1 * s;
    let cq = q0 + d2 * t;
    (cp - cq).norm()
}

/// Rotates `v` about the unit axis `axis` by `angle` (right-hand rule).
pub fn rotate_about(v: &Point3, axis: &Point3, angle: f64) -> Point3 {
    let (sin, cos) = angle.sin_cos();
    v * cos + axis.cross(v) * sin + axis * (axis.dot(v) * (1.0 - cos))
}

/// Some unit vector perpendicular to `v`.
pub fn any_perpendicular(v: &Point3) -> Point3 {
    let helper = if v.x.abs() <= v.y.abs() && v.x.abs() <= v.z.abs() {
        Point3::x()
    } else if v.y.abs() <= v.z.abs() {
        Point3::y()
    } else {
        Point3::z()
    };
    v.cross(&helper).normalize()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn enlarge_unit_box() {
        let b = DomainBox::cube(0.0, 1.0).unwrap();
        let e = enlarge_domain(&b, 0.1);
        assert_relative_eq!(e.lower, Point3::repeat(-0.1), epsilon = 1e-15);
        assert_relative_eq!(e.upper, Point3::repeat(1.1), epsilon = 1e-15);
        assert_eq!(enlarge_domain(&b, 0.0), b);
    }

    #[test]
    fn enlarge_roi_from_parameter_table() {
        // x1 bounds of the region of interest, in mm.
        let roi = DomainBox::new(
            Point3::new(0.038, 8.8e-4, 8.8e-4),
            Point3::new(1.13, 1.05, 1.50),
        )
        .unwrap();
        let omega = enlarge_domain(&roi, 0.1);
        assert_relative_eq!(omega.lower.x, 0.038 - 0.1092, epsilon = 1e-12);
        assert_relative_eq!(omega.upper.x, 1.13 + 0.1092, epsilon = 1e-12);
        assert!(omega.contains_strictly(&roi.lower) && omega.contains_strictly(&roi.upper));
    }

    #[test]
    fn invalid_box_rejected() {
        assert!(DomainBox::new(Point3::zeros(), Point3::new(1.0, 0.0, 1.0)).is_err());
    }

    #[test]
    fn distance_shared_endpoint_is_zero() {
        let o = Point3::zeros();
        let d = segment_distance(&o, &Point3::x(), &o, &Point3::y());
        assert_eq!(d, 0.0);
    }

    #[test]
    fn distance_parallel_offset() {
        let off = Point3::new(0.0, 5e-6, 0.0);
        let d = segment_distance(&Point3::zeros(), &Point3::x(), &off, &(Point3::x() + off));
        assert_relative_eq!(d, 5e-6, max_relative = 1e-12);
    }

    /// Brute force over a fine lattice of both parameters.
    fn brute_distance(p0: &Point3, p1: &Point3, q0: &Point3, q1: &Point3, n: usize) -> f64 {
        let mut best = f64::INFINITY;
        for i in 0..=n {
            let a = p0 + (p1 - p0) * (i as f64 / n as f64);
            for j in 0..=n {
                let b = q0 + (q1 - q0) * (j as f64 / n as f64);
                best = best.min((a - b).norm());
            }
        }
        best
    }

    #[test]
    fn distance_skew_matches_brute_force() {
        let mm = 1e-3;
        let (p0, p1) = (Point3::zeros(), Point3::new(mm, 0.0, 0.0));
        let (q0, q1) = (Point3::new(0.5 * mm, mm, -mm), Point3::new(0.5 * mm, mm, mm));
        let brute = brute_distance(&p0, &p1, &q0, &q1, 400);
        assert_relative_eq!(brute, mm, max_relative = 1e-9);
        assert_relative_eq!(segment_distance(&p0, &p1, &q0, &q1), mm, max_relative = 1e-12);
    }

    #[test]
    fn rotation_keeps_plane_and_angle() {
        let v = Point3::x();
        let r = rotate_about(&v, &Point3::z(), std::f64::consts::FRAC_PI_2);
        assert_relative_eq!(r, Point3::y(), epsilon = 1e-15);
        let p = any_perpendicular(&Point3::new(0.3, -0.2, 0.9).normalize());
        assert!(p.dot(&Point3::new(0.3, -0.2, 0.9)).abs() < 1e-15);
    }

    proptest::proptest! {
        #[test]
        fn distance_never_exceeds_sampled(c in proptest::collection::vec(-1.0f64..1.0, 12)) {
            let p = |i: usize| Point3::new(c[i], c[i + 1], c[i + 2]);
            let (p0, p1, q0, q1) = (p(0), p(3), p(6), p(9));
            let d = segment_distance(&p0, &p1, &q0, &q1);
            let brute = brute_distance(&p0, &p1, &q0, &q1, 60);
            proptest::prop_assert!(d <= brute + 1e-12);
            // 60 samples per segment: lattice spacing bounds the sampling error.
            let h = ((p1 - p0).norm() + (q1 - q0).norm()) / 60.0;
            proptest::prop_assert!(brute - d <= h + 1e-12);
        }
    }
}
