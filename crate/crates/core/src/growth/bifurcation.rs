//! Bifurcation geometry: growth direction, optimal branching angles and the
//! in-plane branch directions.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::geometry::{rotate_about, Point3};

/// normalize(normalize(∇PO2) + λ_g·d_k), or `d_k` when the gradient
/// vanishes or the sum cancels.
pub fn growth_direction(po2_gradient: &Point3, parent: &Point3, lambda_g: f64) -> Point3 {
    let g = po2_gradient.norm();
    if !(g > 0.0) || !g.is_finite() {
        return *parent;
    }
    let d = po2_gradient / g + parent * lambda_g;
    let n = d.norm();
    if n > 1e-12 {
        d / n
    } else {
        *parent
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BifurcationAngles {
    pub phi1: f64,
    pub phi2: f64,
    /// Whether either cosine had to be clamped into [-1, 1].
    pub clamped: bool,
}

/// Minimum-work branching angles relative to the parent direction.
pub fn bifurcation_angles(parent: f64, r1: f64, r2: f64) -> BifurcationAngles {
    let (p4, a4, b4) = (parent.powi(4), r1.powi(4), r2.powi(4));
    let c1 = (p4 + a4 - b4) / (2.0 * parent * parent * r1 * r1);
    let c2 = (p4 + b4 - a4) / (2.0 * parent * parent * r2 * r2);
    let clamped = !(-1.0..=1.0).contains(&c1) || !(-1.0..=1.0).contains(&c2);
    BifurcationAngles {
        phi1: c1.clamp(-1.0, 1.0).acos(),
        phi2: c2.clamp(-1.0, 1.0).acos(),
        clamped,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchDirections {
    pub d1: Point3,
    pub d2: Point3,
    /// Normal of the bifurcation plane.
    pub normal: Point3,
    /// Index (0 or 1) of the branch that kept its optimal angle.
    pub kept: usize,
    /// The plane normal was drawn at random because `d_k ∥ d_g`.
    pub degenerate: bool,
}

/// Rotates `d_k` by `+φ1` and `−φ2` about the plane normal; the branch
/// closer to `d_g` is replaced by the bisector of itself and `d_g`.
///
/// When `d_k` and `d_g` are parallel the normal is a random unit vector
/// perpendicular to `d_k` drawn from `rng`.
pub fn build_bifurcation_directions<R: Rng + ?Sized>(
    d_k: &Point3,
    d_g: &Point3,
    phi1: f64,
    phi2: f64,
    rng: &mut R,
) -> BranchDirections {
    let cross = d_k.cross(d_g);
    let (normal, degenerate) = if cross.norm() > 1e-10 {
        (cross.normalize(), false)
    } else {
        (random_perpendicular(d_k, rng), true)
    };
    let b1 = rotate_about(d_k, &normal, phi1);
    let b2 = rotate_about(d_k, &normal, -phi2);
    let replace_first = (b1 - d_g).norm() <= (b2 - d_g).norm();
    let bisect = |b: &Point3| {
        let s = b + d_g;
        if s.norm() > 1e-12 {
            s.normalize()
        } else {
            *b
        }
    };
    if replace_first {
        BranchDirections { d1: bisect(&b1), d2: b2, normal, kept: 1, degenerate }
    } else {
        BranchDirections { d1: b1, d2: bisect(&b2), normal, kept: 0, degenerate }
    }
}

fn random_perpendicular<R: Rng + ?Sized>(d: &Point3, rng: &mut R) -> Point3 {
    loop {
        let v = Point3::new(
            StandardNormal.sample(rng),
            StandardNormal.sample(rng),
            StandardNormal.sample(rng),
        );
        let p = v - d * d.dot(&v);
        if p.norm() > 1e-6 {
            return p.normalize();
        }
    }
}
