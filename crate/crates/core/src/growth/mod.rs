//! Three-phase stochastic growth of microvascular networks: large vessels,
//! capillaries with linking, and pruning of dead ends.

mod bifurcation;
mod collision;
mod control_volume;
mod phases;
mod sampling;
mod starter;

pub use bifurcation::{bifurcation_angles, build_bifurcation_directions, growth_direction, BifurcationAngles, BranchDirections};
pub use collision::{check_and_insert, collides_brute_force, collision_violations, Candidate, Endpoint, OctantIndex};
pub use control_volume::{control_volume_averages, ControlVolumeField};
pub use phases::{
    clip_to_region, generate, BifurcationRecord, GrowthOutcome, GrowthReport, GrowthRun, GrowthSetup, LinkRecord,
    SmallRadiusRecord, StepRecord,
};
pub use sampling::{
    bifurcation_decision, bifurcation_probability, murray_branch_radii, murray_radius, sample_length,
    sample_length_ratio, sample_link_distance, sample_small_radius,
};
pub use starter::{desk_starter, StarterSpec};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Constants of the growth algorithm. Lengths and radii in m.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GrowthParameters {
    /// Murray exponent γ.
    pub gamma: f64,
    pub lambda_g: f64,
    pub mu_r: f64,
    pub sigma_r: f64,
    /// Bifurcation threshold on the length-ratio CDF.
    pub p_th: f64,
    /// Terminal vessels above this radius grow in the first phase.
    pub large_radius: f64,
    pub small_radius_mu: f64,
    pub small_radius_sigma: f64,
    pub min_radius: f64,
    /// Second-phase radii below this value are redrawn.
    pub small_radius_switch: f64,
    pub link_mu: f64,
    pub link_sigma: f64,
    /// Full opening angle of the linking cone, rad.
    pub cone_angle: f64,
    pub cv_per_axis: usize,
    /// mmHg.
    pub po2_stop: f64,
    pub max_iter_p1: usize,
    pub max_iter_p2: usize,
    pub max_iter_p3: usize,
    pub p3_terminal_stop: usize,
    pub radius_sigma_divisor: f64,
    pub rel_change_p1: f64,
    /// Absolute change in roi PO2 (mmHg) that ends the second phase.
    pub change_p2: f64,
}

impl Default for GrowthParameters {
    fn default() -> Self {
        Self {
            gamma: 3.0,
            lambda_g: 1.0,
            mu_r: 2.4,
            sigma_r: 0.3,
            p_th: 0.6,
            large_radius: 4.5e-6,
            small_radius_mu: 2.75e-6,
            small_radius_sigma: 0.25e-6,
            min_radius: 2.0e-6,
            small_radius_switch: 3.0e-6,
            link_mu: 60e-6,
            link_sigma: 10e-6,
            cone_angle: 2.0 * std::f64::consts::PI / 3.0,
            cv_per_axis: 4,
            po2_stop: 36.5,
            max_iter_p1: 35,
            max_iter_p2: 35,
            max_iter_p3: 15,
            p3_terminal_stop: 10,
            radius_sigma_divisor: 32.0,
            rel_change_p1: 1e-2,
            change_p2: 1e-3,
        }
    }
}

impl GrowthParameters {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("lambda_g", self.lambda_g),
            ("mu_r", self.mu_r),
            ("sigma_r", self.sigma_r),
            ("large_radius", self.large_radius),
            ("small_radius_mu", self.small_radius_mu),
            ("small_radius_sigma", self.small_radius_sigma),
            ("min_radius", self.min_radius),
            ("small_radius_switch", self.small_radius_switch),
            ("link_mu", self.link_mu),
            ("link_sigma", self.link_sigma),
            ("cone_angle", self.cone_angle),
            ("po2_stop", self.po2_stop),
            ("radius_sigma_divisor", self.radius_sigma_divisor),
            ("rel_change_p1", self.rel_change_p1),
            ("change_p2", self.change_p2),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Validation(format!("growth parameter {name} must be positive, got {v}")));
            }
        }
        if !(2.0..=4.0).contains(&self.gamma) {
            return Err(Error::Validation(format!("gamma must lie in [2, 4], got {}", self.gamma)));
        }
        if !(self.p_th > 0.0 && self.p_th < 1.0) {
            return Err(Error::Validation(format!("p_th must lie in (0, 1), got {}", self.p_th)));
        }
        if self.cone_angle > 2.0 * std::f64::consts::PI {
            return Err(Error::Validation("cone_angle exceeds a full turn".into()));
        }
        let counts = [
            ("cv_per_axis", self.cv_per_axis),
            ("max_iter_p1", self.max_iter_p1),
            ("max_iter_p2", self.max_iter_p2),
            ("max_iter_p3", self.max_iter_p3),
        ];
        for (name, v) in counts {
            if v == 0 {
                return Err(Error::Validation(format!("growth parameter {name} must be at least 1")));
            }
        }
        Ok(())
    }
}
