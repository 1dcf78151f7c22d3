//! Random draws used by the growth phases. All take the run's generator so
//! that the draw order fixes the result.

use rand::Rng;
use rand_distr::{Distribution, LogNormal, Normal};
use statrs::function::erf::erf;

use super::GrowthParameters;

/// Length-to-radius ratio r ~ LogNormal(μ_r, σ_r).
pub fn sample_length_ratio<R: Rng + ?Sized>(rng: &mut R, params: &GrowthParameters) -> f64 {
    LogNormal::new(params.mu_r, params.sigma_r)
        .expect("validated log-normal parameters")
        .sample(rng)
}

/// Vessel length `R·r` for a fresh ratio draw.
pub fn sample_length<R: Rng + ?Sized>(radius: f64, rng: &mut R, params: &GrowthParameters) -> f64 {
    radius * sample_length_ratio(rng, params)
}

/// CDF of the length-ratio distribution.
pub fn bifurcation_probability(r: f64, params: &GrowthParameters) -> f64 {
    0.5 + 0.5 * erf((r.ln() - params.mu_r) / (2.0 * params.sigma_r * params.sigma_r).sqrt())
}

pub fn bifurcation_decision(r: f64, params: &GrowthParameters) -> bool {
    bifurcation_probability(r, params) > params.p_th
}

/// Symmetric Murray radius 2^(-1/γ)·R.
pub fn murray_radius(parent: f64, gamma: f64) -> f64 {
    parent * 2f64.powf(-1.0 / gamma)
}

/// Two branch radii drawn independently from Normal(R_c, R_c/divisor),
/// redrawn until they lie in (0, parent].
pub fn murray_branch_radii<R: Rng + ?Sized>(parent: f64, rng: &mut R, params: &GrowthParameters) -> (f64, f64) {
    let rc = murray_radius(parent, params.gamma);
    let dist = Normal::new(rc, rc / params.radius_sigma_divisor).expect("positive spread");
    let mut draw = || loop {
        let r = dist.sample(rng);
        if r > 0.0 && r <= parent {
            return r;
        }
    };
    let r1 = draw();
    let r2 = draw();
    (r1, r2)
}

/// Capillary radius draw: returns the raw Normal(2.75 µm, 0.25 µm) sample
/// and its value clamped to [min_radius, parent].
pub fn sample_small_radius<R: Rng + ?Sized>(parent: f64, rng: &mut R, params: &GrowthParameters) -> (f64, f64) {
    let raw = Normal::new(params.small_radius_mu, params.small_radius_sigma)
        .expect("validated small-radius parameters")
        .sample(rng);
    (raw, raw.max(params.min_radius).min(parent))
}

/// Link distance limit d_x ~ Normal(μ, σ), redrawn until positive.
pub fn sample_link_distance<R: Rng + ?Sized>(rng: &mut R, params: &GrowthParameters) -> f64 {
    let dist = Normal::new(params.link_mu, params.link_sigma).expect("validated link parameters");
    loop {
        let d = dist.sample(rng);
        if d > 0.0 {
            return d;
        }
    }
}
