//! Unit conversions at the configuration and reporting boundary.
//!
//! Everything inside the solvers is SI (m, Pa, s). Oxygen stays in mmHg.

/// Pascal per millimetre of mercury.
pub const PA_PER_MMHG: f64 = 133.322;

/// Density of water used to convert volumetric filtration to mass flux, kg/m³.
pub const WATER_DENSITY: f64 = 1000.0;

pub const MICROMETER: f64 = 1.0e-6;
pub const MILLIMETER: f64 = 1.0e-3;

pub fn mmhg_to_pa(p: f64) -> f64 {
    p * PA_PER_MMHG
}

pub fn pa_to_mmhg(p: f64) -> f64 {
    p / PA_PER_MMHG
}

/// Volumetric flux (m³/s) of water to mass flux in µg/s.
pub fn volumetric_to_ug_per_s(q: f64) -> f64 {
    q * WATER_DENSITY * 1.0e9
}
