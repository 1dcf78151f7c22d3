//! In-vivo blood viscosity and Poiseuille conductances.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RheologyParameters {
    /// Plasma viscosity, Pa·s.
    pub plasma_viscosity: f64,
    /// Discharge hematocrit, dimensionless.
    pub hematocrit: f64,
}

impl Default for RheologyParameters {
    fn default() -> Self {
        Self {
            plasma_viscosity: 1.0e-3,
            hematocrit: 0.45,
        }
    }
}

impl RheologyParameters {
    pub fn validate(&self) -> Result<()> {
        if !(self.plasma_viscosity > 0.0) {
            return Err(Error::Config("plasma viscosity must be positive".into()));
        }
        if !(0.0..1.0).contains(&self.hematocrit) {
            return Err(Error::Config("hematocrit must lie in [0, 1)".into()));
        }
        Ok(())
    }

    /// Viscosity of a vessel with physical radius `radius` (m).
    pub fn viscosity_for_radius(&self, radius: f64) -> Result<f64> {
        in_vivo_viscosity(2.0 * radius / 1.0e-6, self)
    }
}

/// Apparent viscosity at the reference hematocrit 0.45, relative to plasma.
pub fn relative_viscosity_045(d: f64) -> f64 {
    6.0 * (-0.085 * d).exp() + 3.2 - 2.44 * (-0.06 * d.powf(0.645)).exp()
}

/// Shape coefficient of the hematocrit dependence.
pub fn hematocrit_shape(d: f64) -> f64 {
    let s = 1.0 / (1.0 + 1.0e-11 * d.powi(12));
    (0.8 + (-0.075 * d).exp()) * (s - 1.0) + s
}

/// In-vivo blood viscosity (Pa·s) for a vessel of dimensionless diameter
/// `d` (diameter in µm).
///
/// The hematocrit ratio `((1-H)^C - 1) / (0.55^C - 1)` is evaluated with
/// `expm1` and takes its limit `ln(1-H) / ln(0.55)` where `C` vanishes.
pub fn in_vivo_viscosity(d: f64, params: &RheologyParameters) -> Result<f64> {
    if !(d > 1.1) || !d.is_finite() {
        return Err(Error::Domain(format!(
            "dimensionless diameter {d} must exceed 1.1"
        )));
    }
    let mu45 = relative_viscosity_045(d);
    let c = hematocrit_shape(d);
    let a = (1.0 - params.hematocrit).ln();
    let b = (1.0f64 - 0.45).ln();
    let ratio = if c == 0.0 {
        a / b
    } else {
        (c * a).exp_m1() / (c * b).exp_m1()
    };
    let f = (d / (d - 1.1)).powi(2);
    Ok(params.plasma_viscosity * (1.0 + (mu45 - 1.0) * ratio * f) * f)
}

/// Hydraulic conductance `π R⁴ / (8 μ l)` in m³/(Pa·s).
pub fn vessel_conductance(radius: f64, length: f64, viscosity: f64) -> Result<f64> {
    if !(radius > 0.0 && length > 0.0 && viscosity > 0.0) {
        return Err(Error::Domain(format!(
            "conductance needs positive inputs (R={radius}, l={length}, mu={viscosity})"
        )));
    }
    Ok(std::f64::consts::PI * radius.powi(4) / (8.0 * viscosity * length))
}
