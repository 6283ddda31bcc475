use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::{SimError, Vec2};

/// Rankine vortex: solid-body rotation inside the core, `1/r` decay outside.
/// Positive circulation rotates counter-clockwise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Vortex {
    pub center: Vec2,
    #[serde(rename = "gamma")]
    pub circulation: f64,
    #[serde(rename = "r0")]
    pub core_radius: f64,
}

impl Vortex {
    pub fn new(center: Vec2, circulation: f64, core_radius: f64) -> Result<Self, SimError> {
        let v = Vortex {
            center,
            circulation,
            core_radius,
        };
        v.validate()?;
        Ok(v)
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if !(self.core_radius > 0.0) || !self.core_radius.is_finite() {
            return Err(SimError::InvalidParameter(format!(
                "vortex core radius must be positive, got {}",
                self.core_radius
            )));
        }
        if self.circulation == 0.0 || !self.circulation.is_finite() {
            return Err(SimError::InvalidParameter(
                "vortex circulation must be finite and nonzero".into(),
            ));
        }
        if !self.center.is_finite() {
            return Err(SimError::InvalidParameter("vortex center must be finite".into()));
        }
        Ok(())
    }

    /// Core angular velocity `Γ / (2π r0²)`.
    pub fn core_angular_velocity(&self) -> f64 {
        self.circulation / (2.0 * PI * self.core_radius * self.core_radius)
    }

    /// Tangential speed at the core boundary, the maximum of the profile.
    pub fn peak_speed(&self) -> f64 {
        self.circulation.abs() / (2.0 * PI * self.core_radius)
    }

    /// Signed tangential speed at radius `r`.
    pub fn tangential_speed(&self, r: f64) -> f64 {
        let k = self.circulation / (2.0 * PI);
        if r <= self.core_radius {
            k * r / (self.core_radius * self.core_radius)
        } else {
            k / r
        }
    }
}

/// Current induced by a single vortex at `point`. Zero at the center.
pub fn rankine_velocity(vortex: &Vortex, point: Vec2) -> Vec2 {
    let radial = point - vortex.center;
    let r = radial.length();
    if r == 0.0 {
        return Vec2::ZERO;
    }
    // counter-clockwise unit tangent
    let tangent = radial.perp() / r;
    tangent * vortex.tangential_speed(r)
}

/// Linear superposition of all vortex fields.
pub fn current_at(vortices: &[Vortex], point: Vec2) -> Vec2 {
    vortices
        .iter()
        .fold(Vec2::ZERO, |acc, v| acc + rankine_velocity(v, point))
}
