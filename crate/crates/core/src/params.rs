//! Canonical network parameters, unit conversion and derived constants.
//!
//! Internal units are meters, watts and linear power ratios throughout the
//! library; dB/dBm appear only at the configuration boundary.

use serde::Deserialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ParamError {
    #[error("invalid parameter `{field}`: {message}")]
    Invalid { field: &'static str, message: String },
    #[error("bad config: {0}")]
    Config(String),
}

fn invalid(field: &'static str, message: impl Into<String>) -> ParamError {
    ParamError::Invalid {
        field,
        message: message.into(),
    }
}

/// Converts a power in dBm to watts.
pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

/// Converts a dB ratio to a linear ratio.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Per-tier transmit power and spatial density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TierParams {
    pub tx_power_dbm: f64,
    /// Base-station density in points per square meter.
    pub density_per_m2: f64,
}

/// Full physical/deployment parameter set, in canonical units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetworkParams {
    pub macro_tier: TierParams,
    pub femto_tier: TierParams,
    /// Path-loss exponent; must exceed 2 for the interference integrals to
    /// converge.
    pub alpha: f64,
    /// Path-loss constant L0 in dB at the 1 m reference distance.
    pub pathloss_const_db: f64,
    /// Thermal noise power in dBm.
    pub noise_dbm: f64,
    /// Inner-region radius D in meters; 0 means uniform deployment.
    pub inner_radius_m: f64,
}

impl NetworkParams {
    pub fn new(
        macro_tier: TierParams,
        femto_tier: TierParams,
        alpha: f64,
        pathloss_const_db: f64,
        noise_dbm: f64,
        inner_radius_m: f64,
    ) -> Result<Self, ParamError> {
        let p = Self {
            macro_tier,
            femto_tier,
            alpha,
            pathloss_const_db,
            noise_dbm,
            inner_radius_m,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), ParamError> {
        if !self.macro_tier.tx_power_dbm.is_finite() {
            return Err(invalid("macro_tx_dbm", "must be finite"));
        }
        if !self.femto_tier.tx_power_dbm.is_finite() {
            return Err(invalid("femto_tx_dbm", "must be finite"));
        }
        if !(self.macro_tier.density_per_m2 > 0.0) || !self.macro_tier.density_per_m2.is_finite() {
            return Err(invalid(
                "macro_density",
                format!(
                    "must be strictly positive, got {}",
                    self.macro_tier.density_per_m2
                ),
            ));
        }
        if !(self.femto_tier.density_per_m2 >= 0.0) || !self.femto_tier.density_per_m2.is_finite()
        {
            return Err(invalid(
                "femto_density",
                format!("must be nonnegative, got {}", self.femto_tier.density_per_m2),
            ));
        }
        if !(self.alpha > 2.0) || !self.alpha.is_finite() {
            return Err(invalid(
                "alpha",
                format!("must be > 2 for integral convergence, got {}", self.alpha),
            ));
        }
        if !self.pathloss_const_db.is_finite() {
            return Err(invalid("pathloss_const_db", "must be finite"));
        }
        if !self.noise_dbm.is_finite() {
            return Err(invalid("noise_dbm", "must be finite"));
        }
        let d_cap = self.max_inner_radius_m();
        if !(self.inner_radius_m >= 0.0) || self.inner_radius_m > d_cap {
            return Err(invalid(
                "inner_radius_m",
                format!(
                    "must lie in [0, {:.1}] (10/sqrt(pi*lambda1)), got {}",
                    d_cap, self.inner_radius_m
                ),
            ));
        }
        Ok(())
    }

    /// Largest admissible inner radius, `10/sqrt(pi*lambda1)`. Beyond this
    /// the inner discs tile essentially the whole plane.
    pub fn max_inner_radius_m(&self) -> f64 {
        10.0 / (std::f64::consts::PI * self.macro_tier.density_per_m2).sqrt()
    }

    pub fn derive(&self) -> DerivedParams {
        DerivedParams::from(self)
    }

    /// Same parameters with the femto tier removed (single-tier baseline).
    pub fn single_tier(&self) -> Self {
        Self {
            femto_tier: TierParams {
                density_per_m2: 0.0,
                ..self.femto_tier
            },
            inner_radius_m: 0.0,
            ..*self
        }
    }

    /// Same parameters with a different inner-region radius.
    pub fn with_inner_radius(&self, inner_radius_m: f64) -> Self {
        Self {
            inner_radius_m,
            ..*self
        }
    }
}

/// Constants derived from [`NetworkParams`] that every formula consumes.
///
/// `p1`/`p2` are the effective powers `P_i = P_tx,i * L0` in linear units,
/// `xi = lambda1*p1^(2/alpha) + lambda2*p2^(2/alpha)`, and `breakpoint_t` is
/// the received-power level `p1 / D^alpha` at which a user at distance `D`
/// from the nearest macro BS receives it (`+inf` when `D = 0`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedParams {
    pub p1: f64,
    pub p2: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub alpha: f64,
    pub xi: f64,
    pub noise_watts: f64,
    pub inner_radius_m: f64,
    pub breakpoint_t: f64,
}

impl From<&NetworkParams> for DerivedParams {
    fn from(p: &NetworkParams) -> Self {
        let l0 = db_to_linear(p.pathloss_const_db);
        let p1 = dbm_to_watts(p.macro_tier.tx_power_dbm) * l0;
        let p2 = dbm_to_watts(p.femto_tier.tx_power_dbm) * l0;
        let lambda1 = p.macro_tier.density_per_m2;
        let lambda2 = p.femto_tier.density_per_m2;
        let e = 2.0 / p.alpha;
        let xi = lambda1 * p1.powf(e) + lambda2 * p2.powf(e);
        let d = p.inner_radius_m;
        let breakpoint_t = if d > 0.0 {
            p1 / d.powf(p.alpha)
        } else {
            f64::INFINITY
        };
        Self {
            p1,
            p2,
            lambda1,
            lambda2,
            alpha: p.alpha,
            xi,
            noise_watts: dbm_to_watts(p.noise_dbm),
            inner_radius_m: d,
            breakpoint_t,
        }
    }
}

impl DerivedParams {
    /// Probability that the typical user falls in the inner region,
    /// `1 - exp(-pi*lambda1*D^2)`.
    pub fn inner_region_prob(&self) -> f64 {
        let d = self.inner_radius_m;
        1.0 - (-std::f64::consts::PI * self.lambda1 * d * d).exp()
    }
}

/// JSON configuration schema. Densities are accepted in points per square
/// kilometer and converted on ingestion; unknown keys are rejected.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkConfig {
    pub macro_tx_dbm: f64,
    pub femto_tx_dbm: f64,
    pub macro_density_per_km2: f64,
    pub femto_density_per_km2: f64,
    pub alpha: f64,
    pub pathloss_const_db: f64,
    pub noise_dbm: f64,
    pub inner_radius_m: f64,
}

impl NetworkConfig {
    pub fn from_json(text: &str) -> Result<Self, ParamError> {
        serde_json::from_str(text).map_err(|e| ParamError::Config(e.to_string()))
    }

    pub fn into_params(self) -> Result<NetworkParams, ParamError> {
        NetworkParams::new(
            TierParams {
                tx_power_dbm: self.macro_tx_dbm,
                density_per_m2: self.macro_density_per_km2 / 1e6,
            },
            TierParams {
                tx_power_dbm: self.femto_tx_dbm,
                density_per_m2: self.femto_density_per_km2 / 1e6,
            },
            self.alpha,
            self.pathloss_const_db,
            self.noise_dbm,
            self.inner_radius_m,
        )
    }
}


#[cfg(test)]
pub use tests::reference_params;
