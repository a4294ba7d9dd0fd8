//! Photodiode, op-amp and operating-condition parameters, plus the TOML
//! fixture format they are loaded from. All quantities are SI base units.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CvCurve {
    /// `(reverse voltage [V], junction capacitance [F])`, voltage ascending.
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhotodiodeParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    /// A/W at the design wavelength.
    pub responsivity: f64,
    /// m².
    pub active_area: f64,
    /// A.
    pub dark_current: f64,
    /// V.
    pub v_reverse_max: f64,
    pub cv_curve: CvCurve,
}

impl PhotodiodeParams {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::Fixture(format!("photodiode {name} must be > 0, got {v}")))
            }
        };
        positive("responsivity", self.responsivity)?;
        positive("active_area", self.active_area)?;
        positive("v_reverse_max", self.v_reverse_max)?;
        if !(self.dark_current.is_finite() && self.dark_current >= 0.0) {
            return Err(Error::Fixture("photodiode dark_current must be >= 0".into()));
        }
        let pts = &self.cv_curve.points;
        if pts.len() < 2 {
            return Err(Error::Fixture("cv_curve needs at least 2 points".into()));
        }
        for &(v, c) in pts {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::Fixture(format!("cv_curve voltage {v} invalid")));
            }
            positive("cv_curve capacitance", c)?;
        }
        for w in pts.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(Error::Fixture("cv_curve voltages must strictly increase".into()));
            }
            if w[1].1 >= w[0].1 {
                return Err(Error::Fixture(
                    "cv_curve capacitances must strictly decrease".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let pd: Self = toml::from_str(text).map_err(|e| Error::Fixture(e.to_string()))?;
        pd.validate()?;
        Ok(pd)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_toml_str(&read(path.as_ref())?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OpAmpParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    /// Open-loop DC gain A0 (V/V).
    pub dc_gain: f64,
    /// Gain-bandwidth product, Hz.
    pub gbw: f64,
    /// Input voltage noise density, V/√Hz.
    pub voltage_noise_density: f64,
    /// Input current noise density, A/√Hz.
    pub current_noise_density: f64,
    /// Lumped common-mode + differential input capacitance, F.
    pub input_capacitance: f64,
}

impl OpAmpParams {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("dc_gain", self.dc_gain),
            ("gbw", self.gbw),
            ("voltage_noise_density", self.voltage_noise_density),
            ("current_noise_density", self.current_noise_density),
            ("input_capacitance", self.input_capacitance),
        ];
        for (name, v) in fields {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Fixture(format!("op-amp {name} must be > 0, got {v}")));
            }
        }
        if self.gbw >= self.dc_gain * 1e12 {
            return Err(Error::Fixture("op-amp gbw implausibly large for dc_gain".into()));
        }
        Ok(())
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let oa: Self = toml::from_str(text).map_err(|e| Error::Fixture(e.to_string()))?;
        oa.validate()?;
        Ok(oa)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_toml_str(&read(path.as_ref())?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatingConditions {
    /// Minimum input irradiance, W/m².
    pub min_irradiance: f64,
    /// Kelvin.
    pub temperature: f64,
    /// Decades above 1 Hz to integrate output noise over. `None` integrates
    /// up to `min(10 * gbw, 1 GHz)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise_integration_decades: Option<f64>,
}

impl OperatingConditions {
    pub fn validate(&self) -> Result<()> {
        if !(self.min_irradiance.is_finite() && self.min_irradiance > 0.0) {
            return Err(Error::InvalidParameter("min_irradiance must be > 0".into()));
        }
        if !(self.temperature.is_finite() && self.temperature > 0.0) {
            return Err(Error::InvalidParameter("temperature must be > 0".into()));
        }
        if let Some(d) = self.noise_integration_decades {
            if !(d.is_finite() && d > 0.0) {
                return Err(Error::InvalidParameter(
                    "noise_integration_decades must be > 0".into(),
                ));
            }
        }
        Ok(())
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Fixture(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    const PD: &str = r#"
responsivity = 0.62
active_area = 7.5e-6
dark_current = 2e-9
v_reverse_max = 32.0

[cv_curve]
points = [[0.0, 70e-12], [30.0, 25e-12]]
"#;

    #[test]
    fn parses_photodiode() {
        let pd = PhotodiodeParams::from_toml_str(PD).unwrap();
        assert_eq!(pd.cv_curve.points, vec![(0.0, 70e-12), (30.0, 25e-12)]);
    }

    #[test]
    fn rejects_missing_and_unknown_fields() {
        let missing = PD.replace("dark_current = 2e-9\n", "");
        assert!(PhotodiodeParams::from_toml_str(&missing).is_err());
        let unknown = format!("colour = 1\n{PD}");
        assert!(PhotodiodeParams::from_toml_str(&unknown).is_err());
    }

    #[test]
    fn rejects_non_monotone_curve() {
        let bad = PD.replace("[30.0, 25e-12]", "[30.0, 80e-12]");
        assert!(PhotodiodeParams::from_toml_str(&bad).is_err());
        let single = PD.replace(", [30.0, 25e-12]", "");
        assert!(PhotodiodeParams::from_toml_str(&single).is_err());
    }

    #[test]
    fn parses_opamp() {
        let text = r#"
name = "generic"
dc_gain = 4e5
gbw = 6e5
voltage_noise_density = 9.6e-9
current_noise_density = 1.2e-13
input_capacitance = 4e-12
"#;
        let oa = OpAmpParams::from_toml_str(text).unwrap();
        assert_eq!(oa.gbw, 6e5);
        assert!(OpAmpParams::from_toml_str(&text.replace("gbw = 6e5\n", "")).is_err());
        assert!(OpAmpParams::from_toml_str(&format!("{text}\nslew = 1")).is_err());
        assert!(OpAmpParams::from_toml_str(&text.replace("4e5", "-1")).is_err());
    }
}
