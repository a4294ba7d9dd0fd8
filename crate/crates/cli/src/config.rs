//! Run-config files.
//!
//! A run config is one TOML document with the sections `design_space`,
//! `fixtures`, `conditions`, `merit`, and optionally `algorithm`,
//! `experiment` and `calibration`. Fixture paths are resolved relative to the
//! config file. Unknown keys are rejected everywhere.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use tiaopt_core::space::{discretize_bias, e_series_values};
use tiaopt_core::{
    AlgorithmConfig, CircuitLandscape, CircuitModel, DesignSpace, ESeries, ESeriesSpec,
    MeritSpec, OpAmpParams, OperatingConditions, PhotodiodeParams,
};

/// One design-space axis, given in exactly one of three forms:
/// an E-series decade range, a linear range, or an explicit value list.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub series: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decade_min: Option<i32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decade_max: Option<i32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
}

impl AxisConfig {
    pub fn values(&self, name: &str) -> Result<Vec<f64>> {
        let series = self.series.is_some() || self.decade_min.is_some() || self.decade_max.is_some();
        let linear = self.min.is_some() || self.max.is_some() || self.count.is_some();
        let list = self.values.is_some();
        if [series, linear, list].iter().filter(|&&b| b).count() != 1 {
            bail!("axis `{name}`: give exactly one of series/decade_min/decade_max, min/max/count, or values");
        }
        if series {
            let (Some(id), Some(lo), Some(hi)) = (&self.series, self.decade_min, self.decade_max) else {
                bail!("axis `{name}`: series form needs series, decade_min and decade_max");
            };
            let spec = ESeriesSpec::new(id.parse::<ESeries>()?, lo, hi)?;
            return Ok(e_series_values(&spec)?);
        }
        if linear {
            let (Some(lo), Some(hi), Some(n)) = (self.min, self.max, self.count) else {
                bail!("axis `{name}`: linear form needs min, max and count");
            };
            return Ok(discretize_bias(lo, hi, n)?);
        }
        Ok(self.values.clone().unwrap_or_default())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignSpaceConfig {
    pub rf: AxisConfig,
    pub cf: AxisConfig,
    pub vd: AxisConfig,
}

impl DesignSpaceConfig {
    pub fn build(&self) -> Result<DesignSpace> {
        Ok(DesignSpace::new(
            self.rf.values("rf")?,
            self.cf.values("cf")?,
            self.vd.values("vd")?,
        )?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixturesConfig {
    pub photodiode: PathBuf,
    pub opamp: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub n_runs: u64,
    #[serde(default)]
    pub base_seed: u64,
    /// Algorithms to repeat. Empty means the `[algorithm]` section alone.
    #[serde(default)]
    pub sweep: Vec<AlgorithmConfig>,
}

/// A reference design and its reported performance, for comparison only.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CalibrationConfig {
    pub rf: f64,
    pub cf: f64,
    pub vd: f64,
    pub snr_db: Option<f64>,
    pub bandwidth_hz: Option<f64>,
    pub phase_margin_deg: Option<f64>,
    pub global_merit: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub design_space: DesignSpaceConfig,
    pub fixtures: FixturesConfig,
    pub conditions: OperatingConditions,
    pub merit: MeritSpec,
    #[serde(default)]
    pub algorithm: Option<AlgorithmConfig>,
    #[serde(default)]
    pub experiment: Option<ExperimentConfig>,
    #[serde(default)]
    pub calibration: Option<CalibrationConfig>,
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text)?;
        cfg.merit.validate()?;
        cfg.conditions.validate()?;
        if let Some(a) = &cfg.algorithm {
            a.validate()?;
        }
        if let Some(e) = &cfg.experiment {
            if e.n_runs == 0 {
                bail!("experiment.n_runs must be >= 1");
            }
            for a in &e.sweep {
                a.validate()?;
            }
        }
        Ok(cfg)
    }
}

/// A parsed config together with everything it references.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub path: PathBuf,
    pub text: String,
    pub config: RunConfig,
    pub photodiode_text: String,
    pub opamp_text: String,
    pub photodiode: PhotodiodeParams,
    pub opamp: OpAmpParams,
    pub space: DesignSpace,
}

fn read(path: &Path, what: &str) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {what} {}", path.display()))
}

impl LoadedConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref().to_path_buf();
        let text = read(&path, "config")?;
        let config = RunConfig::from_toml_str(&text)
            .with_context(|| format!("parsing config {}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        let pd_path = base.join(&config.fixtures.photodiode);
        let oa_path = base.join(&config.fixtures.opamp);
        let photodiode_text = read(&pd_path, "photodiode fixture")?;
        let opamp_text = read(&oa_path, "op-amp fixture")?;
        let photodiode = PhotodiodeParams::from_toml_str(&photodiode_text)
            .with_context(|| format!("parsing {}", pd_path.display()))?;
        let opamp = OpAmpParams::from_toml_str(&opamp_text)
            .with_context(|| format!("parsing {}", oa_path.display()))?;
        let space = config.design_space.build().context("building design space")?;
        if let Some(&vmax) = space.vd_values().last() {
            if vmax > photodiode.v_reverse_max {
                bail!(
                    "bias axis reaches {vmax} V, beyond the photodiode maximum of {} V",
                    photodiode.v_reverse_max
                );
            }
        }
        Ok(LoadedConfig {
            path,
            text,
            config,
            photodiode_text,
            opamp_text,
            photodiode,
            opamp,
            space,
        })
    }

    pub fn landscape(&self) -> Result<CircuitLandscape> {
        let model = CircuitModel::new(
            self.photodiode.clone(),
            self.opamp.clone(),
            self.config.conditions,
        )?;
        Ok(CircuitLandscape::new(self.space.clone(), model, self.config.merit)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
        [design_space]
        rf = { values = [1e5, 2e5] }
        cf = { series = "E6", decade_min = -12, decade_max = -11 }
        vd = { min = 0.0, max = 5.0, count = 3 }
        [fixtures]
        photodiode = "pd.toml"
        opamp = "oa.toml"
        [conditions]
        min_irradiance = 0.05
        temperature = 300.0
        [merit.snr]
        x_min = 10.0
        x_opt = 92.0
        [merit.bandwidth]
        x_min = 20e3
        x_opt = 22e3
        x_max = 24e3
        [merit.phase_margin]
        x_min = 45.0
        x_opt = 90.0
    "#;

    #[test]
    fn minimal_config_parses() {
        let cfg = RunConfig::from_toml_str(MINIMAL).unwrap();
        let space = cfg.design_space.build().unwrap();
        assert_eq!(space.shape(), &[2, 6, 3]);
        assert_eq!(space.vd_values(), &[0.0, 2.5, 5.0]);
        assert!(cfg.algorithm.is_none());
    }

    #[test]
    fn unknown_keys_rejected() {
        let typo = MINIMAL.replace("temperature", "temprature");
        assert!(RunConfig::from_toml_str(&typo).is_err());
        let extra = format!("{MINIMAL}\n[algorithm]\nkind = \"montecarlo\"\nn_mc = 5\nnmc = 6\n");
        assert!(RunConfig::from_toml_str(&extra).is_err());
        let extra = format!("{MINIMAL}\n[bogus]\nx = 1\n");
        assert!(RunConfig::from_toml_str(&extra).is_err());
    }

    #[test]
    fn algorithm_sections() {
        let mc = format!("{MINIMAL}\n[algorithm]\nkind = \"montecarlo\"\nn_mc = 5\nseed = 3\n");
        let cfg = RunConfig::from_toml_str(&mc).unwrap();
        assert_eq!(cfg.algorithm.unwrap().seed(), Some(3));
        let ga = format!("{MINIMAL}\n[algorithm]\nkind = \"ga\"\nn_c = 3\ngen = 2\nmut_percent = 5.0\n");
        assert!(RunConfig::from_toml_str(&ga).is_err(), "odd n_c accepted");
    }

    #[test]
    fn axis_forms_are_exclusive() {
        let both = AxisConfig {
            values: Some(vec![1.0]),
            min: Some(0.0),
            ..Default::default()
        };
        assert!(both.values("x").is_err());
        let partial = AxisConfig {
            series: Some("E24".into()),
            decade_min: Some(0),
            ..Default::default()
        };
        assert!(partial.values("x").is_err());
        assert!(AxisConfig::default().values("x").is_err());
    }
}
