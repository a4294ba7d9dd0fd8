//! Merit functions: map a performance variable to its degree of compliance
//! in [0, 1] and combine per-variable merits into a global product.

use serde::{Deserialize, Serialize};

use crate::circuit::PerformanceVariables;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// Acceptable for `x > x_min`, saturating at `x_opt` and above.
    #[default]
    Lower,
    /// Acceptable for `x < x_min`, saturating at `x_opt` and below.
    Upper,
}

/// One-sided quadratic ramp. For the upper-bounded direction `x_min` is the
/// limit above the optimum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UnilateralSpec {
    pub x_min: f64,
    pub x_opt: f64,
    #[serde(default)]
    pub direction: Direction,
}

impl UnilateralSpec {
    pub fn lower(x_min: f64, x_opt: f64) -> Result<Self> {
        let s = UnilateralSpec {
            x_min,
            x_opt,
            direction: Direction::Lower,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn upper(x_limit: f64, x_opt: f64) -> Result<Self> {
        let s = UnilateralSpec {
            x_min: x_limit,
            x_opt,
            direction: Direction::Upper,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = self.x_min.is_finite() && self.x_opt.is_finite();
        let ordered = match self.direction {
            Direction::Lower => self.x_min < self.x_opt,
            Direction::Upper => self.x_min > self.x_opt,
        };
        if !finite || !ordered {
            return Err(Error::InvalidMeritSpec(format!(
                "unilateral ({:?}) needs x_min {} x_opt: got x_min={}, x_opt={}",
                self.direction,
                if self.direction == Direction::Lower { "<" } else { ">" },
                self.x_min,
                self.x_opt
            )));
        }
        Ok(())
    }
}

/// Two-sided quadratic window peaking at `x_opt`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BilateralSpec {
    pub x_min: f64,
    pub x_opt: f64,
    pub x_max: f64,
}

impl BilateralSpec {
    pub fn new(x_min: f64, x_opt: f64, x_max: f64) -> Result<Self> {
        let s = BilateralSpec { x_min, x_opt, x_max };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = self.x_min.is_finite() && self.x_opt.is_finite() && self.x_max.is_finite();
        if !finite || !(self.x_min < self.x_opt && self.x_opt < self.x_max) {
            return Err(Error::InvalidMeritSpec(format!(
                "bilateral needs x_min < x_opt < x_max: got {}, {}, {}",
                self.x_min, self.x_opt, self.x_max
            )));
        }
        Ok(())
    }
}

#[inline]
fn ramp(x: f64, x_opt: f64, x_edge: f64) -> f64 {
    let u = (x - x_opt) / (x_edge - x_opt);
    1.0 - u * u
}

/// Unilateral merit. NaN maps to 0.
pub fn merit_unilateral(x: f64, spec: &UnilateralSpec) -> f64 {
    if x.is_nan() {
        return 0.0;
    }
    match spec.direction {
        Direction::Lower => {
            if x <= spec.x_min {
                0.0
            } else if x < spec.x_opt {
                ramp(x, spec.x_opt, spec.x_min)
            } else {
                1.0
            }
        }
        Direction::Upper => {
            if x >= spec.x_min {
                0.0
            } else if x > spec.x_opt {
                ramp(x, spec.x_opt, spec.x_min)
            } else {
                1.0
            }
        }
    }
}

/// Bilateral merit. Zero at and outside both bounds; NaN maps to 0.
pub fn merit_bilateral(x: f64, spec: &BilateralSpec) -> f64 {
    if x.is_nan() || x <= spec.x_min || x >= spec.x_max {
        0.0
    } else if x < spec.x_opt {
        ramp(x, spec.x_opt, spec.x_min)
    } else {
        ramp(x, spec.x_opt, spec.x_max)
    }
}

/// Specification for the three photodetector performance variables.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeritSpec {
    /// Signal-to-noise ratio, dB.
    pub snr: UnilateralSpec,
    /// Closed-loop bandwidth, Hz.
    pub bandwidth: BilateralSpec,
    /// Phase margin, degrees.
    pub phase_margin: UnilateralSpec,
}

impl MeritSpec {
    pub fn validate(&self) -> Result<()> {
        self.snr.validate()?;
        self.bandwidth.validate()?;
        self.phase_margin.validate()
    }
}

/// Per-variable merits and their product.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MeritBreakdown {
    pub m_snr: f64,
    pub m_bandwidth: f64,
    pub m_phase: f64,
    pub global: f64,
}

impl MeritBreakdown {
    pub const ZERO: MeritBreakdown = MeritBreakdown {
        m_snr: 0.0,
        m_bandwidth: 0.0,
        m_phase: 0.0,
        global: 0.0,
    };

    pub fn from_components(m_snr: f64, m_bandwidth: f64, m_phase: f64) -> Self {
        MeritBreakdown {
            m_snr,
            m_bandwidth,
            m_phase,
            global: m_snr * m_bandwidth * m_phase,
        }
    }
}

pub fn global_merit(performance: &PerformanceVariables, spec: &MeritSpec) -> MeritBreakdown {
    MeritBreakdown::from_components(
        merit_unilateral(performance.snr_db, &spec.snr),
        merit_bilateral(performance.bandwidth_hz, &spec.bandwidth),
        merit_unilateral(performance.phase_margin_deg, &spec.phase_margin),
    )
}
