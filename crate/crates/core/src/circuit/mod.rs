//! Small-signal model of a photodiode transimpedance amplifier.
//!
//! The op-amp is a single-pole integrator `A(f) = A0 / (1 + j f A0 / GBW)`.
//! The feedback network is `Rf || Cf`, and the inverting node sees the
//! photodiode junction capacitance plus the op-amp input capacitance:
//!
//! ```text
//! Zf   = Rf / (1 + j w Rf Cf)
//! beta = Zin / (Zin + Zf) = 1 / (1 + j w Cin Zf)
//! T    = A beta                 loop gain
//! ZT   = Zf T / (1 + T)         closed-loop transimpedance
//! ```
//!
//! Output noise combines op-amp voltage noise through the noise gain
//! `1/beta`, and the op-amp current noise, shot noise of photo plus dark
//! current and Rf thermal noise through `ZT`. 1/f noise and the diode shunt
//! resistance are not modelled.

mod params;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use params::{CvCurve, OpAmpParams, OperatingConditions, PhotodiodeParams};

use crate::error::{Error, Result};
use crate::space::DesignPoint;

pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
pub const BOLTZMANN: f64 = 1.380_649e-23;

/// Lowest frequency considered by every frequency-domain search, Hz.
pub const F_MIN: f64 = 1.0;
/// Bracketing grid density for root searches.
pub const SEARCH_POINTS_PER_DECADE: usize = 50;
/// Relative frequency tolerance of the bisection refinement.
pub const SEARCH_REL_TOL: f64 = 1e-6;
/// Trapezoid grid density for the noise integral.
pub const NOISE_POINTS_PER_DECADE: usize = 100;
/// Upper cap of the default noise integration range, Hz.
pub const NOISE_F_CAP: f64 = 1e9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerformanceVariables {
    pub snr_db: f64,
    pub bandwidth_hz: f64,
    pub phase_margin_deg: f64,
}

/// Junction capacitance at reverse bias `vd`.
///
/// Interpolates linearly in `(ln(1 + V), ln C)` between curve knots and holds
/// the end values outside the tabulated voltage span.
pub fn diode_capacitance(pd: &PhotodiodeParams, vd: f64) -> Result<f64> {
    if !(vd >= 0.0 && vd <= pd.v_reverse_max) {
        return Err(Error::BiasOutOfRange {
            vd,
            max: pd.v_reverse_max,
        });
    }
    let pts = &pd.cv_curve.points;
    let (first, last) = (pts[0], pts[pts.len() - 1]);
    if vd <= first.0 {
        return Ok(first.1);
    }
    if vd >= last.0 {
        return Ok(last.1);
    }
    let k = pts.partition_point(|&(v, _)| v <= vd);
    let (v0, c0) = pts[k - 1];
    if vd == v0 {
        return Ok(c0);
    }
    let (v1, c1) = pts[k];
    let x = (1.0 + vd).ln();
    let (x0, x1) = ((1.0 + v0).ln(), (1.0 + v1).ln());
    let t = (x - x0) / (x1 - x0);
    Ok((c0.ln() + t * (c1.ln() - c0.ln())).exp())
}

/// Lumped TIA network at a fixed operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TiaNetwork {
    pub rf: f64,
    pub cf: f64,
    /// Capacitance at the inverting input (diode + op-amp), F.
    pub c_in: f64,
    pub dc_gain: f64,
    pub gbw: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Response {
    pub loop_gain: Complex64,
    pub noise_gain: Complex64,
    pub closed_loop: Complex64,
    pub transimpedance: Complex64,
}

/// White noise sources referred to the amplifier input.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSources {
    /// V/√Hz.
    pub voltage_density: f64,
    /// A/√Hz.
    pub current_density: f64,
    /// DC current producing shot noise (photo + dark), A.
    pub shot_current: f64,
    /// Kelvin; sets Rf thermal noise.
    pub temperature: f64,
}

#[inline]
fn omega(f: f64) -> f64 {
    2.0 * std::f64::consts::PI * f
}

impl TiaNetwork {
    pub fn new(point: &DesignPoint, pd: &PhotodiodeParams, oa: &OpAmpParams) -> Result<Self> {
        Ok(TiaNetwork {
            rf: point.rf,
            cf: point.cf,
            c_in: diode_capacitance(pd, point.vd)? + oa.input_capacitance,
            dc_gain: oa.dc_gain,
            gbw: oa.gbw,
        })
    }

    /// All transfer functions at one frequency, sharing intermediate terms.
    pub fn response(&self, f: f64) -> Response {
        let zf = self.feedback_impedance(f);
        let noise_gain = Complex64::new(1.0, 0.0) + Complex64::new(0.0, omega(f) * self.c_in) * zf;
        let loop_gain = self.open_loop_gain(f) / noise_gain;
        let closed_loop = loop_gain / (Complex64::new(1.0, 0.0) + loop_gain);
        Response {
            loop_gain,
            noise_gain,
            closed_loop,
            transimpedance: zf * closed_loop,
        }
    }

    pub fn open_loop_gain(&self, f: f64) -> Complex64 {
        Complex64::new(self.dc_gain, 0.0) / Complex64::new(1.0, f * self.dc_gain / self.gbw)
    }

    pub fn feedback_impedance(&self, f: f64) -> Complex64 {
        Complex64::new(self.rf, 0.0) / Complex64::new(1.0, omega(f) * self.rf * self.cf)
    }

    /// `1 + Zf / Zin`.
    pub fn noise_gain(&self, f: f64) -> Complex64 {
        Complex64::new(1.0, 0.0) + Complex64::new(0.0, omega(f) * self.c_in) * self.feedback_impedance(f)
    }

    pub fn loop_gain(&self, f: f64) -> Complex64 {
        self.open_loop_gain(f) / self.noise_gain(f)
    }

    /// `T / (1 + T)`.
    pub fn closed_loop_gain(&self, f: f64) -> Complex64 {
        let t = self.loop_gain(f);
        t / (Complex64::new(1.0, 0.0) + t)
    }

    pub fn transimpedance(&self, f: f64) -> Complex64 {
        self.feedback_impedance(f) * self.closed_loop_gain(f)
    }

    fn search_ceiling(&self) -> f64 {
        10.0 * self.gbw
    }

    /// -3 dB frequency of `|ZT|` relative to Rf.
    pub fn bandwidth(&self) -> Result<f64> {
        let target = self.rf / std::f64::consts::SQRT_2;
        first_crossing(F_MIN, self.search_ceiling(), |f| {
            self.response(f).transimpedance.norm() - target
        })
        .ok_or_else(|| {
            Error::Model(format!(
                "no -3 dB crossing in [{F_MIN}, {}] Hz for rf={}, cf={}, c_in={}",
                self.search_ceiling(),
                self.rf,
                self.cf,
                self.c_in
            ))
        })
    }

    /// Unity loop-gain frequency, if `|T|` crosses 1 within the search range.
    pub fn crossover(&self) -> Option<f64> {
        first_crossing(F_MIN, self.search_ceiling(), |f| self.loop_gain(f).norm() - 1.0)
    }

    /// Degrees in [0, 180]; 180 when the loop gain never reaches unity.
    pub fn phase_margin(&self) -> f64 {
        if self.loop_gain(F_MIN).norm() <= 1.0 {
            return 180.0;
        }
        let fc = self.crossover().unwrap_or_else(|| self.search_ceiling());
        (180.0 + self.loop_gain(fc).arg().to_degrees()).clamp(0.0, 180.0)
    }

    /// Output noise power spectral density, V²/Hz.
    pub fn output_noise_psd(&self, f: f64, noise: &NoiseSources) -> f64 {
        let r = self.response(f);
        let current_psd = noise.current_density * noise.current_density
            + 2.0 * ELEMENTARY_CHARGE * noise.shot_current
            + 4.0 * BOLTZMANN * noise.temperature / self.rf;
        noise.voltage_density * noise.voltage_density * (r.noise_gain * r.closed_loop).norm_sqr()
            + current_psd * r.transimpedance.norm_sqr()
    }

    /// RMS output noise from 1 Hz over `decades` decades (trapezoid rule on a
    /// logarithmic grid).
    pub fn output_noise_rms(&self, noise: &NoiseSources, decades: f64) -> f64 {
        let intervals = (decades * NOISE_POINTS_PER_DECADE as f64).ceil().max(1.0) as usize;
        let ratio = 10f64.powf(decades / intervals as f64);
        let mut f_prev = F_MIN;
        let mut s_prev = self.output_noise_psd(f_prev, noise);
        let mut total = 0.0;
        for _ in 0..intervals {
            let f = f_prev * ratio;
            let s = self.output_noise_psd(f, noise);
            total += 0.5 * (s + s_prev) * (f - f_prev);
            f_prev = f;
            s_prev = s;
        }
        total.sqrt()
    }

    pub fn default_noise_decades(&self) -> f64 {
        (10.0 * self.gbw).min(NOISE_F_CAP).log10()
    }
}

/// First root of `g` on a log grid from `f_lo` to `f_hi` where `g` goes from
/// positive to non-positive, refined by bisection in log frequency.
fn first_crossing(f_lo: f64, f_hi: f64, g: impl Fn(f64) -> f64) -> Option<f64> {
    let decades = (f_hi / f_lo).log10();
    if !(decades > 0.0) || !(g(f_lo) > 0.0) {
        return None;
    }
    let steps = (decades * SEARCH_POINTS_PER_DECADE as f64).ceil() as usize;
    let ratio = 10f64.powf(decades / steps as f64);
    let mut lo = f_lo;
    for i in 1..=steps {
        let hi = if i == steps { f_hi } else { lo * ratio };
        if g(hi) <= 0.0 {
            return Some(bisect(lo, hi, &g));
        }
        lo = hi;
    }
    None
}

fn bisect(mut lo: f64, mut hi: f64, g: &impl Fn(f64) -> f64) -> f64 {
    while hi - lo > SEARCH_REL_TOL * lo {
        let mid = (lo * hi).sqrt();
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

pub fn loop_gain(point: &DesignPoint, pd: &PhotodiodeParams, oa: &OpAmpParams, f: f64) -> Result<Complex64> {
    Ok(TiaNetwork::new(point, pd, oa)?.loop_gain(f))
}

pub fn bandwidth(point: &DesignPoint, pd: &PhotodiodeParams, oa: &OpAmpParams) -> Result<f64> {
    TiaNetwork::new(point, pd, oa)?.bandwidth()
}

pub fn phase_margin(point: &DesignPoint, pd: &PhotodiodeParams, oa: &OpAmpParams) -> Result<f64> {
    Ok(TiaNetwork::new(point, pd, oa)?.phase_margin())
}

pub fn photocurrent(pd: &PhotodiodeParams, cond: &OperatingConditions) -> f64 {
    pd.responsivity * cond.min_irradiance * pd.active_area
}

/// Signal-to-noise ratio at minimum irradiance, dB.
pub fn snr(
    point: &DesignPoint,
    pd: &PhotodiodeParams,
    oa: &OpAmpParams,
    cond: &OperatingConditions,
) -> Result<f64> {
    let net = TiaNetwork::new(point, pd, oa)?;
    Ok(snr_with(&net, pd, oa, cond))
}

fn snr_with(net: &TiaNetwork, pd: &PhotodiodeParams, oa: &OpAmpParams, cond: &OperatingConditions) -> f64 {
    let i_ph = photocurrent(pd, cond);
    let noise = NoiseSources {
        voltage_density: oa.voltage_noise_density,
        current_density: oa.current_noise_density,
        shot_current: i_ph + pd.dark_current,
        temperature: cond.temperature,
    };
    let decades = cond
        .noise_integration_decades
        .unwrap_or_else(|| net.default_noise_decades());
    let v_signal = i_ph * net.rf;
    20.0 * (v_signal / net.output_noise_rms(&noise, decades)).log10()
}

/// All three performance variables for one design point.
pub fn evaluate_performance(
    point: &DesignPoint,
    pd: &PhotodiodeParams,
    oa: &OpAmpParams,
    cond: &OperatingConditions,
) -> Result<PerformanceVariables> {
    let net = TiaNetwork::new(point, pd, oa)?;
    Ok(PerformanceVariables {
        bandwidth_hz: net.bandwidth()?,
        phase_margin_deg: net.phase_margin(),
        snr_db: snr_with(&net, pd, oa, cond),
    })
}

/// Pluggable evaluator: maps a design point to its performance variables.
pub trait PerformanceModel: Sync {
    fn evaluate(&self, point: &DesignPoint) -> Result<PerformanceVariables>;
}

/// The photodiode + op-amp TIA model.
#[derive(Debug, Clone, PartialEq)]
pub struct CircuitModel {
    pub photodiode: PhotodiodeParams,
    pub opamp: OpAmpParams,
    pub conditions: OperatingConditions,
}

impl CircuitModel {
    pub fn new(
        photodiode: PhotodiodeParams,
        opamp: OpAmpParams,
        conditions: OperatingConditions,
    ) -> Result<Self> {
        photodiode.validate()?;
        opamp.validate()?;
        conditions.validate()?;
        Ok(CircuitModel {
            photodiode,
            opamp,
            conditions,
        })
    }
}

impl PerformanceModel for CircuitModel {
    fn evaluate(&self, point: &DesignPoint) -> Result<PerformanceVariables> {
        evaluate_performance(point, &self.photodiode, &self.opamp, &self.conditions)
    }
}
