//! Discrete design space: commercial component series crossed with a
//! discretized photodiode bias range.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::landscape::Genes;

const E6: [f64; 6] = [1.0, 1.5, 2.2, 3.3, 4.7, 6.8];

const E12: [f64; 12] = [1.0, 1.2, 1.5, 1.8, 2.2, 2.7, 3.3, 3.9, 4.7, 5.6, 6.8, 8.2];

const E24: [f64; 24] = [
    1.0, 1.1, 1.2, 1.3, 1.5, 1.6, 1.8, 2.0, 2.2, 2.4, 2.7, 3.0, 3.3, 3.6, 3.9, 4.3, 4.7, 5.1,
    5.6, 6.2, 6.8, 7.5, 8.2, 9.1,
];

const E48: [f64; 48] = [
    1.00, 1.05, 1.10, 1.15, 1.21, 1.27, 1.33, 1.40, 1.47, 1.54, 1.62, 1.69, 1.78, 1.87, 1.96,
    2.05, 2.15, 2.26, 2.37, 2.49, 2.61, 2.74, 2.87, 3.01, 3.16, 3.32, 3.48, 3.65, 3.83, 4.02,
    4.22, 4.42, 4.64, 4.87, 5.11, 5.36, 5.62, 5.90, 6.19, 6.49, 6.81, 7.15, 7.50, 7.87, 8.25,
    8.66, 9.09, 9.53,
];

const E96: [f64; 96] = [
    1.00, 1.02, 1.05, 1.07, 1.10, 1.13, 1.15, 1.18, 1.21, 1.24, 1.27, 1.30, 1.33, 1.37, 1.40,
    1.43, 1.47, 1.50, 1.54, 1.58, 1.62, 1.65, 1.69, 1.74, 1.78, 1.82, 1.87, 1.91, 1.96, 2.00,
    2.05, 2.10, 2.15, 2.21, 2.26, 2.32, 2.37, 2.43, 2.49, 2.55, 2.61, 2.67, 2.74, 2.80, 2.87,
    2.94, 3.01, 3.09, 3.16, 3.24, 3.32, 3.40, 3.48, 3.57, 3.65, 3.74, 3.83, 3.92, 4.02, 4.12,
    4.22, 4.32, 4.42, 4.53, 4.64, 4.75, 4.87, 4.99, 5.11, 5.23, 5.36, 5.49, 5.62, 5.76, 5.90,
    6.04, 6.19, 6.34, 6.49, 6.65, 6.81, 6.98, 7.15, 7.32, 7.50, 7.68, 7.87, 8.06, 8.25, 8.45,
    8.66, 8.87, 9.09, 9.31, 9.53, 9.76,
];

/// IEC 60063 preferred-number series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ESeries {
    E6,
    E12,
    E24,
    E48,
    E96,
}

impl ESeries {
    pub fn mantissas(self) -> &'static [f64] {
        match self {
            ESeries::E6 => &E6,
            ESeries::E12 => &E12,
            ESeries::E24 => &E24,
            ESeries::E48 => &E48,
            ESeries::E96 => &E96,
        }
    }

    pub fn points_per_decade(self) -> usize {
        self.mantissas().len()
    }
}

impl FromStr for ESeries {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "E6" => Ok(ESeries::E6),
            "E12" => Ok(ESeries::E12),
            "E24" => Ok(ESeries::E24),
            "E48" => Ok(ESeries::E48),
            "E96" => Ok(ESeries::E96),
            _ => Err(Error::UnknownSeries(s.to_string())),
        }
    }
}

impl fmt::Display for ESeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "E{}", self.points_per_decade())
    }
}

/// A series restricted to the decades `10^decade_min ..< 10^decade_max`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ESeriesSpec {
    pub series: ESeries,
    pub decade_min: i32,
    pub decade_max: i32,
}

impl ESeriesSpec {
    pub fn new(series: ESeries, decade_min: i32, decade_max: i32) -> Result<Self> {
        let spec = ESeriesSpec {
            series,
            decade_min,
            decade_max,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.decade_min >= self.decade_max {
            return Err(Error::EmptyDecadeRange {
                min: self.decade_min,
                max: self.decade_max,
            });
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.series.points_per_decade() * (self.decade_max - self.decade_min) as usize
    }

    pub fn is_empty(&self) -> bool {
        self.decade_max <= self.decade_min
    }
}

// Dividing by an exact power of ten keeps sub-unit decades (pF values)
// at the nearest representable double, e.g. 3.6 / 1e12 == 3.6e-12.
fn scale_decade(mantissa: f64, decade: i32) -> f64 {
    if decade >= 0 {
        mantissa * 10f64.powi(decade)
    } else {
        mantissa / 10f64.powi(-decade)
    }
}

/// Sorted component values of a series over its decade range.
pub fn e_series_values(spec: &ESeriesSpec) -> Result<Vec<f64>> {
    spec.validate()?;
    let mantissas = spec.series.mantissas();
    Ok((spec.decade_min..spec.decade_max)
        .flat_map(|decade| mantissas.iter().map(move |&m| scale_decade(m, decade)))
        .collect())
}

/// `n` linearly spaced bias voltages from `v_min` to `v_max` inclusive.
pub fn discretize_bias(v_min: f64, v_max: f64, n: usize) -> Result<Vec<f64>> {
    let valid = n >= 2 && v_min.is_finite() && v_max.is_finite() && v_min >= 0.0 && v_max > v_min;
    if !valid {
        return Err(Error::InvalidBiasRange {
            min: v_min,
            max: v_max,
            count: n,
        });
    }
    let step = (v_max - v_min) / (n - 1) as f64;
    let mut values: Vec<f64> = (0..n).map(|i| v_min + step * i as f64).collect();
    values[n - 1] = v_max;
    Ok(values)
}

/// One candidate circuit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DesignPoint {
    /// Feedback resistance, ohms.
    pub rf: f64,
    /// Feedback capacitance, farads.
    pub cf: f64,
    /// Photodiode reverse bias, volts.
    pub vd: f64,
}

/// Axis positions of the three genes.
pub const RF_AXIS: usize = 0;
pub const CF_AXIS: usize = 1;
pub const VD_AXIS: usize = 2;

/// The discrete grid of allowed (Rf, Cf, VD) values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignSpace {
    rf_values: Vec<f64>,
    cf_values: Vec<f64>,
    vd_values: Vec<f64>,
    #[serde(skip)]
    shape: [usize; 3],
}

fn check_axis(name: &str, values: &[f64], allow_zero: bool) -> Result<()> {
    if values.is_empty() {
        return Err(Error::InvalidSpace(format!("{name} axis is empty")));
    }
    for &v in values {
        let ok = v.is_finite() && (v > 0.0 || (allow_zero && v == 0.0));
        if !ok {
            return Err(Error::InvalidSpace(format!("{name} value {v} out of domain")));
        }
    }
    if values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidSpace(format!(
            "{name} axis is not strictly increasing"
        )));
    }
    Ok(())
}

impl DesignSpace {
    pub fn new(rf_values: Vec<f64>, cf_values: Vec<f64>, vd_values: Vec<f64>) -> Result<Self> {
        check_axis("rf", &rf_values, false)?;
        check_axis("cf", &cf_values, false)?;
        check_axis("vd", &vd_values, true)?;
        let shape = [rf_values.len(), cf_values.len(), vd_values.len()];
        Ok(DesignSpace {
            rf_values,
            cf_values,
            vd_values,
            shape,
        })
    }

    pub fn from_series(rf: &ESeriesSpec, cf: &ESeriesSpec, vd: (f64, f64, usize)) -> Result<Self> {
        Self::new(
            e_series_values(rf)?,
            e_series_values(cf)?,
            discretize_bias(vd.0, vd.1, vd.2)?,
        )
    }

    pub fn rf_values(&self) -> &[f64] {
        &self.rf_values
    }

    pub fn cf_values(&self) -> &[f64] {
        &self.cf_values
    }

    pub fn vd_values(&self) -> &[f64] {
        &self.vd_values
    }

    pub fn axis(&self, axis: usize) -> &[f64] {
        match axis {
            RF_AXIS => &self.rf_values,
            CF_AXIS => &self.cf_values,
            VD_AXIS => &self.vd_values,
            _ => panic!("design space has three axes, got axis {axis}"),
        }
    }

    /// Axis lengths in (rf, cf, vd) order.
    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn cardinality(&self) -> u64 {
        self.shape.iter().map(|&n| n as u64).product()
    }

    /// Resolves axis indices to component values. Panics on out-of-range indices.
    pub fn point(&self, genes: &[usize]) -> DesignPoint {
        DesignPoint {
            rf: self.rf_values[genes[RF_AXIS]],
            cf: self.cf_values[genes[CF_AXIS]],
            vd: self.vd_values[genes[VD_AXIS]],
        }
    }

    /// Exact-match lookup of a point's axis indices.
    pub fn index_of(&self, point: &DesignPoint) -> Option<Genes> {
        let find = |axis: &[f64], v: f64| axis.iter().position(|&x| x == v);
        Some(Genes::from_slice(&[
            find(&self.rf_values, point.rf)?,
            find(&self.cf_values, point.cf)?,
            find(&self.vd_values, point.vd)?,
        ]))
    }

    /// Index of the axis value closest to `value` (relative distance).
    pub fn nearest_index(&self, axis: usize, value: f64) -> usize {
        let values = self.axis(axis);
        let mut best = 0;
        let mut best_dist = f64::INFINITY;
        for (i, &v) in values.iter().enumerate() {
            let dist = (v - value).abs();
            if dist < best_dist {
                best = i;
                best_dist = dist;
            }
        }
        best
    }

    /// All points in lexicographic order, rf outermost and vd innermost.
    pub fn enumerate(&self) -> impl Iterator<Item = DesignPoint> + '_ {
        GridIter::new(self.shape()).map(move |genes| self.point(&genes))
    }

    /// Independent uniform draw of each axis index.
    pub fn sample_uniform<R: Rng + ?Sized>(&self, rng: &mut R) -> DesignPoint {
        self.point(&sample_indices(self.shape(), rng))
    }
}

/// Draws one uniform index per axis, axes in order.
pub fn sample_indices<R: Rng + ?Sized>(shape: &[usize], rng: &mut R) -> Genes {
    shape.iter().map(|&n| rng.random_range(0..n)).collect()
}

/// Row-major flat index -> axis indices (last axis fastest).
pub fn unflatten(shape: &[usize], mut flat: u64) -> Genes {
    let mut genes = Genes::from_elem(0, shape.len());
    for (k, &n) in shape.iter().enumerate().rev() {
        genes[k] = (flat % n as u64) as usize;
        flat /= n as u64;
    }
    genes
}

pub fn flatten(shape: &[usize], genes: &[usize]) -> u64 {
    genes
        .iter()
        .zip(shape)
        .fold(0u64, |acc, (&g, &n)| acc * n as u64 + g as u64)
}

/// Lexicographic iterator over every index tuple of a grid.
#[derive(Debug, Clone)]
pub struct GridIter {
    shape: Genes,
    next: Option<Genes>,
}

impl GridIter {
    pub fn new(shape: &[usize]) -> Self {
        let empty = shape.is_empty() || shape.contains(&0);
        GridIter {
            shape: Genes::from_slice(shape),
            next: (!empty).then(|| Genes::from_elem(0, shape.len())),
        }
    }
}

impl Iterator for GridIter {
    type Item = Genes;

    fn next(&mut self) -> Option<Genes> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        for k in (0..succ.len()).rev() {
            succ[k] += 1;
            if succ[k] < self.shape[k] {
                self.next = Some(succ);
                break;
            }
            succ[k] = 0;
        }
        Some(current)
    }
}
