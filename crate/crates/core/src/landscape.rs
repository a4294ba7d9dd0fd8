//! Merit landscapes over discrete index grids.
//!
//! Search algorithms never see component values directly: they move through
//! axis indices (`Genes`) and ask a [`Landscape`] for the merit there. The
//! circuit landscape resolves indices through a [`DesignSpace`], runs the
//! performance model and applies the merit specification; a [`MeritTable`]
//! replays a precomputed sweep of any landscape.

use std::fmt::Debug;

use rayon::prelude::*;
use smallvec::SmallVec;

use crate::circuit::{CircuitModel, PerformanceModel, PerformanceVariables};
use crate::error::{Error, Result};
use crate::merit::{global_merit, MeritBreakdown, MeritSpec};
use crate::space::{unflatten, DesignSpace};

/// Axis indices of one grid point.
pub type Genes = SmallVec<[usize; 4]>;

/// Anything with a scalar global merit in [0, 1].
pub trait Fitness: Copy + Send + Sync + Debug + PartialEq {
    fn global(&self) -> f64;
}

impl Fitness for f64 {
    fn global(&self) -> f64 {
        *self
    }
}

impl Fitness for MeritBreakdown {
    fn global(&self) -> f64 {
        self.global
    }
}

pub trait Landscape: Sync {
    type Merit: Fitness;

    /// Axis lengths.
    fn shape(&self) -> &[usize];

    fn evaluate(&self, genes: &[usize]) -> Self::Merit;

    fn cardinality(&self) -> u64 {
        self.shape().iter().map(|&n| n as u64).product()
    }
}

impl<L: Landscape + ?Sized> Landscape for &L {
    type Merit = L::Merit;

    fn shape(&self) -> &[usize] {
        (**self).shape()
    }

    fn evaluate(&self, genes: &[usize]) -> Self::Merit {
        (**self).evaluate(genes)
    }
}

/// Design space + performance model + merit specification.
#[derive(Debug, Clone)]
pub struct CircuitLandscape<M = CircuitModel> {
    space: DesignSpace,
    model: M,
    spec: MeritSpec,
}

impl<M: PerformanceModel> CircuitLandscape<M> {
    pub fn new(space: DesignSpace, model: M, spec: MeritSpec) -> Result<Self> {
        spec.validate()?;
        Ok(CircuitLandscape { space, model, spec })
    }

    pub fn space(&self) -> &DesignSpace {
        &self.space
    }

    pub fn model(&self) -> &M {
        &self.model
    }

    pub fn merit_spec(&self) -> &MeritSpec {
        &self.spec
    }

    pub fn performance(&self, genes: &[usize]) -> Result<PerformanceVariables> {
        self.model.evaluate(&self.space.point(genes))
    }

    /// Merit of a performance result; model errors score zero.
    pub fn score(&self, performance: &Result<PerformanceVariables>) -> MeritBreakdown {
        match performance {
            Ok(p) => global_merit(p, &self.spec),
            Err(_) => MeritBreakdown::ZERO,
        }
    }
}

impl<M: PerformanceModel> Landscape for CircuitLandscape<M> {
    type Merit = MeritBreakdown;

    fn shape(&self) -> &[usize] {
        self.space.shape()
    }

    fn evaluate(&self, genes: &[usize]) -> MeritBreakdown {
        self.score(&self.performance(genes))
    }
}

/// A fully tabulated landscape, stored in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct MeritTable<F> {
    shape: Vec<usize>,
    merits: Vec<F>,
}

impl<F: Fitness> MeritTable<F> {
    /// Evaluates every grid point (in parallel; the result is independent of
    /// the thread count).
    pub fn build<L: Landscape<Merit = F>>(landscape: &L) -> Self {
        let shape = landscape.shape().to_vec();
        let merits = (0..landscape.cardinality())
            .into_par_iter()
            .map(|flat| landscape.evaluate(&unflatten(&shape, flat)))
            .collect();
        MeritTable { shape, merits }
    }

    pub fn from_vec(shape: Vec<usize>, merits: Vec<F>) -> Result<Self> {
        let expected: u64 = shape.iter().map(|&n| n as u64).product();
        if shape.is_empty() || expected != merits.len() as u64 {
            return Err(Error::InvalidSpace(format!(
                "table of {} merits does not match shape {shape:?}",
                merits.len()
            )));
        }
        Ok(MeritTable { shape, merits })
    }

    pub fn merits(&self) -> &[F] {
        &self.merits
    }

    pub fn get_flat(&self, flat: usize) -> F {
        self.merits[flat]
    }

    /// Fraction of grid points with zero global merit.
    pub fn zero_fraction(&self) -> f64 {
        let zeros = self.merits.iter().filter(|m| m.global() <= 0.0).count();
        zeros as f64 / self.merits.len() as f64
    }
}

impl<F: Fitness> Landscape for MeritTable<F> {
    type Merit = F;

    fn shape(&self) -> &[usize] {
        &self.shape
    }

    fn evaluate(&self, genes: &[usize]) -> F {
        let mut flat = 0usize;
        for (&g, &n) in genes.iter().zip(&self.shape) {
            flat = flat * n + g;
        }
        self.merits[flat]
    }
}

/// Synthetic test landscape `max(0, 1 - sum_k ((g_k - c_k) / h_k)^2)`.
///
/// The sublevel set `{merit >= 1 - e}` is a d-dimensional ellipsoid whose
/// volume scales as `e^(d/2)`, which makes the expected random-search error
/// decay law known in closed form.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparableQuadratic {
    shape: Vec<usize>,
    center: Vec<f64>,
    half_width: Vec<f64>,
}

impl SeparableQuadratic {
    pub fn new(shape: Vec<usize>, center: Vec<f64>, half_width: Vec<f64>) -> Result<Self> {
        let d = shape.len();
        if d == 0 || center.len() != d || half_width.len() != d {
            return Err(Error::InvalidSpace("dimension mismatch".into()));
        }
        if shape.contains(&0) || half_width.iter().any(|&h| !(h > 0.0)) {
            return Err(Error::InvalidSpace("empty axis or non-positive width".into()));
        }
        Ok(SeparableQuadratic {
            shape,
            center,
            half_width,
        })
    }

    /// Centred optimum on a grid point, widths equal to half the axis length.
    pub fn centered(shape: Vec<usize>) -> Result<Self> {
        let center = shape.iter().map(|&n| (n / 2) as f64).collect();
        let half_width = shape.iter().map(|&n| n as f64 / 2.0).collect();
        Self::new(shape, center, half_width)
    }
}

impl Landscape for SeparableQuadratic {
    type Merit = f64;

    fn shape(&self) -> &[usize] {
        &self.shape
    }

    fn evaluate(&self, genes: &[usize]) -> f64 {
        let offset: f64 = genes
            .iter()
            .zip(self.center.iter().zip(&self.half_width))
            .map(|(&g, (&c, &h))| {
                let u = (g as f64 - c) / h;
                u * u
            })
            .sum();
        (1.0 - offset).max(0.0)
    }
}
