use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::{Complex, QdError, Real, Result};

/// Identity of a boundary grid: per-curve offsets plus a fingerprint of the
/// sample positions.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Grid {
    offsets: Arc<[usize]>,
    fingerprint: u64,
}

impl Grid {
    pub(crate) fn new(offsets: Vec<usize>, samples: &[Complex]) -> Self {
        let mut h = std::collections::hash_map::DefaultHasher::new();
        offsets.hash(&mut h);
        for z in samples {
            z.re.to_bits().hash(&mut h);
            z.im.to_bits().hash(&mut h);
        }
        Self {
            offsets: offsets.into(),
            fingerprint: h.finish(),
        }
    }

    pub fn len(&self) -> usize {
        *self.offsets.last().unwrap_or(&0)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn n_curves(&self) -> usize {
        self.offsets.len().saturating_sub(1)
    }

    pub fn range(&self, curve: usize) -> std::ops::Range<usize> {
        self.offsets[curve]..self.offsets[curve + 1]
    }

    /// Same per-curve sample counts, possibly at different positions.
    pub fn same_layout(&self, other: &Grid) -> bool {
        self.offsets == other.offsets
    }

    pub fn check(&self, other: &Grid) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(QdError::GridMismatch(format!(
                "grids differ (sizes {:?} vs {:?})",
                self.offsets, other.offsets
            )))
        }
    }
}

/// Complex samples on the concatenated boundary grid of a domain.
#[derive(Debug, Clone)]
pub struct BoundaryFunction {
    values: Vec<Complex>,
    grid: Grid,
}

impl BoundaryFunction {
    pub fn new(grid: Grid, values: Vec<Complex>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(QdError::GridMismatch(format!(
                "{} values for a grid of {} nodes",
                values.len(),
                grid.len()
            )));
        }
        Ok(Self { values, grid })
    }

    pub fn constant(grid: &Grid, c: Complex) -> Self {
        Self {
            values: vec![c; grid.len()],
            grid: grid.clone(),
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Samples on one boundary curve.
    pub fn curve(&self, k: usize) -> &[Complex] {
        &self.values[self.grid.range(k)]
    }

    pub fn map(&self, f: impl Fn(Complex) -> Complex) -> Self {
        Self {
            values: self.values.iter().map(|&v| f(v)).collect(),
            grid: self.grid.clone(),
        }
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(Complex, Complex) -> Complex) -> Result<Self> {
        self.grid.check(&other.grid)?;
        Ok(Self {
            values: self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
            grid: self.grid.clone(),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a / b)
    }

    pub fn scale(&self, c: Complex) -> Self {
        self.map(|v| v * c)
    }

    pub fn conj(&self) -> Self {
        self.map(|v| v.conj())
    }

    /// `self + c·other`, in place.
    pub fn axpy(&mut self, c: Complex, other: &Self) -> Result<()> {
        self.grid.check(&other.grid)?;
        self.values.iter_mut().zip(&other.values).for_each(|(a, b)| *a += c * b);
        Ok(())
    }

    pub fn max_abs(&self) -> Real {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Max-norm distance to another function on the same grid.
    pub fn max_diff(&self, other: &Self) -> Result<Real> {
        self.grid.check(&other.grid)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }
}
