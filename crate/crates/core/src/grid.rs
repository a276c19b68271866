//! Graded grids in the log-time variable `u = log(t/a)` and the samples
//! that live on them.

use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Nodes `u_i = L (i/N)^q`, `i = 0..=N`, on `[0, L]`.
///
/// `q > 1` clusters nodes toward `u = 0`, where solutions carry fractional
/// powers of `u`.
#[derive(Debug, Clone, PartialEq)]
pub struct LogGrid {
    a: f64,
    length: f64,
    cells: usize,
    grading: f64,
    nodes: Vec<f64>,
}

impl LogGrid {
    /// Builds the grid. `cells` is N, so there are N + 1 nodes.
    pub fn new(a: f64, length: f64, cells: usize, grading: f64) -> Result<Self> {
        if !(a > 0.0) || !a.is_finite() {
            return Err(Error::domain("a", a, "a > 0"));
        }
        if !(length > 0.0) || !length.is_finite() {
            return Err(Error::domain("L", length, "L > 0"));
        }
        if cells < 2 {
            return Err(Error::domain("N", cells as f64, "N >= 2"));
        }
        if !(grading >= 1.0) || !grading.is_finite() {
            return Err(Error::domain("q", grading, "q >= 1"));
        }
        let n = cells as f64;
        let mut nodes: Vec<f64> = (0..=cells)
            .map(|i| length * libm::pow(i as f64 / n, grading))
            .collect();
        nodes[cells] = length;
        if nodes.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::domain(
                "N",
                n,
                "a node count whose graded nodes are strictly increasing",
            ));
        }
        Ok(LogGrid {
            a,
            length,
            cells,
            grading,
            nodes,
        })
    }

    /// Uniformly spaced grid (q = 1).
    pub fn uniform(a: f64, length: f64, cells: usize) -> Result<Self> {
        Self::new(a, length, cells, 1.0)
    }

    pub fn base(&self) -> f64 {
        self.a
    }

    /// L = log(t_max / a).
    pub fn length(&self) -> f64 {
        self.length
    }

    /// Number of cells N.
    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn grading(&self) -> f64 {
        self.grading
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Physical time `t_i = a e^{u_i}` at node i.
    pub fn time(&self, i: usize) -> f64 {
        self.a * libm::exp(self.nodes[i])
    }

    /// Samples `f(u)` at every node.
    pub fn sample(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        self.nodes.iter().map(|&u| f(u)).collect()
    }
}

pub(crate) fn same_grid(a: &Arc<LogGrid>, b: &Arc<LogGrid>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

fn check_values(grid: &LogGrid, values: &[f64], what: &'static str) -> Result<()> {
    if values.len() != grid.len() {
        return Err(Error::LengthMismatch {
            expected: grid.len(),
            found: values.len(),
        });
    }
    if let Some(index) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { what, index });
    }
    Ok(())
}

/// Function values at the nodes of a grid.
///
/// Values are finite, with one exception: outputs of the derivative
/// operators store NaN at `u = 0` when the derivative is unbounded there.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: Arc<LogGrid>,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(grid: &Arc<LogGrid>, values: Vec<f64>) -> Result<Self> {
        check_values(grid, &values, "grid function")?;
        Ok(GridFunction {
            grid: Arc::clone(grid),
            values,
        })
    }

    pub fn from_fn(grid: &Arc<LogGrid>, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(grid, grid.sample(f))
    }

    /// Skips validation; used for operator outputs whose origin value may be NaN.
    pub(crate) fn from_parts(grid: &Arc<LogGrid>, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        GridFunction {
            grid: Arc::clone(grid),
            values,
        }
    }

    pub fn grid(&self) -> &Arc<LogGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Values at nodes 1..N-1.
    pub fn interior(&self) -> &[f64] {
        &self.values[1..self.values.len() - 1]
    }
}

/// Samples of the weighted unknown `z(u) = u^{1-γ} x(t)`.
///
/// `z` is continuous on `[0, L]`; `z(0)` is the weighted initial value.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedSample {
    grid: Arc<LogGrid>,
    gamma: f64,
    z: Vec<f64>,
}

impl WeightedSample {
    pub fn new(grid: &Arc<LogGrid>, gamma: f64, z: Vec<f64>) -> Result<Self> {
        if !(gamma > 0.0 && gamma <= 1.0) {
            return Err(Error::domain("gamma", gamma, "0 < gamma <= 1"));
        }
        check_values(grid, &z, "weighted sample")?;
        Ok(WeightedSample {
            grid: Arc::clone(grid),
            gamma,
            z,
        })
    }

    /// Constant sample `z ≡ value`.
    pub fn constant(grid: &Arc<LogGrid>, gamma: f64, value: f64) -> Result<Self> {
        Self::new(grid, gamma, alloc::vec![value; grid.len()])
    }

    pub fn grid(&self) -> &Arc<LogGrid> {
        &self.grid
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn z(&self) -> &[f64] {
        &self.z
    }

    /// The weighted limit `z(0)`.
    pub fn origin(&self) -> f64 {
        self.z[0]
    }

    /// `x(t_i) = u_i^{γ-1} z_i`. `None` at `u = 0` when `γ < 1`, where `x`
    /// is singular.
    pub fn unweighted(&self, i: usize) -> Option<f64> {
        if self.gamma == 1.0 {
            return Some(self.z[i]);
        }
        if i == 0 {
            return None;
        }
        Some(libm::pow(self.grid.nodes()[i], self.gamma - 1.0) * self.z[i])
    }

    /// Largest nodewise |self - other|.
    pub fn sup_distance(&self, other: &WeightedSample) -> Result<f64> {
        if !same_grid(&self.grid, &other.grid) {
            return Err(Error::GridMismatch);
        }
        Ok(self
            .z
            .iter()
            .zip(&other.z)
            .map(|(a, b)| libm::fabs(a - b))
            .fold(0.0, f64::max))
    }
}
