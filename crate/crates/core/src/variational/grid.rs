//! Radial grids and grid functions on `[0, R]`.

use serde::{Deserialize, Serialize};

use super::VariationalError;

/// Nodes `0 = r_0 < … < r_J = R` with radial weight `r^{N−1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    pub nodes: Vec<f64>,
    pub n_dim: usize,
}

impl RadialGrid {
    pub fn from_nodes(nodes: Vec<f64>, n_dim: usize) -> Result<Self, VariationalError> {
        if nodes.len() < 2 || nodes[0] != 0.0 {
            return Err(VariationalError::Domain("grid needs ≥ 2 nodes starting at 0".into()));
        }
        if nodes.windows(2).any(|w| !(w[1] > w[0])) || nodes.iter().any(|x| !x.is_finite()) {
            return Err(VariationalError::Domain("grid nodes must be finite and strictly increasing".into()));
        }
        if n_dim == 0 {
            return Err(VariationalError::Domain("dimension must be at least 1".into()));
        }
        Ok(Self { nodes, n_dim })
    }

    pub fn uniform(cells: usize, radius: f64, n_dim: usize) -> Result<Self, VariationalError> {
        Self::graded(cells, radius, n_dim, 1.0)
    }

    /// `r_j = R (1 − (1 − j/J)^g)`: for `g > 1` cells shrink towards `r = R`.
    pub fn graded(cells: usize, radius: f64, n_dim: usize, grading: f64) -> Result<Self, VariationalError> {
        if cells == 0 || !(radius > 0.0) || !(grading >= 1.0) {
            return Err(VariationalError::Domain(format!(
                "need cells ≥ 1, R > 0, grading ≥ 1 (got {cells}, {radius}, {grading})"
            )));
        }
        let nodes = (0..=cells)
            .map(|j| {
                if j == cells {
                    radius
                } else {
                    radius * (1.0 - (1.0 - j as f64 / cells as f64).powf(grading))
                }
            })
            .collect();
        Self::from_nodes(nodes, n_dim)
    }

    pub fn radius(&self) -> f64 {
        *self.nodes.last().expect("nonempty")
    }

    pub fn cells(&self) -> usize {
        self.nodes.len() - 1
    }

    /// `∫_{r_j}^{r_{j+1}} r^{N−1} dr`
    pub fn cell_weight(&self, j: usize) -> f64 {
        let n = self.n_dim as i32;
        (self.nodes[j + 1].powi(n) - self.nodes[j].powi(n)) / n as f64
    }

    pub fn cell_width(&self, j: usize) -> f64 {
        self.nodes[j + 1] - self.nodes[j]
    }

    pub fn cell_mid(&self, j: usize) -> f64 {
        0.5 * (self.nodes[j] + self.nodes[j + 1])
    }

    /// Lumped nodal weights: half of each adjacent cell weight.
    pub fn lumped_weights(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.nodes.len()];
        for j in 0..self.cells() {
            let w = self.cell_weight(j);
            d[j] += 0.5 * w;
            d[j + 1] += 0.5 * w;
        }
        d
    }

    pub fn max_width(&self) -> f64 {
        (0..self.cells()).map(|j| self.cell_width(j)).fold(0.0, f64::max)
    }
}

/// Nodal values with `u_J = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    pub grid: RadialGrid,
    pub values: Vec<f64>,
}

impl GridFunction {
    pub fn new(grid: RadialGrid, values: Vec<f64>) -> Result<Self, VariationalError> {
        if values.len() != grid.nodes.len() {
            return Err(VariationalError::Domain(format!(
                "{} values for {} nodes",
                values.len(),
                grid.nodes.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(VariationalError::Domain("grid function values must be finite".into()));
        }
        if *values.last().expect("nonempty") != 0.0 {
            return Err(VariationalError::Domain("Dirichlet value u(R) must be 0".into()));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: &RadialGrid) -> Self {
        Self {
            values: vec![0.0; grid.nodes.len()],
            grid: grid.clone(),
        }
    }

    pub fn from_fn(grid: &RadialGrid, f: impl Fn(f64) -> f64) -> Self {
        let mut values: Vec<f64> = grid.nodes.iter().map(|&r| f(r)).collect();
        *values.last_mut().expect("nonempty") = 0.0;
        Self {
            values,
            grid: grid.clone(),
        }
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Piecewise-linear interpolant.
    pub fn interpolate(&self, r: f64) -> f64 {
        let nodes = &self.grid.nodes;
        if r <= 0.0 {
            return self.values[0];
        }
        if r >= self.grid.radius() {
            return 0.0;
        }
        let i = nodes.partition_point(|&x| x <= r) - 1;
        let t = (r - nodes[i]) / (nodes[i + 1] - nodes[i]);
        self.values[i] + t * (self.values[i + 1] - self.values[i])
    }
}
