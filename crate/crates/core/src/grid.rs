//! Uniform cell-centered phase-space grid and the periodic stencils used on it.

use alloc::vec::Vec;

use crate::config::Config;

/// Tensor grid over `[0, x_max) x [-p_max, p_max]`.
///
/// Matrices on this grid are stored row-major with one row per position
/// cell: `f[i * np + j]` is the value at `(x_i, p_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSpaceGrid {
    pub nx: usize,
    pub np: usize,
    pub x_max: f64,
    pub p_max: f64,
    pub dx: f64,
    pub dp: f64,
    pub x_nodes: Vec<f64>,
    /// Mirror-symmetric: `p_nodes[np - 1 - j] == -p_nodes[j]` bit for bit.
    pub p_nodes: Vec<f64>,
}

impl PhaseSpaceGrid {
    pub fn new(nx: usize, x_max: f64, np: usize, p_max: f64) -> Self {
        let dx = x_max / nx as f64;
        let dp = 2.0 * p_max / np as f64;
        let x_nodes = (0..nx).map(|i| (i as f64 + 0.5) * dx).collect();
        let mut p_nodes = alloc::vec![0.0; np];
        for j in np / 2..np {
            let p = -p_max + (j as f64 + 0.5) * dp;
            p_nodes[j] = p;
            p_nodes[np - 1 - j] = -p;
        }
        if np % 2 == 1 {
            p_nodes[np / 2] = 0.0;
        }
        PhaseSpaceGrid {
            nx,
            np,
            x_max,
            p_max,
            dx,
            dp,
            x_nodes,
            p_nodes,
        }
    }

    pub fn from_config(config: &Config) -> Self {
        Self::new(config.nx, config.x_max, config.np, config.p_max)
    }

    pub fn len(&self) -> usize {
        self.nx * self.np
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Same shape and extents.
    pub fn same_shape(&self, other: &PhaseSpaceGrid) -> bool {
        self.nx == other.nx
            && self.np == other.np
            && self.x_max == other.x_max
            && self.p_max == other.p_max
    }

    /// Midpoint quadrature over momentum for one position row, summing mirror
    /// pairs first so that odd integrands cancel exactly.
    pub fn p_integral(&self, integrand: impl Fn(usize) -> f64) -> f64 {
        let np = self.np;
        let mut acc = 0.0;
        for j in 0..np / 2 {
            acc += integrand(j) + integrand(np - 1 - j);
        }
        if np % 2 == 1 {
            acc += integrand(np / 2);
        }
        acc * self.dp
    }

    /// Midpoint quadrature of a full phase-space matrix.
    pub fn phase_integral(&self, f: &[f64]) -> f64 {
        let np = self.np;
        let mut total = 0.0;
        for row in f.chunks(np) {
            total += self.p_integral(|j| row[j]);
        }
        total * self.dx
    }

    /// Discrete L2 norm of a position-space vector.
    pub fn l2_x(&self, v: &[f64]) -> f64 {
        libm::sqrt(v.iter().map(|x| x * x).sum::<f64>() * self.dx)
    }

    /// Discrete L2 norm of a phase-space matrix.
    pub fn l2_phase(&self, f: &[f64]) -> f64 {
        libm::sqrt(f.iter().map(|x| x * x).sum::<f64>() * self.dx * self.dp)
    }
}

/// A pointwise residual over position and its discrete L2 norm.
#[derive(Debug, Clone, PartialEq)]
pub struct Residual {
    pub field: Vec<f64>,
    pub l2: f64,
}

impl Residual {
    pub fn new(field: Vec<f64>, dx: f64) -> Self {
        let l2 = libm::sqrt(field.iter().map(|r| r * r).sum::<f64>() * dx);
        Residual { field, l2 }
    }
}

/// Centered periodic first difference `(u[i+1] - u[i-1]) / (2 dx)`.
pub fn d1_periodic(u: &[f64], dx: f64) -> Vec<f64> {
    let n = u.len();
    (0..n)
        .map(|i| (u[(i + 1) % n] - u[(i + n - 1) % n]) / (2.0 * dx))
        .collect()
}

/// Centered periodic second difference `(u[i+1] - 2 u[i] + u[i-1]) / dx^2`.
pub fn d2_periodic(u: &[f64], dx: f64) -> Vec<f64> {
    let n = u.len();
    (0..n)
        .map(|i| (u[(i + 1) % n] - 2.0 * u[i] + u[(i + n - 1) % n]) / (dx * dx))
        .collect()
}

/// Fourth-order centered periodic second difference.
pub fn d2_periodic_o4(u: &[f64], dx: f64) -> Vec<f64> {
    let n = u.len();
    (0..n)
        .map(|i| {
            let m2 = u[(i + n - 2) % n];
            let m1 = u[(i + n - 1) % n];
            let p1 = u[(i + 1) % n];
            let p2 = u[(i + 2) % n];
            (-m2 + 16.0 * m1 - 30.0 * u[i] + 16.0 * p1 - p2) / (12.0 * dx * dx)
        })
        .collect()
}
