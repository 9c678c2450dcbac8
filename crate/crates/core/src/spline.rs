//! Cubic splines on uniform grids, in index coordinates.
//!
//! Splines are stored as node values plus scaled curvatures `h^2 * S''`, so the
//! grid spacing never enters. A position `xi` is a fractional node index.

use alloc::vec::Vec;

/// Factorization of the constant `(1, 4, 1)` tridiagonal system.
#[derive(Debug, Clone)]
struct Tridiagonal141 {
    cprime: Vec<f64>,
    inv_denom: Vec<f64>,
}

impl Tridiagonal141 {
    fn new(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut cprime = alloc::vec![0.0; n];
        let mut inv_denom = alloc::vec![0.0; n];
        let mut prev_c = 0.0;
        for i in 0..n {
            let denom = diag[i] - prev_c;
            inv_denom[i] = 1.0 / denom;
            cprime[i] = inv_denom[i];
            prev_c = cprime[i];
        }
        Tridiagonal141 { cprime, inv_denom }
    }

    /// Solves in place; `rhs` becomes the solution.
    fn solve(&self, rhs: &mut [f64]) {
        let n = rhs.len();
        if n == 0 {
            return;
        }
        rhs[0] *= self.inv_denom[0];
        for i in 1..n {
            rhs[i] = (rhs[i] - rhs[i - 1]) * self.inv_denom[i];
        }
        for i in (0..n - 1).rev() {
            rhs[i] -= self.cprime[i] * rhs[i + 1];
        }
    }
}

/// Curvature solver for periodic splines on `n >= 3` nodes.
///
/// The cyclic system is reduced to a tridiagonal one by a Sherman-Morrison
/// correction factored once per `n`.
#[derive(Debug, Clone)]
pub struct PeriodicSpline {
    n: usize,
    tri: Tridiagonal141,
    z: Vec<f64>,
    gamma: f64,
    z_denom: f64,
}

impl PeriodicSpline {
    pub fn new(n: usize) -> Self {
        assert!(n >= 3, "periodic spline needs at least 3 nodes");
        let gamma = -4.0;
        let mut diag = alloc::vec![4.0; n];
        diag[0] = 4.0 - gamma;
        diag[n - 1] = 4.0 - 1.0 / gamma;
        let tri = Tridiagonal141::new(&diag);
        let mut z = alloc::vec![0.0; n];
        z[0] = gamma;
        z[n - 1] = 1.0;
        tri.solve(&mut z);
        let z_denom = 1.0 + z[0] + z[n - 1] / gamma;
        PeriodicSpline {
            n,
            tri,
            z,
            gamma,
            z_denom,
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Scaled curvatures of the periodic interpolant through `y`.
    pub fn curvatures(&self, y: &[f64], out: &mut [f64]) {
        let n = self.n;
        debug_assert_eq!(y.len(), n);
        for i in 0..n {
            out[i] = 6.0 * (y[(i + 1) % n] - 2.0 * y[i] + y[(i + n - 1) % n]);
        }
        self.tri.solve(out);
        let fact = (out[0] + out[n - 1] / self.gamma) / self.z_denom;
        for (o, z) in out.iter_mut().zip(&self.z) {
            *o -= fact * z;
        }
    }

    /// Value at fractional index `xi`, wrapped periodically.
    #[inline]
    pub fn eval(&self, y: &[f64], curv: &[f64], xi: f64) -> f64 {
        let n = self.n;
        let fl = libm::floor(xi);
        let t = xi - fl;
        let k = (fl as i64).rem_euclid(n as i64) as usize;
        let k1 = if k + 1 == n { 0 } else { k + 1 };
        segment(y[k], y[k1], curv[k], curv[k1], t)
    }
}

/// Curvature solver for natural splines (zero end curvature) on `n >= 2` nodes.
#[derive(Debug, Clone)]
pub struct NaturalSpline {
    n: usize,
    tri: Tridiagonal141,
}

impl NaturalSpline {
    pub fn new(n: usize) -> Self {
        assert!(n >= 2, "natural spline needs at least 2 nodes");
        let diag = alloc::vec![4.0; n - 2];
        NaturalSpline {
            n,
            tri: Tridiagonal141::new(&diag),
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn curvatures(&self, y: &[f64], out: &mut [f64]) {
        let n = self.n;
        debug_assert_eq!(y.len(), n);
        out[0] = 0.0;
        out[n - 1] = 0.0;
        for i in 1..n - 1 {
            out[i] = 6.0 * (y[i + 1] - 2.0 * y[i] + y[i - 1]);
        }
        self.tri.solve(&mut out[1..n - 1]);
    }

    /// Value at fractional index `xi`; zero outside `[0, n - 1]`.
    #[inline]
    pub fn eval(&self, y: &[f64], curv: &[f64], xi: f64) -> f64 {
        let last = (self.n - 1) as f64;
        if !(0.0..=last).contains(&xi) {
            return 0.0;
        }
        let fl = libm::floor(xi);
        let mut k = fl as usize;
        let mut t = xi - fl;
        if k == self.n - 1 {
            k -= 1;
            t = 1.0;
        }
        segment(y[k], y[k + 1], curv[k], curv[k + 1], t)
    }
}

#[inline]
fn segment(y0: f64, y1: f64, c0: f64, c1: f64, t: f64) -> f64 {
    let s = 1.0 - t;
    s * y0 + t * y1 + ((s * s * s - s) * c0 + (t * t * t - t) * c1) / 6.0
}
