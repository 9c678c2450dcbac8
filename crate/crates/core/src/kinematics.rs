//! Momentum-to-velocity kinematics and the two force laws.
//!
//! Forces are evaluated at the kick time, which the two stored field levels
//! bracket: `dA/dt` is their difference over `dt`, and spatial derivatives act
//! on their average.

use alloc::vec::Vec;

use crate::config::{Config, ForceMode, Preset};
use crate::grid::{d1_periodic, PhaseSpaceGrid};
use crate::state::FieldState;

/// `sqrt(1 + p^2 / (m c)^2)`, or exactly 1 when `relativistic` is off.
#[inline]
pub fn lorentz_factor(p: f64, m: f64, c: f64, relativistic: bool) -> f64 {
    if relativistic {
        let u = p / (m * c);
        libm::sqrt(1.0 + u * u)
    } else {
        1.0
    }
}

/// `p / sqrt(m^2 + p^2 / c^2)`, or `p / m` when `relativistic` is off.
#[inline]
pub fn velocity_from_momentum(p: f64, m: f64, c: f64, relativistic: bool) -> f64 {
    if relativistic {
        let pc = p / c;
        p / libm::sqrt(m * m + pc * pc)
    } else {
        p / m
    }
}

/// Velocities at every momentum node.
pub fn node_velocities(grid: &PhaseSpaceGrid, m: f64, c: f64, relativistic: bool) -> Vec<f64> {
    grid.p_nodes
        .iter()
        .map(|&p| velocity_from_momentum(p, m, c, relativistic))
        .collect()
}

/// Force sampled at every phase-space node, same layout as `f`.
#[derive(Debug, Clone, PartialEq)]
pub struct ForceField {
    pub nx: usize,
    pub np: usize,
    pub values: Vec<f64>,
}

impl ForceField {
    pub fn zeros(nx: usize, np: usize) -> Self {
        ForceField {
            nx,
            np,
            values: alloc::vec![0.0; nx * np],
        }
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.np + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.np..(i + 1) * self.np]
    }

    pub fn max_abs(&self) -> f64 {
        self.values
            .iter()
            .fold(0.0, |acc, v| f64::max(acc, libm::fabs(*v)))
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }
}

/// Force law in effect for a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ForceLaw {
    Modified,
    Standard,
    /// Pure free streaming; kicks are skipped.
    Disabled,
}

impl ForceLaw {
    pub fn from_config(config: &Config) -> Self {
        match (config.init.preset, config.force_mode) {
            (Preset::FreeStream, _) => ForceLaw::Disabled,
            (_, ForceMode::Modified) => ForceLaw::Modified,
            (_, ForceMode::Standard) => ForceLaw::Standard,
        }
    }

    #[allow(clippy::too_many_arguments)]
    pub fn evaluate(
        self,
        fields: &FieldState,
        grid: &PhaseSpaceGrid,
        dt: f64,
        q: f64,
        m: f64,
        c: f64,
        relativistic: bool,
    ) -> ForceField {
        match self {
            ForceLaw::Modified => modified_force(fields, grid, dt, q, m, c, relativistic),
            ForceLaw::Standard => standard_force(fields, grid, dt, q, c),
            ForceLaw::Disabled => ForceField::zeros(grid.nx, grid.np),
        }
    }
}

fn midpoint(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| 0.5 * (x + y)).collect()
}

/// `F(x, p) = -(q/c) [dA/dt + v(p) dA/dx]`.
///
/// Reads only the vector potential; `phi` has no effect on the result.
pub fn modified_force(
    fields: &FieldState,
    grid: &PhaseSpaceGrid,
    dt: f64,
    q: f64,
    m: f64,
    c: f64,
    relativistic: bool,
) -> ForceField {
    let (nx, np) = (grid.nx, grid.np);
    let dadx = d1_periodic(&midpoint(&fields.a_prev, &fields.a_curr), grid.dx);
    let v = node_velocities(grid, m, c, relativistic);
    let scale = -q / c;
    let mut values = Vec::with_capacity(nx * np);
    for ((a_curr, a_prev), grad) in fields.a_curr.iter().zip(&fields.a_prev).zip(&dadx) {
        let dadt = (a_curr - a_prev) / dt;
        for &vj in &v {
            // `+ 0.0` turns a signed zero into +0.
            values.push(scale * (dadt + vj * grad) + 0.0);
        }
    }
    ForceField { nx, np, values }
}

/// `F(x) = q [-dphi/dx - (1/c) dA/dt]`, constant along each momentum row.
///
/// The `v x (curl A)` term vanishes identically for `A = (A_x(x), 0, 0)`.
pub fn standard_force(
    fields: &FieldState,
    grid: &PhaseSpaceGrid,
    dt: f64,
    q: f64,
    c: f64,
) -> ForceField {
    let (nx, np) = (grid.nx, grid.np);
    let dphidx = d1_periodic(&midpoint(&fields.phi_prev, &fields.phi_curr), grid.dx);
    let mut values = Vec::with_capacity(nx * np);
    for ((a_curr, a_prev), grad) in fields.a_curr.iter().zip(&fields.a_prev).zip(&dphidx) {
        let dadt = (a_curr - a_prev) / dt;
        let fi = q * (-grad - dadt / c) + 0.0;
        values.extend(core::iter::repeat_n(fi, np));
    }
    ForceField { nx, np, values }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn grid() -> PhaseSpaceGrid {
        PhaseSpaceGrid::new(16, 8.0, 12, 3.0)
    }

    fn fields_from(phi: Vec<f64>, a_prev: Vec<f64>, a_curr: Vec<f64>) -> FieldState {
        FieldState {
            phi_prev: phi.clone(),
            phi_curr: phi,
            a_prev,
            a_curr,
        }
    }

    #[test]
    fn lorentz_factor_values() {
        assert_eq!(lorentz_factor(0.0, 2.0, 3.0, true), 1.0);
        assert!((lorentz_factor(6.0, 2.0, 3.0, true) - core::f64::consts::SQRT_2).abs() < 1e-15);
        assert_eq!(lorentz_factor(1e9, 1.0, 1.0, false), 1.0);
    }

    #[test]
    fn velocity_values() {
        assert_eq!(velocity_from_momentum(0.0, 1.0, 1.0, true), 0.0);
        assert!(
            (velocity_from_momentum(1.0, 1.0, 1.0, true) - core::f64::consts::FRAC_1_SQRT_2).abs()
                < 1e-15
        );
        let v = velocity_from_momentum(1e6, 1.0, 1.0, true);
        assert!(v > 0.9999999 && v < 1.0);
        assert_eq!(velocity_from_momentum(3.0, 2.0, 1.0, false), 1.5);
    }

    #[test]
    fn static_uniform_potential_gives_no_force() {
        let g = grid();
        let a = alloc::vec![0.7; g.nx];
        let f = modified_force(
            &fields_from(alloc::vec![1.0; g.nx], a.clone(), a),
            &g,
            0.1,
            1.0,
            1.0,
            2.0,
            true,
        );
        assert!(f.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn uniformly_growing_potential() {
        let g = grid();
        let (a0, dt, q, c) = (0.3, 0.05, -2.0, 4.0);
        let t = 1.2;
        let prev = alloc::vec![a0 * t; g.nx];
        let curr = alloc::vec![a0 * (t + dt); g.nx];
        let f = modified_force(
            &fields_from(alloc::vec![0.0; g.nx], prev, curr),
            &g,
            dt,
            q,
            1.0,
            c,
            true,
        );
        for v in &f.values {
            assert!((v - (-(q / c) * a0)).abs() < 1e-12);
        }
    }

    #[test]
    fn static_ramp_in_x() {
        let g = grid();
        let (a1, q, c, m) = (0.25, 1.5, 2.0, 1.3);
        let a: Vec<f64> = g.x_nodes.iter().map(|x| a1 * x).collect();
        let f = modified_force(
            &fields_from(alloc::vec![0.0; g.nx], a.clone(), a),
            &g,
            0.1,
            q,
            m,
            c,
            true,
        );
        for i in 1..g.nx - 1 {
            for j in 0..g.np {
                let v0 = velocity_from_momentum(g.p_nodes[j], m, c, true);
                assert!((f.at(i, j) - (-(q / c) * v0 * a1)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn standard_force_electrostatic_slope() {
        let g = grid();
        let (e0, q) = (0.8, -1.0);
        let phi: Vec<f64> = g.x_nodes.iter().map(|x| -e0 * x).collect();
        let zero = alloc::vec![0.0; g.nx];
        let f = standard_force(&fields_from(phi, zero.clone(), zero), &g, 0.1, q, 1.0);
        for i in 1..g.nx - 1 {
            assert!(f.row(i).iter().all(|&v| (v - q * e0).abs() < 1e-12));
        }
    }

    #[test]
    fn modified_force_ignores_phi_when_a_vanishes() {
        let g = grid();
        let phi: Vec<f64> = g.x_nodes.iter().map(|&x| libm::sin(x) + 0.3 * x).collect();
        let zero = alloc::vec![0.0; g.nx];
        let fields = fields_from(phi.clone(), zero.clone(), zero);
        let modified = modified_force(&fields, &g, 0.1, 1.0, 1.0, 1.0, true);
        assert!(modified.values.iter().all(|v| v.to_bits() == 0));
        let standard = standard_force(&fields, &g, 0.1, 1.0, 1.0);
        let d1 = d1_periodic(&phi, g.dx);
        for i in 0..g.nx {
            assert!(standard.row(i).iter().all(|&v| (v + d1[i]).abs() < 1e-14));
        }
    }

    fn vecs(n: usize) -> impl Strategy<Value = Vec<f64>> {
        proptest::collection::vec(-2.0f64..2.0, n)
    }

    proptest! {
        #[test]
        fn velocity_odd_monotone_subluminal(p in -1e5f64..1e5, dp in 1e-6f64..10.0, m in 0.1f64..10.0, c in 0.5f64..50.0) {
            let v = velocity_from_momentum(p, m, c, true);
            prop_assert_eq!(velocity_from_momentum(-p, m, c, true), -v);
            prop_assert!(velocity_from_momentum(p + dp, m, c, true) > v);
            prop_assert!(v.abs() < c);
        }

        #[test]
        fn nonrelativistic_velocity_bound(p in -50.0f64..50.0, m in 0.1f64..10.0, c in 0.5f64..50.0) {
            let u = (p / (m * c)) * (p / (m * c));
            let vr = velocity_from_momentum(p, m, c, true);
            let vn = velocity_from_momentum(p, m, c, false);
            prop_assert!((vr - vn).abs() <= 0.5 * u * vn.abs() + 4.0 * f64::EPSILON * vn.abs());
        }

        #[test]
        fn modified_force_independent_of_phi(phi1 in vecs(16), phi2 in vecs(16), a0 in vecs(16), a1 in vecs(16)) {
            let g = grid();
            let f1 = modified_force(&fields_from(phi1, a0.clone(), a1.clone()), &g, 0.07, 1.0, 1.0, 3.0, true);
            let f2 = modified_force(&fields_from(phi2, a0, a1), &g, 0.07, 1.0, 1.0, 3.0, true);
            prop_assert!(f1.values.iter().zip(&f2.values).all(|(x, y)| x.to_bits() == y.to_bits()));
        }

        #[test]
        fn forces_are_linear_and_charge_odd(
            phi1 in vecs(16), phi2 in vecs(16), a1 in vecs(16), a2 in vecs(16),
            b1 in vecs(16), b2 in vecs(16), s in -3.0f64..3.0, q in -2.0f64..2.0,
        ) {
            let g = grid();
            let combo = |x: &[f64], y: &[f64]| -> Vec<f64> { x.iter().zip(y).map(|(a, b)| a + s * b).collect() };
            let fa = fields_from(phi1.clone(), a1.clone(), b1.clone());
            let fb = fields_from(phi2.clone(), a2.clone(), b2.clone());
            let fab = fields_from(combo(&phi1, &phi2), combo(&a1, &a2), combo(&b1, &b2));
            for law in [ForceLaw::Modified, ForceLaw::Standard] {
                let ea = law.evaluate(&fa, &g, 0.1, q, 1.0, 2.0, true);
                let eb = law.evaluate(&fb, &g, 0.1, q, 1.0, 2.0, true);
                let eab = law.evaluate(&fab, &g, 0.1, q, 1.0, 2.0, true);
                let scale = ea.max_abs() + s.abs() * eb.max_abs() + 1e-300;
                for k in 0..eab.values.len() {
                    prop_assert!((eab.values[k] - (ea.values[k] + s * eb.values[k])).abs() <= 1e-12 * scale);
                }
                let neg = law.evaluate(&fa, &g, 0.1, -q, 1.0, 2.0, true);
                prop_assert!(neg.values.iter().zip(&ea.values).all(|(x, y)| *x == -*y));
            }
        }
    }
}
