//! Momentum quadratures: charge and current density, species density and
//! particle flux, and the electron continuity residual.
//!
//! All quadratures are midpoint sums over the momentum cells, accumulated in
//! mirror pairs so odd integrands cancel exactly on the symmetric node set.

use alloc::vec::Vec;

use crate::grid::{d1_periodic, PhaseSpaceGrid, Residual};
use crate::kinematics::{lorentz_factor, node_velocities};
use crate::state::SpeciesState;

/// Every moment the solver and diagnostics use, from one `f` snapshot.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentSet {
    pub rho: Vec<f64>,
    pub j: Vec<f64>,
    pub n_plus: Vec<f64>,
    pub n_minus: Vec<f64>,
    pub flux_minus: Vec<f64>,
}

impl MomentSet {
    pub fn compute(
        plus: &SpeciesState,
        minus: &SpeciesState,
        c: f64,
        relativistic: bool,
        grid: &PhaseSpaceGrid,
    ) -> Self {
        MomentSet {
            rho: charge_density(&plus.f, &minus.f, plus.q, minus.q, grid),
            j: current_density(
                &plus.f,
                &minus.f,
                plus.q,
                minus.q,
                plus.m,
                minus.m,
                c,
                relativistic,
                grid,
            ),
            n_plus: number_density(&plus.f, grid),
            n_minus: number_density(&minus.f, grid),
            flux_minus: particle_flux(&minus.f, minus.m, c, relativistic, grid),
        }
    }

    pub fn zeros(nx: usize) -> Self {
        let z = alloc::vec![0.0; nx];
        MomentSet {
            rho: z.clone(),
            j: z.clone(),
            n_plus: z.clone(),
            n_minus: z.clone(),
            flux_minus: z,
        }
    }
}

/// `rho(x) = sum_j (q+ f+ + q- f-) dp`.
pub fn charge_density(
    f_plus: &[f64],
    f_minus: &[f64],
    q_plus: f64,
    q_minus: f64,
    grid: &PhaseSpaceGrid,
) -> Vec<f64> {
    let np = grid.np;
    (0..grid.nx)
        .map(|i| {
            let (a, b) = (&f_plus[i * np..], &f_minus[i * np..]);
            grid.p_integral(|j| q_plus * a[j] + q_minus * b[j])
        })
        .collect()
}

/// `j(x) = sum_j (q+ f+ v+(p) + q- f- v-(p)) dp` with `v` from
/// [`crate::kinematics::velocity_from_momentum`].
#[allow(clippy::too_many_arguments)]
pub fn current_density(
    f_plus: &[f64],
    f_minus: &[f64],
    q_plus: f64,
    q_minus: f64,
    m_plus: f64,
    m_minus: f64,
    c: f64,
    relativistic: bool,
    grid: &PhaseSpaceGrid,
) -> Vec<f64> {
    let np = grid.np;
    let vp = node_velocities(grid, m_plus, c, relativistic);
    let vm = node_velocities(grid, m_minus, c, relativistic);
    (0..grid.nx)
        .map(|i| {
            let (a, b) = (&f_plus[i * np..], &f_minus[i * np..]);
            grid.p_integral(|j| q_plus * a[j] * vp[j] + q_minus * b[j] * vm[j])
        })
        .collect()
}

pub fn number_density(f: &[f64], grid: &PhaseSpaceGrid) -> Vec<f64> {
    let np = grid.np;
    (0..grid.nx)
        .map(|i| {
            let row = &f[i * np..];
            grid.p_integral(|j| row[j])
        })
        .collect()
}

/// `sum_j v(p_j) f dp`.
pub fn particle_flux(
    f: &[f64],
    m: f64,
    c: f64,
    relativistic: bool,
    grid: &PhaseSpaceGrid,
) -> Vec<f64> {
    let np = grid.np;
    let v = node_velocities(grid, m, c, relativistic);
    (0..grid.nx)
        .map(|i| {
            let row = &f[i * np..];
            grid.p_integral(|j| row[j] * v[j])
        })
        .collect()
}

/// `(n_next - n_prev) / (2 dt) + D1 flux_mid`, the dimensionally consistent
/// continuity residual. `n_prev` and `n_next` sit one step either side of
/// `flux_mid`.
pub fn continuity_residual(
    n_prev: &[f64],
    n_next: &[f64],
    flux_mid: &[f64],
    grid: &PhaseSpaceGrid,
    dt: f64,
) -> Residual {
    literal_scaled(n_prev, n_next, flux_mid, grid, dt, 1.0)
}

/// The same residual with `1/c` on the time-derivative term only, as the
/// continuity equation is sometimes written. Reported alongside, never used
/// to gate anything.
pub fn continuity_residual_literal(
    n_prev: &[f64],
    n_next: &[f64],
    flux_mid: &[f64],
    grid: &PhaseSpaceGrid,
    dt: f64,
    c: f64,
) -> Residual {
    literal_scaled(n_prev, n_next, flux_mid, grid, dt, c)
}

/// Local particle source carried by the modified force law,
/// `-(q/c) dA/dx * sum_j f dv/dp dp`.
///
/// That force depends on momentum, so the advective kinetic equation is not
/// in conservation form and `dn/dt + d(flux)/dx` equals this term instead of
/// zero. Subtracting it from the continuity residual leaves pure truncation
/// error.
#[allow(clippy::too_many_arguments)]
pub fn modified_force_number_source(
    f: &[f64],
    a: &[f64],
    q: f64,
    m: f64,
    c: f64,
    relativistic: bool,
    grid: &PhaseSpaceGrid,
) -> Vec<f64> {
    let np = grid.np;
    let a_x = d1_periodic(a, grid.dx);
    let dv_dp: Vec<f64> = grid
        .p_nodes
        .iter()
        .map(|&p| {
            let g = lorentz_factor(p, m, c, relativistic);
            1.0 / (m * g * g * g)
        })
        .collect();
    (0..grid.nx)
        .map(|i| {
            let row = &f[i * np..];
            -(q / c) * a_x[i] * grid.p_integral(|j| row[j] * dv_dp[j])
        })
        .collect()
}

fn literal_scaled(
    n_prev: &[f64],
    n_next: &[f64],
    flux_mid: &[f64],
    grid: &PhaseSpaceGrid,
    dt: f64,
    c_norm: f64,
) -> Residual {
    let div = d1_periodic(flux_mid, grid.dx);
    let field = (0..grid.nx)
        .map(|i| (n_next[i] - n_prev[i]) / (2.0 * dt * c_norm) + div[i])
        .collect();
    Residual::new(field, grid.dx)
}
