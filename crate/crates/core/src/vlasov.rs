//! Strang-split semi-Lagrangian evolution of both species.
//!
//! One step is `half advect x -> field update -> momentum kick -> half
//! advect x`. Field levels live at integer times: on entry they hold
//! `t_{n-1}` and `t_n`, the leapfrog advances them to `t_{n+1}` with sources
//! from the cached moments at `t_n`, and the kick at `t_{n+1/2}` then sees two
//! levels bracketing it.

use alloc::vec::Vec;

use crate::config::Config;
use crate::error::{Error, Result};
use crate::field::{cfl_check, wave_step, WaveLevels};
use crate::grid::PhaseSpaceGrid;
use crate::kinematics::{node_velocities, ForceField, ForceLaw};
use crate::par;
use crate::spline::{NaturalSpline, PeriodicSpline};
use crate::state::{FieldState, SimulationState, SpeciesState};
use crate::FOUR_PI;

/// Sub-stages of one step, in execution order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplittingStage {
    HalfAdvectX,
    FieldUpdate,
    KickP,
    HalfAdvectX2,
}

impl SplittingStage {
    pub const ORDER: [SplittingStage; 4] = [
        SplittingStage::HalfAdvectX,
        SplittingStage::FieldUpdate,
        SplittingStage::KickP,
        SplittingStage::HalfAdvectX2,
    ];
}

/// Time step and step count of a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimePlan {
    pub dt: f64,
    pub nsteps: u64,
}

impl TimePlan {
    /// `dt_cfl = cfl_fraction * dx / max(c, v_char)`, shrunk so that an
    /// integer number of steps lands exactly on `t_end`.
    pub fn from_config(config: &Config, grid: &PhaseSpaceGrid) -> Result<TimePlan> {
        let v_char = max_speed(config, grid);
        let dt_cfl = config.cfl_fraction * grid.dx / f64::max(config.c, v_char);
        let nsteps = libm::ceil(config.t_end / dt_cfl * (1.0 - 1e-12)).max(1.0) as u64;
        let plan = TimePlan::fixed(config.t_end, nsteps);
        cfl_check(grid, plan.dt, config.c, v_char)?;
        Ok(plan)
    }

    pub fn fixed(t_end: f64, nsteps: u64) -> TimePlan {
        TimePlan {
            dt: t_end / nsteps as f64,
            nsteps,
        }
    }
}

/// Largest `|v|` on the momentum grid over both species.
pub fn max_speed(config: &Config, grid: &PhaseSpaceGrid) -> f64 {
    [config.plus.m, config.minus.m]
        .iter()
        .flat_map(|&m| node_velocities(grid, m, config.c, config.relativistic))
        .fold(0.0, |a, v| f64::max(a, libm::fabs(v)))
}

/// Result of one step: the new state and the force applied to each species.
#[derive(Debug, Clone)]
pub struct StepOutput {
    pub state: SimulationState,
    pub force_plus: ForceField,
    pub force_minus: ForceField,
}

/// `f(x, p_j) <- f(x - v(p_j) dt, p_j)`, periodic cubic splines along `x`.
pub fn advect_x(
    f: &[f64],
    grid: &PhaseSpaceGrid,
    dt: f64,
    m: f64,
    c: f64,
    relativistic: bool,
) -> Vec<f64> {
    if dt == 0.0 {
        return f.to_vec();
    }
    let (nx, np) = (grid.nx, grid.np);
    let spline = PeriodicSpline::new(nx);
    let v = node_velocities(grid, m, c, relativistic);
    let columns: Vec<Vec<f64>> = par::map_indices(np, |j| {
        let column: Vec<f64> = (0..nx).map(|i| f[i * np + j]).collect();
        let mut curv = alloc::vec![0.0; nx];
        spline.curvatures(&column, &mut curv);
        let shift = v[j] * dt / grid.dx;
        (0..nx)
            .map(|i| spline.eval(&column, &curv, i as f64 - shift))
            .collect()
    });
    let mut out = alloc::vec![0.0; nx * np];
    for (j, column) in columns.iter().enumerate() {
        for (i, value) in column.iter().enumerate() {
            out[i * np + j] = *value;
        }
    }
    out
}

/// `f(x_i, p) <- f(x_i, p - F(x_i, p) dt)`, natural cubic splines along `p`
/// with zero extension past `+-p_max`.
///
/// The characteristic is frozen at the arrival node. With `refine`, the
/// force is re-sampled once at the midpoint of the first-guess
/// characteristic (linear interpolation along `p`).
pub fn kick_p(
    f: &[f64],
    force: &ForceField,
    grid: &PhaseSpaceGrid,
    dt: f64,
    refine: bool,
) -> Result<Vec<f64>> {
    let np = grid.np;
    let bound = 0.25 * np as f64 * grid.dp;
    let max_displacement = force.max_abs() * libm::fabs(dt);
    if max_displacement.is_nan() || max_displacement >= bound {
        return Err(Error::KickDisplacement {
            max_displacement,
            bound,
        });
    }
    let spline = NaturalSpline::new(np + 2);
    // Padded coordinates: node j sits at index j + 1; +-p_max at 0.5 and np + 0.5.
    let (lo, hi) = (0.5, np as f64 + 0.5);
    let mut out = f.to_vec();
    par::for_each_row(&mut out, np, |i, row| {
        let mut padded = alloc::vec![0.0; np + 2];
        padded[1..=np].copy_from_slice(&f[i * np..(i + 1) * np]);
        let mut curv = alloc::vec![0.0; np + 2];
        spline.curvatures(&padded, &mut curv);
        let frow = force.row(i);
        for (j, value) in row.iter_mut().enumerate() {
            let mut shift = frow[j] * dt / grid.dp;
            if refine {
                shift = interpolate_row(frow, j as f64 - 0.5 * shift) * dt / grid.dp;
            }
            let xi = (j + 1) as f64 - shift;
            *value = if (lo..=hi).contains(&xi) {
                spline.eval(&padded, &curv, xi)
            } else {
                0.0
            };
        }
    });
    Ok(out)
}

fn interpolate_row(row: &[f64], xi: f64) -> f64 {
    let last = row.len() - 1;
    if xi <= 0.0 {
        return row[0];
    }
    if xi >= last as f64 {
        return row[last];
    }
    let k = libm::floor(xi) as usize;
    let t = xi - k as f64;
    (1.0 - t) * row[k] + t * row[k + 1]
}

fn advect_species(s: &SpeciesState, grid: &PhaseSpaceGrid, dt: f64, config: &Config) -> Vec<f64> {
    advect_x(&s.f, grid, dt, s.m, config.c, config.relativistic)
}

/// Advances `state` by one step of size `dt`. The input is left untouched;
/// on error no partial state escapes.
pub fn step(
    state: &SimulationState,
    config: &Config,
    grid: &PhaseSpaceGrid,
    dt: f64,
) -> Result<StepOutput> {
    let law = ForceLaw::from_config(config);
    let mut plus = state.plus.clone();
    let mut minus = state.minus.clone();
    let mut fields = state.fields.clone();
    let mut force_plus = ForceField::zeros(grid.nx, grid.np);
    let mut force_minus = ForceField::zeros(grid.nx, grid.np);

    for stage in SplittingStage::ORDER {
        match stage {
            SplittingStage::HalfAdvectX | SplittingStage::HalfAdvectX2 => {
                plus.f = advect_species(&plus, grid, 0.5 * dt, config);
                minus.f = advect_species(&minus, grid, 0.5 * dt, config);
            }
            SplittingStage::FieldUpdate => {
                fields = advance_fields(
                    &fields,
                    &state.moments.rho,
                    &state.moments.j,
                    grid,
                    dt,
                    config.c,
                )?;
            }
            SplittingStage::KickP => {
                if law == ForceLaw::Disabled {
                    continue;
                }
                force_plus = law.evaluate(
                    &fields,
                    grid,
                    dt,
                    plus.q,
                    plus.m,
                    config.c,
                    config.relativistic,
                );
                force_minus = law.evaluate(
                    &fields,
                    grid,
                    dt,
                    minus.q,
                    minus.m,
                    config.c,
                    config.relativistic,
                );
                plus.f = kick_p(&plus.f, &force_plus, grid, dt, config.kick_refine)?;
                minus.f = kick_p(&minus.f, &force_minus, grid, dt, config.kick_refine)?;
            }
        }
    }

    let mut next = SimulationState {
        time: state.time + dt,
        step: state.step + 1,
        plus,
        minus,
        fields,
        moments: state.moments.clone(),
    };
    next.refresh_moments(config, grid);
    Ok(StepOutput {
        state: next,
        force_plus,
        force_minus,
    })
}

/// One leapfrog update of `phi` (source `4 pi rho`) and `A` (source
/// `(4 pi / c) j`), returning the rotated levels.
pub fn advance_fields(
    fields: &FieldState,
    rho: &[f64],
    j: &[f64],
    grid: &PhaseSpaceGrid,
    dt: f64,
    c: f64,
) -> Result<FieldState> {
    let phi_levels = WaveLevels::new(fields.phi_prev.clone(), fields.phi_curr.clone());
    let a_levels = WaveLevels::new(fields.a_prev.clone(), fields.a_curr.clone());
    let phi_source: Vec<f64> = rho.iter().map(|r| FOUR_PI * r).collect();
    let a_source: Vec<f64> = j.iter().map(|ji| FOUR_PI / c * ji).collect();
    let phi_next = wave_step(&phi_levels, &phi_source, grid, dt, c)?;
    let a_next = wave_step(&a_levels, &a_source, grid, dt, c)?;
    Ok(FieldState {
        phi_prev: phi_levels.u_curr,
        phi_curr: phi_next,
        a_prev: a_levels.u_curr,
        a_curr: a_next,
    })
}
