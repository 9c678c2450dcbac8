//! Simulation state and initial-condition synthesis.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::config::{Config, Preset, SpeciesLabel};
use crate::error::Result;
use crate::field::poisson_init_scaled;
use crate::grid::PhaseSpaceGrid;
use crate::moments::MomentSet;

/// One species: charge, mass and `f(x, p)` on the grid (row per position).
#[derive(Debug, Clone, PartialEq)]
pub struct SpeciesState {
    pub label: SpeciesLabel,
    pub q: f64,
    pub m: f64,
    pub f: Vec<f64>,
}

impl SpeciesState {
    pub fn max_f(&self) -> f64 {
        self.f.iter().fold(f64::NEG_INFINITY, |a, v| a.max(*v))
    }

    pub fn min_f(&self) -> f64 {
        self.f.iter().fold(f64::INFINITY, |a, v| a.min(*v))
    }

    /// Midpoint-rule particle count.
    pub fn total(&self, grid: &PhaseSpaceGrid) -> f64 {
        grid.phase_integral(&self.f)
    }
}

/// `phi` and `A_x`, each at two time levels one step apart.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldState {
    pub phi_prev: Vec<f64>,
    pub phi_curr: Vec<f64>,
    pub a_prev: Vec<f64>,
    pub a_curr: Vec<f64>,
}

impl FieldState {
    pub fn zeros(nx: usize) -> Self {
        let z = alloc::vec![0.0; nx];
        FieldState {
            phi_prev: z.clone(),
            phi_curr: z.clone(),
            a_prev: z.clone(),
            a_curr: z,
        }
    }

    pub fn is_finite(&self) -> bool {
        [&self.phi_prev, &self.phi_curr, &self.a_prev, &self.a_curr]
            .iter()
            .all(|v| v.iter().all(|x| x.is_finite()))
    }
}

/// Everything the stepper evolves. `moments` always matches the current `f`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationState {
    pub time: f64,
    pub step: u64,
    pub plus: SpeciesState,
    pub minus: SpeciesState,
    pub fields: FieldState,
    pub moments: MomentSet,
}

impl SimulationState {
    pub fn species(&self, label: SpeciesLabel) -> &SpeciesState {
        match label {
            SpeciesLabel::Plus => &self.plus,
            SpeciesLabel::Minus => &self.minus,
        }
    }

    /// Recomputes the cached moments from the current distributions.
    pub fn refresh_moments(&mut self, config: &Config, grid: &PhaseSpaceGrid) {
        self.moments =
            MomentSet::compute(&self.plus, &self.minus, config.c, config.relativistic, grid);
    }
}

/// Normalized momentum Gaussian with variance `width2`.
pub fn gaussian(p: f64, center: f64, width2: f64) -> f64 {
    let d = p - center;
    libm::exp(-d * d / (2.0 * width2)) / libm::sqrt(2.0 * PI * width2)
}

fn species_distribution(config: &Config, grid: &PhaseSpaceGrid, label: SpeciesLabel) -> Vec<f64> {
    let init = &config.init;
    let width2 = config.species(label).m * config.species_temperature(label);
    let centers = config.beam_centers(label);
    let share = 1.0 / centers.len() as f64;
    let profile: Vec<f64> = grid
        .p_nodes
        .iter()
        .map(|&p| {
            centers
                .iter()
                .map(|&d| share * gaussian(p, d, width2))
                .sum::<f64>()
        })
        .collect();
    let k = config.wavenumber();
    let mut f = Vec::with_capacity(grid.len());
    for &x in &grid.x_nodes {
        let density = match label {
            SpeciesLabel::Minus => init.n0 * (1.0 + init.amplitude * libm::cos(k * x)),
            SpeciesLabel::Plus => init.n0,
        };
        f.extend(profile.iter().map(|g| density * g));
    }
    f
}

/// Builds the initial state for a validated config.
///
/// The minus species carries the preset's perturbation, drift and beams; the
/// plus species is a uniform, non-drifting neutralizing background. `phi`
/// starts from the periodic Poisson solution at both levels and `A` is zero.
pub fn initialize_state(config: &Config, grid: &PhaseSpaceGrid) -> Result<SimulationState> {
    let plus = SpeciesState {
        label: SpeciesLabel::Plus,
        q: config.plus.q,
        m: config.plus.m,
        f: species_distribution(config, grid, SpeciesLabel::Plus),
    };
    let minus = SpeciesState {
        label: SpeciesLabel::Minus,
        q: config.minus.q,
        m: config.minus.m,
        f: species_distribution(config, grid, SpeciesLabel::Minus),
    };
    let moments = MomentSet::compute(&plus, &minus, config.c, config.relativistic, grid);
    let charge_scale = moments
        .n_plus
        .iter()
        .zip(&moments.n_minus)
        .map(|(np, nm)| libm::fabs(plus.q * np) + libm::fabs(minus.q * nm))
        .fold(0.0, f64::max);
    let phi = poisson_init_scaled(&moments.rho, grid, charge_scale)?;
    let a = alloc::vec![0.0; grid.nx];
    Ok(SimulationState {
        time: 0.0,
        step: 0,
        plus,
        minus,
        fields: FieldState {
            phi_prev: phi.clone(),
            phi_curr: phi,
            a_prev: a.clone(),
            a_curr: a,
        },
        moments,
    })
}

/// Whether the preset runs with forces switched off.
pub fn forces_disabled(config: &Config) -> bool {
    config.init.preset == Preset::FreeStream
}
