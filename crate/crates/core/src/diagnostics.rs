//! Residuals of the full equation set, conserved totals, frequency
//! extraction and run-to-run comparison.
//!
//! The system has two more equations than unknowns. The stepper advances the
//! two kinetic equations and the two wave equations, the charge and current
//! moments are definitions, and the gauge condition and electron continuity
//! are left over. Every equation gets a discrete residual here.

use alloc::vec::Vec;

use crate::config::{Config, SpeciesLabel};
use crate::error::{Error, Result};
use crate::field::{field_energy_proxy, field_gauge_residual};
use crate::grid::{d1_periodic, d2_periodic_o4, PhaseSpaceGrid, Residual};
use crate::kinematics::{node_velocities, ForceField, ForceLaw};
use crate::moments::{
    charge_density, continuity_residual, continuity_residual_literal, current_density,
};
use crate::state::{FieldState, SimulationState, SpeciesState};
use crate::FOUR_PI;

/// How an equation participates in the discrete system.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EquationStatus {
    /// Advanced in time by the stepper.
    Evolved,
    /// Holds by construction (a moment definition).
    Definition,
    /// Redundant; only monitored.
    Monitored,
}

impl EquationStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            EquationStatus::Evolved => "evolved",
            EquationStatus::Definition => "definition",
            EquationStatus::Monitored => "monitored",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LedgerEntry {
    pub label: &'static str,
    pub status: EquationStatus,
    pub residual_l2: f64,
    /// Scalar equations this entry stands for in the 1D1V reduction.
    pub reduced_multiplicity: u32,
    /// Scalar equations it stands for in full 3D3V.
    pub full_multiplicity: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UnknownEntry {
    pub label: &'static str,
    pub reduced_count: u32,
    pub full_count: u32,
}

/// Static partition of the equations, without residual values.
pub const EQUATION_PARTITION: [(&str, EquationStatus, u32, u32); 8] = [
    ("c+", EquationStatus::Evolved, 1, 1),
    ("c-", EquationStatus::Evolved, 1, 1),
    ("d1", EquationStatus::Evolved, 1, 1),
    ("d2", EquationStatus::Evolved, 1, 3),
    ("e", EquationStatus::Monitored, 1, 1),
    ("f", EquationStatus::Definition, 1, 1),
    ("g", EquationStatus::Definition, 1, 3),
    ("h", EquationStatus::Monitored, 1, 1),
];

pub const UNKNOWNS: [UnknownEntry; 3] = [
    UnknownEntry {
        label: "f+-",
        reduced_count: 2,
        full_count: 2,
    },
    UnknownEntry {
        label: "phi,A",
        reduced_count: 2,
        full_count: 4,
    },
    UnknownEntry {
        label: "rho,j",
        reduced_count: 2,
        full_count: 4,
    },
];

/// Total scalar equations in the full three-dimensional system.
pub const FULL_EQUATION_TOTAL: u32 = 12;
/// Total scalar unknowns in the full three-dimensional system.
pub const FULL_UNKNOWN_TOTAL: u32 = 10;

/// Per-equation residuals at one time level.
#[derive(Debug, Clone, PartialEq)]
pub struct EquationLedger {
    pub step: u64,
    pub time: f64,
    pub entries: Vec<LedgerEntry>,
    pub unknowns: Vec<UnknownEntry>,
    pub full_equation_total: u32,
    pub full_unknown_total: u32,
    /// Continuity residual with `1/c` on the time term only.
    pub continuity_literal_l2: f64,
}

impl EquationLedger {
    pub fn full_multiplicity_sum(&self) -> u32 {
        self.entries.iter().map(|e| e.full_multiplicity).sum()
    }

    pub fn reduced_multiplicity_sum(&self) -> u32 {
        self.entries.iter().map(|e| e.reduced_multiplicity).sum()
    }

    pub fn reduced_unknown_total(&self) -> u32 {
        self.unknowns.iter().map(|u| u.reduced_count).sum()
    }

    pub fn entry(&self, label: &str) -> Option<&LedgerEntry> {
        self.entries.iter().find(|e| e.label == label)
    }
}

/// One row of per-step diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticsRecord {
    pub step: u64,
    pub time: f64,
    pub n_total_plus: f64,
    pub n_total_minus: f64,
    pub charge_total: f64,
    pub current_total: f64,
    pub gauge_residual_l2: f64,
    pub continuity_residual_l2: f64,
    pub vlasov_residual_plus_l2: f64,
    pub vlasov_residual_minus_l2: f64,
    pub max_abs_v_over_c: f64,
    pub field_energy_proxy: f64,
}

impl DiagnosticsRecord {
    pub const COLUMNS: [&'static str; 12] = [
        "step",
        "time",
        "n_total_plus",
        "n_total_minus",
        "charge_total",
        "current_total",
        "gauge_residual_l2",
        "continuity_residual_l2",
        "vlasov_residual_plus_l2",
        "vlasov_residual_minus_l2",
        "max_abs_v_over_c",
        "field_energy_proxy",
    ];

    /// Float columns after `step`, in column order.
    pub fn values(&self) -> [f64; 11] {
        [
            self.time,
            self.n_total_plus,
            self.n_total_minus,
            self.charge_total,
            self.current_total,
            self.gauge_residual_l2,
            self.continuity_residual_l2,
            self.vlasov_residual_plus_l2,
            self.vlasov_residual_minus_l2,
            self.max_abs_v_over_c,
            self.field_energy_proxy,
        ]
    }

    pub fn from_values(step: u64, v: [f64; 11]) -> Self {
        DiagnosticsRecord {
            step,
            time: v[0],
            n_total_plus: v[1],
            n_total_minus: v[2],
            charge_total: v[3],
            current_total: v[4],
            gauge_residual_l2: v[5],
            continuity_residual_l2: v[6],
            vlasov_residual_plus_l2: v[7],
            vlasov_residual_minus_l2: v[8],
            max_abs_v_over_c: v[9],
            field_energy_proxy: v[10],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Totals {
    pub n_total_plus: f64,
    pub n_total_minus: f64,
    pub charge_total: f64,
    pub current_total: f64,
    pub field_energy_proxy: f64,
    pub max_abs_v_over_c: f64,
}

pub fn conserved_totals(
    state: &SimulationState,
    config: &Config,
    grid: &PhaseSpaceGrid,
    dt: f64,
) -> Totals {
    let v_max = [state.plus.m, state.minus.m]
        .iter()
        .flat_map(|&m| node_velocities(grid, m, config.c, config.relativistic))
        .fold(0.0, |a, v| f64::max(a, libm::fabs(v)));
    Totals {
        n_total_plus: state.plus.total(grid),
        n_total_minus: state.minus.total(grid),
        charge_total: state.moments.rho.iter().sum::<f64>() * grid.dx,
        current_total: state.moments.j.iter().sum::<f64>() * grid.dx,
        field_energy_proxy: field_energy_proxy(&state.fields, grid, dt, config.c),
        max_abs_v_over_c: v_max / config.c,
    }
}

/// Force at the time of the middle field level, from three consecutive
/// field states (each contributing its latest level).
fn centered_force(
    law: ForceLaw,
    fields: [&FieldState; 3],
    species: &SpeciesState,
    config: &Config,
    grid: &PhaseSpaceGrid,
    dt: f64,
) -> ForceField {
    let (nx, np) = (grid.nx, grid.np);
    let dadt: Vec<f64> = (0..nx)
        .map(|i| (fields[2].a_curr[i] - fields[0].a_curr[i]) / (2.0 * dt))
        .collect();
    let c = config.c;
    let q = species.q;
    let mut values = Vec::with_capacity(nx * np);
    match law {
        ForceLaw::Disabled => values.resize(nx * np, 0.0),
        ForceLaw::Modified => {
            let dadx = d1_periodic(&fields[1].a_curr, grid.dx);
            let v = node_velocities(grid, species.m, c, config.relativistic);
            for i in 0..nx {
                values.extend(v.iter().map(|vj| -(q / c) * (dadt[i] + vj * dadx[i])));
            }
        }
        ForceLaw::Standard => {
            let dphidx = d1_periodic(&fields[1].phi_curr, grid.dx);
            for i in 0..nx {
                let fi = q * (-dphidx[i] - dadt[i] / c);
                values.extend(core::iter::repeat_n(fi, np));
            }
        }
    }
    ForceField { nx, np, values }
}

/// L2 over interior momentum nodes of `df/dt + v df/dx + F df/dp`, every
/// derivative centered, at the middle of the last three snapshots.
#[allow(clippy::too_many_arguments)]
pub fn vlasov_residual(
    f_levels: &[&[f64]],
    field_levels: &[&FieldState],
    species: &SpeciesState,
    law: ForceLaw,
    config: &Config,
    grid: &PhaseSpaceGrid,
    dt: f64,
) -> Result<f64> {
    let got = f_levels.len().min(field_levels.len());
    if got < 3 {
        return Err(Error::InsufficientHistory { needed: 3, got });
    }
    let fl = &f_levels[f_levels.len() - 3..];
    let fs = &field_levels[field_levels.len() - 3..];
    let force = centered_force(law, [fs[0], fs[1], fs[2]], species, config, grid, dt);
    let v = node_velocities(grid, species.m, config.c, config.relativistic);
    let (nx, np) = (grid.nx, grid.np);
    let (prev, mid, next) = (fl[0], fl[1], fl[2]);
    let mut sum = 0.0;
    for i in 0..nx {
        let ip = (i + 1) % nx;
        let im = (i + nx - 1) % nx;
        for j in 1..np - 1 {
            let k = i * np + j;
            let dfdt = (next[k] - prev[k]) / (2.0 * dt);
            let dfdx = (mid[ip * np + j] - mid[im * np + j]) / (2.0 * grid.dx);
            let dfdp = (mid[k + 1] - mid[k - 1]) / (2.0 * grid.dp);
            let r = dfdt + v[j] * dfdx + force.values[k] * dfdp;
            sum += r * r;
        }
    }
    Ok(libm::sqrt(sum * grid.dx * grid.dp))
}

fn wave_residual(
    prev: &[f64],
    mid: &[f64],
    next: &[f64],
    source: &[f64],
    grid: &PhaseSpaceGrid,
    dt: f64,
    c: f64,
) -> Residual {
    let lap = d2_periodic_o4(mid, grid.dx);
    let cdt2 = (c * dt) * (c * dt);
    let field = (0..mid.len())
        .map(|i| (next[i] - 2.0 * mid[i] + prev[i]) / cdt2 - lap[i] - source[i])
        .collect();
    Residual::new(field, grid.dx)
}

fn difference_l2(a: &[f64], b: &[f64], dx: f64) -> f64 {
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    Residual::new(d, dx).l2
}

/// ledger of residuals centered at the middle of the last three states of
/// `history`.
///
/// The wave-equation residuals use the fourth-order Laplacian so that they
/// measure the leapfrog's truncation error instead of vanishing identically.
pub fn residual_report(
    history: &[SimulationState],
    config: &Config,
    grid: &PhaseSpaceGrid,
    dt: f64,
) -> Result<EquationLedger> {
    if history.len() < 3 {
        return Err(Error::InsufficientHistory {
            needed: 3,
            got: history.len(),
        });
    }
    let h = &history[history.len() - 3..];
    let (s0, s1, s2) = (&h[0], &h[1], &h[2]);
    let law = ForceLaw::from_config(config);
    let fields = [&s0.fields, &s1.fields, &s2.fields];
    let c = config.c;

    let vlasov = |label: SpeciesLabel| {
        let f = [
            &s0.species(label).f[..],
            &s1.species(label).f[..],
            &s2.species(label).f[..],
        ];
        vlasov_residual(&f, &fields, s1.species(label), law, config, grid, dt)
    };
    let c_plus = vlasov(SpeciesLabel::Plus)?;
    let c_minus = vlasov(SpeciesLabel::Minus)?;

    let phi_source: Vec<f64> = s1.moments.rho.iter().map(|r| FOUR_PI * r).collect();
    let a_source: Vec<f64> = s1.moments.j.iter().map(|j| FOUR_PI / c * j).collect();
    let d1 = wave_residual(
        &s0.fields.phi_curr,
        &s1.fields.phi_curr,
        &s2.fields.phi_curr,
        &phi_source,
        grid,
        dt,
        c,
    );
    let d2 = wave_residual(
        &s0.fields.a_curr,
        &s1.fields.a_curr,
        &s2.fields.a_curr,
        &a_source,
        grid,
        dt,
        c,
    );
    let gauge = field_gauge_residual(&s2.fields, grid, dt, c);

    let rho = charge_density(&s1.plus.f, &s1.minus.f, s1.plus.q, s1.minus.q, grid);
    let j = current_density(
        &s1.plus.f,
        &s1.minus.f,
        s1.plus.q,
        s1.minus.q,
        s1.plus.m,
        s1.minus.m,
        c,
        config.relativistic,
        grid,
    );
    let f_def = difference_l2(&rho, &s1.moments.rho, grid.dx);
    let g_def = difference_l2(&j, &s1.moments.j, grid.dx);

    let cont = continuity_residual(
        &s0.moments.n_minus,
        &s2.moments.n_minus,
        &s1.moments.flux_minus,
        grid,
        dt,
    );
    let cont_literal = continuity_residual_literal(
        &s0.moments.n_minus,
        &s2.moments.n_minus,
        &s1.moments.flux_minus,
        grid,
        dt,
        c,
    );

    let residuals = [
        c_plus, c_minus, d1.l2, d2.l2, gauge.l2, f_def, g_def, cont.l2,
    ];
    let entries = EQUATION_PARTITION
        .iter()
        .zip(residuals)
        .map(
            |(&(label, status, reduced, full), residual_l2)| LedgerEntry {
                label,
                status,
                residual_l2,
                reduced_multiplicity: reduced,
                full_multiplicity: full,
            },
        )
        .collect();
    Ok(EquationLedger {
        step: s1.step,
        time: s1.time,
        entries,
        unknowns: UNKNOWNS.to_vec(),
        full_equation_total: FULL_EQUATION_TOTAL,
        full_unknown_total: FULL_UNKNOWN_TOTAL,
        continuity_literal_l2: cont_literal.l2,
    })
}

/// Diagnostics for the newest state in `history`.
///
/// Continuity and kinetic residuals need three states and are centered one
/// step back; with fewer than three they are reported as zero.
pub fn diagnostics_record(
    history: &[SimulationState],
    config: &Config,
    grid: &PhaseSpaceGrid,
    dt: f64,
) -> Result<DiagnosticsRecord> {
    let last = history
        .last()
        .ok_or(Error::InsufficientHistory { needed: 1, got: 0 })?;
    let totals = conserved_totals(last, config, grid, dt);
    let gauge = field_gauge_residual(&last.fields, grid, dt, config.c).l2;
    let (mut cont, mut vp, mut vm) = (0.0, 0.0, 0.0);
    if history.len() >= 3 {
        let ledger = residual_report(history, config, grid, dt)?;
        let get = |l: &str| ledger.entry(l).map(|e| e.residual_l2).unwrap_or(0.0);
        cont = get("h");
        vp = get("c+");
        vm = get("c-");
    }
    Ok(DiagnosticsRecord {
        step: last.step,
        time: last.time,
        n_total_plus: totals.n_total_plus,
        n_total_minus: totals.n_total_minus,
        charge_total: totals.charge_total,
        current_total: totals.current_total,
        gauge_residual_l2: gauge,
        continuity_residual_l2: cont,
        vlasov_residual_plus_l2: vp,
        vlasov_residual_minus_l2: vm,
        max_abs_v_over_c: totals.max_abs_v_over_c,
        field_energy_proxy: totals.field_energy_proxy,
    })
}

/// Angular frequency estimate with its spread.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frequency {
    pub omega: f64,
    pub uncertainty: f64,
}

/// Frequency from the spacing of successive same-sign extrema.
///
/// The series is detrended by a least-squares line; each half-cycle between
/// consecutive zero crossings contributes its largest excursion, located to
/// sub-sample accuracy by a parabola through the neighbouring samples.
pub fn oscillation_frequency(times: &[f64], values: &[f64]) -> Result<Frequency> {
    let n = times.len().min(values.len());
    if n < 3 {
        return Err(Error::TooFewExtrema { found: 0 });
    }
    let (t, y) = (&times[..n], &values[..n]);
    let tm = t.iter().sum::<f64>() / n as f64;
    let ym = y.iter().sum::<f64>() / n as f64;
    let (mut stt, mut sty) = (0.0, 0.0);
    for k in 0..n {
        stt += (t[k] - tm) * (t[k] - tm);
        sty += (t[k] - tm) * (y[k] - ym);
    }
    let slope = if stt > 0.0 { sty / stt } else { 0.0 };
    let z: Vec<f64> = (0..n).map(|k| y[k] - ym - slope * (t[k] - tm)).collect();
    let scale = z.iter().fold(0.0, |a, v| f64::max(a, libm::fabs(*v)));
    let floor = 1e-12 * (libm::fabs(ym) + scale);
    if scale.is_nan() || scale <= floor {
        return Err(Error::TooFewExtrema { found: 0 });
    }

    let crossings: Vec<usize> = (1..n)
        .filter(|&k| (z[k - 1] >= 0.0) != (z[k] >= 0.0))
        .collect();
    let mut maxima = Vec::new();
    let mut minima = Vec::new();
    for w in crossings.windows(2) {
        let (a, b) = (w[0], w[1]);
        let k = (a..b)
            .max_by(|&p, &q| libm::fabs(z[p]).total_cmp(&libm::fabs(z[q])))
            .unwrap_or(a);
        let tk = if k > 0 && k + 1 < n {
            let (zl, zc, zr) = (z[k - 1], z[k], z[k + 1]);
            let denom = zl - 2.0 * zc + zr;
            let shift = if denom != 0.0 {
                0.5 * (zl - zr) / denom
            } else {
                0.0
            };
            let shift = shift.clamp(-1.0, 1.0);
            if shift >= 0.0 {
                t[k] + shift * (t[k + 1] - t[k])
            } else {
                t[k] + shift * (t[k] - t[k - 1])
            }
        } else {
            t[k]
        };
        if z[k] >= 0.0 {
            maxima.push(tk);
        } else {
            minima.push(tk);
        }
    }
    let found = maxima.len() + minima.len();
    if found < 4 {
        return Err(Error::TooFewExtrema { found });
    }
    let periods: Vec<f64> = maxima
        .windows(2)
        .chain(minima.windows(2))
        .map(|w| w[1] - w[0])
        .collect();
    let count = periods.len() as f64;
    let mean = periods.iter().sum::<f64>() / count;
    let var = if periods.len() > 1 {
        periods.iter().map(|p| (p - mean) * (p - mean)).sum::<f64>() / (count - 1.0)
    } else {
        0.0
    };
    let two_pi = 2.0 * core::f64::consts::PI;
    Ok(Frequency {
        omega: two_pi / mean,
        uncertainty: two_pi * libm::sqrt(var) / (mean * mean),
    })
}

/// Quantities compared across runs at one step.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSnapshot {
    pub step: u64,
    pub time: f64,
    pub f_plus: Vec<f64>,
    pub f_minus: Vec<f64>,
    pub phi: Vec<f64>,
    pub a: Vec<f64>,
    /// Forces applied in the step that starts from this snapshot.
    pub forces: Option<(ForceField, ForceField)>,
}

impl RunSnapshot {
    pub fn capture(state: &SimulationState) -> Self {
        RunSnapshot {
            step: state.step,
            time: state.time,
            f_plus: state.plus.f.clone(),
            f_minus: state.minus.f.clone(),
            phi: state.fields.phi_curr.clone(),
            a: state.fields.a_curr.clone(),
            forces: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DivergenceRow {
    pub step: u64,
    pub time: f64,
    pub f_plus_dist: f64,
    pub f_minus_dist: f64,
    pub phi_dist: f64,
    pub a_dist: f64,
    /// Both species combined; NaN where either snapshot lacks forces.
    pub force_dist: f64,
}

fn phase_distance(grid: &PhaseSpaceGrid, a: &[f64], b: &[f64]) -> f64 {
    let sum: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    libm::sqrt(sum * grid.dx * grid.dp)
}

/// Pairwise L2 distances between matching snapshots of two runs.
pub fn compare_runs(
    grid_a: &PhaseSpaceGrid,
    run_a: &[RunSnapshot],
    grid_b: &PhaseSpaceGrid,
    run_b: &[RunSnapshot],
) -> Result<Vec<DivergenceRow>> {
    if !grid_a.same_shape(grid_b) {
        return Err(Error::GridMismatch("runs use different grids"));
    }
    if run_a.len() != run_b.len() {
        return Err(Error::GridMismatch("runs have different snapshot counts"));
    }
    let g = grid_a;
    run_a
        .iter()
        .zip(run_b)
        .map(|(a, b)| {
            if a.step != b.step || a.f_plus.len() != g.len() || b.f_plus.len() != g.len() {
                return Err(Error::GridMismatch("snapshots do not line up"));
            }
            let force_dist = match (&a.forces, &b.forces) {
                (Some((ap, am)), Some((bp, bm))) => {
                    let dp = phase_distance(g, &ap.values, &bp.values);
                    let dm = phase_distance(g, &am.values, &bm.values);
                    libm::sqrt(dp * dp + dm * dm)
                }
                _ => f64::NAN,
            };
            Ok(DivergenceRow {
                step: a.step,
                time: a.time,
                f_plus_dist: phase_distance(g, &a.f_plus, &b.f_plus),
                f_minus_dist: phase_distance(g, &a.f_minus, &b.f_minus),
                phi_dist: difference_l2(&a.phi, &b.phi, g.dx),
                a_dist: difference_l2(&a.a, &b.a, g.dx),
                force_dist,
            })
        })
        .collect()
}
