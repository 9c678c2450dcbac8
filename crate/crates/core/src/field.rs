//! Explicit leapfrog for the Lorenz-gauge wave equations
//! `u_tt / c^2 - u_xx = s`, periodic Poisson initialization, and the gauge
//! residual.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::grid::{d1_periodic, d2_periodic, PhaseSpaceGrid, Residual};
use crate::state::FieldState;
use crate::FOUR_PI;

/// Two retained time levels of one field component, one step apart.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveLevels {
    pub u_prev: Vec<f64>,
    pub u_curr: Vec<f64>,
}

impl WaveLevels {
    pub fn new(u_prev: Vec<f64>, u_curr: Vec<f64>) -> Self {
        debug_assert_eq!(u_prev.len(), u_curr.len());
        WaveLevels { u_prev, u_curr }
    }

    /// Levels for initial value `u0`, initial rate `ut0` and source `s0`,
    /// with the earlier level from a second-order Taylor expansion back in
    /// time.
    pub fn start(
        u0: Vec<f64>,
        ut0: &[f64],
        s0: &[f64],
        grid: &PhaseSpaceGrid,
        dt: f64,
        c: f64,
    ) -> Self {
        let lap = d2_periodic(&u0, grid.dx);
        let u_prev = (0..u0.len())
            .map(|i| u0[i] - dt * ut0[i] + 0.5 * (c * dt) * (c * dt) * (lap[i] + s0[i]))
            .collect();
        WaveLevels { u_prev, u_curr: u0 }
    }

    /// Drops the oldest level.
    pub fn rotate(&mut self, next: Vec<f64>) {
        self.u_prev = core::mem::replace(&mut self.u_curr, next);
    }
}

/// Accepts `c dt / dx <= 1` and `v_max dt / dx <= 1`.
pub fn cfl_check(grid: &PhaseSpaceGrid, dt: f64, c: f64, v_max: f64) -> Result<()> {
    const SLACK: f64 = 1.0 + 4.0 * f64::EPSILON;
    let light = c * dt / grid.dx;
    if light.is_nan() || light > SLACK {
        return Err(Error::Cfl {
            which: "c*dt/dx",
            ratio: light,
        });
    }
    let kinetic = v_max * dt / grid.dx;
    if kinetic.is_nan() || kinetic > SLACK {
        return Err(Error::Cfl {
            which: "max|v|*dt/dx",
            ratio: kinetic,
        });
    }
    Ok(())
}

/// One leapfrog step: returns
/// `2 u_curr - u_prev + (c dt)^2 (D2 u_curr + source)`.
///
/// `source` must be sampled at the time of `u_curr`. The caller rotates.
pub fn wave_step(
    levels: &WaveLevels,
    source: &[f64],
    grid: &PhaseSpaceGrid,
    dt: f64,
    c: f64,
) -> Result<Vec<f64>> {
    let lap = d2_periodic(&levels.u_curr, grid.dx);
    let cdt2 = (c * dt) * (c * dt);
    let next: Vec<f64> = (0..levels.u_curr.len())
        .map(|i| 2.0 * levels.u_curr[i] - levels.u_prev[i] + cdt2 * (lap[i] + source[i]))
        .collect();
    if let Some(index) = next.iter().position(|v| !v.is_finite()) {
        return Err(Error::FieldBlowup { index });
    }
    Ok(next)
}

/// Zero-mean solution of `-D2 phi = 4 pi rho`, exact up to round-off.
///
/// Integrates the discrete Gauss law twice: the cell-face gradient follows
/// from a running sum of the source and the zero-net-gradient condition
/// that periodicity imposes.
pub fn poisson_init(rho: &[f64], grid: &PhaseSpaceGrid) -> Result<Vec<f64>> {
    poisson_init_scaled(rho, grid, 0.0)
}

/// As [`poisson_init`], with the neutrality tolerance measured against
/// `max(max|rho|, charge_scale)`. `charge_scale` is the magnitude of the
/// individual species charge densities, so that round-off left over from
/// their cancellation is not mistaken for net charge.
pub fn poisson_init_scaled(
    rho: &[f64],
    grid: &PhaseSpaceGrid,
    charge_scale: f64,
) -> Result<Vec<f64>> {
    let n = rho.len();
    let scale = rho.iter().fold(0.0, |acc, r| f64::max(acc, libm::fabs(*r)));
    if scale == 0.0 {
        return Ok(alloc::vec![0.0; n]);
    }
    let mean = rho.iter().sum::<f64>() / n as f64;
    if libm::fabs(mean) > 1e-12 * f64::max(scale, charge_scale) {
        return Err(Error::NonNeutral {
            mean_rho: mean,
            scale,
        });
    }
    let dx = grid.dx;
    let source: Vec<f64> = rho.iter().map(|r| FOUR_PI * (r - mean)).collect();

    // Face gradients g[i] = (phi[i+1] - phi[i]) / dx, up to a constant.
    let mut gradient = Vec::with_capacity(n);
    let mut running = 0.0;
    for s in &source {
        running -= dx * s;
        gradient.push(running);
    }
    let offset = gradient.iter().sum::<f64>() / n as f64;

    let mut phi = Vec::with_capacity(n);
    let mut value = 0.0;
    phi.push(value);
    for g in &gradient[..n - 1] {
        value += dx * (g - offset);
        phi.push(value);
    }
    let phi_mean = phi.iter().sum::<f64>() / n as f64;
    phi.iter_mut().for_each(|p| *p -= phi_mean);
    Ok(phi)
}

/// Lorenz-gauge residual `(phi_curr - phi_prev) / (c dt) + D1 a_mid`.
///
/// `a_mid` must be sampled midway between the two `phi` levels (for
/// integer-time levels, the average of the two `A` levels) so the residual
/// is time-centered.
pub fn gauge_residual(
    phi: &WaveLevels,
    a_mid: &[f64],
    grid: &PhaseSpaceGrid,
    dt: f64,
    c: f64,
) -> Residual {
    let div = d1_periodic(a_mid, grid.dx);
    let field = (0..div.len())
        .map(|i| (phi.u_curr[i] - phi.u_prev[i]) / (c * dt) + div[i])
        .collect();
    Residual::new(field, grid.dx)
}

/// Gauge residual of the latest two levels held in `fields`.
pub fn field_gauge_residual(
    fields: &FieldState,
    grid: &PhaseSpaceGrid,
    dt: f64,
    c: f64,
) -> Residual {
    let a_mid: Vec<f64> = fields
        .a_prev
        .iter()
        .zip(&fields.a_curr)
        .map(|(a, b)| 0.5 * (a + b))
        .collect();
    let phi = WaveLevels {
        u_prev: fields.phi_prev.clone(),
        u_curr: fields.phi_curr.clone(),
    };
    gauge_residual(&phi, &a_mid, grid, dt, c)
}

/// `sum [((u_curr - u_prev) / dt)^2 + c^2 (D1 u_curr)^2] dx` for one component.
pub fn wave_energy(levels: &WaveLevels, grid: &PhaseSpaceGrid, dt: f64, c: f64) -> f64 {
    let grad = d1_periodic(&levels.u_curr, grid.dx);
    (0..grad.len())
        .map(|i| {
            let rate = (levels.u_curr[i] - levels.u_prev[i]) / dt;
            rate * rate + c * c * grad[i] * grad[i]
        })
        .sum::<f64>()
        * grid.dx
}

/// Field energy proxy
/// `sum [((phi_c - phi_p)/(c dt))^2 + (D1 phi)^2 + ((a_c - a_p)/(c dt))^2 + (D1 a)^2] dx`.
pub fn field_energy_proxy(fields: &FieldState, grid: &PhaseSpaceGrid, dt: f64, c: f64) -> f64 {
    let dphi = d1_periodic(&fields.phi_curr, grid.dx);
    let da = d1_periodic(&fields.a_curr, grid.dx);
    let cdt = c * dt;
    (0..grid.nx)
        .map(|i| {
            let pt = (fields.phi_curr[i] - fields.phi_prev[i]) / cdt;
            let at = (fields.a_curr[i] - fields.a_prev[i]) / cdt;
            pt * pt + dphi[i] * dphi[i] + at * at + da[i] * da[i]
        })
        .sum::<f64>()
        * grid.dx
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;
    use proptest::prelude::*;

    fn grid(nx: usize, len: f64) -> PhaseSpaceGrid {
        PhaseSpaceGrid::new(nx, len, 8, 1.0)
    }

    #[test]
    fn cfl_boundaries() {
        let g = grid(10, 1.0);
        let c = 2.0;
        assert!(cfl_check(&g, 0.5 * g.dx / c, c, 0.0).is_ok());
        assert!(cfl_check(&g, g.dx / c, c, 0.0).is_ok());
        match cfl_check(&g, 1.01 * g.dx / c, c, 0.0) {
            Err(Error::Cfl { ratio, .. }) => assert!((ratio - 1.01).abs() < 1e-12),
            other => panic!("{other:?}"),
        }
        assert!(cfl_check(&g, 0.5 * g.dx / c, c, 3.0 * c).is_err());
    }

    #[test]
    fn zero_stays_zero() {
        let g = grid(16, 1.0);
        let mut levels = WaveLevels::new(alloc::vec![0.0; 16], alloc::vec![0.0; 16]);
        for _ in 0..20 {
            let next = wave_step(&levels, &[0.0; 16], &g, 0.01, 1.0).unwrap();
            levels.rotate(next);
        }
        assert!(levels.u_curr.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn blowup_is_reported() {
        let g = grid(8, 1.0);
        let mut u = alloc::vec![0.0; 8];
        u[3] = f64::MAX;
        let levels = WaveLevels::new(alloc::vec![0.0; 8], u);
        assert!(matches!(
            wave_step(&levels, &[0.0; 8], &g, 0.1, 1.0),
            Err(Error::FieldBlowup { .. })
        ));
    }

    fn standing_wave_error(nx: usize) -> f64 {
        let len = 1.0;
        let c = 1.0;
        let g = grid(nx, len);
        let k = 2.0 * PI / len;
        let dt = 0.5 * g.dx / c;
        let steps = libm::round(len / (c * dt)) as usize;
        let u0: Vec<f64> = g.x_nodes.iter().map(|x| libm::cos(k * x)).collect();
        let mut levels =
            WaveLevels::start(u0, &alloc::vec![0.0; nx], &alloc::vec![0.0; nx], &g, dt, c);
        let mut err: f64 = 0.0;
        for n in 1..=steps {
            let next = wave_step(&levels, &alloc::vec![0.0; nx], &g, dt, c).unwrap();
            levels.rotate(next);
            let t = n as f64 * dt;
            for (i, x) in g.x_nodes.iter().enumerate() {
                err = err.max((levels.u_curr[i] - libm::cos(k * x) * libm::cos(c * k * t)).abs());
            }
        }
        err
    }

    #[test]
    fn standing_wave_converges_second_order() {
        let order = libm::log2(standing_wave_error(64) / standing_wave_error(128));
        assert!((order - 2.0).abs() < 0.3, "order {order}");
    }

    #[test]
    fn static_source_keeps_matched_field() {
        let len = 2.0 * PI;
        let run = |nx: usize| {
            let g = grid(nx, len);
            let (rho0, k, c) = (0.3, 1.0, 1.0);
            let s: Vec<f64> = g
                .x_nodes
                .iter()
                .map(|x| FOUR_PI * rho0 * libm::cos(k * x))
                .collect();
            let phi0: Vec<f64> = g
                .x_nodes
                .iter()
                .map(|x| FOUR_PI * rho0 / (k * k) * libm::cos(k * x))
                .collect();
            let mut levels = WaveLevels::new(phi0.clone(), phi0.clone());
            let next = wave_step(&levels, &s, &g, 0.5 * g.dx, c).unwrap();
            levels.rotate(next);
            levels
                .u_curr
                .iter()
                .zip(&phi0)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max)
        };
        let (e1, e2) = (run(32), run(64));
        // Per-step change is (c dt)^2 times the O(dx^2) stencil defect.
        assert!(e1 < 1e-3);
        assert!(libm::log2(e1 / e2) > 3.8);
    }

    #[test]
    fn poisson_mode_matches_discrete_symbol() {
        let g = grid(32, 5.0);
        let k = 2.0 * PI * 3.0 / 5.0;
        let rho: Vec<f64> = g.x_nodes.iter().map(|x| libm::cos(k * x)).collect();
        let phi = poisson_init(&rho, &g).unwrap();
        let kd2 = (2.0 - 2.0 * libm::cos(k * g.dx)) / (g.dx * g.dx);
        for (i, &x) in g.x_nodes.iter().enumerate() {
            assert!((phi[i] - FOUR_PI * libm::cos(k * x) / kd2).abs() < 1e-12);
        }
        assert!(phi.iter().sum::<f64>().abs() < 1e-12);
    }

    #[test]
    fn poisson_zero_and_non_neutral() {
        let g = grid(16, 1.0);
        assert!(poisson_init(&[0.0; 16], &g)
            .unwrap()
            .iter()
            .all(|&v| v == 0.0));
        assert!(matches!(
            poisson_init(&[1.0; 16], &g),
            Err(Error::NonNeutral { .. })
        ));
    }

    #[test]
    fn gauge_residual_cases() {
        let g = grid(32, 2.0 * PI);
        let phi: Vec<f64> = g.x_nodes.iter().map(|x| libm::sin(*x)).collect();
        let levels = WaveLevels::new(phi.clone(), phi);
        assert_eq!(gauge_residual(&levels, &[0.0; 32], &g, 0.1, 2.0).l2, 0.0);
        assert_eq!(gauge_residual(&levels, &[0.4; 32], &g, 0.1, 2.0).l2, 0.0);
    }

    #[test]
    fn gauge_residual_manufactured_converges() {
        // phi = c t sin(kx), A = cos(kx) / k, so phi_t / c + A_x = 0.
        let l2 = |nx: usize| {
            let g = grid(nx, 2.0 * PI);
            let (c, k) = (2.0, 1.0);
            let dt = 0.5 * g.dx / c;
            let t = 0.3;
            let phi_at = |t: f64| -> Vec<f64> {
                g.x_nodes.iter().map(|x| c * t * libm::sin(k * x)).collect()
            };
            let a: Vec<f64> = g.x_nodes.iter().map(|x| libm::cos(k * x) / k).collect();
            let levels = WaveLevels::new(phi_at(t - dt), phi_at(t));
            gauge_residual(&levels, &a, &g, dt, c).l2
        };
        let order = libm::log2(l2(64) / l2(128));
        assert!((order - 2.0).abs() < 0.3, "order {order}");
    }

    fn energy_history(nx: usize, cfl: f64, steps: usize) -> Vec<f64> {
        let g = grid(nx, 1.0);
        let c = 1.0;
        let dt = cfl * g.dx / c;
        let k = 2.0 * PI;
        let u0: Vec<f64> = g.x_nodes.iter().map(|x| libm::sin(k * x)).collect();
        let zero = alloc::vec![0.0; nx];
        let mut levels = WaveLevels::start(u0, &zero, &zero, &g, dt, c);
        let mut out = alloc::vec![wave_energy(&levels, &g, dt, c)];
        for _ in 0..steps {
            let next = wave_step(&levels, &zero, &g, dt, c).unwrap();
            levels.rotate(next);
            out.push(wave_energy(&levels, &g, dt, c));
        }
        out
    }

    #[test]
    fn homogeneous_energy_is_bounded() {
        // The proxy pairs a backward time difference with a centered
        // gradient, so it wobbles by about ck dt / 2 even though leapfrog
        // conserves its own staggered energy exactly.
        let e = energy_history(256, 0.5, 1000);
        for v in &e {
            assert!((v / e[0] - 1.0).abs() < 0.01, "energy ratio {}", v / e[0]);
        }
        // At the stability limit the wobble is larger but does not grow.
        let e = energy_history(64, 1.0, 1000);
        let early = e[..200].iter().cloned().fold(0.0, f64::max);
        let late = e[800..].iter().cloned().fold(0.0, f64::max);
        assert!((late / early - 1.0).abs() < 1e-3);
    }

    proptest! {
        #[test]
        fn poisson_inverts_discrete_laplacian(vals in proptest::collection::vec(-1.0f64..1.0, 8..64)) {
            let n = vals.len();
            let mean = vals.iter().sum::<f64>() / n as f64;
            let rho: Vec<f64> = vals.iter().map(|v| v - mean).collect();
            let scale = rho.iter().fold(0.0f64, |a, r| a.max(r.abs()));
            prop_assume!(scale > 1e-6);
            let g = grid(n, 3.0);
            let phi = poisson_init(&rho, &g).unwrap();
            let lap = d2_periodic(&phi, g.dx);
            for i in 0..n {
                prop_assert!((lap[i] + FOUR_PI * rho[i]).abs() <= 1e-10 * FOUR_PI * scale);
            }
            prop_assert!(phi.iter().sum::<f64>().abs() < 1e-12 * (1.0 + phi.iter().fold(0.0f64, |a, p| a.max(p.abs()))));
        }

        #[test]
        fn wave_step_is_linear(
            a0 in proptest::collection::vec(-1.0f64..1.0, 16), a1 in proptest::collection::vec(-1.0f64..1.0, 16),
            b0 in proptest::collection::vec(-1.0f64..1.0, 16), b1 in proptest::collection::vec(-1.0f64..1.0, 16),
            sa in proptest::collection::vec(-1.0f64..1.0, 16), sb in proptest::collection::vec(-1.0f64..1.0, 16),
            w in -2.0f64..2.0,
        ) {
            let g = grid(16, 1.0);
            let mix = |x: &[f64], y: &[f64]| -> Vec<f64> { x.iter().zip(y).map(|(p, q)| p + w * q).collect() };
            let ua = wave_step(&WaveLevels::new(a0.clone(), a1.clone()), &sa, &g, 0.05, 1.0).unwrap();
            let ub = wave_step(&WaveLevels::new(b0.clone(), b1.clone()), &sb, &g, 0.05, 1.0).unwrap();
            let uab = wave_step(&WaveLevels::new(mix(&a0, &b0), mix(&a1, &b1)), &mix(&sa, &sb), &g, 0.05, 1.0).unwrap();
            let scale = ua.iter().chain(&ub).fold(1e-300f64, |a, v| a.max(v.abs())) * (1.0 + w.abs());
            for i in 0..16 {
                prop_assert!((uab[i] - (ua[i] + w * ub[i])).abs() <= 1e-12 * scale);
            }
        }
    }
}
