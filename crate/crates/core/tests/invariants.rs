use std::f64::consts::PI;

use kinvlasov_core::field::poisson_init;
use kinvlasov_core::grid::d2_periodic;
use kinvlasov_core::state::initialize_state;
use kinvlasov_core::vlasov::step;
use kinvlasov_core::{Config, InitConfig, PhaseSpaceGrid, Preset, TimePlan, FOUR_PI};
use proptest::prelude::*;

fn preset_config(preset: Preset, amplitude: f64) -> Config {
    Config {
        nx: 32,
        np: 128,
        p_max: 10.0,
        init: InitConfig {
            preset,
            amplitude,
            drift: if preset == Preset::TwoStream {
                2.0
            } else {
                0.0
            },
            ..Config::default().init
        },
        ..Config::default()
    }
    .validate()
    .unwrap()
}

#[test]
fn unperturbed_presets_hold_n0_times_length() {
    for preset in [Preset::FreeStream, Preset::Landau, Preset::TwoStream] {
        let cfg = preset_config(preset, 0.0);
        let grid = PhaseSpaceGrid::from_config(&cfg);
        let state = initialize_state(&cfg, &grid).unwrap();
        let expected = cfg.init.n0 * cfg.x_max;
        for species in [&state.plus, &state.minus] {
            let total = grid.phase_integral(&species.f);
            assert!(
                (total - expected).abs() <= 1e-8 * expected,
                "{preset:?}: {total}"
            );
        }
    }
}

#[test]
fn grid_construction_is_bitwise_repeatable() {
    let cfg = preset_config(Preset::Landau, 0.1);
    let a = PhaseSpaceGrid::from_config(&cfg);
    let b = PhaseSpaceGrid::from_config(&cfg.clone());
    assert_eq!(a, b);
    assert_eq!(
        initialize_state(&cfg, &a).unwrap(),
        initialize_state(&cfg, &b).unwrap()
    );
}

#[test]
fn undershoot_stays_within_tolerance() {
    let cfg = Config {
        t_end: 3.0,
        ..preset_config(Preset::TwoStream, 0.05)
    };
    let grid = PhaseSpaceGrid::from_config(&cfg);
    let plan = TimePlan::from_config(&cfg, &grid).unwrap();
    let mut state = initialize_state(&cfg, &grid).unwrap();
    for _ in 0..plan.nsteps {
        state = step(&state, &cfg, &grid, plan.dt).unwrap().state;
    }
    for s in [&state.plus, &state.minus] {
        assert!(s.f.iter().all(|v| v.is_finite()));
        assert!(
            s.min_f() >= -1e-10 * s.max_f(),
            "{} vs {}",
            s.min_f(),
            s.max_f()
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn poisson_solve_is_discretely_exact(
        coeffs in proptest::collection::vec(-1.0f64..1.0, 6),
        nx in 8usize..80,
    ) {
        let grid = PhaseSpaceGrid::new(nx, 3.0, 8, 1.0);
        let mut rho: Vec<f64> = grid.x_nodes.iter().map(|&x| {
            coeffs.chunks(2).enumerate().map(|(m, c)| {
                let k = 2.0 * PI * (m + 1) as f64 / 3.0;
                c[0] * (k * x).cos() + c[1] * (k * x).sin()
            }).sum()
        }).collect();
        let mean = rho.iter().sum::<f64>() / nx as f64;
        rho.iter_mut().for_each(|r| *r -= mean);
        let scale = rho.iter().fold(0.0f64, |a, r| a.max(r.abs()));
        prop_assume!(scale > 1e-6);
        let phi = poisson_init(&rho, &grid).unwrap();
        let lap = d2_periodic(&phi, grid.dx);
        let worst = lap.iter().zip(&rho).map(|(l, r)| (l + FOUR_PI * r).abs()).fold(0.0, f64::max);
        prop_assert!(worst <= 1e-10 * FOUR_PI * scale, "{worst}");
        let phi_mean = phi.iter().sum::<f64>() / nx as f64;
        prop_assert!(phi_mean.abs() <= 1e-12 * phi.iter().fold(1.0f64, |a, p| a.max(p.abs())));
    }
}
