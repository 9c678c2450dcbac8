//! Run configuration and its validation.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::{ConfigViolation, Error, Result};

/// Which force law drives the momentum kicks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ForceMode {
    Modified,
    Standard,
}

impl ForceMode {
    pub fn as_str(self) -> &'static str {
        match self {
            ForceMode::Modified => "modified",
            ForceMode::Standard => "standard",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "modified" => Some(ForceMode::Modified),
            "standard" => Some(ForceMode::Standard),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// Perturbed Gaussian, forces disabled.
    FreeStream,
    /// Perturbed Gaussian, forces enabled.
    Landau,
    /// Two counter-propagating half-density beams at `+-drift`.
    TwoStream,
}

impl Preset {
    pub fn as_str(self) -> &'static str {
        match self {
            Preset::FreeStream => "free_stream",
            Preset::Landau => "landau",
            Preset::TwoStream => "two_stream",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "free_stream" => Some(Preset::FreeStream),
            "landau" => Some(Preset::Landau),
            "two_stream" => Some(Preset::TwoStream),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpeciesLabel {
    Plus,
    Minus,
}

impl SpeciesLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            SpeciesLabel::Plus => "plus",
            SpeciesLabel::Minus => "minus",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpeciesConfig {
    pub q: f64,
    pub m: f64,
    /// Overrides [`InitConfig::temperature`] for this species when set.
    pub temperature: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InitConfig {
    pub preset: Preset,
    pub n0: f64,
    pub amplitude: f64,
    pub k_mode: usize,
    /// Momentum-space Gaussian width squared is `m * temperature`.
    pub temperature: f64,
    pub drift: f64,
}

/// Full description of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub nx: usize,
    pub x_max: f64,
    pub np: usize,
    pub p_max: f64,
    pub c: f64,
    pub relativistic: bool,
    pub force_mode: ForceMode,
    pub cfl_fraction: f64,
    pub t_end: f64,
    pub output_every: usize,
    /// One fixed-point refinement of the kick foot point.
    pub kick_refine: bool,
    pub plus: SpeciesConfig,
    pub minus: SpeciesConfig,
    pub init: InitConfig,
}

/// `n0` at which `4 pi n0 q^2 / m = 1` for unit charge and mass.
pub const UNIT_PLASMA_DENSITY: f64 = 1.0 / crate::FOUR_PI;

/// Ratio `f(p_max) / f_peak` must stay below this.
pub const TAIL_TOLERANCE: f64 = 1e-12;

impl Default for Config {
    fn default() -> Self {
        Config {
            nx: 64,
            x_max: 4.0 * core::f64::consts::PI,
            np: 128,
            p_max: 8.0,
            c: 20.0,
            relativistic: true,
            force_mode: ForceMode::Modified,
            cfl_fraction: 0.9,
            t_end: 10.0,
            output_every: 10,
            kick_refine: false,
            plus: SpeciesConfig {
                q: 1.0,
                m: 1.0,
                temperature: None,
            },
            minus: SpeciesConfig {
                q: -1.0,
                m: 1.0,
                temperature: None,
            },
            init: InitConfig {
                preset: Preset::Landau,
                n0: UNIT_PLASMA_DENSITY,
                amplitude: 0.01,
                k_mode: 1,
                temperature: 1.0,
                drift: 0.0,
            },
        }
    }
}

impl Config {
    pub fn species(&self, label: SpeciesLabel) -> &SpeciesConfig {
        match label {
            SpeciesLabel::Plus => &self.plus,
            SpeciesLabel::Minus => &self.minus,
        }
    }

    pub fn species_temperature(&self, label: SpeciesLabel) -> f64 {
        self.species(label)
            .temperature
            .unwrap_or(self.init.temperature)
    }

    /// Wavenumber of the initial perturbation.
    pub fn wavenumber(&self) -> f64 {
        2.0 * core::f64::consts::PI * self.init.k_mode as f64 / self.x_max
    }

    /// Momentum offsets of the Gaussian components carried by a species.
    pub(crate) fn beam_centers(&self, label: SpeciesLabel) -> Vec<f64> {
        match (label, self.init.preset) {
            (SpeciesLabel::Plus, _) => alloc::vec![0.0],
            (SpeciesLabel::Minus, Preset::TwoStream) => {
                alloc::vec![self.init.drift, -self.init.drift]
            }
            (SpeciesLabel::Minus, _) => alloc::vec![self.init.drift],
        }
    }

    /// Largest `f(+-p_max) / f_peak` over both species.
    pub fn tail_ratio(&self, label: SpeciesLabel) -> f64 {
        let width2 = self.species(label).m * self.species_temperature(label);
        let nearest = self
            .beam_centers(label)
            .iter()
            .map(|d| self.p_max - libm::fabs(*d))
            .fold(f64::INFINITY, f64::min);
        if nearest <= 0.0 {
            return 1.0;
        }
        libm::exp(-nearest * nearest / (2.0 * width2))
    }

    /// Checks every invariant; returns the config unchanged or every violation.
    pub fn validate(self) -> Result<Config> {
        let mut v = Violations::default();
        v.check(self.nx >= 8, "grid.nx", self.nx, "nx must be at least 8");
        v.check(self.np >= 8, "grid.np", self.np, "np must be at least 8");
        v.positive("grid.x_max", self.x_max, "x_max must be positive");
        v.positive("grid.p_max", self.p_max, "p_max must be positive");
        v.positive("physics.c", self.c, "c must be positive");
        v.check(
            self.cfl_fraction.is_finite() && self.cfl_fraction > 0.0 && self.cfl_fraction <= 1.0,
            "time.cfl_fraction",
            self.cfl_fraction,
            "cfl_fraction must lie in (0, 1]",
        );
        v.positive("time.t_end", self.t_end, "t_end must be positive");
        v.check(
            self.output_every >= 1,
            "time.output_every",
            self.output_every,
            "output_every must be positive",
        );
        for label in [SpeciesLabel::Plus, SpeciesLabel::Minus] {
            let s = self.species(label);
            let prefix = label.as_str();
            v.check(
                s.q.is_finite(),
                &format!("species.{prefix}.q"),
                s.q,
                "charge must be finite",
            );
            v.positive(&format!("species.{prefix}.m"), s.m, "mass must be positive");
            if let Some(t) = s.temperature {
                v.positive(
                    &format!("species.{prefix}.temperature"),
                    t,
                    "temperature must be positive",
                );
            }
        }
        v.positive("init.n0", self.init.n0, "n0 must be positive");
        v.check(
            self.init.amplitude.is_finite(),
            "init.amplitude",
            self.init.amplitude,
            "amplitude must be finite",
        );
        v.check(
            self.init.k_mode >= 1,
            "init.k_mode",
            self.init.k_mode,
            "k_mode must be a positive integer",
        );
        v.positive(
            "init.temperature",
            self.init.temperature,
            "temperature must be positive",
        );
        v.check(
            self.init.drift.is_finite(),
            "init.drift",
            self.init.drift,
            "drift must be finite",
        );

        // The tail test only makes sense once masses and temperatures are sane.
        if v.0.is_empty() {
            for label in [SpeciesLabel::Plus, SpeciesLabel::Minus] {
                let ratio = self.tail_ratio(label);
                v.check(
                    ratio < TAIL_TOLERANCE,
                    "grid.p_max",
                    self.p_max,
                    &format!(
                        "p_max too small: species {} has f(p_max)/f_peak = {:e} (must be below {:e})",
                        label.as_str(),
                        ratio,
                        TAIL_TOLERANCE
                    ),
                );
            }
        }

        if v.0.is_empty() {
            Ok(self)
        } else {
            Err(Error::InvalidConfig(v.0))
        }
    }
}

#[derive(Default)]
struct Violations(Vec<ConfigViolation>);

impl Violations {
    fn check<T: ToString>(&mut self, ok: bool, key: &str, value: T, message: &str) {
        if !ok {
            self.0.push(ConfigViolation {
                key: String::from(key),
                value: value.to_string(),
                message: String::from(message),
            });
        }
    }

    fn positive(&mut self, key: &str, value: f64, message: &str) {
        self.check(value.is_finite() && value > 0.0, key, value, message);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn violations(cfg: Config) -> Vec<ConfigViolation> {
        match cfg.validate() {
            Err(Error::InvalidConfig(v)) => v,
            other => panic!("expected violations, got {other:?}"),
        }
    }

    #[test]
    fn accepts_reasonable_config() {
        let cfg = Config {
            nx: 64,
            np: 128,
            ..Config::default()
        };
        assert!(cfg.validate().is_ok());
    }

    #[test]
    fn rejects_zero_mass() {
        let mut cfg = Config::default();
        cfg.minus.m = 0.0;
        let v = violations(cfg);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].key, "species.minus.m");
        assert_eq!(v[0].message, "mass must be positive");
    }

    #[test]
    fn rejects_heavy_tail() {
        // f(p_max)/f_peak = exp(-p_max^2 / (2 m T)) = 1e-3  =>  T = p_max^2 / (2 ln 1e3).
        let mut cfg = Config::default();
        cfg.init.temperature = cfg.p_max * cfg.p_max / (2.0 * libm::log(1e3));
        let ratio = cfg.tail_ratio(SpeciesLabel::Minus);
        assert!((ratio - 1e-3).abs() < 1e-12);
        let v = violations(cfg);
        assert!(v.iter().all(|x| x.key == "grid.p_max"));
        assert!(v[0].message.starts_with("p_max too small"));
    }

    #[test]
    fn collects_all_violations() {
        let mut cfg = Config::default();
        cfg.nx = 4;
        cfg.c = -1.0;
        cfg.cfl_fraction = 1.5;
        let keys: Vec<_> = violations(cfg).into_iter().map(|v| v.key).collect();
        assert_eq!(keys, ["grid.nx", "physics.c", "time.cfl_fraction"]);
    }

    #[test]
    fn drift_shrinks_margin() {
        let mut cfg = Config::default();
        cfg.init.drift = 3.0;
        assert!(cfg.clone().validate().is_err());
        cfg.p_max = 11.0;
        assert!(cfg.validate().is_ok());
    }
}
