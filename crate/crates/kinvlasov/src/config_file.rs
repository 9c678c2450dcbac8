//! The line-oriented `[section]` / `key = value` run configuration.
//!
//! Every key is optional and falls back to [`Config::default`]; both species
//! sections must be present. `render_config` writes a file that parses back
//! to an identical `Config`.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::str::FromStr;

use kinvlasov_core::{Config, Error as CoreError, ForceMode, Preset, SpeciesConfig};

use crate::error::{CliError, LocatedViolation, Result};

const SECTIONS: [&str; 6] = [
    "grid",
    "time",
    "physics",
    "species.plus",
    "species.minus",
    "init",
];

/// Parses and validates a config file.
pub fn parse_config(text: &str) -> Result<Config> {
    let mut config = Config::default();
    let mut seen: HashMap<(String, String), usize> = HashMap::new();
    let mut sections_seen: HashMap<&'static str, usize> = HashMap::new();
    let mut section: Option<&'static str> = None;

    for (index, raw) in text.lines().enumerate() {
        let line = index + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(rest) = content.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| parse_error(line, "unterminated section header"))?
                .trim();
            let known = SECTIONS
                .iter()
                .copied()
                .find(|s| *s == name)
                .ok_or_else(|| parse_error(line, &format!("unknown section [{name}]")))?;
            if let Some(&first) = sections_seen.get(known) {
                return Err(parse_error(
                    line,
                    &format!("section [{known}] repeated (first at line {first})"),
                ));
            }
            sections_seen.insert(known, line);
            section = Some(known);
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| parse_error(line, "expected `key = value`"))?;
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() {
            return Err(parse_error(line, "missing key"));
        }
        let sect = section.ok_or_else(|| parse_error(line, "key outside any section"))?;
        if let Some(&first) = seen.get(&(sect.to_string(), key.to_string())) {
            return Err(CliError::DuplicateKey {
                section: sect.to_string(),
                key: key.to_string(),
                first,
                second: line,
            });
        }
        apply(&mut config, sect, key, value, line)?;
        seen.insert((sect.to_string(), key.to_string()), line);
    }

    for required in ["species.plus", "species.minus"] {
        if !sections_seen.contains_key(required) {
            return Err(CliError::MissingSection(required));
        }
    }

    config.validate().map_err(|e| match e {
        CoreError::InvalidConfig(violations) => CliError::Invalid(
            violations
                .into_iter()
                .map(|violation| {
                    let line = violation
                        .key
                        .rsplit_once('.')
                        .and_then(|(s, k)| seen.get(&(s.to_string(), k.to_string())))
                        .copied();
                    LocatedViolation { violation, line }
                })
                .collect(),
        ),
        other => CliError::Core(other),
    })
}

fn parse_error(line: usize, message: &str) -> CliError {
    CliError::Parse {
        line,
        message: message.to_string(),
    }
}

fn number<T: FromStr>(key: &str, value: &str, line: usize, kind: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| parse_error(line, &format!("invalid {kind} `{value}` for {key}")))
}

fn boolean(key: &str, value: &str, line: usize) -> Result<bool> {
    match value {
        "true" | "1" => Ok(true),
        "false" | "0" => Ok(false),
        _ => Err(parse_error(
            line,
            &format!("invalid boolean `{value}` for {key} (expected true, false, 1 or 0)"),
        )),
    }
}

fn apply(config: &mut Config, section: &str, key: &str, value: &str, line: usize) -> Result<()> {
    let real = |v: &str| number::<f64>(key, v, line, "number");
    let count = |v: &str| number::<usize>(key, v, line, "non-negative integer");
    match (section, key) {
        ("grid", "nx") => config.nx = count(value)?,
        ("grid", "x_max") => config.x_max = real(value)?,
        ("grid", "np") => config.np = count(value)?,
        ("grid", "p_max") => config.p_max = real(value)?,
        ("time", "cfl_fraction") => config.cfl_fraction = real(value)?,
        ("time", "t_end") => config.t_end = real(value)?,
        ("time", "output_every") => config.output_every = count(value)?,
        ("physics", "c") => config.c = real(value)?,
        ("physics", "relativistic") => config.relativistic = boolean(key, value, line)?,
        ("physics", "force_mode") => {
            config.force_mode = ForceMode::parse(value)
                .ok_or_else(|| parse_error(line, &format!("unknown force_mode `{value}`")))?
        }
        ("physics", "kick_refine") => config.kick_refine = boolean(key, value, line)?,
        ("species.plus", _) => apply_species(&mut config.plus, section, key, value, line)?,
        ("species.minus", _) => apply_species(&mut config.minus, section, key, value, line)?,
        ("init", "preset") => {
            config.init.preset = Preset::parse(value)
                .ok_or_else(|| parse_error(line, &format!("unknown preset `{value}`")))?
        }
        ("init", "n0") => config.init.n0 = real(value)?,
        ("init", "amplitude") => config.init.amplitude = real(value)?,
        ("init", "k_mode") => config.init.k_mode = count(value)?,
        ("init", "temperature") => config.init.temperature = real(value)?,
        ("init", "drift") => config.init.drift = real(value)?,
        _ => return Err(unknown_key(section, key, line)),
    }
    Ok(())
}

fn apply_species(
    species: &mut SpeciesConfig,
    section: &str,
    key: &str,
    value: &str,
    line: usize,
) -> Result<()> {
    let real = |v: &str| number::<f64>(key, v, line, "number");
    match key {
        "q" => species.q = real(value)?,
        "m" => species.m = real(value)?,
        "temperature" => species.temperature = Some(real(value)?),
        _ => return Err(unknown_key(section, key, line)),
    }
    Ok(())
}

fn unknown_key(section: &str, key: &str, line: usize) -> CliError {
    parse_error(line, &format!("unknown key `{key}` in [{section}]"))
}

/// Writes every field of `config`, defaults included, in the input format.
///
/// Floats use the shortest representation that parses back to the same
/// value, so the echo reproduces the run bit for bit.
pub fn render_config(config: &Config) -> String {
    let mut out = String::new();
    let mut put = |line: String| {
        out.push_str(&line);
        out.push('\n');
    };
    put("[grid]".into());
    put(format!("nx = {}", config.nx));
    put(format!("x_max = {:?}", config.x_max));
    put(format!("np = {}", config.np));
    put(format!("p_max = {:?}", config.p_max));
    put(String::new());
    put("[time]".into());
    put(format!("cfl_fraction = {:?}", config.cfl_fraction));
    put(format!("t_end = {:?}", config.t_end));
    put(format!("output_every = {}", config.output_every));
    put(String::new());
    put("[physics]".into());
    put(format!("c = {:?}", config.c));
    put(format!("relativistic = {}", config.relativistic));
    put(format!("force_mode = {}", config.force_mode.as_str()));
    put(format!("kick_refine = {}", config.kick_refine));
    for (name, species) in [("plus", &config.plus), ("minus", &config.minus)] {
        put(String::new());
        put(format!("[species.{name}]"));
        put(format!("q = {:?}", species.q));
        put(format!("m = {:?}", species.m));
        match species.temperature {
            Some(t) => put(format!("temperature = {t:?}")),
            None => put(format!(
                "# temperature unset: uses init.temperature = {:?}",
                config.init.temperature
            )),
        }
    }
    put(String::new());
    put("[init]".into());
    put(format!("preset = {}", config.init.preset.as_str()));
    put(format!("n0 = {:?}", config.init.n0));
    put(format!("amplitude = {:?}", config.init.amplitude));
    put(format!("k_mode = {}", config.init.k_mode));
    put(format!("temperature = {:?}", config.init.temperature));
    put(format!("drift = {:?}", config.init.drift));
    out
}

/// One line per key documenting its default, in the input format.
pub fn default_config_text() -> String {
    let mut text = String::new();
    let _ = writeln!(text, "# kinvlasov defaults");
    text.push_str(&render_config(&Config::default()));
    text
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "[species.plus]\n[species.minus]\n";

    #[test]
    fn minimal_file_fills_defaults() {
        assert_eq!(parse_config(MINIMAL).unwrap(), Config::default());
    }

    #[test]
    fn round_trips_through_render() {
        let text = "[grid]\nnx = 32\nx_max = 20.943951023931955\n[physics]\nc = 30\nrelativistic = 0\n\
                    force_mode = standard\nkick_refine = 1\n[species.plus]\nm = 1836\ntemperature = 0.000544\n\
                    [species.minus]\n[init]\namplitude = 1e-3\n";
        let cfg = parse_config(text).unwrap();
        assert_eq!(cfg.nx, 32);
        assert!(!cfg.relativistic && cfg.kick_refine);
        assert_eq!(cfg.plus.temperature, Some(0.000544));
        assert_eq!(parse_config(&render_config(&cfg)).unwrap(), cfg);
        assert_eq!(
            parse_config(&default_config_text()).unwrap(),
            Config::default()
        );
    }

    #[test]
    fn comments_and_blank_lines() {
        let text =
            "# header\n\n[grid]  # trailing\nnx = 16 # cells\n[species.plus]\n[species.minus]\n";
        assert_eq!(parse_config(text).unwrap().nx, 16);
    }

    #[test]
    fn unknown_force_mode_names_line() {
        let text = "[species.plus]\n[species.minus]\n[physics]\nforce_mode = magic\n";
        let msg = parse_config(text).unwrap_err().to_string();
        assert!(msg.starts_with("unknown force_mode"), "{msg}");
        assert!(msg.ends_with("at line 4"), "{msg}");
    }

    #[test]
    fn duplicate_key_names_both_lines() {
        let text = "[grid]\nnx = 16\n\nnx = 32\n[species.plus]\n[species.minus]\n";
        let err = parse_config(text).unwrap_err();
        assert!(
            matches!(
                err,
                CliError::DuplicateKey {
                    first: 2,
                    second: 4,
                    ..
                }
            ),
            "{err:?}"
        );
        let msg = err.to_string();
        assert!(msg.contains('2') && msg.contains('4'), "{msg}");
    }

    #[test]
    fn unknown_section_and_key() {
        let e = parse_config("[mesh]\n").unwrap_err().to_string();
        assert_eq!(e, "unknown section [mesh] at line 1");
        let e = parse_config("[grid]\nny = 3\n").unwrap_err().to_string();
        assert_eq!(e, "unknown key `ny` in [grid] at line 2");
        let e = parse_config("[species.plus]\ncharge = 1\n")
            .unwrap_err()
            .to_string();
        assert_eq!(e, "unknown key `charge` in [species.plus] at line 2");
    }

    #[test]
    fn malformed_lines() {
        assert!(matches!(
            parse_config("nx = 3\n"),
            Err(CliError::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_config("[grid\n"),
            Err(CliError::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_config("[grid]\nnx 3\n"),
            Err(CliError::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse_config("[grid]\nnx = -3\n"),
            Err(CliError::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse_config("[physics]\nrelativistic = yes\n"),
            Err(CliError::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn species_sections_required() {
        assert!(matches!(
            parse_config("[species.plus]\n"),
            Err(CliError::MissingSection("species.minus"))
        ));
    }

    #[test]
    fn validation_errors_carry_lines() {
        let text = "[species.plus]\n[species.minus]\nq = -1\nm = 0\n";
        match parse_config(text).unwrap_err() {
            CliError::Invalid(v) => {
                assert_eq!(v.len(), 1);
                assert_eq!(v[0].line, Some(4));
                assert_eq!(v[0].violation.message, "mass must be positive");
            }
            other => panic!("{other:?}"),
        }
        let text = "[species.plus]\n[species.minus]\n[grid]\np_max = 3.7\n";
        let msg = parse_config(text).unwrap_err().to_string();
        assert!(
            msg.contains("p_max too small") && msg.contains("line 4"),
            "{msg}"
        );
    }
}
