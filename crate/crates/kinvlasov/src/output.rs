//! Plain-text output files: diagnostics CSV, phase-space and field
//! snapshots, the run manifest and the divergence table.
//!
//! Floats are written with `{:?}`, the shortest decimal that parses back to
//! the same `f64`, so every file round-trips exactly.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use kinvlasov_core::diagnostics::{
    DiagnosticsRecord, DivergenceRow, EQUATION_PARTITION, FULL_EQUATION_TOTAL, FULL_UNKNOWN_TOTAL,
    UNKNOWNS,
};
use kinvlasov_core::vlasov::max_speed;
use kinvlasov_core::{Config, PhaseSpaceGrid, SimulationState, TimePlan};

use crate::config_file::render_config;
use crate::error::{CliError, Result};

pub const DIAGNOSTICS_FILE: &str = "diagnostics.csv";
pub const MANIFEST_FILE: &str = "manifest.txt";
pub const DIVERGENCE_FILE: &str = "divergence.csv";
pub const DIVERGENCE_COLUMNS: [&str; 7] = [
    "step",
    "time",
    "f_plus_dist",
    "f_minus_dist",
    "phi_dist",
    "a_dist",
    "force_dist",
];

pub const CODE_VERSION: &str = concat!("kinvlasov ", env!("CARGO_PKG_VERSION"));

/// Appends diagnostics rows, emitting the header before the first one.
pub struct DiagnosticsWriter<W: Write> {
    sink: W,
    header_written: bool,
}

impl<W: Write> DiagnosticsWriter<W> {
    pub fn new(sink: W) -> Self {
        DiagnosticsWriter {
            sink,
            header_written: false,
        }
    }

    pub fn write(&mut self, record: &DiagnosticsRecord) -> io::Result<()> {
        if !self.header_written {
            writeln!(self.sink, "{}", DiagnosticsRecord::COLUMNS.join(","))?;
            self.header_written = true;
        }
        let mut row = record.step.to_string();
        for v in record.values() {
            let _ = write!(row, ",{v:?}");
        }
        writeln!(self.sink, "{row}")
    }

    pub fn flush(&mut self) -> io::Result<()> {
        self.sink.flush()
    }

    pub fn into_inner(self) -> W {
        self.sink
    }
}

/// Parses a diagnostics CSV written by [`DiagnosticsWriter`].
pub fn parse_diagnostics(text: &str, path: &Path) -> Result<Vec<DiagnosticsRecord>> {
    let bad = |line: usize, message: String| CliError::Format {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| bad(1, "empty file".into()))?;
    if header != DiagnosticsRecord::COLUMNS.join(",") {
        return Err(bad(1, format!("unexpected header `{header}`")));
    }
    lines
        .enumerate()
        .map(|(i, line)| {
            let n = i + 2;
            let mut fields = line.split(',');
            let step = fields
                .next()
                .and_then(|s| s.parse::<u64>().ok())
                .ok_or_else(|| bad(n, "bad step".into()))?;
            let mut values = [0.0; 11];
            for slot in values.iter_mut() {
                *slot = fields
                    .next()
                    .and_then(|s| s.parse::<f64>().ok())
                    .ok_or_else(|| bad(n, "bad or missing value".into()))?;
            }
            if fields.next().is_some() {
                return Err(bad(n, "too many columns".into()));
            }
            Ok(DiagnosticsRecord::from_values(step, values))
        })
        .collect()
}

pub fn read_diagnostics(path: &Path) -> Result<Vec<DiagnosticsRecord>> {
    let text = fs::read_to_string(path).map_err(CliError::io(path))?;
    parse_diagnostics(&text, path)
}

fn snapshot_header(time: f64, grid: &PhaseSpaceGrid) -> String {
    format!(
        "# t={time:?} nx={} np={} x_max={:?} p_max={:?}",
        grid.nx, grid.np, grid.x_max, grid.p_max
    )
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(CliError::io(path))
}

/// Writes `f_plus_<step>.dat`, `f_minus_<step>.dat` and `fields_<step>.dat`
/// into `dir` and returns their paths in that order.
pub fn write_snapshot(
    state: &SimulationState,
    grid: &PhaseSpaceGrid,
    dir: &Path,
) -> Result<[PathBuf; 3]> {
    let header = snapshot_header(state.time, grid);
    let mut written = Vec::with_capacity(3);
    for (name, f) in [("f_plus", &state.plus.f), ("f_minus", &state.minus.f)] {
        let mut text = String::with_capacity(grid.len() * 24);
        text.push_str(&header);
        text.push('\n');
        for row in f.chunks(grid.np) {
            let mut first = true;
            for v in row {
                if !first {
                    text.push(' ');
                }
                first = false;
                let _ = write!(text, "{v:?}");
            }
            text.push('\n');
        }
        let path = dir.join(format!("{name}_{}.dat", state.step));
        write_file(&path, &text)?;
        written.push(path);
    }

    let mut text = header;
    text.push_str("\n# x phi a rho j\n");
    for i in 0..grid.nx {
        let _ = writeln!(
            text,
            "{:?} {:?} {:?} {:?} {:?}",
            grid.x_nodes[i],
            state.fields.phi_curr[i],
            state.fields.a_curr[i],
            state.moments.rho[i],
            state.moments.j[i]
        );
    }
    let path = dir.join(format!("fields_{}.dat", state.step));
    write_file(&path, &text)?;
    written.push(path);
    Ok(written.try_into().expect("three snapshot files"))
}

/// Grid metadata from a snapshot header line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnapshotHeader {
    pub time: f64,
    pub nx: usize,
    pub np: usize,
    pub x_max: f64,
    pub p_max: f64,
}

/// A distribution function read back from disk; `values` is row-major in x.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSnapshot {
    pub header: SnapshotHeader,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldSnapshot {
    pub header: SnapshotHeader,
    pub x: Vec<f64>,
    pub phi: Vec<f64>,
    pub a: Vec<f64>,
    pub rho: Vec<f64>,
    pub j: Vec<f64>,
}

fn parse_header(line: &str, path: &Path) -> Result<SnapshotHeader> {
    let bad = |message: String| CliError::Format {
        path: path.to_path_buf(),
        line: 1,
        message,
    };
    let body = line
        .strip_prefix('#')
        .ok_or_else(|| bad("missing header".into()))?;
    let mut time = None;
    let mut nx = None;
    let mut np = None;
    let mut x_max = None;
    let mut p_max = None;
    for item in body.split_whitespace() {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| bad(format!("malformed header item `{item}`")))?;
        let real = || {
            v.parse::<f64>()
                .map_err(|_| bad(format!("bad value for {k}")))
        };
        let count = || {
            v.parse::<usize>()
                .map_err(|_| bad(format!("bad value for {k}")))
        };
        match k {
            "t" => time = Some(real()?),
            "nx" => nx = Some(count()?),
            "np" => np = Some(count()?),
            "x_max" => x_max = Some(real()?),
            "p_max" => p_max = Some(real()?),
            _ => return Err(bad(format!("unknown header key `{k}`"))),
        }
    }
    match (time, nx, np, x_max, p_max) {
        (Some(time), Some(nx), Some(np), Some(x_max), Some(p_max)) => Ok(SnapshotHeader {
            time,
            nx,
            np,
            x_max,
            p_max,
        }),
        _ => Err(bad("header lacks t, nx, np, x_max or p_max".into())),
    }
}

fn data_rows<'a>(
    text: &'a str,
    path: &'a Path,
) -> impl Iterator<Item = Result<(usize, Vec<f64>)>> + 'a {
    text.lines()
        .enumerate()
        .skip(1)
        .filter(|(_, l)| !l.starts_with('#') && !l.trim().is_empty())
        .map(move |(i, l)| {
            l.split_whitespace()
                .map(|s| s.parse::<f64>())
                .collect::<std::result::Result<Vec<f64>, _>>()
                .map(|row| (i + 1, row))
                .map_err(|_| CliError::Format {
                    path: path.to_path_buf(),
                    line: i + 1,
                    message: "unparsable number".into(),
                })
        })
}

pub fn read_phase_snapshot(path: &Path) -> Result<PhaseSnapshot> {
    let text = fs::read_to_string(path).map_err(CliError::io(path))?;
    let header = parse_header(text.lines().next().unwrap_or(""), path)?;
    let mut values = Vec::with_capacity(header.nx * header.np);
    let mut rows = 0;
    for row in data_rows(&text, path) {
        let (line, row) = row?;
        if row.len() != header.np {
            return Err(CliError::Format {
                path: path.to_path_buf(),
                line,
                message: format!("expected {} values, found {}", header.np, row.len()),
            });
        }
        values.extend(row);
        rows += 1;
    }
    if rows != header.nx {
        return Err(CliError::Format {
            path: path.to_path_buf(),
            line: rows + 1,
            message: format!("expected {} rows, found {rows}", header.nx),
        });
    }
    Ok(PhaseSnapshot { header, values })
}

pub fn read_field_snapshot(path: &Path) -> Result<FieldSnapshot> {
    let text = fs::read_to_string(path).map_err(CliError::io(path))?;
    let header = parse_header(text.lines().next().unwrap_or(""), path)?;
    let mut out = FieldSnapshot {
        header,
        x: Vec::new(),
        phi: Vec::new(),
        a: Vec::new(),
        rho: Vec::new(),
        j: Vec::new(),
    };
    for row in data_rows(&text, path) {
        let (line, row) = row?;
        if row.len() != 5 {
            return Err(CliError::Format {
                path: path.to_path_buf(),
                line,
                message: format!("expected 5 columns, found {}", row.len()),
            });
        }
        out.x.push(row[0]);
        out.phi.push(row[1]);
        out.a.push(row[2]);
        out.rho.push(row[3]);
        out.j.push(row[4]);
    }
    if out.x.len() != header.nx {
        return Err(CliError::Format {
            path: path.to_path_buf(),
            line: out.x.len() + 1,
            message: format!("expected {} rows, found {}", header.nx, out.x.len()),
        });
    }
    Ok(out)
}

/// Manifest text: `#` comment lines with derived quantities followed by the
/// fully resolved config, which [`crate::parse_config`] accepts unchanged.
pub fn render_manifest(config: &Config, grid: &PhaseSpaceGrid, plan: &TimePlan) -> String {
    let mut m = String::new();
    let light = config.c * plan.dt / grid.dx;
    let particle = max_speed(config, grid) * plan.dt / grid.dx;
    let _ = writeln!(m, "# run manifest");
    let _ = writeln!(m, "# code_version = {CODE_VERSION}");
    let _ = writeln!(m, "# dx = {:?}", grid.dx);
    let _ = writeln!(m, "# dp = {:?}", grid.dp);
    let _ = writeln!(m, "# dt = {:?}", plan.dt);
    let _ = writeln!(m, "# nsteps = {}", plan.nsteps);
    let _ = writeln!(m, "# cfl_light = {light:?}");
    let _ = writeln!(m, "# cfl_particle = {particle:?}");
    let _ = writeln!(
        m,
        "# equation partition (label status reduced_count full_3d_count):"
    );
    for (label, status, reduced, full) in EQUATION_PARTITION {
        let _ = writeln!(m, "#   {label:<3} {:<10} {reduced} {full}", status.as_str());
    }
    let reduced_eq: u32 = EQUATION_PARTITION.iter().map(|e| e.2).sum();
    let reduced_unknowns: u32 = UNKNOWNS.iter().map(|u| u.reduced_count).sum();
    let _ = writeln!(
        m,
        "# totals: full 3d {FULL_EQUATION_TOTAL} equations for {FULL_UNKNOWN_TOTAL} unknowns; \
         reduced {reduced_eq} equations for {reduced_unknowns} unknowns"
    );
    let _ = writeln!(
        m,
        "# continuity: gated residual is dn/dt + d(flux)/dx; the form with 1/c on dn/dt alone \
         is dimensionally inconsistent and is only reported (continuity_literal_l2)"
    );
    let _ = writeln!(
        m,
        "# initial fields: phi solves the periodic Poisson problem for the initial charge \
         (zero mean), phi_prev = phi_curr, A = 0 at both levels"
    );
    let _ = writeln!(m, "#");
    m.push_str(&render_config(config));
    m
}

/// Writes the divergence table for `compare`.
pub fn render_divergence(rows: &[DivergenceRow]) -> String {
    let mut text = DIVERGENCE_COLUMNS.join(",");
    text.push('\n');
    for r in rows {
        let _ = writeln!(
            text,
            "{},{:?},{:?},{:?},{:?},{:?},{:?}",
            r.step, r.time, r.f_plus_dist, r.f_minus_dist, r.phi_dist, r.a_dist, r.force_dist
        );
    }
    text
}

pub fn parse_divergence(text: &str, path: &Path) -> Result<Vec<DivergenceRow>> {
    let bad = |line: usize, message: &str| CliError::Format {
        path: path.to_path_buf(),
        line,
        message: message.to_string(),
    };
    let mut lines = text.lines();
    if lines.next() != Some(&DIVERGENCE_COLUMNS.join(",")) {
        return Err(bad(1, "unexpected header"));
    }
    lines
        .enumerate()
        .map(|(i, line)| {
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() != 7 {
                return Err(bad(i + 2, "expected 7 columns"));
            }
            let step = cols[0].parse().map_err(|_| bad(i + 2, "bad step"))?;
            let mut v = [0.0; 6];
            for (slot, s) in v.iter_mut().zip(&cols[1..]) {
                *slot = s.parse().map_err(|_| bad(i + 2, "bad value"))?;
            }
            Ok(DivergenceRow {
                step,
                time: v[0],
                f_plus_dist: v[1],
                f_minus_dist: v[2],
                phi_dist: v[3],
                a_dist: v[4],
                force_dist: v[5],
            })
        })
        .collect()
}
