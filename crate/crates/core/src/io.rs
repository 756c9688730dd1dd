//! Plain-text run files: snapshots, evolution matrices, diagnostics logs, configs and manifests.
//!
//! All writers emit UTF-8 with LF line endings. Sample values are written with 17 significant
//! digits, which is enough for every `f64` to survive a write/read cycle bit for bit.

use std::fmt::Write as _;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::stability::StabilityReport;
use crate::types::{
    DiagnosticsRecord, GridSpec, NormIntegrand, RunConfig, Saturation, Scheme, SolitonSpec,
    Splitting, WaveState,
};

pub const SNAPSHOT_MAGIC: &str = "# satnls-snapshot v1";
pub const EVOLUTION_MAGIC: &str = "# satnls-evolution v1";
pub const MANIFEST_MAGIC: &str = "# satnls-manifest v1";
pub const DIAGNOSTICS_HEADER: &str = "step,time,norm,peak_amplitude,peak_index";
pub const MANIFEST_FILE: &str = "manifest";

/// 17 significant digits in scientific notation.
fn sci(v: f64) -> String {
    format!("{v:.16e}")
}

fn parse_err(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    w.write_all(text.as_bytes())?;
    w.flush()?;
    Ok(())
}

pub fn format_snapshot(state: &WaveState) -> String {
    let grid = state.grid();
    let mut out = String::with_capacity(64 * grid.points());
    out.push_str(SNAPSHOT_MAGIC);
    out.push('\n');
    let _ = writeln!(
        out,
        "# L={} N={} t={}",
        grid.length(),
        grid.points(),
        state.time()
    );
    for (j, z) in state.amplitudes().iter().enumerate() {
        let _ = writeln!(
            out,
            "{},{},{}",
            sci(grid.coordinate(j)),
            sci(z.re),
            sci(z.im)
        );
    }
    out
}

pub fn write_snapshot(state: &WaveState, path: impl AsRef<Path>) -> Result<()> {
    write_text(path.as_ref(), &format_snapshot(state))
}

pub fn read_snapshot(path: impl AsRef<Path>) -> Result<WaveState> {
    let path = path.as_ref();
    parse_snapshot(&fs::read_to_string(path)?, path)
}

/// Parses snapshot text; `path` is only used in error messages.
pub fn parse_snapshot(text: &str, path: &Path) -> Result<WaveState> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    match lines.next() {
        Some((_, l)) if l == SNAPSHOT_MAGIC => {}
        _ => return Err(parse_err(path, 1, format!("expected `{SNAPSHOT_MAGIC}`"))),
    }
    let (header_line, header) = lines
        .next()
        .ok_or_else(|| parse_err(path, 2, "missing `# L=… N=… t=…` header"))?;
    let fields = header
        .strip_prefix("# ")
        .ok_or_else(|| parse_err(path, header_line, "header must start with `# `"))?;
    let (mut length, mut points, mut time) = (None, None, None);
    for field in fields.split_whitespace() {
        let (key, value) = field.split_once('=').ok_or_else(|| {
            parse_err(
                path,
                header_line,
                format!("malformed header field `{field}`"),
            )
        })?;
        let bad = || {
            parse_err(
                path,
                header_line,
                format!("bad value for `{key}`: `{value}`"),
            )
        };
        match key {
            "L" => length = Some(value.parse::<f64>().map_err(|_| bad())?),
            "N" => points = Some(value.parse::<usize>().map_err(|_| bad())?),
            "t" => time = Some(value.parse::<f64>().map_err(|_| bad())?),
            _ => {
                return Err(parse_err(
                    path,
                    header_line,
                    format!("unknown header field `{key}`"),
                ))
            }
        }
    }
    let missing = |k: &str| parse_err(path, header_line, format!("header lacks `{k}`"));
    let length = length.ok_or_else(|| missing("L"))?;
    let points = points.ok_or_else(|| missing("N"))?;
    let time = time.ok_or_else(|| missing("t"))?;
    let grid =
        GridSpec::new(length, points).map_err(|e| parse_err(path, header_line, e.to_string()))?;

    let mut amplitudes = Vec::with_capacity(points);
    for (line_no, line) in lines {
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 3 {
            return Err(parse_err(
                path,
                line_no,
                format!("expected 3 columns `x,re,im`, found {}", cols.len()),
            ));
        }
        let num = |s: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| parse_err(path, line_no, format!("not a number: `{s}`")))
        };
        num(cols[0])?;
        amplitudes.push(Complex64::new(num(cols[1])?, num(cols[2])?));
    }
    if amplitudes.len() != points {
        return Err(Error::LengthMismatch {
            path: path.to_path_buf(),
            expected: points,
            found: amplitudes.len(),
        });
    }
    WaveState::new(grid, amplitudes, time)
}

/// Magnitude matrix, one snapshot per row. `row_spacing` is the simulated time between rows.
pub fn format_evolution(rows: &[Vec<f64>], length: f64, row_spacing: f64) -> Result<String> {
    let cols = rows
        .first()
        .map(Vec::len)
        .ok_or_else(|| Error::Format("evolution needs at least one row".into()))?;
    if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != cols) {
        return Err(Error::Format(format!(
            "ragged evolution: row {i} has {} columns, expected {cols}",
            r.len()
        )));
    }
    let mut out = String::with_capacity(rows.len() * cols * 24);
    let _ = writeln!(
        out,
        "{EVOLUTION_MAGIC} rows={} cols={cols} L={length} tau={row_spacing}",
        rows.len()
    );
    for row in rows {
        for (k, v) in row.iter().enumerate() {
            if k > 0 {
                out.push(',');
            }
            out.push_str(&sci(*v));
        }
        out.push('\n');
    }
    Ok(out)
}

pub fn write_evolution(
    rows: &[Vec<f64>],
    length: f64,
    row_spacing: f64,
    path: impl AsRef<Path>,
) -> Result<()> {
    write_text(path.as_ref(), &format_evolution(rows, length, row_spacing)?)
}

pub fn format_diagnostics(records: &[DiagnosticsRecord]) -> String {
    let mut out = String::from(DIAGNOSTICS_HEADER);
    out.push('\n');
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.step_index,
            sci(r.time),
            sci(r.norm),
            sci(r.peak_amplitude),
            r.peak_index
        );
    }
    out
}

pub fn write_diagnostics(records: &[DiagnosticsRecord], path: impl AsRef<Path>) -> Result<()> {
    write_text(path.as_ref(), &format_diagnostics(records))
}

const REQUIRED_KEYS: [&str; 7] = ["scheme", "S", "tau", "T", "L", "N", "solitons"];
const OPTIONAL_KEYS: [&str; 4] = [
    "snapshot_stride",
    "splitting",
    "norm_integrand",
    "output_dir",
];

pub fn format_solitons(solitons: &[SolitonSpec]) -> String {
    solitons
        .iter()
        .map(|s| format!("{}:{}", s.offset, s.velocity))
        .collect::<Vec<_>>()
        .join(";")
}

/// Parses `offset:velocity` pairs separated by semicolons.
pub fn parse_solitons(value: &str) -> Result<Vec<SolitonSpec>> {
    value
        .split(';')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|pair| {
            let (off, vel) = pair.split_once(':').ok_or_else(|| {
                Error::config(
                    "solitons",
                    format!("expected `offset:velocity`, got `{pair}`"),
                )
            })?;
            let num = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::config("solitons", format!("not a number: `{s}`")))
            };
            Ok(SolitonSpec::new(num(off)?, num(vel)?))
        })
        .collect()
}

/// Canonical `key=value` text for a config; [`parse_config_str`] reads it back unchanged.
pub fn serialize_config(config: &RunConfig) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "scheme={}", config.scheme);
    let _ = writeln!(out, "S={}", config.saturation.value());
    let _ = writeln!(out, "tau={}", config.tau);
    let _ = writeln!(out, "T={}", config.total_time);
    let _ = writeln!(out, "L={}", config.grid.length());
    let _ = writeln!(out, "N={}", config.grid.points());
    let _ = writeln!(out, "solitons={}", format_solitons(&config.solitons));
    let _ = writeln!(out, "snapshot_stride={}", config.snapshot_stride);
    let _ = writeln!(out, "splitting={}", config.splitting);
    let _ = writeln!(out, "norm_integrand={}", config.norm_integrand);
    let _ = writeln!(out, "output_dir={}", config.output_dir.display());
    out
}

/// Raw `key=value` pairs in file order, with comments and blank lines dropped.
pub fn parse_key_values(text: &str, path: &Path) -> Result<Vec<(String, String)>> {
    let mut pairs: Vec<(String, String)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| parse_err(path, i + 1, format!("expected `key=value`, got `{line}`")))?;
        let key = key.trim();
        if pairs.iter().any(|(k, _)| k == key) {
            return Err(Error::config(
                key,
                format!("duplicate key on line {}", i + 1),
            ));
        }
        pairs.push((key.to_string(), value.trim().to_string()));
    }
    Ok(pairs)
}

/// Builds a validated config from `key=value` pairs, rejecting unknown and missing keys.
pub fn config_from_pairs(pairs: &[(String, String)]) -> Result<RunConfig> {
    for (key, _) in pairs {
        if !REQUIRED_KEYS.contains(&key.as_str()) && !OPTIONAL_KEYS.contains(&key.as_str()) {
            return Err(Error::config(key.as_str(), "unknown key"));
        }
    }
    let get = |key: &str| {
        pairs
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    };
    let required = |key: &str| get(key).ok_or_else(|| Error::config(key, "missing required key"));
    let number = |key: &str| -> Result<f64> {
        let v = required(key)?;
        v.parse::<f64>()
            .map_err(|_| Error::config(key, format!("not a number: `{v}`")))
    };

    let scheme: Scheme = required("scheme")?.parse()?;
    let saturation = Saturation(number("S")?);
    let tau = number("tau")?;
    let total_time = number("T")?;
    let length = number("L")?;
    let points_text = required("N")?;
    let points = points_text
        .parse::<usize>()
        .map_err(|_| Error::config("N", format!("not a positive integer: `{points_text}`")))?;
    let grid = GridSpec::new(length, points)?;
    let solitons = parse_solitons(required("solitons")?)?;
    let snapshot_stride = match get("snapshot_stride") {
        Some(v) => v.parse::<usize>().map_err(|_| {
            Error::config("snapshot_stride", format!("not a positive integer: `{v}`"))
        })?,
        None => 1,
    };
    let splitting: Splitting = get("splitting")
        .map(str::parse)
        .transpose()?
        .unwrap_or(Splitting::Lie);
    let norm_integrand: NormIntegrand = get("norm_integrand")
        .map(str::parse)
        .transpose()?
        .unwrap_or(NormIntegrand::Abs2);
    let output_dir = get("output_dir")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(crate::types::DEFAULT_OUTPUT_DIR));

    let config = RunConfig {
        scheme,
        saturation,
        tau,
        total_time,
        grid,
        solitons,
        snapshot_stride,
        splitting,
        norm_integrand,
        output_dir,
    };
    config.validate()?;
    Ok(config)
}

pub fn parse_config_str(text: &str, path: &Path) -> Result<RunConfig> {
    config_from_pairs(&parse_key_values(text, path)?)
}

pub fn parse_config(path: impl AsRef<Path>) -> Result<RunConfig> {
    let path = path.as_ref();
    parse_config_str(&fs::read_to_string(path)?, path)
}

/// Run metadata sits in `#` lines, so a manifest can be fed back as a config file.
pub fn format_manifest(config: &RunConfig, preflight: Option<&StabilityReport>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{MANIFEST_MAGIC}");
    let _ = writeln!(out, "# version={}", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(out, "# steps={}", config.steps());
    out.push_str(&serialize_config(config));
    match preflight {
        Some(r) => {
            let _ = writeln!(
                out,
                "# preflight={} tau={} threshold={} worst_amplification={}",
                if r.stable { "stable" } else { "unstable" },
                r.tau,
                r.threshold,
                r.worst_magnitude
            );
        }
        None => {
            let _ = writeln!(out, "# preflight=not-applicable");
        }
    }
    out
}

pub fn write_manifest(
    dir: impl AsRef<Path>,
    config: &RunConfig,
    preflight: Option<&StabilityReport>,
) -> Result<PathBuf> {
    let path = dir.as_ref().join(MANIFEST_FILE);
    write_text(&path, &format_manifest(config, preflight))?;
    Ok(path)
}
