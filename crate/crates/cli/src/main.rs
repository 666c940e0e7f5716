//! Command-line front end for the cmc-lab numerical laboratory.
//!
//! Subcommands cover the library's pipelines (critical catenoid constants,
//! Delaunay family sweeps, Robin nullity, the foliation certificate, disk
//! checks, Killing-flux reports, the boundary extension operator, and OBJ
//! meshes). Runs are reproducible: a JSON config file can drive them, CLI
//! flags override config values, and each run writes a `manifest.json`
//! recording the resolved parameters and all derived constants. Identical
//! configs produce byte-identical artifacts.
//!
//! Exit codes: 0 success, 1 I/O error, 2 configuration error, 3 numerical
//! or certificate failure.

// Domain checks use `!(x > 0.0)` so NaN parameters are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::collections::BTreeMap;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Deserialize;
use serde_json::Value;

use cmc_lab::delaunay::{
    annulus_family_sweep, annulus_sampled, critical_catenoid, CriticalCatenoid, DelaunayAnnulus,
};
use cmc_lab::disk::{
    disk_foliation_solution, disk_kernel_basis, radial_foliation_solve, robin_defect, DiskGrid,
};
use cmc_lab::extension::{whitney_extend, GridFunction};
use cmc_lab::foliation::{c1_constant, c1_constant_alt, catenoid_foliation_certificate};
use cmc_lab::jacobi::{annulus_nullity, nullity};
use cmc_lab::profile::ProfileCurve;
use cmc_lab::surface::{
    export_obj, flux_mean_curvature, flux_normal, revolve, write_flux_csv, FluxRow, KillingField,
};

#[derive(Parser)]
#[command(
    name = "cmc-lab",
    version,
    about = "Free boundary CMC surfaces of revolution: numerical laboratory"
)]
struct Cli {
    /// JSON config file; CLI flags override its parameters.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides the CMC_LAB_OUT environment variable and
    /// the config file's output_dir).
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Option<CliCommand>,
}

#[derive(Subcommand)]
enum CliCommand {
    /// Critical catenoid constants and profile.
    Catenoid {
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Sweep the free boundary annulus family over an eccentricity range.
    DelaunaySweep {
        #[arg(long)]
        emin: Option<f64>,
        #[arg(long)]
        emax: Option<f64>,
        #[arg(long)]
        n: Option<usize>,
    },
    /// Robin nullity of a surface by mode shooting.
    Nullity {
        /// critical-catenoid or `annulus:<e>`
        #[arg(long)]
        surface: Option<String>,
        #[arg(long)]
        nmax: Option<u32>,
        #[arg(long)]
        points: Option<usize>,
    },
    /// Foliation certificate for the catenoid.
    FoliationCertificate,
    /// Flat-disk checks: kernel basis, foliation solution, radial solve.
    Disk {
        #[arg(long)]
        n: Option<u32>,
        #[arg(long)]
        resolution: Option<usize>,
    },
    /// Killing-flux report for a surface and rotation axis.
    Flux {
        #[arg(long)]
        surface: Option<String>,
        /// x, y or z
        #[arg(long)]
        axis: Option<String>,
        #[arg(long)]
        ns: Option<usize>,
        #[arg(long)]
        ntheta: Option<usize>,
    },
    /// Extend boundary data into a slab by cube averages.
    Extend {
        #[arg(long)]
        dim: Option<usize>,
        /// Input CSV (headers x,value or x,y,value).
        #[arg(long)]
        input: Option<String>,
        #[arg(long)]
        zmax: Option<f64>,
        #[arg(long)]
        nz: Option<usize>,
    },
    /// Export a revolution mesh as OBJ.
    Mesh {
        #[arg(long)]
        surface: Option<String>,
        #[arg(long)]
        ntheta: Option<usize>,
        #[arg(long)]
        ns: Option<usize>,
        /// Output file name (inside the output directory).
        #[arg(long)]
        out: Option<String>,
    },
}

/// Error carrying the process exit code.
enum CliError {
    Config(String),
    Numerical(String),
    Io(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 1,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Numerical(m) | CliError::Io(m) => m,
        }
    }
}

/// Library errors surfacing from a pipeline are numerical failures unless
/// they are I/O.
fn lib_err(e: cmc_lab::Error) -> CliError {
    match e {
        cmc_lab::Error::Io { path, source } => CliError::Io(format!("{path}: {source}")),
        other => CliError::Numerical(other.to_string()),
    }
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    command: Option<String>,
    #[serde(default)]
    parameters: serde_json::Map<String, Value>,
    output_dir: Option<String>,
}

/// Fully resolved run configuration.
struct RunConfig {
    command: String,
    parameters: BTreeMap<String, Value>,
    output_dir: PathBuf,
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => {}
        Err(e) => {
            eprintln!("error: {}", e.message());
            std::process::exit(e.code());
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let config = resolve_config(cli)?;
    fs::create_dir_all(&config.output_dir).map_err(|e| io_err(&config.output_dir, e))?;
    let artifacts = dispatch(&config)?;
    write_manifest(&config, &artifacts)?;
    println!(
        "wrote {} artifact(s) to {}",
        artifacts.len() + 1,
        config.output_dir.display()
    );
    Ok(())
}

/// Merge config file and CLI flags (flags win), resolve the output
/// directory (flag > CMC_LAB_OUT > config > "."), and validate keys.
fn resolve_config(cli: Cli) -> Result<RunConfig, CliError> {
    let mut parameters: BTreeMap<String, Value> = BTreeMap::new();
    let mut command: Option<String> = None;
    let mut output_dir: Option<PathBuf> = None;

    if let Some(path) = &cli.config {
        let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
        let file: ConfigFile = serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        command = file.command;
        output_dir = file.output_dir.map(PathBuf::from);
        for (k, v) in file.parameters {
            parameters.insert(k, v);
        }
    }

    if let Some(cmd) = cli.command {
        let name = match &cmd {
            CliCommand::Catenoid { .. } => "catenoid",
            CliCommand::DelaunaySweep { .. } => "delaunay-sweep",
            CliCommand::Nullity { .. } => "nullity",
            CliCommand::FoliationCertificate => "foliation-certificate",
            CliCommand::Disk { .. } => "disk",
            CliCommand::Flux { .. } => "flux",
            CliCommand::Extend { .. } => "extend",
            CliCommand::Mesh { .. } => "mesh",
        };
        if let Some(from_file) = &command {
            if from_file != name {
                // The explicit subcommand replaces the configured one; its
                // parameters start fresh to avoid cross-command leftovers.
                parameters.clear();
            }
        }
        command = Some(name.to_string());
        let mut put = |key: &str, v: Value| {
            parameters.insert(key.to_string(), v);
        };
        match cmd {
            CliCommand::Catenoid { samples } => {
                if let Some(v) = samples {
                    put("samples", v.into());
                }
            }
            CliCommand::DelaunaySweep { emin, emax, n } => {
                if let Some(v) = emin {
                    put("emin", json_f64(v));
                }
                if let Some(v) = emax {
                    put("emax", json_f64(v));
                }
                if let Some(v) = n {
                    put("n", v.into());
                }
            }
            CliCommand::Nullity {
                surface,
                nmax,
                points,
            } => {
                if let Some(v) = surface {
                    put("surface", Value::String(v));
                }
                if let Some(v) = nmax {
                    put("nmax", v.into());
                }
                if let Some(v) = points {
                    put("points", v.into());
                }
            }
            CliCommand::FoliationCertificate => {}
            CliCommand::Disk { n, resolution } => {
                if let Some(v) = n {
                    put("n", v.into());
                }
                if let Some(v) = resolution {
                    put("resolution", v.into());
                }
            }
            CliCommand::Flux {
                surface,
                axis,
                ns,
                ntheta,
            } => {
                if let Some(v) = surface {
                    put("surface", Value::String(v));
                }
                if let Some(v) = axis {
                    put("axis", Value::String(v));
                }
                if let Some(v) = ns {
                    put("ns", v.into());
                }
                if let Some(v) = ntheta {
                    put("ntheta", v.into());
                }
            }
            CliCommand::Extend {
                dim,
                input,
                zmax,
                nz,
            } => {
                if let Some(v) = dim {
                    put("dim", v.into());
                }
                if let Some(v) = input {
                    put("input", Value::String(v));
                }
                if let Some(v) = zmax {
                    put("zmax", json_f64(v));
                }
                if let Some(v) = nz {
                    put("nz", v.into());
                }
            }
            CliCommand::Mesh {
                surface,
                ntheta,
                ns,
                out,
            } => {
                if let Some(v) = surface {
                    put("surface", Value::String(v));
                }
                if let Some(v) = ntheta {
                    put("ntheta", v.into());
                }
                if let Some(v) = ns {
                    put("ns", v.into());
                }
                if let Some(v) = out {
                    put("out", Value::String(v));
                }
            }
        }
    }

    let command = command.ok_or_else(|| {
        CliError::Config("no command given (use a subcommand or a config file)".into())
    })?;

    let allowed: &[&str] = match command.as_str() {
        "catenoid" => &["samples"],
        "delaunay-sweep" => &["emin", "emax", "n"],
        "nullity" => &["surface", "nmax", "points"],
        "foliation-certificate" => &[],
        "disk" => &["n", "resolution"],
        "flux" => &["surface", "axis", "ns", "ntheta"],
        "extend" => &["dim", "input", "zmax", "nz"],
        "mesh" => &["surface", "ntheta", "ns", "out"],
        other => {
            return Err(CliError::Config(format!("unknown command \"{other}\"")));
        }
    };
    for key in parameters.keys() {
        if !allowed.contains(&key.as_str()) {
            return Err(CliError::Config(format!(
                "unknown parameter \"{key}\" for command \"{command}\""
            )));
        }
    }

    let output_dir = cli
        .out_dir
        .or_else(|| std::env::var_os("CMC_LAB_OUT").map(PathBuf::from))
        .or(output_dir)
        .unwrap_or_else(|| PathBuf::from("."));

    Ok(RunConfig {
        command,
        parameters,
        output_dir,
    })
}

fn json_f64(v: f64) -> Value {
    serde_json::Number::from_f64(v)
        .map(Value::Number)
        .unwrap_or(Value::Null)
}

fn get_f64(c: &RunConfig, key: &str, default: f64) -> Result<f64, CliError> {
    match c.parameters.get(key) {
        None => Ok(default),
        Some(Value::Number(n)) => n
            .as_f64()
            .ok_or_else(|| CliError::Config(format!("parameter \"{key}\" is not a finite number"))),
        Some(other) => Err(CliError::Config(format!(
            "parameter \"{key}\" must be a number, got {other}"
        ))),
    }
}

fn get_usize(c: &RunConfig, key: &str, default: usize) -> Result<usize, CliError> {
    match c.parameters.get(key) {
        None => Ok(default),
        Some(Value::Number(n)) => n.as_u64().map(|v| v as usize).ok_or_else(|| {
            CliError::Config(format!("parameter \"{key}\" must be a nonnegative integer"))
        }),
        Some(other) => Err(CliError::Config(format!(
            "parameter \"{key}\" must be an integer, got {other}"
        ))),
    }
}

fn get_string(c: &RunConfig, key: &str, default: &str) -> Result<String, CliError> {
    match c.parameters.get(key) {
        None => Ok(default.to_string()),
        Some(Value::String(s)) => Ok(s.clone()),
        Some(other) => Err(CliError::Config(format!(
            "parameter \"{key}\" must be a string, got {other}"
        ))),
    }
}

/// Surface selector: critical-catenoid or `annulus:<e>`.
enum Surface {
    CriticalCatenoid(CriticalCatenoid),
    Annulus(DelaunayAnnulus),
}

fn parse_surface(spec: &str, n_samples: usize) -> Result<Surface, CliError> {
    if spec == "critical-catenoid" {
        return Ok(Surface::CriticalCatenoid(critical_catenoid()));
    }
    if let Some(e_text) = spec.strip_prefix("annulus:") {
        let e: f64 = e_text.parse().map_err(|_| {
            CliError::Config(format!(
                "parameter \"surface\": bad eccentricity \"{e_text}\""
            ))
        })?;
        if !(e > 0.0) {
            return Err(CliError::Config(format!(
                "parameter \"surface\": eccentricity must be > 0, got {e}"
            )));
        }
        return annulus_sampled(e, n_samples)
            .map(Surface::Annulus)
            .map_err(lib_err);
    }
    Err(CliError::Config(format!(
        "parameter \"surface\" must be critical-catenoid or annulus:<e>, got \"{spec}\""
    )))
}

impl Surface {
    fn profile(&self, n_samples: usize) -> Result<ProfileCurve, CliError> {
        match self {
            Surface::CriticalCatenoid(cat) => cat.profile(n_samples).map_err(lib_err),
            Surface::Annulus(ann) => Ok(ann.profile.clone()),
        }
    }

    fn label(&self) -> String {
        match self {
            Surface::CriticalCatenoid(_) => "critical-catenoid".into(),
            Surface::Annulus(ann) => format!("annulus-e-{}", ann.conic.eccentricity()),
        }
    }
}

fn dispatch(config: &RunConfig) -> Result<Vec<String>, CliError> {
    match config.command.as_str() {
        "catenoid" => run_catenoid(config),
        "delaunay-sweep" => run_sweep(config),
        "nullity" => run_nullity(config),
        "foliation-certificate" => run_certificate(config),
        "disk" => run_disk(config),
        "flux" => run_flux(config),
        "extend" => run_extend(config),
        "mesh" => run_mesh(config),
        other => Err(CliError::Config(format!("unknown command \"{other}\""))),
    }
}

fn write_file(
    dir: &Path,
    name: &str,
    body: impl FnOnce(&mut Vec<u8>) -> std::io::Result<()>,
) -> Result<(), CliError> {
    let mut buf = Vec::new();
    body(&mut buf).map_err(|e| io_err(&dir.join(name), e))?;
    let path = dir.join(name);
    fs::write(&path, buf).map_err(|e| io_err(&path, e))
}

fn run_catenoid(config: &RunConfig) -> Result<Vec<String>, CliError> {
    let samples = get_usize(config, "samples", 2001)?;
    if samples < 3 {
        return Err(CliError::Config(format!(
            "parameter \"samples\" must be >= 3, got {samples}"
        )));
    }
    let cat = critical_catenoid();
    let profile = cat.profile(samples).map_err(lib_err)?;
    write_file(&config.output_dir, "catenoid_profile.csv", |w| {
        profile.write_csv(w)
    })?;
    write_file(&config.output_dir, "catenoid.json", |w| {
        writeln!(w, "{{")?;
        writeln!(w, "  \"c\": {:.16e},", cat.c)?;
        writeln!(w, "  \"z_c\": {:.16e},", cat.z_c)?;
        writeln!(w, "  \"r_c\": {:.16e},", cat.r_c)?;
        writeln!(w, "  \"s_star\": {:.16e},", cat.s_star)?;
        writeln!(w, "  \"z1\": {:.16e}", cat.z1())?;
        writeln!(w, "}}")
    })?;
    Ok(vec!["catenoid_profile.csv".into(), "catenoid.json".into()])
}

fn run_sweep(config: &RunConfig) -> Result<Vec<String>, CliError> {
    let emin = get_f64(config, "emin", 0.9)?;
    let emax = get_f64(config, "emax", 1.1)?;
    let n = get_usize(config, "n", 21)?;
    if !(emin > 0.0) {
        return Err(CliError::Config(format!(
            "parameter \"emin\" must be > 0, got {emin}"
        )));
    }
    if !(emin < emax) {
        return Err(CliError::Config(format!(
            "parameters \"emin\" < \"emax\" required, got {emin} >= {emax}"
        )));
    }
    let table = annulus_family_sweep(emin, emax, n).map_err(lib_err)?;
    write_file(&config.output_dir, "delaunay_sweep.csv", |w| {
        table.write_csv(w)
    })?;
    let mut artifacts = vec!["delaunay_sweep.csv".to_string()];
    if !table.failures.is_empty() {
        write_file(&config.output_dir, "delaunay_sweep_failures.json", |w| {
            writeln!(w, "[")?;
            for (i, (e, msg)) in table.failures.iter().enumerate() {
                let comma = if i + 1 < table.failures.len() {
                    ","
                } else {
                    ""
                };
                writeln!(w, "  {{\"e\": {:.16e}, \"error\": {:?}}}{}", e, msg, comma)?;
            }
            writeln!(w, "]")
        })?;
        artifacts.push("delaunay_sweep_failures.json".into());
    }
    Ok(artifacts)
}

fn run_nullity(config: &RunConfig) -> Result<Vec<String>, CliError> {
    let spec = get_string(config, "surface", "critical-catenoid")?;
    let nmax = get_usize(config, "nmax", 5)? as u32;
    let points = get_usize(config, "points", 2001)?;
    if nmax < 2 {
        return Err(CliError::Config(format!(
            "parameter \"nmax\" must be >= 2, got {nmax}"
        )));
    }
    if points < 10 {
        return Err(CliError::Config(format!(
            "parameter \"points\" must be >= 10, got {points}"
        )));
    }
    let report = match parse_surface(&spec, points)? {
        Surface::CriticalCatenoid(cat) => nullity(&cat, nmax).map_err(lib_err)?,
        Surface::Annulus(ann) => annulus_nullity(&ann, nmax).map_err(lib_err)?,
    };
    write_file(&config.output_dir, "nullity.json", |w| report.write_json(w))?;
    Ok(vec!["nullity.json".into()])
}

fn run_certificate(config: &RunConfig) -> Result<Vec<String>, CliError> {
    let cert = catenoid_foliation_certificate().map_err(lib_err)?;
    write_file(&config.output_dir, "foliation_certificate.json", |w| {
        cert.write_json(w)
    })?;
    write_file(&config.output_dir, "foliation_solution.csv", |w| {
        writeln!(w, "s,value")?;
        for (s, v) in cert.s_grid.iter().zip(&cert.s0) {
            writeln!(w, "{:.16e},{:.16e}", s, v)?;
        }
        Ok(())
    })?;
    Ok(vec![
        "foliation_certificate.json".into(),
        "foliation_solution.csv".into(),
    ])
}

fn run_disk(config: &RunConfig) -> Result<Vec<String>, CliError> {
    let n = get_usize(config, "n", 2)? as u32;
    let resolution = get_usize(config, "resolution", 64)?;
    if n < 2 {
        return Err(CliError::Config(format!(
            "parameter \"n\" must be >= 2, got {n}"
        )));
    }
    if resolution < 8 {
        return Err(CliError::Config(format!(
            "parameter \"resolution\" must be >= 8, got {resolution}"
        )));
    }
    let radial = DiskGrid::radial(n, resolution).map_err(lib_err)?;
    let psi = disk_foliation_solution(&radial);
    let defect = robin_defect(&radial, &psi).map_err(lib_err)?;
    let fd = radial_foliation_solve(&radial).map_err(lib_err)?;
    let fd_dev = fd
        .iter()
        .zip(&psi)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);
    write_file(&config.output_dir, "disk_psi_radial.csv", |w| {
        radial.write_csv(&psi, w)
    })?;
    let mut artifacts = vec!["disk_psi_radial.csv".to_string(), "disk.json".to_string()];
    // The polar kernel basis exists for the 2-disk only.
    let mut kernel_defect = f64::NAN;
    if n == 2 {
        let polar = DiskGrid::polar(resolution, 2 * resolution).map_err(lib_err)?;
        let basis = disk_kernel_basis(&polar).map_err(lib_err)?;
        kernel_defect = basis
            .iter()
            .map(|f| robin_defect(&polar, f).unwrap().max_boundary_abs())
            .fold(0.0f64, f64::max);
        for (i, f) in basis.iter().enumerate() {
            let name = format!("disk_kernel_x{}.csv", i + 1);
            write_file(&config.output_dir, &name, |w| polar.write_csv(f, w))?;
            artifacts.push(name);
        }
    }
    let min_psi = psi.iter().cloned().fold(f64::INFINITY, f64::min);
    write_file(&config.output_dir, "disk.json", |w| {
        writeln!(w, "{{")?;
        writeln!(w, "  \"n\": {n},")?;
        writeln!(w, "  \"resolution\": {resolution},")?;
        writeln!(w, "  \"min_psi\": {:.16e},", min_psi)?;
        writeln!(
            w,
            "  \"interior_residual_minus_one\": {:.16e},",
            defect
                .interior
                .iter()
                .map(|v| (v - 1.0).abs())
                .fold(0.0f64, f64::max)
        )?;
        writeln!(
            w,
            "  \"boundary_robin_defect\": {:.16e},",
            defect.max_boundary_abs()
        )?;
        writeln!(w, "  \"fd_solution_deviation\": {:.16e},", fd_dev)?;
        if kernel_defect.is_nan() {
            writeln!(w, "  \"kernel_boundary_defect\": null")?;
        } else {
            writeln!(w, "  \"kernel_boundary_defect\": {:.16e}", kernel_defect)?;
        }
        writeln!(w, "}}")
    })?;
    Ok(artifacts)
}

fn run_flux(config: &RunConfig) -> Result<Vec<String>, CliError> {
    let spec = get_string(config, "surface", "critical-catenoid")?;
    let axis_name = get_string(config, "axis", "x")?;
    let ns = get_usize(config, "ns", 2000)?;
    let ntheta = get_usize(config, "ntheta", 256)?;
    let axis = match axis_name.as_str() {
        "x" => [1.0, 0.0, 0.0],
        "y" => [0.0, 1.0, 0.0],
        "z" => [0.0, 0.0, 1.0],
        other => {
            return Err(CliError::Config(format!(
                "parameter \"axis\" must be x, y or z, got \"{other}\""
            )))
        }
    };
    let surface = parse_surface(&spec, ns)?;
    let profile = surface.profile(ns)?;
    let mesh = revolve(&profile, ntheta).map_err(lib_err)?;
    let k = KillingField::rotation(axis).map_err(lib_err)?;
    let rows = vec![FluxRow {
        surface: surface.label(),
        axis: axis_name,
        flux_h: flux_mean_curvature(&mesh, &k),
        flux_n: flux_normal(&mesh, &k),
    }];
    write_file(&config.output_dir, "flux.csv", |w| write_flux_csv(&rows, w))?;
    Ok(vec!["flux.csv".into()])
}

fn run_extend(config: &RunConfig) -> Result<Vec<String>, CliError> {
    let dim = get_usize(config, "dim", 1)?;
    let input = get_string(config, "input", "")?;
    if input.is_empty() {
        return Err(CliError::Config("parameter \"input\" is required".into()));
    }
    let zmax = get_f64(config, "zmax", 0.5)?;
    let nz = get_usize(config, "nz", 11)?;
    if !(zmax > 0.0) {
        return Err(CliError::Config(format!(
            "parameter \"zmax\" must be > 0, got {zmax}"
        )));
    }
    if !(1..=2).contains(&dim) {
        return Err(CliError::Config(format!(
            "parameter \"dim\" must be 1 or 2, got {dim}"
        )));
    }
    let path = PathBuf::from(&input);
    let text = fs::read_to_string(&path).map_err(|e| io_err(&path, e))?;
    let h = parse_grid_csv(&text, dim)
        .map_err(|m| CliError::Config(format!("{}: {m}", path.display())))?;
    let f = whitney_extend(&h, zmax, nz).map_err(lib_err)?;
    write_file(&config.output_dir, "extend.csv", |w| f.write_csv(w))?;
    Ok(vec!["extend.csv".into()])
}

/// Parse a GridFunction from CSV with headers `x,value` (d = 1) or
/// `x,y,value` (d = 2), rows in the writer's row-major order.
fn parse_grid_csv(text: &str, dim: usize) -> Result<GridFunction, String> {
    let mut lines = text.lines();
    let header = lines.next().ok_or("empty file")?;
    let expect = if dim == 1 { "x,value" } else { "x,y,value" };
    if header.trim() != expect {
        return Err(format!("expected header \"{expect}\", got \"{header}\""));
    }
    let mut coords: Vec<Vec<f64>> = Vec::new();
    let mut values = Vec::new();
    for (ln, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let parts: Vec<f64> = line
            .split(',')
            .map(|t| t.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| format!("line {}: {e}", ln + 2))?;
        if parts.len() != dim + 1 {
            return Err(format!("line {}: expected {} fields", ln + 2, dim + 1));
        }
        coords.push(parts[..dim].to_vec());
        values.push(parts[dim]);
    }
    if coords.len() < 2 {
        return Err("need at least 2 rows".into());
    }
    if dim == 1 {
        let n = coords.len();
        let x0 = coords[0][0];
        let dx = coords[1][0] - x0;
        if !(dx > 0.0) {
            return Err("x must increase".into());
        }
        for (i, c) in coords.iter().enumerate() {
            if (c[0] - (x0 + dx * i as f64)).abs() > 1e-9 * dx.max(1.0) {
                return Err(format!("non-uniform x at row {}", i + 2));
            }
        }
        GridFunction::new(vec!["x".into()], vec![x0], vec![dx], vec![n], values)
            .map_err(|e| e.to_string())
    } else {
        // Rows are x-major, y fastest: count the leading block of equal x.
        let x0 = coords[0][0];
        let ny = coords.iter().take_while(|c| c[0] == x0).count();
        if ny < 2 || !coords.len().is_multiple_of(ny) {
            return Err("rows do not form a full 2D grid".into());
        }
        let nx = coords.len() / ny;
        if nx < 2 {
            return Err("need at least 2 x-levels".into());
        }
        let y0 = coords[0][1];
        let dy = coords[1][1] - y0;
        let dx = coords[ny][0] - x0;
        if !(dx > 0.0) || !(dy > 0.0) {
            return Err("grid axes must increase".into());
        }
        for (i, c) in coords.iter().enumerate() {
            let xi = x0 + dx * (i / ny) as f64;
            let yi = y0 + dy * (i % ny) as f64;
            if (c[0] - xi).abs() > 1e-9 * dx.max(1.0) || (c[1] - yi).abs() > 1e-9 * dy.max(1.0) {
                return Err(format!("non-uniform grid at row {}", i + 2));
            }
        }
        GridFunction::new(
            vec!["x".into(), "y".into()],
            vec![x0, y0],
            vec![dx, dy],
            vec![nx, ny],
            values,
        )
        .map_err(|e| e.to_string())
    }
}

fn run_mesh(config: &RunConfig) -> Result<Vec<String>, CliError> {
    let spec = get_string(config, "surface", "critical-catenoid")?;
    let ntheta = get_usize(config, "ntheta", 64)?;
    let ns = get_usize(config, "ns", 501)?;
    let out_name = get_string(config, "out", "mesh.obj")?;
    let surface = parse_surface(&spec, ns)?;
    let profile = surface.profile(ns)?;
    let mesh = revolve(&profile, ntheta).map_err(lib_err)?;
    export_obj(&mesh, &config.output_dir.join(&out_name)).map_err(lib_err)?;
    Ok(vec![out_name])
}

/// Write `manifest.json`: the resolved config, the tool version, and every
/// derived constant with the residuals achieved.
fn write_manifest(config: &RunConfig, artifacts: &[String]) -> Result<(), CliError> {
    let cat = critical_catenoid();
    let z1 = cat.z1();
    let c1 = c1_constant();
    let s1 = z1.sinh();
    let cert = catenoid_foliation_certificate().map_err(lib_err)?;
    write_file(&config.output_dir, "manifest.json", |w| {
        writeln!(w, "{{")?;
        writeln!(w, "  \"command\": {:?},", config.command)?;
        writeln!(w, "  \"parameters\": {{")?;
        let n = config.parameters.len();
        for (i, (k, v)) in config.parameters.iter().enumerate() {
            let comma = if i + 1 < n { "," } else { "" };
            match v {
                Value::Number(num) if num.is_f64() => writeln!(
                    w,
                    "    {:?}: {:.16e}{}",
                    k,
                    num.as_f64().unwrap_or(f64::NAN),
                    comma
                )?,
                other => writeln!(w, "    {:?}: {}{}", k, other, comma)?,
            }
        }
        writeln!(w, "  }},")?;
        writeln!(w, "  \"version\": {:?},", env!("CARGO_PKG_VERSION"))?;
        writeln!(w, "  \"artifacts\": [")?;
        for (i, a) in artifacts.iter().enumerate() {
            let comma = if i + 1 < artifacts.len() { "," } else { "" };
            writeln!(w, "    {:?}{}", a, comma)?;
        }
        writeln!(w, "  ],")?;
        writeln!(w, "  \"constants\": {{")?;
        writeln!(w, "    \"z1\": {:.16e},", z1)?;
        writeln!(w, "    \"c\": {:.16e},", cat.c)?;
        writeln!(w, "    \"c1\": {:.16e},", c1)?;
        writeln!(w, "    \"s1\": {:.16e}", s1)?;
        writeln!(w, "  }},")?;
        writeln!(w, "  \"tolerances\": {{")?;
        writeln!(
            w,
            "    \"z1_residual\": {:.3e},",
            (z1 - 1.0 / z1.tanh()).abs()
        )?;
        writeln!(
            w,
            "    \"unit_ball_defect\": {:.3e},",
            ((cat.z_c.powi(2) + (cat.c * (cat.z_c / cat.c).cosh()).powi(2)).sqrt() - 1.0).abs()
        )?;
        writeln!(
            w,
            "    \"c1_forms_gap\": {:.3e},",
            (c1 - c1_constant_alt()).abs()
        )?;
        writeln!(
            w,
            "    \"s0_robin_defect_max\": {:.3e}",
            cert.robin_defects.0.max(cert.robin_defects.1)
        )?;
        writeln!(w, "  }}")?;
        writeln!(w, "}}")
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_by_error_class() {
        assert_eq!(CliError::Io("x".into()).code(), 1);
        assert_eq!(CliError::Config("x".into()).code(), 2);
        assert_eq!(CliError::Numerical("x".into()).code(), 3);
        // Library errors map to numerical failures (exit 3) unless I/O.
        let e = lib_err(cmc_lab::Error::NoRoot("q keeps one sign".into()));
        assert_eq!(e.code(), 3);
        let e = lib_err(cmc_lab::Error::Io {
            path: "p".into(),
            source: std::io::Error::other("disk full"),
        });
        assert_eq!(e.code(), 1);
    }

    #[test]
    fn grid_csv_parsing() {
        let good = "x,value\n0e0,1e0\n5e-1,2e0\n1e0,3e0\n";
        let g = parse_grid_csv(good, 1).unwrap();
        assert_eq!(g.dims(), &[3]);
        assert_eq!(g.values(), &[1.0, 2.0, 3.0]);
        // Wrong header, non-uniform spacing, ragged grid.
        assert!(parse_grid_csv("value,x\n0,1\n1,2\n", 1).is_err());
        assert!(parse_grid_csv("x,value\n0,1\n0.5,2\n0.7,3\n", 1).is_err());
        assert!(parse_grid_csv("x,y,value\n0,0,1\n0,1,2\n1,0,3\n", 2).is_err());
        let good2 = "x,y,value\n0,0,1\n0,1,2\n1,0,3\n1,1,4\n";
        let g2 = parse_grid_csv(good2, 2).unwrap();
        assert_eq!(g2.dims(), &[2, 2]);
    }

    #[test]
    fn surface_spec_validation() {
        assert!(parse_surface("critical-catenoid", 99).is_ok());
        assert!(matches!(
            parse_surface("annulus:zero", 99),
            Err(CliError::Config(_))
        ));
        assert!(matches!(
            parse_surface("annulus:-2", 99),
            Err(CliError::Config(_))
        ));
        assert!(matches!(
            parse_surface("torus", 99),
            Err(CliError::Config(_))
        ));
    }
}
