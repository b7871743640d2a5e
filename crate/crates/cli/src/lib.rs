//! Command dispatch for the `cmc1face` binary.
//!
//! Exit status is 0 on success, 1 when the input is rejected (bad flags,
//! unreadable or invalid scene, unknown end) and 2 when a numeric stage or
//! an output write fails.

use std::ffi::OsString;
use std::fmt::Display;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use cmc1face::ends::{loop_radius, osserman_check, EndError};
use cmc1face::export::{analyze_scene, export_curves, export_mesh, write_report};
use cmc1face::frame::monodromy;
use cmc1face::lorentz::arg_2pi;
use cmc1face::scene::{load_scene, SceneSpec};
use cmc1face::surface::{sample_grid, singular_curves};
use cmc1face::weierstrass::Example;
use cmc1face::{Mat2C, SpherePoint, Su11Class};
use num_complex::Complex64;

/// Worker count for the parallel grid and curve passes.
pub const THREADS_ENV: &str = "CMC1FACE_THREADS";

pub const EXIT_OK: u8 = 0;
pub const EXIT_INVALID: u8 = 1;
pub const EXIT_NUMERIC: u8 = 2;

#[derive(Parser, Debug)]
#[command(name = "cmc1face", version, about = "CMC-1 faces in de Sitter 3-space from Weierstrass data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List the built-in examples and their parameters.
    Examples,
    /// Sample the surface and write the mesh and singular curves as OBJ.
    Generate {
        scene: PathBuf,
        #[arg(long)]
        out_mesh: Option<PathBuf>,
        #[arg(long)]
        out_curves: Option<PathBuf>,
    },
    /// Print the monodromy of one end.
    Monodromy {
        scene: PathBuf,
        /// Puncture: `inf`, a real number, or `re,im`.
        #[arg(long, allow_hyphen_values = true)]
        end: SpherePoint,
        /// Loop radius; defaults to one clear of the other punctures.
        #[arg(long)]
        radius: Option<f64>,
    },
    /// Write the full analysis report as JSON.
    Analyze {
        scene: PathBuf,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Print the Osserman-type inequality verdict.
    Osserman { scene: PathBuf },
}

struct Failure {
    code: u8,
    message: String,
}

fn invalid(m: impl Display) -> Failure {
    Failure { code: EXIT_INVALID, message: m.to_string() }
}

fn numeric(m: impl Display) -> Failure {
    Failure { code: EXIT_NUMERIC, message: m.to_string() }
}

fn end_failure(e: EndError) -> Failure {
    match e {
        EndError::UnknownPuncture(_) => invalid(e),
        e => numeric(e),
    }
}

/// Runs one command line and returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    configure_threads();
    match dispatch(cli.command, out) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn configure_threads() {
    let Some(n) = std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse::<usize>().ok()) else {
        return;
    };
    // a second call in the same process keeps the first pool
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
}

fn read_scene(path: &Path) -> Result<SceneSpec, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))?;
    load_scene(&text).map_err(|e| invalid(format!("{}: {e}", path.display())))
}

fn io(e: std::io::Error) -> Failure {
    numeric(e)
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<(), Failure> {
    match command {
        Command::Examples => {
            for ex in Example::ALL {
                let params: Vec<String> = ex
                    .param_names()
                    .iter()
                    .zip(ex.default_params())
                    .map(|(n, v)| format!("{n}={v}"))
                    .collect();
                writeln!(out, "{:<11} {:<16} {}", ex.name(), params.join(" "), ex.description()).map_err(io)?;
            }
        }
        Command::Generate { scene, out_mesh, out_curves } => {
            let s = read_scene(&scene)?;
            let mesh = out_mesh.or_else(|| s.config.outputs.mesh.clone());
            let curves = out_curves.or_else(|| s.config.outputs.curves.clone());
            if mesh.is_none() && curves.is_none() {
                return Err(invalid("no output: pass --out-mesh or --out-curves, or set outputs in the scene"));
            }
            if let Some(path) = mesh {
                let grid = sample_grid(&s.data, &s.region, s.nu, s.nv, &s.options);
                export_mesh(&grid, &path, &s.hash).map_err(numeric)?;
                writeln!(
                    out,
                    "mesh {}: {} nodes, {} failed, {} cells skipped",
                    path.display(),
                    grid.samples.len(),
                    grid.failures.len(),
                    grid.failed_cells.len()
                )
                .map_err(io)?;
            }
            if let Some(path) = curves {
                let cs = singular_curves(&s.data, &s.region, s.curve_resolution, &s.options);
                export_curves(&cs, &path, &s.hash).map_err(numeric)?;
                let broken = cs.iter().filter(|c| c.image_error.is_some()).count();
                writeln!(out, "curves {}: {} components, {} without image", path.display(), cs.len(), broken)
                    .map_err(io)?;
            }
        }
        Command::Monodromy { scene, end, radius } => {
            let s = read_scene(&scene)?;
            if !s.data.punctures.contains(&end) {
                return Err(end_failure(EndError::UnknownPuncture(end)));
            }
            let r = radius.unwrap_or_else(|| loop_radius(&s.data, &end));
            let m = monodromy(&s.data, &end, r, &s.options).map_err(numeric)?;
            write_monodromy(out, &end, r, &m.phi, &m.eigenvalues, &m.classification, m.su11_residual).map_err(io)?;
        }
        Command::Analyze { scene, report } => {
            let s = read_scene(&scene)?;
            let r = analyze_scene(&s).map_err(end_failure)?;
            match report.or_else(|| s.config.outputs.report.clone()) {
                Some(path) => {
                    write_report(&r, &path).map_err(numeric)?;
                    writeln!(out, "report {}: {}", path.display(), r.osserman.verdict()).map_err(io)?;
                }
                None => writeln!(out, "{}", r.to_json()).map_err(io)?,
            }
        }
        Command::Osserman { scene } => {
            let s = read_scene(&scene)?;
            let r = osserman_check(&s.data, &s.options).map_err(end_failure)?;
            writeln!(out, "{}", r.verdict()).map_err(io)?;
        }
    }
    Ok(())
}

fn cx(z: Complex64) -> String {
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{:.12} {sign} {:.12}i", z.re, z.im.abs())
}

fn write_monodromy(
    out: &mut dyn Write,
    end: &SpherePoint,
    radius: f64,
    phi: &Mat2C,
    eig: &[Complex64; 2],
    class: &Su11Class,
    residual: f64,
) -> std::io::Result<()> {
    writeln!(out, "end {end}, loop radius {radius}")?;
    writeln!(out, "phi = [[{}, {}],", cx(phi.a11), cx(phi.a12))?;
    writeln!(out, "       [{}, {}]]", cx(phi.a21), cx(phi.a22))?;
    for (k, l) in eig.iter().enumerate() {
        let turn = arg_2pi(*l) / std::f64::consts::PI;
        writeln!(out, "eigenvalue {}: {} = exp({turn:.12} pi i), modulus {:.15}", k + 1, cx(*l), l.norm())?;
    }
    let detail = match class {
        Su11Class::Elliptic { theta } => format!("theta = {:.12} pi", theta / std::f64::consts::PI),
        Su11Class::Hyperbolic { s, sign } => format!("s = {s:.12}, sign {sign}"),
        Su11Class::Parabolic { sign } | Su11Class::CenterPM { sign } => format!("sign {sign}"),
    };
    writeln!(out, "class: {} ({detail})", class.tag())?;
    writeln!(out, "su(1,1) residual: {residual:.3e}")
}
