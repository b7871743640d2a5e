//! Wavefront OBJ for meshes and singular curves in hollow-ball coordinates,
//! and the JSON analysis report.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ends::{osserman_check, EndError, OssermanReport};
use crate::frame::IntegrationStats;
use crate::scene::{SceneConfig, SceneSpec};
use crate::surface::{sample_grid, SampleGrid, SingularCurve};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Error)]
pub enum ExportError {
    #[error("cannot write {path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("the grid has no samples")]
    EmptyGrid,
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> ExportError + '_ {
    move |source| ExportError::Io { path: path.display().to_string(), source }
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn header(out: &mut impl Write, kind: &str, scene_hash: &str) -> io::Result<()> {
    writeln!(out, "# cmc1face {TOOL_VERSION} {kind}")?;
    writeln!(out, "# scene sha256 {scene_hash}")?;
    writeln!(out, "# coordinates: hollow ball y = e^(arctan x0) (x1, x2, x3) / sqrt(1 + x0^2)")
}

/// Writes one `v` per successful node in row-major order and one quad per
/// cell whose corners all exist and are distinct.
pub fn write_mesh(grid: &SampleGrid, scene_hash: &str, out: &mut impl Write) -> io::Result<()> {
    header(out, "mesh", scene_hash)?;
    writeln!(out, "# grid {} x {} {:?}", grid.nu, grid.nv, grid.region)?;
    let mut index = vec![0usize; grid.samples.len()];
    let mut next = 1;
    for (k, s) in grid.samples.iter().enumerate() {
        match s {
            Some(s) => {
                writeln!(out, "v {} {} {}", num(s.y[0]), num(s.y[1]), num(s.y[2]))?;
                index[k] = next;
                next += 1;
            }
            None => writeln!(out, "# missing node {} {}", k / grid.nv, k % grid.nv)?,
        }
    }
    for i in 0..grid.nu.saturating_sub(1) {
        for j in 0..grid.nv.saturating_sub(1) {
            let corners = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)];
            let Some(ys) = corners.iter().map(|&(a, b)| grid.sample(a, b).map(|s| s.y)).collect::<Option<Vec<_>>>() else {
                continue;
            };
            let distinct = (0..4).all(|p| (p + 1..4).all(|q| ys[p] != ys[q]));
            if !distinct {
                continue;
            }
            let ids: Vec<String> = corners.iter().map(|&(a, b)| index[grid.index(a, b)].to_string()).collect();
            writeln!(out, "f {}", ids.join(" "))?;
        }
    }
    Ok(())
}

pub fn export_mesh(grid: &SampleGrid, path: &Path, scene_hash: &str) -> Result<(), ExportError> {
    if grid.is_empty() {
        return Err(ExportError::EmptyGrid);
    }
    let file = File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(file);
    write_mesh(grid, scene_hash, &mut w).and_then(|_| w.flush()).map_err(io_err(path))
}

/// One `l` element per curve with a hollow-ball image; closed curves repeat
/// their first vertex. Domain points are written as comments.
pub fn write_curves(curves: &[SingularCurve], scene_hash: &str, out: &mut impl Write) -> io::Result<()> {
    header(out, "singular curves", scene_hash)?;
    let mut next = 1;
    for (k, c) in curves.iter().enumerate() {
        let kind = if c.closed { "closed" } else { "open" };
        writeln!(out, "# curve {k} {kind} {} vertices", c.domain.len())?;
        for z in &c.domain {
            writeln!(out, "# z {} {}", num(z.re), num(z.im))?;
        }
        if let Some(e) = &c.image_error {
            writeln!(out, "# no image: {e}")?;
            continue;
        }
        let first = next;
        for y in &c.image {
            writeln!(out, "v {} {} {}", num(y[0]), num(y[1]), num(y[2]))?;
        }
        next += c.image.len();
        if c.image.len() < 2 {
            continue;
        }
        let mut ids: Vec<String> = (first..next).map(|i| i.to_string()).collect();
        if c.closed {
            ids.push(first.to_string());
        }
        writeln!(out, "l {}", ids.join(" "))?;
    }
    Ok(())
}

pub fn export_curves(curves: &[SingularCurve], path: &Path, scene_hash: &str) -> Result<(), ExportError> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(file);
    write_curves(curves, scene_hash, &mut w).and_then(|_| w.flush()).map_err(io_err(path))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridDiagnostics {
    pub nodes: usize,
    pub failed_nodes: usize,
    pub failed_cells: usize,
    pub stats: IntegrationStats,
}

impl GridDiagnostics {
    pub fn of(grid: &SampleGrid) -> Self {
        GridDiagnostics {
            nodes: grid.samples.len(),
            failed_nodes: grid.failures.len(),
            failed_cells: grid.failed_cells.len(),
            stats: grid.stats,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub tool_version: String,
    pub scene_hash: String,
    pub scene: SceneConfig,
    /// Degenerate-case markers such as `UmbilicSurface`.
    pub markers: Vec<String>,
    pub warnings: Vec<String>,
    pub osserman: OssermanReport,
    pub monodromy_stats: IntegrationStats,
    pub grid: GridDiagnostics,
}

/// End analyses, the inequality, and a grid pass for integration
/// diagnostics.
pub fn analyze_scene(scene: &SceneSpec) -> Result<AnalysisReport, EndError> {
    let osserman = osserman_check(&scene.data, &scene.options)?;
    let grid = sample_grid(&scene.data, &scene.region, scene.nu, scene.nv, &scene.options);
    let mut monodromy_stats = IntegrationStats::default();
    for e in &osserman.per_end {
        monodromy_stats.merge(&e.monodromy.stats);
    }
    let mut markers = Vec::new();
    if osserman.umbilic {
        markers.push("UmbilicSurface".to_string());
    }
    if osserman.per_end.iter().any(|e| !e.regular) {
        markers.push("IrregularEnd".to_string());
    }
    if osserman.degree_heuristic {
        markers.push("HeuristicDegree".to_string());
    }
    if !osserman.consistent {
        markers.push("Inconsistent".to_string());
    }
    let mut warnings = scene.data.warnings.clone();
    warnings.extend(osserman.per_end.iter().flat_map(|e| e.warnings.iter().cloned()));
    Ok(AnalysisReport {
        tool_version: TOOL_VERSION.to_string(),
        scene_hash: scene.hash.clone(),
        scene: scene.config.clone(),
        markers,
        warnings,
        osserman,
        monodromy_stats,
        grid: GridDiagnostics::of(&grid),
    })
}

impl AnalysisReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

pub fn write_report(report: &AnalysisReport, path: &Path) -> Result<(), ExportError> {
    std::fs::write(path, report.to_json() + "\n").map_err(io_err(path))
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::frame::IntegratorOptions;
    use crate::scene::load_scene;
    use crate::surface::{singular_curves, Region};
    use crate::weierstrass::{make_example, Example};

    fn opts() -> IntegratorOptions {
        IntegratorOptions::default()
    }

    fn mesh_text(grid: &SampleGrid) -> String {
        let mut out = Vec::new();
        write_mesh(grid, "00", &mut out).unwrap();
        String::from_utf8(out).unwrap()
    }

    fn count(text: &str, prefix: &str) -> usize {
        text.lines().filter(|l| l.starts_with(prefix)).count()
    }

    #[test]
    fn two_by_two_horosphere() {
        let d = make_example(Example::Horosphere, &[]).unwrap();
        let g = sample_grid(&d, &Region::Cartesian { x: [0.0, 1.0], y: [0.0, 1.0] }, 2, 2, &opts());
        let t = mesh_text(&g);
        assert_eq!((count(&t, "v "), count(&t, "f ")), (4, 1));
        assert!(t.lines().any(|l| l == "f 1 3 4 2"));
        assert!(t.starts_with("# cmc1face "));
    }

    #[test]
    fn failed_cells_drop_faces_keep_vertices() {
        let d = make_example(Example::Catenoid, &[0.8]).unwrap();
        let g = sample_grid(&d, &Region::Cartesian { x: [0.05, 0.45], y: [-0.2, 0.2] }, 3, 3, &opts());
        let mut broken = g.clone();
        let k = broken.index(2, 2);
        broken.samples[k] = None;
        let t = mesh_text(&broken);
        assert_eq!((count(&t, "v "), count(&t, "f ")), (8, 3));
        assert_eq!(count(&mesh_text(&g), "f "), 4);
    }

    #[test]
    fn catenoid_figure_vertices_stay_in_the_shell() {
        let d = make_example(Example::Catenoid, &[0.8]).unwrap();
        let g = sample_grid(&d, &Region::LogPolar { log_r: [-5.0, 5.0], theta: [0.0, PI] }, 60, 60, &opts());
        let t = mesh_text(&g);
        let (lo, hi) = ((-PI).exp(), PI.exp());
        for l in t.lines().filter(|l| l.starts_with("v ")) {
            let r2: f64 = l[2..].split(' ').map(|x| x.parse::<f64>().unwrap().powi(2)).sum();
            assert!(r2 > lo && r2 < hi, "{l}");
        }
        assert_eq!(count(&t, "v "), 3600);
    }

    #[test]
    fn curves_files() {
        let mut out = Vec::new();
        write_curves(&[], "00", &mut out).unwrap();
        let t = String::from_utf8(out).unwrap();
        assert!(t.lines().all(|l| l.starts_with('#')) && !t.is_empty());

        let d = make_example(Example::Enneper, &[]).unwrap();
        let cs = singular_curves(&d, &Region::Cartesian { x: [-1.3, 1.3], y: [-1.3, 1.3] }, 60, &opts());
        let mut out = Vec::new();
        write_curves(&cs, "00", &mut out).unwrap();
        let t = String::from_utf8(out).unwrap();
        assert_eq!(count(&t, "l "), 1);
        let l = t.lines().find(|l| l.starts_with("l ")).unwrap();
        let ids: Vec<&str> = l[2..].split(' ').collect();
        assert_eq!(ids.first(), ids.last());
        assert_eq!(count(&t, "v "), cs[0].domain.len());

        let d = make_example(Example::Helicoid, &[]).unwrap();
        let cs = singular_curves(&d, &Region::Cartesian { x: [-0.9, 0.9], y: [-1.0, 1.0] }, 40, &opts());
        let mut out = Vec::new();
        write_curves(&cs, "00", &mut out).unwrap();
        let t = String::from_utf8(out).unwrap();
        let l = t.lines().find(|l| l.starts_with("l ")).unwrap();
        let ids: Vec<&str> = l[2..].split(' ').collect();
        assert_ne!(ids.first(), ids.last());
        assert_eq!(count(&t, "l "), 1);
    }

    #[test]
    fn output_is_deterministic() {
        let d = make_example(Example::Catenoid, &[0.8]).unwrap();
        let r = Region::LogPolar { log_r: [-1.0, 1.0], theta: [0.0, 1.0] };
        let a = mesh_text(&sample_grid(&d, &r, 20, 20, &opts()));
        let b = mesh_text(&sample_grid(&d, &r, 20, 20, &opts()));
        assert_eq!(a, b);
    }

    #[test]
    fn export_to_files() {
        let dir = tempfile::tempdir().unwrap();
        let d = make_example(Example::Horosphere, &[]).unwrap();
        let g = sample_grid(&d, &Region::Cartesian { x: [0.0, 1.0], y: [0.0, 1.0] }, 3, 3, &opts());
        let p = dir.path().join("m.obj");
        export_mesh(&g, &p, "ab").unwrap();
        assert!(std::fs::read_to_string(&p).unwrap().contains("# scene sha256 ab"));
        let empty = sample_grid(&d, &Region::Cartesian { x: [0.0, 0.0], y: [0.0, 1.0] }, 3, 3, &opts());
        assert!(matches!(export_mesh(&empty, &p, "ab"), Err(ExportError::EmptyGrid)));
        assert!(matches!(export_curves(&[], &dir.path().join("no/such/dir.obj"), "ab"), Err(ExportError::Io { .. })));
    }

    #[test]
    fn report_round_trips_and_marks_umbilic() {
        let s = load_scene(r#"{"data": {"example": "horosphere"}, "grid": {"nu": 4, "nv": 4}}"#).unwrap();
        let r = analyze_scene(&s).unwrap();
        assert!(r.markers.contains(&"UmbilicSurface".to_string()));
        assert_eq!(AnalysisReport::from_json(&r.to_json()).unwrap(), r);
        assert!(r.to_json().contains("\"undefined\""));

        let s = load_scene(r#"{"data": {"example": "catenoid"}, "grid": {"nu": 10, "nv": 10}}"#).unwrap();
        let r = analyze_scene(&s).unwrap();
        assert_eq!(r.osserman.per_end.len(), s.data.punctures.len());
        assert_eq!(AnalysisReport::from_json(&r.to_json()).unwrap(), r);
        assert_eq!(r.to_json(), analyze_scene(&s).unwrap().to_json());
    }
}
