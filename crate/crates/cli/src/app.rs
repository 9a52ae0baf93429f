//! Subcommands of the `specshape` binary.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use specshape_core::eval::{
    comparisons_csv, histogram, overlay, Histogram, OverlayStyle, ANGLE_BINS, RATIO_BINS,
};
use specshape_core::mesh::{load_obj, principal_curvatures, shapes_csv};
use specshape_core::render::Scene;

use crate::codec::{read_image, write_image};
use crate::config::{parse_intrinsics, ConfigFile, Overrides, PipelineConfig};
use crate::report::{TruthFile, TruthRecord};
use crate::{evaluate, run_pipeline, CliError, ReconstructionReport};

/// Environment variable capping the worker thread count.
pub const THREADS_ENV: &str = "SPECSHAPE_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "specshape",
    version,
    about = "Surface normals and shape from specular highlights"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Reconstruct normals, principal directions and curvature ratios.
    Reconstruct(ReconstructArgs),
    /// Render a quadric-patch scene and its analytic ground truth.
    Synth(SynthArgs),
    /// Compare a reconstruction report with ground truth.
    Eval(EvalArgs),
    /// Draw a report's accepted estimates over an image.
    Overlay(OverlayArgs),
    /// Per-vertex normals and principal curvatures of an OBJ mesh.
    MeshCurvature(MeshArgs),
}

#[derive(Debug, Args)]
pub struct ReconstructArgs {
    /// Input image (binary PPM/PGM or PNG).
    pub image: PathBuf,
    /// TOML configuration file; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Camera intrinsics `fx,fy,cx,cy[,skew]`.
    #[arg(long, allow_hyphen_values = true)]
    pub intrinsics: Option<String>,
    /// Ellipticity threshold on the relative fit residual.
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Saturation level in (0, 1] that marks a pixel as specular.
    #[arg(long)]
    pub detector_threshold: Option<f64>,
    #[arg(long)]
    pub min_area: Option<usize>,
    #[arg(long)]
    pub max_area: Option<usize>,
    #[arg(long)]
    pub border_margin: Option<usize>,
    /// Spline control points for contour smoothing.
    #[arg(long)]
    pub control_points: Option<usize>,
    /// Report path; printed to stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Annotated image path (PNG by extension, PPM otherwise).
    #[arg(long)]
    pub overlay: Option<PathBuf>,
    /// Zero the timing field for byte-reproducible reports.
    #[arg(long)]
    pub deterministic: bool,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Scene description (TOML).
    pub scene: PathBuf,
    /// Rendered image path.
    #[arg(long)]
    pub image: PathBuf,
    /// Ground-truth JSON path; printed to stdout when absent.
    #[arg(long)]
    pub truth: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    pub report: PathBuf,
    pub truth: PathBuf,
    /// Largest brightest-point distance for a match, pixels.
    #[arg(long, default_value_t = 5.0)]
    pub max_px: f64,
    /// Comparison CSV path; printed to stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Directory receiving one histogram CSV per metric.
    #[arg(long)]
    pub histograms: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OverlayArgs {
    pub image: PathBuf,
    pub report: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct MeshArgs {
    pub mesh: PathBuf,
    /// CSV path; printed to stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Applies `SPECSHAPE_THREADS` to the global pool, if set.
pub fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        CliError::Config(format!(
            "{THREADS_ENV} must be a positive integer, got '{v}'"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Reconstruct(a) => reconstruct(a),
        Command::Synth(a) => synth(a),
        Command::Eval(a) => eval(a),
        Command::Overlay(a) => draw_overlay(a),
        Command::MeshCurvature(a) => mesh_curvature(a),
    }
}

fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn emit(text: &str, path: Option<&Path>) -> Result<(), CliError> {
    match path {
        Some(p) => {
            std::fs::write(p, text).map_err(|e| CliError::Input(format!("{}: {e}", p.display())))
        }
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Input(format!("stdout: {e}"))),
    }
}

fn reconstruct(a: ReconstructArgs) -> Result<(), CliError> {
    let file = match &a.config {
        Some(p) => Some(ConfigFile::from_toml_str(
            &read_text(p).map_err(|e| CliError::Config(e.to_string()))?,
        )?),
        None => None,
    };
    let flags = Overrides {
        intrinsics: a.intrinsics.as_deref().map(parse_intrinsics).transpose()?,
        threshold: a.threshold,
        detector_threshold: a.detector_threshold,
        min_area: a.min_area,
        max_area: a.max_area,
        border_margin: a.border_margin,
        control_points: a.control_points,
        out: a.out,
        overlay: a.overlay,
        deterministic: a.deterministic,
    };
    let cfg = PipelineConfig::resolve(file.as_ref(), &flags)?;
    let img = read_image(&a.image)?;
    let report = run_pipeline(&img, &cfg)?;
    if let Some(p) = &cfg.overlay_path {
        write_image(
            &overlay(&img, &report.accepted_estimates(), &OverlayStyle::default()),
            p,
        )?;
    }
    emit(&report.to_json(), cfg.report_path.as_deref())
}

fn synth(a: SynthArgs) -> Result<(), CliError> {
    let scene =
        Scene::from_toml_str(&read_text(&a.scene)?).map_err(|e| CliError::Input(e.to_string()))?;
    write_image(&scene.render(), &a.image)?;
    let records = scene
        .ground_truth()
        .iter()
        .enumerate()
        .map(|(i, r)| TruthRecord::from_result(i, r))
        .collect();
    let truth = TruthFile::new(&scene.camera, scene.render, records);
    emit(&truth.to_json(), a.truth.as_deref())
}

fn histogram_or_empty(values: &[f64], bins: (usize, f64, f64)) -> Histogram {
    let (n, lo, hi) = bins;
    histogram(values, n, (lo, hi)).unwrap_or_else(|_| {
        let mut h = histogram(&[lo], n, (lo, hi)).expect("default binning is valid");
        h.counts.iter_mut().for_each(|c| *c = 0);
        h
    })
}

fn eval(a: EvalArgs) -> Result<(), CliError> {
    let report = ReconstructionReport::from_json(&read_text(&a.report)?)?;
    let truth = TruthFile::from_json(&read_text(&a.truth)?)?;
    if !(a.max_px > 0.0) {
        return Err(CliError::Config(format!(
            "--max-px must be positive, got {}",
            a.max_px
        )));
    }
    let rows = evaluate(&report, &truth, a.max_px)?;
    if let Some(dir) = &a.histograms {
        std::fs::create_dir_all(dir)
            .map_err(|e| CliError::Input(format!("{}: {e}", dir.display())))?;
        let pick = |f: fn(&specshape_core::eval::PatchComparison) -> f64| {
            rows.iter().map(f).collect::<Vec<_>>()
        };
        let directional: Vec<f64> = rows
            .iter()
            .filter(|r| !r.directions_unreliable)
            .map(|r| r.direction_error_deg)
            .collect();
        let tables = [
            (
                "normal_error_deg.csv",
                histogram_or_empty(&pick(|r| r.normal_error_deg), ANGLE_BINS),
            ),
            (
                "theta_e_deg.csv",
                histogram_or_empty(&pick(|r| r.theta_e_deg), ANGLE_BINS),
            ),
            (
                "direction_error_deg.csv",
                histogram_or_empty(&directional, ANGLE_BINS),
            ),
            (
                "ratio_diff.csv",
                histogram_or_empty(&pick(|r| r.ratio_diff), RATIO_BINS),
            ),
        ];
        for (name, h) in tables {
            emit(&h.to_csv(), Some(&dir.join(name)))?;
        }
    }
    emit(&comparisons_csv(&rows), a.out.as_deref())
}

fn draw_overlay(a: OverlayArgs) -> Result<(), CliError> {
    let img = read_image(&a.image)?;
    let report = ReconstructionReport::from_json(&read_text(&a.report)?)?;
    write_image(
        &overlay(&img, &report.accepted_estimates(), &OverlayStyle::default()),
        &a.out,
    )?;
    Ok(())
}

fn mesh_curvature(a: MeshArgs) -> Result<(), CliError> {
    let bytes = std::fs::read(&a.mesh)
        .map_err(|e| CliError::Input(format!("{}: {e}", a.mesh.display())))?;
    let loaded = load_obj(&bytes).map_err(|e| CliError::Input(e.to_string()))?;
    if loaded.dropped_faces > 0 {
        eprintln!(
            "specshape: dropped {} degenerate faces",
            loaded.dropped_faces
        );
    }
    let shapes = principal_curvatures(&loaded.mesh);
    let isolated = shapes.iter().filter(|s| s.is_none()).count();
    if isolated > 0 {
        eprintln!("specshape: {isolated} isolated vertices have no estimate");
    }
    emit(&shapes_csv(&shapes), a.out.as_deref())
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn argument_definitions_are_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn parses_reconstruct_flags() {
        let cli = Cli::try_parse_from([
            "specshape",
            "reconstruct",
            "img.ppm",
            "--intrinsics",
            "800,800,320,240",
            "--threshold",
            "0.1",
            "--detector-threshold",
            "0.9",
            "--min-area",
            "10",
            "--max-area",
            "900",
            "--out",
            "r.json",
            "--overlay",
            "o.png",
            "--deterministic",
        ])
        .unwrap();
        let Command::Reconstruct(a) = cli.command else {
            panic!()
        };
        assert_eq!(a.intrinsics.as_deref(), Some("800,800,320,240"));
        assert_eq!(
            (a.threshold, a.detector_threshold, a.min_area, a.max_area),
            (Some(0.1), Some(0.9), Some(10), Some(900))
        );
        assert!(a.deterministic);
        assert!(Cli::try_parse_from(["specshape", "reconstruct"]).is_err());
        assert!(Cli::try_parse_from(["specshape", "mesh-curvature", "m.obj"]).is_ok());
    }
}
