//! File writers for the subcommands: commented CSV tables, JSON
//! documents, and the optional SVG heatmap.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::Serialize;

use helmcloak::experiments::{CellOutcome, PkRow, SweepCell, SweepSpec, SvdStudy};
use helmcloak::regularize::{LemmaBounds, MorozovSolution};
use helmcloak::report::{fmt_float, write_json, CsvTable};
use helmcloak::Result;

use crate::config::{axis_token, RunConfig};

/// Schema identifier written into every CSV header; bump on any column
/// change.
pub const SCHEMA_VERSION: u32 = 1;

/// Run metadata written next to the data files.
#[derive(Serialize)]
pub struct Manifest<'a> {
    pub command: &'a str,
    pub version: &'a str,
    pub seed: u64,
    pub elapsed_seconds: f64,
    pub outputs: Vec<String>,
    pub warnings: &'a [String],
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cells_ok: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cells_failed: Option<usize>,
    /// The configuration after command-line overrides.
    pub config: &'a RunConfig,
}

/// Everything cmd solve knows about one run.
#[derive(Serialize)]
pub struct SolutionDocument<'a> {
    pub version: &'a str,
    pub seed: u64,
    pub epsilon: f64,
    /// Weighted norm of the perturbation actually applied (0 when the
    /// data was clean).
    pub perturbation_norm: f64,
    pub warnings: &'a [String],
    pub solution: &'a MorozovSolution,
    pub lemma: &'a LemmaBounds,
    pub config: &'a RunConfig,
}

fn header(table: &mut CsvTable, schema: &str, config: &RunConfig, seed: u64) {
    table.comment(format!("schema: {schema} v{SCHEMA_VERSION}"));
    table.comment(format!("seed: {seed}"));
    table.comment(format!(
        "config: {}",
        serde_json::to_string(config).expect("config serializes")
    ));
}

pub fn write_manifest(dir: &Path, manifest: &Manifest) -> Result<PathBuf> {
    let path = dir.join("manifest.json");
    write_json(&path, manifest)?;
    Ok(path)
}

pub fn write_solution_json(
    dir: &Path,
    document: &SolutionDocument,
) -> Result<PathBuf> {
    let path = dir.join("solution.json");
    write_json(&path, document)?;
    Ok(path)
}

/// The density on the radiating circle: tau, Re phi, Im phi.
pub fn write_phi_csv(
    dir: &Path,
    config: &RunConfig,
    seed: u64,
    taus: &[f64],
    phi: &[Complex64],
) -> Result<PathBuf> {
    let mut table = CsvTable::new(&["tau", "re_phi", "im_phi"]);
    header(&mut table, "phi", config, seed);
    for (tau, value) in taus.iter().zip(phi.iter()) {
        table.push_row(vec![
            fmt_float(*tau),
            fmt_float(value.re),
            fmt_float(value.im),
        ]);
    }
    let path = dir.join("phi.csv");
    table.write(&path)?;
    Ok(path)
}

pub fn write_sweep_csv(
    dir: &Path,
    config: &RunConfig,
    spec: &SweepSpec,
    cells: &[SweepCell],
) -> Result<PathBuf> {
    let row_name = axis_token(spec.rows.axis);
    let col_name = axis_token(spec.cols.axis);
    let mut table = CsvTable::new(&[
        row_name,
        col_name,
        "status",
        "alpha",
        "alpha_clean",
        "near_rel",
        "far_avg",
        "phi_norm",
        "rel_sensitivity",
        "abs_sensitivity",
        "newton_iters",
        "bisection_fallback",
        "seed",
        "message",
    ]);
    header(&mut table, "sweep", config, spec.base.seed);
    table.comment(format!("rows: {row_name}, cols: {col_name}"));
    for cell in cells {
        let mut row = vec![fmt_float(cell.row_value), fmt_float(cell.col_value)];
        match &cell.outcome {
            CellOutcome::Ok { stats } => {
                row.extend([
                    "ok".to_string(),
                    fmt_float(stats.alpha),
                    fmt_float(stats.alpha_clean),
                    fmt_float(stats.near_rel),
                    fmt_float(stats.far_avg),
                    fmt_float(stats.phi_norm),
                    fmt_float(stats.rel_sensitivity),
                    fmt_float(stats.abs_sensitivity),
                    stats.newton_iters.to_string(),
                    stats.bisection_fallback.to_string(),
                    stats.seed.to_string(),
                    String::new(),
                ]);
            }
            CellOutcome::Failed { message } => {
                row.push("failed".to_string());
                row.extend(std::iter::repeat_with(String::new).take(10));
                row.push(message.clone());
            }
        }
        table.push_row(row);
    }
    let path = dir.join("sweep.csv");
    table.write(&path)?;
    Ok(path)
}

pub fn write_svd_csvs(
    dir: &Path,
    config: &RunConfig,
    seed: u64,
    study: &SvdStudy,
) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    for line in &study.spectra {
        let mut table = CsvTable::new(&["index", "sigma"]);
        header(&mut table, "spectrum", config, seed);
        table.comment(format!("standoff: {}", fmt_float(line.standoff)));
        for (index, sigma) in line.values.iter().enumerate() {
            table.push_row(vec![(index + 1).to_string(), fmt_float(*sigma)]);
        }
        let path = dir.join(format!("spectrum_d{}.csv", fmt_float(line.standoff)));
        table.write(&path)?;
        written.push(path);
    }
    let mut table = CsvTable::new(&["standoff", "wavenumber", "sigma_first", "gap_ratio"]);
    header(&mut table, "sigma_surface", config, seed);
    for point in &study.surface {
        table.push_row(vec![
            fmt_float(point.standoff),
            fmt_float(point.wavenumber),
            fmt_float(point.sigma_first),
            fmt_float(point.gap_ratio),
        ]);
    }
    let path = dir.join("sigma_surface.csv");
    table.write(&path)?;
    written.push(path);
    Ok(written)
}

pub fn write_pk_csv(
    dir: &Path,
    config: &RunConfig,
    seed: u64,
    rows: &[PkRow],
) -> Result<PathBuf> {
    let mut table = CsvTable::new(&["wavenumber", "exponent", "alpha", "monotone_throughout"]);
    header(&mut table, "pk_table", config, seed);
    for row in rows {
        table.push_row(vec![
            fmt_float(row.wavenumber),
            fmt_float(row.exponent),
            row.alpha.map(fmt_float).unwrap_or_default(),
            row.monotone_throughout.to_string(),
        ]);
    }
    let path = dir.join("pk_table.csv");
    table.write(&path)?;
    Ok(path)
}

/// One field sample on the Cartesian map; excluded band points carry
/// no value.
pub struct FieldSample {
    pub x: f64,
    pub y: f64,
    pub value: Option<Complex64>,
}

pub fn write_field_csv(
    dir: &Path,
    config: &RunConfig,
    seed: u64,
    samples: &[FieldSample],
) -> Result<PathBuf> {
    let mut table = CsvTable::new(&["x", "y", "re_u", "im_u", "abs_u"]);
    header(&mut table, "field", config, seed);
    table.comment("points inside the exclusion band around the radiating circle are omitted");
    for sample in samples {
        if let Some(u) = sample.value {
            table.push_row(vec![
                fmt_float(sample.x),
                fmt_float(sample.y),
                fmt_float(u.re),
                fmt_float(u.im),
                fmt_float(u.norm()),
            ]);
        }
    }
    let path = dir.join("field.csv");
    table.write(&path)?;
    Ok(path)
}

/// Hand-rolled SVG heatmap of |u| on the map grid. Amplitude is shown
/// on a square-root scale to keep the faint exterior visible.
pub fn write_field_svg(
    dir: &Path,
    samples: &[FieldSample],
    resolution: usize,
) -> Result<PathBuf> {
    assert_eq!(samples.len(), resolution * resolution, "grid must be full");
    let max_abs = samples
        .iter()
        .filter_map(|s| s.value.map(|u| u.norm()))
        .fold(0.0f64, f64::max);
    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {resolution} {resolution}\">\n"
    ));
    svg.push_str(&format!("<!-- max |u| = {} -->\n", fmt_float(max_abs)));
    svg.push_str(&format!(
        "<rect width=\"{resolution}\" height=\"{resolution}\" fill=\"#202020\"/>\n"
    ));
    for (index, sample) in samples.iter().enumerate() {
        let Some(u) = sample.value else { continue };
        let ix = index % resolution;
        let iy = index / resolution;
        let t = if max_abs > 0.0 {
            (u.norm() / max_abs).sqrt()
        } else {
            0.0
        };
        let (r, g, b) = colormap(t);
        // SVG y grows downward; the grid row 0 is the smallest y.
        svg.push_str(&format!(
            "<rect x=\"{ix}\" y=\"{}\" width=\"1\" height=\"1\" fill=\"#{r:02x}{g:02x}{b:02x}\"/>\n",
            resolution - 1 - iy
        ));
    }
    svg.push_str("</svg>\n");
    let path = dir.join("field.svg");
    std::fs::write(&path, svg)?;
    Ok(path)
}

/// Five-stop dark-to-bright colormap, linear between stops.
fn colormap(t: f64) -> (u8, u8, u8) {
    const STOPS: [(f64, f64, f64); 5] = [
        (0.267, 0.005, 0.329),
        (0.229, 0.322, 0.545),
        (0.128, 0.567, 0.551),
        (0.369, 0.789, 0.383),
        (0.993, 0.906, 0.144),
    ];
    let t = t.clamp(0.0, 1.0) * (STOPS.len() - 1) as f64;
    let i = (t.floor() as usize).min(STOPS.len() - 2);
    let f = t - i as f64;
    let mix = |a: f64, b: f64| ((a + (b - a) * f) * 255.0).round() as u8;
    (
        mix(STOPS[i].0, STOPS[i + 1].0),
        mix(STOPS[i].1, STOPS[i + 1].1),
        mix(STOPS[i].2, STOPS[i + 1].2),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn colormap_hits_both_ends() {
        assert_eq!(colormap(0.0), (68, 1, 84));
        assert_eq!(colormap(1.0), (253, 231, 37));
        let (r, g, b) = colormap(0.5);
        assert!(r < 253 && g > 1 && b > 37);
    }

    #[test]
    fn field_svg_skips_excluded_cells() {
        let dir = tempfile::tempdir().unwrap();
        let samples = vec![
            FieldSample { x: 0.0, y: 0.0, value: Some(Complex64::new(1.0, 0.0)) },
            FieldSample { x: 1.0, y: 0.0, value: None },
            FieldSample { x: 0.0, y: 1.0, value: Some(Complex64::new(0.0, 0.5)) },
            FieldSample { x: 1.0, y: 1.0, value: Some(Complex64::ZERO) },
        ];
        let path = write_field_svg(dir.path(), &samples, 2).unwrap();
        let text = std::fs::read_to_string(path).unwrap();
        // Background plus three value cells.
        assert_eq!(text.matches("<rect").count(), 4);
        assert!(text.contains("max |u| = 1"));
    }
}
