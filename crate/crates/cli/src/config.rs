//! The TOML run configuration and its translation into library types.
//!
//! Every field has a default equal to the reference problem, so an
//! empty file (or no file) describes a complete run. Validation errors
//! name the offending key.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use helmcloak::experiments::{AxisGrid, SweepAxis, SweepSpec};
use helmcloak::fields::NoiseModel;
use helmcloak::geometry::Geometry;
use helmcloak::problem::Problem;
use helmcloak::regularize::SearchParams;
use helmcloak::{Error, Result};

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub geometry: GeometryBlock,
    pub discretization: DiscretizationBlock,
    pub physics: PhysicsBlock,
    pub regularization: RegularizationBlock,
    pub noise: NoiseBlock,
    pub sweep: SweepBlock,
    pub output: OutputBlock,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeometryBlock {
    pub a: f64,
    pub r1: f64,
    pub r2: f64,
    pub theta1: f64,
    pub theta2: f64,
    #[serde(rename = "R")]
    pub far_radius: f64,
}

impl Default for GeometryBlock {
    fn default() -> Self {
        use std::f64::consts::PI;
        Self {
            a: 0.01,
            r1: 0.011,
            r2: 0.015,
            theta1: 3.0 * PI / 4.0,
            theta2: 5.0 * PI / 4.0,
            far_radius: 10.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DiscretizationBlock {
    pub n_a: usize,
    pub n_arc1: usize,
    #[serde(rename = "n_R")]
    pub n_far: usize,
}

impl Default for DiscretizationBlock {
    fn default() -> Self {
        Self {
            n_a: 256,
            n_arc1: 256,
            n_far: 256,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PhysicsBlock {
    pub k: f64,
    /// Incident field kind; only "point" is implemented.
    pub source: String,
    pub x0: [f64; 2],
}

impl Default for PhysicsBlock {
    fn default() -> Self {
        Self {
            k: 10.0,
            source: "point".to_string(),
            x0: [10000.0, 0.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RegularizationBlock {
    pub delta: f64,
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub coarse_points: usize,
    pub newton_tol: f64,
    pub max_newton: usize,
}

impl Default for RegularizationBlock {
    fn default() -> Self {
        let p = SearchParams::default();
        Self {
            delta: 0.02,
            alpha_min: p.window.0,
            alpha_max: p.window.1,
            coarse_points: p.coarse_points,
            newton_tol: p.newton_tol,
            max_newton: p.max_newton,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseBlock {
    pub epsilon: f64,
    pub seed: u64,
    /// "standard" or "scaled".
    pub model: String,
}

impl Default for NoiseBlock {
    fn default() -> Self {
        Self {
            epsilon: 0.005,
            seed: 7,
            model: "standard".to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepBlock {
    pub row_axis: String,
    pub col_axis: String,
    pub row_grid: Option<GridBlock>,
    pub col_grid: Option<GridBlock>,
}

impl Default for SweepBlock {
    fn default() -> Self {
        Self {
            row_axis: "wavenumber".to_string(),
            col_axis: "standoff".to_string(),
            row_grid: None,
            col_grid: None,
        }
    }
}

/// Explicit grid values, or min/max/count with log or linear spacing.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridBlock {
    pub values: Option<Vec<f64>>,
    pub min: Option<f64>,
    pub max: Option<f64>,
    pub count: Option<usize>,
    pub spacing: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputBlock {
    pub directory: PathBuf,
    pub formats: Vec<String>,
}

impl Default for OutputBlock {
    fn default() -> Self {
        Self {
            directory: PathBuf::from("out"),
            formats: vec!["csv".to_string(), "json".to_string()],
        }
    }
}

/// Output file formats selectable per run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

impl Format {
    pub fn token(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Svg => "svg",
        }
    }
}

fn prefix_config(block: &str) -> impl Fn(Error) -> Error + '_ {
    move |e| match e {
        Error::Config(m) => Error::Config(format!("{block}: {m}")),
        other => other,
    }
}

impl RunConfig {
    /// Reads a config file, or yields the defaults when no path is given.
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        toml::from_str(&text)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn apply_overrides(
        &mut self,
        out: Option<&PathBuf>,
        seed: Option<u64>,
        formats: &[Format],
    ) {
        if let Some(out) = out {
            self.output.directory = out.clone();
        }
        if let Some(seed) = seed {
            self.noise.seed = seed;
        }
        if !formats.is_empty() {
            self.output.formats = formats.iter().map(|f| f.token().to_string()).collect();
        }
    }

    /// Builds the library problem, validating every block.
    pub fn problem(&self) -> Result<Problem> {
        let g = &self.geometry;
        let geometry = Geometry::new(g.a, g.r1, g.r2, g.theta1, g.theta2, g.far_radius)
            .map_err(prefix_config("geometry"))?;

        let d = &self.discretization;
        if d.n_a < 8 || !d.n_a.is_power_of_two() {
            return Err(Error::Config(format!(
                "discretization.n_a must be a power of two of at least 8, got {}",
                d.n_a
            )));
        }
        for (key, value) in [("n_arc1", d.n_arc1), ("n_R", d.n_far)] {
            if value < 8 {
                return Err(Error::Config(format!(
                    "discretization.{key} must be at least 8, got {value}"
                )));
            }
        }

        let p = &self.physics;
        if p.source != "point" {
            return Err(Error::Config(format!(
                "physics.source: unknown source kind \"{}\"; only \"point\" is supported",
                p.source
            )));
        }
        if !(p.k.is_finite() && p.k > 0.0) {
            return Err(Error::Config(format!(
                "physics.k must be positive and finite, got {}",
                p.k
            )));
        }
        if !(p.x0[0].is_finite() && p.x0[1].is_finite()) {
            return Err(Error::Config("physics.x0 must be finite".to_string()));
        }

        let r = &self.regularization;
        if !(r.delta.is_finite() && 0.0 < r.delta && r.delta < 1.0) {
            return Err(Error::Config(format!(
                "regularization.delta must lie in (0, 1), got {}",
                r.delta
            )));
        }
        let search = SearchParams {
            window: (r.alpha_min, r.alpha_max),
            coarse_points: r.coarse_points,
            newton_tol: r.newton_tol,
            max_newton: r.max_newton,
        };
        search.validate().map_err(prefix_config("regularization"))?;

        let n = &self.noise;
        if !(n.epsilon.is_finite() && n.epsilon >= 0.0) {
            return Err(Error::Config(format!(
                "noise.epsilon must be finite and nonnegative, got {}",
                n.epsilon
            )));
        }

        Ok(Problem {
            geometry,
            n_antenna: d.n_a,
            n_inner_arc: d.n_arc1,
            n_far: d.n_far,
            wavenumber: p.k,
            source_location: p.x0,
            delta: r.delta,
            epsilon: n.epsilon,
            seed: n.seed,
            noise_model: self.noise_model()?,
            search,
        })
    }

    pub fn noise_model(&self) -> Result<NoiseModel> {
        match self.noise.model.as_str() {
            "standard" => Ok(NoiseModel::Standard),
            "scaled" => Ok(NoiseModel::Scaled),
            other => Err(Error::Config(format!(
                "noise.model: unknown noise model \"{other}\"; \
                 accepted values are \"standard\" and \"scaled\""
            ))),
        }
    }

    pub fn sweep_spec(&self) -> Result<SweepSpec> {
        let base = self.problem()?;
        let row_axis = parse_axis(&self.sweep.row_axis, "sweep.row_axis")?;
        let col_axis = parse_axis(&self.sweep.col_axis, "sweep.col_axis")?;
        Ok(SweepSpec {
            base,
            rows: resolve_grid(row_axis, self.sweep.row_grid.as_ref(), "sweep.row_grid")?,
            cols: resolve_grid(col_axis, self.sweep.col_grid.as_ref(), "sweep.col_grid")?,
        })
    }

    pub fn formats(&self) -> Result<BTreeSet<Format>> {
        self.output
            .formats
            .iter()
            .map(|token| match token.as_str() {
                "csv" => Ok(Format::Csv),
                "json" => Ok(Format::Json),
                "svg" => Ok(Format::Svg),
                other => Err(Error::Config(format!(
                    "output.formats: unknown format \"{other}\"; \
                     accepted values are \"csv\", \"json\", \"svg\""
                ))),
            })
            .collect()
    }
}

pub fn parse_axis(token: &str, key: &str) -> Result<SweepAxis> {
    match token {
        "wavenumber" => Ok(SweepAxis::Wavenumber),
        "standoff" => Ok(SweepAxis::Standoff),
        "noise" => Ok(SweepAxis::Noise),
        "far_radius" => Ok(SweepAxis::FarRadius),
        other => Err(Error::Config(format!(
            "{key}: unknown axis \"{other}\"; accepted values are \
             \"wavenumber\", \"standoff\", \"noise\", \"far_radius\""
        ))),
    }
}

pub fn axis_token(axis: SweepAxis) -> &'static str {
    match axis {
        SweepAxis::Wavenumber => "wavenumber",
        SweepAxis::Standoff => "standoff",
        SweepAxis::Noise => "noise",
        SweepAxis::FarRadius => "far_radius",
    }
}

fn resolve_grid(axis: SweepAxis, block: Option<&GridBlock>, key: &str) -> Result<AxisGrid> {
    let Some(block) = block else {
        return Ok(AxisGrid::default_for(axis));
    };
    if let Some(values) = &block.values {
        if block.min.is_some()
            || block.max.is_some()
            || block.count.is_some()
            || block.spacing.is_some()
        {
            return Err(Error::Config(format!(
                "{key}: give either explicit values or min/max/count, not both"
            )));
        }
        if values.is_empty() {
            return Err(Error::Config(format!("{key}.values is empty")));
        }
        return Ok(AxisGrid {
            axis,
            values: values.clone(),
        });
    }
    let defaults = AxisGrid::default_for(axis);
    let min = block.min.unwrap_or(defaults.values[0]);
    let max = block.max.unwrap_or(*defaults.values.last().unwrap());
    let count = block.count.unwrap_or(defaults.values.len());
    let spacing = block.spacing.as_deref().unwrap_or(match axis {
        SweepAxis::FarRadius => "linear",
        _ => "log",
    });
    if count == 0 {
        return Err(Error::Config(format!("{key}.count must be positive")));
    }
    if !(min.is_finite() && max.is_finite() && (count == 1 || min < max)) {
        return Err(Error::Config(format!(
            "{key}: need finite min < max, got {min} and {max}"
        )));
    }
    let values = match spacing {
        "log" => {
            if min <= 0.0 {
                return Err(Error::Config(format!(
                    "{key}: log spacing needs min > 0, got {min}"
                )));
            }
            helmcloak::experiments::log_space(min, max, count)
        }
        "linear" => helmcloak::experiments::lin_space(min, max, count),
        other => {
            return Err(Error::Config(format!(
                "{key}.spacing: unknown spacing \"{other}\"; \
                 accepted values are \"log\" and \"linear\""
            )));
        }
    };
    Ok(AxisGrid { axis, values })
}
