//! Parameter studies over the control problem: two-axis sweeps with
//! noise sensitivity, the monotonicity-threshold scan of E(alpha), the
//! noise-stability envelope, and singular-spectrum surveys.
//!
//! Everything here is deterministic given the base problem and its seed.
//! Per-cell noise seeds are derived from (seed, cell index) with a fixed
//! mixing function, and parallel execution never changes results: cells
//! are pure functions of their parameters and results are collected in
//! grid order.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::add_noise;
use crate::geometry::MIN_STANDOFF;
use crate::problem::Problem;
use crate::regularize::{
    discrepancy, morozov_find, near_operator_norm, singular_spectrum, tikhonov_solve,
};

/// Quantities a sweep can vary. `Standoff` moves the whole control
/// region with the gap d = r1 - a, preserving its thickness and angular
/// extent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    Wavenumber,
    Standoff,
    Noise,
    FarRadius,
}

/// One sweep axis with its grid values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisGrid {
    pub axis: SweepAxis,
    pub values: Vec<f64>,
}

impl AxisGrid {
    /// The default grid for an axis: wavenumber 0.1..100 (30 points,
    /// log), standoff 0.001..0.03 (20, log), noise 0.0005..0.015
    /// (15, log), far radius 2..20 (10, linear).
    pub fn default_for(axis: SweepAxis) -> Self {
        let values = match axis {
            SweepAxis::Wavenumber => log_space(0.1, 100.0, 30),
            SweepAxis::Standoff => log_space(1e-3, 0.03, 20),
            SweepAxis::Noise => log_space(5e-4, 0.015, 15),
            SweepAxis::FarRadius => lin_space(2.0, 20.0, 10),
        };
        Self { axis, values }
    }

    fn validate(&self, name: &str) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::Config(format!("{name}: grid is empty")));
        }
        for &v in &self.values {
            if !v.is_finite() {
                return Err(Error::Config(format!("{name}: grid value {v} not finite")));
            }
            let ok = match self.axis {
                SweepAxis::Wavenumber | SweepAxis::FarRadius => v > 0.0,
                SweepAxis::Standoff => v >= MIN_STANDOFF,
                SweepAxis::Noise => v >= 0.0,
            };
            if !ok {
                return Err(Error::Config(format!(
                    "{name}: grid value {v} out of range for {:?} axis",
                    self.axis
                )));
            }
        }
        Ok(())
    }
}

/// Logarithmically spaced grid, endpoints included.
pub fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && n >= 1, "log_space needs 0 < lo < hi");
    if n == 1 {
        return vec![lo];
    }
    (0..n)
        .map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64))
        .collect()
}

/// Linearly spaced grid, endpoints included.
pub fn lin_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(hi > lo && n >= 1, "lin_space needs lo < hi");
    if n == 1 {
        return vec![lo];
    }
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

/// A two-axis sweep over copies of a base problem.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSpec {
    pub base: Problem,
    pub rows: AxisGrid,
    pub cols: AxisGrid,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.rows.axis == self.cols.axis {
            return Err(Error::Config(format!(
                "sweep axes must differ, both are {:?}",
                self.rows.axis
            )));
        }
        self.rows.validate("sweep rows")?;
        self.cols.validate("sweep cols")
    }
}

/// Derived per-cell seed. Fixed mixing (splitmix64 finalizer) so that
/// output files citing (seed, cell index) stay reproducible across
/// versions and thread counts.
pub fn cell_seed(base: u64, index: u64) -> u64 {
    let mut z = base ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Solution statistics for one sweep cell. The clean solve of the same
/// cell (no perturbation) provides the sensitivity reference.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellStats {
    pub alpha: f64,
    pub alpha_clean: f64,
    pub near_rel: f64,
    pub far_avg: f64,
    pub phi_norm: f64,
    /// ‖phi_noisy - phi_clean‖ / ‖phi_clean‖ in the weighted L2 norm of
    /// the radiating circle.
    pub rel_sensitivity: f64,
    pub abs_sensitivity: f64,
    pub newton_iters: usize,
    pub bisection_fallback: bool,
    /// The derived seed this cell perturbed its data with.
    pub seed: u64,
}

/// Outcome of one cell; failures stay local to the cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum CellOutcome {
    Ok { stats: CellStats },
    Failed { message: String },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepCell {
    pub row_value: f64,
    pub col_value: f64,
    pub outcome: CellOutcome,
}

fn apply_axis(problem: Problem, axis: SweepAxis, value: f64) -> Result<Problem> {
    match axis {
        SweepAxis::Wavenumber => Ok(problem.with_wavenumber(value)),
        SweepAxis::Standoff => problem.with_standoff(value),
        SweepAxis::FarRadius => problem.with_far_radius(value),
        SweepAxis::Noise => {
            let mut p = problem;
            p.epsilon = value;
            Ok(p)
        }
    }
}

fn cell_problem(spec: &SweepSpec, i: usize, j: usize) -> Result<Problem> {
    let p = apply_axis(spec.base, spec.rows.axis, spec.rows.values[i])?;
    apply_axis(p, spec.cols.axis, spec.cols.values[j])
}

/// Key of everything the operator depends on; cells sharing it reuse
/// one assembly and factorization.
fn operator_key(p: &Problem) -> [u64; 7] {
    let g = &p.geometry;
    [
        g.antenna_radius().to_bits(),
        g.inner_radius().to_bits(),
        g.outer_radius().to_bits(),
        g.theta_start().to_bits(),
        g.theta_end().to_bits(),
        g.far_radius().to_bits(),
        p.wavenumber.to_bits(),
    ]
}

/// Weighted L2 distance between two densities on the radiating circle.
fn density_distance(a: &[Complex64], b: &[Complex64], weight: f64) -> f64 {
    assert_eq!(a.len(), b.len(), "density lengths differ");
    (weight
        * a.iter()
            .zip(b.iter())
            .map(|(x, y)| (x - y).norm_sqr())
            .sum::<f64>())
    .sqrt()
}

fn weighted_l2(a: &[Complex64], weight: f64) -> f64 {
    (weight * a.iter().map(|x| x.norm_sqr()).sum::<f64>()).sqrt()
}

/// Runs the sweep. Cells are grouped by shared operator (a noise axis
/// varies data only), groups run in parallel, and the result is in
/// row-major grid order regardless of scheduling.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepCell>> {
    spec.validate()?;
    let n_rows = spec.rows.values.len();
    let n_cols = spec.cols.values.len();

    let mut groups: BTreeMap<[u64; 7], Vec<usize>> = BTreeMap::new();
    let mut prep: Vec<std::result::Result<Problem, String>> = Vec::with_capacity(n_rows * n_cols);
    for i in 0..n_rows {
        for j in 0..n_cols {
            let index = i * n_cols + j;
            match cell_problem(spec, i, j) {
                Ok(p) => {
                    groups.entry(operator_key(&p)).or_default().push(index);
                    prep.push(Ok(p));
                }
                Err(e) => prep.push(Err(e.to_string())),
            }
        }
    }

    let group_list: Vec<Vec<usize>> = groups.into_values().collect();
    let solved: Vec<Vec<(usize, CellOutcome)>> = group_list
        .par_iter()
        .map(|indices| run_group(spec, &prep, indices))
        .collect();

    let mut outcomes: Vec<Option<CellOutcome>> = prep
        .iter()
        .map(|r| r.as_ref().err().map(|m| CellOutcome::Failed {
            message: m.clone(),
        }))
        .collect();
    for (index, outcome) in solved.into_iter().flatten() {
        outcomes[index] = Some(outcome);
    }

    Ok(outcomes
        .into_iter()
        .enumerate()
        .map(|(index, outcome)| SweepCell {
            row_value: spec.rows.values[index / n_cols],
            col_value: spec.cols.values[index % n_cols],
            outcome: outcome.expect("every cell resolved"),
        })
        .collect())
}

fn run_group(
    spec: &SweepSpec,
    prep: &[std::result::Result<Problem, String>],
    indices: &[usize],
) -> Vec<(usize, CellOutcome)> {
    let fail_all = |message: String| {
        indices
            .iter()
            .map(|&i| (i, CellOutcome::Failed { message: message.clone() }))
            .collect::<Vec<_>>()
    };
    let representative = prep[indices[0]].as_ref().expect("grouped cells are valid");
    let assembly = match representative.assemble() {
        Ok(a) => a,
        Err(e) => return fail_all(format!("assembly: {e}")),
    };
    let clean = match assembly.solve_clean(spec.base.delta, &spec.base.search) {
        Ok(s) => s,
        Err(e) => return fail_all(format!("clean solve: {e}")),
    };
    let weight = assembly.operator.antenna_weight();
    let clean_norm = weighted_l2(&clean.phi_alpha, weight);

    indices
        .iter()
        .map(|&index| {
            let p = prep[index].as_ref().expect("grouped cells are valid");
            let seed = cell_seed(spec.base.seed, index as u64);
            let outcome = match assembly.solve_noisy(
                p.delta,
                p.epsilon,
                seed,
                p.noise_model,
                &p.search,
            ) {
                Ok((noisy, _)) => {
                    let abs = density_distance(&noisy.phi_alpha, &clean.phi_alpha, weight);
                    CellOutcome::Ok {
                        stats: CellStats {
                            alpha: noisy.alpha,
                            alpha_clean: clean.alpha,
                            near_rel: noisy.near_rel,
                            far_avg: noisy.far_avg,
                            phi_norm: noisy.phi_norm,
                            rel_sensitivity: abs / clean_norm,
                            abs_sensitivity: abs,
                            newton_iters: noisy.newton_iters,
                            bisection_fallback: noisy.bisection_fallback,
                            seed,
                        },
                    }
                }
                Err(e) => CellOutcome::Failed {
                    message: format!("noisy solve: {e}"),
                },
            };
            (index, outcome)
        })
        .collect()
}

/// One row of the monotonicity-threshold table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PkRow {
    pub wavenumber: f64,
    /// E(alpha) is increasing for alpha >= 10^(-exponent).
    pub exponent: f64,
    /// Morozov parameter on the same noisy data, when the search finds
    /// a root.
    pub alpha: Option<f64>,
    /// E never decreased anywhere on the scan grid; the exponent is
    /// then the window floor.
    pub monotone_throughout: bool,
}

/// Default wavenumber rows for the threshold table: 1, 6, ..., 96.
pub fn default_pk_wavenumbers() -> Vec<f64> {
    (0..20).map(|i| 1.0 + 5.0 * i as f64).collect()
}

/// Locates the smallest grid point above the last decrease of `e`.
/// Returns (alpha_star, monotone_throughout).
fn pk_threshold(grid: &[f64], e: &[f64]) -> (f64, bool) {
    assert_eq!(grid.len(), e.len());
    let mut last_decrease = None;
    for i in 0..e.len() - 1 {
        if e[i + 1] < e[i] {
            last_decrease = Some(i);
        }
    }
    match last_decrease {
        Some(i) => (grid[i + 1], false),
        None => (grid[0], true),
    }
}

/// Scans E(alpha) on noisy data over a log grid (200 points per decade)
/// for each wavenumber and reports the exponent p_k such that E is
/// increasing on [10^(-p_k), window end], together with the Morozov
/// parameter of the same data.
pub fn pk_scan(
    base: &Problem,
    wavenumbers: &[f64],
    epsilon: f64,
    window: (f64, f64),
) -> Result<Vec<PkRow>> {
    if wavenumbers.is_empty() {
        return Err(Error::Config("pk scan: wavenumber list is empty".into()));
    }
    if !(window.0.is_finite() && window.1.is_finite() && 0.0 < window.0 && window.0 < window.1) {
        return Err(Error::Config(format!(
            "pk scan: invalid window ({}, {})",
            window.0, window.1
        )));
    }
    let decades = (window.1 / window.0).log10();
    let n_grid = (decades * 200.0).ceil() as usize + 1;
    let grid = log_space(window.0, window.1, n_grid);

    let mut rows = Vec::with_capacity(wavenumbers.len());
    for &k in wavenumbers {
        if !(k.is_finite() && k > 0.0) {
            return Err(Error::Config(format!("pk scan: invalid wavenumber {k}")));
        }
        let problem = base.with_wavenumber(k);
        let assembly = problem.assemble()?;
        // The same seed for every row, so rows differ only through the
        // operator and the data it acts on.
        let noisy = add_noise(
            &assembly.f1,
            &assembly.control.weights,
            epsilon,
            base.seed,
            base.noise_model,
        );
        let f = assembly.stacked(&noisy.samples);
        let n_near = assembly.operator.n_near();
        let e_values: Vec<f64> = grid
            .par_iter()
            .map(|&alpha| {
                let h = tikhonov_solve(&assembly.factors, &f, alpha);
                discrepancy(&assembly.operator, &f[..n_near], &f[n_near..], &h, 0.0)
            })
            .collect();
        let (alpha_star, monotone_throughout) = pk_threshold(&grid, &e_values);
        let alpha = morozov_find(
            &assembly.operator,
            &assembly.factors,
            &f,
            problem.delta,
            &problem.search,
        )
        .ok()
        .map(|s| s.alpha);
        rows.push(PkRow {
            wavenumber: k,
            exponent: -alpha_star.log10(),
            alpha,
            monotone_throughout,
        });
    }
    Ok(rows)
}

/// One perturbation realization in the stability study.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityPoint {
    pub epsilon: f64,
    pub seed: u64,
    /// A = ‖phi_noisy - phi_clean‖ / ‖phi_noisy‖, the measured relative
    /// change in the stability estimate's normalization.
    pub change_vs_noisy: f64,
    /// Same distance over ‖phi_clean‖.
    pub change_vs_clean: f64,
    pub alpha: f64,
    /// Quadratic stability bound evaluated with the fitted constant.
    pub bound_rhs: f64,
    /// Envelope bound C sqrt(epsilon) with the fitted envelope constant.
    pub sqrt_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityReport {
    pub points: Vec<StabilityPoint>,
    /// (epsilon, seed, message) of realizations whose Morozov search
    /// failed; they are excluded from the fits.
    pub skipped: Vec<(f64, u64, String)>,
    /// Clean Morozov parameter alpha_0.
    pub alpha_clean: f64,
    /// Operator norm of the control block, entering the quadratic bound.
    pub k1_norm: f64,
    /// max A / sqrt(epsilon) over the points.
    pub envelope_constant: Option<f64>,
    /// Smallest C for which the quadratic bound holds at every point.
    pub fitted_constant: Option<f64>,
    /// Least-squares slope of log A against log epsilon.
    pub loglog_slope: Option<f64>,
    pub bound_holds: bool,
}

/// Quadratic stability bound: with r = alpha_eps / alpha_0 - 1,
/// A <= ( |r| + sqrt(r^2 + 64 K^2 eps (2 delta + C delta eps + C eps)
///        / alpha_0) ) / 2.
fn quadratic_bound(r: f64, k_norm: f64, eps: f64, delta: f64, c: f64, alpha0: f64) -> f64 {
    let inner = r * r + 64.0 * k_norm * k_norm * eps * (2.0 * delta + c * eps * (delta + 1.0))
        / alpha0;
    0.5 * (r.abs() + inner.sqrt())
}

/// Measures the density change under perturbations of several sizes and
/// seeds against the clean solution, and fits both bound constants.
pub fn stability_check(
    base: &Problem,
    epsilons: &[f64],
    seeds: &[u64],
) -> Result<StabilityReport> {
    if epsilons.is_empty() || seeds.is_empty() {
        return Err(Error::Config("stability: empty epsilon or seed list".into()));
    }
    for &eps in epsilons {
        if !(eps.is_finite() && 0.0 < eps && eps <= 0.015) {
            return Err(Error::Config(format!(
                "stability: epsilon {eps} outside (0, 0.015]"
            )));
        }
    }
    let assembly = base.assemble()?;
    let clean = assembly.solve_clean(base.delta, &base.search)?;
    let weight = assembly.operator.antenna_weight();
    let clean_norm = weighted_l2(&clean.phi_alpha, weight);
    let k1_norm = near_operator_norm(&assembly.operator);

    let pairs: Vec<(f64, u64)> = epsilons
        .iter()
        .flat_map(|&e| seeds.iter().map(move |&s| (e, s)))
        .collect();
    let solved: Vec<std::result::Result<StabilityPoint, (f64, u64, String)>> = pairs
        .par_iter()
        .map(|&(eps, seed)| {
            match assembly.solve_noisy(base.delta, eps, seed, base.noise_model, &base.search) {
                Ok((noisy, _)) => {
                    let dist = density_distance(&noisy.phi_alpha, &clean.phi_alpha, weight);
                    Ok(StabilityPoint {
                        epsilon: eps,
                        seed,
                        change_vs_noisy: dist / weighted_l2(&noisy.phi_alpha, weight),
                        change_vs_clean: dist / clean_norm,
                        alpha: noisy.alpha,
                        bound_rhs: 0.0,
                        sqrt_bound: 0.0,
                    })
                }
                Err(e) => Err((eps, seed, e.to_string())),
            }
        })
        .collect();

    let mut points = Vec::new();
    let mut skipped = Vec::new();
    for r in solved {
        match r {
            Ok(p) => points.push(p),
            Err(s) => skipped.push(s),
        }
    }

    // Envelope constant: smallest C with A <= C sqrt(eps) everywhere.
    let envelope_constant = points
        .iter()
        .map(|p| p.change_vs_noisy / p.epsilon.sqrt())
        .fold(None, |acc: Option<f64>, v| Some(acc.map_or(v, |a| a.max(v))));

    // Quadratic constant: invert the bound at each point and take the
    // largest requirement; the bound is increasing in C, so it then
    // holds everywhere.
    let fitted_constant = points
        .iter()
        .map(|p| {
            let r = p.alpha / clean.alpha - 1.0;
            let a = p.change_vs_noisy;
            let lhs = (2.0 * a - r.abs()).max(0.0).powi(2) - r * r;
            let c = (clean.alpha * lhs / (64.0 * k1_norm * k1_norm * p.epsilon)
                - 2.0 * base.delta)
                / (p.epsilon * (base.delta + 1.0));
            c.max(0.0)
        })
        .fold(None, |acc: Option<f64>, v| Some(acc.map_or(v, |a| a.max(v))));

    if let (Some(c_env), Some(c_fit)) = (envelope_constant, fitted_constant) {
        for p in &mut points {
            let r = p.alpha / clean.alpha - 1.0;
            p.bound_rhs = quadratic_bound(r, k1_norm, p.epsilon, base.delta, c_fit, clean.alpha);
            p.sqrt_bound = c_env * p.epsilon.sqrt();
        }
    }
    let bound_holds = points
        .iter()
        .all(|p| p.change_vs_noisy <= p.bound_rhs * (1.0 + 1e-9));

    // Slope of log A over log eps, using mean A per epsilon.
    let loglog_slope = {
        let mut by_eps: BTreeMap<u64, (f64, usize)> = BTreeMap::new();
        for p in &points {
            if p.change_vs_noisy > 0.0 {
                let e = by_eps.entry(p.epsilon.to_bits()).or_insert((0.0, 0));
                e.0 += p.change_vs_noisy;
                e.1 += 1;
            }
        }
        let xy: Vec<(f64, f64)> = by_eps
            .into_iter()
            .map(|(bits, (sum, n))| (f64::from_bits(bits).ln(), (sum / n as f64).ln()))
            .collect();
        if xy.len() < 2 {
            None
        } else {
            let n = xy.len() as f64;
            let mx = xy.iter().map(|p| p.0).sum::<f64>() / n;
            let my = xy.iter().map(|p| p.1).sum::<f64>() / n;
            let num: f64 = xy.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
            let den: f64 = xy.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
            Some(num / den)
        }
    };

    Ok(StabilityReport {
        points,
        skipped,
        alpha_clean: clean.alpha,
        k1_norm,
        envelope_constant,
        fitted_constant,
        loglog_slope,
        bound_holds,
    })
}

/// Leading singular values at one standoff distance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumLine {
    pub standoff: f64,
    /// Up to the first 50 normalized singular values, descending.
    pub values: Vec<f64>,
}

/// Spectrum summary at one (standoff, wavenumber) pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SurfacePoint {
    pub standoff: f64,
    pub wavenumber: f64,
    pub sigma_first: f64,
    /// (sigma_1 - sigma_6) / sigma_1, a cheap proxy for how fast the
    /// spectrum falls off.
    pub gap_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SvdStudy {
    /// Spectra at the base wavenumber, one line per standoff.
    pub spectra: Vec<SpectrumLine>,
    /// Summary over the (standoff, wavenumber) grid, standoff-major.
    pub surface: Vec<SurfacePoint>,
}

/// Singular-value survey over standoff distances and wavenumbers.
pub fn svd_study(base: &Problem, standoffs: &[f64], wavenumbers: &[f64]) -> Result<SvdStudy> {
    if standoffs.is_empty() || wavenumbers.is_empty() {
        return Err(Error::Config("svd study: empty grid".into()));
    }
    for &d in standoffs {
        if !(d.is_finite() && d >= MIN_STANDOFF) {
            return Err(Error::Config(format!(
                "svd study: standoff {d} below the minimum {MIN_STANDOFF}"
            )));
        }
    }
    let spectra: Vec<SpectrumLine> = standoffs
        .par_iter()
        .map(|&d| {
            let problem = base.with_standoff(d)?;
            let assembly = problem.assemble()?;
            let count = 50.min(assembly.operator.n_modes());
            Ok(SpectrumLine {
                standoff: d,
                values: singular_spectrum(&assembly.operator, count),
            })
        })
        .collect::<Result<_>>()?;

    let pairs: Vec<(f64, f64)> = standoffs
        .iter()
        .flat_map(|&d| wavenumbers.iter().map(move |&k| (d, k)))
        .collect();
    let surface: Vec<SurfacePoint> = pairs
        .par_iter()
        .map(|&(d, k)| {
            if !(k.is_finite() && k > 0.0) {
                return Err(Error::Config(format!("svd study: invalid wavenumber {k}")));
            }
            let problem = base.with_standoff(d)?.with_wavenumber(k);
            let assembly = problem.assemble()?;
            let count = 6.min(assembly.operator.n_modes());
            let values = singular_spectrum(&assembly.operator, count);
            Ok(SurfacePoint {
                standoff: d,
                wavenumber: k,
                sigma_first: values[0],
                gap_ratio: (values[0] - values[values.len() - 1]) / values[0],
            })
        })
        .collect::<Result<_>>()?;

    Ok(SvdStudy { spectra, surface })
}
