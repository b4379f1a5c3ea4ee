//! Sampling of the three boundaries: the radiating circle, the
//! annular-sector control boundary, and the far measurement circle.
//!
//! Every sampler uses the left-endpoint rule: weights are piece length
//! divided by sample count, and each piece is traversed as a half-open
//! interval so shared corners of the closed control boundary appear
//! exactly once. The control boundary's inner arc carries `n_arc1`
//! samples; the other three pieces pick integer counts matching the
//! inner-arc spacing h = r1 (theta2 - theta1) / n_arc1 as closely as
//! possible, which keeps quadrature weights nearly constant around the
//! whole curve.

use std::f64::consts::TAU;

use serde::Serialize;

use crate::error::{Error, Result};

/// Points on the radiating circle may not approach the control region
/// closer than this; below it the collocation matrix is numerically
/// meaningless (near-singular kernel columns dominated by quadrature
/// error). Enforced with a hair of relative slack so a parameter grid
/// whose lowest point is exactly the floor survives roundoff.
pub const MIN_STANDOFF: f64 = 1e-3;

/// Radii and angles fixing the three boundaries.
///
/// The source is the circle of radius `antenna_radius` centered at the
/// origin. The control region is the annular sector
/// `inner_radius <= r <= outer_radius`, `theta_start <= theta <= theta_end`.
/// Far-field smallness is measured on the circle of radius `far_radius`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Geometry {
    antenna_radius: f64,
    inner_radius: f64,
    outer_radius: f64,
    theta_start: f64,
    theta_end: f64,
    far_radius: f64,
}

impl Geometry {
    /// Validates and builds a geometry. All error messages name the
    /// offending field.
    pub fn new(
        antenna_radius: f64,
        inner_radius: f64,
        outer_radius: f64,
        theta_start: f64,
        theta_end: f64,
        far_radius: f64,
    ) -> Result<Self> {
        let fields = [
            ("antenna radius a", antenna_radius),
            ("inner control radius r1", inner_radius),
            ("outer control radius r2", outer_radius),
            ("sector start theta1", theta_start),
            ("sector end theta2", theta_end),
            ("far radius R", far_radius),
        ];
        for (name, v) in fields {
            if !v.is_finite() {
                return Err(Error::Config(format!("{name} must be finite, got {v}")));
            }
        }
        if antenna_radius <= 0.0 {
            return Err(Error::Config(format!(
                "antenna radius a must be positive, got {antenna_radius}"
            )));
        }
        if inner_radius <= antenna_radius {
            return Err(Error::Config(format!(
                "inner control radius r1 = {inner_radius} must exceed antenna radius a = {antenna_radius}"
            )));
        }
        let standoff = inner_radius - antenna_radius;
        if standoff < MIN_STANDOFF * (1.0 - 1e-9) {
            return Err(Error::Config(format!(
                "standoff r1 - a = {standoff:e} is below the numerical floor {MIN_STANDOFF:e}"
            )));
        }
        if outer_radius <= inner_radius {
            return Err(Error::Config(format!(
                "outer control radius r2 = {outer_radius} must exceed r1 = {inner_radius}"
            )));
        }
        if far_radius <= outer_radius {
            return Err(Error::Config(format!(
                "far radius R = {far_radius} must exceed r2 = {outer_radius}"
            )));
        }
        let extent = theta_end - theta_start;
        if extent <= 0.0 {
            return Err(Error::Config(format!(
                "sector angles must satisfy theta1 < theta2, got [{theta_start}, {theta_end}]"
            )));
        }
        if extent > TAU {
            return Err(Error::Config(format!(
                "sector extent theta2 - theta1 = {extent} exceeds a full turn"
            )));
        }
        Ok(Self {
            antenna_radius,
            inner_radius,
            outer_radius,
            theta_start,
            theta_end,
            far_radius,
        })
    }

    pub fn antenna_radius(&self) -> f64 {
        self.antenna_radius
    }

    pub fn inner_radius(&self) -> f64 {
        self.inner_radius
    }

    pub fn outer_radius(&self) -> f64 {
        self.outer_radius
    }

    pub fn theta_start(&self) -> f64 {
        self.theta_start
    }

    pub fn theta_end(&self) -> f64 {
        self.theta_end
    }

    pub fn far_radius(&self) -> f64 {
        self.far_radius
    }

    /// Gap between the radiating circle and the control region, r1 - a.
    pub fn standoff(&self) -> f64 {
        self.inner_radius - self.antenna_radius
    }

    /// Same sector shape (thickness and angular extent) moved so the gap
    /// to the radiating circle becomes `standoff`.
    pub fn with_standoff(&self, standoff: f64) -> Result<Self> {
        let thickness = self.outer_radius - self.inner_radius;
        Self::new(
            self.antenna_radius,
            self.antenna_radius + standoff,
            self.antenna_radius + standoff + thickness,
            self.theta_start,
            self.theta_end,
            self.far_radius,
        )
    }

    /// Same geometry with the far circle moved to radius `far_radius`.
    pub fn with_far_radius(&self, far_radius: f64) -> Result<Self> {
        Self::new(
            self.antenna_radius,
            self.inner_radius,
            self.outer_radius,
            self.theta_start,
            self.theta_end,
            far_radius,
        )
    }

    /// Analytic perimeter of the control boundary,
    /// (r1 + r2)(theta2 - theta1) + 2(r2 - r1).
    pub fn control_perimeter(&self) -> f64 {
        let extent = self.theta_end - self.theta_start;
        (self.inner_radius + self.outer_radius) * extent
            + 2.0 * (self.outer_radius - self.inner_radius)
    }
}

/// Quadrature samples of one boundary: points, outward unit normals,
/// positive arc-length weights, and the curve parameter of each sample
/// (the angle on circles and arcs, the radius on radial segments).
#[derive(Debug, Clone, PartialEq)]
pub struct BoundarySamples {
    pub points: Vec<[f64; 2]>,
    pub normals: Vec<[f64; 2]>,
    pub weights: Vec<f64>,
    pub params: Vec<f64>,
}

impl BoundarySamples {
    fn with_capacity(n: usize) -> Self {
        Self {
            points: Vec::with_capacity(n),
            normals: Vec::with_capacity(n),
            weights: Vec::with_capacity(n),
            params: Vec::with_capacity(n),
        }
    }

    fn push(&mut self, point: [f64; 2], normal: [f64; 2], weight: f64, param: f64) {
        self.points.push(point);
        self.normals.push(normal);
        self.weights.push(weight);
        self.params.push(param);
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Sum of quadrature weights; equals the boundary length up to
    /// floating-point accumulation.
    pub fn perimeter(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// Samples the radiating circle at tau_j = 2 pi j / n, j = 0..n-1.
///
/// The sample count must be a power of two at least 8: the mode basis on
/// this circle is resolved with a DFT whose length is the sample count.
/// Weights are 2 pi a / n each (the circle jacobian is the constant a).
pub fn sample_antenna(geom: &Geometry, n: usize) -> Result<BoundarySamples> {
    if n < 8 || !n.is_power_of_two() {
        return Err(Error::Config(format!(
            "antenna sample count n_a must be a power of two >= 8, got {n}"
        )));
    }
    let a = geom.antenna_radius();
    let weight = TAU * a / n as f64;
    let mut out = BoundarySamples::with_capacity(n);
    for j in 0..n {
        let tau = TAU * j as f64 / n as f64;
        let (sin, cos) = tau.sin_cos();
        out.push([a * cos, a * sin], [cos, sin], weight, tau);
    }
    Ok(out)
}

/// Samples the closed control boundary as four half-open pieces, traversed
/// inner arc (theta1 -> theta2), radial edge at theta2 (r1 -> r2), outer
/// arc (theta2 -> theta1), radial edge at theta1 (r2 -> r1). Normals point
/// out of the annular sector. `n_arc1` fixes the inner-arc count; the
/// other pieces round their counts to match its spacing.
pub fn sample_control(geom: &Geometry, n_arc1: usize) -> Result<BoundarySamples> {
    if n_arc1 < 8 {
        return Err(Error::Config(format!(
            "inner-arc sample count n_arc1 must be at least 8, got {n_arc1}"
        )));
    }
    let r1 = geom.inner_radius();
    let r2 = geom.outer_radius();
    let t1 = geom.theta_start();
    let t2 = geom.theta_end();
    let extent = t2 - t1;

    let spacing = r1 * extent / n_arc1 as f64;
    let radial_len = r2 - r1;
    let n_radial = ((radial_len / spacing).round() as usize).max(1);
    let n_arc2 = ((r2 * extent / spacing).round() as usize).max(1);

    let mut out =
        BoundarySamples::with_capacity(n_arc1 + n_arc2 + 2 * n_radial);

    // Inner arc, theta1 -> theta2 (excludes theta2); outward normal of the
    // sector points toward the origin here.
    let w_arc1 = r1 * extent / n_arc1 as f64;
    for j in 0..n_arc1 {
        let theta = t1 + extent * j as f64 / n_arc1 as f64;
        let (sin, cos) = theta.sin_cos();
        out.push([r1 * cos, r1 * sin], [-cos, -sin], w_arc1, theta);
    }

    // Radial edge at theta2, r1 -> r2 (includes the corner (r1, theta2),
    // excludes (r2, theta2)); outward normal is +theta_hat(theta2).
    let (sin2, cos2) = t2.sin_cos();
    let w_rad = radial_len / n_radial as f64;
    for j in 0..n_radial {
        let r = r1 + radial_len * j as f64 / n_radial as f64;
        out.push([r * cos2, r * sin2], [-sin2, cos2], w_rad, r);
    }

    // Outer arc, theta2 -> theta1 reversed (includes (r2, theta2),
    // excludes (r2, theta1)); outward normal is radial.
    let w_arc2 = r2 * extent / n_arc2 as f64;
    for j in 0..n_arc2 {
        let theta = t2 - extent * j as f64 / n_arc2 as f64;
        let (sin, cos) = theta.sin_cos();
        out.push([r2 * cos, r2 * sin], [cos, sin], w_arc2, theta);
    }

    // Radial edge at theta1, r2 -> r1 (includes (r2, theta1), excludes
    // (r1, theta1), which opened the inner arc); outward normal is
    // -theta_hat(theta1).
    let (sin1, cos1) = t1.sin_cos();
    for j in 0..n_radial {
        let r = r2 - radial_len * j as f64 / n_radial as f64;
        out.push([r * cos1, r * sin1], [sin1, -cos1], w_rad, r);
    }

    Ok(out)
}

/// Samples the far measurement circle at n equally spaced angles starting
/// from zero; weights 2 pi R / n.
pub fn sample_far_circle(geom: &Geometry, n: usize) -> Result<BoundarySamples> {
    if n < 8 {
        return Err(Error::Config(format!(
            "far-circle sample count n_R must be at least 8, got {n}"
        )));
    }
    let r = geom.far_radius();
    let weight = TAU * r / n as f64;
    let mut out = BoundarySamples::with_capacity(n);
    for j in 0..n {
        let theta = TAU * j as f64 / n as f64;
        let (sin, cos) = theta.sin_cos();
        out.push([r * cos, r * sin], [cos, sin], weight, theta);
    }
    Ok(out)
}
