//! End-to-end composition of one control problem: geometry, sampled
//! boundaries, the assembled operator with its factorization, incident
//! data, and the clean and noisy Morozov solves.
//!
//! The reference configuration (`Problem::baseline`) is the one every
//! frozen number in the test suite refers to: radiating circle a = 0.01,
//! control sector r ∈ [0.011, 0.015], theta ∈ [3 pi/4, 5 pi/4],
//! far circle R = 10, 256 samples per boundary driver, k = 10, point
//! source at (10^4, 0), delta = 0.02, epsilon = 0.005.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::Result;
use crate::fields::{add_noise, trace_point_source, IncidentField, NoiseModel, NoisyData};
use crate::geometry::{
    sample_antenna, sample_control, sample_far_circle, BoundarySamples, Geometry,
};
use crate::operator::{assemble_dft, weighted_norm, OperatorMatrix};
use crate::regularize::{morozov_find, MorozovSolution, SearchParams, SvdFactors};

/// Full parameter set of one control problem. Plain data: sweeps copy
/// and modify it freely.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Problem {
    pub geometry: Geometry,
    /// Mode count and sample count on the radiating circle (power of two).
    pub n_antenna: usize,
    /// Samples on the inner control arc; the other three pieces follow
    /// its spacing.
    pub n_inner_arc: usize,
    /// Samples on the far circle.
    pub n_far: usize,
    pub wavenumber: f64,
    pub source_location: [f64; 2],
    pub delta: f64,
    pub epsilon: f64,
    pub seed: u64,
    pub noise_model: NoiseModel,
    pub search: SearchParams,
}

impl Problem {
    /// The reference configuration described in the module doc.
    pub fn baseline() -> Self {
        use std::f64::consts::PI;
        Self {
            geometry: Geometry::new(
                0.01,
                0.011,
                0.015,
                3.0 * PI / 4.0,
                5.0 * PI / 4.0,
                10.0,
            )
            .expect("baseline geometry is valid"),
            n_antenna: 256,
            n_inner_arc: 256,
            n_far: 256,
            wavenumber: 10.0,
            source_location: [10000.0, 0.0],
            delta: 0.02,
            epsilon: 0.005,
            seed: 7,
            noise_model: NoiseModel::Standard,
            search: SearchParams::default(),
        }
    }

    /// Same problem with a coarser discretization, for tests that need
    /// the full pipeline but not the full matrix.
    pub fn coarse(self) -> Self {
        Self {
            n_antenna: 32,
            n_inner_arc: 16,
            n_far: 16,
            ..self
        }
    }

    pub fn with_wavenumber(mut self, k: f64) -> Self {
        self.wavenumber = k;
        self
    }

    pub fn with_standoff(mut self, d: f64) -> Result<Self> {
        self.geometry = self.geometry.with_standoff(d)?;
        Ok(self)
    }

    pub fn with_far_radius(mut self, r: f64) -> Result<Self> {
        self.geometry = self.geometry.with_far_radius(r)?;
        Ok(self)
    }

    pub fn incident(&self) -> IncidentField {
        IncidentField::PointSource {
            location: self.source_location,
            wavenumber: self.wavenumber,
        }
    }

    /// Samples the boundaries, assembles the operator on the FFT route,
    /// factors it, and traces the incident field on the control boundary.
    pub fn assemble(&self) -> Result<Assembly> {
        let antenna = sample_antenna(&self.geometry, self.n_antenna)?;
        let control = sample_control(&self.geometry, self.n_inner_arc)?;
        let far = sample_far_circle(&self.geometry, self.n_far)?;
        let operator = assemble_dft(&antenna, &control, &far, self.wavenumber)?;
        let factors = SvdFactors::compute(&operator);
        let f1 = trace_point_source(&self.incident(), &control)?;
        Ok(Assembly {
            antenna,
            control,
            far,
            operator,
            factors,
            f1,
        })
    }
}

/// Everything derived from a `Problem` that depends only on geometry,
/// discretization, and wavenumber; data and noise vary on top of it.
#[derive(Debug, Clone)]
pub struct Assembly {
    pub antenna: BoundarySamples,
    pub control: BoundarySamples,
    pub far: BoundarySamples,
    pub operator: OperatorMatrix,
    pub factors: SvdFactors,
    /// Incident-field trace on the control boundary (the clean data).
    pub f1: Vec<Complex64>,
}

impl Assembly {
    /// The clean data extended by the zero far-circle target.
    pub fn stacked(&self, near: &[Complex64]) -> Vec<Complex64> {
        let mut f = near.to_vec();
        f.resize(self.operator.n_near() + self.operator.n_far(), Complex64::ZERO);
        f
    }

    /// Weighted L2 norm of the clean control data.
    pub fn f1_norm(&self) -> f64 {
        weighted_norm(&self.f1, self.operator.near_weights())
    }

    /// Morozov solve against the clean data.
    pub fn solve_clean(&self, delta: f64, search: &SearchParams) -> Result<MorozovSolution> {
        morozov_find(
            &self.operator,
            &self.factors,
            &self.stacked(&self.f1),
            delta,
            search,
        )
    }

    /// Perturbs the data and solves; returns the realization alongside
    /// so callers can report the perturbation actually applied.
    pub fn solve_noisy(
        &self,
        delta: f64,
        epsilon: f64,
        seed: u64,
        model: NoiseModel,
        search: &SearchParams,
    ) -> Result<(MorozovSolution, NoisyData)> {
        let noisy = add_noise(
            &self.f1,
            &self.control.weights,
            epsilon,
            seed,
            model,
        );
        let solution = morozov_find(
            &self.operator,
            &self.factors,
            &self.stacked(&noisy.samples),
            delta,
            search,
        )?;
        Ok((solution, noisy))
    }

    /// Non-fatal conditions worth surfacing in output files: a source
    /// inside the far measurement circle, and a delta too large for the
    /// discrepancy-principle consistency condition
    /// delta^2 <= min(1 / (2 ‖f1‖²), 1 / (4 pi R)).
    pub fn warnings(&self, problem: &Problem) -> Vec<String> {
        let mut out = Vec::new();
        let src = problem.source_location;
        let src_radius = src[0].hypot(src[1]);
        if src_radius <= problem.geometry.far_radius() {
            out.push(format!(
                "source at ({}, {}) lies inside the far measurement circle R = {}; \
                 the far-field smallness target then competes with the data itself",
                src[0],
                src[1],
                problem.geometry.far_radius()
            ));
        }
        let f1_norm_sq = self.f1_norm().powi(2);
        let far_circumference: f64 = self.operator.far_weights().iter().sum();
        let limit = (1.0 / (2.0 * f1_norm_sq)).min(1.0 / (2.0 * far_circumference));
        if problem.delta * problem.delta > limit {
            out.push(format!(
                "delta^2 = {:.3e} exceeds the consistency limit {:.3e}; \
                 the discrepancy target may not be attainable",
                problem.delta * problem.delta,
                limit
            ));
        }
        out
    }
}
