//! Discrete double-layer operator mapping mode coefficients on the
//! radiating circle to field values on the control and far boundaries.
//!
//! The density on the circle is expanded as phi(tau) = sum_l h_l e^{il tau}
//! with n coefficients, and the field it radiates is
//!
//!   u(x) = integral over the circle of dPhi(x, y)/dnu_y phi(y) ds(y),
//!
//! where Phi is the outgoing 2D Helmholtz fundamental solution
//! (i/4) H0(k|x - y|). With the left-endpoint rule on the uniformly
//! sampled circle, the matrix entry for target j and mode l is a plain
//! length-n inverse DFT of the kernel row, so each row can be assembled
//! either by direct summation against a root-of-unity table or by an FFT.
//! Both routes are kept and must agree to roundoff; the FFT route is the
//! production path, the direct route is its check.
//!
//! Rows are ordered control samples first, then far-circle samples.
//! Weighted norms and the adjoint use the quadrature weights of those two
//! boundaries, so the discrete operator is faithful to the continuum one
//! between L2 spaces.

use std::f64::consts::TAU;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::geometry::BoundarySamples;
use crate::specfun;

/// Distances below this leave the kernel meaningless (the Hankel function
/// blows up logarithmically and the quadrature cannot see it); geometry
/// validation keeps real configurations far above it, so hitting this
/// indicates a coding error upstream rather than a borderline input.
pub const SINGULARITY_LIMIT: f64 = 1e-12;

/// Normal derivative of the outgoing fundamental solution,
/// dPhi/dnu_y = (ik/4) H0'(k r) ((y - x) . nu_y) / r with r = |x - y|
/// and H0' = -H1.
pub fn kernel(x: [f64; 2], y: [f64; 2], normal: [f64; 2], wavenumber: f64) -> Result<Complex64> {
    let dx = x[0] - y[0];
    let dy = x[1] - y[1];
    let r = dx.hypot(dy);
    if r < SINGULARITY_LIMIT {
        return Err(Error::Singularity {
            distance: r,
            limit: SINGULARITY_LIMIT,
        });
    }
    let dot = -(dx * normal[0] + dy * normal[1]) / r;
    let z = wavenumber * r;
    let h1 = Complex64::new(specfun::bessel_j1(z), specfun::bessel_y1(z));
    Ok(Complex64::new(0.0, 0.25 * wavenumber) * -h1 * dot)
}

/// Dense operator matrix with control rows stacked above far-circle rows,
/// together with the quadrature weights needed for weighted norms and the
/// adjoint.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    entries: DMatrix<Complex64>,
    n_near: usize,
    antenna_weight: f64,
    near_weights: Vec<f64>,
    far_weights: Vec<f64>,
    wavenumber: f64,
}

impl OperatorMatrix {
    /// Wraps a pre-assembled matrix. Panics when the block structure and
    /// weight vectors disagree; this constructor is for the assembly
    /// routines and for tests that build small operators by hand.
    pub fn from_parts(
        entries: DMatrix<Complex64>,
        n_near: usize,
        antenna_weight: f64,
        near_weights: Vec<f64>,
        far_weights: Vec<f64>,
        wavenumber: f64,
    ) -> Self {
        assert_eq!(
            near_weights.len(),
            n_near,
            "near weight count must match the near block"
        );
        assert_eq!(
            n_near + far_weights.len(),
            entries.nrows(),
            "rows must split into near and far blocks exactly"
        );
        assert!(
            antenna_weight > 0.0 && wavenumber > 0.0,
            "antenna weight and wavenumber must be positive"
        );
        assert!(
            near_weights.iter().chain(far_weights.iter()).all(|w| *w > 0.0),
            "quadrature weights must be positive"
        );
        Self {
            entries,
            n_near,
            antenna_weight,
            near_weights,
            far_weights,
            wavenumber,
        }
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    /// Number of control-boundary rows.
    pub fn n_near(&self) -> usize {
        self.n_near
    }

    pub fn n_far(&self) -> usize {
        self.entries.nrows() - self.n_near
    }

    /// Number of mode coefficients (columns).
    pub fn n_modes(&self) -> usize {
        self.entries.ncols()
    }

    pub fn near_block(&self) -> DMatrix<Complex64> {
        self.entries.rows(0, self.n_near).into_owned()
    }

    pub fn far_block(&self) -> DMatrix<Complex64> {
        self.entries.rows(self.n_near, self.n_far()).into_owned()
    }

    pub fn near_weights(&self) -> &[f64] {
        &self.near_weights
    }

    pub fn far_weights(&self) -> &[f64] {
        &self.far_weights
    }

    /// Uniform quadrature weight on the radiating circle, 2 pi a / n.
    pub fn antenna_weight(&self) -> f64 {
        self.antenna_weight
    }

    pub fn wavenumber(&self) -> f64 {
        self.wavenumber
    }

    /// Circumference of the radiating circle, recovered from the uniform
    /// weights; it is the constant in the coefficient-space inner product
    /// <h, g> = 2 pi a sum_l h_l conj(g_l).
    pub fn antenna_circumference(&self) -> f64 {
        self.antenna_weight * self.n_modes() as f64
    }

    /// Applies the operator to a coefficient vector, returning the stacked
    /// near-then-far field values. Panics on a length mismatch.
    pub fn apply(&self, coefficients: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(
            coefficients.len(),
            self.n_modes(),
            "coefficient vector length must equal the mode count"
        );
        let v = DVector::from_column_slice(coefficients);
        (&self.entries * v).data.into()
    }

    /// Weighted residual norms: the control-boundary L2 norm of `near_res`
    /// relative to `f1_norm`, and the average far amplitude, the far L2
    /// norm of `far_res` divided by sqrt of the far circumference. Panics
    /// when `f1_norm` is not positive.
    pub fn weighted_norms(
        &self,
        near_res: &[Complex64],
        far_res: &[Complex64],
        f1_norm: f64,
    ) -> (f64, f64) {
        assert!(f1_norm > 0.0, "reference norm must be positive");
        let near = weighted_norm(near_res, &self.near_weights);
        let far = weighted_norm(far_res, &self.far_weights);
        let far_circumference: f64 = self.far_weights.iter().sum();
        (near / f1_norm, far / far_circumference.sqrt())
    }

    /// Adjoint of the operator between the weighted L2 spaces:
    /// A* psi = (1 / 2 pi a) A^H (W psi), so that
    /// <A h, psi>_weighted = <h, A* psi> with the coefficient inner
    /// product 2 pi a sum h conj(g). Exact in floating point up to the
    /// usual accumulation error.
    pub fn adjoint_apply(&self, field: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(
            field.len(),
            self.entries.nrows(),
            "field vector length must equal near plus far sample count"
        );
        let weighted: Vec<Complex64> = field
            .iter()
            .zip(self.near_weights.iter().chain(self.far_weights.iter()))
            .map(|(v, w)| v * *w)
            .collect();
        let v = DVector::from_vec(weighted);
        let out = self.entries.ad_mul(&v) / Complex64::from(self.antenna_circumference());
        out.data.into()
    }
}

/// sqrt of sum_j w_j |v_j|^2. Panics on a length mismatch.
pub fn weighted_norm(values: &[Complex64], weights: &[f64]) -> f64 {
    assert_eq!(values.len(), weights.len(), "value and weight lengths differ");
    values
        .iter()
        .zip(weights)
        .map(|(v, w)| w * v.norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Evaluates the density phi(tau_m) = sum_l h_l e^{il tau_m} at the
/// antenna sample angles; an unnormalized inverse DFT of the coefficients.
pub fn synthesize_density(coefficients: &[Complex64]) -> Vec<Complex64> {
    let n = coefficients.len();
    let mut buf = coefficients.to_vec();
    FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
    buf
}

fn check_antenna(antenna: &BoundarySamples) -> Result<f64> {
    let n = antenna.len();
    if n < 8 || !n.is_power_of_two() {
        return Err(Error::Config(format!(
            "antenna sample count must be a power of two >= 8, got {n}"
        )));
    }
    Ok(antenna.weights[0])
}

fn kernel_row(
    target: [f64; 2],
    antenna: &BoundarySamples,
    weight: f64,
    wavenumber: f64,
) -> Result<Vec<Complex64>> {
    antenna
        .points
        .iter()
        .zip(&antenna.normals)
        .map(|(y, nu)| Ok(kernel(target, *y, *nu, wavenumber)? * weight))
        .collect()
}

fn assemble_rows<F>(
    antenna: &BoundarySamples,
    control: &BoundarySamples,
    far: &BoundarySamples,
    wavenumber: f64,
    transform: F,
) -> Result<OperatorMatrix>
where
    F: Fn(&mut Vec<Complex64>) + Sync,
{
    let weight = check_antenna(antenna)?;
    let targets: Vec<[f64; 2]> = control
        .points
        .iter()
        .chain(far.points.iter())
        .copied()
        .collect();
    let rows: Vec<Vec<Complex64>> = targets
        .par_iter()
        .map(|x| {
            let mut row = kernel_row(*x, antenna, weight, wavenumber)?;
            transform(&mut row);
            Ok(row)
        })
        .collect::<Result<_>>()?;
    let flat: Vec<Complex64> = rows.into_iter().flatten().collect();
    let entries = DMatrix::from_row_slice(targets.len(), antenna.len(), &flat);
    Ok(OperatorMatrix::from_parts(
        entries,
        control.len(),
        weight,
        control.weights.clone(),
        far.weights.clone(),
        wavenumber,
    ))
}

/// Assembles the operator by direct summation: entry (j, l) is
/// sum_m kernel(x_j, y_m) w e^{il tau_m}, accumulated against a
/// precomputed root-of-unity table indexed by l m mod n.
pub fn assemble_direct(
    antenna: &BoundarySamples,
    control: &BoundarySamples,
    far: &BoundarySamples,
    wavenumber: f64,
) -> Result<OperatorMatrix> {
    let n = antenna.len();
    let roots: Vec<Complex64> = (0..n)
        .map(|m| Complex64::from_polar(1.0, TAU * m as f64 / n as f64))
        .collect();
    let mask = n - 1;
    assemble_rows(antenna, control, far, wavenumber, |row| {
        let g = row.clone();
        for (l, out) in row.iter_mut().enumerate() {
            let mut acc = Complex64::ZERO;
            for (m, gm) in g.iter().enumerate() {
                acc += gm * roots[(l * m) & mask];
            }
            *out = acc;
        }
    })
}

/// Assembles the operator one unnormalized inverse FFT per row; the
/// production route, identical in exact arithmetic to `assemble_direct`.
pub fn assemble_dft(
    antenna: &BoundarySamples,
    control: &BoundarySamples,
    far: &BoundarySamples,
    wavenumber: f64,
) -> Result<OperatorMatrix> {
    let fft: Arc<dyn Fft<f64>> = FftPlanner::new().plan_fft_inverse(antenna.len());
    assemble_rows(antenna, control, far, wavenumber, move |row| {
        fft.process(row);
    })
}
