//! Real-argument Bessel functions of orders zero and one, and the Hankel
//! combinations the 2D radiating kernel needs.
//!
//! The kernel evaluates H0(x) = J0(x) + i Y0(x) and its derivative
//! H0'(x) = -(J1(x) + i Y1(x)) for arguments k|x - y| spanning roughly
//! 1e-4 to 1e6, with absolute accuracy 1e-10 promised over (0, 1e4].
//! Three evaluation regimes:
//!
//! * x <= 8: the defining power series in q = x^2/4, accumulated by term
//!   recurrence. Terms peak near 114 at x = 8, so cancellation costs at
//!   most ~1e-13 absolute. Y0 and Y1 use the harmonic-number log series.
//! * 8 < x <= 16: Chebyshev interpolants (Clenshaw evaluation) of the
//!   amplitude-phase functions P and Q in the variable t = (8/x)^2,
//!   combined through J = sqrt(2/(pi x)) (P cos chi - Q sin chi) and
//!   Y = sqrt(2/(pi x)) (P sin chi + Q cos chi) with chi = x - pi/4
//!   (order 0) or x - 3pi/4 (order 1). Coefficients live in
//!   [`cheb_tables`], generated offline against a 50-digit oracle.
//! * x > 16: the classical asymptotic expansions of P and Q, truncated
//!   where the terms stop shrinking; the first neglected term at x = 16
//!   is ~4e-14 and decays as x grows.
//!
//! Out-of-domain arguments are hard errors, never clamped: Y0/Y1 (and the
//! Hankel wrappers) panic for x <= 0, J0/J1 for x < 0. Callers guard
//! distances before reaching this module, so the panics are backstops for
//! programmer error rather than data errors. All functions are pure.

mod cheb_tables;

use std::f64::consts::PI;

use num_complex::Complex64;

/// Euler-Mascheroni constant, enters the Y-series.
const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Regime boundaries: power series below, Chebyshev between, asymptotic
/// expansion above.
const SERIES_CUTOFF: f64 = 8.0;
const CHEB_CUTOFF: f64 = 16.0;

/// Power-series accumulation stops once terms drop below this; at the
/// regime edge x = 8 that takes 25 terms, so the cap is a safety net.
const SERIES_TERM_FLOOR: f64 = 1e-20;
const SERIES_MAX_TERMS: usize = 48;

/// The asymptotic series for P and Q is truncated at its smallest term or
/// this many terms, whichever comes first. For x > 16 the terms shrink
/// monotonically throughout this range.
const ASYMP_MAX_TERMS: usize = 24;

/// Bessel function of the first kind, order zero.
///
/// # Panics
/// Panics for x < 0 or NaN (hard domain error, no clamping).
pub fn bessel_j0(x: f64) -> f64 {
    assert!(x >= 0.0, "bessel_j0: argument must be non-negative, got {x}");
    if x <= SERIES_CUTOFF {
        series_j0(x)
    } else if x <= CHEB_CUTOFF {
        cheb_jy(0, x).0
    } else {
        asymptotic_jy(0, x).0
    }
}

/// Bessel function of the second kind, order zero.
///
/// # Panics
/// Panics for x <= 0 or NaN (Y0 has a logarithmic singularity at the
/// origin and is not real for negative arguments).
pub fn bessel_y0(x: f64) -> f64 {
    assert!(x > 0.0, "bessel_y0: argument must be positive, got {x}");
    if x <= SERIES_CUTOFF {
        series_y0(x)
    } else if x <= CHEB_CUTOFF {
        cheb_jy(0, x).1
    } else {
        asymptotic_jy(0, x).1
    }
}

/// Bessel function of the first kind, order one.
///
/// # Panics
/// Panics for x < 0 or NaN.
pub fn bessel_j1(x: f64) -> f64 {
    assert!(x >= 0.0, "bessel_j1: argument must be non-negative, got {x}");
    if x <= SERIES_CUTOFF {
        series_j1(x)
    } else if x <= CHEB_CUTOFF {
        cheb_jy(1, x).0
    } else {
        asymptotic_jy(1, x).0
    }
}

/// Bessel function of the second kind, order one.
///
/// # Panics
/// Panics for x <= 0 or NaN.
pub fn bessel_y1(x: f64) -> f64 {
    assert!(x > 0.0, "bessel_y1: argument must be positive, got {x}");
    if x <= SERIES_CUTOFF {
        series_y1(x)
    } else if x <= CHEB_CUTOFF {
        cheb_jy(1, x).1
    } else {
        asymptotic_jy(1, x).1
    }
}

/// First-kind Hankel function of order zero, J0(x) + i Y0(x).
///
/// # Panics
/// Panics for x <= 0 or NaN.
pub fn hankel1_0(x: f64) -> Complex64 {
    assert!(x > 0.0, "hankel1_0: argument must be positive, got {x}");
    let (j, y) = jy(0, x);
    Complex64::new(j, y)
}

/// Derivative of the first-kind Hankel function of order zero,
/// H0'(x) = -H1(x) = -(J1(x) + i Y1(x)).
///
/// # Panics
/// Panics for x <= 0 or NaN.
pub fn hankel1_0_prime(x: f64) -> Complex64 {
    assert!(x > 0.0, "hankel1_0_prime: argument must be positive, got {x}");
    let (j, y) = jy(1, x);
    Complex64::new(-j, -y)
}

/// Both kinds at once for one order; saves a regime dispatch when the
/// caller needs the complex combination.
fn jy(order: usize, x: f64) -> (f64, f64) {
    if x <= SERIES_CUTOFF {
        if order == 0 {
            (series_j0(x), series_y0(x))
        } else {
            (series_j1(x), series_y1(x))
        }
    } else if x <= CHEB_CUTOFF {
        cheb_jy(order, x)
    } else {
        asymptotic_jy(order, x)
    }
}

fn series_j0(x: f64) -> f64 {
    let q = x * x / 4.0;
    let mut term = 1.0;
    let mut total = 1.0;
    for m in 1..=SERIES_MAX_TERMS {
        term *= -q / ((m * m) as f64);
        total += term;
        if term.abs() < SERIES_TERM_FLOOR {
            break;
        }
    }
    total
}

fn series_j1(x: f64) -> f64 {
    let q = x * x / 4.0;
    let mut term = x / 2.0;
    let mut total = term;
    for m in 1..=SERIES_MAX_TERMS {
        term *= -q / ((m * (m + 1)) as f64);
        total += term;
        if term.abs() < SERIES_TERM_FLOOR {
            break;
        }
    }
    total
}

/// Y0 = (2/pi) [(ln(x/2) + gamma) J0 - sum_{m>=1} (-1)^m H_m q^m / (m!)^2]
/// with H_m the m-th harmonic number.
fn series_y0(x: f64) -> f64 {
    let q = x * x / 4.0;
    let mut term = 1.0;
    let mut harmonic = 0.0;
    let mut total = 0.0;
    for m in 1..=SERIES_MAX_TERMS {
        term *= -q / ((m * m) as f64);
        harmonic += 1.0 / m as f64;
        total += term * harmonic;
        if term.abs() < SERIES_TERM_FLOOR {
            break;
        }
    }
    2.0 / PI * (((x / 2.0).ln() + EULER_GAMMA) * series_j0(x) - total)
}

/// Y1 = (2/pi)(ln(x/2) + gamma) J1 - 2/(pi x)
///      - (1/pi) sum_{m>=0} (-1)^m (H_m + H_{m+1}) (x/2)^{2m+1} / (m!(m+1)!).
fn series_y1(x: f64) -> f64 {
    let q = x * x / 4.0;
    let mut term = x / 2.0;
    let mut h_m = 0.0;
    let mut h_m1 = 1.0;
    let mut total = term * (h_m + h_m1);
    for m in 1..=SERIES_MAX_TERMS {
        term *= -q / ((m * (m + 1)) as f64);
        h_m = h_m1;
        h_m1 += 1.0 / (m + 1) as f64;
        total += term * (h_m + h_m1);
        if term.abs() < SERIES_TERM_FLOOR {
            break;
        }
    }
    2.0 / PI * ((x / 2.0).ln() + EULER_GAMMA) * series_j1(x) - 2.0 / (PI * x) - total / PI
}

/// Clenshaw evaluation of a Chebyshev series at xi in [-1, 1].
fn clenshaw(coeffs: &[f64], xi: f64) -> f64 {
    let mut b1 = 0.0;
    let mut b2 = 0.0;
    for &c in coeffs[1..].iter().rev() {
        let next = 2.0 * xi * b1 - b2 + c;
        b2 = b1;
        b1 = next;
    }
    xi * b1 - b2 + coeffs[0]
}

fn cheb_jy(order: usize, x: f64) -> (f64, f64) {
    let t = (8.0 / x) * (8.0 / x);
    // t runs over [0.25, 1] on this regime; map to the fit interval.
    let xi = (2.0 * t - 1.25) / 0.75;
    let (p, q) = if order == 0 {
        (
            clenshaw(&cheb_tables::CHEB_P0, xi),
            clenshaw(&cheb_tables::CHEB_Q0, xi),
        )
    } else {
        (
            clenshaw(&cheb_tables::CHEB_P1, xi),
            clenshaw(&cheb_tables::CHEB_Q1, xi),
        )
    };
    combine(order, x, p, q)
}

/// Large-argument expansion of the amplitude-phase functions:
/// P = 1 - t2 + t4 - ..., Q = t1 - t3 + ... with
/// t_k = t_{k-1} (mu - (2k-1)^2) / (8 k x), mu = 4 order^2.
fn asymptotic_jy(order: usize, x: f64) -> (f64, f64) {
    let mu = (4 * order * order) as f64;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0_f64;
    let mut prev = 1.0_f64;
    for k in 1..=ASYMP_MAX_TERMS {
        let odd = (2 * k - 1) as f64;
        term *= (mu - odd * odd) / (8.0 * k as f64 * x);
        if term.abs() >= prev {
            break;
        }
        prev = term.abs();
        match k % 4 {
            0 => p += term,
            1 => q += term,
            2 => p -= term,
            _ => q -= term,
        }
        if term.abs() < 1e-18 {
            break;
        }
    }
    combine(order, x, p, q)
}

/// (J, Y) from amplitude-phase parts: chi = x - (2 order + 1) pi/4.
fn combine(order: usize, x: f64, p: f64, q: f64) -> (f64, f64) {
    let chi = x - (2 * order + 1) as f64 * PI / 4.0;
    let (s, c) = chi.sin_cos();
    let scale = (2.0 / (PI * x)).sqrt();
    (scale * (p * c - q * s), scale * (p * s + q * c))
}
