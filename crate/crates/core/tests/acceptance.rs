//! Acceptance checks for the assembled system, one test per criterion.
//! Each prints a single `[acceptance] criterion N PASS` line; run with
//! `cargo test --test acceptance -- --nocapture` to see them all.

use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex64;

use helmcloak::experiments::{log_space, stability_check};
use helmcloak::geometry::{sample_antenna, sample_control, sample_far_circle};
use helmcloak::operator::{assemble_dft, assemble_direct};
use helmcloak::problem::Problem;
use helmcloak::regularize::{
    discrepancy, discrepancy_derivative, lemma_bounds_check, near_operator_norm,
    singular_spectrum, tikhonov_solve, MorozovSolution,
};
use helmcloak::specfun::{bessel_j0, bessel_j1, bessel_y0, bessel_y1, hankel1_0};

fn solve_baseline_noisy(problem: &Problem) -> (helmcloak::problem::Assembly, MorozovSolution) {
    let assembly = problem.assemble().expect("assembly");
    let (solution, _) = assembly
        .solve_noisy(
            problem.delta,
            problem.epsilon,
            problem.seed,
            problem.noise_model,
            &problem.search,
        )
        .expect("solve");
    (assembly, solution)
}

fn weighted_l2(values: &[Complex64], weight: f64) -> f64 {
    (weight * values.iter().map(|v| v.norm_sqr()).sum::<f64>()).sqrt()
}

#[test]
fn criterion_01_fft_assembly_matches_direct_assembly() {
    let problem = Problem::baseline();
    let antenna = sample_antenna(&problem.geometry, problem.n_antenna).unwrap();
    let control = sample_control(&problem.geometry, problem.n_inner_arc).unwrap();
    let far = sample_far_circle(&problem.geometry, problem.n_far).unwrap();
    let start = Instant::now();
    let direct = assemble_direct(&antenna, &control, &far, problem.wavenumber).unwrap();
    let fft = assemble_dft(&antenna, &control, &far, problem.wavenumber).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    let max_diff = direct
        .entries()
        .iter()
        .zip(fft.entries().iter())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0f64, f64::max);
    assert!(max_diff <= 1e-10, "assembly routes differ by {max_diff:e}");
    assert!(elapsed < 10.0, "assembly took {elapsed:.1}s");
    println!(
        "[acceptance] criterion 1 PASS: assembly routes agree to {max_diff:.2e} \
         ({elapsed:.2}s for both)"
    );
}

/// J0 by its power series; converges quickly for small arguments.
fn series_j0(x: f64) -> f64 {
    let q = -x * x / 4.0;
    let mut term = 1.0;
    let mut sum = 1.0;
    for m in 1..40 {
        term *= q / ((m * m) as f64);
        sum += term;
        if term.abs() < 1e-20 {
            break;
        }
    }
    sum
}

/// Y0 by its logarithmic series around the origin.
fn series_y0(x: f64) -> f64 {
    const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
    let q = x * x / 4.0;
    let mut term = 1.0;
    let mut harmonic = 0.0;
    let mut sum = 0.0;
    for m in 1..40 {
        term *= -q / ((m * m) as f64);
        harmonic += 1.0 / m as f64;
        sum -= term * harmonic;
        if term.abs() < 1e-20 {
            break;
        }
    }
    (2.0 / PI) * (((x / 2.0).ln() + EULER_GAMMA) * series_j0(x) + sum)
}

#[test]
fn criterion_02_bessel_wronskian_and_series_oracle() {
    let mut worst = 0.0f64;
    for i in 0..1000 {
        let x = 0.1 * 1000f64.powf(i as f64 / 999.0);
        let wronskian = bessel_j1(x) * bessel_y0(x) - bessel_j0(x) * bessel_y1(x);
        worst = worst.max((wronskian - 2.0 / (PI * x)).abs());
    }
    assert!(worst <= 1e-9, "worst Wronskian defect {worst:e}");

    let oracle = Complex64::new(series_j0(1.0), series_y0(1.0));
    let diff = (hankel1_0(1.0) - oracle).norm();
    assert!(diff <= 1e-10, "H0(1) differs from the series by {diff:e}");
    println!(
        "[acceptance] criterion 2 PASS: Wronskian defect {worst:.2e} on [0.1, 100], \
         H0(1) within {diff:.2e} of the series"
    );
}

#[test]
fn criterion_03_baseline_solve_hits_the_discrepancy_target() {
    let start = Instant::now();
    let problem = Problem::baseline();
    let (_, solution) = solve_baseline_noisy(&problem);
    let elapsed = start.elapsed().as_secs_f64();
    let defect = (solution.discrepancy - problem.delta * problem.delta).abs();
    assert!(defect <= 1e-8, "discrepancy defect {defect:e}");
    assert!(
        (0.018..=0.022).contains(&solution.near_rel),
        "near_rel {} outside [0.018, 0.022]",
        solution.near_rel
    );
    assert!(elapsed < 30.0, "solve took {elapsed:.1}s");
    println!(
        "[acceptance] criterion 3 PASS: |E - delta^2| = {defect:.2e}, \
         near_rel = {:.4} ({elapsed:.2}s)",
        solution.near_rel
    );
}

#[test]
fn criterion_04_selected_parameters_match_reference_magnitudes() {
    let anchors = [(1.0, 0.0021397), (96.0, 0.07278)];
    let mut summary = Vec::new();
    for (k, anchor) in anchors {
        let problem = Problem::baseline().with_wavenumber(k);
        let (_, solution) = solve_baseline_noisy(&problem);
        let ratio = solution.alpha / anchor;
        assert!(
            (1.0 / 3.0..=3.0).contains(&ratio),
            "alpha(k = {k}) = {} is off the reference {anchor} by factor {ratio:.2}",
            solution.alpha
        );
        summary.push(format!("alpha(k={k}) = {:.4e} ({ratio:.2}x)", solution.alpha));
    }
    println!("[acceptance] criterion 4 PASS: {}", summary.join(", "));
}

#[test]
fn criterion_05_noise_sensitivity_is_moderate_and_reproducible() {
    let run = || {
        let problem = Problem::baseline();
        let assembly = problem.assemble().unwrap();
        let clean = assembly
            .solve_clean(problem.delta, &problem.search)
            .unwrap();
        let (noisy, _) = assembly
            .solve_noisy(
                problem.delta,
                0.005,
                problem.seed,
                problem.noise_model,
                &problem.search,
            )
            .unwrap();
        let weight = assembly.operator.antenna_weight();
        let change: f64 = (weight
            * clean
                .phi_alpha
                .iter()
                .zip(&noisy.phi_alpha)
                .map(|(a, b)| (a - b).norm_sqr())
                .sum::<f64>())
        .sqrt()
            / weighted_l2(&clean.phi_alpha, weight);
        (noisy.alpha.to_bits(), change)
    };
    let (alpha_bits, change) = run();
    assert!(
        (0.02..=0.10).contains(&change),
        "relative density change {change} outside [0.02, 0.10]"
    );
    let (again_bits, again) = run();
    assert_eq!(alpha_bits, again_bits, "alpha changed between identical runs");
    assert_eq!(change.to_bits(), again.to_bits(), "change varies between runs");
    for threads in [1usize, 4] {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        let (bits, pooled) = pool.install(run);
        assert_eq!(bits, alpha_bits, "alpha varies with {threads} threads");
        assert_eq!(pooled.to_bits(), change.to_bits(), "change varies with threads");
    }
    println!(
        "[acceptance] criterion 5 PASS: relative density change {change:.4} at \
         epsilon = 0.005, bit-identical across reruns and thread counts"
    );
}

#[test]
fn criterion_06_spectrum_collapses_faster_at_larger_standoff() {
    let near = Problem::baseline();
    let far = Problem::baseline().with_standoff(1e-2).unwrap();
    let tail_ratio = |problem: &Problem| {
        let assembly = problem.assemble().unwrap();
        let sigma = singular_spectrum(&assembly.operator, 50);
        sigma[49] / sigma[0]
    };
    let ratio_near = tail_ratio(&near);
    let ratio_far = tail_ratio(&far);
    assert!(
        ratio_near > ratio_far,
        "sigma_50/sigma_1 must drop with standoff: {ratio_near:e} vs {ratio_far:e}"
    );
    println!(
        "[acceptance] criterion 6 PASS: sigma_50/sigma_1 = {ratio_near:.2e} at \
         d = 1e-3 vs {ratio_far:.2e} at d = 1e-2"
    );
}

#[test]
fn criterion_07_derivative_matches_finite_differences() {
    let problem = Problem::baseline();
    let assembly = problem.assemble().unwrap();
    let f = assembly.stacked(&assembly.f1);
    let n = assembly.operator.n_near();
    let mut worst = 0.0f64;
    for i in 0..20 {
        let alpha = 1e-4 * 1e3f64.powf(i as f64 / 19.0);
        let h = tikhonov_solve(&assembly.factors, &f, alpha);
        let exact = discrepancy_derivative(&assembly.operator, &assembly.factors, &f, &h, alpha);
        let step = 1e-5 * alpha;
        let up = tikhonov_solve(&assembly.factors, &f, alpha + step);
        let dn = tikhonov_solve(&assembly.factors, &f, alpha - step);
        let fd = (discrepancy(&assembly.operator, &f[..n], &f[n..], &up, 0.0)
            - discrepancy(&assembly.operator, &f[..n], &f[n..], &dn, 0.0))
            / (2.0 * step);
        let rel = (exact - fd).abs() / exact.abs();
        assert!(
            rel <= 1e-4,
            "alpha {alpha:.3e}: derivative {exact:e} vs finite difference {fd:e}"
        );
        worst = worst.max(rel);
    }
    println!(
        "[acceptance] criterion 7 PASS: derivative matches finite differences to \
         {worst:.2e} over alpha in [1e-4, 1e-1]"
    );
}

#[test]
fn criterion_08_adjoint_identity_holds_at_full_size() {
    let problem = Problem::baseline();
    let assembly = problem.assemble().unwrap();
    let op = &assembly.operator;
    let n = op.n_modes();
    let rows = op.n_near() + op.n_far();
    let weights: Vec<f64> = op
        .near_weights()
        .iter()
        .chain(op.far_weights())
        .copied()
        .collect();
    let mut state = 0x5851_f42d_4c95_7f2du64;
    let mut next = move || {
        state = state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    };
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let h: Vec<Complex64> = (0..n).map(|_| Complex64::new(next(), next())).collect();
        let psi: Vec<Complex64> = (0..rows).map(|_| Complex64::new(next(), next())).collect();
        let ah = op.apply(&h);
        let lhs: Complex64 = ah
            .iter()
            .zip(&psi)
            .zip(&weights)
            .map(|((u, p), w)| u * p.conj() * *w)
            .sum();
        let astar = op.adjoint_apply(&psi);
        let rhs: Complex64 = h
            .iter()
            .zip(&astar)
            .map(|(hl, gl)| hl * gl.conj() * op.antenna_circumference())
            .sum();
        let rel = (lhs - rhs).norm() / lhs.norm();
        assert!(rel <= 1e-10, "adjoint identity violated: {lhs} vs {rhs}");
        worst = worst.max(rel);
    }
    println!(
        "[acceptance] criterion 8 PASS: adjoint identity holds to {worst:.2e} \
         over 10 random pairs"
    );
}

#[test]
fn criterion_09_energy_bounds_hold_across_wavenumbers() {
    let mut summary = Vec::new();
    for k in [1.0, 10.0, 50.0, 100.0] {
        let problem = Problem::baseline().with_wavenumber(k);
        let (assembly, solution) = solve_baseline_noisy(&problem);
        let lemma = lemma_bounds_check(
            &solution,
            &assembly.f1,
            problem.delta,
            near_operator_norm(&assembly.operator),
        );
        assert!(lemma.applicable, "k = {k}: delta should be admissible");
        assert!(
            lemma.bound1_holds && lemma.bound2_holds,
            "k = {k}: bounds violated: {lemma:?}"
        );
        summary.push(format!(
            "k={k}: {:.3e} <= {:.3e}, alpha {:.3e} <= {:.3e}",
            lemma.data_norm, lemma.density_bound, lemma.alpha_value, lemma.alpha_bound
        ));
    }
    println!("[acceptance] criterion 9 PASS: {}", summary.join("; "));
}

#[test]
fn criterion_10_noise_stability_follows_a_sqrt_envelope() {
    let problem = Problem::baseline();
    let epsilons = log_space(1e-3, 1e-2, 5);
    let report = stability_check(&problem, &epsilons, &[1, 2, 3, 4, 5]).unwrap();
    assert!(report.skipped.is_empty(), "skipped: {:?}", report.skipped);
    assert_eq!(report.points.len(), 25);
    let envelope = report.envelope_constant.unwrap();
    for point in &report.points {
        assert!(
            point.change_vs_noisy <= envelope * point.epsilon.sqrt() * (1.0 + 1e-12),
            "point at eps {} exceeds the envelope",
            point.epsilon
        );
    }
    let slope = report.loglog_slope.unwrap();
    assert!(slope >= 0.5, "log-log slope {slope} below 0.5");
    assert!(report.bound_holds, "quadratic bound fails on its own fit set");
    println!(
        "[acceptance] criterion 10 PASS: A <= {envelope:.3} sqrt(eps) on 25 runs, \
         log-log slope {slope:.2}, quadratic bound constant {:.3e} (holds: {})",
        report.fitted_constant.unwrap(),
        report.bound_holds
    );
}

#[test]
fn criterion_11_far_field_stays_below_the_tolerance() {
    let problem = Problem::baseline();
    let (_, solution) = solve_baseline_noisy(&problem);
    assert!(
        solution.far_avg <= problem.delta,
        "far average {} exceeds delta {}",
        solution.far_avg,
        problem.delta
    );
    println!(
        "[acceptance] criterion 11 PASS: far-circle average {:.3e} <= delta {}",
        solution.far_avg, problem.delta
    );
}
