#!/usr/bin/env python3
"""Generate coefficient tables and reference data for the Bessel backend.

Produces two Rust source files:

  crates/core/src/specfun/cheb_tables.rs
      Chebyshev coefficients for the amplitude-phase functions
      P0, Q0, P1, Q1 on the middle regime x in (8, 16], fitted in the
      variable t = (8/x)^2, mapped to xi = (2t - 1.25)/0.75 in [-1, 1].

  crates/core/tests/bessel_reference.rs
      Frozen high-precision J0/Y0/J1/Y1 values (mpmath, 50 digits) on a
      log grid over (1e-3, 1e4] plus branch-edge and large-argument
      probes, embedded as a table the integration test checks against.

The script also self-verifies, before freezing anything:
  * the power-series formulas used by the Rust implementation for x <= 8
    (term recurrences, harmonic-number series for Y0/Y1);
  * the asymptotic P/Q term recurrence used for x > 16;
  * float64 reconstruction of J/Y from the fitted Chebyshev tables on a
    dense grid (reported max abs error must be < 1e-12).

Run from the repo root:  python3 tools/gen_specfun_tables.py
"""

import math
import sys

import mpmath as mp

mp.mp.dps = 50

GAMMA = mp.euler

# Middle regime bounds (in x) and the fit variable t = (8/x)^2.
X_LO, X_HI = 8.0, 16.0
T_LO, T_HI = (8.0 / X_HI) ** 2, (8.0 / X_LO) ** 2  # [0.25, 1.0]
NODES = 40
COEFF_CUTOFF = mp.mpf("1e-18")


def chi(order, x):
    return x - (2 * order + 1) * mp.pi / 4


def amp_phase(order, x):
    """P, Q with J = sqrt(2/(pi x)) (P cos chi - Q sin chi), etc."""
    x = mp.mpf(x)
    c = chi(order, x)
    j = mp.besselj(order, x)
    y = mp.bessely(order, x)
    scale = mp.sqrt(mp.pi * x / 2)
    p = scale * (j * mp.cos(c) + y * mp.sin(c))
    q = scale * (y * mp.cos(c) - j * mp.sin(c))
    return p, q


def p_of_t(order, t):
    x = 8 / mp.sqrt(t)
    return amp_phase(order, x)[0]


def q_of_t(order, t):
    x = 8 / mp.sqrt(t)
    return amp_phase(order, x)[1]


def cheb_fit(fn, n_nodes):
    """Chebyshev interpolation coefficients of fn(t) on [T_LO, T_HI]."""
    lo, hi = mp.mpf(T_LO), mp.mpf(T_HI)
    nodes_xi = [mp.cos(mp.pi * (i + mp.mpf("0.5")) / n_nodes) for i in range(n_nodes)]
    nodes_t = [(xi + 1) / 2 * (hi - lo) + lo for xi in nodes_xi]
    vals = [fn(t) for t in nodes_t]
    coeffs = []
    for k in range(n_nodes):
        s = mp.mpf(0)
        for i in range(n_nodes):
            s += vals[i] * mp.cos(mp.pi * k * (i + mp.mpf("0.5")) / n_nodes)
        coeffs.append(2 * s / n_nodes)
    coeffs[0] /= 2
    return coeffs


def trim(coeffs):
    n = len(coeffs)
    while n > 1 and abs(coeffs[n - 1]) < COEFF_CUTOFF:
        n -= 1
    return coeffs[:n]


def clenshaw(coeffs, xi):
    b1 = b2 = 0.0
    for c in reversed(coeffs[1:]):
        b1, b2 = 2.0 * xi * b1 - b2 + c, b1
    return xi * b1 - b2 + coeffs[0]


# ---------------------------------------------------------------------------
# Self-checks of the formulas the Rust code hand-implements.
# ---------------------------------------------------------------------------


def series_j0(x):
    q = x * x / 4.0
    term, total = 1.0, 1.0
    for m in range(1, 60):
        term *= -q / (m * m)
        total += term
        if abs(term) < 1e-20:
            break
    return total


def series_j1(x):
    q = x * x / 4.0
    term, total = x / 2.0, x / 2.0
    for m in range(1, 60):
        term *= -q / (m * (m + 1))
        total += term
        if abs(term) < 1e-20:
            break
    return total


def series_y0(x):
    q = x * x / 4.0
    term, h, total = 1.0, 0.0, 0.0
    for m in range(1, 60):
        term *= -q / (m * m)
        h += 1.0 / m
        total += term * h
        if abs(term) < 1e-20:
            break
    g = float(GAMMA)
    return 2.0 / math.pi * ((math.log(x / 2.0) + g) * series_j0(x) - total)


def series_y1(x):
    q = x * x / 4.0
    g = float(GAMMA)
    # sum over m >= 0 of (-1)^m (H_m + H_{m+1}) (x/2)^{2m+1} / (m! (m+1)!)
    term = x / 2.0  # magnitude of the m-th power/factorial factor
    hm, hm1 = 0.0, 1.0
    total = term * (hm + hm1)
    for m in range(1, 60):
        term *= -q / (m * (m + 1))
        hm = hm1
        hm1 += 1.0 / (m + 1)
        total += term * (hm + hm1)
        if abs(term) < 1e-20:
            break
    return (
        2.0 / math.pi * (math.log(x / 2.0) + g) * series_j1(x)
        - 2.0 / (math.pi * x)
        - total / math.pi
    )


def asymptotic_pq(order, x, max_terms=24):
    mu = 4.0 * order * order
    p, q = 1.0, 0.0
    term = 1.0
    prev = abs(term)
    for k in range(1, max_terms + 1):
        term *= (mu - (2 * k - 1) ** 2) / (8.0 * k * x)
        if abs(term) >= prev:
            break
        prev = abs(term)
        r = k % 4
        if r == 0:
            p += term
        elif r == 1:
            q += term
        elif r == 2:
            p -= term
        else:
            q -= term
        if abs(term) < 1e-18:
            break
    return p, q


def asymptotic_jy(order, x):
    p, q = asymptotic_pq(order, x)
    c = float(chi(order, mp.mpf(x)))
    scale = math.sqrt(2.0 / (math.pi * x))
    j = scale * (p * math.cos(c) - q * math.sin(c))
    y = scale * (p * math.sin(c) + q * math.cos(c))
    return j, y


def check(label, got, want, tol):
    err = abs(got - float(want))
    status = "ok" if err <= tol else "FAIL"
    print(f"  {label:34s} err {err:9.2e}  [{status}]")
    return err <= tol


def self_check():
    ok = True
    print("power series vs mpmath (x <= 8):")
    for x in (0.001, 0.5, 1.0, 3.0, 5.5, 8.0):
        ok &= check(f"J0({x})", series_j0(x), mp.besselj(0, x), 5e-13)
        ok &= check(f"Y0({x})", series_y0(x), mp.bessely(0, x), 5e-13)
        ok &= check(f"J1({x})", series_j1(x), mp.besselj(1, x), 5e-13)
        ok &= check(f"Y1({x})", series_y1(x), mp.bessely(1, x), 5e-13)
    print("asymptotic P/Q recurrence vs mpmath (x > 16):")
    for x in (16.0, 20.0, 50.0, 300.0, 1e4):
        j0, y0 = asymptotic_jy(0, x)
        j1, y1 = asymptotic_jy(1, x)
        ok &= check(f"J0({x})", j0, mp.besselj(0, x), 2e-13)
        ok &= check(f"Y0({x})", y0, mp.bessely(0, x), 2e-13)
        ok &= check(f"J1({x})", j1, mp.besselj(1, x), 2e-13)
        ok &= check(f"Y1({x})", y1, mp.bessely(1, x), 2e-13)
    return ok


# ---------------------------------------------------------------------------
# Emission
# ---------------------------------------------------------------------------


def fmt_f64(v):
    """Shortest float64 literal that round-trips."""
    f = float(v)
    s = repr(f)
    if "e" not in s and "." not in s and "inf" not in s and "nan" not in s:
        s += ".0"
    return s


def rust_array(name, values, doc):
    lines = [f"/// {doc}", f"pub const {name}: [f64; {len(values)}] = ["]
    for v in values:
        lines.append(f"    {fmt_f64(v)},")
    lines.append("];\n")
    return "\n".join(lines)


def emit_cheb_tables(path, fits):
    head = (
        "//! Chebyshev coefficient tables for the middle-regime Bessel\n"
        "//! evaluation, x in (8, 16].\n"
        "//!\n"
        "//! The amplitude-phase functions P0, Q0, P1, Q1 (defined by\n"
        "//! `J_n = sqrt(2/(pi x)) (P_n cos chi_n - Q_n sin chi_n)` and\n"
        "//! `Y_n = sqrt(2/(pi x)) (P_n sin chi_n + Q_n cos chi_n)` with\n"
        "//! `chi_n = x - (2n+1) pi/4`) are smooth on this interval in the\n"
        "//! variable `t = (8/x)^2`, and the tables below are Chebyshev\n"
        "//! interpolants in `xi = (2 t - 1.25) / 0.75`, evaluated with the\n"
        "//! Clenshaw recurrence.\n"
        "//!\n"
        "//! Generated by tools/gen_specfun_tables.py; do not edit by hand.\n\n"
    )
    body = []
    for name, coeffs, err in fits:
        doc = (
            f"Chebyshev coefficients of {name[4:].upper()} in xi; "
            f"float64 fit residual <= {err:.1e} on a dense grid."
        )
        body.append(rust_array(name.upper(), coeffs, doc))
    with open(path, "w") as f:
        f.write(head + "\n".join(body))
    print(f"wrote {path}")


def emit_reference_tests(path, rows, spot):
    head = (
        "//! Frozen reference values for the Bessel backend.\n"
        "//!\n"
        "//! Values computed with mpmath at 50 significant digits by\n"
        "//! tools/gen_specfun_tables.py and rounded to float64; do not edit\n"
        "//! by hand. The grid covers the full supported argument range with\n"
        "//! extra probes at the evaluation-regime boundaries (x = 8, 16) and\n"
        "//! at large arguments where trigonometric argument reduction\n"
        "//! dominates the error budget.\n\n"
        "use helmcloak::specfun;\n\n"
        "/// (x, J0, Y0, J1, Y1)\n"
    )
    lines = [head]
    lines.append(f"const REFERENCE: [(f64, f64, f64, f64, f64); {len(rows)}] = [")
    for x, j0, y0, j1, y1 in rows:
        lines.append(
            f"    ({fmt_f64(x)}, {fmt_f64(j0)}, {fmt_f64(y0)}, "
            f"{fmt_f64(j1)}, {fmt_f64(y1)}),"
        )
    lines.append("];\n")
    lines.append(
        """
/// Absolute accuracy promised by the backend over (0, 1e4].
const ABS_TOL: f64 = 1e-10;

#[test]
fn reference_table_within_tolerance() {
    let mut worst: f64 = 0.0;
    for &(x, j0, y0, j1, y1) in REFERENCE.iter() {
        let ej0 = (specfun::bessel_j0(x) - j0).abs();
        let ey0 = (specfun::bessel_y0(x) - y0).abs();
        let ej1 = (specfun::bessel_j1(x) - j1).abs();
        let ey1 = (specfun::bessel_y1(x) - y1).abs();
        for (name, err) in [("J0", ej0), ("Y0", ey0), ("J1", ej1), ("Y1", ey1)] {
            assert!(
                err <= ABS_TOL,
                "{name}({x}) off by {err:.3e} (tolerance {ABS_TOL:.0e})"
            );
        }
        worst = worst.max(ej0).max(ey0).max(ej1).max(ey1);
    }
    // The backend actually does much better than the contract; if this
    // starts creeping up, a regime boundary regressed.
    assert!(worst <= 5e-12, "worst reference error grew to {worst:.3e}");
}

#[test]
fn published_four_digit_anchors() {
    // Widely published 10-digit values at x = 1, e.g. Abramowitz & Stegun.
"""
    )
    for name, func, val in spot:
        lines.append(
            f"    assert!((specfun::{func}(1.0) - ({val})).abs() < 5e-11);"
        )
    lines.append(
        """}

#[test]
fn hankel_assembles_from_parts() {
    for &(x, j0, y0, j1, y1) in REFERENCE.iter() {
        let h = specfun::hankel1_0(x);
        assert!((h.re - j0).abs() <= ABS_TOL && (h.im - y0).abs() <= ABS_TOL);
        let hp = specfun::hankel1_0_prime(x);
        assert!((hp.re + j1).abs() <= ABS_TOL && (hp.im + y1).abs() <= ABS_TOL);
    }
}
"""
    )
    with open(path, "w") as f:
        f.write("\n".join(lines))
    print(f"wrote {path}")


def main():
    if not self_check():
        print("formula self-check FAILED; not emitting tables", file=sys.stderr)
        return 1

    fits = []
    for order in (0, 1):
        for kind, fn in (("p", p_of_t), ("q", q_of_t)):
            coeffs = trim(cheb_fit(lambda t, f=fn, o=order: f(o, t), NODES))
            f64c = [float(c) for c in coeffs]
            # Measure float64 reconstruction error of J and Y end to end.
            worst = 0.0
            pass  # placeholder; measured jointly below
            fits.append((f"cheb_{kind}{order}", f64c, 0.0))

    # Joint end-to-end float64 error measurement on a dense grid.
    tables = {name: coeffs for name, coeffs, _ in fits}
    worst = 0.0
    n_grid = 1500
    for i in range(n_grid + 1):
        x = X_LO + (X_HI - X_LO) * i / n_grid
        if x <= X_LO:
            continue
        t = (8.0 / x) ** 2
        xi = (2.0 * t - (T_LO + T_HI)) / (T_HI - T_LO)
        scale = math.sqrt(2.0 / (math.pi * x))
        for order in (0, 1):
            p = clenshaw(tables[f"cheb_p{order}"], xi)
            q = clenshaw(tables[f"cheb_q{order}"], xi)
            c = x - (2 * order + 1) * math.pi / 4
            j = scale * (p * math.cos(c) - q * math.sin(c))
            y = scale * (p * math.sin(c) + q * math.cos(c))
            worst = max(worst, abs(j - float(mp.besselj(order, x))))
            worst = max(worst, abs(y - float(mp.bessely(order, x))))
    print(f"middle-regime float64 reconstruction: max abs error {worst:.3e}")
    if worst > 1e-12:
        print("fit too loose; raise NODES", file=sys.stderr)
        return 1
    fits = [(name, coeffs, worst) for name, coeffs, _ in fits]
    for name, coeffs, _ in fits:
        print(f"  {name}: degree {len(coeffs) - 1}")

    emit_cheb_tables("crates/core/src/specfun/cheb_tables.rs", fits)

    # Reference grid: log-spaced within each regime, plus boundary and
    # large-argument probes.
    xs = []
    for lo, hi, n in ((1e-3, 8.0, 14), (8.0, 16.0, 10), (16.0, 1e4, 14)):
        for i in range(n):
            xs.append(lo * (hi / lo) ** ((i + 0.5) / n))
    xs += [7.999999, 8.0, 8.000001, 15.999999, 16.0, 16.000001]
    xs += [1.0, 0.1, 1e4, 1e5, 9.6e5]
    xs = sorted(set(float(f"{x:.17g}") for x in xs))
    rows = []
    for x in xs:
        xm = mp.mpf(repr(x))
        rows.append(
            (
                x,
                float(mp.besselj(0, xm)),
                float(mp.bessely(0, xm)),
                float(mp.besselj(1, xm)),
                float(mp.bessely(1, xm)),
            )
        )

    spot = [
        ("J0", "bessel_j0", "0.7651976866"),
        ("Y0", "bessel_y0", "0.0882569642"),
        ("J1", "bessel_j1", "0.4400505857"),
        ("Y1", "bessel_y1", "-0.7812128213"),
    ]
    emit_reference_tests("crates/core/tests/bessel_reference.rs", rows, spot)
    return 0


if __name__ == "__main__":
    sys.exit(main())
