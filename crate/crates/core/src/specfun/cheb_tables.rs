//! Chebyshev coefficient tables for the middle-regime Bessel
//! evaluation, x in (8, 16].
//!
//! The amplitude-phase functions P0, Q0, P1, Q1 (defined by
//! `J_n = sqrt(2/(pi x)) (P_n cos chi_n - Q_n sin chi_n)` and
//! `Y_n = sqrt(2/(pi x)) (P_n sin chi_n + Q_n cos chi_n)` with
//! `chi_n = x - (2n+1) pi/4`) are smooth on this interval in the
//! variable `t = (8/x)^2`, and the tables below are Chebyshev
//! interpolants in `xi = (2 t - 1.25) / 0.75`, evaluated with the
//! Clenshaw recurrence.
//!
//! Generated by tools/gen_specfun_tables.py; do not edit by hand.

/// Chebyshev coefficients of _P0 in xi; float64 fit residual <= 2.6e-16 on a dense grid.
pub const CHEB_P0: [f64; 12] = [
    0.9993252498980133,
    -0.00040006351721421106,
    1.6859646846680702e-06,
    -2.045033557529122e-08,
    4.55755252194438e-10,
    -1.5217381645181637e-11,
    6.79063285184628e-13,
    -3.7714025561745306e-14,
    2.485708622910421e-15,
    -1.8803803589997687e-16,
    1.5933504267360248e-17,
    -1.4848873637847692e-18,
];

/// Chebyshev coefficients of _Q0 in xi; float64 fit residual <= 2.6e-16 on a dense grid.
pub const CHEB_Q0: [f64; 29] = [
    -0.01197367009258956,
    -0.0037913564390568495,
    0.00032059200937665795,
    -5.2617061596330075e-05,
    1.0887429269959834e-05,
    -2.5303499134129174e-06,
    6.309028717244247e-07,
    -1.6491630233149566e-07,
    4.4598704712147e-08,
    -1.2374023020363676e-08,
    3.502640867407777e-09,
    -1.0075419400706588e-09,
    2.936714344554234e-10,
    -8.654634614952026e-11,
    2.574522393097718e-11,
    -7.720264118168916e-12,
    2.331284699079248e-12,
    -7.082908508171762e-13,
    2.163575577683762e-13,
    -6.64077286213895e-14,
    2.0470746490789135e-14,
    -6.334786541917059e-15,
    1.9672273254585316e-15,
    -6.128636872035857e-16,
    1.9148745664044675e-16,
    -5.999002548519863e-17,
    1.8840295246438465e-17,
    -5.930407764761258e-18,
    1.870668688629175e-18,
];

/// Chebyshev coefficients of _P1 in xi; float64 fit residual <= 2.6e-16 on a dense grid.
pub const CHEB_P1: [f64; 12] = [
    1.0011290438409142,
    0.0006712260602193439,
    -2.1904933769942436e-06,
    2.4496735875622773e-08,
    -5.247566970061887e-10,
    1.7117864515262862e-11,
    -7.522458310911059e-13,
    4.132659039673479e-14,
    -2.7017484776618337e-15,
    2.0309143266912737e-16,
    -1.7121854323223272e-17,
    1.5889781252778099e-18,
];

/// Chebyshev coefficients of _Q1 in xi; float64 fit residual <= 2.6e-16 on a dense grid.
pub const CHEB_Q1: [f64; 30] = [
    0.0360372438002884,
    0.011469332007637919,
    -0.000955035984551291,
    0.00015739075804515403,
    -3.26079699725435e-05,
    7.582330861027198e-06,
    -1.8910497556711382e-06,
    4.943983689945508e-07,
    -1.3371657012028708e-07,
    3.7103060919139834e-08,
    -1.0503198133024231e-08,
    3.0214146316028336e-09,
    -8.806959296577761e-10,
    2.5955360434452386e-10,
    -7.7212344989555e-11,
    2.3154328496071322e-11,
    -6.9920400194253485e-12,
    2.1243577577586694e-12,
    -6.489251560453975e-13,
    1.9918054765770948e-13,
    -6.139982016265403e-14,
    1.9000717156806314e-14,
    -5.900606993125108e-15,
    1.8382720082338503e-15,
    -5.743671861929391e-16,
    1.7994154594539947e-16,
    -5.651229685311956e-17,
    1.7788627338434855e-17,
    -5.611218548362973e-18,
    1.7734634510746505e-18,
];
