//! Constant tables for the fixed-dimension functions.
//!
//! Values are the classical ones used throughout the benchmark literature
//! (Yao, Liu & Lin 1999, "Evolutionary programming made faster"; Dixon &
//! Szegö 1978 for Hartman and Shekel; Kowalik & Osborne 1968).

/// Shekel's foxholes: 25 hole centres on a 5×5 grid with spacing 16.
/// Row 0 cycles through the x₁ offsets, row 1 holds x₂ constant per block.
pub const FOXHOLES_A: [[f64; 25]; 2] = [
    [
        -32.0, -16.0, 0.0, 16.0, 32.0, -32.0, -16.0, 0.0, 16.0, 32.0, -32.0, -16.0, 0.0, 16.0, 32.0, -32.0, -16.0, 0.0,
        16.0, 32.0, -32.0, -16.0, 0.0, 16.0, 32.0,
    ],
    [
        -32.0, -32.0, -32.0, -32.0, -32.0, -16.0, -16.0, -16.0, -16.0, -16.0, 0.0, 0.0, 0.0, 0.0, 0.0, 16.0, 16.0,
        16.0, 16.0, 16.0, 32.0, 32.0, 32.0, 32.0, 32.0,
    ],
];

/// Kowalik enzyme-kinetics observations.
pub const KOWALIK_A: [f64; 11] = [
    0.1957, 0.1947, 0.1735, 0.1600, 0.0844, 0.0627, 0.0456, 0.0342, 0.0323, 0.0235, 0.0246,
];

/// Kowalik abscissae, stored as `b_i = 1 / u_i` for u = 0.25, 0.5, 1, 2, 4, ..., 16.
pub const KOWALIK_B: [f64; 11] = [
    1.0 / 0.25,
    1.0 / 0.5,
    1.0,
    1.0 / 2.0,
    1.0 / 4.0,
    1.0 / 6.0,
    1.0 / 8.0,
    1.0 / 10.0,
    1.0 / 12.0,
    1.0 / 14.0,
    1.0 / 16.0,
];

pub const HARTMAN_C: [f64; 4] = [1.0, 1.2, 3.0, 3.2];

pub const HARTMAN3_A: [[f64; 3]; 4] = [
    [3.0, 10.0, 30.0],
    [0.1, 10.0, 35.0],
    [3.0, 10.0, 30.0],
    [0.1, 10.0, 35.0],
];

pub const HARTMAN3_P: [[f64; 3]; 4] = [
    [0.3689, 0.1170, 0.2673],
    [0.4699, 0.4387, 0.7470],
    [0.1091, 0.8732, 0.5547],
    [0.03815, 0.5743, 0.8828],
];

pub const HARTMAN6_A: [[f64; 6]; 4] = [
    [10.0, 3.0, 17.0, 3.5, 1.7, 8.0],
    [0.05, 10.0, 17.0, 0.1, 8.0, 14.0],
    [3.0, 3.5, 1.7, 10.0, 17.0, 8.0],
    [17.0, 8.0, 0.05, 10.0, 0.1, 14.0],
];

pub const HARTMAN6_P: [[f64; 6]; 4] = [
    [0.1312, 0.1696, 0.5569, 0.0124, 0.8283, 0.5886],
    [0.2329, 0.4135, 0.8307, 0.3736, 0.1004, 0.9991],
    [0.2348, 0.1415, 0.3522, 0.2883, 0.3047, 0.6650],
    [0.4047, 0.8828, 0.8732, 0.5743, 0.1091, 0.0381],
];

/// Shekel centres; F21, F22, F23 use the first 5, 7, 10 rows.
pub const SHEKEL_A: [[f64; 4]; 10] = [
    [4.0, 4.0, 4.0, 4.0],
    [1.0, 1.0, 1.0, 1.0],
    [8.0, 8.0, 8.0, 8.0],
    [6.0, 6.0, 6.0, 6.0],
    [3.0, 7.0, 3.0, 7.0],
    [2.0, 9.0, 2.0, 9.0],
    [5.0, 5.0, 3.0, 3.0],
    [8.0, 1.0, 8.0, 1.0],
    [6.0, 2.0, 6.0, 2.0],
    [7.0, 3.6, 7.0, 3.6],
];

pub const SHEKEL_C: [f64; 10] = [0.1, 0.2, 0.2, 0.4, 0.4, 0.6, 0.3, 0.7, 0.5, 0.5];
