//! The 23 classical test functions: unimodal F1–F7, scalable multimodal
//! F8–F13 and fixed-dimension multimodal F14–F23.

pub mod constants;

use std::f64::consts::{E, PI};
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::swarm::{Objective, SearchSpace, SwarmRng};
use constants::*;

/// Dimension used for F1–F13 when none is given.
pub const DEFAULT_DIM: usize = 30;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum FunctionId {
    F1,
    F2,
    F3,
    F4,
    F5,
    F6,
    F7,
    F8,
    F9,
    F10,
    F11,
    F12,
    F13,
    F14,
    F15,
    F16,
    F17,
    F18,
    F19,
    F20,
    F21,
    F22,
    F23,
}

impl FunctionId {
    pub const ALL: [FunctionId; 23] = [
        Self::F1,
        Self::F2,
        Self::F3,
        Self::F4,
        Self::F5,
        Self::F6,
        Self::F7,
        Self::F8,
        Self::F9,
        Self::F10,
        Self::F11,
        Self::F12,
        Self::F13,
        Self::F14,
        Self::F15,
        Self::F16,
        Self::F17,
        Self::F18,
        Self::F19,
        Self::F20,
        Self::F21,
        Self::F22,
        Self::F23,
    ];

    /// 1-based function number.
    pub fn number(self) -> usize {
        self as usize + 1
    }

    pub fn from_number(n: usize) -> Option<Self> {
        n.checked_sub(1).and_then(|i| Self::ALL.get(i).copied())
    }
}

impl fmt::Display for FunctionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F{}", self.number())
    }
}

impl FromStr for FunctionId {
    type Err = Error;

    /// Accepts `F7`, `f7` or `7`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let digits = t.strip_prefix(['F', 'f']).unwrap_or(t);
        digits
            .parse::<usize>()
            .ok()
            .and_then(Self::from_number)
            .ok_or_else(|| Error::UnknownFunction(s.to_string()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DimPolicy {
    /// Any positive dimension; `default` applies when none is requested.
    Configurable {
        default: usize,
    },
    Fixed(usize),
}

impl fmt::Display for DimPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DimPolicy::Configurable { default } => write!(f, "configurable (default {default})"),
            DimPolicy::Fixed(d) => write!(f, "fixed {d}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Bounds {
    Uniform { lower: f64, upper: f64 },
    PerCoordinate(&'static [(f64, f64)]),
}

impl fmt::Display for Bounds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bounds::Uniform { lower, upper } => write!(f, "[{lower}, {upper}]"),
            Bounds::PerCoordinate(b) => {
                let parts: Vec<String> = b.iter().map(|(lo, hi)| format!("[{lo}, {hi}]")).collect();
                f.write_str(&parts.join(" x "))
            }
        }
    }
}

const BRANIN_BOUNDS: [(f64, f64); 2] = [(-5.0, 10.0), (0.0, 15.0)];

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BenchmarkSpec {
    pub id: FunctionId,
    pub name: &'static str,
    pub dim_policy: DimPolicy,
    pub bounds: Bounds,
}

impl BenchmarkSpec {
    /// Resolves the dimension to run at, rejecting overrides on fixed-dimension functions.
    pub fn resolve_dim(&self, requested: Option<usize>) -> Result<usize> {
        match (self.dim_policy, requested) {
            (DimPolicy::Configurable { default }, None) => Ok(default),
            (DimPolicy::Configurable { .. }, Some(0)) => {
                Err(Error::InvalidSpace(format!("{}: dimension must be positive", self.id)))
            }
            (DimPolicy::Configurable { .. }, Some(d)) => Ok(d),
            (DimPolicy::Fixed(d), None) => Ok(d),
            (DimPolicy::Fixed(d), Some(r)) if r == d => Ok(d),
            (DimPolicy::Fixed(d), Some(_)) => Err(Error::FixedDimension {
                id: self.id.to_string(),
                dim: d,
            }),
        }
    }

    pub fn accepts_dim(&self, dim: usize) -> bool {
        match self.dim_policy {
            DimPolicy::Configurable { .. } => dim >= 1,
            DimPolicy::Fixed(d) => dim == d,
        }
    }

    pub fn search_space(&self, dim: usize) -> Result<SearchSpace> {
        if !self.accepts_dim(dim) {
            return Err(self.dim_error(dim));
        }
        match self.bounds {
            Bounds::Uniform { lower, upper } => SearchSpace::uniform(dim, lower, upper),
            Bounds::PerCoordinate(b) => {
                SearchSpace::new(b.iter().map(|p| p.0).collect(), b.iter().map(|p| p.1).collect())
            }
        }
    }

    fn dim_error(&self, actual: usize) -> Error {
        let expected = match self.dim_policy {
            DimPolicy::Configurable { default } => default,
            DimPolicy::Fixed(d) => d,
        };
        Error::DimensionMismatch {
            id: self.id.to_string(),
            expected,
            actual,
        }
    }
}

pub fn spec_of(id: FunctionId) -> BenchmarkSpec {
    use FunctionId::*;
    let scalable = DimPolicy::Configurable { default: DEFAULT_DIM };
    let uni = |lower: f64, upper: f64| Bounds::Uniform { lower, upper };
    let (name, dim_policy, bounds) = match id {
        F1 => ("Sphere", scalable, uni(-100.0, 100.0)),
        F2 => ("Schwefel 2.22", scalable, uni(-10.0, 10.0)),
        F3 => ("Schwefel 1.2", scalable, uni(-100.0, 100.0)),
        F4 => ("Schwefel 2.21", scalable, uni(-100.0, 100.0)),
        F5 => ("Generalized Rosenbrock", scalable, uni(-30.0, 30.0)),
        F6 => ("Step", scalable, uni(-100.0, 100.0)),
        F7 => ("Quartic with noise", scalable, uni(-1.28, 1.28)),
        F8 => ("Generalized Schwefel 2.26", scalable, uni(-500.0, 500.0)),
        F9 => ("Generalized Rastrigin", scalable, uni(-5.12, 5.12)),
        F10 => ("Ackley", scalable, uni(-32.0, 32.0)),
        F11 => ("Generalized Griewank", scalable, uni(-600.0, 600.0)),
        F12 => ("Generalized penalized 1", scalable, uni(-50.0, 50.0)),
        F13 => ("Generalized penalized 2", scalable, uni(-50.0, 50.0)),
        F14 => ("Shekel's foxholes", DimPolicy::Fixed(2), uni(-65.536, 65.536)),
        F15 => ("Kowalik", DimPolicy::Fixed(4), uni(-5.0, 5.0)),
        F16 => ("Six-hump camel back", DimPolicy::Fixed(2), uni(-5.0, 5.0)),
        F17 => ("Branin", DimPolicy::Fixed(2), Bounds::PerCoordinate(&BRANIN_BOUNDS)),
        F18 => ("Goldstein-Price", DimPolicy::Fixed(2), uni(-2.0, 2.0)),
        F19 => ("Hartman 3", DimPolicy::Fixed(3), uni(0.0, 1.0)),
        F20 => ("Hartman 6", DimPolicy::Fixed(6), uni(0.0, 1.0)),
        F21 => ("Shekel 5", DimPolicy::Fixed(4), uni(0.0, 10.0)),
        F22 => ("Shekel 7", DimPolicy::Fixed(4), uni(0.0, 10.0)),
        F23 => ("Shekel 10", DimPolicy::Fixed(4), uni(0.0, 10.0)),
    };
    BenchmarkSpec {
        id,
        name,
        dim_policy,
        bounds,
    }
}

/// All 23 specs in id order.
pub fn registry() -> Vec<BenchmarkSpec> {
    FunctionId::ALL.iter().map(|&id| spec_of(id)).collect()
}

/// Evaluates function `id` at `x`.
///
/// Only F7 draws from `rng` (one uniform in [0, 1) per call).
pub fn evaluate<R: Rng + ?Sized>(id: FunctionId, x: &[f64], rng: &mut R) -> Result<f64> {
    let spec = spec_of(id);
    if !spec.accepts_dim(x.len()) {
        return Err(spec.dim_error(x.len()));
    }
    Ok(eval_unchecked(id, x, rng))
}

/// Penalty `u(x, a, k, m)`; zero on the closed interval [-a, a].
pub fn penalty_u(xi: f64, a: f64, k: f64, m: f64) -> f64 {
    if xi > a {
        k * (xi - a).powf(m)
    } else if xi < -a {
        k * (-xi - a).powf(m)
    } else {
        0.0
    }
}

/// `y_i = 1 + (x_i + 1) / 4`.
pub fn y_transform(x: &[f64]) -> Vec<f64> {
    x.iter().map(|xi| 1.0 + (xi + 1.0) / 4.0).collect()
}

fn sq(v: f64) -> f64 {
    v * v
}

fn eval_unchecked<R: Rng + ?Sized>(id: FunctionId, x: &[f64], rng: &mut R) -> f64 {
    use FunctionId::*;
    let n = x.len() as f64;
    match id {
        F1 => x.iter().map(|v| v * v).sum(),
        F2 => {
            let abs = x.iter().map(|v| v.abs());
            abs.clone().sum::<f64>() + abs.product::<f64>()
        }
        F3 => {
            let mut prefix = 0.0;
            x.iter()
                .map(|v| {
                    prefix += v;
                    prefix * prefix
                })
                .sum()
        }
        F4 => x.iter().fold(0.0, |m, v| m.max(v.abs())),
        F5 => x
            .windows(2)
            .map(|w| 100.0 * sq(w[1] - w[0] * w[0]) + sq(w[0] - 1.0))
            .sum(),
        F6 => x.iter().map(|v| sq((v + 0.5).floor())).sum(),
        F7 => {
            let quartic: f64 = x.iter().enumerate().map(|(i, v)| (i + 1) as f64 * v.powi(4)).sum();
            quartic + rng.gen::<f64>()
        }
        F8 => x.iter().map(|v| -v * v.abs().sqrt().sin()).sum(),
        F9 => x.iter().map(|v| v * v - 10.0 * (2.0 * PI * v).cos() + 10.0).sum(),
        F10 => {
            let sum_sq: f64 = x.iter().map(|v| v * v).sum();
            let sum_cos: f64 = x.iter().map(|v| (2.0 * PI * v).cos()).sum();
            -20.0 * (-0.2 * (sum_sq / n).sqrt()).exp() - (sum_cos / n).exp() + 20.0 + E
        }
        F11 => {
            let sum: f64 = x.iter().map(|v| v * v).sum::<f64>() / 4000.0;
            let prod: f64 = x
                .iter()
                .enumerate()
                .map(|(i, v)| (v / ((i + 1) as f64).sqrt()).cos())
                .product();
            sum - prod + 1.0
        }
        F12 => {
            let y = y_transform(x);
            let last = y[y.len() - 1];
            let inner: f64 = y
                .windows(2)
                .map(|w| sq(w[0] - 1.0) * (1.0 + 10.0 * sq((PI * w[1]).sin())))
                .sum();
            let core = 10.0 * sq((PI * y[0]).sin()) + inner + sq(last - 1.0);
            PI / n * core + x.iter().map(|&v| penalty_u(v, 10.0, 100.0, 4.0)).sum::<f64>()
        }
        F13 => {
            let last = x[x.len() - 1];
            let inner: f64 = x
                .windows(2)
                .map(|w| sq(w[0] - 1.0) * (1.0 + sq((3.0 * PI * w[1]).sin())))
                .sum();
            let core = sq((3.0 * PI * x[0]).sin()) + inner + sq(last - 1.0) * (1.0 + sq((2.0 * PI * last).sin()));
            0.1 * core + x.iter().map(|&v| penalty_u(v, 5.0, 100.0, 4.0)).sum::<f64>()
        }
        F14 => {
            let holes: f64 = (0..25)
                .map(|j| {
                    let dist = (x[0] - FOXHOLES_A[0][j]).powi(6) + (x[1] - FOXHOLES_A[1][j]).powi(6);
                    1.0 / ((j + 1) as f64 + dist)
                })
                .sum();
            1.0 / (1.0 / 500.0 + holes)
        }
        F15 => KOWALIK_A
            .iter()
            .zip(KOWALIK_B.iter())
            .map(|(a, b)| {
                let model = x[0] * (b * b + b * x[1]) / (b * b + b * x[2] + x[3]);
                sq(a - model)
            })
            .sum(),
        F16 => {
            let (a, b) = (x[0], x[1]);
            4.0 * a * a - 2.1 * a.powi(4) + a.powi(6) / 3.0 + a * b - 4.0 * b * b + 4.0 * b.powi(4)
        }
        F17 => {
            let (a, b) = (x[0], x[1]);
            sq(b - 5.1 / (4.0 * PI * PI) * a * a + 5.0 / PI * a - 6.0)
                + 10.0 * (1.0 - 1.0 / (8.0 * PI)) * a.cos()
                + 10.0
        }
        F18 => {
            let (a, b) = (x[0], x[1]);
            let left = 1.0 + sq(a + b + 1.0) * (19.0 - 14.0 * a + 3.0 * a * a - 14.0 * b + 6.0 * a * b + 3.0 * b * b);
            let right = 30.0
                + sq(2.0 * a - 3.0 * b) * (18.0 - 32.0 * a + 12.0 * a * a + 48.0 * b - 36.0 * a * b + 27.0 * b * b);
            left * right
        }
        F19 => hartman(x, &HARTMAN3_A, &HARTMAN3_P),
        F20 => hartman(x, &HARTMAN6_A, &HARTMAN6_P),
        F21 => shekel(x, 5),
        F22 => shekel(x, 7),
        F23 => shekel(x, 10),
    }
}

fn hartman<const D: usize>(x: &[f64], a: &[[f64; D]; 4], p: &[[f64; D]; 4]) -> f64 {
    -(0..4)
        .map(|i| {
            let inner: f64 = (0..D).map(|j| a[i][j] * sq(x[j] - p[i][j])).sum();
            HARTMAN_C[i] * (-inner).exp()
        })
        .sum::<f64>()
}

fn shekel(x: &[f64], m: usize) -> f64 {
    -(0..m)
        .map(|i| {
            let dist: f64 = x.iter().zip(&SHEKEL_A[i]).map(|(xj, aj)| sq(xj - aj)).sum();
            1.0 / (dist + SHEKEL_C[i])
        })
        .sum::<f64>()
}

/// A benchmark bound to a validated dimension, usable as an [`Objective`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Benchmark {
    spec: BenchmarkSpec,
    dim: usize,
}

impl Benchmark {
    pub fn new(id: FunctionId, dim: usize) -> Result<Self> {
        let spec = spec_of(id);
        if !spec.accepts_dim(dim) {
            return Err(spec.dim_error(dim));
        }
        Ok(Self { spec, dim })
    }

    /// Applies the function's dimension policy to an optional override.
    pub fn with_override(id: FunctionId, dim: Option<usize>) -> Result<Self> {
        let spec = spec_of(id);
        let dim = spec.resolve_dim(dim)?;
        Ok(Self { spec, dim })
    }

    pub fn id(&self) -> FunctionId {
        self.spec.id
    }

    pub fn spec(&self) -> &BenchmarkSpec {
        &self.spec
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn search_space(&self) -> SearchSpace {
        self.spec
            .search_space(self.dim)
            .expect("dimension validated at construction")
    }
}

impl Objective for Benchmark {
    fn evaluate(&self, x: &[f64], rng: &mut SwarmRng) -> f64 {
        debug_assert_eq!(x.len(), self.dim);
        eval_unchecked(self.spec.id, x, rng)
    }
}
