//! The classical 23-function benchmark suite (F1–F23).
//!
//! F1–F13 are scalable (30 dimensions here), F14–F23 have fixed dimension.
//! Definitions and domains follow the usual formulation of this suite; the
//! recorded best values are the rounded figures the suite is normally quoted
//! with, and each entry also carries a known minimizer where one is published.

use std::f64::consts::{E, PI};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, EvalError, Result};
use crate::objective::{Objective, ObjectiveSpec};
use crate::rng::{noise_stream, uniform, RngStream};
use crate::space::SearchSpace;

pub const COUNT: u8 = 23;

/// Benchmark identifier `F1`..`F23`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BenchmarkId(u8);

impl BenchmarkId {
    pub fn new(n: u8) -> Option<Self> {
        (1..=COUNT).contains(&n).then_some(Self(n))
    }

    pub fn number(self) -> u8 {
        self.0
    }

    pub fn all() -> impl Iterator<Item = BenchmarkId> {
        (1..=COUNT).map(BenchmarkId)
    }

    pub fn entry(self) -> BenchmarkEntry {
        entry(self)
    }
}

impl fmt::Display for BenchmarkId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F{}", self.0)
    }
}

impl FromStr for BenchmarkId {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let digits = s
            .trim()
            .strip_prefix(['F', 'f'])
            .ok_or_else(|| format!("benchmark id `{s}` must look like F1..F23"))?;
        digits
            .parse::<u8>()
            .ok()
            .and_then(BenchmarkId::new)
            .ok_or_else(|| format!("unknown benchmark `{s}` (valid: F1..F23)"))
    }
}

impl Serialize for BenchmarkId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BenchmarkId {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Parses `"F1-F23"`, `"F1,F5,F9"` or mixtures such as `"F1-F4,F9"`.
pub fn parse_id_list(spec: &str) -> std::result::Result<Vec<BenchmarkId>, String> {
    let mut ids = Vec::new();
    for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        match part.split_once('-') {
            Some((from, to)) => {
                let (from, to): (BenchmarkId, BenchmarkId) = (from.parse()?, to.parse()?);
                if from > to {
                    return Err(format!("empty benchmark range `{part}`"));
                }
                ids.extend((from.0..=to.0).map(BenchmarkId));
            }
            None => ids.push(part.parse()?),
        }
    }
    if ids.is_empty() {
        return Err("no benchmark ids given".into());
    }
    Ok(ids)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Category {
    #[serde(rename = "Uni-modal")]
    UniModal,
    #[serde(rename = "Multi-modal")]
    MultiModal,
    /// Fixed-dimension functions F16–F23, labelled compositional in the table.
    #[serde(rename = "Compositional")]
    Compositional,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchmarkEntry {
    pub id: BenchmarkId,
    pub name: &'static str,
    pub category: Category,
    pub dim: usize,
    pub bounds: SearchSpace,
    /// Best value as listed for the suite (rounded).
    pub best_value: f64,
    /// A published minimizer, when one is known.
    #[serde(skip)]
    pub optimizer: Option<Vec<f64>>,
}

/// Schwefel 2.26 minimizer coordinate.
pub const SCHWEFEL_ARGMIN: f64 = 420.968746;

fn entry(id: BenchmarkId) -> BenchmarkEntry {
    use Category::*;
    let n = 30;
    let (name, category, dim, lower, upper, best_value, optimizer): (
        _,
        _,
        usize,
        Vec<f64>,
        Vec<f64>,
        f64,
        Option<Vec<f64>>,
    ) = match id.0 {
        1 => (
            "Sphere",
            UniModal,
            n,
            vec![-100.0; n],
            vec![100.0; n],
            0.0,
            Some(vec![0.0; n]),
        ),
        2 => (
            "Schwefel's Problem 2.22",
            UniModal,
            n,
            vec![-10.0; n],
            vec![10.0; n],
            0.0,
            Some(vec![0.0; n]),
        ),
        3 => (
            "Schwefel's Problem 1.2",
            UniModal,
            n,
            vec![-100.0; n],
            vec![100.0; n],
            0.0,
            Some(vec![0.0; n]),
        ),
        4 => (
            "Schwefel's Problem 2.21",
            UniModal,
            n,
            vec![-100.0; n],
            vec![100.0; n],
            0.0,
            Some(vec![0.0; n]),
        ),
        5 => (
            "Generalized Rosenbrock's Function",
            UniModal,
            n,
            vec![-30.0; n],
            vec![30.0; n],
            0.0,
            Some(vec![1.0; n]),
        ),
        6 => (
            "Step Function",
            UniModal,
            n,
            vec![-100.0; n],
            vec![100.0; n],
            0.0,
            Some(vec![0.0; n]),
        ),
        7 => (
            "Quartic Function",
            UniModal,
            n,
            vec![-1.28; n],
            vec![1.28; n],
            0.0,
            Some(vec![0.0; n]),
        ),
        8 => (
            "Generalized Schwefel's Function",
            MultiModal,
            n,
            vec![-500.0; n],
            vec![500.0; n],
            -12569.5,
            Some(vec![SCHWEFEL_ARGMIN; n]),
        ),
        9 => (
            "Generalized Rastrigin's Function",
            MultiModal,
            n,
            vec![-5.12; n],
            vec![5.12; n],
            0.0,
            Some(vec![0.0; n]),
        ),
        10 => (
            "Ackley's Function",
            MultiModal,
            n,
            vec![-32.0; n],
            vec![32.0; n],
            0.0,
            Some(vec![0.0; n]),
        ),
        11 => (
            "Generalized Griewank's Function",
            MultiModal,
            n,
            vec![-600.0; n],
            vec![600.0; n],
            0.0,
            Some(vec![0.0; n]),
        ),
        12 => (
            "Generalized Penalized Function 1",
            MultiModal,
            n,
            vec![-50.0; n],
            vec![50.0; n],
            0.0,
            Some(vec![-1.0; n]),
        ),
        13 => (
            "Generalized Penalized Function 2",
            MultiModal,
            n,
            vec![-50.0; n],
            vec![50.0; n],
            0.0,
            Some(vec![1.0; n]),
        ),
        14 => (
            "Shekel's Foxholes Function",
            MultiModal,
            2,
            vec![-65.536; 2],
            vec![65.536; 2],
            0.998,
            Some(vec![-31.97833, -31.97833]),
        ),
        15 => (
            "Kowalik's Function",
            MultiModal,
            4,
            vec![-5.0; 4],
            vec![5.0; 4],
            0.0003075,
            Some(vec![0.192833, 0.190836, 0.123117, 0.135766]),
        ),
        16 => (
            "Six-Hump Camel-Back Function",
            Compositional,
            2,
            vec![-5.0; 2],
            vec![5.0; 2],
            -1.0316,
            Some(vec![0.08984201, -0.71265640]),
        ),
        17 => (
            "Branin Function",
            Compositional,
            2,
            vec![-5.0, 0.0],
            vec![10.0, 15.0],
            0.398,
            Some(vec![PI, 2.275]),
        ),
        18 => (
            "Goldstein-Price Function",
            Compositional,
            2,
            vec![-2.0; 2],
            vec![2.0; 2],
            3.0,
            Some(vec![0.0, -1.0]),
        ),
        19 => (
            "Hartman's Function 1",
            Compositional,
            3,
            vec![0.0; 3],
            vec![1.0; 3],
            -3.8628,
            Some(vec![0.114614, 0.555649, 0.852547]),
        ),
        20 => (
            "Hartman's Function 2",
            Compositional,
            6,
            vec![0.0; 6],
            vec![1.0; 6],
            -3.32,
            Some(vec![
                0.20169, 0.150011, 0.476874, 0.275332, 0.311652, 0.6573,
            ]),
        ),
        21 => (
            "Shekel's Function 1",
            Compositional,
            4,
            vec![0.0; 4],
            vec![10.0; 4],
            -10.1532,
            Some(vec![4.00003715, 4.00013327, 4.00003715, 4.00013327]),
        ),
        22 => (
            "Shekel's Function 2",
            Compositional,
            4,
            vec![0.0; 4],
            vec![10.0; 4],
            -10.4029,
            Some(vec![4.00057291, 4.00068936, 3.99948971, 3.99960616]),
        ),
        23 => (
            "Shekel's Function 3",
            Compositional,
            4,
            vec![0.0; 4],
            vec![10.0; 4],
            -10.5364,
            Some(vec![4.00074671, 4.00059326, 3.99966290, 3.99950981]),
        ),
        _ => unreachable!("BenchmarkId is always in 1..=23"),
    };
    BenchmarkEntry {
        id,
        name,
        category,
        dim,
        bounds: SearchSpace::new(lower, upper).expect("static bounds are valid"),
        best_value,
        optimizer,
    }
}

/// All 23 entries in id order.
pub fn registry() -> Vec<BenchmarkEntry> {
    BenchmarkId::all().map(entry).collect()
}

/// The registry as JSON: id, name, category, dim, bounds, best_value.
pub fn registry_json() -> serde_json::Value {
    serde_json::to_value(registry()).expect("registry serializes")
}

/// Deterministic part of the function. For F7 this is the quartic term
/// without the additive noise; use [`BenchmarkObjective`] for the noisy form.
pub fn evaluate(id: BenchmarkId, x: &[f64]) -> Result<f64> {
    let dim = entry_dim(id);
    if x.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            actual: x.len(),
        });
    }
    Ok(match id.0 {
        1 => sphere(x),
        2 => schwefel_2_22(x),
        3 => schwefel_1_2(x),
        4 => schwefel_2_21(x),
        5 => rosenbrock(x),
        6 => step(x),
        7 => quartic(x),
        8 => schwefel_2_26(x),
        9 => rastrigin(x),
        10 => ackley(x),
        11 => griewank(x),
        12 => penalized_1(x),
        13 => penalized_2(x),
        14 => foxholes(x),
        15 => kowalik(x),
        16 => six_hump_camel(x),
        17 => branin(x),
        18 => goldstein_price(x),
        19 => hartman(x, &HARTMAN3_A, &HARTMAN3_P),
        20 => hartman(x, &HARTMAN6_A, &HARTMAN6_P),
        21 => shekel(x, 5),
        22 => shekel(x, 7),
        23 => shekel(x, 10),
        _ => unreachable!(),
    })
}

fn entry_dim(id: BenchmarkId) -> usize {
    match id.0 {
        1..=13 => 30,
        14 | 16 | 17 | 18 => 2,
        15 | 21..=23 => 4,
        19 => 3,
        20 => 6,
        _ => unreachable!(),
    }
}

/// A benchmark as an [`Objective`], with F7's uniform noise drawn from its own
/// stream.
#[derive(Debug, Clone)]
pub struct BenchmarkObjective {
    id: BenchmarkId,
    noise: RngStream,
}

impl BenchmarkObjective {
    /// `seed` is the trial seed; the noise uses a stream split from it.
    pub fn new(id: BenchmarkId, seed: u64) -> Self {
        Self {
            id,
            noise: noise_stream(seed),
        }
    }

    pub fn id(&self) -> BenchmarkId {
        self.id
    }

    /// Ready-to-optimize spec over the entry's standard domain.
    pub fn spec(id: BenchmarkId, seed: u64) -> ObjectiveSpec<Self> {
        ObjectiveSpec::new(entry(id).bounds, Self::new(id, seed)).with_label(id.to_string())
    }
}

impl Objective for BenchmarkObjective {
    fn evaluate(&mut self, x: &[f64]) -> Result<f64, EvalError> {
        let value = evaluate(self.id, x).map_err(|_| EvalError::DimensionMismatch {
            expected: entry_dim(self.id),
            actual: x.len(),
        })?;
        Ok(if self.id.0 == 7 {
            value + uniform(&mut self.noise)
        } else {
            value
        })
    }
}

fn sphere(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

fn schwefel_2_22(x: &[f64]) -> f64 {
    x.iter().map(|v| v.abs()).sum::<f64>() + x.iter().map(|v| v.abs()).product::<f64>()
}

fn schwefel_1_2(x: &[f64]) -> f64 {
    let mut prefix = 0.0;
    x.iter()
        .map(|v| {
            prefix += v;
            prefix * prefix
        })
        .sum()
}

fn schwefel_2_21(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |m, v| m.max(v.abs()))
}

fn rosenbrock(x: &[f64]) -> f64 {
    x.windows(2)
        .map(|w| 100.0 * (w[1] - w[0] * w[0]).powi(2) + (w[0] - 1.0).powi(2))
        .sum()
}

fn step(x: &[f64]) -> f64 {
    x.iter().map(|v| (v + 0.5).floor().powi(2)).sum()
}

fn quartic(x: &[f64]) -> f64 {
    x.iter()
        .enumerate()
        .map(|(i, v)| (i + 1) as f64 * v.powi(4))
        .sum()
}

fn schwefel_2_26(x: &[f64]) -> f64 {
    x.iter().map(|v| -v * v.abs().sqrt().sin()).sum()
}

fn rastrigin(x: &[f64]) -> f64 {
    x.iter()
        .map(|v| v * v - 10.0 * (2.0 * PI * v).cos() + 10.0)
        .sum()
}

fn ackley(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let squares = x.iter().map(|v| v * v).sum::<f64>() / n;
    let cosines = x.iter().map(|v| (2.0 * PI * v).cos()).sum::<f64>() / n;
    -20.0 * (-0.2 * squares.sqrt()).exp() - cosines.exp() + 20.0 + E
}

fn griewank(x: &[f64]) -> f64 {
    let sum = x.iter().map(|v| v * v).sum::<f64>() / 4000.0;
    let prod: f64 = x
        .iter()
        .enumerate()
        .map(|(i, v)| (v / ((i + 1) as f64).sqrt()).cos())
        .product();
    sum - prod + 1.0
}

/// Boundary penalty `u(x, a, k, m)`.
fn penalty(v: f64, a: f64, k: f64, m: i32) -> f64 {
    if v > a {
        k * (v - a).powi(m)
    } else if v < -a {
        k * (-v - a).powi(m)
    } else {
        0.0
    }
}

fn penalized_1(x: &[f64]) -> f64 {
    let n = x.len();
    let y: Vec<f64> = x.iter().map(|v| 1.0 + (v + 1.0) / 4.0).collect();
    let inner: f64 = y
        .windows(2)
        .map(|w| (w[0] - 1.0).powi(2) * (1.0 + 10.0 * (PI * w[1]).sin().powi(2)))
        .sum();
    let core = 10.0 * (PI * y[0]).sin().powi(2) + inner + (y[n - 1] - 1.0).powi(2);
    PI / n as f64 * core + x.iter().map(|&v| penalty(v, 10.0, 100.0, 4)).sum::<f64>()
}

fn penalized_2(x: &[f64]) -> f64 {
    let n = x.len();
    let inner: f64 = x
        .windows(2)
        .map(|w| (w[0] - 1.0).powi(2) * (1.0 + (3.0 * PI * w[1]).sin().powi(2)))
        .sum();
    let last = x[n - 1];
    let core = (3.0 * PI * x[0]).sin().powi(2)
        + inner
        + (last - 1.0).powi(2) * (1.0 + (2.0 * PI * last).sin().powi(2));
    0.1 * core + x.iter().map(|&v| penalty(v, 5.0, 100.0, 4)).sum::<f64>()
}

/// Shekel foxholes centres: column `j` is `(FOXHOLE_GRID[j % 5], FOXHOLE_GRID[j / 5])`.
const FOXHOLE_GRID: [f64; 5] = [-32.0, -16.0, 0.0, 16.0, 32.0];

pub(crate) fn foxhole_centres() -> [[f64; 2]; 25] {
    let mut a = [[0.0; 2]; 25];
    for (j, c) in a.iter_mut().enumerate() {
        *c = [FOXHOLE_GRID[j % 5], FOXHOLE_GRID[j / 5]];
    }
    a
}

fn foxholes(x: &[f64]) -> f64 {
    let sum: f64 = foxhole_centres()
        .iter()
        .enumerate()
        .map(|(j, c)| 1.0 / ((j + 1) as f64 + (x[0] - c[0]).powi(6) + (x[1] - c[1]).powi(6)))
        .sum();
    1.0 / (1.0 / 500.0 + sum)
}

pub(crate) const KOWALIK_A: [f64; 11] = [
    0.1957, 0.1947, 0.1735, 0.1600, 0.0844, 0.0627, 0.0456, 0.0342, 0.0323, 0.0235, 0.0246,
];
/// Reciprocals of the Kowalik `b` coefficients.
pub(crate) const KOWALIK_B_INV: [f64; 11] =
    [0.25, 0.5, 1.0, 2.0, 4.0, 6.0, 8.0, 10.0, 12.0, 14.0, 16.0];

fn kowalik(x: &[f64]) -> f64 {
    KOWALIK_A
        .iter()
        .zip(KOWALIK_B_INV)
        .map(|(a, b_inv)| {
            let b = 1.0 / b_inv;
            let model = x[0] * (b * b + b * x[1]) / (b * b + b * x[2] + x[3]);
            (a - model).powi(2)
        })
        .sum()
}

fn six_hump_camel(x: &[f64]) -> f64 {
    let (a, b) = (x[0], x[1]);
    4.0 * a * a - 2.1 * a.powi(4) + a.powi(6) / 3.0 + a * b - 4.0 * b * b + 4.0 * b.powi(4)
}

fn branin(x: &[f64]) -> f64 {
    let (a, b) = (x[0], x[1]);
    (b - 5.1 / (4.0 * PI * PI) * a * a + 5.0 / PI * a - 6.0).powi(2)
        + 10.0 * (1.0 - 1.0 / (8.0 * PI)) * a.cos()
        + 10.0
}

fn goldstein_price(x: &[f64]) -> f64 {
    let (a, b) = (x[0], x[1]);
    let first = 1.0
        + (a + b + 1.0).powi(2)
            * (19.0 - 14.0 * a + 3.0 * a * a - 14.0 * b + 6.0 * a * b + 3.0 * b * b);
    let second = 30.0
        + (2.0 * a - 3.0 * b).powi(2)
            * (18.0 - 32.0 * a + 12.0 * a * a + 48.0 * b - 36.0 * a * b + 27.0 * b * b);
    first * second
}

pub(crate) const HARTMAN_C: [f64; 4] = [1.0, 1.2, 3.0, 3.2];

pub(crate) const HARTMAN3_A: [[f64; 3]; 4] = [
    [3.0, 10.0, 30.0],
    [0.1, 10.0, 35.0],
    [3.0, 10.0, 30.0],
    [0.1, 10.0, 35.0],
];

pub(crate) const HARTMAN3_P: [[f64; 3]; 4] = [
    [0.3689, 0.1170, 0.2673],
    [0.4699, 0.4387, 0.7470],
    [0.1091, 0.8732, 0.5547],
    [0.03815, 0.5743, 0.8828],
];

pub(crate) const HARTMAN6_A: [[f64; 6]; 4] = [
    [10.0, 3.0, 17.0, 3.5, 1.7, 8.0],
    [0.05, 10.0, 17.0, 0.1, 8.0, 14.0],
    [3.0, 3.5, 1.7, 10.0, 17.0, 8.0],
    [17.0, 8.0, 0.05, 10.0, 0.1, 14.0],
];

pub(crate) const HARTMAN6_P: [[f64; 6]; 4] = [
    [0.1312, 0.1696, 0.5569, 0.0124, 0.8283, 0.5886],
    [0.2329, 0.4135, 0.8307, 0.3736, 0.1004, 0.9991],
    [0.2348, 0.1451, 0.3522, 0.2883, 0.3047, 0.6650],
    [0.4047, 0.8828, 0.8732, 0.5743, 0.1091, 0.0381],
];

fn hartman<const D: usize>(x: &[f64], a: &[[f64; D]; 4], p: &[[f64; D]; 4]) -> f64 {
    -(0..4)
        .map(|i| {
            let exponent: f64 = (0..D).map(|j| a[i][j] * (x[j] - p[i][j]).powi(2)).sum();
            HARTMAN_C[i] * (-exponent).exp()
        })
        .sum::<f64>()
}

pub(crate) const SHEKEL_A: [[f64; 4]; 10] = [
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

pub(crate) const SHEKEL_C: [f64; 10] = [0.1, 0.2, 0.2, 0.4, 0.4, 0.6, 0.3, 0.7, 0.5, 0.5];

fn shekel(x: &[f64], m: usize) -> f64 {
    -(0..m)
        .map(|i| {
            let dist: f64 = x
                .iter()
                .zip(&SHEKEL_A[i])
                .map(|(v, a)| (v - a).powi(2))
                .sum();
            1.0 / (dist + SHEKEL_C[i])
        })
        .sum::<f64>()
}
