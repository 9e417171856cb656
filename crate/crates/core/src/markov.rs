//! Random-walk matrices and the Markov-time scaled adjacency `A_t`.
//!
//! For the discrete chain `A_t = D M^t` with `M = D^-1 A`; non-integer times
//! interpolate linearly between the neighbouring integer powers. For the
//! continuous process `A_t = D exp((M - I) t)`. Either way every row of
//! `A_t` sums to the node strength and the matrix is symmetric, so `A_t` is
//! itself the adjacency of an undirected weighted graph.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::matrix::Matrix;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MarkovModel {
    #[default]
    Discrete,
    Continuous,
}

impl std::fmt::Display for MarkovModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            MarkovModel::Discrete => "discrete",
            MarkovModel::Continuous => "continuous",
        })
    }
}

impl std::str::FromStr for MarkovModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "discrete" => Ok(MarkovModel::Discrete),
            "continuous" => Ok(MarkovModel::Continuous),
            other => Err(Error::domain(format!("unknown Markov model {other:?}"))),
        }
    }
}

/// Strictly increasing, non-empty list of non-negative Markov times.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarkovTimeGrid<T = f64> {
    times: Vec<T>,
}

impl<T: Scalar> MarkovTimeGrid<T> {
    pub fn new(times: Vec<T>) -> Result<Self> {
        if times.is_empty() {
            return Err(Error::domain("Markov time grid is empty"));
        }
        if !(times[0] >= T::zero()) {
            return Err(Error::domain(format!("Markov time {} is negative", times[0])));
        }
        if let Some(w) = times.windows(2).find(|w| !(w[0] < w[1])) {
            return Err(Error::domain(format!(
                "Markov times must be strictly increasing ({} then {})",
                w[0], w[1]
            )));
        }
        if let Some(t) = times.iter().find(|t| !t.is_finite()) {
            return Err(Error::domain(format!("Markov time {t} is not finite")));
        }
        Ok(MarkovTimeGrid { times })
    }

    pub fn single(t: T) -> Result<Self> {
        Self::new(vec![t])
    }

    pub fn times(&self) -> &[T] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn first(&self) -> T {
        self.times[0]
    }

    pub fn last(&self) -> T {
        self.times[self.times.len() - 1]
    }

    /// Smallest strictly positive time, if any.
    pub fn min_positive(&self) -> Option<T> {
        self.times.iter().copied().find(|&t| t > T::zero())
    }

    /// Grid restricted to `[lower, upper]`.
    pub fn window(&self, lower: T, upper: T) -> Result<Self> {
        let times: Vec<T> = self
            .times
            .iter()
            .copied()
            .filter(|&t| t >= lower && t <= upper)
            .collect();
        if times.is_empty() {
            return Err(Error::domain(format!(
                "window [{lower}, {upper}] contains no grid time"
            )));
        }
        Ok(MarkovTimeGrid { times })
    }
}

/// Parameters of a linear-then-logarithmic time grid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub t_min: f64,
    pub t_max: f64,
    pub linear_step: f64,
    pub linear_cutoff: f64,
    pub log_points: usize,
}

impl Default for GridSpec {
    /// Steps of 0.05 on `[0, 2]`, then 100 log-spaced times up to 100.
    fn default() -> Self {
        GridSpec {
            t_min: 0.0,
            t_max: 100.0,
            linear_step: 0.05,
            linear_cutoff: 2.0,
            log_points: 100,
        }
    }
}

impl GridSpec {
    pub fn build<T: Scalar>(&self) -> Result<MarkovTimeGrid<T>> {
        build_time_grid(
            self.t_min,
            self.t_max,
            self.linear_step,
            self.linear_cutoff,
            self.log_points,
        )
    }
}

/// Linear spacing of `linear_step` on `[t_min, min(linear_cutoff, t_max)]`
/// followed by `log_points` geometrically spaced times ending at `t_max`.
pub fn build_time_grid<T: Scalar>(
    t_min: f64,
    t_max: f64,
    linear_step: f64,
    linear_cutoff: f64,
    log_points: usize,
) -> Result<MarkovTimeGrid<T>> {
    if !(t_min >= 0.0 && t_min < t_max && t_max.is_finite()) {
        return Err(Error::domain(format!(
            "invalid grid bounds: need 0 <= t_min < t_max, got [{t_min}, {t_max}]"
        )));
    }
    if !(linear_step > 0.0 && linear_step.is_finite()) {
        return Err(Error::domain(format!("linear step {linear_step} must be positive")));
    }
    let round = |x: f64| (x * 1e12).round() / 1e12;
    let linear_end = linear_cutoff.min(t_max).max(t_min);
    let steps = ((linear_end - t_min) / linear_step + 1e-9).floor() as usize;
    let mut times: Vec<f64> = (0..=steps)
        .map(|k| round(t_min + k as f64 * linear_step))
        .collect();

    if log_points > 0 && linear_end < t_max {
        let start = linear_end;
        if start <= 0.0 {
            return Err(Error::domain(
                "log-spaced times need a positive linear cutoff to start from",
            ));
        }
        let ratio = (t_max / start).ln();
        times.extend((1..=log_points).map(|k| {
            if k == log_points {
                t_max
            } else {
                round(start * (ratio * k as f64 / log_points as f64).exp())
            }
        }));
    }
    times.sort_by(|a, b| a.total_cmp(b));
    times.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    MarkovTimeGrid::new(times.into_iter().map(T::of).collect())
}

/// `M = D^-1 A`. Fails on isolated nodes, whose rows are undefined.
pub fn transition_matrix<T: Scalar>(g: &Graph<T>) -> Result<Matrix<T>> {
    if let Some(i) = g.isolated_node() {
        return Err(Error::domain(format!(
            "node {:?} is isolated; its transition row is undefined",
            g.label(i)
        )));
    }
    Ok(walk_matrix(g))
}

/// Transition matrix in which isolated nodes stay put. Their rows of `A_t`
/// are zero either way because `d_i = 0`.
fn walk_matrix<T: Scalar>(g: &Graph<T>) -> Matrix<T> {
    let n = g.node_count();
    let mut m = g.adjacency().clone();
    for (i, &d) in g.strengths().iter().enumerate() {
        if d > T::zero() {
            m.row_mut(i).iter_mut().for_each(|x| *x /= d);
        } else {
            m.row_mut(i).iter_mut().for_each(|x| *x = T::zero());
            m[(i, i)] = T::one();
        }
    }
    debug_assert_eq!(m.rows(), n);
    m
}

/// `pi = d / 2m`.
pub fn stationary_distribution<T: Scalar>(g: &Graph<T>) -> Result<Vec<T>> {
    let two_m = T::two() * g.total_weight();
    if !(two_m > T::zero()) {
        return Err(Error::domain("graph has zero total weight"));
    }
    Ok(g.strengths().iter().map(|&d| d / two_m).collect())
}

/// `A_t` at one Markov time.
#[derive(Clone, Debug)]
pub struct ScaledAdjacency<T = f64> {
    pub matrix: Matrix<T>,
    pub time: T,
    pub model: MarkovModel,
}

pub fn scaled_adjacency<T: Scalar>(
    g: &Graph<T>,
    t: T,
    model: MarkovModel,
) -> Result<ScaledAdjacency<T>> {
    let grid = MarkovTimeGrid::single(t)?;
    Ok(scaled_adjacencies(g, &grid, model)?.pop().unwrap())
}

/// `exp((M - I) t)` by scaling and squaring of a truncated Taylor series.
pub fn matrix_exponential_scaled<T: Scalar>(g: &Graph<T>, t: T) -> Result<Matrix<T>> {
    if !(t >= T::zero()) || !t.is_finite() {
        return Err(Error::domain(format!("Markov time {t} must be finite and non-negative")));
    }
    let n = g.node_count();
    let mut x = walk_matrix(g);
    for i in 0..n {
        x[(i, i)] -= T::one();
    }
    Ok(expm(&x.scale(t)))
}

/// Matrix exponential by scaling and squaring.
///
/// The argument is halved until its infinity norm is at most 1/2, the Taylor
/// series is summed until the next term drops below machine precision, and
/// the result is squared back.
pub fn expm<T: Scalar>(x: &Matrix<T>) -> Matrix<T> {
    assert!(x.is_square());
    let n = x.rows();
    let norm = x.norm_inf();
    let mut squarings = 0u32;
    let half = T::of(0.5);
    let mut scaled_norm = norm;
    while scaled_norm > half {
        scaled_norm *= half;
        squarings += 1;
    }
    let a = x.scale(T::two().powi(-(squarings as i32)));

    let mut result = Matrix::identity(n);
    let mut term = Matrix::identity(n);
    let tol = T::epsilon() * T::of(0.5);
    for k in 1..=60 {
        term = term.matmul(&a).scale(T::one() / T::of_usize(k));
        result = result.lerp(T::one(), &term, T::one());
        if term.norm_inf() <= tol * result.norm_inf() {
            break;
        }
    }
    for _ in 0..squarings {
        result = result.matmul(&result);
    }
    result
}

/// `A_t` for every time of `grid`, sharing integer powers of `M` across
/// times.
pub fn scaled_adjacencies<T: Scalar>(
    g: &Graph<T>,
    grid: &MarkovTimeGrid<T>,
    model: MarkovModel,
) -> Result<Vec<ScaledAdjacency<T>>> {
    let d = g.strengths();
    match model {
        MarkovModel::Discrete => {
            let m = walk_matrix(g);
            let mut needed = BTreeMap::new();
            for &t in grid.times() {
                let (lo, hi) = bracket(t)?;
                needed.insert(lo, None);
                needed.insert(hi, None);
            }
            fill_powers(&m, &mut needed);
            let scaled = |k: u64| -> Matrix<T> {
                let p: &Matrix<T> = needed[&k].as_ref().unwrap();
                p.scale_rows(d)
            };
            let mut cache: BTreeMap<u64, Matrix<T>> = BTreeMap::new();
            let mut out = Vec::with_capacity(grid.len());
            for &t in grid.times() {
                let (lo, hi) = bracket(t)?;
                let a_lo = cache.entry(lo).or_insert_with(|| scaled(lo)).clone();
                let matrix = if lo == hi {
                    a_lo
                } else {
                    let a_hi = cache.entry(hi).or_insert_with(|| scaled(hi));
                    let frac = t - T::of(lo as f64);
                    a_lo.lerp(T::one() - frac, a_hi, frac)
                };
                out.push(ScaledAdjacency {
                    matrix: tidy(matrix),
                    time: t,
                    model,
                });
            }
            Ok(out)
        }
        MarkovModel::Continuous => grid
            .times()
            .iter()
            .map(|&t| {
                let e = matrix_exponential_scaled(g, t)?;
                Ok(ScaledAdjacency {
                    matrix: tidy(e.scale_rows(d)),
                    time: t,
                    model,
                })
            })
            .collect(),
    }
}

/// Floor and ceiling of a non-negative time as integer powers.
fn bracket<T: Scalar>(t: T) -> Result<(u64, u64)> {
    if !(t >= T::zero()) || !t.is_finite() {
        return Err(Error::domain(format!("Markov time {t} must be finite and non-negative")));
    }
    let lo = t.floor().as_f64() as u64;
    let hi = t.ceil().as_f64() as u64;
    Ok((lo, hi))
}

/// Fills `M^k` for every requested `k`. Short gaps between consecutive
/// requests are walked one sparse product at a time, long ones jump with
/// cached binary powers. Powers of `M` commute, so the sparser factor is
/// always put on the left where `matmul` skips its zeros.
fn fill_powers<T: Scalar>(m: &Matrix<T>, needed: &mut BTreeMap<u64, Option<Matrix<T>>>) {
    let n = m.rows();
    let nnz = m.as_slice().iter().filter(|&&x| x != T::zero()).count().max(1) as u64;
    let dense = (n * n) as u64;
    let mut binary: Vec<Matrix<T>> = vec![m.clone()];
    let mut current = Matrix::identity(n);
    let mut at = 0u64;
    for (&k, slot) in needed.iter_mut() {
        let mut gap = k - at;
        if gap.saturating_mul(nnz) <= dense * u64::from(gap.count_ones()) {
            for _ in 0..gap {
                current = m.matmul(&current);
            }
            gap = 0;
        }
        let mut bit = 0;
        while gap > 0 {
            while binary.len() <= bit {
                let last = binary.last().unwrap();
                let sq = last.matmul(last);
                binary.push(sq);
            }
            if gap & 1 == 1 {
                current = binary[bit].matmul(&current);
            }
            gap >>= 1;
            bit += 1;
        }
        at = k;
        *slot = Some(current.clone());
    }
}

/// Symmetrises and clears negative round-off.
fn tidy<T: Scalar>(mut m: Matrix<T>) -> Matrix<T> {
    let n = m.rows();
    let half = T::of(0.5);
    let clamp = |v: T| if v < T::zero() { T::zero() } else { v };
    for i in 0..n {
        m[(i, i)] = clamp(m[(i, i)]);
        for j in i + 1..n {
            let v = clamp(half * (m[(i, j)] + m[(j, i)]));
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    m
}
