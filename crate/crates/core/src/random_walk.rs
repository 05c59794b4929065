//! Discrete-time random walks: convolution powers on hypergroups, Monte Carlo
//! walks driven by kernel families on finite spaces and balls, and the
//! comparison of the projected walk with the hypergroup walk.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::dt_graph::{Ball, BallKernels, DeformedPoly, PolyHypergroup};
use crate::error::{Error, Result};
use crate::hypergroup::FiniteHypergroup;
use crate::scalar::{Rational, Scalar, EQ_TOL};
use crate::scheme::{GeneralizedScheme, RelationPartition};

/// Default support bound for exact convolution powers on [`PolyHypergroup`].
pub const POLY_SUPPORT_CAP: usize = 4096;

/// A probability vector over `D`, or over `0..len` of `N_0` for polynomial
/// hypergroups.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepDistribution<T> {
    weights: Vec<T>,
}

impl<T: Scalar> StepDistribution<T> {
    pub fn new(weights: Vec<T>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::invalid("empty step distribution"));
        }
        if let Some(i) = weights.iter().position(|w| *w < T::zero()) {
            return Err(Error::invalid(format!("negative step weight at {i}: {}", weights[i])));
        }
        let total = weights.iter().fold(T::zero(), |a, b| a + b.clone());
        if !total.near(&T::one(), EQ_TOL) {
            return Err(Error::invalid(format!("step weights sum to {total}, not 1")));
        }
        Ok(Self { weights })
    }

    pub fn delta(i: usize) -> Self {
        let mut weights = vec![T::zero(); i + 1];
        weights[i] = T::one();
        Self { weights }
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    /// Largest index carrying positive mass.
    pub fn max_support(&self) -> usize {
        self.weights.iter().rposition(|w| *w > T::zero()).unwrap_or(0)
    }

    pub fn to_f64(&self) -> StepDistribution<f64> {
        StepDistribution { weights: self.weights.iter().map(Scalar::to_f64).collect() }
    }
}

/// A convolution algebra of finitely supported measures given as dense vectors.
pub trait Convolution {
    type Value: Scalar;

    /// `delta_e` as a dense vector.
    fn unit(&self) -> Vec<Self::Value>;

    fn convolve(&self, mu: &[Self::Value], nu: &[Self::Value]) -> Result<Vec<Self::Value>>;

    /// Largest index a measure may reach, if bounded by a cap.
    fn support_cap(&self) -> Option<usize> {
        None
    }

    /// Number of elements when the hypergroup is finite.
    fn finite_len(&self) -> Option<usize> {
        None
    }
}

impl<T: Scalar> Convolution for FiniteHypergroup<T> {
    type Value = T;

    fn unit(&self) -> Vec<T> {
        self.delta(self.identity())
    }

    fn convolve(&self, mu: &[T], nu: &[T]) -> Result<Vec<T>> {
        let pad = |v: &[T]| -> Result<Vec<T>> {
            if v.len() > self.n() {
                return Err(Error::ParameterMismatch(format!(
                    "measure of length {} on {} elements",
                    v.len(),
                    self.n()
                )));
            }
            let mut out = v.to_vec();
            out.resize(self.n(), T::zero());
            Ok(out)
        };
        Ok(FiniteHypergroup::convolve(self, &pad(mu)?, &pad(nu)?))
    }

    fn finite_len(&self) -> Option<usize> {
        Some(self.n())
    }
}

impl Convolution for PolyHypergroup {
    type Value = Rational;

    fn unit(&self) -> Vec<Rational> {
        vec![Rational::from_int(1)]
    }

    fn convolve(&self, mu: &[Rational], nu: &[Rational]) -> Result<Vec<Rational>> {
        Ok(PolyHypergroup::convolve(self, mu, nu))
    }

    fn support_cap(&self) -> Option<usize> {
        Some(POLY_SUPPORT_CAP)
    }
}

impl Convolution for DeformedPoly {
    type Value = f64;

    fn unit(&self) -> Vec<f64> {
        vec![1.0]
    }

    fn convolve(&self, mu: &[f64], nu: &[f64]) -> Result<Vec<f64>> {
        let len = (mu.len() + nu.len()).saturating_sub(1).max(1);
        let mut out = vec![0.0; len];
        for (m, a) in mu.iter().enumerate().filter(|(_, a)| **a != 0.0) {
            for (n, b) in nu.iter().enumerate().filter(|(_, b)| **b != 0.0) {
                let (lo, g) = self.g(m, n)?;
                for (t, gk) in g.iter().enumerate() {
                    out[lo + t] += a * b * gk;
                }
            }
        }
        Ok(out)
    }

    fn support_cap(&self) -> Option<usize> {
        Some(self.max_degree())
    }
}

/// `mu^{*t}`, with `mu^{*0} = delta_e`.
pub fn convolution_power<H: Convolution>(h: &H, mu: &StepDistribution<H::Value>, t: usize) -> Result<Vec<H::Value>> {
    if let Some(n) = h.finite_len() {
        if mu.weights().len() > n {
            return Err(Error::ParameterMismatch(format!(
                "step distribution of length {} on {n} elements",
                mu.weights().len()
            )));
        }
    }
    if let Some(cap) = h.support_cap() {
        let needed = t.saturating_mul(mu.max_support());
        if needed > cap {
            return Err(Error::SupportCap { needed, cap });
        }
    }
    let trimmed = &mu.weights()[..=mu.max_support()];
    let mut acc = h.unit();
    for _ in 0..t {
        acc = h.convolve(&acc, trimmed)?;
    }
    Ok(acc)
}

#[derive(Debug, Clone)]
struct Row {
    targets: Vec<usize>,
    probs: Vec<f64>,
    cumulative: Vec<f64>,
}

impl Row {
    fn new(entries: impl IntoIterator<Item = (usize, f64)>) -> Self {
        let (targets, probs): (Vec<usize>, Vec<f64>) = entries.into_iter().filter(|(_, p)| *p > 0.0).unzip();
        let mut total = 0.0;
        let cumulative = probs
            .iter()
            .map(|p| {
                total += p;
                total
            })
            .collect();
        Self { targets, probs, cumulative }
    }

    fn sample(&self, u: f64) -> usize {
        let total = *self.cumulative.last().expect("nonempty row");
        let i = self.cumulative.partition_point(|&c| c <= u * total);
        self.targets[i.min(self.targets.len() - 1)]
    }
}

#[derive(Debug, Clone)]
enum Labels {
    Partition(RelationPartition),
    Ball(Ball),
}

/// A family of Markov kernels `K_h` on a finite point set, with the relation
/// map `pi(x, y)` that indexes them.
#[derive(Debug, Clone)]
pub struct WalkKernels {
    n_points: usize,
    /// `rows[h][x]`, `None` when the row is not available.
    rows: Vec<Vec<Option<Row>>>,
    labels: Labels,
}

impl WalkKernels {
    pub fn from_scheme(gs: &GeneralizedScheme<f64>) -> Self {
        let n = gs.n_points();
        let rows = gs
            .kernels()
            .iter()
            .map(|k| (0..n).map(|x| Some(Row::new(k.row(x).iter().copied().enumerate()))).collect())
            .collect();
        Self { n_points: n, rows, labels: Labels::Partition(gs.partition().clone()) }
    }

    /// Kernels on a ball; `pi(x, y)` is the graph distance.
    pub fn from_ball(kernels: &BallKernels) -> Self {
        let ball = kernels.ball();
        let n = ball.len();
        let rows = (0..=ball.radius())
            .map(|h| (0..n).map(|x| kernels.row(h, x).map(|r| Row::new(r.iter().copied()))).collect())
            .collect();
        Self { n_points: n, rows, labels: Labels::Ball(ball.clone()) }
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn n_labels(&self) -> usize {
        self.rows.len()
    }

    /// `pi(x, y)`.
    pub fn label(&self, x: usize, y: usize) -> usize {
        match &self.labels {
            Labels::Partition(p) => p.label(x, y),
            Labels::Ball(b) => b.dist(x, y),
        }
    }

    /// `K_h(x, .)` as `(target, probability)` pairs.
    pub fn row(&self, h: usize, x: usize) -> Option<Vec<(usize, f64)>> {
        let row = self.rows.get(h)?.get(x)?.as_ref()?;
        Some(row.targets.iter().copied().zip(row.probs.iter().copied()).collect())
    }

    /// Refuses walks that could need a kernel row outside the valid region.
    fn check_walk(&self, start: usize, mu: &StepDistribution<f64>, steps: usize) -> Result<()> {
        if start >= self.n_points {
            return Err(Error::invalid(format!("start {start} outside {} points", self.n_points)));
        }
        if mu.max_support() >= self.n_labels() {
            return Err(Error::ParameterMismatch(format!(
                "step distribution reaches label {}, family has {}",
                mu.max_support(),
                self.n_labels()
            )));
        }
        if let Labels::Ball(ball) = &self.labels {
            let needed = ball.depth(start) + steps.saturating_mul(mu.max_support());
            if needed > ball.radius() {
                return Err(Error::WalkWouldExitBall { needed, radius: ball.radius() });
            }
        }
        Ok(())
    }
}

/// Final-state counts of independent walks.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WalkResult {
    pub start: usize,
    pub steps: usize,
    pub trials: usize,
    pub seed: u64,
    pub mu: Vec<f64>,
    /// `counts[x]` = number of trials ending at `x`.
    pub counts: Vec<u64>,
}

impl WalkResult {
    /// Empirical distribution of the final state.
    pub fn empirical(&self) -> Vec<f64> {
        let n = self.trials.max(1) as f64;
        self.counts.iter().map(|&c| c as f64 / n).collect()
    }
}

fn cumulative(w: &[f64]) -> Vec<f64> {
    let mut total = 0.0;
    w.iter()
        .map(|p| {
            total += p;
            total
        })
        .collect()
}

/// Runs `trials` independent walks from `start`: each step draws `h ~ mu`,
/// then `y ~ K_h(x, .)`. Trial `i` uses the ChaCha8 stream `i` of `seed`, so
/// the result does not depend on the thread count.
pub fn simulate_walk(
    kernels: &WalkKernels,
    start: usize,
    mu: &StepDistribution<f64>,
    steps: usize,
    trials: usize,
    seed: u64,
) -> Result<WalkResult> {
    kernels.check_walk(start, mu, steps)?;
    let mu_cum = cumulative(mu.weights());
    let mu_total = *mu_cum.last().expect("nonempty");
    let run = |trial: usize| -> usize {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(trial as u64);
        let mut x = start;
        for _ in 0..steps {
            let u: f64 = rng.random();
            let h = mu_cum.partition_point(|&c| c <= u * mu_total).min(mu_cum.len() - 1);
            let row = kernels.rows[h][x].as_ref().expect("checked interior");
            x = row.sample(rng.random());
        }
        x
    };
    let counts = (0..trials)
        .into_par_iter()
        .fold(
            || vec![0u64; kernels.n_points],
            |mut acc, t| {
                acc[run(t)] += 1;
                acc
            },
        )
        .reduce(
            || vec![0u64; kernels.n_points],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    Ok(WalkResult { start, steps, trials, seed, mu: mu.weights().to_vec(), counts })
}

/// Exact law of the walk after `steps` steps, by pushing the distribution
/// vector through `sum_h mu(h) K_h`.
pub fn propagate(kernels: &WalkKernels, start: usize, mu: &StepDistribution<f64>, steps: usize) -> Result<Vec<f64>> {
    kernels.check_walk(start, mu, steps)?;
    let mut v = vec![0.0; kernels.n_points];
    v[start] = 1.0;
    for _ in 0..steps {
        let mut next = vec![0.0; kernels.n_points];
        for (x, &vx) in v.iter().enumerate().filter(|(_, p)| **p != 0.0) {
            for (h, &m) in mu.weights().iter().enumerate().filter(|(_, m)| **m != 0.0) {
                let row = kernels.rows[h][x].as_ref().expect("checked interior");
                for (&y, &p) in row.targets.iter().zip(&row.probs) {
                    next[y] += vx * m * p;
                }
            }
        }
        v = next;
    }
    Ok(v)
}

/// Pushes a law on points to a law on labels via `x -> pi(start, x)`.
pub fn project(kernels: &WalkKernels, start: usize, law: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; kernels.n_labels()];
    for (x, &p) in law.iter().enumerate().filter(|(_, p)| **p != 0.0) {
        let l = kernels.label(start, x);
        if l >= out.len() {
            out.resize(l + 1, 0.0);
        }
        out[l] += p;
    }
    out
}

/// `(1/2) sum |p - q|`, padding the shorter vector with zeros.
pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    let n = p.len().max(q.len());
    let at = |v: &[f64], i: usize| v.get(i).copied().unwrap_or(0.0);
    0.5 * (0..n).map(|i| (at(p, i) - at(q, i)).abs()).sum::<f64>()
}

/// Comparison of a simulated walk with the hypergroup random walk.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProjectionReport {
    /// Projected empirical law.
    pub empirical: Vec<f64>,
    /// Projected law from exact propagation.
    pub exact_projection: Vec<f64>,
    /// `mu^{*steps}` on the hypergroup.
    pub convolution_power: Vec<f64>,
    /// Total variation between `empirical` and `convolution_power`.
    pub tv: f64,
    /// Largest `|exact_projection - convolution_power|`.
    pub propagation_residual: f64,
}

/// Projects the final states of `walk` by `pi(start, .)` and compares the
/// result, and the exactly propagated law, with `mu^{*steps}` on `h`.
pub fn projection_check<H: Convolution>(
    walk: &WalkResult,
    kernels: &WalkKernels,
    h: &H,
    mu: &StepDistribution<H::Value>,
    steps: usize,
) -> Result<ProjectionReport> {
    let mu_f = mu.to_f64();
    if walk.steps != steps {
        return Err(Error::ParameterMismatch(format!("walk has {} steps, check asks for {steps}", walk.steps)));
    }
    if total_variation(&walk.mu, mu_f.weights()) > EQ_TOL {
        return Err(Error::ParameterMismatch("walk used a different step distribution".into()));
    }
    if walk.counts.len() != kernels.n_points() {
        return Err(Error::ParameterMismatch(format!(
            "walk has {} states, kernels have {} points",
            walk.counts.len(),
            kernels.n_points()
        )));
    }
    if let Some(n) = h.finite_len() {
        if n != kernels.n_labels() {
            return Err(Error::ParameterMismatch(format!(
                "hypergroup has {n} elements, kernels have {} labels",
                kernels.n_labels()
            )));
        }
    }
    let power: Vec<f64> = convolution_power(h, mu, steps)?.iter().map(Scalar::to_f64).collect();
    let empirical = project(kernels, walk.start, &walk.empirical());
    let exact_projection = project(kernels, walk.start, &propagate(kernels, walk.start, &mu_f, steps)?);
    let n = exact_projection.len().max(power.len());
    let at = |v: &[f64], i: usize| v.get(i).copied().unwrap_or(0.0);
    let propagation_residual = (0..n).map(|i| (at(&exact_projection, i) - at(&power, i)).abs()).fold(0.0, f64::max);
    Ok(ProjectionReport {
        tv: total_variation(&empirical, &power),
        empirical,
        exact_projection,
        convolution_power: power,
        propagation_residual,
    })
}

/// Largest `|(omega_X K_h)(y) - omega_X(y)|` over `h, y`.
pub fn omega_invariance_residual<T: Scalar>(gs: &GeneralizedScheme<T>) -> f64 {
    let w = gs.omega_x();
    let n = gs.n_points();
    gs.kernels()
        .iter()
        .flat_map(|k| {
            (0..n).map(move |y| {
                let pushed = (0..n).fold(T::zero(), |acc, x| acc + w[x].clone() * k.row(x)[y].clone());
                (pushed - w[y].clone()).abs_f64()
            })
        })
        .fold(0.0, f64::max)
}
