//! Weighted stochastic block model fit by mean-field variational Bayes.
//!
//! Edge existence (`A_ij = 1` when `w_ij > floor`) is Bernoulli over every
//! vertex pair; weights of present edges are Normal. The two families enter
//! the likelihood tempered by `alpha` and `1 − alpha`:
//!
//! `ln P(A | z, θ) = α Σ_{i<j} ln Bern(A_ij | θ_{z_i z_j}) + (1 − α) Σ_{i<j, A_ij = 1} ln N(w_ij | μ_{z_i z_j}, 1/λ_{z_i z_j})`
//!
//! with a Beta prior on each `θ_rs`, a Normal-Gamma prior on each
//! `(μ_rs, λ_rs)`, block parameters shared by `(r, s)` and `(s, r)`, and a
//! uniform prior on labels. Coordinate ascent alternates the conjugate
//! update of `q(θ)` with per-vertex softmax updates of `q(z)`.

mod evidence;
mod family;

pub use evidence::exhaustive_log_evidence;
pub use family::{Beta, NormalGamma, NormalStats};

use rand::Rng;
use rand_distr::{Distribution, Gamma};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::network::WeightedNetwork;
use crate::scalar::Scalar;
use crate::seed::{self, RngInfo, Stage};

/// Below this total responsibility a block's parameters are reset to the prior.
pub const EMPTY_BLOCK_MASS: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WsbmConfig<T> {
    /// Number of blocks.
    pub k: usize,
    /// Weight of the edge-existence family; `1 − alpha` goes to weights.
    pub alpha: T,
    pub edge_prior: Beta<T>,
    pub weight_prior: NormalGamma<T>,
    pub max_iter: usize,
    /// Stop once the free energy changes by less than this.
    pub tol: T,
    pub seed: u64,
    pub restarts: usize,
    /// Weights above this count as edges.
    pub floor: T,
    /// Concentration of the symmetric Dirichlet used to initialise `q(z)`.
    pub init_concentration: T,
    /// Sweeps of tempered `q(z)` updates run before the recorded iterations,
    /// with temperature rising geometrically from `warmup_temperature` to 1.
    /// Zero disables the warm-up.
    pub warmup_steps: usize,
    pub warmup_temperature: T,
    /// Refresh `q(θ)` after every vertex instead of once per sweep.
    pub sequential: bool,
}

impl<T: Scalar> Default for WsbmConfig<T> {
    fn default() -> Self {
        Self {
            k: 4,
            alpha: T::of(0.5),
            edge_prior: Beta::new(T::one(), T::one()),
            weight_prior: NormalGamma::new(T::zero(), T::of(0.01), T::one(), T::one()),
            max_iter: 500,
            tol: T::of(1e-9),
            seed: 0,
            restarts: 5,
            floor: T::of(0.1),
            init_concentration: T::one(),
            warmup_steps: 10,
            warmup_temperature: T::of(0.01),
            sequential: true,
        }
    }
}

impl<T: Scalar> WsbmConfig<T> {
    pub fn with_k(k: usize, seed: u64) -> Self {
        Self {
            k,
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(invalid("k must be at least 1"));
        }
        if !(self.alpha >= T::zero() && self.alpha <= T::one()) {
            return Err(invalid(format!("alpha must lie in [0, 1], got {}", self.alpha)));
        }
        if !self.edge_prior.is_valid() {
            return Err(invalid(format!("invalid edge prior {:?}", self.edge_prior)));
        }
        if !self.weight_prior.is_valid() {
            return Err(invalid(format!("invalid weight prior {:?}", self.weight_prior)));
        }
        if !(self.tol > T::zero()) {
            return Err(invalid(format!("tol must be positive, got {}", self.tol)));
        }
        if self.max_iter == 0 || self.restarts == 0 {
            return Err(invalid("max_iter and restarts must be at least 1"));
        }
        if !(self.floor >= T::zero()) {
            return Err(invalid(format!("floor must be nonnegative, got {}", self.floor)));
        }
        if !(self.init_concentration > T::zero()) {
            return Err(invalid("init_concentration must be positive"));
        }
        if !(self.warmup_temperature > T::zero() && self.warmup_temperature <= T::one()) {
            return Err(invalid(format!(
                "warmup_temperature must lie in (0, 1], got {}",
                self.warmup_temperature
            )));
        }
        Ok(())
    }
}

/// Point parameters for [`log_likelihood`], `K × K` row-major and symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockParams<T> {
    pub k: usize,
    pub edge_prob: Vec<T>,
    pub weight_mean: Vec<T>,
    pub weight_precision: Vec<T>,
}

/// Variational state: `q(z)` as an `n × K` row-stochastic matrix and `q(θ)`
/// as `K × K` symmetric arrays of posterior factors.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WsbmState<T> {
    pub n: usize,
    pub k: usize,
    pub responsibilities: Vec<T>,
    pub edge_params: Vec<Beta<T>>,
    pub weight_params: Vec<NormalGamma<T>>,
    pub free_energy_trace: Vec<T>,
}

impl<T: Scalar> WsbmState<T> {
    pub fn responsibility(&self, i: usize) -> &[T] {
        &self.responsibilities[i * self.k..(i + 1) * self.k]
    }

    /// Argmax of each responsibility row, ties to the lower block.
    pub fn hard_labels(&self) -> Vec<usize> {
        (0..self.n)
            .map(|i| {
                let row = self.responsibility(i);
                let mut best = 0;
                for r in 1..self.k {
                    if row[r] > row[best] {
                        best = r;
                    }
                }
                best
            })
            .collect()
    }

    /// Posterior mean edge probability of each block pair.
    pub fn edge_probability(&self) -> Vec<Vec<T>> {
        self.block_matrix(|r, s| self.edge_params[r * self.k + s].mean())
    }

    /// Posterior mean edge weight of each block pair.
    pub fn weight_mean(&self) -> Vec<Vec<T>> {
        self.block_matrix(|r, s| self.weight_params[r * self.k + s].mu)
    }

    fn block_matrix(&self, f: impl Fn(usize, usize) -> T) -> Vec<Vec<T>> {
        (0..self.k).map(|r| (0..self.k).map(|s| f(r, s)).collect()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WsbmFit<T> {
    pub config: WsbmConfig<T>,
    pub state: WsbmState<T>,
    pub labels: Vec<usize>,
    pub free_energy: T,
    pub iterations: usize,
    pub converged: bool,
    /// Index of the restart that won.
    pub restart: usize,
    pub rng: RngInfo,
}

/// What the fit report carries: enough for a block heatmap downstream.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WsbmReport<'a, T> {
    pub config: &'a WsbmConfig<T>,
    pub rng: &'a RngInfo,
    pub restart: usize,
    pub iterations: usize,
    pub converged: bool,
    pub free_energy: T,
    pub free_energy_trace: &'a [T],
    pub labels: &'a [usize],
    pub edge_probability: Vec<Vec<T>>,
    pub weight_mean: Vec<Vec<T>>,
}

impl<T: Scalar> WsbmFit<T> {
    pub fn report(&self) -> WsbmReport<'_, T> {
        WsbmReport {
            config: &self.config,
            rng: &self.rng,
            restart: self.restart,
            iterations: self.iterations,
            converged: self.converged,
            free_energy: self.free_energy,
            free_energy_trace: &self.state.free_energy_trace,
            labels: &self.labels,
            edge_probability: self.state.edge_probability(),
            weight_mean: self.state.weight_mean(),
        }
    }
}

/// Edge indicators and weights for every ordered pair, row-major.
pub(crate) struct Observations<T> {
    pub present: Vec<bool>,
    pub weight: Vec<T>,
}

impl<T: Scalar> Observations<T> {
    pub fn new(net: &WeightedNetwork<T>, floor: T) -> Self {
        let weight = net.weights().to_vec();
        let present = weight.iter().map(|&w| w > floor).collect();
        Self {
            present,
            weight,
        }
    }
}

/// Tempered log-likelihood of hard labels under point parameters, including
/// the Normal normalising constants.
pub fn log_likelihood<T: Scalar>(
    net: &WeightedNetwork<T>,
    labels: &[usize],
    params: &BlockParams<T>,
    alpha: T,
    floor: T,
) -> Result<T> {
    let n = net.n();
    let k = params.k;
    if labels.len() != n {
        return Err(invalid(format!("expected {n} labels, got {}", labels.len())));
    }
    if let Some(&bad) = labels.iter().find(|&&l| l >= k) {
        return Err(invalid(format!("label {bad} is outside 0..{k}")));
    }
    if params.edge_prob.len() != k * k || params.weight_mean.len() != k * k || params.weight_precision.len() != k * k {
        return Err(invalid("block parameters must be K × K"));
    }
    let half = T::of(0.5);
    let beta = T::one() - alpha;
    let mut total = T::zero();
    for i in 0..n {
        for j in i + 1..n {
            let b = labels[i] * k + labels[j];
            let w = net.weight(i, j);
            let theta = params.edge_prob[b];
            if w > floor {
                total += alpha * theta.ln();
                if beta > T::zero() {
                    let lam = params.weight_precision[b];
                    let d = w - params.weight_mean[b];
                    total += beta * (half * lam.ln() - half * family::ln_2pi::<T>() - half * lam * d * d);
                }
            } else if alpha > T::zero() {
                total += alpha * (T::one() - theta).ln();
            }
        }
    }
    Ok(total)
}

/// Expected per-pair log-likelihood terms under the current `q(θ)`.
struct Expectations<T> {
    k: usize,
    /// `α E ln(1 − θ_rs)`
    absent: Vec<T>,
    /// `α E ln θ_rs + (1 − α)(½ E ln λ − ½ ln 2π − ½/κ)`, plus the part
    /// depending on `x` from `precision` and `mean`.
    present_const: Vec<T>,
    /// `(1 − α) E[λ_rs] / 2`
    precision: Vec<T>,
    mean: Vec<T>,
}

impl<T: Scalar> Expectations<T> {
    fn new(state: &WsbmState<T>, alpha: T) -> Self {
        let half = T::of(0.5);
        let beta = T::one() - alpha;
        let kk = state.k * state.k;
        let mut e = Self {
            k: state.k,
            absent: Vec::with_capacity(kk),
            present_const: Vec::with_capacity(kk),
            precision: Vec::with_capacity(kk),
            mean: Vec::with_capacity(kk),
        };
        for b in 0..kk {
            let edge = &state.edge_params[b];
            let ng = &state.weight_params[b];
            e.absent.push(alpha * edge.e_ln1m());
            e.present_const.push(
                alpha * edge.e_ln()
                    + beta * (half * ng.e_ln_precision() - half * family::ln_2pi::<T>() - half / ng.kappa),
            );
            e.precision.push(beta * half * ng.e_precision());
            e.mean.push(ng.mu);
        }
        e
    }

    #[inline]
    fn term(&self, present: bool, x: T, r: usize, s: usize) -> T {
        let b = r * self.k + s;
        if present {
            let d = x - self.mean[b];
            self.present_const[b] - self.precision[b] * d * d
        } else {
            self.absent[b]
        }
    }
}

fn check_state<T: Scalar>(state: &WsbmState<T>) -> Result<()> {
    for (b, (e, w)) in state.edge_params.iter().zip(&state.weight_params).enumerate() {
        if !e.is_valid() || !w.is_valid() {
            return Err(Error::Numeric(format!(
                "degenerate posterior for block pair ({}, {}): edge {e:?}, weight {w:?}",
                b / state.k,
                b % state.k
            )));
        }
    }
    if let Some(q) = state.responsibilities.iter().find(|q| !(q.is_finite() && **q >= T::zero())) {
        return Err(Error::Numeric(format!("responsibility {q} is not a probability")));
    }
    Ok(())
}

/// Variational free energy `E_q[ln p(A, z, θ) − ln q(z, θ)]` in closed form.
pub fn free_energy<T: Scalar>(net: &WeightedNetwork<T>, state: &WsbmState<T>, config: &WsbmConfig<T>) -> Result<T> {
    if state.n != net.n() || state.k != config.k {
        return Err(invalid("state does not match the network or configuration"));
    }
    check_state(state)?;
    let obs = Observations::new(net, config.floor);
    Ok(free_energy_of(&obs, state, config))
}

fn free_energy_of<T: Scalar>(obs: &Observations<T>, state: &WsbmState<T>, config: &WsbmConfig<T>) -> T {
    let (n, k) = (state.n, state.k);
    let e = Expectations::new(state, config.alpha);
    let mut total = T::zero();
    for i in 0..n {
        let qi = state.responsibility(i);
        for j in i + 1..n {
            let qj = state.responsibility(j);
            let present = obs.present[i * n + j];
            let x = obs.weight[i * n + j];
            for r in 0..k {
                if qi[r] == T::zero() {
                    continue;
                }
                let mut inner = T::zero();
                for s in 0..k {
                    inner += qj[s] * e.term(present, x, r, s);
                }
                total += qi[r] * inner;
            }
        }
    }
    let ln_prior_z = -T::of_usize(k).ln();
    for &q in &state.responsibilities {
        if q > T::zero() {
            total += q * (ln_prior_z - q.ln());
        }
    }
    for r in 0..k {
        for s in r..k {
            let b = r * k + s;
            total -= state.edge_params[b].kl(&config.edge_prior);
            total -= state.weight_params[b].kl(&config.weight_prior);
        }
    }
    total
}

/// Conjugate update of every block pair from expected sufficient statistics.
fn update_theta<T: Scalar>(obs: &Observations<T>, state: &mut WsbmState<T>, config: &WsbmConfig<T>) {
    let (n, k) = (state.n, state.k);
    let mut ones = vec![T::zero(); k * k];
    let mut zeros = vec![T::zero(); k * k];
    let mut stats = vec![NormalStats::default(); k * k];
    for i in 0..n {
        let qi = state.responsibility(i);
        for j in i + 1..n {
            let qj = state.responsibility(j);
            let present = obs.present[i * n + j];
            let x = obs.weight[i * n + j];
            for r in 0..k {
                for s in r..k {
                    let c = if r == s {
                        qi[r] * qj[r]
                    } else {
                        qi[r] * qj[s] + qi[s] * qj[r]
                    };
                    let b = r * k + s;
                    if present {
                        ones[b] += c;
                        stats[b].add(c, x);
                    } else {
                        zeros[b] += c;
                    }
                }
            }
        }
    }
    let mass: Vec<T> = (0..k)
        .map(|r| (0..n).map(|i| state.responsibility(i)[r]).sum())
        .collect();
    let empty = T::of(EMPTY_BLOCK_MASS);
    let alpha = config.alpha;
    let beta = T::one() - alpha;
    for r in 0..k {
        for s in r..k {
            let b = r * k + s;
            let (edge, weight) = if mass[r] < empty || mass[s] < empty {
                (config.edge_prior, config.weight_prior)
            } else {
                (
                    config.edge_prior.update(alpha * ones[b], alpha * zeros[b]),
                    config.weight_prior.update(&stats[b].scaled(beta)),
                )
            };
            state.edge_params[b] = edge;
            state.weight_params[b] = weight;
            state.edge_params[s * k + r] = edge;
            state.weight_params[s * k + r] = weight;
        }
    }
}

/// Softmax update of every vertex's responsibilities in index order.
fn update_z<T: Scalar>(
    obs: &Observations<T>,
    state: &mut WsbmState<T>,
    config: &WsbmConfig<T>,
    incremental: bool,
    temperature: T,
) {
    let (n, k) = (state.n, state.k);
    let mut e = Expectations::new(state, config.alpha);
    let mut logits = vec![T::zero(); k];
    for i in 0..n {
        if incremental && i > 0 {
            update_theta(obs, state, config);
            e = Expectations::new(state, config.alpha);
        }
        logits.iter_mut().for_each(|l| *l = T::zero());
        for j in 0..n {
            if j == i {
                continue;
            }
            let present = obs.present[i * n + j];
            let x = obs.weight[i * n + j];
            let qj = &state.responsibilities[j * k..(j + 1) * k];
            for (r, logit) in logits.iter_mut().enumerate() {
                let mut acc = T::zero();
                for (s, &q) in qj.iter().enumerate() {
                    acc += q * e.term(present, x, r, s);
                }
                *logit += acc;
            }
        }
        // the uniform label prior is a constant shift and cancels
        let top = logits.iter().copied().fold(T::neg_infinity(), T::max);
        let mut norm = T::zero();
        for l in logits.iter_mut() {
            *l = ((*l - top) / temperature).exp();
            norm += *l;
        }
        for (r, l) in logits.iter().enumerate() {
            state.responsibilities[i * k + r] = *l / norm;
        }
    }
}

fn initial_state<T: Scalar>(n: usize, config: &WsbmConfig<T>, rng: &mut impl Rng) -> Result<WsbmState<T>> {
    let k = config.k;
    let gamma = Gamma::new(config.init_concentration.as_f64(), 1.0)
        .map_err(|e| invalid(format!("bad Dirichlet concentration: {e}")))?;
    let mut responsibilities = Vec::with_capacity(n * k);
    for _ in 0..n {
        let mut row: Vec<f64> = (0..k).map(|_| gamma.sample(rng).max(f64::MIN_POSITIVE)).collect();
        let sum: f64 = row.iter().sum();
        row.iter_mut().for_each(|x| *x /= sum);
        responsibilities.extend(row.into_iter().map(T::of));
    }
    Ok(prior_state(n, config, responsibilities))
}

fn prior_state<T: Scalar>(n: usize, config: &WsbmConfig<T>, responsibilities: Vec<T>) -> WsbmState<T> {
    let kk = config.k * config.k;
    WsbmState {
        n,
        k: config.k,
        responsibilities,
        edge_params: vec![config.edge_prior; kk],
        weight_params: vec![config.weight_prior; kk],
        free_energy_trace: Vec::new(),
    }
}

/// Coordinate ascent from the given `n × K` responsibilities (rows are
/// renormalised). Single restart; `fit` wraps this.
pub fn fit_from<T: Scalar>(net: &WeightedNetwork<T>, config: &WsbmConfig<T>, init: &[T]) -> Result<WsbmFit<T>> {
    config.validate()?;
    let n = net.n();
    let k = config.k;
    if init.len() != n * k {
        return Err(invalid(format!("initial responsibilities must be {n} × {k}")));
    }
    let mut responsibilities = init.to_vec();
    for row in responsibilities.chunks_mut(k) {
        let sum: T = row.iter().copied().sum();
        if !(sum > T::zero()) || row.iter().any(|&q| !(q >= T::zero())) {
            return Err(invalid("initial responsibility rows must be nonnegative with positive sum"));
        }
        row.iter_mut().for_each(|q| *q /= sum);
    }
    let obs = Observations::new(net, config.floor);
    let mut state = prior_state(n, config, responsibilities);
    let steps = config.warmup_steps;
    for step in 0..steps {
        let t = config.warmup_temperature.powf(T::one() - T::of_usize(step) / T::of_usize(steps));
        update_theta(&obs, &mut state, config);
        update_z(&obs, &mut state, config, config.sequential, t);
    }
    let mut converged = false;
    let mut iterations = 0;
    let mut previous: Option<T> = None;
    while iterations < config.max_iter {
        iterations += 1;
        update_theta(&obs, &mut state, config);
        update_z(&obs, &mut state, config, config.sequential, T::one());
        check_state(&state)?;
        let f = free_energy_of(&obs, &state, config);
        state.free_energy_trace.push(f);
        if let Some(p) = previous {
            if (f - p).abs() < config.tol {
                converged = true;
                break;
            }
        }
        previous = Some(f);
    }
    // leave q(θ) consistent with the final q(z)
    update_theta(&obs, &mut state, config);
    let free_energy = free_energy_of(&obs, &state, config);
    if let Some(last) = state.free_energy_trace.last_mut() {
        if free_energy > *last {
            state.free_energy_trace.push(free_energy);
        }
    }
    let labels = state.hard_labels();
    Ok(WsbmFit {
        config: config.clone(),
        state,
        labels,
        free_energy,
        iterations,
        converged,
        restart: 0,
        rng: RngInfo::new(config.seed, Stage::Wsbm),
    })
}

/// Best of `config.restarts` fits from seeded Dirichlet initialisations.
/// Restarts run in parallel; the highest free energy wins, ties to the
/// lower restart index.
pub fn fit<T: Scalar>(net: &WeightedNetwork<T>, config: &WsbmConfig<T>) -> Result<WsbmFit<T>> {
    config.validate()?;
    let runs: Vec<Result<WsbmFit<T>>> = (0..config.restarts)
        .into_par_iter()
        .map(|restart| {
            let mut rng = seed::stream(config.seed, Stage::Wsbm, restart as u32);
            let init = initial_state(net.n(), config, &mut rng)?;
            let mut fit = fit_from(net, config, &init.responsibilities)?;
            fit.restart = restart;
            Ok(fit)
        })
        .collect();
    let mut best: Option<WsbmFit<T>> = None;
    for run in runs {
        let run = run?;
        if best.as_ref().is_none_or(|b| run.free_energy > b.free_energy) {
            best = Some(run);
        }
    }
    Ok(best.expect("at least one restart"))
}
