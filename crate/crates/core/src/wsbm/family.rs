//! Beta and Normal-Gamma factors with the expectations and divergences the
//! variational updates need. Special functions are evaluated in `f64`.

use serde::Serialize;
use statrs::function::gamma::{digamma, ln_gamma};

use crate::scalar::Scalar;

pub(crate) fn lgamma<T: Scalar>(x: T) -> T {
    T::of(ln_gamma(x.as_f64()))
}

pub(crate) fn psi<T: Scalar>(x: T) -> T {
    T::of(digamma(x.as_f64()))
}

pub(crate) fn ln_beta_fn<T: Scalar>(a: T, b: T) -> T {
    lgamma(a) + lgamma(b) - lgamma(a + b)
}

pub(crate) fn ln_2pi<T: Scalar>() -> T {
    T::of((2.0 * std::f64::consts::PI).ln())
}

/// `Beta(a, b)` over an edge probability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Beta<T> {
    pub a: T,
    pub b: T,
}

impl<T: Scalar> Beta<T> {
    pub fn new(a: T, b: T) -> Self {
        Self { a, b }
    }

    pub fn is_valid(&self) -> bool {
        self.a > T::zero() && self.b > T::zero() && self.a.is_finite() && self.b.is_finite()
    }

    pub fn mean(&self) -> T {
        self.a / (self.a + self.b)
    }

    /// `E[ln θ]`.
    pub fn e_ln(&self) -> T {
        psi(self.a) - psi(self.a + self.b)
    }

    /// `E[ln(1 − θ)]`.
    pub fn e_ln1m(&self) -> T {
        psi(self.b) - psi(self.a + self.b)
    }

    /// Posterior after (possibly fractional) success and failure counts.
    pub fn update(&self, successes: T, failures: T) -> Self {
        Self::new(self.a + successes, self.b + failures)
    }

    /// `KL(self ‖ prior)`.
    pub fn kl(&self, prior: &Self) -> T {
        let (a, b, a0, b0) = (self.a, self.b, prior.a, prior.b);
        ln_beta_fn(a0, b0) - ln_beta_fn(a, b) + (a - a0) * psi(a) + (b - b0) * psi(b)
            + (a0 - a + b0 - b) * psi(a + b)
    }

    /// `ln ∫ θ^s (1 − θ)^f Beta(θ | a, b) dθ` for fractional `s`, `f`.
    pub fn ln_marginal(&self, successes: T, failures: T) -> T {
        ln_beta_fn(self.a + successes, self.b + failures) - ln_beta_fn(self.a, self.b)
    }
}

/// Normal-Gamma over a (mean, precision) pair: `λ ~ Gamma(a, rate b)` and
/// `μ | λ ~ N(mu, 1/(kappa λ))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormalGamma<T> {
    pub mu: T,
    pub kappa: T,
    pub a: T,
    pub b: T,
}

/// Weighted sufficient statistics `(Σc, Σc·x, Σc·x²)` of Normal observations.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct NormalStats<T> {
    pub count: T,
    pub sum: T,
    pub sum_sq: T,
}

impl<T: Scalar> NormalGamma<T> {
    pub fn new(mu: T, kappa: T, a: T, b: T) -> Self {
        Self { mu, kappa, a, b }
    }

    pub fn is_valid(&self) -> bool {
        self.kappa > T::zero()
            && self.a > T::zero()
            && self.b > T::zero()
            && self.mu.is_finite()
            && self.kappa.is_finite()
            && self.a.is_finite()
            && self.b.is_finite()
    }

    /// `E[λ]`.
    pub fn e_precision(&self) -> T {
        self.a / self.b
    }

    /// `E[ln λ]`.
    pub fn e_ln_precision(&self) -> T {
        psi(self.a) - self.b.ln()
    }

    /// `E[λ (x − μ)²] = (a/b)(x − mu)² + 1/kappa`.
    pub fn e_scaled_sq(&self, x: T) -> T {
        let d = x - self.mu;
        self.e_precision() * d * d + T::one() / self.kappa
    }

    /// `E[ln N(x | μ, 1/λ)]`.
    pub fn e_ln_density(&self, x: T) -> T {
        let half = T::of(0.5);
        half * self.e_ln_precision() - half * ln_2pi::<T>() - half * self.e_scaled_sq(x)
    }

    pub fn update(&self, stats: &NormalStats<T>) -> Self {
        let half = T::of(0.5);
        let kappa = self.kappa + stats.count;
        let mu = (self.kappa * self.mu + stats.sum) / kappa;
        let a = self.a + half * stats.count;
        let spread = stats.sum_sq + self.kappa * self.mu * self.mu - kappa * mu * mu;
        // spread is a variance-like sum and only rounding makes it negative
        let b = self.b + half * spread.max(T::zero());
        Self::new(mu, kappa, a, b)
    }

    /// `KL(self ‖ prior)`: the Gamma part plus the expected Normal part.
    pub fn kl(&self, prior: &Self) -> T {
        let half = T::of(0.5);
        let (a, b, a0, b0) = (self.a, self.b, prior.a, prior.b);
        let kl_gamma = (a - a0) * psi(a) - lgamma(a) + lgamma(a0) + a0 * (b.ln() - b0.ln()) + a * (b0 - b) / b;
        let d = self.mu - prior.mu;
        let ratio = prior.kappa / self.kappa;
        kl_gamma + half * (ratio + prior.kappa * self.e_precision() * d * d - T::one() - ratio.ln())
    }

    /// `ln ∫ Π N(x | μ, 1/λ)^c dNG` for weighted statistics (weights may be
    /// fractional, which is how tempering enters).
    pub fn ln_marginal(&self, stats: &NormalStats<T>) -> T {
        let half = T::of(0.5);
        let post = self.update(stats);
        -half * stats.count * ln_2pi::<T>() + lgamma(post.a) - lgamma(self.a) + self.a * self.b.ln()
            - post.a * post.b.ln()
            + half * (self.kappa / post.kappa).ln()
    }
}

impl<T: Scalar> NormalStats<T> {
    pub fn add(&mut self, weight: T, x: T) {
        self.count += weight;
        self.sum += weight * x;
        self.sum_sq += weight * x * x;
    }

    pub fn scaled(&self, factor: T) -> Self {
        Self {
            count: self.count * factor,
            sum: self.sum * factor,
            sum_sq: self.sum_sq * factor,
        }
    }
}
