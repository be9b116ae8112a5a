//! Weighted undirected networks stored as dense symmetric matrices.

mod io;

pub use io::{load_network, parse_network, save_network, write_network, NetworkFormat};

use crate::error::{invalid, Error, Result};
use crate::scalar::Scalar;

/// Simple undirected network with non-negative edge weights.
///
/// A weight of zero means "no edge"; `a_ij` in the structural metrics below
/// is the indicator `w_ij > 0` (no tolerance).
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedNetwork<T> {
    n: usize,
    weights: Vec<T>,
    planted_labels: Option<Vec<usize>>,
}

impl<T: Scalar> WeightedNetwork<T> {
    /// Edgeless network on `n` vertices.
    pub fn empty(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(invalid("a network needs at least one vertex"));
        }
        Ok(Self {
            n,
            weights: vec![T::zero(); n * n],
            planted_labels: None,
        })
    }

    /// Builds a network from a row-major `n × n` matrix, validating symmetry,
    /// a zero diagonal and non-negative finite entries.
    pub fn from_dense(n: usize, weights: Vec<T>) -> Result<Self> {
        if n == 0 {
            return Err(invalid("a network needs at least one vertex"));
        }
        if weights.len() != n * n {
            return Err(invalid(format!(
                "expected {} matrix entries for n = {n}, got {}",
                n * n,
                weights.len()
            )));
        }
        for i in 0..n {
            for j in 0..n {
                let w = weights[i * n + j];
                if !w.is_finite() || w < T::zero() {
                    return Err(Error::Validation(format!(
                        "weight ({i}, {j}) = {w} is not a finite non-negative number"
                    )));
                }
                if i == j && w != T::zero() {
                    return Err(Error::Validation(format!(
                        "diagonal entry ({i}, {i}) = {w} must be 0"
                    )));
                }
                if j > i && w != weights[j * n + i] {
                    return Err(Error::Validation(format!(
                        "asymmetric weights: w({i}, {j}) = {w} but w({j}, {i}) = {}",
                        weights[j * n + i]
                    )));
                }
            }
        }
        Ok(Self {
            n,
            weights,
            planted_labels: None,
        })
    }

    /// Sets `w_ij = w_ji = w`.
    pub fn set_weight(&mut self, i: usize, j: usize, w: T) -> Result<()> {
        self.check_index(i)?;
        self.check_index(j)?;
        if i == j {
            return Err(Error::Validation(format!("self-loop at vertex {i}")));
        }
        if !w.is_finite() || w < T::zero() {
            return Err(Error::Validation(format!(
                "weight {w} on ({i}, {j}) is not a finite non-negative number"
            )));
        }
        self.weights[i * self.n + j] = w;
        self.weights[j * self.n + i] = w;
        Ok(())
    }

    pub fn with_planted_labels(mut self, labels: Vec<usize>) -> Result<Self> {
        if labels.len() != self.n {
            return Err(invalid(format!(
                "{} planted labels for {} vertices",
                labels.len(),
                self.n
            )));
        }
        self.planted_labels = Some(labels);
        Ok(self)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn weight(&self, i: usize, j: usize) -> T {
        self.weights[i * self.n + j]
    }

    /// Row-major weight matrix.
    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.weights[i * self.n..(i + 1) * self.n]
    }

    pub fn planted_labels(&self) -> Option<&[usize]> {
        self.planted_labels.as_deref()
    }

    #[inline]
    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        self.weight(i, j) > T::zero()
    }

    /// Sum of `w_ij` over unordered pairs `i < j`.
    pub fn total_weight(&self) -> T {
        let mut total = T::zero();
        for i in 0..self.n {
            for j in i + 1..self.n {
                total += self.weight(i, j);
            }
        }
        total
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.n {
            return Err(invalid(format!(
                "vertex index {i} out of range for {} vertices",
                self.n
            )));
        }
        Ok(())
    }

    /// Strength `s_i = Σ_j a_ij w_ij`.
    pub fn strength(&self, i: usize) -> Result<T> {
        self.check_index(i)?;
        Ok(self
            .row(i)
            .iter()
            .filter(|w| **w > T::zero())
            .copied()
            .sum())
    }

    /// Number of positive-weight neighbours of `i`.
    pub fn degree(&self, i: usize) -> Result<usize> {
        self.check_index(i)?;
        Ok(self.row(i).iter().filter(|w| **w > T::zero()).count())
    }

    /// Weighted clustering coefficient
    ///
    /// `C_i = 1 / (s_i (k_i - 1)) · Σ_{j,h} (w_ij + w_jh) / 2 · a_ij a_ih a_jh`
    ///
    /// where the sum runs over ordered pairs of distinct neighbours `j ≠ h`.
    /// Vertices with `k_i ≤ 1` get 0.
    pub fn weighted_clustering(&self, i: usize) -> Result<T> {
        let k = self.degree(i)?;
        if k <= 1 {
            return Ok(T::zero());
        }
        let s = self.strength(i)?;
        let neighbours: Vec<usize> = (0..self.n).filter(|&j| self.adjacent(i, j)).collect();
        let half = T::of(0.5);
        let mut acc = T::zero();
        for &j in &neighbours {
            for &h in &neighbours {
                if j != h && self.adjacent(j, h) {
                    acc += (self.weight(i, j) + self.weight(j, h)) * half;
                }
            }
        }
        Ok(acc / (s * T::of_usize(k - 1)))
    }
}
