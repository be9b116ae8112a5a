//! Seeded generators for planted block structures and weighted Erdős–Rényi
//! networks.
//!
//! Block networks are complete graphs: every vertex pair gets a weight drawn
//! from the strong or the weak interval depending on whether its block pair
//! is "strong" for the chosen structure. The noisy variant keeps a drawn
//! weight only with probability `p` (strong pairs) or `q` (weak pairs) and
//! otherwise writes `floor_weight`.
//!
//! The diagonal blocks of the ordered structure are taken to be strong; that
//! is read off the banded block layout, not stated explicitly anywhere.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::network::WeightedNetwork;
use crate::scalar::Scalar;
use crate::seed::{self, Stage};

/// Planted block structure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Structure {
    Assortative,
    Disassortative,
    /// Block 0 is the core.
    CorePeriphery,
    /// Adjacent blocks (and each block with itself) are strongly tied.
    Ordered,
}

impl Structure {
    pub const ALL: [Structure; 4] = [
        Structure::Assortative,
        Structure::Disassortative,
        Structure::CorePeriphery,
        Structure::Ordered,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Structure::Assortative => "assortative",
            Structure::Disassortative => "disassortative",
            Structure::CorePeriphery => "core_periphery",
            Structure::Ordered => "ordered",
        }
    }
}

impl fmt::Display for Structure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Structure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "assortative" => Ok(Structure::Assortative),
            "disassortative" => Ok(Structure::Disassortative),
            "core_periphery" | "coreperiphery" => Ok(Structure::CorePeriphery),
            "ordered" => Ok(Structure::Ordered),
            other => Err(invalid(format!("unknown block structure `{other}`"))),
        }
    }
}

/// Whether block pair `(r, s)` draws its weights from the strong interval.
pub fn strong_block_pair(structure: Structure, r: usize, s: usize, _k_groups: usize) -> bool {
    match structure {
        Structure::Assortative => r == s,
        Structure::Disassortative => r != s,
        Structure::CorePeriphery => r == 0 || s == 0,
        Structure::Ordered => r.abs_diff(s) <= 1,
    }
}

/// Closed-open sampling interval `[lo, hi)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval<T> {
    pub lo: T,
    pub hi: T,
}

impl<T: Scalar> Interval<T> {
    pub fn new(lo: T, hi: T) -> Result<Self> {
        let iv = Self { lo, hi };
        iv.validate()?;
        Ok(iv)
    }

    fn validate(&self) -> Result<()> {
        if !(self.lo.is_finite() && self.hi.is_finite()) || self.lo > self.hi || self.lo < T::zero()
        {
            return Err(invalid(format!(
                "interval [{}, {}) must satisfy 0 <= lo <= hi",
                self.lo, self.hi
            )));
        }
        Ok(())
    }

    #[inline]
    pub fn contains(&self, x: T) -> bool {
        x >= self.lo && (x < self.hi || (self.lo == self.hi && x == self.lo))
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> T {
        let u: f64 = rng.random();
        let x = self.lo + (self.hi - self.lo) * T::of(u);
        // Rounding in lower precision types can land on `hi`.
        if x >= self.hi && self.hi > self.lo {
            self.lo.max(prev_below(self.hi))
        } else {
            x
        }
    }
}

fn prev_below<T: Scalar>(x: T) -> T {
    let (mantissa, exponent, _) = x.integer_decode();
    if mantissa == 0 {
        return T::zero();
    }
    T::of(((mantissa - 1) as f64) * 2f64.powi(exponent as i32))
}

/// Parameters of a planted block network.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlockSpec<T> {
    pub structure: Structure,
    pub k_groups: usize,
    pub group_size: usize,
    pub strong_interval: Interval<T>,
    pub weak_interval: Interval<T>,
    /// Probability that a strong pair keeps its drawn weight.
    pub p: T,
    /// Probability that a weak pair keeps its drawn weight.
    pub q: T,
    /// Weight written for dropped pairs in the noisy variant.
    pub floor_weight: T,
    pub seed: u64,
}

impl<T: Scalar> BlockSpec<T> {
    /// Strict setup: 4 groups of 10, strong `[1, 10)`, weak `[0, 1)`, `p = q = 1`.
    pub fn strict(structure: Structure, seed: u64) -> Self {
        Self {
            structure,
            k_groups: 4,
            group_size: 10,
            strong_interval: Interval {
                lo: T::one(),
                hi: T::of(10.0),
            },
            weak_interval: Interval {
                lo: T::zero(),
                hi: T::one(),
            },
            p: T::one(),
            q: T::one(),
            floor_weight: T::of(0.1),
            seed,
        }
    }

    /// Noisy setup: strict layout with weak `[0.1, 1)`, floor 0.1 and the given `p`, `q`.
    pub fn noisy(structure: Structure, p: T, q: T, seed: u64) -> Self {
        Self {
            weak_interval: Interval {
                lo: T::of(0.1),
                hi: T::one(),
            },
            p,
            q,
            ..Self::strict(structure, seed)
        }
    }

    pub fn n(&self) -> usize {
        self.k_groups * self.group_size
    }

    pub fn validate(&self) -> Result<()> {
        if self.k_groups == 0 {
            return Err(invalid("k_groups must be at least 1"));
        }
        if self.group_size == 0 {
            return Err(invalid("group_size must be at least 1"));
        }
        self.strong_interval.validate()?;
        self.weak_interval.validate()?;
        for (name, v) in [("p", self.p), ("q", self.q)] {
            if !(v >= T::zero() && v <= T::one()) {
                return Err(invalid(format!("{name} = {v} is not a probability")));
            }
        }
        if !(self.floor_weight >= T::zero()) || !self.floor_weight.is_finite() {
            return Err(invalid("floor_weight must be finite and non-negative"));
        }
        Ok(())
    }

    pub fn planted_labels(&self) -> Vec<usize> {
        (0..self.n()).map(|v| v / self.group_size).collect()
    }
}

/// Bernoulli draw that consumes no randomness at the degenerate endpoints.
fn keep<T: Scalar, R: Rng + ?Sized>(rng: &mut R, prob: T) -> bool {
    if prob >= T::one() {
        true
    } else if prob <= T::zero() {
        false
    } else {
        rng.random::<f64>() < prob.as_f64()
    }
}

/// Complete block network with weights drawn from the strong/weak intervals.
///
/// Equivalent to [`generate_noisy_block_network`] with `p = q = 1`.
pub fn generate_block_network<T: Scalar>(spec: &BlockSpec<T>) -> Result<WeightedNetwork<T>> {
    let strict = BlockSpec {
        p: T::one(),
        q: T::one(),
        ..spec.clone()
    };
    generate_noisy_block_network(&strict)
}

/// Block network where strong pairs keep their weight with probability `p`,
/// weak pairs with probability `q`, and dropped pairs get `floor_weight`.
pub fn generate_noisy_block_network<T: Scalar>(spec: &BlockSpec<T>) -> Result<WeightedNetwork<T>> {
    spec.validate()?;
    let n = spec.n();
    let labels = spec.planted_labels();
    let mut rng = seed::stream(spec.seed, Stage::Generate, 0);
    let mut net = WeightedNetwork::empty(n)?;
    for i in 0..n {
        for j in i + 1..n {
            let strong = strong_block_pair(spec.structure, labels[i], labels[j], spec.k_groups);
            let (prob, interval) = if strong {
                (spec.p, &spec.strong_interval)
            } else {
                (spec.q, &spec.weak_interval)
            };
            let w = if keep(&mut rng, prob) {
                interval.sample(&mut rng)
            } else {
                spec.floor_weight
            };
            net.set_weight(i, j, w)?;
        }
    }
    net.with_planted_labels(labels)
}

/// Parameters of a weighted Erdős–Rényi network.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErSpec<T> {
    pub n: usize,
    pub p: T,
    pub weight_interval: Interval<T>,
    pub floor_weight: T,
    pub seed: u64,
}

impl<T: Scalar> ErSpec<T> {
    /// `G(n, p)` with weights in `[0.1, 10)` and floor 0.1.
    pub fn new(n: usize, p: T, seed: u64) -> Self {
        Self {
            n,
            p,
            weight_interval: Interval {
                lo: T::of(0.1),
                hi: T::of(10.0),
            },
            floor_weight: T::of(0.1),
            seed,
        }
    }
}

/// Each pair is connected with probability `p` and weighted uniformly from
/// `weight_interval`; unconnected pairs get `floor_weight`.
pub fn generate_er_weighted<T: Scalar>(spec: &ErSpec<T>) -> Result<WeightedNetwork<T>> {
    if spec.n == 0 {
        return Err(invalid("n must be at least 1"));
    }
    if !(spec.p >= T::zero() && spec.p <= T::one()) {
        return Err(invalid(format!("p = {} is not a probability", spec.p)));
    }
    spec.weight_interval.validate()?;
    if !(spec.floor_weight >= T::zero()) || !spec.floor_weight.is_finite() {
        return Err(invalid("floor_weight must be finite and non-negative"));
    }
    let mut rng = seed::stream(spec.seed, Stage::Generate, 0);
    let mut net = WeightedNetwork::empty(spec.n)?;
    for i in 0..spec.n {
        for j in i + 1..spec.n {
            let w = if keep(&mut rng, spec.p) {
                spec.weight_interval.sample(&mut rng)
            } else {
                spec.floor_weight
            };
            net.set_weight(i, j, w)?;
        }
    }
    Ok(net)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strong_pair_rules() {
        assert!(strong_block_pair(Structure::Assortative, 2, 2, 4));
        assert!(!strong_block_pair(Structure::Assortative, 1, 2, 4));
        assert!(!strong_block_pair(Structure::Disassortative, 1, 1, 4));
        assert!(strong_block_pair(Structure::Disassortative, 1, 3, 4));
        assert!(strong_block_pair(Structure::CorePeriphery, 0, 3, 4));
        assert!(strong_block_pair(Structure::CorePeriphery, 0, 0, 4));
        assert!(!strong_block_pair(Structure::CorePeriphery, 2, 2, 4));
        assert!(!strong_block_pair(Structure::Ordered, 0, 3, 4));
        assert!(strong_block_pair(Structure::Ordered, 2, 3, 4));
        assert!(strong_block_pair(Structure::Ordered, 1, 1, 4));
    }

    #[test]
    fn structure_names_parse() {
        for s in Structure::ALL {
            assert_eq!(s.name().parse::<Structure>().unwrap(), s);
        }
        assert_eq!("core-periphery".parse::<Structure>().unwrap(), Structure::CorePeriphery);
        assert!("bipartite".parse::<Structure>().is_err());
    }

    #[test]
    fn strict_assortative_shape_and_ranges() {
        let spec = BlockSpec::<f64>::strict(Structure::Assortative, 3);
        let net = generate_block_network(&spec).unwrap();
        assert_eq!(net.n(), 40);
        let labels = net.planted_labels().unwrap();
        for i in 0..40 {
            assert_eq!(net.weight(i, i), 0.0);
            for j in 0..40 {
                if i == j {
                    continue;
                }
                let w = net.weight(i, j);
                if labels[i] == labels[j] {
                    assert!((1.0..10.0).contains(&w));
                } else {
                    assert!((0.0..1.0).contains(&w));
                }
            }
        }
    }

    #[test]
    fn single_block_is_all_strong() {
        let spec = BlockSpec {
            k_groups: 1,
            ..BlockSpec::<f64>::strict(Structure::Assortative, 1)
        };
        let net = generate_block_network(&spec).unwrap();
        for i in 0..10 {
            for j in i + 1..10 {
                assert!(spec.strong_interval.contains(net.weight(i, j)));
            }
        }
    }

    #[test]
    fn deterministic_given_seed() {
        let spec = BlockSpec::<f64>::strict(Structure::Ordered, 11);
        let a = generate_block_network(&spec).unwrap();
        let b = generate_block_network(&spec).unwrap();
        assert_eq!(a, b);
        let c = generate_block_network(&BlockSpec { seed: 12, ..spec }).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn zero_group_size_is_rejected() {
        let spec = BlockSpec {
            group_size: 0,
            ..BlockSpec::<f64>::strict(Structure::Assortative, 1)
        };
        assert!(matches!(generate_block_network(&spec), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn noisy_with_full_probabilities_matches_strict() {
        let noisy = BlockSpec::<f64>::noisy(Structure::CorePeriphery, 1.0, 1.0, 5);
        let strict = BlockSpec {
            weak_interval: Interval { lo: 0.1, hi: 1.0 },
            ..BlockSpec::<f64>::strict(Structure::CorePeriphery, 5)
        };
        assert_eq!(
            generate_noisy_block_network(&noisy).unwrap(),
            generate_block_network(&strict).unwrap()
        );
    }

    #[test]
    fn noisy_ranges_and_degenerate_p() {
        let spec = BlockSpec::<f64>::noisy(Structure::Assortative, 0.7, 0.3, 9);
        let net = generate_noisy_block_network(&spec).unwrap();
        for i in 0..40 {
            for j in i + 1..40 {
                let w = net.weight(i, j);
                assert!((0.1..=10.0).contains(&w));
            }
        }
        let spec = BlockSpec::<f64>::noisy(Structure::Assortative, 0.0, 0.3, 9);
        let net = generate_noisy_block_network(&spec).unwrap();
        let labels = net.planted_labels().unwrap();
        for i in 0..40 {
            for j in i + 1..40 {
                if labels[i] == labels[j] {
                    assert_eq!(net.weight(i, j), 0.1);
                }
            }
        }
    }

    #[test]
    fn strict_ranges_hold_over_many_seeds() {
        for structure in Structure::ALL {
            for seed in 0..100 {
                let spec = BlockSpec::<f64>::strict(structure, seed);
                let net = generate_block_network(&spec).unwrap();
                let labels = net.planted_labels().unwrap();
                for i in 0..40 {
                    for j in i + 1..40 {
                        let strong = strong_block_pair(structure, labels[i], labels[j], 4);
                        let iv = if strong { spec.strong_interval } else { spec.weak_interval };
                        assert!(iv.contains(net.weight(i, j)));
                    }
                }
            }
        }
    }

    #[test]
    fn keep_fraction_converges_to_p() {
        // Strong pairs per assortative network: 4 · C(10, 2) = 180; 56 networks ≈ 10⁴ samples.
        let p = 0.7;
        let mut kept = 0usize;
        let mut total = 0usize;
        for seed in 0..56 {
            let spec = BlockSpec::<f64>::noisy(Structure::Assortative, p, 0.3, seed);
            let net = generate_noisy_block_network(&spec).unwrap();
            let labels = net.planted_labels().unwrap();
            for i in 0..40 {
                for j in i + 1..40 {
                    if labels[i] == labels[j] {
                        total += 1;
                        if net.weight(i, j) > spec.floor_weight {
                            kept += 1;
                        }
                    }
                }
            }
        }
        let frac = kept as f64 / total as f64;
        let sigma = (p * (1.0 - p) / total as f64).sqrt();
        assert!(total >= 10_000);
        assert!((frac - p).abs() < 3.0 * sigma, "{frac} vs {p} (σ = {sigma})");
    }

    #[test]
    fn er_degenerate_probabilities() {
        let full = generate_er_weighted(&ErSpec::<f64>::new(12, 1.0, 4)).unwrap();
        let empty = generate_er_weighted(&ErSpec::<f64>::new(12, 0.0, 4)).unwrap();
        for i in 0..12 {
            for j in i + 1..12 {
                assert!((0.1..10.0).contains(&full.weight(i, j)));
                assert_eq!(empty.weight(i, j), 0.1);
            }
        }
        let half = generate_er_weighted(&ErSpec::<f64>::new(40, 0.5, 4)).unwrap();
        assert_eq!(half.n(), 40);
        assert!(half.planted_labels().is_none());
        assert!(generate_er_weighted(&ErSpec::<f64>::new(0, 0.5, 4)).is_err());
    }

    #[test]
    fn works_in_single_precision() {
        let spec = BlockSpec::<f32>::strict(Structure::Assortative, 2);
        let net = generate_block_network(&spec).unwrap();
        for i in 0..40 {
            for j in i + 1..40 {
                let w = net.weight(i, j);
                assert!((0.0..10.0).contains(&w));
            }
        }
    }
}
