//! Rule-based block-structure labels from diagram features.
//!
//! Thresholds were calibrated on strict generator output (4 groups of 10,
//! ζ = 0.1, τ = 1) and are not meant to transfer to other network sizes
//! without recalibration:
//!
//! | quantity | assortative | disassortative | core-periphery | ordered |
//! |---|---|---|---|---|
//! | H1 + H2 bars born at `t >= τ` | 59 to 90 | 0 | 0 | 0 to 11 |
//! | finite H0 deaths after `τ` | 3 | 0 | 0 | 0 |
//! | H2 / H1 bar count | 0.86 to 1.50 | 1.88 to 2.99 | 0.13 to 1.31 | 0.48 to 1.00 |

use serde::Serialize;

use super::DiagramFeatures;
use crate::netgen::Structure;
use crate::scalar::Scalar;

pub const CLASSIFIER_VERSION: &str = "1";

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassifierConfig {
    /// Expected number of blocks; assortative needs `k_groups - 1` H0 deaths after τ.
    pub k_groups: usize,
    /// H1 + H2 bars born after τ needed to call the count "many".
    pub many_after_tau: usize,
    /// H2/H1 count ratio separating disassortative (above) from core-periphery.
    pub h2_h1_ratio: f64,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        Self {
            k_groups: 4,
            many_after_tau: 20,
            h2_h1_ratio: 1.6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Classification {
    pub label: Structure,
    /// Confidence in `[0, 1]` derived from how far the deciding quantity
    /// sits from its threshold.
    pub score: f64,
    /// Which rule fired: `a`, `b` or `c`, or `fallback`.
    pub rule: &'static str,
}

/// Maps a nonnegative margin to `[0, 1)`.
fn saturate(margin: f64) -> f64 {
    if margin.is_nan() || margin <= 0.0 {
        0.0
    } else if margin.is_infinite() {
        1.0
    } else {
        margin / (1.0 + margin)
    }
}

/// Classifies with [`ClassifierConfig::default`].
pub fn classify_structure<T: Scalar>(features: &DiagramFeatures<T>) -> Classification {
    classify_with(features, &ClassifierConfig::default())
}

/// Rules, in order:
///
/// * (a) many H1/H2 bars born after τ and at least `k_groups - 1` H0 deaths
///   after τ: assortative.
/// * (b) no H1/H2 bar born after τ and a single component before τ:
///   disassortative when H2 bars outnumber H1 bars by the configured ratio,
///   core-periphery otherwise.
/// * (c) few H1/H2 bars after τ and a single component before τ: ordered.
///
/// Anything else gets the nearer label with a score of at most 0.25.
pub fn classify_with<T: Scalar>(features: &DiagramFeatures<T>, config: &ClassifierConfig) -> Classification {
    let (h0, h1, h2) = (features.dim(0), features.dim(1), features.dim(2));
    let after = (h1.born_after + h2.born_after) as f64;
    let many = config.many_after_tau.max(1) as f64;
    let h0_after = h0.died_after as f64;
    let needed_h0 = config.k_groups.saturating_sub(1) as f64;
    let connected_early = h0.died_after == 0;

    if h1.total() + h2.total() == 0 {
        return Classification {
            label: Structure::Ordered,
            score: 0.0,
            rule: "fallback",
        };
    }
    if after >= many && h0_after >= needed_h0 {
        let margin = (after / many - 1.0).min(if needed_h0 > 0.0 { h0_after / needed_h0 } else { 1.0 });
        return Classification {
            label: Structure::Assortative,
            score: saturate(margin.max(0.05)),
            rule: "a",
        };
    }
    if after == 0.0 && connected_early && h1.total() > 0 {
        let ratio = h2.total() as f64 / h1.total() as f64;
        let (label, margin) = if ratio >= config.h2_h1_ratio {
            (Structure::Disassortative, ratio / config.h2_h1_ratio - 1.0)
        } else {
            (Structure::CorePeriphery, config.h2_h1_ratio / ratio - 1.0)
        };
        return Classification {
            label,
            score: saturate(margin.max(0.05)),
            rule: "b",
        };
    }
    if after < many && connected_early {
        return Classification {
            label: Structure::Ordered,
            score: saturate(1.0 - after / many),
            rule: "c",
        };
    }
    let label = if after >= many {
        Structure::Assortative
    } else {
        Structure::Ordered
    };
    Classification {
        label,
        score: 0.25 * saturate((after / many - 1.0).abs()),
        rule: "fallback",
    }
}
