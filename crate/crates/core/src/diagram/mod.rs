//! Persistence-diagram features, a heuristic block-structure classifier,
//! and CSV/SVG output.

mod classify;
mod svg;

pub use classify::{classify_structure, classify_with, Classification, ClassifierConfig, CLASSIFIER_VERSION};
pub use svg::{emit_diagram_svg, SvgOptions};

use std::io::Write;

use serde::Serialize;

use crate::error::{invalid, Result};
use crate::persistence::Barcode;
use crate::scalar::Scalar;

/// Default reference threshold: weight 1 maps to distance 1.
pub const DEFAULT_TAU: f64 = 1.0;

/// Dimensions summarised by [`DiagramFeatures`].
pub const FEATURE_DIMS: usize = 3;

/// Counts and extremes of one homology dimension. Zero-length intervals
/// are ignored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DimFeatures<T> {
    /// Intervals with `birth < tau`.
    pub born_before: usize,
    /// Intervals with `birth >= tau`. Together with `born_before` this
    /// covers every interval.
    pub born_after: usize,
    /// Finite intervals with `death > tau`.
    pub died_after: usize,
    /// Finite intervals with `death == cap`.
    pub dying_at_cap: usize,
    pub infinite: usize,
    /// Zero when there is no finite interval.
    pub max_finite_persistence: T,
    pub min_birth: Option<T>,
    pub max_birth: Option<T>,
}

impl<T: Scalar> Default for DimFeatures<T> {
    fn default() -> Self {
        Self {
            born_before: 0,
            born_after: 0,
            died_after: 0,
            dying_at_cap: 0,
            infinite: 0,
            max_finite_persistence: T::zero(),
            min_birth: None,
            max_birth: None,
        }
    }
}

impl<T: Scalar> DimFeatures<T> {
    pub fn total(&self) -> usize {
        self.born_before + self.born_after
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagramFeatures<T> {
    pub tau: T,
    pub cap: T,
    /// Indexed by homology dimension 0, 1, 2.
    pub dims: [DimFeatures<T>; FEATURE_DIMS],
}

impl<T: Scalar> DiagramFeatures<T> {
    pub fn dim(&self, k: usize) -> &DimFeatures<T> {
        &self.dims[k]
    }
}

/// Summarises `barcode` at threshold `tau`; `cap` is the distance cap `1/ζ`.
pub fn extract_features<T: Scalar>(barcode: &Barcode<T>, tau: T, cap: T) -> Result<DiagramFeatures<T>> {
    if !(tau > T::zero()) || !tau.is_finite() {
        return Err(invalid(format!("tau must be positive and finite, got {tau}")));
    }
    if !(cap > T::zero()) {
        return Err(invalid(format!("cap must be positive, got {cap}")));
    }
    let mut dims = [DimFeatures::<T>::default(); FEATURE_DIMS];
    for iv in barcode.intervals() {
        if iv.dim >= FEATURE_DIMS || iv.is_zero_length() {
            continue;
        }
        let f = &mut dims[iv.dim];
        if iv.birth < tau {
            f.born_before += 1;
        } else {
            f.born_after += 1;
        }
        if iv.is_infinite() {
            f.infinite += 1;
        } else {
            if iv.death > tau {
                f.died_after += 1;
            }
            if iv.death == cap {
                f.dying_at_cap += 1;
            }
            f.max_finite_persistence = f.max_finite_persistence.max(iv.persistence());
        }
        f.min_birth = Some(f.min_birth.map_or(iv.birth, |b| b.min(iv.birth)));
        f.max_birth = Some(f.max_birth.map_or(iv.birth, |b| b.max(iv.birth)));
    }
    Ok(DiagramFeatures { tau, cap, dims })
}

/// Barcode CSV preceded by a `# zeta=..., tau=..., seed=...` line.
pub fn emit_diagram_csv<T: Scalar, W: Write>(
    barcode: &Barcode<T>,
    zeta: T,
    tau: T,
    seed: Option<u64>,
    mut out: W,
) -> Result<()> {
    let seed = seed.map_or_else(|| "none".to_owned(), |s| s.to_string());
    writeln!(out, "# zeta={zeta}, tau={tau}, seed={seed}")?;
    barcode.write_csv(out)
}
