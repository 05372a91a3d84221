//! Photon wavepacket displacements and their Gaussian overlaps.
//!
//! Every photon carries a displacement label, measured in units of inverse
//! photon bandwidth. The wavepacket shape is fixed to the unit-bandwidth
//! Gaussian `ψ(k) = π^(-1/4) exp(-k²/2)`, for which two packets displaced by
//! `Δ` have overlap `∫ψ(k)ψ(k-Δ)dk = exp(-Δ²/4)`. All decoherence in the gate
//! model enters through this one function, so the magnitude of fitted
//! displacements is only meaningful relative to this convention.

use std::cmp::Ordering;
use std::fmt;

use nalgebra::DMatrix;
use smallvec::SmallVec;

use crate::error::{Error, Result};

/// Shift of a photon wavepacket in one or more degrees of freedom.
#[derive(Clone, Debug, PartialEq)]
pub struct Displacement(SmallVec<[f64; 2]>);

impl Displacement {
    pub fn new(components: impl IntoIterator<Item = f64>) -> Result<Self> {
        let components: SmallVec<[f64; 2]> = components.into_iter().collect();
        if components.is_empty() {
            return Err(Error::Empty("displacement components"));
        }
        if components.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("displacement"));
        }
        Ok(Self(components))
    }

    /// One-dimensional displacement.
    ///
    /// Panics if `value` is not finite.
    pub fn scalar(value: f64) -> Self {
        assert!(value.is_finite(), "displacement must be finite");
        Self(smallvec::smallvec![value])
    }

    pub fn zero(dim: usize) -> Self {
        Self(smallvec::smallvec![0.0; dim.max(1)])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn components(&self) -> &[f64] {
        &self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(Self(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect()))
    }

    pub fn negated(&self) -> Self {
        Self(self.0.iter().map(|c| -c).collect())
    }

    /// Squared Euclidean distance to `other`.
    pub fn distance_sq(&self, other: &Self) -> Result<f64> {
        self.check_dim(other)?;
        Ok(self
            .0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b) * (a - b))
            .sum())
    }

    /// Lexicographic total order on components; used to canonicalise path terms.
    pub fn total_cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.0.iter().zip(&other.0) {
            match a.total_cmp(b) {
                Ordering::Equal => continue,
                ord => return ord,
            }
        }
        self.0.len().cmp(&other.0.len())
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(())
    }
}

impl Default for Displacement {
    fn default() -> Self {
        Self::zero(1)
    }
}

impl fmt::Display for Displacement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str(")")
    }
}

/// Overlap of two wavepackets whose displacements differ by a squared distance `delta_sq`.
#[inline]
pub fn overlap_from_distance_sq(delta_sq: f64) -> f64 {
    (-0.25 * delta_sq).exp()
}

/// Inner product of two displaced unit-bandwidth Gaussian wavepackets.
pub fn overlap(a: &Displacement, b: &Displacement) -> Result<f64> {
    Ok(overlap_from_distance_sq(a.distance_sq(b)?))
}

/// Rotates a displacement onto a single axis.
///
/// The overlap only depends on the distance between packets, so any
/// displacement is equivalent to a scalar one of the same magnitude.
pub fn reduce_to_scalar(d: &Displacement) -> Displacement {
    Displacement::scalar(d.norm())
}

/// Matrix of pairwise wavepacket overlaps for a set of displacement labels.
#[derive(Clone, Debug, PartialEq)]
pub struct OverlapGram {
    dim: usize,
    entries: Vec<f64>,
}

impl OverlapGram {
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.dim + j]
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let m = DMatrix::from_row_slice(self.dim, self.dim, &self.entries);
        m.symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }
}

pub fn gram(labels: &[Displacement]) -> Result<OverlapGram> {
    let first = labels.first().ok_or(Error::Empty("label list"))?;
    if let Some(bad) = labels.iter().find(|l| l.dim() != first.dim()) {
        return Err(Error::DimensionMismatch {
            left: first.dim(),
            right: bad.dim(),
        });
    }
    let dim = labels.len();
    let mut entries = vec![1.0; dim * dim];
    for i in 0..dim {
        for j in (i + 1)..dim {
            let v = overlap(&labels[i], &labels[j])?;
            entries[i * dim + j] = v;
            entries[j * dim + i] = v;
        }
    }
    Ok(OverlapGram { dim, entries })
}
