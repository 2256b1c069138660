use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Piecewise-constant phase-mismatch offset along the waveguide.
///
/// Section `j` spans `[boundaries_mm[j], boundaries_mm[j+1])` and carries the
/// offset `offsets_per_m[j]` that adds to the global Δβ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawProfile", into = "RawProfile")]
pub struct DeltaBetaProfile {
    boundaries_mm: Vec<f64>,
    offsets_per_m: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawProfile {
    boundaries_mm: Vec<f64>,
    offsets_per_m: Vec<f64>,
}

impl TryFrom<RawProfile> for DeltaBetaProfile {
    type Error = Error;
    fn try_from(r: RawProfile) -> Result<Self> {
        DeltaBetaProfile::new(r.boundaries_mm, r.offsets_per_m)
    }
}

impl From<DeltaBetaProfile> for RawProfile {
    fn from(p: DeltaBetaProfile) -> Self {
        RawProfile { boundaries_mm: p.boundaries_mm, offsets_per_m: p.offsets_per_m }
    }
}

impl DeltaBetaProfile {
    pub fn new(boundaries_mm: Vec<f64>, offsets_per_m: Vec<f64>) -> Result<Self> {
        if offsets_per_m.is_empty() {
            return Err(Error::Profile("at least one section is required".into()));
        }
        if boundaries_mm.len() != offsets_per_m.len() + 1 {
            return Err(Error::Profile(format!(
                "{} boundaries for {} sections",
                boundaries_mm.len(),
                offsets_per_m.len()
            )));
        }
        if boundaries_mm[0] != 0.0 {
            return Err(Error::Profile(format!("first boundary must be 0, got {}", boundaries_mm[0])));
        }
        if !boundaries_mm.windows(2).all(|w| w[1] > w[0]) || !boundaries_mm.iter().all(|b| b.is_finite()) {
            return Err(Error::Profile("boundaries must be finite and strictly increasing".into()));
        }
        if let Some(bad) = offsets_per_m.iter().find(|f| !f.is_finite()) {
            return Err(Error::Profile(format!("non-finite offset {bad}")));
        }
        Ok(Self { boundaries_mm, offsets_per_m })
    }

    /// `m` equal sections over `length_mm` with the given offsets.
    pub fn equal_sections(length_mm: f64, offsets_per_m: Vec<f64>) -> Result<Self> {
        if !(length_mm > 0.0) {
            return Err(Error::Profile(format!("length must be > 0, got {length_mm}")));
        }
        let m = offsets_per_m.len();
        let mut boundaries: Vec<f64> = (0..=m).map(|j| length_mm * j as f64 / m.max(1) as f64).collect();
        if let Some(last) = boundaries.last_mut() {
            *last = length_mm;
        }
        Self::new(boundaries, offsets_per_m)
    }

    /// A single zero-offset section: the ideal device.
    pub fn uniform(length_mm: f64) -> Result<Self> {
        Self::equal_sections(length_mm, vec![0.0])
    }

    pub fn sections(&self) -> usize {
        self.offsets_per_m.len()
    }

    pub fn length_mm(&self) -> f64 {
        *self.boundaries_mm.last().expect("non-empty by construction")
    }

    pub fn boundaries_mm(&self) -> &[f64] {
        &self.boundaries_mm
    }

    pub fn offsets_per_m(&self) -> &[f64] {
        &self.offsets_per_m
    }

    /// Section lengths in metres.
    pub fn section_lengths_m(&self) -> Vec<f64> {
        self.boundaries_mm.windows(2).map(|w| (w[1] - w[0]) * 1e-3).collect()
    }

    /// Same geometry, new offsets.
    pub fn with_offsets(&self, offsets_per_m: Vec<f64>) -> Result<Self> {
        Self::new(self.boundaries_mm.clone(), offsets_per_m)
    }

    /// Sections in reverse propagation order.
    pub fn reversed(&self) -> Self {
        let l = self.length_mm();
        let mut boundaries: Vec<f64> = self.boundaries_mm.iter().rev().map(|b| l - b).collect();
        boundaries[0] = 0.0;
        *boundaries.last_mut().unwrap() = l;
        let offsets = self.offsets_per_m.iter().rev().copied().collect();
        Self { boundaries_mm: boundaries, offsets_per_m: offsets }
    }

    /// Splits section `j` at `at_mm` into two sections with the same offset.
    pub fn split_section(&self, j: usize, at_mm: f64) -> Result<Self> {
        if j >= self.sections() {
            return Err(Error::Profile(format!("section {j} out of range")));
        }
        let (a, b) = (self.boundaries_mm[j], self.boundaries_mm[j + 1]);
        if !(at_mm > a && at_mm < b) {
            return Err(Error::Profile(format!("split point {at_mm} outside ({a}, {b})")));
        }
        let mut boundaries = self.boundaries_mm.clone();
        boundaries.insert(j + 1, at_mm);
        let mut offsets = self.offsets_per_m.clone();
        offsets.insert(j, offsets[j]);
        Self::new(boundaries, offsets)
    }

    /// Pointwise sum of two profiles of the same length on the union of
    /// their boundaries.
    pub fn superpose(&self, other: &Self) -> Result<Self> {
        let (la, lb) = (self.length_mm(), other.length_mm());
        if (la - lb).abs() > 1e-9 * la.max(lb) {
            return Err(Error::Profile(format!("cannot superpose profiles of length {la} and {lb} mm")));
        }
        let mut cuts: Vec<f64> = self
            .boundaries_mm
            .iter()
            .chain(other.boundaries_mm.iter())
            .copied()
            .filter(|&b| b < la)
            .collect();
        cuts.sort_by(|a, b| a.total_cmp(b));
        cuts.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * la);
        cuts.push(la);
        let offsets = cuts
            .windows(2)
            .map(|w| {
                let mid = 0.5 * (w[0] + w[1]);
                self.offset_at(mid) + other.offset_at(mid)
            })
            .collect();
        Self::new(cuts, offsets)
    }

    /// Offset at position `z_mm` (right-continuous, last section closed).
    pub fn offset_at(&self, z_mm: f64) -> f64 {
        let idx = self.boundaries_mm.partition_point(|&b| b <= z_mm);
        let j = idx.saturating_sub(1).min(self.sections() - 1);
        self.offsets_per_m[j]
    }
}
