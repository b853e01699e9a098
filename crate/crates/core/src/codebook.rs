//! Exhaustive lookup table of superpixel values.
//!
//! All 65536 block patterns are grouped by their exact trit vector into 6561
//! value groups. Within a group, patterns are ordered by ascending 16-bit
//! code; a pattern's position in that order is the integer it encodes when
//! carrying hidden bits.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::rng::SplitMix64;
use crate::superpixel::{BlockPattern, CoeffVector, PhaseAssignment, VALUE_COUNT};

/// All block patterns realizing one canonical superpixel value.
#[derive(Debug, Clone)]
pub struct ValueGroup {
    pub coeffs: CoeffVector,
    pub value: Complex64,
    /// Ascending by code.
    pub patterns: Vec<BlockPattern>,
    /// `Floor[log2 |patterns|]`, equal to the number of zero trits.
    pub capacity_bits: u32,
    min_pos: usize,
    max_pos: usize,
}

impl ValueGroup {
    /// Pattern with the fewest ON mirrors (cancelled pairs both OFF).
    pub fn min_pattern(&self) -> BlockPattern {
        self.patterns[self.min_pos]
    }

    /// Pattern with the most ON mirrors (cancelled pairs both ON).
    pub fn max_pattern(&self) -> BlockPattern {
        self.patterns[self.max_pos]
    }
}

/// Rule for choosing among equivalent patterns when no hidden bits steer
/// the choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Strategy {
    Random,
    #[default]
    Min,
    Max,
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random" => Ok(Strategy::Random),
            "min" | "minimum" => Ok(Strategy::Min),
            "max" | "maximum" => Ok(Strategy::Max),
            other => Err(Error::usage(format!(
                "unknown strategy {other:?} (expected random, min or max)"
            ))),
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Random => "random",
            Strategy::Min => "min",
            Strategy::Max => "max",
        })
    }
}

#[derive(Debug, Clone)]
pub struct Codebook {
    assignment: PhaseAssignment,
    groups: Vec<ValueGroup>,
    /// Per pattern code: (canonical index, position within group).
    owner: Vec<(u16, u16)>,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl Codebook {
    /// Enumerates every block pattern and groups it by trit vector.
    pub fn build(assignment: PhaseAssignment) -> Self {
        let mut buckets: Vec<Vec<BlockPattern>> = vec![Vec::new(); VALUE_COUNT];
        let mut owner = vec![(0u16, 0u16); 1 << 16];
        // Codes are visited in ascending order, so every bucket is sorted.
        for code in 0..=u16::MAX {
            let p = BlockPattern(code);
            let idx = p.coeffs(&assignment).canonical_index();
            owner[code as usize] = (idx as u16, buckets[idx].len() as u16);
            buckets[idx].push(p);
        }

        let groups: Vec<ValueGroup> = buckets
            .into_iter()
            .enumerate()
            .map(|(idx, patterns)| {
                let coeffs = CoeffVector::from_canonical_index(idx).unwrap();
                let by_pop = |p: &(usize, &BlockPattern)| p.1.popcount();
                let min_pos = patterns.iter().enumerate().min_by_key(by_pop).unwrap().0;
                let max_pos = patterns.iter().enumerate().max_by_key(by_pop).unwrap().0;
                ValueGroup {
                    coeffs,
                    value: coeffs.value(),
                    capacity_bits: patterns.len().ilog2(),
                    patterns,
                    min_pos,
                    max_pos,
                }
            })
            .collect();

        let re = groups.iter().map(|g| g.value.re).collect();
        let im = groups.iter().map(|g| g.value.im).collect();
        Self {
            assignment,
            groups,
            owner,
            re,
            im,
        }
    }

    pub fn assignment(&self) -> &PhaseAssignment {
        &self.assignment
    }

    pub fn groups(&self) -> &[ValueGroup] {
        &self.groups
    }

    pub fn group(&self, idx: usize) -> Result<&ValueGroup> {
        self.groups
            .get(idx)
            .ok_or_else(|| Error::usage(format!("canonical index {idx} outside 0..{VALUE_COUNT}")))
    }

    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    /// Canonical index of the codebook value closest to `target`; ties go
    /// to the smallest index.
    pub fn nearest_value(&self, target: Complex64) -> Result<usize> {
        if !target.re.is_finite() || !target.im.is_finite() {
            return Err(Error::usage(format!("non-finite target {target}")));
        }
        Ok(self.nearest_unchecked(target))
    }

    #[inline]
    pub(crate) fn nearest_unchecked(&self, target: Complex64) -> usize {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (i, (&re, &im)) in self.re.iter().zip(&self.im).enumerate() {
            let dr = re - target.re;
            let di = im - target.im;
            let d = dr * dr + di * di;
            if d < best_d {
                best_d = d;
                best = i;
            }
        }
        best
    }

    pub fn capacity_bits(&self, idx: usize) -> Result<u32> {
        self.group(idx).map(|g| g.capacity_bits)
    }

    /// Picks a pattern from group `idx`. The random strategy draws one
    /// bounded sample from `rng`; the others leave it untouched.
    pub fn select_pattern(
        &self,
        idx: usize,
        strategy: Strategy,
        rng: &mut SplitMix64,
    ) -> Result<BlockPattern> {
        let g = self.group(idx)?;
        Ok(match strategy {
            Strategy::Min => g.min_pattern(),
            Strategy::Max => g.max_pattern(),
            Strategy::Random => g.patterns[rng.next_below(g.patterns.len() as u64) as usize],
        })
    }

    /// Owning group and 0-based position of `p` within it.
    #[inline]
    pub fn pattern_index_in_group(&self, p: BlockPattern) -> (usize, usize) {
        let (idx, pos) = self.owner[p.0 as usize];
        (idx as usize, pos as usize)
    }
}
