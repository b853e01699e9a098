//! 4×4 superpixel algebra.
//!
//! Every mirror of a superpixel carries one of sixteen phases `k·π/8`,
//! `k = 1..=16`. Phases `k` and `k + 8` are opposite (`e^{i(k+8)π/8} =
//! −e^{ikπ/8}`), so the field of a block pattern collapses onto eight
//! trits, one per opposite-phase pair. The trit vector is the exact key of
//! a superpixel value; complex numbers are only ever derived from it.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Side length of a superpixel in mirrors.
pub const BLOCK_SIDE: usize = 4;
/// Mirrors per superpixel.
pub const BLOCK_PIXELS: usize = BLOCK_SIDE * BLOCK_SIDE;
/// Opposite-phase pairs per superpixel.
pub const PAIRS: usize = BLOCK_PIXELS / 2;
/// Number of distinct trit vectors, `3^8`.
pub const VALUE_COUNT: usize = 6561;

/// Phase of phase index `k`, in radians.
#[inline]
pub fn phase_angle(k: u8) -> f64 {
    f64::from(k) * PI / 8.0
}

/// Bijection from mirror position to phase index.
///
/// Stored by mirror bit `b = 4r + c`; entry `b` is the phase index
/// `k ∈ 1..=16` carried by that mirror.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PhaseAssignment {
    phase_index: [u8; BLOCK_PIXELS],
    bit_of_phase: [u8; BLOCK_PIXELS + 1],
}

impl PhaseAssignment {
    /// Row-major default, `k(r, c) = 4r + c + 1`.
    pub fn row_major() -> Self {
        let mut indices = [0u8; BLOCK_PIXELS];
        for (b, k) in indices.iter_mut().enumerate() {
            *k = b as u8 + 1;
        }
        Self::from_indices(&indices).expect("row-major assignment is a bijection")
    }

    /// Builds an assignment from sixteen phase indices in row-major mirror
    /// order. Every index in `1..=16` must appear exactly once.
    pub fn from_indices(indices: &[u8]) -> Result<Self> {
        if indices.len() != BLOCK_PIXELS {
            return Err(Error::usage(format!(
                "phase assignment needs {BLOCK_PIXELS} entries, got {}",
                indices.len()
            )));
        }
        let mut phase_index = [0u8; BLOCK_PIXELS];
        let mut bit_of_phase = [u8::MAX; BLOCK_PIXELS + 1];
        for (b, &k) in indices.iter().enumerate() {
            if !(1..=BLOCK_PIXELS as u8).contains(&k) {
                return Err(Error::usage(format!("phase index {k} outside 1..=16")));
            }
            if bit_of_phase[k as usize] != u8::MAX {
                return Err(Error::usage(format!("phase index {k} assigned twice")));
            }
            bit_of_phase[k as usize] = b as u8;
            phase_index[b] = k;
        }
        Ok(Self {
            phase_index,
            bit_of_phase,
        })
    }

    /// Phase index at mirror `(r, c)`.
    pub fn phase_index(&self, r: usize, c: usize) -> Result<u8> {
        if r >= BLOCK_SIDE || c >= BLOCK_SIDE {
            return Err(Error::usage(format!(
                "mirror ({r}, {c}) outside the 4×4 superpixel"
            )));
        }
        Ok(self.phase_index[r * BLOCK_SIDE + c])
    }

    /// Phase in radians at mirror `(r, c)`, in `(0, 2π]`.
    pub fn phase_of(&self, r: usize, c: usize) -> Result<f64> {
        self.phase_index(r, c).map(phase_angle)
    }

    /// Mirror bit that carries phase index `k`.
    #[inline]
    pub fn bit_of_phase(&self, k: u8) -> usize {
        self.bit_of_phase[k as usize] as usize
    }

    /// Phase indices in row-major mirror order.
    pub fn indices(&self) -> [u8; BLOCK_PIXELS] {
        self.phase_index
    }

    /// Linear phase gradient `(f_x, f_y)` in cycles per mirror, when the
    /// assignment is an affine ramp `k(r, c) ≡ k(0,0) + a·c + b·r (mod 16)`.
    pub fn phase_gradient(&self) -> Option<(f64, f64)> {
        let k0 = i32::from(self.phase_index[0]);
        let a = i32::from(self.phase_index[1]) - k0;
        let b = i32::from(self.phase_index[BLOCK_SIDE]) - k0;
        for r in 0..BLOCK_SIDE {
            for c in 0..BLOCK_SIDE {
                let k = i32::from(self.phase_index[r * BLOCK_SIDE + c]);
                let expected = k0 + a * c as i32 + b * r as i32;
                if (k - expected).rem_euclid(16) != 0 {
                    return None;
                }
            }
        }
        let wrap = |d: i32| f64::from((d + 8).rem_euclid(16) - 8) / 16.0;
        Some((wrap(a), wrap(b)))
    }
}

impl Default for PhaseAssignment {
    fn default() -> Self {
        Self::row_major()
    }
}

impl FromStr for PhaseAssignment {
    type Err = Error;

    /// Parses comma-separated phase indices in row-major mirror order.
    fn from_str(s: &str) -> Result<Self> {
        let indices = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<u8>()
                    .map_err(|_| Error::usage(format!("bad phase index {t:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_indices(&indices)
    }
}

impl fmt::Display for PhaseAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, k) in self.phase_index.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{k}")?;
        }
        Ok(())
    }
}

/// One 4×4 binary mirror block. Bit `4r + c` is mirror `(r, c)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct BlockPattern(pub u16);

impl BlockPattern {
    pub const ALL_OFF: BlockPattern = BlockPattern(0);
    pub const ALL_ON: BlockPattern = BlockPattern(u16::MAX);

    #[inline]
    pub fn is_on(self, bit: usize) -> bool {
        self.0 >> bit & 1 == 1
    }

    #[inline]
    pub fn mirror(self, r: usize, c: usize) -> bool {
        self.is_on(r * BLOCK_SIDE + c)
    }

    #[inline]
    pub fn popcount(self) -> u32 {
        self.0.count_ones()
    }

    /// Pattern whose ON mirrors are exactly those carrying the given phase
    /// indices.
    pub fn from_phase_indices(assignment: &PhaseAssignment, ks: &[u8]) -> Self {
        let code = ks
            .iter()
            .fold(0u16, |acc, &k| acc | 1 << assignment.bit_of_phase(k));
        BlockPattern(code)
    }

    /// Trit vector of this pattern: `c_j = on(j) − on(j + 8)`.
    pub fn coeffs(self, assignment: &PhaseAssignment) -> CoeffVector {
        let mut trits = [0i8; PAIRS];
        for (j, t) in trits.iter_mut().enumerate() {
            let k = j as u8 + 1;
            let plus = self.is_on(assignment.bit_of_phase(k)) as i8;
            let minus = self.is_on(assignment.bit_of_phase(k + 8)) as i8;
            *t = plus - minus;
        }
        CoeffVector(trits)
    }

    /// Complex value via the trit route.
    pub fn value(self, assignment: &PhaseAssignment) -> Complex64 {
        self.coeffs(assignment).value()
    }

    /// Complex value as the direct 16-term sum over ON mirrors.
    pub fn direct_value(self, assignment: &PhaseAssignment) -> Complex64 {
        (0..BLOCK_PIXELS)
            .filter(|&b| self.is_on(b))
            .map(|b| Complex64::from_polar(1.0, phase_angle(assignment.phase_index[b])))
            .sum()
    }
}

/// Eight trits `c_j ∈ {−1, 0, +1}`; `value = Σ c_j·e^{ijπ/8}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct CoeffVector(pub [i8; PAIRS]);

impl CoeffVector {
    pub const ZERO: CoeffVector = CoeffVector([0; PAIRS]);

    /// `Σ (c_j + 1)·3^{j−1}`, a bijection onto `0..6561`.
    pub fn canonical_index(&self) -> usize {
        self.0
            .iter()
            .rev()
            .fold(0usize, |acc, &t| acc * 3 + (t + 1) as usize)
    }

    pub fn from_canonical_index(index: usize) -> Result<Self> {
        if index >= VALUE_COUNT {
            return Err(Error::usage(format!(
                "canonical index {index} outside 0..{VALUE_COUNT}"
            )));
        }
        let mut trits = [0i8; PAIRS];
        let mut rest = index;
        for t in trits.iter_mut() {
            *t = (rest % 3) as i8 - 1;
            rest /= 3;
        }
        Ok(CoeffVector(trits))
    }

    pub fn value(&self) -> Complex64 {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &t)| t != 0)
            .map(|(j, &t)| f64::from(t) * Complex64::from_polar(1.0, phase_angle(j as u8 + 1)))
            .sum()
    }

    /// Number of cancelled pairs; the group of this vector has `2^z` patterns.
    pub fn zero_count(&self) -> u32 {
        self.0.iter().filter(|&&t| t == 0).count() as u32
    }

    pub fn negated(&self) -> Self {
        CoeffVector(self.0.map(|t| -t))
    }
}

/// Largest modulus reachable by a superpixel, `1/sin(π/16) ≈ 5.1258`,
/// found by enumerating every trit vector.
pub fn max_modulus() -> f64 {
    static R_MAX: OnceLock<f64> = OnceLock::new();
    *R_MAX.get_or_init(|| {
        (0..VALUE_COUNT)
            .map(|i| CoeffVector::from_canonical_index(i).unwrap().value().norm())
            .fold(0.0, f64::max)
    })
}
