//! Hiding a bitstream in the choice among equivalent block patterns.
//!
//! The embedded stream is a 32-bit big-endian payload length followed by
//! the key-permuted payload bits. Superpixels are visited row-major; each
//! consumes `d = capacity_bits` stream bits and places the group pattern at
//! that position. Because every candidate pattern of a group yields the
//! same trit vector, the modulated field is untouched by the payload.

use std::fmt;
use std::str::FromStr;

use crate::codebook::{Codebook, Strategy};
use crate::error::{Error, Result};
use crate::rng::SplitMix64;
use crate::superpixel::{BlockPattern, BLOCK_SIDE, VALUE_COUNT};

/// Bits of length framing ahead of the payload.
pub const HEADER_BITS: u64 = 32;

/// XOR mask separating the fill stream from the permutation stream.
const FILL_SEED_MASK: u64 = 0xA5A5_A5A5_A5A5_A5A5;

/// 64-bit secret seeding the payload permutation and random strategies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct StegoKey(pub u64);

impl FromStr for StegoKey {
    type Err = Error;

    /// Exactly sixteen hex digits.
    fn from_str(s: &str) -> Result<Self> {
        if s.len() != 16 || !s.bytes().all(|b| b.is_ascii_hexdigit()) {
            return Err(Error::usage(format!("key must be 16 hex digits, got {s:?}")));
        }
        u64::from_str_radix(s, 16)
            .map(StegoKey)
            .map_err(|e| Error::usage(format!("bad key {s:?}: {e}")))
    }
}

impl fmt::Display for StegoKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:016x}", self.0)
    }
}

/// Ordered hidden bits, MSB-first per source byte.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Payload {
    pub bits: Vec<bool>,
}

impl Payload {
    pub fn from_bits(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    pub fn from_bytes(bytes: &[u8]) -> Self {
        let bits = bytes
            .iter()
            .flat_map(|&b| (0..8).rev().map(move |i| b >> i & 1 == 1))
            .collect();
        Self { bits }
    }

    /// Packs the bits MSB-first; a trailing partial byte is zero-padded.
    pub fn to_bytes(&self) -> Vec<u8> {
        self.bits
            .chunks(8)
            .map(|chunk| {
                chunk
                    .iter()
                    .enumerate()
                    .fold(0u8, |acc, (i, &b)| acc | (b as u8) << (7 - i))
            })
            .collect()
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }
}

/// Grid of canonical indices, one per superpixel, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TargetPlan {
    width: usize,
    height: usize,
    indices: Vec<u16>,
}

impl TargetPlan {
    pub fn new(width: usize, height: usize, indices: Vec<u16>) -> Result<Self> {
        if indices.len() != width * height {
            return Err(Error::dimension(format!(
                "plan of {width}×{height} needs {} entries, got {}",
                width * height,
                indices.len()
            )));
        }
        if let Some(&bad) = indices.iter().find(|&&i| i as usize >= VALUE_COUNT) {
            return Err(Error::usage(format!("plan entry {bad} outside 0..{VALUE_COUNT}")));
        }
        Ok(Self {
            width,
            height,
            indices,
        })
    }

    pub fn filled(width: usize, height: usize, idx: usize) -> Result<Self> {
        Self::new(width, height, vec![idx as u16; width * height])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn indices(&self) -> &[u16] {
        &self.indices
    }

    pub fn get(&self, row: usize, col: usize) -> usize {
        self.indices[row * self.width + col] as usize
    }
}

/// Binary mirror array of `4·H_sp` rows by `4·W_sp` columns, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DmdPattern {
    width: usize,
    height: usize,
    mirrors: Vec<bool>,
}

impl DmdPattern {
    /// All-OFF pattern; both dimensions must be positive multiples of 4.
    pub fn new(width: usize, height: usize) -> Result<Self> {
        Self::from_mirrors(width, height, vec![false; width * height])
    }

    pub fn from_mirrors(width: usize, height: usize, mirrors: Vec<bool>) -> Result<Self> {
        if width == 0 || height == 0 || width % BLOCK_SIDE != 0 || height % BLOCK_SIDE != 0 {
            return Err(Error::dimension(format!(
                "DMD pattern {width}×{height} is not a positive multiple of 4 in both axes"
            )));
        }
        if mirrors.len() != width * height {
            return Err(Error::dimension(format!(
                "{width}×{height} pattern needs {} mirrors, got {}",
                width * height,
                mirrors.len()
            )));
        }
        Ok(Self {
            width,
            height,
            mirrors,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Superpixel grid as (columns, rows).
    pub fn superpixels(&self) -> (usize, usize) {
        (self.width / BLOCK_SIDE, self.height / BLOCK_SIDE)
    }

    pub fn mirrors(&self) -> &[bool] {
        &self.mirrors
    }

    pub fn get(&self, y: usize, x: usize) -> bool {
        self.mirrors[y * self.width + x]
    }

    pub fn set(&mut self, y: usize, x: usize, on: bool) {
        self.mirrors[y * self.width + x] = on;
    }

    /// Block at superpixel row `row`, column `col`.
    pub fn block(&self, row: usize, col: usize) -> BlockPattern {
        let mut code = 0u16;
        for r in 0..BLOCK_SIDE {
            let base = (row * BLOCK_SIDE + r) * self.width + col * BLOCK_SIDE;
            for c in 0..BLOCK_SIDE {
                if self.mirrors[base + c] {
                    code |= 1 << (r * BLOCK_SIDE + c);
                }
            }
        }
        BlockPattern(code)
    }

    pub fn set_block(&mut self, row: usize, col: usize, p: BlockPattern) {
        for r in 0..BLOCK_SIDE {
            let base = (row * BLOCK_SIDE + r) * self.width + col * BLOCK_SIDE;
            for c in 0..BLOCK_SIDE {
                self.mirrors[base + c] = p.mirror(r, c);
            }
        }
    }
}

/// Fisher–Yates permutation of `0..n` driven by SplitMix64(key).
fn permutation(n: usize, key: StegoKey) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..n).collect();
    let mut rng = SplitMix64::new(key.0);
    for i in (1..n).rev() {
        let j = rng.next_below(i as u64 + 1) as usize;
        perm.swap(i, j);
    }
    perm
}

/// Scrambles bit positions: `out[i] = bits[perm[i]]`.
pub fn permute_bits(bits: &[bool], key: StegoKey) -> Vec<bool> {
    permutation(bits.len(), key)
        .into_iter()
        .map(|src| bits[src])
        .collect()
}

pub fn inverse_permute_bits(bits: &[bool], key: StegoKey) -> Vec<bool> {
    let mut out = vec![false; bits.len()];
    for (i, src) in permutation(bits.len(), key).into_iter().enumerate() {
        out[src] = bits[i];
    }
    out
}

/// Total hidable bits of a plan, header included.
pub fn capacity_of_plan(plan: &TargetPlan, cb: &Codebook) -> u64 {
    plan.indices()
        .iter()
        .map(|&i| u64::from(cb.groups()[i as usize].capacity_bits))
        .sum()
}

/// Renders a plan without hidden data, one strategy choice per superpixel in
/// row-major order.
pub fn render_plan(
    plan: &TargetPlan,
    strategy: Strategy,
    rng: &mut SplitMix64,
    cb: &Codebook,
) -> DmdPattern {
    let mut out = DmdPattern::new(plan.width() * BLOCK_SIDE, plan.height() * BLOCK_SIDE)
        .expect("plan dimensions are positive");
    for row in 0..plan.height() {
        for col in 0..plan.width() {
            let p = cb
                .select_pattern(plan.get(row, col), strategy, rng)
                .expect("plan entries are valid indices");
            out.set_block(row, col, p);
        }
    }
    out
}

/// Writes `payload` into the pattern choices of `plan`.
///
/// Superpixels past the end of the stream are completed with `fill`; a
/// random fill draws from SplitMix64(`key ^ 0xA5A5…`). If the stream ends
/// inside a superpixel, its missing low-order bits are zero.
pub fn embed(
    plan: &TargetPlan,
    payload: &Payload,
    key: StegoKey,
    fill: Strategy,
    cb: &Codebook,
) -> Result<DmdPattern> {
    if plan.width() == 0 || plan.height() == 0 {
        return Err(Error::dimension("empty target plan"));
    }
    let capacity = capacity_of_plan(plan, cb);
    let requested = HEADER_BITS + payload.len() as u64;
    if requested > capacity || payload.len() as u64 > u64::from(u32::MAX) {
        return Err(Error::PayloadTooLarge {
            capacity,
            requested,
        });
    }

    let len = payload.len() as u32;
    let mut stream: Vec<bool> = (0..HEADER_BITS).rev().map(|i| len >> i & 1 == 1).collect();
    stream.extend(permute_bits(&payload.bits, key));

    let mut out = DmdPattern::new(plan.width() * BLOCK_SIDE, plan.height() * BLOCK_SIDE)?;
    let mut fill_rng = SplitMix64::new(key.0 ^ FILL_SEED_MASK);
    let mut cursor = 0usize;
    for row in 0..plan.height() {
        for col in 0..plan.width() {
            let idx = plan.get(row, col);
            let group = &cb.groups()[idx];
            let p = if cursor < stream.len() {
                let d = group.capacity_bits as usize;
                let mut position = 0usize;
                for k in 0..d {
                    let bit = stream.get(cursor + k).copied().unwrap_or(false);
                    position = position << 1 | bit as usize;
                }
                cursor += d;
                group.patterns[position]
            } else {
                cb.select_pattern(idx, fill, &mut fill_rng)?
            };
            out.set_block(row, col, p);
        }
    }
    Ok(out)
}

/// Recovers the payload written by [`embed`] with the same key.
pub fn extract(pattern: &DmdPattern, key: StegoKey, cb: &Codebook) -> Result<Payload> {
    let (cols, rows) = pattern.superpixels();
    let mut stream = Vec::new();
    let mut needed: Option<u64> = None;
    let mut available = 0u64;

    for row in 0..rows {
        for col in 0..cols {
            let (idx, position) = cb.pattern_index_in_group(pattern.block(row, col));
            let group = &cb.groups()[idx];
            let d = group.capacity_bits;
            if group.patterns.len() != 1 << d || position >> d != 0 {
                return Err(Error::InvalidEmbeddedPattern {
                    row,
                    col,
                    position,
                    bits: d,
                });
            }
            available += u64::from(d);
            if needed.is_some_and(|n| stream.len() as u64 >= n) {
                continue;
            }
            stream.extend((0..d).rev().map(|i| position >> i & 1 == 1));
            if needed.is_none() && stream.len() as u64 >= HEADER_BITS {
                let len = stream[..HEADER_BITS as usize]
                    .iter()
                    .fold(0u64, |acc, &b| acc << 1 | b as u64);
                needed = Some(HEADER_BITS + len);
            }
        }
    }

    let Some(needed) = needed else {
        return Err(Error::BadHeader {
            declared: 0,
            available,
        });
    };
    let declared = needed - HEADER_BITS;
    if needed > available {
        return Err(Error::BadHeader {
            declared,
            available: available.saturating_sub(HEADER_BITS),
        });
    }
    let body = &stream[HEADER_BITS as usize..needed as usize];
    Ok(Payload::from_bits(inverse_permute_bits(body, key)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codebook::Strategy;
    use crate::superpixel::{CoeffVector, PhaseAssignment};
    use proptest::prelude::*;
    use std::sync::OnceLock;

    fn cb() -> &'static Codebook {
        static CB: OnceLock<Codebook> = OnceLock::new();
        CB.get_or_init(|| Codebook::build(PhaseAssignment::row_major()))
    }

    fn random_plan(w: usize, h: usize, seed: u64) -> TargetPlan {
        let mut rng = SplitMix64::new(seed);
        let idx = (0..w * h).map(|_| rng.next_below(6561) as u16).collect();
        TargetPlan::new(w, h, idx).unwrap()
    }

    fn random_bits(n: usize, seed: u64) -> Vec<bool> {
        let mut rng = SplitMix64::new(seed);
        (0..n).map(|_| rng.next_u64() & 1 == 1).collect()
    }

    fn decoded_plan(p: &DmdPattern) -> Vec<usize> {
        let (cols, rows) = p.superpixels();
        (0..rows)
            .flat_map(|r| (0..cols).map(move |c| (r, c)))
            .map(|(r, c)| cb().pattern_index_in_group(p.block(r, c)).0)
            .collect()
    }

    #[test]
    fn key_parsing() {
        let k: StegoKey = "00000000deadbeef".parse().unwrap();
        assert_eq!(k.0, 0xdead_beef);
        assert_eq!(k.to_string(), "00000000deadbeef");
        assert!("deadbeef".parse::<StegoKey>().is_err());
        assert!("+0000000deadbeef".parse::<StegoKey>().is_err());
        assert!("0000000000deadbeeg".parse::<StegoKey>().is_err());
    }

    #[test]
    fn payload_bytes_msb_first() {
        let p = Payload::from_bytes(&[0b1000_0001, 0xff]);
        assert_eq!(&p.bits[..8], &[true, false, false, false, false, false, false, true]);
        assert_eq!(p.to_bytes(), vec![0b1000_0001, 0xff]);
        assert_eq!(Payload::from_bits(vec![true, true]).to_bytes(), vec![0b1100_0000]);
    }

    #[test]
    fn permute_empty() {
        assert!(permute_bits(&[], StegoKey(5)).is_empty());
        assert!(inverse_permute_bits(&[], StegoKey(5)).is_empty());
    }

    #[test]
    fn permutation_actually_moves_bits() {
        let bits: Vec<bool> = (0..64).map(|i| i < 32).collect();
        let p = permute_bits(&bits, StegoKey(1));
        assert_ne!(p, bits);
        assert_eq!(p.iter().filter(|&&b| b).count(), 32);
    }

    #[test]
    fn capacity_examples() {
        let zero = CoeffVector::ZERO.canonical_index();
        assert_eq!(capacity_of_plan(&TargetPlan::filled(7, 5, zero).unwrap(), cb()), 8 * 35);
        let full = CoeffVector([1; 8]).canonical_index();
        assert_eq!(capacity_of_plan(&TargetPlan::filled(7, 5, full).unwrap(), cb()), 0);

        let plan = random_plan(30, 20, 8);
        let brute: u64 = plan
            .indices()
            .iter()
            .map(|&i| {
                let n = cb().group(i as usize).unwrap().patterns.len() as f64;
                n.log2().floor() as u64
            })
            .sum();
        assert_eq!(capacity_of_plan(&plan, cb()), brute);
    }

    #[test]
    fn empty_payload_round_trip() {
        let plan = random_plan(8, 8, 1);
        let out = embed(&plan, &Payload::default(), StegoKey(3), Strategy::Min, cb()).unwrap();
        assert!(extract(&out, StegoKey(3), cb()).unwrap().is_empty());
    }

    #[test]
    fn five_bit_labels_follow_group_order() {
        // Eight 5-bit superpixels hold the 32-bit header plus an 8-bit
        // payload exactly. Header 0x00000008 puts positions 0,0,0,0,0,2 in
        // superpixels 0..=5; superpixel 7 carries permuted payload bits 3..8.
        let g = CoeffVector([0, 1, 0, 1, 0, 0, 0, -1]).canonical_index();
        let group = cb().group(g).unwrap();
        let plan = TargetPlan::filled(8, 1, g).unwrap();
        let key = StegoKey(0x5eed);
        for label in 0usize..32 {
            let mut scrambled = vec![true, false, true];
            scrambled.extend((0..5).rev().map(|i| label >> i & 1 == 1));
            let payload = Payload::from_bits(inverse_permute_bits(&scrambled, key));
            let out = embed(&plan, &payload, key, Strategy::Min, cb()).unwrap();
            for col in 0..5 {
                assert_eq!(out.block(0, col), group.patterns[0]);
            }
            assert_eq!(out.block(0, 5), group.patterns[2]);
            assert_eq!(out.block(0, 6), group.patterns[0b00101]);
            assert_eq!(out.block(0, 7), group.patterns[label]);
            assert_eq!(extract(&out, key, cb()).unwrap(), payload);
        }
    }

    #[test]
    fn partial_superpixel_padded_with_zeros() {
        // 32 + 1 bits over 5-bit superpixels: superpixel 6 carries header
        // bits 30, 31, the payload bit, then two zero pad bits.
        let g = CoeffVector([0, 1, 0, 1, 0, 0, 0, -1]).canonical_index();
        let plan = TargetPlan::filled(8, 1, g).unwrap();
        let out = embed(&plan, &Payload::from_bits(vec![true]), StegoKey(1), Strategy::Max, cb()).unwrap();
        let group = cb().group(g).unwrap();
        assert_eq!(out.block(0, 6), group.patterns[0b01100]);
        assert_eq!(out.block(0, 7), group.max_pattern());
    }

    #[test]
    fn too_large_payload_rejected() {
        let plan = random_plan(4, 4, 2);
        let cap = capacity_of_plan(&plan, cb());
        let bits = random_bits((cap - HEADER_BITS + 1) as usize, 1);
        match embed(&plan, &Payload::from_bits(bits), StegoKey(1), Strategy::Min, cb()) {
            Err(Error::PayloadTooLarge { capacity, requested }) => {
                assert_eq!(capacity, cap);
                assert_eq!(requested, cap + 1);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn exact_capacity_round_trip_64x64() {
        let plan = random_plan(64, 64, 77);
        let cap = capacity_of_plan(&plan, cb());
        let bits = random_bits((cap - HEADER_BITS) as usize, 78);
        let key = StegoKey(0x0123_4567_89ab_cdef);
        let out = embed(&plan, &Payload::from_bits(bits.clone()), key, Strategy::Random, cb()).unwrap();
        assert_eq!(extract(&out, key, cb()).unwrap().bits, bits);
    }

    #[test]
    fn wrong_key_keeps_length_and_weight() {
        let plan = random_plan(16, 16, 4);
        let bits = random_bits(200, 5);
        let out = embed(&plan, &Payload::from_bits(bits.clone()), StegoKey(1), Strategy::Min, cb()).unwrap();
        let got = extract(&out, StegoKey(2), cb()).unwrap().bits;
        assert_eq!(got.len(), bits.len());
        assert_ne!(got, bits);
        let mut a = got.clone();
        let mut b = bits.clone();
        a.sort();
        b.sort();
        assert_eq!(a, b);
        // Undoing the wrong key and applying the right one recovers the payload.
        let scrambled = permute_bits(&got, StegoKey(2));
        assert_eq!(inverse_permute_bits(&scrambled, StegoKey(1)), bits);
    }

    #[test]
    fn all_off_pattern_extracts_empty() {
        let p = DmdPattern::new(32, 32).unwrap();
        assert!(extract(&p, StegoKey(9), cb()).unwrap().is_empty());
    }

    #[test]
    fn all_on_pattern_has_bad_header() {
        // ALL_ON is the last pattern of the zero group: position 255, so the
        // header decodes to 0xFFFFFFFF.
        let mut p = DmdPattern::new(8, 8).unwrap();
        for r in 0..2 {
            for c in 0..2 {
                p.set_block(r, c, BlockPattern::ALL_ON);
            }
        }
        assert!(matches!(
            extract(&p, StegoKey(0), cb()),
            Err(Error::BadHeader { declared: 0xFFFF_FFFF, .. })
        ));
    }

    #[test]
    fn tiny_host_without_header_room() {
        let full = CoeffVector([1; 8]).canonical_index();
        let plan = TargetPlan::filled(2, 2, full).unwrap();
        let out = render_plan(&plan, Strategy::Min, &mut SplitMix64::new(0), cb());
        assert!(matches!(extract(&out, StegoKey(0), cb()), Err(Error::BadHeader { .. })));
        assert!(embed(&plan, &Payload::default(), StegoKey(0), Strategy::Min, cb()).is_err());
    }

    #[test]
    fn pattern_dimensions_validated() {
        assert!(DmdPattern::new(6, 8).is_err());
        assert!(DmdPattern::new(0, 8).is_err());
        assert!(DmdPattern::from_mirrors(4, 4, vec![false; 15]).is_err());
        assert!(TargetPlan::new(2, 2, vec![0; 3]).is_err());
        assert!(TargetPlan::new(1, 1, vec![6561]).is_err());
    }

    #[test]
    fn embedding_is_deterministic() {
        let plan = random_plan(20, 12, 6);
        let bits = random_bits(300, 7);
        let a = embed(&plan, &Payload::from_bits(bits.clone()), StegoKey(4), Strategy::Random, cb()).unwrap();
        let b = embed(&plan, &Payload::from_bits(bits), StegoKey(4), Strategy::Random, cb()).unwrap();
        assert_eq!(a, b);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn permutation_round_trip(bits in proptest::collection::vec(any::<bool>(), 0..500), key: u64) {
            let k = StegoKey(key);
            prop_assert_eq!(inverse_permute_bits(&permute_bits(&bits, k), k), bits.clone());
            prop_assert_eq!(permute_bits(&inverse_permute_bits(&bits, k), k), bits);
        }

        #[test]
        fn round_trip_and_non_destructive(
            w in 1usize..12, h in 1usize..12, seed: u64, key: u64,
            frac in 0.0f64..=1.0, fill in 0u8..3,
        ) {
            let plan = random_plan(w, h, seed);
            let cap = capacity_of_plan(&plan, cb());
            prop_assume!(cap >= HEADER_BITS);
            let n = ((cap - HEADER_BITS) as f64 * frac) as usize;
            let bits = random_bits(n, seed ^ 1);
            let fill = [Strategy::Min, Strategy::Max, Strategy::Random][fill as usize];
            let out = embed(&plan, &Payload::from_bits(bits.clone()), StegoKey(key), fill, cb()).unwrap();
            prop_assert_eq!(extract(&out, StegoKey(key), cb()).unwrap().bits, bits);

            let reference = render_plan(&plan, Strategy::Min, &mut SplitMix64::new(0), cb());
            prop_assert_eq!(decoded_plan(&out), decoded_plan(&reference));
            let expected: Vec<usize> = plan.indices().iter().map(|&i| i as usize).collect();
            prop_assert_eq!(decoded_plan(&out), expected);
        }
    }
}
