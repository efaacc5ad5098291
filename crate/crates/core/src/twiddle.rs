//! Twiddle-factor tables and the distributed, compressed ROMs that serve them.
//!
//! Twiddles are roots of unity `exp(i*pi*e/1024)` with an integer exponent
//! `e` taken mod 2048. The in-place network at stage `sg` and group `g` uses
//! root number `2^(sg+1) + g` of the bit-reversed root sequence, so the
//! transform of any size `n <= 1024` consumes a prefix of one table built for
//! the maximum size.
//!
//! Only the first half of each stage's root block is ever consumed, which
//! gives a 512-entry table for `n_max = 1024`:
//!
//! ```text
//! index   0     1     2..4     4..8       ...  256..512
//! root    gm2   gm3   gm4..6   gm8..12    ...  gm512..768
//! stage   0     -     1        2          ...  8
//! ```
//!
//! `gm3 = i * gm2` is never consumed; it completes the first pair so the
//! whole table splits into `(w, i*w)` pairs. Every ROM image is made of such
//! pairs, which is what lets [`CompressedRom`] keep only the even entries.

use alloc::vec::Vec;
use core::cell::Cell;
use core::f64::consts::PI;

use crate::{log2, ComplexWord, Direction, Error, Result, S_MAX};

/// Exponent units per quarter turn (`pi/2` in units of `pi/1024`).
const QUARTER: u32 = 512;
const FULL_TURN: u32 = 4 * QUARTER;

/// Pair adjacency tolerance used when compressing a ROM image.
pub const ADJACENCY_TOL: f64 = 1e-12;

/// Bytes per stored complex entry (two binary64 words).
pub const BYTES_PER_ENTRY: usize = 16;

/// Exponent of root `k` of the bit-reversed sequence: `rev10(k)`.
pub fn root_exponent(k: usize) -> u32 {
    debug_assert!(k < S_MAX);
    (k as u32).reverse_bits() >> (32 - log2(S_MAX))
}

/// `exp(i*pi*e/1024)`.
///
/// The angle is reduced to its first-quadrant residue before `cos`/`sin`
/// and rotated back by an exact power of `i`, so roots a quarter turn apart
/// are exact rotations of each other.
pub fn unit_root(e: u32) -> ComplexWord {
    let e = e % FULL_TURN;
    let base = ComplexWord::from_angle(PI * f64::from(e % QUARTER) / 1024.0);
    match e / QUARTER {
        0 => base,
        1 => base.mul_i(),
        2 => -base,
        _ => base.mul_neg_i(),
    }
}

/// First table index used by stage `sg`.
#[inline]
pub fn stage_base(sg: usize) -> usize {
    if sg == 0 {
        0
    } else {
        1 << sg
    }
}

/// Root number (into the bit-reversed sequence) stored at table index `idx`.
pub fn table_root(idx: usize) -> usize {
    match idx {
        0 => 2,
        1 => 3,
        _ => idx + (1 << idx.ilog2()),
    }
}

/// Anything that can hand a butterfly its twiddle factor.
///
/// `stage` is the network stage (`0..log2(n)-1`) and `bt` the butterfly
/// index inside it; the inverse direction is served the conjugate.
pub trait TwiddleSource {
    fn twiddle(&self, n: usize, stage: usize, bt: usize, dir: Direction) -> Result<ComplexWord>;
}

/// Group of butterfly `bt` at stage `sg` in a transform of size `n`.
#[inline]
pub(crate) fn group_of(n: usize, sg: usize, bt: usize) -> usize {
    let stages = log2(n) as usize - 1;
    bt >> (stages - 1 - sg)
}

/// The half-filtered twiddle table for transforms up to `n_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwiddleTable {
    entries: Vec<ComplexWord>,
    n_max: usize,
}

impl TwiddleTable {
    /// Table for `n_max` (power of two in `4..=1024`), `n_max / 2` entries.
    pub fn new(n_max: usize) -> Result<Self> {
        if !n_max.is_power_of_two() || !(4..=S_MAX).contains(&n_max) {
            return Err(Error::InvalidSize {
                n: n_max,
                min: 4,
                max: S_MAX,
            });
        }
        let entries = (0..n_max / 2)
            .map(|idx| unit_root(root_exponent(table_root(idx))))
            .collect();
        Ok(Self { entries, n_max })
    }

    /// The full table for [`S_MAX`].
    pub fn full() -> Self {
        Self::new(S_MAX).expect("S_MAX is a valid table size")
    }

    pub fn from_entries(entries: Vec<ComplexWord>, n_max: usize) -> Self {
        Self { entries, n_max }
    }

    pub fn entries(&self) -> &[ComplexWord] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Twiddle of stage `sg`, group `g`.
    pub fn get(&self, sg: usize, g: usize) -> Option<ComplexWord> {
        self.entries.get(stage_base(sg) + g).copied()
    }
}

impl TwiddleSource for TwiddleTable {
    fn twiddle(&self, n: usize, stage: usize, bt: usize, dir: Direction) -> Result<ComplexWord> {
        let idx = stage_base(stage) + group_of(n, stage, bt);
        let w = *self.entries.get(idx).ok_or(Error::OutOfRange {
            what: "twiddle table index",
            index: idx,
            limit: self.entries.len(),
        })?;
        Ok(match dir {
            Direction::Forward => w,
            Direction::Inverse => w.conj(),
        })
    }
}

/// Counts fetches made through an inner source. Every butterfly fetches
/// exactly one twiddle, so this doubles as a butterfly counter.
#[derive(Debug)]
pub struct CountingSource<'a, S: ?Sized> {
    inner: &'a S,
    count: Cell<usize>,
}

impl<'a, S: TwiddleSource + ?Sized> CountingSource<'a, S> {
    pub fn new(inner: &'a S) -> Self {
        Self {
            inner,
            count: Cell::new(0),
        }
    }

    pub fn count(&self) -> usize {
        self.count.get()
    }
}

impl<S: TwiddleSource + ?Sized> TwiddleSource for CountingSource<'_, S> {
    fn twiddle(&self, n: usize, stage: usize, bt: usize, dir: Direction) -> Result<ComplexWord> {
        self.count.set(self.count.get() + 1);
        self.inner.twiddle(n, stage, bt, dir)
    }
}

/// Swaps `x[st..st+sz]` with the block that follows it.
pub fn permute_blocks<T>(x: &mut [T], st: usize, sz: usize) -> Result<()> {
    let end = st.saturating_add(sz.saturating_mul(2));
    if end > x.len() {
        return Err(Error::OutOfRange {
            what: "block end",
            index: end,
            limit: x.len(),
        });
    }
    x[st..end].rotate_left(sz);
    Ok(())
}

/// Offline block permutation of a twiddle sequence for size `n`.
///
/// Runs `i` from `log2(n) - 1` down to 3; for each, blocks of `2^(i-3)`
/// starting at `2^(i-2) + 2^i` and then every `2^(i-1)` are swapped with
/// their successor. Indices are 0-based. Needs `x.len() >= n`.
pub fn permute_sequence<T>(x: &mut [T], n: usize) -> Result<()> {
    if !n.is_power_of_two() || n < 2 {
        return Err(Error::InvalidSize {
            n,
            min: 2,
            max: usize::MAX,
        });
    }
    if x.len() < n {
        return Err(Error::TableTooSmall {
            len: x.len(),
            n,
            needed: n,
        });
    }
    let top = log2(n) as usize;
    for i in (3..top).rev() {
        let sz = 1 << (i - 3);
        let mut j = (1 << (i - 2)) + (1 << i);
        while j < n {
            permute_blocks(x, j, sz)?;
            j += 1 << (i - 1);
        }
    }
    Ok(())
}

/// [`permute_sequence`] applied to a twiddle table.
pub fn permute_twiddles(w: &TwiddleTable, n: usize) -> Result<TwiddleTable> {
    let mut entries = w.entries.clone();
    permute_sequence(&mut entries, n)?;
    Ok(TwiddleTable {
        entries,
        n_max: w.n_max,
    })
}

/// Where one stage's twiddles sit inside a PE's ROM.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StageSpan {
    /// First table index covered (always even).
    pub table_start: usize,
    /// Entries covered (always even).
    pub len: usize,
    /// Logical ROM address of the first covered entry.
    pub rom_base: usize,
}

/// A PE and a logical address inside its ROM.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RomAddress {
    pub pe: usize,
    pub addr: usize,
}

fn check_pe_count(n_pe: usize, n_max: usize) -> Result<()> {
    let max = n_max / 4;
    if !n_pe.is_power_of_two() || n_pe > max {
        return Err(Error::InvalidPeCount { n_pe, max });
    }
    Ok(())
}

/// Split of the table among `n_pe` ROMs, in consumption order.
///
/// PE `p` at stage `sg` serves groups `p * 2^sg / n_pe ..` (one group when
/// `2^sg < n_pe`), independent of the transform size. Each stage claims the
/// pair-aligned table range around those groups.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RomLayout {
    n_max: usize,
    n_pe: usize,
    spans: Vec<Vec<StageSpan>>,
}

impl RomLayout {
    pub fn new(n_max: usize, n_pe: usize) -> Result<Self> {
        if !n_max.is_power_of_two() || !(4..=S_MAX).contains(&n_max) {
            return Err(Error::InvalidSize {
                n: n_max,
                min: 4,
                max: S_MAX,
            });
        }
        check_pe_count(n_pe, n_max)?;
        let stages = log2(n_max) as usize - 1;
        let spans = (0..n_pe)
            .map(|p| {
                let mut rom_base = 0;
                (0..stages)
                    .map(|sg| {
                        let groups = 1usize << sg;
                        let (first, count) = if groups >= n_pe {
                            (p * (groups / n_pe), groups / n_pe)
                        } else {
                            (p * groups / n_pe, 1)
                        };
                        let lo = stage_base(sg) + first;
                        let hi = lo + count - 1;
                        let table_start = lo & !1;
                        let len = (hi | 1) + 1 - table_start;
                        let span = StageSpan {
                            table_start,
                            len,
                            rom_base,
                        };
                        rom_base += len;
                        span
                    })
                    .collect()
            })
            .collect();
        Ok(Self { n_max, n_pe, spans })
    }

    pub fn n_pe(&self) -> usize {
        self.n_pe
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Spans of one PE, indexed by stage.
    pub fn spans(&self, pe: usize) -> &[StageSpan] {
        &self.spans[pe]
    }

    /// Logical image length of one PE's ROM.
    pub fn image_len(&self, pe: usize) -> usize {
        self.spans[pe].iter().map(|s| s.len).sum()
    }

    /// PEs that actually run for size `n` (one when `n < 4`).
    pub fn active_pes(&self, n: usize) -> usize {
        self.n_pe.min(n / 4).max(1)
    }

    /// Physical PE running butterfly `bt` in a size-`n` transform.
    pub fn pe_of(&self, n: usize, bt: usize) -> usize {
        let active = self.active_pes(n);
        let per_pe = (n / 4 / active).max(1);
        (bt / per_pe) * (self.n_pe / active)
    }

    /// ROM slot holding the twiddle of (`sg`, `bt`) for size `n`.
    pub fn locate(&self, n: usize, sg: usize, bt: usize) -> Result<RomAddress> {
        if !n.is_power_of_two() || n < 4 || n > self.n_max {
            return Err(Error::InvalidSize {
                n,
                min: 4,
                max: self.n_max,
            });
        }
        let stages = log2(n) as usize - 1;
        if sg >= stages || bt >= n / 4 {
            return Err(Error::OutOfRange {
                what: "butterfly",
                index: bt,
                limit: n / 4,
            });
        }
        let pe = self.pe_of(n, bt);
        let idx = stage_base(sg) + group_of(n, sg, bt);
        let span = self.spans[pe][sg];
        if idx < span.table_start || idx >= span.table_start + span.len {
            return Err(Error::Configuration("twiddle outside the PE's ROM span"));
        }
        Ok(RomAddress {
            pe,
            addr: span.rom_base + idx - span.table_start,
        })
    }
}

/// One PE's uncompressed ROM contents.
#[derive(Debug, Clone, PartialEq)]
pub struct RomImage {
    pub pe: usize,
    pub entries: Vec<ComplexWord>,
}

/// Cuts the table into per-PE images following [`RomLayout`].
pub fn split_roms(w: &TwiddleTable, n_pe: usize) -> Result<Vec<RomImage>> {
    let layout = RomLayout::new(w.n_max, n_pe)?;
    split_with_layout(w, &layout)
}

fn split_with_layout(w: &TwiddleTable, layout: &RomLayout) -> Result<Vec<RomImage>> {
    if w.len() < w.n_max / 2 {
        return Err(Error::TableTooSmall {
            len: w.len(),
            n: w.n_max,
            needed: w.n_max / 2,
        });
    }
    Ok((0..layout.n_pe)
        .map(|pe| RomImage {
            pe,
            entries: layout.spans[pe]
                .iter()
                .flat_map(|s| {
                    w.entries[s.table_start..s.table_start + s.len]
                        .iter()
                        .copied()
                })
                .collect(),
        })
        .collect())
}

/// How the odd entry of a compressed pair derives from the stored one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairSign {
    /// `odd = i * even`
    PlusI,
    /// `odd = -i * even`
    MinusI,
}

/// A ROM image holding only its even-index entries plus one sign bit per pair.
#[derive(Debug, Clone, PartialEq)]
pub struct CompressedRom {
    pub pe_index: usize,
    pub stored: Vec<ComplexWord>,
    pub signs: Vec<PairSign>,
}

/// Compresses an image whose consecutive pairs are `(w, +-i*w)`.
///
/// The relation is verified per pair (tolerance [`ADJACENCY_TOL`]); a
/// violation names the first failing pair.
pub fn compress_rom(pe_index: usize, rom: &[ComplexWord]) -> Result<CompressedRom> {
    if !rom.len().is_multiple_of(2) {
        return Err(Error::OddRomLength { len: rom.len() });
    }
    let mut stored = Vec::with_capacity(rom.len() / 2);
    let mut signs = Vec::with_capacity(rom.len() / 2);
    for (t, pair) in rom.chunks_exact(2).enumerate() {
        let (even, odd) = (pair[0], pair[1]);
        let sign = if odd.max_abs_diff(even.mul_i()) <= ADJACENCY_TOL {
            PairSign::PlusI
        } else if odd.max_abs_diff(even.mul_neg_i()) <= ADJACENCY_TOL {
            PairSign::MinusI
        } else {
            return Err(Error::Adjacency {
                pair: t,
                even_index: 2 * t,
                odd_index: 2 * t + 1,
            });
        };
        stored.push(even);
        signs.push(sign);
    }
    Ok(CompressedRom {
        pe_index,
        stored,
        signs,
    })
}

impl CompressedRom {
    pub fn logical_len(&self) -> usize {
        2 * self.stored.len()
    }

    /// Reads logical address `addr`. Odd addresses are rebuilt from the
    /// stored even entry by a component swap and one sign flip; the inverse
    /// direction flips the imaginary sign on top.
    pub fn fetch(&self, addr: usize, dir: Direction) -> Result<ComplexWord> {
        let pair = addr / 2;
        let even = *self.stored.get(pair).ok_or(Error::RomAddress {
            pe: self.pe_index,
            addr,
            len: self.logical_len(),
        })?;
        let w = if addr.is_multiple_of(2) {
            even
        } else {
            match self.signs[pair] {
                PairSign::PlusI => even.mul_i(),
                PairSign::MinusI => even.mul_neg_i(),
            }
        };
        Ok(match dir {
            Direction::Forward => w,
            Direction::Inverse => w.conj(),
        })
    }

    pub fn decompress(&self) -> Vec<ComplexWord> {
        (0..self.logical_len())
            .map(|a| self.fetch(a, Direction::Forward).expect("address in range"))
            .collect()
    }
}

/// Reads a single ROM address; see [`CompressedRom::fetch`].
pub fn fetch_twiddle(rom: &CompressedRom, addr: usize, dir: Direction) -> Result<ComplexWord> {
    rom.fetch(addr, dir)
}

/// The full set of per-PE compressed ROMs of one processor configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RomSet {
    layout: RomLayout,
    roms: Vec<CompressedRom>,
}

impl RomSet {
    /// ROMs for `n_pe` PEs over the full [`S_MAX`] table.
    pub fn build(n_pe: usize) -> Result<Self> {
        Self::from_table(&TwiddleTable::full(), n_pe)
    }

    pub fn from_table(table: &TwiddleTable, n_pe: usize) -> Result<Self> {
        let layout = RomLayout::new(table.n_max, n_pe)?;
        let roms = split_with_layout(table, &layout)?
            .iter()
            .map(|img| compress_rom(img.pe, &img.entries))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { layout, roms })
    }

    pub fn layout(&self) -> &RomLayout {
        &self.layout
    }

    pub fn roms(&self) -> &[CompressedRom] {
        &self.roms
    }

    pub fn rom(&self, pe: usize) -> &CompressedRom {
        &self.roms[pe]
    }

    pub fn n_pe(&self) -> usize {
        self.layout.n_pe
    }

    /// Stored complex entries summed over all ROMs.
    pub fn total_stored(&self) -> usize {
        self.roms.iter().map(|r| r.stored.len()).sum()
    }

    pub fn stored_bytes(&self) -> usize {
        self.total_stored() * BYTES_PER_ENTRY
    }
}

impl TwiddleSource for RomSet {
    fn twiddle(&self, n: usize, stage: usize, bt: usize, dir: Direction) -> Result<ComplexWord> {
        let at = self.layout.locate(n, stage, bt)?;
        self.roms[at.pe].fetch(at.addr, dir)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn table_root_numbering() {
        let roots: Vec<usize> = (0..12).map(table_root).collect();
        assert_eq!(roots, vec![2, 3, 4, 5, 8, 9, 10, 11, 16, 17, 18, 19]);
        assert_eq!(table_root(511), 767);
        assert_eq!(table_root(256), 512);
    }

    #[test]
    fn unit_root_quadrants_are_exact_rotations() {
        for e in 0..QUARTER {
            let w = unit_root(e);
            assert!(unit_root(e + QUARTER).bit_eq(w.mul_i()));
            assert!(unit_root(e + 2 * QUARTER).bit_eq(-w));
            assert!(unit_root(e + 3 * QUARTER).bit_eq(w.mul_neg_i()));
        }
    }

    #[test]
    fn table_entries_on_unit_circle() {
        let t = TwiddleTable::full();
        assert_eq!(t.len(), 512);
        for w in t.entries() {
            assert!((w.abs() - 1.0).abs() < 1e-12);
        }
        // stage 0 twiddle is exp(i*pi/4)
        let s = core::f64::consts::FRAC_1_SQRT_2;
        assert!(t.entries()[0].max_abs_diff(ComplexWord::new(s, s)) < 1e-15);
    }

    #[test]
    fn permute_blocks_definition() {
        let mut x: Vec<u32> = (0..8).collect();
        permute_blocks(&mut x, 2, 2).unwrap();
        assert_eq!(x, vec![0, 1, 4, 5, 2, 3, 6, 7]);
        permute_blocks(&mut x, 2, 2).unwrap();
        assert_eq!(x, (0..8).collect::<Vec<_>>());

        let mut y: Vec<u32> = (0..8).collect();
        permute_blocks(&mut y, 0, 1).unwrap();
        assert_eq!(y, vec![1, 0, 2, 3, 4, 5, 6, 7]);
    }

    #[test]
    fn permute_blocks_range_overflow() {
        let mut x = [0u8; 8];
        assert!(matches!(
            permute_blocks(&mut x, 5, 2),
            Err(Error::OutOfRange { .. })
        ));
    }

    #[test]
    fn permutation_identity_for_eight() {
        let mut x: Vec<u32> = (0..8).collect();
        permute_sequence(&mut x, 8).unwrap();
        assert_eq!(x, (0..8).collect::<Vec<_>>());
    }

    #[test]
    fn permuting_needs_enough_entries() {
        let t = TwiddleTable::full();
        assert!(matches!(
            permute_twiddles(&t, 1024),
            Err(Error::TableTooSmall { .. })
        ));
        assert!(permute_twiddles(&t, 512).is_ok());
    }

    #[test]
    fn compress_keeps_even_entries() {
        let w = ComplexWord::new(0.6, 0.8);
        let u = ComplexWord::new(-0.28, 0.96);
        let rom = [w, w.mul_i(), u, u.mul_neg_i()];
        let c = compress_rom(3, &rom).unwrap();
        assert_eq!(c.stored, vec![w, u]);
        assert_eq!(c.signs, vec![PairSign::PlusI, PairSign::MinusI]);
        assert_eq!(c.logical_len(), 4);
        assert!(c.decompress().iter().zip(&rom).all(|(a, b)| a.bit_eq(*b)));
    }

    #[test]
    fn compress_rejects_broken_pair() {
        let w = ComplexWord::new(0.6, 0.8);
        let rom = [w, w.mul_i(), w, w];
        assert_eq!(
            compress_rom(0, &rom),
            Err(Error::Adjacency {
                pair: 1,
                even_index: 2,
                odd_index: 3
            })
        );
        assert_eq!(
            compress_rom(0, &rom[..3]),
            Err(Error::OddRomLength { len: 3 })
        );
    }

    #[test]
    fn fetch_derives_odd_and_conjugates() {
        let (a, b) = (0.6, 0.8);
        let c = compress_rom(0, &[ComplexWord::new(a, b), ComplexWord::new(-b, a)]).unwrap();
        assert_eq!(
            c.fetch(0, Direction::Forward).unwrap(),
            ComplexWord::new(a, b)
        );
        assert_eq!(
            c.fetch(1, Direction::Forward).unwrap(),
            ComplexWord::new(-b, a)
        );
        assert_eq!(
            c.fetch(0, Direction::Inverse).unwrap(),
            ComplexWord::new(a, -b)
        );
        assert!(matches!(
            fetch_twiddle(&c, 2, Direction::Forward),
            Err(Error::RomAddress {
                addr: 2,
                len: 2,
                ..
            })
        ));
    }

    #[test]
    fn single_pe_rom_is_the_table() {
        let t = TwiddleTable::full();
        let images = split_roms(&t, 1).unwrap();
        assert_eq!(images.len(), 1);
        assert_eq!(images[0].entries, t.entries());
    }

    #[test]
    fn layout_rejects_bad_pe_counts() {
        assert!(matches!(
            RomLayout::new(1024, 3),
            Err(Error::InvalidPeCount { n_pe: 3, .. })
        ));
        assert!(matches!(
            RomLayout::new(1024, 512),
            Err(Error::InvalidPeCount { .. })
        ));
    }
}
