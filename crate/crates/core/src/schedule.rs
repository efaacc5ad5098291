//! Conflict-free butterfly scheduling over `2 * n_PE` single-port banks.
//!
//! Packed word `w` starts in bank `w / S_M` at offset `w % S_M`. Each stage
//! runs `S_M` batches; in batch `bt_PE` every PE `p` executes butterfly
//! `bt = S_M * p + bt_PE`. From the last safe stage onwards some butterflies
//! write their results crosswise (output exchange), which moves a word pair
//! between banks and keeps each later stage's operand pairs apart. The
//! scheduler tracks where every word lives, so the generated bank/offset
//! pairs are exact for the whole run.
//!
//! Slot semantics of one [`ButterflyDispatch`]: slot 0 is
//! `(bank0, addr0)`, slot 1 is `(bank1, addr1)`. Without input exchange `u`
//! is read from slot 0 and `v` from slot 1, otherwise the other way round.
//! Results go back to the slots they came from (`x` to the slot of `u`),
//! crossed over when output exchange is set.

use alloc::vec::Vec;

use crate::ring::butterfly_operands;
use crate::twiddle::RomLayout;
use crate::{log2, Direction, Error, Result, S_MAX};

/// A transform size, PE count and direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ScheduleConfig {
    n: usize,
    n_pe: usize,
    direction: Direction,
}

impl ScheduleConfig {
    /// `n` is a power of two in `2..=1024`, `n_pe` a power of two with at
    /// most `1024 / 4` PEs. Sizes smaller than `4 * n_pe` leave PEs idle.
    pub fn new(n: usize, n_pe: usize, direction: Direction) -> Result<Self> {
        if !n.is_power_of_two() || !(2..=S_MAX).contains(&n) {
            return Err(Error::InvalidSize {
                n,
                min: 2,
                max: S_MAX,
            });
        }
        if !n_pe.is_power_of_two() || n_pe > S_MAX / 4 {
            return Err(Error::InvalidPeCount {
                n_pe,
                max: S_MAX / 4,
            });
        }
        Ok(Self { n, n_pe, direction })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn n_pe(&self) -> usize {
        self.n_pe
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn with_direction(self, direction: Direction) -> Self {
        Self { direction, ..self }
    }

    /// Number of stages, `log2(n) - 1`.
    pub fn stages(&self) -> usize {
        log2(self.n) as usize - 1
    }

    /// PEs that receive work.
    pub fn active_pes(&self) -> usize {
        self.n_pe.min(self.n / 4).max(1)
    }

    /// Butterflies per PE per stage and words per used bank.
    pub fn s_m(&self) -> usize {
        (self.n / (4 * self.active_pes())).max(1)
    }

    /// Physical bank count `M = 2 * n_PE`.
    pub fn banks(&self) -> usize {
        2 * self.n_pe
    }

    /// Largest conflict-free stage.
    pub fn s_sg(&self) -> usize {
        log2(self.active_pes()) as usize
    }

    /// Butterflies per stage.
    pub fn butterflies_per_stage(&self) -> usize {
        self.n / 4
    }

    /// Physical PE id of active PE `p`.
    pub fn physical_pe(&self, p: usize) -> usize {
        p * (self.n_pe / self.active_pes())
    }
}

/// Reverses the order of bits `k..=l` of `x` (bit 0 is the LSB).
pub fn rev_bits(x: usize, k: u32, l: u32) -> Result<usize> {
    if k > l || l >= usize::BITS {
        return Err(Error::InvalidBitRange { k, l });
    }
    let width = l - k + 1;
    let mask = if width == usize::BITS {
        usize::MAX
    } else {
        ((1usize << width) - 1) << k
    };
    let field = (x & mask) >> k;
    let reversed = field.reverse_bits() >> (usize::BITS - width);
    Ok((x & !mask) | (reversed << k))
}

/// Closed-form operand offsets of a PE butterfly.
///
/// Safe stages address both banks at `bt_PE`; later stages reverse bits
/// `S_sg+1..=sg` of it for the second operand.
pub fn mem_addr(bt_pe: usize, sg: usize, s_sg: usize) -> (usize, usize) {
    let addr0 = bt_pe;
    if sg <= s_sg {
        (addr0, addr0)
    } else {
        let addr1 = rev_bits(addr0, s_sg as u32 + 1, sg as u32).expect("k <= l by construction");
        (addr0, addr1)
    }
}

/// Bank and offset of one memory word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Slot {
    pub bank: usize,
    pub offset: usize,
}

/// Where every packed word currently lives.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Placement {
    slots: Vec<Slot>,
}

impl Placement {
    /// Natural placement for `cfg`: word `w` at `(w / S_M, w % S_M)`.
    pub fn natural(cfg: &ScheduleConfig) -> Self {
        let s_m = cfg.s_m();
        Self {
            slots: (0..cfg.n / 2)
                .map(|w| Slot {
                    bank: w / s_m,
                    offset: w % s_m,
                })
                .collect(),
        }
    }

    /// Placement in force at the start of forward stage `sg`.
    pub fn before_stage(cfg: &ScheduleConfig, sg: usize) -> Self {
        let mut p = Self::natural(cfg);
        for s in 0..sg.min(cfg.stages()) {
            for bt in 0..cfg.butterflies_per_stage() {
                if output_exchange(cfg, s, bt) {
                    let (w0, w1) = butterfly_operands(cfg.n, s, bt);
                    p.slots.swap(w0, w1);
                }
            }
        }
        p
    }

    pub fn slot(&self, word: usize) -> Slot {
        self.slots[word]
    }

    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    /// Word stored at each slot, or `None` for unused slots of `cfg`.
    pub fn words_by_slot(&self, cfg: &ScheduleConfig) -> Vec<Vec<Option<usize>>> {
        let mut grid = alloc::vec![alloc::vec![None; cfg.s_m()]; cfg.banks()];
        for (w, s) in self.slots.iter().enumerate() {
            grid[s.bank][s.offset] = Some(w);
        }
        grid
    }
}

/// Input exchange flag of forward butterfly `bt` at stage `sg`.
pub fn input_exchange(cfg: &ScheduleConfig, sg: usize, bt: usize) -> bool {
    let sg_r = cfg.stages() - sg - 1;
    let gp = bt >> sg_r;
    !(gp.is_multiple_of(2) && sg <= cfg.s_sg())
}

/// Output exchange flag of forward butterfly `bt` at stage `sg`: set in
/// stages `sg >= S_sg` when bit `stages - sg - 2` of `bt` is one.
pub fn output_exchange(cfg: &ScheduleConfig, sg: usize, bt: usize) -> bool {
    let stages = cfg.stages();
    sg >= cfg.s_sg() && sg + 2 <= stages && (bt >> (stages - sg - 2)) & 1 == 1
}

/// Banks holding the operands of forward butterfly `bt` at stage `sg`,
/// slot 0 first.
pub fn mem_select(sg: usize, bt: usize, cfg: &ScheduleConfig) -> Result<(usize, usize)> {
    if cfg.n < 4 || sg >= cfg.stages() || bt >= cfg.butterflies_per_stage() {
        return Err(Error::OutOfRange {
            what: "butterfly",
            index: bt,
            limit: cfg.butterflies_per_stage(),
        });
    }
    let p = Placement::before_stage(cfg, sg);
    let (w0, w1) = butterfly_operands(cfg.n, sg, bt);
    let (a, b) = (p.slot(w0), p.slot(w1));
    Ok(if input_exchange(cfg, sg, bt) {
        (b.bank, a.bank)
    } else {
        (a.bank, b.bank)
    })
}

/// One butterfly of the schedule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ButterflyDispatch {
    /// Read cycle of the batch; the write cycle follows it.
    pub cycle: u64,
    pub sg: usize,
    pub bt: usize,
    pub pe: usize,
    pub bank0: usize,
    pub addr0: usize,
    pub bank1: usize,
    pub addr1: usize,
    pub rom_addr: usize,
    pub input_exchanged: bool,
    pub output_exchanged: bool,
}

impl ButterflyDispatch {
    pub fn slot0(&self) -> Slot {
        Slot {
            bank: self.bank0,
            offset: self.addr0,
        }
    }

    pub fn slot1(&self) -> Slot {
        Slot {
            bank: self.bank1,
            offset: self.addr1,
        }
    }

    /// Slots `u` and `v` are read from.
    pub fn operand_slots(&self) -> (Slot, Slot) {
        if self.input_exchanged {
            (self.slot1(), self.slot0())
        } else {
            (self.slot0(), self.slot1())
        }
    }

    /// Slots `x` and `y` are written to.
    pub fn result_slots(&self) -> (Slot, Slot) {
        let (su, sv) = self.operand_slots();
        if self.output_exchanged {
            (sv, su)
        } else {
            (su, sv)
        }
    }
}

/// A full schedule: dispatches in execution order, `active_pes` per batch.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScheduleTrace {
    pub config: ScheduleConfig,
    pub dispatches: Vec<ButterflyDispatch>,
    /// Placement the data must be in before the first batch.
    pub initial: Placement,
    /// Placement after the last batch.
    pub final_placement: Placement,
}

impl ScheduleTrace {
    /// Dispatches grouped by batch.
    pub fn batches(&self) -> core::slice::ChunksExact<'_, ButterflyDispatch> {
        self.dispatches.chunks_exact(self.config.active_pes())
    }

    pub fn batch_count(&self) -> usize {
        self.dispatches.len() / self.config.active_pes()
    }

    /// Two cycles (read, write) per batch.
    pub fn cycles(&self) -> u64 {
        2 * self.batch_count() as u64
    }
}

/// Builds the schedule for `cfg`.
///
/// The inverse replays the forward steps in reverse stage order on the same
/// physical slots, which returns every word to its natural slot.
pub fn build_schedule(cfg: &ScheduleConfig) -> Result<ScheduleTrace> {
    let layout = RomLayout::new(S_MAX, cfg.n_pe)?;
    let natural = Placement::natural(cfg);
    let mut place = natural.clone();
    let stages = cfg.stages();
    let active = cfg.active_pes();
    let s_m = cfg.s_m();
    let mut fwd = Vec::with_capacity(stages * cfg.butterflies_per_stage());
    let mut cycle = 0u64;
    for sg in 0..stages {
        for bt_pe in 0..s_m {
            for p in 0..active {
                let bt = s_m * p + bt_pe;
                let (w0, w1) = butterfly_operands(cfg.n, sg, bt);
                let (s0, s1) = (place.slot(w0), place.slot(w1));
                let in_ex = input_exchange(cfg, sg, bt);
                let out_ex = output_exchange(cfg, sg, bt);
                let (a, b) = if in_ex { (s1, s0) } else { (s0, s1) };
                let rom = layout.locate(cfg.n, sg, bt)?;
                fwd.push(ButterflyDispatch {
                    cycle,
                    sg,
                    bt,
                    pe: cfg.physical_pe(p),
                    bank0: a.bank,
                    addr0: a.offset,
                    bank1: b.bank,
                    addr1: b.offset,
                    rom_addr: rom.addr,
                    input_exchanged: in_ex,
                    output_exchanged: out_ex,
                });
                if out_ex {
                    place.slots.swap(w0, w1);
                }
            }
            cycle += 2;
        }
    }
    let trace = match cfg.direction {
        Direction::Forward => ScheduleTrace {
            config: *cfg,
            dispatches: fwd,
            initial: natural,
            final_placement: place,
        },
        Direction::Inverse => {
            let mut dispatches = Vec::with_capacity(fwd.len());
            let mut cycle = 0u64;
            for sg in (0..stages).rev() {
                let stage = &fwd[sg * cfg.butterflies_per_stage()..][..cfg.butterflies_per_stage()];
                for batch in stage.chunks_exact(active) {
                    dispatches.extend(batch.iter().map(|d| ButterflyDispatch {
                        cycle,
                        input_exchanged: d.input_exchanged ^ d.output_exchanged,
                        ..*d
                    }));
                    cycle += 2;
                }
            }
            ScheduleTrace {
                config: *cfg,
                dispatches,
                initial: place,
                final_placement: natural,
            }
        }
    };
    Ok(trace)
}

/// Closed-form cycle count `2 * (log2(n) - 1) * S_M`.
pub fn cycle_count(n: usize, n_pe: usize) -> Result<u64> {
    let cfg = ScheduleConfig::new(n, n_pe, Direction::Forward)?;
    Ok(2 * (cfg.stages() * cfg.s_m()) as u64 * u64::from(n >= 4))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn fwd(n: usize, n_pe: usize) -> ScheduleConfig {
        ScheduleConfig::new(n, n_pe, Direction::Forward).unwrap()
    }

    #[test]
    fn rev_bits_cases() {
        assert_eq!(rev_bits(0b0110, 2, 2).unwrap(), 0b0110);
        assert_eq!(rev_bits(0b0110, 2, 3).unwrap(), 0b1010);
        assert_eq!(rev_bits(0b1101_0010, 1, 6).unwrap(), 0b1100_1010);
        assert_eq!(rev_bits(1, 0, 63).unwrap(), 1 << 63);
        assert_eq!(
            rev_bits(3, 2, 1),
            Err(Error::InvalidBitRange { k: 2, l: 1 })
        );
        assert!(rev_bits(3, 0, 64).is_err());
    }

    #[test]
    fn mem_addr_cases() {
        assert_eq!(mem_addr(5, 0, 1), (5, 5));
        assert_eq!(mem_addr(0b0110, 3, 1), (0b0110, 0b1010));
        for sg in 0..9 {
            assert_eq!(mem_addr(0, sg, 1), (0, 0));
        }
    }

    #[test]
    fn config_derived_values() {
        let c = fwd(1024, 2);
        assert_eq!((c.stages(), c.s_m(), c.banks(), c.s_sg()), (9, 128, 4, 1));
        let small = fwd(4, 2);
        assert_eq!((small.active_pes(), small.s_m(), small.s_sg()), (1, 1, 0));
        assert!(ScheduleConfig::new(12, 2, Direction::Forward).is_err());
        assert!(ScheduleConfig::new(2048, 2, Direction::Forward).is_err());
        assert!(matches!(
            ScheduleConfig::new(64, 3, Direction::Forward),
            Err(Error::InvalidPeCount { n_pe: 3, .. })
        ));
    }

    #[test]
    fn mem_select_natural_placement() {
        let c = fwd(32, 2);
        assert_eq!(mem_select(0, 0, &c).unwrap(), (0, 2));
        assert_eq!(mem_select(0, 4, &c).unwrap(), (1, 3));
    }

    #[test]
    fn first_stage_has_no_input_exchange() {
        let t = build_schedule(&fwd(32, 2)).unwrap();
        assert!(t
            .dispatches
            .iter()
            .filter(|d| d.sg == 0)
            .all(|d| !d.input_exchanged));
    }

    #[test]
    fn small_schedule_shapes() {
        let t = build_schedule(&fwd(8, 2)).unwrap();
        assert_eq!(t.dispatches.len(), 4);
        assert_eq!(t.cycles(), 4);

        let t = build_schedule(&fwd(4, 2)).unwrap();
        assert_eq!(t.dispatches.len(), 1);
        assert_eq!(t.dispatches[0].pe, 0);
        assert_eq!(t.cycles(), 2);

        let t = build_schedule(&fwd(2, 2)).unwrap();
        assert!(t.dispatches.is_empty());
        assert_eq!(t.cycles(), 0);
    }

    #[test]
    fn cycle_count_values() {
        let expected = [4, 12, 32, 80, 192, 448, 1024, 2304];
        for (i, &c) in expected.iter().enumerate() {
            assert_eq!(cycle_count(8 << i, 2).unwrap(), c);
        }
        assert_eq!(cycle_count(4, 2).unwrap(), 2);
        assert_eq!(cycle_count(2, 2).unwrap(), 0);
    }

    #[test]
    fn batch_pe_order() {
        let t = build_schedule(&fwd(64, 4)).unwrap();
        let first: Vec<(usize, usize)> = t
            .batches()
            .next()
            .unwrap()
            .iter()
            .map(|d| (d.pe, d.bt))
            .collect();
        assert_eq!(first, vec![(0, 0), (1, 4), (2, 8), (3, 12)]);
    }

    #[test]
    fn inverse_restores_natural_placement() {
        let c = fwd(64, 2);
        let f = build_schedule(&c).unwrap();
        let i = build_schedule(&c.with_direction(Direction::Inverse)).unwrap();
        assert_eq!(i.initial, f.final_placement);
        assert_eq!(i.final_placement, Placement::natural(&c));
        assert_ne!(f.final_placement, Placement::natural(&c));
    }
}
