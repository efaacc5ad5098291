//! Cycle-accurate behavioral model: PEs, single-port banks and ROMs.
//!
//! Each batch of a [`ScheduleTrace`] takes two cycles. In the read cycle
//! every active PE fetches `u`, `v` and its twiddle; in the write cycle it
//! stores `x` and `y`. A bank serves one access per cycle, and the memory
//! checks that on every access.

use alloc::vec;
use alloc::vec::Vec;

use crate::ring::pack;
use crate::schedule::{build_schedule, ScheduleConfig, ScheduleTrace, Slot};
use crate::twiddle::RomSet;
use crate::{
    ComplexWord, ConflictReport, Direction, Error, Polynomial, Result, Spectrum, SpectrumOrder,
    S_MAX,
};

/// The reconfigurable butterfly.
///
/// Forward is Cooley-Tukey, `(u + w*v, u - w*v)`; inverse is
/// Gentleman-Sande, `(u + v, (u - v)*w)`. The caller supplies the twiddle
/// already conjugated for the inverse.
#[inline]
pub fn pe_butterfly(
    u: ComplexWord,
    v: ComplexWord,
    w: ComplexWord,
    mode: Direction,
) -> (ComplexWord, ComplexWord) {
    match mode {
        Direction::Forward => {
            let t = w * v;
            (u + t, u - t)
        }
        Direction::Inverse => (u + v, (u - v) * w),
    }
}

/// `M` single-port banks with a per-cycle port ledger.
#[derive(Debug, Clone, PartialEq)]
pub struct BankedMemory {
    banks: Vec<Vec<ComplexWord>>,
    n_pe: usize,
    cycle: u64,
    owner: Vec<Option<usize>>,
    accesses: u64,
}

impl BankedMemory {
    /// `2 * n_pe` banks of `S_MAX / (4 * n_pe)` words each.
    pub fn new(n_pe: usize) -> Result<Self> {
        if !n_pe.is_power_of_two() || n_pe > S_MAX / 4 {
            return Err(Error::InvalidPeCount {
                n_pe,
                max: S_MAX / 4,
            });
        }
        Ok(Self::with_capacity(n_pe, S_MAX / (4 * n_pe)))
    }

    pub fn with_capacity(n_pe: usize, capacity: usize) -> Self {
        let m = 2 * n_pe;
        Self {
            banks: vec![vec![ComplexWord::ZERO; capacity]; m],
            n_pe,
            cycle: 0,
            owner: vec![None; m],
            accesses: 0,
        }
    }

    pub fn bank_count(&self) -> usize {
        self.banks.len()
    }

    pub fn capacity(&self) -> usize {
        self.banks.first().map_or(0, Vec::len)
    }

    pub fn n_pe(&self) -> usize {
        self.n_pe
    }

    /// Current ledger cycle.
    pub fn cycle(&self) -> u64 {
        self.cycle
    }

    /// Total ledger-checked accesses so far.
    pub fn accesses(&self) -> u64 {
        self.accesses
    }

    /// Opens a new cycle; every bank port becomes free.
    pub fn begin_cycle(&mut self, cycle: u64) {
        self.cycle = cycle;
        self.owner.iter_mut().for_each(|o| *o = None);
    }

    fn check(&self, slot: Slot) -> Result<()> {
        if slot.bank >= self.banks.len() {
            return Err(Error::OutOfRange {
                what: "bank",
                index: slot.bank,
                limit: self.banks.len(),
            });
        }
        if slot.offset >= self.capacity() {
            return Err(Error::OutOfRange {
                what: "bank offset",
                index: slot.offset,
                limit: self.capacity(),
            });
        }
        Ok(())
    }

    fn claim(&mut self, bank: usize, pe: usize) -> Result<()> {
        if let Some(first) = self.owner[bank] {
            return Err(Error::BankConflict(ConflictReport {
                cycle: self.cycle,
                bank,
                pes: vec![first, pe],
            }));
        }
        self.owner[bank] = Some(pe);
        self.accesses += 1;
        Ok(())
    }

    /// Ledger-checked read by `pe`.
    pub fn read(&mut self, slot: Slot, pe: usize) -> Result<ComplexWord> {
        self.check(slot)?;
        self.claim(slot.bank, pe)?;
        Ok(self.banks[slot.bank][slot.offset])
    }

    /// Ledger-checked write by `pe`.
    pub fn write(&mut self, slot: Slot, value: ComplexWord, pe: usize) -> Result<()> {
        self.check(slot)?;
        self.claim(slot.bank, pe)?;
        self.banks[slot.bank][slot.offset] = value;
        Ok(())
    }

    /// Reads without using a port (loading and inspection).
    pub fn peek(&self, slot: Slot) -> Result<ComplexWord> {
        self.check(slot)?;
        Ok(self.banks[slot.bank][slot.offset])
    }

    /// Writes without using a port (loading).
    pub fn poke(&mut self, slot: Slot, value: ComplexWord) -> Result<()> {
        self.check(slot)?;
        self.banks[slot.bank][slot.offset] = value;
        Ok(())
    }

    pub fn bank(&self, bank: usize) -> &[ComplexWord] {
        &self.banks[bank]
    }

    pub fn clear(&mut self) {
        for b in &mut self.banks {
            b.iter_mut().for_each(|w| *w = ComplexWord::ZERO);
        }
        self.begin_cycle(0);
        self.accesses = 0;
    }
}

/// Latches and mode of one processing element.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeState {
    pub id: usize,
    pub busy: bool,
    pub u: ComplexWord,
    pub v: ComplexWord,
    pub w: ComplexWord,
    pub mode: Direction,
}

impl PeState {
    pub fn new(id: usize, mode: Direction) -> Self {
        Self {
            id,
            busy: false,
            u: ComplexWord::ZERO,
            v: ComplexWord::ZERO,
            w: ComplexWord::ZERO,
            mode,
        }
    }

    pub fn fire(&self) -> (ComplexWord, ComplexWord) {
        pe_butterfly(self.u, self.v, self.w, self.mode)
    }
}

fn check_fits(mem: &BankedMemory, cfg: &ScheduleConfig) -> Result<()> {
    if mem.n_pe != cfg.n_pe() {
        return Err(Error::Configuration("memory and schedule disagree on n_PE"));
    }
    if cfg.s_m() > mem.capacity() {
        return Err(Error::Capacity {
            words: cfg.n() / 2,
            banks: mem.bank_count(),
            capacity: mem.capacity(),
        });
    }
    Ok(())
}

/// Packs `a` and stores word `k` at bank `k / S_M`, offset `k % S_M`.
pub fn load_natural(a: &Polynomial, mem: &mut BankedMemory) -> Result<()> {
    let cfg = ScheduleConfig::new(a.len(), mem.n_pe, Direction::Forward)?;
    check_fits(mem, &cfg)?;
    mem.clear();
    let s_m = cfg.s_m();
    for (k, w) in pack(a).into_iter().enumerate() {
        mem.poke(
            Slot {
                bank: k / s_m,
                offset: k % s_m,
            },
            w,
        )?;
    }
    Ok(())
}

/// Stores a `FalconInternal` spectrum where `trace` expects it.
pub fn load_spectrum(s: &Spectrum, trace: &ScheduleTrace, mem: &mut BankedMemory) -> Result<()> {
    if s.order() != SpectrumOrder::FalconInternal {
        return Err(Error::OrderMismatch {
            expected: SpectrumOrder::FalconInternal,
            found: s.order(),
        });
    }
    if s.n() != trace.config.n() {
        return Err(Error::LengthMismatch {
            left: s.n(),
            right: trace.config.n(),
        });
    }
    check_fits(mem, &trace.config)?;
    mem.clear();
    for (w, v) in s.values().iter().enumerate() {
        mem.poke(trace.initial.slot(w), *v)?;
    }
    Ok(())
}

/// Outcome counters of one [`execute`] run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExecutionReport {
    pub cycles: u64,
    pub butterflies: usize,
    pub batches: usize,
    /// Butterflies executed by each physical PE.
    pub busy: Vec<usize>,
    pub bank_accesses: u64,
}

/// Runs `trace` on `mem` with twiddles from `roms`.
pub fn execute(
    trace: &ScheduleTrace,
    mem: &mut BankedMemory,
    roms: &RomSet,
) -> Result<ExecutionReport> {
    execute_observed(trace, mem, roms, |_, _| {})
}

/// [`execute`], calling `observer(stage, mem)` after each completed stage.
pub fn execute_observed<F>(
    trace: &ScheduleTrace,
    mem: &mut BankedMemory,
    roms: &RomSet,
    mut observer: F,
) -> Result<ExecutionReport>
where
    F: FnMut(usize, &BankedMemory),
{
    let cfg = &trace.config;
    check_fits(mem, cfg)?;
    if roms.n_pe() != cfg.n_pe() {
        return Err(Error::Configuration(
            "ROM set and schedule disagree on n_PE",
        ));
    }
    let dir = cfg.direction();
    let mut pes: Vec<PeState> = (0..cfg.n_pe()).map(|id| PeState::new(id, dir)).collect();
    let mut report = ExecutionReport {
        cycles: 0,
        butterflies: 0,
        batches: 0,
        busy: vec![0; cfg.n_pe()],
        bank_accesses: 0,
    };
    let start_accesses = mem.accesses();
    let mut cycle = 0u64;
    let per_stage = cfg.butterflies_per_stage();
    for batch in trace.batches() {
        mem.begin_cycle(cycle);
        for d in batch {
            let pe = &mut pes[d.pe];
            let (su, sv) = d.operand_slots();
            pe.u = mem.read(su, d.pe)?;
            pe.v = mem.read(sv, d.pe)?;
            pe.w = roms.rom(d.pe).fetch(d.rom_addr, dir)?;
            pe.busy = true;
        }
        mem.begin_cycle(cycle + 1);
        for d in batch {
            let pe = &mut pes[d.pe];
            let (x, y) = pe.fire();
            let (sx, sy) = d.result_slots();
            mem.write(sx, x, d.pe)?;
            mem.write(sy, y, d.pe)?;
            pe.busy = false;
            report.busy[d.pe] += 1;
        }
        cycle += 2;
        report.batches += 1;
        report.butterflies += batch.len();
        if report.butterflies.is_multiple_of(per_stage) {
            let done = report.butterflies / per_stage - 1;
            let stage = match dir {
                Direction::Forward => done,
                Direction::Inverse => cfg.stages() - 1 - done,
            };
            observer(stage, mem);
        }
    }
    report.cycles = cycle;
    report.bank_accesses = mem.accesses() - start_accesses;
    Ok(report)
}

/// What a finished run leaves in memory.
#[derive(Debug, Clone, PartialEq)]
pub enum TransformOutput {
    Spectrum(Spectrum),
    Polynomial(Polynomial),
}

/// Reads the result of `trace`: forward runs give a `FalconInternal`
/// spectrum, inverse runs the scaled and unpacked polynomial.
pub fn read_result(mem: &BankedMemory, trace: &ScheduleTrace) -> Result<TransformOutput> {
    let cfg = &trace.config;
    let words = (0..cfg.n() / 2)
        .map(|w| mem.peek(trace.final_placement.slot(w)))
        .collect::<Result<Vec<_>>>()?;
    match cfg.direction() {
        Direction::Forward => Ok(TransformOutput::Spectrum(Spectrum::new(
            words,
            SpectrumOrder::FalconInternal,
        )?)),
        Direction::Inverse => {
            let scale = 2.0 / cfg.n() as f64;
            let scaled: Vec<ComplexWord> = words.iter().map(|w| w.scale(scale)).collect();
            Ok(TransformOutput::Polynomial(Polynomial::new(
                crate::ring::unpack(&scaled),
            )?))
        }
    }
}

/// A processor instance: PE count, its ROMs and its memory.
#[derive(Debug, Clone)]
pub struct Processor {
    roms: RomSet,
    mem: BankedMemory,
}

impl Processor {
    pub fn new(n_pe: usize) -> Result<Self> {
        Ok(Self {
            roms: RomSet::build(n_pe)?,
            mem: BankedMemory::new(n_pe)?,
        })
    }

    pub fn n_pe(&self) -> usize {
        self.roms.n_pe()
    }

    pub fn roms(&self) -> &RomSet {
        &self.roms
    }

    pub fn memory(&self) -> &BankedMemory {
        &self.mem
    }

    pub fn forward(&mut self, a: &Polynomial) -> Result<(Spectrum, ExecutionReport)> {
        let cfg = ScheduleConfig::new(a.len(), self.n_pe(), Direction::Forward)?;
        let trace = build_schedule(&cfg)?;
        load_natural(a, &mut self.mem)?;
        let report = execute(&trace, &mut self.mem, &self.roms)?;
        match read_result(&self.mem, &trace)? {
            TransformOutput::Spectrum(s) => Ok((s, report)),
            TransformOutput::Polynomial(_) => unreachable!("forward run yields a spectrum"),
        }
    }

    pub fn inverse(&mut self, s: &Spectrum) -> Result<(Polynomial, ExecutionReport)> {
        let cfg = ScheduleConfig::new(s.n(), self.n_pe(), Direction::Inverse)?;
        let trace = build_schedule(&cfg)?;
        load_spectrum(s, &trace, &mut self.mem)?;
        let report = execute(&trace, &mut self.mem, &self.roms)?;
        match read_result(&self.mem, &trace)? {
            TransformOutput::Polynomial(p) => Ok((p, report)),
            TransformOutput::Spectrum(_) => unreachable!("inverse run yields a polynomial"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{fft_inplace, fft_inplace_with};

    fn c(re: f64, im: f64) -> ComplexWord {
        ComplexWord::new(re, im)
    }

    #[test]
    fn butterfly_examples() {
        let one = ComplexWord::ONE;
        assert_eq!(
            pe_butterfly(one, one, ComplexWord::I, Direction::Forward),
            (c(1.0, 1.0), c(1.0, -1.0))
        );
        assert_eq!(
            pe_butterfly(
                c(1.0, 1.0),
                c(1.0, -1.0),
                -ComplexWord::I,
                Direction::Inverse
            ),
            (c(2.0, 0.0), c(2.0, 0.0))
        );
        let (u, v) = (c(0.5, -2.0), c(3.0, 0.25));
        assert_eq!(pe_butterfly(u, v, one, Direction::Forward), (u + v, u - v));
    }

    #[test]
    fn load_natural_layouts() {
        let a = Polynomial::new((0..8).map(f64::from).collect()).unwrap();
        let mut mem = BankedMemory::new(2).unwrap();
        load_natural(&a, &mut mem).unwrap();
        for b in 0..4 {
            assert_eq!(mem.bank(b)[0], c(b as f64, b as f64 + 4.0));
        }

        let a = Polynomial::new((0..16).map(f64::from).collect()).unwrap();
        load_natural(&a, &mut mem).unwrap();
        assert_eq!(&mem.bank(0)[..2], &[c(0.0, 8.0), c(1.0, 9.0)]);

        load_natural(&Polynomial::zero(64).unwrap(), &mut mem).unwrap();
        assert!((0..4).all(|b| mem.bank(b).iter().all(|w| w.is_zero())));
    }

    #[test]
    fn load_rejects_small_memory() {
        let mut mem = BankedMemory::with_capacity(2, 4);
        let a = Polynomial::zero(64).unwrap();
        assert!(matches!(
            load_natural(&a, &mut mem),
            Err(Error::Capacity { .. })
        ));
    }

    #[test]
    fn port_ledger_rejects_second_access() {
        let mut mem = BankedMemory::new(2).unwrap();
        mem.begin_cycle(7);
        let s = Slot { bank: 1, offset: 0 };
        mem.read(s, 0).unwrap();
        let err = mem
            .write(Slot { bank: 1, offset: 3 }, ComplexWord::ONE, 1)
            .unwrap_err();
        assert_eq!(
            err,
            Error::BankConflict(ConflictReport {
                cycle: 7,
                bank: 1,
                pes: vec![0, 1]
            })
        );
        mem.begin_cycle(8);
        assert!(mem.read(s, 1).is_ok());
    }

    #[test]
    fn forward_matches_inplace_bit_exact() {
        let a = Polynomial::new((0..32).map(|k| f64::from(k) * 0.37 - 4.0).collect()).unwrap();
        let mut proc = Processor::new(2).unwrap();
        let (s, report) = proc.forward(&a).unwrap();
        assert_eq!(report.cycles, 32);
        assert_eq!(report.busy, vec![16, 16]);
        let roms = RomSet::build(2).unwrap();
        let reference = fft_inplace_with(&a, &roms).unwrap();
        assert!(s
            .values()
            .iter()
            .zip(reference.values())
            .all(|(x, y)| x.bit_eq(*y)));
        assert_eq!(s, fft_inplace(&a));
    }

    #[test]
    fn constant_and_round_trip() {
        let mut coeffs = vec![0.0; 16];
        coeffs[0] = 2.0;
        let a = Polynomial::new(coeffs).unwrap();
        let mut proc = Processor::new(2).unwrap();
        let (s, _) = proc.forward(&a).unwrap();
        assert!(s.values().iter().all(|v| *v == c(2.0, 0.0)));
        let (back, report) = proc.inverse(&s).unwrap();
        assert_eq!(report.cycles, 12);
        assert!(back.max_abs_diff(&a).unwrap() < 1e-12);
    }

    #[test]
    fn observer_sees_every_stage() {
        let a = Polynomial::zero(64).unwrap();
        let cfg = ScheduleConfig::new(64, 2, Direction::Inverse).unwrap();
        let trace = build_schedule(&cfg).unwrap();
        let mut mem = BankedMemory::new(2).unwrap();
        let roms = RomSet::build(2).unwrap();
        load_spectrum(&fft_inplace(&a), &trace, &mut mem).unwrap();
        let mut seen = Vec::new();
        execute_observed(&trace, &mut mem, &roms, |sg, _| seen.push(sg)).unwrap();
        assert_eq!(seen, vec![4, 3, 2, 1, 0]);
    }
}
