mod common;

use common::{random_poly, rng};
use ringfft_core::ring::{fft_inplace, ifft_inplace};
use ringfft_core::schedule::{build_schedule, cycle_count, ScheduleConfig};
use ringfft_core::sim::{execute, load_natural, BankedMemory, Processor};
use ringfft_core::twiddle::RomSet;
use ringfft_core::{Direction, Error};

#[test]
fn simulator_agrees_with_network_for_all_configs() {
    let mut r = rng(3);
    for n_pe in [1, 2, 4] {
        let mut proc = Processor::new(n_pe).unwrap();
        for l in 1..=10 {
            let n = 1usize << l;
            let a = random_poly(&mut r, n, 100.0);
            let (s, fr) = proc.forward(&a).unwrap();
            assert_eq!(s, fft_inplace(&a), "n={n} n_pe={n_pe}");
            assert_eq!(fr.cycles, cycle_count(n, n_pe).unwrap());
            let (b, ir) = proc.inverse(&s).unwrap();
            assert_eq!(b, ifft_inplace(&s).unwrap());
            assert_eq!(ir.cycles, fr.cycles);
            assert!(b.max_abs_diff(&a).unwrap() <= 1e-9 * a.max_abs().max(1.0));
        }
    }
}

#[test]
fn all_pes_busy_in_every_batch() {
    for n_pe in [1, 2, 4] {
        for l in 3..=10 {
            let n = 1usize << l;
            if n < 8 * n_pe {
                continue;
            }
            let cfg = ScheduleConfig::new(n, n_pe, Direction::Forward).unwrap();
            let t = build_schedule(&cfg).unwrap();
            assert!(t.batches().all(|b| b.len() == n_pe));
            let mut mem = BankedMemory::new(n_pe).unwrap();
            load_natural(&random_poly(&mut rng(1), n, 1.0), &mut mem).unwrap();
            let rep = execute(&t, &mut mem, &RomSet::build(n_pe).unwrap()).unwrap();
            assert!(rep.busy.iter().all(|&b| b == rep.batches));
            assert_eq!(rep.bank_accesses, 4 * rep.butterflies as u64);
        }
    }
}

#[test]
fn corrupted_schedule_reports_conflict() {
    let cfg = ScheduleConfig::new(32, 2, Direction::Forward).unwrap();
    let mut t = build_schedule(&cfg).unwrap();
    t.dispatches[1].bank0 = t.dispatches[0].bank0;
    let mut mem = BankedMemory::new(2).unwrap();
    load_natural(&random_poly(&mut rng(2), 32, 1.0), &mut mem).unwrap();
    match execute(&t, &mut mem, &RomSet::build(2).unwrap()) {
        Err(Error::BankConflict(rep)) => {
            assert_eq!(rep.cycle, 0);
            assert_eq!(rep.pes, vec![0, 1]);
        }
        other => panic!("expected a conflict, got {other:?}"),
    }
}

#[test]
fn rom_address_overflow_is_reported() {
    let cfg = ScheduleConfig::new(32, 2, Direction::Forward).unwrap();
    let mut t = build_schedule(&cfg).unwrap();
    t.dispatches[0].rom_addr = 10_000;
    let mut mem = BankedMemory::new(2).unwrap();
    load_natural(&random_poly(&mut rng(2), 32, 1.0), &mut mem).unwrap();
    assert!(matches!(
        execute(&t, &mut mem, &RomSet::build(2).unwrap()),
        Err(Error::RomAddress { addr: 10_000, .. })
    ));
}

#[test]
fn mismatched_pe_counts_are_rejected() {
    let cfg = ScheduleConfig::new(32, 2, Direction::Forward).unwrap();
    let t = build_schedule(&cfg).unwrap();
    let mut mem = BankedMemory::new(2).unwrap();
    assert!(matches!(
        execute(&t, &mut mem, &RomSet::build(4).unwrap()),
        Err(Error::Configuration(_))
    ));
}
