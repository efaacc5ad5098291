//! Bundled comparison data: published figures of the modeled processor and
//! four floating-point FFT accelerators, plus the cycle table of the modeled
//! processor next to a Cortex-A72 software baseline (display only).

use serde::{Deserialize, Serialize};

use ringfft_core::metrics::ImplRecord;

const DESIGNS: &str = include_str!("../data/designs.csv");
const CYCLES: &str = include_str!("../data/cycles.csv");

/// One implementation with its published normalised figures kept as printed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub name: String,
    pub citation: String,
    pub channel_nm: f64,
    pub supply_v: f64,
    pub fft_size: usize,
    pub word_bits: f64,
    pub area_mm2: f64,
    pub clock_mhz: f64,
    /// Upper end of the published range where a range was given.
    pub power_mw: f64,
    pub power_range_mw: String,
    pub exec_time_us: f64,
    pub published_area: String,
    pub published_power: String,
    pub published_energy: String,
}

impl ComparisonRow {
    pub fn record(&self) -> ImplRecord {
        ImplRecord {
            area_mm2: self.area_mm2,
            power_mw: self.power_mw,
            exec_time_us: self.exec_time_us,
            fft_size: self.fft_size,
            channel_nm: self.channel_nm,
            supply_v: self.supply_v,
            word_bits: self.word_bits,
            clock_mhz: self.clock_mhz,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleRow {
    pub n: usize,
    pub cycles: u64,
    pub exec_time_ns: f64,
    pub a72_cycles: u64,
    pub a72_exec_time_ns: f64,
}

fn parse<T: for<'de> Deserialize<'de>>(text: &str) -> Vec<T> {
    csv::Reader::from_reader(text.as_bytes())
        .deserialize()
        .collect::<Result<_, _>>()
        .expect("bundled dataset is well formed")
}

pub fn comparison_rows() -> Vec<ComparisonRow> {
    parse(DESIGNS)
}

pub fn cycle_rows() -> Vec<CycleRow> {
    parse(CYCLES)
}

/// A number as printed, with its last-digit unit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Printed {
    pub value: f64,
    pub unit: f64,
    pub decimals: usize,
}

/// Parses `"114.1"` as 114.1 with unit 0.1; thousands separators allowed.
pub fn printed(text: &str) -> Printed {
    let clean: String = text.chars().filter(|c| *c != ',').collect();
    let decimals = clean.split_once('.').map_or(0, |(_, f)| f.len());
    Printed {
        value: clean.parse().expect("bundled number"),
        unit: 10f64.powi(-(decimals as i32)),
        decimals,
    }
}

impl Printed {
    /// `|x - value| <= unit`.
    pub fn within_one_unit(&self, x: f64) -> bool {
        (x - self.value).abs() <= self.unit * (1.0 + 1e-9)
    }
}
