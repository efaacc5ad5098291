//! Execution time and technology-normalised comparison metrics.
//!
//! Area and power are scaled to the reference node (22 nm, 0.72 V, 64-bit
//! words) and divided by the FFT size, so designs built in different
//! technologies and for different sizes become comparable.

use crate::{Error, Result};

/// Reference channel length in nm.
pub const REF_CHANNEL_NM: f64 = 22.0;
/// Reference supply voltage in V.
pub const REF_SUPPLY_V: f64 = 0.72;
/// Reference word length in bits.
pub const REF_WORD_BITS: f64 = 64.0;
/// Target clock period of the processor in ns.
pub const CLOCK_PERIOD_NS: f64 = 6.0;

/// Published figures of one FFT implementation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImplRecord {
    pub area_mm2: f64,
    pub power_mw: f64,
    pub exec_time_us: f64,
    pub fft_size: usize,
    pub channel_nm: f64,
    pub supply_v: f64,
    pub word_bits: f64,
    pub clock_mhz: f64,
}

impl ImplRecord {
    /// Checks that every field is positive and finite and the size is a
    /// power of two.
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("area_mm2", self.area_mm2),
            ("power_mw", self.power_mw),
            ("exec_time_us", self.exec_time_us),
            ("channel_nm", self.channel_nm),
            ("supply_v", self.supply_v),
            ("word_bits", self.word_bits),
            ("clock_mhz", self.clock_mhz),
        ];
        if let Some((field, _)) = fields.iter().find(|(_, v)| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::InvalidRecord { field });
        }
        if !self.fft_size.is_power_of_two() {
            return Err(Error::InvalidRecord { field: "fft_size" });
        }
        Ok(())
    }
}

/// `A * 1000 / (n * (L/22)^2 * (W/64))`.
pub fn normalized_area(r: &ImplRecord) -> Result<f64> {
    r.validate()?;
    let l = r.channel_nm / REF_CHANNEL_NM;
    Ok(r.area_mm2 * 1000.0 / (r.fft_size as f64 * l * l * (r.word_bits / REF_WORD_BITS)))
}

/// `P * 1000 / (n * (V/0.72)^2 * (W/64))`.
pub fn normalized_power(r: &ImplRecord) -> Result<f64> {
    r.validate()?;
    let v = r.supply_v / REF_SUPPLY_V;
    Ok(r.power_mw * 1000.0 / (r.fft_size as f64 * v * v * (r.word_bits / REF_WORD_BITS)))
}

/// `P_hat * t_E`.
pub fn normalized_energy(p_hat: f64, t_e_us: f64) -> f64 {
    p_hat * t_e_us
}

/// `cycles * 1000 / f` with `f` in MHz.
pub fn exec_time_ns(cycles: u64, clock_mhz: f64) -> Result<f64> {
    if !(clock_mhz.is_finite() && clock_mhz > 0.0) {
        return Err(Error::InvalidRecord { field: "clock_mhz" });
    }
    Ok(cycles as f64 * 1000.0 / clock_mhz)
}

/// `cycles * period`.
pub fn exec_time_ns_at_period(cycles: u64, period_ns: f64) -> f64 {
    cycles as f64 * period_ns
}

/// The three normalised figures of a record.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Normalized {
    pub area: f64,
    pub power: f64,
    pub energy: f64,
}

pub fn normalize(r: &ImplRecord) -> Result<Normalized> {
    let power = normalized_power(r)?;
    Ok(Normalized {
        area: normalized_area(r)?,
        power,
        energy: normalized_energy(power, r.exec_time_us),
    })
}
