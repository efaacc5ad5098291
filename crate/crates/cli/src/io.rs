//! Polynomial and spectrum JSON, trace CSV, ROM dumps and memory snapshots.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use ringfft_core::schedule::{ScheduleConfig, ScheduleTrace, Slot};
use ringfft_core::sim::BankedMemory;
use ringfft_core::twiddle::{PairSign, RomSet};
use ringfft_core::{ComplexWord, Polynomial, Spectrum, SpectrumOrder};

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
    #[error("unknown spectrum order {0:?}")]
    UnknownOrder(String),
    #[error(transparent)]
    Model(#[from] ringfft_core::Error),
}

pub type Result<T> = std::result::Result<T, FormatError>;

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| FormatError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|source| FormatError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Parses a JSON array of numbers.
pub fn parse_polynomial(text: &str) -> Result<Polynomial> {
    // null is what serde_json emits for non-finite floats
    let raw: Vec<Option<f64>> = serde_json::from_str(text)?;
    if let Some(index) = raw.iter().position(Option::is_none) {
        return Err(ringfft_core::Error::NonFinite { index }.into());
    }
    Ok(Polynomial::new(raw.into_iter().flatten().collect())?)
}

pub fn read_polynomial(path: &Path) -> Result<Polynomial> {
    parse_polynomial(&read(path)?)
}

pub fn polynomial_to_json(p: &Polynomial) -> String {
    serde_json::to_string(p.coeffs()).expect("finite floats serialize")
}

pub fn order_name(order: SpectrumOrder) -> &'static str {
    match order {
        SpectrumOrder::NaturalEval => "natural_eval",
        SpectrumOrder::FalconInternal => "falcon_internal",
    }
}

pub fn parse_order(name: &str) -> Result<SpectrumOrder> {
    match name {
        "natural_eval" => Ok(SpectrumOrder::NaturalEval),
        "falcon_internal" => Ok(SpectrumOrder::FalconInternal),
        other => Err(FormatError::UnknownOrder(other.to_owned())),
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct SpectrumFile {
    order: String,
    values: Vec<[f64; 2]>,
}

/// `{"order": "...", "values": [[re, im], ...]}`.
pub fn parse_spectrum(text: &str) -> Result<Spectrum> {
    let file: SpectrumFile = serde_json::from_str(text)?;
    let order = parse_order(&file.order)?;
    let values = file
        .values
        .into_iter()
        .map(|[re, im]| ComplexWord::new(re, im))
        .collect();
    Ok(Spectrum::new(values, order)?)
}

pub fn read_spectrum(path: &Path) -> Result<Spectrum> {
    parse_spectrum(&read(path)?)
}

pub fn spectrum_to_json(s: &Spectrum) -> String {
    let file = SpectrumFile {
        order: order_name(s.order()).to_owned(),
        values: s.values().iter().map(|v| [v.re, v.im]).collect(),
    };
    serde_json::to_string(&file).expect("finite floats serialize")
}

/// `re,im` rows with a header.
pub fn spectrum_to_csv(s: &Spectrum) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["re", "im"])?;
    for v in s.values() {
        w.serialize((v.re, v.im))?;
    }
    Ok(String::from_utf8(w.into_inner().expect("in-memory writer")).expect("ASCII CSV"))
}

/// One `coeff` column with a header.
pub fn polynomial_to_csv(p: &Polynomial) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["coeff"])?;
    for c in p.coeffs() {
        w.serialize(c)?;
    }
    Ok(String::from_utf8(w.into_inner().expect("in-memory writer")).expect("ASCII CSV"))
}

pub const TRACE_HEADER: [&str; 11] = [
    "cycle", "pe", "stage", "bt", "bank0", "addr0", "bank1", "addr1", "rom_addr", "in_ex", "out_ex",
];

/// Trace CSV, flags written as 0/1.
pub fn trace_to_csv(trace: &ScheduleTrace) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(TRACE_HEADER)?;
    for d in &trace.dispatches {
        w.serialize((
            d.cycle,
            d.pe,
            d.sg,
            d.bt,
            d.bank0,
            d.addr0,
            d.bank1,
            d.addr1,
            d.rom_addr,
            u8::from(d.input_exchanged),
            u8::from(d.output_exchanged),
        ))?;
    }
    Ok(String::from_utf8(w.into_inner().expect("in-memory writer")).expect("ASCII CSV"))
}

/// Little-endian `(re, im)` binary64 pairs of the stored entries.
pub fn rom_image_bytes(set: &RomSet, pe: usize) -> Vec<u8> {
    set.rom(pe)
        .stored
        .iter()
        .flat_map(|w| w.re.to_le_bytes().into_iter().chain(w.im.to_le_bytes()))
        .collect()
}

/// Pair signs and stage layout of one ROM.
pub fn rom_sidecar(set: &RomSet, pe: usize) -> String {
    let rom = set.rom(pe);
    let mut out = String::new();
    out.push_str(&format!("pe {pe}\n"));
    out.push_str(&format!("stored {}\n", rom.stored.len()));
    out.push_str(&format!("logical {}\n", rom.logical_len()));
    let signs: Vec<&str> = rom
        .signs
        .iter()
        .map(|s| match s {
            PairSign::PlusI => "+i",
            PairSign::MinusI => "-i",
        })
        .collect();
    out.push_str(&format!("pair_signs {}\n", signs.join(" ")));
    for (sg, span) in set.layout().spans(pe).iter().enumerate() {
        out.push_str(&format!(
            "stage {sg} rom_base {} table_start {} len {}\n",
            span.rom_base, span.table_start, span.len
        ));
    }
    out
}

/// Writes `rom_pe<p>.bin` and `rom_pe<p>.txt` for each PE into `dir`.
pub fn write_rom_dump(dir: &Path, set: &RomSet) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|source| FormatError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut written = Vec::new();
    for pe in 0..set.n_pe() {
        let bin = dir.join(format!("rom_pe{pe}.bin"));
        write_file(&bin, &rom_image_bytes(set, pe))?;
        let txt = dir.join(format!("rom_pe{pe}.txt"));
        write_file(&txt, rom_sidecar(set, pe).as_bytes())?;
        written.push(bin);
        written.push(txt);
    }
    Ok(written)
}

/// Decodes a ROM image written by [`rom_image_bytes`].
pub fn decode_rom_image(bytes: &[u8]) -> Vec<ComplexWord> {
    bytes
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[..8].try_into().expect("8 bytes"));
            let im = f64::from_le_bytes(c[8..].try_into().expect("8 bytes"));
            ComplexWord::new(re, im)
        })
        .collect()
}

/// `bank,offset,re,im` rows over the banks and offsets `cfg` uses.
pub fn memory_to_csv(mem: &BankedMemory, cfg: &ScheduleConfig) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["bank", "offset", "re", "im"])?;
    for bank in 0..2 * cfg.active_pes() {
        for offset in 0..cfg.s_m() {
            let v = mem.peek(Slot { bank, offset })?;
            w.serialize((bank, offset, v.re, v.im))?;
        }
    }
    Ok(String::from_utf8(w.into_inner().expect("in-memory writer")).expect("ASCII CSV"))
}

/// Writes `text` to `path`, or to stdout when no path is given.
pub fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => write_file(p, text.as_bytes()),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| {
                    if text.ends_with('\n') {
                        Ok(())
                    } else {
                        out.write_all(b"\n")
                    }
                })
                .map_err(|source| FormatError::Io {
                    path: PathBuf::from("<stdout>"),
                    source,
                })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ringfft_core::ring::fft_inplace;
    use ringfft_core::schedule::build_schedule;
    use ringfft_core::Direction;

    #[test]
    fn polynomial_json_round_trip() {
        let p = parse_polynomial("[1, 2.5, -3, 0]").unwrap();
        assert_eq!(p.coeffs(), &[1.0, 2.5, -3.0, 0.0]);
        assert_eq!(parse_polynomial(&polynomial_to_json(&p)).unwrap(), p);
    }

    #[test]
    fn polynomial_json_errors() {
        assert!(matches!(
            parse_polynomial("[1, 2, 3]"),
            Err(FormatError::Model(_))
        ));
        assert!(matches!(
            parse_polynomial("[1, null]"),
            Err(FormatError::Model(_))
        ));
        assert!(matches!(
            parse_polynomial("{\"a\": 1}"),
            Err(FormatError::Json(_))
        ));
    }

    #[test]
    fn spectrum_json_round_trip() {
        let s = fft_inplace(&Polynomial::new(vec![1.0, 2.0, 3.0, 4.0]).unwrap());
        let text = spectrum_to_json(&s);
        assert!(text.starts_with("{\"order\":\"falcon_internal\""));
        assert_eq!(parse_spectrum(&text).unwrap(), s);
        assert!(matches!(
            parse_spectrum("{\"order\":\"sorted\",\"values\":[[1,0]]}"),
            Err(FormatError::UnknownOrder(_))
        ));
    }

    #[test]
    fn trace_csv_shape() {
        let cfg = ScheduleConfig::new(8, 2, Direction::Forward).unwrap();
        let csv = trace_to_csv(&build_schedule(&cfg).unwrap()).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], TRACE_HEADER.join(","));
        assert_eq!(lines.len(), 5);
    }

    #[test]
    fn rom_bytes_decode() {
        let set = RomSet::build(2).unwrap();
        let bytes = rom_image_bytes(&set, 1);
        assert_eq!(bytes.len(), 16 * set.rom(1).stored.len());
        assert_eq!(decode_rom_image(&bytes), set.rom(1).stored);
        let side = rom_sidecar(&set, 1);
        assert!(side.contains("stored 129"));
        assert!(side.lines().any(|l| l.starts_with("stage 8 ")));
    }
}
