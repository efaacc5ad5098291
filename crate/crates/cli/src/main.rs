use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use ringfft::dataset::{comparison_rows, cycle_rows};
use ringfft::io::{self, emit};
use ringfft::rng::{random_polynomial, seeded, DEFAULT_SEED};
use ringfft::table::Table;
use ringfft::verify::{run_all, SuiteConfig};
use ringfft_core::metrics::{exec_time_ns_at_period, normalize, CLOCK_PERIOD_NS};
use ringfft_core::ring::{
    fft_inplace, fft_ref, ifft_inplace, ifft_ref, polymul_negacyclic_oracle, polymul_via_fft,
};
use ringfft_core::schedule::{build_schedule, cycle_count, ScheduleConfig};
use ringfft_core::sim::{execute_observed, load_natural, load_spectrum, BankedMemory, Processor};
use ringfft_core::twiddle::RomSet;
use ringfft_core::{Direction, Polynomial, Spectrum, S_MAX};

#[derive(Parser, Debug)]
#[command(
    name = "ringfft",
    version,
    about = "FFT/IFFT processor model over Q[x]/(x^n + 1)"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Forward transform of a polynomial (JSON array of numbers).
    Fft(TransformArgs),
    /// Inverse transform of a spectrum (JSON object with order and values).
    Ifft(TransformArgs),
    /// Negacyclic product of two polynomials.
    Polymul(PolymulArgs),
    /// Dispatch trace of the conflict-free schedule as CSV.
    Schedule(ScheduleArgs),
    /// Writes the compressed per-PE twiddle ROMs.
    Rom(RomArgs),
    /// Cycle counts and execution times for n = 8..1024.
    Cycles(CyclesArgs),
    /// Normalised area, power and energy of the bundled designs.
    Metrics(FormatArgs),
    /// Runs the acceptance suite; exits nonzero on any failure.
    Verify(VerifyArgs),
    /// Memory snapshots at stage boundaries as `bank,offset,re,im` CSV files.
    Memdump(MemdumpArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Engine {
    Reference,
    Inplace,
    Simulator,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Json,
    Csv,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Dir {
    Forward,
    Inverse,
}

impl From<Dir> for Direction {
    fn from(d: Dir) -> Self {
        match d {
            Dir::Forward => Direction::Forward,
            Dir::Inverse => Direction::Inverse,
        }
    }
}

#[derive(Args, Debug)]
struct TransformArgs {
    /// Input file; without it a random polynomial of size --n is used (fft only).
    input: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 2)]
    npe: usize,
    #[arg(long, value_enum, default_value_t = Engine::Inplace)]
    engine: Engine,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct PolymulArgs {
    a: Option<PathBuf>,
    b: Option<PathBuf>,
    /// Size of the random operands used when no files are given.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Also run the schoolbook product and report the deviation.
    #[arg(long)]
    check: bool,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ScheduleArgs {
    #[arg(long, default_value_t = S_MAX)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    npe: usize,
    #[arg(long, value_enum, default_value_t = Dir::Forward)]
    direction: Dir,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct RomArgs {
    #[arg(long, default_value_t = 2)]
    npe: usize,
    /// Directory receiving rom_pe<p>.bin and rom_pe<p>.txt.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CyclesArgs {
    #[arg(long, default_value_t = 2)]
    npe: usize,
    #[command(flatten)]
    format: FormatArgs,
}

#[derive(Args, Debug)]
struct FormatArgs {
    /// Table format; plain text when omitted.
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Reduced trial counts.
    #[arg(long)]
    quick: bool,
}

#[derive(Args, Debug)]
struct MemdumpArgs {
    /// Polynomial file; random of size --n when omitted.
    input: Option<PathBuf>,
    #[arg(long, default_value_t = 32)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    npe: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Dir::Forward)]
    direction: Dir,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cmd: Command) -> Result<ExitCode> {
    match cmd {
        Command::Fft(a) => cmd_fft(&a),
        Command::Ifft(a) => cmd_ifft(&a),
        Command::Polymul(a) => cmd_polymul(&a),
        Command::Schedule(a) => cmd_schedule(&a),
        Command::Rom(a) => cmd_rom(&a),
        Command::Cycles(a) => cmd_cycles(&a),
        Command::Metrics(a) => cmd_metrics(&a),
        Command::Verify(a) => cmd_verify(&a),
        Command::Memdump(a) => cmd_memdump(&a),
    }
}

fn load_or_random(input: Option<&Path>, n: Option<usize>, seed: u64) -> Result<Polynomial> {
    match (input, n) {
        (Some(path), n) => {
            let p =
                io::read_polynomial(path).with_context(|| format!("reading {}", path.display()))?;
            if let Some(n) = n {
                if n != p.len() {
                    bail!(
                        "--n {n} disagrees with the {} coefficients in {}",
                        p.len(),
                        path.display()
                    );
                }
            }
            Ok(p)
        }
        (None, Some(n)) => Ok(random_polynomial(&mut seeded(seed), n, 1.0)?),
        (None, None) => bail!("give an input file or --n"),
    }
}

/// Report lines go to stdout when the data goes to a file, else to stderr.
fn report(out: Option<&Path>, line: &str) {
    if out.is_some() {
        println!("{line}");
    } else {
        eprintln!("{line}");
    }
}

fn cmd_fft(a: &TransformArgs) -> Result<ExitCode> {
    let p = load_or_random(a.input.as_deref(), a.n, a.seed)?;
    let s = match a.engine {
        Engine::Reference => fft_ref(&p),
        Engine::Inplace => fft_inplace(&p),
        Engine::Simulator => {
            let mut proc = Processor::new(a.npe)?;
            let (s, rep) = proc.forward(&p)?;
            report(a.out.as_deref(), &format!("cycles={}", rep.cycles));
            s
        }
    };
    let text = match a.format {
        Format::Json => io::spectrum_to_json(&s),
        Format::Csv => io::spectrum_to_csv(&s)?,
    };
    emit(a.out.as_deref(), &text)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_ifft(a: &TransformArgs) -> Result<ExitCode> {
    let Some(path) = a.input.as_deref() else {
        bail!("ifft needs a spectrum file");
    };
    let s = io::read_spectrum(path).with_context(|| format!("reading {}", path.display()))?;
    if let Some(n) = a.n {
        if n != s.n() {
            bail!("--n {n} disagrees with the spectrum size {}", s.n());
        }
    }
    let p = match a.engine {
        Engine::Reference => ifft_ref(&s.to_natural())?,
        Engine::Inplace => ifft_inplace(&Spectrum::from_natural(&s))?,
        Engine::Simulator => {
            let mut proc = Processor::new(a.npe)?;
            let (p, rep) = proc.inverse(&Spectrum::from_natural(&s))?;
            report(a.out.as_deref(), &format!("cycles={}", rep.cycles));
            p
        }
    };
    let text = match a.format {
        Format::Json => io::polynomial_to_json(&p),
        Format::Csv => io::polynomial_to_csv(&p)?,
    };
    emit(a.out.as_deref(), &text)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_polymul(a: &PolymulArgs) -> Result<ExitCode> {
    let (x, y) = match (&a.a, &a.b) {
        (Some(pa), Some(pb)) => (io::read_polynomial(pa)?, io::read_polynomial(pb)?),
        (None, None) => {
            let Some(n) = a.n else {
                bail!("give two input files or --n")
            };
            let mut rng = seeded(a.seed);
            (
                random_polynomial(&mut rng, n, 1.0)?,
                random_polynomial(&mut rng, n, 1.0)?,
            )
        }
        _ => bail!("polymul needs both operand files"),
    };
    let prod = polymul_via_fft(&x, &y)?;
    let text = match a.format {
        Format::Json => io::polynomial_to_json(&prod),
        Format::Csv => io::polynomial_to_csv(&prod)?,
    };
    emit(a.out.as_deref(), &text)?;
    if a.check {
        let oracle = polymul_negacyclic_oracle(&x, &y)?;
        let dev = prod.max_abs_diff(&oracle)?;
        let bound = 1e-9 * x.len() as f64;
        let ok = dev <= bound;
        report(
            a.out.as_deref(),
            &format!(
                "seed={} n={} max_deviation={dev:e} bound={bound:e} {}",
                a.seed,
                x.len(),
                if ok { "ok" } else { "FAILED" }
            ),
        );
        if !ok {
            return Ok(ExitCode::FAILURE);
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_schedule(a: &ScheduleArgs) -> Result<ExitCode> {
    let cfg = ScheduleConfig::new(a.n, a.npe, a.direction.into())?;
    if a.n < 4 {
        bail!("schedules need n >= 4");
    }
    let trace = build_schedule(&cfg)?;
    emit(a.out.as_deref(), &io::trace_to_csv(&trace)?)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_rom(a: &RomArgs) -> Result<ExitCode> {
    let set = RomSet::build(a.npe)?;
    let mut t = Table::new(["pe", "logical", "stored", "bytes"]);
    for pe in 0..set.n_pe() {
        let r = set.rom(pe);
        t.push([
            pe.to_string(),
            r.logical_len().to_string(),
            r.stored.len().to_string(),
            (16 * r.stored.len()).to_string(),
        ]);
    }
    print!("{}", t.to_text());
    println!(
        "total stored {} entries, {} bytes",
        set.total_stored(),
        set.stored_bytes()
    );
    if let Some(dir) = &a.out {
        for f in io::write_rom_dump(dir, &set)? {
            println!("wrote {}", f.display());
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn render(t: &Table, format: Option<Format>, out: Option<&Path>) -> Result<()> {
    let text = match format {
        None => t.to_text(),
        Some(Format::Csv) => t.to_csv(),
        Some(Format::Json) => t.to_json(),
    };
    emit(out, &text)?;
    Ok(())
}

fn cmd_cycles(a: &CyclesArgs) -> Result<ExitCode> {
    let baseline = cycle_rows();
    let mut t = Table::new(["n", "cycles", "time_ns", "a72_cycles", "a72_time_ns"]);
    for row in &baseline {
        let c = cycle_count(row.n, a.npe)?;
        t.push([
            row.n.to_string(),
            c.to_string(),
            format!("{}", exec_time_ns_at_period(c, CLOCK_PERIOD_NS)),
            row.a72_cycles.to_string(),
            format!("{}", row.a72_exec_time_ns),
        ]);
    }
    render(&t, a.format.format, a.format.out.as_deref())?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_metrics(a: &FormatArgs) -> Result<ExitCode> {
    let mut t = Table::new([
        "design",
        "citation",
        "n",
        "area_mm2",
        "power_mw",
        "time_us",
        "norm_area",
        "norm_power",
        "norm_energy",
        "printed_area",
        "printed_power",
        "printed_energy",
    ]);
    for row in comparison_rows() {
        let m = normalize(&row.record())?;
        t.push([
            row.name.clone(),
            row.citation.clone(),
            row.fft_size.to_string(),
            row.area_mm2.to_string(),
            row.power_range_mw.clone(),
            row.exec_time_us.to_string(),
            format!("{:.3}", m.area),
            format!("{:.1}", m.power),
            format!("{:.0}", m.energy),
            row.published_area.clone(),
            row.published_power.clone(),
            row.published_energy.clone(),
        ]);
    }
    render(&t, a.format, a.out.as_deref())?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(a: &VerifyArgs) -> Result<ExitCode> {
    let cfg = if a.quick {
        SuiteConfig::quick(a.seed)
    } else {
        SuiteConfig {
            seed: a.seed,
            ..SuiteConfig::default()
        }
    };
    println!("seed={}", cfg.seed);
    let checks = run_all(&cfg);
    for c in &checks {
        println!("{}", c.line());
        for n in &c.notes {
            println!("    note: {n}");
        }
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    println!(
        "{} of {} checks passed",
        checks.len() - failed,
        checks.len()
    );
    Ok(if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn cmd_memdump(a: &MemdumpArgs) -> Result<ExitCode> {
    let p = load_or_random(a.input.as_deref(), Some(a.n), a.seed)?;
    let cfg = ScheduleConfig::new(p.len(), a.npe, a.direction.into())?;
    let trace = build_schedule(&cfg)?;
    let roms = RomSet::build(a.npe)?;
    let mut mem = BankedMemory::new(a.npe)?;
    match cfg.direction() {
        Direction::Forward => load_natural(&p, &mut mem)?,
        Direction::Inverse => load_spectrum(&fft_inplace(&p), &trace, &mut mem)?,
    }
    std::fs::create_dir_all(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
    let initial = a.out.join("memdump_initial.csv");
    io::write_file(&initial, io::memory_to_csv(&mem, &cfg)?.as_bytes())?;
    println!("wrote {}", initial.display());
    let mut snapshots = Vec::new();
    execute_observed(&trace, &mut mem, &roms, |sg, m| {
        snapshots.push((sg, io::memory_to_csv(m, &cfg)));
    })?;
    for (sg, csv) in snapshots {
        let path = a.out.join(format!("memdump_after_stage{sg}.csv"));
        io::write_file(&path, csv?.as_bytes())?;
        println!("wrote {}", path.display());
    }
    Ok(ExitCode::SUCCESS)
}
