use std::io::{self, BufWriter, Write};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};
use zerosum::{
    check_cyclic_inverse, check_property_b, classify, count_ml_mzss, davenport, egz_property, enumerate_ml_mzss,
    tm1_structure_check, verify_theorem, Error, GroupSpec, SearchConfig, Sequence, VerificationReport,
};

/// Exact zero-sum computations over small finite abelian groups.
#[derive(Parser, Debug)]
#[command(name = "zerosum", version)]
struct Cli {
    /// Search worker threads.
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    workers: u32,

    #[arg(long, global = true, value_enum, default_value_t = Output::Json)]
    output: Output,

    /// Largest group order accepted by enumeration-based commands.
    #[arg(long, global = true, env = "ZEROSUM_CAP_ORDER", value_parser = clap::value_parser!(u64).range(1..))]
    cap: Option<u64>,

    /// Largest group order accepted by the Davenport search.
    #[arg(long, global = true, default_value_t = 64, value_parser = clap::value_parser!(u64).range(1..))]
    davenport_cap: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Output {
    Json,
    Csv,
    Text,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute D(G) with a witness sequence.
    Davenport {
        #[arg(long)]
        group: GroupSpec,
    },
    /// Stream every minimal zero-sum sequence of length D(G).
    Enumerate {
        #[arg(long)]
        group: GroupSpec,
        /// Emit one canonical representative per automorphism orbit instead.
        #[arg(long)]
        canonical: bool,
    },
    /// Match a sequence against the two structural families.
    Classify {
        #[arg(long)]
        group: GroupSpec,
        #[arg(long)]
        sequence: String,
    },
    /// Run an exhaustive or randomized check.
    Verify {
        #[command(subcommand)]
        target: Target,
    },
}

#[derive(Subcommand, Debug)]
enum Target {
    /// Property B over C_m + C_m.
    PropertyB {
        #[arg(long)]
        m: u32,
    },
    /// The ml-mzss over C_n are exactly e^n with e a generator.
    Cyclic {
        #[arg(long)]
        n: u32,
    },
    /// Random EGZ trials over C_n plus the tight length 2n-2 witness.
    Egz {
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Classify every ml-mzss over the group; unclassified ones are violations.
    Theorem {
        #[arg(long)]
        group: GroupSpec,
    },
    /// Zero-sum sequences of length tm-1 over C_m + C_m with fewer than t factors.
    Tm1 {
        #[arg(long)]
        m: u32,
        #[arg(long)]
        t: u32,
    },
}

#[derive(Debug)]
enum Failure {
    Lib(Error),
    Io(io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Io(e.into())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let result = run(&cli, &mut out).and_then(|code| {
        out.flush()?;
        Ok(code)
    });
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::CapExceeded { .. } => 3,
                _ => 2,
            })
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn config(cli: &Cli) -> SearchConfig {
    let mut cfg = SearchConfig::with_workers(cli.workers as usize);
    cfg.caps.davenport_max_order = cli.davenport_cap as usize;
    if let Some(cap) = cli.cap {
        cfg.caps.enumeration_max_order = cap as usize;
        cfg.caps.automorphism_max_order = cfg.caps.automorphism_max_order.max(cap as usize);
        cfg.caps.arithmetic_max_order = cfg.caps.arithmetic_max_order.max(cap as usize);
    }
    cfg
}

fn run(cli: &Cli, out: &mut impl Write) -> Result<u8, Failure> {
    let cfg = config(cli);
    match &cli.command {
        Command::Davenport { group } => {
            emit(out, cli.output, &davenport(group, &cfg)?.to_json())?;
            Ok(0)
        }
        Command::Enumerate { group, canonical } => enumerate(out, cli.output, group, *canonical, &cfg),
        Command::Classify { group, sequence } => {
            let seq = Sequence::parse(group, sequence)?;
            emit(out, cli.output, &classify(group, &seq)?.to_json(&seq))?;
            Ok(0)
        }
        Command::Verify { target } => {
            let report = match target {
                Target::PropertyB { m } => check_property_b(*m, &cfg)?,
                Target::Cyclic { n } => check_cyclic_inverse(*n, &cfg)?,
                Target::Egz { n, trials, seed } => egz_property(*n, *trials, *seed)?,
                Target::Theorem { group } => verify_theorem(group, &cfg)?,
                Target::Tm1 { m, t } => tm1_structure_check(*m, *t, &cfg)?,
            };
            emit_report(out, cli.output, &report)?;
            Ok(if report.verdict { 0 } else { 1 })
        }
    }
}

/// Writes the enumeration stream one sequence per line (or CSV row).
enum Stream<W: Write> {
    Lines { json: bool, out: W },
    Csv { group: String, index: u64, out: Box<csv::Writer<W>> },
}

impl<W: Write> Stream<W> {
    fn new(format: Output, group: &GroupSpec, out: W) -> Result<Self, Failure> {
        Ok(match format {
            Output::Csv => {
                let mut out = csv::Writer::from_writer(out);
                out.write_record(["group", "D", "index", "sequence"])?;
                Stream::Csv { group: group.to_string(), index: 0, out: Box::new(out) }
            }
            _ => Stream::Lines { json: format == Output::Json, out },
        })
    }

    fn push(&mut self, seq: &Sequence) -> Result<(), Failure> {
        let text = seq.to_string();
        match self {
            Stream::Lines { json: true, out } => writeln!(out, "{}", Value::String(text))?,
            Stream::Lines { json: false, out } => writeln!(out, "{text}")?,
            Stream::Csv { group, index, out } => {
                out.write_record([group.as_str(), &seq.len().to_string(), &index.to_string(), &text])?;
                *index += 1;
            }
        }
        Ok(())
    }

    /// Ends the stream with the summary; CSV output carries rows only.
    fn finish(self, summary: &Value) -> Result<(), Failure> {
        match self {
            Stream::Lines { json: true, mut out } => writeln!(out, "{summary}")?,
            Stream::Lines { json: false, mut out } => write_text(&mut out, summary)?,
            Stream::Csv { mut out, .. } => out.flush()?,
        }
        Ok(())
    }
}

fn enumerate(
    out: &mut impl Write,
    format: Output,
    group: &GroupSpec,
    canonical: bool,
    cfg: &SearchConfig,
) -> Result<u8, Failure> {
    let mut stream = Stream::new(format, group, out)?;
    let summary = if canonical {
        let report = count_ml_mzss(group, cfg)?;
        for rep in &report.orbit_representatives {
            stream.push(rep)?;
        }
        let mut summary = report.to_json();
        if let Some(map) = summary.as_object_mut() {
            map.remove("representatives");
        }
        summary
    } else {
        let started = Instant::now();
        let mut failed = None;
        let stats = enumerate_ml_mzss(group, cfg, &mut |seq| {
            if failed.is_none() {
                failed = stream.push(&seq).err();
            }
        })?;
        if let Some(e) = failed {
            return Err(e);
        }
        json!({
            "group": group.to_string(),
            "D": stats.length,
            "total": stats.total_count,
            "elapsed_ms": started.elapsed().as_millis() as u64,
            "nodes": stats.nodes,
        })
    };
    stream.finish(&summary)?;
    Ok(0)
}

fn emit_report(out: &mut impl Write, format: Output, report: &VerificationReport) -> Result<(), Failure> {
    if format != Output::Csv {
        return emit(out, format, &report.to_json());
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["check", "params", "checked", "violation_count", "verdict", "elapsed_ms", "violations"])?;
    w.write_record([
        report.check.clone(),
        report.params.to_string(),
        report.checked.to_string(),
        report.violations.len().to_string(),
        report.verdict.to_string(),
        report.elapsed.as_millis().to_string(),
        Value::from(report.violations.clone()).to_string(),
    ])?;
    w.flush()?;
    Ok(())
}

/// Writes a flat object as one JSON line, a header and data row, or `key: value` lines.
fn emit(out: &mut impl Write, format: Output, value: &Value) -> Result<(), Failure> {
    match format {
        Output::Json => writeln!(out, "{value}")?,
        Output::Text => write_text(out, value)?,
        Output::Csv => {
            let empty = Map::new();
            let map = value.as_object().unwrap_or(&empty);
            let mut w = csv::Writer::from_writer(out);
            w.write_record(map.keys())?;
            w.write_record(map.values().map(cell))?;
            w.flush()?;
        }
    }
    Ok(())
}

fn write_text(out: &mut impl Write, value: &Value) -> io::Result<()> {
    match value.as_object() {
        Some(map) => map.iter().try_for_each(|(k, v)| writeln!(out, "{k}: {}", cell(v))),
        None => writeln!(out, "{value}"),
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}
