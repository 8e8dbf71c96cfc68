//! Command-line front end. Exit codes: 0 success, 1 job or check failure,
//! 2 usage or input error.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::analysis::{parse_rows, sweep_report, Columns};
use crate::arch::{run, ArchKind};
use crate::batch::run_batch;
use crate::config::parse_config;
use crate::gen::{generate, GenParams};
use crate::num::{oracle_mul, ArithMode, Nat};
use crate::rtl::{check, Simulator};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "polymul", version, about = "Large-integer multiplier generator and workbench")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate Verilog, testbenches and synthesis scripts from an XML config.
    Gen {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the behavioral model on one operand pair.
    Model {
        #[command(flatten)]
        arch: ArchArgs,
        /// Operand a in hex.
        #[arg(long)]
        a: String,
        /// Operand b in hex.
        #[arg(long)]
        b: String,
    },
    /// Check generated RTL against the model on random vectors.
    Verify {
        #[command(flatten)]
        arch: ArchArgs,
        #[arg(long, default_value_t = 200)]
        vectors: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Latency and figure-of-merit report from a sweep CSV.
    Analyze {
        #[arg(long)]
        csv: PathBuf,
        #[arg(long, default_value = "freq_mhz")]
        freq_col: String,
        #[arg(long, default_value = "area")]
        area_col: String,
        #[arg(long, default_value = "power")]
        power_col: String,
        #[arg(long, default_value = "cycles")]
        cycles_col: String,
        /// Also write the annotated CSV here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct ArchArgs {
    /// sbm, km2, tc3, tc4 or wrapper (and their long names).
    #[arg(long)]
    method: String,
    /// Operand width in bits.
    #[arg(long)]
    m: u32,
    /// Digit size for the wrapper.
    #[arg(long)]
    digit: Option<u64>,
    /// Inner method for the wrapper.
    #[arg(long, default_value = "sbm")]
    inner: String,
    /// integer or gf2.
    #[arg(long, default_value = "integer")]
    mode: String,
}

impl ArchArgs {
    fn resolve(&self) -> Result<(ArchKind, ArithMode), String> {
        let mode = ArithMode::parse(&self.mode).ok_or_else(|| format!("unknown mode `{}`", self.mode))?;
        let kind = ArchKind::from_parts(&self.method, self.digit, &self.inner)?;
        Ok((kind, mode))
    }
}

/// Runs the CLI on `args` (program name first).
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                return EXIT_USAGE;
            }
            let _ = write!(out, "{}", e.render());
            return EXIT_OK;
        }
    };
    let result = match cli.command {
        Command::Gen { config, out: dir } => cmd_gen(&config, &dir, out, err),
        Command::Model { arch, a, b } => cmd_model(&arch, &a, &b, out),
        Command::Verify { arch, vectors, seed } => cmd_verify(&arch, vectors, seed, out),
        Command::Analyze { csv, freq_col, area_col, power_col, cycles_col, out: dest } => {
            let columns = Columns { freq: freq_col, cycles: cycles_col, area: area_col, power: power_col };
            cmd_analyze(&csv, &columns, dest.as_deref(), out)
        }
    };
    match result {
        Ok(code) => code,
        Err((code, message)) => {
            let _ = writeln!(err, "error: {message}");
            code
        }
    }
}

type CmdResult = Result<i32, (i32, String)>;

fn usage(message: impl ToString) -> (i32, String) {
    (EXIT_USAGE, message.to_string())
}

fn cmd_gen(config: &std::path::Path, dir: &std::path::Path, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let text = std::fs::read_to_string(config).map_err(|e| usage(format!("{}: {e}", config.display())))?;
    let jobs = parse_config(&text).map_err(|e| usage(format!("{}:{e}", config.display())))?;
    let result = run_batch(&jobs, dir).map_err(|e| (EXIT_FAILURE, e.to_string()))?;
    for o in &result.outcomes {
        match &o.result {
            Ok(artifacts) => {
                for a in artifacts {
                    let _ = writeln!(out, "wrote {}", a.path);
                }
            }
            Err(e) => {
                let _ = writeln!(err, "job {} m={}: {e}", o.job.kind, o.job.m);
            }
        }
    }
    let _ = writeln!(out, "{} job(s) ok, {} failed", result.succeeded(), result.failed());
    Ok(if result.failed() == 0 { EXIT_OK } else { EXIT_FAILURE })
}

fn cmd_model(arch: &ArchArgs, a: &str, b: &str, out: &mut dyn Write) -> CmdResult {
    let (kind, mode) = arch.resolve().map_err(usage)?;
    let a = Nat::from_hex(a).map_err(usage)?;
    let b = Nat::from_hex(b).map_err(usage)?;
    let trace = run(kind, &a, &b, u64::from(arch.m), mode).map_err(usage)?;
    let _ = writeln!(out, "{}", trace.product.to_hex());
    let _ = writeln!(out, "cycles={}", trace.cycles);
    Ok(EXIT_OK)
}

fn cmd_verify(arch: &ArchArgs, vectors: usize, seed: u64, out: &mut dyn Write) -> CmdResult {
    let (kind, mode) = arch.resolve().map_err(usage)?;
    let params = GenParams::new(kind, arch.m, mode);
    let design = generate(&params).map_err(usage)?;
    let modules = design.modules().map_err(|e| (EXIT_FAILURE, e.to_string()))?;
    let diags: Vec<_> = modules.iter().flat_map(check).collect();
    if let Some(d) = diags.first() {
        return Err((EXIT_FAILURE, format!("{} diagnostic(s), first: {d}", diags.len())));
    }
    let mut sim = Simulator::new(&design.top, &design.library).map_err(|e| (EXIT_FAILURE, e.to_string()))?;
    let m = u64::from(arch.m);
    let latency = design.top.latency_cycles;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..vectors {
        let a = Nat::random(&mut rng, m);
        let b = Nat::random(&mut rng, m);
        let got = sim
            .run_transaction(a.as_biguint(), b.as_biguint(), latency)
            .map_err(|e| (EXIT_FAILURE, format!("vector {i}: {e}")))?;
        let model = run(kind, &a, &b, m, mode).map_err(|e| (EXIT_FAILURE, e.to_string()))?;
        let expected = oracle_mul(&a, &b, mode);
        if Nat::from(got.clone()) != expected || model.product != expected || model.cycles != latency {
            return Err((
                EXIT_FAILURE,
                format!("vector {i}: a={a} b={b} rtl={:X} model={} oracle={expected}", got, model.product),
            ));
        }
    }
    let _ = writeln!(out, "{}: {vectors} vectors match, latency {latency} cycles", design.top.name);
    Ok(EXIT_OK)
}

fn cmd_analyze(csv: &std::path::Path, columns: &Columns, dest: Option<&std::path::Path>, out: &mut dyn Write) -> CmdResult {
    let text = std::fs::read_to_string(csv).map_err(|e| usage(format!("{}: {e}", csv.display())))?;
    let rows = parse_rows(&text, columns).map_err(|e| usage(format!("{}: {e}", csv.display())))?;
    let report = sweep_report(rows).map_err(usage)?;
    let _ = write!(out, "{}", report.to_table());
    if let Some(dest) = dest {
        std::fs::write(dest, report.to_csv()).map_err(|e| (EXIT_FAILURE, format!("{}: {e}", dest.display())))?;
    }
    Ok(EXIT_OK)
}
