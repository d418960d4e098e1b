use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use kcert::engine::Mode;
use kcert::field::{FieldSpec, MERSENNE_61};
use kcert::protocol::{resolve, run, verify_transcript, Options};
use kcert::prover::HonestProver;
use kcert::report::{bench, to_csv, BenchConfig, RunReport};
use kcert::sparse::SparseMatrix;
use kcert::Error;

/// Interactive certificates for sparse Krylov sequences over GF(p).
#[derive(Parser)]
#[command(name = "kcert", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a random sparse matrix in Matrix Market form.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        nnz_per_row: usize,
        #[arg(long, default_value_t = MERSENNE_61)]
        modulus: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a protocol with the honest prover and store the transcript.
    Prove {
        #[arg(long)]
        matrix: PathBuf,
        #[command(flatten)]
        proto: ProtoArgs,
        /// Nonce bound into the transcript header.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        modulus: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Replay a transcript: exit 0 on accept, 1 on reject, 2 if malformed.
    Verify {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        transcript: PathBuf,
    },
    /// Sweep sizes and print operation counts as CSV.
    Bench {
        /// Comma-separated dimensions.
        #[arg(long, default_value = "")]
        sweep: String,
        #[command(flatten)]
        proto: ProtoArgs,
        #[arg(long, default_value_t = 3)]
        nnz_per_row: usize,
        #[arg(long, default_value_t = MERSENNE_61)]
        modulus: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also emit prover rows.
        #[arg(long)]
        with_prover: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct ProtoArgs {
    /// checkpoint | dense | klevel[:k] | seq-log | seq-single | power-log |
    /// power-single | combination | minpoly | det | charpoly
    /// (comma-separated for bench).
    #[arg(long, default_value = "seq-single")]
    protocol: String,
    /// Sequence length or power; defaults to 2n.
    #[arg(long)]
    delta: Option<usize>,
    #[arg(long = "K")]
    k: Option<usize>,
    #[arg(long)]
    levels: Option<usize>,
    /// log | single, or the sequence protocol behind minpoly/det/charpoly.
    #[arg(long)]
    variant: Option<String>,
    #[arg(long)]
    projections: Option<usize>,
}

impl ProtoArgs {
    fn options(&self) -> Options {
        Options {
            delta: self.delta,
            k: self.k,
            levels: self.levels,
            variant: self.variant.clone(),
            projections: self.projections,
        }
    }
}

fn field_spec(p: u64) -> Result<FieldSpec, Error> {
    let spec = FieldSpec::new(p)?;
    match std::env::var("KCERT_SAMPLE_SET") {
        Ok(v) => {
            let size = v
                .trim()
                .parse()
                .map_err(|_| Error::InvalidParameter(format!("KCERT_SAMPLE_SET={v:?} is not an integer")))?;
            spec.with_sample_set(size)
        }
        Err(_) => Ok(spec),
    }
}

fn execute(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Gen { n, nnz_per_row, modulus, seed, out } => {
            let a = SparseMatrix::random(FieldSpec::new(modulus)?.field(), n, nnz_per_row, seed)?;
            a.store(&out)?;
            println!("wrote {n}x{n} matrix with {} nonzeros to {}", a.nnz(), out.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Prove { matrix, proto, seed, modulus, out } => {
            let a = SparseMatrix::load(&matrix)?;
            let p = a.field().modulus();
            if modulus.is_some_and(|m| m != p) {
                return Err(Error::InvalidParameter(format!("matrix is over GF({p}), --modulus says otherwise")));
            }
            let protocol = resolve(&proto.protocol, &proto.options(), &a)?;
            let result = run(&a, field_spec(p)?, protocol, Mode::FiatShamir, seed, &mut HonestProver)?;
            print!("{}", RunReport::new(protocol, &a, &result));
            if let Some(r) = &result.result {
                println!("result: {r}");
            }
            if !result.outcome.is_accept() {
                return Ok(ExitCode::from(1));
            }
            fs::write(&out, result.transcript.to_bytes())?;
            println!("transcript: {}", out.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { matrix, transcript } => {
            let a = SparseMatrix::load(&matrix)?;
            let bytes = fs::read(&transcript)?;
            let result = verify_transcript(&a, &bytes)?;
            let protocol = kcert::protocol::Protocol::from_header(
                result.transcript.header.tag,
                &result.transcript.header.params[..result.transcript.header.params.len() - 2],
            )?;
            print!("{}", RunReport::new(protocol, &a, &result));
            if let Some(r) = &result.result {
                println!("result: {r}");
            }
            Ok(if result.outcome.is_accept() { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Bench { sweep, proto, nnz_per_row, modulus, seed, with_prover, out } => {
            let sizes = sweep
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(|s| s.parse().map_err(|_| Error::InvalidParameter(format!("bad sweep size {s:?}"))))
                .collect::<Result<Vec<usize>, _>>()?;
            let cfg = BenchConfig {
                protocols: proto.protocol.split(',').map(str::to_string).filter(|s| !s.is_empty()).collect(),
                sizes,
                nnz_per_row,
                seed,
                spec: field_spec(modulus)?,
                options: proto.options(),
                with_prover,
            };
            let csv = to_csv(&bench(&cfg)?);
            match out {
                Some(path) => fs::write(path, csv)?,
                None => print!("{csv}"),
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("kcert: {e}");
            ExitCode::from(2)
        }
    }
}
