use clap::Parser;
use fixrank::harness::{exit_code, run, write_report, Command, Format, RunConfig, RunStatus};
use std::path::PathBuf;
use std::process::ExitCode;

/// Fixed-rank matrix counts, leading-constant series and Hecke-neighbor moments.
#[derive(Parser, Debug)]
#[command(name = "fixrank", version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// TOML file whose keys override the flags below.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Builtin field: Q, Qi, Qsqrt2, Qsqrt5, Qzeta3.
    #[arg(long, default_value = "Q")]
    field: String,
    /// Field specification file (`min_poly`, `integral_basis`, `precision_digits`).
    #[arg(long)]
    field_file: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    s: Option<usize>,
    /// Comma-separated scales `T`.
    #[arg(long, value_delimiter = ',')]
    t: Vec<f64>,
    /// Comma-separated rational primes.
    #[arg(long, value_delimiter = ',')]
    primes: Vec<u64>,
    #[arg(long)]
    cutoff: Option<f64>,
    #[arg(long, default_value_t = 20_000)]
    mc_samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// ball, product_of_balls or product_of_annuli.
    #[arg(long, default_value = "ball")]
    function: String,
    #[arg(long, default_value_t = 1.0)]
    radius: f64,
    #[arg(long, default_value_t = 0.0)]
    inner: f64,
    /// exact, sampled:<count>, auto or auto:<max_exact>:<samples>.
    #[arg(long, default_value = "auto")]
    mode: String,
    /// Identity for identity-check: primitive-zeta or koecher.
    #[arg(long, default_value = "primitive-zeta")]
    kind: String,
    /// Matrix for factorize, e.g. "2,1;4,2;6,3" (`|` separates power-basis coordinates).
    #[arg(long, allow_hyphen_values = true)]
    matrix: Option<String>,
    /// Defaults to $FIXRANK_OUTPUT_DIR, then ./fixrank-out.
    #[arg(long)]
    output_dir: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Worker threads for the parallel parts.
    #[arg(long)]
    threads: Option<usize>,
}

impl Cli {
    fn into_config(self) -> (RunConfig, Option<PathBuf>) {
        let c = RunConfig {
            command: self.command,
            field: self.field,
            field_file: self.field_file,
            n: self.n,
            m: self.m,
            k: self.k,
            s: self.s,
            t: self.t,
            primes: self.primes,
            cutoff: self.cutoff,
            mc_samples: self.mc_samples,
            seed: self.seed,
            function: self.function,
            radius: self.radius,
            inner: self.inner,
            mode: self.mode,
            kind: self.kind,
            matrix: self.matrix,
            output_dir: self.output_dir,
            format: self.format,
            threads: self.threads,
        };
        (c, self.config)
    }
}

fn main() -> ExitCode {
    let (flags, file) = Cli::parse().into_config();
    let config = match file {
        Some(path) => match flags.overridden_by_file(&path) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(exit_code(&e) as u8);
            }
        },
        None => flags,
    };
    if let Some(t) = config.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("warning: {e}");
        }
    }
    let result = match run(&config) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code(&e) as u8);
        }
    };
    let dir = config.output_dir();
    match write_report(&result, &dir, config.format) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(4);
        }
    }
    if result.status == RunStatus::CapAbort {
        eprintln!("error: {}", result.error.as_deref().unwrap_or("cap exceeded"));
        return ExitCode::from(3);
    }
    ExitCode::SUCCESS
}
