//! Command-line surface for field inspection, PRF censuses, bound
//! evaluation, permutation-array materialization, and table emission.
//!
//! Exit codes: 0 success, 1 usage error, 2 budget exhausted, 3 missing
//! counts, 4 I/O or malformed input, 5 verification failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use prf::bounds::{
    self, BoundOptions, BoundsError, Family, N11Convention, PermArray, TableId, VerifyMode,
};
use prf::census::{self, CensusError, CensusOptions, Strategy};
use prf::field::{build_field, FieldCtx, FieldSpec};

const EXIT_USAGE: u8 = 1;
const EXIT_BUDGET: u8 = 2;
const EXIT_MISSING: u8 = 3;
const EXIT_IO: u8 = 4;
const EXIT_VERIFY: u8 = 5;

#[derive(Parser)]
#[command(name = "prf", about = "Permutation rational function census and bound toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct FieldFlags {
    /// Field characteristic (prime).
    #[arg(long)]
    p: u64,
    /// Extension degree m; the field has q = p^m elements.
    #[arg(long, default_value_t = 1)]
    m: u32,
    /// Monic primitive polynomial coefficients, constant term first
    /// (e.g. 1,0,1,1 for x^3+x^2+1); defaults to a pinned choice.
    #[arg(long, value_delimiter = ',')]
    prim_poly: Option<Vec<u32>>,
}

impl FieldFlags {
    fn build(&self) -> Result<FieldCtx, String> {
        let spec = match &self.prim_poly {
            Some(coeffs) => FieldSpec::new(self.p, self.m, coeffs.clone()),
            None => FieldSpec::with_default_poly(self.p, self.m).map_err(|e| e.to_string())?,
        };
        build_field(&spec).map_err(|e| e.to_string())
    }
}

#[derive(Args)]
struct RunFlags {
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Candidate-evaluation budget override.
    #[arg(long)]
    budget: Option<u64>,
    /// Number of shards for parallel runs.
    #[arg(long)]
    shards: Option<u64>,
}

impl RunFlags {
    fn apply(&self, opts: &mut CensusOptions) {
        if let Some(b) = self.budget {
            opts.budget_brute = b;
            opts.budget_normalized = b;
        }
        if let Some(s) = self.shards {
            opts.shards = s;
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Print the field parameters and generator.
    Field {
        #[command(flatten)]
        field: FieldFlags,
    },
    /// Count PRFs of one shape and print the CountRecord as JSON.
    Count {
        #[command(flatten)]
        field: FieldFlags,
        /// Exact numerator degree v.
        #[arg(long)]
        num_deg: usize,
        /// Exact denominator degree u.
        #[arg(long)]
        den_deg: usize,
        /// auto | brute | normalized | monic-equal.
        #[arg(long, default_value = "auto")]
        strategy: String,
        /// Checkpoint file for interruptible runs.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        /// Append the result to this JSON-lines cache
        /// (default: $PRF_CACHE).
        #[arg(long)]
        cache: Option<PathBuf>,
        /// Disable the F-map stratification.
        #[arg(long)]
        no_f_stratify: bool,
        /// Enable G-orbit reduction (asserted equal in tests).
        #[arg(long)]
        g_reduce: bool,
        #[command(flatten)]
        run: RunFlags,
    },
    /// Evaluate S_d(q) or T_d(q) with a full term ledger (JSON).
    Bounds {
        #[command(flatten)]
        field: FieldFlags,
        #[arg(long)]
        d: usize,
        /// S or T.
        #[arg(long)]
        family: String,
        /// Permit conjectured closed forms in their verified ranges.
        #[arg(long)]
        allow_conjectures: bool,
        /// Count cache consulted first (default: $PRF_CACHE).
        #[arg(long)]
        cache: Option<PathBuf>,
        /// Shape-(1,1) convention: fractional-linear | exact.
        #[arg(long, default_value = "fractional-linear")]
        n11: String,
        #[command(flatten)]
        run: RunFlags,
    },
    /// Build or verify permutation arrays.
    Pa {
        #[command(subcommand)]
        action: PaAction,
    },
    /// Emit a reproduction table as CSV or JSON.
    Tables {
        /// S5S7 | N54 | S9 | T6 | T8.
        #[arg(long)]
        table: String,
        /// Comma-separated field orders.
        #[arg(long, value_delimiter = ',')]
        q: Vec<u64>,
        #[arg(long)]
        cache: Option<PathBuf>,
        #[arg(long, default_value = "csv")]
        format: String,
        #[arg(long)]
        allow_conjectures: bool,
        #[command(flatten)]
        run: RunFlags,
    },
}

#[derive(Subcommand)]
enum PaAction {
    /// Materialize an array and write it to --out.
    Build {
        #[command(flatten)]
        field: FieldFlags,
        #[arg(long)]
        d: usize,
        /// S or T.
        #[arg(long)]
        family: String,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        run: RunFlags,
    },
    /// Check the minimum pairwise distance of a stored array.
    Verify {
        #[arg(long)]
        file: PathBuf,
        #[arg(long)]
        min_dist: u32,
        /// exhaustive | sample | auto.
        #[arg(long, default_value = "auto")]
        mode: String,
        /// Pair count for sample mode.
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
    },
}

fn default_cache(flag: Option<PathBuf>) -> Option<PathBuf> {
    flag.or_else(|| std::env::var_os("PRF_CACHE").map(PathBuf::from))
}

fn fail(code: u8, msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(code)
}

fn census_exit(e: &CensusError) -> u8 {
    match e {
        CensusError::BudgetExceeded { .. } => EXIT_BUDGET,
        CensusError::Io(_) | CensusError::Format(_) | CensusError::CheckpointMismatch(_) => EXIT_IO,
        CensusError::NotCountable { .. } => EXIT_USAGE,
    }
}

fn bounds_exit(e: &BoundsError) -> u8 {
    match e {
        BoundsError::MissingCounts { .. } => EXIT_MISSING,
        BoundsError::BadParams(_) => EXIT_USAGE,
        BoundsError::Census(c) => census_exit(c),
        BoundsError::NonDivisible { .. } => EXIT_USAGE,
        BoundsError::Io(_) | BoundsError::MalformedArray(_) => EXIT_IO,
    }
}

fn init_threads(threads: Option<usize>) {
    if let Some(n) = threads {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version are successful exits; real parse errors
            // map to the usage code.
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };

    match cli.command {
        Command::Field { field } => {
            let ctx = match field.build() {
                Ok(ctx) => ctx,
                Err(e) => return fail(EXIT_USAGE, &e),
            };
            let gen = ctx.generator();
            println!(
                "{}",
                serde_json::json!({
                    "p": ctx.spec.p,
                    "m": ctx.spec.m,
                    "q": ctx.q,
                    "prim_poly": ctx.spec.prim_poly,
                    "generator_label": gen.0,
                    "generator_vector": ctx.generator_vec(),
                })
            );
            ExitCode::SUCCESS
        }
        Command::Count {
            field,
            num_deg,
            den_deg,
            strategy,
            checkpoint,
            cache,
            no_f_stratify,
            g_reduce,
            run,
        } => {
            let ctx = match field.build() {
                Ok(ctx) => ctx,
                Err(e) => return fail(EXIT_USAGE, &e),
            };
            let Some(strategy) = Strategy::parse(&strategy) else {
                return fail(EXIT_USAGE, &format!("unknown strategy {strategy:?}"));
            };
            init_threads(run.threads);
            let mut opts = CensusOptions::default();
            run.apply(&mut opts);
            opts.f_stratify = !no_f_stratify;
            opts.g_reduce = g_reduce;
            opts.checkpoint = checkpoint;
            match census::count(&ctx, num_deg, den_deg, strategy, &opts) {
                Ok(rec) => {
                    if let Some(path) = default_cache(cache) {
                        if let Err(e) = census::append_cache(&path, &rec) {
                            return fail(EXIT_IO, &e.to_string());
                        }
                    }
                    println!("{}", serde_json::to_string(&rec).expect("serializable"));
                    ExitCode::SUCCESS
                }
                Err(e) => fail(census_exit(&e), &e.to_string()),
            }
        }
        Command::Bounds {
            field,
            d,
            family,
            allow_conjectures,
            cache,
            n11,
            run,
        } => {
            let ctx = match field.build() {
                Ok(ctx) => ctx,
                Err(e) => return fail(EXIT_USAGE, &e),
            };
            let Some(family) = Family::parse(&family) else {
                return fail(EXIT_USAGE, &format!("family must be S or T, got {family:?}"));
            };
            let n11 = match n11.as_str() {
                "fractional-linear" => N11Convention::FractionalLinear,
                "exact" => N11Convention::Exact,
                other => return fail(EXIT_USAGE, &format!("unknown n11 convention {other:?}")),
            };
            init_threads(run.threads);
            let mut opts = BoundOptions::default();
            run.apply(&mut opts.census);
            opts.allow_conjectures = allow_conjectures;
            opts.n11 = n11;
            opts.cache = default_cache(cache);
            let result = match family {
                Family::S => bounds::s_bound(&ctx, d, &opts),
                Family::T => bounds::t_bound(&ctx, d, &opts),
            };
            match result {
                Ok(rep) => {
                    println!("{}", serde_json::to_string(&rep).expect("serializable"));
                    ExitCode::SUCCESS
                }
                Err(e) => fail(bounds_exit(&e), &e.to_string()),
            }
        }
        Command::Pa { action } => match action {
            PaAction::Build {
                field,
                d,
                family,
                out,
                run,
            } => {
                let ctx = match field.build() {
                    Ok(ctx) => ctx,
                    Err(e) => return fail(EXIT_USAGE, &e),
                };
                let Some(family) = Family::parse(&family) else {
                    return fail(EXIT_USAGE, &format!("family must be S or T, got {family:?}"));
                };
                init_threads(run.threads);
                let mut opts = BoundOptions::default();
                run.apply(&mut opts.census);
                let built = match family {
                    Family::S => bounds::build_pa_s(&ctx, d, &opts),
                    Family::T => bounds::build_pa_t(&ctx, d, &opts),
                };
                match built.and_then(|pa| {
                    pa.write(&out)?;
                    Ok(pa)
                }) {
                    Ok(pa) => {
                        println!(
                            "{}",
                            serde_json::json!({
                                "q": pa.q, "d": pa.d, "n": pa.n,
                                "family": pa.family.to_string(),
                                "rows": pa.rows.len(),
                                "min_dist_claim": pa.min_dist_claim,
                            })
                        );
                        ExitCode::SUCCESS
                    }
                    Err(e) => fail(bounds_exit(&e), &e.to_string()),
                }
            }
            PaAction::Verify {
                file,
                min_dist,
                mode,
                samples,
            } => {
                let pa = match PermArray::read(&file) {
                    Ok(pa) => pa,
                    Err(e) => return fail(bounds_exit(&e), &e.to_string()),
                };
                let mode = match mode.as_str() {
                    "exhaustive" => VerifyMode::Exhaustive,
                    "sample" => VerifyMode::Sample(samples),
                    "auto" => bounds::default_verify_mode(pa.rows.len()),
                    other => return fail(EXIT_USAGE, &format!("unknown mode {other:?}")),
                };
                match bounds::verify_pa(&pa, mode) {
                    Ok(rep) => {
                        println!("{}", serde_json::to_string(&rep).expect("serializable"));
                        let ok = rep.min_distance.map_or(true, |m| m >= min_dist);
                        if ok {
                            ExitCode::SUCCESS
                        } else {
                            let (i, j) = rep.witness.expect("violation has a witness");
                            eprintln!(
                                "distance {} below {} at row pair ({}, {})",
                                rep.min_distance.expect("violation has a distance"),
                                min_dist,
                                i,
                                j
                            );
                            ExitCode::from(EXIT_VERIFY)
                        }
                    }
                    Err(e) => fail(bounds_exit(&e), &e.to_string()),
                }
            }
        },
        Command::Tables {
            table,
            q,
            cache,
            format,
            allow_conjectures,
            run,
        } => {
            let Some(table) = TableId::parse(&table) else {
                return fail(EXIT_USAGE, &format!("unknown table {table:?}"));
            };
            if q.is_empty() {
                return fail(EXIT_USAGE, "--q requires at least one field order");
            }
            init_threads(run.threads);
            let mut opts = BoundOptions::default();
            run.apply(&mut opts.census);
            opts.allow_conjectures = allow_conjectures;
            opts.cache = default_cache(cache);
            match bounds::emit_table(table, &q, &opts) {
                Ok(rows) => {
                    match format.as_str() {
                        "csv" => print!("{}", bounds::table_to_csv(table, &rows)),
                        "json" => {
                            println!("{}", serde_json::to_string(&rows).expect("serializable"))
                        }
                        other => return fail(EXIT_USAGE, &format!("unknown format {other:?}")),
                    }
                    ExitCode::SUCCESS
                }
                Err(e) => fail(bounds_exit(&e), &e.to_string()),
            }
        }
    }
}
