//! The `cdtwist` binary: twist arithmetic for Cayley-Dickson algebras from
//! the shell.
//!
//! Exit codes: 0 on success, 1 when a verification or self-check fails,
//! 2 on usage or input errors.

mod vector_file;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use cdtwist::algebra::{BasisIndex, ProductVariant, Sign};
use cdtwist::automaton::{twist, walk_states};
use cdtwist::kernel::{multiply_fast, TwistCache};
use cdtwist::oracle::{multiply, oracle_twist, DenseVector};
use cdtwist::periodicity::{canonicalize, ReductionTrace};
use cdtwist::verify::{self, VerifyOptions};

#[derive(Parser)]
#[command(
    name = "cdtwist",
    version,
    about = "Twist signs, multiplication, and reductions for Cayley-Dickson algebras",
    long_about = "Computes the sign omega(p, q) in e_p e_q = omega(p, q) e_{p XOR q} for all \
                  eight doubling products, multiplies full vectors, reduces index pairs to \
                  canonical form, and runs the library's verification battery."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the twist sign of a basis pair
    Twist {
        /// First basis index
        #[arg(long)]
        p: u64,
        /// Second basis index
        #[arg(long)]
        q: u64,
        /// Doubling product (P0-P3, T0-T3, case-insensitive)
        #[arg(long, value_parser = parse_variant)]
        variant: ProductVariant,
        /// Evaluation route
        #[arg(long, value_enum, default_value_t = TwistEngine::Auto)]
        engine: TwistEngine,
        /// Narrate the doublet path and the automaton states it visits
        #[arg(long)]
        trace: bool,
    },
    /// Print the omega sign table for all pairs below 2^bits
    Table {
        /// Table covers 0 <= p, q < 2^bits
        #[arg(long)]
        bits: u32,
        #[arg(long, value_parser = parse_variant)]
        variant: ProductVariant,
        #[arg(long, value_enum, default_value_t = TableFormat::Pretty)]
        format: TableFormat,
    },
    /// Reduce a pair to its canonical form with the same twist
    Reduce {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        q: u64,
    },
    /// Multiply two vector files and print the product vector
    Multiply {
        /// Left operand (JSON vector file)
        #[arg(long)]
        lhs: PathBuf,
        /// Right operand (JSON vector file)
        #[arg(long)]
        rhs: PathBuf,
        #[arg(long, value_parser = parse_variant)]
        variant: ProductVariant,
        #[arg(long, value_enum, default_value_t = MultiplyEngine::Fast)]
        engine: MultiplyEngine,
        /// Run both engines and fail when they disagree beyond 1e-12
        #[arg(long)]
        check: bool,
    },
    /// Run the library's invariant suites and report per-suite counts
    Verify {
        /// Exhaustive suites cover indices below 2^max_bits (at most 10)
        #[arg(long, default_value_t = 7)]
        max_bits: u32,
        /// Comma-separated products to exercise (default: all eight)
        #[arg(long)]
        variants: Option<String>,
        /// Corrupt one interior sign row before running, to prove the
        /// harness can fail (debug builds only)
        #[cfg(debug_assertions)]
        #[arg(long, hide = true)]
        inject_fault_i1: bool,
    },
    /// Time the multiplication kernel and raw twist throughput
    Bench {
        /// Vectors live in C_bits (at most 14)
        #[arg(long)]
        bits: u32,
        /// Timed repetitions per configuration
        #[arg(long, default_value_t = 3)]
        reps: u32,
        #[arg(long, value_parser = parse_variant, default_value = "P3")]
        variant: ProductVariant,
        #[arg(long, value_enum, default_value_t = BenchFormat::Pretty)]
        format: BenchFormat,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TwistEngine {
    /// Canonicalize, then walk the automaton
    Auto,
    /// Walk the automaton directly
    Automaton,
    /// Multiply basis vectors with the doubling formulas (small sizes only)
    Oracle,
    /// Canonicalize, then walk the automaton on the canonical pair
    Reduced,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MultiplyEngine {
    /// XOR-indexed kernel driven by the automaton
    Fast,
    /// Recursive doubling-formula reference
    Oracle,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TableFormat {
    Pretty,
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BenchFormat {
    Pretty,
    Json,
}

fn parse_variant(s: &str) -> Result<ProductVariant, String> {
    s.parse::<ProductVariant>().map_err(|err| err.to_string())
}

/// Failures that map onto the exit-code contract.
enum CliError {
    /// Exit 2: the invocation or its input files are unusable.
    Usage(String),
    /// Exit 1: the tool ran, and what it checked does not hold.
    Verification(String),
}

impl CliError {
    fn usage(msg: impl Into<String>) -> Self {
        Self::Usage(msg.into())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Verification(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(1)
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Twist {
            p,
            q,
            variant,
            engine,
            trace,
        } => cmd_twist(p, q, variant, engine, trace),
        Command::Table {
            bits,
            variant,
            format,
        } => cmd_table(bits, variant, format),
        Command::Reduce { p, q } => cmd_reduce(p, q),
        Command::Multiply {
            lhs,
            rhs,
            variant,
            engine,
            check,
        } => cmd_multiply(&lhs, &rhs, variant, engine, check),
        Command::Verify {
            max_bits,
            variants,
            #[cfg(debug_assertions)]
            inject_fault_i1,
        } => {
            #[cfg(not(debug_assertions))]
            let inject_fault_i1 = false;
            cmd_verify(max_bits, variants.as_deref(), inject_fault_i1)
        }
        Command::Bench {
            bits,
            reps,
            variant,
            format,
        } => cmd_bench(bits, reps, variant, format),
    }
}

fn index(value: u64, name: &str) -> Result<BasisIndex, CliError> {
    BasisIndex::try_new(value)
        .ok_or_else(|| CliError::usage(format!("{name} = {value} does not fit in 63 bits")))
}

// ---------------------------------------------------------------------------
// twist

fn cmd_twist(
    p: u64,
    q: u64,
    variant: ProductVariant,
    engine: TwistEngine,
    trace: bool,
) -> Result<(), CliError> {
    let p = index(p, "p")?;
    let q = index(q, "q")?;

    let sign = match engine {
        TwistEngine::Automaton => {
            if trace {
                print_walk_trace(p, q, variant);
            }
            twist(p, q, variant)
        }
        TwistEngine::Oracle => {
            let level = p.bit_length().max(q.bit_length());
            if level > 20 {
                return Err(CliError::usage(format!(
                    "oracle engine handles at most 20-bit indices, ({p}, {q}) needs {level}"
                )));
            }
            if trace {
                println!("engine: oracle at level {level}");
                println!("doublets: {}", path_display(p, q));
            }
            oracle_twist(p, q, variant)
        }
        TwistEngine::Auto | TwistEngine::Reduced => {
            let reduction = canonicalize(p, q);
            if trace {
                print_reduction_steps(&reduction);
                let (cp, cq) = reduction.canonical;
                print_walk_trace(cp, cq, variant);
            }
            let (cp, cq) = reduction.canonical;
            reduction.total_sign * twist(cp, cq, variant)
        }
    };
    println!("{sign}");
    Ok(())
}

fn path_display(p: BasisIndex, q: BasisIndex) -> String {
    let path = cdtwist::algebra::shuffle_doublets(p, q);
    if path.is_empty() {
        "(empty)".to_owned()
    } else {
        path.to_string()
    }
}

fn print_walk_trace(p: BasisIndex, q: BasisIndex, variant: ProductVariant) {
    let (wp, wq, steps) = walk_states(p, q, variant);
    if variant.is_transpose() {
        println!(
            "transpose product {variant}: walking the swapped pair [{wp};{wq}] under {}",
            variant.transpose()
        );
    }
    println!("pair: [{wp};{wq}]");
    println!("doublets: {}", path_display(wp, wq));
    let mut line = String::from("walk: +C");
    for (doublet, state) in &steps {
        line.push_str(&format!(" -{doublet}-> {state}"));
    }
    println!("{line}");
}

// ---------------------------------------------------------------------------
// table

fn cmd_table(bits: u32, variant: ProductVariant, format: TableFormat) -> Result<(), CliError> {
    let cap = match format {
        TableFormat::Pretty => 8,
        TableFormat::Csv | TableFormat::Json => 12,
    };
    if bits > cap {
        return Err(CliError::usage(format!(
            "bits = {bits} exceeds the cap of {cap} for this format"
        )));
    }
    let n = 1u64 << bits;
    let sign_at = |p: u64, q: u64| twist(BasisIndex::new(p), BasisIndex::new(q), variant);

    match format {
        TableFormat::Pretty => {
            println!("omega table for {variant}, bits = {bits} ({n} x {n})");
            let width = format!("{}", n - 1).len().max(3);
            let mut header = format!("{:>width$}", "p\\q");
            for q in 0..n {
                header.push_str(&format!(" {q:>width$}"));
            }
            println!("{header}");
            for p in 0..n {
                let mut row = format!("{p:>width$}");
                for q in 0..n {
                    row.push_str(&format!(" {:>width$}", sign_at(p, q).to_string()));
                }
                println!("{row}");
            }
        }
        TableFormat::Csv => {
            let mut header = String::from("p\\q");
            for q in 0..n {
                header.push_str(&format!(",{q}"));
            }
            println!("{header}");
            for p in 0..n {
                let mut row = format!("{p}");
                for q in 0..n {
                    row.push_str(&format!(",{}", sign_at(p, q)));
                }
                println!("{row}");
            }
        }
        TableFormat::Json => {
            let rows: Vec<String> = (0..n)
                .map(|p| {
                    let cells: Vec<String> = (0..n)
                        .map(|q| sign_at(p, q).value().to_string())
                        .collect();
                    format!("[{}]", cells.join(","))
                })
                .collect();
            println!(
                "{{\"bits\":{bits},\"variant\":\"{variant}\",\"matrix\":[{}]}}",
                rows.join(",")
            );
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// reduce

fn cmd_reduce(p: u64, q: u64) -> Result<(), CliError> {
    let p = index(p, "p")?;
    let q = index(q, "q")?;
    let trace = canonicalize(p, q);
    let (cp, cq) = trace.canonical;
    println!("canonical: {cp} {cq}");
    println!("sign: {}", trace.total_sign);
    print_reduction_steps(&trace);
    if trace.is_terminal_case() {
        if cp == cq && !cp.is_zero() {
            println!("note: omega = -1 for every product (p = q > 0)");
        } else {
            println!("note: omega = +1 for every product (identity index involved)");
        }
    }
    Ok(())
}

fn print_reduction_steps(trace: &ReductionTrace) {
    if trace.steps.is_empty() {
        println!("steps: (none)");
        return;
    }
    println!("steps:");
    for (i, step) in trace.steps.iter().enumerate() {
        let octave = if step.rule == cdtwist::periodicity::ReductionRule::SwapAntisym {
            "     ".to_owned()
        } else {
            format!("[N={}]", step.octave_n)
        };
        println!(
            "  {}. {:<12} {octave}  ({}, {}) -> ({}, {})  sign {}",
            i + 1,
            step.rule.name(),
            step.before.0,
            step.before.1,
            step.after.0,
            step.after.1,
            step.sign_factor
        );
    }
}

// ---------------------------------------------------------------------------
// multiply

fn cmd_multiply(
    lhs: &std::path::Path,
    rhs: &std::path::Path,
    variant: ProductVariant,
    engine: MultiplyEngine,
    check: bool,
) -> Result<(), CliError> {
    let x = vector_file::read(lhs).map_err(CliError::Usage)?;
    let y = vector_file::read(rhs).map_err(CliError::Usage)?;
    if x.level() != y.level() {
        return Err(CliError::usage(format!(
            "operand levels differ: {} is level {}, {} is level {}",
            lhs.display(),
            x.level(),
            rhs.display(),
            y.level()
        )));
    }
    let level = x.level();
    let level_cap = |cap: u32, engine: &str| {
        if level > cap {
            Err(CliError::usage(format!(
                "{engine} engine handles levels up to {cap}, operands are level {level}"
            )))
        } else {
            Ok(())
        }
    };

    let fast = || -> Result<DenseVector, CliError> {
        level_cap(20, "fast")?;
        multiply_fast(&x, &y, variant, None)
            .map_err(|err| CliError::usage(err.to_string()))
    };
    let oracle = || -> Result<DenseVector, CliError> {
        level_cap(12, "oracle")?;
        multiply(&x, &y, variant).map_err(|err| CliError::usage(err.to_string()))
    };

    let product = match engine {
        MultiplyEngine::Fast => fast()?,
        MultiplyEngine::Oracle => oracle()?,
    };
    if check {
        let other = match engine {
            MultiplyEngine::Fast => oracle()?,
            MultiplyEngine::Oracle => fast()?,
        };
        let diff = product.max_abs_diff(&other);
        if diff > 1e-12 {
            return Err(CliError::Verification(format!(
                "fast and oracle products disagree by {diff:e} at level {level} under {variant}"
            )));
        }
    }
    println!("{}", vector_file::render(&product));
    Ok(())
}

// ---------------------------------------------------------------------------
// verify

fn cmd_verify(
    max_bits: u32,
    variants: Option<&str>,
    inject_fault_i1: bool,
) -> Result<(), CliError> {
    if max_bits > 10 {
        return Err(CliError::usage(format!(
            "max-bits = {max_bits} exceeds the cap of 10"
        )));
    }
    let variants = match variants {
        None => ProductVariant::ALL.to_vec(),
        Some(list) => {
            let mut parsed = Vec::new();
            for name in list.split(',') {
                parsed.push(
                    name.trim()
                        .parse::<ProductVariant>()
                        .map_err(|err| CliError::usage(err.to_string()))?,
                );
            }
            parsed
        }
    };

    let mut options = VerifyOptions {
        max_bits,
        variants,
        ..VerifyOptions::default()
    };
    if inject_fault_i1 {
        options.table = cdtwist::automaton::TransitionTable::standard()
            .with_interior_row(1, [Sign::Plus, Sign::Plus, Sign::Plus, Sign::Plus]);
        println!("fault injection: interior row 1 corrupted; expect failures");
    }

    let report = verify::run(&options);
    for suite in &report.suites {
        println!(
            "suite {:<32} cases {:>10}  failures {:>6}  {}",
            suite.name,
            suite.cases,
            suite.failures,
            if suite.passed() { "PASS" } else { "FAIL" }
        );
        if let Some(detail) = &suite.first_failure {
            println!("      first failure: {detail}");
        }
    }
    let failing: Vec<&str> = report
        .suites
        .iter()
        .filter(|s| !s.passed())
        .map(|s| s.name)
        .collect();
    if failing.is_empty() {
        println!(
            "verify: PASS ({} suites, {} cases)",
            report.suites.len(),
            report.total_cases()
        );
        Ok(())
    } else {
        println!(
            "verify: FAIL ({} of {} suites: {})",
            failing.len(),
            report.suites.len(),
            failing.join(", ")
        );
        Err(CliError::Verification(format!(
            "{} suite(s) reported violations",
            failing.len()
        )))
    }
}

// ---------------------------------------------------------------------------
// bench

fn cmd_bench(
    bits: u32,
    reps: u32,
    variant: ProductVariant,
    format: BenchFormat,
) -> Result<(), CliError> {
    if bits > 14 {
        return Err(CliError::usage(format!(
            "bits = {bits} exceeds the cap of 14"
        )));
    }
    if reps == 0 {
        return Err(CliError::usage("reps must be at least 1"));
    }

    use rand_chacha_shim::seeded_vector;
    let n = 1u64 << bits;
    let x = seeded_vector(0xbe9c_0001, bits);
    let y = seeded_vector(0xbe9c_0002, bits);

    let mut uncached_seconds = Vec::new();
    let mut baseline: Option<DenseVector> = None;
    for _ in 0..reps {
        let started = Instant::now();
        let product = multiply_fast(&x, &y, variant, None)
            .map_err(|err| CliError::usage(err.to_string()))?;
        uncached_seconds.push(started.elapsed().as_secs_f64());
        baseline.get_or_insert(product);
    }
    let baseline = baseline.expect("at least one repetition");

    let cache = TwistCache::new(variant);
    let mut cached_seconds = Vec::new();
    let mut identical = true;
    for _ in 0..reps {
        let started = Instant::now();
        let product = multiply_fast(&x, &y, variant, Some(&cache))
            .map_err(|err| CliError::usage(err.to_string()))?;
        cached_seconds.push(started.elapsed().as_secs_f64());
        identical &= product == baseline;
    }

    // Raw automaton throughput over a deterministic pair stream.
    let eval_count = 1u64 << 20;
    let mask = n - 1;
    let started = Instant::now();
    let mut checksum = 0i64;
    let mut state = 0x9e37_79b9_7f4a_7c15u64;
    for _ in 0..eval_count {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let p = (state >> 20) & mask;
        let q = (state >> 40) & mask;
        checksum += twist(BasisIndex::new(p), BasisIndex::new(q), variant).value() as i64;
    }
    let twist_elapsed = started.elapsed().as_secs_f64();
    let throughput = eval_count as f64 / twist_elapsed;

    let omega_per_product = n * n;
    match format {
        BenchFormat::Pretty => {
            println!("bench: C_{bits} (n = {n}), {variant}, {reps} reps");
            println!("omega evaluations per uncached product: {omega_per_product}");
            println!("uncached seconds: {}", join_seconds(&uncached_seconds));
            println!(
                "cached seconds:   {} (cache entries: {})",
                join_seconds(&cached_seconds),
                cache.len()
            );
            println!("automaton throughput: {throughput:.3e} twist evals/s (checksum {checksum})");
            println!("outputs identical: {identical}");
        }
        BenchFormat::Json => {
            let fmt = vector_file::format_f64;
            let list = |values: &[f64]| {
                values.iter().map(|v| fmt(*v)).collect::<Vec<_>>().join(",")
            };
            println!(
                "{{\"bits\":{bits},\"n\":{n},\"variant\":\"{variant}\",\"reps\":{reps},\
                 \"omega_evals_per_product\":{omega_per_product},\
                 \"uncached_seconds\":[{}],\"cached_seconds\":[{}],\
                 \"cache_entries\":{},\"automaton_evals_per_second\":{},\
                 \"outputs_identical\":{identical}}}",
                list(&uncached_seconds),
                list(&cached_seconds),
                cache.len(),
                fmt(throughput)
            );
        }
    }
    if identical {
        Ok(())
    } else {
        Err(CliError::Verification(
            "cached and uncached products differ".to_owned(),
        ))
    }
}

fn join_seconds(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| format!("{v:.6}"))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Deterministic vectors for benching without pulling a RNG dependency in.
mod rand_chacha_shim {
    use cdtwist::oracle::DenseVector;

    pub fn seeded_vector(seed: u64, level: u32) -> DenseVector {
        let mut state = seed | 1;
        let coefficients = (0..1usize << level)
            .map(|_| {
                state = state
                    .wrapping_mul(6364136223846793005)
                    .wrapping_add(1442695040888963407);
                ((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
            })
            .collect();
        DenseVector::from_coefficients(coefficients).expect("power-of-two length")
    }
}
