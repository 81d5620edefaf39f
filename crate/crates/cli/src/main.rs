use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lambdaq::compile::{CompiledAutomaton, DecodeMode, ScalingMode};
use lambdaq::harness::{self, ComparisonReport, HarnessError, RunOptions};
use lambdaq::manifest::Manifest;
use lambdaq::pqca::{self, Configuration, PqcaFile, PqcaSpec, SuperposedState};
use lambdaq::reduce::reduce_with;
use lambdaq::{canonicalize, parse_term, Term};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const EXIT_PARSE: u8 = 1;
const EXIT_VALIDATION: u8 = 2;
const EXIT_FUEL: u8 = 3;
const EXIT_MISMATCH: u8 = 4;

#[derive(Parser)]
#[command(name = "lambdaq", version, about = "Lambda-q reduction and automaton simulation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate an automaton file exactly and print the final state.
    PqcaRun {
        spec: PathBuf,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Compile an automaton file into a term manifest.
    Compile {
        spec: PathBuf,
        /// Output path; standard output when omitted.
        #[arg(short, long)]
        out: Option<PathBuf>,
        #[arg(long)]
        lcm_scaling: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Reduce a term file to normal form.
    Reduce {
        term: PathBuf,
        /// Parallel-step budget.
        #[arg(long, default_value_t = harness::DEFAULT_FUEL)]
        steps: u64,
        /// Print every intermediate term.
        #[arg(long)]
        trace: bool,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Run the simulator and the compiled terms side by side and compare.
    Compare {
        /// Automaton file. Without it, `--seed` draws random automata.
        spec: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, value_enum, default_value_t = Decode::Ledger)]
        decode_mode: Decode,
        #[arg(long)]
        lcm_scaling: bool,
        #[arg(long, default_value_t = harness::DEFAULT_FUEL)]
        steps: u64,
        /// Seed for random automata when no file is given.
        #[arg(long)]
        seed: Option<u64>,
        /// Number of random automata.
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Parallel steps of the compiled run for several step counts.
    Bench {
        spec: PathBuf,
        /// Comma-separated step counts.
        #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,5")]
        ks: Vec<usize>,
        #[arg(long)]
        lcm_scaling: bool,
        #[arg(long, default_value_t = harness::DEFAULT_FUEL)]
        steps: u64,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args, Clone, Copy)]
struct Common {
    /// Reject automata whose local matrix is not unitary.
    #[arg(long, conflicts_with = "allow_nonunitary")]
    strict_unitary: bool,
    /// Accept non-unitary matrices without a warning.
    #[arg(long)]
    allow_nonunitary: bool,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq)]
enum Format {
    Text,
    Machine,
}

#[derive(ValueEnum, Clone, Copy)]
enum Decode {
    /// Divide by the tracked scale.
    Ledger,
    /// Divide by the sum of the counts.
    #[value(name = "paper", alias = "count-total")]
    CountTotal,
}

impl From<Decode> for DecodeMode {
    fn from(d: Decode) -> Self {
        match d {
            Decode::Ledger => DecodeMode::Ledger,
            Decode::CountTotal => DecodeMode::CountTotal,
        }
    }
}

fn scaling(lcm: bool) -> ScalingMode {
    if lcm {
        ScalingMode::Lcm
    } else {
        ScalingMode::Product
    }
}

/// Failure carrying its exit code.
struct Failure(u8, String);

type Outcome = Result<String, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure(EXIT_PARSE, format!("{}: {e}", path.display())))
}

/// Parses and validates an automaton file. Returns the file with a default
/// all-zero initial configuration filled in, and any warnings.
fn load_spec(path: &Path, common: Common) -> Result<(PqcaFile, Vec<String>), Failure> {
    let src = read(path)?;
    let mut file = pqca::parse_pqca(&src)
        .map_err(|e| Failure(EXIT_PARSE, format!("{}: {e}", path.display())))?;
    let report = pqca::validate(&file.spec);
    let init = file
        .init
        .get_or_insert_with(|| SuperposedState::basis(Configuration(vec![0; file.spec.width])));
    let mut errors = report.errors.clone();
    errors.extend(pqca::validate_state(init, &file.spec));
    if init.is_empty() {
        errors.push("initial state is empty".into());
    }
    if common.strict_unitary && !report.unitary {
        errors.push("local matrix is not unitary".into());
    }
    if !errors.is_empty() {
        return Err(Failure(EXIT_VALIDATION, errors.join("\n")));
    }
    let warnings = if common.allow_nonunitary {
        Vec::new()
    } else {
        report.warnings
    };
    Ok((file, warnings))
}

fn print_warnings(warnings: &[String]) {
    for w in warnings {
        eprintln!("warning: {w}");
    }
}

fn state_lines(state: &SuperposedState, format: Format, out: &mut String) {
    for (c, a) in state.iter() {
        match format {
            Format::Text => writeln!(out, "{a} {c}"),
            Format::Machine => writeln!(out, "config={c} amplitude={a}"),
        }
        .expect("write to string");
    }
}

fn pqca_run(spec: &Path, k: usize, common: Common) -> Outcome {
    let (file, warnings) = load_spec(spec, common)?;
    print_warnings(&warnings);
    let init = file.init.expect("filled in by load_spec");
    let state = pqca::run(&file.spec, &init, k);
    let mut out = String::new();
    state_lines(&state, common.format, &mut out);
    let p = pqca::acceptance_probability(&state, &file.spec);
    match common.format {
        Format::Text => writeln!(out, "acceptance probability {p}"),
        Format::Machine => writeln!(out, "acceptance={p}"),
    }
    .expect("write to string");
    Ok(out)
}

fn compile(spec: &Path, out_path: Option<&Path>, lcm: bool, common: Common) -> Outcome {
    let (file, warnings) = load_spec(spec, common)?;
    print_warnings(&warnings);
    let mode = scaling(lcm);
    let compiled = CompiledAutomaton::new(&file.spec, mode);
    let (d, _) = lambdaq::compile::scale_superposition(file.init.as_ref().expect("filled in"));
    let text = Manifest::from_compiled(&compiled, mode, d).render();
    match out_path {
        Some(p) => {
            std::fs::write(p, &text)
                .map_err(|e| Failure(EXIT_PARSE, format!("{}: {e}", p.display())))?;
            Ok(format!("wrote {}\n", p.display()))
        }
        None => Ok(text),
    }
}

fn display_result(term: &Term) -> String {
    if term.is_superposition() {
        canonicalize(term).to_string()
    } else {
        term.to_string()
    }
}

fn reduce(path: &Path, fuel: u64, trace: bool, format: Format) -> Outcome {
    let src = read(path)?;
    let term = parse_term(&src)
        .map_err(|e| Failure(EXIT_PARSE, format!("{}: {e}", path.display())))?;
    let mut out = String::new();
    let result = reduce_with(&term, fuel, |n, t| {
        if trace {
            match format {
                Format::Text => writeln!(out, "step {n}: {t}"),
                Format::Machine => writeln!(out, "step={n} term={t}"),
            }
            .expect("write to string");
        }
    });
    let final_term = display_result(&result.final_term);
    match format {
        Format::Text => writeln!(
            out,
            "{final_term}\nsteps {}\nwork {}",
            result.steps, result.work
        ),
        Format::Machine => writeln!(
            out,
            "result={final_term}\nsteps={}\nwork={}\nfuel_exhausted={}",
            result.steps, result.work, result.fuel_exhausted
        ),
    }
    .expect("write to string");
    if result.fuel_exhausted {
        return Err(Failure(
            EXIT_FUEL,
            format!("{out}fuel exhausted after {} parallel steps", result.steps),
        ));
    }
    Ok(out)
}

fn render_report(r: &ComparisonReport, format: Format, out: &mut String) {
    match format {
        Format::Text => {
            writeln!(out, "spec {}", r.spec_id).unwrap();
            writeln!(out, "k {}", r.k).unwrap();
            writeln!(out, "equal {}", r.equal).unwrap();
            writeln!(out, "parallel steps {}", r.parallel_steps).unwrap();
            writeln!(out, "work {}", r.work).unwrap();
            writeln!(out, "scale {}", r.ledger.total_scale()).unwrap();
            writeln!(out, "reference:").unwrap();
            state_lines(&r.left, format, out);
            writeln!(out, "compiled:").unwrap();
            state_lines(&r.right, format, out);
            for d in &r.diffs {
                writeln!(out, "diff {} reference {} compiled {}", d.config, d.reference, d.compiled)
                    .unwrap();
            }
            writeln!(out, "wall time {:.3?}", r.wall_time).unwrap();
        }
        Format::Machine => {
            writeln!(
                out,
                "spec={} k={} equal={} parallel_steps={} work={} scale={}",
                r.spec_id,
                r.k,
                r.equal,
                r.parallel_steps,
                r.work,
                r.ledger.total_scale()
            )
            .unwrap();
            for d in &r.diffs {
                writeln!(
                    out,
                    "diff config={} reference={} compiled={}",
                    d.config, d.reference, d.compiled
                )
                .unwrap();
            }
        }
    }
}

fn harness_failure(e: HarnessError) -> Failure {
    match e {
        HarnessError::FuelExhausted { .. } => Failure(EXIT_FUEL, e.to_string()),
        HarnessError::Compile(_) => Failure(EXIT_MISMATCH, e.to_string()),
    }
}

#[allow(clippy::too_many_arguments)]
fn compare(
    spec: Option<&Path>,
    k: usize,
    decode: Decode,
    lcm: bool,
    fuel: u64,
    seed: Option<u64>,
    count: usize,
    common: Common,
) -> Outcome {
    let options = RunOptions {
        scaling: scaling(lcm),
        decode: decode.into(),
        fuel,
    };
    let cases: Vec<(String, PqcaSpec, SuperposedState)> = match (spec, seed) {
        (Some(path), _) => {
            let (file, warnings) = load_spec(path, common)?;
            print_warnings(&warnings);
            let init = file.init.expect("filled in");
            vec![(path.display().to_string(), file.spec, init)]
        }
        (None, Some(seed)) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..count)
                .map(|i| {
                    let spec = harness::random_spec(&mut rng, 4, 4);
                    let c = harness::random_configuration(&spec, &mut rng);
                    (format!("random-{seed}-{i}"), spec, SuperposedState::basis(c))
                })
                .collect()
        }
        (None, None) => {
            return Err(Failure(
                EXIT_PARSE,
                "compare needs an automaton file or --seed".into(),
            ))
        }
    };
    let mut out = String::new();
    let mut all_equal = true;
    for (id, spec, init) in cases {
        let clock = Instant::now();
        let t = harness::trajectory(&spec, &init, k, options).map_err(harness_failure)?;
        let report = harness::report_from(&id, k, &t, clock.elapsed());
        all_equal &= report.equal;
        render_report(&report, common.format, &mut out);
    }
    if all_equal {
        Ok(out)
    } else {
        Err(Failure(EXIT_MISMATCH, out))
    }
}

fn bench(spec: &Path, ks: &[usize], lcm: bool, fuel: u64, common: Common) -> Outcome {
    let (file, warnings) = load_spec(spec, common)?;
    print_warnings(&warnings);
    let options = RunOptions {
        scaling: scaling(lcm),
        fuel,
        ..RunOptions::default()
    };
    let init = file.init.expect("filled in");
    let rows = harness::bench(&file.spec, &init, ks, options).map_err(harness_failure)?;
    let mut out = String::new();
    if common.format == Format::Text {
        writeln!(out, "{:>4} {:>12} {:>12} {:>12}", "k", "steps", "work", "wall").unwrap();
    }
    for r in &rows {
        match common.format {
            Format::Text => writeln!(
                out,
                "{:>4} {:>12} {:>12} {:>12.3?}",
                r.k, r.steps, r.work, r.wall_time
            ),
            Format::Machine => writeln!(out, "k={} steps={} work={}", r.k, r.steps, r.work),
        }
        .unwrap();
    }
    let points: Vec<(f64, f64)> = rows.iter().map(|r| (r.k as f64, r.steps as f64)).collect();
    if points.len() >= 2 {
        let fit = harness::linear_fit(&points);
        match common.format {
            Format::Text => writeln!(
                out,
                "fit steps = {:.3} k + {:.3}, rms residual {:.3}, relative {:.5}",
                fit.slope, fit.intercept, fit.rms_residual, fit.relative_residual
            ),
            Format::Machine => writeln!(
                out,
                "slope={:.6} intercept={:.6} rms_residual={:.6} relative_residual={:.6}",
                fit.slope, fit.intercept, fit.rms_residual, fit.relative_residual
            ),
        }
        .unwrap();
    }
    Ok(out)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::PqcaRun { spec, k, common } => pqca_run(spec, *k, *common),
        Command::Compile {
            spec,
            out,
            lcm_scaling,
            common,
        } => compile(spec, out.as_deref(), *lcm_scaling, *common),
        Command::Reduce {
            term,
            steps,
            trace,
            format,
        } => reduce(term, *steps, *trace, *format),
        Command::Compare {
            spec,
            k,
            decode_mode,
            lcm_scaling,
            steps,
            seed,
            count,
            common,
        } => compare(
            spec.as_deref(),
            *k,
            *decode_mode,
            *lcm_scaling,
            *steps,
            *seed,
            *count,
            *common,
        ),
        Command::Bench {
            spec,
            ks,
            lcm_scaling,
            steps,
            common,
        } => bench(spec, ks, *lcm_scaling, *steps, *common),
    };
    match outcome {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(Failure(code, message)) => {
            if code == EXIT_FUEL || code == EXIT_MISMATCH {
                print!("{message}");
                if !message.ends_with('\n') {
                    println!();
                }
            } else {
                eprintln!("error: {message}");
            }
            ExitCode::from(code)
        }
    }
}
