use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use circuit_descartes::exact::{format_rational, parse_rational, BigRat};
use circuit_descartes::forge::{
    family_prs, family_prs_modified, stabilize_eps, FlipVariant, Instance,
};
use circuit_descartes::gale::analyze_gale;
use circuit_descartes::io::{parse_instance, serialize_instance};
use circuit_descartes::report::{
    analyze, count, fuzz, verify, CountReport, FuzzSpec, FuzzSummary, RunReport, Verdict,
};
use circuit_descartes::Error;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

mod svg;

#[derive(Parser)]
#[command(name = "circuit-descartes", version, about = "Sign-rule bounds and exact positive-solution counts for circuit systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Relation, volumes, dual ordering and bounds, without counting.
    Analyze {
        #[command(flatten)]
        input: Input,
        /// Also write a diagram of the dual vectors.
        #[arg(long, value_name = "FILE")]
        svg: Option<PathBuf>,
    },
    /// Exact number of positive solutions.
    Count(Input),
    /// Bounds and exact count, with a verdict. Exits 1 on a violation.
    Verify {
        #[command(flatten)]
        input: Input,
        /// Additionally require the count to be at most this value.
        #[arg(long, value_name = "N")]
        max_count: Option<usize>,
    },
    /// Emit an instance of the optimal family or one of its sign-flipped variants.
    Family(FamilyArgs),
    /// Verify seeded random instances. Exits 1 on any violation.
    Fuzz(FuzzArgs),
}

#[derive(Args)]
struct Input {
    #[arg(short, long, value_name = "FILE")]
    input: PathBuf,
    /// Machine-readable output.
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyKind {
    Prs,
    Modified,
}

#[derive(Clone, Copy, ValueEnum)]
enum Variant {
    Alternating,
    Single,
}

#[derive(Args)]
struct FamilyArgs {
    kind: FamilyKind,
    #[arg(long)]
    n: usize,
    /// Target count minus one; required for `modified`.
    #[arg(long)]
    r: Option<usize>,
    #[arg(long, default_value = "1/4")]
    eps: String,
    #[arg(long, value_enum, default_value_t = Variant::Alternating)]
    variant: Variant,
    /// Halve eps until the count no longer changes.
    #[arg(long)]
    stabilize: bool,
    #[arg(short, long, value_name = "FILE")]
    output: Option<PathBuf>,
    /// Run verify on the emitted instance.
    #[arg(long)]
    verify: bool,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct FuzzArgs {
    #[arg(long)]
    n_max: usize,
    #[arg(long)]
    trials: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long)]
    require_halfspace: bool,
    #[arg(long)]
    json: bool,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Analyze { input, svg } => {
            let instance = read_instance(&input.input)?;
            let report = analyze(&instance)?;
            if let Some(path) = svg {
                let g = analyze_gale(&instance.coefficients);
                write_file(&path, &svg::gale_diagram(&g, &instance.label))?;
            }
            emit(&report, input.json, render_run);
            Ok(ExitCode::SUCCESS)
        }
        Command::Count(input) => {
            let report = count(&read_instance(&input.input)?)?;
            emit(&report, input.json, render_count);
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { input, max_count } => {
            let mut report = verify(&read_instance(&input.input)?)?;
            if let Some(cap) = max_count {
                report.assert_at_most(cap);
            }
            emit(&report, input.json, render_run);
            Ok(verdict_code(&report))
        }
        Command::Family(args) => family(args),
        Command::Fuzz(args) => {
            let summary = fuzz(&FuzzSpec {
                n_max: args.n_max,
                trials: args.trials,
                seed: args.seed,
                require_halfspace: args.require_halfspace,
                jobs: args.jobs,
            })?;
            emit(&summary, args.json, render_fuzz);
            Ok(if summary.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
    }
}

fn family(args: FamilyArgs) -> Result<ExitCode, Error> {
    let eps = parse_rational(&args.eps)?;
    let variant = match args.variant {
        Variant::Alternating => FlipVariant::Alternating,
        Variant::Single => FlipVariant::Single,
    };
    let build = |eps: &BigRat| -> Result<Instance, Error> {
        match args.kind {
            FamilyKind::Prs => family_prs(args.n, eps),
            FamilyKind::Modified => {
                let r = args
                    .r
                    .ok_or_else(|| Error::Domain("--r is required for the modified family".into()))?;
                family_prs_modified(args.n, r, eps, variant)
            }
        }
    };
    let instance = if args.stabilize {
        let found = stabilize_eps(&eps, 20, build)?;
        eprintln!("stabilized at eps = {}", format_rational(&found.eps));
        found.instance
    } else {
        build(&eps)?
    };
    let text = serialize_instance(&instance);
    match &args.output {
        Some(path) => write_file(path, &text)?,
        None => println!("{text}"),
    }
    if !args.verify {
        return Ok(ExitCode::SUCCESS);
    }
    let report = verify(&instance)?;
    emit(&report, args.json, render_run);
    Ok(verdict_code(&report))
}

fn verdict_code(report: &RunReport) -> ExitCode {
    if report.verdict == Some(Verdict::Violation) {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}

fn read_instance(path: &Path) -> Result<Instance, Error> {
    let text = fs::read_to_string(path).map_err(|e| Error::Parse {
        location: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_instance(&text).map_err(|e| match e {
        Error::Parse { location, message } => Error::Parse {
            location: format!("{}: {location}", path.display()),
            message,
        },
        other => other,
    })
}

fn write_file(path: &Path, text: &str) -> Result<(), Error> {
    fs::write(path, text).map_err(|e| Error::Domain(format!("{}: {e}", path.display())))
}

fn emit<T: Serialize>(value: &T, json: bool, render: fn(&T) -> String) {
    if json {
        println!(
            "{}",
            serde_json::to_string_pretty(value).expect("reports serialize")
        );
    } else {
        print!("{}", render(value));
    }
}

fn render_run(r: &RunReport) -> String {
    let mut out = String::new();
    let mut line = |s: String| {
        out.push_str(&s);
        out.push('\n');
    };
    line(format!("instance   {}", display_label(&r.instance_label)));
    let p = &r.profile;
    line(format!("relation   {:?} (index {})", p.lambda, p.index));
    line(format!(
        "volumes    vol_Z = {}, vol_ZA = {}; signature {{{}, {}}}{}{}",
        p.vol_z,
        p.vol_za,
        p.a_plus,
        p.a_minus,
        if p.is_circuit { "" } else { "; pyramid" },
        if p.has_cayley { "; Cayley" } else { "" }
    ));
    match (&r.ordering, &r.s_alpha) {
        (Some(o), Some(s)) => {
            line(format!("ordering   {:?}, classes {:?}", o.alpha, o.classes));
            line(format!("s_alpha    {:?}, sign variation {}", s.bar_lambda, s.sgnvar));
        }
        _ => line("ordering   none (no open halfplane holds the dual vectors)".into()),
    }
    if let Some(b) = &r.bounds {
        line(format!(
            "bounds     combined {} (sgnvar {}, vol {}), k-1 {}, signature {}",
            b.combined, b.sgnvar_bound, b.vol_bound, b.k_minus_1, b.signature_bound
        ));
        line(format!(
            "           parity {:?}, finiteness {:?}, uniform {}",
            b.parity, b.finiteness, b.uniform
        ));
    }
    if let Some(c) = &r.count {
        line(format!("count      {c:?}"));
    }
    if let Some(v) = &r.verdict {
        line(format!("verdict    {v:?}"));
    }
    for v in &r.violations {
        line(format!("  - {v}"));
    }
    for n in &r.notes {
        line(format!("note       {n}"));
    }
    line(format!("time       {:.1} ms", r.timing_ms));
    out
}

fn render_count(r: &CountReport) -> String {
    format!(
        "instance   {}\ncount      {:?}\ntime       {:.1} ms\n",
        display_label(&r.instance_label),
        r.count,
        r.timing_ms
    )
}

fn render_fuzz(s: &FuzzSummary) -> String {
    let mut out = format!(
        "trials {}: ok {}, not applicable {}, violations {}, errors {}\n",
        s.trials, s.ok, s.not_applicable, s.violations, s.errors
    );
    out.push_str(&format!("count histogram {:?}\n", s.histogram));
    out.push_str(&format!("max count by n  {:?}\n", s.max_count_by_n));
    for t in &s.failures {
        out.push_str(&format!(
            "FAIL trial {} (n={}, seed={}): {}\n",
            t.index,
            t.n,
            t.seed,
            t.error.clone().unwrap_or_else(|| t.violations.join("; "))
        ));
    }
    out
}

fn display_label(label: &str) -> &str {
    if label.is_empty() {
        "(unlabelled)"
    } else {
        label
    }
}
