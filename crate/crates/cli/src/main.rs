use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use starquad_core::lemma::{run_lemma_suite, LemmaCheck, SuiteOptions};
use starquad_core::{
    build_rule, cdp_constant, default_reference_resolution, evaluate, load_domain, load_rule,
    named_function, reference_integral, run_convergence, save_rule, theorem_bound, write_report,
    write_rule, ConvergenceOptions, Error, Exponent, RuleOptions, StarDomain,
};

const THREADS_VAR: &str = "STARQUAD_THREADS";

#[derive(Parser, Debug)]
#[command(name = "starquad", version, about = "Optimal cubature formulas on star domains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Inner and outer Jordan measure of a domain.
    Measure {
        #[command(flatten)]
        domain: DomainArg,
        /// Grid cells per axis over the bounding box.
        #[arg(long)]
        resolution: Option<usize>,
    },
    /// Build a cubature rule and write it as CSV.
    Rule {
        #[command(flatten)]
        domain: DomainArg,
        #[command(flatten)]
        rule: RuleArgs,
        /// Output file; stdout when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Apply a rule to a named test function.
    Integrate {
        #[command(flatten)]
        domain: DomainArg,
        /// Load the rule from a CSV file instead of building one.
        #[arg(long, conflicts_with = "n")]
        rule_file: Option<PathBuf>,
        #[command(flatten)]
        rule: OptionalRuleArgs,
        /// const, linear-x1, sin-sum or fooling.
        #[arg(short, long)]
        function: String,
        #[arg(short, default_value = "inf")]
        p: String,
        /// Also compute a reference integral and the error.
        #[arg(long)]
        error: bool,
        /// Reference grid cells per axis (implies --error).
        #[arg(long)]
        reference_resolution: Option<usize>,
    },
    /// The constant c(d, p) of the optimal error.
    Constant {
        #[arg(short)]
        d: usize,
        #[arg(short)]
        p: String,
        /// Subinterval budget of the adaptive quadrature.
        #[arg(long, default_value_t = 1000)]
        quad_points: usize,
    },
    /// Leading term of the optimal error for a domain of measure `mes`.
    Bound {
        #[arg(short)]
        d: usize,
        #[arg(short)]
        p: String,
        #[arg(long)]
        mes: f64,
        #[arg(short)]
        n: usize,
    },
    /// Fooling-function error against the bound for a list of n.
    Convergence {
        #[command(flatten)]
        domain: DomainArg,
        #[arg(short, default_value = "inf")]
        p: String,
        /// Comma-separated, strictly increasing, at least three values.
        #[arg(long, value_delimiter = ',', required = true)]
        n_list: Vec<usize>,
        #[arg(long, default_value_t = 8)]
        subgrid: usize,
        /// Reference grid cells per axis; chosen per row when omitted.
        #[arg(long)]
        resolution: Option<usize>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Record wall time per row (makes the report nondeterministic).
        #[arg(long)]
        timing: bool,
        /// Domain label in the report; the config file stem by default.
        #[arg(long)]
        id: Option<String>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Randomized checks of the auxiliary maps, printed as TSV.
    VerifyLemmas {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Run reduced sample counts.
        #[arg(long)]
        quick: bool,
        /// Skip the W-region survey on the cross.
        #[arg(long)]
        no_w_region: bool,
    },
}

#[derive(Args, Debug)]
struct DomainArg {
    /// Domain configuration file.
    #[arg(long)]
    domain: PathBuf,
}

#[derive(Args, Debug)]
struct RuleArgs {
    /// Requested number of nodes.
    #[arg(short)]
    n: usize,
    #[arg(long, default_value_t = 8)]
    subgrid: usize,
    /// Grid cells per axis for the measure bracket.
    #[arg(long)]
    measure_resolution: Option<usize>,
}

#[derive(Args, Debug)]
struct OptionalRuleArgs {
    #[arg(short)]
    n: Option<usize>,
    #[arg(long, default_value_t = 8)]
    subgrid: usize,
    #[arg(long)]
    measure_resolution: Option<usize>,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Core(e) if e.is_numerical() => 2,
            _ => 1,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Usage(m) => f.write_str(m),
            Failure::Core(e) => write!(f, "{e}"),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Err(e) = init_threads() {
        eprintln!("starquad: {e}");
        return ExitCode::from(e.exit_code());
    }
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("starquad: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn init_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| Failure::Usage(format!("{THREADS_VAR} must be a non-negative integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Usage(format!("thread pool: {e}")))
}

fn domain(arg: &DomainArg) -> Result<StarDomain, Failure> {
    Ok(load_domain(&arg.domain)?)
}

fn exponent(p: &str, d: usize) -> Result<Exponent, Failure> {
    Ok(Exponent::parse(p, d)?)
}

fn rule_options(subgrid: usize, measure_resolution: Option<usize>) -> RuleOptions {
    RuleOptions {
        subgrid,
        measure_resolution,
        ..RuleOptions::default()
    }
}

fn write_text(output: Option<&Path>, text: &str) -> Result<(), Failure> {
    match output {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Core(e.into())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(command: Command) -> Result<u8, Failure> {
    match command {
        Command::Measure { domain: arg, resolution } => {
            let dom = domain(&arg)?;
            let b = dom.jordan_measure(resolution.unwrap_or_else(|| dom.default_measure_resolution()))?;
            println!("inner\t{}", fixed(b.inner));
            println!("outer\t{}", fixed(b.outer));
            println!("resolution\t{}", b.resolution);
            println!("closed_form\t{}", fixed(dom.exact_measure()));
        }
        Command::Rule { domain: arg, rule, output } => {
            let dom = domain(&arg)?;
            let built = build_rule(&dom, rule.n, &rule_options(rule.subgrid, rule.measure_resolution))?;
            match output {
                Some(path) => {
                    save_rule(&built, &path)?;
                    eprintln!(
                        "{} nodes, sum of weights {:.10}, written to {}",
                        built.len(),
                        built.sum_weights,
                        path.display()
                    );
                }
                None => print!("{}", write_rule(&built)),
            }
        }
        Command::Integrate {
            domain: arg,
            rule_file,
            rule,
            function,
            p,
            error,
            reference_resolution,
        } => {
            let dom = domain(&arg)?;
            let exp = exponent(&p, dom.dim())?;
            let built = match (rule_file, rule.n) {
                (Some(path), _) => load_rule(path)?,
                (None, Some(n)) => build_rule(&dom, n, &rule_options(rule.subgrid, rule.measure_resolution))?,
                (None, None) => return Err(Failure::Usage("one of -n or --rule-file is required".into())),
            };
            if built.nodes.nodes.first().is_some_and(|k| k.point.len() != dom.dim()) {
                return Err(Failure::Usage("rule and domain dimensions disagree".into()));
            }
            let f = named_function(&function, &dom, &built, exp)?;
            let value = evaluate(&built, f.as_ref());
            println!("cubature\t{}", fixed(value));
            if error || reference_resolution.is_some() {
                let res = reference_resolution.unwrap_or_else(|| default_reference_resolution(&dom, &built));
                let reference = reference_integral(&dom, f.as_ref(), res)?;
                println!("reference\t{}", fixed(reference));
                println!("error\t{}", fixed((reference - value).abs()));
            }
        }
        Command::Constant { d, p, quad_points } => {
            let c = cdp_constant(d, exponent(&p, d)?, quad_points)?;
            println!("{}", fixed(c));
        }
        Command::Bound { d, p, mes, n } => {
            let b = theorem_bound(d, exponent(&p, d)?, mes, n)?;
            println!("{}", fixed(b));
        }
        Command::Convergence {
            domain: arg,
            p,
            n_list,
            subgrid,
            resolution,
            seed,
            timing,
            id,
            output,
        } => {
            let dom = domain(&arg)?;
            let exp = exponent(&p, dom.dim())?;
            let id = id.unwrap_or_else(|| {
                arg.domain
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_else(|| "domain".into())
            });
            let opts = ConvergenceOptions {
                rule: rule_options(subgrid, None),
                resolution,
                seed,
                record_timing: timing,
            };
            let report = run_convergence(&dom, &id, exp, &n_list, &opts)?;
            write_text(output.as_deref(), &write_report(&report))?;
        }
        Command::VerifyLemmas { seed, quick, no_w_region } => {
            let mut opts = if quick { quick_suite() } else { SuiteOptions::default() };
            opts.seed = seed;
            if no_w_region {
                opts.w_region_n = None;
            }
            let checks = run_lemma_suite(&opts)?;
            print!("{}", lemma_table(&checks));
            if checks.iter().any(|c| !c.passed) {
                return Ok(2);
            }
        }
    }
    Ok(0)
}

/// Ten decimals, without a sign on values that round to zero.
fn fixed(x: f64) -> String {
    let s = format!("{x:.10}");
    match s.strip_prefix('-') {
        Some(rest) if rest.bytes().all(|b| b == b'0' || b == b'.') => rest.to_string(),
        _ => s,
    }
}

fn quick_suite() -> SuiteOptions {
    SuiteOptions {
        det_instances: 200,
        fd_configs: 30,
        geometry_configs: 200,
        distance_pairs: 1000,
        preimage_configs: 500,
        scan_samples: 20_000,
        segment_samples: 100,
        w_region_n: Some(100_000),
        w_region_samples: 5000,
        ..SuiteOptions::default()
    }
}

fn lemma_table(checks: &[LemmaCheck]) -> String {
    let mut out = String::from("check\tstatus\tsamples\tworst\ttolerance\tdetail\n");
    for c in checks {
        out.push_str(&format!(
            "{}\t{}\t{}\t{:.10e}\t{:.10e}\t{}\n",
            c.name,
            if c.passed { "pass" } else { "FAIL" },
            c.samples,
            c.worst,
            c.tolerance,
            c.detail.replace(['\t', '\n'], " ")
        ));
    }
    out
}
