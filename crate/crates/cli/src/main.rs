use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use pbdd::encode::cnf::ClauseSet;
use pbdd::encode::{Encoder, Method};
use pbdd::families::{bailleux_family, hosaka_family, random_constraint, BoundPolicy};
use pbdd::io::{parse_opb, write_dimacs, write_map, write_opb, DimacsComments, EncodingReport, Instance};
use pbdd::pb::{normalize, PbConstraint, RawConstraint, Var};
use pbdd::robdd::BddError;
use pbdd::verify::{check_consistency_with_limit, check_equivalent, check_gac_with_limit, Detection, Verdict};

const BUDGET_ENV: &str = "PBDD_NODE_BUDGET";

#[derive(Parser)]
#[command(name = "pbdd", version, about = "Encode pseudo-Boolean constraints into CNF through ROBDDs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Encode an OPB file into DIMACS CNF
    Encode(EncodeArgs),
    /// Print encoding sizes per constraint
    Stats(StatsArgs),
    /// Check consistency (and GAC where expected) on random constraints
    Verify(VerifyArgs),
    /// Write a generated constraint as OPB
    Gen(GenArgs),
    /// Check whether two single-constraint OPB files are equivalent
    Equiv(EquivArgs),
}

#[derive(Args)]
struct EncoderArgs {
    #[arg(long, default_value = "bdd1")]
    method: Method,
    /// Abort once a diagram has this many decision nodes (also PBDD_NODE_BUDGET)
    #[arg(long)]
    node_budget: Option<usize>,
    /// Encode constraints with at most this many terms by clause enumeration
    #[arg(long, default_value_t = 0)]
    naive_max_vars: usize,
    #[arg(long, default_value_t = 1)]
    threads: usize,
}

#[derive(Args)]
struct EncodeArgs {
    #[command(flatten)]
    encoder: EncoderArgs,
    #[arg(long = "in")]
    input: PathBuf,
    /// Output file; standard output if absent
    #[arg(long)]
    out: Option<PathBuf>,
    /// Variable map sidecar
    #[arg(long)]
    map: Option<PathBuf>,
}

#[derive(Args)]
struct StatsArgs {
    #[command(flatten)]
    encoder: EncoderArgs,
    #[arg(long = "in")]
    input: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value = "bdd1")]
    method: Method,
    #[arg(long, default_value_t = 6)]
    max_n: u32,
    #[arg(long, default_value_t = 20)]
    seeds: u64,
    #[arg(long, default_value_t = 0)]
    first_seed: u64,
    #[arg(long, default_value_t = 100)]
    max_coeff: u64,
    /// uniform, full, or a fraction in [0, 1]
    #[arg(long, default_value = "uniform")]
    bound: String,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Hosaka,
    Bailleux,
    Random,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    family: Family,
    #[arg(long)]
    n: u32,
    #[arg(long, default_value_t = 127)]
    a: u64,
    #[arg(long, default_value_t = 2)]
    b: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    max_coeff: u64,
    /// uniform, full, or a fraction in [0, 1]
    #[arg(long, default_value = "uniform")]
    bound: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EquivArgs {
    a: PathBuf,
    b: PathBuf,
}

enum Failure {
    Verification(String),
    Usage(String),
    Parse(String),
    Budget(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Verification(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Parse(_) => 3,
            Failure::Budget(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Verification(m) | Failure::Usage(m) | Failure::Parse(m) | Failure::Budget(m) => m,
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Failure {
        Failure::Usage(e.to_string())
    }
}

impl From<BddError> for Failure {
    fn from(e: BddError) -> Failure {
        match e {
            BddError::BudgetExceeded(_) => Failure::Budget(e.to_string()),
            other => Failure::Usage(other.to_string()),
        }
    }
}

fn node_budget(flag: Option<usize>) -> Result<Option<usize>, Failure> {
    if flag.is_some() {
        return Ok(flag);
    }
    match std::env::var(BUDGET_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| Failure::Usage(format!("{BUDGET_ENV}={v} is not a node count"))),
        Err(_) => Ok(None),
    }
}

fn encoder(args: &EncoderArgs) -> Result<Encoder, Failure> {
    Ok(Encoder {
        method: args.method,
        node_budget: node_budget(args.node_budget)?,
        direct_max_vars: args.naive_max_vars,
    })
}

fn read_instance(path: &Path) -> Result<Instance, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    parse_opb(&text).map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))
}

fn bound_policy(s: &str) -> Result<BoundPolicy, Failure> {
    match s {
        "uniform" => Ok(BoundPolicy::Uniform),
        "full" => Ok(BoundPolicy::Full),
        _ => s
            .parse::<f64>()
            .ok()
            .filter(|f| (0.0..=1.0).contains(f))
            .map(BoundPolicy::Fraction)
            .ok_or_else(|| Failure::Usage(format!("bad bound policy `{s}`"))),
    }
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            fs::File::create(p).map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn encode(args: &EncodeArgs) -> Result<(), Failure> {
    let enc = encoder(&args.encoder)?;
    let instance = read_instance(&args.input)?;
    let constraints = instance.normalized();
    let (cnf, _) = enc.encode_all(&constraints, instance.num_vars(), args.encoder.threads)?;
    let comments = DimacsComments {
        method: Some(enc.method.to_string()),
        seed: None,
        names: instance.names.clone(),
    };
    let mut out = output(args.out.as_deref())?;
    write_dimacs(&cnf, &comments, &mut out)?;
    out.flush()?;
    if let Some(map) = &args.map {
        let mut sink = output(Some(map))?;
        write_map(&cnf, &instance.names, &mut sink)?;
        sink.flush()?;
    }
    Ok(())
}

fn stats(args: &StatsArgs) -> Result<(), Failure> {
    let enc = encoder(&args.encoder)?;
    let instance = read_instance(&args.input)?;
    let constraints = instance.normalized();
    let (_, rows) = enc.encode_all(&constraints, instance.num_vars(), args.encoder.threads)?;
    let report = EncodingReport { method: enc.method, rows };
    let mut out = io::stdout().lock();
    write!(out, "{}\n{}", report.table(), report.tsv())?;
    Ok(())
}

fn verify(args: &VerifyArgs) -> Result<(), Failure> {
    if args.max_n == 0 || args.max_n > 10 {
        return Err(Failure::Usage("--max-n must be in 1..=10".into()));
    }
    let policy = bound_policy(&args.bound)?;
    let enc = Encoder::new(args.method);
    let mut failures = 0;
    for seed in args.first_seed..args.first_seed + args.seeds {
        let n = (seed % args.max_n as u64) as u32 + 1;
        let c = random_constraint(seed, n, args.max_coeff, policy).map_err(|e| Failure::Usage(e.to_string()))?;
        let mut cnf = ClauseSet::new(c.max_var());
        enc.encode(&c, &mut cnf)?;
        let limit = args.max_n as usize;
        let mut report = |what: &str, verdict: Verdict| {
            if let Verdict::Violated(cx) = verdict {
                failures += 1;
                println!("seed {seed}: {what} violated for {c}: {cx}");
            }
        };
        let verdict = check_consistency_with_limit(&c, &cnf, Detection::Conflict, limit)
            .map_err(|e| Failure::Usage(e.to_string()))?;
        report("consistency", verdict);
        if args.method.is_gac() {
            let verdict =
                check_gac_with_limit(&c, &cnf, limit).map_err(|e| Failure::Usage(e.to_string()))?;
            report("gac", verdict);
        }
    }
    let checks = if args.method.is_gac() { "consistency, gac" } else { "consistency" };
    println!(
        "{} constraints, method {}, checks {checks}: {failures} violations",
        args.seeds, args.method
    );
    if failures > 0 {
        return Err(Failure::Verification(format!("{failures} violations")));
    }
    Ok(())
}

fn generate(args: &GenArgs) -> Result<(), Failure> {
    let c = match args.family {
        Family::Hosaka => hosaka_family(args.n),
        Family::Bailleux => bailleux_family(args.a, args.b, args.n),
        Family::Random => random_constraint(args.seed, args.n, args.max_coeff, bound_policy(&args.bound)?),
    }
    .map_err(|e| Failure::Usage(e.to_string()))?;
    let instance = Instance::from_constraints(vec![c.to_raw()]);
    let mut out = output(args.out.as_deref())?;
    out.write_all(write_opb(&instance).as_bytes())?;
    out.flush()?;
    Ok(())
}

/// The single normalized constraint of `instance`, with variables renamed
/// to `ids`.
fn single_constraint(instance: &Instance, ids: &[(String, Var)], path: &Path) -> Result<PbConstraint, Failure> {
    let [raw] = instance.constraints.as_slice() else {
        return Err(Failure::Usage(format!("{}: expected exactly one constraint", path.display())));
    };
    let mut terms = Vec::with_capacity(raw.terms.len());
    for (a, v) in &raw.terms {
        let name = instance.name(*v);
        let Some((_, id)) = ids.iter().find(|(n, _)| n == name) else {
            return Err(Failure::Usage(format!("variable {name} only occurs in {}", path.display())));
        };
        terms.push((a.clone(), *id));
    }
    let renamed = RawConstraint::new(terms, raw.comparator, raw.bound.clone());
    match normalize(&renamed).as_slice() {
        [c] => Ok(c.clone()),
        _ => Err(Failure::Usage(format!("{}: equalities are not supported", path.display()))),
    }
}

fn equiv(args: &EquivArgs) -> Result<(), Failure> {
    let a = read_instance(&args.a)?;
    let b = read_instance(&args.b)?;
    let ids: Vec<(String, Var)> = a
        .names
        .iter()
        .enumerate()
        .map(|(i, n)| (n.clone(), Var::new(i as u32 + 1).expect("positive id")))
        .collect();
    let ca = single_constraint(&a, &ids, &args.a)?;
    let cb = single_constraint(&b, &ids, &args.b)?;
    let same = check_equivalent(&ca, &cb).map_err(|e| Failure::Usage(e.to_string()))?;
    println!("{}", if same { "equivalent" } else { "different" });
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Encode(a) => encode(a),
        Command::Stats(a) => stats(a),
        Command::Verify(a) => verify(a),
        Command::Gen(a) => generate(a),
        Command::Equiv(a) => equiv(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("pbdd: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
