//! `rackmsr`: build, exercise and verify rack-aware MSR codes from the shell.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use rackmsr::bounds::{
    access_bound, cutset_bound, homogeneous_decomposition, rack_cutset_bound, subpacketization_bound,
    BoundReport, BoundValue, SubpacketizationVariant,
};
use rackmsr::codes::{random_data, Codeword, Family};
use rackmsr::harness::{self, Check, ExperimentConfig, Scope};
use rackmsr::specfile::{AnyCode, CodeParams, CodeSpec};
use rackmsr::textio::{self, Received};

const SEED_VAR: &str = "RACKMSR_SEED";

/// Exit status for a failed check; usage and parameter errors exit with 2.
const CHECK_FAILED: u8 = 1;
const USAGE: u8 = 2;

#[derive(Parser)]
#[command(
    name = "rackmsr",
    version,
    about = "Build, repair and verify rack-aware MSR codes",
    long_about = "Build, repair and verify rack-aware MSR codes.\n\n\
        Node, rack and row labels are 0-based everywhere: node j sits in rack j / u \
        at position j % u.\n\n\
        Exit status: 0 on success, 1 when a check fails, 2 on usage or parameter errors. \
        The RACKMSR_SEED environment variable overrides any --seed."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Construct a code and write its spec JSON.
    Build(BuildArgs),
    /// Encode data (or random data) into a codeword file.
    Encode(EncodeArgs),
    /// Erase nodes or perturb symbols of a codeword file.
    Corrupt(CorruptArgs),
    /// Repair one node from a helper set and print the transcript.
    Repair(RepairArgs),
    /// Run the verification checks and print a report.
    Verify(VerifyArgs),
    /// Evaluate bounds for explicit inputs or for a spec.
    Bounds(BoundsArgs),
    /// Time a repair sweep.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    C1,
    C2,
    C3,
    Rs,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::C1 => Family::C1,
            FamilyArg::C2 => Family::C2,
            FamilyArg::C3 => Family::C3,
            FamilyArg::Rs => Family::Rs,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Tsv,
}

#[derive(Args)]
struct BuildArgs {
    #[arg(long, value_enum)]
    family: FamilyArg,
    /// Number of racks n̄.
    #[arg(long, required_unless_present = "nodes")]
    racks: Option<usize>,
    /// Nodes per rack u.
    #[arg(long, default_value_t = 1)]
    rack_size: usize,
    /// Node count of the homogeneous code (sets --racks, rack size 1).
    #[arg(short = 'n', long, conflicts_with = "racks")]
    nodes: Option<usize>,
    #[arg(short = 'k', long)]
    k: usize,
    /// Helper racks d̄ (helper nodes d for c2).
    #[arg(long)]
    helpers: usize,
    /// Field override: p or p^m.
    #[arg(long)]
    field: Option<String>,
    /// Base field size q of the RS code.
    #[arg(long)]
    q: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Largest RS sub-packetization to build.
    #[arg(long)]
    max_l: Option<usize>,
    /// Output path; stdout when absent.
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EncodeArgs {
    #[arg(long)]
    spec: PathBuf,
    /// Data file: k nodes in the codeword body layout. Random when absent.
    #[arg(long)]
    data: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CorruptArgs {
    #[arg(long)]
    spec: PathBuf,
    #[arg(long)]
    codeword: PathBuf,
    /// Nodes to erase.
    #[arg(long, value_delimiter = ',')]
    erase: Vec<usize>,
    /// Symbols to perturb, as NODE:ROW.
    #[arg(long, value_delimiter = ',')]
    flip: Vec<String>,
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RepairArgs {
    #[arg(long)]
    spec: PathBuf,
    #[arg(long)]
    codeword: PathBuf,
    /// Failed node.
    #[arg(long)]
    fail: usize,
    /// Helper racks (helper nodes for c2).
    #[arg(long, value_delimiter = ',', required = true)]
    helpers: Vec<usize>,
    /// Write the repaired codeword here.
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    spec: PathBuf,
    /// Comma-separated checks: mds, repair, uniform-download, access, bounds,
    /// optimal-update. All when absent.
    #[arg(long, value_delimiter = ',')]
    checks: Vec<String>,
    /// Check this codeword instead of random ones.
    #[arg(long)]
    codeword: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// `exhaustive` or a sample size.
    #[arg(long, default_value = "exhaustive")]
    scope: String,
    #[arg(long, default_value_t = 10)]
    codewords: usize,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Also write the JSON report here.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct BoundsArgs {
    /// Evaluate the bounds that apply to this code.
    #[arg(long)]
    spec: Option<PathBuf>,
    /// d,k,l
    #[arg(long, value_delimiter = ',')]
    cutset: Option<Vec<u64>>,
    /// d̄,k̄,l
    #[arg(long, value_delimiter = ',')]
    rack_cutset: Option<Vec<u64>>,
    /// d̄,u,l,s
    #[arg(long, value_delimiter = ',')]
    access: Option<Vec<u64>>,
    /// n̄,k̄,d̄,u
    #[arg(long, value_delimiter = ',')]
    subpacketization: Option<Vec<u64>>,
    /// d,k,u,l
    #[arg(long, value_delimiter = ',')]
    decomposition: Option<Vec<u64>>,
    #[arg(long, value_enum, default_value = "tsv")]
    format: Format,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    spec: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = "exhaustive")]
    scope: String,
    /// Codewords repaired per scenario.
    #[arg(long, default_value_t = 1)]
    codewords: usize,
}

/// An error that maps to a specific exit status.
#[derive(Debug)]
struct Exit(u8, String);

impl std::fmt::Display for Exit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.1)
    }
}

impl std::error::Error for Exit {}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = e.downcast_ref::<Exit>().map_or(USAGE, |x| x.0);
            ExitCode::from(code)
        }
    }
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Build(a) => build(a),
        Command::Encode(a) => encode(a),
        Command::Corrupt(a) => corrupt(a),
        Command::Repair(a) => repair(a),
        Command::Verify(a) => verify(a),
        Command::Bounds(a) => bounds(a),
        Command::Bench(a) => bench(a),
    }
}

fn seed(flag: Option<u64>) -> Result<u64> {
    match std::env::var(SEED_VAR) {
        Ok(v) => v.trim().parse().with_context(|| format!("{SEED_VAR}={v:?} is not an integer")),
        Err(_) => Ok(flag.unwrap_or(0)),
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_spec(path: &Path) -> Result<AnyCode> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let spec = CodeSpec::from_json(&text).with_context(|| format!("parsing {}", path.display()))?;
    Ok(spec.build()?)
}

fn load_codeword(code: &AnyCode, path: &Path) -> Result<Received> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    textio::read_codeword(code, &text).with_context(|| format!("parsing {}", path.display()))
}

fn parse_scope(s: &str) -> Result<Scope> {
    if s == "exhaustive" {
        return Ok(Scope::Exhaustive);
    }
    let n: usize = s
        .parse()
        .map_err(|_| anyhow!("scope must be `exhaustive` or a sample size, got {s:?}"))?;
    Ok(Scope::Sampled(n))
}

fn build(a: BuildArgs) -> Result<u8> {
    let (racks, rack_size) = match a.nodes {
        Some(n) => (n, 1),
        None => (a.racks.expect("required by clap"), a.rack_size),
    };
    let params = CodeParams {
        family: a.family.into(),
        racks,
        rack_size,
        k: a.k,
        helpers: a.helpers,
        field: a.field,
        q: a.q,
        seed: seed(a.seed)?,
        max_l: a.max_l,
    };
    let code = params.build()?;
    let mut text = code.spec().to_json();
    text.push('\n');
    emit(&a.out, &text)?;
    Ok(0)
}

fn encode(a: EncodeArgs) -> Result<u8> {
    let code = load_spec(&a.spec)?;
    let c = code.as_dyn();
    let data = match &a.data {
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            textio::read_data(&code, &text)?
        }
        None => random_data(c, &mut ChaCha8Rng::seed_from_u64(seed(a.seed)?)),
    };
    let cw = c.encode(&data)?;
    emit(&a.out, &textio::write_codeword(&code, &cw.to_received()))?;
    Ok(0)
}

fn corrupt(a: CorruptArgs) -> Result<u8> {
    let code = load_spec(&a.spec)?;
    let c = code.as_dyn();
    let mut rx = load_codeword(&code, &a.codeword)?;
    for spec in &a.flip {
        let (node, row) = spec
            .split_once(':')
            .and_then(|(n, r)| Some((n.parse::<usize>().ok()?, r.parse::<usize>().ok()?)))
            .ok_or_else(|| anyhow!("--flip takes NODE:ROW, got {spec:?}"))?;
        if node >= c.length() || row >= c.rows() {
            bail!("symbol ({node}, {row}) out of range");
        }
        let col = rx[node].as_mut().ok_or_else(|| anyhow!("node {node} is erased"))?;
        col[row] = &col[row] + &c.field().one();
    }
    for &node in &a.erase {
        if node >= c.length() {
            bail!("node {node} out of range 0..{}", c.length());
        }
        rx[node] = None;
    }
    emit(&a.out, &textio::write_codeword(&code, &rx))?;
    Ok(0)
}

fn repair(a: RepairArgs) -> Result<u8> {
    let code = load_spec(&a.spec)?;
    let c = code.as_dyn();
    let rx = load_codeword(&code, &a.codeword)?;
    if a.fail >= c.length() {
        bail!("failed node {} out of range 0..{}", a.fail, c.length());
    }
    let u = c.rack_size();
    let host = a.fail / u;
    let needed = (0..c.length()).filter(|&j| j != a.fail && (j / u == host || a.helpers.contains(&(j / u))));
    for j in needed {
        if rx[j].is_none() {
            bail!("node {j} is needed for this repair but erased");
        }
    }
    let cols: Vec<Vec<_>> = rx
        .iter()
        .map(|col| col.clone().unwrap_or_else(|| vec![c.field().zero(); c.rows()]))
        .collect();
    let cw = Codeword::from_columns(cols)?;
    let (column, tr) = c.repair(&cw, a.fail, &a.helpers)?;
    if let Some(out) = &a.out {
        let mut fixed = rx.clone();
        fixed[a.fail] = Some(column.clone());
        emit(&Some(out.clone()), &textio::write_codeword(&code, &fixed))?;
    }
    let report = json!({
        "failed": tr.failed,
        "helpers": tr.helpers,
        "column": column.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
        "downloaded_symbols": tr.downloaded_symbols(),
        "bandwidth": tr.bandwidth(),
        "access": tr.access(),
        "per_helper": tr.per_helper(),
        "per_node_access": tr.per_node_access(),
        "accessed_rows": tr.accessed,
    });
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(0)
}

fn verify(a: VerifyArgs) -> Result<u8> {
    let code = load_spec(&a.spec)?;
    let c = code.as_dyn();
    let checks: Vec<Check> = if a.checks.is_empty() {
        Check::ALL.to_vec()
    } else {
        a.checks
            .iter()
            .map(|s| s.parse::<Check>().map_err(|e| anyhow!(e)))
            .collect::<Result<_>>()?
    };
    let mut config = ExperimentConfig::new(code.spec(), seed(a.seed)?).with_checks(&checks);
    config.scope = parse_scope(&a.scope)?;
    config.codewords = a.codewords;
    let supplied = match &a.codeword {
        Some(p) => {
            let rx = load_codeword(&code, p)?;
            if rx.iter().any(Option::is_none) {
                match c.erasure_decode(&rx) {
                    Ok(cw) => Some(cw),
                    Err(e) => return Err(Exit(CHECK_FAILED, format!("mds: cannot decode {}: {e}", p.display())).into()),
                }
            } else {
                let cols: Vec<Vec<_>> = rx.into_iter().flatten().collect();
                Some(Codeword::from_columns(cols)?)
            }
        }
        None => None,
    };
    let report = harness::run_on(&config, c, supplied);
    let json = report.to_json();
    if let Some(p) = &a.report {
        fs::write(p, format!("{json}\n")).with_context(|| format!("writing {}", p.display()))?;
    }
    match a.format {
        Format::Json => println!("{json}"),
        Format::Tsv => print!("{}", report.tsv()),
    }
    Ok(if report.passed { 0 } else { CHECK_FAILED })
}

fn bounds(a: BoundsArgs) -> Result<u8> {
    for (flag, v, n) in [
        ("--cutset", &a.cutset, 3),
        ("--rack-cutset", &a.rack_cutset, 3),
        ("--access", &a.access, 4),
        ("--subpacketization", &a.subpacketization, 4),
        ("--decomposition", &a.decomposition, 4),
    ] {
        if let Some(v) = v {
            if v.len() != n {
                bail!("{flag} takes {n} comma-separated values, got {}", v.len());
            }
        }
    }
    let mut rows = Vec::new();
    let exact = |r| BoundValue::Exact(r);
    if let Some(v) = &a.cutset {
        rows.push(BoundReport::new(
            "cut-set",
            &[("d", v[0]), ("k", v[1]), ("l", v[2])],
            exact(cutset_bound(v[0], v[1], v[2])?),
            None,
        ));
    }
    if let Some(v) = &a.rack_cutset {
        rows.push(BoundReport::new(
            "rack cut-set",
            &[("d_bar", v[0]), ("k_bar", v[1]), ("l", v[2])],
            exact(rack_cutset_bound(v[0], v[1], v[2])?),
            None,
        ));
    }
    if let Some(v) = &a.access {
        rows.push(BoundReport::new(
            "access",
            &[("d_bar", v[0]), ("u", v[1]), ("l", v[2]), ("s", v[3])],
            exact(access_bound(v[0], v[1], v[2], v[3])?),
            None,
        ));
    }
    if let Some(v) = &a.subpacketization {
        for (name, variant) in [
            ("sub-packetization (a)", SubpacketizationVariant::A),
            ("sub-packetization (b)", SubpacketizationVariant::B),
        ] {
            rows.push(BoundReport::new(
                name,
                &[("n_bar", v[0]), ("k_bar", v[1]), ("d_bar", v[2]), ("u", v[3])],
                BoundValue::Real(subpacketization_bound(v[0], v[1], v[2], v[3], variant)?),
                None,
            ));
        }
    }
    if let Some(v) = &a.decomposition {
        let (rack, local) = homogeneous_decomposition(v[0], v[1], v[2], v[3])?;
        let inputs = [("d", v[0]), ("k", v[1]), ("u", v[2]), ("l", v[3])];
        rows.push(BoundReport::new("homogeneous rack term", &inputs, exact(rack), None));
        rows.push(BoundReport::new("homogeneous local term", &inputs, exact(local), None));
    }
    if let Some(p) = &a.spec {
        let code = load_spec(p)?;
        let c = code.as_dyn();
        let mut config = ExperimentConfig::new(code.spec(), 0).with_checks(&[Check::Access, Check::Bounds]);
        config.codewords = 0;
        let report = harness::run_on(&config, c, None);
        rows.extend(report.bounds);
    }
    if rows.is_empty() {
        bail!("nothing to evaluate; pass --spec or one of the bound flags");
    }
    match a.format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&rows)?),
        Format::Tsv => {
            println!("bound\tinputs\tvalue\tmeasured\tattained");
            for r in &rows {
                println!("{}", r.tsv());
            }
        }
    }
    Ok(0)
}

fn bench(a: BenchArgs) -> Result<u8> {
    let code = load_spec(&a.spec)?;
    let c = code.as_dyn();
    let mut rng = ChaCha8Rng::seed_from_u64(seed(a.seed)?);
    let words: Vec<Codeword> = (0..a.codewords.max(1))
        .map(|_| rackmsr::codes::random_codeword(c, &mut rng))
        .collect::<Result<_, _>>()?;
    let (ids, _) = harness::scenarios(c, parse_scope(&a.scope)?, harness::DEFAULT_SCENARIO_CEILING, &mut rng);
    let start = std::time::Instant::now();
    let results = harness::run_repair_sweep(c, &words, &ids);
    let elapsed = start.elapsed();
    let wrong = results.iter().filter(|r| !r.correct).count();
    println!("family\trepairs\twrong\tseconds\trepairs_per_second");
    println!(
        "{}\t{}\t{}\t{:.3}\t{:.1}",
        c.family(),
        results.len(),
        wrong,
        elapsed.as_secs_f64(),
        results.len() as f64 / elapsed.as_secs_f64().max(1e-9)
    );
    Ok(if wrong == 0 { 0 } else { CHECK_FAILED })
}
