use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use singres_core::catalog::{self, CatalogEntry};
use singres_core::cycles;
use singres_core::hj::ReducedFraction;
use singres_core::json::{JsonInt, JsonRational};
use singres_core::lattice::Cokernel;
use singres_core::matrix::IntersectionMatrix;
use singres_core::star::StarSpec;
use singres_core::verify::{self, Suite, SweepConfig};

#[derive(Parser)]
#[command(
    name = "singres",
    version,
    about = "Resolution graphs of surface singularities, exactly"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a catalog entry and write its matrix with metadata.
    Build(BuildArgs),
    /// Report invariants of a matrix file.
    Analyze(AnalyzeArgs),
    /// Run a verification sweep.
    Verify(VerifyArgs),
    /// Convert a matrix file to JSON or Graphviz.
    Export(ExportArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Brieskorn,
    Weighted,
    Peskin,
    E8,
    E7,
    D4,
    NonGorenstein,
    Sylvester,
    Explicit8,
    StarControl,
    ExperimentalLeft,
    ExperimentalRight,
    Star,
}

#[derive(Args)]
struct BuildArgs {
    family: Family,
    #[arg(long)]
    q: Option<u64>,
    #[arg(long)]
    a: Option<u64>,
    #[arg(long)]
    b: Option<u64>,
    #[arg(long)]
    c: Option<u64>,
    #[arg(long)]
    d: Option<u64>,
    /// Prime for the p-families; characteristic exponent for `weighted`.
    #[arg(long)]
    p: Option<u64>,
    #[arg(long)]
    n: Option<u64>,
    #[arg(long)]
    variant: Option<u64>,
    /// Node self-intersection magnitude for `star`.
    #[arg(long)]
    s0: Option<i64>,
    /// Comma-separated chain fractions for `star`, e.g. `3/2,5/4,2`.
    #[arg(long)]
    chains: Option<String>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct AnalyzeArgs {
    file: PathBuf,
    #[arg(long)]
    det: bool,
    #[arg(long)]
    group: bool,
    #[arg(long)]
    cycles: bool,
    #[arg(long)]
    gorenstein: bool,
    /// Comma-separated vertices to keep; the rest are contracted.
    #[arg(long, value_name = "KEEP")]
    mumford: Option<String>,
    #[arg(long)]
    all: bool,
}

#[derive(Args)]
struct VerifyArgs {
    /// Suite name, or `all`.
    suite: String,
    #[arg(long, value_delimiter = ',')]
    p: Option<Vec<u64>>,
    #[arg(long)]
    max: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    depth: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Dot,
}

#[derive(Args)]
struct ExportArgs {
    file: PathBuf,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e:#}");
        return ExitCode::from(2);
    }
    let result = match cli.command {
        Command::Build(args) => build(args),
        Command::Analyze(args) => analyze(args),
        Command::Verify(args) => run_verify(args),
        Command::Export(args) => export(args),
    };
    match result {
        Ok(code) => code,
        Err(e) if is_broken_pipe(&e) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn is_broken_pipe(e: &anyhow::Error) -> bool {
    e.chain().any(|c| {
        let kind = c.downcast_ref::<io::Error>().map(io::Error::kind).or_else(|| {
            c.downcast_ref::<serde_json::Error>()
                .and_then(serde_json::Error::io_error_kind)
        });
        kind == Some(io::ErrorKind::BrokenPipe)
    })
}

fn emit(text: &str) -> Result<()> {
    let mut out = io::stdout().lock();
    out.write_all(text.as_bytes())?;
    out.flush()?;
    Ok(())
}

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var("SINGRES_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .with_context(|| format!("SINGRES_THREADS must be a positive integer, got {raw:?}"))?;
    if threads == 0 {
        bail!("SINGRES_THREADS must be a positive integer, got 0");
    }
    rayon::ThreadPoolBuilder::new().num_threads(threads).build_global()?;
    Ok(())
}

fn need(v: Option<u64>, flag: &str) -> Result<u64> {
    v.ok_or_else(|| anyhow!("missing --{flag}"))
}

fn parse_chains(s0: i64, chains: &str) -> Result<StarSpec> {
    let mut spec = StarSpec::new(s0);
    for part in chains.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (a, b) = part.split_once('/').unwrap_or((part, "1"));
        let a: i64 = a.trim().parse().with_context(|| format!("bad numerator in {part:?}"))?;
        let b: i64 = b
            .trim()
            .parse()
            .with_context(|| format!("bad denominator in {part:?}"))?;
        spec.push(ReducedFraction::new(a, b)?, 1);
    }
    Ok(spec)
}

fn construct(args: &BuildArgs) -> Result<CatalogEntry> {
    let entry = match args.family {
        Family::Brieskorn => catalog::brieskorn(need(args.q, "q")?, need(args.c, "c")?, need(args.d, "d")?)?,
        Family::Weighted => catalog::weighted_homogeneous(
            need(args.q, "q")?,
            need(args.a, "a")?,
            need(args.b, "b")?,
            need(args.c, "c")?,
            need(args.d, "d")?,
            args.p.unwrap_or(1),
        )?,
        Family::Peskin => catalog::peskin(need(args.p, "p")?)?,
        Family::E8 => catalog::e8_analogue(need(args.p, "p")?)?,
        Family::E7 => catalog::e7_analogue(need(args.p, "p")?)?,
        Family::D4 => catalog::d4_analogue(need(args.p, "p")?)?,
        Family::NonGorenstein => catalog::non_gorenstein_example(need(args.p, "p")?)?,
        Family::Sylvester => catalog::sylvester_star(need(args.n, "n")? as usize)?,
        Family::Explicit8 => catalog::explicit8(need(args.n, "n")?, args.variant.unwrap_or(1))?,
        Family::StarControl => catalog::star_control()?,
        Family::ExperimentalLeft => catalog::experimental_pair()?[0].clone(),
        Family::ExperimentalRight => catalog::experimental_pair()?[1].clone(),
        Family::Star => {
            let s0 = args.s0.ok_or_else(|| anyhow!("missing --s0"))?;
            let chains = args.chains.as_deref().ok_or_else(|| anyhow!("missing --chains"))?;
            catalog::custom_star(parse_chains(s0, chains)?)?
        }
    };
    Ok(entry)
}

fn build(args: BuildArgs) -> Result<ExitCode> {
    let entry = construct(&args)?;
    let text = serde_json::to_string_pretty(&entry)?;
    match &args.output {
        Some(path) => {
            fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))?;
            let summary = json!({ "name": entry.name, "n": entry.matrix.n(), "predicted": serde_json::to_value(&entry)?["predicted"] });
            emit(&format!("{summary}\n"))?;
        }
        None => emit(&format!("{text}\n"))?,
    }
    eprintln!(
        "{}: {} vertices, {} ({})",
        entry.name,
        entry.matrix.n(),
        entry.provenance,
        status_word(&entry)
    );
    Ok(ExitCode::SUCCESS)
}

fn status_word(entry: &CatalogEntry) -> &'static str {
    match entry.status {
        catalog::Status::Proven => "proven",
        catalog::Status::Conjectural => "conjectural",
    }
}

/// Accepts a bare matrix or any object with a `matrix` field.
fn load_matrix(path: &Path) -> Result<IntersectionMatrix> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let value: Value = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    let payload = match value.get("matrix") {
        Some(m) => m.clone(),
        None => value,
    };
    serde_json::from_value(payload).map_err(|e| anyhow!("invalid matrix in {}: {e}", path.display()))
}

fn parse_keep(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| p.parse::<usize>().with_context(|| format!("bad vertex index {p:?}")))
        .collect()
}

fn analyze(args: AnalyzeArgs) -> Result<ExitCode> {
    let m = load_matrix(&args.file)?;
    let any = args.det || args.group || args.cycles || args.gorenstein || args.mumford.is_some();
    let all = args.all || !any;
    let mut report = serde_json::Map::new();
    report.insert("n".into(), json!(m.n()));
    if all || args.det {
        report.insert(
            "det".into(),
            serde_json::to_value(JsonInt(m.exact_determinant().clone()))?,
        );
    }
    if all || args.group {
        let ck = Cokernel::new(&m);
        report.insert("group".into(), serde_json::to_value(ck.group())?);
        if all {
            let orders: Result<Vec<JsonInt>> = (0..m.n()).map(|i| Ok(JsonInt(ck.class_order(i)?))).collect();
            report.insert("class_orders".into(), serde_json::to_value(orders?)?);
        }
    }
    let graph = m.to_dual_graph();
    if all {
        report.insert(
            "graph".into(),
            json!({ "connected": graph.connected, "tree": graph.is_tree, "nodes": graph.nodes(), "terminals": graph.terminals() }),
        );
    }
    if (all && graph.connected) || args.cycles {
        let z = cycles::fundamental_cycle(&m)?;
        let k = cycles::canonical_cycle(&m);
        let genus = match cycles::fundamental_genus(&m) {
            Ok(g) => serde_json::to_value(JsonInt(g))?,
            Err(e) => json!({ "error": e.to_string() }),
        };
        let slack = cycles::yau_slack(&m)?;
        report.insert(
            "cycles".into(),
            json!({
                "fundamental_cycle": cycles::cycle_json(&z.cycle),
                "z_squared": JsonInt(z.self_intersection.clone()),
                "canonical": cycles::rational_cycle_json(&k),
                "genus": genus,
                "yau_slack": cycles::rational_cycle_json(&slack),
            }),
        );
    }
    if all || args.gorenstein {
        report.insert("gorenstein".into(), verify::gorenstein_json(&m)?);
    }
    if let Some(keep) = &args.mumford {
        let keep = parse_keep(keep)?;
        let pulled = cycles::mumford_pullback(&m, &keep)?;
        let rows: Vec<Vec<JsonRational>> = pulled
            .iter()
            .map(|r| r.iter().map(JsonRational::from).collect())
            .collect();
        let mut mumford = json!({ "keep": keep, "matrix": rows });
        if keep.len() == 1 && graph.is_tree {
            let corrections = cycles::correction_terms(&m, keep[0])?;
            let list: Vec<Value> = corrections
                .iter()
                .map(|c| json!({ "neighbor": c.neighbor, "branch": c.branch, "delta": JsonRational::from(&c.delta) }))
                .collect();
            mumford["corrections"] = Value::Array(list);
        }
        report.insert("mumford".into(), mumford);
    }
    emit(&format!("{}\n", Value::Object(report)))?;
    Ok(ExitCode::SUCCESS)
}

fn run_verify(args: VerifyArgs) -> Result<ExitCode> {
    let suites: Vec<Suite> = if args.suite == "all" {
        Suite::ALL.to_vec()
    } else {
        vec![args.suite.parse::<Suite>().map_err(|e| anyhow!(e))?]
    };
    let cfg = SweepConfig {
        primes: args.p,
        max: args.max,
        trials: args.trials,
        seed: args.seed,
        depth: args.depth,
    };
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let mut mismatches = 0;
    for suite in suites {
        let report = verify::run(suite, &cfg);
        for record in &report.records {
            serde_json::to_writer(&mut out, record)?;
            out.write_all(b"\n")?;
        }
        let summary = report.summary();
        serde_json::to_writer(&mut out, &json!({ "suite": report.suite, "summary": summary }))?;
        out.write_all(b"\n")?;
        for (tag, t) in &summary {
            eprintln!(
                "{:<16} {:<28} pass {:>6}  fail {:>4}  mismatch {:>4}",
                report.suite, tag, t.pass, t.fail, t.mismatches
            );
        }
        mismatches += report.mismatches();
    }
    out.flush()?;
    if mismatches > 0 {
        eprintln!("{mismatches} proven claim(s) failed");
        Ok(ExitCode::FAILURE)
    } else {
        Ok(ExitCode::SUCCESS)
    }
}

fn export(args: ExportArgs) -> Result<ExitCode> {
    let m = load_matrix(&args.file)?;
    let text = match args.format {
        Format::Json => serde_json::to_string(&m)? + "\n",
        Format::Dot => {
            let name = args.file.file_stem().and_then(|s| s.to_str()).unwrap_or("graph");
            m.to_dot(name)
        }
    };
    match &args.output {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
        None => emit(&text)?,
    }
    Ok(ExitCode::SUCCESS)
}
