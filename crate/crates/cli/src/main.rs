//! `pgroup`: orders, sumsets, compressions, bounds and sweeps from the shell.

mod render;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use pgroup_core::bounds::{bound_by_name, gen_dependence_example, gen_tightness_example, parse_rational, BoundName};
use pgroup_core::compression::{
    compress_dir, ee_compress_fixpoint, pseudo_compress_all_traced, CompressionStep,
};
use pgroup_core::order::{ordered_elements, rank};
use pgroup_core::setfile::{parse_set_file, write_set_file};
use pgroup_core::sumset::{report, sumset};
use pgroup_core::verify::{
    find_property, frontier, kneser_sweep, properties, sweep, Filter, Mode, PropertyKind, SweepConfig,
    SweepSpec, Verdict,
};
use pgroup_core::{Group, GroupSubset, OrderKind, Rational};
use render::{big_rational, decimal, Report};
use serde_json::json;

const EXIT_USAGE: u8 = 64;
const EXIT_DOMAIN: u8 = 65;
const EXIT_IO: u8 = 74;

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Domain(#[from] pgroup_core::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Domain(pgroup_core::Error::UnknownProperty(_)) => EXIT_USAGE,
            CliError::Io { .. } => EXIT_IO,
            CliError::Domain(_) => EXIT_DOMAIN,
        }
    }
}

type CliResult<T> = Result<T, CliError>;

#[derive(Parser)]
#[command(name = "pgroup", version, about = "Sumsets and compressions in finite abelian p-groups")]
struct Cli {
    #[command(flatten)]
    config: ConfigArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArgs {
    /// Maximum number of subset evaluations per sweep.
    #[arg(long, global = true, env = "PGROUP_BUDGET")]
    budget: Option<u64>,
    /// Worker threads for sweeps; defaults to the available parallelism.
    #[arg(long, global = true, env = "PGROUP_WORKERS")]
    workers: Option<usize>,
    /// Doubling threshold below which the main bound is not checked.
    #[arg(long, global = true, default_value = "8")]
    k0: String,
    /// Directory for generated files when no explicit path is given.
    #[arg(long, global = true, default_value = ".", env = "PGROUP_OUT_DIR")]
    out_dir: PathBuf,
    /// Append a JSON block to reports.
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Sum order and pseudo-sum order.
    #[command(subcommand)]
    Order(OrderCmd),
    /// Print A+A as a set file.
    Sumset {
        setfile: PathBuf,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Sizes, doubling and spanning constants of a set.
    Report { setfile: PathBuf },
    /// Compress along one direction, or run a compression fixpoint.
    Compress {
        setfile: PathBuf,
        /// Direction as comma-separated coordinates.
        #[arg(long, required_unless_present = "fixpoint", conflicts_with = "fixpoint")]
        dir: Option<String>,
        /// Use the pseudo-sum order.
        #[arg(long)]
        pseudo: bool,
        /// Compress until no admissible direction moves the set.
        #[arg(long)]
        fixpoint: bool,
        #[arg(long, short)]
        output: Option<PathBuf>,
        /// Trace file for --fixpoint.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Closed-form spanning bounds.
    #[command(subcommand)]
    Bound(BoundCmd),
    /// Generate extremal example sets.
    #[command(subcommand)]
    Example(ExampleCmd),
    /// Check a registered property over many subsets.
    Verify(VerifyArgs),
    /// Largest spanning constant per doubling value.
    Frontier {
        #[arg(long)]
        group: String,
        #[arg(long, default_value = "contains-zero")]
        filter: String,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum OrderCmd {
    /// All elements, smallest first.
    List {
        group: String,
        #[arg(long)]
        pseudo: bool,
    },
    /// Position of an element, counting from 0.
    Rank {
        group: String,
        element: String,
        #[arg(long)]
        pseudo: bool,
    },
}

#[derive(Subcommand)]
enum BoundCmd {
    /// Evaluate a bound at doubling K.
    Eval {
        /// One of main, all-k, power-of-two, freiman-ruzsa, green-ruzsa.
        name: String,
        #[arg(long)]
        q: u64,
        #[arg(long)]
        p: u64,
        #[arg(long = "K")]
        k: String,
        /// Also report whether this spanning constant is admitted.
        #[arg(long)]
        spanning: Option<String>,
    },
}

#[derive(Subcommand)]
enum ExampleCmd {
    /// {0, e_1, ..., e_d} in (Z/r)^d with d = 2K-2.
    Tightness {
        #[arg(long)]
        r: u64,
        #[arg(long = "K")]
        k: String,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Large spanning constant from a dependent extra generator.
    Dependence {
        #[arg(long)]
        m: u32,
        #[arg(long)]
        alpha: usize,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct VerifyArgs {
    property: String,
    #[arg(long, required_unless_present = "modulus")]
    group: Option<String>,
    #[arg(long, conflicts_with_all = ["samples", "seed"])]
    exhaustive: bool,
    #[arg(long, requires = "seed")]
    samples: Option<u64>,
    #[arg(long, requires = "samples")]
    seed: Option<u64>,
    /// `all`, or a `+`-joined subset of contains-zero, contains-basis, layer-restricted.
    #[arg(long)]
    filter: Option<String>,
    /// Run the Kneser sweep over Z/r for any r, not only prime powers.
    #[arg(long, conflicts_with = "group")]
    modulus: Option<u32>,
    /// Report file; defaults to verify-<property>.txt in the output directory.
    #[arg(long)]
    report: Option<PathBuf>,
}

struct Ctx {
    sweep: SweepConfig,
    out_dir: PathBuf,
    json: bool,
    started: Instant,
}

impl Ctx {
    fn provenance(&self, r: &mut Report) {
        r.provenance("tool", concat!("pgroup ", env!("CARGO_PKG_VERSION")))
            .provenance(
                "workers",
                self.sweep
                    .workers
                    .map_or_else(|| "default".to_string(), |w| w.to_string()),
            )
            .provenance("elapsed_ms", self.started.elapsed().as_millis());
    }

    fn out_path(&self, explicit: Option<PathBuf>, default_name: &str) -> PathBuf {
        explicit.unwrap_or_else(|| self.out_dir.join(default_name))
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("pgroup: {e}");
            if let CliError::Domain(pgroup_core::Error::UnknownProperty(_)) = e {
                let ids: Vec<&str> = properties().iter().map(|p| p.id).collect();
                eprintln!("known properties: {}", ids.join(", "));
            }
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> CliResult<u8> {
    let c = cli.config;
    let mut sweep_config = SweepConfig::default();
    if let Some(b) = c.budget {
        sweep_config.budget = b;
    }
    if c.workers == Some(0) {
        return Err(CliError::Usage("--workers must be positive".into()));
    }
    sweep_config.workers = c.workers;
    sweep_config.k0 = rational_arg("--k0", &c.k0)?;
    let ctx = Ctx {
        sweep: sweep_config,
        out_dir: c.out_dir,
        json: c.json,
        started: Instant::now(),
    };
    match cli.command {
        Command::Order(cmd) => order(cmd),
        Command::Sumset { setfile, output } => {
            let (g, a) = read_set(&setfile)?;
            let text = write_set_file(&g, &sumset(&g, &a, &a)?, &[])?;
            emit(output.as_deref(), &text)
        }
        Command::Report { setfile } => {
            let (g, a) = read_set(&setfile)?;
            print!("{}", set_report(&g, &a)?.deterministic(ctx.json));
            Ok(0)
        }
        Command::Compress {
            setfile,
            dir,
            pseudo,
            fixpoint,
            output,
            trace,
        } => compress(&ctx, &setfile, dir, pseudo, fixpoint, output, trace),
        Command::Bound(BoundCmd::Eval { name, q, p, k, spanning }) => bound_eval(&ctx, &name, q, p, &k, spanning),
        Command::Example(cmd) => example(&ctx, cmd),
        Command::Verify(args) => verify(&ctx, args),
        Command::Frontier { group, filter, output } => frontier_cmd(&ctx, &group, &filter, output),
    }
}

fn rational_arg(flag: &str, s: &str) -> CliResult<Rational> {
    parse_rational(s).map_err(|e| CliError::Usage(format!("{flag}: {e}")))
}

fn group_arg(s: &str) -> CliResult<Group> {
    s.parse()
        .map_err(|e: pgroup_core::Error| CliError::Usage(format!("group `{s}`: {e}")))
}

fn read_set(path: &Path) -> CliResult<(Group, GroupSubset)> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.into(),
        source,
    })?;
    Ok(parse_set_file(&text)?)
}

fn write_file(path: &Path, text: &str) -> CliResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|source| CliError::Io {
            path: dir.into(),
            source,
        })?;
    }
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.into(),
        source,
    })
}

/// Writes to `path` if given, else to stdout.
fn emit(path: Option<&Path>, text: &str) -> CliResult<u8> {
    match path {
        Some(p) => write_file(p, text)?,
        None => print!("{text}"),
    }
    Ok(0)
}

fn order_kind(pseudo: bool) -> OrderKind {
    if pseudo {
        OrderKind::PseudoSumOrder
    } else {
        OrderKind::SumOrder
    }
}

fn order(cmd: OrderCmd) -> CliResult<u8> {
    match cmd {
        OrderCmd::List { group, pseudo } => {
            let g = group_arg(&group)?;
            let mut out = String::new();
            for x in ordered_elements(&g, order_kind(pseudo)) {
                out.push_str(&g.format_index(x));
                out.push('\n');
            }
            print!("{out}");
        }
        OrderCmd::Rank { group, element, pseudo } => {
            let g = group_arg(&group)?;
            let x = g.parse_element(&element)?;
            println!("{}", rank(&g, x, order_kind(pseudo)));
        }
    }
    Ok(0)
}

fn set_report(g: &Group, a: &GroupSubset) -> CliResult<Report> {
    let rep = report(g, a)?;
    let mut r = Report::new();
    r.kv("group", g)
        .int("set_size", rep.set_size as u64)
        .int("sumset_size", rep.sumset_size as u64)
        .int("span_size", rep.span_size as u64)
        .rat("doubling", &rep.doubling)
        .rat("spanning", &rep.spanning);
    Ok(r)
}

fn trace_lines(g: &Group, steps: &[CompressionStep]) -> String {
    let mut out = String::from("# direction h_before h_after\n");
    for s in steps {
        out.push_str(&format!("{} {} {}\n", g.format_index(s.direction), s.height_before, s.height_after));
    }
    out
}

fn file_stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "set".into())
}

fn compress(
    ctx: &Ctx,
    setfile: &Path,
    dir: Option<String>,
    pseudo: bool,
    fixpoint: bool,
    output: Option<PathBuf>,
    trace: Option<PathBuf>,
) -> CliResult<u8> {
    let (g, a) = read_set(setfile)?;
    if !fixpoint {
        let dir = dir.expect("clap requires --dir without --fixpoint");
        let v = g.parse_element(&dir)?;
        let c = compress_dir(&g, &a, v, order_kind(pseudo))?;
        let header = format!("{} compression along {dir}", if pseudo { "pseudo-sum" } else { "sum" });
        return emit(output.as_deref(), &write_set_file(&g, &c, &[header])?);
    }
    let (c, steps) = if pseudo {
        pseudo_compress_all_traced(&g, &a)?
    } else {
        ee_compress_fixpoint(&g, &a)?
    };
    let trace_path = ctx.out_path(trace, &format!("{}.trace", file_stem(setfile)));
    write_file(&trace_path, &trace_lines(&g, &steps))?;
    let header = format!("{} compression fixpoint, {} steps", if pseudo { "pseudo-sum" } else { "sum" }, steps.len());
    emit(output.as_deref(), &write_set_file(&g, &c, &[header])?)
}

fn bound_eval(ctx: &Ctx, name: &str, q: u64, p: u64, k: &str, spanning: Option<String>) -> CliResult<u8> {
    let bname: BoundName = name
        .parse()
        .map_err(|e: pgroup_core::Error| CliError::Usage(e.to_string()))?;
    let k = rational_arg("--K", k)?;
    let b = bound_by_name(bname, q, p, &k)?;
    let mut r = Report::new();
    r.kv("bound", bname).int("q", q).int("p", p).rat("K", &k);
    let expr = format!("{} * {}^({})", b.factor, b.base, b.exponent);
    r.kv("expression", &expr);
    match b.exact() {
        Some(v) => r.raw("value", &big_rational(&v), json!({ "exact": v.to_string(), "approx": b.approx() })),
        None => r.raw(
            "value",
            &format!("{expr} (≈{})", decimal(b.approx())),
            json!({ "exact": null, "approx": b.approx() }),
        ),
    };
    r.flag("constant_undetermined", b.constant_undetermined);
    if let Some(s) = spanning {
        let s = rational_arg("--spanning", &s)?;
        r.rat("spanning", &s).flag("admits", b.admits(&s)?);
    }
    print!("{}", r.deterministic(ctx.json));
    Ok(0)
}

fn rational_slug(k: &Rational) -> String {
    if k.is_integer() {
        k.to_string()
    } else {
        format!("{}-{}", k.numer(), k.denom())
    }
}

fn example(ctx: &Ctx, cmd: ExampleCmd) -> CliResult<u8> {
    let (g, a, header, path) = match cmd {
        ExampleCmd::Tightness { r, k, output } => {
            let k = rational_arg("--K", &k)?;
            let (g, a) = gen_tightness_example(r, &k)?;
            let path = ctx.out_path(output, &format!("tightness-r{r}-K{}.set", rational_slug(&k)));
            (g, a, format!("tightness construction r={r} K={k}"), path)
        }
        ExampleCmd::Dependence { m, alpha, output } => {
            let (g, a) = gen_dependence_example(m, alpha)?;
            let path = ctx.out_path(output, &format!("dependence-m{m}-alpha{alpha}.set"));
            (g, a, format!("dependence construction m={m} alpha={alpha}"), path)
        }
    };
    write_file(&path, &write_set_file(&g, &a, &[header])?)?;
    let mut r = set_report(&g, &a)?;
    r.kv("file", path.display());
    print!("{}", r.deterministic(ctx.json));
    Ok(0)
}

fn verify(ctx: &Ctx, args: VerifyArgs) -> CliResult<u8> {
    let mode = match (args.exhaustive, args.samples, args.seed) {
        (_, Some(count), Some(seed)) => Mode::Sampled { count, seed },
        _ => Mode::Exhaustive,
    };
    let filter = args
        .filter
        .as_deref()
        .map(|f| f.parse::<Filter>())
        .transpose()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let property = find_property(&args.property)?;

    let mut r = Report::new();
    r.kv("property", property.id);
    let outcome = match args.modulus {
        Some(m) => {
            if property.id != "kneser-bound" {
                return Err(CliError::Usage("--modulus applies only to kneser-bound".into()));
            }
            r.kv("group", format!("Z/{m}")).kv("mode", Mode::Exhaustive);
            kneser_sweep(m, &ctx.sweep)
        }
        None => {
            let group = group_arg(args.group.as_deref().expect("clap requires --group"))?;
            r.kv("group", &group).kv("mode", mode);
            if let PropertyKind::Subsets { default_filter, .. } = property.kind {
                r.kv("filter", filter.unwrap_or(default_filter));
            }
            let spec = SweepSpec {
                group: group.clone(),
                mode,
                filter,
                property: property.id.into(),
            };
            let outcome = sweep(&spec, &ctx.sweep);
            if let Ok(Verdict::Counterexample(c)) = &outcome {
                if let Some(set) = &c.set {
                    let header = format!("counterexample to {}", property.id);
                    r.section("counterexample", write_set_file(&group, set, &[header])?);
                }
            }
            outcome
        }
    };
    if property.id == "main-bound" {
        r.rat("k0", &ctx.sweep.k0);
    }
    let code = match outcome {
        Ok(Verdict::Pass { checked }) => {
            r.kv("verdict", "pass").int("checked", checked);
            0
        }
        Ok(Verdict::Counterexample(c)) => {
            r.kv("verdict", "counterexample")
                .int("index", c.index)
                .kv("details", &c.details);
            1
        }
        Err(pgroup_core::Error::BudgetExceeded { needed, budget }) => {
            r.kv("verdict", "budget-exceeded")
                .kv("needed", needed)
                .int("budget", budget);
            2
        }
        Err(e) => return Err(e.into()),
    };
    ctx.provenance(&mut r);
    let path = ctx.out_path(args.report, &format!("verify-{}.txt", property.id));
    write_file(&path, &r.with_provenance(ctx.json))?;
    print!("{}", r.deterministic(ctx.json));
    println!("report={}", path.display());
    Ok(code)
}

fn frontier_cmd(ctx: &Ctx, group: &str, filter: &str, output: Option<PathBuf>) -> CliResult<u8> {
    let g = group_arg(group)?;
    let filter: Filter = filter.parse().map_err(|e: pgroup_core::Error| CliError::Usage(e.to_string()))?;
    let entries = match frontier(&g, filter, &ctx.sweep) {
        Err(pgroup_core::Error::BudgetExceeded { needed, budget }) => {
            eprintln!("pgroup: frontier needs {needed} evaluations, budget is {budget}");
            return Ok(2);
        }
        other => other?,
    };
    let mut out = format!("# group={g} filter={filter}\n# doubling\tdoubling_approx\tmax_spanning\tmax_spanning_approx\twitness\n");
    for e in &entries {
        let witness: Vec<String> = e.witness.iter().map(|x| g.format_index(x)).collect();
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\n",
            e.doubling,
            decimal(*e.doubling.numer() as f64 / *e.doubling.denom() as f64),
            e.max_spanning,
            decimal(*e.max_spanning.numer() as f64 / *e.max_spanning.denom() as f64),
            witness.join(";")
        ));
    }
    emit(output.as_deref(), &out)
}
