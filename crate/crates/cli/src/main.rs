use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use webrank::analysis::{analyze, matrices_at, AnalysisOptions, AnalysisReport, MatricesReport, Verdict};
use webrank::corpus::{self, generate_with, parse_builtin, wb_rank_identity};
use webrank::expr::parse_rational;
use webrank::sample::{sample_point, SamplePoint};
use webrank::{parse_webfile, Rational, WebSpec};

const EXIT_ERROR: u8 = 4;

#[derive(Parser)]
#[command(name = "webrank", version, about = "Decide maximal rank of calibrated webs by exact curvature")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline at sample points and report flatness and rank.
    Analyze(AnalyzeArgs),
    /// Print the intermediate matrices at one point.
    Matrices(MatricesArgs),
    /// Check the rank count of the WB_n webs against the bound.
    Identity(IdentityArgs),
    /// List the built-in webs.
    List,
}

#[derive(Args)]
struct Input {
    /// Web description file.
    #[arg(long, conflicts_with = "builtin", required_unless_present = "builtin")]
    web: Option<PathBuf>,
    /// Built-in web, `ID[:key=value,...]`.
    #[arg(long)]
    builtin: Option<String>,
    /// Nilpotency order of every nilpotent parameter.
    #[arg(long)]
    g_order: Option<u32>,
    /// Jet order of the first integrals (default k0 + 1).
    #[arg(long)]
    order: Option<usize>,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    input: Input,
    #[arg(long, default_value_t = 3)]
    points: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Bound on numerators and denominators of sampled coordinates.
    #[arg(long, default_value_t = 1000)]
    height: u64,
    /// Reorderings of the integrals to try when YYY is singular everywhere.
    #[arg(long, default_value_t = 0)]
    try_permutations: usize,
    /// On NOT-FLAT, report the largest invariant prefix with flat restriction.
    #[arg(long)]
    prefix_scan: bool,
    /// Basis indices of a subbundle to test, e.g. `1-19` or `1,3,5`.
    #[arg(long)]
    subbundle: Option<String>,
    /// Explicit base point `c1,c2,...`; disables sampling.
    #[arg(long, allow_hyphen_values = true)]
    at: Option<String>,
    /// Worker threads for sample points.
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long)]
    json: bool,
    /// Include per-stage wall-clock times.
    #[arg(long)]
    timings: bool,
}

#[derive(Args)]
struct MatricesArgs {
    #[command(flatten)]
    input: Input,
    /// Explicit base point `c1,c2,...`; otherwise the first sampled point.
    #[arg(long, allow_hyphen_values = true)]
    at: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1000)]
    height: u64,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct IdentityArgs {
    #[arg(long, default_value_t = 2)]
    from: usize,
    #[arg(long, default_value_t = 8)]
    to: usize,
    #[arg(long)]
    json: bool,
}

fn load(input: &Input) -> Result<(WebSpec, String, Vec<String>)> {
    let q = input.g_order;
    if let Some(q) = q {
        if q < 2 {
            bail!("--g-order must be at least 2");
        }
    }
    match (&input.web, &input.builtin) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let mut web = parse_webfile(&text).with_context(|| format!("parsing {}", path.display()))?;
            if let Some(q) = q {
                web = web.with_nilpotent_order(q);
            }
            Ok((web, path.display().to_string(), Vec::new()))
        }
        (None, Some(id)) => {
            let b = parse_builtin(id)?;
            let web = generate_with(&b, q.unwrap_or(2))?;
            Ok((web, b.to_string(), corpus::notes(&b.id)))
        }
        (None, None) => bail!("one of --web or --builtin is required"),
    }
}

fn parse_point(s: &str, n: usize) -> Result<Vec<Rational>> {
    let coords = s
        .split(',')
        .map(|c| parse_rational(c).ok_or_else(|| anyhow!("`{}` is not a rational number", c.trim())))
        .collect::<Result<Vec<_>>>()?;
    if coords.len() != n {
        bail!("--at needs {n} coordinates, got {}", coords.len());
    }
    Ok(coords)
}

fn parse_indices(s: &str) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim) {
        let bad = || anyhow!("bad index list `{s}`");
        match part.split_once('-') {
            Some((a, b)) => {
                let (a, b): (usize, usize) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
                if a == 0 || b < a {
                    return Err(bad());
                }
                out.extend(a..=b);
            }
            None => {
                let a: usize = part.parse().map_err(|_| bad())?;
                if a == 0 {
                    return Err(bad());
                }
                out.push(a);
            }
        }
    }
    out.sort_unstable();
    out.dedup();
    Ok(out.into_iter().map(|i| i - 1).collect())
}

fn with_jobs<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match jobs {
        None => Ok(f()),
        Some(j) => Ok(rayon::ThreadPoolBuilder::new().num_threads(j.max(1)).build()?.install(f)),
    }
}

fn cmd_analyze(args: &AnalyzeArgs) -> Result<u8> {
    let (web, source, extra_notes) = load(&args.input)?;
    let at = args.at.as_deref().map(|s| parse_point(s, web.n)).transpose()?;
    let subbundle = args.subbundle.as_deref().map(parse_indices).transpose()?;
    if let Some(idx) = &subbundle {
        let ro = webrank::engine::pi_prime(web.n, web.d());
        if idx.iter().any(|&i| i >= ro) {
            bail!("--subbundle indices must lie in 1..={ro}");
        }
    }
    let opts = AnalysisOptions {
        points: args.points,
        seed: args.seed,
        height: args.height,
        order: args.input.order,
        try_permutations: args.try_permutations,
        prefix_scan: args.prefix_scan,
        subbundle,
        at,
        timings: args.timings,
        ..AnalysisOptions::default()
    };
    if opts.height < 2 {
        bail!("--height must be at least 2");
    }
    let mut report = with_jobs(args.jobs, || analyze(&web, &source, &opts))??;
    report.notes.extend(extra_notes);
    if args.json {
        println!("{}", serde_json::to_string_pretty(&report)?);
    } else {
        print!("{}", render_report(&report));
    }
    Ok(report.exit_code() as u8)
}

fn render_report(r: &AnalysisReport) -> String {
    let mut s = String::new();
    let d = &r.dims;
    let _ = writeln!(s, "web: {} (n = {}, d = {})", r.source, d.n, d.d);
    let _ = writeln!(
        s,
        "k0 = {}, {}, alpha = {}, beta = {}, rank bound pi' = {}",
        d.k0,
        if d.calibrated { "calibrated" } else { "not calibrated" },
        d.alpha,
        d.beta,
        r.pi_prime
    );
    if let Some(p) = &r.permutation {
        let p: Vec<String> = p.iter().map(ToString::to_string).collect();
        let _ = writeln!(s, "integral order used: {}", p.join(" "));
    }
    for p in &r.points {
        let o = &p.ordinariness;
        let mut line = format!(
            "point {}: ({}) rank MM {}/{}, rank P {}/{}",
            p.index + 1,
            p.coords.join(", "),
            o.rank_mm,
            o.expected_mm,
            o.rank_pp,
            o.expected_pp
        );
        if !p.discarded.is_empty() {
            let _ = write!(line, ", {} redraw(s)", p.discarded.len());
        }
        let status = match (o.ordinary, p.yyy_invertible, p.flat) {
            (false, _, _) => "not ordinary",
            (true, None, _) => "ordinary",
            (true, Some(false), _) => "YYY singular",
            (true, Some(true), Some(true)) => "flat",
            (true, Some(true), _) => match p.flat_modulo_nilpotents {
                Some(true) => "curvature nonzero only in nilpotent terms",
                _ => "curvature nonzero",
            },
        };
        let _ = writeln!(s, "{line}: {status}");
    }
    let _ = writeln!(s, "verdict: {}", r.verdict.label());
    match r.verdict {
        Verdict::Flat => {
            let _ = writeln!(s, "rank: {}", r.rank.upper);
        }
        Verdict::NotFlat => {
            if let Some(w) = &r.witness {
                let _ = writeln!(s, "witness: K({},{})[{},{}] = {}", w.r, w.s, w.row, w.col, w.value);
            }
            if let Some(m) = r.flat_prefix {
                let _ = writeln!(s, "largest invariant flat prefix: {m}");
            }
            let _ = writeln!(s, "rank: {} <= rank <= {}", r.rank.lower, r.rank.upper);
        }
        Verdict::NotCalibrated | Verdict::NotOrdinary => {
            let _ = writeln!(s, "rank <= {}", r.rank.upper);
        }
    }
    if let Some(sb) = &r.subbundle {
        let _ = writeln!(
            s,
            "subbundle of size {}: {}, {}",
            sb.indices.len(),
            if sb.invariant { "invariant" } else { "not invariant" },
            if sb.flat_restriction { "flat restriction" } else { "restriction not flat" }
        );
    }
    for n in &r.notes {
        let _ = writeln!(s, "note: {n}");
    }
    s
}

fn cmd_matrices(args: &MatricesArgs) -> Result<u8> {
    let (web, source, _) = load(&args.input)?;
    let p = match &args.at {
        Some(s) => SamplePoint::explicit(parse_point(s, web.n)?),
        None => sample_point(web.n, args.seed, 0, args.height.max(2)),
    };
    let report = matrices_at(&web, &source, &p, args.input.order)?;
    if args.json {
        println!("{}", serde_json::to_string_pretty(&report)?);
    } else {
        print!("{}", render_matrices(&report));
    }
    Ok(if report.stopped.is_some() { EXIT_ERROR } else { 0 })
}

fn render_matrices(r: &MatricesReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "web: {} at ({})", r.source, r.coords.join(", "));
    for m in &r.matrices {
        let _ = writeln!(s, "{} ({} x {}):", m.name, m.rows, m.cols);
        let width = m.entries.iter().flatten().map(String::len).max().unwrap_or(0);
        for row in &m.entries {
            let cells: Vec<String> = row.iter().map(|e| format!("{e:>width$}")).collect();
            let _ = writeln!(s, "  [{}]", cells.join("  "));
        }
    }
    if let Some(why) = &r.stopped {
        let _ = writeln!(s, "stopped: {why}");
    }
    s
}

fn cmd_identity(args: &IdentityArgs) -> Result<u8> {
    if args.from < 2 || args.to < args.from {
        bail!("need 2 <= --from <= --to");
    }
    let rows: Vec<(usize, usize, usize)> = (args.from..=args.to)
        .map(|n| {
            let (sum, bound) = wb_rank_identity(n);
            (n, sum, bound)
        })
        .collect();
    let all_ok = rows.iter().all(|(_, a, b)| a == b);
    if args.json {
        let v: Vec<serde_json::Value> = rows
            .iter()
            .map(|(n, a, b)| serde_json::json!({ "n": n, "sum": a, "pi_prime": b, "pass": a == b }))
            .collect();
        println!("{}", serde_json::to_string_pretty(&serde_json::json!({ "schema": 1, "rows": v }))?);
    } else {
        println!("{:>3} {:>8} {:>8}", "n", "sum", "pi'");
        for (n, a, b) in &rows {
            println!("{n:>3} {a:>8} {b:>8}  {}", if a == b { "pass" } else { "FAIL" });
        }
    }
    Ok(if all_ok { 0 } else { 1 })
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Analyze(a) => cmd_analyze(&a),
        Command::Matrices(a) => cmd_matrices(&a),
        Command::Identity(a) => cmd_identity(&a),
        Command::List => {
            for name in corpus::NAMES {
                println!("{name}");
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
