//! `delsarte` — exact invariants of weighted Delsarte surfaces.
//!
//! Thin clap frontend over the `delsarte` library and the scan/oracle
//! machinery in `delsarte_cli`.  Exit codes: 0 success, 2 rejected input,
//! 3 refused by a cap, 1 internal failure or failed consistency check.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use delsarte::characters::fermat_report;
use delsarte::newton::HollowClassification;
use delsarte::{
    analyze, elliptic_family, named_example, AnalyzeOptions, DelsartePolynomial, Error,
    LatticePolygon, LatticePolytope, Result, SurfaceReport,
};
use delsarte_cli::oracle::{run_oracle_check, OracleConfig};
use delsarte_cli::scan::{run_scan, ScanConfig, Template};
use delsarte_cli::{exit_code, parse_point_file, PointFile};

#[derive(Parser)]
#[command(
    name = "delsarte",
    version,
    about = "Exact Picard-theoretic invariants of weighted Delsarte surfaces",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze one surface and print its full invariant report.
    Analyze(AnalyzeArgs),
    /// Check the closed-form elliptic-fibration family against the pipeline.
    Family(FamilyArgs),
    /// Invariants of the degree-d Fermat surface.
    Fermat(FermatArgs),
    /// Lattice-geometry analysis of a polytope given by its vertices.
    Polytope(PolytopeArgs),
    /// Search exponent-matrix spaces for maximal-Picard surfaces.
    Scan(ScanArgs),
    /// Recompute a corpus with slow independent oracles and compare.
    OracleCheck(OracleCheckArgs),
}

#[derive(Args)]
#[command(group(
    ArgGroup::new("input").required(true).args(["poly", "matrix_file", "example"])
))]
struct AnalyzeArgs {
    /// Polynomial text, e.g. "x0^3 + x1^3 + x2^4 + x2^2*x3^6".
    #[arg(long)]
    poly: Option<String>,
    /// File with one exponent row per line (four integers, # comments).
    #[arg(long)]
    matrix_file: Option<PathBuf>,
    /// Built-in example id (X119, X12, X30, X36).
    #[arg(long)]
    example: Option<String>,
    /// Emit the report as JSON instead of text.
    #[arg(long)]
    json: bool,
    /// Refuse to enumerate character groups larger than this.
    #[arg(long, default_value_t = 10_000_000)]
    max_group_order: u64,
    /// Skip the Newton polytope and Fine interior block.
    #[arg(long)]
    skip_newton: bool,
}

#[derive(Args)]
#[command(group(ArgGroup::new("param").required(true).args(["s", "s_range"])))]
struct FamilyArgs {
    /// Single family parameter.
    #[arg(long)]
    s: Option<u64>,
    /// Inclusive parameter range, e.g. "1..10".
    #[arg(long)]
    s_range: Option<String>,
    #[arg(long)]
    json: bool,
    #[arg(long, default_value_t = 10_000_000)]
    max_group_order: u64,
}

#[derive(Args)]
struct FermatArgs {
    /// Degree of the Fermat surface.
    #[arg(long)]
    d: u64,
    #[arg(long)]
    json: bool,
    #[arg(long, default_value_t = 10_000_000)]
    max_group_order: u64,
}

#[derive(Args)]
struct PolytopeArgs {
    /// Vertex file: one point per line, comma-separated integers,
    /// two or three coordinates.
    #[arg(long)]
    file: PathBuf,
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum TemplateArg {
    Uniform,
    Cyclic,
    NearDiagonal,
}

impl From<TemplateArg> for Template {
    fn from(t: TemplateArg) -> Template {
        match t {
            TemplateArg::Uniform => Template::Uniform,
            TemplateArg::Cyclic => Template::Cyclic,
            TemplateArg::NearDiagonal => Template::NearDiagonal,
        }
    }
}

#[derive(Args)]
struct ScanArgs {
    /// Candidate matrix shape.
    #[arg(long, value_enum, default_value_t = TemplateArg::NearDiagonal)]
    template: TemplateArg,
    /// Inclusive upper bound on matrix entries.
    #[arg(long)]
    entry_bound: u64,
    /// Number of candidates to sample (ignored with --exhaustive).
    #[arg(long, default_value_t = 10_000)]
    count: u64,
    /// Keep only surfaces with geometric genus at least this.
    #[arg(long, default_value_t = 1)]
    min_pg: u64,
    /// Append-only JSONL store of discoveries.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 1)]
    threads: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Enumerate the whole template space (near-diagonal only).
    #[arg(long)]
    exhaustive: bool,
    #[arg(long, default_value_t = 10_000_000)]
    max_group_order: u64,
}

#[derive(Args)]
struct OracleCheckArgs {
    /// Largest Fermat degree to enumerate (hard ceiling 30).
    #[arg(long, default_value_t = 12)]
    d_max: u64,
    /// Random matrices to draw on top of the fixtures.
    #[arg(long, default_value_t = 25)]
    random_count: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 10_000_000)]
    max_group_order: u64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Analyze(args) => cmd_analyze(&args),
        Command::Family(args) => cmd_family(&args),
        Command::Fermat(args) => cmd_fermat(&args),
        Command::Polytope(args) => cmd_polytope(&args),
        Command::Scan(args) => cmd_scan(&args),
        Command::OracleCheck(args) => cmd_oracle_check(&args),
    };
    match code {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}

fn read_input_file(path: &PathBuf) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidParameter(format!("cannot read {}: {}", path.display(), e)))
}

fn group_name(factors: &[String]) -> String {
    if factors.is_empty() {
        "trivial".to_string()
    } else {
        factors
            .iter()
            .map(|f| format!("Z/{f}"))
            .collect::<Vec<_>>()
            .join(" x ")
    }
}

fn print_report(r: &SurfaceReport) {
    println!("{:<18}{}", "input", r.input);
    println!("{:<18}{}", "charges", r.charges.join(", "));
    println!("{:<18}P({})", "weights", r.weights.join(", "));
    println!(
        "{:<18}m = {}   (Fermat cover degree d = {})",
        "degree", r.weighted_degree, r.fermat_degree
    );
    println!(
        "{:<18}{}",
        "well-formed",
        if r.well_formed { "yes" } else { "no" }
    );
    println!(
        "{:<18}{}",
        "quasismooth",
        if r.quasismooth { "yes" } else { "no" }
    );
    for s in &r.failing_strata {
        let vars: Vec<String> = s.variables.iter().map(|v| format!("x{v}")).collect();
        println!("{:<18}stratum {{{}}}: {}", "", vars.join(", "), s.reason);
    }
    println!("{:<18}{}", "assumption", r.singularity_assumption);
    println!("{:<18}{}", "Aut_tor(f)", group_name(&r.aut_tor_polynomial));
    println!("{:<18}{}", "Aut_tor(X)", group_name(&r.aut_tor_surface));
    println!("{:<18}{}", "Gamma", group_name(&r.gamma));
    println!("{:<18}{}", "group exponent", r.group_exponent);
    let c = &r.character_counts;
    println!(
        "{:<18}{} total, {} interior; slices {}/{}/{}; stable middle {}",
        "characters", c.total, c.interior, c.slices[0], c.slices[1], c.slices[2], c.stable_middle
    );
    let gens: Vec<String> = r
        .generators
        .iter()
        .map(|g| format!("({}, {}, {}, {})", g[0], g[1], g[2], g[3]))
        .collect();
    println!("{:<18}{}", "generators", gens.join("  "));
    println!("{:<18}{}", "lambda", r.lambda);
    println!("{:<18}{}", "p_g", r.geometric_genus);
    println!(
        "{:<18}{}   [{}]",
        "maximal Picard",
        if r.maximal_picard { "yes" } else { "no" },
        r.criterion
    );
    match &r.newton {
        Some(n) => {
            let table = match n.hollow_table_match {
                Some(id) => format!("table simplex {id}"),
                None => "no table match".to_string(),
            };
            let quotient = match &n.vertex_quotient {
                Some(q) => format!(", vertex quotient {}", group_name(q)),
                None => String::new(),
            };
            println!(
                "{:<18}{} interior point{}, {}; Fine interior dim {}, Kodaira {}; {}{}",
                "Newton polytope",
                n.interior_count,
                if n.interior_count == 1 { "" } else { "s" },
                if n.hollow { "hollow" } else { "not hollow" },
                n.fine_dim,
                n.kodaira,
                table,
                quotient
            );
        }
        None => println!("{:<18}skipped", "Newton polytope"),
    }
    println!(
        "{:<18}{}: {}",
        "rationality", r.rationality.verdict, r.rationality.reason
    );
    println!(
        "{:<18}{} us total (weights {}, characters {}, lefschetz {}, newton {})",
        "time",
        r.timings.total_us,
        r.timings.weights_us,
        r.timings.characters_us,
        r.timings.lefschetz_us,
        r.timings.newton_us
    );
}

fn cmd_analyze(args: &AnalyzeArgs) -> Result<u8> {
    let p = if let Some(text) = &args.poly {
        DelsartePolynomial::parse(text)?
    } else if let Some(path) = &args.matrix_file {
        DelsartePolynomial::from_matrix_file(&read_input_file(path)?)?
    } else {
        named_example(args.example.as_deref().expect("clap enforces the group"))?
    };
    let opts = AnalyzeOptions {
        character_cap: args.max_group_order,
        skip_newton: args.skip_newton,
    };
    let report = analyze(&p, &opts)?;
    if args.json {
        println!(
            "{}",
            serde_json::to_string_pretty(&report).expect("report serializes")
        );
    } else {
        print_report(&report);
    }
    Ok(0)
}

/// Fields of a family row that differ between the closed form and the
/// recomputed pipeline values.  Empty means agreement.
fn family_diff(expected: &delsarte::family::ExpectedInvariants, r: &SurfaceReport) -> Vec<String> {
    let mut diff = Vec::new();
    let want: Vec<String> = expected.weights.iter().map(|w| w.to_string()).collect();
    if want != r.weights {
        diff.push("weights".to_string());
    }
    if expected.degree.to_string() != r.weighted_degree {
        diff.push("degree".to_string());
    }
    let want_group: Vec<String> = expected
        .group
        .factors()
        .iter()
        .map(|f| f.to_string())
        .collect();
    if want_group != r.aut_tor_surface {
        diff.push("group".to_string());
    }
    if expected.geometric_genus.to_string() != r.geometric_genus.to_string() {
        diff.push("p_g".to_string());
    }
    if expected.lefschetz.to_string() != r.lambda.to_string() {
        diff.push("lambda".to_string());
    }
    if !r.maximal_picard {
        diff.push("max_picard".to_string());
    }
    diff
}

fn parse_range(text: &str) -> Result<(u64, u64)> {
    let parts: Vec<&str> = text.split("..").collect();
    let err = || {
        Error::InvalidParameter(format!(
            "--s-range wants an inclusive range like 1..10, got {text:?}"
        ))
    };
    if parts.len() != 2 {
        return Err(err());
    }
    let lo: u64 = parts[0].trim().parse().map_err(|_| err())?;
    let hi: u64 = parts[1].trim().parse().map_err(|_| err())?;
    if lo == 0 || hi < lo {
        return Err(err());
    }
    Ok((lo, hi))
}

fn cmd_family(args: &FamilyArgs) -> Result<u8> {
    let (lo, hi) = match (args.s, &args.s_range) {
        (Some(s), None) => (s, s),
        (None, Some(r)) => parse_range(r)?,
        _ => unreachable!("clap enforces the group"),
    };
    let opts = AnalyzeOptions {
        character_cap: args.max_group_order,
        skip_newton: true,
    };
    let mut failures = 0u64;
    let mut rows = Vec::new();
    for s in lo..=hi {
        let inst = elliptic_family(s)?;
        let report = analyze(&inst.polynomial, &opts)?;
        let diff = family_diff(&inst.expected, &report);
        if !diff.is_empty() {
            failures += 1;
        }
        if args.json {
            rows.push(serde_json::json!({
                "s": s,
                "weights": report.weights,
                "degree": report.weighted_degree,
                "group": report.aut_tor_surface,
                "p_g": report.geometric_genus,
                "lambda": report.lambda,
                "max_picard": report.maximal_picard,
                "diff": diff,
            }));
        } else {
            println!(
                "s={:<4} weights P({:<24}) m={:<8} group {:<12} p_g={:<5} lambda={:<5} max={:<4} diff: {}",
                s,
                report.weights.join(", "),
                report.weighted_degree,
                group_name(&report.aut_tor_surface),
                report.geometric_genus,
                report.lambda,
                if report.maximal_picard { "yes" } else { "no" },
                if diff.is_empty() { "none".to_string() } else { diff.join(", ") }
            );
        }
    }
    if args.json {
        println!(
            "{}",
            serde_json::to_string_pretty(&rows).expect("rows serialize")
        );
    }
    if failures > 0 {
        eprintln!("family check failed for {failures} parameter value(s)");
        return Ok(1);
    }
    Ok(0)
}

fn cmd_fermat(args: &FermatArgs) -> Result<u8> {
    let r = fermat_report(args.d, args.max_group_order)?;
    if args.json {
        let v = serde_json::json!({
            "d": r.d,
            "b2": r.b2,
            "lambda": r.lambda,
            "rho": r.rho,
            "h20": r.h20,
            "h11_prim": r.h11_prim,
            "max_picard": r.max_picard,
            "criterion": r.criterion_used.to_string(),
        });
        println!("{}", serde_json::to_string_pretty(&v).expect("serializes"));
    } else {
        println!(
            "d={} b2={} lambda={} rho={} h20={} h11_prim={} max_picard={} [{}]",
            r.d, r.b2, r.lambda, r.rho, r.h20, r.h11_prim, r.max_picard, r.criterion_used
        );
    }
    Ok(0)
}

fn rational_point_strings(v: &[num_rational::BigRational; 3]) -> Vec<String> {
    v.iter().map(|c| c.to_string()).collect()
}

fn cmd_polytope(args: &PolytopeArgs) -> Result<u8> {
    let text = read_input_file(&args.file)?;
    match parse_point_file(&text)? {
        PointFile::Dim2(pts) => {
            let poly = LatticePolygon::from_points(&pts)?;
            let interior = poly.interior_points()?.len();
            let genus = poly.genus()?;
            if args.json {
                let v = serde_json::json!({
                    "dimension": 2,
                    "vertices": poly.vertices().len(),
                    "interior_points": interior,
                    "genus": genus,
                });
                println!("{}", serde_json::to_string_pretty(&v).expect("serializes"));
            } else {
                println!("{:<18}2", "dimension");
                println!("{:<18}{}", "vertices", poly.vertices().len());
                println!("{:<18}{}", "interior points", interior);
                println!("{:<18}{}", "genus", genus);
            }
        }
        PointFile::Dim3(pts) => {
            let poly = LatticePolytope::from_points(&pts)?;
            let interior = poly.interior_points()?.len();
            let fine = delsarte::fine_interior(&poly)?;
            let hollow = interior == 0;
            // The hollow table only covers simplices; a hollow non-simplex
            // is reported without a table verdict rather than rejected.
            let classification: Option<HollowClassification> = if poly.is_simplex() {
                Some(delsarte::newton::classify_hollow_given(
                    &poly,
                    hollow,
                    fine.dim >= 0,
                )?)
            } else {
                None
            };
            if args.json {
                let v = serde_json::json!({
                    "dimension": 3,
                    "vertices": poly.vertices().len(),
                    "facets": poly.facets().len(),
                    "interior_points": interior,
                    "hollow": hollow,
                    "fine_dim": fine.dim,
                    "kodaira": fine.kodaira.to_string(),
                    "fine_vertices": fine
                        .vertices
                        .iter()
                        .map(rational_point_strings)
                        .collect::<Vec<_>>(),
                    "is_simplex": poly.is_simplex(),
                    "table_match": classification.as_ref().and_then(|c| c.table_match),
                    "vertex_quotient": classification
                        .as_ref()
                        .and_then(|c| c.quotient_group.as_ref())
                        .map(|g| {
                            g.factors().iter().map(|f| f.to_string()).collect::<Vec<_>>()
                        }),
                });
                println!("{}", serde_json::to_string_pretty(&v).expect("serializes"));
            } else {
                println!("{:<18}3", "dimension");
                println!(
                    "{:<18}{} ({} facets)",
                    "vertices",
                    poly.vertices().len(),
                    poly.facets().len()
                );
                println!("{:<18}{}", "interior points", interior);
                println!("{:<18}{}", "hollow", if hollow { "yes" } else { "no" });
                println!(
                    "{:<18}dim {}, Kodaira {}",
                    "Fine interior", fine.dim, fine.kodaira
                );
                match &classification {
                    Some(c) => match (c.table_match, &c.quotient_group) {
                        (Some(id), Some(g)) => {
                            let gs: Vec<String> =
                                g.factors().iter().map(|f| f.to_string()).collect();
                            println!(
                                "{:<18}simplex {} (quotient {})",
                                "table match",
                                id,
                                group_name(&gs)
                            );
                        }
                        _ => println!("{:<18}none", "table match"),
                    },
                    None => println!("{:<18}n/a (not a simplex)", "table match"),
                }
            }
        }
    }
    Ok(0)
}

fn cmd_scan(args: &ScanArgs) -> Result<u8> {
    let cfg = ScanConfig {
        template: args.template.into(),
        entry_bound: args.entry_bound,
        count: args.count,
        min_pg: args.min_pg,
        seed: args.seed,
        threads: args.threads,
        exhaustive: args.exhaustive,
        character_cap: args.max_group_order,
    };
    let summary = run_scan(&cfg, &args.out)?;
    println!(
        "examined {} candidate(s): {} rejected, {} filtered, {} capped",
        summary.examined, summary.rejected, summary.filtered, summary.capped
    );
    println!(
        "hits: {} new, {} already stored, {} duplicate in run",
        summary.new_hits, summary.known_hits, summary.duplicate_hits
    );
    let total = delsarte_cli::scan::load_store(&args.out)?.len();
    println!("store {} now holds {} record(s)", args.out.display(), total);
    Ok(0)
}

fn cmd_oracle_check(args: &OracleCheckArgs) -> Result<u8> {
    let cfg = OracleConfig {
        d_max: args.d_max,
        random_count: args.random_count,
        seed: args.seed,
        character_cap: args.max_group_order,
    };
    let out = run_oracle_check(&cfg)?;
    println!(
        "checked {} character set(s) and {} group structure(s) against oracles; {} skipped above d={}",
        out.surfaces_checked, out.groups_checked, out.skipped, args.d_max
    );
    if out.mismatches.is_empty() {
        println!("all agree");
        Ok(0)
    } else {
        for m in &out.mismatches {
            eprintln!("mismatch: {m}");
        }
        eprintln!("{} disagreement(s)", out.mismatches.len());
        Ok(1)
    }
}
