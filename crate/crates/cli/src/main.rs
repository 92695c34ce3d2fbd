//! `wonderbraid`: intersection lattices, building sets, (r,n)-graphs and
//! structural checks from the command line.
//!
//! Exit codes: 0 ok, 1 claim failure, 2 usage or input error, 3 resource cap.

use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use wonderbraid_core::arrangement::{
    braid_arrangement, parse_arrangement, r_braid_arrangement, Arrangement, DuplicatePolicy,
};
use wonderbraid_core::building::{
    blowup_schedule, enumerate_nested_sets, maximal_building_set, minimal_building_set, BuildingError,
    NestedSetOptions, DEFAULT_NESTED_CAP,
};
use wonderbraid_core::export::{
    building_json, graph_dot, graph_list_json, lattice_dot, lattice_json, lattice_summary, SCHEMA,
};
use wonderbraid_core::finite_field::{complement_count_mod_q, is_prime, DEFAULT_ENUMERATION_CAP};
use wonderbraid_core::graphs::{enumerate_rn_graphs, rn_graph_count, GraphError};
use wonderbraid_core::lattice::{intersection_lattice, IntersectionLattice, LatticeConfig, LatticeError, DEFAULT_FLAT_CAP};
use wonderbraid_core::poset::IsoLimits;
use wonderbraid_core::verify::{verify, Status, VerifyConfig};

const CAP_ENV: &str = "WONDERBRAID_CAP_FLATS";

#[derive(Parser)]
#[command(name = "wonderbraid", version, about = "Exact combinatorics of braid and r-braid arrangements")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Intersection lattice with Hasse diagram and summary.
    Lattice {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Minimal or maximal building set, blow-up schedule and nested sets.
    BuildingSet {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Use the maximal building set instead of the minimal one.
        #[arg(long)]
        maximal: bool,
        /// Report only projectively nonempty members.
        #[arg(long)]
        geometric: bool,
        /// Include the blow-up schedule.
        #[arg(long)]
        schedule: bool,
        /// Count nested sets up to this size.
        #[arg(long, value_name = "MAX_SIZE")]
        nested: Option<usize>,
        /// List the nested sets, not only their counts.
        #[arg(long, requires = "nested")]
        list_nested: bool,
        #[arg(long, default_value_t = DEFAULT_NESTED_CAP)]
        cap_nested: usize,
    },
    /// Enumerate (r,n)-graphs.
    Graphs {
        /// Parameters as `r,n`.
        #[arg(long, value_parser = parse_pair::<u32, usize>)]
        rn: (u32, usize),
        #[command(flatten)]
        common: Common,
        /// Print only the number of graphs.
        #[arg(long)]
        count: bool,
        /// Print all graphs as JSON.
        #[arg(long)]
        list: bool,
        /// Print one graph in DOT; needs --index.
        #[arg(long, requires = "index")]
        dot: bool,
        /// Position in the enumeration order.
        #[arg(long)]
        index: Option<usize>,
    },
    /// Characteristic polynomial with a finite-field cross-check.
    Charpoly {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Primes q to check chi(q) against point counts over F_q.
        #[arg(long, value_delimiter = ',')]
        check_primes: Vec<u64>,
    },
    /// Check the structural claims and print a report.
    Verify {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long, default_value_t = 5)]
        prime_floor: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_NESTED_CAP)]
        cap_nested: usize,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// Braid arrangement on n coordinates.
    #[arg(long, value_name = "N")]
    braid: Option<usize>,
    /// r-braid arrangement, as `r,n`.
    #[arg(long, value_name = "R,N", value_parser = parse_pair::<u32, usize>)]
    rbraid: Option<(u32, usize)>,
    /// JSON arrangement file `{"r", "n", "hyperplanes": [...]}`.
    #[arg(long, value_name = "PATH")]
    file: Option<PathBuf>,
}

#[derive(Args)]
struct Common {
    /// Worker threads; results do not depend on it.
    #[arg(long)]
    threads: Option<usize>,
    /// Maximum number of flats (or graphs); overrides WONDERBRAID_CAP_FLATS.
    #[arg(long)]
    cap_flats: Option<usize>,
    /// Wall-clock budget in seconds for poset isomorphism searches.
    #[arg(long)]
    timeout: Option<u64>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Dot,
    Text,
}

fn parse_pair<A: std::str::FromStr, B: std::str::FromStr>(s: &str) -> Result<(A, B), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected `a,b`, got `{s}`"))?;
    let a = a.trim().parse().map_err(|_| format!("bad first component in `{s}`"))?;
    let b = b.trim().parse().map_err(|_| format!("bad second component in `{s}`"))?;
    Ok((a, b))
}

enum Failure {
    Claim(String),
    Input(String),
    Cap(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Claim(_) => 1,
            Failure::Input(_) => 2,
            Failure::Cap(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Claim(m) | Failure::Input(m) | Failure::Cap(m) => m,
        }
    }
}

type CliResult = Result<(), Failure>;

impl Common {
    fn setup(&self) -> Result<(), Failure> {
        if let Some(t) = self.threads {
            if t == 0 {
                return Err(Failure::Input("--threads must be positive".into()));
            }
            rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build_global()
                .map_err(|e| Failure::Input(e.to_string()))?;
        }
        Ok(())
    }

    fn flat_cap(&self) -> Result<usize, Failure> {
        let cap = match self.cap_flats {
            Some(c) => c,
            None => match std::env::var(CAP_ENV) {
                Ok(v) => v
                    .trim()
                    .parse()
                    .map_err(|_| Failure::Input(format!("{CAP_ENV} must be a positive integer, got `{v}`")))?,
                Err(_) => DEFAULT_FLAT_CAP,
            },
        };
        if cap == 0 {
            return Err(Failure::Input("the flat cap must be positive".into()));
        }
        Ok(cap)
    }

    fn iso_limits(&self) -> IsoLimits {
        IsoLimits {
            deadline: self.timeout.map(|s| Instant::now() + Duration::from_secs(s)),
            ..IsoLimits::default()
        }
    }
}

impl Source {
    fn load(&self) -> Result<Arrangement, Failure> {
        let input = |e: wonderbraid_core::arrangement::ArrangementError| Failure::Input(e.to_string());
        if let Some(n) = self.braid {
            return braid_arrangement(n).map_err(input);
        }
        if let Some((r, n)) = self.rbraid {
            return r_braid_arrangement(r, n).map_err(input);
        }
        let path = self.file.as_ref().expect("clap requires one source");
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))?;
        let (arr, warnings) = parse_arrangement(&text, DuplicatePolicy::Warn)
            .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
        for w in warnings {
            eprintln!(
                "warning: hyperplane {} duplicates hyperplane {} and was dropped",
                w.index, w.first
            );
        }
        Ok(arr)
    }
}

fn build_lattice(arr: &Arrangement, common: &Common) -> Result<IntersectionLattice, Failure> {
    let flat_cap = common.flat_cap()?;
    intersection_lattice(arr, LatticeConfig { flat_cap }).map_err(|e| match e {
        LatticeError::FlatCap { .. } => Failure::Cap(e.to_string()),
        other => Failure::Input(other.to_string()),
    })
}

fn emit(text: &str) -> CliResult {
    let mut out = std::io::stdout().lock();
    out.write_all(text.as_bytes())
        .and_then(|_| if text.ends_with('\n') { Ok(()) } else { out.write_all(b"\n") })
        .map_err(|e| Failure::Input(format!("cannot write output: {e}")))
}

fn emit_json<T: Serialize>(value: &T) -> CliResult {
    emit(&serde_json::to_string_pretty(value).expect("serializable"))
}

fn unsupported(format: Format, command: &str) -> Failure {
    let name = format.to_possible_value().expect("no skipped variants").get_name().to_string();
    Failure::Input(format!("format `{name}` is not available for {command}"))
}

fn csv_text(header: &[&str], rows: Vec<Vec<String>>) -> Result<String, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| Failure::Input(e.to_string());
    w.write_record(header).map_err(err)?;
    for row in rows {
        w.write_record(&row).map_err(err)?;
    }
    let bytes = w.into_inner().map_err(|e| Failure::Input(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv of utf-8 fields"))
}

fn cmd_lattice(source: &Source, common: &Common, format: Format) -> CliResult {
    let lat = build_lattice(&source.load()?, common)?;
    match format {
        Format::Json => emit_json(&lattice_json(&lat)),
        Format::Dot => emit(&lattice_dot(&lat)),
        Format::Csv => {
            let json = lattice_json(&lat);
            let rows = json
                .flats
                .into_iter()
                .map(|f| {
                    vec![
                        f.id.to_string(),
                        (lat.arrangement().ambient_dim() - f.lin_dim).to_string(),
                        f.lin_dim.to_string(),
                        f.proj_empty.to_string(),
                        f.hset.iter().map(usize::to_string).collect::<Vec<_>>().join(" "),
                        f.equations.join("; "),
                    ]
                })
                .collect();
            emit(&csv_text(&["id", "rank", "lin_dim", "proj_empty", "hset", "equations"], rows)?)
        }
        Format::Text => {
            let s = lattice_summary(&lat);
            let mut out = format!(
                "kind: {}\nhyperplanes: {}\nflats: {}\nrank: {}\ncharacteristic polynomial: {}\n",
                s.kind, s.hyperplanes, s.flats, s.rank, s.characteristic_polynomial
            );
            for (dim, count) in s.counts_by_dim.iter().enumerate() {
                out.push_str(&format!("flats of linear dimension {dim}: {count}\n"));
            }
            emit(&out)
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_building_set(
    source: &Source,
    common: &Common,
    format: Format,
    maximal: bool,
    geometric: bool,
    schedule: bool,
    nested: Option<usize>,
    list_nested: bool,
    cap_nested: usize,
) -> CliResult {
    let lat = build_lattice(&source.load()?, common)?;
    let (which, g) = if maximal {
        ("maximal", maximal_building_set(&lat))
    } else {
        ("minimal", minimal_building_set(&lat))
    };
    let sched = schedule.then(|| blowup_schedule(&lat, &g));
    let report = match nested {
        Some(max_size) => {
            let options = NestedSetOptions {
                max_size,
                geometric_only: geometric,
                cap: cap_nested,
            };
            Some(enumerate_nested_sets(&lat, &g, options).map_err(|e| match e {
                BuildingError::NestedCap { .. } => Failure::Cap(e.to_string()),
                other => Failure::Input(other.to_string()),
            })?)
        }
        None => None,
    };
    let mut json = building_json(&lat, which, &g, sched.as_ref(), report.as_ref().map(|r| (r, list_nested)));
    if geometric {
        json.members = json.geometric_members.clone();
    }
    match format {
        Format::Json => emit_json(&json),
        Format::Text => {
            let mut out = format!("{which} building set: {} members\n", json.members.len());
            out.push_str(&format!("members: {:?}\n", json.members));
            if !geometric && !json.flagged_empty.is_empty() {
                out.push_str(&format!("projectively empty members: {:?}\n", json.flagged_empty));
            }
            if let Some(s) = &json.schedule {
                out.push_str(&format!("schedule: {} centers\n", s.len()));
                for e in s {
                    out.push_str(&format!("  flat {} (dimension {})\n", e.id, e.dim));
                }
            }
            if let Some(nj) = &json.nested {
                for (size, count) in &nj.by_size {
                    out.push_str(&format!("nested sets of size {size}: {count}\n"));
                }
            }
            emit(&out)
        }
        Format::Csv => {
            let rows = json
                .members
                .iter()
                .map(|&id| {
                    let f = lat.flat(id);
                    vec![id.to_string(), f.lin_dim.to_string(), f.proj_empty.to_string()]
                })
                .collect();
            emit(&csv_text(&["id", "lin_dim", "proj_empty"], rows)?)
        }
        Format::Dot => Err(unsupported(format, "building-set")),
    }
}

fn cmd_graphs(
    (r, n): (u32, usize),
    common: &Common,
    count: bool,
    list: bool,
    dot: bool,
    index: Option<usize>,
) -> CliResult {
    let cap = common.flat_cap()? as u128;
    if count {
        if r < 2 || n == 0 {
            return Err(Failure::Input(GraphError::BadParameters.to_string()));
        }
        return emit(&rn_graph_count(r, n).to_string());
    }
    let graphs = enumerate_rn_graphs(r, n, cap).map_err(|e| match e {
        GraphError::Cap { .. } => Failure::Cap(e.to_string()),
        other => Failure::Input(other.to_string()),
    })?;
    if let Some(i) = index {
        let g = graphs
            .get(i)
            .ok_or_else(|| Failure::Input(format!("index {i} out of range: there are {} graphs", graphs.len())))?;
        return if dot {
            emit(&graph_dot(g))
        } else {
            emit_json(&g.to_json())
        };
    }
    if list {
        return emit_json(&graph_list_json(r, n, &graphs));
    }
    emit(&graphs.len().to_string())
}

#[derive(Serialize)]
struct PrimeCheck {
    q: u64,
    chi: String,
    count: u64,
    equal: bool,
}

#[derive(Serialize)]
struct CharpolyJson {
    schema: &'static str,
    coefficients: Vec<String>,
    polynomial: String,
    checks: Vec<PrimeCheck>,
}

fn cmd_charpoly(source: &Source, common: &Common, format: Format, primes: &[u64]) -> CliResult {
    let arr = source.load()?;
    let lat = build_lattice(&arr, common)?;
    let chi = lat.characteristic_polynomial();
    let mut checks = Vec::new();
    for &q in primes {
        if !is_prime(q) {
            return Err(Failure::Input(format!("{q} is not prime")));
        }
        let count = complement_count_mod_q(&arr, q, DEFAULT_ENUMERATION_CAP).map_err(|e| match e {
            wonderbraid_core::finite_field::FiniteFieldError::TooLarge { .. } => Failure::Cap(e.to_string()),
            other => Failure::Input(other.to_string()),
        })?;
        let value = chi.eval(q as i128);
        checks.push(PrimeCheck {
            q,
            chi: value.to_string(),
            count,
            equal: value == count as i128,
        });
    }
    let mismatch = checks.iter().find(|c| !c.equal).map(|c| c.q);
    match format {
        Format::Json => emit_json(&CharpolyJson {
            schema: SCHEMA,
            coefficients: chi.coeffs.iter().map(i128::to_string).collect(),
            polynomial: chi.to_string(),
            checks,
        })?,
        Format::Text => {
            let mut out = format!("chi(t) = {chi}\n");
            for c in &checks {
                let rel = if c.equal { "=" } else { "!=" };
                out.push_str(&format!("chi({}) = {} {rel} {} points over F_{}\n", c.q, c.chi, c.count, c.q));
            }
            emit(&out)?
        }
        Format::Csv => {
            let rows = checks
                .iter()
                .map(|c| vec![c.q.to_string(), c.chi.clone(), c.count.to_string(), c.equal.to_string()])
                .collect();
            emit(&csv_text(&["q", "chi", "count", "equal"], rows)?)?
        }
        Format::Dot => return Err(unsupported(format, "charpoly")),
    }
    match mismatch {
        Some(q) => Err(Failure::Claim(format!("chi({q}) differs from the point count"))),
        None => Ok(()),
    }
}

fn cmd_verify(source: &Source, common: &Common, format: Format, prime_floor: u64, seed: u64, cap_nested: usize) -> CliResult {
    let arr = source.load()?;
    let config = VerifyConfig {
        flat_cap: common.flat_cap()?,
        nested_cap: cap_nested,
        prime_floor,
        seed,
        iso: common.iso_limits(),
        ..VerifyConfig::default()
    };
    let (report, timings) = verify(&arr, &config);
    match format {
        Format::Json => emit_json(&report)?,
        Format::Text => {
            let mut out = String::new();
            for (c, t) in report.claims.iter().zip(&timings) {
                let status = match c.status {
                    Status::Pass => "PASS",
                    Status::Fail => "FAIL",
                    Status::Skip => "SKIP",
                };
                out.push_str(&format!(
                    "{status} {} [{}] ({:.3}s): {}\n",
                    c.claim,
                    c.instance,
                    t.as_secs_f64(),
                    c.detail
                ));
            }
            let s = &report.summary;
            out.push_str(&format!("{} passed, {} failed, {} skipped\n", s.passed, s.failed, s.skipped));
            emit(&out)?
        }
        Format::Csv => {
            let rows = report
                .claims
                .iter()
                .zip(&timings)
                .map(|(c, t)| {
                    let status = serde_json::to_value(c.status).expect("serializable");
                    vec![
                        c.claim.clone(),
                        c.instance.clone(),
                        status.as_str().expect("string").to_string(),
                        format!("{:.3}", t.as_secs_f64()),
                        c.detail.clone(),
                    ]
                })
                .collect();
            emit(&csv_text(&["claim", "instance", "status", "seconds", "detail"], rows)?)?
        }
        Format::Dot => return Err(unsupported(format, "verify")),
    }
    if format == Format::Json {
        let total: Duration = timings.iter().sum();
        eprintln!("verify finished in {:.3}s", total.as_secs_f64());
    }
    let s = &report.summary;
    if s.failed > 0 {
        Err(Failure::Claim(format!("{} claim(s) failed", s.failed)))
    } else if s.skipped > 0 {
        let reason = report
            .claims
            .iter()
            .find(|c| c.status == Status::Skip)
            .map(|c| c.detail.clone())
            .unwrap_or_default();
        Err(Failure::Cap(format!("{} claim(s) skipped: {reason}", s.skipped)))
    } else {
        Ok(())
    }
}

fn run(cli: Cli) -> CliResult {
    match cli.command {
        Command::Lattice { source, common, format } => {
            common.setup()?;
            cmd_lattice(&source, &common, format)
        }
        Command::BuildingSet {
            source,
            common,
            format,
            maximal,
            geometric,
            schedule,
            nested,
            list_nested,
            cap_nested,
        } => {
            common.setup()?;
            cmd_building_set(&source, &common, format, maximal, geometric, schedule, nested, list_nested, cap_nested)
        }
        Command::Graphs {
            rn,
            common,
            count,
            list,
            dot,
            index,
        } => {
            common.setup()?;
            cmd_graphs(rn, &common, count, list, dot, index)
        }
        Command::Charpoly {
            source,
            common,
            format,
            check_primes,
        } => {
            common.setup()?;
            cmd_charpoly(&source, &common, format, &check_primes)
        }
        Command::Verify {
            source,
            common,
            format,
            prime_floor,
            seed,
            cap_nested,
        } => {
            common.setup()?;
            cmd_verify(&source, &common, format, prime_floor, seed, cap_nested)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
