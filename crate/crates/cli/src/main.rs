//! Command-line surface over the glor library. Every command prints one
//! machine-readable envelope (JSON, or CSV rows for tabular results) and
//! signals through the exit code: 0 pass, 1 verification failure, 2 invalid
//! configuration, 3 resource cap exceeded, 4 no generic character exists.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use glor::chars::torus_order_at_level;
use glor::clfun::NUMERIC_RESIDUAL_TOL;
use glor::{
    compare_conditions, mackey_check, verify_letellier, verify_main_selected, LabConfig, LabError,
    TorusChars, TorusTable,
};

const SCHEMA_VERSION: u32 = 1;

#[derive(Parser)]
#[command(name = "glor", version, about = "Finite matrix groups over truncated valuation rings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Subcommand, Clone, Copy, PartialEq)]
enum Command {
    /// Enumerate the group and report subgroup orders.
    Group,
    /// Torus structure: order, cycle type, Weyl data.
    Torus,
    /// Character group data and the genericity census.
    Chars,
    /// Norm-1 and degree verification with Mackey and reciprocity oracles.
    VerifyMain,
    /// Compare the stabilizer, regularity, and general-position conditions.
    Prop35,
    /// Invariant-character pairings on the congruence kernel.
    Letellier,
    /// Oracle agreement for selected characters.
    MackeyCheck,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Group => "group",
            Command::Torus => "torus",
            Command::Chars => "chars",
            Command::VerifyMain => "verify-main",
            Command::Prop35 => "prop35",
            Command::Letellier => "letellier",
            Command::MackeyCheck => "mackey-check",
        }
    }
}

#[derive(Args)]
struct Opts {
    /// Residue characteristic (a prime).
    #[arg(long, global = true, default_value_t = 2)]
    p: u32,

    /// Field degree: the residue field is F_q with q = p^m.
    #[arg(long, global = true, default_value_t = 1)]
    m: u32,

    /// Matrix size.
    #[arg(long, global = true, default_value_t = 2)]
    n: usize,

    /// Ring length: matrices over F_q[pi]/pi^r.
    #[arg(long, global = true, default_value_t = 2)]
    r: u32,

    /// Torus shape as comma-separated Weyl cycle lengths summing to n.
    /// Defaults to the single n-cycle (Coxeter).
    #[arg(long, global = true)]
    torus: Option<String>,

    /// Character selection: "generic" (default), "all", or comma-separated ids.
    #[arg(long, global = true)]
    theta: Option<String>,

    /// Arithmetic route: exact only, numeric alongside, or both with a
    /// residual gate.
    #[arg(long, global = true, value_enum, default_value_t = Mode::Exact)]
    mode: Mode,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Directory for group element caches.
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,

    /// Worker threads for parallel reductions (default: all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
}

#[derive(ValueEnum, Clone, Copy, PartialEq)]
enum Mode {
    Exact,
    Numeric,
    Both,
}

#[derive(ValueEnum, Clone, Copy, PartialEq)]
enum Format {
    Json,
    Csv,
}

enum ThetaSel {
    Generic,
    All,
    Ids(Vec<u32>),
}

#[derive(Serialize)]
struct Envelope {
    schema_version: u32,
    tool: ToolId,
    command: &'static str,
    config: LabConfig,
    results: Value,
    timings_ms: BTreeMap<&'static str, u128>,
    cache_checksums: BTreeMap<&'static str, String>,
}

#[derive(Serialize)]
struct ToolId {
    name: &'static str,
    version: &'static str,
}

/// A failure with its exit code; code 2 marks configuration errors.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn config(message: impl Into<String>) -> Failure {
        Failure { code: 2, message: message.into() }
    }
}

impl From<LabError> for Failure {
    fn from(err: LabError) -> Failure {
        let code = match err {
            LabError::SizeCap { .. } => 3,
            LabError::NoGenericCharacter => 4,
            LabError::NonPrime(_)
            | LabError::OddLevel { .. }
            | LabError::LevelOutOfRange { .. }
            | LabError::IncompatibleSpecs(_)
            | LabError::Unsupported(_) => 2,
            _ => 1,
        };
        Failure { code, message: err.to_string() }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(workers) = cli.opts.workers {
        // A second initialization (e.g. in tests) is harmless.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(workers).build_global();
    }

    match run(cli.command, &cli.opts) {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

fn run(command: Command, opts: &Opts) -> Result<u8, Failure> {
    let config = lab_config(opts)?;
    let started = Instant::now();

    let (results, code) = match command {
        Command::Group => cmd_group(&config)?,
        Command::Torus => cmd_torus(&config)?,
        Command::Chars => cmd_chars(&config)?,
        Command::VerifyMain => cmd_verify_main(&config, opts)?,
        Command::Prop35 => cmd_prop35(&config)?,
        Command::Letellier => cmd_letellier(&config)?,
        Command::MackeyCheck => cmd_mackey_check(&config, opts)?,
    };

    let mut timings_ms = BTreeMap::new();
    timings_ms.insert("total", started.elapsed().as_millis());

    // Only groups actually materialized with a cache directory get a
    // checksum; a warm cache makes this rebuild a plain file load.
    let mut cache_checksums = BTreeMap::new();
    let report_checksum = command == Command::Group
        || (config.cache_dir.is_some() && command != Command::Letellier);
    if report_checksum {
        if let Ok(group) = config.build_group() {
            cache_checksums.insert("group_elements", format!("{:016x}", group.element_checksum()));
        }
    }

    let envelope = Envelope {
        schema_version: SCHEMA_VERSION,
        tool: ToolId { name: "glor", version: env!("CARGO_PKG_VERSION") },
        command: command.name(),
        config,
        results,
        timings_ms,
        cache_checksums,
    };

    match opts.format {
        Format::Json => {
            println!("{}", serde_json::to_string_pretty(&envelope).expect("serializable envelope"))
        }
        Format::Csv => print!("{}", to_csv(&envelope)),
    }
    Ok(code)
}

fn lab_config(opts: &Opts) -> Result<LabConfig, Failure> {
    if opts.n == 0 || opts.n > 4 {
        return Err(Failure::config(format!("n = {} out of range (1..=4)", opts.n)));
    }
    if opts.r == 0 {
        return Err(Failure::config("r must be at least 1"));
    }
    let lens = match &opts.torus {
        None => vec![opts.n],
        Some(text) => {
            let lens: Vec<usize> = text
                .split(',')
                .map(|part| part.trim().parse::<usize>())
                .collect::<Result<_, _>>()
                .map_err(|_| Failure::config(format!("unreadable torus shape {:?}", text)))?;
            if lens.iter().sum::<usize>() != opts.n || lens.iter().any(|&c| c == 0) {
                return Err(Failure::config(format!(
                    "torus shape {:?} does not partition n = {}",
                    text, opts.n
                )));
            }
            lens
        }
    };
    Ok(LabConfig::new(opts.p, opts.m, opts.n, opts.r, &lens).cache_dir(opts.cache_dir.as_deref()))
}

fn theta_selector(opts: &Opts) -> Result<ThetaSel, Failure> {
    match opts.theta.as_deref() {
        None | Some("generic") => Ok(ThetaSel::Generic),
        Some("all") => Ok(ThetaSel::All),
        Some(list) => {
            let ids: Vec<u32> = list
                .split(',')
                .map(|part| part.trim().parse::<u32>())
                .collect::<Result<_, _>>()
                .map_err(|_| Failure::config(format!("unreadable theta selection {:?}", list)))?;
            Ok(ThetaSel::Ids(ids))
        }
    }
}

fn selected_ids(sel: &ThetaSel, config: &LabConfig) -> Option<Vec<u32>> {
    match sel {
        ThetaSel::Generic => None,
        ThetaSel::All => {
            let count = torus_order_at_level(config.q(), &config.lens, config.r);
            Some((0..count as u32).collect())
        }
        ThetaSel::Ids(ids) => Some(ids.clone()),
    }
}

fn cmd_group(config: &LabConfig) -> Result<(Value, u8), Failure> {
    let group = config.build_group()?;
    let closed_form = glor::closed_form_order(group.q() as u128, config.n as u32, config.r);
    let kernel_orders: Vec<u64> =
        (1..config.r).map(|i| group.level_kernel_keys(i).len() as u64).collect();
    let torus_order = TorusTable::build(group.clone()).order();

    let (u_pm_order, tu_order) = if config.r % 2 == 0 {
        let l = config.r / 2;
        let one = group.ring().one();
        let u_pm = group
            .level_kernel_keys(l)
            .iter()
            .filter(|&&key| {
                let mat = group.decode(key);
                (0..config.n).all(|i| mat[i * config.n + i] == one)
            })
            .count() as u64;
        (Some(u_pm), Some(group.tu_keys(l).len() as u64))
    } else {
        (None, None)
    };

    let results = json!({
        "q": group.q(),
        "order": group.order(),
        "order_closed_form": closed_form.to_string(),
        "order_matches": group.order() as u128 == closed_form,
        "kernel_orders": kernel_orders,
        "torus_order": torus_order,
        "u_pm_order": u_pm_order,
        "tu_order": tu_order,
        "generator_count": group.generators().len(),
    });
    let pass = group.order() as u128 == closed_form;
    Ok((results, if pass { 0 } else { 1 }))
}

fn cmd_torus(config: &LabConfig) -> Result<(Value, u8), Failure> {
    let group = config.build_group()?;
    let torus = TorusTable::build(group);
    let factor_orders: Vec<u64> =
        (0..torus.cycles().len()).map(|c| torus.factor_units(c).len() as u64).collect();
    let results = json!({
        "order": torus.order(),
        "cycles": torus.cycles(),
        "factor_orders": factor_orders,
        "weyl_order": torus.weyl_order(),
    });
    Ok((results, 0))
}

fn cmd_chars(config: &LabConfig) -> Result<(Value, u8), Failure> {
    let group = config.build_group()?;
    let torus = std::sync::Arc::new(TorusTable::build(group));
    let tc = TorusChars::build(torus.clone());
    let count_matches = tc.count() == torus.order();

    let genericity = if config.r % 2 == 0 {
        let lab = glor::Lab::build(config.clone())?;
        let mut generic = Vec::new();
        for theta in 0..tc.count() as u32 {
            if lab.genericity(theta)?.is_generic() {
                generic.push(theta);
            }
        }
        json!({ "generic": generic, "generic_count": generic.len() })
    } else {
        Value::Null
    };

    let results = json!({
        "count": tc.count(),
        "count_matches_torus_order": count_matches,
        "exponent": tc.exponent(),
        "invariant_factors": tc.invariant_factors(),
        "genericity": genericity,
    });
    Ok((results, if count_matches { 0 } else { 1 }))
}

fn cmd_verify_main(config: &LabConfig, opts: &Opts) -> Result<(Value, u8), Failure> {
    let sel = theta_selector(opts)?;
    let ids = selected_ids(&sel, config);
    let dual = opts.mode != Mode::Exact;
    let report = verify_main_selected(config.clone(), ids.as_deref(), dual)?;

    let no_generic = matches!(sel, ThetaSel::Generic) && report.rows.is_empty();
    let verified = report.all_norm_one && report.all_degree_match && report.all_oracles_agree;
    let residual_ok = opts.mode != Mode::Both
        || report.max_dual_residual.map_or(true, |res| res < NUMERIC_RESIDUAL_TOL);

    let code = if no_generic {
        4
    } else if verified && residual_ok {
        0
    } else {
        1
    };
    Ok((serde_json::to_value(&report).expect("serializable report"), code))
}

fn cmd_prop35(config: &LabConfig) -> Result<(Value, u8), Failure> {
    let report = compare_conditions(config.clone())?;
    let columns: Vec<Value> = (0..report.theta_count as u32)
        .map(|theta| {
            json!({
                "theta": theta,
                "regular": report.regular.contains(&theta),
                "general_position": report.general_position.contains(&theta),
                "stabilizer": report.stabilizer.contains(&theta),
            })
        })
        .collect();
    let pass = report.stabilizer_equals_regular && report.regular_subset_general_position;
    let mut results = serde_json::to_value(&report).expect("serializable report");
    results["columns"] = Value::Array(columns);
    Ok((results, if pass { 0 } else { 1 }))
}

fn cmd_letellier(config: &LabConfig) -> Result<(Value, u8), Failure> {
    if config.r != 2 {
        return Err(Failure::config(format!(
            "the invariant-character verification runs at r = 2, got r = {}",
            config.r
        )));
    }
    let report = verify_letellier(config.p, config.m, config.n)?;
    let code = if report.all_nonzero { 0 } else { 1 };
    Ok((serde_json::to_value(&report).expect("serializable report"), code))
}

fn cmd_mackey_check(config: &LabConfig, opts: &Opts) -> Result<(Value, u8), Failure> {
    let sel = theta_selector(opts)?;
    let ids = selected_ids(&sel, config);
    let dual = opts.mode != Mode::Exact;
    let report = mackey_check(config.clone(), ids.as_deref(), dual)?;

    let residual_ok = opts.mode != Mode::Both
        || report
            .rows
            .iter()
            .filter_map(|row| row.dual_residual)
            .all(|res| res < NUMERIC_RESIDUAL_TOL);
    let code = if report.all_agree && residual_ok { 0 } else { 1 };
    Ok((serde_json::to_value(&report).expect("serializable report"), code))
}

/// CSV rendering: tabular commands emit their row table, everything else a
/// key,value listing. Timing fields are deliberately left out so warm reruns
/// are byte-identical.
fn to_csv(envelope: &Envelope) -> String {
    let header = format!(
        "# glor {} schema={} command={}\n",
        env!("CARGO_PKG_VERSION"),
        envelope.schema_version,
        envelope.command,
    );
    let rows = match envelope.command {
        "verify-main" | "letellier" | "mackey-check" => {
            envelope.results.get("rows").and_then(Value::as_array)
        }
        "prop35" => envelope.results.get("columns").and_then(Value::as_array),
        _ => None,
    };
    match rows {
        Some(rows) if !rows.is_empty() => {
            let keys: Vec<&String> = match &rows[0] {
                Value::Object(map) => map.keys().collect(),
                _ => Vec::new(),
            };
            let mut out = header;
            out.push_str(&keys.iter().map(|k| csv_field(k)).collect::<Vec<_>>().join(","));
            out.push('\n');
            for row in rows {
                let line: Vec<String> = keys
                    .iter()
                    .map(|&k| csv_field(&scalar_text(row.get(k.as_str()).unwrap_or(&Value::Null))))
                    .collect();
                out.push_str(&line.join(","));
                out.push('\n');
            }
            out
        }
        _ => {
            let mut out = header;
            if let Value::Object(map) = &envelope.results {
                for (key, value) in map {
                    if key == "rows" || key == "columns" {
                        continue;
                    }
                    out.push_str(&format!("{},{}\n", csv_field(key), csv_field(&scalar_text(value))));
                }
            }
            out
        }
    }
}

fn scalar_text(value: &Value) -> String {
    match value {
        Value::String(s) => s.clone(),
        Value::Array(items) => {
            items.iter().map(scalar_text).collect::<Vec<_>>().join(";")
        }
        Value::Object(_) => serde_json::to_string(value).expect("serializable value"),
        other => other.to_string(),
    }
}

fn csv_field(text: &str) -> String {
    if text.contains([',', '"', '\n']) {
        format!("\"{}\"", text.replace('"', "\"\""))
    } else {
        text.to_string()
    }
}
