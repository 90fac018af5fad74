//! The `mixoa` command line.
//!
//! Exit codes: 0 success, 1 a requested verification failed, 2 usage or
//! parse error, 3 search budget exhausted without an answer.
//!
//! Search budget, capacity and result limit come from, in order of
//! precedence: command-line flags, a `key=value` config file (`--config`),
//! the `MIXOA_BUDGET` environment variable (budget only), built-in defaults.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use itertools::Itertools;

use crate::constructions::{
    self, render_catalog, select_recipe_with, CatalogEntry, ConstructionRecipe, LastRowRule, RecipeOptions,
};
use crate::error::{Error, Result};
use crate::numtheory::{bound_profile, FactorSpec};
use crate::oarray::{FactorTag, OrthogonalArray, Provenance, DEFAULT_CAPACITY};
use crate::search::{search_arrays, uniqueness_probe, SearchConfig, SearchStatus, Uniqueness, DEFAULT_BUDGET};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INCONCLUSIVE: i32 = 3;

pub const BUDGET_ENV: &str = "MIXOA_BUDGET";

#[derive(Debug, Parser)]
#[command(
    name = "mixoa",
    version,
    about = "Mixed-level orthogonal arrays: bounds, constructions, verification, search"
)]
pub struct Cli {
    /// key=value file setting `budget`, `capacity` or `limit`
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum S3Order {
    First,
    Second,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LastRow {
    /// rotate the last row by the digit sum of the middle rows (default)
    DigitSum,
    /// alternate forward and reversed passes (cyclic shifts per pass in the S3b case)
    Alternating,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print L_1..L_k and the threshold d for the given factor orders
    Bounds {
        #[arg(required = true, num_args = 1..)]
        orders: Vec<u64>,
    },
    /// Build the strength k-1 proper fraction for the given orders
    Construct {
        #[arg(required = true, num_args = 1..)]
        orders: Vec<u64>,
        /// Write the array here (plus a .json mirror) instead of stdout
        #[arg(long)]
        output: Option<PathBuf>,
        /// Print the JSON mirror instead of the text format
        #[arg(long)]
        json: bool,
        /// Force the element order of S3 in the first slot
        #[arg(long, value_enum)]
        s3_order: Option<S3Order>,
        /// Fill rule for the last row
        #[arg(long, value_enum, default_value = "digit-sum")]
        last_row: LastRow,
    },
    /// Check strength and conjugacy of an array file
    Verify {
        file: PathBuf,
        #[arg(long)]
        strength: Option<usize>,
        /// Group tags (comma separated); without a value the file's own tags
        #[arg(long, num_args = 0..=1, default_missing_value = "")]
        groups: Option<String>,
    },
    /// Build and verify all tabulated arrays into a directory
    Catalog {
        #[arg(long, default_value = "catalog")]
        output: PathBuf,
    },
    /// Search exhaustively for arrays of a given size and strength
    Search {
        #[arg(required = true, num_args = 1..)]
        orders: Vec<u64>,
        #[arg(long)]
        size: Option<usize>,
        #[arg(long)]
        strength: usize,
        #[arg(long)]
        limit: Option<usize>,
        #[arg(long)]
        exclude_complete: bool,
        /// Ask whether the complete factorial is the only array of size L_k
        #[arg(long)]
        uniqueness: bool,
        #[arg(long)]
        budget: Option<u64>,
    },
}

/// Resolved numeric settings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Settings {
    pub budget: u64,
    pub capacity: u128,
    pub limit: usize,
}

impl Default for Settings {
    fn default() -> Self {
        Settings { budget: DEFAULT_BUDGET, capacity: DEFAULT_CAPACITY, limit: usize::MAX }
    }
}

fn parse_number<T: std::str::FromStr>(key: &str, value: &str, source: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::Usage(format!("{source}: `{key}` needs a nonnegative integer, got `{value}`")))
}

/// Applies env then config on top of the defaults; flags are applied by the
/// caller.
pub fn resolve_settings(config: Option<&Path>, env_budget: Option<&str>) -> Result<Settings> {
    let mut settings = Settings::default();
    if let Some(v) = env_budget {
        settings.budget = parse_number("budget", v, BUDGET_ENV)?;
    }
    if let Some(path) = config {
        let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let source = path.display().to_string();
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: n + 1,
                column: 1,
                message: format!("{source}: expected key=value"),
            })?;
            match key.trim() {
                "budget" => settings.budget = parse_number("budget", value, &source)?,
                "capacity" => settings.capacity = parse_number("capacity", value, &source)?,
                "limit" => settings.limit = parse_number("limit", value, &source)?,
                other => {
                    return Err(Error::Parse {
                        line: n + 1,
                        column: 1,
                        message: format!("{source}: unknown key `{other}`"),
                    })
                }
            }
        }
    }
    Ok(settings)
}

fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::Catalog { .. } | Error::Internal(_) => EXIT_FAILED,
        _ => EXIT_USAGE,
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() { write!(err, "{rendered}") } else { write!(out, "{rendered}") };
            return code;
        }
    };
    let env_budget = std::env::var(BUDGET_ENV).ok();
    let result = resolve_settings(cli.config.as_deref(), env_budget.as_deref())
        .and_then(|settings| dispatch(cli.command, settings, out));
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code_for(&e)
        }
    }
}

fn dispatch(command: Command, settings: Settings, out: &mut dyn Write) -> Result<i32> {
    match command {
        Command::Bounds { orders } => cmd_bounds(orders, out),
        Command::Construct { orders, output, json, s3_order, last_row } => {
            cmd_construct(orders, output.as_deref(), json, s3_order, last_row, settings, out)
        }
        Command::Verify { file, strength, groups } => cmd_verify(&file, strength, groups.as_deref(), out),
        Command::Catalog { output } => cmd_catalog(&output, out),
        Command::Search { orders, size, strength, limit, exclude_complete, uniqueness, budget } => {
            let settings = Settings {
                budget: budget.unwrap_or(settings.budget),
                limit: limit.unwrap_or(settings.limit),
                ..settings
            };
            cmd_search(orders, size, strength, exclude_complete, uniqueness, settings, out)
        }
    }
}

fn io(e: std::io::Error) -> Error {
    Error::Io(e.to_string())
}

pub fn cmd_bounds(orders: Vec<u64>, out: &mut dyn Write) -> Result<i32> {
    let spec = FactorSpec::new(orders)?;
    let profile = bound_profile(&spec)?;
    let k = spec.k();
    let lk = profile.l(k);
    writeln!(out, "orders: {}", spec.orders().iter().join(" x ")).map_err(io)?;
    writeln!(out, "L = [{}]", profile.levels.iter().join(", ")).map_err(io)?;
    writeln!(out, "d = {}", profile.d).map_err(io)?;
    for t in 1..=k {
        let lt = profile.l(t);
        let verdict = if t < profile.d {
            format!("proper fraction possible (L_{t} < L_k = {lk})")
        } else {
            format!("no proper fraction has strength {t}")
        };
        writeln!(out, "t={t}  L_{t}={lt}  {verdict}").map_err(io)?;
    }
    Ok(EXIT_OK)
}

fn footer(array: &OrthogonalArray, recipe: Option<&ConstructionRecipe>) -> Result<(String, bool)> {
    let k = array.k();
    let target = k.saturating_sub(1).max(1);
    let strength = array.verify_strength(target)?;
    let max = array.max_strength();
    let conjugacy = array.verify_conjugacy_tags()?;
    let (num, den) = array.fraction()?;
    let mut lines = vec![
        format!("# strength {target}: {} (max strength {max})", if strength.holds { "holds" } else { "fails" }),
        format!("# {}", conjugacy.describe(array)),
        format!("# fraction: {num}/{den} of {}", array.spec().complete_size()?),
        format!("# repeated runs: {}", if array.has_repeats() { "yes" } else { "no" }),
    ];
    if let Some(r) = recipe {
        lines.push(format!("# case: {}; v = {}; last row: {}", r.case, r.v.iter().join(" "), r.last_row));
        if !r.tabulated {
            lines.push("# note: shape outside the reference table; result not previously checked".into());
        }
    }
    lines.push(format!("# tool: {}", crate::TOOL_VERSION));
    let ok = strength.holds && max == target && conjugacy.holds;
    Ok((lines.join("\n") + "\n", ok))
}

fn write_array_files(path: &Path, array: &OrthogonalArray, footer: &str, provenance: Provenance) -> Result<()> {
    fs::write(path, format!("{}{footer}", array.to_text()))?;
    let doc = array.to_document(provenance);
    let json = serde_json::to_string_pretty(&doc).map_err(|e| Error::Internal(e.to_string()))?;
    fs::write(path.with_extension("json"), json + "\n")?;
    Ok(())
}

pub fn cmd_construct(
    orders: Vec<u64>,
    output: Option<&Path>,
    json: bool,
    s3_order: Option<S3Order>,
    last_row: LastRow,
    settings: Settings,
    out: &mut dyn Write,
) -> Result<i32> {
    let spec = FactorSpec::new(orders)?;
    let options = RecipeOptions {
        s3_order: s3_order.map(|o| match o {
            S3Order::First => FactorTag::S3,
            S3Order::Second => FactorTag::S3Second,
        }),
        last_row: match last_row {
            LastRow::DigitSum => LastRowRule::DigitSum,
            LastRow::Alternating => LastRowRule::Alternating,
        },
    };
    let recipe = select_recipe_with(&spec, options)?;
    if recipe.size as u128 > settings.capacity {
        return Err(Error::Capacity {
            what: "constructed array",
            needed: recipe.size as u128,
            limit: settings.capacity,
        });
    }
    let array = constructions::construct_recipe(&recipe)?;
    let (footer, ok) = footer(&array, Some(&recipe))?;
    let mut provenance = Provenance::new(format!("construct ({})", recipe.case));
    if !recipe.tabulated {
        provenance.note = Some("shape outside the reference table".into());
    }
    match output {
        Some(path) => {
            write_array_files(path, &array, &footer, provenance)?;
            writeln!(out, "wrote {} ({} runs)", path.display(), array.size()).map_err(io)?;
            write!(out, "{footer}").map_err(io)?;
        }
        None if json => {
            let doc = array.to_document(provenance);
            let text = serde_json::to_string_pretty(&doc).map_err(|e| Error::Internal(e.to_string()))?;
            writeln!(out, "{text}").map_err(io)?;
        }
        None => write!(out, "{}{footer}", array.to_text()).map_err(io)?,
    }
    Ok(if ok { EXIT_OK } else { EXIT_FAILED })
}

pub fn cmd_verify(file: &Path, strength: Option<usize>, groups: Option<&str>, out: &mut dyn Write) -> Result<i32> {
    let text = fs::read_to_string(file).map_err(|e| Error::Io(format!("{}: {e}", file.display())))?;
    let array = OrthogonalArray::parse_text(&text).map_err(|e| match e {
        Error::Parse { line, column, message } => {
            Error::Parse { line, column, message: format!("{}: {message}", file.display()) }
        }
        other => other,
    })?;
    writeln!(out, "array: k={} N={} tags {}", array.k(), array.size(), array.tags().iter().join(" ")).map_err(io)?;
    let mut ok = true;
    if let Some(t) = strength {
        let report = array.verify_strength(t)?;
        writeln!(out, "{}", report.describe(&array)).map_err(io)?;
        if report.holds {
            array.divisibility_check(t)?;
            let lt = crate::numtheory::compute_l(array.spec(), t)?;
            writeln!(out, "divisibility: N = {} is a multiple of L_{t} = {lt}", array.size()).map_err(io)?;
        }
        ok &= report.holds;
    }
    writeln!(out, "max strength: {}", array.max_strength()).map_err(io)?;
    if let Some(spec) = groups {
        let tags = if spec.trim().is_empty() {
            array.tags().to_vec()
        } else {
            spec.split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .map(str::parse)
                .collect::<Result<Vec<FactorTag>>>()?
        };
        let groups = tags.iter().map(|t| t.group()).collect::<Vec<_>>();
        let report = array.verify_conjugacy(&groups)?;
        writeln!(out, "{} (groups {})", report.describe(&array), tags.iter().join(" x ")).map_err(io)?;
        ok &= report.holds;
    }
    Ok(if ok { EXIT_OK } else { EXIT_FAILED })
}

pub fn cmd_catalog(dir: &Path, out: &mut dyn Write) -> Result<i32> {
    let entries = constructions::build_reference_catalog()?;
    fs::create_dir_all(dir)?;
    for entry in &entries {
        let (footer, _) = footer(&entry.array, Some(&entry.recipe))?;
        let path = dir.join(format!("{}.txt", entry.file_stem()));
        write_array_files(&path, &entry.array, &footer, Provenance::new(format!("catalog row {}", entry.row)))?;
    }
    let table = render_catalog(&entries);
    fs::write(dir.join("summary.txt"), &table)?;
    let summaries = entries.iter().map(CatalogEntry::summary).collect::<Vec<_>>();
    let json = serde_json::to_string_pretty(&summaries).map_err(|e| Error::Internal(e.to_string()))?;
    fs::write(dir.join("catalog.json"), json + "\n")?;
    write!(out, "{table}").map_err(io)?;
    writeln!(out, "{} arrays written to {}", entries.len(), dir.display()).map_err(io)?;
    Ok(EXIT_OK)
}

pub fn cmd_search(
    orders: Vec<u64>,
    size: Option<usize>,
    strength: usize,
    exclude_complete: bool,
    uniqueness: bool,
    settings: Settings,
    out: &mut dyn Write,
) -> Result<i32> {
    let spec = FactorSpec::new(orders)?;
    let total = spec.complete_size()?;
    if total > settings.capacity {
        return Err(Error::Capacity { what: "search column index", needed: total, limit: settings.capacity });
    }
    if uniqueness {
        let report = uniqueness_probe(&spec, strength, settings.budget)?;
        if let Uniqueness::NotUnique { witness, .. } = &report {
            writeln!(out, "{}", witness.to_text()).map_err(io)?;
        }
        writeln!(
            out,
            "# uniqueness of the complete factorial at size {total}, strength {strength}: {} (explored {} nodes)",
            report.verdict(),
            report.explored_nodes()
        )
        .map_err(io)?;
        return Ok(match report {
            Uniqueness::Inconclusive { .. } => EXIT_INCONCLUSIVE,
            _ => EXIT_OK,
        });
    }
    let size = size.ok_or_else(|| Error::Usage("--size is required unless --uniqueness is given".into()))?;
    let config = SearchConfig { budget: settings.budget, limit: settings.limit, exclude_complete };
    let outcome = search_arrays(&spec, size, strength, &config)?;
    for array in &outcome.arrays {
        writeln!(out, "{}", array.to_text()).map_err(io)?;
    }
    if let Some(note) = &outcome.note {
        writeln!(out, "# note: {note}").map_err(io)?;
    }
    writeln!(
        out,
        "# results: {}, explored nodes: {}, status: {}",
        outcome.arrays.len(),
        outcome.explored_nodes,
        outcome.status
    )
    .map_err(io)?;
    if outcome.status == SearchStatus::BudgetExceeded {
        writeln!(out, "# inconclusive: budget of {} nodes spent before the tree was exhausted", settings.budget)
            .map_err(io)?;
        return Ok(EXIT_INCONCLUSIVE);
    }
    Ok(EXIT_OK)
}
