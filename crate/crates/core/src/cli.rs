//! Command-line front end.
//!
//! Every command builds a [`Report`] (named columns, formatted cells and
//! provenance notes) which is then written as CSV or JSON. Both encodings are
//! produced from the same formatted strings, so they carry identical values.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{Map, Number, Value};

use crate::codes::{degeneracy_correction, Code, DegeneracyCase};
use crate::noise_models::NoiseFamily;
use crate::postselect::Pipeline;
use crate::threshold::{
    capacity_hashing_one_type, concat_threshold_mc, crash_difference_threshold,
    entropy_match_threshold, fixed_fidelity_point, forward_calibration, hashing_threshold, sweep_r,
    ConcatNoise, McConfig, OneTypeKind,
};
use crate::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_BRACKET: i32 = 2;
pub const EXIT_INCONCLUSIVE: i32 = 3;
pub const EXIT_USAGE: i32 = 64;

/// Forward-noise [[23,1,7]] threshold used as the entropy-matching baseline.
pub const GOLAY_FORWARD_BASELINE: f64 = 0.04805;

#[derive(Parser, Debug)]
#[command(
    name = "ftbound",
    version,
    about = "Threshold estimates for post-selected fault-tolerant computation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Noise level at which the teleportation output reaches one bit of entropy.
    Hashing(HashingArgs),
    /// Depolarizing hashing threshold across measurement-error fractions.
    Sweep(SweepArgs),
    /// Monte Carlo threshold of the concatenated [[7,1,3]] code.
    Concat(ConcatArgs),
    /// Write the reference tables as CSV files.
    Tables(TablesArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Print raw probabilities instead of percentages.
    #[arg(long)]
    pub raw: bool,
    /// Write to this file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct HashingArgs {
    /// Noise family, e.g. `knill`, `forward` or `depolarizing:r=0.5`.
    #[arg(long, value_parser = parse_family)]
    pub model: NoiseFamily,
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[arg(long, default_value_t = 0.0)]
    pub rmin: f64,
    #[arg(long, default_value_t = 1.0)]
    pub rmax: f64,
    /// Number of grid points, endpoints included.
    #[arg(long, default_value_t = 11)]
    pub steps: usize,
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    /// Fail unless the threshold strictly decreases along the grid.
    #[arg(long)]
    pub assert_monotone: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OneTypeNoise {
    OneType,
}

#[derive(Args, Debug)]
pub struct ConcatArgs {
    #[arg(long, value_parser = parse_code, default_value = "713")]
    pub code: Code,
    #[arg(long, value_parser = parse_family, conflicts_with = "noise", required_unless_present = "noise")]
    pub model: Option<NoiseFamily>,
    /// Phase flips only, with no gate or measurement noise.
    #[arg(long, value_enum)]
    pub noise: Option<OneTypeNoise>,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = 10_000)]
    pub population: usize,
    #[arg(long, default_value_t = 40)]
    pub levels: usize,
    /// Independent bisections averaged into the estimate.
    #[arg(long, default_value_t = 10)]
    pub seeds: usize,
    /// Lower end of the bisection bracket (probability).
    #[arg(long)]
    pub lo: Option<f64>,
    /// Upper end of the bisection bracket (probability).
    #[arg(long)]
    pub hi: Option<f64>,
    #[arg(long, default_value_t = 2e-4)]
    pub tol: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct TablesArgs {
    #[arg(long, default_value = "tables")]
    pub out_dir: PathBuf,
    /// Recorded in the provenance header; the tables are deterministic.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    /// Write raw probabilities instead of percentages.
    #[arg(long)]
    pub raw: bool,
}

fn parse_family(s: &str) -> std::result::Result<NoiseFamily, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_code(s: &str) -> std::result::Result<Code, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// A formatted table cell.
#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Text(String),
    /// A number already rendered with its final precision.
    Num(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub command: String,
    pub notes: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Report {
    fn new(command: &str, columns: &[&str]) -> Self {
        Report {
            command: command.to_string(),
            notes: vec![("git".to_string(), git_hash().to_string())],
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    fn note(&mut self, key: &str, value: impl ToString) {
        self.notes.push((key.to_string(), value.to_string()));
    }

    pub fn to_csv(&self) -> String {
        let mut s = format!("# ftbound {}\n", self.command);
        for (k, v) in &self.notes {
            s.push_str(&format!("# {k}: {v}\n"));
        }
        s.push_str(&self.columns.join(","));
        s.push('\n');
        for row in &self.rows {
            let cells: Vec<&str> = row
                .iter()
                .map(|c| match c {
                    Cell::Text(t) | Cell::Num(t) => t.as_str(),
                })
                .collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }

    pub fn to_json(&self) -> String {
        let provenance: Map<String, Value> = self
            .notes
            .iter()
            .map(|(k, v)| (k.clone(), Value::String(v.clone())))
            .collect();
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(k, c)| (k.clone(), cell_json(c)))
                    .collect();
                Value::Object(obj)
            })
            .collect();
        let mut body = Map::new();
        body.insert("provenance".into(), Value::Object(provenance));
        body.insert("rows".into(), Value::Array(rows));
        let mut top = Map::new();
        top.insert(self.command.clone(), Value::Object(body));
        let mut s = serde_json::to_string_pretty(&Value::Object(top)).expect("serialisable");
        s.push('\n');
        s
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }
}

fn cell_json(c: &Cell) -> Value {
    match c {
        Cell::Text(t) => Value::String(t.clone()),
        Cell::Num(t) => t
            .parse::<f64>()
            .ok()
            .and_then(Number::from_f64)
            .map(Value::Number)
            .unwrap_or(Value::Null),
    }
}

/// `x` rounded to `digits` significant figures, without exponent notation.
pub fn sig_digits(x: f64, digits: usize) -> String {
    if !x.is_finite() {
        return "NaN".to_string();
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let mag = x.abs().log10().floor() as i32;
    let decimals = (digits as i32 - 1 - mag).max(0) as usize;
    let s = format!("{x:.decimals$}");
    // rounding may carry into a new leading digit
    let rounded: f64 = s.parse().unwrap_or(x);
    if decimals > 0 && rounded.abs() >= 10f64.powi(mag + 1) {
        return format!("{x:.prec$}", prec = decimals - 1);
    }
    s
}

fn prob_cell(p: f64, raw: bool, digits: usize) -> Cell {
    if raw {
        Cell::Num(if p.is_finite() {
            format!("{p}")
        } else {
            "NaN".into()
        })
    } else {
        Cell::Num(sig_digits(100.0 * p, digits))
    }
}

fn value_cell(v: f64, digits: usize) -> Cell {
    Cell::Num(sig_digits(v, digits))
}

fn prob_column(name: &str, raw: bool) -> String {
    if raw {
        name.to_string()
    } else {
        format!("{name}_percent")
    }
}

fn columns(names: &[(&str, bool)], raw: bool) -> Vec<String> {
    names
        .iter()
        .map(|&(n, is_prob)| {
            if is_prob {
                prob_column(n, raw)
            } else {
                n.to_string()
            }
        })
        .collect()
}

fn git_hash() -> &'static str {
    option_env!("FTBOUND_GIT_HASH").unwrap_or("unknown")
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::BracketFailure { .. } => EXIT_BRACKET,
        Error::Inconclusive(_) => EXIT_INCONCLUSIVE,
        Error::Parse(_) | Error::InvalidParameter(_) => EXIT_USAGE,
        _ => EXIT_FAILURE,
    }
}

/// Outcome of a command: its reports and, when something failed part-way,
/// the error to report after the output is written.
struct Outcome {
    reports: Vec<(Option<PathBuf>, Report)>,
    failure: Option<(i32, String)>,
}

const PERCENT_DIGITS: usize = 6;
const SWEEP_DIGITS: usize = 9;

fn hashing_report(model: &NoiseFamily, tol: f64, raw: bool) -> crate::Result<Report> {
    let res = hashing_threshold(model, tol)?;
    let cols = columns(
        &[
            ("model", false),
            ("p_threshold", true),
            ("px", true),
            ("py", true),
            ("pz", true),
            ("entropy", false),
        ],
        raw,
    );
    let mut r = Report::new("hashing", &[]);
    r.columns = cols;
    r.note("tol", tol);
    let [_, px, py, pz] = res.dist.as_array();
    r.rows.push(vec![
        Cell::Text(model.to_string()),
        prob_cell(res.p_threshold, raw, PERCENT_DIGITS),
        prob_cell(px, raw, PERCENT_DIGITS),
        prob_cell(py, raw, PERCENT_DIGITS),
        prob_cell(pz, raw, PERCENT_DIGITS),
        value_cell(res.entropy, PERCENT_DIGITS),
    ]);
    Ok(r)
}

fn run_hashing(a: &HashingArgs) -> crate::Result<Outcome> {
    let r = hashing_report(&a.model, a.tol, a.output.raw)?;
    Ok(Outcome {
        reports: vec![(a.output.out.clone(), r)],
        failure: None,
    })
}

fn run_sweep(a: &SweepArgs) -> crate::Result<Outcome> {
    if a.steps < 2 || !(a.rmin >= 0.0 && a.rmax > a.rmin) {
        return Err(Error::InvalidParameter(format!(
            "need steps ≥ 2 and 0 ≤ rmin < rmax, got {} points on [{}, {}]",
            a.steps, a.rmin, a.rmax
        )));
    }
    let grid: Vec<f64> = (0..a.steps)
        .map(|i| a.rmin + (a.rmax - a.rmin) * i as f64 / (a.steps - 1) as f64)
        .collect();
    let curve = sweep_r(&grid, a.tol);
    let mut r = Report::new("sweep", &[]);
    r.columns = vec!["r".into(), prob_column("threshold", a.output.raw)];
    r.note("tol", a.tol);
    let mut failure = None;
    let mut values = Vec::new();
    for (rv, res) in &curve {
        let p = match res {
            Ok(h) => h.p_threshold,
            Err(e) => {
                failure.get_or_insert((exit_code(e), format!("r = {rv}: {e}")));
                f64::NAN
            }
        };
        values.push(p);
        r.rows.push(vec![
            value_cell(*rv, SWEEP_DIGITS),
            prob_cell(p, a.output.raw, SWEEP_DIGITS),
        ]);
    }
    if a.assert_monotone && failure.is_none() && !values.windows(2).all(|w| w[1] < w[0]) {
        failure = Some((
            EXIT_FAILURE,
            "threshold is not strictly decreasing in r".into(),
        ));
    }
    Ok(Outcome {
        reports: vec![(a.output.out.clone(), r)],
        failure,
    })
}

fn run_concat(a: &ConcatArgs) -> crate::Result<Outcome> {
    if a.code != Code::Steane713 {
        return Err(Error::InvalidParameter(
            "Monte Carlo concatenation is available for code 713 only".into(),
        ));
    }
    let noise = match (a.model, a.noise) {
        (Some(f), _) => ConcatNoise::Family(f),
        (None, _) => ConcatNoise::OneType,
    };
    let mut cfg = McConfig::for_noise(&noise, a.seed);
    cfg.population = a.population;
    cfg.levels = a.levels;
    cfg.seeds = a.seeds;
    cfg.tol = a.tol;
    cfg.lo = a.lo.unwrap_or(cfg.lo);
    cfg.hi = a.hi.unwrap_or(cfg.hi);
    let est = concat_threshold_mc(&noise, &cfg)?;
    let raw = a.output.raw;
    let mut r = Report::new("concat", &[]);
    r.columns = columns(
        &[
            ("code", false),
            ("noise", false),
            ("threshold", true),
            ("error_bar", true),
            ("population", false),
            ("levels", false),
            ("seeds", false),
        ],
        raw,
    );
    r.note("seed", a.seed);
    r.note("bracket", format!("{}..{}", cfg.lo, cfg.hi));
    r.note("tol", cfg.tol);
    r.rows.push(vec![
        Cell::Text(a.code.to_string()),
        Cell::Text(noise.name()),
        prob_cell(est.threshold, raw, PERCENT_DIGITS),
        prob_cell(est.error_bar, raw, 2),
        Cell::Num(cfg.population.to_string()),
        Cell::Num(cfg.levels.to_string()),
        Cell::Num(cfg.seeds.to_string()),
    ]);
    Ok(Outcome {
        reports: vec![(a.output.out.clone(), r)],
        failure: None,
    })
}

fn table_header(name: &str, a: &TablesArgs) -> Report {
    let mut r = Report::new(name, &[]);
    r.note("seed", a.seed);
    r.note("tol", a.tol);
    r
}

/// The four reference tables, keyed by file name.
pub fn build_tables(a: &TablesArgs) -> crate::Result<Vec<(String, Report)>> {
    let raw = a.raw;
    let families = [
        NoiseFamily::Depolarizing { r: 0.0 },
        NoiseFamily::Knill,
        NoiseFamily::Forward,
    ];

    let mut hashing = table_header("hashing", a);
    for f in &families {
        let one = hashing_report(f, a.tol, raw)?;
        hashing.columns = one.columns;
        hashing.rows.extend(one.rows);
    }

    let mut capacity = table_header("capacity", a);
    capacity.columns = columns(
        &[("method", false), ("phase_only", true), ("symmetric", true)],
        raw,
    );
    capacity.rows.push(vec![
        Cell::Text("hashing".into()),
        prob_cell(
            capacity_hashing_one_type(OneTypeKind::PhaseOnly)?,
            raw,
            PERCENT_DIGITS,
        ),
        prob_cell(
            capacity_hashing_one_type(OneTypeKind::Symmetric)?,
            raw,
            PERCENT_DIGITS,
        ),
    ]);

    let mut fixed = table_header("fixedpoints", a);
    fixed.columns = columns(
        &[
            ("code", false),
            ("model", false),
            ("p", true),
            ("fidelity", false),
        ],
        raw,
    );
    for (code, f) in [
        (Code::Steane713, NoiseFamily::Knill),
        (Code::Steane713, NoiseFamily::Depolarizing { r: 0.0 }),
        (Code::Steane713, NoiseFamily::Forward),
        (Code::Golay2317, NoiseFamily::Forward),
    ] {
        let pt = fixed_fidelity_point(code, &f, a.tol)?;
        fixed.rows.push(vec![
            Cell::Text(code.to_string()),
            Cell::Text(f.to_string()),
            prob_cell(pt.p, raw, PERCENT_DIGITS),
            value_cell(pt.fidelity, PERCENT_DIGITS),
        ]);
    }

    let mut golay = table_header("thresholds_2317", a);
    golay.note("forward_baseline", GOLAY_FORWARD_BASELINE);
    golay.columns = columns(
        &[
            ("model", false),
            ("p_entropy_match", true),
            ("p_g", true),
            ("c_e", false),
            ("p_crash_difference", true),
        ],
        raw,
    );
    let cal = forward_calibration(GOLAY_FORWARD_BASELINE)?;
    golay.note(
        "calibration_one_type_p",
        sig_digits(cal.one_type_p, PERCENT_DIGITS),
    );
    golay.note("calibration_e1", sig_digits(cal.e1, PERCENT_DIGITS));
    for f in &families {
        let p = match f {
            NoiseFamily::Forward => GOLAY_FORWARD_BASELINE,
            _ => entropy_match_threshold(f, cal.e1, a.tol)?,
        };
        let p_g = Pipeline::run(&f.at(p))?.undetected().p_g;
        let c_e = degeneracy_correction(DegeneracyCase::Golay2317, p_g);
        let p_r = crash_difference_threshold(Code::Golay2317, f, p, c_e, a.tol)?;
        golay.rows.push(vec![
            Cell::Text(f.to_string()),
            prob_cell(p, raw, PERCENT_DIGITS),
            prob_cell(p_g, raw, PERCENT_DIGITS),
            value_cell(c_e, 3),
            prob_cell(p_r, raw, PERCENT_DIGITS),
        ]);
    }

    Ok(vec![
        ("hashing.csv".into(), hashing),
        ("capacity.csv".into(), capacity),
        ("fixedpoints.csv".into(), fixed),
        ("thresholds_2317.csv".into(), golay),
    ])
}

fn run_tables(a: &TablesArgs) -> crate::Result<Outcome> {
    let reports = build_tables(a)?
        .into_iter()
        .map(|(name, r)| (Some(a.out_dir.join(name)), r))
        .collect();
    Ok(Outcome {
        reports,
        failure: None,
    })
}

fn write_output(path: Option<&Path>, text: &str, stdout: &mut dyn Write) -> std::io::Result<()> {
    match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir)?;
            }
            fs::write(p, text)
        }
        None => stdout.write_all(text.as_bytes()),
    }
}

/// Parse `args` (program name first), run the command and return the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    let (format, outcome) = match &cli.command {
        Command::Hashing(a) => (a.output.format, run_hashing(a)),
        Command::Sweep(a) => (a.output.format, run_sweep(a)),
        Command::Concat(a) => (a.output.format, run_concat(a)),
        Command::Tables(a) => (Format::Csv, run_tables(a)),
    };
    let outcome = match outcome {
        Ok(o) => o,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return exit_code(&e);
        }
    };
    for (path, report) in &outcome.reports {
        if let Err(e) = write_output(path.as_deref(), &report.render(format), stdout) {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_FAILURE;
        }
    }
    match outcome.failure {
        Some((code, msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            code
        }
        None => EXIT_OK,
    }
}
