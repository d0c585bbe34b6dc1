//! Tabular outputs shared by the command-line front end.
//!
//! Numbers are written with nine significant digits so that repeated runs
//! produce byte-identical files. CSV output starts with the resolved
//! configuration as `# key = value` comment lines.

use serde_json::{json, Value};

use crate::cavity::{link_budget, qc_zone_state};
use crate::chain::{ChainParams, ChainPlanner, PlanOutcome};
use crate::config::Config;
use crate::noise::GateNoise;
use crate::purification::fixed_point_fidelity;
use crate::quantum::{werner, DensityMatrix};
use crate::scheduler::{rate_fidelity_curve, OperationTimings};
use crate::{Error, Result};

/// `%.9g`: nine significant digits, trailing zeros trimmed, scientific
/// notation outside `1e-4 <= |x| < 1e9`.
pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exponent) = sci.split_once('e').expect("scientific format");
    let exponent: i32 = exponent.parse().expect("integer exponent");
    if !(-4..9).contains(&exponent) {
        let sign = if exponent < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa), exponent.abs())
    } else {
        let decimals = (8 - exponent) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Bool(bool),
    Text(String),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => format_number(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            // Round-trip through the 9-digit text form so JSON and CSV agree.
            Cell::Num(x) if x.is_finite() => {
                json!(format_number(*x).parse::<f64>().expect("formatted number"))
            }
            Cell::Num(x) => json!(format_number(*x)),
            Cell::Int(i) => json!(i),
            Cell::Bool(b) => json!(b),
            Cell::Text(s) => json!(s),
            Cell::Empty => Value::Null,
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(i: usize) -> Self {
        Cell::Int(i as i64)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Bool(b)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    pub fn to_csv(&self, config: &Config) -> String {
        let mut out = String::new();
        for (key, value) in config.entries() {
            out.push_str(&format!("# {key} = {value}\n"));
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(Cell::csv).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self, config: &Config) -> String {
        let config: serde_json::Map<String, Value> = config
            .entries()
            .into_iter()
            .map(|(k, v)| (k.to_string(), Value::String(v)))
            .collect();
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| Value::Array(row.iter().map(Cell::json).collect()))
            .collect();
        let doc = json!({
            "config": config,
            "columns": self.columns,
            "rows": rows,
        });
        let mut text = serde_json::to_string_pretty(&doc).expect("serializable");
        text.push('\n');
        text
    }

    pub fn render(&self, config: &Config, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(config),
            Format::Json => self.to_json(config),
        }
    }
}

/// Per-link budget as `quantity,value` rows.
pub fn link_table(config: &Config) -> Result<Table> {
    let cavity = config.cavity()?;
    let link = config.link();
    let budget = link_budget(&cavity, &link)?;
    let qc = qc_zone_state(&link, config.f_op, config.f_move)?;
    let mut table = Table::new(&["quantity", "value"]);
    let rows: [(&str, f64); 14] = [
        ("cooperativity", cavity.cooperativity()),
        ("r_uncoupled", budget.r_uncoupled.re),
        ("r_coupled", budget.r_coupled.re),
        ("p_cz", budget.p_cz),
        ("transmission", budget.transmission),
        ("p_succ", budget.p_succ),
        ("t_attempt_us", budget.t_attempt_us),
        ("t_esta_us", budget.t_esta_us),
        ("t_esta_table_us", budget.t_esta_table_us),
        ("rate_hz", budget.rate_hz()),
        ("heralded_fidelity", budget.heralded_fidelity()),
        (
            "qc_zone_fidelity",
            qc.fidelity_bell(crate::quantum::Bell::PsiPlus)?,
        ),
        ("classical_delay_us", link.classical_delay_us()),
        (
            "fixed_point_fidelity",
            fixed_point_fidelity(&config.noise(), config.purification_protocol, 1e-12)?,
        ),
    ];
    for (name, value) in rows {
        table.push(vec![name.into(), value.into()]);
    }
    Ok(table)
}

/// Purification curves for the computation-zone pair and two Werner
/// references, each with configured and ideal operations.
pub fn purify_table(config: &Config, n_max: usize) -> Result<Table> {
    let timings = OperationTimings::for_link(&config.timing(), &config.cavity()?, &config.link());
    let starts: [(&str, DensityMatrix); 3] = [
        (
            "qc_zone",
            qc_zone_state(&config.link(), config.f_op, config.f_move)?,
        ),
        ("werner_0.91", werner(0.91)?),
        ("werner_0.8", werner(0.8)?),
    ];
    let noises = [("noisy", config.noise()), ("ideal", GateNoise::ideal())];
    let mut table = Table::new(&[
        "initial",
        "operations",
        "n",
        "fidelity",
        "p_puri",
        "t_eg_us",
        "rate_hz",
    ]);
    for (start_name, start) in &starts {
        for (noise_name, noise) in &noises {
            let curve =
                rate_fidelity_curve(n_max, start, noise, config.purification_protocol, &timings)?;
            for point in curve {
                table.push(vec![
                    (*start_name).into(),
                    (*noise_name).into(),
                    point.n_rounds.into(),
                    point.fidelity.into(),
                    point.p_puri.into(),
                    point.t_eg_us.into(),
                    point.rate_hz.into(),
                ]);
            }
        }
    }
    Ok(table)
}

const PLAN_COLUMNS: &[&str] = &[
    "total_length_km",
    "stations",
    "fc_enabled",
    "feasible",
    "n1",
    "n2",
    "fidelity",
    "t_qr_us",
    "rate_hz",
];

fn plan_row(outcome: &PlanOutcome) -> Vec<Cell> {
    match outcome {
        PlanOutcome::Feasible(p) => vec![
            p.total_length_km.into(),
            p.stations.into(),
            p.fc_enabled.into(),
            true.into(),
            p.n1.into(),
            p.n2.into(),
            p.fidelity.into(),
            p.t_qr_us.into(),
            p.rate_hz.into(),
        ],
        PlanOutcome::Infeasible {
            stations,
            total_length_km,
            fc_enabled,
            best_fidelity,
        } => vec![
            (*total_length_km).into(),
            (*stations).into(),
            (*fc_enabled).into(),
            false.into(),
            Cell::Empty,
            Cell::Empty,
            (*best_fidelity).into(),
            Cell::Empty,
            0.0.into(),
        ],
    }
}

/// Optimized plan for one chain, with its timing breakdown.
pub fn chain_table(
    config: &Config,
    stations: usize,
    total_length_km: f64,
    fc_enabled: bool,
) -> Result<(Table, PlanOutcome)> {
    let chain = ChainParams::new(stations, total_length_km)?;
    let mut planner = ChainPlanner::new(config)?;
    let outcome = planner.optimize(&chain, fc_enabled)?;
    let mut columns = PLAN_COLUMNS.to_vec();
    columns.extend(["link_length_km", "t_eg1_us", "t_repe_us", "t_eg2_us"]);
    let mut table = Table::new(&columns);
    let mut row = plan_row(&outcome);
    match outcome.plan() {
        Some(p) => row.extend([
            p.link_length_km.into(),
            p.t_eg1_us.into(),
            p.t_repe_us.into(),
            p.t_eg2_us.into(),
        ]),
        None => row.extend([
            chain.link_length_km().into(),
            Cell::Empty,
            Cell::Empty,
            Cell::Empty,
        ]),
    }
    table.push(row);
    Ok((table, outcome))
}

/// Rate against distance, ordered by distance, stations, then FC off/on.
pub fn sweep_table(
    config: &Config,
    stations: &[usize],
    distances_km: &[f64],
    fc_options: &[bool],
) -> Result<Table> {
    let mut planner = ChainPlanner::new(config)?;
    let rows = planner.rate_vs_distance(stations, distances_km, fc_options)?;
    let mut table = Table::new(PLAN_COLUMNS);
    for outcome in &rows {
        table.push(plan_row(outcome));
    }
    Ok(table)
}

/// Default sweep grid: 40 log-spaced points from 1 to 500 km.
pub const DEFAULT_DISTANCE_GRID: &str = "1:500:40,log";

/// Parses `lo:hi:points[,log|lin]` or a plain comma list of distances.
pub fn parse_distance_grid(grid_text: &str) -> Result<Vec<f64>> {
    let bad = |msg: String| Error::ConfigInvalid(format!("distance grid `{grid_text}`: {msg}"));
    let number = |s: &str| -> Result<f64> {
        let x: f64 = s
            .trim()
            .parse()
            .map_err(|_| bad(format!("`{s}` is not a number")))?;
        if !(x.is_finite() && x > 0.0) {
            return Err(bad(format!("distance {x} must be positive")));
        }
        Ok(x)
    };
    if !grid_text.contains(':') {
        return grid_text.split(',').map(number).collect();
    }
    let (range, scale) = match grid_text.split_once(',') {
        Some((r, s)) => (r, s.trim()),
        None => (grid_text, "log"),
    };
    let parts: Vec<&str> = range.split(':').collect();
    if parts.len() != 3 {
        return Err(bad("expected lo:hi:points".into()));
    }
    let lo = number(parts[0])?;
    let hi = number(parts[1])?;
    let points: usize = parts[2]
        .trim()
        .parse()
        .map_err(|_| bad(format!("`{}` is not a point count", parts[2])))?;
    if points == 0 || hi < lo || (points == 1 && hi != lo) {
        return Err(bad("need lo <= hi and enough points to span them".into()));
    }
    if points == 1 {
        return Ok(vec![lo]);
    }
    let step = |i: usize| i as f64 / (points - 1) as f64;
    let mut grid: Vec<f64> = match scale {
        "log" => (0..points).map(|i| lo * (hi / lo).powf(step(i))).collect(),
        "lin" => (0..points).map(|i| lo + (hi - lo) * step(i)).collect(),
        other => return Err(bad(format!("unknown scale `{other}`"))),
    };
    grid[0] = lo;
    grid[points - 1] = hi;
    Ok(grid)
}
