//! Line-oriented scenario files.
//!
//! The format is structured text with named sections and `key = value`
//! pairs; numbers are plain decimals with an optional exponent. A scenario
//! describes a goods dimension, a time grid, per-time Cobb-Douglas exponent
//! and price vectors, a reference-cost grid, and a cost-adjustment choice.
//!
//! ```text
//! # two-good economy with drifting preferences
//! [scenario]
//! schema = 1
//! goods = 2
//! base_time = 1.0
//!
//! [grid]
//! times = 1.0 1.5 2.0
//! costs = 1.0 2.0 3.0 6.0
//!
//! [utility]
//! at 1.0 = 1.0 1.0
//! at 1.5 = 1.5 1.0
//! at 2.0 = 2.0 1.0
//!
//! [prices]
//! at 1.0 = 1.0 1.0
//! at 1.5 = 1.0 1.0
//! at 2.0 = 1.0 1.0
//!
//! [adjustment]
//! kind = naive
//! ```
//!
//! Adjustment kinds: `naive`; `scale` with `factor = K` (per unit time);
//! `generator` with `expr = zero | const:K | relative:K`; `tabulated` with
//! `knots = c1:out1 c2:out2 ...` (strictly increasing pairs, applied at
//! every time after the base).

use std::fmt;
use std::fmt::Write as _;

use konus_core::{AdjustmentPlan, CostGenerator, PriceFunctional, Scenario, UtilityFunction};

/// Largest goods dimension accepted from a file.
pub const MAX_GOODS: usize = 64;

/// A parse or structural error, carrying the offending line when known.
#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub line: Option<usize>,
    pub message: String,
}

impl ParseError {
    fn at(line: usize, message: impl Into<String>) -> Self {
        ParseError {
            line: Some(line),
            message: message.into(),
        }
    }

    fn global(message: impl Into<String>) -> Self {
        ParseError {
            line: None,
            message: message.into(),
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(n) => write!(f, "line {n}: {}", self.message),
            None => write!(f, "{}", self.message),
        }
    }
}

impl std::error::Error for ParseError {}

/// The generator catalog for `[adjustment] kind = generator`.
#[derive(Debug, Clone, PartialEq)]
pub enum GeneratorExpr {
    Zero,
    Const(f64),
    Relative(f64),
}

impl GeneratorExpr {
    pub fn parse(text: &str) -> Result<Self, String> {
        let text = text.trim();
        if text == "zero" {
            return Ok(GeneratorExpr::Zero);
        }
        if let Some(rest) = text.strip_prefix("const:") {
            let k: f64 = rest
                .parse()
                .map_err(|_| format!("bad constant in generator expression '{text}'"))?;
            return Ok(GeneratorExpr::Const(k));
        }
        if let Some(rest) = text.strip_prefix("relative:") {
            let k: f64 = rest
                .parse()
                .map_err(|_| format!("bad coefficient in generator expression '{text}'"))?;
            return Ok(GeneratorExpr::Relative(k));
        }
        Err(format!("unknown generator expression '{text}'"))
    }

    pub fn render(&self) -> String {
        match self {
            GeneratorExpr::Zero => "zero".to_string(),
            GeneratorExpr::Const(k) => format!("const:{k}"),
            GeneratorExpr::Relative(k) => format!("relative:{k}"),
        }
    }

    fn build(&self, t_lo: f64, t_hi: f64) -> CostGenerator {
        match *self {
            GeneratorExpr::Zero => CostGenerator::zero(t_lo, t_hi),
            GeneratorExpr::Const(k) => CostGenerator::constant(t_lo, t_hi, k),
            GeneratorExpr::Relative(k) => CostGenerator::relative(t_lo, t_hi, k),
        }
    }
}

/// The `[adjustment]` section.
#[derive(Debug, Clone, PartialEq)]
pub enum AdjustmentSpec {
    Naive,
    Scale { factor: f64 },
    Generator { expr: GeneratorExpr },
    Tabulated { knots: Vec<(f64, f64)> },
}

/// Parsed scenario file, structurally validated but not yet bound to the
/// runtime types.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioFile {
    pub schema: u32,
    pub goods: usize,
    pub base_time: f64,
    pub times: Vec<f64>,
    pub costs: Vec<f64>,
    /// Per-time Cobb-Douglas exponent vectors, in time-grid order.
    pub utility_rows: Vec<Vec<f64>>,
    /// Per-time price vectors, in time-grid order.
    pub price_rows: Vec<Vec<f64>>,
    pub adjustment: AdjustmentSpec,
}

#[derive(Default)]
struct RawSections {
    schema: Option<(usize, String)>,
    goods: Option<(usize, String)>,
    base_time: Option<(usize, String)>,
    times: Option<(usize, String)>,
    costs: Option<(usize, String)>,
    utility_rows: Vec<(usize, String, String)>,
    price_rows: Vec<(usize, String, String)>,
    adjustment: Vec<(usize, String, String)>,
}

fn parse_f64(text: &str, line: usize, field: &str) -> Result<f64, ParseError> {
    let v: f64 = text
        .trim()
        .parse()
        .map_err(|_| ParseError::at(line, format!("{field}: '{}' is not a number", text.trim())))?;
    if !v.is_finite() {
        return Err(ParseError::at(
            line,
            format!("{field}: value must be finite"),
        ));
    }
    Ok(v)
}

fn parse_vector(text: &str, line: usize, field: &str) -> Result<Vec<f64>, ParseError> {
    let mut out = Vec::new();
    for tok in text.split_whitespace() {
        out.push(parse_f64(tok, line, field)?);
    }
    if out.is_empty() {
        return Err(ParseError::at(line, format!("{field}: empty value")));
    }
    Ok(out)
}

/// Parse scenario text into a [`ScenarioFile`].
pub fn parse(text: &str) -> Result<ScenarioFile, ParseError> {
    let mut raw = RawSections::default();
    let mut section: Option<String> = None;

    for (idx, raw_line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = match raw_line.find('#') {
            Some(pos) => &raw_line[..pos],
            None => raw_line,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| ParseError::at(lineno, "unterminated section header"))?
                .trim()
                .to_string();
            match name.as_str() {
                "scenario" | "grid" | "utility" | "prices" | "adjustment" => {
                    section = Some(name);
                }
                other => {
                    return Err(ParseError::at(lineno, format!("unknown section [{other}]")));
                }
            }
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| ParseError::at(lineno, "expected 'key = value'"))?;
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        let section = section
            .as_deref()
            .ok_or_else(|| ParseError::at(lineno, "key outside of any section"))?;
        match (section, key.as_str()) {
            ("scenario", "schema") => raw.schema = Some((lineno, value)),
            ("scenario", "goods") => raw.goods = Some((lineno, value)),
            ("scenario", "base_time") => raw.base_time = Some((lineno, value)),
            ("grid", "times") => raw.times = Some((lineno, value)),
            ("grid", "costs") => raw.costs = Some((lineno, value)),
            ("utility", k) if k.starts_with("at ") || k.starts_with("at\t") => {
                raw.utility_rows
                    .push((lineno, k[3..].trim().to_string(), value));
            }
            ("prices", k) if k.starts_with("at ") || k.starts_with("at\t") => {
                raw.price_rows
                    .push((lineno, k[3..].trim().to_string(), value));
            }
            ("adjustment", k) => raw.adjustment.push((lineno, k.to_string(), value)),
            (section, key) => {
                return Err(ParseError::at(
                    lineno,
                    format!("unknown key '{key}' in section [{section}]"),
                ));
            }
        }
    }

    let (line, schema) = raw
        .schema
        .ok_or_else(|| ParseError::global("missing [scenario] schema"))?;
    let schema: u32 = schema
        .parse()
        .map_err(|_| ParseError::at(line, "schema must be an integer"))?;
    if schema != 1 {
        return Err(ParseError::at(
            line,
            format!("unsupported schema version {schema}"),
        ));
    }

    let (line, goods) = raw
        .goods
        .ok_or_else(|| ParseError::global("missing [scenario] goods"))?;
    let goods: usize = goods
        .parse()
        .map_err(|_| ParseError::at(line, "goods must be a positive integer"))?;
    if goods == 0 {
        return Err(ParseError::at(line, "goods must be at least 1"));
    }
    if goods > MAX_GOODS {
        return Err(ParseError::at(
            line,
            format!("goods count {goods} exceeds the CLI limit of {MAX_GOODS}"),
        ));
    }

    let (bt_line, base_time) = raw
        .base_time
        .ok_or_else(|| ParseError::global("missing [scenario] base_time"))?;
    let base_time = parse_f64(&base_time, bt_line, "base_time")?;

    let (line, times_text) = raw
        .times
        .ok_or_else(|| ParseError::global("time grid empty (missing [grid] times)"))?;
    let times = parse_vector(&times_text, line, "times")?;
    for w in times.windows(2) {
        if w[1] <= w[0] {
            return Err(ParseError::at(line, "times must be strictly increasing"));
        }
    }

    let (costs_line, costs_text) = raw
        .costs
        .ok_or_else(|| ParseError::global("cost grid empty (missing [grid] costs)"))?;
    let costs = match parse_vector(&costs_text, costs_line, "costs") {
        Ok(v) => v,
        Err(_) if costs_text.trim().is_empty() => {
            return Err(ParseError::at(costs_line, "cost grid empty"));
        }
        Err(e) => return Err(e),
    };
    for &c in &costs {
        if c <= 0.0 {
            return Err(ParseError::at(
                costs_line,
                "costs must be strictly positive",
            ));
        }
    }

    let utility_rows = collect_rows(&raw.utility_rows, &times, goods, "utility exponents")?;
    for (row, &t) in utility_rows.iter().zip(&times) {
        if row.iter().any(|&a| a <= 0.0) {
            return Err(ParseError::global(format!(
                "utility exponents must be strictly positive (time {t})"
            )));
        }
    }
    let price_rows = collect_rows(&raw.price_rows, &times, goods, "prices")?;
    for (row, &t) in price_rows.iter().zip(&times) {
        if row.iter().any(|&p| p <= 0.0) {
            return Err(ParseError::global(format!(
                "prices must be strictly positive (time {t})"
            )));
        }
    }

    if !times
        .iter()
        .any(|&t| (t - base_time).abs() <= 1e-9 * t.abs().max(base_time.abs()).max(1.0))
    {
        return Err(ParseError::at(bt_line, "base_time is not on the time grid"));
    }

    let adjustment = parse_adjustment(&raw.adjustment)?;

    Ok(ScenarioFile {
        schema,
        goods,
        base_time,
        times,
        costs,
        utility_rows,
        price_rows,
        adjustment,
    })
}

fn collect_rows(
    rows: &[(usize, String, String)],
    times: &[f64],
    goods: usize,
    field: &str,
) -> Result<Vec<Vec<f64>>, ParseError> {
    let mut out: Vec<Option<Vec<f64>>> = vec![None; times.len()];
    for (line, time_text, value) in rows {
        let t = parse_f64(time_text, *line, "row time")?;
        let idx = times
            .iter()
            .position(|&ti| (ti - t).abs() <= 1e-9 * ti.abs().max(t.abs()).max(1.0))
            .ok_or_else(|| {
                ParseError::at(
                    *line,
                    format!("{field} row for time {t} not on the time grid"),
                )
            })?;
        if out[idx].is_some() {
            return Err(ParseError::at(
                *line,
                format!("duplicate {field} row for time {t}"),
            ));
        }
        let v = parse_vector(value, *line, field)?;
        if v.len() != goods {
            return Err(ParseError::at(
                *line,
                format!(
                    "{field} row for time {t} has {} entries, expected {goods}",
                    v.len()
                ),
            ));
        }
        out[idx] = Some(v);
    }
    out.into_iter()
        .zip(times)
        .map(|(row, &t)| {
            row.ok_or_else(|| ParseError::global(format!("missing {field} row for time {t}")))
        })
        .collect()
}

fn parse_adjustment(rows: &[(usize, String, String)]) -> Result<AdjustmentSpec, ParseError> {
    if rows.is_empty() {
        return Ok(AdjustmentSpec::Naive);
    }
    let mut kind: Option<(usize, String)> = None;
    let mut factor: Option<(usize, String)> = None;
    let mut expr: Option<(usize, String)> = None;
    let mut knots: Option<(usize, String)> = None;
    for (line, key, value) in rows {
        match key.as_str() {
            "kind" => kind = Some((*line, value.clone())),
            "factor" => factor = Some((*line, value.clone())),
            "expr" => expr = Some((*line, value.clone())),
            "knots" => knots = Some((*line, value.clone())),
            other => {
                return Err(ParseError::at(
                    *line,
                    format!("unknown key '{other}' in section [adjustment]"),
                ));
            }
        }
    }
    let (kind_line, kind) = kind.ok_or_else(|| ParseError::global("missing [adjustment] kind"))?;
    match kind.as_str() {
        "naive" => Ok(AdjustmentSpec::Naive),
        "scale" => {
            let (line, text) =
                factor.ok_or_else(|| ParseError::at(kind_line, "scale adjustment needs factor"))?;
            let factor = parse_f64(&text, line, "factor")?;
            if factor <= 0.0 {
                return Err(ParseError::at(line, "factor must be strictly positive"));
            }
            Ok(AdjustmentSpec::Scale { factor })
        }
        "generator" => {
            let (line, text) =
                expr.ok_or_else(|| ParseError::at(kind_line, "generator adjustment needs expr"))?;
            let expr = GeneratorExpr::parse(&text).map_err(|m| ParseError::at(line, m))?;
            Ok(AdjustmentSpec::Generator { expr })
        }
        "tabulated" => {
            let (line, text) = knots
                .ok_or_else(|| ParseError::at(kind_line, "tabulated adjustment needs knots"))?;
            let mut pairs = Vec::new();
            for tok in text.split_whitespace() {
                let (a, b) = tok.split_once(':').ok_or_else(|| {
                    ParseError::at(line, format!("knot '{tok}' must look like cost:adjusted"))
                })?;
                let a = parse_f64(a, line, "knot cost")?;
                let b = parse_f64(b, line, "knot adjusted cost")?;
                if a <= 0.0 || b <= 0.0 {
                    return Err(ParseError::at(line, "knots must be strictly positive"));
                }
                pairs.push((a, b));
            }
            if pairs.len() < 2 {
                return Err(ParseError::at(
                    line,
                    "tabulated adjustment needs at least 2 knots",
                ));
            }
            for w in pairs.windows(2) {
                if w[1].0 <= w[0].0 || w[1].1 <= w[0].1 {
                    return Err(ParseError::at(line, "knots must be strictly increasing"));
                }
            }
            Ok(AdjustmentSpec::Tabulated { knots: pairs })
        }
        other => Err(ParseError::at(
            kind_line,
            format!("unknown adjustment kind '{other}'"),
        )),
    }
}

/// Serialize a scenario back to canonical text. Numbers use the shortest
/// round-trip representation, so `parse(render(f)) == f` field for field.
pub fn render(file: &ScenarioFile) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "[scenario]");
    let _ = writeln!(s, "schema = {}", file.schema);
    let _ = writeln!(s, "goods = {}", file.goods);
    let _ = writeln!(s, "base_time = {}", file.base_time);
    let _ = writeln!(s, "\n[grid]");
    let _ = writeln!(s, "times = {}", join_numbers(&file.times));
    let _ = writeln!(s, "costs = {}", join_numbers(&file.costs));
    let _ = writeln!(s, "\n[utility]");
    for (t, row) in file.times.iter().zip(&file.utility_rows) {
        let _ = writeln!(s, "at {} = {}", t, join_numbers(row));
    }
    let _ = writeln!(s, "\n[prices]");
    for (t, row) in file.times.iter().zip(&file.price_rows) {
        let _ = writeln!(s, "at {} = {}", t, join_numbers(row));
    }
    let _ = writeln!(s, "\n[adjustment]");
    match &file.adjustment {
        AdjustmentSpec::Naive => {
            let _ = writeln!(s, "kind = naive");
        }
        AdjustmentSpec::Scale { factor } => {
            let _ = writeln!(s, "kind = scale");
            let _ = writeln!(s, "factor = {factor}");
        }
        AdjustmentSpec::Generator { expr } => {
            let _ = writeln!(s, "kind = generator");
            let _ = writeln!(s, "expr = {}", expr.render());
        }
        AdjustmentSpec::Tabulated { knots } => {
            let _ = writeln!(s, "kind = tabulated");
            let pairs: Vec<String> = knots.iter().map(|(a, b)| format!("{a}:{b}")).collect();
            let _ = writeln!(s, "knots = {}", pairs.join(" "));
        }
    }
    s
}

fn join_numbers(v: &[f64]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

/// Everything needed to run commands against a parsed file.
pub struct Runtime {
    pub scenario: Scenario,
    pub plan: AdjustmentPlan,
    pub base_time: f64,
    pub costs: Vec<f64>,
}

/// Bind a parsed file to the runtime types, optionally overriding the base
/// time from the command line.
pub fn to_runtime(file: &ScenarioFile, base_override: Option<f64>) -> Result<Runtime, ParseError> {
    let base_time = base_override.unwrap_or(file.base_time);
    let utilities: Result<Vec<UtilityFunction>, _> = file
        .utility_rows
        .iter()
        .map(|row| UtilityFunction::cobb_douglas(row.clone()))
        .collect();
    let utilities = utilities.map_err(|e| ParseError::global(e.to_string()))?;
    let prices: Result<Vec<PriceFunctional>, _> = file
        .price_rows
        .iter()
        .map(|row| PriceFunctional::new(row.clone()))
        .collect();
    let prices = prices.map_err(|e| ParseError::global(e.to_string()))?;
    let scenario = Scenario::new(file.times.clone(), utilities, prices)
        .map_err(|e| ParseError::global(e.to_string()))?;
    scenario.index_of_time(base_time).map_err(|_| {
        ParseError::global(format!("base time {base_time} is not on the time grid"))
    })?;

    let plan = match &file.adjustment {
        AdjustmentSpec::Naive => AdjustmentPlan::Naive,
        AdjustmentSpec::Scale { factor } => AdjustmentPlan::ScalePerUnitTime(*factor),
        AdjustmentSpec::Generator { expr } => {
            let t_lo = file.times[0];
            let t_hi = file.times[file.times.len() - 1];
            AdjustmentPlan::Generator(expr.build(t_lo, t_hi))
        }
        AdjustmentSpec::Tabulated { knots } => AdjustmentPlan::FixedTabulated {
            c_in: knots.iter().map(|k| k.0).collect(),
            c_out: knots.iter().map(|k| k.1).collect(),
        },
    };
    Ok(Runtime {
        scenario,
        plan,
        base_time,
        costs: file.costs.clone(),
    })
}
