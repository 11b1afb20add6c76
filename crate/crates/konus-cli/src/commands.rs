//! Command implementations shared by the binary and the integration tests.

use std::fmt;
use std::fmt::Write as _;

use konus_core::interp::log_grid;
use konus_core::{
    fixed_utility_index_series, index_series, invert_adjustment, minimal_basket, transport_1d,
    validate_convex_to_origin, validate_cross_section, AdjustmentPlan, Connection1D,
    CostAdjustment, CrossSection, Scenario, UtilityFunction,
};

use crate::scenario::Runtime;
use crate::table::{format_fixed12, ResultTable, Row};

/// Errors mapped onto the process exit codes: input 1, numeric 2,
/// validation 3.
#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Input(String),
    Numeric(String),
    Validation(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 1,
            CliError::Numeric(_) => 2,
            CliError::Validation(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "input error: {m}"),
            CliError::Numeric(m) => write!(f, "numeric failure: {m}"),
            CliError::Validation(m) => write!(f, "validation failure: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

/// Run the index computation over a bound scenario and assemble the result
/// table in time-major, then cost, order.
///
/// With `fixed_utility` the scenario's adjustment is ignored and the
/// comparison convention that holds the base-time utility level fixed is
/// used instead; the adjusted-cost column then carries the repriced cost
/// of that level.
pub fn run_index(runtime: &Runtime, fixed_utility: bool) -> Result<ResultTable, CliError> {
    let series = if fixed_utility {
        fixed_utility_index_series(&runtime.scenario, runtime.base_time, &runtime.costs)
    } else {
        index_series(
            &runtime.scenario,
            &runtime.plan,
            runtime.base_time,
            &runtime.costs,
        )
    }
    .map_err(|e| CliError::Numeric(e.to_string()))?;

    let times = runtime.scenario.times().to_vec();
    let mut rows = Vec::with_capacity(times.len() * runtime.costs.len());
    for (t_idx, &t) in times.iter().enumerate() {
        for (c_idx, &c) in runtime.costs.iter().enumerate() {
            let entry = &series[c_idx].entries[t_idx];
            match &entry.outcome {
                Ok(point) => rows.push(Row {
                    time: t,
                    reference_cost: c,
                    index: point.index,
                    adjusted_cost: point.adjusted_cost,
                    basket: point.basket.quantities().to_vec(),
                }),
                Err(e) => {
                    return Err(CliError::Numeric(format!("at time {t}, cost {c}: {e}")));
                }
            }
        }
    }
    Ok(ResultTable {
        goods: runtime.scenario.dim(),
        rows,
    })
}

/// One validator outcome.
#[derive(Debug, Clone)]
pub struct CheckLine {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// All validator outcomes for one scenario.
#[derive(Debug, Clone)]
pub struct ValidationOutcome {
    pub checks: Vec<CheckLine>,
}

impl ValidationOutcome {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for check in &self.checks {
            if check.passed {
                let _ = writeln!(out, "check {}: pass", check.name);
            } else {
                let _ = writeln!(out, "check {}: FAIL ({})", check.name, check.detail);
            }
        }
        let _ = writeln!(
            out,
            "{} of {} checks passed",
            self.checks.iter().filter(|c| c.passed).count(),
            self.checks.len()
        );
        out
    }
}

const GROUP_LAW_TOL: f64 = 1e-7;

/// Run the structural validators: per-time convexity to the origin, per-time
/// cross-section consistency of the minimal-price section, and the group
/// laws of the realized adjustment family.
pub fn validate_runtime(runtime: &Runtime, tol: f64) -> ValidationOutcome {
    let mut checks = Vec::new();
    let scenario = &runtime.scenario;
    let times = scenario.times().to_vec();

    for &t in &times {
        let utility = scenario.utility_at(t).expect("time on grid");
        checks.push(convexity_check(utility, t, tol));
        checks.push(section_check(scenario, t, tol));
    }
    checks.extend(adjustment_checks(runtime, tol));
    ValidationOutcome { checks }
}

fn convexity_check(utility: &UtilityFunction, t: f64, tol: f64) -> CheckLine {
    let name = format!("convex-to-origin t={t}");
    // the all-ones basket always sits on an attainable level
    let ones = vec![1.0; utility.dim()];
    let level = match utility.eval(&konus_core::Basket::new(ones).expect("ones basket")) {
        Ok(u) => u,
        Err(e) => {
            return CheckLine {
                name,
                passed: false,
                detail: format!("level probe failed: {e}"),
            };
        }
    };
    match validate_convex_to_origin(utility, level, 16, tol) {
        Ok(report) if report.passed => CheckLine {
            name,
            passed: true,
            detail: String::new(),
        },
        Ok(report) => {
            let detail = match &report.witness {
                Some(w) => format!(
                    "midpoint {:?} of two level-{} points has utility {}",
                    w.midpoint.quantities(),
                    report.level,
                    w.midpoint_utility
                ),
                None => "convexity violated".to_string(),
            };
            CheckLine {
                name,
                passed: false,
                detail,
            }
        }
        Err(e) => CheckLine {
            name,
            passed: false,
            detail: e.to_string(),
        },
    }
}

fn section_check(scenario: &Scenario, t: f64, tol: f64) -> CheckLine {
    let name = format!("cross-section t={t}");
    let utility = scenario.utility_at(t).expect("time on grid").clone();
    let prices = scenario.price_at(t).expect("time on grid").clone();
    let for_section = utility.clone();
    let section = CrossSection::new(
        utility,
        std::sync::Arc::new(move |u| Ok(minimal_basket(&for_section, &prices, u, 1e-10)?.basket)),
    );
    let grid = log_grid(0.25, 16.0, 9);
    match validate_cross_section(&section, &grid, tol.max(1e-8)) {
        Ok(true) => CheckLine {
            name,
            passed: true,
            detail: String::new(),
        },
        Ok(false) => CheckLine {
            name,
            passed: false,
            detail: "C(X(u)) drifted from u on the sample grid".to_string(),
        },
        Err(e) => CheckLine {
            name,
            passed: false,
            detail: e.to_string(),
        },
    }
}

fn adjustment_checks(runtime: &Runtime, tol: f64) -> Vec<CheckLine> {
    let mut checks = Vec::new();
    let tol = tol.max(GROUP_LAW_TOL);
    let scenario = &runtime.scenario;
    let realized = match runtime
        .plan
        .realize(scenario, runtime.base_time, &runtime.costs)
    {
        Ok(r) => r,
        Err(e) => {
            checks.push(CheckLine {
                name: "adjustment-identity".to_string(),
                passed: false,
                detail: format!("could not realize adjustments: {e}"),
            });
            return checks;
        }
    };
    let base_idx = scenario
        .index_of_time(runtime.base_time)
        .expect("base on grid");

    // identity at the base time, exact
    let base_ok = runtime
        .costs
        .iter()
        .all(|&c| matches!(realized[base_idx].apply(c), Ok(v) if v == c));
    checks.push(CheckLine {
        name: "adjustment-identity".to_string(),
        passed: base_ok,
        detail: if base_ok {
            String::new()
        } else {
            "base-time adjustment is not the identity".to_string()
        },
    });

    // inverse law on the last non-base adjustment
    if let Some(adj) = realized
        .iter()
        .enumerate()
        .rev()
        .find(|(i, _)| *i != base_idx)
        .map(|(_, adj)| adj)
    {
        let name = "adjustment-inverse".to_string();
        match invert_adjustment(adj) {
            Ok(inv) => {
                let mut worst = 0.0f64;
                let mut ok = true;
                for &c in &runtime.costs {
                    match adj.apply(c).and_then(|v| inv.apply(v)) {
                        Ok(round) => worst = worst.max((round - c).abs() / c),
                        Err(_) => ok = false,
                    }
                }
                let passed = ok && worst <= tol;
                checks.push(CheckLine {
                    name,
                    passed,
                    detail: if passed {
                        String::new()
                    } else {
                        format!("round trip drifted by {worst:e}")
                    },
                });
            }
            Err(e) => checks.push(CheckLine {
                name,
                passed: false,
                detail: e.to_string(),
            }),
        }
    }

    // compositionality for plans that form a one-parameter family
    if let Some(check) = composition_check(runtime, tol) {
        checks.push(check);
    }
    checks
}

fn composition_check(runtime: &Runtime, tol: f64) -> Option<CheckLine> {
    let times = runtime.scenario.times();
    if times.len() < 2 {
        return None;
    }
    let (t_a, t_c) = (times[0], times[times.len() - 1]);
    let t_b = times[times.len() / 2];
    if t_b <= t_a || t_b >= t_c {
        return None;
    }
    let name = "adjustment-composition".to_string();
    let legs: Option<(CostAdjustment, CostAdjustment, CostAdjustment)> = match &runtime.plan {
        AdjustmentPlan::Naive => Some((
            CostAdjustment::naive(t_a, t_b),
            CostAdjustment::naive(t_b, t_c),
            CostAdjustment::naive(t_a, t_c),
        )),
        AdjustmentPlan::ScalePerUnitTime(f) => Some((
            CostAdjustment::scaling(t_a, t_b, f.powf(t_b - t_a)).ok()?,
            CostAdjustment::scaling(t_b, t_c, f.powf(t_c - t_b)).ok()?,
            CostAdjustment::scaling(t_a, t_c, f.powf(t_c - t_a)).ok()?,
        )),
        AdjustmentPlan::Generator(g) => {
            let lo = runtime.costs.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = runtime.costs.iter().cloned().fold(0.0f64, f64::max);
            let grid = log_grid(lo / 8.0, hi * 8.0, 64);
            let ab = konus_core::flow_adjustment(g, t_a, t_b, &grid).ok()?;
            let bc = konus_core::flow_adjustment(g, t_b, t_c, &grid).ok()?;
            let ac = konus_core::flow_adjustment(g, t_a, t_c, &grid).ok()?;
            Some((ab, bc, ac))
        }
        // a fixed tabulated map is a valid welfare family but not a
        // one-parameter group; nothing to check
        AdjustmentPlan::FixedTabulated { .. } | AdjustmentPlan::PerTime(_) => None,
    };
    let (ab, bc, ac) = legs?;
    let composed = konus_core::compose_adjustments(&bc, &ab).ok()?;
    let mut worst = 0.0f64;
    for &c in &runtime.costs {
        match (composed.apply(c), ac.apply(c)) {
            (Ok(two_leg), Ok(direct)) => {
                worst = worst.max((two_leg - direct).abs() / direct.abs().max(1.0));
            }
            _ => {
                return Some(CheckLine {
                    name,
                    passed: false,
                    detail: "adjustment evaluation failed during composition".to_string(),
                });
            }
        }
    }
    let passed = worst <= tol;
    Some(CheckLine {
        name,
        passed,
        detail: if passed {
            String::new()
        } else {
            format!("two-leg and direct adjustments differ by {worst:e}")
        },
    })
}

/// Parse a connection spec: `zero` (or `0`), `const:K`, or `linear:K`.
pub fn parse_connection(spec: &str) -> Result<Connection1D, CliError> {
    let spec = spec.trim();
    if spec == "zero" || spec == "0" {
        return Ok(Connection1D::zero());
    }
    if let Some(rest) = spec.strip_prefix("const:") {
        let k: f64 = rest.parse().map_err(|_| {
            CliError::Input(format!("malformed connection spec '{spec}': bad constant"))
        })?;
        return Ok(Connection1D::constant(k));
    }
    if let Some(rest) = spec.strip_prefix("linear:") {
        let k: f64 = rest.parse().map_err(|_| {
            CliError::Input(format!("malformed connection spec '{spec}': bad slope"))
        })?;
        return Ok(Connection1D::linear(k));
    }
    Err(CliError::Input(format!(
        "malformed connection spec '{spec}' (expected zero, const:K, or linear:K)"
    )))
}

/// Transport a value along the line and format it for printing.
pub fn run_transport(
    spec: &str,
    from: f64,
    to: f64,
    initial: f64,
    steps: usize,
) -> Result<String, CliError> {
    let connection = parse_connection(spec)?;
    if to < from {
        return Err(CliError::Input(format!(
            "transport interval is reversed: from {from} to {to}"
        )));
    }
    if steps == 0 {
        return Err(CliError::Input("steps must be at least 1".to_string()));
    }
    let value = transport_1d(&connection, from, to, initial, steps)
        .map_err(|e| CliError::Numeric(e.to_string()))?;
    Ok(format_fixed12(value))
}
