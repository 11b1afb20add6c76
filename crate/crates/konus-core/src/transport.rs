//! Parallel transport along the time axis.
//!
//! Two realizations of the same idea live here. The one-dimensional
//! reference transport integrates `f'(t) + A(gamma(t)) f(t) = 0` along a
//! straight line with classical fixed-step RK4. Cost-adjustment flows
//! integrate `dc/dt = v(t, c)` for a time-dependent generator `v`, producing
//! monotone cost reparameterizations that obey the one-parameter group laws
//! (identity, invertibility, compositionality) up to integration error.
//!
//! Fixed-step integration is deliberate: results are reproducible bit for
//! bit and the accuracy at desk scale is far below the tolerances used by
//! the index computations.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::gauge::CrossSection;
use crate::interp::MonotoneMap;
use crate::utility::{Basket, UtilityFunction};

/// Default RK4 resolution for flows: steps per unit time.
pub const DEFAULT_FLOW_STEPS_PER_UNIT: f64 = 1000.0;
/// Trajectories beyond this magnitude count as divergent.
const OVERFLOW_GUARD: f64 = 1e300;
/// Maximum step-halving depth when a flow step lands outside the domain.
const MAX_SUBSTEP_DEPTH: u32 = 24;
/// Relative tolerance when matching adjustment endpoints in time.
const TIME_EPS: f64 = 1e-9;

/// Scalar connection for the one-dimensional transport: a function of the
/// base-line position.
#[derive(Clone)]
pub struct Connection1D {
    a: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl fmt::Debug for Connection1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Connection1D").finish()
    }
}

impl Connection1D {
    pub fn from_fn<F: Fn(f64) -> f64 + Send + Sync + 'static>(a: F) -> Self {
        Connection1D { a: Arc::new(a) }
    }

    /// The trivial connection; parallel means constant.
    pub fn zero() -> Self {
        Self::from_fn(|_| 0.0)
    }

    pub fn constant(a: f64) -> Self {
        Self::from_fn(move |_| a)
    }

    /// `A(x) = slope * x`.
    pub fn linear(slope: f64) -> Self {
        Self::from_fn(move |x| slope * x)
    }

    pub fn sample(&self, x: f64) -> f64 {
        (self.a)(x)
    }
}

/// Transport the value `x` from base point `p` to `q >= p` by integrating
/// `f' + A(p + t) f = 0`, `f(0) = x`, with `steps` fixed RK4 steps.
pub fn transport_1d(
    connection: &Connection1D,
    p: f64,
    q: f64,
    x: f64,
    steps: usize,
) -> Result<f64> {
    if steps == 0 {
        return Err(Error::Empty { what: "step count" });
    }
    if q < p {
        return Err(Error::SpanMismatch {
            have_from: p,
            have_to: q,
            want_from: p,
            want_to: p.max(q),
        });
    }
    let span = q - p;
    if span == 0.0 {
        return Ok(x);
    }
    let h = span / steps as f64;
    let sample = |t: f64| -> Result<f64> {
        let a = connection.sample(p + t);
        if !a.is_finite() {
            return Err(Error::NonFinite {
                context: "connection sample",
                value: a,
            });
        }
        Ok(a)
    };
    let mut f = x;
    let mut t = 0.0;
    for _ in 0..steps {
        let k1 = -sample(t)? * f;
        let k2 = -sample(t + 0.5 * h)? * (f + 0.5 * h * k1);
        let k3 = -sample(t + 0.5 * h)? * (f + 0.5 * h * k2);
        let k4 = -sample(t + h)? * (f + h * k3);
        f += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        t += h;
    }
    Ok(f)
}

/// Time-dependent vector field `v(t, c)` on the positive cost line; its flow
/// generates cost adjustments.
#[derive(Clone)]
pub struct CostGenerator {
    v: Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>,
    t_lo: f64,
    t_hi: f64,
}

impl fmt::Debug for CostGenerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CostGenerator")
            .field("t_lo", &self.t_lo)
            .field("t_hi", &self.t_hi)
            .finish()
    }
}

impl CostGenerator {
    pub fn from_fn<F>(t_lo: f64, t_hi: f64, v: F) -> Self
    where
        F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        CostGenerator {
            v: Arc::new(v),
            t_lo,
            t_hi,
        }
    }

    /// `v = 0`: flows are the identity.
    pub fn zero(t_lo: f64, t_hi: f64) -> Self {
        Self::from_fn(t_lo, t_hi, |_, _| 0.0)
    }

    /// Constant absolute drift `v = k`.
    pub fn constant(t_lo: f64, t_hi: f64, k: f64) -> Self {
        Self::from_fn(t_lo, t_hi, move |_, _| k)
    }

    /// Relative drift `v = k * c`; flows scale costs by `exp(k dt)`.
    pub fn relative(t_lo: f64, t_hi: f64, k: f64) -> Self {
        Self::from_fn(t_lo, t_hi, move |_, c| k * c)
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.t_lo, self.t_hi)
    }

    pub fn sample(&self, t: f64, c: f64) -> f64 {
        (self.v)(t, c)
    }
}

/// How a cost adjustment came to be.
#[derive(Debug, Clone)]
pub enum AdjustmentProvenance {
    /// The identity: equal cost is treated as equal welfare.
    Naive,
    /// Realized as the flow of a generator.
    Flow(CostGenerator),
    /// Supplied directly (tabulated knots, scalings, compositions).
    Explicit,
}

impl AdjustmentProvenance {
    pub fn tag(&self) -> &'static str {
        match self {
            AdjustmentProvenance::Naive => "naive",
            AdjustmentProvenance::Flow(_) => "flow",
            AdjustmentProvenance::Explicit => "explicit",
        }
    }
}

#[derive(Debug, Clone)]
enum AdjustMap {
    Identity,
    Scale(f64),
    Tabulated(MonotoneMap),
}

/// A monotone reparameterization of costs attached to a time interval; a
/// realized parallel-transport operator.
#[derive(Debug, Clone)]
pub struct CostAdjustment {
    t_from: f64,
    t_to: f64,
    map: AdjustMap,
    provenance: AdjustmentProvenance,
}

fn times_match(a: f64, b: f64) -> bool {
    (a - b).abs() <= TIME_EPS * a.abs().max(b.abs()).max(1.0)
}

impl CostAdjustment {
    /// The identity adjustment between two times.
    pub fn naive(t_from: f64, t_to: f64) -> Self {
        CostAdjustment {
            t_from,
            t_to,
            map: AdjustMap::Identity,
            provenance: AdjustmentProvenance::Naive,
        }
    }

    /// Pure cost scaling `c -> factor * c`.
    pub fn scaling(t_from: f64, t_to: f64, factor: f64) -> Result<Self> {
        if !(factor.is_finite() && factor > 0.0) {
            return Err(Error::NonPositive {
                context: "adjustment scale factor",
                index: 0,
                value: factor,
            });
        }
        if times_match(t_from, t_to) && factor != 1.0 {
            return Err(Error::InvalidAdjustment {
                reason: "an adjustment over an empty time span must be the identity",
            });
        }
        Ok(CostAdjustment {
            t_from,
            t_to,
            map: if factor == 1.0 {
                AdjustMap::Identity
            } else {
                AdjustMap::Scale(factor)
            },
            provenance: AdjustmentProvenance::Explicit,
        })
    }

    /// Tabulated adjustment from strictly increasing positive knot pairs.
    pub fn tabulated(t_from: f64, t_to: f64, c_in: Vec<f64>, c_out: Vec<f64>) -> Result<Self> {
        if times_match(t_from, t_to) {
            return Err(Error::InvalidAdjustment {
                reason: "an adjustment over an empty time span must be the identity",
            });
        }
        for knots in [&c_in, &c_out] {
            for (i, &v) in knots.iter().enumerate() {
                if !(v.is_finite() && v > 0.0) {
                    return Err(Error::NonPositive {
                        context: "adjustment knot",
                        index: i,
                        value: v,
                    });
                }
            }
        }
        Ok(CostAdjustment {
            t_from,
            t_to,
            map: AdjustMap::Tabulated(MonotoneMap::new(c_in, c_out)?),
            provenance: AdjustmentProvenance::Explicit,
        })
    }

    pub fn t_from(&self) -> f64 {
        self.t_from
    }

    pub fn t_to(&self) -> f64 {
        self.t_to
    }

    pub fn provenance(&self) -> &AdjustmentProvenance {
        &self.provenance
    }

    pub fn is_identity(&self) -> bool {
        matches!(self.map, AdjustMap::Identity)
    }

    /// Apply the adjustment to a cost. Tabulated maps extend past their knot
    /// range linearly with the endpoint slope, so the group operations stay
    /// closed on nearby grids.
    pub fn apply(&self, c: f64) -> Result<f64> {
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::NonPositive {
                context: "cost",
                index: 0,
                value: c,
            });
        }
        let out = match &self.map {
            AdjustMap::Identity => c,
            AdjustMap::Scale(k) => k * c,
            AdjustMap::Tabulated(map) => map.eval(c),
        };
        if !(out.is_finite() && out > 0.0) {
            return Err(Error::FlowEscape {
                time: self.t_to,
                cost: out,
            });
        }
        Ok(out)
    }

    /// Check that this adjustment covers `[t_from, t_to]`.
    pub fn check_span(&self, t_from: f64, t_to: f64) -> Result<()> {
        if times_match(self.t_from, t_from) && times_match(self.t_to, t_to) {
            Ok(())
        } else {
            Err(Error::SpanMismatch {
                have_from: self.t_from,
                have_to: self.t_to,
                want_from: t_from,
                want_to: t_to,
            })
        }
    }
}

fn rk4_flow_step(g: &CostGenerator, t: f64, c: f64, h: f64) -> Result<f64> {
    let eval = |t: f64, c: f64| -> Result<f64> {
        let v = g.sample(t, c);
        if !v.is_finite() {
            return Err(Error::NonFinite {
                context: "generator sample",
                value: v,
            });
        }
        Ok(v)
    };
    let k1 = eval(t, c)?;
    let k2 = eval(t + 0.5 * h, c + 0.5 * h * k1)?;
    let k3 = eval(t + 0.5 * h, c + 0.5 * h * k2)?;
    let k4 = eval(t + h, c + h * k3)?;
    Ok(c + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4))
}

/// One step with recursive halving when the trajectory leaves the positive
/// domain mid-step. Non-finite generator samples propagate unchanged;
/// halving cannot repair those.
fn flow_step_guarded(g: &CostGenerator, t: f64, c: f64, h: f64, depth: u32) -> Result<f64> {
    let next = rk4_flow_step(g, t, c, h)?;
    if next > 0.0 && next.abs() < OVERFLOW_GUARD {
        return Ok(next);
    }
    if depth >= MAX_SUBSTEP_DEPTH {
        return Err(Error::FlowEscape {
            time: t,
            cost: next,
        });
    }
    let half = flow_step_guarded(g, t, c, 0.5 * h, depth + 1)?;
    flow_step_guarded(g, t + 0.5 * h, half, 0.5 * h, depth + 1)
}

fn flow_single(g: &CostGenerator, t_a: f64, t_b: f64, c0: f64, steps: usize) -> Result<f64> {
    let h = (t_b - t_a) / steps as f64;
    let mut c = c0;
    let mut t = t_a;
    for _ in 0..steps {
        c = flow_step_guarded(g, t, c, h, 0)?;
        t += h;
    }
    Ok(c)
}

/// Integrate the generator's flow from `t_a` to `t_b` for every cost on the
/// grid and tabulate the resulting monotone map. Backward spans integrate
/// with negative steps.
pub fn flow_adjustment(
    generator: &CostGenerator,
    t_a: f64,
    t_b: f64,
    c_grid: &[f64],
) -> Result<CostAdjustment> {
    let (lo, hi) = generator.domain();
    if t_a.min(t_b) < lo - TIME_EPS || t_a.max(t_b) > hi + TIME_EPS {
        return Err(Error::GeneratorDomain {
            want_from: t_a,
            want_to: t_b,
            lo,
            hi,
        });
    }
    if t_a == t_b {
        return Ok(CostAdjustment {
            t_from: t_a,
            t_to: t_b,
            map: AdjustMap::Identity,
            provenance: AdjustmentProvenance::Flow(generator.clone()),
        });
    }
    if c_grid.len() < 2 {
        return Err(Error::Empty { what: "cost grid" });
    }
    for (i, &c) in c_grid.iter().enumerate() {
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::NonPositive {
                context: "cost grid",
                index: i,
                value: c,
            });
        }
        if i > 0 && c <= c_grid[i - 1] {
            return Err(Error::NonIncreasingKnots {
                index: i,
                previous: c_grid[i - 1],
                value: c,
            });
        }
    }

    let steps = ((t_b - t_a).abs() * DEFAULT_FLOW_STEPS_PER_UNIT)
        .ceil()
        .max(1.0) as usize;
    let mut out = Vec::with_capacity(c_grid.len());
    for &c0 in c_grid {
        out.push(flow_single(generator, t_a, t_b, c0, steps)?);
    }
    // trajectories of a Lipschitz field cannot cross; a non-monotone table
    // means the integration broke down
    for i in 1..out.len() {
        if out[i] <= out[i - 1] {
            return Err(Error::NonMonotone {
                level: c_grid[i],
                a: out[i - 1],
                b: out[i],
            });
        }
    }
    Ok(CostAdjustment {
        t_from: t_a,
        t_to: t_b,
        map: AdjustMap::Tabulated(MonotoneMap::new(c_grid.to_vec(), out)?),
        provenance: AdjustmentProvenance::Flow(generator.clone()),
    })
}

/// Compose two adjustments: the result runs from `earlier.t_from` to
/// `later.t_to` and applies `earlier` first.
pub fn compose_adjustments(
    later: &CostAdjustment,
    earlier: &CostAdjustment,
) -> Result<CostAdjustment> {
    if !times_match(earlier.t_to, later.t_from) {
        return Err(Error::TimeMismatch {
            earlier_end: earlier.t_to,
            later_start: later.t_from,
        });
    }
    let map = match (&later.map, &earlier.map) {
        (AdjustMap::Identity, m) | (m, AdjustMap::Identity) => m.clone(),
        (AdjustMap::Scale(k2), AdjustMap::Scale(k1)) => AdjustMap::Scale(k1 * k2),
        (AdjustMap::Scale(k2), AdjustMap::Tabulated(t1)) => {
            let y: Vec<f64> = t1.knots_y().iter().map(|&v| k2 * v).collect();
            AdjustMap::Tabulated(MonotoneMap::new(t1.knots_x().to_vec(), y)?)
        }
        (AdjustMap::Tabulated(t2), AdjustMap::Scale(k1)) => {
            // tabulate on the preimage of the later knots, exact under scaling
            let x: Vec<f64> = t2.knots_x().iter().map(|&v| v / k1).collect();
            AdjustMap::Tabulated(MonotoneMap::new(x, t2.knots_y().to_vec())?)
        }
        (AdjustMap::Tabulated(t2), AdjustMap::Tabulated(t1)) => {
            let y: Vec<f64> = t1.knots_y().iter().map(|&v| t2.eval(v)).collect();
            AdjustMap::Tabulated(MonotoneMap::new(t1.knots_x().to_vec(), y)?)
        }
    };
    Ok(CostAdjustment {
        t_from: earlier.t_from,
        t_to: later.t_to,
        map,
        provenance: AdjustmentProvenance::Explicit,
    })
}

/// Invert an adjustment: times swap and the map becomes the monotone
/// inverse (re-tabulated for knot tables).
pub fn invert_adjustment(adj: &CostAdjustment) -> Result<CostAdjustment> {
    let map = match &adj.map {
        AdjustMap::Identity => AdjustMap::Identity,
        AdjustMap::Scale(k) => AdjustMap::Scale(1.0 / k),
        AdjustMap::Tabulated(t) => AdjustMap::Tabulated(t.inverted()),
    };
    Ok(CostAdjustment {
        t_from: adj.t_to,
        t_to: adj.t_from,
        map,
        provenance: AdjustmentProvenance::Explicit,
    })
}

/// Scalar utility variation evaluated on basket coordinates.
pub type UtilityVariation = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
/// Basket variation field evaluated on section points.
pub type BasketVariation = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

/// A first-order perturbation of a (utility, section) pair: a utility
/// variation `gamma` on baskets and a basket variation field `nu` along the
/// section image.
#[derive(Clone)]
pub struct TangentPerturbation {
    pub gamma: UtilityVariation,
    pub nu: BasketVariation,
}

impl fmt::Debug for TangentPerturbation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TangentPerturbation").finish()
    }
}

impl TangentPerturbation {
    pub fn new<G, N>(gamma: G, nu: N) -> Self
    where
        G: Fn(&[f64]) -> f64 + Send + Sync + 'static,
        N: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        TangentPerturbation {
            gamma: Arc::new(gamma),
            nu: Arc::new(nu),
        }
    }
}

/// One grid point's diagnostics from [`horizontality_check`].
#[derive(Debug, Clone)]
pub struct HorizontalityViolation {
    pub level: f64,
    pub gamma_value: f64,
    pub normal_component: f64,
}

/// Outcome of the horizontality predicate.
#[derive(Debug, Clone)]
pub struct HorizontalityReport {
    pub horizontal: bool,
    /// Largest `|gamma|` seen on the section image.
    pub worst_gamma: f64,
    /// Largest normalized `|grad C . nu|` seen.
    pub worst_normal: f64,
    pub violations: Vec<HorizontalityViolation>,
}

/// Check the two horizontality conditions on a grid of levels: the utility
/// variation vanishes along the section image, and the basket variation is
/// tangent to the indifference set at every section point.
pub fn horizontality_check(
    utility: &UtilityFunction,
    section: &CrossSection,
    perturbation: &TangentPerturbation,
    u_grid: &[f64],
    tol: f64,
) -> Result<HorizontalityReport> {
    let mut report = HorizontalityReport {
        horizontal: true,
        worst_gamma: 0.0,
        worst_normal: 0.0,
        violations: Vec::new(),
    };
    for &u in u_grid {
        let point: Basket = section.basket_at(u)?;
        let coords = point.quantities();
        let gamma = (perturbation.gamma)(coords);
        let nu = (perturbation.nu)(coords);
        if nu.len() != utility.dim() {
            return Err(Error::DimensionMismatch {
                expected: utility.dim(),
                got: nu.len(),
            });
        }
        let grad = utility.gradient(&point)?;
        let dot: f64 = grad.iter().zip(&nu).map(|(a, b)| a * b).sum();
        let grad_norm = grad.iter().map(|v| v * v).sum::<f64>().sqrt();
        let nu_norm = nu.iter().map(|v| v * v).sum::<f64>().sqrt();
        let normal = if grad_norm * nu_norm > 0.0 {
            dot.abs() / (grad_norm * nu_norm)
        } else {
            0.0
        };
        report.worst_gamma = report.worst_gamma.max(gamma.abs());
        report.worst_normal = report.worst_normal.max(normal);
        if gamma.abs() > tol || normal > tol {
            report.horizontal = false;
            report.violations.push(HorizontalityViolation {
                level: u,
                gamma_value: gamma,
                normal_component: normal,
            });
        }
    }
    Ok(report)
}
