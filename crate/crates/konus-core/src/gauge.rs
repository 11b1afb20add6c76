//! Orientation-preserving reparameterizations of the utility scale and
//! cross-sections of the indifference foliation.
//!
//! A gauge map relabels utility levels without touching the level sets
//! themselves: two utility functions with the same foliation differ exactly
//! by such a map. Elements are represented either as pure scalings or as
//! strictly increasing knot tables with shape-preserving interpolation.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::interp::{log_grid, MonotoneMap};
use crate::utility::{Basket, UtilityFunction};

/// Default knot count for tabulated gauge maps sampled from a function.
pub const DEFAULT_GAUGE_KNOTS: usize = 256;

/// Relative slack allowed when evaluating a tabulated map at its boundary.
const RANGE_SLACK: f64 = 1e-9;

/// Concrete representation of a gauge map.
#[derive(Debug, Clone)]
pub enum GaugeRepr {
    /// Pure scaling `u -> factor * u`, exact under evaluation and inversion.
    Scaling { factor: f64 },
    /// Strictly increasing knot table on a bounded utility range.
    Tabulated { map: MonotoneMap },
}

/// A monotone reassignment of utilities, an element of the gauge group.
#[derive(Debug, Clone)]
pub struct GaugeMap {
    repr: GaugeRepr,
}

impl GaugeMap {
    pub fn identity() -> Self {
        GaugeMap {
            repr: GaugeRepr::Scaling { factor: 1.0 },
        }
    }

    /// Pure scaling by a strictly positive factor.
    pub fn scaling(factor: f64) -> Result<Self> {
        if !factor.is_finite() {
            return Err(Error::NonFinite {
                context: "gauge scaling factor",
                value: factor,
            });
        }
        if factor <= 0.0 {
            return Err(Error::NonPositive {
                context: "gauge scaling factor",
                index: 0,
                value: factor,
            });
        }
        Ok(GaugeMap {
            repr: GaugeRepr::Scaling { factor },
        })
    }

    /// Tabulated map from knot pairs, both strictly increasing and positive.
    pub fn from_knots(u: Vec<f64>, gu: Vec<f64>) -> Result<Self> {
        for knots in [&u, &gu] {
            for (i, &v) in knots.iter().enumerate() {
                if v <= 0.0 {
                    return Err(Error::NonPositive {
                        context: "gauge knot",
                        index: i,
                        value: v,
                    });
                }
            }
        }
        Ok(GaugeMap {
            repr: GaugeRepr::Tabulated {
                map: MonotoneMap::new(u, gu)?,
            },
        })
    }

    /// [`GaugeMap::tabulate`] with the default knot count.
    pub fn tabulate_default<F: Fn(f64) -> f64>(f: F, u_lo: f64, u_hi: f64) -> Result<Self> {
        Self::tabulate(f, u_lo, u_hi, DEFAULT_GAUGE_KNOTS)
    }

    /// Sample a monotone function on `knots` log-spaced points over
    /// `[u_lo, u_hi]` and tabulate it.
    pub fn tabulate<F: Fn(f64) -> f64>(f: F, u_lo: f64, u_hi: f64, knots: usize) -> Result<Self> {
        if !(u_lo > 0.0 && u_hi > u_lo) {
            return Err(Error::NonPositive {
                context: "gauge tabulation range",
                index: 0,
                value: u_lo,
            });
        }
        let grid = log_grid(u_lo, u_hi, knots.max(2));
        let values: Vec<f64> = grid.iter().map(|&u| f(u)).collect();
        Self::from_knots(grid, values)
    }

    pub fn repr(&self) -> &GaugeRepr {
        &self.repr
    }

    /// Tabulated domain, or `None` for scalings (defined on all of R+).
    pub fn domain(&self) -> Option<(f64, f64)> {
        match &self.repr {
            GaugeRepr::Scaling { .. } => None,
            GaugeRepr::Tabulated { map } => Some(map.domain()),
        }
    }

    /// Apply the map. Tabulated maps reject queries outside their knot range.
    pub fn forward(&self, u: f64) -> Result<f64> {
        match &self.repr {
            GaugeRepr::Scaling { factor } => Ok(factor * u),
            GaugeRepr::Tabulated { map } => {
                let (lo, hi) = map.domain();
                let u = clamp_into_range(u, lo, hi)?;
                Ok(map.eval(u))
            }
        }
    }

    /// Apply the inverse map.
    pub fn inverse(&self, u: f64) -> Result<f64> {
        match &self.repr {
            GaugeRepr::Scaling { factor } => Ok(u / factor),
            GaugeRepr::Tabulated { map } => {
                let (lo, hi) = map.range();
                let u = clamp_into_range(u, lo, hi)?;
                Ok(map.eval_inverse(u))
            }
        }
    }

    /// Derivative of the forward map; used to chain gradients when a gauge
    /// is composed with a utility function.
    pub fn forward_deriv(&self, u: f64) -> Result<f64> {
        match &self.repr {
            GaugeRepr::Scaling { factor } => Ok(*factor),
            GaugeRepr::Tabulated { map } => {
                let (lo, hi) = map.domain();
                let u = clamp_into_range(u, lo, hi)?;
                Ok(map.deriv(u))
            }
        }
    }
}

fn clamp_into_range(u: f64, lo: f64, hi: f64) -> Result<f64> {
    let slack = RANGE_SLACK * hi.abs().max(1.0);
    if u < lo - slack || u > hi + slack {
        return Err(Error::GaugeOutOfRange { value: u, lo, hi });
    }
    Ok(u.clamp(lo, hi))
}

/// Map assigning one representative basket to each utility level.
pub type SectionFn = Arc<dyn Fn(f64) -> Result<Basket> + Send + Sync>;

/// A cross-section of the foliation: `C(map(u)) = u` for every level `u`.
#[derive(Clone)]
pub struct CrossSection {
    utility: UtilityFunction,
    map: SectionFn,
}

impl fmt::Debug for CrossSection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CrossSection")
            .field("utility", &self.utility)
            .finish()
    }
}

impl CrossSection {
    pub fn new(utility: UtilityFunction, map: SectionFn) -> Self {
        CrossSection { utility, map }
    }

    /// Convenience constructor from a plain closure returning coordinates.
    pub fn from_fn<F>(utility: UtilityFunction, f: F) -> Self
    where
        F: Fn(f64) -> Vec<f64> + Send + Sync + 'static,
    {
        CrossSection {
            utility,
            map: Arc::new(move |u| Basket::new(f(u))),
        }
    }

    pub fn utility(&self) -> &UtilityFunction {
        &self.utility
    }

    /// Representative basket at level `u`.
    pub fn basket_at(&self, u: f64) -> Result<Basket> {
        (self.map)(u)
    }
}

/// Compose a gauge map with a utility function: `q -> G(C(q))`.
///
/// The result is a black-box utility with the same foliation; its gradient
/// chains the gauge derivative through the underlying gradient.
pub fn apply_gauge(gauge: &GaugeMap, utility: &UtilityFunction) -> UtilityFunction {
    let dim = utility.dim();
    let g_eval = gauge.clone();
    let u_eval = utility.clone();
    let g_grad = gauge.clone();
    let u_grad = utility.clone();
    let label = match utility.label() {
        Some(l) => format!("gauged({l})"),
        None => "gauged".to_string(),
    };
    UtilityFunction::black_box(
        dim,
        Arc::new(move |q: &[f64]| g_eval.forward(u_eval.eval_raw(q)?)),
        Arc::new(move |q: &[f64]| {
            let u = u_grad.eval_raw(q)?;
            let scale = g_grad.forward_deriv(u)?;
            Ok(u_grad
                .gradient_raw(q)?
                .into_iter()
                .map(|g| scale * g)
                .collect())
        }),
    )
    .with_label(label)
}

/// Reparameterize a section after a gauge change: the new section is
/// `u -> X(G^{ -1 }(u))`, a valid section for `G o C` with unchanged image.
pub fn reparameterize_section(section: &CrossSection, gauge: &GaugeMap) -> CrossSection {
    let utility = apply_gauge(gauge, section.utility());
    let inner = section.map.clone();
    let g = gauge.clone();
    CrossSection {
        utility,
        map: Arc::new(move |u| inner(g.inverse(u)?)),
    }
}

/// Recover the gauge map relating two utility functions on the same
/// foliation from sampled baskets.
///
/// Fits the pairs `(C1(q), C2(q))` with a monotone map; returns a pure
/// scaling when one fits all samples within `tol`, otherwise a tabulated
/// map through the deduplicated pairs. Fails with [`Error::NotSameFoliation`]
/// when two samples share a `C1` level but disagree on `C2` beyond `tol`,
/// and with [`Error::NonMonotone`] when the fitted pairs decrease.
pub fn infer_gauge(
    c1: &UtilityFunction,
    c2: &UtilityFunction,
    samples: &[Basket],
    tol: f64,
) -> Result<GaugeMap> {
    if samples.len() < 2 {
        return Err(Error::InsufficientSamples);
    }
    let mut pairs: Vec<(f64, f64, &Basket)> = Vec::with_capacity(samples.len());
    for q in samples {
        pairs.push((c1.eval(q)?, c2.eval(q)?, q));
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));

    // group samples sharing a C1 level; within a group C2 must agree
    let mut knots_u: Vec<f64> = Vec::new();
    let mut knots_v: Vec<f64> = Vec::new();
    let mut i = 0;
    while i < pairs.len() {
        let mut j = i + 1;
        while j < pairs.len() && (pairs[j].0 - pairs[i].0).abs() <= tol * pairs[i].0.abs().max(1.0)
        {
            j += 1;
        }
        let group = &pairs[i..j];
        let (v_min, v_max) = group
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
                (lo.min(p.1), hi.max(p.1))
            });
        if v_max - v_min > tol * v_max.abs().max(1.0) {
            let first = group.iter().min_by(|a, b| a.1.total_cmp(&b.1)).unwrap();
            let second = group.iter().max_by(|a, b| a.1.total_cmp(&b.1)).unwrap();
            return Err(Error::NotSameFoliation {
                first: first.2.clone(),
                second: second.2.clone(),
                level: first.0,
                a: first.1,
                b: second.1,
            });
        }
        let u_rep = group.iter().map(|p| p.0).sum::<f64>() / group.len() as f64;
        let v_rep = group.iter().map(|p| p.1).sum::<f64>() / group.len() as f64;
        knots_u.push(u_rep);
        knots_v.push(v_rep);
        i = j;
    }
    if knots_u.len() < 2 {
        return Err(Error::InsufficientSamples);
    }
    for k in 1..knots_v.len() {
        if knots_v[k] <= knots_v[k - 1] {
            return Err(Error::NonMonotone {
                level: knots_u[k],
                a: knots_v[k - 1],
                b: knots_v[k],
            });
        }
    }

    // pure scaling detection: constant ratio across all levels
    let ratios: Vec<f64> = knots_u.iter().zip(&knots_v).map(|(&u, &v)| v / u).collect();
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    if mean > 0.0
        && ratios
            .iter()
            .all(|&r| (r - mean).abs() <= tol * mean.abs().max(1.0))
    {
        return GaugeMap::scaling(mean);
    }

    GaugeMap::from_knots(knots_u, knots_v)
}
