//! Minimal-price baskets, the cost-of-living function, and the relabeling
//! of utilities by minimal attainment cost.
//!
//! For Cobb-Douglas utilities everything is closed form: at the optimum the
//! expenditure share of good `i` is `a_i / sum(a)`, which pins the basket,
//! and the level constraint pins the cost. The general path solves the
//! Lagrange stationarity system with a damped Newton iteration and inverts
//! the cost curve by bracketed bisection with a Newton polish.

use crate::error::{Error, Result};
use crate::linalg::solve_dense;
use crate::utility::{Basket, PriceFunctional, UtilityFunction, UtilityKind};
use crate::validate::locate_on_level;

/// Stationarity tolerance used when the caller does not supply one.
pub const DEFAULT_NEWTON_TOL: f64 = 1e-10;
const MAX_NEWTON_ITERATIONS: usize = 100;

/// An expenditure-minimizing basket on one indifference level.
#[derive(Debug, Clone)]
pub struct MinimalBasketRecord {
    /// Utility level of the basket.
    pub utility: f64,
    /// Minimal cost `P(q_star)` of attaining that level.
    pub cost: f64,
    /// The minimizer itself.
    pub basket: Basket,
    /// Lagrange multiplier: `p = -multiplier * grad C(q_star)` componentwise.
    pub multiplier: f64,
}

fn check_dims(c: &UtilityFunction, p: &PriceFunctional) -> Result<()> {
    if c.dim() != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: c.dim(),
            got: p.dim(),
        });
    }
    Ok(())
}

fn check_positive(value: f64, context: &'static str) -> Result<()> {
    if !value.is_finite() {
        return Err(Error::NonFinite { context, value });
    }
    if value <= 0.0 {
        return Err(Error::NonPositive {
            context,
            index: 0,
            value,
        });
    }
    Ok(())
}

/// Closed-form expenditure minimizer for a Cobb-Douglas utility.
///
/// With `A = sum_j a_j`, the minimizer satisfies `q_i = a_i c / (A p_i)` and
/// the cost follows from the level constraint:
/// `ln c = (ln u + sum_i a_i ln(A p_i / a_i)) / A`.
pub fn minimal_basket_closed_form(
    exponents: &[f64],
    prices: &PriceFunctional,
    u: f64,
) -> Result<MinimalBasketRecord> {
    if exponents.len() != prices.dim() {
        return Err(Error::DimensionMismatch {
            expected: exponents.len(),
            got: prices.dim(),
        });
    }
    check_positive(u, "utility level")?;
    for (i, &a) in exponents.iter().enumerate() {
        if !(a.is_finite() && a > 0.0) {
            return Err(Error::NonPositive {
                context: "Cobb-Douglas exponent",
                index: i,
                value: a,
            });
        }
    }
    let total: f64 = exponents.iter().sum();
    let mut log_c = u.ln();
    for (a, &p) in exponents.iter().zip(prices.prices()) {
        log_c += a * (total * p / a).ln();
    }
    log_c /= total;
    let cost = log_c.exp();
    let basket = Basket::new(
        exponents
            .iter()
            .zip(prices.prices())
            .map(|(a, &p)| a * cost / (total * p))
            .collect(),
    )?;
    Ok(MinimalBasketRecord {
        utility: u,
        cost,
        basket,
        multiplier: -cost / (total * u),
    })
}

/// Solve the stationarity system `{p + lambda grad C(q) = 0, C(q) = u}` by a
/// damped Newton iteration from a feasible interior start.
///
/// The start point puts equal expenditure on every good and is scaled onto
/// the level set radially. Steps are shortened to stay in the interior and
/// halved until the residual decreases.
pub fn minimal_basket_numeric(
    c: &UtilityFunction,
    p: &PriceFunctional,
    u: f64,
    tol: f64,
) -> Result<MinimalBasketRecord> {
    check_dims(c, p)?;
    check_positive(u, "utility level")?;
    let n = c.dim();

    // equal-expenditure direction, scaled onto the level set
    let direction: Vec<f64> = p.prices().iter().map(|&pi| 1.0 / (n as f64 * pi)).collect();
    let start = locate_on_level(c, &direction, u)?;
    let mut q = start.quantities().to_vec();

    let price_scale = p
        .prices()
        .iter()
        .fold(f64::MIN_POSITIVE, |acc, &v| acc.max(v));
    let residual = |q: &[f64], lambda: f64| -> Result<(Vec<f64>, f64)> {
        let g = c.gradient_raw(q)?;
        let mut r = Vec::with_capacity(n + 1);
        for (&pi, &gi) in p.prices().iter().zip(&g) {
            r.push(pi + lambda * gi);
        }
        let value = c.eval_raw(q)?;
        r.push(value - u);
        let mut norm = (value - u).abs() / u.abs().max(1.0);
        for ri in &r[..n] {
            norm = norm.max(ri.abs() / price_scale);
        }
        Ok((r, norm))
    };

    let g0 = c.gradient_raw(&q)?;
    let dot_pg: f64 = p.prices().iter().zip(&g0).map(|(a, b)| a * b).sum();
    let dot_gg: f64 = g0.iter().map(|v| v * v).sum();
    let mut lambda = -dot_pg / dot_gg;

    let (_, mut norm) = residual(&q, lambda)?;
    for iteration in 0..MAX_NEWTON_ITERATIONS {
        if norm <= tol {
            let cost = p.value_raw(&q);
            return Ok(MinimalBasketRecord {
                utility: u,
                cost,
                basket: Basket::new(q)?,
                multiplier: lambda,
            });
        }
        let (r, _) = residual(&q, lambda)?;
        let g = c.gradient_raw(&q)?;
        let h = c.hessian_raw(&q)?;
        let mut jac = vec![vec![0.0; n + 1]; n + 1];
        for i in 0..n {
            for j in 0..n {
                jac[i][j] = lambda * h[i][j];
            }
            jac[i][n] = g[i];
            jac[n][i] = g[i];
        }
        let mut rhs: Vec<f64> = r.iter().map(|v| -v).collect();
        let step = solve_dense(&mut jac, &mut rhs)?;

        // keep the iterate strictly interior
        let mut beta: f64 = 1.0;
        for i in 0..n {
            if step[i] < 0.0 {
                beta = beta.min(-0.9 * q[i] / step[i]);
            }
        }
        let mut accepted = false;
        while beta >= 1e-12 {
            let trial_q: Vec<f64> = q
                .iter()
                .zip(&step[..n])
                .map(|(qi, s)| qi + beta * s)
                .collect();
            let trial_lambda = lambda + beta * step[n];
            if let Ok((_, trial_norm)) = residual(&trial_q, trial_lambda) {
                if trial_norm < norm {
                    q = trial_q;
                    lambda = trial_lambda;
                    norm = trial_norm;
                    accepted = true;
                    break;
                }
            }
            beta *= 0.5;
        }
        if !accepted {
            return Err(Error::NonConvergence {
                iterations: iteration,
                residual: norm,
            });
        }
    }
    if norm <= tol {
        let cost = p.value_raw(&q);
        return Ok(MinimalBasketRecord {
            utility: u,
            cost,
            basket: Basket::new(q)?,
            multiplier: lambda,
        });
    }
    Err(Error::NonConvergence {
        iterations: MAX_NEWTON_ITERATIONS,
        residual: norm,
    })
}

/// Expenditure minimizer dispatching on the utility representation:
/// closed form for Cobb-Douglas, Newton otherwise.
pub fn minimal_basket(
    c: &UtilityFunction,
    p: &PriceFunctional,
    u: f64,
    tol: f64,
) -> Result<MinimalBasketRecord> {
    match c.kind() {
        UtilityKind::CobbDouglas { exponents } => minimal_basket_closed_form(exponents, p, u),
        UtilityKind::BlackBox { .. } => minimal_basket_numeric(c, p, u, tol),
    }
}

/// The cost-of-living function: minimum expenditure attaining level `u`.
pub fn cost_of_living(c: &UtilityFunction, p: &PriceFunctional, u: f64) -> Result<f64> {
    Ok(minimal_basket(c, p, u, DEFAULT_NEWTON_TOL)?.cost)
}

/// The minimal basket attaining a given cost, found by inverting the
/// (strictly increasing) cost-of-living curve.
pub fn basket_by_cost(c: &UtilityFunction, p: &PriceFunctional, cost: f64) -> Result<Basket> {
    let curve = CostOfLivingCurve::new(c.clone(), p.clone())?;
    Ok(curve.minimal_basket_at_cost(cost)?.basket)
}

/// The distinguished cardinal utility that relabels each indifference set by
/// its minimal attainment cost: `q -> cost_of_living(C, P, C(q))`.
pub fn m_map_eval(c: &UtilityFunction, p: &PriceFunctional, q: &Basket) -> Result<f64> {
    let u = c.eval(q)?;
    cost_of_living(c, p, u)
}

/// The strictly increasing map `u -> minimal cost` together with its inverse.
#[derive(Debug, Clone)]
pub struct CostOfLivingCurve {
    utility: UtilityFunction,
    prices: PriceFunctional,
    tol: f64,
}

impl CostOfLivingCurve {
    pub fn new(utility: UtilityFunction, prices: PriceFunctional) -> Result<Self> {
        check_dims(&utility, &prices)?;
        Ok(CostOfLivingCurve {
            utility,
            prices,
            tol: DEFAULT_NEWTON_TOL,
        })
    }

    pub fn utility(&self) -> &UtilityFunction {
        &self.utility
    }

    pub fn prices(&self) -> &PriceFunctional {
        &self.prices
    }

    /// Minimal cost of attaining level `u`.
    pub fn cost(&self, u: f64) -> Result<f64> {
        Ok(self.record_at_level(u)?.cost)
    }

    pub fn record_at_level(&self, u: f64) -> Result<MinimalBasketRecord> {
        minimal_basket(&self.utility, &self.prices, u, self.tol)
    }

    /// Utility level attainable at cost `cost` (the inverse curve).
    pub fn level_at_cost(&self, cost: f64) -> Result<f64> {
        Ok(self.minimal_basket_at_cost(cost)?.utility)
    }

    /// Full record of the minimizer at a prescribed cost.
    pub fn minimal_basket_at_cost(&self, cost: f64) -> Result<MinimalBasketRecord> {
        check_positive(cost, "cost")?;
        if let UtilityKind::CobbDouglas { exponents } = self.utility.kind() {
            // closed-form inversion: c(u) = K u^(1/A) with K = c(1)
            let total: f64 = exponents.iter().sum();
            let k = minimal_basket_closed_form(exponents, &self.prices, 1.0)?.cost;
            let u = (total * (cost / k).ln()).exp();
            return minimal_basket_closed_form(exponents, &self.prices, u);
        }

        // bracket the target cost on the u axis, expanding geometrically
        let mut u_lo = 1.0_f64;
        let mut rec_lo = self.record_at_level(u_lo)?;
        let mut expansions = 0;
        while rec_lo.cost > cost {
            u_lo *= 0.25;
            rec_lo = self.record_at_level(u_lo)?;
            expansions += 1;
            if expansions > 120 {
                return Err(Error::CostOutOfRange { cost });
            }
        }
        let mut u_hi = u_lo.max(1.0);
        let mut rec_hi = self.record_at_level(u_hi)?;
        expansions = 0;
        while rec_hi.cost < cost {
            u_hi *= 4.0;
            rec_hi = self.record_at_level(u_hi)?;
            expansions += 1;
            if expansions > 120 {
                return Err(Error::CostOutOfRange { cost });
            }
        }

        // bisection until tight, then a Newton polish using the envelope
        // derivative dc/du = -multiplier
        let mut best = rec_lo.clone();
        for _ in 0..200 {
            if (u_hi - u_lo) <= 1e-13 * u_hi {
                break;
            }
            let mid = 0.5 * (u_lo + u_hi);
            let rec = self.record_at_level(mid)?;
            let better = (rec.cost - cost).abs() < (best.cost - cost).abs();
            if better {
                best = rec.clone();
            }
            if rec.cost < cost {
                u_lo = mid;
            } else {
                u_hi = mid;
            }
            if (rec.cost - cost).abs() <= 1e-12 * cost {
                break;
            }
        }
        for _ in 0..4 {
            if (best.cost - cost).abs() <= 1e-13 * cost {
                break;
            }
            let slope = -best.multiplier;
            if !(slope.is_finite() && slope > 0.0) {
                break;
            }
            let u_next = best.utility - (best.cost - cost) / slope;
            if !(u_next.is_finite() && u_next > 0.0) {
                break;
            }
            let rec = self.record_at_level(u_next)?;
            if (rec.cost - cost).abs() < (best.cost - cost).abs() {
                best = rec;
            } else {
                break;
            }
        }
        Ok(best)
    }
}
