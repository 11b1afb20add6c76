//! Spot checks for the structural hypotheses on utility functions.
//!
//! Completeness of level sets is not decidable from finitely many samples;
//! the validators only flag rays that fail to attain the requested level.
//! Convexity to the origin is checked on sampled chords.

use crate::error::{Error, Result};
use crate::gauge::CrossSection;
use crate::utility::{Basket, UtilityFunction};

/// Relative tolerance for radial point location on level sets.
const RAY_TOL: f64 = 1e-12;
const MAX_BRACKET_EXPANSIONS: usize = 200;

/// A failing (or worst surviving) chord from the convexity check.
#[derive(Debug, Clone)]
pub struct ConvexityWitness {
    pub first: Basket,
    pub second: Basket,
    pub midpoint: Basket,
    pub midpoint_utility: f64,
}

/// Outcome of [`validate_convex_to_origin`].
#[derive(Debug, Clone)]
pub struct ConvexityReport {
    pub level: f64,
    pub pairs_checked: usize,
    pub passed: bool,
    /// Smallest `(C(midpoint) - u) / u` seen; negative values mean the
    /// midpoint fell strictly inside the level set.
    pub worst_relative_excess: f64,
    pub witness: Option<ConvexityWitness>,
}

/// Find the point at distance `r` along `direction` with `C(r * d) = u`.
///
/// Valid utilities are strictly increasing along rays from the origin, so
/// bisection with geometric bracket expansion suffices. Failure to bracket
/// the level is reported as [`Error::LevelNotAttained`], which doubles as a
/// heuristic completeness flag.
pub fn locate_on_level(c: &UtilityFunction, direction: &[f64], u: f64) -> Result<Basket> {
    let at = |r: f64| -> Result<f64> {
        let q: Vec<f64> = direction.iter().map(|d| d * r).collect();
        c.eval_raw(&q)
    };
    let mut lo = 1.0;
    let mut hi = 1.0;
    let mut v_lo = at(lo)?;
    let mut v_hi = v_lo;
    let mut expansions = 0;
    while v_lo > u {
        lo *= 0.25;
        v_lo = at(lo)?;
        expansions += 1;
        if expansions > MAX_BRACKET_EXPANSIONS {
            return Err(Error::LevelNotAttained {
                level: u,
                reached: v_lo,
            });
        }
    }
    expansions = 0;
    while v_hi < u {
        hi *= 4.0;
        v_hi = at(hi)?;
        expansions += 1;
        if expansions > MAX_BRACKET_EXPANSIONS {
            return Err(Error::LevelNotAttained {
                level: u,
                reached: v_hi,
            });
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (hi - lo) <= RAY_TOL * mid {
            break;
        }
        if at(mid)? < u {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let r = 0.5 * (lo + hi);
    Basket::new(direction.iter().map(|d| d * r).collect())
}

/// Deterministic low-discrepancy directions in the open positive orthant.
fn direction(n: usize, k: usize) -> Vec<f64> {
    if n == 2 {
        // golden-ratio rotation of the quarter circle, away from the axes
        let phi_inv = 0.618_033_988_749_894_9_f64;
        let t = (0.5 + k as f64 * phi_inv).fract();
        let theta = std::f64::consts::FRAC_PI_2 * (0.04 + 0.92 * t);
        vec![theta.cos(), theta.sin()]
    } else {
        // per-coordinate Weyl sequence with irrational strides
        (0..n)
            .map(|i| {
                let alpha = ((i + 2) as f64).sqrt().fract();
                0.1 + 0.9 * (0.37 + alpha * (k + 1) as f64).fract()
            })
            .collect()
    }
}

/// Check convexity to the origin of the level set `C^{-1}(u)` on sampled
/// chords: the midpoint of two level-set points must not fall on the origin
/// side of the set, i.e. `C(midpoint) >= u * (1 - tol)`.
///
/// One-good economies pass vacuously (level sets are single points).
pub fn validate_convex_to_origin(
    c: &UtilityFunction,
    u: f64,
    sample_pairs: usize,
    tol: f64,
) -> Result<ConvexityReport> {
    if u <= 0.0 {
        return Err(Error::NonPositive {
            context: "level value",
            index: 0,
            value: u,
        });
    }
    let n = c.dim();
    if n == 1 {
        return Ok(ConvexityReport {
            level: u,
            pairs_checked: 0,
            passed: true,
            worst_relative_excess: 0.0,
            witness: None,
        });
    }

    let mut worst = f64::INFINITY;
    let mut witness = None;
    for k in 0..sample_pairs {
        let a = locate_on_level(c, &direction(n, 2 * k), u)?;
        let b = locate_on_level(c, &direction(n, 2 * k + 1), u)?;
        let mid: Vec<f64> = a
            .quantities()
            .iter()
            .zip(b.quantities())
            .map(|(x, y)| 0.5 * (x + y))
            .collect();
        let mid = Basket::new(mid)?;
        let cu = c.eval(&mid)?;
        let excess = (cu - u) / u;
        if excess < worst {
            worst = excess;
            witness = Some(ConvexityWitness {
                first: a,
                second: b,
                midpoint: mid,
                midpoint_utility: cu,
            });
        }
    }
    Ok(ConvexityReport {
        level: u,
        pairs_checked: sample_pairs,
        passed: worst >= -tol,
        worst_relative_excess: worst,
        witness,
    })
}

/// True iff `|C(X(u)) - u| <= tol * max(1, u)` on every grid point.
pub fn validate_cross_section(section: &CrossSection, u_grid: &[f64], tol: f64) -> Result<bool> {
    for &u in u_grid {
        let q = section.basket_at(u)?;
        let v = section.utility().eval(&q)?;
        if (v - u).abs() > tol * u.abs().max(1.0) {
            return Ok(false);
        }
    }
    Ok(true)
}
