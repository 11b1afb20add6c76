//! Shape-preserving monotone interpolation.
//!
//! Tabulated gauge maps and cost adjustments are stored as strictly
//! increasing knot tables joined by a PCHIP-style cubic Hermite interpolant.
//! For strictly increasing data the interpolant is strictly increasing, so
//! the tables stay invertible after composition and inversion.

use crate::error::{Error, Result};

/// Piecewise cubic Hermite interpolant with Fritsch-Carlson slopes.
#[derive(Debug, Clone, PartialEq)]
pub struct Pchip {
    x: Vec<f64>,
    y: Vec<f64>,
    d: Vec<f64>,
}

impl Pchip {
    /// Build the interpolant. `x` must be strictly increasing, both inputs
    /// finite and of equal length >= 2.
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if x.len() < 2 {
            return Err(Error::Empty { what: "knot grid" });
        }
        if y.len() != x.len() {
            return Err(Error::DimensionMismatch {
                expected: x.len(),
                got: y.len(),
            });
        }
        if let Some(&bad) = x.iter().find(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                context: "knot abscissa",
                value: bad,
            });
        }
        if let Some(&bad) = y.iter().find(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                context: "knot ordinate",
                value: bad,
            });
        }
        for i in 1..x.len() {
            if x[i] <= x[i - 1] {
                return Err(Error::NonIncreasingKnots {
                    index: i,
                    previous: x[i - 1],
                    value: x[i],
                });
            }
        }

        let n = x.len();
        let mut h = Vec::with_capacity(n - 1);
        let mut delta = Vec::with_capacity(n - 1);
        for i in 0..n - 1 {
            let hi = x[i + 1] - x[i];
            h.push(hi);
            delta.push((y[i + 1] - y[i]) / hi);
        }

        let mut d = vec![0.0; n];
        for k in 1..n - 1 {
            let s1 = delta[k - 1];
            let s2 = delta[k];
            if s1 == 0.0 || s2 == 0.0 || s1.signum() != s2.signum() {
                d[k] = 0.0;
            } else {
                let w1 = 2.0 * h[k] + h[k - 1];
                let w2 = h[k] + 2.0 * h[k - 1];
                // weighted harmonic mean keeps the cubic inside the monotone region
                d[k] = (w1 + w2) / (w1 / s1 + w2 / s2);
            }
        }
        d[0] = edge_slope(h[0], delta[0], h.get(1).copied(), delta.get(1).copied());
        d[n - 1] = edge_slope(
            h[n - 2],
            delta[n - 2],
            if n >= 3 { Some(h[n - 3]) } else { None },
            if n >= 3 { Some(delta[n - 3]) } else { None },
        );

        Ok(Pchip { x, y, d })
    }

    pub fn knots_x(&self) -> &[f64] {
        &self.x
    }

    pub fn knots_y(&self) -> &[f64] {
        &self.y
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.x[0], self.x[self.x.len() - 1])
    }

    fn segment(&self, xq: f64) -> usize {
        let n = self.x.len();
        if xq <= self.x[0] {
            0
        } else if xq >= self.x[n - 1] {
            n - 2
        } else {
            self.x.partition_point(|&xi| xi <= xq).saturating_sub(1)
        }
    }

    /// Evaluate at `xq`. Outside the knot range the curve continues linearly
    /// with the endpoint slope, which keeps monotone tables monotone.
    pub fn eval(&self, xq: f64) -> f64 {
        let n = self.x.len();
        if xq < self.x[0] {
            return self.y[0] + self.extrapolation_slope(true) * (xq - self.x[0]);
        }
        if xq > self.x[n - 1] {
            return self.y[n - 1] + self.extrapolation_slope(false) * (xq - self.x[n - 1]);
        }
        let k = self.segment(xq);
        let h = self.x[k + 1] - self.x[k];
        let t = (xq - self.x[k]) / h;
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.y[k] + h10 * h * self.d[k] + h01 * self.y[k + 1] + h11 * h * self.d[k + 1]
    }

    /// First derivative of the interpolant at `xq`.
    pub fn deriv(&self, xq: f64) -> f64 {
        let n = self.x.len();
        if xq < self.x[0] {
            return self.extrapolation_slope(true);
        }
        if xq > self.x[n - 1] {
            return self.extrapolation_slope(false);
        }
        let k = self.segment(xq);
        let h = self.x[k + 1] - self.x[k];
        let t = (xq - self.x[k]) / h;
        let t2 = t * t;
        let dh00 = (6.0 * t2 - 6.0 * t) / h;
        let dh10 = 3.0 * t2 - 4.0 * t + 1.0;
        let dh01 = (-6.0 * t2 + 6.0 * t) / h;
        let dh11 = 3.0 * t2 - 2.0 * t;
        dh00 * self.y[k] + dh10 * self.d[k] + dh01 * self.y[k + 1] + dh11 * self.d[k + 1]
    }

    /// Slope used past the ends. Falls back to the boundary secant when the
    /// clamped endpoint derivative vanished, so strictly increasing data
    /// extends strictly increasing.
    fn extrapolation_slope(&self, left: bool) -> f64 {
        let n = self.x.len();
        let (d_end, secant) = if left {
            (self.d[0], (self.y[1] - self.y[0]) / (self.x[1] - self.x[0]))
        } else {
            (
                self.d[n - 1],
                (self.y[n - 1] - self.y[n - 2]) / (self.x[n - 1] - self.x[n - 2]),
            )
        };
        if d_end != 0.0 {
            d_end
        } else {
            secant
        }
    }
}

fn edge_slope(h0: f64, s0: f64, h1: Option<f64>, s1: Option<f64>) -> f64 {
    match (h1, s1) {
        (Some(h1), Some(s1)) => {
            let mut d = ((2.0 * h0 + h1) * s0 - h0 * s1) / (h0 + h1);
            if d.signum() != s0.signum() {
                d = 0.0;
            } else if s0.signum() != s1.signum() && d.abs() > 3.0 * s0.abs() {
                d = 3.0 * s0;
            }
            d
        }
        _ => s0,
    }
}

/// Strictly increasing tabulated map together with a re-tabulated inverse.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneMap {
    fwd: Pchip,
    inv: Pchip,
}

impl MonotoneMap {
    /// Build from knot pairs; both `x` and `y` must be strictly increasing.
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        for i in 1..y.len().min(x.len()) {
            if y[i] <= y[i - 1] {
                return Err(Error::NonMonotone {
                    level: x[i],
                    a: y[i - 1],
                    b: y[i],
                });
            }
        }
        let fwd = Pchip::new(x.clone(), y.clone())?;
        let inv = Pchip::new(y, x)?;
        Ok(MonotoneMap { fwd, inv })
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.fwd.eval(x)
    }

    /// Inverse map, exact at the knots and interpolated in between.
    pub fn eval_inverse(&self, y: f64) -> f64 {
        self.inv.eval(y)
    }

    pub fn deriv(&self, x: f64) -> f64 {
        self.fwd.deriv(x)
    }

    pub fn domain(&self) -> (f64, f64) {
        self.fwd.domain()
    }

    pub fn range(&self) -> (f64, f64) {
        self.inv.domain()
    }

    pub fn knots_x(&self) -> &[f64] {
        self.fwd.knots_x()
    }

    pub fn knots_y(&self) -> &[f64] {
        self.fwd.knots_y()
    }

    /// Swap the axes: the returned map sends y back to x.
    pub fn inverted(&self) -> MonotoneMap {
        MonotoneMap {
            fwd: self.inv.clone(),
            inv: self.fwd.clone(),
        }
    }
}

/// `n` log-spaced points covering `[lo, hi]`, endpoints included.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(
        lo > 0.0 && hi > lo && n >= 2,
        "log_grid needs 0 < lo < hi, n >= 2"
    );
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| {
            if i == n - 1 {
                hi
            } else {
                (a + (b - a) * i as f64 / (n - 1) as f64).exp()
            }
        })
        .collect()
}
