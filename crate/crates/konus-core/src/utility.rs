//! Baskets, cardinal utility functions, and linear price functionals.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Evaluator for a black-box utility: quantities to a strictly positive value.
pub type UtilityEval = Arc<dyn Fn(&[f64]) -> Result<f64> + Send + Sync>;
/// Gradient evaluator matching [`UtilityEval`].
pub type UtilityGrad = Arc<dyn Fn(&[f64]) -> Result<Vec<f64>> + Send + Sync>;

/// A point in the positive orthant: quantities of each good.
#[derive(Debug, Clone, PartialEq)]
pub struct Basket {
    quantities: Vec<f64>,
}

impl Basket {
    /// Every coordinate must be strictly positive and finite; `n >= 1`.
    pub fn new(quantities: Vec<f64>) -> Result<Self> {
        if quantities.is_empty() {
            return Err(Error::Empty { what: "basket" });
        }
        for (i, &q) in quantities.iter().enumerate() {
            if !q.is_finite() {
                return Err(Error::NonFinite {
                    context: "basket quantity",
                    value: q,
                });
            }
            if q <= 0.0 {
                return Err(Error::NonPositive {
                    context: "basket quantity",
                    index: i,
                    value: q,
                });
            }
        }
        Ok(Basket { quantities })
    }

    pub fn quantities(&self) -> &[f64] {
        &self.quantities
    }

    pub fn dim(&self) -> usize {
        self.quantities.len()
    }
}

impl std::ops::Index<usize> for Basket {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.quantities[i]
    }
}

/// The two supported utility representations.
#[derive(Clone)]
pub enum UtilityKind {
    /// `C(q) = prod_i q_i^(a_i)` with all exponents strictly positive.
    CobbDouglas { exponents: Vec<f64> },
    /// Caller-supplied evaluator and gradient.
    BlackBox {
        eval: UtilityEval,
        gradient: UtilityGrad,
    },
}

/// A cardinal utility function on the positive orthant.
///
/// Evaluation is strictly positive on valid baskets; Cobb-Douglas instances
/// additionally have convex-to-origin level sets and are strictly increasing
/// in every coordinate.
#[derive(Clone)]
pub struct UtilityFunction {
    kind: UtilityKind,
    dim: usize,
    label: Option<String>,
}

impl fmt::Debug for UtilityFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = f.debug_struct("UtilityFunction");
        match &self.kind {
            UtilityKind::CobbDouglas { exponents } => s
                .field("kind", &"CobbDouglas")
                .field("exponents", exponents),
            UtilityKind::BlackBox { .. } => s.field("kind", &"BlackBox"),
        }
        .field("dim", &self.dim)
        .field("label", &self.label)
        .finish()
    }
}

impl UtilityFunction {
    /// Cobb-Douglas utility with the given exponent vector.
    pub fn cobb_douglas(exponents: Vec<f64>) -> Result<Self> {
        if exponents.is_empty() {
            return Err(Error::Empty {
                what: "exponent vector",
            });
        }
        for (i, &a) in exponents.iter().enumerate() {
            if !a.is_finite() {
                return Err(Error::NonFinite {
                    context: "Cobb-Douglas exponent",
                    value: a,
                });
            }
            if a <= 0.0 {
                return Err(Error::NonPositive {
                    context: "Cobb-Douglas exponent",
                    index: i,
                    value: a,
                });
            }
        }
        let dim = exponents.len();
        Ok(UtilityFunction {
            kind: UtilityKind::CobbDouglas { exponents },
            dim,
            label: None,
        })
    }

    /// Black-box utility. The gradient evaluator is required; the optimizer
    /// never falls back to differencing the value function.
    pub fn black_box(dim: usize, eval: UtilityEval, gradient: UtilityGrad) -> Self {
        UtilityFunction {
            kind: UtilityKind::BlackBox { eval, gradient },
            dim,
            label: None,
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn kind(&self) -> &UtilityKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Evaluate on a basket, checking dimensions and that the result is a
    /// valid utility value (strictly positive, finite).
    pub fn eval(&self, q: &Basket) -> Result<f64> {
        if q.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: q.dim(),
            });
        }
        self.eval_raw(q.quantities())
    }

    /// Evaluate on raw coordinates assumed to be in the positive orthant.
    pub(crate) fn eval_raw(&self, q: &[f64]) -> Result<f64> {
        let value = match &self.kind {
            UtilityKind::CobbDouglas { exponents } => {
                // log-space product for scale robustness
                let mut s = 0.0;
                for (i, (a, &qi)) in exponents.iter().zip(q).enumerate() {
                    if qi <= 0.0 {
                        return Err(Error::NonPositive {
                            context: "utility argument",
                            index: i,
                            value: qi,
                        });
                    }
                    s += a * qi.ln();
                }
                s.exp()
            }
            UtilityKind::BlackBox { eval, .. } => eval(q)?,
        };
        if !value.is_finite() || value <= 0.0 {
            return Err(Error::InvalidUtilityValue { value });
        }
        Ok(value)
    }

    /// Gradient of the utility at `q`.
    pub fn gradient(&self, q: &Basket) -> Result<Vec<f64>> {
        if q.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: q.dim(),
            });
        }
        self.gradient_raw(q.quantities())
    }

    pub(crate) fn gradient_raw(&self, q: &[f64]) -> Result<Vec<f64>> {
        match &self.kind {
            UtilityKind::CobbDouglas { exponents } => {
                let c = self.eval_raw(q)?;
                Ok(exponents.iter().zip(q).map(|(a, &qi)| a * c / qi).collect())
            }
            UtilityKind::BlackBox { gradient, .. } => {
                let g = gradient(q)?;
                if g.len() != self.dim {
                    return Err(Error::DimensionMismatch {
                        expected: self.dim,
                        got: g.len(),
                    });
                }
                if let Some(&bad) = g.iter().find(|v| !v.is_finite()) {
                    return Err(Error::NonFinite {
                        context: "utility gradient",
                        value: bad,
                    });
                }
                Ok(g)
            }
        }
    }

    /// Hessian used by the Newton solver. Analytic for Cobb-Douglas; for
    /// black boxes it is a symmetrized forward difference of the supplied
    /// gradient (the gradient itself is never approximated).
    pub(crate) fn hessian_raw(&self, q: &[f64]) -> Result<Vec<Vec<f64>>> {
        let n = self.dim;
        match &self.kind {
            UtilityKind::CobbDouglas { exponents } => {
                let c = self.eval_raw(q)?;
                let mut h = vec![vec![0.0; n]; n];
                for i in 0..n {
                    for j in 0..n {
                        h[i][j] = if i == j {
                            c * exponents[i] * (exponents[i] - 1.0) / (q[i] * q[i])
                        } else {
                            c * exponents[i] * exponents[j] / (q[i] * q[j])
                        };
                    }
                }
                Ok(h)
            }
            UtilityKind::BlackBox { .. } => {
                let g0 = self.gradient_raw(q)?;
                let mut jac = vec![vec![0.0; n]; n];
                let mut qs = q.to_vec();
                for j in 0..n {
                    let hstep = (f64::EPSILON).sqrt() * q[j].abs().max(1e-8);
                    qs[j] = q[j] + hstep;
                    let gj = self.gradient_raw(&qs)?;
                    qs[j] = q[j];
                    for i in 0..n {
                        jac[i][j] = (gj[i] - g0[i]) / hstep;
                    }
                }
                // symmetrize: the exact Hessian is symmetric
                let mut h = vec![vec![0.0; n]; n];
                for i in 0..n {
                    for j in 0..n {
                        h[i][j] = 0.5 * (jac[i][j] + jac[j][i]);
                    }
                }
                Ok(h)
            }
        }
    }
}

/// A strictly positive linear price functional `q -> sum_i p_i q_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceFunctional {
    prices: Vec<f64>,
}

impl PriceFunctional {
    pub fn new(prices: Vec<f64>) -> Result<Self> {
        if prices.is_empty() {
            return Err(Error::Empty {
                what: "price vector",
            });
        }
        for (i, &p) in prices.iter().enumerate() {
            if !p.is_finite() {
                return Err(Error::NonFinite {
                    context: "price",
                    value: p,
                });
            }
            if p <= 0.0 {
                return Err(Error::NonPositive {
                    context: "price",
                    index: i,
                    value: p,
                });
            }
        }
        Ok(PriceFunctional { prices })
    }

    pub fn prices(&self) -> &[f64] {
        &self.prices
    }

    pub fn dim(&self) -> usize {
        self.prices.len()
    }

    /// Price of a basket.
    pub fn value(&self, q: &Basket) -> Result<f64> {
        if q.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: q.dim(),
            });
        }
        Ok(self.value_raw(q.quantities()))
    }

    pub(crate) fn value_raw(&self, q: &[f64]) -> f64 {
        self.prices.iter().zip(q).map(|(p, q)| p * q).sum()
    }
}
