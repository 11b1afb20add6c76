//! Cost-of-living (Konus) index numbers for economies with time-varying
//! preferences and prices.
//!
//! The crate models an economy with `n` goods through cardinal utility
//! functions on the positive orthant and linear price functionals, and
//! builds the machinery needed to compare welfare across time:
//!
//! - [`utility`]: baskets, utility functions, price functionals;
//! - [`gauge`]: monotone reparameterizations of the utility scale and
//!   cross-sections picking one representative basket per indifference
//!   level;
//! - [`validate`]: spot checks for the structural hypotheses (convexity to
//!   the origin, cross-section consistency);
//! - [`expenditure`]: minimal-price baskets, the cost-of-living function
//!   and its inverse, and the relabeling of utilities by attainment cost;
//! - [`transport`]: one-dimensional parallel transport, cost-adjustment
//!   flows generated by time-dependent vector fields, and the
//!   horizontality predicate for section perturbations;
//! - [`mod@welfare`]: scenarios, welfare maps, and COLA index series.
//!
//! All types are immutable after construction and every operation is a pure
//! function, so values can be shared and sent freely across threads.

pub mod error;
pub mod expenditure;
pub mod gauge;
pub mod interp;
mod linalg;
pub mod transport;
pub mod utility;
pub mod validate;
pub mod welfare;

pub use error::{Error, Result};
pub use expenditure::{
    basket_by_cost, cost_of_living, m_map_eval, minimal_basket, minimal_basket_closed_form,
    minimal_basket_numeric, CostOfLivingCurve, MinimalBasketRecord,
};
pub use gauge::{
    apply_gauge, infer_gauge, reparameterize_section, CrossSection, GaugeMap, GaugeRepr,
};
pub use transport::{
    compose_adjustments, flow_adjustment, horizontality_check, invert_adjustment, transport_1d,
    AdjustmentProvenance, Connection1D, CostAdjustment, CostGenerator, HorizontalityReport,
    TangentPerturbation,
};
pub use utility::{Basket, PriceFunctional, UtilityFunction, UtilityKind};
pub use validate::{
    validate_convex_to_origin, validate_cross_section, ConvexityReport, ConvexityWitness,
};
pub use welfare::{
    cola_index, cola_point, fixed_utility_index_series, index_series, naive_welfare, welfare,
    AdjustmentPlan, IndexEntry, IndexPoint, IndexSeries, Scenario,
};

/// Default relative tolerance for comparisons and validators.
pub const DEFAULT_TOL: f64 = 1e-8;
