//! Base-2 Sobol nets and sequences, and exhaustive net-quality audits.
//!
//! Coordinates are generated as 64-bit dyadic numerators so fairness counts
//! are exact; conversion to `f64` happens at the API boundary and is lossless
//! for every net with `m <= 52`.

mod direction;
mod elementary;
mod sobol;

pub use direction::{DirectionNumberTable, DirectionRecord};
pub use elementary::{
    all_fair_at_order, audit_t_value, count_in_interval, for_each_shape, ElementaryInterval,
    NetAudit,
};
pub use sobol::{
    dyadic_to_f64, sobol_points, sobol_prefix, DigitalNet, DyadicPoints, SobolSequence,
    SobolStream, MAX_RESOLUTION,
};
