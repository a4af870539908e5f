//! Damped and standard asymmetric telegraph processes: exact laws, path
//! samplers, large-deviation rate functions and level-crossing estimates.
//!
//! The damped process switches direction at rates that grow linearly with
//! the number of previous switches in each direction; the standard process
//! switches at constant rates. Both move at speed `c1` to the right and `c2`
//! to the left.

pub mod density;
pub mod error;
pub mod experiments;
pub mod optimize;
pub mod params;
pub mod quadrature;
pub mod rates;
pub mod rng;
pub mod sampler;

pub use density::{interval_probability, log_interval_probability, point_masses, AtomInclusion, LawOfD};
pub use error::{Error, Result};
pub use experiments::{
    compare_report, estimate_crossing, fit_decay_slope, ldp_curve, sharp_bound_check, CompareConfig, CompareReport,
    CrossingEstimate, HorizonPolicy, LdpPoint, SlopeFit,
};
pub use params::{classify_regime, validate_params, ModelParams, RawParams, Regime};
pub use rates::{
    check_dls_hypotheses, decay_rate_closed, decay_rate_numeric, rate, rate_id, rate_is, DecayRateReport, DlsReport,
    ExtendedRate,
};
pub use rng::RngStream;
pub use sampler::{sample_path, sample_position, PathSkeleton, ProcessKind};
