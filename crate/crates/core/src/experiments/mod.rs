//! Desk-scale checks of the asymptotic statements: LDP convergence from the
//! exact law, Monte Carlo level-crossing probabilities and their decay
//! slopes, and the damped-versus-standard comparison.

mod compare;
mod crossing;
mod fit;
mod ldp;

pub use compare::{
    compare_report, standard_mean_over_t, CompareConfig, CompareReport, CrossingSection, DecayComparison, LlnProbe,
    NamedCheck, RateRow,
};
pub use crossing::{estimate_crossing, CrossingEstimate, HorizonPolicy, CROSSING_CSV_HEADER};
pub use fit::{fit_decay_slope, fit_decay_slope_with, sharp_bound_check, SharpBoundCheck, SlopeFit, MIN_HITS_FOR_FIT};
pub use ldp::{ldp_curve, window_target, LdpPoint, LDP_CSV_HEADER};
